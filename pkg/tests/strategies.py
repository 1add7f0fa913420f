import math

import numpy as np
from hypothesis import strategies as st

from euqoe.algebra import InitialState

finite = st.floats(-5, 5, allow_nan=False)
positive = st.floats(0.05, 5, allow_nan=False)
alphas = st.floats(0.0, 1.0, allow_nan=False)


@st.composite
def states(draw):
    p = draw(st.floats(0, 1))
    theta = draw(st.floats(0, math.pi / 2))
    phase = draw(st.floats(-math.pi, math.pi))
    b1 = complex(math.cos(theta))
    b2 = math.sin(theta) * complex(np.exp(1j * phase))
    norm = math.sqrt(abs(b1) ** 2 + abs(b2) ** 2)
    return InitialState(p, b1 / norm, b2 / norm)
