"""Hand-transcribed entries of the twelve second-order operator products.

Kept apart from the library on purpose: the tests compare these literal
matrices with products computed by multiplication.  Arguments ``a, b`` are
detector-1 offsets at the primed and double-primed times, ``c, d`` the
detector-2 ones.
"""

import numpy as np


def _e(x):
    return np.exp(1j * x)


def product(n, p, b1, b2, w, a, b, c, d):
    q = 1 - p
    B1, B2 = abs(b1) ** 2, abs(b2) ** 2
    x, y = b1 * np.conj(b2), np.conj(b1) * b2
    Z = np.zeros((4, 4), complex)
    if n == 1:
        u = a - b
        Z[0, 0] = p * _e(w * u); Z[1, 1] = q * B1 * _e(w * u); Z[1, 2] = q * x * _e(w * u)
        Z[2, 1] = q * y * _e(-w * u); Z[2, 2] = q * B2 * _e(-w * u)
    elif n == 2:
        u = a - d
        Z[1, 1] = q * y * _e(w * u); Z[1, 2] = q * B2 * _e(w * u); Z[2, 1] = q * B1 * _e(-w * u)
        Z[2, 2] = q * x * _e(-w * u); Z[3, 0] = p * _e(-w * (a + d))
    elif n == 3:
        u = c - b
        Z[1, 1] = q * y * _e(-w * u); Z[1, 2] = q * B2 * _e(-w * u); Z[2, 1] = q * B1 * _e(w * u)
        Z[2, 2] = q * x * _e(w * u); Z[3, 0] = p * _e(-w * (c + b))
    elif n == 4:
        u = c - d
        Z[0, 0] = p * _e(w * u); Z[1, 1] = q * B1 * _e(-w * u); Z[1, 2] = q * x * _e(-w * u)
        Z[2, 1] = q * y * _e(w * u); Z[2, 2] = q * B2 * _e(w * u)
    elif n == 5:
        u = a - b
        Z[0, 0] = p * _e(-w * u); Z[1, 1] = q * B1 * _e(-w * u); Z[1, 2] = q * x * _e(w * u)
        Z[2, 1] = q * y * _e(-w * u); Z[2, 2] = q * B2 * _e(w * u)
    elif n == 6:
        u = b - c
        Z[0, 3] = p * _e(w * (b + c)); Z[1, 1] = q * x * _e(-w * u); Z[1, 2] = q * B1 * _e(w * u)
        Z[2, 1] = q * B2 * _e(-w * u); Z[2, 2] = q * y * _e(w * u)
    elif n == 7:
        u = d - a
        Z[0, 3] = p * _e(w * (d + a)); Z[1, 1] = q * x * _e(w * u); Z[1, 2] = q * B1 * _e(-w * u)
        Z[2, 1] = q * B2 * _e(w * u); Z[2, 2] = q * y * _e(-w * u)
    elif n == 8:
        u = d - c
        Z[0, 0] = p * _e(w * u); Z[1, 1] = q * B1 * _e(-w * u); Z[1, 2] = q * x * _e(w * u)
        Z[2, 1] = q * y * _e(-w * u); Z[2, 2] = q * B2 * _e(w * u)
    elif n == 9:
        u = a - b
        Z[0, 0] = q * B2 * _e(w * u); Z[0, 3] = q * y * _e(w * (a + b))
        Z[2, 2] = p * _e(-w * u); Z[3, 0] = q * x * _e(-w * (a + b)); Z[3, 3] = q * B1 * _e(-w * u)
    elif n == 10:
        u = a - d
        Z[0, 0] = q * y * _e(w * u); Z[0, 3] = q * B2 * _e(w * (a + d))
        Z[2, 1] = p * _e(-w * u); Z[3, 0] = q * B1 * _e(-w * (a + d)); Z[3, 3] = q * x * _e(-w * u)
    elif n == 11:
        u = c - b
        Z[0, 0] = q * x * _e(w * u); Z[0, 3] = q * B1 * _e(w * (c + b))
        Z[1, 2] = p * _e(-w * u); Z[3, 0] = q * B2 * _e(-w * (c + b)); Z[3, 3] = q * y * _e(-w * u)
    elif n == 12:
        u = c - d
        Z[0, 0] = q * B1 * _e(w * u); Z[0, 3] = q * x * _e(w * (c + d))
        Z[1, 1] = p * _e(-w * u); Z[3, 0] = q * y * _e(-w * (c + d)); Z[3, 3] = q * B2 * _e(-w * u)
    else:
        raise ValueError(n)
    return Z
