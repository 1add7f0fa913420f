"""Uniformly accelerated worldlines and the proper-time ratios between detectors.

Natural units throughout (hbar = c = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class RindlerWorldline:
    a: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0):
            raise DomainError(f"proper acceleration must be positive and finite, got {self.a}")


def rindler_position(w: RindlerWorldline, tau: float) -> tuple[float, float]:
    """Inertial-frame coordinates ``(T, X)`` at proper time ``tau``."""
    return math.sinh(w.a * tau) / w.a, math.cosh(w.a * tau) / w.a


def rindler_velocity(w: RindlerWorldline, tau: float) -> float:
    """``dX/dT`` along the hyperbola."""
    return math.tanh(w.a * tau)


def accel_stage_duration(a: float, v: float) -> float:
    """Proper time spent accelerating from rest to speed ``v`` and back."""
    if not (math.isfinite(a) and a > 0):
        raise DomainError(f"acceleration must be positive, got {a}")
    if not (0.0 <= v < 1.0):
        raise DomainError(f"speed must lie in [0, 1), got {v}")
    return 2.0 * math.atanh(v) / a


def alpha_v(v_rel: float) -> float:
    """Proper-time ratio of two inertial detectors with relative speed ``v_rel``."""
    if not (math.isfinite(v_rel) and abs(v_rel) < 1.0):
        raise DomainError(f"|v_rel| must be below 1, got {v_rel}")
    return math.sqrt(1.0 - v_rel * v_rel)


def alpha_a(a1: float, a2: float) -> float:
    """Proper-time ratio ``tau2 / tau1 = a1 / a2`` of two accelerated detectors."""
    if not (math.isfinite(a2) and a2 > 0):
        raise DomainError(f"a2 must be positive, got {a2}")
    if not (math.isfinite(a1) and a1 >= 0):
        raise DomainError(f"a1 must be non-negative, got {a1}")
    return a1 / a2


@dataclass(frozen=True)
class StagePlan:
    """Accelerations of both detectors in the hot and cold stages.

    ``a_H1 = 0`` encodes an unaccelerated observer during heating
    (``alpha_aH = 0``).  Both detectors share the speed ``v`` in the
    adiabatic stages, so ``alpha_v`` is 1 unless a relative speed is given.
    """

    v: float
    a_H1: float
    a_H2: float
    a_C1: float
    a_C2: float
    v_rel: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.v < 1.0):
            raise DomainError(f"v must lie in [0, 1), got {self.v}")
        for name in ("a_H2", "a_C1", "a_C2"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise DomainError(f"{name} must be positive, got {val}")
        if not (math.isfinite(self.a_H1) and self.a_H1 >= 0):
            raise DomainError(f"a_H1 must be non-negative, got {self.a_H1}")

    @property
    def alpha_aH(self) -> float:
        return alpha_a(self.a_H1, self.a_H2)

    @property
    def alpha_aC(self) -> float:
        return alpha_a(self.a_C1, self.a_C2)

    @property
    def alpha_v(self) -> float:
        return alpha_v(self.v_rel)

    def hot_durations(self) -> tuple[float, float]:
        """Acceleration durations of both detectors during heating.

        Zero acceleration means the detector never changes speed, so the
        first entry is infinite in that case.
        """
        d1 = math.inf if self.a_H1 == 0 else accel_stage_duration(self.a_H1, self.v)
        return d1, accel_stage_duration(self.a_H2, self.v)
