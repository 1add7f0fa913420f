"""Spectral representation of vacuum two-point functions along accelerated worldlines.

Every correlator between detectors ``j`` and ``l`` is written as a positive
frequency integral

    G_jl(x, y) = int_0^inf dk [ plus(k) e^{-ik(x - y)} + minus(k) e^{+ik(x - y)} ]

with ``x`` and ``y`` the raw proper times on the two detectors.  The kernels
here return the non-oscillatory weights ``plus``/``minus``; the oscillatory
time factors are left to the caller so the time integrals can be done
analytically (engine) or numerically (oracle).

For the pair (1, 2) the thermal exponent is ``pi k (1/a1 + 1/a2) / 2``; all
weights are assembled from ``exp(-2 pi k / a)`` so that nothing overflows at
large ``k`` and ``a1 = 0`` (an inertial observer) is a clean limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from .errors import ConvergenceError, DomainError


@dataclass(frozen=True)
class DetectorPairKinematics:
    """Observer acceleration ``a1`` and ratio ``alpha_a = a1 / a2``.

    When ``alpha_a == 0`` the second acceleration cannot be derived and must
    be supplied as ``a2``.
    """

    a1: float
    alpha_a: float
    a2_given: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.a1) and self.a1 >= 0):
            raise DomainError(f"a1 must be non-negative, got {self.a1}")
        if not (math.isfinite(self.alpha_a) and self.alpha_a >= 0):
            raise DomainError(f"alpha_a must be non-negative, got {self.alpha_a}")
        if self.alpha_a == 0:
            if self.a2_given is None or not self.a2_given > 0:
                raise DomainError("alpha_a = 0 needs the second acceleration a2")
            if self.a1 != 0:
                raise DomainError("alpha_a = 0 requires a1 = 0")
        elif self.a1 == 0:
            raise DomainError("a1 = 0 is only consistent with alpha_a = 0")

    @classmethod
    def from_second(cls, alpha_a: float, a2: float) -> "DetectorPairKinematics":
        """Build from the second detector's acceleration, valid down to ``alpha_a = 0``."""
        if not (math.isfinite(a2) and a2 > 0):
            raise DomainError(f"a2 must be positive, got {a2}")
        return cls(alpha_a * a2, alpha_a, a2)

    @property
    def a2(self) -> float:
        if self.alpha_a == 0:
            return float(self.a2_given)
        return self.a1 / self.alpha_a


@dataclass(frozen=True)
class KernelRecord:
    """Spectral weights at one or more frequencies (arrays broadcast).

    ``plus`` multiplies ``exp(-ik(x-y))`` and ``minus`` multiplies
    ``exp(+ik(x-y))``.  ``difference = plus - minus`` is the commutator
    density and is stored separately because forming it by subtraction
    loses precision at small ``k``.
    """

    k: np.ndarray
    weight: np.ndarray
    plus: np.ndarray
    minus: np.ndarray
    difference: np.ndarray

    @property
    def sum(self):
        return self.plus + self.minus

    def integrand(self, delta_eta):
        """Spectral integrand ``plus e^{-ik d} + minus e^{ik d}`` at time separation ``d``."""
        phase = np.exp(-1j * self.k * np.asarray(delta_eta))
        return self.plus * phase + self.minus * np.conj(phase)


def _check_k(k):
    k = np.asarray(k, dtype=float)
    if np.any(~(k > 0)):
        raise DomainError("spectral frequency must be strictly positive")
    return k


def _pair_kernel_1p1(k, a_j: float, a_l: float) -> KernelRecord:
    k = _check_k(k)
    # thermal exponents pi k / a, with a = 0 meaning an infinitely cold detector
    e_j = np.inf if a_j == 0 else math.pi / a_j
    e_l = np.inf if a_l == 0 else math.pi / a_l
    x_j = e_j * k
    x_l = e_l * k
    root = np.sqrt(-np.expm1(-2 * x_j) * -np.expm1(-2 * x_l))
    plus = 1.0 / (2 * math.pi * k * root)
    decay = np.exp(-(x_j + x_l))
    minus = plus * decay
    difference = plus * -np.expm1(-(x_j + x_l))
    weight = plus * np.exp(-(x_j + x_l) / 2)
    return KernelRecord(k, weight, plus, minus, difference)


def g12_kernel_1p1(k, kin: DetectorPairKinematics) -> KernelRecord:
    """Cross-detector 1+1D kernel: ``weight = 1 / (4 pi k sqrt(sinh(pi k/a1) sinh(pi k/a2)))``."""
    return _pair_kernel_1p1(k, kin.a1, kin.a2)


def g11_kernel_1p1(k, a1: float) -> KernelRecord:
    """Same-detector 1+1D kernel, ``weight = 1 / (4 pi k sinh(pi k / a1))``."""
    if not (math.isfinite(a1) and a1 > 0):
        raise DomainError(f"a1 must be positive, got {a1}")
    return _pair_kernel_1p1(k, a1, a1)


def spectral_integrand_1p1(k, x, y, a_j: float, a_l: float):
    """Integrand over ``k`` of ``G_jl(x, y)`` for raw proper times ``x`` (on j) and ``y`` (on l)."""
    return _pair_kernel_1p1(k, a_j, a_l).integrand(np.asarray(x) - np.asarray(y))


# --- imaginary-order modified Bessel function ------------------------------

_DECAY_BUDGET = 42.0  # exp(-42) ~ 6e-19
_MAX_HALVINGS = 14


def _kiv_trapezoid(nu: float, x: np.ndarray, theta: float, h: float) -> np.ndarray:
    """Trapezoid sum of the contour-rotated integral, scaled by ``exp(nu*theta)``.

    Also returns the same sum over the envelope, an upper bound on the size
    of the integrand used for the convergence test.
    """
    c, s = math.cos(theta), math.sin(theta)
    xmin = float(np.min(x))
    # the envelope is measured relative to its value exp(-x cos theta) at t = 0
    t_max = math.acosh(1.0 + _DECAY_BUDGET / (xmin * c))
    n = int(math.ceil(t_max / h)) + 1
    t = np.arange(n) * h
    xx = x[:, None]
    envelope = np.exp(-xx * c * (2 * np.sinh(0.5 * t) ** 2))
    f = envelope * np.cos(nu * t - xx * s * np.sinh(t))
    mass = h * (envelope.sum(axis=1) - 0.5 * envelope[:, 0])
    value = h * (f.sum(axis=1) - 0.5 * f[:, 0])
    level = np.exp(-x * c)
    return value * level, mass * level


def _rotation(nu: float, x: float) -> float:
    # Rotating the contour by theta pulls out exp(-nu*theta) and removes the
    # cancellation that plagues the real-axis integral when nu exceeds x.
    if nu <= max(1.0, 0.5 * x):
        return 0.0
    return 0.5 * math.pi - min(0.5 * math.pi, 1.0 / math.sqrt(nu))


def _kiv_scaled_array(nu: float, x: np.ndarray, tol: float) -> np.ndarray:
    theta = _rotation(nu, float(np.min(x)))
    h = 0.25 if theta == 0 else 0.25 * math.sqrt(math.cos(theta))
    prev, _ = _kiv_trapezoid(nu, x, theta, h)
    for _ in range(_MAX_HALVINGS):
        h *= 0.5
        cur, mass = _kiv_trapezoid(nu, x, theta, h)
        # near zeros of K the relative change is meaningless; compare with
        # the integrand's absolute mass instead
        if np.all(np.abs(cur - prev) <= tol * np.maximum(np.abs(cur), mass)):
            return cur * math.exp(nu * (0.5 * math.pi - theta))
        prev = cur
    raise ConvergenceError("trapezoid rule for K_{i nu} did not converge",
                           partial=cur * math.exp(nu * (0.5 * math.pi - theta)),
                           diagnostics={"nu": nu, "theta": theta, "h": h})


def bessel_k_imag_scaled(nu: float, x, tol: float = 1e-13):
    """``exp(pi nu / 2) * K_{i nu}(x)``, the natural size of the function for large ``nu``."""
    if not math.isfinite(nu):
        raise DomainError(f"order must be finite, got {nu}")
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(~(xa > 0)) or not np.all(np.isfinite(xa)):
        raise DomainError("argument must be positive and finite")
    nu = abs(float(nu))
    out = np.empty_like(xa)
    # group arguments so each rotation angle is chosen for its own range
    order = np.argsort(xa)
    for chunk in np.array_split(order, max(1, len(order) // 64)):
        out[chunk] = _kiv_scaled_array(nu, xa[chunk], tol)
    return out[0] if np.ndim(x) == 0 else out.reshape(np.shape(x))


def bessel_k_imag(nu: float, x, tol: float = 1e-13):
    """Modified Bessel function of the second kind with imaginary order, ``K_{i nu}(x)``.

    Uses ``K_{i nu}(x) = int_0^inf exp(-x cosh t) cos(nu t) dt``; for large
    orders the contour is shifted towards ``Im t = pi/2`` first.  The
    trapezoid step is halved until two successive sums agree to ``tol``.
    """
    return bessel_k_imag_scaled(nu, x, tol) * math.exp(-0.5 * math.pi * abs(nu))


# --- 1+3D kernels -----------------------------------------------------------

_MEASURE_1P3 = 2.0 / (2 * math.pi) ** 4


def g_kernel_1p3(omega_k, kp_mag, kin: DetectorPairKinematics) -> KernelRecord:
    """1+3D kernel at one frequency and transverse momentum magnitude.

    The azimuthal angle is already integrated, so the weight carries
    ``2 pi |k_p|`` and integrating it over ``|k_p|`` gives the full
    transverse integral.
    """
    if kin.a1 == 0:
        raise DomainError("the 1+3D kernel needs a1 > 0")
    w = float(omega_k)
    if not w > 0:
        raise DomainError("spectral frequency must be strictly positive")
    kp = np.asarray(kp_mag, dtype=float)
    a1, a2 = kin.a1, kin.a2
    nu1, nu2 = w / a1, w / a2
    kp_safe = np.where(kp > 0, kp, 1.0)
    k1 = bessel_k_imag_scaled(nu1, kp_safe / a1)
    k2 = bessel_k_imag_scaled(nu2, kp_safe / a2)
    pref = _MEASURE_1P3 / math.sqrt(a1 * a2) * 2 * math.pi * kp
    plus = np.where(kp > 0, pref * k1 * k2, 0.0)
    theta = 0.5 * math.pi * (nu1 + nu2)
    minus = plus * math.exp(-2 * theta)
    return KernelRecord(np.full_like(plus, w), plus * math.exp(-theta), plus, minus,
                        plus * -math.expm1(-2 * theta))


@lru_cache(maxsize=65536)
def _transverse_core(omega_k: float, a1: float, alpha: float) -> float:
    """``Re[alpha^{i nu2} (pi d / sinh pi d) 2F1(1+is, 1+id; 2; 1-alpha^2)]``."""
    if alpha == 1.0:
        return 1.0
    a2 = a1 / alpha
    nu1, nu2 = omega_k / a1, omega_k / a2
    s = 0.5 * (nu1 + nu2)
    d = 0.5 * (nu2 - nu1)
    with mpmath.workdps(20):
        f = mpmath.hyp2f1(1 + 1j * s, 1 + 1j * d, 2, 1 - alpha * alpha)
        pd = mpmath.pi * d / mpmath.sinh(mpmath.pi * d) if d != 0 else 1
        val = mpmath.power(alpha, 1j * nu2) * pd * f
    return float(mpmath.re(val))


def cross_kernel_1p3(omega_k, kin: DetectorPairKinematics) -> KernelRecord:
    """1+3D kernel with the transverse momentum integrated in closed form.

    Uses ``int_0^inf x K_{i nu1}(x/a1) K_{i nu2}(x/a2) dx
    = (a1^2/2) alpha^{i nu2} (pi s / sinh pi s)(pi d / sinh pi d)
    2F1(1+is, 1+id; 2; 1-alpha^2)`` with ``s, d`` the half sum and half
    difference of the orders.  Equal accelerations reduce it to
    ``(a^2/2) pi nu / sinh(pi nu)``.
    """
    if kin.a1 == 0:
        raise DomainError("the 1+3D kernel needs a1 > 0")
    w = _check_k(omega_k)
    a1, alpha = kin.a1, kin.alpha_a
    a2 = kin.a2
    flat = w.ravel()
    core = np.array([_transverse_core(float(v), float(a1), float(alpha)) for v in flat])
    core = core.reshape(w.shape)
    s = 0.5 * w * (1 / a1 + 1 / a2)
    two_pi_s = 2 * math.pi * s
    # e^{pi s} * pi s / sinh(pi s) = 2 pi s / (1 - e^{-2 pi s})
    boost = two_pi_s / -np.expm1(-two_pi_s)
    plus = _MEASURE_1P3 / math.sqrt(a1 * a2) * 2 * math.pi * 0.5 * a1 * a1 * core * boost
    minus = plus * np.exp(-two_pi_s)
    difference = _MEASURE_1P3 / math.sqrt(a1 * a2) * 2 * math.pi * 0.5 * a1 * a1 * core * two_pi_s
    weight = plus * np.exp(-math.pi * s)
    return KernelRecord(w, weight, plus, minus, difference)


def same_kernel_1p3(omega_k, a: float) -> KernelRecord:
    """Single-detector 1+3D kernel: the equal-acceleration case of :func:`cross_kernel_1p3`."""
    return cross_kernel_1p3(omega_k, DetectorPairKinematics(a, 1.0))


# --- symmetry identities of the correlators ---------------------------------

def exchange_pair(k, tau1p, tau1pp, kin: DetectorPairKinematics):
    """Spectral integrands of ``G12(tau', alpha tau'')`` and ``G21(-alpha tau'', -tau')``.

    Both detectors' correlators are built independently (kernel order and
    time arguments swapped); they must agree pointwise in ``k``.
    """
    t2 = kin.alpha_a * np.asarray(tau1pp)
    lhs = spectral_integrand_1p1(k, tau1p, t2, kin.a1, kin.a2)
    rhs = spectral_integrand_1p1(k, -t2, -np.asarray(tau1p), kin.a2, kin.a1)
    return lhs, rhs


def rescaled_pair(y, tau1p, tau1pp, kin: DetectorPairKinematics):
    """``G22`` at detector-2 times after ``k = y / alpha``, against ``G11`` at frequency ``y``.

    The substitution carries the Jacobian ``1/alpha``; the two integrands
    agree pointwise when the accelerations are related by ``a2 = a1 / alpha``.
    """
    y = np.asarray(y, dtype=float)
    alpha = kin.alpha_a
    if alpha == 0:
        raise DomainError("the rescaling identity needs alpha_a > 0")
    g22 = spectral_integrand_1p1(y / alpha, alpha * np.asarray(tau1p), alpha * np.asarray(tau1pp),
                                 kin.a2, kin.a2) / alpha
    g11 = spectral_integrand_1p1(y, tau1p, tau1pp, kin.a1, kin.a1)
    return g22, g11
