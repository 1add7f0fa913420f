"""Thermodynamics of one Otto cycle: spectral integral, traces, works, heats, efficiency.

Conventions
-----------
Energies are in the same units as ``omega1``/``omega2`` and times in their
inverse.  The hot-stage observer (detector 1) accelerates at
``aH1 = alpha_aH * aH2`` so the configuration is stored through ``aH2``,
which stays finite when the observer is inertial (``alpha_aH = 0``).

For the maximally entangled states every trace is ``sign * 2 (1 + alpha') I1``
with

    I1 = 2 mu^2 cos(omega2 (alpha - 1) tau_a) int_0^inf D(k) B(k) dk,

``D = plus - minus`` the commutator density of the cross-detector kernel and
``B(k) = P(k + omega2) - P(k - omega2)``, ``P(x) = sin(x tau_a) sin(alpha x tau_a) / x^2``.
``B`` is proportional to ``alpha``, so at ``alpha_aH = 0`` the integral
vanishes identically; there the engine reports the leading coefficient
``lim I1 / alpha`` instead and flags the report as per-unit-alpha.  All
efficiencies are ratios of traces, so they are unaffected.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev
from scipy import special

from .algebra import EntangledParity, InitialState, initial_density, trace_rho_h
from .errors import DomainError, InvalidEngineError
from .quadrature import (QuadratureResult, ZERO, integrate_fourier_tail, integrate_interval,
                         patched_sinc_pair)
from .wightman import (DetectorPairKinematics, cross_kernel_1p3, g11_kernel_1p1, g12_kernel_1p1,
                       same_kernel_1p3)

POSITIVITY_FACTOR = 10.0


class Dimension(enum.Enum):
    D1P1 = "1p1"
    D1P3 = "1p3"

    @classmethod
    def parse(cls, text) -> "Dimension":
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower().replace("+", "p").removeprefix("d")
        for member in cls:
            if member.value == key:
                return member
        raise DomainError(f"unknown dimension {text!r}; expected 1p1 or 1p3")


@dataclass(frozen=True)
class CycleConfig:
    """Physical parameters of one cycle.

    ``alpha_aC`` defaults to the value that makes the heat balance close
    exactly with ``alpha_v = 1``; pass it explicitly to study mismatched
    cycles.  Interaction is on in stages 2 and 4 only.
    """

    omega1: float
    omega2: float
    alpha_aH: float
    aH2: float
    tau_a: float
    state: InitialState = field(default_factory=lambda: InitialState.from_parity(
        EntangledParity.SYMMETRIC))
    dimension: Dimension = Dimension.D1P1
    mu: float = 1.0
    alpha_v: float = 1.0
    alpha_aC: float | None = None
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    interaction_on: tuple[bool, bool, bool, bool] = (False, True, False, True)

    def __post_init__(self):
        for name in ("omega1", "omega2", "aH2", "tau_a", "mu", "rel_tol", "abs_tol"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise DomainError(f"{name} must be positive and finite, got {val}")
        if not self.omega2 > self.omega1:
            raise DomainError("the engine needs omega2 > omega1")
        if not (math.isfinite(self.alpha_aH) and 0 <= self.alpha_aH <= 1):
            raise DomainError(f"alpha_aH must lie in [0, 1], got {self.alpha_aH}")
        if not (math.isfinite(self.alpha_v) and self.alpha_v >= 0):
            raise DomainError("alpha_v must be non-negative")
        object.__setattr__(self, "dimension", Dimension.parse(self.dimension))
        if self.dimension is Dimension.D1P3 and self.alpha_aH == 0:
            raise DomainError("1+3D kernels need alpha_aH > 0 (the inertial limit is 1+1D only)")

    @property
    def aH1(self) -> float:
        return self.alpha_aH * self.aH2

    @property
    def eta0(self) -> float:
        return eta0(self.omega1, self.omega2)

    @property
    def speed(self) -> float:
        """Adiabatic-stage speed reached after accelerating for ``tau_a``."""
        return math.tanh(self.aH1 * self.tau_a)

    @property
    def resolved_alpha_aC(self) -> float:
        if self.alpha_aC is not None:
            return self.alpha_aC
        return (self.alpha_aH * self.omega2 - self.omega2 + self.omega1) / self.omega1

    @property
    def hot_kinematics(self) -> DetectorPairKinematics:
        return DetectorPairKinematics.from_second(self.alpha_aH, self.aH2)


def eta0(omega1: float, omega2: float) -> float:
    """Single-qubit Otto efficiency ``1 - omega1 / omega2``."""
    if not (0 < omega1 < omega2):
        raise DomainError(f"need 0 < omega1 < omega2, got {omega1}, {omega2}")
    return 1.0 - omega1 / omega2


# --- the spectral integral --------------------------------------------------

def _bracket(k, omega, tau, alpha):
    return patched_sinc_pair(k, -omega, tau, alpha) - patched_sinc_pair(k, omega, tau, alpha)


def _bracket_per_alpha(k, omega, tau):
    """``lim B / alpha`` as alpha -> 0: ``tau [sin((k+w)t)/(k+w) - sin((k-w)t)/(k-w)]``."""
    return tau * tau * (np.sinc((k + omega) * tau / math.pi) - np.sinc((k - omega) * tau / math.pi))


def _saturation(kin: DetectorPairKinematics) -> float:
    # beyond this every exp(-2 pi k / a) is below double-precision epsilon
    return 20.0 * max(kin.a1, kin.a2) / math.pi


def _j_tail(c: float, s: float, big_k: float) -> float:
    """``int_K^inf cos(c (k + s)) / (k (k + s)^2) dk`` via sine and cosine integrals."""
    u = big_k + s
    if c == 0.0:
        head = math.log1p(s / big_k)
        last = 1.0 / u
    else:
        si_k, ci_k = special.sici(c * big_k)
        si_u, ci_u = special.sici(c * u)
        a = -math.cos(c * s) * ci_k - math.sin(c * s) * (0.5 * math.pi - si_k)
        head = a + ci_u
        last = math.cos(c * u) / u - c * (0.5 * math.pi - si_u)
    return head / (s * s) - last / s


def _tail_1p1(omega, tau, alpha, big_k):
    """``int_K^inf B(k) / (2 pi k) dk``, exact once the kernel has saturated."""
    c1, c2 = (1 - alpha) * tau, (1 + alpha) * tau
    val = 0.5 * (_j_tail(c1, omega, big_k) - _j_tail(c2, omega, big_k)
                 - _j_tail(c1, -omega, big_k) + _j_tail(c2, -omega, big_k))
    return val / (2 * math.pi)


def _tail_1p1_per_alpha(omega, tau, big_k):
    """``int_K^inf B1(k) / (2 pi k) dk`` with ``B1 = lim B / alpha``."""

    def sin_over(s):
        # int_K^inf sin(tau (k + s)) / (k (k + s)) dk
        si_k, ci_k = special.sici(tau * big_k)
        si_u, _ = special.sici(tau * (big_k + s))
        first = -math.sin(tau * s) * ci_k + math.cos(tau * s) * (0.5 * math.pi - si_k)
        return (first - (0.5 * math.pi - si_u)) / s

    return tau * (sin_over(omega) - sin_over(-omega)) / (2 * math.pi)


def _i1_1p1_integral(kin: DetectorPairKinematics, omega, tau, rel_tol, abs_tol):
    alpha = kin.alpha_a
    big_k = max(_saturation(kin), 2 * omega + 4 / tau)
    period = 2 * math.pi / ((1 + alpha) * tau)
    hints = sorted({kin.a1, kin.a2, omega} - {0.0})
    if alpha == 0:
        def f(k):
            return float(g12_kernel_1p1(k, kin).difference * _bracket_per_alpha(k, omega, tau))
        tail = _tail_1p1_per_alpha(omega, tau, big_k)
    else:
        def f(k):
            return float(g12_kernel_1p1(k, kin).difference * _bracket(k, omega, tau, alpha))
        tail = _tail_1p1(omega, tau, alpha, big_k)
    body = integrate_interval(f, 0.0, big_k, rel_tol, abs_tol, points=hints,
                              max_panel=0.5 * period)
    return body + QuadratureResult(tail, 4e-16 * (abs(tail) + 1e-300), 0)


@dataclass(frozen=True)
class _LogChebyshev:
    """Interpolant of ``D(k) / k`` in ``log k`` on ``[k_lo, k_hi]``."""

    series: chebyshev.Chebyshev
    k_lo: float
    k_hi: float
    error: float
    evaluations: int

    def __call__(self, k):
        k = np.asarray(k, dtype=float)
        u = np.log(np.clip(k, self.k_lo, self.k_hi))
        return k * self.series(u)

    def log_slope_at_end(self) -> float:
        u = math.log(self.k_hi)
        return 1.0 + float(self.series.deriv()(u) / self.series(u))


@lru_cache(maxsize=256)
def _kernel_table_1p3(a1: float, alpha: float, k_lo: float, k_hi: float,
                      tol: float = 1e-11) -> _LogChebyshev:
    kin = DetectorPairKinematics(a1, alpha)
    domain = [math.log(k_lo), math.log(k_hi)]
    evals = 0

    def g(u):
        nonlocal evals
        k = np.exp(u)
        evals += np.size(u)
        return cross_kernel_1p3(k, kin).difference / k

    deg = 48
    while True:
        series = chebyshev.Chebyshev.interpolate(g, deg, domain=domain)
        coef = np.abs(series.coef)
        tail_size = coef[-4:].max()
        if tail_size <= tol * coef.max() or deg >= 768:
            return _LogChebyshev(series, k_lo, k_hi, float(tail_size), evals)
        deg *= 2


def _pow2_ceiling(x: float) -> float:
    return 2.0 ** math.ceil(math.log2(x))


def _tail_fourier(delta, omega, tau, alpha, big_k, abs_tol) -> QuadratureResult:
    """``int_K^inf delta(k) B(k) dk`` for a smooth non-oscillating ``delta``.

    ``B`` splits into ``cos(c (k + s)) / (k + s)^2`` pieces; each becomes a
    QAWF cosine/sine integral.  Zero-frequency pieces are combined before
    integrating because they only converge together.
    """
    c1, c2 = (1 - alpha) * tau, (1 + alpha) * tau
    terms = [(c1, omega, 0.5), (c2, omega, -0.5), (c1, -omega, -0.5), (c2, -omega, 0.5)]
    total = ZERO
    flat = [(s, w) for c, s, w in terms if c == 0.0]
    if flat:
        def f0(k):
            return float(delta(k)) * sum(w / (k + s) ** 2 for s, w in flat)
        total = total + integrate_fourier_tail(f0, big_k, 0.0, "cos", abs_tol)
    for c, s, w in terms:
        if c == 0.0:
            continue

        def f(k, s=s):
            return float(delta(k)) / (k + s) ** 2
        cos_part = integrate_fourier_tail(f, big_k, c, "cos", abs_tol)
        sin_part = integrate_fourier_tail(f, big_k, c, "sin", abs_tol)
        total = total + cos_part.scaled(w * math.cos(c * s)) + sin_part.scaled(-w * math.sin(c * s))
    return total


def _i1_1p3_integral(kin: DetectorPairKinematics, omega, tau, rel_tol, abs_tol):
    alpha = kin.alpha_a
    big_k = _pow2_ceiling(max(50 * kin.a2, 50 * omega, 100 / tau))
    k_lo = 1e-4 * min(kin.a1, omega, 1 / tau)
    table = _kernel_table_1p3(kin.a1, alpha, k_lo, big_k)
    period = 2 * math.pi / ((1 + alpha) * tau)

    def f(k):
        return float(table(k) * _bracket(k, omega, tau, alpha))
    body = integrate_interval(f, 0.0, big_k, rel_tol, abs_tol, points=sorted({kin.a1, kin.a2, omega}),
                              max_panel=0.5 * period)
    # power-law continuation of the kernel; the spread between two slope
    # estimates is folded into the error
    end = float(table(big_k))
    slope = table.log_slope_at_end()
    u_half = math.log(big_k / 2)
    slope_half = 1.0 + float(table.series.deriv()(u_half) / table.series(u_half))
    tail = _tail_fourier(lambda k: end * (k / big_k) ** slope, omega, tau, alpha, big_k, abs_tol)
    tail_alt = _tail_fourier(lambda k: end * (k / big_k) ** slope_half, omega, tau, alpha,
                             big_k, abs_tol)
    spread = abs(tail.value - tail_alt.value)
    interp = table.error * big_k * abs(body.value + tail.value + 1e-300) / max(end, 1e-300)
    return QuadratureResult(body.value + tail.value,
                            body.abs_error_estimate + tail.abs_error_estimate + spread
                            + min(interp, abs(body.value) * 1e-9),
                            body.evaluations + tail.evaluations + table.evaluations)


def i1_result(kin: DetectorPairKinematics, omega2: float, tau_a: float,
              dimension: Dimension = Dimension.D1P1, mu: float = 1.0,
              rel_tol: float = 1e-8, abs_tol: float = 1e-12) -> QuadratureResult:
    """``I1`` with its error estimate; per unit ``alpha`` when ``kin.alpha_a == 0``."""
    if not (omega2 > 0 and tau_a > 0):
        raise DomainError("omega2 and tau_a must be positive")
    dimension = Dimension.parse(dimension)
    alpha = kin.alpha_a
    if dimension is Dimension.D1P1:
        raw = _i1_1p1_integral(kin, omega2, tau_a, rel_tol, abs_tol)
    else:
        if alpha == 0:
            raise DomainError("1+3D I1 is not available at alpha_aH = 0")
        raw = _i1_1p3_integral(kin, omega2, tau_a, rel_tol, abs_tol)
    pref = 2 * mu * mu * math.cos(omega2 * (alpha - 1) * tau_a)
    return QuadratureResult(float(raw.value * pref), float(raw.abs_error_estimate * abs(pref)),
                            raw.evaluations)


def _kinematics(alpha_aH, aH1, aH2) -> DetectorPairKinematics:
    if aH2 is not None:
        if aH1 is not None and not math.isclose(aH1, alpha_aH * aH2, rel_tol=1e-12):
            raise DomainError("aH1, aH2 and alpha_aH are inconsistent")
        return DetectorPairKinematics.from_second(alpha_aH, aH2)
    if aH1 is None:
        raise DomainError("give aH1 (alpha_aH > 0) or aH2")
    if alpha_aH == 0:
        raise DomainError("alpha_aH = 0 must be parameterized by aH2")
    if not aH1 > 0:
        raise DomainError(f"aH1 must be positive, got {aH1}")
    return DetectorPairKinematics(aH1, alpha_aH)


def i1_1p1(alpha_aH: float, omega2: float, tau_a: float, aH1: float | None = None, *,
           aH2: float | None = None, mu: float = 1.0, rel_tol: float = 1e-8,
           abs_tol: float = 1e-12) -> float:
    """1+1D ``I1``.  At ``alpha_aH = 0`` (requires ``aH2``) returns ``lim I1 / alpha_aH``."""
    kin = _kinematics(alpha_aH, aH1, aH2)
    return i1_result(kin, omega2, tau_a, Dimension.D1P1, mu, rel_tol, abs_tol).value


def i1_1p3(alpha_aH: float, omega2: float, tau_a: float, aH1: float | None = None, *,
           aH2: float | None = None, mu: float = 1.0, rel_tol: float = 1e-7,
           abs_tol: float = 1e-12) -> float:
    """1+3D ``I1`` with the transverse momentum integrated in closed form."""
    kin = _kinematics(alpha_aH, aH1, aH2)
    return i1_result(kin, omega2, tau_a, Dimension.D1P3, mu, rel_tol, abs_tol).value


# --- traces -----------------------------------------------------------------

def trace_delta_rho_h(alpha_prime: float, i1: float, parity: EntangledParity) -> float:
    """Heat-stage trace ``Tr(delta_rho h(alpha'))`` for a maximally entangled state."""
    return parity.sign * 2.0 * (1.0 + alpha_prime) * i1


def _same_detector_integral(a: float, omega: float, tau: float, dimension: Dimension,
                            k_min: float, k_max: float | None, rel_tol: float,
                            abs_tol: float) -> QuadratureResult:
    """``int (plus + minus)(k) [S(k + w) + S(k - w)] dk`` with ``S(x) = sin^2(x tau)/x^2``."""
    def s_pair(k):
        return patched_sinc_pair(k, -omega, tau, 1.0) + patched_sinc_pair(k, omega, tau, 1.0)

    period = 2 * math.pi / (2 * tau)
    # the 1/k^2 infrared growth needs log-spaced panels down to k_min
    decades = [float(x) for x in np.geomspace(k_min, a, int(math.log10(a / k_min)) + 2)[1:-1]] \
        if k_min < a else []
    if dimension is Dimension.D1P1:
        def f(k):
            return float(g11_kernel_1p1(k, a).sum * s_pair(k))
        saturation = max(20 * a / math.pi, 2 * omega + 4 / tau)
        body = integrate_interval(f, k_min, saturation, rel_tol, abs_tol,
                                  points=decades + [a, omega], max_panel=0.5 * period)
        # beyond saturation plus + minus = 1 / (2 pi k); the remaining
        # integral decays like 1/k^2 and is left to QUADPACK's infinite range
        def g(k):
            return s_pair(k) / (2 * math.pi * k)
        tail = integrate_fourier_tail(g, saturation, 0.0, "cos", abs_tol)
        return body + tail
    def f3(k):
        return float(same_kernel_1p3(k, a).sum * s_pair(k))
    return integrate_interval(f3, k_min, k_max, rel_tol, abs_tol, points=decades + [a, omega],
                              max_panel=0.5 * period)


@dataclass(frozen=True)
class GeneralTrace:
    """Trace for an arbitrary initial state, split by channel."""

    value: float
    cross_channel: QuadratureResult
    same_channel: QuadratureResult
    ir_cutoff: float | None
    uv_cutoff: float | None
    cutoff_sensitivity: float


def trace_delta_rho_h_general(config: CycleConfig, alpha: float, alpha_prime: float, *,
                              ir_cutoff: float | None = None, uv_cutoff: float | None = None,
                              omega: float | None = None, a1: float | None = None) -> float:
    """Heat-stage trace for any ``(p, b1, b2)``; see :func:`general_trace` for details."""
    return general_trace(config, alpha, alpha_prime, ir_cutoff=ir_cutoff, uv_cutoff=uv_cutoff,
                         omega=omega, a1=a1).value


def general_trace(config: CycleConfig, alpha: float, alpha_prime: float, *,
                  ir_cutoff: float | None = None, uv_cutoff: float | None = None,
                  omega: float | None = None, a1: float | None = None) -> GeneralTrace:
    """Both channels of the heat-stage trace for arbitrary states.

    The cross-detector channel is finite.  The same-detector channel, whose
    weight is ``p + q(|b1|^2 - |b2|^2)`` (and its mirror), diverges in the
    infrared in 1+1D and logarithmically in the ultraviolet in 1+3D; it is
    cut at ``ir_cutoff`` (default ``1e-6 a1``) and ``uv_cutoff`` (default
    ``1e3 max(a1, omega)``).  A warning is issued when halving the cutoff
    moves the trace by more than 10%.  Defaults take ``omega = omega2`` and
    ``a1 = alpha * aH2``.
    """
    st = config.state
    omega = config.omega2 if omega is None else omega
    a1 = alpha * config.aH2 if a1 is None else a1
    tau, mu, dim = config.tau_a, config.mu, config.dimension
    if alpha <= 0 or a1 <= 0:
        raise DomainError("the general trace needs alpha > 0 and a1 > 0")
    kin = DetectorPairKinematics(a1, alpha)
    phase = 2.0 * (st.coherence * np.exp(1j * omega * (alpha - 1) * tau)).real
    if dim is Dimension.D1P1:
        raw = _i1_1p1_integral(kin, omega, tau, config.rel_tol, config.abs_tol)
    else:
        raw = _i1_1p3_integral(kin, omega, tau, config.rel_tol, config.abs_tol)
    cross = raw.scaled(4 * st.q * mu * mu * (1 + alpha_prime) * phase)
    w1 = st.p + st.q * st.imbalance
    w2 = alpha * alpha * alpha_prime * (st.p - st.q * st.imbalance)
    same = ZERO
    sensitivity = 0.0
    ir = uv = None
    if w1 != 0 or w2 != 0:
        ir = 1e-6 * a1 if ir_cutoff is None else ir_cutoff
        uv = (1e3 * max(a1, omega) if uv_cutoff is None else uv_cutoff) \
            if dim is Dimension.D1P3 else None

        def channel(k_lo, k_hi):
            out = ZERO
            if w1:
                out = out + _same_detector_integral(a1, omega, tau, dim, k_lo, k_hi,
                                                    config.rel_tol, config.abs_tol).scaled(w1)
            if w2:
                out = out + _same_detector_integral(a1, alpha * omega, tau, dim, k_lo, k_hi,
                                                    config.rel_tol, config.abs_tol).scaled(w2)
            return out.scaled(-4 * mu * mu)

        same = channel(ir, uv)
        moved = channel(ir / 2, uv * 2 if uv else None)
        total = cross.value + same.value
        sensitivity = abs(moved.value - same.value) / max(abs(total), 1e-300)
        if sensitivity > 0.1:
            warnings.warn(f"same-detector channel depends on its cutoff: halving it changes the "
                          f"trace by {sensitivity:.1%}", RuntimeWarning, stacklevel=2)
    return GeneralTrace(cross.value + same.value, cross, same, ir, uv, sensitivity)


# --- works, heats, efficiency ------------------------------------------------

def _trace_rho0_h(config: CycleConfig, alpha_prime: float) -> float:
    return trace_rho_h(initial_density(config.state), alpha_prime)


def work_stage1(config: CycleConfig) -> float:
    return (config.omega2 - config.omega1) * _trace_rho0_h(config, config.alpha_v)


def work_stage3(config: CycleConfig, trace_H_at_alpha_v: float) -> float:
    return (config.omega1 - config.omega2) * (_trace_rho0_h(config, config.alpha_v)
                                              + trace_H_at_alpha_v)


def work_total(config: CycleConfig, trace_H_at_alpha_v: float) -> float:
    return (config.omega1 - config.omega2) * trace_H_at_alpha_v


def heat_in(config: CycleConfig, trace_H_at_alpha_aH: float) -> float:
    return config.omega2 * trace_H_at_alpha_aH


def heat_out(config: CycleConfig, trace_H_at_alpha_aC: float) -> float:
    """Cold-stage heat; the cyclic condition makes the cold change minus the hot one."""
    return -config.omega1 * trace_H_at_alpha_aC


def heat_total(config: CycleConfig, trace_H_at_alpha_aH: float,
               trace_H_at_alpha_aC: float) -> float:
    return heat_in(config, trace_H_at_alpha_aH) + heat_out(config, trace_H_at_alpha_aC)


def conservation_residual(config: CycleConfig, traces: dict[str, float]) -> float:
    """``W_total + Q_total``; zero when the cycle's energy bookkeeping closes."""
    return (heat_total(config, traces["alpha_aH"], traces["alpha_aC"])
            + work_total(config, traces["alpha_v"]))


def efficiency(traces: dict[str, float], omega1: float, omega2: float,
               error: float = 0.0) -> float:
    """``eta0 * Tr(h_v) / Tr(h_aH)``; the hot trace must exceed ``10 * error``."""
    denom = traces["alpha_aH"]
    if not denom > POSITIVITY_FACTOR * error:
        raise InvalidEngineError(f"hot-stage trace {denom!r} is not positive; no heat absorbed")
    return eta0(omega1, omega2) * traces["alpha_v"] / denom


def efficiency_closed_form(omega1: float, omega2: float, alpha_aH: float) -> float:
    if alpha_aH < 0:
        raise DomainError("alpha_aH must be non-negative")
    return eta0(omega1, omega2) * 2.0 / (1.0 + alpha_aH)


@dataclass(frozen=True)
class CycleReport:
    W1: float
    W3: float
    W_total: float
    Q2: float
    Q4: float
    Q_total: float
    conservation_residual: float
    eta_E: float
    eta_0: float
    I1: float
    I1_error: float
    traces: dict
    trace_errors: dict
    parity: EntangledParity
    per_unit_alpha: bool
    evaluations: int

    @property
    def valid(self) -> bool:
        return math.isfinite(self.eta_E)


def evaluate_cycle(config: CycleConfig, i1: QuadratureResult | None = None) -> CycleReport:
    """Full report for a maximally entangled ``p = 0`` cycle.

    Other states go through :func:`general_trace`; this function insists on
    the symmetric or antisymmetric state because the factorized traces only
    hold there.
    """
    st = config.state
    parity = _parity_of(st)
    if i1 is None:
        i1 = i1_result(config.hot_kinematics, config.omega2, config.tau_a, config.dimension,
                       config.mu, config.rel_tol, config.abs_tol)
    alphas = {"alpha_v": config.alpha_v, "alpha_aH": config.alpha_aH,
              "alpha_aC": config.resolved_alpha_aC}
    traces = {k: trace_delta_rho_h(a, i1.value, parity) for k, a in alphas.items()}
    errors = {k: 2.0 * (1.0 + a) * i1.abs_error_estimate for k, a in alphas.items()}
    W1 = work_stage1(config)
    W3 = work_stage3(config, traces["alpha_v"])
    Wt = work_total(config, traces["alpha_v"])
    Q2 = heat_in(config, traces["alpha_aH"])
    Q4 = heat_out(config, traces["alpha_aC"])
    try:
        eta = efficiency(traces, config.omega1, config.omega2, errors["alpha_aH"])
    except InvalidEngineError:
        eta = math.nan
    return CycleReport(W1, W3, Wt, Q2, Q4, Q2 + Q4, conservation_residual(config, traces), eta,
                       config.eta0, i1.value, i1.abs_error_estimate, traces, errors, parity,
                       config.alpha_aH == 0, i1.evaluations)


def _parity_of(state: InitialState) -> EntangledParity:
    if state.p != 0:
        raise DomainError("factorized traces need p = 0")
    for parity in EntangledParity:
        b1, b2 = parity.amplitudes
        if abs(state.b1 - b1) < 1e-12 and abs(state.b2 - b2) < 1e-12:
            return parity
    raise DomainError("factorized traces need the symmetric or antisymmetric state")
