"""Brute-force reference for the heat-stage trace.

Nothing here uses the analytic time integrals.  For each spectral point
``k`` the double time integral over the interaction square is done
numerically, on tensor Gauss-Legendre grids, from either the closed-form
channel traces (fast path) or explicit 4x4 matrix products (slow path);
the ``k`` integral is then a composite Gauss-Legendre sum with its own
panel layout.  Only the spectral kernels are shared with the engine.

Two identities tie the paths together and are what the tests check:

* trace path == ``engine`` trace (the analytic reduction is right);
* trace path == ``-int int Tr(h [H', [H'', rho]])`` over the full square,
  with the same-detector correlators replaced by their symmetric
  (Hadamard) part (the channel bookkeeping is right).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .algebra import (Gamma, InitialState, TwoQubitOperator, gamma_trace_closed, h_alpha,
                      initial_density, is_hermitian, monopole_m1, monopole_m2)
from .engine import (CycleConfig, Dimension, _parity_of, general_trace, i1_result,
                     trace_delta_rho_h)
from .errors import ConvergenceError, DomainError
from .quadrature import gauss_legendre, integrate_square, patched_sinc_pair
from .wightman import (DetectorPairKinematics, KernelRecord, _pair_kernel_1p1, cross_kernel_1p3,
                       g_kernel_1p3, same_kernel_1p3)

_CROSS = (Gamma.G12_1, Gamma.G12_2, Gamma.G21_1, Gamma.G21_2)
_LOCAL = (Gamma.G11, Gamma.G22)


@dataclass(frozen=True)
class OracleConfig:
    """Reference-evaluation settings for one cycle.

    ``k_max`` defaults to ``max(8 max(a1, a2), 10 omega2 + 100 / tau_a)``:
    past it the 1+1D kernels have saturated and the integrand falls off like
    ``1/k^3``.  The 1+3D kernel keeps growing, so its default is doubled.  ``panel_order`` is the Gauss-Legendre order of each ``k``
    panel; the estimate is compared with order ``2/3`` of it for the error.
    ``transverse`` selects the 1+3D kernel: ``"closed"`` uses the
    hypergeometric form, ``"bessel"`` integrates the Bessel product over
    the transverse momentum numerically.
    """

    cycle: CycleConfig
    k_max: float | None = None
    panel_order: int = 24
    time_tol: float = 1e-10
    time_margin: int = 24
    ir_cutoff: float | None = None
    transverse: str = "closed"

    def __post_init__(self):
        if self.k_max is not None and not self.k_max > 0:
            raise DomainError("k_max must be positive")
        if not (self.time_tol > 0 and self.panel_order >= 6 and self.time_margin >= 4):
            raise DomainError("oracle tolerances and orders must be positive")
        if self.transverse not in ("closed", "bessel"):
            raise DomainError(f"unknown transverse mode {self.transverse!r}")
        if self.cycle.alpha_aH == 0:
            raise DomainError("the oracle integrates the raw series, which needs alpha_aH > 0")

    @property
    def kinematics(self) -> DetectorPairKinematics:
        return self.cycle.hot_kinematics

    @property
    def resolved_k_max(self) -> float:
        if self.k_max is not None:
            return self.k_max
        kin, c = self.kinematics, self.cycle
        k_max = max(8 * max(kin.a1, kin.a2), 10 * c.omega2 + 100 / c.tau_a)
        return 2 * k_max if c.dimension is Dimension.D1P3 else k_max


@dataclass(frozen=True)
class TraceReport:
    alpha_prime: float
    value: float
    abs_error_estimate: float
    analytic: float
    evaluations: int
    k_max: float

    @property
    def relative_deviation(self) -> float:
        return abs(self.value - self.analytic) / max(abs(self.analytic), 1e-300)


# --- spectral weights per channel -------------------------------------------

def _kernel(cfg: OracleConfig, k, a_j: float, a_l: float) -> KernelRecord:
    if cfg.cycle.dimension is Dimension.D1P1:
        return _pair_kernel_1p1(k, a_j, a_l)
    if a_j == a_l:
        return same_kernel_1p3(k, a_j)
    kin = DetectorPairKinematics(min(a_j, a_l), min(a_j, a_l) / max(a_j, a_l))
    if cfg.transverse == "closed":
        return cross_kernel_1p3(k, kin)
    return _bessel_transverse(float(k), kin)


def _bessel_transverse(omega_k: float, kin: DetectorPairKinematics) -> KernelRecord:
    # the Bessel product decays like exp(-kp (1/a1 + 1/a2)); 45 e-folds is plenty
    top = 45.0 / (1 / kin.a1 + 1 / kin.a2)
    total = None
    for lo, hi in zip(np.linspace(0, top, 13)[:-1], np.linspace(0, top, 13)[1:]):
        x, w = gauss_legendre(40, lo, hi)
        rec = g_kernel_1p3(omega_k, x, kin)
        part = np.array([w @ rec.plus, w @ rec.minus, w @ rec.difference, w @ rec.weight])
        total = part if total is None else total + part
    plus, minus, diff, weight = (np.asarray(v) for v in total)
    return KernelRecord(np.asarray(omega_k), weight, plus, minus, diff)


def _channel_geometry(g: Gamma, alpha: float):
    """``(c1, c2)`` with the correlator's time separation ``c1 tau' + c2 tau''``."""
    return {
        Gamma.G12_1: (1.0, -alpha),
        Gamma.G12_2: (-alpha, 1.0),
        Gamma.G21_1: (alpha, -1.0),
        Gamma.G21_2: (-1.0, alpha),
        Gamma.G11: (1.0, -1.0),
        Gamma.G22: (alpha, -alpha),
    }[g]


def _channel_accels(g: Gamma, kin: DetectorPairKinematics):
    if g is Gamma.G11:
        return kin.a1, kin.a1
    if g is Gamma.G22:
        return kin.a2, kin.a2
    if g in (Gamma.G12_1, Gamma.G12_2):
        return kin.a1, kin.a2
    return kin.a2, kin.a1


def _active_channels(state: InitialState):
    out = list(_CROSS) if state.q != 0 and state.coherence != 0 else []
    if state.p + state.q * state.imbalance != 0:
        out.append(Gamma.G11)
    if state.p - state.q * state.imbalance != 0:
        out.append(Gamma.G22)
    return out


# --- the per-k double time integral -------------------------------------------

class _TimeGrid:
    """Channel traces tabulated on a tensor grid, reused across ``k``."""

    def __init__(self, cfg: OracleConfig, n: int, alpha_primes):
        c = cfg.cycle
        self.n = n
        self.x, self.w = gauss_legendre(n, -c.tau_a, c.tau_a)
        self.ww = np.outer(self.w, self.w)
        tp, tpp = self.x[:, None], self.x[None, :]
        alpha = cfg.kinematics.alpha_a
        self.tables = {}
        for g in _active_channels(c.state):
            self.tables[g] = np.stack([
                self.ww * gamma_trace_closed(g, tp, tpp, c.tau_a, alpha, ap, c.state, c.omega2, c.mu)
                for ap in alpha_primes])


def _time_order(cfg: OracleConfig, k: float) -> int:
    c = cfg.cycle
    span = (k + c.omega2) * c.tau_a * max(1.0, cfg.kinematics.alpha_a)
    # round up to a multiple of 8 so nearby k share a grid
    return int(8 * math.ceil((span + cfg.time_margin) / 8))


def _per_k(cfg: OracleConfig, k: float, grid: _TimeGrid, kin: DetectorPairKinematics):
    """``-1/2 sum_channels int int E(t', t'') G_channel(k; t', t'')`` for each alpha'."""
    x = grid.x
    out = 0.0
    for g, table in grid.tables.items():
        c1, c2 = _channel_geometry(g, kin.alpha_a)
        rec = _kernel(cfg, k, *_channel_accels(g, kin))
        # exp(-ik(c1 t' + c2 t'')) tabulated as an outer product of 1D phases
        e1 = np.exp(-1j * k * c1 * x)
        e2 = np.exp(-1j * k * c2 * x)
        fwd = np.einsum("aij,i,j->a", table, e1, e2)
        bwd = np.einsum("aij,i,j->a", table, e1.conj(), e2.conj())
        if g in _LOCAL:
            # Hadamard part only: the commutator piece is already absorbed
            sym = 0.5 * (rec.plus + rec.minus)
            val = sym * (fwd + bwd)
        else:
            val = rec.plus * fwd + rec.minus * bwd
        out = out - 0.5 * val
    return np.asarray(out)


def _k_panels(cfg: OracleConfig, k_lo: float, k_hi: float):
    c, kin = cfg.cycle, cfg.kinematics
    half_period = math.pi / ((1 + kin.alpha_a) * c.tau_a)
    marks = sorted({k_lo, k_hi, *(m for m in (kin.a1, kin.a2, c.omega2) if k_lo < m < k_hi)})
    edges = [marks[0]]
    for lo, hi in zip(marks[:-1], marks[1:]):
        n = max(1, math.ceil((hi - lo) / half_period))
        edges.extend(np.linspace(lo, hi, n + 1)[1:].tolist())
    return edges


def _integrate_k(cfg: OracleConfig, alpha_primes, k_lo: float, k_hi: float):
    kin = cfg.kinematics
    grids: dict[int, _TimeGrid] = {}
    n_hi = cfg.panel_order
    n_lo = max(4, (2 * n_hi) // 3)
    xh, wh = leggauss(n_hi)
    xl, wl = leggauss(n_lo)
    total = np.zeros(len(alpha_primes), dtype=complex)
    err = np.zeros(len(alpha_primes))
    evals = 0

    def f(k):
        n = _time_order(cfg, k)
        if n not in grids:
            grids[n] = _TimeGrid(cfg, n, alpha_primes)
        return _per_k(cfg, k, grids[n], kin)

    edges = _k_panels(cfg, k_lo, k_hi)
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        vals = [f(mid + half * x) for x in xh]
        hi_sum = sum(w * v for w, v in zip(wh, vals)) * half
        lo_sum = sum(w * f(mid + half * x) for x, w in zip(xl, wl)) * half
        evals += n_hi + n_lo
        total += hi_sum
        err += np.abs(hi_sum - lo_sum)
    # truncation: an envelope C / k^3 through the last panel integrates to C / (2 K^2)
    peak = np.max(np.abs(np.array(vals)), axis=0)
    err += peak * k_hi / 2
    if np.any(np.abs(total.imag) > 1e-8 * np.maximum(np.abs(total.real), 1e-12)):
        raise ConvergenceError("oracle trace has a non-negligible imaginary part",
                               partial=total, diagnostics={"alpha_primes": alpha_primes})
    return total.real, err, evals


def delta_rho_traces_numeric(cfg: OracleConfig, alpha_primes) -> list[TraceReport]:
    """Reference traces at several ``alpha'`` from one pass over ``k``.

    The comparison value comes from the engine: the factorized trace for
    the maximally entangled ``p = 0`` states, the general two-channel
    trace otherwise.
    """
    alpha_primes = [float(a) for a in alpha_primes]
    c = cfg.cycle
    kin = cfg.kinematics
    k_max = cfg.resolved_k_max
    local = any(g in _LOCAL for g in _active_channels(c.state))
    k_lo = (1e-6 * kin.a1 if cfg.ir_cutoff is None else cfg.ir_cutoff) if local else 0.0
    values, errors, evals = _integrate_k(cfg, alpha_primes, k_lo, k_max)
    try:
        parity = _parity_of(c.state)
    except DomainError:
        analytic = [general_trace(c, kin.alpha_a, ap, ir_cutoff=k_lo if local else None,
                                  uv_cutoff=k_max).value for ap in alpha_primes]
    else:
        i1 = i1_result(kin, c.omega2, c.tau_a, c.dimension, c.mu, c.rel_tol, c.abs_tol).value
        analytic = [trace_delta_rho_h(ap, i1, parity) for ap in alpha_primes]
    return [TraceReport(ap, float(v), float(e), float(a), evals, k_max)
            for ap, v, e, a in zip(alpha_primes, values, errors, analytic)]


def delta_rho_trace_numeric(cfg: OracleConfig, alpha_prime: float) -> TraceReport:
    """Reference ``Tr(delta_rho h(alpha'))`` by spectral-outermost brute force."""
    return delta_rho_traces_numeric(cfg, [alpha_prime])[0]


# --- checks of single steps -----------------------------------------------------

def inner_time_integral_check(k: float, cfg: OracleConfig,
                              alpha_prime: float) -> tuple[float, float]:
    """Cross-channel time integral at one ``k``: adaptive numeric vs analytic bracket.

    Both sides are the ``k``-integrand of the trace for a maximally
    entangled ``p = 0`` state with the spectral kernel stripped off:
    ``-1/2 sum int int E (plus e^{-ik d} + minus e^{ik d})`` against
    ``4 q mu^2 (1 + alpha') Re(2 b1 b2* e^{i omega (alpha-1) tau}) D(k) B(k)``.
    """
    c = cfg.cycle
    kin = cfg.kinematics
    alpha, tau, omega, st = kin.alpha_a, c.tau_a, c.omega2, c.state
    rec = _pair_kernel_1p1(k, kin.a1, kin.a2)

    def integrand(tp, tpp):
        out = 0.0
        for g in _CROSS:
            c1, c2 = _channel_geometry(g, alpha)
            e = gamma_trace_closed(g, tp, tpp, tau, alpha, alpha_prime, st, omega, c.mu)
            ph = np.exp(-1j * k * (c1 * tp + c2 * tpp))
            out = out - 0.5 * e * (rec.plus * ph + rec.minus * ph.conj())
        return out

    numeric = integrate_square(integrand, -tau, tau, rel_tol=cfg.time_tol, abs_tol=1e-15,
                               n_start=_time_order(cfg, k))
    bracket = (patched_sinc_pair(k, -omega, tau, alpha) - patched_sinc_pair(k, omega, tau, alpha))
    phase = 2.0 * (st.coherence * np.exp(1j * omega * (alpha - 1) * tau)).real
    analytic = 4 * st.q * c.mu ** 2 * (1 + alpha_prime) * phase * rec.difference * bracket
    return float(numeric.value.real), float(analytic)


def gamma_matrix_products(tau1p: float, tau1pp: float, tau_a: float, alpha: float,
                          state: InitialState, omega: float,
                          mu: float = 1.0) -> list[TwoQubitOperator]:
    """The twelve operator products of the second-order series, in the conventional order.

    Left products ``M M rho`` first (detector pairs 11, 12, 21, 22), then
    right products ``rho M M``, then sandwiches ``M rho M``.
    """
    rho = initial_density(state)
    m1p = monopole_m1(tau1p + tau_a, omega, mu)
    m1pp = monopole_m1(tau1pp + tau_a, omega, mu)
    m2p = monopole_m2(alpha * (tau1p + tau_a), omega, mu)
    m2pp = monopole_m2(alpha * (tau1pp + tau_a), omega, mu)
    return [m1p @ m1pp @ rho, m1p @ m2pp @ rho, m2p @ m1pp @ rho, m2p @ m2pp @ rho,
            rho @ m1pp @ m1p, rho @ m1pp @ m2p, rho @ m2pp @ m1p, rho @ m2pp @ m2p,
            m1p @ rho @ m1pp, m1p @ rho @ m2pp, m2p @ rho @ m1pp, m2p @ rho @ m2pp]


@dataclass(frozen=True)
class MatrixReport:
    delta_rho: TwoQubitOperator
    hermitian: bool
    hermiticity_defect: float
    traces: dict = field(default_factory=dict)


def delta_rho_matrix_at_k(k: float, cfg: OracleConfig, hadamard_local: bool = True,
                          n: int | None = None, alpha_primes=(0.0, 0.5, 1.0)) -> MatrixReport:
    """Full-matrix ``-int int Tr_field [H', [H'', rho (x) |0><0|]]`` at one spectral point.

    Both times range over the whole square (not time-ordered) and each
    detector's Hamiltonian carries its own clock, so the detector-2 term is
    weighted by ``alpha`` per time argument.  With ``hadamard_local`` the
    same-detector correlators are symmetrized; the trace against
    ``h(alpha')`` then equals the closed-form trace path at the same ``k``.
    """
    c = cfg.cycle
    kin = cfg.kinematics
    alpha, tau = kin.alpha_a, c.tau_a
    n = _time_order(cfg, k) if n is None else n
    x, w = gauss_legendre(n, -tau, tau)
    rho = initial_density(c.state)
    clocks = ((1, 1.0, kin.a1, monopole_m1), (2, alpha, kin.a2, monopole_m2))
    out = np.zeros((4, 4), dtype=complex)
    for i in range(n):
        for j in range(n):
            tp, tpp = x[i], x[j]
            for dj, sj, aj, mj in clocks:
                mp = mj(sj * (tp + tau), c.omega2, c.mu)
                for dl, sl, al, ml in clocks:
                    mpp = ml(sl * (tpp + tau), c.omega2, c.mu)
                    rec = _kernel(cfg, k, aj, al)
                    d = sj * tp - sl * tpp
                    fwd = rec.plus * np.exp(-1j * k * d) + rec.minus * np.exp(1j * k * d)
                    bwd = rec.plus * np.exp(1j * k * d) + rec.minus * np.exp(-1j * k * d)
                    if hadamard_local and dj == dl:
                        fwd = bwd = 0.5 * (fwd + bwd)
                    term = (mp @ mpp @ rho * fwd - mp @ rho @ mpp * bwd
                            - mpp @ rho @ mp * fwd + rho @ mpp @ mp * bwd)
                    out -= w[i] * w[j] * sj * sl * term
    defect = float(np.max(np.abs(out - out.conj().T)))
    scale = max(1.0, float(np.max(np.abs(out))))
    traces = {ap: float(np.trace(out @ h_alpha(ap)).real) for ap in alpha_primes}
    return MatrixReport(out, is_hermitian(out, 1e-10 * scale), defect, traces)


def trace_path_at_k(k: float, cfg: OracleConfig, alpha_primes=(0.0, 0.5, 1.0),
                    n: int | None = None) -> dict:
    """The closed-form trace path at one ``k``, for comparison with :func:`delta_rho_matrix_at_k`."""
    n = _time_order(cfg, k) if n is None else n
    grid = _TimeGrid(cfg, n, list(alpha_primes))
    vals = _per_k(cfg, k, grid, cfg.kinematics)
    return {ap: float(v.real) for ap, v in zip(alpha_primes, vals)}
