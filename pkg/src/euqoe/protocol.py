"""Building and validating complete engine protocols.

A protocol fixes the heating ratio ``alpha_aH``, derives the cooling ratio
from the heat balance, picks the interaction time ``tau_a`` and then the
entangled state whose heat-stage traces come out positive.  Adiabatic
stages share one speed, so ``alpha_v = 1`` throughout.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .algebra import EntangledParity, InitialState
from .engine import POSITIVITY_FACTOR, CycleConfig, Dimension, evaluate_cycle, eta0, i1_result
from .errors import ConvergenceError, DomainError
from .quadrature import QuadratureResult
from .wightman import DetectorPairKinematics

CONSERVATION_TOL = 1e-12
CHECK_NAMES = ("constraint_chain", "positivity_v", "positivity_aH", "positivity_aC",
               "conservation", "eta_below_one")


def alpha_aC_from(alpha_aH: float, omega1: float, omega2: float) -> float:
    """Cooling ratio that closes the heat balance; may come out non-positive."""
    if not (0 < omega1 < omega2):
        raise DomainError(f"need 0 < omega1 < omega2, got {omega1}, {omega2}")
    return (alpha_aH * omega2 - omega2 + omega1) / omega1


def feasible_alpha_aH(alpha_aH: float, omega1: float, omega2: float) -> bool:
    return eta0(omega1, omega2) < alpha_aH < 1.0


def check_alpha_chain(alpha_aH: float, alpha_aC: float) -> bool:
    return 0.0 < alpha_aC < alpha_aH


def parity_for(i1: float, error: float) -> EntangledParity | None:
    """State that makes the heat-stage traces positive; ``None`` inside the noise."""
    if i1 > POSITIVITY_FACTOR * error:
        return EntangledParity.SYMMETRIC
    if i1 < -POSITIVITY_FACTOR * error:
        return EntangledParity.ANTISYMMETRIC
    return None


@dataclass(frozen=True)
class ScanPoint:
    index: int
    tau_a: float
    i1: float
    error: float
    parity: EntangledParity | None
    status: str  # "ok", "degenerate" or "failed"
    message: str = ""


def default_tau_range(omega2: float) -> tuple[float, float]:
    return 0.1 / omega2, 20.0 / omega2


def _scan_one(args) -> ScanPoint:
    index, tau, kin, omega2, dimension, rel_tol, abs_tol = args
    try:
        res = i1_result(kin, omega2, tau, dimension, rel_tol=rel_tol, abs_tol=abs_tol)
    except ConvergenceError as exc:
        return ScanPoint(index, tau, math.nan, math.inf, None, "failed", str(exc))
    parity = parity_for(res.value, res.abs_error_estimate)
    return ScanPoint(index, tau, res.value, res.abs_error_estimate, parity,
                     "ok" if parity else "degenerate")


def scan_tau_a(omega1: float, omega2: float, alpha_aH: float, aH2: float,
               tau_range: tuple[float, float] | None = None, n_grid: int = 25,
               dimension=Dimension.D1P1, workers: int = 1, rel_tol: float = 1e-8,
               abs_tol: float = 1e-12) -> list[ScanPoint]:
    """``I1`` on a log-spaced ``tau_a`` grid, each point annotated with its parity.

    Quadrature failures are recorded on their point rather than raised.
    """
    eta0(omega1, omega2)
    lo, hi = default_tau_range(omega2) if tau_range is None else tau_range
    if not (0 < lo < hi):
        raise DomainError(f"tau range must be positive and increasing, got {(lo, hi)}")
    if n_grid < 2:
        raise DomainError("n_grid must be at least 2")
    dimension = Dimension.parse(dimension)
    kin = DetectorPairKinematics.from_second(alpha_aH, aH2)
    taus = np.geomspace(lo, hi, n_grid)
    jobs = [(i, float(t), kin, omega2, dimension, rel_tol, abs_tol) for i, t in enumerate(taus)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_scan_one, jobs))
    else:
        points = [_scan_one(j) for j in jobs]
    return sorted(points, key=lambda p: p.index)


@dataclass(frozen=True)
class ProtocolRecord:
    omega1: float
    omega2: float
    alpha_aH: float
    alpha_aC: float
    tau_a: float
    aH2: float
    dimension: Dimension
    parity: EntangledParity | None
    i1: float
    i1_error: float
    eta_E: float
    traces: dict
    conservation_residual: float
    checks: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return all(self.checks.values())

    @property
    def failed_checks(self) -> list[str]:
        return [name for name, ok in self.checks.items() if not ok]

    @property
    def eta0(self) -> float:
        return eta0(self.omega1, self.omega2)


def build_protocol(omega1: float, omega2: float, alpha_aH: float, aH2: float, tau_a: float,
                   dimension=Dimension.D1P1, i1: QuadratureResult | None = None,
                   rel_tol: float = 1e-8, abs_tol: float = 1e-12) -> ProtocolRecord:
    """Evaluate one protocol and every named check.

    Infeasible inputs are not errors: the record comes back with the
    failing checks set to ``False``.  ``i1`` may be supplied to skip the
    spectral integral.
    """
    dimension = Dimension.parse(dimension)
    alpha_aC = alpha_aC_from(alpha_aH, omega1, omega2)
    checks = dict.fromkeys(CHECK_NAMES, False)
    checks["constraint_chain"] = (feasible_alpha_aH(alpha_aH, omega1, omega2)
                                  and check_alpha_chain(alpha_aH, alpha_aC))
    nan = math.nan
    blank = ProtocolRecord(omega1, omega2, alpha_aH, alpha_aC, tau_a, aH2, dimension, None,
                           nan, nan, nan, {"alpha_v": nan, "alpha_aH": nan, "alpha_aC": nan},
                           nan, checks)
    if not 0 <= alpha_aH <= 1:
        return blank
    if dimension is Dimension.D1P3 and alpha_aH == 0:
        return blank
    if i1 is None:
        kin = DetectorPairKinematics.from_second(alpha_aH, aH2)
        i1 = i1_result(kin, omega2, tau_a, dimension, rel_tol=rel_tol, abs_tol=abs_tol)
    parity = parity_for(i1.value, i1.abs_error_estimate)
    state = InitialState.from_parity(parity or EntangledParity.SYMMETRIC)
    config = CycleConfig(omega1, omega2, alpha_aH, aH2, tau_a, state=state, dimension=dimension,
                         alpha_v=1.0, alpha_aC=alpha_aC, rel_tol=rel_tol, abs_tol=abs_tol)
    report = evaluate_cycle(config, i1)
    tr, err = report.traces, report.trace_errors
    for key, name in (("alpha_v", "positivity_v"), ("alpha_aH", "positivity_aH"),
                      ("alpha_aC", "positivity_aC")):
        checks[name] = bool(parity is not None and tr[key] > POSITIVITY_FACTOR * err[key])
    checks["conservation"] = bool(abs(report.conservation_residual)
                                  <= CONSERVATION_TOL * abs(report.Q2))
    checks["eta_below_one"] = bool(report.eta_E < 1.0)  # nan compares False
    return ProtocolRecord(omega1, omega2, alpha_aH, alpha_aC, tau_a, aH2, dimension, parity,
                          report.I1, report.I1_error, report.eta_E, dict(tr),
                          report.conservation_residual, checks)
