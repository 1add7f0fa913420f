"""Adaptive quadrature for the spectral integrals and the finite time squares.

One-dimensional panels are handed to ``scipy.integrate.quad`` (QUADPACK
adaptive Gauss-Kronrod); what lives here is the panel layout (splits at
removable singularities, panel length capped at half an oscillation
period), the semi-infinite truncation policy and the bookkeeping of error
estimates and evaluation counts.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate

from .errors import ConvergenceError


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int

    def __post_init__(self):
        if not self.abs_error_estimate >= 0:
            raise ValueError("error estimate must be non-negative")

    def __add__(self, other: "QuadratureResult") -> "QuadratureResult":
        return QuadratureResult(self.value + other.value,
                                self.abs_error_estimate + other.abs_error_estimate,
                                self.evaluations + other.evaluations)

    def scaled(self, factor: float) -> "QuadratureResult":
        return QuadratureResult(self.value * factor, self.abs_error_estimate * abs(factor),
                                self.evaluations)


ZERO = QuadratureResult(0.0, 0.0, 0)


@dataclass(frozen=True)
class IntegrandSpec:
    """A scalar integrand on ``[lower, inf)`` plus the hints the integrator needs.

    ``singular_points`` holds ``(abscissa, limit)`` pairs for removable
    singularities; ``decay_scale`` sets the first truncation point;
    ``oscillation_period`` caps the panel length; ``tail`` (optional) maps a
    truncation point ``K`` to a :class:`QuadratureResult` for ``[K, inf)``
    and ``cutoff`` fixes ``K`` when a tail is supplied.
    """

    evaluator: Callable[[float], float]
    singular_points: Sequence[tuple[float, float]] = ()
    decay_scale: float = 1.0
    oscillation_period: float | None = None
    tail: Callable[[float], QuadratureResult] | None = None
    cutoff: float | None = None
    lower: float = 0.0

    def __post_init__(self):
        pts = tuple(sorted((float(x), float(v)) for x, v in self.singular_points))
        for x, v in pts:
            if not (math.isfinite(x) and math.isfinite(v)):
                raise ValueError("singular points and their limits must be finite")
        object.__setattr__(self, "singular_points", pts)
        if not self.decay_scale > 0:
            raise ValueError("decay_scale must be positive")


class _Counted:
    """Wrap a scalar function, count calls and substitute limits at singular points."""

    def __init__(self, f, singular_points=()):
        self.f = f
        self.points = singular_points
        self.calls = 0

    def __call__(self, x):
        self.calls += 1
        for xs, limit in self.points:
            if abs(x - xs) <= 1e-15 * max(1.0, abs(xs)):
                return limit
        return self.f(x)


def _panel_edges(a: float, b: float, points: Sequence[float], max_len: float | None):
    cuts = sorted({a, b, *(p for p in points if a < p < b)})
    edges = [cuts[0]]
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        n = 1 if not max_len else max(1, int(math.ceil((hi - lo) / max_len)))
        edges.extend(np.linspace(lo, hi, n + 1)[1:].tolist())
    return edges


def _quad_panel(f, lo, hi, rel_tol, abs_tol):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err, _info, *message = integrate.quad(f, lo, hi, epsabs=abs_tol, epsrel=rel_tol,
                                                   limit=200, full_output=1)
    # QUADPACK appends a message only when it flags a problem
    return val, err, bool(message)


def integrate_interval(f: Callable[[float], float], a: float, b: float, rel_tol: float = 1e-8,
                       abs_tol: float = 1e-12, points: Sequence[float] = (),
                       max_panel: float | None = None,
                       singular_points: Sequence[tuple[float, float]] = ()) -> QuadratureResult:
    """Integrate ``f`` over ``[a, b]`` panel by panel.

    Panels end at every entry of ``points`` and at singular abscissae, and
    are no longer than ``max_panel``.  The per-panel absolute tolerance is
    the global one divided by the panel count.
    """
    if not (rel_tol > 0 and abs_tol > 0):
        raise ValueError("tolerances must be positive")
    if b <= a:
        return ZERO
    fc = _Counted(f, singular_points)
    edges = _panel_edges(a, b, list(points) + [x for x, _ in singular_points], max_panel)
    n_panels = len(edges) - 1
    total = 0.0
    err_total = 0.0
    failed = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err, ier = _quad_panel(fc, lo, hi, rel_tol, abs_tol / n_panels)
        total += val
        err_total += err
        if ier and err > max(abs_tol / n_panels, rel_tol * abs(val)):
            failed.append((lo, hi, err))
    if failed and err_total > max(abs_tol, rel_tol * abs(total)):
        raise ConvergenceError(f"{len(failed)} panel(s) did not converge on [{a}, {b}]",
                               partial=QuadratureResult(total, err_total, fc.calls),
                               diagnostics={"panels": failed})
    return QuadratureResult(total, err_total, fc.calls)


def integrate_semi_infinite(spec: IntegrandSpec, rel_tol: float = 1e-8,
                            abs_tol: float = 1e-12, max_doublings: int = 40) -> QuadratureResult:
    """Integrate ``spec.evaluator`` over ``[spec.lower, inf)``.

    With a ``tail`` the range is cut at ``spec.cutoff`` (default
    ``50 * decay_scale``) and the tail value added.  Without one, the range
    grows by doubling until two successive chunks both fall below a tenth
    of the tolerance.
    """
    if not (rel_tol > 0 and abs_tol > 0):
        raise ValueError("tolerances must be positive")
    half = None if spec.oscillation_period is None else 0.5 * spec.oscillation_period
    pts = [x for x, _ in spec.singular_points]
    sing = spec.singular_points
    lo = spec.lower
    if spec.tail is not None:
        k_max = spec.cutoff if spec.cutoff is not None else lo + 50.0 * spec.decay_scale
        body = integrate_interval(spec.evaluator, lo, k_max, rel_tol, abs_tol, pts, half, sing)
        return body + spec.tail(k_max)
    k_hi = lo + max(spec.decay_scale, max(pts, default=0.0) - lo)
    result = integrate_interval(spec.evaluator, lo, k_hi, rel_tol, abs_tol, pts, half, sing)
    quiet = 0
    for _ in range(max_doublings):
        k_next = lo + 2.0 * (k_hi - lo)
        chunk = integrate_interval(spec.evaluator, k_hi, k_next, rel_tol, abs_tol / 10,
                                   pts, half, sing)
        result = result + chunk
        k_hi = k_next
        target = 0.1 * max(abs_tol, rel_tol * abs(result.value))
        quiet = quiet + 1 if abs(chunk.value) + chunk.abs_error_estimate < target else 0
        if quiet >= 2:
            return QuadratureResult(result.value, result.abs_error_estimate + abs(chunk.value),
                                    result.evaluations)
    raise ConvergenceError("semi-infinite integral did not settle", partial=result,
                           diagnostics={"k_max": k_hi})


def integrate_fourier_tail(f: Callable[[float], float], lower: float, frequency: float,
                           kind: str, abs_tol: float = 1e-13) -> QuadratureResult:
    """``int_lower^inf f(k) cos(frequency k) dk`` (or ``sin``) for smooth decaying ``f``.

    Uses QUADPACK's QAWF Fourier-integral routine; a zero frequency falls
    back to plain semi-infinite quadrature.
    """
    fc = _Counted(f)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        if frequency == 0:
            if kind == "sin":
                return ZERO
            val, err = integrate.quad(fc, lower, np.inf, epsabs=abs_tol, limit=400)
        else:
            val, err = integrate.quad(fc, lower, np.inf, weight=kind, wvar=abs(frequency),
                                      epsabs=abs_tol, limlst=100)
            if kind == "sin" and frequency < 0:
                val = -val
    return QuadratureResult(val, err, fc.calls)


def gauss_legendre(n: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1), half * w


def integrate_square(f2: Callable[[np.ndarray, np.ndarray], np.ndarray], a: float, b: float,
                     rel_tol: float = 1e-10, abs_tol: float = 1e-14, n_start: int = 16,
                     n_max: int = 2048, c: float | None = None,
                     d: float | None = None) -> QuadratureResult:
    """Tensor Gauss-Legendre over ``[a, b] x [c, d]`` (default the square ``[a, b]^2``).

    ``f2`` is called on broadcastable coordinate arrays ``(x[:, None], y[None, :])``
    and may return complex values.  The order grows by 1.5 until two
    successive estimates agree; their difference is the error estimate.
    """
    c = a if c is None else c
    d = b if d is None else d
    evals = 0

    def estimate(n):
        nonlocal evals
        x, wx = gauss_legendre(n, a, b)
        y, wy = gauss_legendre(n, c, d)
        vals = f2(x[:, None], y[None, :])
        evals += n * n
        return wx @ vals @ wy

    n = n_start
    prev = estimate(n)
    while True:
        n = int(math.ceil(1.5 * n))
        cur = estimate(n)
        diff = abs(cur - prev)
        if diff <= max(abs_tol, rel_tol * abs(cur)):
            return QuadratureResult(cur, float(diff), evals)
        if n > n_max:
            raise ConvergenceError("tensor Gauss-Legendre did not converge",
                                   partial=QuadratureResult(cur, float(diff), evals),
                                   diagnostics={"order": n})
        prev = cur


def patched_sinc_pair(k, omega: float, tau_a: float, alpha: float):
    """``sin(x tau) sin(alpha x tau) / x^2`` at ``x = k - omega``, finite at ``x = 0``.

    Within ``1e-6 * max(1, omega)`` of the singular point the two-term series
    ``alpha tau^2 (1 - (1 + alpha^2)(x tau)^2 / 6)`` replaces the quotient.
    """
    x = np.asarray(k, dtype=float) - omega
    eps = 1e-6 * max(1.0, abs(omega))
    near = np.abs(x) < eps
    xs = np.where(near, 1.0, x)
    direct = np.sin(xs * tau_a) * np.sin(alpha * xs * tau_a) / (xs * xs)
    series = alpha * tau_a * tau_a * (1.0 - (1.0 + alpha * alpha) * (x * tau_a) ** 2 / 6.0)
    out = np.where(near, series, direct)
    return out[()] if out.ndim == 0 else out
