import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from euqoe.algebra import EntangledParity, InitialState
from euqoe.engine import (CycleConfig, Dimension, conservation_residual, efficiency,
                          efficiency_closed_form, eta0, evaluate_cycle, general_trace, heat_in,
                          heat_out, i1_1p1, i1_1p3, i1_result, trace_delta_rho_h,
                          trace_delta_rho_h_general, work_stage1, work_stage3, work_total,
                          _bracket, _bracket_per_alpha)
from euqoe.errors import DomainError, InvalidEngineError
from euqoe.quadrature import QuadratureResult, gauss_legendre
from euqoe.wightman import DetectorPairKinematics

SYM = InitialState.from_parity(EntangledParity.SYMMETRIC)
ANTI = InitialState.from_parity(EntangledParity.ANTISYMMETRIC)

# I1 at alpha_aH = 1, a1 = 1, omega2 = 2, tau_a = 1.  Independently reproduced by an
# mpmath panel quadrature (-0.5946003119132 with 6400 half-period panels) and by the
# brute-force perturbation series in the oracle module (rel 5e-7).
I1_REFERENCE = -0.594600311913491


def _brute_i1(a1, alpha, omega, tau, k_max=40000.0, panel=math.pi / 2):
    """I1 from the hand-written kernel, Gauss-Legendre panels and no tail."""
    edges = np.arange(0.0, k_max + panel, panel)
    x, w = gauss_legendre(16, 0.0, panel)
    k = (edges[:-1, None] + x[None, :]).ravel()
    w = np.tile(w, len(edges) - 1)
    xj, xl = math.pi * k / a1, math.pi * k * alpha / a1
    # 2 sinh((xj + xl)/2) / sqrt(sinh xj sinh xl) written without overflow
    ratio = (-np.expm1(-(xj + xl))) / np.sqrt(-np.expm1(-2 * xj) * -np.expm1(-2 * xl))
    diff = ratio / (2 * math.pi * k)

    def s(x_):
        return np.sin(x_ * tau) * np.sin(alpha * x_ * tau) / (x_ * x_)

    body = np.sum(w * diff * (s(k + omega) - s(k - omega)))
    return 2 * math.cos(omega * (alpha - 1) * tau) * body


def test_eta0_examples():
    assert eta0(1, 2) == 0.5
    assert eta0(3.0, 3.0 * 1.25) == pytest.approx(0.25 / 1.25, rel=1e-15)
    assert eta0(0.9, 1.0) == pytest.approx(0.1, rel=1e-14)
    for bad in ((2, 1), (1, 1), (0, 1)):
        with pytest.raises(DomainError):
            eta0(*bad)


def test_bracket_vanishes_at_zero_frequency():
    k = np.array([1e-9, 1e-7, 1e-5])
    # both sinc-pair terms cancel to first order: the bracket is O(k)
    assert np.all(np.abs(_bracket(k, 2.0, 1.0, 0.6)) < k)
    assert np.all(np.abs(_bracket_per_alpha(k, 2.0, 1.0)) < k)


@given(st.floats(0.01, 20), st.floats(0.2, 5), st.floats(0.1, 5))
def test_bracket_per_alpha_is_the_small_alpha_limit(k, omega, tau):
    if min(abs(k - omega), k + omega) < 1e-3:
        return
    small = 1e-7
    got = _bracket(k, omega, tau, small) / small
    assert got == pytest.approx(_bracket_per_alpha(k, omega, tau), rel=1e-5, abs=1e-9)


def test_i1_reference_value():
    assert i1_1p1(1.0, 2.0, 1.0, 1.0) == pytest.approx(I1_REFERENCE, rel=1e-10)


def test_i1_is_acceleration_independent_for_equal_ratios():
    # at alpha = 1 the commutator density is 1/(2 pi k) for any acceleration
    for a1 in (0.3, 1.0, 4.0):
        assert i1_1p1(1.0, 2.0, 1.0, a1) == pytest.approx(I1_REFERENCE, rel=1e-8)


@pytest.mark.parametrize("a1, alpha, omega, tau", [(1.0, 0.6, 2.0, 1.0), (0.5, 0.3, 1.0, 3.0),
                                                   (2.0, 0.9, 1.5, 0.5)])
def test_i1_matches_brute_force_panels(a1, alpha, omega, tau):
    want = _brute_i1(a1, alpha, omega, tau)
    assert i1_1p1(alpha, omega, tau, a1) == pytest.approx(want, rel=1e-7)


def test_i1_carries_cosine_prefactor():
    # cos(omega (alpha - 1) tau) = 0 kills I1 regardless of the spectral integral
    alpha, omega = 0.5, 2.0
    tau = math.pi / 2 / (omega * (1 - alpha))
    assert abs(i1_1p1(alpha, omega, tau, 1.0)) < 1e-12


def test_i1_per_unit_alpha_limit():
    # the window k < a1 = alpha aH2 carries weight ~ 1/sqrt(alpha), so I1/alpha
    # approaches its limit like sqrt(alpha)
    aH2 = 1.5
    limit = i1_1p1(0.0, 1.0, 1.0, aH2=aH2)
    devs = []
    for small in (1e-4, 1e-6):
        devs.append(abs(i1_1p1(small, 1.0, 1.0, aH2=aH2) / small / limit - 1))
        assert devs[-1] < 0.3 * math.sqrt(small)
    assert devs[1] / devs[0] == pytest.approx(0.1, rel=0.2)


def test_i1_parameter_checks():
    with pytest.raises(DomainError):
        i1_1p1(0.0, 1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        i1_1p1(0.5, 1.0, 1.0, 1.0, aH2=3.0)
    with pytest.raises(DomainError):
        i1_1p1(0.5, 1.0, -1.0, 1.0)


def test_i1_1p3_equal_acceleration_value():
    # frozen from the closed transverse integral; matches -1/pi
    assert i1_1p3(1.0, 2.0, 1.0, 1.0) == pytest.approx(-0.3183098861837907, rel=1e-5)


@pytest.mark.parametrize("ap, i1, parity, want", [
    (1.0, 0.3, EntangledParity.SYMMETRIC, 1.2),
    (0.0, 0.3, EntangledParity.ANTISYMMETRIC, -0.6),
    (0.5, -0.2, EntangledParity.ANTISYMMETRIC, 0.6),
])
def test_trace_examples(ap, i1, parity, want):
    assert trace_delta_rho_h(ap, i1, parity) == pytest.approx(want, rel=1e-15)


def test_general_trace_reduces_to_factorized_form():
    cfg = CycleConfig(1.0, 2.0, 0.6, 1.0 / 0.6, 1.0)
    i1 = i1_1p1(0.6, 2.0, 1.0, 1.0)
    for ap in (0.0, 0.6, 1.0):
        got = general_trace(cfg, 0.6, ap)
        assert got.same_channel.value == 0.0
        assert got.value == pytest.approx(trace_delta_rho_h(ap, i1, EntangledParity.SYMMETRIC),
                                          rel=1e-12)


def test_general_trace_excited_state_is_same_detector_only():
    cfg = CycleConfig(1.0, 2.0, 0.6, 1.0 / 0.6, 1.0, state=InitialState(1.0, 1.0, 0.0))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        a = general_trace(cfg, 0.6, 0.0)
        b = general_trace(cfg, 0.6, 1.0)
    assert a.cross_channel.value == 0.0
    # coefficients (1, alpha^2 alpha'): the alpha' = 0 trace is the first detector alone
    second = (b.value - a.value) / (0.6 ** 2)
    c = CycleConfig(1.0, 2.0, 0.6, 1.0 / 0.6, 1.0, state=InitialState(1.0, 1.0, 0.0))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        mirror = general_trace(c, 0.6, 0.0, omega=0.6 * 2.0)
    assert second == pytest.approx(mirror.value, rel=1e-8)
    assert a.value < 0  # an excited detector relaxes


def test_general_trace_wrapper_and_domain():
    cfg = CycleConfig(1.0, 2.0, 0.6, 1.0 / 0.6, 1.0)
    assert trace_delta_rho_h_general(cfg, 0.6, 0.5) == general_trace(cfg, 0.6, 0.5).value
    with pytest.raises(DomainError):
        general_trace(cfg, 0.0, 0.5)


def test_works_and_heats():
    cfg = CycleConfig(1.0, 2.0, 0.6, 1.0, 1.0)
    assert work_stage1(cfg) == 0.0
    assert work_stage3(cfg, 0.4) == pytest.approx(-0.4)
    assert work_total(cfg, 0.4) == pytest.approx(-0.4)
    assert heat_in(cfg, 0.32) == pytest.approx(0.64)
    assert heat_out(cfg, 0.2) == pytest.approx(-0.2)
    excited = CycleConfig(1.0, 2.0, 0.6, 1.0, 1.0, state=InitialState(1.0, 1.0, 0.0))
    assert work_stage1(excited) == pytest.approx(1.0)  # (w2 - w1) (1 + 1)/2


@given(st.floats(0.05, 1.0), st.floats(1.05, 4.0), st.floats(-1, 1))
def test_conservation_with_balanced_cooling(omega1, ratio, i1):
    omega2 = omega1 * ratio
    alpha = 1 - omega1 / omega2 + 0.5 * omega1 / omega2
    cfg = CycleConfig(omega1, omega2, alpha, 1.0, 1.0)
    traces = {k: trace_delta_rho_h(a, i1, EntangledParity.SYMMETRIC)
              for k, a in (("alpha_v", 1.0), ("alpha_aH", alpha),
                           ("alpha_aC", cfg.resolved_alpha_aC))}
    assert abs(conservation_residual(cfg, traces)) <= 1e-12 * max(abs(omega2 * traces["alpha_aH"]),
                                                                  1e-300)


def test_mismatched_cooling_breaks_conservation():
    cfg = CycleConfig(1.0, 2.0, 0.8, 1.0, 1.0, alpha_aC=0.3)
    traces = {k: trace_delta_rho_h(a, 0.1, EntangledParity.SYMMETRIC)
              for k, a in (("alpha_v", 1.0), ("alpha_aH", 0.8), ("alpha_aC", 0.3))}
    assert abs(conservation_residual(cfg, traces)) > 1e-3


@pytest.mark.parametrize("w1, w2, alpha, want", [(1, 2, 0.6, 0.625), (1, 2, 1.0, 0.5),
                                                 (0.9, 1.0, 0.0, 0.2)])
def test_efficiency_examples(w1, w2, alpha, want):
    traces = {k: trace_delta_rho_h(a, 0.37, EntangledParity.SYMMETRIC)
              for k, a in (("alpha_v", 1.0), ("alpha_aH", alpha))}
    assert efficiency(traces, w1, w2) == pytest.approx(want, rel=1e-14)
    assert efficiency_closed_form(w1, w2, alpha) == pytest.approx(want, rel=1e-14)


def test_efficiency_needs_heat_absorbed():
    with pytest.raises(InvalidEngineError):
        efficiency({"alpha_v": -0.4, "alpha_aH": -0.3}, 1, 2)
    with pytest.raises(InvalidEngineError):
        efficiency({"alpha_v": 0.4, "alpha_aH": 1e-9}, 1, 2, error=1e-9)


def test_cycle_at_the_inertial_limit():
    cfg = CycleConfig(0.9, 1.0, 0.0, 1.5, 1.0)
    rep = evaluate_cycle(cfg)
    assert rep.per_unit_alpha
    state = SYM if rep.I1 > 0 else ANTI
    rep = evaluate_cycle(CycleConfig(0.9, 1.0, 0.0, 1.5, 1.0, state=state))
    assert rep.eta_E == pytest.approx(0.2, rel=1e-12)


@settings(max_examples=15)
@given(st.floats(0.55, 0.95), st.floats(0.2, 3.0))
def test_exactly_one_parity_runs_the_engine(alpha, tau):
    base = dict(omega1=1.0, omega2=2.0, alpha_aH=alpha, aH2=1.0, tau_a=tau)
    i1 = i1_result(DetectorPairKinematics.from_second(alpha, 1.0), 2.0, tau)
    sym = evaluate_cycle(CycleConfig(**base, state=SYM), i1)
    anti = evaluate_cycle(CycleConfig(**base, state=ANTI), i1)
    for key in sym.traces:
        assert anti.traces[key] == -sym.traces[key]
    if abs(i1.value) > 10 * i1.abs_error_estimate:
        assert sym.valid != anti.valid
        good = sym if sym.valid else anti
        assert good.eta_E == pytest.approx(efficiency_closed_form(1.0, 2.0, alpha), rel=1e-12)


def test_zero_i1_is_invalid():
    rep = evaluate_cycle(CycleConfig(1.0, 2.0, 0.8, 1.0, 1.0), QuadratureResult(0.0, 0.0, 0))
    assert not rep.valid and math.isnan(rep.eta_E)


def test_config_validation():
    with pytest.raises(DomainError):
        CycleConfig(2.0, 1.0, 0.5, 1.0, 1.0)
    with pytest.raises(DomainError):
        CycleConfig(1.0, 2.0, 1.5, 1.0, 1.0)
    with pytest.raises(DomainError):
        CycleConfig(1.0, 2.0, 0.0, 1.0, 1.0, dimension="1p3")
    with pytest.raises(DomainError):
        CycleConfig(1.0, 2.0, 0.5, 1.0, 1.0, dimension="2p1")
    with pytest.raises(DomainError):
        evaluate_cycle(CycleConfig(1.0, 2.0, 0.5, 1.0, 1.0, state=InitialState(0.5, 1.0, 0.0)))
    assert CycleConfig(1.0, 2.0, 0.8, 1.0, 1.0).resolved_alpha_aC == pytest.approx(0.6)
    assert Dimension.parse("1p3") is Dimension.D1P3
