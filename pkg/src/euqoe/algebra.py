"""Two-qubit operator algebra for the entangled Otto engine.

Operators are plain 4x4 complex numpy arrays on the ordered basis
``|e1 e2>, |e1 g2>, |g1 e2>, |g1 g2>``.  Detector 1 runs on its own proper
time; detector 2 is parameterized by detector 1's time through
``tau2 = alpha_a * tau1``, and both switch on at ``tau1 = -tau_a``.  The time
offsets used inside every phase are therefore ``tau + tau_a`` for detector 1
and ``alpha_a * (tau + tau_a)`` for detector 2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

BASIS = ("e1e2", "e1g2", "g1e2", "g1g2")
HERMITIAN_ATOL = 1e-12

TwoQubitOperator = np.ndarray


class EntangledParity(enum.Enum):
    SYMMETRIC = "symmetric"
    ANTISYMMETRIC = "antisymmetric"

    @property
    def sign(self) -> int:
        return 1 if self is EntangledParity.SYMMETRIC else -1

    @property
    def amplitudes(self) -> tuple[complex, complex]:
        r = 1.0 / math.sqrt(2.0)
        return complex(r), complex(self.sign * r)

    @classmethod
    def parse(cls, text: str) -> "EntangledParity":
        key = text.strip().lower()
        aliases = {"s": cls.SYMMETRIC, "sym": cls.SYMMETRIC, "symmetric": cls.SYMMETRIC,
                   "a": cls.ANTISYMMETRIC, "anti": cls.ANTISYMMETRIC,
                   "antisymmetric": cls.ANTISYMMETRIC}
        try:
            return aliases[key]
        except KeyError:
            raise DomainError(f"unknown parity {text!r}") from None


@dataclass(frozen=True)
class InitialState:
    """Mixture ``p |e1e2><e1e2| + (1-p) |chi><chi|`` with ``chi = b1|e1g2> + b2|g1e2>``."""

    p: float
    b1: complex
    b2: complex

    def __post_init__(self):
        if not (math.isfinite(self.p) and 0.0 <= self.p <= 1.0):
            raise DomainError(f"p must lie in [0, 1], got {self.p}")
        b1, b2 = complex(self.b1), complex(self.b2)
        if not (np.isfinite(b1) and np.isfinite(b2)):
            raise DomainError("amplitudes must be finite")
        norm = abs(b1) ** 2 + abs(b2) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise DomainError(f"|b1|^2 + |b2|^2 = {norm!r}, expected 1")
        object.__setattr__(self, "b1", b1)
        object.__setattr__(self, "b2", b2)

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def coherence(self) -> complex:
        """``b1 * conj(b2)``."""
        return self.b1 * self.b2.conjugate()

    @property
    def imbalance(self) -> float:
        """``|b1|^2 - |b2|^2``."""
        return abs(self.b1) ** 2 - abs(self.b2) ** 2

    @classmethod
    def from_parity(cls, parity: EntangledParity, p: float = 0.0) -> "InitialState":
        b1, b2 = parity.amplitudes
        return cls(p, b1, b2)


def _check_finite(**values):
    for name, v in values.items():
        if not np.all(np.isfinite(v)):
            raise DomainError(f"{name} must be finite, got {v!r}")


def h_alpha(alpha: float) -> TwoQubitOperator:
    """Free Hamiltonian in units of the gap, for detector-2 time ratio ``alpha``."""
    _check_finite(alpha=alpha)
    if alpha < 0:
        raise DomainError(f"alpha must be non-negative, got {alpha}")
    a = float(alpha)
    return np.diag([(1 + a) / 2, (1 - a) / 2, (-1 + a) / 2, (-1 - a) / 2]).astype(complex)


def monopole_m1(delta_tau: float, omega: float, mu: float = 1.0) -> TwoQubitOperator:
    """Interaction-picture monopole of detector 1 (acts on the first qubit)."""
    _check_finite(delta_tau=delta_tau, omega=omega, mu=mu)
    ph = mu * np.exp(1j * omega * delta_tau)
    m = np.zeros((4, 4), dtype=complex)
    m[0, 2] = m[1, 3] = ph
    m[2, 0] = m[3, 1] = np.conj(ph)
    return m


def monopole_m2(delta_tau: float, omega: float, mu: float = 1.0) -> TwoQubitOperator:
    """Interaction-picture monopole of detector 2 (acts on the second qubit)."""
    _check_finite(delta_tau=delta_tau, omega=omega, mu=mu)
    ph = mu * np.exp(1j * omega * delta_tau)
    m = np.zeros((4, 4), dtype=complex)
    m[0, 1] = m[2, 3] = ph
    m[1, 0] = m[3, 2] = np.conj(ph)
    return m


def initial_density(state: InitialState) -> TwoQubitOperator:
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = state.p
    b1, b2 = state.b1, state.b2
    rho[1:3, 1:3] = state.q * np.array(
        [[abs(b1) ** 2, b1 * b2.conjugate()], [b1.conjugate() * b2, abs(b2) ** 2]]
    )
    return rho


def is_hermitian(op: TwoQubitOperator, atol: float = HERMITIAN_ATOL) -> bool:
    return bool(np.allclose(op, op.conj().T, rtol=0.0, atol=atol))


def check_density(rho: TwoQubitOperator, atol: float = HERMITIAN_ATOL) -> None:
    """Raise :class:`DomainError` unless ``rho`` is a valid density matrix."""
    if not is_hermitian(rho, atol):
        raise DomainError("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1.0) > atol:
        raise DomainError(f"density matrix trace is {tr!r}")
    if np.linalg.eigvalsh(rho).min() < -atol:
        raise DomainError("density matrix has a negative eigenvalue")


def trace_rho_h(rho: TwoQubitOperator, alpha_prime: float) -> float:
    if not is_hermitian(rho):
        raise DomainError("trace_rho_h needs a Hermitian operator")
    t = np.trace(rho @ h_alpha(alpha_prime))
    if abs(t.imag) > HERMITIAN_ATOL:
        raise DomainError(f"trace has imaginary residue {t.imag!r}")
    return float(t.real)


class Gamma(enum.Enum):
    """Second-order channels: which detectors the two field insertions sit on.

    The digits name the detectors of the first and second monopole; the
    trailing index separates the two time orderings of a cross channel.
    """

    G12_1 = "12_1"
    G12_2 = "12_2"
    G21_1 = "21_1"
    G21_2 = "21_2"
    G11 = "11"
    G22 = "22"

    @property
    def detector2_count(self) -> int:
        """Number of detector-2 time arguments, i.e. powers of ``alpha_a`` in the measure."""
        return {"11": 0, "22": 2}.get(self.value, 1)

    @classmethod
    def parse(cls, which) -> "Gamma":
        if isinstance(which, cls):
            return which
        text = str(which).strip().lower().removeprefix("g").removeprefix("amma")
        for member in cls:
            if member.value == text:
                return member
        raise ValueError(f"unknown channel selector {which!r}; expected one of "
                         f"{[m.value for m in cls]}")


def gamma_trace_closed(which, tau1p, tau1pp, tau_a: float, alpha_a: float,
                       alpha_prime: float, state: InitialState, omega: float,
                       mu: float = 1.0):
    """Closed-form channel traces against ``h(alpha_prime)``.

    Times are detector-1 proper times and may be numpy arrays (broadcast).
    The value already includes the factor ``alpha_a`` per detector-2 time
    integration variable and an overall factor 2, so
    ``value = 2 * alpha_a**n2 * Tr(Gamma @ h)`` with ``n2`` the number of
    detector-2 arguments (see :func:`gamma_trace_matrix`).
    """
    g = Gamma.parse(which)
    tp = np.asarray(tau1p, dtype=float)
    tpp = np.asarray(tau1pp, dtype=float)
    a, ap, w, q = alpha_a, alpha_prime, omega, state.q
    c, cc = state.coherence, state.coherence.conjugate()
    mu2 = mu * mu
    if g is Gamma.G11:
        return 4 * mu2 * np.cos(w * (tp - tpp)) * (state.p + q * state.imbalance) + 0j
    if g is Gamma.G22:
        return (4 * mu2 * ap * a * a * np.cos(w * a * (tp - tpp))
                * (state.p - q * state.imbalance) + 0j)
    # phase of detector 1 at the first time minus detector 2 at the second
    first = (tp + tau_a) - a * (tpp + tau_a)
    swapped = a * (tp + tau_a) - (tpp + tau_a)
    if g is Gamma.G12_1:
        return 2 * q * mu2 * a * (cc * np.exp(1j * w * first) - c * np.exp(-1j * w * first))
    if g is Gamma.G12_2:
        return 2 * q * mu2 * ap * a * (cc * np.exp(-1j * w * swapped) - c * np.exp(1j * w * swapped))
    if g is Gamma.G21_1:
        return 2 * q * mu2 * ap * a * (c * np.exp(1j * w * swapped) - cc * np.exp(-1j * w * swapped))
    return 2 * q * mu2 * a * (c * np.exp(-1j * w * first) - cc * np.exp(1j * w * first))


def gamma_operator(which, tau1p: float, tau1pp: float, tau_a: float, alpha_a: float,
                   state: InitialState, omega: float, mu: float = 1.0) -> TwoQubitOperator:
    """Channel operator built by explicit products of monopoles and the initial state.

    Each channel is the double-commutator piece whose field correlator has
    the corresponding ordering; ``tau1p`` is the primed time and ``tau1pp``
    the double-primed one, both on detector 1's clock.
    """
    g = Gamma.parse(which)
    rho = initial_density(state)
    m1p = monopole_m1(tau1p + tau_a, omega, mu)
    m1pp = monopole_m1(tau1pp + tau_a, omega, mu)
    m2p = monopole_m2(alpha_a * (tau1p + tau_a), omega, mu)
    m2pp = monopole_m2(alpha_a * (tau1pp + tau_a), omega, mu)
    if g is Gamma.G11:
        return m1p @ m1pp @ rho - m1p @ rho @ m1pp - m1pp @ rho @ m1p + rho @ m1pp @ m1p
    if g is Gamma.G22:
        return m2p @ m2pp @ rho - m2p @ rho @ m2pp - m2pp @ rho @ m2p + rho @ m2pp @ m2p
    if g is Gamma.G12_1:
        return m1p @ m2pp @ rho - m2pp @ rho @ m1p
    if g is Gamma.G12_2:
        return rho @ m1pp @ m2p - m2p @ rho @ m1pp
    if g is Gamma.G21_1:
        return m2p @ m1pp @ rho - m1pp @ rho @ m2p
    return rho @ m2pp @ m1p - m1p @ rho @ m2pp


def gamma_trace_matrix(which, tau1p: float, tau1pp: float, tau_a: float, alpha_a: float,
                       alpha_prime: float, state: InitialState, omega: float,
                       mu: float = 1.0) -> complex:
    """``Tr(Gamma @ h(alpha_prime))`` straight from the matrix products."""
    op = gamma_operator(which, tau1p, tau1pp, tau_a, alpha_a, state, omega, mu)
    return complex(np.trace(op @ h_alpha(alpha_prime)))


def closed_form_scale(which, alpha_a: float) -> float:
    """Ratio between :func:`gamma_trace_closed` and :func:`gamma_trace_matrix`."""
    return 2.0 * alpha_a ** Gamma.parse(which).detector2_count
