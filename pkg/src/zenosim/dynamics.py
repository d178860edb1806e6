"""Unitary dynamics interrupted by projective measurements.

A pure state evolves under a fixed Hamiltonian for a random interval, a
projective measurement asks "is the system still in the initial state?",
and the cycle repeats. For a rank-1 projector the probability that all m
measurements succeed factorizes,

    P({mu_j}) = prod_j q(mu_j),    q(mu) = |<psi0| exp(-i H mu) |psi0>|^2,

so sequences are evaluated as products of scalar overlaps. The full
matrix-chain evaluation (projector-propagator products and a trace) is
kept as an independent cross-check path.

All times are in seconds and all energies in rad/s (hbar = 1); ordinary
frequencies are converted with omega = 2*pi*f at the construction
boundary, never internally.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .linalg import SpectralDecomposition, as_complex_matrix, hermitian_eig

__all__ = [
    "DimensionMismatchError",
    "EmptySpectrumError",
    "NotNormalizedError",
    "ZeroVarianceError",
    "UnderflowWarning",
    "PureState",
    "Hamiltonian",
    "Projector",
    "SequenceResult",
    "build_chain_hamiltonian",
    "entangled_initial_state",
    "survival_factor",
    "log_survival_factor",
    "delta_of_mu",
    "evolve_sequence",
    "survival_trace",
    "energy_variance",
    "zeno_time",
    "phase_weights",
]

#: round-off this far below zero is clamped to zero; anything worse raises
NEGATIVE_CLAMP = -1e-15
#: linear-domain survival below this triggers UnderflowWarning
UNDERFLOW_FLOOR = 1e-300


class DimensionMismatchError(ValueError):
    """State and operator act on Hilbert spaces of different dimension."""


class EmptySpectrumError(ValueError):
    """A Hamiltonian needs at least one level."""


class NotNormalizedError(ValueError):
    """State vector norm is not 1 within tolerance."""


class ZeroVarianceError(ValueError):
    """Energy variance vanishes: the state is an eigenstate and never decays."""


class UnderflowWarning(RuntimeWarning):
    """Linear-domain survival underflowed; use the log-domain value."""


@dataclass(frozen=True)
class PureState:
    """Normalized state vector in an n-dimensional Hilbert space."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size < 1 or not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be a nonempty finite vector")
        norm_sq = float(np.vdot(amps, amps).real)
        if abs(norm_sq - 1.0) > 1e-12:
            raise NotNormalizedError(f"|psi|^2 = {norm_sq!r} is not 1 within 1e-12")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return int(self.amplitudes.shape[0])

    def density_matrix(self) -> np.ndarray:
        """Rank-1 density matrix |psi><psi|."""
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def overlap(self, other: "PureState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class Hamiltonian:
    """Hermitian generator of the unitary evolution, in rad/s.

    The spectral decomposition is computed once at construction and
    cached; propagators and overlap amplitudes are synthesized from it.
    """

    matrix: np.ndarray
    spec: SpectralDecomposition = field(repr=False)

    @classmethod
    def from_matrix(cls, matrix, tol: float = 1e-12) -> "Hamiltonian":
        m = as_complex_matrix(matrix)
        return cls(matrix=m, spec=hermitian_eig(m, tol))

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])


@dataclass(frozen=True)
class Projector:
    """Hermitian idempotent measurement operator."""

    matrix: np.ndarray

    def __post_init__(self):
        m = as_complex_matrix(self.matrix)
        scale = max(float(np.linalg.norm(m)), np.finfo(float).tiny)
        if np.linalg.norm(m - m.conj().T) > 1e-12 * scale:
            raise ValueError("projector must be Hermitian")
        if np.linalg.norm(m @ m - m) > 1e-10 * scale:
            raise ValueError("projector must be idempotent (P^2 = P)")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def onto(cls, state: PureState) -> "Projector":
        """Rank-1 projector |psi><psi|."""
        return cls(state.density_matrix())


@dataclass(frozen=True)
class SequenceResult:
    """Outcome of one measurement sequence.

    ``survival`` is the linear-domain product of the per-interval factors
    (it may underflow for very long sequences; ``log_survival`` is then
    the quantity to use). ``total_time`` sums the intervals in their
    given order. ``final_state`` is the post-measurement state, which for
    a rank-1 projector is the initial state up to a global phase.
    """

    survival: float
    log_survival: float
    total_time: float
    final_state: PureState
    factors: np.ndarray


def build_chain_hamiltonian(omegas, coupling: float) -> Hamiltonian:
    """Nearest-neighbor chain: level energies on the diagonal, one
    uniform coupling on the first off-diagonals.

    ``omegas`` are the level frequencies in rad/s; ``coupling`` is the
    inter-level coupling in rad/s. Hermitian by construction.
    """
    om = np.atleast_1d(np.asarray(omegas, dtype=float))
    if om.size == 0:
        raise EmptySpectrumError("need at least one level energy")
    n = om.size
    h = np.diag(om.astype(complex))
    idx = np.arange(n - 1)
    h[idx, idx + 1] = coupling
    h[idx + 1, idx] = coupling
    return Hamiltonian.from_matrix(h)


def entangled_initial_state(
    a1: complex | None = None, a2: complex | None = None
) -> PureState:
    """Superposition of the outer levels of a 3-level chain.

    With no arguments, the balanced combination (1, 0, 1)/sqrt(2), which
    is entangled with respect to the first-site/rest bipartition when the
    levels are read as one-excitation product states. General amplitudes
    (a1, a2) build a1|100> + a2|001> and must satisfy |a1|^2+|a2|^2 = 1.
    """
    if a1 is None and a2 is None:
        r = math.sqrt(0.5)  # correctly rounded 1/sqrt(2)
        return PureState(np.array([r, 0.0, r], dtype=complex))
    if a1 is None or a2 is None:
        raise ValueError("provide both amplitudes or neither")
    return PureState(np.array([a1, 0.0, a2], dtype=complex))  # norm checked there


def phase_weights(h: Hamiltonian, psi0: PureState) -> tuple[np.ndarray, np.ndarray]:
    """Eigenphase decomposition of the survival amplitude.

    Returns ``(lam, w)`` with w_k = |<v_k|psi0>|^2, so that
    <psi0|exp(-iHmu)|psi0> = sum_k w_k exp(-i lam_k mu). The weights are
    non-negative and sum to 1.
    """
    if h.dim != psi0.dim:
        raise DimensionMismatchError(
            f"state dim {psi0.dim} != Hamiltonian dim {h.dim}"
        )
    c = h.spec.eigenvectors.conj().T @ psi0.amplitudes
    return h.spec.eigenvalues, np.abs(c) ** 2


def _clamp_unit_interval(value: float, context: str) -> float:
    if value < 0.0:
        if value < NEGATIVE_CLAMP:
            raise FloatingPointError(f"{context} = {value!r} below clamp threshold")
        return 0.0
    return min(value, 1.0)


def survival_factor(h: Hamiltonian, psi0: PureState, mu: float) -> float:
    """Single-interval survival probability q(mu) = |<psi0|U(mu)|psi0>|^2."""
    if mu < 0:
        raise ValueError("interval must be non-negative")
    lam, w = phase_weights(h, psi0)
    amp = np.sum(w * np.exp(-1j * lam * mu))
    return _clamp_unit_interval(float(abs(amp) ** 2), "q(mu)")


def delta_of_mu(h: Hamiltonian, psi0: PureState, mu: float) -> float:
    """Decay probability delta(mu) = 1 - q(mu), accurate for small mu.

    For mu -> 0 this behaves as (mu/tau_Z)^2 with tau_Z the Zeno time.
    Computed without forming 1 - q, so tiny deltas keep full relative
    precision: with a = <psi0|U|psi0>,

        1 - Re a = sum_k w_k * 2 sin^2(lam_k mu / 2)
        delta    = (1 - Re a)(1 + Re a) - (Im a)^2.
    """
    if mu < 0:
        raise ValueError("interval must be non-negative")
    lam, w = phase_weights(h, psi0)
    one_minus_re = float(np.sum(w * 2.0 * np.sin(0.5 * lam * mu) ** 2))
    im = float(np.sum(w * np.sin(-lam * mu)))
    delta = one_minus_re * (2.0 - one_minus_re) - im * im
    return _clamp_unit_interval(delta, "delta(mu)")


def log_survival_factor(h: Hamiltonian, psi0: PureState, mu: float) -> float:
    """ln q(mu), evaluated as log1p(-delta) when q is close to 1.

    Returns -inf if the overlap vanishes identically at this mu.
    """
    delta = delta_of_mu(h, psi0, mu)
    if delta < 0.5:
        return math.log1p(-delta)
    q = survival_factor(h, psi0, mu)
    return math.log(q) if q > 0.0 else -math.inf


def log_survival_factors(
    lam: np.ndarray, w: np.ndarray, mus: np.ndarray
) -> np.ndarray:
    """Vectorized ln q over an array of intervals, given phase weights.

    Bulk path used by the Monte Carlo driver; elementwise identical to
    ``log_survival_factor`` on each entry.
    """
    mus = np.asarray(mus, dtype=float)
    sin_half = np.sin(0.5 * np.multiply.outer(mus, lam))
    one_minus_re = (2.0 * sin_half * sin_half) @ w
    im = np.sin(-np.multiply.outer(mus, lam)) @ w
    delta = one_minus_re * (2.0 - one_minus_re) - im * im
    np.clip(delta, 0.0, 1.0, out=delta)
    small = delta < 0.5
    out = np.empty_like(delta)
    out[small] = np.log1p(-delta[small])
    with np.errstate(divide="ignore"):
        out[~small] = np.log(1.0 - delta[~small])
    return out


def evolve_sequence(h: Hamiltonian, psi0: PureState, intervals) -> SequenceResult:
    """Run one full measurement sequence and collect survival data.

    The survival probability is accumulated both as a linear-domain
    product of the per-interval factors and as a sum of their logs; the
    two agree except when the product underflows, in which case an
    ``UnderflowWarning`` is emitted and ``log_survival`` remains exact.
    """
    mus = np.atleast_1d(np.asarray(intervals, dtype=float))
    if mus.size == 0:
        raise ValueError("interval sequence must be nonempty")
    if np.any(mus < 0):
        raise ValueError("intervals must be non-negative")
    lam, w = phase_weights(h, psi0)

    amps = np.exp(-1j * np.multiply.outer(mus, lam)) @ w
    factors = np.abs(amps) ** 2
    np.clip(factors, 0.0, 1.0, out=factors)

    survival = 1.0
    phase = complex(1.0)
    for a in amps:
        mod = abs(a)
        if mod > 0.0:
            phase *= a / mod
    for q in factors:
        survival *= q
    log_survival = float(np.sum(log_survival_factors(lam, w, mus)))
    if survival < UNDERFLOW_FLOOR:
        warnings.warn(
            "linear-domain survival underflowed; use log_survival",
            UnderflowWarning,
            stacklevel=2,
        )

    final = PureState(psi0.amplitudes * (phase / abs(phase)))
    total_time = float(sum(mus.tolist()))  # left-to-right, input order
    return SequenceResult(
        survival=float(survival),
        log_survival=log_survival,
        total_time=total_time,
        final_state=final,
        factors=factors,
    )


def survival_trace(h: Hamiltonian, psi0: PureState, intervals) -> float:
    """Survival probability by the explicit matrix chain.

    Builds (P U_m) ... (P U_1), applies it to the initial density matrix
    and takes the trace. Independent of the scalar-overlap fast path in
    ``evolve_sequence``; the two must agree to round-off and are compared
    in tests as a correctness witness.
    """
    mus = np.atleast_1d(np.asarray(intervals, dtype=float))
    if mus.size == 0:
        raise ValueError("interval sequence must be nonempty")
    if np.any(mus < 0):
        raise ValueError("intervals must be non-negative")
    if h.dim != psi0.dim:
        raise DimensionMismatchError(
            f"state dim {psi0.dim} != Hamiltonian dim {h.dim}"
        )
    from .linalg import propagator  # local import avoids cycle at module load

    p = Projector.onto(psi0).matrix
    chain = np.eye(h.dim, dtype=complex)
    for mu in mus:
        chain = (p @ propagator(h.spec, float(mu))) @ chain
    rho = chain @ psi0.density_matrix() @ chain.conj().T
    return _clamp_unit_interval(float(np.trace(rho).real), "trace survival")


def energy_variance(h: Hamiltonian, psi0: PureState) -> float:
    """<H^2> - <H>^2 in the given state, clamped at zero.

    Zero (to round-off) means psi0 is an eigenstate and the dynamics is
    frozen.
    """
    if h.dim != psi0.dim:
        raise DimensionMismatchError(
            f"state dim {psi0.dim} != Hamiltonian dim {h.dim}"
        )
    hpsi = h.matrix @ psi0.amplitudes
    h2 = float(np.vdot(hpsi, hpsi).real)
    h1 = float(np.vdot(psi0.amplitudes, hpsi).real)
    variance = h2 - h1 * h1
    if h2 <= 0.0 or variance <= 1e-14 * h2:
        return 0.0
    return variance


def zeno_time(h: Hamiltonian, psi0: PureState) -> float:
    """Zeno time tau_Z = (  <H^2> - <H>^2  )^(-1/2) in the given state.

    The energy variance sets the small-interval decay scale via
    delta(mu) ~ (mu/tau_Z)^2. Raises ``ZeroVarianceError`` when psi0 is
    an eigenstate (frozen dynamics, infinite Zeno time).
    """
    variance = energy_variance(h, psi0)
    if variance == 0.0:
        raise ZeroVarianceError("state is an eigenstate; energy variance vanishes")
    return variance ** -0.5
