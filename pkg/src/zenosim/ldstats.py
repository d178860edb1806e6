"""Large-deviation statistics of the survival probability.

For i.i.d. waiting times drawn from a discrete distribution, the
intensive log-survival x = L/m = (1/m) sum_j ln q(mu_j) concentrates as
the number of measurements m grows, with fluctuations governed by a rate
function: P(x) ~ exp(-m I(x)). Two constructions of I are provided.

* ``rate_function_I`` follows the explicit occupation-count recipe: the
  deviation is attributed across atoms through

      f_a = (ln q_d - x) / ((d-1)(ln q_d - ln q_a)),  a < d,
      f_d = 1 - sum f_a,

  and I(x) is the Kullback-Leibler divergence of f from the atom
  probabilities p. For d = 2 the occupation constraints pin f uniquely;
  for d > 2 this particular split is one admissible solution.

* ``cramer_rate`` is the classical tilting construction for i.i.d. sums:
  find the exponential tilt whose mean matches x and Legendre-transform
  the cumulant generating function. It is the true minimum over all
  admissible occupation vectors, hence a lower bound on (and at d = 2
  equal to) the explicit construction. The two serve as mutual oracles.

Alongside the rate functions live the closed-form summary statistics:
most probable and mean survival (geometric vs arithmetic average of q
under the waiting-time law), the joint rate function at fixed total time
with its contraction back to I, the fixed-time count reconstruction, and
the frequent-measurement (Zeno) limits.

Everything is carried in the log domain; exponentiation happens only at
presentation boundaries, since realistic m underflow doubles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    Hamiltonian,
    PureState,
    energy_variance,
    log_survival_factor,
    zeno_time,
)
from .intervals import DiscreteIntervals, IntervalDistribution

__all__ = [
    "OutOfRangeError",
    "RootBracketFailureError",
    "InconsistentConstraintsError",
    "InvalidMeanError",
    "LdProblem",
    "RateCurve",
    "rate_function_I",
    "cramer_rate",
    "rate_curve",
    "rate_function_J",
    "most_probable_log_survival",
    "SurvivalStats",
    "survival_stats",
    "survival_stats_for",
    "joint_rate_function",
    "contracted_rate",
    "FixedTimeSolution",
    "fixed_time_solve_m",
    "EquallySpacedResult",
    "equally_spaced_survival",
    "QzeCondition",
    "qze_condition",
    "DisorderGain",
    "disorder_gain",
]

#: atoms whose ln q differ by less than this are merged before the
#: f-construction (the occupation constraints are rank-deficient there)
LOGQ_MERGE_TOL = 1e-14
#: bisection aims for |tilted mean - x| at or below this
TILT_X_TOL = 1e-13


class OutOfRangeError(ValueError):
    """Requested point is outside the attainable range of the rate function."""


class RootBracketFailureError(RuntimeError):
    """Tilting root finder could not bracket or converge on the target mean."""


class InconsistentConstraintsError(ValueError):
    """No non-negative occupation counts satisfy the given (L, T) pair."""


class InvalidMeanError(ValueError):
    """Fixed-mean construction would need a non-positive second atom."""


@dataclass(frozen=True)
class LdProblem:
    """Discrete waiting-time law together with the per-atom log survivals.

    ``logq[a]`` is ln q(mu^(a)) for atom a of ``dist`` (all finite: atoms
    sitting exactly on a zero of the overlap are not admissible), and
    ``m`` is the number of measurements the extensive quantities refer to.
    """

    dist: DiscreteIntervals
    logq: np.ndarray
    m: int

    def __post_init__(self):
        lq = np.atleast_1d(np.asarray(self.logq, dtype=float))
        if lq.shape != self.dist.values.shape:
            raise ValueError("logq must align with the distribution atoms")
        if not np.all(np.isfinite(lq)) or np.any(lq > 0):
            raise ValueError("each ln q must be finite and non-positive")
        if self.m < 1:
            raise ValueError("m must be a positive count")
        object.__setattr__(self, "logq", lq)

    @classmethod
    def for_system(
        cls,
        h: Hamiltonian,
        psi0: PureState,
        dist: DiscreteIntervals,
        m: int,
    ) -> "LdProblem":
        """Evaluate ln q on the atoms of ``dist`` for the given system."""
        logq = np.array(
            [log_survival_factor(h, psi0, mu) for mu in dist.values], dtype=float
        )
        return cls(dist=dist, logq=logq, m=m)

    def merged(self) -> tuple[np.ndarray, np.ndarray]:
        """Atom probabilities and log survivals after merging equal-q atoms.

        Atoms whose ln q agree within ``LOGQ_MERGE_TOL`` are
        indistinguishable to the log-survival statistics; their
        probabilities are summed. Listed order is preserved, so the last
        merged atom keeps the distinguished role in the f-construction.
        """
        probs, logq = [], []
        for p, lq in zip(self.dist.probs, self.logq):
            for k, existing in enumerate(logq):
                if abs(existing - lq) < LOGQ_MERGE_TOL:
                    probs[k] += p
                    break
            else:
                probs.append(float(p))
                logq.append(float(lq))
        return np.asarray(probs), np.asarray(logq)


@dataclass(frozen=True)
class RateCurve:
    """Rate-function samples I(x) on a grid of intensive log-survivals."""

    xs: np.ndarray
    rates: np.ndarray


def _kl(f: np.ndarray, p: np.ndarray) -> float:
    # 0 * ln 0 = 0 by convention
    mask = f > 0.0
    return float(np.sum(f[mask] * np.log(f[mask] / p[mask])))


def rate_function_I(prob: LdProblem, x: float) -> float:
    """Explicit rate function at intensive log-survival x.

    Builds the occupation fractions f from x (distinguishing the last
    listed atom), then returns KL(f || p). Raises ``OutOfRangeError``
    when x is outside [min ln q, max ln q] or, for d > 2, when this
    particular construction leaves the probability simplex.
    """
    p, logq = prob.merged()
    d = p.size
    lo, hi = float(np.min(logq)), float(np.max(logq))
    slack = 1e-15 * max(hi - lo, 1.0)
    if x < lo - slack or x > hi + slack:
        raise OutOfRangeError(f"x = {x!r} outside attainable [{lo!r}, {hi!r}]")
    x = min(max(x, lo), hi)  # snap boundary round-off back into range
    if d == 1:
        return 0.0

    lq_d = logq[-1]
    f_head = (lq_d - x) / ((d - 1) * (lq_d - logq[:-1]))
    f = np.append(f_head, 1.0 - f_head.sum())
    if np.any(f < -1e-12):
        raise OutOfRangeError(
            f"x = {x!r}: occupation fractions {f} leave the simplex"
        )
    return _kl(np.clip(f, 0.0, None), p)


def _cumulant_stats(p: np.ndarray, logq: np.ndarray, t: float) -> tuple[float, float]:
    """K(t) = ln sum p exp(t ln q) and its derivative, shift-stabilized."""
    s = t * logq
    smax = float(np.max(s))
    wts = p * np.exp(s - smax)
    total = float(np.sum(wts))
    k = smax + math.log(total)
    kprime = float(np.dot(wts, logq)) / total
    return k, kprime


def cramer_rate(prob: LdProblem, x: float) -> float:
    """Tilting (Legendre) rate at x: sup_t [t x - ln sum_a p_a q_a^t].

    The optimal tilt solves the mean-matching condition
    sum_a p_a ln q_a e^(t ln q_a) / sum_a p_a e^(t ln q_a) = x and is
    found by bisection (the tilted mean is increasing in t). The bracket
    is expanded geometrically first; bisection then runs to floating
    point exhaustion and the result is accepted only if the matched mean
    is within ``TILT_X_TOL`` of x.
    """
    p, logq = prob.dist.probs, prob.logq
    lo, hi = float(np.min(logq)), float(np.max(logq))
    if not (lo < x < hi):
        if hi - lo < LOGQ_MERGE_TOL and abs(x - lo) <= LOGQ_MERGE_TOL:
            return 0.0  # effectively degenerate problem at its only point
        raise OutOfRangeError(f"x = {x!r} outside open interval ({lo!r}, {hi!r})")

    def mean_at(t: float) -> float:
        return _cumulant_stats(p, logq, t)[1]

    t_lo, t_hi = -1.0, 1.0
    for _ in range(300):
        if mean_at(t_lo) <= x:
            break
        t_lo *= 2.0
    else:
        raise RootBracketFailureError("could not bracket the tilt from below")
    for _ in range(300):
        if mean_at(t_hi) >= x:
            break
        t_hi *= 2.0
    else:
        raise RootBracketFailureError("could not bracket the tilt from above")

    best_t, best_err = 0.0, math.inf
    for _ in range(200):
        t_mid = 0.5 * (t_lo + t_hi)
        err = mean_at(t_mid) - x
        if abs(err) < best_err:
            best_t, best_err = t_mid, abs(err)
        if err < 0.0:
            t_lo = t_mid
        else:
            t_hi = t_mid
        if t_hi - t_lo <= 1e-15 * max(abs(t_lo), abs(t_hi), 1.0):
            break
    if best_err > TILT_X_TOL:
        raise RootBracketFailureError(
            f"tilted mean missed x by {best_err:g} (> {TILT_X_TOL:g})"
        )
    k, _ = _cumulant_stats(p, logq, best_t)
    return best_t * x - k


def rate_curve(
    prob: LdProblem, points: int = 200, *, method: str = "explicit"
) -> RateCurve:
    """Sample the rate function on a uniform grid over its domain.

    The grid spans [min ln q + eps, max ln q - eps] with eps a 1e-9
    fraction of the range, keeping clear of the boundary where the
    tilting parameter diverges. ``method`` selects "explicit"
    (f-construction) or "tilting".
    """
    _, logq = prob.merged()
    lo, hi = float(np.min(logq)), float(np.max(logq))
    eps = 1e-9 * (hi - lo)
    xs = np.linspace(lo + eps, hi - eps, points)
    fn = rate_function_I if method == "explicit" else cramer_rate
    if method not in ("explicit", "tilting"):
        raise ValueError(f"unknown method {method!r}")
    rates = np.array([fn(prob, float(x)) for x in xs])
    return RateCurve(xs=xs, rates=rates)


def rate_function_J(prob: LdProblem, survival: float) -> float:
    """Decay rate of P(survival = P): the constraint L = m ln P pins the
    intensive variable, so this is I evaluated at ln P."""
    if not (0.0 < survival <= 1.0):
        raise OutOfRangeError("survival probability must be in (0, 1]")
    return rate_function_I(prob, math.log(survival))


def most_probable_log_survival(prob: LdProblem) -> float:
    """L* = m sum_a p_a ln q_a, the location of the rate-function zero."""
    return prob.m * float(np.dot(prob.dist.probs, prob.logq))


@dataclass(frozen=True)
class SurvivalStats:
    """Most probable and mean survival, carried in the log domain.

    ``log_p_star`` is the geometric-mean (log-average) prediction for a
    single typical run; ``log_p_mean`` averages the survival itself over
    realizations. Jensen's inequality puts the mean at or above the most
    probable value, with equality only for degenerate waiting times.
    """

    log_p_star: float
    log_p_mean: float
    m: int

    @property
    def p_star(self) -> float:
        return math.exp(self.log_p_star)

    @property
    def p_mean(self) -> float:
        return math.exp(self.log_p_mean)

    @property
    def log_jensen_gap(self) -> float:
        return self.log_p_mean - self.log_p_star


def survival_stats(prob: LdProblem) -> SurvivalStats:
    """Closed-form survival statistics for a discrete waiting-time law."""
    p, logq, m = prob.dist.probs, prob.logq, prob.m
    log_p_star = m * float(np.dot(p, logq))
    # ln sum p q = ln sum p e^{ln q}, shift-stabilized for tiny q
    k, _ = _cumulant_stats(p, logq, 1.0)
    return SurvivalStats(log_p_star=log_p_star, log_p_mean=m * k, m=m)


def survival_stats_for(
    dist: IntervalDistribution,
    h: Hamiltonian,
    psi0: PureState,
    m: int,
    *,
    tol: float = 1e-9,
) -> SurvivalStats:
    """Survival statistics for any waiting-time distribution.

    Discrete laws reduce to exact sums. Power laws integrate against the
    density with the windowed tail scheme: the integrands oscillate on
    the period set by the spread of the overlap phases, which blind
    adaptive quadrature extrapolates through while reporting an
    optimistic error bound.
    """
    if m < 1:
        raise ValueError("m must be a positive count")
    from .dynamics import delta_of_mu  # deferred: keeps module load light
    from .intervals import PowerLawIntervals

    log_q = lambda mu: log_survival_factor(h, psi0, mu)
    delta = lambda mu: delta_of_mu(h, psi0, mu)
    if isinstance(dist, PowerLawIntervals):
        lam = h.spec.eigenvalues
        spread = float(lam.max() - lam.min())
        period = 2.0 * math.pi / spread if spread > 0 else math.inf
        expect = lambda g: dist.expect_windowed(
            g, oscillation_period=period, tol=tol
        )
    else:
        expect = lambda g: dist.expect(g, tol=tol)

    log_p_star = m * expect(log_q)
    # mean via E[1 - q]: log1p keeps ln<q> accurate when q is close to 1,
    # where direct ln E[q] would lose the Jensen gap to round-off
    mean_delta = expect(delta)
    return SurvivalStats(
        log_p_star=log_p_star, log_p_mean=m * math.log1p(-mean_delta), m=m
    )


def _joint_fractions(prob: LdProblem, x: float, y: float) -> np.ndarray:
    """Occupation fractions of the fixed-time construction at (x, y)."""
    mu = prob.dist.values
    logq = prob.logq
    d = mu.size
    if y <= 0.0:
        raise OutOfRangeError("intensive total time y must be positive")
    if d == 1:
        if abs(x - logq[0]) <= LOGQ_MERGE_TOL and abs(y - mu[0]) <= 1e-12 * mu[0]:
            return np.array([1.0])
        raise OutOfRangeError("single-atom law attains only its own (x, y)")
    lq_d, mu_d = logq[-1], mu[-1]
    denom = (lq_d - x) * (mu_d - mu[:-1]) + y * (d - 1) * (lq_d - logq[:-1])
    if np.any(denom == 0.0):
        raise OutOfRangeError(f"(x, y) = ({x!r}, {y!r}) degenerates the construction")
    g_head = mu_d * (lq_d - x) / denom
    g = np.append(g_head, 1.0 - g_head.sum())
    if np.any(g < -1e-12):
        raise OutOfRangeError(
            f"(x, y) = ({x!r}, {y!r}): fractions {g} leave the simplex"
        )
    return np.clip(g, 0.0, None)


def joint_rate_function(prob: LdProblem, x: float, y: float) -> float:
    """Rate of the pair (log-survival, total time), both per measurement.

    The occupation fractions generalize to

        g_a = mu_d (ln q_d - x) /
              [ (ln q_d - x)(mu_d - mu_a) + y (d-1)(ln q_d - ln q_a) ]

    for a < d and g_d = 1 - sum g_a, and the rate is KL(g || p). Both
    arguments are intensive: x = L/m, y = T/m in seconds.

    At the time value consistent with the deviation, y = sum_a g_a mu_a,
    this reproduces the marginal rate I(x) exactly; sweeping y at fixed x
    re-weights the deviation instead of pricing an independent time
    fluctuation, so recovering I(x) by contraction must restrict y to
    the consistency set (see ``contracted_rate``).
    """
    g = _joint_fractions(prob, x, y)
    return _kl(g, prob.dist.probs)


def contracted_rate(prob: LdProblem, x: float, ys) -> float:
    """Contract the joint rate over the time variable on a grid.

    Implements the minimization over T/m subject to T matching its
    conditional expectation: the admissible y solves
    y = sum_a g_a(x, y) mu_a, located by bracketing the residual's sign
    change on ``ys`` and interpolating linearly inside the cell. Returns
    the joint rate there, which recovers the marginal rate function up
    to grid-interpolation error.
    """
    ys = np.sort(np.asarray(ys, dtype=float))
    if ys.size < 2:
        raise ValueError("need at least two grid points")
    mu = prob.dist.values
    resid = np.full(ys.size, np.nan)
    for i, y in enumerate(ys):
        try:
            g = _joint_fractions(prob, x, float(y))
        except OutOfRangeError:
            continue
        resid[i] = float(np.dot(g, mu)) - float(y)
    valid = np.flatnonzero(np.isfinite(resid))
    if valid.size == 0:
        raise OutOfRangeError(f"x = {x!r}: no admissible time on the grid")
    y_best = None
    for i, j in zip(valid[:-1], valid[1:]):
        if j == i + 1 and resid[i] == 0.0:
            y_best = float(ys[i])
            break
        if j == i + 1 and resid[i] * resid[j] < 0.0:
            frac = resid[i] / (resid[i] - resid[j])
            y_best = float(ys[i] + frac * (ys[j] - ys[i]))
            break
    if y_best is None:
        y_best = float(ys[valid[np.argmin(np.abs(resid[valid]))]])
    return joint_rate_function(prob, x, y_best)


@dataclass(frozen=True)
class FixedTimeSolution:
    """Occupation counts reconstructed from (log-survival, total time).

    ``counts`` solve the linear constraints exactly and may be
    non-integer; ``nearest_counts`` rounds them to the closest admissible
    integers. ``m`` is the real-valued total count.
    """

    m: float
    counts: tuple[float, float]
    nearest_counts: tuple[int, int]

    @property
    def nearest_m(self) -> int:
        return int(self.nearest_counts[0] + self.nearest_counts[1])


def fixed_time_solve_m(
    dist: DiscreteIntervals,
    logq: np.ndarray,
    log_survival: float,
    total_time: float,
) -> FixedTimeSolution:
    """Recover the measurement count from (L, T) for a two-atom law.

    With two atoms the constraints  n1 mu1 + n2 mu2 = T  and
    n1 ln q1 + n2 ln q2 = L  determine (n1, n2) uniquely; their sum is m.
    Raises ``InconsistentConstraintsError`` when the unique solution has
    a negative count (no realization produces that pair).
    """
    if dist.d != 2:
        raise ValueError("count reconstruction requires exactly two atoms")
    lq = np.atleast_1d(np.asarray(logq, dtype=float))
    if lq.shape != (2,):
        raise ValueError("logq must provide ln q for both atoms")
    mu1, mu2 = float(dist.values[0]), float(dist.values[1])
    lq1, lq2 = float(lq[0]), float(lq[1])
    det = mu1 * lq2 - mu2 * lq1
    scale = max(abs(mu1 * lq2), abs(mu2 * lq1), np.finfo(float).tiny)
    if abs(det) <= 1e-12 * scale:
        raise InconsistentConstraintsError(
            "constraint system is singular (atoms indistinguishable)"
        )
    n1 = (total_time * lq2 - log_survival * mu2) / det
    n2 = (log_survival * mu1 - total_time * lq1) / det
    tol = 1e-9 * (abs(n1) + abs(n2) + 1.0)
    if n1 < -tol or n2 < -tol:
        raise InconsistentConstraintsError(
            f"no non-negative counts: solution ({n1!r}, {n2!r})"
        )
    n1, n2 = max(n1, 0.0), max(n2, 0.0)
    return FixedTimeSolution(
        m=n1 + n2,
        counts=(n1, n2),
        nearest_counts=(int(round(n1)), int(round(n2))),
    )


@dataclass(frozen=True)
class EquallySpacedResult:
    """Survival after m equally spaced measurements vs its Zeno estimate.

    ``log_exact`` is (T/mu_bar) ln q(mu_bar) with T = m mu_bar; the
    estimate replaces ln q by its leading small-interval expansion,
    giving exp(-T mu_bar (Delta H)^2).
    """

    m: int
    mu_bar: float
    total_time: float
    log_exact: float
    log_zeno_estimate: float

    @property
    def exact(self) -> float:
        return math.exp(self.log_exact)

    @property
    def zeno_estimate(self) -> float:
        return math.exp(self.log_zeno_estimate)

    @property
    def relative_difference(self) -> float:
        return abs(self.exact - self.zeno_estimate) / self.exact


def equally_spaced_survival(
    h: Hamiltonian, psi0: PureState, mu_bar: float, total_time: float
) -> EquallySpacedResult:
    """Survival for measurements every ``mu_bar`` seconds over ``total_time``.

    When ``total_time`` is not an exact multiple of ``mu_bar`` the count
    rounds down and the result reports the time actually used.
    """
    if mu_bar <= 0:
        raise ValueError("spacing must be positive")
    m = int(math.floor(total_time / mu_bar + 1e-9))
    if m < 1:
        raise ValueError("total time does not cover a single interval")
    t_actual = m * mu_bar
    log_q = log_survival_factor(h, psi0, mu_bar)
    variance = energy_variance(h, psi0)  # 0 for eigenstates: estimate is exactly 1
    return EquallySpacedResult(
        m=m,
        mu_bar=mu_bar,
        total_time=t_actual,
        log_exact=m * log_q,
        log_zeno_estimate=-t_actual * mu_bar * variance,
    )


@dataclass(frozen=True)
class QzeCondition:
    """Leading decay per measurement for frequent random measurements.

    ``delta_mean`` is E[mu^2] / tau_Z^2; freezing requires it to be
    small. When a count m is given, ``log_p_estimate`` = -m delta_mean is
    the shared leading approximation of both the most probable and the
    mean survival.
    """

    delta_mean: float
    tau_z: float
    second_moment: float
    m: int | None = None

    @property
    def log_p_estimate(self) -> float | None:
        if self.m is None:
            return None
        return -self.m * self.delta_mean


def qze_condition(
    dist: IntervalDistribution,
    h: Hamiltonian,
    psi0: PureState,
    m: int | None = None,
) -> QzeCondition:
    """Evaluate the frequent-measurement freezing condition for ``dist``.

    Propagates ``InfiniteSecondMomentError`` for laws whose second moment
    diverges (power law with alpha <= 2), where the condition does not
    apply.
    """
    sm = dist.second_moment()
    tz = zeno_time(h, psi0)
    return QzeCondition(delta_mean=sm / tz**2, tau_z=tz, second_moment=sm, m=m)


@dataclass(frozen=True)
class DisorderGain:
    """Typical survival of a random two-atom schedule against the equally
    spaced schedule with the same mean spacing."""

    log_p_star: float
    log_p_equal: float
    mu2: float

    @property
    def p_star(self) -> float:
        return math.exp(self.log_p_star)

    @property
    def p_equal(self) -> float:
        return math.exp(self.log_p_equal)

    @property
    def ratio(self) -> float:
        return math.exp(self.log_p_star - self.log_p_equal)


def disorder_gain(
    h: Hamiltonian,
    psi0: PureState,
    p1: float,
    mu1: float,
    mu_bar: float,
    m: int,
) -> DisorderGain:
    """Compare a random two-atom schedule to equal spacing at fixed mean.

    The second atom is pinned by the mean: mu2 = (mu_bar - p1 mu1)/(1 - p1).
    Returns the most probable survival of the random schedule, the
    survival of the equally spaced one, and their ratio (> 1 means the
    disorder helps).
    """
    if not (0.0 < p1 < 1.0):
        raise ValueError("p1 must lie strictly between 0 and 1")
    if mu1 <= 0 or mu_bar <= 0:
        raise ValueError("times must be positive")
    if m < 1:
        raise ValueError("m must be a positive count")
    p2 = 1.0 - p1
    mu2 = (mu_bar - p1 * mu1) / p2
    if mu2 <= 0:
        raise InvalidMeanError(
            f"mean {mu_bar!r} unreachable: second atom would be {mu2!r}"
        )
    log_q1 = log_survival_factor(h, psi0, mu1)
    log_q2 = log_survival_factor(h, psi0, mu2)
    log_q_bar = log_survival_factor(h, psi0, mu_bar)
    return DisorderGain(
        log_p_star=m * (p1 * log_q1 + p2 * log_q2),
        log_p_equal=m * log_q_bar,
        mu2=mu2,
    )
