"""Monte Carlo estimators with explicit confidence intervals and verdicts.

Every estimate is an EstimateCI whose interval is mean +/- 3 std_err (99.7%
normal coverage).  Statements "lhs >= rhs" are graded three ways: PASS when
the interval sits on the good side, FAIL when it sits strictly on the bad
side, INCONCLUSIVE when it straddles the bound.  A randomized test of a true
inequality must never FAIL; INCONCLUSIVE signals insufficient resolution,
not a counterexample.

Boundary mass is measured by the lower Minkowski content with Euclidean
distance and one-sided enlargement,

    content(A) = lim_{eps -> 0+} (mu{dist(., A) <= eps} - mu(A)) / eps,

approximated on a decreasing epsilon ladder with a weighted-least-squares
intercept standing in for the limit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .geometry import grad_norm

__all__ = [
    "PASS",
    "FAIL",
    "INCONCLUSIVE",
    "EstimateCI",
    "mean_ci",
    "bernoulli_ci",
    "verdict_geq",
    "verdict_leq",
    "estimate_measure",
    "ContentEstimate",
    "content_from_batch",
    "estimate_content",
    "TailPoint",
    "estimate_tail",
    "PhiPoint",
    "MedianEstimate",
    "estimate_median_and_phi",
    "integrate_grad",
    "write_estimates_csv",
    "RARE_COUNT",
]

PASS = "PASS"
FAIL = "FAIL"
INCONCLUSIVE = "INCONCLUSIVE"

# tail probabilities backed by fewer empirical hits are flagged RARE
RARE_COUNT = 10

_CI_WIDTH = 3.0  # half-width in standard errors


@dataclass(frozen=True)
class EstimateCI:
    """Point estimate with a 3-sigma interval."""

    mean: float
    std_err: float
    n_samples: int
    confidence: float = 0.997

    @property
    def lo(self) -> float:
        return self.mean - _CI_WIDTH * self.std_err

    @property
    def hi(self) -> float:
        return self.mean + _CI_WIDTH * self.std_err


def mean_ci(values) -> EstimateCI:
    """Sample mean of an array with its standard error."""
    values = np.asarray(values, dtype=float)
    n = values.size
    if n == 0:
        raise ValueError("cannot average an empty sample")
    se = float(values.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return EstimateCI(float(values.mean()), se, n)


def bernoulli_ci(k: int, n: int) -> EstimateCI:
    """Binomial proportion with a never-zero standard error.

    At k = 0 or k = n the plug-in variance vanishes, which would make rare
    events look infinitely certain; the variance is then taken at the
    shrunk proportion (k + 1/2)/(n + 1) instead, while the mean stays k/n.
    """
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    mean = k / n
    q = (k + 0.5) / (n + 1) if k in (0, n) else mean
    se = float(np.sqrt(q * (1.0 - q) / n))
    return EstimateCI(mean, se, n)


def _lo_hi(x) -> tuple[float, float]:
    if isinstance(x, EstimateCI):
        return x.lo, x.hi
    x = float(x)
    return x, x


def verdict_geq(lhs: EstimateCI, rhs, mode: str = "strict") -> str:
    """Grade the statement lhs >= rhs from interval positions.

    strict: PASS needs the whole lhs interval above the rhs interval;
    consistent: anything short of a confident violation is PASS (used for
    inequalities whose two sides are estimated at an equality point, where
    strict grading could never PASS).
    """
    lhs_lo, lhs_hi = _lo_hi(lhs)
    rhs_lo, rhs_hi = _lo_hi(rhs)
    tol = 1e-12 * (1.0 + abs(lhs_lo) + abs(lhs_hi) + abs(rhs_lo) + abs(rhs_hi))
    if mode == "consistent":
        return FAIL if lhs_hi < rhs_lo - tol else PASS
    if mode != "strict":
        raise ValueError(f"unknown verdict mode {mode!r}")
    if lhs_lo >= rhs_hi - tol:
        return PASS
    if lhs_hi < rhs_lo - tol:
        return FAIL
    return INCONCLUSIVE


def verdict_leq(lhs: EstimateCI, rhs, mode: str = "strict") -> str:
    """Grade lhs <= rhs; mirror image of verdict_geq."""
    lhs_lo, lhs_hi = _lo_hi(lhs)
    rhs_lo, rhs_hi = _lo_hi(rhs)
    tol = 1e-12 * (1.0 + abs(lhs_lo) + abs(lhs_hi) + abs(rhs_lo) + abs(rhs_hi))
    if mode == "consistent":
        return FAIL if lhs_lo > rhs_hi + tol else PASS
    if mode != "strict":
        raise ValueError(f"unknown verdict mode {mode!r}")
    if lhs_hi <= rhs_lo + tol:
        return PASS
    if lhs_lo > rhs_hi + tol:
        return FAIL
    return INCONCLUSIVE


# ---------------------------------------------------------------------------
# set measures and boundary content
# ---------------------------------------------------------------------------

def estimate_measure(batch, set_) -> EstimateCI:
    """Empirical measure of a test set under the batch's law."""
    xi = getattr(set_, "xi", None)
    if xi is not None and np.asarray(xi).size != batch.dim:
        raise ValueError(
            f"set dimension {np.asarray(xi).size} does not match batch "
            f"dimension {batch.dim}")
    ind = np.asarray(set_.indicator(batch.points), dtype=bool)
    return bernoulli_ci(int(ind.sum()), batch.count)


@dataclass(frozen=True)
class ContentEstimate:
    """Ladder of one-sided enlargement quotients and their extrapolation.

    per_epsilon pairs each ladder value with the quotient
    (mu{dist <= eps} - mu(A))/eps; extrapolated is the weighted-least-squares
    intercept at eps = 0 (the smallest-eps quotient when the ladder has a
    single rung).  inconclusive marks an all-zero enlargement count.
    """

    per_epsilon: tuple = field(repr=False)
    extrapolated: EstimateCI = None
    analytic: Optional[float] = None
    inconclusive: bool = False

    def consistent_with_analytic(self) -> bool:
        if self.analytic is None:
            raise ValueError("no analytic boundary value attached")
        slack = _CI_WIDTH * self.extrapolated.std_err + 0.02 * abs(self.analytic)
        return abs(self.extrapolated.mean - self.analytic) <= slack


def _wls_intercept(xs: np.ndarray, ys: np.ndarray, ses: np.ndarray) -> tuple[float, float]:
    # generalized least squares for y = b0 + b1 x, weights 1/se^2
    w = 1.0 / np.square(ses)
    design = np.column_stack([np.ones_like(xs), xs])
    xtw = design.T * w
    cov = np.linalg.inv(xtw @ design)
    beta = cov @ (xtw @ ys)
    return float(beta[0]), float(np.sqrt(cov[0, 0]))


def content_from_batch(batch, set_, eps_ladder: Sequence[float],
                       analytic: Optional[float] = None) -> ContentEstimate:
    """Enlargement quotients of one batch for every ladder epsilon."""
    eps = np.asarray(list(eps_ladder), dtype=float)
    if eps.size == 0 or np.any(eps <= 0.0) or np.any(np.diff(eps) >= 0.0):
        raise ValueError("eps ladder must be positive and strictly decreasing")
    base = np.asarray(set_.indicator(batch.points), dtype=bool)
    n = batch.count
    rungs = []
    counts = []
    for e in eps:
        grown = np.asarray(set_.enlarged(float(e)).indicator(batch.points),
                           dtype=bool)
        k = int((grown & ~base).sum())
        counts.append(k)
        ci = bernoulli_ci(k, n)
        rungs.append((float(e), EstimateCI(ci.mean / e, ci.std_err / e, n)))
    if len(rungs) >= 2:
        xs = eps
        ys = np.array([r[1].mean for r in rungs])
        ses = np.array([r[1].std_err for r in rungs])
        b0, se0 = _wls_intercept(xs, ys, ses)
        extrapolated = EstimateCI(b0, se0, n)
    else:
        extrapolated = rungs[-1][1]
    return ContentEstimate(tuple(rungs), extrapolated, analytic,
                           inconclusive=not any(counts))


def estimate_content(sampler, set_, eps_ladder: Sequence[float],
                     count: int, seed: int,
                     analytic: Optional[float] = None) -> ContentEstimate:
    """Boundary content of a set under the sampler's law.

    When the sampler carries its ball parameters and the set knows its exact
    boundary mass, that value is attached for downstream consistency checks.
    """
    batch = sampler(count, seed)
    if analytic is None:
        params = getattr(sampler, "params", None)
        oracle = getattr(set_, "analytic_boundary", None)
        if params is not None and oracle is not None:
            analytic = oracle(params)
    return content_from_batch(batch, set_, eps_ladder, analytic)


# ---------------------------------------------------------------------------
# tails, medians, concentration curves
# ---------------------------------------------------------------------------

class TailPoint(NamedTuple):
    t: float
    estimate: EstimateCI
    rare: bool


def estimate_tail(sampler, functional, thresholds: Sequence[float],
                  count: int, seed: int) -> list[TailPoint]:
    """P{functional >= t} for each threshold; sparse counts flagged rare."""
    thresholds = [float(t) for t in thresholds]
    if not all(np.isfinite(thresholds)):
        raise ValueError("thresholds must be finite")
    batch = sampler(count, seed)
    vals = np.asarray(functional(batch.points), dtype=float)
    out = []
    for t in thresholds:
        k = int((vals >= t).sum())
        out.append(TailPoint(t, bernoulli_ci(k, count), k < RARE_COUNT))
    return out


class PhiPoint(NamedTuple):
    h: float
    estimate: EstimateCI
    rare: bool


@dataclass(frozen=True)
class MedianEstimate:
    """Empirical median with an order-statistic confidence interval."""

    value: float
    ci_lo: float
    ci_hi: float
    n_samples: int


def estimate_median_and_phi(sampler, functional, h_grid: Sequence[float],
                            count: int, seed: int
                            ) -> tuple[MedianEstimate, list[PhiPoint]]:
    """Empirical median of a 1-Lipschitz functional and its upper-tail curve
    phi(h) = P{F > median + h}.

    Lipschitz continuity is the caller's promise; it is spot-checked on ~100
    random sample pairs and a violation raises ValueError.
    """
    batch = sampler(count, seed)
    pts = batch.points
    vals = np.asarray(functional(pts), dtype=float)
    if vals.shape != (count,):
        raise ValueError("functional must map the batch to one real per row")
    _lipschitz_spot_check(functional, pts, vals, seed)
    order = np.sort(vals)
    med = 0.5 * (order[(count - 1) // 2] + order[count // 2])
    half = 0.5 * count
    delta = _CI_WIDTH * 0.5 * np.sqrt(count)
    k_lo = max(0, int(np.floor(half - delta)))
    k_hi = min(count - 1, int(np.ceil(half + delta)))
    median = MedianEstimate(float(med), float(order[k_lo]), float(order[k_hi]),
                            count)
    curve = []
    for h in h_grid:
        k = int((vals > med + float(h)).sum())
        curve.append(PhiPoint(float(h), bernoulli_ci(k, count), k < RARE_COUNT))
    return median, curve


def _lipschitz_spot_check(functional, pts: np.ndarray, vals: np.ndarray,
                          seed: int, pairs: int = 100):
    lip = float(getattr(functional, "lipschitz_constant", 1.0))
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed,
                                                       spawn_key=(10 ** 6,)))
    n = pts.shape[0]
    i = rng.integers(0, n, size=pairs)
    j = rng.integers(0, n, size=pairs)
    gaps = np.abs(vals[i] - vals[j])
    dists = np.linalg.norm(pts[i] - pts[j], axis=1)
    bad = gaps > lip * dists + 1e-9 * (1.0 + np.abs(vals[i]))
    if np.any(bad):
        w = int(np.flatnonzero(bad)[0])
        raise ValueError(
            f"functional violates its Lipschitz constant {lip}: "
            f"|df| = {gaps[w]!r} over |dx| = {dists[w]!r}")


# ---------------------------------------------------------------------------
# gradient integrals
# ---------------------------------------------------------------------------

def integrate_grad(sampler, f, count: int, seed: int, power: int = 1) -> EstimateCI:
    """Monte Carlo estimate of the integral of |grad f|_2^power.

    Fields exposing an exact .grad are evaluated in one vectorized call;
    anything else goes through the finite-difference grad_norm point by
    point.  Samples with a non-finite gradient are dropped, and more than
    0.1% of them aborts the estimate.
    """
    batch = sampler(count, seed)
    pts = batch.points
    g = getattr(f, "grad", None)
    if g is not None:
        norms = np.linalg.norm(np.asarray(g(pts), dtype=float), axis=1)
    else:
        norms = np.empty(count)
        for idx in range(count):
            try:
                norms[idx] = grad_norm(f, pts[idx])
            except FloatingPointError:
                norms[idx] = np.nan
    finite = np.isfinite(norms)
    bad = count - int(finite.sum())
    if bad > 1e-3 * count:
        raise RuntimeError(
            f"non-finite gradient at {bad} of {count} samples "
            f"({100.0 * bad / count:.2f}%)")
    kept = norms[finite]
    if power != 1:
        kept = kept ** power
    return mean_ci(kept)


# ---------------------------------------------------------------------------
# CSV persistence
# ---------------------------------------------------------------------------

def write_estimates_csv(rows, path):
    """Rows (quantity, p, n, param, EstimateCI, verdict) in a fixed schema."""
    with open(path, "w", newline="") as fh:
        fh.write("quantity,p,n,param,mean,std_err,n_samples,verdict\n")
        for quantity, p, n, param, est, verdict in rows:
            fh.write(",".join([
                str(quantity), repr(float(p)), str(int(n)), repr(float(param)),
                repr(float(est.mean)), repr(float(est.std_err)),
                str(int(est.n_samples)), str(verdict),
            ]) + "\n")
