"""Samplers for the product measure mu_{p,n} and the ball measure V_{p,n}.

The product measure puts mu_p = exp(-|t|^p)/(2 Gamma(1+1/p)) on the first n
coordinates and nu_p (density p t^{p-1} exp(-t^p) on t >= 0) on the last one.
Coordinates are realized as S * G^{1/p} with G ~ Gamma(1/p, 1) and S a fair
sign, and the last coordinate as E^{1/p} with E ~ Exp(1).  Normalizing by the
l_p norm then yields exact uniform samples on B_p^n; a plain rejection
sampler from the cube serves as the independent oracle at small n.

Determinism: a batch is produced in fixed-size chunks, each driven by its own
PCG64 generator seeded from (seed, chunk index), so identical (params, count,
seed, chunk_size) give bit-identical points and chunks may be generated in
any order or in parallel.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import PBallParams, ball_volume, bgmn_map, lp_norm

__all__ = [
    "SampleBatch",
    "DEFAULT_CHUNK",
    "child_seed",
    "sample_product",
    "sample_ball",
    "rejection_sample_ball",
    "bgmn_map",
    "product_sampler",
    "ball_sampler",
    "rejection_sampler",
    "scaled_sampler",
    "write_batch_csv",
    "read_points_csv",
]

DEFAULT_CHUNK = 1 << 18          # product-measure rows per generator chunk
REJECTION_CHUNK = 1 << 22        # cube candidates per rejection chunk
BALL_OVERSHOOT = 1e-12           # tolerated |x|_p excess on ball batches

# batches carrying points of the named ball law (norm invariant enforced)
_BALL_TAGS = ("V_PN", "REJECTION_V_PN")


@dataclass(frozen=True)
class SampleBatch:
    """Seeded, tagged points from one named measure.

    measure_tag is MU_PN (product space, dim n+1), V_PN (push-forward ball
    law), REJECTION_V_PN (rejection-oracle ball law), or SCALED_V_PN for a
    linearly rescaled ball batch.  chunk_size records the generation layout
    so parallel and serial runs reconcile.
    """

    measure_tag: str
    dim: int
    count: int
    seed: int
    points: np.ndarray = field(repr=False)
    chunk_size: int = DEFAULT_CHUNK

    def __post_init__(self):
        if self.points.shape != (self.count, self.dim):
            raise ValueError(
                f"points shape {self.points.shape} does not match "
                f"(count, dim) = ({self.count}, {self.dim})")


def child_seed(seed: int, index: int) -> int:
    """Deterministic 64-bit sub-seed for the index-th dependent task."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(index,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(chunk_index,))
    return np.random.Generator(np.random.PCG64(ss))


def sample_product(params: PBallParams, count: int, seed: int,
                   chunk_size: int = DEFAULT_CHUNK) -> SampleBatch:
    """count independent points of the product law on R^(n+1)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    p, n = params.p, params.n
    out = np.empty((count, n + 1))
    inv_p = 1.0 / p
    for ci in range(0, -(-count // chunk_size)):
        lo = ci * chunk_size
        hi = min(lo + chunk_size, count)
        rows = hi - lo
        rng = _chunk_rng(seed, ci)
        # draw order per chunk: gamma block, sign block, exponential column
        g = rng.gamma(inv_p, 1.0, size=(rows, n))
        if p != 1.0:
            g **= inv_p
        sg = rng.random((rows, n))
        g[sg < 0.5] *= -1.0
        e = rng.exponential(1.0, size=rows)
        if p != 1.0:
            e **= inv_p
        out[lo:hi, :n] = g
        out[lo:hi, n] = e
    return SampleBatch("MU_PN", n + 1, count, seed, out, chunk_size)


def sample_ball(params: PBallParams, count: int, seed: int,
                chunk_size: int = DEFAULT_CHUNK) -> SampleBatch:
    """count uniform points on B_p^n via the normalization push-forward."""
    prod = sample_product(params, count, seed, chunk_size)
    pts = bgmn_map(prod.points, params.p)
    _check_ball_norms(pts, params.p)
    return SampleBatch("V_PN", params.n, count, seed, pts, chunk_size)


def _check_ball_norms(pts: np.ndarray, p: float):
    worst = float(lp_norm(pts, p).max())
    if worst > 1.0 + BALL_OVERSHOOT:
        raise RuntimeError(f"ball sample exceeds the unit norm: {worst!r}")


def _pow_p(a: np.ndarray, p: float) -> np.ndarray:
    if p == 1.0:
        return a
    if p == 2.0:
        return a * a
    return a ** p


def _rejection_chunk(rng: np.random.Generator, rows: int, p: float, n: int) -> np.ndarray:
    """Accepted rows from one chunk of cube candidates.

    Magnitudes are drawn column-block by column-block with pruning of rows
    whose partial |.|_p^p mass already exceeds 1, and signs are attached to
    survivors only; by symmetry the law is exactly uniform on the cube
    conditioned on the ball.
    """
    if n <= 4:
        blocks = [n]
    else:
        blocks = [2, 2, n - 4]
    pieces = []          # (columns of survivors, local index chain)
    s = np.zeros(rows)
    idx_chain = []
    for width in blocks:
        a = rng.random((width, s.size))
        s = s + _pow_p(a, p).sum(axis=0)
        keep = np.flatnonzero(s <= 1.0)
        pieces.append(a)
        idx_chain.append(keep)
        s = s.take(keep)
    # resolve each block's surviving columns through the later keep-chains
    k = idx_chain[-1].size
    out = np.empty((k, n))
    col = n
    sel = None
    for a, keep in zip(reversed(pieces), reversed(idx_chain)):
        sel = keep if sel is None else keep.take(sel)
        width = a.shape[0]
        col -= width
        out[:, col:col + width] = a.take(sel, axis=1).T
    sg = rng.random((k, n))
    out[sg < 0.5] *= -1.0
    return out


def rejection_sample_ball(params: PBallParams, count: int, seed: int,
                          chunk_size: int = REJECTION_CHUNK) -> SampleBatch:
    """Brute-force uniform sampler on B_p^n: the push-forward oracle.

    Only practical at small n; refuses outright when the cube acceptance
    rate drops below 1e-6.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    p, n = params.p, params.n
    if n > 10:
        raise ValueError(f"rejection sampler limited to n <= 10, got n={n}")
    acceptance = ball_volume(p, n) / 2.0 ** n
    if acceptance < 1e-6:
        raise RuntimeError(
            f"estimated acceptance rate {acceptance:.3e} below 1e-6 "
            f"for p={p}, n={n}")
    got = []
    have = 0
    ci = 0
    while have < count:
        acc = _rejection_chunk(_chunk_rng(seed, ci), chunk_size, p, n)
        got.append(acc)
        have += acc.shape[0]
        ci += 1
    pts = np.concatenate(got, axis=0)[:count]
    _check_ball_norms(pts, p)
    return SampleBatch("REJECTION_V_PN", n, count, seed, pts, chunk_size)


# ---------------------------------------------------------------------------
# sampler factories: estimators consume (count, seed) -> SampleBatch
# ---------------------------------------------------------------------------

def product_sampler(params: PBallParams):
    def sampler(count: int, seed: int) -> SampleBatch:
        return sample_product(params, count, seed)
    sampler.params = params
    sampler.dim = params.n + 1
    return sampler


def ball_sampler(params: PBallParams):
    def sampler(count: int, seed: int) -> SampleBatch:
        return sample_ball(params, count, seed)
    sampler.params = params
    sampler.dim = params.n
    return sampler


def rejection_sampler(params: PBallParams):
    def sampler(count: int, seed: int) -> SampleBatch:
        return rejection_sample_ball(params, count, seed)
    sampler.params = params
    sampler.dim = params.n
    return sampler


def scaled_sampler(base, factor: float):
    """Points of ``base`` multiplied by ``factor`` (rescaled ball laws)."""
    def sampler(count: int, seed: int) -> SampleBatch:
        batch = base(count, seed)
        return SampleBatch("SCALED_V_PN", batch.dim, batch.count, batch.seed,
                           batch.points * factor, batch.chunk_size)
    sampler.params = getattr(base, "params", None)
    sampler.dim = getattr(base, "dim", None)
    sampler.factor = factor
    return sampler


# ---------------------------------------------------------------------------
# CSV persistence
# ---------------------------------------------------------------------------

def write_batch_csv(batch: SampleBatch, path):
    """Header x1,...,xd then one sample per line at full double precision."""
    cols = [f"x{j + 1}" for j in range(batch.dim)]
    with open(path, "w", newline="") as fh:
        fh.write(",".join(cols) + "\n")
        for row in batch.points:
            fh.write(",".join(repr(v) for v in row.tolist()) + "\n")


def read_points_csv(path) -> np.ndarray:
    pts = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return pts
