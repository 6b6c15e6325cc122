"""Geometry of the unit ball of l_p^n: volumes, marginals, test sets, the
normalization map and its differential, and the two radial cut-offs.

Throughout, V_{p,n} denotes the uniform probability measure on the unit ball

    B_p^n = {x in R^n : |x_1|^p + ... + |x_n|^p <= 1},   1 <= p <= 2.

The one-dimensional marginal of V_{p,n} has density proportional to
(1 - |t|^p)^((n-1)/p) on [-1, 1]; its CDF reduces to a regularized incomplete
beta function, which gives exact half-space measures and boundary masses.

The normalization map T(z) = x / |z|_p, z = (x, y) in R^n x R, pushes the
product measure built in ``sampling`` forward to V_{p,n}.  ``jacobian_T``
returns its differential together with the operator-norm bound

    |D*T(z)| <= (1 + n^((2-p)/(2p)) |T(z)|_2) / |z|_p,

which the test suite checks for violations sample by sample.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special

__all__ = [
    "PBallParams",
    "KinkError",
    "lp_norm",
    "ball_volume",
    "ball_log_volume",
    "marginal_density",
    "marginal_cdf",
    "marginal_sf",
    "marginal_quantile",
    "marginal_isf",
    "marginal_second_moment",
    "HalfSpace",
    "BallComplement",
    "coordinate_half_space",
    "bgmn_map",
    "JacobianResult",
    "jacobian_T",
    "jacobian_op_norms",
    "operator_norm",
    "CutoffParams",
    "cutoff_h1",
    "cutoff_h2",
    "grad_norm",
]

# closed-ball membership tolerance for indicator-style predicates
BALL_TOL = 1e-12


class KinkError(ValueError):
    """Raised when a derivative is requested at a nondifferentiability point."""


@dataclass(frozen=True)
class PBallParams:
    """Exponent and dimension of a unit l_p ball."""

    p: float
    n: int

    def __post_init__(self):
        if not 1.0 <= self.p <= 2.0:
            raise ValueError(f"p must lie in [1, 2], got {self.p!r}")
        if self.n < 1:
            raise ValueError(f"dimension must be >= 1, got {self.n!r}")


def lp_norm(x, p: float, axis: int = -1):
    """l_p norm along ``axis``; fast paths for p in {1, 2}."""
    x = np.asarray(x, dtype=float)
    if p == 1.0:
        return np.abs(x).sum(axis=axis)
    if p == 2.0:
        return np.sqrt(np.square(x).sum(axis=axis))
    return (np.abs(x) ** p).sum(axis=axis) ** (1.0 / p)


def ball_log_volume(p: float, n: int) -> float:
    """log Vol(B_p^n) = n log(2 Gamma(1+1/p)) - log Gamma(1+n/p)."""
    return float(n * (np.log(2.0) + special.gammaln(1.0 + 1.0 / p))
                 - special.gammaln(1.0 + n / p))


def ball_volume(p: float, n: int) -> float:
    return float(np.exp(ball_log_volume(p, n)))


def _marginal_log_norm(p: float, n: int) -> float:
    # normalizer of (1-|t|^p)^((n-1)/p) on [-1,1] is Vol(B_p^n)/Vol(B_p^{n-1})
    return ball_log_volume(p, n) - ball_log_volume(p, n - 1)


def marginal_density(params: PBallParams, t):
    """Density of the coordinate marginal of V_{p,n} at t, |t| <= 1.

    Arguments beyond [-1, 1] raise; sampled coordinates may overshoot the
    ball by BALL_TOL, so that much slack is absorbed by clamping.
    """
    p, n = params.p, params.n
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0 + BALL_TOL):
        raise ValueError("marginal density argument outside [-1, 1]")
    s = np.maximum(1.0 - np.abs(t) ** p, 0.0)
    out = s ** ((n - 1) / p) * np.exp(-_marginal_log_norm(p, n))
    return out if out.ndim else float(out)


def marginal_cdf(params: PBallParams, t):
    """Marginal CDF via the regularized incomplete beta function."""
    p, n = params.p, params.n
    t = np.asarray(t, dtype=float)
    x = np.minimum(np.abs(t), 1.0) ** p
    half = 0.5 * special.betainc(1.0 / p, (n - 1.0) / p + 1.0, x)
    out = 0.5 + np.sign(t) * half
    return out if out.ndim else float(out)


def marginal_sf(params: PBallParams, t):
    """V{x_1 >= t}; equals marginal_cdf(-t) by symmetry."""
    return marginal_cdf(params, -np.asarray(t, dtype=float))


def marginal_quantile(params: PBallParams, a):
    """Inverse of the marginal CDF, exact via the inverse incomplete beta."""
    p, n = params.p, params.n
    a = np.asarray(a, dtype=float)
    if np.any((a <= 0.0) | (a >= 1.0)):
        raise ValueError("marginal quantile level must be in (0,1)")
    x = special.betaincinv(1.0 / p, (n - 1.0) / p + 1.0, np.abs(2.0 * a - 1.0))
    out = np.sign(a - 0.5) * x ** (1.0 / p)
    return out if out.ndim else float(out)


def marginal_isf(params: PBallParams, a):
    """t with V{x_1 >= t} = a."""
    return marginal_quantile(params, 1.0 - np.asarray(a, dtype=float))


def marginal_second_moment(params: PBallParams) -> float:
    """sigma^2(p, n) = integral of t^2 against the coordinate marginal.

    Computed by adaptive quadrature; the closed form
    B(3/p, (n-1)/p + 1) / B(1/p, (n-1)/p + 1) is used as a cross-check in the
    test suite.
    """
    from scipy.integrate import quad

    val, err = quad(lambda t: t * t * marginal_density(params, t), 0.0, 1.0,
                    epsabs=1e-14, epsrel=1e-12, limit=200)
    return 2.0 * val


# ---------------------------------------------------------------------------
# test sets: half-spaces and complements of Euclidean balls
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HalfSpace:
    """A = {x : <x, xi> >= t} with |xi|_2 = 1."""

    xi: np.ndarray
    t: float

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=float)
        nrm = np.linalg.norm(xi)
        if not np.isfinite(nrm) or abs(nrm - 1.0) > 1e-9:
            raise ValueError("half-space direction must be a unit vector")
        object.__setattr__(self, "xi", xi)

    def indicator(self, X) -> np.ndarray:
        return np.asarray(X, dtype=float) @ self.xi >= self.t

    def dist(self, X) -> np.ndarray:
        """Euclidean distance to the set (0 inside)."""
        return np.maximum(self.t - np.asarray(X, dtype=float) @ self.xi, 0.0)

    def dist_grad(self, X) -> np.ndarray:
        """Gradient rows of dist (unit vectors a.e. where dist > 0)."""
        X = np.asarray(X, dtype=float)
        outside = (X @ self.xi < self.t)[:, None]
        return np.where(outside, -self.xi, 0.0)

    def enlarged(self, eps: float) -> "HalfSpace":
        # {dist <= eps} is again a half-space with threshold shifted by eps
        return HalfSpace(self.xi, self.t - eps)

    def _coordinate(self) -> Optional[int]:
        big = np.flatnonzero(np.abs(self.xi) > 1e-12)
        if big.size == 1 and abs(abs(self.xi[big[0]]) - 1.0) <= 1e-12:
            return int(big[0])
        return None

    def analytic_measure(self, params: PBallParams) -> Optional[float]:
        if self._coordinate() is None:
            return None
        # +/- e_i give the same value by symmetry of the marginal
        return float(marginal_sf(params, self.t))

    def analytic_boundary(self, params: PBallParams) -> Optional[float]:
        if self._coordinate() is None:
            return None
        if abs(self.t) > 1.0:
            return 0.0
        return float(marginal_density(params, self.t))


@dataclass(frozen=True)
class BallComplement:
    """A = {x : |x|_2 >= r}."""

    r: float

    def indicator(self, X) -> np.ndarray:
        return lp_norm(X, 2.0) >= self.r

    def dist(self, X) -> np.ndarray:
        return np.maximum(self.r - lp_norm(X, 2.0), 0.0)

    def dist_grad(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        nrm = lp_norm(X, 2.0)
        outside = (nrm < self.r) & (nrm > 0.0)
        unit = X / np.where(nrm == 0.0, 1.0, nrm)[:, None]
        return np.where(outside[:, None], -unit, 0.0)

    def enlarged(self, eps: float) -> "BallComplement":
        return BallComplement(self.r - eps)

    def analytic_measure(self, params: PBallParams) -> Optional[float]:
        if params.p != 2.0:
            return None
        if self.r <= 0.0:
            return 1.0
        return float(1.0 - min(self.r, 1.0) ** params.n)

    def analytic_boundary(self, params: PBallParams) -> Optional[float]:
        if params.p != 2.0 or not 0.0 < self.r <= 1.0:
            return None
        return float(params.n * self.r ** (params.n - 1))


def coordinate_half_space(params: PBallParams, a: float, axis: int = 0) -> HalfSpace:
    """The coordinate half-space {x_axis >= t} with V-measure exactly a."""
    xi = np.zeros(params.n)
    xi[axis] = 1.0
    return HalfSpace(xi, float(marginal_isf(params, a)))


# ---------------------------------------------------------------------------
# normalization map and its differential
# ---------------------------------------------------------------------------

def bgmn_map(z, p: float) -> np.ndarray:
    """T(z) = (z_1, ..., z_n) / |z|_p for z in R^(n+1); batched over rows."""
    z = np.asarray(z, dtype=float)
    nz = lp_norm(z, p)
    if np.any(nz == 0.0):
        raise ValueError("normalization map undefined at z = 0")
    if z.ndim == 1:
        return z[:-1] / nz
    return z[:, :-1] / nz[:, None]


@dataclass(frozen=True)
class JacobianResult:
    """Differential of the normalization map at one point.

    ``matrix`` has shape (n, n+1); row j holds the partial derivatives of
    T_j.  ``op_norm`` is the largest singular value (shared with the adjoint)
    and ``lemma1_bound`` the closed-form operator-norm bound, which must
    dominate op_norm; that is asserted at construction.
    """

    matrix: np.ndarray
    op_norm: float
    lemma1_bound: float

    def __post_init__(self):
        if not self.op_norm <= self.lemma1_bound + 1e-9:
            raise RuntimeError(
                f"operator norm {self.op_norm!r} exceeds its bound "
                f"{self.lemma1_bound!r}")


def _jacobian_matrices(Z: np.ndarray, p: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Stacked Jacobians for rows of Z; returns (matrices, |z|_p, |T(z)|_2)."""
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    count, dim = Z.shape
    n = dim - 1
    nz = lp_norm(Z, p)
    if np.any(nz == 0.0):
        raise ValueError("Jacobian undefined at z = 0")
    X = Z[:, :n]
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.sign(Z) * np.abs(Z) ** (p - 1.0)
    if p == 1.0:
        w = np.sign(Z)  # |z|^0 taken as 1 off the kink set
    mats = np.zeros((count, n, dim))
    idx = np.arange(n)
    mats[:, idx, idx] = 1.0
    mats -= X[:, :, None] * w[:, None, :] / (nz ** p)[:, None, None]
    mats /= nz[:, None, None]
    t2 = np.sqrt(np.square(X).sum(axis=1)) / nz
    return mats, nz, t2


def operator_norm(mat: np.ndarray, method: str = "auto") -> float:
    """Largest singular value; power iteration avoids full SVD for large n."""
    if method == "auto":
        method = "svd" if min(mat.shape) <= 512 else "power"
    if method == "svd":
        return float(np.linalg.svd(mat, compute_uv=False)[0])
    if method != "power":
        raise ValueError(f"unknown operator-norm method {method!r}")
    rng = np.random.default_rng(0)
    v = rng.standard_normal(mat.shape[1])
    v /= np.linalg.norm(v)
    prev = 0.0
    for _ in range(10 ** 4):
        w = mat.T @ (mat @ v)
        s = np.linalg.norm(w)
        if s == 0.0:
            return 0.0
        v = w / s
        if abs(s - prev) <= 1e-10 * max(s, 1.0):
            break
        prev = s
    return float(np.sqrt(s))


def jacobian_T(z, p: float) -> JacobianResult:
    """Differential of T at a single z, with operator norm and its bound.

    For p < 2 the map can fail to be differentiable where a coordinate
    vanishes; such z raise KinkError and the caller perturbs or skips the
    point.  The exception is x = 0 (all ball coordinates zero): there the
    kink terms are multiplied away and the differential exists for every p.
    """
    z = np.asarray(z, dtype=float)
    if p < 2.0 and np.any(z == 0.0) and np.any(z[:-1] != 0.0):
        raise KinkError("coordinate of z is exactly 0 with p < 2")
    mats, nz, t2 = _jacobian_matrices(z, p)
    n = mats.shape[1]
    kappa = (2.0 - p) / (2.0 * p)
    op = operator_norm(mats[0])
    bound = float((1.0 + n ** kappa * t2[0]) / nz[0])
    return JacobianResult(mats[0], op, bound)


def jacobian_op_norms(Z, p: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (op_norm, bound) over rows of Z; used for violation scans."""
    mats, nz, t2 = _jacobian_matrices(Z, p)
    n = mats.shape[1]
    kappa = (2.0 - p) / (2.0 * p)
    ops = np.linalg.svd(mats, compute_uv=False)[:, 0]
    bounds = (1.0 + n ** kappa * t2) / nz
    return ops, bounds


# ---------------------------------------------------------------------------
# radial cut-offs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CutoffParams:
    """Constants of the two cut-offs; both ramps have unit width in the
    rescaled radial variable."""

    c1: float = 1.0
    c2: float = 1.0

    def __post_init__(self):
        if self.c1 <= 0.0 or self.c2 <= 0.0:
            raise ValueError("cut-off constants must be positive")


def cutoff_h1(X, p: float, n: int, c: CutoffParams = CutoffParams()):
    """h1(x) = clip(2 - c1 n^((2-p)/(2p)) |x|_2, 0, 1); kills large |x|_2.

    Identically 1 on {|x|_2 <= 1/(c1 n^kappa)} and 0 on {|x|_2 >= 2/(c1 n^kappa)};
    on the ramp |grad h1|_2 = c1 n^kappa, kappa = (2-p)/(2p).
    """
    kappa = (2.0 - p) / (2.0 * p)
    return np.clip(2.0 - c.c1 * n ** kappa * lp_norm(X, 2.0), 0.0, 1.0)


def cutoff_h2(Z, p: float, n: int, c: CutoffParams = CutoffParams()):
    """h2(z) = clip(c2 n^(-1/p) |z|_p - 1, 0, 1); kills small |z|_p.

    Identically 0 on {|z|_p <= n^(1/p)/c2} and 1 on {|z|_p >= 2 n^(1/p)/c2};
    |grad h2|_2 <= c2 (n+1)^kappa n^(-1/p) everywhere (Hoelder over the n+1
    coordinates of z, using 2(p-1) <= p), with equality when all coordinates
    of z agree.  The weaker c2 sqrt(2/n) suffices for every error budget here.
    """
    return np.clip(c.c2 * n ** (-1.0 / p) * lp_norm(Z, p) - 1.0, 0.0, 1.0)


# ---------------------------------------------------------------------------
# finite-difference gradient norm
# ---------------------------------------------------------------------------

def grad_norm(f, x, step: float = 1e-6) -> float:
    """|grad f(x)|_2, analytically when f exposes .grad, else by differences.

    Piecewise-linear kinks are resolved by comparing one-sided differences:
    when forward and backward gradients disagree, the larger norm is returned,
    which is the relevant value for plateau ramps.
    """
    x = np.asarray(x, dtype=float)
    g = getattr(f, "grad", None)
    if g is not None:
        out = float(np.linalg.norm(np.asarray(g(x[None, :]))[0]))
        if not np.isfinite(out):
            raise FloatingPointError(f"non-finite gradient at {x!r}")
        return out
    if getattr(f, "vectorized", False):
        fun = lambda pt: float(np.asarray(f(pt[None, :])).reshape(()))
    else:
        fun = lambda pt: float(f(pt))
    h = step * (1.0 + np.linalg.norm(x))
    d = x.size
    gf = np.empty(d)
    gb = np.empty(d)
    f0 = fun(x)
    for i in range(d):
        e = np.zeros(d)
        e[i] = h
        gf[i] = (fun(x + e) - f0) / h
        gb[i] = (f0 - fun(x - e)) / h
    if not (np.all(np.isfinite(gf)) and np.all(np.isfinite(gb))):
        raise FloatingPointError(f"non-finite difference quotient at {x!r}")
    scale = 1.0 + np.abs(gf).max() + np.abs(gb).max()
    if np.abs(gf - gb).max() <= 1e-3 * scale:
        return float(np.linalg.norm(0.5 * (gf + gb)))
    return float(max(np.linalg.norm(gf), np.linalg.norm(gb)))
