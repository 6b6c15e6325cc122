"""Vectorized scalar fields with exact almost-everywhere gradients.

The verification checks integrate gradient norms of [0,1]-valued plateau
functions (ramps of half-spaces, radial ramps, cut-offs, and their products
and push-forwards under the normalization map).  Every field here consumes a
(rows, dim) array and returns per-row values; ``grad`` returns the full
gradient rows, exact off a measure-zero kink set, so Monte Carlo integrands
need no finite differences.

A field f supports:
    f(X)        -> (rows,) values in [0, 1]
    f.grad(X)   -> (rows, dim) gradients
    f.dim       -> expected point dimension
Ramps additionally expose ``superlevel(u)`` returning the test set {f > u}.
"""

from __future__ import annotations

import numpy as np

from .geometry import (
    BallComplement,
    CutoffParams,
    HalfSpace,
    lp_norm,
)

__all__ = [
    "LinearRamp",
    "RadialRamp",
    "DistanceRamp",
    "CutoffH1Field",
    "CutoffH2Field",
    "ProductField",
    "PushForwardField",
    "ConstantField",
    "CoordinateFunctional",
    "DirectionalFunctional",
    "EuclideanNorm",
    "functional_catalog",
]


def _rows(X, dim: int) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != dim:
        raise ValueError(f"expected points of shape (rows, {dim}), got {X.shape}")
    return X


class ConstantField:
    """f identically equal to ``value``; gradient zero."""

    vectorized = True

    def __init__(self, dim: int, value: float = 0.0):
        if not 0.0 <= value <= 1.0:
            raise ValueError("constant plateau value must lie in [0, 1]")
        self.dim = dim
        self.value = float(value)

    def __call__(self, X):
        return np.full(_rows(X, self.dim).shape[0], self.value)

    def grad(self, X):
        return np.zeros_like(_rows(X, self.dim))

    def superlevel(self, u: float):
        # {const > u} is everything or nothing; boundary content is 0 either
        # way, which callers encode as None
        return None


class LinearRamp:
    """clip((<x, xi> - lo) / (hi - lo), 0, 1) for a unit direction xi.

    Identically 0 on {<x,xi> <= lo} and 1 on {<x,xi> >= hi}; the gradient is
    xi / (hi - lo) strictly between the thresholds and zero elsewhere.
    """

    vectorized = True

    def __init__(self, xi, lo: float, hi: float):
        xi = np.asarray(xi, dtype=float)
        if abs(np.linalg.norm(xi) - 1.0) > 1e-9:
            raise ValueError("ramp direction must be a unit vector")
        if not hi > lo:
            raise ValueError("ramp needs hi > lo")
        self.xi = xi
        self.lo = float(lo)
        self.hi = float(hi)
        self.dim = xi.size

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __call__(self, X):
        t = _rows(X, self.dim) @ self.xi
        return np.clip((t - self.lo) / self.width, 0.0, 1.0)

    def grad(self, X):
        t = _rows(X, self.dim) @ self.xi
        on = (t > self.lo) & (t < self.hi)
        return np.where(on[:, None], self.xi / self.width, 0.0)

    def superlevel(self, u: float) -> HalfSpace:
        if not 0.0 <= u < 1.0:
            raise ValueError("superlevel threshold must lie in [0, 1)")
        return HalfSpace(self.xi, self.lo + u * self.width)


class RadialRamp:
    """clip((|x|_2 - lo) / (hi - lo), 0, 1) with 0 < lo < hi."""

    vectorized = True

    def __init__(self, dim: int, lo: float, hi: float):
        if not 0.0 < lo < hi:
            raise ValueError("radial ramp needs 0 < lo < hi")
        self.dim = dim
        self.lo = float(lo)
        self.hi = float(hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __call__(self, X):
        r = lp_norm(_rows(X, self.dim), 2.0)
        return np.clip((r - self.lo) / self.width, 0.0, 1.0)

    def grad(self, X):
        X = _rows(X, self.dim)
        r = lp_norm(X, 2.0)
        on = (r > self.lo) & (r < self.hi)
        with np.errstate(invalid="ignore", divide="ignore"):
            unit = np.where(r[:, None] > 0.0, X / np.where(r == 0.0, 1.0, r)[:, None], 0.0)
        return np.where(on[:, None], unit / self.width, 0.0)

    def superlevel(self, u: float) -> BallComplement:
        if not 0.0 <= u < 1.0:
            raise ValueError("superlevel threshold must lie in [0, 1)")
        return BallComplement(self.lo + u * self.width)


class DistanceRamp:
    """clip(1 - (dist(x, A) - r) / s, 0, 1): 1 on the r-enlargement of A,
    ramping to 0 across the shell r < dist <= r + s."""

    vectorized = True

    def __init__(self, set_, dim: int, r: float, s: float):
        if r < 0.0 or s <= 0.0:
            raise ValueError("distance ramp needs r >= 0 and s > 0")
        self.set_ = set_
        self.dim = dim
        self.r = float(r)
        self.s = float(s)

    def __call__(self, X):
        d = self.set_.dist(_rows(X, self.dim))
        return np.clip(1.0 - (d - self.r) / self.s, 0.0, 1.0)

    def grad(self, X):
        X = _rows(X, self.dim)
        d = self.set_.dist(X)
        on = (d > self.r) & (d < self.r + self.s)
        return np.where(on[:, None], -self.set_.dist_grad(X) / self.s, 0.0)

    def superlevel(self, u: float):
        if not 0.0 <= u < 1.0:
            raise ValueError("superlevel threshold must lie in [0, 1)")
        return self.set_.enlarged(self.r + self.s * (1.0 - u))

    def ramp_indicator(self, X) -> np.ndarray:
        """1 exactly where the gradient is nonzero."""
        d = self.set_.dist(_rows(X, self.dim))
        return ((d > self.r) & (d < self.r + self.s)).astype(float)


class CutoffH1Field:
    """The large-|x|_2 cut-off as a field on R^n."""

    vectorized = True

    def __init__(self, p: float, n: int, c: CutoffParams = CutoffParams()):
        self.p = p
        self.n = n
        self.c = c
        self.dim = n
        kappa = (2.0 - p) / (2.0 * p)
        self.slope = c.c1 * n ** kappa
        # value = clip(2 - slope*|x|_2, 0, 1): ramp on 1/slope < |x|_2 < 2/slope
        self.lo = 1.0 / self.slope
        self.hi = 2.0 / self.slope

    def __call__(self, X):
        r = lp_norm(_rows(X, self.dim), 2.0)
        return np.clip(2.0 - self.slope * r, 0.0, 1.0)

    def grad(self, X):
        X = _rows(X, self.dim)
        r = lp_norm(X, 2.0)
        on = (r > self.lo) & (r < self.hi)
        unit = X / np.where(r == 0.0, 1.0, r)[:, None]
        return np.where(on[:, None], -self.slope * unit, 0.0)


class CutoffH2Field:
    """The small-|z|_p cut-off as a field on R^(n+1)."""

    vectorized = True

    def __init__(self, p: float, n: int, c: CutoffParams = CutoffParams()):
        self.p = p
        self.n = n
        self.c = c
        self.dim = n + 1
        self.scale = c.c2 * n ** (-1.0 / p)
        # value = clip(scale*|z|_p - 1, 0, 1): ramp on 1/scale < |z|_p < 2/scale
        self.lo = 1.0 / self.scale
        self.hi = 2.0 / self.scale

    def __call__(self, Z):
        r = lp_norm(_rows(Z, self.dim), self.p)
        return np.clip(self.scale * r - 1.0, 0.0, 1.0)

    def grad(self, Z):
        Z = _rows(Z, self.dim)
        r = lp_norm(Z, self.p)
        on = (r > self.lo) & (r < self.hi)
        if self.p == 1.0:
            unit = np.sign(Z)
        else:
            w = np.sign(Z) * np.abs(Z) ** (self.p - 1.0)
            unit = w / np.where(r == 0.0, 1.0, r)[:, None] ** (self.p - 1.0)
        return np.where(on[:, None], self.scale * unit, 0.0)


class ProductField:
    """Pointwise product of two fields on the same space."""

    vectorized = True

    def __init__(self, f, g):
        if f.dim != g.dim:
            raise ValueError("product factors must share a dimension")
        self.f = f
        self.g = g
        self.dim = f.dim

    def __call__(self, X):
        return self.f(X) * self.g(X)

    def grad(self, X):
        return (self.f(X)[:, None] * self.g.grad(X)
                + self.g(X)[:, None] * self.f.grad(X))


class PushForwardField:
    """f composed with the normalization map: value(z) = f(z_{1..n} / |z|_p).

    The gradient applies the adjoint differential to the gradient of f, so
    it is exact wherever f is differentiable at the mapped point (kinks of
    |.|_p off the sampled set are measure zero).
    """

    vectorized = True

    def __init__(self, f, p: float):
        self.f = f
        self.p = p
        self.dim = f.dim + 1

    def __call__(self, Z):
        Z = _rows(Z, self.dim)
        nz = lp_norm(Z, self.p)
        return self.f(Z[:, :-1] / nz[:, None])

    def grad(self, Z):
        Z = _rows(Z, self.dim)
        p = self.p
        nz = lp_norm(Z, p)
        X = Z[:, :-1] / nz[:, None]
        v = self.f.grad(X)
        if p == 1.0:
            w = np.sign(Z)
        else:
            w = np.sign(Z) * np.abs(Z) ** (p - 1.0)
        dot = np.einsum("ij,ij->i", X, v)
        out = np.zeros_like(Z)
        out[:, :-1] = v
        out /= nz[:, None]
        # adjoint of (delta_ij - z_j w_i / |z|^p) / |z| applied to v
        out -= (dot / nz ** p)[:, None] * w
        return out


# ---------------------------------------------------------------------------
# 1-Lipschitz functionals for median/concentration curves
# ---------------------------------------------------------------------------

class CoordinateFunctional:
    """F(x) = x_i."""

    vectorized = True
    lipschitz_constant = 1.0

    def __init__(self, dim: int, index: int = 0):
        if not 0 <= index < dim:
            raise ValueError("coordinate index out of range")
        self.dim = dim
        self.index = index

    def __call__(self, X):
        return _rows(X, self.dim)[:, self.index].copy()


class DirectionalFunctional:
    """F(x) = <x, theta> with |theta|_2 = 1."""

    vectorized = True
    lipschitz_constant = 1.0

    def __init__(self, theta):
        theta = np.asarray(theta, dtype=float)
        if abs(np.linalg.norm(theta) - 1.0) > 1e-9:
            raise ValueError("direction must be a unit vector")
        self.theta = theta
        self.dim = theta.size

    def __call__(self, X):
        return _rows(X, self.dim) @ self.theta


class EuclideanNorm:
    """F(x) = |x|_2."""

    vectorized = True
    lipschitz_constant = 1.0

    def __init__(self, dim: int):
        self.dim = dim

    def __call__(self, X):
        return lp_norm(_rows(X, self.dim), 2.0)


def functional_catalog(name: str, dim: int):
    """Built-in 1-Lipschitz functionals: coordinate, diagonal, euclidean_norm."""
    if name == "coordinate":
        return CoordinateFunctional(dim, 0)
    if name == "diagonal":
        return DirectionalFunctional(np.full(dim, dim ** -0.5))
    if name == "euclidean_norm":
        return EuclideanNorm(dim)
    raise ValueError(f"unknown functional {name!r}")
