"""One-dimensional reference measures and their half-line isoperimetric profiles.

Four families are built in:

* ``mu_p``  -- symmetric exponential-power law, density exp(-|t|^p) / (2 Gamma(1+1/p))
  on the real line;
* ``nu_p``  -- its one-sided companion, density p t^(p-1) exp(-t^p) on [0, inf);
* ``Gamma(shape, 1)`` -- needed because |X|^p is Gamma(1/p, 1) distributed when
  X is mu_p distributed;
* ``Exp(1)`` -- the shape-1 special case; Y^p is Exp(1) distributed when Y is
  nu_p distributed.

For a measure with distribution function F the half-line profile at mass a is

    J(a) = min(F'(F^{-1}(a)), F'(F^{-1}(1-a))),

the smaller of the boundary densities of the two half-lines carrying mass a.
For log-concave measures half-lines are extremal, so J is the true
isoperimetric profile.  ``profile_comparison`` measures J against the model
shape a * log(1/a)^(1-1/p) that governs the small-mass regime of this family.

CDFs are evaluated through the regularized incomplete gamma function and
quantiles through monotone bracketed root-finding with a Newton polish
(closed forms are used where available).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special
from scipy.optimize import brentq

__all__ = [
    "LogConcave1D",
    "ProfilePoint",
    "ProfileComparison",
    "make_mu_p",
    "make_nu_p",
    "make_gamma",
    "make_exponential",
    "bobkov_profile",
    "profile_comparison",
]

_QUANTILE_XTOL = 1e-14


@dataclass(frozen=True)
class LogConcave1D:
    """A one-dimensional measure given by log-density, CDF and quantile.

    ``log_concave`` is False for the Gamma(shape, 1) instances with shape < 1,
    whose density is log-convex near the origin; they are carried in the same
    container because the samplers and the small-ball checks need their CDFs.
    """

    name: str
    support: tuple[float, float]
    log_density: Callable
    cdf: Callable
    quantile: Callable
    log_concave: bool = True

    def density(self, t):
        with np.errstate(over="ignore"):
            return np.exp(self.log_density(t))


@dataclass(frozen=True)
class ProfilePoint:
    a: float
    boundary_mass: float


@dataclass(frozen=True)
class ProfileComparison:
    """Profile-to-model ratios r(a) = J(a) / (m * log(1/m)^(1-1/p)), m = min(a, 1-a)."""

    p: float
    a_grid: np.ndarray
    mu_ratios: np.ndarray
    nu_ratios: np.ndarray
    mu_ratio_min: float = field(init=False)
    mu_ratio_max: float = field(init=False)
    nu_ratio_min: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "mu_ratio_min", float(np.min(self.mu_ratios)))
        object.__setattr__(self, "mu_ratio_max", float(np.max(self.mu_ratios)))
        object.__setattr__(self, "nu_ratio_min", float(np.min(self.nu_ratios)))


def _bracket(cdf, support, a):
    """Find [lo, hi] inside the support with cdf(lo) <= a <= cdf(hi)."""
    lo, hi = support
    if np.isfinite(lo):
        t_lo = lo
    else:
        t_lo = -1.0
        while cdf(t_lo) > a:
            t_lo *= 2.0
            if t_lo < -1e300:
                raise RuntimeError("quantile bracket ran off the left end")
    if np.isfinite(hi):
        t_hi = hi
    else:
        t_hi = 1.0
        while cdf(t_hi) < a:
            t_hi *= 2.0
            if t_hi > 1e300:
                raise RuntimeError("quantile bracket ran off the right end")
    return t_lo, t_hi


def _root_quantile(m_name, cdf, density, support, a):
    """Bracketed monotone root-finding for F^{-1}(a), then one guarded Newton step."""
    if not 0.0 < a < 1.0:
        raise ValueError(f"quantile level must be in (0,1), got {a!r}")
    try:
        t_lo, t_hi = _bracket(cdf, support, a)
        t = brentq(lambda t: cdf(t) - a, t_lo, t_hi,
                   xtol=_QUANTILE_XTOL, rtol=4.0 * np.finfo(float).eps)
    except (RuntimeError, ValueError) as exc:
        raise RuntimeError(f"quantile of {m_name} failed to converge at a={a!r}: {exc}") from exc
    f = density(t)
    if np.isfinite(f) and f > 0.0:
        t_new = t - (cdf(t) - a) / f
        if support[0] < t_new < support[1] and abs(cdf(t_new) - a) < abs(cdf(t) - a):
            t = t_new
    return t


def make_mu_p(p: float) -> LogConcave1D:
    """Symmetric exponential-power measure on R, density exp(-|t|^p)/(2 Gamma(1+1/p))."""
    if not 1.0 <= p <= 2.0:
        raise ValueError(f"p must lie in [1, 2], got {p!r}")
    log_norm = np.log(2.0) + special.gammaln(1.0 + 1.0 / p)

    def log_density(t):
        return -np.abs(t) ** p - log_norm

    def cdf(t):
        t = np.asarray(t, dtype=float)
        out = 0.5 * (1.0 + np.sign(t) * special.gammainc(1.0 / p, np.abs(t) ** p))
        return out if out.ndim else float(out)

    name = f"mu_{p:g}"
    support = (-np.inf, np.inf)

    def quantile(a):
        return _root_quantile(name, cdf, lambda t: np.exp(log_density(t)), support, a)

    return LogConcave1D(name, support, log_density, cdf, quantile)


def make_nu_p(p: float) -> LogConcave1D:
    """One-sided measure on [0, inf), density p t^(p-1) exp(-t^p).

    The density at t = 0 is taken as the limit value: 1 for p = 1, else 0.
    """
    if not 1.0 <= p <= 2.0:
        raise ValueError(f"p must lie in [1, 2], got {p!r}")

    def log_density(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            body = np.log(p) + (p - 1.0) * np.log(t) - t ** p
        if p == 1.0:
            body = np.where(t >= 0.0, -t, -np.inf)
        out = np.where(t < 0.0, -np.inf, body)
        return out if out.ndim else float(out)

    def cdf(t):
        t = np.asarray(t, dtype=float)
        out = np.where(t <= 0.0, 0.0, -np.expm1(-np.maximum(t, 0.0) ** p))
        return out if out.ndim else float(out)

    def quantile(a):
        if not 0.0 < a < 1.0:
            raise ValueError(f"quantile level must be in (0,1), got {a!r}")
        return (-np.log1p(-a)) ** (1.0 / p)

    return LogConcave1D(f"nu_{p:g}", (0.0, np.inf), log_density, cdf, quantile)


def make_gamma(shape: float) -> LogConcave1D:
    """Gamma(shape, 1) on [0, inf).  Log-concave only for shape >= 1."""
    if shape <= 0.0:
        raise ValueError(f"shape must be positive, got {shape!r}")
    log_norm = special.gammaln(shape)

    def log_density(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            body = (shape - 1.0) * np.log(t) - t - log_norm
        if shape == 1.0:
            body = np.where(t >= 0.0, -t, -np.inf)
        out = np.where(t < 0.0, -np.inf, body)
        return out if out.ndim else float(out)

    def cdf(t):
        t = np.asarray(t, dtype=float)
        out = special.gammainc(shape, np.maximum(t, 0.0))
        return out if out.ndim else float(out)

    def quantile(a):
        if not 0.0 < a < 1.0:
            raise ValueError(f"quantile level must be in (0,1), got {a!r}")
        return float(special.gammaincinv(shape, a))

    return LogConcave1D(f"gamma_{shape:g}", (0.0, np.inf), log_density, cdf, quantile,
                        log_concave=shape >= 1.0)


def make_exponential() -> LogConcave1D:
    """Exp(1): density exp(-t) on [0, inf)."""

    def log_density(t):
        t = np.asarray(t, dtype=float)
        out = np.where(t < 0.0, -np.inf, -t)
        return out if out.ndim else float(out)

    def cdf(t):
        t = np.asarray(t, dtype=float)
        out = np.where(t <= 0.0, 0.0, -np.expm1(-np.maximum(t, 0.0)))
        return out if out.ndim else float(out)

    def quantile(a):
        if not 0.0 < a < 1.0:
            raise ValueError(f"quantile level must be in (0,1), got {a!r}")
        return -np.log1p(-a)

    return LogConcave1D("exp_1", (0.0, np.inf), log_density, cdf, quantile)


def bobkov_profile(m: LogConcave1D, a: float) -> ProfilePoint:
    """Half-line profile J(a) = min of the boundary densities at mass a.

    For log-concave m this is the isoperimetric profile; for mu_1 it equals
    min(a, 1-a) exactly.
    """
    if not 0.0 < a < 1.0:
        raise ValueError(f"profile level must be in (0,1), got {a!r}")
    q_lo = m.quantile(a)
    q_hi = m.quantile(1.0 - a)
    return ProfilePoint(a, float(min(m.density(q_lo), m.density(q_hi))))


def _model_shape(p: float, a) -> np.ndarray:
    """m * log(1/m)^(1-1/p) with m = min(a, 1-a); the comparison denominator."""
    a = np.asarray(a, dtype=float)
    m = np.minimum(a, 1.0 - a)
    return m * np.log(1.0 / m) ** (1.0 - 1.0 / p)


def profile_comparison(p: float, a_grid) -> ProfileComparison:
    """Ratios of the mu_p and nu_p profiles to the model a log^(1-1/p)(1/a).

    Returns the two-sided band (min and max) for mu_p and the one-sided
    minimum for nu_p over the grid.
    """
    a_grid = np.asarray(a_grid, dtype=float)
    a_grid = a_grid[(a_grid > 0.0) & (a_grid < 1.0)]
    if a_grid.size == 0:
        raise ValueError("profile comparison grid is empty after clipping to (0,1)")
    mu = make_mu_p(p)
    nu = make_nu_p(p)
    denom = _model_shape(p, a_grid)
    mu_ratios = np.array([bobkov_profile(mu, a).boundary_mass for a in a_grid]) / denom
    nu_ratios = np.array([bobkov_profile(nu, a).boundary_mass for a in a_grid]) / denom
    return ProfileComparison(p, a_grid, mu_ratios, nu_ratios)
