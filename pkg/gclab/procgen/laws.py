"""Exact one-dimensional marginal laws of the supported generators."""

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special, stats


@dataclass(frozen=True)
class ContinuousLaw:
    cdf: Callable[[float], float]
    ppf: Callable[[float], float]
    pdf: Callable[[float], float]
    support: tuple[float, float]
    name: str
    cdf_vectorized: Callable[[np.ndarray], np.ndarray] | None = None

    discrete = False

    def left_cdf(self, x: float) -> float:
        return self.cdf(x)

    def cdf_many(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if self.cdf_vectorized is not None:
            return np.asarray(self.cdf_vectorized(xs), dtype=float)
        return np.vectorize(self.cdf, otypes=[float])(xs)


@dataclass(frozen=True)
class DiscreteLaw:
    """Law with finitely many atoms; `masses` may contain zeros."""

    atoms: tuple[float, ...]
    masses: tuple[float, ...]
    name: str = "discrete"

    discrete = True

    def cdf(self, x: float) -> float:
        atoms = np.asarray(self.atoms)
        masses = np.asarray(self.masses)
        return float(min(1.0, masses[atoms <= x].sum()))

    def left_cdf(self, x: float) -> float:
        atoms = np.asarray(self.atoms)
        masses = np.asarray(self.masses)
        return float(min(1.0, masses[atoms < x].sum()))

    def cdf_many(self, xs) -> np.ndarray:
        order = np.argsort(self.atoms)
        atoms = np.asarray(self.atoms, dtype=float)[order]
        cumulative = np.minimum(np.cumsum(np.asarray(self.masses, dtype=float)[order]), 1.0)
        index = np.searchsorted(atoms, np.asarray(xs, dtype=float), side="right")
        return np.where(index > 0, cumulative[np.maximum(index - 1, 0)], 0.0)

    @property
    def support(self) -> tuple[float, float]:
        charged = [a for a, m in zip(self.atoms, self.masses) if m > 0.0]
        return (min(charged), max(charged))


def from_scipy(frozen, name: str) -> ContinuousLaw:
    lo, hi = frozen.support()
    return ContinuousLaw(
        cdf=lambda x: float(frozen.cdf(x)),
        ppf=lambda u: float(frozen.ppf(u)),
        pdf=lambda x: float(frozen.pdf(x)),
        support=(float(lo), float(hi)),
        name=name,
        cdf_vectorized=frozen.cdf,
    )


def _irwin_hall_cdf(s: float, terms: int) -> float:
    if s <= 0.0:
        return 0.0
    if s >= terms:
        return 1.0
    k = np.arange(0, math.floor(s) + 1)
    total = np.sum((-1.0) ** k * special.comb(terms, k) * (s - k) ** terms)
    return float(min(1.0, max(0.0, total / math.factorial(terms))))


def _irwin_hall_pdf(s: float, terms: int) -> float:
    if s < 0.0 or s > terms:
        return 0.0
    k = np.arange(0, math.floor(s) + 1)
    total = np.sum((-1.0) ** k * special.comb(terms, k) * (s - k) ** (terms - 1))
    return float(max(0.0, total / math.factorial(terms - 1)))


def standardized_irwin_hall(terms: int) -> ContinuousLaw:
    """Law of (U_1 + ... + U_terms - terms/2) / sqrt(terms/12) for iid uniforms."""
    scale = math.sqrt(terms / 12.0)
    half_width = math.sqrt(3.0 * terms)

    def cdf(y: float) -> float:
        return _irwin_hall_cdf(terms / 2.0 + y * scale, terms)

    def pdf(y: float) -> float:
        return _irwin_hall_pdf(terms / 2.0 + y * scale, terms) * scale

    def ppf(u: float) -> float:
        if u <= 0.0:
            return -half_width
        if u >= 1.0:
            return half_width
        return optimize.brentq(lambda y: cdf(y) - u, -half_width, half_width, xtol=1e-14)

    return ContinuousLaw(cdf=cdf, ppf=ppf, pdf=pdf, support=(-half_width, half_width), name=f"irwin-hall-{terms}")


def standardized_gamma(terms: int) -> ContinuousLaw:
    """Law of (E_1 + ... + E_terms - terms) / sqrt(terms) for iid unit exponentials."""
    root = math.sqrt(terms)
    base = stats.gamma(a=terms)
    return ContinuousLaw(
        cdf=lambda y: float(base.cdf(terms + y * root)),
        ppf=lambda u: float((base.ppf(u) - terms) / root),
        pdf=lambda y: float(base.pdf(terms + y * root) * root),
        support=(-root, math.inf),
        name=f"gamma-{terms}",
        cdf_vectorized=lambda ys: base.cdf(terms + ys * root),
    )
