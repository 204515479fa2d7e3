"""Lattice sums over Z^2 (and Z) and the Sobolev constants built from them.

The sharp constant in ``||f - mean f||_inf <= C ||Lap f||_2`` on the unit
torus T^d is ``(2 pi)^-2 * sqrt(sum_{k != 0} |k|^-4)``; everything here is a
thin layer over that lattice sum with explicit error bars.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

DEFAULT_RADIUS = 2000.0
_HALF_DIAG = math.sqrt(2.0) / 2.0
_ROW_BLOCK = 512


@dataclass(frozen=True)
class LatticeSumResult:
    """Truncated lattice sum with a rigorous tail majorant.

    ``value`` is the midpoint of ``[partial_sum, partial_sum + tail_estimate]``
    and ``error`` its half width, so the exact sum is ``value +- error``.
    """

    exponent: float
    truncation_radius: float
    partial_sum: float
    tail_estimate: float

    @property
    def value(self) -> float:
        return self.partial_sum + 0.5 * self.tail_estimate

    @property
    def error(self) -> float:
        return 0.5 * self.tail_estimate

    @property
    def lower(self) -> float:
        return self.partial_sum

    @property
    def upper(self) -> float:
        return self.partial_sum + self.tail_estimate


def _check_args(exponent, radius):
    if not math.isfinite(exponent) or exponent <= 1.0:
        raise ValueError(f"exponent must be > 1 for convergence, got {exponent}")
    if not math.isfinite(radius):
        raise ValueError(f"radius must be finite, got {radius}")
    if radius < 1.0:
        raise ValueError(f"radius must be >= 1, got {radius}")


def _shell_sum(exponent, r_lo, r_hi):
    """Sum |k|^(-2s) over k in Z^2 with r_lo < |k| <= r_hi (r_lo >= 0).

    Uses the fourfold rotation symmetry: the quadrant {k1 >= 1, k2 >= 0}
    and its rotations tile Z^2 minus the origin exactly once.
    """
    kmax = int(math.floor(r_hi))
    lo2, hi2 = r_lo * r_lo, r_hi * r_hi
    k2 = np.arange(0, kmax + 1, dtype=np.int64)
    k2sq = k2 * k2
    total = 0.0
    for start in range(1, kmax + 1, _ROW_BLOCK):
        k1 = np.arange(start, min(start + _ROW_BLOCK, kmax + 1), dtype=np.int64)
        r2 = (k1 * k1)[:, None] + k2sq[None, :]
        mask = (r2 <= hi2) & (r2 > lo2)
        terms = np.power(r2[mask].astype(np.float64), -exponent)
        total += float(np.sum(terms))
    return 4.0 * total


def _tail_majorant(exponent, radius):
    """Upper bound for sum_{|k| > radius} |k|^(-2s), valid for radius > sqrt(2).

    Every lattice point k with |k| > R owns the unit square centred on it,
    and on that square |k| >= |x| - sqrt(2)/2, so the tail is dominated by
    the radial integral of (|x| - sqrt(2)/2)^(-2s) over |x| > R - sqrt(2)/2.
    """
    t = radius - 2.0 * _HALF_DIAG
    s2 = 2.0 * exponent
    return 2.0 * math.pi * (t ** (2.0 - s2) / (s2 - 2.0) + _HALF_DIAG * t ** (1.0 - s2) / (s2 - 1.0))


def epstein_sum(exponent: float, radius: float = DEFAULT_RADIUS) -> LatticeSumResult:
    """Sum of |k|^(-2*exponent) over k in Z^2 \\ {0}, truncated at |k| <= radius."""
    _check_args(exponent, radius)
    partial = _shell_sum(exponent, 0.0, radius)
    if radius >= 2.0:
        tail = _tail_majorant(exponent, radius)
    else:
        # the majorant needs R > sqrt(2); bridge the gap explicitly
        tail = _shell_sum(exponent, radius, 2.0) + _tail_majorant(exponent, 2.0)
    return LatticeSumResult(float(exponent), float(radius), partial, tail)


def epstein_sum_1d(exponent: float, radius: float = DEFAULT_RADIUS) -> LatticeSumResult:
    """Sum of |k|^(-2*exponent) over k in Z \\ {0}, truncated at |k| <= radius."""
    _check_args(exponent, radius)
    k = np.arange(1, int(math.floor(radius)) + 1, dtype=np.float64)
    partial = 2.0 * float(np.sum(k[::-1] ** (-2.0 * exponent)))
    # sum_{k > K} k^-p <= int_K^inf x^-p dx
    kmax = math.floor(radius)
    tail = 2.0 * kmax ** (1.0 - 2.0 * exponent) / (2.0 * exponent - 1.0)
    return LatticeSumResult(float(exponent), float(radius), partial, tail)


def dirichlet_beta(s: float, terms: int = 40) -> float:
    """Dirichlet beta(s) = sum_n (-1)^n / (2n+1)^s via accelerated alternating summation.

    Cohen-Villegas-Zagier weights; the error decays like 5.83^-terms, so the
    default is at roundoff for s >= 1.
    """
    d = (3.0 + math.sqrt(8.0)) ** terms
    d = 0.5 * (d + 1.0 / d)
    b = -1.0
    c = -d
    acc = 0.0
    for k in range(terms):
        c = b - c
        acc += c / (2 * k + 1) ** s
        b = (k + terms) * (k - terms) * b / ((k + 0.5) * (k + 1))
    return acc / d


def catalan() -> float:
    return dirichlet_beta(2.0)


def lattice_identity(exponent: float) -> float:
    """Closed form sum_{k in Z^2 \\ 0} |k|^(-2s) = 4 zeta(s) beta(s)."""
    from scipy.special import zeta

    return 4.0 * float(zeta(exponent)) * dirichlet_beta(exponent)


def sobolev_constant(radius: float = DEFAULT_RADIUS) -> float:
    """Sharp constant C_S in ||f - mean f||_inf <= C_S ||Lap f||_2 on T^2."""
    return math.sqrt(epstein_sum(2.0, radius).value) / (4.0 * math.pi**2)


def sobolev_constant_bounds(radius: float = DEFAULT_RADIUS) -> tuple[float, float]:
    res = epstein_sum(2.0, radius)
    scale = 4.0 * math.pi**2
    return math.sqrt(res.lower) / scale, math.sqrt(res.upper) / scale


def sobolev_constant_1d(radius: float = DEFAULT_RADIUS) -> float:
    """Analogue of :func:`sobolev_constant` on the circle T^1 (not a T^2 quantity).

    Used by the reduced 2D simulator, where the plate is a function of one
    horizontal variable; equals sqrt(pi^4/45) / (4 pi^2) = 1/sqrt(720).
    """
    return math.sqrt(epstein_sum_1d(2.0, radius).value) / (4.0 * math.pi**2)


@lru_cache(maxsize=None)
def converged_sobolev_constant() -> float:
    return sobolev_constant(DEFAULT_RADIUS)


@lru_cache(maxsize=None)
def converged_sobolev_constant_1d() -> float:
    return sobolev_constant_1d(DEFAULT_RADIUS)


def _check_kappa(kappa):
    if not (0.0 < kappa < 1.0):
        raise ValueError(f"kappa must lie in the open interval (0, 1), got {kappa}")


def certificate_constant(kappa: float, c_s: float) -> float:
    """C_kappa = C_S^2 / (1 - kappa)^2."""
    _check_kappa(kappa)
    if not c_s > 0:
        raise ValueError(f"c_s must be positive, got {c_s}")
    return c_s**2 / (1.0 - kappa) ** 2


def curvature_threshold(kappa: float, c_s: float | None = None) -> float:
    """Largest admissible ||Lap h0||^2 for the floor kappa, i.e. 1/C_kappa."""
    _check_kappa(kappa)
    if c_s is None:
        c_s = converged_sobolev_constant()
    return (1.0 - kappa) ** 2 / c_s**2
