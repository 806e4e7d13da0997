"""Market description: assets, the constrained problem, and population moments.

Every closed-form prediction in :mod:`replica_portfolio.replica` is a
function of three asset averages,

    m_cc = <c^2 / v>,   m_rc = <r c / v>,   m_rr = <r^2 / v>,

taken here as finite-N sample means over the drawn population.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DegeneratePopulationError, InvalidPopulationError, InvalidProblemError

DEGENERATE_RTOL = 1e-12


@dataclass(frozen=True)
class AssetPopulation:
    """Per-asset expected return ``r_i``, unit cost ``c_i`` and return variance ``v_i``."""

    expected_return: np.ndarray
    unit_cost: np.ndarray
    variance: np.ndarray

    def __post_init__(self):
        arrays = []
        for name in ("expected_return", "unit_cost", "variance"):
            a = np.array(getattr(self, name), dtype=float)
            if a.ndim != 1:
                raise InvalidPopulationError(f"{name} must be one-dimensional")
            if not np.all(np.isfinite(a)):
                raise InvalidPopulationError(f"{name} has non-finite entries")
            a.setflags(write=False)
            object.__setattr__(self, name, a)
            arrays.append(a)
        n = {len(a) for a in arrays}
        if len(n) != 1:
            raise InvalidPopulationError("return, cost and variance arrays differ in length")
        if arrays[0].size < 2:
            raise InvalidPopulationError("need at least two assets")
        if np.any(self.variance <= 0):
            raise InvalidPopulationError("variances must be strictly positive")

    @property
    def n_assets(self) -> int:
        return self.expected_return.size


@dataclass(frozen=True)
class ProblemSpec:
    """Cost coefficient C, return coefficient R, N assets over p periods."""

    cost_coefficient: float
    return_coefficient: float
    n_assets: int
    n_periods: int

    def __post_init__(self):
        if self.n_assets < 1 or self.n_periods < 1:
            raise InvalidProblemError("n_assets and n_periods must be positive")
        if self.n_periods <= self.n_assets:
            raise InvalidProblemError(
                f"need n_periods > n_assets for a unique optimum "
                f"(got p={self.n_periods}, N={self.n_assets})"
            )

    @property
    def period_ratio(self) -> Fraction:
        return Fraction(self.n_periods, self.n_assets)

    @property
    def alpha(self) -> float:
        return self.n_periods / self.n_assets


@dataclass(frozen=True)
class PopulationMoments:
    m_cc: float
    m_rc: float
    m_rr: float
    mean_log_v: float = 0.0

    def __post_init__(self):
        if not (self.m_cc > 0 and self.m_rr > 0):
            raise InvalidPopulationError("m_cc and m_rr must be positive")
        # Cauchy-Schwarz, with slack for rounding in the equality case
        if self.m_rc**2 > self.m_cc * self.m_rr * (1 + 1e-12):
            raise InvalidPopulationError("moments violate m_rc^2 <= m_cc * m_rr")

    @property
    def discriminant(self) -> float:
        """m_cc * m_rr - m_rc^2, the Gram determinant shared by every formula."""
        return self.m_cc * self.m_rr - self.m_rc**2


@dataclass(frozen=True)
class DerivedCoefficients:
    r0: float
    v_big: float
    c0: float
    v_r: float


def population_moments(pop: AssetPopulation) -> PopulationMoments:
    r, c, v = pop.expected_return, pop.unit_cost, pop.variance
    inv_v = 1.0 / v
    return PopulationMoments(
        m_cc=float(np.mean(c * c * inv_v)),
        m_rc=float(np.mean(r * c * inv_v)),
        m_rr=float(np.mean(r * r * inv_v)),
        mean_log_v=float(np.mean(np.log(v))),
    )


def check_return_spread(m: PopulationMoments) -> float:
    """Return V = m_rr/m_cc - (m_rc/m_cc)^2, raising if r is proportional to c."""
    ratio = m.m_rc / m.m_cc
    v_big = m.m_rr / m.m_cc - ratio * ratio
    if v_big < DEGENERATE_RTOL * (m.m_rr / m.m_cc):
        raise DegeneratePopulationError(
            f"V = {v_big:.3e}: returns are proportional to costs, constraints are collinear"
        )
    return v_big


def check_cost_spread(m: PopulationMoments) -> float:
    """Return V_r = m_cc/m_rr - (m_rc/m_rr)^2, raising if r is proportional to c."""
    ratio = m.m_rc / m.m_rr
    v_r = m.m_cc / m.m_rr - ratio * ratio
    if v_r < DEGENERATE_RTOL * (m.m_cc / m.m_rr):
        raise DegeneratePopulationError(
            f"V_r = {v_r:.3e}: returns are proportional to costs, constraints are collinear"
        )
    return v_r


def derived_coefficients(m: PopulationMoments, C: float, R: float) -> DerivedCoefficients:
    """Vertex locations (R0, C0) and curvatures (V, V_r) of the risk parabolas."""
    v_big = check_return_spread(m)
    v_r = check_cost_spread(m)
    return DerivedCoefficients(
        r0=C * m.m_rc / m.m_cc,
        v_big=v_big,
        c0=R * m.m_rc / m.m_rr,
        v_r=v_r,
    )
