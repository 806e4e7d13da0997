"""Random populations and return paths for the Monte Carlo experiment.

Assets are built as

    r_i ~ bounded Pareto(c_r, l_r, u_r),  h_i ~ bounded Pareto(c_h, l_h, u_h),
    z_i ~ U[0, 1],  v_i = h_i r_i^2,  c_i = r_i z_i,

and returns are Gaussian with mean r_i and variance v_i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidSpecError
from .market import AssetPopulation, PopulationMoments


@dataclass(frozen=True)
class ParetoSpec:
    """Bounded Pareto law with density proportional to ``x**-exponent`` on ``[lower, upper]``."""

    exponent: float
    lower: float
    upper: float

    def __post_init__(self):
        if not (0 < self.lower < self.upper):
            raise InvalidSpecError(
                f"bounded Pareto needs 0 < lower < upper (got {self.lower}, {self.upper})"
            )
        if not self.exponent > 0:
            raise InvalidSpecError("bounded Pareto exponent must be positive")
        # the log-normalised exponent=1 case is not supported
        if abs(self.exponent - 1.0) <= 1e-9:
            raise InvalidSpecError("bounded Pareto exponent must differ from 1")
        if not math.isfinite(self.upper):
            raise InvalidSpecError("upper bound must be finite")

    @property
    def _a(self) -> float:
        return 1.0 - self.exponent

    @property
    def norm(self) -> float:
        a = self._a
        return a / (self.upper**a - self.lower**a)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.lower) & (x <= self.upper)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = self.norm * x**-self.exponent
        return np.where(inside, val, 0.0)

    def cdf(self, x):
        x = np.clip(np.asarray(x, dtype=float), self.lower, self.upper)
        a = self._a
        return (x**a - self.lower**a) / (self.upper**a - self.lower**a)

    def ppf(self, u):
        """Inverse CDF; ``u`` in [0, 1]."""
        u = np.asarray(u, dtype=float)
        a = self._a
        la, ua = self.lower**a, self.upper**a
        x = (la + u * (ua - la)) ** (1.0 / a)
        # guard the endpoints against rounding in the power
        return np.clip(x, self.lower, self.upper)


@dataclass(frozen=True)
class ScenarioConfig:
    n_assets: int
    n_periods: int
    cost_coefficient: float
    return_grid: tuple[float, ...]
    pareto_r: ParetoSpec
    pareto_h: ParetoSpec
    n_trials: int
    master_seed: int

    def __post_init__(self):
        object.__setattr__(self, "return_grid", tuple(float(x) for x in self.return_grid))
        if self.n_assets < 2:
            raise InvalidSpecError("n_assets must be at least 2")
        if self.n_periods <= self.n_assets:
            raise InvalidSpecError(
                f"n_periods must exceed n_assets (got p={self.n_periods}, N={self.n_assets})"
            )
        if not self.return_grid:
            raise InvalidSpecError("return_grid must be nonempty")
        if any(b <= a for a, b in zip(self.return_grid, self.return_grid[1:])):
            raise InvalidSpecError("return_grid must be strictly increasing")
        if self.n_trials < 1:
            raise InvalidSpecError("n_trials must be at least 1")
        if not 0 <= self.master_seed < 2**64:
            raise InvalidSpecError("master_seed must be an unsigned 64-bit integer")

    @property
    def alpha(self) -> float:
        return self.n_periods / self.n_assets


@dataclass(frozen=True)
class ReturnsMatrix:
    """N x p matrix of centred returns already divided by sqrt(N)."""

    entries: np.ndarray

    @property
    def n_assets(self) -> int:
        return self.entries.shape[0]

    @property
    def n_periods(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class WishartMatrix:
    entries: np.ndarray

    @property
    def n_assets(self) -> int:
        return self.entries.shape[0]


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    """Independent stream for one trial, a pure function of (master_seed, trial_index)."""
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(trial_index,))
    return np.random.Generator(np.random.PCG64(seq))


def sample_bounded_pareto(spec: ParetoSpec, rng: np.random.Generator, size=None):
    """Draw from ``spec`` by inverse-CDF transform, one uniform per value."""
    u = rng.random(size)
    x = spec.ppf(u)
    return float(x) if size is None else x


def generate_population(cfg: ScenarioConfig, rng: np.random.Generator) -> AssetPopulation:
    n = cfg.n_assets
    r = sample_bounded_pareto(cfg.pareto_r, rng, n)
    h = sample_bounded_pareto(cfg.pareto_h, rng, n)
    z = rng.random(n)
    return population_from_draws(r, h, z)


def population_from_draws(r, h, z) -> AssetPopulation:
    r = np.asarray(r, dtype=float)
    h = np.asarray(h, dtype=float)
    z = np.asarray(z, dtype=float)
    return AssetPopulation(expected_return=r, unit_cost=r * z, variance=h * r * r)


def generate_returns(pop: AssetPopulation, p: int, rng: np.random.Generator) -> ReturnsMatrix:
    n = pop.n_assets
    if p <= n:
        raise InvalidSpecError(f"need p > N (got p={p}, N={n})")
    sd = np.sqrt(pop.variance)[:, None]
    raw = pop.expected_return[:, None] + sd * rng.standard_normal((n, p))
    return ReturnsMatrix((raw - pop.expected_return[:, None]) / math.sqrt(n))


def wishart(X: ReturnsMatrix) -> WishartMatrix:
    x = X.entries
    return WishartMatrix(x @ x.T)


def analytic_pareto_mean(spec: ParetoSpec, power: int) -> float:
    """Closed-form ``E[x**power]`` under ``spec``."""
    b = power + 1.0 - spec.exponent
    if abs(b) < 1e-12:
        integral = math.log(spec.upper / spec.lower)
    else:
        integral = (spec.upper**b - spec.lower**b) / b
    return spec.norm * integral


def analytic_pareto_log_mean(spec: ParetoSpec) -> float:
    """Closed-form ``E[log x]`` under ``spec``."""
    a = spec._a
    l, u = spec.lower, spec.upper

    def antiderivative(x):
        return x**a * (math.log(x) - 1.0 / a)

    return (antiderivative(u) - antiderivative(l)) / (u**a - l**a)


def analytic_moments(pareto_r: ParetoSpec, pareto_h: ParetoSpec) -> PopulationMoments:
    """Moments of the generating law (N -> infinity), using z ~ U[0,1] independent of r, h.

    With c = r z and v = h r^2 the r-dependence cancels: c^2/v = z^2/h,
    rc/v = z/h, r^2/v = 1/h.
    """
    inv_h = analytic_pareto_mean(pareto_h, -1)
    mean_z, mean_z2 = 0.5, 1.0 / 3.0
    return PopulationMoments(
        m_cc=mean_z2 * inv_h,
        m_rc=mean_z * inv_h,
        m_rr=inv_h,
        mean_log_v=analytic_pareto_log_mean(pareto_h) + 2.0 * analytic_pareto_log_mean(pareto_r),
    )


def reference_setting(
    n_assets: int = 1000,
    n_periods: int = 2000,
    return_grid: Sequence[float] = tuple(round(1.0 + 0.1 * k, 10) for k in range(13)),
    n_trials: int = 100,
    master_seed: int = 1234,
) -> ScenarioConfig:
    """Reference setting: C=1, both Pareto laws with exponent 2 on [1, 2]."""
    spec = ParetoSpec(exponent=2.0, lower=1.0, upper=2.0)
    return ScenarioConfig(
        n_assets=n_assets,
        n_periods=n_periods,
        cost_coefficient=1.0,
        return_grid=tuple(return_grid),
        pareto_r=spec,
        pareto_h=spec,
        n_trials=n_trials,
        master_seed=master_seed,
    )
