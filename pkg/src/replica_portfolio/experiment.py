"""Monte Carlo comparison of exact optima against the replica predictions.

One trial draws a population, a return matrix and its Wishart matrix, then
solves the exact problem at every R of the grid. Trials are independent and
seeded from (master_seed, trial_index) only, so the aggregate does not depend
on how many workers ran them or in which order they finished.
"""

from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .errors import (
    CollinearConstraintsError,
    ExperimentFailedError,
    InvalidSpecError,
    NonPositiveRiskError,
    NumericalConditioningWarning,
    SingularMatrixError,
    TrialError,
    VertexAtOriginError,
)
from .exact import FactoredRisk, QuadraticForms, sharpe_ratio
from .market import PopulationMoments, population_moments
from .replica import annealed_risk, cost_only_risk, quenched_risk, sharpe_curve, sharpe_geometry
from .scenario import (
    ScenarioConfig,
    analytic_moments,
    generate_population,
    generate_returns,
    trial_rng,
    wishart,
)

log = logging.getLogger(__name__)

MomentsMode = Literal["empirical", "analytic"]
SIGMA_BAND = 3.0
MAX_FAILED_FRACTION = 0.10
FEASIBILITY_RTOL = 1e-8


@dataclass(frozen=True)
class TrialResult:
    trial_index: int
    moments: PopulationMoments
    forms: QuadraticForms
    per_return_point: tuple[tuple[float, float, float], ...]  # (R, eps_exact, S_exact)


@dataclass(frozen=True)
class AggregateRow:
    R: float
    mean_epsilon: float
    stderr_epsilon: float
    mean_sharpe: float
    stderr_sharpe: float
    predicted_epsilon: float
    predicted_sharpe: float


@dataclass(frozen=True)
class AggregateResult:
    rows: tuple[AggregateRow, ...]
    n_trials: int
    n_failed: int
    alpha: float
    cost_coefficient: float
    moments: PopulationMoments  # moments the predictions were computed from
    vertex_line: float  # predicted eps(R_min)
    sharpe_line: float  # predicted S(R*)
    r0: float
    r_star: float
    trials: tuple[TrialResult, ...] = field(default=(), repr=False, compare=False)

    @property
    def n_succeeded(self) -> int:
        return self.n_trials - self.n_failed


@dataclass(frozen=True)
class ComparisonRow:
    R: float
    deviation_epsilon: float
    deviation_sharpe: float
    deviation_sigma: float
    passed: bool


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple[ComparisonRow, ...]
    verdict: str
    kappa_hat: float
    kappa_theory: float
    vertex_R: float

    @property
    def flagged(self) -> list[float]:
        return [row.R for row in self.rows if not row.passed]


def run_trial(cfg: ScenarioConfig, trial_index: int) -> TrialResult:
    rng = trial_rng(cfg.master_seed, trial_index)
    try:
        pop = generate_population(cfg, rng)
        X = generate_returns(pop, cfg.n_periods, rng)
        J = wishart(X)
        factored = FactoredRisk(J, pop)
        C = cfg.cost_coefficient
        points = []
        for R in cfg.return_grid:
            sol = factored.solve(C, R)
            _check_feasible(sol.achieved_cost, C, "cost")
            _check_feasible(sol.achieved_return, R, "return")
            points.append((R, sol.risk_per_asset, sharpe_ratio(R, C, sol.risk_per_asset)))
    except (SingularMatrixError, CollinearConstraintsError, NonPositiveRiskError) as exc:
        raise TrialError(trial_index, exc) from exc
    return TrialResult(trial_index, population_moments(pop), factored.forms, tuple(points))


def _check_feasible(achieved: float, target: float, label: str) -> None:
    if abs(achieved - target) > FEASIBILITY_RTOL * max(1.0, abs(target)):
        warnings.warn(
            f"{label} constraint violated: achieved {achieved!r}, target {target!r}",
            NumericalConditioningWarning,
            stacklevel=3,
        )


def _run_trial_safe(cfg: ScenarioConfig, trial_index: int):
    # errors are returned as strings so nothing unpicklable crosses process boundaries
    try:
        return trial_index, run_trial(cfg, trial_index), None
    except TrialError as exc:
        return trial_index, None, str(exc)


def run_trials(cfg: ScenarioConfig, workers: int = 1) -> tuple[list[TrialResult], list[str]]:
    indices = range(cfg.n_trials)
    if workers <= 1:
        outcomes = [_run_trial_safe(cfg, i) for i in indices]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_trial_safe, [cfg] * cfg.n_trials, indices))
    outcomes.sort(key=lambda o: o[0])
    results = [res for _, res, _ in outcomes if res is not None]
    errors = [err for _, _, err in outcomes if err is not None]
    for err in errors:
        log.warning("excluded %s", err)
    return results, errors


def mean_moments(trials: Sequence[TrialResult]) -> PopulationMoments:
    ms = np.array([[t.moments.m_cc, t.moments.m_rc, t.moments.m_rr, t.moments.mean_log_v] for t in trials])
    m_cc, m_rc, m_rr, mlv = (float(x) for x in ms.mean(axis=0))
    return PopulationMoments(m_cc, m_rc, m_rr, mlv)


def aggregate(
    cfg: ScenarioConfig,
    trials: Sequence[TrialResult],
    n_failed: int = 0,
    moments_mode: MomentsMode = "empirical",
) -> AggregateResult:
    """Fold trial results (in trial-index order) into per-point means with their predictions."""
    trials = sorted(trials, key=lambda t: t.trial_index)
    n = len(trials)
    if n < 2:
        raise ExperimentFailedError(f"need at least two successful trials to estimate stderr (got {n})")
    if moments_mode == "empirical":
        m = mean_moments(trials)
    elif moments_mode == "analytic":
        m = analytic_moments(cfg.pareto_r, cfg.pareto_h)
    else:
        raise ValueError(f"unknown moments mode {moments_mode!r}")

    alpha, C = cfg.alpha, cfg.cost_coefficient
    eps = np.array([[pt[1] for pt in t.per_return_point] for t in trials])
    sharpe = np.array([[pt[2] for pt in t.per_return_point] for t in trials])
    root_n = math.sqrt(n)
    rows = []
    for j, R in enumerate(cfg.return_grid):
        pred = quenched_risk(m, alpha, C, R)
        rows.append(
            AggregateRow(
                R=R,
                mean_epsilon=float(eps[:, j].mean()),
                stderr_epsilon=float(eps[:, j].std(ddof=1)) / root_n,
                mean_sharpe=float(sharpe[:, j].mean()),
                stderr_sharpe=float(sharpe[:, j].std(ddof=1)) / root_n,
                predicted_epsilon=pred.risk_per_asset,
                predicted_sharpe=sharpe_ratio(R, C, pred.risk_per_asset),
            )
        )
    r0 = pred.coefficients.r0
    try:
        r_star = sharpe_geometry(m, alpha, C).argmax
        sharpe_line = sharpe_curve(m, alpha, C, r_star)
    except VertexAtOriginError:
        r_star, sharpe_line = math.nan, math.nan
    return AggregateResult(
        rows=tuple(rows),
        n_trials=n + n_failed,
        n_failed=n_failed,
        alpha=alpha,
        cost_coefficient=C,
        moments=m,
        vertex_line=cost_only_risk(m, alpha, C),
        sharpe_line=sharpe_line,
        r0=r0,
        r_star=r_star,
        trials=tuple(trials),
    )


def run_experiment(
    cfg: ScenarioConfig,
    workers: int = 1,
    moments_mode: MomentsMode = "empirical",
) -> AggregateResult:
    if cfg.n_trials < 2:
        raise InvalidSpecError("an experiment needs n_trials >= 2 (stderr is undefined for one trial)")
    trials, errors = run_trials(cfg, workers)
    if len(errors) > MAX_FAILED_FRACTION * cfg.n_trials:
        raise ExperimentFailedError(
            f"{len(errors)} of {cfg.n_trials} trials failed; first: {errors[0]}"
        )
    return aggregate(cfg, trials, n_failed=len(errors), moments_mode=moments_mode)


def _deviation(mean: float, predicted: float, stderr: float) -> float:
    diff = mean - predicted
    if stderr > 0:
        return diff / stderr
    if abs(diff) <= 1e-12 * max(1.0, abs(predicted)):
        return 0.0
    return math.copysign(math.inf, diff)


def compare_report(agg: AggregateResult, band: float = SIGMA_BAND) -> ComparisonReport:
    """Deviation of every grid point in stderr units and an overall verdict.

    ``deviation_sigma`` is the larger-magnitude one of the risk and Sharpe
    deviations, sign kept.
    """
    rows = []
    for row in agg.rows:
        d_eps = _deviation(row.mean_epsilon, row.predicted_epsilon, row.stderr_epsilon)
        d_s = _deviation(row.mean_sharpe, row.predicted_sharpe, row.stderr_sharpe)
        worst = d_eps if abs(d_eps) >= abs(d_s) else d_s
        rows.append(ComparisonRow(row.R, d_eps, d_s, worst, abs(worst) < band))
    verdict = "consistent" if all(r.passed for r in rows) else "inconsistent"

    grid = np.array([row.R for row in agg.rows])
    j = int(np.argmin(np.abs(grid - agg.r0)))
    vertex_R = float(grid[j])
    eps_or = annealed_risk(agg.moments, agg.alpha, agg.cost_coefficient, vertex_R)
    kappa_hat = eps_or / agg.rows[j].mean_epsilon
    return ComparisonReport(
        rows=tuple(rows),
        verdict=verdict,
        kappa_hat=kappa_hat,
        kappa_theory=agg.alpha / (agg.alpha - 1.0),
        vertex_R=vertex_R,
    )
