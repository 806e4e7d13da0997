"""Quenched investment-risk minimisation under cost and return constraints.

Exact optima for sampled Wishart risk matrices, replica-symmetric closed
forms for the same quantities, and a Monte Carlo harness comparing them.
"""

from .errors import *  # noqa: F401,F403
from .exact import (
    FactoredRisk,
    OptimalSolution,
    QuadraticForms,
    optimal_portfolio,
    portfolio_risk,
    quadratic_forms,
    risk_from_forms,
    sharpe_ratio,
)
from .experiment import (
    AggregateResult,
    TrialResult,
    aggregate,
    compare_report,
    run_experiment,
    run_trial,
)
from .market import (
    AssetPopulation,
    DerivedCoefficients,
    PopulationMoments,
    ProblemSpec,
    derived_coefficients,
    population_moments,
)
from .replica import (
    AnnealedComparison,
    Axis,
    OrderParameters,
    ReplicaPrediction,
    SharpeGeometry,
    annealed_comparison,
    annealed_portfolio,
    annealed_risk,
    cost_only_risk,
    moment_limits,
    order_parameters,
    quenched_risk,
    quenched_risk_by_cost,
    sharpe_curve,
    sharpe_geometry,
)
from .scenario import (
    ParetoSpec,
    ReturnsMatrix,
    ScenarioConfig,
    WishartMatrix,
    analytic_moments,
    analytic_pareto_mean,
    generate_population,
    generate_returns,
    reference_setting,
    sample_bounded_pareto,
    trial_rng,
    wishart,
)

__version__ = "0.1.0"
