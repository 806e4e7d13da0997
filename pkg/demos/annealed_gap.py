"""
Cost of ignoring the sample noise
=================================

The annealed portfolio minimises the expected risk, so it never sees the
particular return history. Compare the risk it is promised with the quenched
optimum for the realised data.
"""

from replica_portfolio import (
    ProblemSpec,
    annealed_comparison,
    annealed_portfolio,
    generate_population,
    population_moments,
    reference_setting,
    trial_rng,
)

cfg = reference_setting(n_assets=2000, n_periods=4000)
pop = generate_population(cfg, trial_rng(7, 0))
m = population_moments(pop)

for alpha in (1.25, 2.0, 4.0, 10.0):
    spec = ProblemSpec(1.0, 1.8, cfg.n_assets, int(alpha * cfg.n_assets))
    w_or = annealed_portfolio(pop, spec)
    cmp_ = annealed_comparison(m, spec.alpha, 1.0, 1.8)
    print(
        f"alpha={alpha:5.2f}  annealed risk {w_or.risk_per_asset:.4f} "
        f"(formula {cmp_.eps_or:.4f})  kappa = {cmp_.kappa:.3f}"
    )

# kappa = alpha/(alpha-1): the gap closes only when the history is much longer
# than the number of assets.
