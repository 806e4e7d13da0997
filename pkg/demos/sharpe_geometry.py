"""
Where the Sharpe ratio peaks
============================

With the analytic moments of the reference Pareto population, trace the replica
Sharpe ratio along the return axis and confirm the right-triangle relation
between its value at the peak, at the risk minimum and far out on the axis.
"""

import numpy as np

from replica_portfolio import (
    Axis,
    analytic_moments,
    reference_setting,
    sharpe_curve,
    sharpe_geometry,
)

cfg = reference_setting()
m = analytic_moments(cfg.pareto_r, cfg.pareto_h)
C = cfg.cost_coefficient

geo = sharpe_geometry(m, cfg.alpha, C)
print(f"risk minimum at R0 = {geo.argmin_risk:.4f}, Sharpe peak at R* = {geo.argmax:.4f}")
print(f"S^2(R*) = {geo.s2_max:.6f}")
print(f"S^2(R0) + S^2(inf) = {geo.s2_at_risk_min:.6f} + {geo.s2_at_risk_max:.6f}")

R = np.linspace(1.0, 6.0, 501)
S = np.array([sharpe_curve(m, cfg.alpha, C, r) for r in R])
print(f"grid maximum at R = {R[S.argmax()]:.2f}, S = {S.max():.6f}")
# far out the curve flattens towards sqrt(S^2(inf))
print(f"S(6.0) = {S[-1]:.4f}  vs limit {np.sqrt(geo.s2_at_risk_max):.4f}")

# Same construction with the return level fixed and the cost budget varying.
geo_c = sharpe_geometry(m, cfg.alpha, 2.0, Axis.BY_COST)
print(f"\ncost axis at R=2: C0 = {geo_c.argmin_risk:.4f}, C* = {geo_c.argmax:.4f}, "
      f"residual {geo_c.pythagorean_residual:.1e}")
