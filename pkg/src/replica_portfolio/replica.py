"""Closed-form replica-symmetric predictions.

All functions take :class:`PopulationMoments` and the period ratio
``alpha = p/N > 1``. The central result is the minimal risk per asset

    eps = (alpha - 1) / (2 m_cc) * (C^2 + (R - R0)^2 / V)
        = (alpha - 1) / 2 * Q,
    Q   = (R^2 m_cc - 2 R C m_rc + C^2 m_rr) / (m_cc m_rr - m_rc^2),

a parabola in R with vertex R0 = C m_rc / m_cc, or equivalently a parabola
in C with vertex C0 = R m_rc / m_rr.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import AlphaOutOfRangeError, CollinearConstraintsError, VertexAtOriginError
from .exact import OptimalSolution, sharpe_ratio
from .market import (
    AssetPopulation,
    DerivedCoefficients,
    PopulationMoments,
    ProblemSpec,
    check_cost_spread,
    check_return_spread,
    derived_coefficients,
    population_moments,
)

VERTEX_ATOL = 1e-12


class Axis(str, enum.Enum):
    BY_RETURN = "by_return"
    BY_COST = "by_cost"


@dataclass(frozen=True)
class ReplicaPrediction:
    risk_per_asset: float
    coefficients: DerivedCoefficients
    alpha: float
    axis: Axis


@dataclass(frozen=True)
class OrderParameters:
    """Replica-symmetric saddle point at inverse temperature ``beta``."""

    chi_s: float
    q_s: float
    chi_tilde_s: float
    q_tilde_s: float
    theta: float
    k: float
    beta: float


@dataclass(frozen=True)
class SharpeGeometry:
    """Sharpe-ratio extrema along one axis.

    ``argmax`` is R* (or C*). The risk is minimised at R0 (C0) and maximised
    at R -> +inf (C -> -inf); ``s2_at_risk_max`` is the finite limit of S^2
    there, and ``argmin_risk``/``argmax_risk`` carry the locations.
    """

    argmax: float
    s2_max: float
    s2_at_risk_min: float
    s2_at_risk_max: float
    pythagorean_residual: float
    argmin_risk: float
    argmax_risk: float
    axis: Axis


@dataclass(frozen=True)
class AnnealedComparison:
    eps_or: float
    kappa: float


def _check_alpha(alpha: float) -> None:
    if not alpha > 1:
        raise AlphaOutOfRangeError(f"period ratio alpha must exceed 1 (got {alpha!r})")


def _q_form(m: PopulationMoments, C: float, R: float) -> float:
    return (R * R * m.m_cc - 2.0 * R * C * m.m_rc + C * C * m.m_rr) / m.discriminant


def quenched_risk(m: PopulationMoments, alpha: float, C: float, R: float) -> ReplicaPrediction:
    _check_alpha(alpha)
    coef = derived_coefficients(m, C, R)
    eps = (alpha - 1.0) / (2.0 * m.m_cc) * (C * C + (R - coef.r0) ** 2 / coef.v_big)
    return ReplicaPrediction(eps, coef, alpha, Axis.BY_RETURN)


def quenched_risk_by_cost(m: PopulationMoments, alpha: float, C: float, R: float) -> ReplicaPrediction:
    _check_alpha(alpha)
    coef = derived_coefficients(m, C, R)
    eps = (alpha - 1.0) / (2.0 * m.m_rr) * (R * R + (C - coef.c0) ** 2 / coef.v_r)
    return ReplicaPrediction(eps, coef, alpha, Axis.BY_COST)


def cost_only_risk(m: PopulationMoments, alpha: float, C: float) -> float:
    """Minimal risk per asset when only the cost constraint is imposed."""
    _check_alpha(alpha)
    return (alpha - 1.0) * C * C / (2.0 * m.m_cc)


def order_parameters(m: PopulationMoments, alpha: float, C: float, R: float, beta: float) -> OrderParameters:
    _check_alpha(alpha)
    if not beta > 0:
        raise ValueError(f"beta must be positive (got {beta!r})")
    check_return_spread(m)
    det = m.discriminant
    Q = _q_form(m, C, R)
    scale = beta * (alpha - 1.0)
    return OrderParameters(
        chi_s=1.0 / scale,
        q_s=alpha * Q / (alpha - 1.0),
        chi_tilde_s=scale,
        q_tilde_s=beta * beta * (alpha - 1.0) * Q,
        theta=scale * (R * m.m_cc - C * m.m_rc) / det,
        k=scale * (C * m.m_rr - R * m.m_rc) / det,
        beta=beta,
    )


def thermal_energy(op: OrderParameters, alpha: float) -> float:
    """-d(phi)/d(beta) at the saddle; tends to the minimal risk as beta -> inf."""
    x = 1.0 + op.beta * op.chi_s
    return alpha * op.chi_s / (2.0 * x) + alpha * op.q_s / (2.0 * x * x)


def risk_from_order_parameters(op: OrderParameters, alpha: float) -> float:
    """beta -> inf limit of :func:`thermal_energy`: (alpha-1)^2 q_s / (2 alpha)."""
    return (alpha - 1.0) ** 2 * op.q_s / (2.0 * alpha)


def moment_limits(m: PopulationMoments, alpha: float) -> tuple[float, float, float]:
    """Large-N limits of (1/N) r^T J^-1 r, (1/N) r^T J^-1 c, (1/N) c^T J^-1 c."""
    _check_alpha(alpha)
    s = alpha - 1.0
    return m.m_rr / s, m.m_rc / s, m.m_cc / s


def sharpe_geometry(m: PopulationMoments, alpha: float, fixed: float, axis: Axis = Axis.BY_RETURN) -> SharpeGeometry:
    """Sharpe extrema along ``axis``; ``fixed`` is C for BY_RETURN and R for BY_COST."""
    _check_alpha(alpha)
    axis = Axis(axis)
    if axis is Axis.BY_RETURN:
        spread = check_return_spread(m)
        weight, ratio = m.m_cc, m.m_rc / m.m_cc
        vertex = fixed * ratio
        at_infinity = math.inf
    else:
        spread = check_cost_spread(m)
        weight, ratio = m.m_rr, m.m_rc / m.m_rr
        vertex = fixed * ratio
        at_infinity = -math.inf
    if abs(vertex - fixed) <= VERTEX_ATOL * max(1.0, abs(fixed)):
        raise VertexAtOriginError(
            f"risk vertex {vertex!r} coincides with the zero-excess point {fixed!r}"
        )
    argmax = spread * fixed * fixed / (vertex - fixed) + vertex
    scale = weight / (alpha - 1.0)
    s2_at_min = scale * (ratio - 1.0) ** 2
    s2_at_max = scale * spread
    s2_max = scale * (spread + (ratio - 1.0) ** 2)
    return SharpeGeometry(
        argmax=argmax,
        s2_max=s2_max,
        s2_at_risk_min=s2_at_min,
        s2_at_risk_max=s2_at_max,
        pythagorean_residual=s2_max - s2_at_min - s2_at_max,
        argmin_risk=vertex,
        argmax_risk=at_infinity,
        axis=axis,
    )


def sharpe_curve(m: PopulationMoments, alpha: float, C: float, R: float) -> float:
    """Replica Sharpe ratio (R - C) / sqrt(2 eps) at a single point."""
    return sharpe_ratio(R, C, quenched_risk(m, alpha, C, R).risk_per_asset)


def annealed_risk(m: PopulationMoments, alpha: float, C: float, R: float) -> float:
    """Minimal expected risk per asset, optimising E[H] instead of H."""
    _check_alpha(alpha)
    coef = derived_coefficients(m, C, R)
    return alpha / (2.0 * m.m_cc) * (C * C + (R - coef.r0) ** 2 / coef.v_big)


def annealed_comparison(m: PopulationMoments, alpha: float, C: float, R: float) -> AnnealedComparison:
    eps_or = annealed_risk(m, alpha, C, R)
    eps = quenched_risk(m, alpha, C, R).risk_per_asset
    return AnnealedComparison(eps_or=eps_or, kappa=eps_or / eps)


def annealed_portfolio(pop: AssetPopulation, spec: ProblemSpec) -> OptimalSolution:
    """Minimiser of E[H(w)] = (alpha/2) sum_i v_i w_i^2 under both constraints.

    ``risk_per_asset`` is the expected risk per asset, (alpha/2N) sum_i v_i w_i^2.
    """
    alpha = spec.alpha
    C, R = spec.cost_coefficient, spec.return_coefficient
    m = population_moments(pop)
    det = m.discriminant
    if not det > 1e-10 * m.m_cc * m.m_rr:
        raise CollinearConstraintsError("cost and return vectors are collinear for this population")
    # (1/N) sum c w = (k m_cc + theta m_rc)/alpha = C, (k m_rc + theta m_rr)/alpha = R
    k = alpha * (C * m.m_rr - R * m.m_rc) / det
    theta = alpha * (R * m.m_cc - C * m.m_rc) / det
    r, c, v = pop.expected_return, pop.unit_cost, pop.variance
    w = (k * c + theta * r) / (alpha * v)
    n = pop.n_assets
    w.setflags(write=False)
    return OptimalSolution(
        portfolio=w,
        k_star=k,
        theta_star=theta,
        risk_per_asset=0.5 * alpha * float(np.sum(v * w * w)) / n,
        achieved_cost=float(c @ w) / n,
        achieved_return=float(r @ w) / n,
    )
