"""Exact quenched optimum for one realisation of the risk matrix J.

Minimises (1/2) w^T J w subject to c^T w = N C and r^T w = N R. The
three quadratic forms a = c^T J^-1 c, b = c^T J^-1 r, d = r^T J^-1 r come
from one Cholesky factorisation and two triangular solves; J^-1 is never
formed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import (
    CollinearConstraintsError,
    NonPositiveRiskError,
    NumericalConditioningWarning,
    SingularMatrixError,
)
from .market import AssetPopulation, ProblemSpec
from .scenario import WishartMatrix

COLLINEAR_RTOL = 1e-10
RISK_CHECK_RTOL = 1e-8
SYMMETRY_RTOL = 1e-10


@dataclass(frozen=True)
class QuadraticForms:
    a: float  # c^T J^-1 c
    b: float  # c^T J^-1 r
    d: float  # r^T J^-1 r

    @property
    def gram_determinant(self) -> float:
        return self.a * self.d - self.b * self.b


@dataclass(frozen=True)
class OptimalSolution:
    portfolio: np.ndarray
    k_star: float
    theta_star: float
    risk_per_asset: float
    achieved_cost: float
    achieved_return: float


class FactoredRisk:
    """Cholesky factor of J together with the two solves J y_c = c, J y_r = r."""

    def __init__(self, J, pop: AssetPopulation):
        J = np.asarray(getattr(J, "entries", J), dtype=float)
        if J.shape != (pop.n_assets, pop.n_assets):
            raise ValueError(f"J has shape {J.shape}, expected {(pop.n_assets,) * 2}")
        try:
            self._cho = linalg.cho_factor(J, lower=True, check_finite=True)
        except linalg.LinAlgError as exc:
            raise SingularMatrixError(f"risk matrix is not positive definite: {exc}") from exc
        self.J = J
        self.pop = pop
        c, r = pop.unit_cost, pop.expected_return
        self.y_c = linalg.cho_solve(self._cho, c)
        self.y_r = linalg.cho_solve(self._cho, r)
        b = float(c @ self.y_r)
        b_alt = float(r @ self.y_c)
        if abs(b - b_alt) > SYMMETRY_RTOL * max(abs(b), abs(b_alt), np.finfo(float).tiny):
            warnings.warn(
                f"c^T J^-1 r and r^T J^-1 c disagree ({b!r} vs {b_alt!r})",
                NumericalConditioningWarning,
                stacklevel=2,
            )
        self.forms = QuadraticForms(a=float(c @ self.y_c), b=b, d=float(r @ self.y_r))

    @property
    def n_assets(self) -> int:
        return self.pop.n_assets

    def solve(self, C: float, R: float) -> OptimalSolution:
        n = self.n_assets
        k_star, theta_star = lagrange_multipliers(self.forms, n, C, R)
        w = theta_star * self.y_r + k_star * self.y_c
        eps = risk_from_forms(self.forms, n, C, R)
        direct = portfolio_risk(self.J, w)
        if abs(eps - direct) > RISK_CHECK_RTOL * max(abs(eps), abs(direct), 1e-300):
            warnings.warn(
                f"risk from quadratic forms ({eps!r}) and from w^T J w ({direct!r}) disagree",
                NumericalConditioningWarning,
                stacklevel=2,
            )
        w.setflags(write=False)
        return OptimalSolution(
            portfolio=w,
            k_star=k_star,
            theta_star=theta_star,
            risk_per_asset=eps,
            achieved_cost=float(self.pop.unit_cost @ w) / n,
            achieved_return=float(self.pop.expected_return @ w) / n,
        )


def quadratic_forms(J, pop: AssetPopulation) -> QuadraticForms:
    return FactoredRisk(J, pop).forms


def _check_collinear(forms: QuadraticForms) -> float:
    D = forms.gram_determinant
    if not D > COLLINEAR_RTOL * forms.a * forms.d:
        raise CollinearConstraintsError(
            f"cost and return constraints are collinear (D/(a d) = {D / (forms.a * forms.d):.3e})"
        )
    return D


def lagrange_multipliers(forms: QuadraticForms, n_assets: int, C: float, R: float) -> tuple[float, float]:
    """Return (k*, theta*) for the cost and return constraints."""
    D = _check_collinear(forms)
    a, b, d = forms.a, forms.b, forms.d
    k_star = n_assets * (C * d - R * b) / D
    theta_star = n_assets * (R * a - C * b) / D
    return k_star, theta_star


def risk_from_forms(forms: QuadraticForms, n_assets: int, C: float, R: float) -> float:
    """Minimal risk per asset, (N/2)(R^2 a - 2RC b + C^2 d)/(a d - b^2)."""
    D = _check_collinear(forms)
    a, b, d = forms.a, forms.b, forms.d
    return 0.5 * n_assets * (R * R * a - 2.0 * R * C * b + C * C * d) / D


def risk_from_forms_completed_square(forms: QuadraticForms, n_assets: int, C: float, R: float) -> float:
    """Same quantity as :func:`risk_from_forms`, written around the vertex R = C b/a."""
    _check_collinear(forms)
    a, b, d = forms.a, forms.b, forms.d
    ratio = b / a
    spread = d / a - ratio * ratio
    return n_assets / (2.0 * a) * (C * C + (R - C * ratio) ** 2 / spread)


def optimal_portfolio(J, pop: AssetPopulation, spec: ProblemSpec) -> OptimalSolution:
    if spec.n_assets != pop.n_assets:
        raise ValueError(f"spec has N={spec.n_assets} but population has N={pop.n_assets}")
    return FactoredRisk(J, pop).solve(spec.cost_coefficient, spec.return_coefficient)


def portfolio_risk(J, w) -> float:
    """Risk per asset (1/2N) w^T J w."""
    J = np.asarray(getattr(J, "entries", J), dtype=float)
    w = np.asarray(w, dtype=float)
    if J.shape != (w.size, w.size):
        raise ValueError(f"J has shape {J.shape} but w has length {w.size}")
    return 0.5 * float(w @ J @ w) / w.size


def sharpe_ratio(R: float, C: float, eps: float) -> float:
    if not eps > 0:
        raise NonPositiveRiskError(f"Sharpe ratio needs positive risk (got {eps!r})")
    return (R - C) / math.sqrt(2.0 * eps)


__all__ = [
    "FactoredRisk",
    "OptimalSolution",
    "QuadraticForms",
    "WishartMatrix",
    "lagrange_multipliers",
    "optimal_portfolio",
    "portfolio_risk",
    "quadratic_forms",
    "risk_from_forms",
    "risk_from_forms_completed_square",
    "sharpe_ratio",
]
