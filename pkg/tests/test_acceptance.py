"""Acceptance suite: one [PASS]/[FAIL] line per criterion, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline; they are
also collected in the terminal summary.
"""

import math
from pathlib import Path

import numpy as np
import pytest
from scipy import integrate

from replica_portfolio import (
    AssetPopulation,
    Axis,
    ParetoSpec,
    PopulationMoments,
    ProblemSpec,
    annealed_comparison,
    compare_report,
    cost_only_risk,
    generate_population,
    generate_returns,
    optimal_portfolio,
    population_moments,
    quadratic_forms,
    quenched_risk,
    quenched_risk_by_cost,
    reference_setting,
    run_experiment,
    sample_bounded_pareto,
    sharpe_geometry,
    sharpe_ratio,
    trial_rng,
    wishart,
)
from replica_portfolio.cli import main, parse_config
from conftest import kkt_oracle

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def rel_err(x, ref):
    return abs(x - ref) / abs(ref)


def random_moments(rng):
    m_cc, m_rr = rng.uniform(0.05, 5.0, 2)
    rho = rng.uniform(-0.95, 0.95)
    return PopulationMoments(m_cc=m_cc, m_rc=rho * math.sqrt(m_cc * m_rr), m_rr=m_rr)


# 1 -----------------------------------------------------------------------------------------

def test_criterion_1_hand_solvable(criterion):
    pop = AssetPopulation(expected_return=[1.0, 2.0], unit_cost=[1.0, 1.0], variance=[1.0, 1.0])
    sol = optimal_portfolio(np.eye(2), pop, ProblemSpec(1.0, 1.5, 2, 6))
    errs = [
        abs(sol.k_star - 1.0),
        abs(sol.theta_star - 0.0),
        float(np.max(np.abs(sol.portfolio - 1.0))),
        abs(sol.risk_per_asset - 0.5),
    ]
    ok = max(errs) <= 1e-12
    criterion("1 hand-solvable exact case", ok, f"max abs error {max(errs):.2e} (tol 1e-12)")
    assert ok


# 2 -----------------------------------------------------------------------------------------

def test_criterion_2_kkt_oracle(criterion):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for inst in range(50):
        n = int(rng.integers(5, 51))
        p = 3 * n
        cfg = reference_setting(n_assets=n, n_periods=p)
        trng = trial_rng(2024, inst)
        pop = generate_population(cfg, trng)
        J = wishart(generate_returns(pop, p, trng)).entries
        C, R = 1.0, float(rng.uniform(1.0, 2.2))
        sol = optimal_portfolio(J, pop, ProblemSpec(C, R, n, p))
        A = np.vstack([pop.unit_cost, pop.expected_return])
        w, (k, theta) = kkt_oracle(J, A, np.array([n * C, n * R]))
        eps = 0.5 * w @ J @ w / n
        errs = [
            np.linalg.norm(sol.portfolio - w) / np.linalg.norm(w),
            rel_err(sol.risk_per_asset, eps),
            rel_err(sol.k_star, k),
            rel_err(sol.theta_star, theta),
        ]
        worst = max(worst, *errs)
    ok = worst <= 1e-8
    criterion("2 dense KKT oracle, 50 instances", ok, f"worst relative error {worst:.2e} (tol 1e-8)")
    assert ok


# 3 -----------------------------------------------------------------------------------------

def test_criterion_3_moment_limits(criterion):
    cfg = reference_setting(n_assets=1000, n_periods=2000)
    rng = trial_rng(cfg.master_seed, 0)
    pop = generate_population(cfg, rng)
    J = wishart(generate_returns(pop, cfg.n_periods, rng)).entries
    forms = quadratic_forms(J, pop)
    m = population_moments(pop)
    s = cfg.alpha - 1.0
    pairs = {
        "cc": (forms.a / cfg.n_assets, m.m_cc / s),
        "rc": (forms.b / cfg.n_assets, m.m_rc / s),
        "rr": (forms.d / cfg.n_assets, m.m_rr / s),
    }
    devs = {k: x / y - 1.0 for k, (x, y) in pairs.items()}
    ok = all(abs(d) <= 0.05 for d in devs.values())
    detail = ", ".join(f"{k} {d:+.2%}" for k, d in devs.items()) + " (tol 5%)"
    criterion("3 quadratic forms at N=1000 vs moment limits", ok, detail)
    assert ok


# 4 -----------------------------------------------------------------------------------------

@pytest.fixture(scope="module")
def desk_run():
    cfg = parse_config(CONFIGS / "desk.cfg")
    agg = run_experiment(cfg, workers=4)
    return cfg, agg, compare_report(agg)


def test_criterion_4a_risk_band(desk_run, criterion):
    _, agg, _ = desk_run
    dev = [(r.mean_epsilon - r.predicted_epsilon) / r.stderr_epsilon for r in agg.rows]
    worst = max(dev, key=abs)
    ok = all(abs(d) <= 3 for d in dev)
    criterion("4a mean risk within 3 stderr of replica curve", ok, f"worst deviation {worst:+.2f} sigma")
    assert ok


def test_criterion_4b_sharpe_band(desk_run, criterion):
    _, agg, _ = desk_run
    dev = [(r.mean_sharpe - r.predicted_sharpe) / r.stderr_sharpe for r in agg.rows if r.stderr_sharpe > 0]
    worst = max(dev, key=abs)
    # at R = C the Sharpe ratio is identically zero in every trial and in theory
    zero_ok = all(r.mean_sharpe == r.predicted_sharpe == 0.0 for r in agg.rows if r.stderr_sharpe == 0)
    ok = zero_ok and all(abs(d) <= 3 for d in dev)
    criterion("4b mean Sharpe within 3 stderr of replica curve", ok, f"worst deviation {worst:+.2f} sigma")
    assert ok


def test_criterion_4c_risk_vertex(desk_run, criterion):
    cfg, agg, _ = desk_run
    step = cfg.return_grid[1] - cfg.return_grid[0]
    vertex = agg.rows[int(np.argmin([r.mean_epsilon for r in agg.rows]))].R
    ok = abs(vertex - agg.r0) <= step + 1e-12
    criterion("4c empirical risk vertex within one step of R0", ok, f"vertex {vertex:.2f}, R0 {agg.r0:.4f}")
    assert ok


def test_criterion_4d_sharpe_maximum(desk_run, criterion):
    cfg, agg, _ = desk_run
    step = cfg.return_grid[1] - cfg.return_grid[0]
    peak = agg.rows[int(np.argmax([r.mean_sharpe for r in agg.rows]))].R
    ok = abs(peak - agg.r_star) <= step + 1e-12
    criterion(
        "4d empirical Sharpe maximum within one step of R*",
        ok,
        f"grid argmax {peak:.2f}, R* {agg.r_star:.4f}, grid ends at {cfg.return_grid[-1]:.2f}",
    )
    assert ok


def test_criterion_4_runtime_and_verdict(desk_run, criterion):
    _, agg, rep = desk_run
    ok = rep.verdict == "consistent" and agg.n_failed == 0
    criterion("4 desk-scale verdict", ok, f"verdict {rep.verdict}, kappa_hat {rep.kappa_hat:.3f}")
    assert ok


# 5 -----------------------------------------------------------------------------------------

def test_criterion_5_pythagorean(criterion):
    rng = np.random.default_rng(5)
    worst = {Axis.BY_RETURN: 0.0, Axis.BY_COST: 0.0}
    for _ in range(1000):
        m = random_moments(rng)
        alpha = float(rng.uniform(1.05, 10.0))
        fixed = float(rng.uniform(0.2, 3.0) * rng.choice([-1, 1]))
        for axis in worst:
            geo = sharpe_geometry(m, alpha, fixed, axis)
            # S^2 along the curve, evaluated independently of the geometry's closed forms
            if axis is Axis.BY_RETURN:
                C = fixed

                def s2(R):
                    return sharpe_ratio(R, C, quenched_risk(m, alpha, C, R).risk_per_asset) ** 2

                spread = m.m_rr / m.m_cc - (m.m_rc / m.m_cc) ** 2
                s2_inf = m.m_cc * spread / (alpha - 1)
            else:
                R = fixed

                def s2(C):
                    return sharpe_ratio(R, C, quenched_risk_by_cost(m, alpha, C, R).risk_per_asset) ** 2

                spread = m.m_cc / m.m_rr - (m.m_rc / m.m_rr) ** 2
                s2_inf = m.m_rr * spread / (alpha - 1)
            top = s2(geo.argmax)
            resid = (top - s2(geo.argmin_risk) - s2_inf) / top
            worst[axis] = max(worst[axis], abs(resid), abs(geo.pythagorean_residual) / geo.s2_max)
    ok = all(w <= 1e-12 for w in worst.values())
    criterion(
        "5 Pythagorean identity on both axes, 1000 tuples",
        ok,
        f"worst relative residual R-axis {worst[Axis.BY_RETURN]:.2e}, C-axis {worst[Axis.BY_COST]:.2e} (tol 1e-12)",
    )
    assert ok


# 6 -----------------------------------------------------------------------------------------

def test_criterion_6_opportunity_loss(criterion):
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(1000):
        m = random_moments(rng)
        alpha = float(rng.uniform(1.05, 10.0))
        C, R = rng.uniform(-3, 3, 2)
        cmp_ = annealed_comparison(m, alpha, float(C), float(R))
        eps = quenched_risk(m, alpha, float(C), float(R)).risk_per_asset
        worst = max(worst, rel_err(cmp_.eps_or / eps, alpha / (alpha - 1)), rel_err(cmp_.kappa, alpha / (alpha - 1)))
    m = PopulationMoments(0.25, 0.375, 0.75)
    kappa2 = annealed_comparison(m, 2.0, 1.0, 1.7).kappa
    ok = worst <= 1e-12 and kappa2 == 2.0
    criterion("6 opportunity loss ratio", ok, f"worst relative error {worst:.2e} (tol 1e-12), kappa(alpha=2) = {kappa2!r}")
    assert ok


# 7 -----------------------------------------------------------------------------------------

def test_criterion_7_cost_only(criterion):
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(1000):
        m = random_moments(rng)
        alpha = float(rng.uniform(1.05, 10.0))
        C = float(rng.uniform(-3, 3))
        r0 = C * m.m_rc / m.m_cc
        worst = max(worst, rel_err(quenched_risk(m, alpha, C, r0).risk_per_asset, cost_only_risk(m, alpha, C)))
    hom_worst = 0.0
    for v in (0.3, 1.0, 4.0):
        for alpha in (1.5, 2.0, 5.0):
            pop = AssetPopulation(expected_return=rng.uniform(0.5, 2.0, 50), unit_cost=np.ones(50), variance=np.full(50, v))
            m = population_moments(pop)
            r0 = m.m_rc / m.m_cc
            eps = quenched_risk(m, alpha, 1.0, r0).risk_per_asset
            hom_worst = max(hom_worst, rel_err(eps, (alpha - 1) * v / 2))
    ok = worst <= 1e-12 and hom_worst <= 1e-12
    criterion(
        "7 cost-only reduction",
        ok,
        f"vertex vs cost-only {worst:.2e}, homogeneous (alpha-1)v/2 {hom_worst:.2e} (tol 1e-12)",
    )
    assert ok


# 8 -----------------------------------------------------------------------------------------

def test_criterion_8_sampler(criterion):
    spec = ParetoSpec(exponent=2.0, lower=1.0, upper=2.0)
    z, _ = integrate.quad(lambda x: x**-2, 1.0, 2.0, epsabs=0, epsrel=1e-13)
    mean, _ = integrate.quad(lambda x: x**-1, 1.0, 2.0, epsabs=0, epsrel=1e-13)
    target = mean / z
    x = sample_bounded_pareto(spec, np.random.default_rng(8), 10**6)
    se = x.std(ddof=1) / math.sqrt(x.size)
    dev = (x.mean() - target) / se
    inside = bool(x.min() >= 1.0 and x.max() <= 2.0)
    ok = abs(dev) <= 3 and inside and abs(target - 2 * math.log(2)) < 1e-12
    criterion("8 bounded Pareto sampler", ok, f"mean deviation {dev:+.2f} stderr, all in support: {inside}")
    assert ok


# 9 -----------------------------------------------------------------------------------------

def test_criterion_9_determinism(tmp_path, criterion):
    cfg = CONFIGS / "desk.cfg"
    outs = []
    for workers in (1, 4):
        out = tmp_path / f"w{workers}.csv"
        rc = main(["experiment", "--config", str(cfg), "--out", str(out), "--workers", str(workers), "--no-verdict-gate"])
        assert rc == 0
        outs.append(out.read_bytes())
    ok = outs[0] == outs[1]
    criterion("9 byte-identical experiment CSV, 1 vs 4 workers", ok, f"{len(outs[0])} bytes each")
    assert ok
