"""Command-line front end: ``predict``, ``solve`` and ``experiment``.

Configuration is a flat ``key = value`` file with ``#`` comments::

    n_assets = 1000
    n_periods = 2000
    cost_coefficient = 1
    return_grid = 1.0, 1.1, 1.2
    pareto_r_exponent = 2
    pareto_r_lower = 1
    pareto_r_upper = 2
    pareto_h_exponent = 2
    pareto_h_lower = 1
    pareto_h_upper = 2
    n_trials = 100
    master_seed = 1234

Exit codes: 0 success, 1 runtime or configuration error, 2 usage error,
3 experiment finished but its verdict is "inconsistent".
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import sys
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ConfigError, ReplicaPortfolioError
from .exact import FactoredRisk, portfolio_risk, sharpe_ratio
from .experiment import compare_report, run_experiment
from .market import population_moments
from .replica import annealed_comparison, quenched_risk, sharpe_geometry
from .scenario import (
    ParetoSpec,
    ScenarioConfig,
    analytic_moments,
    generate_population,
    generate_returns,
    trial_rng,
    wishart,
)

log = logging.getLogger(__name__)

EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_INCONSISTENT = 0, 1, 2, 3

EXPERIMENT_COLUMNS = (
    "R",
    "mean_epsilon",
    "stderr_epsilon",
    "mean_sharpe",
    "stderr_sharpe",
    "predicted_epsilon",
    "predicted_sharpe",
    "deviation_sigma",
)
PREDICT_COLUMNS = ("R", "epsilon_replica", "sharpe_replica", "epsilon_annealed", "kappa")
SOLVE_COLUMNS = (
    "R",
    "epsilon",
    "sharpe",
    "k_star",
    "theta_star",
    "achieved_cost",
    "achieved_return",
    "epsilon_direct",
)

_INT_KEYS = ("n_assets", "n_periods", "n_trials", "master_seed")
_FLOAT_KEYS = (
    "cost_coefficient",
    "pareto_r_exponent",
    "pareto_r_lower",
    "pareto_r_upper",
    "pareto_h_exponent",
    "pareto_h_lower",
    "pareto_h_upper",
)
REQUIRED_KEYS = _INT_KEYS[:2] + ("cost_coefficient", "return_grid") + _FLOAT_KEYS[1:] + _INT_KEYS[2:]


def fmt(x: float) -> str:
    """17 significant digits, locale independent."""
    return format(float(x), ".17g")


def parse_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc.strerror}") from exc

    values: dict[str, object] = {}
    lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{path}:{lineno}"
        if "=" not in line:
            raise ConfigError(f"{where}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in REQUIRED_KEYS:
            raise ConfigError(f"{where}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{where}: duplicate key {key!r} (first set on line {lines[key]})")
        try:
            if key in _INT_KEYS:
                values[key] = int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            else:
                values[key] = tuple(float(v) for v in value.split(",") if v.strip())
        except ValueError:
            raise ConfigError(f"{where}: cannot parse value {value!r} for {key!r}") from None
        lines[key] = lineno

    missing = [k for k in REQUIRED_KEYS if k not in values]
    if missing:
        raise ConfigError(f"{path}: missing required key(s): {', '.join(missing)}")

    def pareto(prefix: str) -> ParetoSpec:
        try:
            return ParetoSpec(
                values[f"{prefix}_exponent"], values[f"{prefix}_lower"], values[f"{prefix}_upper"]
            )
        except ReplicaPortfolioError as exc:
            raise ConfigError(f"{path}:{lines[prefix + '_exponent']}: {prefix}: {exc}") from exc

    try:
        return ScenarioConfig(
            n_assets=values["n_assets"],
            n_periods=values["n_periods"],
            cost_coefficient=values["cost_coefficient"],
            return_grid=values["return_grid"],
            pareto_r=pareto("pareto_r"),
            pareto_h=pareto("pareto_h"),
            n_trials=values["n_trials"],
            master_seed=values["master_seed"],
        )
    except ConfigError:
        raise
    except ReplicaPortfolioError as exc:
        raise ConfigError(f"{path}: invalid configuration: {exc}") from exc


def _write_csv(path, header: Iterable[tuple[str, float]], columns, rows, trailer=()) -> None:
    # '#' lines carry scalar metadata; readers can skip them (e.g. pandas comment='#')
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for key, value in header:
            fh.write(f"# {key},{fmt(value)}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt(x) for x in row])
        for key, value in trailer:
            fh.write(f"# {key},{value if isinstance(value, str) else fmt(value)}\n")


def _draw(cfg: ScenarioConfig, trial_index: int = 0):
    rng = trial_rng(cfg.master_seed, trial_index)
    pop = generate_population(cfg, rng)
    return pop, rng


def prediction_table(m, alpha: float, C: float, grid: Sequence[float]):
    """Header pairs and rows of the ``predict`` CSV for moments ``m``."""
    geo = sharpe_geometry(m, alpha, C)
    coef = quenched_risk(m, alpha, C, grid[0]).coefficients
    rows = []
    for R in grid:
        eps = quenched_risk(m, alpha, C, R).risk_per_asset
        ann = annealed_comparison(m, alpha, C, R)
        rows.append((R, eps, sharpe_ratio(R, C, eps), ann.eps_or, ann.kappa))
    header = [
        ("alpha", alpha),
        ("C", C),
        ("m_cc", m.m_cc),
        ("m_rc", m.m_rc),
        ("m_rr", m.m_rr),
        ("R0", coef.r0),
        ("V", coef.v_big),
        ("R_star", geo.argmax),
        ("S2_max", geo.s2_max),
        ("S2_min_point", geo.s2_at_risk_min),
        ("S2_max_point", geo.s2_at_risk_max),
        ("pythagorean_residual", geo.pythagorean_residual),
    ]
    return header, rows


def cmd_predict(cfg: ScenarioConfig, out, moments_mode: str = "empirical") -> int:
    if moments_mode == "analytic":
        m = analytic_moments(cfg.pareto_r, cfg.pareto_h)
    else:
        pop, _ = _draw(cfg)
        m = population_moments(pop)
    header, rows = prediction_table(m, cfg.alpha, cfg.cost_coefficient, cfg.return_grid)
    _write_csv(out, header, PREDICT_COLUMNS, rows)
    return EXIT_OK


def portfolio_path(out) -> Path:
    out = Path(out)
    return out.with_name(out.stem + "_portfolio" + (out.suffix or ".csv"))


def cmd_solve(cfg: ScenarioConfig, out, portfolio_out=None) -> int:
    pop, rng = _draw(cfg)
    J = wishart(generate_returns(pop, cfg.n_periods, rng))
    factored = FactoredRisk(J, pop)
    C = cfg.cost_coefficient
    rows, weights = [], []
    for R in cfg.return_grid:
        sol = factored.solve(C, R)
        rows.append(
            (
                R,
                sol.risk_per_asset,
                sharpe_ratio(R, C, sol.risk_per_asset),
                sol.k_star,
                sol.theta_star,
                sol.achieved_cost,
                sol.achieved_return,
                portfolio_risk(J, sol.portfolio),
            )
        )
        weights.append((R, sol.portfolio))
    forms = factored.forms
    header = [
        ("n_assets", cfg.n_assets),
        ("n_periods", cfg.n_periods),
        ("master_seed", cfg.master_seed),
        ("C", C),
        ("cTJinv_c", forms.a),
        ("cTJinv_r", forms.b),
        ("rTJinv_r", forms.d),
    ]
    _write_csv(out, header, SOLVE_COLUMNS, rows)
    portfolio_out = Path(portfolio_out) if portfolio_out else portfolio_path(out)
    with open(portfolio_out, "w", newline="", encoding="utf-8") as fh:
        fh.write("index,R,w\n")
        for R, w in weights:
            for i, wi in enumerate(w):
                fh.write(f"{i},{fmt(R)},{fmt(wi)}\n")
    return EXIT_OK


def cmd_experiment(
    cfg: ScenarioConfig, out, moments_mode: str = "empirical", workers: int = 1, verdict_gate: bool = True
) -> int:
    agg = run_experiment(cfg, workers=workers, moments_mode=moments_mode)
    report = compare_report(agg)
    rows = [
        (
            r.R,
            r.mean_epsilon,
            r.stderr_epsilon,
            r.mean_sharpe,
            r.stderr_sharpe,
            r.predicted_epsilon,
            r.predicted_sharpe,
            c.deviation_sigma,
        )
        for r, c in zip(agg.rows, report.rows)
    ]
    header = [
        ("alpha", agg.alpha),
        ("C", agg.cost_coefficient),
        ("n_trials", agg.n_trials),
        ("n_failed", agg.n_failed),
        ("R0", agg.r0),
        ("R_star", agg.r_star),
    ]
    trailer = [
        ("vertex_epsilon", agg.vertex_line),
        ("max_sharpe", agg.sharpe_line),
        ("kappa_hat", report.kappa_hat),
        ("kappa_theory", report.kappa_theory),
        ("verdict", report.verdict),
    ]
    _write_csv(out, header, EXPERIMENT_COLUMNS, rows, trailer)
    if report.verdict != "consistent":
        log.warning("inconsistent grid points: %s", report.flagged)
        if verdict_gate:
            return EXIT_INCONSISTENT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="replica-portfolio",
        description="Quenched risk minimisation under cost and return constraints.",
    )
    parser.add_argument("command", choices=("predict", "solve", "experiment"))
    parser.add_argument("--config", required=True, type=Path)
    parser.add_argument("--out", required=True, type=Path)
    parser.add_argument("--seed", type=int, default=None, help="override master_seed from the config")
    parser.add_argument("--moments", choices=("empirical", "analytic"), default="empirical")
    parser.add_argument("--no-verdict-gate", action="store_true")
    parser.add_argument("--workers", type=int, default=1, help="processes for experiment trials")
    parser.add_argument("--portfolio-out", type=Path, default=None, help="solve: portfolio file path")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config)
        if args.seed is not None:
            cfg = dataclasses.replace(cfg, master_seed=args.seed)
        if args.command == "predict":
            return cmd_predict(cfg, args.out, args.moments)
        if args.command == "solve":
            return cmd_solve(cfg, args.out, args.portfolio_out)
        return cmd_experiment(
            cfg, args.out, args.moments, workers=args.workers, verdict_gate=not args.no_verdict_gate
        )
    except ReplicaPortfolioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
