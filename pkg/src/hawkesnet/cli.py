"""Command-line interface.

Subcommands: simulate, fit, eval, xval, weights, experiment, check-bounds.
All commands are deterministic given --seed; errors exit nonzero with a
machine-readable JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import io
from .bounds import check_opnorm_bound, check_pointwise_bound, \
    default_bound_params
from .experiment import ExperimentConfig, aggregate, run_experiment, \
    write_aggregate_csv, write_rows_csv
from .features import PenaltyWeights, compute_stats, constant_weights, \
    practical_weights, theoretical_weights
from .metrics import evaluate
from .model import ModelParams
from .penalty import PenaltySpec
from .simulate import ScenarioConfig, SimConfig, generate_scenario, simulate
from .solver import FitConfig, cross_validate, fit_hawkes


def _load_config_file(args) -> dict:
    if getattr(args, "config", None):
        with open(args.config) as f:
            return json.load(f)
    return {}


def _write_params(params: ModelParams, out_dir: str, support=None) -> None:
    io.ensure_dir(out_dir)
    io.write_vector(params.mu, os.path.join(out_dir, "mu.csv"))
    io.write_matrix_csv(params.A, os.path.join(out_dir, "A.csv"))
    io.write_matrix_csv(params.alpha, os.path.join(out_dir, "alpha.csv"))
    if support is not None:
        io.write_matrix_csv(support.astype(float),
                            os.path.join(out_dir, "support.csv"))


def _scenario_from_args(args, cfg: dict) -> ScenarioConfig:
    boxes = cfg.get("box_ranges")
    return ScenarioConfig(
        d=cfg.get("d", args.d),
        seed=cfg.get("seed", args.seed),
        baseline_range=tuple(cfg.get("baseline_range", (0.0, 0.1))),
        box_ranges=tuple(tuple(b) for b in boxes) if boxes else None,
        box_value_range=tuple(cfg.get("box_value_range", (0.0, 0.2))),
        target_opnorm=cfg.get("target_opnorm", 0.8),
        alpha=cfg.get("alpha", args.alpha),
    )


def cmd_simulate(args) -> int:
    cfg = _load_config_file(args)
    if args.scenario or "box_ranges" in cfg:
        sc = _scenario_from_args(args, cfg)
        params, support = generate_scenario(sc)
    else:
        d = cfg.get("d", args.d)
        mu = np.full(d, cfg.get("mu", args.mu))
        a = cfg.get("a", args.a)
        A = np.full((d, d), a / d) if a > 0 else np.zeros((d, d))
        alpha = np.full((d, d), cfg.get("alpha", args.alpha))
        params, support = ModelParams(mu=mu, A=A, alpha=alpha), A > 0
    from .model import branching_matrix, spectral_radius
    rho = spectral_radius(branching_matrix(params))
    if rho >= 1 and not args.allow_unstable:
        raise ValueError(
            f"spectral radius {rho:.3f} >= 1; pass --allow-unstable to proceed")
    sim = SimConfig(params=params, horizon_T=cfg.get("T", args.T),
                    seed=cfg.get("seed", args.seed),
                    max_events=args.max_events)
    data = simulate(sim)
    io.write_events_json(data, args.out)
    if args.params_out:
        _write_params(params, args.params_out, support)
    print(json.dumps({"total_events": data.total_events(),
                      "per_node": data.counts.tolist()}))
    return 0


def _weights_from_args(args, stats):
    if args.weighting == "theoretical":
        x = args.x if args.x is not None else float(np.log(stats.d))
        return theoretical_weights(stats, x)
    if args.weighting == "practical":
        w = practical_weights(stats, args.c1, args.c2, args.tau)
        return w
    return constant_weights(stats.d, args.c1, args.c2, args.tau)


def _fit_config_for_procedure(args, d: int) -> FitConfig:
    proc = args.procedure
    if proc == "NoPen":
        weights = PenaltyWeights(w=np.zeros(d), W=np.zeros((d, d)), tau=0.0,
                                 x=0.0, mode="constant")
        spec = PenaltySpec(weights=weights, use_l1_mu=False, use_l1_A=False,
                           use_trace=False)
        return FitConfig(penalty=spec, loss_kind=args.loss,
                         max_iter=args.max_iter)
    use_trace = proc.endswith("Nuclear")
    # weights filled in by the caller after computing stats
    spec = PenaltySpec(weights=constant_weights(d, 1.0, 1.0),
                       use_l1_mu=True, use_l1_A=True, use_trace=use_trace)
    return FitConfig(penalty=spec, loss_kind=args.loss, max_iter=args.max_iter)


def cmd_fit(args) -> int:
    from dataclasses import replace
    data = io.read_events(args.events)
    d = data.d
    alpha = io.read_matrix_csv(args.alpha_file) if args.alpha_file \
        else np.full((d, d), args.alpha)
    out_dir = io.ensure_dir(args.out_dir)
    cfg = _fit_config_for_procedure(args, d)
    if args.procedure != "NoPen":
        stats = compute_stats(data, alpha)
        weighted = args.procedure.startswith("w")
        if weighted:
            weights = practical_weights(stats, args.c1, args.c2, args.tau)
        else:
            weights = constant_weights(d, args.c1, args.c2, args.tau)
        cfg = replace(cfg, penalty=replace(cfg.penalty, weights=weights))
        io.write_vector(weights.w, os.path.join(out_dir, "weights_mu.csv"))
        io.write_matrix_csv(weights.W, os.path.join(out_dir, "weights_A.csv"))
        io.write_json({"tau": weights.tau, "mode": weights.mode},
                      os.path.join(out_dir, "weights_meta.json"))
    result = fit_hawkes(data, alpha, cfg)
    io.write_vector(result.mu, os.path.join(out_dir, "mu_hat.csv"))
    io.write_matrix_csv(result.A, os.path.join(out_dir, "A_hat.csv"))
    io.write_json(result.as_dict(), os.path.join(out_dir, "diagnostics.json"))
    print(json.dumps(result.as_dict()))
    return 0


def cmd_eval(args) -> int:
    mu_hat = io.read_vector(args.mu_hat)
    A_hat = io.read_matrix_csv(args.A_hat)
    mu_true = io.read_vector(args.mu_true)
    A_true = io.read_matrix_csv(args.A_true)
    support = io.read_matrix_csv(args.support) > 0 if args.support \
        else A_true > 0
    report = evaluate(mu_hat, A_hat, mu_true, A_true, support)
    io.write_json(report.as_dict(), args.out)
    print(json.dumps(report.as_dict()))
    return 0


def cmd_xval(args) -> int:
    data = io.read_events(args.events)
    d = data.d
    alpha = np.full((d, d), args.alpha)
    cfg = _fit_config_for_procedure(args, d)
    weighting = "practical" if args.procedure.startswith("w") else "constant"
    tau_grid = tuple(args.tau_grid) if args.procedure.endswith("Nuclear") \
        else (0.0,)
    cv = cross_validate(data, alpha, cfg, tuple(args.c1_grid),
                        tuple(args.c2_grid), tau_grid, weighting=weighting)
    out = {"best": {"c1": cv.best[0], "c2": cv.best[1], "tau": cv.best[2]},
           "scores": [{"c1": c1, "c2": c2, "tau": t, "heldout_loglik": s}
                      for c1, c2, t, s in cv.scores]}
    if args.out:
        io.write_json(out, args.out)
    print(json.dumps(out["best"]))
    return 0


def cmd_weights(args) -> int:
    data = io.read_events(args.events)
    d = data.d
    alpha = np.full((d, d), args.alpha)
    stats = compute_stats(data, alpha)
    weights = _weights_from_args(args, stats)
    out_dir = io.ensure_dir(args.out_dir)
    io.write_matrix_csv(weights.W, os.path.join(out_dir, "weights_A.csv"))
    io.write_json({"w": weights.w.tolist(), "tau": weights.tau,
                   "x": weights.x, "mode": weights.mode},
                  os.path.join(out_dir, "weights_mu.json"))
    print(json.dumps({"tau": weights.tau, "mode": weights.mode}))
    return 0


def cmd_experiment(args) -> int:
    with open(args.config) as f:
        cfg_json = json.load(f)
    sc_json = cfg_json["scenario"]
    scenario = ScenarioConfig(
        d=sc_json["d"], seed=sc_json.get("seed", cfg_json.get("seed", 0)),
        baseline_range=tuple(sc_json.get("baseline_range", (0.0, 0.1))),
        box_ranges=tuple(tuple(b) for b in sc_json["box_ranges"])
        if sc_json.get("box_ranges") else None,
        box_value_range=tuple(sc_json.get("box_value_range", (0.0, 0.2))),
        target_opnorm=sc_json.get("target_opnorm", 0.8),
        alpha=sc_json.get("alpha", 1.0),
    )
    cfg = ExperimentConfig(
        scenario=scenario,
        horizons=tuple(cfg_json["horizons"]),
        n_replications=cfg_json["n_replications"],
        seed=cfg_json.get("seed", 0),
        procedures=tuple(cfg_json.get("procedures",
                                      ("NoPen", "L1", "wL1", "L1Nuclear",
                                       "wL1Nuclear"))),
        loss_kind=cfg_json.get("loss_kind", "least-squares"),
        c1_grid_weighted=tuple(cfg_json.get(
            "c1_grid_weighted", ExperimentConfig.c1_grid_weighted)),
        c2_grid_weighted=tuple(cfg_json.get(
            "c2_grid_weighted", ExperimentConfig.c2_grid_weighted)),
        c1_grid_weighted_nuclear=tuple(cfg_json.get(
            "c1_grid_weighted_nuclear",
            ExperimentConfig.c1_grid_weighted_nuclear)),
        c2_grid_weighted_nuclear=tuple(cfg_json.get(
            "c2_grid_weighted_nuclear",
            ExperimentConfig.c2_grid_weighted_nuclear)),
        c1_grid_constant=tuple(cfg_json.get(
            "c1_grid_constant", ExperimentConfig.c1_grid_constant)),
        c2_grid_constant=tuple(cfg_json.get(
            "c2_grid_constant", ExperimentConfig.c2_grid_constant)),
        tau_grid=tuple(cfg_json.get("tau_grid", ExperimentConfig.tau_grid)),
        max_iter=cfg_json.get("max_iter", 100),
        jobs=args.jobs,
    )
    out_dir = io.ensure_dir(args.out_dir)
    rows = run_experiment(cfg)
    write_rows_csv(rows, os.path.join(out_dir, "results.csv"))
    agg = aggregate(rows)
    write_aggregate_csv(agg, os.path.join(out_dir, "aggregate.csv"))
    print(json.dumps(agg))
    return 0


def cmd_check_bounds(args) -> int:
    params = default_bound_params(args.d, mu=args.mu,
                                  coupling_opnorm=args.coupling,
                                  alpha=args.alpha)
    check = check_pointwise_bound if args.which == "pointwise" \
        else check_opnorm_bound
    report = check(params, args.T, args.x, args.reps, args.seed)
    out = report.as_dict()
    out["holds"] = report.holds
    if args.out:
        io.write_json(out, args.out)
    print(json.dumps(out))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hawkesnet",
                                description="Hawkes network inference toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="simulate events by Ogata thinning")
    sim.add_argument("--config", help="JSON config file (flags override)")
    sim.add_argument("--d", type=int, default=1)
    sim.add_argument("--mu", type=float, default=0.1)
    sim.add_argument("--a", type=float, default=0.0,
                     help="total coupling operator norm for a uniform matrix")
    sim.add_argument("--alpha", type=float, default=1.0)
    sim.add_argument("--T", type=float, default=100.0)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--scenario", action="store_true",
                     help="use the overlapping-box community scenario")
    sim.add_argument("--max-events", type=int, default=None)
    sim.add_argument("--allow-unstable", action="store_true")
    sim.add_argument("--out", required=True)
    sim.add_argument("--params-out", help="directory for ground-truth files")
    sim.set_defaults(func=cmd_simulate)

    fit = sub.add_parser("fit", help="fit a penalized Hawkes model")
    fit.add_argument("--events", required=True)
    fit.add_argument("--procedure", default="wL1",
                     choices=["NoPen", "L1", "wL1", "L1Nuclear", "wL1Nuclear"])
    fit.add_argument("--loss", default="least-squares",
                     choices=["least-squares", "log-likelihood"])
    fit.add_argument("--alpha", type=float, default=1.0)
    fit.add_argument("--alpha-file", help="CSV matrix of per-pair decays")
    fit.add_argument("--c1", type=float, default=1.0)
    fit.add_argument("--c2", type=float, default=1.0)
    fit.add_argument("--tau", type=float, default=0.01)
    fit.add_argument("--max-iter", type=int, default=100)
    fit.add_argument("--out-dir", required=True)
    fit.set_defaults(func=cmd_fit)

    ev = sub.add_parser("eval", help="score an estimate against ground truth")
    ev.add_argument("--mu-hat", required=True)
    ev.add_argument("--A-hat", required=True)
    ev.add_argument("--mu-true", required=True)
    ev.add_argument("--A-true", required=True)
    ev.add_argument("--support", help="0/1 CSV; defaults to A_true > 0")
    ev.add_argument("--out", required=True)
    ev.set_defaults(func=cmd_eval)

    xv = sub.add_parser("xval", help="cross-validate penalty constants")
    xv.add_argument("--events", required=True)
    xv.add_argument("--procedure", default="wL1",
                    choices=["L1", "wL1", "L1Nuclear", "wL1Nuclear"])
    xv.add_argument("--loss", default="least-squares",
                    choices=["least-squares", "log-likelihood"])
    xv.add_argument("--alpha", type=float, default=1.0)
    xv.add_argument("--c1-grid", type=float, nargs="+", default=[1.0, 3.0, 10.0])
    xv.add_argument("--c2-grid", type=float, nargs="+", default=[1.0, 3.0, 10.0])
    xv.add_argument("--tau-grid", type=float, nargs="+",
                    default=[0.003, 0.01, 0.03])
    xv.add_argument("--max-iter", type=int, default=100)
    xv.add_argument("--out")
    xv.set_defaults(func=cmd_xval)

    wt = sub.add_parser("weights", help="compute data-driven penalty weights")
    wt.add_argument("--events", required=True)
    wt.add_argument("--alpha", type=float, default=1.0)
    wt.add_argument("--weighting", default="theoretical",
                    choices=["theoretical", "practical", "constant"])
    wt.add_argument("--x", type=float, default=None,
                    help="confidence level; defaults to log d")
    wt.add_argument("--c1", type=float, default=1.0)
    wt.add_argument("--c2", type=float, default=1.0)
    wt.add_argument("--tau", type=float, default=0.0)
    wt.add_argument("--out-dir", required=True)
    wt.set_defaults(func=cmd_weights)

    ex = sub.add_parser("experiment", help="run the full simulation study")
    ex.add_argument("--config", required=True)
    ex.add_argument("--out-dir", required=True)
    ex.add_argument("--jobs", type=int, default=1)
    ex.set_defaults(func=cmd_experiment)

    cb = sub.add_parser("check-bounds",
                        help="Monte Carlo validation of the deviation bounds")
    cb.add_argument("--which", required=True, choices=["pointwise", "opnorm"])
    cb.add_argument("--d", type=int, default=3)
    cb.add_argument("--T", type=float, default=200.0)
    cb.add_argument("--x", type=float, default=8.0)
    cb.add_argument("--reps", type=int, default=2000)
    cb.add_argument("--mu", type=float, default=0.5)
    cb.add_argument("--coupling", type=float, default=0.5)
    cb.add_argument("--alpha", type=float, default=1.0)
    cb.add_argument("--seed", type=int, default=0)
    cb.add_argument("--out")
    cb.set_defaults(func=cmd_check_bounds)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # structured error for scripting
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
