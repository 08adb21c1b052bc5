"""Command-line interface.

Subcommands: simulate (forum run), replay (single-agent thread sequence),
ingest (raw Likert CSV to rescaled reports or paired observations), fit
(velocity / participation / expression models, optional AIC term search),
posterior (draws from a saved fit).  Outputs land under --out-dir with
deterministic names, so a rerun with the same seed reproduces every file
byte for byte.

Exit codes: 0 success, 1 validation or usage error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .engine import ForumScenario, ReplayScenario, load_scenario, replay, run_forum
from .estimation import (
    DataError,
    FitError,
    FittedModel,
    aic_table,
    fit_arousal,
    fit_expression,
    fit_participation,
    fit_valence,
    load_observations,
    select_terms,
    simulate_posterior,
)
from .ingest import IngestError, pair_reports, read_raw_csv, write_reports_csv
from .integrator import IntegratorConfig
from .model import ModelParams

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2

FIT_TARGETS = ("valence", "arousal", "participation", "expression")


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; the CLI contract wants 1
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit_Usage(message)


class SystemExit_Usage(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="affectsim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--seed", type=int, default=0, help="root random seed")
    parser.add_argument("--out-dir", default=".", help="directory for output files")
    parser.add_argument("--params", help="model parameters JSON file")
    parser.add_argument(
        "--threads",
        type=int,
        default=1,
        help="worker count for replication batches (single runs are sequential)",
    )

    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a multi-agent forum scenario")
    p_sim.add_argument("scenario", help="forum scenario JSON")
    p_sim.add_argument("--dt", type=float, default=0.01, help="step size in minutes")

    p_rep = sub.add_parser("replay", help="replay a thread-exposure sequence")
    p_rep.add_argument("scenario", help="replay scenario JSON")
    p_rep.add_argument("--dt", type=float, default=0.01, help="step size in minutes")
    p_rep.add_argument("--noiseless", action="store_true", help="disable the noise terms")

    p_ing = sub.add_parser("ingest", help="rescale a raw Likert CSV")
    p_ing.add_argument("raw_csv")
    p_ing.add_argument(
        "--pair",
        action="store_true",
        help="also pair consecutive reports into estimation records",
    )
    p_ing.add_argument("--dt", type=float, default=1.0, help="exposure minutes per thread")

    p_fit = sub.add_parser("fit", help="fit a model component to observations")
    p_fit.add_argument("observations")
    p_fit.add_argument("--target", required=True, choices=FIT_TARGETS)
    p_fit.add_argument(
        "--select", action="store_true", help="AIC search over polynomial terms first"
    )
    p_fit.add_argument("--terms", help="comma-separated term names (velocity targets)")
    p_fit.add_argument(
        "--regressor",
        choices=("valence", "arousal"),
        default="valence",
        help="regressor for the expression target",
    )

    p_post = sub.add_parser("posterior", help="simulate the posterior of a saved fit")
    p_post.add_argument("fit_json")
    p_post.add_argument("--draws", type=int, default=10000)
    return parser


def _load_params(path: str | None) -> ModelParams:
    if path is None:
        return ModelParams()
    return ModelParams.from_json(Path(path).read_text())


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _cmd_simulate(args, out_dir: Path) -> int:
    scenario = load_scenario(args.scenario)
    if not isinstance(scenario, ForumScenario):
        raise DataError("simulate expects a forum scenario (type: forum)")
    params = _load_params(args.params)
    cfg = IntegratorConfig(dt=args.dt, seed=args.seed, clamp=params.clamp_states)
    result = run_forum(scenario, params, cfg)
    for agent, trace in enumerate(result.agents):
        trace.to_csv(out_dir / f"trace_agent_{agent:03d}.csv")
    result.field.to_csv(out_dir / "field.csv")
    print(f"simulated {scenario.n_agents} agents for {scenario.duration_minutes} minutes")
    return EXIT_OK


def _cmd_replay(args, out_dir: Path) -> int:
    scenario = load_scenario(args.scenario)
    if not isinstance(scenario, ReplayScenario):
        raise DataError("replay expects a replay scenario (type: replay)")
    params = _load_params(args.params)
    if args.noiseless:
        params = ModelParams.from_dict(
            {
                **params.to_dict(),
                "valence": {**params.to_dict()["valence"], "A_v": 0.0},
                "arousal": {**params.to_dict()["arousal"], "A_a": 0.0},
            }
        )
    cfg = IntegratorConfig(dt=args.dt, seed=args.seed, clamp=params.clamp_states)
    result = replay(scenario, params, cfg)
    result.trace.to_csv(out_dir / "trace.csv")
    result.write_boundaries_csv(out_dir / "boundaries.csv")
    print(f"replayed {len(scenario.threads)} threads")
    return EXIT_OK


def _cmd_ingest(args, out_dir: Path) -> int:
    reports = read_raw_csv(args.raw_csv)
    write_reports_csv(reports, out_dir / "reports.csv")
    print(f"rescaled {len(reports)} reports -> reports.csv")
    if args.pair:
        from .estimation import save_observations

        records = pair_reports(reports, dt_minutes=args.dt)
        save_observations(records, out_dir / "observations.csv")
        participants = len({(r.study_id, r.participant_id) for r in records}) if records else 0
        print(
            f"paired {len(records)} observations from {participants} participants"
            " -> observations.csv"
        )
    return EXIT_OK


def _velocity_report(fit: FittedModel, table: list[dict] | None) -> dict:
    report = fit.to_dict()
    if table is not None:
        report["aic_table"] = table
    return report


def _cmd_fit(args, out_dir: Path) -> int:
    data = load_observations(args.observations)
    target = args.target
    out_path = out_dir / f"fit_{target}.json"
    if target in ("valence", "arousal"):
        fitter = fit_valence if target == "valence" else fit_arousal
        table = None
        if args.select:
            table = aic_table(data, target)
            terms = select_terms(data, target)
        elif args.terms is not None:
            terms = tuple(t.strip() for t in args.terms.split(",") if t.strip())
        else:
            terms = ("b0", "b1", "b2", "b3") if target == "valence" else ("d0", "d1", "d2", "d3")
        fit = fitter(data, terms)
        _write_json(out_path, _velocity_report(fit, table))
        print(f"fitted {target}: R^2={fit.r_squared:.4f}, n={fit.n} -> {out_path.name}")
    elif target == "participation":
        fit = fit_participation(data)
        _write_json(
            out_path,
            {
                "target": "participation",
                "p0": fit.p0,
                "alpha": fit.alpha,
                "tau": fit.tau,
                "r_squared": fit.r_squared,
                "n": fit.n,
            },
        )
        print(f"fitted participation hinge: R^2={fit.r_squared:.4f}, n={fit.n} -> {out_path.name}")
    else:
        pos = fit_expression(data, regressor=args.regressor, outcome="positive")
        neg = fit_expression(data, regressor=args.regressor, outcome="negative")
        _write_json(
            out_path,
            {
                "target": "expression",
                "regressor": args.regressor,
                "positive": pos.to_dict(),
                "negative": neg.to_dict(),
            },
        )
        print(f"fitted expression channels on {args.regressor}, n={pos.n} -> {out_path.name}")
    return EXIT_OK


def _cmd_posterior(args, out_dir: Path) -> int:
    payload = json.loads(Path(args.fit_json).read_text())
    if "param_names" not in payload:
        raise DataError(
            "posterior needs a velocity/expression fit report with estimates and covariance"
        )
    fit = FittedModel.from_dict(payload)
    sample = simulate_posterior(fit, n_draws=args.draws, seed=args.seed)
    sample.to_csv(out_dir / "posterior_samples.csv")
    _write_json(out_dir / "posterior_summary.json", sample.summary())
    print(f"drew {sample.n_draws} posterior samples for {len(fit.param_names)} parameters")
    return EXIT_OK


COMMANDS = {
    "simulate": _cmd_simulate,
    "replay": _cmd_replay,
    "ingest": _cmd_ingest,
    "fit": _cmd_fit,
    "posterior": _cmd_posterior,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit_Usage as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SystemExit as exc:
        # --version/--help paths exit 0; argparse internals otherwise map to 1
        code = exc.code if isinstance(exc.code, int) else EXIT_VALIDATION
        return EXIT_OK if code == 0 else EXIT_VALIDATION

    out_dir = Path(args.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.threads < 1:
            raise DataError("--threads must be >= 1")
        return COMMANDS[args.command](args, out_dir)
    except (DataError, IngestError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FitError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
