"""Command-line entry point.

Subcommands wire the generators, samplers, trainer, oracle and metrics into
file-based runs: every run takes explicit input paths and a seed, writes its
artifacts plus a manifest echoing the fully resolved plan, and uses no source
of randomness other than the plan seed. Failures exit with a stable code
(1 usage, 2 I/O, 3 infeasible instance, 4 enumeration cap, 5 sampler
exhaustion) and a JSON error object on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .cnf import DimacsError, EnumerationCapError, load_constraints
from .learn import Dataset, TrainConfig, save_trace_csv, train
from .metrics import MetricReport, grad_error, map_at_10, resample_stats, save_histogram_csv
from .model import ModelParams, load_model, save_model
from .oracle import (
    EmptySupportError,
    exact_distribution,
    exact_grad_log_partition,
    expected_resamples,
)
from .problems import gen_ksat, gen_routes, gen_sinkfree, save_instance
from .samplers import SAMPLERS, SamplerConfig, SamplerExhaustedError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_INFEASIBLE = 3
EXIT_CAP = 4
EXIT_EXHAUSTED = 5

DEFAULTS = {"t_tryout": 1000, "m": 200, "eta": 0.1, "t_max": 1000}

_SAMPLER_ALIASES = {"nelson": "nelson", "moser": "moser_tardos", "gibbs": "gibbs"}


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # raise instead of exiting so errors map to code 1
        raise UsageError(message)


@dataclass
class RunPlan:
    command: str
    options: dict

    @property
    def seed(self) -> int:
        return self.options["seed"]


def _build_parser() -> _Parser:
    parser = _Parser(prog="cmrf", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a benchmark instance")
    gen.add_argument("--family", required=True, choices=["ksat", "sinkfree", "routes"])
    gen.add_argument("--size", required=True, type=int,
                     help="variables (ksat), vertices (sinkfree), cities (routes)")
    gen.add_argument("--k", type=int, default=5, help="clause width for ksat")
    gen.add_argument("--edge-prob", type=float, default=0.55)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default=".", help="output directory (default: current)")

    sample = sub.add_parser("sample", help="draw assignments from a model")
    sample.add_argument("--cnf", required=True)
    sample.add_argument("--groups", default=None)
    sample.add_argument("--theta", required=True)
    sample.add_argument("--sampler", required=True, choices=sorted(_SAMPLER_ALIASES))
    sample.add_argument("--n", required=True, type=int, help="number of rows to draw")
    sample.add_argument("--tryout", type=int, default=DEFAULTS["t_tryout"])
    sample.add_argument("--burn-in", type=int, default=1000)
    sample.add_argument("--thin", type=int, default=10)
    sample.add_argument("--seed", type=int, default=0)
    sample.add_argument("--out", default=".", help="output directory (default: current)")

    tr = sub.add_parser("train", help="contrastive-divergence training")
    tr.add_argument("--cnf", required=True)
    tr.add_argument("--groups", default=None)
    tr.add_argument("--data", required=True)
    tr.add_argument("--m", type=int, default=DEFAULTS["m"])
    tr.add_argument("--eta", type=float, default=DEFAULTS["eta"])
    tr.add_argument("--iters", type=int, default=DEFAULTS["t_max"])
    tr.add_argument("--sampler", default="nelson", choices=sorted(_SAMPLER_ALIASES))
    tr.add_argument("--tryout", type=int, default=DEFAULTS["t_tryout"])
    tr.add_argument("--nll-every", type=int, default=10)
    tr.add_argument("--seed", type=int, default=0)
    tr.add_argument("--out", default=".", help="output directory (default: current)")

    ev = sub.add_parser("eval", help="evaluate a model against assignment sets")
    ev.add_argument("--cnf", required=True)
    ev.add_argument("--groups", default=None)
    ev.add_argument("--theta", required=True)
    ev.add_argument("--preferred", required=True)
    ev.add_argument("--unseen", required=True)
    ev.add_argument("--grad-m", type=int, default=None,
                    help="also estimate gradient error with this many samples")
    ev.add_argument("--seed", type=int, default=0)
    ev.add_argument("--out", default=".", help="output directory (default: current)")

    orc = sub.add_parser("oracle", help="exact enumeration quantities")
    orc.add_argument("--cnf", required=True)
    orc.add_argument("--groups", default=None)
    orc.add_argument("--theta", required=True)
    orc.add_argument("--what", required=True, choices=["dist", "grad", "resamples"])
    orc.add_argument("--seed", type=int, default=0)
    orc.add_argument("--out", default=".", help="output directory (default: current)")

    return parser


def build_plan(argv: list[str]) -> RunPlan:
    """Resolve argv into a fully defaulted plan; raises UsageError on bad input."""
    namespace = _build_parser().parse_args(argv)
    options = vars(namespace)
    command = options.pop("command")
    return RunPlan(command=command, options=options)


def _write_json(path: Path, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _write_manifest(plan: RunPlan, outdir: Path) -> None:
    _write_json(
        outdir / "manifest.json",
        {
            "command": plan.command,
            "options": {k: v for k, v in sorted(plan.options.items())},
            "defaults": DEFAULTS,
            "version": __version__,
        },
    )


def _load_inputs(options, need_theta=True):
    cs = load_constraints(options["cnf"], options.get("groups"))
    theta = load_model(options["theta"]) if need_theta else None
    if theta is not None and theta.n != cs.n_vars:
        raise DimacsError(
            f"theta length {theta.n} does not match instance width {cs.n_vars}"
        )
    return cs, theta


def _run_gen(plan: RunPlan, outdir: Path) -> int:
    options = plan.options
    family = options["family"]
    if family == "ksat":
        inst = gen_ksat(options["size"], options["size"], options["k"], seed=options["seed"])
    elif family == "sinkfree":
        inst = gen_sinkfree(options["size"], options["edge_prob"], seed=options["seed"])
    else:
        inst = gen_routes(options["size"], seed=options["seed"])
    save_instance(inst, outdir / "instance.cnf", outdir / "instance.json")
    if inst.metadata.get("theta") is not None:
        save_model(ModelParams(np.asarray(inst.metadata["theta"])), outdir / "theta.json")
    return EXIT_OK


def _run_sample(plan: RunPlan, outdir: Path) -> int:
    options = plan.options
    cs, theta = _load_inputs(options)
    kind = _SAMPLER_ALIASES[options["sampler"]]
    cfg = SamplerConfig(
        batch_size=options["n"],
        seed=options["seed"],
        t_tryout=options["tryout"],
        gibbs_burn_in=options["burn_in"],
        gibbs_thinning=options["thin"],
    )
    batch, stats = SAMPLERS[kind](cs, theta, cfg)
    with open(outdir / "samples.txt", "w", encoding="utf-8") as fh:
        for row, ok in zip(batch.rows, batch.valid_flags):
            suffix = "" if ok else " INVALID"
            fh.write("".join(map(str, row)) + suffix + "\n")
    _write_json(
        outdir / "stats.json",
        {
            "rounds": stats.rounds_per_row.tolist(),
            "per_constraint": stats.per_constraint_resamples.tolist(),
            "exhausted": stats.exhausted,
        },
    )
    save_histogram_csv(resample_stats(stats).histogram, outdir / "histogram.csv")
    if stats.exhausted == options["n"]:
        raise SamplerExhaustedError("every row exhausted its resampling budget")
    return EXIT_OK


def _run_train(plan: RunPlan, outdir: Path) -> int:
    options = plan.options
    cs, _ = _load_inputs(options, need_theta=False)
    ds = Dataset.load(options["data"], constraint_set=cs)
    cfg = TrainConfig(
        m=options["m"],
        eta=options["eta"],
        t_max=options["iters"],
        sampler_kind=_SAMPLER_ALIASES[options["sampler"]],
        seed=options["seed"],
        t_tryout=options["tryout"],
        nll_every=options["nll_every"],
    )
    theta0 = ModelParams(np.zeros(cs.n_vars))
    theta, trace = train(ds, cs, cfg, theta0)
    save_model(theta, outdir / "model.json")
    save_trace_csv(trace, outdir / "trace.csv")
    return EXIT_OK


def _run_eval(plan: RunPlan, outdir: Path) -> int:
    options = plan.options
    cs, theta = _load_inputs(options)
    preferred = Dataset.load(options["preferred"], constraint_set=cs)
    unseen = Dataset.load(options["unseen"], constraint_set=cs)
    report = MetricReport(
        map_at_10=map_at_10(theta, preferred.assignments, unseen.assignments)
    )
    if options["grad_m"] is not None:
        report.grad_error_l1 = grad_error(
            cs, theta, "nelson", options["grad_m"], seed=options["seed"]
        )
    _write_json(outdir / "report.json", report.to_dict())
    return EXIT_OK


def _run_oracle(plan: RunPlan, outdir: Path) -> int:
    options = plan.options
    cs, theta = _load_inputs(options)
    what = options["what"]
    if what == "dist":
        dist = exact_distribution(cs, theta)
        table = [
            {"assignment": key, "prob": prob}
            for key, prob in sorted(dist.prob_table().items())
        ]
        _write_json(outdir / "dist.json", table)
        _write_json(outdir / "partition.json", {"log_partition": dist.log_partition})
    elif what == "grad":
        _write_json(outdir / "grad.json", {"grad": exact_grad_log_partition(cs, theta).tolist()})
    else:
        expectation = expected_resamples(cs, theta)
        _write_json(
            outdir / "resamples.json",
            {
                "q_empty": expectation.q_empty,
                "q_single": expectation.q_single.tolist(),
                "per_constraint": expectation.per_constraint_expected.tolist(),
                "total": expectation.total_expected,
            },
        )
    return EXIT_OK


_RUNNERS = {
    "gen": _run_gen,
    "sample": _run_sample,
    "train": _run_train,
    "eval": _run_eval,
    "oracle": _run_oracle,
}


def execute_plan(plan: RunPlan) -> int:
    outdir = Path(plan.options["out"])
    outdir.mkdir(parents=True, exist_ok=True)
    _write_manifest(plan, outdir)
    return _RUNNERS[plan.command](plan, outdir)


def _fail(exit_code: int, exc: Exception) -> int:
    payload = {"error": {"exit_code": exit_code, "type": type(exc).__name__, "message": str(exc)}}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return exit_code


def run(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        plan = build_plan(argv)
    except UsageError as exc:
        return _fail(EXIT_USAGE, exc)
    try:
        return execute_plan(plan)
    except (UsageError, ValueError) as exc:
        if isinstance(exc, DimacsError):
            return _fail(EXIT_IO, exc)
        return _fail(EXIT_USAGE, exc)
    except SamplerExhaustedError as exc:
        return _fail(EXIT_EXHAUSTED, exc)
    except EnumerationCapError as exc:
        return _fail(EXIT_CAP, exc)
    except EmptySupportError as exc:
        return _fail(EXIT_INFEASIBLE, exc)
    except (OSError, json.JSONDecodeError) as exc:
        return _fail(EXIT_IO, exc)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
