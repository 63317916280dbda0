"""Contrastive-divergence training of constrained MRFs.

Each iteration contrasts a minibatch of training assignments against a batch
of valid assignments drawn from the current model by one of the samplers: the
gradient of the mean potential difference is just (model mean - data mean) of
the assignment vectors, and plain constant-rate SGD follows it. The exact
negative log-likelihood (via the enumeration oracle) is traced periodically
when the instance is small enough.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass

import numpy as np

from .cnf import ConstraintSet, satisfies_all
from .model import ModelParams, potential_batch
from .oracle import ENUMERATION_CAP, exact_distribution, exact_grad_log_partition
from .rng import Stream, fold_seed
from .samplers import SAMPLERS, SamplerConfig, SamplerExhaustedError


@dataclass
class Dataset:
    assignments: np.ndarray  # (N, n) uint8
    n_vars: int

    def __post_init__(self):
        self.assignments = np.asarray(self.assignments, dtype=np.uint8)
        if self.assignments.ndim != 2 or self.assignments.shape[1] != self.n_vars:
            raise ValueError("assignments must be an (N, n_vars) matrix")

    def __len__(self) -> int:
        return self.assignments.shape[0]

    @classmethod
    def load(cls, path, constraint_set: ConstraintSet | None = None) -> "Dataset":
        """Read one '0'/'1' bitstring per line; optionally validate every row."""
        rows = []
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line:
                    continue
                if set(line) - {"0", "1"}:
                    raise ValueError(f"line {line_no}: not a bitstring: {line!r}")
                rows.append([int(ch) for ch in line])
        if not rows:
            raise ValueError("empty dataset file")
        widths = {len(r) for r in rows}
        if len(widths) != 1:
            raise ValueError("inconsistent bitstring widths")
        ds = cls(np.asarray(rows, dtype=np.uint8), n_vars=widths.pop())
        if constraint_set is not None:
            ds.validate(constraint_set)
        return ds

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for row in self.assignments:
                fh.write("".join(map(str, row)) + "\n")

    def validate(self, cs: ConstraintSet) -> None:
        if self.n_vars != cs.n_vars:
            raise ValueError("dataset width does not match constraint set")
        ok = satisfies_all(cs, self.assignments)
        if not ok.all():
            bad = int(np.nonzero(~ok)[0][0])
            raise ValueError(f"dataset row {bad} violates the constraints")


@dataclass
class TrainConfig:
    m: int = 200
    eta: float = 0.1
    t_max: int = 1000
    sampler_kind: str = "nelson"  # nelson | moser_tardos | gibbs | exact
    seed: int = 0
    t_tryout: int = 1000
    gibbs_burn_in: int = 1000
    gibbs_thinning: int = 10
    retry_batches: int = 10
    nll_every: int = 10  # trace exact NLL every k-th iteration (when n <= cap)

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if self.t_max < 0:
            raise ValueError("t_max must be >= 0")
        if self.nll_every < 1:
            raise ValueError("nll_every must be >= 1")
        if self.sampler_kind not in ("nelson", "moser_tardos", "gibbs", "exact"):
            raise ValueError(f"unknown sampler kind {self.sampler_kind!r}")


@dataclass
class TraceRow:
    iteration: int
    nll: float | None
    grad_l1: float
    wall_ms: float


def cd_step(theta: ModelParams, data_batch: np.ndarray, model_batch: np.ndarray) -> np.ndarray:
    """Contrastive-divergence gradient estimate of the negative log-likelihood.

    With a linear potential the per-assignment gradient is the assignment
    itself, so the estimate is model mean minus data mean; stepping
    theta <- theta - eta * g increases the data likelihood.
    """
    data = np.asarray(data_batch, dtype=np.float64)
    model = np.asarray(model_batch, dtype=np.float64)
    if data.size == 0 or model.size == 0:
        raise ValueError("empty batch")
    if data.shape[1] != theta.n or model.shape[1] != theta.n:
        raise ValueError("batch width does not match theta")
    return model.mean(axis=0) - data.mean(axis=0)


def draw_valid_rows(
    cs: ConstraintSet,
    m: ModelParams,
    kind: str,
    count: int,
    seed: int,
    t_tryout: int = 1000,
    gibbs_burn_in: int = 1000,
    gibbs_thinning: int = 10,
    retry_batches: int = 10,
) -> np.ndarray:
    """Collect `count` valid assignments from the named sampler.

    Invalid (tryout-exhausted) rows are discarded and redrawn with a fresh
    derived seed, up to retry_batches batches.
    """
    sampler = SAMPLERS[kind]
    collected = []
    have = 0
    for attempt in range(retry_batches):
        cfg = SamplerConfig(
            batch_size=count,
            seed=fold_seed(seed, "draw", attempt),
            t_tryout=t_tryout,
            gibbs_burn_in=gibbs_burn_in,
            gibbs_thinning=gibbs_thinning,
        )
        batch, _ = sampler(cs, m, cfg)
        good = batch.rows[batch.valid_flags]
        if good.shape[0] > 0:
            collected.append(good)
            have += good.shape[0]
        if have >= count:
            return np.concatenate(collected, axis=0)[:count]
    raise SamplerExhaustedError(
        f"{kind} produced only {have}/{count} valid rows in {retry_batches} batches"
    )


def neg_log_likelihood(
    theta: ModelParams, ds: Dataset, cs: ConstraintSet, cap: int = ENUMERATION_CAP
) -> float:
    """Exact NLL: log Z (enumerated) minus the mean data potential."""
    ds.validate(cs)
    dist = exact_distribution(cs, theta, cap=cap)
    mean_potential = float(potential_batch(theta, ds.assignments).mean())
    return dist.log_partition - mean_potential


def train(
    ds: Dataset, cs: ConstraintSet, cfg: TrainConfig, theta0: ModelParams
) -> tuple[ModelParams, list[TraceRow]]:
    """Run t_max contrastive-divergence iterations starting from theta0.

    Per iteration: draw m data rows uniformly with replacement, draw m valid
    model rows from the configured sampler, take one SGD step. Kind "exact"
    replaces both expectations with their exact values (enumeration oracle on
    the model side, full-dataset mean on the data side), making the update a
    deterministic gradient-descent step on the NLL. NLL is traced every
    nll_every iterations (and on the last) when the oracle cap allows.
    """
    ds.validate(cs)
    theta = theta0.copy()
    trace: list[TraceRow] = []
    trace_nll = cs.n_vars <= ENUMERATION_CAP
    n_data = len(ds)
    data_mean = ds.assignments.astype(np.float64).mean(axis=0)
    start = time.perf_counter()
    for it in range(1, cfg.t_max + 1):
        if cfg.sampler_kind == "exact":
            g = exact_grad_log_partition(cs, theta) - data_mean
        else:
            picker = Stream(fold_seed(cfg.seed, "data", it))
            data_rows = ds.assignments[picker.integers(cfg.m, n_data)]
            model_rows = draw_valid_rows(
                cs,
                theta,
                cfg.sampler_kind,
                cfg.m,
                seed=fold_seed(cfg.seed, "model", it),
                t_tryout=cfg.t_tryout,
                gibbs_burn_in=cfg.gibbs_burn_in,
                gibbs_thinning=cfg.gibbs_thinning,
                retry_batches=cfg.retry_batches,
            )
            g = cd_step(theta, data_rows, model_rows)
        theta = ModelParams(theta.theta - cfg.eta * g)
        want_nll = trace_nll and (it % cfg.nll_every == 0 or it == cfg.t_max)
        nll = neg_log_likelihood(theta, ds, cs) if want_nll else None
        trace.append(
            TraceRow(
                iteration=it,
                nll=nll,
                grad_l1=float(np.abs(g).sum()),
                wall_ms=(time.perf_counter() - start) * 1000.0,
            )
        )
    return theta, trace


def save_trace_csv(trace: list[TraceRow], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter", "nll", "grad_l1", "wall_ms"])
        for row in trace:
            writer.writerow(
                [
                    row.iteration,
                    "" if row.nll is None else f"{row.nll:.12g}",
                    f"{row.grad_l1:.12g}",
                    f"{row.wall_ms:.3f}",
                ]
            )
