"""Evaluation metrics: validity, MAP@10 ranking score, gradient error,
resample-round statistics."""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .cnf import ConstraintSet, satisfies_all
from .learn import draw_valid_rows
from .model import ModelParams, potential
from .oracle import exact_grad_log_partition
from .samplers import AssignmentBatch, SamplerStats


@dataclass
class MetricReport:
    validity: float | None = None
    map_at_10: float | None = None
    grad_error_l1: float | None = None
    nll: float | None = None
    resample_histogram: dict[int, int] | None = None

    def to_dict(self) -> dict:
        out = {}
        for name in ("validity", "map_at_10", "grad_error_l1", "nll"):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        if self.resample_histogram is not None:
            out["resample_histogram"] = {
                str(k): v for k, v in sorted(self.resample_histogram.items())
            }
        return out


def validity(batch: AssignmentBatch, cs: ConstraintSet) -> float:
    """Fraction of rows satisfying every constraint; exhausted rows count in
    the denominator like any other draw."""
    if batch.rows.shape[0] == 0:
        raise ValueError("empty batch")
    return float(satisfies_all(cs, batch.rows).mean())


def _bitstring(row) -> str:
    return "".join(str(int(v)) for v in row)


def map_at_10(theta: ModelParams, preferred, unseen) -> float:
    """Mean averaged precision over the top 10 by potential, as a percentage.

    Ranks the union of both sets by potential, descending (ties broken by
    bitstring, descending), then averages precision-at-k for k = 1..10; 100
    means the entire top 10 is preferred.
    """
    preferred_keys = {_bitstring(row) for row in preferred}
    pool: dict[str, np.ndarray] = {}
    for row in list(preferred) + list(unseen):
        pool.setdefault(_bitstring(row), np.asarray(row, dtype=np.uint8))
    if not preferred_keys or len(pool) == len(preferred_keys):
        raise ValueError("both assignment sets must be nonempty")
    if len(pool) < 10:
        raise ValueError(f"need at least 10 candidates, got {len(pool)}")

    def sort_key(key: str):
        # descending potential, then descending bitstring (flip bits for asc sort)
        return (-potential(theta, pool[key]), key.translate(str.maketrans("01", "10")))

    ranked = sorted(pool, key=sort_key)
    hits = 0
    score = 0.0
    for k, key in enumerate(ranked[:10], start=1):
        if key in preferred_keys:
            hits += 1
        score += hits / k
    return score / 10.0 * 100.0


def grad_error(
    cs: ConstraintSet,
    theta: ModelParams,
    sampler_kind: str,
    m: int,
    seed: int,
    t_tryout: int = 1000,
    gibbs_burn_in: int = 1000,
    gibbs_thinning: int = 10,
) -> float:
    """L1 distance between the exact log-partition gradient and the mean of m
    valid sampler draws."""
    exact = exact_grad_log_partition(cs, theta)
    rows = draw_valid_rows(
        cs,
        theta,
        sampler_kind,
        m,
        seed=seed,
        t_tryout=t_tryout,
        gibbs_burn_in=gibbs_burn_in,
        gibbs_thinning=gibbs_thinning,
    )
    estimate = rows.astype(np.float64).mean(axis=0)
    return float(np.abs(exact - estimate).sum())


@dataclass
class ResampleSummary:
    histogram: dict[int, int] = field(default_factory=dict)
    mean_rounds: float = 0.0
    max_rounds: int = 0
    per_constraint: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))


def resample_stats(stats: SamplerStats) -> ResampleSummary:
    """Frequency table of check rounds plus summary scalars."""
    rounds = stats.rounds_per_row
    histogram = dict(sorted(Counter(rounds.tolist()).items()))
    return ResampleSummary(
        histogram=histogram,
        mean_rounds=float(rounds.mean()) if rounds.size else 0.0,
        max_rounds=int(rounds.max()) if rounds.size else 0,
        per_constraint=stats.per_constraint_resamples.copy(),
    )


def save_histogram_csv(histogram: dict[int, int], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["round", "count"])
        for round_count in sorted(histogram):
            writer.writerow([round_count, histogram[round_count]])
