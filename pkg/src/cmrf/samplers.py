"""Constraint-aware samplers for single-variable-form constrained MRFs.

Three samplers share one contract: draw a batch of assignments whose valid
rows are distributed according to the constrained model.

* nelson_sample: start from independent per-variable draws, then repeatedly
  redraw every variable belonging to any currently violated constraint until
  none is violated. On extremal constraint sets the terminated rows are exact
  draws from the constrained distribution.
* moser_tardos_sample: identical, except each round redraws the variables of
  a single violated constraint (the lowest-indexed one).
* gibbs_sample: single-site conditional-resampling chain with burn-in and
  thinning, kept inside the satisfying region.

All randomness is counter-based (see rng): a draw for (row, round, variable)
never depends on batch size or scheduling, so batched and sequential runs are
bit-identical and every run is reproducible from its seed.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .cnf import ConstraintSet, violated_constraints
from .model import ModelParams, marginals
from .rng import fold_seed, uniform_field
from .tensors import encode_tensors, resample_mask, satisfaction_pass


class SamplerExhaustedError(RuntimeError):
    """The sampler could not produce the requested valid rows."""


@dataclass
class SamplerConfig:
    batch_size: int
    seed: int = 0
    t_tryout: int = 1000
    gibbs_burn_in: int = 1000
    gibbs_thinning: int = 10
    row_offset: int = 0     # first global row index; makes split batches reproducible
    record: bool = False    # keep per-row sequences of violated-constraint sets

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.t_tryout < 1:
            raise ValueError("t_tryout must be >= 1")
        if self.gibbs_burn_in < 1 or self.gibbs_thinning < 1:
            raise ValueError("gibbs_burn_in and gibbs_thinning must be >= 1")


@dataclass
class AssignmentBatch:
    rows: np.ndarray          # (b, n) uint8
    valid_flags: np.ndarray   # (b,) bool; True only for rows satisfying all constraints


@dataclass
class SamplerStats:
    rounds_per_row: np.ndarray           # (b,) int64 satisfaction-check rounds
    per_constraint_resamples: np.ndarray  # (n_constraints,) int64 resample events
    records: list[list[frozenset[int]]] | None = None
    exhausted: int = 0


class _ConstraintKernel:
    """Precomputed arrays for batched violation checks and resample masks."""

    def __init__(self, cs: ConstraintSet):
        self.cs = cs
        self.n = cs.n_vars
        self.n_clauses = cs.n_clauses
        self.n_constraints = cs.n_constraints
        self.tensors = encode_tensors(cs.clauses_only())
        n_groups = len(cs.exactly_one_groups)
        self.group_members = np.zeros((n_groups, cs.n_vars), dtype=np.int8)
        for g, group in enumerate(cs.exactly_one_groups):
            self.group_members[g, sorted(group)] = 1
        # variable membership of every constraint, for single-constraint resampling
        self.constraint_vars = np.zeros((self.n_constraints, cs.n_vars), dtype=np.int8)
        for j in range(self.n_constraints):
            self.constraint_vars[j, sorted(cs.constraint_variables(j))] = 1

    def violations(self, X: np.ndarray) -> np.ndarray:
        """(rows, n_constraints) 0/1 matrix; clauses via the tensor pipeline,
        exactly-one groups via a direct membership-sum check."""
        _, s_clause = satisfaction_pass(self.tensors, X)
        if self.group_members.shape[0] == 0:
            return s_clause
        sums = X.astype(np.int64) @ self.group_members.T.astype(np.int64)
        s_group = (sums != 1).astype(np.int8)
        return np.concatenate([s_clause, s_group], axis=1)

    def full_resample_mask(self, S: np.ndarray) -> np.ndarray:
        """Union of variable supports of all violated constraints, per row."""
        mask = resample_mask(self.tensors, S[:, : self.n_clauses]).astype(bool)
        if self.group_members.shape[0] > 0:
            counts = (
                S[:, self.n_clauses:].astype(np.int64)
                @ self.group_members.astype(np.int64)
            )
            mask |= counts >= 1
        return mask


def _append_records(records, active, S):
    for local in np.nonzero(S.any(axis=1))[0]:
        records[active[local]].append(frozenset(np.nonzero(S[local])[0].tolist()))


def _resample_rounds(cs, m, cfg, resample_all: bool):
    kernel = _ConstraintKernel(cs)
    b, n = cfg.batch_size, cs.n_vars
    p_zero = marginals(m)
    row_ids = cfg.row_offset + np.arange(b, dtype=np.int64)

    X = (uniform_field(cfg.seed, row_ids, 0, n) > p_zero).astype(np.uint8)
    rounds = np.zeros(b, dtype=np.int64)
    valid = np.zeros(b, dtype=bool)
    tally = np.zeros(kernel.n_constraints, dtype=np.int64)
    records = [[] for _ in range(b)] if cfg.record else None
    active = np.arange(b)

    for t in range(1, cfg.t_tryout + 1):
        S = kernel.violations(X[active])
        viol_any = S.any(axis=1)
        finished = active[~viol_any]
        rounds[finished] = t
        valid[finished] = True
        if records is not None:
            _append_records(records, active, S)
        active = active[viol_any]
        if active.size == 0:
            break
        if t == cfg.t_tryout:
            rounds[active] = cfg.t_tryout
            break
        S = S[viol_any]
        if resample_all:
            tally += S.astype(np.int64).sum(axis=0)
            mask = kernel.full_resample_mask(S)
        else:
            chosen = np.argmax(S != 0, axis=1)
            np.add.at(tally, chosen, 1)
            mask = kernel.constraint_vars[chosen].astype(bool)
        draws = (uniform_field(cfg.seed, row_ids[active], t, n) > p_zero).astype(np.uint8)
        X[active] = np.where(mask, draws, X[active])

    batch = AssignmentBatch(rows=X, valid_flags=valid)
    stats = SamplerStats(
        rounds_per_row=rounds,
        per_constraint_resamples=tally,
        records=records,
        exhausted=int((~valid).sum()),
    )
    return batch, stats


def nelson_sample(cs: ConstraintSet, m: ModelParams, cfg: SamplerConfig):
    """Batched partial rejection sampling: redraw all violated constraints per round.

    Rows still violating constraints after t_tryout check rounds are returned
    with valid_flags False (their last assignment is kept); nothing is raised.
    """
    _check_shapes(cs, m)
    return _resample_rounds(cs, m, cfg, resample_all=True)


def moser_tardos_sample(cs: ConstraintSet, m: ModelParams, cfg: SamplerConfig):
    """Single-constraint variant: each round redraws only the lowest-indexed
    violated constraint's variables."""
    _check_shapes(cs, m)
    return _resample_rounds(cs, m, cfg, resample_all=False)


def _check_shapes(cs: ConstraintSet, m: ModelParams) -> None:
    if m.n != cs.n_vars:
        raise ValueError(f"theta length {m.n} != n_vars {cs.n_vars}")


def _constraint_ok(cs: ConstraintSet, j: int, x: np.ndarray) -> bool:
    if j < cs.n_clauses:
        return any(
            bool(x[lit.variable_index]) != lit.negated
            for lit in cs.clauses[j].literals
        )
    group = cs.exactly_one_groups[j - cs.n_clauses]
    return int(sum(int(x[v]) for v in group)) == 1


def _site_conditional(cs, touching, x, i, p_zero_i) -> float | None:
    """P(x_i = 1 | rest) for one Gibbs site, or None when both values are
    infeasible (the current value is then kept)."""
    old = x[i]
    x[i] = 0
    ok0 = all(_constraint_ok(cs, j, x) for j in touching[i])
    x[i] = 1
    ok1 = all(_constraint_ok(cs, j, x) for j in touching[i])
    x[i] = old
    if ok0 and ok1:
        return 1.0 - p_zero_i
    if ok1:
        return 1.0
    if ok0:
        return 0.0
    return None


def gibbs_sample(cs: ConstraintSet, m: ModelParams, cfg: SamplerConfig, init=None):
    """Single-site Gibbs chain over the satisfying region.

    Each sweep visits every variable once and redraws it from its conditional
    given the rest, with candidate values that would violate a constraint
    getting zero weight; if both values are infeasible the current value is
    kept. The chain starts from `init` (which must satisfy all constraints)
    or from one nelson_sample draw, runs gibbs_burn_in sweeps, then emits a
    row every gibbs_thinning sweeps until batch_size rows are collected.
    """
    _check_shapes(cs, m)
    n = cs.n_vars
    if init is None:
        init_cfg = replace(
            cfg,
            batch_size=1,
            record=False,
            row_offset=0,
            seed=fold_seed(cfg.seed, "gibbs-init"),
        )
        seed_batch, _ = nelson_sample(cs, m, init_cfg)
        if not seed_batch.valid_flags[0]:
            raise SamplerExhaustedError(
                "no valid Gibbs initialization within t_tryout rounds"
            )
        x = seed_batch.rows[0].copy()
    else:
        x = np.asarray(init, dtype=np.uint8).reshape(-1).copy()
        if x.shape[0] != n:
            raise ValueError("init length mismatch")
        if violated_constraints(cs, x):
            raise ValueError("init must satisfy all constraints")

    p_zero = marginals(m)
    touching = [[] for _ in range(n)]
    for j in range(cs.n_constraints):
        for v in cs.constraint_variables(j):
            touching[v].append(j)

    chain_seed = fold_seed(cfg.seed, "gibbs-chain")
    total_sweeps = cfg.gibbs_burn_in + cfg.gibbs_thinning * cfg.batch_size
    rows = np.empty((cfg.batch_size, n), dtype=np.uint8)
    rounds = np.empty(cfg.batch_size, dtype=np.int64)
    emitted = 0
    sweep_chunk = 4096
    for chunk_start in range(0, total_sweeps, sweep_chunk):
        sweeps = np.arange(
            chunk_start + 1, min(chunk_start + sweep_chunk, total_sweeps) + 1
        )
        U = uniform_field(chain_seed, sweeps, 0, n)
        for local, sweep in enumerate(sweeps):
            for i in range(n):
                p_one = _site_conditional(cs, touching, x, i, p_zero[i])
                if p_one is None:
                    continue
                x[i] = 1 if U[local, i] < p_one else 0
            if sweep > cfg.gibbs_burn_in and (sweep - cfg.gibbs_burn_in) % cfg.gibbs_thinning == 0:
                rows[emitted] = x
                rounds[emitted] = sweep
                emitted += 1
    batch = AssignmentBatch(rows=rows, valid_flags=np.ones(cfg.batch_size, dtype=bool))
    stats = SamplerStats(
        rounds_per_row=rounds,
        per_constraint_resamples=np.zeros(cs.n_constraints, dtype=np.int64),
        records=None,
        exhausted=0,
    )
    return batch, stats


SAMPLERS = {
    "nelson": nelson_sample,
    "moser_tardos": moser_tardos_sample,
    "gibbs": gibbs_sample,
}
