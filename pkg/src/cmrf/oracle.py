"""Exhaustive-enumeration ground truth for small instances.

Everything here walks all 2^n assignments (chunked, vectorized) and evaluates
constraints directly from their definitions, independently of the arithmetic
clause pipeline used by the samplers. It provides the exact constrained
distribution, the gradient of the log-partition function, and the
product-measure violation probabilities that predict expected resample
counts, plus the total-variation distance used to compare empirical and
exact distributions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cnf import ConstraintSet, EnumerationCapError
from .model import ModelParams, marginals

ENUMERATION_CAP = 25
_CHUNK_BITS = 16


class EmptySupportError(RuntimeError):
    """No assignment satisfies all constraints."""


@dataclass
class ExactDistribution:
    support: np.ndarray        # (M, n) uint8, rows in lexicographic bitstring order
    probabilities: np.ndarray  # (M,) float64, sums to 1
    log_partition: float

    def prob_table(self) -> dict[str, float]:
        return {
            "".join(map(str, row)): float(p)
            for row, p in zip(self.support, self.probabilities)
        }


@dataclass
class ResampleExpectation:
    q_empty: float
    q_single: np.ndarray             # (n_constraints,)
    per_constraint_expected: np.ndarray
    total_expected: float


def _check_cap(cs: ConstraintSet, cap: int) -> None:
    if cs.n_vars > cap:
        raise EnumerationCapError(
            f"{cs.n_vars} variables exceeds enumeration cap {cap}"
        )


def _chunks(n: int):
    """Yield (codes, bits) covering 0..2^n-1; variable i sits at bit n-1-i,
    so ascending code order equals lexicographic bitstring order."""
    total = 1 << n
    step = min(total, 1 << _CHUNK_BITS)
    shifts = np.array([n - 1 - i for i in range(n)], dtype=np.uint64)
    for start in range(0, total, step):
        codes = np.arange(start, min(start + step, total), dtype=np.uint64)
        bits = ((codes[:, None] >> shifts[None, :]) & np.uint64(1)).astype(np.uint8)
        yield codes, bits


def _violation_matrix(cs: ConstraintSet, bits: np.ndarray) -> np.ndarray:
    """(rows, n_constraints) boolean matrix, evaluated straight from definitions."""
    rows = bits.shape[0]
    out = np.zeros((rows, cs.n_constraints), dtype=bool)
    for j, cl in enumerate(cs.clauses):
        sat = np.zeros(rows, dtype=bool)
        for lit in cl.literals:
            col = bits[:, lit.variable_index].astype(bool)
            sat |= ~col if lit.negated else col
        out[:, j] = ~sat
    for g, group in enumerate(cs.exactly_one_groups):
        out[:, cs.n_clauses + g] = bits[:, sorted(group)].sum(axis=1) != 1
    return out


def exact_distribution(
    cs: ConstraintSet, m: ModelParams, cap: int = ENUMERATION_CAP
) -> ExactDistribution:
    """Enumerate the constrained Boltzmann distribution exactly.

    log_partition is computed with a max-shifted log-sum-exp over the valid
    assignments' potentials.
    """
    _check_cap(cs, cap)
    if m.n != cs.n_vars:
        raise ValueError("theta length does not match n_vars")
    support_chunks = []
    pot_chunks = []
    for _, bits in _chunks(cs.n_vars):
        valid = ~_violation_matrix(cs, bits).any(axis=1)
        if valid.any():
            kept = bits[valid]
            support_chunks.append(kept)
            pot_chunks.append(kept.astype(np.float64) @ m.theta)
    if not support_chunks:
        raise EmptySupportError("constraint set is unsatisfiable")
    support = np.concatenate(support_chunks, axis=0)
    pots = np.concatenate(pot_chunks)
    peak = pots.max()
    log_z = peak + np.log(np.exp(pots - peak).sum())
    probs = np.exp(pots - log_z)
    probs /= probs.sum()  # remove residual rounding so probabilities sum to 1
    return ExactDistribution(support=support, probabilities=probs, log_partition=float(log_z))


def exact_grad_log_partition(
    cs: ConstraintSet, m: ModelParams, cap: int = ENUMERATION_CAP
) -> np.ndarray:
    """Coordinate-wise mean of x under the exact constrained distribution."""
    dist = exact_distribution(cs, m, cap=cap)
    return dist.probabilities @ dist.support.astype(np.float64)


def product_measure_weights(m: ModelParams, bits: np.ndarray) -> np.ndarray:
    """Probability of each row under independent per-variable draws."""
    p_zero = marginals(m)
    probs = np.where(bits.astype(bool), 1.0 - p_zero[None, :], p_zero[None, :])
    return probs.prod(axis=1)


def expected_resamples(
    cs: ConstraintSet, m: ModelParams, cap: int = ENUMERATION_CAP
) -> ResampleExpectation:
    """Predicted resample counts for the all-violated-constraints sampler.

    Under the product measure of the marginals, q_empty is the probability
    that no constraint is violated and q_single[j] that exactly constraint j
    is; on extremal instances the expected number of resamples of constraint
    j across a full run is q_single[j] / q_empty.
    """
    _check_cap(cs, cap)
    if m.n != cs.n_vars:
        raise ValueError("theta length does not match n_vars")
    q_empty = 0.0
    q_single = np.zeros(cs.n_constraints)
    for _, bits in _chunks(cs.n_vars):
        weights = product_measure_weights(m, bits)
        viol = _violation_matrix(cs, bits)
        counts = viol.sum(axis=1)
        q_empty += weights[counts == 0].sum()
        lone = counts == 1
        if lone.any():
            q_single += weights[lone] @ viol[lone]
    if q_empty <= 0.0:
        raise EmptySupportError("no assignment satisfies all constraints")
    per = q_single / q_empty
    return ResampleExpectation(
        q_empty=float(q_empty),
        q_single=q_single,
        per_constraint_expected=per,
        total_expected=float(per.sum()),
    )


def violation_pattern_probs(
    cs: ConstraintSet, m: ModelParams, cap: int = 12
) -> dict[frozenset[int], float]:
    """Product-measure probability of every violated-constraint pattern."""
    _check_cap(cs, cap)
    out: dict[frozenset[int], float] = {}
    for _, bits in _chunks(cs.n_vars):
        weights = product_measure_weights(m, bits)
        viol = _violation_matrix(cs, bits)
        for w, row in zip(weights, viol):
            key = frozenset(np.nonzero(row)[0].tolist())
            out[key] = out.get(key, 0.0) + float(w)
    return out


def tv_distance(p: dict, q: dict) -> float:
    """Total-variation distance between two probability tables.

    Tables map outcomes (any hashable key) to masses; keys missing from one
    table count as 0 there.
    """
    for table in (p, q):
        for key, mass in table.items():
            if mass < 0:
                raise ValueError(f"negative mass {mass} at {key!r}")
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def empirical_table(rows: np.ndarray) -> dict[str, float]:
    """Frequency table of a (rows, n) 0/1 matrix keyed by bitstring."""
    rows = np.asarray(rows, dtype=np.uint8)
    n = rows.shape[1]
    weights = (1 << np.arange(n - 1, -1, -1)).astype(np.int64)
    codes = rows.astype(np.int64) @ weights
    counts = np.bincount(codes, minlength=1 << n)
    total = rows.shape[0]
    fmt = "{:0" + str(n) + "b}"
    return {fmt.format(c): counts[c] / total for c in np.nonzero(counts)[0]}
