"""Shared test instances.

Builders for small extremal constraint sets with known structure, plus a
deterministic corpus used by the statistical suites. Corpus instances are
kept small-support on purpose: with 1e5 draws the expected total-variation
distance of an empirical distribution scales like sqrt(support / draws), so
supports above a few hundred states could not meet a 0.02 bound no matter
how correct the sampler is.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from cmrf.cnf import ConstraintSet, check_extremal, clause
from cmrf.model import ModelParams
from cmrf.oracle import EmptySupportError, exact_distribution, expected_resamples
from cmrf.problems import gen_sinkfree

MAX_CORPUS_SUPPORT = 150


def toy_formula() -> ConstraintSet:
    """(X1 or X2) and (not X1 or X3): 3 vars, 4 satisfying assignments."""
    return ConstraintSet(n_vars=3, clauses=(clause(1, 2), clause(-1, 3)))


def implication_chain(n: int) -> ConstraintSet:
    """Clauses (not x_i or x_{i+1}); satisfying assignments are the n+1
    monotone step patterns. Shared variables flip polarity between adjacent
    clauses, so the set is extremal."""
    clauses = tuple(clause(-(i + 1), i + 2) for i in range(n - 1))
    return ConstraintSet(n_vars=n, clauses=clauses)


def disjoint_pairs(k: int) -> ConstraintSet:
    """k variable-disjoint clauses (x or y); 3^k satisfying assignments and
    simultaneous multi-clause violations for the resamplers to chew on."""
    clauses = tuple(clause(2 * i + 1, 2 * i + 2) for i in range(k))
    return ConstraintSet(n_vars=2 * k, clauses=clauses)


def pinned_plus_toy() -> ConstraintSet:
    """n=10 extremal instance with 7 unit-pinned variables and the toy
    formula on the rest; most coordinates of E[x] have zero variance."""
    units = tuple(clause(i + 1) for i in range(7))
    tail = (clause(8, 9), clause(-8, 10))
    return ConstraintSet(n_vars=10, clauses=units + tail)


def mostly_pinned_pair() -> ConstraintSet:
    """n=10 extremal instance with 8 unit-pinned variables and one
    two-variable clause: only two coordinates carry sampling noise, so a
    2000-draw gradient estimate stays under a 0.05 L1 budget with margin."""
    units = tuple(clause(i + 1) for i in range(8))
    return ConstraintSet(n_vars=10, clauses=units + (clause(9, 10),))


def uniform_params(cs: ConstraintSet) -> ModelParams:
    return ModelParams(np.zeros(cs.n_vars))


def _support_size(cs: ConstraintSet) -> int | None:
    try:
        return exact_distribution(cs, uniform_params(cs)).support.shape[0]
    except EmptySupportError:
        return None


@lru_cache(maxsize=1)
def sinkfree_corpus() -> tuple[tuple[str, ConstraintSet], ...]:
    """Eight satisfiable sink-free generations with <= 12 edge variables,
    support <= MAX_CORPUS_SUPPORT, and per-constraint expected resample
    counts large enough for 5%-relative statistical checks."""
    out = []
    seed = 0
    while len(out) < 8 and seed < 200:
        vertices = 4 + (len(out) % 2)
        inst = gen_sinkfree(vertices, seed=seed)
        seed += 1
        cs = inst.constraints
        if cs.n_vars > 12:
            continue
        size = _support_size(cs)
        if size is None or size > MAX_CORPUS_SUPPORT:
            continue
        expectation = expected_resamples(cs, uniform_params(cs))
        if expectation.per_constraint_expected.min() < 0.1:
            continue
        out.append((f"sinkfree-v{vertices}-s{seed - 1}", cs))
    assert len(out) == 8, "sink-free corpus generation drifted"
    return tuple(out)


@lru_cache(maxsize=1)
def extremal_corpus() -> tuple[tuple[str, ConstraintSet], ...]:
    """>= 20 extremal instances, n <= 12, support <= MAX_CORPUS_SUPPORT."""
    entries: list[tuple[str, ConstraintSet]] = [("toy", toy_formula())]
    for n in range(3, 13):
        entries.append((f"chain{n}", implication_chain(n)))
    for k in (2, 3, 4):
        entries.append((f"pairs{k}", disjoint_pairs(k)))
    entries.append(("pinned10", pinned_plus_toy()))
    entries.append(("unit1", ConstraintSet(n_vars=1, clauses=(clause(1),))))
    entries.extend(sinkfree_corpus())
    for name, cs in entries:
        ok, witness = check_extremal(cs)
        assert ok, f"{name} unexpectedly non-extremal: {witness}"
        assert cs.n_vars <= 12
    assert len(entries) >= 20
    return tuple(entries)


def random_thetas(n: int, count: int, seed: int) -> list[ModelParams]:
    """Deterministic random weights in [-1, 1]^n."""
    rng = np.random.default_rng(seed)
    return [ModelParams(rng.uniform(-1.0, 1.0, size=n)) for _ in range(count)]
