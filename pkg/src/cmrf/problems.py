"""Benchmark instance generators and synthetic preference training sets.

Three families: random K-SAT formulas, sink-free-orientation formulas over
random graphs, and vehicle-route instances with exactly-one degree
constraints. Every generator is a pure function of its seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .cnf import Clause, ConstraintSet, Literal, emit_dimacs
from .learn import Dataset, draw_valid_rows
from .model import ModelParams
from .rng import Stream, fold_seed


@dataclass
class ProblemInstance:
    constraints: ConstraintSet
    metadata: dict = field(default_factory=dict)

    @property
    def family(self) -> str:
        return self.metadata.get("family", "unknown")


def gen_ksat(n: int, L: int, K: int, seed: int = 0) -> ProblemInstance:
    """L random clauses of exactly K distinct variables, fair-coin polarities."""
    if K > n:
        raise ValueError(f"clause width {K} exceeds variable count {n}")
    stream = Stream(fold_seed(seed, "ksat"))
    clauses = []
    for _ in range(L):
        variables = stream.permutation(n)[:K]
        signs = stream.uniforms(K) < 0.5
        clauses.append(
            Clause(tuple(Literal(int(v), bool(s)) for v, s in zip(variables, signs)))
        )
    cs = ConstraintSet(n_vars=n, clauses=tuple(clauses))
    return ProblemInstance(
        constraints=cs,
        metadata={"family": "ksat", "params": {"n": n, "L": L, "K": K, "seed": seed}},
    )


def _random_graph(stream: Stream, num_vertices: int, edge_prob: float):
    edges = []
    degree = [0] * num_vertices
    for i in range(num_vertices):
        for j in range(i + 1, num_vertices):
            if stream.uniform() < edge_prob:
                edges.append((i, j))
                degree[i] += 1
                degree[j] += 1
    return edges, min(degree) if num_vertices else 0


def gen_sinkfree(num_vertices: int, edge_prob: float = 0.55, seed: int = 0) -> ProblemInstance:
    """Sink-free-orientation formula over a random graph.

    Edge e = (a, b) with a < b gets one Boolean variable; value 1 means the
    edge points a -> b. The clause of vertex v requires one outgoing edge:
    literal X_e when v is the lower endpoint, otherwise its negation. Graphs
    are redrawn until every vertex has degree >= 1 (an isolated vertex would
    make the formula unsatisfiable); two clauses never share a variable with
    equal polarity, so the result always passes check_extremal.
    """
    if num_vertices < 2:
        raise ValueError("need at least two vertices")
    stream = Stream(fold_seed(seed, "sinkfree"))
    for _ in range(1000):
        edges, min_degree = _random_graph(stream, num_vertices, edge_prob)
        if min_degree >= 1:
            break
    else:
        raise RuntimeError("no graph with minimum degree >= 1 in 1000 draws")

    clauses = []
    for v in range(num_vertices):
        lits = []
        for e, (a, b) in enumerate(edges):
            if v == a:
                lits.append(Literal(e, negated=False))
            elif v == b:
                lits.append(Literal(e, negated=True))
        clauses.append(Clause(tuple(lits)))
    cs = ConstraintSet(n_vars=len(edges), clauses=tuple(clauses))
    return ProblemInstance(
        constraints=cs,
        metadata={
            "family": "sinkfree",
            "params": {"num_vertices": num_vertices, "edge_prob": edge_prob, "seed": seed},
            "edges": [list(e) for e in edges],
        },
    )


def gen_routes(num_cities: int, seed: int = 0) -> ProblemInstance:
    """Visit-once route instance: one variable per ordered city pair.

    Variable for (i, j) means the step i -> j is taken. One exactly-one group
    per origin row (leave every city once) and one per destination column
    (enter every city once). Weights favor short steps: theta = -distance,
    with distances a symmetric uniform [0,1] matrix drawn from the seed.
    """
    if num_cities < 2:
        raise ValueError("need at least two cities")
    stream = Stream(fold_seed(seed, "routes"))
    var_pairs = [(i, j) for i in range(num_cities) for j in range(num_cities) if i != j]
    var_index = {pair: v for v, pair in enumerate(var_pairs)}

    dist = np.zeros((num_cities, num_cities))
    for i in range(num_cities):
        for j in range(i + 1, num_cities):
            dist[i, j] = dist[j, i] = stream.uniform()

    groups = []
    for i in range(num_cities):
        groups.append(frozenset(var_index[(i, j)] for j in range(num_cities) if j != i))
    for j in range(num_cities):
        groups.append(frozenset(var_index[(i, j)] for i in range(num_cities) if i != j))

    theta = np.array([-dist[i, j] for (i, j) in var_pairs])
    cs = ConstraintSet(
        n_vars=len(var_pairs), clauses=(), exactly_one_groups=tuple(groups)
    )
    return ProblemInstance(
        constraints=cs,
        metadata={
            "family": "routes",
            "params": {"num_cities": num_cities, "seed": seed},
            "var_pairs": [list(p) for p in var_pairs],
            "distances": dist.tolist(),
            "theta": theta.tolist(),
        },
    )


def gen_training_set(
    inst: ProblemInstance, theta_star: ModelParams, N: int, seed: int = 0
) -> Dataset:
    """N valid assignments drawn from the instance under preference weights
    theta_star; stands in for a solver-generated set of preferred solutions."""
    cs = inst.constraints
    if theta_star.n != cs.n_vars:
        raise ValueError("theta_star width does not match instance")
    if N == 0:
        return Dataset(np.zeros((0, cs.n_vars), dtype=np.uint8), n_vars=cs.n_vars)
    rows = draw_valid_rows(
        cs, theta_star, "nelson", N, seed=fold_seed(seed, "training-set")
    )
    return Dataset(rows, n_vars=cs.n_vars)


def instance_theta(inst: ProblemInstance) -> ModelParams | None:
    """Instance-provided initial weights (routes), if any."""
    theta = inst.metadata.get("theta")
    return None if theta is None else ModelParams(np.asarray(theta))


def save_instance(inst: ProblemInstance, cnf_path, sidecar_path) -> None:
    """DIMACS file plus sidecar JSON with groups and generation metadata."""
    with open(cnf_path, "w", encoding="utf-8") as fh:
        fh.write(emit_dimacs(inst.constraints))
    sidecar = dict(inst.metadata)
    sidecar["exactly_one"] = [sorted(g) for g in inst.constraints.exactly_one_groups]
    with open(sidecar_path, "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, sort_keys=True, indent=2)
        fh.write("\n")
