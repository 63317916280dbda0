"""Constraint sets over Boolean variables: CNF clauses plus exactly-one groups.

Holds the DIMACS parser/serializer, reference constraint evaluation, the
dependency graph over constraints, and the pairwise extremality check that
decides whether the partial-rejection sampler is exact on a given instance.

Constraint indexing convention used everywhere in this package: clause j has
constraint index j, and exactly-one group g has constraint index L + g where
L is the clause count.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, replace

import numpy as np

ENUM_CAP_DEFAULT = 24


class DimacsError(ValueError):
    """Malformed instance input: DIMACS text or the exactly-one sidecar."""


class EnumerationCapError(RuntimeError):
    """An exhaustive check would need to enumerate more variables than allowed."""


@dataclass(frozen=True)
class Literal:
    variable_index: int
    negated: bool = False

    def __str__(self) -> str:
        return ("-" if self.negated else "") + str(self.variable_index + 1)


@dataclass(frozen=True)
class Clause:
    literals: tuple[Literal, ...]

    def __post_init__(self):
        if not self.literals:
            raise ValueError("empty clause")
        seen = set()
        for lit in self.literals:
            if lit.variable_index in seen:
                raise ValueError(
                    f"variable {lit.variable_index} appears twice in one clause"
                )
            seen.add(lit.variable_index)

    def variables(self) -> frozenset[int]:
        return frozenset(lit.variable_index for lit in self.literals)


def clause(*signed: int) -> Clause:
    """Build a clause from signed 1-based literals, e.g. clause(1, -3)."""
    return Clause(tuple(Literal(abs(s) - 1, s < 0) for s in signed))


@dataclass(frozen=True)
class ConstraintSet:
    n_vars: int
    clauses: tuple[Clause, ...] = ()
    exactly_one_groups: tuple[frozenset[int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        object.__setattr__(
            self, "exactly_one_groups", tuple(frozenset(g) for g in self.exactly_one_groups)
        )
        for cl in self.clauses:
            for lit in cl.literals:
                if not 0 <= lit.variable_index < self.n_vars:
                    raise ValueError(f"literal variable {lit.variable_index} out of range")
        for g in self.exactly_one_groups:
            if not g:
                raise ValueError("empty exactly-one group")
            if any(not 0 <= v < self.n_vars for v in g):
                raise ValueError("exactly-one group variable out of range")

    @property
    def n_clauses(self) -> int:
        return len(self.clauses)

    @property
    def n_constraints(self) -> int:
        return len(self.clauses) + len(self.exactly_one_groups)

    def constraint_variables(self, j: int) -> frozenset[int]:
        """Variable support of constraint j (clauses first, then groups)."""
        if j < len(self.clauses):
            return self.clauses[j].variables()
        return self.exactly_one_groups[j - len(self.clauses)]

    def clauses_only(self) -> "ConstraintSet":
        return replace(self, exactly_one_groups=())


@dataclass(frozen=True)
class DependencyGraph:
    """Symmetric adjacency over constraint indices; edge iff shared variable."""
    adjacency: tuple[frozenset[int], ...]


def parse_dimacs(text: str) -> ConstraintSet:
    """Parse DIMACS CNF ("p cnf <n> <L>", 0-terminated signed literals).

    Comment lines start with 'c'. Clauses may span lines. Duplicate variables
    within a clause are rejected rather than deduplicated.
    """
    n_vars = None
    n_clauses_declared = None
    clause_tokens: list[int] = []
    clauses: list[Clause] = []

    def flush():
        if not clause_tokens:
            raise DimacsError("empty clause")
        lits = tuple(Literal(abs(t) - 1, t < 0) for t in clause_tokens)
        try:
            clauses.append(Clause(lits))
        except ValueError as exc:
            raise DimacsError(str(exc)) from exc
        clause_tokens.clear()

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise DimacsError(f"line {line_no}: malformed header {line!r}")
            try:
                n_vars = int(parts[2])
                n_clauses_declared = int(parts[3])
            except ValueError as exc:
                raise DimacsError(f"line {line_no}: non-integer header counts") from exc
            if n_vars < 0 or n_clauses_declared < 0:
                raise DimacsError(f"line {line_no}: negative counts in header")
            continue
        if n_vars is None:
            raise DimacsError(f"line {line_no}: clause before header")
        for tok in line.split():
            try:
                value = int(tok)
            except ValueError as exc:
                raise DimacsError(f"line {line_no}: non-integer token {tok!r}") from exc
            if value == 0:
                flush()
            else:
                if not 1 <= abs(value) <= n_vars:
                    raise DimacsError(f"line {line_no}: variable index {value} out of range")
                clause_tokens.append(value)

    if n_vars is None:
        raise DimacsError("missing header")
    if clause_tokens:
        raise DimacsError("unterminated clause at end of input")
    if len(clauses) != n_clauses_declared:
        raise DimacsError(
            f"clause count mismatch: header says {n_clauses_declared}, got {len(clauses)}"
        )
    return ConstraintSet(n_vars=n_vars, clauses=tuple(clauses))


def emit_dimacs(cs: ConstraintSet) -> str:
    """Inverse of parse_dimacs (exactly-one groups are not representable here)."""
    lines = [f"p cnf {cs.n_vars} {cs.n_clauses}"]
    for cl in cs.clauses:
        lines.append(" ".join(str(lit) for lit in cl.literals) + " 0")
    return "\n".join(lines) + "\n"


def load_constraints(cnf_path, groups_path=None) -> ConstraintSet:
    """Read a DIMACS file, merging the optional exactly-one sidecar JSON.

    Sidecar schema: {"exactly_one": [[0-based var indices], ...], ...}; other
    keys (instance metadata) are ignored here.
    """
    with open(cnf_path, "r", encoding="utf-8") as fh:
        cs = parse_dimacs(fh.read())
    if groups_path is not None:
        with open(groups_path, "r", encoding="utf-8") as fh:
            sidecar = json.load(fh)
        try:
            groups = tuple(
                frozenset(int(v) for v in g) for g in sidecar.get("exactly_one", [])
            )
            cs = replace(cs, exactly_one_groups=groups)
        except (TypeError, ValueError) as exc:
            raise DimacsError(f"bad exactly-one sidecar: {exc}") from exc
    return cs


def _clause_satisfied(cl: Clause, x) -> bool:
    return any(bool(x[lit.variable_index]) != lit.negated for lit in cl.literals)


def violated_constraints(cs: ConstraintSet, x) -> set[int]:
    """Indices of constraints violated by assignment x (reference semantics).

    A clause is violated iff all of its literals are false; an exactly-one
    group is violated iff its member sum differs from 1.
    """
    if len(x) != cs.n_vars:
        raise ValueError(f"assignment length {len(x)} != n_vars {cs.n_vars}")
    out = {j for j, cl in enumerate(cs.clauses) if not _clause_satisfied(cl, x)}
    base = cs.n_clauses
    for g, group in enumerate(cs.exactly_one_groups):
        if sum(int(bool(x[v])) for v in group) != 1:
            out.add(base + g)
    return out


def satisfies_all(cs: ConstraintSet, X: np.ndarray) -> np.ndarray:
    """Vectorized all-constraints-satisfied check over a (rows, n) 0/1 matrix.

    Direct per-constraint evaluation (no tensor encoding), so it can serve as
    an independent check of the arithmetic satisfaction pipeline.
    """
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[1] != cs.n_vars:
        raise ValueError(f"expected (rows, {cs.n_vars}) matrix, got {X.shape}")
    ok = np.ones(X.shape[0], dtype=bool)
    for cl in cs.clauses:
        sat = np.zeros(X.shape[0], dtype=bool)
        for lit in cl.literals:
            col = X[:, lit.variable_index].astype(bool)
            sat |= ~col if lit.negated else col
        ok &= sat
    for group in cs.exactly_one_groups:
        ok &= X[:, sorted(group)].sum(axis=1) == 1
    return ok


def build_dependency_graph(cs: ConstraintSet) -> DependencyGraph:
    """Edge (i, j) iff constraints i != j share at least one variable."""
    supports = [cs.constraint_variables(j) for j in range(cs.n_constraints)]
    var_to_constraints: dict[int, list[int]] = {}
    for j, sup in enumerate(supports):
        for v in sup:
            var_to_constraints.setdefault(v, []).append(j)
    neighbors: list[set[int]] = [set() for _ in range(cs.n_constraints)]
    for members in var_to_constraints.values():
        for i, j in itertools.combinations(members, 2):
            neighbors[i].add(j)
            neighbors[j].add(i)
    return DependencyGraph(adjacency=tuple(frozenset(s) for s in neighbors))


def gamma(g: DependencyGraph, S) -> frozenset[int]:
    """S together with all direct dependency-graph neighbors of S."""
    out = set(S)
    for j in S:
        out |= g.adjacency[j]
    return frozenset(out)


def _violates_partial(cs: ConstraintSet, j: int, assignment: dict[int, int]) -> bool:
    """Constraint j violated under a total assignment of its own variables."""
    if j < cs.n_clauses:
        return all(
            assignment[lit.variable_index] == (1 if lit.negated else 0)
            for lit in cs.clauses[j].literals
        )
    group = cs.exactly_one_groups[j - cs.n_clauses]
    return sum(assignment[v] for v in group) != 1


def _jointly_violable_enum(cs, i, j, enum_cap):
    union = sorted(cs.constraint_variables(i) | cs.constraint_variables(j))
    if len(union) > enum_cap:
        raise EnumerationCapError(
            f"constraints {i},{j} span {len(union)} variables (cap {enum_cap})"
        )
    for bits in itertools.product((0, 1), repeat=len(union)):
        assignment = dict(zip(union, bits))
        if _violates_partial(cs, i, assignment) and _violates_partial(cs, j, assignment):
            return True, assignment
    return False, None


def _jointly_violable_clauses(ci: Clause, cj: Clause):
    # Two clauses can be violated together iff every shared variable carries
    # the same polarity in both; the witness then falsifies every literal.
    pol_i = {lit.variable_index: lit.negated for lit in ci.literals}
    for lit in cj.literals:
        if lit.variable_index in pol_i and pol_i[lit.variable_index] != lit.negated:
            return False, None
    witness = {lit.variable_index: int(lit.negated) for lit in ci.literals}
    witness.update({lit.variable_index: int(lit.negated) for lit in cj.literals})
    return True, witness


def check_extremal(cs: ConstraintSet, enum_cap: int = ENUM_CAP_DEFAULT):
    """Decide whether no assignment violates two variable-sharing constraints.

    Returns (True, None) when the set is extremal, else (False, witness) with
    a partial assignment that violates two adjacent constraints at once.
    Clause pairs use the shared-polarity fast path; pairs involving groups
    enumerate the union of their supports (bounded by enum_cap).
    """
    g = build_dependency_graph(cs)
    for i in range(cs.n_constraints):
        for j in sorted(g.adjacency[i]):
            if j <= i:
                continue
            if i < cs.n_clauses and j < cs.n_clauses:
                violable, witness = _jointly_violable_clauses(cs.clauses[i], cs.clauses[j])
            else:
                violable, witness = _jointly_violable_enum(cs, i, j, enum_cap)
            if violable:
                return False, witness
    return True, None
