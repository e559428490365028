"""Closed-world logic: the DNF a database induces, membership in a
circuit's logical base, and satisfiability of conjunctions.

Under the closed-world reading, a database over n variables stands for the
disjunction of its records, each record contributing one complete
conjunctive clause (the literal for variable i is positive iff bit i is 1).
Because every clause is complete, the models of that DNF are exactly the
distinct records, which reduces entailment checks to per-record membership.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuits import Circuit, LiteralUnit, SumUnit, coerce_record
from .data import Dataset


@dataclass(frozen=True)
class Formula:
    """DNF of complete conjunctive clauses over ascending variables.

    Each clause is a 0/1 tuple aligned with `variables`; completeness (every
    clause assigns every variable) is a construction invariant.
    """

    variables: tuple[int, ...]
    clauses: frozenset[tuple[int, ...]]

    def __post_init__(self):
        n = len(self.variables)
        for clause in self.clauses:
            if len(clause) != n:
                raise ValueError("clause does not assign every variable")

    def models(self) -> frozenset[tuple[int, ...]]:
        """Complete clauses are their own models."""
        return self.clauses


def dnf_of_database(data: Dataset) -> Formula:
    """One clause per distinct record; positive literal where the bit is 1."""
    if data.num_records == 0:
        raise ValueError("no records")
    return Formula(data.variables, frozenset(tuple(int(b) for b in row) for row in data.records))


def consistent(circuit: Circuit, record) -> bool:
    """Does the complete assignment satisfy the circuit's logical base?

    Equivalent to a finite log-probability: weights are positive and dead
    branches are unrepresentable.
    """
    rec = coerce_record(record, circuit.num_vars)
    return _satisfies(circuit.nodes, circuit.root, rec, {})


def _satisfies(nodes, idx: int, rec: np.ndarray, memo: dict[int, bool]) -> bool:
    hit = memo.get(idx)
    if hit is not None:
        return hit
    node = nodes[idx]
    if isinstance(node, LiteralUnit):
        out = bool(rec[node.var - 1]) == node.positive
    elif isinstance(node, SumUnit):
        out = any(
            _satisfies(nodes, e.prime, rec, memo) and _satisfies(nodes, e.sub, rec, memo)
            for e in node.elements
        )
    else:  # TrueUnit
        out = True
    memo[idx] = out
    return out


def implies(dnf: Formula, circuit: Circuit) -> bool:
    """Does the DNF entail the circuit's base?

    Valid reduction: complete clauses have themselves as only model, so the
    DNF entails the base iff every clause satisfies it.
    """
    if dnf.variables != circuit.variables:
        raise ValueError(
            f"formula over {dnf.variables} does not match circuit over {circuit.variables}"
        )
    return all(consistent(circuit, clause) for clause in dnf.clauses)


def conjoin_satisfiable(circuit: Circuit, a: int, b: int) -> bool:
    """Is base(a) AND base(b) satisfiable, for nodes on the same vtree node?

    Memoized pairwise descent aligned on the shared vtree; worst case
    O(|a| * |b|).
    """
    for idx in (a, b):
        if not 0 <= idx < len(circuit.nodes):
            raise ValueError(f"node index {idx} out of range")
    return conjoin_satisfiable_nodes(circuit.nodes, a, b)


def conjoin_satisfiable_nodes(nodes, a: int, b: int, memo: dict | None = None) -> bool:
    """Same as conjoin_satisfiable but over a raw arena (used mid-build)."""
    na, nb = nodes[a], nodes[b]
    if na.vtree != nb.vtree:
        raise ValueError("conjunction requires nodes normalized to the same vtree node")
    if memo is None:
        memo = {}
    return _conjoin(nodes, a, b, memo)


def _conjoin(nodes, a: int, b: int, memo: dict) -> bool:
    if a == b:
        return True  # live nodes are satisfiable
    key = (a, b) if a <= b else (b, a)
    hit = memo.get(key)
    if hit is not None:
        return hit
    na, nb = nodes[a], nodes[b]
    if isinstance(na, SumUnit) and isinstance(nb, SumUnit):
        out = any(
            _conjoin(nodes, ea.prime, eb.prime, memo) and _conjoin(nodes, ea.sub, eb.sub, memo)
            for ea in na.elements
            for eb in nb.elements
        )
    elif isinstance(na, SumUnit) or isinstance(nb, SumUnit):
        raise ValueError("conjunction requires nodes normalized to the same vtree node")
    elif isinstance(na, LiteralUnit) and isinstance(nb, LiteralUnit):
        out = na.positive == nb.positive
    else:
        out = True  # at least one side is the constant true
    memo[key] = out
    return out
