"""Shared test data and independent oracles.

The oracles here deliberately re-implement circuit semantics in the most
direct way possible (linear-space recursion, generic sum-of-products) so
they share no code path with the library's log-space evaluator, support
walker or satisfiability check.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from slopp import (
    Circuit,
    CircuitBuilder,
    Dataset,
    LearnConfig,
    LiteralUnit,
    TrueUnit,
    Vtree,
    cluster,
    random_vtree,
    slopp,
)

# The four-variable worked example: 7 distinct records, 30 in total.
# Row groups (0), (1, 2) and (3) of the distinct left projections form the
# reference clustering that yields the published circuit.
TABLE1_ROWS = [
    (0, 0, 1, 1),
    (0, 0, 0, 0),
    (1, 0, 0, 1),
    (0, 1, 1, 1),
    (0, 1, 1, 0),
    (1, 1, 0, 1),
    (1, 1, 1, 0),
]
TABLE1_COUNTS = [3, 7, 2, 3, 9, 2, 4]

VIRTUAL_RECORDS = [(1, 0, 1, 1), (1, 0, 1, 0), (0, 1, 0, 1)]

# Hand evaluation of the reference circuit: weight of the root element
# times the prime and sub branch values, as exact rationals.
REFERENCE_SUPPORT = {
    (0, 0, 1, 1): Fraction(10, 30) * Fraction(3, 10),
    (0, 0, 0, 0): Fraction(10, 30) * Fraction(7, 10),
    (1, 0, 0, 1): Fraction(14, 30) * Fraction(2, 14) * Fraction(2, 14),
    (1, 0, 1, 1): Fraction(14, 30) * Fraction(2, 14) * Fraction(12, 14) * Fraction(1, 4),
    (1, 0, 1, 0): Fraction(14, 30) * Fraction(2, 14) * Fraction(12, 14) * Fraction(3, 4),
    (0, 1, 0, 1): Fraction(14, 30) * Fraction(12, 14) * Fraction(2, 14),
    (0, 1, 1, 1): Fraction(14, 30) * Fraction(12, 14) * Fraction(12, 14) * Fraction(1, 4),
    (0, 1, 1, 0): Fraction(14, 30) * Fraction(12, 14) * Fraction(12, 14) * Fraction(3, 4),
    (1, 1, 0, 1): Fraction(6, 30) * Fraction(2, 6),
    (1, 1, 1, 0): Fraction(6, 30) * Fraction(4, 6),
}
assert sum(REFERENCE_SUPPORT.values()) == 1


def table1_dataset() -> Dataset:
    return Dataset.from_records(TABLE1_ROWS, TABLE1_COUNTS)


def fig_vtree() -> Vtree:
    return Vtree.from_nested(((1, 2), (3, 4)))


def pinned_cluster(left_data, config, rng):
    """Reference clustering for the worked example; stock policy elsewhere."""
    want = {(0, 0): 0, (1, 0): 1, (0, 1): 1, (1, 1): 2}
    if left_data.variables == (1, 2) and left_data.num_distinct == 4:
        groups: dict[int, list[int]] = {0: [], 1: [], 2: []}
        for i, row in enumerate(left_data.records):
            groups[want[tuple(int(b) for b in row)]].append(i)
        return [np.array(g) for g in groups.values()]
    return cluster(left_data, config, rng)


GOLDEN_CONFIG = LearnConfig(k=3, min_records=1, seed=0)


def golden_circuit() -> Circuit:
    return slopp(table1_dataset(), fig_vtree(), GOLDEN_CONFIG, cluster_fn=pinned_cluster)


def reference_circuit() -> Circuit:
    """The published four-variable circuit, built by hand with shared
    input units (exercises the DAG path, unlike the learner's tree)."""
    b = CircuitBuilder(fig_vtree())
    x1, nx1 = b.literal(0, 1, True), b.literal(0, 1, False)
    x2, nx2 = b.literal(1, 2, True), b.literal(1, 2, False)
    x3, nx3 = b.literal(3, 3, True), b.literal(3, 3, False)
    x4, nx4 = b.literal(4, 4, True), b.literal(4, 4, False)
    t4 = b.true(4, 4, 1 / 4)
    p1 = b.sum(2, [(nx1, nx2, 1.0)])
    s1 = b.sum(5, [(x3, x4, 3 / 10), (nx3, nx4, 7 / 10)])
    p2 = b.sum(2, [(x1, nx2, 2 / 14), (nx1, x2, 12 / 14)])
    s2 = b.sum(5, [(nx3, x4, 2 / 14), (x3, t4, 12 / 14)])
    p3 = b.sum(2, [(x1, x2, 1.0)])
    s3 = b.sum(5, [(x3, nx4, 4 / 6), (nx3, x4, 2 / 6)])
    root = b.sum(6, [(p1, s1, 10 / 30), (p2, s2, 14 / 30), (p3, s3, 6 / 30)])
    return b.build(root)


def brute_prob(circuit: Circuit, bits) -> float:
    """Oracle: linear-space recursive evaluation with generic sum semantics."""

    def value(idx: int) -> float:
        node = circuit.nodes[idx]
        if isinstance(node, LiteralUnit):
            return 1.0 if bits[node.var - 1] == (1 if node.positive else 0) else 0.0
        if isinstance(node, TrueUnit):
            return node.theta if bits[node.var - 1] else 1.0 - node.theta
        return sum(e.weight * value(e.prime) * value(e.sub) for e in node.elements)

    return value(circuit.root)


def brute_table(circuit: Circuit) -> dict[tuple[int, ...], float]:
    """Oracle: the full joint table by enumerating all 2^n assignments."""
    table = {}
    for bits in itertools.product((0, 1), repeat=circuit.num_vars):
        p = brute_prob(circuit, bits)
        if p > 0.0:
            table[bits] = p
    return table


def base_satisfies(circuit: Circuit, idx: int, assignment: dict[int, int]) -> bool:
    """Oracle: does a (partial) assignment covering the node's scope satisfy
    the node's logical base?"""
    node = circuit.nodes[idx]
    if isinstance(node, LiteralUnit):
        return assignment[node.var] == (1 if node.positive else 0)
    if isinstance(node, TrueUnit):
        return True
    return any(
        base_satisfies(circuit, e.prime, assignment) and base_satisfies(circuit, e.sub, assignment)
        for e in node.elements
    )


def brute_conjoin_satisfiable(circuit: Circuit, a: int, b: int) -> bool:
    """Oracle: try every assignment over the shared scope."""
    scope_vars = sorted(circuit.node_scope(a) | circuit.node_scope(b))
    for bits in itertools.product((0, 1), repeat=len(scope_vars)):
        assignment = dict(zip(scope_vars, bits))
        if base_satisfies(circuit, a, assignment) and base_satisfies(circuit, b, assignment):
            return True
    return False


def canonical(circuit: Circuit, idx: int | None = None):
    """Structural form ignoring arena layout and element order."""
    node = circuit.nodes[circuit.root if idx is None else idx]
    if isinstance(node, LiteralUnit):
        return ("lit", node.var, node.positive)
    if isinstance(node, TrueUnit):
        return ("true", node.var, round(node.theta, 12))
    members = frozenset(
        (canonical(circuit, e.prime), canonical(circuit, e.sub), round(e.weight, 12))
        for e in node.elements
    )
    return ("sum", members)


def random_dataset(rng: np.random.Generator, max_vars: int = 8, max_records: int = 50) -> Dataset:
    n = int(rng.integers(1, max_vars + 1))
    m = int(rng.integers(1, max_records + 1))
    return Dataset.from_records(rng.integers(0, 2, size=(m, n)))


def random_learned(rng: np.random.Generator, max_vars: int = 8, max_records: int = 50):
    """A random database plus a circuit trained on it with random knobs."""
    data = random_dataset(rng, max_vars, max_records)
    vtree = random_vtree(data.variables, seed=int(rng.integers(1 << 31)))
    config = LearnConfig(
        k=int(rng.integers(1, 4)),
        min_records=int(rng.integers(1, 21)),
        seed=int(rng.integers(1 << 31)),
    )
    return data, vtree, config, slopp(data, vtree, config)


def correlated_rows(
    n_vars: int, n_records: int, seed: int, n_prototypes: int = 6, flip: float = 0.05
) -> np.ndarray:
    """Benchmark surrogate: noisy copies of a few random prototype rows,
    giving strongly correlated columns and a concentrated support."""
    rng = np.random.default_rng(seed)
    protos = rng.integers(0, 2, size=(n_prototypes, n_vars))
    mix = rng.dirichlet(np.ones(n_prototypes) * 2.0)
    which = rng.choice(n_prototypes, size=n_records, p=mix)
    noise = rng.random((n_records, n_vars)) < flip
    return protos[which] ^ noise
