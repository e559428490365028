"""Immutable decision-diagram circuits normalized to a vtree.

A circuit is an arena of units with children stored before parents:

  * LiteralUnit / TrueUnit sit on vtree leaves.  A TrueUnit encodes the
    constant true with a Bernoulli parameter theta = P(X=1).
  * SumUnit sits on an internal vtree node; its inputs are elements, i.e.
    weighted (prime, sub) product units whose prime lives on the left
    vtree child and whose sub lives on the right one.

Learned single-variable models are a bare input unit at the root; every
multi-variable circuit has a sum unit root.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .vtree import Vtree


@dataclass(frozen=True)
class LiteralUnit:
    vtree: int
    var: int
    positive: bool


@dataclass(frozen=True)
class TrueUnit:
    vtree: int
    var: int
    theta: float


@dataclass(frozen=True)
class Element:
    """Weighted product unit (prime, sub); fields are arena indices."""

    prime: int
    sub: int
    weight: float


@dataclass(frozen=True)
class SumUnit:
    vtree: int
    elements: tuple[Element, ...]


PsddNode = Union[LiteralUnit, TrueUnit, SumUnit]


def coerce_record(record, n: int) -> np.ndarray:
    """Validate a complete assignment over n variables; returns a uint8 vector."""
    arr = np.asarray(record)
    if arr.ndim != 1 or arr.shape[0] != n:
        raise ValueError(f"record has {arr.size} values, expected {n}")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError("record must be 0/1 valued")
    return arr.astype(np.uint8)


class Circuit:
    """Arena-backed circuit over a vtree.

    Invariants enforced at construction: element references point backwards
    (children before parents), every node is reachable from the root, input
    units sit on vtree leaves with the matching variable, and sum units sit
    on internal vtree nodes.  Parameter-level properties (weight sums,
    exclusivity, scope discipline) are checked by validate(), not here.
    """

    def __init__(self, vtree: Vtree, nodes: Sequence[PsddNode], root: int):
        nodes = tuple(nodes)
        if not nodes:
            raise ValueError("empty circuit")
        if not 0 <= root < len(nodes):
            raise ValueError(f"root index {root} out of range")
        for i, node in enumerate(nodes):
            if isinstance(node, SumUnit):
                if not 0 <= node.vtree < len(vtree.nodes) or vtree.is_leaf(node.vtree):
                    raise ValueError(f"sum unit {i} not on an internal vtree node")
                if not node.elements:
                    raise ValueError(f"sum unit {i} has no elements")
                for e in node.elements:
                    if not (0 <= e.prime < i and 0 <= e.sub < i):
                        raise ValueError(f"sum unit {i} references a later node")
            else:
                if not 0 <= node.vtree < len(vtree.nodes) or not vtree.is_leaf(node.vtree):
                    raise ValueError(f"input unit {i} not on a vtree leaf")
                if vtree.nodes[node.vtree].var != node.var:
                    raise ValueError(f"input unit {i} variable disagrees with its vtree leaf")
        reach = _reachable(nodes, root)
        if len(reach) != len(nodes):
            raise ValueError("arena contains nodes unreachable from the root")

        self.vtree = vtree
        self.nodes = nodes
        self.root = root
        self._scopes = _input_scopes(nodes)

    @property
    def variables(self) -> tuple[int, ...]:
        return self.vtree.variables

    @property
    def num_vars(self) -> int:
        return self.vtree.num_vars

    def node_scope(self, node: int) -> frozenset[int]:
        if not 0 <= node < len(self.nodes):
            raise ValueError(f"node index {node} out of range")
        return self._scopes[node]

    def __repr__(self) -> str:
        counts = size(self)
        return f"Circuit(vars={self.num_vars}, nodes={counts.nodes}, params={counts.parameters})"


def _reachable(nodes: Sequence[PsddNode], root: int) -> set[int]:
    seen = {root}
    stack = [root]
    while stack:
        node = nodes[stack.pop()]
        if isinstance(node, SumUnit):
            for e in node.elements:
                for child in (e.prime, e.sub):
                    if child not in seen:
                        seen.add(child)
                        stack.append(child)
    return seen


def _input_scopes(nodes: Sequence[PsddNode]) -> tuple[frozenset[int], ...]:
    """Per node, the variables of input units below it (single arena pass)."""
    scopes: list[frozenset[int]] = []
    for node in nodes:
        if isinstance(node, SumUnit):
            acc: frozenset[int] = frozenset()
            for e in node.elements:
                acc |= scopes[e.prime] | scopes[e.sub]
            scopes.append(acc)
        else:
            scopes.append(frozenset((node.var,)))
    return tuple(scopes)


class CircuitBuilder:
    """Grows a circuit arena; build() prunes unreachable nodes.

    With dedup=True, structurally identical nodes (same kind, vtree node,
    children and weights up to 1e-12) are shared, turning the emitted tree
    into a DAG.
    """

    def __init__(self, vtree: Vtree, dedup: bool = False):
        self.vtree = vtree
        self.nodes: list[PsddNode] = []
        self._dedup = dedup
        self._cache: dict[tuple, int] = {}

    def _add(self, node: PsddNode, key: tuple) -> int:
        if self._dedup:
            hit = self._cache.get(key)
            if hit is not None:
                return hit
        self.nodes.append(node)
        idx = len(self.nodes) - 1
        if self._dedup:
            self._cache[key] = idx
        return idx

    def literal(self, vtree_id: int, var: int, positive: bool) -> int:
        if not self.vtree.is_leaf(vtree_id) or self.vtree.nodes[vtree_id].var != var:
            raise ValueError(f"literal on X{var} must sit on that variable's vtree leaf")
        return self._add(LiteralUnit(vtree_id, var, bool(positive)), ("L", vtree_id, positive))

    def true(self, vtree_id: int, var: int, theta: float) -> int:
        if not self.vtree.is_leaf(vtree_id) or self.vtree.nodes[vtree_id].var != var:
            raise ValueError(f"true unit on X{var} must sit on that variable's vtree leaf")
        theta = float(theta)
        if not 0.0 <= theta <= 1.0 or not np.isfinite(theta):
            raise ValueError(f"theta {theta} outside [0, 1]")
        return self._add(TrueUnit(vtree_id, var, theta), ("T", vtree_id, _quantize(theta)))

    def sum(self, vtree_id: int, elements: Iterable) -> int:
        if self.vtree.is_leaf(vtree_id):
            raise ValueError("sum unit must sit on an internal vtree node")
        elems = []
        for item in elements:
            e = item if isinstance(item, Element) else Element(item[0], item[1], float(item[2]))
            if not (0 <= e.prime < len(self.nodes) and 0 <= e.sub < len(self.nodes)):
                raise ValueError("element references an unknown node")
            elems.append(e)
        if not elems:
            raise ValueError("sum unit needs at least one element")
        key = ("D", vtree_id, tuple((e.prime, e.sub, _quantize(e.weight)) for e in elems))
        return self._add(SumUnit(vtree_id, tuple(elems)), key)

    def build(self, root: int) -> Circuit:
        """Finalize: drop nodes unreachable from root, keep relative order."""
        if not 0 <= root < len(self.nodes):
            raise ValueError(f"root index {root} out of range")
        keep = sorted(_reachable(self.nodes, root))
        remap = {old: new for new, old in enumerate(keep)}
        pruned: list[PsddNode] = []
        for old in keep:
            node = self.nodes[old]
            if isinstance(node, SumUnit):
                node = SumUnit(
                    node.vtree,
                    tuple(Element(remap[e.prime], remap[e.sub], e.weight) for e in node.elements),
                )
            pruned.append(node)
        return Circuit(self.vtree, pruned, remap[root])


def _quantize(w: float) -> int:
    # 1e-12 grid; dedup treats weights on the same cell as equal
    return int(round(float(w) * 1e12))


def scope(circuit: Circuit, node: int) -> frozenset[int]:
    """Variables of the input units reachable from the node."""
    return circuit.node_scope(node)


@dataclass(frozen=True)
class CircuitSize:
    """Counting convention: nodes = input units + elements (product units)
    + sum units; edges = sum->element, element->prime and element->sub arcs;
    parameters = (k - 1) free weights per k-element sum unit plus one per
    TrueUnit."""

    nodes: int
    edges: int
    parameters: int


def size(circuit: Circuit) -> CircuitSize:
    inputs = sums = elements = params = 0
    for node in circuit.nodes:
        if isinstance(node, SumUnit):
            sums += 1
            elements += len(node.elements)
            params += len(node.elements) - 1
        else:
            inputs += 1
            if isinstance(node, TrueUnit):
                params += 1
    return CircuitSize(inputs + elements + sums, 3 * elements, params)


WEIGHT_SUM_TOL = 1e-9


@dataclass(frozen=True)
class Violation:
    kind: str
    node: int
    message: str

    def __str__(self) -> str:
        return f"[{self.kind}] node {self.node}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(circuit: Circuit) -> ValidationReport:
    """Check every structural and parameter invariant; violations are
    report entries, never exceptions.

    Checks: root kind (sum unit, or a bare input unit when the vtree is a
    single leaf), theta strictly inside (0, 1), nonnegative weights summing
    to 1 within 1e-9, prime/sub normalized to the vtree split at every sum
    unit, and pairwise prime exclusivity.  Dead branches cannot be
    represented (sum units reject empty element lists and input units are
    always satisfiable), so no separate check is needed.
    """
    from .logic import conjoin_satisfiable_nodes

    violations: list[Violation] = []
    report = violations.append

    root_node = circuit.nodes[circuit.root]
    if not isinstance(root_node, SumUnit) and circuit.num_vars > 1:
        report(Violation("root", circuit.root, "root of a multi-variable circuit is not a sum unit"))

    for i, node in enumerate(circuit.nodes):
        if isinstance(node, TrueUnit):
            if not 0.0 < node.theta < 1.0:
                report(Violation("theta", i, f"theta {node.theta} not strictly inside (0, 1)"))
        elif isinstance(node, SumUnit):
            weights = [e.weight for e in node.elements]
            if any(w < 0 for w in weights):
                report(Violation("weight", i, "negative element weight"))
            total = sum(weights)
            if abs(total - 1.0) > WEIGHT_SUM_TOL:
                report(Violation("weight", i, f"element weights sum to {total!r}, not 1"))

            vnode = circuit.vtree.nodes[node.vtree]
            left_scope = circuit.vtree.scopes[vnode.left]
            right_scope = circuit.vtree.scopes[vnode.right]
            for j, e in enumerate(node.elements):
                if _vtree_of(circuit.nodes[e.prime]) != vnode.left:
                    report(Violation("scope", i, f"element {j} prime not on left vtree child"))
                if _vtree_of(circuit.nodes[e.sub]) != vnode.right:
                    report(Violation("scope", i, f"element {j} sub not on right vtree child"))
                if circuit.node_scope(e.prime) - left_scope:
                    report(Violation("scope", i, f"element {j} prime scope escapes {set(left_scope)}"))
                if circuit.node_scope(e.sub) - right_scope:
                    report(Violation("scope", i, f"element {j} sub scope escapes {set(right_scope)}"))

            primes = [e.prime for e in node.elements]
            for a in range(len(primes)):
                for b in range(a + 1, len(primes)):
                    same_vtree = _vtree_of(circuit.nodes[primes[a]]) == _vtree_of(
                        circuit.nodes[primes[b]]
                    )
                    if same_vtree and conjoin_satisfiable_nodes(
                        circuit.nodes, primes[a], primes[b]
                    ):
                        report(
                            Violation(
                                "exclusivity",
                                i,
                                f"primes of elements {a} and {b} are jointly satisfiable",
                            )
                        )
    return ValidationReport(tuple(violations))


def _vtree_of(node: PsddNode) -> int:
    return node.vtree
