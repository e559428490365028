"""Vtrees: full binary trees over Boolean variables.

A vtree fixes, for every decision node of a circuit, how the node's scope
splits into a left (prime) part and a right (sub) part.  Nodes live in an
arena ordered children-before-parents; a node's id is its arena index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class VtreeNode:
    """A leaf carries a 1-based variable id; an internal node carries child ids."""

    var: int | None
    left: int | None
    right: int | None

    @property
    def is_leaf(self) -> bool:
        return self.var is not None


class Vtree:
    """Full binary tree whose leaves are in one-to-one correspondence with
    the variables 1..n.

    Attributes:
        nodes: arena of VtreeNode, children before parents.
        root: arena index of the root.
        scopes: per-node frozenset of the variables below that node.
        variables: all variables, ascending.
    """

    def __init__(self, nodes: Sequence[VtreeNode], root: int):
        nodes = tuple(nodes)
        if not nodes:
            raise ValueError("vtree has no nodes")
        if not 0 <= root < len(nodes):
            raise ValueError(f"root id {root} out of range")

        parents: dict[int, int] = {}
        scopes: list[frozenset[int]] = []
        for i, node in enumerate(nodes):
            if node.is_leaf:
                if node.left is not None or node.right is not None:
                    raise ValueError(f"leaf node {i} has children")
                if node.var < 1:
                    raise ValueError(f"variable id {node.var} is not 1-based")
                scopes.append(frozenset((node.var,)))
            else:
                if node.left is None or node.right is None:
                    raise ValueError(f"internal node {i} lacks two children")
                for child in (node.left, node.right):
                    if not 0 <= child < i:
                        raise ValueError(
                            f"node {i} references child {child} not declared before it"
                        )
                    if child in parents:
                        raise ValueError(f"node {child} has two parents")
                    parents[child] = i
                overlap = scopes[node.left] & scopes[node.right]
                if overlap:
                    raise ValueError(f"duplicate variables {sorted(overlap)} under node {i}")
                scopes.append(scopes[node.left] | scopes[node.right])

        # A tree on the arena: everything except the root has one parent.
        orphans = [i for i in range(len(nodes)) if i != root and i not in parents]
        if orphans or root in parents:
            raise ValueError("arena is not a single tree rooted at the given root")

        allvars = sorted(scopes[root])
        if allvars != list(range(1, len(allvars) + 1)):
            raise ValueError(f"leaf variables {allvars} are not exactly 1..n")

        self.nodes = nodes
        self.root = root
        self.scopes = tuple(scopes)
        self.variables = tuple(allvars)

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    def is_leaf(self, node_id: int) -> bool:
        return self.nodes[node_id].is_leaf

    @classmethod
    def from_nested(cls, spec) -> "Vtree":
        """Build from nested pairs, e.g. ((1, 2), (3, 4)).

        An int is a leaf variable; a 2-tuple is an internal node.  The arena
        is emitted in post-order (left subtree, right subtree, node).
        """
        nodes: list[VtreeNode] = []

        def emit(s) -> int:
            if isinstance(s, (int, np.integer)):
                nodes.append(VtreeNode(int(s), None, None))
            else:
                if len(s) != 2:
                    raise ValueError(f"internal vtree spec must be a pair, got {s!r}")
                left = emit(s[0])
                right = emit(s[1])
                nodes.append(VtreeNode(None, left, right))
            return len(nodes) - 1

        return cls(nodes, emit(spec))

    def to_nested(self, node_id: int | None = None):
        """Inverse of from_nested; canonical structural form."""
        node = self.nodes[self.root if node_id is None else node_id]
        if node.is_leaf:
            return node.var
        return (self.to_nested(node.left), self.to_nested(node.right))

    def __eq__(self, other) -> bool:
        return isinstance(other, Vtree) and self.to_nested() == other.to_nested()

    def __hash__(self) -> int:
        return hash(self.to_nested())

    def __repr__(self) -> str:
        return f"Vtree({self.to_nested()!r})"


def balanced_vtree(variables: Sequence[int]) -> Vtree:
    """Recursively halve the variable list; the left half gets the extra item."""
    vs = [int(v) for v in variables]
    if not vs:
        raise ValueError("no variables")

    def split(part):
        if len(part) == 1:
            return part[0]
        mid = (len(part) + 1) // 2
        return (split(part[:mid]), split(part[mid:]))

    return Vtree.from_nested(split(vs))


def right_linear_vtree(variables: Sequence[int]) -> Vtree:
    """Chain vtree (v1, (v2, (v3, ...)))."""
    vs = [int(v) for v in variables]
    if not vs:
        raise ValueError("no variables")
    spec = vs[-1]
    for v in reversed(vs[:-1]):
        spec = (v, spec)
    return Vtree.from_nested(spec)


def random_vtree(variables: Sequence[int], seed: int = 0) -> Vtree:
    """Random full binary tree over a random variable order; deterministic given seed."""
    vs = [int(v) for v in variables]
    if not vs:
        raise ValueError("no variables")
    rng = np.random.default_rng(seed)
    order = [vs[i] for i in rng.permutation(len(vs))]

    def split(part):
        if len(part) == 1:
            return part[0]
        cut = int(rng.integers(1, len(part)))
        return (split(part[:cut]), split(part[cut:]))

    return Vtree.from_nested(split(order))
