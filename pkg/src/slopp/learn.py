"""Structure learning by recursive clustering under a partial closed-world
assumption, plus vtree construction heuristics.

The learner grows the circuit from the root.  At an internal vtree node it
clusters the records' left-variable projections, learns one element per
cluster (prime from the left projection, sub from the right projection of
the same records) and weights it by the cluster's share of the records.  At
a leaf it emits a literal when the column is pure and a Bernoulli true unit
at the empirical frequency otherwise.  A repair pass merges elements whose
primes overlap, which keeps the circuit deterministic without giving up the
relaxation property (the merged element still covers its records).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .circuits import Circuit, CircuitBuilder, Element
from .data import Dataset
from .logic import conjoin_satisfiable_nodes
from .vtree import Vtree, balanced_vtree, random_vtree, right_linear_vtree

ClusterFn = Callable[[Dataset, "LearnConfig", np.random.Generator], list[np.ndarray]]


@dataclass(frozen=True)
class LearnConfig:
    """Learner knobs.

    k: clusters per split; min_records: smallest database that still gets
    clustered (below it a single cluster holds everything); seed drives the
    k-means initialization; dedup shares structurally identical nodes.
    """

    k: int = 2
    min_records: int = 20
    seed: int = 0
    max_kmeans_iters: int = 100
    dedup: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.min_records < 1:
            raise ValueError("min_records must be >= 1")
        if self.max_kmeans_iters < 1:
            raise ValueError("max_kmeans_iters must be >= 1")


def cluster(
    left_data: Dataset, config: LearnConfig, rng: np.random.Generator | None = None
) -> list[np.ndarray]:
    """Partition the distinct rows of left_data into at most k groups.

    Returns disjoint, nonempty index arrays covering all rows.  A single
    cluster is returned when k is 1 or the record count (with
    multiplicities) is below min_records.  With at most k distinct rows,
    every row gets its own cluster; otherwise count-weighted k-means with
    squared-Euclidean distance and k-means++ initialization runs, dropping
    clusters that come out empty.  Deterministic given the generator state.
    """
    if left_data.num_records == 0:
        raise ValueError("cannot cluster an empty dataset")
    r = left_data.num_distinct
    if config.k == 1 or left_data.num_records < config.min_records or r == 1:
        return [np.arange(r)]
    if r <= config.k:
        return [np.array([i]) for i in range(r)]
    if rng is None:
        rng = np.random.default_rng(config.seed)
    labels = _weighted_kmeans(
        left_data.records.astype(np.float64),
        left_data.counts.astype(np.float64),
        config.k,
        rng,
        config.max_kmeans_iters,
    )
    return [np.flatnonzero(labels == c) for c in range(labels.max() + 1)]


def _weighted_kmeans(points, weights, k, rng, max_iters) -> np.ndarray:
    """Lloyd iterations over distinct points with multiplicity weights.

    k-means++ seeding; ties in the assignment step go to the lowest center
    index (argmin); empty clusters are dropped and labels re-compacted.
    """
    centers = points[_kmeanspp_indices(points, weights, k, rng)]
    labels = None
    for _ in range(max_iters):
        d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        assign = d2.argmin(axis=1)
        if labels is not None and np.array_equal(assign, labels):
            break
        occupied = np.unique(assign)
        if len(occupied) < len(centers):
            compact = np.full(len(centers), -1, dtype=np.int64)
            compact[occupied] = np.arange(len(occupied))
            assign = compact[assign]
        labels = assign
        centers = np.stack(
            [
                (points[labels == c] * weights[labels == c, None]).sum(axis=0)
                / weights[labels == c].sum()
                for c in range(labels.max() + 1)
            ]
        )
    return labels


def _kmeanspp_indices(points, weights, k, rng) -> list[int]:
    total = weights.sum()
    first = int(rng.choice(len(points), p=weights / total))
    chosen = [first]
    d2 = ((points - points[first]) ** 2).sum(axis=1)
    for _ in range(1, k):
        mass = weights * d2
        norm = mass.sum()
        if norm <= 0.0:
            break  # remaining points coincide with chosen centers
        nxt = int(rng.choice(len(points), p=mass / norm))
        chosen.append(nxt)
        d2 = np.minimum(d2, ((points - points[nxt]) ** 2).sum(axis=1))
    return chosen


def slopp(
    data: Dataset,
    vtree: Vtree,
    config: LearnConfig | None = None,
    cluster_fn: ClusterFn | None = None,
) -> Circuit:
    """Learn a circuit whose base relaxes the database's closed-world DNF.

    The result passes validate(); every training record stays consistent
    with it; sum weights are the clusters' record shares.  cluster_fn
    overrides the stock clustering policy (same signature as cluster()),
    which is how a caller pins an exact partition.
    """
    if config is None:
        config = LearnConfig()
    if data.num_records == 0:
        raise ValueError("no records")
    if data.variables != vtree.variables:
        raise ValueError(
            f"dataset variables {data.variables} do not match vtree variables {vtree.variables}"
        )
    builder = CircuitBuilder(vtree, dedup=config.dedup)
    learner = _Learner(builder, config, cluster_fn or cluster)
    root = learner.learn(data, vtree.root)
    return builder.build(root)


class _Learner:
    def __init__(self, builder: CircuitBuilder, config: LearnConfig, cluster_fn: ClusterFn):
        self.builder = builder
        self.vtree = builder.vtree
        self.config = config
        self.cluster_fn = cluster_fn

    def _rng(self, vtree_id: int) -> np.random.Generator:
        # one stream per vtree node keeps parallel and serial runs identical
        seq = np.random.SeedSequence([self.config.seed & 0xFFFFFFFF, vtree_id])
        return np.random.default_rng(seq)

    def learn(self, data: Dataset, vtree_id: int) -> int:
        vnode = self.vtree.nodes[vtree_id]
        if vnode.is_leaf:
            return self._learn_leaf(data, vtree_id, vnode.var)

        left_vars = sorted(self.vtree.scopes[vnode.left])
        left_proj, inverse = data.project(left_vars, return_inverse=True)
        groups = self.cluster_fn(left_proj, self.config, self._rng(vtree_id))
        parts = [data.select(np.isin(inverse, g)) for g in groups]
        total = data.num_records

        elements = [self._learn_element(part, vtree_id, total) for part in parts]
        elements, _ = enforce_exclusivity(
            self.builder,
            elements,
            parts,
            lambda merged: self._learn_element(merged, vtree_id, total),
        )
        return self.builder.sum(vtree_id, elements)

    def _learn_element(self, part: Dataset, vtree_id: int, total: int) -> Element:
        vnode = self.vtree.nodes[vtree_id]
        left_vars = sorted(self.vtree.scopes[vnode.left])
        right_vars = sorted(self.vtree.scopes[vnode.right])
        prime = self.learn(part.project(left_vars), vnode.left)
        sub = self.learn(part.project(right_vars), vnode.right)
        return Element(prime, sub, part.num_records / total)

    def _learn_leaf(self, data: Dataset, vtree_id: int, var: int) -> int:
        ones = data.count_true(var)
        m = data.num_records
        if ones == m:
            return self.builder.literal(vtree_id, var, True)
        if ones == 0:
            return self.builder.literal(vtree_id, var, False)
        return self.builder.true(vtree_id, var, ones / m)


def enforce_exclusivity(
    builder: CircuitBuilder,
    elements: Sequence[Element],
    parts: Sequence[Dataset],
    relearn: Callable[[Dataset], Element],
) -> tuple[list[Element], list[Dataset]]:
    """Merge elements until their primes are pairwise unsatisfiable together.

    elements were learned from the disjoint record clusters in parts.  Any
    two elements whose primes overlap are replaced by one element re-learned
    from the pooled records (relaxation is preserved: the pooled element
    still covers both record sets).  Terminates because each merge removes
    an element.  Dropped sub-circuits stay in the builder arena; build()
    prunes them.
    """
    elements = list(elements)
    parts = list(parts)
    while True:
        pair = _overlapping_pair(builder.nodes, elements)
        if pair is None:
            return elements, parts
        i, j = pair
        merged = parts[i].concat(parts[j])
        del elements[j], parts[j]
        elements[i] = relearn(merged)
        parts[i] = merged


def _overlapping_pair(nodes, elements) -> tuple[int, int] | None:
    memo: dict = {}
    for i in range(len(elements)):
        for j in range(i + 1, len(elements)):
            if conjoin_satisfiable_nodes(nodes, elements[i].prime, elements[j].prime, memo):
                return i, j
    return None


VTREE_METHODS = ("balanced", "right-linear", "random", "chow-liu")


def learn_vtree(data: Dataset, method: str = "chow-liu", seed: int = 0) -> Vtree:
    """Build a vtree over the dataset's variables.

    balanced / right-linear ignore the data; random shuffles and splits
    under the seed; chow-liu builds a maximum-spanning tree on pairwise
    mutual information (Laplace-1 smoothed) and converts it to a vtree by
    recursive balanced edge cuts.
    """
    if method == "balanced":
        return balanced_vtree(data.variables)
    if method == "right-linear":
        return right_linear_vtree(data.variables)
    if method == "random":
        return random_vtree(data.variables, seed)
    if method == "chow-liu":
        return chow_liu_vtree(data)
    raise ValueError(f"unknown vtree method {method!r}; expected one of {VTREE_METHODS}")


def mutual_information_matrix(data: Dataset) -> np.ndarray:
    """Pairwise mutual information (nats) between columns, Laplace-1 smoothed.

    Joint cell counts get +1 each (denominator m + 4); marginals come from
    the smoothed joint, so every term is strictly positive.
    """
    if data.num_records == 0:
        raise ValueError("no records")
    x = data.records.astype(np.float64)
    w = data.counts.astype(np.float64)
    m = w.sum()
    c11 = (x * w[:, None]).T @ x
    ones = (x * w[:, None]).sum(axis=0)
    c10 = ones[:, None] - c11
    c01 = ones[None, :] - c11
    c00 = m - c11 - c10 - c01
    mi = np.zeros_like(c11)
    denom = m + 4.0
    pa1 = (c11 + c10 + 2.0) / denom  # smoothed row-variable marginal
    pb1 = (c11 + c01 + 2.0) / denom
    for cell, pa, pb in (
        (c11, pa1, pb1),
        (c10, pa1, 1.0 - pb1),
        (c01, 1.0 - pa1, pb1),
        (c00, 1.0 - pa1, 1.0 - pb1),
    ):
        p = (cell + 1.0) / denom
        mi += p * np.log(p / (pa * pb))
    np.fill_diagonal(mi, 0.0)
    return mi


def chow_liu_vtree(data: Dataset) -> Vtree:
    """Maximum-spanning tree on mutual information, then recursive edge cuts.

    Cut choice: most balanced split first, then the weakest edge, then the
    lexicographically smallest variable pair; the component holding the
    smaller variable becomes the left child.  Fully deterministic.
    """
    variables = data.variables
    n = len(variables)
    if n == 1:
        return Vtree.from_nested(variables[0])
    mi = mutual_information_matrix(data)
    edges = [(variables[a], variables[b]) for a, b in _max_spanning_tree(mi)]

    def cut(vars_in: list[int], edges_in: list[tuple[int, int]]):
        if len(vars_in) == 1:
            return vars_in[0]
        best = None
        for edge in edges_in:
            side = _component(vars_in, [e for e in edges_in if e != edge], edge[0])
            a, b = len(side), len(vars_in) - len(side)
            u, v = variables.index(edge[0]), variables.index(edge[1])
            rank = (abs(a - b), mi[u, v], min(edge), max(edge))
            if best is None or rank < best[0]:
                best = (rank, edge, side)
        _, edge, side = best
        other = [v for v in vars_in if v not in side]
        if min(side) > min(other):
            side, other = other, side
        side_edges = [e for e in edges_in if e[0] in side and e[1] in side]
        other_edges = [e for e in edges_in if e[0] in other and e[1] in other]
        return (cut(sorted(side), side_edges), cut(sorted(other), other_edges))

    return Vtree.from_nested(cut(sorted(variables), edges))


def _max_spanning_tree(mi: np.ndarray) -> list[tuple[int, int]]:
    """Prim from column 0; ties break on the smaller column pair.

    Works in column-index space; callers translate to variable ids (the
    index order matches the ascending variable order, so the tie-break is
    also by lowest variable id)."""
    n = mi.shape[0]
    in_tree = [0]
    out = set(range(1, n))
    edges: list[tuple[int, int]] = []
    while out:
        best = None
        for t in in_tree:
            for u in sorted(out):
                rank = (-mi[t, u], min(t, u), max(t, u))
                if best is None or rank < best[0]:
                    best = (rank, t, u)
        _, t, u = best
        edges.append((t, u))
        in_tree.append(u)
        out.remove(u)
    return edges


def _component(vars_in: list[int], edges: list[tuple[int, int]], start: int) -> set[int]:
    seen = {start}
    frontier = [start]
    while frontier:
        v = frontier.pop()
        for a, b in edges:
            for x, y in ((a, b), (b, a)):
                if x == v and y not in seen:
                    seen.add(y)
                    frontier.append(y)
    return seen
