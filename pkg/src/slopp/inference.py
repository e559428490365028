"""Exact evaluation of the probability mass function a circuit induces.

All arithmetic runs in log space with -inf standing for probability zero;
a record inconsistent with the circuit's base comes out at exactly -inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuits import Circuit, CircuitBuilder, LiteralUnit, TrueUnit, coerce_record
from .data import Dataset
from .vtree import right_linear_vtree

NEG_INF = float("-inf")


def _log(x: float) -> float:
    return math.log(x) if x > 0.0 else NEG_INF


def log_probs(circuit: Circuit, records) -> np.ndarray:
    """Natural-log probability of each row of a (m, n) 0/1 matrix.

    Single bottom-up pass per batch: input units read their column, an
    element contributes log-weight + prime + sub, and a sum unit combines
    its elements with logaddexp (for a deterministic circuit at most one
    element is live per record, so this reduces to picking it).
    """
    rows = np.asarray(records)
    if rows.ndim != 2 or rows.shape[1] != circuit.num_vars:
        raise ValueError(f"record matrix must have {circuit.num_vars} columns")
    if rows.size and not np.isin(rows, (0, 1)).all():
        raise ValueError("records must be 0/1 valued")
    m = rows.shape[0]
    values: list[np.ndarray] = []
    for node in circuit.nodes:
        if isinstance(node, LiteralUnit):
            hit = rows[:, node.var - 1] == (1 if node.positive else 0)
            values.append(np.where(hit, 0.0, NEG_INF))
        elif isinstance(node, TrueUnit):
            on = rows[:, node.var - 1] == 1
            values.append(np.where(on, _log(node.theta), _log(1.0 - node.theta)))
        else:
            acc = np.full(m, NEG_INF)
            for e in node.elements:
                term = _log(e.weight) + values[e.prime] + values[e.sub]
                np.logaddexp(acc, term, out=acc)
            values.append(acc)
    return values[circuit.root]


def log_prob(circuit: Circuit, record) -> float:
    """Natural-log probability of one complete assignment (-inf if outside
    the logical base)."""
    rec = coerce_record(record, circuit.num_vars)
    return float(log_probs(circuit, rec[None, :])[0])


@dataclass(frozen=True)
class EvalReport:
    """Log-likelihood over the consistent records plus the count of
    inconsistent ones (gamma).  gamma + consistent_count = total records."""

    ll: float
    gamma: int
    consistent_count: int
    per_record: tuple[float, ...] | None = None


def dataset_ll(circuit: Circuit, data: Dataset, per_record: bool = False) -> EvalReport:
    """Evaluate a database: ll sums count * log_prob over the records the
    circuit is consistent with; the rest are tallied in gamma."""
    if data.variables != circuit.variables:
        raise ValueError(
            f"dataset variables {data.variables} do not match circuit variables {circuit.variables}"
        )
    lp = log_probs(circuit, data.records)
    finite = np.isfinite(lp)
    ll = float(np.dot(data.counts[finite], lp[finite])) if finite.any() else 0.0
    gamma = int(data.counts[~finite].sum())
    report = EvalReport(
        ll=ll,
        gamma=gamma,
        consistent_count=data.num_records - gamma,
        per_record=tuple(float(v) for v in lp) if per_record else None,
    )
    return report


DEFAULT_ENUMERATION_LIMIT = 20


def enumerate_support(circuit: Circuit, limit: int = DEFAULT_ENUMERATION_LIMIT) -> dict:
    """All complete assignments with positive probability, mapped to it.

    Walks the circuit's support (primes restrict the left variables) rather
    than testing all 2^n assignments, so the result size is the support
    size.  Keys are 0/1 tuples in ascending variable order; values sum to 1
    up to float rounding.  Raises for scopes larger than `limit`.
    """
    root_scope = circuit.node_scope(circuit.root)
    if len(root_scope) > limit:
        raise ValueError(
            f"enumeration limit: scope has {len(root_scope)} variables, limit is {limit}"
        )
    tables: list[dict[tuple[int, ...], float]] = []
    scopes: list[tuple[int, ...]] = []
    for idx, node in enumerate(circuit.nodes):
        if isinstance(node, LiteralUnit):
            tables.append({(1 if node.positive else 0,): 1.0})
            scopes.append((node.var,))
        elif isinstance(node, TrueUnit):
            tables.append({(1,): node.theta, (0,): 1.0 - node.theta})
            scopes.append((node.var,))
        else:
            merged: dict[tuple[int, ...], float] = {}
            scope_vars = tuple(sorted(circuit.node_scope(idx)))
            for e in node.elements:
                if e.weight <= 0.0:
                    continue
                part = _cross(
                    scopes[e.prime], tables[e.prime], scopes[e.sub], tables[e.sub], scope_vars
                )
                for key, p in part.items():
                    merged[key] = merged.get(key, 0.0) + e.weight * p
            tables.append(merged)
            scopes.append(scope_vars)
    return tables[circuit.root]


def _cross(pscope, ptable, sscope, stable, out_scope):
    """Product of two disjoint-scope tables, keyed on the merged scope."""
    pos = {v: i for i, v in enumerate(out_scope)}
    out: dict[tuple[int, ...], float] = {}
    for pkey, pval in ptable.items():
        for skey, sval in stable.items():
            bits = [0] * len(out_scope)
            for v, b in zip(pscope, pkey):
                bits[pos[v]] = b
            for v, b in zip(sscope, skey):
                bits[pos[v]] = b
            out[tuple(bits)] = pval * sval
    return out


def fully_factorized(data: Dataset, laplace: float = 1.0) -> Circuit:
    """Independent Bernoulli baseline on a right-linear vtree.

    Per-variable theta is the add-one (by default) smoothed frequency, so
    theta stays strictly inside (0, 1) even for pure columns and the
    circuit's base is the tautology: no test record is ever inconsistent.
    """
    if data.num_records == 0:
        raise ValueError("no records")
    vtree = right_linear_vtree(data.variables)
    builder = CircuitBuilder(vtree)
    m = data.num_records

    def build(vtree_id: int) -> int:
        vnode = vtree.nodes[vtree_id]
        if vnode.is_leaf:
            theta = (data.count_true(vnode.var) + laplace) / (m + 2.0 * laplace)
            return builder.true(vtree_id, vnode.var, theta)
        prime = build(vnode.left)
        sub = build(vnode.right)
        return builder.sum(vtree_id, [(prime, sub, 1.0)])

    return builder.build(build(vtree.root))
