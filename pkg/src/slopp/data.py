"""Binary databases with multiplicity counts.

Rows are stored distinct; the count column carries multiplicities, so a
database of m records over n variables occupies an (r, n) matrix with
r <= m distinct rows.  Row order is first appearance, which downstream
code relies on for reproducibility.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


def _aggregate(rows: np.ndarray, counts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Merge duplicate rows, summing counts, keeping first-appearance order."""
    if len(rows) == 0:
        return rows, counts
    uniq, first, inverse = np.unique(rows, axis=0, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty(len(uniq), dtype=np.int64)
    rank[order] = np.arange(len(uniq))
    summed = np.zeros(len(uniq), dtype=np.int64)
    np.add.at(summed, inverse, counts)
    return uniq[order], summed[order]


@dataclass(frozen=True, eq=False)
class Dataset:
    """Distinct binary records with counts over named variables.

    variables: ascending 1-based variable ids, one per column.
    records: (r, n) uint8 matrix of distinct rows.
    counts: (r,) positive multiplicities.
    """

    variables: tuple[int, ...]
    records: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        if len(self.variables) == 0:
            raise ValueError("dataset needs at least one variable")
        if list(self.variables) != sorted(set(self.variables)):
            raise ValueError("variables must be distinct and ascending")
        if self.records.ndim != 2 or self.records.shape[1] != len(self.variables):
            raise ValueError("record matrix shape does not match variables")
        if len(self.counts) != len(self.records):
            raise ValueError("counts do not align with records")
        if len(self.counts) and self.counts.min() < 1:
            raise ValueError("counts must be >= 1")

    @classmethod
    def from_records(
        cls,
        rows,
        counts: Sequence[int] | None = None,
        variables: Sequence[int] | None = None,
    ) -> "Dataset":
        """Build a dataset, aggregating duplicate rows.

        rows may be any (m, n) 0/1 array-like; counts default to 1 per row;
        variables default to 1..n.
        """
        if variables is not None:
            n = len(tuple(variables))
            arr = np.asarray(rows, dtype=np.int64).reshape(-1, n)
        else:
            arr = np.asarray(rows, dtype=np.int64)
            if arr.ndim != 2:
                raise ValueError("rows must form a 2-D matrix")
            n = arr.shape[1]
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise ValueError("records must be 0/1 valued")
        if counts is None:
            cnt = np.ones(len(arr), dtype=np.int64)
        else:
            cnt = np.asarray(counts, dtype=np.int64)
            if len(cnt) != len(arr):
                raise ValueError("counts do not align with rows")
            if len(cnt) and cnt.min() < 1:
                raise ValueError("counts must be >= 1")
        if variables is None:
            variables = range(1, n + 1)
        rows8, cnt = _aggregate(arr.astype(np.uint8), cnt)
        return cls(tuple(int(v) for v in variables), rows8, cnt)

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    @property
    def num_distinct(self) -> int:
        return len(self.records)

    @property
    def num_records(self) -> int:
        return int(self.counts.sum())

    def column(self, var: int) -> np.ndarray:
        return self.records[:, self.variables.index(var)]

    def count_true(self, var: int) -> int:
        """Total multiplicity of records with the variable set to 1."""
        return int(self.counts[self.column(var) == 1].sum())

    def project(self, variables, return_inverse: bool = False):
        """Keep only the given columns, merging rows that become identical.

        With return_inverse, also return the map from this dataset's row
        index to the projected row index.
        """
        vs = sorted(int(v) for v in variables)
        missing = set(vs) - set(self.variables)
        if missing:
            raise ValueError(f"variables {sorted(missing)} not in dataset")
        cols = [self.variables.index(v) for v in vs]
        sub = self.records[:, cols]
        if len(sub) == 0:
            proj = Dataset(tuple(vs), sub, self.counts)
            return (proj, np.zeros(0, dtype=np.int64)) if return_inverse else proj
        uniq, first, inverse = np.unique(sub, axis=0, return_index=True, return_inverse=True)
        order = np.argsort(first, kind="stable")
        rank = np.empty(len(uniq), dtype=np.int64)
        rank[order] = np.arange(len(uniq))
        summed = np.zeros(len(uniq), dtype=np.int64)
        np.add.at(summed, inverse, self.counts)
        proj = Dataset(tuple(vs), uniq[order], summed[order])
        if return_inverse:
            return proj, rank[inverse.ravel()]
        return proj

    def select(self, index) -> "Dataset":
        """Subset of distinct rows by index array or boolean mask."""
        idx = np.asarray(index)
        return Dataset(self.variables, self.records[idx], self.counts[idx])

    def concat(self, other: "Dataset") -> "Dataset":
        """Pool two databases over the same variables (counts add up)."""
        if self.variables != other.variables:
            raise ValueError("cannot concatenate datasets over different variables")
        rows = np.concatenate([self.records, other.records])
        cnt = np.concatenate([self.counts, other.counts])
        rows, cnt = _aggregate(rows, cnt)
        return Dataset(self.variables, rows, cnt)

    def __repr__(self) -> str:
        return (
            f"Dataset(vars={len(self.variables)}, distinct={self.num_distinct}, "
            f"records={self.num_records})"
        )
