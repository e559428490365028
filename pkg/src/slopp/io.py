"""Readers and writers for the three text formats.

Datasets: one record per line, comma-separated 0/1 values; identical lines
aggregate into one row with a count.

Vtrees::

    c <comment>
    vtree <node-count>
    L <id> <var>
    I <id> <left-id> <right-id>

Circuits::

    c <comment>
    psdd <node-count>
    T <id> <vtree-id> <var> <log-theta>
    L <id> <vtree-id> <lit>            (lit is a signed variable id)
    D <id> <vtree-id> <k> <p1> <s1> <log-w1> ... <pk> <sk> <log-wk>

Children are declared before parents and the last declared node is the
root.  Weights travel as natural logs printed with 17 significant digits,
which round-trips doubles exactly.  Files are UTF-8 with \\n endings
(\\r tolerated on read); writes go through a temp file and rename.
"""

from __future__ import annotations

import math
import os
import tempfile

from .circuits import Circuit, CircuitBuilder, LiteralUnit, TrueUnit
from .data import Dataset
from .vtree import Vtree, VtreeNode

WEIGHT_READ_TOL = 1e-6


class FileFormatError(Exception):
    """A malformed input file; carries the path and 1-based line number."""

    def __init__(self, path, line: int, message: str):
        self.path = str(path)
        self.line = max(1, int(line))
        self.message = message
        super().__init__(f"{self.path}:{self.line}: {message}")


def _atomic_write(path, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _content_lines(path):
    """Yield (line_number, stripped_line), skipping comments and blanks."""
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.startswith("c"):
                continue
            yield lineno, line


def load_dataset(path) -> Dataset:
    """Read a record-per-line 0/1 CSV, aggregating duplicate lines."""
    rows: list[list[int]] = []
    n = None
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                # a terminating "\n" never yields an empty line, so any
                # blank is a real formatting problem
                raise FileFormatError(path, lineno, "blank line in dataset")
            tokens = [tok.strip() for tok in line.split(",")]
            bits = []
            for tok in tokens:
                if tok not in ("0", "1"):
                    raise FileFormatError(path, lineno, f"non-binary token {tok!r}")
                bits.append(int(tok))
            if n is None:
                n = len(bits)
            elif len(bits) != n:
                raise FileFormatError(
                    path, lineno, f"record has {len(bits)} values, expected {n}"
                )
            rows.append(bits)
    if not rows:
        raise FileFormatError(path, 1, "empty dataset")
    return Dataset.from_records(rows)


def write_dataset(data: Dataset, path) -> None:
    """Inverse of load_dataset; multiplicities expand to repeated lines."""
    lines = []
    for row, count in zip(data.records, data.counts):
        lines.extend([",".join(str(int(b)) for b in row)] * int(count))
    _atomic_write(path, "\n".join(lines) + "\n")


def write_vtree(vtree: Vtree, path) -> None:
    """Ids are arena indices, so children always precede parents and the
    root is declared last."""
    lines = ["c vtree: L <id> <var> | I <id> <left> <right>", f"vtree {len(vtree.nodes)}"]
    for i, node in enumerate(vtree.nodes):
        if node.is_leaf:
            lines.append(f"L {i} {node.var}")
        else:
            lines.append(f"I {i} {node.left} {node.right}")
    _atomic_write(path, "\n".join(lines) + "\n")


def read_vtree(path) -> Vtree:
    declared = None
    ids: dict[int, int] = {}  # file id -> arena index
    nodes: list[VtreeNode] = []
    seen_vars: set[int] = set()
    for lineno, line in _content_lines(path):
        tokens = line.split()
        tag = tokens[0]
        if tag == "vtree":
            if declared is not None:
                raise FileFormatError(path, lineno, "duplicate vtree header")
            declared = _int_token(path, lineno, tokens, 1, "node count")
            continue
        if declared is None:
            raise FileFormatError(path, lineno, "missing 'vtree <count>' header")
        if tag == "L":
            if len(tokens) != 3:
                raise FileFormatError(path, lineno, "leaf line needs 'L <id> <var>'")
            fid = _int_token(path, lineno, tokens, 1, "node id")
            var = _int_token(path, lineno, tokens, 2, "variable")
            if var in seen_vars:
                raise FileFormatError(path, lineno, f"duplicate variable {var}")
            seen_vars.add(var)
            node = VtreeNode(var, None, None)
        elif tag == "I":
            if len(tokens) != 4:
                raise FileFormatError(path, lineno, "internal line needs 'I <id> <left> <right>'")
            fid = _int_token(path, lineno, tokens, 1, "node id")
            left = _int_token(path, lineno, tokens, 2, "left child")
            right = _int_token(path, lineno, tokens, 3, "right child")
            for child in (left, right):
                if child not in ids:
                    raise FileFormatError(path, lineno, f"child {child} not declared yet")
            node = VtreeNode(None, ids[left], ids[right])
        else:
            raise FileFormatError(path, lineno, f"unknown tag {tag!r}")
        if fid in ids:
            raise FileFormatError(path, lineno, f"duplicate node id {fid}")
        ids[fid] = len(nodes)
        nodes.append(node)
    if declared is None:
        raise FileFormatError(path, 1, "missing 'vtree <count>' header")
    if declared != len(nodes):
        raise FileFormatError(path, 1, f"header declares {declared} nodes, found {len(nodes)}")
    try:
        return Vtree(nodes, len(nodes) - 1)
    except ValueError as err:
        raise FileFormatError(path, 1, str(err)) from err


def _int_token(path, lineno: int, tokens: list[str], pos: int, what: str) -> int:
    if pos >= len(tokens):
        raise FileFormatError(path, lineno, f"missing {what}")
    try:
        return int(tokens[pos])
    except ValueError:
        raise FileFormatError(path, lineno, f"bad {what} {tokens[pos]!r}") from None


def _float_token(path, lineno: int, tokens: list[str], pos: int, what: str) -> float:
    if pos >= len(tokens):
        raise FileFormatError(path, lineno, f"missing {what}")
    try:
        return float(tokens[pos])
    except ValueError:
        raise FileFormatError(path, lineno, f"bad {what} {tokens[pos]!r}") from None


def _log_str(weight: float) -> str:
    return f"{math.log(weight) if weight > 0.0 else float('-inf'):.17g}"


def write_psdd(circuit: Circuit, path) -> None:
    lines = [
        "c psdd: T <id> <vtree> <var> <log-theta> | L <id> <vtree> <lit>",
        "c       | D <id> <vtree> <k> {<prime> <sub> <log-weight>}*k",
        f"psdd {len(circuit.nodes)}",
    ]
    # the root is the last arena node: everything is reachable from it and
    # children precede parents, so arena order serializes directly
    for i, node in enumerate(circuit.nodes):
        if isinstance(node, TrueUnit):
            lines.append(f"T {i} {node.vtree} {node.var} {_log_str(node.theta)}")
        elif isinstance(node, LiteralUnit):
            lit = node.var if node.positive else -node.var
            lines.append(f"L {i} {node.vtree} {lit}")
        else:
            parts = [f"D {i} {node.vtree} {len(node.elements)}"]
            for e in node.elements:
                parts.append(f"{e.prime} {e.sub} {_log_str(e.weight)}")
            lines.append(" ".join(parts))
    _atomic_write(path, "\n".join(lines) + "\n")


def read_psdd(path) -> Circuit:
    """Parse a circuit; the vtree is rebuilt from the node annotations.

    Every sum unit pins its vtree node's children (primes sit on the left
    child, subs on the right), and input units pin the leaf variables, so
    the vtree is fully determined; contradictory annotations are format
    errors.  The last declared node is the root.
    """
    declared = None
    ids: dict[int, int] = {}
    raw_nodes: list[tuple] = []  # ("T", vid, var, theta) | ("L", vid, lit) | ("D", vid, elems)
    lineno_of: list[int] = []
    for lineno, line in _content_lines(path):
        tokens = line.split()
        tag = tokens[0]
        if tag == "psdd":
            if declared is not None:
                raise FileFormatError(path, lineno, "duplicate psdd header")
            declared = _int_token(path, lineno, tokens, 1, "node count")
            continue
        if declared is None:
            raise FileFormatError(path, lineno, "missing 'psdd <count>' header")
        if tag == "T":
            if len(tokens) != 5:
                raise FileFormatError(path, lineno, "true-unit line needs 4 fields")
            fid = _int_token(path, lineno, tokens, 1, "node id")
            vid = _int_token(path, lineno, tokens, 2, "vtree id")
            var = _int_token(path, lineno, tokens, 3, "variable")
            theta = math.exp(_float_token(path, lineno, tokens, 4, "log-theta"))
            if not 0.0 < theta < 1.0:
                raise FileFormatError(path, lineno, f"theta {theta!r} outside (0, 1)")
            entry = ("T", vid, var, theta)
        elif tag == "L":
            if len(tokens) != 4:
                raise FileFormatError(path, lineno, "literal line needs 3 fields")
            fid = _int_token(path, lineno, tokens, 1, "node id")
            vid = _int_token(path, lineno, tokens, 2, "vtree id")
            lit = _int_token(path, lineno, tokens, 3, "literal")
            if lit == 0:
                raise FileFormatError(path, lineno, "literal 0 is not a signed variable")
            entry = ("L", vid, lit)
        elif tag == "D":
            count = _int_token(path, lineno, tokens, 3, "element count")
            if count < 1:
                raise FileFormatError(path, lineno, "sum unit needs at least one element")
            if len(tokens) != 4 + 3 * count:
                raise FileFormatError(
                    path, lineno, f"expected {4 + 3 * count} fields for {count} elements"
                )
            fid = _int_token(path, lineno, tokens, 1, "node id")
            vid = _int_token(path, lineno, tokens, 2, "vtree id")
            elems = []
            for j in range(count):
                p = _int_token(path, lineno, tokens, 4 + 3 * j, "prime id")
                s = _int_token(path, lineno, tokens, 5 + 3 * j, "sub id")
                logw = _float_token(path, lineno, tokens, 6 + 3 * j, "log-weight")
                for ref in (p, s):
                    if ref not in ids:
                        raise FileFormatError(path, lineno, f"node {ref} not declared yet")
                elems.append((ids[p], ids[s], math.exp(logw)))
            total = sum(w for _, _, w in elems)
            if abs(total - 1.0) > WEIGHT_READ_TOL:
                raise FileFormatError(path, lineno, f"element weights sum to {total!r}, not 1")
            entry = ("D", vid, tuple(elems))
        else:
            raise FileFormatError(path, lineno, f"unknown tag {tag!r}")
        if fid in ids:
            raise FileFormatError(path, lineno, f"duplicate node id {fid}")
        ids[fid] = len(raw_nodes)
        raw_nodes.append(entry)
        lineno_of.append(lineno)
    if declared is None:
        raise FileFormatError(path, 1, "missing 'psdd <count>' header")
    if declared != len(raw_nodes):
        raise FileFormatError(path, 1, f"header declares {declared} nodes, found {len(raw_nodes)}")

    vtree, vid_map = _rebuild_vtree(path, raw_nodes, lineno_of)
    builder = CircuitBuilder(vtree)
    index: list[int] = []
    for entry, lineno in zip(raw_nodes, lineno_of):
        try:
            if entry[0] == "T":
                index.append(builder.true(vid_map[entry[1]], entry[2], entry[3]))
            elif entry[0] == "L":
                index.append(builder.literal(vid_map[entry[1]], abs(entry[2]), entry[2] > 0))
            else:
                elems = [(index[p], index[s], w) for p, s, w in entry[2]]
                index.append(builder.sum(vid_map[entry[1]], elems))
        except ValueError as err:
            raise FileFormatError(path, lineno, str(err)) from err
    return builder.build(index[-1])


def _rebuild_vtree(path, raw_nodes, lineno_of) -> tuple[Vtree, dict[int, int]]:
    """Derive the vtree from node annotations; returns it plus the map from
    file vtree ids to arena indices."""
    leaf_var: dict[int, int] = {}
    children: dict[int, tuple[int, int]] = {}
    for entry, lineno in zip(raw_nodes, lineno_of):
        if entry[0] == "T":
            vid, var = entry[1], entry[2]
        elif entry[0] == "L":
            vid, var = entry[1], abs(entry[2])
        else:
            vid = entry[1]
            for p, s, _ in entry[2]:
                pair = (raw_nodes[p][1], raw_nodes[s][1])
                if children.setdefault(vid, pair) != pair:
                    raise FileFormatError(
                        path, lineno, f"conflicting children for vtree node {vid}"
                    )
            if vid in leaf_var:
                raise FileFormatError(path, lineno, f"vtree node {vid} is both leaf and internal")
            continue
        if vid in children:
            raise FileFormatError(path, lineno, f"vtree node {vid} is both leaf and internal")
        if leaf_var.setdefault(vid, var) != var:
            raise FileFormatError(path, lineno, f"conflicting variables for vtree leaf {vid}")

    root_vid = raw_nodes[-1][1]
    nodes: list[VtreeNode] = []
    vid_map: dict[int, int] = {}

    def build(vid: int) -> int:
        if vid in vid_map:
            raise FileFormatError(path, 1, f"vtree node {vid} reached twice")
        if vid in leaf_var:
            nodes.append(VtreeNode(leaf_var[vid], None, None))
        elif vid in children:
            left, right = children[vid]
            lidx = build(left)
            ridx = build(right)
            nodes.append(VtreeNode(None, lidx, ridx))
        else:
            raise FileFormatError(path, 1, f"no information about vtree node {vid}")
        vid_map[vid] = len(nodes) - 1
        return vid_map[vid]

    root_idx = build(root_vid)
    try:
        return Vtree(nodes, root_idx), vid_map
    except ValueError as err:
        raise FileFormatError(path, 1, str(err)) from err
