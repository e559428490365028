"""Walk through the four-variable worked example end to end.

A 30-record database over X1..X4 is compiled into a circuit whose logical
base relaxes the database's closed-world DNF: the circuit stays consistent
with every training record but also admits a few "virtual" records created
by crossing the left and right projections of each record cluster.

Run:  python3 demos/01_worked_example.py
"""

import tempfile
from pathlib import Path

from slopp import (
    Dataset,
    LearnConfig,
    Vtree,
    dataset_ll,
    dnf_of_database,
    enumerate_support,
    implies,
    read_psdd,
    size,
    slopp,
    validate,
    write_psdd,
    write_vtree,
)

# ---------------------------------------------------------------- the data
rows = [
    (0, 0, 1, 1),
    (0, 0, 0, 0),
    (1, 0, 0, 1),
    (0, 1, 1, 1),
    (0, 1, 1, 0),
    (1, 1, 0, 1),
    (1, 1, 1, 0),
]
counts = [3, 7, 2, 3, 9, 2, 4]
data = Dataset.from_records(rows, counts)
print(f"database: {data.num_records} records, {data.num_distinct} distinct\n")

# A vtree splits the variables recursively: primes will range over {X1, X2}
# and subs over {X3, X4} at the root.
vtree = Vtree.from_nested(((1, 2), (3, 4)))
print(f"vtree: {vtree.to_nested()}\n")

# ---------------------------------------------------------------- learning
config = LearnConfig(k=3, min_records=1, seed=0)
circuit = slopp(data, vtree, config)
counts_report = size(circuit)
print(f"learned circuit: {counts_report.nodes} nodes, "
      f"{counts_report.parameters} free parameters")
print(f"structurally valid: {validate(circuit).ok}")

# The closed-world DNF of the database entails the circuit's base: nothing
# observed is ever lost, only new possibilities are added.
print(f"training DNF entails the circuit: {implies(dnf_of_database(data), circuit)}\n")

# ---------------------------------------------------------------- support
support = enumerate_support(circuit)
observed = {tuple(r) for r in rows}
print(f"support has {len(support)} worlds "
      f"({len(observed)} observed + {len(set(support) - observed)} virtual):")
for assignment in sorted(support):
    tag = "observed" if assignment in observed else "virtual "
    print(f"  {assignment}  {tag}  P = {support[assignment]:.6f}")
print(f"  total mass = {sum(support.values()):.12f}\n")

# ---------------------------------------------------------------- queries
report = dataset_ll(circuit, data)
print(f"training log-likelihood: {report.ll:.4f} "
      f"(gamma = {report.gamma}, mean ll/record = {report.ll / data.num_records:.4f})")
print(f"P(0,0,1,1) = {support[(0, 0, 1, 1)]:.6f}\n")

# ---------------------------------------------------------------- files
with tempfile.TemporaryDirectory() as tmp:
    model_path = Path(tmp) / "worked.psdd"
    vtree_path = Path(tmp) / "worked.vtree"
    write_psdd(circuit, model_path)
    write_vtree(vtree, vtree_path)
    print(f"model file ({model_path.name}):")
    print("  " + "\n  ".join(model_path.read_text().splitlines()[:6]) + "\n  ...")
    again = read_psdd(model_path)
    same = all(
        abs(support[a] - p) < 1e-12 for a, p in enumerate_support(again).items()
    )
    print(f"re-read model induces the same distribution: {same}")
