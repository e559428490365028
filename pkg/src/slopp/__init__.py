"""Density estimation with decision-diagram circuits learned by recursive
clustering under a partial closed-world assumption.

The library learns a circuit whose logical base is a relaxation of the
training database's closed-world DNF, evaluates the induced distribution
exactly, and reads/writes the dataset, vtree and circuit text formats.
"""

from .circuits import (
    Circuit,
    CircuitBuilder,
    CircuitSize,
    Element,
    LiteralUnit,
    SumUnit,
    TrueUnit,
    ValidationReport,
    Violation,
    scope,
    size,
    validate,
)
from .data import Dataset
from .inference import (
    EvalReport,
    dataset_ll,
    enumerate_support,
    fully_factorized,
    log_prob,
    log_probs,
)
from .io import (
    FileFormatError,
    load_dataset,
    read_psdd,
    read_vtree,
    write_dataset,
    write_psdd,
    write_vtree,
)
from .learn import (
    LearnConfig,
    chow_liu_vtree,
    cluster,
    enforce_exclusivity,
    learn_vtree,
    mutual_information_matrix,
    slopp,
)
from .logic import Formula, conjoin_satisfiable, consistent, dnf_of_database, implies
from .vtree import Vtree, VtreeNode, balanced_vtree, random_vtree, right_linear_vtree

__version__ = "0.1.0"

__all__ = [
    "Circuit",
    "CircuitBuilder",
    "CircuitSize",
    "Dataset",
    "Element",
    "EvalReport",
    "FileFormatError",
    "Formula",
    "LearnConfig",
    "LiteralUnit",
    "SumUnit",
    "TrueUnit",
    "ValidationReport",
    "Violation",
    "Vtree",
    "VtreeNode",
    "balanced_vtree",
    "chow_liu_vtree",
    "cluster",
    "conjoin_satisfiable",
    "consistent",
    "dataset_ll",
    "dnf_of_database",
    "enforce_exclusivity",
    "enumerate_support",
    "fully_factorized",
    "implies",
    "learn_vtree",
    "load_dataset",
    "log_prob",
    "log_probs",
    "mutual_information_matrix",
    "random_vtree",
    "read_psdd",
    "read_vtree",
    "right_linear_vtree",
    "scope",
    "size",
    "slopp",
    "validate",
    "write_dataset",
    "write_psdd",
    "write_vtree",
]
