"""Batch command-line front end.

Subcommands: learn, eval, check, support, vtree.  Every run ends with a
single machine-readable line starting with "report " whose key=value pairs
echo every knob that affects the output; exit codes are 0 (ok), 1 (bad
input file or mismatched data) and 2 (bad flags).
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass

from .circuits import Circuit, size, validate
from .data import Dataset
from .inference import dataset_ll, enumerate_support
from .io import FileFormatError, load_dataset, read_psdd, read_vtree, write_psdd, write_vtree
from .learn import LearnConfig, learn_vtree, slopp

_METHOD_FLAGS = {
    "balanced": "balanced",
    "rightlinear": "right-linear",
    "random": "random",
    "chowliu": "chow-liu",
}


@dataclass
class RunReport:
    command: str
    fields: list[tuple[str, object]]

    def human(self) -> str:
        lines = [f"command: {self.command}"]
        lines += [f"  {key} = {value}" for key, value in self.fields]
        return "\n".join(lines)

    def machine(self) -> str:
        pairs = " ".join(f"{key}={value}" for key, value in self.fields)
        return f"report command={self.command} {pairs}"


def _emit(report: RunReport) -> None:
    print(report.human())
    print(report.machine())


def _eval_fields(circuit: Circuit, data: Dataset) -> list[tuple[str, object]]:
    ev = dataset_ll(circuit, data)
    counts = size(circuit)
    return [
        ("ll", f"{ev.ll:.17g}"),
        ("gamma", ev.gamma),
        ("consistent", ev.consistent_count),
        ("nodes", counts.nodes),
        ("edges", counts.edges),
        ("parameters", counts.parameters),
    ]


def cmd_learn(args) -> int:
    start = time.perf_counter()
    data = load_dataset(args.data)
    if args.vtree:
        vtree = read_vtree(args.vtree)
    else:
        vtree = learn_vtree(data, _METHOD_FLAGS[args.vtree_method], seed=args.seed)
    config = LearnConfig(
        k=args.k, min_records=args.min_cluster, seed=args.seed, dedup=args.dedup
    )
    circuit = slopp(data, vtree, config)
    if args.out:
        write_psdd(circuit, args.out)
    fields = [
        ("data", args.data),
        ("k", config.k),
        ("d", config.min_records),
        ("seed", config.seed),
        ("dedup", int(config.dedup)),
        *_eval_fields(circuit, data),
        ("out", args.out or "-"),
        ("wall_s", f"{time.perf_counter() - start:.3f}"),
    ]
    _emit(RunReport("learn", fields))
    return 0


def cmd_eval(args) -> int:
    start = time.perf_counter()
    circuit = read_psdd(args.model)
    data = load_dataset(args.data)
    ev = dataset_ll(circuit, data, per_record=args.per_record)
    if args.per_record:
        for row, count, lp in zip(data.records, data.counts, ev.per_record):
            bits = ",".join(str(int(b)) for b in row)
            print(f"{bits} count={count} logp={lp:.17g}")
    counts = size(circuit)
    fields = [
        ("model", args.model),
        ("data", args.data),
        ("ll", f"{ev.ll:.17g}"),
        ("gamma", ev.gamma),
        ("consistent", ev.consistent_count),
        ("nodes", counts.nodes),
        ("edges", counts.edges),
        ("parameters", counts.parameters),
        ("wall_s", f"{time.perf_counter() - start:.3f}"),
    ]
    _emit(RunReport("eval", fields))
    return 0


def cmd_check(args) -> int:
    circuit = read_psdd(args.model)
    report = validate(circuit)
    for violation in report.violations:
        print(violation)
    print("valid" if report.ok else f"{len(report.violations)} violation(s)")
    return 0 if report.ok else 1


def cmd_support(args) -> int:
    circuit = read_psdd(args.model)
    table = enumerate_support(circuit, limit=args.limit)
    for assignment in sorted(table):
        bits = ",".join(str(b) for b in assignment)
        print(f"{bits} {table[assignment]:.17g}")
    return 0


def cmd_vtree(args) -> int:
    data = load_dataset(args.data)
    vtree = learn_vtree(data, _METHOD_FLAGS[args.method], seed=args.seed)
    write_vtree(vtree, args.out)
    _emit(
        RunReport(
            "vtree",
            [("data", args.data), ("method", args.method), ("seed", args.seed), ("out", args.out)],
        )
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slopp",
        description="Learn, evaluate and inspect decision-diagram density models.",
        epilog=(
            "Each command prints a 'report command=... key=value ...' line "
            "echoing every knob that affects its output."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    learn = sub.add_parser("learn", help="train a model from a 0/1 CSV database")
    learn.add_argument("--data", required=True, help="training database (0/1 CSV)")
    group = learn.add_mutually_exclusive_group()
    group.add_argument("--vtree", help="vtree file to use")
    group.add_argument(
        "--vtree-method",
        choices=sorted(_METHOD_FLAGS),
        default="chowliu",
        help="heuristic when no vtree file is given (default: chowliu)",
    )
    learn.add_argument("--k", type=int, default=2, help="clusters per split (default 2)")
    learn.add_argument(
        "--min-cluster",
        type=int,
        default=20,
        help="smallest database that still gets clustered (default 20)",
    )
    learn.add_argument("--seed", type=int, default=0)
    learn.add_argument("--dedup", action="store_true", help="share structurally equal nodes")
    learn.add_argument("--out", help="model output path")
    learn.set_defaults(func=cmd_learn)

    evaluate = sub.add_parser("eval", help="log-likelihood of a database under a model")
    evaluate.add_argument("--model", required=True)
    evaluate.add_argument("--data", required=True)
    evaluate.add_argument("--per-record", action="store_true")
    evaluate.set_defaults(func=cmd_eval)

    check = sub.add_parser("check", help="validate a model file")
    check.add_argument("--model", required=True)
    check.set_defaults(func=cmd_check)

    support = sub.add_parser("support", help="enumerate the model's support")
    support.add_argument("--model", required=True)
    support.add_argument("--limit", type=int, default=20, help="max scope size (default 20)")
    support.set_defaults(func=cmd_support)

    vtree = sub.add_parser("vtree", help="build a vtree from data")
    vtree.add_argument("--data", required=True)
    vtree.add_argument("--method", choices=sorted(_METHOD_FLAGS), default="chowliu")
    vtree.add_argument("--seed", type=int, default=0)
    vtree.add_argument("--out", required=True)
    vtree.set_defaults(func=cmd_vtree)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (FileFormatError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
