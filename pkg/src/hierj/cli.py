"""Command-line interface: build trees, compute curves, verify against the oracle.

Exit codes: 0 success, 1 verification mismatch, 2 invalid input or
validation failure, 3 empty ground truth.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, builders, cooptimal, io, oracle
from .consistency import ConsistencyType
from .errors import EmptyGroundTruthError, FormatError, HierjError
from .hierarchy import annotate_dims

_CONSISTENCIES = ("b", "c", "d")


def _thread_cap() -> int:
    raw = os.environ.get("HIERJ_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _cmd_build(args) -> int:
    if args.kind == "geometric":
        if args.width is None or args.height is None:
            print("build --kind geometric requires --width and --height", file=sys.stderr)
            return 2
        tree, labels = builders.geometric_tree(args.width, args.height)
        leaf_areas = np.ones(tree.leaf_count, dtype=np.int64)
    elif args.kind == "l2":
        if not args.input:
            print("build --kind l2 requires --input", file=sys.stderr)
            return 2
        image = io.read_ppm(args.input)
        if args.superpixels:
            sp = io.read_pgm(args.superpixels)
            tree, labels = builders.l2_mst_tree(image, sp)
            leaf_areas = np.bincount(labels.ravel(), minlength=tree.leaf_count)
        else:
            tree, labels = builders.l2_mst_tree(image)
            leaf_areas = np.ones(tree.leaf_count, dtype=np.int64)
    else:
        if not args.input:
            print("build --kind weights requires --input", file=sys.stderr)
            return 2
        edges, implied = io.read_edge_weights(args.input)
        vertices = args.vertices if args.vertices is not None else implied
        tree, labels = builders.external_weight_tree(edges, vertices)
        leaf_areas = np.ones(tree.leaf_count, dtype=np.int64)

    if args.filter_area:
        tree = builders.filter_small_areas(tree, leaf_areas, args.filter_area)
    io.write_tree(tree, args.out)
    print(f"wrote {tree.node_count}-node tree ({tree.leaf_count} leaves) to {args.out}")
    return 0


def _curve_cell(tree, dims, letter: str, k: int, complement: bool, timings: bool):
    start = time.perf_counter()
    if complement:
        result = cooptimal.best_of_both(tree, dims, ConsistencyType(letter), k)
    else:
        result = cooptimal.optimize_jaccard(tree, dims, ConsistencyType(letter), k)
    millis = int((time.perf_counter() - start) * 1000) if timings else 0
    return letter, k, result, millis


def _cmd_curve(args) -> int:
    tree = io.read_tree(args.tree)
    mask = io.read_pgm(args.gt) > 0
    if args.labels:
        labels = io.read_pgm(args.labels)
    else:
        # identity mapping: pixel index = leaf index
        if mask.size != tree.leaf_count:
            print(
                f"mask has {mask.size} pixels but the tree has {tree.leaf_count} "
                "leaves; pass --labels",
                file=sys.stderr,
            )
            return 2
        labels = np.arange(mask.size, dtype=np.int64).reshape(mask.shape)
    dims = annotate_dims(tree, mask, labels)
    if dims.f_total == 0:
        print("ground-truth foreground is empty", file=sys.stderr)
        return 3
    if not 1 <= args.kmax <= tree.leaf_count:
        print(f"kmax {args.kmax} outside 1..{tree.leaf_count}", file=sys.stderr)
        return 2

    letters = _CONSISTENCIES if args.consistency == "all" else (args.consistency,)
    complement = args.complement == "auto"
    image_id = args.image_id or Path(args.gt).stem
    cells = [(letter, k) for letter in letters for k in range(1, args.kmax + 1)]

    workers = _thread_cap()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_curve_cell, tree, dims, letter, k, complement, args.timings)
                for letter, k in cells
            ]
            outcomes = [f.result() for f in futures]
    else:
        outcomes = [
            _curve_cell(tree, dims, letter, k, complement, args.timings)
            for letter, k in cells
        ]

    records = []
    for letter, k, result, millis in sorted(outcomes, key=lambda t: (t[0], t[1])):
        records.append(
            io.CurveRecord(
                image_id=image_id,
                consistency=letter,
                k=k,
                jaccard_num=result.jaccard.numerator,
                jaccard_den=result.jaccard.denominator,
                complemented=result.complemented,
                iterations=result.iterations,
                millis=millis,
            )
        )
    io.write_curve_csv(args.out, records)
    print(f"wrote {len(records)} rows to {args.out}")
    return 0


def _cmd_verify(args) -> int:
    budget = oracle.EnumerationBudget()
    if args.max_leaves > budget.max_leaves or args.max_k > budget.max_k:
        print(
            f"limits exceed the enumeration budget "
            f"({budget.max_leaves} leaves, k<={budget.max_k})",
            file=sys.stderr,
        )
        return 2
    rng = random.Random(args.seed)
    matches = 0
    for trial in range(args.trials):
        leaves = rng.randint(4, args.max_leaves)
        tree = oracle.random_tree(rng, leaves)
        dims = oracle.random_dims(rng, tree)
        k = rng.randint(1, min(args.max_k, leaves))
        letter = rng.choice(_CONSISTENCIES)
        cons = ConsistencyType(letter)
        expected, _ = oracle.brute_force_best(tree, dims, cons, k)
        got = cooptimal.best_of_both(tree, dims, cons, k).jaccard
        if got == expected:
            matches += 1
            continue
        print(f"MISMATCH at trial {trial}: consistency={letter} k={k}")
        print(f"  optimizer: {got}  oracle: {expected}")
        print(f"  parents: {tree.parent.tolist()}")
        print(f"  leaf f: {dims.f[: tree.leaf_count].tolist()}")
        print(f"  leaf b: {dims.b[: tree.leaf_count].tolist()}")
        print(f"{matches}/{args.trials} exact matches")
        return 1
    print(f"{matches}/{args.trials} exact matches")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hierj",
        description="Exact Jaccard-optimal segmentations from binary partition trees",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build a hierarchy and write it as a tree file")
    b.add_argument("--kind", choices=("geometric", "l2", "weights"), required=True)
    b.add_argument("--width", type=int)
    b.add_argument("--height", type=int)
    b.add_argument("--input", help="PPM image (l2) or edge-weight file (weights)")
    b.add_argument("--superpixels", help="PGM label map for superpixel leaves")
    b.add_argument("--vertices", type=int, help="vertex count for --kind weights")
    b.add_argument("--filter-area", type=int, default=0, metavar="T")
    b.add_argument("--out", required=True)
    b.set_defaults(func=_cmd_build)

    c = sub.add_parser("curve", help="optimal Jaccard index per budget, as CSV")
    c.add_argument("--tree", required=True)
    c.add_argument("--labels", help="PGM leaf label map; omit for identity labels")
    c.add_argument("--gt", required=True, help="PGM mask, value > 0 is foreground")
    c.add_argument("--consistency", choices=("b", "c", "d", "all"), default="all")
    c.add_argument("--kmax", type=int, required=True)
    c.add_argument("--complement", choices=("auto", "off"), default="auto")
    c.add_argument("--image-id")
    c.add_argument(
        "--timings",
        action="store_true",
        help="record wall time per cell (off by default so output is reproducible)",
    )
    c.add_argument("--out", required=True)
    c.set_defaults(func=_cmd_curve)

    v = sub.add_parser("verify", help="randomized optimizer-vs-oracle equivalence")
    v.add_argument("--max-leaves", type=int, default=10)
    v.add_argument("--max-k", type=int, default=6)
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EmptyGroundTruthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (FormatError, HierjError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
