"""Budgeted auxiliary solvers: maximize an additive attribute per consistency.

Each solver runs one dynamic program over the tree in post-order.  A node
stores, for every subset size ``i`` up to ``t(N) = min(k, leaves(N))``, the
benefit of the best (and for ``d`` also the worst) selection of exactly
``i`` nodes inside its subtree, plus how many of them sit in the right
child.  Extraction walks those counters back down with a queue.

Benefits are exact integer pairs; comparisons use the scaled key
``q * f - p * b`` for ``omega = p / q``, which orders pairs exactly like
their rational values.  Two interchangeable engines exist: a pure-Python
one with unbounded integers and a jitted int64 one that is only used when
a conservative overflow bound holds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import _kernels
from .consistency import Attribute, BenefitPair, ConsistencyType
from .errors import BudgetOutOfRangeError
from .hierarchy import Tree

INT64_SAFE = 2**62


@dataclass(frozen=True, eq=False)
class SolverTables:
    """Per-node DP vectors in one flat buffer.

    Node ``n`` owns cells ``offsets[n] .. offsets[n] + t[n]``; index 0 is
    the zero-benefit sentinel.  The minus-side and belong vectors are only
    populated for the d-consistency solver.
    """

    consistency: ConsistencyType
    k: int
    root: int
    t: np.ndarray
    offsets: np.ndarray
    plus_f: "np.ndarray | list"
    plus_b: "np.ndarray | list"
    plus_key: "np.ndarray | list"
    right_plus: "np.ndarray | list"
    belong_plus: "np.ndarray | list | None" = None
    minus_f: "np.ndarray | list | None" = None
    minus_b: "np.ndarray | list | None" = None
    minus_key: "np.ndarray | list | None" = None
    right_minus: "np.ndarray | list | None" = None
    belong_minus: "np.ndarray | list | None" = None


@dataclass(frozen=True)
class SolverResult:
    """Outcome of one auxiliary solve."""

    nodes: frozenset[int]
    positive_subset: frozenset[int] | None
    parities: Mapping[int, int] | None
    benefit: BenefitPair
    size_used: int


def _check_budget(tree: Tree, k: int) -> None:
    if not 1 <= k <= tree.leaf_count:
        raise BudgetOutOfRangeError(f"k={k} outside 1..{tree.leaf_count}")


def _attr_ints(attribute: Attribute):
    omega = attribute.omega
    p, q = omega.numerator, omega.denominator
    if p < 0:
        raise ValueError("omega must be nonnegative")
    af = [int(x) for x in attribute.f.tolist()]
    ab = [int(x) for x in attribute.b.tolist()]
    return af, ab, p, q


def _fits_int64(af, ab, p, q, k: int) -> bool:
    max_f = max((abs(x) for x in af), default=0)
    max_b = max((abs(x) for x in ab), default=0)
    term = q * max_f + p * max_b + 1
    return term * (2 * k + 6) < INT64_SAFE and max(max_f, max_b) * (2 * k + 6) < INT64_SAFE


def _pick_engine(engine: str, af, ab, p, q, k: int) -> str:
    if engine == "auto":
        if _kernels.HAVE_NUMBA and _fits_int64(af, ab, p, q, k):
            return "jit"
        return "pure"
    if engine == "jit":
        if not _kernels.HAVE_NUMBA:
            raise RuntimeError("numba is not available")
        if not _fits_int64(af, ab, p, q, k):
            raise OverflowError("attribute magnitudes exceed the int64-safe bound")
    elif engine != "pure":
        raise ValueError(f"unknown engine {engine!r}")
    return engine


def _effective_t(tree: Tree, k: int, depth_pruning: bool) -> np.ndarray:
    t = np.minimum(k, tree.subtree_leaves)
    if depth_pruning:
        # a cut of size <= k contains no node deeper than k-1, and a node at
        # depth d contributes at most k-d nodes to such a cut
        t = np.minimum(t, np.maximum(k - tree.depth, 0))
    return t.astype(np.int64)


def _layout(t: np.ndarray):
    lengths = t + 1
    offsets = np.zeros(t.shape[0], dtype=np.int64)
    np.cumsum(lengths[:-1], out=offsets[1:])
    total = int(lengths.sum())
    return offsets, total


# ---------------------------------------------------------------------------
# pure-Python table builders (unbounded integers, reference implementation)


def _table_b_pure(tree: Tree, af, ab, akey, t, offs, total):
    bf = [0] * total
    bb = [0] * total
    bk = [0] * total
    rr = [0] * total
    left = tree.children[:, 0].tolist()
    right = tree.children[:, 1].tolist()
    tl_ = t.tolist()
    offs_ = offs.tolist()
    for n in tree.post_order.tolist():
        tn = tl_[n]
        if tn == 0:
            continue
        o = offs_[n]
        if akey[n] > 0:
            bf[o + 1] = af[n]
            bb[o + 1] = ab[n]
            bk[o + 1] = akey[n]
        l = left[n]
        if l < 0 or tn < 2:
            continue
        r = right[n]
        ol = offs_[l]
        orr = offs_[r]
        tl = tl_[l]
        tr = tl_[r]
        for i in range(2, tn + 1):
            rmin = max(1, i - tl)
            rmax = min(tr, i - 1)
            best = bk[orr + rmin] + bk[ol + i - rmin]
            bestr = rmin
            for rank in range(rmin + 1, rmax + 1):
                cand = bk[orr + rank] + bk[ol + i - rank]
                if cand > best:
                    best = cand
                    bestr = rank
            bk[o + i] = best
            rr[o + i] = bestr
            bf[o + i] = bf[orr + bestr] + bf[ol + i - bestr]
            bb[o + i] = bb[orr + bestr] + bb[ol + i - bestr]
    return bf, bb, bk, rr


def _table_c_pure(tree: Tree, af, ab, akey, t, offs, total):
    bf = [0] * total
    bb = [0] * total
    bk = [0] * total
    rr = [0] * total
    left = tree.children[:, 0].tolist()
    right = tree.children[:, 1].tolist()
    tl_ = t.tolist()
    offs_ = offs.tolist()
    for n in tree.post_order.tolist():
        tn = tl_[n]
        o = offs_[n]
        l = left[n]
        if l >= 0:
            r = right[n]
            ol = offs_[l]
            orr = offs_[r]
            tl = tl_[l]
            tr = tl_[r]
            for i in range(1, tn + 1):
                rmin = max(0, i - tl)
                rmax = min(tr, i)
                best = bk[orr + rmin] + bk[ol + i - rmin]
                bestr = rmin
                for rank in range(rmin + 1, rmax + 1):
                    cand = bk[orr + rank] + bk[ol + i - rank]
                    if cand > best:
                        best = cand
                        bestr = rank
                bk[o + i] = best
                rr[o + i] = bestr
                bf[o + i] = bf[orr + bestr] + bf[ol + i - bestr]
                bb[o + i] = bb[orr + bestr] + bb[ol + i - bestr]
        # the node itself is the third size-1 candidate; it wins ties
        if l < 0 or akey[n] >= bk[o + 1]:
            bf[o + 1] = af[n]
            bb[o + 1] = ab[n]
            bk[o + 1] = akey[n]
            rr[o + 1] = -1
    return bf, bb, bk, rr


def _table_d_pure(tree: Tree, af, ab, akey, k, t, offs, total):
    pf = [0] * total
    pb = [0] * total
    pk = [0] * total
    rp = [0] * total
    blp = [0] * total
    mf = [0] * total
    mb = [0] * total
    mk = [0] * total
    rm = [0] * total
    blm = [0] * total
    s_pf = [0] * (k + 1)
    s_pb = [0] * (k + 1)
    s_pk = [0] * (k + 1)
    s_mf = [0] * (k + 1)
    s_mb = [0] * (k + 1)
    s_mk = [0] * (k + 1)
    s_rp = [0] * (k + 1)
    s_rm = [0] * (k + 1)
    left = tree.children[:, 0].tolist()
    right = tree.children[:, 1].tolist()
    tl_ = t.tolist()
    offs_ = offs.tolist()
    root = tree.root
    for n in tree.post_order.tolist():
        tn = tl_[n]
        o = offs_[n]
        l = left[n]
        if l < 0:
            pf[o + 1] = mf[o + 1] = af[n]
            pb[o + 1] = mb[o + 1] = ab[n]
            pk[o + 1] = mk[o + 1] = akey[n]
            blp[o + 1] = blm[o + 1] = 1
            continue
        r = right[n]
        ol = offs_[l]
        orr = offs_[r]
        tl = tl_[l]
        tr = tl_[r]
        for i in range(1, tn + 1):
            rmin = max(0, i - tl)
            rmax = min(tr, i)
            best_p = pk[orr + rmin] + pk[ol + i - rmin]
            best_pr = rmin
            best_m = mk[orr + rmin] + mk[ol + i - rmin]
            best_mr = rmin
            for rank in range(rmin + 1, rmax + 1):
                cand = pk[orr + rank] + pk[ol + i - rank]
                if cand > best_p:
                    best_p = cand
                    best_pr = rank
                cand = mk[orr + rank] + mk[ol + i - rank]
                if cand < best_m:
                    best_m = cand
                    best_mr = rank
            s_pk[i] = best_p
            s_rp[i] = best_pr
            s_pf[i] = pf[orr + best_pr] + pf[ol + i - best_pr]
            s_pb[i] = pb[orr + best_pr] + pb[ol + i - best_pr]
            s_mk[i] = best_m
            s_rm[i] = best_mr
            s_mf[i] = mf[orr + best_mr] + mf[ol + i - best_mr]
            s_mb[i] = mb[orr + best_mr] + mb[ol + i - best_mr]
        if n == root:
            for i in range(1, tn + 1):
                pf[o + i] = s_pf[i]
                pb[o + i] = s_pb[i]
                pk[o + i] = s_pk[i]
                rp[o + i] = s_rp[i]
                mf[o + i] = s_mf[i]
                mb[o + i] = s_mb[i]
                mk[o + i] = s_mk[i]
                rm[o + i] = s_rm[i]
            # the root may stand alone but never acts as a container
            if akey[n] > pk[o + 1]:
                pf[o + 1] = af[n]
                pb[o + 1] = ab[n]
                pk[o + 1] = akey[n]
                rp[o + 1] = 0
                blp[o + 1] = 1
        else:
            # second pass: try the node itself on top of the opposite-table
            # entry of size i-1; only pass-1 values are read so the node's
            # attribute can never be counted twice
            for i in range(1, tn + 1):
                cand = akey[n] - s_pk[i - 1]
                if cand >= s_mk[i]:
                    mf[o + i] = s_mf[i]
                    mb[o + i] = s_mb[i]
                    mk[o + i] = s_mk[i]
                    rm[o + i] = s_rm[i]
                else:
                    mf[o + i] = af[n] - s_pf[i - 1]
                    mb[o + i] = ab[n] - s_pb[i - 1]
                    mk[o + i] = cand
                    rm[o + i] = s_rp[i - 1]
                    blm[o + i] = 1
                cand = akey[n] - s_mk[i - 1]
                if cand <= s_pk[i]:
                    pf[o + i] = s_pf[i]
                    pb[o + i] = s_pb[i]
                    pk[o + i] = s_pk[i]
                    rp[o + i] = s_rp[i]
                else:
                    pf[o + i] = af[n] - s_mf[i - 1]
                    pb[o + i] = ab[n] - s_mb[i - 1]
                    pk[o + i] = cand
                    rp[o + i] = s_rm[i - 1]
                    blp[o + i] = 1
    return pf, pb, pk, rp, blp, mf, mb, mk, rm, blm


# ---------------------------------------------------------------------------
# table construction with engine dispatch


def build_tables(
    tree: Tree,
    attribute: Attribute,
    k: int,
    consistency: ConsistencyType,
    *,
    engine: str = "auto",
    depth_pruning: bool = False,
) -> SolverTables:
    """Run the DP for one consistency and return the filled tables."""
    _check_budget(tree, k)
    af, ab, p, q = _attr_ints(attribute)
    engine = _pick_engine(engine, af, ab, p, q, k)
    if depth_pruning and consistency is not ConsistencyType.B:
        raise ValueError("depth pruning only applies to b-consistency cuts")
    t = _effective_t(tree, k, depth_pruning)
    offs, total = _layout(t)

    if engine == "jit":
        af_a = np.array(af, dtype=np.int64)
        ab_a = np.array(ab, dtype=np.int64)
        akey_a = q * af_a - p * ab_a
        bf = np.zeros(total, dtype=np.int64)
        bb = np.zeros(total, dtype=np.int64)
        bk = np.zeros(total, dtype=np.int64)
        rr = np.zeros(total, dtype=np.int64)
        order = tree.post_order.astype(np.int64)
        left = tree.children[:, 0].astype(np.int64)
        right = tree.children[:, 1].astype(np.int64)
        if consistency is ConsistencyType.B:
            _kernels.table_b(order, left, right, t, offs, akey_a, af_a, ab_a, bf, bb, bk, rr)
            return SolverTables(consistency, k, tree.root, t, offs, bf, bb, bk, rr)
        if consistency is ConsistencyType.C:
            _kernels.table_c(order, left, right, t, offs, akey_a, af_a, ab_a, bf, bb, bk, rr)
            return SolverTables(consistency, k, tree.root, t, offs, bf, bb, bk, rr)
        blp = np.zeros(total, dtype=np.int64)
        mf = np.zeros(total, dtype=np.int64)
        mb = np.zeros(total, dtype=np.int64)
        mk = np.zeros(total, dtype=np.int64)
        rm = np.zeros(total, dtype=np.int64)
        blm = np.zeros(total, dtype=np.int64)
        _kernels.table_d(
            order, left, right, t, offs, akey_a, af_a, ab_a,
            tree.root, k, bf, bb, bk, rr, blp, mf, mb, mk, rm, blm,
        )
        return SolverTables(
            consistency, k, tree.root, t, offs, bf, bb, bk, rr,
            belong_plus=blp, minus_f=mf, minus_b=mb, minus_key=mk,
            right_minus=rm, belong_minus=blm,
        )

    akey = [q * af[n] - p * ab[n] for n in range(tree.node_count)]
    if consistency is ConsistencyType.B:
        bf, bb, bk, rr = _table_b_pure(tree, af, ab, akey, t, offs, total)
        return SolverTables(consistency, k, tree.root, t, offs, bf, bb, bk, rr)
    if consistency is ConsistencyType.C:
        bf, bb, bk, rr = _table_c_pure(tree, af, ab, akey, t, offs, total)
        return SolverTables(consistency, k, tree.root, t, offs, bf, bb, bk, rr)
    pf, pb, pk, rp, blp, mf, mb, mk, rm, blm = _table_d_pure(
        tree, af, ab, akey, k, t, offs, total
    )
    return SolverTables(
        consistency, k, tree.root, t, offs, pf, pb, pk, rp,
        belong_plus=blp, minus_f=mf, minus_b=mb, minus_key=mk,
        right_minus=rm, belong_minus=blm,
    )


def minimal_best(tables: SolverTables, k: int) -> int:
    """Smallest size whose root benefit is maximal.

    Cuts and antichains are nonempty, so sizes 1..k are scanned for the
    b/c tables.  The d table also admits the size-0 sentinel: the empty
    selection is legal there, and a selection that cancels itself out
    (e.g. a node minus both of its children) is represented by it.
    """
    o = int(tables.offsets[tables.root])
    hi = min(k, int(tables.t[tables.root]))
    lo = 0 if tables.consistency is ConsistencyType.D else 1
    best = tables.plus_key[o + lo]
    kp = lo
    for i in range(lo + 1, hi + 1):
        key = tables.plus_key[o + i]
        if key > best:
            best = key
            kp = i
    return kp


# ---------------------------------------------------------------------------
# extraction


def _extract_b(tree: Tree, tables: SolverTables, kp: int):
    nodes: list[int] = []
    offs = tables.offsets
    rr = tables.right_plus
    ch = tree.children
    queue = [(tree.root, kp)]
    while queue:
        n, i = queue.pop()
        o = int(offs[n])
        r = int(rr[o + i])
        if r == 0 and i == 1:
            nodes.append(n)
        else:
            queue.append((int(ch[n, 1]), r))
            queue.append((int(ch[n, 0]), i - r))
    return nodes


def _extract_c(tree: Tree, tables: SolverTables, kp: int):
    nodes: list[int] = []
    offs = tables.offsets
    rr = tables.right_plus
    ch = tree.children
    queue = [(tree.root, kp)]
    while queue:
        n, i = queue.pop()
        o = int(offs[n])
        r = int(rr[o + i])
        if r == -1:
            nodes.append(n)
        else:
            if r > 0:
                queue.append((int(ch[n, 1]), r))
            if r < i:
                queue.append((int(ch[n, 0]), i - r))
    return nodes


def _extract_d(tree: Tree, tables: SolverTables, kp: int):
    pairs: list[tuple[int, int]] = []
    if kp == 0:
        return pairs
    offs = tables.offsets
    rp = tables.right_plus
    rm = tables.right_minus
    blp = tables.belong_plus
    blm = tables.belong_minus
    ch = tree.children
    queue = [(tree.root, kp, 0)]
    while queue:
        n, i, layer = queue.pop()
        o = int(offs[n])
        if layer % 2 == 0:
            belong = int(blp[o + i])
            r = int(rp[o + i])
        else:
            belong = int(blm[o + i])
            r = int(rm[o + i])
        if belong:
            pairs.append((n, layer))
            layer += 1  # nodes below a selected node flip best and worst
        if r > 0:
            queue.append((int(ch[n, 1]), r, layer))
        if r + belong < i:
            queue.append((int(ch[n, 0]), i - belong - r, layer))
    return pairs


def _root_pair(tables: SolverTables, kp: int) -> BenefitPair:
    o = int(tables.offsets[tables.root])
    return BenefitPair(int(tables.plus_f[o + kp]), int(tables.plus_b[o + kp]))


# ---------------------------------------------------------------------------
# public solvers


def solve_b(
    tree: Tree,
    attribute: Attribute,
    k: int,
    *,
    engine: str = "auto",
    depth_pruning: bool = False,
) -> SolverResult:
    """Best cut of size <= k; foreground = its positive-attribute nodes."""
    tables = build_tables(
        tree, attribute, k, ConsistencyType.B, engine=engine, depth_pruning=depth_pruning
    )
    kp = minimal_best(tables, k)
    omega = attribute.omega
    p, q = omega.numerator, omega.denominator
    nodes = _extract_b(tree, tables, kp)
    positive = [
        n for n in nodes if q * int(attribute.f[n]) - p * int(attribute.b[n]) > 0
    ]
    pair = _sum_pair(attribute, positive)
    _check_extraction(pair, _root_pair(tables, kp), p, q)
    return SolverResult(
        nodes=frozenset(nodes),
        positive_subset=frozenset(positive),
        parities=None,
        benefit=pair,
        size_used=len(nodes),
    )


def solve_c(tree: Tree, attribute: Attribute, k: int, *, engine: str = "auto") -> SolverResult:
    """Best family of <= k pairwise disjoint nodes."""
    tables = build_tables(tree, attribute, k, ConsistencyType.C, engine=engine)
    kp = minimal_best(tables, k)
    nodes = _extract_c(tree, tables, kp)
    pair = _sum_pair(attribute, nodes)
    omega = attribute.omega
    _check_extraction(pair, _root_pair(tables, kp), omega.numerator, omega.denominator)
    return SolverResult(
        nodes=frozenset(nodes),
        positive_subset=None,
        parities=None,
        benefit=pair,
        size_used=len(nodes),
    )


def solve_d(tree: Tree, attribute: Attribute, k: int, *, engine: str = "auto") -> SolverResult:
    """Best <= k nodes with nesting allowed; odd layers subtract."""
    tables = build_tables(tree, attribute, k, ConsistencyType.D, engine=engine)
    kp = minimal_best(tables, k)
    pairs = _extract_d(tree, tables, kp)
    f_sum = 0
    b_sum = 0
    for n, layer in pairs:
        sign = -1 if layer % 2 else 1
        f_sum += sign * int(attribute.f[n])
        b_sum += sign * int(attribute.b[n])
    pair = BenefitPair(f_sum, b_sum)
    omega = attribute.omega
    _check_extraction(pair, _root_pair(tables, kp), omega.numerator, omega.denominator)
    parities = {n: layer for n, layer in sorted(pairs)}
    return SolverResult(
        nodes=frozenset(parities),
        positive_subset=None,
        parities=parities,
        benefit=pair,
        size_used=len(pairs),
    )


def solve_unlimited(tree: Tree, attribute: Attribute) -> SolverResult:
    """Minimal best cut with no size limit, in linear time.

    The per-node optimum is the sum of the children's optima, so a single
    scalar per node suffices; extraction stops at the highest node whose
    own clamped attribute already matches its subtree optimum.
    """
    af, ab, p, q = _attr_ints(attribute)
    n_nodes = tree.node_count
    akey = [q * af[n] - p * ab[n] for n in range(n_nodes)]
    pf = [0] * n_nodes
    pb = [0] * n_nodes
    pk = [0] * n_nodes
    left = tree.children[:, 0].tolist()
    right = tree.children[:, 1].tolist()
    for n in tree.post_order.tolist():
        l = left[n]
        if l < 0:
            if akey[n] > 0:
                pf[n] = af[n]
                pb[n] = ab[n]
                pk[n] = akey[n]
        else:
            r = right[n]
            pf[n] = pf[l] + pf[r]
            pb[n] = pb[l] + pb[r]
            pk[n] = pk[l] + pk[r]
    nodes: list[int] = []
    positive: list[int] = []
    queue = [tree.root]
    while queue:
        n = queue.pop()
        clamped = akey[n] if akey[n] > 0 else 0
        if clamped >= pk[n]:
            nodes.append(n)
            if akey[n] > 0:
                positive.append(n)
        else:
            queue.append(right[n])
            queue.append(left[n])
    pair = _sum_pair(attribute, positive)
    root = tree.root
    _check_extraction(pair, BenefitPair(pf[root], pb[root]), p, q)
    return SolverResult(
        nodes=frozenset(nodes),
        positive_subset=frozenset(positive),
        parities=None,
        benefit=pair,
        size_used=len(nodes),
    )


# ---------------------------------------------------------------------------
# helpers


def _sum_pair(attribute: Attribute, nodes) -> BenefitPair:
    f_sum = 0
    b_sum = 0
    for n in nodes:
        f_sum += int(attribute.f[n])
        b_sum += int(attribute.b[n])
    return BenefitPair(f_sum, b_sum)


def _check_extraction(found: BenefitPair, expected: BenefitPair, p: int, q: int) -> None:
    # same value under omega, not necessarily the same pair
    if q * found.f - p * found.b != q * expected.f - p * expected.b:
        raise AssertionError(
            f"extracted benefit {found} disagrees with the DP table value {expected}"
        )
