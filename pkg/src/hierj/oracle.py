"""Exhaustive reference search over small instances.

Enumerates every consistency-valid selection within a budget and scores it
directly from the segment-dimension definitions, independently of the
dynamic programs.  Used by the test suite and the ``verify`` command.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .consistency import ConsistencyType, NodeSelection, make_selection
from .errors import BudgetExceededError, EmptyGroundTruthError
from .hierarchy import NodeDims, Tree, build_tree, dims_from_leaf_values


@dataclass(frozen=True)
class EnumerationBudget:
    """Hard guards for the exhaustive search; exceeding them is an error."""

    max_leaves: int = 12
    max_k: int = 6
    max_candidates: int = 5_000_000


DEFAULT_BUDGET = EnumerationBudget()


def _check_budget(tree: Tree, k: int, budget: EnumerationBudget) -> None:
    if tree.leaf_count > budget.max_leaves:
        raise BudgetExceededError(
            f"{tree.leaf_count} leaves exceed the enumeration limit of {budget.max_leaves}"
        )
    if k > budget.max_k:
        raise BudgetExceededError(f"k={k} exceeds the enumeration limit of {budget.max_k}")


def _leaf_masks(tree: Tree) -> list[int]:
    """Bitmask of contained leaves per node."""
    masks = [0] * tree.node_count
    ch = tree.children
    for n in tree.post_order.tolist():
        if n < tree.leaf_count:
            masks[n] = 1 << n
        else:
            masks[n] = masks[ch[n, 0]] | masks[ch[n, 1]]
    return masks


def _ancestor_masks(tree: Tree) -> list[int]:
    """Bitmask (over node indices) of strict ancestors per node."""
    masks = [0] * tree.node_count
    ch = tree.children
    for n in reversed(tree.post_order.tolist()):
        if n >= tree.leaf_count:
            own = masks[n] | (1 << n)
            masks[ch[n, 0]] = own
            masks[ch[n, 1]] = own
    return masks


def _iter_cuts(tree: Tree, node: int, cap: int) -> Iterator[tuple[int, ...]]:
    """All cuts of the subtree of ``node`` with at most ``cap`` nodes."""
    if cap <= 0:
        return
    yield (node,)
    if node < tree.leaf_count or cap < 2:
        return
    left = int(tree.children[node, 0])
    right = int(tree.children[node, 1])
    for lcut in _iter_cuts(tree, left, cap - 1):
        for rcut in _iter_cuts(tree, right, cap - len(lcut)):
            yield lcut + rcut


def _iter_antichains(tree: Tree, k: int) -> Iterator[tuple[int, ...]]:
    """All non-empty families of pairwise disjoint nodes, size <= k."""
    masks = _leaf_masks(tree)
    n = tree.node_count

    def extend(prefix: tuple[int, ...], union: int, start: int) -> Iterator[tuple[int, ...]]:
        for cand in range(start, n):
            if masks[cand] & union:
                continue
            chosen = prefix + (cand,)
            yield chosen
            if len(chosen) < k:
                yield from extend(chosen, union | masks[cand], cand + 1)

    yield from extend((), 0, 0)


def _iter_subsets(tree: Tree, k: int) -> Iterator[tuple[int, ...]]:
    """All non-empty node subsets of size <= k, lexicographic per size."""
    for size in range(1, k + 1):
        yield from itertools.combinations(range(tree.node_count), size)


def _powerset(items: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    for size in range(len(items) + 1):
        yield from itertools.combinations(items, size)


def enumerate_selections(
    tree: Tree,
    consistency: ConsistencyType,
    k: int,
    *,
    dims: NodeDims | None = None,
    budget: EnumerationBudget = DEFAULT_BUDGET,
) -> Iterator[NodeSelection]:
    """Stream every valid selection exactly once, in a fixed order.

    For ``b`` a selection is a cut crossed with a foreground assignment;
    for ``c`` a family of disjoint nodes; for ``d`` any node subset with
    its induced layer parities.  The empty node set is not enumerated.
    """
    _check_budget(tree, k, budget)
    count = 0

    def tick() -> None:
        nonlocal count
        count += 1
        if count > budget.max_candidates:
            raise BudgetExceededError(
                f"enumeration exceeded {budget.max_candidates} candidates"
            )

    if consistency is ConsistencyType.B:
        for cut in _iter_cuts(tree, tree.root, k):
            for fg in _powerset(cut):
                tick()
                yield make_selection(
                    tree, consistency, cut, fg_assignment=fg, dims=dims
                )
    elif consistency is ConsistencyType.C:
        for family in _iter_antichains(tree, k):
            tick()
            yield make_selection(tree, consistency, family, dims=dims)
    else:
        for subset in _iter_subsets(tree, k):
            tick()
            yield make_selection(tree, consistency, subset, dims=dims)


def brute_force_best(
    tree: Tree,
    dims: NodeDims,
    consistency: ConsistencyType,
    k: int,
    *,
    use_complement: bool = True,
    budget: EnumerationBudget = DEFAULT_BUDGET,
) -> tuple[Fraction, NodeSelection]:
    """True optimum by enumeration: max over selections of max(J, Jc).

    Candidate dims are accumulated with plain integer arithmetic and the
    running maximum is kept by cross-multiplied comparison, so the result
    is exact.  The all-background candidate (empty node set) is included
    for the c/d spaces.  With ``use_complement=False`` only the plain
    orientation is scored.
    """
    _check_budget(tree, k, budget)
    F = dims.f_total
    B = dims.b_total
    if F == 0:
        raise EmptyGroundTruthError("ground-truth foreground is empty")
    f_arr = dims.f.tolist()
    b_arr = dims.b.tolist()

    best_num = -1
    best_den = 1
    best_payload: tuple = ()
    best_comp = False

    def offer(num: int, den: int, comp: bool, payload: tuple) -> None:
        nonlocal best_num, best_den, best_comp, best_payload
        if num * best_den > best_num * den:
            best_num, best_den, best_comp, best_payload = num, den, comp, payload

    def offer_dims(b_s: int, f_s: int, payload: tuple) -> None:
        offer(f_s, F + b_s, False, payload)
        if use_complement:
            offer(F - f_s, F + B - b_s, True, payload)

    count = 0

    def tick() -> None:
        nonlocal count
        count += 1
        if count > budget.max_candidates:
            raise BudgetExceededError(
                f"enumeration exceeded {budget.max_candidates} candidates"
            )

    if consistency is ConsistencyType.B:
        for cut in _iter_cuts(tree, tree.root, k):
            per_node = [(b_arr[n], f_arr[n]) for n in cut]
            for fg in _powerset(tuple(range(len(cut)))):
                tick()
                b_s = sum(per_node[i][0] for i in fg)
                f_s = sum(per_node[i][1] for i in fg)
                offer_dims(b_s, f_s, (cut, tuple(cut[i] for i in fg)))
    elif consistency is ConsistencyType.C:
        offer_dims(0, 0, ((), ()))
        for family in _iter_antichains(tree, k):
            tick()
            b_s = sum(b_arr[n] for n in family)
            f_s = sum(f_arr[n] for n in family)
            offer_dims(b_s, f_s, (family, None))
    else:
        anc = _ancestor_masks(tree)
        offer_dims(0, 0, ((), ()))
        for subset in _iter_subsets(tree, k):
            tick()
            mask = 0
            for n in subset:
                mask |= 1 << n
            b_s = 0
            f_s = 0
            for n in subset:
                if (anc[n] & mask).bit_count() % 2:
                    b_s -= b_arr[n]
                    f_s -= f_arr[n]
                else:
                    b_s += b_arr[n]
                    f_s += f_arr[n]
            offer_dims(b_s, f_s, (subset, None))

    nodes, extra = best_payload
    if consistency is ConsistencyType.B:
        selection = make_selection(
            tree, consistency, nodes, fg_assignment=extra,
            complemented=best_comp, dims=dims,
        )
    else:
        selection = make_selection(
            tree, consistency, nodes, complemented=best_comp, dims=dims
        )
    return Fraction(best_num, best_den), selection


# ---------------------------------------------------------------------------
# randomized instances (shared by the verify command and the test suite)


def random_tree(rng: random.Random, leaf_count: int) -> Tree:
    """Uniform-ish random binary partition tree from random merges."""
    parent = [-1] * (2 * leaf_count - 1)
    roots = list(range(leaf_count))
    nxt = leaf_count
    while len(roots) > 1:
        i = rng.randrange(len(roots))
        a = roots.pop(i)
        j = rng.randrange(len(roots))
        b = roots.pop(j)
        parent[a] = nxt
        parent[b] = nxt
        roots.append(nxt)
        nxt += 1
    return build_tree(parent, leaf_count)


def _random_split(rng: random.Random, total: int, parts: int) -> list[int]:
    if parts == 1:
        return [total]
    cuts = sorted(rng.randint(0, total) for _ in range(parts - 1))
    prev = 0
    out = []
    for c in cuts:
        out.append(c - prev)
        prev = c
    out.append(total - prev)
    return out


def random_dims(
    rng: random.Random, tree: Tree, max_f: int = 50, max_b: int = 50
) -> NodeDims:
    """Random ground-truth overlap counts with F >= 1 and totals bounded."""
    f_total = rng.randint(1, max_f)
    b_total = rng.randint(0, max_b)
    leaf_f = _random_split(rng, f_total, tree.leaf_count)
    leaf_b = _random_split(rng, b_total, tree.leaf_count)
    return dims_from_leaf_values(tree, np.array(leaf_f), np.array(leaf_b))
