"""Exact Jaccard optimization by iterating linear auxiliary solves.

For a fixed projection parameter ``omega`` the linear measure
``f_s - omega * b_s`` is maximized exactly by the consistency's solver;
the achieved Jaccard value becomes the next ``omega``.  The sequence is
strictly increasing and reaches the true optimum after finitely many
steps, because the projection taken at the optimal angle has exactly the
same maximizers as the Jaccard index itself.

The complement orientation (scoring ``I without the segment`` as
foreground) is the same iteration run on the negated attribute, with the
Jaccard value of the complement used for the updates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .consistency import (
    Attribute,
    ConsistencyType,
    NodeSelection,
    jaccard,
    jaccard_complement,
    make_selection,
)
from .errors import BudgetOutOfRangeError, EmptyGroundTruthError
from .hierarchy import NodeDims, Tree
from .solvers import SolverResult, solve_b, solve_c, solve_d, solve_unlimited


@dataclass(frozen=True)
class OptimizationResult:
    """Optimal value, the witness selection, and the iteration trace."""

    jaccard: Fraction
    selection: NodeSelection
    iterations: int
    omega_trace: tuple[Fraction, ...]
    complemented: bool


_UNLIMITED = "unlimited"


def _selection_from(
    tree: Tree,
    dims: NodeDims,
    consistency: ConsistencyType,
    result: SolverResult,
    complemented: bool,
) -> NodeSelection:
    if consistency is ConsistencyType.B:
        return make_selection(
            tree,
            consistency,
            result.nodes,
            fg_assignment=result.positive_subset,
            complemented=complemented,
            dims=dims,
        )
    if consistency is ConsistencyType.C:
        return make_selection(
            tree, consistency, result.nodes, complemented=complemented, dims=dims
        )
    return make_selection(
        tree,
        consistency,
        result.nodes,
        parities=result.parities,
        complemented=complemented,
        dims=dims,
    )


def _empty_selection(
    tree: Tree, dims: NodeDims, consistency: ConsistencyType, complemented: bool
) -> NodeSelection:
    return make_selection(tree, consistency, (), complemented=complemented, dims=dims)


def _iterate(
    tree: Tree,
    dims: NodeDims,
    consistency: ConsistencyType | str,
    k: int | None,
    omega0: Fraction,
    complemented: bool,
) -> OptimizationResult:
    if dims.f_total == 0:
        raise EmptyGroundTruthError("ground-truth foreground is empty")
    omega0 = Fraction(omega0)
    if not 0 <= omega0 <= 1:
        raise ValueError(f"omega0 must lie in [0, 1], got {omega0}")

    unlimited = consistency == _UNLIMITED
    if unlimited:
        cons = ConsistencyType.B  # the unlimited solver returns a cut
    else:
        cons = consistency if isinstance(consistency, ConsistencyType) else (
            ConsistencyType.from_letter(str(consistency))
        )
        assert k is not None
        if not 1 <= k <= tree.leaf_count:
            raise BudgetOutOfRangeError(f"k={k} outside 1..{tree.leaf_count}")

    f_total = dims.f_total
    b_total = dims.b_total

    def score(selection: NodeSelection) -> Fraction:
        b_s, f_s = selection.dims
        if complemented:
            return jaccard_complement(b_s, f_s, f_total, b_total)
        return jaccard(b_s, f_s, f_total, b_total)

    def solve_at(omega: Fraction) -> NodeSelection:
        attr = Attribute.from_dims(dims, omega)
        if complemented:
            attr = attr.negated()
        if unlimited:
            result = solve_unlimited(tree, attr)
        elif cons is ConsistencyType.B:
            result = solve_b(tree, attr, k)
        elif cons is ConsistencyType.C:
            result = solve_c(tree, attr, k)
        else:
            result = solve_d(tree, attr, k)
        # the all-background candidate (no nodes, benefit 0) is legal for
        # the c/d spaces; take it when the solver's best is negative
        if cons is not ConsistencyType.B and result.benefit.value(omega) < 0:
            return _empty_selection(tree, dims, cons, complemented)
        return _selection_from(tree, dims, cons, result, complemented)

    selection = solve_at(omega0)
    omega = score(selection)
    trace = [omega]
    calls = 1
    while True:
        selection = solve_at(omega)
        calls += 1
        new = score(selection)
        if new > omega:
            omega = new
            trace.append(new)
            continue
        if new < omega:
            raise AssertionError("projection fixed-point iteration decreased")
        break
    return OptimizationResult(
        jaccard=omega,
        selection=selection,
        iterations=calls,
        omega_trace=tuple(trace),
        complemented=complemented,
    )


def optimize_jaccard(
    tree: Tree,
    dims: NodeDims,
    consistency: ConsistencyType | str,
    k: int,
    omega0: Fraction = Fraction(0),
) -> OptimizationResult:
    """Exact maximum of the Jaccard index over selections of size <= k."""
    return _iterate(tree, dims, consistency, k, omega0, complemented=False)


def optimize_jaccard_complement(
    tree: Tree,
    dims: NodeDims,
    consistency: ConsistencyType | str,
    k: int,
    omega0: Fraction = Fraction(0),
) -> OptimizationResult:
    """Exact maximum of the complement-orientation Jaccard index."""
    return _iterate(tree, dims, consistency, k, omega0, complemented=True)


def best_of_both(
    tree: Tree,
    dims: NodeDims,
    consistency: ConsistencyType | str,
    k: int,
    omega0: Fraction = Fraction(0),
) -> OptimizationResult:
    """Better of the two orientations; ties go to the plain one."""
    plain = optimize_jaccard(tree, dims, consistency, k, omega0)
    comp = optimize_jaccard_complement(tree, dims, consistency, k, omega0)
    return comp if comp.jaccard > plain.jaccard else plain


def best_unlimited(
    tree: Tree, dims: NodeDims, omega0: Fraction = Fraction(0)
) -> OptimizationResult:
    """Best achievable Jaccard index with no bound on the selection size.

    At unlimited size the three consistency types realize the same
    segmentations, so one linear-time solver covers them all.
    """
    plain = _iterate(tree, dims, _UNLIMITED, None, omega0, complemented=False)
    comp = _iterate(tree, dims, _UNLIMITED, None, omega0, complemented=True)
    return comp if comp.jaccard > plain.jaccard else plain


def curve(
    tree: Tree,
    dims: NodeDims,
    consistency: ConsistencyType | str,
    k_max: int,
    *,
    complement: bool = True,
    omega0: Fraction = Fraction(0),
) -> list[tuple[int, OptimizationResult]]:
    """Optimal Jaccard value for every budget 1..k_max.

    Each budget is optimized independently; selections that are optimal
    for one budget are not optimal for smaller ones, so nothing can be
    reused across budgets.  With ``complement=False`` only the plain
    orientation is scored.
    """
    if not 1 <= k_max <= tree.leaf_count:
        raise BudgetOutOfRangeError(f"k_max={k_max} outside 1..{tree.leaf_count}")
    out = []
    for k in range(1, k_max + 1):
        if complement:
            out.append((k, best_of_both(tree, dims, consistency, k, omega0)))
        else:
            out.append((k, optimize_jaccard(tree, dims, consistency, k, omega0)))
    return out
