"""Segmentations assembled from tree nodes and their exact scoring.

A segmentation candidate is a :class:`NodeSelection`: a set of nodes tagged
with one of the three consistency types.  The realized foreground is

* ``b``: the union of the nodes assigned to the foreground within a cut,
* ``c``: the union of a family of disjoint nodes,
* ``d``: the union of the even-minus-odd layer differences of an arbitrary
  node set (a leaf is foreground iff an odd number of selected nodes
  contain it).

All scores are exact rationals.  Benefits are carried as integer pairs
``(sum of +/- f, sum of +/- b)`` and only combined with the projection
parameter omega when two candidates are compared, so no rounding happens
anywhere.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from .errors import EmptyGroundTruthError, InconsistentSelectionError
from .hierarchy import LayerAssignment, NodeDims, Tree, is_cut, layers

Rational = Fraction


class ConsistencyType(enum.Enum):
    """How a node subset specifies a two-part segmentation."""

    B = "b"
    C = "c"
    D = "d"

    @classmethod
    def from_letter(cls, letter: str) -> "ConsistencyType":
        try:
            return cls(letter.lower())
        except ValueError:
            raise ValueError(f"unknown consistency {letter!r}, expected b, c or d") from None


@dataclass(frozen=True)
class BenefitPair:
    """Exact benefit as the integer pair (signed f sum, signed b sum)."""

    f: int
    b: int

    def value(self, omega: Fraction) -> Fraction:
        return Fraction(self.f) - omega * self.b

    def __add__(self, other: "BenefitPair") -> "BenefitPair":
        return BenefitPair(self.f + other.f, self.b + other.b)

    def __neg__(self) -> "BenefitPair":
        return BenefitPair(-self.f, -self.b)


ZERO_BENEFIT = BenefitPair(0, 0)


@dataclass(frozen=True, eq=False)
class Attribute:
    """Additive per-node attribute ``f[n] - omega * b[n]``.

    Stored as the integer pair arrays plus the rational omega; the value is
    only ever materialized as an exact Fraction.
    """

    f: np.ndarray
    b: np.ndarray
    omega: Fraction

    @classmethod
    def from_dims(cls, dims: NodeDims, omega: Fraction) -> "Attribute":
        return cls(f=dims.f, b=dims.b, omega=Fraction(omega))

    def negated(self) -> "Attribute":
        return Attribute(f=-self.f, b=-self.b, omega=self.omega)

    def pair(self, node: int) -> BenefitPair:
        return BenefitPair(int(self.f[node]), int(self.b[node]))

    def value(self, node: int) -> Fraction:
        return Fraction(int(self.f[node])) - self.omega * int(self.b[node])


@dataclass(frozen=True)
class NodeSelection:
    """A consistency-tagged node subset together with its realized dims.

    ``dims`` is the pair ``(b_s, f_s)``: pixel counts of the specified
    segment inside ground-truth background and foreground.  When
    ``complemented`` is set the scored foreground is the complement of the
    specified segment.
    """

    tree: Tree = field(repr=False)
    consistency: ConsistencyType
    nodes: frozenset[int]
    fg_assignment: frozenset[int] | None = None
    parities: Mapping[int, int] | None = None
    dims: tuple[int, int] | None = None
    complemented: bool = False


def make_selection(
    tree: Tree,
    consistency: ConsistencyType,
    nodes,
    *,
    fg_assignment=None,
    parities: Mapping[int, int] | None = None,
    complemented: bool = False,
    dims: NodeDims | None = None,
) -> NodeSelection:
    """Validate and assemble a :class:`NodeSelection`.

    Raises :class:`InconsistentSelectionError` when the node set violates
    the invariants of the requested consistency type.
    """
    node_set = frozenset(int(n) for n in nodes)
    for n in node_set:
        if n < 0 or n >= tree.node_count:
            raise InconsistentSelectionError(f"node index {n} out of range")

    fg: frozenset[int] | None = None
    par: dict[int, int] | None = None
    if consistency is ConsistencyType.B:
        if not is_cut(tree, node_set):
            raise InconsistentSelectionError("b-consistency requires the nodes to be a cut")
        fg = frozenset(int(n) for n in (fg_assignment if fg_assignment is not None else ()))
        if not fg <= node_set:
            raise InconsistentSelectionError("foreground assignment must be a subset of the cut")
    elif consistency is ConsistencyType.C:
        la = layers(tree, node_set)
        if la.max_layer > 0:
            raise InconsistentSelectionError("c-consistency requires pairwise disjoint nodes")
        par = {n: 0 for n in sorted(node_set)}
    else:
        la = layers(tree, node_set)
        if parities is not None:
            given = {int(n): int(i) for n, i in parities.items()}
            if given != la.layer:
                raise InconsistentSelectionError("given layer parities do not match the node set")
        par = la.layer

    selection = NodeSelection(
        tree=tree,
        consistency=consistency,
        nodes=node_set,
        fg_assignment=fg,
        parities=par,
        complemented=complemented,
    )
    if dims is not None:
        selection = NodeSelection(
            tree=tree,
            consistency=consistency,
            nodes=node_set,
            fg_assignment=fg,
            parities=par,
            dims=segment_dims(selection, dims),
            complemented=complemented,
        )
    return selection


def _signed_nodes(selection: NodeSelection) -> list[tuple[int, int]]:
    """(node, sign) terms of the segment dimension sum for the selection."""
    c = selection.consistency
    if c is ConsistencyType.B:
        assert selection.fg_assignment is not None
        return [(n, 1) for n in sorted(selection.fg_assignment)]
    assert selection.parities is not None
    return [(n, -1 if layer % 2 else 1) for n, layer in sorted(selection.parities.items())]


def _validate(selection: NodeSelection) -> None:
    tree = selection.tree
    if selection.consistency is ConsistencyType.B:
        if not is_cut(tree, selection.nodes):
            raise InconsistentSelectionError("b-consistency requires the nodes to be a cut")
        if selection.fg_assignment is None or not selection.fg_assignment <= selection.nodes:
            raise InconsistentSelectionError("foreground assignment must be a subset of the cut")
        return
    la = layers(tree, selection.nodes)
    if selection.consistency is ConsistencyType.C:
        if la.max_layer > 0:
            raise InconsistentSelectionError("c-consistency requires pairwise disjoint nodes")
        return
    if selection.parities is None or dict(selection.parities) != la.layer:
        raise InconsistentSelectionError("layer parities do not match the node set")


def segment_dims(selection: NodeSelection, dims: NodeDims) -> tuple[int, int]:
    """Realized segment dimensions ``(b_s, f_s)`` of a selection.

    Signed sum of the node dimensions, the sign of a node being
    ``(-1) ** layer``.  For ``b`` the sum ranges over the foreground
    assignment only; for ``c`` every sign is +1.
    """
    _validate(selection)
    b_s = 0
    f_s = 0
    for n, sign in _signed_nodes(selection):
        b_s += sign * int(dims.b[n])
        f_s += sign * int(dims.f[n])
    return b_s, f_s


def realize_segmentation(tree: Tree, selection: NodeSelection) -> np.ndarray:
    """Per-leaf boolean labeling of the selection's scored foreground.

    A leaf is inside the specified segment iff it lies in a foreground
    node (``b``), in any node (``c``), or in an odd number of selected
    nodes (``d``).  A complemented selection inverts the labeling.
    """
    _validate(selection)
    counted: set[int]
    if selection.consistency is ConsistencyType.B:
        assert selection.fg_assignment is not None
        counted = set(selection.fg_assignment)
    else:
        counted = set(selection.nodes)
    inside = [0] * tree.node_count  # counted nodes containing each node, itself included
    ch = tree.children
    for node in reversed(tree.post_order.tolist()):
        own = inside[node] + (1 if node in counted else 0)
        if node >= tree.leaf_count:
            inside[ch[node, 0]] = own
            inside[ch[node, 1]] = own
        else:
            inside[node] = own
    if selection.consistency is ConsistencyType.D:
        fg = np.array([inside[leaf] % 2 == 1 for leaf in range(tree.leaf_count)])
    else:
        fg = np.array([inside[leaf] > 0 for leaf in range(tree.leaf_count)])
    if selection.complemented:
        fg = ~fg
    return fg


def jaccard(b_s: int, f_s: int, f_total: int, b_total: int) -> Fraction:
    """Exact Jaccard index ``f_s / (f_total + b_s)`` of a candidate segment."""
    _check_dims(b_s, f_s, f_total, b_total)
    return Fraction(f_s, f_total + b_s)


def jaccard_complement(b_s: int, f_s: int, f_total: int, b_total: int) -> Fraction:
    """Exact Jaccard index of the complement segment."""
    _check_dims(b_s, f_s, f_total, b_total)
    return Fraction(f_total - f_s, f_total + b_total - b_s)


def _check_dims(b_s: int, f_s: int, f_total: int, b_total: int) -> None:
    if f_total == 0:
        raise EmptyGroundTruthError("ground-truth foreground is empty")
    if not (0 <= f_s <= f_total):
        raise ValueError(f"f_s={f_s} outside 0..{f_total}")
    if not (0 <= b_s <= b_total):
        raise ValueError(f"b_s={b_s} outside 0..{b_total}")


def benefit_pair(
    nodes,
    attribute: Attribute,
    consistency: ConsistencyType,
    parities: Mapping[int, int] | None = None,
) -> BenefitPair:
    """Benefit of a node set as an exact integer pair.

    ``b``: sum of attributes over the positive-attribute nodes of the cut.
    ``c``: plain sum.  ``d``: signed sum with sign ``(-1) ** layer``.
    """
    node_list = sorted(int(n) for n in nodes)
    f_sum = 0
    b_sum = 0
    if consistency is ConsistencyType.B:
        omega = attribute.omega
        p, q = omega.numerator, omega.denominator
        for n in node_list:
            fa, ba = int(attribute.f[n]), int(attribute.b[n])
            if q * fa - p * ba > 0:
                f_sum += fa
                b_sum += ba
    elif consistency is ConsistencyType.C:
        for n in node_list:
            f_sum += int(attribute.f[n])
            b_sum += int(attribute.b[n])
    else:
        if parities is None:
            raise InconsistentSelectionError("d-consistency benefit needs layer parities")
        for n in node_list:
            sign = -1 if parities[n] % 2 else 1
            f_sum += sign * int(attribute.f[n])
            b_sum += sign * int(attribute.b[n])
    return BenefitPair(f_sum, b_sum)


def benefit(
    nodes,
    attribute: Attribute,
    consistency: ConsistencyType,
    parities: Mapping[int, int] | None = None,
) -> Fraction:
    """Benefit of a node set as an exact rational."""
    return benefit_pair(nodes, attribute, consistency, parities).value(attribute.omega)
