"""Binary partition trees: construction, validation, traversal and queries.

Nodes are dense integer indices ``0 .. node_count-1`` with the leaves
occupying ``0 .. leaf_count-1``.  Trees are immutable after construction;
ground-truth annotations live in a separate :class:`NodeDims` so one tree
can be scored against many ground truths.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadLengthError,
    CycleError,
    LabelOutOfRangeError,
    MultipleRootsError,
    NoPartitionError,
    NotBinaryError,
    ShapeMismatchError,
    TreeStructureError,
)

ROOT_PARENT = -1


@dataclass(frozen=True, eq=False)
class Tree:
    """Immutable binary partition tree.

    Attributes
    ----------
    parent:
        ``parent[n]`` is the parent index of node ``n``; the root carries
        :data:`ROOT_PARENT`.
    children:
        ``(node_count, 2)`` array; row ``n`` holds the two children of an
        internal node in ascending index order, or ``(-1, -1)`` for a leaf.
    post_order:
        Permutation of node indices visiting every node after its children.
    subtree_leaves:
        Number of leaves below (and including) each node.
    depth:
        Distance from the root (root has depth 0).
    leaf_map:
        Optional array of leaf labels, one per element of the underlying
        set (e.g. one per pixel).  Values are leaf indices.
    """

    parent: np.ndarray
    children: np.ndarray
    post_order: np.ndarray
    leaf_count: int
    node_count: int
    root: int
    subtree_leaves: np.ndarray
    depth: np.ndarray
    leaf_map: np.ndarray | None = field(default=None, repr=False)

    def is_leaf(self, node: int) -> bool:
        return node < self.leaf_count

    def leaves_under(self, node: int) -> np.ndarray:
        """Sorted array of the leaf indices contained in ``node``."""
        if node < self.leaf_count:
            return np.array([node], dtype=np.int64)
        out = []
        stack = [node]
        while stack:
            n = stack.pop()
            if n < self.leaf_count:
                out.append(n)
            else:
                stack.append(int(self.children[n, 0]))
                stack.append(int(self.children[n, 1]))
        out.sort()
        return np.array(out, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class NodeDims:
    """Per-node ground-truth overlap counts.

    ``f[n]`` and ``b[n]`` are the pixel counts of node ``n`` inside the
    ground-truth foreground and background.  Both are additive: an internal
    node's counts are the sums over its children.
    """

    f: np.ndarray
    b: np.ndarray
    f_total: int
    b_total: int


@dataclass(frozen=True)
class LayerAssignment:
    """Nesting layers of a node subset.

    The layer of a node is the number of selected nodes that strictly
    contain it.  ``max_layer`` is -1 for the empty set.
    """

    layer: dict[int, int]
    max_layer: int


def build_tree(
    parent_array,
    leaf_count: int,
    leaf_map: np.ndarray | None = None,
) -> Tree:
    """Validate a parent array and derive the full tree structure.

    ``parent_array`` must have length ``2 * leaf_count - 1``, contain exactly
    one root sentinel (-1), and describe a tree in which indices below
    ``leaf_count`` are leaves and every other node has exactly two children.
    """
    parent = np.asarray(parent_array, dtype=np.int64).copy()
    if leaf_count < 1:
        raise BadLengthError(f"leaf_count must be >= 1, got {leaf_count}")
    n = 2 * leaf_count - 1
    if parent.ndim != 1 or parent.shape[0] != n:
        raise BadLengthError(
            f"expected {n} parent entries for {leaf_count} leaves, got {parent.shape}"
        )

    roots = np.flatnonzero(parent == ROOT_PARENT)
    if roots.size != 1:
        raise MultipleRootsError(f"expected exactly one root, found {roots.size}")
    root = int(roots[0])

    non_root = np.flatnonzero(parent != ROOT_PARENT)
    bad = non_root[(parent[non_root] < 0) | (parent[non_root] >= n)]
    if bad.size:
        raise TreeStructureError(
            f"parent index {int(parent[bad[0]])} of node {int(bad[0])} is out of range"
        )
    if np.any(parent[non_root] == non_root):
        raise CycleError("a node is its own parent")

    counts = np.bincount(parent[non_root], minlength=n)
    leaf_with_children = np.flatnonzero(counts[:leaf_count])
    if leaf_with_children.size:
        raise NotBinaryError(
            f"leaf {int(leaf_with_children[0])} has {int(counts[leaf_with_children[0]])} children"
        )
    internal = np.arange(leaf_count, n)
    wrong = internal[counts[leaf_count:] != 2] if n > 1 else np.array([], dtype=np.int64)
    if wrong.size:
        raise NotBinaryError(
            f"internal node {int(wrong[0])} has {int(counts[wrong[0]])} children"
        )

    children = np.full((n, 2), -1, dtype=np.int64)
    slot = np.zeros(n, dtype=np.int64)
    for c in range(n):
        p = int(parent[c])
        if p == ROOT_PARENT:
            continue
        children[p, slot[p]] = c
        slot[p] += 1
    # children were discovered in index order, so each row is ascending

    post_order = np.empty(n, dtype=np.int64)
    depth = np.zeros(n, dtype=np.int64)
    idx = 0
    visited = 0
    stack: list[tuple[int, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            post_order[idx] = node
            idx += 1
            continue
        visited += 1
        stack.append((node, True))
        if node >= leaf_count:
            c0, c1 = int(children[node, 0]), int(children[node, 1])
            depth[c0] = depth[node] + 1
            depth[c1] = depth[node] + 1
            stack.append((c1, False))
            stack.append((c0, False))
    if visited != n:
        raise CycleError(f"only {visited} of {n} nodes are reachable from the root")

    subtree_leaves = np.zeros(n, dtype=np.int64)
    for node in post_order:
        node = int(node)
        if node < leaf_count:
            subtree_leaves[node] = 1
        else:
            subtree_leaves[node] = (
                subtree_leaves[children[node, 0]] + subtree_leaves[children[node, 1]]
            )

    if leaf_map is not None:
        leaf_map = np.asarray(leaf_map)
        _validate_leaf_map(leaf_map, leaf_count)

    parent.setflags(write=False)
    children.setflags(write=False)
    post_order.setflags(write=False)
    subtree_leaves.setflags(write=False)
    depth.setflags(write=False)
    return Tree(
        parent=parent,
        children=children,
        post_order=post_order,
        leaf_count=leaf_count,
        node_count=n,
        root=root,
        subtree_leaves=subtree_leaves,
        depth=depth,
        leaf_map=leaf_map,
    )


def _validate_leaf_map(leaf_map: np.ndarray, leaf_count: int) -> None:
    if leaf_map.size == 0:
        raise LabelOutOfRangeError("leaf map is empty")
    lo = int(leaf_map.min())
    hi = int(leaf_map.max())
    if lo < 0 or hi >= leaf_count:
        raise LabelOutOfRangeError(
            f"leaf labels must lie in 0..{leaf_count - 1}, found range {lo}..{hi}"
        )
    present = np.unique(leaf_map)
    if present.size != leaf_count:
        missing = np.setdiff1d(np.arange(leaf_count), present)
        raise LabelOutOfRangeError(f"leaf {int(missing[0])} has an empty region")


def dims_from_leaf_values(tree: Tree, leaf_f, leaf_b) -> NodeDims:
    """Build :class:`NodeDims` from per-leaf counts by summing up the tree."""
    leaf_f = np.asarray(leaf_f, dtype=np.int64)
    leaf_b = np.asarray(leaf_b, dtype=np.int64)
    if leaf_f.shape != (tree.leaf_count,) or leaf_b.shape != (tree.leaf_count,):
        raise ShapeMismatchError(
            f"expected {tree.leaf_count} per-leaf values, got {leaf_f.shape} and {leaf_b.shape}"
        )
    if leaf_f.size and (leaf_f.min() < 0 or leaf_b.min() < 0):
        raise ValueError("leaf dimensions must be nonnegative")
    n = tree.node_count
    f = [0] * n
    b = [0] * n
    for i in range(tree.leaf_count):
        f[i] = int(leaf_f[i])
        b[i] = int(leaf_b[i])
    ch = tree.children
    for node in tree.post_order.tolist():
        if node >= tree.leaf_count:
            c0 = ch[node, 0]
            c1 = ch[node, 1]
            f[node] = f[c0] + f[c1]
            b[node] = b[c0] + b[c1]
    try:
        f_arr = np.array(f, dtype=np.int64)
        b_arr = np.array(b, dtype=np.int64)
    except OverflowError:
        raise ValueError(
            "node dimension totals exceed the supported 63-bit range"
        ) from None
    f_arr.setflags(write=False)
    b_arr.setflags(write=False)
    return NodeDims(f=f_arr, b=b_arr, f_total=f[tree.root], b_total=b[tree.root])


def annotate_dims(tree: Tree, gt_foreground, leaf_labels) -> NodeDims:
    """Count ground-truth overlap per node.

    ``gt_foreground`` is a boolean mask and ``leaf_labels`` maps every pixel
    to its leaf index.  Leaf counts are exact pixel counts; internal counts
    are children sums.
    """
    mask = np.asarray(gt_foreground, dtype=bool)
    labels = np.asarray(leaf_labels)
    if mask.shape != labels.shape:
        raise ShapeMismatchError(
            f"mask shape {mask.shape} does not match label map shape {labels.shape}"
        )
    labels = labels.astype(np.int64, copy=False).ravel()
    if labels.size == 0:
        raise ShapeMismatchError("mask and label map are empty")
    if labels.min() < 0 or labels.max() >= tree.leaf_count:
        raise LabelOutOfRangeError(
            f"labels must lie in 0..{tree.leaf_count - 1}, "
            f"found range {int(labels.min())}..{int(labels.max())}"
        )
    flat_mask = mask.ravel()
    leaf_f = np.bincount(labels[flat_mask], minlength=tree.leaf_count)
    leaf_total = np.bincount(labels, minlength=tree.leaf_count)
    leaf_b = leaf_total - leaf_f
    return dims_from_leaf_values(tree, leaf_f, leaf_b)


def layers(tree: Tree, nodes) -> LayerAssignment:
    """Assign each selected node its nesting layer.

    The layer of ``n`` equals the number of selected nodes strictly
    containing ``n``.  Any subset is valid; disjoint nodes all land in
    layer 0.
    """
    selected = frozenset(int(n) for n in nodes)
    for n in selected:
        if n < 0 or n >= tree.node_count:
            raise ValueError(f"node index {n} out of range")
    # contains[x] = number of selected nodes containing x, x itself included
    contains: dict[int, int] = {}
    parent = tree.parent

    def count_containing(x: int) -> int:
        path = []
        while x != ROOT_PARENT and x not in contains:
            path.append(x)
            x = int(parent[x])
        acc = 0 if x == ROOT_PARENT else contains[x]
        for node in reversed(path):
            acc += 1 if node in selected else 0
            contains[node] = acc
        return contains[path[0]] if path else acc

    layer: dict[int, int] = {}
    for n in sorted(selected):
        total = count_containing(n)
        layer[n] = total - 1  # drop n itself
    max_layer = max(layer.values(), default=-1)
    return LayerAssignment(layer=layer, max_layer=max_layer)


def is_cut(tree: Tree, nodes) -> bool:
    """True iff ``nodes`` partitions the whole element set.

    Equivalently, every root-to-leaf path contains exactly one selected
    node.
    """
    selected = set(int(n) for n in nodes)
    if not selected:
        return False
    for n in selected:
        if n < 0 or n >= tree.node_count:
            return False
    cover = [0] * tree.node_count  # selected strict ancestors of each node
    ch = tree.children
    for node in reversed(tree.post_order.tolist()):
        if node >= tree.leaf_count:
            inc = cover[node] + (1 if node in selected else 0)
            cover[ch[node, 0]] = inc
            cover[ch[node, 1]] = inc
    for leaf in range(tree.leaf_count):
        if cover[leaf] + (1 if leaf in selected else 0) != 1:
            return False
    return True


def coarsest_partition(tree: Tree, target) -> frozenset[int]:
    """Unique smallest set of disjoint nodes whose leaves union to ``target``.

    ``target`` is a set of leaf indices.  Computed bottom-up: a node enters
    the partition when it is fully covered by the target but its parent is
    not.  Raises :class:`NoPartitionError` for the empty target (nodes are
    non-empty, so the empty set has no partition).
    """
    wanted = set(int(x) for x in target)
    if not wanted:
        raise NoPartitionError("the empty set has no partition into tree nodes")
    for x in wanted:
        if x < 0 or x >= tree.leaf_count:
            raise ValueError(f"target entry {x} is not a leaf index")
    covered = [False] * tree.node_count
    ch = tree.children
    for node in tree.post_order.tolist():
        if node < tree.leaf_count:
            covered[node] = node in wanted
        else:
            covered[node] = covered[ch[node, 0]] and covered[ch[node, 1]]
    parent = tree.parent
    out = set()
    for node in range(tree.node_count):
        if covered[node]:
            p = int(parent[node])
            if p == ROOT_PARENT or not covered[p]:
                out.add(node)
    return frozenset(out)
