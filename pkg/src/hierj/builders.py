"""Hierarchy construction: geometric splits, single-linkage MST, filtering."""

from __future__ import annotations

import heapq
from fractions import Fraction

import numpy as np

from .errors import (
    DisconnectedGraphError,
    LabelOutOfRangeError,
    ShapeMismatchError,
    ThresholdTooLargeError,
)
from .hierarchy import Tree, build_tree


def geometric_tree(width: int, height: int) -> tuple[Tree, np.ndarray]:
    """Image-independent tree of recursive halvings.

    Every node is a rectangle split into two equal parts along its longer
    axis (ties split the width); with an odd extent the first (left or
    top) child receives the extra column or row.  Leaves are the pixels,
    labeled ``y * width + x``.
    """
    if width < 1 or height < 1:
        raise ValueError(f"image extent must be positive, got {width}x{height}")
    leaf_count = width * height
    parent = [-1] * (2 * leaf_count - 1)
    counter = [leaf_count]

    def split(x0: int, y0: int, w: int, h: int) -> int:
        if w == 1 and h == 1:
            return y0 * width + x0
        if w >= h:
            w1 = (w + 1) // 2
            a = split(x0, y0, w1, h)
            b = split(x0 + w1, y0, w - w1, h)
        else:
            h1 = (h + 1) // 2
            a = split(x0, y0, w, h1)
            b = split(x0, y0 + h1, w, h - h1)
        node = counter[0]
        counter[0] += 1
        parent[a] = node
        parent[b] = node
        return node

    split(0, 0, width, height)
    labels = np.arange(leaf_count, dtype=np.int64).reshape(height, width)
    tree = build_tree(parent, leaf_count, leaf_map=labels)
    return tree, labels


def _kruskal_parents(edges, vertex_count: int) -> list[int]:
    """Single-linkage merge order from a weighted edge list.

    Edges are processed in ascending ``(weight, min vertex, max vertex)``
    order; every union of two components creates one internal node whose
    children are the components' current subtree roots.
    """
    if vertex_count < 1:
        raise ValueError("vertex count must be positive")
    norm = []
    for u, v, w in edges:
        u, v = int(u), int(v)
        if u == v:
            continue
        if u > v:
            u, v = v, u
        norm.append((w, u, v))
    norm.sort()

    parent_of = [-1] * (2 * vertex_count - 1)
    uf = list(range(vertex_count))
    comp_root = list(range(vertex_count))  # union-find root -> subtree root node

    def find(x: int) -> int:
        while uf[x] != x:
            uf[x] = uf[uf[x]]
            x = uf[x]
        return x

    nxt = vertex_count
    for _, u, v in norm:
        ru, rv = find(u), find(v)
        if ru == rv:
            continue
        parent_of[comp_root[ru]] = nxt
        parent_of[comp_root[rv]] = nxt
        uf[rv] = ru
        comp_root[ru] = nxt
        nxt += 1
        if nxt == 2 * vertex_count - 1:
            break
    if nxt != 2 * vertex_count - 1:
        raise DisconnectedGraphError(
            f"edges connect only part of the {vertex_count} vertices"
        )
    return parent_of


def _pixel_grid_edges(img: np.ndarray):
    """4-adjacency pixel edges weighted by squared color distance."""
    h, w = img.shape[0], img.shape[1]
    ids = np.arange(h * w, dtype=np.int64).reshape(h, w)
    flat = img.reshape(h, w, -1).astype(np.int64)
    edges = []
    if w > 1:
        d = ((flat[:, 1:] - flat[:, :-1]) ** 2).sum(axis=2)
        for (u, v, wt) in zip(ids[:, :-1].ravel(), ids[:, 1:].ravel(), d.ravel()):
            edges.append((int(wt), int(u), int(v)))
    if h > 1:
        d = ((flat[1:, :] - flat[:-1, :]) ** 2).sum(axis=2)
        for (u, v, wt) in zip(ids[:-1, :].ravel(), ids[1:, :].ravel(), d.ravel()):
            edges.append((int(wt), int(u), int(v)))
    return [(u, v, wt) for wt, u, v in edges]


def _superpixel_edges(img: np.ndarray, labels: np.ndarray):
    """Region-adjacency edges weighted by exact squared mean-color distance."""
    h, w = labels.shape
    if img.shape[:2] != (h, w):
        raise ShapeMismatchError(
            f"image shape {img.shape[:2]} does not match label shape {labels.shape}"
        )
    labels = labels.astype(np.int64)
    count = int(labels.max()) + 1
    seen = np.unique(labels)
    if labels.min() < 0 or seen.size != count:
        raise LabelOutOfRangeError("superpixel labels must be contiguous 0..S-1")
    flat = img.reshape(h, w, -1).astype(np.int64)
    channels = flat.shape[2]
    sums = np.zeros((count, channels), dtype=np.int64)
    for c in range(channels):
        sums[:, c] = np.bincount(labels.ravel(), weights=flat[:, :, c].ravel(), minlength=count)
    sizes = np.bincount(labels.ravel(), minlength=count)

    pairs = set()
    if w > 1:
        a, b = labels[:, :-1].ravel(), labels[:, 1:].ravel()
        for u, v in zip(a.tolist(), b.tolist()):
            if u != v:
                pairs.add((min(u, v), max(u, v)))
    if h > 1:
        a, b = labels[:-1, :].ravel(), labels[1:, :].ravel()
        for u, v in zip(a.tolist(), b.tolist()):
            if u != v:
                pairs.add((min(u, v), max(u, v)))

    edges = []
    for u, v in sorted(pairs):
        nu, nv = int(sizes[u]), int(sizes[v])
        num = 0
        for c in range(channels):
            diff = int(sums[u, c]) * nv - int(sums[v, c]) * nu
            num += diff * diff
        edges.append((u, v, Fraction(num, (nu * nv) ** 2)))
    return edges, count


def l2_mst_tree(
    rgb_image, superpixel_labels=None
) -> tuple[Tree, np.ndarray]:
    """Single-linkage hierarchy over the color-difference graph.

    Vertices are pixels (4-adjacency) or, when ``superpixel_labels`` is
    given, superpixels with mean-color weights.  Weights are squared L2
    color distances, which order merges exactly like plain L2.
    """
    img = np.asarray(rgb_image)
    if img.ndim == 2:
        img = img[:, :, np.newaxis]
    if img.ndim != 3 or img.shape[0] < 1 or img.shape[1] < 1:
        raise ShapeMismatchError(f"expected an H x W x C image, got shape {img.shape}")
    if superpixel_labels is None:
        h, w = img.shape[0], img.shape[1]
        parents = _kruskal_parents(_pixel_grid_edges(img), h * w)
        labels = np.arange(h * w, dtype=np.int64).reshape(h, w)
        leaf_count = h * w
    else:
        labels = np.asarray(superpixel_labels).astype(np.int64)
        edges, leaf_count = _superpixel_edges(img, labels)
        parents = _kruskal_parents(edges, leaf_count)
    return build_tree(parents, leaf_count, leaf_map=labels), labels


def external_weight_tree(weights, vertex_count: int) -> tuple[Tree, np.ndarray]:
    """Single-linkage hierarchy from externally supplied edge weights."""
    for u, v, w in weights:
        if not (0 <= int(u) < vertex_count and 0 <= int(v) < vertex_count):
            raise ValueError(f"edge ({u}, {v}) references a vertex outside 0..{vertex_count - 1}")
        if w < 0:
            raise ValueError(f"edge ({u}, {v}) has negative weight {w}")
    parents = _kruskal_parents(weights, vertex_count)
    labels = np.arange(vertex_count, dtype=np.int64)
    return build_tree(parents, vertex_count, leaf_map=labels), labels


def filter_small_areas(tree: Tree, leaf_areas, threshold: int) -> Tree:
    """Contract merges that split off a region smaller than ``threshold``.

    Every non-root internal node whose smaller child covers less area than
    the threshold is removed; the orphaned children join the nearest kept
    ancestor, whose child list is then re-binarized by repeatedly merging
    its two smallest-area members (ties by smallest contained node index).
    Small regions therefore merge as early as possible.  ``threshold=0``
    returns the tree unchanged.
    """
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    leaf_areas = [int(a) for a in np.asarray(leaf_areas).ravel().tolist()]
    if len(leaf_areas) != tree.leaf_count:
        raise ShapeMismatchError(
            f"expected {tree.leaf_count} leaf areas, got {len(leaf_areas)}"
        )
    area = [0] * tree.node_count
    ch = tree.children
    for n in tree.post_order.tolist():
        if n < tree.leaf_count:
            area[n] = leaf_areas[n]
        else:
            area[n] = area[ch[n, 0]] + area[ch[n, 1]]
    total = area[tree.root]
    if threshold >= total and tree.node_count > 1:
        raise ThresholdTooLargeError(
            f"threshold {threshold} covers the whole area {total}"
        )
    if threshold == 0 or tree.node_count == 1:
        return tree

    removed = [False] * tree.node_count
    for n in range(tree.leaf_count, tree.node_count):
        if n == tree.root:
            continue
        if min(area[ch[n, 0]], area[ch[n, 1]]) < threshold:
            removed[n] = True
    if not any(removed):
        return tree

    # units[n] for kept internal nodes: flattened child list after contraction
    merges: list[tuple[int, int]] = []  # rebuilt internal nodes, bottom-up
    # a unit is a leaf index, ~i for merge record i, keyed by (area, min id)
    unit_area: list[int] = []
    unit_minid: list[int] = []

    def unit_key(u: int):
        if u >= 0:
            return (leaf_areas[u], u)
        return (unit_area[~u], unit_minid[~u])

    def binarize(units: list[int]) -> int:
        heap = [(unit_key(u), u) for u in units]
        heapq.heapify(heap)
        while len(heap) > 1:
            (a1, m1), u1 = heapq.heappop(heap)
            (a2, m2), u2 = heapq.heappop(heap)
            merges.append((u1, u2))
            unit_area.append(a1 + a2)
            unit_minid.append(min(m1, m2))
            heapq.heappush(heap, ((a1 + a2, min(m1, m2)), ~(len(merges) - 1)))
        return heap[0][1]

    unit_of: dict[int, int] = {}          # kept node -> its rebuilt unit
    deferred: dict[int, list[int]] = {}   # removed node -> bubbled-up parts
    for n in tree.post_order.tolist():
        if n < tree.leaf_count:
            unit_of[n] = n
            continue
        parts: list[int] = []
        for c in (int(ch[n, 0]), int(ch[n, 1])):
            if removed[c]:
                parts.extend(deferred.pop(c))
            else:
                parts.append(unit_of[c])
        if removed[n]:
            deferred[n] = parts
        else:
            unit_of[n] = binarize(parts)

    # renumber: leaves keep their ids, internals get fresh post-order ids
    parent = [-1] * tree.node_count
    node_id: dict[int, int] = {}
    next_id = tree.leaf_count
    stack = [(unit_of[tree.root], False)]
    while stack:
        cur, expanded = stack.pop()
        if cur >= 0:
            node_id[cur] = cur
            continue
        a, b = merges[~cur]
        if expanded:
            node_id[cur] = next_id
            parent[node_id[a]] = next_id
            parent[node_id[b]] = next_id
            next_id += 1
        else:
            stack.append((cur, True))
            stack.append((b, False))
            stack.append((a, False))
    return build_tree(parent, tree.leaf_count, leaf_map=tree.leaf_map)
