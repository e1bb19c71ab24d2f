import random

import pytest

from hierj import build_tree, dims_from_leaf_values


@pytest.fixture
def chain():
    """Five-leaf caterpillar with three foreground and two background leaves.

    Leaves: 0 (f=3), 1 (f=3), 2 (f=4), 3 (b=4), 4 (b=6).  Merge order:
    5 = {2,3}, 6 = {5,1}, 7 = {6,0}, root 8 = {7,4}.  Totals F = B = 10.
    """
    tree = build_tree([7, 6, 5, 5, 8, 6, 7, 8, -1], 5)
    dims = dims_from_leaf_values(tree, [3, 3, 4, 0, 0], [0, 0, 0, 4, 6])
    return tree, dims


@pytest.fixture
def nested_tree():
    """Eight-leaf tree with two uneven branches, deep nesting on the right.

    Internal nodes: 8 = {0,1}, 9 = {5,6}, 10 = {2,8}, 11 = {7,9},
    12 = {3,10}, 13 = {4,11}, root 14 = {12,13}.
    """
    return build_tree([8, 8, 10, 12, 13, 9, 9, 11, 10, 11, 12, 13, 14, 14, -1], 8)


@pytest.fixture
def balanced4():
    """Balanced four-leaf tree: 4 = {0,1}, 5 = {2,3}, root 6."""
    return build_tree([4, 4, 5, 5, 6, 6, -1], 4)


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
