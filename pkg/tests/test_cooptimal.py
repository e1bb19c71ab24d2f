from fractions import Fraction

import pytest

from hierj import (
    Attribute,
    ConsistencyType,
    best_of_both,
    best_unlimited,
    brute_force_best,
    build_tree,
    curve,
    dims_from_leaf_values,
    optimize_jaccard,
    optimize_jaccard_complement,
    realize_segmentation,
    solve_c,
)
from hierj.errors import BudgetOutOfRangeError, EmptyGroundTruthError
from hierj.oracle import random_dims, random_tree

B, C, D = ConsistencyType.B, ConsistencyType.C, ConsistencyType.D


class TestChainCurves:
    """Frozen values for the five-leaf chain, confirmed against the oracle."""

    PLAIN = {
        "b": [Fraction(1, 2), Fraction(5, 7), Fraction(5, 7), Fraction(5, 7), Fraction(1)],
        "c": [Fraction(5, 7), Fraction(5, 7), Fraction(1), Fraction(1), Fraction(1)],
        "d": [Fraction(5, 7), Fraction(1), Fraction(1), Fraction(1), Fraction(1)],
    }
    BOTH = {
        "b": [Fraction(1, 2), Fraction(5, 7), Fraction(5, 7), Fraction(5, 7), Fraction(1)],
        "c": [Fraction(5, 7), Fraction(1), Fraction(1), Fraction(1), Fraction(1)],
        "d": [Fraction(5, 7), Fraction(1), Fraction(1), Fraction(1), Fraction(1)],
    }

    @pytest.mark.parametrize("letter", ["b", "c", "d"])
    def test_plain_orientation(self, chain, letter):
        tree, dims = chain
        got = [r.jaccard for _, r in curve(tree, dims, letter, 5, complement=False)]
        assert got == self.PLAIN[letter]
        for k, expected in enumerate(self.PLAIN[letter], start=1):
            oracle, _ = brute_force_best(
                tree, dims, ConsistencyType(letter), k, use_complement=False
            )
            assert oracle == expected

    @pytest.mark.parametrize("letter", ["b", "c", "d"])
    def test_both_orientations(self, chain, letter):
        tree, dims = chain
        got = [r.jaccard for _, r in curve(tree, dims, letter, 5)]
        assert got == self.BOTH[letter]
        for k, expected in enumerate(self.BOTH[letter], start=1):
            oracle, _ = brute_force_best(tree, dims, ConsistencyType(letter), k)
            assert oracle == expected

    def test_two_budget_difference_reaches_perfect(self, chain):
        tree, dims = chain
        res = optimize_jaccard(tree, dims, D, 2)
        assert res.jaccard == 1
        assert res.selection.parities == {7: 0, 3: 1}
        fg = realize_segmentation(tree, res.selection)
        assert fg.tolist() == [True, True, True, False, False]

    def test_trace_on_c_two(self, chain):
        # the omega=0 solve ties on the root (value 1/2), the next step
        # jumps to the optimum 5/7 and sticks
        tree, dims = chain
        res = optimize_jaccard(tree, dims, C, 2, omega0=Fraction(0))
        assert res.omega_trace == (Fraction(1, 2), Fraction(5, 7))
        assert res.jaccard == Fraction(5, 7)
        assert res.iterations == 3


class TestPerfectNode:
    def test_single_clean_node(self, balanced4):
        dims = dims_from_leaf_values(balanced4, [3, 7, 0, 0], [0, 0, 5, 5])
        for letter in "bcd":
            res = best_of_both(balanced4, dims, letter, balanced4.leaf_count)
            assert res.jaccard == 1
        res = optimize_jaccard(balanced4, dims, C, 1)
        assert res.jaccard == 1
        assert res.selection.nodes == {4}

    def test_perfect_complement(self, chain):
        # background is exactly node 5 but the foreground {0, 1, 4} needs
        # three disjoint nodes, so at k=1 only the complement reaches 1
        tree, _ = chain
        dims = dims_from_leaf_values(tree, [5, 5, 0, 0, 5], [0, 0, 3, 7, 0])
        assert optimize_jaccard(tree, dims, C, 1).jaccard < 1
        res = optimize_jaccard_complement(tree, dims, C, 1)
        assert res.jaccard == 1
        assert res.complemented
        assert res.selection.nodes == {5}
        both = best_of_both(tree, dims, C, 1)
        assert both.jaccard == 1 and both.complemented


class TestIterationContract:
    def test_traces_strictly_increase(self, rng):
        for _ in range(40):
            tree = random_tree(rng, rng.randint(2, 10))
            dims = random_dims(rng, tree)
            k = rng.randint(1, min(6, tree.leaf_count))
            letter = rng.choice("bcd")
            for runner in (optimize_jaccard, optimize_jaccard_complement):
                res = runner(tree, dims, letter, k)
                trace = res.omega_trace
                assert all(a < b for a, b in zip(trace, trace[1:]))
                assert res.jaccard == trace[-1]
                assert res.iterations >= 2

    def test_fixed_point(self, rng):
        # re-solving at the final omega cannot improve the Jaccard value
        for _ in range(15):
            tree = random_tree(rng, 8)
            dims = random_dims(rng, tree)
            res = optimize_jaccard(tree, dims, C, 3)
            attr = Attribute.from_dims(dims, res.jaccard)
            again = solve_c(tree, attr, 3)
            b_s, f_s = (
                sum(int(dims.b[n]) for n in again.nodes),
                sum(int(dims.f[n]) for n in again.nodes),
            )
            assert Fraction(f_s, dims.f_total + b_s) == res.jaccard

    def test_bootstrap_from_omega_above_optimum(self, rng):
        for _ in range(15):
            tree = random_tree(rng, 8)
            dims = random_dims(rng, tree)
            k = rng.randint(1, 6)
            letter = rng.choice("bcd")
            low = optimize_jaccard(tree, dims, letter, k, omega0=Fraction(0))
            high = optimize_jaccard(tree, dims, letter, k, omega0=Fraction(1))
            assert low.jaccard == high.jaccard

    def test_rejects_bad_omega0(self, chain):
        tree, dims = chain
        with pytest.raises(ValueError):
            optimize_jaccard(tree, dims, C, 2, omega0=Fraction(3, 2))

    def test_rejects_empty_ground_truth(self, balanced4):
        dims = dims_from_leaf_values(balanced4, [0, 0, 0, 0], [1, 1, 1, 1])
        with pytest.raises(EmptyGroundTruthError):
            optimize_jaccard(balanced4, dims, C, 2)

    def test_rejects_bad_budget(self, chain):
        tree, dims = chain
        with pytest.raises(BudgetOutOfRangeError):
            curve(tree, dims, C, 6)


class TestCurveShape:
    def test_monotone_and_ordered(self, rng):
        for _ in range(10):
            tree = random_tree(rng, rng.randint(4, 10))
            dims = random_dims(rng, tree)
            kmax = min(6, tree.leaf_count)
            per = {}
            for letter in "bcd":
                values = [r.jaccard for _, r in curve(tree, dims, letter, kmax)]
                assert all(a <= b for a, b in zip(values, values[1:]))
                per[letter] = values
            for jb, jc, jd in zip(per["b"], per["c"], per["d"]):
                assert jb <= jc <= jd

    def test_saturation_at_full_budget(self, rng):
        for _ in range(10):
            tree = random_tree(rng, rng.randint(2, 9))
            dims = random_dims(rng, tree)
            unlimited = best_unlimited(tree, dims).jaccard
            for letter in "bcd":
                full = best_of_both(tree, dims, letter, tree.leaf_count).jaccard
                assert full == unlimited

    def test_exact_against_oracle_small(self, rng):
        for _ in range(25):
            tree = random_tree(rng, rng.randint(4, 9))
            dims = random_dims(rng, tree)
            k = rng.randint(1, min(6, tree.leaf_count))
            letter = rng.choice("bcd")
            cons = ConsistencyType(letter)
            expected, _ = brute_force_best(tree, dims, cons, k)
            assert best_of_both(tree, dims, cons, k).jaccard == expected
            plain_expected, _ = brute_force_best(
                tree, dims, cons, k, use_complement=False
            )
            assert optimize_jaccard(tree, dims, cons, k).jaccard == plain_expected

    def test_tie_prefers_plain_orientation(self, balanced4):
        # symmetric instance: both orientations reach the same value
        dims = dims_from_leaf_values(balanced4, [5, 5, 0, 0], [0, 0, 5, 5])
        res = best_of_both(balanced4, dims, C, 2)
        assert res.jaccard == 1
        assert not res.complemented
