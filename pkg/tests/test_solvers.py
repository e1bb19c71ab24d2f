from fractions import Fraction

import pytest

from hierj import (
    Attribute,
    ConsistencyType,
    benefit,
    build_tables,
    build_tree,
    dims_from_leaf_values,
    minimal_best,
    solve_b,
    solve_c,
    solve_d,
    solve_unlimited,
)
from hierj import enumerate_selections
from hierj._kernels import HAVE_NUMBA
from hierj.errors import BudgetOutOfRangeError
from hierj.oracle import random_dims, random_tree

B, C, D = ConsistencyType.B, ConsistencyType.C, ConsistencyType.D

OMEGAS = [Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(7, 9), Fraction(1)]


def oracle_best_benefit(tree, attr, consistency, k):
    """Enumeration maximum over the solver's search space.

    The d space excludes selections that use the root as a set-difference
    container (those realize complements and are handled by the separate
    complement run) and includes the empty selection.
    """
    best = None
    for sel in enumerate_selections(tree, consistency, k):
        if consistency is D and tree.root in sel.nodes and len(sel.nodes) >= 2:
            continue
        val = benefit(sel.nodes, attr, consistency, sel.parities)
        if best is None or val > best:
            best = val
    if consistency is D:
        best = max(best, Fraction(0))
    return best


class TestChainFixture:
    def test_b_budget_two(self, chain):
        tree, dims = chain
        attr = Attribute.from_dims(dims, Fraction(0))
        res = solve_b(tree, attr, 2)
        assert res.benefit.value(attr.omega) == 10
        assert res.size_used <= 2

    def test_b_budget_one_returns_root(self, chain):
        tree, dims = chain
        attr = Attribute.from_dims(dims, Fraction(0))
        res = solve_b(tree, attr, 1)
        assert res.nodes == {tree.root}
        assert res.benefit.value(attr.omega) == 10

    def test_c_budget_two(self, chain):
        tree, dims = chain
        attr = Attribute.from_dims(dims, Fraction(0))
        res = solve_c(tree, attr, 2)
        assert res.benefit.value(attr.omega) == 10

    def test_d_budget_two(self, chain):
        tree, dims = chain
        attr = Attribute.from_dims(dims, Fraction(0))
        res = solve_d(tree, attr, 2)
        assert res.benefit.value(attr.omega) == 10
        assert res.size_used <= 2

    def test_d_half_omega_prefers_difference(self, chain):
        tree, dims = chain
        # at omega=1/2 subtracting the background leaf 3 from node 7 pays off
        attr = Attribute.from_dims(dims, Fraction(1, 2))
        res = solve_d(tree, attr, 2)
        assert res.parities == {7: 0, 3: 1}
        assert res.benefit == benefit_pair_of(attr, res)

    def test_unlimited(self, chain):
        tree, dims = chain
        attr = Attribute.from_dims(dims, Fraction(5, 7))
        res = solve_unlimited(tree, attr)
        assert res.benefit.value(attr.omega) == 10
        assert res.positive_subset == {0, 1, 2}
        assert res.nodes == {0, 1, 2, 3, 4}

    def test_unlimited_all_negative(self, chain):
        tree, dims = chain
        flipped = dims_from_leaf_values(
            tree, [0, 0, 0, 0, 0], dims.b[: tree.leaf_count]
        )
        attr = Attribute.from_dims(flipped, Fraction(1))
        res = solve_unlimited(tree, attr)
        assert res.nodes == {tree.root}
        assert res.positive_subset == frozenset()
        assert res.benefit.value(attr.omega) == 0


def benefit_pair_of(attr, result):
    from hierj import benefit_pair

    cons = D if result.parities is not None else C
    return benefit_pair(result.nodes, attr, cons, result.parities)


class TestBudgets:
    @pytest.mark.parametrize("k", [0, -1, 6])
    def test_out_of_range(self, chain, k):
        tree, dims = chain
        attr = Attribute.from_dims(dims, Fraction(0))
        for solve in (solve_b, solve_c, solve_d):
            with pytest.raises(BudgetOutOfRangeError):
                solve(tree, attr, k)

    def test_budget_respected(self, rng):
        for _ in range(20):
            tree = random_tree(rng, 10)
            dims = random_dims(rng, tree)
            k = rng.randint(1, 6)
            attr = Attribute.from_dims(dims, Fraction(rng.randint(0, 3), 4))
            for solve in (solve_b, solve_c, solve_d):
                res = solve(tree, attr, k)
                assert len(res.nodes) <= k
                assert res.size_used == len(res.nodes)


class TestMinimalBest:
    def test_strictly_increasing_uses_full_budget(self, chain):
        tree, dims = chain
        attr = Attribute.from_dims(dims, Fraction(0))
        tables = build_tables(tree, attr, 3, C)
        # singles top out at 10 via node 7, so the vector plateaus at 1
        assert minimal_best(tables, 3) == 1

    def test_plateau_start(self, balanced4):
        dims = dims_from_leaf_values(balanced4, [5, 5, 0, 0], [0, 0, 1, 1])
        attr = Attribute.from_dims(dims, Fraction(0))
        tables = build_tables(balanced4, attr, 4, C)
        root_offset = int(tables.offsets[balanced4.root])
        keys = [tables.plus_key[root_offset + i] for i in range(5)]
        assert keys == [0, 10, 10, 10, 10]  # node 4 alone is already optimal
        assert minimal_best(tables, 4) == 1

    def test_extraction_at_kp_matches_full_budget(self, rng):
        for _ in range(20):
            tree = random_tree(rng, 9)
            dims = random_dims(rng, tree)
            k = rng.randint(1, 6)
            omega = rng.choice(OMEGAS)
            attr = Attribute.from_dims(dims, omega)
            for cons, solve in ((B, solve_b), (C, solve_c), (D, solve_d)):
                tables = build_tables(tree, attr, k, cons)
                kp = minimal_best(tables, k)
                res = solve(tree, attr, k)
                o = int(tables.offsets[tree.root])
                assert res.size_used <= max(kp, 1)
                full_key = max(
                    tables.plus_key[o + i]
                    for i in range(0 if cons is D else 1, min(k, int(tables.t[tree.root])) + 1)
                )
                got = res.benefit
                p, q = omega.numerator, omega.denominator
                assert q * got.f - p * got.b == full_key


class TestOracleEquivalence:
    def test_randomized(self, rng):
        for trial in range(60):
            tree = random_tree(rng, rng.randint(2, 10))
            dims = random_dims(rng, tree, 30, 30)
            k = rng.randint(1, min(6, tree.leaf_count))
            omega = rng.choice(OMEGAS)
            attr = Attribute.from_dims(dims, omega)
            for cons, solve in ((B, solve_b), (C, solve_c), (D, solve_d)):
                res = solve(tree, attr, k)
                expected = oracle_best_benefit(tree, attr, cons, k)
                assert res.benefit.value(omega) == expected, (trial, cons, k)

    def test_negated_attributes(self, rng):
        # the complement run feeds negated attributes through the same DP
        for _ in range(20):
            tree = random_tree(rng, 8)
            dims = random_dims(rng, tree, 20, 20)
            k = rng.randint(1, 6)
            attr = Attribute.from_dims(dims, rng.choice(OMEGAS)).negated()
            for cons, solve in ((B, solve_b), (C, solve_c), (D, solve_d)):
                res = solve(tree, attr, k)
                expected = oracle_best_benefit(tree, attr, cons, k)
                assert res.benefit.value(attr.omega) == expected

    def test_benefit_recomputation(self, rng):
        from hierj import benefit_pair

        for _ in range(25):
            tree = random_tree(rng, 10)
            dims = random_dims(rng, tree)
            attr = Attribute.from_dims(dims, rng.choice(OMEGAS))
            k = rng.randint(1, 6)
            b_res = solve_b(tree, attr, k)
            assert b_res.benefit == benefit_pair(b_res.nodes, attr, B)
            c_res = solve_c(tree, attr, k)
            assert c_res.benefit == benefit_pair(c_res.nodes, attr, C)
            d_res = solve_d(tree, attr, k)
            assert d_res.benefit == benefit_pair(d_res.nodes, attr, D, d_res.parities)

    def test_d_single_node_budget(self, rng):
        # with one node no nesting is possible: best single, floor at empty
        for _ in range(20):
            tree = random_tree(rng, 8)
            dims = random_dims(rng, tree)
            attr = Attribute.from_dims(dims, rng.choice(OMEGAS))
            d_val = solve_d(tree, attr, 1).benefit.value(attr.omega)
            c_val = solve_c(tree, attr, 1).benefit.value(attr.omega)
            assert d_val == max(c_val, 0)


class TestUnlimited:
    def test_agrees_with_full_budget_cut_solver(self, rng):
        for _ in range(20):
            tree = random_tree(rng, rng.randint(2, 12))
            dims = random_dims(rng, tree)
            attr = Attribute.from_dims(dims, rng.choice(OMEGAS))
            unl = solve_unlimited(tree, attr)
            bounded = solve_b(tree, attr, tree.leaf_count)
            assert unl.benefit.value(attr.omega) == bounded.benefit.value(attr.omega)

    def test_minimality(self, rng):
        # no stopping node can be replaced by a coarser ancestor
        for _ in range(15):
            tree = random_tree(rng, 10)
            dims = random_dims(rng, tree)
            attr = Attribute.from_dims(dims, rng.choice(OMEGAS))
            res = solve_unlimited(tree, attr)
            for n in res.nodes:
                p = int(tree.parent[n])
                if p != -1:
                    assert not res.nodes.issuperset(
                        {int(c) for c in tree.children[p]}
                    ) or benefit(
                        {p}, attr, B
                    ) < benefit(
                        set(int(c) for c in tree.children[p]) & res.nodes, attr, B
                    ) + benefit(
                        set(int(c) for c in tree.children[p]) - res.nodes, attr, B
                    )


class TestEngines:
    @pytest.mark.skipif(not HAVE_NUMBA, reason="numba unavailable")
    def test_jit_equals_pure(self, rng):
        for _ in range(30):
            tree = random_tree(rng, rng.randint(2, 16))
            dims = random_dims(rng, tree)
            k = rng.randint(1, min(6, tree.leaf_count))
            attr = Attribute.from_dims(dims, rng.choice(OMEGAS))
            for cons, solve in ((B, solve_b), (C, solve_c), (D, solve_d)):
                jit = solve(tree, attr, k, engine="jit")
                pure = solve(tree, attr, k, engine="pure")
                assert jit.nodes == pure.nodes
                assert jit.benefit == pure.benefit
                assert jit.parities == pure.parities
                tj = build_tables(tree, attr, k, cons, engine="jit")
                tp = build_tables(tree, attr, k, cons, engine="pure")
                assert list(tj.plus_key) == list(tp.plus_key)
                assert list(tj.right_plus) == list(tp.right_plus)

    def test_huge_values_fall_back_to_exact(self, chain):
        # values fit the dim arrays but blow the jit key bound, so the
        # solver must silently take the unbounded-integer path
        tree, dims = chain
        unit = 4 * 10**17
        giant = dims_from_leaf_values(
            tree, [3 * unit, 3 * unit, 4 * unit, 0, 0], [0, 0, 0, 4 * unit, 6 * unit]
        )
        attr = Attribute.from_dims(giant, Fraction(1, 2))
        from hierj.solvers import _attr_ints, _fits_int64

        af, ab, p, q = _attr_ints(attr)
        assert not _fits_int64(af, ab, p, q, 2)
        res = solve_c(tree, attr, 2)
        assert res.benefit.value(attr.omega) == Fraction(8 * unit)

    def test_depth_pruning_matches_unpruned(self, rng):
        for _ in range(25):
            tree = random_tree(rng, rng.randint(2, 12))
            dims = random_dims(rng, tree)
            k = rng.randint(1, min(6, tree.leaf_count))
            attr = Attribute.from_dims(dims, rng.choice(OMEGAS))
            plain = solve_b(tree, attr, k)
            pruned = solve_b(tree, attr, k, depth_pruning=True)
            assert plain.benefit.value(attr.omega) == pruned.benefit.value(attr.omega)


class TestTableDominance:
    def test_parent_tables_dominate_children(self, rng):
        # a selection valid inside a child subtree stays valid in the parent
        for _ in range(10):
            tree = random_tree(rng, 10)
            dims = random_dims(rng, tree)
            attr = Attribute.from_dims(dims, rng.choice(OMEGAS))
            k = 4
            for cons in (C, D):
                tables = build_tables(tree, attr, k, cons)
                for n in range(tree.leaf_count, tree.node_count):
                    if cons is D and n == tree.root:
                        continue  # the root skips its container pass
                    for child in (int(tree.children[n, 0]), int(tree.children[n, 1])):
                        hi = min(int(tables.t[n]), int(tables.t[child]))
                        for i in range(1, hi + 1):
                            assert (
                                tables.plus_key[int(tables.offsets[n]) + i]
                                >= tables.plus_key[int(tables.offsets[child]) + i]
                            )

    def test_cut_benefit_monotone_in_size(self, rng):
        for _ in range(10):
            tree = random_tree(rng, 10)
            dims = random_dims(rng, tree)
            attr = Attribute.from_dims(dims, rng.choice(OMEGAS))
            tables = build_tables(tree, attr, 6, B)
            o = int(tables.offsets[tree.root])
            t = int(tables.t[tree.root])
            keys = [tables.plus_key[o + i] for i in range(1, t + 1)]
            assert all(a <= b for a, b in zip(keys, keys[1:]))
