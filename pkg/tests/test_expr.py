import math

import numpy as np
import pytest

from m3lab.engine.errors import ConfigError
from m3lab.gp.expr import (
    CLAMP,
    Const,
    ExprHeuristic,
    Op,
    Var,
    canonical_key,
    compile_expr,
    count_nodes,
    depth,
    equivalent,
    evaluate_expr,
    parse_expr,
    probe_values,
    random_expr,
    replace_at,
    serialize,
    simplify,
    subtree_at,
)
from m3lab.search import HeuristicContext

CTX = HeuristicContext(5.0, 10.0, 100.0, 7.0)

W = Var("child_wins")
V = Var("child_visits")
P = Var("parent_visits")
M = Var("child_available_moves")


def collect_ops(expr, acc):
    if isinstance(expr, Op):
        acc.add(expr.name)
        for a in expr.args:
            collect_ops(a, acc)
    return acc


def collect_consts(expr, acc):
    if isinstance(expr, Const):
        acc.append(expr.value)
    elif isinstance(expr, Op):
        for a in expr.args:
            collect_consts(a, acc)
    return acc


class TestEvaluate:
    def test_win_rate(self):
        assert evaluate_expr(Op("div", (W, V)), CTX) == 0.5

    def test_protected_division_by_zero(self):
        assert evaluate_expr(Op("div", (W, Const(0.0))), CTX) == 1.0
        assert evaluate_expr(Op("div", (W, Const(1e-10))), CTX) == 1.0

    def test_protected_sqrt_of_negative(self):
        expr = Op("sqrt", (Op("sub", (Const(0.0), Const(4.0))),))
        assert evaluate_expr(expr, CTX) == 2.0

    def test_variables_read_from_context(self):
        assert evaluate_expr(W, CTX) == 5.0
        assert evaluate_expr(V, CTX) == 10.0
        assert evaluate_expr(P, CTX) == 100.0
        assert evaluate_expr(M, CTX) == 7.0

    def test_overflow_clamps(self):
        big = Const(1e18)
        assert evaluate_expr(Op("mul", (big, big)), CTX) == CLAMP
        assert evaluate_expr(Op("sub", (Const(0.0), Op("mul", (big, big)))), CTX) == -CLAMP

    def test_compiled_matches_tree_walk(self):
        rng = np.random.default_rng(10)
        for _ in range(500):
            expr = random_expr(rng, 2, 6, enable_subtraction=True)
            fn = compile_expr(expr)
            for _ in range(5):
                ctx = HeuristicContext(
                    float(rng.integers(0, 100)),
                    float(rng.integers(0, 100)),
                    float(rng.integers(0, 500)),
                    float(rng.integers(0, 40)),
                )
                assert fn(*ctx) == evaluate_expr(expr, ctx)

    def test_protected_fuzz_never_faults(self):
        rng = np.random.default_rng(3)
        for _ in range(2000):
            expr = random_expr(rng, 2, 6, enable_subtraction=True)
            fn = compile_expr(expr)
            for _ in range(10):
                visits = float(rng.integers(0, 500))
                ctx = HeuristicContext(
                    float(rng.integers(0, int(visits) + 1)),
                    visits,
                    float(rng.integers(int(visits), 501)),
                    float(rng.integers(0, 41)),
                )
                value = fn(*ctx)
                assert math.isfinite(value)


class TestRandomExpr:
    def test_depth_bounds_hold(self):
        rng = np.random.default_rng(0)
        for _ in range(10_000):
            expr = random_expr(rng)
            assert 2 <= depth(expr) <= 6

    def test_no_subtraction_unless_enabled(self):
        rng = np.random.default_rng(1)
        for _ in range(2000):
            ops = collect_ops(random_expr(rng), set())
            assert "sub" not in ops
            assert ops <= {"add", "mul", "div", "sqrt"}

    def test_constants_in_range(self):
        rng = np.random.default_rng(2)
        consts = []
        for _ in range(2000):
            collect_consts(random_expr(rng), consts)
        assert consts, "no constants generated at all"
        assert all(0.0 <= c <= 10.0 for c in consts)

    def test_subtraction_appears_when_enabled(self):
        rng = np.random.default_rng(3)
        ops = set()
        for _ in range(500):
            collect_ops(random_expr(rng, enable_subtraction=True), ops)
        assert "sub" in ops


class TestTreeSurgery:
    def test_indexing_roundtrip(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            expr = random_expr(rng)
            n = count_nodes(expr)
            for idx in range(n):
                node = subtree_at(expr, idx)
                rebuilt = replace_at(expr, idx, node)
                assert rebuilt == expr

    def test_replace_changes_exactly_one_site(self):
        # preorder: 0=add, 1=W, 2=mul, 3=V, 4=P
        expr = Op("add", (W, Op("mul", (V, P))))
        assert replace_at(expr, 3, M) == Op("add", (W, Op("mul", (M, P))))
        assert replace_at(expr, 2, M) == Op("add", (W, M))
        assert subtree_at(expr, 4) == P


class TestSimplify:
    def test_constant_folding(self):
        expr = Op("mul", (Op("add", (Const(3.0), Const(4.0))), P))
        assert simplify(expr) == Op("mul", (Const(7.0), P))

    def test_additive_identity(self):
        assert simplify(Op("add", (W, Const(0.0)))) == W

    def test_multiplicative_identity_and_zero(self):
        assert simplify(Op("mul", (W, Const(1.0)))) == W
        assert simplify(Op("mul", (W, Const(0.0)))) == Const(0.0)

    def test_division_by_one(self):
        assert simplify(Op("div", (M, Const(1.0)))) == M

    def test_commutative_sort_gives_identical_forms(self):
        ab = Op("add", (W, V))
        ba = Op("add", (V, W))
        assert simplify(ab) == simplify(ba)
        assert canonical_key(ab) == canonical_key(ba)

    def test_idempotent(self):
        rng = np.random.default_rng(5)
        for _ in range(1000):
            expr = random_expr(rng, enable_subtraction=True)
            once = simplify(expr)
            assert simplify(once) == once

    def test_preserves_evaluation_at_probes(self):
        rng = np.random.default_rng(6)
        for _ in range(1000):
            expr = random_expr(rng, enable_subtraction=True)
            va = probe_values(expr)
            vb = probe_values(simplify(expr))
            for x, y in zip(va, vb):
                assert abs(x - y) <= 1e-9 * max(1.0, abs(x))


class TestEquivalence:
    def test_sub_vs_negated_add(self):
        a = Op("sub", (W, Const(4.0)))
        b = Op("add", (Const(-4.0), W))
        assert equivalent(a, b)

    def test_different_variables_differ(self):
        assert not equivalent(W, V)

    def test_equivalent_to_own_simplified_form(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            expr = random_expr(rng, enable_subtraction=True)
            assert equivalent(expr, simplify(expr))

    def test_symmetry_on_random_pairs(self):
        rng = np.random.default_rng(8)
        exprs = [random_expr(rng) for _ in range(60)]
        for i in range(len(exprs)):
            for j in range(i + 1, len(exprs)):
                assert equivalent(exprs[i], exprs[j]) == equivalent(exprs[j], exprs[i])


class TestSerialization:
    def test_example_form(self):
        expr = Op("div", (W, Op("sqrt", (Op("add", (V, Const(1.5))),))))
        text = serialize(expr)
        assert text == "div(child_wins, sqrt(add(child_visits, 1.5)))"
        assert parse_expr(text) == expr

    def test_round_trip_is_exact(self):
        rng = np.random.default_rng(9)
        for _ in range(2000):
            expr = random_expr(rng, enable_subtraction=True)
            assert parse_expr(serialize(expr)) == expr

    def test_negative_and_scientific_constants(self):
        for value in (-4.0, 1e-09, 3.0000000000000004, 12345.678901234567):
            expr = Op("add", (W, Const(value)))
            assert parse_expr(serialize(expr)) == expr

    def test_rejects_garbage(self):
        for text in ("", "frob(child_wins)", "add(child_wins)", "add(child_wins, )", "child_wins)"):
            with pytest.raises(ConfigError):
                parse_expr(text)


class TestExprHeuristic:
    def test_matches_evaluate(self):
        expr = Op("add", (Op("div", (W, V)), Op("sqrt", (P,))))
        h = ExprHeuristic(expr)
        assert h.evaluate(CTX) == evaluate_expr(expr, CTX)
