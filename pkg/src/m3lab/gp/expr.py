"""Arithmetic expression trees evolved as node-selection heuristics.

Trees are built from four binary operators (add, mul, div, sub — sub is
implemented but disabled by default), unary sqrt, constants drawn from
[0, 10], and the four node-statistic variables a selection heuristic may
read. All arithmetic is protected: division by (near-)zero yields 1,
sqrt takes |x|, and every operator clamps into [-1e18, 1e18], so
evaluation is total and never produces a non-finite value.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from ..engine.errors import ConfigError
from ..search import HeuristicContext

VAR_NAMES = (
    "child_wins",
    "child_visits",
    "parent_visits",
    "child_available_moves",
)

BINARY_OPS = ("add", "mul", "div", "sub")
UNARY_OPS = ("sqrt",)
ARITY = {"add": 2, "mul": 2, "div": 2, "sub": 2, "sqrt": 1}

#: Function set actually used unless subtraction is explicitly enabled.
DEFAULT_OPS = ("add", "mul", "div", "sqrt")

CLAMP = 1e18
DIV_EPS = 1e-9

CONST_LO = 0.0
CONST_HI = 10.0


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Op:
    name: str
    args: tuple


Expr = Const | Var | Op


def _clamp(x: float) -> float:
    if x > CLAMP:
        return CLAMP
    if x < -CLAMP:
        return -CLAMP
    return x


def p_add(a: float, b: float) -> float:
    return _clamp(a + b)


def p_sub(a: float, b: float) -> float:
    return _clamp(a - b)


def p_mul(a: float, b: float) -> float:
    return _clamp(a * b)


def p_div(a: float, b: float) -> float:
    if -DIV_EPS < b < DIV_EPS:
        return 1.0
    return _clamp(a / b)


def p_sqrt(a: float) -> float:
    return _clamp(math.sqrt(abs(a)))


_FUNCS = {"add": p_add, "sub": p_sub, "mul": p_mul, "div": p_div, "sqrt": p_sqrt}


def evaluate_expr(expr: Expr, ctx: HeuristicContext) -> float:
    """Reference tree-walking evaluation (compile_expr is the fast path)."""
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        return float(getattr(ctx, expr.name))
    fn = _FUNCS[expr.name]
    return fn(*(evaluate_expr(a, ctx) for a in expr.args))


_ARG_OF = {
    "child_wins": "w",
    "child_visits": "v",
    "parent_visits": "p",
    "child_available_moves": "m",
}


def compile_expr(expr: Expr):
    """Compile a tree into ``fn(w, v, p, m) -> float`` via generated SSA code.

    Much faster than tree-walking in the MCTS selection loop; agreement
    with evaluate_expr is property-tested.
    """
    lines = []
    counter = [0]

    def emit(node) -> str:
        if isinstance(node, Const):
            return repr(node.value)
        if isinstance(node, Var):
            return _ARG_OF[node.name]
        args = [emit(a) for a in node.args]
        name = f"t{counter[0]}"
        counter[0] += 1
        lines.append(f"    {name} = _{node.name}({', '.join(args)})")
        return name

    result = emit(expr)
    src = "def _compiled(w, v, p, m):\n" + "\n".join(lines) + f"\n    return {result}\n"
    namespace = {
        "_add": p_add,
        "_sub": p_sub,
        "_mul": p_mul,
        "_div": p_div,
        "_sqrt": p_sqrt,
    }
    exec(src, namespace)  # noqa: S102 - generated from a closed grammar
    fn = namespace["_compiled"]
    fn.expr_source = src
    return fn


class ExprHeuristic:
    """Adapts a compiled expression to the selection-heuristic interface."""

    def __init__(self, expr: Expr):
        self.expr = expr
        self._fn = compile_expr(expr)

    def evaluate(self, ctx: HeuristicContext) -> float:
        return self._fn(
            ctx.child_wins,
            ctx.child_visits,
            ctx.parent_visits,
            ctx.child_available_moves,
        )


# ---------------------------------------------------------------------------
# tree structure helpers


def children(expr: Expr) -> tuple:
    return expr.args if isinstance(expr, Op) else ()


def count_nodes(expr: Expr) -> int:
    return 1 + sum(count_nodes(c) for c in children(expr))


def depth(expr: Expr) -> int:
    kids = children(expr)
    return 1 if not kids else 1 + max(depth(c) for c in kids)


def subtree_at(expr: Expr, index: int) -> Expr:
    """Node at the given preorder index (0 is the root)."""
    if index == 0:
        return expr
    index -= 1
    for child in children(expr):
        n = count_nodes(child)
        if index < n:
            return subtree_at(child, index)
        index -= n
    raise IndexError("node index out of range")


def replace_at(expr: Expr, index: int, new: Expr) -> Expr:
    """Functionally replace the subtree at a preorder index."""
    if index == 0:
        return new
    index -= 1
    new_args = []
    for child in children(expr):
        n = count_nodes(child)
        if 0 <= index < n:
            new_args.append(replace_at(child, index, new))
        else:
            new_args.append(child)
        index -= n
    return Op(expr.name, tuple(new_args))


def const_indices(expr: Expr) -> list[int]:
    out = []

    def walk(node, base):
        if isinstance(node, Const):
            out.append(base)
            return base + 1
        pos = base + 1
        for child in children(node):
            pos = walk(child, pos)
        return pos

    walk(expr, 0)
    return out


# ---------------------------------------------------------------------------
# random generation


def enabled_ops(enable_subtraction: bool = False) -> tuple[str, ...]:
    return BINARY_OPS + UNARY_OPS if enable_subtraction else DEFAULT_OPS


def random_expr(
    rng: np.random.Generator,
    depth_min: int = 2,
    depth_max: int = 6,
    enable_subtraction: bool = False,
) -> Expr:
    """Grow-style random tree with depth in [depth_min, depth_max].

    Internal nodes draw uniformly from the enabled function set; leaves
    uniformly from {constant} + the four variables, constants ~ U[0, 10].
    """
    ops = enabled_ops(enable_subtraction)
    n_terminals = 1 + len(VAR_NAMES)
    p_leaf = n_terminals / (n_terminals + len(ops))

    def leaf() -> Expr:
        k = int(rng.integers(n_terminals))
        if k == 0:
            return Const(float(rng.uniform(CONST_LO, CONST_HI)))
        return Var(VAR_NAMES[k - 1])

    def grow(level: int) -> Expr:
        if level >= depth_max or (level >= depth_min and rng.random() < p_leaf):
            return leaf()
        name = ops[int(rng.integers(len(ops)))]
        return Op(name, tuple(grow(level + 1) for _ in range(ARITY[name])))

    return grow(1)


# ---------------------------------------------------------------------------
# serialization: prefix notation, exact float round trip


def serialize(expr: Expr) -> str:
    if isinstance(expr, Const):
        return repr(expr.value)
    if isinstance(expr, Var):
        return expr.name
    return f"{expr.name}({', '.join(serialize(a) for a in expr.args)})"


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t\n":
            self.pos += 1

    def expect(self, ch: str):
        self.skip_ws()
        if self.pos >= len(self.text) or self.text[self.pos] != ch:
            raise ConfigError(f"expected {ch!r} at position {self.pos} in {self.text!r}")
        self.pos += 1

    def parse(self) -> Expr:
        expr = self.expr()
        self.skip_ws()
        if self.pos != len(self.text):
            raise ConfigError(f"trailing input at position {self.pos} in {self.text!r}")
        return expr

    def expr(self) -> Expr:
        self.skip_ws()
        start = self.pos
        ch = self.text[self.pos] if self.pos < len(self.text) else ""
        if ch.isalpha() or ch == "_":
            while self.pos < len(self.text) and (
                self.text[self.pos].isalnum() or self.text[self.pos] == "_"
            ):
                self.pos += 1
            name = self.text[start:self.pos]
            if name in VAR_NAMES:
                return Var(name)
            if name in ARITY:
                self.expect("(")
                args = [self.expr()]
                for _ in range(ARITY[name] - 1):
                    self.expect(",")
                    args.append(self.expr())
                self.expect(")")
                return Op(name, tuple(args))
            raise ConfigError(f"unknown identifier {name!r} in expression")
        # number (python float repr, optionally signed)
        if ch in "+-":
            self.pos += 1
        while self.pos < len(self.text) and (
            self.text[self.pos].isdigit() or self.text[self.pos] in ".eE+-"
        ):
            # stop a sign unless it follows an exponent marker
            if self.text[self.pos] in "+-" and self.text[self.pos - 1] not in "eE":
                break
            self.pos += 1
        token = self.text[start:self.pos]
        try:
            return Const(float(token))
        except ValueError:
            raise ConfigError(f"bad number {token!r} at position {start}") from None


def parse_expr(text: str) -> Expr:
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# simplification and equivalence


def _flatten(name: str, expr: Expr) -> list[Expr]:
    if isinstance(expr, Op) and expr.name == name:
        out = []
        for a in expr.args:
            out.extend(_flatten(name, a))
        return out
    return [expr]


def simplify(expr: Expr) -> Expr:
    """Canonical form: constants folded with the protected operators,
    identities removed (x+0, x*1, x*0, x/1, x-0), commutative chains
    flattened and sorted. Idempotent by construction."""
    if not isinstance(expr, Op):
        return expr
    args = tuple(simplify(a) for a in expr.args)
    name = expr.name

    if all(isinstance(a, Const) for a in args):
        return Const(_FUNCS[name](*(a.value for a in args)))

    if name == "sqrt":
        return Op("sqrt", args)

    if name == "div":
        if isinstance(args[1], Const) and args[1].value == 1.0:
            return args[0]
        return Op("div", args)

    if name == "sub":
        if isinstance(args[1], Const) and args[1].value == 0.0:
            return args[0]
        return Op("sub", args)

    # add / mul: flatten, fold constants, drop identities, sort
    identity = 0.0 if name == "add" else 1.0
    operands: list[Expr] = []
    for a in args:
        operands.extend(_flatten(name, a))
    const_acc = None
    rest = []
    for a in operands:
        if isinstance(a, Const):
            const_acc = a.value if const_acc is None else _FUNCS[name](const_acc, a.value)
        else:
            rest.append(a)
    if name == "mul" and const_acc == 0.0:
        return Const(0.0)
    terms = list(rest)
    if const_acc is not None and const_acc != identity:
        terms.append(Const(const_acc))
    if not terms:
        return Const(identity)
    terms.sort(key=serialize)
    result = terms[0]
    for t in terms[1:]:
        result = Op(name, (result, t))
    return result


@functools.lru_cache(maxsize=65536)
def canonical_key(expr: Expr) -> str:
    return serialize(simplify(expr))


def _probe_contexts(n: int = 32, seed: int = 0x4D334C41) -> tuple[HeuristicContext, ...]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        visits = int(rng.integers(0, 501))
        wins = int(rng.integers(0, visits + 1))
        parent = int(rng.integers(visits, 501))
        moves = int(rng.integers(0, 41))
        out.append(HeuristicContext(float(wins), float(visits), float(parent), float(moves)))
    return tuple(out)


PROBES = _probe_contexts()


@functools.lru_cache(maxsize=65536)
def probe_values(expr: Expr) -> tuple[float, ...]:
    fn = compile_expr(expr)
    return tuple(
        fn(c.child_wins, c.child_visits, c.parent_visits, c.child_available_moves)
        for c in PROBES
    )


def equivalent(a: Expr, b: Expr) -> bool:
    """Two expressions are equivalent when their canonical forms match or
    they agree at every probe context within 1e-9 relative tolerance."""
    if canonical_key(a) == canonical_key(b):
        return True
    va = probe_values(a)
    vb = probe_values(b)
    return all(abs(x - y) <= 1e-9 * max(1.0, abs(x)) for x, y in zip(va, vb))
