"""Random expression trees and a plain-float reference evaluator.

Trees are nested tuples, evaluated directly without going through the
canonical form, so they act as an independent oracle for ``Expr``.
"""

import math

from hypothesis import strategies as st

from quasinoether import expr as ex

NAMES = ("t", "x1", "x2", "u1", "psi1")

leaves = st.one_of(
    st.sampled_from(NAMES).map(lambda n: ("sym", n)),
    st.integers(-3, 3).map(lambda k: ("num", k)),
)


def _extend(children):
    return st.one_of(
        st.tuples(st.just("add"), children, children),
        st.tuples(st.just("sub"), children, children),
        st.tuples(st.just("mul"), children, children),
        st.tuples(st.just("pow"), children, st.integers(0, 3)),
        # denominator 2 + c^2 never vanishes
        st.tuples(st.just("div"), children, children),
        st.tuples(st.just("exp"), leaves),
    )


trees = st.recursive(leaves, _extend, max_leaves=8)
poly_trees = st.recursive(
    leaves,
    lambda c: st.one_of(
        st.tuples(st.just("add"), c, c),
        st.tuples(st.just("mul"), c, c),
        st.tuples(st.just("pow"), c, st.integers(0, 3)),
    ),
    max_leaves=8,
)

envs = st.fixed_dictionaries({n: st.floats(-1.5, 1.5) for n in NAMES})


def build(tree) -> ex.Expr:
    op = tree[0]
    if op == "sym":
        return ex.parse(tree[1])
    if op == "num":
        return ex.const(tree[1])
    if op == "add":
        return build(tree[1]) + build(tree[2])
    if op == "sub":
        return build(tree[1]) - build(tree[2])
    if op == "mul":
        return build(tree[1]) * build(tree[2])
    if op == "pow":
        return build(tree[1]) ** tree[2]
    if op == "div":
        return build(tree[1]) / (2 + build(tree[2]) ** 2)
    if op == "exp":
        return ex.exp(build(tree[1]))
    raise AssertionError(op)


def text(tree) -> str:
    op = tree[0]
    if op == "sym":
        return tree[1]
    if op == "num":
        return f"({tree[1]})"
    if op in ("add", "sub", "mul"):
        sym = {"add": "+", "sub": "-", "mul": "*"}[op]
        return f"({text(tree[1])} {sym} {text(tree[2])})"
    if op == "pow":
        return f"({text(tree[1])})^{tree[2]}"
    if op == "div":
        return f"({text(tree[1])}) / (2 + ({text(tree[2])})^2)"
    return f"exp({text(tree[1])})"


def raw_eval(tree, env) -> float:
    op = tree[0]
    if op == "sym":
        return env[tree[1]]
    if op == "num":
        return float(tree[1])
    if op == "add":
        return raw_eval(tree[1], env) + raw_eval(tree[2], env)
    if op == "sub":
        return raw_eval(tree[1], env) - raw_eval(tree[2], env)
    if op == "mul":
        return raw_eval(tree[1], env) * raw_eval(tree[2], env)
    if op == "pow":
        return raw_eval(tree[1], env) ** tree[2]
    if op == "div":
        return raw_eval(tree[1], env) / (2 + raw_eval(tree[2], env) ** 2)
    return math.exp(raw_eval(tree[1], env))


def magnitude(tree, env) -> float:
    """Sum of absolute values of every intermediate, a scale for rounding error."""
    op = tree[0]
    if op in ("sym", "num"):
        return abs(raw_eval(tree, env))
    subs = [t for t in tree[1:] if isinstance(t, tuple)]
    own = abs(raw_eval(tree, env))
    if op == "pow":
        return own + magnitude(tree[1], env) ** max(tree[2], 1) + 1.0
    if op == "mul":
        return own + magnitude(tree[1], env) * magnitude(tree[2], env)
    return own + sum(magnitude(t, env) for t in subs) * (math.e**2 if op == "exp" else 1.0)
