"""Polynomial-ansatz search for symmetry generators.

The determining equations are linear in the generator, so each ansatz
coefficient contributes one column of residual coefficients; generators are
the exact rational nullspace of the assembled system.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement

from . import expr as ex
from .expr import Expr
from .family import Generator
from .invariance import generator_residuals
from .linalg import in_span, nullspace, rank
from .model import Problem
from .noether import first_integral, verify_symbolic


class SearchError(ValueError):
    pass


@dataclass(frozen=True)
class Ansatz:
    """Polynomial ansatz for (tau, xi, upsilon, f).

    tau, xi and f range over monomials in (t, x) of total degree <= degree,
    upsilon over monomials in (t, x, u).  Constants are left out of f since
    they never change a residual.
    """

    degree: int = 1
    include_time_change: bool = True
    include_gauge: bool = True

    def __post_init__(self):
        if self.degree < 0:
            raise SearchError("ansatz degree must be >= 0")

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "include_time_change": self.include_time_change,
            "include_gauge": self.include_gauge,
        }


def _monomials(symbols, degree: int) -> list:
    out = []
    for d in range(degree + 1):
        for combo in combinations_with_replacement(symbols, d):
            e = ex.ONE
            for v in combo:
                e = e * ex.sym(v)
            out.append(e)
    return out


def ansatz_columns(p: Problem, a: Ansatz) -> list:
    """Unknowns as (slot, monomial) with slot in tau / xi_i / upsilon_j / f."""
    tx = (ex.T, *p.states)
    txu = (*tx, *p.controls)
    base = _monomials(tx, a.degree)
    cols = []
    if a.include_time_change:
        cols += [(("tau", 0), mono) for mono in base]
    for i in range(p.n):
        cols += [(("xi", i), mono) for mono in base]
    for j in range(p.m):
        cols += [(("upsilon", j), mono) for mono in _monomials(txu, a.degree)]
    if a.include_gauge:
        cols += [(("f", 0), mono) for mono in base if mono != ex.ONE]
    return cols


def _assemble(p: Problem, cols, weights) -> Generator:
    tau = ex.ZERO
    f = ex.ZERO
    xi = [ex.ZERO] * p.n
    ups = [ex.ZERO] * p.m
    for ((slot, i), mono), w in zip(cols, weights):
        if not w:
            continue
        term = mono * w
        if slot == "tau":
            tau = tau + term
        elif slot == "f":
            f = f + term
        elif slot == "xi":
            xi[i] = xi[i] + term
        else:
            ups[i] = ups[i] + term
    return Generator.single(tau, xi, ups, f)


def determining_system(p: Problem, a: Ansatz):
    """Columns, sparse equation rows and the row count of the linear system."""
    if not p.is_polynomial():
        raise SearchError("ansatz search needs a polynomial Lagrangian and dynamics")
    cols = ansatz_columns(p, a)
    if not cols:
        raise SearchError("ansatz produces zero unknowns")
    match_syms = (ex.T, *p.states, *p.controls, *p.udots)
    rows: dict = {}
    for c, col in enumerate(cols):
        unit = [0] * len(cols)
        unit[c] = 1
        g = _assemble(p, cols, unit)
        rl, rphi = generator_residuals(p, g.tau[0], g.xi[0], g.upsilon[0], g.f[0])
        for eq, res in enumerate((rl, *rphi)):
            for expo, coeff in ex.coefficients_in(res, match_syms).items():
                rows.setdefault((eq, expo), {})[c] = coeff.constant_value()
    keys = sorted(rows)
    dense = [[rows[k].get(c, Fraction(0)) for c in range(len(cols))] for k in keys]
    return cols, dense


def search_generators(p: Problem, a: Ansatz | None = None) -> list:
    """Basis of all ansatz generators satisfying the determining equations."""
    a = a or Ansatz()
    cols, matrix = determining_system(p, a)
    basis = nullspace(matrix, len(cols))
    return [_assemble(p, cols, v) for v in basis]


def generator_vector(p: Problem, a: Ansatz, g: Generator, k: int = 1):
    """Coordinates of parameter k of ``g`` in the ansatz, or None if outside it."""
    cols = ansatz_columns(p, a)
    i = k - 1
    f = g.f[i] - g.f[i].coefficient_map().get((), 0)  # constants in f are inert
    slots = {("tau", 0): g.tau[i], ("f", 0): f}
    slots.update({("xi", j): e for j, e in enumerate(g.xi[i])})
    slots.update({("upsilon", j): e for j, e in enumerate(g.upsilon[i])})
    vec = []
    covered = {key: ex.ZERO for key in slots}
    for slot, mono in cols:
        e = slots[slot]
        m = next(iter(mono.coefficient_map()))
        c = e.coefficient_map().get(m, Fraction(0))
        vec.append(c)
        if c:
            covered[slot] = covered[slot] + mono * c
    for key, e in slots.items():
        if e != covered[key]:
            return None
    return vec


def generator_in_span(p: Problem, a: Ansatz, basis, g: Generator, k: int = 1) -> bool:
    target = generator_vector(p, a, g, k)
    if target is None:
        return False
    rows = [generator_vector(p, a, b) for b in basis]
    return in_span(rows, target, len(target))


def search_report(p: Problem, a: Ansatz | None = None) -> dict:
    a = a or Ansatz()
    cols, matrix = determining_system(p, a)
    basis = [_assemble(p, cols, v) for v in nullspace(matrix, len(cols))]
    entries = []
    for g in basis:
        c = first_integral(p, g, check=False)
        entries.append(
            {
                "generator": g.to_dict(),
                "first_integral": str(c.value),
                "residual": str(verify_symbolic(p, c, g)),
            }
        )
    return {
        "problem": p.name,
        "ansatz": a.to_dict(),
        "unknowns": len(cols),
        "equations": len(matrix),
        "rank": rank(matrix, len(cols)) if matrix else 0,
        "dimension": len(basis),
        "generators": entries,
    }
