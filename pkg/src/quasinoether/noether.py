"""First integrals generated by symmetries, and their symbolic certification."""

from __future__ import annotations

from dataclasses import dataclass

from . import expr as ex
from .expr import Expr
from .family import Generator
from .invariance import check_generator
from .model import Problem, adjoint_rhs, hamiltonian, stationarity


class GeneratorRejected(ValueError):
    pass


SOURCES = ("generator", "homogeneity", "user")


@dataclass(frozen=True)
class FirstIntegral:
    value: Expr
    source: str
    problem: Problem

    def __post_init__(self):
        object.__setattr__(self, "value", Expr.lift(self.value))
        if self.source not in SOURCES:
            raise ValueError(f"unknown first-integral source {self.source!r}")
        for v in self.value.free_symbols():
            if v.kind in ("s", "udot"):
                raise ValueError(f"a first integral may not reference {v}")
            if v != ex.PSI0 and not self.problem.admits(v):
                raise ValueError(f"{v} is not a variable of problem {self.problem.name!r}")

    def __str__(self):
        return str(self.value)


def noether_value(p: Problem, tau: Expr, xi, f: Expr) -> Expr:
    """psi0*f + psi . xi - H*tau with H expanded."""
    out = ex.sym(ex.PSI0) * f
    for i, c in enumerate(xi, start=1):
        if c:
            out = out + ex.sym(ex.psi(i)) * c
    if tau:
        out = out - hamiltonian(p) * tau
    return out


def first_integral(p: Problem, g: Generator, k: int = 1, *, check: bool = True) -> FirstIntegral:
    """Conserved quantity attached to parameter k of ``g``.

    With ``check`` (the default) the generator must satisfy the determining
    equations; pass ``check=False`` for exploratory use.
    """
    if check:
        report = check_generator(p, g)
        if not report.passed:
            raise GeneratorRejected("generator fails the necessary conditions for quasi-invariance")
    i = k - 1
    if not 0 <= i < g.r:
        raise IndexError(f"parameter index {k} outside 1..{g.r}")
    return FirstIntegral(noether_value(p, g.tau[i], g.xi[i], g.f[i]), "generator", p)


def flow_derivative(p: Problem, c, *, formal_udot: bool = True) -> Expr:
    """dC/dt along the Hamiltonian system, controls left free.

    x' -> phi and psi' -> -dH/dx are substituted; u' enters through the
    formal symbols udot_j (dropped when ``formal_udot`` is false).
    """
    value = c.value if isinstance(c, FirstIntegral) else Expr.lift(c)
    out = ex.diff(value, ex.T)
    for xi, phi in zip(p.states, p.dynamics):
        d = ex.diff(value, xi)
        if d:
            out = out + d * phi
    for pi, rhs in zip(p.costates, adjoint_rhs(p)):
        d = ex.diff(value, pi)
        if d:
            out = out + d * rhs
    if formal_udot:
        for uj, vj in zip(p.controls, p.udots):
            d = ex.diff(value, uj)
            if d:
                out = out + d * ex.sym(vj)
    return out


def stationarity_term(p: Problem, g: Generator, k: int = 1) -> Expr:
    """dH/du . (upsilon_k - tau_k * u'), the quantity dC/dt must equal.

    It vanishes wherever the stationarity condition dH/du = 0 holds.
    """
    i = k - 1
    tau = g.tau[i]
    out = ex.ZERO
    for dHdu, ups, vj in zip(stationarity(p), g.upsilon[i], p.udots):
        direction = ups - tau * ex.sym(vj)
        if direction:
            out = out + dHdu * direction
    return out


def verify_symbolic(p: Problem, c, g: Generator, k: int = 1) -> Expr:
    """Residual dC/dt - dH/du . (upsilon - tau u'); zero certifies the law."""
    return flow_derivative(p, c) - stationarity_term(p, g, k)


def gauge_adjust(c: FirstIntegral, delta_f) -> FirstIntegral:
    """Add psi0 * delta_f, the change caused by a gauge term s * delta_f."""
    delta_f = Expr.lift(delta_f)
    for v in delta_f.free_symbols():
        if v.kind not in ("t", "x", "u"):
            raise ValueError(f"gauge term may only depend on (t, x, u), found {v}")
    return FirstIntegral(c.value + ex.sym(ex.PSI0) * delta_f, c.source, c.problem)


def hamiltonian_generator(p: Problem) -> Generator:
    """Time translation (tau = 1); its integral is -H."""
    return Generator.single(1, [0] * p.n, [0] * p.m, 0)
