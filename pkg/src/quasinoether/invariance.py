"""Quasi-invariance of a problem under a finite family, and the generator-level
necessary conditions (the determining equations)."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import expr as ex
from .expr import Expr
from .family import Family, Generator
from .model import Problem


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class InvarianceReport:
    passed: bool
    lagrangian_residual: tuple
    dynamics_residuals: tuple
    remainder_terms: dict = field(default_factory=dict)
    udot_dependence: bool = False
    kind: str = "generator"

    @property
    def verdict(self) -> str:
        if self.kind == "generator":
            return "necessary conditions satisfied" if self.passed else "necessary conditions violated"
        return "quasi-invariant" if self.passed else "not quasi-invariant"

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "passed": self.passed,
            "verdict": self.verdict,
            "udot_dependence": self.udot_dependence,
            "lagrangian_residual": [str(e) for e in self.lagrangian_residual],
            "dynamics_residuals": [[str(e) for e in v] for v in self.dynamics_residuals],
        }
        if self.remainder_terms:
            out["remainder_terms"] = {
                "lagrangian": str(self.remainder_terms["lagrangian"]),
                "dynamics": [str(e) for e in self.remainder_terms["dynamics"]],
            }
        return out


def total_derivative(p: Problem, g: Expr) -> Expr:
    """d/dt along x' = phi, with formal symbols udot_j standing for u_j'."""
    out = ex.diff(g, ex.T)
    for xi, phi in zip(p.states, p.dynamics):
        d = ex.diff(g, xi)
        if d:
            out = out + d * phi
    for uj, vj in zip(p.controls, p.udots):
        d = ex.diff(g, uj)
        if d:
            out = out + d * ex.sym(vj)
    return out


def _first_variation(p: Problem, target: Expr, tau: Expr, xi, upsilon, dtau: Expr) -> Expr:
    """d target/dt . tau + d target/dx . xi + d target/du . upsilon + target * D_t tau"""
    out = target * dtau
    if tau:
        out = out + ex.diff(target, ex.T) * tau
    for v, c in zip(p.states, xi):
        if c:
            out = out + ex.diff(target, v) * c
    for v, c in zip(p.controls, upsilon):
        if c:
            out = out + ex.diff(target, v) * c
    return out


def generator_residuals(p: Problem, tau, xi, upsilon, f):
    """Residuals of the determining equations for one parameter."""
    dtau = total_derivative(p, tau)
    rl = total_derivative(p, f) - _first_variation(p, p.lagrangian, tau, xi, upsilon, dtau)
    rphi = tuple(
        total_derivative(p, xi_i) - _first_variation(p, phi, tau, xi, upsilon, dtau)
        for xi_i, phi in zip(xi, p.dynamics)
    )
    return rl, rphi


def _has_udot(exprs, p: Problem) -> bool:
    return any(e.depends_on(*p.udots) for e in exprs)


def _check_dims(p: Problem, n: int, m: int, what: str):
    if n != p.n or m != p.m:
        raise DimensionMismatch(f"{what} has (n, m) = ({n}, {m}) but the problem has ({p.n}, {p.m})")


def check_generator(p: Problem, g: Generator) -> InvarianceReport:
    _check_dims(p, g.n, g.m, "generator")
    rls, rphis = [], []
    for k in range(g.r):
        rl, rphi = generator_residuals(p, g.tau[k], g.xi[k], g.upsilon[k], g.f[k])
        rls.append(rl)
        rphis.append(rphi)
    everything = [*rls, *(e for v in rphis for e in v)]
    passed = all(e.is_zero() for e in everything)
    return InvarianceReport(
        passed=passed,
        lagrangian_residual=tuple(rls),
        dynamics_residuals=tuple(rphis),
        udot_dependence=_has_udot(everything, p),
        kind="generator",
    )


def invariance_defects(p: Problem, fam: Family):
    """The exact defects whose o(s) behaviour defines quasi-invariance.

    Returns ``(lagrangian_defect, dynamics_defects)`` with
    L(h^s) dT/dt - L - dF/dt and phi_i(h^s) dT/dt - dX_i/dt.
    """
    _check_dims(p, fam.n, fam.m, "family")
    bindings = {ex.T: fam.T}
    bindings.update(dict(zip(p.states, fam.X)))
    bindings.update(dict(zip(p.controls, fam.U)))
    dT = total_derivative(p, fam.T)
    lag = ex.substitute(p.lagrangian, bindings) * dT - p.lagrangian - total_derivative(p, fam.F)
    dyn = tuple(
        ex.substitute(phi, bindings) * dT - total_derivative(p, Xi) for phi, Xi in zip(p.dynamics, fam.X)
    )
    return lag, dyn


def check_family(p: Problem, fam: Family) -> InvarianceReport:
    """Orders 0 and 1 in s of every defect must vanish identically."""
    fam.validate_identity()
    lag, dyn = invariance_defects(p, fam)
    zero = {v: 0 for v in fam.params}

    def split(e: Expr):
        order0 = ex.substitute(e, zero)
        firsts = [ex.substitute(ex.diff(e, sk), zero) for sk in fam.params]
        linear = order0
        for sk, c in zip(fam.params, firsts):
            linear = linear + c * ex.sym(sk)
        return order0, firsts, e - linear

    l0, l1, lrem = split(lag)
    dsplit = [split(e) for e in dyn]
    # Residual sign follows check_generator: D_t f - [first variation].
    rls = tuple(-l1[k] for k in range(fam.r))
    rphis = tuple(tuple(-d[1][k] for d in dsplit) for k in range(fam.r))
    everything = [l0, *rls, *(d[0] for d in dsplit), *(e for v in rphis for e in v)]
    passed = all(e.is_zero() for e in everything)
    return InvarianceReport(
        passed=passed,
        lagrangian_residual=rls,
        dynamics_residuals=rphis,
        remainder_terms={"lagrangian": lrem, "dynamics": tuple(d[2] for d in dsplit)},
        udot_dependence=_has_udot(everything, p),
        kind="family",
    )
