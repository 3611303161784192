"""Optimal control problems, the Pontryagin Hamiltonian and its derived systems."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import expr as ex
from .expr import Expr, Symbol
from .linalg import rref


class ProblemError(ValueError):
    pass


class UnsolvableControl(Exception):
    """The stationarity system has no closed-form concave solution."""


@dataclass(frozen=True)
class Problem:
    """Minimize the integral of ``lagrangian`` subject to ``x' = dynamics``.

    The control set is all of R^m.
    """

    n: int
    m: int
    lagrangian: Expr
    dynamics: tuple
    name: str = "problem"
    horizon: tuple = (0.0, 1.0)

    def __post_init__(self):
        object.__setattr__(self, "lagrangian", Expr.lift(self.lagrangian))
        object.__setattr__(self, "dynamics", tuple(Expr.lift(d) for d in self.dynamics))
        object.__setattr__(self, "horizon", tuple(float(h) for h in self.horizon))
        if self.n < 1 or self.m < 1:
            raise ProblemError("need n >= 1 and m >= 1")
        if len(self.dynamics) != self.n:
            raise ProblemError(f"expected {self.n} dynamics components, got {len(self.dynamics)}")
        a, b = self.horizon
        if not a < b:
            raise ProblemError("horizon must satisfy a < b")
        for label, e in [("lagrangian", self.lagrangian)] + [
            (f"dynamics[{i + 1}]", d) for i, d in enumerate(self.dynamics)
        ]:
            for v in e.free_symbols():
                if not self.admits(v, costates=False):
                    raise ProblemError(f"{label} references {v}, outside (t, x1..x{self.n}, u1..u{self.m})")

    @classmethod
    def from_strings(cls, lagrangian: str, dynamics: Sequence[str], *, name="problem", n=None, m=None,
                     horizon=(0.0, 1.0)) -> "Problem":
        L = ex.parse(lagrangian)
        phi = tuple(ex.parse(d) for d in dynamics)
        if n is None:
            n = len(phi)
        if m is None:
            used = [v.index for e in (L, *phi) for v in e.free_symbols() if v.kind == "u"]
            m = max(used, default=1)
        return cls(n=n, m=m, lagrangian=L, dynamics=phi, name=name, horizon=horizon)

    # symbol helpers ---------------------------------------------------------
    @property
    def states(self) -> tuple:
        return tuple(ex.x(i) for i in range(1, self.n + 1))

    @property
    def controls(self) -> tuple:
        return tuple(ex.u(j) for j in range(1, self.m + 1))

    @property
    def costates(self) -> tuple:
        return tuple(ex.psi(i) for i in range(1, self.n + 1))

    @property
    def udots(self) -> tuple:
        return tuple(ex.udot(j) for j in range(1, self.m + 1))

    def admits(self, v: Symbol, *, costates: bool = True) -> bool:
        if v.kind == "t":
            return True
        if v.kind == "x":
            return v.index <= self.n
        if v.kind == "u":
            return v.index <= self.m
        if v.kind == "psi" and costates:
            return v.index <= self.n
        return False

    def is_autonomous(self) -> bool:
        return not any(e.depends_on(ex.T) for e in (self.lagrangian, *self.dynamics))

    def is_polynomial(self) -> bool:
        return all(e.is_polynomial() for e in (self.lagrangian, *self.dynamics))


@dataclass(frozen=True)
class ExtremalPoint:
    t: float
    x: tuple
    u: tuple
    psi0: float
    psi: tuple

    def __post_init__(self):
        if self.psi0 > 0:
            raise ValueError("psi0 must be nonpositive")
        if self.psi0 == 0 and not any(self.psi):
            raise ValueError("(psi0, psi) must not vanish simultaneously")

    def env(self) -> dict:
        out = {ex.T: self.t, ex.PSI0: self.psi0}
        out.update({ex.x(i + 1): v for i, v in enumerate(self.x)})
        out.update({ex.u(j + 1): v for j, v in enumerate(self.u)})
        out.update({ex.psi(i + 1): v for i, v in enumerate(self.psi)})
        return out


def hamiltonian(p: Problem) -> Expr:
    """H = psi0*L + psi . phi"""
    H = ex.sym(ex.PSI0) * p.lagrangian
    for i, phi in enumerate(p.dynamics, start=1):
        H = H + ex.sym(ex.psi(i)) * phi
    return H


def adjoint_rhs(p: Problem) -> tuple:
    H = hamiltonian(p)
    return tuple(-ex.diff(H, xi) for xi in p.states)


def state_rhs(p: Problem) -> tuple:
    H = hamiltonian(p)
    return tuple(ex.diff(H, pi) for pi in p.costates)


def stationarity(p: Problem) -> tuple:
    H = hamiltonian(p)
    return tuple(ex.diff(H, uj) for uj in p.controls)


def solve_control(p: Problem) -> tuple:
    """Closed-form maximizer u*(t, x, psi0, psi) of H for psi0 < 0.

    Requires the u-Hessian of H to be psi0 times a constant symmetric
    positive-definite matrix K; then u* = -K^{-1} g / psi0 with g the
    stationarity vector at u = 0.
    """
    grad = stationarity(p)
    K = [[None] * p.m for _ in range(p.m)]
    for j, gj in enumerate(grad):
        for k, uk in enumerate(p.controls):
            h = ex.diff(gj, uk)
            q = ex.substitute(h, {ex.PSI0: 1})
            if not q.is_constant() or not (h - ex.sym(ex.PSI0) * q).is_zero():
                raise UnsolvableControl(
                    f"d2H/du{j + 1}du{k + 1} = {h} is not a constant multiple of psi0"
                )
            K[j][k] = q.constant_value()
    if any(K[j][k] != K[k][j] for j in range(p.m) for k in range(p.m)):
        raise UnsolvableControl("u-Hessian is not symmetric")
    if not _positive_definite(K):
        raise UnsolvableControl(
            "Hamiltonian is not strictly concave in u for psi0 < 0; only symbolic verification applies"
        )
    zero_u = {uj: 0 for uj in p.controls}
    g0 = [ex.substitute(gj, zero_u) for gj in grad]
    Kinv = _inverse(K)
    inv_psi0 = ex.reciprocal(ex.sym(ex.PSI0))
    sol = []
    for j in range(p.m):
        acc = ex.ZERO
        for k in range(p.m):
            if Kinv[j][k]:
                acc = acc + Kinv[j][k] * g0[k]
        sol.append(-acc * inv_psi0)
    return tuple(sol)


def _positive_definite(K) -> bool:
    # Sylvester: leading principal minors positive.
    for size in range(1, len(K) + 1):
        sub = [row[:size] for row in K[:size]]
        if _det(sub) <= 0:
            return False
    return True


def _det(M) -> Fraction:
    M = [[Fraction(v) for v in row] for row in M]
    n = len(M)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return det


def _inverse(K):
    n = len(K)
    aug = [list(K[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    red, _ = rref(aug, 2 * n)
    return [row[n:] for row in red]
