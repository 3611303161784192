"""Scaling symmetries of polynomial problems found by degree counting."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import expr as ex
from .family import Generator
from .linalg import nullspace
from .model import Problem
from .noether import FirstIntegral, noether_value


class NonPolynomialProblem(ValueError):
    pass


class WeightsError(ValueError):
    pass


@dataclass(frozen=True)
class Weights:
    """Scaling exponents: t ~ l^alpha, x_i ~ l^beta_i, u_k ~ l^gamma_k."""

    alpha: Fraction
    beta: tuple
    gamma: tuple

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        object.__setattr__(self, "beta", tuple(Fraction(b) for b in self.beta))
        object.__setattr__(self, "gamma", tuple(Fraction(g) for g in self.gamma))
        if not self.alpha and not any(self.beta) and not any(self.gamma):
            raise WeightsError("all-zero weights are trivial")

    def as_vector(self) -> list:
        return [self.alpha, *self.beta, *self.gamma]

    @classmethod
    def from_vector(cls, v, n: int) -> "Weights":
        return cls(v[0], tuple(v[1 : 1 + n]), tuple(v[1 + n :]))

    def primitive(self) -> "Weights":
        """Smallest integer multiple, first nonzero entry positive."""
        v = self.as_vector()
        lcm = 1
        for c in v:
            lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
        ints = [int(c * lcm) for c in v]
        g = 0
        for c in ints:
            g = math.gcd(g, c)
        lead = next(c for c in ints if c)
        sign = 1 if lead > 0 else -1
        return Weights.from_vector([Fraction(sign * c, g) for c in ints], len(self.beta))

    def scaled(self, c) -> "Weights":
        return Weights.from_vector([Fraction(c) * w for w in self.as_vector()], len(self.beta))

    def to_dict(self) -> dict:
        def f(c):
            return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"

        return {"alpha": f(self.alpha), "beta": [f(b) for b in self.beta], "gamma": [f(g) for g in self.gamma]}


def _monomial_exponents(e, p: Problem):
    syms = (ex.T, *p.states, *p.controls)
    return list(ex.coefficients_in(e, syms))


def degree_system(p: Problem) -> list:
    """Rows of the homogeneous linear system in (alpha, beta, gamma).

    A monomial t^a x^b u^c of L gives alpha*a + beta.b + gamma.c + alpha = 0;
    of phi_i it gives alpha*a + beta.b + gamma.c - beta_i + alpha = 0.
    """
    if not p.is_polynomial():
        raise NonPolynomialProblem("degree counting needs a polynomial Lagrangian and dynamics")
    n, m = p.n, p.m
    rows = []
    for target, e in [(None, p.lagrangian)] + list(enumerate(p.dynamics)):
        for expo in _monomial_exponents(e, p):
            row = [Fraction(0)] * (1 + n + m)
            row[0] = Fraction(expo[0] + 1)
            for i in range(n):
                row[1 + i] += expo[1 + i]
            for j in range(m):
                row[1 + n + j] += expo[1 + n + j]
            if target is not None:
                row[1 + target] -= 1
            if any(row) and row not in rows:
                rows.append(row)
    # A control absent from the problem carries no information; pin its weight.
    used = set().union(*(e.free_symbols() for e in (p.lagrangian, *p.dynamics)))
    for j, uj in enumerate(p.controls):
        if uj not in used:
            row = [Fraction(0)] * (1 + n + m)
            row[1 + n + j] = Fraction(1)
            rows.append(row)
    return rows


def detect_weights(p: Problem) -> list:
    """Basis (reduced echelon form) of all admissible scaling weights."""
    rows = degree_system(p)
    ncols = 1 + p.n + p.m
    return [Weights.from_vector(v, p.n) for v in nullspace(rows, ncols)]


def satisfies(p: Problem, w: Weights) -> bool:
    v = w.as_vector()
    return all(sum(a * b for a, b in zip(row, v)) == 0 for row in degree_system(p))


def weights_generator(w: Weights) -> Generator:
    return Generator.single(
        w.alpha * ex.sym(ex.T),
        [b * ex.sym(ex.x(i)) for i, b in enumerate(w.beta, start=1)],
        [g * ex.sym(ex.u(k)) for k, g in enumerate(w.gamma, start=1)],
        0,
    )


def scaling_integral(p: Problem, w: Weights) -> FirstIntegral:
    """sum_i beta_i psi_i x_i - alpha * H * t"""
    if len(w.beta) != p.n or len(w.gamma) != p.m:
        raise WeightsError("weight vector does not match the problem dimensions")
    if not satisfies(p, w):
        raise WeightsError("weights do not solve the degree system of this problem")
    g = weights_generator(w)
    return FirstIntegral(noether_value(p, g.tau[0], g.xi[0], g.f[0]), "homogeneity", p)
