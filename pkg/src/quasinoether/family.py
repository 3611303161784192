"""Parameter families of transformations and their infinitesimal generators."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import expr as ex
from .expr import Expr


class FamilyError(ValueError):
    pass


def _lift_all(items) -> tuple:
    return tuple(Expr.lift(e) for e in items)


@dataclass(frozen=True)
class Family:
    """h^s(t, x, u) = (T, X, U) together with the gauge term F.

    Parameters are the symbols ``s1..sr``.
    """

    r: int
    T: Expr
    X: tuple
    U: tuple
    F: Expr = ex.ZERO

    def __post_init__(self):
        object.__setattr__(self, "T", Expr.lift(self.T))
        object.__setattr__(self, "X", _lift_all(self.X))
        object.__setattr__(self, "U", _lift_all(self.U))
        object.__setattr__(self, "F", Expr.lift(self.F))
        if self.r < 1:
            raise FamilyError("a family needs at least one parameter")
        for e in self.components():
            for v in e.free_symbols():
                if v.kind in ("psi", "udot"):
                    raise FamilyError(f"family components may not reference {v}")
                if v.kind == "s" and v.index > self.r:
                    raise FamilyError(f"parameter {v} exceeds r = {self.r}")

    @property
    def n(self) -> int:
        return len(self.X)

    @property
    def m(self) -> int:
        return len(self.U)

    @property
    def params(self) -> tuple:
        return tuple(ex.s(k) for k in range(1, self.r + 1))

    def components(self) -> tuple:
        return (self.T, *self.X, *self.U, self.F)

    def at_origin(self) -> dict:
        zero = {v: 0 for v in self.params}
        return {
            "T": ex.substitute(self.T, zero),
            "X": tuple(ex.substitute(e, zero) for e in self.X),
            "U": tuple(ex.substitute(e, zero) for e in self.U),
            "F": ex.substitute(self.F, zero),
        }

    def validate_identity(self) -> None:
        """Raise :class:`FamilyError` unless h^0 is the identity map."""
        o = self.at_origin()
        if o["T"] != ex.sym(ex.T):
            raise FamilyError(f"T at s=0 is {o['T']}, expected t")
        for i, e in enumerate(o["X"], start=1):
            if e != ex.sym(ex.x(i)):
                raise FamilyError(f"X{i} at s=0 is {e}, expected x{i}")
        for j, e in enumerate(o["U"], start=1):
            if e != ex.sym(ex.u(j)):
                raise FamilyError(f"U{j} at s=0 is {e}, expected u{j}")
        if not o["F"].is_constant():
            raise FamilyError(f"F at s=0 is {o['F']}, expected a constant")


@dataclass(frozen=True)
class Generator:
    """Infinitesimal generator: one (tau, xi, upsilon, f) per parameter.

    ``tau`` and ``f`` are tuples of length r; ``xi`` and ``upsilon`` are
    tuples of r vectors.
    """

    tau: tuple
    xi: tuple
    upsilon: tuple
    f: tuple

    def __post_init__(self):
        object.__setattr__(self, "tau", _lift_all(self.tau))
        object.__setattr__(self, "f", _lift_all(self.f))
        object.__setattr__(self, "xi", tuple(_lift_all(v) for v in self.xi))
        object.__setattr__(self, "upsilon", tuple(_lift_all(v) for v in self.upsilon))
        r = len(self.tau)
        if r < 1 or not (len(self.xi) == len(self.upsilon) == len(self.f) == r):
            raise FamilyError("generator components disagree on the number of parameters")
        if len({len(v) for v in self.xi}) > 1 or len({len(v) for v in self.upsilon}) > 1:
            raise FamilyError("generator vectors have inconsistent lengths")
        for k in range(r):
            for e in (self.tau[k], self.f[k], *self.xi[k], *self.upsilon[k]):
                for v in e.free_symbols():
                    if v.kind not in ("t", "x", "u"):
                        raise FamilyError(f"generator components may only depend on (t, x, u), found {v}")

    @classmethod
    def single(cls, tau, xi: Sequence, upsilon: Sequence, f=0) -> "Generator":
        return cls((tau,), (tuple(xi),), (tuple(upsilon),), (f,))

    @classmethod
    def zero(cls, n: int, m: int) -> "Generator":
        return cls.single(0, [0] * n, [0] * m, 0)

    @property
    def r(self) -> int:
        return len(self.tau)

    @property
    def n(self) -> int:
        return len(self.xi[0])

    @property
    def m(self) -> int:
        return len(self.upsilon[0])

    def component(self, k: int = 1) -> "Generator":
        """The single-parameter generator belonging to parameter k (1-based)."""
        i = k - 1
        if not 0 <= i < self.r:
            raise IndexError(f"parameter index {k} outside 1..{self.r}")
        return Generator.single(self.tau[i], self.xi[i], self.upsilon[i], self.f[i])

    def _combine(self, other: "Generator", a, b) -> "Generator":
        if (self.r, self.n, self.m) != (other.r, other.n, other.m):
            raise FamilyError("cannot combine generators of different shapes")
        return Generator(
            tuple(a * p + b * q for p, q in zip(self.tau, other.tau)),
            tuple(tuple(a * p + b * q for p, q in zip(v, w)) for v, w in zip(self.xi, other.xi)),
            tuple(tuple(a * p + b * q for p, q in zip(v, w)) for v, w in zip(self.upsilon, other.upsilon)),
            tuple(a * p + b * q for p, q in zip(self.f, other.f)),
        )

    def __add__(self, other):
        return self._combine(other, 1, 1)

    def __sub__(self, other):
        return self._combine(other, 1, -1)

    def __mul__(self, c):
        return Generator(
            tuple(c * e for e in self.tau),
            tuple(tuple(c * e for e in v) for v in self.xi),
            tuple(tuple(c * e for e in v) for v in self.upsilon),
            tuple(c * e for e in self.f),
        )

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(
            not e for k in range(self.r) for e in (self.tau[k], self.f[k], *self.xi[k], *self.upsilon[k])
        )

    def to_dict(self) -> dict:
        def one(k):
            return {
                "tau": str(self.tau[k]),
                "xi": [str(e) for e in self.xi[k]],
                "upsilon": [str(e) for e in self.upsilon[k]],
                "f": str(self.f[k]),
            }

        if self.r == 1:
            return one(0)
        return {"components": [one(k) for k in range(self.r)]}


def generator_of(fam: Family) -> Generator:
    """Differentiate each component in s_k and set s = 0."""
    fam.validate_identity()
    zero = {v: 0 for v in fam.params}

    def d0(e, sk):
        return ex.substitute(ex.diff(e, sk), zero)

    taus, xis, ups, fs = [], [], [], []
    for sk in fam.params:
        taus.append(d0(fam.T, sk))
        xis.append(tuple(d0(e, sk) for e in fam.X))
        ups.append(tuple(d0(e, sk) for e in fam.U))
        fs.append(d0(fam.F, sk))
    return Generator(tuple(taus), tuple(xis), tuple(ups), tuple(fs))


FORMS = ("exponential", "power", "linear")


def scaling_family(weights, form: str = "exponential") -> Family:
    """One-parameter scaling family with the given (alpha, beta, gamma) weights.

    ``weights`` is any object with ``alpha``, ``beta`` and ``gamma``
    attributes (see :class:`quasinoether.homogeneity.Weights`).
    """
    if form not in FORMS:
        raise FamilyError(f"unknown family form {form!r}; choose from {FORMS}")
    s1 = ex.sym(ex.s(1))
    alpha = Fraction(weights.alpha)
    beta = [Fraction(b) for b in weights.beta]
    gamma = [Fraction(g) for g in weights.gamma]

    def factor(w: Fraction) -> Expr:
        if form == "exponential":
            return ex.exp(w * s1)
        if form == "linear":
            return 1 + w * s1
        if w.denominator != 1:
            raise FamilyError(f"power form needs integer weights, got {w}")
        return (1 + s1) ** int(w)

    return Family(
        r=1,
        T=factor(alpha) * ex.sym(ex.T),
        X=tuple(factor(b) * ex.sym(ex.x(i)) for i, b in enumerate(beta, start=1)),
        U=tuple(factor(g) * ex.sym(ex.u(j)) for j, g in enumerate(gamma, start=1)),
        F=ex.ZERO,
    )
