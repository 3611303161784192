"""Exact symbolic expressions over time, states, controls, costates and parameters.

Every :class:`Expr` is held in canonical form: a finite sum of rational
coefficients times monomials.  A monomial is a product of integer powers of
atoms, where an atom is a :class:`Symbol`, an ``exp`` of a canonical
expression, or the reciprocal of a canonical non-monomial expression.  All
``exp`` factors of a monomial are merged into a single ``exp`` of the summed
arguments, so the representation is unique for the polynomial/exponential
algebra and zero testing is exact.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

Number = Union[int, float, Fraction]

KINDS = ("psi", "t", "x", "u", "udot", "s")
_KIND_RANK = {k: i for i, k in enumerate(KINDS)}


class ExprError(Exception):
    """Base class for expression errors."""


class ParseError(ExprError):
    def __init__(self, message: str, text: str = "", pos: int | None = None):
        self.text = text
        self.pos = pos
        if pos is not None:
            message = f"{message} at position {pos}"
        super().__init__(message)


class UnknownSymbolError(ParseError):
    pass


class EvaluationError(ExprError):
    pass


class CyclicBindingError(ExprError):
    pass


@dataclass(frozen=True)
class Symbol:
    """A variable of the expression language.

    ``kind`` is one of ``t``, ``x``, ``u``, ``udot``, ``psi``, ``s``.  The
    abnormal multiplier is ``Symbol("psi", 0)``; time carries index 0.
    """

    kind: str
    index: int = 0

    def __post_init__(self):
        if self.kind not in _KIND_RANK:
            raise ValueError(f"unknown symbol kind {self.kind!r}")
        if self.kind == "t":
            if self.index != 0:
                raise ValueError("time symbol has no index")
        elif self.kind == "psi":
            if self.index < 0:
                raise ValueError("costate index must be >= 0")
        elif self.index < 1:
            raise ValueError(f"{self.kind} index must be >= 1")

    @property
    def name(self) -> str:
        if self.kind == "t":
            return "t"
        return f"{self.kind}{self.index}"

    @property
    def sort_key(self):
        return (0, _KIND_RANK[self.kind], self.index)

    def __str__(self):
        return self.name

    def __repr__(self):
        return f"Symbol({self.name})"


T = Symbol("t")
PSI0 = Symbol("psi", 0)


def x(i: int) -> Symbol:
    return Symbol("x", i)


def u(j: int) -> Symbol:
    return Symbol("u", j)


def udot(j: int) -> Symbol:
    return Symbol("udot", j)


def psi(i: int) -> Symbol:
    return Symbol("psi", i)


def s(k: int = 1) -> Symbol:
    return Symbol("s", k)


_NAME_RE = re.compile(r"^(t|x|u|udot|psi|s)(\d*)$")


def symbol_from_name(name: str, *, allow_internal: bool = False) -> Symbol:
    """Map a textual name (``x3``, ``psi0``, ``s``) to a :class:`Symbol`."""
    m = _NAME_RE.match(name)
    if not m:
        raise UnknownSymbolError(f"unknown symbol {name!r}")
    kind, digits = m.groups()
    if kind == "udot" and not allow_internal:
        raise UnknownSymbolError(f"formal control derivative {name!r} is not accepted in input")
    if kind == "t":
        if digits:
            raise UnknownSymbolError(f"unknown symbol {name!r}")
        return T
    if not digits:
        if kind == "s":
            return Symbol("s", 1)
        raise UnknownSymbolError(f"symbol {name!r} needs an index")
    if len(digits) > 1 and digits[0] == "0":
        raise UnknownSymbolError(f"unknown symbol {name!r}")
    idx = int(digits)
    if idx == 0 and kind != "psi":
        raise UnknownSymbolError(f"unknown symbol {name!r}")
    return Symbol(kind, idx)


# ---------------------------------------------------------------------------
# Atoms
# ---------------------------------------------------------------------------


class ExpAtom:
    __slots__ = ("arg", "_hash")

    def __init__(self, arg: "Expr"):
        self.arg = arg
        self._hash = hash(("exp", arg))

    @property
    def sort_key(self):
        return (1, self.arg.sort_key)

    def __eq__(self, other):
        return isinstance(other, ExpAtom) and self.arg == other.arg

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"exp({self.arg})"


class InvAtom:
    """Reciprocal of a canonical expression with at least two terms."""

    __slots__ = ("den", "_hash")

    def __init__(self, den: "Expr"):
        self.den = den
        self._hash = hash(("inv", den))

    @property
    def sort_key(self):
        return (2, self.den.sort_key)

    def __eq__(self, other):
        return isinstance(other, InvAtom) and self.den == other.den

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"1/({self.den})"


Atom = Union[Symbol, ExpAtom, InvAtom]
Monomial = tuple  # tuple[tuple[Atom, int], ...], sorted by atom sort key

ONE_MONO: Monomial = ()


def _mono_key(mono: Monomial):
    return tuple((a.sort_key, -p) for a, p in mono)


def _mono_degree(mono: Monomial) -> int:
    return sum(p for a, p in mono if isinstance(a, Symbol))


def _build_mono(powers: dict, exp_arg: "Expr | None") -> Monomial:
    items = [(a, p) for a, p in powers.items() if p != 0]
    if exp_arg is not None and exp_arg._d:
        items.append((ExpAtom(exp_arg), 1))
    items.sort(key=lambda ap: ap[0].sort_key)
    return tuple(items)


def _split(mono: Monomial):
    powers = {}
    exp_arg = None
    for a, p in mono:
        if isinstance(a, ExpAtom):
            exp_arg = a.arg
        else:
            powers[a] = p
    return powers, exp_arg


@lru_cache(maxsize=200_000)
def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    p1, e1 = _split(m1)
    p2, e2 = _split(m2)
    for a, p in p2.items():
        p1[a] = p1.get(a, 0) + p
    if e1 is None:
        e = e2
    elif e2 is None:
        e = e1
    else:
        e = e1 + e2
    return _build_mono(p1, e)


# ---------------------------------------------------------------------------
# Expr
# ---------------------------------------------------------------------------


def _as_fraction(value: Number) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ExprError("non-finite constant")
        return Fraction(value)
    raise TypeError(f"cannot convert {type(value).__name__} to a rational constant")


class Expr:
    """Immutable canonical expression.

    Arithmetic operators return canonical results; ``==`` is structural
    equality of canonical forms.
    """

    __slots__ = ("_d", "_hash", "_key", "_terms")

    def __init__(self, d: Mapping | None = None):
        self._d = {m: c for m, c in (d or {}).items() if c != 0}
        self._hash = None
        self._key = None
        self._terms = None

    # construction ----------------------------------------------------------
    @staticmethod
    def const(value: Number) -> "Expr":
        c = _as_fraction(value)
        return Expr({ONE_MONO: c}) if c else ZERO

    @staticmethod
    def sym(symbol: Symbol) -> "Expr":
        return Expr({((symbol, 1),): Fraction(1)})

    @staticmethod
    def lift(value) -> "Expr":
        if isinstance(value, Expr):
            return value
        if isinstance(value, Symbol):
            return Expr.sym(value)
        if isinstance(value, str):
            return parse(value)
        return Expr.const(value)

    # inspection ------------------------------------------------------------
    @property
    def terms(self) -> tuple:
        """(monomial, coefficient) pairs in canonical order."""
        if self._terms is None:
            self._terms = tuple(
                sorted(self._d.items(), key=lambda mc: (-_mono_degree(mc[0]), _mono_key(mc[0])))
            )
        return self._terms

    @property
    def sort_key(self):
        if self._key is None:
            self._key = tuple((_mono_key(m), c) for m, c in self.terms)
        return self._key

    def is_zero(self) -> bool:
        """Exact zero test; clears any common denominator first."""
        if not self._d:
            return True
        if not self.has_inverse():
            return False
        return not clear_denominators(self)._d

    def is_constant(self) -> bool:
        return all(m == ONE_MONO for m in self._d)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ExprError(f"{self} is not constant")
        return self._d.get(ONE_MONO, Fraction(0))

    def has_inverse(self) -> bool:
        return any(isinstance(a, InvAtom) for m in self._d for a, _ in m)

    def is_polynomial(self) -> bool:
        """True for a plain polynomial: no exp, no reciprocal, no negative powers."""
        for m in self._d:
            for a, p in m:
                if not isinstance(a, Symbol) or p < 0:
                    return False
        return True

    def free_symbols(self) -> frozenset:
        out = set()
        for m in self._d:
            for a, _ in m:
                if isinstance(a, Symbol):
                    out.add(a)
                elif isinstance(a, ExpAtom):
                    out |= a.arg.free_symbols()
                else:
                    out |= a.den.free_symbols()
        return frozenset(out)

    def depends_on(self, *symbols: Symbol) -> bool:
        fs = self.free_symbols()
        return any(v in fs for v in symbols)

    def coefficient_map(self) -> dict:
        return dict(self._d)

    # protocol --------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Expr):
            return self._d == other._d
        if isinstance(other, (int, Fraction)):
            return self._d == Expr.const(other)._d
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._d.items()))
        return self._hash

    def __bool__(self):
        return bool(self._d)

    def __repr__(self):
        return f"Expr({to_string(self)!r})"

    def __str__(self):
        return to_string(self)

    # arithmetic ------------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if not other._d:
            return self
        if not self._d:
            return other
        d = dict(self._d)
        for m, c in other._d.items():
            d[m] = d.get(m, 0) + c
        return Expr(d)

    __radd__ = __add__

    def __neg__(self):
        return Expr({m: -c for m, c in self._d.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if not self._d or not other._d:
            return ZERO
        d = {}
        for m1, c1 in self._d.items():
            for m2, c2 in other._d.items():
                m = _mono_mul(m1, m2)
                d[m] = d.get(m, 0) + c1 * c2
        return Expr(d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self * reciprocal(other)

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other * reciprocal(self)

    def __pow__(self, n):
        if isinstance(n, Expr):
            if not n.is_constant() or n.constant_value().denominator != 1:
                raise ExprError("non-integer exponent")
            n = int(n.constant_value())
        if isinstance(n, Fraction):
            if n.denominator != 1:
                raise ExprError("non-integer exponent")
            n = int(n)
        if not isinstance(n, int):
            raise ExprError("non-integer exponent")
        if n == 0:
            return ONE
        if n < 0:
            return reciprocal(self) ** (-n)
        if len(self._d) == 1:
            (m, c), = self._d.items()
            return Expr({_mono_pow(m, n): c**n})
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result


def _coerce(value) -> Expr | None:
    if isinstance(value, Expr):
        return value
    if isinstance(value, Symbol):
        return Expr.sym(value)
    if isinstance(value, (int, Fraction, float)) and not isinstance(value, bool):
        return Expr.const(value)
    return None


def _mono_pow(m: Monomial, n: int) -> Monomial:
    if n == 1:
        return m
    powers, e = _split(m)
    powers = {a: p * n for a, p in powers.items()}
    return _build_mono(powers, None if e is None else e * n)


ZERO = Expr()
ONE = Expr({ONE_MONO: Fraction(1)})


def const(value: Number) -> Expr:
    return Expr.const(value)


def sym(symbol: Symbol) -> Expr:
    return Expr.sym(symbol)


def exp(arg) -> Expr:
    """``exp`` of an expression; ``exp(0)`` collapses to 1."""
    arg = Expr.lift(arg)
    if not arg._d:
        return ONE
    return Expr({((ExpAtom(arg), 1),): Fraction(1)})


def reciprocal(e: Expr) -> Expr:
    if not e._d:
        raise ZeroDivisionError("division by the zero expression")
    if len(e._d) == 1:
        (m, c), = e._d.items()
        powers, ex = _split(m)
        out = ONE
        inv_powers = {}
        for a, p in powers.items():
            if isinstance(a, InvAtom):
                out = out * a.den**p
            else:
                inv_powers[a] = -p
        mono = _build_mono(inv_powers, None if ex is None else -ex)
        return out * Expr({mono: 1 / c})
    lead = e.terms[0][1]
    den = Expr({m: c / lead for m, c in e._d.items()})
    return Expr({((InvAtom(den), 1),): 1 / lead})


def clear_denominators(e: Expr) -> Expr:
    """Multiply ``e`` by the product of its reciprocal atoms' denominators.

    The result is zero iff ``e`` is zero.
    """
    maxp: dict = {}
    for m in e._d:
        for a, p in m:
            if isinstance(a, InvAtom):
                maxp[a] = max(maxp.get(a, 0), p)
    if not maxp:
        return e
    out = ZERO
    for m, c in e._d.items():
        powers, ex = _split(m)
        factor = ONE
        for a, pmax in maxp.items():
            have = powers.pop(a, 0)
            if pmax - have:
                factor = factor * a.den ** (pmax - have)
        out = out + Expr({_build_mono(powers, ex): c}) * factor
    return out


def equivalent(a, b) -> bool:
    """Exact equality as functions (denominators cleared)."""
    return (Expr.lift(a) - Expr.lift(b)).is_zero()


def normalize(e) -> Expr:
    """Canonical form of ``e``.

    Values of :class:`Expr` are canonical at construction, so this is the
    identity on them; strings and numbers are lifted first.
    """
    e = Expr.lift(e)
    return Expr(e._d)


# ---------------------------------------------------------------------------
# Calculus and substitution
# ---------------------------------------------------------------------------


def diff(e, v: Symbol) -> Expr:
    """Exact partial derivative of ``e`` with respect to ``v``."""
    e = Expr.lift(e)
    if not isinstance(v, Symbol):
        raise TypeError("can only differentiate with respect to a Symbol")
    cache = {}

    def datom(a):
        if a in cache:
            return cache[a]
        if isinstance(a, Symbol):
            r = ONE if a == v else ZERO
        elif isinstance(a, ExpAtom):
            r = diff(a.arg, v)
        else:
            r = diff(a.den, v)
        cache[a] = r
        return r

    result = ZERO
    for m, c in e._d.items():
        for i, (a, p) in enumerate(m):
            da = datom(a)
            if not da._d:
                continue
            rest = m[:i] + m[i + 1 :]
            if isinstance(a, Symbol):
                powers, ex = _split(rest)
                powers[a] = p - 1
                term = Expr({_build_mono(powers, ex): c * p})
                result = result + term
            elif isinstance(a, ExpAtom):
                result = result + Expr({m: c}) * da
            else:
                powers, ex = _split(rest)
                powers[a] = p + 1
                term = Expr({_build_mono(powers, ex): -c * p})
                result = result + term * da
    return result


def _check_cycles(bindings: Mapping[Symbol, Expr]):
    graph = {k: {v for v in val.free_symbols() if v in bindings} for k, val in bindings.items()}
    state = {}

    def visit(node, path):
        state[node] = 1
        for nxt in graph[node]:
            if state.get(nxt) == 1:
                cyc = " -> ".join(str(p) for p in path + [nxt])
                raise CyclicBindingError(f"cyclic binding set: {cyc}")
            if state.get(nxt) is None:
                visit(nxt, path + [nxt])
        state[node] = 2

    for k in graph:
        if state.get(k) is None:
            visit(k, [k])


def substitute(e, bindings: Mapping, *, repeat: bool = False) -> Expr:
    """Substitute symbols, then normalize.

    By default the substitution is simultaneous and single-pass, so a symbol
    may appear in its own replacement (``t -> t*(1 + 2*s)``) and swaps are
    fine.  With ``repeat`` the bindings are applied until no bound symbol
    remains, which requires an acyclic binding set.
    """
    e = Expr.lift(e)
    b = {}
    for k, val in bindings.items():
        if isinstance(k, str):
            k = symbol_from_name(k, allow_internal=True)
        b[k] = Expr.lift(val)
    if not b:
        return e
    if not repeat:
        return _subst(e, b, {})
    _check_cycles(b)
    while e.depends_on(*b):
        e = _subst(e, b, {})
    return e


def _subst(e: Expr, b: dict, cache: dict) -> Expr:
    if not e._d:
        return e
    result = ZERO
    for m, c in e._d.items():
        term = Expr.const(c)
        plain = {}
        for a, p in m:
            if isinstance(a, Symbol):
                if a in b:
                    key = (a, p)
                    if key not in cache:
                        cache[key] = b[a] ** p
                    term = term * cache[key]
                else:
                    plain[a] = p
            elif isinstance(a, ExpAtom):
                term = term * exp(_subst(a.arg, b, cache))
            else:
                term = term * reciprocal(_subst(a.den, b, cache)) ** p
        if plain:
            term = term * Expr({_build_mono(plain, None): Fraction(1)})
        result = result + term
    return result


def coefficients_in(e: Expr, symbols: Iterable[Symbol]) -> dict:
    """Split a polynomial in ``symbols`` into {exponent tuple: coefficient Expr}.

    ``symbols`` must appear only with non-negative integer powers outside of
    exp/reciprocal atoms.
    """
    symbols = tuple(symbols)
    idx = {v: i for i, v in enumerate(symbols)}
    out: dict = {}
    for m, c in e._d.items():
        key = [0] * len(symbols)
        rest = {}
        ex = None
        for a, p in m:
            if isinstance(a, Symbol) and a in idx:
                if p < 0:
                    raise ExprError(f"negative power of {a} is not polynomial")
                key[idx[a]] = p
            elif isinstance(a, ExpAtom):
                if a.arg.depends_on(*symbols):
                    raise ExprError("exp depends on a coefficient-matching symbol")
                ex = a.arg
            else:
                if isinstance(a, InvAtom) and a.den.depends_on(*symbols):
                    raise ExprError("reciprocal depends on a coefficient-matching symbol")
                rest[a] = p
        k = tuple(key)
        out.setdefault(k, {})
        mono = _build_mono(rest, ex)
        out[k][mono] = out[k].get(mono, 0) + c
    return {k: Expr(v) for k, v in out.items() if Expr(v)._d}


# ---------------------------------------------------------------------------
# Numeric evaluation
# ---------------------------------------------------------------------------


def _env_lookup(env: Mapping) -> dict:
    out = {}
    for k, v in env.items():
        if isinstance(k, str):
            k = symbol_from_name(k, allow_internal=True)
        out[k] = v
    return out


def evaluate(e, env: Mapping) -> float:
    """Floating-point value of ``e``; rational constants converted last."""
    e = Expr.lift(e)
    env = _env_lookup(env)
    return _eval(e, env)


def _eval(e: Expr, env: dict) -> float:
    total = 0.0
    for m, c in e._d.items():
        val = 1.0
        for a, p in m:
            if isinstance(a, Symbol):
                try:
                    base = float(env[a])
                except KeyError:
                    raise EvaluationError(f"missing value for symbol {a}") from None
                if base == 0.0 and p < 0:
                    raise EvaluationError(f"division by zero: {a} = 0 raised to {p}")
                val *= base**p
            elif isinstance(a, ExpAtom):
                val *= math.exp(_eval(a.arg, env))
            else:
                den = _eval(a.den, env)
                if den == 0.0:
                    raise EvaluationError(f"division by zero: {a.den} = 0")
                val /= den**p
        total += float(c) * val
    return total


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------


def _fmt_frac(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _fmt_factor(a, p: int) -> str:
    if isinstance(a, Symbol):
        base = a.name
    elif isinstance(a, ExpAtom):
        return f"exp({to_string(a.arg)})" if p == 1 else f"exp({to_string(a.arg)})^{p}"
    else:
        base = f"({to_string(a.den)})"
        p = -p
    return base if p == 1 else f"{base}^{p}"


def to_string(e: Expr) -> str:
    """Canonical infix text; ``parse(to_string(e)) == e``."""
    if not e._d:
        return "0"
    parts = []
    for i, (m, c) in enumerate(e.terms):
        neg = c < 0
        mag = -c if neg else c
        factors = [_fmt_factor(a, p) for a, p in m]
        if not factors:
            body = _fmt_frac(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = _fmt_frac(mag) + "*" + "*".join(factors)
        if i == 0:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


def to_python(e: Expr, names: Mapping[Symbol, str] | None = None) -> str:
    """Python source for ``e`` (uses ``_exp`` for the exponential)."""
    names = names or {}
    if not e._d:
        return "0.0"
    parts = []
    for m, c in e.terms:
        factors = [repr(float(c))]
        for a, p in m:
            if isinstance(a, Symbol):
                nm = names.get(a, a.name)
                factors.append(nm if p == 1 else f"{nm}**({p})")
            elif isinstance(a, ExpAtom):
                factors.append(f"_exp({to_python(a.arg, names)})")
            else:
                factors.append(f"({to_python(a.den, names)})**({-p})")
        parts.append("*".join(factors))
    return "(" + " + ".join(parts) + ")"


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    pos = 0
    tokens = []
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        start = m.start(m.lastgroup)
        tokens.append((m.lastgroup, m.group(m.lastgroup), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, allow_internal: bool):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.allow_internal = allow_internal

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value:
            what = "end of input" if kind == "end" else repr(val)
            raise ParseError(f"expected {value!r}, found {what}", self.text, pos)

    def parse(self) -> Expr:
        if self.peek()[0] == "end":
            raise ParseError("empty expression", self.text, 0)
        e = self.sum()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", self.text, pos)
        return e

    def sum(self) -> Expr:
        e = self.product()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.product()
            e = e + rhs if op == "+" else e - rhs
        return e

    def product(self) -> Expr:
        e = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            op, pos = self.take()[1:]
            rhs = self.unary()
            if op == "*":
                e = e * rhs
            else:
                if not rhs:
                    raise ParseError("division by zero", self.text, pos)
                e = e / rhs
        return e

    def unary(self) -> Expr:
        if self.peek()[0] == "op" and self.peek()[1] in ("-", "+"):
            op = self.take()[1]
            e = self.unary()
            return -e if op == "-" else e
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            pos = self.take()[2]
            expo = self.unary()
            if not expo.is_constant() or expo.constant_value().denominator != 1:
                raise ParseError("non-integer exponent", self.text, pos)
            n = int(expo.constant_value())
            if n < 0 and not base:
                raise ParseError("division by zero", self.text, pos)
            return base**n
        return base

    def atom(self) -> Expr:
        kind, val, pos = self.take()
        if kind == "num":
            return Expr.const(Fraction(val))
        if kind == "name":
            if val == "exp":
                self.expect("(")
                arg = self.sum()
                self.expect(")")
                return exp(arg)
            try:
                return Expr.sym(symbol_from_name(val, allow_internal=self.allow_internal))
            except UnknownSymbolError as err:
                raise UnknownSymbolError(str(err), self.text, pos) from None
        if kind == "op" and val == "(":
            e = self.sum()
            self.expect(")")
            return e
        what = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"unexpected {what}", self.text, pos)


def parse(text: str, *, allow_internal: bool = False) -> Expr:
    """Parse infix text into a canonical :class:`Expr`.

    Precedence: ``^`` > unary minus > ``*``, ``/`` > ``+``, ``-``.  Exponents
    must be integer constants.
    """
    if not isinstance(text, str):
        raise TypeError("parse expects a string")
    return _Parser(text, allow_internal).parse()
