"""Multivariate polynomials over exact coefficient domains.

Monomials are exponent tuples over a :class:`VariableTable`; the ordering of
terms is delegated to a :class:`MonomialOrder`.  Coefficients may be ints,
Fractions, :class:`~fekete.exactalg.TowerScalar` or
:class:`~fekete.exactalg.QuotientScalar` values; Groebner computations only
use the rational case.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Mapping

from .exactalg import TowerScalar, evaluate_expression, format_scalar, is_zero

__all__ = [
    "VariableTable",
    "MonomialOrder",
    "Grevlex",
    "BlockElimination",
    "grevlex",
    "MultiPoly",
    "DomainMismatch",
    "MissingAssignment",
    "reduce",
    "divide",
]


class DomainMismatch(ValueError):
    pass


class MissingAssignment(KeyError):
    pass


_PAIR_NAME = re.compile(r"^([a-z])(\d)(\d)$")


class VariableTable:
    """Ordered variable names; ``x21`` resolves to ``x12`` for pair-indexed names."""

    _cache: dict = {}

    def __new__(cls, names):
        names = tuple(names)
        hit = cls._cache.get(names)
        if hit is not None:
            return hit
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        self = super().__new__(cls)
        self.names = names
        self.index = {n: i for i, n in enumerate(names)}
        cls._cache[names] = self
        return self

    def __reduce__(self):
        return (VariableTable, (self.names,))

    @classmethod
    def fekete(cls, n: int) -> "VariableTable":
        pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
        return cls([f"x{i}{j}" for i, j in pairs] + [f"z{i}{j}" for i, j in pairs])

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __repr__(self):
        return f"VariableTable({list(self.names)})"

    def resolve(self, name: str) -> int:
        idx = self.index.get(name)
        if idx is not None:
            return idx
        m = _PAIR_NAME.match(name)
        if m and m.group(2) > m.group(3):
            idx = self.index.get(f"{m.group(1)}{m.group(3)}{m.group(2)}")
            if idx is not None:
                return idx
        raise KeyError(f"unknown variable {name!r}")

    def pair(self, kind: str, i: int, j: int) -> int:
        """Index of x_ij / z_ij (1-based, unordered)."""
        if i > j:
            i, j = j, i
        return self.index[f"{kind}{i}{j}"]


# ---------------------------------------------------------------------------
# monomial orders


class MonomialOrder:
    kind = "abstract"

    def key(self, exps: tuple) -> tuple:
        raise NotImplementedError


class Grevlex(MonomialOrder):
    """Graded reverse lexicographic order (x_1 > x_2 > ... > x_m)."""

    kind = "grevlex"

    def key(self, exps):
        return (sum(exps), tuple(-e for e in reversed(exps)))

    def __eq__(self, other):
        return isinstance(other, Grevlex)

    def __hash__(self):
        return hash("grevlex")

    def __repr__(self):
        return "grevlex"


grevlex = Grevlex()


class BlockElimination(MonomialOrder):
    """Two-block order: grevlex on the front block first, then grevlex on the rest.

    Any monomial containing a front-block variable exceeds every monomial free
    of them, so a Groebner basis under this order eliminates the front block.
    """

    kind = "block"

    def __init__(self, front: Iterable[int]):
        self.front = tuple(sorted(set(front)))

    def key(self, exps):
        fr = set(self.front)
        a = tuple(e for i, e in enumerate(exps) if i in fr)
        b = tuple(e for i, e in enumerate(exps) if i not in fr)
        return (sum(a), tuple(-e for e in reversed(a)), sum(b), tuple(-e for e in reversed(b)))

    def __eq__(self, other):
        return isinstance(other, BlockElimination) and other.front == self.front

    def __hash__(self):
        return hash(("block", self.front))

    def __repr__(self):
        return f"BlockElimination(front={list(self.front)})"


# ---------------------------------------------------------------------------
# polynomials


def _divides(a: tuple, b: tuple) -> bool:
    return all(x <= y for x, y in zip(a, b))


class MultiPoly:
    """Immutable polynomial; terms kept strictly descending under ``order``."""

    __slots__ = ("vars", "order", "_terms", "_sorted", "_hash")

    def __init__(self, vars: VariableTable, terms: Mapping[tuple, object], order: MonomialOrder = grevlex):
        self.vars = vars
        self.order = order
        self._terms = {m: c for m, c in terms.items() if not is_zero(c)}
        self._sorted = None
        self._hash = None

    # -- constructors
    @classmethod
    def from_dict(cls, vars, terms, order=grevlex) -> "MultiPoly":
        return cls(vars, terms, order)

    @classmethod
    def zero(cls, vars, order=grevlex) -> "MultiPoly":
        return cls(vars, {}, order)

    @classmethod
    def constant(cls, vars, c, order=grevlex) -> "MultiPoly":
        return cls(vars, {(0,) * len(vars): c}, order)

    @classmethod
    def monomial(cls, vars, exps, c=1, order=grevlex) -> "MultiPoly":
        return cls(vars, {tuple(exps): c}, order)

    @classmethod
    def variable(cls, vars, name, order=grevlex) -> "MultiPoly":
        e = [0] * len(vars)
        e[vars.resolve(name)] = 1
        return cls(vars, {tuple(e): 1}, order)

    @classmethod
    def parse(cls, text: str, vars: VariableTable, order=grevlex, field=None) -> "MultiPoly":
        """Parse canonical text such as ``"3*x12*z12 - z12 + 1"``."""
        names = {}
        for n in vars.names:
            names[n] = cls.variable(vars, n, order)
        for n in re.findall(r"[A-Za-z_]\w*", text):
            if n not in names and n != "sqrt":
                names[n] = cls.variable(vars, n, order)
        v = evaluate_expression(text, field, names)
        if isinstance(v, MultiPoly):
            return v
        return cls.constant(vars, v, order)

    # -- structure
    def items(self):
        return self._terms.items()

    def terms(self) -> list[tuple[tuple, object]]:
        if self._sorted is None:
            key = self.order.key
            self._sorted = sorted(self._terms.items(), key=lambda t: key(t[0]), reverse=True)
        return self._sorted

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(m) for m in self._terms)

    def constant_term(self):
        return self._terms.get((0,) * len(self.vars), 0)

    def coefficient(self, exps):
        return self._terms.get(tuple(exps), 0)

    @property
    def leading_monomial(self) -> tuple:
        return self.terms()[0][0]

    @property
    def leading_coeff(self):
        return self.terms()[0][1]

    @property
    def leading_term(self):
        return self.terms()[0]

    def total_degree(self) -> int:
        return max((sum(m) for m in self._terms), default=-1)

    def variables_used(self) -> list[str]:
        used = set()
        for m in self._terms:
            used.update(i for i, e in enumerate(m) if e)
        return [self.vars.names[i] for i in sorted(used)]

    def degree_in(self, name: str) -> int:
        i = self.vars.resolve(name)
        return max((m[i] for m in self._terms), default=-1)

    def with_order(self, order: MonomialOrder) -> "MultiPoly":
        return MultiPoly(self.vars, self._terms, order)

    def map_coeffs(self, fn) -> "MultiPoly":
        return MultiPoly(self.vars, {m: fn(c) for m, c in self._terms.items()}, self.order)

    def primitive(self) -> "MultiPoly":
        """Integer coefficients with content 1 and positive leading coefficient."""
        if self.is_zero():
            return self
        cs = [Fraction(c) for c in self._terms.values()]
        den = math.lcm(*(c.denominator for c in cs))
        ints = [int(c * den) for c in cs]
        g = math.gcd(*ints)
        sign = -1 if Fraction(self.leading_coeff) < 0 else 1
        return MultiPoly(
            self.vars,
            {m: sign * v // g for m, v in zip(self._terms, ints)},
            self.order,
        )

    def monic(self) -> "MultiPoly":
        lc = self.leading_coeff
        return self.map_coeffs(lambda c: Fraction(c) / Fraction(lc) if not isinstance(c, TowerScalar) else c / lc)

    # -- arithmetic
    def _check(self, other: "MultiPoly"):
        if other.vars is not self.vars:
            raise DomainMismatch("polynomials over different variable tables")

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        return MultiPoly.constant(self.vars, other, self.order)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out[m] + c if m in out else c
        return MultiPoly(self.vars, out, self.order)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.vars, {m: -c for m, c in self._terms.items()}, self.order)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            if is_zero(other):
                return MultiPoly.zero(self.vars, self.order)
            return MultiPoly(self.vars, {m: c * other for m, c in self._terms.items()}, self.order)
        self._check(other)
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                v = c1 * c2
                out[m] = out[m] + v if m in out else v
        return MultiPoly(self.vars, out, self.order)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        if isinstance(other, MultiPoly):
            if not other.is_constant():
                raise TypeError("polynomial division only by constants; use reduce()")
            other = other.constant_term()
        if isinstance(other, int):
            other = Fraction(other)
        return self * (1 / other)

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            return NotImplemented
        out = MultiPoly.constant(self.vars, 1, self.order)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.vars is other.vars and self._terms == other._terms
        if isinstance(other, (int, Fraction, TowerScalar)):
            return self == MultiPoly.constant(self.vars, other, self.order)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars.names, frozenset(self._terms.items())))
        return self._hash

    # -- calculus / evaluation
    def diff(self, name: str) -> "MultiPoly":
        i = self.vars.resolve(name)
        out = {}
        for m, c in self._terms.items():
            if m[i]:
                e = list(m)
                e[i] -= 1
                out[tuple(e)] = c * m[i]
        return MultiPoly(self.vars, out, self.order)

    def evaluate(self, assignment: Mapping[str, object]):
        """Exact value at ``assignment`` (name -> scalar); every used variable must be set."""
        values = []
        for idx, n in enumerate(self.vars.names):
            if n in assignment:
                values.append(assignment[n])
            else:
                values.append(None)
        for n in self.variables_used():
            if values[self.vars.index[n]] is None:
                raise MissingAssignment(n)
        powers: dict = {}

        def power(i, e):
            key = (i, e)
            if key not in powers:
                powers[key] = values[i] ** e if e > 1 else values[i]
            return powers[key]

        total = 0
        for m, c in self._terms.items():
            t = c
            for i, e in enumerate(m):
                if e:
                    t = t * power(i, e)
            total = total + t
        return total

    def evaluate_numeric(self, env: Mapping[str, object]):
        """Floating evaluation (mpmath or Python numbers) of a rational polynomial."""
        total = 0
        names = self.vars.names
        for m, c in self._terms.items():
            t = _to_number(c)
            for i, e in enumerate(m):
                if e:
                    t = t * env[names[i]] ** e
            total = total + t
        return total

    # -- text
    def __str__(self):
        if self.is_zero():
            return "0"
        out = []
        for k, (m, c) in enumerate(self.terms()):
            mono = "*".join(
                self.vars.names[i] + (f"^{e}" if e > 1 else "") for i, e in enumerate(m) if e
            )
            neg, body = _format_coeff(c)
            if mono:
                if body == "1":
                    body = mono
                else:
                    body = f"{body}*{mono}"
            if k == 0:
                out.append(("-" if neg else "") + body)
            else:
                out.append((" - " if neg else " + ") + body)
        return "".join(out)

    def __repr__(self):
        return f"MultiPoly({str(self)!r})"


def _to_number(c):
    if isinstance(c, Fraction):
        from mpmath import mpf

        return mpf(c.numerator) / c.denominator
    if isinstance(c, TowerScalar):
        return c.to_mpc()
    return c


def _format_coeff(c):
    if isinstance(c, (int, Fraction)):
        c = Fraction(c)
        return c < 0, str(abs(c))
    if isinstance(c, TowerScalar) and c.is_rational():
        return _format_coeff(c.to_fraction())
    text = format_scalar(c)
    return False, f"({text})"


# ---------------------------------------------------------------------------
# multivariate division


def divide(p: MultiPoly, basis: list[MultiPoly], order: MonomialOrder | None = None):
    """Multivariate division: returns (quotients, remainder) with p = sum q_i b_i + r.

    Ties between divisors go to the lowest basis index.  No term of ``r`` is
    divisible by a leading monomial of the basis.
    """
    order = order or p.order
    if not basis:
        raise ValueError("empty basis")
    basis = [b.with_order(order) if b.order != order else b for b in basis]
    if any(b.is_zero() for b in basis):
        raise ValueError("zero polynomial in basis")
    key = order.key
    leads = [(b.leading_monomial, b.leading_coeff, b.terms()) for b in basis]
    work = dict(p._terms)
    quotients: list[dict] = [{} for _ in basis]
    rem: dict = {}
    while work:
        m = max(work, key=key)
        c = work[m]
        for i, (lm, lc, bterms) in enumerate(leads):
            if _divides(lm, m):
                shift = tuple(a - b for a, b in zip(m, lm))
                q = c / lc if not isinstance(c, int) or not isinstance(lc, int) else Fraction(c, lc)
                quotients[i][shift] = quotients[i].get(shift, 0) + q
                for bm, bc in bterms:
                    t = tuple(a + b for a, b in zip(bm, shift))
                    v = work.get(t, 0) - q * bc
                    if is_zero(v):
                        work.pop(t, None)
                    else:
                        work[t] = v
                work.pop(m, None)
                break
        else:
            rem[m] = c
            del work[m]
    qs = [MultiPoly(p.vars, q, order) for q in quotients]
    return qs, MultiPoly(p.vars, rem, order)


def reduce(p: MultiPoly, basis: list[MultiPoly], order: MonomialOrder | None = None) -> MultiPoly:
    """Normal form of ``p`` modulo ``basis`` (full reduction)."""
    return divide(p, basis, order)[1]
