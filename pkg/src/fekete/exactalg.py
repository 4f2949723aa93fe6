"""Exact scalars: rationals, multi-quadratic tower fields and quotient algebras.

Rationals are plain :class:`fractions.Fraction`.  A :class:`TowerField` is
Q(sqrt(r_1), ..., sqrt(r_k)) for square-free, multiplicatively independent
integers r_j (negative values allowed, ``-1`` gives i).  Elements are stored
on the subset-product basis ``prod_{j in S} sqrt(r_j)`` indexed by bitmask S.

A :class:`QuotientAlgebra` is Q[t_1..t_s]/J for a zero-dimensional ideal J
given by a handful of relations; its elements are normal forms modulo a
grevlex Groebner basis of J.
"""

from __future__ import annotations

import ast
import contextlib
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational as _RationalABC

from mpmath import iv, mp, mpc, mpf

__all__ = [
    "Fraction",
    "TowerField",
    "TowerScalar",
    "QuotientAlgebra",
    "QuotientScalar",
    "ComplexInterval",
    "IncompatibleTowers",
    "sqrt",
    "as_tower",
    "conjugate",
    "numeric_value",
    "parse_scalar",
    "format_scalar",
    "is_zero",
    "DEFAULT_PRECISION",
]

DEFAULT_PRECISION = 128
MAX_GENERATORS = 4


class IncompatibleTowers(ValueError):
    pass


# ---------------------------------------------------------------------------
# square classes


def _squarefree_decomposition(m: int) -> tuple[int, int]:
    """Return (s, f) with m == s**2 * f and f square-free (sign kept in f)."""
    if m == 0:
        raise ValueError("zero has no square class")
    sign = -1 if m < 0 else 1
    m = abs(m)
    s, f = 1, 1
    p = 2
    while p * p <= m:
        while m % (p * p) == 0:
            m //= p * p
            s *= p
        if m % p == 0:
            m //= p
            f *= p
        p += 1
    return s, sign * f * m


def _square_class_vector(f: int) -> frozenset:
    """Primes (and -1) with odd exponent in square-free f."""
    out = set()
    if f < 0:
        out.add(-1)
        f = -f
    p = 2
    while p * p <= f:
        if f % p == 0:
            out.add(p)
            f //= p
        p += 1
    if f > 1:
        out.add(f)
    return frozenset(out)


def _gf2_solve(vectors: list[frozenset], target: frozenset):
    """Find a subset of ``vectors`` whose symmetric difference is ``target``.

    Returns a bitmask over ``vectors`` or None.
    """
    # gaussian elimination over GF(2) with vectors as sets of "prime" labels
    rows: list[tuple[frozenset, int]] = []
    for idx, v in enumerate(vectors):
        mask = 1 << idx
        for pivot_row, pivot_mask in rows:
            pivot = min(pivot_row, key=_label_key)
            if pivot in v:
                v = v ^ pivot_row
                mask ^= pivot_mask
        if v:
            rows.append((v, mask))
    t, mask = target, 0
    for pivot_row, pivot_mask in rows:
        pivot = min(pivot_row, key=_label_key)
        if pivot in t:
            t = t ^ pivot_row
            mask ^= pivot_mask
    return None if t else mask


def _label_key(p):
    return p


# ---------------------------------------------------------------------------
# tower fields


class TowerField:
    """Q(sqrt(r_1), ..., sqrt(r_k)) with independent square-free radicands."""

    _cache: dict = {}

    def __new__(cls, radicands=()):
        key = tuple(int(r) for r in radicands)
        hit = cls._cache.get(key)
        if hit is not None:
            return hit
        for r in key:
            s, f = _squarefree_decomposition(r)
            if s != 1 or f == 1:
                raise ValueError(f"radicand {r} is not square-free and != 1")
        if len(key) > MAX_GENERATORS:
            raise ValueError(f"at most {MAX_GENERATORS} generators supported, got {len(key)}")
        vecs = [_square_class_vector(r) for r in key]
        for i in range(len(vecs)):
            if _gf2_solve(vecs[:i], vecs[i]) is not None:
                raise ValueError(f"radicands {key} are dependent modulo squares")
        self = super().__new__(cls)
        self.radicands = key
        self.k = len(key)
        self.dim = 1 << len(key)
        self._vecs = vecs
        # product table: e_S * e_T = sign * e_{S^T}
        self._basis_factor = tuple(
            math.prod(key[j] for j in range(self.k) if s >> j & 1) for s in range(self.dim)
        )
        cls._cache[key] = self
        return self

    def __reduce__(self):
        return (TowerField, (self.radicands,))

    def __repr__(self):
        return f"TowerField({list(self.radicands)})"

    @classmethod
    def for_radicands(cls, radicands) -> "TowerField":
        """Smallest tower (in the given order) containing sqrt(r) for every r.

        Dependent radicands are dropped: [2, 3, 6] gives Q(sqrt 2, sqrt 3).
        """
        kept: list[int] = []
        vecs: list[frozenset] = []
        for r in radicands:
            r = Fraction(r)
            _, f = _squarefree_decomposition(r.numerator * r.denominator)
            if f == 1:
                continue
            v = _square_class_vector(f)
            if _gf2_solve(vecs, v) is None:
                kept.append(f)
                vecs.append(v)
        return cls(kept)

    def join(self, other: "TowerField") -> "TowerField":
        if self is other:
            return self
        try:
            return TowerField.for_radicands(self.radicands + other.radicands)
        except ValueError as exc:
            raise IncompatibleTowers(str(exc)) from exc

    def contains_radicand(self, m) -> bool:
        m = Fraction(m)
        _, f = _squarefree_decomposition(m.numerator * m.denominator)
        return f == 1 or _gf2_solve(self._vecs, _square_class_vector(f)) is not None

    # element constructors
    def zero(self) -> "TowerScalar":
        return TowerScalar(self, (Fraction(0),) * self.dim)

    def one(self) -> "TowerScalar":
        return self.rational(1)

    def rational(self, q) -> "TowerScalar":
        c = [Fraction(0)] * self.dim
        c[0] = Fraction(q)
        return TowerScalar(self, tuple(c))

    def gen(self, j: int) -> "TowerScalar":
        c = [Fraction(0)] * self.dim
        c[1 << j] = Fraction(1)
        return TowerScalar(self, tuple(c))

    def sqrt(self, m) -> "TowerScalar":
        """sqrt(m) for rational m, with the branch sqrt(m) = i*sqrt(|m|) for m < 0."""
        m = Fraction(m)
        if m == 0:
            return self.zero()
        num = m.numerator * m.denominator
        s, f = _squarefree_decomposition(num)
        # sqrt(m) = s/den * sqrt(f)
        scale = Fraction(s, m.denominator)
        if f == 1:
            return self.rational(scale)
        mask = _gf2_solve(self._vecs, _square_class_vector(f))
        if mask is None:
            raise IncompatibleTowers(f"sqrt({m}) not in {self!r}")
        prod = self._basis_factor[mask]
        # e_mask = sqrt-product of the chosen radicands = sign * t * sqrt(f)
        t2 = Fraction(prod, f)
        t = Fraction(math.isqrt(abs(t2.numerator)), math.isqrt(t2.denominator))
        neg = sum(1 for j in range(self.k) if mask >> j & 1 and self.radicands[j] < 0)
        sign = -1 if ((neg - (1 if f < 0 else 0)) // 2) % 2 else 1
        c = [Fraction(0)] * self.dim
        c[mask] = scale / (sign * t)
        return TowerScalar(self, tuple(c))

    def embed(self, a: "TowerScalar") -> "TowerScalar":
        if a.field is self:
            return a
        images = _embedding_images(a.field, self)
        out = [Fraction(0)] * self.dim
        for s, cf in enumerate(a.coeffs):
            if cf:
                img = images[s]
                for t, v in enumerate(img):
                    if v:
                        out[t] += cf * v
        return TowerScalar(self, tuple(out))


@lru_cache(maxsize=None)
def _embedding_images(src: TowerField, dst: TowerField):
    gens = [dst.sqrt(r) for r in src.radicands]
    images = []
    for s in range(src.dim):
        e = dst.one()
        for j in range(src.k):
            if s >> j & 1:
                e = e * gens[j]
        images.append(e.coeffs)
    return images


Q = TowerField(())


def _coerce_pair(a: "TowerScalar", b):
    if isinstance(b, TowerScalar):
        if b.field is a.field:
            return a.field, a, b
        f = a.field.join(b.field)
        return f, f.embed(a), f.embed(b)
    if isinstance(b, (int, Fraction, _RationalABC)):
        return a.field, a, a.field.rational(b)
    return None, None, None


class TowerScalar:
    """Exact element of a :class:`TowerField`; immutable."""

    __slots__ = ("field", "coeffs", "_hash")

    def __init__(self, field: TowerField, coeffs):
        self.field = field
        self.coeffs = tuple(coeffs)
        self._hash = None

    # -- construction helpers
    @staticmethod
    def from_rational(q) -> "TowerScalar":
        return Q.rational(q)

    # -- predicates
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def is_real(self) -> bool:
        f = self.field
        for s, c in enumerate(self.coeffs):
            if c and f._basis_factor[s] < 0:
                return False
        return True

    def canonical_terms(self):
        """Field-independent representation: sorted (squarefree m, coeff) with value sum c*sqrt(m)."""
        f = self.field
        acc: dict[int, Fraction] = {}
        for s, c in enumerate(self.coeffs):
            if not c:
                continue
            prod = f._basis_factor[s]
            sq, m = _squarefree_decomposition(prod)
            neg = sum(1 for j in range(f.k) if s >> j & 1 and f.radicands[j] < 0)
            sign = -1 if ((neg - (1 if m < 0 else 0)) // 2) % 2 else 1
            acc[m] = acc.get(m, Fraction(0)) + c * sq * sign
        return tuple(sorted((m, c) for m, c in acc.items() if c))

    # -- arithmetic
    def __add__(self, other):
        f, a, b = _coerce_pair(self, other)
        if f is None:
            return NotImplemented
        return TowerScalar(f, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return TowerScalar(self.field, tuple(-x for x in self.coeffs))

    def __pos__(self):
        return self

    def __sub__(self, other):
        f, a, b = _coerce_pair(self, other)
        if f is None:
            return NotImplemented
        return TowerScalar(f, tuple(x - y for x, y in zip(a.coeffs, b.coeffs)))

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return TowerScalar(self.field, tuple(x * other for x in self.coeffs))
        f, a, b = _coerce_pair(self, other)
        if f is None:
            return NotImplemented
        if f.k == 0:
            return TowerScalar(f, (a.coeffs[0] * b.coeffs[0],))
        out = [Fraction(0)] * f.dim
        bf = f._basis_factor
        ac, bc = a.coeffs, b.coeffs
        for s, x in enumerate(ac):
            if not x:
                continue
            for t, y in enumerate(bc):
                if not y:
                    continue
                common = s & t
                out[s ^ t] += x * y * bf[common] if common else x * y
        return TowerScalar(f, tuple(out))

    __rmul__ = __mul__

    def conjugate(self, j: int) -> "TowerScalar":
        """Field automorphism sqrt(r_j) -> -sqrt(r_j)."""
        if not 0 <= j < self.field.k:
            raise IndexError(f"generator index {j} out of range for {self.field!r}")
        bit = 1 << j
        return TowerScalar(
            self.field, tuple(-c if s & bit else c for s, c in enumerate(self.coeffs))
        )

    def inverse(self) -> "TowerScalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero tower element")
        c, acc = self, self.field.one()
        for j in range(self.field.k):
            cj = c.conjugate(j)
            acc = acc * cj
            c = c * cj
        return acc * (1 / c.coeffs[0])

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return TowerScalar(self.field, tuple(x / other for x in self.coeffs))
        if isinstance(other, TowerScalar):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        out, base = self.field.one(), self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, TowerScalar):
            if other.field is self.field:
                return self.coeffs == other.coeffs
            return self.canonical_terms() == other.canonical_terms()
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(self.coeffs[0])
            else:
                self._hash = hash(self.canonical_terms())
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    def __complex__(self):
        return complex(self.to_mpc(53))

    def __float__(self):
        if not self.is_real():
            raise TypeError(f"{self} is not real")
        return float(self.to_mpc(53).real)

    def to_mpc(self, prec: int = 53):
        with _precision(prec):
            total = mpc(0)
            f = self.field
            roots = [mp.sqrt(mpf(r)) if r > 0 else mpc(0, mp.sqrt(mpf(-r))) for r in f.radicands]
            for s, c in enumerate(self.coeffs):
                if c:
                    term = mpf(c.numerator) / c.denominator
                    for j in range(f.k):
                        if s >> j & 1:
                            term = term * roots[j]
                    total += term
            return total

    def sign(self) -> int:
        """Exact sign of a real element, certified by interval evaluation."""
        if not self.is_real():
            raise ValueError("sign of a non-real element")
        if self.is_zero():
            return 0
        prec = 64
        while True:
            enc = numeric_value(self, prec)
            s = enc.real_sign()
            if s is not None:
                return s
            prec *= 2

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __str__(self):
        return format_scalar(self)

    def __repr__(self):
        return f"TowerScalar({format_scalar(self)!r})"


def sqrt(m, field: TowerField | None = None) -> TowerScalar:
    """Exact square root of a rational number in the smallest tower (or ``field``)."""
    if field is None:
        field = TowerField.for_radicands([m] if m else [])
    return field.sqrt(m)


def as_tower(x) -> TowerScalar:
    if isinstance(x, TowerScalar):
        return x
    return Q.rational(x)


def conjugate(a: TowerScalar, generator_index: int) -> TowerScalar:
    return a.conjugate(generator_index)


def is_zero(x) -> bool:
    if isinstance(x, (TowerScalar, QuotientScalar)):
        return x.is_zero()
    return x == 0


# ---------------------------------------------------------------------------
# interval enclosures


@contextlib.contextmanager
def _precision(bits: int):
    old_mp, old_iv = mp.prec, iv.prec
    mp.prec = bits
    iv.prec = bits
    try:
        yield
    finally:
        mp.prec = old_mp
        iv.prec = old_iv


class ComplexInterval:
    """Rectangle [re] + i[im] with outward-rounded mpmath interval endpoints."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=None):
        self.re = re if not isinstance(re, (int, float)) else iv.mpf(re)
        self.im = im if im is not None else iv.mpf(0)

    @property
    def mid(self) -> complex:
        return complex(float(self.re.mid), float(self.im.mid))

    @property
    def width(self) -> float:
        return max(float(self.re.delta), float(self.im.delta))

    def contains(self, z) -> bool:
        z = complex(z)
        return z.real in self.re and z.imag in self.im

    def real_sign(self):
        """-1, 0 or +1 when the real part's sign is certain, else None."""
        a, b = self.re.a, self.re.b
        if a > 0:
            return 1
        if b < 0:
            return -1
        if a == 0 and b == 0:
            return 0
        return None

    def __add__(self, other):
        return ComplexInterval(self.re + other.re, self.im + other.im)

    def __mul__(self, other):
        return ComplexInterval(
            self.re * other.re - self.im * other.im, self.re * other.im + self.im * other.re
        )

    def __repr__(self):
        return f"ComplexInterval(re={self.re}, im={self.im})"


def _iv_of_tower(a: TowerScalar, prec: int) -> ComplexInterval:
    with _precision(prec):
        f = a.field
        roots = []
        for r in f.radicands:
            s = iv.sqrt(iv.mpf(abs(r)))
            roots.append(ComplexInterval(s) if r > 0 else ComplexInterval(iv.mpf(0), s))
        total = ComplexInterval(iv.mpf(0))
        for s, c in enumerate(a.coeffs):
            if not c:
                continue
            term = ComplexInterval(iv.mpf(c.numerator) / c.denominator)
            for j in range(f.k):
                if s >> j & 1:
                    term = term * roots[j]
            total = total + term
        return total


def numeric_value(a, precision: int = DEFAULT_PRECISION, branch: int | None = None) -> ComplexInterval:
    """Enclosure of an exact scalar.

    Tower elements get a rigorous outward-rounded enclosure.  Quotient elements
    need ``branch``, an index into :meth:`QuotientAlgebra.points`; the enclosure
    radius there comes from Newton refinement of that point.
    """
    if isinstance(a, (int, Fraction)):
        a = Q.rational(a)
    if isinstance(a, TowerScalar):
        return _iv_of_tower(a, precision)
    if isinstance(a, QuotientScalar):
        if branch is None:
            raise ValueError("quotient scalars need a branch (root-selection policy)")
        return a.enclosure(branch, precision)
    raise TypeError(f"cannot evaluate {type(a).__name__}")


# ---------------------------------------------------------------------------
# text syntax


def format_scalar(a) -> str:
    """Canonical text: "p/q", "(-7+3*sqrt(6))/5", "sqrt(-1)*sqrt(5)/5"."""
    if isinstance(a, (int, Fraction)):
        return str(Fraction(a))
    if isinstance(a, QuotientScalar):
        return str(a)
    f = a.field
    nz = [(s, c) for s, c in enumerate(a.coeffs) if c]
    if not nz:
        return "0"
    if len(nz) == 1 and nz[0][0] == 0:
        return str(nz[0][1])
    den = math.lcm(*(c.denominator for _, c in nz))
    parts = []
    for s, c in nz:
        num = c.numerator * (den // c.denominator)
        basis = "*".join(f"sqrt({f.radicands[j]})" for j in range(f.k) if s >> j & 1)
        if not basis:
            body = str(abs(num))
        elif abs(num) == 1:
            body = basis
        else:
            body = f"{abs(num)}*{basis}"
        parts.append(("-" if num < 0 else "+", body))
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        text += sign + body
    if den == 1:
        return text
    if len(parts) == 1:
        return f"{text}/{den}"
    return f"({text})/{den}"


def _collect_radicands(node, out):
    for sub in ast.walk(node):
        if isinstance(sub, ast.Call) and getattr(sub.func, "id", None) == "sqrt":
            out.append(_eval_rational_ast(sub.args[0]))


def _eval_rational_ast(node) -> Fraction:
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return Fraction(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_rational_ast(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Div, ast.Mult, ast.Add, ast.Sub)):
        a, b = _eval_rational_ast(node.left), _eval_rational_ast(node.right)
        if isinstance(node.op, ast.Div):
            return a / b
        if isinstance(node.op, ast.Mult):
            return a * b
        return a + b if isinstance(node.op, ast.Add) else a - b
    raise ValueError("sqrt() argument must be a rational constant")


def evaluate_expression(text: str, field: TowerField | None = None, names=None):
    """Evaluate an arithmetic expression with ``sqrt``, ``^`` and variables.

    ``names`` maps identifiers to values (polynomial variables, quotient
    generators).  Numbers become Fractions or elements of ``field``.
    """
    tree = ast.parse(text.replace("^", "**").strip(), mode="eval")
    if field is None:
        rads: list[Fraction] = []
        _collect_radicands(tree, rads)
        field = TowerField.for_radicands(rads)
    names = names or {}

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, int):
                raise ValueError(f"unsupported literal {node.value!r}")
            return Fraction(node.value)
        if isinstance(node, ast.Name):
            if node.id not in names:
                raise ValueError(f"unknown identifier {node.id!r}")
            return names[node.id]
        if isinstance(node, ast.Call):
            if getattr(node.func, "id", None) != "sqrt" or len(node.args) != 1:
                raise ValueError("only sqrt(<rational>) calls are allowed")
            return field.sqrt(_eval_rational_ast(node.args[0]))
        if isinstance(node, ast.UnaryOp):
            v = ev(node.operand)
            if isinstance(node.op, ast.USub):
                return -v
            if isinstance(node.op, ast.UAdd):
                return v
        if isinstance(node, ast.BinOp):
            a, b = ev(node.left), ev(node.right)
            op = type(node.op)
            if op is ast.Add:
                return a + b
            if op is ast.Sub:
                return a - b
            if op is ast.Mult:
                return a * b
            if op is ast.Div:
                return a / b
            if op is ast.Pow:
                if not isinstance(b, Fraction) or b.denominator != 1:
                    raise ValueError("exponents must be integers")
                return a ** int(b)
        raise ValueError(f"unsupported syntax: {ast.dump(node)}")

    return ev(tree)


def parse_scalar(text: str, field: TowerField | None = None) -> TowerScalar:
    """Parse "p/q", "sqrt(m)", "(-7+3*sqrt(6))/5" into a TowerScalar."""
    if field is None:
        tree = ast.parse(text.replace("^", "**").strip(), mode="eval")
        rads: list[Fraction] = []
        _collect_radicands(tree, rads)
        field = TowerField.for_radicands(rads)
    v = evaluate_expression(text, field)
    return field.embed(v) if isinstance(v, TowerScalar) else field.rational(v)


# ---------------------------------------------------------------------------
# quotient algebras


class QuotientAlgebra:
    """Q[t_1..t_s]/J for a zero-dimensional J, with canonical normal forms."""

    def __init__(self, names, relations):
        from .groebner import buchberger, finiteness_test, standard_monomials
        from .multipoly import MultiPoly, VariableTable, grevlex

        self.vars = VariableTable(names)
        self.order = grevlex
        rels = [
            r if isinstance(r, MultiPoly) else MultiPoly.parse(r, self.vars, self.order)
            for r in relations
        ]
        self.relations = tuple(rels)
        self.gb = buchberger(rels, self.order)
        if not finiteness_test(self.gb):
            raise ValueError("defining ideal is not zero-dimensional")
        self.basis_monomials = standard_monomials(self.gb)
        self.dim = len(self.basis_monomials)
        self._index = {m: i for i, m in enumerate(self.basis_monomials)}
        self._points: dict[int, list] = {}

    def __repr__(self):
        rels = ", ".join(str(r) for r in self.relations)
        return f"QuotientAlgebra({list(self.vars.names)}, [{rels}])"

    def element(self, value) -> "QuotientScalar":
        from .multipoly import MultiPoly

        if isinstance(value, QuotientScalar):
            return value
        if isinstance(value, str):
            value = MultiPoly.parse(value, self.vars, self.order)
        if not isinstance(value, MultiPoly):
            value = MultiPoly.constant(self.vars, value, self.order)
        return QuotientScalar(self, value)

    def gen(self, name: str) -> "QuotientScalar":
        from .multipoly import MultiPoly

        return QuotientScalar(self, MultiPoly.variable(self.vars, name, self.order))

    def reduce(self, p):
        from .multipoly import reduce

        return reduce(p, self.gb.basis, self.order)

    def coordinates(self, p) -> list[Fraction]:
        vec = [Fraction(0)] * self.dim
        for m, c in p.items():
            vec[self._index[m]] = Fraction(c)
        return vec

    def from_coordinates(self, vec):
        from .multipoly import MultiPoly

        return MultiPoly.from_dict(
            self.vars, {m: c for m, c in zip(self.basis_monomials, vec) if c}, self.order
        )

    def multiplication_matrix(self, a: "QuotientScalar") -> list[list[Fraction]]:
        """Matrix of b -> a*b on the standard-monomial basis (columns = images)."""
        from .multipoly import MultiPoly

        cols = []
        for m in self.basis_monomials:
            img = self.reduce(a.rep * MultiPoly.monomial(self.vars, m, 1, self.order))
            cols.append(self.coordinates(img))
        return [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)]

    def points(self, precision: int = DEFAULT_PRECISION):
        """Numerical points of V(J), Newton-refined, deterministically ordered.

        Each entry is ``(values, radius)`` with ``values`` a tuple of mpc.
        """
        if precision in self._points:
            return self._points[precision]
        import numpy as np

        names = self.vars.names
        mats = [
            np.array(
                [[float(x) for x in row] for row in self.multiplication_matrix(self.gen(n))],
                dtype=float,
            )
            for n in names
        ]
        rng = np.random.default_rng(12345)
        weights = rng.normal(size=len(mats))
        combo = sum(w * m for w, m in zip(weights, mats))
        _, vecs = np.linalg.eig(combo)
        approx = []
        for k in range(vecs.shape[1]):
            v = vecs[:, k]
            pt = [complex((v.conj() @ m @ v) / (v.conj() @ v)) for m in mats]
            approx.append(pt)
        refined = [self._newton(pt, precision) for pt in approx]
        refined.sort(key=lambda pr: tuple((round(float(z.real), 8), round(float(z.imag), 8)) for z in pr[0]))
        self._points[precision] = refined
        return refined

    def _newton(self, pt, precision):
        gens = self.gb.basis
        names = self.vars.names
        jac = [[g.diff(n) for n in names] for g in gens]
        with _precision(precision + 32):
            x = mp.matrix([mpc(z) for z in pt])
            step_norm = mpf(1)
            for _ in range(200):
                env = {n: x[i] for i, n in enumerate(names)}
                F = mp.matrix([g.evaluate_numeric(env) for g in gens])
                J = mp.matrix([[d.evaluate_numeric(env) for d in row] for row in jac])
                # least squares Newton step on the overdetermined system
                JH = J.H
                step = mp.lu_solve(JH * J, JH * F)
                x = x - step
                step_norm = mp.norm(step)
                if step_norm < mpf(2) ** (-precision - 16):
                    break
            radius = float(max(4 * step_norm, mpf(2) ** (-precision + 4)))
            return tuple(mpc(x[i]) for i in range(len(names))), radius


class QuotientScalar:
    """Element of a :class:`QuotientAlgebra`, stored as its normal form."""

    __slots__ = ("algebra", "rep")

    def __init__(self, algebra: QuotientAlgebra, rep, reduced: bool = False):
        self.algebra = algebra
        self.rep = rep if reduced else algebra.reduce(rep)

    def _lift(self, other):
        if isinstance(other, QuotientScalar):
            if other.algebra is not self.algebra:
                raise ValueError("elements of different quotient algebras")
            return other.rep
        if isinstance(other, (int, Fraction)):
            from .multipoly import MultiPoly

            return MultiPoly.constant(self.algebra.vars, other, self.algebra.order)
        return None

    def is_zero(self) -> bool:
        return self.rep.is_zero()

    def is_rational(self) -> bool:
        return self.rep.is_constant()

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return Fraction(self.rep.constant_term())

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QuotientScalar(self.algebra, self.rep + o, reduced=True)

    __radd__ = __add__

    def __neg__(self):
        return QuotientScalar(self.algebra, -self.rep, reduced=True)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QuotientScalar(self.algebra, self.rep - o, reduced=True)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuotientScalar(self.algebra, self.rep * other, reduced=True)
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QuotientScalar(self.algebra, self.rep * o)

    __rmul__ = __mul__

    def inverse(self) -> "QuotientScalar":
        """Solve a*b = 1 in the finite-dimensional algebra."""
        from ._linalg import solve

        if self.is_zero():
            raise ZeroDivisionError("inverse of zero quotient element")
        A = self.algebra.multiplication_matrix(self)
        rhs = [Fraction(0)] * self.algebra.dim
        rhs[0] = Fraction(1)  # the basis starts with the monomial 1
        sol = solve(A, rhs)
        if sol is None:
            raise ZeroDivisionError(f"{self} is a zero divisor in {self.algebra!r}")
        return QuotientScalar(self.algebra, self.algebra.from_coordinates(sol), reduced=True)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        if isinstance(other, QuotientScalar):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        out = self.algebra.element(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.rep == o

    def __hash__(self):
        return hash(self.rep)

    def __bool__(self):
        return not self.is_zero()

    def value_at(self, branch: int, precision: int = DEFAULT_PRECISION):
        pt, _ = self.algebra.points(precision)[branch]
        env = dict(zip(self.algebra.vars.names, pt))
        with _precision(precision):
            return self.rep.evaluate_numeric(env)

    def enclosure(self, branch: int, precision: int = DEFAULT_PRECISION) -> ComplexInterval:
        pt, radius = self.algebra.points(precision)[branch]
        v = self.value_at(branch, precision)
        # first-order propagation of the point radius through the representative
        env = dict(zip(self.algebra.vars.names, pt))
        with _precision(precision):
            grad = sum(abs(self.rep.diff(n).evaluate_numeric(env)) for n in self.algebra.vars.names)
            r = mpf(radius) * (1 + grad) + mpf(2) ** (-precision + 4) * (1 + abs(v))
            return ComplexInterval(
                iv.mpf([v.real - r, v.real + r]), iv.mpf([v.imag - r, v.imag + r])
            )

    def __str__(self):
        return str(self.rep)

    def __repr__(self):
        return f"QuotientScalar({self.rep})"
