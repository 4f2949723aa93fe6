"""Exact Gram matrices of every known critical configuration for n = 4, 5, 6.

Points are labelled 0..n-1.  Entries are TowerScalar values, except for the
Complex 2 pattern whose entries live in a quotient algebra over its three
defining quadratics.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .exactalg import (
    Q,
    QuotientAlgebra,
    QuotientScalar,
    TowerField,
    TowerScalar,
    as_tower,
    conjugate,
    format_scalar,
    parse_scalar,
    sqrt,
)
from .feketesys import UnsupportedN

__all__ = [
    "UnknownName",
    "GramCandidate",
    "CoordinateCandidate",
    "CANDIDATE_NAMES",
    "get_candidate",
    "candidates_for",
    "get_coordinates",
    "make_ngon",
    "make_three3",
    "make_simplex",
    "GramSpace",
    "candidate_from_json",
    "candidate_to_json",
    "load_candidate_file",
]


class UnknownName(KeyError):
    pass


@dataclass(eq=False)
class GramCandidate:
    name: str
    n: int
    entries: list
    display: str = ""
    defining: QuotientAlgebra | None = None
    branch_count: int = 1
    provenance: str = ""

    def __post_init__(self):
        n = self.n
        if len(self.entries) != n or any(len(r) != n for r in self.entries):
            raise ValueError(f"{self.name}: expected a {n}x{n} matrix")
        for i in range(n):
            if self.entries[i][i] != 1:
                raise ValueError(f"{self.name}: diagonal entry {i} is not 1")
            for j in range(i + 1, n):
                if self.entries[i][j] != self.entries[j][i]:
                    raise ValueError(f"{self.name}: not symmetric at ({i}, {j})")
        if not self.display:
            self.display = self.name

    def __repr__(self):
        return f"GramCandidate({self.name!r}, n={self.n})"

    @property
    def is_quotient(self) -> bool:
        return self.defining is not None

    def entry(self, i: int, j: int):
        return self.entries[i][j]

    def off_diagonal(self):
        n = self.n
        return [(i, j, self.entries[i][j]) for i in range(n) for j in range(i + 1, n)]

    def z_entries(self):
        """z_ij = 1 / (1 - x_ij); raises ZeroDivisionError if some x_ij = 1."""
        n = self.n
        Z = [[0] * n for _ in range(n)]
        for i, j, x in self.off_diagonal():
            d = 1 - x
            if d == 0:
                raise ZeroDivisionError(f"x_{i}{j} = 1")
            Z[i][j] = Z[j][i] = 1 / d
        return Z

    def is_real(self) -> bool:
        if self.is_quotient:
            return all(e.is_rational() for row in self.entries for e in row)
        return all(as_tower(e).is_real() for row in self.entries for e in row)

    def permuted(self, perm) -> list:
        """Entries of P^T X P, i.e. X[perm[i]][perm[j]]."""
        return [[self.entries[perm[i]][perm[j]] for j in range(self.n)] for i in range(self.n)]

    def to_float(self):
        import numpy as np

        if self.is_quotient:
            raise TypeError("quotient candidates need a branch for numeric values")
        return np.array([[complex(as_tower(e)) for e in row] for row in self.entries])

    def numeric(self, branch: int = 0):
        """Complex numpy matrix; quotient candidates use the given solution branch."""
        import numpy as np

        if not self.is_quotient:
            return self.to_float()
        return np.array([[complex(_quotient_value(e, branch)) for e in row] for row in self.entries])


def _quotient_value(e, branch):
    if isinstance(e, QuotientScalar):
        return e.value_at(branch)
    return complex(e)


@dataclass(eq=False)
class CoordinateCandidate:
    """Exact Cartesian coordinates (columns are points) of a real configuration."""

    name: str
    W: list
    column_order: tuple = field(default_factory=tuple)

    @property
    def d(self) -> int:
        return len(self.W)

    @property
    def n(self) -> int:
        return len(self.W[0])

    def gram(self) -> list:
        d, n = self.d, self.n
        return [[sum((self.W[k][i] * self.W[k][j] for k in range(d)), Q.zero()) for j in range(n)] for i in range(n)]


# ---------------------------------------------------------------------------
# constructors


def _r(q) -> TowerScalar:
    return Q.rational(Fraction(q))


def _circulant(row):
    n = len(row)
    return [[row[(j - i) % n] for j in range(n)] for i in range(n)]


def _from_upper(rows):
    """Symmetric matrix with unit diagonal from strict upper-triangle rows."""
    n = len(rows) + 1
    M = [[None] * n for _ in range(n)]
    for i in range(n):
        M[i][i] = _r(1)
    for i, row in enumerate(rows):
        if len(row) != n - 1 - i:
            raise ValueError("malformed upper triangle")
        for k, v in enumerate(row):
            j = i + 1 + k
            M[i][j] = M[j][i] = v
    return M


def make_ngon(n: int) -> GramCandidate:
    """n equidistributed points on a great circle, with exact cosines."""
    if n < 3:
        raise UnsupportedN("an n-gon needs n >= 3")
    if n > 6:
        raise UnsupportedN(f"cos(2 pi / {n}) is outside the supported towers")
    s5 = sqrt(5)
    cos = {
        3: [_r(1), _r(Fraction(-1, 2)), _r(Fraction(-1, 2))],
        4: [_r(1), _r(0), _r(-1), _r(0)],
        5: [_r(1), (s5 - 1) / 4, (-1 - s5) / 4, (-1 - s5) / 4, (s5 - 1) / 4],
        6: [_r(1), _r(Fraction(1, 2)), _r(Fraction(-1, 2)), _r(-1), _r(Fraction(-1, 2)), _r(Fraction(1, 2))],
    }[n]
    return GramCandidate(f"equator{n}", n, _circulant(cos), display="Equator", provenance="regular polygon")


def make_simplex(n: int) -> GramCandidate:
    if n < 3:
        raise UnsupportedN("a simplex needs n >= 3")
    theta = _r(Fraction(-1, n - 1))
    M = [[_r(1) if i == j else theta for j in range(n)] for i in range(n)]
    name = {4: "tetrahedron", 5: "simplex4", 6: "simplex5"}.get(n, f"simplex{n - 1}")
    display = {4: "Tetrahedron"}.get(n, f"{n - 1}-simplex")
    return GramCandidate(name, n, M, display=display, provenance="regular simplex")


class GramSpace:
    """Vectors as coefficient lists over a generating set with a known exact Gram matrix.

    Lets dot products of points with nested-radical coordinates be computed in
    the tower that contains the Gram entries.
    """

    def __init__(self, gram):
        self.gram = gram
        self.dim = len(gram)

    def dot(self, u, v):
        acc = Q.zero()
        for a in range(self.dim):
            if not u[a]:
                continue
            for b in range(self.dim):
                if v[b] and self.gram[a][b]:
                    acc = acc + u[a] * self.gram[a][b] * v[b]
        return acc

    def gram_of(self, vectors):
        return [[self.dot(u, v) for v in vectors] for u in vectors]


def three3_frame():
    """Gram space and point vectors of the 3:3 configuration with null phase shift.

    Generators are R e_x, R e_y and z0 e_z, where z0^2 = (-3 + 2 sqrt 6)/5 and
    R^2 = 1 - z0^2; point coordinates on them lie in Q(sqrt 3).
    """
    z0sq = (-3 + 2 * sqrt(6)) / 5
    Rsq = 1 - z0sq
    zero = _r(0)
    space = GramSpace([[Rsq, zero, zero], [zero, Rsq, zero], [zero, zero, z0sq]])
    s3 = sqrt(3)
    circle = [(_r(1), _r(0)), (_r(Fraction(-1, 2)), s3 / 2), (_r(Fraction(-1, 2)), -s3 / 2)]
    pts = [[c, s, _r(-1)] for c, s in circle] + [[c, s, _r(1)] for c, s in circle]
    return space, pts


def make_three3(phase: str = "zero") -> GramCandidate:
    if phase != "zero":
        raise ValueError("only the null phase shift is a separate configuration")
    space, pts = three3_frame()
    M = space.gram_of(pts)
    built = GramCandidate("three3", 6, M, display="3:3 (sqrt6)", provenance="two triangles in phase")
    stored = _catalog()["three3"]
    if any(M[i][j] != stored.entries[i][j] for i in range(6) for j in range(6)):
        raise AssertionError("constructed 3:3 Gram matrix differs from the stored one")
    return built


# ---------------------------------------------------------------------------
# the catalog


CANDIDATE_NAMES = (
    "tetrahedron",
    "equator4",
    "simplex4",
    "one31",
    "one4",
    "equator5",
    "equator6",
    "one5",
    "one41",
    "three3",
    "three3_conj",
    "simplex5",
    "complex1_plus",
    "complex1_minus",
    "complex2",
    "real1",
    "real2",
    "real3",
    "real4",
)


def _conj_matrix(M, radicand):
    """Apply sqrt(radicand) -> -sqrt(radicand) to every entry."""
    F = TowerField((radicand,))
    return [[conjugate(F.embed(as_tower(e)), 0) for e in row] for row in M]


def _complex1(sign: int) -> GramCandidate:
    F = TowerField((-1, 5))
    x15 = sign * F.sqrt(-1) * F.sqrt(5) / 5  # +-i/sqrt(5)
    x45, x25 = _r(Fraction(1, 5)), _r(Fraction(-7, 5))
    rows = [
        [_r(-1), -x15, x15, x15, -x15],
        [x15, -x15, -x15, x15],
        [x45, x45, x25],
        [x25, x45],
        [x45],
    ]
    tag = "plus" if sign > 0 else "minus"
    return GramCandidate(
        f"complex1_{tag}", 6, _from_upper(rows), display="Complex 1", provenance=f"x15 = {'+' if sign > 0 else '-'}i/sqrt(5)"
    )


COMPLEX2_RELATIONS = (
    "25*x45^2 + 28*x45 + 19",
    "8*x13^2 - 5*x13*x45 + x13 - x45 - 3",
    "20*x35^2 + 10*x35*x45 + 10*x35 - x45 - 3",
)


def _complex2() -> GramCandidate:
    alg = QuotientAlgebra(("x13", "x35", "x45"), COMPLEX2_RELATIONS)
    x13, x35, x45 = alg.gen("x13"), alg.gen("x35"), alg.gen("x45")
    f = Fraction
    A = 2 * x35 + f(3, 8) * x45 + f(1, 8)
    B = -x13 + f(5, 8) * x45 - f(1, 8)
    C = -x35 - f(1, 2) * x45 - f(1, 2)
    D = -2 * x35 - f(5, 8) * x45 - f(7, 8)
    rows = [
        [A, x13, B, C, C],
        [B, x13, C, C],
        [D, x35, x35],
        [x35, x35],
        [x45],
    ]
    n = 6
    one = alg.element(1)
    M = [[None] * n for _ in range(n)]
    for i in range(n):
        M[i][i] = one
    for i, row in enumerate(rows):
        for k, v in enumerate(row):
            j = i + 1 + k
            M[i][j] = M[j][i] = v
    return GramCandidate(
        "complex2", 6, M, display="Complex 2", defining=alg, branch_count=2, provenance="three defining quadratics"
    )


@lru_cache(maxsize=None)
def _catalog() -> dict:
    f = Fraction
    s5, s6 = sqrt(5), sqrt(6)
    out = {}

    def add(c: GramCandidate):
        out[c.name] = c

    add(make_simplex(4))
    eq4 = make_ngon(4)
    add(GramCandidate("equator4", 4, eq4.entries, display="Equator", provenance=eq4.provenance))
    add(make_simplex(5))
    A, B = _r(-1), _r(f(-1, 2))
    z = _r(0)
    add(GramCandidate("one31", 5, _from_upper([[A, z, z, z], [z, z, z], [B, B], [B]]), display="1:3:1"))
    A, B, C = _r(f(-1, 4)), _r(f(1, 16)), _r(f(-7, 8))
    add(GramCandidate("one4", 5, _from_upper([[A, A, A, A], [B, C, B], [B, C], [B]]), display="1:4"))
    add(make_ngon(5))
    add(make_ngon(6))
    A, B, C = _r(f(-1, 5)), (-5 + 6 * s5) / 25, (-5 - 6 * s5) / 25
    add(
        GramCandidate(
            "one5", 6, _from_upper([[A, A, A, A, A], [B, C, C, B], [B, C, C], [B, C], [B]]), display="1:5"
        )
    )
    A = _r(-1)
    add(GramCandidate("one41", 6, _from_upper([[A, z, z, z, z], [z, z, z, z], [z, A, z], [z, A], [z]]), display="1:4:1"))
    A, B, C = (-7 + 3 * s6) / 5, (11 - 4 * s6) / 5, (-1 - s6) / 5
    t33 = _from_upper([[A, A, B, C, C], [A, C, B, C], [C, C, B], [A, A], [A]])
    add(GramCandidate("three3", 6, t33, display="3:3 (sqrt6)", provenance="two triangles in phase"))
    add(GramCandidate("three3_conj", 6, _conj_matrix(t33, 6), display="3:3 (-sqrt6)", provenance="sqrt6 -> -sqrt6"))
    add(make_simplex(6))
    add(_complex1(+1))
    add(_complex1(-1))
    add(_complex2())

    x45, x02, x23 = _r(f(-1, 3)), _r(0), _r(-1)
    add(
        GramCandidate(
            "real1", 6, _from_upper([[x45, x02, x02, x45, x45], [x02, x02, x45, x45], [x23, x02, x02], [x02, x02], [x45]]),
            display="Real 1",
        )
    )
    x45, x04, x02 = _r(f(-4, 5)), _r(f(1, 10)), _r(f(-1, 5))
    add(
        GramCandidate(
            "real2", 6, _from_upper([[x45, x02, x02, x04, x04], [x02, x02, x04, x04], [x02, x02, x02], [x02, x02], [x45]]),
            display="Real 2",
        )
    )
    x45, x05, x12, x03 = _r(f(1, 25)), _r(f(-23, 25)), _r(f(-11, 25)), _r(f(-1, 5))
    add(
        GramCandidate(
            "real3", 6, _from_upper([[x45, x45, x03, x45, x05], [x12, x03, x12, x45], [x03, x12, x45], [x03, x03], [x45]]),
            display="Real 3",
        )
    )
    x45, x01 = _r(0), _r(f(-1, 2))
    add(
        GramCandidate(
            "real4", 6, _from_upper([[x01, x45, x45, x45, x01], [x45, x45, x45, x01], [x01, x01, x45], [x01, x45], [x45]]),
            display="Real 4",
        )
    )
    for c in out.values():
        _check_row_sums(c)
    return {k: out[k] for k in CANDIDATE_NAMES}


def _check_row_sums(c: GramCandidate):
    for i, row in enumerate(c.entries):
        s = row[0]
        for e in row[1:]:
            s = s + e
        if s != 0:
            raise AssertionError(f"{c.name}: row {i} does not sum to 0")


def get_candidate(name: str) -> GramCandidate:
    cat = _catalog()
    if name not in cat:
        raise UnknownName(name)
    return cat[name]


def candidates_for(n: int) -> list[GramCandidate]:
    return [c for c in _catalog().values() if c.n == n]


# ---------------------------------------------------------------------------
# exact Cartesian coordinates on S^3 for the four real configurations


def _coordinate_data():
    F = TowerField((2, 3, 5))
    s2, s3, s5 = F.sqrt(2), F.sqrt(3), F.sqrt(5)
    s6, s10, s15 = s2 * s3, s2 * s5, s3 * s5

    def scale(rows, k):
        return [[F.rational(Fraction(v, k)) if isinstance(v, int) else v / k for v in r] for r in rows]

    W1 = scale([[0, 0, -s6, s6, 0, 0], [0, 0, -s2, -s2, 2 * s2, 0], [0, 3, -1, -1, -1, 0], [3, 0, 0, 0, 0, -3]], 3)
    W2 = scale(
        [
            [-3 * s10, 3 * s10, 0, 0, 0, 0],
            [0, 0, -3 * s10, 3 * s10, 0, 0],
            [0, 0, 0, 0, 2 * s15, -2 * s15],
            [s10, s10, s10, s10, -2 * s10, -2 * s10],
        ],
        10,
    )
    W3 = scale(
        [[0, 0, -3 * s2, 3 * s2, 0, 0], [0, 0, -s6, -s6, 2 * s6, 0], [0, 2 * s6, 0, 0, 0, -2 * s6], [5, -1, -1, -1, -1, -1]],
        5,
    )
    W4 = scale([[-s3, s3, 0, 0, 0, 0], [-1, -1, 2, 0, 0, 0], [0, 0, 0, -s3, s3, 0], [0, 0, 0, -1, -1, 2]], 2)
    return {"real1": W1, "real2": W2, "real3": W3, "real4": W4}


def _match_columns(G, X):
    """Permutation p with G[p[i]][p[j]] == X[i][j] for all i, j, or None."""
    n = len(X)
    for perm in itertools.permutations(range(n)):
        if all(G[perm[i]][perm[j]] == X[i][j] for i in range(n) for j in range(i + 1, n)):
            return perm
    return None


@lru_cache(maxsize=None)
def get_coordinates(name: str) -> CoordinateCandidate:
    """Exact W on S^3 with W^T W equal to the catalog Gram matrix.

    The shipped coordinate tables number the points differently from the Gram
    tables, so columns are reordered by an exact search over relabellings.
    """
    data = _coordinate_data()
    if name not in data:
        raise UnknownName(name)
    W = data[name]
    raw = CoordinateCandidate(name, W)
    perm = _match_columns(raw.gram(), get_candidate(name).entries)
    if perm is None:
        raise AssertionError(f"no relabelling of the {name} coordinates reproduces its Gram matrix")
    W2 = [[row[p] for p in perm] for row in W]
    return CoordinateCandidate(name, W2, tuple(perm))


# ---------------------------------------------------------------------------
# JSON


def candidate_to_json(c: GramCandidate) -> dict:
    if c.is_quotient:
        entries = [[str(e.rep) for e in row] for row in c.entries]
        radicands: list = []
        defining = [str(r) for r in c.defining.relations]
    else:
        towers = [as_tower(e) for row in c.entries for e in row]
        field_ = towers[0].field
        for t in towers[1:]:
            field_ = field_.join(t.field)
        radicands = list(field_.radicands)
        entries = [[format_scalar(as_tower(e)) for e in row] for row in c.entries]
        defining = []
    out = {"name": c.name, "n": c.n, "field": {"radicands": radicands}, "entries": entries}
    if defining:
        out["defining"] = defining
        out["variables"] = list(c.defining.vars.names)
    if c.branch_count != 1:
        out["branch_count"] = c.branch_count
    return out


def candidate_from_json(data: dict) -> GramCandidate:
    n = int(data["n"])
    name = data.get("name", "user")
    entries = data["entries"]
    if data.get("defining"):
        import re

        rels = data["defining"]
        names = data.get("variables")
        if not names:
            names = sorted(set(re.findall(r"[A-Za-z_]\w*", " ".join(rels))) - {"sqrt"})
        alg = QuotientAlgebra(tuple(names), rels)
        M = [[alg.element(str(e)) for e in row] for row in entries]
        return GramCandidate(name, n, M, defining=alg, branch_count=int(data.get("branch_count", 1)), provenance="file")
    rad = data.get("field", {}).get("radicands", [])
    F = TowerField.for_radicands(rad)
    M = [[parse_scalar(str(e), F) for e in row] for row in entries]
    return GramCandidate(name, n, M, branch_count=int(data.get("branch_count", 1)), provenance="file")


def load_candidate_file(path) -> GramCandidate:
    with open(path) as fh:
        return candidate_from_json(json.load(fh))
