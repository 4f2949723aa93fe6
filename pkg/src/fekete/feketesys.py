"""The polynomial system whose solutions are critical Gram matrices, plus energies.

Variables are x_ij (pairwise dot products) and z_ij = 1/(1 - x_ij) for i < j,
labelled 1-based as ``x12``.  Three families of generators:

* center_mass  -- 1 + sum_{k != j} x_jk, one per point j
* z_def        -- z_ij (1 - x_ij) - 1, one per pair
* gradient     -- sum_{j != k} (x_ik - x_ij) z_kj - (n - 1) x_ik for ordered k != i,
                  reading x_ii as 1
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .multipoly import MultiPoly, VariableTable, grevlex

__all__ = [
    "UnsupportedN",
    "FeketeSystem",
    "FAMILIES",
    "build_system",
    "product_energy",
    "FACTOR_TABLE_N6",
    "factor_table",
    "factor_membership",
]

FAMILIES = ("center_mass", "z_def", "gradient")


class UnsupportedN(ValueError):
    pass


@dataclass(frozen=True)
class FeketeSystem:
    n: int
    variables: VariableTable
    families: dict

    @property
    def generators(self) -> list[MultiPoly]:
        return [g for fam in FAMILIES for g in self.families[fam]]

    def labelled(self):
        """(family, index, generator) triples in generator order."""
        return [(fam, i, g) for fam in FAMILIES for i, g in enumerate(self.families[fam])]

    @property
    def num_variables(self) -> int:
        return len(self.variables)

    @property
    def num_equations(self) -> int:
        return sum(len(v) for v in self.families.values())

    def to_json(self) -> dict:
        return {"n": self.n, "families": {f: [str(g) for g in self.families[f]] for f in FAMILIES}}


def build_system(n: int) -> FeketeSystem:
    if not isinstance(n, int) or not 3 <= n <= 8:
        raise UnsupportedN(f"n must be an integer in 3..8, got {n!r}")
    vt = VariableTable.fekete(n)
    m = len(vt)
    zero = (0,) * m

    def mono(*idx):
        e = [0] * m
        for i in idx:
            e[i] += 1
        return tuple(e)

    def x(i, j):
        return vt.pair("x", i, j)

    def z(i, j):
        return vt.pair("z", i, j)

    pts = range(1, n + 1)
    center = []
    for j in pts:
        terms = {zero: Fraction(1)}
        for k in pts:
            if k != j:
                terms[mono(x(j, k))] = Fraction(1)
        center.append(MultiPoly(vt, terms, grevlex))

    zdef = []
    for i in pts:
        for j in pts:
            if i < j:
                terms = {mono(z(i, j)): Fraction(1), mono(x(i, j), z(i, j)): Fraction(-1), zero: Fraction(-1)}
                zdef.append(MultiPoly(vt, terms, grevlex))

    grad = []
    for k in pts:
        for i in pts:
            if i == k:
                continue
            terms: dict = {}

            def add(mon, c):
                v = terms.get(mon, 0) + c
                if v:
                    terms[mon] = v
                else:
                    terms.pop(mon, None)

            for j in pts:
                if j == k:
                    continue
                zkj = z(k, j)
                # (x_ik - x_ij) z_kj, with x_ii = 1
                add(mono(x(i, k), zkj), 1)
                if j == i:
                    add(mono(zkj), -1)
                else:
                    add(mono(x(i, j), zkj), -1)
            add(mono(x(i, k)), -(n - 1))
            grad.append(MultiPoly(vt, {mm: Fraction(c) for mm, c in terms.items()}, grevlex))

    return FeketeSystem(n, vt, {"center_mass": center, "z_def": zdef, "gradient": grad})


def _entries(X):
    return X.entries if hasattr(X, "entries") else X


def product_energy(X):
    """(E, E_normalized) with E_normalized = prod_{i<j} (1 - x_ij) and E = 2^C(n,2) E_normalized."""
    M = _entries(X)
    n = len(M)
    e = Fraction(1)
    for i in range(n):
        for j in range(i + 1, n):
            e = (1 - M[i][j]) * e
    return (2 ** comb(n, 2)) * e, e


# Factors of the generator of the elimination ideal in x45 for six points.
FACTOR_TABLE_N6 = (
    "x45",
    "(x45 + 1)^2",
    "2*x45 - 1",
    "2*x45 + 1",
    "(5*x45 - 1)^2",
    "5*x45 + 1",
    "(5*x45 + 7)^2",
    "(5*x45^2 + 1)^2",
    "5*x45^2 - 22*x45 + 5",
    "5*x45^2 + 2*x45 - 1",
    "5*x45^2 + 14*x45 - 1",
    "25*x45^2 + 28*x45 + 19",
    "125*x45^2 + 50*x45 - 31",
    "100*x45^4 + 95*x45^3 - 21*x45^2 - 22*x45 + 10",
    "250*x45^4 + 110*x45^3 - 21*x45^2 - 19*x45 + 4",
    "400*x45^4 + 488*x45^3 - 111*x45^2 - 196*x45 + 67",
    "3*x45 + 1",
    "5*x45 + 4",
    "10*x45 - 1",
    "25*x45 - 1",
    "25*x45 + 11",
    "25*x45 + 23",
)


def factor_table(texts=FACTOR_TABLE_N6, name: str = "x45") -> list[MultiPoly]:
    vt = VariableTable([name])
    return [MultiPoly.parse(t, vt) for t in texts]


def factor_membership(value, table=None):
    """1-based index of the first factor vanishing exactly at ``value``, else None."""
    if table is None:
        table = factor_table()
    for idx, f in enumerate(table, start=1):
        name = f.vars.names[0]
        if f.evaluate({name: value}) == 0:
            return idx
    return None
