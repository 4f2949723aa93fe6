"""Exact criticality checks, Jacobian multiplicity flags, and the permutation census."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import factorial

from . import _linalg
from .catalog import GramCandidate, candidates_for
from .exactalg import QuotientScalar, as_tower
from .feketesys import FeketeSystem, build_system

__all__ = [
    "DegenerateCandidate",
    "VerificationReport",
    "MultiplicityReport",
    "OrbitReport",
    "CensusClass",
    "CensusReport",
    "EXPECTED_DEGREE",
    "assignment",
    "verify",
    "jacobian",
    "multiplicity_flag",
    "stabilizer_size",
    "orbit",
    "same_orbit",
    "numeric_orbit_count",
    "numeric_jacobian_rank",
    "census",
]

# number of solutions with multiplicity, from the published Groebner computations
EXPECTED_DEGREE = {4: 4, 5: 38, 6: 938}


class DegenerateCandidate(ValueError):
    pass


@dataclass
class VerificationReport:
    name: str
    passed: bool
    residuals: dict
    domain: str

    def failures(self) -> list[tuple[str, int]]:
        return [(fam, i) for fam, bad in self.residuals.items() for i in bad]


@dataclass
class MultiplicityReport:
    name: str
    jacobian_rows: int
    jacobian_cols: int
    rank: int
    multiple: bool
    method: str = "exact"


@dataclass
class OrbitReport:
    name: str
    stabilizer_size: int
    orbit_size: int
    branch_count: int = 1

    @property
    def solutions(self) -> int:
        return self.orbit_size * self.branch_count


@dataclass
class CensusClass:
    names: list
    display: str
    orbit_size: int
    branch_count: int
    multiplicity: int
    rank_deficient: bool

    @property
    def contribution(self) -> int:
        return self.orbit_size * self.branch_count * self.multiplicity


@dataclass
class CensusReport:
    n: int
    expected_degree: int
    found_simple: int
    found: int
    classes: list = field(default_factory=list)

    @property
    def difference(self) -> int:
        return self.expected_degree - self.found

    @property
    def balanced(self) -> bool:
        return self.difference == 0


def _domain(c: GramCandidate) -> str:
    if c.is_quotient:
        return "Q[" + ",".join(c.defining.vars.names) + "]/J"
    f = None
    for row in c.entries:
        for e in row:
            t = as_tower(e)
            f = t.field if f is None else f.join(t.field)
    if not f.radicands:
        return "Q"
    return "Q(" + ",".join(f"sqrt({r})" for r in f.radicands) + ")"


def assignment(c: GramCandidate) -> dict:
    """Variable values x_ij, z_ij (1-based names) at the candidate."""
    try:
        Z = c.z_entries()
    except ZeroDivisionError as exc:
        raise DegenerateCandidate(f"{c.name}: {exc}") from None
    out = {}
    for i, j, x in c.off_diagonal():
        out[f"x{i + 1}{j + 1}"] = x
        out[f"z{i + 1}{j + 1}"] = Z[i][j]
    return out


def _check_sizes(c: GramCandidate, system: FeketeSystem):
    if system.n != c.n:
        raise ValueError(f"{c.name} has n={c.n} but the system has n={system.n}")


def verify(candidate: GramCandidate, system: FeketeSystem | None = None) -> VerificationReport:
    system = system or build_system(candidate.n)
    _check_sizes(candidate, system)
    env = assignment(candidate)
    residuals = {}
    for fam, gens in system.families.items():
        residuals[fam] = [i for i, g in enumerate(gens) if g.evaluate(env) != 0]
    passed = not any(residuals.values())
    return VerificationReport(candidate.name, passed, residuals, _domain(candidate))


def jacobian(candidate: GramCandidate, system: FeketeSystem | None = None):
    """r x m matrix of exact partial derivatives at the candidate."""
    system = system or build_system(candidate.n)
    env = assignment(candidate)
    names = system.variables.names
    rows = []
    for g in system.generators:
        row = []
        for v in names:
            d = g.diff(v)
            row.append(d.evaluate(env) if not d.is_zero() else 0)
        rows.append(row)
    return rows


def multiplicity_flag(candidate: GramCandidate, system: FeketeSystem | None = None) -> MultiplicityReport:
    system = system or build_system(candidate.n)
    J = jacobian(candidate, system)
    r, m = len(J), len(J[0])
    if candidate.is_quotient:
        # the defining algebra need not be a field, so rank is taken branch by branch
        import numpy as np

        ranks = []
        alg = candidate.defining
        for b in range(alg.dim):
            M = np.array([[complex(e.value_at(b)) if isinstance(e, QuotientScalar) else complex(e) for e in row] for row in J])
            ranks.append(_numeric_rank(M))
        rk = min(ranks)
        return MultiplicityReport(candidate.name, r, m, rk, rk < m, method="numeric per branch")
    rk = _linalg.rank([[as_tower(e) for e in row] for row in J])
    return MultiplicityReport(candidate.name, r, m, rk, rk < m)


def _numeric_rank(M, tol: float = 1e-8) -> int:
    import numpy as np

    s = np.linalg.svd(M, compute_uv=False)
    return int((s > tol * max(1.0, s[0])).sum())


def numeric_jacobian_rank(candidate: GramCandidate, system: FeketeSystem | None = None, tol: float = 1e-8) -> int:
    import numpy as np

    J = jacobian(candidate, system)
    return _numeric_rank(np.array([[complex(as_tower(e)) for e in row] for row in J]), tol)


def _entry_keys(c: GramCandidate):
    def key(e):
        if isinstance(e, QuotientScalar):
            return e.rep
        return as_tower(e).canonical_terms()

    return [[key(e) for e in row] for row in c.entries]


def _permutation_count(K, target=None) -> int:
    n = len(K)
    target = K if target is None else target
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    count = 0
    for p in itertools.permutations(range(n)):
        if all(K[p[i]][p[j]] == target[i][j] for i, j in pairs):
            count += 1
    return count


def stabilizer_size(candidate: GramCandidate) -> int:
    """Number of permutations P with P^T X P = X, compared exactly."""
    if candidate.n > 8:
        raise ValueError("permutation scan limited to n <= 8")
    return _permutation_count(_entry_keys(candidate))


def orbit(candidate: GramCandidate) -> OrbitReport:
    s = stabilizer_size(candidate)
    return OrbitReport(candidate.name, s, factorial(candidate.n) // s, candidate.branch_count)


def same_orbit(a: GramCandidate, b: GramCandidate) -> bool:
    if a.n != b.n or a.is_quotient or b.is_quotient:
        return False
    Ka, Kb = _entry_keys(a), _entry_keys(b)
    n = a.n
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return any(all(Ka[p[i]][p[j]] == Kb[i][j] for i, j in pairs) for p in itertools.permutations(range(n)))


def numeric_orbit_count(candidate: GramCandidate, digits: int = 8) -> int:
    """Distinct permuted matrices over every solution branch, compared after rounding.

    For a quotient pattern this counts the solutions it stands for without any
    symbolic assumption about how branches relate.
    """
    n = candidate.n
    branches = range(candidate.defining.dim) if candidate.is_quotient else [0]
    seen = set()
    for b in branches:
        M = candidate.numeric(b)
        for p in itertools.permutations(range(n)):
            key = tuple(
                (round(M[p[i], p[j]].real, digits) + 0.0, round(M[p[i], p[j]].imag, digits) + 0.0)
                for i in range(n)
                for j in range(i + 1, n)
            )
            seen.add(key)
    return len(seen)


def census(n: int, expected_degree: int | None = None, candidates=None) -> CensusReport:
    """Count solutions found in the catalog and compare with the ideal degree.

    Candidates in a common permutation orbit form one class.  A class whose
    Jacobian is rank deficient has multiplicity above one; when it is the only
    such class, its multiplicity is fixed by matching the count against the
    expected degree.
    """
    if expected_degree is None:
        expected_degree = EXPECTED_DEGREE[n]
    cands = candidates if candidates is not None else candidates_for(n)
    system = build_system(n)
    classes: list[CensusClass] = []
    reps: list[GramCandidate] = []
    for c in cands:
        if not verify(c, system).passed:
            continue
        hit = next((k for k, r in enumerate(reps) if same_orbit(r, c)), None)
        if hit is not None:
            classes[hit].names.append(c.name)
            continue
        o = orbit(c)
        mult = multiplicity_flag(c, system)
        reps.append(c)
        classes.append(CensusClass([c.name], c.display, o.orbit_size, c.branch_count, 1, mult.multiple))
    simple = sum(k.contribution for k in classes)
    deficient = [k for k in classes if k.rank_deficient]
    diff = expected_degree - simple
    if len(deficient) == 1 and diff > 0:
        k = deficient[0]
        unit = k.orbit_size * k.branch_count
        if diff % unit == 0:
            k.multiplicity = 1 + diff // unit
    found = sum(k.contribution for k in classes)
    return CensusReport(n, expected_degree, simple, found, classes)
