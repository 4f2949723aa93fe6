"""Gram-matrix geometry: spectra, PSD and rank, and coordinates W with W^T W = X."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np
from mpmath import iv, mp

from . import _linalg
from .catalog import GramCandidate, get_candidate, get_coordinates
from .exactalg import DEFAULT_PRECISION, QuotientScalar, TowerScalar, _precision, as_tower, sqrt

__all__ = [
    "NotPSD",
    "RankExceedsDimension",
    "Eigenvalue",
    "GramSpectrum",
    "Embedding",
    "gram_spectrum",
    "embed",
    "complex_embed",
    "coordinate_residual",
]

ZERO_BAND = 1e-8
GROUP_TOL = 1e-7


class NotPSD(ValueError):
    pass


class RankExceedsDimension(ValueError):
    pass


@dataclass
class Eigenvalue:
    approx: complex
    multiplicity: int
    exact: TowerScalar | None = None
    radius: float = 0.0

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    @property
    def is_real(self) -> bool:
        if self.exact is not None:
            return self.exact.is_real()
        return abs(self.approx.imag) <= max(self.radius, ZERO_BAND)

    @property
    def is_zero(self) -> bool:
        if self.exact is not None:
            return self.exact.is_zero()
        return abs(self.approx) < ZERO_BAND

    def __str__(self):
        from .exactalg import format_scalar

        if self.exact is not None:
            return f"{format_scalar(self.exact)}:{self.multiplicity}"
        z = self.approx
        v = f"{z.real:.6g}" if abs(z.imag) <= max(self.radius, ZERO_BAND) else f"{z:.6g}"
        return f"~{v}:{self.multiplicity}"


@dataclass
class GramSpectrum:
    name: str
    is_real: bool
    eigenvalues: list
    psd: bool
    rank: int
    exact: bool

    def trace(self) -> complex:
        return sum(e.approx * e.multiplicity for e in self.eigenvalues)

    def nonzero(self) -> list:
        return [e for e in self.eigenvalues if not e.is_zero]


@dataclass
class Embedding:
    W: np.ndarray
    residual: float
    rank: int

    @property
    def d(self) -> int:
        return self.W.shape[0]

    def column_norms(self):
        return np.sqrt(np.sum(self.W * self.W, axis=0))


# ---------------------------------------------------------------------------
# spectra


def _charpoly(c: GramCandidate):
    entries = c.entries
    if not c.is_quotient:
        entries = [[as_tower(e) for e in row] for row in entries]
    return _linalg.charpoly(entries)


def _coeff_mpc(a, branch: int):
    if isinstance(a, QuotientScalar):
        return a.value_at(branch)
    return as_tower(a).to_mpc(mp.prec)


def _is_rational(a) -> bool:
    if isinstance(a, (int, Fraction)):
        return True
    if isinstance(a, TowerScalar):
        return a.is_rational()
    return a.is_rational()


def _rational(a) -> Fraction:
    return Fraction(a) if isinstance(a, (int, Fraction)) else a.to_fraction()


def _numeric_roots(coeffs_mpc):
    """Roots (lowest-degree-first coefficients) with per-root error estimates."""
    hi_first = list(reversed(coeffs_mpc))
    if len(hi_first) == 2:
        return [(-hi_first[1] / hi_first[0], mpmath.mpf(0))]
    roots, err = mpmath.polyroots(hi_first, maxsteps=400, extraprec=2 * mp.prec, error=True)
    return [(r, err) for r in roots]


def _certify_real(coeffs_iv, r: float, delta: float) -> bool:
    """Sign change of the polynomial across [r - delta, r + delta], in interval arithmetic."""

    def ev(x):
        acc = iv.mpf(0)
        xi = iv.mpf(x)
        for c in reversed(coeffs_iv):
            acc = acc * xi + c
        return acc

    lo, hi = ev(r - delta), ev(r + delta)
    return (lo.b < 0 < hi.a) or (hi.b < 0 < lo.a)


def _rational_factor_roots(factor):
    """Exact roots of a squarefree rational factor: rational ones, then a quadratic remainder."""
    out = []
    f = list(factor)
    if len(f) > 2:
        with _precision(DEFAULT_PRECISION):
            approx = _numeric_roots([mpmath.mpf(c.numerator) / c.denominator for c in f])
        for z, _ in approx:
            if abs(mpmath.im(z)) > 1e-20:
                continue
            q = Fraction(float(mpmath.re(z))).limit_denominator(10**6)
            if _linalg.upoly_eval(f, q) == 0:
                out.append(as_tower(q))
                f, _ = _linalg.upoly_divmod(f, [-q, Fraction(1)])
                f = _linalg.upoly_trim(f)
    if len(f) == 2:
        out.append(as_tower(-f[0] / f[1]))
        f = [f[1]]
    elif len(f) == 3:
        c0, c1, c2 = f
        disc = c1 * c1 - 4 * c2 * c0
        s = sqrt(disc)
        out.append((-c1 + s) / (2 * c2))
        out.append((-c1 - s) / (2 * c2))
        f = [f[2]]
    return out, f


def gram_spectrum(candidate: GramCandidate, branch: int = 0, precision: int = DEFAULT_PRECISION) -> GramSpectrum:
    """Eigenvalues with multiplicities, exact when the characteristic polynomial splits
    into rational and quadratic pieces, certified numeric otherwise."""
    p = _charpoly(candidate)
    n = candidate.n
    eigs: list[Eigenvalue] = []
    all_exact = True
    if candidate.is_quotient:
        with _precision(precision):
            coeffs = [_coeff_mpc(a, branch) for a in p]
            roots = _numeric_roots(coeffs)
        eigs = _group([(complex(r), float(e)) for r, e in roots])
        all_exact = False
    else:
        for factor, mult in _linalg.squarefree_factorization(p):
            rest = factor
            if all(_is_rational(a) for a in factor):
                exact_roots, rest = _rational_factor_roots([_rational(a) for a in factor])
                for r in exact_roots:
                    eigs.append(Eigenvalue(complex(r), mult, exact=r))
            if len(rest) > 1:
                all_exact = False
                eigs.extend(_numeric_factor(rest, mult, precision))
    eigs = _merge(eigs)
    eigs.sort(key=lambda e: (-e.approx.real, -e.approx.imag))
    rank = sum(e.multiplicity for e in eigs if not e.is_zero)
    psd = all(e.is_real and (e.is_zero or e.approx.real > 0) for e in eigs)
    assert sum(e.multiplicity for e in eigs) == n
    return GramSpectrum(candidate.name, candidate.is_real(), eigs, psd, rank, all_exact)


def _numeric_factor(factor, mult: int, precision: int) -> list[Eigenvalue]:
    with _precision(precision):
        coeffs = [as_tower(a).to_mpc(precision) for a in factor]
        roots = _numeric_roots(coeffs)
        real_coeffs = all(as_tower(a).is_real() for a in factor)
        coeffs_iv = None
        if real_coeffs:
            from .exactalg import numeric_value

            coeffs_iv = [numeric_value(as_tower(a), precision).re for a in factor]
        out = []
        for r, err in roots:
            z = complex(r)
            rad = max(float(err), 2.0 ** (-precision // 2))
            if coeffs_iv is not None and abs(z.imag) < 1e-12:
                delta = 1e-30
                while delta < 1e-6 and not _certify_real(coeffs_iv, mpmath.re(r), delta):
                    delta *= 1e3
                rad = delta
                z = complex(z.real, 0.0)
            out.append(Eigenvalue(z, mult, radius=rad))
    return out


def _group(values) -> list[Eigenvalue]:
    out: list[Eigenvalue] = []
    for z, err in values:
        for e in out:
            if abs(e.approx - z) < GROUP_TOL:
                e.multiplicity += 1
                e.radius = max(e.radius, err)
                break
        else:
            out.append(Eigenvalue(z, 1, radius=err))
    for e in out:
        if abs(e.approx.imag) < GROUP_TOL:
            e.approx = complex(e.approx.real, 0.0)
    return out


def _merge(eigs: list[Eigenvalue]) -> list[Eigenvalue]:
    out: list[Eigenvalue] = []
    for e in eigs:
        for f in out:
            same = (e.exact == f.exact) if (e.exact is not None and f.exact is not None) else abs(e.approx - f.approx) < GROUP_TOL
            if same:
                f.multiplicity += e.multiplicity
                break
        else:
            out.append(e)
    return out


# ---------------------------------------------------------------------------
# coordinates


def _real_matrix(candidate: GramCandidate) -> np.ndarray:
    if candidate.is_quotient or not candidate.is_real():
        raise NotPSD(f"{candidate.name} is not a real matrix")
    return np.array([[float(as_tower(e)) for e in row] for row in candidate.entries])


def embed(candidate: GramCandidate, d: int) -> Embedding:
    """Real W (d x n) with W^T W = X, from the eigendecomposition X = Q^T D Q."""
    X = _real_matrix(candidate)
    n = X.shape[0]
    vals, vecs = np.linalg.eigh(X)
    if vals.min() < -ZERO_BAND * n:
        raise NotPSD(f"{candidate.name} has eigenvalue {vals.min():.6g} < 0")
    keep = vals > ZERO_BAND * n
    r = int(keep.sum())
    if r > d:
        raise RankExceedsDimension(f"{candidate.name} has rank {r} > d = {d}")
    W = np.zeros((d, n))
    W[:r] = (np.sqrt(vals[keep])[:, None] * vecs[:, keep].T)[::-1]
    residual = float(np.abs(W.T @ W - X).max())
    return Embedding(W, residual, r)


def complex_embed(candidate: GramCandidate, branch: int = 0) -> Embedding:
    """Complex W with W^T W = X (plain transpose) by Takagi factorization.

    For A = B + iC symmetric, the real symmetric lift [[B, C], [C, -B]] has
    eigenvalues +-sigma_k; an eigenvector [x; y] for sigma >= 0 gives u = x + iy
    with A conj(u) = sigma u, so A = U diag(sigma) U^T.
    """
    A = candidate.numeric(branch)
    n = A.shape[0]
    B, C = A.real, A.imag
    lift = np.block([[B, C], [C, -B]])
    vals, vecs = np.linalg.eigh(lift)
    order = np.argsort(vals)[::-1][:n]
    sig = vals[order]
    U = vecs[:n, order] + 1j * vecs[n:, order]
    keep = sig > ZERO_BAND * n
    W = np.sqrt(sig[keep])[:, None] * U[:, keep].T
    residual = float(np.abs(W.T @ W - A).max())
    return Embedding(W, residual, int(keep.sum()))


def coordinate_residual(name: str):
    """Exact W^T W - X for the shipped coordinate matrices; all zero when they agree."""
    coords = get_coordinates(name)
    X = get_candidate(name).entries
    G = coords.gram()
    return [[G[i][j] - as_tower(X[i][j]) for j in range(len(X))] for i in range(len(X))]
