"""Projected Lagrangian Hessians and the GM / SM / saddle classification.

The Lagrangian is L(w) = -sum_{i<j} log|w_i - w_j|^2 + (n-1)/2 sum_i (|w_i|^2 - 1).
Its Hessian has diagonal blocks sum_j J(w_i - w_j) + (n-1) I and off-diagonal
blocks -J(w_i - w_j), where J(w) = (-2/|w|^4)(|w|^2 I - 2 w w^T).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .catalog import GramCandidate, GramSpace, candidates_for, get_candidate, three3_frame
from .critverify import same_orbit, verify
from .exactalg import Q, TowerScalar, as_tower, numeric_value
from .feketesys import product_energy
from .spheregeom import NotPSD, RankExceedsDimension, embed

__all__ = [
    "CoincidentPoints",
    "UnsupportedConfiguration",
    "ProjectedHessian",
    "SpectrumEntry",
    "ClassificationRecord",
    "Certificate",
    "jacobian_f",
    "hessian_blocks",
    "tangent_frame",
    "project_tangent",
    "hessian_spectrum",
    "classify",
    "classification_grid",
    "negative_direction_certificate",
    "exact_quadratic_form",
    "lagrangian_gradient",
    "finite_difference_hessian",
]

GROUP_TOL = 1e-7
ZERO_BAND = 1e-8
MAX_DENOMINATOR = 48
# a computed eigenvalue this far below zero is far outside the floating-point error
NEGATIVE_MARGIN = 1e-6


class CoincidentPoints(ValueError):
    pass


class UnsupportedConfiguration(ValueError):
    pass


@dataclass
class ProjectedHessian:
    d: int
    matrix: np.ndarray
    basis: np.ndarray

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


@dataclass
class SpectrumEntry:
    value: float
    multiplicity: int
    exact: Fraction | None = None

    def __str__(self):
        v = str(self.exact) if self.exact is not None else f"{self.value:.6g}"
        return f"{v}:{self.multiplicity}"


@dataclass
class Certificate:
    configuration: str
    value: float
    exact: TowerScalar | None
    enclosure: tuple
    direction: str

    @property
    def certified_negative(self) -> bool:
        return self.enclosure[1] < 0


@dataclass
class ClassificationRecord:
    configuration: str
    d: int
    spectrum: list
    verdict: str
    energy: float
    certificate: str | None = None
    notes: list = field(default_factory=list)

    @property
    def zero_multiplicity(self) -> int:
        return sum(e.multiplicity for e in self.spectrum if abs(e.value) < ZERO_BAND)


def jacobian_f(w: np.ndarray) -> np.ndarray:
    s = float(w @ w)
    return (-2.0 / s**2) * (s * np.eye(len(w)) - 2.0 * np.outer(w, w))


def hessian_blocks(W: np.ndarray) -> np.ndarray:
    """Full nd x nd Hessian of the Lagrangian, point i occupying rows i*d .. i*d+d-1."""
    W = np.asarray(W, dtype=float)
    d, n = W.shape
    if np.abs(np.sum(W * W, axis=0) - 1).max() > 1e-10:
        raise ValueError("columns of W must be unit vectors")
    H = np.zeros((n * d, n * d))
    for i in range(n):
        H[i * d:(i + 1) * d, i * d:(i + 1) * d] += (n - 1) * np.eye(d)
        for j in range(n):
            if i == j:
                continue
            delta = W[:, i] - W[:, j]
            if delta @ delta < 1e-20:
                raise CoincidentPoints(f"points {i} and {j} coincide")
            Jd = jacobian_f(delta)
            H[i * d:(i + 1) * d, i * d:(i + 1) * d] += Jd
            H[i * d:(i + 1) * d, j * d:(j + 1) * d] -= Jd
    return H


def tangent_frame(W: np.ndarray, rng: np.random.Generator | None = None) -> np.ndarray:
    """Orthonormal basis (nd x n(d-1)) of the tangent space of the product of spheres.

    With ``rng`` the frame at each point is rotated randomly, which must not
    change the spectrum of the projected matrix.
    """
    d, n = W.shape
    V = np.zeros((n * d, n * (d - 1)))
    for i in range(n):
        w = W[:, i][:, None]
        q, _ = np.linalg.qr(np.hstack([w, np.eye(d)]))
        B = q[:, 1:d]
        if rng is not None:
            R, _ = np.linalg.qr(rng.normal(size=(d - 1, d - 1)))
            B = B @ R
        V[i * d:(i + 1) * d, i * (d - 1):(i + 1) * (d - 1)] = B
    return V


def project_tangent(H: np.ndarray, W: np.ndarray, rng: np.random.Generator | None = None) -> ProjectedHessian:
    V = tangent_frame(np.asarray(W, dtype=float), rng)
    h = V.T @ H @ V
    return ProjectedHessian(W.shape[0], (h + h.T) / 2, V)


def _recognize(x: float) -> Fraction | None:
    q = Fraction(x).limit_denominator(MAX_DENOMINATOR)
    return q if abs(float(q) - x) < 1e-9 else None


def group_spectrum(values) -> list[SpectrumEntry]:
    """Group sorted eigenvalues into (value, multiplicity), descending."""
    out: list[SpectrumEntry] = []
    for v in sorted(values, reverse=True):
        if abs(v) < ZERO_BAND:
            v = 0.0
        if out and abs(out[-1].value - v) < GROUP_TOL:
            out[-1].multiplicity += 1
        else:
            out.append(SpectrumEntry(float(v), 1))
    for e in out:
        e.exact = _recognize(e.value)
        if e.exact is not None:
            e.value = float(e.exact)
    return out


def hessian_spectrum(candidate: GramCandidate, d: int) -> list[SpectrumEntry]:
    emb = embed(candidate, d)
    ph = project_tangent(hessian_blocks(emb.W), emb.W)
    return group_spectrum(ph.eigenvalues())


def _energy(c: GramCandidate) -> float:
    return float(as_tower(product_energy(c)[1]))


def _real_psd_catalog(n: int) -> list[GramCandidate]:
    out = []
    for c in candidates_for(n):
        if c.is_quotient or not c.is_real():
            continue
        try:
            embed(c, n - 1)
        except NotPSD:
            continue
        out.append(c)
    return out


def _best_energy(n: int, d: int) -> float:
    best = 0.0
    for c in _real_psd_catalog(n):
        if not verify(c).passed:
            continue
        try:
            embed(c, d)
        except RankExceedsDimension:
            continue
        best = max(best, _energy(c))
    return best


def _in_catalog(candidate: GramCandidate) -> bool:
    return any(same_orbit(candidate, c) for c in candidates_for(candidate.n))


def classify(candidate: GramCandidate, d: int) -> ClassificationRecord:
    """Verdict GM, SM or S on S^(d-1); local minima outside the catalog get "LM"."""
    emb = embed(candidate, d)
    ph = project_tangent(hessian_blocks(emb.W), emb.W)
    vals = ph.eigenvalues()
    spectrum = group_spectrum(vals)
    energy = _energy(candidate)
    rec = ClassificationRecord(candidate.name, d, spectrum, "unclassified", energy)
    lam = float(vals.min())
    if lam < -NEGATIVE_MARGIN:
        rec.verdict = "S"
        rec.certificate = f"eigenvalue {lam:.6g}"
        return rec
    zeros = rec.zero_multiplicity
    expected_zeros = d * (d - 1) // 2
    if zeros != expected_zeros or lam < -ZERO_BAND:
        rec.notes.append(f"{zeros} zero eigenvalues, rotations account for {expected_zeros}")
        return rec
    if not _in_catalog(candidate):
        rec.verdict = "LM"
        rec.notes.append("local minimum, globality unknown outside the catalog")
        return rec
    best = _best_energy(candidate.n, d)
    rec.verdict = "GM" if energy >= best * (1 - 1e-12) else "SM"
    if rec.verdict == "SM":
        rec.notes.append(f"energy {energy:.6g} below the best {best:.6g} at d={d}")
    return rec


def classification_grid(n: int, dims=None) -> dict:
    """{configuration name: {d: verdict}} over the real PSD catalog, "-" when rank > d."""
    dims = dims or list(range(2, n))
    grid = {}
    for c in _real_psd_catalog(n):
        row = {}
        for d in dims:
            try:
                row[d] = classify(c, d).verdict
            except RankExceedsDimension:
                row[d] = "-"
        grid[c.name] = row
    return grid


# ---------------------------------------------------------------------------
# exact quadratic forms along explicit directions


def exact_quadratic_form(space: GramSpace, points, directions):
    """v^T H_L v for points and directions given as coefficient vectors in ``space``.

    Uses v^T H v = (n-1) sum |v_i|^2 + sum_{i<j} a^T J(delta) a, with a = v_i - v_j
    and delta = w_i - w_j, so only exact dot products are needed.
    """
    n = len(points)
    zero = Q.zero()

    def sub(u, v):
        return [x - y for x, y in zip(u, v)]

    total = sum((space.dot(v, v) for v in directions), zero) * (n - 1)
    for i in range(n):
        for j in range(i + 1, n):
            a = sub(directions[i], directions[j])
            if not any(a):
                continue
            delta = sub(points[i], points[j])
            dd = space.dot(delta, delta)
            ad = space.dot(a, delta)
            total = total + (-2 / (dd * dd)) * (dd * space.dot(a, a) - 2 * ad * ad)
    return total


def _one5_data():
    c = get_candidate("one5")
    X = [[as_tower(e) for e in row] for row in c.entries]
    n = c.n
    # the pole is the point at dot product -1/5 with all others
    pole = next(i for i in range(n) if all(X[i][j] == Fraction(-1, 5) for j in range(n) if j != i))
    ring = [i for i in range(n) if i != pole]
    a = ring[0]
    b = max((j for j in ring if j != a), key=lambda j: float(X[a][j]))
    # generators: the n points, then e_z with e_z . w = +1 at the pole
    h = {pole: Q.one()}
    h.update({j: as_tower(Fraction(-1, 5)) for j in ring})
    G = [[X[i][j] for j in range(n)] + [h[i]] for i in range(n)]
    G.append([h[i] for i in range(n)] + [Q.one()])
    space = GramSpace(G)
    unit = [[Q.one() if k == i else Q.zero() for k in range(n + 1)] for i in range(n + 1)]
    pts = unit[:n]
    ez = unit[n]
    dirs = [[Q.zero()] * (n + 1) for _ in range(n)]
    for idx, sign in ((a, 1), (b, -1)):
        # tangent part of e_z at the point, pushed up or down
        dirs[idx] = [sign * (e - h[idx] * p) for e, p in zip(ez, pts[idx])]
    return space, pts, dirs, (a, b)


def _three3_data():
    space, pts = three3_frame()
    dirs = []
    for c, s, z in pts:
        if z == 1:
            dirs.append([-s, c, Q.zero()])
        else:
            dirs.append([Q.zero(), Q.zero(), Q.zero()])
    return space, pts, dirs


def negative_direction_certificate(name: str, precision: int = 256) -> Certificate:
    """Exact value of the quadratic form along an explicit tangent direction, with enclosure."""
    if name == "three3":
        space, pts, dirs = _three3_data()
        text = "upper triangle rotated counterclockwise about the z-axis"
    elif name == "one5":
        space, pts, dirs, (a, b) = _one5_data()
        text = f"ring points {a} and {b} (adjacent) moved up and down along the tangent part of e_z"
    else:
        raise UnsupportedConfiguration(f"no explicit direction for {name!r}")
    val = exact_quadratic_form(space, pts, dirs)
    box = numeric_value(val, precision).re
    return Certificate(name, float(box.mid), val, (float(box.a), float(box.b)), text)


# ---------------------------------------------------------------------------
# numerical checks


def lagrangian_gradient(W: np.ndarray) -> np.ndarray:
    W = np.asarray(W, dtype=float)
    d, n = W.shape
    G = (n - 1) * W.copy()
    for i in range(n):
        for j in range(n):
            if i != j:
                delta = W[:, i] - W[:, j]
                G[:, i] -= 2 * delta / (delta @ delta)
    return G


def finite_difference_hessian(W: np.ndarray, step: float = 1e-5) -> np.ndarray:
    """Central differences of the analytic gradient."""
    W = np.asarray(W, dtype=float)
    d, n = W.shape
    H = np.zeros((n * d, n * d))
    for k in range(n * d):
        i, a = divmod(k, d)
        Wp, Wm = W.copy(), W.copy()
        Wp[a, i] += step
        Wm[a, i] -= step
        H[:, k] = (lagrangian_gradient(Wp) - lagrangian_gradient(Wm)).T.reshape(-1) / (2 * step)
    return H
