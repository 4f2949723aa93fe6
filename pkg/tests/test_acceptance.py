"""Acceptance suite: one group of tests per criterion, summarized at the end of the run."""

import itertools
import time
from fractions import Fraction
from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fekete.catalog import CANDIDATE_NAMES, candidates_for, get_candidate
from fekete.critverify import census, multiplicity_flag, orbit, verify
from fekete.exactalg import TowerField, as_tower, numeric_value, sqrt
from fekete.feketesys import build_system, product_energy
from fekete.groebner import finiteness_test, ideal_degree, s_polynomial
from fekete.hessclass import (
    classification_grid,
    finite_difference_hessian,
    hessian_blocks,
    hessian_spectrum,
    lagrangian_gradient,
    negative_direction_certificate,
    project_tangent,
)
from fekete.multipoly import reduce
from fekete.spheregeom import NotPSD, coordinate_residual, embed, gram_spectrum

F = Fraction
crit = pytest.mark.criterion


# -- 1 -----------------------------------------------------------------------


@crit(1, "system shape for n = 3..8")
def test_system_shape(detail):
    table = {3: (6, 12), 4: (12, 22), 5: (20, 35), 6: (30, 51), 7: (42, 70), 8: (56, 92)}
    t = time.perf_counter()
    got = {n: (build_system(n).num_variables, build_system(n).num_equations) for n in table}
    elapsed = time.perf_counter() - t
    detail(f"{elapsed:.2f}s")
    assert got == table
    assert elapsed < 1.0


# -- 2, 3 --------------------------------------------------------------------


@crit(2, "Groebner degree n=4 is 4 within 60 s")
def test_degree_n4(basis_n4, detail):
    gb, secs = basis_n4
    assert finiteness_test(gb)
    deg = ideal_degree(gb).degree
    detail(f"degree {deg}, {len(gb)} polys, {secs:.2f}s")
    assert deg == 4
    assert secs < 60


@crit(3, "Groebner degree n=5 is 38 within 30 min")
def test_degree_n5(basis_n5, detail):
    gb, secs = basis_n5
    assert finiteness_test(gb)
    deg = ideal_degree(gb).degree
    detail(f"degree {deg}, {len(gb)} polys, {secs:.0f}s")
    assert deg == 38
    assert secs < 1800


# -- 4 -----------------------------------------------------------------------


@crit(4, "n=6 census 848 + 90 = 938, Complex 1 Jacobian rank 29 of 30")
def test_census_n6(detail):
    rep = census(6, 938)
    c1 = next(k for k in rep.classes if "complex1_plus" in k.names)
    detail(f"found {rep.found_simple} simple, {rep.found} with multiplicity")
    assert rep.found_simple == 848
    assert rep.expected_degree - rep.found_simple == 90
    assert c1.orbit_size == 90 and c1.multiplicity == 2
    assert rep.found == 938 and rep.balanced
    assert [k.names for k in rep.classes if k.multiplicity > 1] == [["complex1_plus", "complex1_minus"]]


@crit(4, "n=6 census 848 + 90 = 938, Complex 1 Jacobian rank 29 of 30")
def test_complex1_jacobian():
    for name in ("complex1_plus", "complex1_minus"):
        m = multiplicity_flag(get_candidate(name))
        assert (m.jacobian_rows, m.jacobian_cols, m.rank, m.multiple) == (51, 30, 29, True)


# -- 5 -----------------------------------------------------------------------


DOMAINS = {
    "three3": "Q(sqrt(6))",
    "three3_conj": "Q(sqrt(6))",
    "complex1_plus": "Q(sqrt(-1),sqrt(5))",
    "complex1_minus": "Q(sqrt(-1),sqrt(5))",
    "complex2": "Q[x13,x35,x45]/J",
}


@crit(5, "all 19 catalog candidates verify exactly in < 10 s")
def test_exact_verification(detail):
    systems = {n: build_system(n) for n in (4, 5, 6)}
    t = time.perf_counter()
    reports = [verify(get_candidate(nm), systems[get_candidate(nm).n]) for nm in CANDIDATE_NAMES]
    elapsed = time.perf_counter() - t
    detail(f"{len(reports)} candidates, {elapsed:.2f}s")
    assert len(reports) == 19
    for r in reports:
        assert r.passed, r.name
        assert all(v == [] for v in r.residuals.values())
        if r.name in DOMAINS:
            assert r.domain == DOMAINS[r.name]
    assert elapsed < 10


# -- 6 -----------------------------------------------------------------------

ORBITS = {
    4: {"tetrahedron": 1, "equator4": 3},
    5: {"simplex4": 1, "one31": 10, "one4": 15, "equator5": 12},
    6: {
        "equator6": 60,
        "one5": 72,
        "one41": 15,
        "three3": 60,
        "three3_conj": 60,
        "complex1_plus": 90,
        "complex1_minus": 90,
        "complex2": 180,
        "real1": 15,
        "real2": 45,
        "real3": 60,
        "real4": 10,
        "simplex5": 1,
    },
}


@crit(6, "orbit sizes and census sums for n = 4, 5, 6")
@pytest.mark.parametrize("n", [4, 5, 6])
def test_orbits(n, detail):
    got = {c.name: orbit(c) for c in candidates_for(n)}
    assert {k: o.orbit_size for k, o in got.items()} == ORBITS[n]
    for o in got.values():
        assert o.stabilizer_size * o.orbit_size == factorial(n)
    assert got.get("complex2") is None or got["complex2"].solutions == 360
    rep = census(n)
    detail(f"n={n}: {rep.found}")
    assert rep.found == {4: 4, 5: 38, 6: 938}[n]


# -- 7 -----------------------------------------------------------------------


def _en(name):
    return product_energy(get_candidate(name))[1]


@crit(7, "product energies and their ordering")
def test_energies_exact():
    assert _en("tetrahedron") == F(4096, 729)
    assert _en("equator4") == 4
    assert _en("one31") == F(27, 4)
    assert abs(float(as_tower(_en("one4"))) - 6.630) < 5e-3
    assert _en("equator5") == F(5, 4) ** 5
    simplex4 = float(as_tower(_en("simplex4")))
    assert round(simplex4, 3) == round(float(F(5, 4) ** 10), 3) == 9.313
    E, En = product_energy(get_candidate("tetrahedron"))
    assert E == 2**6 * En


N6_ENERGY = {
    "simplex5": 15.41,
    "real4": 11.39,
    "real1": 11.24,
    "real3": 11.17,
    "real2": 10.97,
    "one41": 8.00,
    "three3": 6.62,
    "one5": 5.05,
    "equator6": 1.42,
}


@crit(7, "product energies and their ordering")
def test_energies_n6(detail):
    got = {k: float(as_tower(_en(k))) for k in N6_ENERGY}
    for k, v in N6_ENERGY.items():
        assert abs(got[k] - v) < 5e-3, k
    detail("n=6 within 5e-3")
    # ordering inside each rank class, as printed
    for group in (["real4", "real1", "real3", "real2"], ["one41", "three3", "one5"]):
        assert sorted(group, key=lambda k: -got[k]) == group
    n5 = {k: float(as_tower(_en(k))) for k in ("one31", "one4")}
    assert n5["one31"] > n5["one4"]


# -- 8 -----------------------------------------------------------------------

# name: (real, nonzero eigenvalues, psd, rank); exact values as Fractions, printed floats as floats
GRAM_TABLE = {
    "equator6": (True, [(F(3), 2)], True, 2),
    "one5": (True, [(F(6, 5), 1), (F(12, 5), 2)], True, 3),
    "one41": (True, [(F(2), 3)], True, 3),
    "three3": (True, [(2.28, 1), (1.86, 2)], True, 3),
    "three3_conj": (True, [(-9.48, 1), (7.74, 2)], False, 3),
    "complex1_plus": (False, [(F(6, 5), 1), (F(12, 5), 2)], True, 3),
    "complex1_minus": (False, [(F(6, 5), 1), (F(12, 5), 2)], True, 3),
    "real1": (True, [(F(4, 3), 3), (F(2), 1)], True, 4),
    "real2": (True, [(F(6, 5), 2), (F(9, 5), 2)], True, 4),
    "real3": (True, [(F(6, 5), 1), (F(36, 25), 2), (F(48, 25), 1)], True, 4),
    "real4": (True, [(F(3, 2), 4)], True, 4),
    "simplex5": (True, [(F(6, 5), 5)], True, 5),
}


def _is_real_matrix(c):
    return not c.is_quotient and c.is_real()


@crit(8, "Gram spectra, PSD flags and ranks for n=6")
@pytest.mark.parametrize("name", sorted(GRAM_TABLE))
def test_gram_spectra(name):
    real, eigs, psd, rank = GRAM_TABLE[name]
    c = get_candidate(name)
    sp = gram_spectrum(c)
    assert _is_real_matrix(c) == real
    assert sp.psd == psd
    assert sp.rank == rank
    nz = sp.nonzero()
    assert sorted(e.multiplicity for e in nz) == sorted(m for _, m in eigs)
    for value, mult in eigs:
        if isinstance(value, Fraction):
            assert any(e.exact == value and e.multiplicity == mult for e in nz), (value, [str(e) for e in nz])
        else:
            assert any(abs(e.approx - value) < 5e-3 and e.multiplicity == mult for e in nz)


@crit(8, "Gram spectra, PSD flags and ranks for n=6")
def test_gram_spectrum_complex2():
    c = get_candidate("complex2")
    assert not _is_real_matrix(c)
    sp = gram_spectrum(c)
    nz = sp.nonzero()
    assert sp.rank == 3 and not sp.psd
    assert len(nz) == 3 and all(e.multiplicity == 1 and abs(e.approx.imag) > 1e-3 for e in nz)


# -- 9 -----------------------------------------------------------------------


def _real_psd():
    out = []
    for nm in CANDIDATE_NAMES:
        c = get_candidate(nm)
        if not _is_real_matrix(c):
            continue
        try:
            embed(c, c.n - 1)
        except NotPSD:
            continue
        out.append(c)
    return out


@crit(9, "embeddings reproduce X; shipped coordinates are exact")
def test_embeddings(detail):
    worst = 0.0
    cands = _real_psd()
    for c in cands:
        emb = embed(c, gram_spectrum(c).rank)
        worst = max(worst, emb.residual)
        assert np.abs(emb.column_norms() - 1).max() < 1e-12
    detail(f"{len(cands)} real PSD, max residual {worst:.1e}")
    assert len(cands) == 15
    assert worst <= 1e-10


@crit(9, "embeddings reproduce X; shipped coordinates are exact")
@pytest.mark.parametrize("name", ["real1", "real2", "real3", "real4"])
def test_shipped_coordinates(name):
    R = coordinate_residual(name)
    assert all(x.is_zero() for row in R for x in row)


# -- 10 ----------------------------------------------------------------------

f = Fraction
# (name, d): spectrum as {value: multiplicity}; floats mark the floating rows
HESSIAN_TABLE = {
    ("equator4", 2): {4: 1, 3: 2, 0: 1},
    ("equator4", 3): {4: 1, 3: 3, 0: 3, -1: 1},
    ("tetrahedron", 3): {f(3, 2): 2, 3: 3, 0: 3},
    ("equator5", 2): {6: 2, 4: 2, 0: 1},
    ("equator5", 3): {6: 2, 4: 3, 0: 3, -2: 2},
    ("one4", 3): {f(64, 15): 1, f(-4, 15): 1, 2: 2, 4: 3, 0: 3},
    ("one31", 3): {f(7, 2): 2, f(1, 2): 2, 4: 3, 0: 3},
    ("one31", 4): {f(7, 2): 2, f(1, 2): 2, 4: 4, 0: 6, -1: 1},
    ("simplex4", 4): {4: 4, f(8, 5): 5, 0: 6},
    ("equator6", 2): {9: 1, 8: 2, 5: 2, 0: 1},
    ("equator6", 3): {9: 1, 8: 2, 5: 3, 0: 3, -4: 1, -3: 2},
    ("one5", 3): {5: 3, 0: 3, 2.5: 2, -1.25: 2, 6.25: 2},
    ("three3", 3): {5: 3, 0: 3, 3.55: 2, 1.45: 2, 5.80: 1, -0.80: 1},
    ("one41", 3): {5: 3, 4: 3, 1: 3, 0: 3},
    ("one41", 4): {5: 4, 4: 3, 1: 3, 0: 6, -1: 2},
    ("real1", 4): {f(3, 2): 2, f(10, 3): 3, f(1, 3): 3, 5: 4, 0: 6},
    ("real2", 4): {f(5, 3): 1, f(40, 9): 1, f(-5, 18): 2, 5: 4, f(25, 12): 4, 0: 6},
    ("real3", 4): {f(13, 6): 1, f(-5, 24): 1, f(11, 6): 2, f(175, 48): 2, f(25, 48): 2, 5: 4, 0: 6},
    ("real4", 4): {5: 4, 3: 4, f(1, 2): 4, 0: 6},
    ("real1", 5): {f(3, 2): 2, f(10, 3): 3, f(1, 3): 3, 5: 5, 0: 10, -1: 1},
    ("real4", 5): {5: 5, 3: 4, f(1, 2): 4, 0: 10, -1: 1},
    ("simplex5", 5): {5: 5, f(5, 3): 9, 0: 10},
}


@crit(10, "projected Hessian spectra for every tabulated row")
@pytest.mark.parametrize("key", list(HESSIAN_TABLE), ids=[f"{k[0]}-d{k[1]}" for k in HESSIAN_TABLE])
def test_hessian_table(key):
    name, d = key
    expected = HESSIAN_TABLE[key]
    got = hessian_spectrum(get_candidate(name), d)
    assert sum(e.multiplicity for e in got) == get_candidate(name).n * (d - 1)
    assert len(got) == len(expected), [str(e) for e in got]
    for value, mult in expected.items():
        if isinstance(value, float):
            hit = [e for e in got if abs(e.value - value) < 5e-3]
        else:
            hit = [e for e in got if e.exact == Fraction(value)]
        assert len(hit) == 1 and hit[0].multiplicity == mult, (value, [str(e) for e in got])


# -- 11 ----------------------------------------------------------------------


@crit(11, "negative-direction certificates for 3:3 and 1:5")
def test_certificate_three3(detail):
    cert = negative_direction_certificate("three3")
    assert cert.exact == 36 - 15 * sqrt(6)
    assert cert.certified_negative
    assert abs(cert.value + 0.742) < 5e-4
    detail(f"3:3 = 36-15*sqrt(6) in [{cert.enclosure[0]:.6f}, {cert.enclosure[1]:.6f}]")


@crit(11, "negative-direction certificates for 3:3 and 1:5")
def test_certificate_one5(detail):
    cert = negative_direction_certificate("one5")
    assert cert.certified_negative
    detail(f"1:5 certified value {cert.value:.4f}")
    # the tabulated figure; see the decision log for why this direction gives another value
    assert abs(cert.value - (-0.494)) < 5e-3


# -- 12 ----------------------------------------------------------------------

GRID_N6 = {
    "equator6": "GM S S S",
    "one5": "- S S S",
    "one41": "- GM S S",
    "three3": "- S S S",
    "real1": "- - SM S",
    "real2": "- - S S",
    "real3": "- - S S",
    "real4": "- - GM S",
    "simplex5": "- - - GM",
}


@crit(12, "classification grid and optima for n = 4, 5, 6")
def test_grid_n6():
    grid = classification_grid(6, [2, 3, 4, 5])
    assert {k: " ".join(v[d] for d in (2, 3, 4, 5)) for k, v in grid.items()} == GRID_N6


@crit(12, "classification grid and optima for n = 4, 5, 6")
def test_optima_n4_n5():
    g4 = classification_grid(4)
    assert g4["equator4"][2] == "GM" and g4["tetrahedron"][3] == "GM"
    g5 = classification_grid(5)
    assert g5["equator5"][2] == "GM" and g5["one31"][3] == "GM" and g5["simplex4"][4] == "GM"
    assert [k for k, v in g5.items() if v[3] == "GM"] == ["one31"]


# -- 13 ----------------------------------------------------------------------

RADICANDS = st.sampled_from([(5,), (6,), (-1, 5), (2, 3, 5)])


@st.composite
def tower_triples(draw):
    rad = draw(RADICANDS)
    field = TowerField(rad)
    q = st.fractions(min_value=-20, max_value=20, max_denominator=12)

    basis = [field.one()]
    for j in range(len(field.radicands)):
        basis += [b * field.gen(j) for b in basis]

    def elt():
        out = field.zero()
        for b in basis:
            out = out + b * draw(q)
        return out

    return elt(), elt(), elt()


@crit(13, "property suites")
@settings(max_examples=40, deadline=None)
@given(tower_triples())
def test_prop_field_axioms(t):
    a, b, c = t
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a
    if not a.is_zero():
        assert a * a.inverse() == 1
        assert numeric_value(a * a.inverse()).contains(1)


@crit(13, "property suites")
def test_prop_reduce_idempotent_and_spairs(basis_n4):
    gb, _ = basis_n4
    for g in build_system(4).generators:
        assert reduce(g, gb.basis).is_zero()
    for f1, f2 in itertools.combinations(gb.basis, 2):
        r = reduce(s_polynomial(f1, f2), gb.basis)
        assert r.is_zero()
        assert reduce(r, gb.basis) == r


@crit(13, "property suites")
def test_prop_spairs_n5(basis_n5):
    gb, _ = basis_n5
    pairs = list(itertools.combinations(range(len(gb)), 2))
    rng = np.random.default_rng(7)
    for k in rng.choice(len(pairs), size=60, replace=False):
        i, j = pairs[k]
        assert reduce(s_polynomial(gb.basis[i], gb.basis[j]), gb.basis).is_zero()


@crit(13, "property suites")
@pytest.mark.parametrize("name", CANDIDATE_NAMES)
def test_prop_kernel_and_orbit(name):
    c = get_candidate(name)
    for row in c.entries:
        s = row[0]
        for e in row[1:]:
            s = s + e
        assert s == 0
    o = orbit(c)
    assert o.stabilizer_size * o.orbit_size == factorial(c.n)


@crit(13, "property suites")
@settings(max_examples=15, deadline=None)
@given(st.sampled_from([c.name for c in _real_psd()]), st.integers(0, 3), st.integers(0, 2**31))
def test_prop_hessian_zero_multiplicity(name, extra, seed):
    c = get_candidate(name)
    d = min(gram_spectrum(c).rank + extra, c.n - 1)
    d = max(d, gram_spectrum(c).rank)
    emb = embed(c, d)
    H = hessian_blocks(emb.W)
    a = np.linalg.eigvalsh(project_tangent(H, emb.W).matrix)
    b = np.linalg.eigvalsh(project_tangent(H, emb.W, np.random.default_rng(seed)).matrix)
    assert np.abs(a - b).max() < 1e-9
    r = gram_spectrum(c).rank
    zeros = int((np.abs(a) < 1e-8).sum())
    # rotations of the orthogonal complement fix every point, so only
    # dim O(d) - dim O(d - r) of them move the configuration
    assert zeros >= d * (d - 1) // 2 - (d - r) * (d - r - 1) // 2
    if d <= r + 1:
        assert zeros >= d * (d - 1) // 2


@crit(13, "property suites")
def test_prop_zero_multiplicity_low_rank():
    # a planar configuration placed in R^4 keeps one fewer rotational zero
    spec = hessian_spectrum(get_candidate("equator5"), 4)
    zeros = sum(e.multiplicity for e in spec if e.exact == 0)
    assert zeros == 4 * 3 // 2 - 1


@crit(13, "property suites")
@pytest.mark.parametrize("name", ["tetrahedron", "one31", "real3"])
def test_prop_finite_difference(name):
    c = get_candidate(name)
    emb = embed(c, c.n - 1)
    assert np.abs(finite_difference_hessian(emb.W, 1e-5) - hessian_blocks(emb.W)).max() < 1e-5


@crit(13, "property suites")
def test_prop_gradient_residual():
    for c in _real_psd():
        emb = embed(c, c.n - 1)
        assert np.abs(lagrangian_gradient(emb.W)).max() <= 1e-10, c.name
