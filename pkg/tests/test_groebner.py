import itertools

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from fekete.catalog import candidates_for
from fekete.critverify import assignment
from fekete.feketesys import build_system
from fekete.groebner import (
    Budget,
    BudgetExceeded,
    NotZeroDimensional,
    buchberger,
    eliminate_to_univariate,
    finiteness_test,
    ideal_degree,
    minimal_polynomial,
    s_polynomial,
    squarefree_part,
)
from fekete.multipoly import MultiPoly, VariableTable, reduce


def _sympy_basis(polys):
    names = polys[0].vars.names
    syms = sympy.symbols(list(names))
    loc = dict(zip(names, syms))
    exprs = [sympy.sympify(str(p).replace("^", "**"), locals=loc) for p in polys]
    G = sympy.groebner(exprs, *syms, order="grevlex")
    return {_monic(g, syms) for g in G.exprs}, syms, loc


def _monic(expr, syms):
    return sympy.expand(expr / sympy.LC(expr, *syms, order="grevlex"))


def _ours_monic(gb, loc, syms):
    return {_monic(sympy.sympify(str(g).replace("^", "**"), locals=loc), syms) for g in gb.basis}


def test_n4_basis_matches_sympy():
    s = build_system(4)
    gb = buchberger(s.generators)
    want, syms, loc = _sympy_basis(s.generators)
    assert _ours_monic(gb, loc, syms) == want


def test_basis_is_independent_of_input_order():
    gens = build_system(4).generators
    a = buchberger(gens)
    b = buchberger(list(reversed(gens)))
    assert a.basis == b.basis


def test_strategies_agree():
    gens = build_system(4).generators
    assert buchberger(gens, strategy="sugar").basis == buchberger(gens).basis


V3 = VariableTable(["u", "v", "w"])
small = st.integers(-3, 3)
mono = st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 1))


@st.composite
def ideals(draw):
    out = []
    for _ in range(draw(st.integers(2, 3))):
        terms = draw(st.dictionaries(mono, small, min_size=1, max_size=4))
        p = MultiPoly(V3, {m: c for m, c in terms.items() if c})
        if not p.is_zero():
            out.append(p)
    return out


@settings(max_examples=25, deadline=None)
@given(ideals())
def test_random_ideals_match_sympy(gens):
    if not gens:
        return
    gb = buchberger(gens)
    want, syms, loc = _sympy_basis(gens)
    assert _ours_monic(gb, loc, syms) == want
    for f, g in itertools.combinations(gb.basis, 2):
        assert reduce(s_polynomial(f, g), gb.basis).is_zero()


def test_elimination_routes_agree_n4():
    s = build_system(4)
    elim = eliminate_to_univariate(s.generators, "x12")
    mp = minimal_polynomial(buchberger(s.generators), "x12")
    assert elim == mp
    sf = squarefree_part(mp)
    roots = sympy.roots(sympy.sympify(str(sf).replace("^", "**")))
    assert set(roots) == {0, -1, sympy.Rational(-1, 3)}


def test_n4_catalog_values_are_roots():
    gb = buchberger(build_system(4).generators)
    mp = minimal_polynomial(gb, "x12")
    for c in candidates_for(4):
        a = assignment(c)
        assert mp.evaluate({k: (a["x12"] if k == "x12" else 0) for k in mp.vars.names}) == 0


def test_modular_cross_check():
    gens = build_system(4).generators
    gp = buchberger(gens, modulus=32003)
    gq = buchberger(gens)
    assert gp.leading_monomials() == gq.leading_monomials()
    assert ideal_degree(gp).degree == 4


def test_positive_dimensional_is_detected():
    gens = [MultiPoly.parse("u*v - w", V3)]
    gb = buchberger(gens)
    assert not finiteness_test(gb)
    with pytest.raises(NotZeroDimensional):
        ideal_degree(gb)


def test_budget_exceeded_carries_stats():
    with pytest.raises(BudgetExceeded) as err:
        buchberger(build_system(5).generators, budget=Budget(seconds=0.5))
    assert err.value.stats is not None
    assert err.value.stats.pairs_processed >= 0


def test_n5_minimal_polynomial_vanishes_on_catalog(basis_n5):
    gb, _ = basis_n5
    mp = minimal_polynomial(gb, "x45")
    zeros = {k: 0 for k in mp.vars.names}
    # every solution is a relabelling of a catalog entry, so the distinct
    # values of x45 over V(I) are exactly the distinct off-diagonal entries
    values = {x for c in candidates_for(5) for _, _, x in c.off_diagonal()}
    sf = squarefree_part(mp)
    for v in values:
        assert sf.evaluate({**zeros, "x45": v}) == 0
    assert sf.total_degree() == len(values) == 8
    assert mp.total_degree() <= 38
