"""Buchberger's algorithm over Q with Gebauer-Moeller pair criteria.

Internally monomials are packed into Python ints, 8 bits per variable with a
guard bit, so multiplication is addition and divisibility is one subtraction.
Polynomials are ``dict[order_key, int]``; the order key is an affine function
of the packed monomial, so shifting a polynomial by a monomial shifts every
key by the same amount.  Coefficients are integers, kept primitive.
"""

from __future__ import annotations

import heapq
import math
import resource
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .multipoly import BlockElimination, Grevlex, MonomialOrder, MultiPoly, VariableTable, grevlex

__all__ = [
    "BudgetExceeded",
    "NotZeroDimensional",
    "Budget",
    "GroebnerStats",
    "GroebnerBasis",
    "DegreeReport",
    "buchberger",
    "finiteness_test",
    "ideal_degree",
    "standard_monomials",
    "eliminate_to_univariate",
    "minimal_polynomial",
    "squarefree_part",
    "s_polynomial",
]

_BITS = 8
_FMASK = (1 << _BITS) - 1
_MAXEXP = 127


class BudgetExceeded(RuntimeError):
    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = stats


class NotZeroDimensional(ValueError):
    pass


@dataclass
class Budget:
    seconds: float | None = None
    memory_mb: float | None = None

    def check(self, started: float, stats: "GroebnerStats"):
        if self.seconds is not None and time.perf_counter() - started > self.seconds:
            raise BudgetExceeded(f"time budget of {self.seconds:g} s exceeded", stats)
        if self.memory_mb is not None:
            rss_mb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024
            if rss_mb > self.memory_mb:
                raise BudgetExceeded(f"memory budget of {self.memory_mb:g} MB exceeded", stats)


@dataclass
class GroebnerStats:
    pairs_processed: int = 0
    zero_reductions: int = 0
    pairs_skipped: int = 0
    max_basis_size: int = 0
    tail_updates: int = 0
    seconds: float = 0.0


@dataclass
class GroebnerBasis:
    basis: list[MultiPoly]
    order: MonomialOrder
    vars: VariableTable
    stats: GroebnerStats = field(default_factory=GroebnerStats)

    def __len__(self):
        return len(self.basis)

    def leading_monomials(self) -> list[tuple]:
        return [g.leading_monomial for g in self.basis]


@dataclass
class DegreeReport:
    is_zero_dimensional: bool
    degree: int | None = None


# ---------------------------------------------------------------------------
# packed monomial arithmetic


class _Packing:
    def __init__(self, nvars: int, order: MonomialOrder):
        self.n = nvars
        self.guard = sum(0x80 << (_BITS * i) for i in range(nvars))
        self.ones = sum(1 << (_BITS * i) for i in range(nvars))
        self.width = _BITS * nvars
        if isinstance(order, Grevlex):
            self.blocks = [tuple(range(nvars))]
        elif isinstance(order, BlockElimination):
            front = set(order.front)
            self.blocks = [tuple(sorted(front)), tuple(i for i in range(nvars) if i not in front)]
            self.blocks = [b for b in self.blocks if b]
        else:
            raise TypeError(f"unsupported order {order!r}")
        self.masks = [sum(_FMASK << (_BITS * i) for i in b) for b in self.blocks]
        self.maxf = [sum(_MAXEXP << (_BITS * i) for i in b) for b in self.blocks]
        # key = sum over blocks (descending significance) of ((deg_b << W) + maxf_b - a_b) << offset_b
        self.block_width = self.width + 8
        self.offsets = [self.block_width * (len(self.blocks) - 1 - k) for k in range(len(self.blocks))]
        self.key0 = self.key(0)

    def pack(self, exps) -> int:
        a = 0
        for i, e in enumerate(exps):
            if e > _MAXEXP:
                raise OverflowError("exponent too large for packed monomials")
            a |= e << (_BITS * i)
        return a

    def unpack(self, a: int) -> tuple:
        return tuple((a >> (_BITS * i)) & _FMASK for i in range(self.n))

    def degree(self, a: int) -> int:
        return ((a * self.ones) >> (_BITS * (self.n - 1))) & _FMASK

    def key(self, a: int) -> int:
        k = 0
        for mask, maxf, off in zip(self.masks, self.maxf, self.offsets):
            ab = a & mask
            deg = ((ab * self.ones) >> (_BITS * (self.n - 1))) & _FMASK
            k += ((deg << self.width) + maxf - ab) << off
        return k

    def unkey(self, k: int) -> int:
        a = 0
        low = (1 << self.width) - 1
        for mask, maxf, off in zip(self.masks, self.maxf, self.offsets):
            part = (k >> off) & ((1 << self.block_width) - 1)
            a |= (maxf - (part & low)) & mask
        return a

    def divides(self, a: int, b: int) -> bool:
        return ((b | self.guard) - a) & self.guard == self.guard

    def lcm(self, a: int, b: int) -> int:
        ge = (((a | self.guard) - b) & self.guard) >> 7
        m = ge * _FMASK
        return (a & m) | (b & ~m)

    def coprime(self, a: int, b: int) -> bool:
        return self.lcm(a, b) == a + b


class _Poly:
    """Internal polynomial: list of (key, coeff) sorted by key descending."""

    __slots__ = ("terms", "lm", "lk", "lc", "sugar")

    def __init__(self, terms, pk: _Packing):
        self.terms = terms
        self.lk = terms[0][0]
        self.lc = terms[0][1]
        self.lm = pk.unkey(self.lk)


def _primitive(terms):
    g = 0
    for _, c in terms:
        g = math.gcd(g, c)
        if g == 1:
            break
    if terms[0][1] < 0:
        g = -g
    if g != 1:
        terms = [(k, c // g) for k, c in terms]
    return terms


def _to_internal(p: MultiPoly, pk: _Packing):
    den = 1
    for _, c in p.items():
        den = math.lcm(den, Fraction(c).denominator)
    terms = [(pk.key(pk.pack(m)), int(Fraction(c) * den)) for m, c in p.items()]
    terms.sort(reverse=True)
    return terms


def _reduce_internal(terms, basis: list[_Poly], pk: _Packing):
    """Fully reduce a sorted (key, coeff) list by ``basis``; returns primitive terms."""
    f = dict(terms)
    heap = [-k for k, _ in terms]
    heapq.heapify(heap)
    rem: list[tuple[int, int]] = []
    scaled = 0
    unkey = pk.unkey
    guard = pk.guard
    while heap:
        if scaled >= 8:
            # strip the content accumulated by fraction-free scaling
            scaled = 0
            g_all = 0
            for cc in f.values():
                g_all = math.gcd(g_all, cc)
                if g_all == 1:
                    break
            for _, cc in rem:
                if g_all == 1:
                    break
                g_all = math.gcd(g_all, cc)
            if g_all > 1:
                for kk in f:
                    f[kk] //= g_all
                rem = [(kk, cc // g_all) for kk, cc in rem]
        k = -heapq.heappop(heap)
        c = f.pop(k, 0)
        if not c:
            continue
        m = unkey(k)
        for g in basis:
            if ((m | guard) - g.lm) & guard == guard:
                break
        else:
            rem.append((k, c))
            continue
        gc = g.lc
        d = math.gcd(c, gc)
        mul_f, mul_g = gc // d, c // d
        if mul_f < 0:
            mul_f, mul_g = -mul_f, -mul_g
        if mul_f != 1:
            for kk in f:
                f[kk] *= mul_f
            rem = [(kk, cc * mul_f) for kk, cc in rem]
            scaled += 1
        # key(t * g_i) = key(g_i) + k - key(lm g) since keys are affine
        shift = k - g.lk
        it = iter(g.terms)
        next(it)
        for gk, gcf in it:
            nk = gk + shift
            v = f.get(nk)
            if v is None:
                f[nk] = -mul_g * gcf
                heapq.heappush(heap, -nk)
            else:
                v -= mul_g * gcf
                if v:
                    f[nk] = v
                else:
                    del f[nk]
    if not rem:
        return []
    return _primitive(rem)


def _monic_mod(terms, p: int):
    inv = pow(terms[0][1], -1, p)
    return [(k, c * inv % p) for k, c in terms]


def _reduce_mod(terms, basis: list[_Poly], pk: _Packing, p: int):
    """Full reduction with coefficients in Z/p; basis elements are monic."""
    f = {k: c % p for k, c in terms if c % p}
    heap = [-k for k in f]
    heapq.heapify(heap)
    rem: list[tuple[int, int]] = []
    unkey = pk.unkey
    guard = pk.guard
    while heap:
        k = -heapq.heappop(heap)
        c = f.pop(k, 0)
        if not c:
            continue
        m = unkey(k)
        for g in basis:
            if ((m | guard) - g.lm) & guard == guard:
                break
        else:
            rem.append((k, c))
            continue
        shift = k - g.lk
        it = iter(g.terms)
        next(it)
        for gk, gcf in it:
            nk = gk + shift
            v = f.get(nk)
            if v is None:
                f[nk] = -c * gcf % p
                heapq.heappush(heap, -nk)
            else:
                v = (v - c * gcf) % p
                if v:
                    f[nk] = v
                else:
                    del f[nk]
    if not rem:
        return []
    return _monic_mod(rem, p)


def _spoly_mod(f: _Poly, g: _Poly, lk: int, p: int):
    tf = lk - f.lk
    tg = lk - g.lk
    acc: dict[int, int] = {}
    for k, c in f.terms[1:]:
        acc[k + tf] = c
    for k, c in g.terms[1:]:
        nk = k + tg
        v = (acc.get(nk, 0) - c) % p
        if v:
            acc[nk] = v
        else:
            acc.pop(nk, None)
    return sorted(acc.items(), reverse=True)


def _check_budget(budget, started, stats, counter):
    if budget is not None and counter % 16 == 0:
        budget.check(started, stats)


def buchberger(
    generators,
    order: MonomialOrder = grevlex,
    budget: Budget | None = None,
    strategy: str = "normal",
    modulus: int | None = None,
) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal generated by ``generators``.

    Pairs are selected by smallest lcm (``strategy="sugar"`` ranks by sugar
    degree first, then lcm), with the Gebauer-Moeller
    refinement of Buchberger's product and chain criteria.
    The output is reduced, primitive over Z with positive leading coefficient,
    and sorted by leading monomial, so it does not depend on input order.

    With ``modulus`` set, coefficients live in Z/p instead and the basis is
    monic; this is a fast cross-check, not a substitute for the rational run.
    """
    gens = [g for g in generators if not g.is_zero()]
    if not gens:
        raise ValueError("no nonzero generators")
    vars_ = gens[0].vars
    if any(g.vars is not vars_ for g in gens):
        raise ValueError("generators over different variable tables")
    pk = _Packing(len(vars_), order)
    if modulus is None:
        red, spoly, norm = _reduce_internal, _spoly, _primitive
    else:
        p = modulus

        def red(terms, basis, pk_):
            return _reduce_mod(terms, basis, pk_, p)

        def spoly(f, g, lk, pk_):
            return _spoly_mod(f, g, lk, p)

        def norm(terms):
            terms = [(k, c % p) for k, c in terms if c % p]
            return _monic_mod(terms, p) if terms else []

    started = time.perf_counter()
    stats = GroebnerStats()

    polys: list[_Poly] = []
    sugar: list[int] = []
    active: list[int] = []
    pairs: list[tuple[int, int, int, int, int]] = []  # (priority, lcm key, tie, i, j)
    tie = 0

    def priority(i: int, j: int, l: int) -> int:
        if strategy == "normal":
            return 0
        dl = pk.degree(l)
        return max(sugar[i] + dl - pk.degree(polys[i].lm), sugar[j] + dl - pk.degree(polys[j].lm))

    def update(h_idx: int):
        nonlocal pairs, active, tie
        h = polys[h_idx]
        # Gebauer-Moeller UPDATE
        cands = [(g, pk.lcm(polys[g].lm, h.lm)) for g in active]
        kept: list[tuple[int, int]] = []
        for a, (g, l) in enumerate(cands):
            if pk.coprime(polys[g].lm, h.lm):
                kept.append((g, l))
                continue
            later = any(pk.divides(l2, l) for _, l2 in cands[a + 1 :])
            earlier = any(pk.divides(l2, l) for _, l2 in kept)
            if not later and not earlier:
                kept.append((g, l))
        new_pairs = [(g, l) for g, l in kept if not pk.coprime(polys[g].lm, h.lm)]
        stats.pairs_skipped += len(cands) - len(new_pairs)
        filtered = []
        for entry in pairs:
            _, lk, _, i, j = entry
            l = pk.unkey(lk)
            if (
                pk.divides(h.lm, l)
                and pk.lcm(polys[i].lm, h.lm) != l
                and pk.lcm(polys[j].lm, h.lm) != l
            ):
                stats.pairs_skipped += 1
                continue
            filtered.append(entry)
        for g, l in new_pairs:
            tie += 1
            filtered.append((priority(g, h_idx, l), pk.key(l), tie, g, h_idx))
        heapq.heapify(filtered)
        pairs = filtered
        active = [g for g in active if not pk.divides(h.lm, polys[g].lm)]
        active.append(h_idx)
        stats.max_basis_size = max(stats.max_basis_size, len(active))

    def active_polys():
        return [polys[i] for i in active]

    def retail(h_idx: int):
        # keep tails reduced: stale tails are where rational coefficients swell
        hl = polys[h_idx].lm
        guard = pk.guard
        for g_idx in active:
            if g_idx == h_idx:
                continue
            g = polys[g_idx]
            if any(((pk.unkey(k) | guard) - hl) & guard == guard for k, _ in g.terms[1:]):
                others = [polys[a] for a in active if a != g_idx]
                polys[g_idx] = _Poly(red(g.terms, others, pk), pk)
                stats.tail_updates += 1

    # feed generators, smallest first
    internal = sorted((_to_internal(g, pk) for g in gens), key=lambda t: t[0][0])
    for terms in internal:
        r = red(terms, active_polys(), pk) if active else norm(terms)
        if r:
            sugar.append(max(pk.degree(pk.unkey(k)) for k, _ in terms))
            polys.append(_Poly(r, pk))
            update(len(polys) - 1)

    counter = 0
    while pairs:
        counter += 1
        _check_budget(budget, started, stats, counter)
        s_sugar, lk, _, i, j = heapq.heappop(pairs)
        stats.pairs_processed += 1
        s = spoly(polys[i], polys[j], lk, pk)
        if not s:
            stats.zero_reductions += 1
            continue
        r = red(s, active_polys(), pk)
        if not r:
            stats.zero_reductions += 1
            continue
        sugar.append(max(s_sugar, max(pk.degree(pk.unkey(k)) for k, _ in r)))
        polys.append(_Poly(r, pk))
        update(len(polys) - 1)
        retail(len(polys) - 1)

    basis = _interreduce(active_polys(), pk, red, norm)
    stats.seconds = time.perf_counter() - started
    out = [_to_multipoly(b.terms, vars_, order, pk) for b in basis]
    return GroebnerBasis(out, order, vars_, stats)


def _spoly(f: _Poly, g: _Poly, lk: int, pk: _Packing):
    tf = lk - f.lk
    tg = lk - g.lk
    d = math.gcd(f.lc, g.lc)
    af, ag = g.lc // d, f.lc // d
    acc: dict[int, int] = {}
    for k, c in f.terms[1:]:
        acc[k + tf] = af * c
    for k, c in g.terms[1:]:
        nk = k + tg
        v = acc.get(nk, 0) - ag * c
        if v:
            acc[nk] = v
        else:
            acc.pop(nk, None)
    return sorted(acc.items(), reverse=True)


def _interreduce(polys: list[_Poly], pk: _Packing, red=None, norm=_primitive) -> list[_Poly]:
    red = red or _reduce_internal
    polys = sorted(polys, key=lambda p: p.lk)
    minimal: list[_Poly] = []
    for p in polys:
        if not any(pk.divides(q.lm, p.lm) for q in minimal):
            minimal.append(p)
    out = []
    for idx, p in enumerate(minimal):
        # the head is irreducible by the others, so full reduction only touches the tail
        others = minimal[:idx] + minimal[idx + 1 :]
        terms = red(p.terms, others, pk) if others else norm(p.terms)
        out.append(_Poly(terms, pk))
    return sorted(out, key=lambda p: p.lk, reverse=True)


def _to_multipoly(terms, vars_, order, pk) -> MultiPoly:
    return MultiPoly(vars_, {pk.unpack(pk.unkey(k)): c for k, c in terms}, order)


# ---------------------------------------------------------------------------
# zero-dimensional ideals


def finiteness_test(gb: GroebnerBasis) -> bool:
    """True iff every variable has a pure power among the leading monomials."""
    n = len(gb.vars)
    covered = set()
    for m in gb.leading_monomials():
        nz = [i for i, e in enumerate(m) if e]
        if len(nz) == 1:
            covered.add(nz[0])
    return len(covered) == n


def standard_monomials(gb: GroebnerBasis, limit: int = 10**6) -> list[tuple]:
    """Monomials outside the leading-term ideal, in increasing order."""
    if not finiteness_test(gb):
        raise NotZeroDimensional("ideal is not zero-dimensional")
    leads = gb.leading_monomials()
    n = len(gb.vars)

    def standard(m):
        return not any(all(a <= b for a, b in zip(lm, m)) for lm in leads)

    zero = (0,) * n
    if not standard(zero):
        return []
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for m in frontier:
            for i in range(n):
                e = list(m)
                e[i] += 1
                t = tuple(e)
                if t not in seen and standard(t):
                    seen.add(t)
                    nxt.append(t)
        if len(seen) > limit:
            raise RuntimeError("standard monomial enumeration exceeded limit")
        frontier = nxt
    return sorted(seen, key=gb.order.key)


def ideal_degree(gb: GroebnerBasis) -> DegreeReport:
    if not finiteness_test(gb):
        raise NotZeroDimensional("ideal is not zero-dimensional")
    return DegreeReport(True, len(standard_monomials(gb)))


def s_polynomial(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    lf, lg = f.leading_monomial, g.leading_monomial
    lcm = tuple(max(a, b) for a, b in zip(lf, lg))
    tf = MultiPoly.monomial(f.vars, tuple(a - b for a, b in zip(lcm, lf)), 1, f.order)
    tg = MultiPoly.monomial(f.vars, tuple(a - b for a, b in zip(lcm, lg)), 1, f.order)
    return tf * f * Fraction(g.leading_coeff) - tg * g * Fraction(f.leading_coeff)


# ---------------------------------------------------------------------------
# elimination and univariate helpers


def eliminate_to_univariate(generators, keep: str, budget: Budget | None = None) -> MultiPoly:
    """Monic generator of I ∩ Q[keep] via a block elimination order."""
    vars_ = generators[0].vars
    k = vars_.resolve(keep)
    order = BlockElimination([i for i in range(len(vars_)) if i != k])
    gb = buchberger([g.with_order(order) for g in generators], order, budget)
    uni = [g for g in gb.basis if g.variables_used() in ([], [vars_.names[k]])]
    uni = [g for g in uni if g.total_degree() > 0]
    if not uni:
        raise NotZeroDimensional(f"no univariate polynomial in {keep}")
    if len(uni) != 1:
        raise RuntimeError("reduced basis has several univariate elements")
    return uni[0].with_order(grevlex).monic()


def minimal_polynomial(gb: GroebnerBasis, name: str) -> MultiPoly:
    """Minimal polynomial of multiplication by ``name`` on Q[vars]/I.

    Independent route to the generator of I ∩ Q[name] for zero-dimensional I,
    using only normal forms modulo a grevlex basis.
    """
    from .multipoly import reduce

    vars_ = gb.vars
    basis_monos = standard_monomials(gb)
    index = {m: i for i, m in enumerate(basis_monos)}
    x = MultiPoly.variable(vars_, name, gb.order)
    idx = vars_.resolve(name)

    # incremental elimination: each stored row is (pivot, vector, combination of powers)
    rows: list[tuple[int, list[Fraction], list[Fraction]]] = []
    power = MultiPoly.constant(vars_, 1, gb.order)
    d = 0
    while True:
        v = [Fraction(0)] * len(basis_monos)
        for m, c in power.items():
            v[index[m]] = Fraction(c)
        combo = [Fraction(0)] * (d + 1)
        combo[d] = Fraction(1)
        for piv, rv, rc in rows:
            c = v[piv]
            if c:
                v = [a - c * b for a, b in zip(v, rv)]
                combo = [a - c * b for a, b in zip(combo, rc + [Fraction(0)] * (len(combo) - len(rc)))]
        piv = next((i for i, c in enumerate(v) if c), None)
        if piv is None:
            lead = combo[-1]
            terms = {}
            for e, c in enumerate(combo):
                if c:
                    mono = [0] * len(vars_)
                    mono[idx] = e
                    terms[tuple(mono)] = c / lead
            return MultiPoly(vars_, terms, grevlex)
        inv = 1 / v[piv]
        rows.append((piv, [c * inv for c in v], [c * inv for c in combo]))
        power = reduce(power * x, gb.basis, gb.order)
        d += 1


def _upoly_from(p: MultiPoly) -> tuple[list[Fraction], int]:
    used = p.variables_used()
    if len(used) > 1:
        raise ValueError("not univariate")
    idx = p.vars.resolve(used[0]) if used else 0
    deg = max((m[idx] for m, _ in p.items()), default=0)
    coeffs = [Fraction(0)] * (deg + 1)
    for m, c in p.items():
        coeffs[m[idx]] += Fraction(c)
    return coeffs, idx


def squarefree_part(p: MultiPoly) -> MultiPoly:
    """p / gcd(p, p'), primitive over Z with positive leading coefficient."""
    from ._linalg import upoly_derivative, upoly_divmod, upoly_gcd

    if p.is_zero():
        raise ValueError("zero polynomial")
    coeffs, idx = _upoly_from(p)
    g = upoly_gcd(coeffs, upoly_derivative(coeffs))
    q, r = upoly_divmod(coeffs, g)
    assert not any(r)
    terms = {}
    for d, c in enumerate(q):
        if c:
            e = [0] * len(p.vars)
            e[idx] = d
            terms[tuple(e)] = c
    return MultiPoly(p.vars, terms, p.order).primitive()
