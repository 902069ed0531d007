from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from toroidal_ff import root_data as rd
from toroidal_ff.ope import (
    GHOST,
    W,
    Z,
    Boson,
    DistExpr,
    EngineError,
    FieldExpr,
    Gen,
    canonicalize,
    commute_into_dist,
    expand_bilinear,
    linear_commutator,
    ope_product,
    pairing,
    parity_of,
    quad,
    quad_pairing,
    super_commutator,
    weight_of,
)
from toroidal_ff.realization import build_table

HALF = Fraction(1, 2)
CB, CBS = Gen(0), Gen(0, True)


def e(i, starred=False):
    return Gen(i, starred)


def beta(n):
    return Boson(rd.beta(n))


# -- pairing and canonical order ------------------------------------------------


def test_pairing_examples():
    assert pairing(e(1, True), e(1)) == 1
    assert pairing(e(1), e(1, True)) == -1
    assert pairing(beta(2), beta(2).star()) == -1
    assert pairing(GHOST, GHOST) == 1
    assert pairing(GHOST, e(1)) == 0
    assert pairing(CB, CBS) == 0
    assert pairing(e(1), e(2, True)) == 0


def test_canonicalize_examples():
    n = 2
    sign, word = canonicalize(((GHOST, Z), (e(n), W)))
    assert (sign, word) == (1, ((e(n), W), (GHOST, Z)))
    assert canonicalize(((GHOST, Z), (GHOST, W))) == (-1, ((GHOST, W), (GHOST, Z)))
    assert canonicalize(((GHOST, W), (GHOST, W))) == (0, None)
    assert canonicalize(((e(1), W), (e(1), W))) == (1, ((e(1), W), (e(1), W)))


def test_expand_bilinear_examples():
    n = 2
    b, bs = beta(n), beta(n).star()
    half_sq = quad(n, bs, bs, HALF)
    assert half_sq.terms == {(e(1, True), e(1, True)): HALF, (CBS, e(1, True)): -HALF, (CBS, CBS): Fraction(1, 8)}
    plain = quad(n, e(1), e(2, True))
    assert plain.terms == {(e(1), e(2, True)): 1}
    a0 = quad(n, bs, b, -2)
    assert a0.terms == {(e(1), e(1, True)): -2, (CB, e(1, True)): 1, (CBS, e(1)): 1, (CB, CBS): -HALF}


def test_ghost_square_vanishes_and_parity_is_checked():
    assert quad(1, GHOST, GHOST).is_zero()
    with pytest.raises(ValueError):
        FieldExpr(1, {(e(1), e(1, True)): 1, (e(1), GHOST): 1})


# -- OPE products ---------------------------------------------------------------


def test_ope_product_cartan_current():
    n = 3
    a = quad(n, e(n), e(n, True))
    p = ope_product(a, a)
    assert p.order1 == {((e(n), W), (e(n, True), Z)): -1, ((e(n), Z), (e(n, True), W)): 1}
    assert p.order2 == -1


def test_ope_product_beta_squares():
    n = 2
    b, bs = beta(n), beta(n).star()
    p = ope_product(quad(n, bs, bs), quad(n, b, b))
    expected = {}
    for gx, cx in ((e(1, True), 1), (CBS, -HALF)):
        for gy, cy in ((e(1), 1), (CB, -HALF)):
            sign, word = canonicalize(((gx, Z), (gy, W)))
            expected[word] = expected.get(word, 0) + 4 * cx * cy * sign
    assert p.order1 == expected
    assert p.order2 == 2


def test_ope_product_orthogonal():
    n = 4
    p = ope_product(quad(n, e(1), e(2, True)), quad(n, e(3), e(4, True)))
    assert p.order1 == {} and p.order2 == 0
    with pytest.raises(ValueError):
        ope_product(quad(n, e(1), e(2, True)), quad(n, e(1), e(2, True)), Z, Z)


# -- super-commutators ------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3])
def test_documented_brackets(n):
    t = build_table(n)
    en, ens = e(n), e(n, True)
    assert super_commutator(t.alpha(n), t.alpha(n)) == DistExpr.derivative(n, -1)
    ef = super_commutator(t.xp(n), t.xm(n))
    assert ef == DistExpr.from_field(quad(n, en, ens), coef=-2) + DistExpr.derivative(n, 2)
    assert ef.render() == f"2 d_w delta(z-w) - 2 :eps{n}(w)eps{n}*(w): delta(z-w)"
    assert super_commutator(t.xp(n), t.xp(n)) == DistExpr.from_field(quad(n, en, en, 2))
    assert super_commutator(t.alpha(0), t.alpha(0)) == DistExpr.derivative(n, -4)


def test_bracket_of_odd_currents_is_an_anticommutator():
    t = build_table(2)
    d = super_commutator(t.xp(2), t.xm(2))
    assert d.parity is rd.Parity.EVEN and d.root2 == 0
    mixed = super_commutator(t.alpha(2), t.xp(2))
    assert mixed.parity is rd.Parity.ODD and mixed.root2 == 1


def test_commute_into_dist_serre_examples():
    n = 3
    t = build_table(n)
    inner = super_commutator(t.xp(n - 1), t.xp(n), z=1)
    assert commute_into_dist(t.xp(n - 1), inner, 2).is_zero()
    d = super_commutator(t.xp(n), t.xp(n - 1), z=1)
    d = commute_into_dist(t.xp(n), d, 2)
    assert commute_into_dist(t.xp(n), d, 3).is_zero()
    assert commute_into_dist(t.alpha(1), DistExpr.derivative(n, 5, 1), 2).is_zero()
    with pytest.raises(ValueError):
        commute_into_dist(t.alpha(1), inner, 1)


def test_quad_pairing_examples():
    assert quad_pairing((e(1), e(2)), (e(1, True), e(2, True))) == -1
    b = beta(2)
    assert quad_pairing((b, b), (b.star(), b.star())) == 0
    assert quad_pairing((e(1), e(1)), (e(2), e(2))) == 0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_weights_and_parities_of_currents(n):
    t = build_table(n)
    for i in range(n + 1):
        assert weight_of(t.xp(i)) == rd.simple_root(i, n)
        assert weight_of(t.xm(i)) == -rd.simple_root(i, n)
        assert weight_of(t.alpha(i)).is_zero()
        assert parity_of(t.xp(i)) == rd.parity(i, n) == parity_of(t.xm(i))


def test_central_fields_commute_with_every_current():
    n = 2
    t = build_table(n)
    for _, _, f in t.rows():
        for g in (CB, CBS):
            assert linear_commutator(g, f) == {}
            assert super_commutator(quad(n, g, e(1)), f).modulo_center() == super_commutator(
                quad(n, g, e(1)), f
            ).modulo_center()


def test_distexpr_restrictions():
    with pytest.raises(EngineError):
        DistExpr(1, {((e(1), e(1, True)), ((Z, 1),)): 1})
    with pytest.raises(EngineError):
        DistExpr(1, {(None, ((Z, 1), (2, 1))): 1})


# -- properties -------------------------------------------------------------------

N = 3
labels = st.integers(0, N)
gens = st.one_of(st.builds(Gen, labels, st.booleans()), st.just(GHOST))
lattice = st.dictionaries(labels, st.integers(-3, 3).map(Fraction), min_size=1, max_size=3).filter(
    lambda d: any(d.values())
)
vectors = lattice.map(lambda d: rd.WeightVector.from_map(N, d))
symbols = st.one_of(gens, st.builds(Boson, vectors, st.booleans()))


def _is_bosonic(x):
    return isinstance(x, Boson) or not x.is_ghost


@given(symbols, symbols)
def test_pairing_antisymmetry(x, y):
    if _is_bosonic(x) and _is_bosonic(y):
        assert pairing(x, y) == -pairing(y, x)
    elif not _is_bosonic(x) and not _is_bosonic(y):
        assert pairing(x, y) == 1
    else:
        assert pairing(x, y) == 0


def proposition_value(n, a1, a2, b1, b2):
    """[:a1 a2*:(z), :b1 b2*:(w)] from the bosonic commutator formula."""
    ip = lambda u, v: rd.inner(u.weight, v.weight)
    out = DistExpr.from_field(quad(n, a2.star(), b1), coef=-ip(a1, b2))
    out = out + DistExpr.from_field(quad(n, a1, b2.star()), coef=ip(a2, b1))
    return out + DistExpr.derivative(n, -ip(a1, b2) * ip(a2, b1))


basis_bosons = labels.map(lambda i: Boson(rd.basis_vector(i, N)))


@given(basis_bosons, basis_bosons, basis_bosons, basis_bosons)
def test_bosonic_commutator_proposition_on_basis(a1, a2, b1, b2):
    lhs = super_commutator(quad(N, a1, a2.star()), quad(N, b1, b2.star()))
    assert lhs == proposition_value(N, a1, a2, b1, b2)


@settings(max_examples=40)
@given(vectors, vectors, vectors, vectors)
def test_bosonic_commutator_proposition_on_lattice(u1, u2, v1, v2):
    a1, a2, b1, b2 = (Boson(x) for x in (u1, u2, v1, v2))
    lhs = super_commutator(quad(N, a1, a2.star()), quad(N, b1, b2.star()))
    assert lhs == proposition_value(N, a1, a2, b1, b2)


quads = st.tuples(gens, gens, st.integers(-3, 3).filter(bool)).map(lambda t: quad(N, t[0], t[1], t[2]))
nonzero_quads = quads.filter(lambda f: not f.is_zero())


@given(nonzero_quads, nonzero_quads)
def test_super_skew_symmetry(a, b):
    s = -1 if (a.parity and b.parity) else 1
    p, q = super_commutator(a, b), super_commutator(b, a)
    assert q.delta_payload() == -s * p.delta_payload()
    assert q.derivative_coefficient() == s * p.derivative_coefficient()


@given(nonzero_quads, nonzero_quads)
def test_grading(a, b):
    d = super_commutator(a, b)
    assert d.parity == a.parity + b.parity
    payload = d.delta_payload()
    if not payload.is_zero():
        assert weight_of(payload) == weight_of(a) + weight_of(b)


@given(st.lists(st.tuples(gens, st.integers(0, 2)), max_size=5))
def test_canonicalize_is_idempotent(word):
    sign, canon = canonicalize(word)
    if sign:
        assert canonicalize(canon) == (1, canon)
