from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from toroidal_ff import root_data as rd


def band_matrix(n: int):
    """The displayed affine matrix: 2 on the diagonal, -1 off it, a_10 = a_{n,n-1} = -2."""
    a = [[0] * (n + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        a[i][i] = 2
        if i + 1 <= n:
            a[i][i + 1] = -1
            a[i + 1][i] = -1
    a[1][0] = -2
    a[n][n - 1] = -2
    return a


def test_weight_arithmetic():
    n = 3
    v = rd.eps(1, n) - Fraction(1, 2) * rd.cbar(n)
    assert v == rd.beta(n)
    assert v[0] == Fraction(-1, 2) and v[1] == 1 and v[2] == 0
    assert (v - v).is_zero()
    assert str(rd.simple_root(0, n)) == "cbar - 2*eps1"
    with pytest.raises(ValueError):
        rd.eps(1, 2) + rd.eps(1, 3)
    with pytest.raises(ValueError):
        rd.WeightVector.from_map(2, {3: 1})


def test_inner_products():
    n = 2
    assert rd.inner(rd.beta(n), rd.beta(n)) == 1
    assert rd.inner(rd.beta(n), rd.eps(1, n)) == 1
    assert rd.inner(rd.cbar(n), rd.cbar(n)) == 0
    assert rd.simple_root(0, n) == -2 * rd.beta(n)


def test_simple_roots():
    assert rd.simple_root(1, 1) == rd.eps(1, 1)
    assert rd.simple_root(2, 3) == rd.eps(2, 3) - rd.eps(3, 3)
    assert rd.simple_root(3, 3) == rd.eps(3, 3)
    for bad in (-1, 4):
        with pytest.raises(ValueError):
            rd.simple_root(bad, 3)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_cartan_matches_band_matrix(n):
    assert rd.cartan_matrix(n) == band_matrix(n)


def test_cartan_rank_two_and_one():
    assert rd.cartan_matrix(2) == [[2, -1, 0], [-2, 2, -1], [0, -2, 2]]
    assert rd.cartan_matrix(1) == [[2, -1], [-4, 2]]


def test_sym_form_examples():
    for n in (1, 2, 3):
        assert rd.sym_form(0, 0, n) == 4
        assert rd.sym_form(n, n, n) == 1
    for n in (2, 3, 4):
        # inner(eps_{n-1} - eps_n, eps_n) = -1, i.e. d_{n-1} a_{n-1,n} = 1 * (-1)
        assert rd.sym_form(n - 1, n, n) == -1
        assert rd.sym_form(n, n - 1, n) == Fraction(1, 2) * -2
    assert rd.symmetrizer(3) == [2, 1, 1, Fraction(1, 2)]
    assert rd.symmetrizer(1) == [2, Fraction(1, 2)]


def test_parity():
    for n in (1, 2, 3):
        assert rd.parity(n, n) is rd.Parity.ODD
        assert rd.parity(0, n) is rd.Parity.EVEN
    assert rd.parity(1, 2) is rd.Parity.EVEN
    assert rd.Parity.ODD + rd.Parity.ODD is rd.Parity.EVEN


def test_root_datum_json():
    data = rd.root_datum(2).to_json()
    assert data["cartan_matrix"] == [[2, -1, 0], [-2, 2, -1], [0, -2, 2]]
    assert data["d"] == ["2", "1", "1/2"]
    assert data["parity"] == ["even", "even", "odd"]
    assert data["delta"] == "cbar"


@pytest.mark.parametrize("n", range(1, 7))
def test_structural_invariants(n):
    a = rd.cartan_matrix(n)
    d = rd.symmetrizer(n)
    delta = rd.null_root(n)
    assert delta == rd.cbar(n)
    assert rd.inner(delta, delta) == 0
    for i in range(n + 1):
        assert a[i][i] == 2
        assert rd.inner(delta, rd.simple_root(i, n)) == 0
        for j in range(n + 1):
            assert rd.sym_form(i, j, n) == rd.sym_form(j, i, n) == d[i] * a[i][j]


coords = st.dictionaries(st.integers(0, 3), st.fractions(max_denominator=6).filter(lambda x: abs(x) < 10), max_size=4)


@given(coords, coords, coords)
def test_inner_is_symmetric_bilinear(a, b, c):
    u, v, w = (rd.WeightVector.from_map(3, x) for x in (a, b, c))
    assert rd.inner(u, v) == rd.inner(v, u)
    assert rd.inner(u + v, w) == rd.inner(u, w) + rd.inner(v, w)
    assert rd.inner(rd.cbar(3), u) == 0
