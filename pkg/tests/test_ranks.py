import pytest

from pairtopo.difffield import t
from pairtopo.pairsets import Constructible, c_difference, complement, mk_kn, mk_span, mk_xn, mk_yn
from pairtopo.ranks import (
    NotInCatalog,
    OrdinalRank,
    has_nonempty_interior,
    mr_bounds,
    mr_catalog,
    point_mr,
    sdim,
    small_rank,
)

from suites import catalog_closed_sets

OMEGA = OrdinalRank(1, 0)


def full(n):
    return Constructible.full(n)


def test_ordinals():
    assert str(OrdinalRank(2, 0)) == "ω·2"
    assert str(OrdinalRank(1, 3)) == "ω+3"
    assert OrdinalRank(0, 1) + OMEGA == OMEGA
    assert OMEGA + OrdinalRank(0, 1) == OrdinalRank(1, 1)
    assert OrdinalRank(0, 100) < OMEGA


def test_small_rank():
    assert small_rank((t(0), t(1))) == 2
    assert small_rank((3, 1)) == 0
    assert small_rank((t(0), t(0) ** 2 + 1)) == 1
    assert small_rank((t(1),), (t(0),)) == 1


def test_point_mr_verbatim():
    assert point_mr((5,)) == OrdinalRank(0, 0)
    # the formula read literally gives omega + 1 for a generic element
    assert point_mr((t(0),)) == OrdinalRank(1, 1)


def test_interior():
    assert has_nonempty_interior(full(2)).value is True
    assert has_nonempty_interior(Constructible.closed(mk_yn(2))).value is False
    assert has_nonempty_interior(complement(mk_yn(2))).value is True


@pytest.mark.parametrize("n", [1, 2, 3])
def test_sdim_full(n):
    assert sdim(full(n)).value == n


@pytest.mark.parametrize("n", [1, 2])
def test_sdim_kn(n):
    assert sdim(mk_kn(n)).value == 0


def test_sdim_y2():
    assert sdim(mk_yn(2)).value == 1


def test_sdim_y3():
    assert sdim(mk_yn(3)).value == 2


def test_sdim_span():
    assert sdim(mk_span([1, t(0)])).value == 0


def test_sdim_difference():
    assert sdim(c_difference(Constructible.closed(mk_yn(2)), Constructible.closed(mk_kn(2)))).value == 1
    assert sdim(complement(mk_yn(1))).value == 1


def test_sdim_xn():
    assert sdim(mk_xn(2)).value == 2


@pytest.mark.parametrize("name", sorted(catalog_closed_sets()))
def test_proper_closed_sets_are_small(name):
    C = catalog_closed_sets()[name]
    rep = sdim(C)
    assert rep.upper < C.n


def test_catalog():
    assert mr_catalog("kPower", 1) == OrdinalRank(0, 1)
    assert mr_catalog("omegaPower", 1) == OMEGA
    assert mr_catalog("kPlusKAlpha") == OrdinalRank(0, 2)
    assert mr_catalog("finiteSet") == OrdinalRank(0, 0)
    with pytest.raises(NotInCatalog):
        mr_catalog("cantor")


def test_mr_bounds():
    assert str(mr_bounds(mk_kn(1))) == "1"
    assert str(mr_bounds(full(1))) == "ω"
    assert str(mr_bounds(mk_span([1, t(0)]))) == "2"
    b = mr_bounds(mk_yn(2))
    assert b.strict_upper and b.upper == OrdinalRank(2, 0) and not b.exact
    b = mr_bounds(complement(mk_yn(2)))
    assert b.exact and b.lower == OrdinalRank(2, 0)


def test_sdim_deterministic():
    X = c_difference(Constructible.closed(mk_yn(2)), Constructible.closed(mk_kn(2)))
    assert sdim(X, seed=3).to_json() == sdim(X, seed=3).to_json()
