import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from pairtopo.difffield import t
from pairtopo.formulas import parse_poly as P
from pairtopo.pairsets import (
    BasicClosed,
    ClosedSet,
    Constructible,
    SchemaError,
    c_difference,
    c_intersect,
    c_union,
    closure,
    complement,
    deserialize,
    intersect,
    is_full_ambient,
    member,
    mk_fiber_fni,
    mk_kn,
    mk_span,
    mk_xn,
    mk_yn,
    product_set,
    serialize,
    union,
    zariski_restrict_k,
)
from pairtopo.sampling import random_point

from suites import ZARISKI_CASES


def test_y1_is_zero():
    assert member(mk_yn(1), (0,))
    assert not member(mk_yn(1), (1,))


def test_y2():
    assert member(mk_yn(2), (t(0), 3 * t(0)))
    assert not member(mk_yn(2), (1, t(0)))
    assert member(mk_yn(2), (0, 0))


def test_kn():
    assert member(mk_kn(2), (Fraction(3, 2), -7))
    assert not member(mk_kn(2), (t(0), 1))
    assert not member(mk_kn(1), (t(0),))


def test_span():
    S = mk_span([1, t(0)])
    assert member(S, (2 - 5 * t(0),))
    assert not member(S, (t(0) ** 2,))


def test_xn():
    X = mk_xn(2)
    assert member(X, (1, t(0), 5 + 7 * t(0)))
    assert not member(X, (t(0), 2 * t(0), 1))
    assert not member(X, (1, t(0), t(0) ** 2))


def test_fiber():
    F = mk_fiber_fni(2, 1, 5)
    assert member(F, (1, t(0), 5 + 7 * t(0)))
    # 5 - (4 + 7 t0) = 1 - 7 t0 is independent of t0
    assert not member(F, (1, t(0), 4 + 7 * t(0)))


def test_intersection():
    A = intersect(mk_yn(2), mk_kn(2))
    assert member(A, (1, 1))
    assert not member(A, (1, t(0)))
    assert not member(A, (t(0), 2 * t(0)))


def test_union_and_product():
    U = union(mk_span([t(0)]), mk_kn(1))
    assert member(U, (3 * t(0),)) and member(U, (2,))
    assert not member(U, (t(1),))
    Pr = product_set(mk_yn(1), mk_kn(1))
    assert Pr.n == 2 and member(Pr, (0, 5)) and not member(Pr, (1, 5))


def test_boolean_ops():
    Y = Constructible.closed(mk_yn(2))
    K = Constructible.closed(mk_kn(2))
    D = c_difference(Y, K)
    assert member(D, (t(0), 2 * t(0))) and not member(D, (1, 2))
    assert member(c_union(D, K), (1, 2))
    assert not member(c_intersect(D, K), (1, 2))
    C = complement(mk_yn(2))
    assert member(C, (1, t(0))) and not member(C, (0, 0))


def test_full_ambient():
    x1, x2 = P("x1"), P("x2")
    assert is_full_ambient(BasicClosed(2, (x1, 2 * x1), (2,)))
    assert not is_full_ambient(BasicClosed(2, (x1, x2), (2,)))
    for n in range(1, 4):
        assert not is_full_ambient(mk_yn(n))
    assert is_full_ambient(BasicClosed.full(2))
    assert not is_full_ambient(ClosedSet.empty(2))


def test_zariski_examples():
    assert zariski_restrict_k(BasicClosed(1, (P("x1 + t0"), P("x1^2 + 1")), (2,))) == [P("x1^2 + 1")]
    assert zariski_restrict_k(BasicClosed(1, (P("x1"), P("1")), (2,))) == []
    assert zariski_restrict_k(BasicClosed(1, (P("x1"), P("t0")), (2,))) == [P("x1")]


@pytest.mark.parametrize("name,C,expected", ZARISKI_CASES, ids=[c[0] for c in ZARISKI_CASES])
def test_zariski_agrees_with_membership(name, C, expected):
    polys = zariski_restrict_k(C)
    if expected is not None:
        assert [str(p) for p in polys] == expected
    rng = random.Random(name)
    for _ in range(20):
        pt = tuple(Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(C.n))
        vals = dict(zip([f"x{i}" for i in range(1, C.n + 1)], pt))
        assert member(C, pt) == all(p.evaluate(vals) == 0 for p in polys)


def test_zariski_of_union_multiplies():
    A = BasicClosed(1, (P("x1"), P("t0")), (2,))
    B = BasicClosed(1, (P("x1 - 1"), P("t0")), (2,))
    assert zariski_restrict_k(ClosedSet.of(1, [A, B])) == [P("x1^2 - x1")]


def test_closure_tags():
    X = mk_xn(2)
    res = closure(X)
    assert res.tag == "exact"
    # X2 is Y3 minus a proper closed set, so its closure is Y3
    assert res.closed == ClosedSet.basic(mk_yn(3))
    D = c_difference(Constructible.closed(mk_yn(2)), Constructible.closed(mk_kn(2)))
    res = closure(D)
    assert res.tag == "exact"
    assert member(res.closed, (t(0), 2 * t(0)))


def test_serialization_round_trip():
    for X in [mk_xn(2), Constructible.closed(mk_yn(3)), complement(mk_span([1, t(0)]))]:
        data = serialize(X)
        assert serialize(deserialize(data)) == data


def test_schema_error():
    with pytest.raises(SchemaError):
        deserialize(b'{"arity": 1, "pairs": [{"C": [{"map": ["x1"], "blocks": "two"}], "D": []}]}')


def test_canonical_form():
    a = c_union(Constructible.closed(mk_yn(2)), Constructible.closed(mk_kn(2)))
    b = c_union(Constructible.closed(mk_kn(2)), Constructible.closed(mk_yn(2)))
    assert serialize(a) == serialize(b)


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_boolean_ops_pointwise(seed):
    rng = random.Random(seed)
    A = Constructible.closed(mk_yn(2))
    B = complement(mk_kn(2))
    p = random_point(rng, 2)
    a, b = member(A, p), member(B, p)
    assert member(c_union(A, B), p) == (a or b)
    assert member(c_intersect(A, B), p) == (a and b)
    assert member(c_difference(A, B), p) == (a and not b)
    assert member(complement(mk_yn(2)), p) == (not a)


@given(st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_closure_contains_set(seed):
    rng = random.Random(seed)
    X = mk_xn(2)
    cl = closure(X).closed
    p = random_point(rng, 3)
    if member(X, p):
        assert member(cl, p)
