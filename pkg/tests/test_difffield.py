import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from pairtopo.difffield import (
    DomainError,
    OmegaElement,
    derive,
    fni,
    in_scl,
    k_dependence,
    t,
    trdeg_rank,
    wronskian_eval,
    wronskian_sym,
)
from pairtopo.sampling import random_omega


def test_derive_basics():
    assert derive(t(0)) == t(1)
    assert derive(OmegaElement(Fraction(3, 7))) == 0
    assert derive(t(0) ** 2) == 2 * t(0) * t(1)


def test_derive_quotient():
    # D(1/t0) = -t1/t0^2
    assert derive(1 / t(0)) == -t(1) / t(0) ** 2
    assert derive(t(0) / t(1), 2) == derive(derive(t(0) / t(1)))


def test_wronskian_symbolic():
    assert str(wronskian_sym(1).poly) == "x1"
    w2 = wronskian_sym(2).poly
    assert w2.total_degree() == 2 and len(w2.terms) == 2
    w3 = wronskian_sym(3)
    assert w3.degree == 3 and w3.order == 2 and len(w3.poly.terms) == 6


def test_wronskian_values():
    # D(t0) = t1 in this model, so W(1, t0) = t1
    assert wronskian_eval([1, t(0)]) == t(1)
    assert wronskian_eval([t(0), 3 * t(0)]) == 0
    assert wronskian_eval([1, t(0), t(0) ** 2]) == 2 * t(1) ** 3


def test_wronskian_matches_symbolic():
    a = [t(0), t(1) + 2, t(0) * t(2)]
    sym = wronskian_sym(3)
    values = {}
    for j, el in enumerate(a, start=1):
        for i in range(3):
            name = f"x{j}" if i == 0 else f"x{j}_{i}"
            values[name] = derive(el, i)
    assert sym.poly.evaluate(values) == wronskian_eval(a)


def test_dependence_certificates():
    assert k_dependence([1, t(0)]) is None
    assert k_dependence([t(0), 3 * t(0)]) == (-3, 1)
    c = k_dependence([1, t(0), 1 + 2 * t(0)])
    # defined up to a nonzero scalar; the hand-derived vector is (1, 2, -1)
    assert c in ((1, 2, -1), (-1, -2, 1))


def test_fni():
    assert fni([1, t(0)], 5 + 7 * t(0), 1) == 5
    assert fni([1, t(0)], 5 + 7 * t(0), 2) == 7
    with pytest.raises(DomainError):
        fni([t(0), 2 * t(0)], t(3), 1)
    with pytest.raises(DomainError):
        fni([1, t(0)], t(0) ** 2, 1)


def test_trdeg():
    assert trdeg_rank([Fraction(5)]) == 0
    assert trdeg_rank([t(0), t(1)]) == 2
    assert trdeg_rank([t(0), t(0) ** 2]) == 1


def test_scl():
    assert in_scl(t(0) ** 2, [t(0)])
    assert not in_scl(t(1), [t(0)])
    assert in_scl(Fraction(3, 7), [])


def test_printing_round_trip():
    from pairtopo.formulas import parse_omega
    for a in [t(0) / (t(1) ** 2 + 1), -t(0), Fraction(-3, 4) + t(2) * t(0), OmegaElement(0)]:
        a = OmegaElement.coerce(a)
        assert parse_omega(str(a)) == a


elements = st.builds(lambda s: random_omega(random.Random(s)), st.integers(0, 10**6))


@given(elements, elements)
@settings(max_examples=60, deadline=None)
def test_derivation_rules(a, b):
    assert derive(a * b) == derive(a) * b + a * derive(b)
    assert derive(a + b) == derive(a) + derive(b)


@given(st.lists(elements, min_size=1, max_size=4))
@settings(max_examples=60, deadline=None)
def test_wronskian_iff_dependent(alphas):
    cert = k_dependence(alphas)
    assert (wronskian_eval(alphas) == 0) == (cert is not None)
    if cert is not None:
        assert sum((c * a for c, a in zip(cert, alphas)), OmegaElement(0)) == 0


@given(st.lists(elements, min_size=1, max_size=3), st.lists(st.integers(-5, 5), min_size=3, max_size=3))
@settings(max_examples=60, deadline=None)
def test_fni_recombines(alphas, coeffs):
    if k_dependence(alphas) is not None:
        return
    beta = sum((c * a for c, a in zip(coeffs, alphas)), OmegaElement(0))
    parts = [fni(alphas, beta, i) for i in range(1, len(alphas) + 1)]
    assert parts == [Fraction(c) for c in coeffs[:len(alphas)]]


@given(st.lists(elements, max_size=3), elements)
@settings(max_examples=40, deadline=None)
def test_trdeg_monotone(A, a):
    r = trdeg_rank(A)
    assert r <= trdeg_rank(A + [a]) <= r + 1
    assert r <= len(A)
