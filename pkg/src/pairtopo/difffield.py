"""A computable differential field standing in for the big field.

Elements are rational functions over Q in indeterminates ``t0, t1, ...`` with
the derivation ``D(t_i) = t_{i+1}``.  The field of constants is Q, which plays
the role of the small field at sample points.  Linear dependence over the
constants, Wronskians, coordinate functions and transcendence degrees are all
decided exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import zip_longest
from math import lcm

from sympy import ZZ
from sympy.polys.rings import ring

from .exactalg import MPoly, det, nullspace, primitive, solve
from .exactalg.poly import grevlex_key


class DomainError(ValueError):
    """Raised when a coordinate function is evaluated outside its domain."""


# sparse polynomials in t: dict exponent-tuple -> Fraction, trailing zeros stripped

_ONE = {(): Fraction(1)}


def _strip(e):
    n = len(e)
    while n and e[n - 1] == 0:
        n -= 1
    return e[:n] if n != len(e) else e


def _madd(a, b):
    if len(a) < len(b):
        a, b = b, a
    return tuple(x + y for x, y in zip_longest(a, b, fillvalue=0))


def _padd(p, q, sign=1):
    r = dict(p)
    for e, c in q.items():
        v = r.get(e, 0) + sign * c
        if v:
            r[e] = v
        else:
            r.pop(e, None)
    return r


def _pmul(p, q):
    if len(p) == 1 and () in p:
        c = p[()]
        return {e: c * v for e, v in q.items()} if c != 1 else dict(q)
    if len(q) == 1 and () in q:
        return _pmul(q, p)
    r = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = _madd(e1, e2)
            v = r.get(e, 0) + c1 * c2
            if v:
                r[e] = v
            else:
                r.pop(e, None)
    return r


def _pscale(p, c):
    if c == 1:
        return dict(p)
    return {e: v * c for e, v in p.items()} if c else {}


def _ppow(p, k):
    r = dict(_ONE)
    while k:
        if k & 1:
            r = _pmul(r, p)
        p = _pmul(p, p)
        k >>= 1
    return r


def _pD(p):
    """Total derivative: sum_i dp/dt_i * t_{i+1}."""
    r = {}
    for e, c in p.items():
        for i, x in enumerate(e):
            if not x:
                continue
            ne = list(e)
            ne[i] -= 1
            if i + 1 < len(ne):
                ne[i + 1] += 1
            else:
                ne.append(1)
            ne = _strip(tuple(ne))
            v = r.get(ne, 0) + c * x
            if v:
                r[ne] = v
            else:
                r.pop(ne, None)
    return r


def _ppartial(p, i):
    r = {}
    for e, c in p.items():
        if i < len(e) and e[i]:
            ne = list(e)
            ne[i] -= 1
            ne = _strip(tuple(ne))
            r[ne] = r.get(ne, 0) + c * e[i]
    return {e: c for e, c in r.items() if c}


def _plen(p):
    return max((len(e) for e in p), default=0)


def _pad(e, n):
    return e + (0,) * (n - len(e))


@lru_cache(maxsize=None)
def _zz_ring(n):
    return ring([f"t{i}" for i in range(n)], ZZ)[0]


def _to_zz(p, R, n):
    d = 1
    for c in p.values():
        d = lcm(d, c.denominator)
    return R.from_dict({_pad(e, n): int(c * d) for e, c in p.items()}), d


def _from_zz(P):
    return {_strip(tuple(e)): Fraction(int(c)) for e, c in P.items()}


def _normalize(num, den):
    if not num:
        return {}, dict(_ONE)
    if not den:
        raise ZeroDivisionError("zero denominator")
    if len(den) == 1 and () in den:
        c = den[()]
        return _pscale(num, 1 / c), dict(_ONE)
    n = max(_plen(num), _plen(den))
    R = _zz_ring(n)
    A, sa = _to_zz(num, R, n)
    B, sb = _to_zz(den, R, n)
    _, A, B = A.cofactors(B)
    num, den = _from_zz(A), _from_zz(B)
    scale = Fraction(sb, sa)
    lead = max(den, key=lambda e: grevlex_key(_pad(e, n)))
    lc = den[lead]
    return _pscale(num, scale / lc), _pscale(den, 1 / lc)


def _pformat(p):
    n = _plen(p)
    return str(MPoly({_pad(e, n): c for e, c in p.items()}, [f"t{i}" for i in range(n)]))


class OmegaElement:
    """Element of Q(t0, t1, ...) in canonical form.

    The denominator is monic for the graded reverse lexicographic order and
    shares no factor with the numerator, so equality is equality of the
    stored dictionaries.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, value=0):
        q = Fraction(value)
        self.num = {(): q} if q else {}
        self.den = dict(_ONE)
        self._hash = None

    @classmethod
    def _raw(cls, num, den, normalize=True):
        if normalize:
            num, den = _normalize(num, den)
        x = cls.__new__(cls)
        x.num, x.den, x._hash = num, den, None
        return x

    @classmethod
    def t(cls, i):
        if i < 0:
            raise ValueError("indeterminate index must be nonnegative")
        return cls._raw({(0,) * i + (1,): Fraction(1)}, dict(_ONE), False)

    @classmethod
    def coerce(cls, x):
        if isinstance(x, OmegaElement):
            return x
        return cls(x)

    # predicates

    def is_polynomial(self):
        return len(self.den) == 1 and () in self.den

    def as_rational(self):
        if not self.num:
            return Fraction(0)
        if len(self.num) == 1 and () in self.num and self.is_polynomial():
            return self.num[()]
        return None

    def is_constant(self):
        return self.as_rational() is not None

    @property
    def order(self):
        """Largest index ``M`` of a ``t_M`` occurring, or -1 for constants."""
        return max(_plen(self.num), _plen(self.den)) - 1

    # arithmetic

    def __add__(self, other):
        if not isinstance(other, OmegaElement):
            if isinstance(other, (int, Fraction)):
                other = OmegaElement(other)
            else:
                return NotImplemented
        if self.den == other.den:
            if self.is_polynomial():
                return OmegaElement._raw(_padd(self.num, other.num), dict(_ONE), False)
            return OmegaElement._raw(_padd(self.num, other.num), self.den)
        num = _padd(_pmul(self.num, other.den), _pmul(other.num, self.den))
        return OmegaElement._raw(num, _pmul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return OmegaElement._raw({e: -c for e, c in self.num.items()}, self.den, False)

    def __sub__(self, other):
        if not isinstance(other, (OmegaElement, int, Fraction)):
            return NotImplemented
        return self + (-OmegaElement.coerce(other))

    def __rsub__(self, other):
        return OmegaElement.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, OmegaElement):
            if isinstance(other, (int, Fraction)):
                c = Fraction(other)
                return OmegaElement._raw(_pscale(self.num, c), self.den if c else dict(_ONE), False)
            return NotImplemented
        num = _pmul(self.num, other.num)
        if not num:
            return OmegaElement(0)
        if self.is_polynomial() and other.is_polynomial():
            return OmegaElement._raw(num, dict(_ONE), False)
        return OmegaElement._raw(num, _pmul(self.den, other.den))

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise ZeroDivisionError("division by zero in Omega")
        return OmegaElement._raw(self.den, self.num)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero in Omega")
            return self * (1 / Fraction(other))
        if not isinstance(other, OmegaElement):
            return NotImplemented
        if not other.num:
            raise ZeroDivisionError("division by zero in Omega")
        return OmegaElement._raw(_pmul(self.num, other.den), _pmul(self.den, other.num))

    def __rtruediv__(self, other):
        return OmegaElement.coerce(other) / self

    def __pow__(self, k):
        if not isinstance(k, int):
            raise TypeError("integer exponents only")
        if k < 0:
            return self.inverse() ** (-k)
        if self.is_polynomial():
            return OmegaElement._raw(_ppow(self.num, k), dict(_ONE), False)
        return OmegaElement._raw(_ppow(self.num, k), _ppow(self.den, k), False)

    # comparison

    def __eq__(self, other):
        if isinstance(other, OmegaElement):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)):
            r = self.as_rational()
            return r is not None and r == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            r = self.as_rational()
            if r is not None:
                self._hash = hash(r)
            else:
                self._hash = hash((frozenset(self.num.items()), frozenset(self.den.items())))
        return self._hash

    def __bool__(self):
        return bool(self.num)

    # calculus

    def derive(self, n=1):
        return derive(self, n)

    def partial(self, i):
        """Partial derivative with respect to ``t_i``."""
        p, q = self.num, self.den
        dp = _ppartial(p, i)
        if self.is_polynomial():
            return OmegaElement._raw(dp, dict(_ONE), False)
        dq = _ppartial(q, i)
        return OmegaElement._raw(_padd(_pmul(dp, q), _pmul(p, dq), -1), _pmul(q, q))

    # printing

    def __str__(self):
        num = _pformat(self.num)
        if self.is_polynomial():
            return num
        den = _pformat(self.den)
        if not _simple(num):
            num = f"({num})"
        if not _simple(den):
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self):
        return f"OmegaElement({self})"

    def sort_key(self):
        return str(self)


def _simple(s):
    return s.isalnum()


def t(i):
    return OmegaElement.t(i)


def omega(x):
    return OmegaElement.coerce(x)


def _derivative_numerators(p, q, n):
    """Numerators P_0..P_n with D^i(p/q) = P_i / q^(i+1)."""
    out = [p]
    dq = _pD(q)
    for i in range(n):
        P = out[-1]
        nxt = _padd(_pmul(_pD(P), q), _pmul(P, dq), -(i + 1))
        out.append(nxt)
    return out


def derive(a, n=1):
    """The ``n``-fold derivative of ``a``."""
    if n < 0:
        raise ValueError("derivative count must be nonnegative")
    a = OmegaElement.coerce(a)
    if n == 0:
        return a
    if a.is_polynomial():
        p = a.num
        for _ in range(n):
            p = _pD(p)
        return OmegaElement._raw(p, dict(_ONE), False)
    P = _derivative_numerators(a.num, a.den, n)[-1]
    return OmegaElement._raw(P, _ppow(a.den, n + 1))


@dataclass(frozen=True)
class WronskianSym:
    """Symbolic Wronskian: entry (i, j) is the name of x_j^(i)."""

    matrix: tuple
    poly: MPoly

    @property
    def degree(self):
        return self.poly.total_degree()

    @property
    def order(self):
        return max(int(v.split("_")[1]) if "_" in v else 0 for v in self.poly.used_vars())


def derivative_symbol(j, i):
    return f"x{j}" if i == 0 else f"x{j}_{i}"


def wronskian_sym(n):
    """Wronskian of ``n`` formal unknowns; ``x{j}_{i}`` is the i-th derivative of x_j."""
    if n < 1:
        raise ValueError("Wronskian arity must be at least 1")
    names = tuple(tuple(derivative_symbol(j + 1, i) for j in range(n)) for i in range(n))
    vars = tuple(v for row in names for v in row)
    M = [[MPoly.var(v, vars) for v in row] for row in names]
    return WronskianSym(names, det(M, zero=MPoly.zero(vars)))


def wronskian_eval(alphas):
    """Exact value of the Wronskian of ``alphas``.

    Column j is scaled by q_j^n so the determinant is taken over polynomials;
    one cancellation at the end restores canonical form.
    """
    alphas = [OmegaElement.coerce(a) for a in alphas]
    n = len(alphas)
    if n < 1:
        raise ValueError("Wronskian arity must be at least 1")
    cols = []
    denom = dict(_ONE)
    for a in alphas:
        q = a.den
        P = _derivative_numerators(a.num, q, n - 1)
        col = [OmegaElement._raw(_pmul(P[i], _ppow(q, n - 1 - i)), dict(_ONE), False)
               for i in range(n)]
        cols.append(col)
        if not a.is_polynomial():
            denom = _pmul(denom, _ppow(q, n))
    M = [[cols[j][i] for j in range(n)] for i in range(n)]
    D = det(M, zero=OmegaElement(0))
    if not isinstance(D, OmegaElement):
        D = OmegaElement(D)
    return OmegaElement._raw(D.num, denom)


def _cleared(elements):
    """Polynomials P_i with elements[i] = P_i / Q for one common Q."""
    dens = []
    for a in elements:
        if not a.is_polynomial() and a.den not in dens:
            dens.append(a.den)
    out = []
    for a in elements:
        p = a.num
        for d in dens:
            if d != a.den:
                p = _pmul(p, d)
        out.append(p)
    return out


def _coefficient_matrix(polys):
    monos = sorted({e for p in polys for e in p})
    return [[p.get(m, Fraction(0)) for p in polys] for m in monos]


def k_dependence(alphas):
    """A nonzero rational vector c with sum c_i alpha_i = 0, or ``None``.

    Denominators are cleared and monomial coefficients matched, which turns
    the question into a finite linear system over Q.  The certificate is the
    first kernel basis vector, scaled to coprime integers.
    """
    alphas = [OmegaElement.coerce(a) for a in alphas]
    if not alphas:
        return None
    polys = _cleared(alphas)
    M = _coefficient_matrix(polys)
    if not M:
        return tuple(Fraction(1) if i == 0 else Fraction(0) for i in range(len(alphas)))
    ker = nullspace(M)
    if not ker:
        return None
    return primitive(ker[0])


def is_k_dependent(alphas):
    return k_dependence(alphas) is not None


def k_coordinates(alphas, beta):
    """The unique rational a with beta = sum a_i alpha_i.

    Raises :class:`DomainError` when the alphas are dependent or beta lies
    outside their span.
    """
    alphas = [OmegaElement.coerce(a) for a in alphas]
    beta = OmegaElement.coerce(beta)
    if k_dependence(alphas) is not None:
        raise DomainError("basis is linearly dependent over the constants")
    polys = _cleared(alphas + [beta])
    M = _coefficient_matrix(polys)
    if not M:
        return tuple(Fraction(0) for _ in alphas)
    x = solve([row[:-1] for row in M], [row[-1] for row in M])
    if x is None:
        raise DomainError("element is not in the span of the basis")
    return tuple(x)


def fni(alphas, beta, i):
    """i-th coordinate (1-based) of beta in the independent basis alphas."""
    if not 1 <= i <= len(alphas):
        raise ValueError(f"coordinate index {i} out of range 1..{len(alphas)}")
    return k_coordinates(alphas, beta)[i - 1]


def independent_subset(elements):
    """Indices of a greedily chosen maximal independent subfamily."""
    chosen = []
    for i, a in enumerate(elements):
        if k_dependence([elements[j] for j in chosen] + [a]) is None:
            chosen.append(i)
    return chosen


def _rank(rows):
    rows = [list(r) for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = rows[rank][c].inverse()
        for i in range(rank + 1, len(rows)):
            if rows[i][c] != 0:
                f = rows[i][c] * inv
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def trdeg_rank(A):
    """Transcendence degree over Q of Q(A): rank of the Jacobian d a / d t_j."""
    A = [OmegaElement.coerce(a) for a in A]
    A = [a for a in A if not a.is_constant()]
    if not A:
        return 0
    M = max(a.order for a in A)
    J = [[a.partial(j) for j in range(M + 1)] for a in A]
    return _rank(J)


def in_scl(a, A):
    A = list(A)
    return trdeg_rank(A + [a]) == trdeg_rank(A)
