"""Sparse multivariate polynomials with exact coefficients.

Coefficients are either :class:`fractions.Fraction` or any field element that
supports ``+ - * /``, equality with ``0`` and an ``as_rational()`` method
(the differential-field elements of :mod:`pairtopo.difffield`).  Rational
field elements are always stored as ``Fraction`` so that "defined over Q"
is a cheap syntactic test.
"""
from __future__ import annotations

import re
from fractions import Fraction
from itertools import zip_longest
from numbers import Rational


def lex_key(e):
    return e


def grevlex_key(e):
    return (sum(e), tuple(-x for x in reversed(e)))


ORDERS = {"lex": lex_key, "grevlex": grevlex_key}


def order_key(order):
    try:
        return ORDERS[order]
    except KeyError:
        raise ValueError(f"unknown term order {order!r}") from None


def coerce_coeff(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    as_rat = getattr(c, "as_rational", None)
    if as_rat is not None:
        r = as_rat()
        if r is not None:
            return r
        return c
    raise TypeError(f"unsupported coefficient {c!r}")


def format_rational(c):
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


class MPoly:
    """Immutable polynomial over named variables.

    ``terms`` maps exponent tuples (one entry per variable in ``vars``) to
    nonzero coefficients.  Equality and hashing ignore the variable order and
    unused variables, so ``x + y`` built in ring ``(x, y)`` equals the same
    polynomial built in ring ``(y, x, z)``.
    """

    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, terms=None, vars=()):
        self.vars = tuple(vars)
        n = len(self.vars)
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != n:
                raise ValueError(f"exponent {e} does not match variables {self.vars}")
            c = coerce_coeff(c)
            if c != 0:
                clean[e] = c
        self.terms = clean
        self._hash = None

    # constructors

    @classmethod
    def var(cls, name, vars=None):
        vars = tuple(vars) if vars is not None else (name,)
        e = tuple(1 if v == name else 0 for v in vars)
        return cls({e: Fraction(1)}, vars)

    @classmethod
    def const(cls, c, vars=()):
        return cls({(0,) * len(vars): c}, vars)

    @classmethod
    def zero(cls, vars=()):
        return cls({}, vars)

    # structure

    def reorder(self, vars):
        """Same polynomial over variable list ``vars`` (must cover used vars)."""
        vars = tuple(vars)
        if vars == self.vars:
            return self
        pos = {v: i for i, v in enumerate(vars)}
        idx = []
        for i, v in enumerate(self.vars):
            if v in pos:
                idx.append((i, pos[v]))
            elif any(e[i] for e in self.terms):
                raise ValueError(f"variable {v} missing from {vars}")
        out = {}
        n = len(vars)
        for e, c in self.terms.items():
            ne = [0] * n
            for i, j in idx:
                ne[j] = e[i]
            out[tuple(ne)] = c
        p = MPoly.__new__(MPoly)
        p.vars, p.terms, p._hash = vars, out, None
        return p

    def used_vars(self):
        return tuple(v for i, v in enumerate(self.vars) if any(e[i] for e in self.terms))

    def compact(self):
        return self.reorder(self.used_vars())

    def _unify(self, other):
        if self.vars == other.vars:
            return self, other
        extra = tuple(v for v in other.vars if v not in self.vars)
        vars = self.vars + extra
        return self.reorder(vars), other.reorder(vars)

    def _lift(self, other):
        if isinstance(other, MPoly):
            return other
        return MPoly.const(other, self.vars)

    # arithmetic

    def __add__(self, other):
        a, b = self._unify(self._lift(other))
        out = dict(a.terms)
        for e, c in b.terms.items():
            out[e] = out.get(e, 0) + c
        return MPoly(out, a.vars)

    __radd__ = __add__

    def __neg__(self):
        p = MPoly.__new__(MPoly)
        p.vars, p.terms, p._hash = self.vars, {e: -c for e, c in self.terms.items()}, None
        return p

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            c = coerce_coeff(other)
            return MPoly({e: v * c for e, v in self.terms.items()}, self.vars)
        a, b = self._unify(other)
        out = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MPoly(out, a.vars)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, MPoly):
            if not other.is_constant():
                raise ZeroDivisionError("division by a non-constant polynomial")
            other = other.constant()
        c = coerce_coeff(other)
        if c == 0:
            raise ZeroDivisionError("division by zero")
        return MPoly({e: v / c for e, v in self.terms.items()}, self.vars)

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial exponent must be a nonnegative integer")
        result = MPoly.const(1, self.vars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # comparison

    def _named(self):
        return {
            tuple(sorted((v, x) for v, x in zip(self.vars, e) if x)): c
            for e, c in self.terms.items()
        }

    def __eq__(self, other):
        if not isinstance(other, MPoly):
            try:
                other = MPoly.const(other)
            except TypeError:
                return NotImplemented
        return self._named() == other._named()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(
                self._named().items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def constant(self):
        """Constant term (the value, for constant polynomials)."""
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def is_rational(self):
        return all(isinstance(c, Fraction) for c in self.terms.values())

    # queries

    def coefficients(self):
        return list(self.terms.values())

    def total_degree(self):
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree(self, var):
        if var not in self.vars:
            return 0 if self.terms else -1
        i = self.vars.index(var)
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def leading(self, order="grevlex"):
        key = order_key(order)
        e = max(self.terms, key=key)
        return e, self.terms[e]

    def split(self, main_vars):
        """Write ``self = sum coeff_m * m`` with ``m`` monomials in ``main_vars``.

        Returns a dict from exponent tuples over ``main_vars`` to polynomials in
        the remaining variables.
        """
        main_vars = tuple(main_vars)
        rest = tuple(v for v in self.vars if v not in main_vars)
        mi = [self.vars.index(v) if v in self.vars else None for v in main_vars]
        ri = [self.vars.index(v) for v in rest]
        parts = {}
        for e, c in self.terms.items():
            m = tuple(e[i] if i is not None else 0 for i in mi)
            r = tuple(e[i] for i in ri)
            parts.setdefault(m, {})[r] = c
        return {m: MPoly(t, rest) for m, t in parts.items()}

    def univariate(self, var):
        """Coefficients in ``var`` as a list ``[c0, c1, ...]`` of polynomials."""
        parts = self.split((var,))
        rest = tuple(v for v in self.vars if v != var)
        d = max((m[0] for m in parts), default=-1)
        return [parts.get((k,), MPoly.zero(rest)) for k in range(d + 1)]

    # evaluation

    def evaluate(self, values):
        """Evaluate at ``values`` (mapping var -> field element); all vars needed."""
        vals = [values[v] if v in values else None for v in self.vars]
        total = Fraction(0)
        powers = {}
        for e, c in self.terms.items():
            term = c
            for i, x in enumerate(e):
                if x:
                    if vals[i] is None:
                        raise KeyError(f"no value for variable {self.vars[i]}")
                    key = (i, x)
                    if key not in powers:
                        powers[key] = vals[i] ** x
                    term = term * powers[key]
            total = total + term
        return total

    def subs(self, values):
        """Substitute scalars or polynomials for some variables."""
        keep = tuple(v for v in self.vars if v not in values)
        result = MPoly.zero(keep)
        cache = {}
        for e, c in self.terms.items():
            mono = {}
            term = MPoly.const(c, keep)
            for v, x in zip(self.vars, e):
                if not x:
                    continue
                if v in values:
                    key = (v, x)
                    if key not in cache:
                        val = values[v]
                        cache[key] = (val if isinstance(val, MPoly) else MPoly.const(val)) ** x
                    term = term * cache[key]
                else:
                    mono[v] = x
            if mono:
                me = tuple(mono.get(v, 0) for v in keep)
                term = term * MPoly({me: 1}, keep)
            result = result + term
        return result

    def rename(self, mapping):
        return MPoly(self.terms, tuple(mapping.get(v, v) for v in self.vars))

    def map_coeffs(self, f):
        return MPoly({e: f(c) for e, c in self.terms.items()}, self.vars)

    # printing

    def sorted_terms(self, order="grevlex"):
        key = order_key(order)
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                v if x == 1 else f"{v}^{x}" for v, x in zip(self.vars, e) if x)
            if isinstance(c, Fraction):
                neg = c < 0
                a = -c if neg else c
                if mono and a == 1:
                    body = mono
                else:
                    body = format_rational(a) + ("*" + mono if mono else "")
            else:
                neg = False
                cs = str(c)
                if mono:
                    body = f"({cs})*{mono}" if not _atomic(cs) else f"{cs}*{mono}"
                else:
                    body = cs if _atomic(cs) else f"({cs})"
            if not pieces:
                pieces.append(("-" if neg else "") + body)
            else:
                pieces.append((" - " if neg else " + ") + body)
        return "".join(pieces)

    def __repr__(self):
        return f"MPoly({self})"


def _atomic(s):
    return s.isalnum()


def unify_all(polys, extra=()):
    """Bring polynomials into one common ring; returns (vars, polys)."""
    vars = []
    seen = set()
    for v in tuple(extra):
        if v not in seen:
            seen.add(v)
            vars.append(v)
    for p in polys:
        for v in p.vars:
            if v not in seen:
                seen.add(v)
                vars.append(v)
    vars = tuple(vars)
    return vars, [p.reorder(vars) for p in polys]


def natural_key(name):
    """Sort key treating digit runs numerically: x2 < x10."""
    return tuple(int(t) if t.isdigit() else t for t in re.split(r"(\d+)", name))


def sorted_vars(names):
    return tuple(sorted(set(names), key=natural_key))


def mono_lcm(a, b):
    return tuple(max(x, y) for x, y in zip_longest(a, b, fillvalue=0))
