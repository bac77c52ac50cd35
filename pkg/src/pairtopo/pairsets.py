"""Closed and constructible sets of the pair topology.

Sets live in an ambient space with coordinates named ``x1 .. xn``.  A basic
closed set is the preimage of a product ``Y_{k1} x ... x Y_{km}`` under a
polynomial map, where ``Y_k`` is the set of k-tuples that are linearly
dependent over the constants.  Intersections of basic closed sets are again
basic (concatenate the maps and the block lists), which keeps every closed
set a finite union of basic ones.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .difffield import OmegaElement, independent_subset, is_k_dependent, k_coordinates
from .exactalg import MPoly, det
from .formulas import ParseError, parse_poly
from .sampling import generic_point, random_rational, rng_from, random_point


class SchemaError(ValueError):
    pass


def coord_names(n):
    return tuple(f"x{i}" for i in range(1, n + 1))


def _poly(p):
    return p if isinstance(p, MPoly) else MPoly.const(p)


def coefficient_order(polys):
    """Largest t-index among the coefficients (-1 if all are rational)."""
    order = -1
    for p in polys:
        for c in p.coefficients():
            if isinstance(c, OmegaElement):
                order = max(order, c.order)
    return order


# basic closed sets

@dataclass(frozen=True)
class BasicClosed:
    """f^{-1}(Y_{k1} x ... x Y_{km}) for f = components."""

    n: int
    components: tuple
    blocks: tuple

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(_poly(c) for c in self.components))
        object.__setattr__(self, "blocks", tuple(int(b) for b in self.blocks))
        if any(b <= 0 for b in self.blocks):
            raise ValueError("block sizes must be positive")
        if sum(self.blocks) != len(self.components):
            raise ValueError("block sizes must add up to the number of components")
        allowed = set(coord_names(self.n))
        for c in self.components:
            extra = set(c.used_vars()) - allowed
            if extra:
                raise ValueError(f"component {c} uses {sorted(extra)} outside x1..x{self.n}")

    @classmethod
    def full(cls, n):
        return cls(n, (), ())

    @classmethod
    def empty(cls, n):
        return cls(n, (MPoly.const(1),), (1,))

    def block_components(self):
        out, i = [], 0
        for b in self.blocks:
            out.append(self.components[i:i + b])
            i += b
        return out

    def intersect(self, other):
        _check_arity(self, other)
        return BasicClosed(self.n, self.components + other.components,
                           self.blocks + other.blocks).simplify()

    def simplify(self):
        """Drop blocks that hold everywhere; collapse to the empty marker."""
        comps, blocks = [], []
        for blk in self.block_components():
            if any(c.is_zero() for c in blk):
                continue
            if all(c.is_constant() for c in blk):
                if is_k_dependent([c.constant() for c in blk]):
                    continue
                return BasicClosed.empty(self.n)
            comps.extend(blk)
            blocks.append(len(blk))
        return BasicClosed(self.n, tuple(comps), tuple(blocks))

    def is_empty_marker(self):
        return self.blocks == (1,) and self.components[0].is_constant() and not self.components[0].is_zero()

    def is_full_marker(self):
        return not self.blocks

    def to_json(self):
        return {"map": [str(c) for c in self.components], "blocks": list(self.blocks)}

    def sort_key(self):
        return json.dumps(self.to_json())

    def rename_into(self, n, offset):
        """Same set viewed in a product space: x_i becomes x_{i+offset}."""
        ren = {f"x{i}": f"x{i + offset}" for i in range(1, self.n + 1)}
        return BasicClosed(n, tuple(c.rename(ren) for c in self.components), self.blocks)


def _check_arity(a, b):
    if a.n != b.n:
        raise ValueError(f"arity mismatch: {a.n} vs {b.n}")


@lru_cache(maxsize=200_000)
def _member_basic(S, point):
    values = dict(zip(coord_names(S.n), point))
    for blk in S.block_components():
        vals = [c.evaluate(values) for c in blk]
        if not is_k_dependent(vals):
            return False
    return True


# closed sets

@dataclass(frozen=True)
class ClosedSet:
    """Finite union of basic closed sets; no members means the empty set."""

    n: int
    members: tuple

    def __post_init__(self):
        for m in self.members:
            if m.n != self.n:
                raise ValueError("members must share the ambient arity")

    @classmethod
    def of(cls, n, members):
        members = [m.simplify() for m in members]
        members = [m for m in members if not m.is_empty_marker()]
        if any(m.is_full_marker() for m in members):
            return cls(n, (BasicClosed.full(n),))
        uniq = {m.sort_key(): m for m in members}
        return cls(n, tuple(uniq[k] for k in sorted(uniq)))

    @classmethod
    def full(cls, n):
        return cls(n, (BasicClosed.full(n),))

    @classmethod
    def empty(cls, n):
        return cls(n, ())

    @classmethod
    def basic(cls, b):
        return cls.of(b.n, [b])

    def is_full_marker(self):
        return any(m.is_full_marker() for m in self.members)

    def is_empty_marker(self):
        return not self.members

    def to_json(self):
        return [m.to_json() for m in self.members]


def intersect(A, B):
    A, B = _as_closed(A), _as_closed(B)
    _check_arity(A, B)
    return ClosedSet.of(A.n, [a.intersect(b) for a in A.members for b in B.members])


def union(A, B):
    A, B = _as_closed(A), _as_closed(B)
    _check_arity(A, B)
    return ClosedSet.of(A.n, list(A.members) + list(B.members))


def product_set(A, B):
    A, B = _as_closed(A), _as_closed(B)
    n = A.n + B.n
    out = []
    for a in A.members:
        for b in B.members:
            a2 = a.rename_into(n, 0)
            b2 = b.rename_into(n, A.n)
            out.append(a2.intersect(b2))
    return ClosedSet.of(n, out)


def _as_closed(S):
    if isinstance(S, BasicClosed):
        return ClosedSet.basic(S)
    if isinstance(S, ClosedSet):
        return S
    raise TypeError(f"expected a closed set, got {type(S).__name__}")


# constructible sets

@dataclass(frozen=True)
class Constructible:
    """Union over pairs of C minus D, with C and D closed."""

    n: int
    pairs: tuple

    @classmethod
    def of(cls, n, pairs):
        kept = {}
        for C, D in pairs:
            C, D = _as_closed(C), _as_closed(D)
            if C.is_empty_marker() or D.is_full_marker():
                continue
            Ckeys = {m.sort_key() for m in C.members}
            Dkeys = {m.sort_key() for m in D.members}
            if Ckeys <= Dkeys:
                continue
            key = json.dumps({"C": C.to_json(), "D": D.to_json()})
            kept[key] = (C, D)
        return cls(n, tuple(kept[k] for k in sorted(kept)))

    @classmethod
    def closed(cls, C):
        C = _as_closed(C)
        return cls.of(C.n, [(C, ClosedSet.empty(C.n))])

    @classmethod
    def full(cls, n):
        return cls.closed(ClosedSet.full(n))

    @classmethod
    def empty(cls, n):
        return cls(n, ())

    def to_json(self):
        return {"arity": self.n,
                "pairs": [{"C": C.to_json(), "D": D.to_json()} for C, D in self.pairs]}


def _as_constructible(X):
    if isinstance(X, Constructible):
        return X
    return Constructible.closed(X)


def complement(X):
    """Complement of a closed or constructible set."""
    if isinstance(X, (BasicClosed, ClosedSet)):
        C = _as_closed(X)
        return Constructible.of(C.n, [(ClosedSet.full(C.n), C)])
    X = _as_constructible(X)
    result = Constructible.full(X.n)
    for C, D in X.pairs:
        # complement of C minus D is (Omega minus C) union D
        piece = Constructible.of(X.n, [(ClosedSet.full(X.n), C), (D, ClosedSet.empty(X.n))])
        result = c_intersect(result, piece)
    return result


complement_to_constructible = complement


def c_union(X, Y):
    X, Y = _as_constructible(X), _as_constructible(Y)
    _check_arity(X, Y)
    return Constructible.of(X.n, list(X.pairs) + list(Y.pairs))


def c_intersect(X, Y):
    X, Y = _as_constructible(X), _as_constructible(Y)
    _check_arity(X, Y)
    return Constructible.of(X.n, [
        (intersect(C1, C2), union(D1, D2)) for C1, D1 in X.pairs for C2, D2 in Y.pairs])


def c_difference(X, Y):
    return c_intersect(X, complement(_as_constructible(Y)))


# membership

def _point(p):
    return tuple(OmegaElement.coerce(v) for v in p)


def member(S, point):
    point = _point(point)
    n = S.n
    if len(point) != n:
        raise ValueError(f"point has {len(point)} coordinates, set lives in dimension {n}")
    if isinstance(S, BasicClosed):
        return _member_basic(S, point)
    if isinstance(S, ClosedSet):
        return any(_member_basic(m, point) for m in S.members)
    if isinstance(S, Constructible):
        return any(member(C, point) and not member(D, point) for C, D in S.pairs)
    raise TypeError(f"cannot test membership in {type(S).__name__}")


# catalog constructors

def mk_yn(n):
    if n < 1:
        raise ValueError("n must be at least 1")
    return BasicClosed(n, tuple(MPoly.var(v) for v in coord_names(n)), (n,))


def mk_kn(n):
    if n < 1:
        raise ValueError("n must be at least 1")
    comps = []
    for v in coord_names(n):
        comps.extend([MPoly.var(v), MPoly.const(1)])
    return ClosedSet.basic(BasicClosed(n, tuple(comps), (2,) * n))


def mk_span(alphas):
    alphas = [OmegaElement.coerce(a) for a in alphas]
    if not alphas:
        raise ValueError("span needs at least one generator")
    basis = [alphas[i] for i in independent_subset(alphas)]
    comps = tuple(MPoly.const(a) for a in basis) + (MPoly.var("x1"),)
    return ClosedSet.basic(BasicClosed(1, comps, (len(comps),)))


def mk_xn(n):
    """Domain of the coordinate functions: (alpha, beta) with alpha independent, beta in its span."""
    m = n + 1
    C = BasicClosed(m, tuple(MPoly.var(v) for v in coord_names(m)), (m,))
    D = BasicClosed(m, tuple(MPoly.var(v) for v in coord_names(n)), (n,))
    return Constructible.of(m, [(C, D)])


def mk_fiber_fni(n, i, a):
    """Points (alpha, beta) where a * alpha_i - beta is dependent with the other alphas."""
    if not 1 <= i <= n:
        raise ValueError("need 1 <= i <= n")
    a = Fraction(a)
    m = n + 1
    xs = coord_names(m)
    comps = []
    for j in range(1, n + 1):
        if j == i:
            comps.append(a * MPoly.var(xs[j - 1]) - MPoly.var(xs[n]))
        else:
            comps.append(MPoly.var(xs[j - 1]))
    return ClosedSet.basic(BasicClosed(m, tuple(comps), (n,)))


def omega_n(n):
    return ClosedSet.full(n)


# structural whitelist of irreducible closed sets

def _is_var(p, name):
    return p == MPoly.var(name)


def irreducible_kind(b):
    """Name of the catalog family ``b`` belongs to, or ``None``."""
    n = b.n
    xs = coord_names(n)
    comps = b.components
    if not b.blocks:
        return "omega"
    if b.blocks == (n,) and all(_is_var(c, v) for c, v in zip(comps, xs)):
        return "Y"
    if b.blocks == (2,) * n and all(
            _is_var(comps[2 * j], xs[j]) and comps[2 * j + 1] == 1 for j in range(n)):
        return "kpower"
    if n == 1 and len(b.blocks) == 1 and _is_var(comps[-1], "x1") and all(
            c.is_constant() for c in comps[:-1]):
        if not is_k_dependent([c.constant() for c in comps[:-1]]):
            return "span"
    if n >= 2 and b.blocks == (n - 1,):
        k = n - 1
        lin = [j for j in range(k) if not _is_var(comps[j], xs[j])]
        if len(lin) == 1:
            j = lin[0]
            cand = comps[j] + MPoly.var(xs[n - 1])
            if cand.is_rational() and cand.used_vars() in ((), (xs[j],)) and cand.total_degree() <= 1 \
                    and cand.constant() == 0:
                return "fiber"
    return None


def _sample_in(b, rng, count):
    """Points of the whitelisted basic set ``b`` (used as nonemptiness witnesses)."""
    kind = irreducible_kind(b)
    n = b.n
    off = max(coefficient_order(b.components) + 1, 0) + 8
    pts = []
    if kind == "omega":
        pts.append(generic_point(n, off))
        pts.extend(random_point(rng, n) for _ in range(count - 1))
    elif kind == "Y":
        for s in range(count):
            base = [OmegaElement.t(off + i) for i in range(n - 1)]
            combo = sum((g * random_rational(rng, 5) for g in base), OmegaElement(0))
            pts.append(tuple(base + [combo]))
    elif kind == "kpower":
        pts.extend(tuple(OmegaElement(random_rational(rng)) for _ in range(n)) for _ in range(count))
    elif kind == "span":
        gens = [c.constant() for c in b.components[:-1]]
        for _ in range(count):
            v = sum((OmegaElement.coerce(g) * random_rational(rng, 5) for g in gens), OmegaElement(0))
            pts.append((v,))
    elif kind == "fiber":
        k = n - 1
        j = next(j for j in range(k) if not _is_var(b.components[j], f"x{j + 1}"))
        a = (b.components[j] + MPoly.var(f"x{n}")).terms
        coef = next(iter(a.values())) if a else Fraction(0)
        for _ in range(count):
            alphas = [OmegaElement.t(off + i) for i in range(k)]
            beta = coef * alphas[j]
            for i, al in enumerate(alphas):
                if i != j:
                    beta = beta + al * random_rational(rng, 5)
            pts.append(tuple(alphas + [beta]))
    return pts


# closure

@dataclass(frozen=True)
class ClosureResult:
    closed: ClosedSet
    tag: str  # "exact" or "upperBound"

    def to_json(self):
        return {"arity": self.closed.n, "tag": self.tag, "closed": self.closed.to_json()}


def closure(X, samples=100, seed=0):
    """Union of the C-parts; exact when every part is certified irreducible with C minus D nonempty."""
    X = _as_constructible(X)
    rng = rng_from(seed)
    parts = []
    exact = True
    for C, D in X.pairs:
        per = max(4, samples // max(1, len(C.members)))
        for b in C.members:
            parts.append(b)
            # C minus D stays dense in an irreducible b once it has one point
            if irreducible_kind(b) is None or all(member(D, p) for p in _sample_in(b, rng, per)):
                exact = False
    return ClosureResult(ClosedSet.of(X.n, parts), "exact" if exact else "upperBound")


# full-ambient test

def is_full_ambient(S):
    """True iff the basic closed set is all of the ambient space.

    Each block must hold at a generic point whose coordinates are t's beyond
    every index used by the coefficients; at such a point dependence of the
    values is dependence of the component polynomials themselves.
    """
    if isinstance(S, ClosedSet):
        # the ambient space is irreducible, so a union is full iff a member is
        return any(is_full_ambient(b) for b in S.members)
    b = S.simplify()
    if b.is_full_marker():
        return True
    pt = generic_point(b.n, coefficient_order(b.components) + 1)
    return member(b, pt)


# Zariski description of a closed set restricted to k^n

def _rational_decomposition(components):
    """Basis tau of the span of all coefficients, and rational polys g[i][l]."""
    coeffs = []
    for c in components:
        for v in c.coefficients():
            v = OmegaElement.coerce(v)
            if v not in coeffs:
                coeffs.append(v)
    ones = [OmegaElement(1)] + [c for c in coeffs if c != 1]
    basis = [ones[i] for i in independent_subset(ones)]
    if not coeffs:
        basis = []
    g = []
    for c in components:
        row = [MPoly.zero() for _ in basis]
        for e, v in c.terms.items():
            coords = k_coordinates(basis, v)
            mono = MPoly({e: 1}, c.vars)
            for l, q in enumerate(coords):
                if q:
                    row[l] = row[l] + mono * q
        g.append(row)
    return basis, g


def _minors(M, m):
    from itertools import combinations
    rows = len(M)
    if rows < m:
        return [MPoly.zero()]
    out = []
    for sel in combinations(range(rows), m):
        sub = [M[r] for r in sel]
        d = det(sub, zero=MPoly.zero())
        if not d.is_zero():
            if d.is_constant():
                return [MPoly.const(1)] if not out else out + [MPoly.const(1)]
            out.append(d)
    return out


def zariski_restrict_k(C, n=None):
    """Polynomials over Q whose common zeros in k^n are exactly C meet k^n."""
    if isinstance(C, ClosedSet):
        if not C.members:
            return [MPoly.const(1)]
        families = [zariski_restrict_k(b, C.n) for b in C.members]
        out = families[0]
        for fam in families[1:]:
            out = [p * q for p in out for q in fam]
        return _dedupe(out)
    out = []
    for blk in C.block_components():
        basis, g = _rational_decomposition(blk)
        m = len(blk)
        # matrix: rows = basis elements, columns = components
        M = [[g[i][l] for i in range(m)] for l in range(len(basis))]
        out.extend(_minors(M, m))
    return _dedupe(out)


def _dedupe(polys):
    seen = {}
    for p in polys:
        if p.is_zero():
            continue
        if p.is_constant():
            p = MPoly.const(1)
        else:
            p = p / p.leading()[1]
        seen.setdefault(str(p), p)
    return [seen[k] for k in sorted(seen)]


# serialization

def serialize(X):
    X = _as_constructible(X)
    return json.dumps(X.to_json(), separators=(",", ":")).encode()


def _load_basic(obj, n):
    if not isinstance(obj, dict) or set(obj) != {"map", "blocks"}:
        raise SchemaError(f"basic closed set must have exactly 'map' and 'blocks': {obj!r}")
    comps, blocks = obj["map"], obj["blocks"]
    if not isinstance(comps, list) or not all(isinstance(c, str) for c in comps):
        raise SchemaError("'map' must be a list of polynomial strings")
    if not isinstance(blocks, list) or not all(isinstance(b, int) and not isinstance(b, bool) and b > 0
                                               for b in blocks):
        raise SchemaError("'blocks' must be a list of positive integers")
    if sum(blocks) != len(comps):
        raise SchemaError("block sizes do not add up to the map length")
    try:
        polys = tuple(parse_poly(c, variables=coord_names(n)) for c in comps)
        return BasicClosed(n, polys, tuple(blocks))
    except (ParseError, ValueError) as e:
        raise SchemaError(str(e)) from None


def load_closed(obj, n):
    if not isinstance(obj, list):
        raise SchemaError("closed set must be a list of basic closed sets")
    return ClosedSet.of(n, [_load_basic(b, n) for b in obj])


def from_json(obj):
    if not isinstance(obj, dict) or "arity" not in obj or "pairs" not in obj:
        raise SchemaError("expected an object with 'arity' and 'pairs'")
    n = obj["arity"]
    if not isinstance(n, int) or n < 0:
        raise SchemaError("'arity' must be a nonnegative integer")
    if not isinstance(obj["pairs"], list):
        raise SchemaError("'pairs' must be a list")
    pairs = []
    for pr in obj["pairs"]:
        if not isinstance(pr, dict) or set(pr) != {"C", "D"}:
            raise SchemaError("each pair must have exactly 'C' and 'D'")
        pairs.append((load_closed(pr["C"], n), load_closed(pr["D"], n)))
    return Constructible.of(n, pairs)


def deserialize(data):
    try:
        obj = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise SchemaError(f"invalid JSON: {e}") from None
    return from_json(obj)
