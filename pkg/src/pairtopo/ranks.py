"""Small rank, small dimension and Morley-rank values.

``sdim`` is reported as a pair of bounds and is exact only when they meet.
Lower bounds come from points of the set (their small rank over the
parameters of the presentation) and from coordinate sections whose pull-back
has nonempty interior.  Upper bounds come from the closure: a proper closed
set has small dimension below the ambient one, and coordinates forced into
a finite-dimensional span over the constants contribute nothing.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import total_ordering
from itertools import combinations, product

from .difffield import OmegaElement, in_scl, is_k_dependent, trdeg_rank
from .exactalg import MPoly
from .pairsets import (
    BasicClosed,
    ClosedSet,
    Constructible,
    _as_constructible,
    _sample_in,
    closure,
    coefficient_order,
    coord_names,
    irreducible_kind,
    is_full_ambient,
    member,
)
from .sampling import generic_point, point_pool, rng_from


@total_ordering
@dataclass(frozen=True)
class OrdinalRank:
    """The ordinal omega * omega_coeff + finite."""

    omega: int = 0
    finite: int = 0

    def __post_init__(self):
        if self.omega < 0 or self.finite < 0:
            raise ValueError("ordinal coefficients must be natural numbers")

    def __lt__(self, other):
        return (self.omega, self.finite) < (other.omega, other.finite)

    def __add__(self, other):
        if other.omega:
            return OrdinalRank(self.omega + other.omega, other.finite)
        return OrdinalRank(self.omega, self.finite + other.finite)

    def __str__(self):
        if not self.omega:
            return str(self.finite)
        head = "ω" if self.omega == 1 else f"ω·{self.omega}"
        return head if not self.finite else f"{head}+{self.finite}"

    def to_json(self):
        return {"omega": self.omega, "finite": self.finite}


# ranks of tuples

def small_rank(a, A=()):
    """Pregeometry dimension of the tuple ``a`` over ``A`` (greedy exchange)."""
    base = [OmegaElement.coerce(x) for x in A]
    count = 0
    for x in a:
        x = OmegaElement.coerce(x)
        if not in_scl(x, base):
            base.append(x)
            count += 1
    return count


def point_mr(a, A=()):
    """omega * rk(a/A) + trdeg(A a / A), exactly as the formula reads."""
    a = [OmegaElement.coerce(x) for x in a]
    A = [OmegaElement.coerce(x) for x in A]
    return OrdinalRank(small_rank(a, A), trdeg_rank(A + a) - trdeg_rank(A))


# interior

@dataclass(frozen=True)
class InteriorResult:
    value: object           # True, False or None for unknown
    witness: tuple = None
    reason: str = ""


def has_nonempty_interior(X):
    """Nonempty interior test.

    True needs a pair whose C is everything and a generic point outside D.
    False holds as soon as every C is proper: X then lies in a proper closed
    set, and such sets have no interior.
    """
    X = _as_constructible(X)
    n = X.n
    undecided = False
    for C, D in X.pairs:
        if not is_full_ambient(C):
            continue
        order = max(coefficient_order(b.components) for b in C.members + D.members) \
            if C.members + D.members else -1
        pt = generic_point(n, order + 1)
        if not member(D, pt):
            return InteriorResult(True, pt, "generic point outside the removed closed set")
        undecided = True
    if undecided:
        return InteriorResult(None, None, "full closed part with a generic point removed")
    return InteriorResult(False, None, "every closed part is proper")


# pull-back along polynomial maps

def pullback(X, maps, k):
    """{u in Omega^k : (maps(u)) in X} for a list of n polynomials in x1..xk."""
    X = _as_constructible(X)
    names = coord_names(X.n)
    sub = dict(zip(names, maps))

    def pull(C):
        return ClosedSet.of(k, [BasicClosed(k, tuple(c.subs(sub) for c in b.components), b.blocks)
                                for b in C.members])

    return Constructible.of(k, [(pull(C), pull(D)) for C, D in X.pairs])


def _sections(n, S):
    """Candidate maps u -> x with x_S = u and the other coordinates simple."""
    k = len(S)
    us = [MPoly.var(f"x{i}") for i in range(1, k + 1)]
    rest = [i for i in range(n) if i not in S]
    choices = [MPoly.const(0), MPoly.const(1)] + us
    for pick in product(choices, repeat=len(rest)):
        comps = [None] * n
        for pos, i in enumerate(S):
            comps[i] = us[pos]
        for i, c in zip(rest, pick):
            comps[i] = c
        yield comps


# upper bounds

def _pinned(b):
    """Coordinates forced to be small by a single block of ``b``."""
    pinned = set()
    for blk in b.block_components():
        varying = [c for c in blk if not c.is_constant()]
        if len(varying) != 1:
            continue
        used = varying[0].used_vars()
        if len(used) != 1:
            continue
        consts = [c.constant() for c in blk if c.is_constant()]
        if consts and is_k_dependent(consts):
            continue
        pinned.add(used[0])
    return pinned


def _upper_for(b):
    n = b.n
    if is_full_ambient(b):
        return n
    return min(n - 1, n - len(_pinned(b)))


@dataclass
class SdimReport:
    lower: int
    upper: int
    certificates: dict = field(default_factory=dict)

    @property
    def exact(self):
        return self.lower == self.upper

    @property
    def value(self):
        return self.lower if self.exact else None

    def to_json(self):
        return {"sdim": self.value if self.exact else "unknown",
                "lower": self.lower, "upper": self.upper,
                "certificates": self.certificates}


def _parameters(X):
    out = []
    for C, D in X.pairs:
        for b in C.members + D.members:
            for c in b.components:
                for v in c.coefficients():
                    if isinstance(v, OmegaElement) and v not in out:
                        out.append(v)
    return out


def _fmt_point(p):
    return "(" + ", ".join(str(v) for v in p) + ")"


def sdim(X, samples=100, seed=0):
    X = _as_constructible(X)
    n = X.n
    certs = {}
    if not X.pairs:
        return SdimReport(0, 0, {"empty": True})
    interior = has_nonempty_interior(X)
    if interior.value:
        certs["interior"] = _fmt_point(interior.witness)
        return SdimReport(n, n, certs)
    # upper bound over the closure's members
    cl = closure(X, samples=samples, seed=seed)
    upper = max((_upper_for(b) for b in cl.closed.members), default=0)
    certs["upperFrom"] = "closure members" if upper < n else "ambient"
    # lower bound: points of X
    A = _parameters(X)
    rng = rng_from(seed)
    lower, best = 0, None
    for C, D in X.pairs:
        for b in C.members:
            if irreducible_kind(b) is None:
                continue
            for p in _sample_in(b, rng, 8):
                if member(X, p):
                    r = small_rank(p, A)
                    if r > lower:
                        lower, best = r, p
    for p in point_pool(n, min(samples, 50), seed=rng.randrange(2**32)):
        if lower >= upper:
            break
        if member(X, p):
            r = small_rank(p, A)
            if r > lower:
                lower, best = r, p
    if best is not None:
        certs["witness"] = _fmt_point(best)
    # lower bound: sections whose pull-back has interior
    for k in range(upper, lower, -1):
        found = None
        for S in combinations(range(n), k):
            for maps in _sections(n, list(S)):
                if has_nonempty_interior(pullback(X, maps, k)).value:
                    found = (S, maps)
                    break
            if found:
                break
        if found:
            S, maps = found
            lower = k
            certs["projection"] = [i + 1 for i in S]
            certs["section"] = [str(m) for m in maps]
            break
    return SdimReport(lower, upper, certs)


# Morley rank

CATALOG = ("kPower", "omegaPower", "span", "finiteSet", "kPlusKAlpha")


class NotInCatalog(KeyError):
    pass


def mr_catalog(kind, size=1):
    if kind == "kPower":
        return OrdinalRank(0, size)
    if kind == "omegaPower":
        return OrdinalRank(size, 0)
    if kind == "span":
        return OrdinalRank(0, size)
    if kind == "finiteSet":
        return OrdinalRank(0, 0)
    if kind == "kPlusKAlpha":
        return OrdinalRank(0, 2)
    raise NotInCatalog(kind)


def catalog_match(X):
    """(kind, size) when X is syntactically a catalog set, else None."""
    X = _as_constructible(X)
    if len(X.pairs) != 1:
        return None
    C, D = X.pairs[0]
    if D.members or len(C.members) != 1:
        return None
    b = C.members[0]
    kind = irreducible_kind(b)
    if kind == "omega":
        return ("omegaPower", X.n)
    if kind == "kpower":
        return ("kPower", X.n)
    if kind == "Y" and X.n == 1:
        return ("finiteSet", 1)
    if kind == "span":
        return ("span", len(b.components) - 1)
    return None


@dataclass
class MRBounds:
    lower: OrdinalRank
    upper: OrdinalRank
    strict_upper: bool = False
    certificates: dict = field(default_factory=dict)

    @property
    def exact(self):
        return self.lower == self.upper and not self.strict_upper

    def to_json(self):
        if self.exact:
            mr = {**self.lower.to_json(), "strictUpper": False}
        else:
            mr = {"lower": self.lower.to_json(), "upper": self.upper.to_json(),
                  "strictUpper": self.strict_upper}
        return {"mr": mr, "certificates": self.certificates}

    def __str__(self):
        if self.exact:
            return str(self.lower)
        rel = "<" if self.strict_upper else "<="
        return f"{self.lower} <= MR {rel} {self.upper}"


def mr_bounds(X, samples=100, seed=0):
    X = _as_constructible(X)
    n = X.n
    top = OrdinalRank(n, 0)
    match = catalog_match(X)
    if match is not None:
        v = mr_catalog(*match)
        return MRBounds(v, v, False, {"catalog": f"{match[0]}({match[1]})"})
    interior = has_nonempty_interior(X)
    if interior.value:
        return MRBounds(top, top, False, {"interior": _fmt_point(interior.witness)})
    rep = sdim(X, samples=samples, seed=seed)
    lower = OrdinalRank(rep.lower, 0)
    strict = interior.value is False
    certs = {"sdim": rep.to_json()}
    return MRBounds(lower, top, strict, certs)
