"""Existential elimination and decision over an algebraically closed field.

Polynomials have rational coefficients and the target field is the algebraic
closure of Q.  Two independent mechanisms are provided: a Nullstellensatz
decision (:func:`decide_exists`) and a parametric elimination
(:func:`eliminate_exists`) that branches on leading coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product

from sympy import QQ
from sympy.polys.rings import ring

from .exactalg import (
    DEFAULT_MAX_STEPS,
    BudgetExceeded,
    MPoly,
    groebner,
    normal_form,
    saturate_decide,
    sorted_vars,
)

DEFAULT_DEGREE_CAP = 8


class DegreeCapExceeded(BudgetExceeded):
    pass


def _poly(p):
    return p if isinstance(p, MPoly) else MPoly.const(p)


@dataclass(frozen=True)
class KSystem:
    """exists exist_vars: equations = 0 and inequation != 0."""

    exist_vars: tuple
    free_vars: tuple
    equations: tuple
    inequation: MPoly = field(default_factory=lambda: MPoly.const(1))

    def __post_init__(self):
        object.__setattr__(self, "exist_vars", tuple(self.exist_vars))
        object.__setattr__(self, "free_vars", tuple(self.free_vars))
        object.__setattr__(self, "equations", tuple(_poly(e) for e in self.equations))
        object.__setattr__(self, "inequation", _poly(self.inequation))
        allowed = set(self.exist_vars) | set(self.free_vars)
        for p in self.equations + (self.inequation,):
            if not p.is_rational():
                raise TypeError(f"coefficients must be rational: {p}")
            extra = set(p.used_vars()) - allowed
            if extra:
                raise ValueError(f"undeclared variables {sorted(extra)} in {p}")

    def substitute(self, values):
        """Fix (some) free variables to rational values."""
        vals = {v: Fraction(values[v]) for v in self.free_vars if v in values}
        return KSystem(
            self.exist_vars,
            tuple(v for v in self.free_vars if v not in vals),
            tuple(e.subs(vals) for e in self.equations),
            self.inequation.subs(vals),
        )


@dataclass(frozen=True)
class KConstructible:
    """Union of V(E) minus V(N) over the pairs (E, N)."""

    free_vars: tuple
    pairs: tuple

    def member(self, values):
        vals = {v: Fraction(values[v]) for v in self.free_vars}
        for E, N in self.pairs:
            if all(e.evaluate(vals) == 0 for e in E) and N.evaluate(vals) != 0:
                return True
        return False

    def is_empty(self):
        """Syntactic emptiness: only the canonical empty pair remains."""
        return all(len(E) == 1 and E[0].is_constant() and not E[0].is_zero()
                   for E, _ in self.pairs)

    def is_everything(self):
        return any(not E and N.is_constant() and not N.is_zero() for E, N in self.pairs)

    def max_degree(self, vars=None):
        polys = [p for E, N in self.pairs for p in (*E, N)]
        return max((p.total_degree() for p in polys), default=0)

    def to_json(self):
        return [{"E": [str(e) for e in E], "N": str(N)} for E, N in self.pairs]

    def __str__(self):
        parts = []
        for E, N in self.pairs:
            eqs = ", ".join(str(e) for e in E) or "-"
            parts.append(f"V({eqs}) \\ V({N})")
        return " u ".join(parts)


EMPTY_PAIR = ((MPoly.const(1),), MPoly.const(1))


def decide_exists(system, max_steps=DEFAULT_MAX_STEPS):
    """Satisfiability of a closed system over the algebraic closure of Q."""
    if system.free_vars:
        raise ValueError("decide_exists expects a system without free variables")
    return saturate_decide(list(system.equations), system.inequation, max_steps)


def decide_at(system, values, max_steps=DEFAULT_MAX_STEPS):
    return decide_exists(system.substitute(values), max_steps)


# helpers on univariate views

def _from_coeffs(coeffs, y):
    out = MPoly.zero()
    yv = MPoly.var(y)
    for i, c in enumerate(coeffs):
        if not c.is_zero():
            out = out + c * yv ** i
    return out


def prem(f, g, y):
    """Pseudo-remainder of ``f`` by ``g`` with respect to ``y``."""
    G = g.univariate(y)
    d = len(G) - 1
    if d < 0:
        raise ZeroDivisionError("pseudo-division by zero")
    lc = G[d]
    F = f.univariate(y)
    while len(F) - 1 >= d and F:
        k = len(F) - 1
        c = F[k]
        shift = k - d
        F = [lc * F[i] - (c * G[i - shift] if i >= shift else 0) for i in range(k)]
        while F and F[-1].is_zero():
            F.pop()
    return _from_coeffs(F, y)


@lru_cache(maxsize=64)
def _qq_ring(names):
    return ring(",".join(names), QQ)[0] if names else None


def sqf_part(p):
    """Squarefree part (same zero set), made primitive over Z."""
    p = p.compact()
    if p.is_constant():
        return MPoly.const(1) if not p.is_zero() else p
    names = p.vars
    R = _qq_ring(names)
    P = R.from_dict({e: QQ(c.numerator, c.denominator) for e, c in p.terms.items()})
    S = P.sqf_part()
    terms = {e: Fraction(int(c.numerator), int(c.denominator)) for e, c in S.items()}
    return MPoly(terms, names)


def _canonical(p):
    """Scale to a monic leading term (grevlex) for stable output."""
    if p.is_zero():
        return p
    _, lc = p.leading()
    return p / lc


class _Eliminator:
    def __init__(self, max_steps, degree_cap):
        self.max_steps = max_steps
        self.degree_cap = degree_cap

    def consistent(self, eqs, neq):
        return saturate_decide(list(eqs), neq, self.max_steps)

    def one_var(self, eqs, neq, y):
        """Pairs (E, N) free of ``y`` equivalent to exists y (eqs = 0, neq != 0)."""
        E0 = [e for e in eqs if e.degree(y) <= 0 and not e.is_zero()]
        F = [e for e in eqs if e.degree(y) > 0]
        out = []
        self._rec(E0, F, neq, y, out)
        return out

    def _rec(self, E0, F, g, y, out):
        if g.is_zero() or not self.consistent(E0 + F, g):
            return
        if not F:
            coeffs = [c for c in g.univariate(y) if not c.is_zero()]
            for c in coeffs:
                out.append((list(E0), c))
            return
        F = sorted(F, key=lambda p: (p.degree(y), len(p.terms), str(p)))
        f, rest = F[0], F[1:]
        coeffs = f.univariate(y)
        d = len(coeffs) - 1
        lc = coeffs[d]
        # branch 1: leading coefficient vanishes
        if not lc.is_constant():
            red = _from_coeffs(coeffs[:-1], y)
            E1, F1 = list(E0) + [lc], list(rest)
            if red.degree(y) > 0:
                F1.append(red)
            elif not red.is_zero():
                E1.append(red)
            self._rec(E1, F1, g, y, out)
        # branch 2: leading coefficient invertible
        g2 = g * lc if not lc.is_constant() else g
        if rest:
            E2, F2 = list(E0), [f]
            for h in rest:
                r = prem(h, f, y)
                if r.degree(y) > 0:
                    F2.append(r)
                elif not r.is_zero():
                    E2.append(r)
            self._rec(E2, F2, g2, y, out)
            return
        if not self.consistent(E0 + [f], g2):
            return
        r = MPoly.const(1)
        gy = g.univariate(y)
        if len(gy) > 1:
            for _ in range(d):
                r = prem(r * g, f, y)
        else:
            r = g
        for c in r.univariate(y):
            if not c.is_zero():
                out.append((list(E0), lc * c if not lc.is_constant() else c))

    def eliminate(self, eqs, neq, exist_vars):
        pairs = [(list(eqs), neq)]
        for y in reversed(exist_vars):
            nxt = []
            for E, N in pairs:
                nxt.extend(self.one_var(E, N, y))
            pairs = nxt
        return pairs


def _normalize_pairs(pairs, free_vars, max_steps):
    seen = {}
    for E, N in pairs:
        G = groebner(list(E), "grevlex", vars=sorted_vars(free_vars), max_steps=max_steps) if E else []
        if G and G[0].is_constant():
            continue
        N = normal_form(N, G) if G else N
        if N.is_zero():
            continue
        N = _canonical(sqf_part(N))
        if not N.is_constant() and G and normal_form(N, G).is_zero():
            continue
        N = N.compact()
        key = (tuple(str(g) for g in G), str(N))
        if key not in seen:
            seen[key] = (tuple(g.compact() for g in G), N)
    items = [seen[k] for k in sorted(seen, key=lambda k: (len(k[0]), k))]
    # drop a pair subsumed syntactically by a pair with the same E and N = 1
    full = {tuple(str(g) for g in E) for E, N in items if N.is_constant()}
    items = [(E, N) for E, N in items
             if N.is_constant() or tuple(str(g) for g in E) not in full]
    if not items:
        return (EMPTY_PAIR,)
    return tuple(items)


def _check_degree(polys, cap):
    for p in polys:
        if p.total_degree() > cap:
            raise DegreeCapExceeded(f"total degree {p.total_degree()} of {p} exceeds cap {cap}")


def eliminate_exists(system, max_steps=DEFAULT_MAX_STEPS, degree_cap=DEFAULT_DEGREE_CAP):
    """A :class:`KConstructible` in the free variables with the same points."""
    _check_degree(system.equations + (system.inequation,), degree_cap)
    el = _Eliminator(max_steps, degree_cap)
    pairs = el.eliminate(list(system.equations), system.inequation, system.exist_vars)
    return KConstructible(system.free_vars, _normalize_pairs(pairs, system.free_vars, max_steps))


def union(a, b):
    if a.free_vars != b.free_vars:
        raise ValueError("free variables differ")
    return KConstructible(a.free_vars, _normalize_pairs(
        [p for p in a.pairs + b.pairs if p != EMPTY_PAIR], a.free_vars, DEFAULT_MAX_STEPS))


def from_system(system, max_steps=DEFAULT_MAX_STEPS):
    """KConstructible of a quantifier-free system (no existential variables)."""
    if system.exist_vars:
        raise ValueError("system still has existential variables")
    return KConstructible(system.free_vars, _normalize_pairs(
        [(list(system.equations), system.inequation)], system.free_vars, max_steps))


def is_subset(a, b, max_steps=DEFAULT_MAX_STEPS):
    """Decide ``a <= b`` over the algebraic closure.

    For every pair (E, N) of ``a`` the system "E = 0, N != 0 and outside every
    pair of ``b``" must be unsolvable.  Being outside V(E') minus V(N') means
    some e' in E' is nonzero or N' = 0, so the choices are enumerated.
    """
    for E, N in a.pairs:
        options = []
        for Eb, Nb in b.pairs:
            opts = [("neq", e) for e in Eb] + [("eq", Nb)]
            options.append(opts)
        for choice in product(*options):
            eqs = list(E) + [p for kind, p in choice if kind == "eq"]
            neq = N
            for kind, p in choice:
                if kind == "neq":
                    neq = neq * p
            if saturate_decide(eqs, neq, max_steps):
                return False
    return True


def equivalent(a, b, max_steps=DEFAULT_MAX_STEPS):
    return is_subset(a, b, max_steps) and is_subset(b, a, max_steps)
