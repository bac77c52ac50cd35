"""Buchberger's algorithm over Q with the sugar strategy.

Pairs are pruned with Buchberger's coprime criterion and the Gebauer-Moeller
chain criterion.  Every S-polynomial reduction counts against a step budget;
exceeding it raises :class:`BudgetExceeded` instead of truncating silently.
"""
from __future__ import annotations

import threading
from fractions import Fraction

from .poly import MPoly, order_key, sorted_vars, unify_all

DEFAULT_MAX_STEPS = 10**6


class BudgetExceeded(RuntimeError):
    pass


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _coprime(a, b):
    return all(not (x and y) for x, y in zip(a, b))


class _Basis:
    """Working state of one Buchberger run (dict polynomials)."""

    def __init__(self, key):
        self.key = key
        self.polys = []      # dict exp -> Fraction, monic
        self.lms = []
        self.sugar = []

    def add(self, p, sugar):
        lm = max(p, key=self.key)
        lc = p[lm]
        if lc != 1:
            p = {e: c / lc for e, c in p.items()}
        self.polys.append(p)
        self.lms.append(lm)
        self.sugar.append(sugar)
        return len(self.polys) - 1

    def reduce(self, f, active):
        """Full normal form of ``f`` modulo the polynomials in ``active``."""
        f = dict(f)
        rem = {}
        key = self.key
        while f:
            e = max(f, key=key)
            c = f[e]
            for i in active:
                lm = self.lms[i]
                if _divides(lm, e):
                    shift = tuple(x - y for x, y in zip(e, lm))
                    for ge, gc in self.polys[i].items():
                        te = tuple(x + y for x, y in zip(ge, shift))
                        v = f.get(te, 0) - c * gc
                        if v:
                            f[te] = v
                        else:
                            f.pop(te, None)
                    break
            else:
                rem[e] = c
                del f[e]
        return rem

    def spoly(self, i, j):
        lcm = _lcm(self.lms[i], self.lms[j])
        out = {}
        for idx, sign in ((i, 1), (j, -1)):
            shift = tuple(x - y for x, y in zip(lcm, self.lms[idx]))
            for e, c in self.polys[idx].items():
                te = tuple(x + y for x, y in zip(e, shift))
                v = out.get(te, 0) + sign * c
                if v:
                    out[te] = v
                else:
                    out.pop(te, None)
        return out


def _pair_sugar(B, i, j):
    lcm = _lcm(B.lms[i], B.lms[j])
    d = sum(lcm)
    return max(B.sugar[i] + d - sum(B.lms[i]), B.sugar[j] + d - sum(B.lms[j]))


def _update(B, G, pairs, h):
    """Gebauer-Moeller installation of the new basis element ``h``."""
    lh = B.lms[h]
    C = [(g, _lcm(B.lms[g], lh)) for g in G]
    D = []
    while C:
        g1, l1 = C.pop(0)
        if _coprime(B.lms[g1], lh) or not any(
                _divides(l2, l1) for _, l2 in C + D):
            D.append((g1, l1))
    E = [(g, l) for g, l in D if not _coprime(B.lms[g], lh)]
    kept = []
    for (a, b, lab, s) in pairs:
        if (_divides(lh, lab) and _lcm(B.lms[a], lh) != lab
                and _lcm(B.lms[b], lh) != lab):
            continue
        kept.append((a, b, lab, s))
    for g, l in E:
        kept.append((g, h, l, _pair_sugar(B, g, h)))
    newG = [g for g in G if not _divides(lh, B.lms[g])]
    newG.append(h)
    return newG, kept


def _groebner_dicts(F, nvars, key, max_steps):
    B = _Basis(key)
    G = []
    pairs = []
    for f in sorted(F, key=lambda p: key(max(p, key=key))):
        r = B.reduce(f, G)
        if not r:
            continue
        h = B.add(r, max(sum(e) for e in f))
        if not any(B.lms[h]):
            return [{(0,) * nvars: Fraction(1)}]
        G, pairs = _update(B, G, pairs, h)
    steps = 0
    while pairs:
        best = min(range(len(pairs)), key=lambda t: (pairs[t][3], key(pairs[t][2])))
        i, j, _, s = pairs.pop(best)
        steps += 1
        if steps > max_steps:
            raise BudgetExceeded(f"Groebner step budget {max_steps} exceeded")
        r = B.reduce(B.spoly(i, j), G)
        if not r:
            continue
        h = B.add(r, s)
        if not any(B.lms[h]):
            return [{(0,) * nvars: Fraction(1)}]
        G, pairs = _update(B, G, pairs, h)
    # minimalize then interreduce
    G = [g for g in G if not any(
        o != g and _divides(B.lms[o], B.lms[g]) for o in G)]
    out = []
    for g in G:
        others = [o for o in G if o != g]
        lm = B.lms[g]
        tail = {e: c for e, c in B.polys[g].items() if e != lm}
        red = B.reduce(tail, others)
        red[lm] = Fraction(1)
        out.append(red)
    out.sort(key=lambda p: key(max(p, key=key)))
    return out


def groebner(polys, order="grevlex", vars=None, max_steps=DEFAULT_MAX_STEPS):
    """Reduced Groebner basis of the ideal generated by ``polys`` over Q.

    Output polynomials are monic and sorted by increasing leading monomial;
    the zero ideal gives ``[]`` and the unit ideal ``[1]``.
    """
    key = order_key(order)
    if vars is None:
        names = set()
        for p in polys:
            names.update(p.used_vars())
        vars = sorted_vars(names)
    vars, ps = unify_all([p.compact() for p in polys], extra=vars)
    for p in ps:
        if not p.is_rational():
            raise TypeError("Groebner bases are computed over Q only")
    F = [dict(p.terms) for p in ps if p.terms]
    G = _groebner_dicts(F, len(vars), key, max_steps)
    return [MPoly(g, vars) for g in G]


def normal_form(f, basis, order="grevlex"):
    """Remainder of ``f`` on division by a Groebner basis (same order)."""
    key = order_key(order)
    vars, ps = unify_all([f] + list(basis))
    B = _Basis(key)
    active = [B.add(dict(p.terms), 0) for p in ps[1:] if p.terms]
    return MPoly(B.reduce(ps[0].terms, active), vars)


class Ideal:
    """Ideal of Q[vars] with a lazily computed, cached Groebner basis."""

    __slots__ = ("generators", "_cache", "_lock")

    def __init__(self, generators):
        self.generators = tuple(generators)
        self._cache = {}
        self._lock = threading.Lock()

    def __repr__(self):
        return "Ideal<" + ", ".join(str(g) for g in self.generators) + ">"

    @property
    def vars(self):
        return unify_all(self.generators)[0]

    def groebner(self, order="grevlex", max_steps=DEFAULT_MAX_STEPS):
        with self._lock:
            if order not in self._cache:
                self._cache[order] = tuple(
                    groebner(self.generators, order, max_steps=max_steps))
            return list(self._cache[order])

    def is_unit(self, max_steps=DEFAULT_MAX_STEPS):
        G = self.groebner(max_steps=max_steps)
        return len(G) == 1 and G[0].is_constant()

    def contains(self, f, max_steps=DEFAULT_MAX_STEPS):
        G = self.groebner(max_steps=max_steps)
        return normal_form(f, G).is_zero()

    def __eq__(self, other):
        if not isinstance(other, Ideal):
            return NotImplemented
        return self.groebner() == other.groebner()

    def __hash__(self):
        return hash(tuple(self.groebner()))


def elim_ideal(ideal, keep, max_steps=DEFAULT_MAX_STEPS):
    """Intersection of ``ideal`` with Q[keep], via a lex basis.

    Variables not in ``keep`` are ranked highest.
    """
    if not isinstance(ideal, Ideal):
        ideal = Ideal(ideal)
    keep = tuple(keep)
    allv = ideal.vars
    elim = tuple(v for v in allv if v not in keep)
    G = groebner(ideal.generators, "lex", vars=elim + keep, max_steps=max_steps)
    kept = [g.reorder(elim + keep) for g in G]
    kept = [g for g in kept if not any(g.degree(v) > 0 for v in elim)]
    return Ideal([g.reorder(keep) if all(v in keep for v in g.used_vars()) else g
                  for g in kept])


def saturate_decide(eqs, neq, max_steps=DEFAULT_MAX_STEPS):
    """True iff ``eqs = 0, neq != 0`` has a solution over the algebraic closure.

    Rabinowitsch trick: the system is solvable iff 1 is not in
    ``<eqs, z*neq - 1>``.
    """
    neq = neq if isinstance(neq, MPoly) else MPoly.const(neq)
    if neq.is_zero():
        return False
    gens = [e for e in eqs if not e.is_zero()]
    if any(g.is_constant() for g in gens):
        return False
    if not neq.is_constant():
        names = set()
        for p in gens + [neq]:
            names.update(p.vars)
        z = "_rab"
        while z in names:
            z += "_"
        gens = gens + [MPoly.var(z) * neq - 1]
    if not gens:
        return True
    G = groebner(gens, "grevlex", max_steps=max_steps)
    return not (len(G) == 1 and G[0].is_constant())
