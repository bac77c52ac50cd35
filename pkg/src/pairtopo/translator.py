"""Translation of basic formula blocks into constructible certificates.

A block ``exists y in U^m (p0 != 0 and p1 = 0 and ... and ps = 0)`` is split
by the monomials of each ``p_j`` in ``x``.  For a choice ``K_j`` of monomials
that form a basis over the constants (the other monomials lying in their
span), every monomial has constant coordinates in that basis, and the block
becomes a condition on those coordinates that only involves the constant
field.  That condition is eliminated with :mod:`pairtopo.acfqe`.

Coefficients from the differential field are first replaced by extra
coordinates holding a rational basis of their span, so the k-side
polynomials always have rational coefficients.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

from sympy import QQ
from sympy.polys.rings import ring

from . import acfqe, formulas as fm
from .acfqe import KConstructible, KSystem
from .difffield import DomainError, OmegaElement, independent_subset, k_coordinates
from .exactalg import DEFAULT_MAX_STEPS, BudgetExceeded, MPoly, saturate_decide
from .pairsets import (
    BasicClosed,
    ClosedSet,
    Constructible,
    c_intersect,
    c_union,
    complement,
    coord_names,
    member,
)

DEFAULT_KCELL_BUDGET = 4096


class InvariantBreach(RuntimeError):
    """Raised when the two membership paths disagree or a domain check fails."""


@dataclass(frozen=True)
class Budgets:
    groebner: int = DEFAULT_MAX_STEPS
    kcells: int = DEFAULT_KCELL_BUDGET
    degree_cap: int = acfqe.DEFAULT_DEGREE_CAP


# support

@dataclass(frozen=True)
class SupportData:
    """Monomial split of each p_j; ``supports[j]`` lists (iota, coefficient) pairs."""

    xvars: tuple
    yvars: tuple
    supports: tuple

    def reconstruct(self, j):
        out = MPoly.zero()
        for iota, c in self.supports[j]:
            out = out + c * MPoly({iota: 1}, self.xvars)
        return out


def _mono_key(iota):
    return (sum(iota), tuple(-e for e in iota))


def support_of(polys, xvars, yvars):
    sup = []
    for p in polys:
        parts = p.split(xvars)
        items = sorted(parts.items(), key=lambda kv: _mono_key(kv[0]))
        sup.append(tuple((iota, c) for iota, c in items if not c.is_zero()))
    return SupportData(tuple(xvars), tuple(yvars), tuple(sup))


def support(block):
    return support_of((block.p0,) + block.eqs, block.free, block.bound)


# lifting of field coefficients to extra coordinates

def _lift(block):
    """Rename variables canonically and move field coefficients into coordinates.

    Returns (polys over x1..xN and y1..ym, parameter values).
    """
    n = block.n
    ren = {v: f"x{i}" for i, v in enumerate(block.free, start=1)}
    ren.update({v: f"y{i}" for i, v in enumerate(block.bound, start=1)})
    polys = [p.rename(ren) for p in (block.p0,) + block.eqs]
    coeffs = []
    for p in polys:
        for c in p.coefficients():
            if isinstance(c, OmegaElement) and c not in coeffs:
                coeffs.append(c)
    coeffs.sort(key=lambda c: c.sort_key())
    cand = [OmegaElement(1)] + coeffs
    basis = [cand[i] for i in independent_subset(cand)]
    params = tuple(basis[1:])
    pnames = [f"x{n + i}" for i in range(1, len(params) + 1)]
    if not params:
        return polys, params
    gens = [MPoly.const(1)] + [MPoly.var(v) for v in pnames]
    lifted = []
    for p in polys:
        q = MPoly.zero()
        for e, c in p.terms.items():
            mono = MPoly({e: 1}, p.vars)
            if isinstance(c, Fraction):
                q = q + mono * c
                continue
            for g, a in zip(gens, k_coordinates(basis, c)):
                if a:
                    q = q + mono * g * a
        lifted.append(q)
    return lifted, params


# certificates

@dataclass(frozen=True)
class KCell:
    K: tuple                # per j, tuple of multi-indices
    sk: Constructible
    coords: tuple           # (j, k, iota) for each A variable, in order
    z: KConstructible

    def to_json(self):
        return {
            "K": [[list(i) for i in Kj] for Kj in self.K],
            "sk": self.sk.to_json(),
            "coordMap": [[j, k, list(iota)] for j, k, iota in self.coords],
            "z": self.z.to_json(),
        }


@dataclass(frozen=True)
class PairCertificate:
    n: int
    arity: int              # n plus the lifted parameter coordinates
    params: tuple
    support: tuple          # per j, tuple of multi-indices (over arity coordinates)
    cells: tuple

    def extend(self, point):
        point = tuple(OmegaElement.coerce(v) for v in point)
        if len(point) != self.n:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.n}")
        return point + self.params

    def to_json(self):
        return {
            "arity": self.n,
            "params": [str(p) for p in self.params],
            "support": [[list(i) for i in S] for S in self.support],
            "cells": [c.to_json() for c in self.cells],
        }


def _mono(iota, xs):
    return MPoly({iota: 1}, xs)


def _avar(j, k, idx):
    return f"A_{j}_{k}_{idx}"


def _sk(arity, xs, sup, K):
    """S_K as one (C, D) pair: span conditions closed, independence open."""
    comps, blocks, dmembers = [], [], []
    for Ij, Kj in zip(sup, K):
        base = [_mono(i, xs) for i in Kj]
        for iota in Ij:
            if iota in Kj:
                continue
            comps.extend(base + [_mono(iota, xs)])
            blocks.append(len(base) + 1)
        if base:
            dmembers.append(BasicClosed(arity, tuple(base), (len(base),)))
    C = ClosedSet.of(arity, [BasicClosed(arity, tuple(comps), tuple(blocks))])
    D = ClosedSet.of(arity, dmembers)
    return C, D


def _z_for(kvec, coeff_rows, yvars, budgets):
    """The k-side set for given basis sizes (k_0, ..., k_s)."""
    avars, coords = [], []
    for j, (kj, row) in enumerate(zip(kvec, coeff_rows)):
        for k in range(1, kj + 1):
            for idx, (iota, _) in enumerate(row):
                avars.append(_avar(j, k, idx))
                coords.append((j, k, iota))
    eqs = []
    for j in range(1, len(kvec)):
        for k in range(1, kvec[j] + 1):
            eqs.append(sum((c * MPoly.var(_avar(j, k, idx)) for idx, (_, c) in enumerate(coeff_rows[j])),
                           MPoly.zero()))
    pieces = []
    for kp in range(1, kvec[0] + 1):
        neq = sum((c * MPoly.var(_avar(0, kp, idx)) for idx, (_, c) in enumerate(coeff_rows[0])),
                  MPoly.zero())
        S = KSystem(yvars, tuple(avars), tuple(eqs), neq)
        pieces.append(acfqe.eliminate_exists(S, budgets.groebner, budgets.degree_cap))
    if not pieces:
        z = KConstructible(tuple(avars), (acfqe.EMPTY_PAIR,))
    else:
        z = pieces[0]
        for p in pieces[1:]:
            z = acfqe.union(z, p)
    return tuple(coords), z


def _subsets(Ij):
    for r in range(len(Ij) + 1):
        yield from combinations(Ij, r)


def translate(block, budgets=Budgets()):
    """Certificate for the set defined by a :class:`BasicFormulaBlock`."""
    n = block.n
    polys, params = _lift(block)
    arity = n + len(params)
    xs = coord_names(arity)
    ys = tuple(f"y{i}" for i in range(1, block.m + 1))
    sup = support_of(polys, xs, ys)
    p0_row, eq_rows = sup.supports[0], [r for r in sup.supports[1:] if r]
    rows = [p0_row] + eq_rows
    supports = tuple(tuple(i for i, _ in r) for r in rows)
    if not p0_row:
        return PairCertificate(n, arity, params, supports, ())
    total = 1
    for r in rows:
        total *= 2 ** len(r)
    if total > budgets.kcells:
        raise BudgetExceeded(f"{total} K-cells exceed the budget {budgets.kcells}")
    zcache = {}
    cells = []
    for K in product(*(_subsets(S) for S in supports)):
        if not K[0]:
            continue  # p0 vanishes identically on such points
        C, D = _sk(arity, xs, supports, K)
        sk = Constructible.of(arity, [(C, D)])
        if not sk.pairs:
            continue
        kvec = tuple(len(Kj) for Kj in K)
        if kvec not in zcache:
            zcache[kvec] = _z_for(kvec, rows, ys, budgets)
        coords, z = zcache[kvec]
        if z.is_empty():
            continue
        cells.append(KCell(tuple(K), sk, coords, z))
    return PairCertificate(n, arity, params, supports, tuple(cells))


def _coordinates(cell, point, xs):
    values = dict(zip(xs, point))
    cache = {}
    out = {}
    for idx, (j, k, iota) in enumerate(cell.coords):
        key = (j, iota)
        if key not in cache:
            basis = [_mono(i, xs).evaluate(values) for i in cell.K[j]]
            target = _mono(iota, xs).evaluate(values)
            try:
                cache[key] = k_coordinates(basis, target)
            except DomainError as e:
                raise InvariantBreach(f"coordinate outside its domain although S_K holds: {e}") from None
        out[cell.z.free_vars[idx]] = cache[key][k - 1]
    return out


def member_cert(cert, point):
    """Membership through the certificate: some cell's S_K holds and z holds."""
    pt = cert.extend(point)
    xs = coord_names(cert.arity)
    for cell in cert.cells:
        if not member(cell.sk, pt):
            continue
        if cell.z.member(_coordinates(cell, pt, xs)):
            return True
    return False


# direct decision

def _basis_rows(coeffs):
    """Rational coordinate vectors of field elements in a basis of their span."""
    basis = [coeffs[i] for i in independent_subset(coeffs)] if coeffs else []
    return [k_coordinates(basis, c) for c in coeffs], len(basis)


def _expand(p, values, yvars):
    """Rational polynomials in y whose common vanishing is p(point, y) = 0."""
    xvals = {v: values[v] for v in p.vars if v in values}
    q = p.subs(xvals)
    parts = q.split(yvars)
    monos = sorted(parts)
    coeffs = [OmegaElement.coerce(parts[m].constant()) for m in monos]
    rows, r = _basis_rows(coeffs)
    out = []
    for l in range(r):
        out.append(sum((MPoly({m: 1}, yvars) * row[l] for m, row in zip(monos, rows) if row[l]),
                       MPoly.zero()))
    return out


def decide_direct(block, point, max_steps=DEFAULT_MAX_STEPS):
    """Decide the block at a point without the certificate.

    The monomial values are expanded in a rational basis; each basis
    coefficient of an equation must vanish and some basis coefficient of the
    inequation must not.
    """
    point = tuple(OmegaElement.coerce(v) for v in point)
    if len(point) != block.n:
        raise ValueError(f"point has {len(point)} coordinates, expected {block.n}")
    values = dict(zip(block.free, point))
    ys = tuple(block.bound)
    eqs = []
    for p in block.eqs:
        eqs.extend(_expand(p, values, ys))
    for q in _expand(block.p0, values, ys):
        if saturate_decide(eqs, q, max_steps):
            return True
    return False


# linear flattening

@dataclass(frozen=True)
class NotFlattenable:
    reason: str


def _linear_condition(poly, cell, xs, arity):
    """Closed set where the linear form ``poly`` in the coordinates vanishes."""
    if poly.total_degree() > 1:
        return NotFlattenable(str(poly))
    coords = dict(zip(cell.z.free_vars, cell.coords))
    groups = set()
    lin = {}
    c0 = poly.constant()
    for e, c in poly.terms.items():
        if not any(e):
            continue
        v = poly.vars[e.index(1)]
        j, k, iota = coords[v]
        groups.add((j, k))
        lin[iota] = lin.get(iota, 0) + c
    if not groups:
        return ClosedSet.of(arity, [BasicClosed.empty(arity)]) if c0 != 0 else ClosedSet.full(arity)
    if len(groups) > 1:
        return NotFlattenable(str(poly))
    (j, k), = groups
    # sum_iota c_iota f_k(beta, x^iota) + c0 = 0  iff  f_k(beta, L) = -c0
    L = sum((_mono(i, xs) * c for i, c in lin.items()), MPoly.zero())
    beta = [_mono(i, xs) for i in cell.K[j]]
    others = [b for i, b in enumerate(beta) if i != k - 1]
    comps = others + [L + beta[k - 1] * c0]
    return ClosedSet.of(arity, [BasicClosed(arity, tuple(comps), (len(comps),))])


def _factors(p):
    p = p.compact()
    if p.is_constant():
        return []
    R = ring(",".join(p.vars), QQ)[0]
    P = R.from_dict({e: QQ(c.numerator, c.denominator) for e, c in p.terms.items()})
    out = []
    for f, _ in P.factor_list()[1]:
        terms = {e: Fraction(int(c.numerator), int(c.denominator)) for e, c in f.items()}
        out.append(MPoly(terms, p.vars))
    return out


def _substitute_params(X, cert):
    """Fix the lifted parameter coordinates to their values."""
    if not cert.params:
        return X
    n = cert.n
    vals = {f"x{n + i}": v for i, v in enumerate(cert.params, start=1)}

    def sub_closed(C):
        return ClosedSet.of(n, [BasicClosed(n, tuple(c.subs(vals) for c in b.components), b.blocks)
                                for b in C.members])

    return Constructible.of(n, [(sub_closed(C), sub_closed(D)) for C, D in X.pairs])


def flatten_linear(cert):
    """A pure constructible set equal to the certificate, when z is linear."""
    arity = cert.arity
    xs = coord_names(arity)
    out = Constructible.empty(arity)
    for cell in cert.cells:
        (C, D), = cell.sk.pairs
        # on S_K the coordinates of a basis monomial are 0 or 1
        delta = {}
        for v, (j, k, iota) in zip(cell.z.free_vars, cell.coords):
            if iota in cell.K[j]:
                delta[v] = Fraction(int(cell.K[j].index(iota) == k - 1))
        for E, N in cell.z.pairs:
            E = [e.subs(delta) for e in E]
            N = N.subs(delta)
            if N.is_zero() or any(e.is_constant() and not e.is_zero() for e in E):
                continue
            E = [e for e in E if not e.is_zero()]
            conds = []
            for e in E:
                c = _linear_condition(e, cell, xs, arity)
                if isinstance(c, NotFlattenable):
                    return c
                conds.append(c)
            removed = []
            for f in _factors(N):
                c = _linear_condition(f, cell, xs, arity)
                if isinstance(c, NotFlattenable):
                    return NotFlattenable(str(N))
                removed.append(c)
            piece = Constructible.of(arity, [(C, D)])
            for c in conds:
                piece = c_intersect(piece, Constructible.closed(c))
            for c in removed:
                piece = c_intersect(piece, complement(c))
            out = c_union(out, piece)
    return _substitute_params(out, cert)


# boolean combinations

@dataclass(frozen=True)
class CombinedCertificate:
    """And/Or/Not tree (from :mod:`pairtopo.formulas`) with certificates at the leaves."""

    tree: object
    leaves: tuple           # (block, certificate) in leaf order
    flat: object            # Constructible or NotFlattenable

    def to_json(self):
        def node(t):
            if isinstance(t, int):
                return {"leaf": t}
            if isinstance(t, fm.Not):
                return {"not": node(t.arg)}
            key = "and" if isinstance(t, fm.And) else "or"
            return {key: [node(a) for a in t.args]}

        free = list(self.leaves[0][0].free) if self.leaves else []
        out = {
            "free": free,
            "tree": node(self.tree),
            "leaves": [{"block": str(b), "certificate": c.to_json()} for b, c in self.leaves],
        }
        if isinstance(self.flat, Constructible):
            out["flat"] = self.flat.to_json()
        else:
            out["flat"] = {"notFlattenable": self.flat.reason}
        return out


def _index_tree(tree, leaves):
    if isinstance(tree, fm.BasicFormulaBlock):
        leaves.append(tree)
        return len(leaves) - 1
    if isinstance(tree, fm.Not):
        return fm.Not(_index_tree(tree.arg, leaves))
    return type(tree)(tuple(_index_tree(a, leaves) for a in tree.args))


def _eval_tree(t, leaf):
    if isinstance(t, int):
        return leaf(t)
    if isinstance(t, fm.Not):
        return not _eval_tree(t.arg, leaf)
    if isinstance(t, fm.And):
        return all(_eval_tree(a, leaf) for a in t.args)
    return any(_eval_tree(a, leaf) for a in t.args)


def _flat_tree(t, flats, n):
    if isinstance(t, int):
        return flats[t]
    if isinstance(t, fm.Not):
        return complement(_flat_tree(t.arg, flats, n))
    parts = [_flat_tree(a, flats, n) for a in t.args]
    acc = parts[0]
    for p in parts[1:]:
        acc = c_intersect(acc, p) if isinstance(t, fm.And) else c_union(acc, p)
    return acc


def translate_combination(tree, budgets=Budgets()):
    blocks = []
    idx = _index_tree(tree, blocks)
    certs = [translate(b, budgets) for b in blocks]
    flats = [flatten_linear(c) for c in certs]
    bad = next((f for f in flats if isinstance(f, NotFlattenable)), None)
    n = blocks[0].n if blocks else 0
    flat = bad if bad is not None else _flat_tree(idx, flats, n)
    return CombinedCertificate(idx, tuple(zip(blocks, certs)), flat)


def member_combined(comb, point):
    return _eval_tree(comb.tree, lambda i: member_cert(comb.leaves[i][1], point))


def decide_combined(comb, point, max_steps=DEFAULT_MAX_STEPS):
    return _eval_tree(comb.tree, lambda i: decide_direct(comb.leaves[i][0], point, max_steps))


def check_point(comb, point, max_steps=DEFAULT_MAX_STEPS):
    """Both paths at one point; a disagreement raises :class:`InvariantBreach`."""
    a = member_combined(comb, point)
    b = decide_combined(comb, point, max_steps)
    if a != b:
        raise InvariantBreach(f"certificate says {a}, direct decision says {b} at {point}")
    return a


# evaluation of formulas straight from the syntax tree

def holds(formula, point, free=None, max_steps=DEFAULT_MAX_STEPS):
    """Truth of a formula at a point, by expanding atoms before normalizing.

    This does not go through :func:`pairtopo.formulas.to_blocks`: existential
    bodies are expanded atom by atom in a rational basis and their boolean
    structure is decided clause by clause.
    """
    free = tuple(free) if free is not None else fm.free_variables(formula)
    point = tuple(OmegaElement.coerce(v) for v in point)
    values = dict(zip(free, point))
    return _holds(formula, values, max_steps)


def _holds(f, values, max_steps):
    if isinstance(f, fm.Eq):
        return f.poly.subs(values).constant() == 0 if _closed(f.poly, values) else _unbound(f)
    if isinstance(f, fm.Neq):
        return f.poly.subs(values).constant() != 0 if _closed(f.poly, values) else _unbound(f)
    if isinstance(f, fm.InU):
        return OmegaElement.coerce(f.term.subs(values).constant()).is_constant()
    if isinstance(f, fm.And):
        return all(_holds(a, values, max_steps) for a in f.args)
    if isinstance(f, fm.Or):
        return any(_holds(a, values, max_steps) for a in f.args)
    if isinstance(f, fm.Not):
        return not _holds(f.arg, values, max_steps)
    if isinstance(f, fm.ExistsU):
        counter = [0]
        for eqs, neqs in _clauses(f.body, values, list(f.vars), counter):
            neq = MPoly.const(1)
            for q in neqs:
                neq = neq * q
            if saturate_decide(eqs, neq, max_steps):
                return True
        return False
    raise fm.UnsupportedShape("cannot evaluate this quantifier", f)


def _closed(p, values):
    return all(v in values for v in p.used_vars())


def _unbound(f):
    raise ValueError(f"free variable without a value in {fm.to_text(f)}")


def _clauses(f, values, yvars, counter):
    """DNF clauses (rational equations, rational inequation factors) in the y's."""
    if isinstance(f, (fm.Eq, fm.Neq)):
        q = f.poly.subs({v: values[v] for v in f.poly.used_vars() if v in values})
        parts = _expand(q, {}, tuple(v for v in q.vars))
        if isinstance(f, fm.Eq):
            return [(parts, [])]
        return [([], [p]) for p in parts]
    if isinstance(f, fm.Not):
        g = f.arg
        if isinstance(g, fm.Eq):
            return _clauses(fm.Neq(g.poly), values, yvars, counter)
        if isinstance(g, fm.Neq):
            return _clauses(fm.Eq(g.poly), values, yvars, counter)
        if isinstance(g, fm.Not):
            return _clauses(g.arg, values, yvars, counter)
        if isinstance(g, fm.And):
            return _clauses(fm.Or(tuple(fm.Not(a) for a in g.args)), values, yvars, counter)
        if isinstance(g, fm.Or):
            return _clauses(fm.And(tuple(fm.Not(a) for a in g.args)), values, yvars, counter)
        raise fm.UnsupportedShape("negated quantifier inside an existential", f)
    if isinstance(f, fm.And):
        out = [([], [])]
        for a in f.args:
            out = [(e1 + e2, n1 + n2) for e1, n1 in out for e2, n2 in _clauses(a, values, yvars, counter)]
        return out
    if isinstance(f, fm.Or):
        return [c for a in f.args for c in _clauses(a, values, yvars, counter)]
    if isinstance(f, fm.InU):
        counter[0] += 1
        y = f"_w{counter[0]}"
        return _clauses(fm.Eq(f.term - MPoly.var(y)), values, yvars + [y], counter)
    if isinstance(f, fm.ExistsU):
        ren = {}
        for v in f.vars:
            counter[0] += 1
            ren[v] = f"_w{counter[0]}"
        inner = {k: v for k, v in values.items() if k not in f.vars}
        body = fm._map_polys(f.body, lambda p, b: p.rename({k: v for k, v in ren.items() if k not in b}))
        return _clauses(body, inner, yvars + list(ren.values()), counter)
    raise fm.UnsupportedShape("cannot evaluate this quantifier", f)


def certificate_json(comb):
    return json.dumps(comb.to_json(), separators=(",", ":"), sort_keys=False)


# loading certificates back

def _load_kconstructible(obj, free_vars):
    from .pairsets import SchemaError

    if not isinstance(obj, list):
        raise SchemaError("'z' must be a list of {E, N} objects")
    pairs = []
    try:
        for pr in obj:
            E = tuple(fm.parse_poly(e) for e in pr["E"])
            pairs.append((E, fm.parse_poly(pr["N"])))
    except (KeyError, TypeError, fm.ParseError) as e:
        raise SchemaError(f"malformed z: {e}") from None
    return KConstructible(tuple(free_vars), tuple(pairs))


def load_pair_certificate(obj):
    from .pairsets import SchemaError, from_json

    try:
        n = obj["arity"]
        params = tuple(fm.parse_omega(p) for p in obj["params"])
        support = tuple(tuple(tuple(i) for i in S) for S in obj["support"])
        cells = []
        for c in obj["cells"]:
            K = tuple(tuple(tuple(i) for i in Kj) for Kj in c["K"])
            coords = tuple((j, k, tuple(i)) for j, k, i in c["coordMap"])
            names = []
            for j, k, iota in coords:
                names.append(_avar(j, k, support[j].index(iota)))
            cells.append(KCell(K, from_json(c["sk"]), coords, _load_kconstructible(c["z"], names)))
    except (KeyError, TypeError, ValueError, IndexError) as e:
        if isinstance(e, SchemaError):
            raise
        raise SchemaError(f"malformed certificate: {e}") from None
    return PairCertificate(n, n + len(params), params, support, tuple(cells))


def load_combined(obj):
    """Inverse of :meth:`CombinedCertificate.to_json`."""
    from .pairsets import SchemaError, from_json

    try:
        free = obj["free"]
        leaves = []
        for leaf in obj["leaves"]:
            tree = fm.to_blocks(fm.parse(leaf["block"]), free_vars=free)
            block = fm.block_leaves(tree)[0]
            leaves.append((block, load_pair_certificate(leaf["certificate"])))

        def node(d):
            if "leaf" in d:
                return d["leaf"]
            if "not" in d:
                return fm.Not(node(d["not"]))
            if "and" in d:
                return fm.And(tuple(node(a) for a in d["and"]))
            return fm.Or(tuple(node(a) for a in d["or"]))

        tree = node(obj["tree"])
        flat = obj.get("flat", {})
        flat = from_json(flat) if "pairs" in flat else NotFlattenable(flat.get("notFlattenable", ""))
    except (KeyError, TypeError, fm.ParseError) as e:
        raise SchemaError(f"malformed certificate: {e}") from None
    return CombinedCertificate(tree, tuple(leaves), flat)
