"""Pair formulas: AST, parser, printer and normalization into blocks.

Grammar::

    formula := disj
    disj    := conj ("or" conj)*
    conj    := lit ("and" lit)*
    lit     := "not" lit | "(" formula ")" | quant | atom
    quant   := "exists" vars "in" "U" "." formula
             | ("exists" | "forall") vars "." formula
    atom    := poly ("=" | "!=") poly | "U" "(" poly ")"

Identifiers ``x``, ``x1``, ``x2``... are free variables, ``t0``, ``t1``...
are elements of the differential field, names bound by a quantifier are
bound variables and anything else must be declared as a parameter.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .difffield import OmegaElement
from .exactalg import BudgetExceeded, MPoly, sorted_vars

DEFAULT_CLAUSE_BUDGET = 512

_FREE_RE = re.compile(r"x\d*\Z")
_T_RE = re.compile(r"t(\d+)\Z")
KEYWORDS = {"and", "or", "not", "exists", "forall", "in"}


class ParseError(ValueError):
    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} at line {line}, column {column}")
        self.message = message
        self.line = line
        self.column = column


class UnboundVariableError(ParseError):
    pass


class MissingParameterError(KeyError):
    pass


class UnsupportedShape(ValueError):
    def __init__(self, message, subtree=None):
        if subtree is not None:
            message = f"{message}: {to_text(subtree)}"
        super().__init__(message)
        self.subtree = subtree


def is_free_name(name):
    return bool(_FREE_RE.match(name))


# AST

@dataclass(frozen=True)
class Eq:
    poly: MPoly
    pos: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Neq:
    poly: MPoly
    pos: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class InU:
    term: MPoly
    pos: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class And:
    args: tuple
    pos: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Or:
    args: tuple
    pos: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Not:
    arg: object
    pos: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ExistsU:
    vars: tuple
    body: object
    pos: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Exists:
    """Existential quantifier over the big field (outside the input language)."""

    vars: tuple
    body: object
    pos: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Forall:
    vars: tuple
    body: object
    pos: tuple = field(default=None, compare=False, repr=False)


ATOMS = (Eq, Neq, InU)


# tokenizer

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>!=|[-+*/^(),.=])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text):
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "ws":
            for i, ch in enumerate(m.group(), start=pos):
                if ch == "\n":
                    line, line_start = line + 1, i + 1
        else:
            if kind == "ident" and m.group() in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text, params, extra_vars):
        self.toks = tokenize(text)
        self.i = 0
        self.params = set(params)
        self.extra = set(extra_vars)
        self.scopes = []
        self.any_name = False

    # helpers

    @property
    def tok(self):
        return self.toks[self.i]

    def peek(self, k=1):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, message, tok=None):
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.column)

    def accept(self, text):
        if self.tok.text == text and self.tok.kind in ("op", "kw", "ident"):
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.accept(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")

    # formulas

    def formula(self):
        start = self.tok
        args = [self.conj()]
        while self.accept("or"):
            args.append(self.conj())
        return args[0] if len(args) == 1 else Or(tuple(args), (start.line, start.column))

    def conj(self):
        start = self.tok
        args = [self.lit()]
        while self.accept("and"):
            args.append(self.lit())
        return args[0] if len(args) == 1 else And(tuple(args), (start.line, start.column))

    def lit(self):
        tok = self.tok
        pos = (tok.line, tok.column)
        if self.accept("not"):
            return Not(self.lit(), pos)
        if tok.text in ("exists", "forall") and tok.kind == "kw":
            return self.quantifier()
        if tok.text == "(":
            save = self.i
            try:
                return self.atom()
            except ParseError as first:
                self.i = save
                self.expect("(")
                try:
                    inner = self.formula()
                    self.expect(")")
                except ParseError as second:
                    raise max(first, second, key=lambda e: (e.line, e.column))
                return inner
        return self.atom()

    def varlist(self):
        names = []
        while True:
            tok = self.tok
            if tok.kind != "ident" or tok.text == "U":
                raise self.error("expected a variable name")
            names.append(tok.text)
            self.i += 1
            if not self.accept(","):
                break
        if len(set(names)) != len(names):
            raise self.error("repeated variable in quantifier")
        return tuple(names)

    def quantifier(self):
        tok = self.tok
        pos = (tok.line, tok.column)
        kind = tok.text
        self.i += 1
        names = self.varlist()
        in_u = False
        if kind == "exists" and self.accept("in"):
            self.expect("U")
            in_u = True
        self.expect(".")
        self.scopes.append(set(names))
        try:
            body = self.formula()
        finally:
            self.scopes.pop()
        if in_u:
            return ExistsU(names, body, pos)
        return (Exists if kind == "exists" else Forall)(names, body, pos)

    def atom(self):
        tok = self.tok
        pos = (tok.line, tok.column)
        if tok.kind == "ident" and tok.text == "U" and self.peek().text == "(":
            self.i += 2
            term = self.expr()
            self.expect(")")
            return InU(term, pos)
        lhs = self.expr()
        if self.accept("="):
            return Eq(lhs - self.expr(), pos)
        if self.accept("!="):
            return Neq(lhs - self.expr(), pos)
        found = self.tok.text or "end of input"
        raise self.error(f"expected '=' or '!=', found {found!r}")

    # polynomial expressions

    def expr(self):
        left = self.term()
        while self.tok.kind == "op" and self.tok.text in ("+", "-"):
            op = self.tok.text
            self.i += 1
            right = self.term()
            left = left + right if op == "+" else left - right
        return left

    def term(self):
        left = self.unary()
        while self.tok.kind == "op" and self.tok.text in ("*", "/"):
            op_tok = self.tok
            self.i += 1
            right = self.unary()
            if op_tok.text == "*":
                left = left * right
            else:
                if not right.is_constant() or right.is_zero():
                    raise self.error("division by a non-constant or zero expression", op_tok)
                left = left / right.constant()
        return left

    def unary(self):
        if self.tok.kind == "op" and self.tok.text in ("-", "+"):
            neg = self.tok.text == "-"
            self.i += 1
            v = self.unary()
            return -v if neg else v
        return self.power()

    def power(self):
        base = self.primary()
        if self.tok.kind == "op" and self.tok.text == "^":
            op_tok = self.tok
            self.i += 1
            sign = 1
            if self.tok.text == "-":
                sign = -1
                self.i += 1
            if self.tok.kind != "num":
                raise self.error("expected an integer exponent")
            k = sign * int(self.tok.text)
            self.i += 1
            if k < 0:
                if not base.is_constant() or base.is_zero():
                    raise self.error("negative power of a non-constant", op_tok)
                c = base.constant()
                return MPoly.const(OmegaElement.coerce(c) ** k)
            return base ** k
        return base

    def primary(self):
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return MPoly.const(int(tok.text))
        if tok.kind == "ident":
            self.i += 1
            return self.resolve(tok)
        if tok.text == "(":
            self.i += 1
            e = self.expr()
            self.expect(")")
            return e
        found = tok.text or "end of input"
        raise self.error(f"unexpected {found!r}")

    def resolve(self, tok):
        name = tok.text
        if any(name in s for s in self.scopes):
            return MPoly.var(name)
        m = _T_RE.match(name)
        if m:
            return MPoly.const(OmegaElement.t(int(m.group(1))))
        if is_free_name(name) or name in self.params or name in self.extra or self.any_name:
            return MPoly.var(name)
        raise UnboundVariableError(f"unbound variable {name!r}", tok.line, tok.column)


def parse(text, params=()):
    """Parse a pair formula.  ``params`` names symbols left for substitution."""
    p = _Parser(text, params, ())
    f = p.formula()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r}")
    return f


def parse_poly(text, variables=None):
    """Parse a polynomial expression.

    With ``variables=None`` every identifier other than ``t<i>`` is accepted
    as a variable name.
    """
    p = _Parser(text, (), variables or ())
    p.any_name = variables is None
    e = p.expr()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r}")
    return e


def parse_omega(text):
    """Parse an element of the differential field (a constant expression)."""
    e = parse_poly(text, variables=())
    if not e.is_constant():
        raise ParseError("expected a constant expression")
    return OmegaElement.coerce(e.constant())


def parse_point(text):
    """Parse ``"(a, b, ...)"`` or ``"a, b, ..."`` into field elements."""
    s = text.strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    if not s.strip():
        return ()
    parts = _split_top(s)
    return tuple(parse_omega(part) for part in parts)


def _split_top(s):
    parts, depth, cur = [], 0, []
    for ch in s:
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur.append(ch)
    parts.append("".join(cur))
    return parts


# printing

def _wrap(f):
    return to_text(f) if isinstance(f, ATOMS) else f"({to_text(f)})"


def to_text(f):
    """Render a formula in the input grammar (parse(to_text(f)) == f)."""
    if isinstance(f, Eq):
        return f"{f.poly} = 0"
    if isinstance(f, Neq):
        return f"{f.poly} != 0"
    if isinstance(f, InU):
        return f"U({f.term})"
    if isinstance(f, And):
        return " and ".join(_wrap(a) for a in f.args)
    if isinstance(f, Or):
        return " or ".join(_wrap(a) for a in f.args)
    if isinstance(f, Not):
        return "not " + _wrap(f.arg)
    if isinstance(f, ExistsU):
        return f"exists {', '.join(f.vars)} in U. {to_text(f.body)}"
    if isinstance(f, Exists):
        return f"exists {', '.join(f.vars)}. {to_text(f.body)}"
    if isinstance(f, Forall):
        return f"forall {', '.join(f.vars)}. {to_text(f.body)}"
    if isinstance(f, BasicFormulaBlock):
        return to_text(f.to_formula())
    raise TypeError(f"not a formula: {f!r}")


# traversal helpers

def _polys(f):
    if isinstance(f, (Eq, Neq)):
        yield f.poly, ()
    elif isinstance(f, InU):
        yield f.term, ()
    elif isinstance(f, (And, Or)):
        for a in f.args:
            yield from _polys(a)
    elif isinstance(f, Not):
        yield from _polys(f.arg)
    elif isinstance(f, (ExistsU, Exists, Forall)):
        for p, bound in _polys(f.body):
            yield p, bound + f.vars


def free_variables(f):
    names = set()
    for p, bound in _polys(f):
        names.update(v for v in p.used_vars() if v not in bound and is_free_name(v))
    return sorted_vars(names)


def parameters(f):
    names = set()
    for p, bound in _polys(f):
        names.update(v for v in p.used_vars() if v not in bound and not is_free_name(v))
    return sorted_vars(names)


def _map_polys(f, fn, bound=()):
    if isinstance(f, Eq):
        return Eq(fn(f.poly, bound), f.pos)
    if isinstance(f, Neq):
        return Neq(fn(f.poly, bound), f.pos)
    if isinstance(f, InU):
        return InU(fn(f.term, bound), f.pos)
    if isinstance(f, And):
        return And(tuple(_map_polys(a, fn, bound) for a in f.args), f.pos)
    if isinstance(f, Or):
        return Or(tuple(_map_polys(a, fn, bound) for a in f.args), f.pos)
    if isinstance(f, Not):
        return Not(_map_polys(f.arg, fn, bound), f.pos)
    if isinstance(f, (ExistsU, Exists, Forall)):
        return type(f)(f.vars, _map_polys(f.body, fn, bound + f.vars), f.pos)
    raise TypeError(f"not a formula: {f!r}")


def substitute_params(f, sigma):
    """Replace every parameter symbol by a concrete field element."""
    sigma = {k: OmegaElement.coerce(v) for k, v in sigma.items()}
    missing = [p for p in parameters(f) if p not in sigma]
    if missing:
        raise MissingParameterError(f"no value for parameter {missing[0]!r}")
    if not sigma:
        return f

    def fn(p, bound):
        sub = {v: sigma[v] for v in p.used_vars() if v in sigma and v not in bound}
        return p.subs(sub) if sub else p

    return _map_polys(f, fn)


# blocks

@dataclass(frozen=True)
class BasicFormulaBlock:
    """exists y in U^m ( p0(x, y) != 0 and p1 = 0 and ... and ps = 0 )."""

    free: tuple
    bound: tuple
    p0: MPoly
    eqs: tuple

    @property
    def n(self):
        return len(self.free)

    @property
    def m(self):
        return len(self.bound)

    @property
    def s(self):
        return len(self.eqs)

    def to_formula(self):
        lits = []
        if self.p0 != 1 or not self.eqs:
            lits.append(Neq(self.p0))
        lits.extend(Eq(p) for p in self.eqs)
        body = lits[0] if len(lits) == 1 else And(tuple(lits))
        return ExistsU(self.bound, body) if self.bound else body

    def __str__(self):
        return to_text(self.to_formula())


def _is_qf_ring(f):
    if isinstance(f, (Eq, Neq)):
        return True
    if isinstance(f, (And, Or)):
        return all(_is_qf_ring(a) for a in f.args)
    if isinstance(f, Not):
        return _is_qf_ring(f.arg)
    return False


class _Normalizer:
    def __init__(self, free, clause_budget):
        self.free = tuple(free)
        self.budget = clause_budget
        self.used = set(free)
        self.counter = 0

    def fresh(self, base):
        while True:
            self.counter += 1
            name = f"{base}_{self.counter}"
            if name not in self.used:
                self.used.add(name)
                return name

    def nnf(self, f, neg=False, inside=False):
        """Negation normal form; literals are Eq/Neq/InU/ExistsU."""
        if isinstance(f, Eq):
            return Neq(f.poly) if neg else f
        if isinstance(f, Neq):
            return Eq(f.poly) if neg else f
        if isinstance(f, And):
            args = tuple(self.nnf(a, neg, inside) for a in f.args)
            return Or(args) if neg else And(args)
        if isinstance(f, Or):
            args = tuple(self.nnf(a, neg, inside) for a in f.args)
            return And(args) if neg else Or(args)
        if isinstance(f, Not):
            return self.nnf(f.arg, not neg, inside)
        if isinstance(f, (InU, ExistsU)):
            if neg:
                raise UnsupportedShape("negated U-condition inside an existential block", f)
            return f
        raise UnsupportedShape("quantifier outside the supported normal form", f)

    def lift(self, f, bound):
        """Pull positive U-existentials and U(p) atoms into the bound prefix."""
        if isinstance(f, InU):
            y = self.fresh("u")
            bound.append(y)
            return Eq(f.term - MPoly.var(y))
        if isinstance(f, ExistsU):
            ren = {v: self.fresh(v) for v in f.vars}
            bound.extend(ren.values())
            body = _map_polys(f.body, lambda p, b: p.rename({k: v for k, v in ren.items() if k not in b}))
            return self.lift(self.nnf(body, inside=True), bound)
        if isinstance(f, And):
            return And(tuple(self.lift(a, bound) for a in f.args))
        if isinstance(f, Or):
            return Or(tuple(self.lift(a, bound) for a in f.args))
        return f

    def dnf(self, f):
        """Clauses as lists of Eq/Neq literals."""
        if isinstance(f, (Eq, Neq)):
            return [[f]]
        if isinstance(f, Or):
            out = []
            for a in f.args:
                out.extend(self.dnf(a))
                self.check(len(out))
            return out
        if isinstance(f, And):
            out = [[]]
            for a in f.args:
                parts = self.dnf(a)
                self.check(len(out) * len(parts))
                out = [c + d for c in out for d in parts]
            return out
        raise UnsupportedShape("unexpected node in quantifier-free matrix", f)

    def check(self, count):
        if count > self.budget:
            raise BudgetExceeded(f"DNF clause budget {self.budget} exceeded")

    def clause_block(self, clause, bound):
        p0 = MPoly.const(1)
        eqs = []
        for lit in clause:
            if isinstance(lit, Neq):
                p0 = p0 * lit.poly
            elif not lit.poly.is_zero():
                if lit.poly.is_constant():
                    p0 = MPoly.const(0)
                if lit.poly not in eqs:
                    eqs.append(lit.poly)
        if p0.is_zero():
            eqs = []
        return BasicFormulaBlock(self.free, tuple(bound), p0, tuple(eqs))

    def blocks(self, body, bound):
        clauses = self.dnf(body)
        if len(clauses) == 1 or not bound:
            out = [self.clause_block(c, bound) for c in clauses]
        else:
            out = []
            for c in clauses:
                ren = {v: self.fresh(v) for v in bound}
                lits = [type(l)(l.poly.rename(ren)) for l in c]
                out.append(self.clause_block(lits, [ren[v] for v in bound]))
        return out[0] if len(out) == 1 else Or(tuple(out))

    def convert(self, f):
        if _is_qf_ring(f):
            return self.blocks(self.nnf(f), [])
        if isinstance(f, And):
            return And(tuple(self.convert(a) for a in f.args))
        if isinstance(f, Or):
            return Or(tuple(self.convert(a) for a in f.args))
        if isinstance(f, Not):
            return Not(self.convert(f.arg))
        if isinstance(f, InU):
            bound = []
            eq = self.lift(f, bound)
            return self.blocks(eq, bound)
        if isinstance(f, ExistsU):
            self.used.update(f.vars)
            bound = list(f.vars)
            body = self.lift(self.nnf(f.body, inside=True), bound)
            return self.blocks(body, bound)
        raise UnsupportedShape("only existential U-quantifiers are supported", f)


def _all_names(f):
    names = set()
    for p, bound in _polys(f):
        names.update(p.vars)
        names.update(bound)
    return names


def to_blocks(f, free_vars=None, clause_budget=DEFAULT_CLAUSE_BUDGET):
    """Boolean combination (And/Or/Not tree) of :class:`BasicFormulaBlock`.

    Quantifier-free parts are put in disjunctive normal form, inequations of
    a clause are multiplied into one, and an existential over a disjunction
    is distributed with fresh bound variables per disjunct.
    """
    free = tuple(free_vars) if free_vars is not None else free_variables(f)
    norm = _Normalizer(free, clause_budget)
    norm.used.update(_all_names(f))
    return norm.convert(f)


def block_leaves(tree):
    if isinstance(tree, BasicFormulaBlock):
        return [tree]
    if isinstance(tree, (And, Or)):
        return [b for a in tree.args for b in block_leaves(a)]
    if isinstance(tree, Not):
        return block_leaves(tree.arg)
    raise TypeError(f"not a block tree: {tree!r}")


def combine(tree, leaf_fn):
    """Evaluate a block tree given truth values for its leaves."""
    if isinstance(tree, BasicFormulaBlock):
        return leaf_fn(tree)
    if isinstance(tree, And):
        return all(combine(a, leaf_fn) for a in tree.args)
    if isinstance(tree, Or):
        return any(combine(a, leaf_fn) for a in tree.args)
    if isinstance(tree, Not):
        return not combine(tree.arg, leaf_fn)
    raise TypeError(f"not a block tree: {tree!r}")
