import pytest

from pairtopo.difffield import t
from pairtopo.exactalg import BudgetExceeded
from pairtopo.formulas import (
    And,
    BasicFormulaBlock,
    Eq,
    ExistsU,
    InU,
    MissingParameterError,
    Neq,
    Not,
    Or,
    ParseError,
    UnboundVariableError,
    UnsupportedShape,
    block_leaves,
    free_variables,
    parameters,
    parse,
    parse_point,
    parse_poly,
    substitute_params,
    to_blocks,
    to_text,
)

from suites import FORMULA_CORPUS


def test_parse_existential():
    f = parse("exists y in U. x2 = y*x1")
    assert isinstance(f, ExistsU) and f.vars == ("y",)
    assert f.body == Eq(parse_poly("x2 - y*x1"))


def test_parse_trivial_atom():
    assert parse("x1 = 0") == Eq(parse_poly("x1"))


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as e:
        parse("x1 + ")
    assert e.value.column == 6


def test_unbound_variable():
    with pytest.raises(UnboundVariableError):
        parse("foo = 1")


def test_precedence():
    f = parse("x1 = 0 or x2 = 0 and x1 = 1")
    assert isinstance(f, Or) and isinstance(f.args[1], And)
    assert parse("not x1 = 0") == Not(Eq(parse_poly("x1")))


def test_field_constants():
    f = parse("t0*x1 = t1")
    assert f == Eq(t(0) * parse_poly("x1") - t(1))


def test_parse_point():
    assert parse_point("(1, t0)") == (1, t(0))
    assert parse_point("(t0/(t1 + 1), 3/4)")[1] == parse_poly("3/4").constant()


@pytest.mark.parametrize("text", FORMULA_CORPUS)
def test_round_trip(text):
    f = parse(text)
    assert parse(to_text(f)) == f


def test_parameters():
    f = parse("x1 = a", params=("a",))
    assert parameters(f) == ("a",)
    g = substitute_params(f, {"a": t(0)})
    assert g == Eq(parse_poly("x1") - t(0))
    with pytest.raises(MissingParameterError):
        substitute_params(f, {})


def test_forall_unsupported():
    with pytest.raises(UnsupportedShape):
        to_blocks(parse("forall y. x1 = y"))


def test_general_exists_unsupported():
    with pytest.raises(UnsupportedShape):
        to_blocks(parse("exists y. x1 = y^2"))


def test_single_block():
    tree = to_blocks(parse("exists y in U. x2 = y*x1"))
    assert isinstance(tree, BasicFormulaBlock)
    assert (tree.n, tree.m, tree.s) == (2, 1, 1)
    assert tree.p0 == 1


def test_inequations_multiply():
    tree = to_blocks(parse("exists y in U. x1 != 0 and x2 != 1 and x1 = y"))
    assert isinstance(tree, BasicFormulaBlock)
    assert tree.p0 == parse_poly("x1*(x2 - 1)")
    assert tree.eqs == (parse_poly("x1 - y"),)


def test_exists_distributes_over_or():
    tree = to_blocks(parse("exists y in U. (x1 = y or x2 = y)"))
    assert isinstance(tree, Or) and len(tree.args) == 2
    a, b = tree.args
    assert a.free == b.free == ("x1", "x2")
    assert set(a.bound).isdisjoint(b.bound)
    assert a.eqs[0].used_vars() != b.eqs[0].used_vars()


def test_predicate_lifted():
    tree = to_blocks(parse("U(x1 + x2)"))
    assert isinstance(tree, BasicFormulaBlock)
    assert tree.m == 1 and tree.eqs[0].total_degree() == 1


def test_negation_stays_outside():
    tree = to_blocks(parse("not (exists y in U. x1 = y*x2)"))
    assert isinstance(tree, Not) and isinstance(tree.arg, BasicFormulaBlock)


def test_clause_budget():
    text = " and ".join(f"(x1 = {i} or x2 = {i})" for i in range(12))
    with pytest.raises(BudgetExceeded):
        to_blocks(parse(f"exists y in U. x1 = y and ({text})"), clause_budget=64)


def test_free_variable_order():
    f = parse("x2 = x10 + x1")
    assert free_variables(f) == ("x1", "x2", "x10")
    assert len(block_leaves(to_blocks(f, free_vars=("x1", "x2", "x10")))) == 1


def test_block_to_formula_round_trip():
    tree = to_blocks(parse("exists y in U. x1*y != 1 and x2 = y^2"))
    again = to_blocks(tree.to_formula(), free_vars=tree.free)
    assert again.eqs == tree.eqs and again.p0 == tree.p0


def test_atoms_are_dataclasses():
    assert Neq(parse_poly("x1")) != Eq(parse_poly("x1"))
    assert InU(parse_poly("x1")) == InU(parse_poly("x1"))
