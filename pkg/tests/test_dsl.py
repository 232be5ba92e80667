import pytest

from causeway import dsl
from causeway.domain import BOTTOM
from causeway.expr import Table


def test_cake_model_shape(cake):
    assert len(cake.exogenous) == 10 and len(cake.endogenous) == 4
    assert dsl.print_model(cake).splitlines()[0] == "domain bool"


def test_self_reference_is_a_cycle_error():
    with pytest.raises(dsl.ParseError) as err:
        dsl.parse_model("domain bool\nvar X := and(X)\n")
    assert "cycl" in str(err.value)


def test_unknown_operator_reports_position():
    with pytest.raises(dsl.ParseError) as err:
        dsl.parse_model("domain bool\nexo X\nvar Y := frobnicate(X)\n")
    assert (err.value.line, err.value.column) == (3, 10)


@pytest.mark.parametrize("text", [
    "domain bool\nexo X\nvar Y := and(Z)\n",           # unknown variable
    "domain bool\nexo X\nvar Y := not(X, X)\n",        # arity
    "domain mod 7\nexo X\nvar Y := div(X, X)\n",       # division needs ⊥
    "domain bool\nexo X\nvar Y := 2\n",                # constant outside the domain
    "domain bool\nexo X\nvar X := 1\n",                # redeclared
    "domain bool\nexo X\ntable Y (X) { 0 -> 1 }\n",    # partial table
])
def test_model_errors(text):
    with pytest.raises(dsl.ParseError):
        dsl.parse_model(text)


def test_domain_defaults_to_bool():
    assert dsl.parse_model("exo X\nvar Y := not(X)\n").domain.kind == "bool"


def test_tables_and_bottom():
    m = dsl.parse_model("domain mod 3 with bottom\nexo a b\n"
                        "table T (a b) {\n" + "".join(f"  {i} {j} -> {(i + j) % 3} ;\n"
                                                     for i in range(3) for j in range(3)) + "}\n"
                        "var D := div(a, b)\ncontext a=1 b=bot\n")
    assert isinstance(m.mechanisms["T"], Table)
    assert m.context["b"] is BOTTOM
    again = dsl.parse_model(dsl.print_model(m))
    assert again == m and again.context == m.context


def test_bundled_round_trips(ws):
    for name, m in ws.models.items():
        assert dsl.parse_model(dsl.print_model(m)) == m, name
    for name, interp in ws.interps.items():
        assert dsl.parse_interp(dsl.print_interp(interp)) == interp, name


GRAPH = '{"artifacts": [{"id": "x", "value": 1}, {"id": "y", "value": 1}], ' \
        '"processes": [{"id": "p", "name": "copy", "uses": [["x", 1]], "generates": %s}], ' \
        '"inputs": ["x"], "result": "y"%s}'


def test_graph_parse_errors():
    assert dsl.parse_graph(GRAPH % ('"y"', "")).result == "y"
    with pytest.raises(dsl.ParseError):
        dsl.parse_graph(GRAPH % ('"missing"', ""))
    with pytest.raises(dsl.ParseError):
        dsl.parse_graph(GRAPH % ('"y"', ', "extra": 1'))
    with pytest.raises(dsl.ParseError):
        dsl.parse_graph('{"artifacts": [], "processes": [], "inputs": []}')
    with pytest.raises(dsl.ParseError):
        dsl.parse_graph('{"artifacts": [{"id": "x", "value": 1}, {"id": "x", "value": 0}], '
                        '"processes": [], "inputs": [], "result": "x"}')
    with pytest.raises(dsl.ParseError):
        dsl.parse_graph("{not json")


def test_semantics_specs():
    spec = dsl.parse_semantics("inputs u x\nresult R\ncase-split u { 0 -> a ; 1 -> b }\n")
    assert spec.kind == "case-split" and spec.cases == ((0, "a"), (1, "b"))
    assert dsl.parse_semantics("fixed-graph g\n").graph == "g"
    with pytest.raises(dsl.ParseError):
        dsl.parse_semantics("inputs u\n")
    with pytest.raises(dsl.ParseError):
        dsl.parse_semantics("constant-graph\nconstant-graph\n")


def test_assignments():
    from causeway.domain import Domain
    d = Domain.mod(5, bottom=True)
    assert dsl.parse_assignments("A=1, B=bot", d) == {"A": 1, "B": BOTTOM}
    with pytest.raises(dsl.ParseError):
        dsl.parse_assignments("A", d)
    with pytest.raises(dsl.ParseError):
        dsl.parse_assignments("A=9", d)
