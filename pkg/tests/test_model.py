import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from causeway import expr as ex
from causeway.domain import Domain
from causeway.expr import Op, Var
from causeway.model import (CausalModel, CyclicModelError, ModelError, evaluate, evaluate_tree,
                            exo_assignments, intervene, is_consistent, least_causal_graph,
                            true_parents)
from conftest import model

ALL_ONE = dict(Water=1, Sugar=1, Eggs=1, Flour=1, Butter=1, Pan=1, U1=0, U2=0, U3=0, U4=0)


def test_cake_evaluation_examples(cake):
    v = evaluate(cake, ALL_ONE)
    assert (v["Mix"], v["Batter"], v["Bake"], v["Cake"]) == (1, 1, 1, 1)
    assert evaluate(cake, {**ALL_ONE, "Flour": 0})["Cake"] == 0
    v = evaluate(cake, {**ALL_ONE, "U3": 1})
    assert (v["Bake"], v["Cake"]) == (0, 0)


def test_missing_exogenous_value_is_an_error(cake):
    with pytest.raises(ModelError):
        evaluate(cake, {"Water": 1})


def test_intervention_examples(cake):
    assert evaluate(intervene(cake, ("Batter", 0)), ALL_ONE)["Cake"] == 0
    zeros = {u: 0 for u in cake.exogenous}
    assert evaluate(intervene(cake, ("Cake", 1)), zeros)["Cake"] == 1
    twice = intervene(intervene(cake, ("Mix", 0)), ("Mix", 1))
    assert twice == intervene(cake, ("Mix", 1))
    assert intervene(cake, ("Mix", 0), ("Mix", 1)) == intervene(cake, ("Mix", 1))


def test_intervention_rejects_exogenous_and_bad_values(cake):
    with pytest.raises(ModelError):
        intervene(cake, ("U1", 1))
    with pytest.raises(ModelError):
        intervene(cake, ("Mix", 2))
    with pytest.raises(ModelError):
        intervene(cake, ("Nope", 1))


def test_consistency(cake):
    assert is_consistent(cake, evaluate(cake, ALL_ONE))
    assert not is_consistent(cake, {**evaluate(cake, ALL_ONE), "Cake": 0})
    empty = CausalModel(Domain.boolean(), ["u"], {})
    assert is_consistent(empty, {"u": 1})


def test_true_parents():
    m = model("domain bool\nexo A B\nvar X := xor(A, B, B)\nvar Z := and(A, not(A))\n")
    assert true_parents(m, "X") == {"A"}
    assert true_parents(m, "Z") == frozenset()
    g = least_causal_graph(m)
    assert g.edges == {("A", "X")}
    assert g.issubgraph(m.syntactic_graph())


def test_cake_least_graph_is_the_syntactic_graph(cake):
    assert least_causal_graph(cake) == cake.syntactic_graph()


def test_cycles_are_rejected():
    with pytest.raises(CyclicModelError) as err:
        CausalModel(Domain.boolean(), [], {"X": Op("not", (Var("Y"),)), "Y": Var("X")}).topological_order
    assert set(err.value.cycle) >= {"X", "Y"}


def test_disjoint_names_required():
    with pytest.raises(ModelError):
        CausalModel(Domain.boolean(), ["X"], {"X": Var("X")})


def test_every_bundled_model_evaluates_consistently(ws):
    for name, m in ws.models.items():
        assigns = list(exo_assignments(m))
        for exo in assigns[:: max(1, len(assigns) // 64)]:
            v = evaluate(m, exo)
            assert is_consistent(m, v), name
            assert v == evaluate_tree(m, exo), name


@given(st.integers(0, 4), st.integers(0, 4))
def test_evaluation_is_independent_of_topological_order(a, b):
    m = model("domain mod 5\nexo a b\nvar p := add(a, 1)\nvar q := mul(p, p)\n"
              "var r := sub(b, 2)\nvar s := pow(r, 2)\nvar t := add(q, s)\n")
    want = evaluate(m, {"a": a, "b": b})
    deps = {v: ex.variables(m.mechanisms[v]) for v in m.endogenous}
    for order in itertools.permutations(m.endogenous):
        if any(d in order[order.index(v):] for v in order for d in deps[v]):
            continue
        env = {"a": a, "b": b}
        for v in order:
            env[v] = ex.evaluate(m.mechanisms[v], env, m.domain)
        assert env == want


def test_intervened_variable_takes_its_value_everywhere(ws):
    for name, m in ws.models.items():
        for x in m.endogenous:
            for val in m.domain.elements:
                mx = intervene(m, (x, val))
                for exo in itertools.islice(exo_assignments(m), 32):
                    assert evaluate(mx, exo)[x] == val, (name, x)
