import itertools
import json

import pytest

from causeway import dsl
from causeway.domain import Domain
from causeway.model import evaluate, least_causal_graph
from causeway.provenance import (GraphError, InconsistentLabelsError, Interpretation,
                                 ProvenanceGraph, compile_model, format_term, graph_dot,
                                 graph_to_term, interpret_graph, is_tree, proxy_name,
                                 term_to_graph, to_causal_situation, validate)

SQUARE_SUM = """{
  "artifacts": [{"id": "x", "value": 2}, {"id": "y", "value": 3},
                {"id": "t", "value": 5}, {"id": "r", "value": 4}],
  "processes": [{"id": "p1", "name": "add", "uses": [["x", 1], ["y", 2]], "generates": "t"},
                {"id": "p2", "name": "mul", "uses": [["t", 1], ["t", 2]], "generates": "r"}],
  "inputs": ["x", "y"], "result": "r"
}"""
MOD7 = "domain mod 7\nprocess add (a b) := add(a, b)\nprocess mul (a b) := mul(a, b)\n"


def test_cake_graph_validates(ws):
    g, interp = ws.interpreted("cake")
    rep = validate(g, interp)
    assert rep.ok and not rep.diagnostics


def test_non_functional_graph_is_flagged(ws):
    g, interp = ws.interpreted("cake")
    bad = ProvenanceGraph(g.labels, g.processes, g.used, g.generated + (("pan", "mix"),), g.inputs, g.result)
    rep = validate(bad, interp)
    assert not rep.is_functional


def test_arity_mismatch_is_unsorted(ws):
    g, interp = ws.interpreted("cake")
    used = tuple(u for u in g.used if not (u[0] == "bake" and u[2] == 2))
    rep = validate(ProvenanceGraph(g.labels, g.processes, used, g.generated, g.inputs, g.result), interp)
    assert not rep.is_sorted and rep.is_bipartite


def test_cycle_is_flagged():
    g = ProvenanceGraph.build({"a": 0, "b": 0}, {"p": "f", "q": "f"},
                              used=[("p", "a", 1), ("q", "b", 1)],
                              generated=[("b", "p"), ("a", "q")], inputs=[], result="a")
    assert not validate(g).is_acyclic


def test_interpret_examples(ws):
    g, interp = ws.interpreted("cake")
    assert interpret_graph(g, interp)((1,) * 6) == 1
    sq = interpret_graph(dsl.parse_graph(SQUARE_SUM), dsl.parse_interp(MOD7))
    assert sq(2, 3) == 4


def test_constant_graph_is_a_constant_function():
    g = ProvenanceGraph.build({"x": 0, "c": 1}, {}, inputs=["x"], result="c")
    fn = interpret_graph(g, Interpretation.build(Domain.boolean(), {}))
    assert fn.table() == {(0,): 1, (1,): 1}


def test_result_may_be_an_input():
    g = ProvenanceGraph.build({"x": 1}, {}, inputs=["x"], result="x")
    fn = interpret_graph(g, Interpretation.build(Domain.boolean(), {}))
    assert fn.table() == {(0,): 0, (1,): 1}


def test_interpret_rejects_invalid_graph(ws):
    g, interp = ws.interpreted("cake")
    used = tuple(u for u in g.used if u[0] != "bake")
    with pytest.raises(GraphError):
        interpret_graph(ProvenanceGraph(g.labels, g.processes, used, g.generated, g.inputs, g.result), interp)


def test_cake_situation(ws):
    g, interp = ws.interpreted("cake")
    sit = to_causal_situation(g, interp, proxy_inputs=False)
    assert set(sit.model.exogenous) == set(g.inputs)
    assert evaluate(sit.model, sit.exo) == dict(sit.sigma)
    with pytest.raises(InconsistentLabelsError) as err:
        to_causal_situation(g.with_labels({"cake": 0}), interp)
    assert err.value.node == "cake"


def test_proxies_make_inputs_endogenous(ws):
    g, interp = ws.interpreted("cake")
    sit = to_causal_situation(g, interp, proxy_inputs=True)
    assert set(g.inputs) <= set(sit.model.endogenous)
    assert set(sit.model.exogenous) == {proxy_name(g, a) for a in g.inputs}


def test_proxy_names_avoid_collisions():
    g = ProvenanceGraph.build({"x": 0, "u_x": 0}, {}, inputs=["x"], result="x")
    assert proxy_name(g, "x") == "u_u_x"


def test_vacuous_graph_drops_the_dependency(ws):
    g, interp = ws.interpreted("vacuous")
    sit = to_causal_situation(g, interp)
    edges = least_causal_graph(sit.model).edges
    assert ("x", "annihilate") not in edges
    assert ("x", "annihilate") in sit.model.syntactic_graph().edges


def test_round_trip_on_every_bundled_graph(ws):
    for name in ws.graphs:
        g, interp = ws.interpreted(name)
        fn = interpret_graph(g, interp)
        m = compile_model(g, interp)
        for u in itertools.product(interp.domain.elements, repeat=len(g.inputs)):
            assert fn(u) == evaluate(m, dict(zip(g.inputs, u)))[g.result], name


def test_labels_agree_with_recomputation_for_bundled_graphs(ws):
    for name in ws.graphs:
        g, interp = ws.interpreted(name)
        to_causal_situation(g, interp)          # raises if inconsistent
        values = interpret_graph(g, interp).values(tuple(g.artifacts[a] for a in g.inputs))
        assert all(values[a] == v for a, v in g.labels), name


def test_terms_round_trip_on_trees(ws):
    for name in ("cake", "chain", "identity", "orgate", "vacuous"):
        g, _ = ws.interpreted(name)
        assert is_tree(g)
        assert term_to_graph(graph_to_term(g), g.inputs) == g
    g, _ = ws.interpreted("chain")
    assert format_term(graph_to_term(g)) == "dbl(inc(X:3))"
    assert not is_tree(dsl.parse_graph(SQUARE_SUM))


def test_dot_export(ws):
    g, _ = ws.interpreted("cake")
    dot = graph_dot(g, "cake")
    assert '"mix" [shape=box' in dot and '"flour" [shape=ellipse' in dot
    assert dot.count("->") == len(g.used) + len(g.generated)


def test_graph_json_round_trip(ws):
    for name, g in ws.graphs.items():
        assert dsl.parse_graph(dsl.dump_graph(g)) == g, name
    doc = json.loads(dsl.dump_graph(ws.graphs["cake"]))
    assert set(doc) == {"artifacts", "processes", "inputs", "result"}
