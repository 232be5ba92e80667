import json

from hypothesis import given
from hypothesis import strategies as st

from oracles import reachability_pairs
from causeway.opm import (DERIVED, DERIVED_PLUS, GENERATED, TRIGGERED, TRIGGERED_PLUS, USED,
                          EdgeFact, FactBase, apply_rules_once, audit, base_facts, compare,
                          datalog_closure, semantic_edges, transitive_closure)
from causeway.provenance import ProvenanceGraph, to_causal_situation


def F(rel, s, o):
    return EdgeFact(rel, s, o)


def test_base_facts(ws):
    cake = base_facts(ws.graphs["cake"])
    assert F(USED, "mix", "flour") in cake and F(GENERATED, "batter", "mix") in cake
    assert F(USED, "bake", "pan") in cake and F(GENERATED, "cake", "bake") in cake
    assert len(cake) == 7 + 2
    assert len(base_facts(ProvenanceGraph.build({}, {}, result=None))) == 0
    single = ProvenanceGraph.build({"x": 0, "y": 0}, {"p": "f"}, [("p", "x", 1)], [("y", "p")], ["x"], "y")
    assert set(base_facts(single)) == {F(USED, "p", "x"), F(GENERATED, "y", "p")}


def test_cake_closure(ws):
    c = datalog_closure(base_facts(ws.graphs["cake"]))
    for fact in (F(DERIVED, "batter", "flour"), F(DERIVED, "cake", "batter"),
                 F(TRIGGERED, "bake", "mix"), F(DERIVED_PLUS, "cake", "flour")):
        assert fact in c


def test_used_only_base_adds_nothing():
    base = FactBase([F(USED, "p", "x"), F(USED, "q", "y")])
    assert datalog_closure(base) == base


def test_chain_closure():
    base = FactBase([F(GENERATED, "x1", "p1"), F(USED, "p1", "x2"),
                     F(GENERATED, "x2", "p2"), F(USED, "p2", "x3")])
    c = datalog_closure(base)
    assert {("x1", "x2"), ("x1", "x3"), ("x2", "x3")} == c.pairs(DERIVED_PLUS)


facts = st.lists(st.tuples(st.sampled_from([USED, GENERATED]),
                           st.sampled_from("abcdef"), st.sampled_from("abcdef")), max_size=18)


@given(facts)
def test_closure_is_a_fixpoint_and_plus_is_reachability(raw):
    c = datalog_closure(FactBase(raw))
    assert apply_rules_once(c) <= set(c)
    assert c.pairs(DERIVED_PLUS) == reachability_pairs(c.pairs(DERIVED))
    assert c.pairs(TRIGGERED_PLUS) == reachability_pairs(c.pairs(TRIGGERED))


@given(facts, facts)
def test_closure_is_monotone(a, b):
    small = datalog_closure(FactBase(a))
    big = datalog_closure(FactBase(a + b))
    assert set(small) <= set(big)


@given(facts)
def test_recorded_derivations_replay(raw):
    c = datalog_closure(FactBase(raw))
    for fact, how in c.derivations.items():
        if how is None:
            assert fact in FactBase(raw)
        else:
            assert all(p in c for p in how.premises)


def test_dump_is_sorted_one_per_line(ws):
    text = datalog_closure(base_facts(ws.graphs["chain"])).dump()
    lines = text.splitlines()
    assert lines == sorted(lines)
    assert "wasDerivedFrom(Z, Y)" in lines


def test_cake_semantic_edges(ws):
    g, interp = ws.interpreted("cake")
    sem = semantic_edges(to_causal_situation(g, interp), g)
    assert F(USED, "mix", "flour") in sem
    assert F(DERIVED_PLUS, "cake", "flour") in sem
    assert F(USED, "bake", "flour") not in sem   # mix sits between


def test_vacuous_and_identity_semantic_edges(ws):
    g, interp = ws.interpreted("vacuous")
    sem = semantic_edges(to_causal_situation(g, interp), g)
    assert F(DERIVED, "y", "x") not in sem
    g, interp = ws.interpreted("identity")
    sem = semantic_edges(to_causal_situation(g, interp), g)
    assert F(USED, "p", "x") in sem and F(GENERATED, "y", "p") in sem


def test_cake_audit_is_clean(ws):
    rep = audit(*ws.interpreted("cake"))
    assert rep.clean
    assert not rep.conjecture_counterexamples


def test_vacuous_audit(ws):
    rep = audit(*ws.interpreted("vacuous"))
    assert F(DERIVED, "y", "x") in rep.unsound[DERIVED]
    assert rep.all("missed") == []
    text = rep.text()
    assert text.index("UNSOUND") < text.index("wasDerivedFrom(y, x)") < text.index("MISSED")
    doc = json.loads(rep.to_json())
    assert ["y", "x"] in doc["unsound"][DERIVED]


def test_audit_sections_partition(ws):
    for name in ws.graphs:
        g, interp = ws.interpreted(name)
        syn = datalog_closure(base_facts(g))
        sem = semantic_edges(to_causal_situation(g, interp), g)
        rep = compare(syn, sem)
        for rel in rep.sound:
            parts = [rep.sound[rel], rep.unsound[rel], rep.missed[rel]]
            assert set().union(*parts) == syn.facts(rel) | sem.facts(rel)
            assert sum(map(len, parts)) == len(set().union(*parts))


def test_transitive_closure_matches_networkx():
    pairs = {("a", "b"), ("b", "c"), ("c", "a"), ("d", "e")}
    assert transitive_closure(pairs) == reachability_pairs(pairs)
