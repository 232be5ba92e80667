import numpy as np
import pytest

from causeway import dsl
from causeway.approximation import (BlackBoxFunction, CausalFunction, PowerBudgetExceeded,
                                    PredictivePowerRelation, SignatureError, case_split_semantics,
                                    causal_function_of_model, compare_power, constant_semantics,
                                    fixed_semantics, is_global_approx, is_local_approx,
                                    is_pointwise_approx, partial_valuations, predictive_power)
from causeway.model import evaluate
from causeway.workspace import bundled_dir, bundled_files, load_record, load_semantics

DATA = bundled_dir()
SEMANTICS = [p.stem for p in bundled_files(".sem")]


def sem(name, causal=False):
    return load_semantics(DATA / f"{name}.sem", causal=causal)


def pow_cases(swap=()):
    cases = {u: load_record(f"pow_u{u}", DATA, "pow") for u in range(5)}
    for a, b in swap:
        cases[a], cases[b] = cases[b], cases[a]
    return cases


def test_constant_semantics_is_pointwise_for_any_function(ws):
    for P, f in (sem("pow_const"), sem("chain_const"), sem("pow_const", True), sem("chain_const", True)):
        assert is_pointwise_approx(P, f)
    table = BlackBoxFunction(("a",), ws.models["chain"].domain, {(i,): (3 * i) % 7 for i in range(7)})
    assert is_pointwise_approx(constant_semantics(table), table)


def test_per_u_power_semantics():
    P, f = sem("powsem")
    assert is_pointwise_approx(P, f)
    res = is_global_approx(P, f)
    assert not res and res.counterexample.u[0] != res.counterexample.u_prime[0]


def test_squaring_graph_everywhere_is_not_pointwise():
    P, f = sem("pow_fixed2")
    res = is_pointwise_approx(P, f)
    assert not res
    assert res.counterexample.u == (0, 0, 0)       # 0^0 = 1, the square gives 0
    record = P((1, 1, 1))
    assert (record((1, 1)), f((1, 1, 1))) == (4, 2)


def test_exact_graph_is_global_and_constant_is_not():
    P, f = sem("chain_exact")
    assert is_global_approx(P, f) and is_global_approx(*sem("chain_exact", True))
    assert not is_global_approx(*sem("chain_const"))


def test_causal_function_of_models(ws):
    cake = causal_function_of_model(ws.models["cake"])
    exo = dict(ws.models["cake"].context)
    assert cake((), exo) == {k: v for k, v in evaluate(ws.models["cake"], exo).items() if k in cake.variables}
    assert cake({"Batter": 0}, exo)["Cake"] == 0
    chain = causal_function_of_model(ws.models["chain"])
    assert chain({"Y": 5}, (0,)) == {"Y": 5, "Z": 3}
    with pytest.raises(SignatureError):
        chain({"X": 1}, (0,))


def test_causal_function_containment_is_enforced(ws):
    d = ws.models["chain"].domain
    bad = CausalFunction(("X",), ("Y",), d, fn=lambda tau, u: {"Y": 0})
    with pytest.raises(ValueError):
        bad({"Y": 1}, (0,))


def test_local_approximation_examples(ws):
    P, f = sem("chain_const", True)
    res = is_local_approx(P, f)
    assert not res
    (name, v), = res.counterexample.tau
    assert name == "Y" and v != (res.counterexample.u[0] + 1) % 7
    assert is_local_approx(*sem("powsem", True))
    m = ws.models["divzero"]
    f = causal_function_of_model(m)
    assert is_local_approx(fixed_semantics(m, f.inputs, f.domain), f, tau_cap=1)


def test_tau_enumeration():
    from causeway.domain import Domain
    taus = partial_valuations(["b", "a"], Domain.boolean())
    assert taus[0] == () and len(taus) == 1 + 4 + 4
    assert taus[1] == (("a", 0),)
    many = partial_valuations([f"v{i}" for i in range(9)], Domain.boolean())
    assert max(len(t) for t in many) == 3


def test_power_examples():
    P, f = sem("powsem")
    rel = predictive_power(P, f)
    assert rel.reflexive and not rel.total
    for u in rel.space:
        for v in rel.space:
            if u[0] == v[0]:
                assert rel.holds(u, v)
            else:
                assert rel.holds(u, v) == (P(u)(v[1:]) == f(v))
    Pc, fc = sem("pow_const")
    const = predictive_power(Pc, fc)
    want = np.array([[fc(v) == fc(u) for v in const.space] for u in const.space])
    assert np.array_equal(const.matrix, want)


def test_compare_power():
    P, f = sem("chain_exact")
    exact = predictive_power(P, f)
    const = predictive_power(*sem("chain_const"))
    assert compare_power(exact, exact) == "equal"
    assert compare_power(const, exact) == "less-or-equal"
    assert compare_power(exact, const) == "greater-or-equal"
    _, f = sem("powsem")
    r1 = predictive_power(case_split_semantics("u", pow_cases(), f.inputs, f.domain, "R"), f)
    r2 = predictive_power(case_split_semantics("u", pow_cases([(0, 1)]), f.inputs, f.domain, "R"), f)
    assert compare_power(r1, r2) == "incomparable"


def test_compare_power_is_a_partial_order():
    rels = [predictive_power(*sem(n)) for n in ("powsem", "pow_const", "pow_fixed2")]
    for a in rels:
        assert compare_power(a, a) == "equal"
        for b in rels:
            ab = compare_power(a, b)
            if ab == "equal":
                assert np.array_equal(a.matrix, b.matrix)
            for c in rels:
                if ab in ("less-or-equal", "equal") and compare_power(b, c) in ("less-or-equal", "equal"):
                    assert compare_power(a, c) in ("less-or-equal", "equal")


def test_budget_and_space_checks():
    P, f = sem("powsem")
    with pytest.raises(PowerBudgetExceeded) as err:
        predictive_power(P, f, budget=100)
    assert err.value.required == 125 ** 2
    other = predictive_power(*sem("chain_exact"))
    with pytest.raises(SignatureError):
        compare_power(predictive_power(P, f), other)


def test_relation_dump_and_summary():
    rel = predictive_power(*sem("chain_exact"))
    lines = rel.dump().splitlines()
    assert len(lines) == 49 and lines[0] == "(0) ~> (0)"
    assert "total: yes" in rel.summary()
    empty = PredictivePowerRelation((), ((),), np.ones((1, 1), bool))
    assert empty.total and empty.density == 1.0


@pytest.mark.parametrize("name", SEMANTICS)
@pytest.mark.parametrize("causal", [False, True])
def test_characterisations(name, causal):
    P, f = sem(name, causal)
    rel = predictive_power(P, f)
    pointwise = is_local_approx(P, f) if causal else is_pointwise_approx(P, f)
    assert rel.reflexive == bool(pointwise)
    assert rel.total == bool(is_global_approx(P, f))


def test_global_implies_local_implies_pointwise():
    for name in SEMANTICS:
        P, f = sem(name, True)
        g, l, p = (bool(is_global_approx(P, f)), bool(is_local_approx(P, f)),
                   bool(is_pointwise_approx(P, f)))
        assert (not g or l) and (not l or p), name


def test_function_tables():
    text = "domain mod 3\ninputs a b\n" + "".join(
        f"{a} {b} -> {(a * b) % 3}\n" for a in range(3) for b in range(3))
    f = dsl.parse_function_table(text)
    assert f((2, 2)) == 1
    with pytest.raises(dsl.ParseError):
        dsl.parse_function_table("domain mod 3\ninputs a\n0 -> 1\n")
