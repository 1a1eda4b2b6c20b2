import json

import pytest
from hypothesis import given, settings, strategies as st

from dgl import formula as F
from dgl.errors import ModelError
from dgl.model import (SCHEMES, axiom_instance, evaluate, is_valid, random_formula, random_model,
                       scheme_variables, validate_model)

from oracles import brute_eval, random_model_doc, rng

TWO_CHAIN = {"points": ["a", "b"], "order": [["a", "b"]], "f": {"a": "a", "b": "b"},
             "val": {"p": ["a"]}}


def test_two_chain_basics():
    m = validate_model(TWO_CHAIN)
    assert evaluate(m, "<>p").points == {"b"}
    assert evaluate(m, "[]p").points == {"a", "b"}
    assert evaluate(m, "[]p -> p").points == {"a"}
    assert is_valid(m, "[]([]p -> p) -> []p")
    assert evaluate(m, "missing").points == frozenset()


def test_json_text_accepted_and_cover_edges_closed():
    doc = {"points": ["a", "b", "c"], "order": [["a", "b"], ["b", "c"]],
           "f": {"a": "a", "b": "b", "c": "c"}, "val": {"p": ["a"]}}
    m = validate_model(json.dumps(doc))
    assert m.leq(0, 2)
    assert evaluate(m, "<>p").points == {"b", "c"}


@pytest.mark.parametrize("doc,kind", [
    ({"points": ["a"], "f": {"a": "a"}, "order": [["a", "a"]]}, "cycle"),
    ({"points": ["a", "b"], "order": [["a", "b"], ["b", "a"]], "f": {"a": "a", "b": "b"}}, "cycle"),
    ({"points": ["a"], "order": [["a", "z"]], "f": {"a": "a"}}, "unknown-point"),
    ({"points": ["a", "b"], "f": {"a": "a"}}, "f-not-total"),
    ({"points": ["a", "b"], "order": [["a", "b"]], "f": {"a": "b", "b": "a"}}, "f-not-monotone"),
    ({"points": ["a"], "f": {"a": "a"}, "val": {"P": ["a"]}}, "unknown-atom"),
    ({"points": ["a"]}, "format"),
    ({"points": [], "f": {}}, "format"),
])
def test_model_errors(doc, kind):
    with pytest.raises(ModelError) as info:
        validate_model(doc)
    assert info.value.kind == kind
    assert str(info.value).startswith(kind + ":")


def test_truth_matches_brute_force():
    r = rng(5)
    for _ in range(300):
        doc = random_model_doc(r, 5)
        m = validate_model(doc)
        phi = random_formula(r, 4)
        assert evaluate(m, phi).points == brute_eval(doc, phi), (doc, str(phi))


def _round_doc(m):
    return m.to_document()


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_duality_and_fixpoints(seed):
    r = rng(seed)
    m = random_model(r, 5)
    phi = random_formula(r, 3)
    full = m.full
    t = m.truth_mask
    assert t(F.Box(phi)) == full & ~t(F.Dia(F.Neg(phi)))
    assert t(F.Evt(phi)) == t(phi) | m.preimage(t(F.Evt(phi)))
    assert t(F.Hence(phi)) == t(phi) & m.preimage(t(F.Hence(phi)))
    assert evaluate(m, F.Evt(phi)).points == brute_eval(_round_doc(m), F.Evt(phi))
    psi = random_formula(r, 2)
    assert t(F.Next(F.And(phi, psi))) == t(F.Next(phi)) & t(F.Next(psi))
    assert t(F.Neg(F.Next(phi))) == t(F.Next(F.Neg(phi)))


def test_random_model_is_valid_document():
    for seed in range(100):
        m = random_model(seed, 6)
        again = validate_model(m.to_document())
        assert again.below == m.below and again.f == m.f
        assert random_model(seed, 6).to_document() == m.to_document()


def test_axiom_instances_and_errors():
    assert scheme_variables("L") == ["phi"]
    assert scheme_variables("K") == ["phi", "psi"]
    inst = axiom_instance("L", {"phi": "p"})
    assert inst is F.parse("[]([]p -> p) -> []p")
    assert axiom_instance("Next¬", {"phi": "q"}) is F.parse("~O q <-> O ~q")
    with pytest.raises(KeyError):
        axiom_instance("T", {"phi": "p"})
    with pytest.raises(KeyError):
        axiom_instance("K", {"phi": "p"})


def test_soundness_fuzz_small():
    r = rng(21)
    names = sorted(SCHEMES)
    for _ in range(300):
        m = random_model(r, 5)
        name = r.choice(names)
        inst = axiom_instance(name, {v: random_formula(r, 3) for v in scheme_variables(name)})
        assert is_valid(m, inst), (name, str(inst), m.to_document())


def test_fuzz_has_teeth():
    # non-theorems that fail somewhere among a few random models
    for bad in ["[]p -> p", "<>p -> <><>p", "F p -> p", "p -> O p"]:
        assert any(not is_valid(random_model(s, 4), bad) for s in range(200)), bad


def test_rules_preserve_validity():
    r = rng(22)
    names = sorted(SCHEMES)
    for _ in range(200):
        m = random_model(r, 5)
        name = r.choice(names)
        phi = axiom_instance(name, {v: random_formula(r, 2) for v in scheme_variables(name)})
        for rule in (F.Box, F.Next, F.Hence):
            assert is_valid(m, rule(phi))
        a, b = random_formula(r, 3), random_formula(r, 3)
        if is_valid(m, a) and is_valid(m, F.Implies(a, b)):
            assert is_valid(m, b)
