import copy
import itertools
import json

import pytest

from dgl import formula as F
from dgl.errors import QuasimodelError
from dgl.model import random_formula, random_model, validate_model
from dgl.quasimodel import (Lasso, down_state, extend_to_lasso, lasso_coherence, lower_path,
                            model_to_quasimodel, neighbourhood_member, random_quasimodel,
                            scattered_witness, shift, validate_quasimodel)

from oracles import rng

PHI = "G([]p & p) -> []G p"


def _drop_edge(doc, a, b):
    doc = copy.deepcopy(doc)
    doc["S"] = [e for e in doc["S"] if e != [a, b]]
    return doc


def test_golden_accepted(golden_doc):
    q = validate_quasimodel(golden_doc)
    assert len(q) == 3
    assert q.holds(q.index["u"], "~(" + PHI + ")")
    assert q.holds(q.index["v"], "[]p & p") and q.holds(q.index["v"], "~G p")
    assert q.holds(q.index["w"], "~p")
    assert validate_quasimodel(json.dumps(golden_doc)).to_document() == q.to_document()
    assert validate_quasimodel(q.to_document()).to_document() == q.to_document()


def test_golden_without_v_to_w(golden_doc):
    with pytest.raises(QuasimodelError) as info:
        validate_quasimodel(_drop_edge(golden_doc, "v", "w"))
    assert info.value.kind == "omega"
    assert "F~p at v" in str(info.value)


def _tiny(**over):
    doc = {"points": ["a", "b"], "order": [["a", "b"]], "S": [["a", "a"], ["b", "b"]],
           "labels": {"a": ["p"], "b": ["<>p", "p"]}, "sigma": ["<>p", "F p", "O p"]}
    doc.update(over)
    return doc


def test_tiny_is_valid():
    validate_quasimodel(_tiny(labels={"a": ["p", "O p"], "b": ["<>p", "p", "O p"]}))


@pytest.mark.parametrize("over,kind", [
    ({"labels": {"a": ["p", "~p"], "b": ["<>p"]}}, "type"),
    ({"order": [["a", "b"], ["b", "a"]]}, "order"),
    ({"labels": {"a": ["p", "O p"], "b": ["p", "O p"]}}, "coherence"),
    ({"labels": {"a": ["p", "~O p"], "b": ["<>p", "p", "O p"]}}, "sensibility"),
    ({"S": [["a", "a"]], "labels": {"a": ["p", "O p"], "b": ["<>p", "p", "O p"]}}, "seriality"),
    ({"S": [["a", "a"], ["b", "b"]], "labels": {"a": ["~p", "F p", "~O p"],
                                                "b": ["~<>p", "~p", "F p", "~O p"]}}, "omega"),
    ({"S": [["x", "a"]]}, "format"),
])
def test_error_kinds(over, kind):
    with pytest.raises(QuasimodelError) as info:
        validate_quasimodel(_tiny(**over))
    assert info.value.kind == kind


def test_continuity_error():
    # b S c, a below b, but a has no successor at or below c
    doc = {"points": ["a", "b", "c", "d"], "order": [["a", "b"]],
           "S": [["a", "d"], ["b", "c"], ["c", "c"], ["d", "d"]],
           "labels": {"a": ["p"], "b": ["<>p", "p"], "c": ["~p", "~<>p"], "d": ["p"]},
           "sigma": ["<>p"]}
    with pytest.raises(QuasimodelError) as info:
        validate_quasimodel(doc)
    assert info.value.kind == "continuity"
    assert set(info.value.witnesses) == {"a", "b", "c"}


def test_format_errors():
    for raw in ["{", {"points": []}, {"points": ["a"], "S": [], "labels": {}}]:
        with pytest.raises(QuasimodelError) as info:
            validate_quasimodel(raw)
        assert info.value.kind == "format"


def test_model_to_quasimodel_random():
    r = rng(41)
    for _ in range(100):
        m = random_model(r, 5)
        sigma = F.closure_pm(random_formula(r, 4))
        q = model_to_quasimodel(m, sigma)
        assert [list(q.pairs())] == [[(x, m.f[x]) for x in range(len(m))]]


def test_single_point_identity():
    m = validate_model({"points": ["a"], "f": {"a": "a"}, "val": {"p": ["a"]}})
    q = model_to_quasimodel(m, F.closure_pm(F.parse("G p")))
    assert q.pairs() == [(0, 0)]


def test_lasso_normal_form_and_shift():
    x = Lasso(("a", "b"), ("b", "b"))
    assert (x.stem, x.loop) == (("a",), ("b",))
    y = Lasso(("a", "b", "c"), ("b", "c"))
    assert (y.stem, y.loop) == (("a",), ("b", "c"))
    assert [y[i] for i in range(6)] == ["a", "b", "c", "b", "c", "b"]
    assert shift(y) == Lasso((), ("b", "c"))
    assert shift(Lasso((), ("b", "c"))) == Lasso((), ("c", "b"))
    assert Lasso.from_document(y.to_document()) == y
    with pytest.raises(ValueError):
        Lasso(("a",), ())


def test_golden_unwinding(golden_doc):
    q = validate_quasimodel(golden_doc)
    assert extend_to_lasso(q, start="v") == Lasso(("v",), ("w",))
    assert extend_to_lasso(q, start="w") == Lasso((), ("w",))
    assert extend_to_lasso(q, start="u") == Lasso((), ("u",))
    assert extend_to_lasso(q, ["v", "v"]) == Lasso(("v", "v"), ("w",))
    for p in "uvw":
        assert lasso_coherence(q, extend_to_lasso(q, start=p))
    bad = lasso_coherence(q, Lasso((), ("v",)))
    assert not bad and "F~([]p & p) at position 0" in bad.reason
    with pytest.raises(ValueError):
        extend_to_lasso(q, ["u", "w"])


def _quasimodels(seed, count, max_points=5):
    r = rng(seed)
    out = []
    while len(out) < count:
        sigma = F.closure_pm(random_formula(r, 3))
        q = random_quasimodel(r.randrange(10 ** 9), max_points, sigma)
        if q is not None:
            out.append(q)
    return out


def _random_walk(r, q, start, n):
    path = [start]
    for _ in range(n):
        nxt = [y for y in range(len(q)) if q.succ[path[-1]] >> y & 1]
        path.append(r.choice(nxt))
    return path


def test_unwinder_totality():
    r = rng(42)
    for q in _quasimodels(43, 80):
        for x in range(len(q)):
            prefix = [q.names[i] for i in _random_walk(r, q, x, r.randrange(4))]
            lasso = extend_to_lasso(q, prefix)
            assert lasso.prefix(len(prefix)) == prefix
            assert lasso_coherence(q, lasso), lasso_coherence(q, lasso).reason


def test_random_quasimodel_deterministic():
    sigma = F.closure_pm(F.parse("<>p & F q"))
    a = random_quasimodel(5, 5, sigma)
    b = random_quasimodel(5, 5, sigma)
    assert a.to_document() == b.to_document()


def _lowerable(q, ws, v0):
    """Brute force: does any S-path v_0..v_n with v_i below-or-equal w_i exist?"""
    layer = {v0}
    for w in ws[1:]:
        layer = {y for x in layer for y in range(len(q))
                 if q.succ[x] >> y & 1 and q.leq(y, w)}
        if not layer:
            return False
    return True


def test_lower_path_brute_force():
    r = rng(44)
    for q in _quasimodels(45, 60):
        for _ in range(5):
            ws = _random_walk(r, q, r.randrange(len(q)), r.randrange(5))
            for v0 in range(len(q)):
                if not q.leq(v0, ws[0]):
                    continue
                assert _lowerable(q, ws, v0)
                vs = [q.index[n] for n in lower_path(q, ws, v0)]
                assert vs[0] == v0 and len(vs) == len(ws)
                for a, b in zip(vs, vs[1:]):
                    assert q.succ[a] >> b & 1
                assert all(q.leq(v, w) for v, w in zip(vs, ws))


def _nbhd_oracle(q, v, m, w, horizon=200):
    if any(not q.leq(q.index[v[i]], q.index[w[i]]) for i in range(m)):
        return False
    for k in range(m):
        if v[k] == w[k] and any(v[j] != w[j] for j in range(k, horizon)):
            return False
    return True


def _lassos(r, q, count):
    out = []
    for _ in range(count):
        x = r.randrange(len(q))
        prefix = [q.names[i] for i in _random_walk(r, q, x, r.randrange(4))]
        out.append(extend_to_lasso(q, prefix))
    return list(dict.fromkeys(out))


def test_neighbourhoods_against_oracle_and_shift():
    r = rng(46)
    for q in _quasimodels(47, 60):
        ls = _lassos(r, q, 6)
        for v, w in itertools.product(ls, repeat=2):
            for m in range(1, 5):
                got = neighbourhood_member(q, v, m, w)
                assert got == _nbhd_oracle(q, v, m, w)
                if neighbourhood_member(q, v, m + 1, w):
                    assert neighbourhood_member(q, shift(v), m, shift(w))
            assert neighbourhood_member(q, v, 1, v)


def test_scattered_witness_small():
    r = rng(48)
    for q in _quasimodels(49, 40):
        ls = _lassos(r, q, r.randint(1, 5))
        best, m = scattered_witness(q, ls)
        assert best in ls
        assert [x for x in ls if neighbourhood_member(q, x, m, best)] == [best]
    with pytest.raises(ValueError):
        scattered_witness(q, [])


def test_down_states(golden_doc):
    q = validate_quasimodel(golden_doc)
    u = down_state(q, "u")
    assert len(u) == 2 and u.names[u.root] == "u"
    assert len(down_state(q, "v")) == 1
