"""
A three-point quasimodel
========================

A labelled poset with a transition relation, checked clause by clause,
then unwound into lassos.
"""
import json
import pathlib

from dgl import extend_to_lasso, lasso_coherence, validate_quasimodel
from dgl.errors import QuasimodelError

doc = json.loads((pathlib.Path(__file__).parents[1] / "tests/data/golden_quasimodel.json").read_text())
q = validate_quasimodel(doc)
print(q, "over", len(q.sigma), "formulas")

# every point unwinds to a lasso whose labels behave like truth sets
for x in q.names:
    lasso = extend_to_lasso(q, start=x)
    print(x, lasso.to_document(), bool(lasso_coherence(q, lasso)))

# without the step from v to w the eventuality at v is never met
doc["S"].remove(["v", "w"])
try:
    validate_quasimodel(doc)
except QuasimodelError as exc:
    print("rejected:", exc)
