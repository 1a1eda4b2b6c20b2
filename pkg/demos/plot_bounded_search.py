"""
Bounded satisfiability search
=============================

"""
from dgl import SearchBounds, extend_to_lasso, lasso_coherence, sat_search

phi = "G([]p & p) -> []G p"

# phi holds on every finite poset model, but its negation has a quasimodel
out = sat_search("~(" + phi + ")", SearchBounds(max_norm=4, seed=1))
print(out.verdict, len(out.certificate), "points, witness", out.witness)
for p, lab in out.certificate.to_document()["labels"].items():
    print(" ", p, lab)
print(bool(lasso_coherence(out.certificate, extend_to_lasso(out.certificate, start=out.witness))))

for f in ["p & ~p", "G p & F ~p", "<>p & []F q"]:
    r = sat_search(f)
    print(f, "->", r.verdict, "" if r.sat else f"(exhausted={r.exhausted})")
