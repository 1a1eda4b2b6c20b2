"""
States and their simulation formulas
====================================

"""
from dgl import formula as F
from dgl import evaluate, random_model, shrink, sim_formula, simulates, state_of_point

# a model: the state of a point is the down-set below it, labelled by truth
m = random_model(3, 5)
sigma = F.closure_pm(F.parse("<>p & O q"))
states = [state_of_point(m, x, sigma) for x in range(len(m))]
for x, w in zip(m.points, states):
    print(x, len(w), "points in its state")

# Sim(w) holds exactly where w is simulated
w = shrink(states[-1])
f = sim_formula(w)
print(F.to_string(f))
print(sorted(evaluate(m, f).points))
print([m.points[x] for x, s in enumerate(states) if simulates(w, s)])
