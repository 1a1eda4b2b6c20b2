"""Simulation formulas.

``sim_formula(w)`` is true at a model point exactly when ``w`` simulates
the state of that point: the conjunction of the root label with ``<>Sim``
of every substate.  Substates are shared through formula interning, so a
point reachable along several chains contributes one node.
"""
from . import formula as F
from .model import _bits
from .states import simulates, state_of_point


def label_conjunction(sigma, mask):
    """Conjunction of one literal per representative, canonical order."""
    lits = [r if mask >> i & 1 else F.Neg(r) for i, r in enumerate(sigma.reps)]
    return F.conjunction(lits)


def sim_formulas(w):
    """``Sim`` of the substate at every point of ``w`` (list by point)."""
    out = [None] * len(w)
    for x in w.height_order:
        parts = [label_conjunction(w.sigma, w.labels[x])]
        seen = set()
        for y in sorted(_bits(w.below[x]), key=lambda y: (w.heights[y], y)):
            d = F.Dia(out[y])
            if d not in seen:
                seen.add(d)
                parts.append(d)
        out[x] = F.conjunction(parts)
    return out


def sim_formula(w):
    return sim_formulas(w)[w.root]


def check_characterization(m, x, w):
    """Compare the two routes: truth of ``Sim(w)`` at ``x`` and the
    simulation check against the state of ``x``.  Always true unless
    something is broken."""
    xi = m.index[x] if not isinstance(x, int) else x
    lhs = bool(m.truth_mask(sim_formula(w)) >> xi & 1)
    rhs = simulates(w, state_of_point(m, xi, w.sigma))
    return lhs == rhs


def sim_text(w, max_size=20000):
    """Printed ``Sim(w)``; raises ``ValueError`` above ``max_size`` nodes."""
    return F.to_string(sim_formula(w), max_size=max_size)

