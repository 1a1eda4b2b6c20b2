"""Finite dynamic poset models and their model checker.

A model is a finite strict poset with a monotone self-map and a valuation.
The poset carries the downset topology, so the derivative of a set ``A`` is
the set of points having a strict predecessor in ``A``.  Sets of points are
handled internally as integer bitmasks over the point indices.
"""
import json
import random
from dataclasses import dataclass

from . import formula as F
from .errors import ModelError


def _bits(mask):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def transitive_closure(n, edges):
    """Strict-predecessor masks ``below[y]`` of the transitive closure of
    ``edges`` (pairs ``(x, y)`` meaning x below y) on ``range(n)``."""
    below = [0] * n
    for x, y in edges:
        below[y] |= 1 << x
    changed = True
    while changed:
        changed = False
        for y in range(n):
            acc = below[y]
            for x in _bits(below[y]):
                acc |= below[x]
            if acc != below[y]:
                below[y] = acc
                changed = True
    return below


class PosetModel:
    """A validated finite dynamic poset model.  Immutable.

    Attributes: ``points`` (tuple of names), ``below`` (tuple of strict
    predecessor masks), ``f`` (tuple of successor indices), ``val`` (dict
    atom -> mask).
    """

    def __init__(self, points, below, f, val):
        self.points = tuple(points)
        self.below = tuple(below)
        self.f = tuple(f)
        self.val = dict(val)
        self.index = {p: i for i, p in enumerate(self.points)}
        self.full = (1 << len(self.points)) - 1
        self._cache = {}

    def __len__(self):
        return len(self.points)

    def __repr__(self):
        return f"PosetModel({len(self.points)} points)"

    def leq(self, i, j):
        return i == j or bool(self.below[j] >> i & 1)

    def names(self, mask):
        return frozenset(self.points[i] for i in _bits(mask))

    def preimage(self, mask):
        out = 0
        for i, j in enumerate(self.f):
            if mask >> j & 1:
                out |= 1 << i
        return out

    def derivative(self, mask):
        out = 0
        for i, b in enumerate(self.below):
            if b & mask:
                out |= 1 << i
        return out

    def truth_mask(self, phi):
        """Truth set of ``phi`` as a bitmask (memoised per model)."""
        hit = self._cache.get(phi)
        if hit is not None:
            return hit
        k = phi.kind
        if k == F.ATOM:
            out = self.val.get(phi.name, 0)
        elif k == F.NOT:
            out = self.full & ~self.truth_mask(phi.child)
        elif k == F.AND:
            out = self.truth_mask(phi.left) & self.truth_mask(phi.right)
        elif k == F.DIA:
            out = self.derivative(self.truth_mask(phi.child))
        elif k == F.NEXT:
            out = self.preimage(self.truth_mask(phi.child))
        else:
            # least fixpoint of T -> [[phi]] | f^-1(T)
            base = self.truth_mask(phi.child)
            out = base
            while True:
                nxt = base | self.preimage(out)
                if nxt == out:
                    break
                out = nxt
        self._cache[phi] = out
        return out

    def to_document(self):
        order = [[self.points[i], self.points[j]]
                 for j in range(len(self.points)) for i in _bits(self.below[j])]
        return {
            "points": list(self.points),
            "order": order,
            "f": {self.points[i]: self.points[j] for i, j in enumerate(self.f)},
            "val": {a: sorted(self.names(m)) for a, m in sorted(self.val.items())},
        }


@dataclass(frozen=True)
class TruthSet:
    formula: F.Formula
    points: frozenset

    def __contains__(self, x):
        return x in self.points

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(sorted(self.points))


def validate_model(raw):
    """Build a :class:`PosetModel` from a model document (dict or JSON text).

    The ``order`` edges are transitively closed before checking
    irreflexivity, so cover edges suffice.
    """
    if isinstance(raw, str):
        raw = json.loads(raw)
    try:
        points = [str(p) for p in raw["points"]]
        order = raw.get("order", [])
        fmap = raw["f"]
        val = raw.get("val", {})
    except (KeyError, TypeError) as exc:
        raise ModelError("format", f"missing or malformed field: {exc}") from None
    if not points:
        raise ModelError("format", "a model needs at least one point")
    if len(set(points)) != len(points):
        raise ModelError("format", "duplicate point names")
    index = {p: i for i, p in enumerate(points)}

    def idx(p, where):
        try:
            return index[str(p)]
        except KeyError:
            raise ModelError("unknown-point", f"{where} mentions unknown point {p!r}") from None

    edges = []
    for pair in order:
        if len(pair) != 2:
            raise ModelError("format", f"order entry {pair!r} is not a pair")
        edges.append((idx(pair[0], "order"), idx(pair[1], "order")))
    below = transitive_closure(len(points), edges)
    for i, b in enumerate(below):
        if b >> i & 1:
            raise ModelError("cycle", f"order has a cycle through {points[i]!r}")

    f = []
    for p in points:
        if p not in fmap:
            raise ModelError("f-not-total", f"f is undefined at {p!r}")
        f.append(idx(fmap[p], "f"))
    for p in fmap:
        idx(p, "f")

    m = PosetModel(points, below, f, {})
    for j in range(len(points)):
        for i in _bits(below[j]):
            if not m.leq(f[i], f[j]):
                raise ModelError(
                    "f-not-monotone",
                    f"{points[i]} < {points[j]} but f({points[i]})={points[f[i]]} "
                    f"is not below-or-equal f({points[j]})={points[f[j]]}")

    masks = {}
    for a, pts in val.items():
        try:
            F.Atom(a)
        except Exception:
            raise ModelError("unknown-atom", f"invalid atom name {a!r}") from None
        mask = 0
        for p in pts:
            mask |= 1 << idx(p, f"valuation of {a}")
        masks[a] = mask
    return PosetModel(points, below, f, masks)


def evaluate(m, phi):
    """Truth set of ``phi`` in ``m``.  Atoms missing from the valuation are false."""
    phi = F.parse(phi)
    return TruthSet(phi, m.names(m.truth_mask(phi)))


def is_valid(m, phi):
    phi = F.parse(phi)
    return m.truth_mask(phi) == m.full


# ---------------------------------------------------------------- axioms

def _taut_schemes():
    P, Q, R = F.Atom("phi"), F.Atom("psi"), F.Atom("chi")
    imp = F.Implies
    return {
        "Taut-em": (P | ~P),
        "Taut-k": imp(P, imp(Q, P)),
        "Taut-s": imp(imp(P, imp(Q, R)), imp(imp(P, Q), imp(P, R))),
        "Taut-contra": imp(imp(~P, ~Q), imp(Q, P)),
        "Taut-and": imp(P & Q, P),
        "Taut-dn": imp(~~P, P),
    }


def _schemes():
    P, Q = F.Atom("phi"), F.Atom("psi")
    imp, box, nxt, hence = F.Implies, F.Box, F.Next, F.Hence
    out = _taut_schemes()
    out.update({
        "K": imp(box(imp(P, Q)), imp(box(P), box(Q))),
        "L": imp(box(imp(box(P), P)), box(P)),
        "Next-neg": F.Iff(~nxt(P), nxt(~P)),
        "Next-and": F.Iff(nxt(P & Q), nxt(P) & nxt(Q)),
        "C": imp(nxt(P) & nxt(box(P)), box(nxt(P))),
        "K-G": imp(hence(imp(P, Q)), imp(hence(P), hence(Q))),
        "Fix-G": imp(hence(P), P & nxt(hence(P))),
        "Ind-G": imp(hence(imp(P, nxt(P))), imp(P, hence(P))),
    })
    return out


SCHEMES = _schemes()
_ALIASES = {"Next¬": "Next-neg", "Next∧": "Next-and", "K■": "K-G",
            "Fix■": "Fix-G", "Ind■": "Ind-G"}
METAVARIABLES = ("phi", "psi", "chi")


def scheme_variables(name):
    return [v for v in METAVARIABLES if v in F.atoms(SCHEMES[_ALIASES.get(name, name)])]


def substitute(f, subst):
    """Replace atoms by formulas according to ``subst`` (name -> Formula)."""
    memo = {}

    def go(g):
        hit = memo.get(g)
        if hit is not None:
            return hit
        if g.kind == F.ATOM:
            out = subst.get(g.name, g)
        elif g.kind == F.AND:
            out = F.And(go(g.left), go(g.right))
        else:
            out = F._intern(g.kind, None, (go(g.child),))
        memo[g] = out
        return out

    return go(f)


def axiom_instance(scheme, subst):
    """Instantiate an axiom scheme.  ``subst`` maps metavariable names
    (``phi``, ``psi``, ``chi``) to formulas or formula strings."""
    name = _ALIASES.get(scheme, scheme)
    if name not in SCHEMES:
        raise KeyError(f"unknown axiom scheme {scheme!r}")
    template = SCHEMES[name]
    need = scheme_variables(name)
    missing = [v for v in need if v not in subst]
    if missing:
        raise KeyError(f"scheme {name} needs a substitution for {', '.join(missing)}")
    return substitute(template, {k: F.parse(v) for k, v in subst.items()})


# ---------------------------------------------------------------- random generation

def _rng(seed):
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def random_model(seed, max_points, atoms=("p", "q")):
    """A random valid model with between 1 and ``max_points`` points.

    Points are numbered so that the order only relates lower to higher
    indices; the map is assigned in that order, choosing for each point a
    value above the images of its predecessors.
    """
    if max_points < 1:
        raise ValueError("max_points must be at least 1")
    rng = _rng(seed)
    n = rng.randint(1, max_points)
    density = rng.random()
    edges = [(i, j) for j in range(n) for i in range(j) if rng.random() < density * 0.7]
    below = transitive_closure(n, edges)
    points = [f"x{i}" for i in range(n)]
    probe = PosetModel(points, below, list(range(n)), {})

    f = None
    style = rng.random()
    if style < 0.15:
        f = list(range(n))
    elif style < 0.25:
        c = rng.randrange(n)
        f = [c] * n
    else:
        for _ in range(20):
            f = []
            for y in range(n):
                cands = [z for z in range(n)
                         if all(probe.leq(f[x], z) for x in _bits(below[y]))]
                if not cands:
                    f = None
                    break
                f.append(rng.choice(cands))
            if f is not None:
                break
        if f is None:
            f = list(range(n))
    val = {}
    for a in atoms:
        mask = 0
        for i in range(n):
            if rng.random() < 0.5:
                mask |= 1 << i
        val[a] = mask
    return PosetModel(points, below, f, val)


def random_formula(seed, depth, atoms=("p", "q")):
    """A random formula of nesting depth at most ``depth`` over ``atoms``."""
    rng = _rng(seed)
    atoms = [F.Atom(a) for a in atoms]

    def go(d):
        if d == 0 or rng.random() < 0.25:
            return rng.choice(atoms)
        k = rng.choice((F.NOT, F.NOT, F.AND, F.AND, F.DIA, F.NEXT, F.EVT))
        if k == F.AND:
            return F.And(go(d - 1), go(d - 1))
        return F._intern(k, None, (go(d - 1),))

    return go(depth)
