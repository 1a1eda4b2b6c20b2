"""Quasimodels, realising paths presented as lassos, and neighbourhoods.

A quasimodel is a finite labelled strict poset with a transition relation
``S``.  Validation checks, in this order: document format, labels are
types, the order is a strict partial order, label coherence along the
order, sensibility of every ``S`` pair, continuity of ``S``, seriality and
realisation of every ``F``-obligation along ``S``.

Continuity is taken in the downset topology: if ``a S b`` and ``a' ≼ a``
then ``a' S b'`` for some ``b' ≼ b``.
"""
import json
import math
import random
from collections import deque
from dataclasses import dataclass

from . import formula as F
from .errors import QuasimodelError, StateError
from .model import _bits, transitive_closure
from .states import State, coherence_violation, complete_type, tables


class Quasimodel:
    """A validated finite quasimodel.  Immutable.

    ``below[i]`` and ``succ[i]`` are bitmasks over point indices;
    ``labels[i]`` is a type mask over ``sigma``.
    """

    def __init__(self, sigma, names, below, labels, succ):
        self.sigma = sigma
        self.names = tuple(names)
        self.below = tuple(below)
        self.labels = tuple(labels)
        self.succ = tuple(succ)
        self.index = {p: i for i, p in enumerate(self.names)}

    def __len__(self):
        return len(self.names)

    def __repr__(self):
        return f"Quasimodel({len(self.names)} points)"

    def leq(self, i, j):
        return i == j or bool(self.below[j] >> i & 1)

    def holds(self, i, f):
        """Does the label of point ``i`` contain ``f``?"""
        j, pos = self.sigma.literal(F.parse(f))
        return (self.labels[i] >> j & 1) == int(pos)

    def label(self, i):
        return tables(self.sigma).members(self.labels[i])

    def pairs(self):
        return [(a, b) for a in range(len(self)) for b in _bits(self.succ[a])]

    def to_document(self):
        n = self.names
        tb = tables(self.sigma)
        inner = []
        for j in range(len(n)):
            sub = 0
            for i in _bits(self.below[j]):
                sub |= self.below[i]
            inner.append(self.below[j] & ~sub)
        return {
            "points": list(n),
            "order": [[n[i], n[j]] for j in range(len(n)) for i in _bits(inner[j])],
            "S": [[n[a], n[b]] for a, b in self.pairs()],
            "labels": {n[i]: [str(f) for f in tb.members(m)] for i, m in enumerate(self.labels)},
            "sigma": [str(f) for f in self.sigma.reps],
        }


def _parse_document(raw):
    if isinstance(raw, str):
        try:
            raw = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise QuasimodelError("format", f"invalid JSON: {exc}") from None
    try:
        names = [str(p) for p in raw["points"]]
        order = [tuple(map(str, e)) for e in raw.get("order", [])]
        pairs = [tuple(map(str, e)) for e in raw["S"]]
        labels = raw["labels"]
        sig = raw.get("sigma")
    except (KeyError, TypeError, ValueError) as exc:
        raise QuasimodelError("format", f"missing or malformed field: {exc}") from None
    if not names:
        raise QuasimodelError("format", "a quasimodel needs at least one point")
    if len(set(names)) != len(names):
        raise QuasimodelError("format", "duplicate point names")
    index = {p: i for i, p in enumerate(names)}

    def idx(p, where):
        if p not in index:
            raise QuasimodelError("format", f"{where} mentions unknown point {p!r}")
        return index[p]

    for p in names:
        if p not in labels:
            raise QuasimodelError("format", f"no label for {p!r}")
    try:
        if sig:
            sigma = F.closure_of([F.parse(s) for s in sig])
        else:
            fs = [F.parse(s) for p in names for s in labels[p]]
            if not fs:
                raise QuasimodelError("format", "cannot infer the closure from empty labels")
            sigma = F.closure_of(fs)
    except F.FormulaSyntaxError as exc:
        raise QuasimodelError("format", str(exc)) from None
    masks = []
    for p in names:
        try:
            masks.append(complete_type(sigma, labels[p]))
        except (StateError, F.FormulaSyntaxError) as exc:
            raise QuasimodelError("type", f"label of {p}: {exc}", [p]) from None
    edges = [(idx(a, "order"), idx(b, "order")) for a, b in order]
    succ = [0] * len(names)
    for a, b in pairs:
        succ[idx(a, "S")] |= 1 << idx(b, "S")
    return sigma, names, edges, masks, succ


def validate_quasimodel(raw):
    """Check a quasimodel document (dict, JSON text or :class:`Quasimodel`).

    Returns the :class:`Quasimodel`; raises :class:`QuasimodelError` naming
    the first violated condition and the points involved.
    """
    if isinstance(raw, Quasimodel):
        q = raw
        below = list(q.below)
    else:
        sigma, names, edges, masks, succ = _parse_document(raw)
        below = transitive_closure(len(names), edges)
        q = Quasimodel(sigma, names, below, masks, succ)
    check_quasimodel(q)
    return q


def check_quasimodel(q):
    names = q.names
    tb = tables(q.sigma)
    for i, m in enumerate(q.labels):
        if not tb.is_type(m):
            raise QuasimodelError("type", f"label of {names[i]} is not a type", [names[i]])
    for i, b in enumerate(q.below):
        if b >> i & 1:
            raise QuasimodelError("order", f"order has a cycle through {names[i]}", [names[i]])
        for j in _bits(b):
            if q.below[j] & ~b:
                raise QuasimodelError("order", "order is not transitive", [names[i], names[j]])
    bad = coherence_violation(q.sigma, q.below, q.labels)
    if bad is not None:
        i, f, positive = bad
        what = "has no witness below" if positive else "is contradicted below"
        raise QuasimodelError("coherence", f"{f} at {names[i]} {what}", [names[i]])
    for a, b in q.pairs():
        if not tb.sensible(q.labels[a], q.labels[b]):
            raise QuasimodelError("sensibility", f"pair ({names[a]}, {names[b]}) is not sensible",
                                  [names[a], names[b]])
    for a, b in q.pairs():
        down_b = q.below[b] | 1 << b
        for c in _bits(q.below[a]):
            if not q.succ[c] & down_b:
                raise QuasimodelError(
                    "continuity",
                    f"{names[a]} S {names[b]} and {names[c]} below {names[a]}, but "
                    f"{names[c]} has no S-successor at or below {names[b]}",
                    [names[a], names[b], names[c]])
    for a in range(len(names)):
        if not q.succ[a]:
            raise QuasimodelError("seriality", f"{names[a]} has no S-successor", [names[a]])
    for a in range(len(names)):
        missing = [q.sigma.reps[i] for i, c in tb.evts
                   if q.labels[a] >> i & 1 and not _reachable(q, a, c)]
        if missing:
            raise QuasimodelError(
                "omega", "; ".join(f"{f} at {names[a]} is not realised along S" for f in missing),
                [names[a]] + [str(f) for f in missing])
    return q


def _reachable(q, start, lit):
    """Is some point satisfying ``lit`` reachable from ``start`` in zero or
    more ``S`` steps?"""
    seen = 1 << start
    todo = [start]
    while todo:
        x = todo.pop()
        if (q.labels[x] >> lit[0] & 1) == lit[1]:
            return True
        for y in _bits(q.succ[x] & ~seen):
            seen |= 1 << y
            todo.append(y)
    return False


def model_to_quasimodel(m, sigma):
    """The deterministic quasimodel of a poset model: ``S`` is the graph of
    ``f`` and labels are truth over ``sigma``."""
    truth = [m.truth_mask(r) for r in sigma.reps]
    labels = []
    for x in range(len(m)):
        lab = 0
        for b, t in enumerate(truth):
            if t >> x & 1:
                lab |= 1 << b
        labels.append(lab)
    succ = [1 << y for y in m.f]
    return validate_quasimodel(Quasimodel(sigma, m.points, m.below, labels, succ))


def down_state(q, x):
    """The state formed by ``x`` and the points below it."""
    xi = q.index[x] if not isinstance(x, int) else x
    pts = [i for i in range(len(q)) if q.leq(i, xi)]
    pos = {i: k for k, i in enumerate(pts)}
    below = [sum(1 << pos[j] for j in _bits(q.below[i])) for i in pts]
    return State(q.sigma, [q.names[i] for i in pts], below, pos[xi], [q.labels[i] for i in pts])


# ---------------------------------------------------------------- lassos

@dataclass(frozen=True)
class Lasso:
    """An ultimately periodic path ``stem + loop + loop + ...`` of point
    names.  Always stored in normal form (shortest loop, shortest stem)."""

    stem: tuple
    loop: tuple

    def __post_init__(self):
        if not self.loop:
            raise ValueError("a lasso needs a nonempty loop")
        stem, loop = normalise(tuple(self.stem), tuple(self.loop))
        object.__setattr__(self, "stem", stem)
        object.__setattr__(self, "loop", loop)

    def __getitem__(self, i):
        if i < len(self.stem):
            return self.stem[i]
        return self.loop[(i - len(self.stem)) % len(self.loop)]

    def prefix(self, n):
        return [self[i] for i in range(n)]

    def to_document(self):
        return {"stem": list(self.stem), "loop": list(self.loop)}

    @classmethod
    def from_document(cls, doc):
        if isinstance(doc, str):
            doc = json.loads(doc)
        return cls(tuple(map(str, doc.get("stem", []))), tuple(map(str, doc["loop"])))

    def sort_key(self):
        return (len(self.stem) + len(self.loop), self.stem, self.loop)


def normalise(stem, loop):
    n = len(loop)
    for d in range(1, n + 1):
        if n % d == 0 and loop == loop[:d] * (n // d):
            loop = loop[:d]
            break
    while stem and stem[-1] == loop[-1]:
        loop = (stem[-1],) + loop[:-1]
        stem = stem[:-1]
    return stem, loop


def shift(lasso):
    """The lasso advanced by one position."""
    if lasso.stem:
        return Lasso(lasso.stem[1:], lasso.loop)
    return Lasso((), lasso.loop[1:] + lasso.loop[:1])


def _pending(q, x):
    """``F``-representatives in the label of ``x`` whose argument is not."""
    tb = tables(q.sigma)
    lab = q.labels[x]
    return [i for i, c in tb.evts if lab >> i & 1 and not tb.holds(lab, c)]


def _update_queue(q, queue, x):
    tb = tables(q.sigma)
    lab = q.labels[x]
    child = dict(tb.evts)
    kept = [i for i in queue if not tb.holds(lab, child[i])]
    for i in _pending(q, x):
        if i not in kept:
            kept.append(i)
    return tuple(kept)


def _path_to(q, start, lit):
    """Shortest path of at least one step from ``start`` to a point
    satisfying ``lit`` (ties broken by point order); None if none."""
    parent = {}
    frontier = deque()
    for y in _bits(q.succ[start]):
        if y not in parent:
            parent[y] = None
            frontier.append(y)
    while frontier:
        x = frontier.popleft()
        if (q.labels[x] >> lit[0] & 1) == lit[1]:
            path = [x]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return path[::-1]
        for y in _bits(q.succ[x]):
            if y not in parent:
                parent[y] = x
                frontier.append(y)
    return None


def extend_to_lasso(q, prefix=(), start=None):
    """Extend a finite ``S``-path (point names) to a realising lasso.

    Pending ``F``-obligations are served first-in first-out: the walk heads
    for the nearest point realising the oldest obligation.  The loop closes
    at the first repeated (point, queue) configuration.
    """
    prefix = [q.index[p] if not isinstance(p, int) else p for p in prefix]
    if not prefix:
        if start is None:
            raise ValueError("need a prefix or a start point")
        prefix = [q.index[start] if not isinstance(start, int) else start]
    for a, b in zip(prefix, prefix[1:]):
        if not q.succ[a] >> b & 1:
            raise ValueError(f"prefix is not an S-path at ({q.names[a]}, {q.names[b]})")
    tb = tables(q.sigma)
    child = dict(tb.evts)
    path = []
    queue = ()
    for x in prefix:
        queue = _update_queue(q, queue, x)
        path.append(x)
    configs = [(path[-1], queue)]
    seen = {configs[0]: len(path) - 1}
    while True:
        x = path[-1]
        if queue:
            step = _path_to(q, x, child[queue[0]])
            if step is None:
                raise ValueError(f"{q.sigma.reps[queue[0]]} at {q.names[x]} cannot be realised")
        else:
            succs = list(_bits(q.succ[x]))
            if not succs:
                raise ValueError(f"{q.names[x]} has no S-successor")
            step = [succs[0]]
        for y in step:
            queue = _update_queue(q, queue, y)
            path.append(y)
            cfg = (y, queue)
            if cfg in seen:
                k = seen[cfg]
                path.pop()
                names = [q.names[i] for i in path]
                return Lasso(tuple(names[:k]), tuple(names[k:]))
            seen[cfg] = len(path) - 1


class Verdict:
    """Boolean result with a reason for failures."""

    def __init__(self, ok, reason=""):
        self.ok = ok
        self.reason = reason

    def __bool__(self):
        return self.ok

    def __repr__(self):
        return "Verdict(ok)" if self.ok else f"Verdict(failed: {self.reason})"


def lasso_coherence(q, lasso):
    """Check that labels along the lasso agree with the temporal and
    spatial semantics of their members."""
    tb = tables(q.sigma)
    try:
        idx = [q.index[p] for p in lasso.stem + lasso.loop]
    except KeyError as exc:
        return Verdict(False, f"unknown point {exc.args[0]!r}")
    s, L = len(lasso.stem), len(lasso.loop)
    at = (lambda k: idx[k] if k < s else idx[s + (k - s) % L])
    horizon = s + 2 * L
    reps = q.sigma.reps
    for m in range(s + L):
        x, y = at(m), at(m + 1)
        name = q.names[x]
        if not q.succ[x] >> y & 1:
            return Verdict(False, f"({name}, {q.names[y]}) at position {m} is not in S")
        lab = q.labels[x]
        for i, c in tb.nexts:
            if bool(lab >> i & 1) != tb.holds(q.labels[y], c):
                return Verdict(False, f"{reps[i]} at position {m} disagrees with position {m + 1}")
        for i, c in tb.evts:
            later = [tb.holds(q.labels[at(k)], c) for k in range(m, max(horizon, m + L + 1))]
            if bool(lab >> i & 1) != any(later):
                return Verdict(False, f"{reps[i]} at position {m} disagrees with the path")
        for i, c in tb.dias:
            if lab >> i & 1 and not any(tb.holds(q.labels[v], c) for v in _bits(q.below[x])):
                return Verdict(False, f"{reps[i]} at position {m} has no witness below {name}")
    return Verdict(True)


def _horizon(a, b, k=0):
    return max(len(a.stem), len(b.stem), k) + math.lcm(len(a.loop), len(b.loop))


def neighbourhood_member(q, v, m, w):
    """Decide whether lasso ``v`` lies in the ``m``-neighbourhood of ``w``:
    ``v_i ≼ w_i`` for ``i < m``, and agreement at some ``k < m`` forces
    agreement from ``k`` on."""
    for i in range(m):
        if not q.leq(q.index[v[i]], q.index[w[i]]):
            return False
    for k in range(m):
        if v[k] == w[k]:
            H = _horizon(v, w, k)
            if any(v[j] != w[j] for j in range(k, H)):
                return False
    return True


def scattered_witness(q, lassos):
    """A member of ``lassos`` isolated by its 1-neighbourhood, and ``m = 1``.

    The member chosen has a first point minimal among all first points
    (ties broken by point order, then by lasso shape).
    """
    lassos = list(dict.fromkeys(lassos))
    if not lassos:
        raise ValueError("empty set of lassos")
    firsts = {q.index[x[0]] for x in lassos}
    minimal = [x for x in lassos
               if not any(q.below[q.index[x[0]]] >> y & 1 for y in firsts)]
    best = min(minimal, key=lambda x: (q.index[x[0]], x.sort_key()))
    return best, 1


def lower_path(q, path, v0):
    """Given an ``S``-path ``w_0..w_n`` and ``v_0 ≼ w_0``, an ``S``-path
    ``v_0..v_n`` with ``v_i ≼ w_i`` (smallest index chosen at each step)."""
    ws = [q.index[p] if not isinstance(p, int) else p for p in path]
    v = q.index[v0] if not isinstance(v0, int) else v0
    if not q.leq(v, ws[0]):
        raise ValueError("start point is not below the first point of the path")
    out = [v]
    for w in ws[1:]:
        options = q.succ[out[-1]] & (q.below[w] | 1 << w)
        if not options:
            raise ValueError("continuity fails: cannot lower the path")
        out.append(next(_bits(options)))
    return [q.names[i] for i in out]


# ---------------------------------------------------------------- random quasimodels

def _prune(sigma, alive, below, labels, succ):
    """Largest sub-structure on ``alive`` points that is a quasimodel."""
    tb = tables(sigma)
    n = len(labels)
    changed = True
    while changed:
        changed = False
        for x in range(n):
            if not alive >> x & 1:
                continue
            b = below[x] & alive
            lab = labels[x]
            ok = True
            for i, c in tb.dias:
                if bool(lab >> i & 1) != any(tb.holds(labels[y], c) for y in _bits(b)):
                    ok = False
            if ok:
                for y in _bits(succ[x] & alive):
                    db = (below[y] | 1 << y) & alive
                    if any(not succ[c] & db for c in _bits(b)):
                        succ[x] &= ~(1 << y)
                        changed = True
                if not succ[x] & alive:
                    ok = False
            if ok:
                for i, c in tb.evts:
                    if lab >> i & 1:
                        sub = Quasimodel(sigma, [str(k) for k in range(n)], below, labels,
                                         [s & alive for s in succ])
                        if not _reachable(sub, x, c):
                            ok = False
                            break
            if not ok:
                alive &= ~(1 << x)
                changed = True
    return alive


def random_quasimodel(seed, max_points, sigma, tries=50):
    """A random valid quasimodel over ``sigma`` with at most ``max_points``
    points, or None if every attempt collapsed."""
    rng = random.Random(seed)
    tb = tables(sigma)
    types = tb.types()
    for _ in range(tries):
        n = rng.randint(1, max_points)
        density = rng.random()
        edges = [(i, j) for j in range(n) for i in range(j) if rng.random() < density * 0.6]
        below = transitive_closure(n, edges)
        labels = []
        for x in range(n):
            forced1 = forced0 = 0
            for i, c in tb.dias:
                if any(tb.holds(labels[y], c) for y in _bits(below[x])):
                    forced1 |= 1 << i
                else:
                    forced0 |= 1 << i
            fit = [t for t in types if t & forced1 == forced1 and not t & forced0]
            labels.append(rng.choice(fit))
        succ = [0] * n
        for a in range(n):
            for b in range(n):
                if tb.sensible(labels[a], labels[b]) and rng.random() < 0.8:
                    succ[a] |= 1 << b
        alive = _prune(sigma, (1 << n) - 1, below, labels, succ)
        if not alive:
            continue
        keep = list(_bits(alive))
        pos = {x: k for k, x in enumerate(keep)}

        def remap(mask):
            out = 0
            for y in _bits(mask & alive):
                out |= 1 << pos[y]
            return out

        q = Quasimodel(sigma, [f"q{k}" for k in range(len(keep))],
                       [remap(below[x]) for x in keep], [labels[x] for x in keep],
                       [remap(succ[x]) for x in keep])
        return validate_quasimodel(q)
    return None
