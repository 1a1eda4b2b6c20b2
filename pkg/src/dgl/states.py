"""Types, states, simulations and transitions between states.

A type over a closure is stored as an integer sign vector over the
closure's positive representatives.  A state is a finite rooted labelled
strict poset whose non-root points all lie below the root; its points are
indexed ``0..n-1`` and the order is kept as strict-predecessor bitmasks.

Orientation used throughout: ``simulates(v, w)`` decides ``v ⊴ w``, i.e.
there is a label-preserving, strictly forward-confluent relation from the
points of ``v`` into the points of ``w`` relating the roots.
"""
import itertools
import json
import threading
from collections import namedtuple

from . import formula as F
from .errors import LimitError, StateError
from .model import _bits, transitive_closure

Norm = namedtuple("Norm", "hgt wdt norm")

DEFAULT_TYPE_LIMIT = 1 << 16


# ---------------------------------------------------------------- per-closure tables

class _Tables:
    """Literal tables for one closure.  A literal is ``(bit, want)``: it
    holds in mask ``m`` iff ``m >> bit & 1 == want``."""

    def __init__(self, sigma):
        self.sigma = sigma
        reps = sigma.reps
        self.n = len(reps)

        def lit(f):
            i, pos = sigma.literal(f)
            return i, int(pos)

        self.ands, self.evts, self.nexts, self.dias = [], [], [], []
        height = {}
        for r in sorted(reps, key=F.tree_size):
            height[r] = 1 + max((height[F.strip(a)[0]] for a in r.args), default=0)
        self.order = sorted(range(self.n), key=lambda i: (height[reps[i]], i))
        self.kind = [r.kind for r in reps]
        self.child = [None] * self.n
        for i, r in enumerate(reps):
            if r.kind == F.AND:
                self.child[i] = (lit(r.left), lit(r.right))
                self.ands.append((i, lit(r.left), lit(r.right)))
            elif r.kind == F.EVT:
                self.child[i] = lit(r.child)
                self.evts.append((i, lit(r.child)))
            elif r.kind == F.NEXT:
                self.child[i] = lit(r.child)
                self.nexts.append((i, lit(r.child)))
            elif r.kind == F.DIA:
                self.child[i] = lit(r.child)
                self.dias.append((i, lit(r.child)))
        self._types = None
        self._types_limit = None
        self._sens = {}
        self._down = {}
        self.lock = threading.Lock()

    @staticmethod
    def holds(mask, lit):
        return (mask >> lit[0] & 1) == lit[1]

    def is_type(self, m):
        h = self.holds
        for i, a, b in self.ands:
            if (m >> i & 1) != (h(m, a) and h(m, b)):
                return False
        for i, c in self.evts:
            if h(m, c) and not m >> i & 1:
                return False
        return True

    def types(self, limit=DEFAULT_TYPE_LIMIT):
        if self._types is not None and (self._types_limit is None or limit <= self._types_limit):
            if len(self._types) > limit:
                raise LimitError(f"more than {limit} types over this closure")
            return self._types
        out = []
        order = self.order
        h = self.holds

        def rec(k, m):
            if k == len(order):
                out.append(m)
                if len(out) > limit:
                    raise LimitError(f"more than {limit} types over this closure")
                return
            i = order[k]
            kind = self.kind[i]
            if kind == F.AND:
                a, b = self.child[i]
                rec(k + 1, m | (1 << i) if h(m, a) and h(m, b) else m)
            elif kind == F.EVT and h(m, self.child[i]):
                rec(k + 1, m | 1 << i)
            else:
                rec(k + 1, m)
                rec(k + 1, m | 1 << i)

        rec(0, 0)
        out.sort()
        self._types = out
        self._types_limit = limit
        return out

    def sensible(self, a, b):
        h = self.holds
        for i, c in self.nexts:
            if (a >> i & 1) != h(b, c):
                return False
        for i, c in self.evts:
            if a >> i & 1:
                if not h(a, c) and not b >> i & 1:
                    return False
            elif b >> i & 1:
                return False
        return True

    def successors(self, a):
        """Types ``b`` with ``(a, b)`` sensible, ascending."""
        hit = self._sens.get(a)
        if hit is None:
            hit = [b for b in self.types() if self.sensible(a, b)]
            self._sens[a] = hit
        return hit

    def down(self, t):
        """Constraint ``(must1, must0)`` that every point strictly below a
        point of type ``t`` has to meet: for each ``~<>psi`` in ``t``, both
        ``~psi`` and ``~<>psi``."""
        hit = self._down.get(t)
        if hit is None:
            one = zero = 0
            for i, (j, want) in self.dias:
                if not t >> i & 1:
                    zero |= 1 << i
                    if want:
                        zero |= 1 << j
                    else:
                        one |= 1 << j
            hit = (one, zero)
            self._down[t] = hit
        return hit

    def dia_count(self, t):
        return sum(1 for i, _ in self.dias if t >> i & 1)

    def members(self, m):
        reps = self.sigma.reps
        out = [r if m >> i & 1 else F.Neg(r) for i, r in enumerate(reps)]
        return sorted(out, key=lambda g: g.sort_key)


_tables = {}
_tables_lock = threading.Lock()


def tables(sigma):
    t = _tables.get(sigma)
    if t is None:
        with _tables_lock:
            t = _tables.get(sigma)
            if t is None:
                t = _Tables(sigma)
                _tables[sigma] = t
    return t


# ---------------------------------------------------------------- types

class SigmaType:
    """A complete, locally coherent subset of a closure."""

    __slots__ = ("sigma", "mask")

    def __init__(self, sigma, mask):
        self.sigma = sigma
        self.mask = mask

    def __eq__(self, other):
        return (isinstance(other, SigmaType) and self.sigma is other.sigma
                and self.mask == other.mask)

    def __hash__(self):
        return hash((id(self.sigma), self.mask))

    def __lt__(self, other):
        return self.mask < other.mask

    def __contains__(self, f):
        f = F.parse(f)
        if f not in self.sigma and F.neg_norm(f) not in self.sigma:
            return False
        i, pos = self.sigma.literal(f)
        return (self.mask >> i & 1) == int(pos)

    def __iter__(self):
        return iter(self.formulas())

    def __len__(self):
        return len(self.sigma.reps)

    def formulas(self):
        """Members as formulas, one per representative, canonical order."""
        return tables(self.sigma).members(self.mask)

    def __repr__(self):
        return "{" + ", ".join(map(str, self.formulas())) + "}"


def is_type(sigma, mask):
    return tables(sigma).is_type(mask)


def enumerate_types(sigma, limit=DEFAULT_TYPE_LIMIT):
    """All types over ``sigma`` in ascending sign-vector order.

    Raises :class:`LimitError` when there are more than ``limit``.
    """
    return [SigmaType(sigma, m) for m in tables(sigma).types(limit)]


def _mask(t):
    return t.mask if isinstance(t, SigmaType) else t


def sensible_pair(phi, psi):
    if isinstance(phi, SigmaType) and isinstance(psi, SigmaType) and phi.sigma is not psi.sigma:
        raise StateError("sigma", "types over different closures")
    sigma = phi.sigma if isinstance(phi, SigmaType) else psi.sigma
    return tables(sigma).sensible(_mask(phi), _mask(psi))


def complete_type(sigma, formulas):
    """Extend a list of formulas to a full type over ``sigma``.

    Facts forced by the given formulas (conjuncts of true conjunctions,
    ``~psi`` under ``~F psi``) are added first; every remaining free
    representative is made false and the rest is computed bottom-up.
    Raises :class:`StateError` if no consistent type results.
    """
    tb = tables(sigma)
    fixed = {}

    def put(bit, want, why):
        old = fixed.get(bit)
        if old is not None and old != want:
            raise StateError("type", f"label is contradictory at {sigma.reps[bit]} ({why})")
        if old is None:
            fixed[bit] = want
            work.append(bit)

    work = []
    for f in formulas:
        f = F.parse(f)
        if not sigma.covers(f):
            raise StateError("type", f"{f} is not in the closure")
        i, pos = sigma.literal(f)
        put(i, int(pos), str(f))
    while work:
        i = work.pop()
        k, v = tb.kind[i], fixed[i]
        if k == F.AND and v:
            for c in tb.child[i]:
                put(c[0], c[1], str(sigma.reps[i]))
        elif k == F.EVT and not v:
            c = tb.child[i]
            put(c[0], 1 - c[1], str(sigma.reps[i]))
    m = 0
    h = tb.holds
    for i in tb.order:
        if i in fixed:
            v = fixed[i]
        elif tb.kind[i] == F.AND:
            a, b = tb.child[i]
            v = int(h(m, a) and h(m, b))
        elif tb.kind[i] == F.EVT:
            v = int(h(m, tb.child[i]))
        else:
            v = 0
        if v:
            m |= 1 << i
    if not tb.is_type(m):
        bad = [str(f) for f in tb.members(m)]
        raise StateError("type", "completion is not a type: {" + ", ".join(bad) + "}")
    return m


# ---------------------------------------------------------------- canonical keys

_key_ids = {}
_key_lock = threading.Lock()


def _key_id(key):
    k = _key_ids.get(key)
    if k is None:
        with _key_lock:
            k = _key_ids.get(key)
            if k is None:
                k = len(_key_ids)
                _key_ids[key] = k
    return k


# ---------------------------------------------------------------- states

class State:
    """A finite rooted labelled strict poset.

    ``below[i]`` is the mask of points strictly below point ``i`` and
    ``labels[i]`` the type mask of point ``i``.  Two states compare equal
    when their tree unfoldings are isomorphic (see :attr:`key`).
    """

    __slots__ = ("sigma", "names", "below", "root", "labels", "covers",
                 "_key", "_kid", "_norm", "_hgt", "_order", "__weakref__")

    def __init__(self, sigma, names, below, root, labels, check=True):
        self.sigma = sigma
        self.names = tuple(names)
        self.below = tuple(below)
        self.root = root
        self.labels = tuple(labels)
        n = len(self.names)
        cov = []
        for i in range(n):
            inner = 0
            for j in _bits(self.below[i]):
                inner |= self.below[j]
            cov.append(self.below[i] & ~inner)
        self.covers = tuple(cov)
        self._key = None
        self._kid = None
        self._norm = None
        self._hgt = None
        self._order = None
        if check:
            self._check()

    def _check(self):
        n = len(self.names)
        if n == 0:
            raise StateError("format", "a state needs at least one point")
        if len(set(self.names)) != n:
            raise StateError("format", "duplicate point names")
        for i, b in enumerate(self.below):
            if b >> i & 1:
                raise StateError("order", f"order is not irreflexive at {self.names[i]}")
            for j in _bits(b):
                if self.below[j] & ~b:
                    raise StateError("order", "order is not transitive")
        full = (1 << n) - 1
        if self.below[self.root] != full & ~(1 << self.root):
            raise StateError("root", f"not every point lies below the root {self.names[self.root]}")
        tb = tables(self.sigma)
        for i, m in enumerate(self.labels):
            if not tb.is_type(m):
                raise StateError("type", f"label of {self.names[i]} is not a type")
        bad = coherence_violation(self.sigma, self.below, self.labels)
        if bad is not None:
            i, f, positive = bad
            what = "has no witness below" if positive else "is contradicted below"
            raise StateError("coherence", f"{self.names[i]}: {f} {what}")

    # -- basic structure

    def __len__(self):
        return len(self.names)

    def __repr__(self):
        return f"State(root={self.names[self.root]}, {len(self.names)} points)"

    @property
    def height_order(self):
        """Point indices sorted by height (leaves first)."""
        if self._order is None:
            h = self.heights
            self._order = tuple(sorted(range(len(self.names)), key=lambda i: (h[i], i)))
        return self._order

    @property
    def heights(self):
        if self._hgt is None:
            h = [0] * len(self.names)
            done = [False] * len(self.names)

            def go(i):
                if not done[i]:
                    h[i] = 1 + max((go(j) for j in _bits(self.covers[i])), default=0)
                    done[i] = True
                return h[i]

            for i in range(len(self.names)):
                go(i)
            self._hgt = tuple(h)
        return self._hgt

    @property
    def key(self):
        """Canonical key of the tree unfolding: ``(label, sorted child keys)``
        recursively over covers, starting at the root."""
        if self._key is None:
            memo = {}

            def go(i):
                k = memo.get(i)
                if k is None:
                    k = (self.labels[i], tuple(sorted(set(go(j) for j in _bits(self.covers[i])))))
                    memo[i] = k
                return k

            self._key = go(self.root)
        return self._key

    @property
    def kid(self):
        if self._kid is None:
            # closures are interned and never freed, so their id is stable
            self._kid = _key_id((id(self.sigma), self.key))
        return self._kid

    def __eq__(self, other):
        return isinstance(other, State) and self.sigma is other.sigma and self.kid == other.kid

    def __hash__(self):
        return hash(self.kid)

    def __lt__(self, other):
        return sort_key(self) < sort_key(other)

    def label(self, i=None):
        """Type of point ``i`` (default: the root)."""
        return SigmaType(self.sigma, self.labels[self.root if i is None else i])

    def sub(self, i):
        """The generated substructure on ``↓i`` rooted at ``i``."""
        keep = [j for j in range(len(self.names)) if j == i or self.below[i] >> j & 1]
        pos = {j: k for k, j in enumerate(keep)}
        below = []
        for j in keep:
            m = 0
            for x in _bits(self.below[j]):
                m |= 1 << pos[x]
            below.append(m)
        return State(self.sigma, [self.names[j] for j in keep], below, pos[i],
                     [self.labels[j] for j in keep], check=False)

    def to_document(self):
        order = [[self.names[i], self.names[j]]
                 for j in range(len(self.names)) for i in _bits(self.covers[j])]
        tb = tables(self.sigma)
        return {
            "points": list(self.names),
            "order": order,
            "root": self.names[self.root],
            "labels": {self.names[i]: [str(f) for f in tb.members(m)]
                       for i, m in enumerate(self.labels)},
            "sigma": [str(f) for f in self.sigma.reps],
        }


def coherence_violation(sigma, below, labels):
    """First ``(point, formula, positive)`` where a ``<>``-member lacks a
    witness below (positive) or a ``~<>``-member is contradicted below;
    None if the labelled poset is coherent."""
    tb = tables(sigma)
    for x, b in enumerate(below):
        m = labels[x]
        for i, c in tb.dias:
            seen = any(tb.holds(labels[y], c) for y in _bits(b))
            if (m >> i & 1) and not seen:
                return x, sigma.reps[i], True
            if not (m >> i & 1) and seen:
                return x, F.Neg(sigma.reps[i]), False
    return None


def sort_key(w):
    """Deterministic ordering of states: small norm first, then the key."""
    return (norm(w).norm, len(w), w.key)


def make_state(sigma, names, order, root, labels):
    """Build a state from names, (below, above) pairs, a root name and
    label masks or formula lists."""
    names = list(names)
    index = {p: i for i, p in enumerate(names)}
    try:
        edges = [(index[a], index[b]) for a, b in order]
        r = index[root]
    except KeyError as exc:
        raise StateError("format", f"unknown point {exc.args[0]!r}") from None
    below = transitive_closure(len(names), edges)
    masks = []
    for p in names:
        lab = labels[p] if isinstance(labels, dict) else labels[index[p]]
        masks.append(lab if isinstance(lab, int) else complete_type(sigma, lab))
    return State(sigma, names, below, r, masks)


def _sigma_from(doc, label_lists):
    if doc.get("sigma"):
        return F.closure_of([F.parse(s) for s in doc["sigma"]])
    fs = [F.parse(s) for lab in label_lists for s in lab]
    if not fs:
        raise StateError("format", "cannot infer the closure from empty labels")
    return F.closure_of(fs)


def state_from_document(doc, sigma=None):
    """Parse a state document (dict or JSON text)."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    try:
        names = [str(p) for p in doc["points"]]
        order = [tuple(map(str, e)) for e in doc.get("order", [])]
        root = str(doc["root"])
        labels = doc["labels"]
    except (KeyError, TypeError) as exc:
        raise StateError("format", f"missing or malformed field: {exc}") from None
    if sigma is None:
        sigma = _sigma_from(doc, labels.values())
    missing = [p for p in names if p not in labels]
    if missing:
        raise StateError("format", f"no label for {missing[0]!r}")
    return make_state(sigma, names, order, root, {p: labels[p] for p in names})


def state_from_key(sigma, key):
    """Materialise a canonical key as a tree-shaped state (points named
    ``s0, s1, ...`` in preorder, ``s0`` the root)."""
    labels, parent = [], []

    def go(k, par):
        i = len(labels)
        labels.append(k[0])
        parent.append(par)
        for c in k[1]:
            go(c, i)

    go(key, None)
    n = len(labels)
    below = [0] * n
    for i in range(n - 1, -1, -1):
        p = parent[i]
        if p is not None:
            below[p] |= below[i] | 1 << i
    return State(sigma, [f"s{i}" for i in range(n)], below, 0, labels, check=False)


def single_point(sigma, t):
    return State(sigma, ["s0"], [0], 0, [_mask(t)])


def _same_sigma(v, w):
    if v.sigma is not w.sigma:
        raise StateError("sigma", "states over different closures")


# ---------------------------------------------------------------- measures

def norm(w):
    if w._norm is None:
        hgt = max(w.heights)
        wdt = max(bin(c).count("1") for c in w.covers)
        w._norm = Norm(hgt, wdt, max(hgt, wdt))
    return w._norm


def substates(w):
    """One substate per non-root point, in point order."""
    return [w.sub(i) for i in range(len(w)) if i != w.root]


def dia_formulas(w):
    """Distinct ``<>``-formulas occurring positively in some label of ``w``."""
    tb = tables(w.sigma)
    return [w.sigma.reps[i] for i, _ in tb.dias if any(m >> i & 1 for m in w.labels)]


def in_universal(w, K):
    return norm(w).norm <= (K + 1) * w.sigma.size


# ---------------------------------------------------------------- simulation

_sim_memo = {}


def simulation_relation(v, w):
    """Greatest label-preserving, strictly forward-confluent relation from
    ``v`` into ``w`` as a list of masks over the points of ``w``."""
    _same_sigma(v, w)
    rel = [0] * len(v)
    wl = w.labels
    for a in v.height_order:
        la = v.labels[a]
        kids = list(_bits(v.covers[a]))
        m = 0
        for b in range(len(w)):
            if wl[b] == la and all(rel[c] & w.below[b] for c in kids):
                m |= 1 << b
        rel[a] = m
    return rel


def simulates(v, w):
    """Decide ``v ⊴ w``."""
    key = (v.kid, w.kid)
    hit = _sim_memo.get(key)
    if hit is None:
        hit = bool(simulation_relation(v, w)[v.root] >> w.root & 1)
        _sim_memo[key] = hit
    return hit


_step_memo = {}


def step_relation(w, v):
    """Greatest sensible, downward-confluent relation from ``w`` to ``v``
    as masks over the points of ``v``.

    Continuity is read on the downset topology: whenever ``a R b`` and
    ``a' ≼ a`` there must be ``b' ≼ b`` with ``a' R b'``.
    """
    _same_sigma(w, v)
    tb = tables(w.sigma)
    rel = [0] * len(w)
    vl = v.labels
    down = [v.below[b] | 1 << b for b in range(len(v))]
    for a in w.height_order:
        la = w.labels[a]
        kids = list(_bits(w.covers[a]))
        m = 0
        for b in range(len(v)):
            if tb.sensible(la, vl[b]) and all(rel[c] & down[b] for c in kids):
                m |= 1 << b
        rel[a] = m
    return rel


def step_exists(w, v):
    """Decide ``w ↦ v``."""
    key = (w.kid, v.kid)
    hit = _step_memo.get(key)
    if hit is None:
        hit = bool(step_relation(w, v)[w.root] >> v.root & 1)
        _step_memo[key] = hit
    return hit


def growth_bound(w):
    return norm(w).norm + len(dia_formulas(w))


def bounded_future(w, v):
    """Decide ``w ⇝ v``."""
    return step_exists(w, v) and norm(v).norm <= growth_bound(w)


def state_of_point(m, x, sigma):
    """The state on ``↓x`` in model ``m`` labelled by truth over ``sigma``."""
    xi = m.index[x] if not isinstance(x, int) else x
    keep = [i for i in range(len(m)) if m.leq(i, xi)]
    pos = {j: k for k, j in enumerate(keep)}
    truth = [m.truth_mask(r) for r in sigma.reps]
    labels = []
    for j in keep:
        lab = 0
        for b, t in enumerate(truth):
            if t >> j & 1:
                lab |= 1 << b
        labels.append(lab)
    below = []
    for j in keep:
        mm = 0
        for y in _bits(m.below[j]):
            mm |= 1 << pos[y]
        below.append(mm)
    return State(sigma, [m.points[j] for j in keep], below, pos[xi], labels)


def unfold(w):
    """Path unravelling of ``w`` from its root: a tree-shaped state whose
    points are the cover chains, named by joining point names with ``/``."""
    names, labels, parent = [], [], []

    def go(i, prefix, par):
        me = len(names)
        name = w.names[i] if prefix is None else prefix + "/" + w.names[i]
        names.append(name)
        labels.append(w.labels[i])
        parent.append(par)
        for j in _bits(w.covers[i]):
            go(j, name, me)

    go(w.root, None, None)
    n = len(names)
    below = [0] * n
    for i in range(n - 1, -1, -1):
        p = parent[i]
        if p is not None:
            below[p] |= below[i] | 1 << i
    return State(w.sigma, names, below, 0, labels, check=False)


def _prune_key(sigma, key):
    """Bottom-up removal of children simulated by a sibling or by a point
    below a sibling."""
    label, kids = key
    kids = sorted(set(_prune_key(sigma, c) for c in kids), key=lambda k: (_key_norm(sigma, k), k))
    states = [state_from_key(sigma, k) for k in kids]
    alive = list(range(len(kids)))
    for i in range(len(kids)):
        for j in alive:
            if j == i:
                continue
            target = states[j]
            if any(simulates(states[i], target.sub(p)) for p in range(len(target))):
                alive.remove(i)
                break
    return (label, tuple(sorted(kids[i] for i in alive)))


def _key_norm(sigma, key):
    return norm(state_from_key(sigma, key)).norm


def shrink(w):
    """A tree-shaped state ``v`` with ``v ⊴ w`` (and ``w ⊴ v``), no larger
    norm, in which no child subtree is simulated inside a sibling."""
    return state_from_key(w.sigma, _prune_key(w.sigma, w.key))


def minimal_states(states):
    """Drop states strictly above another in ``⊴`` (one representative per
    equivalence class is kept: the first in :func:`sort_key` order)."""
    states = sorted(set(states), key=sort_key)
    out = []
    for i, x in enumerate(states):
        dominated = False
        for j, y in enumerate(states):
            if i != j and simulates(y, x) and (j < i or not simulates(x, y)):
                dominated = True
                break
        if not dominated:
            out.append(x)
    return out


# ---------------------------------------------------------------- successor generation

class CandidateList(list):
    """List of states with a ``truncated`` flag."""

    truncated = False


class _Generator:
    """Builds candidate trees as canonical keys.

    A node has a type and a set of points of the source tree mapped onto
    it.  Each pending cover of a mapped point is either absorbed into the
    node (when the pair is sensible) or gets a child of its own.  Every
    ``<>psi`` of the node that no child witnesses gets a child containing
    ``psi`` and ``~<>psi``.  Constraints from ``~<>`` members flow down.
    """

    def __init__(self, sigma, src=None):
        self.sigma = sigma
        self.tb = tables(sigma)
        self.src = src
        self.memo = {}
        self.copts = {}
        self.wopts = {}
        self.masks_memo = {}

    def fits(self, t, c):
        return t & c[0] == c[0] and not t & c[1]

    def subtree_masks(self, key):
        hit = self.masks_memo.get(key)
        if hit is None:
            hit = {key[0]}
            for c in key[1]:
                hit |= self.subtree_masks(c)
            hit = frozenset(hit)
            self.masks_memo[key] = hit
        return hit

    def minimal(self, keys):
        states = [state_from_key(self.sigma, k) for k in keys]
        return sorted(s.key for s in minimal_states(states))

    def node(self, t, mapped, c):
        memo_key = (t, mapped, c)
        hit = self.memo.get(memo_key)
        if hit is not None:
            return hit
        d = self.tb.down(t)
        cc = (c[0] | d[0], c[1] | d[1])
        combos = []
        if mapped:
            src = self.src

            def rec(pending, slots):
                if not pending:
                    combos.append(slots)
                    return
                a, rest = pending[0], pending[1:]
                if self.tb.sensible(src.labels[a], t):
                    rec(rest + tuple(_bits(src.covers[a])), slots)
                opts = self.child_options(a, cc)
                if opts:
                    rec(rest, slots + [opts])

            start = tuple(j for a in mapped for j in _bits(src.covers[a]))
            rec(start, [])
        else:
            combos.append([])
        out = set()
        for slots in combos:
            for kids in itertools.product(*slots):
                out.update(self.witnesses(t, cc, tuple(sorted(set(kids)))))
        result = sorted(out)
        self.memo[memo_key] = result
        return result

    def child_options(self, a, cc):
        hit = self.copts.get((a, cc))
        if hit is None:
            keys = set()
            for t in self.tb.successors(self.src.labels[a]):
                if self.fits(t, cc):
                    keys.update(self.node(t, (a,), cc))
            hit = self.minimal(keys)
            self.copts[(a, cc)] = hit
        return hit

    def witness_options(self, i, cc):
        hit = self.wopts.get((i, cc))
        if hit is None:
            j, want = dict(self.tb.dias)[i]
            need1 = cc[0] | (1 << j if want else 0)
            need0 = cc[1] | 1 << i | (0 if want else 1 << j)
            keys = set()
            if not need1 & need0:
                for t in self.tb.types():
                    if self.fits(t, (need1, need0)):
                        keys.update(self.node(t, (), cc))
            hit = self.minimal(keys)
            self.wopts[(i, cc)] = hit
        return hit

    def witnesses(self, t, cc, kids):
        todo = [(i, lit) for i, lit in self.tb.dias if t >> i & 1]
        out = []

        def rec(k, kids):
            if k == len(todo):
                out.append((t, tuple(sorted(set(kids)))))
                return
            i, (j, want) = todo[k]
            if any(any((m >> j & 1) == want for m in self.subtree_masks(x)) for x in kids):
                rec(k + 1, kids)
                return
            for opt in self.witness_options(i, cc):
                rec(k + 1, kids + (opt,))

        rec(0, kids)
        return out


_succ_memo = {}


def successor_candidates(w, bounds=None):
    """States ``v`` with ``w ⇝ v``, shrunk and reduced to ``⊴``-minimal
    representatives, in canonical order.

    ``bounds`` may carry ``max_norm``; candidates above it are dropped and
    the returned list's ``truncated`` flag is set.
    """
    max_norm = getattr(bounds, "max_norm", None)
    memo_key = (w.kid, max_norm)
    hit = _succ_memo.get(memo_key)
    if hit is not None:
        return hit
    src = unfold(w)
    gen = _Generator(w.sigma, src)
    raw = set()
    for t in gen.tb.successors(src.labels[src.root]):
        raw.update(gen.node(t, (src.root,), (0, 0)))
    out = CandidateList()
    found = set()
    for key in sorted(raw):
        v = state_from_key(w.sigma, key)
        s = shrink(v)
        if step_exists(w, s):
            v = s
        if not bounded_future(w, v):
            continue
        if max_norm is not None and norm(v).norm > max_norm:
            out.truncated = True
            continue
        found.add(v)
    out.extend(minimal_states(found))
    _succ_memo[memo_key] = out
    return out


def seed_states(f, sigma=None, bounds=None):
    """States whose root label contains ``f``, built by the same witness
    discipline; ``⊴``-minimal, canonical order, with a ``truncated`` flag."""
    f = F.parse(f)
    sigma = sigma or F.closure_pm(f)
    max_norm = getattr(bounds, "max_norm", None)
    tb = tables(sigma)
    gen = _Generator(sigma)
    i, pos = sigma.literal(f)
    out = CandidateList()
    found = set()
    for t in tb.types():
        if (t >> i & 1) != int(pos):
            continue
        for key in gen.node(t, (), (0, 0)):
            v = shrink(state_from_key(sigma, key))
            if max_norm is not None and norm(v).norm > max_norm:
                out.truncated = True
                continue
            found.add(v)
    out.extend(minimal_states(found))
    return out
