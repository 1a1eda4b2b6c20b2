"""Efficient paths and bounded satisfiability search.

``sat_search`` explores states reachable from seed states whose root label
contains the input formula.  A candidate successor is replaced by an
already explored state whenever that state is at most as large in the
simulation order and is still a legal successor.  After every layer the
explored set is pruned to its largest subset that is open (closed under
substates), serial and realises every ``F``-obligation; if a seed
survives, the surviving fragment reachable from it is shrunk greedily and
returned as a certificate quasimodel whose points are states.
"""
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import formula as F
from .quasimodel import Quasimodel, check_quasimodel
from .states import (seed_states, simulates, sort_key, step_exists, substates,
                     successor_candidates, tables)

SAT = "SAT"
NO_WITHIN_BOUNDS = "NO_WITHIN_BOUNDS"


@dataclass(frozen=True)
class SearchBounds:
    max_norm: int = 4
    max_states: int = 256
    max_path_len: int = 16
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        for name in ("max_norm", "max_states", "max_path_len", "threads"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass
class SearchOutcome:
    verdict: str
    certificate: Quasimodel = None
    witness: str = None
    exhausted: bool = False
    states: list = field(default_factory=list)
    explored: int = 0
    seed: int = 0

    @property
    def sat(self):
        return self.verdict == SAT

    def __bool__(self):
        return self.sat

    def to_document(self):
        doc = {"verdict": self.verdict, "explored": self.explored, "seed": self.seed}
        if self.sat:
            doc["witness"] = self.witness
            doc["certificate"] = self.certificate.to_document()
        else:
            doc["exhausted"] = self.exhausted
        return doc


@dataclass
class PathEnumeration:
    paths: list
    truncated: bool

    def __len__(self):
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)


def _successor_source(succ, bounds):
    if succ is None:
        return lambda x: successor_candidates(x, bounds)
    if callable(succ):
        return succ
    return lambda x: succ.get(x, [])


def efficient_paths(start, bounds=None, succ=None, limit=100000):
    """All paths ``start = w_0, w_1, ...`` along the successor source in
    which no earlier state simulates a later one, depth first, successors
    in the order the source yields them.  ``truncated`` is set when the
    path length bound or ``limit`` cut the enumeration short."""
    bounds = bounds or SearchBounds()
    nexts = _successor_source(succ, bounds)
    paths = []
    state = {"truncated": False}

    def dfs(path):
        paths.append(tuple(path))
        if len(paths) >= limit:
            state["truncated"] = True
            return
        options = [u for u in nexts(path[-1]) if not any(simulates(p, u) for p in path)]
        if getattr(nexts(path[-1]), "truncated", False):
            state["truncated"] = True
        if not options:
            return
        if len(path) >= bounds.max_path_len:
            state["truncated"] = True
            return
        for u in options:
            if len(paths) >= limit:
                return
            dfs(path + [u])

    dfs([start])
    return PathEnumeration(paths, state["truncated"])


def rho(w, bounds=None, succ=None):
    """States efficiently reachable from ``w`` (always including ``w``)."""
    out = {}
    for p in efficient_paths(w, bounds, succ).paths:
        out.setdefault(p[-1], p[-1])
    return sorted(out.values(), key=sort_key)


# ---------------------------------------------------------------- satisfiability

class _Space:
    """The explored set with its transition and substate structure."""

    def __init__(self, bounds):
        self.bounds = bounds
        self.states = []
        self.known = {}
        self.subs = {}
        self.truncated = False

    def __contains__(self, s):
        return s in self.known

    def add(self, s, fresh):
        """Add ``s`` and its substates; newly added ones go to ``fresh``."""
        if s in self.known:
            return True
        if len(self.states) >= self.bounds.max_states:
            self.truncated = True
            return False
        self.known[s] = len(self.states)
        self.states.append(s)
        fresh.append(s)
        subs = []
        for t in substates(s):
            if not self.add(t, fresh):
                return False
            subs.append(t)
        self.subs[s] = list(dict.fromkeys(subs))
        return True

    def edges(self, alive):
        return {x: [y for y in alive if step_exists(x, y)] for x in alive}

    def survivors(self, alive):
        """Largest subset of ``alive`` that is open, serial and realises
        every obligation along its own transitions."""
        alive = [s for s in self.states if s in alive]
        tb = tables(alive[0].sigma) if alive else None
        edges = self.edges(alive)
        live = set(alive)
        changed = True
        while changed:
            changed = False
            for x in list(live):
                ok = any(y in live for y in edges[x])
                ok = ok and all(t in live for t in self.subs.get(x, ()))
                if ok:
                    lab = x.labels[x.root]
                    for i, c in tb.evts:
                        if lab >> i & 1 and not self._realised(x, c, edges, live, tb):
                            ok = False
                            break
                if not ok:
                    live.discard(x)
                    changed = True
        return live, edges

    @staticmethod
    def _realised(x, lit, edges, live, tb):
        seen = {x}
        todo = deque([x])
        while todo:
            y = todo.popleft()
            if tb.holds(y.labels[y.root], lit):
                return True
            for z in edges[y]:
                if z in live and z not in seen:
                    seen.add(z)
                    todo.append(z)
        return False

    def closure(self, start, live, edges):
        """States reachable from ``start`` by transitions and substates."""
        seen = {start}
        todo = [start]
        while todo:
            x = todo.pop()
            for y in list(edges[x]) + self.subs.get(x, []):
                if y in live and y not in seen:
                    seen.add(y)
                    todo.append(y)
        return seen


def _certificate(space, seed, members):
    states = sorted(members, key=lambda s: (s is not seed, sort_key(s)))
    names = [f"w{i}" for i in range(len(states))]
    pos = {s: i for i, s in enumerate(states)}
    below = []
    for s in states:
        m = 0
        for t in space.subs.get(s, ()):
            m |= 1 << pos[t]
        below.append(m)
    succ = []
    for s in states:
        m = 0
        for t in states:
            if step_exists(s, t):
                m |= 1 << pos[t]
        succ.append(m)
    q = Quasimodel(states[0].sigma, names, below, [s.labels[s.root] for s in states], succ)
    check_quasimodel(q)
    return q, names[0], states


def _try_certificate(space, seeds):
    live, edges = space.survivors(set(space.states))
    for seed in seeds:
        if seed in live:
            members = space.closure(seed, live, edges)
            for x in sorted(members, key=sort_key, reverse=True):
                if x is seed or x not in members:
                    continue
                trial = members - {x}
                live2, edges2 = space.survivors(trial)
                if seed in live2:
                    members = space.closure(seed, live2, edges2)
            return _certificate(space, seed, members)
    return None


def sat_search(f, bounds=None):
    """Bounded search for a certificate quasimodel satisfying ``f``.

    Returns a :class:`SearchOutcome`: ``SAT`` with a validated certificate
    and the witness point, or ``NO_WITHIN_BOUNDS`` with ``exhausted`` true
    when no bound was hit during exploration.
    """
    f = F.parse(f)
    bounds = bounds or SearchBounds()
    sigma = F.closure_pm(f)
    seeds = seed_states(f, sigma, bounds)
    space = _Space(bounds)
    space.truncated = seeds.truncated
    frontier = []
    for s in seeds:
        space.add(s, frontier)
    seeds = [s for s in seeds if s in space]
    pool = ThreadPoolExecutor(bounds.threads) if bounds.threads > 1 else None
    try:
        layer = 0
        while frontier:
            found = _try_certificate(space, seeds)
            if found is not None:
                q, witness, states = found
                return SearchOutcome(SAT, q, witness, False, states, len(space.states), bounds.seed)
            if layer >= bounds.max_path_len:
                space.truncated = True
                break
            layer += 1
            expand = (lambda x: successor_candidates(x, bounds))
            results = list(pool.map(expand, frontier)) if pool else [expand(x) for x in frontier]
            fresh = []
            for x, cands in zip(frontier, results):
                if cands.truncated:
                    space.truncated = True
                for c in cands:
                    if c in space:
                        continue
                    if any(simulates(y, c) and step_exists(x, y) for y in space.states):
                        continue
                    space.add(c, fresh)
            frontier = fresh
        found = _try_certificate(space, seeds)
    finally:
        if pool:
            pool.shutdown()
    if found is not None:
        q, witness, states = found
        return SearchOutcome(SAT, q, witness, False, states, len(space.states), bounds.seed)
    return SearchOutcome(NO_WITHIN_BOUNDS, exhausted=not space.truncated,
                         explored=len(space.states), seed=bounds.seed)
