"""Formulas of the trimodal language: interned AST, parser, printer, closures.

Only six node kinds exist: atoms, negation, conjunction, the derivative
diamond ``<>``, next ``O`` and eventually ``F``.  Everything else
(``[]``, ``G``, ``|``, ``->``, ``<->``) is expanded by the parser.

Nodes are hash-consed: building the same formula twice returns the same
object, so ``is`` and ``==`` coincide and formulas can be used as cheap
dictionary keys.
"""
import re
import threading

from .errors import FormulaSyntaxError

ATOM, NOT, AND, DIA, NEXT, EVT = "atom", "not", "and", "dia", "next", "evt"
UNARY = (NOT, DIA, NEXT, EVT)

_table = {}
_lock = threading.Lock()


class Formula:
    """An interned formula node.  Do not instantiate directly; use the
    constructor functions (:func:`Atom`, :func:`Neg`, ...) or :func:`parse`."""

    __slots__ = ("kind", "name", "args", "_text", "_hash", "__weakref__")

    def __init__(self, kind, name, args):
        self.kind = kind
        self.name = name
        self.args = args
        self._text = None
        self._hash = hash((kind, name, tuple(id(a) for a in args)))

    def __hash__(self):
        return self._hash

    # identity equality is the default; interning makes it structural

    def __repr__(self):
        return f"Formula({to_string(self)!r})"

    def __str__(self):
        return to_string(self)

    def __invert__(self):
        return Neg(self)

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __rshift__(self, other):
        return Implies(self, other)

    @property
    def child(self):
        return self.args[0]

    @property
    def left(self):
        return self.args[0]

    @property
    def right(self):
        return self.args[1]

    @property
    def sort_key(self):
        """Canonical order key: the primitive (sugar-free) printed form."""
        if self._text is None:
            self._text = to_string(self, sugar=False)
        return self._text


def _intern(kind, name, args):
    key = (kind, name) + args
    node = _table.get(key)
    if node is not None:
        return node
    with _lock:
        node = _table.get(key)
        if node is None:
            node = Formula(kind, name, args)
            _table[key] = node
    return node


def interned_count():
    """Number of distinct formula nodes created so far in this process."""
    return len(_table)


_ATOM_RE = re.compile(r"[a-z][a-zA-Z0-9_]*\Z")


def Atom(name):
    if not _ATOM_RE.match(name):
        raise FormulaSyntaxError(f"invalid atom name {name!r}")
    return _intern(ATOM, name, ())


def Neg(f):
    return _intern(NOT, None, (f,))


def And(a, b):
    return _intern(AND, None, (a, b))


def Dia(f):
    return _intern(DIA, None, (f,))


def Next(f):
    return _intern(NEXT, None, (f,))


def Evt(f):
    return _intern(EVT, None, (f,))


# derived connectives

def Box(f):
    return Neg(Dia(Neg(f)))


def Hence(f):
    return Neg(Evt(Neg(f)))


def Or(a, b):
    return Neg(And(Neg(a), Neg(b)))


def Implies(a, b):
    return Neg(And(a, Neg(b)))


def Iff(a, b):
    return And(Implies(a, b), Implies(b, a))


def conjunction(fs):
    """Left-nested conjunction of a non-empty sequence."""
    fs = list(fs)
    if not fs:
        raise ValueError("empty conjunction")
    out = fs[0]
    for f in fs[1:]:
        out = And(out, f)
    return out


# ---------------------------------------------------------------- shapes

def neg_norm(f):
    """Strip leading double negations: ``~~~~<>p`` becomes ``<>p``."""
    while f.kind == NOT and f.child.kind == NOT:
        f = f.child.child
    return f


def strip(f):
    """Return ``(base, positive)``: ``base`` has no leading negation and
    ``f`` is equivalent to ``base`` when ``positive`` else to ``~base``."""
    positive = True
    while f.kind == NOT:
        f = f.child
        positive = not positive
    return f, positive


def box_body(f):
    """``chi`` if ``neg_norm(f)`` is ``[]chi`` (i.e. ``~<>~chi``), else None."""
    f = neg_norm(f)
    if f.kind == NOT and f.child.kind == DIA and f.child.child.kind == NOT:
        return neg_norm(f.child.child.child)
    return None


def hence_body(f):
    """``chi`` if ``neg_norm(f)`` is ``G chi`` (i.e. ``~F~chi``), else None."""
    f = neg_norm(f)
    if f.kind == NOT and f.child.kind == EVT and f.child.child.kind == NOT:
        return neg_norm(f.child.child.child)
    return None


def atoms(f):
    """Sorted atom names occurring in ``f``."""
    seen = set()
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if id(g) in seen:
            continue
        seen.add(id(g))
        if g.kind == ATOM:
            out.add(g.name)
        stack.extend(g.args)
    return sorted(out)


def subformulas(f):
    """The set S(f) of subformulas of ``f`` (including ``f``)."""
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in out:
            continue
        out.add(g)
        stack.extend(g.args)
    return out


def dag_size(f):
    """Number of distinct nodes reachable from ``f``."""
    return len(subformulas(f))


def tree_size(f):
    """Number of nodes of ``f`` printed as a tree (may be exponential in
    :func:`dag_size`)."""
    memo = {}

    def go(g):
        n = memo.get(g)
        if n is None:
            n = 1 + sum(go(a) for a in g.args)
            memo[g] = n
        return n

    return go(f)


# ---------------------------------------------------------------- closures

class Closure:
    """A finite set of formulas closed under subformulas and single negation
    (double negations collapse).

    ``formulas`` lists the members in canonical order.  ``reps`` lists the
    positive representatives: members with no leading negation.  A type over
    the closure is a sign vector on ``reps``; bit ``i`` stands for
    ``reps[i]``.
    """

    __slots__ = ("formulas", "reps", "index", "_members", "__weakref__")

    def __init__(self, formulas, reps):
        self.formulas = formulas
        self.reps = reps
        self.index = {r: i for i, r in enumerate(reps)}
        self._members = frozenset(formulas)

    def __len__(self):
        return len(self.formulas)

    def __iter__(self):
        return iter(self.formulas)

    def __contains__(self, f):
        return f in self._members

    def __repr__(self):
        return "Closure([" + ", ".join(map(str, self.formulas)) + "])"

    @property
    def size(self):
        """|Sigma| as used in norm bounds: twice the number of representatives."""
        return 2 * len(self.reps)

    def literal(self, f):
        """``(bit_index, positive)`` for any formula whose base is a rep."""
        base, positive = strip(f)
        i = self.index.get(base)
        if i is None:
            raise KeyError(f"{f} is not covered by this closure")
        return i, positive

    def covers(self, f):
        return strip(f)[0] in self.index

    def reps_of_kind(self, kind):
        return [r for r in self.reps if r.kind == kind]


_closures = {}
_closure_lock = threading.Lock()


def closure_of(formulas):
    """Smallest closure containing every formula in ``formulas``."""
    sub = set()
    for f in formulas:
        sub |= subformulas(f)
    members = set(sub)
    for g in sub:
        if g.kind != NOT:
            members.add(Neg(g))
    ordered = tuple(sorted(members, key=lambda g: g.sort_key))
    found = _closures.get(ordered)
    if found is not None:
        return found
    reps = tuple(g for g in ordered if g.kind != NOT)
    with _closure_lock:
        found = _closures.get(ordered)
        if found is None:
            found = Closure(ordered, reps)
            _closures[ordered] = found
    return found


def closure_pm(f):
    """S+-(f): subformulas of ``f`` together with their single negations."""
    return closure_of([f])


# ---------------------------------------------------------------- parsing

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<atom>[a-z][a-zA-Z0-9_]*)
  | (?P<op><->|->|<>|\[\]|[~&|()OFG¬∧∨→↔◊□●◆■])
""", re.VERBOSE)

_UNICODE = {"¬": "~", "∧": "&", "∨": "|", "→": "->", "↔": "<->",
            "◊": "<>", "□": "[]", "●": "O", "◆": "F", "■": "G"}


def _tokenize(text):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unknown token {text[pos]!r}", text, pos)
        if m.lastgroup == "atom":
            out.append(("atom", m.group(), pos))
        elif m.lastgroup == "op":
            tok = m.group()
            out.append(("op", _UNICODE.get(tok, tok), pos))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def accept(self, op):
        kind, val, _ = self.toks[self.i]
        if kind == "op" and val == op:
            self.i += 1
            return True
        return False

    def fail(self, msg):
        _, _, pos = self.peek()
        raise FormulaSyntaxError(msg, self.text, pos)

    def parse(self):
        f = self.iff()
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return f

    def iff(self):
        f = self.imp()
        while self.accept("<->"):
            f = Iff(f, self.imp())
        return f

    def imp(self):
        f = self.disj()
        if self.accept("->"):
            return Implies(f, self.imp())
        return f

    def disj(self):
        f = self.conj()
        while self.accept("|"):
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.accept("&"):
            f = And(f, self.unary())
        return f

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "atom":
            self.i += 1
            return Atom(val)
        if kind == "end":
            self.fail("unexpected end of formula")
        builders = {"~": Neg, "<>": Dia, "[]": Box, "O": Next, "F": Evt, "G": Hence}
        if val in builders:
            self.i += 1
            return builders[val](self.unary())
        if val == "(":
            self.i += 1
            f = self.iff()
            if not self.accept(")"):
                self.fail("expected ')'")
            return f
        self.fail(f"unexpected {val!r}")


def parse(text):
    """Parse ASCII (or Unicode) formula syntax into an interned formula.

    >>> parse("[]p") is Neg(Dia(Neg(Atom("p"))))
    True
    """
    if isinstance(text, Formula):
        return text
    return _Parser(text).parse()


# ---------------------------------------------------------------- printing

_PREC_IFF, _PREC_IMP, _PREC_OR, _PREC_AND, _PREC_UNARY = 1, 2, 3, 4, 5
_PRIM_PREFIX = {NOT: "~", DIA: "<>", NEXT: "O", EVT: "F"}


def _imp_parts(f):
    if f.kind == NOT and f.child.kind == AND and f.child.right.kind == NOT:
        return f.child.left, f.child.right.child
    return None


def _is_boxlike(f):
    # ~<>~x or ~F~x: reads better as the antecedent of an implication
    return f.kind == NOT and f.child.kind in (DIA, EVT) and f.child.child.kind == NOT


def _render(f, sugar):
    """Return ``(text, precedence)``."""
    if f.kind == ATOM:
        return f.name, _PREC_UNARY + 1
    if sugar:
        if f.kind == NOT:
            g = f.child
            if g.kind in (DIA, EVT) and g.child.kind == NOT:
                op = "[]" if g.kind == DIA else "G"
                return op + _wrap(g.child.child, _PREC_UNARY, sugar), _PREC_UNARY
            if (g.kind == AND and g.left.kind == NOT and g.right.kind == NOT
                    and not _is_boxlike(g.left)):
                return (_wrap(g.left.child, _PREC_OR, sugar) + " | "
                        + _wrap(g.right.child, _PREC_AND, sugar)), _PREC_OR
            if g.kind == AND and g.right.kind == NOT:
                return (_wrap(g.left, _PREC_OR, sugar) + " -> "
                        + _wrap(g.right.child, _PREC_IMP, sugar)), _PREC_IMP
        if f.kind == AND:
            a, b = _imp_parts(f.left), _imp_parts(f.right)
            if a and b and a[0] is b[1] and a[1] is b[0]:
                return (_wrap(a[0], _PREC_IFF, sugar) + " <-> "
                        + _wrap(a[1], _PREC_IMP, sugar)), _PREC_IFF
    if f.kind == AND:
        return (_wrap(f.left, _PREC_AND, sugar) + " & "
                + _wrap(f.right, _PREC_UNARY, sugar)), _PREC_AND
    return _PRIM_PREFIX[f.kind] + _wrap(f.child, _PREC_UNARY, sugar), _PREC_UNARY


def _wrap(f, need, sugar):
    text, prec = _render(f, sugar)
    return text if prec >= need else "(" + text + ")"


def to_string(f, sugar=True, max_size=None):
    """Print ``f``; ``parse(to_string(f)) is f`` always holds.

    ``sugar`` re-folds ``[]``, ``G``, ``|``, ``->`` and ``<->`` shapes.
    ``max_size`` guards against printing huge DAG-shared formulas: a
    ``ValueError`` is raised when the tree size exceeds it.
    """
    if max_size is not None and tree_size(f) > max_size:
        raise ValueError(f"formula has more than {max_size} tree nodes")
    if not sugar and f._text is not None:
        return f._text
    return _render(f, sugar)[0]


def show(f):
    """Readable structural dump, e.g. ``Neg(Dia(Atom(p)))``."""
    if f.kind == ATOM:
        return f"Atom({f.name})"
    name = {NOT: "Neg", AND: "And", DIA: "Dia", NEXT: "Next", EVT: "Evt"}[f.kind]
    return name + "(" + ", ".join(show(a) for a in f.args) + ")"
