"""Exception hierarchy shared by every module."""


class DGLError(Exception):
    """Base class for all errors raised by the package."""


class FormulaSyntaxError(DGLError, ValueError):
    """Raised by the parser; ``pos`` is the 0-based offset of the offending token."""

    def __init__(self, message, text=None, pos=None):
        self.text = text
        self.pos = pos
        if pos is not None:
            message = f"{message} at position {pos}"
        super().__init__(message)


class ModelError(DGLError, ValueError):
    """A model document violates a poset-model invariant."""

    def __init__(self, kind, message):
        self.kind = kind
        super().__init__(f"{kind}: {message}")


class StateError(DGLError, ValueError):
    """A state (or its document) violates a state invariant."""

    def __init__(self, kind, message):
        self.kind = kind
        super().__init__(f"{kind}: {message}")


class QuasimodelError(DGLError, ValueError):
    """A quasimodel document fails one of the quasimodel conditions.

    ``kind`` is one of ``"format"``, ``"type"``, ``"order"``, ``"coherence"``,
    ``"sensibility"``, ``"continuity"``, ``"seriality"``, ``"omega"``.
    """

    def __init__(self, kind, message, witnesses=()):
        self.kind = kind
        self.witnesses = tuple(witnesses)
        super().__init__(f"{kind}: {message}")


class LimitError(DGLError):
    """A configured enumeration limit would be exceeded."""
