"""Exception types shared across the revseq package."""


class RevseqError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(RevseqError):
    """Syntax error in an expression, gate file, or circuit file.

    Carries a 1-based source position so tools can point at the offending
    character.
    """

    def __init__(self, message: str, line: int = 1, col: int = 1, expected: tuple[str, ...] = ()):
        self.line = line
        self.col = col
        self.expected = expected
        detail = f"{line}:{col}: {message}"
        if expected:
            detail += " (expected " + " or ".join(expected) + ")"
        super().__init__(detail)


class EvalError(RevseqError):
    """Expression evaluation failed, e.g. an unbound variable."""


class NonBijectiveError(RevseqError):
    """A gate definition does not describe a bijection.

    ``witness`` holds two distinct input words that map to the same output.
    """

    def __init__(self, message: str, witness: tuple[int, int]):
        self.witness = witness
        super().__init__(f"{message}: inputs {witness[0]} and {witness[1]} collide")


class ValidationError(RevseqError):
    """A circuit with validation errors was handed to an operation that
    requires a clean one."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0] if self.diagnostics else None
        super().__init__(f"circuit does not validate: {first}" if first else "circuit does not validate")


class OscillationError(RevseqError):
    """A settle step failed to reach a fixpoint."""

    def __init__(self, step: int, period: int):
        self.step = step
        self.period = period
        super().__init__(f"oscillation (period {period}) while settling step {step}")


class CapExceededError(RevseqError):
    """An exhaustive enumeration would exceed the supported size cap."""
