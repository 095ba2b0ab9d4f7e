class DomainError(ValueError):
    """Parameters outside the admissible region of the inequality family."""


class NumericsError(RuntimeError):
    """A numerical procedure failed to reach its stated accuracy."""
