"""Exception hierarchy shared by all modules."""


class CloningError(Exception):
    """Base class for errors raised by this package."""


class SizeError(CloningError):
    """A requested Hilbert space exceeds the configured dimension cap."""

    def __init__(self, required: int, allowed: int, what: str = "dimension"):
        self.required = required
        self.allowed = allowed
        super().__init__(f"{what} {required} exceeds cap {allowed}")


class PreconditionError(CloningError, ValueError):
    """Input vectors violate an orthonormality or independence requirement."""


class NotIsometryError(CloningError, ValueError):
    """Defining pairs do not preserve inner products.

    ``worst`` holds the largest absolute Gram mismatch and ``entry`` its index.
    """

    def __init__(self, worst: float, entry: tuple[int, int]):
        self.worst = worst
        self.entry = entry
        super().__init__(
            f"defining map is not an isometry: Gram mismatch {worst:.3e} at entry {entry}"
        )


class BlankMismatchError(CloningError):
    """A fixed-blank machine was given a blank other than its designated one.

    Pass ``force_blank=True`` to run anyway; the result then depends on how the
    unitary was completed off its defining domain.
    """


class UnsupportedVariantError(CloningError):
    """The operation is not defined for this machine variant."""


class DegeneratePairError(CloningError, ValueError):
    """The two candidate states of a probabilistic cloner are parallel."""
