"""Exception types shared across the package."""


class NilframeError(Exception):
    """Base class for all package errors."""


class SchemaError(NilframeError):
    """A config document or algebra description violates the schema.

    ``field`` holds a dotted path to the offending entry.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class RankDeficiencyError(NilframeError):
    """The coadjoint pairing matrix has generic rank below 2d."""


class DegenerateFiberError(NilframeError):
    """A fiber with |det of the modulation matrix| below the working epsilon
    was used where a nondegenerate fiber is required."""


class DensityViolationError(NilframeError):
    """A fiber Gabor lattice with volume above one cannot carry a Parseval window."""


class PieceOverflowError(NilframeError):
    """Cut-and-stack synthesis exceeded the configured piece budget."""


class MisalignedGridError(NilframeError):
    """Sample-grid steps do not divide the requested lattice translations."""


class CertificationError(NilframeError):
    """A branch-and-bound or quadrature run exhausted its budget before
    reaching the requested tolerance."""
