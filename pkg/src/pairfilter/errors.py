"""Exception types raised by pairfilter."""


class PairFilterError(ValueError):
    """Base class for all model errors."""


class DomainError(PairFilterError):
    """An input lies outside the physical domain of the model."""


class ResolutionError(PairFilterError):
    """The frequency grid cannot resolve the narrowest spectral feature."""


class CoverageError(PairFilterError):
    """A filter passband does not overlap the frequency grid."""


class DegenerateInputError(PairFilterError):
    """A filtered amplitude or count probability vanishes identically."""


class InvalidGaussianError(PairFilterError):
    """Quadratic-form coefficients do not describe a normalizable Gaussian."""


class ScenarioError(PairFilterError):
    """A scenario file failed validation.

    ``errors`` holds one human-readable line per offending field.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid scenario:\n  " + "\n  ".join(self.errors))
