from __future__ import annotations


class AlmostProductError(Exception):
    pass


class TensorError(AlmostProductError, ValueError):
    pass


class SlotOutOfRange(TensorError):
    pass


class DegreeMismatch(TensorError):
    pass


class ManifoldValidationError(AlmostProductError, ValueError):
    """Base for every violated invariant of a manifold model.

    `invariant` is the invariant name used in diagnostics and `entries` holds the offending components.
    """

    invariant = 'ManifoldValidation'

    def __init__(self, message: str, entries: object = None):
        super().__init__(f'{self.invariant}: {message}')
        self.entries = entries


class DimensionMismatch(ManifoldValidationError, TensorError):
    invariant = 'DimensionMismatch'


class NonFiniteComponents(ManifoldValidationError):
    invariant = 'NonFiniteComponents'


class NotSymmetric(ManifoldValidationError):
    invariant = 'NotSymmetric'


class NotPositiveDefinite(ManifoldValidationError):
    invariant = 'NotPositiveDefinite'


class PSquareNotIdentity(ManifoldValidationError):
    invariant = 'PSquareNotIdentity'


class PNotCompatible(ManifoldValidationError):
    invariant = 'PNotCompatible'


class OddDimension(ManifoldValidationError):
    invariant = 'OddDimension'


class TraceNonZero(ManifoldValidationError):
    invariant = 'TraceNonZero'


class BracketNotAntisymmetric(ManifoldValidationError):
    invariant = 'BracketNotAntisymmetric'


class JacobiViolated(ManifoldValidationError):
    invariant = 'JacobiViolated'


class AssociatedMetricSingular(ManifoldValidationError):
    invariant = 'AssociatedMetricSingular'


class NotTorsionLike(AlmostProductError, ValueError):
    pass


class NotW3(AlmostProductError, ValueError):
    def __init__(self, cyclic_norm: float, threshold: float):
        super().__init__(
            f'Cyclic sum of F is {cyclic_norm:.3e}, above the W3 threshold {threshold:.3e}')
        self.cyclic_norm = cyclic_norm
        self.threshold = threshold


class SpecParseError(AlmostProductError):
    pass


class ConfigError(AlmostProductError, ValueError):
    pass


class NoSolutionFound(AlmostProductError):
    def __init__(self, message: str, null_space_dim: int):
        super().__init__(message)
        self.null_space_dim = null_space_dim
