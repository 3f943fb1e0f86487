"""Exception types shared across the package."""


class TensorNetError(Exception):
    """Base class for all package-specific errors."""


class FieldMismatchError(TensorNetError):
    """Arithmetic attempted between scalars of different fields."""


class NoRootError(TensorNetError):
    """The requested root of unity does not exist in the field."""


class BadPositionError(TensorNetError):
    """Position does not cover exactly the tensor's mode set."""


class OrderMismatchError(TensorNetError):
    """Kronecker product of tensors with different orders."""


class ModeCollisionError(TensorNetError):
    """Outer product of tensors with overlapping mode ids."""


class BadBipartitionError(TensorNetError):
    """Flattening row set is empty or not a proper subset of the modes."""


class FloatRankRefusedError(TensorNetError):
    """Rank over floating point is ambiguous and refused."""


class EmptySubsetError(TensorNetError):
    """Operation requires a nonempty vertex subset."""


class ValidationError(TensorNetError):
    """Network violates a structural invariant."""


class DegenerateNetworkError(ValidationError):
    """An edge of the network is incident to no vertex."""


class UnboundSocketError(TensorNetError):
    """Evaluation attempted while a socket placeholder is still unset."""


class SocketMismatchError(TensorNetError):
    """Core boundary does not match the map's sockets."""


class ValueMismatchError(TensorNetError):
    """Core value does not reproduce the map's base tensor."""


class ArityMismatchError(TensorNetError):
    """Number of bound inputs differs from the number of sockets."""


class ShapeMismatchError(TensorNetError):
    """Bound input does not match its socket's modes."""


class InvalidStepError(TensorNetError):
    """A plan step is not a legal contraction at its point in time."""

    def __init__(self, index, message):
        super().__init__(f"step {index}: {message}")
        self.index = index


class InvalidPlanError(TensorNetError):
    """Plan is structurally invalid for the network."""


class NotSocketedError(TensorNetError):
    """Operation requires a socketed network."""


class NotARealizationError(TensorNetError):
    """Network is not a realization of a multilinear map."""


class BadDecompositionError(TensorNetError):
    """Factor matrices do not reproduce the map's tensor."""


class InvalidDecompositionError(TensorNetError):
    """Branch decomposition does not match the pattern graph."""


class TooLargeError(TensorNetError):
    """Computation exceeds the desk-scale bound."""


class TooManyLeavesError(TensorNetError):
    """Socket-tree enumeration beyond the exhaustive bound."""


class CharacteristicTwoError(TensorNetError):
    """Convolution requires 2 to be a unit in the field."""
