# Custom exceptions for sgfrwt
"""
Centralized exception handling for sgfrwt.

This module defines custom exceptions to provide consistent error handling
across the library and the CLI. All exceptions inherit from SgfrwtError and
carry the process exit code the CLI should use when they escape a command.

Exit codes:
    0  success
    1  usage, validation or numerical error
    2  graph-quality warning (disconnected graph)
    3  non-convergence of the iterative reconstruction
"""


class SgfrwtError(Exception):
    """Base exception for all sgfrwt errors."""

    def __init__(self, message, exit_code=1):
        self.message = message
        self.exit_code = exit_code
        super().__init__(self.message)


# ---------------------------------------------------------------------------
# Configuration and usage
# ---------------------------------------------------------------------------


class ConfigurationError(SgfrwtError):
    """Raised when configuration is invalid or cannot be loaded."""


class ValidationError(SgfrwtError):
    """Raised when a run configuration fails its per-command schema."""


class InvalidParameterError(SgfrwtError):
    """Raised when a numeric design parameter is outside its domain."""

    def __init__(self, name, value, requirement):
        message = f"Invalid parameter {name}={value!r}: {requirement}"
        self.name = name
        self.value = value
        super().__init__(message)


# ---------------------------------------------------------------------------
# Graph construction
# ---------------------------------------------------------------------------


class GraphError(SgfrwtError):
    """Raised when a graph cannot be built from the given input."""


class IndexOutOfRangeError(GraphError):
    """Raised when a vertex (or band) index is outside its range."""

    def __init__(self, index, size, what="vertex"):
        message = f"{what.capitalize()} index {index} out of range [0, {size})"
        self.index = index
        self.size = size
        super().__init__(message)


class SelfLoopError(GraphError):
    """Raised when an edge connects a vertex to itself."""

    def __init__(self, vertex):
        super().__init__(f"Self-loop on vertex {vertex} is not allowed")
        self.vertex = vertex


class NonPositiveWeightError(GraphError):
    """Raised when an edge weight is zero, negative or not finite."""

    def __init__(self, i, j, weight):
        super().__init__(f"Edge ({i}, {j}) has non-positive weight {weight}")


class ConflictingDuplicateEdgeError(GraphError):
    """Raised when the same vertex pair is listed twice with different weights."""

    def __init__(self, i, j, first, second):
        super().__init__(f"Edge ({i}, {j}) listed with conflicting weights {first} and {second}")


class DegenerateInputError(GraphError):
    """Raised when the input is too small to define a graph."""


class EmptyGraphError(GraphError):
    """Raised when construction rules retain no edge at all."""


class GraphTooLargeError(GraphError):
    """Raised when a graph exceeds the dense-operator vertex limit."""

    def __init__(self, n_vertices, limit):
        message = (
            f"Graph has {n_vertices} vertices, above the dense operator limit of {limit} "
            f"(raise spectral.max_vertices to override)"
        )
        super().__init__(message)


class DisconnectedGraphError(SgfrwtError):
    """Raised when a transform pipeline receives a disconnected graph."""

    def __init__(self, n_components):
        super().__init__(f"Graph is disconnected ({n_components} components)", exit_code=2)
        self.n_components = n_components


# ---------------------------------------------------------------------------
# Numerics
# ---------------------------------------------------------------------------


class NumericalError(SgfrwtError):
    """Raised when a numerical routine cannot produce a valid result."""


class NumericalFailureError(NumericalError):
    """Raised when a factorization (eigensolver, Schur) fails to converge."""


class InvalidOrderError(NumericalError):
    """Raised when the fractional order is outside [0, 1]."""

    def __init__(self, theta):
        super().__init__(f"Fractional order theta={theta} must lie in [0, 1]")
        self.theta = theta


class DimensionMismatchError(NumericalError):
    """Raised when array shapes disagree."""

    def __init__(self, what, expected, actual):
        super().__init__(f"{what}: expected shape {expected}, got {actual}")


class SingularSystemError(NumericalError):
    """Raised when the spline interpolation system is singular."""


class NegativeArgumentError(NumericalError):
    """Raised when a kernel is evaluated at a negative argument."""

    def __init__(self, value):
        super().__init__(f"Kernel argument must be nonnegative, got {value}")


class NonConvergentError(NumericalError):
    """Raised when an integral diverges for the requested kernel."""


class FrameFailureError(NumericalError):
    """Raised when the frame lower bound is not positive."""

    def __init__(self, lower_bound):
        super().__init__(f"Frame lower bound A={lower_bound:.3e} is not positive; transform is not invertible")
        self.lower_bound = lower_bound


class NotConvergedError(SgfrwtError):
    """Raised when conjugate gradients stops above tolerance.

    The partial result is attached so callers can still write it out.
    """

    def __init__(self, result, tol):
        message = (
            f"Reconstruction did not converge: residual {result.residual:.3e} > tol {tol:.1e} "
            f"after {result.iterations} iterations"
        )
        super().__init__(message, exit_code=3)
        self.result = result


# ---------------------------------------------------------------------------
# Files and formats
# ---------------------------------------------------------------------------


class DataFormatError(SgfrwtError):
    """Raised when a data file cannot be parsed."""


class BadMagicError(DataFormatError):
    """Raised when a binary file starts with an unexpected magic number."""

    def __init__(self, path, magic):
        super().__init__(f"{path}: unexpected magic number {magic!r}")


class TruncatedFileError(DataFormatError):
    """Raised when a file ends before its declared payload."""

    def __init__(self, path, expected, actual):
        super().__init__(f"{path}: truncated, expected {expected} payload bytes, found {actual}")


class UnsupportedFormatError(DataFormatError):
    """Raised for valid but unsupported format variants."""


class ExportError(DataFormatError):
    """Raised when an output file cannot be written."""
