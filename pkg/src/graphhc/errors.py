"""Exception types raised by the public API.

Every error is a subclass of :class:`GraphHCError`, which itself subclasses
``ValueError`` so callers can catch broadly.
"""


class GraphHCError(ValueError):
    """Base class for all graphhc errors."""


# graph construction and set operations

class NonPositiveWeightError(GraphHCError):
    """Edge weight is zero, negative, or not finite."""


class SelfLoopError(GraphHCError):
    """Edge connects a vertex to itself."""


class DuplicateEdgeError(GraphHCError):
    """The same undirected vertex pair appears more than once."""


class OverlappingSetsError(GraphHCError):
    """Vertex sets that must be disjoint overlap."""


class EmptySetError(GraphHCError):
    """A nonempty vertex set was required."""


class IncompletePartitionError(GraphHCError):
    """Parts do not form a disjoint cover of the vertex set."""


class TrivialCutError(GraphHCError):
    """Cut side is empty or the full vertex set."""


class TooLargeError(GraphHCError):
    """Input exceeds the size cap of an exhaustive routine."""


class DisconnectedError(GraphHCError):
    """A connected graph was required."""


# spectral

class NoConvergenceError(GraphHCError):
    """Eigensolver failed to meet the residual tolerance."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class RankDeficientError(GraphHCError):
    """More eigenpairs requested than the matrix dimension."""


class InsufficientVectorsError(GraphHCError):
    """Spectrum report holds fewer eigenvectors than requested."""


class KTooLargeError(GraphHCError):
    """More clusters requested than points."""


# trees

class LeafMismatchError(GraphHCError):
    """Tree leaves do not correspond to the graph vertices."""


class UnknownVertexError(GraphHCError):
    """Vertex is not a leaf of the tree."""


class EmptyLeafSetError(GraphHCError):
    """A tree needs at least one leaf."""


class EmptyForestError(GraphHCError):
    """A tree merge needs at least one input tree."""


class NotALeafError(GraphHCError):
    """Node index does not refer to a leaf."""


# bucketing

class EmptyClusterError(GraphHCError):
    """Bucketing requires a nonempty cluster."""


class BadBetaError(GraphHCError):
    """Bucketing ratio must be greater than 1."""


# sparsest cut

class TooLargeForExactError(GraphHCError):
    """Contracted graph exceeds the exact enumeration cap."""


class DegenerateError(GraphHCError):
    """No nontrivial cut exists (fewer than two vertices)."""


# generators

class BadProbabilityError(GraphHCError):
    """Probability outside [0, 1]."""


class BadSigmaError(GraphHCError):
    """Kernel bandwidth must be positive."""


# bench harness

class ConfigParseError(GraphHCError):
    """Experiment configuration is malformed."""


class GraphLoadError(GraphHCError):
    """A graph referenced by the experiment config cannot be loaded."""
