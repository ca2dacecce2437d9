class TrevHCError(Exception):
    """Base class of every error raised by the clustering kernels."""


class DendrogramError(TrevHCError, ValueError):
    pass


class ComparisonError(TrevHCError, ValueError):
    pass


class SimilarityError(TrevHCError, ValueError):
    pass


class FormatError(TrevHCError, ValueError):
    """Malformed merge-list, comparison, similarity or answer file."""


class OracleLimitError(TrevHCError, ValueError):
    pass


class ExperimentError(TrevHCError, ValueError):
    pass
