"""Exception hierarchy shared by all nnormlab modules."""


class NnormlabError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(NnormlabError):
    """Vector length or space mismatch."""


class RangeError(NnormlabError):
    """Parameter outside its supported range."""


class ZeroVectorError(NnormlabError):
    """Operation undefined at the zero vector."""


class ShapeError(NnormlabError):
    """Matrix or tensor shape mismatch."""


class RankError(NnormlabError):
    """Tuple longer than the space dimension."""


class DependentFamilyError(NnormlabError):
    """Linearly dependent family where independence is required."""


class UnsupportedSizeError(NnormlabError):
    """Input size beyond what an oracle-grade routine supports."""


class UnsupportedError(NnormlabError):
    """Operation not available for this space."""


class NotAntisymmetricError(NnormlabError):
    """Functional is not antisymmetric where antisymmetry is required."""


class ConfigError(NnormlabError):
    """Invalid suite or CLI configuration."""
