"""cyclonids: feature selection and classification for intrusion-detection datasets.

Pipeline pieces: dataset loading/encoding/splitting, a synthetic-data oracle,
column standardization, Boruta shadow-feature selection, PCA, a random forest
and a linear SVM built from first principles, confusion-matrix metrics, and
an experiment runner that ties them together behind the `cyclonids` CLI.
"""

__version__ = "0.1.0"

from .errors import ConfigError, CyclonidsError, DataError, NumericError

__all__ = [
    "__version__",
    "ConfigError",
    "CyclonidsError",
    "DataError",
    "NumericError",
]
