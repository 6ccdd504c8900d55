"""Binary {0,1} autoencoders with random binary weights."""

from importlib.metadata import PackageNotFoundError, version as _version

from .binvec import BinaryVector, WeightMatrix, make_rng, random_binary_vector, random_weight_matrix
from .kernels import BACKEND
from .models import (
    ModelParams,
    best_reconstruction,
    bmp_encode,
    decode_kwta,
    decode_threshold,
    encode_kwta,
    encode_threshold,
    kwta,
)

try:
    __version__ = _version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BinaryVector",
    "ModelParams",
    "WeightMatrix",
    "best_reconstruction",
    "bmp_encode",
    "decode_kwta",
    "decode_threshold",
    "encode_kwta",
    "encode_threshold",
    "kwta",
    "make_rng",
    "random_binary_vector",
    "random_weight_matrix",
]
