"""Lossless YCbCr 4:2:0 screen content coding with soft context formation.

Luma is coded first; the chroma pair is then coded jointly with luma-guided
prediction and luma-dependent chroma range side information.
"""

from .codec import EncoderConfig, decode, decode420, decode444, encode420, encode444
from .crc import CrcParams
from .errors import (
    ContainerError,
    DimensionError,
    FormatError,
    ModelError,
    ParameterError,
    ScfError,
    StreamError,
    TableCorruptionError,
    UsageError,
)
from .pixelio import Image420, Image444, Plane

__all__ = [
    "ContainerError",
    "CrcParams",
    "DimensionError",
    "EncoderConfig",
    "FormatError",
    "Image420",
    "Image444",
    "ModelError",
    "ParameterError",
    "Plane",
    "ScfError",
    "StreamError",
    "TableCorruptionError",
    "UsageError",
    "decode",
    "decode420",
    "decode444",
    "encode420",
    "encode444",
]

__version__ = "0.1.0"
