"""CRC, polar encoding and CRC-aided list decoding."""
from .construction import PolarCodeSpec, build_frozen_set, load_reliability, reliability_order
from .crc import CrcSpec, crc_attach, crc_check
from .decoder import BACKEND, available_backends, sc_decode, scl_decode, scl_list
from .encoder import polar_encode, polar_transform

__all__ = [
    "BACKEND", "CrcSpec", "PolarCodeSpec", "available_backends", "build_frozen_set",
    "crc_attach", "crc_check", "load_reliability", "polar_encode", "polar_transform",
    "reliability_order", "sc_decode", "scl_decode", "scl_list",
]
