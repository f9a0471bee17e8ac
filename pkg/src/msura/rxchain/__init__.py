"""Receiver chain: pilot detection, combining, list decoding and cancellation."""
from .detection import (PilotDetection, demod_interleave, detect_pilots, estimate_channel,
                        mmse_demod_llr, mrc_demod_llr)
from .iisd import iisd, mmse_channel
from .sic import ls_sic
from .slot import DecoderState, SlotResult, decode_slot, message_key, success_check

__all__ = [
    "DecoderState", "PilotDetection", "SlotResult", "decode_slot", "demod_interleave",
    "detect_pilots", "estimate_channel", "iisd", "ls_sic", "message_key", "mmse_channel",
    "mmse_demod_llr", "mrc_demod_llr", "success_check",
]
