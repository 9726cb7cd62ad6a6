from src.classical.protocol import (
    ClassicalTranscript, MinuteRecord, Parity, balanced_message, decode, run_classical,
)

__all__ = ["ClassicalTranscript", "MinuteRecord", "Parity", "balanced_message", "decode", "run_classical"]
