"""Verification laboratory for line solitons of the Kawahara-KP equation."""
from kkplab.model import LineWave, ModelParams

__all__ = ["LineWave", "ModelParams"]
__version__ = "0.1.0"
