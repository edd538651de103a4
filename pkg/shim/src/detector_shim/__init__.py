"""HTTP shim exposing a transformer text detector behind the wire protocol."""

from .app import create_app
from .model import DetectorModel, ModelLoadError

__all__ = ["DetectorModel", "ModelLoadError", "create_app"]
