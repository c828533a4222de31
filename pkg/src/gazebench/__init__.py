"""Trajectory-constrained active gaze control: simulation library and benchmark harness."""
from ._accel import backend_name

__version__ = "0.1.0"

__all__ = ["backend_name", "__version__"]
