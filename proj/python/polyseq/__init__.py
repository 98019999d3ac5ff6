"""Recover polygon-mesh construction sequences from silhouette images."""

from ._core import *  # noqa: F401,F403
from ._core import ConfigError, ImageIoError, Mesh, ReplayMismatch, TopoAction  # noqa: F401

__version__ = "0.1.0"
