"""Equivariant visual-SLAM observer: projective landmark geometry, the
symmetry-group lift, the decoupled Riccati-gain observer, and a deterministic
simulation harness."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
