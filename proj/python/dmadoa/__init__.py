# SPDX-License-Identifier: Apache-2.0
"""DoA and polarization estimation with dynamic metasurface antennas."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401

__version__ = "0.1.0"
