"""Black-box quantization of one-port impedance data and RCSJ junction simulation."""

from ._core import *  # noqa: F401,F403
from ._core import BbqError  # noqa: F401
