"""Graph-based melody reduction."""

from ._melred import *  # noqa: F401,F403
from ._melred import __doc__  # noqa: F401
