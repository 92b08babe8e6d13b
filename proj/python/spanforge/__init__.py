from ._spanforge import *  # noqa: F401,F403
from ._spanforge import __version__  # noqa: F401
