"""Photo-induced surface chemistry and emitter charge-state modelling."""

from ._chargetune import *  # noqa: F401,F403
from ._chargetune import run_cli

__all__ = [name for name in dir() if not name.startswith("_")]


def main(argv=None):
    """Console entry point mirroring the C++ tool."""
    import sys

    code, out, err = run_cli(list(sys.argv[1:] if argv is None else argv))
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code
