"""
Logging setup
One stderr handler for the whole process; library modules only call logging.getLogger(__name__)
"""
import logging
import sys

_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: str = "WARNING", verbose: bool = False) -> None:
    """Install the stderr handler once; later calls only change the level"""
    root = logging.getLogger()
    if not any(getattr(h, "_srm_handler", False) for h in root.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(_FORMAT))
        handler._srm_handler = True
        root.addHandler(handler)
    root.setLevel(logging.INFO if verbose and logging.getLevelName(level) > logging.INFO else level)
