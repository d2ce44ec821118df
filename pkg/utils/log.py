import logging
import sys

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def level_for(verbosity: int) -> int:
    """-v gives INFO, -vv and more give DEBUG, nothing gives WARNING."""
    if verbosity >= 2:
        return logging.DEBUG
    if verbosity == 1:
        return logging.INFO
    return logging.WARNING


def setup_logging(verbosity: int = 0) -> logging.Logger:
    """Configure the root logger once, with a single stderr handler."""
    root = logging.getLogger()
    root.setLevel(level_for(verbosity))
    for handler in list(root.handlers):
        if getattr(handler, "_preprocessor_handler", False):
            root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler._preprocessor_handler = True
    root.addHandler(handler)
    return root
