"""Root logging configuration for the command line."""

import logging
import os

LOG_ENV_VAR = "SKYDE_LOG"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: str | None = None) -> int:
    """Send log records to stderr at ``level`` (default: ``$SKYDE_LOG`` or WARNING).

    Unknown level names fall back to WARNING. Returns the numeric level in use.
    """
    name = (level or os.environ.get(LOG_ENV_VAR) or "WARNING").upper()
    numeric = logging.getLevelName(name)
    if not isinstance(numeric, int):
        numeric = logging.WARNING
    logging.basicConfig(level=numeric, format=LOG_FORMAT, force=True)
    if name not in logging.getLevelNamesMapping():
        logging.getLogger(__name__).warning("unknown %s level %r, using WARNING", LOG_ENV_VAR, name)
    return numeric
