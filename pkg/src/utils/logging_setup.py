"""
Logging configuration shared by the CLI and the dashboard.
"""

import logging
import sys

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

def configure_logging(level: str = "INFO"):
    """Install one stderr handler on the root logger; calling it again only changes the level."""
    root = logging.getLogger()
    if not any(getattr(h, "_dtbas", False) for h in root.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._dtbas = True
        root.addHandler(handler)
    root.setLevel(getattr(logging, level.upper(), logging.INFO))
