"""
Utils module for the DTBAS simulator.
"""

from .logging_setup import configure_logging
from .ui_helpers import (
    apply_custom_css,
    render_main_header,
    render_feature_card,
    render_status_card,
    format_energy,
    format_degree
)

__all__ = [
    "configure_logging",
    "apply_custom_css",
    "render_main_header",
    "render_feature_card",
    "render_status_card",
    "format_energy",
    "format_degree"
]
