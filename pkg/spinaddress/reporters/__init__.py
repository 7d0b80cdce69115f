"""
Terminal reporters for command output
"""

from typing import Optional, TextIO

from .base import Reporter
from .plain import PlainReporter


def get_reporter(color: bool = True, stream: Optional[TextIO] = None) -> Reporter:
    """Blessed reporter when colour is wanted and blessed imports, plain text otherwise"""
    if color:
        try:
            from .blessed import BlessedReporter

            return BlessedReporter(stream)
        except ImportError:
            pass
    return PlainReporter(stream)


__all__ = ["PlainReporter", "Reporter", "get_reporter"]
