"""
Blessed-based reporter with a maroon/port colour palette
"""

from typing import Callable, Dict, Optional, TextIO

from blessed import Terminal

from .base import Reporter


class BlessedReporter(Reporter):
    """
    Reporter using the blessed library for coloured output.
    Falls back to undecorated text when the stream is not a terminal.
    """

    def __init__(self, stream: Optional[TextIO] = None) -> None:
        super().__init__(stream)
        self.term = Terminal(stream=stream)
        self.palette: Dict[str, Callable[[str], str]] = {
            "title": self.term.color_rgb(242, 234, 220),
            "label": self.term.color_rgb(183, 110, 121),
            "value": self.term.color_rgb(87, 116, 90),
            "muted": self.term.color_rgb(120, 113, 108),
            "error": self.term.red,
        }

    def style(self, kind: str, text: str) -> str:
        if not self.term.does_styling:
            return text
        return str(self.palette.get(kind, str)(text))
