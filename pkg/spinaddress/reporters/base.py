"""
Base class for terminal reporters
"""

import sys
from abc import ABC, abstractmethod
from typing import Any, List, Optional, Sequence, TextIO


class Reporter(ABC):
    """
    Renders command results as text.
    Subclasses only decide how each kind of text is styled.
    """

    RULE_WIDTH = 60

    def __init__(self, stream: Optional[TextIO] = None) -> None:
        self._stream = stream

    @property
    def stream(self) -> TextIO:
        # Unset means whatever sys.stdout is at write time
        return self._stream if self._stream is not None else sys.stdout

    @abstractmethod
    def style(self, kind: str, text: str) -> str:
        """
        Decorate text

        Args:
            kind: One of "title", "label", "value", "muted", "error"
            text: Text to decorate
        """
        pass

    def write(self, line: str = "") -> None:
        print(line, file=self.stream)

    def section(self, title: str) -> None:
        self.write(self.style("muted", "=" * self.RULE_WIDTH))
        self.write(self.style("title", f" {title}"))
        self.write(self.style("muted", "=" * self.RULE_WIDTH))

    def field(self, label: str, value: Any, unit: str = "") -> None:
        text = format_number(value) if isinstance(value, float) else str(value)
        suffix = f" {unit}" if unit else ""
        padded = (label + ":").ljust(26)
        self.write(f"  {self.style('label', padded)} {self.style('value', text)}{suffix}")

    def table(self, headers: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
        cells: List[List[str]] = [
            [format_number(c) if isinstance(c, float) else str(c) for c in row] for row in rows
        ]
        widths = [len(h) for h in headers]
        for row in cells:
            widths = [max(w, len(c)) for w, c in zip(widths, row)]
        head = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
        self.write("  " + self.style("label", head))
        self.write("  " + self.style("muted", "-" * len(head)))
        for row in cells:
            self.write("  " + "  ".join(c.ljust(w) for c, w in zip(row, widths)))

    def note(self, text: str) -> None:
        self.write(self.style("muted", text))

    def error(self, text: str) -> None:
        print(self.style("error", f"Error: {text}"), file=sys.stderr)


def format_number(x: float, digits: int = 6) -> str:
    return f"{x:.{digits}g}"
