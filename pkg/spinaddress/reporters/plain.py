"""
Plain-text reporter, used when blessed is not installed or output is not a terminal
"""

from .base import Reporter


class PlainReporter(Reporter):
    def style(self, kind: str, text: str) -> str:
        return text
