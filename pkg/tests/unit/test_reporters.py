"""
Unit tests for terminal reporters
"""

import contextlib
import io
import sys

import pytest

from spinaddress.reporters import PlainReporter, get_reporter
from spinaddress.reporters.base import format_number


@pytest.fixture
def stream():
    return io.StringIO()


@pytest.fixture
def reporter(stream):
    return PlainReporter(stream)


class TestPlainReporter:
    """Test cases for undecorated output"""

    def test_field_formats_floats(self, reporter, stream):
        """Test floats are printed with six significant digits"""
        reporter.field("Rabi frequency", 0.625, "MHz")
        assert "Rabi frequency:" in stream.getvalue()
        assert stream.getvalue().rstrip().endswith("0.625 MHz")

    def test_field_keeps_strings(self, reporter, stream):
        """Test non-float values are printed as given"""
        reporter.field("Bins", "1 3 6")
        assert "1 3 6" in stream.getvalue()

    def test_table_columns_align(self, reporter, stream):
        """Test every row is padded to the widest cell"""
        reporter.table(["m", "fidelity"], [[1, 0.99940123], [10, 0.99999]])
        lines = stream.getvalue().splitlines()
        assert len(lines) == 4
        assert lines[2].index("0.999401") == lines[3].index("0.99999")

    def test_section_has_rules(self, reporter, stream):
        """Test section titles are framed"""
        reporter.section("SWAP synthesis")
        lines = stream.getvalue().splitlines()
        assert lines[0] == "=" * PlainReporter.RULE_WIDTH
        assert lines[1].strip() == "SWAP synthesis"

    def test_error_goes_to_stderr(self, reporter, stream, capsys):
        """Test errors bypass the output stream"""
        reporter.error("bad seed")
        assert stream.getvalue() == ""
        assert "Error: bad seed" in capsys.readouterr().err


def test_format_number():
    """Test significant-digit formatting"""
    assert format_number(0.1234567) == "0.123457"
    assert format_number(12.0) == "12"


class TestGetReporter:
    """Test cases for reporter selection"""

    def test_plain_when_colour_disabled(self, stream):
        """Test --no-color gives plain text"""
        assert isinstance(get_reporter(color=False, stream=stream), PlainReporter)

    def test_fallback_without_blessed(self, stream, mocker):
        """Test a failed blessed import falls back to plain text"""
        mocker.patch.dict(sys.modules, {"spinaddress.reporters.blessed": None})
        assert isinstance(get_reporter(color=True, stream=stream), PlainReporter)

    def test_default_stream_follows_redirection(self):
        """Test a reporter built without a stream writes to the current sys.stdout"""
        reporter = get_reporter(color=False)
        captured = io.StringIO()
        with contextlib.redirect_stdout(captured):
            reporter.note("late binding")
        assert captured.getvalue() == "late binding\n"

    def test_blessed_reporter_on_non_terminal(self, stream):
        """Test blessed output to a pipe carries no escape codes"""
        pytest.importorskip("blessed")
        from spinaddress.reporters.blessed import BlessedReporter

        reporter = get_reporter(color=True, stream=stream)
        assert isinstance(reporter, BlessedReporter)
        reporter.field("Total time", 10.05, "us")
        assert "\x1b[" not in stream.getvalue()
