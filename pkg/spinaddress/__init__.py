"""
Spin Address Package

Pulse-sequence planning and fidelity estimation for addressing one spin qubit in a
linear, exchange-coupled array driven by a single global microwave field.
"""

__version__ = "1.0.0"

from .cli import main

__all__ = ["main", "__version__"]
