"""
Entry point for running the package with python -m spinaddress
"""

from .cli import main

if __name__ == "__main__":
    main()
