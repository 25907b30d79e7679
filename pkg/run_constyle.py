"""
Run the IRConStyle command line
"""

import sys

from irconstyle.cli import main


if __name__ == "__main__":
    sys.exit(main())
