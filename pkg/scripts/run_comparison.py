#!/usr/bin/env python3
"""Reference convolution comparison: analytic model vs both simulator modes.

Equivalent to `sim compare --freq 100e6`; kept as a script so the headline
numbers are one command away.
"""

import sys

from rvdsp.cli import main

if __name__ == "__main__":
    sys.exit(main(["compare", "--freq", "100e6"] + sys.argv[1:]))
