#!/usr/bin/env python3
"""Regenerate the full hypercone catalog (sphere links, Clifford links,
isoparametric and homogeneous families) through the CLI report command.

Usage: python3 scripts/reproduce_catalog.py [--format csv] [--n-max N]
"""

import sys

from gausslab.cli import main

if __name__ == "__main__":
    sys.exit(main(["report", "--all", *sys.argv[1:]]))
