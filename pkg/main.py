"""
Command-line entry point for OpEntropy.

    python main.py entropy --a a.json --b b.json --phi vn
    python main.py certify --phi x4 --trials 20000 --seed 7
"""

import sys

from app.cli import main

if __name__ == '__main__':
    sys.exit(main())
