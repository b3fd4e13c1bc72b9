import sys

from hornmle.cli import run

sys.exit(run())
