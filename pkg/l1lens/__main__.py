import sys

from l1lens.cli import run

if __name__ == "__main__":
    sys.exit(run())
