"""Print the acceptance matrix (one line per criterion); exit 1 if any fails."""
import runpy
import sys
from pathlib import Path

if __name__ == "__main__":
    sys.argv = [sys.argv[0]]
    runpy.run_path(str(Path(__file__).resolve().parents[1] / "tests" / "test_acceptance.py"), run_name="__main__")
