"""Build and verify every supported certificate, writing JSON into a directory.

    python3 scripts/build_all.py [OUTDIR]
"""
import sys
from pathlib import Path

from noetherp.cli import main

CASES = [("p2", n, 2) for n in (2, 3, 4, 5, 6, 8)]
CASES += [("podd", 3, 3), ("podd", 6, 3), ("podd", 7, 3), ("podd", 9, 3), ("podd", 10, 5)]
CASES += [("kernel", 1, 3), ("kernel", 2, 2), ("kernel", 2, 3), ("kernel", 3, 3)]
CASES += [("hajja", 0, 3), ("hajja", 0, 5), ("discriminant", 0, 2)]


def run(outdir: Path) -> int:
    outdir.mkdir(parents=True, exist_ok=True)
    worst = 0
    for case, n, p in CASES:
        path = outdir / f"{case}_n{n}_p{p}.json"
        code = main(["build", "--case", case, "--n", str(n), "--p", str(p), "--out", str(path)], {})
        if code == 0:
            code = main(["verify", str(path), "--out", str(path.with_suffix(".report.txt"))], {})
        print(f"{case:<13} n={n:<2} p={p}  {'ok' if code == 0 else f'exit {code}'}")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(run(Path(sys.argv[1] if len(sys.argv) > 1 else "build")))
