"""Write CSV and SVG outputs for all four figure reproductions and print verdicts."""

import argparse
import sys
from pathlib import Path

from ecochain.figures import run_figure
from ecochain.io import emit_csv, trajectory_svg


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="figures", help="output directory (default: figures)")
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ok = True
    for fig in ("fig1", "fig2", "fig3", "fig4"):
        report = run_figure(fig)
        (out / f"{fig}.csv").write_text(emit_csv(report.trajectory), encoding="utf-8")
        (out / f"{fig}.svg").write_text(trajectory_svg(report.trajectory, fig), encoding="utf-8")
        print(f"{fig}: {'PASS' if report.passed else 'FAIL'}")
        for c in report.checks:
            print("  " + c.line())
        for note in report.notes:
            print("  " + note)
        ok &= report.passed
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())
