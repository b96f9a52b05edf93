"""Run the three bundled sweeps and write CSV and SVG next to this script.

    python3 scripts/run_all.py [--workers N] [--outdir DIR]
"""
import argparse
import pathlib

from charbound import cli

HERE = pathlib.Path(__file__).resolve().parent


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--workers", default="1")
    ap.add_argument("--outdir", default=str(HERE / "out"))
    args = ap.parse_args()
    out = pathlib.Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    codes = {}
    for name in ("corollary1", "propk", "homgrowth"):
        codes[name] = cli.main([
            name, "--config", str(HERE / f"{name}.cfg"), "--workers", args.workers,
            "--out", str(out / f"{name}.csv"), "--svg", str(out / f"{name}.svg"),
        ])
    for name, code in codes.items():
        print(f"{name}: exit {code}")
    return max(codes.values())


if __name__ == "__main__":
    raise SystemExit(main())
