"""Sweep the loss-to-coupling ratio through the exceptional point.

Writes one CSV per family showing the eigenvalue collision: the arrow
model's pair +-sqrt(omega^2 - gamma^2)/2 meets at ratio 1 and turns
imaginary, while the gain-loss ladder's imaginary pair splits along the
real axis once the coupling overtakes the gain.
"""
import argparse
import pathlib

from nhcd import spectrum_sweep


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="demo-out", help="output directory")
    parser.add_argument("--samples", type=int, default=400)
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    for kind in ("pseudo", "antipseudo"):
        sweep = spectrum_sweep(kind, samples=args.samples)
        path = out / f"ep-{kind}.csv"
        sweep.write_csv(path)
        flagged = int((~sweep.ok).sum())
        print(f"{kind}: {sweep.ratios.size} samples -> {path} "
              f"({flagged} degenerate)")


if __name__ == "__main__":
    main()
