"""Stopband splitting of the half-wave filter against tap-capacitor asymmetry."""

import argparse
from pathlib import Path

import numpy as np

from driveline import designs, network, rfio
from driveline.svgplot import LinePlot


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="driveline-out/scripts")
    ap.add_argument("--max-offset", type=float, default=0.06)
    ap.add_argument("--steps", type=int, default=25)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    offsets = np.linspace(0, args.max_offset, args.steps)
    scan = network.asymmetry_scan(designs.lambda2_filter(), designs.C_D_LAMBDA2 / 2, offsets)
    lo, hi, split = [], [], []
    for off, mins in scan:
        pair = sorted(mins[:2]) if len(mins) >= 2 else [mins[0], mins[0]]
        lo.append(pair[0])
        hi.append(pair[1])
        split.append(pair[1] - pair[0])
        print(f"offset {off:6.3%}: minima {pair[0] / 1e9:.4f} / {pair[1] / 1e9:.4f} GHz, "
              f"splitting {split[-1] / 1e6:.0f} MHz")
    (out / "asymmetry.csv").write_text(rfio.write_csv(
        {"offset": offsets, "f_low_hz": lo, "f_high_hz": hi, "splitting_hz": split}))
    LinePlot("stopband minima vs tap asymmetry", "relative offset (%)", "frequency (GHz)") \
        .add(offsets * 100, np.array(lo) / 1e9, "lower").add(offsets * 100, np.array(hi) / 1e9, "upper") \
        .save(out / "asymmetry.svg")


if __name__ == "__main__":
    main()
