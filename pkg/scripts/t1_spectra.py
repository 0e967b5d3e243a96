"""Drive-line T1 and transmission of the three reference designs against frequency.

Writes t1_spectra.csv and two SVG plots to the output directory.
"""

import argparse
from pathlib import Path

import numpy as np

from driveline import acceptance, coupling, designs, network, rfio
from driveline.svgplot import LinePlot


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="driveline-out/scripts")
    ap.add_argument("--points", type=int, default=2001)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    grid = network.FrequencyGrid.linspace(1e9, 8e9, args.points)
    f = grid.freqs
    table = {"f_hz": f}
    t1_plot = LinePlot("drive-line T1", "frequency (GHz)", "T1_ext (s)", logy=True)
    s21_plot = LinePlot("drive to qubit transmission", "frequency (GHz)", "|S21| (dB)")
    for name, build in designs.DESIGNS.items():
        net = build()
        t1 = coupling.t1_ext(np.real(network.driving_point_admittance(net, 2, coupling.drive_terminations(net), grid)),
                             designs.C_Q)
        s21 = network.s_parameters(net, grid, {3: "grounded"}).s_db(2, 1)
        table[f"t1_{name}_s"] = t1
        table[f"s21_{name}_db"] = s21
        t1_plot.add(f / 1e9, t1, name)
        s21_plot.add(f / 1e9, s21, name)
        if name != "standard":
            f_pk, t1_pk = acceptance.stopband_peak_t1(net)
            print(f"{name:9s} stopband T1_ext {t1_pk:.3g} s at {f_pk / 1e9:.4f} GHz")
    (out / "t1_spectra.csv").write_text(rfio.write_csv(table))
    t1_plot.save(out / "t1_spectra.svg")
    s21_plot.save(out / "s21_spectra.svg")


if __name__ == "__main__":
    main()
