#!/usr/bin/env python3
# Plots sweep-snr.csv. Usage: python3 <this script> [csv]
import csv
import math
import sys
from collections import defaultdict

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "sweep-snr.csv"
series = defaultdict(list)
with open(path) as fh:
    for row in csv.DictReader(fh):
        key = (row["sweep"], int(row["iteration"]), row["estimator"])
        x = float(row["grid_value"])
        series[key].append((10 * math.log10(x), float(row["mse"]), float(row["crlb"]), float(row["mse_over_crlb"])))

panels = sorted({(k[0], k[1]) for k in series})
mse_panel = true
fig, axes = plt.subplots(len(panels), 1, figsize=(7, 3.5 * len(panels)), squeeze=False)
for ax, (sweep, iteration) in zip(axes[:, 0], panels):
    crlb_drawn = False
    for (s, it, est), pts in sorted(series.items()):
        if (s, it) != (sweep, iteration):
            continue
        pts.sort()
        xs = [p[0] for p in pts]
        if mse_panel:
            ax.semilogy(xs, [p[1] for p in pts], marker="o", ms=3, label=est)
            if not crlb_drawn:
                ax.semilogy(xs, [p[2] for p in pts], "k--", label="CRLB")
                crlb_drawn = True
        else:
            ax.plot(xs, [p[3] for p in pts], marker="o", ms=3, label=est)
    ax.set_title(f"{sweep}, iteration {iteration}")
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("MSE (Hz^2)" if mse_panel else "MSE / CRLB")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
fig.tight_layout()
fig.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)
