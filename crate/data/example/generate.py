"""Regenerates plots.csv: a small synthetic forest-plot table.

Species presence follows a latent elevation gradient so that the example
pipeline yields a handful of species/environment rules.
"""

import csv
import math
import random

SPECIES = {
    # name: (optimum on the 0..1 cold-warm axis, tolerance, peak probability)
    "PICABI": (0.15, 0.18, 0.9),
    "LARDEC": (0.05, 0.12, 0.7),
    "PINCEM": (0.02, 0.08, 0.5),
    "ABIALB": (0.35, 0.15, 0.6),
    "FAGSYL": (0.45, 0.15, 0.8),
    "CASSAT": (0.60, 0.12, 0.6),
    "QUEPUB": (0.70, 0.15, 0.7),
    "PHILAT": (0.90, 0.07, 0.6),
    "QUEILE": (0.88, 0.10, 0.9),
    "PINHAL": (0.95, 0.08, 0.5),
}
N_PLOTS = 300


def main():
    rng = random.Random(20240611)
    header = (
        ["idplot"]
        + [f"P_{s}" for s in SPECIES]
        + ["C_WC0001", "C_WC0004", "C_WC0008", "C_WC0012", "C_WC0015", "C_ARIIND",
           "S_SGWC33", "S_SGPHWA", "S_ITLITO", "E_CANHEI", "E_MDVIME", "E_SDVIME"]
    )
    rows = []
    for plot in range(1, N_PLOTS + 1):
        warm = rng.betavariate(1.3, 1.3)
        row = [str(100000 + plot)]
        for opt, tol, peak in SPECIES.values():
            p = peak * math.exp(-((warm - opt) / tol) ** 2)
            row.append("1" if rng.random() < p else "0")
        bio1 = -2.0 + 19.0 * warm + rng.gauss(0, 0.6)
        bio4 = 650 - 250 * warm + rng.gauss(0, 25)
        bio8 = bio1 + rng.gauss(-1.5, 2.0)
        bio12 = 2200 - 1500 * warm + rng.gauss(0, 150)
        bio15 = 15 + 45 * warm + rng.gauss(0, 5)
        ariind = bio12 / (bio1 + 10) / 10
        sgwc33 = 20 + 15 * rng.random()
        ph = 4.2 + 2.5 * warm + rng.gauss(0, 0.4)
        litho = rng.choice([1, 3, 5, 12, 12, 14])
        canhei = max(0.0, 28 - 14 * warm + rng.gauss(0, 4))
        mdvi = 0.45 + 0.3 * (1 - abs(warm - 0.5)) + rng.gauss(0, 0.05)
        sdvi = abs(rng.gauss(0.08, 0.03))
        row += [f"{bio1:.2f}", f"{bio4:.1f}", f"{bio8:.2f}", f"{bio12:.0f}", f"{bio15:.1f}",
                f"{ariind:.3f}", f"{sgwc33:.2f}", f"{ph:.2f}", str(litho), f"{canhei:.1f}",
                f"{mdvi:.4f}", f"{sdvi:.4f}"]
        rows.append(row)
    # a few damaged records, to exercise row dropping
    rows[17][header.index("C_WC0012")] = "NA"
    rows[101][header.index("E_CANHEI")] = ""
    rows[202][header.index("S_SGPHWA")] = "n/d"
    with open("plots.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


if __name__ == "__main__":
    main()
