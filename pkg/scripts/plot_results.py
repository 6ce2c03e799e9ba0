"""Plot the sweep CSVs written by ``hetcomp`` (needs matplotlib, not a package dependency).

Usage: python3 scripts/plot_results.py results/
"""
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402


def read(path):
    return pd.read_csv(path, comment="#")


def main(out: Path):
    for metric in ("coverage", "throughput"):
        fig, axes = plt.subplots(1, 3, figsize=(13, 3.6))
        d = out / f"delay_sweep_{metric}.csv"
        if d.exists():
            df = read(d)
            axes[0].errorbar(df.mean_delay_ms, df.value, 2 * df.std_error, label="CoMP", marker="o")
            axes[0].errorbar(df.mean_delay_ms, df.baseline_value, 2 * df.baseline_std_error, label="no CoMP")
            axes[0].set(xlabel="mean delay (ms)", ylabel=metric)
            axes[0].legend()
        d = out / f"l_sweep_{metric}.csv"
        if d.exists():
            df = read(d)
            axes[1].errorbar(df.L, df.value, 2 * df.std_error, marker="o")
            axes[1].set(xlabel="L", ylabel=metric)
        d = out / f"intratier_loss_{metric}.csv"
        if d.exists():
            df = read(d)
            for axis, g in df.groupby("axis"):
                axes[2].errorbar(g.x, 100 * g.loss, 200 * g.loss_std_error, marker="o", label=axis)
            axes[2].set(xlabel="mean delay (ms) / L", ylabel="intra-tier loss (%)")
            axes[2].legend()
        fig.tight_layout()
        fig.savefig(out / f"{metric}.png", dpi=120)
        print(f"wrote {out / f'{metric}.png'}")


if __name__ == "__main__":
    main(Path(sys.argv[1] if len(sys.argv) > 1 else "results"))
