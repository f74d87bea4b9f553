"""Plot a sweep CSV written by `fas_secrecy sweep`.

    python docs/plot_sweep.py sweep.csv [out.png]
"""

import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main() -> None:
    if len(sys.argv) < 2:
        sys.exit(__doc__)
    df = pd.read_csv(sys.argv[1], comment="#")
    df = df[df["error"].isna()]
    out = sys.argv[2] if len(sys.argv) > 2 else "sweep.png"

    fig, ax = plt.subplots(1, 3, figsize=(13, 3.8))
    ax[0].errorbar(df["axis_value"], df["asc"], yerr=df["asc_err"], marker="o", label="ASC")
    ax[0].plot(df["axis_value"], df["asc_asymptotic"], "--", label="asymptote")
    ax[0].set_ylabel("bits/s/Hz")
    ax[0].legend()

    ax[1].semilogy(df["axis_value"], df["sop_oracle"], marker="o", label="CDF form")
    ax[1].semilogy(df["axis_value"], df["sop_paper"].clip(lower=1e-300), "x--", label="density form")
    ax[1].set_ylabel("secrecy outage")
    ax[1].legend()

    ax[2].plot(df["axis_value"], df["see"], marker="o")
    ax[2].set_ylabel("bits/s/Hz/W")

    for a in ax:
        a.set_xlabel("axis value")
        a.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    print(out)


if __name__ == "__main__":
    main()
