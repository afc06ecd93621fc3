"""Figures for ``run`` reports, drawn with the non-interactive Agg backend."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_COLORS = {"analytic": "#4c72b0", "shots": "#dd8452"}


def fidelity_probability_figure(rows, path, title=None, bound=0.25):
    """Grouped bars of ``F`` and ``P`` per state, one colour per mode.

    ``rows`` are the report rows (dicts with ``state``, ``mode``, ``F``,
    ``P`` and optional ``F_se``/``P_se``); the Average row is skipped.
    """
    rows = [r for r in rows if r["state"] != "Average"]
    states = list(dict.fromkeys(r["state"] for r in rows))
    modes = list(dict.fromkeys(r["mode"] for r in rows))
    x = np.arange(len(states))
    width = 0.8 / max(len(modes), 1)

    fig, axes = plt.subplots(1, 2, figsize=(9, 3.4), sharex=True)
    for k, mode in enumerate(modes):
        by_state = {r["state"]: r for r in rows if r["mode"] == mode}
        offset = (k - (len(modes) - 1) / 2) * width
        for ax, key in zip(axes, ("F", "P")):
            vals = [by_state[s][key] if s in by_state else np.nan for s in states]
            errs = [by_state[s].get(key + "_se") or 0.0 if s in by_state else 0.0 for s in states]
            ax.bar(x + offset, vals, width, yerr=errs, capsize=2,
                   label=mode, color=_COLORS.get(mode, "0.5"))

    axes[0].set_ylabel("decoding fidelity F")
    axes[0].set_ylim(0, 1.05)
    axes[1].set_ylabel("success probability P")
    axes[1].set_ylim(0, 1.05)
    axes[1].axhline(bound, color="0.3", lw=0.8, ls="--")
    for ax in axes:
        ax.set_xticks(x)
        ax.set_xticklabels(states, rotation=30 if max(map(len, states)) > 4 else 0)
        ax.spines[["top", "right"]].set_visible(False)
    axes[1].legend(frameon=False, fontsize=8, loc="upper right")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
