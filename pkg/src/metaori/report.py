"""Matplotlib figure rendering for the CLI report path (headless)."""

from __future__ import annotations

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

STYLE = {"figure.figsize": (7.0, 4.5), "figure.dpi": 130,
         "axes.grid": True, "grid.alpha": 0.3, "font.size": 10}


def _style():
    plt.rcParams.update(STYLE)


def plot_fd(curves, path, events=None):
    """Force-displacement figure for any mix of F_meta / F_ori / F_el curves."""
    _style()
    fig, ax = plt.subplots()
    colors = {"F_meta": "tab:blue", "F_ori": "tab:orange", "F_el": "tab:red"}
    for c in curves:
        ax.plot(c.d, c.F, color=colors.get(c.role, "k"), label=c.role)
    ax.axhline(0.0, color="k", lw=0.6)
    for ev in events or []:
        ax.plot(ev.x, ev.y, "kv" if "min" in ev.kind else "k^", ms=6)
    ax.set_xlabel("compression d (mm)")
    ax.set_ylabel("force F (N)")
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_pv(pv, path):
    _style()
    fig, ax = plt.subplots()
    ax.plot(pv.V, pv.P, color="tab:red")
    ax.axhline(0.0, color="k", lw=0.6)
    neg = pv.P < 0
    if np.any(neg):
        ax.fill_between(pv.V, pv.P, 0.0, where=neg, color="tab:blue", alpha=0.2,
                        label="vacuum region")
        ax.legend(loc="best")
    for ev in pv.events:
        ax.plot(ev.x, ev.y, "kv" if "min" in ev.kind else "k^", ms=6)
    ax.set_xlabel("cavity volume V (mL)")
    ax.set_ylabel("pressure P (mbar)")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_sequence(res, path):
    _style()
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7.0, 7.0), sharex=True)
    for branch, ls in (("inflation", "-"), ("deflation", "--")):
        m = res.branch == branch
        if np.any(m):
            ax1.plot(res.V[m], res.P[m], ls, color="tab:red", label=branch)
    for ev in res.events:
        ax1.plot(ev.x, ev.y, "k^" if ev.branch == "inflation" else "kv", ms=7)
        ax1.annotate(f"seg {ev.segment}", (ev.x, ev.y),
                     textcoords="offset points", xytext=(4, 6), fontsize=8)
    ax1.axhline(0.0, color="k", lw=0.6)
    ax1.set_ylabel("pressure P (mbar)")
    ax1.legend(loc="best")
    n_seg = res.H.shape[1]
    for i in range(n_seg):
        for branch, ls in (("inflation", "-"), ("deflation", "--")):
            m = res.branch == branch
            if np.any(m):
                ax2.plot(res.V[m], res.H[m, i], ls,
                         label=f"segment {i} {branch}")
    ax2.set_xlabel("total cavity volume V (mL)")
    ax2.set_ylabel("segment height H (mm)")
    ax2.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_sweep(rows, axis, path):
    _style()
    ok = [r for r in rows if not r["error"] and r["snap_pressure_mbar"] is not None]
    fig, ax = plt.subplots()
    if ok:
        x = [r["value"] for r in ok]
        ax.plot(x, [r["snap_pressure_mbar"] for r in ok], "o-",
                color="tab:red", label="snap pressure (mbar)")
        ax2 = ax.twinx()
        el = [(r["value"], r["elongation_pct"]) for r in ok
              if r["elongation_pct"] is not None]
        if el:
            ax2.plot(*zip(*el), "s--", color="tab:blue", label="elongation (%)")
            ax2.set_ylabel("elongation (%)")
    ax.set_xlabel(axis)
    ax.set_ylabel("snap pressure (mbar)")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
