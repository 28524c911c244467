"""PNG figures for the CLI reports.

matplotlib is imported here only, and this module is imported only when a
figure is requested, so the numerical modules never need it.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# no timestamps or version strings, so reruns give identical bytes
_PNG_META = {"Software": None}
_STYLE = {
    "figure.figsize": (6.0, 3.8),
    "figure.dpi": 100,
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "legend.frameon": False,
}


def _save(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, format="png", metadata=_PNG_META)
    plt.close(fig)
    return path


def evidence_grid(grid, path: Path, psi0=None, title: str = "") -> Path:
    """Prior and posterior cell densities on top, the relative belief ratio below."""
    with plt.rc_context(_STYLE):
        fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(6.0, 5.0))
        width = grid.hi - grid.lo
        top.plot(grid.mid, grid.prior_mass / width, label="prior", color="0.5", ls="--")
        top.plot(grid.mid, grid.posterior_mass / width, label="posterior", color="k")
        top.set_ylabel("density")
        top.legend()
        bottom.plot(grid.mid, grid.rb, color="k")
        bottom.axhline(1.0, color="0.6", lw=0.8)
        if psi0 is not None:
            bottom.axvline(psi0, color="0.6", lw=0.8, ls=":")
        bottom.set_ylabel("relative belief ratio")
        bottom.set_xlabel("psi")
        # the interesting part: where either distribution carries mass
        keep = (grid.posterior_mass > 1e-8) | (grid.prior_mass > 1e-4)
        if keep.any():
            bottom.set_xlim(grid.lo[keep][0], grid.hi[keep][-1])
        if title:
            top.set_title(title)
        return _save(fig, path)


def likelihood_curves(psi, curves: dict, path: Path, title: str = "") -> Path:
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for (name, values), ls in zip(curves.items(), ["-", "--", ":", "-."]):
            ax.plot(psi, np.asarray(values) / np.max(values), ls=ls, color="k", label=name)
        ax.set_xlabel("psi")
        ax.set_ylabel("scaled likelihood")
        ax.legend()
        if title:
            ax.set_title(title)
        return _save(fig, path)


def eprocess_means(steps, means, se, path: Path) -> Path:
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.errorbar(steps, means, yerr=3 * np.asarray(se), fmt="o", color="k", ms=3, capsize=2)
        ax.axhline(1.0, color="0.6", lw=0.8)
        ax.set_xlabel("step")
        ax.set_ylabel("mean running product (+/- 3 se)")
        return _save(fig, path)


def lindley(tau0, rb, strength, pvalue, path: Path) -> Path:
    with plt.rc_context(_STYLE):
        fig, (left, right) = plt.subplots(1, 2, figsize=(7.5, 3.4))
        left.loglog(tau0, rb, "o-", color="k")
        left.set_xlabel("tau0")
        left.set_ylabel("relative belief ratio at mu0")
        right.semilogx(tau0, strength, "o-", color="k", label="strength")
        right.semilogx(tau0, pvalue, "--", color="0.5", label="p-value")
        right.set_xlabel("tau0")
        right.legend()
        return _save(fig, path)


def bias_sweep(x, against, favour, path: Path, xlabel: str, log_x: bool = False) -> Path:
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.plot(x, against, "o-", color="k", label="bias against")
        ax.plot(x, favour, "s--", color="0.4", label="bias in favour")
        if log_x:
            ax.set_xscale("log")
        ax.set_ylim(0, 1)
        ax.set_xlabel(xlabel)
        ax.set_ylabel("prior probability")
        ax.legend()
        return _save(fig, path)
