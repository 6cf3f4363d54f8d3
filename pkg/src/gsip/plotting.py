"""Figure rendering for CLI outputs.

Every report path writes a PNG next to its CSV: generated cases show the
superpotential, potential, and ground state; verified cases overlay the
analytic ground state on the numeric eigenvectors and mark the energy
levels on the potential.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_DPI = 130


def render_generate_figure(path, x, w, v1, v2, psi0, title: str) -> None:
    fig, axes = plt.subplots(2, 1, figsize=(7.0, 6.4), sharex=True)
    ax = axes[0]
    ax.plot(x, v1, label="V1", lw=1.4)
    ax.plot(x, v2, label="V2", lw=1.0, ls="--")
    ax.plot(x, w, label="W", lw=1.0, color="gray")
    span = np.percentile(v1, [0, 90])
    pad = 0.25 * max(span[1] - span[0], 1.0)
    ax.set_ylim(span[0] - pad, span[1] + pad)
    ax.set_ylabel("energy")
    ax.legend(loc="best", fontsize=8)
    ax.set_title(title)
    ax = axes[1]
    ax.plot(x, psi0 / np.max(np.abs(psi0)), color="C2")
    ax.set_xlabel("x")
    ax.set_ylabel("psi0 (scaled)")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def render_verify_figure(path, artifacts: dict, title: str) -> None:
    x = artifacts["x"]
    v = artifacts["potential"]
    energies = artifacts["energies"]
    psi_a = artifacts["psi_analytic"]
    psi_n = artifacts["psi_numeric"]
    fig, axes = plt.subplots(2, 1, figsize=(7.0, 6.4), sharex=True)
    ax = axes[0]
    ax.plot(x, v, lw=1.4, color="C0", label="potential")
    for e in energies:
        ax.axhline(e, lw=0.7, color="C3", alpha=0.6)
    top = max(energies) if energies else 1.0
    lo = float(np.min(v))
    ax.set_ylim(lo - 0.1 * (top - lo + 1), top + 0.6 * (top - lo + 1))
    ax.set_ylabel("energy")
    ax.legend(loc="best", fontsize=8)
    ax.set_title(title)
    ax = axes[1]
    sign = np.sign(psi_n[0][np.argmax(np.abs(psi_n[0]))]) or 1.0
    ax.plot(x, psi_a, lw=1.6, color="C2", label="analytic psi0")
    ax.plot(x, sign * psi_n[0], lw=1.0, ls="--", color="k", label="numeric psi0")
    for j, psi in enumerate(psi_n[1:4], start=1):
        ax.plot(x, psi, lw=0.8, alpha=0.6, label=f"numeric psi{j}")
    ax.set_xlabel("x")
    ax.set_ylabel("wavefunctions")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
