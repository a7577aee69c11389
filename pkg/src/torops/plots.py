"""Figure rendering for certification runs.

Figures are written straight to files; no interactive backend is ever
touched so the renderers work in headless jobs.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .certify import CertificationReport, EnvelopeReport

__all__ = ["render_band_plot", "render_envelope_plot"]


def render_band_plot(report: CertificationReport, path: str | Path) -> None:
    """Probe gains against band index with the fitted slope line."""
    bands = np.array(sorted(report.band_ratios))
    maxima = np.log2([report.band_ratios[l] for l in bands])

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    xs = [row.band for row in report.rows]
    ys = [np.log2(row.ratio) for row in report.rows]
    ax.plot(xs, ys, ".", color="0.6", markersize=4, label="probes")
    ax.plot(bands, maxima, "o-", color="tab:blue", label="band max")
    intercept = float(np.mean(maxima - report.slope * bands))
    ax.plot(
        bands,
        report.slope * bands + intercept,
        "--",
        color="tab:red",
        label=f"slope {report.slope:+.3f}",
    )
    ax.set_xlabel("band $l$")
    ax.set_ylabel(r"$\log_2$ gain")
    ax.set_title(f"{report.experiment_id}: {report.verdict}")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def render_envelope_plot(report: EnvelopeReport, path: str | Path) -> None:
    """Operator band sups against the frozen-coefficient envelope."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.semilogy(report.bands, report.operator_sups, "o-", label="operator")
    ax.semilogy(
        report.bands,
        [report.tolerance * e for e in report.envelope_sups],
        "s--",
        label=f"{report.tolerance:g} Envelope",
    )
    ax.set_xlabel("band $l$")
    ax.set_ylabel("sup of band piece")
    verdict = "PASS" if report.passed else "FAIL"
    ax.set_title(f"envelope domination: {verdict} (max excess {report.max_excess:.3f})")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
