"""Figure rendering for report bundles (headless, deterministic output)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

# keep PNG bytes reproducible across runs
_SAVEFIG_KWARGS = {"dpi": 110, "metadata": {"Software": None}}


def _axis_window(spec):
    if spec.peaks:
        centers = [p.center_hz for p in spec.peaks]
        span = max(centers) - min(centers)
        pad = max(10.0, 0.6 * span)
        return min(centers) - pad, max(centers) + pad
    return float(spec.frequencies_hz[0]), float(spec.frequencies_hz[-1])


def save_spectra_figure(spec_in, spec_out, path, title: str = "") -> None:
    """Stacked input (a) / output (b) spectra, frequency decreasing rightward."""
    fig, (ax_a, ax_b) = plt.subplots(2, 1, figsize=(7.0, 5.0), sharex=True)
    lo, hi = _axis_window(spec_in)
    for ax, spec, tag in ((ax_a, spec_in, "(a) input"), (ax_b, spec_out, "(b) output")):
        ax.plot(spec.frequencies_hz, spec.amplitude, lw=0.8, color="black")
        ax.axhline(0.0, lw=0.4, color="gray")
        for peak in spec.peaks:
            if peak.control_pattern is not None:
                va = "bottom" if peak.height >= 0 else "top"
                ax.annotate(f"|{peak.control_pattern}>",
                            (peak.center_hz, peak.height),
                            ha="center", va=va, fontsize=8)
        ax.set_ylabel("amplitude")
        ax.set_title(f"{tag} {title}".strip(), fontsize=10, loc="left")
        ax.margins(y=0.2)
    ax_b.set_xlabel("frequency offset (Hz)")
    ax_b.set_xlim(hi, lo)  # NMR display convention
    fig.tight_layout()
    fig.savefig(path, **_SAVEFIG_KWARGS)
    plt.close(fig)


def save_scan_figure(curve, path) -> None:
    """Pulse-selectivity curve: fidelity versus drive amplitude."""
    amps = [a for a, _ in curve]
    fids = [f for _, f in curve]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(amps, fids, marker="o", color="black", lw=1.0)
    ax.set_xscale("log")
    ax.set_xlabel("pulse amplitude (Hz)")
    ax.set_ylabel("phase-stripped fidelity")
    ax.set_ylim(min(0.5, min(fids) - 0.05), 1.01)
    ax.grid(True, lw=0.3, alpha=0.5)
    fig.tight_layout()
    fig.savefig(path, **_SAVEFIG_KWARGS)
    plt.close(fig)
