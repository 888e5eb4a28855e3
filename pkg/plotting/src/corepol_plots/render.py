"""Figure layouts for corepol spectra files.

Three layouts: stacked absorption panels with one trace per file, stacked
site/photon bar charts per eigenstate, and 2D signal heatmaps with
optional log color scale and marked maxima.
"""

from __future__ import annotations

from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import LogNorm  # noqa: E402

from .contracts import (  # noqa: E402
    DecompositionData,
    Spectrum1DData,
    Spectrum2DData,
    read_decomposition_json,
    read_spectrum1d_csv,
    read_spectrum2d,
)

LAYOUTS = ("xanes-panel", "decomposition", "heatmap")

TAG_COLORS = ("#e6b422", "#7b4b94", "#8c5a3c", "#4878a8", "#5a9c6e")


@dataclass(frozen=True)
class PlotSpec:
    inputs: tuple[str, ...]
    layout: str  # one of LAYOUTS
    out: str
    scale: str = "linear"  # heatmap color scale: 'linear' | 'log'

    def __post_init__(self):
        if self.layout not in LAYOUTS:
            raise ValueError(f"unknown layout '{self.layout}'")
        if self.scale not in ("linear", "log"):
            raise ValueError(f"unknown color scale '{self.scale}'")
        if not self.inputs:
            raise ValueError("no input files")


def _coupling_label(metadata: dict) -> str:
    g = metadata.get("g_ev_per_debye")
    return f"g = {g} eV/D" if g is not None else ""


def render_xanes_panel(spectra: list[Spectrum1DData], out: str) -> None:
    fig, axes = plt.subplots(
        len(spectra), 1, sharex=True, figsize=(5.0, 1.6 * len(spectra) + 0.8), squeeze=False
    )
    for ax, spec in zip(axes[:, 0], spectra):
        ax.plot(spec.axis, spec.values, lw=1.2, color="#333333")
        ax.fill_between(spec.axis, spec.values, alpha=0.25, color="#4878a8")
        ax.set_ylabel("intensity")
        label = _coupling_label(spec.metadata)
        if label:
            ax.text(0.98, 0.82, label, transform=ax.transAxes, ha="right", fontsize=9)
    axes[-1, 0].set_xlabel("energy (eV)")
    title = spectra[0].metadata.get("model_name", "")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)


def render_decomposition(decomp: DecompositionData, out: str) -> None:
    n_states = len(decomp.energies)
    x = np.arange(n_states)
    fig, ax = plt.subplots(figsize=(max(4.0, 0.7 * n_states + 1.5), 3.2))
    bottom = np.zeros(n_states)
    for t, tag in enumerate(decomp.tags):
        ax.bar(x, decomp.weights[:, t], bottom=bottom,
               color=TAG_COLORS[t % len(TAG_COLORS)], label=tag, width=0.7)
        bottom += decomp.weights[:, t]
    ax.set_xticks(x)
    ax.set_xticklabels([f"{e:.2f}" for e in decomp.energies], rotation=45, fontsize=8)
    ax.set_xlabel("eigenstate energy (eV)")
    ax.set_ylabel("weight")
    ax.set_ylim(0, 1.02)
    ax.legend(fontsize=8, loc="upper right")
    label = _coupling_label(decomp.metadata)
    model = decomp.metadata.get("model_name", "")
    ax.set_title(" ".join(s for s in (model, label) if s), fontsize=10)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)


def _marked_maxima(mag, axis1, axis2, n=4, min_sep=0.5):
    order = np.argsort(mag.ravel())[::-1]
    peaks = []
    for flat in order:
        i, j = np.unravel_index(flat, mag.shape)
        x, y = float(axis1[i]), float(axis2[j])
        if all(abs(x - px) > min_sep or abs(y - py) > min_sep for px, py in peaks):
            peaks.append((x, y))
        if len(peaks) == n:
            break
    return peaks


def render_heatmap(spectrum: Spectrum2DData, out: str, scale: str = "linear",
                   mark_peaks: bool = True) -> None:
    mag = np.abs(spectrum.values)
    top = mag.max() or 1.0
    mag_plot = mag / top
    fig, ax = plt.subplots(figsize=(5.2, 4.4))
    if scale == "log":
        floor = 1e-4
        norm = LogNorm(vmin=floor, vmax=1.0)
        mesh = ax.pcolormesh(spectrum.axis1, spectrum.axis2,
                             np.clip(mag_plot, floor, None).T, norm=norm, cmap="magma",
                             shading="auto")
    else:
        mesh = ax.pcolormesh(spectrum.axis1, spectrum.axis2, mag_plot.T,
                             cmap="magma", shading="auto")
    fig.colorbar(mesh, ax=ax, label="|S| (normalized)")
    if mark_peaks:
        for x, y in _marked_maxima(mag, spectrum.axis1, spectrum.axis2):
            ax.plot(x, y, "+", color="#00d0c0", ms=10, mew=1.5)
    ax.set_xlabel(spectrum.metadata.get("axis1_name", "axis1 (eV)"))
    ax.set_ylabel(spectrum.metadata.get("axis2_name", "axis2 (eV)"))
    signal = spectrum.metadata.get("signal", "")
    label = _coupling_label(spectrum.metadata)
    ax.set_title(" ".join(s for s in (signal, label) if s), fontsize=10)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)


def render(spec: PlotSpec) -> str:
    """Render one figure from already-written corepol files; returns the
    output path.  Inputs are opened read-only and never modified."""
    if spec.layout == "xanes-panel":
        spectra = [read_spectrum1d_csv(p) for p in spec.inputs]
        render_xanes_panel(spectra, spec.out)
    elif spec.layout == "decomposition":
        if len(spec.inputs) != 1:
            raise ValueError("decomposition layout takes exactly one input file")
        render_decomposition(read_decomposition_json(spec.inputs[0]), spec.out)
    else:
        if len(spec.inputs) != 1:
            raise ValueError("heatmap layout takes exactly one input file")
        render_heatmap(read_spectrum2d(spec.inputs[0]), spec.out, scale=spec.scale)
    return spec.out
