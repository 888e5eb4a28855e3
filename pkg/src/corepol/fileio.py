"""CSV and JSON writers for the documented output contracts.

Every text output starts with ``#`` metadata lines recording the
effective parameters of the run, then a column-name line, then data rows
formatted ``%.8e``.  Output is deterministic: fixed key order, fixed
float formatting, ``\\n`` newlines.
"""

from __future__ import annotations

import json

import numpy as np

from . import __version__
from .hamiltonian import BlockMatrix
from .nonlinear import Spectrum2D
from .spectra import Decomposition, Spectrum1D

SCHEMA_VERSION = 1


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (list, tuple)):
        return "; ".join(_fmt(v) for v in value)
    return str(value)


def _merged(spectrum_meta: dict | None, extra: dict | None) -> dict:
    merged = dict(extra) if extra else {}
    for key, val in (spectrum_meta or {}).items():
        if key not in merged:
            merged[key] = val
    return merged


def _write_header(fh, metadata: dict) -> None:
    fh.write(f"# corepol {__version__} schema={SCHEMA_VERSION}\n")
    for key, val in metadata.items():
        if val is None or (isinstance(val, (list, tuple)) and not val):
            continue
        fh.write(f"# {key}: {_fmt(val)}\n")


def read_metadata(path) -> dict[str, str]:
    """Parse the ``#`` header of any corepol CSV back into strings."""
    meta: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            body = line[1:].strip()
            if body.startswith("corepol "):
                meta["_producer"] = body
            elif ": " in body:
                key, val = body.split(": ", 1)
                meta[key] = val
    return meta


def write_spectrum1d_csv(spectrum: Spectrum1D, path, extra: dict | None = None) -> None:
    with open(path, "w", newline="\n") as fh:
        _write_header(fh, _merged(spectrum.metadata, extra))
        fh.write("omega_ev,intensity\n")
        data = np.column_stack([spectrum.axis, spectrum.values])
        np.savetxt(fh, data, fmt="%.8e", delimiter=",")


def write_spectrum2d_csv(spectrum: Spectrum2D, path, extra: dict | None = None) -> None:
    """Long-form rows ``axis1_ev,axis2_ev,re,im,abs``, axis1 slowest."""
    with open(path, "w", newline="\n") as fh:
        _write_header(fh, _merged(spectrum.metadata, extra))
        fh.write("axis1_ev,axis2_ev,re,im,abs\n")
        a1 = np.repeat(spectrum.axis1, len(spectrum.axis2))
        a2 = np.tile(spectrum.axis2, len(spectrum.axis1))
        flat = spectrum.values.reshape(-1)
        data = np.column_stack([a1, a2, flat.real, flat.imag, np.abs(flat)])
        np.savetxt(fh, data, fmt="%.8e", delimiter=",")


def write_sticks_csv(energies, strengths, path, extra: dict | None = None) -> None:
    with open(path, "w", newline="\n") as fh:
        _write_header(fh, _merged({"signal": "sticks"}, extra))
        fh.write("energy_ev,strength\n")
        np.savetxt(fh, np.column_stack([energies, strengths]), fmt="%.8e", delimiter=",")


def write_decomposition_csv(decomp: Decomposition, path, extra: dict | None = None) -> None:
    with open(path, "w", newline="\n") as fh:
        _write_header(fh, _merged({"signal": "decomposition", "tags": list(decomp.tags)}, extra))
        cols = ",".join(f"weight_{t}" for t in decomp.tags)
        fh.write(f"energy_ev,{cols}\n")
        data = np.column_stack([decomp.energies, decomp.weights])
        np.savetxt(fh, data, fmt="%.8e", delimiter=",")


def _json_meta(metadata: dict) -> dict:
    out = {}
    for key, val in metadata.items():
        if isinstance(val, (np.integer, np.floating)):
            val = val.item()
        out[key] = val
    return out


def _dump_json(payload: dict, path) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def write_spectrum1d_json(spectrum: Spectrum1D, path, extra: dict | None = None) -> None:
    _dump_json(
        {
            "producer": "corepol",
            "version": __version__,
            "schema": SCHEMA_VERSION,
            "kind": "spectrum1d",
            "metadata": _json_meta(_merged(spectrum.metadata, extra)),
            "axis_ev": spectrum.axis.tolist(),
            "values": spectrum.values.tolist(),
        },
        path,
    )


def write_spectrum2d_json(spectrum: Spectrum2D, path, extra: dict | None = None) -> None:
    """Axes arrays plus row-major (axis1 slowest) real/imaginary parts."""
    _dump_json(
        {
            "producer": "corepol",
            "version": __version__,
            "schema": SCHEMA_VERSION,
            "kind": "spectrum2d",
            "metadata": _json_meta(_merged(spectrum.metadata, extra)),
            "axis1_ev": spectrum.axis1.tolist(),
            "axis2_ev": spectrum.axis2.tolist(),
            "re": spectrum.values.real.reshape(-1).tolist(),
            "im": spectrum.values.imag.reshape(-1).tolist(),
        },
        path,
    )


def write_decomposition_json(decomp: Decomposition, path, extra: dict | None = None) -> None:
    _dump_json(
        {
            "producer": "corepol",
            "version": __version__,
            "schema": SCHEMA_VERSION,
            "kind": "decomposition",
            "metadata": _json_meta(extra or {}),
            "tags": list(decomp.tags),
            "states": decomp.as_records(),
        },
        path,
    )


def dump_block_csv(block: BlockMatrix, path) -> None:
    """Debug dump of one Hamiltonian block as (row, col, re, im) triplets."""
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# corepol {__version__} schema={SCHEMA_VERSION}\n")
        fh.write(f"# block: {block.m}\n")
        fh.write(f"# dimension: {block.matrix.shape[0]}\n")
        fh.write(f"# basis: {'; '.join(s.label for s in block.basis.block(block.m))}\n")
        fh.write("row,col,re,im\n")
        for i in range(block.matrix.shape[0]):
            for j in range(block.matrix.shape[1]):
                v = block.matrix[i, j]
                fh.write(f"{i},{j},{v.real:.8e},{v.imag:.8e}\n")
