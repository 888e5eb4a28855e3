"""Strict readers for the corepol output contracts.

The renderer never alters its inputs and never coerces malformed data:
any mismatch raises ContractError naming the offending file and column.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

SPECTRUM1D_COLUMNS = "omega_ev,intensity"
SPECTRUM2D_COLUMNS = "axis1_ev,axis2_ev,re,im,abs"
STICKS_COLUMNS = "energy_ev,strength"


class ContractError(ValueError):
    """An input file does not follow the documented format."""


@dataclass(frozen=True)
class Spectrum1DData:
    path: str
    metadata: dict
    axis: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class Spectrum2DData:
    path: str
    metadata: dict
    axis1: np.ndarray
    axis2: np.ndarray
    values: np.ndarray  # complex, shape (len(axis1), len(axis2))


@dataclass(frozen=True)
class DecompositionData:
    path: str
    metadata: dict
    tags: tuple[str, ...]
    energies: np.ndarray
    weights: np.ndarray  # (n_states, n_tags)


def _split_header(path) -> tuple[dict, list[str]]:
    metadata: dict = {}
    rows: list[str] = []
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    for line in lines:
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("corepol "):
                metadata["_producer"] = body
            elif ": " in body:
                key, val = body.split(": ", 1)
                metadata[key] = val
        elif line:
            rows.append(line)
    return metadata, rows


def _parse_table(path, rows, expected_columns) -> np.ndarray:
    if not rows:
        raise ContractError(f"{path}: no data rows")
    if rows[0] != expected_columns:
        raise ContractError(
            f"{path}: expected columns '{expected_columns}', found '{rows[0]}'"
        )
    n_cols = len(expected_columns.split(","))
    data = []
    for lineno, row in enumerate(rows[1:], start=2):
        parts = row.split(",")
        if len(parts) != n_cols:
            raise ContractError(f"{path}: row {lineno} has {len(parts)} columns, expected {n_cols}")
        try:
            data.append([float(p) for p in parts])
        except ValueError as exc:
            raise ContractError(f"{path}: row {lineno}: {exc}") from exc
    return np.array(data)


def read_spectrum1d_csv(path) -> Spectrum1DData:
    metadata, rows = _split_header(path)
    if not rows:
        raise ContractError(f"{path}: no data rows")
    if rows[0] in (SPECTRUM1D_COLUMNS, STICKS_COLUMNS):
        columns = rows[0]
    else:
        raise ContractError(
            f"{path}: expected columns '{SPECTRUM1D_COLUMNS}' or "
            f"'{STICKS_COLUMNS}', found '{rows[0]}'"
        )
    table = _parse_table(path, rows, columns)
    axis, values = table[:, 0], table[:, 1]
    if columns == SPECTRUM1D_COLUMNS and not np.all(np.diff(axis) > 0):
        raise ContractError(f"{path}: column omega_ev must be strictly increasing")
    return Spectrum1DData(path=str(path), metadata=metadata, axis=axis, values=values)


def read_spectrum2d_csv(path) -> Spectrum2DData:
    metadata, rows = _split_header(path)
    table = _parse_table(path, rows, SPECTRUM2D_COLUMNS)
    axis1 = np.unique(table[:, 0])
    axis2 = np.unique(table[:, 1])
    if len(axis1) * len(axis2) != len(table):
        raise ContractError(
            f"{path}: rows do not fill the axis1_ev x axis2_ev grid "
            f"({len(table)} rows for {len(axis1)}x{len(axis2)})"
        )
    order = np.lexsort((table[:, 1], table[:, 0]))
    sorted_rows = table[order]
    values = (sorted_rows[:, 2] + 1j * sorted_rows[:, 3]).reshape(len(axis1), len(axis2))
    stated = np.abs(sorted_rows[:, 4])
    if not np.allclose(np.abs(values).ravel(), stated, rtol=1e-6, atol=1e-12):
        raise ContractError(f"{path}: column abs is inconsistent with re and im")
    return Spectrum2DData(path=str(path), metadata=metadata, axis1=axis1, axis2=axis2, values=values)


def read_spectrum2d_json(path) -> Spectrum2DData:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("kind") != "spectrum2d":
        raise ContractError(f"{path}: expected kind 'spectrum2d', found '{doc.get('kind')}'")
    axis1 = np.asarray(doc["axis1_ev"], dtype=float)
    axis2 = np.asarray(doc["axis2_ev"], dtype=float)
    re, im = np.asarray(doc["re"], dtype=float), np.asarray(doc["im"], dtype=float)
    if len(re) != len(axis1) * len(axis2) or len(im) != len(re):
        raise ContractError(f"{path}: re/im arrays do not match the axes")
    values = (re + 1j * im).reshape(len(axis1), len(axis2))
    return Spectrum2DData(path=str(path), metadata=doc.get("metadata", {}),
                          axis1=axis1, axis2=axis2, values=values)


def read_decomposition_json(path) -> DecompositionData:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("kind") != "decomposition":
        raise ContractError(f"{path}: expected kind 'decomposition', found '{doc.get('kind')}'")
    tags = tuple(doc.get("tags", ()))
    if not tags:
        raise ContractError(f"{path}: missing tags")
    states = doc.get("states", [])
    if not states:
        raise ContractError(f"{path}: missing states")
    energies, weights = [], []
    for i, state in enumerate(states):
        try:
            energies.append(float(state["energy_ev"]))
            weights.append([float(state["weights"][t]) for t in tags])
        except KeyError as exc:
            raise ContractError(f"{path}: state {i} is missing column {exc}") from exc
    return DecompositionData(path=str(path), metadata=doc.get("metadata", {}),
                             tags=tags, energies=np.array(energies), weights=np.array(weights))


def read_spectrum2d(path) -> Spectrum2DData:
    return read_spectrum2d_json(path) if str(path).endswith(".json") else read_spectrum2d_csv(path)
