"""Diagonalization, absorption spectra, and polariton-state decomposition.

The absorption spectrum near the edge is a sum over the one-excitation
eigenstates p of |<p|mu|G,0>|^2 times a Lorentzian at the eigenvalue.
Each eigenstate can be decomposed into site and photon weights by
projecting onto the tagged basis states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hamiltonian import BlockBasis, BlockMatrix, dipole_operator, enumerate_basis, build_block
from .model import CavityConfig, LineshapeConfig, MoleculeModel, PHOTON_SITE

DEGENERACY_GAP = 1e-9  # eV; eigenvalues closer than this form one cluster


class NumericalError(RuntimeError):
    """Dense diagonalization failed to converge."""


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues (ascending, eV) and eigenvector columns of one block.

    ``basis`` is the generating BlockBasis; synthetic systems used for
    signal-level tests may set it to None.
    """

    m: int
    values: np.ndarray
    vectors: np.ndarray
    basis: BlockBasis | None = None

    @property
    def dim(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Spectrum1D:
    """A sampled signal on a uniform, strictly increasing frequency grid."""

    axis: np.ndarray  # eV
    values: np.ndarray
    metadata: dict

    def __post_init__(self):
        if len(self.axis) < 2 or not np.all(np.diff(self.axis) > 0):
            raise ValueError("frequency axis must be strictly increasing with >= 2 points")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("spectrum contains non-finite values")


@dataclass(frozen=True)
class Decomposition:
    """Per-eigenstate weights over the site tags plus the photon tag."""

    tags: tuple[str, ...]
    energies: np.ndarray
    weights: np.ndarray  # shape (n_states, n_tags), rows sum to 1

    def as_records(self) -> list[dict]:
        return [
            {
                "energy_ev": float(e),
                "weights": {t: float(w) for t, w in zip(self.tags, row)},
            }
            for e, row in zip(self.energies, self.weights)
        ]


def lorentzian(x, gamma):
    """Area-normalized Lorentzian of HWHM ``gamma``."""
    return (gamma / np.pi) / (x * x + gamma * gamma)


def diagonalize(block: BlockMatrix) -> EigenSystem:
    """Dense Hermitian eigensolve of one block with deterministic output.

    Eigenvalues are ascending.  Within a degenerate cluster (gap below
    1e-9 eV) the vectors are ordered by the basis index of their largest
    component, and every vector's global phase is fixed by making that
    component real positive.
    """
    h = block.matrix
    try:
        values, vectors = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"eigensolver failed on block {block.m} (dimension {h.shape[0]})"
        ) from exc

    # canonical order and phase inside degenerate clusters
    order = np.arange(len(values))
    start = 0
    for end in range(1, len(values) + 1):
        if end == len(values) or values[end] - values[end - 1] > DEGENERACY_GAP:
            if end - start > 1:
                cluster = order[start:end]
                pivot = [int(np.argmax(np.abs(vectors[:, c]))) for c in cluster]
                order[start:end] = cluster[np.argsort(pivot, kind="stable")]
            start = end
    values = values[order]
    vectors = vectors[:, order]

    for c in range(vectors.shape[1]):
        pivot = int(np.argmax(np.abs(vectors[:, c])))
        ref = vectors[pivot, c]
        if ref != 0:
            vectors[:, c] *= np.conj(ref) / abs(ref)

    residual = np.max(np.abs(h @ vectors - vectors * values[None, :])) if len(values) else 0.0
    if residual > 1e-9:
        raise NumericalError(
            f"eigen-residual {residual:.3e} eV on block {block.m} "
            f"(dimension {h.shape[0]})"
        )
    return EigenSystem(m=block.m, values=values, vectors=vectors, basis=block.basis)


def _one_excitation_strengths(model, cavity):
    basis = enumerate_basis(model, cavity, 1)
    es1 = diagonalize(build_block(model, cavity, basis, 1))
    mu01 = dipole_operator(model, cavity, basis, 0, 1)
    amps = es1.vectors.conj().T @ mu01[:, 0]
    return es1, np.abs(amps) ** 2


def stick_spectrum(model: MoleculeModel, cavity: CavityConfig):
    """One-excitation eigenvalues and their |<p|mu|G,0>|^2 strengths."""
    es1, strengths = _one_excitation_strengths(model, cavity)
    return es1.values.copy(), strengths


def xanes(
    model: MoleculeModel,
    cavity: CavityConfig,
    lineshape: LineshapeConfig,
    grid: tuple[float, float, int] = (280.0, 296.0, 1601),
    *,
    normalize: bool = True,
) -> Spectrum1D:
    """Linear absorption spectrum over the one-excitation block.

    Parameters
    ----------
    grid : (min, max, n_points)
        Uniform frequency grid in eV.
    normalize : bool
        Scale the maximum to 1 (default); False keeps raw dipole-squared
        units so integrals obey the oscillator-strength sum rule.

    Notes
    -----
    The external dipole conserves the photon number, so the bare
    one-photon state contributes only through mixing.  A grid that misses
    every resonance is recorded as a warning in the metadata, not an
    error.
    """
    lo, hi, n = grid
    if n < 2 or not hi > lo:
        raise ValueError(f"invalid grid {grid}")
    omegas = np.linspace(lo, hi, int(n))
    es1, strengths = _one_excitation_strengths(model, cavity)

    signal = np.zeros_like(omegas)
    for energy, strength in zip(es1.values, strengths):
        if strength > 0.0:
            signal += strength * lorentzian(omegas - energy, lineshape.gamma_e)

    warnings = []
    bright = es1.values[strengths > 0]
    if bright.size and (bright.max() < lo or bright.min() > hi):
        warnings.append("grid excludes every resonance")

    peak = signal.max()
    if normalize and peak > 0:
        signal = signal / peak

    metadata = {
        "signal": "xanes",
        "model_name": model.name,
        "omega_c_ev": cavity.omega_c,
        "g_ev_per_debye": cavity.g_coupling,
        "n_molecules": cavity.n_molecules,
        "gamma_e_ev": lineshape.gamma_e,
        "lineshape": lineshape.lineshape,
        "normalize": normalize,
        "warnings": warnings,
    }
    return Spectrum1D(axis=omegas, values=signal, metadata=metadata)


def decompose(eigensystem: EigenSystem, model: MoleculeModel) -> Decomposition:
    """Split each one-excitation eigenstate into site and photon weights.

    The weight of tag sigma is the summed |component|^2 over basis states
    carrying that tag; photon-carrying ground configurations collect under
    the reserved photon tag.  Weights are invariant under the eigenvector
    global phase and sum to one per state.
    """
    if eigensystem.m != 1:
        raise ValueError(f"decomposition is defined on block 1, got block {eigensystem.m}")
    if eigensystem.basis is None:
        raise ValueError("eigensystem carries no basis reference")
    states = eigensystem.basis.block(1)
    tags = model.sites + (PHOTON_SITE,)
    tag_index = {t: i for i, t in enumerate(tags)}
    rows = np.zeros((len(states), len(tags)))
    for b, state in enumerate(states):
        if state.kind == "ground" and state.photons >= 1:
            rows[b, tag_index[PHOTON_SITE]] = 1.0
        elif state.kind == "single":
            rows[b, tag_index[model.state(state.state_ids[0]).site]] = 1.0
    weights = (np.abs(eigensystem.vectors.T) ** 2) @ rows
    return Decomposition(tags=tags, energies=eigensystem.values.copy(), weights=weights)
