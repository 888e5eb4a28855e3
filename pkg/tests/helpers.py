"""Shared model builders, independent oracles, and peak extraction."""

import itertools
import math

import numpy as np

from corepol.model import (
    CavityConfig,
    DipoleTable,
    MolecularState,
    MoleculeModel,
)
from corepol.spectra import EigenSystem

QUANTA = {"G": 0, "E": 1, "F": 2}


def two_level_model(omega=290.0, mu=0.1):
    states = (
        MolecularState("g", "G", 0.0),
        MolecularState("e", "E", omega, site="X"),
    )
    return MoleculeModel("two-level", states, DipoleTable({("g", "e"): mu}))


def two_site_model(omega_a=285.5, omega_b=289.5, shift=0.0, mu_a=0.1, mu_b=0.1,
                   mu_af=None, mu_bf=None):
    """Two single-site excitations plus their combined double excitation.

    With shift=0 and factorizable dipoles (the defaults: mu_af = mu_b,
    mu_bf = mu_a) the two transitions are completely uncorrelated.
    """
    mu_af = mu_b if mu_af is None else mu_af
    mu_bf = mu_a if mu_bf is None else mu_bf
    states = (
        MolecularState("g", "G", 0.0),
        MolecularState("ea", "E", omega_a, site="A"),
        MolecularState("eb", "E", omega_b, site="B"),
        MolecularState("f", "F", omega_a + omega_b + shift, constituents=("ea", "eb")),
    )
    dipoles = DipoleTable({
        ("g", "ea"): mu_a,
        ("g", "eb"): mu_b,
        ("ea", "f"): mu_af,
        ("eb", "f"): mu_bf,
    })
    return MoleculeModel("two-site", states, dipoles)


def three_e_model():
    """Three E states on two sites plus two F states; generic couplings."""
    states = (
        MolecularState("g", "G", 0.0),
        MolecularState("ea", "E", 284.0, site="A"),
        MolecularState("eb", "E", 287.5, site="B"),
        MolecularState("ec", "E", 291.0, site="A"),
        MolecularState("fab", "F", 570.3, constituents=("ea", "eb")),
        MolecularState("fcb", "F", 579.9, constituents=("ec", "eb")),
    )
    dipoles = DipoleTable({
        ("g", "ea"): 0.12,
        ("g", "eb"): -0.08,
        ("g", "ec"): 0.1,
        ("ea", "fab"): 0.09,
        ("eb", "fab"): 0.11,
        ("ec", "fcb"): -0.1,
        ("eb", "fcb"): 0.07,
    })
    return MoleculeModel("three-e", states, dipoles)


def ladder_systems(omega=290.0, mu=0.1, anharmonicity=0.0, mu_ratio=math.sqrt(2.0)):
    """Synthetic eigensystems of a bare three-level ladder g-e-f."""
    es0 = EigenSystem(0, np.array([0.0]), np.eye(1, dtype=complex))
    es1 = EigenSystem(1, np.array([omega]), np.eye(1, dtype=complex))
    es2 = EigenSystem(2, np.array([2.0 * omega + anharmonicity]), np.eye(1, dtype=complex))
    mu01 = np.array([[mu]], dtype=complex)
    mu12 = np.array([[mu_ratio * mu]], dtype=complex)
    return (es0, es1, es2), (mu01, mu12)


# ---------------------------------------------------------------------------
# brute-force oracle in the unblocked product basis


def product_basis(model, n_mol, n_max):
    ids = [s.id for s in model.states]
    return [
        (cfg, n)
        for cfg in itertools.product(ids, repeat=n_mol)
        for n in range(n_max + 1)
    ]


def _raising_pairs(model):
    pairs = []
    for (a, b), mu in model.dipoles.entries.items():
        lo, hi = a, b
        if QUANTA[model.state(a).manifold] > QUANTA[model.state(b).manifold]:
            lo, hi = b, a
        pairs.append((lo, hi, mu))
    return pairs


def excitation_of(model, key):
    cfg, n = key
    return sum(QUANTA[model.state(s).manifold] for s in cfg) + n


def brute_force_hamiltonian(model, cavity):
    """Full RWA Hamiltonian over molecule-label x Fock product states."""
    basis = product_basis(model, cavity.n_molecules, cavity.n_max)
    index = {b: i for i, b in enumerate(basis)}
    h = np.zeros((len(basis), len(basis)), dtype=complex)
    pairs = _raising_pairs(model)
    g = cavity.g_coupling
    for (cfg, n), i in index.items():
        h[i, i] = sum(model.state(s).energy for s in cfg) + n * cavity.omega_c
        if n == 0:
            continue
        for mol, sid in enumerate(cfg):
            for lo, hi, mu in pairs:
                if sid != lo:
                    continue
                target = cfg[:mol] + (hi,) + cfg[mol + 1:]
                j = index[(target, n - 1)]
                elem = g * mu * np.sqrt(n)
                h[j, i] += elem
                h[i, j] += elem
    return basis, index, h


def brute_force_dipole(model, n_mol, n_max):
    """Photon-conserving external dipole over the same product basis."""
    basis = product_basis(model, n_mol, n_max)
    index = {b: i for i, b in enumerate(basis)}
    m = np.zeros((len(basis), len(basis)), dtype=complex)
    pairs = _raising_pairs(model)
    for (cfg, n), i in index.items():
        for mol, sid in enumerate(cfg):
            for lo, hi, mu in pairs:
                if sid != lo:
                    continue
                target = cfg[:mol] + (hi,) + cfg[mol + 1:]
                j = index[(target, n)]
                m[j, i] += mu
                m[i, j] += mu
    return basis, index, m


def collective_vector(model, n_mol, state, index, dim):
    """Express one blocked basis state as a product-basis column vector."""
    v = np.zeros(dim, dtype=complex)
    gid = model.ground.id
    ground = (gid,) * n_mol
    n = state.photons
    if state.kind == "ground":
        v[index[(ground, n)]] = 1.0
    elif state.kind in ("single", "double"):
        sid = state.state_ids[0]
        for mol in range(n_mol):
            cfg = ground[:mol] + (sid,) + ground[mol + 1:]
            if state.k_index is None:
                phase = 1.0
            else:
                phase = np.exp(2j * np.pi * state.k_index * mol / n_mol)
            v[index[(cfg, n)]] = phase / math.sqrt(n_mol)
    else:  # pair
        (a, b), (na, mb) = state.state_ids, state.molecules
        cfg = list(ground)
        cfg[na] = a
        cfg[mb] = b
        v[index[(tuple(cfg), n)]] = 1.0
    return v


def block_transform(model, n_mol, states, index, dim):
    return np.column_stack(
        [collective_vector(model, n_mol, s, index, dim) for s in states]
    )


# ---------------------------------------------------------------------------
# peak extraction


def local_maxima(values):
    return [
        i
        for i in range(1, len(values) - 1)
        if values[i] > values[i - 1] and values[i] >= values[i + 1]
    ]


def strongest_peaks_2d(spectrum, n, min_sep=0.5):
    """Greedy extraction of the n strongest well-separated |S| maxima."""
    mag = np.abs(spectrum.values)
    order = np.argsort(mag.ravel())[::-1]
    peaks = []
    for flat in order:
        i, j = np.unravel_index(flat, mag.shape)
        x, y = float(spectrum.axis1[i]), float(spectrum.axis2[j])
        if all(abs(x - px) > min_sep or abs(y - py) > min_sep for px, py, _ in peaks):
            peaks.append((x, y, float(mag[i, j])))
        if len(peaks) == n:
            break
    return peaks
