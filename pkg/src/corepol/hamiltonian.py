"""Excitation-number-blocked cavity-molecule Hamiltonians.

Under the rotating-wave approximation the total excitation number
(molecular quanta plus photons) is conserved, so the Hamiltonian splits
into blocks m = 0, 1, 2.  For several identical molecules the single- and
double-excitation sectors are expressed in collective wavevector states
E(alpha,k) and F(mu,k), k = 2*pi*j/N; only the symmetric k = 0 state
couples to the ground state (with a sqrt(N)-enhanced matrix element),
while the excited-to-doubly-excited couplings act at every k.  Two-exciton
states on *different* molecules are kept as localized pair states; each
pair couples to its two single-excitation parents through the coupling
strength of the partner transition, the only excitation-conserving
assignment.

Block construction is a pure function of immutable inputs; different
blocks may be built and diagonalized in parallel.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .model import CavityConfig, MoleculeModel

_QUANTA = {"ground": 0, "single": 1, "double": 2, "pair": 2}


class BasisSizeError(ValueError):
    """A requested basis exceeds the configured dimension limits."""


@dataclass(frozen=True)
class BasisState:
    """One product state: a molecular part plus a photon Fock number.

    ``kind`` is 'ground', 'single' (one E quantum, collective for N > 1),
    'double' (an F state, collective for N > 1) or 'pair' (two E quanta on
    two different molecules, kept localized).  ``k_index`` is the integer
    j of the collective wavevector k = 2*pi*j/N and is None for N = 1 and
    for ground/pair states.
    """

    kind: str
    state_ids: tuple[str, ...]
    photons: int
    energy0: float  # bare molecular energy, eV
    k_index: int | None = None
    molecules: tuple[int, ...] = ()  # pair states only: (n, m), n < m

    @property
    def quanta(self) -> int:
        return _QUANTA[self.kind]

    @property
    def excitation(self) -> int:
        return self.quanta + self.photons

    @property
    def label(self) -> str:
        if self.kind == "ground":
            mol = "G"
        elif self.kind == "pair":
            (a, b), (n, m) = self.state_ids, self.molecules
            mol = f"{a}({n}){b}({m})"
        elif self.k_index is None:
            mol = self.state_ids[0]
        else:
            mol = f"{self.state_ids[0]}@k{self.k_index}"
        return f"{mol}+{self.photons}ph"


@dataclass(frozen=True)
class BlockBasis:
    """Ordered basis states grouped by total excitation number."""

    n_molecules: int
    blocks: dict[int, tuple[BasisState, ...]]

    def block(self, m: int) -> tuple[BasisState, ...]:
        return self.blocks[m]

    def size(self, m: int) -> int:
        return len(self.blocks[m])


@dataclass(frozen=True)
class BlockMatrix:
    """Dense Hermitian Hamiltonian of one excitation block, in eV."""

    m: int
    matrix: np.ndarray
    basis: BlockBasis


def enumerate_basis(
    model: MoleculeModel,
    cavity: CavityConfig,
    m_max: int,
    *,
    max_dim: int = 4096,
    pair_molecule_limit: int = 4,
) -> BlockBasis:
    """Enumerate the product basis for excitation blocks 0..m_max.

    Ordering is deterministic: within a block, molecular-excitation-rich
    states come first (photon number ascending), and within each photon
    group states are sorted by bare energy, then label.

    Parameters
    ----------
    m_max : int
        Highest excitation block, 1 or 2.
    max_dim : int
        Hard cap on any single block dimension.
    pair_molecule_limit : int
        Two-exciton pair states scale as N^2 * (E count)^2, so block 2 is
        refused beyond this molecule count.

    Raises
    ------
    BasisSizeError
        Reporting the required versus allowed size.
    """
    if m_max not in (1, 2):
        raise ValueError(f"m_max must be 1 or 2, got {m_max}")
    n_mol = cavity.n_molecules
    k_range: tuple[int | None, ...] = (None,) if n_mol == 1 else tuple(range(n_mol))
    e_states = model.e_states

    blocks: dict[int, tuple[BasisState, ...]] = {
        0: (BasisState("ground", (), 0, 0.0),)
    }

    def photon_group(states: list[BasisState]) -> list[BasisState]:
        return sorted(states, key=lambda s: (s.energy0, s.label))

    singles = [
        BasisState("single", (e.id,), 0, e.energy, k_index=k)
        for e in e_states
        for k in k_range
    ]
    block1 = photon_group(singles) + [BasisState("ground", (), 1, 0.0)]
    blocks[1] = tuple(block1)

    if m_max == 2:
        if n_mol > 1 and n_mol > pair_molecule_limit:
            raise BasisSizeError(
                f"two-excitation block requires pair states for {n_mol} molecules; "
                f"allowed at most {pair_molecule_limit}"
            )
        doubles = [
            BasisState("double", (f.id,), 0, f.energy, k_index=k)
            for f in model.f_states
            for k in k_range
        ]
        pairs = [
            BasisState(
                "pair",
                (ea.id, eb.id),
                0,
                ea.energy + eb.energy,
                molecules=(n, m),
            )
            for n in range(n_mol)
            for m in range(n + 1, n_mol)
            for ea in e_states
            for eb in e_states
        ]
        one_photon = [
            BasisState("single", (e.id,), 1, e.energy, k_index=k)
            for e in e_states
            for k in k_range
        ]
        block2 = (
            photon_group(doubles + pairs)
            + photon_group(one_photon)
            + [BasisState("ground", (), 2, 0.0)]
        )
        blocks[2] = tuple(block2)

    for m, states in blocks.items():
        if len(states) > max_dim:
            raise BasisSizeError(
                f"block {m} requires dimension {len(states)}, allowed {max_dim}"
            )
    return BlockBasis(n_molecules=n_mol, blocks=blocks)


def _phase(k_index: int | None, molecule: int, n_mol: int) -> complex:
    if k_index is None:
        return 1.0
    return cmath.exp(2j * math.pi * k_index * molecule / n_mol)


def collective_raising_element(
    model: MoleculeModel, n_mol: int, upper: BasisState, lower: BasisState
) -> complex:
    """Matrix element <upper| sum_n mu^(n) |lower> of the collective dipole,
    for molecular parts differing by exactly one quantum (photons ignored).

    Returns 0 for every non-matching pair; in particular the dark
    collective states (k != 0) are not reachable from the ground state.
    """
    mu = model.dipoles.mu
    if lower.kind == "ground" and upper.kind == "single":
        if n_mol == 1:
            return mu(model.ground.id, upper.state_ids[0])
        if upper.k_index == 0:
            return math.sqrt(n_mol) * mu(model.ground.id, upper.state_ids[0])
        return 0.0
    if lower.kind == "single" and upper.kind == "double":
        if lower.k_index != upper.k_index:
            return 0.0
        return mu(lower.state_ids[0], upper.state_ids[0])
    if lower.kind == "single" and upper.kind == "pair":
        gid = model.ground.id
        (a, b), (na, mb) = upper.state_ids, upper.molecules
        out = 0.0 + 0.0j
        # the pair is reached from whichever slot matches the single
        # excitation, by creating the partner slot's transition
        if b == lower.state_ids[0]:
            out += mu(gid, a) * _phase(lower.k_index, mb, n_mol) / math.sqrt(n_mol)
        if a == lower.state_ids[0]:
            out += mu(gid, b) * _phase(lower.k_index, na, n_mol) / math.sqrt(n_mol)
        return out
    return 0.0


def build_block(
    model: MoleculeModel, cavity: CavityConfig, basis: BlockBasis, m: int
) -> BlockMatrix:
    """Assemble the dense Hermitian Hamiltonian of excitation block m.

    Diagonal entries are the bare energies (molecular energy plus
    photons * omega_c).  Off-diagonal entries couple states whose photon
    numbers differ by one, with strength g * mu * sqrt(n_photons) of the
    photon-richer state; every term conserves the excitation number.
    """
    states = basis.block(m)
    d = len(states)
    h = np.zeros((d, d), dtype=complex)
    g = cavity.g_coupling
    n_mol = basis.n_molecules
    for i, a in enumerate(states):
        h[i, i] = a.energy0 + a.photons * cavity.omega_c
        for j in range(i + 1, d):
            b = states[j]
            if a.photons == b.photons + 1 and b.quanta == a.quanta + 1:
                elem = g * collective_raising_element(model, n_mol, b, a) * math.sqrt(a.photons)
            elif b.photons == a.photons + 1 and a.quanta == b.quanta + 1:
                elem = g * collective_raising_element(model, n_mol, a, b) * math.sqrt(b.photons)
            else:
                continue
            h[i, j] = np.conj(elem)
            h[j, i] = elem
    return BlockMatrix(m=m, matrix=h, basis=basis)


def dipole_operator(
    model: MoleculeModel,
    cavity: CavityConfig,
    basis: BlockBasis,
    m_from: int,
    m_to: int,
) -> np.ndarray:
    """Transition-dipole matrix between two adjacent excitation blocks.

    Element [i, j] is <to_i| sum_n mu^(n) |from_j> in Debye.  External
    pulses do not change the photon number, so only pairs with equal
    photon numbers and molecular quanta differing by one are nonzero;
    ground-to-bright elements carry the sqrt(N) collective factor.
    """
    if abs(m_to - m_from) != 1:
        raise ValueError(f"blocks must differ by one excitation, got {m_from} -> {m_to}")
    src = basis.block(m_from)
    dst = basis.block(m_to)
    n_mol = basis.n_molecules
    out = np.zeros((len(dst), len(src)), dtype=complex)
    for j, b in enumerate(src):
        for i, a in enumerate(dst):
            if a.photons != b.photons:
                continue
            if a.quanta == b.quanta + 1:
                out[i, j] = collective_raising_element(model, n_mol, a, b)
            elif b.quanta == a.quanta + 1:
                out[i, j] = np.conj(collective_raising_element(model, n_mol, b, a))
    return out
