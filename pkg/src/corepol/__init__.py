"""corepol: cavity-coupled molecular core-excitation spectroscopy.

Builds excitation-number-blocked Hamiltonians for molecules coupled to a
single cavity mode, and computes linear absorption (with polariton-state
decomposition), photon-echo, double-quantum-coherence and two-photon
absorption signals by summation over the eigenstate pathways.
"""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    CavityConfig,
    DipoleTable,
    LineshapeConfig,
    ModelError,
    ModelParseError,
    ModelValidationError,
    MolecularState,
    MoleculeModel,
    PHOTON_SITE,
    load_model,
    serialize_model,
    with_overrides,
)
from .hamiltonian import (  # noqa: F401
    BasisSizeError,
    BasisState,
    BlockBasis,
    BlockMatrix,
    build_block,
    dipole_operator,
    enumerate_basis,
)
from .spectra import (  # noqa: F401
    Decomposition,
    EigenSystem,
    NumericalError,
    Spectrum1D,
    decompose,
    diagonalize,
    stick_spectrum,
    xanes,
)
from .nonlinear import (  # noqa: F401
    ALL_PASS,
    Pathway,
    PathwaySet,
    PulseFilter,
    Spectrum2D,
    diagonalize_blocks,
    dqc_signal_21,
    dqc_signal_32,
    eigen_dipoles,
    enumerate_pathways,
    pe_signal,
    tpa_spectrum,
)


def bundled_model_path(name: str = "difluoroethylene") -> str:
    """Filesystem path of a model file shipped with the package."""
    from importlib import resources

    res = resources.files("corepol.data").joinpath(f"{name}.toml")
    if not res.is_file():
        raise FileNotFoundError(f"no bundled model named '{name}'")
    return str(res)
