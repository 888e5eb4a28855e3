"""Figure rendering for corepol spectra files."""

__version__ = "0.1.0"

from .contracts import (  # noqa: F401
    ContractError,
    DecompositionData,
    Spectrum1DData,
    Spectrum2DData,
    read_decomposition_json,
    read_spectrum1d_csv,
    read_spectrum2d,
    read_spectrum2d_csv,
    read_spectrum2d_json,
)
from .render import PlotSpec, render  # noqa: F401
