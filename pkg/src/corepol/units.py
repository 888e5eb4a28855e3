"""Unit conventions: energies in eV, times in hbar/eV (~0.658 fs)."""

HBAR_EV_FS = 0.6582119569  # hbar in eV*fs
ATTOSECONDS_PER_TIME_UNIT = 658.2119569  # attoseconds per hbar/eV


def attoseconds_to_natural(t_as: float) -> float:
    return t_as / ATTOSECONDS_PER_TIME_UNIT


def natural_to_attoseconds(t: float) -> float:
    return t * ATTOSECONDS_PER_TIME_UNIT
