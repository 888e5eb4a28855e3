"""Level-scheme model types and the TOML model-file loader.

A molecule is described by three manifolds: one ground state G, singly
core-excited states E (each localized on a tagged site), and doubly
core-excited states F built from two E excitations on *different* sites.
Transition dipoles are signed scalars (projection on the cavity
polarization axis) in Debye.  Energies are in eV with the ground state at
zero; the implied time unit is hbar/eV (~0.658 fs).

All types are immutable after loading and can be shared freely across
parallel workers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

# Reserved site tag for cavity quanta; molecular states may not use it.
PHOTON_SITE = "PHOTON"

DEFAULT_OMEGA_C = 290.0
DEFAULT_G_COUPLING = 0.0
DEFAULT_N_MAX = 2
DEFAULT_N_MOLECULES = 1
DEFAULT_GAMMA_E = 0.2
DEFAULT_GAMMA_F = 0.4


class ModelError(ValueError):
    """Base class for model-file problems."""


class ModelParseError(ModelError):
    """The file is not valid TOML or is missing/mistyping required keys."""


class ModelValidationError(ModelError):
    """The file parsed but violates a model invariant."""


@dataclass(frozen=True)
class MolecularState:
    """One level of the g/e/f scheme.

    ``site`` is required for E states; ``constituents`` holds the two
    E-state ids an F state is built from (distinct states on distinct
    sites -- same-site double excitations are excluded).
    """

    id: str
    manifold: str  # 'G' | 'E' | 'F'
    energy: float  # eV, ground fixed at 0
    site: str | None = None
    constituents: tuple[str, str] | None = None


@dataclass(frozen=True)
class DipoleTable:
    """Signed scalar transition dipoles in Debye, one entry per pair.

    Only G-E and E-F pairs are allowed.  The table stores a single
    orientation; lookups are symmetric (real dipoles).
    """

    entries: dict[tuple[str, str], float] = field(default_factory=dict)

    def mu(self, a: str, b: str) -> float:
        """Dipole between states ``a`` and ``b`` (0.0 if not listed)."""
        return self.entries.get((a, b), self.entries.get((b, a), 0.0))

    def pairs(self):
        return tuple(self.entries)


@dataclass(frozen=True)
class MoleculeModel:
    """A named level scheme plus its dipole table."""

    name: str
    states: tuple[MolecularState, ...]
    dipoles: DipoleTable

    def state(self, state_id: str) -> MolecularState:
        for s in self.states:
            if s.id == state_id:
                return s
        raise KeyError(state_id)

    @property
    def ground(self) -> MolecularState:
        return next(s for s in self.states if s.manifold == "G")

    @property
    def e_states(self) -> tuple[MolecularState, ...]:
        return tuple(s for s in self.states if s.manifold == "E")

    @property
    def f_states(self) -> tuple[MolecularState, ...]:
        return tuple(s for s in self.states if s.manifold == "F")

    @property
    def sites(self) -> tuple[str, ...]:
        """Site tags in first-appearance order over the E states."""
        seen: list[str] = []
        for s in self.e_states:
            if s.site not in seen:
                seen.append(s.site)
        return tuple(seen)

    def quartic_shift(self, f_id: str) -> float:
        """Energy of an F state minus the sum of its constituents' energies.

        A nonzero value means one core excitation shifts the other; zero
        means the two excitations are energetically independent.
        """
        f = self.state(f_id)
        ea, eb = (self.state(c) for c in f.constituents)
        return f.energy - (ea.energy + eb.energy)


@dataclass(frozen=True)
class CavityConfig:
    """Single cavity mode: frequency, per-dipole coupling, truncation."""

    omega_c: float  # eV
    g_coupling: float  # eV/Debye; the collective value scales as sqrt(N)
    n_max: int = DEFAULT_N_MAX
    n_molecules: int = DEFAULT_N_MOLECULES


@dataclass(frozen=True)
class LineshapeConfig:
    """Lorentzian HWHM dephasing widths for the coherence classes."""

    gamma_e: float = DEFAULT_GAMMA_E  # g-e coherences, eV
    gamma_f: float = DEFAULT_GAMMA_F  # g-f and e-f coherences, eV
    lineshape: str = "LORENTZIAN"


def _fail(msg: str) -> None:
    raise ModelValidationError(msg)


def validate_model(model: MoleculeModel) -> None:
    """Check every structural invariant; raise naming the offender."""
    ids = [s.id for s in model.states]
    for sid in ids:
        if ids.count(sid) > 1:
            _fail(f"duplicate state id '{sid}'")
    by_id = {s.id: s for s in model.states}

    ground = [s for s in model.states if s.manifold == "G"]
    if len(ground) != 1:
        _fail(f"expected exactly one G state, found {len(ground)}")
    if ground[0].energy != 0.0:
        _fail(f"ground state '{ground[0].id}' must have energy 0, got {ground[0].energy}")

    for s in model.states:
        if s.manifold not in ("G", "E", "F"):
            _fail(f"state '{s.id}': unknown manifold '{s.manifold}'")
        if s.manifold in ("E", "F") and not s.energy > 0.0:
            _fail(f"state '{s.id}': energy must be strictly positive, got {s.energy}")
        if s.manifold == "E":
            if not s.site:
                _fail(f"E state '{s.id}' is missing a site tag")
            if s.site == PHOTON_SITE:
                _fail(f"E state '{s.id}' uses the reserved site tag '{PHOTON_SITE}'")
        if s.manifold == "F":
            if s.constituents is None or len(s.constituents) != 2:
                _fail(f"F state '{s.id}' must list exactly two constituent E states")
            ca, cb = s.constituents
            if ca == cb:
                _fail(f"F state '{s.id}': constituents must be distinct")
            for c in (ca, cb):
                if c not in by_id:
                    _fail(f"F state '{s.id}' references unknown state '{c}'")
                if by_id[c].manifold != "E":
                    _fail(f"F state '{s.id}': constituent '{c}' is not an E state")
            if by_id[ca].site == by_id[cb].site:
                _fail(
                    f"F state '{s.id}': constituents '{ca}' and '{cb}' share site "
                    f"'{by_id[ca].site}' (same-site double excitations are excluded)"
                )

    seen_pairs = set()
    for (a, b), value in model.dipoles.entries.items():
        for ref in (a, b):
            if ref not in by_id:
                _fail(f"dipole ({a}, {b}) references unknown state '{ref}'")
        manifolds = {by_id[a].manifold, by_id[b].manifold}
        if manifolds not in ({"G", "E"}, {"E", "F"}):
            _fail(f"dipole ({a}, {b}): only G-E and E-F dipoles are allowed")
        key = frozenset((a, b))
        if key in seen_pairs:
            _fail(f"duplicate dipole entry for pair ({a}, {b})")
        seen_pairs.add(key)
        float(value)  # must be numeric


def validate_cavity(cavity: CavityConfig) -> None:
    if not cavity.omega_c > 0:
        _fail(f"cavity frequency must be positive, got {cavity.omega_c}")
    if cavity.g_coupling < 0:
        _fail(f"coupling constant must be non-negative, got {cavity.g_coupling}")
    if cavity.n_max < 2:
        _fail(f"photon truncation n_max must be >= 2, got {cavity.n_max}")
    if cavity.n_molecules < 1:
        _fail(f"n_molecules must be >= 1, got {cavity.n_molecules}")


def validate_lineshape(lineshape: LineshapeConfig) -> None:
    if not lineshape.gamma_e > 0:
        _fail(f"gamma_e must be positive, got {lineshape.gamma_e}")
    if not lineshape.gamma_f > 0:
        _fail(f"gamma_f must be positive, got {lineshape.gamma_f}")
    if lineshape.lineshape != "LORENTZIAN":
        _fail(f"unsupported lineshape '{lineshape.lineshape}'")


def _normalize_dipoles(raw: list[dict], by_id: dict[str, MolecularState]) -> DipoleTable:
    # store lower-manifold state first so equality is orientation-free
    rank = {"G": 0, "E": 1, "F": 2}
    entries: dict[tuple[str, str], float] = {}
    for d in raw:
        a, b = d["from"], d["to"]
        if a in by_id and b in by_id and rank.get(by_id[a].manifold, 9) > rank.get(by_id[b].manifold, 9):
            a, b = b, a
        if (a, b) in entries or (b, a) in entries:
            _fail(f"duplicate dipole entry for pair ({a}, {b})")
        entries[(a, b)] = float(d["value_debye"])
    return DipoleTable(entries)


def _parse_states(raw_states: list[dict]) -> tuple[MolecularState, ...]:
    states = []
    for raw in raw_states:
        try:
            sid = str(raw["id"])
            manifold = str(raw["manifold"])
            energy = float(raw["energy_ev"])
        except KeyError as exc:
            raise ModelParseError(f"state block is missing key {exc}") from exc
        constituents = raw.get("constituents")
        if constituents is not None:
            constituents = tuple(str(c) for c in constituents)
        states.append(
            MolecularState(
                id=sid,
                manifold=manifold,
                energy=energy,
                site=raw.get("site"),
                constituents=constituents,
            )
        )
    return tuple(states)


def load_model(path) -> tuple[MoleculeModel, CavityConfig, LineshapeConfig]:
    """Load and validate a model file.

    Parameters
    ----------
    path : str or Path
        TOML file with ``[model]``, ``[[state]]``, ``[[dipole]]`` and
        optional ``[cavity]`` / ``[lineshape]`` sections.

    Returns
    -------
    (MoleculeModel, CavityConfig, LineshapeConfig)

    Raises
    ------
    ModelParseError
        If the file is not valid TOML or lacks required keys.
    ModelValidationError
        If any invariant is violated; the message names the offender.
    """
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ModelParseError(f"{path}: {exc}") from exc

    try:
        name = str(doc["model"]["name"])
        states = _parse_states(doc.get("state", []))
    except (KeyError, TypeError) as exc:
        raise ModelParseError(f"{path}: missing or malformed section ({exc})") from exc
    if not states:
        raise ModelParseError(f"{path}: no [[state]] blocks")

    by_id = {s.id: s for s in states}
    dipoles = _normalize_dipoles(doc.get("dipole", []), by_id)
    model = MoleculeModel(name=name, states=states, dipoles=dipoles)

    cav = doc.get("cavity", {})
    cavity = CavityConfig(
        omega_c=float(cav.get("omega_c_ev", DEFAULT_OMEGA_C)),
        g_coupling=float(cav.get("g_ev_per_debye", DEFAULT_G_COUPLING)),
        n_max=int(cav.get("n_max", DEFAULT_N_MAX)),
        n_molecules=int(cav.get("n_molecules", DEFAULT_N_MOLECULES)),
    )
    ls = doc.get("lineshape", {})
    lineshape = LineshapeConfig(
        gamma_e=float(ls.get("gamma_e_ev", DEFAULT_GAMMA_E)),
        gamma_f=float(ls.get("gamma_f_ev", DEFAULT_GAMMA_F)),
    )

    validate_model(model)
    validate_cavity(cavity)
    validate_lineshape(lineshape)
    return model, cavity, lineshape


def _toml_str(s: str) -> str:
    return json.dumps(s)  # JSON string escaping is valid TOML


def _toml_float(x: float) -> str:
    text = repr(float(x))
    return text if ("." in text or "e" in text or "n" in text) else text + ".0"


def serialize_model(
    model: MoleculeModel, cavity: CavityConfig, lineshape: LineshapeConfig
) -> str:
    """Render the model back to TOML; ``load_model`` of the result is
    field-by-field identical to the inputs."""
    lines = ["[model]", f"name = {_toml_str(model.name)}", ""]
    for s in model.states:
        lines += ["[[state]]", f"id = {_toml_str(s.id)}", f"manifold = {_toml_str(s.manifold)}"]
        lines.append(f"energy_ev = {_toml_float(s.energy)}")
        if s.site is not None:
            lines.append(f"site = {_toml_str(s.site)}")
        if s.constituents is not None:
            inner = ", ".join(_toml_str(c) for c in s.constituents)
            lines.append(f"constituents = [{inner}]")
        lines.append("")
    for (a, b), value in model.dipoles.entries.items():
        lines += [
            "[[dipole]]",
            f"from = {_toml_str(a)}",
            f"to = {_toml_str(b)}",
            f"value_debye = {_toml_float(value)}",
            "",
        ]
    lines += [
        "[cavity]",
        f"omega_c_ev = {_toml_float(cavity.omega_c)}",
        f"g_ev_per_debye = {_toml_float(cavity.g_coupling)}",
        f"n_max = {cavity.n_max}",
        f"n_molecules = {cavity.n_molecules}",
        "",
        "[lineshape]",
        f"gamma_e_ev = {_toml_float(lineshape.gamma_e)}",
        f"gamma_f_ev = {_toml_float(lineshape.gamma_f)}",
        "",
    ]
    return "\n".join(lines)


def with_overrides(
    cavity: CavityConfig,
    lineshape: LineshapeConfig,
    *,
    omega_c: float | None = None,
    g_coupling: float | None = None,
    n_max: int | None = None,
    n_molecules: int | None = None,
    gamma_e: float | None = None,
    gamma_f: float | None = None,
) -> tuple[CavityConfig, LineshapeConfig]:
    """Apply optional overrides (e.g. CLI flags) and re-validate."""
    if omega_c is not None:
        cavity = replace(cavity, omega_c=omega_c)
    if g_coupling is not None:
        cavity = replace(cavity, g_coupling=g_coupling)
    if n_max is not None:
        cavity = replace(cavity, n_max=n_max)
    if n_molecules is not None:
        cavity = replace(cavity, n_molecules=n_molecules)
    if gamma_e is not None:
        lineshape = replace(lineshape, gamma_e=gamma_e)
    if gamma_f is not None:
        lineshape = replace(lineshape, gamma_f=gamma_f)
    validate_cavity(cavity)
    validate_lineshape(lineshape)
    return cavity, lineshape
