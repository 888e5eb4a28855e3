"""Command-line driver: load a model, compute signals, write spectra files.

Every numeric flag is in eV except the pulse delays, which are given in
attoseconds.  Flag > model file > built-in default.  Output files embed a
``# rerun:`` header line holding the fully resolved argument list, so a
run can be reproduced byte-for-byte from its own output.

Exit codes: 0 success, 1 usage error, 2 model validation error,
3 numerical failure.
"""

from __future__ import annotations

import concurrent.futures
import os
import shlex
import sys
from importlib import resources

import click
import numpy as np

from . import __version__
from . import fileio
from .model import ModelError, load_model, with_overrides
from .nonlinear import (
    PulseFilter,
    SINGLE_QUANTUM_GRID,
    TWO_QUANTUM_GRID,
    diagonalize_blocks,
    dqc_signal_21,
    dqc_signal_32,
    enumerate_pathways,
    pe_signal,
    tpa_spectrum,
)
from .spectra import NumericalError, decompose, diagonalize, stick_spectrum, xanes
from .hamiltonian import build_block, enumerate_basis
from .units import attoseconds_to_natural

OUTDIR_ENV = "COREPOL_OUTDIR"
_SWEEP_PARAMS = ("g", "omega-c", "gamma-e", "gamma-f")
_SWEEP_COMMANDS = ("xanes", "pe", "dqc21", "dqc32", "tpa")


def _parse_grid(value: str) -> tuple[float, float, int]:
    try:
        lo, hi, n = value.split(",")
        return float(lo), float(hi), int(n)
    except ValueError:
        raise click.UsageError(f"grid must be 'min,max,n', got '{value}'")


def _grid_cb(ctx, param, value):
    return _parse_grid(value) if value is not None else None


def _fmt_grid(grid) -> str:
    lo, hi, n = grid
    return f"{repr(float(lo))},{repr(float(hi))},{int(n)}"


def _resolve_model_path(value: str) -> str:
    if os.path.exists(value):
        return value
    name = value[:-5] if value.endswith(".toml") else value
    res = resources.files("corepol.data").joinpath(f"{name}.toml")
    if res.is_file():
        return str(res)
    raise click.UsageError(f"model file '{value}' not found")


def _output_path(output, default_name: str) -> str:
    if output:
        return output
    return os.path.join(os.environ.get(OUTDIR_ENV, "."), default_name)


def model_options(fn):
    opts = [
        click.option("--model", "model_path", required=True,
                     help="Model file (TOML) or the name of a bundled model."),
        click.option("--omega-c", type=float, default=None, help="Cavity frequency, eV."),
        click.option("--g", "g_coupling", type=float, default=None,
                     help="Cavity coupling constant, eV/Debye."),
        click.option("--n-max", type=int, default=None, help="Photon-number truncation."),
        click.option("--n-molecules", type=int, default=None, help="Number of molecules."),
        click.option("--gamma-e", type=float, default=None, help="g-e dephasing HWHM, eV."),
        click.option("--gamma-f", type=float, default=None, help="g-f/e-f dephasing HWHM, eV."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def output_options(default_format="csv"):
    def wrap(fn):
        fn = click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
                          default=default_format, show_default=True)(fn)
        fn = click.option("--output", "-o", default=None,
                          help=f"Output path (default: ${OUTDIR_ENV} or cwd).")(fn)
        return fn
    return wrap


def _load(model_path, omega_c, g_coupling, n_max, n_molecules, gamma_e, gamma_f):
    path = _resolve_model_path(model_path)
    model, cavity, lineshape = load_model(path)
    cavity, lineshape = with_overrides(
        cavity, lineshape, omega_c=omega_c, g_coupling=g_coupling, n_max=n_max,
        n_molecules=n_molecules, gamma_e=gamma_e, gamma_f=gamma_f,
    )
    return model, cavity, lineshape


def _effective_meta(command, model_path, model, cavity, lineshape) -> dict:
    return {
        "command": command,
        "model": model_path,
        "model_name": model.name,
        "omega_c_ev": cavity.omega_c,
        "g_ev_per_debye": cavity.g_coupling,
        "n_max": cavity.n_max,
        "n_molecules": cavity.n_molecules,
        "gamma_e_ev": lineshape.gamma_e,
        "gamma_f_ev": lineshape.gamma_f,
    }


def _base_rerun(meta) -> list[str]:
    return [
        meta["command"],
        "--model", meta["model"],
        "--omega-c", repr(float(meta["omega_c_ev"])),
        "--g", repr(float(meta["g_ev_per_debye"])),
        "--n-max", str(meta["n_max"]),
        "--n-molecules", str(meta["n_molecules"]),
        "--gamma-e", repr(float(meta["gamma_e_ev"])),
        "--gamma-f", repr(float(meta["gamma_f_ev"])),
    ]


@click.group()
@click.version_option(version=__version__, prog_name="corepol",
                      message=f"%(prog)s %(version)s (output schema {fileio.SCHEMA_VERSION})")
def cli():
    """Cavity-coupled core-excitation spectra."""


@cli.command(name="xanes")
@model_options
@output_options()
@click.option("--grid", callback=_grid_cb, default="280,296,1601", show_default=True,
              help="Frequency grid 'min,max,n' in eV.")
@click.option("--raw/--normalized", "raw", default=False, show_default=True,
              help="Keep raw dipole-squared units instead of scaling the maximum to 1.")
@click.option("--sticks", "sticks_path", default=None,
              help="Also write the stick spectrum (eigenvalue, strength) to this path.")
def xanes_cmd(model_path, omega_c, g_coupling, n_max, n_molecules, gamma_e, gamma_f,
              output, fmt, grid, raw, sticks_path):
    """Linear absorption spectrum over the one-excitation block."""
    model, cavity, lineshape = _load(model_path, omega_c, g_coupling, n_max,
                                     n_molecules, gamma_e, gamma_f)
    spectrum = xanes(model, cavity, lineshape, grid, normalize=not raw)
    meta = _effective_meta("xanes", model_path, model, cavity, lineshape)
    meta["grid_ev"] = _fmt_grid(grid)
    meta["normalize"] = not raw
    rerun = _base_rerun(meta) + ["--grid", _fmt_grid(grid),
                                 "--raw" if raw else "--normalized", "--format", fmt]
    meta["rerun"] = shlex.join(rerun)
    path = _output_path(output, f"xanes.{fmt}")
    if fmt == "csv":
        fileio.write_spectrum1d_csv(spectrum, path, meta)
    else:
        fileio.write_spectrum1d_json(spectrum, path, meta)
    if sticks_path:
        energies, strengths = stick_spectrum(model, cavity)
        fileio.write_sticks_csv(energies, strengths, sticks_path, meta)
    click.echo(path)


@cli.command(name="decompose")
@model_options
@output_options(default_format="json")
def decompose_cmd(model_path, omega_c, g_coupling, n_max, n_molecules, gamma_e, gamma_f,
                  output, fmt):
    """Site/photon weights of every one-excitation eigenstate."""
    model, cavity, lineshape = _load(model_path, omega_c, g_coupling, n_max,
                                     n_molecules, gamma_e, gamma_f)
    basis = enumerate_basis(model, cavity, 1)
    es1 = diagonalize(build_block(model, cavity, basis, 1))
    decomposition = decompose(es1, model)
    meta = _effective_meta("decompose", model_path, model, cavity, lineshape)
    rerun = _base_rerun(meta) + ["--format", fmt]
    meta["rerun"] = shlex.join(rerun)
    path = _output_path(output, f"decomposition.{fmt}")
    if fmt == "csv":
        fileio.write_decomposition_csv(decomposition, path, meta)
    else:
        fileio.write_decomposition_json(decomposition, path, meta)
    click.echo(path)


def _filter_options(fn):
    fn = click.option("--filter-bandwidth", type=float, default=20.0, show_default=True,
                      help="Full pulse bandwidth, eV ('inf' disables filtering).")(fn)
    fn = click.option("--filter-center", type=float, default=290.0, show_default=True,
                      help="Pulse central frequency, eV.")(fn)
    return fn


def _pathways(model, cavity, lineshape, signal, center, bandwidth):
    systems, dipoles = diagonalize_blocks(model, cavity, m_max=2)
    pf = PulseFilter(center=center, bandwidth=bandwidth)
    return enumerate_pathways(systems, dipoles, lineshape, signal, pf)


def _write_2d(spectrum, meta, output, fmt, default_name):
    path = _output_path(output, default_name)
    if fmt == "csv":
        fileio.write_spectrum2d_csv(spectrum, path, meta)
    else:
        fileio.write_spectrum2d_json(spectrum, path, meta)
    click.echo(path)


@cli.command(name="pe")
@model_options
@output_options()
@_filter_options
@click.option("--t2-as", type=float, default=0.0, show_default=True,
              help="Population delay in attoseconds.")
@click.option("--grid1", callback=_grid_cb, default="280,298,512", show_default=True)
@click.option("--grid3", callback=_grid_cb, default="280,298,512", show_default=True)
@click.option("--method", type=click.Choice(["analytic", "timedomain"]),
              default="analytic", show_default=True,
              help="Closed-form Lorentzians or the sampled-coherence validation route.")
def pe_cmd(model_path, omega_c, g_coupling, n_max, n_molecules, gamma_e, gamma_f,
           output, fmt, filter_center, filter_bandwidth, t2_as, grid1, grid3, method):
    """Photon-echo spectrum S(omega1, omega3) at fixed population delay."""
    model, cavity, lineshape = _load(model_path, omega_c, g_coupling, n_max,
                                     n_molecules, gamma_e, gamma_f)
    ps = _pathways(model, cavity, lineshape, "pe", filter_center, filter_bandwidth)
    spectrum = pe_signal(ps, attoseconds_to_natural(t2_as), grid1, grid3, method=method)
    meta = _effective_meta("pe", model_path, model, cavity, lineshape)
    meta.update({
        "filter_center_ev": filter_center, "filter_bandwidth_ev": filter_bandwidth,
        "t2_as": t2_as, "grid1_ev": _fmt_grid(grid1), "grid3_ev": _fmt_grid(grid3),
    })
    rerun = _base_rerun(meta) + [
        "--filter-center", repr(float(filter_center)),
        "--filter-bandwidth", repr(float(filter_bandwidth)),
        "--t2-as", repr(float(t2_as)),
        "--grid1", _fmt_grid(grid1), "--grid3", _fmt_grid(grid3),
        "--method", method, "--format", fmt,
    ]
    meta["rerun"] = shlex.join(rerun)
    _write_2d(spectrum, meta, output, fmt, f"pe.{fmt}")


@cli.command(name="dqc21")
@model_options
@output_options()
@_filter_options
@click.option("--t3-as", type=float, default=1e-5, show_default=True,
              help="Detection delay in attoseconds (tiny, to keep the two diagrams from cancelling).")
@click.option("--grid1", callback=_grid_cb, default="280,298,512", show_default=True)
@click.option("--grid2", callback=_grid_cb, default="560,596,512", show_default=True)
def dqc21_cmd(model_path, omega_c, g_coupling, n_max, n_molecules, gamma_e, gamma_f,
              output, fmt, filter_center, filter_bandwidth, t3_as, grid1, grid2):
    """Double-quantum spectrum S(omega1, omega2) at fixed detection delay."""
    model, cavity, lineshape = _load(model_path, omega_c, g_coupling, n_max,
                                     n_molecules, gamma_e, gamma_f)
    ps = _pathways(model, cavity, lineshape, "dqc", filter_center, filter_bandwidth)
    spectrum = dqc_signal_21(ps, attoseconds_to_natural(t3_as), grid1, grid2)
    meta = _effective_meta("dqc21", model_path, model, cavity, lineshape)
    meta.update({
        "filter_center_ev": filter_center, "filter_bandwidth_ev": filter_bandwidth,
        "t3_as": t3_as, "grid1_ev": _fmt_grid(grid1), "grid2_ev": _fmt_grid(grid2),
    })
    rerun = _base_rerun(meta) + [
        "--filter-center", repr(float(filter_center)),
        "--filter-bandwidth", repr(float(filter_bandwidth)),
        "--t3-as", repr(float(t3_as)),
        "--grid1", _fmt_grid(grid1), "--grid2", _fmt_grid(grid2), "--format", fmt,
    ]
    meta["rerun"] = shlex.join(rerun)
    _write_2d(spectrum, meta, output, fmt, f"dqc21.{fmt}")


@cli.command(name="dqc32")
@model_options
@output_options()
@_filter_options
@click.option("--t1-as", type=float, default=1e-5, show_default=True,
              help="First delay in attoseconds (tiny, to keep the two diagrams from cancelling).")
@click.option("--grid2", callback=_grid_cb, default="560,596,512", show_default=True)
@click.option("--grid3", callback=_grid_cb, default="280,298,512", show_default=True)
def dqc32_cmd(model_path, omega_c, g_coupling, n_max, n_molecules, gamma_e, gamma_f,
              output, fmt, filter_center, filter_bandwidth, t1_as, grid2, grid3):
    """Double-quantum spectrum S(omega2, omega3) at fixed first delay."""
    model, cavity, lineshape = _load(model_path, omega_c, g_coupling, n_max,
                                     n_molecules, gamma_e, gamma_f)
    ps = _pathways(model, cavity, lineshape, "dqc", filter_center, filter_bandwidth)
    spectrum = dqc_signal_32(ps, attoseconds_to_natural(t1_as), grid2, grid3)
    meta = _effective_meta("dqc32", model_path, model, cavity, lineshape)
    meta.update({
        "filter_center_ev": filter_center, "filter_bandwidth_ev": filter_bandwidth,
        "t1_as": t1_as, "grid2_ev": _fmt_grid(grid2), "grid3_ev": _fmt_grid(grid3),
    })
    rerun = _base_rerun(meta) + [
        "--filter-center", repr(float(filter_center)),
        "--filter-bandwidth", repr(float(filter_bandwidth)),
        "--t1-as", repr(float(t1_as)),
        "--grid2", _fmt_grid(grid2), "--grid3", _fmt_grid(grid3), "--format", fmt,
    ]
    meta["rerun"] = shlex.join(rerun)
    _write_2d(spectrum, meta, output, fmt, f"dqc32.{fmt}")


@cli.command(name="tpa")
@model_options
@output_options()
@click.option("--grid", callback=_grid_cb, default="280,296,1601", show_default=True)
@click.option("--raw/--normalized", "raw", default=False, show_default=True)
def tpa_cmd(model_path, omega_c, g_coupling, n_max, n_molecules, gamma_e, gamma_f,
            output, fmt, grid, raw):
    """Degenerate two-photon absorption versus the single-photon energy."""
    model, cavity, lineshape = _load(model_path, omega_c, g_coupling, n_max,
                                     n_molecules, gamma_e, gamma_f)
    systems, dipoles = diagonalize_blocks(model, cavity, m_max=2)
    spectrum = tpa_spectrum(systems, dipoles, lineshape, grid, normalize=not raw)
    meta = _effective_meta("tpa", model_path, model, cavity, lineshape)
    meta["grid_ev"] = _fmt_grid(grid)
    meta["normalize"] = not raw
    rerun = _base_rerun(meta) + ["--grid", _fmt_grid(grid),
                                 "--raw" if raw else "--normalized", "--format", fmt]
    meta["rerun"] = shlex.join(rerun)
    path = _output_path(output, f"tpa.{fmt}")
    if fmt == "csv":
        fileio.write_spectrum1d_csv(spectrum, path, meta)
    else:
        fileio.write_spectrum1d_json(spectrum, path, meta)
    click.echo(path)


def _sweep_item(payload):
    argv, out_path = payload
    rc = main(argv)
    if rc != 0:
        raise RuntimeError(f"sweep item failed with exit code {rc}: {shlex.join(argv)}")
    return out_path


@cli.command(name="sweep")
@model_options
@click.option("--param", type=click.Choice(_SWEEP_PARAMS), required=True,
              help="Parameter to scan.")
@click.option("--from", "start", type=float, required=True)
@click.option("--to", "stop", type=float, required=True)
@click.option("--steps", type=int, required=True)
@click.option("--command", "command", type=click.Choice(_SWEEP_COMMANDS), required=True)
@click.option("--outdir", default=None, help=f"Output directory (default: ${OUTDIR_ENV} or cwd).")
@click.option("--parallel", type=int, default=0, show_default=True,
              help="Worker processes; 0 runs serially.")
def sweep_cmd(model_path, omega_c, g_coupling, n_max, n_molecules, gamma_e, gamma_f,
              param, start, stop, steps, command, outdir, parallel):
    """Run one command over a linear parameter scan, one file per value."""
    if steps < 1:
        raise click.UsageError("--steps must be >= 1")
    outdir = outdir or os.environ.get(OUTDIR_ENV, ".")
    os.makedirs(outdir, exist_ok=True)
    base = []
    for flag, value in (("--omega-c", omega_c), ("--g", g_coupling),
                        ("--gamma-e", gamma_e), ("--gamma-f", gamma_f)):
        if value is not None:
            base += [flag, repr(float(value))]
    for flag, value in (("--n-max", n_max), ("--n-molecules", n_molecules)):
        if value is not None:
            base += [flag, str(int(value))]
    values = np.linspace(start, stop, steps)
    jobs = []
    for value in values:
        name = f"out_{param.replace('-', '_')}_{value:g}.csv"
        out_path = os.path.join(outdir, name)
        argv = ([command, "--model", model_path, "--output", out_path]
                + base + [f"--{param}", repr(float(value))])
        jobs.append((argv, out_path))
    # each item echoes its own output path
    if parallel > 0:
        with concurrent.futures.ProcessPoolExecutor(max_workers=parallel) as pool:
            list(pool.map(_sweep_item, jobs))
    else:
        for job in jobs:
            _sweep_item(job)


def main(argv=None) -> int:
    """Run the CLI without raising; returns the process exit code."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except ModelError as exc:
        click.echo(f"model error: {exc}", err=True)
        return 2
    except (NumericalError, np.linalg.LinAlgError) as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        return 3
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return 0


def entrypoint():
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    entrypoint()
