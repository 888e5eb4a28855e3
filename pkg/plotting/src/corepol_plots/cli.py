"""Batch renderer for corepol output files.

Exit codes: 0 success, 1 usage error, 2 input contract violation.
"""

from __future__ import annotations

import sys

import click

from .contracts import ContractError
from .render import LAYOUTS, PlotSpec, render


@click.command()
@click.option("--layout", type=click.Choice(LAYOUTS), required=True)
@click.option("--out", "out_path", required=True, help="Output image (PNG/SVG by extension).")
@click.option("--scale", type=click.Choice(["linear", "log"]), default="linear",
              show_default=True, help="Color scale for heatmaps.")
@click.argument("inputs", nargs=-1, required=True)
def cli(layout, out_path, scale, inputs):
    """Render corepol CSV/JSON files as a figure."""
    path = render(PlotSpec(inputs=tuple(inputs), layout=layout, out=out_path, scale=scale))
    click.echo(path)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except ContractError as exc:
        click.echo(f"contract violation: {exc}", err=True)
        return 2
    except (ValueError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return 0


def entrypoint():
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    entrypoint()
