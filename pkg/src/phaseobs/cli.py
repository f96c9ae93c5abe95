"""Command-line surface.

Subcommands: build, eval, density, levy, uncertainty, sample, discretize,
converge, verify, qmargin.  JSON artifacts use [re, im] pairs for complex
entries; delimited output is RFC 4180 CSV.  When a report-style command
writes its data to --out, a matplotlib figure is rendered alongside it
(same stem, .png) unless --no-plot is given.  Exit codes: 0 success,
1 validation failure, 2 usage error.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import coherent, discrete, matrices, observables, plots, serialize, verify
from .circle import parse_set
from .fock import StateVector, coherent_vector, truncation_for
from .matrices import PhaseMatrix, PhaseMatrixError

DIM_OPTION = dict(
    type=int,
    default=64,
    show_default=True,
    envvar="PHASEOBS_DEFAULT_DIM",
    help="truncation dimension (env PHASEOBS_DEFAULT_DIM overrides the default)",
)

FAMILIES = "canonical|trivial|phase-space:<s>|rotated"


def _build_family(family: str, dim: int, seed: int) -> PhaseMatrix:
    name = family.strip().lower()
    if name == "canonical":
        return matrices.canonical(dim)
    if name == "trivial":
        return matrices.trivial(dim)
    if name == "rotated":
        rng = np.random.default_rng(seed)
        return matrices.diagonal_conjugate(
            matrices.canonical(dim), rng.uniform(0.0, 2.0 * math.pi, size=dim)
        )
    if name.startswith("phase-space"):
        parts = name.split(":")
        s = int(parts[1]) if len(parts) > 1 and parts[1] else 0
        return matrices.phase_space_matrix(s, dim)
    raise click.ClickException(f"unknown family {family!r} (expected {FAMILIES})")


def _resolve_matrix(matrix_path, family, dim, seed) -> PhaseMatrix:
    if matrix_path is not None:
        try:
            return serialize.load_phase_matrix(matrix_path)
        except (PhaseMatrixError, ValueError, KeyError, json.JSONDecodeError) as exc:
            raise click.ClickException(f"malformed matrix file {matrix_path}: {exc}")
    if family is None:
        raise click.UsageError("give either --matrix or --family")
    return _build_family(family, dim, seed)


def _parse_complex(text: str) -> complex:
    parts = text.split(",")
    if len(parts) != 2:
        raise click.UsageError(f"complex value {text!r} must be 're,im'")
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        raise click.UsageError(f"complex value {text!r} must be 're,im'")


def _parse_circle_set(text: str):
    try:
        return parse_set(text)
    except ValueError as exc:
        raise click.ClickException(f"invalid interval syntax: {exc}")


def _emit(text: str, out) -> None:
    if out is None:
        click.echo(text, nl=not text.endswith("\n"))
    else:
        Path(out).write_text(text, encoding="utf-8", newline="")


def _figure_path(out, plot, no_plot):
    if no_plot:
        return None
    if plot is not None:
        return plot
    if out is not None:
        return str(Path(out).with_suffix(".png"))
    return None


@click.group()
@click.version_option(package_name="phaseobs")
def main():
    """Covariant phase observables on truncated Fock spaces."""


@main.command()
@click.option("--family", required=True, help=f"one of {FAMILIES}")
@click.option("--dim", **DIM_OPTION)
@click.option("--seed", type=int, default=0, show_default=True, help="seed for the rotated family")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--plot", type=click.Path(dir_okay=False), default=None, help="render |entries| heatmap")
def build(family, dim, seed, out, plot):
    """Construct a phase matrix and emit it as JSON."""
    pm = _build_family(family, dim, seed)
    _emit(serialize.to_json(pm) + "\n", out)
    if plot:
        plots.matrix_figure(pm.entries, plot, title=pm.family or "")


@main.command("eval")
@click.option("--matrix", "matrix_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--family", default=None, help=f"one of {FAMILIES}")
@click.option("--dim", **DIM_OPTION)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--set", "set_text", required=True, help='circle set, e.g. "[0,pi);[3*pi/2,2*pi)"')
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--plot", type=click.Path(dir_okay=False), default=None)
def eval_command(matrix_path, family, dim, seed, set_text, out, plot):
    """Evaluate the observable's operator on a circle set (JSON)."""
    pm = _resolve_matrix(matrix_path, family, dim, seed)
    op = observables.evaluate(pm, _parse_circle_set(set_text))
    _emit(serialize.to_json(op) + "\n", out)
    if plot:
        plots.matrix_figure(op.entries, plot, title="E(X)")


@main.command()
@click.option("--matrix", "matrix_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--family", default=None)
@click.option("--dim", **DIM_OPTION)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--z", "z_text", required=True, help="coherent amplitude 're,im'")
@click.option("--grid", type=int, default=coherent.GRID_SIZE, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--plot", type=click.Path(dir_okay=False), default=None)
@click.option("--no-plot", is_flag=True, default=False)
def density(matrix_path, family, dim, seed, z_text, grid, fmt, out, plot, no_plot):
    """Coherent-state phase density on a uniform theta grid (CSV: theta,g)."""
    pm = _resolve_matrix(matrix_path, family, dim, seed)
    z = _parse_complex(z_text)
    try:
        dg = coherent.density_grid(pm, z, size=grid)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    if fmt == "csv":
        text = serialize.csv_text(["theta", "g"], zip(dg.thetas.tolist(), dg.values.tolist()))
    else:
        text = serialize.to_json(
            {"z": [z.real, z.imag], "theta": dg.thetas.tolist(), "g": dg.values.tolist()}
        ) + "\n"
    _emit(text, out)
    fig = _figure_path(out, plot, no_plot)
    if fig:
        plots.density_figure(dg.thetas, dg.values, fig)


@main.command()
@click.option("--matrix", "matrix_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--family", default=None)
@click.option("--dim", **DIM_OPTION)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--z", "z_text", required=True)
@click.option("--grid", type=int, default=coherent.GRID_SIZE, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def levy(matrix_path, family, dim, seed, z_text, grid, out):
    """Windowed-variance dispersion of the coherent-state density (JSON)."""
    pm = _resolve_matrix(matrix_path, family, dim, seed)
    z = _parse_complex(z_text)
    try:
        dg = coherent.density_grid(pm, z, size=grid)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    value = coherent.levy(dg)
    _emit(
        serialize.to_json({"z": [z.real, z.imag], "grid": grid, "levy": value}) + "\n",
        out,
    )


@main.command()
@click.option("--matrix", "matrix_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--family", default=None)
@click.option("--dim", **DIM_OPTION)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--z", "z_text", required=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def uncertainty(matrix_path, family, dim, seed, z_text, out):
    """Phase-number uncertainty product sqrt(levy) * |z| (JSON)."""
    pm = _resolve_matrix(matrix_path, family, dim, seed)
    z = _parse_complex(z_text)
    try:
        dg = coherent.density_grid(pm, z)
        value = coherent.levy(dg)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    product = math.sqrt(value) * abs(z)
    _emit(
        serialize.to_json(
            {
                "z": [z.real, z.imag],
                "levy": value,
                "delta_phase": math.sqrt(value),
                "delta_number": abs(z),
                "product": product,
            }
        )
        + "\n",
        out,
    )


@main.command()
@click.option("--matrix", "matrix_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--family", default=None)
@click.option("--dim", **DIM_OPTION)
@click.option("--z", "z_text", required=True)
@click.option("--count", type=int, default=10000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--plot", type=click.Path(dir_okay=False), default=None)
@click.option("--no-plot", is_flag=True, default=False)
def sample(matrix_path, family, dim, z_text, count, seed, out, plot, no_plot):
    """Draw phase outcomes by inverse CDF (CSV: index,theta)."""
    pm = _resolve_matrix(matrix_path, family, dim, seed)
    z = _parse_complex(z_text)
    try:
        draws = coherent.sample(pm, z, count, seed)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    text = serialize.csv_text(["index", "theta"], enumerate(draws.tolist()))
    _emit(text, out)
    fig = _figure_path(out, plot, no_plot)
    if fig:
        plots.sample_figure(draws, fig)


@main.command()
@click.option("--matrix", "matrix_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--family", default=None)
@click.option("--dim", **DIM_OPTION)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--s", "order", type=int, required=True, help="grid order (s+1 points)")
@click.option("--set", "set_text", required=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--plot", type=click.Path(dir_okay=False), default=None)
def discretize(matrix_path, family, dim, seed, order, set_text, out, plot):
    """Accumulate the grid-order-s discretization over a circle set (JSON)."""
    pm = _resolve_matrix(matrix_path, family, dim, seed)
    x = _parse_circle_set(set_text)
    pom = discrete.restrict_phase_matrix(pm, order)
    op = discrete.accumulate(pom, x, pm.dim)
    _emit(serialize.to_json(op) + "\n", out)
    if plot:
        plots.matrix_figure(op.entries, plot, title=f"discretized E(X), s={order}")


@main.command()
@click.option("--matrix", "matrix_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--family", default=None)
@click.option("--dim", **DIM_OPTION)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--set", "set_text", required=True)
@click.option("--s-list", "s_list", default="64,128,256,512", show_default=True)
@click.option("--entry", default="0,1", show_default=True, help="matrix entry n,m")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--plot", type=click.Path(dir_okay=False), default=None)
@click.option("--no-plot", is_flag=True, default=False)
def converge(matrix_path, family, dim, seed, set_text, s_list, entry, out, plot, no_plot):
    """Entrywise discretization error along a grid refinement (CSV: s,error)."""
    pm = _resolve_matrix(matrix_path, family, dim, seed)
    x = _parse_circle_set(set_text)
    try:
        orders = [int(v) for v in s_list.split(",") if v.strip()]
        n, m = (int(v) for v in entry.split(","))
    except ValueError:
        raise click.UsageError("--s-list must be integers and --entry must be 'n,m'")
    rows = []
    for s in orders:
        rows.append((s, discrete.convergence_error(pm, s, x, n, m)))
    _emit(serialize.csv_text(["s", "error"], rows), out)
    fig = _figure_path(out, plot, no_plot)
    if fig:
        plots.convergence_figure([r[0] for r in rows], [r[1] for r in rows], fig)


@main.command()
@click.option("--state", "state_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--coherent", "coherent_text", default=None, help="coherent amplitude 're,im'")
@click.option("--grid", type=int, default=256, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--plot", type=click.Path(dir_okay=False), default=None)
@click.option("--no-plot", is_flag=True, default=False)
def qmargin(state_path, coherent_text, grid, out, plot, no_plot):
    """Radial margin of the state's Husimi function (CSV: theta,q)."""
    if (state_path is None) == (coherent_text is None):
        raise click.UsageError("give exactly one of --state or --coherent")
    if state_path is not None:
        try:
            phi = serialize.load_state_vector(state_path)
        except (ValueError, KeyError, json.JSONDecodeError) as exc:
            raise click.ClickException(f"malformed state file {state_path}: {exc}")
    else:
        z = _parse_complex(coherent_text)
        phi = coherent_vector(z, truncation_for(z, 1e-12) + 4)
    if not phi.is_unit(1e-10):
        raise click.ClickException(f"state is not unit (norm {phi.norm():.12f})")
    thetas = 2.0 * math.pi * np.arange(grid) / grid
    values = coherent.q_margin(phi, thetas)
    _emit(serialize.csv_text(["theta", "q"], zip(thetas.tolist(), values.tolist())), out)
    fig = _figure_path(out, plot, no_plot)
    if fig:
        plots.qmargin_figure(thetas, values, fig)


@main.command("verify")
@click.argument("suites", nargs=-1, required=True)
@click.option("--dim", **DIM_OPTION)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--matrix", "matrix_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--plot", type=click.Path(dir_okay=False), default=None)
@click.option("--no-plot", is_flag=True, default=False)
def verify_command(suites, dim, seed, jobs, matrix_path, out, plot, no_plot):
    """Run verification suites; 'all' runs every one.  Fails with exit 1."""
    pm = None
    if matrix_path is not None:
        pm = _resolve_matrix(matrix_path, None, dim, seed)
    names = list(suites)
    if names == ["all"]:
        names = list(verify.SUITE_ORDER)
    try:
        names = [verify.resolve_suite_name(n) for n in names]
    except KeyError as exc:
        raise click.UsageError(str(exc.args[0]))
    config = verify.VerifyConfig(dim=dim, seed=seed, matrix=pm)
    results = verify.run_suites(names, config, jobs=jobs)
    report = [r.to_dict() for r in results]
    _emit(serialize.to_json(report) + "\n", out)
    fig = _figure_path(out, plot, no_plot)
    if fig:
        plots.verify_figure(results, fig)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        click.echo(f"{status} {r.suite} ({r.elapsed_ms} ms)", err=True)
    if not all(r.passed for r in results):
        sys.exit(1)


if __name__ == "__main__":
    main()
