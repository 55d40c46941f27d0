"""Command-line front end: scenario sweeps, hedge sweeps, micro validation."""

from __future__ import annotations

import csv
import sys
from pathlib import Path

import click
import numpy as np

from . import micro, risk
from .errors import CdsnetError
from .scenarios import (
    Sector, builtin_scenario, hedge_sweep, parse_scenario, scenario_names,
)


def _load_spec(scenario, config):
    if (scenario is None) == (config is None):
        raise click.UsageError("provide exactly one of --scenario or --config")
    if scenario is not None:
        return builtin_scenario(scenario)
    return parse_scenario(Path(config).read_text())


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    click.echo(f"wrote {path}")


@click.group()
def main():
    """Credit-contagion simulator with CDS exposure channels."""


@main.command()
def catalog():
    """List the built-in scenarios."""
    for name in scenario_names():
        click.echo(name)


@main.command()
@click.option("--scenario", default=None, help="Built-in scenario name (see catalog).")
@click.option("--config", default=None, type=click.Path(exists=True),
              help="Scenario JSON document.")
@click.option("--xi0-points", default=risk.DEFAULT_XI0_POINTS, show_default=True)
@click.option("--bins", default=risk.DEFAULT_BINS, show_default=True)
@click.option("--out", default=".", type=click.Path(file_okay=False), show_default=True)
def run(scenario, config, xi0_points, bins, out):
    """Sweep the macro factor and write raw and density CSV products."""
    spec = _load_spec(scenario, config)
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    report = risk.sweep(spec, risk.Xi0Grid.make(xi0_points))
    tag = spec.name.replace("~", "t")

    _write_csv(outdir / f"{tag}_raw.csv", ["xi0", "L", "m"],
               zip(report.xi0, report.loss, report.m))
    for var in ("L", "m"):
        centers, dens = risk.density(report, var, bins)
        _write_csv(outdir / f"{tag}_density_{var}.csv", ["bin_center", "density"],
                   zip(centers, dens))
    click.echo(f"mean_m={report.mean_m:.6g} far_99={risk.far(report, 0.99):.6g} "
               f"var_99={risk.value_at_risk(report, 0.99):.6g}")


@main.command("sweep-hedge")
@click.option("--from", "f_from", default=0.0, show_default=True)
@click.option("--to", "f_to", default=1.0, show_default=True)
@click.option("--steps", default=11, show_default=True)
@click.option("--seller", default="B", type=click.Choice(["B", "I"]), show_default=True)
@click.option("--scenario", default="S0", show_default=True)
@click.option("--xi0-points", default=risk.DEFAULT_XI0_POINTS, show_default=True)
@click.option("--out", default="hedge_sweep.csv", type=click.Path(dir_okay=False),
              show_default=True)
def sweep_hedge(f_from, f_to, steps, seller, scenario, xi0_points, out):
    """Risk measures as a function of the hedged fraction of the loan book."""
    base = builtin_scenario(scenario)
    grid = risk.Xi0Grid.make(xi0_points)
    rows = []
    for f_h in np.linspace(f_from, f_to, steps):
        report = risk.sweep(hedge_sweep(base, float(f_h), Sector[seller]), grid)
        rows.append((f_h, report.mean_m, risk.far(report, 0.99),
                     risk.value_at_risk(report, 0.99)))
    _write_csv(Path(out), ["f_h", "mean_m", "far_99", "var_99"], rows)


@main.command()
@click.option("--scenario", default="S0", show_default=True)
@click.option("--nodes", default="20000,2000,2000", show_default=True,
              help="Sector sizes N_F,N_B,N_I.")
@click.option("--connectivity", default=32.0, show_default=True)
@click.option("--replicas", default=16, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--xi0", "xi0_values", multiple=True, default=(-2.0, 0.0, 2.0),
              type=float, show_default=True)
def validate(scenario, nodes, connectivity, replicas, seed, xi0_values):
    """Cross-validate the macro solver against the Monte Carlo oracle.

    Exits with status 2 if any observable deviates by more than four standard
    errors at any requested xi0.
    """
    spec = builtin_scenario(scenario)
    sizes = tuple(int(v) for v in nodes.split(","))
    if len(sizes) != 3:
        raise click.UsageError("--nodes expects three comma-separated sizes")
    from .macro import run_trajectory

    failed = False
    for xi0 in xi0_values:
        traj = run_trajectory(spec, xi0)
        est = micro.estimate_macro(spec, xi0, sizes=sizes, connectivity=connectivity,
                                   replicas=replicas, seed=seed)
        b = int(Sector.B)
        m_macro = float(traj.final_m[b])
        l_macro = float(traj.final_reported(Sector.B))
        dm = abs(est.m_mean[b, -1] - m_macro)
        dl = abs(est.loss_mean[b] - l_macro)
        ok_m = dm < 4 * est.m_se[b, -1]
        ok_l = dl < 4 * est.loss_se[b]
        failed |= not (ok_m and ok_l)
        click.echo(f"xi0={xi0:+.2f}  m: macro={m_macro:.5g} micro={est.m_mean[b, -1]:.5g} "
                   f"se={est.m_se[b, -1]:.2g} [{'ok' if ok_m else 'FAIL'}]  "
                   f"L: macro={l_macro:.5g} micro={est.loss_mean[b]:.5g} "
                   f"se={est.loss_se[b]:.2g} [{'ok' if ok_l else 'FAIL'}]")
    if failed:
        click.echo("validation FAILED")
        sys.exit(2)
    click.echo("validation passed")


def _entry():
    try:
        main()
    except CdsnetError as exc:  # uniform error reporting for the console script
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    _entry()
