"""Command line interface.

Global options come before the subcommand:

    altseq [--seed N] [--config PATH] [--out PATH] SUBCOMMAND ...

Exit codes: 0 success, 2 invalid input (arguments, schemas, domains),
3 numerical failure, 4 file system trouble.
"""

from __future__ import annotations

import csv
import json
import sys

import click
import numpy as np

from . import kernels
from .design import (cfg_from_dict, load_session, plan_next, prior_from_dict,
                     record_observation, save_session, _expect_keys)
from .errors import NumericalError, SchemaError, ValidationError
from .harness import (default_study, run_study, study_from_dict,
                      write_study_csvs)
from .likelihood import Dataset, Observation, ParamBounds, fit_mle
from .posterior import McmcSettings, bounds_from_prior, sample_posterior


@click.group()
@click.option("--seed", type=int, default=None,
              help="Override the seed recorded in session/study files.")
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="Planning config JSON (required by 'fit').")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Output destination: a directory for 'simulate', a file otherwise.")
@click.pass_context
def cli(ctx, seed, config_path, out_path):
    ctx.obj = {"seed": seed, "config": config_path, "out": out_path}


def _read_data_csv(path, cfg, stress_as_fraction: bool) -> Dataset:
    data = Dataset()
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["x", "t", "delta"]:
            raise ValidationError(
                f"{path}: expected header 'x,t,delta', got {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ValidationError(f"{path}:{lineno}: expected 3 columns, got {len(row)}")
            try:
                x = float(row[0])
                t = float(row[1])
                delta = int(row[2])
            except ValueError as exc:
                raise ValidationError(f"{path}:{lineno}: {exc}") from exc
            if stress_as_fraction:
                x *= cfg.sigma_ult
            data.append(Observation(x=x, t=t, delta=delta))
    return data


def _load_fit_config(path):
    if path is None:
        raise ValidationError("'fit' needs --config pointing at a planning config JSON")
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    _expect_keys(doc, ["format_version", "cfg"], ["prior", "bounds"], "config")
    if doc["format_version"] != 1:
        raise SchemaError(f"unsupported format_version {doc['format_version']!r}")
    cfg = cfg_from_dict(doc["cfg"])
    bounds = None
    if "bounds" in doc:
        b = doc["bounds"]
        _expect_keys(b, ["A", "B", "nu"], [], "config.bounds")
        try:
            bounds = ParamBounds(A=tuple(b["A"]), B=tuple(b["B"]), nu=tuple(b["nu"]))
        except (TypeError, ValidationError) as exc:
            raise SchemaError(f"config.bounds: {exc}") from exc
    elif "prior" in doc:
        bounds = bounds_from_prior(prior_from_dict(doc["prior"]))
    return cfg, bounds


@cli.command()
@click.argument("data_csv", type=click.Path(exists=False))
@click.option("--stress-as-fraction", is_flag=True,
              help="Interpret the x column as a fraction of sigma_ult.")
@click.pass_context
def fit(ctx, data_csv, stress_as_fraction):
    """Maximum likelihood fit of (A, B, nu) to a lifetime CSV."""
    cfg, bounds = _load_fit_config(ctx.obj["config"])
    data = _read_data_csv(data_csv, cfg, stress_as_fraction)
    report = fit_mle(data, cfg, bounds)
    click.echo(str(report))
    if ctx.obj["out"]:
        payload = {"A": report.params.A, "B": report.params.B,
                   "nu": report.params.nu, "log_lik": report.log_lik,
                   "converged": report.converged,
                   "boundary": list(report.boundary), "nfev": report.nfev}
        with open(ctx.obj["out"], "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
        click.echo(f"report written to {ctx.obj['out']}")


def _chain_settings(session, sweeps, burn_in, thin):
    base = session.mcmc if session.mcmc is not None else McmcSettings()
    return McmcSettings(
        n_sweeps=sweeps if sweeps is not None else base.n_sweeps,
        n_burn=burn_in if burn_in is not None else base.n_burn,
        thin=thin if thin is not None else base.thin,
        adapt_every=base.adapt_every)


@cli.command()
@click.option("--session", "session_path", type=click.Path(), required=True)
@click.option("--sweeps", type=int, default=None)
@click.option("--burn-in", type=int, default=None)
@click.option("--thin", type=int, default=None)
@click.pass_context
def posterior(ctx, session_path, sweeps, burn_in, thin):
    """Sample the posterior for a session's data and summarize it."""
    session = load_session(session_path)
    settings = _chain_settings(session, sweeps, burn_in, thin)
    seed = ctx.obj["seed"] if ctx.obj["seed"] is not None else session.seed
    draws = sample_posterior(session.observations, session.prior, session.cfg,
                             settings, np.random.SeedSequence(entropy=seed))
    mean = draws.mean()
    click.echo(f"draws    : {len(draws)} (backend {kernels.BACKEND})")
    click.echo(f"mean A   : {mean.A:.6g}   sd {np.std(draws.A):.3g}")
    click.echo(f"mean B   : {mean.B:.6g}   sd {np.std(draws.B):.3g}")
    click.echo(f"mean nu  : {mean.nu:.6g}   sd {np.std(draws.nu):.3g}")
    click.echo("accept   : " + ", ".join(f"{r:.3f}" for r in draws.accept_rates))
    if ctx.obj["out"]:
        with open(ctx.obj["out"], "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["A", "B", "nu"])
            for a, b, nu in draws.theta():
                w.writerow([repr(float(a)), repr(float(b)), repr(float(nu))])
        click.echo(f"draws written to {ctx.obj['out']}")


@cli.command(name="next-point")
@click.option("--session", "session_path", type=click.Path(), required=True)
@click.option("--sweeps", type=int, default=None)
@click.option("--burn-in", type=int, default=None)
@click.option("--thin", type=int, default=None)
@click.pass_context
def next_point_cmd(ctx, session_path, sweeps, burn_in, thin):
    """Recommend the next stress level and update the session file."""
    session = load_session(session_path)
    settings = _chain_settings(session, sweeps, burn_in, thin)
    record, table, _ = plan_next(session, settings,
                                 seed_entropy=ctx.obj["seed"])
    q = record.stress / session.cfg.sigma_ult
    click.echo(f"run {record.run} ({record.criterion.value}-criterion), "
               f"candidates by stress:")
    for i, row in enumerate(table.rows):
        mark = " <-- recommended" if i == table.chosen_index else ""
        note = " [unreliable]" if row.unreliable else ""
        click.echo(f"  x = {row.stress:10.3f}  value = {row.value: .6e}  "
                   f"skipped {row.n_skipped}/{row.n_draws}{note}{mark}")
    click.echo(f"recommended stress: {record.stress:.6f} "
               f"({q:.4f} of sigma_ult)")
    save_session(session, session_path)


@cli.command()
@click.option("--session", "session_path", type=click.Path(), required=True)
@click.option("--stress", type=float, required=True)
@click.option("--time", "time_", type=float, required=True,
              help="Observed cycles (the censoring time if censored).")
@click.option("--censored/--failed", default=False)
@click.option("--stress-as-fraction", is_flag=True)
@click.pass_context
def record(ctx, session_path, stress, time_, censored, stress_as_fraction):
    """Record the observation for the pending recommendation."""
    session = load_session(session_path)
    if stress_as_fraction:
        stress *= session.cfg.sigma_ult
    obs = Observation(x=stress, t=time_, delta=1 if censored else 0)
    stored = record_observation(session, obs)
    for msg in session.warnings:
        click.echo(f"warning: {msg}", err=True)
    save_session(session, session_path)
    state = "censored" if stored.delta else "failure"
    click.echo(f"recorded {state} at stress {stored.x:.6f} "
               f"({session.runs_done}/{session.schedule.n_total} runs done)")


@cli.command()
@click.option("--study", "study_path", type=click.Path(), default=None,
              help="Study JSON; omit to run the built-in benchmark study.")
@click.option("--trials", type=int, default=None,
              help="Override the number of trials per strategy.")
@click.option("--quiet", is_flag=True)
@click.pass_context
def simulate(ctx, study_path, trials, quiet):
    """Simulate sequential campaigns and write the result CSVs."""
    from dataclasses import replace

    if ctx.obj["out"] is None:
        raise ValidationError("'simulate' needs --out DIRECTORY")
    if study_path is not None:
        with open(study_path, "r", encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{study_path}: not valid JSON ({exc})") from exc
        study = study_from_dict(doc)
    else:
        study = default_study()
    if trials is not None:
        study = replace(study, n_trials=trials)
    if ctx.obj["seed"] is not None:
        study = replace(study, seed=ctx.obj["seed"])

    def progress(label, t_idx):
        if not quiet:
            click.echo(f"strategy {label}: trial {t_idx + 1}/{study.n_trials}",
                       err=True)

    result = run_study(study, progress=progress)
    paths = write_study_csvs(result, ctx.obj["out"])
    for p in paths:
        click.echo(p)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        return 2
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
