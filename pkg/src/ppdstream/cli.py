"""Command-line interface: dataset replay, grid search, explanation batches,
surrogate data generation, and the session HTTP service.

Exit codes: 0 success, 1 runtime failure, 2 usage / IO error.
"""

from __future__ import annotations

import csv
import sys
from collections import Counter
from pathlib import Path

import click
import numpy as np

from . import __version__
from .checkpoint import Checkpoint, checkpoint_from_selector, load_checkpoint, save_checkpoint
from .counterfactual import counterfactual, eligible_for_explanation, render_explanation, NotFound
from .encoding import encode_record
from .evaluation import (
    REPORT_COLUMNS,
    balanced_downsample,
    grid_search,
    prequential_run,
)
from .learners import GRIDS, KINDS, make_learner
from .records import load_schema_mapping, parse_dataset, ParseError
from .selection import SelectorConfig


def _load_records(dataset: str, mapping_path: str, *, balanced: bool, seed: int | None,
                  keep_na: bool):
    with open(mapping_path) as fh:
        mapping = load_schema_mapping(fh)
    with open(dataset, newline="") as fh:
        records = parse_dataset(fh, mapping, require_label=True, drop_na=not keep_na)
    if balanced:
        records = balanced_downsample(records, seed)
    return records


def _echo_table(rows: list[list[str]]) -> None:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    for row in rows:
        click.echo("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))


def _write_report(out: Path, rows: list[list[str]]) -> None:
    with open(out.with_suffix(".csv"), "w", newline="") as fh:
        csv.writer(fh).writerows(rows)
    with open(out.with_suffix(".txt"), "w") as fh:
        widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
        for row in rows:
            fh.write("  ".join(cell.ljust(w) for cell, w in zip(row, widths)) + "\n")


@click.group()
@click.version_option(__version__, prog_name="ppd")
def main():
    """Stream-based postpartum-depression screening toolkit."""


dataset_opt = click.option("--dataset", required=True, type=click.Path(exists=True, dir_okay=False))
mapping_opt = click.option("--mapping", required=True, type=click.Path(exists=True, dir_okay=False))
seed_opt = click.option("--seed", type=int, default=1)
balanced_opt = click.option("--balanced", is_flag=True, default=False)
cold_opt = click.option("--cold-start-fraction", type=click.FloatRange(0, 1, min_open=True), default=0.10)
pct_opt = click.option("--percentile", type=click.FloatRange(0, 100), default=5.0)
keep_na_opt = click.option("--keep-na", is_flag=True, default=False,
                           help="Keep rows with NA responses (excluded by default).")


@main.command()
@dataset_opt
@mapping_opt
@click.option("--model", type=click.Choice(KINDS), default="arfc")
@seed_opt
@balanced_opt
@cold_opt
@pct_opt
@keep_na_opt
@click.option("--checkpoint-out", type=click.Path(dir_okay=False), default=None,
              help="Save the trained model + frozen selector here.")
@click.option("--out", type=click.Path(dir_okay=False), default="report",
              help="Report file stem; writes <out>.csv and <out>.txt.")
def replay(dataset, mapping, model, seed, balanced, cold_start_fraction, percentile,
           keep_na, checkpoint_out, out):
    """Prequential test-then-train replay of a labeled dataset."""
    try:
        records = _load_records(dataset, mapping, balanced=balanced, seed=seed,
                                keep_na=keep_na)
        learner = make_learner(model, seed=seed)
        config = SelectorConfig(percentile=percentile, cold_start_fraction=cold_start_fraction)
        result = prequential_run(records, learner, config)
    except (ParseError, ValueError) as exc:
        raise click.ClickException(str(exc))
    rows = [REPORT_COLUMNS, result.report.row(model.upper())]
    _echo_table(rows)
    click.echo(f"threshold={result.threshold:.4f}  samples_scored={result.report.samples_processed}")
    _write_report(Path(out), rows)
    if checkpoint_out:
        save_checkpoint(checkpoint_out, checkpoint_from_selector(model, result.learner, result.selector))
        click.echo(f"checkpoint written to {checkpoint_out}")


@main.command()
@dataset_opt
@mapping_opt
@click.option("--model", type=click.Choice(KINDS), required=True)
@seed_opt
@balanced_opt
@cold_opt
@pct_opt
@keep_na_opt
@click.option("--out", type=click.Path(dir_okay=False), default="grid_report")
def grid(dataset, mapping, model, seed, balanced, cold_start_fraction, percentile,
         keep_na, out):
    """Hyperparameter grid search (one prequential run per grid point)."""
    if model not in GRIDS:
        raise click.ClickException(f"no hyperparameter grid for {model!r} (baseline model)")
    try:
        records = _load_records(dataset, mapping, balanced=balanced, seed=seed,
                                keep_na=keep_na)
        config = SelectorConfig(percentile=percentile, cold_start_fraction=cold_start_fraction)
        best, points = grid_search(model, records, seed, selector_config=config)
    except (ParseError, ValueError) as exc:
        raise click.ClickException(str(exc))
    rows = [["Config"] + REPORT_COLUMNS[1:]]
    for point in points:
        rows.append([str(point.config)] + point.report.row(model.upper())[1:])
    _echo_table(rows)
    click.echo(f"best: {best}")
    _write_report(Path(out), rows)


@main.command()
@click.option("--checkpoint", "checkpoint_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@dataset_opt
@mapping_opt
@click.option("--n-iterations", type=click.IntRange(min=1), default=100)
@seed_opt
@keep_na_opt
def explain(checkpoint_path, dataset, mapping, n_iterations, seed, keep_na):
    """Counterfactual explanations for every eligible (>80%) sample."""
    try:
        ckpt: Checkpoint = load_checkpoint(checkpoint_path)
        records = _load_records(dataset, mapping, balanced=False, seed=seed,
                                keep_na=keep_na)
    except (ParseError, ValueError) as exc:
        raise click.ClickException(str(exc))
    rng = np.random.default_rng(seed)
    change_counts: Counter[str] = Counter()
    n_eligible = 0
    for i, record in enumerate(records):
        sample = ckpt.transform(encode_record(record))
        proba = ckpt.learner.predict_proba_one(sample)
        if not eligible_for_explanation(proba):
            continue
        n_eligible += 1
        predicted = proba[True] > proba[False]
        result = counterfactual(
            ckpt.learner, record, predicted, n_iterations=n_iterations,
            rng=rng, transform=ckpt.transform,
        )
        click.echo(f"--- sample {i} ---")
        if isinstance(result, NotFound):
            click.echo("no counterfactual found within the iteration budget")
            continue
        change_counts.update(result.relevant_features)
        click.echo(render_explanation(record, result, predicted, proba[predicted]))
    click.echo("")
    click.echo(f"eligible samples: {n_eligible} / {len(records)}")
    click.echo("feature-change frequencies:")
    for feature, count in change_counts.most_common():
        click.echo(f"  {feature}: {count}")


@main.command()
@click.option("--out", type=click.Path(dir_okay=False), default="surrogate_survey.csv")
@click.option("--mapping-out", type=click.Path(dir_okay=False), default="surrogate_mapping.ini")
@click.option("--n-total", type=int, default=1491)
@click.option("--n-absence", type=int, default=523)
@click.option("--seed", type=int, default=20240524)
def synth(out, mapping_out, n_total, n_absence, seed):
    """Generate the surrogate survey table and its schema mapping."""
    from .records import serialize_dataset
    from .synthetic import generate_records, surrogate_mapping, surrogate_mapping_text

    records = generate_records(n_total=n_total, n_absence=n_absence, seed=seed)
    Path(out).write_text(serialize_dataset(records, surrogate_mapping()))
    Path(mapping_out).write_text(surrogate_mapping_text())
    click.echo(f"wrote {len(records)} rows to {out}; mapping to {mapping_out}")


@main.command()
@click.option("--checkpoint", "checkpoint_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--serve-port", type=int, default=8000)
@click.option("--mock-backend", is_flag=True, default=False,
              help="Use the offline deterministic backend instead of the remote API.")
def serve(checkpoint_path, serve_port, mock_backend):
    """Run the session HTTP API."""
    import uvicorn

    from .dialogue import MockChatBackend, RemoteChatBackend
    from .service import ScreeningService, create_app

    ckpt = load_checkpoint(checkpoint_path)
    backend = MockChatBackend() if mock_backend else RemoteChatBackend()
    app = create_app(ScreeningService(checkpoint=ckpt, backend=backend))
    uvicorn.run(app, host="127.0.0.1", port=serve_port)


if __name__ == "__main__":
    sys.exit(main())
