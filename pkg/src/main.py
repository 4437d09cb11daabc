"""Command line entry point of the covert-channel lab.

Run ``uv run src/main.py --help`` for the list of subcommands.
"""

import json
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path

import click
import yaml

from models.errors import SkydeError
from utils.analysis import SWEEP_GRID, analyze_traces, build_report, run_many, run_sweep, timeline_frame
from utils.config import dump_scenario, load_scenario, reseed
from utils.log_setup import configure_logging
from utils.report import (
    read_report,
    read_table,
    report_figures,
    reports_frame,
    sweep_figures,
    write_json,
    write_report,
    write_table,
)
from utils.scenario import run_scenario
from utils.trace_io import read_trace, write_trace
from utils.traffic_model import generate_call

FORMATS = click.Choice(["json", "csv"])


@contextmanager
def _cli_errors() -> Iterator[None]:
    try:
        yield
    except (SkydeError, OSError, yaml.YAMLError) as exc:
        raise click.ClickException(str(exc)) from exc


def _out_dir(out: str) -> Path:
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_metrics(out: Path, report, fmt: str) -> Path:
    if fmt == "json":
        target = out / "metrics.json"
        write_report(target, report)
    else:
        target = out / "metrics.csv"
        write_table(target, reports_frame([report]), "csv")
    return target


config_option = click.option(
    "--config", "config_path", type=click.Path(dir_okay=False), default=None, help="Scenario YAML file."
)
seed_option = click.option("--seed", type=click.IntRange(min=0), default=None, help="Master seed override.")
out_option = click.option("--out", default="results", show_default=True, help="Output directory.")
format_option = click.option("--format", "fmt", type=FORMATS, default="json", show_default=True)
parallel_option = click.option(
    "--parallel", type=click.IntRange(min=1), default=1, show_default=True, help="Worker processes."
)


@click.group()
@click.option("--log-level", default=None, help="Log level; defaults to $SKYDE_LOG or WARNING.")
def main(log_level: str | None):
    """Desk lab for a silence-packet covert channel in VoIP traffic."""
    configure_logging(log_level)


@main.command()
@config_option
@seed_option
@out_option
@click.option("--duration", type=float, default=None, help="Call duration in seconds (overrides the config).")
def generate(config_path: str | None, seed: int | None, out: str, duration: float | None):
    """Generate a cover trace from the traffic profile."""
    with _cli_errors():
        cfg = load_scenario(config_path, seed)
        trace = generate_call(cfg.profile, duration if duration is not None else cfg.duration_s)
        target = _out_dir(out) / "cover.jsonl"
        count = write_trace(target, trace)
    click.echo(f"wrote {count} packets to {target}")


@main.command()
@config_option
@seed_option
@out_option
@format_option
@click.option("--repeat", type=click.IntRange(min=1), default=1, show_default=True, help="Seeds to run.")
@parallel_option
def simulate(config_path: str | None, seed: int | None, out: str, fmt: str, repeat: int, parallel: int):
    """Simulate a call and write its traces, extracted secret and metrics.

    With --repeat K the seeds N..N+K-1 run as independent calls and only their
    metrics are written, one row per seed.
    """
    with _cli_errors():
        cfg = load_scenario(config_path, seed)
        target = _out_dir(out)
        if repeat > 1:
            seeds = [cfg.seed + offset for offset in range(repeat)]
            reports = run_many([reseed(cfg, value) for value in seeds], parallel)
            path = target / f"metrics_seeds.{fmt}"
            write_table(path, reports_frame(reports, seeds), fmt)
            click.echo(f"wrote metrics of {repeat} seeds to {path}")
            return

        result = run_scenario(cfg)
        (target / "scenario.yaml").write_text(dump_scenario(cfg), encoding="utf-8")
        write_trace(target / "cover.jsonl", result.generated)
        write_trace(target / "sent.jsonl", result.sent)
        write_trace(target / "delivered.jsonl", result.delivered)
        (target / "extracted.bin").write_bytes(result.extracted)
        write_table(target / "timeline.csv", timeline_frame(result), "csv")
        report = build_report(result)
        path = _write_metrics(target, report, fmt)
    click.echo(
        f"{len(result.generated)} packets, {result.stats.embedded} embedded, "
        f"{report.steg_bandwidth_bps:.1f} bit/s delivered; metrics in {path}"
    )


@main.command()
@click.argument("cover", type=click.Path(dir_okay=False))
@click.option("--stego", type=click.Path(dir_okay=False), default=None, help="Trace after embedding.")
@config_option
@click.option("--out", default=None, help="Output directory; prints JSON to stdout when omitted.")
@format_option
def analyze(cover: str, stego: str | None, config_path: str | None, out: str | None, fmt: str):
    """Compute metrics of recorded traces."""
    with _cli_errors():
        cfg = load_scenario(config_path)
        cover_trace = read_trace(cover)
        stego_trace = read_trace(stego) if stego else None
        report = analyze_traces(cover_trace, stego_trace, cfg.classifier, cfg.keys, cfg.epoch)
        if out is None:
            click.echo(json.dumps(report.to_dict(), indent=2, sort_keys=True))
            return
        path = _write_metrics(_out_dir(out), report, fmt)
    click.echo(f"metrics in {path}")


@main.command()
@config_option
@seed_option
@out_option
@format_option
@parallel_option
@click.option(
    "--grid",
    default=",".join(str(pct) for pct in SWEEP_GRID),
    show_default=True,
    help="Comma-separated utilizations in percent.",
)
def sweep(config_path: str | None, seed: int | None, out: str, fmt: str, parallel: int, grid: str):
    """Run the utilization sweep, one row per grid point."""
    try:
        points = [int(value) for value in grid.split(",") if value.strip()]
    except ValueError as exc:
        raise click.BadParameter(f"not a list of integers: {grid}", param_hint="--grid") from exc
    with _cli_errors():
        cfg = load_scenario(config_path, seed)
        frame = run_sweep(cfg, points, parallel)
        path = _out_dir(out) / f"sweep.{fmt}"
        write_table(path, frame, fmt)
    click.echo(f"wrote {len(frame)} sweep rows to {path}")


@main.command()
@click.argument("results", type=click.Path(file_okay=False, exists=True))
@format_option
@click.option("--figures", is_flag=True, default=False, help="Also write plot-ready figures.json.")
def report(results: str, fmt: str, figures: bool):
    """Re-emit the metrics and sweep found in RESULTS as JSON or CSV."""
    base = Path(results)
    written: list[Path] = []
    figure_docs: dict = {}
    with _cli_errors():
        if (base / "metrics.json").exists():
            metrics = read_report(base / "metrics.json")
            written.append(_write_metrics(base, metrics, fmt))
            if figures:
                figure_docs["call"] = report_figures(metrics)
        sweep_path = next((base / name for name in ("sweep.csv", "sweep.json") if (base / name).exists()), None)
        if sweep_path is not None:
            frame = read_table(sweep_path)
            written.append(base / f"sweep.{fmt}")
            write_table(written[-1], frame, fmt)
            if figures:
                figure_docs["sweep"] = sweep_figures(frame)
        if not written and not figure_docs:
            raise click.ClickException(f"no metrics.json or sweep table in {base}")
        if figures:
            written.append(base / "figures.json")
            write_json(written[-1], figure_docs)
    for path in written:
        click.echo(f"wrote {path}")


@main.command()
@click.argument("results", type=click.Path(file_okay=False, exists=True), default="results")
@click.option("--port", type=int, default=8080, show_default=True)
def dashboard(results: str, port: int):
    """Browse a results directory in the web dashboard."""
    from pages.routes import run_dashboard

    run_dashboard(Path(results), port=port)


if __name__ == "__main__":
    main()
