"""Command line interface: ingest, rank, frames, serve, export, query, synth."""

from __future__ import annotations

import json
from pathlib import Path
from zoneinfo import ZoneInfo

import click

from .config import EngineConfig, default_config, load_config
from .engine import AnalysisEngine
from .events import ConfigError, IngestError, Window, parse_log
from .filters import FilterSyntaxError
from .frames import save_visualization
from .store import EventStore
from .synthetic import generate_case_study


class AppContext:
    def __init__(self, config_path: str | None, store_path: str, window: str | None) -> None:
        try:
            self.config: EngineConfig = load_config(config_path) if config_path else default_config()
        except ConfigError as exc:
            raise click.ClickException(str(exc)) from exc
        try:
            self.window = Window.parse(window) if window else None
        except ValueError as exc:
            raise click.ClickException(f"bad window: {exc}") from exc
        self.store_path = store_path
        self._engine: AnalysisEngine | None = None

    @property
    def tz(self) -> ZoneInfo | None:
        return ZoneInfo(self.config.timezone) if self.config.timezone else None

    @property
    def engine(self) -> AnalysisEngine:
        if self._engine is None:
            self._engine = AnalysisEngine(EventStore(self.store_path), self.config, self.window)
        return self._engine


@click.group()
@click.option(
    "--config",
    "config_path",
    envvar="FRAUDLENS_CONFIG",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="Engine configuration JSON (env: FRAUDLENS_CONFIG).",
)
@click.option(
    "--store",
    "store_path",
    envvar="FRAUDLENS_STORE",
    default="fraudlens.db",
    show_default=True,
    help="Event store database file (env: FRAUDLENS_STORE).",
)
@click.option("--window", default=None, help="Analysis interval, ISO 'start/end'.")
@click.pass_context
def main(ctx: click.Context, config_path: str | None, store_path: str, window: str | None) -> None:
    """Occupational-fraud analytics over employee/client event logs."""
    ctx.obj = AppContext(config_path, store_path, window)


@main.command()
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["csv", "jsonl"]), default="csv", show_default=True)
@click.option("--delimiter", default=",", show_default=True)
@click.pass_obj
def ingest(app: AppContext, source: str, fmt: str, delimiter: str) -> None:
    """Parse an event log and append it to the store."""
    try:
        events, report = parse_log(source, fmt, delimiter=delimiter, tz=app.tz)
    except IngestError as exc:
        raise click.ClickException(str(exc)) from exc
    result = app.engine.ingest(events)
    click.echo(f"parsed {report.accepted} events, rejected {report.rejected} lines")
    for line, reason in report.rejection_reasons[:20]:
        click.echo(f"  line {line}: {reason}", err=True)
    click.echo(f"stored {result['accepted']} new events ({result['duplicates']} duplicates ignored)")
    if result["top"]:
        click.echo("top of manifest: " + ", ".join(result["top"][:5]))


@main.command()
@click.option("--employees", "show_employees", is_flag=True, help="Rank employees instead of clients.")
@click.option("--limit", default=20, show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Emit the full ranking as JSON.")
@click.pass_obj
def rank(app: AppContext, show_employees: bool, limit: int, as_json: bool) -> None:
    """Print the current ranking."""
    snap = app.engine.snapshot
    if show_employees:
        rows = [
            {
                "employee_id": r.employee_id,
                "score": float(r.score),
                "score_exact": str(r.score),
                "contributing_client": r.contributing_client,
            }
            for r in snap.employees
        ]
        if as_json:
            click.echo(json.dumps(rows, indent=2))
            return
        for i, row in enumerate(rows[:limit], start=1):
            via = f" via {row['contributing_client']}" if row["contributing_client"] else ""
            click.echo(f"{i:4d}  {row['employee_id']}  {row['score_exact']}{via}")
        return
    if as_json:
        rows = [
            {
                "client_id": r.client_id,
                "score": float(r.score),
                "score_exact": str(r.score),
                "factors": {s.factor_id: s.performance for s in r.factor_scores},
            }
            for r in snap.clients
        ]
        click.echo(json.dumps(rows, indent=2))
        return
    for i, r in enumerate(snap.clients[:limit], start=1):
        flags = " ".join(f"{s.factor_id}={s.performance}" for s in r.factor_scores if s.performance)
        click.echo(f"{i:4d}  {r.client_id}  {str(r.score):>7}  {flags}")


@main.command()
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--limit", default=None, type=int, help="Render only the first N frames.")
@click.option("--save", "save_path", default=None, type=click.Path(dir_okay=False),
              help="Also write a reloadable visualization file (manifest + layouts).")
@click.pass_obj
def frames(app: AppContext, out_dir: str, limit: int | None, save_path: str | None) -> None:
    """Render ranked client frames as SVG files plus a manifest."""
    engine = app.engine
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = engine.snapshot.manifest
    count = len(manifest.frames) if limit is None else min(limit, len(manifest.frames))
    paths: dict[str, str] = {}
    for index in range(count):
        entry = manifest.frames[index]
        name = f"frame-{index:04d}-{entry.client_id}.svg"
        (out / name).write_text(engine.frame_svg(index), encoding="utf-8")
        paths[entry.client_id] = name
    manifest = manifest.with_paths(paths)
    (out / "manifest.json").write_text(
        json.dumps(manifest.to_dict(), indent=2, sort_keys=True), encoding="utf-8"
    )
    click.echo(f"wrote {count} frames and manifest.json to {out}")
    if save_path:
        layouts = {
            entry.client_id: engine.client_layouts(entry.client_id)
            for entry in manifest.frames[:count]
        }
        save_visualization(save_path, manifest, layouts)
        click.echo(f"saved visualization to {save_path}")


@main.command()
@click.option("--port", default=8370, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.pass_obj
def serve(app: AppContext, port: int, host: str) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(app.engine), host=host, port=port, log_level="info")


@main.command()
@click.option("--filter", "expression", default="", help="Filter expression, e.g. \"client_id=c0007\".")
@click.option("--format", "fmt", type=click.Choice(["csv", "jsonl"]), default="csv", show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.pass_obj
def export(app: AppContext, expression: str, fmt: str, out_path: str) -> None:
    """Export (optionally filtered) events to a log file."""
    try:
        count = app.engine.export(out_path, expression, fmt)
    except FilterSyntaxError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(f"exported {count} events to {out_path}")


@main.command()
@click.option("--filter", "expression", default="", help="Filter expression.")
@click.option("--page", default=0, show_default=True)
@click.option("--page-size", default=None, type=int)
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
def query(app: AppContext, expression: str, page: int, page_size: int | None, as_json: bool) -> None:
    """Query stored events with a filter expression."""
    try:
        result = app.engine.query(expression, page, page_size)
    except FilterSyntaxError as exc:
        raise click.ClickException(str(exc)) from exc
    if as_json:
        click.echo(json.dumps(result, indent=2))
        return
    for record in result["events"]:
        click.echo(
            f"{record['timestamp']}  {record['employee_id']:<12} {record['client_id']:<12}"
            f" {record['action']:<20} {record['source_system']}"
        )
    click.echo(f"({result['total']} matching, page {result['page']})", err=True)


@main.command()
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--seed", default=2014, show_default=True)
@click.option("--events", "n_events", default=35000, show_default=True)
@click.option("--clients", "n_clients", default=7200, show_default=True)
@click.pass_obj
def synth(app: AppContext, out_dir: str, seed: int, n_events: int, n_clients: int) -> None:
    """Generate the synthetic case-study data set (events + config)."""
    from .events import export_log

    dataset = generate_case_study(seed, n_clients=n_clients, n_events=n_events)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    export_log(dataset.events, out / "events.csv", "csv")
    (out / "config.json").write_text(
        json.dumps(dataset.config.to_dict(), indent=2, sort_keys=True), encoding="utf-8"
    )
    (out / "injected.txt").write_text("\n".join(dataset.injected_ids) + "\n", encoding="utf-8")
    click.echo(f"wrote {len(dataset.events)} events, config.json and injected.txt to {out}")


if __name__ == "__main__":
    main(prog_name="fraudlens")
