"""
Output records and their text / JSON / CSV renderings
"""
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

import click
import jsonschema
import pandas as pd
from rich.console import Console
from rich.table import Table

from ..models.spectral import CheckStatus, OutputFormat, OutputRecord

SCHEMA_PATH = Path(__file__).parent.parent / "schemas" / "output_record.schema.json"

_schema_cache: Optional[Dict[str, Any]] = None


def format_number(value) -> str:
    """Rationals as p/q in lowest terms, floats with 17 significant digits"""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".17g")


def result_fields(name: str, value) -> Dict[str, str]:
    """One field per real value; complex values split into _re / _im"""
    if isinstance(value, complex):
        return {f"{name}_re": format_number(value.real), f"{name}_im": format_number(value.imag)}
    return {name: format_number(value)}


def build_record(command: str, query: Dict[str, Any], results: Dict[str, Any], method: str,
                 elapsed_ms: float, error_bound=None, stderr=None, seed: Optional[int] = None) -> OutputRecord:
    fields: Dict[str, str] = {}
    for name, value in results.items():
        if isinstance(value, str):
            fields[name] = value
        else:
            fields.update(result_fields(name, value))
    exact = any(isinstance(v, Fraction) for v in results.values()) and not any(
        isinstance(v, (float, complex)) for v in results.values()
    )
    return OutputRecord(
        command=command,
        query={key: str(value) for key, value in query.items() if value is not None},
        results=fields,
        method=method,
        error_bound=None if error_bound is None else format_number(error_bound),
        stderr=None if stderr is None else format_number(stderr),
        elapsed_ms=round(elapsed_ms, 3),
        seed=seed,
        exact=exact,
    )


def load_schema() -> Dict[str, Any]:
    global _schema_cache
    if _schema_cache is None:
        with open(SCHEMA_PATH) as f:
            _schema_cache = json.load(f)
    return _schema_cache


def validate_record(payload: Dict[str, Any]) -> None:
    jsonschema.validate(instance=payload, schema=load_schema())


def flatten(record: OutputRecord) -> Dict[str, Any]:
    row: Dict[str, Any] = {
        "command": record.command,
        "method": record.method,
        "error_bound": record.error_bound,
        "stderr": record.stderr,
        "elapsed_ms": record.elapsed_ms,
        "seed": record.seed,
        "exact": record.exact,
    }
    row.update({f"query.{k}": v for k, v in record.query.items()})
    row.update({f"results.{k}": v for k, v in record.results.items()})
    return row


def render_json(records: List[OutputRecord], suite: Optional[str] = None) -> str:
    payloads = [record.model_dump() for record in records]
    for payload in payloads:
        validate_record(payload)
    if suite is not None:
        return json.dumps({"suite": suite, "records": payloads}, indent=2)
    if len(payloads) == 1:
        return json.dumps(payloads[0], indent=2)
    return json.dumps(payloads, indent=2)


def render_csv(records: List[OutputRecord]) -> str:
    return pd.DataFrame([flatten(record) for record in records]).to_csv(index=False)


def render_table(console: Console, records: List[OutputRecord], title: str) -> None:
    for record in records:
        table = Table(title=f"{title} ({record.method})", show_header=True, header_style="bold magenta")
        table.add_column("Field", style="cyan")
        table.add_column("Value", style="white")
        for key, value in record.query.items():
            table.add_row(key, value)
        for key, value in record.results.items():
            table.add_row(f"[bold]{key}[/bold]", f"[green]{value}[/green]")
        if record.error_bound is not None:
            table.add_row("error bound", record.error_bound)
        if record.stderr is not None:
            table.add_row("stderr", record.stderr)
        if record.seed is not None:
            table.add_row("seed", str(record.seed))
        table.add_row("elapsed (ms)", f"{record.elapsed_ms:.3f}")
        console.print(table)


def render_checks(console: Console, records: List[OutputRecord], title: str) -> None:
    table = Table(title=title, show_header=True, header_style="bold magenta")
    table.add_column("Check", style="cyan")
    table.add_column("Status")
    table.add_column("Achieved", justify="right")
    table.add_column("Required", justify="right")
    table.add_column("Details", style="dim")
    colors = {CheckStatus.PASSED.value: "green", CheckStatus.FAILED.value: "red", CheckStatus.ERROR.value: "yellow"}
    for record in records:
        status = record.results.get("status", "")
        color = colors.get(status, "white")
        table.add_row(
            record.query.get("check", ""),
            f"[{color}]{status.upper()}[/{color}]",
            record.results.get("achieved", "-"),
            record.results.get("required", "-"),
            record.results.get("details", ""),
        )
    console.print(table)


def emit(console: Console, records: List[OutputRecord], output_format: str, title: str,
         suite: Optional[str] = None) -> None:
    """Print records to stdout in the requested format"""
    output_format = OutputFormat(output_format)
    if output_format == OutputFormat.JSON:
        click.echo(render_json(records, suite))
    elif output_format == OutputFormat.CSV:
        click.echo(render_csv(records), nl=False)
    elif suite is not None:
        render_checks(console, records, title)
    else:
        render_table(console, records, title)
