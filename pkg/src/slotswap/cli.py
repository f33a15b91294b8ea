"""Command-line entry point and CSV bundle persistence.

Resolution order: flags override config-file values, which override the
built-in defaults. The fully resolved configuration is echoed into the
output bundle as ``config.json`` and can be fed back via ``--config``.

Bundle layout:
    config.json   resolved sweep + simulation settings
    days.csv      one row per (cell, run, day)
    summary.csv   per-cell per-day means across runs
    tests.csv     ledger-on vs ledger-off final-day test per cell
    events.log    JSON lines, only with --events on

Exit codes: 0 success, 1 usage error, 2 I/O error. All files are written
atomically (temp then rename) with LF endings, UTF-8, and 6 fractional
digits for floats, so identical inputs reproduce identical bytes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .core import SimConfig
from .experiments import (
    Scenario,
    SocialCapitalTest,
    SweepDataset,
    SweepGrid,
    cell_day_summaries,
    compare_social_capital,
    run_sweep,
)

__all__ = ["Invocation", "parse_invocation", "write_bundle", "main"]

_DEFAULTS: dict = {
    "scenario": "mixed",
    "exchanges": [1, 50, 100, 150, 200],
    "learning_rates": [0.0, 0.5, 1.0],
    "social_capital": "both",
    "days": 500,
    "runs": 50,
    "seed": 42,
    "population": 96,
    "slots": 24,
    "capacity": 16,
    "slots_per_agent": 4,
    "events": False,
}

# config keys/flags -> SimConfig fields, for diagnostics and construction
_FIELD_FOR_KEY = {
    "population": "population_size",
    "days": "num_days",
    "slots": "slots_per_day",
    "capacity": "slot_capacity",
    "slots_per_agent": "slots_per_agent",
    "runs": "runs",
    "seed": "seed",
}
_KEY_FOR_FIELD = {v: k for k, v in _FIELD_FOR_KEY.items()}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="slotswap",
        description="Simulate decentralized time-slot exchange and write CSV bundles.",
        add_help=True,
    )
    parser.add_argument("--config", type=Path, default=None, metavar="FILE",
                        help="JSON config file; flags override its values")
    parser.add_argument("--exchanges", type=int, nargs="+", default=None,
                        help="exchange rounds per day to sweep")
    parser.add_argument("--learning-rates", type=float, nargs="+", default=None,
                        dest="learning_rates", help="learning rates to sweep")
    parser.add_argument("--days", type=int, default=None)
    parser.add_argument("--runs", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--social-capital", choices=["on", "off", "both"],
                        default=None, dest="social_capital")
    parser.add_argument("--scenario", choices=[s.value for s in Scenario], default=None)
    parser.add_argument("--population", type=int, default=None)
    parser.add_argument("--slots", type=int, default=None)
    parser.add_argument("--capacity", type=int, default=None)
    parser.add_argument("--slots-per-agent", type=int, default=None,
                        dest="slots_per_agent")
    parser.add_argument("--out-dir", type=Path, default=Path("output"), dest="out_dir")
    parser.add_argument("--events", choices=["on", "off"], default=None)
    return parser


@dataclass(frozen=True)
class Invocation:
    grid: SweepGrid
    base: SimConfig
    out_dir: Path
    events: bool
    echo: dict


def _load_config_file(path: Path) -> dict:
    try:
        loaded = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"config: cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config: {path} is not valid JSON: {exc}") from exc
    if not isinstance(loaded, dict):
        raise UsageError(f"config: {path} must hold a JSON object")
    unknown = set(loaded) - set(_DEFAULTS)
    if unknown:
        raise UsageError(f"config: unknown key {sorted(unknown)[0]!r} in {path}")
    return loaded


def parse_invocation(argv: list[str]) -> Invocation:
    """Resolve argv (and an optional config file) into a grid and base config."""
    args = _build_parser().parse_args(argv)
    resolved = dict(_DEFAULTS)
    if args.config is not None:
        resolved.update(_load_config_file(args.config))
    for key in _DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            resolved[key] = value
    if isinstance(resolved["events"], str):
        resolved["events"] = resolved["events"] == "on"

    _validate_resolved(resolved)
    sc_values = {"on": (True,), "off": (False,), "both": (True, False)}[
        resolved["social_capital"]
    ]
    try:
        base = SimConfig(
            population_size=resolved["population"],
            num_days=resolved["days"],
            slots_per_day=resolved["slots"],
            slots_per_agent=resolved["slots_per_agent"],
            slot_capacity=resolved["capacity"],
            exchange_rounds=resolved["exchanges"][0],
            learning_rate=float(resolved["learning_rates"][0]),
            social_capital_enabled=sc_values[0],
            runs=resolved["runs"],
            seed=resolved["seed"],
        )
        grid = SweepGrid(
            scenario=Scenario(resolved["scenario"]),
            exchange_rounds=tuple(resolved["exchanges"]),
            learning_rates=tuple(float(r) for r in resolved["learning_rates"]),
            social_capital=sc_values,
            runs_per_cell=resolved["runs"],
        )
    except ValueError as exc:
        raise UsageError(_flag_diagnostic(str(exc))) from exc
    echo = {key: resolved[key] for key in _DEFAULTS}
    return Invocation(grid=grid, base=base, out_dir=args.out_dir,
                      events=resolved["events"], echo=echo)


def _validate_resolved(resolved: dict) -> None:
    if not resolved["exchanges"]:
        raise UsageError("exchanges: list must be non-empty")
    for value in resolved["exchanges"]:
        if not isinstance(value, int) or value < 1:
            raise UsageError(f"exchanges: values must be integers >= 1, got {value!r}")
    if not resolved["learning_rates"]:
        raise UsageError("learning-rates: list must be non-empty")
    for value in resolved["learning_rates"]:
        if not isinstance(value, (int, float)) or not 0.0 <= value <= 1.0:
            raise UsageError(f"learning-rates: values must lie in [0, 1], got {value!r}")
    if resolved["social_capital"] not in ("on", "off", "both"):
        raise UsageError(
            f"social-capital: must be on, off or both, got {resolved['social_capital']!r}"
        )
    if resolved["scenario"] not in {s.value for s in Scenario}:
        raise UsageError(f"scenario: unknown scenario {resolved['scenario']!r}")
    if not isinstance(resolved["events"], bool):
        raise UsageError(f"events: must be on or off, got {resolved['events']!r}")


def _flag_diagnostic(message: str) -> str:
    """Rewrite a SimConfig field error so it names the offending flag."""
    fieldname, sep, rest = message.partition(":")
    if not sep:
        return message
    key = _KEY_FOR_FIELD.get(fieldname.strip(), fieldname.strip())
    return f"{key.replace('_', '-')}:{rest}"


# Bundle writing -------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(f".{path.name}.tmp{os.getpid()}")
    tmp.write_text(text, encoding="utf-8", newline="\n")
    os.replace(tmp, path)


_DAYS_HEADER = (
    "run,day,scenario,exchanges,learning,social_capital,mean_satisfaction,"
    "mean_sat_social,mean_sat_selfish,social_count,optimum,exchanges_accepted,"
    "favours_recorded,favours_repaid"
)
_SUMMARY_HEADER = (
    "scenario,exchanges,learning,social_capital,day,mean_satisfaction,"
    "mean_sat_social,mean_sat_selfish,social_proportion,optimum"
)
_TESTS_HEADER = "exchanges,learning,u_statistic,p_value,significant"


def write_bundle(
    dataset: SweepDataset,
    tests: list[SocialCapitalTest],
    echo: dict,
    out_dir: Path,
    events: bool = False,
) -> None:
    """Persist the dataset as the CSV bundle; byte-stable for fixed inputs."""
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_atomic(
        out_dir / "config.json",
        json.dumps(echo, indent=2, sort_keys=True) + "\n",
    )

    day_lines = [_DAYS_HEADER]
    for key in dataset.grid.cells():
        cell = dataset.cells[key]
        for run in cell.runs:
            for rec in run.day_records:
                day_lines.append(
                    ",".join(
                        (
                            str(run.run_index),
                            str(rec.day),
                            key.scenario.value,
                            str(key.exchanges),
                            _fmt(float(key.learning_rate)),
                            _fmt(key.social_capital),
                            _fmt(rec.mean_satisfaction),
                            _fmt(rec.mean_sat_social),
                            _fmt(rec.mean_sat_selfish),
                            str(rec.social_count),
                            _fmt(rec.optimum),
                            str(rec.exchanges_accepted),
                            str(rec.favours_recorded),
                            str(rec.favours_repaid),
                        )
                    )
                )
    _write_atomic(out_dir / "days.csv", "\n".join(day_lines) + "\n")

    summary_lines = [_SUMMARY_HEADER]
    for key in dataset.grid.cells():
        cell = dataset.cells[key]
        for day in cell_day_summaries(cell):
            summary_lines.append(
                ",".join(
                    (
                        key.scenario.value,
                        str(key.exchanges),
                        _fmt(float(key.learning_rate)),
                        _fmt(key.social_capital),
                        str(day.day),
                        _fmt(day.mean_satisfaction),
                        _fmt(day.mean_sat_social),
                        _fmt(day.mean_sat_selfish),
                        _fmt(day.social_proportion),
                        _fmt(day.optimum),
                    )
                )
            )
    _write_atomic(out_dir / "summary.csv", "\n".join(summary_lines) + "\n")

    test_lines = [_TESTS_HEADER]
    for row in tests:
        if row.result is None:
            test_lines.append(f"{row.exchanges},{_fmt(float(row.learning_rate))},,,")
        else:
            test_lines.append(
                ",".join(
                    (
                        str(row.exchanges),
                        _fmt(float(row.learning_rate)),
                        _fmt(row.result.u_statistic),
                        _fmt(row.result.p_value),
                        _fmt(row.result.significant_at_01),
                    )
                )
            )
    _write_atomic(out_dir / "tests.csv", "\n".join(test_lines) + "\n")

    if events:
        lines = []
        for key in dataset.grid.cells():
            cell = dataset.cells[key]
            for run in cell.runs:
                for event in run.events or ():
                    payload = {
                        "scenario": key.scenario.value,
                        "exchanges": key.exchanges,
                        "learning": key.learning_rate,
                        "social_capital": key.social_capital,
                        "run": run.run_index,
                        **event,
                    }
                    lines.append(json.dumps(payload, sort_keys=True))
        _write_atomic(
            out_dir / "events.log", "\n".join(lines) + ("\n" if lines else "")
        )


def main(argv: list[str] | None = None) -> int:
    try:
        invocation = parse_invocation(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    dataset = run_sweep(
        invocation.grid,
        invocation.base,
        progress=lambda msg: print(msg, file=sys.stderr),
        collect_events=invocation.events,
    )
    tests = compare_social_capital(dataset)
    try:
        write_bundle(
            dataset, tests, invocation.echo, invocation.out_dir, invocation.events
        )
    except OSError as exc:
        print(f"error: cannot write bundle: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
