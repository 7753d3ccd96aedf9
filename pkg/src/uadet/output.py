"""Result serialization: CSV and JSONL writers, readers, and the
side-by-side comparison table.

Formatting is pinned down so identical rows always produce identical
bytes: floats via repr (shortest round-trip form), a noiseless channel as
an empty CSV field or JSON null, infeasible points as nan rates.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ConfigError
from .experiments import SCHEMA_VERSION, ResultRow

CSV_COLUMNS = [
    "framework", "N", "k", "M", "m", "snr_bit_db", "trials",
    "mdr", "mdr_ci", "far", "far_ci", "plr", "flr",
    "energy_per_user", "seed",
]

COMPARE_COLUMNS = [
    "m", "cs_mdr", "cs_far", "cs_flr", "cs_energy_per_user",
    "csa_plr", "csa_far", "csa_flr", "csa_energy_per_user",
]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows: Sequence[ResultRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        d = r.model_dump()
        w.writerow([_fmt(d[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def rows_to_jsonl(rows: Sequence[ResultRow]) -> str:
    lines = []
    for r in rows:
        d = {"schema_version": SCHEMA_VERSION}
        full = r.model_dump()
        d.update((c, full[c]) for c in CSV_COLUMNS)
        d["infeasible"] = r.infeasible
        lines.append(json.dumps(d, allow_nan=True))
    return "".join(line + "\n" for line in lines)


def write_rows(rows: Sequence[ResultRow], path: str | Path, fmt: str) -> None:
    if fmt == "csv":
        text = rows_to_csv(rows)
    elif fmt == "jsonl":
        text = rows_to_jsonl(rows)
    else:
        raise ConfigError(f"unknown output format {fmt!r}")
    Path(path).write_text(text)


def _parse_float(field: str) -> float:
    return float(field)


def read_rows_csv(path: str | Path) -> list[ResultRow]:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read results {p}: {e}") from None
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ConfigError(f"{p}: empty file, expected a header row") from None
    if header != CSV_COLUMNS:
        raise ConfigError(f"{p}: unexpected header {header}")
    rows = []
    for i, rec in enumerate(reader, start=2):
        if len(rec) != len(CSV_COLUMNS):
            raise ConfigError(f"{p}:{i}: expected {len(CSV_COLUMNS)} fields, got {len(rec)}")
        vals = dict(zip(CSV_COLUMNS, rec))
        try:
            rows.append(ResultRow(
                framework=vals["framework"],
                N=int(vals["N"]), k=int(vals["k"]),
                M=int(vals["M"]), m=int(vals["m"]),
                snr_bit_db=None if vals["snr_bit_db"] == "" else _parse_float(vals["snr_bit_db"]),
                trials=int(vals["trials"]),
                mdr=_parse_float(vals["mdr"]), mdr_ci=_parse_float(vals["mdr_ci"]),
                far=_parse_float(vals["far"]), far_ci=_parse_float(vals["far_ci"]),
                plr=_parse_float(vals["plr"]), flr=_parse_float(vals["flr"]),
                energy_per_user=_parse_float(vals["energy_per_user"]),
                seed=int(vals["seed"]),
                infeasible=math.isnan(_parse_float(vals["mdr"])),
            ))
        except ValueError as e:
            raise ConfigError(f"{p}:{i}: {e}") from None
    return rows


def compare_rows(cs_rows: Iterable[ResultRow], csa_rows: Iterable[ResultRow]) -> list[dict]:
    """Outer join of the two frameworks' sweeps on total frame symbols m.

    Missing sides are left as None so the table shows where only one
    framework has a measurement. Empty inputs give an empty table.
    """
    table: dict[int, dict] = {}
    for r in cs_rows:
        if r.framework != "cs":
            raise ConfigError(f"expected cs rows, got framework={r.framework!r}")
        entry = table.setdefault(r.m, dict.fromkeys(COMPARE_COLUMNS))
        entry.update(m=r.m, cs_mdr=r.mdr, cs_far=r.far, cs_flr=r.flr,
                     cs_energy_per_user=r.energy_per_user)
    for r in csa_rows:
        if r.framework != "csa":
            raise ConfigError(f"expected csa rows, got framework={r.framework!r}")
        entry = table.setdefault(r.m, dict.fromkeys(COMPARE_COLUMNS))
        entry.update(m=r.m, csa_plr=r.plr, csa_far=r.far, csa_flr=r.flr,
                     csa_energy_per_user=r.energy_per_user)
    return [table[m] for m in sorted(table)]


def compare_to_csv(table: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COMPARE_COLUMNS)
    for entry in table:
        w.writerow([_fmt(entry[c]) for c in COMPARE_COLUMNS])
    return buf.getvalue()
