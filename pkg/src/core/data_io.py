"""
Reading load profiles from CSV and persisting JSON reports.

CSV schema: header ``meter_id,interval,wh``; one row per (meter, interval);
intervals dense 0..L-1 for every meter; UTF-8, comma separated.
"""

import json
import logging
import os
import re
import tempfile
from pathlib import Path
from typing import Dict, Mapping, Optional, Union

import numpy as np
import pandas as pd

from .errors import CsvParseError, DomainError, ReportIOError, SchemaError
from .loadgen import LoadProfile
from .model import MeterId

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["meter_id", "interval", "wh"]

PathLike = Union[str, Path]


def ingest_csv(path: PathLike, bound: Optional[int] = None) -> Dict[MeterId, LoadProfile]:
    """Parse per-meter load profiles.

    Args:
        path: CSV file following the schema above
        bound: Exclusive upper limit for every value (``modulus // n``)

    Returns:
        Mapping meter -> LoadProfile, all of the same length
    """
    logger.info("Loading profiles from %s", path)
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise SchemaError(f"{path}: file is empty") from None
    except pd.errors.ParserError as e:
        found = re.search(r"line (\d+)", str(e))
        raise CsvParseError(str(e), line=int(found.group(1)) if found else 0) from None

    if list(frame.columns) != CSV_COLUMNS:
        raise CsvParseError(f"header must be {','.join(CSV_COLUMNS)}, got {','.join(frame.columns)}", line=1)
    if frame.empty:
        raise SchemaError(f"{path}: no readings")

    numeric = frame.apply(pd.to_numeric, errors="coerce")
    for position, row in enumerate(numeric.itertuples(index=False)):
        line = position + 2
        for column, value in zip(CSV_COLUMNS, row):
            raw = frame.iat[position, CSV_COLUMNS.index(column)]
            if pd.isna(value) or not np.isfinite(value) or float(value) != int(value):
                raise CsvParseError(f"{column} '{raw}' is not an integer", line=line)
            if value < 0:
                raise CsvParseError(f"{column} {raw} is negative", line=line)
            if column == "wh" and bound is not None and value >= bound:
                raise DomainError(f"line {line}: {raw} Wh is not below the bound {bound}")
    numeric = numeric.astype(np.int64)

    duplicated = numeric.duplicated(subset=["meter_id", "interval"])
    if duplicated.any():
        raise CsvParseError("duplicate (meter_id, interval)", line=int(np.flatnonzero(duplicated)[0]) + 2)

    profiles = {}
    lengths = {}
    for meter, group in numeric.groupby("meter_id", sort=True):
        ordered = group.sort_values("interval")
        if not np.array_equal(ordered["interval"].to_numpy(), np.arange(len(ordered))):
            raise SchemaError(f"{path}: intervals of meter {meter} are not dense from 0")
        profiles[MeterId(int(meter))] = LoadProfile(ordered["wh"].to_numpy())
        lengths[int(meter)] = len(ordered)
    if len(set(lengths.values())) != 1:
        raise SchemaError(f"{path}: ragged profile lengths {lengths}")
    return profiles


def export_csv(profiles: Mapping[int, LoadProfile], path: PathLike) -> None:
    """Write profiles in the schema :func:`ingest_csv` reads."""
    frames = [
        pd.DataFrame({"meter_id": int(meter), "interval": np.arange(len(profile)), "wh": profile.series})
        for meter, profile in sorted(profiles.items())
    ]
    frame = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=CSV_COLUMNS)
    frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\n")


def canonical_json(report: Mapping) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def persist_report(report: Mapping, path: PathLike) -> None:
    """Atomically write ``report`` as canonical JSON (sorted keys, trailing newline)."""
    path = Path(path)
    text = canonical_json(report)
    try:
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(text)
            os.replace(tmp, path)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise
    except OSError as e:
        raise ReportIOError(e.strerror or str(e), str(path)) from e
    logger.info("Report written to %s", path)


def load_report(path: PathLike) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ReportIOError(e.strerror or str(e), str(path)) from e
