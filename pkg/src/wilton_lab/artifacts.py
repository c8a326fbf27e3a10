"""Artifact writing: atomic files, JSON with full precision, CSV mirrors."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from typing import Any, Dict, Iterable, List, Optional, Sequence

from .moments import MomentEstimate

MOMENT_COLUMNS = ("K", "value", "std_error", "prediction", "ratio", "ratio_to_gamma",
                  "value_over_pi_k", "bias_bound", "method", "samples", "seed", "g_tol",
                  "wall_seconds")


def atomic_write_text(path: str, text: str) -> None:
    """Write via a temporary file in the same directory, then rename over path."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def to_json(obj: Any) -> str:
    # json emits floats with repr, the shortest round-trip form
    return json.dumps(obj, indent=2, sort_keys=False, allow_nan=True) + "\n"


def moment_row(est: MomentEstimate, wall_seconds: Optional[float] = None) -> Dict[str, Any]:
    return {
        "K": est.K,
        "value": est.value,
        "std_error": est.std_error,
        "prediction": est.prediction,
        "ratio": est.ratio_to_prediction,
        "ratio_to_gamma": est.ratio_to_gamma,
        "value_over_pi_k": est.value_over_pi_k,
        "bias_bound": est.bias_bound,
        "method": est.method,
        "samples": est.samples,
        "seed": est.seed,
        "g_tol": est.g_tol,
        "wall_seconds": wall_seconds,
    }


def moment_table_json(config: Dict[str, Any], rows: Sequence[Dict[str, Any]],
                      extra: Optional[Dict[str, Any]] = None) -> str:
    doc: Dict[str, Any] = {"config": config, "rows": list(rows)}
    if extra:
        doc.update(extra)
    return to_json(doc)


def _csv_cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(columns: Sequence[str], rows: Iterable[Dict[str, Any]],
                config: Optional[Dict[str, Any]] = None) -> str:
    """CSV text; the run configuration goes on a leading ``# config:`` line."""
    buf = io.StringIO()
    if config is not None:
        buf.write("# config: " + json.dumps(config, sort_keys=False) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_csv_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def read_csv_rows(text: str) -> List[Dict[str, str]]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))
