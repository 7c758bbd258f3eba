"""Serialize results to versioned JSON or fixed-column CSV.

CSV layouts (one table per file):

==============  ===========================================================
result          columns
==============  ===========================================================
test            statistic, bias, sigma_hat, z, p_value, alpha, reject,
                n_eff, M, K, window, grid_size
simulate        case_id, n, replications, alpha, rate, rejections, seed
                (plus wall_time when timing is requested)
select-lag      lag, score, criterion, selected
decompose       frequency, coherence_1..K, residual_1..K
estimate        frequency, row, col, re, im
connectivity    source, target, reject_a, reject_b, p_a, p_b, color
==============  ===========================================================
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from typing import Optional

import numpy as np

from ..decomposition import Decomposition
from ..errors import InvalidArgumentError
from ..lags import LagSelection
from ..residual import TestReport
from ..simulation import MCResult
from ..spectral import SpectralField
from .connectivity import ConnectivityGrid

SCHEMA_VERSION = "1.0"
FORMATS = ("json", "csv")

TEST_COLUMNS = ("statistic", "bias", "sigma_hat", "z", "p_value", "alpha", "reject",
                "n_eff", "M", "K", "window", "grid_size")
MC_COLUMNS = ("case_id", "n", "replications", "alpha", "rate", "rejections", "seed")
LAG_COLUMNS = ("lag", "score", "criterion", "selected")
FIELD_COLUMNS = ("frequency", "row", "col", "re", "im")
GRID_COLUMNS = ("source", "target", "reject_a", "reject_b", "p_a", "p_b", "color")


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def _mc_dict(r: MCResult, timing: bool) -> dict:
    d = {k: getattr(r, k) for k in MC_COLUMNS}
    if timing:
        d["wall_time"] = r.wall_time
    return d


def _lag_rows(sel: LagSelection):
    return [{"lag": s.to_dict()["lag"], "score": s.score, "criterion": s.criterion,
             "selected": s is sel.best} for s in sel.scores]


def _decomp_rows(dec: Decomposition):
    freqs = dec.grid.frequencies
    rows = []
    for i, lam in enumerate(freqs):
        row = {"frequency": lam}
        for d in range(dec.K):
            row[f"coherence_{d + 1}"] = dec.coherence[d, i]
        for d in range(dec.K):
            row[f"residual_{d + 1}"] = dec.residual_spectra[d, i]
        rows.append(row)
    return rows


def _field_rows(f: SpectralField):
    rows = []
    for i, lam in enumerate(f.grid.frequencies):
        for a in range(f.dims):
            for b in range(a, f.dims):
                z = f.matrices[i, a, b]
                rows.append({"frequency": lam, "row": a, "col": b, "re": z.real, "im": z.imag})
    return rows


def payload(result, timing: bool = False):
    """JSON payload for one result object."""
    if isinstance(result, TestReport):
        return result.to_dict()
    if isinstance(result, MCResult):
        return _mc_dict(result, timing)
    if isinstance(result, (list, tuple)) and result and all(isinstance(r, MCResult) for r in result):
        return [_mc_dict(r, timing) for r in result]
    if isinstance(result, LagSelection):
        return {"selected": result.best.to_dict()["lag"], "criterion": result.best.criterion,
                "scores": [s.to_dict(with_curve=True) for s in result.scores],
                "f00": result.best.f00.tolist()}
    if isinstance(result, Decomposition):
        return {"frequencies": result.grid.frequencies.tolist(),
                "coherence": result.coherence.tolist(),
                "residual_spectra": result.residual_spectra.tolist(),
                "f00": result.f00.tolist()}
    if isinstance(result, SpectralField):
        return {"frequencies": result.grid.frequencies.tolist(), "bandwidth": result.bandwidth,
                "window": result.window, "real": result.matrices.real.tolist(),
                "imag": result.matrices.imag.tolist()}
    if isinstance(result, ConnectivityGrid):
        return result.to_dict()
    if isinstance(result, dict):
        return {k: payload(v, timing) for k, v in result.items()}
    return result


def table(result, timing: bool = False):
    """``(columns, rows)`` of the CSV layout for ``result``."""
    if isinstance(result, TestReport):
        d = result.to_dict()
        row = {k: d[k] for k in TEST_COLUMNS[:7]}
        row.update({k: d["meta"].get(k) for k in TEST_COLUMNS[7:]})
        return TEST_COLUMNS, [row]
    if isinstance(result, MCResult):
        result = [result]
    if isinstance(result, (list, tuple)) and result and all(isinstance(r, MCResult) for r in result):
        cols = MC_COLUMNS + (("wall_time",) if timing else ())
        return cols, [_mc_dict(r, timing) for r in result]
    if isinstance(result, LagSelection):
        return LAG_COLUMNS, _lag_rows(result)
    if isinstance(result, Decomposition):
        cols = ("frequency",) + tuple(f"coherence_{d + 1}" for d in range(result.K)) + tuple(
            f"residual_{d + 1}" for d in range(result.K))
        return cols, _decomp_rows(result)
    if isinstance(result, SpectralField):
        return FIELD_COLUMNS, _field_rows(result)
    if isinstance(result, ConnectivityGrid):
        d = result.to_dict()
        return GRID_COLUMNS, d["pairs"]
    raise InvalidArgumentError(f"no CSV layout for {type(result).__name__}")


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, list):
        return " ".join(str(x) for x in v)
    return str(v)


def render(results: dict, fmt: str = "json", config: Optional[dict] = None,
           timing: bool = False) -> str:
    """Text of ``results`` (a mapping operation name -> result) in ``fmt``."""
    if fmt not in FORMATS:
        raise InvalidArgumentError(f"format must be one of {FORMATS}, got {fmt!r}")
    if fmt == "json":
        doc = {"schema_version": SCHEMA_VERSION, "config": config or {},
               "results": {k: payload(v, timing) for k, v in results.items()}}
        return json.dumps(_clean(doc), indent=2, allow_nan=False) + "\n"
    if len(results) != 1:
        raise InvalidArgumentError("CSV output holds exactly one result table")
    (result,) = results.values()
    cols, rows = table(result, timing)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in cols])
    return buf.getvalue()


def emit(results: dict, fmt: str = "json", path=None, config: Optional[dict] = None,
         timing: bool = False) -> str:
    """Render ``results`` and write them to ``path`` (stdout when ``None`` or ``-``)."""
    text = render(results, fmt, config, timing)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return text
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise InvalidArgumentError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return text


def load_json(text: str) -> dict:
    """Parse emitted JSON, checking the schema version."""
    doc = json.loads(text)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise InvalidArgumentError(f"unsupported schema version {doc.get('schema_version')!r}")
    return doc
