"""File formats: model JSON, event and intensity CSV, score tables, atomic writes."""
import csv
import hashlib
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from hawkesrank.core import (
    BranchingMatrix,
    EventStream,
    ExoSchedule,
    HawkesError,
    HawkesModel,
    Kernel,
)

_MODEL_KEYS = {"M", "tau", "mu_segments", "N", "schema_version"}


class FormatError(ValueError):
    """Malformed input file; ``line``/``column`` locate the problem when known."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)


def fmt(x) -> str:
    """Shortest round-trip decimal representation."""
    return repr(float(x))


# --- model JSON -------------------------------------------------------------

def model_to_dict(model: HawkesModel) -> dict:
    return {
        "M": model.dim,
        "tau": model.tau,
        "mu_segments": [
            {"t_start": float(t), "rates": [float(r) for r in rates]}
            for t, rates in zip(model.exo.breakpoints, model.exo.rates)
        ],
        "N": model.N.tolist(),
    }


def model_from_dict(doc) -> HawkesModel:
    """Parse a model document. Raises :class:`FormatError` for schema problems
    and :class:`HawkesError` for mathematically invalid models."""
    if not isinstance(doc, dict):
        raise FormatError("model document must be a JSON object")
    unknown = set(doc) - _MODEL_KEYS
    if unknown:
        raise FormatError(f"unknown model fields: {sorted(unknown)}")
    missing = {"M", "tau", "mu_segments", "N"} - set(doc)
    if missing:
        raise FormatError(f"missing model fields: {sorted(missing)}")
    try:
        M = int(doc["M"])
        segs = doc["mu_segments"]
        bps = [float(s["t_start"]) for s in segs]
        rates = [[float(r) for r in s["rates"]] for s in segs]
        N = np.array(doc["N"], dtype=float)
        tau = float(doc["tau"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed model document: {exc}") from exc
    if not segs:
        raise FormatError("mu_segments must not be empty")
    if any(len(r) != M for r in rates) or N.shape != (M, M):
        raise FormatError(f"rates and N must match the declared dimension M={M}")
    return HawkesModel(ExoSchedule(np.array(bps), np.array(rates)), BranchingMatrix(N), Kernel(tau))


def load_json(path):
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON in {path}: {exc.msg}", exc.lineno, exc.colno) from exc


def load_model(path) -> HawkesModel:
    return model_from_dict(load_json(path))


def dumps_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# --- events CSV -------------------------------------------------------------

def events_to_csv(events: EventStream) -> str:
    times, types = events.merged()
    buf = io.StringIO()
    buf.write("type_index,timestamp\n")
    for c, t in zip(types.tolist(), times.tolist()):
        buf.write(f"{c},{fmt(t)}\n")
    return buf.getvalue()


def read_events_csv(path):
    """Read ``(times, types)`` arrays from an event CSV."""
    times, types = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return np.zeros(0), np.zeros(0, dtype=int)
        if [h.strip() for h in header] != ["type_index", "timestamp"]:
            raise FormatError(f"expected header 'type_index,timestamp', got {header}", 1, 1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise FormatError(f"expected 2 columns, got {len(row)}", lineno, 1)
            try:
                types.append(int(row[0]))
            except ValueError:
                raise FormatError(f"bad type index {row[0]!r}", lineno, 1) from None
            try:
                times.append(float(row[1]))
            except ValueError:
                raise FormatError(f"bad timestamp {row[1]!r}", lineno, len(row[0]) + 2) from None
    return np.array(times, dtype=float), np.array(types, dtype=int)


def load_events(path, T=None, dim=None) -> EventStream:
    times, types = read_events_csv(path)
    if T is None:
        if times.size == 0:
            raise HawkesError("cannot infer the observation window from an empty stream")
        T = float(times.max())
    return EventStream.from_marked(times, types, T, dim=dim)


# --- tables -----------------------------------------------------------------

def trace_to_csv(trace) -> str:
    buf = io.StringIO()
    buf.write("time,type_index,intensity,exo,endo\n")
    for k, t in enumerate(trace.grid.tolist()):
        for i in range(trace.dim):
            buf.write(f"{fmt(t)},{i},{fmt(trace.values[k, i])},"
                      f"{fmt(trace.exo_part[k, i])},{fmt(trace.endo_part[k, i])}\n")
    return buf.getvalue()


def scores_to_csv(scores, ranks) -> str:
    buf = io.StringIO()
    buf.write("node_index,score,rank\n")
    for i, (s, r) in enumerate(zip(scores, ranks)):
        buf.write(f"{i},{fmt(s)},{int(r)}\n")
    return buf.getvalue()


def matrix_to_csv(A) -> str:
    A = np.asarray(A)
    buf = io.StringIO()
    buf.write(",".join(f"to_{i}" for i in range(A.shape[1])) + "\n")
    for row in A:
        buf.write(",".join(fmt(x) for x in row) + "\n")
    return buf.getvalue()


# --- atomic output ----------------------------------------------------------

def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def write_atomic(outputs: dict):
    """Write ``{path: text}`` so that either every file appears or none does.

    Each file is staged in a temporary sibling and renamed only after all
    staging writes succeeded.
    """
    staged = []
    try:
        for path, text in outputs.items():
            path = Path(path)
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            staged.append((tmp, path))
    except BaseException:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, path in staged:
        os.replace(tmp, path)
