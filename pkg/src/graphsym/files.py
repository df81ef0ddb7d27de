"""Delimited file formats: datasets, training records, aggregates, curves.

All CSVs use comma separators, LF line endings and the exact headers below.
Floats are written with repr, so identical data produces byte-identical
files and every file round-trips through the matching reader.

    dataset    id,n,edges,label          edges like "0-1;0-3;2-5" (i<j)
    raw run    epoch,ansatz,seed,loss,train_acc,val_acc,near_zero_frac
    aggregate  epoch,<stem>_mean,<stem>_ci95 per requested ansatz
    curve      p,connectedness

Aggregate column stems follow the ansatz naming used in plotted data files:
Sn, Cn, entanglement, free_parameters.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .ansatz import (
    CN_INVARIANT,
    FREE_PARAMETERS,
    SN_INVARIANT,
    STRONGLY_ENTANGLING,
)
from .graphs import Dataset, Graph, GraphSample, property_oracle
from .training import RunRecord

__all__ = [
    "KIND_STEMS",
    "DATASET_HEADER",
    "RAW_RUN_HEADER",
    "CURVE_HEADER",
    "meta_path",
    "save_dataset",
    "load_dataset",
    "save_run_record",
    "load_run_records",
    "save_aggregate",
    "load_aggregate",
    "save_curve",
    "load_curve",
    "save_state_dump",
    "parse_config_text",
    "load_config_file",
]

KIND_STEMS = {
    SN_INVARIANT: "Sn",
    CN_INVARIANT: "Cn",
    STRONGLY_ENTANGLING: "entanglement",
    FREE_PARAMETERS: "free_parameters",
}

DATASET_HEADER = ["id", "n", "edges", "label"]
RAW_RUN_HEADER = ["epoch", "ansatz", "seed", "loss", "train_acc", "val_acc", "near_zero_frac"]
CURVE_HEADER = ["p", "connectedness"]


def _fmt(value: float) -> str:
    return repr(float(value))


def _writer(handle):
    return csv.writer(handle, lineterminator="\n")


def meta_path(dataset_path: str | Path) -> Path:
    path = Path(dataset_path)
    return path.with_name(path.stem + ".meta.json")


def _edges_field(g: Graph) -> str:
    return ";".join(f"{i}-{j}" for i, j in g.edges())


def _parse_edges(n: int, field: str) -> Graph:
    if not field:
        return Graph.empty(n)
    edges = []
    for token in field.split(";"):
        i, j = token.split("-")
        edges.append((int(i), int(j)))
    return Graph.from_edges(n, edges)


def save_dataset(path: str | Path, dataset: Dataset, seed: int | None = None) -> Path:
    """Write the dataset CSV plus a JSON sidecar with its provenance."""
    path = Path(path)
    with open(path, "w", newline="") as handle:
        writer = _writer(handle)
        writer.writerow(DATASET_HEADER)
        for idx, sample in enumerate(dataset.samples):
            writer.writerow(
                [idx, sample.graph.n, _edges_field(sample.graph), sample.label]
            )
    pos, neg = dataset.class_counts()
    meta = {
        "property": dataset.property,
        "n": dataset.n,
        "seed": seed,
        "total": len(dataset.samples),
        "positive": pos,
        "negative": neg,
    }
    with open(meta_path(path), "w") as handle:
        json.dump(meta, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return path


def load_dataset(
    path: str | Path,
    property_name: str | None = None,
    train_per_epoch: int = 100,
    verify: bool = False,
) -> tuple[Dataset, dict | None]:
    """Read a dataset CSV; the property comes from the sidecar unless given.

    With ``verify=True`` every stored label is recomputed with the exact
    oracle and a mismatch raises ValueError.
    """
    path = Path(path)
    meta = None
    mpath = meta_path(path)
    if mpath.exists():
        with open(mpath) as handle:
            meta = json.load(handle)
    if property_name is None:
        if meta is None or "property" not in meta:
            raise ValueError(
                f"no metadata sidecar next to {path}; pass the property explicitly"
            )
        property_name = meta["property"]
    oracle = property_oracle(property_name)
    samples = []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if header != DATASET_HEADER:
            raise ValueError(f"unexpected dataset header {header!r}")
        for row in reader:
            _, n_text, edges_text, label_text = row
            graph = _parse_edges(int(n_text), edges_text)
            label = int(label_text)
            if verify and (1 if oracle(graph) else -1) != label:
                raise ValueError(f"stored label {label} contradicts the oracle")
            samples.append(GraphSample(graph, label, property_name))
    return Dataset(tuple(samples), train_per_epoch), meta


def save_run_record(path: str | Path, record: RunRecord) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as handle:
        writer = _writer(handle)
        writer.writerow(RAW_RUN_HEADER)
        for epoch in range(record.n_epochs):
            writer.writerow(
                [
                    epoch,
                    record.ansatz_kind,
                    record.seed,
                    _fmt(record.loss[epoch]),
                    _fmt(record.train_acc[epoch]),
                    _fmt(record.val_acc[epoch]),
                    _fmt(record.near_zero_frac[epoch]),
                ]
            )
    return path


def load_run_records(path: str | Path) -> list[dict]:
    """Rows of a raw run CSV as dicts with numeric fields converted."""
    rows = []
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames != RAW_RUN_HEADER:
            raise ValueError(f"unexpected run header {reader.fieldnames!r}")
        for row in reader:
            rows.append(
                {
                    "epoch": int(row["epoch"]),
                    "ansatz": row["ansatz"],
                    "seed": int(row["seed"]),
                    "loss": float(row["loss"]),
                    "train_acc": float(row["train_acc"]),
                    "val_acc": float(row["val_acc"]),
                    "near_zero_frac": float(row["near_zero_frac"]),
                }
            )
    return rows


def save_aggregate(
    path: str | Path,
    series: Mapping[str, tuple[np.ndarray, np.ndarray]],
) -> Path:
    """Write per-epoch mean/ci95 columns for each ansatz kind, in given order."""
    path = Path(path)
    kinds = list(series)
    lengths = {len(series[k][0]) for k in kinds}
    if len(lengths) != 1:
        raise ValueError("all aggregate series must cover the same epochs")
    epochs = lengths.pop()
    header = ["epoch"]
    for kind in kinds:
        stem = KIND_STEMS[kind]
        header += [f"{stem}_mean", f"{stem}_ci95"]
    with open(path, "w", newline="") as handle:
        writer = _writer(handle)
        writer.writerow(header)
        for epoch in range(epochs):
            row: list[str | int] = [epoch]
            for kind in kinds:
                mean, ci = series[kind]
                row += [_fmt(mean[epoch]), _fmt(ci[epoch])]
            writer.writerow(row)
    return path


def load_aggregate(path: str | Path) -> tuple[list[str], dict[str, np.ndarray]]:
    """Header plus one float column array per non-epoch column."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        columns: dict[str, list[float]] = {name: [] for name in header}
        for row in reader:
            for name, value in zip(header, row):
                columns[name].append(float(value))
    return header, {name: np.array(vals) for name, vals in columns.items()}


def save_curve(path: str | Path, points: Sequence[tuple[float, float]]) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as handle:
        writer = _writer(handle)
        writer.writerow(CURVE_HEADER)
        for p, fraction in points:
            writer.writerow([_fmt(p), _fmt(fraction)])
    return path


def load_curve(path: str | Path) -> list[tuple[float, float]]:
    points = []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if header != CURVE_HEADER:
            raise ValueError(f"unexpected curve header {header!r}")
        for row in reader:
            points.append((float(row[0]), float(row[1])))
    return points


def save_state_dump(path: str | Path, state: np.ndarray) -> Path:
    """Debug dump of a statevector as (basis_index, re, im) rows."""
    path = Path(path)
    flat = np.asarray(state).reshape(-1)
    with open(path, "w", newline="") as handle:
        writer = _writer(handle)
        writer.writerow(["basis_index", "re", "im"])
        for idx, amp in enumerate(flat):
            writer.writerow([idx, _fmt(amp.real), _fmt(amp.imag)])
    return path


def parse_config_text(text: str) -> dict[str, str]:
    """Flat key=value lines; blank lines and # comments are skipped."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno} is not key=value: {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def load_config_file(path: str | Path) -> dict[str, str]:
    with open(path) as handle:
        return parse_config_text(handle.read())
