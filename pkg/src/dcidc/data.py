"""Dataset ingestion, normalization, label masking, and synthetic benchmarks.

Two on-disk feature formats are supported:

* ``dcmx`` binary matrices: magic bytes ``DCMX``, version byte 0x01, then
  little-endian u32 row and column counts, then rows*cols little-endian
  IEEE-754 32-bit floats in row-major order.  Values are widened to 64-bit
  on load; saving narrows to 32-bit, so a load/save cycle of a dcmx file is
  byte-exact while arbitrary float64 data may lose precision on first save.
* CSV: comma-separated decimal floats, one sample per line, no header.

A companion label file (same stem, ``.labels.csv``, one integer per line)
is picked up automatically when present.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .seeding import substream

_MAGIC = b"DCMX"
_VERSION = 1
_HEADER = struct.Struct("<4sBII")


class DataFormatError(ValueError):
    """File did not parse as the declared format."""


@dataclass
class Dataset:
    features: np.ndarray                 # n x d, one row per sample
    labels: np.ndarray | None = None     # int labels, length n
    mask: np.ndarray | None = None       # original row indices of survivors
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]


def dcmx_bytes(matrix: np.ndarray) -> bytes:
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2:
        raise ValueError(f"dcmx stores 2-D matrices, got shape {matrix.shape}")
    header = _HEADER.pack(_MAGIC, _VERSION, matrix.shape[0], matrix.shape[1])
    return header + np.ascontiguousarray(matrix, dtype="<f4").tobytes()


def read_dcmx(raw: bytes, offset: int = 0, source: str = "<bytes>") -> tuple[np.ndarray, int]:
    """Decode one dcmx block from raw[offset:]; returns (matrix, next offset)."""
    if len(raw) - offset < _HEADER.size:
        raise DataFormatError(
            f"{source}: dcmx header needs {_HEADER.size} bytes at byte {offset}, "
            f"only {len(raw) - offset} available"
        )
    magic, version, rows, cols = _HEADER.unpack_from(raw, offset)
    if magic != _MAGIC:
        raise DataFormatError(f"{source}: bad magic {magic!r} at byte {offset}")
    if version != _VERSION:
        raise DataFormatError(f"{source}: unsupported dcmx version {version}")
    expected = rows * cols * 4
    start = offset + _HEADER.size
    actual = len(raw) - start
    if actual < expected:
        raise DataFormatError(
            f"{source}: payload of {rows}x{cols} floats needs {expected} bytes, "
            f"found {actual}"
        )
    values = np.frombuffer(raw, dtype="<f4", count=rows * cols, offset=start)
    return values.astype(np.float64).reshape(rows, cols), start + expected


def save_dcmx(path, matrix: np.ndarray) -> None:
    Path(path).write_bytes(dcmx_bytes(matrix))


def load_dcmx(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    matrix, end = read_dcmx(raw, 0, str(path))
    if end != len(raw):
        raise DataFormatError(
            f"{path}: {len(raw) - end} trailing bytes after a "
            f"{matrix.shape[0]}x{matrix.shape[1]} payload"
        )
    return matrix


def load_feature_csv(path) -> np.ndarray:
    rows = []
    width = None
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = [float(tok) for tok in line.split(",")]
            except ValueError as exc:
                raise DataFormatError(f"{path}:{lineno}: {exc}") from exc
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise DataFormatError(
                    f"{path}:{lineno}: expected {width} columns, found {len(row)}"
                )
            if not all(np.isfinite(row)):
                raise DataFormatError(f"{path}:{lineno}: non-finite value")
            rows.append(row)
    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    return np.array(rows, dtype=np.float64)


def load_label_csv(path) -> np.ndarray:
    labels = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                labels.append(int(line))
            except ValueError as exc:
                raise DataFormatError(f"{path}:{lineno}: {exc}") from exc
    return np.array(labels, dtype=np.int64)


def save_label_csv(path, labels) -> None:
    with open(path, "w", encoding="ascii") as fh:
        for value in np.asarray(labels).ravel():
            fh.write(f"{int(value)}\n")


def companion_label_path(path) -> Path:
    return Path(path).with_suffix("").with_suffix(".labels.csv")


def load(path, fmt: str | None = None) -> Dataset:
    """Load a feature file (csv or dcmx) plus its companion labels if present."""
    path = Path(path)
    if fmt is None:
        fmt = "dcmx" if path.suffix == ".dcmx" else "csv"
    if fmt == "dcmx":
        features = load_dcmx(path)
    elif fmt == "csv":
        features = load_feature_csv(path)
    else:
        raise ValueError(f"unknown format {fmt!r}, expected 'csv' or 'dcmx'")
    if not np.all(np.isfinite(features)):
        raise DataFormatError(f"{path}: non-finite feature values")
    labels = None
    label_path = companion_label_path(path)
    if label_path.exists():
        labels = load_label_csv(label_path)
        if labels.size != features.shape[0]:
            raise DataFormatError(
                f"{label_path}: {labels.size} labels for {features.shape[0]} rows"
            )
    return Dataset(features, labels=labels, meta={"name": path.stem})


def normalize(dataset: Dataset, mode: str = "minmax_per_band") -> Dataset:
    """Per-column rescaling; the transform is recorded for denormalize.

    minmax maps each column to [0, 1]; zscore to zero mean and unit
    variance.  Constant columns map to all zeros under either mode.
    """
    x = dataset.features
    if mode == "minmax_per_band":
        offset = x.min(axis=0)
        span = x.max(axis=0) - offset
    elif mode == "zscore_per_band":
        offset = x.mean(axis=0)
        span = x.std(axis=0)
    else:
        raise ValueError(
            f"unknown mode {mode!r}, expected 'minmax_per_band' or 'zscore_per_band'"
        )
    safe = np.where(span == 0.0, 1.0, span)
    scaled = (x - offset) / safe
    scaled[:, span == 0.0] = 0.0
    meta = dict(dataset.meta)
    meta["normalization"] = {
        "mode": mode,
        "offset": offset.tolist(),
        "scale": span.tolist(),
    }
    return Dataset(scaled, labels=dataset.labels, mask=dataset.mask, meta=meta)


def denormalize(dataset: Dataset) -> Dataset:
    record = dataset.meta.get("normalization")
    if record is None:
        raise ValueError("dataset carries no normalization record")
    offset = np.asarray(record["offset"])
    span = np.asarray(record["scale"])
    restored = dataset.features * span + offset
    meta = {k: v for k, v in dataset.meta.items() if k != "normalization"}
    return Dataset(restored, labels=dataset.labels, mask=dataset.mask, meta=meta)


def mask_unlabeled(dataset: Dataset) -> Dataset:
    """Drop rows labeled 0 (background) and re-index the remaining labels
    densely; the mask records surviving original row indices."""
    if dataset.labels is None:
        raise ValueError("mask_unlabeled needs labels")
    keep = dataset.labels != 0
    if not keep.any():
        raise ValueError("mask_unlabeled would remove every row")
    kept_labels = dataset.labels[keep]
    _, dense = np.unique(kept_labels, return_inverse=True)
    surviving = np.flatnonzero(keep)
    if dataset.mask is not None:
        surviving = dataset.mask[keep]
    meta = dict(dataset.meta)
    meta.setdefault("full_size", dataset.n if dataset.mask is None else int(meta.get("full_size", dataset.n)))
    return Dataset(
        dataset.features[keep],
        labels=dense.astype(np.int64),
        mask=surviving,
        meta=meta,
    )


def scatter_labels(labels, mask, full_size: int, sentinel: int = -1) -> np.ndarray:
    """Spread masked-subset labels back onto the original row positions."""
    labels = np.asarray(labels)
    mask = np.asarray(mask)
    if labels.size != mask.size:
        raise ValueError(f"{labels.size} labels for {mask.size} mask entries")
    full = np.full(full_size, sentinel, dtype=np.int64)
    full[mask] = labels
    return full


def synth_blobs(
    n_per_cluster: int,
    k: int,
    dim: int,
    separation: float,
    noise_sigma: float,
    seed: int,
) -> Dataset:
    """Isotropic Gaussian clusters with centers at mutual distance >= separation."""
    if k < 2:
        raise ValueError(f"need at least 2 clusters, got {k}")
    if separation <= 0:
        raise ValueError(f"separation must be positive, got {separation}")
    rng = substream(seed, "synth")
    side = separation * max(2.0, k ** (1.0 / dim))
    centers = None
    for _ in range(100):
        candidate = rng.uniform(0.0, side, size=(k, dim))
        diff = candidate[:, None, :] - candidate[None, :, :]
        dist = np.sqrt((diff**2).sum(axis=2))
        dist[np.diag_indices(k)] = np.inf
        if dist.min() >= separation:
            centers = candidate
            break
    if centers is None:
        raise ValueError(
            f"could not place {k} centers at mutual distance {separation} "
            f"in a box of side {side:.3g} after 100 tries"
        )
    labels = np.repeat(np.arange(k, dtype=np.int64), n_per_cluster)
    points = centers[labels] + noise_sigma * rng.standard_normal(
        (k * n_per_cluster, dim)
    )
    return Dataset(
        points,
        labels=labels,
        meta={"name": "blobs", "centers": centers.tolist()},
    )
