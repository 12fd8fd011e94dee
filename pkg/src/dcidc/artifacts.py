"""Run artifacts: epoch logs, checkpoints, label maps, and run manifests.

A checkpoint is one JSON header line (dims, activations, epoch) followed by
the dcmx blocks of each layer's weight matrix and bias row, concatenated.
A run manifest records everything needed to reproduce a training run
byte-for-byte: the resolved configuration, the network description, the
dataset fingerprint, and the artifact paths.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .activations import ActivationKind, parse_kind
from .autoencoder import NetworkParams
from .data import dcmx_bytes, read_dcmx
from .training import EpochReport, TrainConfig

EPOCH_LOG_HEADER = "epoch,j_total,j1,j2,j3,accuracy,nmi,empty_cluster_events"


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.17g}"


def epoch_csv_line(report: EpochReport) -> str:
    return ",".join(
        [
            str(report.epoch),
            _fmt(report.j_total),
            _fmt(report.j1),
            _fmt(report.j2),
            _fmt(report.j3),
            _fmt(report.accuracy),
            _fmt(report.nmi),
            str(report.empty_cluster_events),
        ]
    )


def save_checkpoint(path, params: NetworkParams, epoch: int) -> None:
    header = {
        "dims": params.dims,
        "enc_activation": params.enc_activation.value,
        "dec_activation": params.dec_activation.value,
        "epoch": epoch,
    }
    blob = json.dumps(header, sort_keys=True).encode("ascii") + b"\n"
    for w, b in zip(params.weights, params.biases):
        blob += dcmx_bytes(w)
        blob += dcmx_bytes(b.reshape(1, -1))
    Path(path).write_bytes(blob)


def load_checkpoint(path) -> tuple[NetworkParams, int]:
    raw = Path(path).read_bytes()
    newline = raw.index(b"\n")
    header = json.loads(raw[:newline])
    offset = newline + 1
    weights, biases = [], []
    for _ in range(len(header["dims"]) - 1):
        w, offset = read_dcmx(raw, offset, str(path))
        b, offset = read_dcmx(raw, offset, str(path))
        weights.append(w)
        biases.append(b.ravel())
    params = NetworkParams(
        list(header["dims"]),
        weights,
        biases,
        parse_kind(header["enc_activation"]),
        parse_kind(header["dec_activation"]),
    )
    return params, int(header["epoch"])


def write_pgm(path, values: np.ndarray, width: int, height: int) -> None:
    """8-bit binary PGM with each pixel's gray level equal to its label value."""
    grid = np.asarray(values, dtype=np.int64)
    if grid.size != width * height:
        raise ValueError(f"{grid.size} values cannot fill a {width}x{height} image")
    if grid.min() < 0 or grid.max() > 255:
        raise ValueError("PGM gray levels must lie in [0, 255]")
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(grid.astype(np.uint8).tobytes())


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class RunManifest:
    engine_version: str
    data_path: str
    data_format: str
    data_sha256: str
    labels_path: str | None
    normalize: str | None
    mask_unlabeled: bool
    dims: list[int]
    enc_activation: str
    dec_activation: str
    config: dict
    artifacts: dict

    @classmethod
    def build(
        cls,
        data_path,
        data_format: str,
        labels_path,
        normalize_mode: str | None,
        mask: bool,
        dims: list[int],
        enc_activation: ActivationKind,
        dec_activation: ActivationKind,
        config: TrainConfig,
        artifacts: dict,
    ) -> "RunManifest":
        return cls(
            engine_version=__version__,
            data_path=str(data_path),
            data_format=data_format,
            data_sha256=sha256_file(data_path),
            labels_path=None if labels_path is None else str(labels_path),
            normalize=normalize_mode,
            mask_unlabeled=mask,
            dims=list(dims),
            enc_activation=enc_activation.value,
            dec_activation=dec_activation.value,
            config=asdict(config),
            artifacts=artifacts,
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path) -> "RunManifest":
        return cls(**json.loads(Path(path).read_text()))
