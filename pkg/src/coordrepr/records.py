"""Binary dataset and model files. All fields little-endian; see docs/formats.md."""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .core import ImageDims
from .toymodel import Head, SyntheticSample, ToyModel, make_samples, stack

DATASET_MAGIC = b"KPDS"
MODEL_MAGIC = b"KPMD"
DATASET_VERSION = 1
MODEL_VERSION = 1

# magic, version, width, height, n_keypoints, count
DATASET_HEADER = struct.Struct("<4sIIIIQ")
# magic, version, head kind, k, lambda, sigma, width, height, n_keypoints, n_out, n_in
MODEL_HEADER = struct.Struct("<4sIB3xIIdIIIII")
HEAD_CODES = {"simdr": 0, "heatmap": 1}


class FormatError(ValueError):
    pass


class VersionError(FormatError):
    pass


def _check_magic(magic, version, want_magic, want_version, path):
    if magic != want_magic:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {want_magic!r}")
    if version != want_version:
        raise VersionError(f"{path}: unsupported version {version}, expected {want_version}")


def dataset_to_bytes(data: list[SyntheticSample]) -> bytes:
    images, coords, _ = stack(data)
    n, h, w = images.shape
    n_kp = coords.shape[1]
    rec = np.dtype([("id", "<u8"), ("image", "<f8", (h * w,)), ("coords", "<f8", (n_kp * 2,))])
    body = np.empty(n, dtype=rec)
    body["id"] = [s.id for s in data]
    body["image"] = images.reshape(n, -1)
    body["coords"] = coords.reshape(n, -1)
    return DATASET_HEADER.pack(DATASET_MAGIC, DATASET_VERSION, w, h, n_kp, n) + body.tobytes()


def dataset_from_bytes(buf: bytes, path="<bytes>") -> list[SyntheticSample]:
    if len(buf) < DATASET_HEADER.size:
        raise FormatError(f"{path}: truncated header")
    magic, version, w, h, n_kp, n = DATASET_HEADER.unpack_from(buf)
    _check_magic(magic, version, DATASET_MAGIC, DATASET_VERSION, path)
    ImageDims(w, h)
    rec = np.dtype([("id", "<u8"), ("image", "<f8", (h * w,)), ("coords", "<f8", (n_kp * 2,))])
    if len(buf) != DATASET_HEADER.size + n * rec.itemsize:
        raise FormatError(f"{path}: expected {n} records, size does not match")
    if n == 0:
        raise FormatError(f"{path}: dataset is empty")
    body = np.frombuffer(buf, dtype=rec, offset=DATASET_HEADER.size)
    images = body["image"].astype(float).reshape(n, h, w)
    coords = body["coords"].astype(float).reshape(n, n_kp, 2)
    return make_samples(coords, images, ids=body["id"].tolist())


def model_to_bytes(model: ToyModel) -> bytes:
    head = model.head
    n_out, n_in = model.weights.shape
    header = MODEL_HEADER.pack(MODEL_MAGIC, MODEL_VERSION, HEAD_CODES[head.kind], head.k, head.lam,
                               float(head.sigma), model.dims.width, model.dims.height,
                               model.n_keypoints, n_out, n_in)
    return header + model.weights.astype("<f8").tobytes() + model.biases.astype("<f8").tobytes()


def model_from_bytes(buf: bytes, path="<bytes>") -> ToyModel:
    if len(buf) < MODEL_HEADER.size:
        raise FormatError(f"{path}: truncated header")
    magic, version, code, k, lam, sigma, w, h, n_kp, n_out, n_in = MODEL_HEADER.unpack_from(buf)
    _check_magic(magic, version, MODEL_MAGIC, MODEL_VERSION, path)
    kinds = {v: name for name, v in HEAD_CODES.items()}
    if code not in kinds:
        raise FormatError(f"{path}: unknown head code {code}")
    if len(buf) != MODEL_HEADER.size + 8 * (n_out * n_in + n_out):
        raise FormatError(f"{path}: payload size does not match header")
    off = MODEL_HEADER.size
    weights = np.frombuffer(buf, "<f8", n_out * n_in, off).astype(float).reshape(n_out, n_in)
    biases = np.frombuffer(buf, "<f8", n_out, off + 8 * n_out * n_in).astype(float)
    model = ToyModel(weights, biases, Head(kinds[code], k, lam, sigma), n_kp, ImageDims(w, h))
    if model.output_size != n_out or w * h != n_in:
        raise FormatError(f"{path}: weight shape inconsistent with head and dims")
    return model


def save_dataset(path, data: list[SyntheticSample]) -> None:
    Path(path).write_bytes(dataset_to_bytes(data))


def load_dataset(path) -> list[SyntheticSample]:
    return dataset_from_bytes(Path(path).read_bytes(), path)


def save_model(path, model: ToyModel) -> None:
    Path(path).write_bytes(model_to_bytes(model))


def load_model(path) -> ToyModel:
    return model_from_bytes(Path(path).read_bytes(), path)
