"""Datasets: bundled 8x8 digits and IDX-format digit images."""

from __future__ import annotations

import gzip
import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

IDX_IMAGES = 0x00000803
IDX_LABELS = 0x00000801
DATA_ENV = "CCOSIM_DATA_DIR"


@dataclass
class Dataset:
    name: str
    x_train: np.ndarray
    y_train: np.ndarray
    x_test: np.ndarray
    y_test: np.ndarray

    def __post_init__(self):
        if len(self.x_train) != len(self.y_train) or len(self.x_test) != len(self.y_test):
            raise ValueError("features and labels differ in length")
        for x in (self.x_train, self.x_test):
            if x.size and (x.min() < 0 or x.max() > 1):
                raise ValueError("features must be scaled to [0, 1]")

    @property
    def n_features(self) -> int:
        return self.x_train.shape[1]

    @property
    def n_classes(self) -> int:
        return int(max(self.y_train.max(), self.y_test.max())) + 1


def load_digits_dataset(test_fraction: float = 0.3, seed: int = 0) -> Dataset:
    """sklearn's 8x8 digits, pixel values scaled by 1/16, stratified split."""
    from sklearn.datasets import load_digits
    from sklearn.model_selection import train_test_split

    d = load_digits()
    x = d.data.astype(np.float64) / 16.0
    xtr, xte, ytr, yte = train_test_split(
        x, d.target.astype(np.int64), test_size=test_fraction, random_state=seed, stratify=d.target
    )
    return Dataset("digits", xtr, ytr, xte, yte)


def read_idx(path) -> np.ndarray:
    """Read an IDX image (0x803) or label (0x801) file, gzip or plain."""
    path = Path(path)
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 8:
        raise ValueError(f"{path}: truncated IDX header")
    magic = struct.unpack(">I", raw[:4])[0]
    if magic == IDX_LABELS:
        (n,) = struct.unpack(">I", raw[4:8])
        shape, offset = (n,), 8
    elif magic == IDX_IMAGES:
        n, rows, cols = struct.unpack(">III", raw[4:16])
        shape, offset = (n, rows, cols), 16
    else:
        raise ValueError(f"{path}: unsupported IDX magic {magic:#010x}")
    data = np.frombuffer(raw, dtype=np.uint8, offset=offset)
    if data.size != int(np.prod(shape)):
        raise ValueError(f"{path}: payload size does not match header")
    return data.reshape(shape)


def write_idx(path, array: np.ndarray) -> None:
    array = np.asarray(array, dtype=np.uint8)
    if array.ndim == 1:
        header = struct.pack(">II", IDX_LABELS, array.shape[0])
    elif array.ndim == 3:
        header = struct.pack(">IIII", IDX_IMAGES, *array.shape)
    else:
        raise ValueError("IDX arrays must be 1-D labels or 3-D images")
    path = Path(path)
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "wb") as fh:
        fh.write(header + array.tobytes())


_MNIST_FILES = {
    "x_train": "train-images-idx3-ubyte",
    "y_train": "train-labels-idx1-ubyte",
    "x_test": "t10k-images-idx3-ubyte",
    "y_test": "t10k-labels-idx1-ubyte",
}


def _find(directory: Path, stem: str) -> Path | None:
    for cand in (stem, stem + ".gz", stem.replace("-idx", ".idx")):
        p = directory / cand
        if p.exists():
            return p
    return None


def load_idx_dataset(directory=None, name: str = "mnist") -> Dataset | None:
    """IDX digit set from ``directory`` (default: $CCOSIM_DATA_DIR), or None if absent."""
    directory = directory or os.environ.get(DATA_ENV)
    if not directory:
        return None
    directory = Path(directory)
    paths = {k: _find(directory, v) for k, v in _MNIST_FILES.items()}
    if any(p is None for p in paths.values()):
        return None
    arrays = {k: read_idx(p) for k, p in paths.items()}
    xtr = arrays["x_train"].reshape(len(arrays["x_train"]), -1) / 255.0
    xte = arrays["x_test"].reshape(len(arrays["x_test"]), -1) / 255.0
    return Dataset(name, xtr, arrays["y_train"].astype(np.int64), xte, arrays["y_test"].astype(np.int64))


def load_dataset(name: str = "digits", seed: int = 0) -> Dataset:
    if name == "digits":
        return load_digits_dataset(seed=seed)
    if name in ("mnist", "auto"):
        ds = load_idx_dataset()
        if ds is not None:
            return ds
        if name == "mnist":
            raise FileNotFoundError(f"IDX files not found; set {DATA_ENV}")
        return load_digits_dataset(seed=seed)
    raise ValueError(f"unknown dataset {name!r}")
