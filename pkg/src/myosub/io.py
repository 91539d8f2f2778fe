"""CSV tables, datasets, lens files and model persistence.

Model files are UTF-8 JSON::

    {
      "format": "myosub-model",
      "version": 1,
      "generator": {"layer_dims": [...], "weights": [[...], ...], "biases": [[...], ...]},
      "train_config": {...TrainConfig fields...},
      "kernel": {"kind": "gaussian", "bandwidth2": 1.02},
      "autoencoder": null | {"encoder": <mlp>, "decoder": <mlp>}
    }

Each weight matrix is stored row-major as a flat list of float64 values of
shape (fan_in, fan_out). Python's float repr round-trips float64 exactly.
"""

import csv
import json
import math

import numpy as np

from .errors import InputError
from .generator import GeneratorNet, TrainConfig
from .kernel_learning import AutoencoderNet
from .kernel_mmd import KernelSpec
from .lens import LensDistribution
from .nn import Mlp

MODEL_FORMAT = "myosub-model"
MODEL_VERSION = 1


def _cell(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def _parse(text):
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def write_csv(path, rows, columns):
    """Write dict rows; floats use repr so reading back is exact.

    ``path`` may also be an open text stream.
    """
    if hasattr(path, "write"):
        _write_rows(path, rows, columns)
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        _write_rows(fh, rows, columns)


def _write_rows(fh, rows, columns):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in columns])


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        return [{k: _parse(v) for k, v in row.items()} for row in reader]


def rows_equal(a, b):
    """Row-wise equality that treats NaN as equal to NaN."""
    if len(a) != len(b):
        return False
    for ra, rb in zip(a, b):
        if ra.keys() != rb.keys():
            return False
        for key in ra:
            x, y = ra[key], rb[key]
            if isinstance(x, float) and isinstance(y, float) and math.isnan(x) and math.isnan(y):
                continue
            if x != y or type(x) is not type(y):
                return False
    return True


def load_dataset(path):
    """Read a CSV with a header whose last column is ``label`` (0/1).

    Returns ``(features, labels)``; labels is None when there is no label
    column.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty dataset file") from None
        rows = [r for r in reader if r]
    if not rows:
        raise InputError(f"{path}: dataset has no rows")
    try:
        table = np.array(rows, dtype=np.float64)
    except ValueError as exc:
        raise InputError(f"{path}: non-numeric value ({exc})") from None
    if table.shape[1] != len(header):
        raise InputError(f"{path}: rows do not match the header width")
    if header[-1].strip() == "label":
        labels = table[:, -1]
        if not np.all((labels == 0) | (labels == 1)):
            raise InputError(f"{path}: label column must hold 0/1 values")
        return table[:, :-1], labels.astype(np.int64)
    return table, None


def save_dataset(path, features, labels=None):
    features = np.asarray(features, dtype=np.float64)
    columns = [f"x{i + 1}" for i in range(features.shape[1])]
    rows = []
    for i, row in enumerate(features):
        rec = {c: float(v) for c, v in zip(columns, row)}
        if labels is not None:
            rec["label"] = int(labels[i])
        rows.append(rec)
    write_csv(path, rows, columns + (["label"] if labels is not None else []))


def write_lens(path, lens):
    rows = [{"mask": k, "probability": p} for k, p in lens.as_dict().items()]
    write_csv(path, rows, ["mask", "probability"])


def read_lens(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return LensDistribution.from_dict({r["mask"]: float(r["probability"]) for r in rows})


def write_loss_history(path, history):
    write_csv(
        path,
        [{"epoch": i, "mean_loss": float(v)} for i, v in enumerate(history)],
        ["epoch", "mean_loss"],
    )


def _mlp_to_dict(mlp):
    return {
        "layer_dims": mlp.dims,
        "weights": [w.ravel().tolist() for w in mlp.weights],
        "biases": [b.tolist() for b in mlp.biases],
    }


def _mlp_from_dict(obj):
    dims = obj["layer_dims"]
    weights = [
        np.array(w, dtype=np.float64).reshape(a, b)
        for w, a, b in zip(obj["weights"], dims[:-1], dims[1:])
    ]
    return Mlp(weights, [np.array(b, dtype=np.float64) for b in obj["biases"]])


def save_model(path, net, config, kernel=None, autoencoder=None):
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "generator": _mlp_to_dict(net.mlp),
        "train_config": config.to_dict(),
        "kernel": None if kernel is None else {"kind": kernel.kind, "bandwidth2": kernel.bandwidth2},
        "autoencoder": None
        if autoencoder is None
        else {
            "encoder": _mlp_to_dict(autoencoder.encoder),
            "decoder": _mlp_to_dict(autoencoder.decoder),
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)


def load_model(path):
    """Return a dict with ``net``, ``config``, ``kernel`` and ``autoencoder``."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != MODEL_FORMAT:
        raise InputError(f"{path}: not a model file")
    if doc.get("version") != MODEL_VERSION:
        raise InputError(f"{path}: unsupported model version {doc.get('version')}")
    config = TrainConfig.from_dict(doc["train_config"])
    net = GeneratorNet(_mlp_from_dict(doc["generator"]), rng_seed=config.seed)
    ae = None
    if doc.get("autoencoder"):
        ae = AutoencoderNet(
            _mlp_from_dict(doc["autoencoder"]["encoder"]),
            _mlp_from_dict(doc["autoencoder"]["decoder"]),
        )
    kernel = None
    if doc.get("kernel"):
        kernel = KernelSpec(doc["kernel"]["bandwidth2"], encoder=ae)
    return {"net": net, "config": config, "kernel": kernel, "autoencoder": ae}
