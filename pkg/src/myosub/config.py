"""Run configuration read from JSON."""

import json
from dataclasses import dataclass, field, fields

from .errors import InputError
from .generator import TrainConfig

COMMANDS = ("train", "sample", "test-myopicity", "od-bench", "synth-lens", "scalability")

# Keys each command cannot run without.
_REQUIRED = {
    "train": ("dataset_path", "output_path"),
    "sample": ("model_path",),
    "test-myopicity": ("dataset_path",),
    "od-bench": ("dataset_path",),
    "synth-lens": ("F_values",),
    "scalability": ("d_values",),
}


@dataclass
class RunConfig:
    """Everything one CLI invocation needs.

    ``train.seed`` is the run seed; repetition ``r`` uses ``seed + r``.
    """

    command: str = "train"
    dataset_path: str | None = None
    model_path: str | None = None
    lens_path: str | None = None
    output_path: str | None = None
    loss_path: str | None = None
    train: TrainConfig = field(default_factory=TrainConfig)
    detector: str = "lof"
    k: int | None = None
    alpha: float = 0.10
    num_permutations: int = 200
    repetitions: int = 10
    lens_samples: int = 500
    methods: list = field(default_factory=lambda: ["vgan", "fb", "full"])
    fb_k: int = 50
    myopicity: bool = True
    test_rows: int = 1000
    kernel_rows: int = 2000
    F_values: list | None = None
    n: int | None = None
    d_values: list | None = None
    time_budget: float | None = None

    @classmethod
    def from_dict(cls, values):
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        values = dict(values)
        if "train" in values:
            if not isinstance(values["train"], dict):
                raise InputError("'train' must be an object")
            values["train"] = TrainConfig.from_dict(values["train"])
        return cls(**values)

    @classmethod
    def load(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                values = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON ({exc})") from None
        if not isinstance(values, dict):
            raise InputError(f"{path}: config must be a JSON object")
        return cls.from_dict(values)

    def validate(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        missing = [key for key in _REQUIRED[self.command] if getattr(self, key) is None]
        if missing:
            raise InputError(f"{self.command} needs config keys {missing}")
        if self.command == "test-myopicity" and self.model_path is None and self.lens_path is None:
            raise InputError("test-myopicity needs model_path or lens_path")
        if not 0.0 < self.alpha < 1.0:
            raise InputError("alpha must lie in (0, 1)")
        if self.repetitions < 1:
            raise InputError("repetitions must be positive")
        bad = set(self.methods) - {"vgan", "fb", "full"}
        if bad:
            raise InputError(f"unknown methods {sorted(bad)}")
        if self.detector not in ("lof", "knn"):
            raise InputError(f"unknown detector {self.detector!r}")
        return self
