"""Training loop: manifest-driven data loading, fitting, history, weights."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import container
from .config import TrainConfig
from .schedule import best_epoch, lr_schedule


@dataclass(frozen=True)
class CheckpointRecord:
    epoch: int            # 1-based
    train_loss: float
    val_loss: float
    lr: float
    is_best: bool


def _split_of(manifest: dict, sample: dict) -> str:
    return manifest["subjects"][sample["subject"]]


def load_samples(root, mode: str, views: int, splits: tuple[str, ...]):
    """Stack (inputs, targets) float32 arrays for the requested splits.

    Inputs and targets gain a trailing channel axis when stored without one.
    """
    root = Path(root)
    manifest = container.load_manifest(root)
    inputs, targets, records = [], [], []
    for sample in manifest["samples"]:
        if sample["mode"] != mode or sample["views"] != views:
            continue
        if _split_of(manifest, sample) not in splits:
            continue
        x, _ = container.read_tensor(root / sample["input"])
        y, _ = container.read_tensor(root / sample["target"])
        inputs.append(x)
        targets.append(y)
        records.append(sample)
    if not inputs:
        raise ValueError(f"no {mode}/{views} samples in splits {splits} under {root}")
    x = np.stack(inputs)
    y = np.stack(targets)
    dims = 3 if mode == "3d" else 2
    if x.ndim == dims + 1:
        x = x[..., None]
    if y.ndim == dims + 1:
        y = y[..., None]
    return x, y, records


def train(config: TrainConfig, root, mode: str, views: int, out_dir,
          base_channels: int | None = None, stages: int | None = None,
          validation_data=None, train_data=None) -> list[CheckpointRecord]:
    """Fit a fresh model for one view level and persist best-epoch weights.

    ``train_data``/``validation_data`` override manifest loading for tests;
    normally both come from the manifest's train and validation splits.
    """
    from tensorflow import keras

    from .models import build_model

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    keras.utils.set_random_seed(config.seed)
    if train_data is None:
        train_data = load_samples(root, mode, views, ("train",))[:2]
    if validation_data is None:
        validation_data = load_samples(root, mode, views, ("validation",))[:2]
    x, y = train_data
    if x.shape[1:-1] != y.shape[1:-1]:
        raise ValueError(f"input/target spatial shapes differ: {x.shape} vs {y.shape}")

    variant = config.variant
    model = build_model(variant, x.shape[1:],
                        base_channels=base_channels or config.base_channels,
                        stages=stages or config.stages)
    model.compile(optimizer=keras.optimizers.Adam(config.initial_lr), loss="mse")
    callbacks = [
        keras.callbacks.LearningRateScheduler(
            lambda n: lr_schedule(n, config.initial_lr, config.lr_decay)),
        keras.callbacks.EarlyStopping(monitor="val_loss", patience=config.patience,
                                      restore_best_weights=True),
        # persists the best epoch even when training runs to max_epochs
        keras.callbacks.ModelCheckpoint(out_dir / "model.keras", monitor="val_loss",
                                        save_best_only=True),
    ]
    history = model.fit(x, y, batch_size=config.batch_size, epochs=config.max_epochs,
                        validation_data=validation_data, callbacks=callbacks,
                        shuffle=True, verbose=0)

    val_losses = history.history["val_loss"]
    best = best_epoch(val_losses)
    records = [
        CheckpointRecord(
            epoch=i + 1,
            train_loss=float(history.history["loss"][i]),
            val_loss=float(val_losses[i]),
            lr=lr_schedule(i, config.initial_lr, config.lr_decay),
            is_best=(i + 1 == best),
        )
        for i in range(len(val_losses))
    ]

    lines = ["epoch\tlr\ttrain_loss\tval_loss\tbest"]
    for r in records:
        lines.append(f"{r.epoch}\t{r.lr:.10g}\t{r.train_loss:.10g}"
                     f"\t{r.val_loss:.10g}\t{int(r.is_best)}")
    (out_dir / "history.tsv").write_text("\n".join(lines) + "\n")
    return records


def predict(model_path, root, mode: str, views: int, split: str, pred_root) -> int:
    """Write one prediction container per sample; returns the sample count.

    Prediction files mirror the sample tree under ``pred_root`` with ``_pred``
    in place of ``_input`` (the layout the scoring tool consumes).
    """
    from tensorflow import keras

    model = keras.models.load_model(model_path)
    root = Path(root)
    pred_root = Path(pred_root)
    x, _, records = load_samples(root, mode, views, (split,))
    preds = model.predict(x, batch_size=16, verbose=0)
    for sample, pred in zip(records, preds):
        rel = sample["input"].replace("samples/", "", 1)
        rel = rel.replace("_input.spct", "_pred.spct")
        container.write_tensor(pred_root / rel,
                               pred.reshape(sample["target_shape"]),
                               {"model": Path(model_path).name, "views": views})
    return len(records)
