"""Training configuration with per-architecture defaults."""

from __future__ import annotations

from dataclasses import dataclass, field

VARIANTS = ("2d-dualframe", "vanilla-2.5d", "unet-3d")

# variant -> (batch size, max epochs)
_VARIANT_DEFAULTS = {
    "2d-dualframe": (6, 30),
    "vanilla-2.5d": (16, 30),
    "unet-3d": (16, 20),
}


@dataclass
class TrainConfig:
    variant: str
    batch_size: int | None = None
    max_epochs: int | None = None
    initial_lr: float = 0.001
    lr_decay: float = 0.1          # per-epoch exponential decay exponent
    patience: int = 20
    seed: int = 0
    base_channels: int | None = None
    stages: int | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; choose from {VARIANTS}")
        batch, epochs = _VARIANT_DEFAULTS[self.variant]
        if self.batch_size is None:
            self.batch_size = batch
        if self.max_epochs is None:
            self.max_epochs = epochs
        if self.batch_size < 1 or self.max_epochs < 1 or self.patience < 1:
            raise ValueError("batch size, epochs and patience must be positive")
        if self.initial_lr <= 0:
            raise ValueError("initial learning rate must be positive")
