"""Learning-rate schedule and early-stopping rule as pure functions.

Keras callbacks apply these during training; keeping the rules standalone
makes them unit-testable without a session.
"""

from __future__ import annotations

import math


def lr_schedule(epoch: int, initial_lr: float = 0.001, decay: float = 0.1) -> float:
    """lr_n = initial_lr * exp(-decay * n) for epoch index n >= 0."""
    if epoch < 0:
        raise ValueError("epoch index must be non-negative")
    return initial_lr * math.exp(-decay * epoch)


def best_epoch(val_losses) -> int:
    """1-based epoch with the smallest validation loss (first on ties)."""
    losses = list(val_losses)
    if not losses:
        raise ValueError("empty loss history")
    return int(min(range(len(losses)), key=losses.__getitem__)) + 1


def stopped_epoch(val_losses, patience: int) -> int | None:
    """1-based epoch at which training stops, or None if it never does.

    Training stops after `patience` consecutive epochs without improvement
    over the best validation loss seen so far.
    """
    best = math.inf
    stall = 0
    for i, loss in enumerate(val_losses, start=1):
        if loss < best:
            best = loss
            stall = 0
        else:
            stall += 1
            if stall >= patience:
                return i
    return None
