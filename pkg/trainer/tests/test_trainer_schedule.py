import math

import pytest

from sparsect_trainer import best_epoch, lr_schedule, stopped_epoch
from sparsect_trainer.config import TrainConfig


class TestLrSchedule:
    def test_published_values_exact(self):
        assert abs(lr_schedule(0) - 0.001) <= 1e-9
        assert abs(lr_schedule(1) - 9.0484e-4) <= 1e-8
        assert abs(lr_schedule(1) - 0.001 * math.exp(-0.1)) <= 1e-9
        assert abs(lr_schedule(30) - 4.9787e-5) <= 1e-9
        assert abs(lr_schedule(30) - 0.001 * math.exp(-3.0)) <= 1e-9

    def test_strictly_decreasing(self):
        rates = [lr_schedule(n) for n in range(40)]
        assert all(a > b for a, b in zip(rates, rates[1:]))

    def test_negative_epoch_rejected(self):
        with pytest.raises(ValueError):
            lr_schedule(-1)


class TestEarlyStoppingRule:
    def test_stall_sequence_stops_at_patience_boundary(self):
        # improves at epoch 2, then 20 epochs without improvement
        losses = [5.0, 4.0] + [4.0] * 20
        assert stopped_epoch(losses, patience=20) == 22
        assert best_epoch(losses) == 2

    def test_no_stop_when_improving(self):
        losses = [5.0, 4.0, 3.0, 2.0]
        assert stopped_epoch(losses, patience=20) is None
        assert best_epoch(losses) == 4

    def test_stop_requires_full_patience(self):
        losses = [5.0] + [5.0] * 19    # only 19 stalls after the first epoch
        assert stopped_epoch(losses, patience=20) is None
        assert stopped_epoch(losses + [5.0], patience=20) == 21

    def test_tie_keeps_first_best(self):
        assert best_epoch([3.0, 2.0, 2.0, 4.0]) == 2


class TestTrainConfig:
    @pytest.mark.parametrize("variant,batch,epochs", [
        ("2d-dualframe", 6, 30),
        ("vanilla-2.5d", 16, 30),
        ("unet-3d", 16, 20),
    ])
    def test_variant_defaults(self, variant, batch, epochs):
        c = TrainConfig(variant=variant)
        assert (c.batch_size, c.max_epochs) == (batch, epochs)
        assert c.initial_lr == 0.001
        assert c.patience == 20

    def test_overridable(self):
        c = TrainConfig(variant="2d-dualframe", batch_size=2, max_epochs=5)
        assert (c.batch_size, c.max_epochs) == (2, 5)

    def test_unknown_variant_rejected(self):
        with pytest.raises(ValueError):
            TrainConfig(variant="resnet")
