"""Fully convolutional encoder-decoder architectures for artifact prediction.

Three variants:

- ``2d-dualframe``: 2D U-Net whose skip pathway carries the high-frequency
  detail ``enc - Upsample(AvgPool(enc))`` instead of the raw encoder feature,
  so the decoder receives exactly the information the pooling discarded.
- ``vanilla-2.5d``: plain 2D U-Net with concatenation skips; used for
  3-channel orthogonal-cut and neighboring-slice inputs as well as
  single-channel patches.
- ``unet-3d``: the same encoder-decoder scheme with volumetric convolutions.

All variants output one channel at the input spatial shape (the predicted
artifact image) with a linear final activation.
"""

from __future__ import annotations

from tensorflow import keras
from tensorflow.keras import layers


def _default_widths(variant: str, input_shape) -> tuple[int, int]:
    spatial = input_shape[:-1]
    if variant == "unet-3d":
        return 32, 3
    stages = 4 if min(spatial) >= 256 else 3
    return 64, stages


def _conv_block(x, channels, dims):
    conv = layers.Conv3D if dims == 3 else layers.Conv2D
    for _ in range(2):
        x = conv(channels, 3, padding="same", use_bias=False)(x)
        x = layers.BatchNormalization()(x)
        x = layers.ReLU()(x)
    return x


def build_model(variant: str, input_shape, base_channels: int | None = None,
                stages: int | None = None, zero_output_init: bool = False):
    """Build a compiled-ready Keras model; spatial dims must be divisible by 2**stages."""
    from .config import VARIANTS

    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    dims = 3 if variant == "unet-3d" else 2
    if len(input_shape) != dims + 1:
        raise ValueError(
            f"variant {variant} needs a {dims}D spatial shape plus channels, "
            f"got {tuple(input_shape)}"
        )
    dflt_channels, dflt_stages = _default_widths(variant, input_shape)
    base_channels = base_channels or dflt_channels
    stages = stages or dflt_stages
    spatial = input_shape[:-1]
    if any(s % (2 ** stages) for s in spatial):
        raise ValueError(f"spatial shape {spatial} not divisible by 2**{stages}")

    conv = layers.Conv3D if dims == 3 else layers.Conv2D
    up = layers.UpSampling3D if dims == 3 else layers.UpSampling2D
    pool = layers.AveragePooling3D if dims == 3 else layers.AveragePooling2D

    inputs = keras.Input(shape=tuple(input_shape))
    x = inputs
    skips = []
    for level in range(stages):
        x = _conv_block(x, base_channels * 2 ** level, dims)
        if variant == "2d-dualframe":
            low = up(2)(pool(2)(x))
            skips.append(layers.Subtract()([x, low]))
        else:
            skips.append(x)
        x = pool(2)(x)
    x = _conv_block(x, base_channels * 2 ** stages, dims)
    for level in reversed(range(stages)):
        x = up(2)(x)
        x = conv(base_channels * 2 ** level, 2, padding="same")(x)
        x = layers.Concatenate()([skips[level], x])
        x = _conv_block(x, base_channels * 2 ** level, dims)
    init = "zeros" if zero_output_init else "glorot_uniform"
    outputs = conv(1, 1, padding="same", activation=None, kernel_initializer=init,
                   bias_initializer="zeros")(x)
    return keras.Model(inputs, outputs, name=variant.replace(".", "_"))
