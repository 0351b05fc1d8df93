"""Command-line surface mirroring TrainConfig plus a predict subcommand."""

from __future__ import annotations

import argparse
import sys

from .config import VARIANTS, TrainConfig
from .training import predict, train


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sparsect-train",
                                description="Artifact-prediction model trainer")
    sub = p.add_subparsers(dest="command", required=True)

    tr = sub.add_parser("train", help="train one model per view level")
    tr.add_argument("--data", required=True, help="dataset root with manifest.json")
    tr.add_argument("--mode", required=True,
                    help="sample mode to train on (2d, 2d3ch, 25d, 3d, patch-*)")
    tr.add_argument("--views", type=int, required=True)
    tr.add_argument("--out", required=True, help="directory for weights and history")
    tr.add_argument("--variant", choices=VARIANTS, required=True)
    tr.add_argument("--batch-size", type=int, default=None)
    tr.add_argument("--max-epochs", type=int, default=None)
    tr.add_argument("--initial-lr", type=float, default=0.001)
    tr.add_argument("--lr-decay", type=float, default=0.1)
    tr.add_argument("--patience", type=int, default=20)
    tr.add_argument("--seed", type=int, default=0)
    tr.add_argument("--base-channels", type=int, default=None)
    tr.add_argument("--stages", type=int, default=None)
    tr.set_defaults(func=cmd_train)

    pr = sub.add_parser("predict", help="write prediction containers for a split")
    pr.add_argument("--data", required=True)
    pr.add_argument("--mode", required=True)
    pr.add_argument("--views", type=int, required=True)
    pr.add_argument("--model", required=True, help="saved model file")
    pr.add_argument("--split", choices=("train", "validation", "test"), default="test")
    pr.add_argument("--predictions", required=True)
    pr.set_defaults(func=cmd_predict)
    return p


def cmd_train(args) -> int:
    config = TrainConfig(
        variant=args.variant, batch_size=args.batch_size, max_epochs=args.max_epochs,
        initial_lr=args.initial_lr, lr_decay=args.lr_decay, patience=args.patience,
        seed=args.seed, base_channels=args.base_channels, stages=args.stages,
    )
    records = train(config, args.data, args.mode, args.views, args.out)
    best = next(r for r in records if r.is_best)
    print(f"trained {len(records)} epochs; best epoch {best.epoch} "
          f"(val loss {best.val_loss:.6g}); saved under {args.out}")
    return 0


def cmd_predict(args) -> int:
    n = predict(args.model, args.data, args.mode, args.views, args.split,
                args.predictions)
    print(f"wrote {n} predictions under {args.predictions}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
