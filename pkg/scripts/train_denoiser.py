#!/usr/bin/env python3
"""Train the denoiser on the synthetic glyph set and run the benchmark.

Produces checkpoints/denoiser.wcck plus an eval report; equivalent to
`wordcraft train` followed by `wordcraft eval`.
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from wordcraft.service.cli import main as cli  # noqa: E402

HERE = os.path.dirname(os.path.abspath(__file__))
FONT = os.path.join(HERE, "..", "assets", "wctest.ttf")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=4500)
    ap.add_argument("--out-dir", default=os.path.join(HERE, "..", "checkpoints"))
    args = ap.parse_args()
    os.makedirs(args.out_dir, exist_ok=True)
    ck = os.path.join(args.out_dir, "denoiser.wcck")
    report = os.path.join(args.out_dir, "eval_report.json")
    rc = cli(["train", "--font", FONT, "--steps", str(args.steps),
              "--out", ck, "--verbose",
              "--curve-out", os.path.join(args.out_dir, "loss_curve.json")])
    if rc != 0:
        return rc
    return cli(["eval", "--checkpoint", ck, "--font", FONT,
                "--report", report])


if __name__ == "__main__":
    sys.exit(main())
