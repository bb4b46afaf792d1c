"""Command-line interface: gen, edit, parse, glyph, train, eval, serve.

Exit codes: 0 success, 1 validation error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from ..errors import WordcraftError
from ..glyph import (
    compose_word,
    depth_from_coverage,
    format_contour_text,
    load_word,
    pngio,
)
from ..prompt import (
    UserRequest,
    config_from_env,
    expand_bundle,
    llm_decompose,
    parse_structured,
    serialize,
    validate_document,
)
from ..sampler import SamplerEngine, Schedule, Trajectory, regions_from_pixels
from ..sampler.benchmark import run_benchmark
from .sessions import transparency_alpha


def _read(path, mode="rb"):
    with open(path, mode) as fh:
        return fh.read()


def _write(path, data):
    mode = "wb" if isinstance(data, (bytes, bytearray)) else "w"
    with open(path, mode) as fh:
        fh.write(data)


def _load_engine(checkpoint_path):
    from ..model import model_from_checkpoint

    model, _ = model_from_checkpoint(_read(checkpoint_path))
    return SamplerEngine(model)


def _decode_mask_arg(value, size):
    """Mask argument: a path to a PNG, or an inline rle:... string."""
    if value.startswith("rle:"):
        from ..attention import decode_rle

        mask = decode_rle(value)
    else:
        mask = pngio.decode_mask_png(_read(value))
    if mask.shape != (size, size):
        raise WordcraftError(
            f"mask {mask.shape[1]}x{mask.shape[0]} does not match canvas {size}")
    return mask


def _prepare_depth(font_path, character, size):
    glyphs = load_word(_read(font_path), character)
    coverage = compose_word(glyphs, size, size)
    return depth_from_coverage(coverage).values.astype(np.float32)


# --- subcommands ----------------------------------------------------------------


def cmd_gen(args):
    engine = _load_engine(args.checkpoint)
    bundle = validate_document(_read(args.prompt_file, "r"))
    size = engine.config.image_size
    depth = _prepare_depth(args.font, bundle.character, size)
    regions = None
    if args.mask:
        masks = [_decode_mask_arg(m, size) for m in args.mask]
        regions = regions_from_pixels(masks, engine.config)
    schedule = Schedule(steps=args.steps)
    image, traj = engine.generate(bundle, depth, regions=regions,
                                  seed=args.seed, schedule=schedule)
    alpha = None
    if args.transparent:
        alpha = transparency_alpha(regions, depth, engine.config.patch_size)
    _write(args.out, pngio.encode_rgb_png(image, alpha=alpha))
    if args.traj:
        _write(args.traj, traj.to_bytes())
    print(f"wrote {args.out}" + (f" and {args.traj}" if args.traj else ""))
    return 0


def cmd_edit(args):
    engine = _load_engine(args.checkpoint)
    source = Trajectory.from_bytes(_read(args.traj))
    size = engine.config.image_size
    prompts = {}
    for rid, text in args.region or []:
        prompts[int(rid)] = text.split()
    if not args.mask or not prompts:
        raise WordcraftError("edit needs --mask and --region")
    if sorted(prompts) != list(range(1, len(args.mask) + 1)):
        raise WordcraftError("--region ids must be contiguous from 1, one per mask")
    masks = [_decode_mask_arg(m, size) for m in args.mask]
    regions = regions_from_pixels(masks, engine.config)
    region_prompts = [prompts[k] for k in sorted(prompts)]
    image, traj = engine.edit(source, regions, region_prompts, seed=args.seed)
    alpha = None
    if args.transparent:
        alpha = transparency_alpha(regions, source.depth, engine.config.patch_size)
    _write(args.out, pngio.encode_rgb_png(image, alpha=alpha))
    if args.traj_out:
        _write(args.traj_out, traj.to_bytes())
    print(f"wrote {args.out}" + (f" and {args.traj_out}" if args.traj_out else ""))
    return 0


def cmd_parse(args):
    text = args.text if args.text is not None else sys.stdin.read()
    if args.use_llm:
        bundle = llm_decompose(UserRequest(query=text), config_from_env())
        bundle = expand_bundle(bundle)
    else:
        bundle = parse_structured(text)
    print(serialize(bundle))
    return 0


def cmd_glyph(args):
    glyphs = load_word(_read(args.font), args.text)
    coverage = compose_word(glyphs, args.size, args.size,
                            supersample=args.supersample)
    _write(args.out, pngio.encode_gray_png(coverage.values, bit_depth=args.bits))
    if args.depth_out:
        depth = depth_from_coverage(coverage)
        _write(args.depth_out, pngio.encode_gray_png(depth.values,
                                                     bit_depth=args.bits))
    if args.contours_out:
        text = "".join(format_contour_text(g) for g in glyphs)
        _write(args.contours_out, text)
    print(f"wrote {args.out}")
    return 0


def cmd_train(args):
    from ..model import (DenoiserConfig, TrainSettings, builtin_glyph_set,
                         synth_dataset, train, write_checkpoint)

    font_bytes = _read(args.font) if args.font else None
    config = DenoiserConfig(seed=args.model_seed)
    glyphs = builtin_glyph_set(config.image_size, font_bytes)
    examples = synth_dataset(glyphs, args.dataset_size, seed=args.data_seed,
                             token_dropout=args.token_dropout)
    settings = TrainSettings(steps=args.steps, batch_size=args.batch_size,
                             lr=args.lr, seed=args.train_seed)

    def progress(step, loss):
        print(f"step {step}: loss {loss:.4f}", flush=True)

    model, curve, seconds = train(config, examples, settings,
                                  progress=progress if args.verbose else None)
    write_checkpoint(model, args.out, extra={
        "train_seconds": seconds,
        "steps": settings.steps,
        "final_loss": curve[-1] if curve else None,
    })
    if args.curve_out:
        _write(args.curve_out, json.dumps(curve))
    print(f"trained {settings.steps} steps in {seconds:.0f}s -> {args.out}")
    return 0


def cmd_eval(args):
    from ..model import builtin_glyph_set

    engine = _load_engine(args.checkpoint)
    font_bytes = _read(args.font) if args.font else None
    glyphs = builtin_glyph_set(engine.config.image_size, font_bytes)
    report = run_benchmark(engine, glyphs, n_global=args.n_global,
                           n_regional=args.n_regional, seed=args.seed,
                           steps=args.steps)
    if args.report:
        _write(args.report, json.dumps(report, indent=1))
    summary = report["summary"]
    print(json.dumps(summary, indent=2))
    if args.check:
        ok = (summary["global_color_accuracy"] >= args.min_global
              and summary["regional_color_accuracy"] >= args.min_regional)
        print("PASS" if ok else "FAIL")
        return 0 if ok else 1
    return 0


def cmd_serve(args):
    import uvicorn

    from .app import create_app
    from .config import load_config

    overrides = {}
    if args.addr:
        overrides["addr"] = args.addr
    if args.store_dir:
        overrides["store_dir"] = args.store_dir
    if args.checkpoint:
        overrides["checkpoint_path"] = args.checkpoint
    cfg = load_config(args.config, **overrides)
    if args.font:
        cfg.font_paths = {name: path for name, path in
                          (f.split("=", 1) for f in args.font)}
    app = create_app(cfg)
    uvicorn.run(app, host=cfg.host, port=cfg.port, log_level="warning")
    return 0


# --- parser -----------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="wordcraft",
                                description="artistic typography engine")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an image from a prompt document")
    g.add_argument("--prompt-file", required=True)
    g.add_argument("--font", required=True)
    g.add_argument("--checkpoint", required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--steps", type=int, default=32)
    g.add_argument("--out", required=True)
    g.add_argument("--traj")
    g.add_argument("--mask", action="append",
                   help="region mask (PNG path or rle string), repeatable")
    g.add_argument("--transparent", action="store_true")
    g.set_defaults(func=cmd_gen)

    e = sub.add_parser("edit", help="noise-blending edit of a trajectory")
    e.add_argument("--traj", required=True)
    e.add_argument("--checkpoint", required=True)
    e.add_argument("--mask", action="append", required=True)
    e.add_argument("--region", nargs=2, action="append",
                   metavar=("ID", "PROMPT"))
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out", required=True)
    e.add_argument("--traj-out")
    e.add_argument("--transparent", action="store_true")
    e.set_defaults(func=cmd_edit)

    pa = sub.add_parser("parse", help="parse a request into a prompt document")
    pa.add_argument("--text", help="request text (default: stdin)")
    pa.add_argument("--use-llm", action="store_true")
    pa.set_defaults(func=cmd_parse)

    gl = sub.add_parser("glyph", help="rasterize a word and its depth map")
    gl.add_argument("--font", required=True)
    gl.add_argument("--text", required=True)
    gl.add_argument("--size", type=int, default=256)
    gl.add_argument("--supersample", type=int, default=4)
    gl.add_argument("--bits", type=int, default=8, choices=(8, 16))
    gl.add_argument("--out", required=True)
    gl.add_argument("--depth-out")
    gl.add_argument("--contours-out")
    gl.set_defaults(func=cmd_glyph)

    tr = sub.add_parser("train", help="train the denoiser on the synthetic set")
    tr.add_argument("--font")
    tr.add_argument("--steps", type=int, default=4000)
    tr.add_argument("--batch-size", type=int, default=32)
    tr.add_argument("--lr", type=float, default=2e-3)
    tr.add_argument("--dataset-size", type=int, default=4096)
    tr.add_argument("--token-dropout", type=float, default=0.1)
    tr.add_argument("--data-seed", type=int, default=7)
    tr.add_argument("--train-seed", type=int, default=2)
    tr.add_argument("--model-seed", type=int, default=1)
    tr.add_argument("--out", required=True)
    tr.add_argument("--curve-out")
    tr.add_argument("--verbose", action="store_true")
    tr.set_defaults(func=cmd_train)

    ev = sub.add_parser("eval", help="region-style accuracy benchmark")
    ev.add_argument("--checkpoint", required=True)
    ev.add_argument("--font")
    ev.add_argument("--report")
    ev.add_argument("--n-global", type=int, default=100)
    ev.add_argument("--n-regional", type=int, default=100)
    ev.add_argument("--seed", type=int, default=11)
    ev.add_argument("--steps", type=int, default=32)
    ev.add_argument("--min-global", type=float, default=0.95)
    ev.add_argument("--min-regional", type=float, default=0.90)
    ev.add_argument("--check", action=argparse.BooleanOptionalAction,
                    default=True)
    ev.set_defaults(func=cmd_eval)

    sv = sub.add_parser("serve", help="run the HTTP session service")
    sv.add_argument("--addr")
    sv.add_argument("--store-dir")
    sv.add_argument("--checkpoint")
    sv.add_argument("--config")
    sv.add_argument("--font", action="append", metavar="NAME=PATH")
    sv.set_defaults(func=cmd_serve)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except WordcraftError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
