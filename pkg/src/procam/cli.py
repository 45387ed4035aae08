"""Command-line entry point exposing every pipeline stage.

Exit codes: 0 success, 1 usage error, 2 processing error.  All randomness
comes from seeds carried in input files, so runs are reproducible.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import geometry, projimage, report, shaderlang, simulator, slcodec
from .effects import EffectSpec, render_effect
from .images import load_rgb, save_rgb
from .masks import Mask, magic_wand, magnetic_lasso, path_to_mask, quick_select


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors instead of argparse's 2
        raise UsageError(message)


def _parse_size(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise UsageError(f"expected WxH, got {text!r}") from None


def _parse_point(text: str) -> tuple[int, int]:
    try:
        x, y = text.split(",")
        return int(x), int(y)
    except ValueError:
        raise UsageError(f"expected X,Y, got {text!r}") from None


def _parse_points(text: str) -> list[tuple[int, int]]:
    return [_parse_point(part) for part in text.split(";") if part]


def build_parser() -> _Parser:
    parser = _Parser(prog="procam", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("patterns", help="write structured-light pattern frames")
    p.add_argument("--proj-size", required=True, help="projector size WxH")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("decode", help="decode captures into a correspondence map")
    p.add_argument("--captures", required=True, help="directory of capture_###.png")
    p.add_argument("--proj-size", required=True, help="projector size WxH")
    p.add_argument("--out", required=True, help="output .lfcm file")
    p.add_argument("--contrast-threshold", type=float, default=slcodec.DEFAULT_CONTRAST_THRESHOLD)

    p = sub.add_parser("projimage", help="reconstruct the projector image")
    p.add_argument("--corr", required=True, help="correspondence .lfcm file")
    p.add_argument("--camera", required=True, help="camera color image")
    p.add_argument("--out", required=True, help="output PNG")
    p.add_argument("--fill-radius", type=int, default=8, help="hole-fill passes (0 disables)")
    p.add_argument("--coverage-out", help="optional 16-bit coverage PNG")

    p = sub.add_parser("depth", help="triangulate a depth map")
    p.add_argument("--corr", required=True)
    p.add_argument("--rig", required=True, help="rig.json")
    p.add_argument("--out", required=True, help="output .pfm")

    p = sub.add_parser("mask", help="selection tools")
    msub = p.add_subparsers(dest="tool", required=True)
    m = msub.add_parser("wand", help="flood fill from a seed pixel")
    m.add_argument("--image", required=True)
    m.add_argument("--seed", required=True, help="X,Y")
    m.add_argument("--tolerance", type=float, required=True)
    m.add_argument("--connectivity", type=int, choices=(4, 8), default=4)
    m.add_argument("--out", required=True)
    m = msub.add_parser("quick", help="region growing from a scribble")
    m.add_argument("--image", required=True)
    m.add_argument("--scribble", required=True, help="X,Y;X,Y;...")
    m.add_argument("--tolerance", type=float, required=True)
    m.add_argument("--out", required=True)
    m = msub.add_parser("lasso", help="edge-following path through anchors")
    m.add_argument("--image", required=True)
    m.add_argument("--anchors", required=True, help="X,Y;X,Y;...")
    m.add_argument("--out", required=True)

    p = sub.add_parser("effect", help="procedural effects")
    esub = p.add_subparsers(dest="action", required=True)
    e = esub.add_parser("render", help="render an effect frame sequence")
    e.add_argument("--spec", required=True, help="effect spec JSON")
    e.add_argument("--scene", required=True, help="projector image PNG")
    e.add_argument("--t0", type=float, default=0.0)
    e.add_argument("--t1", type=float, default=1.0)
    e.add_argument("--fps", type=int, default=15)
    e.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("shader", help="shader interpreter")
    ssub = p.add_subparsers(dest="action", required=True)
    s = ssub.add_parser("render", help="render one shader frame")
    s.add_argument("--src", required=True, help=".glsl source file")
    s.add_argument("--size", required=True, help="WxH")
    s.add_argument("--t", type=float, default=0.0)
    s.add_argument("--channel0", help="RGB image bound to iChannel0")
    s.add_argument("--out", required=True)

    p = sub.add_parser("sim", help="projector-camera simulator")
    simsub = p.add_subparsers(dest="action", required=True)
    s = simsub.add_parser("capture", help="capture a pattern directory")
    s.add_argument("--scene", required=True, help="scene.json")
    s.add_argument("--patterns", required=True, help="pattern directory")
    s.add_argument("--out", required=True, help="output capture directory")
    s = simsub.add_parser("truth", help="write ground-truth correspondence")
    s.add_argument("--scene", required=True)
    s.add_argument("--out", required=True, help="output .lfcm")

    p = sub.add_parser("report", help="scan-quality figures and metrics.csv")
    p.add_argument("--corr", required=True)
    p.add_argument("--rig", help="optional rig.json for depth figures")
    p.add_argument("--truth", help="optional ground-truth .lfcm for error figures")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("serve", help="run the authoring service")
    p.add_argument("--port", type=int, default=8901)
    p.add_argument("--data-dir", help="session persistence directory")
    p.add_argument("--static-dir", help="UI build to serve at / (default: autodetect frontend/dist)")

    return parser


def _cmd_patterns(args) -> None:
    w, h = _parse_size(args.proj_size)
    patterns = slcodec.generate_patterns(w, h)
    slcodec.write_pattern_dir(patterns, args.out)
    print(f"wrote {len(patterns.frames)} pattern frames to {args.out}")


def _cmd_decode(args) -> None:
    w, h = _parse_size(args.proj_size)
    captures = slcodec.read_capture_dir(args.captures)
    manifest = slcodec.PatternManifest.for_size(w, h)
    corr = slcodec.decode(captures, manifest, contrast_threshold=args.contrast_threshold)
    corr.save(args.out)
    valid = corr.valid.mean()
    print(f"decoded {valid:.1%} valid pixels -> {args.out}")


def _cmd_projimage(args) -> None:
    corr = slcodec.CorrespondenceMap.load(args.corr)
    camera = load_rgb(args.camera)
    img = projimage.reconstruct(corr, camera, (corr.projector_width, corr.projector_height))
    if args.fill_radius > 0:
        img = projimage.fill_holes(img, max_radius=args.fill_radius)
    img.save(args.out, coverage_path=args.coverage_out)
    print(f"projector image -> {args.out}")


def _cmd_depth(args) -> None:
    corr = slcodec.CorrespondenceMap.load(args.corr)
    rig = geometry.load_rig(args.rig)
    dm = geometry.depth_map(rig, corr)
    dm.save_pfm(args.out)
    finite = dm.depth[np.isfinite(dm.depth)]
    mean = float(finite.mean()) if finite.size else float("nan")
    print(f"depth map -> {args.out} (mean {mean:.4f} m)")


def _cmd_mask(args) -> None:
    image = load_rgb(args.image)
    if args.tool == "wand":
        mask = magic_wand(image, _parse_point(args.seed), args.tolerance, args.connectivity)
    elif args.tool == "quick":
        mask = quick_select(image, _parse_points(args.scribble), args.tolerance)
    else:
        path = magnetic_lasso(image, _parse_points(args.anchors))
        h, w = image.shape[:2]
        mask = path_to_mask(path, (w, h))
    mask.save(args.out)
    print(f"mask ({int(mask.member.sum())} px) -> {args.out}")


def _cmd_effect_render(args) -> None:
    spec = EffectSpec.load(args.spec)
    scene = load_rgb(args.scene)
    mask = None
    if spec.mask:
        mask_path = Path(spec.mask)
        if not mask_path.is_absolute():
            mask_path = Path(args.spec).parent / mask_path
        mask = Mask.load(mask_path)
    if args.fps <= 0:
        raise UsageError("--fps must be positive")
    if args.t1 < args.t0:
        raise UsageError("--t1 must be >= --t0")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    count = max(1, int(round((args.t1 - args.t0) * args.fps)))
    for i in range(count):
        t = args.t0 + i / args.fps
        frame = render_effect(spec, scene, t, mask=mask)
        save_rgb(out / f"frame_{i:05d}.png", frame)
    print(f"wrote {count} frames to {args.out}")


def _cmd_shader_render(args) -> None:
    w, h = _parse_size(args.size)
    source = Path(args.src).read_text()
    program = shaderlang.compile_shader(source)
    channel0 = load_rgb(args.channel0) if args.channel0 else None
    uniforms = shaderlang.UniformBlock.for_frame(w, h, time=args.t, channel0=channel0)
    frame = shaderlang.render_frame(program, uniforms, (w, h))
    save_rgb(args.out, frame)
    print(f"shader frame -> {args.out}")


def _cmd_sim_capture(args) -> None:
    scene = simulator.load_scene(args.scene)
    patterns = slcodec.read_pattern_dir(args.patterns)
    captures = simulator.simulate_captures(scene, patterns)
    slcodec.write_capture_dir(captures, args.out)
    print(f"wrote {len(captures.frames)} captures to {args.out}")


def _cmd_sim_truth(args) -> None:
    scene = simulator.load_scene(args.scene)
    truth = simulator.ground_truth(scene)
    truth.save(args.out)
    print(f"ground truth ({truth.valid.mean():.1%} visible) -> {args.out}")


def _cmd_report(args) -> None:
    corr = slcodec.CorrespondenceMap.load(args.corr)
    rig = geometry.load_rig(args.rig) if args.rig else None
    truth = slcodec.CorrespondenceMap.load(args.truth) if args.truth else None
    metrics = report.scan_report(corr, args.out, rig=rig, truth=truth)
    for key, value in metrics.items():
        print(f"{key}: {value:.6g}")
    print(f"report -> {args.out}")


def _cmd_serve(args) -> None:
    import uvicorn

    from .service import create_app

    candidates = (
        [Path(args.static_dir)]
        if args.static_dir
        else [
            Path.cwd() / "frontend" / "dist",
            Path(__file__).resolve().parents[2] / "frontend" / "dist",
        ]
    )
    static = next((c for c in candidates if c.is_dir()), None)
    if static is not None:
        print(f"serving UI from {static}")
    else:
        print("no UI build found; serving the API only")
    app = create_app(data_dir=args.data_dir, static_dir=static)
    uvicorn.run(app, host="127.0.0.1", port=args.port)


_COMMANDS = {
    "patterns": _cmd_patterns,
    "decode": _cmd_decode,
    "projimage": _cmd_projimage,
    "depth": _cmd_depth,
    "mask": _cmd_mask,
    "report": _cmd_report,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    try:
        if args.command == "effect":
            _cmd_effect_render(args)
        elif args.command == "shader":
            _cmd_shader_render(args)
        elif args.command == "sim":
            if args.action == "capture":
                _cmd_sim_capture(args)
            else:
                _cmd_sim_truth(args)
        else:
            _COMMANDS[args.command](args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    except shaderlang.ShaderCompileError as e:
        for diag in e.diagnostics:
            print(f"shader error: {diag}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 0


def entrypoint() -> None:  # console_scripts hook
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
