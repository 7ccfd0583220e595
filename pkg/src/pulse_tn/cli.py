"""Command-line interface: simulate, transform, estimate, evaluate, compare."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import clipio
from .core import FrameClip
from .diff import diff_normalized, frame_diff
from .extract import ExtractorKind, run_extractor
from .harness import compare_manifest, evaluate_manifest, write_report
from .hr import (
    SEGMENT_SECONDS,
    WELCH_NFFT,
    WELCH_OVERLAP,
    WELCH_WINDOW_LEN,
    BandpassSpec,
    bandpass,
    welch_psd,
)
from .simulate import PulseSpec, SceneSpec, parse_noise_string, render_noisy, synth_pulse
from .tn import TnConfig, tn

EXTRACTOR_NAMES = [k.value for k in ExtractorKind]


def _parse_size(text: str) -> tuple[int, int]:
    try:
        h, w = text.lower().split("x")
        return int(h), int(w)
    except ValueError:
        raise argparse.ArgumentTypeError(f"size must look like 8x8, got {text!r}") from None


def _add_pipeline_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--segment-s", type=float, default=SEGMENT_SECONDS, help="segment length in seconds")
    p.add_argument("--band-low", type=float, default=0.5, help="bandpass low edge in Hz")
    p.add_argument("--band-high", type=float, default=3.0, help="bandpass high edge in Hz")
    p.add_argument("--order", type=int, default=4, help="Butterworth filter order (even)")
    p.add_argument("--window-len", type=int, default=WELCH_WINDOW_LEN, help="Welch window length")
    p.add_argument("--overlap", type=float, default=WELCH_OVERLAP, help="Welch window overlap fraction")
    p.add_argument("--nfft", type=int, default=WELCH_NFFT, help="zero-padded FFT length")
    p.add_argument("--epsilon", type=float, default=1e-8, help="normalization guard epsilon")


def _band(args) -> BandpassSpec:
    return BandpassSpec(low_hz=args.band_low, high_hz=args.band_high, order=args.order)


def _pipeline_kwargs(args) -> dict:
    return dict(
        segment_s=args.segment_s,
        band=_band(args),
        window_len=args.window_len,
        overlap=args.overlap,
        nfft=args.nfft,
        epsilon=args.epsilon,
    )


def cmd_simulate(args) -> int:
    noise = parse_noise_string(args.noise)
    scene = SceneSpec(
        illumination=args.illumination,
        specular=args.specular,
        diffuse=args.diffuse,
        pixel_jitter=args.jitter,
        jitter_seed=args.seed,
    )
    pulse_spec = PulseSpec(
        hr_bpm=args.hr,
        amplitude=args.amplitude,
        shape=args.pulse_shape,
        harmonic_ratio=args.harmonic_ratio,
    )
    height, width = args.size
    pulse = synth_pulse(pulse_spec, args.fps, args.frames)
    clip = render_noisy(scene, pulse, noise, height, width)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    clipio.write_clip(clip, out, dtype=args.dtype)
    labels = Path(args.labels) if args.labels else out.parent / "labels.csv"
    clipio.upsert_label(labels, out.stem, args.hr)
    sidecar = {
        "hr_bpm": args.hr,
        "amplitude": args.amplitude,
        "shape": args.pulse_shape,
        "harmonic_ratio": args.harmonic_ratio,
        "fps": args.fps,
        "frames": args.frames,
        "height": height,
        "width": width,
        "noise": args.noise,
        "seed": args.seed,
        "illumination": args.illumination,
        "specular": args.specular,
        "diffuse": args.diffuse,
        "pixel_jitter": args.jitter,
    }
    out.with_suffix(out.suffix + ".sim.json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n"
    )
    print(f"wrote {out} ({args.frames}x{height}x{width}x3 @ {args.fps} fps), label {args.hr} BPM")
    return 0


def cmd_transform(args) -> int:
    clip = clipio.read_clip(args.infile)
    if args.method == "tn":
        result = tn(clip, TnConfig(epsilon=args.epsilon))
    elif args.method == "diff":
        d = frame_diff(clip)
        result = FrameClip(d.data, d.fps)
    elif args.method == "diffnorm":
        d = diff_normalized(clip)
        result = FrameClip(d.data, d.fps)
    else:
        raise ValueError(f"unknown method {args.method!r}")
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    clipio.write_clip(result, out, dtype="f32")
    print(f"wrote {out} ({result.frames} frames)")
    return 0


def cmd_estimate(args) -> int:
    clip = clipio.read_clip(args.infile)
    kind = ExtractorKind(args.extractor)
    waveform = run_extractor(kind, clip, TnConfig(epsilon=args.epsilon))
    from .hr import video_hr

    hr = video_hr(waveform, **{k: v for k, v in _pipeline_kwargs(args).items() if k != "epsilon"})
    if args.dump_waveform:
        t_s = np.arange(len(waveform)) / waveform.fps
        lines = ["t_s,value"] + [
            f"{t:.6f},{float(v)!r}" for t, v in zip(t_s, waveform.samples)
        ]
        Path(args.dump_waveform).write_text("\n".join(lines) + "\n")
    if args.dump_psd:
        filtered = bandpass(waveform, _band(args))
        spectrum = welch_psd(
            filtered,
            window_len=min(args.window_len, len(filtered)),
            overlap=args.overlap,
            nfft=max(args.nfft, min(args.window_len, len(filtered))),
        )
        lines = ["freq_hz,power"] + [
            f"{float(f)!r},{float(p)!r}" for f, p in zip(spectrum.freqs, spectrum.power)
        ]
        Path(args.dump_psd).write_text("\n".join(lines) + "\n")
    print(f"{hr:.3f}")
    return 0


def cmd_evaluate(args) -> int:
    kind = ExtractorKind(args.extractor)
    try:
        doc = evaluate_manifest(
            args.manifest, kind, skip_bad=args.skip_bad, **_pipeline_kwargs(args)
        )
    except clipio.ClipFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    write_report(doc, args.out)
    mae = doc["mae"]
    summary = f"n={doc['n_evaluated']}"
    if mae is not None:
        summary += f" mae={mae:.3f} rmse={doc['rmse']:.3f}"
        if doc["pearson_defined"]:
            summary += f" pearson={doc['pearson']:.3f}"
    print(f"wrote {args.out} ({summary})")
    return 0


def cmd_compare(args) -> int:
    kinds = [ExtractorKind(name) for name in args.extractors]
    try:
        doc = compare_manifest(
            args.manifest, kinds, skip_bad=args.skip_bad, **_pipeline_kwargs(args)
        )
    except clipio.ClipFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    write_report(doc, args.out)
    for name, block in doc["extractors"].items():
        mae = block["mae"]
        print(f"{name}: mae={mae:.3f}" if mae is not None else f"{name}: no usable videos")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pulse-tn",
        description="Synthesize reflectance-model clips, normalize them, and estimate heart rate.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="render a synthetic clip and record its label")
    p.add_argument("--hr", type=float, required=True, help="ground-truth heart rate in BPM")
    p.add_argument("--fps", type=float, default=30.0)
    p.add_argument("--frames", type=int, required=True)
    p.add_argument("--size", type=_parse_size, default=(8, 8), help="HxW, e.g. 8x8")
    p.add_argument("--noise", default="none", help='e.g. "linear:0.1+vs/sin:0.5:0.02"')
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output .rpgc path")
    p.add_argument("--labels", default=None, help="labels.csv path (default: beside --out)")
    p.add_argument("--amplitude", type=float, default=0.005)
    p.add_argument("--jitter", type=float, default=0.05)
    p.add_argument("--pulse-shape", choices=["sinusoid", "harmonic"], default="sinusoid")
    p.add_argument("--harmonic-ratio", type=float, default=0.3)
    p.add_argument("--illumination", type=float, default=1.0)
    p.add_argument("--specular", type=float, default=0.2)
    p.add_argument("--diffuse", type=float, default=0.5)
    p.add_argument("--dtype", choices=["f32", "u8"], default="f32")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("transform", help="apply a feature transform to a clip file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--method", choices=["tn", "diff", "diffnorm"], required=True)
    p.add_argument("--epsilon", type=float, default=1e-8)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("estimate", help="estimate the heart rate of one clip")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--extractor", choices=EXTRACTOR_NAMES, default="tn_pooled")
    p.add_argument("--dump-waveform", default=None, help="write the extracted waveform CSV")
    p.add_argument("--dump-psd", default=None, help="write the bandpassed power spectrum CSV")
    _add_pipeline_args(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("evaluate", help="evaluate an extractor over a manifest directory")
    p.add_argument("--manifest", required=True)
    p.add_argument("--extractor", choices=EXTRACTOR_NAMES, default="tn_pooled")
    p.add_argument("--out", required=True, help="report JSON path")
    p.add_argument("--skip-bad", action="store_true", help="flag unreadable clips instead of failing")
    _add_pipeline_args(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="compare extractors side by side on one manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--extractors", nargs="+", choices=EXTRACTOR_NAMES, default=EXTRACTOR_NAMES)
    p.add_argument("--out", required=True, help="report JSON path")
    p.add_argument("--skip-bad", action="store_true")
    _add_pipeline_args(p)
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        parser.exit(2, f"{parser.prog}: error: {exc}\n")
