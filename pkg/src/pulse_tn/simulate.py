"""Synthetic clip generator based on a dichromatic reflectance decomposition.

A clip is rendered as illumination times the sum of a specular surface
reflectance and a diffuse subsurface reflectance, where the diffuse part is
modulated by the blood-volume pulse. Controlled time-varying perturbations of
the illumination and of the specular component produce noisy variants with a
known, analytically exact noise residual.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FrameClip, Waveform

PULSE_SHAPES = ("sinusoid", "harmonic")


def _as_channels(value, channels: int, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(value, dtype=np.float64))
    if arr.size == 1:
        arr = np.full(channels, arr[0])
    if arr.shape != (channels,):
        raise ValueError(f"{name} must be a scalar or length-{channels} sequence, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


@dataclass(frozen=True)
class PulseSpec:
    """Blood-volume pulse model: a sinusoid with an optional second harmonic.

    `amplitude` is the coefficient of the fundamental; the harmonic shape adds
    a component at twice the rate with amplitude `harmonic_ratio * amplitude`,
    a crude stand-in for a dicrotic notch.
    """

    hr_bpm: float
    amplitude: float = 0.005
    shape: str = "sinusoid"
    harmonic_ratio: float = 0.3

    def __post_init__(self):
        if not 30.0 <= self.hr_bpm <= 180.0:
            raise ValueError(f"hr_bpm must lie in [30, 180], got {self.hr_bpm}")
        if self.amplitude < 0:
            raise ValueError(f"amplitude must be >= 0, got {self.amplitude}")
        if self.shape not in PULSE_SHAPES:
            raise ValueError(f"shape must be one of {PULSE_SHAPES}, got {self.shape!r}")
        if not 0.0 <= self.harmonic_ratio <= 1.0:
            raise ValueError(f"harmonic_ratio must lie in [0, 1], got {self.harmonic_ratio}")


@dataclass(frozen=True)
class SceneSpec:
    """Static optics of a rendered scene.

    `illumination`, `specular` and `diffuse` are per-channel (scalars
    broadcast to `channels`). `pixel_jitter` is the relative spread of the
    per-pixel multiplicative variation applied to the diffuse component,
    drawn uniformly from [-pixel_jitter, +pixel_jitter] with `jitter_seed`;
    it keeps spatial pooling non-degenerate.
    """

    illumination: object = 1.0
    specular: object = 0.2
    diffuse: object = 0.5
    pixel_jitter: float = 0.05
    jitter_seed: int = 0
    channels: int = 3

    def __post_init__(self):
        if self.channels not in (1, 3):
            raise ValueError(f"channels must be 1 or 3, got {self.channels}")
        ill = _as_channels(self.illumination, self.channels, "illumination")
        spec = _as_channels(self.specular, self.channels, "specular")
        diff = _as_channels(self.diffuse, self.channels, "diffuse")
        if np.any(ill <= 0):
            raise ValueError("illumination must be > 0 per channel")
        if np.any(spec < 0) or np.any(diff < 0):
            raise ValueError("specular and diffuse must be >= 0 per channel")
        if self.pixel_jitter < 0:
            raise ValueError(f"pixel_jitter must be >= 0, got {self.pixel_jitter}")
        object.__setattr__(self, "illumination", ill)
        object.__setattr__(self, "specular", spec)
        object.__setattr__(self, "diffuse", diff)

    def diffuse_field(self, height: int, width: int) -> np.ndarray:
        """Per-pixel diffuse reflectance (H x W x C), jittered deterministically."""
        rng = np.random.default_rng(self.jitter_seed)
        u = rng.uniform(-1.0, 1.0, size=(height, width, self.channels))
        return self.diffuse * (1.0 + self.pixel_jitter * u)


@dataclass(frozen=True)
class StepNoise:
    """Constant offset switched on at `t0_s` seconds."""

    t0_s: float
    gain: float


@dataclass(frozen=True)
class LinearNoise:
    """Ramp from 0 to `total` across the whole clip."""

    total: float


@dataclass(frozen=True)
class SinusoidNoise:
    """Sinusoidal wobble of amplitude `amplitude` at `freq_hz`."""

    freq_hz: float
    amplitude: float


NoiseTerm = StepNoise | LinearNoise | SinusoidNoise


@dataclass(frozen=True)
class NoiseSpec:
    """Time-varying perturbations applied while rendering a noisy clip.

    `delta_illumination` terms are dimensionless gains relative to the
    illumination (the illumination of channel c becomes I_c * (1 + g(t))).
    `delta_specular` terms are absolute offsets in reflectance units added to
    the specular component. Both are spatially and per-channel uniform.
    Empty term tuples mean no noise.
    """

    delta_illumination: tuple[NoiseTerm, ...] = ()
    delta_specular: tuple[NoiseTerm, ...] = ()

    def is_none(self) -> bool:
        return not self.delta_illumination and not self.delta_specular


NO_NOISE = NoiseSpec()


def noise_profile(terms: tuple[NoiseTerm, ...], frames: int, fps: float) -> np.ndarray:
    """Evaluate the summed noise terms on the clip's frame grid."""
    t_idx = np.arange(frames, dtype=np.float64)
    t_s = t_idx / fps
    out = np.zeros(frames)
    for term in terms:
        if isinstance(term, StepNoise):
            out += np.where(t_s >= term.t0_s, term.gain, 0.0)
        elif isinstance(term, LinearNoise):
            out += term.total * t_idx / (frames - 1)
        elif isinstance(term, SinusoidNoise):
            out += term.amplitude * np.sin(2.0 * np.pi * term.freq_hz * t_s)
        else:
            raise TypeError(f"unknown noise term {term!r}")
    return out


def synth_pulse(spec: PulseSpec, fps: float, frames: int) -> Waveform:
    """Sample the pulse model at `fps` for `frames` samples."""
    if frames < 2:
        raise ValueError(f"need at least 2 frames, got {frames}")
    t_s = np.arange(frames, dtype=np.float64) / fps
    f = spec.hr_bpm / 60.0
    v = spec.amplitude * np.sin(2.0 * np.pi * f * t_s)
    if spec.shape == "harmonic":
        v = v + spec.harmonic_ratio * spec.amplitude * np.sin(4.0 * np.pi * f * t_s)
    return Waveform(v, fps)


def _deltas(scene: SceneSpec, noise: NoiseSpec, frames: int, fps: float):
    """ΔI and Δv_s as (T, 1, 1, C) tensors ready for broadcasting."""
    gi = noise_profile(noise.delta_illumination, frames, fps)
    gs = noise_profile(noise.delta_specular, frames, fps)
    d_ill = gi[:, None, None, None] * scene.illumination
    d_spec = np.broadcast_to(gs[:, None, None, None], (frames, 1, 1, scene.channels))
    return d_ill, d_spec


def render_ideal(scene: SceneSpec, pulse: Waveform, height: int, width: int) -> FrameClip:
    """Noise-free clip: illumination * (specular + diffuse * (1 + pulse))."""
    vd = scene.diffuse_field(height, width)
    vp = pulse.samples[:, None, None, None]
    data = scene.illumination * (scene.specular + vd * (1.0 + vp))
    return FrameClip(data, pulse.fps)


def render_noisy(
    scene: SceneSpec, pulse: Waveform, noise: NoiseSpec, height: int, width: int
) -> FrameClip:
    """Clip with perturbed illumination and specular reflectance.

    data[t] = (I + ΔI(t)) * (v_s + Δv_s(t) + v_d_ij * (1 + pulse(t)))
    """
    vd = scene.diffuse_field(height, width)
    vp = pulse.samples[:, None, None, None]
    d_ill, d_spec = _deltas(scene, noise, len(pulse), pulse.fps)
    data = (scene.illumination + d_ill) * (scene.specular + d_spec + vd * (1.0 + vp))
    return FrameClip(data, pulse.fps)


def analytic_noise_residual(
    scene: SceneSpec, pulse: Waveform, noise: NoiseSpec, height: int, width: int
) -> FrameClip:
    """Closed-form difference between the noisy and the ideal clip.

    residual[t] = I * Δv_s(t) + ΔI(t) * (v_s + Δv_s(t) + v_d_ij * (1 + pulse(t)))

    This is exact algebra (same jitter realization as the renderers), so it
    matches render_noisy - render_ideal to floating-point round-off.
    """
    vd = scene.diffuse_field(height, width)
    vp = pulse.samples[:, None, None, None]
    d_ill, d_spec = _deltas(scene, noise, len(pulse), pulse.fps)
    data = scene.illumination * d_spec + d_ill * (
        scene.specular + d_spec + vd * (1.0 + vp)
    )
    return FrameClip(data, pulse.fps)


def parse_noise_string(text: str) -> NoiseSpec:
    """Parse the CLI noise mini-grammar into a NoiseSpec.

    Grammar: terms joined by "+", each one of
        none | step:<t0_s>:<gain> | linear:<total> | sin:<freq_hz>:<amplitude>
    A "vs/" prefix routes the term to the specular perturbation instead of
    the illumination one, e.g. "linear:0.1+vs/sin:0.5:0.02".
    """
    d_ill: list[NoiseTerm] = []
    d_spec: list[NoiseTerm] = []
    for raw in text.split("+"):
        token = raw.strip()
        if not token:
            raise ValueError(f"empty noise term in {text!r}")
        target = d_ill
        body = token
        if body.startswith("vs/"):
            target = d_spec
            body = body[3:]
        parts = body.split(":")
        kind = parts[0]
        try:
            if kind == "none" and len(parts) == 1:
                continue
            if kind == "step" and len(parts) == 3:
                target.append(StepNoise(t0_s=float(parts[1]), gain=float(parts[2])))
                continue
            if kind == "linear" and len(parts) == 2:
                target.append(LinearNoise(total=float(parts[1])))
                continue
            if kind == "sin" and len(parts) == 3:
                target.append(SinusoidNoise(freq_hz=float(parts[1]), amplitude=float(parts[2])))
                continue
        except ValueError as exc:
            raise ValueError(f"bad noise term {token!r}: {exc}") from None
        raise ValueError(f"bad noise term {token!r} (expected none, step:t0:gain, linear:total or sin:hz:amp)")
    return NoiseSpec(delta_illumination=tuple(d_ill), delta_specular=tuple(d_spec))
