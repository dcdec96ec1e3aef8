"""Seeded synthetic cine-loop generator with ground-truth component maps.

Signal model per frame t (times in seconds, dt = (t - arrival) / rate):

* leakage: elliptical patches, jointly translated by a clamped random
  walk (probe/tissue motion), each patch independently present with
  probability 1 - q (contrast-filter intermittency).
* flow: inside the vessel mask and after arrival, each pixel lights
  independently with probability rho at amplitude * c(t) * U, where
  U ~ Uniform(0.5, 1) and c(t) = (dt/tau) * exp(1 - dt/tau), a
  unimodal wash-in curve peak-normalized to 1.
* bound: plateau * (1 - exp(-dt/tau)) inside the lesion mask after
  arrival; monotone nondecreasing, zero before arrival.
* frame = clamp(leakage + bound + flow + Gaussian(0, noise_sigma)).

Each component draws from its own RNG sub-stream (seed offsets), so e.g.
changing noise_sigma never perturbs the flow draws.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .io import MANIFEST_VERSION, save_cine_loop, write_json_atomic
from .model import CineLoop, LoadError

_STREAM_JITTER = 0
_STREAM_PRESENCE = 1
_STREAM_FLOW = 2
_STREAM_NOISE = 3


@dataclass(frozen=True)
class Ellipse:
    """Axis-aligned ellipse in pixel coordinates (center, semi-axes)."""

    cx: float
    cy: float
    rx: float
    ry: float

    def mask(self, width: int, height: int, dx: float = 0.0, dy: float = 0.0) -> np.ndarray:
        """Boolean mask of pixels whose centers fall inside the ellipse."""
        px = np.arange(width, dtype=np.float64) + 0.5
        py = np.arange(height, dtype=np.float64) + 0.5
        nx = (px[None, :] - (self.cx + dx)) / self.rx
        ny = (py[:, None] - (self.cy + dy)) / self.ry
        return nx * nx + ny * ny <= 1.0


@dataclass(frozen=True)
class LeakagePatch:
    region: Ellipse
    intensity: float


@dataclass(frozen=True)
class FlowParams:
    amplitude: float = 0.0
    tau_s: float = 8.0
    fill_probability: float = 0.0


@dataclass(frozen=True)
class BindingParams:
    plateau: float = 0.0
    tau_s: float = 6.0


@dataclass(frozen=True)
class MotionParams:
    jitter_px: int = 0
    intermittency: float = 0.0


@dataclass(frozen=True)
class PhantomSpec:
    width: int
    height: int
    n_frames: int
    frame_rate_hz: float
    bolus_arrival_index: int
    lesion: Ellipse | None = None
    vessels: tuple[Ellipse, ...] = ()
    leakage_patches: tuple[LeakagePatch, ...] = ()
    flow: FlowParams = field(default_factory=FlowParams)
    binding: BindingParams = field(default_factory=BindingParams)
    leakage_motion: MotionParams = field(default_factory=MotionParams)
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "vessels", tuple(self.vessels))
        object.__setattr__(self, "leakage_patches", tuple(self.leakage_patches))
        if self.width < 1 or self.height < 1:
            raise ValueError(f"width/height: must be positive, got {self.width}x{self.height}")
        if self.n_frames < 2:
            raise ValueError(f"n_frames: need at least 2 frames, got {self.n_frames}")
        if not (self.frame_rate_hz > 0 and math.isfinite(self.frame_rate_hz)):
            raise ValueError(f"frame_rate_hz: must be finite and positive, got {self.frame_rate_hz!r}")
        if not (1 <= self.bolus_arrival_index < self.n_frames):
            raise ValueError(
                f"bolus_arrival_index: must lie in [1, n_frames-1], got {self.bolus_arrival_index}"
            )
        if not (0.0 <= self.flow.amplitude <= 1.0):
            raise ValueError(f"flow.amplitude: must lie in [0, 1], got {self.flow.amplitude!r}")
        if not (0.0 <= self.flow.fill_probability <= 1.0):
            raise ValueError(f"flow.fill_probability: must lie in [0, 1], got {self.flow.fill_probability!r}")
        if self.flow.tau_s <= 0:
            raise ValueError(f"flow.tau_s: must be positive, got {self.flow.tau_s!r}")
        if not (0.0 <= self.binding.plateau <= 1.0):
            raise ValueError(f"binding.plateau: must lie in [0, 1], got {self.binding.plateau!r}")
        if self.binding.tau_s <= 0:
            raise ValueError(f"binding.tau_s: must be positive, got {self.binding.tau_s!r}")
        if self.leakage_motion.jitter_px < 0:
            raise ValueError(f"leakage_motion.jitter_px: must be >= 0, got {self.leakage_motion.jitter_px!r}")
        if not (0.0 <= self.leakage_motion.intermittency <= 1.0):
            raise ValueError(
                f"leakage_motion.intermittency: must lie in [0, 1], got {self.leakage_motion.intermittency!r}"
            )
        if not (0.0 <= self.noise_sigma <= 1.0):
            raise ValueError(f"noise_sigma: must lie in [0, 1], got {self.noise_sigma!r}")
        for patch in self.leakage_patches:
            if not (0.0 <= patch.intensity <= 1.0):
                raise ValueError(f"leakage patch intensity must lie in [0, 1], got {patch.intensity!r}")

    def with_seed(self, seed: int) -> "PhantomSpec":
        return replace(self, seed=int(seed))

    def to_dict(self) -> dict:
        def ell(e: Ellipse) -> dict:
            return {"cx": e.cx, "cy": e.cy, "rx": e.rx, "ry": e.ry}

        return {
            "version": 1,
            "width": self.width,
            "height": self.height,
            "n_frames": self.n_frames,
            "frame_rate_hz": self.frame_rate_hz,
            "bolus_arrival_index": self.bolus_arrival_index,
            "lesion": ell(self.lesion) if self.lesion else None,
            "vessels": [ell(v) for v in self.vessels],
            "leakage_patches": [
                {**ell(p.region), "intensity": p.intensity} for p in self.leakage_patches
            ],
            "flow": {
                "amplitude": self.flow.amplitude,
                "tau_s": self.flow.tau_s,
                "fill_probability": self.flow.fill_probability,
            },
            "binding": {"plateau": self.binding.plateau, "tau_s": self.binding.tau_s},
            "leakage_motion": {
                "jitter_px": self.leakage_motion.jitter_px,
                "intermittency": self.leakage_motion.intermittency,
            },
            "noise_sigma": self.noise_sigma,
            "seed": self.seed,
        }


def spec_from_dict(obj: dict) -> PhantomSpec:
    """Parse a PhantomSpec from its JSON object form."""
    if not isinstance(obj, dict):
        raise LoadError("phantom spec must be a JSON object")
    if obj.get("version") != 1:
        raise LoadError(f"unsupported phantom spec version {obj.get('version')!r}")

    def ell(d, what) -> Ellipse:
        try:
            return Ellipse(cx=float(d["cx"]), cy=float(d["cy"]), rx=float(d["rx"]), ry=float(d["ry"]))
        except (TypeError, KeyError, ValueError):
            raise LoadError(f"{what}: expected an ellipse object with cx, cy, rx, ry") from None

    try:
        lesion = obj.get("lesion")
        flow = obj.get("flow", {})
        binding = obj.get("binding", {})
        motion = obj.get("leakage_motion", {})
        return PhantomSpec(
            width=int(obj["width"]),
            height=int(obj["height"]),
            n_frames=int(obj["n_frames"]),
            frame_rate_hz=float(obj["frame_rate_hz"]),
            bolus_arrival_index=int(obj["bolus_arrival_index"]),
            lesion=ell(lesion, "lesion") if lesion else None,
            vessels=tuple(ell(v, "vessels") for v in obj.get("vessels", [])),
            leakage_patches=tuple(
                LeakagePatch(region=ell(p, "leakage_patches"), intensity=float(p["intensity"]))
                for p in obj.get("leakage_patches", [])
            ),
            flow=FlowParams(
                amplitude=float(flow.get("amplitude", 0.0)),
                tau_s=float(flow.get("tau_s", 8.0)),
                fill_probability=float(flow.get("fill_probability", 0.0)),
            ),
            binding=BindingParams(
                plateau=float(binding.get("plateau", 0.0)),
                tau_s=float(binding.get("tau_s", 6.0)),
            ),
            leakage_motion=MotionParams(
                jitter_px=int(motion.get("jitter_px", 0)),
                intermittency=float(motion.get("intermittency", 0.0)),
            ),
            noise_sigma=float(obj.get("noise_sigma", 0.0)),
            seed=int(obj.get("seed", 0)),
        )
    except (TypeError, KeyError) as exc:
        raise LoadError(f"phantom spec missing or malformed field: {exc}") from None
    except ValueError as exc:
        raise LoadError(f"phantom spec invalid: {exc}") from None


def load_spec(path) -> PhantomSpec:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise LoadError(f"phantom spec not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise LoadError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return spec_from_dict(obj)


@dataclass(frozen=True)
class GroundTruth:
    """Per-frame signal decomposition underlying a generated loop."""

    bound_map: np.ndarray
    leakage_map: np.ndarray
    flow_map: np.ndarray
    noise_map: np.ndarray
    lesion_mask: np.ndarray
    vessel_mask: np.ndarray

    def __post_init__(self):
        for name in ("bound_map", "leakage_map", "flow_map", "noise_map", "lesion_mask", "vessel_mask"):
            arr = getattr(self, name)
            arr.setflags(write=False)


def wash_in(dt_s: float, tau_s: float) -> float:
    """Unimodal wash-in curve, 0 at dt=0, peak 1 at dt=tau, decaying after."""
    if dt_s <= 0:
        return 0.0
    x = dt_s / tau_s
    return x * math.exp(1.0 - x)


def generate(spec: PhantomSpec) -> tuple[CineLoop, GroundTruth]:
    """Render a phantom loop and its ground truth; fully determined by spec."""
    w, h, n = spec.width, spec.height, spec.n_frames
    t_a = spec.bolus_arrival_index
    rate = spec.frame_rate_hz
    jitter_rng = np.random.default_rng([spec.seed, _STREAM_JITTER])
    presence_rng = np.random.default_rng([spec.seed, _STREAM_PRESENCE])
    flow_rng = np.random.default_rng([spec.seed, _STREAM_FLOW])
    noise_rng = np.random.default_rng([spec.seed, _STREAM_NOISE])

    lesion_mask = spec.lesion.mask(w, h) if spec.lesion else np.zeros((h, w), dtype=bool)
    vessel_mask = np.zeros((h, w), dtype=bool)
    for vessel in spec.vessels:
        vessel_mask |= vessel.mask(w, h)

    jit = spec.leakage_motion.jitter_px
    steps = jitter_rng.integers(-1, 2, size=(n, 2))  # (dx, dy) per frame
    walk = np.cumsum(steps, axis=0)
    walk = walk - walk[0]  # frame 0 rests at the origin
    offsets = np.clip(walk, -jit, jit)

    q = spec.leakage_motion.intermittency
    n_patches = len(spec.leakage_patches)
    present = presence_rng.random((n, n_patches)) < (1.0 - q)

    patch_masks: dict[tuple[int, int, int], np.ndarray] = {}

    def patch_mask(j: int, dx: int, dy: int) -> np.ndarray:
        key = (j, dx, dy)
        cached = patch_masks.get(key)
        if cached is None:
            cached = spec.leakage_patches[j].region.mask(w, h, dx=float(dx), dy=float(dy))
            patch_masks[key] = cached
        return cached

    frames = np.empty((n, h, w), dtype=np.float64)
    leakage_map = np.zeros((n, h, w), dtype=np.float64)
    flow_map = np.zeros((n, h, w), dtype=np.float64)
    bound_map = np.zeros((n, h, w), dtype=np.float64)
    noise_map = np.zeros((n, h, w), dtype=np.float64)
    lesion_f = lesion_mask.astype(np.float64)

    for t in range(n):
        leak = np.zeros((h, w), dtype=np.float64)
        dx, dy = int(offsets[t, 0]), int(offsets[t, 1])
        for j in range(n_patches):
            if not present[t, j]:
                continue
            mask = patch_mask(j, dx, dy)
            np.maximum(leak, spec.leakage_patches[j].intensity * mask, out=leak)
        leakage_map[t] = leak

        if t >= t_a:
            dt_s = (t - t_a) / rate
            level = spec.binding.plateau * (1.0 - math.exp(-dt_s / spec.binding.tau_s))
            bound_map[t] = level * lesion_f
            c = spec.flow.amplitude * wash_in(dt_s, spec.flow.tau_s)
            gate = flow_rng.random((h, w)) < spec.flow.fill_probability
            u = flow_rng.uniform(0.5, 1.0, (h, w))
            flow_map[t] = np.where(gate & vessel_mask, c * u, 0.0)

        if spec.noise_sigma > 0:
            noise_map[t] = noise_rng.normal(0.0, spec.noise_sigma, (h, w))

        pre_clamp = (leakage_map[t] + bound_map[t]) + flow_map[t] + noise_map[t]
        frames[t] = np.clip(pre_clamp, 0.0, 1.0)

    loop = CineLoop(
        frames=frames,
        frame_rate_hz=rate,
        pre_contrast=(0, t_a - 1),
        bolus_arrival_index=t_a,
    )
    truth = GroundTruth(
        bound_map=bound_map,
        leakage_map=leakage_map,
        flow_map=flow_map,
        noise_map=noise_map,
        lesion_mask=lesion_mask,
        vessel_mask=vessel_mask,
    )
    return loop, truth


def save_ground_truth(truth: GroundTruth, loop: CineLoop, out_dir, bit_depth: int = 16) -> Path:
    """Write the bound map as a parallel frame manifest plus a JSON summary."""
    out_dir = Path(out_dir)
    bound_loop_dir = out_dir / "truth"
    manifest_path = save_cine_loop(
        CineLoop(
            frames=np.clip(truth.bound_map, 0.0, 1.0),
            frame_rate_hz=loop.frame_rate_hz,
            pre_contrast=loop.pre_contrast,
            bolus_arrival_index=loop.bolus_arrival_index,
        ),
        bound_loop_dir,
        bit_depth=bit_depth,
        prefix="bound",
    )
    summary = {
        "version": MANIFEST_VERSION,
        "bound_manifest": str(manifest_path.relative_to(out_dir)),
        "bound_plateau_final": float(truth.bound_map[-1].max()),
        "lesion_pixels": int(truth.lesion_mask.sum()),
        "vessel_pixels": int(truth.vessel_mask.sum()),
    }
    summary_path = out_dir / "truth_summary.json"
    write_json_atomic(summary_path, summary)
    return summary_path


# ---------------------------------------------------------------------------
# Canned phantoms used by tests, demos, and the false-positive scenario.
# Geometry notes: leakage patches sit at least 5 px apart and at least 5 px
# from any vessel, so a radius-2 closing (influence radius 4) can neither
# bridge patches nor bleed vessel signal into the lesion region.

def case6_spec(seed: int = 0) -> PhantomSpec:
    """Benign-mimic scenario: the "lesion" is intermittent leakage only.

    No binding anywhere (ground-truth bound is identically zero); vessels
    carry ordinary flow well away from the lesion area.
    """
    return PhantomSpec(
        width=96,
        height=96,
        n_frames=110,
        frame_rate_hz=1.0,
        bolus_arrival_index=35,
        lesion=Ellipse(cx=66.0, cy=28.0, rx=17.0, ry=13.0),
        vessels=(
            Ellipse(cx=20.0, cy=48.0, rx=13.0, ry=4.0),
            Ellipse(cx=34.0, cy=70.0, rx=16.0, ry=4.0),
            Ellipse(cx=24.0, cy=20.0, rx=4.0, ry=12.0),
            Ellipse(cx=70.0, cy=74.0, rx=14.0, ry=5.0),
        ),
        leakage_patches=(
            LeakagePatch(region=Ellipse(cx=58.0, cy=23.0, rx=6.0, ry=4.5), intensity=0.55),
            LeakagePatch(region=Ellipse(cx=74.0, cy=23.0, rx=5.0, ry=4.0), intensity=0.55),
            LeakagePatch(region=Ellipse(cx=60.0, cy=37.0, rx=5.5, ry=4.0), intensity=0.55),
            LeakagePatch(region=Ellipse(cx=76.0, cy=36.0, rx=5.0, ry=4.0), intensity=0.55),
        ),
        flow=FlowParams(amplitude=0.3, tau_s=40.0, fill_probability=0.5),
        binding=BindingParams(plateau=0.0, tau_s=6.0),
        leakage_motion=MotionParams(jitter_px=0, intermittency=0.2),
        noise_sigma=0.0,
        seed=seed,
    )


def case6_phantom(seed: int = 0) -> tuple[CineLoop, GroundTruth]:
    return generate(case6_spec(seed))


def case6_rois() -> list[tuple[str, list[list[float]]]]:
    """Lesion and normal polygons matched to the case6 geometry."""
    return [
        ("lesion", [[50.0, 17.0], [81.0, 17.0], [81.0, 41.0], [50.0, 41.0]]),
        ("normal", [[5.0, 6.0], [50.0, 6.0], [50.0, 86.0], [5.0, 86.0]]),
    ]


def high_flow_spec(seed: int = 0) -> PhantomSpec:
    """Bound lesion fed by a fast-washout vessel, leakage in normal tissue.

    The flow time constant is short, so the default evaluation window sits
    on the washout tail: free bubbles still light 90% of vessel pixels per
    frame but their intensity decays through the window. The normal region
    carries a grid of bright intermittent patches (removed by the tissue
    model) plus one small vessel so the projections see real flow there.
    """
    return PhantomSpec(
        width=96,
        height=96,
        n_frames=100,
        frame_rate_hz=1.0,
        bolus_arrival_index=30,
        lesion=Ellipse(cx=66.0, cy=48.0, rx=15.0, ry=12.0),
        vessels=(
            Ellipse(cx=68.0, cy=48.0, rx=14.0, ry=4.0),
            Ellipse(cx=78.0, cy=14.0, rx=12.0, ry=5.0),
            Ellipse(cx=38.0, cy=80.0, rx=6.0, ry=4.0),
        ),
        leakage_patches=(
            LeakagePatch(region=Ellipse(cx=18.0, cy=20.0, rx=7.5, ry=7.0), intensity=0.5),
            LeakagePatch(region=Ellipse(cx=38.0, cy=20.0, rx=7.5, ry=7.0), intensity=0.5),
            LeakagePatch(region=Ellipse(cx=18.0, cy=40.0, rx=7.5, ry=7.0), intensity=0.5),
            LeakagePatch(region=Ellipse(cx=38.0, cy=40.0, rx=7.5, ry=7.0), intensity=0.5),
            LeakagePatch(region=Ellipse(cx=18.0, cy=60.0, rx=7.5, ry=7.0), intensity=0.5),
            LeakagePatch(region=Ellipse(cx=38.0, cy=60.0, rx=7.5, ry=7.0), intensity=0.5),
            LeakagePatch(region=Ellipse(cx=18.0, cy=80.0, rx=7.5, ry=7.0), intensity=0.5),
        ),
        flow=FlowParams(amplitude=0.5, tau_s=10.0, fill_probability=0.9),
        binding=BindingParams(plateau=0.4, tau_s=12.0),
        leakage_motion=MotionParams(jitter_px=0, intermittency=0.2),
        noise_sigma=0.01,
        seed=seed,
    )


def high_flow_phantom(seed: int = 0) -> tuple[CineLoop, GroundTruth]:
    return generate(high_flow_spec(seed))


def high_flow_rois() -> list[tuple[str, list[list[float]]]]:
    """Lesion polygon inside the bound ellipse; normal polygon over vessels."""
    return [
        ("lesion", [[56.0, 40.0], [76.0, 40.0], [76.0, 56.0], [56.0, 56.0]]),
        ("normal", [[8.0, 8.0], [48.0, 8.0], [48.0, 90.0], [8.0, 90.0]]),
    ]
