"""File ingestion and export: PGM frames, loop manifests, ROI files, CSV."""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .model import CineLoop, LoadError, RoiSet, build_roi_set

MANIFEST_VERSION = 1
ROI_VERSION = 1


def _atomic_write_bytes(path, data: bytes) -> None:
    """Write to a temp file in the target directory, then rename into place."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_json_atomic(path, obj) -> None:
    _atomic_write_bytes(path, (json.dumps(obj, indent=2, sort_keys=False) + "\n").encode("utf-8"))


def _pgm_tokens(data: bytes):
    """Yield header tokens of a PGM file, skipping whitespace and # comments."""
    i = 0
    n = len(data)
    while i < n:
        c = data[i:i + 1]
        if c.isspace():
            i += 1
            continue
        if c == b"#":
            while i < n and data[i:i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        j = i
        while j < n and not data[j:j + 1].isspace():
            j += 1
        yield data[i:j], j
        i = j


def read_pgm(path) -> tuple[np.ndarray, int]:
    """Read a binary PGM (P5) file.

    Returns (raw, maxval) where raw is a (height, width) uint16 array of
    raw sample values. 16-bit samples are big-endian per the format.
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except FileNotFoundError:
        raise LoadError(f"frame file not found: {path}") from None
    tokens = _pgm_tokens(data)
    try:
        magic, _ = next(tokens)
        if magic != b"P5":
            raise LoadError(f"{path}: not a binary PGM (expected P5, got {magic[:8]!r})")
        width_tok, _ = next(tokens)
        height_tok, _ = next(tokens)
        maxval_tok, end = next(tokens)
        width, height, maxval = int(width_tok), int(height_tok), int(maxval_tok)
    except (StopIteration, ValueError):
        raise LoadError(f"{path}: truncated or malformed PGM header") from None
    if width < 1 or height < 1 or not (0 < maxval < 65536):
        raise LoadError(f"{path}: invalid PGM dimensions or maxval")
    offset = end + 1  # single whitespace byte after maxval
    count = width * height
    if maxval > 255:
        raw = np.frombuffer(data, dtype=">u2", count=count, offset=offset) if len(data) - offset >= 2 * count else None
    else:
        raw = np.frombuffer(data, dtype=np.uint8, count=count, offset=offset) if len(data) - offset >= count else None
    if raw is None:
        raise LoadError(f"{path}: pixel data shorter than {width}x{height} header claims")
    raw = raw.astype(np.uint16).reshape(height, width)
    if raw.max(initial=0) > maxval:
        raise LoadError(f"{path}: sample exceeds declared maxval {maxval}")
    return raw, maxval


def write_pgm(path, raw: np.ndarray, maxval: int) -> None:
    raw = np.asarray(raw)
    height, width = raw.shape
    header = f"P5\n{width} {height}\n{maxval}\n".encode("ascii")
    if maxval > 255:
        body = raw.astype(">u2").tobytes()
    else:
        body = raw.astype(np.uint8).tobytes()
    _atomic_write_bytes(path, header + body)


def quantize(frame: np.ndarray, bit_depth: int) -> np.ndarray:
    """Map [0, 1] intensities to integer samples, rounding half up."""
    if bit_depth not in (8, 16):
        raise ValueError(f"bit_depth: expected 8 or 16, got {bit_depth}")
    maxval = (1 << bit_depth) - 1
    return np.floor(np.asarray(frame, dtype=np.float64) * maxval + 0.5).astype(np.uint16)


def save_frame(frame: np.ndarray, path, bit_depth: int = 8) -> None:
    """Quantize a [0, 1] frame and write it as binary PGM."""
    maxval = (1 << bit_depth) - 1
    write_pgm(path, quantize(frame, bit_depth), maxval)


def load_frame(path, bit_depth: int) -> np.ndarray:
    raw, maxval = read_pgm(path)
    expected = (1 << bit_depth) - 1
    if maxval != expected:
        raise LoadError(f"{path}: maxval {maxval} does not match declared bit_depth {bit_depth}")
    return raw.astype(np.float64) / expected


def _require(manifest: dict, key: str, path):
    if key not in manifest:
        raise LoadError(f"{path}: manifest missing field {key!r}")
    return manifest[key]


def load_cine_loop(manifest_path) -> CineLoop:
    """Load a cine loop from a manifest JSON plus its referenced PGM frames."""
    manifest_path = Path(manifest_path)
    try:
        text = manifest_path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise LoadError(f"manifest not found: {manifest_path}") from None
    try:
        manifest = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LoadError(f"{manifest_path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    if not isinstance(manifest, dict):
        raise LoadError(f"{manifest_path}: manifest must be a JSON object")
    version = _require(manifest, "version", manifest_path)
    if version != MANIFEST_VERSION:
        raise LoadError(f"{manifest_path}: unsupported manifest version {version!r}")
    width = _require(manifest, "width", manifest_path)
    height = _require(manifest, "height", manifest_path)
    frame_rate = _require(manifest, "frame_rate_hz", manifest_path)
    bit_depth = _require(manifest, "bit_depth", manifest_path)
    names = _require(manifest, "frames", manifest_path)
    pre = _require(manifest, "pre_contrast", manifest_path)
    bolus = _require(manifest, "bolus_arrival_index", manifest_path)
    if bit_depth not in (8, 16):
        raise LoadError(f"{manifest_path}: bit_depth must be 8 or 16, got {bit_depth!r}")
    if not isinstance(names, list) or not names:
        raise LoadError(f"{manifest_path}: frames must be a non-empty list")
    if not isinstance(pre, dict) or "start" not in pre or "end" not in pre:
        raise LoadError(f"{manifest_path}: pre_contrast must carry start and end")
    base = manifest_path.parent
    frames = np.empty((len(names), int(height), int(width)), dtype=np.float64)
    for i, name in enumerate(names):
        frame = load_frame(base / name, bit_depth)
        if frame.shape != (height, width):
            raise LoadError(
                f"{base / name}: frame is {frame.shape[1]}x{frame.shape[0]}, "
                f"manifest declares {width}x{height}"
            )
        frames[i] = frame
    try:
        return CineLoop(
            frames=frames,
            frame_rate_hz=frame_rate,
            pre_contrast=(int(pre["start"]), int(pre["end"])),
            bolus_arrival_index=int(bolus),
        )
    except (TypeError, ValueError) as exc:
        raise LoadError(f"{manifest_path}: {exc}") from None


def save_cine_loop(loop: CineLoop, out_dir, bit_depth: int = 8, prefix: str = "frame") -> Path:
    """Write a loop as PGM frames plus a manifest; returns the manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    names = []
    for i in range(loop.n_frames):
        name = f"{prefix}_{i:04d}.pgm"
        save_frame(loop.frames[i], out_dir / name, bit_depth)
        names.append(name)
    manifest = {
        "version": MANIFEST_VERSION,
        "width": loop.width,
        "height": loop.height,
        "frame_rate_hz": loop.frame_rate_hz,
        "bit_depth": bit_depth,
        "frames": names,
        "pre_contrast": {"start": loop.pre_contrast[0], "end": loop.pre_contrast[1]},
        "bolus_arrival_index": loop.bolus_arrival_index,
    }
    manifest_path = out_dir / "manifest.json"
    write_json_atomic(manifest_path, manifest)
    return manifest_path


def parse_roi_entries(obj, path="<rois>") -> list[tuple[str, list]]:
    if not isinstance(obj, dict):
        raise LoadError(f"{path}: roi document must be a JSON object")
    if obj.get("version") != ROI_VERSION:
        raise LoadError(f"{path}: unsupported roi file version {obj.get('version')!r}")
    rois = obj.get("rois")
    if not isinstance(rois, list):
        raise LoadError(f"{path}: rois must be a list")
    entries = []
    for item in rois:
        if not isinstance(item, dict) or "label" not in item or "polygon" not in item:
            raise LoadError(f"{path}: each roi needs label and polygon")
        entries.append((item["label"], item["polygon"]))
    return entries


def load_rois(path, width: int, height: int) -> RoiSet:
    """Load an ROI JSON file and rasterize it against a frame size."""
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise LoadError(f"roi file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise LoadError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return build_roi_set(parse_roi_entries(obj, path), width, height)


def roi_set_to_obj(rois: RoiSet) -> dict:
    return {
        "version": ROI_VERSION,
        "rois": [
            {"label": r.label, "polygon": [[float(x), float(y)] for x, y in r.polygon]}
            for r in rois.rois
        ],
    }


def format_time_series_csv(series: Iterable[tuple[int, float]]) -> str:
    lines = ["t,intensity"]
    for t, value in series:
        lines.append(f"{int(t)},{value:.9g}")
    return "\n".join(lines) + "\n"


def write_time_series_csv(series: Sequence[tuple[int, float]], path) -> None:
    _atomic_write_bytes(path, format_time_series_csv(series).encode("ascii"))
