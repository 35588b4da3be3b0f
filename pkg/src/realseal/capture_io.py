"""On-disk capture format.

A capture directory holds:

* ``capture.json``    - metadata (dims, rates, identity, pixels-per-radian)
* ``frame_%04d.pgm``  - binary PGM, header ``P5\\n<w> <h>\\n255\\n`` + raw bytes
* ``depth_%04d.rsd``  - magic ``RSD1``, u32le width, u32le height, then
                        width*height float32le values row-major
* ``thermal.rst``     - same layout with magic ``RST1``
* ``audio.rsa``       - magic ``RSA1``, u32le sample_rate, u32le count, float32le
* ``imu.rsi``         - magic ``RSI1``, u32le count, float32le

Every field is fixed-width binary or canonical JSON, so write -> read is
lossless and two writes of the same capture are byte-identical.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .errors import CaptureError
from .scene import AudioTrack, DepthMap, ImuTrace, LumaFrame, SceneCapture, ThermalMap

_MAGIC_DEPTH = b"RSD1"
_MAGIC_THERMAL = b"RST1"
_MAGIC_AUDIO = b"RSA1"
_MAGIC_IMU = b"RSI1"


# ---------------------------------------------------------------------------
# PGM codec
# ---------------------------------------------------------------------------

def encode_frame_pgm(frame: LumaFrame) -> bytes:
    """Binary (P5) PGM encoding; deterministic, used as the sealed payload."""
    header = f"P5\n{frame.width} {frame.height}\n255\n".encode("ascii")
    return header + frame.pixels.tobytes()


def decode_frame_pgm(data: bytes) -> LumaFrame:
    """Strict inverse of encode_frame_pgm (canonical header only)."""
    if not data.startswith(b"P5\n"):
        raise CaptureError("corrupt capture: bad PGM magic")
    rest = data[3:]
    nl = rest.find(b"\n")
    if nl < 0:
        raise CaptureError("corrupt capture: truncated PGM header")
    dims = rest[:nl].split(b" ")
    if len(dims) != 2:
        raise CaptureError("corrupt capture: bad PGM dimensions")
    try:
        width, height = int(dims[0]), int(dims[1])
    except ValueError:
        raise CaptureError("corrupt capture: bad PGM dimensions") from None
    body = rest[nl + 1:]
    if not body.startswith(b"255\n"):
        raise CaptureError("corrupt capture: PGM maxval must be 255")
    pixels = body[4:]
    if width <= 0 or height <= 0 or len(pixels) != width * height:
        raise CaptureError("corrupt capture: PGM pixel count mismatch")
    arr = np.frombuffer(pixels, dtype=np.uint8).reshape(height, width)
    return LumaFrame(arr.copy())


# ---------------------------------------------------------------------------
# Fixed-width binary records
# ---------------------------------------------------------------------------

def _encode_grid(magic: bytes, arr: np.ndarray) -> bytes:
    h, w = arr.shape
    return magic + struct.pack("<II", w, h) + arr.astype("<f4", copy=False).tobytes()

def _decode_grid(magic: bytes, data: bytes, what: str) -> np.ndarray:
    if len(data) < 12 or data[:4] != magic:
        raise CaptureError(f"corrupt capture: bad {what} header")
    w, h = struct.unpack("<II", data[4:12])
    expected = 12 + 4 * w * h
    if w == 0 or h == 0 or len(data) != expected:
        raise CaptureError(f"corrupt capture: {what} size mismatch")
    values = np.frombuffer(data, dtype="<f4", offset=12).reshape(h, w)
    return values.astype(np.float32, copy=True)


def _encode_audio(track: AudioTrack) -> bytes:
    return (_MAGIC_AUDIO + struct.pack("<II", track.sample_rate, track.samples.size)
            + track.samples.astype("<f4", copy=False).tobytes())

def _decode_audio(data: bytes) -> AudioTrack:
    if len(data) < 12 or data[:4] != _MAGIC_AUDIO:
        raise CaptureError("corrupt capture: bad audio header")
    rate, count = struct.unpack("<II", data[4:12])
    if rate == 0 or len(data) != 12 + 4 * count:
        raise CaptureError("corrupt capture: audio size mismatch")
    samples = np.frombuffer(data, dtype="<f4", offset=12).astype(np.float32, copy=True)
    return AudioTrack(int(rate), samples)


def _encode_imu(trace: ImuTrace) -> bytes:
    return (_MAGIC_IMU + struct.pack("<I", trace.yaw_rates.size)
            + trace.yaw_rates.astype("<f4", copy=False).tobytes())

def _decode_imu(data: bytes) -> ImuTrace:
    if len(data) < 8 or data[:4] != _MAGIC_IMU:
        raise CaptureError("corrupt capture: bad IMU header")
    (count,) = struct.unpack("<I", data[4:8])
    if len(data) != 8 + 4 * count:
        raise CaptureError("corrupt capture: IMU size mismatch")
    values = np.frombuffer(data, dtype="<f4", offset=8).astype(np.float32, copy=True)
    return ImuTrace(values)


# ---------------------------------------------------------------------------
# Capture directory
# ---------------------------------------------------------------------------

_META_REQUIRED = {
    "device_id", "frame_count", "frame_rate", "height",
    "pixels_per_radian", "sample_rate", "timestamp_unix", "width",
}


def write_capture_dir(capture: SceneCapture, path: str | Path) -> Path:
    """Write a capture directory; returns its path."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    meta: dict = {
        "device_id": capture.device_id,
        "frame_count": capture.frame_count,
        "frame_rate": capture.frame_rate,
        "height": capture.height,
        "pixels_per_radian": capture.pixels_per_radian,
        "sample_rate": capture.audio.sample_rate,
        "timestamp_unix": capture.timestamp_unix,
        "width": capture.width,
    }
    if capture.location is not None:
        meta["location"] = {
            "lat_microdeg": capture.location[0],
            "lon_microdeg": capture.location[1],
        }
    (root / "capture.json").write_bytes(
        (json.dumps(meta, sort_keys=True, separators=(",", ":")) + "\n").encode("utf-8"))
    for i, frame in enumerate(capture.frames):
        (root / f"frame_{i:04d}.pgm").write_bytes(encode_frame_pgm(frame))
    for i, depth in enumerate(capture.depth_maps):
        (root / f"depth_{i:04d}.rsd").write_bytes(_encode_grid(_MAGIC_DEPTH, depth.depths))
    (root / "thermal.rst").write_bytes(_encode_grid(_MAGIC_THERMAL, capture.thermal.temps))
    (root / "audio.rsa").write_bytes(_encode_audio(capture.audio))
    (root / "imu.rsi").write_bytes(_encode_imu(capture.imu))
    return root


def _read_bytes(root: Path, name: str) -> bytes:
    f = root / name
    if not f.is_file():
        raise CaptureError(f"corrupt capture: missing {name}")
    return f.read_bytes()


def read_capture_dir(path: str | Path) -> SceneCapture:
    """Read a capture directory written by write_capture_dir."""
    root = Path(path)
    if not root.is_dir():
        raise CaptureError(f"corrupt capture: {root} is not a directory")
    try:
        meta = json.loads(_read_bytes(root, "capture.json"))
    except (ValueError, UnicodeDecodeError):
        raise CaptureError("corrupt capture: capture.json is not valid JSON") from None
    if not isinstance(meta, dict):
        raise CaptureError("corrupt capture: capture.json must hold an object")
    keys = set(meta) - {"location"}
    if keys != _META_REQUIRED:
        raise CaptureError("corrupt capture: capture.json has wrong fields")
    for key in ("frame_count", "frame_rate", "height", "sample_rate", "timestamp_unix", "width"):
        if not isinstance(meta[key], int) or isinstance(meta[key], bool):
            raise CaptureError(f"corrupt capture: {key} must be an integer")
    if not isinstance(meta["device_id"], str):
        raise CaptureError("corrupt capture: device_id must be a string")
    if not isinstance(meta["pixels_per_radian"], (int, float)):
        raise CaptureError("corrupt capture: pixels_per_radian must be a number")
    n = meta["frame_count"]
    if n <= 0:
        raise CaptureError("corrupt capture: frame_count must be positive")

    location = None
    if "location" in meta:
        loc = meta["location"]
        if (not isinstance(loc, dict) or set(loc) != {"lat_microdeg", "lon_microdeg"}
                or not all(isinstance(v, int) and not isinstance(v, bool) for v in loc.values())):
            raise CaptureError("corrupt capture: malformed location")
        location = (loc["lat_microdeg"], loc["lon_microdeg"])

    frames = tuple(decode_frame_pgm(_read_bytes(root, f"frame_{i:04d}.pgm")) for i in range(n))
    depth_maps = tuple(
        DepthMap(_decode_grid(_MAGIC_DEPTH, _read_bytes(root, f"depth_{i:04d}.rsd"), "depth"))
        for i in range(n))
    thermal = ThermalMap(_decode_grid(_MAGIC_THERMAL, _read_bytes(root, "thermal.rst"), "thermal"))
    audio = _decode_audio(_read_bytes(root, "audio.rsa"))
    imu = _decode_imu(_read_bytes(root, "imu.rsi"))

    capture = SceneCapture(
        frames=frames,
        depth_maps=depth_maps,
        thermal=thermal,
        audio=audio,
        imu=imu,
        frame_rate=meta["frame_rate"],
        device_id=meta["device_id"],
        timestamp_unix=meta["timestamp_unix"],
        location=location,
        pixels_per_radian=float(meta["pixels_per_radian"]),
    )
    if (capture.width, capture.height) != (meta["width"], meta["height"]):
        raise CaptureError("corrupt capture: metadata dims disagree with frames")
    if capture.audio.sample_rate != meta["sample_rate"]:
        raise CaptureError("corrupt capture: metadata sample_rate disagrees with audio")
    return capture
