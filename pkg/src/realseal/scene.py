"""Synthetic multisensory scene captures.

Three deterministic generators produce the scenarios the scoring pipeline
must separate:

* genuine        - textured scene with real depth structure, a warm body,
                   sound locked to motion, and IMU consistent with the pan
* screen-replay  - camera films a flat display: planar depth, uniform 37 C
                   thermal signature, audio decorrelated from motion
* printed-photo  - camera films a static printout: planar depth, ambient
                   thermal, zero motion with live audio

All sensor data is synthesized from a single SplitMix64 seed, so every
generator is byte-reproducible: same seed, same capture.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import CaptureError
from .rng import Stream, fill_unit

DEVICE_ID_RE = re.compile(r"^[A-Za-z0-9_-]{1,64}$")

# Declared conversion between yaw angle and horizontal pixel shift. A power
# of two keeps synthesized IMU values exact in float32.
PIXELS_PER_RADIAN = 64.0

LAT_MICRODEG_MAX = 90_000_000
LON_MICRODEG_MAX = 180_000_000

_DEFAULT_TIMESTAMP = 1_700_000_000


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


# ---------------------------------------------------------------------------
# Capture component types
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class LumaFrame:
    """8-bit luminance image, stored row-major as a (height, width) array."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.pixels)
        if arr.dtype != np.uint8:
            raise CaptureError("frame pixels must be uint8")
        if arr.ndim != 2 or arr.shape[0] < 2 or arr.shape[1] < 2:
            raise CaptureError("frame must be 2-D with width, height >= 2")
        self.pixels = _freeze(arr)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LumaFrame) and np.array_equal(self.pixels, other.pixels)


@dataclass(eq=False)
class DepthMap:
    """Per-pixel scene distance in meters, float32, shape (height, width)."""

    depths: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.depths)
        if arr.dtype != np.float32:
            raise CaptureError("depths must be float32")
        if arr.ndim != 2 or arr.size == 0:
            raise CaptureError("depth map must be a non-empty 2-D array")
        if not np.all(np.isfinite(arr)) or not np.all(arr > 0.0):
            raise CaptureError("depths must be finite and positive")
        self.depths = _freeze(arr)

    @property
    def height(self) -> int:
        return self.depths.shape[0]

    @property
    def width(self) -> int:
        return self.depths.shape[1]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, DepthMap) and np.array_equal(self.depths, other.depths)


@dataclass(eq=False)
class ThermalMap:
    """Per-pixel temperature in degrees Celsius, float32, shape (height, width)."""

    temps: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.temps)
        if arr.dtype != np.float32:
            raise CaptureError("temps must be float32")
        if arr.ndim != 2 or arr.size == 0:
            raise CaptureError("thermal map must be a non-empty 2-D array")
        if not np.all(np.isfinite(arr)):
            raise CaptureError("temps must be finite")
        if arr.min() < -40.0 or arr.max() > 150.0:
            raise CaptureError("temps must lie within [-40, 150] C")
        self.temps = _freeze(arr)

    @property
    def height(self) -> int:
        return self.temps.shape[0]

    @property
    def width(self) -> int:
        return self.temps.shape[1]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ThermalMap) and np.array_equal(self.temps, other.temps)


@dataclass(eq=False)
class AudioTrack:
    """Mono audio: integer sample rate plus float32 samples in [-1, 1]."""

    sample_rate: int
    samples: np.ndarray

    def __post_init__(self) -> None:
        if not isinstance(self.sample_rate, int) or self.sample_rate <= 0:
            raise CaptureError("sample_rate must be a positive integer")
        arr = np.asarray(self.samples)
        if arr.dtype != np.float32 or arr.ndim != 1:
            raise CaptureError("samples must be a 1-D float32 array")
        if arr.size and (not np.all(np.isfinite(arr)) or np.abs(arr).max() > 1.0):
            raise CaptureError("samples must be finite and within [-1, 1]")
        self.samples = _freeze(arr)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, AudioTrack)
            and self.sample_rate == other.sample_rate
            and np.array_equal(self.samples, other.samples)
        )


@dataclass(eq=False)
class ImuTrace:
    """Gyro yaw rate sampled once per video frame, radians/second, float32."""

    yaw_rates: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.yaw_rates)
        if arr.dtype != np.float32 or arr.ndim != 1:
            raise CaptureError("yaw_rates must be a 1-D float32 array")
        if arr.size and not np.all(np.isfinite(arr)):
            raise CaptureError("yaw_rates must be finite")
        self.yaw_rates = _freeze(arr)

    def __len__(self) -> int:
        return int(self.yaw_rates.size)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ImuTrace) and np.array_equal(self.yaw_rates, other.yaw_rates)


@dataclass(eq=False)
class SceneCapture:
    """One synchronized multisensory recording plus device identity."""

    frames: tuple[LumaFrame, ...]
    depth_maps: tuple[DepthMap, ...]
    thermal: ThermalMap
    audio: AudioTrack
    imu: ImuTrace
    frame_rate: int
    device_id: str
    timestamp_unix: int
    location: tuple[int, int] | None = None
    pixels_per_radian: float = PIXELS_PER_RADIAN

    def __post_init__(self) -> None:
        self.frames = tuple(self.frames)
        self.depth_maps = tuple(self.depth_maps)
        if not self.frames:
            raise CaptureError("capture needs at least one frame")
        if len(self.depth_maps) != len(self.frames):
            raise CaptureError("one depth map per frame required")
        w, h = self.frames[0].width, self.frames[0].height
        for f in self.frames:
            if (f.width, f.height) != (w, h):
                raise CaptureError("all frames must share dimensions")
        for d in self.depth_maps:
            if (d.width, d.height) != (w, h):
                raise CaptureError("depth map dimensions must match frames")
        if not isinstance(self.frame_rate, int) or self.frame_rate <= 0:
            raise CaptureError("frame_rate must be a positive integer")
        if len(self.imu) != len(self.frames):
            raise CaptureError("IMU trace must have one entry per frame")
        # audio must cover the frame span: samples/rate >= frames/frame_rate
        if self.audio.samples.size * self.frame_rate < len(self.frames) * self.audio.sample_rate:
            raise CaptureError("audio shorter than the frame span")
        if not DEVICE_ID_RE.match(self.device_id):
            raise CaptureError("device_id must be 1-64 chars of [A-Za-z0-9_-]")
        if not isinstance(self.timestamp_unix, int) or self.timestamp_unix < 0:
            raise CaptureError("timestamp_unix must be a non-negative integer")
        if self.location is not None:
            lat, lon = self.location
            if not (isinstance(lat, int) and isinstance(lon, int)):
                raise CaptureError("location must be integer microdegrees")
            if abs(lat) > LAT_MICRODEG_MAX or abs(lon) > LON_MICRODEG_MAX:
                raise CaptureError("location out of range")
            self.location = (lat, lon)
        if not (np.isfinite(self.pixels_per_radian) and self.pixels_per_radian > 0):
            raise CaptureError("pixels_per_radian must be positive")

    @property
    def frame_count(self) -> int:
        return len(self.frames)

    @property
    def width(self) -> int:
        return self.frames[0].width

    @property
    def height(self) -> int:
        return self.frames[0].height

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SceneCapture):
            return NotImplemented
        return (
            self.frames == other.frames
            and self.depth_maps == other.depth_maps
            and self.thermal == other.thermal
            and self.audio == other.audio
            and self.imu == other.imu
            and self.frame_rate == other.frame_rate
            and self.device_id == other.device_id
            and self.timestamp_unix == other.timestamp_unix
            and self.location == other.location
            and self.pixels_per_radian == other.pixels_per_radian
        )


@dataclass(frozen=True)
class ScenarioParams:
    """Knobs for the scenario generators; defaults keep everything desk-scale."""

    width: int = 32
    height: int = 32
    frame_count: int = 16
    frame_rate: int = 8
    sample_rate: int = 8000
    ambient_temp_c: float = 20.0
    body_temp_c: float = 37.0
    screen_temp_c: float = 37.0
    depth_base_m: float = 2.0

    def __post_init__(self) -> None:
        ints = (self.width, self.height, self.frame_count, self.frame_rate, self.sample_rate)
        if not all(isinstance(v, int) and v > 0 for v in ints):
            raise CaptureError("dimensions and rates must be positive integers")
        if self.width < 2 or self.height < 2:
            raise CaptureError("width and height must be at least 2")
        if self.frame_count < 4:
            raise CaptureError("frame_count must be at least 4")
        floats = (self.ambient_temp_c, self.body_temp_c, self.screen_temp_c, self.depth_base_m)
        if not all(np.isfinite(v) and v > 0 for v in floats):
            raise CaptureError("temperatures and base depth must be positive and finite")


# ---------------------------------------------------------------------------
# Shared synthesis helpers
# ---------------------------------------------------------------------------

def _texture(seed: int, width: int, height: int) -> np.ndarray:
    """Horizontally smoothed random texture; column-correlated so per-frame
    motion energy grows with shift size."""
    raw = fill_unit(seed, width * height).reshape(height, width)
    sm = (raw + np.roll(raw, 1, axis=1) + np.roll(raw, 2, axis=1) + np.roll(raw, 3, axis=1)) / 4.0
    return (40.0 + 175.0 * sm).astype(np.uint8)


def _pan_shifts(phase: int, frame_count: int) -> np.ndarray:
    """Per-transition pixel shifts: 1,1,2,2,... starting at a seed phase.

    Varying (not constant) shifts give the flow and IMU series the variance
    the motion scorer needs for a defined correlation.
    """
    k = np.arange(frame_count - 1)
    return 1 + ((k + phase) // 2) % 2


def _imu_for_shifts(shifts: np.ndarray, pixels_per_radian: float) -> np.ndarray:
    """Instantaneous yaw rates whose trapezoidal average reproduces each
    per-transition pixel shift exactly: (u[k]+u[k+1])/2 * ppr == shift[k]."""
    u = np.empty(len(shifts) + 1, dtype=np.float64)
    u[0] = shifts[0]
    for k, t in enumerate(shifts):
        u[k + 1] = 2.0 * t - u[k]
    return (u / pixels_per_radian).astype(np.float32)


def _motion_energy_u8(frames: list[np.ndarray]) -> np.ndarray:
    # Mirrors the scoring definition: mean |pixel delta| / 255 per transition.
    out = np.empty(len(frames) - 1, dtype=np.float64)
    for k in range(len(frames) - 1):
        a = frames[k].astype(np.int16)
        b = frames[k + 1].astype(np.int16)
        out[k] = np.abs(b - a).mean() / 255.0
    return out


def _window_bounds(frame_count: int, frame_rate: int, sample_rate: int) -> np.ndarray:
    """Sample index of each frame-window boundary: ceil(k*sr/fr), k=0..n."""
    k = np.arange(frame_count + 1, dtype=np.int64)
    return -(-(k * sample_rate) // frame_rate)


def _audio_from_envelope(env: np.ndarray, frame_count: int, frame_rate: int,
                         sample_rate: int) -> AudioTrack:
    """Alternating-sign carrier whose per-window RMS equals env[k] exactly."""
    bounds = _window_bounds(frame_count, frame_rate, sample_rate)
    total = int(bounds[-1])
    samples = np.empty(total, dtype=np.float64)
    for k in range(frame_count):
        samples[bounds[k]:bounds[k + 1]] = env[k]
    signs = np.where(np.arange(total) % 2 == 0, 1.0, -1.0)
    return AudioTrack(sample_rate, (samples * signs).astype(np.float32))


def _noise(seed: int, width: int, height: int, half_range: float) -> np.ndarray:
    return (fill_unit(seed, width * height).reshape(height, width) - 0.5) * (2.0 * half_range)


def _body_rect(u: tuple[float, float, float, float], width: int, height: int) -> tuple[slice, slice]:
    """Near-centered rectangle covering roughly 12-30% of the grid."""
    frac_w = 0.35 + 0.20 * u[0]
    frac_h = 0.35 + 0.20 * u[1]
    cx = 0.5 + 0.12 * (u[2] - 0.5)
    cy = 0.5 + 0.12 * (u[3] - 0.5)
    bw = max(1, round(frac_w * width))
    bh = max(1, round(frac_h * height))
    x0 = min(max(0, round(cx * width - bw / 2)), width - bw)
    y0 = min(max(0, round(cy * height - bh / 2)), height - bh)
    return slice(y0, y0 + bh), slice(x0, x0 + bw)


def _tilted_plane(stream: Stream, params: ScenarioParams) -> np.ndarray:
    """Gently tilted plane at the base distance (a flat screen or printout)."""
    a = (stream.next_unit() - 0.5) * 0.004
    b = (stream.next_unit() - 0.5) * 0.004
    xs = np.arange(params.width, dtype=np.float64) - (params.width - 1) / 2.0
    ys = np.arange(params.height, dtype=np.float64) - (params.height - 1) / 2.0
    plane = params.depth_base_m + a * xs[np.newaxis, :] + b * ys[:, np.newaxis]
    return plane.astype(np.float32)


def _uniform_thermal(seed: int, level_c: float, params: ScenarioParams) -> ThermalMap:
    # +-0.02 C synthetic sensor noise: population std stays below 0.05 C.
    temps = level_c + _noise(seed, params.width, params.height, 0.02)
    return ThermalMap(temps.astype(np.float32))


def _location(stream: Stream) -> tuple[int, int]:
    lat = int(stream.next_unit() * (2 * LAT_MICRODEG_MAX + 1)) - LAT_MICRODEG_MAX
    lon = int(stream.next_unit() * (2 * LON_MICRODEG_MAX + 1)) - LON_MICRODEG_MAX
    return lat, lon


def _moving_frames(tex_seed: int, phase: int, params: ScenarioParams
                   ) -> tuple[list[np.ndarray], np.ndarray, np.ndarray]:
    """Panned frame stack: returns (pixel arrays, offsets, per-transition shifts)."""
    base = _texture(tex_seed, params.width, params.height)
    shifts = _pan_shifts(phase, params.frame_count)
    offsets = np.concatenate([[0], np.cumsum(shifts)])
    pix = [np.roll(base, int(o), axis=1) for o in offsets]
    return pix, offsets, shifts


# ---------------------------------------------------------------------------
# Scenario generators
# ---------------------------------------------------------------------------

def generate_genuine_scene(seed: int, params: ScenarioParams = ScenarioParams()) -> SceneCapture:
    """Physically coherent scene: layered depth, warm body over a thermal
    gradient, audio envelope locked to motion, IMU matching the camera pan."""
    if params.depth_base_m <= 1.05:
        raise CaptureError("genuine scene needs depth_base_m > 1.05 for a distinct near layer")
    s = Stream(seed)
    tex_seed = s.derive_seed()
    depth_seed = s.derive_seed()
    thermal_seed = s.derive_seed()
    rect_u = (s.next_unit(), s.next_unit(), s.next_unit(), s.next_unit())
    phase = s.next_u64() & 3

    pix, offsets, shifts = _moving_frames(tex_seed, phase, params)
    frames = tuple(LumaFrame(p) for p in pix)

    rect = _body_rect(rect_u, params.width, params.height)

    # Two depth layers exactly 1 m apart (plus +-5 cm surface noise), panned
    # with the camera so frame 0 carries the unshifted structure.
    base_depth = params.depth_base_m + _noise(depth_seed, params.width, params.height, 0.05)
    base_depth[rect] -= 1.0
    depth_maps = tuple(
        DepthMap(np.roll(base_depth, int(o), axis=1).astype(np.float32)) for o in offsets
    )

    xs = np.arange(params.width, dtype=np.float64)
    gradient = 2.0 * (xs / max(params.width - 1, 1) - 0.5)
    temps = params.ambient_temp_c + gradient[np.newaxis, :] + _noise(
        thermal_seed, params.width, params.height, 0.1)
    temps[rect] = params.body_temp_c + _noise(
        thermal_seed ^ 0xA5A5A5A5, params.width, params.height, 0.2)[rect]
    thermal = ThermalMap(temps.astype(np.float32))

    imu = ImuTrace(_imu_for_shifts(shifts, PIXELS_PER_RADIAN))

    # Sound follows the visuals: window k+1 carries the energy of the
    # transition into frame k+1, matching the scorer's envelope alignment.
    m = _motion_energy_u8(pix)
    env = np.concatenate([[m[0]], m])
    audio = _audio_from_envelope(env, params.frame_count, params.frame_rate, params.sample_rate)

    return SceneCapture(
        frames=frames,
        depth_maps=depth_maps,
        thermal=thermal,
        audio=audio,
        imu=imu,
        frame_rate=params.frame_rate,
        device_id=f"SIM-GEN-{seed & 0xFFFFFFFFFFFFFFFF:016X}",
        timestamp_unix=_DEFAULT_TIMESTAMP,
        location=_location(s),
    )


def generate_screen_replay_scene(seed: int, params: ScenarioParams = ScenarioParams()) -> SceneCapture:
    """Analog-hole attack: a panning camera films a high-definition screen.

    Depth collapses to a plane, the display is thermally uniform at screen
    temperature, and the soundtrack has nothing to do with on-screen motion.
    The camera itself really moves, so IMU and optical flow stay consistent.
    """
    s = Stream(seed)
    tex_seed = s.derive_seed()
    thermal_seed = s.derive_seed()
    audio_seed = s.derive_seed()
    phase = s.next_u64() & 3

    pix, _offsets, shifts = _moving_frames(tex_seed, phase, params)
    frames = tuple(LumaFrame(p) for p in pix)

    plane = _tilted_plane(s, params)
    depth_maps = tuple(DepthMap(plane) for _ in range(params.frame_count))

    thermal = _uniform_thermal(thermal_seed, params.screen_temp_c, params)
    imu = ImuTrace(_imu_for_shifts(shifts, PIXELS_PER_RADIAN))

    # Independent substream: envelope uncorrelated with motion energy.
    env = 0.1 + 0.4 * fill_unit(audio_seed, params.frame_count)
    audio = _audio_from_envelope(env, params.frame_count, params.frame_rate, params.sample_rate)

    return SceneCapture(
        frames=frames,
        depth_maps=depth_maps,
        thermal=thermal,
        audio=audio,
        imu=imu,
        frame_rate=params.frame_rate,
        device_id=f"SIM-SCR-{seed & 0xFFFFFFFFFFFFFFFF:016X}",
        timestamp_unix=_DEFAULT_TIMESTAMP,
        location=_location(s),
    )


def generate_printed_photo_scene(seed: int, params: ScenarioParams = ScenarioParams()) -> SceneCapture:
    """Analog-hole attack: a static camera films a high-quality printout.

    Frames are identical (zero motion energy), depth is planar, the print
    sits at ambient temperature, the room tone keeps playing, and the IMU
    reads exactly zero.
    """
    s = Stream(seed)
    tex_seed = s.derive_seed()
    thermal_seed = s.derive_seed()
    audio_seed = s.derive_seed()

    base = _texture(tex_seed, params.width, params.height)
    frames = tuple(LumaFrame(base) for _ in range(params.frame_count))

    plane = _tilted_plane(s, params)
    depth_maps = tuple(DepthMap(plane) for _ in range(params.frame_count))

    thermal = _uniform_thermal(thermal_seed, params.ambient_temp_c, params)
    imu = ImuTrace(np.zeros(params.frame_count, dtype=np.float32))

    env = 0.1 + 0.4 * fill_unit(audio_seed, params.frame_count)
    audio = _audio_from_envelope(env, params.frame_count, params.frame_rate, params.sample_rate)

    return SceneCapture(
        frames=frames,
        depth_maps=depth_maps,
        thermal=thermal,
        audio=audio,
        imu=imu,
        frame_rate=params.frame_rate,
        device_id=f"SIM-PRN-{seed & 0xFFFFFFFFFFFFFFFF:016X}",
        timestamp_unix=_DEFAULT_TIMESTAMP,
        location=_location(s),
    )


SCENARIOS = {
    "genuine": generate_genuine_scene,
    "screen-replay": generate_screen_replay_scene,
    "printed-photo": generate_printed_photo_scene,
}


def generate_scene(scenario: str, seed: int, params: ScenarioParams = ScenarioParams()) -> SceneCapture:
    try:
        generator = SCENARIOS[scenario]
    except KeyError:
        raise CaptureError(f"unknown scenario {scenario!r}") from None
    return generator(seed, params)
