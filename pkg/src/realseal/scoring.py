"""Per-dimension credibility scores and the vetoed aggregate.

Each scorer targets one staging cue:

* depth      - least-squares plane fit; flat displays leave ~zero residual
* thermal    - spatial temperature spread; screens and prints are uniform
* audio sync - lag-searched correlation between sound envelope and motion
* motion     - agreement between optical-flow shifts and gyro yaw rates

Scores live in [0, 1] with 1 = most credible. Aggregation multiplies the
weighted mean by a veto term so one collapsed dimension cannot be averaged
away.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scene import AudioTrack, DepthMap, SceneCapture, ThermalMap

_ZERO_MOTION_EPS = 1e-9


@dataclass(frozen=True)
class ScoringParams:
    tau_depth_m: float = 0.05
    tau_thermal_c: float = 1.5
    max_lag_frames: int = 2
    veto_threshold: float = 0.2
    weights: tuple[float, float, float, float] = (0.25, 0.25, 0.25, 0.25)

    def __post_init__(self) -> None:
        if not (self.tau_depth_m > 0 and self.tau_thermal_c > 0):
            raise ValueError("taus must be positive")
        if not (isinstance(self.max_lag_frames, int) and self.max_lag_frames >= 0):
            raise ValueError("max_lag_frames must be a non-negative integer")
        if not 0 < self.veto_threshold <= 1:
            raise ValueError("veto_threshold must lie in (0, 1]")
        w = self.weights
        if len(w) != 4 or any(x < 0 for x in w):
            raise ValueError("weights must be four non-negative reals")
        if abs(sum(w) - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")


@dataclass(frozen=True)
class DimensionScores:
    depth: float
    thermal: float
    audio_sync: float
    motion: float

    def __post_init__(self) -> None:
        for name, v in self.as_dict().items():
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} score outside [0, 1]")

    def as_dict(self) -> dict[str, float]:
        return {
            "depth": self.depth,
            "thermal": self.thermal,
            "audio_sync": self.audio_sync,
            "motion": self.motion,
        }


@dataclass(frozen=True)
class PlaneFit:
    """depth ~ a*(x - x_mean) + b*(y - y_mean) + c over grid coordinates."""

    a: float
    b: float
    c: float
    rms_residual: float


# ---------------------------------------------------------------------------
# Depth
# ---------------------------------------------------------------------------

def fit_plane(depth_map: DepthMap) -> PlaneFit:
    """Least-squares plane through the depth grid.

    Centering x and y at the grid mean makes the design orthogonal on a full
    rectangle, so the normal equations decouple into three closed forms.
    """
    d = depth_map.depths.astype(np.float64)
    h, w = d.shape
    if w * h < 3:
        raise ValueError("plane fit needs at least 3 pixels")
    xc = np.arange(w, dtype=np.float64) - (w - 1) / 2.0
    yc = np.arange(h, dtype=np.float64) - (h - 1) / 2.0
    sxx = h * float(np.sum(xc * xc))
    syy = w * float(np.sum(yc * yc))
    a = float(d.sum(axis=0) @ xc) / sxx if sxx > 0 else 0.0
    b = float(d.sum(axis=1) @ yc) / syy if syy > 0 else 0.0
    c = float(d.mean())
    resid = d - (a * xc[np.newaxis, :] + b * yc[:, np.newaxis] + c)
    rms = math.sqrt(float(np.mean(resid * resid)))
    return PlaneFit(a=a, b=b, c=c, rms_residual=rms)


def score_depth(depth_map: DepthMap, params: ScoringParams = ScoringParams()) -> float:
    """1 - exp(-rms/tau): zero iff exactly planar, saturating toward 1."""
    return 1.0 - math.exp(-fit_plane(depth_map).rms_residual / params.tau_depth_m)


# ---------------------------------------------------------------------------
# Thermal
# ---------------------------------------------------------------------------

def score_thermal(thermal: ThermalMap, params: ScoringParams = ScoringParams()) -> float:
    """1 - exp(-sigma/tau) over the population std of the temperature map."""
    sigma = float(np.std(thermal.temps.astype(np.float64)))
    return 1.0 - math.exp(-sigma / params.tau_thermal_c)


# ---------------------------------------------------------------------------
# Audio / motion series
# ---------------------------------------------------------------------------

def audio_envelope(audio: AudioTrack, frame_rate: int, frame_count: int) -> np.ndarray:
    """Per-frame RMS of the samples in [k/frame_rate, (k+1)/frame_rate)."""
    if frame_rate <= 0 or frame_count <= 0:
        raise ValueError("frame_rate and frame_count must be positive")
    sr = audio.sample_rate
    k = np.arange(frame_count + 1, dtype=np.int64)
    bounds = -(-(k * sr) // frame_rate)  # ceil(k*sr/fr)
    if bounds[-1] > audio.samples.size:
        raise ValueError("insufficient audio samples for the frame span")
    if np.any(np.diff(bounds) == 0):
        raise ValueError("frame window shorter than one audio sample")
    x = audio.samples.astype(np.float64)
    return np.array([
        math.sqrt(float(np.mean(x[bounds[i]:bounds[i + 1]] ** 2)))
        for i in range(frame_count)
    ])


def motion_energy(frames) -> np.ndarray:
    """Mean |pixel delta| / 255 for each consecutive frame pair."""
    if len(frames) < 2:
        raise ValueError("motion energy needs at least 2 frames")
    shape = frames[0].pixels.shape
    out = np.empty(len(frames) - 1, dtype=np.float64)
    for i in range(len(frames) - 1):
        if frames[i + 1].pixels.shape != shape:
            raise ValueError("frame dimensions mismatch")
        delta = frames[i + 1].pixels.astype(np.int16) - frames[i].pixels.astype(np.int16)
        out[i] = float(np.abs(delta).mean()) / 255.0
    return out


def _pearson(x: np.ndarray, y: np.ndarray) -> float | None:
    """Pearson correlation, or None when either side has zero variance.

    Clamped to [-1, 1] (exact by Cauchy-Schwarz) so float noise cannot break
    tie resolution between lags that are mathematically tied at +-1.
    """
    xc = x - x.mean()
    yc = y - y.mean()
    sx = float(xc @ xc)
    sy = float(yc @ yc)
    if sx == 0.0 or sy == 0.0:
        return None
    rho = float(xc @ yc) / math.sqrt(sx * sy)
    return min(1.0, max(-1.0, rho))


def _lag_preference(max_lag: int):
    # 0, -1, +1, -2, +2, ...: smallest |lag| first, negative before positive.
    yield 0
    for mag in range(1, max_lag + 1):
        yield -mag
        yield mag


def best_lag_correlation(x, y, max_lag: int) -> tuple[int, float | None]:
    """Lag in [-L, L] maximizing Pearson correlation of the overlap.

    Lag ell pairs x[i] with y[i+ell], so a positive lag means y trails x.
    Ties resolve to the smallest |lag|, negative first. Returns (0, None)
    when every overlap is degenerate (zero variance on either side).
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = x.size
    if y.size != n:
        raise ValueError("series length mismatch")
    if n < 3:
        raise ValueError("series must have at least 3 points")
    if not 0 <= max_lag < n:
        raise ValueError("max_lag must satisfy 0 <= L < n")
    best_lag, best_rho = 0, None
    for lag in _lag_preference(max_lag):
        if lag >= 0:
            rho = _pearson(x[:n - lag], y[lag:])
        else:
            rho = _pearson(x[-lag:], y[:n + lag])
        if rho is not None and (best_rho is None or rho > best_rho):
            best_lag, best_rho = lag, rho
    return best_lag, best_rho


def score_av_alignment(envelope_tail, motion, params: ScoringParams = ScoringParams()) -> float:
    """Alignment score for a (sound, motion) series pair.

    max(0, rho*) discounted by how far the best lag sits from zero; 0.5 when
    the correlation is undefined (both signals flat is not evidence either way).
    """
    lag, rho = best_lag_correlation(envelope_tail, motion, params.max_lag_frames)
    if rho is None:
        return 0.5
    score = max(0.0, rho) * (1.0 - abs(lag) / (params.max_lag_frames + 1))
    return min(1.0, max(0.0, score))


def score_audio_sync(capture: SceneCapture, params: ScoringParams = ScoringParams()) -> float:
    env = audio_envelope(capture.audio, capture.frame_rate, capture.frame_count)
    m = motion_energy(capture.frames)
    # env[k+1] lines up with the transition into frame k+1
    return score_av_alignment(env[1:], m, params)


# ---------------------------------------------------------------------------
# Optical flow vs IMU
# ---------------------------------------------------------------------------

def flow_shift(frames) -> np.ndarray:
    """Signed integer horizontal shift (pixels) per frame transition.

    Each frame collapses to its column-sum profile; the shift maximizing the
    circular normalized cross-correlation wins, searched over [-w//2, w//2]
    with ties resolved to the smallest |s|, negative first. Positive means
    content moved toward higher column indices.
    """
    if len(frames) < 2:
        raise ValueError("flow estimation needs at least 2 frames")
    shape = frames[0].pixels.shape
    profiles = []
    for f in frames:
        if f.pixels.shape != shape:
            raise ValueError("frame dimensions mismatch")
        profiles.append(f.pixels.astype(np.float64).sum(axis=0))
    w = shape[1]
    out = np.empty(len(frames) - 1, dtype=np.int64)
    for i in range(len(frames) - 1):
        p1, p2 = profiles[i], profiles[i + 1]
        best_s, best_rho = 0, None
        for s in _lag_preference(w // 2):
            rho = _pearson(p1, np.roll(p2, -s))
            if rho is not None and (best_rho is None or rho > best_rho):
                best_s, best_rho = s, rho
        out[i] = best_s
    return out


def score_motion(capture: SceneCapture, params: ScoringParams = ScoringParams()) -> float:
    """Correlation between flow shifts and trapezoid-averaged gyro motion.

    Zero-variance handling: if either series is constant, the capture is
    consistent only when both read zero everywhere (static camera), scoring
    1.0; any one-sided claim of motion scores 0.0.
    """
    f = flow_shift(capture.frames).astype(np.float64)
    u = capture.imu.yaw_rates.astype(np.float64)
    if u.size != len(capture.frames):
        raise ValueError("IMU length mismatch")
    g = (u[:-1] + u[1:]) / 2.0 * capture.pixels_per_radian
    rho = _pearson(f, g)
    if rho is None:
        both_zero = (np.max(np.abs(f), initial=0.0) <= _ZERO_MOTION_EPS
                     and np.max(np.abs(g), initial=0.0) <= _ZERO_MOTION_EPS)
        return 1.0 if both_zero else 0.0
    return min(1.0, max(0.0, rho))


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------

def aggregate(scores: DimensionScores, params: ScoringParams = ScoringParams()) -> float:
    """Weighted mean times the veto term min(1, min_score/theta)."""
    s = (scores.depth, scores.thermal, scores.audio_sync, scores.motion)
    mean = sum(w * v for w, v in zip(params.weights, s))
    veto = min(1.0, min(s) / params.veto_threshold)
    return mean * veto


def score_capture(capture: SceneCapture,
                  params: ScoringParams = ScoringParams()) -> tuple[DimensionScores, float]:
    """Run all four scorers (depth on frame 0) and aggregate."""
    dims = DimensionScores(
        depth=score_depth(capture.depth_maps[0], params),
        thermal=score_thermal(capture.thermal, params),
        audio_sync=score_audio_sync(capture, params),
        motion=score_motion(capture, params),
    )
    return dims, aggregate(dims, params)
