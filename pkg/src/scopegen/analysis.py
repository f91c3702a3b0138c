"""Classical baselines: localization, detection, linking, counting, focus.

These are the non-learned reference algorithms the synthetic data is
benchmarked against.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage
from scipy.optimize import linear_sum_assignment

from .errors import (
    DegenerateFit,
    EmptyInput,
    EmptyTrace,
    FlatMetricWarning,
    SingularSystem,
)
from .optics import OpticalConfig, propagate


def radial_center(image: np.ndarray) -> tuple[float, float]:
    """Sub-pixel center of a radially symmetric spot.

    Every intensity gradient of a radially symmetric pattern points at the
    center, so the center is the point minimizing the weighted distance to
    all gradient lines; that point has a closed form. Gradients come from
    45-degree cross differences on the dual grid (midpoints between pixel
    centers), smoothed with a 3x3 boxcar. Invariant to affine intensity
    changes a*I + b by construction: differences cancel b and the
    least-squares ratio cancels a.

    Returns (y, x) in pixel-center coordinates.
    """
    img = np.asarray(image, dtype=float)
    if img.ndim != 2 or min(img.shape) < 3:
        raise EmptyInput(f"need a 2-D image at least 3x3, got shape {img.shape}")

    # Dual-grid coordinates: midpoints between the four pixels of each cell.
    ym = np.arange(img.shape[0] - 1, dtype=float)[:, None] + 0.5
    xm = np.arange(img.shape[1] - 1, dtype=float)[None, :] + 0.5

    d_u = img[:-1, 1:] - img[1:, :-1]  # along +45 degrees
    d_v = img[:-1, :-1] - img[1:, 1:]  # along -45 degrees
    box = np.ones((3, 3)) / 9.0
    f_u = ndimage.convolve(d_u, box, mode="nearest")
    f_v = ndimage.convolve(d_v, box, mode="nearest")

    grad_sq = f_u**2 + f_v**2
    total = grad_sq.sum()
    if total <= 0:
        raise DegenerateFit("image has no intensity gradients")

    # Rotate the diagonal gradient back to the pixel axes: slope of the
    # line through each midpoint along the local gradient.
    num = -(f_v + f_u)
    den = f_u - f_v
    with np.errstate(divide="ignore", invalid="ignore"):
        slope = num / den
    slope = np.where(np.isfinite(slope), slope, 1e9)
    intercept = ym - slope * xm

    centroid_x = float((grad_sq * xm).sum() / total)
    centroid_y = float((grad_sq * ym).sum() / total)
    dist = np.sqrt((xm - centroid_x) ** 2 + (ym - centroid_y) ** 2)
    weight = grad_sq / np.where(dist > 0, dist, np.inf)

    w_norm = weight / (slope**2 + 1.0)
    sw = w_norm.sum()
    s_mw = (slope * w_norm).sum()
    s_mmw = (slope**2 * w_norm).sum()
    s_bw = (intercept * w_norm).sum()
    s_mbw = (slope * intercept * w_norm).sum()
    det = s_mw**2 - s_mmw * sw
    if abs(det) < 1e-300:
        raise SingularSystem("gradient lines are parallel; center is undetermined")
    x_c = (s_mbw * sw - s_mw * s_bw) / det
    y_c = (s_mbw * s_mw - s_mmw * s_bw) / det
    return float(y_c), float(x_c)


@dataclass(frozen=True)
class Detection:
    y: float
    x: float
    area: int
    strength: float


def detect_peaks(
    prob_map: np.ndarray, threshold: float = 0.5, min_area: int = 2
) -> list[Detection]:
    """Connected regions above threshold, localized by weighted centroid."""
    prob = np.asarray(prob_map, dtype=float)
    if prob.ndim != 2:
        raise EmptyInput(f"need a 2-D map, got shape {prob.shape}")
    mask = prob >= threshold
    labeled, count = ndimage.label(mask)
    detections: list[Detection] = []
    for index in range(1, count + 1):
        region = labeled == index
        area = int(region.sum())
        if area < min_area:
            continue
        weights = np.where(region, prob, 0.0)
        total = weights.sum()
        yy, xx = np.nonzero(region)
        y_c = float((weights[yy, xx] * yy).sum() / total)
        x_c = float((weights[yy, xx] * xx).sum() / total)
        detections.append(Detection(y=y_c, x=x_c, area=area, strength=float(total)))
    detections.sort(key=lambda d: (-d.strength, d.y, d.x))
    return detections


@dataclass
class Trace:
    points: list[tuple[int, float, float]] = field(default_factory=list)

    def append(self, frame: int, y: float, x: float) -> None:
        self.points.append((frame, y, x))

    @property
    def last(self) -> tuple[int, float, float]:
        return self.points[-1]

    def mean_position(self) -> tuple[float, float]:
        if not self.points:
            raise EmptyTrace("trace has no points")
        ys = [p[1] for p in self.points]
        xs = [p[2] for p in self.points]
        return float(np.mean(ys)), float(np.mean(xs))


def link_traces(
    frames: list[list[tuple[float, float]]],
    max_distance: float,
    memory: int = 0,
) -> list[Trace]:
    """Greedy-optimal frame-to-frame linking of detections into traces.

    Each consecutive frame pair is matched by minimum total distance
    (Hungarian assignment) gated at ``max_distance``; unmatched detections
    start new traces, and traces unmatched for more than ``memory``
    consecutive frames are retired.
    """
    active: list[Trace] = []
    missed: list[int] = []
    finished: list[Trace] = []
    for frame_index, detections in enumerate(frames):
        points = [(float(y), float(x)) for y, x in detections]
        if active and points:
            last = np.array([t.last[1:] for t in active])
            cur = np.array(points)
            cost = np.linalg.norm(last[:, None, :] - cur[None, :, :], axis=2)
            rows, cols = linear_sum_assignment(cost)
            matched_traces = set()
            matched_points = set()
            for r, c in zip(rows, cols):
                if cost[r, c] <= max_distance:
                    active[r].append(frame_index, *points[c])
                    matched_traces.add(r)
                    matched_points.add(c)
        else:
            matched_traces = set()
            matched_points = set()

        survivors: list[Trace] = []
        survivor_missed: list[int] = []
        for i, trace in enumerate(active):
            if i in matched_traces:
                survivors.append(trace)
                survivor_missed.append(0)
            elif missed[i] < memory:
                survivors.append(trace)
                survivor_missed.append(missed[i] + 1)
            else:
                finished.append(trace)
        active = survivors
        missed = survivor_missed

        for c, point in enumerate(points):
            if c not in matched_points:
                trace = Trace()
                trace.append(frame_index, *point)
                active.append(trace)
                missed.append(0)
    finished.extend(active)
    finished.sort(key=lambda t: (t.points[0][0], t.points[0][1], t.points[0][2]))
    return finished


def average_traces(traces: list[Trace], min_length: int = 1) -> list[dict]:
    """Per-trace summary: mean position, length, frame span."""
    out = []
    for trace in traces:
        if len(trace.points) < min_length:
            continue
        y, x = trace.mean_position()
        frames_seen = [p[0] for p in trace.points]
        out.append(
            {
                "y": y,
                "x": x,
                "length": len(trace.points),
                "first_frame": min(frames_seen),
                "last_frame": max(frames_seen),
            }
        )
    return out


def count_by_integration(density_map: np.ndarray) -> float:
    """Object count from a unit-integral density map: just the pixel sum."""
    density = np.asarray(density_map, dtype=float)
    if density.size == 0:
        raise EmptyInput("empty density map")
    return float(density.sum())


@dataclass(frozen=True)
class PixelSumCalibration:
    gain: float
    offset: float

    def predict(self, image: np.ndarray) -> float:
        return self.gain * float(np.asarray(image, dtype=float).sum()) + self.offset


def calibrate_pixel_sum(
    images: list[np.ndarray], counts: list[float]
) -> PixelSumCalibration:
    """Least-squares affine map from raw pixel sums to object counts."""
    if len(images) != len(counts) or not images:
        raise EmptyInput("need equally many images and counts, at least one each")
    sums = np.array([float(np.asarray(im, dtype=float).sum()) for im in images])
    targets = np.asarray(counts, dtype=float)
    design = np.stack([sums, np.ones_like(sums)], axis=1)
    gram = design.T @ design
    if abs(np.linalg.det(gram)) < 1e-12 * max(1.0, float(np.abs(gram).max()) ** 2):
        raise SingularSystem("pixel sums are degenerate; cannot calibrate")
    gain, offset = np.linalg.solve(gram, design.T @ targets)
    return PixelSumCalibration(gain=float(gain), offset=float(offset))


@dataclass(frozen=True)
class MatchResult:
    matches: tuple[tuple[int, int], ...]
    unmatched_predicted: tuple[int, ...]
    unmatched_truth: tuple[int, ...]
    rmse: float

    @property
    def true_positives(self) -> int:
        return len(self.matches)

    @property
    def false_positives(self) -> int:
        return len(self.unmatched_predicted)

    @property
    def false_negatives(self) -> int:
        return len(self.unmatched_truth)


def match_detections(
    predicted: list[tuple[float, float]],
    truth: list[tuple[float, float]],
    max_distance: float,
) -> MatchResult:
    """Minimum-cost one-to-one matching gated at ``max_distance``."""
    if not predicted or not truth:
        return MatchResult(
            matches=(),
            unmatched_predicted=tuple(range(len(predicted))),
            unmatched_truth=tuple(range(len(truth))),
            rmse=float("nan"),
        )
    p = np.asarray(predicted, dtype=float)
    t = np.asarray(truth, dtype=float)
    cost = np.linalg.norm(p[:, None, :] - t[None, :, :], axis=2)
    rows, cols = linear_sum_assignment(cost)
    matches = tuple((int(r), int(c)) for r, c in zip(rows, cols) if cost[r, c] <= max_distance)
    matched_p = {r for r, _ in matches}
    matched_t = {c for _, c in matches}
    sq_errors = [cost[r, c] ** 2 for r, c in matches]
    rmse = float(np.sqrt(np.mean(sq_errors))) if sq_errors else float("nan")
    return MatchResult(
        matches=matches,
        unmatched_predicted=tuple(i for i in range(len(predicted)) if i not in matched_p),
        unmatched_truth=tuple(i for i in range(len(truth)) if i not in matched_t),
        rmse=rmse,
    )


def tamura_coefficient(amplitude: np.ndarray) -> float:
    """sqrt(std / mean) of a non-negative contrast image."""
    amplitude = np.asarray(amplitude, dtype=float)
    mean = amplitude.mean()
    if mean <= 0:
        raise EmptyInput("amplitude image has non-positive mean")
    return float(np.sqrt(amplitude.std() / mean))


def autofocus(
    field: np.ndarray,
    cfg: OpticalConfig,
    z_range: tuple[float, float],
    coarse_steps: int = 33,
) -> float:
    """Axial offset that best focuses a complex field.

    Scans the range for the minimum Tamura contrast of the propagated
    amplitude (weak scatterers are in phase quadrature at focus, so their
    amplitude contrast vanishes there), then refines with one parabolic
    fit through the bracketing samples. A flat metric raises a warning and
    returns the range midpoint.
    """
    z_lo, z_hi = float(z_range[0]), float(z_range[1])
    zs = np.linspace(z_lo, z_hi, int(coarse_steps))
    scores = np.array(
        [tamura_coefficient(np.abs(propagate(field, cfg, z))) for z in zs]
    )
    spread = scores.max() - scores.min()
    # The metric is dimensionless and O(0.1-1) when it carries any focus
    # information; sqrt amplifies FFT roundoff on a featureless field to
    # ~1e-8, so the flat threshold must sit above that.
    if spread < 1e-7 * max(1.0, abs(float(scores.mean()))):
        warnings.warn(
            "focus metric is flat over the search range", FlatMetricWarning, stacklevel=2
        )
        return 0.5 * (z_lo + z_hi)
    best = int(np.argmin(scores))
    if best in (0, len(zs) - 1):
        return float(zs[best])
    z_triplet = zs[best - 1 : best + 2]
    s_triplet = scores[best - 1 : best + 2]
    denom = (s_triplet[0] - 2 * s_triplet[1] + s_triplet[2])
    if denom <= 0:
        return float(zs[best])
    shift = 0.5 * (s_triplet[0] - s_triplet[2]) / denom
    step = z_triplet[1] - z_triplet[0]
    return float(z_triplet[1] + np.clip(shift, -1.0, 1.0) * step)
