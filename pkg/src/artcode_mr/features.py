"""Shape-of-orientation-histogram (SOH) features.

An image is summarised by its magnitude-weighted gradient orientation
histogram; the SOH vector measures how self-similar that histogram is under
circular shifts and how smooth it is:

    [shift distances..., chi2 to 1-bin shift, chi2 to 3-bin smoothing,
     entropy in bits, share of mass in the top-k bins]
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DatasetError, ImageTooSmall
from .image import GrayImage


@dataclass(frozen=True)
class SohConfig:
    bin_count: int = 36
    signed: bool = True
    # fraction of the image's largest gradient magnitude below which pixels are ignored
    mag_threshold: float = 8 / 255
    shifts: tuple[int, ...] | None = None
    top_k: int = 4

    def resolved_shifts(self) -> tuple[int, ...]:
        if self.shifts is not None:
            return tuple(self.shifts)
        return (self.bin_count // 4, self.bin_count // 2)

    @property
    def dim(self) -> int:
        return len(self.resolved_shifts()) + 4

    def to_json(self) -> dict:
        return {"bin_count": self.bin_count, "signed": self.signed, "mag_threshold": self.mag_threshold,
                "shifts": list(self.resolved_shifts()), "top_k": self.top_k}


DEFAULT_SOH = SohConfig()


@dataclass(frozen=True, eq=False)
class OrientationHistogram:
    bins: np.ndarray
    signed: bool = True

    @property
    def bin_count(self) -> int:
        return len(self.bins)

    @property
    def mass(self) -> float:
        return float(self.bins.sum())


@dataclass(frozen=True, eq=False)
class SohVector:
    values: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.values)


def gradients(data: np.ndarray):
    """Central differences on interior pixels; ``gy`` points up the image."""
    f = np.asarray(data, dtype=np.float64)
    gx = (f[1:-1, 2:] - f[1:-1, :-2]) / 2.0
    gy = (f[:-2, 1:-1] - f[2:, 1:-1]) / 2.0
    return gx, gy


def orientation_histogram(img: GrayImage, cfg: SohConfig = DEFAULT_SOH) -> OrientationHistogram:
    """Magnitude-weighted orientation histogram with bins centred on multiples of the bin width.

    An orientation that falls exactly on a bin edge is split evenly between
    the two neighbouring bins, which keeps the histogram exactly equivariant
    under image flips and quarter turns.
    """
    if img.width < 3 or img.height < 3:
        raise ImageTooSmall(f"need at least 3x3 pixels, got {img.width}x{img.height}")
    n = cfg.bin_count
    gx, gy = gradients(img.data)
    mag = np.hypot(gx, gy)
    peak = mag.max()
    bins = np.zeros(n, dtype=np.float64)
    if peak == 0:
        return OrientationHistogram(bins, cfg.signed)
    keep = (mag > 0) & (mag >= cfg.mag_threshold * peak)
    mag, gx, gy = mag[keep], gx[keep], gy[keep]
    span = 360.0 if cfg.signed else 180.0
    theta = np.mod(np.degrees(np.arctan2(gy, gx)), span)
    # snap so angles with rational tangent (axes, diagonals) land exactly on centres or edges
    u = np.round(theta * (n / span), 9)
    lower = np.floor(u)
    on_edge = (u - lower) == 0.5
    centre = np.mod(np.floor(u + 0.5), n).astype(np.int64)
    bins += np.bincount(centre[~on_edge], weights=mag[~on_edge], minlength=n)
    if on_edge.any():
        lo = np.mod(lower[on_edge], n).astype(np.int64)
        hi = np.mod(lo + 1, n)
        half = mag[on_edge] / 2.0
        bins += np.bincount(lo, weights=half, minlength=n)
        bins += np.bincount(hi, weights=half, minlength=n)
    return OrientationHistogram(bins, cfg.signed)


def shift_distance(h: np.ndarray, shift: int) -> float:
    """Procrustes residual between a histogram and its circular shift.

    Both copies are mean-centred and scaled to unit norm; the distance is the
    residual norm after the best non-negative rescaling of the shifted copy,
    ``sqrt(1 - max(cos, 0)**2)``.  Constant or empty histograms give 0.
    """
    a = np.asarray(h, dtype=np.float64)
    a = a - a.mean()
    norm2 = float(a @ a)
    scale = float(np.abs(np.asarray(h, dtype=np.float64)).max()) if len(a) else 0.0
    if norm2 <= (1e-12 * scale) ** 2 * len(a):
        return 0.0
    cos = float(a @ np.roll(a, shift)) / norm2
    cos = min(max(cos, 0.0), 1.0)
    return float(np.sqrt(1.0 - cos * cos))


def symmetry_profile(h: OrientationHistogram, shifts=None) -> np.ndarray:
    if shifts is None:
        shifts = (h.bin_count // 4, h.bin_count // 2)
    return np.array([shift_distance(h.bins, s) for s in shifts], dtype=np.float64)


def chi2_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Half chi-square distance over bins where ``a + b > 0``."""
    s = a + b
    m = s > 0
    return 0.5 * float(np.sum((a[m] - b[m]) ** 2 / s[m]))


def moving_average(h: np.ndarray, window: int = 3) -> np.ndarray:
    half = window // 2
    return sum(np.roll(h, k) for k in range(-half, half + 1)) / window


def smoothness_profile(h: OrientationHistogram) -> np.ndarray:
    """Mass-normalised chi-square to the 1-bin shift and to the 3-bin moving average."""
    bins = h.bins
    mass = bins.sum()
    if mass <= 0:
        return np.zeros(2)
    return np.array([
        chi2_distance(bins, np.roll(bins, 1)) / mass,
        chi2_distance(bins, moving_average(bins, 3)) / mass,
    ])


def histogram_entropy(h: OrientationHistogram) -> float:
    mass = h.bins.sum()
    if mass <= 0:
        return 0.0
    p = h.bins[h.bins > 0] / mass
    return float(max(0.0, -np.sum(p * np.log2(p))))


def top_mass_fraction(h: OrientationHistogram, k: int = 4) -> float:
    mass = h.bins.sum()
    if mass <= 0:
        return 0.0
    return float(np.sort(h.bins)[::-1][:k].sum() / mass)


def soh_from_histogram(h: OrientationHistogram, cfg: SohConfig = DEFAULT_SOH) -> SohVector:
    values = np.concatenate([
        symmetry_profile(h, cfg.resolved_shifts()),
        smoothness_profile(h),
        [histogram_entropy(h), top_mass_fraction(h, cfg.top_k)],
    ])
    return SohVector(values)


def extract_soh(img: GrayImage, cfg: SohConfig = DEFAULT_SOH) -> SohVector:
    return soh_from_histogram(orientation_histogram(img, cfg), cfg)


def feature_header(dim: int) -> list[str]:
    return ["id", "label"] + [f"f{i}" for i in range(dim)]


def write_feature_csv(path, ids, labels, features) -> None:
    """Write ``id,label,f0..f{dim-1}``; floats use ``repr`` so they round-trip exactly."""
    features = np.asarray(features, dtype=np.float64)
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(feature_header(features.shape[1]))
            for image_id, label, row in zip(ids, labels, features):
                writer.writerow([image_id, label] + [repr(float(v)) for v in row])
    except OSError as exc:
        raise DatasetError(f"cannot write {path}: {exc}") from exc


def read_feature_csv(path):
    """Inverse of :func:`write_feature_csv`: ``(ids, labels, features)``."""
    try:
        with open(Path(path), newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from exc
    if not rows or rows[0][:2] != ["id", "label"]:
        raise DatasetError(f"{path} is not a feature CSV")
    ids = [r[0] for r in rows[1:]]
    labels = [r[1] for r in rows[1:]]
    feats = np.array([[float(v) for v in r[2:]] for r in rows[1:]], dtype=np.float64)
    return ids, labels, feats.reshape(len(ids), len(rows[0]) - 2)
