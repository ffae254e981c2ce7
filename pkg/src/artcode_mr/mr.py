"""Separation/Occlusion follow-up images, aggregated likelihood and rectification.

An image is cut into ``n`` equal separation tiles (cropped) and ``m = 4``
overlapping half-image occlusion views (full canvas, the hidden half painted
white).  Each follow-up is classified, the binary votes are weighted into
``rho``, and ``rho`` can override the original label.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .classifier import Prediction, TrainedModel
from .errors import DatasetError, DimensionMismatch, InvalidSpec, UnsupportedMaskCount
from .features import DEFAULT_SOH, SohConfig, extract_soh
from .image import GrayImage

SEPARATION_COUNTS = (4, 9, 16)
OCCLUSION_NAMES = ("left", "right", "top", "bottom")


@dataclass(frozen=True)
class Mask:
    """Axis-aligned visible window ``[x0, x1) x [y0, y1)`` on a canvas."""

    kind: str  # "separation" or "occlusion"
    x0: int
    y0: int
    x1: int
    y1: int

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0

    def covers(self, other: "Mask") -> bool:
        return self.x0 <= other.x0 and self.y0 <= other.y0 and other.x1 <= self.x1 and other.y1 <= self.y1

    def array(self, canvas) -> np.ndarray:
        w, h = canvas
        out = np.zeros((h, w), dtype=bool)
        out[self.y0:self.y1, self.x0:self.x1] = True
        return out


@dataclass(frozen=True)
class MaskSet:
    canvas: tuple[int, int]
    separation: tuple[Mask, ...]
    occlusion: tuple[Mask, ...]

    @property
    def n(self) -> int:
        return len(self.separation)

    @property
    def m(self) -> int:
        return len(self.occlusion)

    def __iter__(self):
        return iter(self.separation + self.occlusion)

    def __len__(self):
        return self.n + self.m


def build_masks(canvas, n: int = 4, m: int = 4) -> MaskSet:
    """A ``k x k`` tiling (``n = k*k``) plus the four half-image views."""
    if n not in SEPARATION_COUNTS:
        raise UnsupportedMaskCount(f"n must be one of {SEPARATION_COUNTS}, got {n}")
    if m != 4:
        raise UnsupportedMaskCount(f"m must be 4, got {m}")
    w, h = int(canvas[0]), int(canvas[1])
    k = math.isqrt(n)
    if w < k or h < k:
        raise InvalidSpec(f"canvas {w}x{h} is too small for a {k}x{k} tiling")
    xs = [i * w // k for i in range(k + 1)]
    ys = [j * h // k for j in range(k + 1)]
    sep = tuple(Mask("separation", xs[i], ys[j], xs[i + 1], ys[j + 1]) for j in range(k) for i in range(k))
    half_w, half_h = -(-w // 2), -(-h // 2)
    occ = (
        Mask("occlusion", 0, 0, half_w, h),
        Mask("occlusion", w // 2, 0, w, h),
        Mask("occlusion", 0, 0, w, half_h),
        Mask("occlusion", 0, h // 2, w, h),
    )
    return MaskSet((w, h), sep, occ)


def generate_followups(img: GrayImage, masks: MaskSet) -> list[GrayImage]:
    if (img.width, img.height) != tuple(masks.canvas):
        raise DimensionMismatch(f"image is {img.width}x{img.height}, masks are for {masks.canvas}")
    data = img.data
    out = [GrayImage(data[mk.y0:mk.y1, mk.x0:mk.x1]) for mk in masks.separation]
    for mk in masks.occlusion:
        view = np.full_like(data, 255)
        view[mk.y0:mk.y1, mk.x0:mk.x1] = data[mk.y0:mk.y1, mk.x0:mk.x1]
        out.append(GrayImage(view))
    return out


@dataclass(frozen=True)
class WeightVector:
    n: int = 4
    m: int = 4
    w_s: float = 0.1
    w_o: float = 0.15

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise InvalidSpec("weight vector needs n, m >= 1")
        if not 0 < self.w_s <= self.w_o:
            raise InvalidSpec("weights must satisfy 0 < w_s <= w_o")

    @property
    def values(self) -> tuple[float, ...]:
        return (self.w_s,) * self.n + (self.w_o,) * self.m

    @property
    def rho_max(self) -> float:
        return math.fsum(self.values)

    def __len__(self):
        return self.n + self.m


@dataclass(frozen=True)
class Thresholds:
    t1: float = 0.2
    t2: float = 0.2
    rho_max: float = 1.0

    def __post_init__(self):
        if not 0 <= self.t1 <= self.t2 <= self.rho_max:
            raise InvalidSpec(f"need 0 <= t1 <= t2 <= {self.rho_max}, got t1={self.t1}, t2={self.t2}")


def aggregate_rho(p, w: WeightVector, binary: bool = True) -> float:
    """Weighted sum of follow-up votes.  ``binary=False`` accepts probabilities."""
    p = [float(v) for v in p]
    if len(p) != len(w):
        raise DimensionMismatch(f"prediction vector has {len(p)} entries, weights {len(w)}")
    if binary and any(v not in (0.0, 1.0) for v in p):
        raise InvalidSpec("binary prediction vector must contain only 0 and 1")
    if not binary and any(not 0.0 <= v <= 1.0 for v in p):
        raise InvalidSpec("probabilities must lie in [0, 1]")
    return math.fsum(pi * wi for pi, wi in zip(p, w.values))


def rectify(rho: float, original: Prediction | str, t: Thresholds) -> tuple[str, bool]:
    label = original.label if isinstance(original, Prediction) else str(original)
    if rho < t.t1:
        final = "non_artcode"
    elif rho >= t.t2:
        final = "artcode"
    else:
        final = label
    return final, final != label


@dataclass(frozen=True)
class RhoRecord:
    image_id: str
    p: tuple[float, ...]
    rho: float
    original: str
    final: str
    rectified: bool
    original_proba: float = float("nan")


@dataclass(frozen=True)
class MrConfig:
    n: int = 4
    m: int = 4
    weights: WeightVector = WeightVector()
    thresholds: Thresholds = Thresholds()
    binary: bool = True


def followup_features(img: GrayImage, masks: MaskSet, soh: SohConfig = DEFAULT_SOH) -> np.ndarray:
    """SOH rows for the whole image followed by its ``n + m`` follow-ups."""
    rows = [extract_soh(img, soh).values]
    rows += [extract_soh(block, soh).values for block in generate_followups(img, masks)]
    return np.vstack(rows)


def record_from_probas(image_id, probas, w: WeightVector, t: Thresholds, binary=True) -> RhoRecord:
    """Build a record from ``[whole, block_1 .. block_{n+m}]`` Artcode probabilities."""
    probas = np.asarray(probas, dtype=np.float64)
    original = Prediction.from_proba(float(probas[0]))
    blocks = probas[1:]
    p = tuple(float(v >= 0.5) for v in blocks) if binary else tuple(float(v) for v in blocks)
    rho = aggregate_rho(p, w, binary=binary)
    final, rectified = rectify(rho, original, t)
    return RhoRecord(str(image_id), p, rho, original.label, final, rectified, original.proba)


def classify_augmented(img: GrayImage, model: TrainedModel, masks: MaskSet, w: WeightVector = WeightVector(),
                       t: Thresholds = Thresholds(), image_id: str = "", soh: SohConfig = DEFAULT_SOH,
                       binary: bool = True) -> RhoRecord:
    if len(masks) != len(w):
        raise DimensionMismatch(f"{len(masks)} masks but {len(w)} weights")
    probas = model.predict_proba(followup_features(img, masks, soh))
    return record_from_probas(image_id, probas, w, t, binary)


def rho_header(n_blocks: int) -> list[str]:
    return ["id", "rho"] + [f"p{i}" for i in range(n_blocks)] + ["original", "final", "rectified"]


def _fmt(v: float) -> str:
    return repr(float(v))


def write_rho_csv(path, records) -> None:
    records = list(records)
    n_blocks = len(records[0].p) if records else 8
    try:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(rho_header(n_blocks))
            for r in records:
                p = [str(int(v)) if v in (0.0, 1.0) else _fmt(v) for v in r.p]
                out.writerow([r.image_id, _fmt(r.rho), *p, r.original, r.final, str(r.rectified).lower()])
    except OSError as exc:
        raise DatasetError(f"cannot write {path}: {exc}") from exc


def read_rho_csv(path) -> list[RhoRecord]:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from exc
    if not rows or rows[0][:2] != ["id", "rho"] or rows[0][-3:] != ["original", "final", "rectified"]:
        raise DatasetError(f"{path} is not a rho-record CSV")
    records = []
    for row in rows[1:]:
        if len(row) != len(rows[0]):
            raise DatasetError(f"{path}: malformed row {row!r}")
        records.append(RhoRecord(row[0], tuple(float(v) for v in row[2:-3]), float(row[1]),
                                 row[-3], row[-2], row[-1] == "true"))
    return records
