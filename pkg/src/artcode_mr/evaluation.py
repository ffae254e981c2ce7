"""Cross-validated evaluation of original and MR-augmented classifiers."""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .artcode.dataset import ARTCODE, NON_ARTCODE, DatasetManifest
from .classifier import TrainConfig, train
from .errors import DatasetError, FoldTooSmall, InvalidSpec
from .features import DEFAULT_SOH, SohConfig
from .stats import RhoGroup
from .mr import MaskSet, MrConfig, RhoRecord, build_masks, followup_features, record_from_probas

DEFAULT_NTREES_GRID = tuple(range(10, 101, 10))


@dataclass(frozen=True)
class ConfusionCounts:
    """Artcode is the positive class.  Counts may be normalised rates."""

    tp: float = 0
    fp: float = 0
    tn: float = 0
    fn: float = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise InvalidSpec("confusion counts must be non-negative")

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(self.tp + other.tp, self.fp + other.fp, self.tn + other.tn, self.fn + other.fn)

    @classmethod
    def from_labels(cls, truth, predicted) -> "ConfusionCounts":
        t = np.asarray(truth) == 1
        p = np.asarray(predicted) == 1
        return cls(int((t & p).sum()), int((~t & p).sum()), int((~t & ~p).sum()), int((t & ~p).sum()))


@dataclass(frozen=True)
class MetricSet:
    precision: float
    recall: float
    accuracy: float
    tnr: float
    f_beta: float
    mcc: float
    beta: float = 2.0

    NAMES = ("precision", "recall", "accuracy", "tnr", "f_beta", "mcc")

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in self.NAMES}

    @classmethod
    def mean(cls, sets) -> "MetricSet":
        sets = list(sets)
        return cls(*(math.fsum(getattr(s, n) for s in sets) / len(sets) for n in cls.NAMES), beta=sets[0].beta)


def _ratio(num, den):
    return num / den if den else 0.0


def compute_metrics(c: ConfusionCounts, beta: float = 2.0) -> MetricSet:
    """Standard confusion-matrix metrics; any zero denominator yields 0."""
    if c.total <= 0:
        raise InvalidSpec("metrics need at least one evaluated sample")
    precision = _ratio(c.tp, c.tp + c.fp)
    recall = _ratio(c.tp, c.tp + c.fn)
    tnr = _ratio(c.tn, c.tn + c.fp)
    accuracy = (c.tp + c.tn) / c.total
    b2 = beta * beta
    f_beta = _ratio((1 + b2) * precision * recall, b2 * precision + recall)
    den = (c.tp + c.fp) * (c.tp + c.fn) * (c.tn + c.fp) * (c.tn + c.fn)
    mcc = _ratio(c.tp * c.tn - c.fp * c.fn, math.sqrt(den)) if den > 0 else 0.0
    return MetricSet(precision, recall, accuracy, tnr, f_beta, mcc, beta)


@dataclass(frozen=True)
class CvPlan:
    k: int = 5
    repeats: int = 5
    stratified: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.k < 2 or self.repeats < 1:
            raise InvalidSpec("need k >= 2 folds and at least one repeat")


def fold_assignment(labels, k: int, stratified: bool, rng) -> np.ndarray:
    """Fold index per sample: shuffle (per class when stratified) and deal round-robin."""
    labels = np.asarray(labels)
    folds = np.empty(len(labels), dtype=np.int64)
    pools = [np.flatnonzero(labels == c) for c in np.unique(labels)] if stratified else [np.arange(len(labels))]
    for pool in pools:
        if len(pool) < k:
            raise FoldTooSmall(f"{len(pool)} samples cannot fill {k} folds")
        folds[rng.permutation(pool)] = np.arange(len(pool)) % k
    return folds


@dataclass(frozen=True, eq=False)
class FeatureBank:
    """SOH rows for every image: index 0 is the whole image, then its follow-ups."""

    ids: tuple[str, ...]
    labels: np.ndarray
    features: np.ndarray  # (n_images, 1 + n + m, dim)

    @classmethod
    def from_manifest(cls, manifest: DatasetManifest, masks: MaskSet | None = None,
                      soh: SohConfig = DEFAULT_SOH) -> "FeatureBank":
        stack = []
        for entry in manifest:
            img = manifest.image(entry)
            mk = masks or build_masks((img.width, img.height))
            stack.append(followup_features(img, mk, soh))
        return cls(tuple(e.id for e in manifest), manifest.labels(), np.stack(stack))


@dataclass(frozen=True)
class ClassRectification:
    size: int
    correct: float
    incorrect: float

    @property
    def correct_pct(self) -> float:
        return _ratio(self.correct, self.size)

    @property
    def incorrect_pct(self) -> float:
        return _ratio(self.incorrect, self.size)


@dataclass(frozen=True)
class RectificationSummary:
    artcode: ClassRectification
    non_artcode: ClassRectification
    repeats: int = 1

    @property
    def net_percentage(self) -> float:
        return net_rectification(self.artcode.correct, self.artcode.incorrect,
                                 self.non_artcode.correct, self.non_artcode.incorrect,
                                 self.artcode.size + self.non_artcode.size)

    def to_json(self) -> dict:
        out = {"repeats": self.repeats, "net_percentage": self.net_percentage}
        for name, c in ((ARTCODE, self.artcode), (NON_ARTCODE, self.non_artcode)):
            out[name] = {"size": c.size, "correct": c.correct, "incorrect": c.incorrect,
                         "correct_pct": c.correct_pct, "incorrect_pct": c.incorrect_pct}
        return out


def net_rectification(correct_a, incorrect_a, correct_n, incorrect_n, total) -> float:
    """Share of all samples whose prediction rectification improved, net of the damage it did."""
    return (correct_a - incorrect_a + correct_n - incorrect_n) / total


def _tally(records, truth: dict[str, str]):
    counts = Counter()
    for r in records:
        if r.rectified:
            ok = r.final == truth[r.image_id]
            counts[(truth[r.image_id], "correct" if ok else "incorrect")] += 1
    return counts


def rectification_report(records, truth) -> RectificationSummary:
    """Per-class correct/incorrect rectification tallies averaged over repeats.

    ``truth`` is a manifest or an ``id -> label`` mapping.  The number of
    repeats is read off the dump as the number of records per image.
    """
    if isinstance(truth, DatasetManifest):
        truth = {e.id: e.label for e in truth}
    records = list(records)
    missing = {r.image_id for r in records} - set(truth)
    if missing:
        raise DatasetError(f"records without ground truth: {sorted(missing)[:5]}")
    per_id = Counter(r.image_id for r in records)
    repeats = max(per_id.values()) if per_id else 1
    sizes = Counter(truth[i] for i in per_id)
    counts = _tally(records, truth)

    def cls(label):
        return ClassRectification(sizes[label], counts[(label, "correct")] / repeats,
                                  counts[(label, "incorrect")] / repeats)

    return RectificationSummary(cls(ARTCODE), cls(NON_ARTCODE), repeats)


@dataclass(frozen=True)
class CvResult:
    original: MetricSet
    augmented: MetricSet | None
    per_repeat_original: tuple[MetricSet, ...]
    per_repeat_augmented: tuple[MetricSet, ...]
    rectification: RectificationSummary | None
    records: tuple[RhoRecord, ...] = field(repr=False, default=())

    def gains(self) -> dict | None:
        if self.augmented is None:
            return None
        return {n: getattr(self.augmented, n) - getattr(self.original, n) for n in MetricSet.NAMES}

    def to_json(self) -> dict:
        out = {
            "original": self.original.as_dict(),
            "per_repeat_original": [m.as_dict() for m in self.per_repeat_original],
        }
        if self.augmented is not None:
            out["augmented"] = self.augmented.as_dict()
            out["gains"] = self.gains()
            out["per_repeat_augmented"] = [m.as_dict() for m in self.per_repeat_augmented]
            out["rectification"] = self.rectification.to_json()
        return out


def run_cv(data, train_cfg: TrainConfig = TrainConfig(), mr_cfg: MrConfig | None = MrConfig(),
           plan: CvPlan = CvPlan(), feature_cfg: SohConfig = DEFAULT_SOH, beta: float = 2.0) -> CvResult:
    """Repeated k-fold evaluation of the original and (optionally) augmented classifier.

    ``data`` is a manifest or a precomputed :class:`FeatureBank`.  Within a
    repeat every image is predicted once; metrics are computed from that
    repeat's pooled confusion counts and then averaged over repeats.
    """
    bank = data if isinstance(data, FeatureBank) else FeatureBank.from_manifest(
        data, build_masks(_canvas_of(data), mr_cfg.n if mr_cfg else 4, mr_cfg.m if mr_cfg else 4), feature_cfg)
    y = bank.labels
    truth = {i: (ARTCODE if lab else NON_ARTCODE) for i, lab in zip(bank.ids, y)}
    per_ori, per_aug, records = [], [], []
    online = Counter()
    for rep in range(plan.repeats):
        rng = np.random.default_rng([plan.seed, rep])
        folds = fold_assignment(y, plan.k, plan.stratified, rng)
        pred_ori = np.zeros(len(y), dtype=np.int64)
        pred_aug = np.zeros(len(y), dtype=np.int64)
        for f in range(plan.k):
            test = np.flatnonzero(folds == f)
            train_idx = np.flatnonzero(folds != f)
            model = train(bank.features[train_idx, 0], y[train_idx],
                          train_cfg.replace(seed=train_cfg.seed + rep * plan.k + f))
            if mr_cfg is None:
                pred_ori[test] = model.predict_labels(bank.features[test, 0])
                continue
            for i in test:
                rec = record_from_probas(bank.ids[i], model.predict_proba(bank.features[i]),
                                         mr_cfg.weights, mr_cfg.thresholds, mr_cfg.binary)
                pred_ori[i] = rec.original == ARTCODE
                pred_aug[i] = rec.final == ARTCODE
                records.append(rec)
                online += _tally([rec], truth)
        per_ori.append(compute_metrics(ConfusionCounts.from_labels(y, pred_ori), beta))
        if mr_cfg is not None:
            per_aug.append(compute_metrics(ConfusionCounts.from_labels(y, pred_aug), beta))
    rect = None
    if mr_cfg is not None:
        sizes = Counter(truth.values())
        rect = RectificationSummary(
            *(ClassRectification(sizes[c], online[(c, "correct")] / plan.repeats,
                                 online[(c, "incorrect")] / plan.repeats) for c in (ARTCODE, NON_ARTCODE)),
            repeats=plan.repeats)
    return CvResult(MetricSet.mean(per_ori), MetricSet.mean(per_aug) if per_aug else None,
                    tuple(per_ori), tuple(per_aug), rect, tuple(records))


def _canvas_of(manifest: DatasetManifest):
    first = manifest.image(manifest.entries[0])
    return first.width, first.height


def ntrees_sweep(bank: FeatureBank, train_cfg: TrainConfig, mr_cfg: MrConfig, plan: CvPlan,
                 grid=DEFAULT_NTREES_GRID, algos=("rf", "svm"), beta: float = 2.0) -> list[dict]:
    """Metric curves over ``n_trees``; SVM runs once per tick too, so its curve is flat."""
    rows = []
    for algo in algos:
        for n in grid:
            res = run_cv(bank, train_cfg.replace(algo=algo, n_trees=int(n)), mr_cfg, plan, beta=beta)
            for variant, metrics in (("ori", res.original), ("aug", res.augmented)):
                rows.append({"algo": algo, "variant": variant, "ntrees": int(n), **metrics.as_dict()})
    return rows


SWEEP_HEADER = ["algo", "variant", "ntrees", *MetricSet.NAMES]


def write_sweep_csv(path, rows) -> None:
    try:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(SWEEP_HEADER)
            for r in rows:
                out.writerow([r["algo"], r["variant"], r["ntrees"], *(f"{r[n]:.6f}" for n in MetricSet.NAMES)])
    except OSError as exc:
        raise DatasetError(f"cannot write {path}: {exc}") from exc


def out_of_fold_records(bank: FeatureBank, train_cfg: TrainConfig, mr_cfg: MrConfig,
                        k: int = 5, seed: int = 0) -> list[RhoRecord]:
    """One rho-record per image, each from a model that never saw that image."""
    records = run_cv(bank, train_cfg, mr_cfg, CvPlan(k=k, repeats=1, seed=seed)).records
    order = {image_id: i for i, image_id in enumerate(bank.ids)}
    return sorted(records, key=lambda r: order[r.image_id])


def model_records(bank: FeatureBank, model, mr_cfg: MrConfig) -> list[RhoRecord]:
    return [record_from_probas(i, model.predict_proba(f), mr_cfg.weights, mr_cfg.thresholds, mr_cfg.binary)
            for i, f in zip(bank.ids, bank.features)]


def coin_records(ids, mr_cfg: MrConfig, seed: int = 0) -> list[RhoRecord]:
    """Records from a labeler that ignores the image and flips a fair coin per prediction."""
    rng = np.random.default_rng(int(seed))
    n_blocks = len(mr_cfg.weights)
    return [record_from_probas(i, rng.integers(0, 2, size=1 + n_blocks).astype(np.float64),
                               mr_cfg.weights, mr_cfg.thresholds, mr_cfg.binary) for i in ids]


def rho_groups(records, truth: dict[str, str], rho_max: float = 1.0):
    """Split rho-values into the Artcode and non-Artcode groups."""
    a = [r.rho for r in records if truth[r.image_id] == ARTCODE]
    n = [r.rho for r in records if truth[r.image_id] == NON_ARTCODE]
    return RhoGroup(ARTCODE, tuple(a), rho_max), RhoGroup(NON_ARTCODE, tuple(n), rho_max)
