"""Synthetic dataset generation: PGM files plus a JSON manifest."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import DatasetError, InvalidSpec
from ..image import GrayImage, read_pgm, write_pgm
from .code import ArtcodeCode
from .render import GenSpec, Style, random_code, render

ARTCODE, NON_ARTCODE = "artcode", "non_artcode"
LABELS = (ARTCODE, NON_ARTCODE)


@dataclass(frozen=True)
class DatasetEntry:
    id: str
    path: str
    label: str
    code: str | None
    seed: int
    style: str

    @property
    def is_artcode(self) -> bool:
        return self.label == ARTCODE

    def to_json(self) -> dict:
        return {"id": self.id, "path": self.path, "label": self.label, "code": self.code,
                "seed": self.seed, "style": self.style}


@dataclass(frozen=True)
class DatasetManifest:
    entries: tuple[DatasetEntry, ...]
    root: Path

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def image(self, entry: DatasetEntry) -> GrayImage:
        return read_pgm(self.root / entry.path)

    def labels(self) -> np.ndarray:
        """1 for Artcode, 0 otherwise, in manifest order."""
        return np.array([1 if e.is_artcode else 0 for e in self.entries], dtype=np.int64)

    def by_id(self) -> dict[str, DatasetEntry]:
        return {e.id: e for e in self.entries}


DEFAULT_DISTRACTORS = ("scatter", "polygonal")


def dataset_specs(n_artcode, n_non_artcode, seed, canvas=(256, 256), artcode_like_fraction=0.2,
                  n_regions=5, noise_level=0.0, copies=3, background=True,
                  distractor_modes=DEFAULT_DISTRACTORS):
    """The ``(id, label, GenSpec)`` triples a dataset is rendered from.

    By default every marker is drawn ``copies`` times with background
    decorations, so image blocks carry the same topology as the whole image.
    Plain distractors cycle through ``distractor_modes``; a share of the
    non-Artcodes are Artcode-like (repeated markers with opened roots).
    """
    if n_artcode < 1 or n_non_artcode < 1:
        raise InvalidSpec("a dataset needs at least one image of each class")
    if not distractor_modes:
        raise InvalidSpec("distractor_modes must not be empty")
    rng = np.random.default_rng(int(seed))
    image_seeds = rng.integers(0, 2**63, size=n_artcode + n_non_artcode).tolist()
    n_like = int(round(artcode_like_fraction * n_non_artcode))
    like_slots = set(rng.permutation(n_non_artcode)[:n_like].tolist())
    # several copies share one box budget, so keep regions small
    max_blobs = 5 if copies == 1 else 3
    common = {"canvas": tuple(canvas), "noise_level": noise_level, "copies": copies, "background": background}
    out = []
    for i in range(n_artcode):
        code = random_code(rng, n_regions=n_regions, max_blobs=max_blobs)
        spec = GenSpec(code=code, seed=image_seeds[i], style=Style.ARTCODE, **common)
        out.append((f"artcode_{i:04d}", ARTCODE, spec))
    for j in range(n_non_artcode):
        code = random_code(rng, n_regions=n_regions, max_blobs=max_blobs)
        if j in like_slots:
            spec = GenSpec(code=code, seed=image_seeds[n_artcode + j], style=Style.ARTCODE_LIKE, **common)
        else:
            mode = distractor_modes[int(rng.integers(0, len(distractor_modes)))]
            spec = GenSpec(code=code, seed=image_seeds[n_artcode + j], style=Style.NON_ARTCODE_RANDOM,
                           distractor=mode, **common)
        out.append((f"non_artcode_{j:04d}", NON_ARTCODE, spec))
    return out


def generate_dataset(n_artcode: int = 47, n_non_artcode: int = 116, seed: int = 42, out_dir=".",
                     **spec_options) -> DatasetManifest:
    """Render a labelled dataset into ``out_dir`` and write ``manifest.json``.

    Defaults mirror a 47/116 Artcode/non-Artcode split.  Output is
    byte-identical for a fixed seed.
    """
    specs = dataset_specs(n_artcode, n_non_artcode, seed, **spec_options)
    out = Path(out_dir)
    try:
        (out / "images").mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DatasetError(f"cannot create {out}: {exc}") from exc
    entries = []
    for image_id, label, spec in specs:
        rel = f"images/{image_id}.pgm"
        write_pgm(render(spec), out / rel)
        entries.append(DatasetEntry(
            id=image_id, path=rel, label=label,
            code=str(spec.code) if label == ARTCODE else None,
            seed=int(spec.seed), style=spec.style.value,
        ))
    manifest = DatasetManifest(tuple(entries), out)
    write_manifest(manifest, out / "manifest.json")
    return manifest


def write_manifest(manifest: DatasetManifest, path) -> None:
    text = json.dumps([e.to_json() for e in manifest.entries], indent=2) + "\n"
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise DatasetError(f"cannot write {path}: {exc}") from exc


def load_manifest(path) -> DatasetManifest:
    path = Path(path)
    if path.is_dir():
        path = path / "manifest.json"
    try:
        raw = json.loads(path.read_text())
    except (OSError, ValueError) as exc:
        raise DatasetError(f"cannot read manifest {path}: {exc}") from exc
    entries = []
    for item in raw:
        label = item["label"]
        if label not in LABELS:
            raise DatasetError(f"unknown label {label!r} in {path}")
        code = item.get("code")
        if code is not None:
            code = str(ArtcodeCode.parse(code))
        entries.append(DatasetEntry(
            id=str(item["id"]), path=str(item["path"]), label=label, code=code,
            seed=int(item.get("seed", 0)), style=str(item.get("style", label)),
        ))
    return DatasetManifest(tuple(entries), path.parent)
