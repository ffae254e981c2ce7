"""Artcode codes and the region adjacency tree they are read from."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import InvalidSpec


@dataclass(frozen=True, order=True)
class ArtcodeCode:
    """Ascending per-region blob counts, e.g. ``1-1-2-3-5``."""

    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if not counts:
            raise InvalidSpec("an Artcode needs at least one region")
        if any(c < 1 for c in counts):
            raise InvalidSpec(f"blob counts must be >= 1, got {counts}")
        object.__setattr__(self, "counts", tuple(sorted(counts)))

    @classmethod
    def parse(cls, text: str) -> ArtcodeCode:
        try:
            return cls(tuple(int(part) for part in text.strip().split("-")))
        except ValueError as exc:
            raise InvalidSpec(f"malformed code string {text!r}") from exc

    @property
    def n_regions(self) -> int:
        return len(self.counts)

    def __str__(self):
        return "-".join(str(c) for c in self.counts)


@dataclass(frozen=True)
class RegionAdjacencyTree:
    """Root boundary -> regions -> blobs.

    Node ids are opaque integers; when the tree comes from an image they are
    component ids (``regions`` are background ids, ``root`` and ``blobs``
    foreground ids).
    """

    root: int
    regions: tuple[int, ...]
    blobs: tuple[tuple[int, ...], ...] = field(default=())

    def __post_init__(self):
        if len(self.regions) != len(self.blobs):
            raise ValueError("one blob list per region is required")

    @classmethod
    def from_code(cls, code: ArtcodeCode) -> RegionAdjacencyTree:
        next_id = 1
        regions, blobs = [], []
        for count in code.counts:
            regions.append(next_id)
            blobs.append(tuple(range(next_id + 1, next_id + 1 + count)))
            next_id += count + 1
        return cls(root=0, regions=tuple(regions), blobs=tuple(blobs))

    @property
    def depth(self) -> int:
        if not self.regions:
            return 1
        return 3 if any(self.blobs) else 2

    def is_valid(self) -> bool:
        return bool(self.regions) and all(len(b) >= 1 for b in self.blobs)

    def code(self) -> ArtcodeCode:
        if not self.is_valid():
            raise InvalidSpec("tree is not a valid Artcode (empty region or no regions)")
        return ArtcodeCode(tuple(len(b) for b in self.blobs))
