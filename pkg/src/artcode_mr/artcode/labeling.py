"""Connected components, their containment tree, and code decoding.

Foreground (dark) pixels use 4-connectivity and background pixels use
8-connectivity, so every background component that does not reach the image
border is a hole of exactly one foreground component.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .. import _kernels
from ..errors import NoForeground, NoValidRoot
from ..image import GrayImage
from .code import ArtcodeCode, RegionAdjacencyTree


@dataclass(frozen=True, eq=False)
class ComponentLabeling:
    """Foreground components plus the background components they enclose.

    ``labels`` holds foreground ids ``1..count`` (0 = background);
    ``bg_labels`` holds background ids ``1..bg_count`` with 1 the outer
    background.  ``holes[i]`` lists the background ids enclosed directly by
    foreground component ``i + 1``, and ``contents[j]`` lists the foreground
    ids directly inside background component ``j + 1``.
    """

    labels: np.ndarray
    count: int
    holes: tuple[tuple[int, ...], ...]
    bg_labels: np.ndarray
    bg_count: int
    contents: tuple[tuple[int, ...], ...]
    areas: tuple[int, ...]

    def holes_of(self, component: int) -> tuple[int, ...]:
        return self.holes[component - 1]

    def inside(self, bg_component: int) -> tuple[int, ...]:
        return self.contents[bg_component - 1]


def _adjacent_pairs(fg_lab, bg_lab):
    """Unique (fg, bg) id pairs over 4-neighbour pixel contacts."""
    keys = []
    for a_fg, a_bg, b_fg, b_bg in (
        (fg_lab[:, :-1], bg_lab[:, :-1], fg_lab[:, 1:], bg_lab[:, 1:]),
        (fg_lab[:-1, :], bg_lab[:-1, :], fg_lab[1:, :], bg_lab[1:, :]),
    ):
        m = (a_fg > 0) & (b_bg > 0)
        keys.append(a_fg[m].astype(np.int64) << 32 | b_bg[m].astype(np.int64))
        m = (b_fg > 0) & (a_bg > 0)
        keys.append(b_fg[m].astype(np.int64) << 32 | a_bg[m].astype(np.int64))
    keys = np.unique(np.concatenate(keys))
    return (keys >> 32).astype(np.int64), (keys & 0xFFFFFFFF).astype(np.int64)


def label_components(img: GrayImage, threshold: int = 128) -> ComponentLabeling:
    """Label dark (``value < threshold``) components and build their containment tree."""
    if not 0 <= threshold <= 255:
        raise ValueError("threshold must lie in [0, 255]")
    fg = np.zeros((img.height + 2, img.width + 2), dtype=bool)
    fg[1:-1, 1:-1] = img.data < threshold
    fg_lab, count = _kernels.label_mask(fg, 4)
    bg_lab, bg_count = _kernels.label_mask(~fg, 8)
    # the padding ring makes background id 1 the outer background

    children_fg = [[] for _ in range(bg_count + 1)]
    children_bg = [[] for _ in range(count + 1)]
    if count:
        f_ids, b_ids = _adjacent_pairs(fg_lab, bg_lab)
        adj_fg = [[] for _ in range(count + 1)]
        adj_bg = [[] for _ in range(bg_count + 1)]
        for f, b in zip(f_ids.tolist(), b_ids.tolist()):
            adj_fg[f].append(b)
            adj_bg[b].append(f)
        seen_fg = [False] * (count + 1)
        seen_bg = [False] * (bg_count + 1)
        seen_bg[1] = True
        queue = deque([(False, 1)])
        while queue:
            is_fg, node = queue.popleft()
            if is_fg:
                for b in adj_fg[node]:
                    if not seen_bg[b]:
                        seen_bg[b] = True
                        children_bg[node].append(b)
                        queue.append((False, b))
            else:
                for f in adj_bg[node]:
                    if not seen_fg[f]:
                        seen_fg[f] = True
                        children_fg[node].append(f)
                        queue.append((True, f))

    areas = np.bincount(fg_lab.ravel(), minlength=count + 1)[1:]
    return ComponentLabeling(
        labels=fg_lab[1:-1, 1:-1].copy(),
        count=count,
        holes=tuple(tuple(sorted(h)) for h in children_bg[1:]),
        bg_labels=bg_lab[1:-1, 1:-1].copy(),
        bg_count=bg_count,
        contents=tuple(tuple(sorted(c)) for c in children_fg[1:]),
        areas=tuple(int(a) for a in areas),
    )


def candidate_trees(lab: ComponentLabeling) -> list[RegionAdjacencyTree]:
    """Every foreground component with a valid root -> region -> blob structure."""
    trees = []
    for comp in range(1, lab.count + 1):
        regions = lab.holes_of(comp)
        if not regions:
            continue
        blobs = [lab.inside(r) for r in regions]
        if any(not b for b in blobs):
            continue
        if any(lab.holes_of(blob) for b in blobs for blob in b):
            continue
        trees.append(RegionAdjacencyTree(root=comp, regions=regions, blobs=tuple(blobs)))
    return trees


def decode_tree(img: GrayImage, threshold: int = 128) -> RegionAdjacencyTree:
    lab = label_components(img, threshold)
    if lab.count == 0:
        raise NoForeground("image has no foreground pixels")
    trees = candidate_trees(lab)
    if not trees:
        raise NoValidRoot("no component has a root -> region -> blob hierarchy")
    # largest root wins; ids follow raster order, so max() keeps the first on ties
    return max(trees, key=lambda t: (lab.areas[t.root - 1], -t.root))


def decode(img: GrayImage, threshold: int = 128) -> ArtcodeCode:
    """Read the code of the dominant Artcode in ``img``."""
    return decode_tree(img, threshold).code()
