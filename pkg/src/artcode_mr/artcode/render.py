"""Seeded synthetic Artcode and non-Artcode rasters.

Artcode geometry is built so that it decodes by construction: regions are
perturbed ellipses packed inside a perturbed superellipse root with a wall
margin, and blobs are convex dabs kept clear of region edges and of each
other.  Distractor styles break exactly the rules a decoder checks and are
confirmed against :func:`decode` before being returned.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidSpec, NoForeground, NoValidRoot
from ..image import GrayImage
from .code import ArtcodeCode
from .labeling import decode

BLACK, WHITE = 0, 255

ROOT_MARGIN = 6.0  # wall between a region and the root's outer edge
REGION_WALL = 5.0  # wall between two regions
BLOB_CLEARANCE = 3.0  # gap between a blob and its region edge
BLOB_GAP = 3.0  # gap between two blobs


class Style(str, enum.Enum):
    ARTCODE = "artcode"
    NON_ARTCODE_RANDOM = "non_artcode_random"
    ARTCODE_LIKE = "artcode_like"


@dataclass(frozen=True)
class GenSpec:
    """Everything that determines one rendered image.

    ``code`` is required for the ``artcode`` style; the distractor styles use
    it (when given) as the template their repeated structures imitate.
    ``copies`` repeats the marker (same topology, fresh geometry) and
    ``background`` adds solid decorations around it; ``distractor`` pins the
    way a ``non_artcode_random`` image breaks the drawing rules.
    """

    code: ArtcodeCode | None = None
    canvas: tuple[int, int] = (256, 256)
    seed: int = 0
    style: Style = Style.ARTCODE
    noise_level: float = 0.0
    background: bool = False
    copies: int = 1
    distractor: str | None = None  # non_artcode_random mode; None picks one at random

    def __post_init__(self):
        object.__setattr__(self, "style", Style(self.style))
        if isinstance(self.code, str):
            object.__setattr__(self, "code", ArtcodeCode.parse(self.code))
        w, h = self.canvas
        if w < 64 or h < 64:
            raise InvalidSpec(f"canvas must be at least 64x64, got {w}x{h}")
        if not 0.0 <= self.noise_level <= 1.0:
            raise InvalidSpec("noise_level must lie in [0, 1]")
        if self.style is Style.ARTCODE and self.code is None:
            raise InvalidSpec("artcode style requires a code")
        if not 1 <= self.copies <= 4:
            raise InvalidSpec("copies must be between 1 and 4")
        if self.distractor is not None and self.distractor not in NON_ARTCODE_MODES:
            raise InvalidSpec(f"distractor must be one of {NON_ARTCODE_MODES}")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidSpec("seed must be a 64-bit unsigned integer")


# --- shape primitives -----------------------------------------------------


@dataclass
class Radial:
    """Star-shaped outline ``r(phi)`` around ``(cx, cy)``.

    The base outline is a rotated superellipse (exponent 2 is an ellipse)
    multiplied by ``1 + sum a_k cos(k phi + phase_k)``.
    """

    cx: float
    cy: float
    a: float
    b: float
    rot: float = 0.0
    power: float = 2.0
    harmonics: tuple[tuple[int, float, float], ...] = ()

    def radius(self, phi):
        t = np.asarray(phi) - self.rot
        c = np.abs(np.cos(t)) / self.a
        s = np.abs(np.sin(t)) / self.b
        base = (c**self.power + s**self.power) ** (-1.0 / self.power)
        wobble = 1.0
        for k, amp, phase in self.harmonics:
            wobble = wobble + amp * np.cos(k * np.asarray(phi) + phase)
        return base * wobble

    @property
    def max_radius(self) -> float:
        spread = sum(abs(amp) for _, amp, _ in self.harmonics)
        # superellipses with power > 2 bulge toward the diagonal
        corner = 2 ** (0.5 - 1.0 / self.power) if self.power > 2 else 1.0
        return max(self.a, self.b) * corner * (1.0 + spread)

    def contains(self, x, y, margin: float = 0.0):
        dx, dy = np.asarray(x) - self.cx, np.asarray(y) - self.cy
        return np.hypot(dx, dy) <= self.radius(np.arctan2(dy, dx)) - margin

    def ring(self, offset: float, n: int = 96):
        phi = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
        r = self.radius(phi) + offset
        return self.cx + r * np.cos(phi), self.cy + r * np.sin(phi)


def _grid(canvas, x0, x1, y0, y1):
    w, h = canvas
    x0, y0 = max(int(math.floor(x0)), 0), max(int(math.floor(y0)), 0)
    x1, y1 = min(int(math.ceil(x1)) + 1, w), min(int(math.ceil(y1)) + 1, h)
    if x1 <= x0 or y1 <= y0:
        return None
    ys, xs = np.mgrid[y0:y1, x0:x1]
    return (slice(y0, y1), slice(x0, x1)), xs + 0.5, ys + 0.5


def _blend(canvas_arr, sl, coverage, value):
    """Paint ``value`` over a float canvas with per-pixel ``coverage`` in [0, 1]."""
    patch = canvas_arr[sl]
    patch += (value - patch) * coverage


def _coverage(signed_distance):
    # a one-pixel linear ramp centred on the outline
    return np.clip(signed_distance + 0.5, 0.0, 1.0)


def fill_radial(canvas_arr, shape: Radial, value):
    h, w = canvas_arr.shape
    r = shape.max_radius + 1
    g = _grid((w, h), shape.cx - r, shape.cx + r, shape.cy - r, shape.cy + r)
    if g is None:
        return
    sl, xs, ys = g
    dx, dy = xs - shape.cx, ys - shape.cy
    _blend(canvas_arr, sl, _coverage(shape.radius(np.arctan2(dy, dx)) - np.hypot(dx, dy)), value)


def _segment_distance(xs, ys, x0, y0, x1, y1):
    dx, dy = x1 - x0, y1 - y0
    length2 = dx * dx + dy * dy
    t = np.clip(((xs - x0) * dx + (ys - y0) * dy) / length2, 0.0, 1.0) if length2 else 0.0
    return np.hypot(xs - (x0 + t * dx), ys - (y0 + t * dy))


def fill_polygon(canvas_arr, vertices, value):
    """Even-odd fill of a closed polygon with an anti-aliased outline."""
    h, w = canvas_arr.shape
    vx = np.array([v[0] for v in vertices], dtype=float)
    vy = np.array([v[1] for v in vertices], dtype=float)
    g = _grid((w, h), vx.min() - 1, vx.max() + 1, vy.min() - 1, vy.max() + 1)
    if g is None:
        return
    sl, xs, ys = g
    inside = np.zeros(xs.shape, dtype=bool)
    edge = np.full(xs.shape, np.inf)
    for i in range(len(vx)):
        x1, y1, x2, y2 = vx[i - 1], vy[i - 1], vx[i], vy[i]
        edge = np.minimum(edge, _segment_distance(xs, ys, x1, y1, x2, y2))
        if y1 == y2:
            continue
        crosses = (y1 > ys) != (y2 > ys)
        x_at = x1 + (ys - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (xs < x_at)
    _blend(canvas_arr, sl, _coverage(np.where(inside, edge, -edge)), value)


def fill_segment(canvas_arr, p0, p1, half_width, value):
    h, w = canvas_arr.shape
    (x0, y0), (x1, y1) = p0, p1
    pad = half_width + 1
    g = _grid((w, h), min(x0, x1) - pad, max(x0, x1) + pad, min(y0, y1) - pad, max(y0, y1) + pad)
    if g is None:
        return
    sl, xs, ys = g
    _blend(canvas_arr, sl, _coverage(half_width - _segment_distance(xs, ys, x0, y0, x1, y1)), value)


def new_canvas(canvas) -> np.ndarray:
    w, h = canvas
    return np.full((h, w), float(WHITE))


def to_pixels(canvas_arr) -> np.ndarray:
    return np.rint(np.clip(canvas_arr, 0, 255)).astype(np.uint8)


def _harmonics(rng, ks, max_amp):
    return tuple((k, float(rng.uniform(0, max_amp)), float(rng.uniform(0, 2 * np.pi))) for k in ks)


# --- artcode layout -------------------------------------------------------


@dataclass
class Layout:
    root: Radial
    regions: list[Radial]
    blobs: list[list[Radial]]


def _make_root(rng, box) -> Radial:
    x0, y0, x1, y1 = box
    w, h = x1 - x0, y1 - y0
    return Radial(
        cx=(x0 + x1) / 2 + rng.uniform(-0.02, 0.02) * w,
        cy=(y0 + y1) / 2 + rng.uniform(-0.02, 0.02) * h,
        a=rng.uniform(0.40, 0.45) * w,
        b=rng.uniform(0.40, 0.45) * h,
        rot=0.0,
        power=rng.uniform(2.0, 3.2),
        harmonics=_harmonics(rng, (2, 3, 5), 0.015),
    )


def _walls(root: Radial):
    """Root margin and region wall, thinner for small markers but never below 3 px."""
    side = 2 * min(root.a, root.b)
    return min(ROOT_MARGIN, max(3.5, 0.03 * side)), min(REGION_WALL, max(3.0, 0.025 * side))


def _min_region_radius(count):
    # room for ``count`` smallest blobs with their clearance and gaps
    return BLOB_CLEARANCE + 2.5 + 3.6 * math.sqrt(count - 1) if count > 1 else BLOB_CLEARANCE + 3.0


def _ring_inside(outer: Radial, cx, cy, radii, margin, n=48):
    """For each candidate disc ``(cx, cy, radius)``, is its ring inside ``outer`` by ``margin``?"""
    phi = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
    xs = cx[:, None] + radii[:, None] * np.cos(phi)
    ys = cy[:, None] + radii[:, None] * np.sin(phi)
    return np.all(outer.contains(xs, ys, margin), axis=1)


def _clear_of(cx, cy, radii, placed, gap):
    ok = np.ones(len(cx), dtype=bool)
    for o in placed:
        ok &= np.hypot(cx - o.cx, cy - o.cy) >= radii + o.max_radius + gap
    return ok


def _place_regions(rng, root: Radial, counts, scale, batch=64, rounds=5):
    root_margin, wall = _walls(root)
    regions = [None] * len(counts)
    # big regions first; the order of shapes inside the root is random
    order = sorted(range(len(counts)), key=lambda i: -counts[i])
    for i in order:
        base = max(scale * (8.0 + 5.0 * math.sqrt(counts[i])), _min_region_radius(counts[i]))
        placed = [r for r in regions if r is not None]
        for _ in range(rounds):
            ecc = rng.uniform(0.0, 0.22, batch)
            cx = root.cx + rng.uniform(-1, 1, batch) * root.a
            cy = root.cy + rng.uniform(-1, 1, batch) * root.b
            rot = rng.uniform(0, np.pi, batch)
            amps = rng.uniform(0, 0.04, (batch, 2))
            phases = rng.uniform(0, 2 * np.pi, (batch, 2))
            bound = base * (1 + ecc) * (1 + amps.sum(axis=1))
            ok = _clear_of(cx, cy, bound, placed, wall)
            ok[ok] = _ring_inside(root, cx[ok], cy[ok], bound[ok], root_margin)
            hits = np.flatnonzero(ok)
            if len(hits):
                j = hits[0]
                regions[i] = Radial(
                    cx=float(cx[j]), cy=float(cy[j]), a=base * (1 + ecc[j]), b=base * (1 - ecc[j]),
                    rot=float(rot[j]),
                    harmonics=tuple((k, float(amps[j, n]), float(phases[j, n])) for n, k in enumerate((2, 3))),
                )
                break
        else:
            return None
    return regions


def _place_blobs(rng, region: Radial, count, scale, batch=48, rounds=4):
    r_max = region.max_radius
    for shrink in (1.0, 0.8, 0.65, 0.5):
        blobs = []
        for _ in range(count):
            for _ in range(rounds):
                size = np.maximum(rng.uniform(2.6, 5.0, batch) * scale * shrink, 1.6)
                ecc = rng.uniform(0.0, 0.3, batch)
                rho = r_max * np.sqrt(rng.uniform(size=batch))
                ang = rng.uniform(0, 2 * np.pi, batch)
                rot = rng.uniform(0, np.pi, batch)
                cx = region.cx + rho * np.cos(ang)
                cy = region.cy + rho * np.sin(ang)
                bound = size * (1 + ecc)
                ok = _clear_of(cx, cy, bound, blobs, BLOB_GAP)
                ok[ok] = _ring_inside(region, cx[ok], cy[ok], bound[ok] + BLOB_CLEARANCE, 0.0, 32)
                hits = np.flatnonzero(ok)
                if len(hits):
                    j = hits[0]
                    blobs.append(Radial(float(cx[j]), float(cy[j]), float(size[j] * (1 + ecc[j])),
                                        float(size[j] * (1 - ecc[j])), float(rot[j])))
                    break
            else:
                break
        if len(blobs) == count:
            return blobs
    return None


def layout_marker(rng, box, code: ArtcodeCode) -> Layout:
    """One root with the regions and blobs of ``code`` inside ``box``."""
    counts = list(code.counts)
    rng.shuffle(counts)
    root = _make_root(rng, box)
    # scale regions so their bounding discs fill a fixed share of the root
    root_area = math.pi * root.a * root.b
    nominal = sum(math.pi * (8.0 + 5.0 * math.sqrt(c)) ** 2 for c in counts)
    scale = min(1.6, math.sqrt(0.30 * root_area / nominal))
    for _ in range(60):
        regions = _place_regions(rng, root, counts, scale)
        if regions is not None:
            blob_scale = min(max(scale, 0.6), 1.2)
            blobs = [_place_blobs(rng, reg, c, blob_scale) for reg, c in zip(regions, counts)]
            if all(b is not None for b in blobs):
                return Layout(root, regions, blobs)
        scale *= 0.94
    raise InvalidSpec(f"cannot fit code {code} in a {box[2] - box[0]:.0f}x{box[3] - box[1]:.0f} box")


def marker_boxes(rng, canvas, copies):
    """Boxes for ``copies`` markers: one centred, a pair, or cells of a jittered 2x2 grid."""
    w, h = canvas
    if copies == 1:
        return [(0.0, 0.0, float(w), float(h))]
    if copies == 2:
        if rng.integers(0, 2):
            cells = [(0.0, 0.0, w / 2, float(h)), (w / 2, 0.0, float(w), float(h))]
        else:
            cells = [(0.0, 0.0, float(w), h / 2), (0.0, h / 2, float(w), float(h))]
    else:
        cells = [(x, y, x + w / 2, y + h / 2) for y in (0.0, h / 2) for x in (0.0, w / 2)]
        cells = [cells[i] for i in sorted(rng.permutation(4)[:copies].tolist())]
    boxes = []
    for x0, y0, x1, y1 in cells:
        cw, ch = x1 - x0, y1 - y0
        side = min(cw, ch) * rng.uniform(0.78, 0.98)
        sw, sh = (side, side) if copies > 2 else (cw * rng.uniform(0.8, 0.98), ch * rng.uniform(0.8, 0.98))
        if copies == 2:
            sw = sh = min(sw, sh)
        bx = x0 + rng.uniform(0, cw - sw)
        by = y0 + rng.uniform(0, ch - sh)
        boxes.append((bx, by, bx + sw, by + sh))
    return boxes


def layout_artcode(rng, canvas, code: ArtcodeCode, copies: int = 1, attempts: int = 8) -> list[Layout]:
    # a dense code can dead-end in a small box; fresh boxes usually fit
    for attempt in range(attempts):
        try:
            return [layout_marker(rng, box, code) for box in marker_boxes(rng, canvas, copies)]
        except InvalidSpec:
            if attempt == attempts - 1:
                raise


def draw_layout(arr, layout: Layout):
    fill_radial(arr, layout.root, BLACK)
    for region, blobs in zip(layout.regions, layout.blobs):
        fill_radial(arr, region, WHITE)
        for blob in blobs:
            fill_radial(arr, blob, BLACK)


BACKGROUND_SHAPES = (4, 14)
BACKGROUND_SIZE = (0.03, 0.16)
BACKGROUND_POLYGON_SHARE = 0.75


def _draw_background(rng, arr, roots):
    """Solid decorations clear of every root; they add no holes, so the code is unchanged."""
    h, w = arr.shape
    for _ in range(int(rng.integers(*BACKGROUND_SHAPES))):
        for _ in range(60):
            size = rng.uniform(*BACKGROUND_SIZE) * min(w, h)
            cx, cy = rng.uniform(0, w), rng.uniform(0, h)
            if rng.random() >= BACKGROUND_POLYGON_SHARE:
                cand = Radial(cx, cy, size, size * rng.uniform(0.4, 1.0), rng.uniform(0, np.pi),
                              harmonics=_harmonics(rng, (2, 3), 0.1))
                probe, verts = cand, None
            else:
                verts = _random_polygon(rng, cx, cy, size, int(rng.integers(3, 7)), convex=True)
                probe = Radial(cx, cy, size, size)
            xs, ys = probe.ring(3.0, 32)
            if any(np.any(root.contains(xs, ys, margin=-3.0)) for root in roots):
                continue
            if verts is None:
                fill_radial(arr, cand, BLACK)
            else:
                fill_polygon(arr, verts, BLACK)
            break


# --- distractor styles ----------------------------------------------------


def _random_polygon(rng, cx, cy, radius, n_vertices, convex):
    phis = np.sort(rng.uniform(0, 2 * np.pi, n_vertices)) if not convex else (
        np.linspace(0, 2 * np.pi, n_vertices, endpoint=False) + rng.uniform(0, 2 * np.pi)
    )
    radii = radius * (rng.uniform(0.45, 1.0, n_vertices) if not convex else np.ones(n_vertices))
    return [(cx + r * math.cos(p), cy + r * math.sin(p)) for r, p in zip(radii, phis)]


def _draw_scatter(rng, arr):
    h, w = arr.shape
    for _ in range(int(rng.integers(3, 12))):
        cx, cy = rng.uniform(0.1, 0.9) * w, rng.uniform(0.1, 0.9) * h
        size = rng.uniform(0.04, 0.2) * min(w, h)
        kind = rng.integers(0, 4)
        if kind == 0:
            fill_polygon(arr, _random_polygon(rng, cx, cy, size, int(rng.integers(3, 9)), convex=bool(rng.integers(0, 2))), BLACK)
        elif kind == 1:
            ecc = rng.uniform(0, 0.5)
            fill_radial(arr, Radial(cx, cy, size * (1 + ecc), size * (1 - ecc), rng.uniform(0, np.pi),
                                    harmonics=_harmonics(rng, (2, 3, 4), 0.1)), BLACK)
        elif kind == 2:
            # ring with an empty hole
            outer = Radial(cx, cy, size, size * rng.uniform(0.6, 1.0), rng.uniform(0, np.pi))
            fill_radial(arr, outer, BLACK)
            fill_radial(arr, Radial(cx, cy, outer.a * 0.6, outer.b * 0.6, outer.rot), WHITE)
        else:
            x0, y0 = cx - size, cy - size * rng.uniform(0.2, 1.0)
            fill_polygon(arr, [(x0, y0), (cx + size, y0), (cx + size, 2 * cy - y0), (x0, 2 * cy - y0)], BLACK)


def _draw_polygonal_marker(rng, arr, counts):
    """Root/regions/blobs outline built from straight edges, one region left empty."""
    h, w = arr.shape
    cx, cy = w / 2, h / 2
    outer = _random_polygon(rng, cx, cy, 0.44 * min(w, h), int(rng.integers(4, 9)), convex=True)
    fill_polygon(arr, outer, BLACK)
    n = len(counts)
    cols = int(math.ceil(math.sqrt(n)))
    rows = int(math.ceil(n / cols))
    cell = 0.5 * min(w, h) / max(cols, rows)
    empty = int(rng.integers(0, n))
    for i, c in enumerate(counts):
        gx = cx + (i % cols - (cols - 1) / 2) * cell
        gy = cy + (i // cols - (rows - 1) / 2) * cell
        hole = _random_polygon(rng, gx, gy, 0.42 * cell, int(rng.integers(3, 7)), convex=True)
        fill_polygon(arr, hole, WHITE)
        if i == empty:
            continue
        for j in range(c):
            ang = 2 * np.pi * j / max(c, 1)
            bx, by = gx + 0.18 * cell * math.cos(ang) * (c > 1), gy + 0.18 * cell * math.sin(ang) * (c > 1)
            fill_polygon(arr, _random_polygon(rng, bx, by, 0.06 * cell, 4, convex=True), BLACK)


def _break_layout(rng, arr, layout: Layout, how):
    """Redraw a valid layout with one drawing rule violated."""
    fill_radial(arr, layout.root, BLACK)
    victim = int(rng.integers(0, len(layout.regions)))
    for i, (region, blobs) in enumerate(zip(layout.regions, layout.blobs)):
        fill_radial(arr, region, WHITE)
        if how == "empty" and i == victim:
            continue
        for blob in blobs:
            fill_radial(arr, blob, BLACK)
            if how == "touch" and i == victim:
                # bridge every blob of the victim region to the region wall
                ang = math.atan2(blob.cy - region.cy, blob.cx - region.cx)
                edge = region.radius(ang) + 2.0
                fill_segment(arr, (blob.cx, blob.cy),
                             (region.cx + edge * math.cos(ang), region.cy + edge * math.sin(ang)), 1.6, BLACK)
            if how == "deep" and i == victim:
                # a hole in the blob adds a fourth nesting level
                r = max(blob.a, blob.b)
                fill_radial(arr, Radial(blob.cx, blob.cy, r + 1.5, r + 1.5), BLACK)
                fill_radial(arr, Radial(blob.cx, blob.cy, max(r * 0.5, 1.2), max(r * 0.5, 1.2)), WHITE)


def _open_root(arr, layout: Layout):
    """Cut a thin channel from every region to the outside of the root."""
    root = layout.root
    reach = 2 * root.max_radius
    for region in layout.regions:
        ang = math.atan2(region.cy - root.cy, region.cx - root.cx)
        if region.cx == root.cx and region.cy == root.cy:
            ang = 0.0
        start = (region.cx, region.cy)
        end = (region.cx + reach * math.cos(ang), region.cy + reach * math.sin(ang))
        fill_segment(arr, start, end, 1.0, WHITE)


NON_ARTCODE_MODES = ("scatter", "polygonal", "empty", "touch", "deep")


def _is_valid_artcode(arr) -> bool:
    try:
        decode(GrayImage(to_pixels(arr)))
    except (NoForeground, NoValidRoot):
        return False
    return True


def _template_code(rng, spec: GenSpec) -> ArtcodeCode:
    if spec.code is not None:
        return spec.code
    return random_code(rng)


def random_code(rng, n_regions: int = 5, max_blobs: int = 5) -> ArtcodeCode:
    return ArtcodeCode(tuple(int(c) for c in rng.integers(1, max_blobs + 1, size=n_regions)))


def _render_distractor(spec: GenSpec, rng):
    for _ in range(30):
        arr = new_canvas(spec.canvas)
        code = _template_code(rng, spec)
        roots = []
        if spec.style is Style.ARTCODE_LIKE:
            for layout in layout_artcode(rng, spec.canvas, code, spec.copies):
                draw_layout(arr, layout)
                _open_root(arr, layout)
                roots.append(layout.root)
        else:
            mode = spec.distractor or NON_ARTCODE_MODES[int(rng.integers(0, len(NON_ARTCODE_MODES)))]
            if mode == "scatter":
                _draw_scatter(rng, arr)
            elif mode == "polygonal":
                _draw_polygonal_marker(rng, arr, list(code.counts))
            else:
                # every copy is broken, otherwise an intact copy would still decode
                for layout in layout_artcode(rng, spec.canvas, code, spec.copies):
                    _break_layout(rng, arr, layout, mode)
                    roots.append(layout.root)
        if spec.background and roots:
            _draw_background(rng, arr, roots)
        if not _is_valid_artcode(arr):
            return arr
    raise RuntimeError("could not produce a non-decodable distractor")  # pragma: no cover


def render(spec: GenSpec) -> GrayImage:
    """Rasterize ``spec``; identical specs give identical bytes."""
    rng = np.random.default_rng(int(spec.seed))
    if spec.style is Style.ARTCODE:
        arr = new_canvas(spec.canvas)
        layouts = layout_artcode(rng, spec.canvas, spec.code, spec.copies)
        for layout in layouts:
            draw_layout(arr, layout)
        if spec.background:
            _draw_background(rng, arr, [lay.root for lay in layouts])
    else:
        arr = _render_distractor(spec, rng)
    arr = to_pixels(arr)
    if spec.noise_level > 0:
        hit = rng.random(arr.shape) < spec.noise_level
        salt = rng.random(arr.shape) < 0.5
        arr[hit & salt] = WHITE
        arr[hit & ~salt] = BLACK
    return GrayImage(arr)
