"""Level-set slices and orbit scatters as SVG or binary PPM.

Contours come from marching squares on the canvas pixel grid with the
centre-value rule for saddle cells.  Zeros that marching squares cannot see
(isolated points and tangential touching, e.g. kappa = -2 at the origin) are
emitted as markers.  Output bytes depend only on the inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .charspace import float_kappa

PLANES = {"xy": (0, 1, 2), "yz": (1, 2, 0), "zx": (2, 0, 1)}

BACKGROUND = (255, 255, 255)
AXIS_COLOR = (160, 160, 160)
CONTOUR_COLOR = (20, 60, 160)
REGION_COLOR = (200, 60, 30)
POINT_COLOR = (0, 0, 0)


@dataclass(frozen=True)
class Canvas:
    width: int = 400
    height: int = 400
    window: tuple = (-4.0, 4.0, -4.0, 4.0)  # u0, u1, v0, v1 in plane coordinates

    def __post_init__(self):
        if self.width < 16 or self.height < 16:
            raise ValueError("canvas must be at least 16x16 pixels")
        u0, u1, v0, v1 = (float(v) for v in self.window)
        if not (u0 < u1 and v0 < v1):
            raise ValueError(f"degenerate window {self.window}")
        object.__setattr__(self, "window", (u0, u1, v0, v1))

    def to_pixel(self, u, v):
        u0, u1, v0, v1 = self.window
        return (u - u0) / (u1 - u0) * self.width, (v1 - v) / (v1 - v0) * self.height

    def grid(self):
        u0, u1, v0, v1 = self.window
        us = np.linspace(u0, u1, self.width + 1)
        vs = np.linspace(v1, v0, self.height + 1)
        return np.meshgrid(us, vs)


@dataclass
class Image:
    format: str
    data: bytes
    segments: list = field(default_factory=list)
    markers: list = field(default_factory=list)
    points: np.ndarray | None = None
    dropped: int = 0

    def save(self, path):
        with open(path, "wb") as fh:
            fh.write(self.data)


# ---------------------------------------------------------------- marching squares

# edges: 0 bottom (c0-c1), 1 right (c1-c2), 2 top (c2-c3), 3 left (c3-c0);
# corners c0=(i,j) lower-left, c1 lower-right, c2 upper-right, c3 upper-left
_CASES = {
    1: [(3, 0)], 2: [(0, 1)], 3: [(3, 1)], 4: [(1, 2)], 6: [(0, 2)], 7: [(3, 2)],
    8: [(2, 3)], 9: [(0, 2)], 11: [(1, 2)], 12: [(1, 3)], 13: [(0, 1)], 14: [(3, 0)],
}


def _edge_point(edge, u, v, f):
    a, b = ((0, 1), (1, 2), (2, 3), (3, 0))[edge]
    fa, fb = f[a], f[b]
    s = fa / (fa - fb)
    return (u[a] + s * (u[b] - u[a]), v[a] + s * (v[b] - v[a]))


def marching_squares(U, V, F):
    """Line segments of the zero set of F sampled on the grid (U, V).

    Rows of the arrays run top to bottom (decreasing v).  A node is inside when
    F > 0.
    """
    inside = F > 0
    bl = inside[1:, :-1].astype(int)
    br = inside[1:, 1:].astype(int)
    tr = inside[:-1, 1:].astype(int)
    tl = inside[:-1, :-1].astype(int)
    code = bl | (br << 1) | (tr << 2) | (tl << 3)
    segments = []
    for i, j in zip(*np.nonzero((code != 0) & (code != 15))):
        rows = (i + 1, i + 1, i, i)
        cols = (j, j + 1, j + 1, j)
        u = [U[r, c] for r, c in zip(rows, cols)]
        v = [V[r, c] for r, c in zip(rows, cols)]
        f = [F[r, c] for r, c in zip(rows, cols)]
        k = int(code[i, j])
        if k in (5, 10):
            # the centre decides which diagonal pair of corners is joined
            centre_in = sum(f) / 4 > 0
            cut_c1_c3, cut_c0_c2 = [(0, 1), (2, 3)], [(3, 0), (1, 2)]
            pairs = cut_c1_c3 if (k == 5) == centre_in else cut_c0_c2
        else:
            pairs = _CASES[k]
        for e0, e1 in pairs:
            a, b = _edge_point(e0, u, v, f), _edge_point(e1, u, v, f)
            if a != b:  # an isolated zero on a node gives zero-length cuts
                segments.append((a, b))
    return segments


def touching_zeros(U, V, F, rel_tol=1e-9, scale=None):
    """Grid nodes where F vanishes without changing sign among the 4 neighbours."""
    scale = np.ones_like(F) if scale is None else scale
    zero = np.abs(F) <= rel_tol * (1 + scale)
    out = []
    h, w = F.shape
    for i, j in zip(*np.nonzero(zero)):
        nb = [F[a, b] for a, b in ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)) if 0 <= a < h and 0 <= b < w]
        if all(x >= 0 for x in nb) or all(x <= 0 for x in nb):
            out.append((float(U[i, j]), float(V[i, j])))
    return out


def _slice_grid(plane, slice_value, canvas):
    if plane not in PLANES:
        raise ValueError(f"plane must be one of {sorted(PLANES)}")
    U, V = canvas.grid()
    iu, iv, iw = PLANES[plane]
    coords = [None, None, None]
    coords[iu], coords[iv], coords[iw] = U, V, np.full_like(U, float(slice_value))
    return U, V, coords


def level_contour(t, plane, slice_value, canvas):
    """Segments and touching-zero markers of kappa = t on the slice."""
    U, V, (x, y, z) = _slice_grid(plane, slice_value, canvas)
    F = float_kappa(x, y, z) - float(t)
    scale = x * x + y * y + z * z + np.abs(x * y * z) + abs(float(t))
    return marching_squares(U, V, F), touching_zeros(U, V, F, scale=scale)


def region_boundary(t, canvas):
    """Boundary of the image of the (x, y) projection: (x^2-4)(y^2-4) + 4(t-2) = 0."""
    U, V = canvas.grid()
    F = (U * U - 4) * (V * V - 4) + 4 * (float(t) - 2)
    scale = (U * U + 4) * (V * V + 4) + 4 * abs(float(t) - 2)
    return marching_squares(U, V, F), touching_zeros(U, V, F, scale=scale)


# ---------------------------------------------------------------- writers


def _f(v):
    return f"{v:.3f}"


def _rgb(c):
    return f"rgb({c[0]},{c[1]},{c[2]})"


def _svg_frame(canvas, plane):
    w, h = canvas.width, canvas.height
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="{_rgb(BACKGROUND)}"/>',
    ]
    u0, u1, v0, v1 = canvas.window
    if u0 <= 0 <= u1:
        px, _ = canvas.to_pixel(0.0, 0.0)
        out.append(f'<path d="M{_f(px)} 0L{_f(px)} {h}" stroke="{_rgb(AXIS_COLOR)}" stroke-width="0.5" fill="none"/>')
    if v0 <= 0 <= v1:
        _, py = canvas.to_pixel(0.0, 0.0)
        out.append(f'<path d="M0 {_f(py)}L{w} {_f(py)}" stroke="{_rgb(AXIS_COLOR)}" stroke-width="0.5" fill="none"/>')
    names = {"xy": ("x", "y"), "yz": ("y", "z"), "zx": ("z", "x")}[plane]
    out.append(f'<text x="{w - 12}" y="{h - 4}" font-size="10" fill="{_rgb(AXIS_COLOR)}">{names[0]}</text>')
    out.append(f'<text x="4" y="12" font-size="10" fill="{_rgb(AXIS_COLOR)}">{names[1]}</text>')
    return out


def _svg_segments(canvas, segments, color):
    if not segments:
        return []
    parts = []
    for (a, b), (c, d) in segments:
        p0, p1 = canvas.to_pixel(a, b), canvas.to_pixel(c, d)
        parts.append(f"M{_f(p0[0])} {_f(p0[1])}L{_f(p1[0])} {_f(p1[1])}")
    return [f'<path d="{"".join(parts)}" stroke="{_rgb(color)}" stroke-width="1" fill="none"/>']


def _svg_markers(canvas, markers, color):
    out = []
    for u, v in markers:
        px, py = canvas.to_pixel(u, v)
        out.append(f'<circle cx="{_f(px)}" cy="{_f(py)}" r="1.5" fill="{_rgb(color)}"/>')
    return out


def _ppm(pixels: np.ndarray) -> bytes:
    h, w, _ = pixels.shape
    return f"P6\n{w} {h}\n255\n".encode("ascii") + pixels.astype(np.uint8).tobytes()


def _blank(canvas):
    img = np.empty((canvas.height, canvas.width, 3), dtype=np.uint8)
    img[:] = BACKGROUND
    px, py = canvas.to_pixel(0.0, 0.0)
    if 0 <= px < canvas.width:
        img[:, int(px)] = AXIS_COLOR
    if 0 <= py < canvas.height:
        img[int(py), :] = AXIS_COLOR
    return img


def _plot(img, px, py, color):
    i, j = int(np.floor(py)), int(np.floor(px))
    if 0 <= i < img.shape[0] and 0 <= j < img.shape[1]:
        img[i, j] = color


def _draw_segments(img, canvas, segments, color):
    for (a, b), (c, d) in segments:
        x0, y0 = canvas.to_pixel(a, b)
        x1, y1 = canvas.to_pixel(c, d)
        steps = int(max(abs(x1 - x0), abs(y1 - y0))) + 1
        for s in np.linspace(0.0, 1.0, steps + 1):
            _plot(img, x0 + s * (x1 - x0), y0 + s * (y1 - y0), color)


def render_level_contour(t, plane, slice_value, canvas: Canvas, fmt="svg", region=False) -> Image:
    """Contour of kappa = t on the slice {third coordinate = slice_value}.

    With ``region`` (xy plane only) the boundary of the projection image is
    overlaid.
    """
    segments, markers = level_contour(t, plane, slice_value, canvas)
    extra, extra_markers = ([], [])
    if region:
        if plane != "xy":
            raise ValueError("the projection region lives in the xy plane")
        extra, extra_markers = region_boundary(t, canvas)
    if fmt == "svg":
        body = _svg_frame(canvas, plane)
        body += _svg_segments(canvas, segments, CONTOUR_COLOR) + _svg_markers(canvas, markers, CONTOUR_COLOR)
        body += _svg_segments(canvas, extra, REGION_COLOR) + _svg_markers(canvas, extra_markers, REGION_COLOR)
        data = ("\n".join(body + ["</svg>"]) + "\n").encode("utf-8")
    elif fmt == "ppm":
        img = _blank(canvas)
        _draw_segments(img, canvas, segments, CONTOUR_COLOR)
        _draw_segments(img, canvas, extra, REGION_COLOR)
        for u, v in markers + extra_markers:
            _plot(img, *canvas.to_pixel(u, v), CONTOUR_COLOR)
        data = _ppm(img)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return Image(fmt, data, segments + extra, markers + extra_markers)


def _points_and_weights(samples):
    if hasattr(samples, "points") and hasattr(samples, "weights"):
        return np.asarray(samples.points, dtype=float), np.asarray(samples.weights, dtype=float)
    if isinstance(samples, tuple) and len(samples) == 2 and np.ndim(samples[1]) == 1:
        return np.asarray(samples[0], dtype=float).reshape(-1, 3), np.asarray(samples[1], dtype=float)
    pts = [tuple(float(v) for v in p) for p in samples]
    pts = np.asarray(pts, dtype=float).reshape(-1, 3)
    return pts, np.ones(len(pts))


def render_orbit_scatter(samples, plane, canvas: Canvas, fmt="svg", t=None, tol=1e-6) -> Image:
    """Weighted scatter projected to ``plane``, binned on the pixel grid.

    Points off the level set (|kappa - t| > tol, when ``t`` is given) are dropped
    and counted in ``Image.dropped``.
    """
    if plane not in PLANES:
        raise ValueError(f"plane must be one of {sorted(PLANES)}")
    pts, w = _points_and_weights(samples)
    dropped = 0
    if t is not None and len(pts):
        ok = np.abs(float_kappa(*pts.T) - float(t)) <= tol
        dropped = int((~ok).sum())
        pts, w = pts[ok], w[ok]
    iu, iv, _ = PLANES[plane]
    px, py = canvas.to_pixel(pts[:, iu], pts[:, iv]) if len(pts) else (np.empty(0), np.empty(0))
    i, j = np.floor(py).astype(int), np.floor(px).astype(int)
    on = (i >= 0) & (i < canvas.height) & (j >= 0) & (j < canvas.width)
    density = np.zeros((canvas.height, canvas.width))
    np.add.at(density, (i[on], j[on]), w[on])
    peak = density.max() if density.size and density.max() > 0 else 1.0
    level = density / peak
    if fmt == "svg":
        body = _svg_frame(canvas, plane)
        for a, b in zip(*np.nonzero(density)):
            body.append(f'<rect x="{b}" y="{a}" width="1" height="1" fill="{_rgb(POINT_COLOR)}" fill-opacity="{level[a, b]:.3f}"/>')
        data = ("\n".join(body + ["</svg>"]) + "\n").encode("utf-8")
    elif fmt == "ppm":
        img = _blank(canvas).astype(float)
        shade = level[..., None]
        img = img * (1 - shade) + np.array(POINT_COLOR, dtype=float) * shade
        data = _ppm(np.rint(img))
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return Image(fmt, data, points=pts, dropped=dropped)
