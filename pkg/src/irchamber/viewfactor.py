"""
Radiative view factors between card pixels and heater filaments.

Each filament is a thin diffuse cylinder of diameter ``d`` around a line
segment. Seen from a surface element at distance ``r`` it presents a
projected width ``d * sin(phi)``, where ``phi`` is the angle between the
line of sight and the filament axis. The exchange integral

    A_p F_pf = int_pixel int_axis cos(theta_p) d sin(phi) / (pi r^2) dl dA

is evaluated with tensor-product Gauss-Legendre quadrature. The
filament-to-pixel factor follows from the same integral divided by the
filament surface ``pi d L``, so reciprocity holds by construction.
"""

from __future__ import annotations

import numpy as np

__all__ = ["exchange_area", "view_factor_matrix", "filament_view_factors"]

_PIXEL_ORDER = 6
_LINE_ORDER = 8


def _gauss(n: int, a: float, b: float):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w


def exchange_area(
    center,
    size: float,
    start,
    end,
    diameter: float,
    pixel_order: int = _PIXEL_ORDER,
    line_order: int = _LINE_ORDER,
) -> float:
    """Return ``A_p * F_pf`` for one square pixel and one filament.

    The pixel is centred at ``center`` in a plane of constant z with its
    normal along +z; only the half space above it is seen.
    """
    center = np.asarray(center, dtype=float)
    p0 = np.asarray(start, dtype=float)
    p1 = np.asarray(end, dtype=float)
    axis = p1 - p0
    length = float(np.linalg.norm(axis))
    u = axis / length
    # closest approach of the axis to the pixel centre sets the kernel width
    t = np.clip(np.dot(center - p0, u), 0.0, length)
    height = max(float(np.linalg.norm(p0 + t * u - center)), 1e-9)

    # filament panels no longer than half the stand-off keep the kernel smooth
    panels = max(1, int(np.ceil(length / (0.5 * height))))
    edges = np.linspace(0.0, length, panels + 1)
    s_nodes, s_w = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        s, w = _gauss(line_order, a, b)
        s_nodes.append(s)
        s_w.append(w)
    s = np.concatenate(s_nodes)
    ws = np.concatenate(s_w)

    # pixel sub-panels sized the same way
    sub = max(1, int(np.ceil(size / (0.5 * height))))
    pedges = np.linspace(-size / 2, size / 2, sub + 1)
    q_nodes, q_w = [], []
    for a, b in zip(pedges[:-1], pedges[1:]):
        q, w = _gauss(pixel_order, a, b)
        q_nodes.append(q)
        q_w.append(w)
    q = np.concatenate(q_nodes)
    wq = np.concatenate(q_w)

    qx, qy = np.meshgrid(q, q, indexing="ij")
    wxy = np.outer(wq, wq).ravel()
    pts = np.column_stack([qx.ravel() + center[0], qy.ravel() + center[1], np.full(qx.size, center[2])])

    line = p0[None, :] + s[:, None] * u[None, :]
    v = line[None, :, :] - pts[:, None, :]
    r2 = np.einsum("ijk,ijk->ij", v, v)
    r = np.sqrt(r2)
    cos_p = np.clip(v[..., 2] / r, 0.0, None)
    cross = np.cross(v, u)
    sin_phi = np.sqrt(np.einsum("ijk,ijk->ij", cross, cross)) / r
    kernel = cos_p * diameter * sin_phi / (np.pi * r2)
    return float(wxy @ kernel @ ws)


def view_factor_matrix(chamber) -> np.ndarray:
    """Pixel-to-filament view factors, shape (n_pixels, n_filaments).

    ``chamber`` is a :class:`irchamber.physics.ChamberGeometry`.
    """
    card = chamber.card
    centers = card.pixel_centers()
    segs = chamber.filament_segments
    out = np.empty((card.n_pixels, len(segs)))
    for i, c in enumerate(centers):
        for j, (a, b) in enumerate(segs):
            out[i, j] = exchange_area(c, card.pixel_size, a, b, chamber.filament_diameter)
    return out / card.pixel_area


def filament_view_factors(chamber, pixel_factors: np.ndarray | None = None) -> np.ndarray:
    """Filament-to-pixel view factors, shape (n_filaments, n_pixels)."""
    if pixel_factors is None:
        pixel_factors = view_factor_matrix(chamber)
    areas = np.array([chamber.filament_area(j) for j in range(len(chamber.filament_segments))])
    return (pixel_factors * chamber.card.pixel_area).T / areas[:, None]
