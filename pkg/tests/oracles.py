"""
Independent reference computations used by the tests.

Nothing here imports the code under test except plain data types, so a
shared bug cannot make both sides agree.
"""

from __future__ import annotations

import math

import numpy as np


def mc_view_factor(center, size, start, end, diameter, n_rays=1_000_000, seed=0, batch=250_000):
    """Monte Carlo pixel-to-filament view factor by ray casting.

    Rays leave uniformly random points of the square pixel (normal +z)
    in cosine-weighted directions; the estimate is the fraction that
    strikes the side of the finite cylinder around ``start``-``end``.
    Unlike the quadrature kernel this treats the filament as a real
    cylinder of finite radius.

    Returns ``(F, standard_error)``.
    """
    rng = np.random.default_rng(seed)
    c = np.asarray(center, float)
    p0 = np.asarray(start, float)
    axis = np.asarray(end, float) - p0
    length = np.linalg.norm(axis)
    u = axis / length
    radius = diameter / 2
    hits = 0
    done = 0
    while done < n_rays:
        m = min(batch, n_rays - done)
        o = np.column_stack(
            [
                c[0] + (rng.random(m) - 0.5) * size,
                c[1] + (rng.random(m) - 0.5) * size,
                np.full(m, c[2]),
            ]
        )
        # Malley's method: uniform disc point lifted to the hemisphere
        r = np.sqrt(rng.random(m))
        phi = 2 * np.pi * rng.random(m)
        w = np.column_stack([r * np.cos(phi), r * np.sin(phi), np.sqrt(1 - r * r)])

        # |(o + t w - p0) x u|^2 = R^2, quadratic in t
        d = o - p0
        wp = w - np.outer(w @ u, u)
        dp = d - np.outer(d @ u, u)
        a = np.einsum("ij,ij->i", wp, wp)
        b = 2 * np.einsum("ij,ij->i", wp, dp)
        cc = np.einsum("ij,ij->i", dp, dp) - radius**2
        disc = b * b - 4 * a * cc
        ok = (disc >= 0) & (a > 0)
        sq = np.sqrt(np.where(ok, disc, 0.0))
        t = np.where(ok, (-b - sq) / (2 * np.where(a > 0, a, 1.0)), -1.0)
        s = np.einsum("ij,j->i", d + t[:, None] * w, u)
        hits += int(np.count_nonzero(ok & (t > 0) & (s >= 0) & (s <= length)))
        done += m
    f = hits / n_rays
    return f, math.sqrt(max(f * (1 - f), 1e-300) / n_rays)


def diode_code(t_celsius: float) -> int:
    """Default chain by hand: 0.65 V at 25 °C, -2 mV/°C, x5 after 0.2 V, 10 bit over 2.5 V."""
    v = 0.650 - 0.002 * (t_celsius - 25.0)
    v_amp = 5.0 * (v - 0.200)
    return min(max(math.floor(v_amp / 2.5 * 1024), 0), 1023)


def march(capacity, conductance, ground, state, power, dt, n_steps):
    """Plain forward Euler on a dense linear network.

    ``conductance`` is the symmetric node-node conductance matrix of the
    free nodes; ``ground`` is ``(g, t)``, per-node conductances to a
    fixed temperature ``t``.
    """
    g_gnd, t_gnd = ground
    t = np.array(state, float)
    lap = conductance - np.diag(conductance.sum(axis=1))
    for _ in range(n_steps):
        q = lap @ t + g_gnd * (t_gnd - t) + power
        t = t + dt * q / capacity
    return t
