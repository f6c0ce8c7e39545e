"""Compiled inner loop for the planar rotation search."""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _point_polygon(px, py, X, Y, solid):
    q = X.shape[0]
    best = np.inf
    inside = solid
    for e in range(q):
        ax, ay = X[e], Y[e]
        f = e + 1 if e + 1 < q else 0
        ex, ey = X[f] - ax, Y[f] - ay
        dx, dy = px - ax, py - ay
        ee = ex * ex + ey * ey
        if ee <= 0.0:
            ee = 1.0
        t = (dx * ex + dy * ey) / ee
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
        rx, ry = dx - t * ex, dy - t * ey
        d2 = rx * rx + ry * ry
        if d2 < best:
            best = d2
        if ex * dy - ey * dx < 0.0:
            inside = False
    if inside:
        return 0.0
    return np.sqrt(best)


@njit(cache=True)
def rotation_costs(Lc, L_solid, options, K_solid, theta, orient):
    """d_H(Lc[b], R(theta[b, a]) options[orient[b, a]]) for every (b, a)."""
    B, A = theta.shape
    m = Lc.shape[1]
    q = options.shape[1]
    out = np.empty((B, A))
    KX = np.empty(q)
    KY = np.empty(q)
    for b in range(B):
        LX = Lc[b, :, 0].copy()
        LY = Lc[b, :, 1].copy()
        for a in range(A):
            c, s = np.cos(theta[b, a]), np.sin(theta[b, a])
            K = options[orient[b, a]]
            for j in range(q):
                KX[j] = c * K[j, 0] - s * K[j, 1]
                KY[j] = s * K[j, 0] + c * K[j, 1]
            worst = 0.0
            for i in range(m):
                d = _point_polygon(LX[i], LY[i], KX, KY, K_solid)
                if d > worst:
                    worst = d
            for j in range(q):
                d = _point_polygon(KX[j], KY[j], LX, LY, L_solid)
                if d > worst:
                    worst = d
            out[b, a] = worst
    return out
