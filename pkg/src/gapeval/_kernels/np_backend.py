"""Pure-NumPy kernels, used when the compiled extension is unavailable.

Expressions are kept literally identical to the compiled versions
(`dx*dx + dy*dy`, `up + down + left + right - 4*c`) so results agree
bit for bit across backends.
"""

from __future__ import annotations

import math

import numpy as np


def laplacian_response(gray: np.ndarray) -> np.ndarray:
    p = np.pad(gray, 1, mode="edge")
    up = p[:-2, 1:-1]
    down = p[2:, 1:-1]
    left = p[1:-1, :-2]
    right = p[1:-1, 2:]
    c = p[1:-1, 1:-1]
    return up + down + left + right - 4.0 * c


def nn2_exhaustive(pts: np.ndarray) -> np.ndarray:
    n = pts.shape[0]
    dx = pts[:, 0][:, None] - pts[:, 0][None, :]
    dy = pts[:, 1][:, None] - pts[:, 1][None, :]
    d2 = dx * dx + dy * dy
    np.fill_diagonal(d2, np.inf)
    second = np.partition(d2, 1, axis=1)[:, 1]
    return np.sqrt(second)


def nn2_grid(pts: np.ndarray) -> np.ndarray:
    n = pts.shape[0]
    minx, miny = pts[:, 0].min(), pts[:, 1].min()
    w = float(pts[:, 0].max() - minx)
    h = float(pts[:, 1].max() - miny)
    if w == 0.0 and h == 0.0:
        return np.zeros(n)

    side = max(w, h)
    target = max(1, math.ceil(math.sqrt(n)))
    cell = side / target
    gx = int(w / cell) + 1
    gy = int(h / cell) + 1

    cx = np.minimum(((pts[:, 0] - minx) / cell).astype(np.intp), gx - 1)
    cy = np.minimum(((pts[:, 1] - miny) / cell).astype(np.intp), gy - 1)
    cellof = cy * gx + cx
    buckets: dict[int, list[int]] = {}
    for i, c in enumerate(cellof):
        buckets.setdefault(int(c), []).append(i)

    out = np.empty(n)
    rmax = max(gx, gy)
    for i in range(n):
        xi, yi = pts[i, 0], pts[i, 1]
        qx, qy = int(cx[i]), int(cy[i])
        m1 = m2 = math.inf
        r = 0
        while r <= rmax:
            if r > 0:
                bound = (r - 1) * cell
                if m2 < math.inf and bound * bound >= m2:
                    break
            x0, x1 = max(qx - r, 0), min(qx + r, gx - 1)
            y0, y1 = max(qy - r, 0), min(qy + r, gy - 1)
            for by in range(y0, y1 + 1):
                for bx in range(x0, x1 + 1):
                    if not (by in (qy - r, qy + r) or bx in (qx - r, qx + r)):
                        continue
                    for j in buckets.get(by * gx + bx, ()):
                        if j == i:
                            continue
                        dx = xi - pts[j, 0]
                        dy = yi - pts[j, 1]
                        d2 = dx * dx + dy * dy
                        if d2 < m1:
                            m2 = m1
                            m1 = d2
                        elif d2 < m2:
                            m2 = d2
            r += 1
        out[i] = math.sqrt(m2)
    return out
