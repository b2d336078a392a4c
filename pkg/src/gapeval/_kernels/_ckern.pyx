# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scalar kernels: discrete Laplacian and second-nearest-neighbor
distances. Arithmetic expressions mirror the NumPy fallback exactly so the
two backends are bit-comparable."""

from libc.math cimport sqrt, ceil
from libc.stdlib cimport malloc, free

import numpy as np

cimport numpy as cnp

cnp.import_array()


def laplacian_response(double[:, ::1] gray):
    """3x3 cross Laplacian with replicate padding at the borders."""
    cdef Py_ssize_t h = gray.shape[0]
    cdef Py_ssize_t w = gray.shape[1]
    out_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, iu, id_, jl, jr
    cdef double up, down, left, right, c
    for i in range(h):
        iu = i - 1 if i > 0 else 0
        id_ = i + 1 if i < h - 1 else h - 1
        for j in range(w):
            jl = j - 1 if j > 0 else 0
            jr = j + 1 if j < w - 1 else w - 1
            up = gray[iu, j]
            down = gray[id_, j]
            left = gray[i, jl]
            right = gray[i, jr]
            c = gray[i, j]
            out[i, j] = up + down + left + right - 4.0 * c
    return out_arr


def nn2_exhaustive(double[:, ::1] pts):
    """Distance to the second-closest other point, all pairs examined."""
    cdef Py_ssize_t n = pts.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double xi, yi, dx, dy, d2, m1, m2
    cdef double inf = float("inf")
    for i in range(n):
        xi = pts[i, 0]
        yi = pts[i, 1]
        m1 = inf
        m2 = inf
        for j in range(n):
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
        out[i] = sqrt(m2)
    return out_arr


def nn2_grid(double[:, ::1] pts):
    """Same values as :func:`nn2_exhaustive` via a uniform spatial grid.

    Candidate cells are scanned in expanding Chebyshev rings; ring ``r`` is
    reached only while ``(r - 1) * cell`` is below the current second-best
    distance, which guarantees exactness.
    """
    cdef Py_ssize_t n = pts.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j, k
    cdef double minx = pts[0, 0], maxx = pts[0, 0]
    cdef double miny = pts[0, 1], maxy = pts[0, 1]
    for i in range(1, n):
        if pts[i, 0] < minx: minx = pts[i, 0]
        if pts[i, 0] > maxx: maxx = pts[i, 0]
        if pts[i, 1] < miny: miny = pts[i, 1]
        if pts[i, 1] > maxy: maxy = pts[i, 1]
    cdef double w = maxx - minx
    cdef double h = maxy - miny
    if w == 0.0 and h == 0.0:
        for i in range(n):
            out[i] = 0.0
        return out_arr

    cdef double side = w if w > h else h
    cdef Py_ssize_t target = <Py_ssize_t>ceil(sqrt(<double>n))
    if target < 1:
        target = 1
    cdef double cell = side / <double>target
    cdef Py_ssize_t gx = <Py_ssize_t>(w / cell) + 1
    cdef Py_ssize_t gy = <Py_ssize_t>(h / cell) + 1
    cdef Py_ssize_t ncells = gx * gy

    # CSR bucket layout: counts -> offsets -> point order.
    cdef Py_ssize_t *counts = <Py_ssize_t *>malloc(ncells * sizeof(Py_ssize_t))
    cdef Py_ssize_t *offsets = <Py_ssize_t *>malloc((ncells + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *order = <Py_ssize_t *>malloc(n * sizeof(Py_ssize_t))
    cdef Py_ssize_t *cellof = <Py_ssize_t *>malloc(n * sizeof(Py_ssize_t))
    if counts == NULL or offsets == NULL or order == NULL or cellof == NULL:
        free(counts); free(offsets); free(order); free(cellof)
        raise MemoryError()

    cdef Py_ssize_t cx, cy, c
    try:
        for c in range(ncells):
            counts[c] = 0
        for i in range(n):
            cx = <Py_ssize_t>((pts[i, 0] - minx) / cell)
            if cx >= gx: cx = gx - 1
            cy = <Py_ssize_t>((pts[i, 1] - miny) / cell)
            if cy >= gy: cy = gy - 1
            c = cy * gx + cx
            cellof[i] = c
            counts[c] += 1
        offsets[0] = 0
        for c in range(ncells):
            offsets[c + 1] = offsets[c] + counts[c]
            counts[c] = 0
        for i in range(n):
            c = cellof[i]
            order[offsets[c] + counts[c]] = i
            counts[c] += 1

        _scan(pts, out, order, offsets, cellof, gx, gy, cell)
    finally:
        free(counts); free(offsets); free(order); free(cellof)
    return out_arr


cdef void _scan(double[:, ::1] pts, double[::1] out, Py_ssize_t *order,
                Py_ssize_t *offsets, Py_ssize_t *cellof,
                Py_ssize_t gx, Py_ssize_t gy, double cell) noexcept:
    cdef Py_ssize_t n = pts.shape[0]
    cdef Py_ssize_t i, j, k, cx, cy, qx, qy, x0, x1, y0, y1, r, c
    cdef Py_ssize_t rmax = gx if gx > gy else gy
    cdef double xi, yi, dx, dy, d2, m1, m2, bound
    cdef double inf = float("inf")
    cdef bint on_ring
    for i in range(n):
        xi = pts[i, 0]
        yi = pts[i, 1]
        qx = cellof[i] % gx
        qy = cellof[i] // gx
        m1 = inf
        m2 = inf
        r = 0
        while r <= rmax:
            if r > 0:
                bound = (r - 1) * cell
                if m2 < inf and bound * bound >= m2:
                    break
            x0 = qx - r if qx - r > 0 else 0
            x1 = qx + r if qx + r < gx - 1 else gx - 1
            y0 = qy - r if qy - r > 0 else 0
            y1 = qy + r if qy + r < gy - 1 else gy - 1
            for cy in range(y0, y1 + 1):
                for cx in range(x0, x1 + 1):
                    on_ring = (cy == qy - r or cy == qy + r or
                               cx == qx - r or cx == qx + r)
                    if not on_ring:
                        continue
                    c = cy * gx + cx
                    for k in range(offsets[c], offsets[c + 1]):
                        j = order[k]
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
        out[i] = sqrt(m2)
