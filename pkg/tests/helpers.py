"""Shared independent oracles for the test suite.

Everything here is deliberately naive: central differences, literal
pseudocode transcriptions, lazy-but-exhaustive grid argmins.  Nothing imports
optimizer internals, so these stay valid as checks on the fast paths.
"""

from __future__ import annotations

import numpy as np

SAMPLE_LIBSVM_SHAPE = (8, 6)  # declared (n, d) of tests/data/sample.libsvm


def central_diff(f, x, h=1e-6):
    """Central-difference gradient of a scalar function of a vector."""
    x = np.asarray(x, dtype=np.float64)
    grad = np.zeros_like(x)
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = h
        grad[j] = (f(x + e) - f(x - e)) / (2.0 * h)
    return grad


def rel_err(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return float(np.linalg.norm(a - b) / (1.0 + np.linalg.norm(b)))


def reference_vr_epoch(problem, x_t, y_t, eta1, eta2, perm):
    """Straight-line transcription of one variance-reduced shuffling epoch.

    Literal loops, no caching, no guards; returns the full inner iterate
    sequence [(x_t^0, y_t^0), ..., (x_t^n, y_t^n)].
    """
    n = problem.n
    h0 = sum(problem.grad_x_i(i, x_t, y_t) for i in range(n)) / n
    d0 = sum(problem.grad_y_i(i, x_t, y_t) for i in range(n)) / n
    x = np.array(x_t, dtype=np.float64)
    y = np.array(y_t, dtype=np.float64)
    path = [(x.copy(), y.copy())]
    for j in range(n):
        k = int(perm[j])
        h = h0 + problem.grad_x_i(k, x, y) - problem.grad_x_i(k, x_t, y_t)
        d = d0 + problem.grad_y_i(k, x, y) - problem.grad_y_i(k, x_t, y_t)
        x = x - (eta1 / n) * h
        y = y + (eta2 / n) * d
        path.append((x.copy(), y.copy()))
    return path


def simplex_grid_argmin(v, resolution=1e-4, coarse=None):
    """Brute-force nearest simplex point on a grid of the given resolution.

    For n = 2 the grid is enumerated outright.  For larger n the enumeration
    is hierarchical: a coarse pass over the whole simplex, then refinement
    boxes of half-width 3 * step * sqrt(n) around the running argmin.  The
    refinement box always contains the true projection: rounding the
    projection onto the grid inside its own support changes the squared
    distance by at most step^2 * n, and the support-aligned gradient term
    vanishes, so the grid argmin stays within step * sqrt(n) of the truth.
    """
    v = np.asarray(v, dtype=np.float64)
    n = v.size
    if coarse is None:
        coarse = resolution if n <= 2 else 0.02
    step = coarse
    lo = np.zeros(n)
    hi = np.ones(n)
    best = None
    while True:
        pts = _enumerate_box(n, lo, hi, step)
        d2 = ((pts - v) ** 2).sum(axis=1)
        best = pts[int(np.argmin(d2))]
        if step <= resolution:
            return best
        radius = 3.0 * step * np.sqrt(n)
        lo = np.maximum(best - radius, 0.0)
        hi = np.minimum(best + radius, 1.0)
        step = max(step / 5.0, resolution)


def _enumerate_box(n, lo, hi, step):
    """Grid points of the simplex with coordinates in [lo, hi], spacing step."""
    axes = []
    for k in range(n - 1):
        start = int(np.ceil(lo[k] / step - 1e-12))
        stop = int(np.floor(hi[k] / step + 1e-12))
        axes.append(np.arange(start, stop + 1) * step)
    grids = np.meshgrid(*axes, indexing="ij") if axes else []
    flat = np.stack([g.ravel() for g in grids], axis=1) if axes else np.zeros((1, 0))
    last = 1.0 - flat.sum(axis=1)
    keep = (last >= lo[-1] - 1e-12) & (last <= hi[-1] + 1e-12) & (last >= -1e-12)
    pts = np.concatenate([flat[keep], last[keep, None]], axis=1)
    if pts.size == 0:  # box missed the simplex slice; widen to the full face
        return _enumerate_box(n, np.zeros(n), np.ones(n), step)
    return np.clip(pts, 0.0, None)


def simplex_project_bisection(v, tol=1e-14):
    """Independent projection oracle: solve sum(max(v - tau, 0)) = 1 for tau
    by bisection on the monotone piecewise-linear threshold equation."""
    v = np.asarray(v, dtype=np.float64)
    lo = float(v.min()) - 1.0
    hi = float(v.max())
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.maximum(v - mid, 0.0).sum() > 1.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    tau = 0.5 * (lo + hi)
    y = np.maximum(v - tau, 0.0)
    total = y.sum()
    return y / total if total > 0 else y


def kkt_residual_simplex(v, y):
    """KKT check for y = argmin ||y - v||^2 on the simplex: on the support
    v_i - y_i is one constant tau; off the support v_i <= tau; y feasible."""
    v = np.asarray(v, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    res = abs(float(y.sum()) - 1.0)
    res = max(res, float(-(y.min())) if y.min() < 0 else 0.0)
    support = y > 0
    if support.any():
        taus = v[support] - y[support]
        tau = float(np.mean(taus))
        res = max(res, float(np.abs(taus - tau).max()))
        if (~support).any():
            res = max(res, float((v[~support] - tau).max()), 0.0)
    return res
