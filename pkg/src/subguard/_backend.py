"""Numeric kernels with two interchangeable implementations.

The hot paths (oracle grid sweeps, barrier mesh evaluation, simulation
stepping) exist twice: a loop form compiled with numba when available, and a
vectorized / plain-Python numpy form. Selection happens once at import from
the ``SUBGUARD_BACKEND`` environment variable:

* ``auto`` (default): numba if importable, else numpy
* ``numba``: require numba, fail loudly if missing
* ``numpy``: force the fallback even when numba is installed

``variants()`` exposes every available implementation pair so the benchmark
and the agreement tests can compare them directly regardless of the flag.
"""

import math
import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


_FLAG = os.environ.get("SUBGUARD_BACKEND", "auto").strip().lower()
if _FLAG not in ("auto", "numba", "numpy"):
    raise ValueError(f"SUBGUARD_BACKEND must be auto|numba|numpy, got {_FLAG!r}")
if _FLAG == "numba" and not HAS_NUMBA:
    raise ImportError("SUBGUARD_BACKEND=numba but numba is not importable")

USE_NUMBA = HAS_NUMBA and _FLAG != "numpy"


def backend_name() -> str:
    """Name of the implementation actually in use."""
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# distance sweeps over target-hyperplane grids
# ---------------------------------------------------------------------------

def _grid_pair_dists_py(points, defenders, attacker):
    """Per-point (min distance to either defender, distance to attacker).

    ``points`` are lateral coordinates of candidates on the target
    hyperplane (height 0); player positions are full vectors.
    """
    d = points.shape[1]
    lat = defenders[:, :d]
    h2 = defenders[:, d] ** 2
    diffs = points[:, None, :] - lat[None, :, :]
    dd = np.sqrt(np.einsum("mkd,mkd->mk", diffs, diffs) + h2[None, :])
    da = np.sqrt(np.sum((points - attacker[:d]) ** 2, axis=1) + attacker[d] ** 2)
    return dd.min(axis=1), da


def _grid_pair_dists_loops(points, defenders, attacker):
    m, d = points.shape
    out_dd = np.empty(m)
    out_da = np.empty(m)
    for i in range(m):
        best = math.inf
        for k in range(defenders.shape[0]):
            s = defenders[k, d] ** 2
            for j in range(d):
                t = points[i, j] - defenders[k, j]
                s += t * t
            s = math.sqrt(s)
            if s < best:
                best = s
        out_dd[i] = best
        s = attacker[d] ** 2
        for j in range(d):
            t = points[i, j] - attacker[j]
            s += t * t
        out_da[i] = math.sqrt(s)
    return out_dd, out_da


def _grid_single_dists_py(points, defender, attacker):
    """Per-point (distance to one defender, distance to attacker)."""
    d = points.shape[1]
    dd = np.sqrt(np.sum((points - defender[:d]) ** 2, axis=1) + defender[d] ** 2)
    da = np.sqrt(np.sum((points - attacker[:d]) ** 2, axis=1) + attacker[d] ** 2)
    return dd, da


def _grid_single_dists_loops(points, defender, attacker):
    m, d = points.shape
    out_dd = np.empty(m)
    out_da = np.empty(m)
    for i in range(m):
        s = defender[d] ** 2
        for j in range(d):
            t = points[i, j] - defender[j]
            s += t * t
        out_dd[i] = math.sqrt(s)
        s = attacker[d] ** 2
        for j in range(d):
            t = points[i, j] - attacker[j]
            s += t * t
        out_da[i] = math.sqrt(s)
    return out_dd, out_da


# ---------------------------------------------------------------------------
# barrier surface heights over lateral grids
# ---------------------------------------------------------------------------
#
# Piece codes: 0 = Single, 1 = B1, 2 = B2, 3 = B3. Height is NaN where the
# selected quadric has no positive root (surface absent above that point).

def _barrier_heights_py(points, two_active, a12, c1, c2, d1lat, k1, d2lat, k2,
                        gamma, zeta1, zeta2, zeta3, zeta4):
    m = points.shape[0]
    codes = np.empty(m, dtype=np.int64)
    pp = np.sum(points * points, axis=1)
    h2_1 = (pp - 2.0 * points @ d1lat + k1) / gamma
    if not two_active:
        codes[:] = 0
        h2 = h2_1
    else:
        h2_2 = (pp - 2.0 * points @ d2lat + k2) / gamma
        h2_3 = (np.einsum("md,de,me->m", points, zeta2, points)
                + 2.0 * points @ zeta3 + zeta4) / zeta1
        s = points @ a12
        in1 = s > c1
        in2 = -s > c2
        codes = np.where(in1, 1, np.where(in2, 2, 3))
        h2 = np.where(in1, h2_1, np.where(in2, h2_2, h2_3))
    heights = np.where(h2 > 0.0, np.sqrt(np.maximum(h2, 0.0)), np.nan)
    return heights, codes


def _barrier_heights_loops(points, two_active, a12, c1, c2, d1lat, k1, d2lat,
                           k2, gamma, zeta1, zeta2, zeta3, zeta4):
    m, d = points.shape
    heights = np.empty(m)
    codes = np.empty(m, dtype=np.int64)
    for i in range(m):
        pp = 0.0
        for j in range(d):
            pp += points[i, j] * points[i, j]
        if not two_active:
            code = 0
        else:
            s = 0.0
            for j in range(d):
                s += points[i, j] * a12[j]
            if s > c1:
                code = 1
            elif -s > c2:
                code = 2
            else:
                code = 3
        if code == 0 or code == 1:
            acc = pp + k1
            for j in range(d):
                acc -= 2.0 * points[i, j] * d1lat[j]
            h2 = acc / gamma
        elif code == 2:
            acc = pp + k2
            for j in range(d):
                acc -= 2.0 * points[i, j] * d2lat[j]
            h2 = acc / gamma
        else:
            acc = zeta4
            for j in range(d):
                acc += 2.0 * points[i, j] * zeta3[j]
                for l in range(d):
                    acc += points[i, j] * zeta2[j, l] * points[i, l]
            h2 = acc / zeta1
        codes[i] = code
        heights[i] = math.sqrt(h2) if h2 > 0.0 else math.nan
    return heights, codes


# ---------------------------------------------------------------------------
# simulation stepping for piecewise-linear play
# ---------------------------------------------------------------------------
#
# Player order: defender 1, defender 2, attacker. ``mode`` selects the
# heading rule per player: 0 = run to a fixed point (vec is the target,
# heading held once within arrive_tol), 1 = fixed heading (vec is unit).
# Event codes: 0 = timeout, 1 = captured, 2 = arrived. Events are located by
# chord interpolation inside the step; capture wins a within-step tie.

def _run_linear_py(pos0, speeds, mode, vec, dt, t_max, eps_capture, arrive_tol):
    n = pos0.shape[1]
    pos = pos0.copy()
    last_u = np.zeros((3, n))
    eps2 = eps_capture * eps_capture
    nsteps = int(math.ceil(t_max / dt - 1e-12))

    # capture already at the initial state
    for k in range(2):
        c = 0.0
        for j in range(n):
            t = pos[k, j] - pos[2, j]
            c += t * t
        if c <= eps2:
            return 1, 0.0, pos, k, 0

    for step in range(nsteps):
        prev = pos.copy()
        for p in range(3):
            if mode[p] == 0:
                norm = 0.0
                for j in range(n):
                    t = vec[p, j] - pos[p, j]
                    norm += t * t
                norm = math.sqrt(norm)
                if norm > arrive_tol:
                    for j in range(n):
                        last_u[p, j] = (vec[p, j] - pos[p, j]) / norm
            else:
                for j in range(n):
                    last_u[p, j] = vec[p, j]
            for j in range(n):
                pos[p, j] = pos[p, j] + speeds[p] * dt * last_u[p, j]

        # earliest capture over both defenders along the chord
        s_cap = 2.0
        by = -1
        for k in range(2):
            a = 0.0
            b = 0.0
            c = -eps2
            for j in range(n):
                d0 = prev[k, j] - prev[2, j]
                d1 = pos[k, j] - pos[2, j]
                e = d1 - d0
                a += e * e
                b += 2.0 * d0 * e
                c += d0 * d0
            s = 2.0
            if c <= 0.0:
                s = 0.0
            elif a > 0.0:
                disc = b * b - 4.0 * a * c
                if disc >= 0.0:
                    root = (-b - math.sqrt(disc)) / (2.0 * a)
                    if 0.0 <= root <= 1.0:
                        s = root
            if s < s_cap:
                s_cap = s
                by = k

        # arrival: attacker height crossing zero along the chord
        s_arr = 2.0
        a1 = pos[2, n - 1]
        if a1 <= 0.0:
            a0 = prev[2, n - 1]
            s_arr = a0 / (a0 - a1) if a0 > 0.0 else 0.0

        if s_cap <= 1.0 and s_cap <= s_arr:
            epos = prev + s_cap * (pos - prev)
            return 1, (step + s_cap) * dt, epos, by, step + 1
        if s_arr <= 1.0:
            epos = prev + s_arr * (pos - prev)
            return 2, (step + s_arr) * dt, epos, -1, step + 1

    return 0, nsteps * dt, pos, -1, nsteps


if USE_NUMBA:
    _jit = njit(cache=True)
    grid_pair_dists = _jit(_grid_pair_dists_loops)
    grid_single_dists = _jit(_grid_single_dists_loops)
    barrier_heights = _jit(_barrier_heights_loops)
    run_linear = _jit(_run_linear_py)
else:
    grid_pair_dists = _grid_pair_dists_py
    grid_single_dists = _grid_single_dists_py
    barrier_heights = _barrier_heights_py
    run_linear = _run_linear_py


def variants():
    """Implementation pairs for benchmarking and agreement tests.

    Returns a dict mapping backend name to the kernel table. The numba entry
    is present only when numba imports; kernels inside it are jitted lazily
    on first call.
    """
    table = {
        "numpy": {
            "grid_pair_dists": _grid_pair_dists_py,
            "grid_single_dists": _grid_single_dists_py,
            "barrier_heights": _barrier_heights_py,
            "run_linear": _run_linear_py,
        }
    }
    if HAS_NUMBA:
        jit = njit(cache=True)
        table["numba"] = {
            "grid_pair_dists": jit(_grid_pair_dists_loops),
            "grid_single_dists": jit(_grid_single_dists_loops),
            "barrier_heights": jit(_barrier_heights_loops),
            "run_linear": jit(_run_linear_py),
        }
    return table
