"""Numpy and numba kernels must agree to rounding on the same inputs."""

import os
import subprocess
import sys

import numpy as np
import pytest

from conftest import REF_ALPHA, REF_D1, REF_D2, REF_XA_DWS, ref_scenario
from subguard import backend_name, solve_dws
from subguard._backend import variants
from subguard.config import DEFAULT_TOLS
from subguard.kind import _surface_params

TABLES = variants()
HAS_NUMBA = "numba" in TABLES

needs_numba = pytest.mark.skipif(not HAS_NUMBA, reason="numba not installed")


def test_backend_name_valid():
    assert backend_name() in ("numpy", "numba")


def test_variants_table_shape():
    assert "numpy" in TABLES
    for table in TABLES.values():
        assert set(table) == {"grid_pair_dists", "grid_single_dists",
                              "barrier_heights", "run_linear"}
        assert all(callable(f) for f in table.values())


def _rand_players(rng, n):
    defenders = rng.uniform(-2.0, 2.0, size=(2, n))
    attacker = rng.uniform(-2.0, 2.0, size=n)
    attacker[-1] = rng.uniform(0.5, 2.0)
    return defenders, attacker


@needs_numba
class TestKernelParity:
    def test_grid_pair_dists(self):
        rng = np.random.default_rng(11)
        for n in (2, 3, 5):
            points = rng.uniform(-3.0, 3.0, size=(257, n - 1))
            defenders, attacker = _rand_players(rng, n)
            dd_np, da_np = TABLES["numpy"]["grid_pair_dists"](points, defenders,
                                                              attacker)
            dd_nb, da_nb = TABLES["numba"]["grid_pair_dists"](points, defenders,
                                                              attacker)
            np.testing.assert_allclose(dd_nb, dd_np, rtol=0, atol=1e-12)
            np.testing.assert_allclose(da_nb, da_np, rtol=0, atol=1e-12)

    def test_grid_single_dists(self):
        rng = np.random.default_rng(12)
        for n in (2, 4):
            points = rng.uniform(-3.0, 3.0, size=(199, n - 1))
            defenders, attacker = _rand_players(rng, n)
            out_np = TABLES["numpy"]["grid_single_dists"](points, defenders[0],
                                                          attacker)
            out_nb = TABLES["numba"]["grid_single_dists"](points, defenders[0],
                                                          attacker)
            for a, b in zip(out_np, out_nb):
                np.testing.assert_allclose(b, a, rtol=0, atol=1e-12)

    def test_barrier_heights_two_active(self):
        rng = np.random.default_rng(13)
        for _ in range(10):
            n = int(rng.integers(2, 5))
            d1 = rng.uniform(-2.0, 2.0, size=n)
            d2 = rng.uniform(-2.0, 2.0, size=n)
            alpha = float(rng.uniform(0.3, 0.8))
            params = _surface_params(d1, d2, alpha, DEFAULT_TOLS)
            points = rng.uniform(-4.0, 4.0, size=(301, n - 1))
            h_np, c_np = TABLES["numpy"]["barrier_heights"](points, *params)
            h_nb, c_nb = TABLES["numba"]["barrier_heights"](points, *params)
            np.testing.assert_array_equal(c_nb, c_np)
            np.testing.assert_allclose(h_nb, h_np, rtol=0, atol=1e-12,
                                       equal_nan=True)

    def test_barrier_heights_single(self):
        rng = np.random.default_rng(14)
        d = np.array([0.3, -0.2, 1.1])
        params = _surface_params(d, d + np.array([0.0, 0.0, 0.7]), 0.6,
                                 DEFAULT_TOLS)
        assert params[0] is False or params[0] == 0  # stacked pair, one active
        points = rng.uniform(-3.0, 3.0, size=(100, 2))
        h_np, c_np = TABLES["numpy"]["barrier_heights"](points, *params)
        h_nb, c_nb = TABLES["numba"]["barrier_heights"](points, *params)
        assert set(np.unique(c_np)) == {0}
        np.testing.assert_array_equal(c_nb, c_np)
        np.testing.assert_allclose(h_nb, h_np, rtol=0, atol=1e-12, equal_nan=True)

    def _run_both(self, pos0, speeds, mode, vec, dt, t_max, eps):
        args = (pos0, speeds, mode, vec, dt, t_max, eps, 1e-9)
        return (TABLES["numpy"]["run_linear"](*args),
                TABLES["numba"]["run_linear"](*args))

    def test_run_linear_capture(self):
        s = ref_scenario(REF_XA_DWS)
        sol = solve_dws(s)
        pos0 = np.stack([s.x_d1, s.x_d2, s.x_a])
        speeds = np.array([s.speed_d, s.speed_d, s.speed_a])
        vec = np.stack([sol.otp] * 3)
        out_np, out_nb = self._run_both(pos0, speeds, np.zeros(3, dtype=np.int64),
                                        vec, 1e-3, 10.0, 1e-6)
        assert out_nb[0] == out_np[0] == 1
        assert out_nb[3] == out_np[3]
        assert out_nb[4] == out_np[4]
        assert abs(out_nb[1] - out_np[1]) <= 1e-12
        np.testing.assert_allclose(out_nb[2], out_np[2], rtol=0, atol=1e-12)

    def test_run_linear_arrival_and_timeout(self):
        pos0 = np.array([[9.0, 1.0], [-9.0, 1.0], [0.0, 1.0]])
        speeds = np.array([1.0, 1.0, 0.5])
        mode = np.ones(3, dtype=np.int64)
        vec = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, -1.0]])
        out_np, out_nb = self._run_both(pos0, speeds, mode, vec, 1e-3, 5.0, 1e-6)
        assert out_nb[0] == out_np[0] == 2
        assert abs(out_nb[1] - out_np[1]) <= 1e-12
        assert abs(out_np[1] - 2.0) <= 1e-12
        out_np, out_nb = self._run_both(pos0, speeds, mode, vec, 1e-3, 0.01, 1e-6)
        assert out_nb[0] == out_np[0] == 0
        np.testing.assert_allclose(out_nb[2], out_np[2], rtol=0, atol=1e-12)


class TestEnvSelection:
    def _spawn(self, flag):
        env = dict(os.environ, SUBGUARD_BACKEND=flag)
        code = ("import subguard, subguard.kind as k, numpy as np;"
                "print(subguard.backend_name());"
                f"print(repr(float(k.barrier_height(np.zeros(2), {list(REF_D1)!r},"
                f" {list(REF_D2)!r}, {REF_ALPHA!r}))))")
        out = subprocess.run([sys.executable, "-c", code], capture_output=True,
                             text=True, env=env, check=True)
        name, value = out.stdout.strip().split("\n")
        return name, float(value)

    def test_numpy_forced(self):
        name, value = self._spawn("numpy")
        assert name == "numpy"
        assert value == pytest.approx(np.sqrt(719.0 / 768.0), abs=1e-12)

    @needs_numba
    def test_numba_forced(self):
        name, value = self._spawn("numba")
        assert name == "numba"
        assert value == pytest.approx(np.sqrt(719.0 / 768.0), abs=1e-12)
