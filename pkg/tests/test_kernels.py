import os
import subprocess
import sys

import numpy as np
import pytest

from xcser import kernels


needs_numba = pytest.mark.skipif(not kernels.NUMBA_AVAILABLE,
                                 reason="numba unavailable")


def random_rules(rng, n=200, d=4):
    a = rng.uniform(0, 1, (n, d))
    b = rng.uniform(0, 1, (n, d))
    return np.minimum(a, b), np.maximum(a, b)


@needs_numba
class TestBackendEquivalence:
    def test_match_mask(self):
        rng = np.random.default_rng(0)
        lo, hi = random_rules(rng)
        for _ in range(50):
            s = rng.uniform(0, 1, 4)
            np.testing.assert_array_equal(
                kernels.match_mask_numba(lo, hi, s),
                kernels.match_mask_numpy(lo, hi, s))

    def test_scalar_update(self):
        rng = np.random.default_rng(1)
        n = 40
        rows = np.sort(rng.choice(n, size=12, replace=False)).astype(np.int64)

        def state():
            r = np.random.default_rng(7)
            return dict(pred=r.uniform(0, 1000, n), eps=r.uniform(0, 50, n),
                        fit=r.uniform(0.01, 1, n), asz=r.uniform(1, 30, n),
                        exp=r.integers(0, 100, n),
                        num=r.integers(1, 5, n))

        s1, s2 = state(), state()
        args = (rows, 750.0, 0.2, 0.1, 10.0, 5.0)
        kernels.update_scalar_set_numba(s1["pred"], s1["eps"], s1["fit"],
                                        s1["asz"], s1["exp"], s1["num"], *args)
        kernels.update_scalar_set_numpy(s2["pred"], s2["eps"], s2["fit"],
                                        s2["asz"], s2["exp"], s2["num"], *args)
        for key in s1:
            np.testing.assert_allclose(s1[key], s2[key], atol=1e-12)

    def test_linear_update(self):
        n, d = 20, 3

        def state():
            r = np.random.default_rng(9)
            return dict(W=r.uniform(-1, 1, (n, d + 1)),
                        V=np.tile(np.eye(d + 1) * 10.0, (n, 1, 1)),
                        eps=r.uniform(0, 5, n), fit=r.uniform(0.01, 1, n),
                        asz=r.uniform(1, 10, n), exp=r.integers(0, 50, n),
                        num=r.integers(1, 4, n))

        rows = np.arange(8, dtype=np.int64)
        x = np.concatenate(([1.0], np.random.default_rng(10).uniform(0, 1, d)))
        s1, s2 = state(), state()
        args = (rows, x, 3.5, 0.1, 0.1, 1.0, 5.0, 1.0, 10.0)
        bad1 = kernels.update_linear_set_numba(
            s1["W"], s1["V"], s1["eps"], s1["fit"], s1["asz"], s1["exp"],
            s1["num"], *args)
        bad2 = kernels.update_linear_set_numpy(
            s2["W"], s2["V"], s2["eps"], s2["fit"], s2["asz"], s2["exp"],
            s2["num"], *args)
        assert bad1 == bad2 == 0
        for key in s1:
            np.testing.assert_allclose(s1[key], s2[key], atol=1e-10)


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, XCSER_NUMBA="0")
    out = subprocess.run(
        [sys.executable, "-c",
         "from xcser import kernels; print(kernels.BACKEND)"],
        capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "numpy"


def test_default_backend_reported():
    assert kernels.BACKEND in ("numba", "numpy")
    assert callable(kernels.match_mask)
