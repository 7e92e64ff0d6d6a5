import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from urnctrw import _pykernels, kernels
from urnctrw.chains import _bl_tables, _wf_tables

needs_compiled = pytest.mark.skipif(kernels.compiled_backend is None,
                                    reason="compiled extension not built")


def test_backend_names():
    assert _pykernels.BACKEND == "python"
    assert kernels.BACKEND == kernels.active.BACKEND


@needs_compiled
@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 300), seed=st.integers(0, 2**32 - 1), frac=st.floats(0, 1))
def test_bl_walk_backends_agree(n, seed, frac):
    u = np.random.default_rng(seed).random(2000)
    up, stay = _bl_tables(n)
    start = int(frac * n)
    out_py, out_cy = np.empty(2001, np.int64), np.empty(2001, np.int64)
    a = _pykernels.bl_walk(start, u, up, stay, out_py)
    b = kernels.compiled_backend.bl_walk(start, u, up, stay, out_cy)
    assert a == b
    assert np.array_equal(out_py, out_cy)


@needs_compiled
@settings(max_examples=40, deadline=None)
@given(n=st.integers(3, 400), seed=st.integers(0, 2**32 - 1), frac=st.floats(0, 1),
       d=st.sampled_from([1.0, 0.5]))
def test_wf_walk_backends_agree(n, seed, frac, d):
    u = np.random.default_rng(seed).random(1000)
    tabs = _wf_tables(n, 1.0, 2.0, d, 0.0)
    start = int(frac * n)
    out_py, out_cy = np.empty(1001, np.int64), np.empty(1001, np.int64)
    assert _pykernels.wf_walk(start, n, u, *tabs, out_py) == \
        kernels.compiled_backend.wf_walk(start, n, u, *tabs, out_cy)
    assert np.array_equal(out_py, out_cy)


@needs_compiled
def test_binomial_from_mode_agrees_on_edges():
    for n, p in [(1, 0.5), (10, 1e-12), (10, 1 - 1e-12), (500, 0.37)]:
        tabs = _wf_tables(n, 0.0 + 1e-9, 1e-9, 1.0, 0.0)
        m = int(np.floor((n + 1) * p))
        from scipy import stats
        pm = float(stats.binom.pmf(m, n, p))
        for u in (0.0, 1e-300, 0.25, 0.5, 0.999999999):
            assert _pykernels.binomial_from_mode(n, p, m, pm, u) == \
                kernels.compiled_backend.binomial_from_mode(n, p, m, pm, u)
        assert tabs[0].shape == (n + 1,)


def test_env_forces_python_fallback():
    code = "from urnctrw import kernels; print(kernels.BACKEND, kernels.compiled_backend)"
    env = dict(os.environ, URNCTRW_BACKEND="python")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                         text=True, check=True).stdout.split()
    assert out == ["python", "None"]
