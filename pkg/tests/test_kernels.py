import os
import random
import subprocess
import sys

import pytest

from koszulkit import kernels
from koszulkit._accel import HAVE_NUMBA

from oracles import gauss_rank_mod, rows_to_dense, sympy_rank

P = 2147483629


def random_rows(rng, nrows, ncols, density, vmax=5):
    rows = []
    for _ in range(nrows):
        r = {}
        for c in range(ncols):
            if rng.random() < density:
                v = rng.randint(-vmax, vmax)
                if v:
                    r[c] = v
        rows.append(r)
    return rows


def is_rref(piv, rows, p):
    for k, (c, r) in enumerate(zip(piv, rows)):
        if min(r) != c or r[c] != 1:
            return False
        for other in piv:
            if other != c and other in r:
                return False
    return piv == sorted(piv)


@pytest.mark.parametrize("backend", ["python", "numba"])
def test_echelon_is_rref(backend):
    if backend == "numba" and not HAVE_NUMBA:
        pytest.skip("numba unavailable")
    rng = random.Random(1)
    for _ in range(40):
        rows = random_rows(rng, rng.randint(1, 12), rng.randint(1, 15), 0.3)
        piv, red = kernels.echelon(rows, 15, P, backend=backend)
        assert is_rref(piv, red, P)
        assert len(piv) == gauss_rank_mod(rows_to_dense(rows, 15), P)


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba unavailable")
def test_backends_agree():
    rng = random.Random(7)
    for _ in range(100):
        nc = rng.randint(1, 40)
        rows = random_rows(rng, rng.randint(0, 30), nc, rng.choice([0.05, 0.2, 0.6]))
        for full in (True, False):
            a = kernels.echelon(rows, nc, 10007, full=full, backend="numba")
            b = kernels.echelon(rows, nc, 10007, full=full, backend="python")
            assert a == b


def test_exact_python_matches_sympy():
    rng = random.Random(3)
    for _ in range(30):
        nc = rng.randint(1, 8)
        rows = random_rows(rng, rng.randint(0, 8), nc, 0.5)
        assert kernels.rank(rows, nc, None) == sympy_rank(rows, nc)


def test_large_prime_falls_back_to_python():
    rows = [{0: 3, 1: 1}, {0: 6, 1: 2}]
    p = 2**61 - 1
    assert kernels.rank(rows, 2, p) == 1
    with pytest.raises(ValueError):
        kernels.echelon_csr(*kernels.rows_to_csr(rows, p), 2, p)


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.echelon([{0: 1}], 1, 7, backend="gpu")


def test_disable_flag_selects_fallback():
    env = dict(os.environ, KOSZULKIT_DISABLE_NUMBA="1")
    code = "from koszulkit import _accel, kernels; print(_accel.HAVE_NUMBA, kernels.rank([{0: 1}, {0: 2}], 1, 7))"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["False", "1"]


def test_empty_and_zero_rows():
    assert kernels.echelon([], 5, 7) == ([], [])
    assert kernels.rank([{}, {}], 3, 7) == 0
    assert kernels.rank([{2: 7}], 3, 7) == 0
