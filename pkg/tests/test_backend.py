import json
import os
import subprocess
import sys

import numpy as np
import pytest

from discdist import _accel
from discdist.algebra import exponent_array

SCRIPT = """
import json
from discdist import _accel
from discdist.distance import distance_bombieri, SearchConfig
from discdist.families import revolution_poly
from discdist.algebra import normalized
rep = distance_bombieri(normalized(revolution_poly(4)), SearchConfig(restarts=16))
print(json.dumps({"backend": _accel.backend_name(), "dist": rep.dist}))
"""


def run_with(backend):
    env = {**os.environ, "DISCDIST_BACKEND": backend}
    out = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def test_numpy_backend_selected_by_env():
    doc = run_with("numpy")
    assert doc["backend"] == "numpy"
    assert doc["dist"] == pytest.approx((3 / 47) ** 0.5, abs=1e-12)


@pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")
def test_backends_agree():
    a, b = run_with("numpy"), run_with("numba")
    assert b["backend"] == "numba"
    assert a["dist"] == pytest.approx(b["dist"], abs=1e-14)


def test_kernels_agree(rng):
    E = exponent_array(3, 5)
    X = rng.standard_normal((50, 3))
    np.testing.assert_allclose(_accel.monomial_values(E, X), _accel.monomial_values_numpy(E, X), rtol=1e-13)
