import json
import os
import subprocess
import sys

import pytest

from spreadlab import backend

PARITY_SCRIPT = r"""
import json
from spreadlab import backend
from spreadlab import spreads as sp
from spreadlab import spreadsets as ss
from spreadlab import sperner as sn
from spreadlab.fieldreduction import desarguesian_spread
from spreadlab.closure import closure, point_codes
from spreadlab.gf import gf_of_order

out = {"backend": backend.BACKEND_NAME, "using_numba": backend.USING_NUMBA}
D = desarguesian_spread(3, 2, 2)
out["normal_indices"] = sp.normal_indices(D)
out["maxgp"] = sp.max_normal_general_position(D)[0]
res = ss.search_closed_spread_sets(2, 3, "multiplication")
out["search_codes"] = [list(M.code_list) for M in res]
T = sn.build_sperner(D)
out["design_pass"] = sn.validate_design(T)["pass"]
out["plane"] = sorted(int(x) for x in sn.pseudo_plane(T, 0, 1, 4))
f = gf_of_order(9)
out["closure"] = sorted(point_codes(f, closure(f, [(1,0,0),(0,1,0),(0,0,1),(1,1,1)])))
print(json.dumps(out, sort_keys=True))
"""


def run_with_backend(name: str) -> dict:
    env = dict(os.environ, SPREADLAB_BACKEND=name)
    proc = subprocess.run([sys.executable, "-c", PARITY_SCRIPT], env=env,
                          capture_output=True, text=True, timeout=600)
    assert proc.returncode == 0, proc.stderr
    return json.loads(proc.stdout)


def test_backends_compute_identical_results():
    py = run_with_backend("python")
    assert py["backend"] == "python" and py["using_numba"] is False
    nb = run_with_backend("numba")
    assert nb["backend"] == "numba" and nb["using_numba"] is True
    for key in ("normal_indices", "maxgp", "search_codes", "design_pass",
                "plane", "closure"):
        assert py[key] == nb[key], key


def test_bad_backend_value_rejected():
    env = dict(os.environ, SPREADLAB_BACKEND="cython")
    proc = subprocess.run([sys.executable, "-c", "import spreadlab"], env=env,
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode != 0
    assert "SPREADLAB_BACKEND" in proc.stderr


def test_set_threads_validation():
    old = backend.THREADS
    try:
        backend.set_threads(2)
        assert backend.THREADS == 2
        with pytest.raises(ValueError):
            backend.set_threads(0)
        assert backend.THREADS == 2
    finally:
        backend.set_threads(old)


def test_default_backend_in_this_session():
    assert backend.BACKEND_NAME in ("numba", "python")
    assert backend.BACKEND_NAME == ("numba" if backend.USING_NUMBA else "python")
