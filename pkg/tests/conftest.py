import numpy as np
import pytest

from decorated_conformal.delaunay import conformal_path, flip_algorithm
from decorated_conformal.errors import GeometryError
from decorated_conformal.instances import random_sphere, random_torus


def delaunay_instance(kind: str, seed: int, **kw):
    """Random hyperideal decorated torus or sphere, flipped to weighted Delaunay."""
    rng = np.random.default_rng(seed)
    if kind == "torus":
        tri, m = random_torus(rng, **kw)
    else:
        tri, m = random_sphere(rng, kw.pop("n", 6), **kw)
    res = flip_algorithm(tri, m)
    return res.triangulation, res.metric


def plant(tri, m, u_star):
    """Conformally equivalent metric reached by scaling along Delaunay cells."""
    res = conformal_path(tri, m, u_star)
    return res.triangulation, res.metric


def random_planted(seed: int, kind="torus", amp=0.3, **kw):
    """(tri, metric, original targets, planted u) for round-trip tests."""
    from decorated_conformal.metric import cone_angles

    rng = np.random.default_rng(10_000 + seed)
    tri, m = delaunay_instance(kind, seed, **kw)
    for _ in range(20):
        u = rng.uniform(-amp, amp, tri.n_vertices)
        u -= u.mean()
        try:
            t1, m1 = plant(tri, m, u)
        except GeometryError:
            amp *= 0.5
            continue
        return t1, m1, cone_angles(tri, m).cone, u
    raise RuntimeError("could not plant scale factors")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance results, filled by test_acceptance.py and printed after the run
ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        status, line = ACCEPTANCE[k]
        terminalreporter.write_line(f"{status} {k:2d}  {line}")
