import sys

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def crandn(rng, *shape, scale=1.0):
    return scale * (rng.normal(size=shape) + 1j * rng.normal(size=shape)) / np.sqrt(2)


def unit_disk(rng, *shape):
    """Complex entries uniform in the unit disk."""
    r = np.sqrt(rng.uniform(size=shape))
    return r * np.exp(2j * np.pi * rng.uniform(size=shape))


def random_nilpotent(rng, n, scale=1.0):
    """Conjugate of a random strictly upper triangular matrix."""
    U = np.triu(crandn(rng, n, n, scale=scale), 1)
    P = crandn(rng, n, n) + 2 * np.eye(n)
    return P @ U @ np.linalg.inv(P)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def strip_spectrum_matrix(rng, n):
    """Random n x n matrix whose eigenvalues sit well inside the half-open strip 0 <= Re z < 1."""
    D = np.diag(rng.uniform(0.1, 0.9, n) + 1j * rng.uniform(-0.3, 0.3, n))
    P = crandn(rng, n, n) + 2 * np.eye(n)
    return P @ D @ np.linalg.inv(P)


def random_arrow_pair(rng, d_tail, d_head, kind="strip"):
    """(E, nabla) with E: tail -> head and the smaller product having its spectrum in T.

    kind "strip": eigenvalues inside the strip; kind "nilpotent": nilpotent products.
    """
    E = crandn(rng, d_head, d_tail)
    small = min(d_tail, d_head)
    C = strip_spectrum_matrix(rng, small) if kind == "strip" else random_nilpotent(rng, small, scale=0.5)
    if d_tail <= d_head:
        N = C @ np.linalg.pinv(E)  # nabla E = C
    else:
        N = np.linalg.pinv(E) @ C  # E nabla = C
    return E, N


def random_additive_solution(rng, gamma, dims, lam=None, kind="strip"):
    """Exact solution of the residue relations on a P^1-type non-interfering quiver."""
    from quivermonodromy.additive import ConnectionSystemRep

    lam = lam or {}
    maps, res = {}, {}
    for a in gamma.arrows:
        i, j = gamma.component_of(a.tail), gamma.component_of(a.head)
        E, N = random_arrow_pair(rng, dims[i], dims[j], kind)
        maps[a.id] = (E, N)
        res[a.tail] = lam.get(a.tail, 0) * np.eye(dims[i]) + N @ E
        res[a.head] = lam.get(a.head, 0) * np.eye(dims[j]) - E @ N
    for p in gamma.unused_points:
        d = dims[gamma.component_of(p)]
        res[p] = lam.get(p, 0) * np.eye(d)
    return ConnectionSystemRep(dict(dims), res, maps)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
