"""Dense complex linear algebra and the primary matrix functions used by the transforms.

phi(x) = (exp(2 pi i x) - 1) / x   (entire, phi(0) = 2 pi i)
psi(s) = t / s  with exp(2 pi i t) = 1 + s, t in T   (psi(0) = 1 / (2 pi i))

so that x * phi(x) = exp(2 pi i x) - 1 and psi(s) * phi(s * psi(s)) = 1.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np
import scipy.linalg as sla

from .errors import BranchAmbiguity, EigenSolverFailure, ShapeMismatch, SpectrumOutsideS
from .quiver_model import EigenvalueSet, ExponentialImage, TWO_PI_I, eigenvalue_set_S

CLUSTER_RADIUS = 0.05
BRANCH_TOL = 1e-8
NILPOTENT_TOL = 1e-12
RANK_TOL = 1e-9


def _square(X) -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got shape {X.shape}")
    return X


def jordan_block(n: int, lam: complex = 0) -> np.ndarray:
    return lam * np.eye(n, dtype=complex) + np.eye(n, k=1, dtype=complex)


def exp_2pii(X) -> np.ndarray:
    """exp(2 pi i X) by scaling and squaring (Pade kernel)."""
    X = _square(X)
    if X.shape[0] == 0:
        return np.zeros((0, 0), dtype=complex)
    return sla.expm(TWO_PI_I * X)


def is_nilpotent(C, tol: float = NILPOTENT_TOL) -> bool:
    """C^d == 0 up to ``tol * ||C||^d`` where d is the dimension."""
    C = _square(C)
    d = C.shape[0]
    if d == 0:
        return True
    nrm = np.linalg.norm(C, 2)
    if nrm == 0:
        return True
    return np.linalg.norm(np.linalg.matrix_power(C / nrm, d), 2) <= tol


def phi_series_nilpotent(C) -> np.ndarray:
    """sum_{n>=1} (2 pi i)^n / n! C^(n-1), truncated at the dimension (exact for nilpotent C)."""
    C = _square(C)
    d = C.shape[0]
    out = np.zeros_like(C)
    power = np.eye(d, dtype=complex)
    for n in range(1, d + 1):
        out += TWO_PI_I**n / math.factorial(n) * power
        power = power @ C
    return out


def psi_series_nilpotent(C) -> np.ndarray:
    """(1 / 2 pi i) sum_{n>=1} (-1)^(n-1) / n C^(n-1), truncated at the dimension."""
    C = _square(C)
    d = C.shape[0]
    out = np.zeros_like(C)
    power = np.eye(d, dtype=complex)
    for n in range(1, d + 1):
        out += (-1) ** (n - 1) / n * power
        power = power @ C
    return out / TWO_PI_I


def phi_matrix(C) -> np.ndarray:
    C = _square(C)
    d = C.shape[0]
    if d == 0:
        return np.zeros((0, 0), dtype=complex)
    if is_nilpotent(C):
        return phi_series_nilpotent(C)
    # expm([[M, I], [0, 0]]) has (M^-1)(e^M - I) in its upper right block
    big = np.zeros((2 * d, 2 * d), dtype=complex)
    big[:d, :d] = TWO_PI_I * C
    big[:d, d:] = TWO_PI_I * np.eye(d)
    return sla.expm(big)[:d, d:]


def phi_times(A, C) -> np.ndarray:
    """A @ phi(C)."""
    A = np.asarray(A, dtype=complex)
    C = _square(C)
    if A.ndim != 2 or A.shape[1] != C.shape[0]:
        raise ShapeMismatch(f"cannot form A phi(C) for A {A.shape}, C {C.shape}")
    return A @ phi_matrix(C)


# spectra -------------------------------------------------------------------


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: tuple[complex, ...]

    def __len__(self):
        return len(self.eigenvalues)

    @property
    def total(self) -> complex:
        return complex(sum(self.eigenvalues))

    @property
    def product(self) -> complex:
        return complex(np.prod(self.eigenvalues)) if self.eigenvalues else 1 + 0j


@dataclass(frozen=True)
class Cluster:
    """Eigenvalues that sit within the clustering radius of one another."""

    members: tuple[complex, ...]

    @property
    def mean(self) -> complex:
        # the mean of a perturbed multiple eigenvalue is far more accurate than its members
        return complex(np.mean(self.members))

    @property
    def multiplicity(self) -> int:
        return len(self.members)

    @property
    def spread(self) -> float:
        m = self.mean
        return max(abs(z - m) for z in self.members)


def spectrum(X) -> Spectrum:
    X = _square(X)
    try:
        vals = np.linalg.eigvals(X) if X.shape[0] else np.zeros(0, dtype=complex)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverFailure(str(exc)) from exc
    if not np.all(np.isfinite(vals)):
        raise EigenSolverFailure("eigenvalue solver returned non-finite values")
    return Spectrum(tuple(complex(v) for v in vals))


def cluster_values(values: Sequence[complex], radius: float = CLUSTER_RADIUS) -> list[Cluster]:
    """Single-linkage clustering of complex numbers."""
    values = [complex(v) for v in values]
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= radius:
                parent[find(i)] = find(j)
    groups: dict[int, list[complex]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(values[i])
    return [Cluster(tuple(g)) for g in groups.values()]


def spectral_clusters(X, radius: float = CLUSTER_RADIUS) -> list[Cluster]:
    return cluster_values(spectrum(X).eigenvalues, radius)


def spectrum_in(X, contains: Callable[[complex], bool], radius: float = CLUSTER_RADIUS) -> tuple[bool, list[complex]]:
    """Check every eigenvalue cluster of X with ``contains``; return (ok, offending cluster means).

    Clusters failing at the coarse radius are re-split, so that nearby but
    distinct admissible eigenvalues are not averaged into an inadmissible mean.
    """
    bad: list[complex] = []
    stack = [(c, radius) for c in spectral_clusters(X, radius)]
    while stack:
        cl, r = stack.pop()
        if contains(cl.mean):
            continue
        if cl.multiplicity > 1 and r > 1e-7:
            stack.extend((c, r / 10) for c in cluster_values(cl.members, r / 10))
        else:
            bad.append(cl.mean)
    return not bad, bad


# primary matrix functions via clustered Schur blocks -----------------------


def _block_diagonalize(C: np.ndarray, groups: list[list[complex]]):
    """Split C = sum_k U_k B_k V_k along the invariant subspaces of the eigenvalue groups.

    Each group is moved to the top of a reordered Schur form and decoupled
    from the rest with a Sylvester solve, then the remainder is processed.
    """
    n = C.shape[0]
    U = np.eye(n, dtype=complex)
    V = np.eye(n, dtype=complex)
    M = C
    blocks = []
    remaining = [list(g) for g in groups]
    while len(remaining) > 1:
        grp = remaining.pop(0)
        others = [z for g in remaining for z in g]

        def in_group(x, grp=grp, others=others):
            return min(abs(x - z) for z in grp) < min(abs(x - z) for z in others)

        T, Z, sdim = sla.schur(M, output="complex", sort=in_group)
        k = len(grp)
        if sdim != k:
            raise EigenSolverFailure(f"Schur reordering isolated {sdim} eigenvalues, expected {k}")
        T11, T12, T22 = T[:k, :k], T[:k, k:], T[k:, k:]
        Y = sla.solve_sylvester(T11, -T22, -T12)
        m = T.shape[0]
        S = np.eye(m, dtype=complex)
        S[:k, k:] = Y
        Sinv = np.eye(m, dtype=complex)
        Sinv[:k, k:] = -Y
        G = Z @ S
        Ginv = Sinv @ Z.conj().T
        blocks.append((U @ G[:, :k], T11, Ginv[:k, :] @ V))
        U = U @ G[:, k:]
        V = Ginv[k:, :] @ V
        M = T22
    blocks.append((U, M, V))
    return blocks


def _taylor_block(B: np.ndarray, mu: complex, coeff: Callable[[int], complex], max_terms: int = 400) -> np.ndarray:
    d = B.shape[0]
    N = B - mu * np.eye(d)
    F = coeff(0) * np.eye(d, dtype=complex)
    P = np.eye(d, dtype=complex)
    small = 0
    for j in range(1, max_terms):
        P = P @ N
        term = coeff(j) * P
        F = F + term
        if j >= d and np.linalg.norm(term) <= 1e-17 * max(np.linalg.norm(F), 1.0):
            small += 1
            if small >= 2:
                return F
        else:
            small = 0
    raise EigenSolverFailure("Taylor series for a spectral block did not converge")


def branch_log(C, T: EigenvalueSet, tol: float = BRANCH_TOL, radius: float = CLUSTER_RADIUS) -> np.ndarray:
    """The unique X with exp(2 pi i X) = I + C and spectrum of X in T."""
    C = _square(C)
    S = eigenvalue_set_S(T)
    if C.shape[0] == 0:
        return np.zeros((0, 0), dtype=complex)
    groups = _branch_groups(C, S, tol, radius)
    if len(groups) == 1 and abs(groups[0][1]) == 0 and is_nilpotent(C):
        # nilpotent input: log(1 + C) / (2 pi i) as a finite series
        return C @ psi_series_nilpotent(C)
    out = np.zeros_like(C)
    for (U, B, V), (members, t, s) in zip(_block_diagonalize(C, [g[0] for g in groups]), groups):
        mu = complex(np.mean(members))
        base = t + cmath.log((1 + mu) / (1 + s)) / TWO_PI_I

        def coeff(j, base=base, mu=mu):
            if j == 0:
                return base
            return (-1) ** (j - 1) / (j * (1 + mu) ** j) / TWO_PI_I

        out += U @ _taylor_block(B, mu, coeff) @ V
    return out


def _branch_groups(C, S: ExponentialImage, tol: float, radius: float):
    """Group the eigenvalues of C and attach the (t, s) branch data to each group."""
    groups = []
    stack = [(cl, radius) for cl in spectral_clusters(C, radius)]
    while stack:
        cl, r = stack.pop()
        mu = cl.mean
        pre = S.preimages(mu, tol)
        # the local log series converges only within |1 + mu| of mu
        converges = cl.spread < 0.5 * abs(1 + mu)
        if len(pre) == 1 and converges:
            t = pre[0]
            s = mu if S.kind == "strip" else cmath.exp(TWO_PI_I * t) - 1 if t != 0 else 0j
            groups.append((list(cl.members), t, s))
            continue
        if len(pre) > 1:
            raise BranchAmbiguity(f"eigenvalue {mu:.6g} is the image of several members of T: {pre}")
        if cl.multiplicity > 1 and r > 1e-7:
            stack.extend((c, r / 10) for c in cluster_values(cl.members, r / 10))
            continue
        raise SpectrumOutsideS(f"eigenvalue {mu:.6g} is not in S (tolerance {tol:g})")
    return groups


def psi_times(A, C, T: EigenvalueSet, tol: float = BRANCH_TOL, radius: float = CLUSTER_RADIUS) -> np.ndarray:
    """A @ psi(C), the branch-selected inverse of phi_times."""
    A = np.asarray(A, dtype=complex)
    C = _square(C)
    if A.ndim != 2 or A.shape[1] != C.shape[0]:
        raise ShapeMismatch(f"cannot form A psi(C) for A {A.shape}, C {C.shape}")
    if C.shape[0] == 0:
        return A.copy()
    if is_nilpotent(C):
        eigenvalue_set_S(T)  # still rejects resonant T
        return A @ psi_series_nilpotent(C)
    L = branch_log(C, T, tol, radius)
    # psi(C) = phi(L)^-1; phi vanishes only at nonzero integers, which T excludes
    return np.linalg.solve(phi_matrix(L).T, A.T).T


# ranks, Jordan data, Hom spaces ------------------------------------------------


def numerical_rank(M, rel_tol: float = RANK_TOL) -> int:
    M = np.asarray(M, dtype=complex)
    if M.size == 0:
        return 0
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[0] == 0:
        return 0
    return int(np.sum(sv > rel_tol * sv[0]))


def rank_sequence(X, eigenvalue: complex, rel_tol: float = 1e-8, scale: float | None = None) -> list[int]:
    """Ranks of (X - eigenvalue I)^k for k = 1..dim, thresholded against ``scale`` (default ||X||)."""
    X = _square(X)
    d = X.shape[0]
    scale = scale if scale is not None else max(np.linalg.norm(X, 2), 1.0)
    N = X - eigenvalue * np.eye(d)
    out = []
    P = np.eye(d, dtype=complex)
    for k in range(1, d + 1):
        P = P @ N
        sv = np.linalg.svd(P, compute_uv=False)
        out.append(int(np.sum(sv > rel_tol * scale**k)))
    return out


def jordan_sizes_from_ranks(ranks: Sequence[int], dim: int) -> list[int]:
    """Jordan block sizes for one eigenvalue from the ranks of (X - mu)^k, k = 1..dim."""
    r = [dim] + list(ranks) + [ranks[-1] if ranks else dim]
    sizes = []
    for k in range(1, len(r) - 1):
        n_at_least_k = r[k - 1] - r[k]
        n_at_least_k1 = r[k] - r[k + 1]
        sizes += [k] * (n_at_least_k - n_at_least_k1)
    return sorted(sizes, reverse=True)


def power_sums_charpoly(M) -> np.ndarray:
    """Characteristic polynomial coefficients (leading 1) via Newton's identities."""
    M = _square(M)
    n = M.shape[0]
    p = []
    P = np.eye(n, dtype=complex)
    for _ in range(n):
        P = P @ M
        p.append(np.trace(P))
    e = [1.0 + 0j]
    for k in range(1, n + 1):
        e.append(sum((-1) ** (i - 1) * e[k - i] * p[i - 1] for i in range(1, k + 1)) / k)
    return np.array([(-1) ** k * e[k] for k in range(n + 1)])


def _hom_system(arrows, dims_x: Mapping, maps_x: Mapping, dims_y: Mapping, maps_y: Mapping):
    verts = sorted(set(dims_x) | set(dims_y), key=str)
    offsets = {}
    n = 0
    for v in verts:
        offsets[v] = n
        n += dims_y.get(v, 0) * dims_x.get(v, 0)
    rows = []
    for aid, t, h in arrows:
        X = np.asarray(maps_x[aid], dtype=complex).reshape(dims_x[h], dims_x[t])
        Y = np.asarray(maps_y[aid], dtype=complex).reshape(dims_y[h], dims_y[t])
        neq = dims_y[h] * dims_x[t]
        if neq == 0:
            continue
        block = np.zeros((neq, n), dtype=complex)
        # theta_h X - Y theta_t = 0, row-major vec: vec(A Z B) = (A kron B^T) vec(Z)
        sh = slice(offsets[h], offsets[h] + dims_y[h] * dims_x[h])
        st = slice(offsets[t], offsets[t] + dims_y[t] * dims_x[t])
        block[:, sh] += np.kron(np.eye(dims_y[h]), X.T)
        block[:, st] -= np.kron(Y, np.eye(dims_x[t]))
        rows.append(block)
    A = np.vstack(rows) if rows else np.zeros((0, n), dtype=complex)
    return verts, offsets, A, n


def hom_dimension(arrows, dims_x, maps_x, dims_y, maps_y, rel_tol: float = RANK_TOL) -> int:
    """dim of the space of tuples (theta_v) with theta_head X_a = Y_a theta_tail for every arrow.

    ``arrows`` is a sequence of ``(arrow_id, tail_vertex, head_vertex)``; maps
    are indexed by arrow id and have shape (dim head, dim tail).
    """
    _, _, A, n = _hom_system(arrows, dims_x, maps_x, dims_y, maps_y)
    if n == 0:
        return 0
    return n - numerical_rank(A, rel_tol) if A.shape[0] else n


def hom_basis(arrows, dims_x, maps_x, dims_y, maps_y, rel_tol: float = RANK_TOL) -> list[dict]:
    """Orthonormal basis of the intertwiner space, each element a dict vertex -> matrix."""
    verts, offsets, A, n = _hom_system(arrows, dims_x, maps_x, dims_y, maps_y)
    if n == 0:
        return []
    if A.shape[0]:
        _, sv, Vh = np.linalg.svd(A)
        r = int(np.sum(sv > rel_tol * sv[0])) if sv.size and sv[0] > 0 else 0
        null = Vh[r:].conj()
    else:
        null = np.eye(n, dtype=complex)
    basis = []
    for vec in null:
        theta = {}
        for v in verts:
            dy, dx = dims_y.get(v, 0), dims_x.get(v, 0)
            theta[v] = vec[offsets[v] : offsets[v] + dy * dx].reshape(dy, dx)
        basis.append(theta)
    return basis
