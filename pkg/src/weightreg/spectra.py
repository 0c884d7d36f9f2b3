"""Dense symmetric eigendecomposition and the Perron vector.

The eigensolver is a cyclic Jacobi method using the round-robin
(tournament) pair ordering: each of the ``n - 1`` rounds of a sweep
rotates ``n // 2`` disjoint index pairs at once, so a round is a handful of
vectorised row/column updates instead of ``n / 2`` separate rotations.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, is_connected

DEFAULT_EIG_TOL = 1e-9
MAX_SWEEPS = 60


class ConvergenceError(ArithmeticError):
    pass


class NotConnectedError(ValueError):
    def __init__(self, message: str = "Perron vector requires connected graph"):
        super().__init__(message)


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Pair schedule covering every unordered pair exactly once per sweep."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for k in range(m // 2):
            a, b = players[k], players[m - 1 - k]
            if a < n and b < n:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.array(ps, dtype=int), np.array(qs, dtype=int)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _off_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def jacobi_eigh(A: np.ndarray, tol: float = 1e-14, max_sweeps: int = MAX_SWEEPS):
    """Eigenvalues (descending) and orthonormal column eigenvectors of symmetric ``A``.

    Sweeps stop once the off-diagonal Frobenius norm drops below
    ``tol * ||A||_F``. Raises :class:`ConvergenceError` after ``max_sweeps``.
    """
    a = np.array(A, dtype=float, copy=True)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ValueError("matrix must be square")
    if not np.allclose(a, a.T, rtol=0, atol=1e-12 * max(1.0, np.abs(a).max(initial=0))):
        raise ValueError("matrix must be symmetric")
    a = (a + a.T) / 2
    v = np.eye(n)
    if n <= 1:
        return np.diag(a).copy(), v
    scale = np.linalg.norm(a)
    target = tol * scale if scale > 0 else 0.0
    rounds = _round_robin(n)
    for _ in range(max_sweeps):
        off = _off_norm(a)
        if off <= target:
            break
        for p, q in rounds:
            apq = a[p, q]
            active = np.abs(apq) > 1e-300
            if not active.any():
                continue
            p, q, apq = p[active], q[active], apq[active]
            theta = (a[q, q] - a[p, p]) / (2.0 * apq)
            t = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
            t[theta == 0] = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            # A <- R^T A R with R the product of the disjoint plane rotations
            ap, aq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = c * ap - s * aq
            a[:, q] = s * ap + c * aq
            ap, aq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * ap - s[:, None] * aq
            a[q, :] = s[:, None] * ap + c[:, None] * aq
            a[p, q] = a[q, p] = 0.0
            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = c * vp - s * vq
            v[:, q] = s * vp + c * vq
    else:
        off = _off_norm(a)
        if off > target:
            raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps (off={off:.3e})")
    w = np.diag(a).copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


@dataclass(frozen=True)
class SpectralData:
    """Ordered spectrum with distinct eigenvalues and spectral idempotents."""

    eigenvalues: np.ndarray  # lambda_1 >= ... >= lambda_n
    eigenbasis: np.ndarray  # columns, same order as eigenvalues
    distinct: np.ndarray  # theta_0 > ... > theta_d
    multiplicities: tuple[int, ...]
    groups: tuple[tuple[int, ...], ...]  # eigenvalue indices per distinct value
    tol: float

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    @property
    def d(self) -> int:
        return len(self.distinct) - 1

    @property
    def lambda1(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def lambda_n(self) -> float:
        return float(self.eigenvalues[-1])

    def idempotent(self, i: int) -> np.ndarray:
        vecs = self.eigenbasis[:, list(self.groups[i])]
        return vecs @ vecs.T

    @property
    def idempotents(self) -> list[np.ndarray]:
        return [self.idempotent(i) for i in range(len(self.distinct))]

    def multiplicity_of(self, value: float) -> int:
        for theta, mult in zip(self.distinct, self.multiplicities):
            if abs(theta - value) <= self.tol:
                return mult
        return 0

    def apply_function(self, f) -> np.ndarray:
        """``sum_i f(theta_i) E_i``, e.g. a polynomial evaluated spectrally."""
        out = np.zeros((self.n, self.n))
        for i, theta in enumerate(self.distinct):
            out += f(theta) * self.idempotent(i)
        return out


def group_eigenvalues(values: np.ndarray, tol: float) -> list[list[int]]:
    """Indices of a descending array grouped by transitive closeness."""
    groups: list[list[int]] = []
    for k, lam in enumerate(values):
        if groups and values[groups[-1][-1]] - lam <= tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    return groups


def spectral_data_from_matrix(A: np.ndarray, tol: float = DEFAULT_EIG_TOL) -> SpectralData:
    w, v = jacobi_eigh(A)
    if len(w) == 0:
        raise ValueError("empty matrix")
    abs_tol = tol * max(1.0, abs(w[0]))
    groups = group_eigenvalues(w, abs_tol)
    distinct = np.array([w[g].mean() for g in groups])
    return SpectralData(
        eigenvalues=w,
        eigenbasis=v,
        distinct=distinct,
        multiplicities=tuple(len(g) for g in groups),
        groups=tuple(tuple(g) for g in groups),
        tol=abs_tol,
    )


def eigendecompose(g: Graph, tol: float = DEFAULT_EIG_TOL) -> SpectralData:
    """Spectrum of the adjacency matrix.

    Eigenvalues closer than ``tol * max(1, |lambda_1|)`` (chained) count as
    one distinct eigenvalue.
    """
    if g.n < 1:
        raise ValueError("graph has no vertices")
    return spectral_data_from_matrix(g.adjacency_matrix(), tol)


@dataclass(frozen=True)
class PerronVector:
    entries: np.ndarray
    lambda1: float

    @property
    def norm2(self) -> float:
        """Squared Euclidean norm."""
        return float(self.entries @ self.entries)

    def __getitem__(self, u: int) -> float:
        return float(self.entries[u])

    def __len__(self) -> int:
        return len(self.entries)


def _min_normalize(x: np.ndarray) -> np.ndarray:
    x = x if x.sum() > 0 else -x
    if np.any(x <= 0):
        raise ArithmeticError("top eigenvector is not strictly positive")
    return x / x.min()


def perron_vector(g: Graph, s: SpectralData | None = None) -> PerronVector:
    """Positive lambda_1 eigenvector scaled to minimum entry 1."""
    if not is_connected(g):
        raise NotConnectedError()
    if s is None:
        s = eigendecompose(g)
    if s.multiplicities[0] != 1:
        raise ArithmeticError("largest eigenvalue is not simple")
    return PerronVector(_min_normalize(s.eigenbasis[:, 0].copy()), s.lambda1)


def power_iteration_perron(g: Graph, tol: float = 1e-13, max_iter: int = 200_000) -> PerronVector:
    """Independent route to the Perron vector via power iteration on ``A + I``.

    The shift keeps bipartite graphs from oscillating between the two ends
    of the spectrum.
    """
    if not is_connected(g):
        raise NotConnectedError()
    A = g.adjacency_matrix()
    M = A + np.eye(g.n)
    x = np.ones(g.n) / np.sqrt(g.n)
    for _ in range(max_iter):
        y = M @ x
        y /= np.linalg.norm(y)
        if np.abs(y - x).max() < tol:
            x = y
            break
        x = y
    else:
        raise ConvergenceError("power iteration did not converge")
    lam = float(x @ A @ x)
    return PerronVector(_min_normalize(x), lam)


def is_spectrum_symmetric(s: SpectralData, tol: float = 1e-8) -> bool:
    lam = s.eigenvalues
    return bool(np.all(np.abs(lam + lam[::-1]) <= tol * max(1.0, abs(lam[0]))))
