"""Three independent tests of weight-regularity.

* commutation: ``A`` commutes with the projector ``S_bar @ S_bar.T``;
* polynomial identity: the weight-Hoffman polynomial maps ``A`` onto the
  block matrix ``(nu_i * nu_j * J)`` (meaningful only for class-constant nu);
* interlacing: tight interlacing of ``B_bar`` against ``A`` forces
  weight-regularity.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, VertexPartition
from .partitions import (
    DEFAULT_WR_TOL,
    WeightedPartitionView,
    class_nu_values,
    nu_constant_per_class,
    quotient_matrices,
    weight_intersection_numbers,
    weighted_view,
)
from .spectra import PerronVector, SpectralData, jacobi_eigh

log = logging.getLogger(__name__)

DEFAULT_COMMUTE_TOL = 1e-8
DEFAULT_POLY_TOL = 1e-7
DEFAULT_TIGHT_TOL = 1e-7


# ---------------------------------------------------------------------------
# Doubly stochastic / commutation


@dataclass(frozen=True)
class CommutationResult:
    commutes: bool
    residual: float  # ||AM - MA||_max
    tol: float
    balance_residual: float | None = None  # worst ||rho V_i||^2 b*_ij(u) - ||rho V_j||^2 b*_ji(v)


def commutation_test(
    g: Graph, view: WeightedPartitionView, tol: float = DEFAULT_COMMUTE_TOL, pairs: int = 64, seed: int = 0
) -> CommutationResult:
    """Decide weight-regularity by ``A @ M == M @ A`` with ``M = S_bar S_bar^T``.

    When the matrices commute, the balance relation between the two sides
    of every class pair is re-checked on up to ``pairs`` random vertex pairs.
    """
    A = g.adjacency_matrix()
    M = view.projector()
    resid = float(np.abs(A @ M - M @ A).max())
    thr = tol * max(1.0, view.nu.lambda1)
    commutes = resid <= thr
    balance = None
    if commutes:
        rows = (A @ view.S_tilde) / view.nu.entries[:, None]
        lab = view.partition.class_of()
        sq = view.class_norms**2
        rng = np.random.default_rng(seed)
        us = rng.integers(0, g.n, pairs)
        vs = rng.integers(0, g.n, pairs)
        balance = 0.0
        for u, v in zip(us, vs):
            i, j = lab[u], lab[v]
            balance = max(balance, abs(sq[i] * rows[u, j] - sq[j] * rows[v, i]))
    return CommutationResult(commutes, resid, thr, balance)


@dataclass(frozen=True)
class OmegaReport:
    nonnegative: bool
    rows_sum_one: bool
    cols_sum_one: bool
    commutes_with_a: bool
    residuals: dict[str, float] = field(default_factory=dict)

    @property
    def member(self) -> bool:
        return self.nonnegative and self.rows_sum_one and self.cols_sum_one and self.commutes_with_a


def omega_membership(g: Graph, M: np.ndarray, tol: float = 1e-9) -> OmegaReport:
    """Membership of ``M`` in the doubly stochastic matrices commuting with ``A``,
    reported as four separate checks."""
    M = np.asarray(M, dtype=float)
    if M.shape != (g.n, g.n):
        raise ValueError(f"expected a {g.n}x{g.n} matrix, got {M.shape}")
    A = g.adjacency_matrix()
    res = {
        "negativity": float(max(0.0, -M.min())),
        "rowSum": float(np.abs(M.sum(axis=1) - 1).max()),
        "colSum": float(np.abs(M.sum(axis=0) - 1).max()),
        "commutator": float(np.abs(A @ M - M @ A).max()),
    }
    return OmegaReport(
        nonnegative=res["negativity"] <= tol,
        rows_sum_one=res["rowSum"] <= tol,
        cols_sum_one=res["colSum"] <= tol,
        commutes_with_a=res["commutator"] <= tol * max(1.0, float(np.abs(A).sum(axis=1).max(initial=0))),
        residuals=res,
    )


# ---------------------------------------------------------------------------
# Weight-Hoffman polynomial


def leja_order(points) -> list[float]:
    """Greedy Leja ordering; keeps partial products of ``(x - r)`` factors tame."""
    rest = [float(r) for r in points]
    if not rest:
        return []
    first = max(rest, key=abs)
    out = [first]
    rest.remove(first)
    while rest:
        # log-sum: raw products overflow for dense graphs of order ~50
        nxt = max(rest, key=lambda z: sum(np.log(abs(z - o)) if z != o else -np.inf for o in out))
        out.append(nxt)
        rest.remove(nxt)
    return out


@dataclass(frozen=True)
class PolynomialR:
    """Real polynomial ``scale * prod(x - r)``, also kept in monomial form.

    ``coefficients[k]`` multiplies ``x**k``.
    """

    coefficients: np.ndarray
    roots: tuple[float, ...] = ()
    scale: float = 1.0

    @classmethod
    def from_roots(cls, roots, scale: float = 1.0) -> PolynomialR:
        c = np.array([1.0])
        for r in roots:
            c = np.convolve(c, [-r, 1.0])
        return cls(scale * c, tuple(float(r) for r in roots), float(scale))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x: float) -> float:
        """Product form when roots are known; the monomial form cancels badly at high degree."""
        if self.roots or self.degree == 0:
            return self.scale * float(np.prod([x - r for r in self.roots]))
        return self.horner(x)

    def horner(self, x: float) -> float:
        """Horner evaluation in the monomial basis."""
        acc = 0.0
        for c in self.coefficients[::-1]:
            acc = acc * x + c
        return acc

    def horner_matrix(self, A: np.ndarray) -> np.ndarray:
        """Monomial Horner on a matrix; loses accuracy fast beyond degree ~15."""
        n = A.shape[0]
        out = np.zeros((n, n))
        for c in self.coefficients[::-1]:
            out = out @ A
            out[np.diag_indices(n)] += c
        return out

    def evaluate_matrix(self, A: np.ndarray) -> np.ndarray:
        """``p(A)`` as the nested product ``scale * prod(A - r I)`` in Leja order.

        Unlike monomial Horner this stays accurate for degree ~50 graphs.
        """
        n = A.shape[0]
        out = self.scale * np.eye(n)
        for r in leja_order(self.roots):
            shifted = A.copy()
            shifted[np.diag_indices(n)] -= r
            out = out @ shifted
        return out


class DomainError(ValueError):
    pass


def weight_hoffman_polynomial(s: SpectralData, nu: PerronVector) -> PolynomialR:
    """``alpha * prod_{l>=1}(x - theta_l)`` with ``alpha = ||nu||^2 / prod(theta_0 - theta_l)``.

    Vanishes on every eigenvalue except ``theta_0``, where it equals
    ``||nu||^2``, so that ``H(A) = nu nu^T``.
    """
    if s.d < 1:
        raise DomainError("weight-Hoffman polynomial needs at least two distinct eigenvalues")
    theta = s.distinct
    pi0 = float(np.prod(theta[0] - theta[1:]))
    return PolynomialR.from_roots(theta[1:], nu.norm2 / pi0)


def block_target(nu: PerronVector, p: VertexPartition) -> np.ndarray:
    """Block matrix with ``nu_i * nu_j`` on block ``(i, j)`` of the partition."""
    vals = class_nu_values(nu, p)[p.class_of()]
    return np.outer(vals, vals)


@dataclass(frozen=True)
class PolynomialIdentityResult:
    holds: bool
    residual: float
    tol: float


def polynomial_identity_test(
    g: Graph,
    s: SpectralData,
    nu: PerronVector,
    p: VertexPartition,
    tol: float = DEFAULT_POLY_TOL,
    H: PolynomialR | None = None,
) -> PolynomialIdentityResult | None:
    """Compare ``H(A)`` with the class-block matrix ``(nu_i nu_j J)``.

    Returns ``None`` when nu is not constant on every class; the test only
    characterises anything under that hypothesis.
    """
    if not nu_constant_per_class(nu, p):
        return None
    if H is None:
        H = weight_hoffman_polynomial(s, nu)
    HA = H.evaluate_matrix(g.adjacency_matrix())
    target = block_target(nu, p)
    resid = float(np.abs(HA - target).max())
    thr = tol * max(1.0, float(target.max()))
    return PolynomialIdentityResult(resid <= thr, resid, thr)


# ---------------------------------------------------------------------------
# Interlacing


@dataclass(frozen=True)
class InterlacingReport:
    interlaces: bool
    tight: bool
    k: int | None
    violation: float  # worst amount by which an interlacing inequality fails (0 if none)


def interlacing_report(lam, mu, tol: float = DEFAULT_TIGHT_TOL) -> InterlacingReport:
    """Interlacing of ``mu`` (length m) into ``lam`` (length n), both descending.

    Tight means: for some ``k`` in ``0..m`` the first ``k`` of ``mu`` equal
    the top of ``lam`` and the rest equal the bottom ``m - k``.
    """
    lam = np.asarray(lam, dtype=float)
    mu = np.asarray(mu, dtype=float)
    n, m = len(lam), len(mu)
    if m > n:
        raise ValueError(f"cannot interlace {m} values into {n}")
    thr = tol * max(1.0, abs(lam[0]))
    top = lam[:m]
    bottom = lam[n - m :]
    violation = float(max(0.0, (mu - top).max(), (bottom - mu).max()))
    interlaces = violation <= thr
    k_found = None
    if interlaces:
        for k in range(m + 1):
            if np.all(np.abs(mu[:k] - top[:k]) <= thr) and np.all(np.abs(mu[k:] - bottom[k:]) <= thr):
                k_found = k
                break
    return InterlacingReport(interlaces, k_found is not None, k_found, violation)


def quotient_spectrum(B_bar: np.ndarray) -> np.ndarray:
    return jacobi_eigh(B_bar)[0]


def tightness_implies_weight_regular_check(
    g: Graph, s: SpectralData, nu: PerronVector, p: VertexPartition, tol: float = DEFAULT_WR_TOL
) -> bool:
    """False only if interlacing is tight yet the partition is not weight-regular."""
    q = quotient_matrices(weighted_view(p, nu), g.adjacency_matrix())
    rep = interlacing_report(s.eigenvalues, quotient_spectrum(q.B_bar))
    return (not rep.tight) or weight_intersection_numbers(g, nu, p, tol).is_weight_regular


# ---------------------------------------------------------------------------
# Aggregate


@dataclass(frozen=True)
class CharacterizationVerdict:
    definitional: bool
    commutation: CommutationResult
    polynomial_identity: PolynomialIdentityResult | None
    interlacing: InterlacingReport
    quotient_eigenvalues: np.ndarray
    omega: OmegaReport
    spread: float  # definitional residual

    @property
    def consistent(self) -> bool:
        """Definitional and commutation verdicts agree, and tightness implies weight-regularity."""
        return self.definitional == self.commutation.commutes and (self.definitional or not self.interlacing.tight)


def characterize(
    g: Graph,
    s: SpectralData,
    nu: PerronVector,
    p: VertexPartition,
    wr_tol: float = DEFAULT_WR_TOL,
    commute_tol: float = DEFAULT_COMMUTE_TOL,
    poly_tol: float = DEFAULT_POLY_TOL,
    tight_tol: float = DEFAULT_TIGHT_TOL,
) -> CharacterizationVerdict:
    """Run every weight-regularity test on one (graph, partition) pair."""
    view = weighted_view(p, nu)
    table = weight_intersection_numbers(g, nu, p, wr_tol)
    q = quotient_matrices(view, g.adjacency_matrix())
    mu = quotient_spectrum(q.B_bar)
    verdict = CharacterizationVerdict(
        definitional=table.is_weight_regular,
        commutation=commutation_test(g, view, commute_tol),
        polynomial_identity=polynomial_identity_test(g, s, nu, p, poly_tol) if s.d >= 1 else None,
        interlacing=interlacing_report(s.eigenvalues, mu, tight_tol),
        quotient_eigenvalues=mu,
        omega=omega_membership(g, view.projector()),
        spread=table.spread,
    )
    if not verdict.consistent:
        log.warning("characterizations disagree: %s", verdict)
    return verdict
