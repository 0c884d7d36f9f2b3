"""Hoffman's spectral bound, exact colouring, and the Hoffman-colouring audit."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .graph import Graph, VertexPartition, is_bipartite, is_connected
from .partitions import DEFAULT_WR_TOL, quotient_matrices, weight_intersection_numbers, weighted_view
from .spectra import PerronVector, SpectralData, eigendecompose, is_spectrum_symmetric, perron_vector
from .characterizations import interlacing_report, quotient_spectrum

DEFAULT_HOFFMAN_TOL = 1e-6
DEFAULT_CHI_CAP = 64
DEFAULT_ENUM_CAP = 20
DEFAULT_MAX_COLORINGS = 5000


class ResourceLimitError(RuntimeError):
    """Input exceeds a configured search cap."""


class EdgelessGraphError(ValueError):
    pass


def hoffman_bound(s: SpectralData) -> float:
    """``1 - lambda_1 / lambda_n``; needs at least one edge."""
    if s.lambda_n >= -1e-12:
        raise EdgelessGraphError("Hoffman bound needs a graph with at least one edge")
    return 1.0 - s.lambda1 / s.lambda_n


def improved_bound(s: SpectralData) -> float:
    return hoffman_bound(s) + 1.0


# ---------------------------------------------------------------------------
# Exact colouring


@dataclass(frozen=True)
class ColoringResult:
    chi: int
    witness: VertexPartition
    all_optimal: tuple[VertexPartition, ...] | None = None
    enumeration_complete: bool = False


def _masks(g: Graph) -> list[int]:
    return [sum(1 << v for v in g.neighbors(u)) for u in range(g.n)]


def _greedy_clique(nbr: list[int], n: int) -> list[int]:
    best: list[int] = []
    for start in range(n):
        clique, cand = [start], nbr[start]
        while cand:
            v = max(_bits(cand), key=lambda w: bin(nbr[w] & cand).count("1"))
            clique.append(v)
            cand &= nbr[v]
        if len(clique) > len(best):
            best = clique
    return best


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _dsatur_greedy(nbr: list[int], n: int) -> list[int]:
    colors = [-1] * n
    sat = [0] * n  # bitmask of neighbour colours
    deg = [bin(m).count("1") for m in nbr]
    for _ in range(n):
        u = max((v for v in range(n) if colors[v] < 0), key=lambda v: (bin(sat[v]).count("1"), deg[v], -v))
        c = 0
        while sat[u] >> c & 1:
            c += 1
        colors[u] = c
        for v in _bits(nbr[u]):
            sat[v] |= 1 << c
    return colors


def _branch_and_bound(nbr: list[int], n: int, lower: int, ub_colors: list[int]) -> list[int]:
    """DSATUR branch and bound; returns an optimal colouring."""
    best = list(ub_colors)
    best_k = max(best) + 1 if n else 0
    if best_k <= lower:
        return best
    colors = [-1] * n
    deg = [bin(m).count("1") for m in nbr]

    def sat_mask(v: int) -> int:
        m = 0
        for w in _bits(nbr[v]):
            if colors[w] >= 0:
                m |= 1 << colors[w]
        return m

    def search(colored: int, used: int) -> bool:
        nonlocal best, best_k
        if colored == n:
            best, best_k = list(colors), used
            return best_k <= lower
        u, u_sat, u_key = -1, 0, None
        for v in range(n):
            if colors[v] < 0:
                m = sat_mask(v)
                key = (bin(m).count("1"), deg[v], -v)
                if u_key is None or key > u_key:
                    u, u_sat, u_key = v, m, key
        for c in range(used + 1):
            # best_k may shrink inside the recursion, so re-test every colour
            if max(used, c + 1) >= best_k:
                break
            if u_sat >> c & 1:
                continue
            colors[u] = c
            if search(colored + 1, max(used, c + 1)):
                return True
        colors[u] = -1
        return False

    search(0, 0)
    return best


def brute_force_chromatic(g: Graph) -> int:
    """Chromatic number by exhaustive search over independent-set covers.

    ``f[S]`` is the least number of independent sets covering ``S``; the set
    holding the lowest vertex of ``S`` is enumerated over all its subsets.
    Cost ``O(3^n)``; meant as a test oracle for ``n <= 12``.
    """
    n = g.n
    nbr = _masks(g)
    full = (1 << n) - 1
    independent = [True] * (1 << n)
    for S in range(1, 1 << n):
        low = (S & -S).bit_length() - 1
        rest = S & ~(1 << low)
        independent[S] = independent[rest] and not (nbr[low] & rest)
    f = [0] + [n + 1] * full
    for S in range(1, full + 1):
        low = S & -S
        rest = S ^ low
        sub = rest
        while True:
            I = sub | low
            if independent[I]:
                f[S] = min(f[S], f[S ^ I] + 1)
            if sub == 0:
                break
            sub = (sub - 1) & rest
    return f[full]


def enumerate_optimal_colorings(
    g: Graph, chi: int, limit: int = DEFAULT_MAX_COLORINGS
) -> tuple[list[VertexPartition], bool]:
    """All proper ``chi``-colourings up to colour permutation.

    Colours are introduced in vertex order (a new colour is at most one
    more than the largest used so far), which visits each colour-class
    partition exactly once. Returns ``(colourings, complete)``; ``complete``
    is False when ``limit`` cut the enumeration short.
    """
    n = g.n
    nbr = [set(g.neighbors(u)) for u in range(n)]
    colors = [-1] * n
    found: list[VertexPartition] = []

    def rec(u: int, used: int) -> bool:
        if n - u < chi - used:
            return True  # cannot reach chi colours; chi-colourings use all chi
        if u == n:
            found.append(VertexPartition.from_labels(colors))
            return len(found) < limit
        for c in range(min(used + 1, chi)):
            if all(colors[w] != c for w in nbr[u] if w < u):
                colors[u] = c
                if not rec(u + 1, max(used, c + 1)):
                    return False
        colors[u] = -1
        return True

    complete = rec(0, 0)
    return found, complete


def exact_chromatic(
    g: Graph,
    cap: int = DEFAULT_CHI_CAP,
    enumerate_all: bool = False,
    enum_cap: int = DEFAULT_ENUM_CAP,
    max_colorings: int = DEFAULT_MAX_COLORINGS,
) -> ColoringResult:
    """Exact chromatic number with an optimal witness colouring.

    The search is DSATUR branch and bound, seeded with a greedy DSATUR upper
    bound and a greedy clique lower bound. With ``enumerate_all`` every
    optimal colouring is listed as well (only for ``n <= enum_cap``).
    """
    if g.n > cap:
        raise ResourceLimitError(f"n={g.n} exceeds the chromatic search cap {cap}")
    if g.n == 0:
        raise ValueError("graph has no vertices")
    nbr = _masks(g)
    lower = len(_greedy_clique(nbr, g.n))
    colors = _branch_and_bound(nbr, g.n, lower, _dsatur_greedy(nbr, g.n))
    chi = max(colors) + 1
    witness = VertexPartition.from_labels(colors)
    if not enumerate_all:
        return ColoringResult(chi, witness)
    if g.n > enum_cap:
        raise ResourceLimitError(f"n={g.n} exceeds the colouring enumeration cap {enum_cap}")
    found, complete = enumerate_optimal_colorings(g, chi, max_colorings)
    return ColoringResult(chi, witness, tuple(found), complete)


def is_proper_coloring(g: Graph, p: VertexPartition) -> bool:
    lab = p.class_of()
    return all(lab[u] != lab[v] for u, v in g.edges)


# ---------------------------------------------------------------------------
# Audit


@dataclass(frozen=True)
class HoffmanAudit:
    chi: int
    hoffman_bound: float
    improved_bound: float
    is_hoffman_coloring: bool
    color_classes_weight_regular: bool  # for the witness colouring
    per_coloring_weight_regular: tuple[bool, ...] | None
    multiplicity_lambda_n: int
    unique_optimal_coloring: bool | None
    improved_bound_applicable: bool | None  # None when not every optimal colouring was examined
    improved_bound_holds: bool | None  # chi >= improved bound, checked when applicable
    proposition_holds: bool  # Hoffman colouring => weight-regular classes and mult = chi - 1

    @property
    def defects(self) -> list[str]:
        out = []
        if not self.proposition_holds:
            out.append("Hoffman colouring without weight-regular classes or with mult(lambda_n) != chi-1")
        if self.chi < np.ceil(self.hoffman_bound - DEFAULT_HOFFMAN_TOL):
            out.append("chromatic number below the Hoffman bound")
        if self.improved_bound_holds is False:
            out.append("improved bound exceeds chi although no optimal colouring is weight-regular")
        return out


def audit_hoffman(
    g: Graph,
    s: SpectralData,
    nu: PerronVector,
    cr: ColoringResult,
    tol: float = DEFAULT_HOFFMAN_TOL,
    wr_tol: float = DEFAULT_WR_TOL,
) -> HoffmanAudit:
    bound = hoffman_bound(s)
    is_hoff = abs(cr.chi - bound) <= tol
    witness_wr = weight_intersection_numbers(g, nu, cr.witness, wr_tol).is_weight_regular
    mult = s.multiplicity_of(s.lambda_n)
    per = None
    unique = None
    applicable = None
    if cr.all_optimal is not None:
        per = tuple(weight_intersection_numbers(g, nu, p, wr_tol).is_weight_regular for p in cr.all_optimal)
        if any(per):
            applicable = False
        elif cr.enumeration_complete:
            applicable = True
        if cr.enumeration_complete:
            unique = len(cr.all_optimal) == 1
        elif len(cr.all_optimal) > 1:
            unique = False
    elif witness_wr:
        applicable = False
    holds = None if not applicable else cr.chi >= bound + 1.0 - tol
    prop = (not is_hoff) or (witness_wr and mult == cr.chi - 1 and (per is None or all(per)) and unique is not False)
    return HoffmanAudit(
        chi=cr.chi,
        hoffman_bound=bound,
        improved_bound=bound + 1.0,
        is_hoffman_coloring=is_hoff,
        color_classes_weight_regular=witness_wr,
        per_coloring_weight_regular=per,
        multiplicity_lambda_n=mult,
        unique_optimal_coloring=unique,
        improved_bound_applicable=applicable,
        improved_bound_holds=holds,
        proposition_holds=prop,
    )


@dataclass(frozen=True)
class Defect:
    graph: str
    check: str
    detail: str


def verify_proposition3(
    corpus: Iterable[tuple[str, Graph]],
    tol: float = DEFAULT_HOFFMAN_TOL,
    wr_tol: float = DEFAULT_WR_TOL,
    enum_cap: int = DEFAULT_ENUM_CAP,
) -> list[Defect]:
    """Re-derive the Hoffman-colouring consequences on each graph.

    Every graph must be connected and have a Hoffman colouring, otherwise
    ``ValueError`` is raised before any check runs. For each graph the colour
    partition is checked for: weight-regularity, tight interlacing of its
    normalised weight-quotient matrix, lambda_1 in that matrix's spectrum,
    zero diagonal, ``mult(lambda_n) == chi - 1`` and (for ``n <= enum_cap``)
    uniqueness of the optimal colouring.
    """
    prepared = []
    for name, g in corpus:
        if not is_connected(g):
            raise ValueError(f"{name}: graph is not connected")
        s = eigendecompose(g)
        cr = exact_chromatic(g, enumerate_all=g.n <= enum_cap, enum_cap=enum_cap)
        if abs(cr.chi - hoffman_bound(s)) > tol:
            raise ValueError(f"{name}: no Hoffman colouring (chi={cr.chi}, bound={hoffman_bound(s):.6f})")
        prepared.append((name, g, s, cr))

    defects: list[Defect] = []
    for name, g, s, cr in prepared:
        nu = perron_vector(g, s)
        p = cr.witness
        if not weight_intersection_numbers(g, nu, p, wr_tol).is_weight_regular:
            defects.append(Defect(name, "weight-regular", "colour classes are not weight-regular"))
        B_bar = quotient_matrices(weighted_view(p, nu), g.adjacency_matrix()).B_bar
        mu = quotient_spectrum(B_bar)
        rep = interlacing_report(s.eigenvalues, mu)
        if not rep.tight:
            defects.append(Defect(name, "tight-interlacing", f"mu={mu.tolist()}"))
        if np.abs(mu - s.lambda1).min() > 1e-7 * max(1.0, s.lambda1):
            defects.append(Defect(name, "lambda1-in-quotient", f"mu={mu.tolist()}"))
        if np.abs(np.diag(B_bar)).max() > 1e-12 or abs(np.trace(B_bar)) > 1e-9:
            defects.append(Defect(name, "zero-diagonal", f"diag={np.diag(B_bar).tolist()}"))
        mult = s.multiplicity_of(s.lambda_n)
        if mult != cr.chi - 1:
            defects.append(Defect(name, "multiplicity", f"mult(lambda_n)={mult}, chi-1={cr.chi - 1}"))
        if cr.all_optimal is not None and len(cr.all_optimal) != 1:
            defects.append(Defect(name, "unique-colouring", f"{len(cr.all_optimal)} optimal colourings"))
    return defects


def bipartite_spectral_agreement(g: Graph, s: SpectralData | None = None) -> tuple[bool, bool, bool]:
    """(bipartite by BFS, symmetric spectrum, chi <= 2) for a connected graph."""
    s = eigendecompose(g) if s is None else s
    chi = exact_chromatic(g).chi
    return is_bipartite(g) is not None, is_spectrum_symmetric(s), chi <= 2
