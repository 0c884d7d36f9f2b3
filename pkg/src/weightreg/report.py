"""Analysis report assembly and (de)serialisation."""
from __future__ import annotations

import datetime as _dt
import json
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from . import __version__
from .characterizations import (
    DEFAULT_COMMUTE_TOL,
    DEFAULT_POLY_TOL,
    DEFAULT_TIGHT_TOL,
    DomainError,
    characterize,
    weight_hoffman_polynomial,
)
from .chromatic import (
    DEFAULT_CHI_CAP,
    DEFAULT_ENUM_CAP,
    DEFAULT_HOFFMAN_TOL,
    ResourceLimitError,
    audit_hoffman,
    exact_chromatic,
    hoffman_bound,
)
from .graph import Graph, VertexPartition, is_bipartite, is_connected
from .partitions import (
    DEFAULT_WR_TOL,
    is_regular_partition,
    lemma1_check,
    quotient_matrices,
    weight_intersection_numbers,
    weighted_view,
)
from .spectra import DEFAULT_EIG_TOL, NotConnectedError, eigendecompose, perron_vector


@dataclass(frozen=True)
class Options:
    tol_eig: float = DEFAULT_EIG_TOL
    tol_wr: float = DEFAULT_WR_TOL
    tol_hoffman: float = DEFAULT_HOFFMAN_TOL
    tol_commute: float = DEFAULT_COMMUTE_TOL
    tol_poly: float = DEFAULT_POLY_TOL
    tol_tight: float = DEFAULT_TIGHT_TOL
    chi_cap: int = DEFAULT_CHI_CAP
    enum_cap: int = DEFAULT_ENUM_CAP
    enumerate_colorings: bool = False
    force: bool = False
    timestamp: bool = True


@dataclass
class AnalysisReport:
    """Plain-data analysis record; every section is JSON-ready."""

    toolVersion: str
    tolerances: dict[str, float]
    graph: dict[str, Any]
    spectrum: dict[str, Any] | None = None
    perron: dict[str, Any] | None = None
    partition: dict[str, Any] | None = None
    characterizations: dict[str, Any] | None = None
    chromatic: dict[str, Any] | None = None
    generatedAt: str | None = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        d = _plain(asdict(self))
        if d["generatedAt"] is None:
            del d["generatedAt"]
        return d

    def to_json(self, indent: int | None = 2) -> str:
        # float repr is the shortest round-tripping form (up to 17 significant digits)
        return json.dumps(self.to_dict(), indent=indent, allow_nan=False) + "\n"

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> AnalysisReport:
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> AnalysisReport:
        return cls.from_dict(json.loads(text))


def _floats(x) -> Any:
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    return x


def _plain(x) -> Any:
    """Recursively replace numpy scalars and arrays by builtin values."""
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return _floats(x)


def _tolerances(opt: Options) -> dict[str, float]:
    return {
        "eig": opt.tol_eig,
        "weightRegular": opt.tol_wr,
        "hoffman": opt.tol_hoffman,
        "commutation": opt.tol_commute,
        "polynomialIdentity": opt.tol_poly,
        "tightness": opt.tol_tight,
    }


def graph_section(g: Graph) -> dict[str, Any]:
    bip = is_bipartite(g)
    return {
        "n": g.n,
        "edges": g.num_edges,
        "connected": is_connected(g),
        "bipartite": bip is not None,
        "bipartition": None if bip is None else [list(c) for c in bip.classes],
    }


def partition_section(g, s, nu, p: VertexPartition, opt: Options) -> tuple[dict, dict]:
    A = g.adjacency_matrix()
    view = weighted_view(p, nu)
    table = weight_intersection_numbers(g, nu, p, opt.tol_wr)
    B = is_regular_partition(g, p)
    q = quotient_matrices(view, A)
    lem = lemma1_check(g, nu, p, opt.tol_wr)
    part = {
        "classes": [list(c) for c in p.classes],
        "classSizes": p.sizes(),
        "classNorms": _floats(view.class_norms),
        "regular": B is not None,
        "B": None if B is None else B.tolist(),
        "weightRegular": table.is_weight_regular,
        "weightRegularSpread": table.spread,
        "BStar": None if table.B_star is None else table.B_star.tolist(),
        "BTilde": q.B_tilde.tolist(),
        "BBar": q.B_bar.tolist(),
        "lemma1": {
            "regular": lem.regular,
            "weightRegular": lem.weight_regular,
            "nuConstantPerClass": lem.nu_constant_per_class,
            "ratioLawHolds": lem.ratio_law_holds,
            "equivalenceHolds": lem.equivalence_holds,
        },
    }
    verdict = characterize(g, s, nu, p, opt.tol_wr, opt.tol_commute, opt.tol_poly, opt.tol_tight)
    comm, poly, inter = verdict.commutation, verdict.polynomial_identity, verdict.interlacing
    om = verdict.omega
    chars = {
        "definitional": verdict.definitional,
        "commutation": {"commutes": comm.commutes, "residual": comm.residual, "balanceResidual": comm.balance_residual},
        "polynomialIdentity": None if poly is None else {"holds": poly.holds, "residual": poly.residual},
        "interlacing": {
            "quotientEigenvalues": verdict.quotient_eigenvalues.tolist(),
            "interlaces": inter.interlaces,
            "tight": inter.tight,
            "k": inter.k,
            "violation": inter.violation,
        },
        "omega": {
            "member": om.member,
            "nonnegative": om.nonnegative,
            "rowsSumOne": om.rows_sum_one,
            "colsSumOne": om.cols_sum_one,
            "commutesWithA": om.commutes_with_a,
            "residuals": om.residuals,
        },
        "consistent": verdict.consistent,
    }
    return part, chars


def chromatic_section(g, s, nu, opt: Options, strict: bool = False) -> dict[str, Any]:
    """Chromatic audit; with ``strict`` cap violations raise instead of being noted."""
    if g.num_edges == 0:
        if strict:
            hoffman_bound(s)  # raises EdgelessGraphError
        return {"skipped": "graph has no edges"}
    cap = max(opt.chi_cap, g.n) if opt.force else opt.chi_cap
    if g.n > cap:
        if strict:
            raise ResourceLimitError(f"n={g.n} exceeds the chromatic search cap {cap}")
        return {"skipped": f"n={g.n} exceeds chromatic cap {cap} (use --force)"}
    enum = opt.enumerate_colorings
    if enum and g.n > opt.enum_cap:
        if strict:
            raise ResourceLimitError(f"n={g.n} exceeds the colouring enumeration cap {opt.enum_cap}")
        enum = False
    cr = exact_chromatic(g, cap=cap, enumerate_all=enum, enum_cap=opt.enum_cap)
    audit = audit_hoffman(g, s, nu, cr, opt.tol_hoffman, opt.tol_wr)
    return {
        "chi": cr.chi,
        "witness": [list(c) for c in cr.witness.classes],
        "hoffmanBound": audit.hoffman_bound,
        "improvedBound": audit.improved_bound,
        "isHoffmanColoring": audit.is_hoffman_coloring,
        "colorClassesWeightRegular": audit.color_classes_weight_regular,
        "optimalColorings": None if cr.all_optimal is None else len(cr.all_optimal),
        "enumerationComplete": cr.enumeration_complete if cr.all_optimal is not None else None,
        "perColoringWeightRegular": None if audit.per_coloring_weight_regular is None
        else list(audit.per_coloring_weight_regular),
        "multiplicityLambdaN": audit.multiplicity_lambda_n,
        "uniqueOptimalColoring": audit.unique_optimal_coloring,
        "improvedBoundApplicable": audit.improved_bound_applicable,
        "improvedBoundHolds": audit.improved_bound_holds,
        "propositionHolds": audit.proposition_holds,
        "defects": audit.defects,
    }


def build_report(
    g: Graph, p: VertexPartition | None = None, opt: Options = Options(), chromatic: bool = True
) -> AnalysisReport:
    """Run spectra, partitions, characterizations and chromatic audit on one graph.

    Raises ``NotConnectedError`` for disconnected graphs.
    """
    if not is_connected(g):
        raise NotConnectedError()
    if p is not None and p.n != g.n:
        raise ValueError(f"partition covers {p.n} vertices but the graph has {g.n}")
    s = eigendecompose(g, opt.tol_eig)
    nu = perron_vector(g, s)
    A = g.adjacency_matrix()
    rep = AnalysisReport(
        toolVersion=__version__,
        tolerances=_tolerances(opt),
        graph=graph_section(g),
        generatedAt=_dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds") if opt.timestamp else None,
    )
    rep.spectrum = {
        "eigenvalues": s.eigenvalues.tolist(),
        "distinct": [{"value": float(t), "multiplicity": m} for t, m in zip(s.distinct, s.multiplicities)],
    }
    rep.perron = {
        "lambda1": nu.lambda1,
        "nu": nu.entries.tolist(),
        "minEntry": float(nu.entries.min()),
        "eigenResidual": float(np.abs(A @ nu.entries - nu.lambda1 * nu.entries).max()),
    }
    try:
        H = weight_hoffman_polynomial(s, nu)
        rep.perron["weightHoffmanPolynomial"] = {
            "coefficients": H.coefficients.tolist(),
            "alpha": H.scale,
            "degree": H.degree,
        }
    except DomainError as exc:
        rep.notes.append(str(exc))
    if p is not None:
        rep.partition, rep.characterizations = partition_section(g, s, nu, p, opt)
    if chromatic:
        rep.chromatic = chromatic_section(g, s, nu, opt)
    return rep


def render_text(rep: AnalysisReport) -> str:
    """Short human-readable summary."""
    lines = []
    gs = rep.graph
    lines.append(f"graph: n={gs['n']} edges={gs['edges']} connected={gs['connected']} bipartite={gs['bipartite']}")
    if rep.spectrum:
        # rounding noise on zero eigenvalues is hidden here, kept in the JSON
        spec = ", ".join(
            f"{0.0 if abs(d['value']) < 1e-12 else d['value']:.6g}^{d['multiplicity']}" for d in rep.spectrum["distinct"]
        )
        lines.append(f"spectrum: {spec}")
    if rep.perron:
        nu = " ".join(f"{x:.6g}" for x in rep.perron["nu"])
        lines.append(f"lambda1={rep.perron['lambda1']:.10g}  nu=({nu})")
    if rep.partition:
        ps = rep.partition
        lines.append(f"partition: sizes={ps['classSizes']} regular={ps['regular']} weight-regular={ps['weightRegular']}")
        if ps["BStar"] is not None:
            for row in ps["BStar"]:
                lines.append("  B* " + " ".join(f"{x:10.6f}" for x in row))
        lem = ps["lemma1"]
        lines.append(
            "  lemma1: nu class-constant={nuConstantPerClass} ratio law={ratioLawHolds} "
            "equivalence={equivalenceHolds}".format(**lem)
        )
    if rep.characterizations:
        c = rep.characterizations
        poly = c["polynomialIdentity"]
        lines.append(
            f"characterizations: commutes={c['commutation']['commutes']} "
            f"(residual {c['commutation']['residual']:.2e}) "
            f"polynomial={'n/a' if poly is None else poly['holds']} "
            f"tight={c['interlacing']['tight']} k={c['interlacing']['k']} omega={c['omega']['member']}"
        )
    if rep.chromatic:
        ch = rep.chromatic
        if "skipped" in ch:
            lines.append(f"chromatic: skipped ({ch['skipped']})")
        else:
            lines.append(
                f"chromatic: chi={ch['chi']} hoffman={ch['hoffmanBound']:.6f} improved={ch['improvedBound']:.6f} "
                f"hoffman-colouring={ch['isHoffmanColoring']} mult(lambda_n)={ch['multiplicityLambdaN']} "
                f"unique={ch['uniqueOptimalColoring']}"
            )
            for d in ch["defects"]:
                lines.append(f"  defect: {d}")
    for note in rep.notes:
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"
