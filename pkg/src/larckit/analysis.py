"""End-to-end controllability analysis of one system description."""
from __future__ import annotations

from dataclasses import dataclass

from . import __version__
from .graph import build_graph, is_connected
from .io import SystemConfig
from .lie import larc_check, thm2_certificate, thm2_hypotheses
from .linop import PROPAGATOR_ORDER
from .spectral import check_rational_independence

CONTROLLABLE = "CONTROLLABLE-BY-THM2"
UNMET = "HYPOTHESES-UNMET"
EXIT_OK, EXIT_NUMERIC, EXIT_PARSE, EXIT_UNMET = 0, 1, 2, 3


@dataclass
class AnalysisResult:
    report: dict
    verdict: str

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.verdict == CONTROLLABLE else EXIT_UNMET


def spectrum_section(cfg: SystemConfig, verdict) -> dict:
    spec = cfg.system.drift
    return {
        "dim": spec.dim,
        "eigenvalues": [float(x) for x in spec.eigenvalues],
        "multiplicities": list(spec.multiplicities),
        "exact": None if spec.exact is None else [None if e is None else str(e) for e in spec.exact],
        "degenerate": spec.is_degenerate,
        "gap_tol": spec.gap_tol,
        "independence": verdict.to_json(),
    }


def analyze(cfg: SystemConfig, with_certificate: bool = True) -> AnalysisResult:
    """Spectral checks, coupling graph, LARC history and, when the
    hypotheses hold, the bracket-word certificate."""
    tol = cfg.tolerances
    system = cfg.system
    verdict = check_rational_independence(system.drift, tol.coeff_bound, tol.independence)
    graph = build_graph(system, tol.edge)
    connected, comps = is_connected(graph)
    hyp = thm2_hypotheses(system, graph, verdict)
    truncs = cfg.truncations or [system.dim]
    larc = larc_check(system, truncs, tol.rank, tol.max_passes)

    thm2: dict = {"hypotheses": hyp["checks"]}
    if hyp["all"]:
        out_verdict = CONTROLLABLE
        thm2["conclusion"] = ("hypotheses verified; the theorem certifies strong operator "
                              "controllability of the untruncated system")
        if with_certificate:
            cert = thm2_certificate(system, graph, verdict, tol.certificate)
            thm2["certificate"] = {"tolerance": tol.certificate,
                                   "max_error": max(e.error for e in cert),
                                   "entries": [e.to_json() for e in cert]}
    else:
        out_verdict = UNMET
        failed = [k for k, ok in hyp["checks"].items() if not ok]
        thm2["conclusion"] = "not certified: " + ", ".join(failed)
        if system.drift.is_degenerate:
            thm2["note"] = "degenerate drift: graph and closure are a necessary-structure check only"
    thm2["verdict"] = out_verdict

    report = {
        "tool": "larckit",
        "version": __version__,
        "seed": cfg.seed,
        "propagator_order": PROPAGATOR_ORDER,
        "tolerances": tol.as_dict(),
        "spectrum": spectrum_section(cfg, verdict),
        "graph": dict(graph.to_json(), connected=connected, components=comps),
        "larc": dict(larc.to_json(), rank_tol=tol.rank,
                     note="numerical closure at the listed truncations only"),
        "thm2": thm2,
        "verdict": out_verdict,
    }
    return AnalysisResult(report, out_verdict)
