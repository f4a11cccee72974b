"""The obstruction scalar, the sixteen-term expansion ledger, and the point
report tying every quantity together.

The headline chain, all at a single point with J^2 = -I and coordinates
normal for the working metric:

    double trace of the symmetrised (4,0) tensor
        = N^r_ik N^s_ri J^k_s                     (the contraction scalar)
        = sixteen-term expansion total            (the ledger)
        = -d_j(J^i_l J^k_l) d_i J^j_k             (the obstruction scalar)

The first and last links hold only up to claimed cancellations among the
ledger terms; those are *recorded* as residuals here, never assumed.  The
middle link (ledger total = contraction) is algebraically forced for any
valid structure and is the report's consistency gate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry, nijenhuis
from .geometry import ChartSpec, JetMatrix

__all__ = [
    "TERM_NAMES",
    "CANCELLATION_PAIRS",
    "VERDICT_CONSISTENT",
    "VERDICT_LEDGER_ANOMALY",
    "VERDICT_INVALID_ACS",
    "TermLedger",
    "ObstructionReport",
    "obstruction_scalar",
    "term_ledger",
    "report_from_jets",
    "identity_report",
]

TERM_NAMES = (
    "I1", "I2", "I3", "I4",
    "II1", "II2", "II3", "II4", "II5",
    "III1", "III2", "III3",
    "IV1", "IV2", "IV3", "IV4",
)

# Pairs whose sums are claimed to cancel, plus the claimed equality
# III1 = III3 and the claimed vanishing of the quadratic remainder term.
CANCELLATION_PAIRS = (
    ("II3+IV3", "II3", "IV3"),
    ("II2+III2", "II2", "III2"),
    ("II5+IV2", "II5", "IV2"),
    ("II1+II4", "II1", "II4"),
    ("I2+I3", "I2", "I3"),
    ("I4+III1", "I4", "III1"),
)

VERDICT_CONSISTENT = "consistent"
VERDICT_LEDGER_ANOMALY = "ledger-anomaly"
VERDICT_INVALID_ACS = "invalid-acs"


def obstruction_scalar(jm: JetMatrix) -> float:
    """-d_j(J^i_l J^k_l) d_i J^j_k, all repeated indices summed.

    Meaningful in coordinates normal for the working metric at the point;
    with the Euclidean metric any chart qualifies.  Vanishes identically
    wherever J is pointwise antisymmetric (then J^i_l J^k_l = delta^ik).
    """
    j, d = jm.values, jm.partials
    # grad_jjt[j, i, k] = d_j sum_l J[i, l] J[k, l]
    grad_jjt = np.einsum("jil,kl->jik", d, j) + np.einsum("il,jkl->jik", j, d)
    # + 0.0 canonicalises IEEE negative zero for the reports
    return float(-np.einsum("jik,ijk->", grad_jjt, d)) + 0.0


@dataclass(frozen=True)
class TermLedger:
    """Named scalars of the expanded product N^r_ik N^s_ri J^k_s.

    The expansion writes the contraction as a product of two four-term
    factors and distributes; the sixteen products are grouped into four
    lines (I..IV) and numbered within each line.  ``total`` is their sum.
    ``first_quadratic`` is the separate remainder term
    -J_t^k J_p^i J_p^j d_i J^l_k d_j J^t_l whose vanishing the reduction to
    the obstruction scalar depends on.
    """

    terms: dict[str, float]
    first_quadratic: float
    total: float

    def cancellation_residuals(self) -> dict[str, float]:
        out: dict[str, float] = {}
        for label, a, b in CANCELLATION_PAIRS:
            out[label] = abs(self.terms[a] + self.terms[b])
        out["III1-III3"] = abs(self.terms["III1"] - self.terms["III3"])
        out["first_quadratic"] = abs(self.first_quadratic)
        return out


def term_ledger(jm: JetMatrix) -> TermLedger:
    """Evaluate the sixteen expansion terms verbatim from their index patterns.

    Same coordinate requirements as :func:`obstruction_scalar`.  Notation in
    the per-term comments: J_a f = J^m_a d_m f is the derivative of f along
    J(e_a); array labels follow geometry's row/column layout, so the symbol
    J^b_a (equivalently J_a^b) is the array element J[b, a] and d_a J^b_c is
    D[a, b, c].
    """
    j, d = jm.values, jm.partials
    # jd[a, r, k] = J_a J^r_k = sum_m J[m, a] d_m J[r, k]
    jd = np.einsum("ma,mrk->ark", j, d)
    es = np.einsum
    terms = {
        # line I: products of two J-directional derivatives
        "I1": -es("ks,irk,isr->", j, jd, jd),   # -J_s^k (J_i J^r_k)(J_i J^s_r)
        "I2": +es("ks,irk,rsi->", j, jd, jd),   # +J_s^k (J_i J^r_k)(J_r J^s_i)
        "I3": +es("pi,srp,isr->", j, jd, jd),   # +J_i^p (J_s J^r_p)(J_i J^s_r)
        "I4": -es("pi,srp,rsi->", j, jd, jd),   # -J_i^p (J_s J^r_p)(J_r J^s_i)
        # line II: one J-directional derivative and one bare partial
        "II1": -es("qr,ks,irk,isq->", j, j, jd, d),  # -J_r^q J_s^k (J_i J^r_k) d_i J^s_q
        "II2": +es("qi,ks,irk,rsq->", j, j, jd, d),  # +J_i^q J_s^k (J_i J^r_k) d_r J^s_q
        "II3": -es("rsi,irs->", jd, d),              # -(J_r J^s_i) d_i J^r_s
        "II4": +es("isr,irs->", jd, d),              # +(J_i J^s_r) d_i J^r_s
        "II5": +es("qr,pi,srp,isq->", j, j, jd, d),  # +J_r^q J_i^p (J_s J^r_p) d_i J^s_q
        # line III
        "III1": -es("qi,pi,srp,rsq->", j, j, jd, d),  # -J_i^q J_i^p (J_s J^r_p) d_r J^s_q
        "III2": -es("isr,sri->", jd, d),              # -(J_i J^s_r) d_s J^r_i
        "III3": +es("rsi,sri->", jd, d),              # +(J_r J^s_i) d_s J^r_i
        # line IV: products of two bare partials
        "IV1": +es("qr,isq,irs->", j, d, d),  # +J_r^q (d_i J^s_q)(d_i J^r_s)
        "IV2": -es("qi,rsq,irs->", j, d, d),  # -J_i^q (d_r J^s_q)(d_i J^r_s)
        "IV3": -es("qr,isq,sri->", j, d, d),  # -J_r^q (d_i J^s_q)(d_s J^r_i)
        "IV4": +es("qi,rsq,sri->", j, d, d),  # +J_i^q (d_r J^s_q)(d_s J^r_i)
    }
    # + 0.0 canonicalises IEEE negative zeros for the reports
    terms = {name: float(terms[name]) + 0.0 for name in TERM_NAMES}
    # -J_t^k J_p^i J_p^j (d_i J^l_k)(d_j J^t_l)
    first_quadratic = float(-es("kt,ip,jp,ilk,jtl->", j, j, j, d, d)) + 0.0
    total = float(sum(terms[name] for name in TERM_NAMES)) + 0.0
    return TermLedger(terms, first_quadratic, total)


@dataclass(frozen=True)
class ObstructionReport:
    """Every scalar, residual and verdict for one structure at one point."""

    point: tuple[float, ...]
    j_squared_residual: float
    n_max_abs: float
    obstruction: float
    contraction: float
    double_trace: float
    identity_residual_trace: float
    identity_residual_contraction: float
    ledger: TermLedger
    cancellation_residuals: dict[str, float]
    verdict: str

    def to_json_dict(self) -> dict:
        ledger = {name: self.ledger.terms[name] for name in TERM_NAMES}
        ledger["first_quadratic"] = self.ledger.first_quadratic
        ledger["total"] = self.ledger.total
        return {
            "point": list(self.point),
            "j_squared_residual": self.j_squared_residual,
            "n_max_abs": self.n_max_abs,
            "obstruction": self.obstruction,
            "contraction": self.contraction,
            "double_trace": self.double_trace,
            "identity_residual_trace": self.identity_residual_trace,
            "identity_residual_contraction": self.identity_residual_contraction,
            "ledger": ledger,
            "cancellation_residuals": dict(self.cancellation_residuals),
            "verdict": self.verdict,
        }

    def render_text(self, ledger_detail: bool = False) -> str:
        g17 = lambda x: format(x, ".17g")
        lines = [
            "point: (" + ", ".join(g17(v) for v in self.point) + ")",
            f"verdict: {self.verdict}",
            f"j_squared_residual: {g17(self.j_squared_residual)}",
            f"n_max_abs: {g17(self.n_max_abs)}",
            f"obstruction: {g17(self.obstruction)}",
            f"contraction: {g17(self.contraction)}",
            f"double_trace: {g17(self.double_trace)}",
            f"identity_residual_trace: {g17(self.identity_residual_trace)}",
            f"identity_residual_contraction: {g17(self.identity_residual_contraction)}",
            f"ledger_total: {g17(self.ledger.total)}",
        ]
        if ledger_detail:
            lines.append("ledger terms:")
            for name in TERM_NAMES:
                lines.append(f"  {name:<5} {g17(self.ledger.terms[name])}")
            lines.append(f"  {'first_quadratic':<16} {g17(self.ledger.first_quadratic)}")
        lines.append("cancellation residuals:")
        for name, value in self.cancellation_residuals.items():
            lines.append(f"  {name:<16} {g17(value)}")
        return "\n".join(lines) + "\n"


def report_from_jets(
    j_jm: JetMatrix,
    g_jm: JetMatrix | None,
    point,
    tol_alg: float = 1e-9,
    tol_identity: float = 1e-9,
) -> ObstructionReport:
    """Build a report from already-evaluated jets.

    `g_jm` is None for the Euclidean metric, in which case the coordinate
    change is skipped (it would be the identity).  The Nijenhuis components,
    the (4,0) tensor and its double trace use the original coordinates with
    the metric; the obstruction scalar, the ledger and the contraction use
    the normal-coordinate jets so that repeated-index summation is
    legitimate.
    """
    n = j_jm.n
    acs = geometry.validate_acs(j_jm, tol_alg)
    n_std = nijenhuis.nijenhuis_standard(j_jm)
    n_max = float(np.max(np.abs(n_std)))
    if g_jm is None:
        g_vals = np.eye(n)
        g_inv = np.eye(n)
        tj = j_jm
        tn = n_std
    else:
        g_vals = g_jm.values
        g_inv = np.linalg.inv(g_vals)
        tj = geometry.NormalChange.from_metric(g_jm).transform_endomorphism(j_jm)
        tn = nijenhuis.nijenhuis_standard(tj)
    bn = nijenhuis.big_n(n_std, j_jm.values, g_vals)
    dtr = nijenhuis.double_trace(bn, g_inv)
    obs = obstruction_scalar(tj)
    contraction = nijenhuis.contraction_scalar(tn, tj.values)
    ledger = term_ledger(tj)
    # tol_identity is relative to the magnitude of the summed terms: that is
    # the conditioning scale of the cancellation (both sides are near zero
    # for a valid structure, so scaling by the result would mean "absolute").
    identity_scale = 1.0 + abs(contraction) + sum(abs(v) for v in ledger.terms.values())
    if not acs.ok:
        verdict = VERDICT_INVALID_ACS
    elif abs(ledger.total - contraction) > tol_identity * identity_scale:
        verdict = VERDICT_LEDGER_ANOMALY
    else:
        verdict = VERDICT_CONSISTENT
    return ObstructionReport(
        point=tuple(float(v) for v in point),
        j_squared_residual=acs.residual,
        n_max_abs=n_max,
        obstruction=obs,
        contraction=contraction,
        double_trace=dtr,
        identity_residual_trace=abs(dtr - obs),
        identity_residual_contraction=abs(contraction - obs),
        ledger=ledger,
        cancellation_residuals=ledger.cancellation_residuals(),
        verdict=verdict,
    )


def identity_report(
    j_field,
    metric,
    chart: ChartSpec,
    point,
    tol_alg: float = 1e-9,
    tol_identity: float = 1e-9,
) -> ObstructionReport:
    """Evaluate the fields at `point` and build the full report.

    `metric` is a MetricField or None for the Euclidean default.
    """
    pt = tuple(float(v) for v in point)
    if len(pt) != chart.n:
        raise ValueError(f"point has {len(pt)} coordinates, chart has {chart.n}")
    j_jm = j_field.eval(chart, pt)
    g_jm = metric.eval(chart, pt) if metric is not None else None
    return report_from_jets(j_jm, g_jm, pt, tol_alg=tol_alg, tol_identity=tol_identity)
