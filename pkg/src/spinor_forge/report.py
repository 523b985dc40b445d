"""Identity suites per configuration and the JSON/text report document."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

import numpy as np

from . import __version__
from .clifford import QUATERNION_IJ_SIGN
from .connection import (
    OMEGA_FROM_Q_FORM,
    clifford_deriv_q,
    dagger,
    dirac_identity_residual,
    dirac_matrix_residual,
    hermitian_checks,
    omega_from_q,
    product_rule_q,
    q_derivatives,
    sachs_total_max,
    trace_identities,
)
from .constraints import CheckResult, ConstraintReport, Status, run_constraints, worst
from .geometry import (
    F_NORMALIZATION,
    TOL_ALG,
    TOL_GEO,
    F_closed_form,
    F_components,
    Spacetime,
    Tetrad,
    bianchi_residual,
    frame_kinematics,
    frame_vector_field,
    map_points,
    metric_compatibility_residual,
    q_tensor_square,
    ricci,
    sym_residual,
    tetrad_residual,
)
from .matrices import RAISE_LOWER_SIGN, rep_projector_label

SCHEMA_VERSION = 1


def conventions() -> dict[str, Any]:
    return {
        "quaternion_ij_sign": QUATERNION_IJ_SIGN,
        "quaternion_embedding": "i -> i sigma^1, j -> i sigma^2",
        "rep_e_projector": rep_projector_label(),
        "spinor_column": "second column of rep(phi)",
        "dotted_spinor_row": "second row of rep(xi)",
        "spinor_bases": "s = (-sigma_1 e, e), s-dot = (-e sigma_1, e)",
        "f_normalization": F_NORMALIZATION,
        "f_formula": "F'^k_mn = -eps_ijk h^i_m h^j_n (coefficient of i sigma_k in antisym_mn)",
        "raise_lower_sign": RAISE_LOWER_SIGN,
        "omega_dagger": "-e^0 omega e^0",
        "omega_from_q": OMEGA_FROM_Q_FORM,
        "pauli_constancy_alt": "D e_i + e_i (D e_0) e_0",
        "multivector_norm": "max absolute blade coefficient",
        "fail_margin": 10.0,
    }


# ---------------------------------------------------------------------------
# per-point identity records

GEOMETRY_CHECKS = (
    # name, tolerance kind, gating, note
    ("tetrad_relation", "alg", True, "h^a_m h^b_n eta_ab = g_mn"),
    ("q_square_symmetric", "alg", True, "1/2 (q_m qc_n + q_n qc_m) = -g_mn"),
    ("q_square_antisymmetric_grade", "alg", True, "antisymmetric part is a pure bivector"),
    ("f_closed_form", "alg", True, "i sigma_k coefficients vs -eps_ijk h^i_m h^j_n"),
    ("metric_compatibility", "geo", True, "nabla g = 0"),
    ("bianchi", "geo", True, "first Bianchi identity and pair antisymmetry"),
    ("kinematics_reassembly", "geo", True, "Z_{m;n} = a Z + rotation + shear + E/3 p, Z = e_0"),
)

CONNECTION_CHECKS = (
    ("omega_antisymmetry", "geo", True, "omega_a^{bc} = -omega_a^{cb}"),
    ("dirac_identity", "geo", True, "omega^c_ab e_c = 1/2 [omega_{e_a}, e_b]"),
    ("dirac_matrix_image", "geo", True, "even image of the identity in 2x2 matrices"),
    ("hermitian_dagger", "alg", True, "rep(-e^0 omega e^0) = Omega^H"),
    ("hermitian_epsilon", "alg", True, "Omega = eps Omega^H eps"),
    ("hermitian_epsilon_transpose", "alg", False, "diagnostic: Omega = eps Omega^T eps"),
    ("sachs_total_derivative", "geo", True, "D^S q = dq + 1/2 omega q + 1/2 q omega^dagger - Gamma q"),
    ("clifford_product_rule", "geo", True, "dq + 1/2 [omega, q] = Gamma q + e_mu (D e_0)"),
    ("omega_from_q", "geo", True, "reconstruction agrees with the spin connection"),
    ("omega_from_q_swapped", "geo", False, "diagnostic: qc (dq + Gamma q) order gives -omega^dagger"),
    ("trace_q_qcheck", "alg", True, "q^m qc_m = -4"),
    ("trace_q_omega_qcheck", "alg", True, "q^m omega_rho qc_m = 0"),
)


def geometry_record(s: Spacetime, t: Tetrad, x) -> dict[str, float]:
    sym, anti = q_tensor_square(t, x)
    grade = max((anti[m][n] - anti[m][n].grade(2)).norm() for m in range(4) for n in range(4))
    fk = frame_kinematics(s, frame_vector_field(t, 0), x)
    e0 = t.inverse(x)[:, 0]
    rec = {
        "tetrad_relation": tetrad_residual(s, t, x),
        "q_square_symmetric": sym_residual(s, t, x),
        "q_square_antisymmetric_grade": grade,
        "f_closed_form": float(np.max(np.abs(F_components(t, x) - F_closed_form(t.h(x))))),
        "metric_compatibility": metric_compatibility_residual(s, x),
        "bianchi": bianchi_residual(s, x),
        "kinematics_reassembly": fk.reassembly_residual(s.metric(x) @ e0),
    }
    if s.params.get("vacuum"):
        rec["vacuum_ricci"] = float(np.max(np.abs(ricci(s, x))))
    return rec


def connection_record(s: Spacetime, t: Tetrad, x) -> dict[str, float]:
    qd = q_derivatives(s, t, x)
    sc = qd.sc
    herm = hermitian_checks(sc)
    pairs = [(a, b) for a in range(4) for b in range(4)]
    tr1, tr2 = trace_identities(qd)
    return {
        "omega_antisymmetry": sc.antisymmetry_residual(),
        "dirac_identity": max(dirac_identity_residual(sc, a, b) for a, b in pairs),
        "dirac_matrix_image": max(dirac_matrix_residual(sc, a, b) for a, b in pairs),
        "hermitian_dagger": herm.dagger,
        "hermitian_epsilon": herm.epsilon_conjugate,
        "hermitian_epsilon_transpose": herm.epsilon_transpose,
        "sachs_total_derivative": sachs_total_max(qd),
        "clifford_product_rule": max((clifford_deriv_q(qd, m, n) - product_rule_q(qd, m, n)).norm()
                                     for m, n in pairs),
        "omega_from_q": max((omega_from_q(qd, r) - sc.coordinate(r)).norm() for r in range(4)),
        "omega_from_q_swapped": max((omega_from_q(qd, r, printed=True) + dagger(sc.coordinate(r))).norm()
                                    for r in range(4)),
        "trace_q_qcheck": tr1,
        "trace_q_omega_qcheck": tr2,
    }


def _collect(records: list[dict[str, float]], table, tol_alg: float, tol_geo: float) -> list[CheckResult]:
    out = []
    for name, kind, gating, note in table:
        tol = tol_alg if kind == "alg" else tol_geo
        out.append(CheckResult(name, tol, tuple(r[name] for r in records), note=note, gating=gating))
    return out


def geometry_suite(s: Spacetime, t: Tetrad, points, tol_alg: float = TOL_ALG,
                   tol_geo: float = TOL_GEO) -> list[CheckResult]:
    records = map_points(lambda x: geometry_record(s, t, x), list(points))
    table = GEOMETRY_CHECKS
    if s.params.get("vacuum"):
        table = table + (("vacuum_ricci", "geo", True, "Ric_mn = 0"),)
    return _collect(records, table, tol_alg, tol_geo)


def connection_suite(s: Spacetime, t: Tetrad, points, tol_alg: float = TOL_ALG,
                     tol_geo: float = TOL_GEO) -> list[CheckResult]:
    records = map_points(lambda x: connection_record(s, t, x), list(points))
    return _collect(records, CONNECTION_CHECKS, tol_alg, tol_geo)


# ---------------------------------------------------------------------------
# documents


def check_to_dict(c: CheckResult, with_residuals: bool = True) -> dict[str, Any]:
    d = {
        "name": c.name,
        "status": c.status.value,
        "max_residual": c.max_residual,
        "tolerance": c.tolerance,
        "gating": c.gating,
        "note": c.note,
    }
    if with_residuals:
        d["residuals"] = [float(r) for r in c.residuals]
    return d


def verdict(suites: dict[str, list[CheckResult]], consistency: dict[str, bool] | None = None) -> Status:
    statuses = [c.status for checks in suites.values() for c in checks if c.gating]
    if consistency and not all(consistency.values()):
        statuses.append(Status.FAIL)
    return worst(statuses)


@dataclass(frozen=True)
class ReportDocument:
    body: dict[str, Any]

    @property
    def verdict(self) -> Status:
        return Status(self.body["verdict"])

    def to_json(self) -> str:
        return json.dumps(self.body, sort_keys=True, indent=2, allow_nan=False) + "\n"

    def to_text(self) -> str:
        b = self.body
        lines = [f"spinor-forge {b['tool']['version']}  command={b['command']}"]
        for key in sorted(b["config"]):
            lines.append(f"  {key} = {b['config'][key]}")
        for suite in sorted(b["suites"]):
            lines.append(f"[{suite}]")
            for c in b["suites"][suite]:
                flag = "" if c["gating"] else "  (not gating)"
                lines.append(f"  {c['status']:<12} {c['name']:<42} max={c['max_residual']:.3e} "
                             f"tol={c['tolerance']:.1e}{flag}")
        if "classification" in b:
            lines.append(f"classification: {b['classification']}")
            for k in sorted(b["consistency"]):
                lines.append(f"  {k}: {b['consistency'][k]}")
        lines.append(f"verdict: {b['verdict']}")
        return "\n".join(lines) + "\n"


def _base(command: str, config: dict[str, Any]) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "spinor-forge", "version": __version__},
        "command": command,
        "conventions": conventions(),
        "config": config,
    }


def selftest_document(results: dict[str, list[CheckResult]], config: dict[str, Any]) -> ReportDocument:
    body = _base("selftest", config)
    body["suites"] = {k: [check_to_dict(c) for c in v] for k, v in results.items()}
    body["verdict"] = verdict(results).value
    return ReportDocument(body)


def build_report(s: Spacetime, t: Tetrad, points: np.ndarray, config: dict[str, Any],
                 tol_alg: float = TOL_ALG, tol_geo: float = TOL_GEO) -> ReportDocument:
    geo = geometry_suite(s, t, points, tol_alg, tol_geo)
    conn = connection_suite(s, t, points, tol_alg, tol_geo)
    cons: ConstraintReport = run_constraints(s, t, points, tol_geo)
    # constraint outcomes feed the classification; they are findings, not defects
    constraint_checks = [
        CheckResult(c.name, c.tolerance, c.residuals, note="frame condition", gating=False)
        for c in cons.checks.values()
    ]
    suites = {"geometry": geo, "spin_connection": conn, "constraints": constraint_checks}
    body = _base("report", config)
    body["points"] = [[float(v) for v in p] for p in points]
    body["suites"] = {k: [check_to_dict(c) for c in v] for k, v in suites.items()}
    body["classification"] = cons.classification.value
    body["consistency"] = dict(cons.consistency)
    body["riemann_max"] = cons.riemann_max
    body["verdict"] = verdict(suites, cons.consistency).value
    return ReportDocument(body)
