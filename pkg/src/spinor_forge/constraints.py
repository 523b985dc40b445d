"""Frame conditions on a tetrad and the classification built on them."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .clifford import STA_CONSTANTS, commutator
from .connection import E_LOWER, SpinConnectionAtPoint, combine, spin_connection
from .geometry import TOL_GEO, Spacetime, Tetrad, map_points, ricci_frame, riemann

FAIL_MARGIN = 10.0


class Status(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"


def status_of(residual: float, tol: float, margin: float = FAIL_MARGIN) -> Status:
    if not np.isfinite(residual):
        return Status.FAIL
    if residual <= tol:
        return Status.PASS
    if residual > margin * tol:
        return Status.FAIL
    return Status.INCONCLUSIVE


def worst(statuses: Sequence[Status]) -> Status:
    if Status.FAIL in statuses:
        return Status.FAIL
    if Status.INCONCLUSIVE in statuses:
        return Status.INCONCLUSIVE
    return Status.PASS


@dataclass(frozen=True)
class CheckResult:
    name: str
    tolerance: float
    residuals: tuple[float, ...]  # one aggregate per point
    note: str = ""
    gating: bool = True  # diagnostics do not enter the verdict
    margin: float = FAIL_MARGIN

    @property
    def max_residual(self) -> float:
        return float(max(self.residuals)) if self.residuals else 0.0

    @property
    def status(self) -> Status:
        return status_of(self.max_residual, self.tolerance, self.margin)

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS


class Classification(str, enum.Enum):
    TELEPARALLEL = "TELEPARALLEL"
    INERTIAL_E0_ONLY = "INERTIAL_E0_ONLY"
    GEODESIC_FERMI = "GEODESIC_FERMI"
    NONE = "NONE"


class ConsistencyError(AssertionError):
    pass


CHECK_NAMES = (
    "inertial",
    "ricci_condition",
    "pauli_constancy",
    "pauli_constancy_alt",
    "geodesic",
    "fermi",
    "geodesic_fermi_combined",
    "teleparallel",
)


@dataclass(frozen=True)
class ConstraintReport:
    configuration: str
    points: np.ndarray
    checks: dict[str, CheckResult]
    riemann_max: float | None
    classification: Classification
    consistency: dict[str, bool] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# per-point quantities


def _norm(v) -> float:
    return v.norm()


def inertial_residuals(sc: SpinConnectionAtPoint) -> list[float]:
    """|D_{e_a} e_0| for a = 0..3."""
    return [_norm(sc.frame_derivative(a, 0)) for a in range(4)]


def pauli_constancy_residuals(sc: SpinConnectionAtPoint) -> list[float]:
    """|D_nu (e_i e_0)| = |1/2 [omega_nu, sigma_i]| per coordinate direction nu."""
    out = []
    for nu in range(4):
        w = sc.coordinate(nu)
        out.extend(_norm(0.5 * commutator(w, STA_CONSTANTS.sigma_lower[i])) for i in (1, 2, 3))
    return out


def _coordinate_frame_derivative(sc: SpinConnectionAtPoint, nu: int, b: int):
    # D_nu e_b = h^a_nu omega^c_{ab} e_c
    return combine(sc.omega[:, :, b] @ sc.h[:, nu], E_LOWER)


def pauli_constancy_alt_residuals(sc: SpinConnectionAtPoint) -> list[float]:
    """|D_nu e_i + e_i (D_nu e_0) e_0|, the equivalent condition on the legs."""
    e0 = E_LOWER[0]
    out = []
    for nu in range(4):
        d0 = _coordinate_frame_derivative(sc, nu, 0)
        for i in (1, 2, 3):
            di = _coordinate_frame_derivative(sc, nu, i)
            out.append(_norm(di + E_LOWER[i] * d0 * e0))
    return out


def geodesic_residuals(sc: SpinConnectionAtPoint) -> list[float]:
    return [_norm(sc.frame_derivative(0, 0))]


def fermi_residuals(sc: SpinConnectionAtPoint) -> list[float]:
    return [_norm(sc.frame_derivative(0, i)) for i in (1, 2, 3)]


def combined_residuals(sc: SpinConnectionAtPoint) -> list[float]:
    return [_norm(sc.frame_derivative(0, a)) for a in range(4)]


def teleparallel_residuals(sc: SpinConnectionAtPoint) -> list[float]:
    return [_norm(sc.frame_derivative(a, b)) for a in range(4) for b in range(4)]


def ricci_condition_residuals(s: Spacetime, t: Tetrad, x) -> list[float]:
    ric = ricci_frame(s, t, x)
    return [abs(float(ric[0, a])) for a in range(4)]


def _point_record(s: Spacetime, t: Tetrad, x) -> dict[str, float]:
    sc = spin_connection(s, t, x)
    return {
        "inertial": max(inertial_residuals(sc)),
        "ricci_condition": max(ricci_condition_residuals(s, t, x)),
        "pauli_constancy": max(pauli_constancy_residuals(sc)),
        "pauli_constancy_alt": max(pauli_constancy_alt_residuals(sc)),
        "geodesic": max(geodesic_residuals(sc)),
        "fermi": max(fermi_residuals(sc)),
        "geodesic_fermi_combined": max(combined_residuals(sc)),
        "teleparallel": max(teleparallel_residuals(sc)),
    }


# ---------------------------------------------------------------------------
# aggregation


def classify(checks: dict[str, CheckResult]) -> Classification:
    missing = [n for n in CHECK_NAMES if n not in checks]
    if missing:
        raise ValueError(f"incomplete check set, missing {missing}")
    if checks["teleparallel"].passed:
        return Classification.TELEPARALLEL
    if checks["inertial"].passed:
        return Classification.INERTIAL_E0_ONLY
    if checks["geodesic"].passed and checks["fermi"].passed:
        return Classification.GEODESIC_FERMI
    return Classification.NONE


def consistency_flags(checks: dict[str, CheckResult], riemann_max: float | None,
                      tol: float) -> dict[str, bool]:
    p = {k: v.passed for k, v in checks.items()}
    flags = {
        "teleparallel_implies_inertial": (not p["teleparallel"]) or p["inertial"],
        "inertial_implies_ricci_condition": (not p["inertial"]) or p["ricci_condition"],
        "combined_iff_geodesic_and_fermi": p["geodesic_fermi_combined"] == (p["geodesic"] and p["fermi"]),
        "pauli_forms_agree": _forms_agree(checks["pauli_constancy"], checks["pauli_constancy_alt"]),
    }
    if p["teleparallel"]:
        flags["teleparallel_implies_flat"] = riemann_max is not None and riemann_max <= tol
    return flags


def _forms_agree(a: CheckResult, b: CheckResult) -> bool:
    if a.status is not b.status:
        return False
    lo, hi = sorted((a.max_residual, b.max_residual))
    return hi <= 10.0 * lo or hi <= a.tolerance


def run_constraints(s: Spacetime, t: Tetrad, points: np.ndarray, tol_geo: float = TOL_GEO,
                    configuration: str | None = None, strict: bool = False) -> ConstraintReport:
    records = map_points(lambda x: _point_record(s, t, x), list(points))
    checks = {
        name: CheckResult(name, tol_geo, tuple(r[name] for r in records))
        for name in CHECK_NAMES
    }
    riemann_max = None
    if checks["teleparallel"].passed:
        riemann_max = max(map_points(lambda x: float(np.max(np.abs(riemann(s, x)))), list(points)))
    flags = consistency_flags(checks, riemann_max, tol_geo)
    if strict and not all(flags.values()):
        bad = [k for k, v in flags.items() if not v]
        raise ConsistencyError(f"implication chain violated: {bad}")
    return ConstraintReport(
        configuration=configuration or f"{s.name}/{t.name}",
        points=np.asarray(points),
        checks=checks,
        riemann_max=riemann_max,
        classification=classify(checks),
        consistency=flags,
    )
