"""Reference-table reproduction, parameter scans, and critical values.

Reference values are embedded as exact fractions where known in closed form
and as published decimals otherwise; each table carries the tolerance its
precision supports (closed forms 1e-6, optimizer decimals 5e-4, figure
captions 1e-2).  Reports carry per-row pass flags so a single defective
cell never hides behind an aggregate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import (
    BoundRecord,
    OptimizerOptions,
    DEFAULT_OPTIONS,
    SubsetSpectrum,
    closed_form_mub_upper,
    design_closed_bounds,
    separable_lower_bound,
    separable_upper_bound,
    subset_bound_spectrum,
)
from .correlations import CorrelationSpec
from .designs import MubSet, mub_triple_family_d4, sic_povm, standard_mubs
from .states import DetectionVerdict, SymmetricStateSpec, detect, symmetric_state

TABLE_IDS = ("I", "II", "III", "IV", "V", "EQ12")


@dataclass(frozen=True)
class TableRow:
    labels: dict
    computed: float
    reference: float
    abs_error: float
    tolerance: float
    passed: bool
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class TableReport:
    table_id: str
    tolerance: float
    rows: tuple[TableRow, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)


def _row(labels: dict, computed: float, reference: float, tol: float, **extra) -> TableRow:
    err = abs(computed - reference)
    return TableRow(
        labels=labels,
        computed=float(computed),
        reference=float(reference),
        abs_error=float(err),
        tolerance=float(tol),
        passed=bool(err <= tol),
        extra=extra,
    )


# -- embedded reference values ---------------------------------------------------

# MUB lower bounds L(m, d); d = 4 carries the (min, max) pair over triples.
MUB_LOWER_REFS = {
    (2, 2): 0.5,
    (3, 2): 1.0,
    (2, 3): 0.211,
    (3, 3): 0.5,
    (4, 3): 1.0,
}
MUB_LOWER_REFS_D4 = {2: (0.0, 0.0), 3: (0.25, 0.5), 4: (0.5, 0.5), 5: (1.0, 1.0)}

# Hesse SIC (d = 3): subset-size -> (L-, L+, U+, U-)
SIC_D3_REFS = {
    3: (0.0, 0.0, 1.25414, 9 / 8),
    4: (0.0, 0.0, 1.39952, 1.25414),
    5: (0.0, 0.0, 1.46301, 1.39952),
    6: (0.0, 0.1123, 1.5, 1.48175),
    7: (3 / 20, 3 / 20, 1.5, 1.5),
    8: (3 / 8, 3 / 8, 1.5, 1.5),
    9: (3 / 4, 3 / 4, 1.5, 1.5),
}

# d = 2 SIC: subset-size -> (L, U); identical for every subset of that size.
SIC_D2_REFS = {
    2: (0.0, (math.sqrt(3) + 1) ** 2 / 6),
    3: (4 / 15, 4 / 3),
    4: (2 / 3, 4 / 3),
}

# d = 4 SIC, label-lexicographic leading subsets: size -> (L, U).
SIC_D4_REFS = {
    3: (0.0, 1.1476),
    4: (0.0, 1.2676),
    5: (0.0, 1.3766),
    6: (0.0, 1.4521),
    7: (0.0067, 1.4723),
    8: (0.0279, 1.4902),
    9: (0.0325, 1.5556),
    10: (0.0693, 1.5763),
    11: (0.0719, 1.5881),
    12: (0.1436, 1.5935),
    13: (0.2031, 1.6),
    14: (0.2285, 1.6),
    15: (0.4363, 1.6),
    16: (0.8, 1.6),
}

# Critical parameters read from the published detection figure (d = 3 SIC,
# best subsets): Werner p and isotropic q crossings per subset size.
FIGURE_P_REFS = {6: 0.11, 7: 0.13, 8: 0.28, 9: 0.5}
FIGURE_Q_REFS = {3: 1.19, 4: 0.91, 5: 0.76, 6: 0.61, 7: 0.46, 8: 0.34, 9: 0.25}

LOWER_TOL = 5e-4
UPPER_CLOSED_TOL = 1e-6
SIC_D2_TOL = 1e-5
FIGURE_TOL = 1e-2


def _reproduce_table_i(opts: OptimizerOptions) -> TableReport:
    rows = []
    for d in (2, 3):
        mubs = standard_mubs(d)
        for m in range(2, d + 2):
            sub = mubs.subset(range(m))
            lo = separable_lower_bound(sub, opts)
            rows.append(_row({"cell": f"L({m},{d})", "design": sub.provenance},
                             lo.value, MUB_LOWER_REFS[(m, d)], LOWER_TOL))
            up = separable_upper_bound(sub, opts)
            rows.append(_row({"cell": f"U({m},{d})", "design": sub.provenance},
                             up.value, closed_form_mub_upper(m, d), UPPER_CLOSED_TOL))
    mubs4 = standard_mubs(4)
    half_pi = np.pi / 2
    minus_designs = {m: mubs4.subset(range(m)) for m in (2, 3, 4, 5)}
    plus_designs = {
        2: MubSet(4, mub_triple_family_d4(0.0, 0.0, 0.0).bases[:2], provenance="family-pair(x=0)"),
        3: mub_triple_family_d4(half_pi, 0.0, 0.0),
        4: minus_designs[4],
        5: minus_designs[5],
    }
    for m in (2, 3, 4, 5):
        ref_minus, ref_plus = MUB_LOWER_REFS_D4[m]
        lo_minus = separable_lower_bound(minus_designs[m], opts)
        rows.append(_row({"cell": f"L-({m},4)", "design": minus_designs[m].provenance},
                         lo_minus.value, ref_minus, LOWER_TOL))
        if plus_designs[m] is minus_designs[m]:
            lo_plus = lo_minus
        else:
            lo_plus = separable_lower_bound(plus_designs[m], opts)
        rows.append(_row({"cell": f"L+({m},4)", "design": plus_designs[m].provenance},
                         lo_plus.value, ref_plus, LOWER_TOL))
        up = separable_upper_bound(minus_designs[m], opts)
        rows.append(_row({"cell": f"U({m},4)", "design": minus_designs[m].provenance},
                         up.value, closed_form_mub_upper(m, 4), UPPER_CLOSED_TOL))
    return TableReport("I", LOWER_TOL, tuple(rows))


def hesse_spectrum(subset_size: int, opts: OptimizerOptions = DEFAULT_OPTIONS) -> SubsetSpectrum:
    """Full subset enumeration of the d = 3 SIC at one subset size."""
    return subset_bound_spectrum(sic_povm(3), subset_size, opts)


def _reproduce_table_ii(
    opts: OptimizerOptions, spectra: dict[int, SubsetSpectrum] | None = None
) -> TableReport:
    rows = []
    for mt, (l_minus, l_plus, u_plus, u_minus) in SIC_D3_REFS.items():
        spec = spectra[mt] if spectra and mt in spectra else hesse_spectrum(mt, opts)
        n_sub = len(spec.per_subset)
        rows.append(_row({"cell": f"L-({mt},3)", "subsets": n_sub}, spec.l_minus, l_minus, LOWER_TOL))
        rows.append(_row({"cell": f"L+({mt},3)", "subsets": n_sub}, spec.l_plus, l_plus, LOWER_TOL))
        rows.append(_row({"cell": f"U+({mt},3)", "subsets": n_sub}, spec.u_plus, u_plus, LOWER_TOL))
        rows.append(_row({"cell": f"U-({mt},3)", "subsets": n_sub}, spec.u_minus, u_minus, LOWER_TOL))
    return TableReport("II", LOWER_TOL, tuple(rows))


def _reproduce_table_iii(opts: OptimizerOptions) -> TableReport:
    rows = []
    sic = sic_povm(2)
    for mt, (l_ref, u_ref) in SIC_D2_REFS.items():
        spec = subset_bound_spectrum(sic, mt, opts)
        l_spread = spec.l_plus - spec.l_minus
        u_spread = spec.u_plus - spec.u_minus
        rows.append(_row({"cell": f"L({mt},2)", "subsets": len(spec.per_subset)},
                         spec.l_minus, l_ref, SIC_D2_TOL, spread=l_spread))
        rows.append(_row({"cell": f"U({mt},2)", "subsets": len(spec.per_subset)},
                         spec.u_plus, u_ref, SIC_D2_TOL, spread=u_spread))
    return TableReport("III", SIC_D2_TOL, tuple(rows))


def _reproduce_table_v(opts: OptimizerOptions) -> TableReport:
    rows = []
    sic = sic_povm(4)
    for mt, (l_ref, u_ref) in SIC_D4_REFS.items():
        sub = sic.subset(range(mt))
        label = ",".join(f"({a},{b})" for a, b in sub.labels)
        lo = separable_lower_bound(sub, opts)
        up = separable_upper_bound(sub, opts)
        rows.append(_row({"cell": f"L({mt},4)", "subset": label}, lo.value, l_ref, LOWER_TOL))
        rows.append(_row({"cell": f"U({mt},4)", "subset": label}, up.value, u_ref, LOWER_TOL))
    return TableReport("V", LOWER_TOL, tuple(rows))


def _reproduce_eq12(opts: OptimizerOptions) -> TableReport:
    rows = []
    for d in (2, 3):
        full_mub = standard_mubs(d)
        full_sic = sic_povm(d)
        for kind, design in (("mub", full_mub), ("sic", full_sic)):
            l_ref, u_ref = design_closed_bounds(d, kind)
            lo = separable_lower_bound(design, opts)
            up = separable_upper_bound(design, opts)
            rows.append(_row({"cell": f"L(full {kind}, d={d})"}, lo.value, l_ref, UPPER_CLOSED_TOL))
            rows.append(_row({"cell": f"U(full {kind}, d={d})"}, up.value, u_ref, UPPER_CLOSED_TOL))
    return TableReport("EQ12", UPPER_CLOSED_TOL, tuple(rows))


def reproduce_table(
    table_id: str,
    opts: OptimizerOptions = DEFAULT_OPTIONS,
    *,
    spectra: dict[int, SubsetSpectrum] | None = None,
) -> TableReport:
    """Recompute one reference table and compare cell by cell.

    ``spectra`` may supply precomputed d = 3 subset spectra to avoid
    re-enumeration.  Ids II and IV name the same 28 d = 3 cells (the
    reference data exists in a rounded and a higher-precision variant) and
    run the same computation.
    """
    tid = table_id.upper()
    if tid == "I":
        return _reproduce_table_i(opts)
    if tid in ("II", "IV"):
        report = _reproduce_table_ii(opts, spectra)
        return TableReport(tid, report.tolerance, report.rows)
    if tid == "III":
        return _reproduce_table_iii(opts)
    if tid == "V":
        return _reproduce_table_v(opts)
    if tid == "EQ12":
        return _reproduce_eq12(opts)
    raise ValueError(f"unknown table id {table_id!r}; expected one of {TABLE_IDS}")


# -- detection-threshold scans -----------------------------------------------------


@dataclass(frozen=True)
class ScanRow:
    parameter: float
    value: float
    verdict: str


@dataclass(frozen=True)
class ScanResult:
    family: str
    dim: int
    design_descriptor: dict
    rows: tuple[ScanRow, ...]
    first_flip: tuple[float, str, str] | None  # (parameter, from, to)


def scan_family(
    family: str,
    d: int,
    spec: CorrelationSpec,
    bounds: BoundRecord,
    *,
    start: float = 0.0,
    stop: float = 1.0,
    step: float = 1e-3,
    tol: float = 1e-9,
) -> ScanResult:
    """Verdict per parameter value over a family scan; reports the first flip."""
    if step <= 0:
        raise ValueError("step must be positive")
    count = int(round((stop - start) / step))
    params = [start + k * step for k in range(count + 1)]
    rows = []
    flip = None
    prev: DetectionVerdict | None = None
    for p in params:
        rho = symmetric_state(SymmetricStateSpec(family, d, min(max(p, 0.0), 1.0)))
        verdict = detect(rho, spec, bounds, tol)
        rows.append(ScanRow(parameter=p, value=verdict.value, verdict=verdict.verdict.value))
        if prev is not None and verdict.verdict != prev.verdict and flip is None:
            flip = (p, prev.verdict.value, verdict.verdict.value)
        prev = verdict
    return ScanResult(
        family=family,
        dim=d,
        design_descriptor=spec.descriptor(),
        rows=tuple(rows),
        first_flip=flip,
    )


# -- figure critical values ---------------------------------------------------------


@dataclass(frozen=True)
class CriticalValue:
    name: str
    computed: float
    reference: float
    passed: bool
    bound_used: float


def figure_critical_values(
    opts: OptimizerOptions = DEFAULT_OPTIONS,
    spectra: dict[int, SubsetSpectrum] | None = None,
) -> list[CriticalValue]:
    """Werner/isotropic crossing parameters for the d = 3 SIC subsets.

    For subset size n the Werner correlation sum is p*n/6, so the lower
    bound L+ is crossed at p = 6 L+/n; the isotropic sum (conjugated
    convention) is n(2q+1)/9, crossing U- at q = (9 U-/n - 1)/2.  Crossings
    above 1 certify that no state of the family violates that bound.
    """
    out = []
    sizes = sorted(set(FIGURE_P_REFS) | set(FIGURE_Q_REFS))
    for mt in sizes:
        spec = spectra[mt] if spectra and mt in spectra else hesse_spectrum(mt, opts)
        if mt in FIGURE_P_REFS:
            p_star = 6 * spec.l_plus / mt
            out.append(CriticalValue(
                name=f"p{mt}", computed=p_star, reference=FIGURE_P_REFS[mt],
                passed=abs(p_star - FIGURE_P_REFS[mt]) <= FIGURE_TOL, bound_used=spec.l_plus,
            ))
        if mt in FIGURE_Q_REFS:
            q_star = (9 * spec.u_minus / mt - 1) / 2
            out.append(CriticalValue(
                name=f"q{mt}", computed=q_star, reference=FIGURE_Q_REFS[mt],
                passed=abs(q_star - FIGURE_Q_REFS[mt]) <= FIGURE_TOL, bound_used=spec.u_minus,
            ))
    return out


def best_subset_for_lower(spectrum: SubsetSpectrum) -> BoundRecord:
    """The subset record achieving L+ (ties resolved by enumeration order)."""
    return max(spectrum.per_subset, key=lambda r: round(r.lower, 9))


def best_subset_for_upper(spectrum: SubsetSpectrum) -> BoundRecord:
    """The subset record achieving U- (ties resolved by enumeration order)."""
    return min(spectrum.per_subset, key=lambda r: round(r.upper, 9))
