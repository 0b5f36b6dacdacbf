"""Symmetric state families, closed-form correlation values, and detection.

Werner and isotropic states have closed-form correlation sums; the Werner
forms hold for the plain same-vector convention and the isotropic forms for
the conjugated second party, so closed-form results carry the convention
they were derived under.  ``detect`` compares a measured correlation sum
against both separable bounds, using one dataset twice.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import (
    DensityMatrix,
    DimensionMismatchError,
    NotHermitianError,
    ParameterOutOfRangeError,
    max_entangled_state,
    symmetry_projectors,
    validate_density,
)
from .correlations import CorrelationSpec, correlation_sum
from .bounds import BoundRecord


@dataclass(frozen=True)
class SymmetricStateSpec:
    """One-parameter symmetric family member: Werner or isotropic."""

    family: str      # "werner" | "isotropic"
    dim: int
    parameter: float

    def __post_init__(self):
        if self.family not in ("werner", "isotropic"):
            raise ValueError("family must be 'werner' or 'isotropic'")
        if not 0.0 <= self.parameter <= 1.0:
            raise ParameterOutOfRangeError(f"parameter must lie in [0, 1], got {self.parameter}")


class Verdict(str, Enum):
    ENTANGLED_BY_LOWER = "EntangledByLower"
    ENTANGLED_BY_UPPER = "EntangledByUpper"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class DetectionVerdict:
    value: float
    lower_used: float
    upper_used: float
    verdict: Verdict
    design_descriptor: dict
    conjugate_second: bool


class DesignMismatchError(ValueError):
    """The supplied bounds were computed for a different design."""


def werner_state(d: int, p: float) -> DensityMatrix:
    """Mixture of the normalized symmetric and antisymmetric projectors.

    Entangled exactly when p < 1/2.
    """
    if not 0.0 <= p <= 1.0:
        raise ParameterOutOfRangeError(f"p must lie in [0, 1], got {p}")
    if d < 2:
        raise ValueError("need d >= 2")
    p_sym, p_asym = symmetry_projectors(d)
    m = p * 2 / (d * (d + 1)) * p_sym + (1 - p) * 2 / (d * (d - 1)) * p_asym
    return validate_density(m, d)


def isotropic_state(d: int, q: float) -> DensityMatrix:
    """q |Phi+><Phi+| + (1-q) 1/d^2; entangled exactly when q > 1/(d+1)."""
    if not 0.0 <= q <= 1.0:
        raise ParameterOutOfRangeError(f"q must lie in [0, 1], got {q}")
    if d < 2:
        raise ValueError("need d >= 2")
    phi = max_entangled_state(d)
    m = q * np.outer(phi, phi.conj()) + (1 - q) * np.eye(d * d) / (d * d)
    return validate_density(m, d)


def symmetric_state(spec: SymmetricStateSpec) -> DensityMatrix:
    if spec.family == "werner":
        return werner_state(spec.dim, spec.parameter)
    return isotropic_state(spec.dim, spec.parameter)


@dataclass(frozen=True)
class ClosedFormCorrelation:
    value: float
    conjugate_second: bool


def closed_form_correlation(spec: SymmetricStateSpec, design_kind: str, size: int) -> ClosedFormCorrelation:
    """Closed-form correlation sum for the supported family/design pairs.

    Werner values hold for the plain convention; isotropic values hold with
    the second party conjugated, and the result records that.
    """
    d, x = spec.dim, spec.parameter
    if design_kind not in ("mub", "sic"):
        raise ValueError("design_kind must be 'mub' or 'sic'")
    if spec.family == "werner":
        if design_kind == "mub":
            return ClosedFormCorrelation(2 * x * size / (d + 1), conjugate_second=False)
        return ClosedFormCorrelation(2 * x * size / (d * (d + 1)), conjugate_second=False)
    if design_kind == "sic":
        return ClosedFormCorrelation(size * (x * (d - 1) + 1) / (d * d), conjugate_second=True)
    return ClosedFormCorrelation(size * (x * (d - 1) + 1) / d, conjugate_second=True)


def spa_witness(d: int) -> tuple[np.ndarray, float]:
    """Positive approximation of the transpose-map witness and its floor.

    Returns the normalized symmetric projector 2 P_sym / (d(d+1)) together
    with the separable floor 1/(d(d+1)): every separable state's expectation
    stays at or above the floor, while some entangled states dip below.
    """
    if d < 2:
        raise ValueError("need d >= 2")
    p_sym, _ = symmetry_projectors(d)
    return 2.0 / (d * (d + 1)) * p_sym, 1.0 / (d * (d + 1))


def witness_expectation(w: np.ndarray, rho: DensityMatrix) -> float:
    """tr[W rho] for a Hermitian operator W."""
    w = np.asarray(w, dtype=complex)
    if w.shape != rho.matrix.shape:
        raise DimensionMismatchError(f"operator shape {w.shape} vs state {rho.matrix.shape}")
    herm = float(np.abs(w - w.conj().T).max())
    if herm > 1e-10:
        raise NotHermitianError(herm)
    return float(np.trace(w @ rho.matrix).real)


def detect(
    rho: DensityMatrix,
    spec: CorrelationSpec,
    bounds: BoundRecord,
    tol: float = 1e-9,
) -> DetectionVerdict:
    """Evaluate the correlation sum and compare against both separable bounds.

    A value below ``lower - tol`` or above ``upper + tol`` certifies
    entanglement; anything within the band is inconclusive.
    """
    if bounds.design_kind != spec.kind or bounds.dim != spec.dim or bounds.size != spec.size:
        raise DesignMismatchError(
            f"bounds are for {bounds.design_kind}(d={bounds.dim}, size={bounds.size}), "
            f"spec is {spec.kind}(d={spec.dim}, size={spec.size})"
        )
    value = correlation_sum(rho, spec)
    if value < bounds.lower - tol:
        verdict = Verdict.ENTANGLED_BY_LOWER
    elif value > bounds.upper + tol:
        verdict = Verdict.ENTANGLED_BY_UPPER
    else:
        verdict = Verdict.INCONCLUSIVE
    return DetectionVerdict(
        value=value,
        lower_used=bounds.lower,
        upper_used=bounds.upper,
        verdict=verdict,
        design_descriptor=spec.descriptor(),
        conjugate_second=spec.conjugate_second,
    )
