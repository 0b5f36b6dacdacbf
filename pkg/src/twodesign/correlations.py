"""Coincidence-probability sums over a design and the associated operators.

The central quantity is the sum of same-outcome coincidence probabilities
when both parties measure along the vectors of a (possibly incomplete)
MUB or SIC design.  With ``conjugate_second`` set, the second party uses
the complex-conjugated vectors; both conventions appear in closed-form
results for symmetric states, so the flag is explicit everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DensityMatrix, DimensionMismatchError
from .designs import MubSet, SicSet


@dataclass(frozen=True)
class CorrelationSpec:
    """A measurement choice: a design plus the second-party conjugation flag."""

    design: MubSet | SicSet
    conjugate_second: bool = False

    @property
    def dim(self) -> int:
        return self.design.dim

    @property
    def kind(self) -> str:
        return "mub" if isinstance(self.design, MubSet) else "sic"

    @property
    def size(self) -> int:
        """Number of bases (MUB) or vectors (SIC) in the design."""
        return self.design.count

    def design_vectors(self) -> np.ndarray:
        v = self.design.vectors() if isinstance(self.design, MubSet) else self.design.vectors
        return np.asarray(v)

    def descriptor(self) -> dict:
        return {
            "kind": self.kind,
            "dim": self.dim,
            "size": self.size,
            "provenance": self.design.provenance,
            "conjugate_second": self.conjugate_second,
        }


def _check_dims(rho: DensityMatrix, dim: int) -> None:
    if rho.local_dim != dim:
        raise DimensionMismatchError(
            f"state has local dimension {rho.local_dim}, design has {dim}"
        )


def coincidence_probability(rho: DensityMatrix, u, v) -> float:
    """tr[(|u><u| x |v><v|) rho] for unit vectors u, v on each factor."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != (rho.local_dim,) or v.shape != (rho.local_dim,):
        raise DimensionMismatchError("vector dimensions do not match the state")
    k = np.kron(u, v)
    return float(np.real(k.conj() @ rho.matrix @ k))


def _pair_vectors(spec: CorrelationSpec) -> tuple[np.ndarray, np.ndarray]:
    first = spec.design_vectors()
    second = first.conj() if spec.conjugate_second else first
    return first, second


def correlation_sum(rho: DensityMatrix, spec: CorrelationSpec) -> float:
    """Sum of same-index coincidence probabilities over the design."""
    _check_dims(rho, spec.dim)
    first, second = _pair_vectors(spec)
    d = spec.dim
    joint = (first[:, :, None] * second[:, None, :]).reshape(len(first), d * d)
    vals = np.einsum("ni,ij,nj->n", joint.conj(), rho.matrix, joint)
    return float(np.sum(vals.real))


def correlation_sum_mub(rho: DensityMatrix, spec: CorrelationSpec) -> float:
    """Correlation sum for an m-basis MUB design (m*d terms)."""
    if not isinstance(spec.design, MubSet):
        raise TypeError("spec.design must be a MubSet")
    return correlation_sum(rho, spec)


def correlation_sum_sic(rho: DensityMatrix, spec: CorrelationSpec) -> float:
    """Correlation sum for a SIC subset (one term per vector)."""
    if not isinstance(spec.design, SicSet):
        raise TypeError("spec.design must be a SicSet")
    return correlation_sum(rho, spec)


def design_witness_operator(spec: CorrelationSpec) -> np.ndarray:
    """Operator W with tr[W rho] equal to the correlation sum for every rho."""
    first, second = _pair_vectors(spec)
    d = spec.dim
    w = np.zeros((d * d, d * d), dtype=complex)
    for u, v in zip(first, second):
        k = np.kron(u, v)
        w += np.outer(k, k.conj())
    return w


def mdi_conversion(spec: CorrelationSpec) -> tuple[np.ndarray, list[tuple[np.ndarray, np.ndarray]]]:
    """Transpose each local factor of the witness for device-independent use.

    Transposition is taken in the computational basis, so each rank-one
    factor |v><v| becomes |v*><v*|.  Returns the transposed operator and,
    per design index, the pair of normalized states the two parties must
    prepare (the conjugated design vectors).  The trace is preserved and
    tr[W_mdi (rho^{T_A T_B})] = tr[W rho] for every state rho.
    """
    first, second = _pair_vectors(spec)
    d = spec.dim
    w = np.zeros((d * d, d * d), dtype=complex)
    preparations = []
    for u, v in zip(first, second):
        a, b = u.conj(), v.conj()
        k = np.kron(a, b)
        w += np.outer(k, k.conj())
        preparations.append((a, b))
    return w, preparations
