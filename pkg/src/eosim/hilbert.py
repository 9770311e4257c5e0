"""Tensor-product operator algebra for two three-level atoms and two cavity modes.

Conventions baked in here and relied on everywhere else:

* each atom is an L-system with basis order ``|0>, |1>, |e>`` (``|0>`` is
  optically dark, ``|1>`` couples to the noisy excited state ``|e>``),
* each cavity mode is a Fock ladder ``|0> .. |n_max>``,
* composite spaces list their factors in the canonical order
  ``atom_L, atom_R, mode_L, mode_R``.

Everything is dense: the largest space used in practice is
3 * 3 * (n_max + 1)^2 <= a few hundred dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, NumericalHealthError

ATOM_DIM = 3
KET_0, KET_1, KET_E = 0, 1, 2

#: entrywise |A - A^dag| tolerance for operators built from exact inputs
HERMITIAN_BUILD_TOL = 1e-12
#: Hermiticity tolerance for density matrices (hard failure beyond this)
HERMITIAN_STATE_TOL = 1e-10
#: density matrices may dip this far below positive semidefiniteness
MIN_EIG_TOL = -1e-8
#: slack on the trace upper bound of a (sub)normalized state
TRACE_TOL = 1e-10


@dataclass(frozen=True)
class SpaceDescriptor:
    """Ordered list of tensor factors ``(kind, local_dim)``."""

    factors: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        if not self.factors:
            raise DimensionError("a space needs at least one factor")
        for i, (kind, dim) in enumerate(self.factors):
            if kind == "atom":
                if dim != ATOM_DIM:
                    raise DimensionError(
                        f"factor {i}: atoms are three-level systems, got local_dim={dim}"
                    )
            elif kind == "mode":
                if dim < 2:
                    raise DimensionError(
                        f"factor {i}: a truncated mode needs local_dim >= 2, got {dim}"
                    )
            else:
                raise DimensionError(f"factor {i}: unknown factor kind {kind!r}")

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.factors)

    @property
    def total_dim(self) -> int:
        out = 1
        for d in self.dims:
            out *= d
        return out

    def factor_indices(self, kind: str) -> tuple[int, ...]:
        return tuple(i for i, (k, _) in enumerate(self.factors) if k == kind)

    @classmethod
    def two_atoms_two_modes(cls, n_max: int) -> "SpaceDescriptor":
        """Canonical full space: atom_L, atom_R, mode_L, mode_R."""
        if n_max < 1:
            raise DimensionError("n_max must be at least 1")
        m = n_max + 1
        return cls((("atom", ATOM_DIM), ("atom", ATOM_DIM), ("mode", m), ("mode", m)))

    @classmethod
    def two_atoms(cls) -> "SpaceDescriptor":
        return cls((("atom", ATOM_DIM), ("atom", ATOM_DIM)))


@dataclass(frozen=True)
class Operator:
    """Dense operator tagged with the space it acts on."""

    space: SpaceDescriptor
    data: np.ndarray

    def __post_init__(self) -> None:
        data = np.array(self.data, dtype=complex)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise DimensionError(f"operator data must be square, got shape {data.shape}")
        if data.shape[0] != self.space.total_dim:
            raise DimensionError(
                f"operator dimension {data.shape[0]} does not match "
                f"space dimension {self.space.total_dim}"
            )
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.data - self.data.conj().T)))

    def is_hermitian(self, tol: float = HERMITIAN_BUILD_TOL) -> bool:
        return self.hermiticity_defect() <= tol

    def dagger(self) -> "Operator":
        return Operator(self.space, self.data.conj().T)

    def __matmul__(self, other: "Operator") -> "Operator":
        if self.space != other.space:
            raise DimensionError("cannot compose operators on different spaces")
        return Operator(self.space, self.data @ other.data)


@dataclass(frozen=True)
class DensityMatrix:
    """Possibly subnormalized (conditional) state; Hermitian and PSD within tolerance."""

    space: SpaceDescriptor
    data: np.ndarray

    def __post_init__(self) -> None:
        data = np.array(self.data, dtype=complex)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise DimensionError(f"state data must be square, got shape {data.shape}")
        if data.shape[0] != self.space.total_dim:
            raise DimensionError(
                f"state dimension {data.shape[0]} does not match "
                f"space dimension {self.space.total_dim}"
            )
        defect = float(np.max(np.abs(data - data.conj().T)))
        if defect > HERMITIAN_STATE_TOL:
            raise NumericalHealthError(
                f"density matrix is not Hermitian: defect {defect:.3e}"
            )
        tr = complex(np.trace(data)).real
        if tr < -TRACE_TOL or tr > 1.0 + TRACE_TOL:
            raise NumericalHealthError(f"density-matrix trace {tr!r} outside [0, 1]")
        min_eig = float(np.linalg.eigvalsh(0.5 * (data + data.conj().T)).min())
        if min_eig < MIN_EIG_TOL:
            raise NumericalHealthError(
                f"density matrix has negative eigenvalue {min_eig:.3e}"
            )
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    def trace(self) -> float:
        return complex(np.trace(self.data)).real


def annihilator(n_max: int) -> np.ndarray:
    """Truncated bosonic annihilation operator, <n-1|a|n> = sqrt(n)."""
    if n_max < 1:
        raise ValueError(f"n_max must be at least 1, got {n_max}")
    a = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    for n in range(1, n_max + 1):
        a[n - 1, n] = np.sqrt(n)
    return a


def atomic_operators() -> dict[str, np.ndarray]:
    """Single-atom 3x3 operators in the |0>, |1>, |e> basis.

    ``sigma_plus = |e><1|`` and ``sigma_minus = |1><e|``; the dark state
    ``|0>`` is fully decoupled from both.
    """
    ops: dict[str, np.ndarray] = {}
    for name, idx in (("proj_0", KET_0), ("proj_1", KET_1), ("proj_e", KET_E)):
        p = np.zeros((ATOM_DIM, ATOM_DIM), dtype=complex)
        p[idx, idx] = 1.0
        ops[name] = p
    sp = np.zeros((ATOM_DIM, ATOM_DIM), dtype=complex)
    sp[KET_E, KET_1] = 1.0
    ops["sigma_plus"] = sp
    ops["sigma_minus"] = sp.conj().T
    return ops


def embed(local_op: np.ndarray, factor_index: int, space: SpaceDescriptor) -> Operator:
    """Lift a single-factor operator to the full space by Kronecker products."""
    local = np.asarray(local_op, dtype=complex)
    if not 0 <= factor_index < len(space.factors):
        raise DimensionError(
            f"factor index {factor_index} out of range for {len(space.factors)} factors"
        )
    kind, dim = space.factors[factor_index]
    if local.ndim != 2 or local.shape != (dim, dim):
        raise DimensionError(
            f"local operator shape {local.shape} does not match factor "
            f"{factor_index} ({kind}, local_dim={dim})"
        )
    out = np.eye(1, dtype=complex)
    for i, d in enumerate(space.dims):
        out = np.kron(out, local if i == factor_index else np.eye(d, dtype=complex))
    return Operator(space, out)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Trace out all factors not listed in ``keep``; kept factors stay in order."""
    keep_sorted = sorted(set(keep))
    if not keep_sorted:
        raise ValueError("keep must name at least one factor")
    n = len(rho.space.factors)
    for i in keep_sorted:
        if not 0 <= i < n:
            raise ValueError(f"keep index {i} out of range for {n} factors")

    dims = rho.space.dims
    tensor = rho.data.reshape(dims + dims)
    row = [chr(ord("a") + i) for i in range(n)]
    col = [row[i] if i not in keep_sorted else chr(ord("a") + n + i) for i in range(n)]
    out_axes = "".join(row[i] for i in keep_sorted) + "".join(
        col[i] for i in keep_sorted
    )
    reduced = np.einsum("".join(row) + "".join(col) + "->" + out_axes, tensor)

    kept_factors = tuple(rho.space.factors[i] for i in keep_sorted)
    sub_space = SpaceDescriptor(kept_factors)
    d = sub_space.total_dim
    return DensityMatrix(sub_space, reduced.reshape(d, d))


def basis_ket(space: SpaceDescriptor, occupations: Sequence[int]) -> np.ndarray:
    """Product basis vector with the given per-factor level indices."""
    if len(occupations) != len(space.factors):
        raise DimensionError("one occupation index per factor required")
    vec = np.ones(1, dtype=complex)
    for (kind, dim), occ in zip(space.factors, occupations):
        if not 0 <= occ < dim:
            raise DimensionError(f"occupation {occ} out of range for {kind} of dim {dim}")
        local = np.zeros(dim, dtype=complex)
        local[occ] = 1.0
        vec = np.kron(vec, local)
    return vec
