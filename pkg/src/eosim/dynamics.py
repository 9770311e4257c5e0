"""Conditional (no-click) time evolution of the two-cavity entangling operation.

In the frame rotating at the cavity frequency the Hamiltonian is

    H = sum_j [ Delta |e>_j<e| + g (|e>_j<1| a_j + |1>_j<e| a_j^dag) ]
        - i Gamma (a_L^dag a_L + a_R^dag a_R),        j in {L, R}

whose anti-Hermitian part describes cavity leakage while no detector has
fired, so the density matrix is propagated unnormalized:

    drho/dt = -i (H rho - rho H^dag)
              - lambda sum_j [ |e>_j<e|, [ |e>_j<e|, rho ] ].

The double-commutator dephasing term is trace free (coherences <e|rho|1>
decay as exp(-lambda t) per atom); all trace loss comes from the -i Gamma
term. Integration is fixed-step classical RK4 with per-step
re-symmetrization of rho.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import ConfigurationError, DimensionError, IntegrationError
from .hilbert import (
    DensityMatrix,
    Operator,
    SpaceDescriptor,
    annihilator,
    atomic_operators,
    embed,
)

INPUT_KINDS = ("single_photon", "coherent")
INITIAL_ATOM_CHOICES = ("plus_plus", "s00", "s11", "s01", "s10")

#: allowed per-mode Poisson tail mass beyond the Fock truncation
FOCK_TAIL_LIMIT = 1e-8
#: hard bound on |rho - rho^dag| accumulated in a single step
HERMITICITY_DRIFT_LIMIT = 1e-8
#: the trace may not grow by more than this in one step
TRACE_INCREASE_LIMIT = 1e-9


def poisson_tail(mean: float, n_max: int) -> float:
    """Probability mass of a Poisson(mean) variable strictly above n_max."""
    if mean <= 0.0:
        return 0.0
    cdf = sum(mean**k / math.factorial(k) for k in range(n_max + 1))
    return max(0.0, 1.0 - math.exp(-mean) * cdf)


def min_n_max_for_coherent(alpha: float) -> int:
    """Smallest truncation whose per-mode tail mass is below FOCK_TAIL_LIMIT.

    Each cavity receives amplitude alpha / sqrt(2), i.e. mean photon
    number |alpha|^2 / 2 per mode.
    """
    mean = abs(alpha) ** 2 / 2.0
    n = 1
    while poisson_tail(mean, n) >= FOCK_TAIL_LIMIT:
        n += 1
    return n


@dataclass
class ModelParams:
    """All physical rates in units of the atom-cavity coupling g."""

    delta: float
    gamma_cav: float
    lambda_deph: float = 0.0
    n_max: int = 1
    input_kind: str = "single_photon"
    alpha: float = 0.0
    initial_atoms: str | Sequence[complex] = "plus_plus"
    g: float = 1.0

    def __post_init__(self) -> None:
        if self.g <= 0:
            raise ConfigurationError(f"g must be positive, got {self.g}")
        if self.delta <= 0:
            raise ConfigurationError(f"delta must be positive, got {self.delta}")
        if self.gamma_cav <= 0:
            raise ConfigurationError(f"gamma_cav must be positive, got {self.gamma_cav}")
        if self.lambda_deph < 0:
            raise ConfigurationError(
                f"lambda_deph must be nonnegative, got {self.lambda_deph}"
            )
        if self.input_kind not in INPUT_KINDS:
            raise ConfigurationError(
                f"input_kind must be one of {INPUT_KINDS}, got {self.input_kind!r}"
            )
        if self.input_kind == "single_photon":
            # exactly one photon ever present; higher Fock levels are dead weight
            self.n_max = 1
        else:
            if self.alpha <= 0:
                raise ConfigurationError("coherent input requires alpha > 0")
            self.n_max = int(self.n_max)
            if self.n_max < 1:
                raise ConfigurationError(f"n_max must be at least 1, got {self.n_max}")
            tail = poisson_tail(abs(self.alpha) ** 2 / 2.0, self.n_max)
            if tail >= FOCK_TAIL_LIMIT:
                raise ConfigurationError(
                    f"Fock truncation n_max={self.n_max} leaves per-mode tail mass "
                    f"{tail:.2e} >= {FOCK_TAIL_LIMIT:g}; raise n_max "
                    f"(n_max={min_n_max_for_coherent(self.alpha)} suffices for "
                    f"alpha={self.alpha})"
                )
        if isinstance(self.initial_atoms, str):
            if self.initial_atoms not in INITIAL_ATOM_CHOICES:
                raise ConfigurationError(
                    f"initial_atoms must be one of {INITIAL_ATOM_CHOICES} "
                    f"or a 9-component vector, got {self.initial_atoms!r}"
                )
        else:
            vec = np.asarray(self.initial_atoms, dtype=complex).reshape(-1)
            if vec.size != 9:
                raise ConfigurationError(
                    f"custom initial_atoms must have 9 components, got {vec.size}"
                )
            norm = float(np.linalg.norm(vec))
            if norm < 1e-12:
                raise ConfigurationError("custom initial_atoms vector is null")
            self.initial_atoms = vec / norm

    def space(self) -> SpaceDescriptor:
        return SpaceDescriptor.two_atoms_two_modes(self.n_max)

    def default_dt(self) -> float:
        """About 50 RK4 steps per period of the fastest rotating-frame rate."""
        return 0.02 / max(self.delta, self.g, self.gamma_cav, self.lambda_deph)

    def default_t_max(self) -> float:
        """Integrate until the cavity amplitude has decayed to exp(-8)."""
        return 8.0 / (2.0 * self.gamma_cav)


def build_hamiltonian(params: ModelParams, space: SpaceDescriptor) -> Operator:
    """Non-Hermitian Hamiltonian in the frame rotating at the cavity frequency.

    The anti-Hermitian part is exactly ``-i * gamma_cav * (n_L + n_R)``.
    """
    if space != params.space():
        raise DimensionError(
            "space does not match params (expect two atoms and two modes "
            f"with n_max={params.n_max})"
        )
    ops = atomic_operators()
    a_local = annihilator(params.n_max)
    h = np.zeros((space.total_dim, space.total_dim), dtype=complex)
    for atom_idx, mode_idx in ((0, 2), (1, 3)):
        proj_e = embed(ops["proj_e"], atom_idx, space).data
        sp = embed(ops["sigma_plus"], atom_idx, space).data
        a = embed(a_local, mode_idx, space).data
        h = h + params.delta * proj_e
        h = h + params.g * (sp @ a + sp.conj().T @ a.conj().T)
        h = h - 1j * params.gamma_cav * (a.conj().T @ a)
    return Operator(space, h)


def total_photon_number(space: SpaceDescriptor) -> np.ndarray:
    """n_L + n_R lifted to the full space."""
    n = np.zeros((space.total_dim, space.total_dim), dtype=complex)
    for mode_idx in space.factor_indices("mode"):
        a = embed(annihilator(space.dims[mode_idx] - 1), mode_idx, space).data
        n = n + a.conj().T @ a
    return n


def dephasing_mask(space: SpaceDescriptor, lambda_deph: float) -> np.ndarray:
    """Elementwise decay rates of the double-commutator dephasing term.

    For diagonal projectors P the dissipator -lambda [P, [P, rho]] reduces
    to an entrywise multiplication: entry (i, k) decays at
    lambda * (d_i + d_k - 2 d_i d_k) with d the diagonal of P.
    """
    mask = np.zeros((space.total_dim, space.total_dim), dtype=float)
    proj_e = atomic_operators()["proj_e"]
    for atom_idx in space.factor_indices("atom"):
        d = np.real(np.diag(embed(proj_e, atom_idx, space).data))
        mask += lambda_deph * (d[:, None] + d[None, :] - 2.0 * d[:, None] * d[None, :])
    return mask


def lindblad_rhs(
    rho: DensityMatrix | np.ndarray, hamiltonian: Operator, lambda_deph: float
) -> np.ndarray:
    """drho/dt for the non-Hermitian Hamiltonian plus dephasing."""
    r = rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    h = hamiltonian.data
    if r.shape != h.shape:
        raise ValueError(f"state shape {r.shape} does not match Hamiltonian {h.shape}")
    mask = dephasing_mask(hamiltonian.space, lambda_deph)
    return -1j * (h @ r - r @ h.conj().T) - mask * r


@dataclass
class EvolutionResult:
    """Streamed observables of one conditional-evolution run."""

    times: np.ndarray
    trace: np.ndarray
    expectations: dict[str, np.ndarray]
    #: full-resolution trapezoidal integrals of each expectation over [0, t_end]
    integrals: dict[str, float]
    final_state: DensityMatrix
    steps_accepted: int
    max_hermiticity_drift: float


@dataclass
class Trajectory:
    """Time series of the protocol observables (filled in by run_protocol)."""

    times: np.ndarray
    pc: np.ndarray
    fidelity: np.ndarray
    trace: np.ndarray
    steps_accepted: int
    max_hermiticity_drift: float


def evolve(
    rho0: DensityMatrix,
    params: ModelParams,
    t_end: float,
    dt: float,
    *,
    observables: Mapping[str, np.ndarray] | None = None,
    record_stride: int = 1,
    probe: Callable[[float, np.ndarray], None] | None = None,
) -> EvolutionResult:
    """Fixed-step RK4 integration of the conditional master equation.

    Only streamed observables and the current state are kept; no density
    matrix snapshots are stored. ``probe``, if given, is called after every
    accepted step with ``(t, rho)`` where ``rho`` must be treated read-only.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t_end <= 0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    if record_stride < 1:
        raise ValueError(f"record_stride must be at least 1, got {record_stride}")
    space = params.space()
    if rho0.space != space:
        raise DimensionError("initial state does not live on the model's space")

    h = build_hamiltonian(params, space).data
    b = -1j * h  # rhs(r) = b r + r b^dag - mask * r
    bd = b.conj().T
    mask = dephasing_mask(space, params.lambda_deph)

    names = list((observables or {}).keys())
    # stacked transposes: Tr[O r] = sum(O^T * r), evaluated as one einsum
    obs_t = (
        np.stack([np.asarray(observables[n], dtype=complex).T for n in names])
        if names
        else np.zeros((0, space.total_dim, space.total_dim), dtype=complex)
    )

    def expect_all(r: np.ndarray) -> np.ndarray:
        return np.einsum("kij,ij->k", obs_t, r).real

    n_steps = max(1, math.ceil(t_end / dt - 1e-9))
    d = space.total_dim
    r = np.array(rho0.data, dtype=complex)
    k1, k2, k3, k4, y, t1, t2 = (np.empty((d, d), dtype=complex) for _ in range(7))

    def rhs_into(out: np.ndarray, x: np.ndarray) -> None:
        np.matmul(b, x, out=t1)
        np.matmul(x, bd, out=t2)
        np.add(t1, t2, out=out)
        np.multiply(mask, x, out=t1)
        out -= t1

    times = [0.0]
    traces = [float(np.trace(r).real)]
    recorded = [expect_all(r)]
    integrals = np.zeros(len(names))
    vals = recorded[0]

    max_drift = 0.0
    tr_prev = traces[0]
    for step in range(1, n_steps + 1):
        rhs_into(k1, r)
        np.multiply(k1, 0.5 * dt, out=y)
        y += r
        rhs_into(k2, y)
        np.multiply(k2, 0.5 * dt, out=y)
        y += r
        rhs_into(k3, y)
        np.multiply(k3, dt, out=y)
        y += r
        rhs_into(k4, y)
        # r += (dt/6) (k1 + 2 k2 + 2 k3 + k4)
        np.add(k2, k3, out=k2)
        k2 *= 2.0
        k1 += k4
        k1 += k2
        k1 *= dt / 6.0
        r += k1

        t = step * dt
        np.conjugate(r.T, out=t1)
        np.subtract(r, t1, out=t2)
        drift = float(np.abs(t2).max())
        if drift > HERMITICITY_DRIFT_LIMIT:
            raise IntegrationError(
                f"Hermiticity drift {drift:.3e} > {HERMITICITY_DRIFT_LIMIT:g} "
                f"at step {step} (t={t:.6g}, dt={dt:.3g})"
            )
        max_drift = max(max_drift, drift)
        r += t1
        r *= 0.5

        tr = float(np.trace(r).real)
        if tr > tr_prev + TRACE_INCREASE_LIMIT:
            raise IntegrationError(
                f"trace increased by {tr - tr_prev:.3e} > {TRACE_INCREASE_LIMIT:g} "
                f"at step {step} (t={t:.6g}, dt={dt:.3g})"
            )
        new_vals = expect_all(r)
        integrals += (0.5 * dt) * (vals + new_vals)
        vals = new_vals
        tr_prev = tr

        if probe is not None:
            probe(t, r)
        if step % record_stride == 0 or step == n_steps:
            times.append(t)
            traces.append(tr)
            recorded.append(vals)

    final = DensityMatrix(space, r)
    recorded_arr = np.asarray(recorded)
    return EvolutionResult(
        times=np.asarray(times),
        trace=np.asarray(traces),
        expectations={name: recorded_arr[:, i] for i, name in enumerate(names)},
        integrals={name: float(integrals[i]) for i, name in enumerate(names)},
        final_state=final,
        steps_accepted=n_steps,
        max_hermiticity_drift=max_drift,
    )
