"""The heralded entangling operation end to end.

Pipeline: prepare atoms and photon(s) (the first half mirror is folded into
the preparation), evolve the conditional state, and read out

* the click density P_c(t) = 2 Gamma <a_R'^dag a_R'> at the dark output
  port a_R' = (a_L - a_R) / sqrt(2),
* the post-click fidelity F(t) with the odd-parity Bell state
  (|01> - |10>) / sqrt(2),
* the conditional success average F_average = int P_c F dt / int P_c dt
  and the total success probability P_total = int P_c dt.

A detector event applies a_R' once and the photon modes are traced out;
photon-number-resolved detection is not modeled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    ModelParams,
    Trajectory,
    evolve,
    total_photon_number,
)
from .errors import (
    ConditionalStateError,
    DimensionError,
    NumericalHealthError,
)
from .hilbert import (
    DensityMatrix,
    Operator,
    SpaceDescriptor,
    annihilator,
    embed,
    partial_trace,
)

#: two-atom product-basis index of |ij> with atom basis |0>, |1>, |e>
_IDX_01 = 1  # 3 * 0 + 1
_IDX_10 = 3  # 3 * 1 + 0

#: click rates more negative than this trip a numerical-health error
CLICK_NEGATIVE_TOL = -1e-12
#: below this click weight the conditional fidelity is reported as 0
CLICK_WEIGHT_FLOOR = 1e-18


@dataclass(frozen=True)
class BellTargets:
    """The odd-parity Bell vectors on the 9-dim two-atom space."""

    psi_minus: np.ndarray
    psi_plus: np.ndarray


def bell_targets() -> BellTargets:
    minus = np.zeros(9, dtype=complex)
    plus = np.zeros(9, dtype=complex)
    s = 1.0 / math.sqrt(2.0)
    minus[_IDX_01], minus[_IDX_10] = s, -s
    plus[_IDX_01], plus[_IDX_10] = s, s
    return BellTargets(psi_minus=minus, psi_plus=plus)


@dataclass
class RunSummary:
    """Headline numbers plus the integration metadata of one run."""

    f_average: float
    p_total: float
    params: ModelParams
    t_max: float
    dt: float
    truncated_tail_bound: float
    max_hermiticity_drift: float
    steps_accepted: int


def _atom_vector(params: ModelParams) -> np.ndarray:
    if not isinstance(params.initial_atoms, str):
        return np.asarray(params.initial_atoms, dtype=complex)
    vec = np.zeros(9, dtype=complex)
    if params.initial_atoms == "plus_plus":
        # (|0> + |1>)/sqrt(2) per atom
        for idx in (0, _IDX_01, _IDX_10, 4):
            vec[idx] = 0.5
    elif params.initial_atoms == "s00":
        vec[0] = 1.0
    elif params.initial_atoms == "s01":
        vec[_IDX_01] = 1.0
    elif params.initial_atoms == "s10":
        vec[_IDX_10] = 1.0
    else:  # s11
        vec[4] = 1.0
    return vec


def _photon_vector(params: ModelParams) -> np.ndarray:
    m = params.n_max + 1
    if params.input_kind == "single_photon":
        # the first half mirror has already split the photon symmetrically
        vec = np.zeros(m * m, dtype=complex)
        vec[1 * m + 0] = 1.0 / math.sqrt(2.0)  # |1>_L |0>_R
        vec[0 * m + 1] = 1.0 / math.sqrt(2.0)  # |0>_L |1>_R
        return vec
    beta = params.alpha / math.sqrt(2.0)
    local = np.array(
        [beta**n / math.sqrt(math.factorial(n)) for n in range(m)], dtype=complex
    )
    local *= math.exp(-abs(beta) ** 2 / 2.0)
    local /= np.linalg.norm(local)  # renormalize the truncated ladder
    return np.kron(local, local)


def prepare_initial_state(params: ModelParams, space: SpaceDescriptor) -> DensityMatrix:
    """Atoms in the selected state, photons already behind the first mirror."""
    if space != params.space():
        raise DimensionError("space does not match params")
    psi = np.kron(_atom_vector(params), _photon_vector(params))
    return DensityMatrix(space, np.outer(psi, psi.conj()))


def _split_modes(space: SpaceDescriptor) -> tuple[np.ndarray, np.ndarray]:
    mode_idx = space.factor_indices("mode")
    if len(mode_idx) != 2:
        raise DimensionError("space must carry exactly two photon modes")
    ops = []
    for i in mode_idx:
        ops.append(embed(annihilator(space.dims[i] - 1), i, space).data)
    return ops[0], ops[1]


def detector_jump_operator(space: SpaceDescriptor) -> Operator:
    """a_R' = (a_L - a_R) / sqrt(2): the herald port behind the second mirror."""
    a_l, a_r = _split_modes(space)
    return Operator(space, (a_l - a_r) / math.sqrt(2.0))


def bright_port_operator(space: SpaceDescriptor) -> Operator:
    """a_L' = (a_L + a_R) / sqrt(2): the failure port, kept for diagnostics."""
    a_l, a_r = _split_modes(space)
    return Operator(space, (a_l + a_r) / math.sqrt(2.0))


def click_density(rho: DensityMatrix, gamma_cav: float) -> float:
    """Herald rate 2 Gamma <a_R'^dag a_R'>, in probability per unit time."""
    a_rp = detector_jump_operator(rho.space).data
    value = float(np.einsum("ij,ji->", a_rp.conj().T @ a_rp, rho.data).real)
    rate = 2.0 * gamma_cav * value
    if rate < CLICK_NEGATIVE_TOL:
        raise NumericalHealthError(f"negative click density {rate:.3e}")
    return rate


def post_click_atom_state(rho: DensityMatrix) -> DensityMatrix:
    """Two-atom state after a click: apply a_R', trace out modes, normalize."""
    a_rp = detector_jump_operator(rho.space).data
    projected = a_rp @ rho.data @ a_rp.conj().T
    weight = float(np.trace(projected).real)
    if weight <= 0.0:
        raise ConditionalStateError(
            "click has zero probability; conditional state undefined"
        )
    atoms = partial_trace(
        DensityMatrix(rho.space, projected), keep=rho.space.factor_indices("atom")
    )
    return DensityMatrix(atoms.space, atoms.data / weight)


def fidelity_vs_target(rho_atoms: DensityMatrix, targets: BellTargets | None = None) -> float:
    """Overlap <psi_minus| rho |psi_minus> of a normalized two-atom state."""
    if targets is None:
        targets = bell_targets()
    if rho_atoms.data.shape != (9, 9):
        raise ValueError("fidelity is defined on the 9-dim two-atom space")
    if abs(rho_atoms.trace() - 1.0) > 1e-8:
        raise ValueError(
            f"state must be normalized, trace is {rho_atoms.trace():.10g}"
        )
    v = targets.psi_minus
    return float((v.conj() @ rho_atoms.data @ v).real)


def run_protocol(
    params: ModelParams,
    *,
    dt: float | None = None,
    t_max: float | None = None,
    record_stride: int = 1,
) -> tuple[Trajectory, RunSummary]:
    """Evolve the prepared state and accumulate the heralding statistics."""
    space = params.space()
    if dt is None:
        dt = params.default_dt()
    if t_max is None:
        t_max = params.default_t_max()

    rho0 = prepare_initial_state(params, space)
    a_rp = detector_jump_operator(space).data
    n_rp = a_rp.conj().T @ a_rp
    # Tr[P_bell a_R' rho a_R'^dag] = Tr[(a_R'^dag P_bell a_R') rho]
    targets = bell_targets()
    p_bell_atoms = np.outer(targets.psi_minus, targets.psi_minus.conj())
    modes_dim = (params.n_max + 1) ** 2
    p_bell = np.kron(p_bell_atoms, np.eye(modes_dim, dtype=complex))
    k_fid = a_rp.conj().T @ p_bell @ a_rp
    n_tot = total_photon_number(space)

    res = evolve(
        rho0,
        params,
        t_max,
        dt,
        observables={"n_rp": n_rp, "k_fid": k_fid, "n_tot": n_tot},
        record_stride=record_stride,
    )

    two_gamma = 2.0 * params.gamma_cav
    n_rp_arr = res.expectations["n_rp"]
    pc = two_gamma * n_rp_arr
    if pc.min() < CLICK_NEGATIVE_TOL:
        raise NumericalHealthError(f"negative click density {pc.min():.3e}")
    with np.errstate(divide="ignore", invalid="ignore"):
        fidelity = np.where(
            n_rp_arr > CLICK_WEIGHT_FLOOR,
            res.expectations["k_fid"] / np.where(n_rp_arr > 0, n_rp_arr, 1.0),
            0.0,
        )

    p_total = two_gamma * res.integrals["n_rp"]
    weighted = two_gamma * res.integrals["k_fid"]
    f_average = weighted / p_total if p_total > 1e-15 else 0.0

    traj = Trajectory(
        times=res.times,
        pc=pc,
        fidelity=fidelity,
        trace=res.trace,
        steps_accepted=res.steps_accepted,
        max_hermiticity_drift=res.max_hermiticity_drift,
    )
    summary = RunSummary(
        f_average=f_average,
        p_total=p_total,
        params=params,
        t_max=res.times[-1],
        dt=dt,
        truncated_tail_bound=res.expectations["n_tot"][-1],
        max_hermiticity_drift=res.max_hermiticity_drift,
        steps_accepted=res.steps_accepted,
    )
    return traj, summary
