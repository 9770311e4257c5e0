"""Shared test utilities, including the independent state-vector oracle."""

import numpy as np
from scipy.integrate import solve_ivp

from eosim.dynamics import ModelParams, build_hamiltonian


def schrodinger_oracle(params: ModelParams, psi0: np.ndarray, times) -> list[np.ndarray]:
    """Non-Hermitian state-vector evolution via an adaptive integrator.

    Independent of the fixed-step density-matrix code path: at zero
    dephasing, the conditional master equation applied to a pure state must
    match |psi(t)><psi(t)| with dpsi/dt = -i H psi.
    """
    h = build_hamiltonian(params, params.space()).data

    def rhs(_t, psi):
        return -1j * (h @ psi)

    sol = solve_ivp(
        rhs,
        (0.0, float(max(times))),
        psi0.astype(complex),
        t_eval=sorted(times),
        method="DOP853",
        rtol=1e-11,
        atol=1e-13,
    )
    assert sol.success
    return [sol.y[:, i] for i in range(sol.y.shape[1])]


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    diff = a - b
    eigs = np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))
    return 0.5 * float(np.sum(np.abs(eigs)))
