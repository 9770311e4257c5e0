"""Closed-form ideal-model results, used both directly and as numeric oracles.

These assume the dispersive limit (detuning much larger than the coupling),
where a photon dwelling in a cavity whose atom sits in |1> acquires phase
theta = g^2 t / delta and the second half mirror routes even-parity atomic
components entirely to the bright port.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

#: labels of the two-qubit product basis, in amplitude-argument order
BASIS_LABELS = ("00", "01", "10", "11")


@dataclass(frozen=True)
class SourceSpec:
    """Photon-number statistics of an imperfect single-photon source."""

    probabilities: dict[int, float]

    def __post_init__(self) -> None:
        for m, p in self.probabilities.items():
            if m < 0:
                raise ValueError(f"photon multiplicity must be nonnegative, got {m}")
            if p < 0:
                raise ValueError(f"P_{m} must be nonnegative, got {p}")
        if sum(self.probabilities.values()) > 1.0 + 1e-12:
            raise ValueError("source probabilities sum above 1")


def effective_phase(g: float, delta: float, t: float) -> float:
    """Dispersive phase theta = g^2 t / delta acquired by the photon."""
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    return g * g * t / delta


def ideal_success_probability(theta: float) -> float:
    """Herald probability (1/2) sin^2(theta/2); maximal 0.5 at theta = pi."""
    return 0.5 * math.sin(theta / 2.0) ** 2


def ideal_interferometer_state(
    theta: float, atom_amplitudes: tuple[complex, complex, complex, complex]
) -> list[tuple[str, complex, complex]]:
    """Per-basis (label, bright-port, herald-port) amplitude table.

    ``atom_amplitudes`` are the |00>, |01>, |10>, |11> amplitudes of the
    normalized initial two-qubit state. Even-parity components never reach
    the herald port; odd-parity components carry +/- i sin(theta/2).
    """
    a00, a01, a10, a11 = (complex(a) for a in atom_amplitudes)
    norm = abs(a00) ** 2 + abs(a01) ** 2 + abs(a10) ** 2 + abs(a11) ** 2
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"atom amplitudes must be normalized, |a|^2 = {norm:.10g}")
    half = cmath.exp(0.5j * theta)
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return [
        ("00", cmath.exp(1j * theta) * a00, 0.0 + 0.0j),
        ("01", half * c * a01, 1j * half * s * a01),
        ("10", half * c * a10, -1j * half * s * a10),
        ("11", a11, 0.0 + 0.0j),
    ]


def analytic_success_dispersive(delta: float, gamma_cav: float, g: float = 1.0) -> float:
    """Total herald probability in the dispersive, dephasing-free limit.

    Closed form of int_0^inf 2 Gamma e^(-2 Gamma t) * (1/2) sin^2(phi t / 2) dt
    with phi = g^2 / delta:  phi^2 / (4 * (4 Gamma^2 + phi^2)).
    """
    if delta <= 0 or gamma_cav <= 0 or g <= 0:
        raise ValueError("delta, gamma_cav and g must be positive")
    phi = g * g / delta
    return 0.25 * phi * phi / (4.0 * gamma_cav * gamma_cav + phi * phi)


def coherent_leading_order(alpha: float, theta: float) -> tuple[float, float]:
    """Leading-order (fidelity, success probability) for a weak coherent input.

    F = 1 - (1/2)|alpha|^2 sin^2(theta/2) and P = (1/2)|alpha|^2 sin^2(theta/2),
    valid for |alpha|^2 << 1.
    """
    mean_n = abs(alpha) ** 2
    if mean_n > 0.3:
        warnings.warn(
            f"leading-order expansion is unreliable at |alpha|^2 = {mean_n:.3g}",
            stacklevel=2,
        )
    p = 0.5 * mean_n * math.sin(theta / 2.0) ** 2
    return 1.0 - p, p


def source_fidelity_bound(source: SourceSpec) -> float:
    """Worst-case fidelity floor 1 - sum_(m>=2) P_m of an imperfect source."""
    return 1.0 - sum(p for m, p in source.probabilities.items() if m >= 2)
