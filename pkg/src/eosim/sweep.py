"""Parameter scans over detuning and normalized cavity decay rate.

The scan axis is the normalized decay rate gamma_norm = Gamma / ((1/pi) g^2
/ delta); gamma_norm = 1 is the point where the accumulated dispersive phase
per cavity lifetime is pi. Individual failed points are recorded per row and
do not abort the sweep.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .dynamics import ModelParams
from .errors import ConfigurationError, EoSimError
from .protocol import run_protocol

DEFAULT_DELTAS = (15.0, 20.0, 25.0, 30.0)
DEFAULT_GAMMA_NORMS = tuple(0.25 * k for k in range(1, 13))  # 0.25 .. 3.0
WORKERS_ENV_VAR = "EOSIM_WORKERS"

#: rows recorded per trajectory are thinned to bound sweep memory
SWEEP_RECORD_STRIDE = 256


def gamma_from_normalized(gamma_norm: float, delta: float, g: float = 1.0) -> float:
    """Reconstruct the cavity decay rate Gamma from its normalized value."""
    return gamma_norm * g * g / (math.pi * delta)


@dataclass
class SweepSpec:
    """Grid definition for one sweep; defaults bracket the reference scan."""

    deltas: tuple[float, ...] = DEFAULT_DELTAS
    gamma_norms: tuple[float, ...] = DEFAULT_GAMMA_NORMS
    lambda_deph: float = 1.0
    input_kind: str = "single_photon"
    alpha: float = 0.0
    n_max: int = 1
    workers: int | None = None
    #: optional fixed integrator step; None means each point's default
    dt: float | None = None
    #: optional per-point step dt = dt_scale / delta; ignored when dt is set
    dt_scale: float | None = None

    def __post_init__(self) -> None:
        self.deltas = tuple(float(d) for d in self.deltas)
        self.gamma_norms = tuple(float(x) for x in self.gamma_norms)
        if not self.deltas or not self.gamma_norms:
            raise ConfigurationError("sweep grids must be nonempty")
        if any(d <= 0 for d in self.deltas):
            raise ConfigurationError("all deltas must be positive")
        if any(x <= 0 for x in self.gamma_norms):
            raise ConfigurationError("all gamma_norm values must be positive")
        if self.dt is not None and self.dt <= 0:
            raise ConfigurationError("dt must be positive")
        if self.dt_scale is not None and self.dt_scale <= 0:
            raise ConfigurationError("dt_scale must be positive")

    def point_dt(self, delta: float) -> float | None:
        if self.dt is not None:
            return self.dt
        if self.dt_scale is not None:
            return self.dt_scale / delta
        return None


@dataclass
class SweepRow:
    delta: float
    gamma_norm: float
    f_average: float
    p_total: float
    status: str


def default_worker_count() -> int:
    env = os.environ.get(WORKERS_ENV_VAR)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _run_point(args: tuple) -> SweepRow:
    delta, gamma_norm, lambda_deph, input_kind, alpha, n_max, dt = args
    try:
        params = ModelParams(
            delta=delta,
            gamma_cav=gamma_from_normalized(gamma_norm, delta),
            lambda_deph=lambda_deph,
            input_kind=input_kind,
            alpha=alpha,
            n_max=n_max,
        )
        _, summary = run_protocol(params, dt=dt, record_stride=SWEEP_RECORD_STRIDE)
        return SweepRow(delta, gamma_norm, summary.f_average, summary.p_total, "ok")
    except (EoSimError, ValueError) as exc:
        message = str(exc).replace(",", ";").replace("\n", " ")
        return SweepRow(delta, gamma_norm, math.nan, math.nan, f"error: {message}")


def run_sweep(spec: SweepSpec) -> list[SweepRow]:
    """One protocol run per grid point, tabulated delta-major, gamma ascending."""
    points = [
        (d, gn, spec.lambda_deph, spec.input_kind, spec.alpha, spec.n_max,
         spec.point_dt(d))
        for d in sorted(spec.deltas)
        for gn in sorted(spec.gamma_norms)
    ]
    workers = spec.workers if spec.workers is not None else default_worker_count()
    if workers <= 1 or len(points) == 1:
        return [_run_point(p) for p in points]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_point, points))


def write_sweep_csv(rows: list[SweepRow], path) -> None:
    """CSV with header delta,gamma_norm,f_average,p_total,status and LF endings."""
    with open(path, "w", newline="\n") as fh:
        fh.write("delta,gamma_norm,f_average,p_total,status\n")
        for row in rows:
            fh.write(
                f"{row.delta:.9g},{row.gamma_norm:.9g},"
                f"{row.f_average:.9g},{row.p_total:.9g},{row.status}\n"
            )
