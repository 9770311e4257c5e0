"""Command-line front end: run, sweep and ideal subcommands.

Config files are UTF-8 ``key = value`` lines with ``#`` comments; a summary
JSON written by ``run`` is also accepted as a config file, so a run can be
reproduced from its own output. Flags win over config-file values.

Exit codes: 0 success, 2 invalid configuration or arguments, 3 integration
or numerical-health failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .analytic import (
    SourceSpec,
    coherent_leading_order,
    effective_phase,
    ideal_success_probability,
    source_fidelity_bound,
)
from .dynamics import ModelParams, Trajectory, min_n_max_for_coherent
from .errors import (
    ConfigurationError,
    EoSimError,
    IntegrationError,
    NumericalHealthError,
)
from .protocol import RunSummary, run_protocol
from .sweep import SweepSpec, run_sweep, write_sweep_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INTEGRATION = 3

_RUN_KEY_TYPES = {
    "input_kind": str,
    "alpha": float,
    "delta": float,
    "gamma_cav": float,
    "lambda_deph": float,
    "g": float,
    "n_max": int,
    "initial_atoms": str,
    "dt": float,
    "t_max": float,
    "output_dir": str,
    "emit_trajectory": bool,
}


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise ConfigurationError(f"cannot parse boolean value {text!r}")


def parse_angle(token: str) -> float:
    """Angle as a number or the literal tokens ``pi`` / ``pi/2``."""
    text = token.strip().lower()
    if text == "pi":
        return math.pi
    if text == "pi/2":
        return math.pi / 2.0
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse angle {token!r}") from None


def load_config(path: str | Path) -> dict:
    """key = value lines (or a flat JSON object); unknown keys are ignored."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"invalid JSON config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigurationError(f"config {path} must be a JSON object")
        return raw
    entries: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigurationError(f"{path}:{lineno}: expected 'key = value'")
        key, value = body.split("=", 1)
        entries[key.strip()] = value.strip()
    return entries


def _coerce(key: str, value, kind):
    if kind is bool:
        return value if isinstance(value, bool) else _parse_bool(str(value))
    try:
        return kind(value)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"config key {key}: cannot parse {value!r}") from exc


def _resolved(args: argparse.Namespace, config: dict, key: str, default=None):
    """Precedence: command-line flag, then config file, then default."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in config and config[key] is not None:
        return _coerce(key, config[key], _RUN_KEY_TYPES.get(key, str))
    return default


def _summary_dict(summary: RunSummary) -> dict:
    p = summary.params
    atoms = p.initial_atoms
    if not isinstance(atoms, str):
        atoms = [repr(complex(a)) for a in atoms]
    return {
        "input_kind": p.input_kind,
        "alpha": p.alpha,
        "delta": p.delta,
        "gamma_cav": p.gamma_cav,
        "lambda_deph": p.lambda_deph,
        "g": p.g,
        "n_max": p.n_max,
        "initial_atoms": atoms,
        "dt": summary.dt,
        "t_max": summary.t_max,
        "f_average": summary.f_average,
        "p_total": summary.p_total,
        "truncated_tail_bound": summary.truncated_tail_bound,
        "max_hermiticity_drift": summary.max_hermiticity_drift,
    }


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """CSV with header t,pc,fidelity,trace; 9 significant digits, LF endings."""
    with open(path, "w", newline="\n") as fh:
        fh.write("t,pc,fidelity,trace\n")
        for t, pc, f, tr in zip(traj.times, traj.pc, traj.fidelity, traj.trace):
            fh.write(f"{t:.9g},{pc:.9g},{f:.9g},{tr:.9g}\n")


def cmd_run(args: argparse.Namespace) -> int:
    config = load_config(args.config) if args.config else {}

    g = _resolved(args, config, "g", 1.0)
    delta = _resolved(args, config, "delta", 20.0)
    input_kind = _resolved(args, config, "input_kind", "single_photon")
    alpha = _resolved(args, config, "alpha", 0.0)
    gamma_cav = _resolved(args, config, "gamma_cav")
    if gamma_cav is None:
        gamma_cav = g * g / (math.pi * delta)
    n_max = _resolved(args, config, "n_max")
    if n_max is None:
        n_max = min_n_max_for_coherent(alpha) if input_kind == "coherent" else 1

    params = ModelParams(
        delta=delta,
        gamma_cav=gamma_cav,
        lambda_deph=_resolved(args, config, "lambda_deph", 0.1),
        n_max=n_max,
        input_kind=input_kind,
        alpha=alpha,
        initial_atoms=_resolved(args, config, "initial_atoms", "plus_plus"),
        g=g,
    )
    dt = _resolved(args, config, "dt")
    t_max = _resolved(args, config, "t_max")

    output_dir = Path(_resolved(args, config, "output_dir", "."))
    output_dir.mkdir(parents=True, exist_ok=True)
    emit_trajectory = bool(_resolved(args, config, "emit_trajectory", False))

    traj, summary = run_protocol(params, dt=dt, t_max=t_max, record_stride=args.stride)

    summary_path = output_dir / "summary.json"
    summary_path.write_text(
        json.dumps(_summary_dict(summary), indent=2) + "\n", encoding="utf-8"
    )
    if emit_trajectory:
        write_trajectory_csv(traj, output_dir / "trajectory.csv")
    if args.plot:
        from .plotting import save_trajectory_plot

        save_trajectory_plot(traj, output_dir / "trajectory.png")

    print(f"F_average = {summary.f_average:.6g}")
    print(f"P_total = {summary.p_total:.6g}")
    return EXIT_OK


def _parse_float_list(value) -> tuple[float, ...]:
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    parts = [p for p in str(value).replace(",", " ").split() if p]
    return tuple(float(p) for p in parts)


def cmd_sweep(args: argparse.Namespace) -> int:
    config = load_config(args.spec) if args.spec else {}
    kwargs: dict = {}
    if "deltas" in config:
        kwargs["deltas"] = _parse_float_list(config["deltas"])
    if "gamma_norms" in config:
        kwargs["gamma_norms"] = _parse_float_list(config["gamma_norms"])
    if "lambda_deph" in config:
        kwargs["lambda_deph"] = float(config["lambda_deph"])
    if "input_kind" in config:
        kwargs["input_kind"] = str(config["input_kind"])
    if "alpha" in config:
        kwargs["alpha"] = float(config["alpha"])
    if "n_max" in config:
        kwargs["n_max"] = int(config["n_max"])
    if "dt" in config:
        kwargs["dt"] = float(config["dt"])
    if "dt_scale" in config:
        kwargs["dt_scale"] = float(config["dt_scale"])
    if args.workers is not None:
        kwargs["workers"] = args.workers
    elif "workers" in config:
        kwargs["workers"] = int(config["workers"])

    spec = SweepSpec(**kwargs)
    rows = run_sweep(spec)

    output = Path(args.output or config.get("output", "sweep.csv"))
    if output.parent != Path(""):
        output.parent.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(rows, output)
    for row in rows:
        if row.status != "ok":
            print(
                f"sweep point delta={row.delta:g} gamma_norm={row.gamma_norm:g}: "
                f"{row.status}",
                file=sys.stderr,
            )
    if args.plot:
        from .plotting import save_sweep_plot

        save_sweep_plot(rows, output.with_suffix(".png"))
    return EXIT_OK


def _parse_source_term(token: str) -> tuple[int, float]:
    try:
        m_text, p_text = token.split(":", 1)
        return int(m_text), float(p_text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected m:probability, got {token!r}"
        ) from None


def cmd_ideal(args: argparse.Namespace) -> int:
    if args.ideal_command == "phase":
        print(f"{effective_phase(args.g, args.delta, args.t):.6g}")
    elif args.ideal_command == "success":
        print(f"{ideal_success_probability(args.theta):.6g}")
    elif args.ideal_command == "coherent":
        f, p = coherent_leading_order(args.alpha, args.theta)
        print(f"F={f:.6g} P={p:.6g}")
    else:  # source-bound
        source = SourceSpec(probabilities=dict(args.p))
        print(f"{source_fidelity_bound(source):.6g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eosim",
        description="Simulator of the dispersive heralded entangling operation "
        "between two cavity-coupled matter qubits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="single protocol run (defaults: the headline "
                         "single-photon scenario)")
    run.add_argument("--config", help="key = value config file (or a summary JSON)")
    run.add_argument("--delta", type=float, help="detuning in units of g")
    run.add_argument("--gamma", dest="gamma_cav", type=float,
                     help="cavity decay rate Gamma (default g^2 / (pi delta))")
    run.add_argument("--lambda", dest="lambda_deph", type=float,
                     help="dephasing rate of the excited state")
    run.add_argument("--g", type=float, help="atom-cavity coupling (rate unit)")
    run.add_argument("--input", dest="input_kind",
                     choices=("single_photon", "coherent"))
    run.add_argument("--alpha", type=float, help="coherent-state amplitude")
    run.add_argument("--n-max", dest="n_max", type=int, help="Fock truncation per mode")
    run.add_argument("--initial-atoms", dest="initial_atoms",
                     choices=("plus_plus", "s00", "s11", "s01", "s10"))
    run.add_argument("--dt", type=float, help="integrator step (units 1/g)")
    run.add_argument("--t-max", dest="t_max", type=float, help="integration horizon")
    run.add_argument("--output-dir", dest="output_dir", help="directory for outputs")
    run.add_argument("--trajectory", dest="emit_trajectory", action="store_const",
                     const=True, help="also write trajectory.csv")
    run.add_argument("--plot", action="store_true", help="render trajectory.png")
    run.add_argument("--stride", type=int, default=1,
                     help="record every N-th integrator sample (default 1)")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="grid scan over detuning and decay rate")
    sweep.add_argument("spec", nargs="?", help="sweep spec file (key = value)")
    sweep.add_argument("--output", help="sweep CSV path (default sweep.csv)")
    sweep.add_argument("--workers", type=int, help="parallel worker count "
                       "(default from EOSIM_WORKERS or CPU count)")
    sweep.add_argument("--plot", action="store_true", help="also render a PNG")
    sweep.set_defaults(func=cmd_sweep)

    ideal = sub.add_parser("ideal", help="closed-form ideal-model values")
    isub = ideal.add_subparsers(dest="ideal_command", required=True)

    phase = isub.add_parser("phase", help="dispersive phase g^2 t / delta")
    phase.add_argument("--g", type=float, default=1.0)
    phase.add_argument("--delta", type=float, required=True)
    phase.add_argument("--t", type=float, required=True)

    success = isub.add_parser("success", help="herald probability (1/2) sin^2(theta/2)")
    success.add_argument("--theta", type=parse_angle, required=True)

    coherent = isub.add_parser("coherent", help="weak-coherent leading-order F and P")
    coherent.add_argument("--alpha", type=float, required=True)
    coherent.add_argument("--theta", type=parse_angle, required=True)

    bound = isub.add_parser("source-bound", help="fidelity floor of an imperfect source")
    bound.add_argument("--p", type=_parse_source_term, action="append", required=True,
                       metavar="M:PROB", help="emission probability P_m (repeatable)")

    ideal.set_defaults(func=cmd_ideal)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (IntegrationError, NumericalHealthError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except (EoSimError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
