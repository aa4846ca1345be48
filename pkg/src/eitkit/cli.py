"""Command-line front end: one subcommand per experiment, CSV output.

Parameter precedence is CLI flag > config file > built-in default. Config files
hold ``key = value`` lines with ``#`` comments.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from . import dof, mutual_info, nearfield, planewave
from .errors import EITError, NumericalError, ValidationError
from .geometry import Region, box, uniform_grid
from .kernels import WaveParams

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2


class ConfigError(ValidationError):
    pass


# ---------------------------------------------------------------------------
# parameter schemas


def _floats(text: str) -> tuple:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _ints(text: str) -> tuple:
    return tuple(int(v) for v in text.split(",") if v.strip())


def _bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(text)


_TYPE_NAMES = {float: "float", int: "integer", _bool: "boolean",
               _floats: "comma-separated floats", _ints: "comma-separated integers", str: "string"}


def _positive(v):
    return all(x > 0 for x in v) if isinstance(v, tuple) else v > 0


def _nonneg(v):
    return all(x >= 0 for x in v) if isinstance(v, tuple) else v >= 0


def _unit_interval(v):
    return 0 < v < 1


@dataclass(frozen=True)
class Param:
    parse: Callable
    default: Any
    check: Optional[Callable] = None
    requirement: str = ""


def _p(parse, default, check=None, requirement=""):
    return Param(parse, default, check, requirement)


POS = (_positive, "must be > 0")
NONNEG = (_nonneg, "must be >= 0")
FRACTION = (_unit_interval, "must lie in (0, 1)")

# seed is explicit in every resolved config, even for deterministic experiments
_COMMON = {"seed": _p(int, 0, *NONNEG)}
_THRESHOLD = _p(float, dof.DEFAULT_THRESHOLD, *FRACTION)

_MI_SETUP = {
    "wavelength": _p(float, 1.0, *POS),
    "tx_length": _p(float, 2.0, *POS),
    "rx_length": _p(float, 4.0, *POS),
    "separation": _p(float, 16.0, *POS),
    "snr_db": _p(float, 10.0),
    "power": _p(float, 1.0, *POS),
    "white_floor": _p(float, 0.1, *POS),
    "grid": _p(int, 8, *POS),
    "tx_grid": _p(int, 8, *POS),
}

SCHEMAS: dict[str, dict[str, Param]] = {
    "pswf": {"T": _p(float, 2.0, *POS), "W": _p(float, 2.0, *POS), "grid": _p(int, 512, *POS),
             "threshold": _THRESHOLD},
    "dof-los": {
        "wavelength": _p(float, 1.0, *POS),
        "tx_side": _p(float, 4.0, *POS),
        "rx_side": _p(float, 4.0, *POS),
        "separation": _p(float, 8.0, *POS),
        "grid": _p(int, 4, *POS),
        "dyadic": _p(_bool, False),
        "threshold": _THRESHOLD,
    },
    "dof-nlos": {
        "wavelength": _p(float, 1.0, *POS),
        "tx_length": _p(float, 4.0, *POS),
        "rx_length": _p(float, 4.0, *POS),
        "separation": _p(float, 20.0, *POS),
        "radius": _p(float, 10.0, *POS),
        "kappa": _p(float, 5.0, *NONNEG),
        "clusters": _p(int, 8, *POS),
        "mean_direction": _p(_floats, (0.0, 1.0, 0.0)),
        "trials": _p(int, 50, *POS),
        "grid": _p(int, 2, *POS),
        "threshold": _THRESHOLD,
    },
    "mi-converge": dict(_MI_SETUP, sweep=_p(_ints, (2, 4, 8, 16, 32, 64, 128, 256, 512), *POS)),
    "noise-capacity": dict(_MI_SETUP, sweep=_p(_ints, (1, 2, 4, 8, 16, 32, 64, 128), *POS)),
    "planewave": {
        "wavelength": _p(float, 1.0, *POS),
        "side": _p(float, 1.0, *POS),
        "grid": _p(int, 16, *POS),
        "n_waves": _p(int, 16, *POS),
    },
    "ldma": {
        "wavelength": _p(float, 0.01, *POS),
        "theta": _p(float, 0.0),
        "r1": _p(float, 5.0, *POS),
        "r2": _p(float, 20.0, *POS),
        "sizes": _p(_ints, (1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024), *POS),
    },
    "waterfill": {
        "gains": _p(_floats, (1.0, 0.1), *NONNEG),
        "noise": _p(_floats, (1.0,), *POS),
        "power": _p(float, 1.0, *POS),
    },
}
for _schema in SCHEMAS.values():
    for _key, _param in _COMMON.items():
        _schema.setdefault(_key, _param)

EXPERIMENTS = tuple(SCHEMAS)


@dataclass
class ExperimentConfig:
    experiment: str
    parameters: dict = field(default_factory=dict)
    output_path: str = ""

    def format(self) -> str:
        lines = [f"experiment = {self.experiment}"]
        lines += [f"{k} = {_render(v)}" for k, v in sorted(self.parameters.items())]
        lines.append(f"out = {self.output_path}")
        return "\n".join(lines)


def _render(value) -> str:
    if isinstance(value, tuple):
        return ",".join(_render(v) for v in value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _normalize(key: str) -> str:
    return key.strip().replace("-", "_")


def read_config_file(path) -> dict[str, str]:
    entries = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        entries[_normalize(key)] = value.strip()
    return entries


def _coerce(experiment: str, key: str, raw) -> Any:
    schema = SCHEMAS[experiment]
    if key not in schema:
        raise ConfigError(f"unknown key {key!r} for {experiment}; valid keys: "
                          + ", ".join(sorted(schema)))
    param = schema[key]
    try:
        value = param.parse(raw) if isinstance(raw, str) else raw
    except ValueError:
        raise ConfigError(f"{key} expects {_TYPE_NAMES[param.parse]}, got {raw!r}") from None
    if param.check is not None and not param.check(value):
        raise ConfigError(f"{key} {param.requirement}")
    return value


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="eitkit", description="Electromagnetic information theory experiments.")
    sub = parser.add_subparsers(dest="experiment", required=True, parser_class=_Parser)
    for name, schema in SCHEMAS.items():
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="key = value configuration file")
        sp.add_argument("--out", help="CSV output path (default <experiment>.csv)")
        for key, param in schema.items():
            flags = {f"--{key}", f"--{key.replace('_', '-')}"}
            sp.add_argument(*sorted(flags), dest=key, default=None,
                            help=f"{_TYPE_NAMES[param.parse]} (default {_render(param.default)})")
    return parser


def parse_config(argv=None, stderr=None) -> ExperimentConfig:
    args = vars(build_parser().parse_args(argv))
    experiment = args.pop("experiment")
    config_path = args.pop("config")
    out = args.pop("out")
    schema = SCHEMAS[experiment]
    values = {k: p.default for k, p in schema.items()}
    if config_path:
        try:
            entries = read_config_file(config_path)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        file_out = entries.pop("out", None)
        out = out if out is not None else file_out
        for key, raw in entries.items():
            values[key] = _coerce(experiment, key, raw)
    for key, raw in args.items():
        if raw is not None:
            values[key] = _coerce(experiment, key, raw)
    cfg = ExperimentConfig(experiment, values, out or f"{experiment}.csv")
    print(cfg.format(), file=stderr if stderr is not None else sys.stderr)
    return cfg


# ---------------------------------------------------------------------------
# experiment runners: each returns (header, rows, summary)


def _mi_setup(p, sweep) -> mutual_info.ConvergenceSetup:
    return mutual_info.ConvergenceSetup(
        wavelength=p["wavelength"], tx_length=p["tx_length"], rx_length=p["rx_length"],
        separation=p["separation"], snr_db=p["snr_db"], power=p["power"],
        white_floor=p["white_floor"], sweep=sweep, reference_factor=p["grid"],
        tx_points_per_halfwave=p["tx_grid"])


def _run_pswf(p):
    spec = dof.pswf_modes(p["T"], p["W"], p["grid"])
    report = dof.functional_dof(spec, p["threshold"], prediction=2 * p["W"] * p["T"])
    rows = [(n, v) for n, v in enumerate(spec.values)]
    return ("n", "lambda_n"), rows, f"dof={report.count} threshold={_render(p['threshold'])}"


def _run_dof_los(p):
    lam = p["wavelength"]
    tx = Region("rectangle", (p["tx_side"],) * 2)
    rx = Region("rectangle", (p["rx_side"],) * 2)
    report = dof.los_channel_dof(tx, rx, p["separation"], WaveParams(lam), p["grid"],
                                 p["threshold"], dyadic=p["dyadic"])
    s = report.spectrum.values
    rows = [(n, v, v / s[0]) for n, v in enumerate(s)]
    summary = (f"dof={report.count} threshold={_render(p['threshold'])} "
               f"prediction={_render(report.prediction)}")
    return ("n", "sigma_n", "sigma_rel"), rows, summary


def _run_dof_nlos(p):
    lam = p["wavelength"]
    if len(p["mean_direction"]) != 3:
        raise ConfigError("mean_direction expects 3 comma-separated floats")
    scat = dof.VmfScatterers(p["mean_direction"], p["kappa"], p["clusters"])
    mean, counts = dof.nlos_dof_mc(
        scat, Region("interval", (p["tx_length"],)), Region("interval", (p["rx_length"],)),
        WaveParams(lam), p["trials"], p["threshold"], p["seed"],
        separation=p["separation"], radius=p["radius"], points_per_halfwave=p["grid"],
        return_counts=True)
    rows = [(t, int(c)) for t, c in enumerate(counts)]
    return ("trial", "dof"), rows, f"expected_dof={_render(mean)} threshold={_render(p['threshold'])}"


def _run_mi_converge(p):
    curve = mutual_info.mi_convergence_experiment(_mi_setup(p, p["sweep"]))
    rows = [(n, v, curve.reference_mi) for n, v in zip(curve.sample_counts, curve.mi_values)]
    gap = abs(curve.mi_values[-1] - curve.reference_mi) / curve.reference_mi
    summary = f"reference_bits={_render(curve.reference_mi)} final_relative_gap={gap:.3e}"
    return ("n_antennas", "mi_bits", "reference_bits"), rows, summary


def _run_noise_capacity(p):
    white, corr = mutual_info.noise_divergence_experiment(_mi_setup(p, p["sweep"]))
    rows = [(n, a, b) for n, a, b in zip(white.sample_counts, white.mi_values, corr.mi_values)]
    summary = (f"white_final_bits={_render(white.mi_values[-1])} "
               f"correlated_final_bits={_render(corr.mi_values[-1])}")
    return ("n_antennas", "white_bits", "correlated_bits"), rows, summary


def _run_planewave(p):
    lam = p["wavelength"]
    side = p["side"]
    grid = uniform_grid(box(side, side, side), p["grid"])
    field_ = planewave.sample_planewave_field(grid, 2 * math.pi / lam, p["n_waves"], p["seed"])
    rows = [(*pt, v) for pt, v in zip(grid.points, field_.values)]
    spacing = side / p["grid"]
    summary = f"n_points={len(grid)}"
    if spacing <= lam / 8 and p["grid"] >= 3:
        summary += f" helmholtz_residual={planewave.helmholtz_residual(field_, spacing):.6e}"
    return ("x", "y", "z", "h"), rows, summary


def _run_ldma(p):
    k = 2 * math.pi / p["wavelength"]
    curve = nearfield.ldma_sweep(p["sizes"], k, p["theta"], p["r1"], p["r2"])
    rows = list(zip(curve.sizes, curve.correlations, curve.farfield_correlations,
                    (int(v) for v in curve.inside_rayleigh)))
    summary = f"correlation_first={curve.correlations[0]:.6f} correlation_last={curve.correlations[-1]:.6f}"
    return ("n_elements", "nearfield_correlation", "farfield_correlation", "inside_rayleigh"), rows, summary


def _run_waterfill(p):
    gains = p["gains"]
    noise = p["noise"]
    if len(noise) not in (1, len(gains)):
        raise ConfigError("noise expects one value or one per gain")
    alloc, cap = mutual_info.waterfill(gains, noise if len(noise) > 1 else noise[0], p["power"])
    nu = np.broadcast_to(np.asarray(noise), (len(gains),))
    rows = [(n, g, v, a) for n, (g, v, a) in enumerate(zip(gains, nu, alloc))]
    return ("n", "gain", "noise", "power"), rows, f"capacity_bits={_render(cap)}"


RUNNERS = {
    "pswf": _run_pswf,
    "dof-los": _run_dof_los,
    "dof-nlos": _run_dof_nlos,
    "mi-converge": _run_mi_converge,
    "noise-capacity": _run_noise_capacity,
    "planewave": _run_planewave,
    "ldma": _run_ldma,
    "waterfill": _run_waterfill,
}


def _cell(value) -> list[str]:
    if isinstance(value, (complex, np.complexfloating)):
        return [format(float(value.real), ".17g"), format(float(value.imag), ".17g")]
    if isinstance(value, (bool, np.bool_)):
        return [str(int(value))]
    if isinstance(value, (int, np.integer)):
        return [str(int(value))]
    return [format(float(value), ".17g")]


def format_csv(header, rows) -> str:
    """Header plus rows; complex columns are split into ``_re``/``_im`` pairs."""
    complex_cols = set()
    if rows:
        complex_cols = {i for i, v in enumerate(rows[0])
                        if isinstance(v, (complex, np.complexfloating))}
    names = []
    for i, name in enumerate(header):
        names += [f"{name}_re", f"{name}_im"] if i in complex_cols else [name]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(names)
    for row in rows:
        writer.writerow([c for v in row for c in _cell(v)])
    return buf.getvalue()


def run_experiment(cfg: ExperimentConfig, stdout=None) -> str:
    """Run, write the CSV to ``cfg.output_path`` and print the summary line."""
    header, rows, summary = RUNNERS[cfg.experiment](cfg.parameters)
    text = format_csv(header, rows)
    with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    print(summary, file=stdout if stdout is not None else sys.stdout)
    return summary


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
        run_experiment(cfg)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (EITError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
