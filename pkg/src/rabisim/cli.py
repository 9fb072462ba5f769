"""Command-line front end: configure a system, sweep a time grid, emit rows.

Configuration comes from flags, from a JSON config file, or both (flags
override file values). Output is CSV (default) or JSON. Exit codes: 0 on
success, 1 for a configuration problem, 2 for a numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass

import numpy as np

from .charpoly import char_poly_closed_form, char_poly_recurrence
from .exceptions import NumericalError
from .propagator import DriveConfig, population_sweep
from .validation import check_couplings

__all__ = ["RunConfig", "parse_config", "run_sweep", "main"]

_METHOD_CHOICES = ("auto", "closed", "general", "oracle")
_FORMAT_CHOICES = ("csv", "json")
_CONFIG_FIELDS = (
    "n", "couplings", "omegas", "phis", "e0", "energies",
    "t_start", "t_end", "steps", "method", "initial",
    "tol", "output", "format",
)


@dataclass
class RunConfig:
    """Fully validated description of one sweep."""

    n: int
    couplings: tuple
    omegas: tuple | None
    phis: tuple | None
    e0: float
    energies: tuple | None
    t_start: float
    t_end: float
    steps: int
    method: str
    initial: object
    tol: float | None
    output: str | None
    format: str


class _Parser(argparse.ArgumentParser):
    """argparse that reports problems as ValueError instead of exiting."""

    def error(self, message):
        raise ValueError(message)


def _float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in str(text).split(",") if tok.strip() != ""]
    except ValueError:
        raise ValueError(f"could not parse {text!r} as a comma-separated number list")


def _build_parser() -> _Parser:
    p = _Parser(
        prog="rabisim",
        description="Exact level populations of an n-level atom under n-1 resonant fields.",
    )
    p.add_argument("--config", metavar="FILE", help="JSON file with the same field names; flags override it")
    p.add_argument("--n", type=int, help="number of levels (cross-checked against --couplings)")
    p.add_argument("--couplings", help="comma-separated positive couplings g_1..g_{n-1}")
    p.add_argument("--omegas", help="comma-separated field frequencies (default: all zero)")
    p.add_argument("--phis", help="comma-separated field phases (default: all zero)")
    p.add_argument("--e0", type=float, help="ground-level energy (default 0)")
    p.add_argument("--energies", help="comma-separated level energies; replaces --omegas/--e0")
    p.add_argument("--t-start", dest="t_start", type=float, help="sweep start time (default 0)")
    p.add_argument("--t-end", dest="t_end", type=float, help="sweep end time (required)")
    p.add_argument("--steps", type=int, help="number of uniform steps; steps+1 samples (default 100)")
    p.add_argument("--method", choices=_METHOD_CHOICES, help="eigenvalue route (default auto)")
    p.add_argument("--initial", help="starting level index, or comma-separated amplitudes (default 0)")
    p.add_argument("--tol", type=float, help="relative eigenvalue tolerance for the general solver")
    p.add_argument("--output", help="output file path (default: stdout)")
    p.add_argument("--format", choices=_FORMAT_CHOICES, help="output format (default csv)")
    return p


def _load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ValueError(f"config: cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise ValueError(f"config: {path} is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ValueError("config: top level must be an object")
    for key in data:
        if key not in _CONFIG_FIELDS:
            raise ValueError(f"config: unknown field {key!r}")
    return data


def _parse_initial(value):
    if value is None:
        return 0
    if isinstance(value, int):
        return value
    if isinstance(value, (list, tuple)):
        return [complex(v) for v in value]
    text = str(value).strip()
    tokens = [tok for tok in text.split(",") if tok.strip() != ""]
    if len(tokens) == 1:
        try:
            return int(tokens[0])
        except ValueError:
            pass
    try:
        return [complex(tok) for tok in tokens]
    except ValueError:
        raise ValueError(f"initial: could not parse {value!r} as an index or amplitude list")


def parse_config(argv) -> RunConfig:
    """Merge flags over an optional config file into a validated RunConfig.

    Raises ValueError with a message naming the offending field.
    """
    args = _build_parser().parse_args(argv)
    file_cfg = _load_config_file(args.config) if args.config else {}

    def pick(name, default=None):
        flag = getattr(args, name)
        if flag is not None:
            return flag
        return file_cfg.get(name, default)

    raw_couplings = pick("couplings")
    if raw_couplings is None:
        raise ValueError("couplings: required (give --couplings or a config file)")
    if isinstance(raw_couplings, str):
        raw_couplings = _float_list(raw_couplings)
    couplings = check_couplings(raw_couplings)
    n = couplings.size + 1

    n_given = pick("n")
    if n_given is not None and int(n_given) != n:
        raise ValueError(
            f"couplings: expected {int(n_given) - 1} couplings for n={int(n_given)}, "
            f"got {couplings.size}"
        )

    def number_list(name):
        value = pick(name)
        if value is None:
            return None
        if isinstance(value, str):
            value = _float_list(value)
        return tuple(float(v) for v in value)

    omegas = number_list("omegas")
    phis = number_list("phis")
    energies = number_list("energies")
    e0 = pick("e0")

    if energies is not None:
        if omegas is not None or e0 is not None:
            raise ValueError("energies: mutually exclusive with omegas/e0")
        if len(energies) != n:
            raise ValueError(f"energies: expected {n} values, got {len(energies)}")
    else:
        if omegas is not None and len(omegas) != n - 1:
            raise ValueError(f"omegas: expected {n - 1} values, got {len(omegas)}")
    if phis is not None and len(phis) != n - 1:
        raise ValueError(f"phis: expected {n - 1} values, got {len(phis)}")

    t_end = pick("t_end")
    if t_end is None:
        raise ValueError("t_end: required")
    t_start = float(pick("t_start", 0.0))
    t_end = float(t_end)
    if not (np.isfinite(t_start) and np.isfinite(t_end)):
        raise ValueError("t_start/t_end: must be finite")
    if t_end < t_start:
        raise ValueError(f"t_end: must be >= t_start ({t_end} < {t_start})")

    steps = int(pick("steps", 100))
    if steps < 1:
        raise ValueError(f"steps: must be >= 1, got {steps}")

    method = str(pick("method", "auto"))
    if method not in _METHOD_CHOICES:
        raise ValueError(f"method: expected one of {_METHOD_CHOICES}, got {method!r}")
    if method == "closed" and n > 7:
        raise ValueError(f"method: 'closed' supports at most 7 levels, got n={n}")

    fmt = str(pick("format", "csv"))
    if fmt not in _FORMAT_CHOICES:
        raise ValueError(f"format: expected one of {_FORMAT_CHOICES}, got {fmt!r}")

    tol = pick("tol")
    if tol is not None:
        tol = float(tol)
        if not (tol > 0.0):
            raise ValueError(f"tol: must be positive, got {tol}")

    initial = _parse_initial(pick("initial"))
    if isinstance(initial, int) and not 0 <= initial < n:
        raise ValueError(f"initial: level index must be in [0, {n - 1}], got {initial}")
    if isinstance(initial, list) and len(initial) != n:
        raise ValueError(f"initial: expected {n} amplitudes, got {len(initial)}")

    output = pick("output")
    return RunConfig(
        n=n,
        couplings=tuple(float(g) for g in couplings),
        omegas=omegas,
        phis=phis,
        e0=float(e0) if e0 is not None else 0.0,
        energies=energies,
        t_start=t_start,
        t_end=t_end,
        steps=steps,
        method=method,
        initial=initial,
        tol=tol,
        output=str(output) if output is not None else None,
        format=fmt,
    )


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _render_csv(report: dict) -> str:
    lines = []
    diag = report["diagnostics"]
    lines.append(f"# method: {diag['method']}")
    lines.append("# eigenvalues: " + ",".join(_fmt(v) for v in diag["eigenvalues"]))
    lines.append(
        "# char_poly_recurrence: " + ",".join(_fmt(v) for v in diag["char_poly_recurrence"])
    )
    lines.append(
        "# char_poly_closed_form: " + ",".join(_fmt(v) for v in diag["char_poly_closed_form"])
    )
    lines.append(f"# max_unitarity_defect: {_fmt(diag['max_unitarity_defect'])}")
    n = len(report["populations"][0])
    lines.append("t," + ",".join(f"P{k}" for k in range(n)))
    for t, row in zip(report["times"], report["populations"]):
        lines.append(",".join([_fmt(t)] + [_fmt(p) for p in row]))
    return "\n".join(lines) + "\n"


def _render_json(report: dict) -> str:
    doc = {
        "config": report["config"],
        "diagnostics": report["diagnostics"],
        "times": report["times"],
        "populations": report["populations"],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def run_sweep(cfg: RunConfig) -> dict:
    """Compute the sweep described by cfg, write the output, return the report.

    Numerical problems (disagreeing polynomial constructions, loss of
    unitarity, broken probability conservation, solver failures) raise
    :class:`NumericalError`. A partially written output file is removed.
    """
    g = np.asarray(cfg.couplings, dtype=float)
    if cfg.energies is not None:
        drive = DriveConfig.from_energies(cfg.energies, phis=cfg.phis)
    else:
        n = cfg.n
        drive = DriveConfig(
            omegas=np.zeros(n - 1) if cfg.omegas is None else np.asarray(cfg.omegas),
            phis=np.zeros(n - 1) if cfg.phis is None else np.asarray(cfg.phis),
            e0=cfg.e0,
        )

    poly_rec = char_poly_recurrence(g)
    poly_closed = char_poly_closed_form(g)
    scale = np.maximum(np.abs(poly_rec.even_coeffs), 1.0)
    disagreement = float(np.max(np.abs(poly_rec.even_coeffs - poly_closed.even_coeffs) / scale))
    if disagreement > 1e-12:
        raise NumericalError(
            "characteristic-polynomial constructions disagree "
            f"(relative error {disagreement:.3e})"
        )

    method = cfg.method
    if method == "auto":
        method = "closed" if cfg.n <= 7 else "general"
    times = np.linspace(cfg.t_start, cfg.t_end, cfg.steps + 1)
    kwargs = {} if cfg.tol is None else {"tol": cfg.tol}
    result = population_sweep(
        g, drive=drive, times=times, method=method, initial=cfg.initial, **kwargs
    )

    if result.max_unitarity_defect > 1e-10:
        raise NumericalError(
            f"unitarity defect {result.max_unitarity_defect:.3e} exceeds 1e-10"
        )
    sums = result.populations.sum(axis=1)
    worst = float(np.max(np.abs(sums - 1.0)))
    if worst > 1e-10:
        raise NumericalError(f"population sum deviates from 1 by {worst:.3e}")

    config_doc = asdict(cfg)
    if isinstance(cfg.initial, list):
        config_doc["initial"] = [[z.real, z.imag] for z in cfg.initial]
    report = {
        "config": config_doc,
        "diagnostics": {
            "method": result.method_used,
            "eigenvalues": [float(v) for v in result.spectrum.eigenvalues],
            "char_poly_recurrence": [float(v) for v in poly_rec.even_coeffs],
            "char_poly_closed_form": [float(v) for v in poly_closed.even_coeffs],
            "max_unitarity_defect": result.max_unitarity_defect,
        },
        "times": [float(t) for t in result.times],
        "populations": [[float(p) for p in row] for row in result.populations],
    }

    text = _render_csv(report) if cfg.format == "csv" else _render_json(report)
    if cfg.output is None:
        sys.stdout.write(text)
    else:
        try:
            with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except BaseException as exc:
            if os.path.isfile(cfg.output):
                try:
                    os.unlink(cfg.output)
                except OSError:
                    pass
            if isinstance(exc, OSError):
                raise ValueError(f"output: cannot write {cfg.output}: {exc}")
            raise
    return report


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        run_sweep(cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
