"""Command-line front end: experiment dispatch and artifact persistence.

One subcommand per experiment so each verification is independently
runnable.  Reports are a pure function of (configuration, seed, version);
worker counts only change wall time.  Exit codes: 0 success, 2 bad input or
parameters, 3 resource budget exceeded, 4 internal error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    IncompleteSpectrumError,
    ParameterError,
    QuadratureError,
    ResourceLimitExceeded,
    SurfaceValidationError,
)
from .experiments import (
    growth_fit,
    kernel_integral,
    sector_scan,
    symdiff_experiment,
    weyl_experiment,
)
from .params import ExperimentParameters
from .reports import (
    save_annulus_outputs,
    save_growth_outputs,
    save_kernel_outputs,
    save_sector_outputs,
    save_spectrum_outputs,
    save_weyl_outputs,
    write_report_json,
)
from .spectrum import enumerate_up_to_length, first_n
from .surface import builtin_surface, load_surface_file

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_RESOURCE = 3
EXIT_INTERNAL = 4

PARAM_FLAGS = {
    "delta": "delta",
    "gamma": "gamma",
    "alpha": "alpha_exp",
    "zeta": "zeta",
    "nu": "nu",
    "varpi": "varpi",
    "epsilon": "epsilon",
    "epsilon2": "epsilon2",
    "epsilon3": "epsilon3",
    "tau": "tau",
}


@dataclass
class RunConfig:
    command: str
    surface: str
    params: ExperimentParameters
    output_dir: Path
    workers: int
    fmt: str
    force: bool
    extras: dict = field(default_factory=dict)


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--surface", default="square-torus", help="builtin name or JSON file path")
    sub.add_argument("--output", default=".", help="directory for report artifacts")
    sub.add_argument("--seed", type=int, default=1)
    sub.add_argument("--workers", type=int, default=1)
    sub.add_argument("--format", choices=("csv", "tsv", "json"), default="csv", dest="fmt")
    sub.add_argument("--force", action="store_true", help="skip the parameter requirement check")
    sub.add_argument("--samples", type=int, default=None)
    sub.add_argument("--p", type=int, default=None)
    sub.add_argument("--first-n", type=int, default=None, dest="first_n")
    for flag, attr in PARAM_FLAGS.items():
        sub.add_argument(f"--{flag}", type=float, default=None, dest=attr)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="saddlelab",
        description="Saddle connection enumeration and equidistribution experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_enum = sub.add_parser("enumerate", help="enumerate connections up to a length")
    p_enum.add_argument("--max-length", type=float, default=None, dest="max_length")
    _add_common(p_enum)

    p_weyl = sub.add_parser("weyl", help="Weyl sums and discrepancy along Haar samples")
    p_weyl.add_argument("--n-min", type=int, default=50, dest="n_min")
    _add_common(p_weyl)

    p_disc = sub.add_parser("discrepancy", help="star discrepancy of lengths mod 1")
    p_disc.add_argument("--n-min", type=int, default=50, dest="n_min")
    _add_common(p_disc)

    p_growth = sub.add_parser("growth", help="quadratic growth fit over a radius grid")
    p_growth.add_argument("--radii", default="20,40,60,80,100")
    _add_common(p_growth)

    p_sector = sub.add_parser("sector-scan", help="empirical sector-count constants")
    p_sector.add_argument("--max-length", type=float, default=100.0, dest="max_length")
    p_sector.add_argument("--arc-lengths", default="0.05,0.1,0.2,0.5", dest="arc_lengths")
    p_sector.add_argument("--arcs-per-length", type=int, default=64, dest="arcs_per_length")
    p_sector.add_argument("--scan-levels", type=int, default=4, dest="scan_levels")
    _add_common(p_sector)

    p_ann = sub.add_parser("annulus", help="prefix instability under the diagonal flow")
    p_ann.add_argument("--phi", type=float, default=0.0)
    p_ann.add_argument("--t-points", type=int, default=200, dest="t_points")
    p_ann.add_argument("--st-samples", type=int, default=4, dest="st_samples")
    p_ann.add_argument("--s-fixed", type=float, default=None, dest="s_fixed")
    p_ann.add_argument("--n-values", default=None, dest="n_values")
    _add_common(p_ann)

    p_kernel = sub.add_parser("kernel", help="pair kernel integrals over spectrum pairs")
    p_kernel.add_argument("--pairs", type=int, default=16)
    p_kernel.add_argument("--quad-points", type=int, default=64, dest="quad_points")
    _add_common(p_kernel)

    p_val = sub.add_parser("validate-params", help="check the requirement inequalities")
    _add_common(p_val)

    return parser


def parse_args(argv: list[str]) -> RunConfig:
    ns = build_parser().parse_args(argv)
    overrides = {}
    for attr in PARAM_FLAGS.values():
        value = getattr(ns, attr, None)
        if value is not None:
            overrides[attr] = value
    if getattr(ns, "p", None) is not None:
        overrides["p"] = ns.p
    if getattr(ns, "samples", None) is not None:
        overrides["samples"] = ns.samples
    if getattr(ns, "first_n", None) is not None:
        overrides["N"] = ns.first_n
    overrides["seed"] = ns.seed
    params = ExperimentParameters(**overrides)

    extras = {}
    for key in (
        "max_length",
        "n_min",
        "radii",
        "arc_lengths",
        "arcs_per_length",
        "scan_levels",
        "phi",
        "t_points",
        "st_samples",
        "s_fixed",
        "n_values",
        "pairs",
        "quad_points",
        "first_n",
    ):
        if hasattr(ns, key):
            extras[key] = getattr(ns, key)

    return RunConfig(
        command=ns.command,
        surface=ns.surface,
        params=params,
        output_dir=Path(ns.output),
        workers=max(1, ns.workers),
        fmt=ns.fmt,
        force=ns.force,
        extras=extras,
    )


def _load(config: RunConfig):
    if config.surface.endswith(".json") or "/" in config.surface:
        return load_surface_file(config.surface)
    return builtin_surface(config.surface)


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def run(config: RunConfig) -> int:
    if not config.force:
        config.params.validate()
    if config.command == "validate-params":
        print(f"parameters ok: {config.params.as_dict()}")
        return EXIT_OK

    surface = _load(config)
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    params = config.params
    workers = config.workers

    if config.command == "enumerate":
        max_length = config.extras.get("max_length")
        if max_length is not None:
            spec = enumerate_up_to_length(surface, max_length, workers=workers)
        elif config.extras.get("first_n"):
            spec = first_n(surface, config.extras["first_n"], workers=workers)
        else:
            raise ParameterError("enumerate needs --max-length or --first-n")
        paths = save_spectrum_outputs(out, spec, config.fmt)
        write_report_json(
            out / "report.json",
            "enumerate",
            params,
            surface.name,
            {
                "count": len(spec),
                "complete_radius": spec.complete_radius,
                "shortest": float(spec.lengths[0]) if len(spec) else None,
            },
        )
        print(f"enumerate {surface.name}: {len(spec)} connections -> {paths[0]}")
        return EXIT_OK

    if config.command in ("weyl", "discrepancy"):
        report = weyl_experiment(
            surface, params, n_min=config.extras.get("n_min", 50), workers=workers
        )
        dstar_only = config.command == "discrepancy"
        paths = save_weyl_outputs(out, report, dstar_only=dstar_only)
        write_report_json(
            out / "report.json", config.command, params, surface.name, report.as_dict()
        )
        final_w = report.mean_abs_weyl[0][-1]
        final_d = report.mean_dstar[-1]
        if dstar_only:
            print(f"{config.command} {surface.name}: mean D*(N={params.N}) = {final_d:.4f}")
        else:
            print(
                f"weyl {surface.name}: mean |W|(N={params.N}, p={params.p}) = {final_w:.4f}, "
                f"mean D* = {final_d:.4f}"
            )
        return EXIT_OK

    if config.command == "growth":
        radii = _float_list(config.extras["radii"])
        fit = growth_fit(surface, radii, workers=workers)
        save_growth_outputs(out, fit)
        write_report_json(out / "report.json", "growth", params, surface.name, fit.as_dict())
        print(
            f"growth {surface.name}: c_lsq = {fit.c_lsq:.4f}, "
            f"c1 = {fit.c1_hat:.4f}, c2 = {fit.c2_hat:.4f}"
        )
        return EXIT_OK

    if config.command == "sector-scan":
        report = sector_scan(
            surface,
            config.extras["max_length"],
            _float_list(config.extras["arc_lengths"]),
            config.extras["arcs_per_length"],
            epsilon=params.epsilon,
            scan_levels=config.extras["scan_levels"],
            workers=workers,
        )
        save_sector_outputs(out, report)
        write_report_json(
            out / "report.json", "sector-scan", params, surface.name, report.as_dict()
        )
        print(
            f"sector-scan {surface.name}: empirical c4 = {report.c4_emp:.4f}, "
            f"threshold coefficient = {report.c_emp:.4f}"
        )
        return EXIT_OK

    if config.command == "annulus":
        n_values = (
            tuple(_int_list(config.extras["n_values"]))
            if config.extras.get("n_values")
            else (params.N,)
        )
        report = symdiff_experiment(
            surface,
            config.extras.get("phi", 0.0),
            params,
            n_values=n_values,
            t_points=config.extras.get("t_points", 200),
            st_samples=config.extras.get("st_samples", 4),
            s_fixed=config.extras.get("s_fixed"),
            workers=workers,
        )
        save_annulus_outputs(out, report)
        write_report_json(out / "report.json", "annulus", params, surface.name, report.as_dict())
        fractions = ", ".join(f"N={n}: {report.bad_fraction[n]:.3f}" for n in n_values)
        print(
            f"annulus {surface.name}: bad-t fractions {fractions}; "
            f"sandwich failures {report.sandwich_failures}"
        )
        return EXIT_OK

    if config.command == "kernel":
        spec = first_n(surface, params.N, workers=workers)
        rng = np.random.default_rng(np.random.SeedSequence((params.seed, 0xC0DE)))
        n_pairs = config.extras.get("pairs", 16)
        rows = []
        for idx in range(n_pairs):
            i, j = rng.integers(0, len(spec), size=2)
            v = spec.holonomies[i]
            w = spec.holonomies[j]
            if np.all(v == w):
                j = (j + 1) % len(spec)
                w = spec.holonomies[j]
            result = kernel_integral(
                v,
                w,
                params.p,
                params.S,
                config.extras.get("quad_points", 64),
                delta=params.delta,
            )
            rows.append(
                {
                    "pair": idx,
                    "vx": float(v[0]),
                    "vy": float(v[1]),
                    "wx": float(w[0]),
                    "wy": float(w[1]),
                    "amplitude": result.amplitude,
                    "abs_value": abs(result.value),
                    "bound": result.bound,
                    "within_bound": int(result.within_bound),
                }
            )
        save_kernel_outputs(out, rows)
        write_report_json(
            out / "report.json",
            "kernel",
            params,
            surface.name,
            {"pairs": rows, "all_within_bound": all(r["within_bound"] for r in rows)},
        )
        n_ok = sum(r["within_bound"] for r in rows)
        print(f"kernel {surface.name}: {n_ok}/{len(rows)} pairs within the reported bound")
        return EXIT_OK

    raise ParameterError(f"unknown command {config.command!r}")


def main(argv: list[str] | None = None) -> int:
    try:
        config = parse_args(argv if argv is not None else sys.argv[1:])
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return run(config)
    except (SurfaceValidationError, ParameterError, IncompleteSpectrumError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceLimitExceeded as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except QuadratureError as exc:
        print(f"internal: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # pragma: no cover
        print(f"internal: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
