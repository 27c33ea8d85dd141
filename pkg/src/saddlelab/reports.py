"""Report persistence: JSON documents, plot-ready TSV series, and figures.

Every experiment run writes one JSON report with an embedded parameter block
and a provenance block, a TSV file with one series per column, and a PNG
rendering of the headline series.  The timestamp lives in a single
provenance field so byte-level reproducibility is testable by excluding it.
"""

from __future__ import annotations

import datetime
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import __version__
from .experiments import (
    AnnularReport,
    GrowthFit,
    SectorReport,
    WeylReport,
)
from .params import ExperimentParameters
from .spectrum import Spectrum

FIG_DPI = 150


def _timestamp() -> str:
    return datetime.datetime.now(datetime.timezone.utc).replace(microsecond=0).isoformat()


def provenance_block(surface_name: str, seed: int) -> dict:
    return {
        "surface": surface_name,
        "seed": int(seed),
        "tool_version": __version__,
        "timestamp": _timestamp(),
    }


def write_report_json(
    path: Path,
    experiment: str,
    params: ExperimentParameters,
    surface_name: str,
    results: dict,
) -> None:
    doc = {
        "experiment": experiment,
        "params": params.as_dict(),
        "provenance": provenance_block(surface_name, params.seed),
        "results": results,
    }
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_tsv(path: Path, columns: dict[str, list]) -> None:
    """One named series per column, row-aligned; short columns are padded."""
    names = list(columns)
    n_rows = max((len(v) for v in columns.values()), default=0)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(names) + "\n")
        for i in range(n_rows):
            cells = []
            for name in names:
                col = columns[name]
                cells.append(repr(col[i]) if i < len(col) else "")
            fh.write("\t".join(cells) + "\n")


def _new_axes(title: str, xlabel: str, ylabel: str):
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    return fig, ax


def _save(fig, path: Path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=FIG_DPI)
    plt.close(fig)


def save_spectrum_outputs(out_dir: Path, spec: Spectrum, fmt: str) -> list[Path]:
    paths = []
    if fmt in ("csv", "tsv"):
        sep = "," if fmt == "csv" else "\t"
        path = out_dir / f"spectrum.{fmt}"
        with open(path, "w", encoding="utf-8") as fh:
            if sep == ",":
                spec.to_csv(fh)
            else:
                fh.write("n\thol_x\thol_y\tlength\tangle\tfrac_length\n")
                for n in range(len(spec)):
                    ln = float(spec.lengths[n])
                    fh.write(
                        f"{n + 1}\t{float(spec.holonomies[n, 0])!r}\t"
                        f"{float(spec.holonomies[n, 1])!r}\t{ln!r}\t"
                        f"{float(spec.angles[n])!r}\t{ln % 1.0!r}\n"
                    )
        paths.append(path)
    else:
        path = out_dir / "spectrum.json"
        rows = [
            {
                "n": n + 1,
                "hol": [float(spec.holonomies[n, 0]), float(spec.holonomies[n, 1])],
                "length": float(spec.lengths[n]),
                "angle": float(spec.angles[n]),
                "frac_length": float(spec.lengths[n] % 1.0),
            }
            for n in range(len(spec))
        ]
        path.write_text(json.dumps(rows, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        paths.append(path)

    fig, ax = _new_axes(
        f"{spec.surface_name}: {len(spec)} connections to length {spec.complete_radius:g}",
        "hol_x",
        "hol_y",
    )
    ax.plot(spec.holonomies[:, 0], spec.holonomies[:, 1], ".", markersize=2)
    ax.set_aspect("equal")
    fig_path = out_dir / "spectrum.png"
    _save(fig, fig_path)
    paths.append(fig_path)
    return paths


def save_weyl_outputs(
    out_dir: Path, report: WeylReport, *, dstar_only: bool = False
) -> list[Path]:
    cols: dict[str, list] = {"n": list(report.n_grid)}
    if not dstar_only:
        for q, p in enumerate(report.p_values):
            cols[f"mean_abs_weyl_p{p}"] = report.mean_abs_weyl[q].tolist()
            for s in range(report.abs_weyl.shape[0]):
                cols[f"abs_weyl_p{p}_s{s}"] = report.abs_weyl[s, q].tolist()
    cols["mean_dstar"] = report.mean_dstar.tolist()
    for s in range(report.dstar.shape[0]):
        cols[f"dstar_s{s}"] = report.dstar[s].tolist()
    tsv = out_dir / "series.tsv"
    write_tsv(tsv, cols)

    fig, ax = _new_axes(
        f"{report.surface_name}: distribution of lengths mod 1",
        "prefix size N",
        "statistic",
    )
    n = np.asarray(report.n_grid)
    if not dstar_only:
        for q, p in enumerate(report.p_values):
            ax.loglog(n, report.mean_abs_weyl[q], "o-", label=f"mean |Weyl sum|, p={p}")
    ax.loglog(n, report.mean_dstar, "s-", label="mean star discrepancy")
    ax.legend()
    fig_path = out_dir / "figure.png"
    _save(fig, fig_path)
    return [tsv, fig_path]


def save_growth_outputs(out_dir: Path, fit: GrowthFit) -> list[Path]:
    ratios = [c / r**2 for c, r in zip(fit.counts, fit.radii)]
    tsv = out_dir / "series.tsv"
    write_tsv(
        tsv,
        {
            "radius": list(fit.radii),
            "count": list(fit.counts),
            "count_over_r2": ratios,
        },
    )
    fig, ax = _new_axes(
        f"{fit.surface_name}: quadratic growth (lsq c = {fit.c_lsq:.4f})",
        "radius R",
        "count / R^2",
    )
    ax.plot(fit.radii, ratios, "o-", label="count / R^2")
    ax.axhline(fit.c_lsq, color="k", linestyle="--", alpha=0.6, label="least squares")
    ax.axhline((fit.c1_hat * np.e) ** 2, color="g", linestyle=":", label="lower envelope")
    ax.axhline((fit.c2_hat / np.e) ** 2, color="r", linestyle=":", label="upper envelope")
    ax.legend()
    fig_path = out_dir / "figure.png"
    _save(fig, fig_path)
    return [tsv, fig_path]


def save_sector_outputs(out_dir: Path, report: SectorReport) -> list[Path]:
    cols: dict[str, list] = {"scan_radius": list(report.scan_radii)}
    for ai, width in enumerate(report.arc_lengths):
        cols[f"max_ratio_I{width:g}"] = report.max_ratio[ai].tolist()
    tsv = out_dir / "series.tsv"
    write_tsv(tsv, cols)

    fig, ax = _new_axes(
        f"{report.surface_name}: sector ratios (empirical constant {report.c4_emp:.4f})",
        "scan radius",
        "max count / (|I| R^2)",
    )
    for ai, width in enumerate(report.arc_lengths):
        ax.plot(report.scan_radii, report.max_ratio[ai], "o-", label=f"|I| = {width:g}")
    ax.axhline(report.c4_emp, color="k", linestyle="--", alpha=0.6)
    ax.legend()
    fig_path = out_dir / "figure.png"
    _save(fig, fig_path)
    return [tsv, fig_path]


def save_annulus_outputs(out_dir: Path, report: AnnularReport) -> list[Path]:
    cols: dict[str, list] = {"t": report.t_grid.tolist()}
    for n in report.n_values:
        cols[f"max_symdiff_N{n}"] = report.max_symdiff[n].tolist()
        cols[f"shell_count_N{n}"] = report.shell_counts[n].tolist()
    tsv = out_dir / "series.tsv"
    write_tsv(tsv, cols)

    fig, ax = _new_axes(
        f"{report.surface_name}: prefix instability under the diagonal flow",
        "t",
        "max symmetric difference over (s, theta)",
    )
    for n in report.n_values:
        ax.plot(report.t_grid, report.max_symdiff[n], ".", markersize=3, label=f"N = {n}")
        ax.axhline(report.thresholds[n], linestyle="--", alpha=0.5)
    ax.legend()
    fig_path = out_dir / "figure.png"
    _save(fig, fig_path)
    return [tsv, fig_path]


def save_kernel_outputs(out_dir: Path, rows: list[dict]) -> list[Path]:
    cols = {
        key: [row[key] for row in rows]
        for key in (
            "pair",
            "vx",
            "vy",
            "wx",
            "wy",
            "amplitude",
            "abs_value",
            "bound",
            "within_bound",
        )
    }
    tsv = out_dir / "series.tsv"
    write_tsv(tsv, cols)

    fig, ax = _new_axes(
        "pair kernel modulus against its amplitude bound",
        "pair amplitude A(v, w)",
        "value",
    )
    amp = np.array(cols["amplitude"])
    order = np.argsort(amp)
    ax.semilogy(amp[order], np.array(cols["abs_value"])[order], "o", label="|kernel|")
    ax.semilogy(amp[order], np.array(cols["bound"])[order], "-", label="reported bound")
    ax.legend()
    fig_path = out_dir / "figure.png"
    _save(fig, fig_path)
    return [tsv, fig_path]
