"""Figure presets and the scenario runner behind the CLI.

Every preset is a two-level scenario with ``r1 = 2`` and ``theta1 = pi/6``.
The fig2 presets use ``theta = pi/6``, reconstructed from their discriminant
values (1, -4, 0), and fig1b uses ``r = 2`` so that ``delta = 1 > 0``; both
choices are flagged as derived in the run manifests.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .config import ScenarioConfig
from .dynamics import maximally_mixed, time_grid
from .hamiltonian import (
    PhaseClass,
    TwoLevelParams,
    apt_eigenvalues,
    build_apt,
    build_pt,
    classify_phase,
    delta,
    has_real_spectrum,
    pt_eigenvalues,
)
from .linalg import gen_eig
from .measures import classify_pattern, measure_series
from .svg import Line, line_plot

__all__ = ["Panel", "Figure", "FIGURES", "PRESETS", "preset_config", "derived_quantities",
           "compute_columns", "write_csv", "run_figure", "run_scenario"]

R1 = 2.0
THETA1 = math.pi / 6

_STYLE = {
    "snh": ("#d62728", False),
    "neglntr": ("#1f77b4", True),
    "negtr": ("#000000", False),
    "dist": ("#000000", False),
    "svn": ("#2ca02c", True),
}
_NAMES = {
    "snh": "S_NH",
    "neglntr": "-ln Tr Omega",
    "negtr": "-Tr Omega",
    "dist": "D",
    "svn": "S_vN",
}


@dataclass(frozen=True)
class Panel:
    label: str
    family: str
    params: TwoLevelParams
    note: str = ""


@dataclass(frozen=True)
class Figure:
    id: str
    panels: tuple
    measures: tuple
    extra: tuple = ()


def _p(r, theta):
    return TwoLevelParams(r, theta, R1, THETA1)


_S3 = math.sqrt(3.0)
FIGURES = {
    f.id: f
    for f in (
        Figure("fig1a", (
            Panel("fig1a_theta_11pi24", "apt", _p(5 / _S3, 11 * math.pi / 24)),
            Panel("fig1a_theta_pi2", "apt", _p(5 / _S3, math.pi / 2)),
            Panel("fig1a_theta_13pi24", "apt", _p(5 / _S3, 13 * math.pi / 24)),
        ), ("snh", "neglntr")),
        Figure("fig1b", (
            Panel("fig1b", "apt", _p(2.0, 2 * math.pi / 3),
                  "r = 2 chosen so that delta = 1 > 0 at theta = 2pi/3"),
        ), ("snh", "neglntr")),
        Figure("fig2a", (
            Panel("fig2a", "pt", _p(2 * _S3, math.pi / 6),
                  "theta = pi/6 reconstructed from delta = 1"),
        ), ("snh", "neglntr"), ("negtr",)),
        Figure("fig2b", (
            Panel("fig2b", "pt", _p(4 * math.sqrt(2.0), math.pi / 6),
                  "theta = pi/6 reconstructed from delta = -4"),
        ), ("snh", "neglntr")),
        Figure("fig2c", (
            Panel("fig2c", "pt", _p(4.0, math.pi / 6),
                  "theta = pi/6 reconstructed from delta = 0"),
        ), ("snh", "neglntr")),
        Figure("fig3a", (Panel("fig3a", "pt", _p(2.0, math.pi / 6)),),
               ("dist", "svn", "snh", "neglntr")),
        Figure("fig3b", (Panel("fig3b", "pt", _p(3.5, math.pi / 6)),),
               ("dist", "svn", "snh", "neglntr")),
        Figure("fig3c", (Panel("fig3c", "pt", _p(3.99, math.pi / 6)),),
               ("dist", "svn", "snh", "neglntr")),
    )
}

PRESETS = {panel.label: (fig, panel) for fig in FIGURES.values() for panel in fig.panels}


def preset_config(name: str, t_max: float = 10.0, steps: int = 2001) -> ScenarioConfig:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    fig, panel = PRESETS[name]
    p = panel.params
    return ScenarioConfig(family=panel.family, r=p.r, theta=p.theta, r1=p.r1, theta1=p.theta1,
                          t_max=t_max, steps=steps, measures=fig.measures)


def _complex_pair(z) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def derived_quantities(cfg: ScenarioConfig) -> dict:
    """delta, eigenvalues, phase, pattern and spectrum reality of a scenario."""
    h = cfg.hamiltonian()
    out = {"has_real_spectrum": has_real_spectrum(h)}
    if cfg.family == "generic":
        lam = gen_eig(h.matrix).eigenvalues
        out.update(delta=None, phase=None, pattern=None,
                   eigenvalues=[_complex_pair(z) for z in lam])
        return out
    p = cfg.params
    lam = apt_eigenvalues(p) if cfg.family == "apt" else pt_eigenvalues(p)
    phase = classify_phase(p)
    pattern = None if phase is PhaseClass.EXCEPTIONAL_POINT else classify_pattern(p, cfg.family).value
    out.update(delta=delta(p), phase=phase.value, pattern=pattern,
               eigenvalues=[_complex_pair(z) for z in lam])
    return out


def compute_columns(h, omega0, times, measures: Sequence[str], extra: Sequence[str] = ()) -> dict:
    series = measure_series(h, omega0, times, measures)
    columns = {s.tag.value: s.values for s in series}
    if "negtr" in extra:
        neglntr = columns.get("neglntr")
        if neglntr is None:
            neglntr = measure_series(h, omega0, times, ["neglntr"])[0].values
        columns["negtr"] = -np.exp(-neglntr)
    return columns


def write_csv(path: Path, times, columns: dict) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", *columns])
        for k, t in enumerate(times):
            writer.writerow([format(float(t), ".17g")]
                            + [format(float(col[k]), ".17g") for col in columns.values()])


def _write_json_series(path: Path, times, columns: dict) -> None:
    payload = {"t": [float(t) for t in times]}
    payload.update({name: [float(v) for v in col] for name, col in columns.items()})
    path.write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")


def _write_data(out_dir: Path, stem: str, times, columns: dict, fmt: str) -> str:
    if fmt == "json":
        name = f"{stem}.json"
        _write_json_series(out_dir / name, times, columns)
    else:
        name = f"{stem}.csv"
        write_csv(out_dir / name, times, columns)
    return name


def _lines(columns: dict, suffix: str = "", palette_shift: int = 0) -> list:
    lines = []
    for name, values in columns.items():
        color, dashed = _STYLE[name]
        if palette_shift:
            color = ("#d62728", "#9467bd", "#ff7f0e", "#1f77b4", "#17becf", "#8c564b")[
                (palette_shift - 1) * 2 % 6 + (1 if dashed else 0)]
        lines.append(Line(_NAMES[name] + suffix, values, color, dashed))
    return lines


def _manifest(out_dir: Path, payload: dict) -> str:
    payload = dict(payload, tool="nhrecur", version=__version__)
    (out_dir / "manifest.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return "manifest.json"


def _ensure_dir(out_dir) -> Path:
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out_dir}: {exc}") from exc
    return out_dir


def run_figure(fig_id: str, out_dir, t_max: float = 10.0, steps: int = 2001,
               fmt: str = "csv") -> list[str]:
    """Write the data files, SVG panel and manifest for one figure; return file names."""
    if fig_id not in FIGURES:
        raise KeyError(f"unknown figure {fig_id!r}; choose from {', '.join(FIGURES)}")
    fig = FIGURES[fig_id]
    out_dir = _ensure_dir(out_dir)
    times = time_grid(t_max, steps)
    files, lines, panels = [], [], {}
    multi = len(fig.panels) > 1
    for k, panel in enumerate(fig.panels, start=1):
        cfg = preset_config(panel.label, t_max, steps)
        h = build_apt(panel.params) if panel.family == "apt" else build_pt(panel.params)
        columns = compute_columns(h, maximally_mixed(2), times, fig.measures, fig.extra)
        files.append(_write_data(out_dir, panel.label, times, columns, fmt))
        suffix = f" ({panel.label.split('_', 1)[1]})" if multi else ""
        lines.extend(_lines(columns, suffix, k if multi else 0))
        panels[panel.label] = {
            "config": cfg.as_dict(),
            "derived": derived_quantities(cfg),
            "note": panel.note,
        }
    first = fig.panels[0]
    title = f"{fig_id}: {first.family.upper()}, r1 = 2, theta1 = pi/6"
    svg = line_plot(times, lines, title, "left axis", "right axis (same scale)")
    (out_dir / f"{fig_id}.svg").write_text(svg, encoding="utf-8")
    files.append(f"{fig_id}.svg")
    files.append("manifest.json")
    _manifest(out_dir, {"figure": fig_id, "panels": panels, "files": files})
    return files


def run_scenario(cfg: ScenarioConfig, out_dir: Optional[str] = None, fmt: str = "csv") -> list[str]:
    """Evolve a configured scenario and write ``evolve.<fmt>``, ``evolve.svg`` and a manifest."""
    out_dir = _ensure_dir(out_dir if out_dir is not None else cfg.output_dir)
    times = time_grid(cfg.t_max, cfg.steps)
    columns = compute_columns(cfg.hamiltonian(), cfg.initial_state(), times, cfg.measures)
    files = [_write_data(out_dir, "evolve", times, columns, fmt)]
    svg = line_plot(times, _lines(columns), f"{cfg.family} scenario", "left axis",
                    "right axis (same scale)")
    (out_dir / "evolve.svg").write_text(svg, encoding="utf-8")
    files += ["evolve.svg", "manifest.json"]
    _manifest(out_dir, {"config": cfg.as_dict(), "derived": derived_quantities(cfg), "files": files})
    return files
