"""Deterministic CSV/JSON writers, state-grid files and their loaders."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .numerics import Grid1D, Grid2D


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _parse(s: str):
    if s in ("true", "false"):
        return s == "true"
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(header))
        for r in rows:
            w.writerow([_cell(v) for v in r])
    return path


def read_csv(path) -> tuple[list[str], list[list]]:
    with Path(path).open(newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        return header, [[_parse(c) for c in row] for row in r]


def _jsonable(o):
    if isinstance(o, dict):
        return {str(k): _jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_jsonable(v) for v in o]
    if isinstance(o, np.ndarray):
        return _jsonable(o.tolist())
    if isinstance(o, (np.bool_,)):
        return bool(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, (np.floating, float)):
        return float(o)
    if isinstance(o, Path):
        return str(o)
    return o


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(dumps(obj))
    return path


def read_json(path):
    return json.loads(Path(path).read_text())


def write_table(path_stem, header, rows, fmt: str) -> Path:
    """CSV for ``csv``/``svg`` formats, ``{"columns", "rows"}`` JSON for ``json``."""
    rows = [list(r) for r in rows]
    if fmt == "json":
        return write_json(Path(f"{path_stem}.json"), {"columns": list(header), "rows": rows})
    return write_csv(Path(f"{path_stem}.csv"), header, rows)


def read_table(path) -> tuple[list[str], list[list]]:
    path = Path(path)
    if path.suffix == ".json":
        d = read_json(path)
        return d["columns"], d["rows"]
    return read_csv(path)


def sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# ------------------------------------------------------------ state grids

_HEADER_PREFIX = "# "


def write_state_grid(path, header: dict, columns: Sequence[str], rows) -> Path:
    """CSV whose first line is ``# {json header}``."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(_HEADER_PREFIX + json.dumps(_jsonable(header), sort_keys=True) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(columns))
        for r in rows:
            w.writerow([_cell(v) for v in r])
    return path


def read_state_grid(path) -> tuple[dict, list[str], np.ndarray]:
    with Path(path).open(newline="") as fh:
        first = fh.readline()
        if not first.startswith(_HEADER_PREFIX):
            raise ValueError(f"{path}: missing JSON header line")
        header = json.loads(first[len(_HEADER_PREFIX):])
        r = csv.reader(fh)
        cols = next(r)
        data = np.array([[float(c) for c in row] for row in r])
    return header, cols, data


def save_wavefunction(path, psi, sys) -> Path:
    header = {"kind": "wavefunction", "grid": psi.grid.to_dict(), "hbar": sys.hbar, "mass": sys.mass, "units": "natural"}
    x = psi.grid.coords
    rows = zip(x, psi.values.real, psi.values.imag)
    return write_state_grid(path, header, ["x", "re", "im"], rows)


def load_wavefunction(path):
    from .phase_space import SystemParams, WaveFunction

    h, _, d = read_state_grid(path)
    if h.get("kind") != "wavefunction":
        raise ValueError(f"{path} does not hold a wavefunction")
    grid = Grid1D(**h["grid"])
    return WaveFunction(grid, d[:, 1] + 1j * d[:, 2]), SystemParams(h["mass"], h["hbar"])


def save_density(path, rho, sys) -> Path:
    """One CSV row per position sample; columns are the momentum samples."""
    header = {"kind": "phase_space", "grid": rho.grid.to_dict(), "hbar": sys.hbar, "mass": sys.mass, "units": "natural"}
    cols = ["x"] + [f"p{j}" for j in range(rho.grid.gp.n)]
    rows = ([x, *row] for x, row in zip(rho.grid.gx.coords, rho.values))
    return write_state_grid(path, header, cols, rows)


def load_density(path):
    from .phase_space import PhaseSpaceDensity, SystemParams

    h, _, d = read_state_grid(path)
    if h.get("kind") != "phase_space":
        raise ValueError(f"{path} does not hold a phase-space density")
    g = h["grid"]
    grid = Grid2D(Grid1D(**g["gx"]), Grid1D(**g["gp"]))
    return PhaseSpaceDensity(grid, d[:, 1:]), SystemParams(h["mass"], h["hbar"])


def finite_or_none(v: float):
    return v if math.isfinite(v) else None
