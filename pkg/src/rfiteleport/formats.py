"""JSON file formats for groups, representations, G-sets, UEB bundles and reports.

Complex numbers are written as [re, im] pairs and matrices as lists of rows.
A representation or G-set file may embed its group object or name a group
file by path, relative to the referring file.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .groups import GSet, PermGroup, gset_from_generators, make_group
from .linalg import DEFAULT_TOL
from .reps import (
    Representation,
    make_representation,
    permutation_representation,
    trivial_representation,
)
from .sim import FidelityReport
from .ueb import GEquivariantUEB


class FormatError(ValueError):
    pass


def matrix_to_json(M) -> list:
    M = np.asarray(M, dtype=complex)
    return [[[_clean(z.real), _clean(z.imag)] for z in row] for row in M]


def _clean(x: float) -> float:
    # normalise -0.0 so files are byte-stable
    x = float(x)
    return 0.0 if x == 0 else x


def matrix_from_json(data) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"malformed matrix: {exc}") from None
    if arr.ndim == 2:
        return arr.astype(complex)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise FormatError(f"matrix must be rows of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def group_to_json(G: PermGroup) -> dict:
    out: dict[str, Any] = {"degree": G.degree, "generators": [list(g) for g in G.generators]}
    if G.name:
        out["name"] = G.name
    return out


def group_from_json(data: dict) -> PermGroup:
    try:
        return make_group(int(data["degree"]), data["generators"], name=data.get("name"))
    except KeyError as exc:
        raise FormatError(f"group object is missing {exc}") from None


def read_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except FileNotFoundError:
        raise FormatError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from None


def write_json(path: str | Path, data: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2) + "\n")
    return path


def load_group(path: str | Path) -> PermGroup:
    return group_from_json(read_json(path))


def _resolve_group(data: dict, base: Path, group: PermGroup | None) -> PermGroup:
    if group is not None:
        return group
    ref = data.get("group")
    if ref is None:
        raise FormatError("no group given: embed one or pass a group file")
    if isinstance(ref, str):
        return load_group(base / ref)
    return group_from_json(ref)


def rep_to_json(rep: Representation, group_ref: str | None = None) -> dict:
    return {
        "group": group_ref if group_ref is not None else group_to_json(rep.group),
        "dimension": rep.dimension,
        "generator_matrices": [matrix_to_json(M) for M in rep.generator_matrices],
    }


def rep_from_json(data: dict, base: Path = Path("."), group: PermGroup | None = None,
                  tol: float = DEFAULT_TOL) -> Representation:
    G = _resolve_group(data, base, group)
    mats = [matrix_from_json(M) for M in data.get("generator_matrices", [])]
    if not mats and not G.generators:
        return trivial_representation(G, int(data.get("dimension", 1)))
    rep = make_representation(G, mats, tol)
    if "dimension" in data and int(data["dimension"]) != rep.dimension:
        raise FormatError(f"declared dimension {data['dimension']} != matrix size {rep.dimension}")
    return rep


def gset_to_json(X: GSet, group_ref: str | None = None) -> dict:
    return {
        "group": group_ref if group_ref is not None else group_to_json(X.group),
        "size": X.size,
        "generator_actions": [X.action[i].tolist() for i in X.group.generator_indices],
    }


def gset_from_json(data: dict, base: Path = Path("."), group: PermGroup | None = None) -> GSet:
    G = _resolve_group(data, base, group)
    actions = data.get("generator_actions")
    if actions is None:
        raise FormatError("G-set object needs 'generator_actions'")
    size = data.get("size")
    return gset_from_generators(G, actions, None if size is None else int(size))


def load_rep_or_gset(path: str | Path, group: PermGroup | None = None,
                     tol: float = DEFAULT_TOL) -> Representation | GSet:
    path = Path(path)
    data = read_json(path)
    if not isinstance(data, dict):
        raise FormatError(f"{path}: expected a JSON object")
    if "generator_actions" in data:
        return gset_from_json(data, path.parent, group)
    return rep_from_json(data, path.parent, group, tol)


def load_rep(path: str | Path, group: PermGroup | None = None, tol: float = DEFAULT_TOL) -> Representation:
    obj = load_rep_or_gset(path, group, tol)
    if isinstance(obj, GSet):
        return permutation_representation(obj)
    return obj


def bundle_to_json(gueb: GEquivariantUEB) -> dict:
    prov = {}
    for key, value in gueb.provenance.items():
        prov[key] = matrix_to_json(value) if isinstance(value, np.ndarray) else value
    return {
        "dimension": gueb.base.dimension,
        "elements": [matrix_to_json(U) for U in gueb.elements],
        "sigma": {str(g): gueb.sigma[g].tolist() for g in range(len(gueb.sigma))},
        "provenance": prov,
    }


def bundle_elements_from_json(data: dict) -> np.ndarray:
    try:
        elements = np.array([matrix_from_json(U) for U in data["elements"]])
    except KeyError:
        raise FormatError("bundle is missing 'elements'") from None
    d = int(data.get("dimension", elements.shape[1] if elements.size else 0))
    if elements.ndim != 3 or elements.shape[1:] != (d, d):
        raise FormatError(f"bundle elements are not {d}x{d} matrices")
    return elements


def load_bundle(path: str | Path) -> tuple[np.ndarray, dict]:
    data = read_json(path)
    return bundle_elements_from_json(data), data


def tool_info(tol: float, seed: int | None = None) -> dict:
    info: dict[str, Any] = {"name": "rfiteleport", "version": __version__, "tolerance": tol}
    if seed is not None:
        info["seed"] = seed
    return info


def report_to_json(report: FidelityReport) -> dict:
    return {
        "group": report.group,
        "procedure": report.procedure,
        "trials": report.trials,
        "seed": report.seed,
        "grid_min": report.grid.tolist(),
        "global_min": report.global_min,
        "global_max": report.global_max,
        "max_deviation": report.max_deviation,
        "tolerance": report.tolerance,
        "tool": tool_info(report.tolerance, report.seed),
    }
