"""JSON file formats: groups, triples, geometries, domains, spectra, matrices."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

from .exactla import ExactMatrix
from .gallery import TileDomain
from .geom import IncidenceGeometry
from .gstriple import GSTriple
from .permcore import PermGroup, Subgroup
from .spectral import Spectrum


class FormatError(ValueError):
    pass


def read_json(path: str | Path) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def write_json(path: str | Path, doc: Any) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=False)
        fh.write("\n")


def file_sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def group_to_json(G: PermGroup) -> dict:
    return {"name": G.name or "", "degree": G.degree, "generators": [list(g) for g in G.generators]}


def group_from_json(doc: dict) -> PermGroup:
    try:
        return PermGroup(int(doc["degree"]), doc["generators"], name=doc.get("name") or None)
    except KeyError as exc:
        raise FormatError(f"group file lacks {exc}") from exc


def triple_to_json(t: GSTriple) -> dict:
    return {
        "group": group_to_json(t.group),
        "u_generators": [list(g) for g in t.left.generators],
        "v_generators": [list(g) for g in t.right.generators],
    }


def triple_from_json(doc: dict, base: Path | None = None) -> GSTriple:
    g = doc.get("group")
    if isinstance(g, str):
        path = Path(g) if base is None or Path(g).is_absolute() else base / g
        g = read_json(path)
    if not isinstance(g, dict):
        raise FormatError("triple file needs a 'group' object or path")
    G = group_from_json(g)
    ident = [list(range(G.degree))]
    U = Subgroup(G, doc.get("u_generators") or ident)
    V = Subgroup(G, doc.get("v_generators") or ident)
    return GSTriple(G, U, V, name=G.name)


def load_triple(path: str | Path) -> GSTriple:
    return triple_from_json(read_json(path), Path(path).parent)


def load_geometry(path: str | Path) -> IncidenceGeometry:
    return IncidenceGeometry.from_json(read_json(path))


def load_domain(path: str | Path) -> TileDomain:
    return TileDomain.from_json(read_json(path))


def load_spectrum(path: str | Path) -> Spectrum:
    return Spectrum.from_json(read_json(path))


def matrix_to_json(M: ExactMatrix) -> list[list[str]]:
    return M.to_json()


def matrix_from_json(rows) -> ExactMatrix:
    return ExactMatrix.from_json(rows)
