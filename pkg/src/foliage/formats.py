"""JSON input files: covers, critical-record sets, Betti templates, spectral profiles."""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

from .errors import ParseError, SchemaError
from .exact import as_rational
from .hopf_ledger import chi_preset
from .nerve_cech import CoverNerve
from .witten_spectral import SpectralProfile

SCHEMA_VERSION = "1"

COVER_KEYS = ({"sets", "intersections"}, {"schema_version", "name", "description"})
INTERSECTION_KEYS = ({"indices"}, {"components", "face_map"})
CRITICAL_KEYS = ({"leaf_closures"}, {"schema_version", "name", "description", "chi_b_direct", "direct_profile"})
LEAF_KEYS = ({"label", "linearization", "chi_b_twisted"}, {"holonomy", "index", "description"})
BETTI_KEYS = ({"betti"}, {"schema_version", "name", "description"})
PROFILE_KEYS = (
    {"modes", "interval", "parity", "weight", "field"},
    {
        "schema_version", "name", "description", "angular", "s_values", "t_values",
        "witten_t", "crit_regions", "rho", "kernel_tol",
    },
)


def _check_keys(obj: Any, keys: tuple[set, set], where: str) -> None:
    if not isinstance(obj, dict):
        raise SchemaError(f"expected an object, got {type(obj).__name__}", where=where)
    required, optional = keys
    missing = sorted(required - obj.keys())
    extra = sorted(obj.keys() - required - optional)
    if missing or extra:
        raise SchemaError("schema violation", missing=missing, extra=extra, where=where)


def _check_version(obj: dict, where: str) -> None:
    version = str(obj.get("schema_version", SCHEMA_VERSION))
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {version!r} (this build reads {SCHEMA_VERSION!r})", where=where)


# --------------------------------------------------------------------------- locating inputs


def bundled_dir():
    return resources.files("foliage") / "data"


def bundled_names() -> list[str]:
    return sorted(p.name for p in bundled_dir().iterdir() if p.name.endswith(".json"))


def resolve_input(name: str | Path) -> tuple[str, str]:
    """Return ``(display_name, text)`` for a file path or a bundled example name.

    Paths that do not exist fall back to a bundled file with the same base
    name, so ``examples/example1.json`` and ``example1`` both find the bundled
    Example 1.
    """
    path = Path(name)
    if path.is_file():
        return str(path), path.read_text(encoding="utf-8")
    stem = path.name if path.name.endswith(".json") else path.name + ".json"
    candidate = bundled_dir() / stem
    if candidate.is_file():
        return f"<bundled>/{stem}", candidate.read_text(encoding="utf-8")
    raise ParseError(f"no such file, and no bundled example named {stem!r}", path=name)


def load_json(name: str | Path) -> tuple[str, dict]:
    display, text = resolve_input(name)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, path=display, line=exc.lineno, column=exc.colno) from None
    if not isinstance(data, dict):
        raise SchemaError("top level must be an object", where=display)
    return display, data


def classify(data: dict) -> str:
    if "leaf_closures" in data:
        return "critical"
    if "betti" in data:
        return "betti"
    if "intersections" in data or "sets" in data:
        return "cover"
    if "modes" in data or "parity" in data:
        return "profile"
    raise SchemaError("cannot tell what kind of input this is", missing=["leaf_closures|betti|sets|modes"])


# --------------------------------------------------------------------------- covers


def parse_cover(data: dict, where: str = "cover") -> CoverNerve:
    _check_keys(data, COVER_KEYS, where)
    _check_version(data, where)
    sets = data["sets"]
    if not isinstance(sets, list) or not sets:
        raise ParseError("must be a non-empty list", path=where, field="sets")
    by_str = {str(s): s for s in sets}
    intersections = []
    face_maps = {}
    for k, item in enumerate(data["intersections"]):
        loc = f"{where}: intersections[{k}]"
        _check_keys(item, INTERSECTION_KEYS, loc)
        labels = item["indices"]
        if not isinstance(labels, list) or not labels:
            raise ParseError("must be a non-empty list of set labels", path=where, field=f"intersections[{k}].indices")
        count = item.get("components", 1)
        if isinstance(count, bool) or not isinstance(count, int):
            raise ParseError("must be an integer", path=where, field=f"intersections[{k}].components")
        intersections.append((labels, count))
        for facet_key, comp_map in (item.get("face_map") or {}).items():
            facet = [by_str.get(part.strip(), part.strip()) for part in str(facet_key).split(",")]
            if not isinstance(comp_map, list):
                raise ParseError("must be a list of component numbers", path=where,
                                 field=f"intersections[{k}].face_map[{facet_key!r}]")
            face_maps[(tuple(labels), tuple(facet))] = comp_map
    return CoverNerve.from_labels(
        name=str(data.get("name", where)), sets=sets, intersections=intersections, face_maps=face_maps
    )


# --------------------------------------------------------------------------- critical records


@dataclass(frozen=True)
class LeafClosureInput:
    label: str
    linearization: list
    holonomy: list
    chi_b_twisted: int
    index: int | None = None


@dataclass(frozen=True)
class CriticalInput:
    name: str
    leaf_closures: tuple[LeafClosureInput, ...]
    chi_b_direct: int | None
    direct_profile: str | None


def _matrix(value, where: str, fld: str) -> list[list[float]]:
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        raise ParseError("must be a non-empty list of rows", path=where, field=fld)
    try:
        return [[float(as_rational(v)) if isinstance(v, str) else float(v) for v in row] for row in value]
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad matrix entry ({exc})", path=where, field=fld) from None


def parse_critical(data: dict, where: str = "critical") -> CriticalInput:
    _check_keys(data, CRITICAL_KEYS, where)
    _check_version(data, where)
    leaves = []
    for k, item in enumerate(data["leaf_closures"]):
        _check_keys(item, LEAF_KEYS, f"{where}: leaf_closures[{k}]")
        fld = f"leaf_closures[{k}]"
        lin = _matrix(item["linearization"], where, fld + ".linearization")
        hol = [_matrix(g, where, f"{fld}.holonomy[{i}]") for i, g in enumerate(item.get("holonomy", []))]
        chi = item["chi_b_twisted"]
        if isinstance(chi, str):
            try:
                chi = chi_preset(chi)
            except ValueError as exc:
                raise ParseError(str(exc), path=where, field=fld + ".chi_b_twisted") from None
        elif isinstance(chi, bool) or not isinstance(chi, int):
            raise ParseError("must be an integer or a preset name", path=where, field=fld + ".chi_b_twisted")
        index = item.get("index")
        if index is not None and (isinstance(index, bool) or index not in (-1, 1)):
            raise ParseError("must be +1 or -1", path=where, field=fld + ".index")
        leaves.append(LeafClosureInput(str(item["label"]), lin, hol, chi, index))
    direct = data.get("chi_b_direct")
    if direct is not None and (isinstance(direct, bool) or not isinstance(direct, int)):
        raise ParseError("must be an integer", path=where, field="chi_b_direct")
    return CriticalInput(
        name=str(data.get("name", where)),
        leaf_closures=tuple(leaves),
        chi_b_direct=direct,
        direct_profile=data.get("direct_profile"),
    )


def parse_betti(data: dict, where: str = "betti") -> tuple[str, list[int]]:
    _check_keys(data, BETTI_KEYS, where)
    _check_version(data, where)
    b = data["betti"]
    if not isinstance(b, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in b):
        raise ParseError("must be a list of integers", path=where, field="betti")
    return str(data.get("name", where)), b


# --------------------------------------------------------------------------- spectral profiles


def _parity_pair(value, where: str, fld: str):
    if isinstance(value, str):
        parts = value.replace("/", "-").split("-")
        if len(parts) == 1:
            parts = parts * 2
    elif isinstance(value, dict):
        parts = [value.get("left"), value.get("right")]
    elif isinstance(value, list):
        parts = value
    else:
        parts = []
    if len(parts) != 2 or any(p is None for p in parts):
        raise ParseError("expected 'even-even', ['even','odd'] or {'left':..,'right':..}", path=where, field=fld)
    return tuple(p if isinstance(p, str) else float(p) for p in parts)


def _floats(value, where: str, fld: str) -> tuple[float, ...]:
    if not isinstance(value, list):
        raise ParseError("must be a list of numbers", path=where, field=fld)
    try:
        return tuple(float(v) for v in value)
    except (TypeError, ValueError):
        raise ParseError("must be a list of numbers", path=where, field=fld) from None


def parse_profile(data: dict, where: str = "profile") -> SpectralProfile:
    _check_keys(data, PROFILE_KEYS, where)
    _check_version(data, where)
    modes = data["modes"]
    if isinstance(modes, bool) or not isinstance(modes, int):
        raise ParseError("must be an integer", path=where, field="modes")
    interval = data["interval"]
    if interval in ("[0, pi]", "[0,pi]", "half"):
        interval = "half"
    elif interval in ("circle", "[0, 2pi]", "[0,2pi]"):
        interval = "circle"
    else:
        raise ParseError("must be 'half' ([0, pi]) or 'circle'", path=where, field="interval")
    parity = None
    if interval == "half":
        par = data["parity"]
        if not isinstance(par, dict) or set(par) != {"deg0", "deg1"}:
            raise SchemaError("parity needs exactly deg0 and deg1", where=f"{where}: parity")
        parity = (_parity_pair(par["deg0"], where, "parity.deg0"), _parity_pair(par["deg1"], where, "parity.deg1"))
    weight = data["weight"]
    if not isinstance(weight, str):
        weight = _floats(weight, where, "weight")
    fld = data["field"]
    if isinstance(fld, list):
        fld = (_floats(fld, where, "field"), ())
    elif isinstance(fld, dict):
        extra = set(fld) - {"radial", "angular"}
        if extra:
            raise SchemaError("field components", extra=sorted(extra), where=f"{where}: field")
        fld = (_floats(fld.get("radial", []), where, "field.radial"), _floats(fld.get("angular", []), where, "field.angular"))
    elif not isinstance(fld, str):
        raise ParseError("must be a preset name, a list of samples, or {radial, angular}", path=where, field="field")
    kwargs = {}
    for key in ("s_values", "t_values", "crit_regions"):
        if key in data:
            kwargs[key] = _floats(data[key], where, key)
    for key in ("witten_t", "rho", "kernel_tol"):
        if key in data:
            kwargs[key] = float(data[key])
    if "angular" in data:
        kwargs["angular"] = bool(data["angular"])
    return SpectralProfile(
        modes=modes, interval=interval, parity=parity, weight=weight, field=fld,
        name=str(data.get("name", where)), **kwargs,
    )
