"""Command-line front end: ``foliage {cech,index,hopf,spectrum,witten,all}``.

Exit codes: 0 success or match, 2 verification mismatch (Hopf verdict,
s-dependence of the Witten index, failed bundled expectation), 1 input error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Sequence

from . import formats
from .errors import FoliageError, NonIntegerSupertraceError, ParseError, SchemaError
from .hopf_ledger import CriticalRecord, lower_bound_check, simple_form_check, verify
from .linear_index import (
    Linearization,
    deformation_path,
    holonomy_commutes,
    index_of,
    path_index_constancy,
    polar_decompose,
)
from .nerve_cech import betti, build_complex, cokernel_dim
from .tolerances import DEFAULT_TOL, Tolerances
from .witten_spectral import (
    SpectralProfile,
    assemble,
    betti_numeric,
    heat_supertrace,
    localization_profile,
    morse_check,
    parity_of_anticommutator,
    witten_supertrace,
    witten_sweep,
)

COMMANDS = ("cech", "index", "hopf", "spectrum", "witten", "all")
EXIT_OK, EXIT_INPUT, EXIT_MISMATCH = 0, 1, 2
SIG_DIGITS = 12


@dataclass(frozen=True)
class RunConfig:
    command: str
    input_path: str | None = None
    tol: Tolerances = DEFAULT_TOL
    fmt: str = "table"
    report_path: str | None = None
    modes: int | None = None
    s_values: tuple[float, ...] | None = None
    t_values: tuple[float, ...] | None = None
    cokernel: int | None = None
    quiet: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}; expected one of {', '.join(COMMANDS)}")
        if self.fmt not in ("table", "json"):
            raise ValueError(f"unknown format {self.fmt!r}")
        if self.command != "all" and not self.input_path:
            raise ValueError(f"command {self.command!r} needs --input")


# --------------------------------------------------------------------------- output


def _clean(obj: Any) -> Any:
    """Round floats to 12 significant digits; NaN and infinities become null."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        v = float(f"{obj:.{SIG_DIGITS}g}")
        return 0.0 if v == 0 else v
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "tolist"):
        return _clean(obj.tolist())
    if hasattr(obj, "item"):
        return _clean(obj.item())
    return str(obj)


def to_json(report: dict) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{v:.{SIG_DIGITS}g}" if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _table_lines(obj: Any, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    for key in sorted(obj):
        val = obj[key]
        if isinstance(val, dict):
            lines.append(f"{pad}{key}:")
            lines.extend(_table_lines(val, indent + 1))
        elif isinstance(val, list) and val and all(isinstance(v, dict) for v in val):
            lines.append(f"{pad}{key}:")
            for k, item in enumerate(val):
                lines.append(f"{pad}  [{k}]")
                lines.extend(_table_lines(item, indent + 2))
        elif isinstance(val, str) and "\n" in val:
            lines.append(f"{pad}{key}:")
            lines.extend(f"{pad}  {row}" for row in val.rstrip("\n").split("\n"))
        else:
            lines.append(f"{pad}{key}: {json.dumps(val)}")
    return lines


def to_table(report: dict) -> str:
    return "\n".join(_table_lines(_clean(report))) + "\n"


def render(report: dict, fmt: str) -> str:
    return to_json(report) if fmt == "json" else to_table(report)


# --------------------------------------------------------------------------- commands


def _load(path: str, expected: Sequence[str]) -> tuple[str, str, dict]:
    where, data = formats.load_json(path)
    kind = formats.classify(data)
    if kind not in expected:
        raise SchemaError(f"expected a {' or '.join(expected)} file, got a {kind} file", where=where)
    return where, kind, data


def cmd_cech(cfg: RunConfig) -> tuple[int, dict]:
    where, _, data = _load(cfg.input_path, ("cover",))
    cover = formats.parse_cover(data, where)
    cx = build_complex(cover)
    summary = betti(cx)
    report = {"command": "cech", "input": cover.name, "sets": [str(s) for s in cover.sets], **summary.as_dict()}
    report["delta_squared_zero"] = cx.is_cochain_complex()
    if cfg.cokernel is not None:
        report["cokernel"] = {"degree": cfg.cokernel, "dim": cokernel_dim(cx, cfg.cokernel)}
    return EXIT_OK, report


def _leaf_report(leaf: formats.LeafClosureInput, tol: Tolerances) -> dict:
    lin = Linearization(leaf.linearization, label=leaf.label)
    idx = index_of(lin, tol)
    parts = polar_decompose(lin, tol)
    end = deformation_path(lin, 1.0, tol)
    out = {
        "label": leaf.label,
        "codim": lin.codim,
        "index": idx,
        "P": parts.P,
        "Theta": parts.Theta,
        "minus_one_dim": parts.minus_one_dim,
        "singular_values": parts.singular_values,
        "path_index_constant": path_index_constancy(lin, 100, tol),
        "path_endpoint": end,
        "chi_b_twisted": leaf.chi_b_twisted,
    }
    if leaf.holonomy:
        h = holonomy_commutes(lin, leaf.holonomy, tol)
        out["holonomy"] = {
            "commutes": h.commutes,
            "with_linearization": h.with_linearization,
            "with_P": h.with_P,
            "with_Theta": h.with_Theta,
            "max_residual": h.max_residual,
        }
    if leaf.index is not None:
        out["declared_index"] = leaf.index
    return out


def _leaf_ok(leaf: dict) -> bool:
    ok = leaf["path_index_constant"] and leaf.get("declared_index", leaf["index"]) == leaf["index"]
    return ok and leaf.get("holonomy", {}).get("commutes", True)


def cmd_index(cfg: RunConfig) -> tuple[int, dict]:
    where, _, data = _load(cfg.input_path, ("critical",))
    crit = formats.parse_critical(data, where)
    leaves = [_leaf_report(leaf, cfg.tol) for leaf in crit.leaf_closures]
    ok = all(_leaf_ok(leaf) for leaf in leaves)
    report = {"command": "index", "input": crit.name, "leaf_closures": leaves, "consistent": ok}
    return (EXIT_OK if ok else EXIT_MISMATCH), report


def _resolve_relative(name: str, base: str) -> str:
    candidate = Path(base).parent / name
    return str(candidate) if candidate.is_file() else name


def _spectral_setup(cfg: RunConfig, path: str) -> tuple[SpectralProfile, Any]:
    where, _, data = _load(path, ("profile",))
    profile = formats.parse_profile(data, where)
    changes: dict[str, Any] = {}
    if cfg.modes is not None:
        changes["modes"] = cfg.modes
    if cfg.s_values is not None:
        changes["s_values"] = cfg.s_values
    if cfg.t_values is not None:
        changes["t_values"] = cfg.t_values
    if cfg.tol.kernel != DEFAULT_TOL.kernel:
        changes["kernel_tol"] = cfg.tol.kernel
    profile = replace(profile, **changes) if changes else profile
    try:
        profile.validate()
    except ValueError as exc:
        if isinstance(exc, FoliageError):
            raise
        raise ParseError(str(exc), path=where) from None
    return profile, assemble(profile)


def cmd_hopf(cfg: RunConfig) -> tuple[int, dict]:
    where, kind, data = _load(cfg.input_path, ("critical", "betti"))
    if kind == "betti":
        name, b = formats.parse_betti(data, where)
        chi = lower_bound_check(b)
        report = {
            "command": "hopf",
            "input": name,
            "betti": b,
            "chi_b": chi,
            "nowhere_tangent_field_possible": chi == 0,
        }
        return EXIT_OK, report
    crit = formats.parse_critical(data, where)
    leaves = [_leaf_report(leaf, cfg.tol) for leaf in crit.leaf_closures]
    records = [CriticalRecord(leaf["label"], leaf["index"], leaf["chi_b_twisted"]) for leaf in leaves]
    chi_direct = crit.chi_b_direct
    spectral = None
    if crit.direct_profile:
        profile, mats = _spectral_setup(cfg, _resolve_relative(crit.direct_profile, where))
        b = betti_numeric(mats)
        spectral = {"profile": profile.name, "modes": profile.modes, "betti": list(b),
                    "euler": sum((-1) ** j * v for j, v in enumerate(b))}
        if chi_direct is None:
            chi_direct = spectral["euler"]
    hopf = verify(records, chi_direct)
    verdict = hopf.verdict
    if spectral is not None and spectral["euler"] != chi_direct:
        verdict = "mismatch"
    if not all(_leaf_ok(leaf) for leaf in leaves):
        verdict = "mismatch"
    report = {
        "command": "hopf",
        "input": crit.name,
        **hopf.as_dict(),
        "verdict": verdict,
        "simple_form": simple_form_check(records),
        "indices": [leaf["index"] for leaf in leaves],
        "minus_one_dims": [leaf["minus_one_dim"] for leaf in leaves],
    }
    if spectral is not None:
        report["spectral"] = spectral
    return (EXIT_MISMATCH if verdict == "mismatch" else EXIT_OK), report


def cmd_spectrum(cfg: RunConfig) -> tuple[int, dict]:
    profile, mats = _spectral_setup(cfg, cfg.input_path)
    b = betti_numeric(mats)
    sup = [(float(t), heat_supertrace(mats, t)) for t in profile.t_values]
    values = [v for _, v in sup]
    morse = morse_check(mats, 0.0, profile.witten_t, b)
    report = {
        "command": "spectrum",
        "input": profile.name,
        "modes": profile.modes,
        "degree_dims": list(mats.degree_dims),
        "betti": list(b),
        "euler": sum((-1) ** j * v for j, v in enumerate(b)),
        "supertrace": [{"t": t, "value": v} for t, v in sup],
        "supertrace_variation": max(values) - min(values) if values else 0.0,
        "morse": _morse_dict(0.0, morse),
        "anticommutator_parity_preserving": parity_of_anticommutator(mats),
        "csv": {"supertrace": _csv(["t", "supertrace"], sup)},
    }
    return EXIT_OK, report


def _morse_dict(s: float, m) -> dict:
    return {
        "s": s,
        "mu": list(m.mu),
        "inequalities": [{"k": k, "betti_side": lhs, "mu_side": rhs, "holds": ok} for k, lhs, rhs, ok in m.inequalities],
        "all_hold": m.all_hold,
        "equality_residual": m.equality_residual,
    }


def cmd_witten(cfg: RunConfig) -> tuple[int, dict]:
    profile, mats = _spectral_setup(cfg, cfg.input_path)
    t = profile.witten_t if cfg.t_values is None else cfg.t_values[0]
    b = betti_numeric(mats)
    raw = [(float(s), witten_supertrace(mats, s, t)) for s in profile.s_values]
    report: dict[str, Any] = {
        "command": "witten",
        "input": profile.name,
        "modes": profile.modes,
        "t": t,
        "betti": list(b),
        "supertrace_by_s": [{"s": s, "value": v} for s, v in raw],
    }
    code = EXIT_OK
    try:
        indices = witten_sweep(mats, profile.s_values, t)
    except NonIntegerSupertraceError as exc:
        report["error"] = str(exc)
        report["s_independent"] = False
        return EXIT_MISMATCH, report
    report["indices"] = indices
    report["s_independent"] = len(set(indices)) <= 1
    if not report["s_independent"]:
        code = EXIT_MISMATCH
    report["morse"] = [_morse_dict(s, morse_check(mats, s, t, b)) for s, _ in raw]
    if profile.crit_regions:
        loc = [localization_profile(mats, s, t, profile.crit_regions, profile.rho) for s, _ in raw]
        report["localization"] = [
            {"s": r.s, "outside_ratio": r.outside_ratio, "region_fractions": list(r.region_fractions),
             "min_norm2_outside": r.min_norm2_outside}
            for r in loc
        ]
        report["csv"] = {
            "supertrace": _csv(["s", "supertrace"], raw),
            "localization": _csv(["s", "outside_ratio"], [(r.s, r.outside_ratio) for r in loc]),
        }
    else:
        report["csv"] = {"supertrace": _csv(["s", "supertrace"], raw)}
    return code, report


# --------------------------------------------------------------------------- bundled examples


@dataclass(frozen=True)
class BundledExample:
    label: str
    filename: str
    command: str
    expect: dict
    cokernel: int | None = None


def bundled_examples() -> list[BundledExample]:
    """Shipped input files with the values each must reproduce."""
    return [
        BundledExample("Example 1 Hopf sum", "example1.json", "hopf",
                       {"indices": [1, 1, -1], "hopf_sum": 2, "verdict": "match", "spectral.betti": [1, 0, 1]}),
        BundledExample("Example 2 Hopf sum", "example2.json", "hopf",
                       {"indices": [1, -1], "minus_one_dims": [0, 1], "hopf_sum": 2, "verdict": "match"}),
        BundledExample("Example 3 lower bound", "example3_betti.json", "hopf", {"chi_b": 2}),
        BundledExample("Mayer-Vietoris cokernel", "mv_counterexample.json", "cech",
                       {"cokernel.dim": 1, "dims": [3, 3]}, cokernel=0),
        BundledExample("irrational torus", "torus_irrational.json", "cech",
                       {"betti": [1], "good_cover_hypothesis": "unverified"}),
        BundledExample("triangle nerve", "triangle_circle.json", "cech", {"betti": [1, 1], "euler": 0}),
        BundledExample("two arcs, two-component overlap", "circle_two_arcs.json", "cech", {"betti": [1, 1]}),
        BundledExample("Example 1 spectrum", "example1_profile.json", "witten",
                       {"betti": [1, 0, 1], "indices": [2, 2, 2, 2]}),
        BundledExample("Example 2 spectrum", "example2_profile.json", "witten",
                       {"betti": [1, 0, 1], "indices": [2, 2, 2, 2]}),
    ]


def _lookup(report: dict, dotted: str):
    cur: Any = report
    for part in dotted.split("."):
        cur = cur[part]
    return cur


def cmd_all(cfg: RunConfig) -> tuple[int, dict]:
    results = []
    for ex in bundled_examples():
        sub = replace(cfg, command=ex.command, input_path=ex.filename, cokernel=ex.cokernel,
                      s_values=None, t_values=None, report_path=None)
        code, rep = run(sub)
        got = {}
        passed = code == EXIT_OK
        for key, want in ex.expect.items():
            try:
                val = _clean(_lookup(rep, key))
            except (KeyError, TypeError):
                val = None
            got[key] = val
            passed = passed and val == want
        results.append({"label": ex.label, "file": ex.filename, "command": ex.command,
                        "exit": code, "expected": ex.expect, "got": got, "passed": passed})
    ok = all(r["passed"] for r in results)
    return (EXIT_OK if ok else EXIT_MISMATCH), {"command": "all", "examples": results, "all_passed": ok}


HANDLERS = {
    "cech": cmd_cech,
    "index": cmd_index,
    "hopf": cmd_hopf,
    "spectrum": cmd_spectrum,
    "witten": cmd_witten,
    "all": cmd_all,
}


def run(config: RunConfig) -> tuple[int, dict]:
    """Execute one command; input problems come back as exit 1 with an ``error`` entry."""
    try:
        return HANDLERS[config.command](config)
    except FoliageError as exc:
        err: dict[str, Any] = {"type": type(exc).__name__, "message": str(exc)}
        for attr in ("path", "line", "column", "field", "missing", "extra", "where"):
            val = getattr(exc, attr, None)
            if val not in (None, (), []):
                err[attr] = list(val) if isinstance(val, tuple) else val
        return EXIT_INPUT, {"command": config.command, "input": config.input_path, "error": err}


# --------------------------------------------------------------------------- entry point


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="foliage", description="Basic cohomology and basic Hopf index checks.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", help="input JSON file (or the name of a bundled example)")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.add_argument("--tol", help="tolerance override: a number, or name=value pairs separated by commas")
    p.add_argument("--modes", type=int, help="Galerkin basis size per family")
    p.add_argument("--s", type=_floats, help="comma-separated deformation parameters")
    p.add_argument("--t", type=_floats, help="comma-separated heat times")
    p.add_argument("--cokernel", type=int, metavar="DEGREE", help="also report the cokernel dimension of delta^DEGREE")
    p.add_argument("--report", help="also write the report to this file")
    p.add_argument("--quiet", action="store_true", help="print nothing on success")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tol = Tolerances.from_env(args.tol)
        cfg = RunConfig(
            command=args.command, input_path=args.input, tol=tol, fmt=args.format, report_path=args.report,
            modes=args.modes, s_values=args.s, t_values=args.t, cokernel=args.cokernel, quiet=args.quiet,
        )
    except ValueError as exc:
        print(f"foliage: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    code, report = run(cfg)
    text = render(report, cfg.fmt)
    if cfg.report_path:
        Path(cfg.report_path).write_text(text, encoding="utf-8")
    if code == EXIT_INPUT:
        err = report["error"]
        print(f"foliage: {err['type']}: {err['message']}", file=sys.stderr)
    if not cfg.quiet:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
