"""Report assembly for the CLI commands and their text / JSON renderings.

Complex numbers are written as ``{"re": .., "im": ..}``.  A phase is either
``{"defined": true, re, im, angle, sign}`` (``sign`` is +1/-1 when the value
is within 1e-8 of it, else null) or ``{"defined": false, "magnitude": ..}``.
"""

from __future__ import annotations

import json
import math
from importlib import resources


from . import __version__
from .config import RunConfig
from .errors import UndefinedConstituent
from .models import build
from .permutation import (
    classify,
    detect_permutation,
    determinant_check,
    group_table,
    table_for_n,
)
from .phases import (
    SIGN_TOL,
    PhaseFactor,
    all_cycles,
    independent_set,
    sigma_matrix,
    try_gamma,
    verify_identities,
)
from .transport import transport_adaptive

SCHEMA_VERSION = 1
IDENTITY_TOL = 1e-12
SIGN_NOTE = f"sign is reported as +1/-1 when a phase lies within {SIGN_TOL:g} of that value; angles in radians"

COMMAND_SECTIONS = {
    "transport": ["U"],
    "phases": ["U", "sigmas", "gammas", "independent_set"],
    "classify": ["U", "classification"],
    "identities": ["U", "identities"],
}


def cplx(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def phase(p: PhaseFactor) -> dict:
    if not p.defined:
        return {"defined": False, "magnitude": p.magnitude}
    return {"defined": True, **cplx(p.value), "angle": p.angle, "sign": p.sign()}


def _finite(x: float):
    return x if math.isfinite(x) else None


def _cycle_entry(cycle, p: PhaseFactor) -> dict:
    return {"cycle": list(cycle.indexes), "label": cycle.label(), "phase": phase(p)}


def run(config: RunConfig, command: str) -> dict:
    """Execute one of the transport-based commands; exceptions propagate."""
    outputs = list(config.outputs)
    for section in COMMAND_SECTIONS[command]:
        if section not in outputs:
            outputs.append(section)
    config.outputs = outputs
    path = build(config.model)
    result = transport_adaptive(path, config.transport)
    tol = config.tolerances
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": command,
        "config": config.to_dict(),
        "diagnostics": {
            "dim": result.dim,
            "steps_used": result.steps_used,
            "min_gap": _finite(result.min_gap_along_path),
            "convergence_estimate": result.convergence_estimate,
            "unitarity_defect": result.unitarity_defect,
            "det_U": cplx(result.det),
        },
        "notes": [SIGN_NOTE],
    }
    if "U" in outputs:
        report["U"] = [[cplx(z) for z in row] for row in result.U]
    if "sigmas" in outputs:
        report["sigmas"] = [[phase(p) for p in row] for row in sigma_matrix(result, tol.undef_tol)]
    if "gammas" in outputs:
        report["gammas"] = [_cycle_entry(c, try_gamma(result, c, tol.undef_tol)) for c in all_cycles(result.dim)]
    if "independent_set" in outputs:
        try:
            members = independent_set(result, tol.undef_tol).members()
            report["independent_set"] = {
                "available": True,
                "count": len(members),
                "members": [_cycle_entry(c, p) for c, p in members.items()],
            }
        except UndefinedConstituent as exc:
            report["independent_set"] = {"available": False, "missing_links": [list(l) for l in exc.links]}
    if "classification" in outputs:
        report["classification"] = _classification(result, tol)
    if "identities" in outputs:
        rep = verify_identities(result, IDENTITY_TOL, tol.undef_tol)
        report["identities"] = {"tol": rep.tol, "passed": rep.passed, "families": rep.summary()}
    return report


def _classification(result, tol) -> dict:
    dom = detect_permutation(result, tol.dominance_factor)
    out = {
        "dominance": {
            "candidate": list(dom.candidate),
            "margins": [_finite(m) for m in dom.margins],
            "dominance_factor": dom.dominance_factor,
        },
        "detected": dom.detected is not None,
    }
    if dom.detected is not None:
        P = dom.detected
        row = _table_row(classify(P))
        value, residual = determinant_check(result, P, tol.undef_tol)
        row["determinant_check"] = {"value": phase(value), "residual": residual}
        row["well_defined_values"] = [
            _cycle_entry(c, try_gamma(result, c, tol.undef_tol)) for c in classify(P).well_defined
        ]
        out["permutation"] = row
    return out


def _table_row(cls) -> dict:
    P = cls.permutation
    return {
        "images": list(P.images),
        "cycles": [list(c) for c in P.cycles],
        "sign": P.sign,
        "well_defined": [c.label() for c in cls.well_defined],
        "condition": str(cls.determinant_condition),
        "condition_rhs": cls.determinant_condition.rhs,
        "real_case_count": cls.real_case_count,
        "starred": cls.starred,
        # with several reversed pairs, (1 n)(2 n-1)... is not the consecutive-pair labelling
        "literal_cycle_labels": cls.starred and sum(len(c) == 2 for c in P.cycles) >= 2,
    }


def table(n: int, expand: bool | None = None) -> dict:
    """Rows of the permutation table; grouped by cycle type unless ``expand``.

    By default tables up to n = 3 are listed in full.
    """
    rows = table_for_n(n)
    expand = n <= 3 if expand is None else expand
    if expand:
        entries = [{**_table_row(r), "multiplicity": 1} for r in rows]
    else:
        entries = [{**_table_row(g.representative), "multiplicity": g.multiplicity} for g in group_table(rows)]
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": "table",
        "n": n,
        "expanded": expand,
        "rows": entries,
    }


def error_report(command: str, exc: BaseException, exit_code: int, config: RunConfig | None = None) -> dict:
    err = {"type": type(exc).__name__, "message": str(exc), "exit_code": exit_code}
    if getattr(exc, "field", None):
        err["field"] = exc.field
    out = {"schema_version": SCHEMA_VERSION, "tool_version": __version__, "command": command, "error": err}
    if config is not None:
        out["config"] = config.to_dict()
    return out


def schema() -> dict:
    return json.loads(resources.files("geophase").joinpath("report.schema.json").read_text(encoding="utf-8"))


def validate(report: dict) -> None:
    """Raise ``jsonschema.ValidationError`` if ``report`` does not match the schema."""
    import jsonschema

    jsonschema.validate(report, schema())


# --- text rendering -------------------------------------------------------


def _fmt_c(z: dict) -> str:
    return f"{z['re']:+.10f}{z['im']:+.10f}i"


def _fmt_phase(p: dict) -> str:
    if not p["defined"]:
        return f"undefined (|U|={p['magnitude']:.2e})"
    if p["sign"] is not None:
        return f"{p['sign']:+d}"
    return f"exp({p['angle']:+.10f} i)"


def render_text(report: dict) -> str:
    if "error" in report:
        e = report["error"]
        return f"error [{e['type']}]: {e['message']}\n"
    if report["command"] == "table":
        return render_table(report)
    lines = []
    m = report["config"]["model"]
    lines.append(f"model: {m['name']} {json.dumps(m['parameters'])}")
    d = report["diagnostics"]
    lines.append(
        f"steps_used={d['steps_used']}  min_gap={d['min_gap']}  "
        f"convergence_estimate={d['convergence_estimate']:.3e}  |det U - 1|="
        f"{abs(complex(d['det_U']['re'], d['det_U']['im']) - 1):.2e}"
    )
    if "U" in report:
        lines.append("U:")
        lines += ["  " + "  ".join(_fmt_c(z) for z in row) for row in report["U"]]
    if "sigmas" in report:
        lines.append("sigma:")
        for j, row in enumerate(report["sigmas"], 1):
            lines.append("  " + "  ".join(f"s{j}{k}={_fmt_phase(p)}" for k, p in enumerate(row, 1)))
    if "gammas" in report:
        lines.append("gamma:")
        lines += [f"  {g['label']} = {_fmt_phase(g['phase'])}" for g in report["gammas"]]
    if "independent_set" in report:
        s = report["independent_set"]
        if s["available"]:
            lines.append(f"independent set ({s['count']}): " + ", ".join(
                f"{g['label']}={_fmt_phase(g['phase'])}" for g in s["members"]))
        else:
            lines.append("independent set unavailable; undefined links: " + ", ".join(
                f"({j},{k})" for j, k in s["missing_links"]))
    if "classification" in report:
        c = report["classification"]
        margins = ", ".join("inf" if x is None else f"{x:.3g}" for x in c["dominance"]["margins"])
        lines.append(f"dominance margins: {margins} (factor {c['dominance']['dominance_factor']:g})")
        if c["detected"]:
            row = c["permutation"]
            lines.append(f"endpoint permutation: {' '.join(map(str, row['images']))}  sign {row['sign']:+d}")
            lines.append("well-defined: " + ", ".join(
                f"{g['label']}={_fmt_phase(g['phase'])}" for g in row["well_defined_values"]))
            chk = row["determinant_check"]
            lines.append(f"determinant rule {row['condition']}: product={_fmt_phase(chk['value'])} "
                         f"residual={chk['residual']:.2e}")
        else:
            lines.append("no endpoint permutation detected")
    if "identities" in report:
        i = report["identities"]
        lines.append(f"identities (tol {i['tol']:g}): {'PASS' if i['passed'] else 'FAIL'}")
        for name, fam in i["families"].items():
            lines.append(f"  {name}: {fam['checked']} checked, max residual {fam['max_residual']:.2e}")
    lines += [f"note: {n}" for n in report.get("notes", [])]
    return "\n".join(lines) + "\n"


def render_table(report: dict) -> str:
    rows = report["rows"]
    cells = [("P", "phase factors", "condition |U|=1", "# cases", "")]
    for r in rows:
        mark = ("*" if r["starred"] else "") + ("†" if r["literal_cycle_labels"] else "")
        perm = " ".join(map(str, r["images"])) + (f" {mark}" if mark else "")
        extra = f"[{r['multiplicity'] - 1} similar]" if r["multiplicity"] > 1 else ""
        cells.append((perm, " ".join(r["well_defined"]), r["condition"], str(r["real_case_count"]), extra))
    widths = [max(len(c[i]) for c in cells) for i in range(5)]
    out = [f"n = {report['n']}"]
    for c in cells:
        out.append("  ".join(s.ljust(w) for s, w in zip(c, widths)).rstrip())
    out.append("* order-reversing permutation (H(s2) = -H(s1));  † labels are the literal cycles of P")
    out.append("# cases: value combinations (+1/-1) allowed for a real Hamiltonian")
    return "\n".join(out) + "\n"
