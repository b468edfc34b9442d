"""Report assembly: JSON (deterministic, schema-checked) and plain text."""
from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources

from . import __version__
from .checks import CheckReport, Verdict
from .kernel.cones import DIM_CAP
from .kernel.linalg import fmt_rational
from .model.instance import GmpInstance
from .model.maps import ORDER_CAP

SCHEMA_VERSION = "1.0"


def jsonable(obj):
    """Rationals become "p/q" strings; dataclass-like objects use to_dict."""
    if isinstance(obj, Fraction):
        return fmt_rational(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalars
        return jsonable(obj.item())
    return str(obj)


def verdict_dict(v: Verdict) -> dict:
    out = {
        "status": v.status,
        "exact": v.exact,
        "derived": v.derived_from is not None,
        "certificate": jsonable(v.certificate),
        "witness": jsonable(v.witness),
        "notes": [str(n) for n in v.notes],
    }
    if v.derived_from is not None:
        out["arrow"] = f"{v.derived_from} -> {v.check}"
    return out


def build_report(inst: GmpInstance, rep: CheckReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "cqlab", "version": __version__,
                 "caps": {"cone_dimension": DIM_CAP, "derivative_order": ORDER_CAP}},
        "seed": rep.seed,
        "instance": jsonable(inst.summary()),
        "verdicts": {k: verdict_dict(v) for k, v in rep.verdicts.items()},
        "closure": {
            "computed": [k for k, v in rep.verdicts.items() if v.derived_from is None],
            "derived": [k for k, v in rep.verdicts.items() if v.derived_from is not None],
        },
        "probe": jsonable(rep.probe),
        "probe_notes": list(rep.probe_notes),
    }


def verdicts_report(inst: GmpInstance, verdicts: dict, seed: int = 0) -> dict:
    """Report for an explicit list of checks (no closure, no probe)."""
    return build_report(inst, CheckReport(verdicts, seed=seed))


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def load_schema() -> dict:
    text = resources.files("cqlab").joinpath("schema/report.schema.json").read_text()
    return json.loads(text)


def _status_text(name: str, v: dict) -> str:
    s = f"{name:<12} {v['status']}"
    if v.get("arrow"):
        s += f"  (derived: {v['arrow']})"
    elif v["certificate"].get("rung"):
        s += f"  [{v['certificate']['rung']}]"
    return s


def to_text(report: dict, timings: dict | None = None) -> str:
    inst = report["instance"]
    lines = [
        f"instance {inst['name'] or '(unnamed)'}: n={inst['n']} d={inst['d']} gamma={inst['gamma']}"
        f" ({inst['gamma_class']}) point=({', '.join(inst['point'])})",
        f"map: {', '.join(inst['map'])}",
        "",
    ]
    for name, v in report["verdicts"].items():
        lines.append(_status_text(name, v))
        w = v.get("witness")
        if isinstance(w, dict):
            if "terms" in w:
                for term in w["terms"]:
                    lines.append(f"{'':13}x = ({', '.join(map(str, term['x']))})"
                                 f"  values = {', '.join(map(str, term['values']))}")
            else:
                lines.append(f"{'':13}witness {json.dumps(w, sort_keys=True)}")
        for note in v["notes"]:
            lines.append(f"{'':13}note: {note}")
    probe = report.get("probe")
    lines.append("")
    if probe:
        extra = f"kappa={probe['kappa']}" if probe["verdict"] == "BOUNDED" else f"slope={probe['slope']}"
        lines.append(f"mscq probe: {probe['verdict']} {extra}")
    for note in report.get("probe_notes", []):
        lines.append(f"mscq probe: {note}")
    if timings:
        lines.append("timing: " + ", ".join(f"{k}={v:.3f}s" for k, v in timings.items()))
    return "\n".join(lines) + "\n"
