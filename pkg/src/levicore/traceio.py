"""JSON and text serialization of derivation traces, Kohn traces and containment reports.

Documents carry a ``header`` (tool version and timestamp) kept apart from
the body, so two runs on the same input differ only inside the header.
``load_trace`` inverts ``emit_trace`` for the three trace kinds.
"""

from __future__ import annotations

import json
from datetime import datetime, timezone

from . import __version__
from .distcore import (
    UNKNOWN,
    DerivationStep,
    DerivationTrace,
    SupportIdeal,
    kernel_variety,
)
from .forms import FormModule
from .groebner import Ideal
from .kohn import (
    ContainmentEntry,
    ContainmentReport,
    DefiningGerm,
    Determinant,
    KohnStep,
    KohnTrace,
)
from .polycalc import Ring

__all__ = [
    "SCHEMA_VERSION",
    "emit_trace",
    "load_trace",
    "trace_to_dict",
    "trace_from_dict",
    "ring_to_dict",
    "ring_from_dict",
    "header",
    "dumps",
    "core_verdict_word",
    "text_of",
]

SCHEMA_VERSION = 1


def header(timestamp: str | None = None) -> dict:
    if timestamp is None:
        timestamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    return {"tool": "levicore", "version": __version__, "schema": SCHEMA_VERSION, "timestamp": timestamp}


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def ring_to_dict(ring: Ring) -> dict:
    inv = None if ring.involution is None else [list(p) for p in ring.involution]
    return {"variables": list(ring.variables), "involution": inv}


def ring_from_dict(d: dict) -> Ring:
    inv = d.get("involution")
    return Ring(tuple(d["variables"]), None if inv is None else tuple(tuple(p) for p in inv))


def _strs(polys) -> list[str]:
    return [str(p) for p in polys]


def core_verdict_word(verdict) -> str:
    if verdict == UNKNOWN:
        return "unknown"
    return "trivial" if verdict else "nontrivial"


# ----------------------------------------------------------------------
# to dict


def _derivation_body(t: DerivationTrace) -> dict:
    steps = []
    for k, s in enumerate(t.steps):
        steps.append(
            {
                "index": k,
                "generators": s.module.strings(),
                "support": {"generators": _strs(s.support.generators), "provenance": s.support.provenance},
                "vanishing": _strs(s.vanishing.generators),
                "status": s.status,
                "kernel": _strs(s.variety.ideal.generators),
                "hermitian": _strs(s.hermitian),
            }
        )
    return {
        "kind": "derivation",
        "ring": ring_to_dict(t.ring),
        "steps": steps,
        "stabilized_at": t.stabilized_at,
        "cap_hit": t.cap_hit,
        "verdict": core_verdict_word(t.verdict),
    }


def _kohn_body(t: KohnTrace) -> dict:
    g = t.germ
    steps = []
    for k, s in enumerate(t.steps):
        steps.append(
            {
                "index": k,
                "generators": _strs(s.ideal.generators),
                "determinants": [
                    {"value": str(d.value), "j": d.j, "tuple": list(d.tuple)} for d in s.determinants
                ],
                "status": s.status,
                "hermitian": _strs(s.hermitian),
            }
        )
    return {
        "kind": "kohn",
        "ring": ring_to_dict(g.ring),
        "germ": {
            "r": str(g.r),
            "h": None if g.h is None else str(g.h),
            "F": None if g.F is None else _strs(g.F),
        },
        "product_depth": t.product_depth,
        "steps": steps,
        "terminated": t.terminated,
        "step_of_termination": t.step_of_termination,
        "stalled_at": t.stalled_at,
        "cap_hit": t.cap_hit,
        "verdict": t.verdict,
    }


def _containment_body(rep: ContainmentReport) -> dict:
    return {
        "kind": "containment",
        "depth": rep.depth,
        "kohn": _kohn_body(rep.kohn),
        "core": _derivation_body(rep.core),
        "entries": [{"k": e.k, "generator": str(e.generator), "passed": e.passed} for e in rep.entries],
        "passed": rep.passed,
    }


def trace_to_dict(trace, timestamp: str | None = None) -> dict:
    if isinstance(trace, DerivationTrace):
        body = _derivation_body(trace)
    elif isinstance(trace, KohnTrace):
        body = _kohn_body(trace)
    elif isinstance(trace, ContainmentReport):
        body = _containment_body(trace)
    else:
        raise TypeError(f"cannot serialize {type(trace).__name__}")
    body["header"] = header(timestamp)
    return body


# ----------------------------------------------------------------------
# from dict


def _derivation_from(d: dict) -> DerivationTrace:
    ring = ring_from_dict(d["ring"])
    t = DerivationTrace(ring, stabilized_at=d["stabilized_at"], cap_hit=d["cap_hit"])
    for s in d["steps"]:
        module = FormModule.parse(ring, s["generators"])
        sup = SupportIdeal(Ideal.parse(ring, s["support"]["generators"]), s["support"]["provenance"])
        t.steps.append(
            DerivationStep(
                module,
                sup,
                Ideal.parse(ring, s["vanishing"]),
                s["status"],
                kernel_variety(module),
                tuple(ring.parse(p) for p in s["hermitian"]),
            )
        )
    return t


def _kohn_from(d: dict) -> KohnTrace:
    ring = ring_from_dict(d["ring"])
    gd = d["germ"]
    g = DefiningGerm(
        ring,
        ring.parse(gd["r"]),
        None if gd["h"] is None else ring.parse(gd["h"]),
        None if gd["F"] is None else tuple(ring.parse(f) for f in gd["F"]),
    )
    t = KohnTrace(
        g,
        terminated=d["terminated"],
        step_of_termination=d["step_of_termination"],
        stalled_at=d["stalled_at"],
        cap_hit=d["cap_hit"],
        product_depth=d["product_depth"],
    )
    for s in d["steps"]:
        dets = tuple(Determinant(ring.parse(x["value"]), x["j"], tuple(x["tuple"])) for x in s["determinants"])
        t.steps.append(
            KohnStep(
                Ideal.parse(ring, s["generators"]),
                dets,
                s["status"],
                tuple(ring.parse(p) for p in s["hermitian"]),
            )
        )
    return t


def trace_from_dict(d: dict):
    kind = d.get("kind")
    if kind == "derivation":
        return _derivation_from(d)
    if kind == "kohn":
        return _kohn_from(d)
    if kind == "containment":
        kt = _kohn_from(d["kohn"])
        ring = kt.germ.ring
        rep = ContainmentReport(d["depth"], kt, _derivation_from(d["core"]))
        rep.entries = [ContainmentEntry(e["k"], ring.parse(e["generator"]), e["passed"]) for e in d["entries"]]
        return rep
    raise ValueError(f"not a trace document (kind={kind!r})")


def load_trace(text: str | dict):
    """Rebuild a trace from a JSON document produced by :func:`emit_trace`."""
    d = json.loads(text) if isinstance(text, str) else text
    return trace_from_dict(d)


# ----------------------------------------------------------------------
# text


def _derivation_text(d: dict, indent: str = "") -> list[str]:
    out = []
    for s in d["steps"]:
        sup = ", ".join(s["support"]["generators"]) or "0"
        out.append(f"{indent}step {s['index']} [{s['status']}]: {len(s['generators'])} generators, support ({sup})")
        for h in s["hermitian"]:
            out.append(f"{indent}  hermitian part {h}")
    v = d["verdict"]
    if d["cap_hit"]:
        out.append(f"{indent}core UNKNOWN, cap hit after {len(d['steps']) - 1} steps")
    elif d["stabilized_at"] is None:
        out.append(f"{indent}core UNKNOWN, not stabilized")
    else:
        out.append(f"{indent}core {v.upper()}, stabilized at step {d['stabilized_at']}")
    return out


def _kohn_text(d: dict, indent: str = "") -> list[str]:
    out = [f"{indent}r = {d['germ']['r']}  (product depth {d['product_depth']})"]
    for s in d["steps"]:
        out.append(f"{indent}I_{s['index']} [{s['status']}] = ({', '.join(s['generators'])})")
        for h in s["hermitian"]:
            out.append(f"{indent}  hermitian part {h}")
    if d["terminated"]:
        out.append(f"{indent}kohn TERMINATED, 1 in I_{d['step_of_termination']}")
    elif d["stalled_at"] is not None:
        out.append(f"{indent}kohn STALLED at step {d['stalled_at']}")
    else:
        out.append(f"{indent}kohn UNKNOWN, cap hit after {len(d['steps']) - 1} steps")
    return out


def text_of(d: dict) -> str:
    kind = d["kind"]
    if kind == "derivation":
        lines = _derivation_text(d)
    elif kind == "kohn":
        lines = _kohn_text(d)
    elif kind == "containment":
        lines = ["kohn chain:"] + _kohn_text(d["kohn"], "  ") + ["levi core chain:"] + _derivation_text(d["core"], "  ")
        for e in d["entries"]:
            if not e["passed"]:
                lines.append(f"FAILED k={e['k']}: {e['generator']}")
        lines.append(f"containment {'PASSED' if d['passed'] else 'FAILED'} to depth {d['depth']}")
    else:
        raise ValueError(f"no text form for kind {kind!r}")
    return "\n".join(lines) + "\n"


def emit_trace(trace, format: str = "json", timestamp: str | None = None) -> str:
    """Serialize a trace as JSON (sorted keys, timestamp only in the header) or as a text report."""
    d = trace_to_dict(trace, timestamp)
    if format == "json":
        return dumps(d)
    if format == "text":
        return text_of(d)
    raise ValueError(f"unknown format {format!r}")
