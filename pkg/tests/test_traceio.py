import json
from importlib import resources

import jsonschema
import pytest

from levicore.distcore import DerivationTrace, core_iterate, jacobian_module
from levicore.forms import FormModule
from levicore.kohn import build_rigid, check_core_containment, kohn_run
from levicore.polycalc import Ring
from levicore.traceio import emit_trace, load_trace, trace_to_dict

STAMP = "2000-01-01T00:00:00Z"
C1 = Ring.complex(1)
Z = Ring(("z",))
R3 = Ring(("x", "y", "z"))


@pytest.fixture(scope="module")
def schema():
    text = resources.files("levicore").joinpath("data/trace.schema.json").read_text()
    return json.loads(text)


def z4():
    return build_rigid(C1.parse("z1^2*zbar1^2"), [C1.parse("z1^2")])


def traces():
    whitney = FormModule.parse(R3, ["x*dx - y*dz", "z*dx + dy", "z*dy + x*dz"])
    return {
        "empty": DerivationTrace(R3),
        "square": core_iterate(jacobian_module([Z.parse("z^2")])),
        "whitney": core_iterate(whitney, max_steps=10),
        "capped": core_iterate(whitney, max_steps=1),
        "kohn_z4": kohn_run(z4()),
        "kohn_flat": kohn_run(build_rigid(C1.zero())),
        "containment": check_core_containment(z4(), 2),
    }


ALL = traces()


@pytest.mark.parametrize("name", sorted(ALL))
def test_round_trip(name, schema):
    text = emit_trace(ALL[name], timestamp=STAMP)
    doc = json.loads(text)
    jsonschema.validate(doc, schema)
    again = emit_trace(load_trace(text), timestamp=STAMP)
    assert again == text


def test_empty_trace_has_no_steps():
    doc = trace_to_dict(ALL["empty"], STAMP)
    assert doc["steps"] == []
    assert doc["verdict"] == "unknown"


def test_kohn_z4_document():
    doc = trace_to_dict(ALL["kohn_z4"], STAMP)
    assert len(doc["steps"]) == 3
    assert doc["terminated"] is True and doc["step_of_termination"] == 2
    assert doc["steps"][1]["hermitian"]
    dets = doc["steps"][1]["determinants"]
    assert all({"value", "j", "tuple"} <= set(d) for d in dets)


def test_cap_hit_is_unknown():
    doc = trace_to_dict(ALL["capped"], STAMP)
    assert doc["cap_hit"] is True and doc["verdict"] == "unknown"


def test_square_document():
    doc = trace_to_dict(ALL["square"], STAMP)
    assert doc["stabilized_at"] == 2 and doc["verdict"] == "trivial"
    assert [s["status"] for s in doc["steps"]] == ["exact"] * 3


def test_timestamp_only_in_header():
    a = json.loads(emit_trace(ALL["whitney"], timestamp="2000-01-01T00:00:00Z"))
    b = json.loads(emit_trace(ALL["whitney"], timestamp="2001-02-03T04:05:06Z"))
    assert a["header"] != b["header"]
    a.pop("header"), b.pop("header")
    assert a == b


def test_text_reports():
    assert "core TRIVIAL, stabilized at step 2" in emit_trace(ALL["square"], "text")
    assert "kohn TERMINATED, 1 in I_2" in emit_trace(ALL["kohn_z4"], "text")
    assert "kohn STALLED at step 1" in emit_trace(ALL["kohn_flat"], "text")
    assert "containment PASSED to depth 2" in emit_trace(ALL["containment"], "text")


def test_bad_inputs():
    with pytest.raises(ValueError):
        emit_trace(ALL["square"], "yaml")
    with pytest.raises(TypeError):
        emit_trace(object())
    with pytest.raises(ValueError):
        load_trace('{"kind": "nothing"}')
