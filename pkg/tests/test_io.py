import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from convexequiv import ConvexBody, GroupTag, Scenario, sample
from convexequiv.io import (
    body_doc,
    dumps,
    fmt,
    read_body,
    read_scenario,
    read_transform,
    scenario_doc,
    transform_doc,
    write_document,
)

from oracles import bodies

T = ConvexBody([(0, 0), (1, 0), (0, 1)])


@pytest.mark.parametrize(
    "x, text", [(1, "1"), (1.0, "1.0"), (0.1, "0.10000000000000001"), (-2.5e-20, "-2.4999999999999999e-20"), (True, "true")]
)
def test_fmt(x, text):
    assert fmt(x) == text


def test_fmt_rejects_nan():
    with pytest.raises(ValueError):
        fmt(float("nan"))


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_fmt_round_trips(x):
    assert float(fmt(x)) == x


@given(bodies(1, 10))
def test_body_round_trip(body):
    back = read_body(dumps(body_doc(body)))
    assert back == body
    assert back.vertices.tobytes() == body.vertices.tobytes()


@given(st.integers(0, 2**32 - 1), st.sampled_from(list(GroupTag)), st.sampled_from([2, 3]))
def test_transform_round_trip(seed, group, n):
    g = sample(group, n, seed=seed)
    assert read_transform(dumps(transform_doc(g))).allclose(g, 0)


def test_output_is_stable():
    assert dumps(body_doc(T)) == dumps(body_doc(ConvexBody(T.vertices[::-1])))
    assert json.loads(dumps(body_doc(T))) == {"type": "body", "dim": 2, "vertices": [[0, 0], [0, 1], [1, 0]]}


def test_bare_vertex_list():
    assert read_body("[[0, 0], [1, 0], [0, 1]]") == T


def test_declared_dimension_checked():
    with pytest.raises(ValueError):
        read_body('{"dim": 3, "vertices": [[0, 0], [1, 1]]}')


def test_wrong_document_type():
    with pytest.raises(ValueError):
        read_body('{"type": "transform", "vertices": [[0, 0]]}')


def test_scenario_round_trip():
    s = Scenario(GroupTag.SIM, ((T, (0.2, 0.2)), (ConvexBody([(0, 0), (3, 0), (0, 1)]), (1.0, 1 / 3))),
                 deltas=(0.1, 0.1))
    back = read_scenario(dumps(scenario_doc(s)))
    assert back.group is GroupTag.SIM and back.deltas == (0.1, 0.1)
    for (K, y), (K2, y2) in zip(s.pairs, back.pairs):
        assert K == K2
        np.testing.assert_array_equal(y, y2)
    assert dumps(scenario_doc(back)) == dumps(scenario_doc(s))


def test_scenario_with_body_targets_and_relative_paths(tmp_path):
    write_document(body_doc(T), tmp_path / "t.json")
    write_document(body_doc(ConvexBody([(0, 0), (1, 1)])), tmp_path / "seg.json")
    (tmp_path / "s.json").write_text(json.dumps(
        {"type": "scenario", "group": "Euclidean", "pairs": [{"body": "t.json", "target": "seg.json"}]}
    ))
    s = read_scenario(str(tmp_path / "s.json"))
    assert s.body_targets and s.pairs[0][0] == T
    assert s.pairs[0][1] == ConvexBody([(0, 0), (1, 1)])
