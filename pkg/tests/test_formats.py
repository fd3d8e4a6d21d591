import json

import pytest

from foliage import formats
from foliage.errors import ParseError, SchemaError


def write(tmp_path, obj, name="in.json"):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj), encoding="utf-8")
    return str(p)


def test_bundled_files_all_parse():
    names = formats.bundled_names()
    assert {"example1.json", "example2.json", "example3_betti.json", "mv_counterexample.json",
            "torus_irrational.json", "example1_profile.json", "example2_profile.json"} <= set(names)
    parsers = {"cover": formats.parse_cover, "critical": formats.parse_critical,
               "betti": formats.parse_betti, "profile": formats.parse_profile}
    for name in names:
        where, data = formats.load_json(name)
        parsers[formats.classify(data)](data, where)


def test_bundled_fallback_by_basename():
    where, data = formats.load_json("examples/example1.json")
    assert where == "<bundled>/example1.json"
    assert formats.load_json("example1")[1] == data


def test_local_file_wins(tmp_path):
    path = write(tmp_path, {"betti": [1, 0, 1]}, "example1.json")
    assert formats.load_json(path)[1] == {"betti": [1, 0, 1]}


def test_example1_records():
    crit = formats.parse_critical(formats.load_json("example1")[1])
    assert [leaf.chi_b_twisted for leaf in crit.leaf_closures] == [1, 1, 0]
    assert crit.leaf_closures[1].linearization == [[-1, 1], [-1, -1]]
    assert crit.chi_b_direct == 2


def test_json_syntax_error_has_position(tmp_path):
    path = write(tmp_path, '{"sets": ["a"],\n  "intersections": [}')
    with pytest.raises(ParseError) as exc:
        formats.load_json(path)
    assert exc.value.line == 2 and exc.value.column is not None


def test_schema_lists_missing_and_extra():
    with pytest.raises(SchemaError) as exc:
        formats.parse_critical({"leaf_closures": [], "colour": 1, "schema_version": "1"})
    assert exc.value.extra == ("colour",)
    with pytest.raises(SchemaError) as exc:
        formats.parse_critical({"leaf_closures": [{"label": "x", "linearization": [[1]]}]})
    assert exc.value.missing == ("chi_b_twisted",)


def test_schema_version_checked():
    with pytest.raises(SchemaError):
        formats.parse_betti({"betti": [1], "schema_version": "2"})


def test_field_errors_name_the_field():
    with pytest.raises(ParseError) as exc:
        formats.parse_critical({"leaf_closures": [{"label": "x", "linearization": [["a"]], "chi_b_twisted": 1}]})
    assert exc.value.field == "leaf_closures[0].linearization"
    with pytest.raises(ParseError) as exc:
        formats.parse_critical({"leaf_closures": [{"label": "x", "linearization": [[1]], "chi_b_twisted": 1.5}]})
    assert exc.value.field == "leaf_closures[0].chi_b_twisted"


def test_rational_matrix_entries():
    crit = formats.parse_critical(
        {"leaf_closures": [{"label": "x", "linearization": [["1/2", "0.25"], [0, "-3"]], "chi_b_twisted": 1}]}
    )
    assert crit.leaf_closures[0].linearization == [[0.5, 0.25], [0.0, -3.0]]


def test_cover_face_map_keys():
    cover = formats.parse_cover(formats.load_json("circle_two_arcs")[1])
    assert cover.intersections[(0, 1)] == 2
    assert cover.face_maps[((0, 1), (0,))] == (0, 0)


def test_profile_parity_spellings():
    base = {"modes": 16, "interval": "[0, pi]", "weight": "one", "field": "example2"}
    a = formats.parse_profile({**base, "parity": {"deg0": "even-even", "deg1": "odd-odd"}})
    b = formats.parse_profile({**base, "parity": {"deg0": ["even", "even"], "deg1": {"left": "odd", "right": "odd"}}})
    assert a.parity_signs() == b.parity_signs() == ((1.0, 1.0), (-1.0, -1.0))
    with pytest.raises(ParseError):
        formats.parse_profile({**base, "interval": "[0, 1]", "parity": {"deg0": "even", "deg1": "odd"}})


def test_unknown_kind():
    with pytest.raises(SchemaError):
        formats.classify({"hello": 1})
