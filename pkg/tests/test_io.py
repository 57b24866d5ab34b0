import json
from fractions import Fraction

import pytest

from tropical_transient.errors import FamilyFileError
from tropical_transient.io import (
    column_tokens,
    family_to_dict,
    load_expected,
    load_family,
    load_sequence,
    matrix_tokens,
    save_family,
)
from tropical_transient.matrix import TropicalMatrix
from tropical_transient.semiring import EPSILON


def write(tmp_path, name, payload):
    p = tmp_path / name
    if isinstance(payload, str):
        p.write_text(payload, encoding="utf-8")
    else:
        p.write_text(json.dumps(payload), encoding="utf-8")
    return p


class TestLoadFamily:
    def test_fixture_round_trip(self, tmp_path, family5_loaded):
        family, names = family5_loaded
        out = tmp_path / "family.json"
        save_family(family, out, names)
        again, again_names = load_family(out)
        assert again_names == names
        assert again.members == family.members

    def test_default_names(self, tmp_path):
        p = write(
            tmp_path,
            "f.json",
            {"members": [{"rows": [[0, -1], [-1, -2]]}, {"rows": [[0, -2], [-3, -1]]}]},
        )
        family, names = load_family(p)
        assert names == ("A1", "A2")
        assert family.size == 2
        assert family.member(1).entry(1, 0) == Fraction(-1)

    def test_token_kinds_parse_exactly(self, tmp_path):
        p = write(
            tmp_path,
            "f.json",
            {"members": [{"rows": [[0, "-1/3"], [0.5, "-inf"]]}]},
        )
        family, _ = load_family(p)
        a = family.member(1)
        assert a.entry(0, 1) == Fraction(-1, 3)
        # decimal literal parsed as an exact rational, not a binary float
        assert a.entry(1, 0) == Fraction(1, 2)
        assert a.entry(1, 1) is EPSILON

    def test_bad_json_reports_line(self, tmp_path):
        p = write(tmp_path, "f.json", '{"members": [\n  {"rows": [[0]]},\n]}')
        with pytest.raises(FamilyFileError) as exc:
            load_family(p)
        assert exc.value.position == "line 3"

    def test_not_an_object(self, tmp_path):
        p = write(tmp_path, "f.json", [1, 2, 3])
        with pytest.raises(FamilyFileError, match="'members'"):
            load_family(p)

    def test_empty_members(self, tmp_path):
        p = write(tmp_path, "f.json", {"members": []})
        with pytest.raises(FamilyFileError, match="nonempty"):
            load_family(p)

    def test_member_not_object(self, tmp_path):
        p = write(tmp_path, "f.json", {"members": [[0, 1]]})
        with pytest.raises(FamilyFileError, match="member 1"):
            load_family(p)

    def test_row_count_mismatch_against_declared_n(self, tmp_path):
        p = write(
            tmp_path,
            "f.json",
            {"n": 3, "members": [{"name": "B", "rows": [[0, -1], [-1, 0]]}]},
        )
        with pytest.raises(FamilyFileError, match="member B has 2 rows, expected 3"):
            load_family(p)

    def test_ragged_row(self, tmp_path):
        p = write(
            tmp_path,
            "f.json",
            {"members": [{"rows": [[0, -1], [-1]]}]},
        )
        with pytest.raises(FamilyFileError, match="row 2 must have 2 entries"):
            load_family(p)

    def test_bad_token_carries_position(self, tmp_path):
        p = write(
            tmp_path,
            "f.json",
            {"members": [{"name": "A1", "rows": [[0, "wat"], [0, 0]]}]},
        )
        with pytest.raises(FamilyFileError) as exc:
            load_family(p)
        assert "member A1 row 1 column 2" in exc.value.position

    def test_second_member_shape_checked_against_first(self, tmp_path):
        p = write(
            tmp_path,
            "f.json",
            {
                "members": [
                    {"rows": [[0, -1], [-1, 0]]},
                    {"rows": [[0, -1, -2], [-1, 0, -2], [-2, -2, 0]]},
                ]
            },
        )
        with pytest.raises(FamilyFileError, match="has 3 rows, expected 2"):
            load_family(p)


class TestLoadSequence:
    def test_bare_array(self, tmp_path):
        p = write(tmp_path, "s.json", [1, 3, 1, 2])
        assert load_sequence(p).indices == (1, 3, 1, 2)

    def test_wrapped_object(self, tmp_path):
        p = write(tmp_path, "s.json", {"indices": [2, 2, 1]})
        assert load_sequence(p).indices == (2, 2, 1)

    def test_fixture_sequence(self, seq44):
        assert len(seq44) == 44
        assert set(seq44.indices) == {1, 2, 3}

    def test_empty_rejected(self, tmp_path):
        p = write(tmp_path, "s.json", [])
        with pytest.raises(FamilyFileError, match="nonempty"):
            load_sequence(p)

    def test_non_integer_entry(self, tmp_path):
        p = write(tmp_path, "s.json", [1, "2", 3])
        with pytest.raises(FamilyFileError) as exc:
            load_sequence(p)
        assert exc.value.position == "entry 2"

    def test_bool_entry_rejected(self, tmp_path):
        p = write(tmp_path, "s.json", [1, True])
        with pytest.raises(FamilyFileError, match="integers"):
            load_sequence(p)


class TestLoadExpected:
    def test_fixture_expected(self, expected5):
        assert expected5["lambda_star"] == "-2/3"
        assert expected5["lambda_star_witness"] == [2, 5, 4]

    def test_decimals_stay_exact(self, tmp_path):
        p = write(tmp_path, "e.json", {"explicit_overall": 32.5})
        assert load_expected(p)["explicit_overall"] == Fraction(65, 2)

    def test_non_object_rejected(self, tmp_path):
        p = write(tmp_path, "e.json", [1, 2])
        with pytest.raises(FamilyFileError, match="object"):
            load_expected(p)


class TestTokens:
    def test_matrix_tokens(self):
        m = TropicalMatrix.from_rows(
            [[0, Fraction(-1, 2)], [EPSILON, Fraction(3)]]
        )
        assert matrix_tokens(m) == [[0, "-1/2"], ["-inf", 3]]

    def test_column_tokens(self):
        c = TropicalMatrix.from_rows([[Fraction(1, 3)], [EPSILON], [-2]])
        assert column_tokens(c) == ["1/3", "-inf", -2]

    def test_family_to_dict_layout(self, family5_loaded):
        family, names = family5_loaded
        d = family_to_dict(family, names)
        assert d["n"] == 5
        assert [m["name"] for m in d["members"]] == list(names)
        assert d["members"][0]["rows"][0] == [0, -1, -2, "-inf", "-inf"]
