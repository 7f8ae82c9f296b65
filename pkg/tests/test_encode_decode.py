import json

import pytest
from hypothesis import given, strategies as st

from uqpilot.campaign.config import DecoderSpec
from uqpilot.campaign.decode import decode_output
from uqpilot.campaign.encode import placeholders, render
from uqpilot.errors import DecodeError, EncodingError


class TestRender:
    def test_direct_substitution(self):
        assert render("rate=$infection_rate\n", {"infection_rate": 0.07}) == "rate=0.07\n"

    def test_escape_rule(self):
        assert render("cost: $$5 for $x", {"x": 1}) == "cost: $5 for 1"
        assert render("$$$$", {}) == "$$"

    def test_unknown_placeholder(self):
        with pytest.raises(EncodingError, match="typo_rate"):
            render("$typo_rate", {"x": 1})

    def test_float_round_trip(self):
        value = 0.1 + 0.2
        out = render("v=$v", {"v": value})
        assert float(out[2:]) == value

    def test_alternate_delimiter(self):
        assert render("%x and %%", {"x": 2}, delimiter="%") == "2 and %"

    def test_adjacent_placeholders(self):
        assert render("$a$b", {"a": 1, "b": 2}) == "12"

    @given(st.floats(allow_nan=False, allow_infinity=False))
    def test_any_finite_float_round_trips(self, value):
        out = render("$v", {"v": value})
        assert float(out) == value

    def test_placeholder_scan(self):
        # braces are not part of the grammar; $$c escapes the delimiter
        text = "$a $b $$c $a ${ignored}"
        assert placeholders(text) == ["a", "b"]


class TestDecodeCsv:
    def spec(self, **kw):
        defaults = dict(
            output_relpath="out.csv", format="csv",
            qoi_columns=("dead",), index_column="t",
        )
        defaults.update(kw)
        return DecoderSpec(**defaults)

    def test_direct_parse(self, tmp_path):
        (tmp_path / "out.csv").write_text("t,dead\n0,0\n1,3\n")
        index, cols = decode_output(tmp_path, self.spec())
        assert index == [0.0, 1.0]
        assert cols == {"dead": [0.0, 3.0]}

    def test_missing_file(self, tmp_path):
        with pytest.raises(DecodeError):
            decode_output(tmp_path, self.spec())

    def test_missing_column(self, tmp_path):
        (tmp_path / "out.csv").write_text("t,alive\n0,1\n")
        with pytest.raises(DecodeError, match="dead"):
            decode_output(tmp_path, self.spec())

    def test_unparsable_value(self, tmp_path):
        (tmp_path / "out.csv").write_text("t,dead\n0,zero\n")
        with pytest.raises(DecodeError, match="zero"):
            decode_output(tmp_path, self.spec())

    def test_index_must_increase(self, tmp_path):
        (tmp_path / "out.csv").write_text("t,dead\n0,1\n0,2\n")
        with pytest.raises(DecodeError, match="strictly"):
            decode_output(tmp_path, self.spec())

    def test_no_index_column(self, tmp_path):
        (tmp_path / "out.csv").write_text("dead\n5\n6\n")
        index, cols = decode_output(tmp_path, self.spec(index_column=None))
        assert index is None
        assert cols == {"dead": [5.0, 6.0]}

    def test_empty_file(self, tmp_path):
        (tmp_path / "out.csv").write_text("t,dead\n")
        with pytest.raises(DecodeError, match="no data rows"):
            decode_output(tmp_path, self.spec())


class TestDecodeJsonLines:
    def test_parse(self, tmp_path):
        spec = DecoderSpec(
            output_relpath="out.jsonl", format="json-lines",
            qoi_columns=("a", "b"), index_column="t",
        )
        rows = [{"t": 1, "a": 0.5, "b": 2}, {"t": 2, "a": 0.6, "b": 3}]
        (tmp_path / "out.jsonl").write_text("\n".join(json.dumps(r) for r in rows) + "\n")
        index, cols = decode_output(tmp_path, spec)
        assert index == [1.0, 2.0]
        assert cols == {"a": [0.5, 0.6], "b": [2.0, 3.0]}

    def test_bad_json(self, tmp_path):
        spec = DecoderSpec(
            output_relpath="out.jsonl", format="json-lines", qoi_columns=("a",),
        )
        (tmp_path / "out.jsonl").write_text('{"a": 1}\nnot json\n')
        with pytest.raises(DecodeError, match="line 2"):
            decode_output(tmp_path, spec)
