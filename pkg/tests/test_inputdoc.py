import pytest
from hypothesis import given
from hypothesis import strategies as st

from qperiod.inputdoc import InputDocument, InputError

BLOWUP = """\
# blow-up of P(1,1,3) in one point
rays:
  1 -1
  0 1
  -1 2
  -2 1
cones:
  1 2
  2 3
  3 4
  4 1
weights:
  3 0 1 1
  -1 1 -1 0
extend:
  -1 1
order: 6
"""


def test_parse_fan_document():
    doc = InputDocument.parse(BLOWUP)
    assert doc.mode == "fan"
    assert doc.cones[0] == [0, 1]
    assert doc.extend == [[-1, 1]]
    assert doc.build_fan().anticanonical == (5, -1)


def test_render_round_trip():
    doc = InputDocument.parse(BLOWUP)
    assert InputDocument.parse(doc.render()) == doc
    assert doc.canonical().render() == doc.render()


def test_error_carries_line_number():
    bad = BLOWUP.replace("  0 1\n", "  0 x\n", 1)
    with pytest.raises(InputError) as err:
        InputDocument.parse(bad)
    assert err.value.line == 4


def test_unknown_key_rejected():
    with pytest.raises(InputError, match="unknown key"):
        InputDocument.parse("weights:\n  1 1 1\ncolour: red\n")


def test_duplicate_key_rejected():
    with pytest.raises(InputError, match="duplicate"):
        InputDocument.parse("weights:\n  1 1 1\nweights:\n  1 1 1\n")


def test_lift_rows_must_match_bundles():
    with pytest.raises(InputError, match="lifting rows"):
        InputDocument.parse("weights:\n  1 1 1 3\nbundles:\n  4\nlift:\n  1\n  2\n")


def test_antik_check():
    doc = InputDocument.parse("weights:\n  1 1 1 3\nextend_rows:\n  0 0 0 1\nbundles:\n  4\nlift:\n  1\nantiK: 2\n")
    doc.check_antiK(doc.build_extended())
    wrong = InputDocument.parse("weights:\n  1 1 1 3\nbundles:\n  4\nantiK: 3\n")
    with pytest.raises(InputError, match="disagrees"):
        wrong.check_antiK(wrong.build_extended())


rows = st.lists(st.lists(st.integers(-9, 9), min_size=3, max_size=3), min_size=1, max_size=3)


@given(rows, st.integers(0, 12))
def test_git_documents_round_trip(weights, order):
    doc = InputDocument(mode="git", weights=weights, order=order)
    assert InputDocument.parse(doc.render()) == doc
