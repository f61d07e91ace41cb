from itertools import product

import pytest

from multiorder import groups
from multiorder.errors import DimensionMismatchError, InputError
from multiorder.groups import GroupSpec


@pytest.mark.parametrize("d", [1, 2, 3])
def test_group_axioms_exhaustive_on_box2(d):
    spec = GroupSpec.grid(d)
    elems = sorted(groups.box(spec, 2))
    assert len(elems) == 5**d
    e = groups.identity(spec)
    for a in elems:
        assert groups.compose(spec, a, e) == a
        assert groups.compose(spec, e, a) == a
        assert groups.compose(spec, a, groups.inverse(spec, a)) == e
    # associativity over every triple
    for a, b, c in product(elems[:: max(1, len(elems) // 25)], repeat=3):
        left = groups.compose(spec, groups.compose(spec, a, b), c)
        right = groups.compose(spec, a, groups.compose(spec, b, c))
        assert left == right


def test_associativity_full_on_line():
    spec = GroupSpec.line()
    elems = sorted(groups.box(spec, 2))
    for a, b, c in product(elems, repeat=3):
        assert groups.compose(spec, groups.compose(spec, a, b), c) == groups.compose(
            spec, a, groups.compose(spec, b, c)
        )


def test_line_accepts_bare_ints():
    spec = GroupSpec.line()
    assert groups.compose(spec, 3, -5) == (-2,)
    assert groups.inverse(spec, 7) == (-7,)


@pytest.mark.parametrize("d", [1, 2])
def test_encoding_round_trip_on_box8(d):
    spec = GroupSpec.grid(d)
    for g in groups.box(spec, 8):
        assert groups.decode(spec, groups.encode(g)) == g


def test_box_sizes():
    assert len(groups.box(GroupSpec.line(), 3)) == 7
    assert len(groups.box(GroupSpec.grid(2), 3)) == 49


def test_spec_json_round_trip():
    for spec in [GroupSpec.line(), GroupSpec.grid(2), GroupSpec.grid(3)]:
        assert GroupSpec.from_json(spec.to_json()) == spec
    assert GroupSpec.from_json({"kind": "int_line"}) == GroupSpec.line()


def test_dimension_mismatch_rejected():
    spec = GroupSpec.grid(2)
    with pytest.raises(DimensionMismatchError):
        groups.compose(spec, (1, 2), (1,))
    with pytest.raises(DimensionMismatchError):
        groups.element(spec, 5)


def test_bad_inputs_rejected():
    with pytest.raises(InputError):
        GroupSpec(0)
    with pytest.raises(InputError):
        groups.decode(GroupSpec.line(), [1.5])
    with pytest.raises(InputError):
        groups.box(GroupSpec.line(), -1)
    with pytest.raises(InputError):
        GroupSpec.from_json({"kind": "int_line", "d": 3})
