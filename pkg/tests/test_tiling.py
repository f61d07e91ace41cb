import numpy as np
import pytest

import oracles
from multiorder import tiling
from multiorder.errors import InputError, MultiorderError
from multiorder.groups import GroupSpec
from multiorder.tiling import Address, Shape, SubstitutionRule, TilingSystemSpec

LINE = GroupSpec.line()


def u_address_of_origin(spec, level):
    """Walk the rule tree picking the child square containing the origin."""
    digits = []
    label = "U"
    cum = np.zeros(2, dtype=np.int64)
    for k in range(level, 0, -1):
        rule = spec.rule(k, label)
        half = 1 << (k - 1)
        for d, (child_label, offset) in enumerate(rule.children, start=1):
            lo = cum + np.asarray(offset, dtype=np.int64)
            if lo[0] <= 0 < lo[0] + half and lo[1] <= 0 < lo[1] + half:
                digits.append(d)
                cum = lo
                label = child_label
                break
        else:
            raise AssertionError("origin not covered by any child")
    return Address(spec, level, "U", tuple(digits))


@pytest.mark.parametrize("name", ["dyadic_standard", "dyadic_alternating"])
@pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6])
def test_dyadic_curves_match_oracle(builtins, name, k):
    spec = builtins[name]
    expected = oracles.dyadic_cells(k, alternating=(name == "dyadic_alternating"))
    assert spec.curve(k, "I").tolist() == [[c] for c in expected]


@pytest.mark.parametrize("label", ["U", "R", "L", "D"])
@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_hilbert_curves_match_oracle(builtins, label, k):
    spec = builtins["hilbert"]
    expected = oracles.hilbert_cells(label, k)
    assert spec.curve(k, label).tolist() == [list(c) for c in expected]


def test_hilbert_level4_matches_golden_file(builtins, data_dir):
    lines = (data_dir / "hilbert_level4.csv").read_text().strip().splitlines()
    assert lines[0] == "rank,x,y"
    rows = []
    for line in lines[1:]:
        rank, x, y = (int(v) for v in line.split(","))
        rows.append((rank, x, y))
    assert [r[0] for r in rows] == list(range(256))
    golden = [[x, y] for _, x, y in rows]
    assert builtins["hilbert"].curve(4, "U").tolist() == golden
    assert [tuple(c) for c in golden] == oracles.hilbert_cells("U", 4)


def test_level2_expansion_example(builtins):
    w = tiling.expand(Address(builtins["dyadic_alternating"], 2, "I", (1, 2)))
    assert (w.lo, w.hi) == (-1, 2)
    assert w.cells() == [(1,), (0,), (3,), (2,)]


def test_standard_expansion_is_the_natural_order(builtins):
    spec = builtins["dyadic_standard"]
    for digits in [(1, 1, 1), (2, 1, 2), (2, 2, 2), (1, 2, 1)]:
        w = tiling.expand(Address(spec, 3, "I", digits))
        assert w.cells() == [(i,) for i in range(w.lo, w.hi + 1)]
        rank = sum((d - 1) << k for k, d in enumerate(reversed(digits)))
        assert w.lo == -rank


def test_anchor_rank_of_origin_in_square_curve(builtins):
    spec = builtins["hilbert"]
    for k in range(1, 6):
        addr = u_address_of_origin(spec, k)
        curve = spec.curve(k, "U")
        where = int(np.nonzero((curve == 0).all(axis=1))[0][0])
        assert tiling.anchor_rank(addr) == where == (4**k - 4) // 3 + 1


def test_central_tile_translation_and_nesting(builtins):
    spec = builtins["dyadic_standard"]
    addr = Address(spec, 4, "I", (1, 1, 2, 1))
    assert tiling.central_tile(addr, 2) == ("I", (-2,))
    other = Address(spec, 4, "I", (2, 2, 2, 1))
    assert tiling.central_tile(other, 2) == ("I", (-2,))
    for name in ("dyadic_alternating", "hilbert"):
        s = builtins[name]
        level = 4 if name == "hilbert" else 6
        addr = tiling.sample_address(s, level, seed=31)
        prev = None
        for k in range(0, level + 1):
            label, t = tiling.central_tile(addr, k)
            t = np.asarray(t, dtype=np.int64)
            cells = {tuple(c) for c in (s.curve(k, label) + t)}
            zero = (0,) * s.group.d
            assert zero in cells
            if prev is not None:
                assert prev <= cells
            prev = cells


def test_validate_builtins_clean(builtins):
    for name, spec in builtins.items():
        level = 4 if name == "hilbert" else 7
        report = tiling.validate_spec(spec, level)
        assert report.ok, report.violations


def corrupted_spec(rule_children, level1_cells=(0, 1)):
    shapes = {
        0: {"o": Shape("o", frozenset({(0,)}))},
        1: {"I": Shape("I", frozenset((c,) for c in level1_cells))},
    }
    rules = {1: {"I": SubstitutionRule("I", tuple(rule_children))}}
    return TilingSystemSpec.from_tables(LINE, "broken", shapes, rules, "I", 1)


def test_validate_reports_overlap_with_witness():
    spec = corrupted_spec([("o", (0,)), ("o", (0,))])
    report = tiling.validate_spec(spec, 1)
    kinds = {(v.kind, v.witness) for v in report.violations}
    assert ("overlapping_children", (0,)) in kinds
    assert ("uncovered_cell", (1,)) in kinds


def test_validate_reports_other_defects():
    report = tiling.validate_spec(corrupted_spec([("o", (0,)), ("o", (2,))]), 1)
    kinds = {(v.kind, v.witness) for v in report.violations}
    assert ("cell_outside_parent", (2,)) in kinds
    assert ("uncovered_cell", (1,)) in kinds

    report = tiling.validate_spec(corrupted_spec([("o", (0,)), ("x", (1,))]), 1)
    assert any(v.kind == "unknown_child" and v.witness == "x"
               for v in report.violations)

    shapes = {
        0: {"o": Shape("o", frozenset({(0,)}))},
        1: {"I": Shape("I", frozenset({(1,), (2,)}))},
    }
    spec = TilingSystemSpec.from_tables(LINE, "broken", shapes, {1: {}}, "I", 1)
    report = tiling.validate_spec(spec, 1)
    kinds = {v.kind for v in report.violations}
    assert "missing_identity" in kinds and "missing_rule" in kinds


def test_address_validation():
    spec = tiling.builtin("dyadic_standard")
    with pytest.raises(InputError):
        Address(spec, 2, "I", (1,))
    with pytest.raises(InputError):
        Address(spec, 2, "I", (1, 3))
    with pytest.raises(InputError):
        Address(spec, 0, "I", ())


def test_straight_check_runs():
    spec = tiling.builtin("dyadic_standard")
    all_first = Address(spec, 5, "I", (1, 1, 1, 1, 1))
    rep = tiling.straight_check(all_first)
    assert rep.all_first_suffix_len == 5
    assert not rep.straight_up_to_level
    all_last = Address(spec, 5, "I", (2, 2, 2, 2, 2))
    rep = tiling.straight_check(all_last)
    assert rep.all_last_suffix_len == 5
    assert not rep.straight_up_to_level
    mixed = Address(spec, 5, "I", (1, 1, 2, 1, 1))
    rep = tiling.straight_check(mixed)
    assert (rep.all_first_suffix_len, rep.all_last_suffix_len) == (2, 0)
    assert rep.straight_up_to_level


def test_top_run_length_distribution(builtins):
    spec = builtins["dyadic_standard"]
    samples = 4000
    hits = 0
    for i in range(samples):
        addr = tiling.sample_address(spec, 20, seed=np.random.SeedSequence((8, i)))
        rep = tiling.straight_check(addr)
        if rep.all_first_suffix_len >= 10 or rep.all_last_suffix_len >= 10:
            hits += 1
    bound = 2 * 2**-10
    assert hits / samples <= bound + 3 * np.sqrt(bound / samples)


def test_sample_address_deterministic_and_in_range(builtins):
    for name, spec in builtins.items():
        level = 4 if name == "hilbert" else 8
        a = tiling.sample_address(spec, level, seed=55)
        b = tiling.sample_address(spec, level, seed=55)
        assert a == b and a.spec is spec
        assert len(a.digits) == level


def test_hilbert_top_labels_near_uniform(builtins):
    spec = builtins["hilbert"]
    labels, probs = tiling.top_shape_distribution(spec)
    assert sorted(labels) == ["D", "L", "R", "U"]
    assert np.allclose(probs, 0.25, atol=1e-12)
    counts = {lab: 0 for lab in labels}
    n = 2000
    for i in range(n):
        addr = tiling.sample_address(spec, 3, seed=np.random.SeedSequence((3, i)))
        counts[addr.top] += 1
    for lab in labels:
        assert abs(counts[lab] / n - 0.25) < 0.05


def test_sample_straight_address_honors_margins(builtins):
    for name, spec in builtins.items():
        level = 5 if name == "hilbert" else 9
        addr, retries = tiling.sample_straight_address(
            spec, level, seed=13, need_past=20, need_future=20
        )
        assert tiling.straight_check(addr).straight_up_to_level
        w = tiling.expand(addr)
        assert w.lo <= -20 and w.hi >= 20
        again, _ = tiling.sample_straight_address(
            spec, level, seed=13, need_past=20, need_future=20
        )
        assert again == addr
    with pytest.raises(MultiorderError):
        tiling.sample_straight_address(
            builtins["dyadic_standard"], 3, seed=1, need_past=100, max_tries=50
        )


@pytest.mark.parametrize("name", ["dyadic_standard", "dyadic_alternating", "hilbert"])
def test_speedup_curves_unchanged(builtins, name):
    spec = builtins[name]
    fast = tiling.speedup(spec)
    top = 2 if name == "hilbert" else 3
    for k in range(1, top + 1):
        for lab in spec.labels(2 * k):
            assert np.array_equal(fast.curve(k, lab), spec.curve(2 * k, lab))
    assert tiling.validate_spec(fast, top).ok


def test_speedup_address_mapping(builtins):
    cases = [
        ("hilbert", "U", (2, 3, 1, 4), 4),
        ("dyadic_alternating", "I", (1, 2, 2, 1), 2),
    ]
    for name, top, old_digits, arity in cases:
        spec = builtins[name]
        fast = tiling.speedup(spec)
        new_digits = tuple(
            (old_digits[i] - 1) * arity + old_digits[i + 1]
            for i in range(0, len(old_digits), 2)
        )
        old = tiling.expand(Address(spec, len(old_digits), top, old_digits))
        new = tiling.expand(Address(fast, len(new_digits), top, new_digits))
        assert old == new


def test_json_round_trip(builtins):
    spec = builtins["hilbert"]
    blob = spec.to_json(3)
    back = TilingSystemSpec.from_json(blob)
    for k in range(0, 4):
        for lab in spec.labels(k):
            assert np.array_equal(back.curve(k, lab), spec.curve(k, lab))
    assert tiling.validate_spec(back, 3).ok
    with pytest.raises(InputError):
        back.curve(4, "U")


def test_builtin_names():
    for name in ("dyadic_standard", "dyadic_alternating", "hilbert"):
        assert tiling.builtin(name).name == name
    with pytest.raises(InputError):
        tiling.builtin("penrose")
