"""Ordered substitution tiling systems and the orders they induce.

A system fixes, for every level k >= 0, a set of labelled shapes (finite
cell sets containing the identity) and, for k >= 1, one ordered rule per
level-k shape decomposing it exactly into translated level-(k-1) shapes.
Level 0 holds the single singleton shape.  Expanding a level-L shape by
recursively concatenating child expansions in rule order lays the shape's
cells on a discrete curve; the built-in systems are two dyadic interval
systems on the line and the Hilbert-curve square system on the plane.

An address fixes a level-L top shape together with one digit per level
selecting the central subtile, which pins where the identity sits inside
the expanded top tile.  Expansion then yields an anchored OrderWindow.
Addresses whose top digits keep selecting the first (or last) child forever
correspond to degenerate orders; straight_check reports the truncated
statistics and samplers can reject on them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import groups
from .errors import InputError, MultiorderError
from .groups import Element, GroupSpec
from .orders import OrderWindow
from .util import child_seed, make_rng

SINGLETON_LABEL = "o"


@dataclass(frozen=True)
class Shape:
    """A labelled finite cell set containing the identity."""

    label: str
    cells: frozenset

    @property
    def size(self) -> int:
        return len(self.cells)


@dataclass(frozen=True)
class SubstitutionRule:
    """Ordered decomposition of a level-k shape into level-(k-1) tiles.

    children lists (child_label, offset) pairs; the translated child cell
    sets must partition the parent exactly, in the given order.
    """

    parent: str
    children: tuple

    @property
    def arity(self) -> int:
        return len(self.children)


class TilingSystemSpec:
    """Level-indexed shape tables and rules, with memoized expansions."""

    def __init__(self, group: GroupSpec, name: str, shapes_fn, rules_fn,
                 canonical_label: str, max_level=None):
        self.group = group
        self.name = name
        self._shapes_fn = shapes_fn
        self._rules_fn = rules_fn
        self.canonical_label = canonical_label
        self.max_level = max_level
        self._shapes_cache: dict = {}
        self._rules_cache: dict = {}
        self._curve_cache: dict = {}

    def _check_level(self, k: int, floor: int) -> None:
        if k < floor:
            raise InputError(f"level must be >= {floor}, got {k}")
        if self.max_level is not None and k > self.max_level:
            raise InputError(f"level {k} exceeds known levels (max {self.max_level})")

    def shapes(self, k: int) -> dict:
        """Labelled shapes at level k (k >= 0)."""
        self._check_level(k, 0)
        if k not in self._shapes_cache:
            self._shapes_cache[k] = dict(self._shapes_fn(k))
        return self._shapes_cache[k]

    def rules(self, k: int) -> dict:
        """Rules decomposing level-k shapes into level-(k-1) tiles (k >= 1)."""
        self._check_level(k, 1)
        if k not in self._rules_cache:
            self._rules_cache[k] = dict(self._rules_fn(k))
        return self._rules_cache[k]

    def rule(self, k: int, label: str) -> SubstitutionRule:
        try:
            return self.rules(k)[label]
        except KeyError:
            raise InputError(f"no rule for shape {label!r} at level {k}") from None

    def shape_size(self, k: int, label: str) -> int:
        try:
            return self.shapes(k)[label].size
        except KeyError:
            raise InputError(f"no shape {label!r} at level {k}") from None

    def curve(self, k: int, label: str) -> np.ndarray:
        """The expansion order of a level-k shape as an (size, d) array.

        Row r is the cell visited r-th when the shape is recursively
        decomposed and children are traversed in rule order.
        """
        key = (k, label)
        if key not in self._curve_cache:
            if k == 0:
                if label not in self.shapes(0):
                    raise InputError(f"no shape {label!r} at level 0")
                arr = np.zeros((1, self.group.d), dtype=np.int64)
            else:
                rule = self.rule(k, label)
                parts = []
                for child_label, offset in rule.children:
                    off = np.asarray(groups.element(self.group, offset), dtype=np.int64)
                    parts.append(self.curve(k - 1, child_label) + off)
                arr = np.concatenate(parts, axis=0)
            arr.setflags(write=False)
            self._curve_cache[key] = arr
        return self._curve_cache[key]

    def labels(self, k: int) -> list[str]:
        return sorted(self.shapes(k))

    def to_json(self, max_level: int) -> dict:
        """Serialize shape tables and rules up to the given level."""
        shapes = {}
        for k in range(0, max_level + 1):
            shapes[str(k)] = {
                lab: sorted(groups.encode(c) for c in sh.cells)
                for lab, sh in self.shapes(k).items()
            }
        rules = {}
        for k in range(1, max_level + 1):
            rules[str(k)] = {
                lab: [[cl, groups.encode(groups.element(self.group, off))]
                      for cl, off in r.children]
                for lab, r in self.rules(k).items()
            }
        return {
            "name": self.name,
            "group": self.group.to_json(),
            "canonical_label": self.canonical_label,
            "max_level": max_level,
            "shapes": shapes,
            "rules": rules,
        }

    @classmethod
    def from_tables(cls, group: GroupSpec, name: str, shapes_by_level: dict,
                    rules_by_level: dict, canonical_label: str,
                    max_level: int) -> "TilingSystemSpec":
        """Build a spec from explicit per-level tables (levels 0..max_level)."""

        def shapes_fn(k):
            return shapes_by_level[k]

        def rules_fn(k):
            return rules_by_level[k]

        return cls(group, name, shapes_fn, rules_fn, canonical_label, max_level)

    @classmethod
    def from_json(cls, obj: dict) -> "TilingSystemSpec":
        group = GroupSpec.from_json(obj["group"])
        max_level = int(obj["max_level"])
        shapes_by_level = {}
        for k_str, table in obj["shapes"].items():
            k = int(k_str)
            shapes_by_level[k] = {
                lab: Shape(lab, frozenset(groups.decode(group, c) for c in cell_list))
                for lab, cell_list in table.items()
            }
        rules_by_level = {}
        for k_str, table in obj["rules"].items():
            k = int(k_str)
            rules_by_level[k] = {
                lab: SubstitutionRule(
                    lab,
                    tuple((cl, groups.decode(group, off)) for cl, off in children),
                )
                for lab, children in table.items()
            }
        return cls.from_tables(group, obj["name"], shapes_by_level, rules_by_level,
                               obj["canonical_label"], max_level)


@dataclass(frozen=True)
class Address:
    """A level-L top shape and digits d_L..d_1 selecting central subtiles.

    digits[0] is the top-level digit d_L; digits[-1] is d_1, which picks the
    level-0 singleton holding the identity.
    """

    spec: TilingSystemSpec = field(compare=False)
    level: int
    top: str
    digits: tuple

    def __post_init__(self):
        if self.level < 1:
            raise InputError(f"address level must be >= 1, got {self.level}")
        if len(self.digits) != self.level:
            raise InputError(
                f"address needs {self.level} digits, got {len(self.digits)}"
            )
        label = self.top
        for pos, k in enumerate(range(self.level, 0, -1)):
            rule = self.spec.rule(k, label)
            d = self.digits[pos]
            if not 1 <= d <= rule.arity:
                raise InputError(
                    f"digit d_{k} = {d} out of range 1..{rule.arity} for shape {label!r}"
                )
            label = rule.children[d - 1][0]


@dataclass(frozen=True)
class StraightnessReport:
    """Top-run statistics of an address's digit sequence.

    all_first_suffix_len counts how many consecutive levels, from the top
    down, pick the first child; all_last_suffix_len does the same for the
    last child.  The address is straight up to its level iff neither run
    covers every digit.
    """

    all_first_suffix_len: int
    all_last_suffix_len: int
    straight_up_to_level: bool


@dataclass(frozen=True)
class Violation:
    level: int
    label: str
    kind: str
    witness: object = None


@dataclass(frozen=True)
class ValidationReport:
    levels_checked: int
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_spec(spec: TilingSystemSpec, max_level: int) -> ValidationReport:
    """Check exact-partition, identity-containing, and rule-coverage
    conditions for levels 1..max_level.  Violations are reported as data,
    not raised."""
    violations = []
    e = groups.identity(spec.group)
    for k in range(0, max_level + 1):
        for lab, shape in spec.shapes(k).items():
            if e not in shape.cells:
                violations.append(Violation(k, lab, "missing_identity", e))
    if not spec.shapes(0) or any(s.size != 1 for s in spec.shapes(0).values()):
        violations.append(Violation(0, "", "level_zero_not_singletons", None))
    for k in range(1, max_level + 1):
        shapes_k = spec.shapes(k)
        shapes_below = spec.shapes(k - 1)
        rules_k = spec.rules(k)
        for lab in shapes_k:
            if lab not in rules_k:
                violations.append(Violation(k, lab, "missing_rule", None))
                continue
            rule = rules_k[lab]
            seen: dict = {}
            bad_child = False
            for child_label, offset in rule.children:
                if child_label not in shapes_below:
                    violations.append(
                        Violation(k, lab, "unknown_child", child_label)
                    )
                    bad_child = True
                    continue
                off = groups.element(spec.group, offset)
                for c in shapes_below[child_label].cells:
                    cell = groups.compose(spec.group, c, off)
                    if cell in seen:
                        violations.append(
                            Violation(k, lab, "overlapping_children", cell)
                        )
                    else:
                        seen[cell] = True
            if bad_child:
                continue
            parent_cells = shapes_k[lab].cells
            covered = set(seen)
            for cell in sorted(parent_cells - covered):
                violations.append(Violation(k, lab, "uncovered_cell", cell))
            for cell in sorted(covered - parent_cells):
                violations.append(Violation(k, lab, "cell_outside_parent", cell))
    return ValidationReport(max_level, tuple(violations))


def top_shape_distribution(spec: TilingSystemSpec, level: int = 2):
    """Stationary law of the central-tile label chain across levels.

    Built from the child-label count matrix of the rules at the given level
    (the built-ins use the same label set and counts at every level >= 1),
    with columns normalized by rule arity.  Returns (labels, probs).
    """
    labels = spec.labels(level)
    rules = spec.rules(level)
    child_labels = spec.labels(level - 1)
    if sorted(child_labels) != sorted(labels):
        # Non-stationary label sets (e.g. level 1 over the singleton): the
        # chain has nowhere to mix, so fall back to uniform over top labels.
        n = len(labels)
        return labels, np.full(n, 1.0 / n)
    n = len(labels)
    pos = {lab: i for i, lab in enumerate(labels)}
    A = np.zeros((n, n))
    for lab in labels:
        rule = rules[lab]
        for child_label, _ in rule.children:
            A[pos[child_label], pos[lab]] += 1.0 / rule.arity
    M = A - np.eye(n)
    M[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    probs = np.linalg.solve(M, b)
    probs = np.clip(probs, 0.0, None)
    probs /= probs.sum()
    return labels, probs


def sample_address(spec: TilingSystemSpec, level: int, seed) -> Address:
    """Draw an address: top shape from the stationary label law, then one
    independent uniform digit per level."""
    if level < 1:
        raise InputError(f"level must be >= 1, got {level}")
    rng = make_rng(seed)
    labels, probs = top_shape_distribution(spec, min(level, 2))
    top = labels[int(rng.choice(len(labels), p=probs))]
    digits = []
    label = top
    for k in range(level, 0, -1):
        rule = spec.rule(k, label)
        d = int(rng.integers(1, rule.arity + 1))
        digits.append(d)
        label = rule.children[d - 1][0]
    return Address(spec, level, top, tuple(digits))


def straight_check(addr: Address) -> StraightnessReport:
    arities = []
    label = addr.top
    for pos, k in enumerate(range(addr.level, 0, -1)):
        rule = addr.spec.rule(k, label)
        arities.append(rule.arity)
        label = rule.children[addr.digits[pos] - 1][0]
    first_run = 0
    for d in addr.digits:
        if d != 1:
            break
        first_run += 1
    last_run = 0
    for d, a in zip(addr.digits, arities):
        if d != a:
            break
        last_run += 1
    L = addr.level
    return StraightnessReport(first_run, last_run, first_run < L and last_run < L)


def anchor_rank(addr: Address) -> int:
    """0-based position of the identity in the expansion of the top tile."""
    rank = 0
    label = addr.top
    for pos, k in enumerate(range(addr.level, 0, -1)):
        rule = addr.spec.rule(k, label)
        d = addr.digits[pos]
        for child_label, _ in rule.children[: d - 1]:
            rank += addr.spec.shape_size(k - 1, child_label)
        label = rule.children[d - 1][0]
    return rank


def _anchor_cell(addr: Address) -> np.ndarray:
    u = np.zeros(addr.spec.group.d, dtype=np.int64)
    label = addr.top
    for pos, k in enumerate(range(addr.level, 0, -1)):
        rule = addr.spec.rule(k, label)
        child_label, offset = rule.children[addr.digits[pos] - 1]
        u += np.asarray(groups.element(addr.spec.group, offset), dtype=np.int64)
        label = child_label
    return u


def expand(addr: Address) -> OrderWindow:
    """Expand the addressed top tile into an anchored order window.

    The window spans [-rank, size-1-rank] where rank is the curve position
    of the identity inside the top tile; cells are the tile's cells in
    curve order, translated so the addressed cell is the identity.
    """
    spec = addr.spec
    base = spec.curve(addr.level, addr.top)
    u = _anchor_cell(addr)
    rank = anchor_rank(addr)
    cells = base - u
    return OrderWindow(spec.group, -rank, base.shape[0] - 1 - rank, cells,
                       _trusted=True)


def central_tile(addr: Address, k: int):
    """The level-k central tile in anchored coordinates.

    Returns (label, translation): the tile is the level-k shape translated
    by the returned element, and it contains the identity.
    """
    if not 0 <= k <= addr.level:
        raise InputError(f"central tile level {k} outside 0..{addr.level}")
    u = _anchor_cell(addr)
    t = np.zeros(addr.spec.group.d, dtype=np.int64)
    label = addr.top
    for pos, lev in enumerate(range(addr.level, k, -1)):
        rule = addr.spec.rule(lev, label)
        child_label, offset = rule.children[addr.digits[pos] - 1]
        t += np.asarray(groups.element(addr.spec.group, offset), dtype=np.int64)
        label = child_label
    translation = tuple(int(x) for x in (t - u))
    return label, translation


def sample_straight_address(spec: TilingSystemSpec, level: int, seed,
                            need_past: int = 0, need_future: int = 0,
                            max_tries: int = 1000):
    """Sample addresses until one is straight up to its level and its
    expansion covers [-need_past, need_future].  Returns (address, retries)."""
    size_cache: dict = {}

    def top_size(label):
        if label not in size_cache:
            size_cache[label] = spec.shape_size(level, label)
        return size_cache[label]

    for attempt in range(max_tries):
        sub = child_seed(seed, attempt)
        addr = sample_address(spec, level, sub)
        if not straight_check(addr).straight_up_to_level:
            continue
        rank = anchor_rank(addr)
        if rank < need_past:
            continue
        if top_size(addr.top) - 1 - rank < need_future:
            continue
        return addr, attempt
    raise MultiorderError(
        f"no straight covering address found in {max_tries} tries "
        f"(level={level}, need_past={need_past}, need_future={need_future})"
    )


def speedup(spec: TilingSystemSpec) -> TilingSystemSpec:
    """Compose two levels of rules into one.

    New level k carries the old level-2k shapes; each new rule decomposes
    straight into level-2(k-1) tiles by traversing the two old rule layers
    lexicographically.  Expansions are unchanged: the new curve at level k
    equals the old curve at level 2k.
    """
    group = spec.group

    def shapes_fn(k):
        return spec.shapes(2 * k)

    def rules_fn(k):
        out = {}
        for lab, rule in spec.rules(2 * k).items():
            composed = []
            for mid_label, off1 in rule.children:
                off1 = groups.element(group, off1)
                for child_label, off0 in spec.rules(2 * k - 1)[mid_label].children:
                    off = groups.compose(group, groups.element(group, off0), off1)
                    composed.append((child_label, off))
            out[lab] = SubstitutionRule(lab, tuple(composed))
        return out

    max_level = None if spec.max_level is None else spec.max_level // 2
    return TilingSystemSpec(group, spec.name + "_x2", shapes_fn, rules_fn,
                            spec.canonical_label, max_level)


def _dyadic_spec(name: str, alternating: bool) -> TilingSystemSpec:
    group = GroupSpec.line()

    def shapes_fn(k):
        if k == 0:
            return {SINGLETON_LABEL: Shape(SINGLETON_LABEL, frozenset({(0,)}))}
        return {"I": Shape("I", frozenset((i,) for i in range(2**k)))}

    def rules_fn(k):
        child = "I" if k - 1 >= 1 else SINGLETON_LABEL
        left = (child, (0,))
        right = (child, (2 ** (k - 1),))
        if alternating and k % 2 == 1:
            children = (right, left)
        else:
            children = (left, right)
        return {"I": SubstitutionRule("I", children)}

    return TilingSystemSpec(group, name, shapes_fn, rules_fn, canonical_label="I")


# Quadrant layout of each Hilbert shape, children in traversal order.
# Quadrant names: BL/BR/TL/TR with x rightward and y upward; labels name the
# side the curve's opening faces (U up, D down, R right, L left).
_HILBERT_TABLE = {
    "U": (("L", "TL"), ("U", "BL"), ("U", "BR"), ("R", "TR")),
    "R": (("D", "BR"), ("R", "BL"), ("R", "TL"), ("U", "TR")),
    "L": (("U", "TL"), ("L", "TR"), ("L", "BR"), ("D", "BL")),
    "D": (("R", "BR"), ("D", "TR"), ("D", "TL"), ("L", "BL")),
}

_QUADRANT_OFFSETS = {
    "BL": (0, 0),
    "BR": (1, 0),
    "TL": (0, 1),
    "TR": (1, 1),
}


def _hilbert_spec() -> TilingSystemSpec:
    group = GroupSpec.grid(2)

    def shapes_fn(k):
        if k == 0:
            return {SINGLETON_LABEL: Shape(SINGLETON_LABEL, frozenset({(0, 0)}))}
        cells = frozenset((x, y) for x in range(2**k) for y in range(2**k))
        return {lab: Shape(lab, cells) for lab in _HILBERT_TABLE}

    def rules_fn(k):
        h = 2 ** (k - 1)
        out = {}
        for lab, quads in _HILBERT_TABLE.items():
            children = []
            for child_label, quad in quads:
                cl = child_label if k - 1 >= 1 else SINGLETON_LABEL
                qx, qy = _QUADRANT_OFFSETS[quad]
                children.append((cl, (qx * h, qy * h)))
            out[lab] = SubstitutionRule(lab, tuple(children))
        return out

    return TilingSystemSpec(group, "hilbert", shapes_fn, rules_fn, canonical_label="U")


_BUILTIN_NAMES = ("dyadic_standard", "dyadic_alternating", "hilbert")


def builtin(name: str) -> TilingSystemSpec:
    """One of: dyadic_standard, dyadic_alternating, hilbert."""
    if name == "dyadic_standard":
        return _dyadic_spec(name, alternating=False)
    if name == "dyadic_alternating":
        return _dyadic_spec(name, alternating=True)
    if name == "hilbert":
        return _hilbert_spec()
    raise InputError(f"unknown tiling system {name!r}; choose from {_BUILTIN_NAMES}")
