"""Stationary symbol processes on lattice groups with exact finite laws.

Three variants: independent draws per cell (Bernoulli), a stationary
two-sided Markov chain on the line sampled exactly at arbitrary cell sets
via transition-matrix powers, and a deterministic periodic marker with
uniformly random phase overlaid on a base process (the remote-past test
process: the phase is recoverable from any far-away marker cell).

Sampling is seeded and exact: marginals on a requested cell set follow the
true finite-dimensional law, with no burn-in or approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product as _cartesian

import numpy as np

from . import groups
from .errors import BudgetError, DimensionMismatchError, InputError
from .groups import Element, GroupSpec
from .util import make_rng, spawn_seeds

_PROB_TOL = 1e-12
_ENUM_BUDGET = 1 << 22
_MAX_CONDITIONERS = 12


def _check_probs(probs) -> tuple:
    p = tuple(float(x) for x in probs)
    if not p:
        raise InputError("probability vector must be nonempty")
    if any(x < 0 for x in p):
        raise InputError(f"probabilities must be >= 0: {p}")
    if abs(sum(p) - 1.0) > _PROB_TOL:
        raise InputError(f"probabilities must sum to 1 within {_PROB_TOL}: sum={sum(p)}")
    return p


@dataclass(frozen=True)
class Bernoulli:
    """Independent identical draws at every cell of the group."""

    group: GroupSpec
    probs: tuple
    alphabet: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "probs", _check_probs(self.probs))
        alpha = self.alphabet
        if alpha is None:
            alpha = tuple(range(len(self.probs)))
        else:
            alpha = tuple(alpha)
        if len(alpha) != len(self.probs) or len(set(alpha)) != len(alpha):
            raise InputError("alphabet must be distinct symbols matching probs")
        object.__setattr__(self, "alphabet", alpha)

    def to_json(self) -> dict:
        return {
            "variant": "bernoulli",
            "group": self.group.to_json(),
            "probs": list(self.probs),
            "alphabet": list(self.alphabet),
        }


@dataclass(frozen=True)
class MarkovLine:
    """A stationary Markov chain indexed by the line (d = 1 only)."""

    transition: tuple
    alphabet: tuple = None
    initial: tuple = None

    def __post_init__(self):
        rows = tuple(_check_probs(row) for row in self.transition)
        k = len(rows)
        if any(len(r) != k for r in rows):
            raise InputError("transition matrix must be square")
        object.__setattr__(self, "transition", rows)
        alpha = self.alphabet
        if alpha is None:
            alpha = tuple(range(k))
        else:
            alpha = tuple(alpha)
        if len(alpha) != k or len(set(alpha)) != len(alpha):
            raise InputError("alphabet must be distinct symbols matching the matrix")
        object.__setattr__(self, "alphabet", alpha)
        if self.initial is None:
            init = tuple(float(x) for x in stationary_distribution(self.matrix))
        else:
            init = _check_probs(self.initial)
            if len(init) != k:
                raise InputError("initial law must match the matrix size")
            drift = np.abs(np.asarray(init) @ self.matrix - np.asarray(init)).max()
            if drift > 1e-9:
                raise InputError(f"initial law is not stationary (drift {drift:.2e})")
        object.__setattr__(self, "initial", init)

    @property
    def group(self) -> GroupSpec:
        return GroupSpec.line()

    @property
    def matrix(self) -> np.ndarray:
        return np.asarray(self.transition, dtype=float)

    def to_json(self) -> dict:
        return {
            "variant": "markov_line",
            "transition": [list(r) for r in self.transition],
            "alphabet": list(self.alphabet),
        }


@dataclass(frozen=True)
class PeriodicOverlay:
    """Pairs (base symbol, marker) where the marker is a fixed periodic
    pattern with uniformly random phase, independent of the base."""

    base: object
    period: tuple
    marker_alphabet: tuple = None

    def __post_init__(self):
        per = self.period
        if isinstance(per, int):
            per = (per,)
        per = tuple(int(p) for p in per)
        if any(p < 1 for p in per) or not per:
            raise InputError(f"period entries must be >= 1: {per}")
        if len(per) != self.base.group.d:
            raise DimensionMismatchError(
                f"period {per} has length {len(per)}, group dimension is {self.base.group.d}"
            )
        object.__setattr__(self, "period", per)
        count = math.prod(per)
        marks = self.marker_alphabet
        if marks is None:
            if len(per) == 1:
                marks = tuple(range(per[0]))
            else:
                marks = tuple(_cartesian(*(range(p) for p in per)))
        else:
            marks = tuple(marks)
        if len(marks) != count or len(set(marks)) != len(marks):
            raise InputError(f"marker alphabet must hold {count} distinct symbols")
        object.__setattr__(self, "marker_alphabet", marks)

    @property
    def group(self) -> GroupSpec:
        return self.base.group

    @property
    def alphabet(self) -> tuple:
        return tuple(
            (b, m) for b in self.base.alphabet for m in self.marker_alphabet
        )

    def to_json(self) -> dict:
        return {
            "variant": "periodic_overlay",
            "base": self.base.to_json(),
            "period": list(self.period),
        }


ProcessSpec = (Bernoulli, MarkovLine, PeriodicOverlay)


def from_json(obj: dict):
    if not isinstance(obj, dict) or "variant" not in obj:
        raise InputError(f"not a process spec: {obj!r}")
    var = obj["variant"]
    if var == "bernoulli":
        group = GroupSpec.from_json(obj.get("group", {"kind": "int_line", "d": 1}))
        alphabet = tuple(obj["alphabet"]) if "alphabet" in obj else None
        return Bernoulli(group, tuple(obj["probs"]), alphabet)
    if var == "markov_line":
        alphabet = tuple(obj["alphabet"]) if "alphabet" in obj else None
        return MarkovLine(tuple(tuple(r) for r in obj["transition"]), alphabet)
    if var == "periodic_overlay":
        return PeriodicOverlay(from_json(obj["base"]), tuple(obj["period"]))
    raise InputError(f"unknown process variant {var!r}")


@dataclass(frozen=True)
class Configuration:
    """Symbols observed on a finite cell set."""

    cells: tuple
    symbols: tuple

    def __post_init__(self):
        if len(self.cells) != len(self.symbols):
            raise InputError("one symbol per cell required")
        if len(set(self.cells)) != len(self.cells):
            raise InputError("configuration cells must be distinct")

    def __getitem__(self, cell):
        try:
            return self.symbols[self.cells.index(cell)]
        except ValueError:
            raise KeyError(cell) from None

    def as_dict(self) -> dict:
        return dict(zip(self.cells, self.symbols))


def alphabet_size(spec) -> int:
    if isinstance(spec, PeriodicOverlay):
        return alphabet_size(spec.base) * math.prod(spec.period)
    return len(spec.alphabet)


def stationary_distribution(P: np.ndarray) -> np.ndarray:
    """The stationary law of a row-stochastic matrix (unique for the
    chains used here; ties resolved by the linear solve)."""
    P = np.asarray(P, dtype=float)
    k = P.shape[0]
    if P.shape != (k, k):
        raise InputError("transition matrix must be square")
    A = P.T - np.eye(k)
    A[-1, :] = 1.0
    b = np.zeros(k)
    b[-1] = 1.0
    pi = np.linalg.solve(A, b)
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def _check_cells(spec, cells) -> list:
    out = [groups.element(spec.group, c) for c in cells]
    if len(set(out)) != len(out):
        raise InputError("cells must be distinct")
    return out


def _inverse_cdf(rows_cum: np.ndarray, u: np.ndarray) -> np.ndarray:
    # rows_cum: (M, k) per-sample cumulative laws; u: (M,) uniforms.
    return (u[:, None] > rows_cum).sum(axis=1)


def sample_many(spec, cells, m: int, seed) -> np.ndarray:
    """Draw m independent configurations; returns (m, len(cells)) symbol
    indices into the variant's alphabet, exact in law."""
    cs = _check_cells(spec, cells)
    n = len(cs)
    if m < 1:
        raise InputError(f"sample count must be >= 1, got {m}")
    if isinstance(spec, Bernoulli):
        rng = make_rng(seed)
        if n == 0:
            return np.zeros((m, 0), dtype=np.int64)
        return rng.choice(len(spec.probs), size=(m, n), p=np.asarray(spec.probs))

    if isinstance(spec, MarkovLine):
        rng = make_rng(seed)
        if n == 0:
            return np.zeros((m, 0), dtype=np.int64)
        xs = np.asarray([c[0] for c in cs], dtype=np.int64)
        order = np.argsort(xs)
        sorted_x = xs[order]
        P = spec.matrix
        out_sorted = np.empty((m, n), dtype=np.int64)
        cum0 = np.cumsum(np.asarray(spec.initial))
        u = rng.random(m)
        out_sorted[:, 0] = np.searchsorted(cum0, u, side="right")
        for idx in range(1, n):
            gap = int(sorted_x[idx] - sorted_x[idx - 1])
            step_cum = np.cumsum(np.linalg.matrix_power(P, gap), axis=1)
            u = rng.random(m)
            out_sorted[:, idx] = _inverse_cdf(step_cum[out_sorted[:, idx - 1]], u)
        out = np.empty((m, n), dtype=np.int64)
        out[:, order] = out_sorted
        return out

    if isinstance(spec, PeriodicOverlay):
        phase_seed, base_seed = spawn_seeds(seed, 2)
        rng = make_rng(phase_seed)
        per = np.asarray(spec.period, dtype=np.int64)
        phases = np.stack(
            [rng.integers(0, p, size=m, dtype=np.int64) for p in per], axis=1
        )
        base_idx = sample_many(spec.base, cs, m, base_seed)
        cell_arr = np.asarray(cs, dtype=np.int64)
        residues = (cell_arr[None, :, :] + phases[:, None, :]) % per
        strides = np.empty(len(per), dtype=np.int64)
        acc = 1
        for col in range(len(per) - 1, -1, -1):
            strides[col] = acc
            acc *= int(per[col])
        marker_idx = residues @ strides
        return base_idx * math.prod(spec.period) + marker_idx

    raise InputError(f"unknown process variant {type(spec).__name__}")


def symbols_of(spec, indices: np.ndarray) -> list:
    alpha = spec.alphabet
    return [alpha[int(i)] for i in indices]


def sample(spec, cells, seed) -> Configuration:
    """One seeded exact draw on the given cells."""
    cs = _check_cells(spec, cells)
    idx = sample_many(spec, cs, 1, seed)[0]
    return Configuration(tuple(cs), tuple(symbols_of(spec, idx)))


def _entropy_bits(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=float).ravel()
    pos = p[p > 0]
    return float(-(pos * np.log2(pos)).sum())


def exact_entropy_rate(spec) -> float:
    """Per-cell entropy in bits; the overlay's marker adds zero."""
    if isinstance(spec, Bernoulli):
        return _entropy_bits(np.asarray(spec.probs))
    if isinstance(spec, MarkovLine):
        P = spec.matrix
        pi = np.asarray(spec.initial)
        return float(sum(pi[i] * _entropy_bits(P[i]) for i in range(len(pi))))
    if isinstance(spec, PeriodicOverlay):
        return exact_entropy_rate(spec.base)
    raise InputError(f"unknown process variant {type(spec).__name__}")


def phase_entropy(spec: PeriodicOverlay) -> float:
    """Entropy of the overlay's random phase in bits (the exact amount of
    remote-past information carried by the marker)."""
    if not isinstance(spec, PeriodicOverlay):
        raise InputError("phase entropy is defined for the overlay variant only")
    return float(np.log2(math.prod(spec.period)))


def _markov_tensor(spec: MarkovLine, sorted_x: np.ndarray) -> np.ndarray:
    k = len(spec.alphabet)
    if k ** len(sorted_x) > _ENUM_BUDGET:
        raise BudgetError(
            f"exact law over {len(sorted_x)} cells with {k} symbols exceeds budget"
        )
    law = np.asarray(spec.initial)
    P = spec.matrix
    for idx in range(1, len(sorted_x)):
        gap = int(sorted_x[idx] - sorted_x[idx - 1])
        step = np.linalg.matrix_power(P, gap)
        law = np.einsum("...i,ij->...ij", law, step)
    return law


def exact_cylinder_law(spec, cells) -> dict:
    """Exact joint law on the given cells: {symbol tuple: probability}.

    Tuples align with the given cell order; zero-probability assignments
    are omitted.
    """
    cs = _check_cells(spec, cells)
    n = len(cs)
    if isinstance(spec, Bernoulli):
        if len(spec.probs) ** max(n, 1) > _ENUM_BUDGET:
            raise BudgetError(f"enumeration over {n} cells exceeds budget")
        out = {}
        for combo in _cartesian(*(range(len(spec.probs)) for _ in range(n))):
            p = 1.0
            for i in combo:
                p *= spec.probs[i]
            if p > 0:
                out[tuple(spec.alphabet[i] for i in combo)] = p
        return out
    if isinstance(spec, MarkovLine):
        xs = np.asarray([c[0] for c in cs], dtype=np.int64)
        order = np.argsort(xs)
        law = _markov_tensor(spec, xs[order])
        # transpose sorted-axis tensor back to the caller's cell order
        inv = np.empty(n, dtype=int)
        inv[order] = np.arange(n)
        law = np.transpose(law, axes=tuple(inv)) if n > 1 else law
        out = {}
        for combo in _cartesian(*(range(len(spec.alphabet)) for _ in range(n))):
            p = float(law[combo]) if n > 0 else 1.0
            if p > 0:
                out[tuple(spec.alphabet[i] for i in combo)] = p
        return out
    if isinstance(spec, PeriodicOverlay):
        base_law = exact_cylinder_law(spec.base, cs)
        count = math.prod(spec.period)
        marker_law: dict = {}
        per = spec.period
        for phase in _cartesian(*(range(p) for p in per)):
            key = tuple(
                spec.marker_alphabet[_marker_index(c, phase, per)] for c in cs
            )
            marker_law[key] = marker_law.get(key, 0.0) + 1.0 / count
        out = {}
        for bkey, bp in base_law.items():
            for mkey, mp in marker_law.items():
                out[tuple(zip(bkey, mkey))] = out.get(tuple(zip(bkey, mkey)), 0.0) + bp * mp
        return out
    raise InputError(f"unknown process variant {type(spec).__name__}")


def _marker_index(cell, phase, period) -> int:
    idx = 0
    for x, ph, p in zip(cell, phase, period):
        idx = idx * p + (int(x) + ph) % p
    return idx


def exact_conditional_entropy(spec, target, conditioners) -> float:
    """H(symbol at target | symbols on conditioners), exactly, in bits.

    Supported for Bernoulli (any group) and MarkovLine; at most 12
    conditioner cells are enumerated.
    """
    conds = _check_cells(spec, conditioners)
    tgt = groups.element(spec.group, target)
    if len(conds) > _MAX_CONDITIONERS:
        raise BudgetError(
            f"{len(conds)} conditioners exceed the enumeration budget of {_MAX_CONDITIONERS}"
        )
    if isinstance(spec, Bernoulli):
        if tgt in conds:
            return 0.0
        return _entropy_bits(np.asarray(spec.probs))
    if isinstance(spec, MarkovLine):
        if tgt in conds:
            return 0.0
        cells = conds + [tgt]
        xs = np.asarray([c[0] for c in cells], dtype=np.int64)
        order = np.argsort(xs)
        law = _markov_tensor(spec, xs[order])
        target_axis = int(np.nonzero(order == len(cells) - 1)[0][0])
        h_joint = _entropy_bits(law)
        h_cond = _entropy_bits(law.sum(axis=target_axis))
        return h_joint - h_cond
    raise InputError(
        f"exact conditional entropy not supported for {type(spec).__name__}"
    )
