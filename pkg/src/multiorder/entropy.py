"""Seeded entropy estimation along sampled orders.

Everything is in bits.  Point estimators are plug-in (empirical cylinder
frequencies), optionally with the first-order support-size bias correction
(bias mode "miller_madow": add (K-1)/(2*M*ln 2) per entropy term).  A
conditional entropy is estimated as joint-block entropy minus conditioner
block entropy computed from the same sample stream, so the per-sample
information terms give a valid standard error.

Monte-Carlo aggregation averages per-order estimates over independently
sampled straight orders; the reported standard error is the across-order
standard deviation divided by sqrt(orders).  Reports carry the sampling
truncations, the bias mode, and an undersampling flag raised whenever
M < 10 * |alphabet|**(block length).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import groups, orders, process, tiling
from .errors import (
    BudgetError,
    ConsistencyError,
    DimensionMismatchError,
    InputError,
)
from .orders import OrderWindow
from .process import Configuration
from .util import spawn_seeds

_LN2 = math.log(2.0)
_BIAS_MODES = ("plugin", "miller_madow")
_UNDERSAMPLE_FACTOR = 10


def _check_bias(bias: str) -> str:
    if bias not in _BIAS_MODES:
        raise InputError(f"bias mode must be one of {_BIAS_MODES}, got {bias!r}")
    return bias


@dataclass(frozen=True)
class EntropyReport:
    """A single estimate with its sampling metadata."""

    estimate: float
    stderr: float
    samples: int
    orders: int
    truncation: int
    bias_mode: str
    undersampled: bool
    gap: int = 0
    resamples: int = 0

    def to_json(self) -> dict:
        return asdict(self)


def plugin_entropy(counts, bias: str = "plugin") -> float:
    """Entropy in bits of the empirical distribution behind the counts.

    counts may be a mapping value->count or a bare count vector; the
    bias correction is meaningful for integer counts.
    """
    _check_bias(bias)
    if hasattr(counts, "values"):
        vals = np.asarray(list(counts.values()), dtype=float)
    else:
        vals = np.asarray(list(counts), dtype=float)
    if vals.size == 0 or (vals < 0).any():
        raise InputError("counts must be nonempty and nonnegative")
    total = vals.sum()
    if total <= 0:
        raise InputError("counts must have positive total")
    pos = vals[vals > 0]
    h = float(-(pos / total * np.log2(pos / total)).sum())
    if bias == "miller_madow":
        h += (pos.size - 1) / (2.0 * total * _LN2)
    return h


def _encode_columns(samples: np.ndarray, k: int) -> np.ndarray:
    m, n = samples.shape
    if n == 0:
        return np.zeros(m, dtype=np.int64)
    if k**n >= 2**62:
        raise BudgetError(f"cannot encode {n}-cell blocks over {k} symbols exactly")
    weights = np.array([k**p for p in range(n - 1, -1, -1)], dtype=np.int64)
    return samples.astype(np.int64) @ weights


def _plugin_terms(codes: np.ndarray):
    """Per-sample -log2 of the empirical block probability, plus support."""
    _, inverse, counts = np.unique(codes, return_inverse=True, return_counts=True)
    phat = counts[inverse] / codes.shape[0]
    return -np.log2(phat), int(counts.size)


def _mean_se(terms: np.ndarray):
    m = terms.shape[0]
    est = float(terms.mean())
    se = float(terms.std(ddof=1) / math.sqrt(m)) if m > 1 else 0.0
    return est, se


def _undersampled(m: int, alpha: int, block_len: int) -> bool:
    return m < _UNDERSAMPLE_FACTOR * alpha**block_len


def _check_group(proc, w: OrderWindow) -> None:
    if proc.group != w.group:
        raise DimensionMismatchError(
            f"process group {proc.group} does not match window group {w.group}"
        )


def block_entropy_along_order(proc, w: OrderWindow, n: int, m: int, seed,
                              bias: str = "plugin") -> EntropyReport:
    """Per-cell entropy of the block on order positions 0..n."""
    _check_bias(bias)
    _check_group(proc, w)
    if n < 0:
        raise InputError(f"block span must be >= 0, got {n}")
    cells = orders.interval(w, 0, n)
    idx = process.sample_many(proc, cells, m, seed)
    k = process.alphabet_size(proc)
    terms, support = _plugin_terms(_encode_columns(idx, k))
    est, se = _mean_se(terms)
    if bias == "miller_madow":
        est += (support - 1) / (2.0 * m * _LN2)
    width = n + 1
    return EntropyReport(
        estimate=est / width,
        stderr=se / width,
        samples=m,
        orders=1,
        truncation=n,
        bias_mode=bias,
        undersampled=_undersampled(m, k, width),
    )


def _cond_estimate(proc, cond_cells, m: int, seed, bias: str):
    """Estimate H(symbol at e | symbols on cond_cells) from m draws."""
    cells = list(cond_cells) + [groups.identity(proc.group)]
    if len(set(cells)) != len(cells):
        raise InputError("conditioner cells must be distinct and exclude the anchor")
    idx = process.sample_many(proc, cells, m, seed)
    k = process.alphabet_size(proc)
    joint_terms, kj = _plugin_terms(_encode_columns(idx, k))
    if cond_cells:
        cond_terms, kc = _plugin_terms(_encode_columns(idx[:, :-1], k))
    else:
        cond_terms, kc = np.zeros(m), 1
    est, se = _mean_se(joint_terms - cond_terms)
    if bias == "miller_madow":
        est += (kj - kc) / (2.0 * m * _LN2)
    return est, se


def cond_entropy_along_order(proc, w: OrderWindow, j: int, m: int, seed,
                             bias: str = "plugin") -> EntropyReport:
    """Entropy of the anchor symbol given the j order-predecessors."""
    _check_bias(bias)
    _check_group(proc, w)
    if j < 0:
        raise InputError(f"depth must be >= 0, got {j}")
    cond_cells = orders.interval(w, -j, -1)
    est, se = _cond_estimate(proc, cond_cells, m, seed, bias)
    k = process.alphabet_size(proc)
    return EntropyReport(
        estimate=est,
        stderr=se,
        samples=m,
        orders=1,
        truncation=j,
        bias_mode=bias,
        undersampled=_undersampled(m, k, j + 1),
    )


def _run_indexed(tasks, threads: int):
    """Evaluate index-keyed thunks, preserving order regardless of threads."""
    if threads <= 1:
        return [t() for t in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda t: t(), tasks))


def mc_integral(proc, spec: tiling.TilingSystemSpec, j: int, n_orders: int,
                m: int, level: int, seed, bias: str = "plugin",
                threads: int = 1) -> EntropyReport:
    """Average conditional entropy at depth j over sampled straight orders.

    For each order: sample a straight address at the given level whose
    window covers [-j, 0], expand it, and estimate the anchor symbol's
    entropy given its j order-predecessors from m fresh draws.  As j grows
    the average approaches the process entropy rate from above.
    """
    _check_bias(bias)
    if j < 0:
        raise InputError(f"depth must be >= 0, got {j}")
    if n_orders < 1:
        raise InputError(f"order count must be >= 1, got {n_orders}")
    if proc.group != spec.group:
        raise DimensionMismatchError("process and tiling system live on different groups")
    children = spawn_seeds(seed, n_orders)

    def make_task(i):
        def task():
            addr_seed, samp_seed = spawn_seeds(children[i], 2)
            addr, retries = tiling.sample_straight_address(
                spec, level, addr_seed, need_past=j
            )
            w = tiling.expand(addr)
            cond_cells = orders.interval(w, -j, -1)
            est, _ = _cond_estimate(proc, cond_cells, m, samp_seed, bias)
            return est, retries

        return task

    results = _run_indexed([make_task(i) for i in range(n_orders)], threads)
    ests = np.array([r[0] for r in results])
    resamples = int(sum(r[1] for r in results))
    est, se = _mean_se(ests) if n_orders > 1 else (float(ests[0]), 0.0)
    k = process.alphabet_size(proc)
    return EntropyReport(
        estimate=est,
        stderr=se,
        samples=m,
        orders=n_orders,
        truncation=j,
        bias_mode=bias,
        undersampled=_undersampled(m, k, j + 1),
        resamples=resamples,
    )


@dataclass(frozen=True)
class Frame:
    """A configuration laid out on a window, symbols in window order."""

    config: Configuration
    window: OrderWindow

    def __post_init__(self):
        if self.config.cells != tuple(self.window.cells()):
            raise InputError("frame configuration must list the window cells in order")


def make_frame(proc, w: OrderWindow, seed) -> Frame:
    _check_group(proc, w)
    return Frame(process.sample(proc, w.cells(), seed), w)


def successor_step(frame: Frame, k: int) -> Frame:
    """Move the anchor to the order-position-k element.

    The window translates by act and the configuration re-indexes by the
    same element, so the symbol at the new anchor is the old symbol at
    cell(k).  Steps compose: stepping by k then m equals stepping by k+m.
    """
    w = frame.window
    g = w.cell(k)
    w2 = orders.act(w, g)
    return Frame(Configuration(tuple(w2.cells()), frame.config.symbols), w2)


@dataclass(frozen=True)
class SuccessorConsistencyReport:
    orders: int
    truncation: int
    samples: int
    identical_cells: bool
    bit_identical_estimates: bool
    estimate_direct: float
    estimate_stepped: float
    stderr: float
    bias_mode: str
    undersampled: bool
    resamples: int

    def to_json(self) -> dict:
        return asdict(self)


def successor_consistency(proc, spec: tiling.TilingSystemSpec, j: int,
                          n_orders: int, m: int, level: int, seed,
                          bias: str = "plugin") -> SuccessorConsistencyReport:
    """Check that two routes to the depth-j conditioners agree exactly.

    Route one reads order positions -j..-1 from the expanded window; route
    two walks j backward successor steps on a framed configuration and
    collects the anchors in original coordinates.  The cell sequences must
    be identical and the conditional-entropy estimates (same sample seed)
    bit-identical; any mismatch raises ConsistencyError.
    """
    _check_bias(bias)
    if j < 1:
        raise InputError(f"depth must be >= 1, got {j}")
    if proc.group != spec.group:
        raise DimensionMismatchError("process and tiling system live on different groups")
    children = spawn_seeds(seed, n_orders)
    ests_a = []
    ests_b = []
    resamples = 0
    for i in range(n_orders):
        addr_seed, cfg_seed, samp_seed = spawn_seeds(children[i], 3)
        addr, retries = tiling.sample_straight_address(
            spec, level, addr_seed, need_past=j
        )
        resamples += retries
        w = tiling.expand(addr)
        cells_direct = orders.interval(w, -j, -1)

        frame = make_frame(proc, w, cfg_seed)
        offset = groups.identity(spec.group)
        visited = []
        for _ in range(j):
            g = frame.window.cell(-1)
            offset = groups.compose(spec.group, offset, g)
            visited.append(offset)
            frame = successor_step(frame, -1)
        cells_stepped = list(reversed(visited))

        if cells_direct != cells_stepped:
            first_bad = next(
                p for p, (a, b) in enumerate(zip(cells_direct, cells_stepped)) if a != b
            )
            raise ConsistencyError(
                f"order {i}: conditioner cells differ at position {first_bad - j}: "
                f"direct {cells_direct[first_bad]} vs stepped {cells_stepped[first_bad]}"
            )
        est_a, _ = _cond_estimate(proc, cells_direct, m, samp_seed, bias)
        est_b, _ = _cond_estimate(proc, cells_stepped, m, samp_seed, bias)
        if est_a != est_b:
            raise ConsistencyError(
                f"order {i}: estimates differ bitwise: {est_a!r} vs {est_b!r}"
            )
        ests_a.append(est_a)
        ests_b.append(est_b)
    mean_a = float(np.mean(ests_a))
    mean_b = float(np.mean(ests_b))
    se = float(np.std(ests_a, ddof=1) / math.sqrt(n_orders)) if n_orders > 1 else 0.0
    k = process.alphabet_size(proc)
    return SuccessorConsistencyReport(
        orders=n_orders,
        truncation=j,
        samples=m,
        identical_cells=True,
        bit_identical_estimates=mean_a == mean_b,
        estimate_direct=mean_a,
        estimate_stepped=mean_b,
        stderr=se,
        bias_mode=bias,
        undersampled=_undersampled(m, k, j + 1),
        resamples=resamples,
    )


@dataclass(frozen=True)
class ShearerResult:
    holds: bool
    slack: float
    lhs: float
    rhs: float


def shearer_check(counts, cells, cover, k: int, margin: float = 1e-9) -> ShearerResult:
    """Check H(F) <= (1/k) * sum over cover members C of H(C).

    counts maps symbol tuples (aligned with the cells list) to weights;
    cover lists subsets of cells, each cell covered at least k times.
    Exact input laws give nonnegative slack up to float rounding; empirical
    counts need a noise margin supplied by the caller.
    """
    cells = [tuple(c) if not isinstance(c, int) else (c,) for c in cells]
    if len(set(cells)) != len(cells) or not cells:
        raise InputError("cells must be distinct and nonempty")
    if k < 1:
        raise InputError(f"cover multiplicity must be >= 1, got {k}")
    norm_cover = []
    for member in cover:
        ms = [tuple(c) if not isinstance(c, int) else (c,) for c in member]
        if not ms or any(c not in cells for c in ms) or len(set(ms)) != len(ms):
            raise InputError("cover members must be nonempty distinct subsets of cells")
        norm_cover.append(ms)
    coverage = {c: 0 for c in cells}
    for ms in norm_cover:
        for c in ms:
            coverage[c] += 1
    lacking = [c for c, v in coverage.items() if v < k]
    if lacking:
        raise InputError(f"cells {lacking} covered fewer than {k} times")
    for key in counts:
        if len(key) != len(cells):
            raise InputError("count keys must align with the cells list")
    lhs = plugin_entropy(counts)
    rhs = 0.0
    pos = {c: i for i, c in enumerate(cells)}
    for ms in norm_cover:
        sel = [pos[c] for c in ms]
        marg: dict = {}
        for key, cnt in counts.items():
            sub = tuple(key[i] for i in sel)
            marg[sub] = marg.get(sub, 0.0) + cnt
        rhs += plugin_entropy(marg)
    rhs /= k
    slack = rhs - lhs
    return ShearerResult(slack >= -margin, slack, lhs, rhs)


def remote_past_mi(proc, spec: tiling.TilingSystemSpec, gap: int, j: int,
                   n_orders: int, m: int, level: int, seed,
                   bias: str = "plugin", threads: int = 1) -> EntropyReport:
    """Mutual information between the anchor symbol and a depth-j block
    starting gap positions into the order past.

    Per order, the block sits on positions -gap-j..-gap-1.  For processes
    with trivial remote past this decays toward zero as the gap grows; the
    overlay's phase keeps it at the marker's phase entropy.
    """
    _check_bias(bias)
    if gap < 1 or j < 1:
        raise InputError("gap and depth must be >= 1")
    if n_orders < 1:
        raise InputError(f"order count must be >= 1, got {n_orders}")
    if proc.group != spec.group:
        raise DimensionMismatchError("process and tiling system live on different groups")
    children = spawn_seeds(seed, n_orders)
    k = process.alphabet_size(proc)

    def make_task(i):
        def task():
            addr_seed, samp_seed = spawn_seeds(children[i], 2)
            addr, retries = tiling.sample_straight_address(
                spec, level, addr_seed, need_past=gap + j
            )
            w = tiling.expand(addr)
            block = orders.interval(w, -gap - j, -gap - 1)
            cells = block + [groups.identity(proc.group)]
            idx = process.sample_many(proc, cells, m, samp_seed)
            joint_terms, kj = _plugin_terms(_encode_columns(idx, k))
            block_terms, kb = _plugin_terms(_encode_columns(idx[:, :-1], k))
            target_terms, kt = _plugin_terms(_encode_columns(idx[:, -1:], k))
            mi, _ = _mean_se(target_terms + block_terms - joint_terms)
            if bias == "miller_madow":
                mi += ((kt - 1) + (kb - 1) - (kj - 1)) / (2.0 * m * _LN2)
            return mi, retries

        return task

    results = _run_indexed([make_task(i) for i in range(n_orders)], threads)
    ests = np.array([r[0] for r in results])
    resamples = int(sum(r[1] for r in results))
    est, se = _mean_se(ests) if n_orders > 1 else (float(ests[0]), 0.0)
    return EntropyReport(
        estimate=est,
        stderr=se,
        samples=m,
        orders=n_orders,
        truncation=j,
        bias_mode=bias,
        undersampled=_undersampled(m, k, j + 1),
        gap=gap,
        resamples=resamples,
    )
