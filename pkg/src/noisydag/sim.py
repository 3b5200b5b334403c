"""Sampling, simulation and exact inference on layered noisy DAGs.

Heavy Monte Carlo goes through the kernels (compiled when available); light
single-instance runs stay in numpy.  All sampling is reproducible from
(seed, parameters): each trial owns a counter-keyed stream, so estimates do
not depend on the number of worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from ._rng import Stream
from .core import (
    LayeredDag,
    LayerSchedule,
    LayerState,
    ProcessingRule,
    SizeGuardError,
    as_delta,
    majority_rule,
)

_CHUNK = 4096  # fixed trial chunking; results are chunk-independent anyway

HOEFFDING_99 = math.log(2.0 / 0.01)


def hoeffding_halfwidth(trials: int, confidence: float = 0.99) -> float:
    """Two-sided Hoeffding bound half-width for a mean of [0,1] samples."""
    return math.sqrt(math.log(2.0 / (1.0 - confidence)) / (2.0 * trials))


# ---------------------------------------------------------------------------
# Topology sampling


def sample_random_dag(schedule: LayerSchedule, d: int, depth: int, seed: int) -> LayeredDag:
    """Random layered wiring: every vertex picks d parents uniformly, with
    replacement, from the previous level."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    rng = Stream(seed, 0)
    sizes = [schedule.size(k) for k in range(depth + 1)]
    parents = []
    for k in range(1, depth + 1):
        lp = sizes[k - 1]
        block = np.fromiter(
            (rng.below(lp) for _ in range(sizes[k] * d)), dtype=np.int64, count=sizes[k] * d
        )
        parents.append(block.reshape(sizes[k], d))
    return LayeredDag(sizes, parents)


def _rules_per_level(rules, depth: int):
    if isinstance(rules, ProcessingRule):
        return [rules] * depth
    rules = list(rules)
    if len(rules) != depth:
        raise ValueError(f"need one rule per non-root level ({depth}), got {len(rules)}")
    return rules


def _check_arity(dag: LayeredDag, rules) -> None:
    for k in range(1, dag.depth + 1):
        if rules[k - 1].arity != dag.indegree(k):
            raise ValueError(
                f"level {k}: rule arity {rules[k - 1].arity} != indegree {dag.indegree(k)}"
            )


# ---------------------------------------------------------------------------
# Single-instance dynamics


def run_broadcast(dag: LayeredDag, delta, rules, root_bit: int, seed: int):
    """Propagate one root bit down a fixed DAG; returns every LayerState.

    Each edge flips its bit independently with probability delta; draws are
    consumed level by level, vertex by vertex, slot by slot, then one tie bit
    per randomized-majority tie.
    """
    dd = as_delta(delta)
    if root_bit not in (0, 1):
        raise ValueError("root bit must be 0 or 1")
    rules = _rules_per_level(rules, dag.depth)
    _check_arity(dag, rules)
    rng = Stream(seed, 0)
    states = [LayerState(0, np.array([root_bit], dtype=np.uint8))]
    prev = states[0].bits
    for k in range(1, dag.depth + 1):
        pars = dag.level_parents(k)
        table = rules[k - 1].tie_table()
        d = pars.shape[1]
        out = np.empty(pars.shape[0], dtype=np.uint8)
        for j in range(pars.shape[0]):
            idx = 0
            for i in range(d):
                b = prev[pars[j, i]] ^ rng.bernoulli(dd)
                idx |= b << i
            v = table[idx]
            if v == 2:
                v = rng.bit()
            out[j] = v
        states.append(LayerState(k, out))
        prev = out
    return states


def run_coupled(dag: LayeredDag, delta, rules, seed: int):
    """Coupled root-1/root-0 runs on shared randomness.

    Each edge either copies both chains (probability 1-2*delta) or writes one
    shared fresh unbiased bit to both; tie bits are shared too.  With
    monotone symmetric gates the plus chain dominates the minus chain
    coordinatewise.
    """
    dd = as_delta(delta)
    rules = _rules_per_level(rules, dag.depth)
    _check_arity(dag, rules)
    rng = Stream(seed, 0)
    two_delta = 2.0 * dd
    plus = [LayerState(0, np.array([1], dtype=np.uint8))]
    minus = [LayerState(0, np.array([0], dtype=np.uint8))]
    prev_p, prev_m = plus[0].bits, minus[0].bits
    for k in range(1, dag.depth + 1):
        pars = dag.level_parents(k)
        table = rules[k - 1].tie_table()
        d = pars.shape[1]
        out_p = np.empty(pars.shape[0], dtype=np.uint8)
        out_m = np.empty(pars.shape[0], dtype=np.uint8)
        for j in range(pars.shape[0]):
            idx_p = idx_m = 0
            for i in range(d):
                if rng.uniform() < two_delta:
                    b = rng.bit()
                    in_p = in_m = b
                else:
                    p = pars[j, i]
                    in_p, in_m = prev_p[p], prev_m[p]
                idx_p |= in_p << i
                idx_m |= in_m << i
            v_p, v_m = table[idx_p], table[idx_m]
            if v_p == 2 or v_m == 2:
                tb = rng.bit()
                v_p = tb if v_p == 2 else v_p
                v_m = tb if v_m == 2 else v_m
            out_p[j] = v_p
            out_m[j] = v_m
        plus.append(LayerState(k, out_p))
        minus.append(LayerState(k, out_m))
        prev_p, prev_m = out_p, out_m
    return plus, minus


# ---------------------------------------------------------------------------
# Monte Carlo estimators (kernel-backed)


@dataclass(frozen=True)
class McModel:
    """What to simulate: fixed wiring (dag given) or fresh wiring per trial."""

    sizes: np.ndarray
    indegs: np.ndarray
    parents_flat: np.ndarray
    parent_offsets: np.ndarray
    tables_flat: np.ndarray
    table_offsets: np.ndarray
    random_dag: bool
    delta: float

    @classmethod
    def fixed(cls, dag: LayeredDag, delta, rules) -> "McModel":
        dd = as_delta(delta)
        rules = _rules_per_level(rules, dag.depth)
        _check_arity(dag, rules)
        sizes = np.asarray(dag.layer_sizes, dtype=np.int64)
        indegs = np.array([0] + [dag.indegree(k) for k in range(1, dag.depth + 1)],
                          dtype=np.int64)
        blocks = [dag.level_parents(k).ravel() for k in range(1, dag.depth + 1)]
        offsets = np.zeros(dag.depth + 1, dtype=np.int64)
        pos = 0
        for k, b in enumerate(blocks, start=1):
            offsets[k] = pos
            pos += b.size
        flat = np.concatenate(blocks) if blocks else np.zeros(0, dtype=np.int64)
        tflat, toff = _pack_tables(rules)
        return cls(sizes, indegs, flat.astype(np.int64), offsets, tflat, toff, False, dd)

    @classmethod
    def random(cls, schedule: LayerSchedule, d: int, depth: int, delta, rules) -> "McModel":
        dd = as_delta(delta)
        rules = _rules_per_level(rules, depth)
        for r in rules:
            if r.arity != d:
                raise ValueError("random wiring uses one indegree for every level")
        sizes = np.array([schedule.size(k) for k in range(depth + 1)], dtype=np.int64)
        indegs = np.array([0] + [d] * depth, dtype=np.int64)
        tflat, toff = _pack_tables(rules)
        return cls(sizes, indegs, np.zeros(0, dtype=np.int64),
                   np.zeros(depth + 1, dtype=np.int64), tflat, toff, True, dd)


def _pack_tables(rules):
    tables = [r.tie_table() for r in rules]
    offsets = np.zeros(len(tables) + 1, dtype=np.int64)
    pos = 0
    for k, t in enumerate(tables, start=1):
        offsets[k] = pos
        pos += t.size
    return np.concatenate(tables).astype(np.uint8), offsets


_DECODER_CODES = {"majority": 0, "biased": 1, "single-vertex": 2}


def _run_chunked(fn, trials: int, threads: int):
    """Run fn(start, count) over fixed chunks, possibly on a thread pool."""
    chunks = [(s, min(_CHUNK, trials - s)) for s in range(0, trials, _CHUNK)]
    if threads <= 1 or len(chunks) == 1:
        return [fn(s, c) for s, c in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda sc: fn(*sc), chunks))


def mc_error_estimate(model: McModel, decoder: str, trials: int, seed: int,
                      threshold: float = 0.5, threads: int = 1):
    """Monte Carlo decoding error with a 99% Hoeffding confidence half-width.

    The root bit is drawn fresh and unbiased in every trial; in random-DAG
    mode the wiring is also resampled per trial, so the estimate averages
    over graphs.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    code = _DECODER_CODES[decoder]

    def chunk(start, count):
        return kernels.broadcast_trials(
            seed, start, count, model.delta, model.sizes, model.indegs,
            model.parents_flat, model.parent_offsets, model.tables_flat,
            model.table_offsets, model.random_dag, code, threshold)

    errors = sum(_run_chunked(chunk, trials, threads))
    return errors / trials, hoeffding_halfwidth(trials)


def mc_coupled_stats(model: McModel, trials: int, seed: int, threads: int = 1):
    """Coupled-trial aggregates: monotonicity violations, mean final-level
    fraction gap, and the fraction of trials whose final levels differ."""
    if trials < 1:
        raise ValueError("need at least one trial")

    def chunk(start, count):
        return kernels.coupled_trials(
            seed, start, count, model.delta, model.sizes, model.indegs,
            model.parents_flat, model.parent_offsets, model.tables_flat,
            model.table_offsets, model.random_dag)

    parts = _run_chunked(chunk, trials, threads)
    violations = sum(p[0] for p in parts)
    gap_mean = sum(p[1] for p in parts) / trials
    differ = 1.0 - sum(p[2] for p in parts) / trials
    return violations, gap_mean, differ


def percolation_site_sim(schedule: LayerSchedule, d: int, delta, depth: int,
                         trials: int, seed: int, threads: int = 1):
    """Site percolation: vertices survive with probability (1-2*delta)^2.

    Returns (mean open-connected fraction per level, fraction of trials with
    any open-connected vertex per level, Hoeffding 99% half-width).
    """
    dd = as_delta(delta)
    p_open = (1.0 - 2.0 * dd) ** 2
    sizes = np.array([schedule.size(k) for k in range(depth + 1)], dtype=np.int64)
    sums = np.zeros(depth + 1)
    hits = np.zeros(depth + 1, dtype=np.int64)

    def chunk(start, count):
        s = np.zeros(depth + 1)
        h = np.zeros(depth + 1, dtype=np.int64)
        kernels.percolation_trials(seed, start, count, p_open, sizes, d, s, h)
        return s, h

    for s, h in _run_chunked(chunk, trials, threads):
        sums += s
        hits += h
    return sums / trials, hits / trials, hoeffding_halfwidth(trials)


# ---------------------------------------------------------------------------
# Exact inference on tiny fixed DAGs

_MAX_WIDTH = 16
_WORK_GUARD = 1 << 26


def _vertex_on_probability(parent_bits: int, pars_row, table, d: int, delta: float) -> float:
    """P(vertex = 1 | previous layer state), enumerating the d noise bits."""
    q = 0.0
    for z in range(1 << d):
        w = 1.0
        idx = 0
        for i in range(d):
            flip = (z >> i) & 1
            w *= delta if flip else (1.0 - delta)
            b = ((parent_bits >> pars_row[i]) & 1) ^ flip
            idx |= b << i
        v = table[idx]
        q += w * (0.5 if v == 2 else float(v))
    return q


def exact_layer_inference(dag: LayeredDag, delta, rules, k: int):
    """Exact conditional laws of the full level-k state given root 1 / root 0.

    Forward message passing over joint layer states; refuses instances whose
    total state-space work exceeds the desk-scale guard.
    """
    dd = as_delta(delta)
    rules = _rules_per_level(rules, dag.depth)
    _check_arity(dag, rules)
    if not 1 <= k <= dag.depth:
        raise ValueError("level must lie in 1..depth")
    work = 0
    for lvl in range(1, k + 1):
        if dag.layer_sizes[lvl] > _MAX_WIDTH:
            raise SizeGuardError(f"level {lvl} width {dag.layer_sizes[lvl]} > {_MAX_WIDTH}")
        work += (1 << dag.layer_sizes[lvl - 1]) * (1 << dag.layer_sizes[lvl])
    if work > _WORK_GUARD:
        raise SizeGuardError(f"state-space work {work} exceeds guard {_WORK_GUARD}")

    def forward(root_bit: int) -> np.ndarray:
        msg = np.zeros(2)
        msg[root_bit] = 1.0
        for lvl in range(1, k + 1):
            pars = dag.level_parents(lvl)
            table = rules[lvl - 1].tie_table()
            d = pars.shape[1]
            L = dag.layer_sizes[lvl]
            out = np.zeros(1 << L)
            for w, pw in enumerate(msg):
                if pw == 0.0:
                    continue
                qs = [_vertex_on_probability(w, pars[j], table, d, dd) for j in range(L)]
                dist = np.array([1.0])
                for q in qs:
                    dist = np.concatenate(((1.0 - q) * dist, q * dist))
                out += pw * dist
            msg = out
        return msg

    return forward(1), forward(0)


def state_tv_distance(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(p - q).sum())


def sigma_marginal(state_probs: np.ndarray, width: int) -> np.ndarray:
    """Collapse a joint layer-state law to the law of its fraction of ones."""
    out = np.zeros(width + 1)
    for x, p in enumerate(state_probs):
        out[bin(x).count("1")] += p
    return out


def joint_with_root(plus: np.ndarray, minus: np.ndarray) -> np.ndarray:
    """Joint law of (root, level state) under an unbiased root."""
    return np.stack([0.5 * minus, 0.5 * plus])


# ---------------------------------------------------------------------------
# Ancestor-subgraph tree check (single-vertex decoding analysis)


def ancestor_subgraph_is_tree(dag: LayeredDag, level: int, vertex: int, m: int) -> bool:
    """True iff the m-level ancestor subgraph of one vertex is a directed tree.

    Walking up, the subgraph is a tree exactly when all parent picks across
    the explored front are distinct at every step.
    """
    if not 0 <= level <= dag.depth or m < 0 or m > level:
        raise ValueError("need 0 <= m <= level <= depth")
    front = [vertex]
    for r in range(1, m + 1):
        lvl = level - r + 1
        pars = dag.level_parents(lvl)
        picks = [int(p) for v in front for p in pars[v]]
        if len(set(picks)) != len(picks):
            return False
        front = picks
    return True


def tree_probability_lower_bound(d: int, m: int, r_min: int) -> float:
    """Closed-form lower bound on the ancestor-tree probability."""
    return 1.0 - (d * d / (2.0 * (d * d - 1.0))) * d ** (2 * m) / r_min


# ---------------------------------------------------------------------------
# Layered-DAG text serialization

_HEADER = "{depth} {d}"


def dag_to_text(dag: LayeredDag) -> str:
    """Line format: header "<levels> <max indegree>", then one line per level
    of space-separated parent tuples, indices within a tuple comma-separated."""
    d = max((dag.indegree(k) for k in range(1, dag.depth + 1)), default=0)
    lines = [_HEADER.format(depth=dag.depth, d=d)]
    for k in range(1, dag.depth + 1):
        pars = dag.level_parents(k)
        lines.append(" ".join(",".join(str(int(p)) for p in row) for row in pars))
    return "\n".join(lines) + "\n"


def dag_from_text(text: str) -> LayeredDag:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty DAG file")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError("header must be '<levels> <indegree>'")
    depth = int(head[0])
    if len(lines) - 1 != depth:
        raise ValueError(f"expected {depth} level lines, found {len(lines) - 1}")
    sizes = [1]
    parents = []
    for k in range(1, depth + 1):
        rows = [tuple(int(x) for x in tup.split(",")) for tup in lines[k].split()]
        arity = len(rows[0])
        if any(len(r) != arity for r in rows):
            raise ValueError(f"level {k}: ragged parent tuples")
        sizes.append(len(rows))
        parents.append(np.array(rows, dtype=np.int64))
    return LayeredDag(sizes, parents)


def write_dag(dag: LayeredDag, path) -> None:
    with open(path, "w") as fh:
        fh.write(dag_to_text(dag))


def read_dag(path) -> LayeredDag:
    with open(path) as fh:
        return dag_from_text(fh.read())


def majority_rules_for(dag: LayeredDag):
    """Majority at every level, sized to each level's indegree."""
    return [majority_rule(dag.indegree(k)) for k in range(1, dag.depth + 1)]
