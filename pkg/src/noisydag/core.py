"""Domain types: noise level, Boolean gates, layer schedules, layered DAGs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

TIE = 2  # truth-table sentinel for a randomized majority tie


class ConfigurationError(ValueError):
    """Parameters violate a structural constraint (e.g. schedule ratio < 2)."""


class SizeGuardError(RuntimeError):
    """Requested computation exceeds the desk-scale guard."""


class SearchExhaustedError(RuntimeError):
    """Exhaustive search finished without finding a feasible object."""


@dataclass(frozen=True)
class NoiseLevel:
    """Crossover probability of the per-edge binary symmetric channel."""

    delta: float

    def __post_init__(self):
        if not (0.0 < self.delta < 0.5):
            raise ValueError(f"noise level must lie in (0, 1/2), got {self.delta}")

    def __float__(self) -> float:
        return self.delta


def as_delta(delta) -> float:
    """Coerce a float or NoiseLevel to a validated crossover probability."""
    d = float(delta)
    if not (0.0 < d < 0.5):
        raise ValueError(f"noise level must lie in (0, 1/2), got {d}")
    return d


def bsc_convolve(sigma, delta):
    """One BSC pass: sigma*(1-delta) + delta*(1-sigma).

    Affine in sigma with slope (1-2*delta); maps [0,1] onto [delta, 1-delta].
    Accepts scalars or numpy arrays in the first argument.
    """
    d = as_delta(delta)
    return sigma * (1.0 - d) + d * (1.0 - sigma)


class GateKind(Enum):
    MAJORITY_RANDOM_TIE = "majority"
    AND = "and"
    OR = "or"
    NAND = "nand"
    IDENTITY = "identity"
    TRUTH_TABLE = "table"


@dataclass(frozen=True)
class ProcessingRule:
    """A d-input Boolean gate; majority breaks even-arity ties with a random bit."""

    kind: GateKind
    arity: int
    table: tuple = None

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError("arity must be >= 1")
        if self.kind is GateKind.TRUTH_TABLE:
            if self.table is None or len(self.table) != 2**self.arity:
                raise ValueError("truth table must have length 2^arity")
            if any(b not in (0, 1) for b in self.table):
                raise ValueError("truth table entries must be bits")
        elif self.table is not None:
            raise ValueError("table only valid for TRUTH_TABLE rules")
        if self.kind is GateKind.IDENTITY and self.arity != 1:
            raise ValueError("identity gate has arity 1")

    def tie_table(self) -> np.ndarray:
        """Truth table over packed inputs (bit i of the index = input slot i).

        Entries are 0/1, or TIE for an exact even-arity majority tie, which is
        resolved with one fresh unbiased bit at application time.
        """
        d = self.arity
        out = np.empty(2**d, dtype=np.uint8)
        for idx in range(2**d):
            ones = bin(idx).count("1")
            if self.kind is GateKind.MAJORITY_RANDOM_TIE:
                if 2 * ones > d:
                    out[idx] = 1
                elif 2 * ones < d:
                    out[idx] = 0
                else:
                    out[idx] = TIE
            elif self.kind is GateKind.AND:
                out[idx] = 1 if ones == d else 0
            elif self.kind is GateKind.OR:
                out[idx] = 1 if ones > 0 else 0
            elif self.kind is GateKind.NAND:
                out[idx] = 0 if ones == d else 1
            elif self.kind is GateKind.IDENTITY:
                out[idx] = idx & 1
            else:
                out[idx] = self.table[idx]
        return out


def majority_rule(d: int) -> ProcessingRule:
    return ProcessingRule(GateKind.MAJORITY_RANDOM_TIE, d)


def and_rule(d: int = 2) -> ProcessingRule:
    return ProcessingRule(GateKind.AND, d)


def or_rule(d: int = 2) -> ProcessingRule:
    return ProcessingRule(GateKind.OR, d)


def nand_rule(d: int = 2) -> ProcessingRule:
    return ProcessingRule(GateKind.NAND, d)


def identity_rule() -> ProcessingRule:
    return ProcessingRule(GateKind.IDENTITY, 1)


def truth_table_rule(bits) -> ProcessingRule:
    bits = tuple(int(b) for b in bits)
    d = int(math.log2(len(bits)))
    if 2**d != len(bits):
        raise ValueError("truth table length must be a power of two")
    return ProcessingRule(GateKind.TRUTH_TABLE, d, bits)


def apply_rule(rule: ProcessingRule, inputs, rng) -> int:
    """Apply a gate to a bit vector; `rng` supplies the tie bit if needed.

    `rng` may be a numpy Generator or a _rng.Stream.  Deterministic rules
    never touch it; a randomized-majority tie consumes exactly one draw.
    """
    if len(inputs) != rule.arity:
        raise ValueError(f"expected {rule.arity} inputs, got {len(inputs)}")
    idx = 0
    for i, b in enumerate(inputs):
        if b not in (0, 1):
            raise ValueError("inputs must be bits")
        idx |= int(b) << i
    v = rule.tie_table()[idx]
    if v == TIE:
        v = rng.bit() if hasattr(rng, "bit") else int(rng.integers(2))
    return int(v)


# ---------------------------------------------------------------------------
# Layer schedules


class LayerSchedule:
    """Rule producing the width of every level; level 0 is always the root."""

    def size(self, k: int) -> int:
        raise NotImplementedError

    def sizes(self, depth: int) -> np.ndarray:
        return np.array([self.size(k) for k in range(depth + 1)], dtype=np.int64)


@dataclass(frozen=True)
class ConstantSchedule(LayerSchedule):
    width: int

    def __post_init__(self):
        if self.width < 1:
            raise ConfigurationError("width must be >= 1")

    def size(self, k: int) -> int:
        if k < 0:
            raise ValueError("level must be >= 0")
        return 1 if k == 0 else self.width


@dataclass(frozen=True)
class LogGrowthSchedule(LayerSchedule):
    """width(k) = max(min_width, ceil(coeff * log k)) for k >= 1."""

    coeff: float
    min_width: int = 1

    def __post_init__(self):
        if self.coeff <= 0 or self.min_width < 1:
            raise ConfigurationError("need coeff > 0 and min_width >= 1")

    def size(self, k: int) -> int:
        if k < 0:
            raise ValueError("level must be >= 0")
        if k == 0:
            return 1
        return max(self.min_width, math.ceil(self.coeff * math.log(k)) if k > 1 else self.min_width)


@dataclass(frozen=True)
class LinearSchedule(LayerSchedule):
    """width(k) = slope*k + offset; a convenient omega(log k) family."""

    slope: int = 1
    offset: int = 8

    def size(self, k: int) -> int:
        if k < 0:
            raise ValueError("level must be >= 0")
        return 1 if k == 0 else self.slope * k + self.offset


@dataclass(frozen=True)
class ExplicitSchedule(LayerSchedule):
    widths: tuple

    def __post_init__(self):
        ws = tuple(int(w) for w in self.widths)
        object.__setattr__(self, "widths", ws)
        if not ws or ws[0] != 1:
            raise ConfigurationError("explicit schedule must start with a single root vertex")
        if any(w < 1 for w in ws):
            raise ConfigurationError("all widths must be >= 1")

    def size(self, k: int) -> int:
        if not 0 <= k < len(self.widths):
            raise ValueError(f"level {k} outside explicit schedule of length {len(self.widths)}")
        return self.widths[k]


@dataclass(frozen=True)
class ExpanderSchedule(LayerSchedule):
    """Width N up to the growth constant M, then doubling on a squared horizon.

    M = exp(N / (4 d^{12/5})) unless pinned via `ratio`; construction requires
    M >= 2.  Width is N for 1 <= k <= floor(M) and 2^m * N on each interval
    M^(2^(m-1)) < k <= M^(2^m).  Breakpoints are compared in double precision
    with the strict/non-strict pattern above; `ratio` exists so callers can pin
    an exact M (an exp/log round trip cannot).
    """

    base_width: int
    degree: float
    ratio: float = None

    def __post_init__(self):
        if self.base_width < 1:
            raise ConfigurationError("base width must be >= 1")
        M = self.M
        if not M >= 2.0:
            raise ConfigurationError(
                f"growth constant exp(N/(4 d^(12/5))) = {M:.6g} must be >= 2"
            )

    @property
    def M(self) -> float:
        if self.ratio is not None:
            return float(self.ratio)
        return math.exp(self.base_width / (4.0 * float(self.degree) ** 2.4))

    def size(self, k: int) -> int:
        if k < 0:
            raise ValueError("level must be >= 0")
        if k == 0:
            return 1
        M = self.M
        if k <= math.floor(M):
            return self.base_width
        lo = M  # M^(2^(m-1)) with m = 1
        m = 1
        while True:
            hi = lo * lo  # M^(2^m)
            if k <= hi or math.isinf(hi):
                return (2**m) * self.base_width
            lo = hi
            m += 1


# ---------------------------------------------------------------------------
# Layered DAG topology


@dataclass
class LayeredDag:
    """Explicit layered multigraph; parents[k] is an (L_k, indegree_k) array
    of indices into level k-1, for k = 1..depth."""

    layer_sizes: list
    parents: list = field(repr=False)

    def __post_init__(self):
        self.layer_sizes = [int(s) for s in self.layer_sizes]
        if self.layer_sizes[0] != 1:
            raise ValueError("level 0 must contain exactly the root vertex")
        if len(self.parents) != len(self.layer_sizes) - 1:
            raise ValueError("need one parent array per non-root level")
        self.parents = [np.asarray(p, dtype=np.int64) for p in self.parents]
        for k, p in enumerate(self.parents, start=1):
            if p.ndim != 2 or p.shape[0] != self.layer_sizes[k]:
                raise ValueError(f"level {k}: parent array shape {p.shape} mismatches width")
            if p.size and (p.min() < 0 or p.max() >= self.layer_sizes[k - 1]):
                raise ValueError(f"level {k}: parent index out of range")

    @property
    def depth(self) -> int:
        return len(self.layer_sizes) - 1

    def indegree(self, k: int) -> int:
        if not 1 <= k <= self.depth:
            raise ValueError("indegree defined for levels 1..depth")
        return self.parents[k - 1].shape[1]

    def level_parents(self, k: int) -> np.ndarray:
        return self.parents[k - 1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, LayeredDag):
            return NotImplemented
        return self.layer_sizes == other.layer_sizes and all(
            np.array_equal(a, b) for a, b in zip(self.parents, other.parents)
        )

    def max_outdegree(self, include_root: bool = False) -> int:
        """Largest number of outgoing edges of any vertex (root excluded by
        default: the fan-out of the root is the width of level 1 by design)."""
        best = 0
        for k in range(1, self.depth + 1):
            if k == 1 and not include_root:
                continue  # edges leaving the root
            counts = np.bincount(self.parents[k - 1].ravel(), minlength=self.layer_sizes[k - 1])
            if counts.size:
                best = max(best, int(counts.max()))
        return best


@dataclass
class LayerState:
    """Bit values of one level."""

    level: int
    bits: np.ndarray

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=np.uint8)

    def fraction_of_ones(self) -> float:
        return float(self.bits.mean()) if self.bits.size else 0.0
