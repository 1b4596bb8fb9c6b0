"""Resonator support construction, binning, and Dirichlet-polynomial evaluation.

Support elements are square-free products of band primes, stored factored
(index sets into the band prime list) with their logarithm carried in float;
the integer value of an element is never materialized since only log m enters
binning and evaluation.  Truncated builds keep the largest-weight elements,
found by an exact lazy best-first enumeration, and are flagged throughout.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .arith_basis import PrimeBands
from .errors import ValidationError
from .params import Params

# The printed lower window edge (1 - 1/T)^(j-1) admits every small element into
# every window; the construction this follows uses a multiplicative window
# around the bin, so the lower edge exponent sign is taken positive.  Flip to
# -1.0 to restore the printed convention.
WINDOW_LOWER_SIGN = +1.0


def weight_f(p: int, params: Params, bands: PrimeBands) -> float:
    """Multiplicative weight f at a prime: supported on the band primes only."""
    if p not in bands.all_primes:
        return 0.0
    denom = math.log(p) - params.log2_n - params.log3_n - math.log(params.phi_q)
    assert denom > 0.0, f"weight denominator non-positive at band prime {p}"
    scale = params.c_q * math.sqrt(params.log_n * params.log2_n / params.log3_n)
    return scale / (math.sqrt(p) * denom)


def band_caps(params: Params, bands: PrimeBands) -> list[int]:
    """Per-band maximum admissible prime counts (strictly below the threshold)."""
    caps = []
    for k in range(1, bands.band_count + 1):
        theta = params.a_param * params.log_n / (k * k * params.log3_n)
        caps.append(max(0, math.ceil(theta) - 1))
    return caps


@dataclass(frozen=True)
class SupportElement:
    prime_indices: tuple[int, ...]
    log_value: float
    weight: float


@dataclass(frozen=True)
class SupportSet:
    q: int
    primes: tuple[int, ...]
    prime_logs: tuple[float, ...]
    prime_weights: tuple[float, ...]
    band_index: tuple[int, ...]  # 1-based band of each prime position
    caps: tuple[int, ...]  # per-band admissible counts
    elements: tuple[SupportElement, ...]
    truncated: bool
    m_q_count: int  # exact |M_q| regardless of truncation

    @property
    def size(self) -> int:
        return len(self.elements)

    def sum_f_squared(self) -> float:
        return math.fsum(e.weight * e.weight for e in self.elements)

    def log_values(self) -> np.ndarray:
        return np.array([e.log_value for e in self.elements], dtype=np.float64)


def _exact_support_count(band_sizes: Sequence[int], caps: Sequence[int]) -> int:
    total = 1
    for n_k, cap in zip(band_sizes, caps):
        total *= sum(math.comb(n_k, j) for j in range(0, min(cap, n_k) + 1))
    return total


class _BandStream:
    """Subsets of one band in descending total log-weight order (lazy)."""

    def __init__(self, indices: Sequence[int], log_weights: Sequence[float], cap: int):
        order = sorted(range(len(indices)), key=lambda i: (-log_weights[i], indices[i]))
        self._indices = [indices[i] for i in order]
        self._g = [log_weights[i] for i in order]
        self._heap: list[tuple[float, tuple[int, ...]]] = []
        self._seen: set[tuple[int, ...]] = set()
        for j in range(0, min(cap, len(order)) + 1):
            state = tuple(range(j))
            self._push(state)
        self.items: list[tuple[float, tuple[int, ...]]] = []

    def _push(self, state: tuple[int, ...]) -> None:
        if state in self._seen:
            return
        self._seen.add(state)
        heapq.heappush(self._heap, (-sum(self._g[i] for i in state), state))

    def _advance(self) -> bool:
        if not self._heap:
            return False
        neg, state = heapq.heappop(self._heap)
        subset = tuple(sorted(self._indices[i] for i in state))
        self.items.append((-neg, subset))
        n = len(self._indices)
        for pos in range(len(state)):
            nxt = state[pos] + 1
            limit = state[pos + 1] if pos + 1 < len(state) else n
            if nxt < limit:
                self._push(state[:pos] + (nxt,) + state[pos + 1 :])
        return True

    def get(self, i: int) -> tuple[float, tuple[int, ...]] | None:
        while len(self.items) <= i:
            if not self._advance():
                return None
        return self.items[i]


def _top_k_subsets(
    streams: list[_BandStream], k: int
) -> Iterator[tuple[int, ...]]:
    """k best combined subsets across bands by total log-weight, descending."""
    start = tuple(0 for _ in streams)
    first = [s.get(0) for s in streams]
    if any(f is None for f in first):
        return
    heap = [(-sum(f[0] for f in first), start)]
    seen = {start}
    produced = 0
    while heap and produced < k:
        _, pos = heapq.heappop(heap)
        combined: list[int] = []
        for s, i in zip(streams, pos):
            combined.extend(s.get(i)[1])
        yield tuple(sorted(combined))
        produced += 1
        for b in range(len(streams)):
            nxt = list(pos)
            nxt[b] += 1
            if streams[b].get(nxt[b]) is None:
                continue
            key = tuple(nxt)
            if key in seen:
                continue
            seen.add(key)
            total = sum(streams[j].get(key[j])[0] for j in range(len(streams)))
            heapq.heappush(heap, (-total, key))


def _assemble_support(
    q: int,
    primes: Sequence[int],
    weights: Sequence[float],
    band_index: Sequence[int],
    caps: Sequence[int],
    support_cap: int,
) -> SupportSet:
    logs = [math.log(p) for p in primes]
    band_count = max(band_index) if band_index else 0
    per_band: list[list[int]] = [[] for _ in range(band_count)]
    for pos, k in enumerate(band_index):
        per_band[k - 1].append(pos)
    sizes = [len(b) for b in per_band]
    count = _exact_support_count(sizes, caps)

    subsets: list[tuple[int, ...]]
    if count <= support_cap:
        truncated = False
        per_band_choices = []
        for members, cap in zip(per_band, caps):
            choices: list[tuple[int, ...]] = []
            for j in range(0, min(cap, len(members)) + 1):
                choices.extend(itertools.combinations(members, j))
            per_band_choices.append(choices)
        subsets = [
            tuple(sorted(itertools.chain.from_iterable(combo)))
            for combo in itertools.product(*per_band_choices)
        ]
    else:
        truncated = True
        log_weights = [math.log(w) for w in weights]
        streams = [
            _BandStream(members, [log_weights[m] for m in members], cap)
            for members, cap in zip(per_band, caps)
        ]
        subsets = list(_top_k_subsets(streams, support_cap))

    elements = []
    for subset in subsets:
        log_value = math.fsum(logs[i] for i in subset)
        weight = 1.0
        for i in subset:
            weight *= weights[i]
        elements.append(
            SupportElement(prime_indices=subset, log_value=log_value, weight=weight)
        )
    elements.sort(key=lambda e: (e.log_value, e.prime_indices))
    return SupportSet(
        q=q,
        primes=tuple(primes),
        prime_logs=tuple(logs),
        prime_weights=tuple(weights),
        band_index=tuple(band_index),
        caps=tuple(caps),
        elements=tuple(elements),
        truncated=truncated,
        m_q_count=count,
    )


def build_support(params: Params, bands: PrimeBands) -> SupportSet:
    """Enumerate the pruned support: square-free band-prime products obeying
    the per-band caps, truncated to the largest weights beyond support_cap."""
    if not bands.all_primes:
        raise ValidationError("cannot build a support from empty bands")
    primes = list(bands.all_primes)
    weights = [weight_f(p, params, bands) for p in primes]
    band_index = [int(k) for k in bands.index_to_band()]
    caps = band_caps(params, bands)
    return _assemble_support(params.q, primes, weights, band_index, caps, params.support_cap)


def support_from_primes(
    q: int,
    primes: Sequence[int],
    weights: Sequence[float],
    band_index: Sequence[int] | None = None,
    caps: Sequence[int] | None = None,
    support_cap: int = 10_000_000,
) -> SupportSet:
    """Synthetic support over an explicit prime list (tests, small studies)."""
    if len(primes) != len(weights):
        raise ValidationError("primes and weights must have equal length")
    if band_index is None:
        band_index = [1] * len(primes)
    if caps is None:
        caps = [len(primes)] * (max(band_index) if band_index else 0)
    return _assemble_support(q, list(primes), list(weights), list(band_index), list(caps), support_cap)


# ---------------------------------------------------------------------------
# Binning and evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BinnedResonator:
    """Thinned resonator: one representative per occupied multiplicative bin."""

    T: float
    bin_indices: np.ndarray  # int64, strictly increasing
    m_logs: np.ndarray  # float64, log of the bin minimum
    r: np.ndarray  # float64, window-aggregated coefficients
    l2_norm_sq: float
    truncated: bool

    @property
    def size(self) -> int:
        return int(self.bin_indices.size)

    def r0(self) -> float:
        """R(0) = sum of coefficients."""
        return float(np.sum(self.r))


def bin_support(support: SupportSet, T: float) -> BinnedResonator:
    """Assign support elements to bins of width log(1 + 1/T) and aggregate
    squared weights over the three-bin windows around each occupied bin."""
    if not support.elements:
        raise ValidationError("cannot bin an empty support")
    if T <= 0:
        raise ValidationError(f"T must be positive, got {T}")
    w = math.log1p(1.0 / T)
    logs = support.log_values()
    weights_sq = np.array([e.weight**2 for e in support.elements], dtype=np.float64)
    order = np.argsort(logs, kind="stable")  # elements pre-sorted; keep stable order
    logs = logs[order]
    weights_sq = weights_sq[order]

    bins = np.floor(logs / w).astype(np.int64)
    uniq, first_pos = np.unique(bins, return_index=True)
    prefix = np.concatenate([[0.0], np.cumsum(weights_sq)])

    r_vals = np.empty(uniq.size, dtype=np.float64)
    for i, j in enumerate(uniq):
        lo = WINDOW_LOWER_SIGN * (j - 1) * w
        hi = (j + 2) * w
        left = np.searchsorted(logs, lo, side="left")
        right = np.searchsorted(logs, hi, side="right")
        r_vals[i] = math.sqrt(max(0.0, prefix[right] - prefix[left]))
    m_logs = logs[first_pos]
    return BinnedResonator(
        T=float(T),
        bin_indices=uniq,
        m_logs=m_logs,
        r=r_vals,
        l2_norm_sq=float(np.sum(r_vals**2)),
        truncated=support.truncated,
    )


_SPLIT = 134217729.0  # 2^27 + 1, Dekker splitting constant
_TWO_PI_HI = 6.283185307179586
_TWO_PI_LO = 2.4492935982947064e-16


def _two_prod(a, b):
    p = a * b
    ca = _SPLIT * a
    ahi = ca - (ca - a)
    alo = a - ahi
    cb = _SPLIT * b
    bhi = cb - (cb - b)
    blo = b - bhi
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


def _phases_mod_two_pi(t, lams):
    """t * lams reduced mod 2 pi with compensated products."""
    p, e = _two_prod(t, lams)
    n = np.rint(p / _TWO_PI_HI)
    q, qe = _two_prod(n, _TWO_PI_HI)
    return ((p - q) - qe) - n * _TWO_PI_LO + e


def resonator_value(binned: BinnedResonator, t: float) -> complex:
    """R(t) = sum r(m) exp(-i t log m) with compensated phase reduction."""
    phases = _phases_mod_two_pi(float(t), binned.m_logs)
    return complex(np.sum(binned.r * np.exp(-1j * phases)))


def _is_uniform(t_grid: np.ndarray) -> bool:
    if t_grid.size < 3:
        return False
    d = np.diff(t_grid)
    h = d[0]
    return bool(np.max(np.abs(d - h)) <= 1e-9 * max(1.0, abs(h)))


def resonator_bulk(binned: BinnedResonator, t_grid: np.ndarray, block: int = 256) -> np.ndarray:
    """R on a sorted grid; uniform grids run a per-term phase recurrence with
    periodic exact re-anchoring, agreeing with the pointwise path to 1e-10 R(0)."""
    t_grid = np.asarray(t_grid, dtype=np.float64)
    if t_grid.size == 0:
        return np.zeros(0, dtype=np.complex128)
    if not _is_uniform(t_grid):
        return np.array([resonator_value(binned, float(t)) for t in t_grid])
    lam = binned.m_logs
    r = binned.r
    out = np.empty(t_grid.size, dtype=np.complex128)
    h = (t_grid[-1] - t_grid[0]) / (t_grid.size - 1) if t_grid.size > 1 else 0.0
    step = np.exp(-1j * (h * lam))
    for start in range(0, t_grid.size, block):
        stop = min(start + block, t_grid.size)
        t0 = float(t_grid[start])
        anchor = r * np.exp(-1j * _phases_mod_two_pi(t0, lam))
        n_steps = stop - start
        powers = np.empty((n_steps, lam.size), dtype=np.complex128)
        powers[0] = anchor
        if n_steps > 1:
            powers[1:] = step
            np.cumprod(powers, axis=0, out=powers)
        # first-order correction for grid values straying from t0 + s h
        gamma = t_grid[start:stop] - (t0 + h * np.arange(n_steps))
        sums = powers.sum(axis=1)
        if np.max(np.abs(gamma)) * np.max(np.abs(lam), initial=0.0) > 1e-14:
            sums -= 1j * gamma * (powers * lam).sum(axis=1)
        out[start:stop] = sums
    return out


def support_l2(params: Params, bands: PrimeBands, support: SupportSet) -> tuple[float, float]:
    """(full, enumerated) squared-weight mass: the exact multiplicative product
    over all band primes next to the sum over the built support."""
    full = math.exp(
        math.fsum(math.log1p(weight_f(p, params, bands) ** 2) for p in bands.all_primes)
    )
    return full, support.sum_f_squared()


# ---------------------------------------------------------------------------
# Serialization: one element per line, prime indices then log_value and weight
# ---------------------------------------------------------------------------


def save_support(support: SupportSet, path: str) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write("# zetares support v1\n")
        fh.write(f"# q {support.q}\n")
        fh.write(f"# truncated {int(support.truncated)}\n")
        fh.write(f"# m_q_count {support.m_q_count}\n")
        fh.write("# primes " + " ".join(str(p) for p in support.primes) + "\n")
        fh.write("# band_index " + " ".join(str(k) for k in support.band_index) + "\n")
        fh.write("# caps " + " ".join(str(c) for c in support.caps) + "\n")
        fh.write(
            "# prime_weights " + " ".join(format(w, ".17g") for w in support.prime_weights) + "\n"
        )
        for e in support.elements:
            head = " ".join(str(i) for i in e.prime_indices)
            line = f"{head} {e.log_value:.17g} {e.weight:.17g}".lstrip()
            fh.write(line + "\n")


def load_support(path: str) -> SupportSet:
    meta: dict[str, str] = {}
    elements: list[SupportElement] = []
    with open(path, "r", encoding="ascii") as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].strip().split(None, 1)
                if len(parts) == 2:
                    meta[parts[0]] = parts[1]
                continue
            tokens = line.split()
            idxs = tuple(int(x) for x in tokens[:-2])
            elements.append(
                SupportElement(
                    prime_indices=idxs,
                    log_value=float(tokens[-2]),
                    weight=float(tokens[-1]),
                )
            )
    try:
        q = int(meta["q"])
        primes = tuple(int(x) for x in meta["primes"].split())
        band_index = tuple(int(x) for x in meta["band_index"].split())
        caps = tuple(int(x) for x in meta["caps"].split())
        weights = tuple(float(x) for x in meta["prime_weights"].split())
        truncated = bool(int(meta["truncated"]))
        m_q_count = int(meta["m_q_count"])
    except KeyError as exc:
        raise ValidationError(f"support file missing header field: {exc}") from exc
    return SupportSet(
        q=q,
        primes=primes,
        prime_logs=tuple(math.log(p) for p in primes),
        prime_weights=weights,
        band_index=band_index,
        caps=caps,
        elements=tuple(elements),
        truncated=truncated,
        m_q_count=m_q_count,
    )
