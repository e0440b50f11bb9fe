"""Exact decision/search for covering rational point sets with k hyperplanes.

Everything here runs in exact rational arithmetic; membership is equation
evaluation with an exact zero test.  Float clouds are rejected because a
zero-budget cover is meaningless under roundoff.

Two complete search strategies are provided:

* ``candidates`` - generate every hyperplane spanned by an affinely
  independent subset of at most d distinct positions, then branch over
  candidates containing the lowest-index uncovered position (largest covered
  set first).  A terminal rule answers YES outright when at most k*d
  positions remain, since any d points of R^d share a hyperplane.
* ``partition`` - depth-first assignment of positions to at most k slots,
  tracking each slot's affine hull exactly; a slot stays feasible while its
  hull has dimension at most d-1.  Points inside a slot's current hull are
  absorbed without branching (dominance), so the branch tree is bounded by
  the total hull-dimension budget k*d.  This is the strategy that scales to
  the Vandermonde-style instances where candidate enumeration is hopeless.

Both return identical answers; ``auto`` picks by instance size.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import DimensionMismatchError, GuardLimitError, ScalarModeError
from .fitting import fit_hyperplane_exact
from .geometry import (
    MODE_RATIONAL,
    CoverSolution,
    Hyperplane,
    WeightedPointCloud,
)
from .util import DEFAULT_CANDIDATE_GUARD, resolve_guard

# Above this many size-<=d subsets the auto strategy abandons candidate
# enumeration in favour of the partition search.
AUTO_CANDIDATE_LIMIT = 200_000

# Node cap for the partition search; exceeding it raises, never degrades.
PARTITION_NODE_GUARD = 10**7


@dataclass(frozen=True)
class CandidateHyperplane:
    """A candidate plane together with exactly the records lying on it."""

    hyperplane: Hyperplane
    covered: tuple

    def __post_init__(self):
        object.__setattr__(self, "covered", tuple(sorted(self.covered)))


def _require_rational(cloud: WeightedPointCloud, what: str) -> None:
    if cloud.mode != MODE_RATIONAL:
        raise ScalarModeError(f"{what} requires a rational-mode cloud")


def verify_cover(cloud: WeightedPointCloud, hyperplanes: Sequence[Hyperplane]) -> bool:
    """Exact membership test: every position lies on at least one hyperplane."""
    _require_rational(cloud, "verify_cover")
    for h in hyperplanes:
        if h.dim != cloud.dim:
            raise DimensionMismatchError("hyperplane dimension differs from cloud")
    for pos in cloud.distinct_positions():
        if not any(h.contains(pos) for h in hyperplanes):
            return False
    return True


def generate_candidates(cloud: WeightedPointCloud,
                        guard: int | None = None) -> list[CandidateHyperplane]:
    """All hyperplanes spanned by <= d affinely independent distinct positions.

    Complete in the sense that for any hyperplane H, some candidate's covered
    set contains H's covered set (take a maximal affinely independent subset
    of it).  Candidates are deduplicated by normalized coefficient vector.
    """
    _require_rational(cloud, "generate_candidates")
    positions = cloud.distinct_positions()
    d = cloud.dim
    n = len(positions)
    cap = resolve_guard(DEFAULT_CANDIDATE_GUARD, guard)
    if n > 1 and n ** d > cap:
        raise GuardLimitError(
            f"instance too large for exact mode: n^d = {n ** d} exceeds guard {cap}")
    seen: dict[tuple, Hyperplane] = {}
    for size in range(1, min(d, n) + 1):
        for subset in itertools.combinations(range(n), size):
            pts = [positions[i] for i in subset]
            if not _affinely_independent(pts):
                continue
            h = fit_hyperplane_exact(pts)
            seen.setdefault(h.coeffs, h)
    out = []
    for h in seen.values():
        covered = tuple(i for i, rec in enumerate(cloud.records)
                        if h.contains(rec.coords))
        out.append(CandidateHyperplane(h, covered))
    out.sort(key=lambda c: c.hyperplane.coeffs)
    return out


def _affinely_independent(points) -> bool:
    rows: list[list[Fraction]] = []
    base = points[0]
    for p in points[1:]:
        v = [Fraction(a) - Fraction(b) for a, b in zip(p, base)]
        for row in rows:
            piv = next(i for i, c in enumerate(row) if c != 0)
            if v[piv]:
                f = v[piv] / row[piv]
                v = [a - f * b for a, b in zip(v, row)]
        if not any(v):
            return False
        rows.append(v)
    return True


def _max_independent_subset(positions: list) -> list:
    """Indices of a maximal affinely independent subset, greedy in order."""
    rows: list[list[Fraction]] = []
    picked = [0]
    base = positions[0]
    for i, p in enumerate(positions[1:], start=1):
        v = [Fraction(a) - Fraction(b) for a, b in zip(p, base)]
        for row in rows:
            piv = next(j for j, c in enumerate(row) if c != 0)
            if v[piv]:
                f = v[piv] / row[piv]
                v = [a - f * b for a, b in zip(v, row)]
        if any(v):
            rows.append(v)
            picked.append(i)
    return picked


def _batch_cover(positions: list, d: int) -> list[Hyperplane]:
    """One hyperplane per group of <= d positions; always succeeds."""
    out = []
    for start in range(0, len(positions), d):
        group = positions[start:start + d]
        picked = _max_independent_subset(group)
        out.append(fit_hyperplane_exact([group[i] for i in picked]))
    return out


def solve_cover(cloud: WeightedPointCloud, k: int, *, strategy: str = "auto",
                guard: int | None = None) -> Optional[CoverSolution]:
    """Cover all positions with at most k hyperplanes, or None if impossible.

    A None answer carries the full guarantee that no k hyperplanes cover:
    both strategies explore their search space exhaustively.
    """
    _require_rational(cloud, "solve_cover")
    if k < 0:
        raise ValueError("k must be >= 0")
    positions = cloud.distinct_positions()
    if not positions:
        return CoverSolution(())
    if k == 0:
        return None
    d = cloud.dim
    if strategy == "auto":
        strategy = "candidates" if len(positions) ** d <= AUTO_CANDIDATE_LIMIT \
            else "partition"
    if strategy == "candidates":
        planes = _solve_candidates(cloud, positions, k, guard)
    elif strategy == "partition":
        planes = _solve_partition(positions, d, k, guard)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    if planes is None:
        return None
    assert verify_cover(cloud, planes)
    return CoverSolution(tuple(planes))


# ---------------------------------------------------------------------------
# candidate branching


def _solve_candidates(cloud, positions, k, guard):
    d = cloud.dim
    n = len(positions)
    if n <= k * d:
        return _batch_cover(positions, d)
    cands = generate_candidates(cloud, guard)
    pos_index = {p: i for i, p in enumerate(positions)}
    entries = []
    for c in cands:
        mask = 0
        for i in c.covered:
            mask |= 1 << pos_index[cloud.records[i].coords]
        entries.append((mask, c.hyperplane))
    # Largest covered set first, coefficient order as the deterministic tie-break.
    entries.sort(key=lambda e: (-e[0].bit_count(), e[1].coeffs))
    full = (1 << n) - 1

    def rec(covered, budget):
        uncovered = full & ~covered
        if uncovered == 0:
            return []
        if budget == 0:
            return None
        remaining = uncovered.bit_count()
        if remaining <= budget * d:
            rest = [positions[i] for i in range(n) if uncovered >> i & 1]
            return _batch_cover(rest, d)
        q = (uncovered & -uncovered).bit_length() - 1
        for mask, plane in entries:
            if mask >> q & 1:
                sub = rec(covered | mask, budget - 1)
                if sub is not None:
                    return [plane] + sub
        return None

    return rec(0, k)


# ---------------------------------------------------------------------------
# partition search


def _scale_to_int(positions):
    lcm = 1
    for p in positions:
        for c in p:
            den = Fraction(c).denominator
            lcm = lcm * den // math.gcd(lcm, den)
    return [tuple(int(Fraction(c) * lcm) for c in p) for p in positions]


def _reduce_row(v, rows):
    """Fraction-free reduction of integer vector v against echelon rows."""
    v = list(v)
    for piv, row in rows:
        if v[piv]:
            a, b = row[piv], v[piv]
            v = [x * a - y * b for x, y in zip(v, row)]
    return v


def _normalize_row(v):
    g = 0
    for c in v:
        g = math.gcd(g, abs(c))
    if g > 1:
        v = [c // g for c in v]
    return v


def _solve_partition(positions, d, k, guard):
    pts = _scale_to_int(positions)
    n = len(pts)
    cap = resolve_guard(PARTITION_NODE_GUARD, guard)
    nodes = 0

    # Slot state: (base_index, rows, reps) with rows a tuple of (pivot, row)
    # in echelon form over the integers and reps the indices whose additions
    # grew the hull (at most d of them, pairwise affinely independent).

    def search(i, slots):
        nonlocal nodes
        nodes += 1
        if nodes > cap:
            raise GuardLimitError(
                f"instance too large for exact mode: partition-search nodes exceed {cap}")
        if i == n:
            return slots
        x = pts[i]
        residuals = []
        for j, (base, rows, reps) in enumerate(slots):
            diff = [a - b for a, b in zip(x, pts[base])]
            v = _reduce_row(diff, rows)
            if not any(v):
                # Inside this slot's hull: absorbing it is dominant.
                return search(i + 1, slots)
            residuals.append(v)
        for j, (base, rows, reps) in enumerate(slots):
            if len(rows) < d - 1:
                v = _normalize_row(residuals[j])
                piv = next(t for t, c in enumerate(v) if c)
                new_slot = (base, rows + ((piv, tuple(v)),), reps + (i,))
                result = search(i + 1, slots[:j] + (new_slot,) + slots[j + 1:])
                if result is not None:
                    return result
        if len(slots) < k:
            result = search(i + 1, slots + ((i, (), ()),))
            if result is not None:
                return result
        return None

    final = search(1, ((0, (), ()),)) if n else ()
    if final is None:
        return None
    planes = []
    for base, rows, reps in final:
        frame = [positions[base]] + [positions[i] for i in reps]
        planes.append(fit_hyperplane_exact(frame))
    return planes


# ---------------------------------------------------------------------------
# d=2 kernel


@dataclass(frozen=True)
class KernelResult:
    reduced: WeightedPointCloud
    forced: tuple
    k: int


def forced_line_kernel(cloud: WeightedPointCloud, k: int) -> Optional[KernelResult]:
    """Classic quadratic kernel for covering planar points with k lines.

    Repeatedly forces any line through at least k+1 distinct positions (k
    lines cannot otherwise cover them, as two lines share at most one point),
    removing its positions and decrementing k.  Afterwards more than k^2
    positions left means NO; otherwise the reduced instance together with the
    forced lines is equivalent to the original.
    """
    _require_rational(cloud, "forced_line_kernel")
    if cloud.dim != 2:
        raise DimensionMismatchError("forced_line_kernel requires d = 2")
    if k < 0:
        raise ValueError("k must be >= 0")
    positions = cloud.distinct_positions()
    forced: list[Hyperplane] = []
    k_cur = k
    while k_cur >= 1 and len(positions) >= 2:
        counts: dict[tuple, set] = {}
        for i, j in itertools.combinations(range(len(positions)), 2):
            h = fit_hyperplane_exact([positions[i], positions[j]])
            counts.setdefault(h.coeffs, set()).update((i, j))
        best = None
        for coeffs, members in counts.items():
            if len(members) >= k_cur + 1:
                key = (-len(members), coeffs)
                if best is None or key < best[0]:
                    best = (key, coeffs, members)
        if best is None:
            break
        _, coeffs, members = best
        forced.append(Hyperplane(coeffs))
        positions = [p for t, p in enumerate(positions) if t not in members]
        k_cur -= 1
    if len(positions) > k_cur * k_cur:
        return None
    kept = set(positions)
    reduced_records = tuple(r for r in cloud.records if r.coords in kept)
    reduced = WeightedPointCloud(cloud.dim, cloud.mode, reduced_records)
    return KernelResult(reduced, tuple(forced), k_cur)


def solve_cover_kernelized(cloud: WeightedPointCloud, k: int,
                           *, guard: int | None = None) -> Optional[CoverSolution]:
    """Kernel + search; answers agree with plain solve_cover on every instance."""
    kr = forced_line_kernel(cloud, k)
    if kr is None:
        return None
    if not kr.reduced.records:
        return CoverSolution(kr.forced)
    inner = solve_cover(kr.reduced, kr.k, guard=guard)
    if inner is None:
        return None
    return CoverSolution(kr.forced + inner.hyperplanes)
