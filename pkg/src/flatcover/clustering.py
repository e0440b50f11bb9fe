"""Exact and heuristic solvers for k-flat clustering.

The exact solver enumerates canonical set partitions of the records into at
most k blocks and fits each block optimally; every nearest-flat-consistent
assignment occurs among these partitions, so the minimum over them is the
global optimum.  A branch-and-bound on accumulated block-fit cost prunes the
enumeration without ever changing the returned solution (block fit cost is
monotone in the block's record set).

Records, not expanded points, are the unit of partitioning: a stack of
duplicates always moves together, which is cost-neutral for multisets.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ScalarModeError
from .fitting import best_fit_flat
from .geometry import (
    MODE_FLOAT,
    ClusteringSolution,
    WeightedPointCloud,
    dist2_point_flat,
)
from .util import DEFAULT_PARTITION_GUARD, make_rng, resolve_guard, check_guard


def stirling2(n: int, k: int) -> int:
    """Number of partitions of n labeled items into exactly k nonempty blocks."""
    if k < 0 or k > n:
        return 0
    row = [1] + [0] * k
    for i in range(1, n + 1):
        new = [0] * (k + 1)
        for j in range(1, min(i, k) + 1):
            new[j] = j * row[j] + row[j - 1]
        row = new
    return row[k] if n > 0 else (1 if k == 0 else 0)


def partition_count(n: int, k: int) -> int:
    return sum(stirling2(n, j) for j in range(1, k + 1))


class PartitionIterator:
    """Canonical enumeration of set partitions into at most k nonempty blocks.

    Emits restricted growth strings in lexicographic order: record 0 is in
    block 0 and a new block index is exactly one more than the maximum index
    used so far.  Exactly stirling2(n, j) emitted strings use j blocks.
    """

    def __init__(self, n_records: int, k: int):
        if n_records < 1 or k < 1:
            raise ValueError("need n_records >= 1 and k >= 1")
        self.n_records = n_records
        self.k = k

    def __iter__(self):
        n, k = self.n_records, self.k
        labels = [0] * n

        def rec(i, used):
            if i == n:
                yield tuple(labels)
                return
            top = used + 1 if used < k else used
            for b in range(top):
                labels[i] = b
                yield from rec(i + 1, max(used, b + 1))

        yield from rec(1, 1)

    def __len__(self):
        return partition_count(self.n_records, self.k)


@dataclass(frozen=True)
class HeuristicConfig:
    restarts: int = 10
    max_iter: int = 100
    rel_tol: float = 1e-9
    rng_seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.max_iter < 1 or not self.rel_tol > 0:
            raise ValueError("restarts >= 1, max_iter >= 1, rel_tol > 0 required")


def _check_solver_args(cloud: WeightedPointCloud, k: int, r: int) -> None:
    if cloud.mode != MODE_FLOAT:
        raise ScalarModeError("clustering solvers operate on float-mode clouds")
    if not cloud.records:
        raise ValueError("cannot cluster an empty cloud")
    if k < 1:
        raise ValueError("k must be >= 1")
    if not (0 <= r <= cloud.dim - 1):
        raise ValueError(f"flat dimension must satisfy 0 <= r <= d-1, got {r}")


def _subcloud(cloud: WeightedPointCloud, idx) -> WeightedPointCloud:
    return WeightedPointCloud(cloud.dim, cloud.mode,
                              tuple(cloud.records[i] for i in idx))


def _solution_from_labels(cloud, labels, k, r) -> ClusteringSolution:
    used = max(labels) + 1
    blocks = [[] for _ in range(used)]
    for i, b in enumerate(labels):
        blocks[b].append(i)
    fits = [best_fit_flat(_subcloud(cloud, blk), r) for blk in blocks]
    flats = [f.flat for f in fits]
    while len(flats) < k:
        flats.append(flats[0])
    cost = float(sum(f.cost for f in fits))
    return ClusteringSolution(tuple(flats), tuple(labels), cost)


def solve_exact(cloud: WeightedPointCloud, k: int, r: int, budget: float | None = None,
                *, guard: int | None = None, prune: bool = True) -> ClusteringSolution:
    """Globally optimal k-flat clustering by canonical partition enumeration.

    Raises GuardLimitError when the partition count exceeds the guard rather
    than silently degrading to a heuristic.  With ``prune`` the search skips
    branches whose accumulated block-fit cost already meets the incumbent;
    pruned and unpruned runs return the same solution.  A ``budget`` turns on
    decision mode: the returned optimum additionally carries
    ``budget_decision = (cost <= budget)``.
    """
    _check_solver_args(cloud, k, r)
    n = len(cloud.records)
    d = cloud.dim
    cap = resolve_guard(DEFAULT_PARTITION_GUARD, guard)
    check_guard(partition_count(n, k), cap, "partition count")

    X = cloud.coords_array()
    W = cloud.weights_array()

    # Per-block accumulators: weight, coordinate sums, raw second moments.
    bw = [0.0] * k
    bs = [np.zeros(d) for _ in range(k)]
    bm = [np.zeros((d, d)) for _ in range(k)]
    bcost = [0.0] * k

    two_d = d == 2 and r in (0, 1)

    def block_cost(j):
        w = bw[j]
        if w == 0.0:
            return 0.0
        if two_d:
            s = bs[j]
            m = bm[j]
            a = m[0, 0] - s[0] * s[0] / w
            b = m[1, 1] - s[1] * s[1] / w
            if r == 0:
                return max(a + b, 0.0)
            c = m[0, 1] - s[0] * s[1] / w
            half = 0.5 * (a + b)
            root = math.sqrt(max(0.25 * (a - b) ** 2 + c * c, 0.0))
            return max(half - root, 0.0)
        S = bm[j] - np.outer(bs[j], bs[j]) / w
        evals = np.linalg.eigvalsh(S)
        return max(float(np.sum(evals[: d - r])), 0.0)

    best_total = math.inf
    best_labels = None
    labels = [0] * n

    def rec(i, used, total):
        nonlocal best_total, best_labels
        if i == n:
            if total < best_total:
                best_total = total
                best_labels = tuple(labels)
            return
        x = X[i]
        wt = W[i]
        outer = np.outer(x, x) * wt
        top = used + 1 if used < k else used
        for b in range(top):
            old_cost = bcost[b]
            bw[b] += wt
            bs[b] += wt * x
            bm[b] += outer
            new_cost = block_cost(b)
            bcost[b] = new_cost
            new_total = total - old_cost + new_cost
            if not (prune and new_total >= best_total):
                labels[i] = b
                rec(i + 1, max(used, b + 1), new_total)
            bw[b] -= wt
            bs[b] -= wt * x
            bm[b] -= outer
            bcost[b] = old_cost

    # Record 0 always opens block 0.
    bw[0] = W[0]
    bs[0] = W[0] * X[0]
    bm[0] = np.outer(X[0], X[0]) * W[0]
    bcost[0] = block_cost(0)
    rec(1, 1, bcost[0])

    solution = _solution_from_labels(cloud, best_labels, k, r)
    if budget is not None:
        solution = ClusteringSolution(solution.flats, solution.assignment,
                                      solution.cost,
                                      budget_decision=solution.cost <= budget)
    return solution


def is_voronoi_consistent(cloud: WeightedPointCloud, solution: ClusteringSolution,
                          tol: float = 1e-9) -> bool:
    """True iff every record's assigned flat attains the minimum distance (up to tol)."""
    for rec, b in zip(cloud.records, solution.assignment):
        dists = [dist2_point_flat(rec.coords, f) for f in solution.flats]
        if dists[b] > min(dists) + tol:
            return False
    return True


def count_consistent_partitions(cloud: WeightedPointCloud, k: int, r: int,
                                *, guard: int | None = None) -> int:
    """Number of canonical partitions reproduced by their own fitted flats.

    A partition counts when fitting each block and re-assigning every record
    to its nearest fitted flat (ties to the lowest block index) yields the
    partition back.  Empirically measures how many of the enumerated
    partitions are realizable as nearest-flat assignments.
    """
    _check_solver_args(cloud, k, r)
    n = len(cloud.records)
    cap = resolve_guard(DEFAULT_PARTITION_GUARD, guard)
    check_guard(partition_count(n, k), cap, "partition count")
    count = 0
    for labels in PartitionIterator(n, k):
        used = max(labels) + 1
        blocks = [[] for _ in range(used)]
        for i, b in enumerate(labels):
            blocks[b].append(i)
        flats = [best_fit_flat(_subcloud(cloud, blk), r).flat for blk in blocks]
        ok = True
        for i, rec in enumerate(cloud.records):
            dists = [dist2_point_flat(rec.coords, f) for f in flats]
            if int(np.argmin(dists)) != labels[i]:
                ok = False
                break
        if ok:
            count += 1
    return count


def _heuristic_restart(cloud, k, r, config, stream):
    rng = make_rng(config.rng_seed, stream)
    n = len(cloud.records)
    X = cloud.coords_array()
    W = cloud.weights_array()
    m = min(r + 1, n)
    flats = []
    for _ in range(k):
        idx = rng.choice(n, size=m, replace=False)
        flats.append(best_fit_flat(_subcloud(cloud, sorted(idx)), r).flat)

    def dists_to(flat):
        Y = X - flat.offset_array()
        if flat.dim_flat:
            B = flat.basis_array()
            Y = Y - (Y @ B) @ B.T
        return np.einsum("ij,ij->i", Y, Y)

    prev_cost = math.inf
    assign = np.zeros(n, dtype=int)
    for _ in range(config.max_iter):
        D = np.column_stack([dists_to(f) for f in flats])
        assign = np.argmin(D, axis=1)  # ties resolve to the lowest flat index
        for j in range(k):
            members = np.flatnonzero(assign == j)
            if len(members):
                flats[j] = best_fit_flat(_subcloud(cloud, members), r).flat
        cur = np.column_stack([dists_to(f) for f in flats])
        resid = cur[np.arange(n), assign]
        cost = float(W @ resid)
        # Reseed empty blocks from the records with the largest current
        # residuals; a reseed changes the flats, so never converge on it.
        claim = resid.copy()
        reseeded = False
        for j in range(k):
            if not np.any(assign == j):
                worst = int(np.argmax(claim))
                flats[j] = best_fit_flat(_subcloud(cloud, [worst]), r).flat
                claim[worst] = -1.0
                reseeded = True
        converged = (not reseeded
                     and prev_cost - cost <= config.rel_tol * max(prev_cost, 1e-300))
        prev_cost = cost
        if converged:
            break
    return prev_cost, tuple(int(a) for a in assign), tuple(flats)


def solve_heuristic(cloud: WeightedPointCloud, k: int, r: int,
                    config: HeuristicConfig = HeuristicConfig(),
                    *, threads: int = 1) -> ClusteringSolution:
    """Alternating assign/refit heuristic with seeded restarts.

    Each restart draws from an independent counter-based stream and restarts
    merge by (cost, assignment lexicographic), so the result does not depend
    on scheduling.
    """
    _check_solver_args(cloud, k, r)
    runs = range(config.restarts)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(
                lambda s: _heuristic_restart(cloud, k, r, config, s), runs))
    else:
        results = [_heuristic_restart(cloud, k, r, config, s) for s in runs]
    cost, assign, flats = min(results, key=lambda res: (res[0], res[1]))
    return ClusteringSolution(flats, assign, cost)
