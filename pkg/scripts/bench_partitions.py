#!/usr/bin/env python3
"""Growth measurement: nearest-flat-consistent partitions vs all partitions.

The count of consistent partitions should grow polynomially in n (the
realizable sign conditions bound it) while the total partition count grows
exponentially; this script prints both series and the fitted log-log slope.

Usage: python scripts/bench_partitions.py [N_MIN N_MAX SEED]
"""

import math
import sys
import time

sys.path.insert(0, "src")

from flatcover.clustering import count_consistent_partitions, partition_count
from flatcover.generators import random_cloud


def main():
    n_min = int(sys.argv[1]) if len(sys.argv) > 1 else 6
    n_max = int(sys.argv[2]) if len(sys.argv) > 2 else 12
    seed = int(sys.argv[3]) if len(sys.argv) > 3 else 0
    print("n\tconsistent\ttotal\tseconds")
    points = []
    for n in range(n_min, n_max + 1):
        cloud = random_cloud(n, 2, seed + n)
        t0 = time.time()
        c = count_consistent_partitions(cloud, 2, 1)
        print(f"{n}\t{c}\t{partition_count(n, 2)}\t{time.time() - t0:.3f}")
        points.append((math.log(n), math.log(max(c, 1))))
    mx = sum(x for x, _ in points) / len(points)
    my = sum(y for _, y in points) / len(points)
    slope = (sum((x - mx) * (y - my) for x, y in points)
             / sum((x - mx) ** 2 for x, _ in points))
    print(f"# log-log slope: {slope:.3f}")


if __name__ == "__main__":
    main()
