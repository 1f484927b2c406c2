"""Key diversity estimation from cluster sizes.

Read counts per distinct key are modelled as zero-truncated Poisson:
keys drawn zero times are invisible, so the observed mean cluster size
m satisfies m = lam / (1 - exp(-lam)).  The MLE lam solves that
equation and the diversity estimate inflates the observed cluster count
by the unseen-mass factor 1 / (1 - exp(-lam)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq


@dataclass
class DiversityEstimate:
    n_clusters: int
    mean_cluster_size: float
    lam: float               # zero-truncated Poisson rate MLE
    diversity: float         # estimated number of distinct keys
    degenerate: bool         # all-singleton sample: lower bound only


def estimate_diversity(cluster_sizes: np.ndarray) -> DiversityEstimate:
    sizes = np.asarray(cluster_sizes, dtype=np.float64)
    if sizes.size == 0:
        return DiversityEstimate(0, 0.0, 0.0, 0.0, True)
    if np.any(sizes < 1):
        raise ValueError("cluster sizes must be >= 1")
    n = sizes.size
    m = float(sizes.mean())
    if m <= 1.0 + 1e-12:
        # lam -> 0: every key seen once; true diversity unbounded above
        return DiversityEstimate(n, m, 0.0, float(n), True)

    def f(lam):
        return lam / (1.0 - np.exp(-lam)) - m

    lam = brentq(f, 1e-12, max(10.0 * m, 50.0))
    return DiversityEstimate(n, m, float(lam),
                             float(n / (1.0 - np.exp(-lam))), False)
