"""Seeded Monte Carlo forward sampling, used as an independent check on the
exact inference paths.

Samples are drawn in topological order with numpy's PCG64 generator, whose
stream is specified and stable across platforms for a given seed, so the same
(model, n, seed) triple always yields bitwise-identical frequencies.  With
n = 10^6 the empirical marginals sit within ~0.0015 (3 sigma) of the exact
values, which is why the agreement tolerance used by the test suite is 0.002.
"""

from __future__ import annotations

import numpy as np

from .graph import topological_order
from .model import BayesianModel, Marginal


def monte_carlo_sample(model: BayesianModel, n: int, seed: int) -> dict:
    """Empirical per-node state frequencies from ``n`` forward samples."""
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    model.require_fully_specified()
    rng = np.random.default_rng(seed)
    order = topological_order(model.graph)

    samples: dict[str, np.ndarray] = {}
    for node_id in order:
        node = model.graph.node(node_id)
        cpt = model.cpt(node_id)
        card = len(node.domain)
        parent_cards = [len(model.domain(p)) for p in cpt.parent_order]

        # Row index per sample: mixed-radix over the parents' sampled states.
        row_index = np.zeros(n, dtype=np.int64)
        for p, pcard in zip(cpt.parent_order, parent_cards):
            row_index = row_index * pcard + samples[p]

        # CPT rows as a (n_rows, card) matrix in the same mixed-radix order.
        parent_domains = [tuple(model.domain(p)) for p in cpt.parent_order]
        n_rows = int(np.prod(parent_cards)) if parent_cards else 1
        matrix = np.empty((n_rows, card), dtype=np.float64)
        for r in range(n_rows):
            key = []
            rem = r
            for pcard, pdomain in zip(reversed(parent_cards), reversed(parent_domains)):
                key.append(pdomain[rem % pcard])
                rem //= pcard
            matrix[r] = cpt.rows[tuple(reversed(key))]

        cumulative = np.cumsum(matrix, axis=1)
        cumulative[:, -1] = 1.0  # guard against float drift at the top end
        u = rng.random(n)
        samples[node_id] = (u[:, None] > cumulative[row_index]).sum(axis=1)

    out = {}
    for node in model.graph.nodes:
        counts = np.bincount(samples[node.id], minlength=len(node.domain))
        freq = counts / float(n)
        out[node.id] = Marginal(node.id, tuple(node.domain),
                                tuple(float(x) for x in freq))
    return out
