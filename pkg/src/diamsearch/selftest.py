"""Oracle agreement suite behind the `selftest` CLI subcommand.

Certifies the optimised paths against the brute-force reference
implementations on seeded random sweeps and small exhaustive families.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .chi_search import ChiSearchConfig
from .chi_search import search as chi_search
from .enumeration import enumerate_layer_graphs
from .graphs import SmallGraph, clique_number
from .layered import diameter
from .omega_search import maximal_edge_sets
from .oracle import (
    naive_clique_number,
    naive_diameter,
    naive_maximal_edge_sets,
    naive_search_chi,
)


def _random_graph(rng: random.Random, n: int, p: float) -> SmallGraph:
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return SmallGraph.from_edges(n, edges)


def check_clique(seed: int, instances: int = 500) -> dict:
    rng = random.Random(seed)
    for i in range(instances):
        g = _random_graph(rng, rng.randint(1, 10), rng.uniform(0.2, 0.8))
        if clique_number(g) != naive_clique_number(g):
            return {"name": "clique-number", "ok": False, "instance": i}
    return {"name": "clique-number", "ok": True, "instances": instances}


def check_diameter(seed: int, instances: int = 500) -> dict:
    rng = random.Random(seed + 1)
    done = 0
    while done < instances:
        g = _random_graph(rng, rng.randint(2, 12), rng.uniform(0.25, 0.8))
        try:
            d1 = diameter(g)
        except ValueError:
            continue
        if d1 != naive_diameter(g):
            return {"name": "diameter", "ok": False, "instance": done}
        done += 1
    return {"name": "diameter", "ok": True, "instances": instances}


def check_edge_sets(max_product: int = 12) -> dict:
    """Exhaustive agreement over class pairs with |V1|*|V2| <= max_product."""
    by_size = {n: enumerate_layer_graphs(n) for n in range(1, 7)}
    by_size = {n: [g for g in graphs if g.n == n] for n, graphs in by_size.items()}
    pairs = 0
    for n1 in range(1, 7):
        for n2 in range(1, 7):
            if n1 * n2 > max_product:
                continue
            for g1 in by_size[n1]:
                for g2 in by_size[n2]:
                    fast = sorted(map(tuple, maximal_edge_sets(g1, g2)))
                    slow = sorted(map(tuple, naive_maximal_edge_sets(g1, g2)))
                    if fast != slow:
                        return {"name": "maximal-edge-sets", "ok": False,
                                "pair": (repr(g1), repr(g2))}
                    pairs += 1
    return {"name": "maximal-edge-sets", "ok": True, "pairs": pairs}


def check_chi_equivalence() -> dict:
    cells = [
        (ChiSearchConfig(delta=4, max_period=8, max_column_sum=6), Fraction(4, 7)),
        (ChiSearchConfig(delta=5, max_period=12, max_column_sum=6), Fraction(5, 11)),
    ]
    results = []
    for cfg, _known in cells:
        fast = chi_search(cfg)
        slow = naive_search_chi(cfg)
        if fast.best_ratio != slow.best_ratio:
            return {"name": "chi-search-vs-naive", "ok": False,
                    "delta": cfg.delta,
                    "fast": str(fast.best_ratio), "slow": str(slow.best_ratio)}
        results.append({"delta": cfg.delta, "ratio": str(fast.best_ratio),
                        "naive_nodes": slow.nodes})
    return {"name": "chi-search-vs-naive", "ok": True, "cells": results}


def run_selftest(seed: int = 12345) -> dict:
    checks = [
        check_clique(seed),
        check_diameter(seed),
        check_edge_sets(),
        check_chi_equivalence(),
    ]
    return {"ok": all(c["ok"] for c in checks), "checks": checks}
