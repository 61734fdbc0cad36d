from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable

import networkx as nx

from decentral_apm.errors import NotConnected

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Network:
    """Undirected agent graph. Agents are numbered 0..m-1, edges are (i, j) with i < j."""

    m: int
    edges: frozenset[tuple[int, int]]
    degrees: tuple[int, ...]
    seed: int | None = field(default=None, compare=False)

    @classmethod
    def from_edges(cls, m: int, edges: Iterable[tuple[int, int]], seed: int | None = None) -> "Network":
        if m < 1:
            raise ValueError("m must be >= 1")
        normalized: set[tuple[int, int]] = set()
        for i, j in edges:
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"self-loop on agent {i}")
            if not (0 <= i < m and 0 <= j < m):
                raise ValueError(f"edge ({i}, {j}) outside 0..{m - 1}")
            normalized.add((min(i, j), max(i, j)))

        degrees = [0] * m
        for i, j in normalized:
            degrees[i] += 1
            degrees[j] += 1
        return cls(m=m, edges=frozenset(normalized), degrees=tuple(degrees), seed=seed)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def neighbors(self, i: int) -> list[int]:
        return sorted({b if a == i else a for a, b in self.edges if i in (a, b)})

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.m))
        g.add_edges_from(self.edges)
        return g

    def is_connected(self) -> bool:
        return nx.is_connected(self.to_networkx())


def build_erdos_renyi(m: int, p: float, seed: int, max_retries: int = 100) -> Network:
    """
    Sample G(m, p) until it is connected. Attempt r uses seed + r, so the
    result is a deterministic function of (m, p, seed).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if max_retries < 0:
        raise ValueError("max_retries must be >= 0")

    for attempt in range(max_retries + 1):
        current_seed = seed + attempt
        g = nx.gnp_random_graph(m, p, seed=current_seed)
        if nx.is_connected(g):
            if attempt:
                logger.info("Erdos-Renyi graph connected after %d resamples (seed=%d)", attempt, current_seed)
            return Network.from_edges(m, g.edges(), seed=current_seed)
        logger.debug("G(%d, %.4f) with seed %d is disconnected, resampling", m, p, current_seed)

    raise NotConnected(
        f"G({m}, {p}) stayed disconnected for seeds {seed}..{seed + max_retries}; p is too small for m"
    )
