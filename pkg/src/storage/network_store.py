from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

import numpy as np

from decentral_apm.models import NetworkDocument
from network.graph import Network
from network.weights import WeightMatrix


class NetworkStore:
    def __init__(self, path: str = "data/network.json"):
        self.path = Path(path)

    def load(self) -> tuple[Network, Optional[WeightMatrix]]:
        """
        Read the agent graph back. The mixing matrix is returned only when it
        was saved with the graph; its sigma2 and gap are recomputed.
        """
        try:
            raw = self.path.read_text(encoding="utf-8")
        except OSError as e:
            raise OSError(e.errno, f"cannot read network from {self.path}: {e.strerror}") from e

        doc = NetworkDocument.model_validate_json(raw)
        net = Network.from_edges(doc.m, doc.edges, seed=doc.seed)
        if doc.weights is None:
            return net, None
        entries = np.array(doc.weights, dtype=float)
        if entries.shape != (doc.m, doc.m):
            raise ValueError(f"{self.path}: weights must be {doc.m}x{doc.m}, got {entries.shape}")
        return net, WeightMatrix.from_entries(entries, network=net)

    def save(self, net: Network, W: Optional[WeightMatrix] = None) -> Path:
        doc = NetworkDocument(
            m=net.m,
            edges=net.sorted_edges(),
            seed=net.seed,
            weights=None if W is None else W.entries.tolist(),
        )
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            # json writes floats with the shortest repr that round-trips
            self.path.write_text(json.dumps(doc.model_dump(), indent=2), encoding="utf-8")
        except OSError as e:
            raise OSError(e.errno, f"cannot write network to {self.path}: {e.strerror}") from e
        return self.path
