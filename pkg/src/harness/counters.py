from __future__ import annotations

import threading
from dataclasses import dataclass, field


@dataclass
class Counters:
    """
    Cost accounting for one run. One communication is a single round in which
    every agent exchanges with its neighbors; one (sub)gradient evaluation is
    every agent evaluating its local oracle once.
    """

    communications: int = 0
    grad_evals: int = 0
    subgrad_evals: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def add_communications(self, n: int = 1) -> None:
        self._add("communications", n)

    def add_grad_evals(self, n: int = 1) -> None:
        self._add("grad_evals", n)

    def add_subgrad_evals(self, n: int = 1) -> None:
        self._add("subgrad_evals", n)

    def _add(self, name: str, n: int) -> None:
        if n < 0:
            raise ValueError(f"counters only grow, got {name} += {n}")
        with self._lock:
            setattr(self, name, getattr(self, name) + int(n))

    def snapshot(self) -> tuple[int, int, int]:
        with self._lock:
            return self.communications, self.grad_evals, self.subgrad_evals
