from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Optional

import numpy as np

from decentral_apm.models import ProblemDocument, ReferenceDocument
from problems.base import Problem
from problems.hinge import HingeSvmProblem
from problems.least_squares import LassoProblem, LeastSquaresProblem
from problems.reference import Reference


def _to_document(problem: Problem, reference: Optional[Reference], provenance: dict[str, Any]) -> ProblemDocument:
    if isinstance(problem, HingeSvmProblem):
        targets = problem.labels
    elif isinstance(problem, LeastSquaresProblem):
        targets = problem.b
    else:
        raise TypeError(f"cannot store {type(problem).__name__}")

    ref_doc = None
    if reference is not None:
        ref_doc = ReferenceDocument(
            x_star=np.asarray(reference.x_star, dtype=float).tolist(),
            f_star=float(reference.f_star),
            method=reference.method,
        )
    planted = getattr(problem, "planted", None)
    return ProblemDocument(
        kind=problem.kind,
        provenance=provenance,
        L=problem.L,
        mu=problem.mu,
        M=problem.M,
        lam=getattr(problem, "lam", None),
        A=problem.A.tolist(),
        targets=targets.tolist(),
        planted=None if planted is None else planted.tolist(),
        reference=ref_doc,
    )


def _from_document(doc: ProblemDocument) -> tuple[Problem, Optional[Reference]]:
    A = np.array(doc.A, dtype=float)
    targets = np.array(doc.targets, dtype=float)
    planted = None if doc.planted is None else np.array(doc.planted, dtype=float)

    # stored constants win over recomputation so a reload is bit-for-bit the same problem
    if doc.kind == "hinge":
        problem: Problem = HingeSvmProblem(A, targets, M=doc.M, planted=planted, provenance=doc.provenance)
    elif doc.kind == "lasso":
        if doc.lam is None:
            raise ValueError("lasso document without lam")
        problem = LassoProblem(A, targets, doc.mu, doc.lam, L=doc.L, planted=planted, provenance=doc.provenance)
    else:
        problem = LeastSquaresProblem(A, targets, doc.mu, L=doc.L, planted=planted, provenance=doc.provenance)

    reference = None
    if doc.reference is not None:
        reference = Reference(
            x_star=np.array(doc.reference.x_star, dtype=float),
            f_star=doc.reference.f_star,
            method=doc.reference.method,
        )
    return problem, reference


class ProblemStore:
    def __init__(self, path: str = "data/problem.json"):
        self.path = Path(path)

    def load(self) -> tuple[Problem, Optional[Reference]]:
        try:
            raw = self.path.read_text(encoding="utf-8")
        except OSError as e:
            raise OSError(e.errno, f"cannot read problem from {self.path}: {e.strerror}") from e
        return _from_document(ProblemDocument.model_validate_json(raw))

    def save(
        self,
        problem: Problem,
        reference: Optional[Reference] = None,
        provenance: Optional[dict[str, Any]] = None,
    ) -> Path:
        """
        Per-agent blocks, constants, the reference solution and the
        generation parameters (seed, N, n, m, mu, lam).
        """
        doc = _to_document(problem, reference, dict(provenance or problem.provenance))
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.write_text(json.dumps(doc.model_dump(), indent=2), encoding="utf-8")
        except OSError as e:
            raise OSError(e.errno, f"cannot write problem to {self.path}: {e.strerror}") from e
        return self.path
