from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import scipy.linalg

from decentral_apm.errors import DegenerateGap
from network.graph import Network

# Row i of an agent matrix is agent i's local copy x_(i).
AgentMatrix = np.ndarray

GAP_TOLERANCE = 1e-12


@dataclass(frozen=True)
class WeightMatrix:
    entries: np.ndarray
    sigma2: float
    gap: float
    network: Optional[Network] = None

    @classmethod
    def from_entries(cls, entries: np.ndarray, network: Optional[Network] = None) -> "WeightMatrix":
        entries = np.array(entries, dtype=float, copy=True)
        entries.setflags(write=False)
        sigma2, gap = spectral_gap(entries)
        return cls(entries=entries, sigma2=sigma2, gap=gap, network=network)

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    def mix(self, x: AgentMatrix) -> AgentMatrix:
        """One neighbor exchange: row i becomes sum_j W_ij x_(j)."""
        return self.entries @ x

    def laplacian_apply(self, x: AgentMatrix) -> AgentMatrix:
        """(I - W) x, i.e. U^2 x without forming U."""
        return x - self.entries @ x


def metropolis_weights(net: Network) -> np.ndarray:
    """Plain Metropolis matrix M_ij = 1 / (1 + max(deg_i, deg_j)) on edges."""
    m = net.m
    M = np.zeros((m, m))
    for i, j in net.sorted_edges():
        w = 1.0 / (1.0 + max(net.degrees[i], net.degrees[j]))
        M[i, j] = w
        M[j, i] = w
    # diagonal fills each row to one
    M[np.diag_indices(m)] = 1.0 - M.sum(axis=1)
    return M


def lazy_metropolis_weights(net: Network) -> WeightMatrix:
    """W = (I + M) / 2 with M the Metropolis matrix of `net`."""
    M = metropolis_weights(net)
    W = 0.5 * (np.eye(net.m) + M)
    return WeightMatrix.from_entries(W, network=net)


def spectral_gap(W: Union[WeightMatrix, np.ndarray]) -> tuple[float, float]:
    """
    Second-largest eigenvalue of W and the gap 1 - sigma2. W is PSD under
    the mixing assumptions, so this is also the second singular value.
    A single agent has nothing to mix: sigma2 = 0, gap = 1.
    """
    entries = W.entries if isinstance(W, WeightMatrix) else np.asarray(W, dtype=float)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise ValueError(f"W must be square, got shape {entries.shape}")
    if entries.shape[0] == 1:
        return 0.0, 1.0

    eigenvalues = scipy.linalg.eigvalsh(entries)
    sigma2 = float(eigenvalues[-2])
    gap = 1.0 - sigma2
    if gap <= GAP_TOLERANCE:
        raise DegenerateGap(f"spectral gap {gap:.3e} <= {GAP_TOLERANCE}; W is effectively disconnected")
    return sigma2, gap


def invariant_errors(W: Union[WeightMatrix, np.ndarray]) -> dict[str, float]:
    """Symmetry error, row-sum error and most negative eigenvalue magnitude."""
    entries = W.entries if isinstance(W, WeightMatrix) else np.asarray(W, dtype=float)
    eigenvalues = scipy.linalg.eigvalsh(entries)
    return {
        "symmetry": float(np.max(np.abs(entries - entries.T))),
        "row_sum": float(np.max(np.abs(entries.sum(axis=1) - 1.0))),
        "negative_eigenvalue": float(max(0.0, -eigenvalues[0])),
        "max_eigenvalue_excess": float(max(0.0, eigenvalues[-1] - 1.0)),
    }


def average(x: AgentMatrix) -> np.ndarray:
    """alpha(x): the mean of the agent rows."""
    return np.asarray(x, dtype=float).mean(axis=0)


def disagreement(x: AgentMatrix) -> AgentMatrix:
    """Pi x = x - 1 alpha(x)^T."""
    x = np.asarray(x, dtype=float)
    return x - x.mean(axis=0, keepdims=True)


def u_quadratic_norm(W: Union[WeightMatrix, np.ndarray], x: AgentMatrix) -> float:
    """||U x||_F^2 = <x, (I - W) x>."""
    entries = W.entries if isinstance(W, WeightMatrix) else np.asarray(W, dtype=float)
    x = np.asarray(x, dtype=float)
    return float(np.sum(x * (x - entries @ x)))
