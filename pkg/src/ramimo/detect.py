"""Symbol detection: exhaustive ML, zero-forcing, and the one-slot baseline.

The exhaustive searches enumerate candidate vectors in mixed-radix order with
the first user's index varying fastest, and ties resolve to the lowest
candidate index, so results are reproducible down to degenerate inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constellation import Constellation, quantize

DEFAULT_SEARCH_BUDGET = 1 << 24
_CHUNK = 1 << 16

COND_LIMIT = 1e12


class SearchBudgetError(ValueError):
    """Candidate count J^N exceeds the configured enumeration budget."""


class IllConditionedChannelError(ValueError):
    """Channel matrix is rank deficient or numerically near-singular."""


@dataclass(frozen=True)
class DetectionResult:
    """Detected symbol vector (constellation points) and its objective value."""

    x_hat: np.ndarray
    metric: float


def _candidate_count(c: Constellation, n: int, budget: int) -> int:
    count = c.order**n
    if count > budget:
        raise SearchBudgetError(
            f"{c.order}^{n} = {count} candidates exceed the budget of {budget}"
        )
    return count


def _candidate_block(c: Constellation, n: int, lo: int, hi: int) -> np.ndarray:
    """Candidate symbol vectors lo..hi-1: digit n of index t is (t // J^n) % J."""
    t = np.arange(lo, hi)[:, None]
    idx = (t // c.order ** np.arange(n)) % c.order
    return c.points[idx]


_block_cache: dict[tuple, np.ndarray] = {}


def _iter_candidates(c: Constellation, n: int, count: int):
    """Yield (offset, candidate block); single-block lattices are cached."""
    if count <= _CHUNK:
        key = (n, count, c.points.tobytes())
        block = _block_cache.get(key)
        if block is None:
            if len(_block_cache) >= 16:
                _block_cache.clear()
            block = _candidate_block(c, n, 0, count)
            block.flags.writeable = False
            _block_cache[key] = block
        yield 0, block
    else:
        for lo in range(0, count, _CHUNK):
            yield lo, _candidate_block(c, n, lo, min(lo + _CHUNK, count))


def _squared_rows(d: np.ndarray) -> np.ndarray:
    """Row-wise squared Euclidean norm of a complex matrix, no sqrt round trip."""
    view = np.ascontiguousarray(d).view(float)
    return np.einsum("ij,ij->i", view, view)


def ml_linear(
    s_hat: np.ndarray,
    H: np.ndarray,
    c: Constellation,
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> DetectionResult:
    """Exhaustive minimizer of ||s_hat - Hx||^2 over the symbol lattice."""
    H = np.asarray(H)
    s_hat = np.asarray(s_hat, dtype=complex)
    n = H.shape[1]
    count = _candidate_count(c, n, budget)
    best_metric = np.inf
    best_index = -1
    for lo, cand in _iter_candidates(c, n, count):
        d = cand @ H.T
        d -= s_hat
        metrics = _squared_rows(d)
        k = int(np.argmin(metrics))
        if metrics[k] < best_metric:
            best_metric = float(metrics[k])
            best_index = lo + k
    x_hat = _candidate_block(c, n, best_index, best_index + 1)[0]
    return DetectionResult(x_hat=x_hat, metric=best_metric)


def zf_linear(s_hat: np.ndarray, H: np.ndarray, c: Constellation) -> DetectionResult:
    """Pseudo-inverse equalization followed by per-element quantization."""
    H = np.asarray(H)
    s_hat = np.asarray(s_hat, dtype=complex)
    M, n = H.shape
    if n > M:
        raise ValueError(f"underdetermined channel: N={n} > M={M}")
    sv = np.linalg.svd(H, compute_uv=False)
    if sv[-1] == 0.0 or sv[0] > COND_LIMIT * sv[-1]:
        raise IllConditionedChannelError("channel condition number exceeds 1e12")
    gram = H.conj().T @ H
    x_eq = np.linalg.solve(gram, H.conj().T @ s_hat)
    x_hat = quantize(x_eq, c)
    metric = float(np.sum(np.abs(s_hat - H @ x_hat) ** 2))
    return DetectionResult(x_hat=x_hat, metric=metric)


def ml_single_shot(
    z: np.ndarray,
    H: np.ndarray,
    r: np.ndarray,
    c: Constellation,
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> DetectionResult:
    """Exhaustive minimizer of ||z - |Hx + r|||^2 on one slot's amplitudes.

    Amplitude-domain Euclidean distance is the ML surrogate for the
    near-Gaussian effective noise left after linearization; with r = 0 the
    magnitude model cannot separate global phase rotations, and such ties
    fall to the lowest candidate index.
    """
    H = np.asarray(H)
    z = np.asarray(z, dtype=float)
    r = np.asarray(r)
    n = H.shape[1]
    count = _candidate_count(c, n, budget)
    best_metric = np.inf
    best_index = -1
    for lo, cand in _iter_candidates(c, n, count):
        s = cand @ H.T
        s += r
        d = np.abs(s)
        d -= z
        metrics = np.einsum("ij,ij->i", d, d)
        k = int(np.argmin(metrics))
        if metrics[k] < best_metric:
            best_metric = float(metrics[k])
            best_index = lo + k
    x_hat = _candidate_block(c, n, best_index, best_index + 1)[0]
    return DetectionResult(x_hat=x_hat, metric=best_metric)
