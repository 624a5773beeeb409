"""Amplitude-only receiver frontend.

An atomic receiver reads the magnitude of the superposed RF field, so the
per-slot observation is |Hx + v + r| element-wise: the complex sum of signal,
noise and reference tone enters the readout before the magnitude is taken.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def wrap_phase(phi: float) -> float:
    """Map an angle to the principal interval (-pi, pi]."""
    wrapped = (phi + np.pi) % (2.0 * np.pi) - np.pi
    return np.pi if wrapped == -np.pi else float(wrapped)


@dataclass(frozen=True)
class DualSlotObservation:
    """Amplitude readouts of the two transmission slots and the offset used."""

    z1: np.ndarray
    z2: np.ndarray
    phi: float


def _check_shapes(H: np.ndarray, x: np.ndarray, r: np.ndarray, v: np.ndarray) -> None:
    M, N = H.shape
    if x.shape != (N,) or r.shape != (M,) or v.shape != (M,):
        raise ValueError(
            f"inconsistent shapes: H {H.shape}, x {x.shape}, r {r.shape}, v {v.shape}"
        )


def observe_single(H: np.ndarray, x: np.ndarray, r: np.ndarray, v: np.ndarray) -> np.ndarray:
    """One slot's readout |Hx + v + r|, one nonnegative value per receiver."""
    H = np.asarray(H)
    x, r, v = (np.asarray(a) for a in (x, r, v))
    _check_shapes(H, x, r, v)
    return np.abs(H @ x + v + r)


def observe_prss(
    H: np.ndarray,
    x: np.ndarray,
    r: np.ndarray,
    v1: np.ndarray,
    v2: np.ndarray,
    phi: float,
) -> DualSlotObservation:
    """Readouts of the same symbol vector sent twice, phase-rotated in slot 2.

    The channel and reference are held fixed across both slots; only the
    noise differs.  Slot 2 carries x * exp(j*phi).
    """
    z1 = observe_single(H, x, r, v1)
    z2 = observe_single(H, np.asarray(x) * np.exp(1j * phi), r, v2)
    return DualSlotObservation(z1=z1, z2=z2, phi=wrap_phase(phi))
