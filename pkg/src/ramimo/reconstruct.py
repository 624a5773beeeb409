"""Recover the complex received signal from two amplitude readouts.

With a reference tone much stronger than the signal, the magnitude readout is
approximately linear: z_m ~ |r_m| + Re{u_m s_m} with u_m = conj(r_m)/|r_m|.
Two slots with a phase offset between them give two real projections of each
s_m, which a per-receiver 2x2 solve turns back into a complex estimate.  At a
quarter-turn offset the projections are orthogonal, the solve collapses to a
closed form, and the effective noise keeps the variance of the original
receiver noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frontend import DualSlotObservation

SIN_PHI_TOL = 1e-9


class DegenerateReferenceError(ValueError):
    """Reference tone has a zero-magnitude element; phase normalizer undefined."""


class SingularOffsetError(ValueError):
    """sin(phi) ~ 0: both slots project onto the same axis, no inverse exists."""


@dataclass(frozen=True)
class EffectiveObservation:
    """Amplitude readouts with the known reference magnitude removed."""

    y1: np.ndarray
    y2: np.ndarray


@dataclass(frozen=True)
class ReconstructedSignal:
    """Complex estimate of the received signal plus the phase normalizers used."""

    s_hat: np.ndarray
    u: np.ndarray


@dataclass(frozen=True)
class MeasurementMatrix:
    """2x2 real matrix mapping (Re s, Im s) to the two effective observations.

    Rows are [Re u, -Im u] and [Re(u e^{j phi}), -Im(u e^{j phi})]; the
    determinant is -sin(phi) for unit-modulus u.
    """

    a: np.ndarray
    phi: float


def _normalizers(r: np.ndarray) -> np.ndarray:
    r = np.asarray(r)
    mag = np.abs(r)
    if np.any(mag == 0.0):
        raise DegenerateReferenceError("reference signal has a zero-magnitude element")
    return np.conj(r) / mag


def effective_observations(z: DualSlotObservation, r: np.ndarray) -> EffectiveObservation:
    """Subtract the known reference magnitude from both slots' readouts."""
    mag = np.abs(np.asarray(r))
    if z.z1.shape != mag.shape or z.z2.shape != mag.shape:
        raise ValueError(
            f"length mismatch: z1 {z.z1.shape}, z2 {z.z2.shape}, r {mag.shape}"
        )
    return EffectiveObservation(y1=z.z1 - mag, y2=z.z2 - mag)


def reconstruct_optimal(
    z: DualSlotObservation, r: np.ndarray, sign: int = 1
) -> ReconstructedSignal:
    """Closed-form estimate for a quarter-turn offset, phi = sign * pi/2.

    s_hat_m = conj(u_m) * (y1_m - j*y2_m) for sign=+1, and the conjugate
    combination (y1_m + j*y2_m) for sign=-1.  Requires observations taken at
    the matching offset; no correction is applied beyond the first-order
    model, so the Taylor residual of order |s|^2/|r| remains.
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    if abs(z.phi - sign * np.pi / 2) > 1e-9:
        raise ValueError(
            f"observation was taken at phi={z.phi}, not the quarter-turn {sign * np.pi / 2}"
        )
    u = _normalizers(r)
    y = effective_observations(z, r)
    s_hat = np.conj(u) * (y.y1 - 1j * sign * y.y2)
    return ReconstructedSignal(s_hat=s_hat, u=u)


def build_measurement_matrix(u_m: complex, phi: float) -> MeasurementMatrix:
    """Per-receiver projection matrix for a unit-modulus phase normalizer."""
    rot = u_m * np.exp(1j * phi)
    a = np.array(
        [[u_m.real, -u_m.imag], [rot.real, -rot.imag]],
        dtype=float,
    )
    return MeasurementMatrix(a=a, phi=phi)


def reconstruct_general(
    z: DualSlotObservation, r: np.ndarray, phi: float
) -> ReconstructedSignal:
    """Least-squares estimate for an arbitrary (non-degenerate) phase offset.

    Solves the per-receiver 2x2 system a_m @ [Re s_m, Im s_m] = [y1_m, y2_m];
    conditioning degrades as 1/sin^2(phi), so offsets with |sin phi| below
    SIN_PHI_TOL are rejected outright.
    """
    if abs(np.sin(phi)) < SIN_PHI_TOL:
        raise SingularOffsetError(f"phi={phi} gives a singular measurement matrix")
    u = _normalizers(r)
    y = effective_observations(z, r)
    rot = u * np.exp(1j * phi)
    a = np.empty((u.size, 2, 2))
    a[:, 0, 0] = u.real
    a[:, 0, 1] = -u.imag
    a[:, 1, 0] = rot.real
    a[:, 1, 1] = -rot.imag
    rhs = np.stack([y.y1, y.y2], axis=-1)
    sol = np.linalg.solve(a, rhs[..., None])[..., 0]
    return ReconstructedSignal(s_hat=sol[:, 0] + 1j * sol[:, 1], u=u)


def predicted_trace(phi: float, u_mod: float = 1.0) -> float:
    """Trace of the inverse Gram matrix of the projections: 2/(u_mod^2 sin^2 phi).

    This is the least-squares error amplification factor; it is minimized at
    phi = +-pi/2 where it equals 2/u_mod^2.
    """
    s = np.sin(phi)
    if abs(s) < SIN_PHI_TOL:
        raise SingularOffsetError(f"phi={phi} gives a singular measurement matrix")
    return 2.0 / (u_mod**2 * s**2)


def predicted_mse(phi: float, sigma_v_sq: float) -> float:
    """Predicted reconstruction MSE per receiver: sigma_v_sq / sin^2(phi).

    Each effective observation carries the real projection of circular noise,
    variance sigma_v_sq/2, so the LS error is (sigma_v_sq/2) * predicted_trace.
    At phi = +-pi/2 this equals sigma_v_sq: no noise amplification.
    """
    return 0.5 * sigma_v_sq * predicted_trace(phi, 1.0)


def empirical_noise_variance(s_hat_samples, s_true_samples) -> float:
    """Mean of ||s_hat - s||^2 / M over a collection of reconstruction pairs."""
    s_hat_samples = list(s_hat_samples)
    s_true_samples = list(s_true_samples)
    if not s_hat_samples or len(s_hat_samples) != len(s_true_samples):
        raise ValueError("need equal-length, non-empty sample collections")
    total = 0.0
    count = 0
    for s_hat, s in zip(s_hat_samples, s_true_samples):
        s_hat = np.asarray(s_hat)
        s = np.asarray(s)
        if s_hat.shape != s.shape:
            raise ValueError(f"sample shape mismatch: {s_hat.shape} vs {s.shape}")
        total += np.sum(np.abs(s_hat - s) ** 2)
        count += s.size
    return total / count
