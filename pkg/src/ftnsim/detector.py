"""FDE on the pilot-zeroed spectrum and iterative projector-based detection.

The equalizer works per frequency bin with colored-noise-aware MMSE (or
plain LS) weights; comb bins are discarded first, which loses no data
energy when alignment is active since the data spectrum is exactly zero
there.  The equalized block estimates Psi s, and the detector inverts the
singular projector by exploiting Psi^+ = Psi plus entrywise projection
onto the constellation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pilot import SiaProjector, apply_projector


@dataclass(frozen=True)
class Constellation:
    """Complex symbol alphabet with Gray bit mapping, indexed by bit pattern."""

    points: np.ndarray = field(repr=False)
    bits_per_symbol: int = 0
    label: str = ""

    @property
    def sigma_s2(self) -> float:
        return float(np.mean(np.abs(self.points) ** 2))


def qpsk(sigma_s2: float = 1.0) -> Constellation:
    """Gray-mapped QPSK: bit b0 selects the I sign, b1 the Q sign; 00 -> (+a, +a)."""
    a = np.sqrt(sigma_s2 / 2.0)
    pts = np.array([a + 1j * a, a - 1j * a, -a + 1j * a, -a - 1j * a])
    return Constellation(points=pts, bits_per_symbol=2, label="qpsk")


def map_bits(bits, cons: Constellation):
    """Bit vector (length multiple of bits_per_symbol) to symbol vector."""
    bits = np.asarray(bits).reshape(-1, cons.bits_per_symbol)
    idx = bits.dot(1 << np.arange(cons.bits_per_symbol - 1, -1, -1))
    return cons.points[idx]


def demap_bits(symbols, cons: Constellation):
    """Exact Gray demapping; symbols must be constellation points."""
    symbols = np.asarray(symbols)
    d = np.abs(symbols[..., None] - cons.points)
    idx = np.argmin(d, axis=-1)
    if np.any(np.min(d, axis=-1) > 1e-9 * np.abs(cons.points).max()):
        raise ValueError("input contains non-constellation symbols")
    shifts = np.arange(cons.bits_per_symbol - 1, -1, -1)
    bits = (idx[..., None] >> shifts) & 1
    return bits.reshape(symbols.shape[:-1] + (-1,)) if symbols.ndim > 1 \
        else bits.reshape(-1)


def project_nearest(v, cons: Constellation):
    """Entrywise nearest constellation point; ties break to the smallest index."""
    v = np.asarray(v)
    d = np.abs(v[..., None] - cons.points)
    return cons.points[np.argmin(d, axis=-1)]


@dataclass(frozen=True)
class EqualizerWeights:
    w: np.ndarray = field(repr=False)
    criterion: str = "mmse"
    flagged_bins: int = 0


def fde_weights(lambda_eq, lambda_g, phi_diag, sigma_s2_eff, sigma_v2_eff,
                criterion="mmse", ls_floor=1e-12) -> EqualizerWeights:
    """Per-bin equalizer weights from Gamma_eq = diag(lambda_eq * lambda_g).

    MMSE whitens the colored noise through phi_diag; LS inverts each bin,
    clamping (and counting) bins below the conditioning floor.  Perfect-CSI
    operation is the same call with the true channel response and unscaled
    powers.
    """
    if sigma_s2_eff < 0 or sigma_v2_eff < 0:
        raise ValueError("effective powers must be non-negative")
    gamma = np.asarray(lambda_eq) * np.asarray(lambda_g)
    if criterion == "mmse":
        if sigma_s2_eff == 0:
            raise ValueError("MMSE weights need sigma_s2_eff > 0")
        rho = sigma_v2_eff / sigma_s2_eff
        w = np.conj(gamma) / (np.abs(gamma) ** 2 + rho * np.asarray(phi_diag))
        return EqualizerWeights(w=w, criterion="mmse")
    if criterion == "ls":
        mag = np.abs(gamma)
        floor = ls_floor * max(float(mag.max()), 1.0)
        bad = mag < floor
        safe = np.where(bad, floor, gamma)
        w = np.where(bad, 0.0, 1.0 / safe)
        return EqualizerWeights(w=w, criterion="ls", flagged_bins=int(bad.sum()))
    raise ValueError(f"unknown equalizer criterion {criterion!r}")


def zero_pilot_bins(y_tilde, P: int, Q: int):
    """Copy of the spectrum with the comb bins k = iQ set to zero."""
    y_tilde = np.asarray(y_tilde)
    if y_tilde.shape[-1] != P * Q:
        raise ValueError(f"length {y_tilde.shape[-1]} != P*Q = {P * Q}")
    z = y_tilde.copy()
    z[..., ::Q] = 0.0
    return z


def equalize(z_tilde, weights: EqualizerWeights):
    """u = IDFT(W z~) with the unitary convention."""
    z_tilde = np.asarray(z_tilde)
    n = z_tilde.shape[-1]
    return np.fft.ifft(weights.w * z_tilde, axis=-1) * np.sqrt(n)


def ista_detect(u, proj: SiaProjector, cons: Constellation, n_iter: int = 3):
    """Iterative detection of s from u ~ Psi s.

    Initialization uses Psi^+ = Psi; each iteration adds the projected
    residual gradient Psi (u - Psi s_hat) and snaps entrywise to the
    nearest constellation point.  O(N) per iteration.

    Returns (hard symbols, demapped bits).
    """
    u = np.asarray(u)
    if n_iter < 0:
        raise ValueError("n_iter must be >= 0")
    s_hat = apply_projector(u, proj)
    for _ in range(n_iter):
        r = u - apply_projector(s_hat, proj)
        s_hat = project_nearest(s_hat + apply_projector(r, proj), cons)
    s_hat = project_nearest(s_hat, cons)
    return s_hat, demap_bits(s_hat, cons)
