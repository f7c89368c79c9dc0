"""Shared numerical primitives: unitary DFT, circulant algebra, PSD factors, RNG streams.

Two DFT conventions coexist on purpose and must not be mixed up:

* ``dft``/``idft`` use the unitary 1/sqrt(N) scaling and carry symbol
  vectors between time and frequency domain.
* ``circulant_eigenvalues`` uses the unnormalized DFT of the first
  column, so that ``circulant(c) = F^H diag(lam) F`` with F unitary.

Every other module builds on exactly these two.
"""

from __future__ import annotations

import numpy as np


class NotPSDError(ValueError):
    """Matrix handed to psd_factor has a significantly negative eigenvalue."""


def make_rng(seed, stream=0, substream=None):
    """Deterministic, independent random stream for one Monte Carlo trial.

    Identical (seed, stream, substream) gives bit-identical draws; distinct
    stream ids give statistically independent generators.  Substreams let a
    trial separate channel / data / noise draws so that, e.g., changing the
    data power does not perturb the noise realization.
    """
    key = [int(seed), int(stream)]
    if substream is not None:
        key.append(int(substream))
    return np.random.default_rng(key)


def dft(x):
    """Unitary DFT of a vector (or of each row of a 2-d array)."""
    x = np.asarray(x)
    n = x.shape[-1]
    if n < 1:
        raise ValueError("dft input must have length >= 1")
    return np.fft.fft(x, axis=-1) / np.sqrt(n)


def idft(x):
    """Exact inverse of :func:`dft`."""
    x = np.asarray(x)
    n = x.shape[-1]
    if n < 1:
        raise ValueError("idft input must have length >= 1")
    return np.fft.ifft(x, axis=-1) * np.sqrt(n)


def circulant_eigenvalues(c):
    """Eigenvalues of the circulant matrix whose first column is ``c``.

    lam_k = sum_n c_n exp(-j 2 pi k n / N), i.e. the unnormalized DFT,
    so that circulant(c) = F^H diag(lam) F with F the unitary DFT matrix.
    """
    return np.fft.fft(np.asarray(c), axis=-1)


def circulant_matvec(lam, x):
    """Apply the circulant matrix with eigenvalues ``lam`` to ``x`` in O(N log N)."""
    return np.fft.ifft(lam * np.fft.fft(x, axis=-1), axis=-1)


def circulant_dense(c):
    """Dense circulant matrix from its first column (test/oracle helper)."""
    c = np.asarray(c)
    n = len(c)
    return np.stack([np.roll(c, k) for k in range(n)], axis=1)


def psd_factor(m, clip_eps=1e-10):
    """Factor a Hermitian PSD matrix as B B^H, clipping tiny negative eigenvalues.

    Eigenvalues below ``clip_eps * max_eig`` are raised to that floor (the
    count of clipped ones is returned); anything below the negated threshold
    means the input is genuinely indefinite and raises :class:`NotPSDError`.

    Returns
    -------
    (B, n_clipped)
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("psd_factor expects a square matrix")
    if not np.allclose(m, m.conj().T, atol=1e-10):
        raise ValueError("psd_factor expects a Hermitian matrix")
    w, v = np.linalg.eigh(m)
    max_eig = max(float(w.max()), 0.0)
    floor = clip_eps * max_eig
    if np.any(w < -floor):
        raise NotPSDError(
            f"matrix is not PSD: min eigenvalue {w.min():.3e} < {-floor:.3e}"
        )
    n_clipped = int(np.sum(w < floor))
    w = np.maximum(w, floor)
    b = v * np.sqrt(w)
    return b, n_clipped


def complex_gaussian(n, variance, rng, shape=None):
    """Circularly symmetric complex Gaussian vector, per-entry variance ``variance``.

    Real and imaginary parts each carry variance/2.  ``shape`` overrides the
    1-d default, e.g. (trials, n) for batched draws.
    """
    if variance < 0:
        raise ValueError("variance must be non-negative")
    if shape is None:
        shape = (n,)
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return z * np.sqrt(variance / 2.0)
