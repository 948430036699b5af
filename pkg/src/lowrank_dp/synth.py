"""Synthetic test data and quality metrics."""

from __future__ import annotations

import numpy as np

from .errors import ParameterError
from .matrix import frobenius_sq

__all__ = ["rank_from_ratio", "gen_synthetic", "snr_db", "gen_phantom"]


def rank_from_ratio(m, n, rho):
    """``round(rho * max(m, n))`` with halves rounded up."""
    return int(np.floor(rho * max(m, n) + 0.5))


def gen_synthetic(m, n, rho, tau, seed=0):
    """Random rank-``s`` truth ``M N^T`` (uniform factors) plus Gaussian noise.

    Returns ``(truth, observed)``.
    """
    if not 0 < rho <= min(m, n) / max(m, n):
        raise ParameterError(
            f"rho must lie in (0, {min(m, n) / max(m, n):.4g}] for a {m}x{n} matrix, got {rho}"
        )
    s = rank_from_ratio(m, n, rho)
    if s == 0:
        raise ParameterError(f"rho={rho} gives rank 0 for a {m}x{n} matrix")
    if tau < 0:
        raise ParameterError(f"tau must be >= 0, got {tau}")
    rng = np.random.default_rng(seed)
    truth = rng.random((m, s)) @ rng.random((n, s)).T
    observed = truth + tau * rng.standard_normal((m, n))
    return truth, observed


def snr_db(truth, est):
    """``10 log10(||X||^2 / ||X - X_hat||^2)``; ``inf`` for an exact estimate."""
    truth = np.asarray(truth, dtype=np.float64)
    est = np.asarray(est, dtype=np.float64)
    if truth.shape != est.shape:
        raise ParameterError(f"shape mismatch: {truth.shape} vs {est.shape}")
    signal = frobenius_sq(truth)
    if signal == 0:
        raise ParameterError("SNR is undefined for an all-zero truth")
    err = frobenius_sq(truth - est)
    if err == 0:
        return float("inf")
    return float(10.0 * np.log10(signal / err))


def _soft_ellipse(yy, xx, cy, cx, ry, rx, edge=1.0):
    dist = np.sqrt(((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2)
    # logistic edge roughly `edge` pixels wide
    return 1.0 / (1.0 + np.exp((dist - 1.0) * min(ry, rx) / edge))


def gen_phantom(height=64, width=64, frames=20, seed=0, static=False):
    """Piecewise-smooth dynamic phantom, shape ``(frames, height, width)``.

    A torso-like background holds a few soft-edged ellipses that drift
    with a slow periodic motion while their intensity follows a smooth
    contrast-uptake curve. The background sits near 60-75 and blob
    peaks reach a few hundred where ellipses overlap. With ``static=True``
    every frame is identical.
    """
    if min(height, width, frames) < 16:
        raise ParameterError(f"dimensions must be >= 16, got {(frames, height, width)}")
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    t = np.linspace(0.0, 1.0, frames)

    body = 60.0 * _soft_ellipse(yy, xx, height / 2, width / 2, 0.45 * height, 0.45 * width, 2.0)
    body += 15.0 * (xx / width)

    n_blobs = 4
    centers = np.column_stack([
        rng.uniform(0.35, 0.65, n_blobs) * height,
        rng.uniform(0.35, 0.65, n_blobs) * width,
    ])
    radii = rng.uniform(0.08, 0.18, (n_blobs, 2)) * np.array([height, width])
    base = rng.uniform(40.0, 90.0, n_blobs)
    uptake = rng.uniform(60.0, 140.0, n_blobs)
    onset = rng.uniform(0.2, 0.6, n_blobs)
    phase = rng.uniform(0.0, 2 * np.pi, n_blobs)
    amp = 0.0 if static else 1.5

    seq = np.empty((frames, height, width))
    for i, ti in enumerate(t):
        frame = body.copy()
        dy = amp * np.sin(2 * np.pi * ti + phase)
        for b in range(n_blobs):
            level = base[b]
            if not static:
                level = level + uptake[b] / (1.0 + np.exp(-(ti - onset[b]) / 0.08))
            frame += level * _soft_ellipse(
                yy, xx, centers[b, 0] + dy[b], centers[b, 1], radii[b, 0], radii[b, 1]
            )
        seq[i] = frame
    return seq
