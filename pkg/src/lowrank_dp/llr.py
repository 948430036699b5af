"""Locally low-rank denoising of image sequences.

Each ``window x window`` spatial block, stacked over time, forms a
Casorati matrix (one vectorized patch per column). Every block is
denoised on its own and overlapping estimates are averaged.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .discrepancy import estimate_noise_median, eta_bound
from .errors import ParameterError, PatchError
from .pipeline import denoise
from .shrinkage import Regularizer

__all__ = [
    "CasoratiPatch",
    "as_sequence",
    "patch_anchors",
    "extract_patches",
    "coverage",
    "aggregate",
    "denoise_llr",
    "worst_case_error",
]

PADDINGS = ("none", "edge")


@dataclass(frozen=True)
class CasoratiPatch:
    anchor: tuple
    window: int
    matrix: np.ndarray


def as_sequence(seq, name="seq"):
    seq = np.asarray(seq, dtype=np.float64)
    if seq.ndim != 3 or seq.size == 0:
        raise ParameterError(f"{name} must be a non-empty (T, height, width) array, got {seq.shape}")
    if not np.all(np.isfinite(seq)):
        raise ParameterError(f"{name} contains NaN or Inf entries")
    return seq


def _axis_anchors(size, window, stride):
    starts = list(range(0, size - window + 1, stride))
    if starts[-1] != size - window:
        starts.append(size - window)
    return starts


def _pad(seq, window, padding):
    if padding == "none":
        return seq, (0, 0)
    if padding == "edge":
        before, after = (window - 1) // 2, window // 2
        return np.pad(seq, ((0, 0), (before, after), (before, after)), mode="edge"), (before, after)
    raise ParameterError(f"unknown padding {padding!r}; expected one of {PADDINGS}")


def patch_anchors(height, width, window=7, stride=1):
    """Top-left corners of every window; the last row/column is always covered."""
    if window < 1 or window > min(height, width):
        raise ParameterError(f"window must lie in [1, {min(height, width)}], got {window}")
    if stride < 1:
        raise ParameterError(f"stride must be >= 1, got {stride}")
    rows = _axis_anchors(height, window, stride)
    cols = _axis_anchors(width, window, stride)
    return [(i, j) for i in rows for j in cols]


def extract_patches(seq, window=7, stride=1, padding="none"):
    """Yield a :class:`CasoratiPatch` of shape ``(window**2, T)`` per anchor.

    With ``padding="edge"`` frames are edge-replicated so that every pixel
    anchors one window (stride 1 then gives ``height * width`` patches);
    anchors refer to the padded grid.
    """
    seq = as_sequence(seq)
    padded, _ = _pad(seq, window, padding)
    frames = padded.shape[0]
    for i, j in patch_anchors(padded.shape[1], padded.shape[2], window, stride):
        block = padded[:, i:i + window, j:j + window].reshape(frames, window * window)
        yield CasoratiPatch((i, j), window, block.T.copy())


def coverage(shape, window=7, stride=1):
    """Number of windows covering each pixel of a ``(height, width)`` grid."""
    counts = np.zeros(shape)
    for i, j in patch_anchors(shape[0], shape[1], window, stride):
        counts[i:i + window, j:j + window] += 1
    return counts


def aggregate(estimates, shape, window):
    """Average overlapping patch estimates into a ``(T, height, width)`` volume.

    ``estimates`` maps anchor -> ``(window**2, T)`` matrix. Contributions
    are summed in sorted anchor order, so the result does not depend on
    the order in which patches were processed.
    """
    frames, height, width = shape
    total = np.zeros(shape)
    counts = np.zeros((height, width))
    for (i, j) in sorted(estimates):
        block = estimates[(i, j)].T.reshape(frames, window, window)
        total[:, i:i + window, j:j + window] += block
        counts[i:i + window, j:j + window] += 1
    if np.any(counts == 0):
        raise ParameterError("some pixels are not covered by any patch")
    return total / counts


def _patch_tau(matrix):
    try:
        return estimate_noise_median(matrix)
    except ParameterError:
        return 0.0


def denoise_llr(
    seq,
    reg=None,
    tau=None,
    c=1.0,
    window=7,
    stride=1,
    method="dp",
    *,
    padding="none",
    per_patch_noise=False,
    workers=1,
):
    """Locally low-rank denoising of a ``(T, height, width)`` sequence.

    Each Casorati block is denoised with bound ``c * window**2 * T * tau**2``
    (DP) or with SURE/HardT at noise level ``tau``. Without ``tau`` the
    median rule is applied per frame and the estimates averaged; with
    ``per_patch_noise=True`` each block estimates its own level instead.
    ``method="none"`` passes patches through unchanged.
    """
    seq = as_sequence(seq)
    reg = reg or Regularizer.nn()
    method = method.lower()
    frames, height, width = seq.shape
    if tau is None and not per_patch_noise:
        tau = float(np.mean([estimate_noise_median(frame) for frame in seq]))
    patches = list(extract_patches(seq, window, stride, padding))

    def work(patch):
        if method == "none":
            return patch.anchor, patch.matrix
        level = _patch_tau(patch.matrix) if per_patch_noise else tau
        if level <= 0:
            return patch.anchor, patch.matrix
        try:
            out = denoise(
                patch.matrix,
                reg,
                method,
                tau=level,
                eta=eta_bound(window * window, frames, level, c),
            )
        except Exception as exc:  # noqa: BLE001 - re-raised with the anchor
            raise PatchError(patch.anchor, exc) from exc
        return patch.anchor, out.x_hat

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = dict(pool.map(work, patches))
    else:
        results = dict(map(work, patches))

    extra = window - 1 if padding == "edge" else 0
    out = aggregate(results, (frames, height + extra, width + extra), window)
    if padding == "edge":
        top = (window - 1) // 2
        out = out[:, top:top + height, top:top + width]
    return out


def worst_case_error(truth, est):
    """Per-pixel ``max_t |truth - est|``."""
    truth = as_sequence(truth, "truth")
    est = as_sequence(est, "est")
    if truth.shape != est.shape:
        raise ParameterError(f"shape mismatch: {truth.shape} vs {est.shape}")
    return np.max(np.abs(truth - est), axis=0)
