"""Dense linear-algebra kernel and the deterministic RNG contract.

Everything here is pure: matrices are finite float64 2-D arrays validated at
the public boundary, and every random draw is a function of an explicit
(seed, stream) pair, so identical inputs give bit-identical outputs across
runs and thread counts.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import InvalidInputError, NumericError, ShapeError

__all__ = [
    "RngStream",
    "as_matrix",
    "ridge_pinv",
    "moore_penrose_pinv",
    "rng_uniform",
]

_U64_MAX = 2**64


def as_matrix(x, name="matrix"):
    """Validate and return ``x`` as a finite 2-D float64 C-order array.

    Parameters
    ----------
    x : array_like
        Anything numpy can coerce to a 2-D array of floats.
    name : str
        Label used in error messages.

    Returns
    -------
    numpy.ndarray
        The validated array. A copy is made only if coercion requires it.
    """
    try:
        a = np.asarray(x, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError("%s is not numeric: %s" % (name, exc)) from exc
    if a.ndim != 2:
        raise ShapeError("%s must be 2-D, got ndim=%d" % (name, a.ndim))
    if a.size and not np.isfinite(a).all():
        raise InvalidInputError("%s contains non-finite entries" % name)
    return np.ascontiguousarray(a)


def ridge_pinv(X):
    """Ridge-regularized pseudoinverse of the input matrix.

    Returns (I + X'X)^-1 X', the n-by-N regularized inverse with the ridge
    strength fixed at 1 (no exposed knob). By the push-through identity this
    equals X'(I + XX')^-1, but the n-by-n normal system keeps the cost at
    O(N n^2 + n^3) instead of O(N^3) for tall data.
    """
    X = as_matrix(X, "X")
    N, n = X.shape
    if N < 1 or n < 1:
        raise InvalidInputError("X must have at least one row and one column")
    gram = X.T @ X
    gram.flat[:: n + 1] += 1.0  # I + X'X, symmetric positive definite
    try:
        factor = cho_factor(gram, lower=True, check_finite=False)
        out = cho_solve(factor, np.ascontiguousarray(X.T), check_finite=False)
    except (LinAlgError, ValueError) as exc:
        raise NumericError("SPD solve of (I + X'X) failed: %s" % exc) from exc
    if not np.isfinite(out).all():
        raise NumericError("ridge pseudoinverse has non-finite entries")
    return out


def moore_penrose_pinv(H):
    """Moore-Penrose pseudoinverse via SVD.

    Singular values below max(N, L) * machine epsilon * sigma_max are
    treated as zero, the standard cutoff convention.
    """
    H = as_matrix(H, "H")
    if H.size == 0:
        raise InvalidInputError("H must be non-empty")
    rcond = max(H.shape) * np.finfo(np.float64).eps
    try:
        return np.linalg.pinv(H, rcond=rcond)
    except np.linalg.LinAlgError as exc:
        raise NumericError("SVD did not converge: %s" % exc) from exc


@dataclass(frozen=True)
class RngStream:
    """Deterministic random source identified by (seed, stream).

    The stream id separates independent consumers sharing one seed; each
    call to :meth:`generator` restarts the stream from its beginning.
    """

    seed: int
    stream: int = 0

    def __post_init__(self):
        for label in ("seed", "stream"):
            v = getattr(self, label)
            if not isinstance(v, (int, np.integer)) or not 0 <= v < _U64_MAX:
                raise InvalidInputError(
                    "%s must be an unsigned 64-bit integer, got %r" % (label, v)
                )

    def generator(self):
        """Fresh numpy Generator positioned at the start of this stream."""
        seq = np.random.SeedSequence(entropy=int(self.seed), spawn_key=(int(self.stream),))
        return np.random.default_rng(seq)


def rng_uniform(stream, lo, hi, rows, cols):
    """Matrix of i.i.d. uniform draws on [lo, hi) from the given stream."""
    if not lo < hi:
        raise InvalidInputError("need lo < hi, got [%r, %r)" % (lo, hi))
    if rows < 1 or cols < 1:
        raise InvalidInputError("rows and cols must be positive")
    return stream.generator().uniform(lo, hi, (int(rows), int(cols)))
