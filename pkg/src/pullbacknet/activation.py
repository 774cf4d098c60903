"""Activation pairs (forward, inverse) and the per-column range normalizer.

The normalizer is the bridge between residual space and activation space: it
squeezes each target column into the activation's invertible range with a
stored affine map, and its inverse (the plain affine extension, no clamping)
turns node activations back into residual-scale outputs.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import expit, logit

from .errors import DomainError, InvalidInputError, ShapeError
from .numkernel import as_matrix

__all__ = [
    "ActivationKind",
    "Normalizer",
    "act_forward",
    "act_inverse",
    "fit_normalizer",
    "RANGE_FLOOR",
    "SIGMOID_CLAMP",
]

# smallest column range kept by fit_normalizer; constant columns get this
RANGE_FLOOR = 1e-12
# sigmoid targets are pinched into [delta, 1-delta] so logit stays finite
SIGMOID_CLAMP = 1e-6


class ActivationKind(str, Enum):
    SINE = "sine"
    SIGMOID = "sigmoid"

    @classmethod
    def parse(cls, text):
        try:
            return cls(text)
        except ValueError:
            raise InvalidInputError(
                "unknown activation %r (choose from %s)"
                % (text, ", ".join(k.value for k in cls))
            ) from None


def act_forward(kind, Z):
    """Elementwise activation: sin(z) or the logistic 1/(1+exp(-z))."""
    Z = as_matrix(Z, "Z")
    if kind is ActivationKind.SINE:
        return np.sin(Z)
    return expit(Z)


def act_inverse(kind, V):
    """Elementwise activation inverse: arcsin(v) or logit(v) = -log(1/v - 1).

    Sine requires entries in [0, 1] (principal branch, range [0, pi/2]);
    sigmoid requires entries strictly inside (0, 1). The offending index is
    named in the error. The logit is evaluated as log(v / (1 - v)), which is
    the same function with far less cancellation near the endpoints.
    """
    V = as_matrix(V, "V")
    if kind is ActivationKind.SINE:
        bad = (V < 0.0) | (V > 1.0)
        if bad.any():
            i, j = map(int, np.argwhere(bad)[0])
            raise DomainError(
                "sine inverse needs values in [0, 1]; V[%d, %d] = %r" % (i, j, V[i, j])
            )
        return np.arcsin(V)
    bad = (V <= 0.0) | (V >= 1.0)
    if bad.any():
        i, j = map(int, np.argwhere(bad)[0])
        raise DomainError(
            "sigmoid inverse needs values in (0, 1); V[%d, %d] = %r" % (i, j, V[i, j])
        )
    return logit(V)


@dataclass(frozen=True)
class Normalizer:
    """Frozen per-column affine map onto an activation's invertible range.

    apply() sends column j through (v - mins[j]) / ranges[j], clips to
    [0, 1], and for sigmoid rescales into [clamp, 1-clamp]. invert() is the
    unclamped affine extension, so out-of-range activations denormalize
    linearly rather than saturating.
    """

    mins: np.ndarray
    ranges: np.ndarray
    clamp: float

    def __post_init__(self):
        object.__setattr__(self, "mins", np.atleast_1d(np.asarray(self.mins, dtype=np.float64)))
        object.__setattr__(self, "ranges", np.atleast_1d(np.asarray(self.ranges, dtype=np.float64)))
        if self.mins.ndim != 1 or self.ranges.ndim != 1 or self.mins.shape != self.ranges.shape:
            raise ShapeError("mins and ranges must be equal-length vectors")
        if (self.ranges < RANGE_FLOOR).any():
            raise InvalidInputError("ranges must be >= %g" % RANGE_FLOOR)
        if not 0.0 <= self.clamp < 0.5:
            raise InvalidInputError("clamp must lie in [0, 0.5)")

    @property
    def width(self):
        return self.mins.shape[0]

    def _check_cols(self, M, name):
        if M.shape[1] != self.width:
            raise ShapeError(
                "%s has %d columns, normalizer was fitted on %d" % (name, M.shape[1], self.width)
            )

    def apply(self, E):
        """Map E columnwise into the activation's invertible range.

        Values outside the fitted [min, max] map affinely and then clip to
        [0, 1]. In a degenerate column (range at the floor) every entry that
        equals the fitted constant goes to the midpoint 0.5 exactly.
        """
        E = as_matrix(E, "E")
        self._check_cols(E, "E")
        v = (E - self.mins) / self.ranges
        np.clip(v, 0.0, 1.0, out=v)
        degenerate = self.ranges <= RANGE_FLOOR
        if degenerate.any():
            v[(E == self.mins) & degenerate] = 0.5
        if self.clamp > 0.0:
            v = self.clamp + (1.0 - 2.0 * self.clamp) * v
        return v

    def invert(self, V):
        """Affine extension of the inverse map; no clamping on the way out."""
        V = as_matrix(V, "V")
        self._check_cols(V, "V")
        if self.clamp > 0.0:
            V = (V - self.clamp) / (1.0 - 2.0 * self.clamp)
        return self.mins + V * self.ranges


def fit_normalizer(E, kind):
    """Fit the columnwise min-max map sending E into the invertible range.

    mins[j] is the column minimum and ranges[j] = max(max - min, floor); a
    constant column keeps the floor range, which marks it so apply() sends
    the constant to 0.5 and invert() restores it to within half a floor.
    """
    E = as_matrix(E, "E")
    if E.shape[0] < 1 or E.shape[1] < 1:
        raise InvalidInputError("E must have at least one row and one column")
    lo = E.min(axis=0)
    spread = E.max(axis=0) - lo
    ranges = np.maximum(spread, RANGE_FLOOR)
    clamp = SIGMOID_CLAMP if kind is ActivationKind.SIGMOID else 0.0
    return Normalizer(mins=lo, ranges=ranges, clamp=clamp)
