"""Closed-form network whose hidden nodes absorb the residual directly.

There are no output weights to train. Each hidden node is fitted in closed
form against the current residual: the residual is squeezed into the
activation's invertible range, pulled back through the activation inverse,
and the input weights are solved with the ridge pseudoinverse of the inputs.
The bias is the rms of what the linear solve could not express, added with
positive sign. Prediction is the plain sum of denormalized node outputs.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .activation import ActivationKind, Normalizer, act_forward, act_inverse, fit_normalizer
from .errors import InvalidInputError, NumericError, ShapeError
from .numkernel import as_matrix, ridge_pinv

__all__ = [
    "FeedbackNode",
    "PullbackNetwork",
    "fit_node",
    "fit_network",
    "decision_labels",
]


@dataclass(frozen=True)
class FeedbackNode:
    """One analytically fitted hidden node.

    a : (n, m) input weights, one column per output
    b : (m,) non-negative biases
    denorm : the residual normalizer frozen at fit time; prediction reuses
        its stored parameters, never refits
    """

    a: np.ndarray
    b: np.ndarray
    denorm: Normalizer

    def output(self, X, kind):
        """Denormalized node response u^-1(h(X a + b))."""
        return self.denorm.invert(act_forward(kind, X @ self.a + self.b))


def fit_node(X, E, kind, ridge_pinv_X):
    """Fit one node to the residual E in closed form.

    Steps, exactly: fit the residual normalizer; pull the normalized
    residual back through the activation inverse to get the targets Lam;
    solve a = ridge_pinv_X @ Lam; set b[j] to the rms of column j of
    (Lam - X a). The ridge pseudoinverse is passed in so a network fit
    computes it once.
    """
    X = as_matrix(X, "X")
    E = as_matrix(E, "E")
    P = as_matrix(ridge_pinv_X, "ridge_pinv_X")
    N, n = X.shape
    if E.shape[0] != N:
        raise ShapeError("X has %d rows but E has %d" % (N, E.shape[0]))
    if P.shape != (n, N):
        raise ShapeError(
            "ridge_pinv_X must be %dx%d (transposed pseudoinverse of X), got %dx%d"
            % (n, N, P.shape[0], P.shape[1])
        )
    denorm = fit_normalizer(E, kind)
    lam = act_inverse(kind, denorm.apply(E))
    a = P @ lam
    if not np.isfinite(a).all():
        raise NumericError("input-weight solve produced non-finite entries")
    misfit = lam - X @ a
    b = np.sqrt(np.mean(misfit * misfit, axis=0))
    if not np.isfinite(b).all():
        raise NumericError("bias computation produced non-finite entries")
    return FeedbackNode(a=a, b=b, denorm=denorm)


def decision_labels(Y):
    """Class indices from network outputs.

    Multi-column: argmax per row, ties toward the lowest index. Single
    column: threshold at 0.5 (binary with 0/1 targets).
    """
    Y = as_matrix(Y, "Y")
    if Y.shape[1] == 1:
        return (Y[:, 0] >= 0.5).astype(np.int64)
    return np.argmax(Y, axis=1).astype(np.int64)


@dataclass
class PullbackNetwork:
    """Sum-of-nodes network with the output weight frozen at identity."""

    kind: ActivationKind
    input_dim: int
    output_dim: int
    nodes: list = field(default_factory=list)
    training_rmse_trace: list = field(default_factory=list)

    def predict(self, X):
        """Sum of node outputs; a zero-node network predicts all zeros."""
        X = as_matrix(X, "X")
        if X.shape[1] != self.input_dim:
            raise ShapeError(
                "X has %d columns, network expects %d" % (X.shape[1], self.input_dim)
            )
        out = np.zeros((X.shape[0], self.output_dim))
        for node in self.nodes:
            out += node.output(X, self.kind)
        return out

    def classify(self, X):
        """Predicted class indices (argmax, or 0.5 threshold when m = 1)."""
        return decision_labels(self.predict(X))

    def to_record(self):
        """Plain-dict form of the model; floats survive JSON bit-exactly."""
        return {
            "style": "pullback",
            "kind": self.kind.value,
            "n": self.input_dim,
            "m": self.output_dim,
            "nodes": [
                {
                    "a": node.a.tolist(),
                    "b": node.b.tolist(),
                    "mins": node.denorm.mins.tolist(),
                    "ranges": node.denorm.ranges.tolist(),
                    "clamp": node.denorm.clamp,
                }
                for node in self.nodes
            ],
            "training_rmse_trace": list(self.training_rmse_trace),
        }

    def to_json(self):
        return json.dumps(self.to_record(), sort_keys=True, indent=1)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
            fh.write("\n")

    @classmethod
    def from_record(cls, record):
        """Rebuild a network from to_record() output; unknown keys ignored."""
        try:
            kind = ActivationKind.parse(record["kind"])
            n = int(record["n"])
            m = int(record["m"])
            raw_nodes = record["nodes"]
        except (KeyError, TypeError) as exc:
            raise InvalidInputError("malformed model record: %s" % exc) from exc
        nodes = []
        for entry in raw_nodes:
            a = np.asarray(entry["a"], dtype=np.float64)
            b = np.asarray(entry["b"], dtype=np.float64)
            if a.shape != (n, m) or b.shape != (m,):
                raise ShapeError("node arrays disagree with declared dims %dx%d" % (n, m))
            denorm = Normalizer(
                mins=np.asarray(entry["mins"], dtype=np.float64),
                ranges=np.asarray(entry["ranges"], dtype=np.float64),
                clamp=float(entry["clamp"]),
            )
            nodes.append(FeedbackNode(a=a, b=b, denorm=denorm))
        trace = [float(v) for v in record.get("training_rmse_trace", [])]
        return cls(kind=kind, input_dim=n, output_dim=m, nodes=nodes, training_rmse_trace=trace)

    @classmethod
    def from_json(cls, text):
        return cls.from_record(json.loads(text))

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())


def fit_network(X, T, kind, max_nodes=1, stop_rmse=0.0):
    """Fit a network by repeatedly absorbing the residual into new nodes.

    Starts from e = T, appends closed-form nodes (each fitted to the current
    residual) until max_nodes is reached or the training RMSE drops to
    stop_rmse. The default is a single node, the advertised configuration.
    Deterministic: no randomness is involved anywhere.

    T must already be normalized into [0, 1] (the benchmark protocol's
    target range); X is used as-is.
    """
    X = as_matrix(X, "X")
    T = as_matrix(T, "T")
    if max_nodes < 1:
        raise InvalidInputError("max_nodes must be >= 1, got %r" % max_nodes)
    if T.shape[0] != X.shape[0]:
        raise ShapeError("X has %d rows but T has %d" % (X.shape[0], T.shape[0]))
    if T.size == 0:
        raise InvalidInputError("T must be non-empty")
    if T.min() < 0.0 or T.max() > 1.0:
        raise InvalidInputError("targets must lie in [0, 1]; normalize the dataset first")
    P = ridge_pinv(X)
    net = PullbackNetwork(kind=kind, input_dim=X.shape[1], output_dim=T.shape[1])
    e = T.copy()
    for _ in range(int(max_nodes)):
        node = fit_node(X, e, kind, P)
        e = e - node.output(X, kind)
        net.nodes.append(node)
        net.training_rmse_trace.append(float(np.sqrt(np.mean(e * e))))
        if net.training_rmse_trace[-1] <= stop_rmse:
            break
    return net
