"""ELM-family comparators: batch ELM and the incremental constructive variants.

All hidden-node randomness follows the classical convention (weights uniform
on [-1, 1], biases uniform on [0, 1]) and flows from an explicit RngStream,
so every fit is reproducible bit for bit. Incremental models grow one node
per step; B-ELM alternates random nodes with error-feedback nodes computed
by the same pullback machinery the main method uses.
"""

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .activation import ActivationKind, Normalizer, act_forward, act_inverse, fit_normalizer
from .errors import InvalidInputError, ShapeError
from .numkernel import as_matrix, moore_penrose_pinv, ridge_pinv
from .pullback import decision_labels

__all__ = [
    "ElmModel",
    "IncrementalNode",
    "IncrementalModel",
    "elm_fit",
    "ielm_fit",
    "eielm_fit",
    "belm_fit",
]

log = logging.getLogger(__name__)


def _rmse(e):
    return float(np.sqrt(np.mean(e * e)))


def _act_vec(kind, z):
    # elementwise activation on a 1-D array
    return act_forward(kind, z[:, None]).ravel()


@dataclass
class ElmModel:
    """Batch ELM: random hidden layer, output weights solved in one shot."""

    kind: ActivationKind
    A: np.ndarray  # (n, L) random input weights
    b: np.ndarray  # (L,) random biases
    beta: np.ndarray  # (L, m) solved output weights

    def predict(self, X):
        X = as_matrix(X, "X")
        if X.shape[1] != self.A.shape[0]:
            raise ShapeError("X has %d columns, model expects %d" % (X.shape[1], self.A.shape[0]))
        return act_forward(self.kind, X @ self.A + self.b) @ self.beta

    def classify(self, X):
        return decision_labels(self.predict(X))

    def to_record(self):
        return {
            "style": "elm",
            "kind": self.kind.value,
            "n": self.A.shape[0],
            "m": self.beta.shape[1],
            "A": self.A.tolist(),
            "b": self.b.tolist(),
            "beta": self.beta.tolist(),
        }

    def to_json(self):
        return json.dumps(self.to_record(), sort_keys=True, indent=1)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
            fh.write("\n")

    @classmethod
    def from_record(cls, record):
        return cls(
            kind=ActivationKind.parse(record["kind"]),
            A=np.asarray(record["A"], dtype=np.float64),
            b=np.asarray(record["b"], dtype=np.float64),
            beta=np.asarray(record["beta"], dtype=np.float64),
        )


def elm_fit(X, T, L, kind, stream):
    """Fit batch ELM with L random nodes; beta = pinv(H) @ T."""
    X = as_matrix(X, "X")
    T = as_matrix(T, "T")
    if L < 1:
        raise InvalidInputError("L must be >= 1, got %r" % L)
    if T.shape[0] != X.shape[0]:
        raise ShapeError("X has %d rows but T has %d" % (X.shape[0], T.shape[0]))
    gen = stream.generator()
    A = gen.uniform(-1.0, 1.0, (X.shape[1], int(L)))
    b = gen.uniform(0.0, 1.0, int(L))
    H = act_forward(kind, X @ A + b)
    beta = moore_penrose_pinv(H) @ T
    return ElmModel(kind=kind, A=A, b=b, beta=beta)


@dataclass(frozen=True)
class IncrementalNode:
    """One node of an incremental model.

    Random-style nodes are bare (a, b) draws. Feedback-style nodes (B-ELM
    even steps) carry the residual normalizer used to denormalize their
    activation, exactly like the pullback network's nodes.
    """

    a: np.ndarray  # (n,)
    b: float
    beta: np.ndarray  # (m,) per-output scalar weights on a shared node
    style: str  # "random" | "feedback"
    denorm: Normalizer | None = None

    def output(self, X, kind):
        z = X @ self.a + self.b
        if self.denorm is None:
            return _act_vec(kind, z)
        return self.denorm.invert(act_forward(kind, z[:, None])).ravel()


@dataclass
class IncrementalModel:
    """Node list grown one step at a time; prediction sums h_i * beta_i."""

    kind: ActivationKind
    input_dim: int
    output_dim: int
    nodes: list = field(default_factory=list)
    rmse_trace: list = field(default_factory=list)

    def predict(self, X):
        X = as_matrix(X, "X")
        if X.shape[1] != self.input_dim:
            raise ShapeError("X has %d columns, model expects %d" % (X.shape[1], self.input_dim))
        out = np.zeros((X.shape[0], self.output_dim))
        for node in self.nodes:
            out += np.outer(node.output(X, self.kind), node.beta)
        return out

    def classify(self, X):
        return decision_labels(self.predict(X))

    def to_record(self):
        return {
            "style": "incremental",
            "kind": self.kind.value,
            "n": self.input_dim,
            "m": self.output_dim,
            "nodes": [
                {
                    "style": node.style,
                    "a": node.a.tolist(),
                    "b": node.b,
                    "beta": node.beta.tolist(),
                    "denorm": None
                    if node.denorm is None
                    else {
                        "mins": node.denorm.mins.tolist(),
                        "ranges": node.denorm.ranges.tolist(),
                        "clamp": node.denorm.clamp,
                    },
                }
                for node in self.nodes
            ],
            "rmse_trace": list(self.rmse_trace),
        }

    def to_json(self):
        return json.dumps(self.to_record(), sort_keys=True, indent=1)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
            fh.write("\n")

    @classmethod
    def from_record(cls, record):
        nodes = []
        for entry in record["nodes"]:
            raw = entry.get("denorm")
            denorm = None
            if raw is not None:
                denorm = Normalizer(
                    mins=np.asarray(raw["mins"], dtype=np.float64),
                    ranges=np.asarray(raw["ranges"], dtype=np.float64),
                    clamp=float(raw["clamp"]),
                )
            nodes.append(
                IncrementalNode(
                    a=np.asarray(entry["a"], dtype=np.float64),
                    b=float(entry["b"]),
                    beta=np.asarray(entry["beta"], dtype=np.float64),
                    style=entry["style"],
                    denorm=denorm,
                )
            )
        return cls(
            kind=ActivationKind.parse(record["kind"]),
            input_dim=int(record["n"]),
            output_dim=int(record["m"]),
            nodes=nodes,
            rmse_trace=[float(v) for v in record.get("rmse_trace", [])],
        )


def _check_incremental_args(X, T, L_max):
    X = as_matrix(X, "X")
    T = as_matrix(T, "T")
    if L_max < 1:
        raise InvalidInputError("L_max must be >= 1, got %r" % L_max)
    if T.shape[0] != X.shape[0]:
        raise ShapeError("X has %d rows but T has %d" % (X.shape[0], T.shape[0]))
    return X, T


def ielm_fit(X, T, L_max, kind, stream):
    """Incremental ELM: one random node per step, scalar LS weight per output.

    Each step draws (a, b), computes the node response H, and sets
    beta_j = <e_j, H> / <H, H> for every output column, the 1-D least
    squares coefficient; the training RMSE trace therefore never increases.
    """
    X, T = _check_incremental_args(X, T, L_max)
    gen = stream.generator()
    model = IncrementalModel(kind=kind, input_dim=X.shape[1], output_dim=T.shape[1])
    e = T.copy()
    for _ in range(int(L_max)):
        a = gen.uniform(-1.0, 1.0, X.shape[1])
        b = float(gen.uniform(0.0, 1.0))
        h = _act_vec(kind, X @ a + b)
        hh = float(h @ h)
        if hh == 0.0:  # constant-zero node, measure-zero event
            log.warning("skipping node with identically zero output")
            continue
        beta = (e.T @ h) / hh
        e = e - np.outer(h, beta)
        model.nodes.append(IncrementalNode(a=a, b=b, beta=beta, style="random"))
        model.rmse_trace.append(_rmse(e))
    return model


def eielm_fit(X, T, L_max, p, kind, stream):
    """Enhanced incremental ELM: p candidate nodes per step, keep the best.

    The winner is the candidate minimizing the post-step residual norm,
    equivalently maximizing sum_j <e_j, H>^2 / <H, H>; ties go to the lowest
    candidate index. With p = 1 the draw order matches ielm_fit exactly, so
    the two produce identical models from the same stream.
    """
    X, T = _check_incremental_args(X, T, L_max)
    if p < 1:
        raise InvalidInputError("p must be >= 1, got %r" % p)
    gen = stream.generator()
    model = IncrementalModel(kind=kind, input_dim=X.shape[1], output_dim=T.shape[1])
    e = T.copy()
    for _ in range(int(L_max)):
        A = gen.uniform(-1.0, 1.0, (int(p), X.shape[1]))
        bs = gen.uniform(0.0, 1.0, int(p))
        Hc = act_forward(kind, X @ A.T + bs)  # one candidate per column
        hh = np.einsum("ij,ij->j", Hc, Hc)
        eh = e.T @ Hc
        alive = hh > 0.0
        gain = np.full(int(p), -1.0)
        gain[alive] = np.sum(eh[:, alive] ** 2, axis=0) / hh[alive]
        j = int(np.argmax(gain))
        if gain[j] < 0.0:
            log.warning("skipping step: every candidate node is identically zero")
            continue
        # recompute the winner through the single-node path so p = 1 is
        # bit-identical to ielm_fit (matrix and vector matmuls round apart)
        a = A[j].copy()
        b = float(bs[j])
        h = _act_vec(kind, X @ a + b)
        beta = (e.T @ h) / float(h @ h)
        e = e - np.outer(h, beta)
        model.nodes.append(IncrementalNode(a=a, b=b, beta=beta, style="random"))
        model.rmse_trace.append(_rmse(e))
    return model


def belm_fit(X, t, L_max, kind, stream):
    """Bidirectional ELM for single-output regression.

    Odd steps add a random node as in ielm_fit. Even steps add a feedback
    node: the scaled residual e / beta_prev becomes the node's target and is
    pulled back through the normalizer and activation inverse with the ridge
    pseudoinverse, exactly the closed-form machinery of the pullback module.
    The output weight is the scalar LS coefficient against the realized node
    response, so a feedback step can never increase the residual either.
    """
    X = as_matrix(X, "X")
    t = np.asarray(t, dtype=np.float64)
    if t.ndim == 1:
        t = t[:, None]
    t = as_matrix(t, "t")
    if t.shape[1] != 1:
        raise InvalidInputError(
            "this model is single-output only, got %d target columns" % t.shape[1]
        )
    if L_max < 1:
        raise InvalidInputError("L_max must be >= 1, got %r" % L_max)
    if t.shape[0] != X.shape[0]:
        raise ShapeError("X has %d rows but t has %d" % (X.shape[0], t.shape[0]))
    gen = stream.generator()
    model = IncrementalModel(kind=kind, input_dim=X.shape[1], output_dim=1)
    P = None  # ridge pseudoinverse, computed on the first feedback step
    e = t[:, 0].copy()
    for step in range(1, int(L_max) + 1):
        feedback = step % 2 == 0
        if feedback and model.nodes and float(model.nodes[-1].beta[0]) == 0.0:
            log.warning("previous output weight is zero; substituting a random step")
            feedback = False
        if feedback:
            if P is None:
                P = ridge_pinv(X)
            target = (e / float(model.nodes[-1].beta[0]))[:, None]
            denorm = fit_normalizer(target, kind)
            lam = act_inverse(kind, denorm.apply(target))
            a = (P @ lam).ravel()
            misfit = lam.ravel() - X @ a
            b = float(np.sqrt(np.mean(misfit * misfit)))
            h = denorm.invert(act_forward(kind, (X @ a + b)[:, None])).ravel()
            style = "feedback"
        else:
            a = gen.uniform(-1.0, 1.0, X.shape[1])
            b = float(gen.uniform(0.0, 1.0))
            h = _act_vec(kind, X @ a + b)
            denorm = None
            style = "random"
        hh = float(h @ h)
        if hh == 0.0:
            log.warning("skipping node with identically zero output")
            continue
        beta = float(e @ h) / hh
        e = e - beta * h
        model.nodes.append(
            IncrementalNode(a=a, b=b, beta=np.array([beta]), style=style, denorm=denorm)
        )
        model.rmse_trace.append(_rmse(e))
    return model
