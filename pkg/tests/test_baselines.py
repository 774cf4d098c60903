"""Batch ELM and the incremental comparators."""

import logging

import numpy as np
import pytest

from pullbacknet import (
    ActivationKind,
    ElmModel,
    IncrementalModel,
    InvalidInputError,
    RngStream,
    belm_fit,
    eielm_fit,
    elm_fit,
    fit_normalizer,
    ielm_fit,
)
from pullbacknet.activation import act_forward, act_inverse
from pullbacknet.numkernel import ridge_pinv

SINE = ActivationKind.SINE
SIG = ActivationKind.SIGMOID


def make_problem(seed, n_rows=50, n_in=3, n_out=2, unit_targets=False):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n_rows, n_in))
    if unit_targets:
        T = rng.uniform(0.0, 1.0, size=(n_rows, n_out))
    else:
        T = rng.normal(size=(n_rows, n_out))
    return X, T


def rmse(E):
    return float(np.sqrt((E ** 2).mean()))


def node_output(node, X, kind):
    return node.output(X, kind)


def recompute_trace(model, X, T):
    e = T.copy()
    trace = []
    for node in model.nodes:
        e = e - np.outer(node.output(X, model.kind), node.beta)
        trace.append(rmse(e))
    return trace


def test_elm_deterministic():
    X, T = make_problem(1)
    a = elm_fit(X, T, 1, SIG, RngStream(7))
    b = elm_fit(X, T, 1, SIG, RngStream(7))
    assert np.array_equal(a.A, b.A) and np.array_equal(a.b, b.b)
    assert np.array_equal(a.beta, b.beta)


def test_elm_training_residual_orthogonality():
    X, T = make_problem(2, n_rows=50, n_in=3, n_out=3)
    model = elm_fit(X, T, 10, SIG, RngStream(3))
    H = act_forward(SIG, X @ model.A + model.b)
    assert np.abs(H.T @ (H @ model.beta - T)).max() <= 1e-6


def test_elm_interpolates_when_wide():
    X, T = make_problem(4, n_rows=10, n_in=3, n_out=1)
    model = elm_fit(X, T, 12, SIG, RngStream(5))
    assert rmse(model.predict(X) - T) < 1e-6


def test_elm_predict_definition():
    X, T = make_problem(5)
    model = elm_fit(X, T, 4, SINE, RngStream(6))
    want = act_forward(SINE, X @ model.A + model.b) @ model.beta
    assert np.array_equal(model.predict(X), want)


def test_elm_serialization_round_trip():
    X, T = make_problem(8)
    model = elm_fit(X, T, 3, SIG, RngStream(9))
    back = ElmModel.from_record(model.to_record())
    assert np.array_equal(back.A, model.A)
    assert np.array_equal(back.beta, model.beta)
    assert np.array_equal(back.predict(X), model.predict(X))


def test_ielm_trace_monotone():
    X, T = make_problem(11)
    model = ielm_fit(X, T, 20, SIG, RngStream(12))
    trace = model.rmse_trace
    assert all(trace[k + 1] <= trace[k] + 1e-12 for k in range(len(trace) - 1))


def test_ielm_trace_recompute():
    X, T = make_problem(13)
    model = ielm_fit(X, T, 15, SINE, RngStream(14))
    again = recompute_trace(model, X, T)
    assert np.abs(np.asarray(again) - np.asarray(model.rmse_trace)).max() <= 1e-10


def test_ielm_single_node_matches_hand_solve():
    X, T = make_problem(15, n_rows=30, n_in=4, n_out=2)
    model = ielm_fit(X, T, 1, SIG, RngStream(77))
    gen = RngStream(77).generator()
    a = gen.uniform(-1.0, 1.0, 4)
    b = float(gen.uniform(0.0, 1.0))
    h = act_forward(SIG, (X @ a + b)[:, None]).ravel()
    beta = (T.T @ h) / float(h @ h)
    node = model.nodes[0]
    assert np.array_equal(node.a, a) and node.b == b
    assert np.array_equal(node.beta, beta)


def test_ielm_deterministic():
    X, T = make_problem(16)
    a = ielm_fit(X, T, 5, SINE, RngStream(20))
    b = ielm_fit(X, T, 5, SINE, RngStream(20))
    assert a.rmse_trace == b.rmse_trace
    for na, nb in zip(a.nodes, b.nodes):
        assert np.array_equal(na.a, nb.a) and na.b == nb.b
        assert np.array_equal(na.beta, nb.beta)


def test_eielm_single_candidate_equals_ielm():
    X, T = make_problem(18)
    a = ielm_fit(X, T, 8, SIG, RngStream(30))
    b = eielm_fit(X, T, 8, 1, SIG, RngStream(30))
    assert a.rmse_trace == b.rmse_trace
    for na, nb in zip(a.nodes, b.nodes):
        assert np.array_equal(na.a, nb.a) and na.b == nb.b
        assert np.array_equal(na.beta, nb.beta)


def test_eielm_first_step_dominates_its_pool():
    # replay the candidate pool and check the kept node is the pool minimum
    X, T = make_problem(19, n_rows=40, n_in=3, n_out=2)
    p = 8
    model = eielm_fit(X, T, 1, p, SIG, RngStream(41))
    gen = RngStream(41).generator()
    A = gen.uniform(-1.0, 1.0, (p, 3))
    bs = gen.uniform(0.0, 1.0, p)
    post = []
    for j in range(p):
        h = act_forward(SIG, (X @ A[j] + bs[j])[:, None]).ravel()
        beta = (T.T @ h) / float(h @ h)
        post.append(rmse(T - np.outer(h, beta)))
    got = model.rmse_trace[0]
    assert all(got <= v + 1e-10 for v in post)
    assert got >= min(post) - 1e-10


def test_eielm_trace_monotone_and_recomputable():
    X, T = make_problem(22)
    model = eielm_fit(X, T, 12, 5, SINE, RngStream(43))
    trace = model.rmse_trace
    assert all(trace[k + 1] <= trace[k] + 1e-12 for k in range(len(trace) - 1))
    again = recompute_trace(model, X, T)
    assert np.abs(np.asarray(again) - np.asarray(trace)).max() <= 1e-10


def test_eielm_validates_p():
    X, T = make_problem(23)
    with pytest.raises(InvalidInputError):
        eielm_fit(X, T, 2, 0, SIG, RngStream(1))


def test_belm_node_parity():
    X, T = make_problem(25, n_out=1, unit_targets=True)
    model = belm_fit(X, T, 6, SIG, RngStream(50))
    styles = [node.style for node in model.nodes]
    assert styles == ["random", "feedback"] * 3


def test_belm_feedback_step_matches_hand_solve():
    # reproduce step 2 (the first feedback node) from the step-1 draws
    X, T = make_problem(26, n_rows=35, n_in=4, n_out=1, unit_targets=True)
    model = belm_fit(X, T, 2, SIG, RngStream(61))
    gen = RngStream(61).generator()
    a1 = gen.uniform(-1.0, 1.0, 4)
    b1 = float(gen.uniform(0.0, 1.0))
    h1 = act_forward(SIG, (X @ a1 + b1)[:, None]).ravel()
    e = T[:, 0].copy()
    beta1 = float(e @ h1) / float(h1 @ h1)
    e = e - beta1 * h1

    target = (e / beta1)[:, None]
    denorm = fit_normalizer(target, SIG)
    lam = act_inverse(SIG, denorm.apply(target))
    a2 = (ridge_pinv(X) @ lam).ravel()
    misfit = lam.ravel() - X @ a2
    b2 = float(np.sqrt(np.mean(misfit * misfit)))
    h2 = denorm.invert(act_forward(SIG, (X @ a2 + b2)[:, None])).ravel()
    beta2 = float(e @ h2) / float(h2 @ h2)

    node = model.nodes[1]
    assert node.style == "feedback"
    assert np.array_equal(node.a, a2)
    assert node.b == b2
    assert node.beta[0] == beta2
    assert np.array_equal(node.denorm.mins, denorm.mins)


def test_belm_trace_monotone_and_recomputable():
    X, T = make_problem(27, n_out=1, unit_targets=True)
    model = belm_fit(X, T, 10, SIG, RngStream(52))
    trace = model.rmse_trace
    assert all(trace[k + 1] <= trace[k] + 1e-12 for k in range(len(trace) - 1))
    again = recompute_trace(model, X, T)
    assert np.abs(np.asarray(again) - np.asarray(trace)).max() <= 1e-10


def test_belm_zero_weight_falls_back_to_random(caplog):
    # zero target makes beta_1 exactly 0; the feedback step must not divide
    X = np.random.default_rng(28).normal(size=(20, 3))
    t = np.zeros((20, 1))
    with caplog.at_level(logging.WARNING):
        model = belm_fit(X, t, 2, SIG, RngStream(53))
    assert [node.style for node in model.nodes] == ["random", "random"]
    assert any("zero" in rec.message for rec in caplog.records)


def test_belm_rejects_multi_output():
    X, T = make_problem(29, n_out=2)
    with pytest.raises(InvalidInputError):
        belm_fit(X, T, 2, SIG, RngStream(1))


def test_belm_accepts_flat_target():
    X, T = make_problem(33, n_out=1, unit_targets=True)
    a = belm_fit(X, T, 2, SIG, RngStream(54))
    b = belm_fit(X, T.ravel(), 2, SIG, RngStream(54))
    assert a.rmse_trace == b.rmse_trace


def test_incremental_serialization_round_trip():
    X, T = make_problem(34, n_out=1, unit_targets=True)
    model = belm_fit(X, T, 4, SIG, RngStream(55))
    back = IncrementalModel.from_record(model.to_record())
    assert back.rmse_trace == model.rmse_trace
    assert [n.style for n in back.nodes] == [n.style for n in model.nodes]
    assert np.array_equal(back.predict(X), model.predict(X))
    fb = back.nodes[1]
    assert fb.denorm is not None and fb.denorm.clamp == model.nodes[1].denorm.clamp


def test_incremental_classify_uses_argmax():
    X, _ = make_problem(35, n_rows=30, n_in=4)
    labels = np.random.default_rng(36).integers(0, 3, size=30)
    T = np.zeros((30, 3))
    T[np.arange(30), labels] = 1.0
    model = ielm_fit(X, T, 5, SIG, RngStream(56))
    assert np.array_equal(model.classify(X), np.argmax(model.predict(X), axis=1))
