"""Multi-class classification with one-hot targets and argmax decisions.

Three Gaussian blobs are encoded as one-hot rows in [0, 1] -- the same range
the regression targets use -- so the identical closed-form fit applies. The
decision rule is argmax over the output columns.
"""

import numpy as np

from pullbacknet import (
    ActivationKind,
    Dataset,
    RngStream,
    accuracy,
    elm_fit,
    fit_network,
    normalize_dataset,
)

rng = np.random.default_rng(33)
centers = np.array([[0.0, 0.0], [3.0, 1.0], [-1.0, 2.5]])
per_class = 120
X = np.vstack([c + rng.normal(scale=0.7, size=(per_class, 2)) for c in centers])
labels = np.repeat(np.arange(3), per_class)

# wrap as a raw classification dataset; normalize_dataset one-hot encodes
raw = Dataset(name="blobs", X=X, T=labels[:, None].astype(float),
              task="classification", class_labels=["a", "b", "c"])
ds = normalize_dataset(raw)
print("one-hot target shape:", ds.T.shape)

holdout = rng.permutation(len(labels))
train, test = holdout[:270], holdout[270:]

net = fit_network(ds.X[train], ds.T[train], ActivationKind.SIGMOID, max_nodes=1)
pred = net.classify(ds.X[test])
print("closed-form single node accuracy: %.1f%%"
      % (100 * accuracy(pred, labels[test])))

# a one-node random-feature baseline for contrast
elm = elm_fit(ds.X[train], ds.T[train], 1, ActivationKind.SIGMOID, RngStream(5))
print("random single node accuracy:      %.1f%%"
      % (100 * accuracy(elm.classify(ds.X[test]), labels[test])))

# class labels decode back through the stored label list
decoded = [raw.class_labels[i] for i in pred[:8]]
print("first predictions as labels:", decoded)
