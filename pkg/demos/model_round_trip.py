"""Serialize a fitted network and reload it bit-for-bit.

Model files are plain JSON with full-precision floats, so a reloaded model
reproduces the original predictions exactly -- not approximately. The same
record format backs the CLI's fit/predict commands.
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from pullbacknet import (
    ActivationKind,
    PullbackNetwork,
    RngStream,
    fit_network,
    gen_friedman,
    normalize_dataset,
)

ds = normalize_dataset(gen_friedman(500, 0.5, RngStream(21)))
net = fit_network(ds.X, ds.T, ActivationKind.SIGMOID, max_nodes=3)

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "model.json"
    net.save(path)
    print("saved %d-node model to %s (%d bytes)"
          % (len(net.nodes), path.name, path.stat().st_size))

    record = json.loads(path.read_text())
    print("record keys:", sorted(record))
    print("style tag:", record["style"])

    back = PullbackNetwork.load(path)

before = net.predict(ds.X)
after = back.predict(ds.X)
print("predictions identical:", bool(np.array_equal(before, after)))
print("max abs difference:   ", float(np.abs(before - after).max()))
