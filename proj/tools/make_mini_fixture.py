#!/usr/bin/env python3
"""Generate the bundled mini fixture: 300 samples, 64 channels, 3 classes.

Even-numbered samples are stored as float32 [64, 2, 2] maps, odd ones as
float64 [64] vectors, so ingestion exercises both pooling and pass-through.
Eight channels carry class signal; the rest are noise.

    python3 tools/make_mini_fixture.py tests/fixtures/mini
"""
import json
import sys
from pathlib import Path

import numpy as np

CLASSES = ["Highly fresh", "Fresh", "Not fresh"]
COUNTS = [120, 90, 90]
DIM = 64
INFORMATIVE = [3, 11, 17, 24, 30, 41, 52, 60]


def main(out: Path) -> None:
    rng = np.random.default_rng(20240611)
    means = np.zeros((len(CLASSES), DIM))
    means[:, INFORMATIVE] = rng.normal(0.0, 1.1, size=(len(CLASSES), len(INFORMATIVE)))

    feat_dir = out / "features"
    feat_dir.mkdir(parents=True, exist_ok=True)
    for old in feat_dir.glob("*.npy"):
        old.unlink()

    labels = [c for c, n in enumerate(COUNTS) for _ in range(n)]
    order = rng.permutation(len(labels))
    entries = []
    for i, idx in enumerate(order):
        label = labels[idx]
        vec = means[label] + rng.normal(0.0, 1.0, size=DIM)
        sample_id = f"s{i:03d}"
        if i % 2 == 0:
            spatial = rng.normal(0.0, 0.25, size=(DIM, 2, 2))
            spatial -= spatial.mean(axis=(1, 2), keepdims=True)
            arr = (vec[:, None, None] + spatial).astype("<f4")
        else:
            arr = vec.astype("<f8")
        np.save(feat_dir / f"{sample_id}.npy", arr)
        entries.append({
            "sample_id": sample_id,
            "label_name": CLASSES[label],
            "feature_path": f"features/{sample_id}.npy",
            "backbone": "synthetic",
            "stage": "mini",
        })

    manifest = {"class_names": CLASSES, "feature_dim": DIM, "entries": entries}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")


if __name__ == "__main__":
    main(Path(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures/mini"))
