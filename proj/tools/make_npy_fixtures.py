#!/usr/bin/env python3
"""Write NPY fixtures with numpy itself, plus an index of the expected
contents, for the tensor_io tests.

    python3 tools/make_npy_fixtures.py tests/fixtures/npy
"""
import json
import sys
from pathlib import Path

import numpy as np


def main(out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(7)
    index = []
    shapes = [(1,), (5,), (3, 4), (2, 3, 4), (7, 2, 2), (1, 1, 1), (4, 1, 3, 2), (0,), (16,), (64, 2, 2)]
    dtypes = ["<f4", "<f8", "<i8"]
    for i in range(20):
        shape = shapes[i % len(shapes)]
        dtype = dtypes[i % len(dtypes)]
        if dtype == "<i8":
            arr = rng.integers(-(2**40), 2**40, size=shape).astype(dtype)
        else:
            arr = (rng.standard_normal(size=shape) * 10.0 ** rng.integers(-3, 4)).astype(dtype)
        name = f"rand_{i:02d}.npy"
        np.save(out / name, arr)
        index.append({"file": name, "dtype": dtype, "shape": list(shape),
                      "values": [float(v) if dtype != "<i8" else int(v) for v in arr.ravel(order="C")],
                      "numpy_writer": True})

    base = np.arange(24, dtype="<f8").reshape(2, 3, 4) * 0.5 - 3.0
    np.save(out / "fortran.npy", np.asfortranarray(base))
    index.append({"file": "fortran.npy", "dtype": "<f8", "shape": [2, 3, 4],
                  "values": [float(v) for v in base.ravel()], "numpy_writer": False})

    with open(out / "v2.npy", "wb") as fh:
        np.lib.format.write_array(fh, base.astype("<f4"), version=(2, 0))
    index.append({"file": "v2.npy", "dtype": "<f4", "shape": [2, 3, 4],
                  "values": [float(v) for v in base.astype("<f4").ravel()], "numpy_writer": False})

    np.save(out / "single_zero.npy", np.array([0.0]))
    index.append({"file": "single_zero.npy", "dtype": "<f8", "shape": [1], "values": [0.0], "numpy_writer": True})

    np.save(out / "big_endian.npy", np.arange(3, dtype=">f8"))
    np.save(out / "int32.npy", np.arange(3, dtype="<i4"))
    (out / "index.json").write_text(json.dumps(index, indent=1) + "\n")


if __name__ == "__main__":
    main(Path(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures/npy"))
