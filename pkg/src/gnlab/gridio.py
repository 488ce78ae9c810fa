"""Serialization of grid functions.

Binary container: 8-byte magic, little-endian uint64 header length, UTF-8
JSON header (dim, box, shape, family metadata, interpolation flag), then the
samples as little-endian float64 in row-major order.  CSV export is offered
for n <= 2 (coordinates plus value per row).
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Union

import numpy as np

from .gridfn import FamilySpec, GridFunction

MAGIC = b"GNLABGF1"


def save_gridfn(u: GridFunction, path: Union[str, Path]) -> None:
    header = {
        "dim": u.dim,
        "box": [[lo, hi] for lo, hi in u.box],
        "shape": list(u.shape),
        "family": u.family.to_json() if u.family is not None else None,
        "interpolated": u.interpolated,
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        fh.write(np.ascontiguousarray(u.samples, dtype="<f8").tobytes())


def load_gridfn(path: Union[str, Path]) -> GridFunction:
    with open(path, "rb") as fh:
        magic = fh.read(len(MAGIC))
        if magic != MAGIC:
            raise ValueError(f"not a grid-function file: bad magic {magic!r}")
        (hlen,) = struct.unpack("<Q", fh.read(8))
        header = json.loads(fh.read(hlen).decode("utf-8"))
        shape = tuple(header["shape"])
        count = int(np.prod(shape))
        samples = np.frombuffer(fh.read(count * 8), dtype="<f8").reshape(shape)
    family = header.get("family")
    return GridFunction(
        dim=header["dim"],
        box=tuple((lo, hi) for lo, hi in header["box"]),
        shape=shape,
        samples=np.array(samples),
        family=FamilySpec.from_json(family) if family else None,
        interpolated=bool(header.get("interpolated", False)),
    )


def export_csv(u: GridFunction, path: Union[str, Path]) -> None:
    if u.dim > 2:
        raise ValueError("CSV export supports only 1-D and 2-D grids")
    axes = u.axes()
    with open(path, "w", encoding="utf-8") as fh:
        if u.dim == 1:
            fh.write("x,value\n")
            for x, v in zip(axes[0], u.samples):
                fh.write(f"{x!r},{v!r}\n")
        else:
            fh.write("x,y,value\n")
            for i, x in enumerate(axes[0]):
                for j, y in enumerate(axes[1]):
                    fh.write(f"{x!r},{y!r},{u.samples[i, j]!r}\n")
