"""JSON documents for lines, masses, projection systems and designs.

Complex entries are ``[re, im]`` pairs; matrices are flat row-major lists
of such pairs.  Floats go through ``repr`` (shortest round-trip form), so
parsing the output gives back the exact doubles.
"""

from __future__ import annotations

import json

import numpy as np

from .weyl import GfWeylLabel, LineLabel, ProjectionSystem


def complex_json(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def matrix_json(M) -> list:
    M = np.asarray(M, dtype=complex)
    return [[float(z.real), float(z.imag)] for z in M.ravel()]


def matrix_from_json(data, dim: int | None = None) -> np.ndarray:
    arr = np.array([complex(re, im) for re, im in data])
    dim = dim or int(round(np.sqrt(len(arr))))
    return arr.reshape(dim, dim)


def label_json(label):
    if isinstance(label, GfWeylLabel):
        return label.to_json()
    if isinstance(label, LineLabel):
        return {"character": list(label.character), "shift": label.shift}
    if isinstance(label, tuple):
        return [label_json(x) for x in label]
    if isinstance(label, (np.integer,)):
        return int(label)
    return label


def projection_system_json(ps: ProjectionSystem) -> list[dict]:
    return [{"label": label_json(l), "matrix": matrix_json(P)} for l, P in zip(ps.labels, ps.projections)]


def design_json(design, seed: int | None = None, matrices: bool = True) -> dict:
    """The design document: club, Q, kept, dropped, size, bound, completeness."""
    red = design.reduced
    club = []
    for v, meas in enumerate(design.measurements):
        rec = {"v": v, "mass": meas.source.to_json() if meas.source is not None else None,
               "labels": [label_json(l) for l in meas.labels]}
        if matrices:
            rec["projections"] = [matrix_json(P) for P in meas.projections]
        club.append(rec)
    Q = []
    for c, cl in enumerate(design.clubs):
        rec = {
            "club": c,
            "members": list(cl.members),
            "generator": label_json(cl.constraint.generator),
            "tau": cl.constraint.tau,
            "ranks": cl.constraint.ranks,
        }
        if matrices:
            rec["blocks"] = [matrix_json(B) for B in cl.constraint.blocks]
        Q.append(rec)
    doc = {
        "d": design.d,
        "basis": design.basis,
        "delta": design.delta,
        "cover_exact": design.cover.exact,
        "club": club,
        "Q": Q,
        "kept": [{"v": v, "j": j} for v, j in red.kept],
        "dropped": [x.to_json() for x in red.dropped],
        "unreduced_size": design.unreduced_size,
        "unreduced_operator_count": design.delta * (design.d - 1),
        "size": design.size,
        "bound": design.bound,
        "within_bound": design.within_bound,
        "complete": red.complete,
        "rank": red.completeness_rank,
    }
    if seed is not None:
        doc["seed"] = seed
    return doc


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=False, allow_nan=False) + "\n"
