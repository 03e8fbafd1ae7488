"""JSON encodings shared by the library and the CLI.

Complex entries are ``{"re": float, "im": float}`` objects and matrices are
row-major lists of rows. Floats are written with ``repr`` precision, so a
write/read round trip is exact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .exceptions import ValidationError
from .gram import StateSet, as_gram, gram_from_states
from .linalg import hermitian


def complex_to_json(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def complex_from_json(obj) -> complex:
    if isinstance(obj, (int, float)):
        return complex(obj)
    try:
        return complex(float(obj["re"]), float(obj.get("im", 0.0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"bad complex entry {obj!r}") from exc


def matrix_to_json(a) -> list:
    return [[complex_to_json(z) for z in row] for row in np.asarray(a)]


def matrix_from_json(rows, *, name: str = "matrix") -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ValidationError(f"{name} must be a non-empty list of rows")
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ValidationError(f"{name} row {i} has {len(row)} entries, expected {width}")
    return np.array([[complex_from_json(z) for z in row] for row in rows], dtype=complex)


def gram_to_json(g) -> dict:
    g = np.asarray(g)
    return {"n": int(g.shape[0]), "entries": matrix_to_json(g)}


def gram_from_json(obj) -> np.ndarray:
    if "entries" not in obj:
        raise ValidationError("Gram JSON needs an 'entries' field")
    g = matrix_from_json(obj["entries"], name="entries")
    n = obj.get("n", g.shape[0])
    if g.shape != (n, n):
        raise ValidationError(f"declared n={n} but entries have shape {g.shape}")
    return as_gram(g)


def states_to_json(s: StateSet) -> dict:
    return {"d": s.d, "states": [[complex_to_json(z) for z in s.state(i)] for i in range(s.n)]}


def states_from_json(obj) -> StateSet:
    if "states" not in obj:
        raise ValidationError("state-set JSON needs a 'states' field")
    rows = obj["states"]
    vecs = matrix_from_json(rows, name="states")
    d = obj.get("d", vecs.shape[1])
    if vecs.shape[1] != d:
        raise ValidationError(f"declared d={d} but states have length {vecs.shape[1]}")
    return StateSet(vecs.T)


def read_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: line {exc.lineno}: {exc.msg}") from exc


def write_json(path, obj) -> None:
    text = json.dumps(obj, indent=2) + "\n"
    if str(path) == "-":
        print(text, end="")
    else:
        Path(path).write_text(text)


def load_input(path) -> tuple[np.ndarray, StateSet | None]:
    """Read a Gram file or a state-set file; returns ``(G, states or None)``."""
    obj = read_json(path)
    if not isinstance(obj, dict):
        raise ValidationError(f"{path}: top level must be a JSON object")
    if "states" in obj:
        s = states_from_json(obj)
        return gram_from_states(s), s
    return gram_from_json(obj), None


def load_hermitian(path) -> np.ndarray:
    """Like :func:`load_input` but accepts any Hermitian ``entries`` matrix.

    Certificates are meaningful for general Hermitian matrices, so the
    verifier does not insist on a unit diagonal.
    """
    obj = read_json(path)
    if not isinstance(obj, dict):
        raise ValidationError(f"{path}: top level must be a JSON object")
    if "states" in obj:
        return gram_from_states(states_from_json(obj))
    if "entries" not in obj:
        raise ValidationError(f"{path}: expected an 'entries' or 'states' field")
    g = matrix_from_json(obj["entries"], name="entries")
    if g.shape[0] != g.shape[1]:
        raise ValidationError(f"{path}: entries must be square, got {g.shape}")
    return hermitian(g, name="entries")
