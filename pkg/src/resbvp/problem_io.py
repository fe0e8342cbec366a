"""Problem-file schema: JSON documents describing a full boundary-value
problem (system generator, forcing, boundary condition, optional
nonlinearity, tolerances, solver options).

Parsing is strict: unknown generator/boundary/nonlinearity types and shape
mismatches raise ProblemFormatError with the offending field named. The
canonical dict round-trips: parse(dump(p)) equals p field for field.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import boundary as bd
from .linear import OperatorSequence
from .lotka_volterra import LotkaVolterraSpec, lv_callables

__all__ = ["ProblemFormatError", "Problem", "parse_problem", "load_problem",
           "canonical_json", "rotation_matrix"]

DEFAULT_TOLERANCES = {
    "classification": 1e-9,
    "rank": 1e-10,
    "newton": 1e-10,
    "iteration": 1e-10,
    "residual": 1e-8,
}

DEFAULT_SOLVER = {
    "c_init": None,
    "max_iter": 200,
    "newton_max_iter": 50,
    "blowup": 1e6,
}


class ProblemFormatError(ValueError):
    """Schema violation in a problem document."""


def rotation_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


@dataclass
class Problem:
    """Parsed problem: assembled objects plus the canonical source document."""

    dim: int
    horizon: int
    system: OperatorSequence
    forcing: np.ndarray
    boundary: bd.BoundaryOperator
    nonlinearity: tuple | None        # (Z, Z_du) callables
    nonlinearity_kind: str
    epsilon: float
    tolerances: dict
    solver: dict
    canonical: dict = field(repr=False)


def _need(doc: dict, key: str, where: str):
    if key not in doc:
        raise ProblemFormatError(f"{where}: missing required field '{key}'")
    return doc[key]


def _as_float_array(value, shape, where: str) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ProblemFormatError(f"{where}: not a numeric array") from exc
    if arr.shape != shape:
        raise ProblemFormatError(f"{where}: expected shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ProblemFormatError(f"{where}: entries must be finite")
    return arr


def _parse_system(doc: dict, dim: int, m: int) -> OperatorSequence:
    kind = _need(doc, "type", "system")
    if kind == "identity":
        return OperatorSequence.identity(dim, m)
    if kind == "fibonacci":
        if dim != 2:
            raise ProblemFormatError("system: fibonacci generator requires dim = 2")
        return OperatorSequence.constant(np.array([[1.0, 1.0], [1.0, 0.0]]), m)
    if kind == "rotation":
        if dim != 2:
            raise ProblemFormatError("system: rotation generator requires dim = 2")
        theta = float(_need(doc, "theta", "system"))
        return OperatorSequence.constant(rotation_matrix(theta), m)
    if kind == "constant":
        A = _as_float_array(_need(doc, "matrix", "system"), (dim, dim), "system.matrix")
        return OperatorSequence.constant(A, m)
    if kind == "explicit":
        A = _as_float_array(_need(doc, "matrices", "system"), (m, dim, dim), "system.matrices")
        return OperatorSequence(A)
    if kind == "block":
        if dim % 2:
            raise ProblemFormatError("system: block generator requires even dim")
        p = dim // 2
        seqs = {}
        for name in ("a", "b", "c", "d"):
            raw = np.asarray(_need(doc, name, "system"), dtype=float)
            if raw.shape == (p,):
                raw = np.broadcast_to(raw, (m, p)).copy()
            if raw.shape != (m, p):
                raise ProblemFormatError(
                    f"system.{name}: expected shape ({p},) or ({m}, {p}), got {raw.shape}")
            seqs[name] = raw
        A = np.zeros((m, dim, dim))
        for n in range(m):
            A[n, :p, :p] = np.diag(seqs["a"][n])
            A[n, :p, p:] = np.diag(seqs["b"][n])
            A[n, p:, :p] = np.diag(seqs["c"][n])
            A[n, p:, p:] = np.diag(seqs["d"][n])
        return OperatorSequence(A)
    raise ProblemFormatError(f"system: unknown generator type '{kind}'")


def _parse_boundary(doc: dict, dim: int, m: int) -> bd.BoundaryOperator:
    kind = _need(doc, "type", "boundary")
    if kind == "periodic":
        return bd.periodic(dim, m)
    if kind == "initial_mass":
        if dim % 2:
            raise ProblemFormatError("boundary: initial_mass requires even dim")
        return bd.initial_mass(dim // 2)
    if kind == "multipoint":
        groups_doc = _need(doc, "groups", "boundary")
        targets = _need(doc, "targets", "boundary")
        groups = []
        for i, g in enumerate(groups_doc):
            comps = _need(g, "components", f"boundary.groups[{i}]")
            points = _need(g, "points", f"boundary.groups[{i}]")
            for n in points:
                if not 0 <= int(n) <= m:
                    raise ProblemFormatError(
                        f"boundary.groups[{i}]: point {n} outside window [0, {m}]")
            groups.append(([int(x) for x in comps], [int(x) for x in points]))
        try:
            return bd.multipoint(dim, groups, targets)
        except ValueError as exc:
            raise ProblemFormatError(f"boundary: {exc}") from exc
    if kind == "generic":
        samples_doc = _need(doc, "samples", "boundary")
        target = np.asarray(_need(doc, "target", "boundary"), dtype=float)
        q = target.shape[0]
        samples = []
        for i, s in enumerate(samples_doc):
            n = int(_need(s, "point", f"boundary.samples[{i}]"))
            if not 0 <= n <= m:
                raise ProblemFormatError(
                    f"boundary.samples[{i}]: point {n} outside window [0, {m}]")
            L = _as_float_array(_need(s, "weights", f"boundary.samples[{i}]"),
                                (q, dim), f"boundary.samples[{i}].weights")
            samples.append((n, L))
        try:
            return bd.generic(samples, target)
        except ValueError as exc:
            raise ProblemFormatError(f"boundary: {exc}") from exc
    raise ProblemFormatError(f"boundary: unknown type '{kind}'")


def _parse_nonlinearity(doc: dict | None, dim: int):
    if doc is None or doc.get("type", "none") == "none":
        return None, "none"
    kind = doc["type"]
    if kind == "lotka_volterra":
        if dim % 2:
            raise ProblemFormatError("nonlinearity: lotka_volterra requires even dim")
        p = dim // 2
        def table(name, default, shape):
            raw = doc.get(name, default)
            arr = np.asarray(raw, dtype=float)
            if arr.ndim == 0:
                arr = np.full(shape, float(arr))
            return arr
        spec = LotkaVolterraSpec(
            pairs=p,
            g1=table("g1", 1.0, (p,)),
            g2=table("g2", 1.0, (p,)),
            a=table("a", 1.0, (p, p)),
            b=table("b", 1.0, (p, p)),
        )
        return lv_callables(spec), kind
    if kind == "polynomial":
        coeffs = [float(x) for x in _need(doc, "coeffs", "nonlinearity")]
        eps_grad = doc.get("eps_gradient")
        eps_grad = np.zeros(dim) if eps_grad is None else _as_float_array(
            eps_grad, (dim,), "nonlinearity.eps_gradient")

        def Z(z, n, eps):
            z = np.asarray(z, dtype=float)
            out = np.zeros_like(z)
            for k, ck in enumerate(coeffs):
                out += ck * z ** k
            return out + eps * eps_grad

        def Z_du(z, n, eps):
            z = np.asarray(z, dtype=float)
            diag = np.zeros_like(z)
            for k, ck in enumerate(coeffs[1:], start=1):
                diag += k * ck * z ** (k - 1)
            return np.diag(diag)

        return (Z, Z_du), kind
    raise ProblemFormatError(f"nonlinearity: unknown type '{kind}'")


def _canonicalize(doc: dict) -> dict:
    """Normalized copy of the document with defaults filled in."""
    out = {
        "dim": int(doc["dim"]),
        "horizon": int(doc["horizon"]),
        "system": dict(doc["system"]),
        "forcing": doc.get("forcing", "zero"),
        "boundary": dict(doc["boundary"]),
        "nonlinearity": dict(doc.get("nonlinearity") or {"type": "none"}),
        "epsilon": float(doc.get("epsilon", 0.0)),
        "tolerances": {**DEFAULT_TOLERANCES, **doc.get("tolerances", {})},
        "solver": {**DEFAULT_SOLVER, **doc.get("solver", {})},
    }
    return out


def parse_problem(doc: dict, source: str = "<dict>") -> Problem:
    if not isinstance(doc, dict):
        raise ProblemFormatError(f"{source}: top level must be an object")
    dim = int(_need(doc, "dim", source))
    m = int(_need(doc, "horizon", source))
    if dim < 1 or m < 1:
        raise ProblemFormatError(f"{source}: dim and horizon must be >= 1")
    system = _parse_system(_need(doc, "system", source), dim, m)
    forcing_doc = doc.get("forcing", "zero")
    if isinstance(forcing_doc, str):
        if forcing_doc != "zero":
            raise ProblemFormatError(f"forcing: unknown named forcing '{forcing_doc}'")
        forcing = np.zeros((m, dim))
    else:
        arr = np.asarray(forcing_doc, dtype=float)
        if arr.shape not in ((m, dim), (m + 1, dim)):
            raise ProblemFormatError(
                f"forcing: expected shape ({m}, {dim}) or ({m + 1}, {dim}), got {arr.shape}")
        forcing = arr[:m]
    boundary = _parse_boundary(_need(doc, "boundary", source), dim, m)
    nonlinearity, kind = _parse_nonlinearity(doc.get("nonlinearity"), dim)
    canonical = _canonicalize(doc)
    return Problem(
        dim=dim,
        horizon=m,
        system=system,
        forcing=forcing,
        boundary=boundary,
        nonlinearity=nonlinearity,
        nonlinearity_kind=kind,
        epsilon=float(doc.get("epsilon", 0.0)),
        tolerances={**DEFAULT_TOLERANCES, **doc.get("tolerances", {})},
        solver={**DEFAULT_SOLVER, **doc.get("solver", {})},
        canonical=canonical,
    )


def load_problem(path: str) -> Problem:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ProblemFormatError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return parse_problem(doc, source=path)


def canonical_json(problem: Problem) -> str:
    return json.dumps(problem.canonical, indent=2, sort_keys=True) + "\n"
