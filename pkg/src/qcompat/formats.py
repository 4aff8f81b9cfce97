"""Bit-exact file formats: matrix files, report files, witness files.

All files are JSON documents under schema version ``qcompat-1``.  Complex
numbers are written as explicit ``[re, im]`` pairs and every number is
emitted with 17 significant digits, which round-trips double precision
losslessly; emission is canonical, so identical values always serialize to
identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO

import numpy as np

from .compat import CompatReport
from .errors import MalformedFile, SchemaVersionUnsupported, ShapeMismatch
from .linalg import Subspace, Tolerances
from .states import PureState
from .witness import SharedDecomposition, WitnessState

__all__ = [
    "SCHEMA_VERSION",
    "ParsedReport",
    "dumps_canonical",
    "parse_matrix",
    "serialize_matrix",
    "report_document",
    "parse_report_document",
    "load_report",
]

SCHEMA_VERSION = "qcompat-1"


# ---------------------------------------------------------------------------
# canonical JSON emission

def _emit_number(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    value = float(x)
    if not np.isfinite(value):
        raise ValueError(f"cannot serialize non-finite number {value!r}")
    return format(value, ".17g")


def _is_scalar(x) -> bool:
    return x is None or isinstance(
        x, (bool, int, float, str, np.bool_, np.integer, np.floating)
    )


def _is_flat(x) -> bool:
    """Lists up to two levels deep with scalar leaves stay on one line."""
    if _is_scalar(x):
        return True
    if isinstance(x, (list, tuple)):
        return all(
            _is_scalar(e) or (isinstance(e, (list, tuple)) and all(_is_scalar(f) for f in e))
            for e in x
        )
    return False


def _emit(x, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if x is None:
        return "null"
    if isinstance(x, (bool, int, float, np.bool_, np.integer, np.floating)):
        return _emit_number(x)
    if isinstance(x, str):
        return json.dumps(x)
    if isinstance(x, (list, tuple)):
        if len(x) == 0:
            return "[]"
        if _is_flat(x):
            return "[" + ", ".join(_emit(e, 0) for e in x) + "]"
        body = ",\n".join(inner + _emit(e, indent + 1) for e in x)
        return "[\n" + body + "\n" + pad + "]"
    if isinstance(x, dict):
        if len(x) == 0:
            return "{}"
        body = ",\n".join(
            f"{inner}{json.dumps(str(k))}: {_emit(v, indent + 1)}" for k, v in x.items()
        )
        return "{\n" + body + "\n" + pad + "}"
    raise TypeError(f"cannot serialize value of type {type(x).__name__}")


def dumps_canonical(doc: dict) -> str:
    """Serialize a document deterministically (insertion-ordered keys)."""
    return _emit(doc, 0) + "\n"


# ---------------------------------------------------------------------------
# complex payload helpers

def _vector_to_pairs(v: np.ndarray) -> list:
    return [[float(c.real), float(c.imag)] for c in np.asarray(v, dtype=complex)]


def _matrix_to_pairs(m: np.ndarray) -> list:
    return [_vector_to_pairs(row) for row in np.asarray(m, dtype=complex)]


def _pair_to_complex(entry, where: str) -> complex:
    if (
        not isinstance(entry, (list, tuple))
        or len(entry) != 2
        or any(isinstance(c, bool) or not isinstance(c, (int, float)) for c in entry)
    ):
        raise MalformedFile(f"{where}: expected a [re, im] number pair, got {entry!r}")
    value = complex(float(entry[0]), float(entry[1]))
    if not (np.isfinite(value.real) and np.isfinite(value.imag)):
        raise MalformedFile(f"{where}: non-finite entry {entry!r}")
    return value


def _pairs_to_vector(pairs, where: str) -> np.ndarray:
    if not isinstance(pairs, list) or not pairs:
        raise MalformedFile(f"{where}: expected a nonempty list of [re, im] pairs")
    return np.array(
        [_pair_to_complex(e, f"{where}[{k}]") for k, e in enumerate(pairs)], dtype=complex
    )


def _load_json(source) -> dict:
    try:
        if hasattr(source, "read"):
            doc = json.load(source)
        else:
            with open(source, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
    except json.JSONDecodeError as e:
        raise MalformedFile(f"invalid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise MalformedFile(f"expected a JSON object at top level, got {type(doc).__name__}")
    return doc


def _check_schema(doc: dict) -> None:
    version = doc.get("schema_version")
    if version is None:
        raise MalformedFile("missing required field 'schema_version'")
    if version != SCHEMA_VERSION:
        raise SchemaVersionUnsupported(
            f"schema_version {version!r} unsupported; this build reads {SCHEMA_VERSION!r}"
        )


# ---------------------------------------------------------------------------
# matrix files

def parse_matrix(source: str | Path | IO) -> tuple[np.ndarray, str | None]:
    """Read a matrix file (path or stream); returns (matrix, label).

    Every decimal entry is parsed exactly into binary via the platform's
    correctly rounded float conversion.

    Raises
    ------
    MalformedFile, SchemaVersionUnsupported, ShapeMismatch
    """
    doc = _load_json(source)
    _check_schema(doc)

    dim = doc.get("dim")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise MalformedFile(f"field 'dim' must be a positive integer, got {dim!r}")

    entries = doc.get("entries")
    if not isinstance(entries, list):
        raise MalformedFile("field 'entries' must be a list of rows")
    if len(entries) != dim:
        raise ShapeMismatch(f"expected {dim} rows, got {len(entries)}")
    matrix = np.zeros((dim, dim), dtype=complex)
    for i, row in enumerate(entries):
        if not isinstance(row, list):
            raise MalformedFile(f"entries[{i}]: expected a list of [re, im] pairs")
        if len(row) != dim:
            raise ShapeMismatch(f"entries[{i}]: expected {dim} columns, got {len(row)}")
        for j, entry in enumerate(row):
            matrix[i, j] = _pair_to_complex(entry, f"entries[{i}][{j}]")

    label = doc.get("label")
    if label is not None and not isinstance(label, str):
        raise MalformedFile(f"field 'label' must be a string, got {label!r}")
    return matrix, label


def serialize_matrix(matrix: np.ndarray, label: str | None = None) -> str:
    """Canonical matrix-file text for a square complex matrix."""
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    doc: dict = {"schema_version": SCHEMA_VERSION, "dim": int(m.shape[0])}
    if label is not None:
        doc["label"] = label
    doc["entries"] = _matrix_to_pairs(m)
    return dumps_canonical(doc)


# ---------------------------------------------------------------------------
# report / witness files

def _tolerances_doc(tol: Tolerances) -> dict:
    return {
        "hermiticity_tol": tol.hermiticity_tol,
        "eigenvalue_zero_tol": tol.eigenvalue_zero_tol,
        "trace_tol": tol.trace_tol,
        "overlap_tol": tol.overlap_tol,
    }


def _decomposition_doc(d: SharedDecomposition) -> dict:
    return {
        "chi": _vector_to_pairs(d.chi.amplitudes),
        "p0": d.p0,
        "q0": d.q0,
        "rest_a": [
            {"weight": w, "state": _vector_to_pairs(s.amplitudes)} for w, s in d.rest_a
        ],
        "rest_b": [
            {"weight": w, "state": _vector_to_pairs(s.amplitudes)} for w, s in d.rest_b
        ],
    }


def report_document(
    report: CompatReport,
    inputs: list[str],
    decomposition: SharedDecomposition | None = None,
    witness: WitnessState | None = None,
) -> dict:
    """Assemble the full report document (insertion order is the schema order)."""
    doc: dict = {
        "schema_version": SCHEMA_VERSION,
        "inputs": list(inputs),
        "report": {
            "dim": report.intersection_basis.ambient_dim,
            "n_states": report.n_states,
            "verdict_bfm": report.verdict_bfm,
            "verdict_pi": report.verdict_pi,
            "verdict_pii": report.verdict_pii,
            "intersection_dim": report.intersection_dim,
            "intersection_basis": [
                _vector_to_pairs(report.intersection_basis.basis[:, k])
                for k in range(report.intersection_dim)
            ],
            "commutator_norm": report.commutator_norm,
            "product_norm": report.product_norm,
            "pairwise_conjunction": report.pairwise_conjunction,
        },
        "tolerances_used": _tolerances_doc(report.tolerances_used),
    }
    if decomposition is not None:
        doc["decomposition"] = _decomposition_doc(decomposition)
    if witness is not None:
        doc["witness"] = {
            "dims": list(witness.dims),
            "normalization": witness.normalization,
            "amplitudes": _vector_to_pairs(witness.amplitudes.amplitudes),
        }
    return doc


@dataclass(frozen=True)
class ParsedReport:
    """Deserialized report file."""

    inputs: tuple[str, ...]
    report: CompatReport
    decomposition: SharedDecomposition | None
    witness: WitnessState | None


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise MalformedFile(f"{where}: missing required field {key!r}")
    return doc[key]


def _parse_tolerances(doc, where: str) -> Tolerances:
    if not isinstance(doc, dict):
        raise MalformedFile(f"{where}: expected an object")
    try:
        return Tolerances(
            hermiticity_tol=float(_require(doc, "hermiticity_tol", where)),
            eigenvalue_zero_tol=float(_require(doc, "eigenvalue_zero_tol", where)),
            trace_tol=float(_require(doc, "trace_tol", where)),
            overlap_tol=float(_require(doc, "overlap_tol", where)),
        )
    except (TypeError, ValueError) as e:
        raise MalformedFile(f"{where}: {e}") from e


def _parse_components(items, where: str, dim: int) -> tuple:
    if not isinstance(items, list):
        raise MalformedFile(f"{where}: expected a list")
    out = []
    for k, item in enumerate(items):
        if not isinstance(item, dict):
            raise MalformedFile(f"{where}[{k}]: expected an object")
        weight = _require(item, "weight", f"{where}[{k}]")
        if isinstance(weight, bool) or not isinstance(weight, (int, float)):
            raise MalformedFile(f"{where}[{k}]: weight must be a number")
        vec = _pairs_to_vector(_require(item, "state", f"{where}[{k}]"), f"{where}[{k}].state")
        if vec.shape[0] != dim:
            raise ShapeMismatch(f"{where}[{k}].state: expected dimension {dim}")
        out.append((float(weight), _pure(vec, f"{where}[{k}].state")))
    return tuple(out)


def _pure(vec: np.ndarray, where: str) -> PureState:
    try:
        return PureState(vec)
    except ValueError as e:
        raise MalformedFile(f"{where}: {e}") from e


def _parse_decomposition(doc, where: str) -> SharedDecomposition:
    if not isinstance(doc, dict):
        raise MalformedFile(f"{where}: expected an object")
    chi_vec = _pairs_to_vector(_require(doc, "chi", where), f"{where}.chi")
    dim = chi_vec.shape[0]
    try:
        return SharedDecomposition(
            chi=_pure(chi_vec, f"{where}.chi"),
            p0=float(_require(doc, "p0", where)),
            q0=float(_require(doc, "q0", where)),
            rest_a=_parse_components(_require(doc, "rest_a", where), f"{where}.rest_a", dim),
            rest_b=_parse_components(_require(doc, "rest_b", where), f"{where}.rest_b", dim),
        )
    except (TypeError, ValueError) as e:
        raise MalformedFile(f"{where}: {e}") from e


def parse_report_document(doc: dict) -> ParsedReport:
    """Rebuild report, decomposition, and witness objects from a document.

    Re-validates every structural invariant on the way in, so a corrupted
    file cannot round-trip into an inconsistent object.
    """
    _check_schema(doc)
    inputs = doc.get("inputs", [])
    if not isinstance(inputs, list) or any(not isinstance(s, str) for s in inputs):
        raise MalformedFile("field 'inputs' must be a list of strings")

    rep = _require(doc, "report", "document")
    if not isinstance(rep, dict):
        raise MalformedFile("field 'report' must be an object")
    dim = _require(rep, "dim", "report")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise MalformedFile(f"report.dim must be a positive integer, got {dim!r}")
    basis_pairs = _require(rep, "intersection_basis", "report")
    if not isinstance(basis_pairs, list):
        raise MalformedFile("report.intersection_basis must be a list of vectors")
    vectors = [
        _pairs_to_vector(v, f"report.intersection_basis[{k}]")
        for k, v in enumerate(basis_pairs)
    ]
    for k, v in enumerate(vectors):
        if v.shape[0] != dim:
            raise ShapeMismatch(f"report.intersection_basis[{k}]: expected dimension {dim}")
    basis = (
        np.column_stack(vectors) if vectors else np.zeros((dim, 0), dtype=complex)
    )
    tolerances = _parse_tolerances(_require(doc, "tolerances_used", "document"), "tolerances_used")
    try:
        report = CompatReport(
            verdict_bfm=bool(_require(rep, "verdict_bfm", "report")),
            verdict_pi=bool(_require(rep, "verdict_pi", "report")),
            verdict_pii=bool(_require(rep, "verdict_pii", "report")),
            intersection_dim=int(_require(rep, "intersection_dim", "report")),
            intersection_basis=Subspace(dim, basis),
            commutator_norm=float(_require(rep, "commutator_norm", "report")),
            product_norm=float(_require(rep, "product_norm", "report")),
            tolerances_used=tolerances,
            n_states=int(_require(rep, "n_states", "report")),
            pairwise_conjunction=bool(_require(rep, "pairwise_conjunction", "report")),
        )
    except (TypeError, ValueError) as e:
        raise MalformedFile(f"report: {e}") from e

    decomposition = None
    if "decomposition" in doc:
        decomposition = _parse_decomposition(doc["decomposition"], "decomposition")

    witness = None
    if "witness" in doc:
        wdoc = doc["witness"]
        if not isinstance(wdoc, dict):
            raise MalformedFile("field 'witness' must be an object")
        if decomposition is None:
            raise MalformedFile("witness section requires a decomposition section")
        dims = _require(wdoc, "dims", "witness")
        if (
            not isinstance(dims, list)
            or len(dims) != 3
            or any(isinstance(d, bool) or not isinstance(d, int) or d < 1 for d in dims)
        ):
            raise MalformedFile("witness.dims must be three positive integers")
        amps = _pairs_to_vector(_require(wdoc, "amplitudes", "witness"), "witness.amplitudes")
        norm = _require(wdoc, "normalization", "witness")
        if isinstance(norm, bool) or not isinstance(norm, (int, float)):
            raise MalformedFile("witness.normalization must be a number")
        try:
            witness = WitnessState(
                dims=(dims[0], dims[1], dims[2]),
                amplitudes=_pure(amps, "witness.amplitudes"),
                normalization=float(norm),
                decomposition=decomposition,
            )
        except ValueError as e:
            raise MalformedFile(f"witness: {e}") from e

    return ParsedReport(
        inputs=tuple(inputs),
        report=report,
        decomposition=decomposition,
        witness=witness,
    )


def load_report(source: str | Path | IO) -> ParsedReport:
    """Read and rebuild a report/witness file from a path or stream."""
    return parse_report_document(_load_json(source))
