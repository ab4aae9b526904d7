"""Config document schema: parsing, validation, defaults.

Configs are JSON with exact rationals written as integers or "p/q" strings.
Unknown keys are rejected so typos fail loudly; every error names the field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping

from .algebra import LieAlgebraSpec, load_spec
from .errors import SchemaError
from .lattice import QuasiLatticeParams
from .rationals import parse_rational, parse_rational_vector
from .spectral import SpectrumBox


@dataclass(frozen=True)
class SpectrumConfig:
    box: SpectrumBox
    sup_tol: float = 1e-9
    measure_tol: float = 1e-9
    sublevel_tol: float = 5e-2
    eps_degenerate: float = 1e-12


@dataclass(frozen=True)
class LatticeConfig:
    q: tuple[Fraction, ...] | None = None
    b: tuple[Fraction, ...] | None = None
    onb_requested: bool = False
    precision_digits: int = 12


@dataclass(frozen=True)
class VerificationConfig:
    lam_grid: tuple[int, ...] = ()
    points_per_cell: tuple[int, ...] = ()
    cells_before: tuple[int, ...] = ()
    cells_after: tuple[int, ...] = ()
    m_half: tuple[int, ...] = ()
    k_half: tuple[int, ...] = ()
    n_half: tuple[int, ...] = ()
    ratio_tol: float = 1e-2
    defect_tol: float = 1e-3
    test_fields: int = 3
    piece_limit: int = 4096


@dataclass(frozen=True)
class OutputConfig:
    report_path: str | None = None
    field_path: str | None = None
    csv_path: str | None = None
    timing: bool = False


@dataclass(frozen=True)
class ConfigDocument:
    algebra: LieAlgebraSpec
    spectrum: SpectrumConfig
    lattice: LatticeConfig
    verification: VerificationConfig
    output: OutputConfig
    raw: dict


def _check_keys(obj: Mapping, allowed: set[str], path: str):
    unknown = set(obj) - allowed
    if unknown:
        raise SchemaError(path, f"unknown keys {sorted(unknown)}")


def _get_float(obj: Mapping, key: str, default: float, path: str) -> float:
    if key not in obj:
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"{path}.{key}", f"expected a number, got {v!r}")
    if v <= 0:
        raise SchemaError(f"{path}.{key}", "must be positive")
    return float(v)


def _get_int_vector(obj: Mapping, key: str, path: str, length: int | None = None):
    if key not in obj:
        return ()
    v = obj[key]
    if not isinstance(v, list) or not all(
        isinstance(x, int) and not isinstance(x, bool) for x in v
    ):
        raise SchemaError(f"{path}.{key}", "expected a list of integers")
    if length is not None and len(v) != length:
        raise SchemaError(f"{path}.{key}", f"expected {length} entries")
    return tuple(v)


def parse_config(source: str | Path | Mapping) -> ConfigDocument:
    """Load and validate a config document from a path, JSON text, or mapping."""
    if isinstance(source, Mapping):
        doc = dict(source)
    else:
        path = Path(source)
        try:
            text = path.read_text()
        except OSError as exc:
            raise SchemaError("config", f"cannot read {path}: {exc}") from None
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError("config", f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise SchemaError("config", "top level must be an object")
    _check_keys(doc, {"algebra", "spectrum", "lattice", "verification", "output", "label"}, "config")
    if "algebra" not in doc:
        raise SchemaError("config.algebra", "missing")
    algebra = load_spec(doc["algebra"], label=str(doc.get("label", "")))

    spectrum_raw = doc.get("spectrum", {})
    _check_keys(
        spectrum_raw,
        {"a", "sub_boxes", "sup_tol", "measure_tol", "sublevel_tol", "eps_degenerate"},
        "spectrum",
    )
    if "a" not in spectrum_raw:
        raise SchemaError("spectrum.a", "missing")
    a = parse_rational_vector(spectrum_raw["a"], algebra.center_dim, "spectrum.a")
    sub_boxes = []
    for i, entry in enumerate(spectrum_raw.get("sub_boxes", [])):
        if not isinstance(entry, dict) or set(entry) != {"lo", "hi"}:
            raise SchemaError(f"spectrum.sub_boxes[{i}]", "expected an object with lo and hi")
        lo = parse_rational_vector(entry["lo"], algebra.center_dim, f"spectrum.sub_boxes[{i}].lo")
        hi = parse_rational_vector(entry["hi"], algebra.center_dim, f"spectrum.sub_boxes[{i}].hi")
        sub_boxes.append((lo, hi))
    box = SpectrumBox(a=a, sub_boxes=tuple(sub_boxes))
    spectrum = SpectrumConfig(
        box=box,
        sup_tol=_get_float(spectrum_raw, "sup_tol", 1e-9, "spectrum"),
        measure_tol=_get_float(spectrum_raw, "measure_tol", 1e-9, "spectrum"),
        sublevel_tol=_get_float(spectrum_raw, "sublevel_tol", 5e-2, "spectrum"),
        eps_degenerate=_get_float(spectrum_raw, "eps_degenerate", 1e-12, "spectrum"),
    )

    lattice_raw = doc.get("lattice", {})
    _check_keys(lattice_raw, {"q", "b", "onb_requested", "precision_digits"}, "lattice")
    q = (
        parse_rational_vector(lattice_raw["q"], algebra.d, "lattice.q")
        if "q" in lattice_raw
        else None
    )
    b = (
        parse_rational_vector(lattice_raw["b"], algebra.d, "lattice.b")
        if "b" in lattice_raw
        else None
    )
    onb = lattice_raw.get("onb_requested", False)
    if not isinstance(onb, bool):
        raise SchemaError("lattice.onb_requested", "expected a boolean")
    digits = lattice_raw.get("precision_digits", 12)
    if not isinstance(digits, int) or isinstance(digits, bool) or digits < 1:
        raise SchemaError("lattice.precision_digits", "expected a positive integer")
    lattice = LatticeConfig(q=q, b=b, onb_requested=onb, precision_digits=digits)

    verification_raw = doc.get("verification", {})
    _check_keys(
        verification_raw,
        {
            "lam_grid",
            "points_per_cell",
            "cells_before",
            "cells_after",
            "m_half",
            "k_half",
            "n_half",
            "ratio_tol",
            "defect_tol",
            "test_fields",
            "piece_limit",
        },
        "verification",
    )
    test_fields = verification_raw.get("test_fields", 3)
    if not isinstance(test_fields, int) or isinstance(test_fields, bool) or test_fields < 1:
        raise SchemaError("verification.test_fields", "expected a positive integer")
    piece_limit = verification_raw.get("piece_limit", 4096)
    if not isinstance(piece_limit, int) or isinstance(piece_limit, bool) or piece_limit < 1:
        raise SchemaError("verification.piece_limit", "expected a positive integer")
    verification = VerificationConfig(
        lam_grid=_get_int_vector(verification_raw, "lam_grid", "verification", algebra.center_dim),
        points_per_cell=_get_int_vector(verification_raw, "points_per_cell", "verification", algebra.d),
        cells_before=_get_int_vector(verification_raw, "cells_before", "verification", algebra.d),
        cells_after=_get_int_vector(verification_raw, "cells_after", "verification", algebra.d),
        m_half=_get_int_vector(verification_raw, "m_half", "verification", algebra.center_dim),
        k_half=_get_int_vector(verification_raw, "k_half", "verification", algebra.d),
        n_half=_get_int_vector(verification_raw, "n_half", "verification", algebra.d),
        ratio_tol=_get_float(verification_raw, "ratio_tol", 1e-2, "verification"),
        defect_tol=_get_float(verification_raw, "defect_tol", 1e-3, "verification"),
        test_fields=test_fields,
        piece_limit=piece_limit,
    )

    output_raw = doc.get("output", {})
    _check_keys(output_raw, {"report_path", "field_path", "csv_path", "timing"}, "output")
    timing = output_raw.get("timing", False)
    if not isinstance(timing, bool):
        raise SchemaError("output.timing", "expected a boolean")
    output = OutputConfig(
        report_path=output_raw.get("report_path"),
        field_path=output_raw.get("field_path"),
        csv_path=output_raw.get("csv_path"),
        timing=timing,
    )
    return ConfigDocument(
        algebra=algebra,
        spectrum=spectrum,
        lattice=lattice,
        verification=verification,
        output=output,
        raw=doc,
    )


def resolve_params(config: ConfigDocument) -> QuasiLatticeParams | None:
    """Lattice parameters fully specified by the config, if any."""
    if config.lattice.q is not None and config.lattice.b is not None:
        return QuasiLatticeParams(
            a=tuple(config.spectrum.box.a), q=config.lattice.q, b=config.lattice.b
        )
    return None
