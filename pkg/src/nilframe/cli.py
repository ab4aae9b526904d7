"""Command-line pipeline: validate, analyze, design, synthesize, verify, examples.

Reports are deterministic JSON (sorted keys, exact rationals as "p/q"
strings, binary64 values as shortest round-trip decimals).  Exit codes:
0 all requested checks pass, 2 a mathematical condition failed, 3 input
error, 4 a certification budget ran out before reaching tolerance.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import jump_indices, validate_class
from .config import ConfigDocument, parse_config, resolve_params
from .errors import (
    CertificationError,
    DensityViolationError,
    NilframeError,
    PieceOverflowError,
    SchemaError,
)
from .lattice import (
    QuasiLatticeParams,
    check_density_condition,
    check_onb_condition,
    check_wavelet_discretization,
    design_params,
)
from .polynomial import determinant
from .rationals import format_rational
from .spectral import (
    build_matrices,
    pfaffian_identity_check,
    spectral_measure,
    sup_density,
)
from .verify import (
    TruncationSpec,
    bump_profile,
    fiber_parseval_defect,
    frame_energy_ratio,
    gaussian_profile,
    gram_orthonormality_check,
    make_aligned_grid,
    make_test_field,
    window_tiling_check,
)
from .windows import build_generator_field, field_to_document

EXIT_PASS = 0
EXIT_CONDITION = 2
EXIT_INPUT = 3
EXIT_CERTIFICATION = 4

COMMANDS = ("validate", "analyze", "design", "synthesize", "verify", "examples")


# ---------------------------------------------------------------------------
# pipeline stages
# ---------------------------------------------------------------------------


def _stage_validate(config: ConfigDocument, report: dict) -> bool:
    rep = validate_class(config.algebra)
    report["validation"] = rep.as_dict()
    if rep.passed:
        report["validation"]["jump_indices"] = list(jump_indices(config.algebra))
    return rep.passed


def _stage_analyze(config: ConfigDocument, report: dict) -> bool:
    mats = build_matrices(config.algebra)
    det_b = determinant(mats.modulation)
    pfaffian = pfaffian_identity_check(mats.jump_block, mats.modulation)
    sup = sup_density(det_b, config.spectrum.box, tol=config.spectrum.sup_tol)
    mu = spectral_measure(det_b, config.spectrum.box, tol=config.spectrum.measure_tol)
    report["spectral"] = {
        "det_b": det_b.coefficient_list(),
        "pfaffian": pfaffian.as_dict(),
        "sup_density": sup.as_dict(),
        "measure": mu.as_dict(),
    }
    report["_sup"] = sup
    report["_mu"] = mu
    report["_det_b"] = det_b
    return pfaffian.passed


def _stage_design(config: ConfigDocument, report: dict) -> bool:
    sup = report["_sup"]
    mu = report["_mu"]
    box = config.spectrum.box
    fixed = resolve_params(config)
    if fixed is not None:
        params = fixed
    else:
        params, sup = design_params(
            config.algebra,
            box,
            q_hint=config.lattice.q,
            sup_tol=config.spectrum.sup_tol,
            precision_digits=config.lattice.precision_digits,
        )
    density = check_density_condition(config.algebra, params, box, sup_result=sup)
    onb = check_onb_condition(params, mu)
    wavelet = check_wavelet_discretization(
        config.algebra,
        params,
        box,
        measure_tol=config.spectrum.sublevel_tol,
    )
    predicted_norm_sq = mu.value / float(params.prod_q * params.prod_b * params.prod_a)
    report["design"] = {
        "params": params.as_dict(),
        "predicted_generator_norm_sq": predicted_norm_sq,
        "conditions": [density.as_dict(), onb.as_dict(), wavelet.as_dict()],
    }
    report["_params"] = params
    ok = density.passed
    if config.lattice.onb_requested:
        ok = ok and onb.passed
    return ok


def _stage_synthesize(config: ConfigDocument, report: dict, out_path: str | None) -> bool:
    params: QuasiLatticeParams = report["_params"]
    box = config.spectrum.box
    density = next(c for c in report["design"]["conditions"] if c["condition"] == "density")
    if not density["passed"]:
        report["synthesis"] = {"refused": "density condition fails; no window can be Parseval"}
        return False
    v = config.algebra.center_dim
    grid = config.verification.lam_grid or (16,) * v
    field = build_generator_field(
        config.algebra,
        params,
        box,
        grid_shape=grid,
        role="frame",
        mu_box=report["_mu"],
        eps_degenerate=config.spectrum.eps_degenerate,
        piece_limit=config.verification.piece_limit,
    )
    doc = field_to_document(field)
    target = out_path or config.output.field_path
    if target:
        Path(target).write_text(canonical_json(doc))
    report["synthesis"] = {
        "nodes": len(field.nodes),
        "skipped": len(field.skipped),
        "max_pieces": max((n.window.piece_count for n in field.nodes), default=0),
        "predicted_norm_sq": field.predicted_norm_sq,
        "grid_measured_norm_sq": field.grid_measured_norm_sq(),
        "field_path": target,
    }
    report["_field"] = field
    return True


def _default_trunc(config: ConfigDocument) -> TruncationSpec:
    v = config.algebra.center_dim
    d = config.algebra.d
    default_kn = 16 if d == 1 else 4
    return TruncationSpec(
        m_half=config.verification.m_half or (32,) * v,
        k_half=config.verification.k_half or (default_kn,) * d,
        n_half=config.verification.n_half or (default_kn,) * d,
    )


def _stage_verify(config: ConfigDocument, report: dict) -> bool:
    field = report["_field"]
    params: QuasiLatticeParams = report["_params"]
    spec = config.algebra
    d = spec.d
    box = config.spectrum.box
    ppc = config.verification.points_per_cell or (52,) * d
    before = config.verification.cells_before or (2,) * d
    after = config.verification.cells_after or (3,) * d
    x_grid = make_aligned_grid(params.b, before, after, ppc)
    trunc = _default_trunc(config)

    tiling = window_tiling_check(
        [(n.window, n.lattice) for n in field.nodes[: min(len(field.nodes), 8)]],
        resolution=7 if d == 1 else 3,
    )

    # per-fiber defects with a Gaussian concentrated in the base cell; only
    # fibers in the top-density half are probed, since the truncated
    # modulation range cannot cover the test bandwidth on near-degenerate
    # fibers (their lattice spacing collapses with the density)
    mesh = x_grid.mesh()
    centers = [0.5 / float(params.b[k]) for k in range(d)]
    widths = [0.08 / float(params.b[k]) for k in range(d)]
    test = np.asarray(gaussian_profile(centers, widths)(mesh), dtype=complex)
    eligible = sorted(field.nodes, key=lambda n: abs(float(n.lattice.det_b)), reverse=True)
    eligible = eligible[: max(1, len(eligible) // 2)]
    probe = sorted({0, len(eligible) // 2, len(eligible) - 1})
    defects = []
    for idx in probe:
        node = eligible[idx]
        rep = fiber_parseval_defect(spec, params, node, [test], trunc, x_grid)
        defects.append((node.lam, rep.defect))
    defect_values = [dval for _, dval in defects]

    ratios = []
    (lo, hi), = box.region()
    for i in range(config.verification.test_fields):
        lam_center = float(lo[0] + (hi[0] - lo[0]) * Fraction(45 + 7 * i, 100))
        psi = make_test_field(
            spec,
            box,
            field.grid_shape,
            x_grid,
            spectral_profile=bump_profile(lam_center, 0.1 * float(hi[0] - lo[0])),
            space_profile=gaussian_profile(
                [c - 0.02 * i for c in centers], [w * (1.0 + 0.15 * i) for w in widths]
            ),
        )
        ratios.append(frame_energy_ratio(psi, field, spec, params, trunc))

    gram = None
    if config.lattice.onb_requested:
        small = TruncationSpec(
            m_half=(0,) * spec.center_dim, k_half=(1,) * d, n_half=(1,) * d
        )
        gram = gram_orthonormality_check(field, params, small)

    if config.output.csv_path:
        with open(config.output.csv_path, "w") as fh:
            fh.write("lam,defect\n")
            for lam, dval in defects:
                fh.write(f"\"{';'.join(format_rational(x) for x in lam)}\",{dval!r}\n")

    ratio_ok = all(abs(r.ratio - 1.0) <= config.verification.ratio_tol for r in ratios)
    defect_ok = max(defect_values) <= config.verification.defect_tol
    passed = tiling.passed and ratio_ok and defect_ok
    report["verification"] = {
        "tiling": tiling.as_dict(),
        "fiber_defects": {
            "max": max(defect_values),
            "mean": sum(defect_values) / len(defect_values),
            "probed_nodes": len(defects),
        },
        "frame_ratios": [r.as_dict() for r in ratios],
        "gram": gram.as_dict() if gram is not None else None,
        "passed": passed,
    }
    return passed


# ---------------------------------------------------------------------------
# bundled examples
# ---------------------------------------------------------------------------


def fixture_path(name: str) -> Path:
    return Path(__file__).parent / "fixtures" / name


_EX2_DET = [[[0, 2], "-1"], [[2, 0], "1"]]
_EX3_DET = [[[0, 0, 3], "-1"], [[0, 3, 0], "-1"], [[1, 1, 1], "3"], [[3, 0, 0], "-1"]]


def _run_example_1() -> tuple[dict, bool]:
    config = parse_config(fixture_path("heisenberg.json"))
    report: dict = {}
    ok = _stage_validate(config, report) and _stage_analyze(config, report)
    ok = _stage_design(config, report) and ok
    conditions = {c["condition"]: c for c in report["design"]["conditions"]}
    density = conditions["density"]
    onb = conditions["orthonormal_basis"]
    checks = {
        "density_passes_at_unit_q": density["passed"],
        "onb_fails": not onb["passed"],
        "onb_required_q": onb["margins"].get("required_uniform_q") == "1/2",
        "onb_q_conflicts_with_density": onb["margins"].get("required_q_density_compatible")
        is False,
    }
    out = {
        "label": "heisenberg",
        "checks": checks,
        "design": report["design"],
        "matches": all(checks.values()) and ok,
    }
    return out, out["matches"]


def _run_example_2() -> tuple[dict, bool]:
    config = parse_config(fixture_path("example2.json"))
    report: dict = {}
    ok = _stage_validate(config, report) and _stage_analyze(config, report)
    ok = _stage_design(config, report) and ok
    mu = report["_mu"]
    sup = report["_sup"]
    conditions = {c["condition"]: c for c in report["design"]["conditions"]}
    checks = {
        "det_b": report["spectral"]["det_b"] == _EX2_DET,
        "sup_is_nine": abs(sup.value - 9.0) <= 1e-9,
        "measure_46_3": mu.lower <= Fraction(46, 3) <= mu.upper
        and float(mu.upper - mu.lower) <= 1e-6,
        "designed_lattice": report["design"]["params"]
        == {"a": ["2", "3"], "q": ["1", "1"], "b": ["3", "3"]},
        "predicted_norm_sq": abs(
            report["design"]["predicted_generator_norm_sq"] - 23.0 / 81.0
        )
        <= 1e-9,
        "onb_fails_46_3_vs_54": not conditions["orthonormal_basis"]["passed"]
        and conditions["orthonormal_basis"]["margins"]["target"] == 54.0,
    }
    out = {
        "label": "example2",
        "checks": checks,
        "design": report["design"],
        "matches": all(checks.values()) and ok,
    }
    return out, out["matches"]


def _run_example_3() -> tuple[dict, bool]:
    config = parse_config(fixture_path("example3.json"))
    report: dict = {}
    ok = _stage_validate(config, report) and _stage_analyze(config, report)
    # the uniform density condition fails on the full box here (sup = 2 > 1);
    # the wavelet construction lives on the sublevel region instead, so the
    # design stage verdict is informational for this fixture
    _stage_design(config, report)
    conditions = {c["condition"]: c for c in report["design"]["conditions"]}
    wavelet = conditions["wavelet_discretization"]
    checks = {
        "det_b": report["spectral"]["det_b"] == _EX3_DET,
        "unit_product": wavelet["margins"]["product"] == "1",
        "sublevel_nonempty": wavelet["margins"]["sublevel_nonempty"] is True,
        "sublevel_measure_positive": wavelet["margins"]["sublevel_measure_lower"] > 0,
        "discretizable": wavelet["passed"],
    }
    out = {
        "label": "example3",
        "checks": checks,
        "design": report["design"],
        "matches": all(checks.values()) and ok,
    }
    return out, out["matches"]


def run_examples(which: int | None = None) -> tuple[dict, int]:
    runners = {1: _run_example_1, 2: _run_example_2, 3: _run_example_3}
    selected = [which] if which else [1, 2, 3]
    out = {}
    all_ok = True
    for idx in selected:
        result, ok = runners[idx]()
        out[str(idx)] = result
        all_ok = all_ok and ok
    return {"examples": out}, EXIT_PASS if all_ok else EXIT_CONDITION


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def run_command(
    command: str,
    config: ConfigDocument | None,
    out_path: str | None = None,
    timing: bool = False,
    example: int | None = None,
) -> tuple[dict, int]:
    """Execute one pipeline command; returns (report document, exit code).

    Module errors surface as structured error blocks; partially completed
    stages stay in the report.
    """
    t0 = time.monotonic()
    if command == "examples":
        report, code = run_examples(example)
        report["command"] = "examples"
        report["version"] = __version__
        if timing:
            report["timing"] = {"seconds": time.monotonic() - t0}
        return report, code

    if config is None:
        raise SchemaError("config", f"command {command!r} requires --config")
    report: dict = {
        "version": __version__,
        "command": command,
        "config": config.raw,
    }
    code = EXIT_PASS
    try:
        ok = _stage_validate(config, report)
        if command == "validate":
            code = EXIT_PASS if ok else EXIT_CONDITION
        elif not ok:
            code = EXIT_CONDITION
        else:
            ok = _stage_analyze(config, report)
            if not ok:
                code = EXIT_CONDITION
            elif command in ("design", "synthesize", "verify"):
                ok = _stage_design(config, report)
                if command == "design":
                    code = EXIT_PASS if ok else EXIT_CONDITION
                elif not ok and not _density_passed(report):
                    report["synthesis"] = {
                        "refused": "density condition fails; no Parseval window exists"
                    }
                    code = EXIT_CONDITION
                else:
                    ok = _stage_synthesize(config, report, out_path if command == "synthesize" else None)
                    if not ok:
                        code = EXIT_CONDITION
                    elif command == "verify":
                        ok = _stage_verify(config, report)
                        code = EXIT_PASS if ok else EXIT_CONDITION
    except CertificationError as exc:
        report["error"] = {"type": "certification", "message": str(exc)}
        code = EXIT_CERTIFICATION
    except (DensityViolationError, PieceOverflowError) as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        code = EXIT_CONDITION

    for key in list(report):
        if key.startswith("_"):
            del report[key]
    report["status"] = "pass" if code == EXIT_PASS else "fail"
    if timing or (config is not None and config.output.timing):
        report["timing"] = {"seconds": time.monotonic() - t0}
    return report, code


def _density_passed(report: dict) -> bool:
    try:
        density = next(
            c for c in report["design"]["conditions"] if c["condition"] == "density"
        )
        return bool(density["passed"])
    except (KeyError, StopIteration):
        return False


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nilframe",
        description="Quasi-lattice Parseval frame design and verification pipeline",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="path to a JSON config document")
    parser.add_argument("--out", help="write the report (or field for synthesize) here")
    parser.add_argument("--tol", type=float, help="override sup/measure tolerances")
    parser.add_argument("--grid", help="lambda-grid node counts, comma separated")
    parser.add_argument("--trunc", help="truncation half-widths m,k,n")
    parser.add_argument("--example", type=int, choices=(1, 2, 3))
    parser.add_argument("--timing", action="store_true", help="include timing in the report")
    return parser


def _apply_overrides(config: ConfigDocument, args) -> ConfigDocument:
    raw = dict(config.raw)
    if args.tol is not None:
        spectrum = dict(raw.get("spectrum", {}))
        spectrum["sup_tol"] = args.tol
        spectrum["measure_tol"] = args.tol
        raw["spectrum"] = spectrum
    if args.grid:
        verification = dict(raw.get("verification", {}))
        verification["lam_grid"] = [int(x) for x in args.grid.split(",")]
        raw["verification"] = verification
    if args.trunc:
        parts = [int(x) for x in args.trunc.split(",")]
        if len(parts) != 3:
            raise SchemaError("trunc", "expected three integers m,k,n")
        verification = dict(raw.get("verification", {}))
        v = config.algebra.center_dim
        d = config.algebra.d
        verification["m_half"] = [parts[0]] * v
        verification["k_half"] = [parts[1]] * d
        verification["n_half"] = [parts[2]] * d
        raw["verification"] = verification
    if args.tol is not None or args.grid or args.trunc:
        return parse_config(raw)
    return config


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = None
        if args.command != "examples":
            if not args.config:
                parser.error(f"command {args.command!r} requires --config")
            config = parse_config(args.config)
            config = _apply_overrides(config, args)
        report, code = run_command(
            args.command,
            config,
            out_path=args.out,
            timing=args.timing,
            example=args.example,
        )
    except SchemaError as exc:
        print(canonical_json({"error": {"type": "schema", "field": exc.field, "message": str(exc)}}))
        return EXIT_INPUT
    except NilframeError as exc:
        print(canonical_json({"error": {"type": type(exc).__name__, "message": str(exc)}}))
        return EXIT_INPUT
    text = canonical_json(report)
    if args.out and args.command != "synthesize":
        Path(args.out).write_text(text)
        print(f"report written to {args.out}", file=sys.stderr)
    else:
        print(text, end="")
    print(f"nilframe {args.command}: {'pass' if code == EXIT_PASS else 'fail'} (exit {code})", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
