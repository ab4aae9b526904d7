"""Fiber window synthesis by cut-and-stack, and generator fields.

A fiber Gabor system with translations along T = diag(1/b_i) and modulations
along C = (modulation matrix) D(q) carries a Parseval window of the painless
kind whenever its lattice volume is at most one: take the indicator of a set
E that tiles the space under T Z^d while packing modulo the dual modulation
lattice C^{-tr} Z^d, scaled by |det C|^(1/2).

The set E is assembled exactly.  In sheared coordinates u = C^tr x the tiling
lattice becomes G Z^d with G = C^tr T and the packing lattice becomes Z^d.
When the plain cell G [0,1)^d already packs, it is used directly (one piece).
Otherwise pieces are cut from the common refinement: with S the lattice
generated by G Z^d and Z^d together, a fundamental cell of S is stacked at
representatives chosen once per class of S modulo G Z^d, each adjusted by a
G-translate so that no two land in the same class modulo Z^d.  The stack then
tiles under G Z^d and packs modulo Z^d by construction, and both properties
are re-checked independently by the frame verifier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .algebra import LieAlgebraSpec
from .errors import (
    DegenerateFiberError,
    DensityViolationError,
    PieceOverflowError,
    SchemaError,
)
from .intlattice import (
    frac_vector,
    hnf_columns,
    integer_matrix,
    lattice_sum_basis,
    mat_det,
    mat_inv,
    mat_mul,
    mat_transpose,
    mat_vec,
)
from .lattice import FiberGaborLattice, QuasiLatticeParams, fiber_lattice
from .rationals import format_rational
from .spectral import MeasureResult, SpectrumBox, density_polynomial


@dataclass(frozen=True)
class PiecewiseBoxWindow:
    """Scaled indicator of finitely many disjoint parallelepipeds.

    Every piece is shape @ [0,1)^d + offset; pieces share the shape matrix.
    """

    scale: float
    shape: tuple[tuple[Fraction, ...], ...]
    offsets: tuple[tuple[Fraction, ...], ...]

    @property
    def d(self) -> int:
        return len(self.shape)

    @property
    def piece_count(self) -> int:
        return len(self.offsets)

    @property
    def piece_measure(self) -> Fraction:
        return abs(mat_det([list(r) for r in self.shape]))

    @property
    def total_measure(self) -> Fraction:
        return self.piece_measure * self.piece_count

    @property
    def norm_sq(self) -> float:
        return self.scale**2 * float(self.total_measure)

    def contains(self, x: Sequence[Fraction]) -> bool:
        """Exact membership for a rational point."""
        inv = mat_inv([list(r) for r in self.shape])
        for off in self.offsets:
            t = mat_vec(inv, [Fraction(xi) - oi for xi, oi in zip(x, off)])
            if all(0 <= ti < 1 for ti in t):
                return True
        return False

    def sample_grid(self, axes: Sequence[np.ndarray]) -> np.ndarray:
        """Float indicator values on a product grid; returns array shaped like the grid."""
        inv = np.array(
            [[float(v) for v in row] for row in mat_inv([list(r) for r in self.shape])]
        )
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=0)  # (d, npts)
        out = np.zeros(pts.shape[1], dtype=bool)
        for off in self.offsets:
            t = inv @ (pts - np.array([[float(o)] for o in off]))
            inside = np.all((t >= 0.0) & (t < 1.0), axis=0)
            out |= inside
        return out.reshape(mesh[0].shape).astype(float)


def synthesize_window(
    lattice: FiberGaborLattice,
    piece_limit: int = 4096,
    search_radius: int = 12,
) -> PiecewiseBoxWindow:
    """Painless Parseval window for one fiber; pieces and measure are exact.

    Raises DensityViolationError when the lattice volume exceeds one,
    DegenerateFiberError on a singular modulation matrix, and
    PieceOverflowError when the cut-and-stack would need more pieces than
    the budget allows (large parameter denominators).
    """
    d = lattice.d
    if lattice.det_b == 0:
        raise DegenerateFiberError(f"modulation matrix is singular at lam={lattice.lam}")
    if lattice.volume > 1:
        raise DensityViolationError(
            f"fiber lattice volume {format_rational(lattice.volume)} exceeds 1"
        )
    trans = [list(r) for r in lattice.translation]
    mod = [list(r) for r in lattice.modulation]
    scale = math.sqrt(abs(float(mat_det(mod))))
    # sheared coordinates: tiling lattice G Z^d, packing lattice Z^d
    g = mat_mul(mat_transpose(mod), trans)
    dual_to_x = mat_inv(mat_transpose(mod))  # maps u back to x

    offsets_u, shape_u = _stack_pieces(g, piece_limit, search_radius)
    shape_x = mat_mul(dual_to_x, shape_u)
    offsets_x = [mat_vec(dual_to_x, off) for off in offsets_u]
    return PiecewiseBoxWindow(
        scale=scale,
        shape=tuple(tuple(row) for row in shape_x),
        offsets=tuple(tuple(off) for off in offsets_x),
    )


def _cell_packs(g) -> bool:
    """Does G [0,1)^d pack modulo Z^d?  True iff no nonzero integer vector
    lies in the open difference body G (-1,1)^d."""
    d = len(g)
    ginv = mat_inv(g)
    bounds = [int(sum(abs(x) for x in g[i])) for i in range(d)]
    for m in product(*[range(-b, b + 1) for b in bounds]):
        if all(v == 0 for v in m):
            continue
        t = mat_vec(ginv, [Fraction(v) for v in m])
        if all(abs(ti) < 1 for ti in t):
            return False
    return True


def _stack_pieces(g, piece_limit: int, search_radius: int):
    """Offsets (in u coordinates) and shared shape matrix of the stacked cell."""
    d = len(g)
    if _cell_packs(g):
        return [[Fraction(0)] * d], [list(row) for row in g]

    w = lattice_sum_basis(g)  # basis of S = G Z^d + Z^d
    det_g = abs(mat_det(g))
    cov_s = abs(mat_det(w))
    class_count = det_g / cov_s
    if class_count.denominator != 1:
        raise AssertionError("superlattice index is not integral")
    class_count = int(class_count)
    if class_count > piece_limit:
        raise PieceOverflowError(
            f"stacking needs {class_count} pieces, over the budget of {piece_limit}"
        )
    # transversal of S / G Z^d through digits of the triangular form
    t_mat = integer_matrix(mat_mul(mat_inv(w), g))
    h = hnf_columns(t_mat)
    diag = [h[i][i] for i in range(d)]
    assert math.prod(diag) == class_count
    ginv = mat_inv(g)
    used: set = set()
    offsets: list[list[Fraction]] = []
    for digits in product(*[range(di) for di in diag]):
        point = mat_vec(w, [Fraction(x) for x in digits])
        # bring the representative near the origin; its class mod G Z^d is unchanged
        shift = [Fraction(v.numerator // v.denominator) for v in mat_vec(ginv, point)]
        point = [point[i] - sum(g[i][j] * shift[j] for j in range(d)) for i in range(d)]
        placed = False
        for radius in range(search_radius + 1):
            for m in product(range(-radius, radius + 1), repeat=d):
                if max((abs(x) for x in m), default=0) != radius:
                    continue
                cand = [point[i] + sum(g[i][j] * m[j] for j in range(d)) for i in range(d)]
                residue = frac_vector(cand)
                if residue not in used:
                    used.add(residue)
                    offsets.append(cand)
                    placed = True
                    break
            if placed:
                break
        if not placed:
            raise PieceOverflowError(
                f"no fresh residue found within search radius {search_radius}"
            )
    return offsets, w


@dataclass(frozen=True)
class WindowNormReport:
    passed: bool
    measured: float
    expected: float

    def as_dict(self) -> dict:
        return {"passed": self.passed, "measured": self.measured, "expected": self.expected}


def window_norm_check(
    window: PiecewiseBoxWindow, lattice: FiberGaborLattice, tol: float = 1e-9
) -> WindowNormReport:
    """Parseval windows must satisfy norm^2 = lattice volume."""
    measured = window.norm_sq
    expected = float(lattice.volume)
    return WindowNormReport(
        passed=abs(measured - expected) <= tol, measured=measured, expected=expected
    )


# ---------------------------------------------------------------------------
# generator fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldNode:
    lam: tuple[Fraction, ...]
    window: PiecewiseBoxWindow
    normalization: float
    lattice: FiberGaborLattice

    @property
    def fiber_vector_norm_sq(self) -> float:
        """Norm^2 of the normalized fiber vector window * normalization."""
        return self.window.norm_sq * self.normalization**2


@dataclass(frozen=True)
class FrameGeneratorField:
    """Per-fiber windows with their normalizations on a spectral grid."""

    role: str  # "frame" or "wavelet"
    params: QuasiLatticeParams
    box: SpectrumBox
    grid_shape: tuple[int, ...]
    axes: tuple[tuple[Fraction, ...], ...]
    nodes: tuple[FieldNode, ...]
    skipped: tuple[tuple[tuple[Fraction, ...], str], ...]
    predicted_norm_sq: float | None

    @property
    def cell_volume(self) -> Fraction:
        (lo, hi), = self.box.region()
        vol = Fraction(1)
        for l, h, count in zip(lo, hi, self.grid_shape):
            vol *= (h - l) / count
        return vol

    def grid_measured_norm_sq(self) -> float:
        """Quadrature of the generator's spectral norm over the grid."""
        cell = float(self.cell_volume)
        total = 0.0
        for node in self.nodes:
            total += node.fiber_vector_norm_sq * abs(float(node.lattice.det_b)) * cell
        return total


def centered_grid(box: SpectrumBox, shape: Sequence[int]) -> tuple[tuple[Fraction, ...], ...]:
    """Cell-center nodes per axis; rational so fiber evaluations stay exact.

    Grids cover the box region, which must be a single rectangle (the full
    box, or exactly one sub-box).
    """
    if len(shape) != box.dimension:
        raise SchemaError("grid", f"expected {box.dimension} axis counts")
    region = box.region()
    if len(region) != 1:
        raise SchemaError("grid", "grids need a single rectangular region")
    lo, hi = region[0]
    axes = []
    for l, h, count in zip(lo, hi, shape):
        if count < 1:
            raise SchemaError("grid", "axis counts must be positive")
        axes.append(tuple(l + (h - l) * Fraction(2 * k + 1, 2 * count) for k in range(count)))
    return tuple(axes)


def build_generator_field(
    spec: LieAlgebraSpec,
    params: QuasiLatticeParams,
    box: SpectrumBox,
    grid_shape: Sequence[int],
    role: str = "frame",
    mu_box: MeasureResult | Fraction | None = None,
    eps_degenerate: float = 1e-12,
    piece_limit: int = 4096,
) -> FrameGeneratorField:
    """Synthesize one window per grid node and attach normalizations.

    Degenerate nodes (density below eps) are skipped and recorded.  For the
    wavelet role the covolume product must equal one exactly and the grid is
    restricted to the sublevel region; every kept fiber vector then has unit
    norm by construction (asserted).
    """
    if role not in ("frame", "wavelet"):
        raise SchemaError("role", f"unknown role {role!r}")
    det_b = density_polynomial(spec)
    if role == "wavelet":
        covolume = params.prod_a * params.prod_b * params.prod_q
        if covolume != 1:
            raise DensityViolationError(
                f"wavelet role needs prod(a b q) = 1, got {format_rational(covolume)}"
            )
    axes = centered_grid(box, grid_shape)
    prod_a = float(params.prod_a)
    nodes: list[FieldNode] = []
    skipped: list[tuple[tuple[Fraction, ...], str]] = []
    for lam in product(*axes):
        det_val = det_b.evaluate(lam)
        if det_val == 0 or abs(float(det_val)) < eps_degenerate:
            skipped.append((lam, "degenerate fiber"))
            continue
        if role == "wavelet" and abs(det_val) > params.prod_bq:
            skipped.append((lam, "outside sublevel region"))
            continue
        lat = fiber_lattice(spec, params, lam, det_b_poly=det_b)
        window = synthesize_window(lat, piece_limit=piece_limit)
        normalization = 1.0 / math.sqrt(prod_a * abs(float(det_val)))
        node = FieldNode(lam=lam, window=window, normalization=normalization, lattice=lat)
        if role == "wavelet":
            assert abs(node.fiber_vector_norm_sq - 1.0) <= 1e-9
        nodes.append(node)
    predicted = None
    if mu_box is not None:
        mu_val = mu_box.value if isinstance(mu_box, MeasureResult) else float(mu_box)
        predicted = mu_val / float(params.prod_q * params.prod_b * params.prod_a)
    return FrameGeneratorField(
        role=role,
        params=params,
        box=box,
        grid_shape=tuple(int(c) for c in grid_shape),
        axes=axes,
        nodes=tuple(nodes),
        skipped=tuple(skipped),
        predicted_norm_sq=predicted,
    )


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def field_to_document(field: FrameGeneratorField) -> dict:
    """JSON-ready dictionary: floats as shortest round-trip decimal strings."""
    return {
        "role": field.role,
        "params": field.params.as_dict(),
        "box": {"a": [format_rational(x) for x in field.box.a]},
        "grid_shape": list(field.grid_shape),
        "predicted_norm_sq": repr(field.predicted_norm_sq)
        if field.predicted_norm_sq is not None
        else None,
        "nodes": [
            {
                "lam": [format_rational(x) for x in node.lam],
                "scale": repr(node.window.scale),
                "normalization": repr(node.normalization),
                "pieces": [
                    {
                        "offset": [repr(float(o)) for o in off],
                        "shape": [repr(float(v)) for row in node.window.shape for v in row],
                    }
                    for off in node.window.offsets
                ],
            }
            for node in field.nodes
        ],
        "skipped": [
            {"lam": [format_rational(x) for x in lam], "reason": reason}
            for lam, reason in field.skipped
        ],
    }
