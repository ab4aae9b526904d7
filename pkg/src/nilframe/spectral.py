"""Spectral-side machinery: pairing matrices, Plancherel density, certified
suprema and measures over spectrum boxes.

Symbolic identities are exact; the sup and measure routines return certified
rational brackets produced by branch-and-bound over dyadic sub-boxes, with
monomial-wise interval bounds (valid because every box lives in the positive
orthant).
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .algebra import LieAlgebraSpec
from .errors import CertificationError, SchemaError
from .polynomial import SpectralPolynomial, determinant

# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectralMatrices:
    """Symbolic matrices attached to a spec.

    pairing:    n x n matrix of the central functional paired with brackets.
    jump_block: restriction of the pairing to the top-2d (jump) indices.
    modulation: d x d matrix generating the fiber modulation lattice.
    """

    pairing: tuple[tuple[SpectralPolynomial, ...], ...]
    jump_block: tuple[tuple[SpectralPolynomial, ...], ...]
    modulation: tuple[tuple[SpectralPolynomial, ...], ...]


def build_matrices(spec: LieAlgebraSpec) -> SpectralMatrices:
    """Degree-one polynomial matrices from the bracket table."""
    v = spec.center_dim
    n = spec.n

    def pair_poly(i: int, j: int) -> SpectralPolynomial:
        return SpectralPolynomial.linear_form(spec.bracket_vector(i, j)[:v])

    pairing = tuple(tuple(pair_poly(i, j) for j in range(n)) for i in range(n))
    jump = tuple(tuple(pairing[i][j] for j in range(v, n)) for i in range(v, n))
    modulation = tuple(
        tuple(-pair_poly(spec.x_index(i), spec.y_index(j)) for j in range(spec.d))
        for i in range(spec.d)
    )
    return SpectralMatrices(pairing=pairing, jump_block=jump, modulation=modulation)


def block_structure_holds(mats: SpectralMatrices, d: int) -> bool:
    """Jump block must be [[0, Bt], [-B, 0]] for the modulation matrix B."""
    V = mats.jump_block
    B = mats.modulation
    for i in range(d):
        for j in range(d):
            if not V[i][j].is_zero() or not V[d + i][d + j].is_zero():
                return False
            if V[i][d + j] != B[j][i]:  # Y-X block equals B transposed
                return False
            if V[d + i][j] != -B[i][j]:  # X-Y block equals -B
                return False
    return True


@dataclass(frozen=True)
class PfaffianReport:
    passed: bool
    witness: SpectralPolynomial

    def as_dict(self) -> dict:
        return {"passed": self.passed, "witness": self.witness.coefficient_list()}


def pfaffian_identity_check(
    jump_block: Sequence[Sequence[SpectralPolynomial]],
    modulation: Sequence[Sequence[SpectralPolynomial]],
) -> PfaffianReport:
    """Exact check that det(jump block) equals det(modulation)^2."""
    det_v = determinant(jump_block)
    det_b = determinant(modulation)
    witness = det_v - det_b * det_b
    return PfaffianReport(passed=witness.is_zero(), witness=witness)


def density_polynomial(spec: LieAlgebraSpec) -> SpectralPolynomial:
    """det of the modulation matrix; the Plancherel density is its absolute value."""
    return determinant(build_matrices(spec).modulation)


# ---------------------------------------------------------------------------
# spectrum boxes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectrumBox:
    """Axis-aligned spectral support: [0, a_i] per coordinate, minus the null
    set of the density, optionally restricted to a finite union of rational
    sub-boxes."""

    a: tuple[Fraction, ...]
    sub_boxes: tuple[tuple[tuple[Fraction, ...], tuple[Fraction, ...]], ...] = ()

    def __post_init__(self):
        if not self.a or any(x <= 0 for x in self.a):
            raise SchemaError("spectrum.a", "box densities must be positive")
        for lo, hi in self.sub_boxes:
            if len(lo) != len(self.a) or len(hi) != len(self.a):
                raise SchemaError("spectrum.sub_boxes", "dimension mismatch")
            for i, (l, h) in enumerate(zip(lo, hi)):
                if not (0 <= l < h <= self.a[i]):
                    raise SchemaError(
                        "spectrum.sub_boxes", f"sub-box axis {i} not inside [0, a_{i}]"
                    )

    @property
    def dimension(self) -> int:
        return len(self.a)

    def region(self) -> tuple[tuple[tuple[Fraction, ...], tuple[Fraction, ...]], ...]:
        if self.sub_boxes:
            return self.sub_boxes
        zero = tuple(Fraction(0) for _ in self.a)
        return ((zero, self.a),)

    def lebesgue_volume(self) -> Fraction:
        total = Fraction(0)
        for lo, hi in self.region():
            vol = Fraction(1)
            for l, h in zip(lo, hi):
                vol *= h - l
            total += vol
        return total


# ---------------------------------------------------------------------------
# density evaluation
# ---------------------------------------------------------------------------


def eval_density(det_b: SpectralPolynomial, point: Sequence):
    """|det_b| at a point; exact for rational input, binary64 for float input."""
    if len(point) != det_b.nvars:
        raise ValueError(f"point has length {len(point)}, expected {det_b.nvars}")
    if any(isinstance(x, float) for x in point):
        return abs(det_b.evaluate_float([float(x) for x in point]))
    return abs(det_b.evaluate(point))


# ---------------------------------------------------------------------------
# scaled integer form used by the certified routines
# ---------------------------------------------------------------------------


class _ScaledPoly:
    """p restricted to a rational box, rewritten as an integer-coefficient
    polynomial over the unit cube: p(lo + (hi-lo) t) = P(t) / den.

    Bounds and integrals over dyadic sub-boxes run on plain integers; one
    Fraction is built per finalized box.
    """

    __slots__ = (
        "monos",
        "den",
        "box_volume",
        "box_volume_f",
        "nvars",
        "deg_total",
        "int_monos",
        "int_lcm",
        "int_exp",
        "grad_monos",
    )

    def __init__(self, p: SpectralPolynomial, lo: Sequence[Fraction], hi: Sequence[Fraction]):
        q = p.substitute_affine(lo, [h - l for l, h in zip(lo, hi)])
        self.monos, self.den = q.integer_scaled()
        self.nvars = p.nvars
        vol = Fraction(1)
        for l, h in zip(lo, hi):
            vol *= h - l
        self.box_volume = vol
        self.box_volume_f = float(vol)
        self.deg_total = max((sum(m) for m, _ in self.monos), default=0)
        # integral bookkeeping: common denominator den * lcm * 2**(k*int_exp)
        lcm = 1
        for m, _ in self.monos:
            prod_e = math.prod(e + 1 for e in m)
            lcm = lcm * prod_e // math.gcd(lcm, prod_e)
        self.int_lcm = lcm
        self.int_exp = self.deg_total + self.nvars
        self.int_monos = [
            (m, c, lcm // math.prod(e + 1 for e in m), sum(m)) for m, c in self.monos
        ]
        # partial derivatives, same integer denominator, for centered bounds
        self.grad_monos = []
        for axis in range(self.nvars):
            deriv = []
            for m, c in self.monos:
                if m[axis] > 0:
                    dm = tuple(e - 1 if i == axis else e for i, e in enumerate(m))
                    deriv.append((dm, c * m[axis]))
            self.grad_monos.append(deriv)

    def bounds(self, lo_num: tuple[int, ...], hi_num: tuple[int, ...], k: int):
        """Integer numerators of min/max bounds of P on the dyadic box.

        Returns (mn_num, mx_num, scale_exp); the bounds are num / (den * 2**scale_exp).
        Valid because the unit cube lives in the positive orthant, so each
        monomial is monotone in every coordinate.
        """
        D = self.deg_total
        mn = 0
        mx = 0
        for mono, c in self.monos:
            deg = sum(mono)
            scale = 1 << (k * (D - deg))
            lo_v = scale
            hi_v = scale
            for x, e in zip(lo_num, mono):
                if e:
                    lo_v *= x**e
            for x, e in zip(hi_num, mono):
                if e:
                    hi_v *= x**e
            if c > 0:
                mn += c * lo_v
                mx += c * hi_v
            else:
                mn += c * hi_v
                mx += c * lo_v
        return mn, mx, k * D

    def integral(self, lo_num: tuple[int, ...], hi_num: tuple[int, ...], k: int) -> Fraction:
        """Exact integral of P/den over the dyadic box, in unit-cube coordinates."""
        num = 0
        E = self.int_exp
        for mono, c, lcm_factor, deg in self.int_monos:
            term = c * lcm_factor * (1 << (k * (E - deg - self.nvars)))
            for l, h, e in zip(lo_num, hi_num, mono):
                term *= h ** (e + 1) - l ** (e + 1)
            num += term
        return Fraction(num, self.den * self.int_lcm << (k * E))

    def dyadic_volume(self, lo_num, hi_num, k) -> Fraction:
        vol = Fraction(1)
        den = 1 << k
        for l, h in zip(lo_num, hi_num):
            vol *= Fraction(h - l, den)
        return vol

    def dyadic_volume_f(self, lo_num, hi_num, k) -> float:
        prod = 1
        for l, h in zip(lo_num, hi_num):
            prod *= h - l
        return prod / float(1 << (k * self.nvars))

    def evaluate_fraction(self, point: Sequence[Fraction]) -> Fraction:
        total = Fraction(0)
        for mono, c in self.monos:
            term = Fraction(c, self.den)
            for x, e in zip(point, mono):
                if e:
                    term *= x**e
            total += term
        return total

    def centered_abs_upper(self, lo_num, hi_num, k) -> Fraction:
        """Mean-value bound: |p| <= |p(c)| + sum_i sup|dp/dt_i| * halfwidth_i.

        Second-order tight near interior extrema, where the plain monomial
        interval bound closes only linearly.
        """
        den = 1 << k
        center = [Fraction(l + h, 2 * den) for l, h in zip(lo_num, hi_num)]
        bound = abs(self.evaluate_fraction(center))
        for axis, deriv in enumerate(self.grad_monos):
            half = Fraction(hi_num[axis] - lo_num[axis], 2 * den)
            if half == 0 or not deriv:
                continue
            mn = Fraction(0)
            mx = Fraction(0)
            for mono, c in deriv:
                lo_v = Fraction(1)
                hi_v = Fraction(1)
                for x_lo, x_hi, e in zip(lo_num, hi_num, mono):
                    if e:
                        lo_v *= Fraction(x_lo, den) ** e
                        hi_v *= Fraction(x_hi, den) ** e
                term = Fraction(c, self.den)
                if term > 0:
                    mn += term * lo_v
                    mx += term * hi_v
                else:
                    mn += term * hi_v
                    mx += term * lo_v
            bound += max(abs(mn), abs(mx)) * half
        return bound


def _split_box(lo, hi, k):
    """Bisect the longest axis; children live at depth k+1."""
    widths = [h - l for l, h in zip(lo, hi)]
    axis = widths.index(max(widths))
    lo2 = tuple(x * 2 for x in lo)
    hi2 = tuple(x * 2 for x in hi)
    mid = lo2[axis] + widths[axis]
    a_hi = tuple(mid if i == axis else hi2[i] for i in range(len(hi2)))
    b_lo = tuple(mid if i == axis else lo2[i] for i in range(len(lo2)))
    return (lo2, a_hi, k + 1), (b_lo, hi2, k + 1)


# ---------------------------------------------------------------------------
# certified supremum
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SupCertificate:
    depth: int
    boxes: int
    argmax: tuple[Fraction, ...]
    converged: bool


@dataclass(frozen=True)
class SupResult:
    value: float
    lower: Fraction
    upper: Fraction
    certificate: SupCertificate

    def as_dict(self) -> dict:
        from .rationals import format_rational, format_rational_vector

        return {
            "value": self.value,
            "lower": format_rational(self.lower),
            "upper": format_rational(self.upper),
            "depth": self.certificate.depth,
            "boxes": self.certificate.boxes,
            "argmax": format_rational_vector(self.certificate.argmax),
            "converged": self.certificate.converged,
        }


def sup_density(
    det_b: SpectralPolynomial,
    box: SpectrumBox,
    tol: float = 1e-9,
    max_boxes: int = 2_000_000,
) -> SupResult:
    """Certified supremum of |det_b| over the box, by branch-and-bound.

    The returned bracket satisfies lower <= sup <= upper with
    upper - lower <= tol on convergence; the certificate records the winning
    sample point.  Without convergence a CertificationError carries the best
    bracket found.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if det_b.nvars != box.dimension:
        raise ValueError("dimension mismatch between polynomial and box")
    tol_frac = Fraction(tol).limit_denominator(10**18)

    best_lower = Fraction(0)
    best_point = tuple(Fraction(0) for _ in range(det_b.nvars))
    heap: list = []
    counter = 0
    boxes_processed = 0
    max_depth = 0

    def sample(scaled: _ScaledPoly, region_lo, region_hi, lo_num, hi_num, k):
        nonlocal best_lower, best_point
        den = 1 << k
        corners = []
        nv = len(lo_num)
        for mask in range(1 << nv):
            corners.append(
                tuple(
                    Fraction(hi_num[i] if (mask >> i) & 1 else lo_num[i], den) for i in range(nv)
                )
            )
        corners.append(tuple(Fraction(lo_num[i] + hi_num[i], 2 * den) for i in range(nv)))
        for t in corners:
            lam = tuple(
                region_lo[i] + (region_hi[i] - region_lo[i]) * t[i] for i in range(nv)
            )
            val = abs(det_b.evaluate(lam))
            if val > best_lower:
                best_lower = val
                best_point = lam

    regions = box.region()
    scaled_list = [_ScaledPoly(det_b, lo, hi) for lo, hi in regions]

    def box_upper(scaled: _ScaledPoly, lo_num, hi_num, k) -> Fraction:
        mn, mx, se = scaled.bounds(lo_num, hi_num, k)
        monomial = Fraction(max(abs(mn), abs(mx)), scaled.den * (1 << se))
        centered = scaled.centered_abs_upper(lo_num, hi_num, k)
        return min(monomial, centered)

    nv = det_b.nvars
    lo0 = (0,) * nv
    hi0 = (1,) * nv
    for ridx, (scaled, (rlo, rhi)) in enumerate(zip(scaled_list, regions)):
        upper = box_upper(scaled, lo0, hi0, 0)
        sample(scaled, rlo, rhi, lo0, hi0, 0)
        counter += 1
        heapq.heappush(heap, (-float(upper), counter, ridx, lo0, hi0, 0, upper))

    global_upper = max((item[6] for item in heap), default=Fraction(0))
    while heap and boxes_processed < max_boxes:
        neg_up, _, ridx, lo_num, hi_num, k, upper = heap[0]
        global_upper = upper
        if global_upper - best_lower <= tol_frac:
            break
        heapq.heappop(heap)
        boxes_processed += 1
        scaled = scaled_list[ridx]
        rlo, rhi = regions[ridx]
        for clo, chi, ck in _split_box(lo_num, hi_num, k):
            child_upper = box_upper(scaled, clo, chi, ck)
            sample(scaled, rlo, rhi, clo, chi, ck)
            max_depth = max(max_depth, ck)
            if child_upper > best_lower:
                counter += 1
                heapq.heappush(heap, (-float(child_upper), counter, ridx, clo, chi, ck, child_upper))
    if heap:
        global_upper = max(best_lower, heap[0][6])
    else:
        global_upper = best_lower

    converged = global_upper - best_lower <= tol_frac
    cert = SupCertificate(
        depth=max_depth, boxes=boxes_processed, argmax=best_point, converged=converged
    )
    result = SupResult(
        value=float((best_lower + global_upper) / 2),
        lower=best_lower,
        upper=global_upper,
        certificate=cert,
    )
    if not converged:
        raise CertificationError(
            f"sup not certified to {tol}: bracket [{float(best_lower)}, {float(global_upper)}]"
        )
    return result


# ---------------------------------------------------------------------------
# certified measure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MeasureCertificate:
    boxes: int
    depth: int
    converged: bool


@dataclass(frozen=True)
class MeasureResult:
    value: float
    lower: Fraction
    upper: Fraction
    certificate: MeasureCertificate
    witness_box: tuple[tuple[Fraction, ...], tuple[Fraction, ...]] | None = None

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def as_dict(self) -> dict:
        from .rationals import format_rational

        out = {
            "value": self.value,
            "lower": format_rational(self.lower),
            "upper": format_rational(self.upper),
            "boxes": self.certificate.boxes,
            "depth": self.certificate.depth,
            "converged": self.certificate.converged,
        }
        if self.witness_box is not None:
            out["witness_box"] = [
                [format_rational(x) for x in self.witness_box[0]],
                [format_rational(x) for x in self.witness_box[1]],
            ]
        return out


def spectral_measure(
    det_b: SpectralPolynomial,
    region: SpectrumBox,
    tol: float = 1e-9,
    threshold: Fraction | None = None,
    max_boxes: int = 4_000_000,
    strict: bool = True,
) -> MeasureResult:
    """Integral of |det_b| over the region, certified by adaptive subdivision.

    With ``threshold`` set, integrates over the sublevel part
    {|det_b| <= threshold} of the region instead.  Boxes with constant sign
    (and certified level-set status) are integrated exactly as polynomials;
    the remaining boxes contribute a rational bracket.  The widest-bracket box
    is refined first until the total width drops below tol.

    The refinement loop steers on integer interval bounds and float width
    proxies; exact rational brackets are assembled once at the end, so float
    rounding can never corrupt the certificate.  On budget exhaustion the
    bracket is still valid; ``strict`` controls whether that raises
    CertificationError or returns the wide bracket.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if det_b.nvars != region.dimension:
        raise ValueError("dimension mismatch between polynomial and region")
    tol_frac = Fraction(tol).limit_denominator(10**18)
    nv = det_b.nvars

    regions = region.region()
    scaled_list = [_ScaledPoly(det_b, lo, hi) for lo, hi in regions]

    witness: tuple | None = None
    boxes_processed = 0
    max_depth = 0
    counter = 0
    heap: list = []          # open boxes: (-width_proxy, counter, ridx, lo, hi, k, mn, mx, se)
    done: list = []          # sign-resolved boxes: (ridx, lo, hi, k, sign) with sign in {+1,-1}
    total_width = 0.0

    def push(ridx, lo_num, hi_num, k):
        """Classify a dyadic box; integer bound arithmetic, float width proxy."""
        nonlocal witness, counter, total_width, max_depth
        scaled = scaled_list[ridx]
        mn, mx, se = scaled.bounds(lo_num, hi_num, k)
        max_depth = max(max_depth, k)
        if threshold is not None:
            # mx <= threshold * den * 2**se, on integers
            rhs = threshold.numerator * scaled.den << se
            inside = mx * threshold.denominator <= rhs and mn * threshold.denominator >= -rhs
            outside = mn * threshold.denominator > rhs or mx * threshold.denominator < -rhs
            if outside:
                return
            if not inside:
                vol_f = scaled.box_volume_f * scaled.dyadic_volume_f(lo_num, hi_num, k)
                den_all = float(scaled.den) * float(1 << se)
                w = vol_f * min(float(threshold), max(abs(mn), abs(mx)) / den_all)
                counter += 1
                heapq.heappush(heap, (-w, counter, ridx, lo_num, hi_num, k, mn, mx, se))
                total_width += w
                return
        if mn >= 0 or mx <= 0:
            sign = 1 if mn >= 0 else -1
            if threshold is not None and witness is None and (mn > 0 or mx < 0):
                witness = _to_region_box(regions, ridx, lo_num, hi_num, k)
            done.append((ridx, lo_num, hi_num, k, sign))
            return
        # straddling: bracket width is at most 2 vol min(mx, -mn)
        vol_f = scaled.box_volume_f * scaled.dyadic_volume_f(lo_num, hi_num, k)
        den_all = float(scaled.den) * float(1 << se)
        w = vol_f * 2.0 * (min(mx, -mn) / den_all)
        counter += 1
        heapq.heappush(heap, (-w, counter, ridx, lo_num, hi_num, k, mn, mx, se))
        total_width += w

    lo0 = (0,) * nv
    hi0 = (1,) * nv
    for ridx in range(len(regions)):
        push(ridx, lo0, hi0, 0)

    target = 0.9 * float(tol_frac)
    while heap and total_width > target and boxes_processed < max_boxes:
        neg_w, _, ridx, lo_num, hi_num, k, _, _, _ = heapq.heappop(heap)
        total_width += neg_w
        boxes_processed += 1
        for clo, chi, ck in _split_box(lo_num, hi_num, k):
            push(ridx, clo, chi, ck)

    # exact closing sweep: sign-resolved boxes integrate exactly, open boxes
    # contribute their rational brackets
    lower_parts: list[Fraction] = []
    upper_parts: list[Fraction] = []
    for ridx, lo_num, hi_num, k, sign in done:
        scaled = scaled_list[ridx]
        iv = sign * scaled.integral(lo_num, hi_num, k) * scaled.box_volume
        lower_parts.append(iv)
        upper_parts.append(iv)
    for _, _, ridx, lo_num, hi_num, k, mn, mx, se in heap:
        scaled = scaled_list[ridx]
        den_all = scaled.den * (1 << se)
        vol_full = scaled.dyadic_volume(lo_num, hi_num, k) * scaled.box_volume
        if threshold is not None and not (mx <= threshold * den_all and mn >= -threshold * den_all):
            cap = min(threshold, Fraction(max(abs(mn), abs(mx)), den_all))
            lower_parts.append(Fraction(0))
            upper_parts.append(vol_full * cap)
            continue
        iv = scaled.integral(lo_num, hi_num, k) * scaled.box_volume
        lb = abs(iv)
        cap1 = vol_full * Fraction(max(mx, -mn), den_all)
        cap2 = lb + 2 * vol_full * Fraction(min(mx, -mn), den_all)
        lower_parts.append(lb)
        upper_parts.append(min(cap1, cap2))
    lower = _fraction_sum(lower_parts)
    upper = _fraction_sum(upper_parts)

    converged = (upper - lower) <= tol_frac
    cert = MeasureCertificate(boxes=boxes_processed, depth=max_depth, converged=converged)
    result = MeasureResult(
        value=float((lower + upper) / 2),
        lower=lower,
        upper=upper,
        certificate=cert,
        witness_box=witness,
    )
    if strict and not converged:
        raise CertificationError(
            f"measure not certified to {tol}: bracket width {float(upper - lower)}"
        )
    return result


def _fraction_sum(parts: list[Fraction]) -> Fraction:
    """Balanced summation; pairwise merging keeps denominators small."""
    if not parts:
        return Fraction(0)
    items = list(parts)
    while len(items) > 1:
        merged = []
        for i in range(0, len(items) - 1, 2):
            merged.append(items[i] + items[i + 1])
        if len(items) % 2:
            merged.append(items[-1])
        items = merged
    return items[0]


def _to_region_box(regions, ridx, lo_num, hi_num, k):
    rlo, rhi = regions[ridx]
    den = 1 << k
    lo = tuple(rlo[i] + (rhi[i] - rlo[i]) * Fraction(lo_num[i], den) for i in range(len(rlo)))
    hi = tuple(rlo[i] + (rhi[i] - rlo[i]) * Fraction(hi_num[i], den) for i in range(len(rhi)))
    return (lo, hi)
