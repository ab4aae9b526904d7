"""Numerical verification layer: fiber representation, Parseval defects,
full-frame energy, tiling re-check, Gram matrix."""

import math
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from nilframe.lattice import QuasiLatticeParams
from nilframe.spectral import SpectrumBox
from nilframe.verify import (
    BandlimitedField,
    TruncationSpec,
    apply_fiber_rep,
    fiber_parseval_defect,
    frame_energy_ratio,
    gaussian_profile,
    bump_profile,
    gram_orthonormality_check,
    make_aligned_grid,
    make_test_field,
    window_tiling_check,
)
from nilframe.windows import FieldNode, build_generator_field, synthesize_window


def F(*args):
    return Fraction(*args)


def make_node(spec, params, lam):
    """Single synthesized fiber with its normalization, outside any grid."""
    from nilframe.lattice import fiber_lattice

    lat = fiber_lattice(spec, params, lam)
    window = synthesize_window(lat)
    normalization = 1.0 / math.sqrt(float(params.prod_a) * abs(float(lat.det_b)))
    return FieldNode(lam=tuple(lam), window=window, normalization=normalization, lattice=lat)


def desk_params():
    return QuasiLatticeParams(a=(F(1),), q=(F(1),), b=(F(1),))


def desk_box():
    return SpectrumBox(a=(F(1),))


def desk_grid(points_per_cell=52):
    return make_aligned_grid((F(1),), cells_before=[2], cells_after=[3], points_per_cell=[points_per_cell])


@pytest.fixture(scope="module")
def desk_field(heisenberg_module):
    return build_generator_field(
        heisenberg_module, desk_params(), desk_box(), grid_shape=[16], role="frame"
    )


@pytest.fixture(scope="module")
def heisenberg_module():
    from nilframe.algebra import load_spec
    from conftest import HEISENBERG_DOC

    return load_spec(HEISENBERG_DOC, label="heisenberg")


class TestApplyFiberRep:
    def test_identity_element(self, heisenberg_module):
        grid = desk_grid()
        f = np.exp(-np.linspace(-2, 3, grid.counts[0]) ** 2)
        out = apply_fiber_rep(heisenberg_module, desk_params(), (F(1, 2),), ((0,), (0,)), f, grid)
        assert np.allclose(out, f)

    def test_pure_translation_shifts_by_cell(self, heisenberg_module):
        grid = desk_grid()
        f = np.zeros(grid.counts[0])
        f[100] = 1.0
        out = apply_fiber_rep(heisenberg_module, desk_params(), (F(1, 2),), ((0,), (1,)), f, grid)
        assert out[100 + grid.points_per_cell[0]] == 1.0
        assert out[100] == 0.0

    def test_zero_fill_from_outside(self, heisenberg_module):
        grid = desk_grid()
        f = np.ones(grid.counts[0])
        out = apply_fiber_rep(heisenberg_module, desk_params(), (F(1, 2),), ((0,), (1,)), f, grid)
        assert np.all(out[: grid.points_per_cell[0]] == 0.0)

    def test_heisenberg_modulation_phase(self, heisenberg_module):
        # k = 1, n = 0 multiplies by exp(-2 pi i lam x / q)
        grid = desk_grid()
        x = grid.axes()[0]
        f = np.ones(grid.counts[0], dtype=complex)
        lam = F(1, 2)
        out = apply_fiber_rep(heisenberg_module, desk_params(), (lam,), ((1,), (0,)), f, grid)
        expected = np.exp(-2j * np.pi * float(lam) * x)
        assert np.allclose(out, expected)


class TestFiberParsevalDefect:
    def test_gaussian_defect_small_and_halving(self, heisenberg_module):
        node = make_node(heisenberg_module, desk_params(), (F(1, 2),))
        grid = desk_grid()
        x = grid.axes()[0]
        test = np.exp(-((x - 0.5) ** 2) / (2 * 0.08**2)).astype(complex)
        t16 = TruncationSpec(m_half=(0,), k_half=(16,), n_half=(16,))
        t32 = TruncationSpec(m_half=(0,), k_half=(32,), n_half=(32,))
        d16 = fiber_parseval_defect(
            heisenberg_module, desk_params(), node, [test], t16, grid
        ).defect
        d32 = fiber_parseval_defect(
            heisenberg_module, desk_params(), node, [test], t32, grid
        ).defect
        assert d16 < 1e-3
        assert d32 <= d16 / 2

    def test_doubled_window_scale_gives_ratio_four(self, heisenberg_module):
        node = make_node(heisenberg_module, desk_params(), (F(1, 2),))
        bad = replace(node, window=replace(node.window, scale=2 * node.window.scale))
        grid = desk_grid()
        x = grid.axes()[0]
        test = np.exp(-((x - 0.5) ** 2) / (2 * 0.08**2)).astype(complex)
        t = TruncationSpec(m_half=(0,), k_half=(16,), n_half=(16,))
        rep = fiber_parseval_defect(heisenberg_module, desk_params(), bad, [test], t, grid)
        assert rep.energy_ratios[0] == pytest.approx(4.0, abs=1e-2)
        assert rep.defect == pytest.approx(3.0, abs=1e-2)

    def test_zero_window_ratio_zero(self, heisenberg_module):
        node = make_node(heisenberg_module, desk_params(), (F(1, 2),))
        bad = replace(node, window=replace(node.window, scale=0.0))
        grid = desk_grid()
        x = grid.axes()[0]
        test = np.exp(-((x - 0.5) ** 2) / (2 * 0.08**2)).astype(complex)
        t = TruncationSpec(m_half=(0,), k_half=(4,), n_half=(4,))
        rep = fiber_parseval_defect(heisenberg_module, desk_params(), bad, [test], t, grid)
        assert rep.energy_ratios[0] == 0.0
        assert rep.defect == 1.0

    def test_misaligned_grid_rejected(self, heisenberg_module):
        from nilframe.errors import MisalignedGridError

        grid = make_aligned_grid((F(1),), [2], [3], [52])
        other = QuasiLatticeParams(a=(F(1),), q=(F(1),), b=(F(2),))
        f = np.ones(grid.counts[0], dtype=complex)
        with pytest.raises(MisalignedGridError):
            apply_fiber_rep(heisenberg_module, other, (F(1, 2),), ((0,), (1,)), f, grid)

    def test_zero_test_function_rejected(self, heisenberg_module, desk_field):
        node = desk_field.nodes[0]
        grid = desk_grid()
        t = TruncationSpec(m_half=(0,), k_half=(1,), n_half=(1,))
        with pytest.raises(ValueError):
            fiber_parseval_defect(
                heisenberg_module, desk_params(), node, [np.zeros(grid.counts[0])], t, grid
            )


@pytest.fixture(scope="module")
def psi(heisenberg_module):
    grid = desk_grid()
    return make_test_field(
        heisenberg_module,
        desk_box(),
        [16],
        grid,
        spectral_profile=bump_profile(0.55, 0.12),
        space_profile=gaussian_profile([0.45], [0.07]),
    )


class TestFrameEnergyRatio:
    def test_parseval_ratio_close_to_one(self, heisenberg_module, desk_field, psi):
        trunc = TruncationSpec.default(1, 1)
        rep = frame_energy_ratio(psi, desk_field, heisenberg_module, desk_params(), trunc)
        assert rep.ratio == pytest.approx(1.0, abs=1e-2)
        assert rep.m_clipped  # 65 requested central indices vs 16 grid nodes

    def test_scalar_invariance(self, heisenberg_module, desk_field, psi):
        trunc = TruncationSpec(m_half=(8,), k_half=(6,), n_half=(6,))
        base = frame_energy_ratio(psi, desk_field, heisenberg_module, desk_params(), trunc)
        scaled = frame_energy_ratio(
            psi.scaled(2.5j - 1.0), desk_field, heisenberg_module, desk_params(), trunc
        )
        assert scaled.ratio == pytest.approx(base.ratio, rel=1e-12)

    def test_monotone_under_truncation_growth(self, heisenberg_module, desk_field, psi):
        energies = []
        for half in (2, 4, 8, 16):
            trunc = TruncationSpec(m_half=(half,), k_half=(half,), n_half=(half,))
            energies.append(
                frame_energy_ratio(psi, desk_field, heisenberg_module, desk_params(), trunc).energy
            )
        assert all(b >= a - 1e-15 for a, b in zip(energies, energies[1:]))

    def test_zero_truncation_strictly_below_one(self, heisenberg_module, desk_field, psi):
        trunc = TruncationSpec(m_half=(0,), k_half=(0,), n_half=(0,))
        rep = frame_energy_ratio(psi, desk_field, heisenberg_module, desk_params(), trunc)
        assert rep.ratio < 1.0

    def test_norm_matches_field_quadrature(self, heisenberg_module, desk_field, psi):
        trunc = TruncationSpec(m_half=(1,), k_half=(1,), n_half=(1,))
        rep = frame_energy_ratio(psi, desk_field, heisenberg_module, desk_params(), trunc)
        assert rep.norm_sq == pytest.approx(psi.norm_sq(), rel=1e-12)

    def test_generator_expanded_against_itself(self, heisenberg_module, desk_field):
        # psi = generator: samples of the indicator windows carry the whole
        # spectral mass, so the Parseval expansion reproduces it; indicator
        # jumps on the x-grid keep this a loose-tolerance check
        grid = desk_grid()
        x = grid.axes()[0]
        values = {}
        density = {}
        for node in desk_field.nodes:
            w = node.window.sample_grid([x]) * node.window.scale * node.normalization
            values[node.lam] = w.astype(complex)
            density[node.lam] = abs(float(node.lattice.det_b))
        psi_self = BandlimitedField(
            axes=desk_field.axes,
            x_grid=grid,
            values=values,
            density=density,
            cell_volume=float(desk_field.cell_volume),
        )
        trunc = TruncationSpec(m_half=(8,), k_half=(16,), n_half=(16,))
        rep = frame_energy_ratio(psi_self, desk_field, heisenberg_module, desk_params(), trunc)
        assert rep.ratio == pytest.approx(1.0, abs=5e-2)


class TestWindowTilingCheck:
    def test_synthesized_field_passes(self, desk_field):
        pairs = [(n.window, n.lattice) for n in desk_field.nodes[:4]]
        rep = window_tiling_check(pairs, resolution=9)
        assert rep.passed
        assert rep.max_tiling_deviation == 0
        assert rep.max_packing_count == 1

    def test_multi_piece_fiber_passes(self, example2):
        from nilframe.lattice import fiber_lattice
        from nilframe.windows import synthesize_window

        p = QuasiLatticeParams(a=(F(2), F(3)), q=(F(1), F(1)), b=(F(3), F(3)))
        lat = fiber_lattice(example2, p, (F(1, 2), F(23, 8)))
        w = synthesize_window(lat)
        rep = window_tiling_check([(w, lat)], resolution=4)
        assert rep.passed

    def test_deleted_piece_breaks_tiling(self, example2):
        from nilframe.lattice import fiber_lattice
        from nilframe.windows import synthesize_window

        p = QuasiLatticeParams(a=(F(2), F(3)), q=(F(1), F(1)), b=(F(3), F(3)))
        lat = fiber_lattice(example2, p, (F(1, 2), F(23, 8)))
        w = synthesize_window(lat)
        broken = replace(w, offsets=w.offsets[:-1])
        rep = window_tiling_check([(broken, lat)], resolution=4)
        assert not rep.passed
        assert rep.max_tiling_deviation >= 1

    def test_duplicated_piece_breaks_packing(self, heisenberg_module, desk_field):
        node = desk_field.nodes[3]
        w = node.window
        dup = replace(w, offsets=w.offsets + w.offsets)
        rep = window_tiling_check([(dup, node.lattice)], resolution=9)
        assert not rep.passed
        assert rep.max_packing_count >= 2


class TestTwoDimensionalFiber:
    def test_defect_small_at_volume_one_fiber(self, example2):
        # painless window on the d = 2 fiber of full lattice volume
        params = QuasiLatticeParams(a=(F(2), F(3)), q=(F(1), F(1)), b=(F(3), F(3)))
        node = make_node(example2, params, (F(0), F(3)))
        assert float(node.lattice.volume) == 1.0
        grid = make_aligned_grid((F(3), F(3)), [1, 1], [2, 2], [16, 16])
        mesh = grid.mesh()
        test = np.asarray(
            gaussian_profile([1 / 6, 1 / 6], [0.05, 0.05])(mesh), dtype=complex
        )
        trunc = TruncationSpec(m_half=(0, 0), k_half=(5, 5), n_half=(5, 5))
        rep = fiber_parseval_defect(example2, params, node, [test], trunc, grid)
        assert rep.defect < 1e-3

    def test_modulation_row_sums_to_window_norm_multipiece(self, example2):
        # exact structural oracle for the closed-form Gram on a many-piece
        # window: the support tiles under translations, so only the
        # modulation-only row survives, and its Parseval sum converges to
        # ||g||^2 from below (packing makes the torus expansion orthogonal)
        from nilframe.verify import _FiberGram

        params = QuasiLatticeParams(a=(F(2), F(3)), q=(F(1), F(1)), b=(F(3), F(3)))
        node = make_node(example2, params, (F(1, 2), F(23, 8)))
        assert node.window.piece_count > 1
        norm_sq = node.window.norm_sq
        gram = _FiberGram(node)
        zero = ((0, 0), (0, 0))
        # translated copies never meet the original support
        for n_vec in [(1, 0), (0, -1), (2, 1)]:
            assert abs(gram.entry(zero, ((0, 0), n_vec))) < 1e-12
        total = 0.0
        for k1 in range(-20, 21):
            for k2 in range(-20, 21):
                total += abs(gram.entry(((k1, k2), (0, 0)), zero)) ** 2
        assert total <= norm_sq * (1 + 1e-9)
        assert total >= 0.9 * norm_sq


class TestGram:
    def test_fiber_entry_matches_midpoint_quadrature(self, example2):
        # closed-form piece-pair integrals vs midpoint quadrature over a box
        # covering all translates; midpoint sampling keeps the indicator
        # quadrature second-order accurate
        from nilframe.verify import _fiber_gram_entry

        params = QuasiLatticeParams(a=(F(2), F(3)), q=(F(1), F(1)), b=(F(3), F(3)))
        node = make_node(example2, params, (F(1, 2), F(5, 2)))
        mod = np.array([[float(v) for v in row] for row in node.lattice.modulation])
        b_steps = [float(1 / x) for x in params.b]

        def oracle(gamma1, gamma2, pts):
            h = 1.0 / (3 * pts)  # translation cell 1/3 wide
            axes = [np.arange(-2 / 3, 4 / 3, h) + h / 2 for _ in range(2)]
            mesh = np.meshgrid(*axes, indexing="ij")

            def act(gamma):
                k_vec, n_vec = gamma
                shifted = [axes[t] - n_vec[t] * b_steps[t] for t in range(2)]
                w = node.window.sample_grid(shifted) * node.window.scale
                freq = mod @ np.array([float(k) for k in k_vec])
                phase = mesh[0] * freq[0] + mesh[1] * freq[1]
                return w * np.exp(2j * np.pi * phase)

            return np.sum(act(gamma1) * np.conj(act(gamma2))) * h * h

        for gamma1, gamma2 in [
            (((0, 0), (0, 0)), ((1, 0), (0, 0))),
            (((1, -1), (1, 0)), ((0, 1), (0, 1))),
            (((0, 0), (1, 1)), ((0, 0), (0, 0))),
        ]:
            closed = _fiber_gram_entry(node, node.lattice, gamma1, gamma2)
            coarse = abs(closed - oracle(gamma1, gamma2, 32))
            fine = abs(closed - oracle(gamma1, gamma2, 64))
            assert fine < 5e-4 * max(1.0, abs(closed))
            assert fine <= coarse + 1e-12  # quadrature converges toward the closed form

    def test_diagonal_is_generator_norm(self, heisenberg_module, desk_field):
        trunc = TruncationSpec(m_half=(0,), k_half=(1,), n_half=(1,))
        rep = gram_orthonormality_check(desk_field, desk_params(), trunc)
        # expected norm^2 = mu(box)/(prod a b q) = 1/2, up to grid quadrature
        assert rep.diagonal_value == pytest.approx(0.5, abs=1e-6)
        assert rep.max_diagonal_deviation == pytest.approx(0.5, abs=1e-6)

    def test_example2_diagonal_witness(self, example2):
        p = QuasiLatticeParams(a=(F(2), F(3)), q=(F(1), F(1)), b=(F(3), F(3)))
        box = SpectrumBox(a=(F(2), F(3)))
        field = build_generator_field(example2, p, box, grid_shape=[16, 24], role="frame")
        trunc = TruncationSpec(m_half=(0, 0), k_half=(0, 0), n_half=(0, 0))
        rep = gram_orthonormality_check(field, p, trunc)
        assert rep.diagonal_value == pytest.approx(23.0 / 81.0, rel=2e-2)
        assert abs(rep.diagonal_value - 1.0) > 0.5  # nowhere near a basis

    def test_offdiagonal_bounded_by_diagonal(self, heisenberg_module, desk_field):
        # Cauchy-Schwarz: no coherence can exceed the common norm of the system
        trunc = TruncationSpec(m_half=(1,), k_half=(1,), n_half=(1,))
        rep = gram_orthonormality_check(desk_field, desk_params(), trunc)
        assert rep.max_offdiagonal <= rep.diagonal_value + 1e-9

    def test_diagonal_real_nonnegative(self, heisenberg_module, desk_field):
        trunc = TruncationSpec(m_half=(0,), k_half=(2,), n_half=(2,))
        rep = gram_orthonormality_check(desk_field, desk_params(), trunc)
        assert rep.diagonal_value >= 0.0
