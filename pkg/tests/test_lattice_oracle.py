import numpy as np
import pytest

from lattice_spectra import lattice_oracle as lo
from lattice_spectra.determinant import find_eigenvalue_rank_one
from lattice_spectra.dispersion import PiecewisePhi, SteppedPhiA
from lattice_spectra.errors import FitFailure


def test_separable_coefficients_laplacian(lap):
    h = lo.build(lap, 6, a=1.0, b=1.0, mu=0.0)
    assert h.phi_row[0] == pytest.approx(1.0, abs=1e-12)
    assert h.phi_row[1] == pytest.approx(-0.5, abs=1e-12)
    assert np.max(np.abs(h.phi_row[2:])) < 1e-12


def test_separable_and_sparse_paths_agree(lap):
    h1 = lo.build(lap, 10, a=1.0, b=3.0, mu=1.0)
    h2 = lo.build(lap, 10, R=1, a=1.0, b=3.0, mu=1.0)
    v1 = lo.top_eigenvalues(h1, 5)
    v2 = lo.top_eigenvalues(h2, 5)
    assert np.max(np.abs(np.array(v1) - np.array(v2))) < 1e-12


def test_operator_matches_dense(lap):
    h = lo.build(lap, 5, a=1.0, b=2.0, mu=1.5)
    dense = h.dense_matrix()
    op = h.operator()
    rng = np.random.default_rng(2)
    x = rng.standard_normal(h.dimension)
    assert np.allclose(op @ x, dense @ x, atol=1e-12)
    assert np.allclose(dense, dense.T, atol=1e-12)


def test_free_box_stays_below_band_top(lap):
    h = lo.build(lap, 10, mu=0.0)
    top = lo.top_eigenvalues(h, 1)[0]
    assert top < 4.0


def test_sector_attribution_reference(lap):
    h = lo.build(lap, 20, a=1.0, b=3.0, mu=1.0)
    sc = lo.sector_count_above(h, 4.0, 1e-3, k=8)
    assert (sc.os, sc.oa, sc.ea, sc.es) == (1, 1, 1, 1)
    assert sc.total == 4
    assert not sc.ambiguous
    by_sector = {s: v for v, s in sc.entries}
    ref = find_eigenvalue_rank_one(lap, "os", 3.0, 1.0).energy
    assert by_sector["os"] == pytest.approx(ref, abs=1e-6)


def test_sector_count_empty(lap):
    h = lo.build(lap, 10, a=-1.0, b=-1.0, mu=2.0)
    sc = lo.sector_count_above(h, 4.0, 1e-3, k=6)
    assert sc.total == 0
    assert sc.entries == ()


def test_margin_must_be_positive(lap):
    h = lo.build(lap, 5, mu=0.0)
    with pytest.raises(ValueError):
        lo.sector_count_above(h, 4.0, 0.0)


def test_build_validation(lap):
    with pytest.raises(ValueError):
        lo.build(lap, 0)
    with pytest.raises(ValueError):
        lo.build(lap, 4, R=5)
    with pytest.raises(ValueError):
        # non-separable table model has no separable fast path
        from lattice_spectra.dispersion import ExponentialHopping
        model = ExponentialHopping(table=((0, 0, 2.0), (1, 1, -0.5), (-1, -1, -0.5)))
        lo.build(model, 4)


def test_extrapolate_geometric_exact():
    ls = (10, 20, 30)
    vals = [5 + 0.1 * 0.9 ** L for L in ls]
    limit, err = lo.extrapolate(ls, vals)
    assert limit == pytest.approx(5.0, abs=1e-10)
    assert err < 1e-2


def test_extrapolate_constant_sequence():
    limit, err = lo.extrapolate((1, 2, 3), (2.0, 2.0, 2.0))
    assert limit == 2.0
    assert err == 0.0


def test_extrapolate_four_points_error_estimate():
    ls = (10, 20, 30, 40)
    vals = [3 + 0.5 * 0.8 ** L for L in ls]
    limit, err = lo.extrapolate(ls, vals)
    assert limit == pytest.approx(3.0, abs=1e-8)


def test_extrapolate_failures():
    with pytest.raises(FitFailure):
        lo.extrapolate((1, 2, 3), (1.0, 2.0, 4.0))   # growing differences
    with pytest.raises(FitFailure):
        lo.extrapolate((1, 2, 3), (1.0, 2.0, 1.5))   # alternating
    with pytest.raises(ValueError):
        lo.extrapolate((1, 2), (1.0, 2.0))
    with pytest.raises(ValueError):
        lo.extrapolate((3, 2, 1), (1.0, 1.1, 1.11))


def test_eigen_csv(lap):
    h = lo.build(lap, 12, a=1.0, b=3.0, mu=1.0)
    text = lo.eigen_csv(h, 4.0, 1e-3, k=6)
    lines = text.strip().split("\n")
    assert lines[0] == "L,index,value,sector"
    assert len(lines) == 5
    assert lines[1].startswith("12,0,")


def test_separable_path_kinked_models():
    # box spectrum must stay below e_max for the free kinked models
    for model in (PiecewisePhi(eps=0.5), SteppedPhiA(a_param=0.4)):
        h = lo.build(model, 8, mu=0.0)
        top = lo.top_eigenvalues(h, 1)[0]
        assert top < float(model.e_max) + 1e-9
