import numpy as np
import pytest

from lattice_spectra import spectrum
from lattice_spectra.dispersion import PI, PiecewisePhi
from lattice_spectra.errors import (DomainError, NotEvenPerCoordinate,
                                    ZeroCoupling)


def test_solve_reference_config(lap):
    res = spectrum.solve(lap, 1.0, 3.0, 1.0)
    assert res.total_count == 4
    assert res.sector_counts() == {"os": 1, "oa": 1, "ea": 1, "es": 1}
    energies = sorted(r.energy for r in res.records)
    assert energies[0] == pytest.approx(5.088580139631247, abs=1e-9)
    assert energies[-1] == pytest.approx(5.728722156053265, abs=1e-9)


def test_solve_zero_coupling(lap):
    with pytest.raises(ZeroCoupling):
        spectrum.solve(lap, 0.0, 1.0, 1.0)


@pytest.mark.parametrize("a,b,mu", [
    (1.0, 1.0, 3.0), (-1.0, 1.0, 2.0), (2.0, -1.0, 2.0),
    (-1.0, -1.0, 4.0), (1.0, 2.0, 0.9),
])
def test_solve_matches_predicted_counts(lap, a, b, mu):
    pred = spectrum.predicted_sector_counts(lap, a, b, mu)
    got = spectrum.solve(lap, a, b, mu).sector_counts()
    for s in ("os", "oa", "ea", "es"):
        assert got[s] == pred[s], (a, b, mu, s)


def test_phase_diagram_small_grid(lap):
    a_grid = [-1.0, 1.0]
    b_grid = [-1.0, 1.0]
    pd = spectrum.phase_diagram(lap, 3.0, a_grid, b_grid)
    assert len(pd.cells) == 4
    by_pair = {(c.a, c.b): c.count for c in pd.cells}
    assert by_pair[(-1.0, -1.0)] == 0
    assert by_pair[(1.0, 1.0)] == 5
    assert set(pd.boundaries) == {"b_os", "b_oa", "b_ea", "es_hyperbola"}
    assert pd.boundaries["b_os"] == pytest.approx(PI / (2 * PI - 4) / 3.0, rel=1e-6)


def test_phase_diagram_threads_agree(lap):
    grid = [-1.0, 1.0]
    pd1 = spectrum.phase_diagram(lap, 2.0, grid, grid, threads=1)
    pd2 = spectrum.phase_diagram(lap, 2.0, grid, grid, threads=2)
    assert [c.count for c in pd1.cells] == [c.count for c in pd2.cells]


def test_phase_diagram_rejects_zero_grid(lap):
    with pytest.raises(ZeroCoupling):
        spectrum.phase_diagram(lap, 1.0, [0.0, 1.0], [1.0])


def test_eigenvalue_curve_increasing(lap):
    rep = spectrum.eigenvalue_curve(lap, "ea", 1.0, 1.0,
                                    np.linspace(2.0, 2.5, 5))
    assert rep.strictly_increasing
    assert rep.energies[0] == pytest.approx(4.1472654125271546, abs=1e-9)
    assert rep.min_second_difference > -1e-10


def test_eigenvalue_curve_absent_sector(lap):
    with pytest.raises(DomainError):
        spectrum.eigenvalue_curve(lap, "os", 1.0, -1.0, [1.0, 2.0])
    with pytest.raises(ValueError):
        spectrum.eigenvalue_curve(lap, "os", 1.0, 1.0, [2.0, 1.5])


def test_triple_emergence(lap):
    rep = spectrum.triple_emergence_check(lap, 1.0)
    assert rep.a == pytest.approx(2 * PI - 4, rel=1e-6)
    assert rep.mu0 == pytest.approx(PI / (2 * PI - 4), rel=1e-6)
    assert rep.jump == 3
    assert rep.count_below == 1
    assert rep.count_above == 4


def test_triple_emergence_requires_even_model(lap):
    from lattice_spectra.dispersion import ExponentialHopping
    # e(p) = 2 - cos(p1 + p2) is jointly even but not even per coordinate
    skew = ExponentialHopping(table=(
        (0, 0, 2.0), (1, 1, -0.5), (-1, -1, -0.5)))
    with pytest.raises(NotEvenPerCoordinate):
        spectrum.triple_emergence_check(skew, 1.0)


def test_multiplicity_two_construct_frozen():
    res = spectrum.multiplicity_two_construct(1.5, mu=1.0)
    assert res.A0 == pytest.approx(0.6862262237980128, abs=1e-6)
    assert res.a0 == pytest.approx(1.0730279128660294, abs=1e-6)
    assert res.b0 == pytest.approx(0.9773079172198559, abs=1e-6)
    assert res.g_residual < 1e-10
    assert max(res.verification) < 1e-8


def test_multiplicity_two_invalid_z0():
    with pytest.raises(DomainError):
        spectrum.multiplicity_two_construct(0.9)
    with pytest.raises(ValueError):
        spectrum.multiplicity_two_construct(1.5, mu=-1.0)


def test_multiplicity_two_verified_by_determinant():
    from lattice_spectra.determinant import multiplicity_check
    from lattice_spectra.dispersion import SteppedPhiA
    res = spectrum.multiplicity_two_construct(1.5, mu=1.0)
    model = SteppedPhiA(a_param=res.A0)
    assert multiplicity_check(model, res.a0, res.b0, 1.0, 1.5)
