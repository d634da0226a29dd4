"""Full discrete spectrum above the band, phase diagram, eigenvalue curves,
and the constructive multiplicity-two example.

The operator decomposes over the four symmetry sectors, so the spectrum is
the union of the three rank-one roots and the zeros of the rank-two
determinant; counts follow the threshold table exactly.
"""

import concurrent.futures
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from . import sectors
from .determinant import (delta_es, find_eigenvalue_rank_one,
                          find_eigenvalues_es)
from .dispersion import SteppedPhiA, is_even_per_coordinate
from .errors import (DomainError, NotEvenPerCoordinate, SignChangeAbsent,
                     ZeroCoupling)
from .thresholds import NO_THRESHOLD, coupling_thresholds, gammas
from .torus_quad import FOUR_PI_SQ, default_spec, integrate_resolvent


@dataclass(frozen=True)
class SpectrumResult:
    records: tuple
    total_count: int

    def sector_counts(self):
        out = {s: 0 for s in sectors.SECTORS}
        for rec in self.records:
            out[rec.sector] += rec.multiplicity
        return out


def solve(model, a, b, mu, spec=None):
    """All eigenvalues above e_max for the coupling triple (a, b, mu)."""
    if a == 0 or b == 0:
        raise ZeroCoupling("couplings a, b must be nonzero")
    records = []
    for sector in sectors.RANK_ONE_SECTORS:
        rec = find_eigenvalue_rank_one(model, sector, b, mu, spec=spec)
        if rec is not None:
            records.append(rec)
    records.extend(find_eigenvalues_es(model, a, b, mu, spec=spec))
    return SpectrumResult(records=tuple(records),
                          total_count=sum(r.multiplicity for r in records))


def predicted_sector_counts(model, a, b, mu, spec=None):
    """Counts predicted by the threshold table (no root finding).

    Couplings within a relative 1e-9 of a threshold count as at-threshold:
    the computed mu0 carries quadrature error, and analytically equal
    thresholds (gamma_os = gamma_oa) differ in their last float digits.
    """
    ct = coupling_thresholds(model, a, b, spec=spec)

    def above(mu0):
        return mu > mu0 * (1 + 1e-9)

    out = {}
    for sector in sectors.RANK_ONE_SECTORS:
        mu0 = ct.mu0[sector]
        out[sector] = 1 if (mu0 is not NO_THRESHOLD and above(mu0)) else 0
    if a < 0 and b < 0:
        out["es"] = 0
    elif a * b < 0:
        if a + 4 * b >= 0:
            out["es"] = 1
        else:
            out["es"] = 1 if above(ct.mu0["es"]) else 0
    else:
        out["es"] = 2 if above(ct.mu0["es"]) else 1
    out["total"] = sum(out[s] for s in sectors.SECTORS)
    return out


# ---------------------------------------------------------------------------
# phase diagram
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhaseDiagramCell:
    a: float
    b: float
    count: int


@dataclass(frozen=True)
class PhaseDiagram:
    mu: float
    cells: tuple
    boundaries: dict

    def __hash__(self):
        return hash((self.mu, self.cells))


def phase_diagram(model, mu, a_grid, b_grid, spec=None, threads=1):
    """Eigenvalue counts over an (a, b) grid, plus threshold overlays."""
    a_grid = [float(a) for a in a_grid]
    b_grid = [float(b) for b in b_grid]
    if any(a == 0 for a in a_grid) or any(b == 0 for b in b_grid):
        raise ZeroCoupling("grids must exclude a = 0 and b = 0")

    pairs = [(a, b) for a in a_grid for b in b_grid]

    def count(pair):
        a, b = pair
        return solve(model, a, b, mu, spec=spec).total_count

    if threads and threads > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as ex:
            counts = list(ex.map(count, pairs))
    else:
        counts = [count(p) for p in pairs]

    cells = tuple(PhaseDiagramCell(a=a, b=b, count=c)
                  for (a, b), c in zip(pairs, counts))

    g = gammas(model, spec=spec)
    hyperbola = []
    for a in np.linspace(min(a_grid), max(a_grid), 101):
        den = mu * a - 4 * g.gamma_es
        if a != 0 and den != 0:
            b = a * g.gamma_es / den
            if b != 0:
                hyperbola.append((float(a), float(b)))
    boundaries = {
        "b_os": g.gamma_os / mu,
        "b_oa": g.gamma_oa / mu,
        "b_ea": g.gamma_ea / mu,
        "es_hyperbola": tuple(hyperbola),
    }
    return PhaseDiagram(mu=mu, cells=cells, boundaries=boundaries)


# ---------------------------------------------------------------------------
# eigenvalue curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CurveReport:
    sector: str
    mus: tuple
    energies: tuple
    strictly_increasing: bool
    min_first_difference: float
    min_second_difference: float


def eigenvalue_curve(model, sector, a, b, mu_grid, spec=None, branch=1):
    """E(mu) along an increasing mu grid in one sector.

    For the rank-two sector, ``branch`` selects the record by descending
    energy (1 = largest).
    """
    mu_grid = [float(m) for m in mu_grid]
    if any(m2 <= m1 for m1, m2 in zip(mu_grid, mu_grid[1:])):
        raise ValueError("mu grid must be strictly increasing")
    energies = []
    for mu in mu_grid:
        if sector in sectors.RANK_ONE_SECTORS:
            rec = find_eigenvalue_rank_one(model, sector, b, mu, spec=spec)
            if rec is None:
                raise DomainError(
                    f"no {sector} eigenvalue at mu = {mu:g} (outside existence range)")
            energies.append(rec.energy)
        else:
            recs = find_eigenvalues_es(model, a, b, mu, spec=spec)
            if len(recs) < branch:
                raise DomainError(
                    f"es branch {branch} absent at mu = {mu:g}")
            energies.append(recs[branch - 1].energy)
    e = np.array(energies)
    d1 = np.diff(e)
    d2 = np.diff(e, 2)
    return CurveReport(sector=sector, mus=tuple(mu_grid), energies=tuple(energies),
                       strictly_increasing=bool(np.all(d1 > 0)),
                       min_first_difference=float(np.min(d1)) if len(d1) else 0.0,
                       min_second_difference=float(np.min(d2)) if len(d2) else 0.0)


# ---------------------------------------------------------------------------
# triple emergence
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TripleEmergenceReport:
    b: float
    a: float
    mu0: float
    count_below: int
    count_above: int
    jump: int


def triple_emergence_check(model, b, delta_rel=0.1, spec=None):
    """Tune a so the odd-sector and rank-two thresholds coincide, then verify
    the simultaneous release of three eigenvalues across the common threshold.

    The crossing is probed at mu0 (1 +- delta_rel); the default 10% offset
    keeps the exponentially emerging rank-two root resolvable.
    """
    if not is_even_per_coordinate(model):
        raise NotEvenPerCoordinate(
            "triple emergence requires a per-coordinate-even dispersion")
    if b <= 0:
        raise ZeroCoupling("b must be positive")
    g = gammas(model, spec=spec)
    if g.gamma_os <= g.gamma_es:
        raise DomainError("no positive a solves the threshold matching")
    a = 4 * b * g.gamma_es / (g.gamma_os - g.gamma_es)

    ct = coupling_thresholds(model, a, b, spec=spec)
    mu0 = ct.mu0["os"]
    if abs(mu0 - ct.mu0["es"]) > 1e-10 * mu0:
        raise DomainError("threshold matching failed beyond tolerance")

    below = solve(model, a, b, mu0 * (1 - delta_rel), spec=spec).total_count
    above = solve(model, a, b, mu0 * (1 + delta_rel), spec=spec).total_count
    return TripleEmergenceReport(b=b, a=a, mu0=mu0, count_below=below,
                                 count_above=above, jump=above - below)


# ---------------------------------------------------------------------------
# multiplicity-two construction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MultiplicityTwoConstruction:
    z0: float
    mu: float
    A0: float
    a0: float
    b0: float
    g_residual: float
    verification: tuple  # (|Delta1|, |Delta2|, |Delta3|) at (mu, z0)


def _g_of_a(a_param, z0, spec):
    model = SteppedPhiA(a_param=a_param)
    sp = spec if spec is not None else default_spec(model)
    return integrate_resolvent(model, sectors.es_cos_sum, k=1, spec=sp,
                               alpha=z0 - 1.0).value


def multiplicity_two_construct(z0, mu=1.0, spec=None, scan=False, scan_step=1e-3):
    """Find A0 with G_{z0}(A0) = 0 in the stepped family, then the couplings
    (a0, b0) that make z0 a multiplicity-two eigenvalue at coupling mu.

    G_{z0}(A) = int (cos p1 + cos p2)/(z0 - e_A); its zero kills the
    off-diagonal determinant component, and a0, b0 are chosen to zero the two
    diagonal components at the same z0.
    """
    if z0 <= 1.0:
        raise DomainError("z0 must exceed the family band top e_max = 1")
    if mu <= 0:
        raise ValueError("mu must be positive")

    g = lambda A: _g_of_a(A, z0, spec)
    g_lo, g_hi = g(0.0), g(1.0)
    if not (g_lo < 0.0 < g_hi):
        raise SignChangeAbsent(
            f"G(0) = {g_lo:g}, G(1) = {g_hi:g}: no sign change")

    if scan:
        grid = np.arange(0.0, 1.0 + scan_step / 2, scan_step)
        vals = [g_lo] + [g(A) for A in grid[1:-1]] + [g_hi]
        brackets = [(grid[i], grid[i + 1]) for i in range(len(grid) - 1)
                    if (vals[i] < 0) != (vals[i + 1] < 0)]
        lo, hi = brackets[0]  # smallest root
    else:
        lo, hi = 0.0, 1.0
    a0_param = scipy.optimize.brentq(g, lo, hi, xtol=1e-13, rtol=8.9e-16)
    g_res = g(a0_param)

    model = SteppedPhiA(a_param=a0_param)
    sp = spec if spec is not None else default_spec(model)
    alpha = z0 - 1.0
    i1 = integrate_resolvent(model, sectors.es_one, k=1, spec=sp, alpha=alpha).value
    i2 = integrate_resolvent(model, sectors.es_cos_sum_sq, k=1, spec=sp, alpha=alpha).value
    a0 = FOUR_PI_SQ / (mu * i1)
    b0 = FOUR_PI_SQ / (mu * i2)

    parts = delta_es(model, a0, b0, mu, spec=sp, alpha=alpha)
    return MultiplicityTwoConstruction(
        z0=z0, mu=mu, A0=a0_param, a0=a0, b0=b0, g_residual=abs(g_res),
        verification=(abs(parts.delta1), abs(parts.delta2), abs(parts.delta3)))
