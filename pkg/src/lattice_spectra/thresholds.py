"""Sector constants, coupling thresholds, and threshold-solution classes.

gamma_omega is the reciprocal of the normalized threshold integral of the
squared sector weight; the coupling threshold in a rank-one sector is
gamma_omega / b (for b > 0), and in the rank-two even-symmetric sector
(a + 4b) gamma_es / (ab) when that is positive.
"""

import enum
import io
import csv
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import sectors
from .dispersion import PI, is_even_per_coordinate, wrap_torus
from .errors import NotIntegrable, NumericalError, ZeroCoupling
from .torus_quad import (FOUR_PI_SQ, chi_cutoff, default_spec,
                         integrate_threshold)

NO_THRESHOLD = None  # sentinel: no eigenvalue for any coupling in that sector


@dataclass(frozen=True)
class SectorConstants:
    gamma_os: float
    gamma_oa: float
    gamma_ea: float
    gamma_es: float


@dataclass(frozen=True)
class EsConstants:
    theta_star: float
    theta_2star: float
    kappa1: float


@lru_cache(maxsize=32)
def gammas(model, spec=None):
    """The four sector constants gamma_omega (cached per model)."""
    out = {}
    weights = {"os": sectors.w_os_sq, "oa": sectors.w_oa_sq,
               "ea": sectors.w_ea_sq, "es": sectors.es_plus_sq}
    for name, w in weights.items():
        val = integrate_threshold(model, w, k=1, spec=spec).value / FOUR_PI_SQ
        if val <= 0:
            raise NumericalError(f"threshold integral for {name} not positive")
        out[name] = 1.0 / val
    return SectorConstants(gamma_os=out["os"], gamma_oa=out["oa"],
                           gamma_ea=out["ea"], gamma_es=out["es"])


@lru_cache(maxsize=32)
def es_constants(model, spec=None):
    """Theta*, Theta**, kappa1 from their k = 1 threshold integrals."""
    theta_star = integrate_threshold(model, sectors.es_plus, k=1,
                                     spec=spec).value / FOUR_PI_SQ
    theta_2star = integrate_threshold(model, sectors.es_theta2_weight, k=1,
                                      spec=spec).value / FOUR_PI_SQ
    kappa1 = integrate_threshold(model, sectors.es_kappa1_weight, k=1,
                                 spec=spec).value / FOUR_PI_SQ
    return EsConstants(theta_star=theta_star, theta_2star=theta_2star,
                       kappa1=kappa1)


@dataclass(frozen=True)
class CouplingThresholds:
    a: float
    b: float
    mu0: dict          # sector -> threshold, or NO_THRESHOLD sentinel
    even_per_coordinate: bool

    def __hash__(self):  # mu0 is a plain dict; hash by couplings only
        return hash((self.a, self.b))


def _check_couplings(a, b):
    if a == 0 or b == 0:
        raise ZeroCoupling("couplings a, b must be nonzero reals")


def coupling_thresholds(model, a, b, spec=None):
    _check_couplings(a, b)
    g = gammas(model, spec=spec)
    even = is_even_per_coordinate(model)
    if even and abs(g.gamma_os - g.gamma_oa) > 1e-8 * g.gamma_os:
        raise NumericalError(
            "gamma_os and gamma_oa must coincide for per-coordinate-even models")
    mu0 = {}
    for name, gamma in (("os", g.gamma_os), ("oa", g.gamma_oa), ("ea", g.gamma_ea)):
        mu0[name] = gamma / b if b > 0 else NO_THRESHOLD
    ratio = (a + 4 * b) / (a * b)
    mu0["es"] = ratio * g.gamma_es if ratio > 0 else 0.0
    return CouplingThresholds(a=a, b=b, mu0=mu0, even_per_coordinate=even)


class ThresholdKind(enum.Enum):
    RESONANCE = "resonance"
    EIGENFUNCTION = "eigenfunction"
    NO_SOLUTION = "no_solution"
    NOT_APPLICABLE = "not_applicable"


@dataclass(frozen=True)
class ThresholdClassification:
    os: ThresholdKind
    oa: ThresholdKind
    ea: ThresholdKind
    es: ThresholdKind

    def as_dict(self):
        return {"os": self.os.value, "oa": self.oa.value,
                "ea": self.ea.value, "es": self.es.value}


def classify_threshold_solutions(model, a, b, spec=None, tol=1e-8):
    """Per-sector solution type at the coupling threshold.

    Odd sectors emit a resonance (L1 but not L2 profile), the even
    swap-antisymmetric sector a genuine threshold eigenfunction; the
    rank-two sector has an eigenfunction exactly on the line
    theta_star * a = theta_2star * b and no nonzero solution off it.
    """
    _check_couplings(a, b)
    rank_one = ThresholdKind.RESONANCE if b > 0 else ThresholdKind.NOT_APPLICABLE
    ea = ThresholdKind.EIGENFUNCTION if b > 0 else ThresholdKind.NOT_APPLICABLE
    if (a + 4 * b) / (a * b) > 0:
        th = es_constants(model, spec=spec)
        num = abs(th.theta_star * a - th.theta_2star * b)
        den = abs(th.theta_star * a) + abs(th.theta_2star * b)
        es = ThresholdKind.EIGENFUNCTION if num <= tol * den else ThresholdKind.NO_SOLUTION
    else:
        es = ThresholdKind.NOT_APPLICABLE
    return ThresholdClassification(os=rank_one, oa=rank_one, ea=ea, es=es)


def threshold_profile(model, sector, a=1.0, b=1.0):
    """The candidate threshold solution Phi_omega as a callable on the torus."""
    e_max = float(model.e_max)

    def deficit(p1, p2):
        d = e_max - model.values(p1, p2)
        return np.maximum(d, 1e-300)

    if sector in sectors.RANK_ONE_SECTORS:
        w = sectors.RANK_ONE_WEIGHTS[sector]
        return lambda p1, p2: w(p1, p2) / deficit(p1, p2)
    # es eigenfunction branch: (theta_2star b + theta_star(cos p1 + cos p2) b)
    # profile shape reduces to es_plus / deficit on the eigenfunction line
    return lambda p1, p2: sectors.es_plus(p1, p2) / deficit(p1, p2)


@dataclass(frozen=True)
class GrowthReport:
    sector: str
    rs: tuple
    values: tuple
    classification: str   # "log-divergent" | "convergent"
    slope: float
    r_squared: float
    cauchy_diffs: tuple


def _annulus_integral(model, v, r_in, r_out, n_r=160, n_theta=128):
    """Exact polar integral of v over the annulus r_in <= r <= r_out around
    pi_vec, with Gauss nodes in ln r to resolve the 1/r^2 growth."""
    xg, wg = np.polynomial.legendre.leggauss(32)
    edges = np.geomspace(r_in, r_out, max(2, n_r // 32) + 1)
    ls, ws = [], []
    for lo, hi in zip(np.log(edges[:-1]), np.log(edges[1:])):
        mid, half = (lo + hi) / 2, (hi - lo) / 2
        ls.append(mid + half * xg)
        ws.append(half * wg)
    s = np.concatenate(ls)
    wr = np.concatenate(ws)
    r = np.exp(s)
    theta = (np.arange(n_theta) + 0.5) * (2 * PI / n_theta)
    u1 = r[:, None] * np.cos(theta)[None, :]
    u2 = r[:, None] * np.sin(theta)[None, :]
    vv = np.asarray(v(wrap_torus(PI + u1), wrap_torus(PI + u2)), dtype=float)
    # area element r dr dtheta = r^2 ds dtheta in the log variable
    return float(np.sum((wr * r * r)[:, None] * vv) * (2 * PI / n_theta))


def resonance_integrability_probe(model, sector, a=1.0, b=1.0, r_sequence=None,
                                  spec=None):
    """Numerical L2 probe of the threshold profile.

    I(r) = (1/4pi^2) int_{T2 minus B_r} |Phi_omega|^2: fitted against
    ln(1/r); a good linear fit flags the resonance (log-divergent) case,
    vanishing Cauchy differences the square-integrable case.
    """
    if sector in sectors.RANK_ONE_SECTORS:
        if b <= 0:
            raise ZeroCoupling("probe requires b > 0 in the rank-one sectors")
    else:
        cls = classify_threshold_solutions(model, a, b)
        if cls.es is not ThresholdKind.EIGENFUNCTION:
            raise NotIntegrable(
                "es probe requires the threshold-eigenfunction coupling line")
    spec = spec or default_spec(model)
    delta = spec.patch_radius
    rs = np.asarray(r_sequence if r_sequence is not None
                    else np.geomspace(1e-4, 1e-1, 13), dtype=float)
    rs = np.sort(rs)[::-1]
    inner_edge = delta / 2 * 0.999
    if np.max(rs) > inner_edge:
        raise ValueError("r sequence must stay inside the analytic patch")

    prof = threshold_profile(model, sector, a, b)
    vsq = lambda p1, p2: prof(p1, p2) ** 2

    # fixed outer part: torus minus B_delta, via the far-field machinery
    from .torus_quad import _far_grids
    fine, _ = _far_grids(model, spec.grid_n, delta)
    outer = float(np.sum(fine["w"] * vsq(fine["p1"], fine["p2"])))
    # plus the chi-weighted ring between delta/2 and delta that the far grid
    # down-weights: add it exactly from the annulus rule
    ring = _annulus_integral(
        model, lambda p1, p2: chi_cutoff(
            np.hypot(wrap_torus(p1 - PI), wrap_torus(p2 - PI)), delta) * vsq(p1, p2),
        inner_edge, delta)
    base = outer + ring

    values = []
    for r in rs:
        values.append((base + _annulus_integral(model, vsq, r, inner_edge))
                      / FOUR_PI_SQ)
    values = np.array(values)

    x = np.log(1.0 / rs)
    slope, intercept = np.polyfit(x, values, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((values - fitted) ** 2))
    ss_tot = float(np.sum((values - values.mean()) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    diffs = tuple(float(abs(values[i + 1] - values[i])) for i in range(len(rs) - 1))

    # convergent when the tail Cauchy differences are negligible; divergent
    # when the linear log fit explains the growth
    tail_diffs = [d for r, d in zip(rs[1:], diffs) if r <= 1e-3] or list(diffs[-2:])
    if max(tail_diffs) < 1e-6:
        classification = "convergent"
    else:
        classification = "log-divergent" if r_squared > 0.999 else "convergent"
    return GrowthReport(sector=sector, rs=tuple(float(r) for r in rs),
                        values=tuple(float(v) for v in values),
                        classification=classification, slope=float(slope),
                        r_squared=float(r_squared), cauchy_diffs=diffs)


def constants_csv(models_with_names):
    """CSV rows of the sector and es constants for a list of (name, model)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["model", "gamma_os", "gamma_oa", "gamma_ea", "gamma_es",
                     "theta_star", "theta_2star", "kappa1"])
    for name, model in models_with_names:
        g = gammas(model)
        th = es_constants(model)
        writer.writerow([name] + [format(x, ".17g") for x in
                                  (g.gamma_os, g.gamma_oa, g.gamma_ea, g.gamma_es,
                                   th.theta_star, th.theta_2star, th.kappa1)])
    return buf.getvalue()
