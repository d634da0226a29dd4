"""Dispersion relations on the torus (-pi, pi]^2 and their maximum data.

Four model kinds are provided; each satisfies (or is validated against) the
standing hypotheses: real, even, swap-symmetric, with a unique non-degenerate
maximum at pi_vec = (pi, pi).  All downstream quadrature leans on two pieces
of exact structure exposed here:

  * ``e_max`` is stored analytically per kind, so the spectral offset
    alpha = z - e_max is never computed by cancellation-prone subtraction;
  * ``deficit(u1, u2)`` evaluates e_max - e(pi_vec + u) in a numerically
    stable form (half-angle identities), accurate in *relative* terms down to
    |u| ~ 1e-8 where the naive difference loses every digit.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.optimize

from .errors import DegenerateHessian, NonMaxAtPi

PI = np.pi
PI_VEC = (np.pi, np.pi)


def wrap_torus(t):
    """Map angles to the fundamental domain (-pi, pi]."""
    t = np.asarray(t, dtype=float)
    out = np.mod(t + PI, 2 * PI) - PI
    # mod sends pi to -pi; put it back on the closed right end
    return np.where(out == -PI, PI, out)


# ---------------------------------------------------------------------------
# model kinds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscreteLaplacian:
    """e(p) = 2 - cos p1 - cos p2 (negative discrete Laplacian symbol)."""

    kind = "laplacian"
    e_max = 4.0
    analytic_radius = np.inf
    grid_n_default = 256
    breakpoints = None  # smooth on the whole torus

    def values(self, p1, p2):
        return 2.0 - np.cos(p1) - np.cos(p2)

    def deficit(self, u1, u2):
        # 4 - e(pi+u) = (1 - cos u1) + (1 - cos u2)
        return 2.0 * np.sin(u1 / 2) ** 2 + 2.0 * np.sin(u2 / 2) ** 2

    def hessian_at_max(self):
        return np.array([[-1.0, 0.0], [0.0, -1.0]])

    def phi_pieces(self):
        # separable profile g with e(p) = g(p1) + g(p2), pieces on [0, pi]
        return ((0.0, PI, lambda t: 1.0 - np.cos(t)),)


@dataclass(frozen=True)
class ExponentialHopping:
    """Finite hopping table: e(p) = sum_x ehat(x) exp(i p.x).

    ``table`` is a tuple of (x1, x2, value) covering every nonzero entry,
    including both members of each +-x pair; values must be real with
    ehat(x) = ehat(-x), which makes e real.
    """

    table: tuple

    kind = "hopping"
    breakpoints = None
    grid_n_default = 256

    def __post_init__(self):
        entries = {(int(x1), int(x2)): float(v) for x1, x2, v in self.table}
        object.__setattr__(self, "table",
                           tuple(sorted((x1, x2, v) for (x1, x2), v in entries.items())))
        for (x1, x2), v in entries.items():
            if entries.get((-x1, -x2)) != v:
                raise ValueError("hopping table must satisfy ehat(x) = ehat(-x)")

    @property
    def e_max(self):
        return sum(v * (-1) ** (x1 + x2) for x1, x2, v in self.table)

    @property
    def analytic_radius(self):
        return np.inf  # trigonometric polynomial

    def values(self, p1, p2):
        p1 = np.asarray(p1, dtype=float)
        p2 = np.asarray(p2, dtype=float)
        out = np.zeros(np.broadcast(p1, p2).shape)
        for x1, x2, v in self.table:
            out += v * np.cos(x1 * p1 + x2 * p2)
        return out

    def deficit(self, u1, u2):
        u1 = np.asarray(u1, dtype=float)
        u2 = np.asarray(u2, dtype=float)
        out = np.zeros(np.broadcast(u1, u2).shape)
        for x1, x2, v in self.table:
            sgn = (-1) ** (x1 + x2)
            out += v * sgn * 2.0 * np.sin((x1 * u1 + x2 * u2) / 2) ** 2
        return out

    def hessian_at_max(self):
        h = np.zeros((2, 2))
        for x1, x2, v in self.table:
            sgn = (-1) ** (x1 + x2)
            h -= v * sgn * np.array([[x1 * x1, x1 * x2], [x1 * x2, x2 * x2]], dtype=float)
        return h

    def phi_pieces(self):
        return None


@dataclass(frozen=True)
class PiecewisePhi:
    """Separable kinked profile: e = phi(p1) + phi(p2),
    phi(t) = -cos t - cos(eps) for |t| > pi - eps, else 0, with eps in (0,1)."""

    eps: float

    kind = "piecewise_phi"
    grid_n_default = 1024

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise ValueError("eps must lie in (0, 1)")

    @property
    def e_max(self):
        return 2.0 * (1.0 - np.cos(self.eps))

    @property
    def analytic_radius(self):
        return 0.9 * self.eps

    @property
    def breakpoints(self):
        return (-(PI - self.eps), PI - self.eps)

    def phi(self, t):
        t = wrap_torus(t)
        return np.where(np.abs(t) > PI - self.eps, -np.cos(t) - np.cos(self.eps), 0.0)

    def values(self, p1, p2):
        return self.phi(p1) + self.phi(p2)

    def deficit(self, u1, u2):
        # valid on the analytic patch |u_i| < eps:
        # phi_max - phi(pi+u) = 1 - cos u
        return 2.0 * np.sin(u1 / 2) ** 2 + 2.0 * np.sin(u2 / 2) ** 2

    def hessian_at_max(self):
        return np.array([[-1.0, 0.0], [0.0, -1.0]])

    def phi_pieces(self):
        eps = self.eps
        return ((0.0, PI - eps, lambda t: np.zeros_like(np.asarray(t, dtype=float))),
                (PI - eps, PI, lambda t: -np.cos(t) - np.cos(eps)))


@dataclass(frozen=True)
class SteppedPhiA:
    """One-parameter kinked family used for the multiplicity-two construction.

    phi_A(t) = A cos t on |t| <= pi/2, 0 on pi/2 < |t| <= 3pi/4, cos 2t on
    3pi/4 < |t| <= pi; the dispersion is e_A(p) = (phi_A(p1) + phi_A(p2))/2,
    normalized so e_max = e_A(pi_vec) = 1 and e_min = 0 for every A in [0,1].
    The maximum at pi_vec is unique iff A < 1 (at A = 1 the value 1 is also
    attained at (0,0), (0,pi), (pi,0)).
    """

    a_param: float

    kind = "stepped_phi"
    e_max = 1.0
    grid_n_default = 1024
    analytic_radius = 0.9 * (PI / 4)
    breakpoints = (-3 * PI / 4, -PI / 2, PI / 2, 3 * PI / 4)

    def __post_init__(self):
        if not 0.0 <= self.a_param <= 1.0:
            raise ValueError("A must lie in [0, 1]")

    def phi(self, t):
        t = np.abs(wrap_torus(t))
        return np.where(t <= PI / 2, self.a_param * np.cos(t),
                        np.where(t <= 3 * PI / 4, 0.0, np.cos(2 * t)))

    def values(self, p1, p2):
        return 0.5 * (self.phi(p1) + self.phi(p2))

    def deficit(self, u1, u2):
        # valid for |u_i| < pi/4: 1 - cos 2u = 2 sin^2 u, halved per axis
        return np.sin(u1) ** 2 + np.sin(u2) ** 2

    def hessian_at_max(self):
        return np.array([[-2.0, 0.0], [0.0, -2.0]])

    def phi_pieces(self):
        a = self.a_param
        return ((0.0, PI / 2, lambda t: 0.5 * a * np.cos(t)),
                (PI / 2, 3 * PI / 4, lambda t: np.zeros_like(np.asarray(t, dtype=float))),
                (3 * PI / 4, PI, lambda t: 0.5 * np.cos(2 * t)))


MODEL_KINDS = {
    "laplacian": DiscreteLaplacian,
    "hopping": ExponentialHopping,
    "piecewise_phi": PiecewisePhi,
    "stepped_phi": SteppedPhiA,
}


def evaluate(model, p):
    """Pointwise dispersion value e(p) for p = (p1, p2)."""
    p1, p2 = p
    return float(model.values(np.asarray(p1, dtype=float), np.asarray(p2, dtype=float)))


# ---------------------------------------------------------------------------
# Morse data at the maximizer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MorseData:
    e_max: float
    e_min: float
    maximizer: tuple
    hessian: tuple  # 2x2, row tuples
    j_psi0: float
    j0: float
    psi_deriv_sq: tuple  # ((dpsi/dy1)^2, (dpsi/dy2)^2) or None

    @property
    def hessian_matrix(self):
        return np.array(self.hessian)


def _fd_gradient(model, p, h=1e-6):
    p1, p2 = p
    g1 = (model.values(p1 + h, p2) - model.values(p1 - h, p2)) / (2 * h)
    g2 = (model.values(p1, p2 + h) - model.values(p1, p2 - h)) / (2 * h)
    return np.array([float(g1), float(g2)])


def _fd_hessian(model, p, h=1e-5):
    def hess(step):
        p1, p2 = p
        f = lambda a, b: float(model.values(a, b))
        f0 = f(p1, p2)
        d11 = (f(p1 + step, p2) - 2 * f0 + f(p1 - step, p2)) / step ** 2
        d22 = (f(p1, p2 + step) - 2 * f0 + f(p1, p2 - step)) / step ** 2
        d12 = (f(p1 + step, p2 + step) - f(p1 + step, p2 - step)
               - f(p1 - step, p2 + step) + f(p1 - step, p2 - step)) / (4 * step ** 2)
        return np.array([[d11, d12], [d12, d22]])

    # one Richardson step: error O(h^2) -> O(h^4)
    return (4.0 * hess(h / 2) - hess(h)) / 3.0


def _refine_max(model, p0, steps=60):
    """Newton iteration on the finite-difference gradient."""
    p = np.array(p0, dtype=float)
    for _ in range(steps):
        g = _fd_gradient(model, p)
        if np.max(np.abs(g)) < 1e-13:
            break
        h = _fd_hessian(model, p)
        try:
            dp = np.linalg.solve(h, -g)
        except np.linalg.LinAlgError:
            break
        dp = np.clip(dp, -0.2, 0.2)
        p = p + dp
    return p


@lru_cache(maxsize=64)
def morse_data(model):
    """Locate and characterize the dispersion maximum (cached per model)."""
    n = 64
    grid = -PI + (np.arange(n) + 0.5) * (2 * PI / n)
    g1, g2 = np.meshgrid(grid, grid, indexing="ij")
    vals = model.values(g1, g2)
    i, j = np.unravel_index(np.argmax(vals), vals.shape)
    p_max = _refine_max(model, (grid[i], grid[j]))

    d = wrap_torus(np.array(p_max) - np.array(PI_VEC))
    if np.max(np.abs(d)) > 1e-8:
        raise NonMaxAtPi(f"maximizer found at {tuple(p_max)}, not at (pi, pi)")
    maximizer = PI_VEC

    hess_fn = getattr(model, "hessian_at_max", None)
    hessian = hess_fn() if hess_fn is not None and hess_fn() is not None \
        else _fd_hessian(model, maximizer)
    det = float(np.linalg.det(hessian))
    if abs(det) < 1e-10:
        raise DegenerateHessian(f"det(hessian) = {det:g} at the maximizer")
    eigs = np.linalg.eigvalsh(hessian)
    if np.max(eigs) >= 0:
        raise DegenerateHessian("hessian at the maximizer is not negative definite")

    e_max = float(getattr(model, "e_max"))

    # minimum: coarse scan plus local polish
    m = 512
    grid = -PI + (np.arange(m) + 0.5) * (2 * PI / m)
    g1, g2 = np.meshgrid(grid, grid, indexing="ij")
    vals = model.values(g1, g2)
    i, j = np.unravel_index(np.argmin(vals), vals.shape)
    res = scipy.optimize.minimize(
        lambda p: float(model.values(p[0], p[1])), np.array([grid[i], grid[j]]),
        method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14})
    e_min = float(min(res.fun, vals[i, j]))

    j_psi0 = 2.0 / np.sqrt(det)
    j0 = j_psi0 / (4 * PI)
    psi_deriv_sq = None
    if abs(hessian[0][1]) < 1e-10:
        psi_deriv_sq = (2.0 / abs(hessian[0][0]), 2.0 / abs(hessian[1][1]))

    return MorseData(e_max=e_max, e_min=e_min, maximizer=maximizer,
                     hessian=tuple(tuple(float(x) for x in row) for row in np.asarray(hessian)),
                     j_psi0=float(j_psi0), j0=float(j0), psi_deriv_sq=psi_deriv_sq)


# ---------------------------------------------------------------------------
# Fourier analysis / validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HoppingTable:
    entries: tuple   # sorted ((x1, x2), value) pairs, |x|_inf <= cutoff
    cutoff: int
    tail: float      # l1 mass on the first excluded shell |x|_inf = cutoff + 1

    def as_dict(self):
        return dict(self.entries)


def fourier_coefficients(model, cutoff, tol=None, drop_below=1e-14):
    """Hopping coefficients ehat(x), |x|_inf <= cutoff, by 2-D FFT.

    The tail estimate is the l1 mass on the first shell outside the table;
    CutoffTooSmall is raised when it exceeds ``tol``.
    """
    from .errors import CutoffTooSmall

    R = int(cutoff)
    if R < 1:
        raise ValueError("cutoff must be >= 1")
    N = max(256, 8 * (R + 2))
    grid = -PI + 2 * PI * np.arange(N) / N
    g1, g2 = np.meshgrid(grid, grid, indexing="ij")
    coef = np.fft.fft2(model.values(g1, g2)) / N ** 2

    def ehat(x1, x2):
        c = coef[x1 % N, x2 % N] * (-1) ** (x1 + x2)
        return float(np.real(c))

    entries = []
    for x1 in range(-R, R + 1):
        for x2 in range(-R, R + 1):
            v = ehat(x1, x2)
            if abs(v) > drop_below:
                entries.append(((x1, x2), v))

    shell = R + 1
    tail = 0.0
    for x1 in range(-shell, shell + 1):
        for x2 in range(-shell, shell + 1):
            if max(abs(x1), abs(x2)) == shell:
                tail += abs(ehat(x1, x2))

    if tol is not None and tail > tol:
        raise CutoffTooSmall(f"l1 tail {tail:g} beyond |x|_inf = {R} exceeds {tol:g}")
    return HoppingTable(entries=tuple(sorted(entries)), cutoff=R, tail=tail)


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    failures: tuple


def validate_hypothesis(model, grid_n=400):
    """Grid checks: evenness, swap symmetry, unique non-degenerate max at pi_vec."""
    failures = []
    n = grid_n
    grid = -PI + (np.arange(n) + 0.5) * (2 * PI / n)
    g1, g2 = np.meshgrid(grid, grid, indexing="ij")
    vals = model.values(g1, g2)

    tol = 1e-9 * max(1.0, float(np.max(np.abs(vals))))
    # p -> -p maps the offset grid onto itself reversed
    if np.max(np.abs(vals - vals[::-1, ::-1])) > tol:
        failures.append("evenness: e(p) != e(-p)")
    if np.max(np.abs(vals - vals.T)) > tol:
        failures.append("swap symmetry: e(p1,p2) != e(p2,p1)")

    e_max = float(np.max(vals))
    e_min = float(np.min(vals))
    scale = max(e_max - e_min, 1e-30)
    d1 = wrap_torus(g1 - PI)
    d2 = wrap_torus(g2 - PI)
    near_pi = np.maximum(np.abs(d1), np.abs(d2)) <= 0.5

    i, j = np.unravel_index(np.argmax(vals), vals.shape)
    if not near_pi[i, j]:
        failures.append("maximum: grid maximizer is not near (pi, pi)")
    else:
        outside = np.where(near_pi, -np.inf, vals)
        i2, j2 = np.unravel_index(np.argmax(outside), outside.shape)
        second = outside[i2, j2]
        if e_max - second < 1e-3 * scale:
            # candidate competing maximum; polish it before judging
            res = scipy.optimize.minimize(
                lambda p: -float(model.values(p[0], p[1])),
                np.array([grid[i2], grid[j2]]), method="Nelder-Mead",
                options={"xatol": 1e-12, "fatol": 1e-14})
            refined = -res.fun
            try:
                true_max = float(model.e_max)
            except AttributeError:
                true_max = e_max
            if refined >= true_max - 1e-9:
                failures.append("maximum: not unique (second maximizer away from (pi, pi))")

    if not failures:
        try:
            md = morse_data(model)
            h = md.hessian_matrix
            if np.max(np.linalg.eigvalsh(h)) >= 0:
                failures.append("hessian: not negative definite at (pi, pi)")
        except NonMaxAtPi:
            failures.append("maximum: refined maximizer is not at (pi, pi)")
        except DegenerateHessian:
            failures.append("hessian: degenerate at (pi, pi)")

    return ValidationReport(passed=not failures, failures=tuple(failures))


def is_even_per_coordinate(model, n_check=256, tol=1e-9):
    """True when e(p1, p2) = e(-p1, p2) pointwise (not just jointly even)."""
    rng = np.random.default_rng(7)
    p1 = rng.uniform(-PI, PI, n_check)
    p2 = rng.uniform(-PI, PI, n_check)
    diff = np.max(np.abs(model.values(p1, p2) - model.values(-p1, p2)))
    return bool(diff <= tol * max(1.0, float(np.max(np.abs(model.values(p1, p2))))))


# ---------------------------------------------------------------------------
# JSON model specs
# ---------------------------------------------------------------------------

def model_from_spec(spec):
    """Build a model from {"kind": ..., "params": {...}}."""
    kind = spec.get("kind")
    params = spec.get("params", {}) or {}
    if kind == "laplacian":
        return DiscreteLaplacian()
    if kind == "hopping":
        table = tuple((int(x1), int(x2), float(v)) for x1, x2, v in params["table"])
        return ExponentialHopping(table=table)
    if kind == "piecewise_phi":
        return PiecewisePhi(eps=float(params["eps"]))
    if kind == "stepped_phi":
        return SteppedPhiA(a_param=float(params["A"]))
    raise ValueError(f"unknown model kind: {kind!r}")


def model_to_spec(model):
    if model.kind == "laplacian":
        return {"kind": "laplacian", "params": {}}
    if model.kind == "hopping":
        return {"kind": "hopping",
                "params": {"table": [[x1, x2, v] for x1, x2, v in model.table]}}
    if model.kind == "piecewise_phi":
        return {"kind": "piecewise_phi", "params": {"eps": model.eps}}
    if model.kind == "stepped_phi":
        return {"kind": "stepped_phi", "params": {"A": model.a_param}}
    raise ValueError(f"unknown model kind: {model.kind!r}")
