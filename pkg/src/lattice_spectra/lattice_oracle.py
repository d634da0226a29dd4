"""Independent finite-box oracle in the coordinate representation.

The operator acts on the box [-L, L]^2 by the hopping convolution plus the
five-point potential mu * (a at the origin, b at the four neighbors).  Bound
states above the band decay exponentially, so box eigenvalues converge
exponentially in L and an Aitken-type extrapolation recovers the limit.

Two construction paths keep the oracle independent of the torus quadrature:

  * tabulated hoppings (FFT coefficients) assembled as a sparse matrix;
  * separable kinds e(p) = g(p1) + g(p2) via exact 1-D coefficients of g
    computed with scipy.integrate.quad, applied as Phi X + X Phi without
    truncating the (slowly decaying) hopping range.
"""

import csv
import io
from dataclasses import dataclass

import numpy as np
import scipy.integrate
import scipy.sparse
import scipy.sparse.linalg

from .errors import FitFailure, NoConvergence
from .dispersion import PI

DENSE_LIMIT = 4000


@dataclass
class TruncatedHamiltonian:
    L: int
    a: float
    b: float
    mu: float
    hopping: dict | None        # (x1, x2) -> value (tabulated path)
    phi_row: np.ndarray | None  # c[0..2L], 1-D coefficients (separable path)
    tail_bound: float

    @property
    def dimension(self):
        return (2 * self.L + 1) ** 2

    # -- assembly ----------------------------------------------------------

    def _potential_diag(self):
        n = 2 * self.L + 1
        v = np.zeros((n, n))
        c = self.L
        v[c, c] = self.a
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            v[c + dx, c + dy] = self.b
        return self.mu * v

    def _phi_matrix(self):
        n = 2 * self.L + 1
        idx = np.arange(n)
        return self.phi_row[np.abs(idx[:, None] - idx[None, :])]

    def sparse_matrix(self):
        n = 2 * self.L + 1
        if self.phi_row is not None:
            phi = scipy.sparse.csr_matrix(self._phi_matrix())
            eye = scipy.sparse.identity(n, format="csr")
            h = scipy.sparse.kron(phi, eye) + scipy.sparse.kron(eye, phi)
        else:
            h = None
            for (x1, x2), val in self.hopping.items():
                shift1 = scipy.sparse.eye(n, n, k=x1, format="csr")
                shift2 = scipy.sparse.eye(n, n, k=x2, format="csr")
                term = val * scipy.sparse.kron(shift1, shift2)
                h = term if h is None else h + term
        h = h + scipy.sparse.diags(self._potential_diag().ravel())
        return h.tocsr()

    def operator(self):
        n = 2 * self.L + 1
        if self.phi_row is not None:
            phi = self._phi_matrix()
            vdiag = self._potential_diag()

            def matvec(x):
                m = x.reshape(n, n)
                return (phi @ m + m @ phi + vdiag * m).ravel()

            return scipy.sparse.linalg.LinearOperator(
                (n * n, n * n), matvec=matvec, dtype=float)
        mat = self.sparse_matrix()
        return scipy.sparse.linalg.aslinearoperator(mat)

    def dense_matrix(self):
        n = 2 * self.L + 1
        if self.phi_row is not None:
            phi = self._phi_matrix()
            eye = np.eye(n)
            h = np.kron(phi, eye) + np.kron(eye, phi)
        else:
            h = self.sparse_matrix().toarray()
            return h
        h += np.diag(self._potential_diag().ravel())
        return h


def _phi_coefficients(model, n_max):
    """1-D Fourier cosine coefficients of the separable profile g."""
    pieces = model.phi_pieces()
    if pieces is None:
        raise ValueError(f"model kind {model.kind!r} is not separable")
    c = np.zeros(n_max + 1)
    for lo, hi, fn in pieces:
        if hi <= lo:
            continue
        val, _ = scipy.integrate.quad(fn, lo, hi, limit=400)
        c[0] += val / PI
        for n in range(1, n_max + 1):
            val, _ = scipy.integrate.quad(fn, lo, hi, weight="cos", wvar=n,
                                          limit=400)
            c[n] += val / PI
    return c


def build(model, L, R=None, a=1.0, b=1.0, mu=0.0, tol=1e-10):
    """Box truncation of the operator.

    With R given, the hopping table comes from the FFT coefficients with an
    l1 tail bound (CutoffTooSmall when it exceeds ``tol``).  With R = None a
    separable kind is assembled exactly from its 1-D profile coefficients.
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    if R is None:
        phi_row = _phi_coefficients(model, 2 * L)
        return TruncatedHamiltonian(L=int(L), a=a, b=b, mu=mu, hopping=None,
                                    phi_row=phi_row, tail_bound=0.0)
    if not L >= R >= 1:
        raise ValueError("need L >= R >= 1")
    from .dispersion import fourier_coefficients
    table = fourier_coefficients(model, R, tol=tol)
    return TruncatedHamiltonian(L=int(L), a=a, b=b, mu=mu,
                                hopping=table.as_dict(), phi_row=None,
                                tail_bound=table.tail)


# ---------------------------------------------------------------------------
# diagonalization
# ---------------------------------------------------------------------------

def eigen_pairs(h, k):
    """k largest eigenvalues (descending) with eigenvectors as columns."""
    dim = h.dimension
    k = min(k, dim - 2) if dim > 3 else dim
    if dim <= DENSE_LIMIT:
        vals, vecs = np.linalg.eigh(h.dense_matrix())
        order = np.argsort(vals)[::-1][:k]
        return vals[order], vecs[:, order]
    try:
        vals, vecs = scipy.sparse.linalg.eigsh(
            h.operator(), k=k, which="LA", maxiter=10000,
            ncv=min(dim, max(40, 2 * k + 10)))
    except scipy.sparse.linalg.ArpackNoConvergence as exc:
        raise NoConvergence(f"Lanczos failed to converge: {exc}") from exc
    order = np.argsort(vals)[::-1]
    return vals[order], vecs[:, order]


def top_eigenvalues(h, k):
    vals, _ = eigen_pairs(h, k)
    return [float(v) for v in vals]


# ---------------------------------------------------------------------------
# sector attribution
# ---------------------------------------------------------------------------

_SECTOR_CHARACTERS = {
    # (parity under x -> -x, parity under coordinate swap)
    "os": (-1, +1),
    "oa": (-1, -1),
    "ea": (+1, -1),
    "es": (+1, +1),
}


def _sector_projection_norms(vec, n):
    m = vec.reshape(n, n)
    mn = m[::-1, ::-1]
    ms = m.T
    mns = mn.T
    out = {}
    for name, (cn, cs) in _SECTOR_CHARACTERS.items():
        p = (m + cn * mn + cs * ms + cn * cs * mns) / 4.0
        out[name] = float(np.sum(p * p))
    return out


@dataclass(frozen=True)
class SectorCounts:
    os: int
    oa: int
    ea: int
    es: int
    total: int
    ambiguous: bool
    entries: tuple  # (energy, sector-or-"?") descending


def sector_count_above(h, e_max, margin, k=12, cluster_tol=1e-7):
    """Count box eigenvalues above e_max + margin, attributed to sectors.

    Near-degenerate clusters (the os/oa pair is exactly degenerate for
    per-coordinate-even models) are attributed by projection traces, which
    stay integer-valued even when individual vectors mix.
    """
    if margin <= 0:
        raise ValueError("margin must be positive")
    n = 2 * h.L + 1
    vals, vecs = eigen_pairs(h, k)
    above = [(float(v), vecs[:, i]) for i, v in enumerate(vals)
             if v > e_max + margin]
    if len(above) == len(vals) and len(vals) < h.dimension - 2:
        vals, vecs = eigen_pairs(h, 2 * k)
        above = [(float(v), vecs[:, i]) for i, v in enumerate(vals)
                 if v > e_max + margin]

    counts = {s: 0 for s in _SECTOR_CHARACTERS}
    entries = []
    ambiguous = False
    i = 0
    while i < len(above):
        j = i + 1
        scale = max(1.0, abs(above[i][0]))
        while j < len(above) and abs(above[j][0] - above[i][0]) < cluster_tol * scale:
            j += 1
        cluster = above[i:j]
        traces = {s: 0.0 for s in _SECTOR_CHARACTERS}
        for _, vec in cluster:
            norms = _sector_projection_norms(vec, n)
            total = sum(norms.values())
            for s in traces:
                traces[s] += norms[s] / total
        labels = []
        for s, t in traces.items():
            r = int(round(t))
            if abs(t - r) > 0.05:
                ambiguous = True
            counts[s] += r
            labels.extend([s] * r)
        if len(labels) != len(cluster):
            ambiguous = True
            labels = (labels + ["?"] * len(cluster))[:len(cluster)]
        for (v, _), lab in zip(cluster, labels):
            entries.append((v, lab))
        i = j

    return SectorCounts(os=counts["os"], oa=counts["oa"], ea=counts["ea"],
                        es=counts["es"], total=sum(counts.values()),
                        ambiguous=ambiguous, entries=tuple(entries))


# ---------------------------------------------------------------------------
# extrapolation in L
# ---------------------------------------------------------------------------

def extrapolate(l_values, values):
    """Limit of an exponentially converging sequence E(L) = E_inf + c rho^L.

    Uses the last three points (exact for the geometric model); the error bar
    compares against the previous triple when available.
    """
    l_values = list(l_values)
    values = [float(v) for v in values]
    if len(values) < 3:
        raise ValueError("need at least 3 values")
    if any(l2 <= l1 for l1, l2 in zip(l_values, l_values[1:])):
        raise ValueError("L values must be increasing")

    scale = max(1.0, max(abs(v) for v in values))
    spread = max(values) - min(values)

    def aitken(v1, v2, v3):
        d1, d2 = v2 - v1, v3 - v2
        # plateau at the eigensolver noise floor: the sequence has converged
        if abs(d1) < 1e-12 * scale and abs(d2) < 1e-12 * scale:
            return v3, max(abs(d1), abs(d2))
        if d2 == d1:
            raise FitFailure("degenerate differences in the L sequence")
        rho = d2 / d1 if d1 != 0 else 0.0
        if not 0.0 <= rho < 1.0:
            raise FitFailure(
                f"sequence is not exponentially converging (rho = {rho:g})")
        limit = v3 - d2 * d2 / (d2 - d1)
        return limit, abs(limit - v3) * rho

    limit, err = aitken(*values[-3:])
    if len(values) >= 4:
        try:
            prev, _ = aitken(*values[-4:-1])
            err = max(abs(limit - prev), 1e-16 * scale)
        except FitFailure:
            pass
    if err > spread and spread > 0:
        raise FitFailure("extrapolation residual exceeds the data spread")
    return limit, err


def eigen_csv(h, e_max, margin, k=12):
    """CSV rows (L, index, value, sector) for eigenvalues above the band."""
    rep = sector_count_above(h, e_max, margin, k=k)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["L", "index", "value", "sector"])
    for i, (v, s) in enumerate(rep.entries):
        writer.writerow([h.L, i, format(v, ".17g"), s])
    return buf.getvalue()
