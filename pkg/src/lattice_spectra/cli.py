"""Command-line front end.

Every computation is exposed as a batch subcommand with machine-readable
output (JSON by default, CSV where tabular).  Exit codes: 0 success,
1 domain error (violated mathematical precondition), 2 numerical failure,
3 configuration error.  Identical configurations produce byte-identical
output: field order is fixed and floats use Python's shortest round-trip
representation.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import asymptotics, lattice_oracle, spectrum, thresholds
from .dispersion import (DiscreteLaplacian, PiecewisePhi, SteppedPhiA,
                         model_from_spec, model_to_spec, validate_hypothesis,
                         morse_data)
from .errors import ConfigError, DomainError, NumericalError
from .torus_quad import default_spec

ENV_THREADS = "LATTICE_SPECTRA_THREADS"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # argparse exits 2 by default; bad flags are a configuration error
        self.print_usage(sys.stderr)
        self.exit(3, f"{self.prog}: error: {message}\n")


def _parse_model(text):
    if text == "laplacian":
        return DiscreteLaplacian()
    if text.startswith("piecewise:"):
        return PiecewisePhi(eps=float(text.split(":", 1)[1]))
    if text.startswith("stepped:"):
        return SteppedPhiA(a_param=float(text.split(":", 1)[1]))
    if os.path.exists(text):
        with open(text, encoding="utf-8") as f:
            return model_from_spec(json.load(f))
    raise ConfigError(
        f"unrecognized model {text!r}: expected 'laplacian', 'piecewise:<eps>', "
        "'stepped:<A>', or a path to a JSON model spec")


def _threads(args):
    if getattr(args, "threads", None):
        return int(args.threads)
    env = os.environ.get(ENV_THREADS)
    if env:
        return int(env)
    return os.cpu_count() or 1


def _quad_spec(model, args):
    overrides = {}
    if getattr(args, "tol_radial", None) is not None:
        overrides["radial_tol"] = args.tol_radial
    if getattr(args, "grid_n", None) is not None:
        overrides["grid_n"] = args.grid_n
    return default_spec(model, **overrides)


def _metadata(args, model, sp):
    return {
        "model": model_to_spec(model),
        "tolerances": {"radial": sp.radial_tol},
        "grid_n": sp.grid_n,
        "threads": _threads(args),
    }


def _emit(args, payload, csv_text=None):
    fmt = getattr(args, "format", "json")
    text = csv_text if fmt == "csv" else json.dumps(payload, indent=2) + "\n"
    if csv_text is None and fmt == "csv":
        raise ConfigError("csv output is not available for this subcommand")
    out = getattr(args, "output", None)
    if out:
        with open(out, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _record_dicts(records):
    return [r.as_dict() for r in records]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_validate(args):
    model = _parse_model(args.model)
    rep = validate_hypothesis(model)
    payload = {"passed": rep.passed, "failures": list(rep.failures)}
    if rep.passed:
        md = morse_data(model)
        payload["morse"] = {"e_max": md.e_max, "e_min": md.e_min,
                            "j_psi0": md.j_psi0, "j0": md.j0}
    _emit(args, payload)
    return 0 if rep.passed else 1


def _cmd_thresholds(args):
    model = _parse_model(args.model)
    sp = _quad_spec(model, args)
    g = thresholds.gammas(model, spec=sp)
    th = thresholds.es_constants(model, spec=sp)
    payload = {
        "metadata": _metadata(args, model, sp),
        "gamma_os": g.gamma_os, "gamma_oa": g.gamma_oa,
        "gamma_ea": g.gamma_ea, "gamma_es": g.gamma_es,
        "theta_star": th.theta_star, "theta_2star": th.theta_2star,
        "kappa1": th.kappa1,
    }
    if args.a is not None and args.b is not None:
        ct = thresholds.coupling_thresholds(model, args.a, args.b, spec=sp)
        payload["mu0"] = {s: ct.mu0[s] for s in ("os", "oa", "ea", "es")}
        cls = thresholds.classify_threshold_solutions(model, args.a, args.b,
                                                      spec=sp)
        payload["threshold_solutions"] = cls.as_dict()
    csv_text = thresholds.constants_csv([(model.kind, model)])
    _emit(args, payload, csv_text=csv_text)
    return 0


def _cmd_solve(args):
    model = _parse_model(args.model)
    sp = _quad_spec(model, args)
    res = spectrum.solve(model, args.a, args.b, args.mu, spec=sp)
    payload = {
        "metadata": _metadata(args, model, sp),
        "a": args.a, "b": args.b, "mu": args.mu,
        "total_count": res.total_count,
        "sector_counts": res.sector_counts(),
        "records": _record_dicts(res.records),
    }
    _emit(args, payload)
    return 0


def _cmd_curve(args):
    model = _parse_model(args.model)
    sp = _quad_spec(model, args)
    mus = np.linspace(args.mu_min, args.mu_max, args.n)
    rep = spectrum.eigenvalue_curve(model, args.sector, args.a, args.b, mus,
                                    spec=sp, branch=args.branch)
    payload = {
        "metadata": _metadata(args, model, sp),
        "sector": rep.sector,
        "strictly_increasing": rep.strictly_increasing,
        "min_first_difference": rep.min_first_difference,
        "min_second_difference": rep.min_second_difference,
        "mus": list(rep.mus),
        "energies": list(rep.energies),
    }
    lines = ["mu,energy"] + [f"{format(m, '.17g')},{format(e, '.17g')}"
                             for m, e in zip(rep.mus, rep.energies)]
    _emit(args, payload, csv_text="\n".join(lines) + "\n")
    return 0


def _cmd_phase_diagram(args):
    model = _parse_model(args.model)
    sp = _quad_spec(model, args)
    a_grid = np.linspace(args.a_min, args.a_max, args.a_n)
    b_grid = np.linspace(args.b_min, args.b_max, args.b_n)
    pd = spectrum.phase_diagram(model, args.mu, a_grid, b_grid, spec=sp,
                                threads=_threads(args))
    payload = {
        "metadata": _metadata(args, model, sp),
        "mu": pd.mu,
        "cells": [{"a": c.a, "b": c.b, "count": c.count} for c in pd.cells],
        "boundaries": {
            "b_os": pd.boundaries["b_os"],
            "b_oa": pd.boundaries["b_oa"],
            "b_ea": pd.boundaries["b_ea"],
            "es_hyperbola": [list(p) for p in pd.boundaries["es_hyperbola"]],
        },
    }
    lines = ["a,b,count"] + [
        f"{format(c.a, '.17g')},{format(c.b, '.17g')},{c.count}"
        for c in pd.cells]
    _emit(args, payload, csv_text="\n".join(lines) + "\n")
    return 0


def _fit_payload(rep):
    return {
        "predicted": rep.predicted, "measured": rep.measured,
        "relative_error": rep.relative_error,
        "sample_range": list(rep.sample_range),
        "residual": rep.residual,
        "samples": [list(s) for s in rep.samples],
    }


def _cmd_asymptotics(args):
    model = _parse_model(args.model)
    sp = _quad_spec(model, args)
    rep = asymptotics.fit_eigenvalue_asymptotics(
        model, args.sector, args.a, args.b, spec=sp, branch=args.branch)
    payload = {"metadata": _metadata(args, model, sp),
               "sector": args.sector, "branch": args.branch}
    payload.update(_fit_payload(rep))
    _emit(args, payload, csv_text=asymptotics.fit_csv(rep))
    return 0


def _cmd_oracle(args):
    model = _parse_model(args.model)
    sp = _quad_spec(model, args)
    ls = sorted(int(x) for x in args.L.split(","))
    e_max = float(model.e_max)
    per_l = []
    csv_parts = []
    for L in ls:
        h = lattice_oracle.build(model, L, R=args.R, a=args.a, b=args.b,
                                 mu=args.mu)
        counts = lattice_oracle.sector_count_above(h, e_max, args.margin,
                                                   k=args.k)
        per_l.append({
            "L": L, "total": counts.total, "ambiguous": counts.ambiguous,
            "counts": {s: getattr(counts, s) for s in ("os", "oa", "ea", "es")},
            "entries": [[v, s] for v, s in counts.entries],
        })
        csv_parts.append(lattice_oracle.eigen_csv(h, e_max, args.margin,
                                                  k=args.k))
    payload = {"metadata": _metadata(args, model, sp),
               "a": args.a, "b": args.b, "mu": args.mu,
               "margin": args.margin, "boxes": per_l}
    if len(ls) >= 3 and len({p["total"] for p in per_l}) == 1:
        n = per_l[0]["total"]
        extrapolated = []
        for i in range(n):
            vals = [p["entries"][i][0] for p in per_l]
            limit, err = lattice_oracle.extrapolate(ls, vals)
            extrapolated.append({"index": i, "sector": per_l[-1]["entries"][i][1],
                                 "value": limit, "error": err})
        payload["extrapolated"] = extrapolated
    header, *rest = csv_parts
    csv_text = header + "".join(part.split("\n", 1)[1] for part in rest)
    _emit(args, payload, csv_text=csv_text)
    return 0


def _cmd_multiplicity(args):
    res = spectrum.multiplicity_two_construct(args.z0, mu=args.mu,
                                              scan=args.scan,
                                              scan_step=args.scan_step)
    payload = {
        "z0": res.z0, "mu": res.mu, "A0": res.A0,
        "a0": res.a0, "b0": res.b0,
        "g_residual": res.g_residual,
        "verification": list(res.verification),
    }
    _emit(args, payload)
    return 0


def _cmd_resonance(args):
    model = _parse_model(args.model)
    sp = _quad_spec(model, args)
    rep = thresholds.resonance_integrability_probe(model, args.sector,
                                                   a=args.a, b=args.b, spec=sp)
    payload = {
        "metadata": _metadata(args, model, sp),
        "sector": rep.sector,
        "classification": rep.classification,
        "slope": rep.slope,
        "r_squared": rep.r_squared,
        "rs": list(rep.rs),
        "values": list(rep.values),
        "cauchy_diffs": list(rep.cauchy_diffs),
    }
    lines = ["r,I_r"] + [f"{format(r, '.17g')},{format(v, '.17g')}"
                         for r, v in zip(rep.rs, rep.values)]
    _emit(args, payload, csv_text="\n".join(lines) + "\n")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_common(p, fmt_default="json"):
    p.add_argument("--model", default="laplacian",
                   help="laplacian | piecewise:<eps> | stepped:<A> | spec.json")
    p.add_argument("--format", choices=("json", "csv"), default=fmt_default)
    p.add_argument("--output", default=None, help="write to file (default stdout)")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--tol-radial", type=float, default=None, dest="tol_radial",
                   help="near-field radial refinement tolerance")
    p.add_argument("--grid-n", type=int, default=None, dest="grid_n",
                   help="far-field grid resolution override")


def build_parser():
    parser = _Parser(prog="lattice-spectra",
                     description="Discrete spectrum of lattice Schrodinger "
                                 "operators above the essential spectrum")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the dispersion hypotheses")
    _add_common(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("thresholds", help="sector constants and thresholds")
    _add_common(p, fmt_default="csv")
    p.add_argument("-a", type=float, default=None)
    p.add_argument("-b", type=float, default=None)
    p.set_defaults(func=_cmd_thresholds)

    p = sub.add_parser("solve", help="all eigenvalues above the band")
    _add_common(p)
    p.add_argument("-a", type=float, required=True)
    p.add_argument("-b", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("curve", help="eigenvalue curve E(mu) in one sector")
    _add_common(p)
    p.add_argument("--sector", choices=("os", "oa", "ea", "es"), required=True)
    p.add_argument("-a", type=float, default=1.0)
    p.add_argument("-b", type=float, default=1.0)
    p.add_argument("--mu-min", type=float, required=True, dest="mu_min")
    p.add_argument("--mu-max", type=float, required=True, dest="mu_max")
    p.add_argument("-n", type=int, default=50)
    p.add_argument("--branch", type=int, default=1)
    p.set_defaults(func=_cmd_curve)

    p = sub.add_parser("phase-diagram", help="counts over an (a, b) grid")
    _add_common(p)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--a-min", type=float, required=True, dest="a_min")
    p.add_argument("--a-max", type=float, required=True, dest="a_max")
    p.add_argument("--a-n", type=int, default=9, dest="a_n")
    p.add_argument("--b-min", type=float, required=True, dest="b_min")
    p.add_argument("--b-max", type=float, required=True, dest="b_max")
    p.add_argument("--b-n", type=int, default=9, dest="b_n")
    p.set_defaults(func=_cmd_phase_diagram)

    p = sub.add_parser("asymptotics", help="near-threshold rate fits")
    _add_common(p)
    p.add_argument("--sector", choices=("os", "oa", "ea", "es"), required=True)
    p.add_argument("-a", type=float, default=1.0)
    p.add_argument("-b", type=float, default=1.0)
    p.add_argument("--branch", choices=("exponential", "threshold"),
                   default="exponential")
    p.set_defaults(func=_cmd_asymptotics)

    p = sub.add_parser("oracle", help="finite-box diagonalization cross-check")
    _add_common(p)
    p.add_argument("-a", type=float, required=True)
    p.add_argument("-b", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--L", required=True,
                   help="comma-separated box half-widths, e.g. 20,30,40")
    p.add_argument("--R", type=int, default=None,
                   help="hopping cutoff (omit for the separable fast path)")
    p.add_argument("--margin", type=float, default=1e-3)
    p.add_argument("-k", type=int, default=12,
                   help="number of top eigenvalues per box")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("multiplicity", help="multiplicity-two construction")
    p.add_argument("--z0", type=float, required=True)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--scan", action="store_true",
                   help="scan for the smallest zero of G before bracketing")
    p.add_argument("--scan-step", type=float, default=1e-3, dest="scan_step")
    p.add_argument("--format", choices=("json",), default="json")
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_multiplicity)

    p = sub.add_parser("resonance", help="threshold resonance dichotomy probe")
    _add_common(p)
    p.add_argument("--sector", choices=("os", "oa", "ea", "es"), required=True)
    p.add_argument("-a", type=float, default=1.0)
    p.add_argument("-b", type=float, default=1.0)
    p.set_defaults(func=_cmd_resonance)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
