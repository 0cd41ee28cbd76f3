"""Command-line interface.

Exit codes: 0 success, 1 validation error or failed check, 2 numerical
failure (singular or inconsistent systems), 64 usage error.
"""

import argparse
import json
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import io as tio
from .core import Object3D, random_object
from .ct_recon import ambiguity_classify, ct_reconstruct
from .diffraction import (
    DiffractionPattern,
    Mask2D,
    apply_mask,
    diffraction_pattern,
    plain_mask,
    random_mask,
    recover_autocorrelation,
)
from .errors import IllConditionedWarning, NumericalFailure, TomophaseError
from .physics import KAPPA_DEFAULT, born_rytov_consistency, fresnel_validity, intensity_decomposition
from .schemes import Scheme, check_strong_ct, random_scheme, rotation_scheme, tom2_scheme
from .spectral import fourier_slice_residual
from .uniqueness import exhaustive_oracle, invariance_suite
from .xray import Direction, Projection2D, project

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_USAGE = 64

SLICE_TOL = 1e-9
SAME_TOL = 1e-10


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise UsageError(message)


def default_seed():
    raw = os.environ.get("TOMOPHASE_SEED")
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"TOMOPHASE_SEED must be an integer, got {raw!r}") from None


def _pair(text):
    parts = [t for t in text.replace(" ", "").split(",") if t]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}")
    return float(parts[0]), float(parts[1])


def _complex_list(text):
    return [complex(t.replace(" ", "")) for t in text.split(",") if t.strip()]


def _numbered(directory, stem):
    files = sorted(Path(directory).glob(f"{stem}_*.tph"))
    if not files:
        raise TomophaseError(f"no {stem}_*.tph files in {directory}")
    return files


def _load_projections(directory):
    return [tio.load(f, Projection2D) for f in _numbered(directory, "projection")]


def _finish(report, path, out=None):
    out = out or sys.stdout
    if path:
        tio.write_report(report, path)
    for name, value, threshold, ok in report.rows:
        flag = "" if ok is None else (" PASS" if ok else " FAIL")
        thr = "" if threshold is None else f" (threshold {tio._cell(threshold)})"
        out.write(f"{name}: {tio._cell(value)}{thr}{flag}\n")
    return EXIT_OK if report.passed else EXIT_VALIDATION


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen_object(a):
    alphabet = _complex_list(a.alphabet) if a.alphabet else None
    f = random_object(a.n, a.p, a.kind, a.seed, alphabet)
    tio.save(f, a.out, {"command": "gen-object", "seed": a.seed, "kind": a.kind})
    return EXIT_OK


def cmd_gen_mask(a):
    mu = plain_mask(a.p) if a.plain else random_mask(a.p, a.seed)
    tio.save(mu, a.out, {"command": "gen-mask", "seed": None if a.plain else a.seed})
    return EXIT_OK


def cmd_gen_scheme(a):
    if a.rotation:
        gamma, m = a.rotation
        s = rotation_scheme(gamma, int(m), a.family, a.n, a.p)
    else:
        s = random_scheme(a.n, a.family, a.seed, a.p)
    if a.extra:
        s = tom2_scheme(s, a.extra)
    tio.save(s, a.out, {"command": "gen-scheme", "seed": a.seed})
    return EXIT_OK


def cmd_check_scheme(a):
    s = tio.load(a.scheme, Scheme)
    r = check_strong_ct(s, a.tol)
    rep = tio.Report("check-scheme")
    rep.add("strong_ct_worst_count", r.worst_count, s.n, r.passed)
    rep.add("worst_pair", f"{r.worst_pair[0]};{r.worst_pair[1]}")
    rep.add("distinct_tol", r.tol)
    return _finish(rep, a.report)


def cmd_project(a):
    f = tio.load(a.object, Object3D)
    s = tio.load(a.scheme, Scheme)
    out = Path(a.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for i, d in enumerate(s.directions()):
        tio.save(project(f, d), out / f"projection_{i:03d}.tph", {"command": "project", "index": i})
    return EXIT_OK


def _grid_arg(text, p):
    if text is None or text == "regular":
        return "regular"
    if text.startswith("irregular:"):
        nodes = np.loadtxt(text.split(":", 1)[1], dtype=np.float64, ndmin=2)
        return nodes
    raise UsageError(f"--grid must be 'regular' or 'irregular:FILE', got {text!r}")


def cmd_diffract(a):
    mu = tio.load(a.mask, Mask2D)
    grid = _grid_arg(a.grid, mu.p)
    out = Path(a.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for i, path in enumerate(_numbered(a.projections_dir, "projection")):
        g = tio.load(path, Projection2D)
        pat = diffraction_pattern(apply_mask(g, mu), grid, mask_id=mu.mask_id)
        tio.save(pat, out / f"pattern_{i:03d}.tph", {"command": "diffract", "index": i})
    return EXIT_OK


def cmd_recover_autocorr(a):
    pat = tio.load(a.pattern, DiffractionPattern)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IllConditionedWarning)
        r = recover_autocorrelation(pat)
    tio.save(r, a.out, {"command": "recover-autocorr"})
    return EXIT_OK


def cmd_verify_slice(a):
    f = tio.load(a.object, Object3D)
    s = tio.load(a.scheme, Scheme)
    rep = tio.Report("verify-slice")
    for i, d in enumerate(s.directions()):
        res = fourier_slice_residual(f, d)
        rep.add(f"slice_residual_{i}", res, SLICE_TOL, res <= SLICE_TOL)
    return _finish(rep, a.report)


def cmd_reconstruct(a):
    s = tio.load(a.scheme, Scheme)
    projs = _load_projections(a.projections_dir)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IllConditionedWarning)
        res = ct_reconstruct(projs, s, tol=a.tol, full_output=True)
    tio.save(res.object, a.out, {"command": "reconstruct"})
    rep = tio.Report("reconstruct")
    rep.add("max_condition", res.max_condition)
    rep.add("reprojection_residual", res.reprojection_residual)
    if a.reference:
        ref = tio.load(a.reference, Object3D)
        err = float(np.max(np.abs(ref.values - res.object.values)))
        thr = 1e-8 * max(1.0, res.max_condition / 1e6)
        rep.add("reconstruction_error", err, thr, err <= thr)
    return _finish(rep, a.report)


def cmd_classify_ambiguity(a):
    s = tio.load(a.scheme, Scheme)
    projs = _load_projections(a.projections_dir)
    v = ambiguity_classify(projs, s)
    rep = tio.Report("classify-ambiguity")
    rep.add("verdict", v.kind.value)
    for key in sorted(v.witness):
        val = v.witness[key]
        if isinstance(val, (int, float, str, np.floating)):
            rep.add(key, val)
    return _finish(rep, a.report)


def cmd_verify_uniqueness(a):
    f = tio.load(a.object, Object3D)
    mu = tio.load(a.mask, Mask2D)
    s = tio.load(a.scheme, Scheme)
    r = invariance_suite(f, mu, s)
    rep = tio.Report("verify-uniqueness")
    rep.add("global_phase_deviation", r.phase_deviation, r.threshold_same, r.phase_ok)
    rep.add("plain_mask_twin_deviation", r.plain_twin_deviation, r.threshold_same, r.plain_twin_ok)
    if mu.is_plain:
        rep.add("mask_twin_deviation", r.random_twin_deviation)
    else:
        rep.add("mask_twin_deviation", r.random_twin_deviation, r.threshold_differ, r.random_twin_broken)
    return _finish(rep, a.report)


def _read_support(path):
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return [tuple(int(c) for c in v) for v in data]


def _read_alphabet(path):
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    out = []
    for v in data:
        if isinstance(v, (list, tuple)):
            out.append(complex(float(v[0]), float(v[1])))
        elif isinstance(v, str):
            out.append(complex(v.replace(" ", "")))
        else:
            out.append(complex(v))
    return out


def cmd_oracle(a):
    support = _read_support(a.support_file)
    alphabet = _read_alphabet(a.alphabet_file)
    mu = tio.load(a.mask, Mask2D)
    s = tio.load(a.scheme, Scheme)
    r = exhaustive_oracle(support, alphabet, mu, s, budget=int(a.budget), seed=a.seed)
    rep = tio.Report("oracle")
    rep.add("objects_enumerated", r.n_enumerated)
    rep.add("objects_admissible", r.n_admissible)
    rep.add("classes", r.n_classes)
    rep.add("impure_classes", sum(1 for x in r.phase_orbit_pure if not x), 0, r.all_pure)
    rep.add("anomalies", len(r.anomalies), 0, not r.anomalies)
    rep.add("transient_collisions", len(r.transient))
    rep.add("borderline_pairs", len(r.borderline))
    return _finish(rep, a.report)


def cmd_physics_demo(a):
    f = tio.load(a.object, Object3D)
    rep = tio.Report("physics-demo")
    br = born_rytov_consistency(f, a.kappa)
    rep.add("born_rytov_residual", br, SAME_TOL, br <= SAME_TOL)
    mu = random_mask(f.p, a.seed)
    s = project(f, Direction(a.axis, 0.0, 0.0))
    dec = intensity_decomposition(mu, s, a.kappa)
    rep.add("intensity_decomposition_residual", dec.residual, SAME_TOL, dec.residual <= SAME_TOL)
    fr = fresnel_validity(a.ell, a.wavelength, a.z0)
    rep.add("fresnel_number", fr.fresnel_number, fr.threshold, fr.valid)
    return _finish(rep, a.report)


# ---------------------------------------------------------------------------


def build_parser():
    seed = default_seed()
    p = _Parser(prog="tomophase", description="Discrete tomography with coded diffraction data.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    c = sub.add_parser("gen-object", help="seeded random object")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--p", type=int, default=None)
    c.add_argument("--kind", choices=["gaussian", "phases", "alphabet"], default="gaussian")
    c.add_argument("--alphabet", default=None, help="comma-separated complex symbols, e.g. 0,1,1j")
    c.add_argument("--seed", type=int, default=seed)
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_gen_object)

    c = sub.add_parser("gen-mask", help="seeded random or plain mask")
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--seed", type=int, default=seed)
    c.add_argument("--plain", action="store_true")
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_gen_mask)

    c = sub.add_parser("gen-scheme", help="random, rotation or tom2 scheme")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--p", type=int, default=None)
    c.add_argument("--family", choices=["x", "y", "z"], default="z")
    c.add_argument("--seed", type=int, default=seed)
    c.add_argument("--rotation", type=_pair, default=None, metavar="GAMMA,M")
    c.add_argument("--extra", type=_pair, default=None, metavar="A0,B0")
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_gen_scheme)

    c = sub.add_parser("check-scheme", help="strong CT node-distinctness check")
    c.add_argument("--scheme", required=True)
    c.add_argument("--tol", type=float, default=1e-9)
    c.add_argument("--report", default=None)
    c.set_defaults(func=cmd_check_scheme)

    c = sub.add_parser("project", help="projections along every scheme direction")
    c.add_argument("--object", required=True)
    c.add_argument("--scheme", required=True)
    c.add_argument("--out-dir", required=True)
    c.set_defaults(func=cmd_project)

    c = sub.add_parser("diffract", help="coded diffraction patterns of projections")
    c.add_argument("--projections-dir", required=True)
    c.add_argument("--mask", required=True)
    c.add_argument("--grid", default="regular")
    c.add_argument("--out-dir", required=True)
    c.set_defaults(func=cmd_diffract)

    c = sub.add_parser("recover-autocorr", help="autocorrelation from a diffraction pattern")
    c.add_argument("--pattern", required=True)
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_recover_autocorr)

    c = sub.add_parser("verify-slice", help="Fourier slice residual per scheme direction")
    c.add_argument("--object", required=True)
    c.add_argument("--scheme", required=True)
    c.add_argument("--report", default=None)
    c.set_defaults(func=cmd_verify_slice)

    c = sub.add_parser("reconstruct", help="exact CT reconstruction from projections")
    c.add_argument("--projections-dir", required=True)
    c.add_argument("--scheme", required=True)
    c.add_argument("--tol", type=float, default=1e-8)
    c.add_argument("--reference", default=None, help="object file to compare against")
    c.add_argument("--out", required=True)
    c.add_argument("--report", default=None)
    c.set_defaults(func=cmd_reconstruct)

    c = sub.add_parser("classify-ambiguity", help="common-projection ambiguity verdict")
    c.add_argument("--projections-dir", required=True)
    c.add_argument("--scheme", required=True)
    c.add_argument("--report", default=None)
    c.set_defaults(func=cmd_classify_ambiguity)

    c = sub.add_parser("verify-uniqueness", help="invariance suite on coded data")
    c.add_argument("--object", required=True)
    c.add_argument("--mask", required=True)
    c.add_argument("--scheme", required=True)
    c.add_argument("--report", default=None)
    c.set_defaults(func=cmd_verify_uniqueness)

    c = sub.add_parser("oracle", help="exhaustive finite-alphabet uniqueness oracle")
    c.add_argument("--support-file", required=True, help="JSON list of [x, y, z] voxels")
    c.add_argument("--alphabet-file", required=True, help="JSON list of [re, im] pairs")
    c.add_argument("--mask", required=True)
    c.add_argument("--scheme", required=True)
    c.add_argument("--budget", type=float, default=1e7)
    c.add_argument("--seed", type=int, default=seed)
    c.add_argument("--report", default=None)
    c.set_defaults(func=cmd_oracle)

    c = sub.add_parser("physics-demo", help="Born/Rytov and intensity decomposition checks")
    c.add_argument("--object", required=True)
    c.add_argument("--kappa", type=float, default=KAPPA_DEFAULT)
    c.add_argument("--axis", choices=["x", "y", "z"], default="z")
    c.add_argument("--seed", type=int, default=seed)
    c.add_argument("--ell", type=float, default=1e-6)
    c.add_argument("--wavelength", type=float, default=1e-10)
    c.add_argument("--z0", type=float, default=1e-4)
    c.add_argument("--report", default=None)
    c.set_defaults(func=cmd_physics_demo)
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        if str(exc).startswith("TOMOPHASE_SEED") or str(exc).startswith("--grid"):
            sys.stderr.write(f"tomophase: error: {exc}\n")
        return EXIT_USAGE
    except NumericalFailure as exc:
        sys.stderr.write(f"tomophase: numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    except (TomophaseError, OSError) as exc:
        sys.stderr.write(f"tomophase: {exc}\n")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
