"""clifford-cwt: command-line front end.

Settings come from built-in defaults, then ``--config`` (JSON or YAML),
then explicit flags. Output files are written atomically, so a failing
command never leaves a partial file behind.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import os
import sys

import numpy as np

from . import clwf
from .clifford_core import CliffordError, get_algebra
from .field import norm
from .profile import Profile, build_mother, load_profile
from .verify import band_limited_signal, gaussian_signals, run_identity_suite
from .wavelet import (
    NotAdmissible,
    ParityViolation,
    admissibility,
    inverse_transform,
    transform_direct,
    transform_spectral,
    zero_mean_residuals,
)

log = logging.getLogger("clifford_cwt")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _amplitude(text: str, n: int) -> list[float]:
    """``A`` as a blade name (``e12``), or 2**n comma-separated coefficients."""
    alg = get_algebra(n)
    if text[0].isalpha():
        try:
            return list(alg.blade(text).coeffs)
        except (KeyError, ValueError) as exc:
            raise UsageError(f"unknown blade {text!r}") from exc
    coeffs = _floats(text)
    if len(coeffs) == 1:
        coeffs = coeffs + [0.0] * (alg.size - 1)
    if len(coeffs) != alg.size:
        raise UsageError(f"amplitude needs {alg.size} coefficients in the order {alg.blade_order}")
    return coeffs


def _profile(args) -> Profile:
    overrides = {
        "n": args.n,
        "samples": getattr(args, "grid", None),
        "extent": getattr(args, "extent", None),
        "rotations": getattr(args, "rotations", None),
        "threads": args.threads,
        "seed": getattr(args, "seed", None),
        "spectrum": getattr(args, "spectrum", None),
    }
    if getattr(args, "scales", None):
        a_min, a_max, J = args.scales
        overrides["scales"] = (a_min, a_max, int(J))
    mother = {}
    for key, attr in (("sigma", "sigma"), ("omega0", "omega0")):
        if getattr(args, attr, None):
            mother[key] = getattr(args, attr)
    if getattr(args, "mother_file", None):
        mother = {"kind": "file", "path": args.mother_file}
    if mother:
        overrides["mother"] = mother
    profile = load_profile(args.config, overrides)
    if getattr(args, "amplitude", None) and profile.mother.get("kind") == "gabor":
        profile.mother = {**profile.mother, "A": _amplitude(args.amplitude, profile.n)}
    return profile


def _print(text: str = "") -> None:
    sys.stdout.write(text + "\n")


# -- commands ------------------------------------------------------------------

def cmd_gabor(args) -> int:
    profile = _profile(args)
    psi = build_mother(profile.mother, profile.n)
    f = psi.sample(profile.spatial_grid())
    means, tol = zero_mean_residuals(f)
    clwf.save(args.out, f, {"mother": psi.params})
    alg = f.alg
    _print(f"wrote {args.out}: n={profile.n}, grid={f.grid.shape}, parity epsilon={psi.epsilon:+d}")
    for name, m in zip(alg.names, means):
        _print(f"  mean[{name}] = {m:+.3e}")
    ok = bool(np.all(np.abs(means) <= tol))
    _print(f"zero mean: {'yes' if ok else 'NO'} (tolerance {tol:.3e})")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_signal(args) -> int:
    profile = _profile(args)
    grid = profile.spatial_grid()
    if args.kind == "band":
        f = band_limited_signal(grid, profile.signal_band, profile.signal_modes, profile.rng(3))
    else:
        f = gaussian_signals(grid, 1, profile.rng(2))[0].sample(grid)
    clwf.save(args.out, f, {"signal": args.kind, "seed": profile.seed})
    _print(f"wrote {args.out}: {args.kind} signal, norm {norm(f):.6g}")
    return EXIT_OK


def cmd_admissibility(args) -> int:
    profile = _profile(args)
    psi = build_mother(profile.mother, profile.n)
    try:
        C = admissibility(psi, profile.spatial_grid())
    except NotAdmissible as exc:
        _print(f"not admissible: {exc}")
        return EXIT_FAIL
    alg = C.value.alg
    _print(f"C_psi (epsilon={C.epsilon:+d}, quadrature grid {C.grid.shape}):")
    for name, c in zip(alg.names, C.value.coeffs):
        _print(f"  {name:>5} {c:+.12e}")
    _print(f"inverse: {C.inverse!r}")
    _print(f"C': {C.c_prime!r}")
    residual = (C.value * C.inverse - 1.0).norm()
    _print(f"invertible: yes (|C C^-1 - 1| = {residual:.2e})")
    return EXIT_OK


def _mother_meta(profile: Profile) -> dict:
    return {"mother": profile.mother, "spectrum": profile.spectrum}


def cmd_transform(args) -> int:
    f, _ = clwf.load(args.signal)
    args.n = args.n or f.n
    if args.n != f.n:
        raise UsageError(f"--n {args.n} does not match the signal (n={f.n})")
    profile = _profile(args)
    psi = build_mother(profile.mother, profile.n)
    grid = profile.group_grid(spatial=f.grid)
    if args.method == "direct":
        W = transform_direct(psi, f, grid)
    else:
        W = transform_spectral(psi, f, grid, profile.spectrum, profile.threads)
    meta = _mother_meta(profile)
    meta["signal"] = os.path.abspath(args.signal)
    clwf.save(args.out, W, meta)
    _print(f"wrote {args.out}: J={grid.shape[0]}, K={grid.shape[1]}, grid={f.grid.shape}")
    return EXIT_OK


def cmd_invert(args) -> int:
    W, meta = clwf.load(args.coeffs)
    if not hasattr(W, "grid") or not hasattr(W.grid, "scales"):
        raise UsageError(f"{args.coeffs} does not hold wavelet coefficients")
    n = W.grid.n
    spec = meta.get("mother")
    if spec is None:
        raise UsageError("coefficient file does not record its mother wavelet")
    psi = build_mother(spec, n)
    mode = meta.get("spectrum", "auto")
    C = admissibility(psi, W.grid.spatial)
    rec = inverse_transform(W, psi, C, mode, args.threads)
    clwf.save(args.out, rec, {"mother": spec})
    _print(f"wrote {args.out}")
    ref_path = args.reference or meta.get("signal")
    if ref_path and os.path.exists(ref_path):
        ref, _ = clwf.load(ref_path)
        err = norm(rec - ref) / norm(ref)
        _print(f"relative reconstruction error: {err:.6e}")
        if args.max_error is not None and err > args.max_error:
            _print(f"error exceeds the bound {args.max_error}")
            return EXIT_FAIL
    return EXIT_OK


def cmd_verify(args) -> int:
    profile = _profile(args)
    report = run_identity_suite(profile, log=log.info)
    if args.report:
        report.write(args.report)
    _print(report.to_text().rstrip())
    _print("all checks passed" if report.passed else "some checks FAILED")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_export_plot(args) -> int:
    W, _ = clwf.load(args.coeffs)
    if not hasattr(W.grid, "scales"):
        raise UsageError(f"{args.coeffs} does not hold wavelet coefficients")
    grid = W.grid
    n = grid.n
    mod = np.sqrt(np.sum(W.data**2, axis=2))
    pts = grid.spatial.points().reshape(n, -1)
    sep = args.delimiter
    buf = io.StringIO()
    rot_cols = ["theta"] if n == 2 else ["qw", "qx", "qy", "qz"]
    cols = ["j", "k", "a", *rot_cols, *[f"b{i + 1}" for i in range(n)], "modulus"]
    buf.write(sep.join(cols) + "\n")
    nodes = list(grid.nodes())
    if args.node:
        j0, k0 = args.node
        nodes = [node for node in nodes if node[0] == j0 and node[1] == k0]
        if not nodes:
            raise UsageError(f"no group node ({j0}, {k0})")
    for j, k, a, theta in nodes:
        rot = [theta] if n == 2 else list(theta)
        m = mod[j, k].reshape(-1)
        for i in range(0, m.size, args.stride):
            row = [str(j), str(k), repr(a), *map(repr, rot), *(repr(float(v)) for v in pts[:, i]), repr(float(m[i]))]
            buf.write(sep.join(row) + "\n")
    clwf.atomic_write(args.out, buf.getvalue())
    _print(f"wrote {args.out}: {len(nodes)} nodes")
    return EXIT_OK


# -- parser --------------------------------------------------------------------

class _HelpFormatter(argparse.ArgumentDefaultsHelpFormatter):
    # profile-backed options state their default in the help text itself
    def _get_help_string(self, action):
        if action.default is None or action.default is argparse.SUPPRESS or action.required:
            return action.help
        return super()._get_help_string(action)


def build_parser() -> argparse.ArgumentParser:
    d = Profile()
    fmt = _HelpFormatter
    parser = argparse.ArgumentParser(prog="clifford-cwt", description="Clifford wavelet transforms on R^2 and R^3.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, grid=True, mother=True, group=False):
        p.add_argument("--config", help="JSON or YAML profile; flags override it")
        p.add_argument("--n", type=int, choices=(2, 3), help=f"dimension (default {d.n})")
        p.add_argument("--threads", type=int, help=f"worker threads (default {d.threads})")
        if grid:
            p.add_argument("--grid", type=int, help=f"samples per axis (default {d.samples})")
            p.add_argument("--extent", type=float, help=f"box side length (default {d.extent})")
        if mother:
            p.add_argument("--sigma", type=_floats, help=f"Gabor widths (default {','.join(map(str, d.mother['sigma']))})")
            p.add_argument("--omega0", type=_floats, help=f"Gabor centre frequency (default {','.join(map(str, d.mother['omega0']))})")
            p.add_argument("--amplitude", "--A", dest="amplitude", help="Gabor amplitude A: blade name or coefficients (default 1)")
            p.add_argument("--mother-file", help="use a sampled mother wavelet from a CLWF file")
        if group:
            p.add_argument("--scales", type=_floats, help=f"a_min,a_max,J (default {','.join(map(str, d.scales))})")
            p.add_argument("--rotations", type=int, help=f"rotation nodes K (default {d.rotations})")
            p.add_argument("--spectrum", choices=("auto", "analytic", "sampled"), help=f"daughter spectra (default {d.spectrum})")

    p = sub.add_parser("gabor", help="sample a Gabor mother wavelet", formatter_class=fmt)
    common(p)
    p.add_argument("--out", required=True, help="output CLWF file")
    p.set_defaults(func=cmd_gabor)

    p = sub.add_parser("signal", help="write a test signal", formatter_class=fmt)
    common(p, mother=False)
    p.add_argument("--kind", choices=("band", "gaussian"), default="band", help="band-limited or Gaussian-enveloped")
    p.add_argument("--seed", type=int, help=f"random seed (default {d.seed})")
    p.add_argument("--out", required=True, help="output CLWF file")
    p.set_defaults(func=cmd_signal)

    p = sub.add_parser("admissibility", help="compute the admissibility constant", formatter_class=fmt)
    common(p)
    p.set_defaults(func=cmd_admissibility)

    p = sub.add_parser("transform", help="wavelet transform of a CLWF signal", formatter_class=fmt)
    common(p, grid=False, group=True)
    p.add_argument("--signal", required=True, help="input CLWF field")
    p.add_argument("--method", choices=("spectral", "direct"), default="spectral", help="evaluation path")
    p.add_argument("--out", required=True, help="output CLWF coefficient file")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("invert", help="reconstruct a signal from coefficients", formatter_class=fmt)
    p.add_argument("--coeffs", required=True, help="CLWF coefficient file")
    p.add_argument("--out", required=True, help="output CLWF field")
    p.add_argument("--reference", help="signal to compare against (default: the one recorded in the file)")
    p.add_argument("--max-error", type=float, help="fail if the relative error exceeds this")
    p.add_argument("--threads", type=int, default=1, help="worker threads")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("verify", help="run the identity and uncertainty checks", formatter_class=fmt)
    common(p, group=True)
    p.add_argument("--seed", type=int, help=f"random seed (default {d.seed})")
    p.add_argument("--report", help="write the report to this file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export-plot", help="coefficient modulus as delimited text", formatter_class=fmt)
    p.add_argument("--coeffs", required=True, help="CLWF coefficient file")
    p.add_argument("--out", required=True, help="output text file")
    p.add_argument("--node", type=int, nargs=2, metavar=("J", "K"), help="export one (scale, rotation) node only")
    p.add_argument("--stride", type=int, default=1, help="keep every stride-th translation")
    p.add_argument("--delimiter", default=",", help="column separator")
    p.set_defaults(func=cmd_export_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (UsageError, ParityViolation, ValueError, CliffordError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"clifford-cwt: error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"clifford-cwt: error: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
