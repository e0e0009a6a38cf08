"""Command-line front end.

Exit codes: 0 on success, 1 on a failed check or an I/O error, 2 on invalid
input. All parameters are validated before any computation starts, so a
rejected configuration never produces an output file.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import acceptance, approx, kernels
from ._accel import backend_name
from .grid import SampledField, make_grid
from .io import write_csv
from .symbols import SymbolSpec

log = logging.getLogger("besselriesz")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    command: str
    dim: int = 1
    n: int = 2**15
    length: float = 64.0
    alpha: float = 1.0
    p: float = 2.0
    q: float = 2.0
    s: float = 0.5
    function: str = "gaussian"
    mu_lo: float = 2.0
    mu_hi: float = 256.0
    mu_steps: int | None = None
    mu_max: float = 512.0
    delta: float = 1.0
    inner: float | None = None
    outer: float | None = None
    symbol: str = "quotient"
    seed: int = 0
    cutoff: float = 4.0
    workers: int = 1
    suite: str = "all"
    out: str | None = None

    def mus(self) -> np.ndarray:
        if self.mu_steps is None:
            return approx.mu_grid(self.mu_lo, self.mu_hi)
        return np.geomspace(self.mu_lo, self.mu_hi, self.mu_steps)

    def provenance(self) -> dict:
        keep = {k: v for k, v in asdict(self).items() if v is not None and k != "out"}
        keep["backend"] = backend_name()
        return keep


def parse_mu_range(text: str):
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from exc
    if not (0 < lo <= hi):
        raise argparse.ArgumentTypeError(f"need 0 < lo <= hi, got {text!r}")
    return lo, hi


def _grid_args(parser, n, length):
    parser.add_argument("--dim", type=int, default=1)
    parser.add_argument("--n", type=int, default=n, help="points per axis (power of two)")
    parser.add_argument("--length", type=float, default=length, help="torus side length")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", help="CSV output path")
    parser.add_argument("--dump-config", action="store_true", help="print the resolved configuration as JSON")


def _mu_args(parser, default="2:256"):
    parser.add_argument("--mu", type=parse_mu_range, default=parse_mu_range(default), help="mu range lo:hi")
    parser.add_argument("--mu-steps", type=int, help="number of geometric mu points (default: ratio sqrt 2)")
    parser.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="besselriesz", description="Bessel-Riesz quotient experiments")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    k = sub.add_parser("kernel", help="extract a kernel profile and measure its decay")
    _grid_args(k, 2**16, 64.0)
    k.add_argument("--symbol", choices=["quotient", "complement", "bessel_potential", "remainder"], default="quotient")
    k.add_argument("--alpha", type=float, default=1.0)
    k.add_argument("--mu", type=float, default=32.0)

    a = sub.add_parser("approx", help="error, modulus of continuity and their ratio over mu")
    _grid_args(a, 2**15, 64.0)
    _mu_args(a)
    a.add_argument("--alpha", type=float, default=1.0)
    a.add_argument("--p", type=float, default=2.0)
    a.add_argument("--function", choices=["gaussian", "bump", "indicator", "tent", "random_band_limited"], default="gaussian")
    a.add_argument("--cutoff", type=float, default=4.0)

    loc = sub.add_parser("localize", help="decay of E f(0) for f vanishing near 0")
    _grid_args(loc, 2**15, 64.0)
    _mu_args(loc)
    loc.add_argument("--alpha", type=float, default=1.0)
    loc.add_argument("--delta", type=float, default=1.0, help="vanishing radius")
    loc.add_argument("--inner", type=float, help="inner support radius (default 2*delta)")
    loc.add_argument("--outer", type=float, help="outer support radius (default 4*delta)")

    sat = sub.add_parser("saturate", help="mu * err(mu) for alpha = 1")
    _grid_args(sat, 2**15, 64.0)
    _mu_args(sat)
    sat.add_argument("--p", type=float, default=2.0)
    sat.add_argument("--function", choices=["gaussian", "bump", "indicator", "tent", "random_band_limited"], default="gaussian")

    b = sub.add_parser("besov", help="Besov seminorm against the approximation integral")
    _grid_args(b, 2**14, 16.0)
    b.add_argument("--function", choices=["gaussian", "bump", "indicator", "tent"], default="gaussian")
    b.add_argument("--s", type=float, default=0.5)
    b.add_argument("--p", type=float, default=2.0)
    b.add_argument("--q", type=float, default=2.0)
    b.add_argument("--mu-max", type=float, default=512.0)

    m = sub.add_parser("maximal", help="modulus of I_1 f against the truncated maximal function")
    _grid_args(m, 2**15, 64.0)
    _mu_args(m, "2:64")
    m.add_argument("--p", type=float, default=2.0)
    m.add_argument("--function", choices=["odd-gaussian", "band-limited"], default="odd-gaussian")
    m.add_argument("--cutoff", type=float, default=1.0)

    v = sub.add_parser("verify", help="run acceptance checks")
    v.add_argument("--suite", choices=sorted(acceptance.SUITES), default="all")
    v.add_argument("--dump-config", action="store_true")
    return parser


def config_from_args(args) -> ExperimentConfig:
    cfg = ExperimentConfig(command=args.command)
    for key in ("dim", "n", "length", "alpha", "p", "q", "s", "function", "delta", "inner", "outer", "symbol", "seed", "cutoff", "workers", "suite", "out", "mu_steps", "mu_max"):
        if hasattr(args, key) and getattr(args, key) is not None:
            setattr(cfg, key, getattr(args, key))
    if hasattr(args, "mu"):
        if isinstance(args.mu, tuple):
            cfg.mu_lo, cfg.mu_hi = args.mu
        else:
            cfg.mu_lo = cfg.mu_hi = float(args.mu)
    return cfg


def validate(cfg: ExperimentConfig) -> dict:
    """Build every object the command needs; raises :class:`UsageError` on bad input."""
    try:
        if cfg.command == "verify":
            return {}
        grid = make_grid(cfg.dim, cfg.n, cfg.length)
        if cfg.mu_steps is not None and cfg.mu_steps < 2:
            raise ValueError("--mu-steps must be at least 2")
        objs = {"grid": grid}
        if cfg.command == "kernel":
            objs["symbol"] = SymbolSpec(cfg.symbol, cfg.alpha, cfg.mu_lo)
        elif cfg.command in ("approx", "saturate"):
            if not (1 <= cfg.p < math.inf):
                raise ValueError("--p must satisfy 1 <= p < inf")
            alpha = cfg.alpha if cfg.command == "approx" else 1.0
            SymbolSpec("quotient", alpha, 1.0)
            mus = cfg.mus()
            approx.check_mu_grid(grid, mus, strict=cfg.command == "approx")
            objs["mus"] = mus
            objs["field"] = approx.build_field(approx.TestFunctionSpec(cfg.function, seed=cfg.seed, cutoff=cfg.cutoff), grid)
        elif cfg.command == "localize":
            if not cfg.delta > 0:
                raise ValueError("--delta must be positive")
            SymbolSpec("quotient", cfg.alpha, 1.0)
            inner = 2.0 * cfg.delta if cfg.inner is None else cfg.inner
            outer = 4.0 * cfg.delta if cfg.outer is None else cfg.outer
            if inner < cfg.delta:
                raise ValueError("--inner must be at least --delta")
            if outer >= 0.5 * cfg.length:
                raise ValueError("--outer must stay inside the torus")
            mus = cfg.mus()
            approx.check_mu_grid(grid, mus)
            if mus.min() * cfg.delta <= 1:
                raise ValueError("need mu * delta > 1 for every mu")
            objs["mus"] = mus
            objs["field"] = approx.build_field(approx.TestFunctionSpec("annular", inner=inner, outer=outer), grid)
        elif cfg.command == "besov":
            if not (0 < cfg.s < 1) or not (1 < cfg.p < math.inf) or not (1 <= cfg.q < math.inf):
                raise ValueError("need 0 < s < 1, 1 < p < inf, 1 <= q < inf")
            if cfg.mu_max <= 10 or 1.0 / cfg.mu_max < 2 * grid.spacing:
                raise ValueError("--mu-max must exceed 10 and keep 1/mu_max >= 2h")
            objs["field"] = approx.build_field(approx.TestFunctionSpec(cfg.function), grid)
        elif cfg.command == "maximal":
            if not cfg.p > 1:
                raise ValueError("--p must exceed 1")
            mus = cfg.mus()
            approx.check_mu_grid(grid, mus)
            objs["mus"] = mus
        if cfg.command != "kernel" and cfg.dim != 1:
            raise ValueError("experiments other than 'kernel' run in one dimension")
        return objs
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _emit(result, cfg, summary):
    print(summary)
    if cfg.out:
        write_csv(result, cfg.out, cfg.provenance())
        print(f"wrote {cfg.out}")


def execute(cfg: ExperimentConfig, objs: dict) -> int:
    cmd = cfg.command
    if cmd == "verify":
        results = acceptance.run_suite(cfg.suite)
        for res in results:
            print(res.line())
        failed = [r.number for r in results if not r.passed]
        print(f"{len(results) - len(failed)}/{len(results)} checks passed")
        return EXIT_FAIL if failed else EXIT_OK

    grid = objs["grid"]
    if cmd == "kernel":
        symbol = objs["symbol"]
        profile = kernels.extract_kernel(symbol, grid)
        summary = f"kernel of {symbol.kind} (alpha={symbol.alpha}, mu={symbol.mu}) on n={grid.n}, L={grid.length}"
        if symbol.kind == "quotient" and grid.dim == 1:
            try:
                rep = kernels.decay_check(profile, symbol.alpha, symbol.mu)
                summary += f"\nsup Q = {rep.extra['sup']:.6g}, far-field slope = {rep.extra['far_slope']:.4f}"
            except ValueError as exc:
                summary += f"\ndecay check skipped: {exc}"
        _emit(profile, cfg, summary)
        return EXIT_OK

    if cmd in ("approx", "saturate"):
        fld = objs["field"]
        if cmd == "approx":
            curve = approx.equivalence_curve(fld, cfg.alpha, cfg.p, objs["mus"], workers=cfg.workers)
            r = curve["ratio"]
            summary = f"err/omega ratio in [{r.min():.4g}, {r.max():.4g}], max/min {r.max() / max(r.min(), 1e-300):.4g}"
        else:
            curve = approx.saturation_curve(fld, cfg.p, objs["mus"], workers=cfg.workers)
            summary = f"mu*err at top of grid {curve['mu_err'][-1]:.6g}"
            if "limit" in curve.meta:
                summary += f", || |D| f ||_2 = {curve.meta['limit']:.6g}"
        if np.all(curve["err"] > 0):
            slope = curve.fit("err")[0]
            summary += f"\nfitted slope of err: {slope:.4f}"
        _emit(curve, cfg, summary)
        return EXIT_OK

    if cmd == "localize":
        fld = objs["field"]
        curve = approx.localization_slope(fld, cfg.alpha, 0.0, objs["mus"], delta=cfg.delta, workers=cfg.workers)
        fit = curve.fits["value"]
        summary = "E f(0) identically zero" if fit is None else f"fitted slope of |E f(0)|: {fit[0]:.4f} (reference {-cfg.alpha / 2:.2f})"
        _emit(curve, cfg, summary)
        return EXIT_OK

    if cmd == "besov":
        fld = objs["field"]
        rep = approx.besov_ratio(fld, cfg.s, cfg.p, cfg.q, cfg.mu_max)
        print(f"lhs {rep.lhs:.6g}, rhs {rep.rhs:.6g}, ratio {rep.ratio:.6g}, truncation defect {rep.defect:.2%}")
        if not rep.reliable:
            print("truncation defect above 5%: no claim made")
        return EXIT_OK

    if cmd == "maximal":
        fields = acceptance.mean_zero_fields(grid)
        if cfg.function == "odd-gaussian":
            fld = fields["x*gaussian"]
        else:
            band = approx.build_field(approx.TestFunctionSpec("random_band_limited", seed=cfg.seed, cutoff=cfg.cutoff), grid)
            fld = SampledField(grid, band.values - band.values.mean())
        curve = approx.muckenhoupt_wheeden_check(fld, cfg.p, objs["mus"], workers=cfg.workers)
        summary = f"fitted constant {curve.meta['constant']:.6g}, worst relative {curve.meta['worst']:.4g}, holds: {curve.meta['holds']}"
        _emit(curve, cfg, summary)
        return EXIT_OK if curve.meta["holds"] else EXIT_FAIL
    raise UsageError(f"unknown command {cmd!r}")


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    cfg = config_from_args(args)
    try:
        objs = validate(cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "dump_config", False):
        print(json.dumps(cfg.provenance(), indent=2, sort_keys=True))
    log.info("backend: %s", backend_name())
    try:
        return execute(cfg, objs)
    except OSError as exc:
        target = cfg.out or "output"
        print(f"error: cannot write {target}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_FAIL


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
