"""Command-line front end.

Subcommands cover the full pipeline: exact probabilities, moments,
generating-function zeros, saddle-point approximation, local-CLT and
CLT diagnostics, Monte Carlo comparison, and a cross-validation battery
(``check``). Output is plot-ready CSV (or its JSON mirror) written
atomically when a path is given. Grid sweeps over ``--n-list`` and
``--tau-list`` dispatch independent runs to a process pool; every run
is a pure function of (parameters, bits), so the output is identical
for any worker count.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

import mpmath

from . import distribution, gaussian_compare, kernel, montecarlo, output, saddle, spectral
from .errors import EllipticGinoeError
from .kernel import EnsembleParams
from .pipeline import compute_distribution, compute_kernel, compute_spectrum
from .precision import ENV_BITS, DEFAULT_BITS, PrecisionContext

SUBCOMMANDS = ("probs", "moments", "zeros", "saddle", "lclt", "clt", "mc", "check")


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    n: int
    tau: Optional[Fraction]
    alpha: Optional[Fraction]
    bits: int
    k: Optional[int] = None
    trials: Optional[int] = None
    seed: int = 1
    out: Optional[str] = None
    fmt: str = "csv"

    def params(self) -> EnsembleParams:
        if self.alpha is not None:
            return EnsembleParams.from_alpha(self.n, self.alpha)
        return EnsembleParams(n=self.n, tau=self.tau)

    def ctx(self) -> PrecisionContext:
        return PrecisionContext(bits=self.bits)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="elliptic-ginoe",
        description="Real-eigenvalue count statistics of elliptic GinOE matrices",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, text in (
        ("probs", "exact distribution of the number of real eigenvalues"),
        ("moments", "exact and asymptotic mean/variance"),
        ("zeros", "generating-function zeros with negativity certificate"),
        ("saddle", "saddle-point approximation at --k"),
        ("lclt", "local-CLT difference profile and sup norms"),
        ("clt", "Kolmogorov distance to the normal law"),
        ("mc", "Monte Carlo comparison against the exact distribution"),
        ("check", "cross-validation battery with a pass/fail report"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--n", type=int, help="matrix size (even)")
        p.add_argument("--n-list", type=str, help="comma-separated sizes for a grid sweep")
        group = p.add_mutually_exclusive_group()
        group.add_argument("--tau", type=str, help="ellipticity in [0,1), exact decimal or fraction")
        group.add_argument("--alpha", type=str, help="weak-nonsymmetry parameter (tau = 1 - alpha^2/n)")
        p.add_argument("--tau-list", type=str, help="comma-separated tau values for a grid sweep")
        p.add_argument(
            "--bits",
            type=int,
            default=int(os.environ.get(ENV_BITS, DEFAULT_BITS)),
            help=f"binary working precision (default {DEFAULT_BITS}, env {ENV_BITS})",
        )
        p.add_argument("--out", type=str, help="output file (grid sweeps: output directory)")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
        if name == "saddle":
            p.add_argument("--k", type=int, required=True, help="half count, 0 < k < n/2")
        if name in ("mc", "check"):
            p.add_argument("--trials", type=int, default=None)
            p.add_argument("--seed", type=int, default=1)
    return parser


def produce(config: RunConfig) -> tuple[str, int]:
    """Run one subcommand at one parameter point.

    Returns the output text and an exit code (nonzero only when the
    check battery reports failures).
    """
    params = config.params()
    ctx = config.ctx()
    buf = io.StringIO()
    code = 0

    if config.subcommand == "probs":
        dist = compute_distribution(params, ctx)
        distribution.dump_distribution(dist, ctx, buf)

    elif config.subcommand == "moments":
        spec = compute_spectrum(params, ctx)
        mean, var = distribution.moments_exact(spec, ctx)
        amean, avar = distribution.moments_asymptotic(params, ctx)
        digits = output.digits_for_bits(ctx.bits)
        branch = "weak-nonsymmetry" if params.alpha is not None else "fixed-tau"
        buf.write(f"# N={params.n} tau={output.format_fraction(params.tau, digits)} bits={ctx.bits}\n")
        buf.write("mean_exact,var_exact,mean_asymptotic,var_asymptotic,branch\n")
        buf.write(
            f"{output.format_mpf(mean, digits)},{output.format_mpf(var, digits)},"
            f"{output.format_mpf(amean, digits)},{output.format_mpf(avar, digits)},{branch}\n"
        )

    elif config.subcommand == "zeros":
        spec = compute_spectrum(params, ctx)
        zs = distribution.zeros(spec, ctx)
        digits = output.digits_for_bits(ctx.bits)
        all_neg = all(z < 0 for z in zs.zeros)
        buf.write(f"# N={params.n} tau={output.format_fraction(params.tau, digits)} bits={ctx.bits}\n")
        buf.write(
            f"# all_negative={str(all_neg).lower()} "
            f"max_residual_ratio={output.format_mpf(zs.max_residual_ratio, 8)}\n"
        )
        buf.write("index,zero\n")
        for i, z in enumerate(zs.zeros):
            buf.write(f"{i},{output.format_mpf(z, digits)}\n")

    elif config.subcommand == "saddle":
        spec = compute_spectrum(params, ctx)
        dist = compute_distribution(params, ctx)
        res = saddle.stirling_approx(spec, config.k, ctx, dist=dist)
        saddle.dump_saddle([res], ctx, buf)

    elif config.subcommand == "lclt":
        dist = compute_distribution(params, ctx)
        profile = gaussian_compare.diff_profile(dist, ctx)
        gaussian_compare.dump_profile(profile, ctx, buf)

    elif config.subcommand == "clt":
        dist = compute_distribution(params, ctx)
        dval = gaussian_compare.clt_distance(dist, ctx)
        digits = output.digits_for_bits(ctx.bits)
        buf.write(f"# N={params.n} tau={output.format_fraction(params.tau, digits)} bits={ctx.bits}\n")
        buf.write("kolmogorov_distance\n")
        buf.write(f"{output.format_mpf(dval, digits)}\n")

    elif config.subcommand == "mc":
        trials = config.trials if config.trials is not None else 10_000
        result = montecarlo.empirical_distribution(params, trials, config.seed)
        dist = compute_distribution(params, ctx)
        montecarlo.dump_mc(result, dist.probs, ctx, buf)

    elif config.subcommand == "check":
        code = run_check(params, ctx, config.trials, config.seed, buf)

    else:
        raise EllipticGinoeError(f"unknown subcommand {config.subcommand}")

    text = buf.getvalue()
    if config.fmt == "json" and config.subcommand != "check":
        text = output.csv_to_json(text) + "\n"
    return text, code


def run_check(params: EnsembleParams, ctx: PrecisionContext, trials, seed, buf) -> int:
    """Cross-validation battery; writes PASS/FAIL lines, returns exit code."""
    import gmpy2  # noqa: F401  (spectral's determinant oracle needs the backend anyway)
    from mpmath import mp, mpf

    checks = []

    def record(name, ok, detail=""):
        checks.append(ok)
        buf.write(f"{'PASS' if ok else 'FAIL'} {name}{': ' + detail if detail else ''}\n")

    mat = compute_kernel(params, ctx)
    spec = compute_spectrum(params, ctx)
    dist = compute_distribution(params, ctx)
    with mp.workprec(ctx.verify_bits):
        if params.tau != 0:
            hyp = kernel.build_kernel_hypergeometric(params, ctx, validate_against_integral=False)
            dev = max(
                abs(a - b)
                for ra, rb in zip(hyp.entries, mat.entries)
                for a, b in zip(ra, rb)
            )
            record(
                "kernel closed form vs integral",
                dev <= mpf(2) ** (-ctx.bits // 2),
                f"max |dev| = {mpmath.nstr(dev, 6)}",
            )
            rec = hyp.reconciliation
            buf.write(
                f"INFO as-printed closed form deviates by {mpmath.nstr(rec.printed_max_abs_deviation, 6)} "
                f"(corrected via {rec.substitutions})\n"
            )

        trace = mpmath.fsum(mat.entries[i][i] for i in range(mat.dim))
        det = spectral.determinant(mat, max(spec.internal_bits + 64, ctx.verify_bits))
        lam_sum = mpmath.fsum(spec.lambdas)
        lam_prod = mpf(1)
        for lam in spec.lambdas:
            lam_prod *= lam
        tol = mpf(2) ** (-ctx.bits + 16)
        record(
            "eigenvalue sum vs trace",
            abs(lam_sum - trace) <= tol * abs(trace),
            f"rel dev = {mpmath.nstr(abs(lam_sum - trace) / abs(trace), 6)}",
        )
        record(
            "eigenvalue product vs determinant",
            abs(lam_prod - det) <= tol * abs(det),
            f"rel dev = {mpmath.nstr(abs(lam_prod - det) / abs(det), 6)}",
        )
        record(
            "eigenvalues inside (0, 1)",
            all(0 < lam < 1 for lam in spec.lambdas),
            f"min = {mpmath.nstr(spec.lambdas[-1], 6)}, max = {mpmath.nstr(spec.lambdas[0], 6)}",
        )

        zs = distribution.zeros(spec, ctx)
        record("generating-function zeros negative", all(z < 0 for z in zs.zeros))

        total = mpmath.fsum(dist.probs)
        record(
            "probabilities sum to 1",
            abs(total - 1) <= mpf(2) ** (-ctx.bits + 24),
            f"|sum - 1| = {mpmath.nstr(abs(total - 1), 6)}",
        )

        dft = distribution.probabilities_dft(spec, ctx, cross_check=False)
        rel_tol = mpf(2) ** (-(ctx.bits // 2))
        floor = mpf(10) ** (-(ctx.bits // 4))
        worst = mpf(0)
        for a, b in zip(dft.probs, dist.probs):
            if b > floor:
                worst = max(worst, abs(a - b) / b)
        record("convolution vs DFT probabilities", worst <= rel_tol, f"max rel dev = {mpmath.nstr(worst, 6)}")

        mean_p = mpmath.fsum(2 * k * p for k, p in enumerate(dist.probs))
        var_p = mpmath.fsum((2 * k) ** 2 * p for k, p in enumerate(dist.probs)) - mean_p**2
        mtol = mpf(2) ** (-ctx.bits + 24)
        record(
            "moments from probabilities vs eigenvalue formulas",
            abs(mean_p - dist.mean_nr) <= mtol * dist.mean_nr
            and abs(var_p - dist.var_nr) <= mtol * dist.var_nr,
        )

        cert = distribution.log_concavity_check(dist)
        record(
            "log-concavity",
            cert.passed,
            f"worst relative margin = {mpmath.nstr(cert.worst_relative_margin, 6)}",
        )

        if spec.dim >= 3:
            k_mid = spec.dim // 2
            r = saddle.solve_saddle(spec, k_mid, ctx)
            h = r * mpf(2) ** (-ctx.bits // 4)
            deriv = (saddle.mean_shift_a(spec, r + h, ctx) - saddle.mean_shift_a(spec, r - h, ctx)) / (2 * h)
            target = saddle.var_shift_b(spec, r, ctx) / r
            record(
                "tilt identity a'(r) = b(r)/r",
                abs(deriv - target) <= mpf(2) ** (-ctx.bits // 2 + 8) * abs(target),
                f"rel dev = {mpmath.nstr(abs(deriv - target) / abs(target), 6)}",
            )

    if trials:
        result = montecarlo.empirical_distribution(params, trials, seed)
        worst_z = 0.0
        for k, count in enumerate(result.counts):
            p = float(dist.probs[k])
            se = (p * (1 - p) / result.trials) ** 0.5
            emp = count / result.trials
            if se > 0:
                worst_z = max(worst_z, abs(emp - p) / se)
            elif count:
                worst_z = float("inf")
        record("Monte Carlo bins within 5 sigma", worst_z <= 5.0, f"worst |z| = {worst_z:.2f}")

    ok = all(checks)
    buf.write(f"{'OK' if ok else 'FAILED'} ({sum(checks)}/{len(checks)} checks passed)\n")
    return 0 if ok else 1


def _parse_fraction(text: str, what: str, parser) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        parser.error(f"cannot parse {what} value {text!r} as an exact number")


def _grid_worker(config: RunConfig) -> tuple[str, int]:
    path = _grid_path(config)
    text, code = produce(config)
    output.atomic_write(path, text)
    return path, code


def _grid_path(config: RunConfig) -> str:
    tau_tag = f"a{config.alpha}" if config.alpha is not None else f"t{config.tau}"
    tau_tag = tau_tag.replace("/", "_")
    ext = "json" if config.fmt == "json" else "csv"
    return os.path.join(config.out, f"{config.subcommand}_n{config.n}_{tau_tag}.{ext}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.n is None and args.n_list is None:
        parser.error("--n (or --n-list) is required")
    if args.tau is None and args.alpha is None and args.tau_list is None:
        parser.error("one of --tau, --alpha, --tau-list is required")
    if args.bits < 64:
        parser.error("--bits must be at least 64")

    base = RunConfig(
        subcommand=args.subcommand,
        n=args.n if args.n is not None else 0,
        tau=_parse_fraction(args.tau, "tau", parser) if args.tau is not None else None,
        alpha=_parse_fraction(args.alpha, "alpha", parser) if args.alpha is not None else None,
        bits=args.bits,
        k=getattr(args, "k", None),
        trials=getattr(args, "trials", None),
        seed=getattr(args, "seed", 1),
        out=args.out,
        fmt=args.fmt,
    )

    ns = [int(s) for s in args.n_list.split(",")] if args.n_list else [base.n]
    taus = (
        [_parse_fraction(s, "tau", parser) for s in args.tau_list.split(",")]
        if args.tau_list
        else [None]
    )
    grid = args.n_list is not None or args.tau_list is not None

    try:
        if not grid:
            text, code = produce(base)
            if base.out:
                output.atomic_write(base.out, text)
            else:
                sys.stdout.write(text)
            if code != 0:
                json.dump(
                    {"error": {"type": "CheckFailure", "message": "cross-validation battery failed"}},
                    sys.stderr,
                )
                sys.stderr.write("\n")
            return code

        if not base.out:
            parser.error("grid sweeps need --out (a directory)")
        configs = []
        for n in ns:
            for tau in taus:
                cfg = replace(base, n=n)
                if tau is not None:
                    cfg = replace(cfg, tau=tau, alpha=None)
                configs.append(cfg)
        workers = min(len(configs), os.cpu_count() or 1)
        worst = 0
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for path, code in pool.map(_grid_worker, configs):
                    worst = max(worst, code)
                    sys.stdout.write(path + "\n")
        else:
            for cfg in configs:
                path, code = _grid_worker(cfg)
                worst = max(worst, code)
                sys.stdout.write(path + "\n")
        return worst
    except EllipticGinoeError as exc:
        json.dump(
            {"error": {"type": type(exc).__name__, "message": str(exc)}},
            sys.stderr,
        )
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
