"""Command-line driver: inpaint, interpolate, and compare modes.

    nsinpaint inpaint --input img.pgm --mask mask.pgm --method h1 --output out.pgm
    nsinpaint interpolate --input img.pgm --factor 2 --method h1 --output out.pgm
    nsinpaint compare --input img.pgm --mask mask.pgm --out-dir results/

Exit codes: 0 success, 1 usage, 2 I/O, 3 domain/mask, 4 non-convergence
(best-so-far output is still written).  Traces are CSV files with header
``iter,energy,residual2,error,step,kappa,wall_ms``; by default wall_ms is
recorded as 0 so identical runs produce byte-identical files (pass
--timings for real timings).  INPAINT_THREADS caps compare-mode
parallelism.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import imageio
from .energy import GradientKind, compute_state
from .errors import (
    AllZeroImage,
    EmptyMask,
    FactorTooSmall,
    InpaintError,
    InvalidDomain,
    IoError,
    MaskTouchesBorder,
    NonFiniteEnergy,
    NonFiniteValues,
    ShapeMismatch,
    SorDidNotConverge,
    UnsupportedFormat,
)
from .grid import BORDER_MARGIN, GrayImage, extract_domain, restrict
from .operators import build_operators, factor_preconditioner
from .solver import (
    ConvergenceTrace,
    SolverConfig,
    StopReason,
    TraceRecord,
    harmonic_init,
    minimize,
)
from .transport import BbsConfig, bbs_run

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_DOMAIN = 3
EXIT_NO_CONVERGENCE = 4

METHODS = ("el", "h1", "h2", "h3", "bbs", "laplace-only")
COMPARE_METHODS = ("bbs", "el", "h1", "h3")

_IO_ERRORS = (IoError, UnsupportedFormat, AllZeroImage)
_DOMAIN_ERRORS = (EmptyMask, MaskTouchesBorder, ShapeMismatch, InvalidDomain)


@dataclass
class RunSpec:
    """One driver invocation, fully resolved."""

    mode: str  # inpaint | interpolate | compare
    input: str
    output: str | None = None
    mask: str | None = None
    factor: int | None = None
    method: str = "h1"
    out_dir: str | None = None
    trace: str | None = None
    tol: float = 1e-4
    max_iters: int = 20000
    sor_omega: float = 1.8
    sor_tol: float = 1e-8
    sor_max_iters: int = 50000
    line_search: str = "quartic"
    step_min: float = 1e-14
    dt: float | None = None
    dt_cap: float = 0.004
    diffusion_every: int = 50
    diffusion_steps: int = 5
    pm_k: float = 0.1
    pm_dt: float = 0.2
    limiter: str = "central"
    init_diffusion_steps: int = 0
    kappa_unrooted: bool = False
    reproducible: bool = True
    log_every: int = 0

    def solver_config(self, method: str) -> SolverConfig:
        return SolverConfig(
            gradient_kind=GradientKind.from_method(method),
            tol=self.tol,
            max_iters=self.max_iters,
            sor_omega=self.sor_omega,
            sor_tol=self.sor_tol,
            sor_max_iters=self.sor_max_iters,
            line_search=self.line_search,
            step_min=self.step_min,
            kappa_unrooted=self.kappa_unrooted,
            reproducible=self.reproducible,
            log_every=self.log_every,
        )

    def bbs_config(self) -> BbsConfig:
        return BbsConfig(
            dt=self.dt,
            dt_cap=self.dt_cap,
            diffusion_every=self.diffusion_every,
            diffusion_steps=self.diffusion_steps,
            pm_k=self.pm_k,
            pm_dt=self.pm_dt,
            limiter=self.limiter,
            max_iters=self.max_iters,
            tol=self.tol,
            init_diffusion_steps=self.init_diffusion_steps,
            reproducible=self.reproducible,
            log_every=self.log_every,
        )


def _laplace_only_trace(image: GrayImage, domain, ops, fact, spec: RunSpec) -> ConvergenceTrace:
    from .conditioning import relative_condition
    from .energy import gradient_el_from_state

    u_prime = restrict(image, domain, "omega_prime")
    state = compute_state(u_prime, ops)
    kappa = math.nan
    if state.energy > 0.0:
        g_el = gradient_el_from_state(state, ops)
        kappa = relative_condition(
            restrict(image, domain, "omega"), g_el, fact, 0, state.energy,
            unrooted=spec.kappa_unrooted,
        )
    trace = ConvergenceTrace(meta={"method": "laplace-only", "tol": f"{spec.tol:.17g}"})
    trace.append(
        TraceRecord(0, state.energy, 2.0 * state.energy, math.nan, math.nan, kappa, 0.0)
    )
    return trace


def run_method(method: str, init: GrayImage, domain, ops, fact, spec: RunSpec):
    """Run one method from an initialized image; returns (image, trace, stop)."""
    if method == "laplace-only":
        return init, _laplace_only_trace(init, domain, ops, fact, spec), StopReason.CONVERGED
    if method == "bbs":
        return bbs_run(init, domain, ops, spec.bbs_config(), fact=fact)
    return minimize(init, domain, ops, fact, spec.solver_config(method))


def _trim_mask_to_margin(mask):
    trimmed = mask.copy()
    trimmed[:BORDER_MARGIN, :] = False
    trimmed[-BORDER_MARGIN:, :] = False
    trimmed[:, :BORDER_MARGIN] = False
    trimmed[:, -BORDER_MARGIN:] = False
    return trimmed


def _final_energy(image: GrayImage, domain, ops) -> float:
    return compute_state(restrict(image, domain, "omega_prime"), ops).energy


def run(spec: RunSpec) -> int:
    """Execute a RunSpec; returns the process exit code."""
    try:
        image = imageio.load_image(spec.input)
        if spec.mode == "interpolate":
            image, mask = imageio.expand_nearest(image, spec.factor)
            # expansion masks the border ring too; keep the margin-legal part
            # and leave the outer ring at its nearest-neighbor values
            mask = _trim_mask_to_margin(mask)
        else:
            mask = imageio.load_mask(spec.mask)
    except _IO_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except FactorTooSmall as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        domain = extract_domain(image, mask)
        ops = build_operators(domain)
        fact = factor_preconditioner(domain)
    except _DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN

    if spec.mode == "compare":
        return _run_compare(image, domain, ops, fact, spec)

    best = image
    try:
        init = harmonic_init(image, domain, SolverConfig(
            sor_omega=spec.sor_omega,
            sor_tol=spec.sor_tol,
            sor_max_iters=spec.sor_max_iters,
            tol=spec.tol,
        ))
        best = init
        out_img, trace, stop = run_method(spec.method, init, domain, ops, fact, spec)
        best = out_img
    except (SorDidNotConverge, NonFiniteEnergy, NonFiniteValues, InpaintError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        _write_outputs(best, None, spec)
        return EXIT_NO_CONVERGENCE

    code = EXIT_OK if stop == StopReason.CONVERGED else EXIT_NO_CONVERGENCE
    if code != EXIT_OK:
        print(f"did not converge: {stop.value}", file=sys.stderr)
    try:
        _write_outputs(out_img, trace, spec)
    except _IO_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return code


def _write_outputs(image: GrayImage, trace, spec: RunSpec) -> None:
    if spec.output:
        imageio.save_image(image, spec.output)
    if spec.trace and trace is not None:
        trace.to_csv(spec.trace)


def _run_compare(image, domain, ops, fact, spec: RunSpec) -> int:
    out_dir = Path(spec.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ext = Path(spec.input).suffix.lower()
    if ext not in (".pgm", ".png"):
        ext = ".pgm"

    init = harmonic_init(image, domain, SolverConfig(
        sor_omega=spec.sor_omega,
        sor_tol=spec.sor_tol,
        sor_max_iters=spec.sor_max_iters,
        tol=spec.tol,
    ))

    def one(method):
        return method, run_method(method, init, domain, ops, fact, spec)

    workers = max(1, int(os.environ.get("INPAINT_THREADS", "4")))
    results = {}
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for method, outcome in pool.map(one, COMPARE_METHODS):
            results[method] = outcome

    rows = []
    all_converged = True
    for method in COMPARE_METHODS:
        out_img, trace, stop = results[method]
        imageio.save_image(out_img, out_dir / f"{method}{ext}")
        trace.to_csv(out_dir / f"{method}_trace.csv")
        final_e = _final_energy(out_img, domain, ops)
        final_err = trace.records[-1].error if trace.records else math.nan
        rows.append(
            f"{method},{trace.iterations},{stop.value},{final_e:.17g},"
            f"{final_err:.17g},{2.0 * final_e:.17g}"
        )
        all_converged = all_converged and stop == StopReason.CONVERGED

    with open(out_dir / "summary.csv", "w", newline="") as fh:
        fh.write("method,iterations,stop_reason,final_energy,final_error,final_residual2\n")
        for row in rows:
            fh.write(row + "\n")
    return EXIT_OK if all_converged else EXIT_NO_CONVERGENCE


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=1e-4, help="stopping tolerance on max|u_{n+1}-u_n|")
    p.add_argument("--max-iters", type=int, default=20000)
    p.add_argument("--sor-omega", type=float, default=1.8)
    p.add_argument("--sor-tol", type=float, default=1e-8)
    p.add_argument("--sor-max-iters", type=int, default=50000)
    p.add_argument("--line-search", choices=("quartic", "golden_section", "backtracking"), default="quartic")
    p.add_argument("--step-min", type=float, default=1e-14)
    p.add_argument("--dt", type=float, default=None, help="transport step (default: capped advective CFL)")
    p.add_argument("--dt-cap", type=float, default=0.004)
    p.add_argument("--diffusion-every", type=int, default=50)
    p.add_argument("--diffusion-steps", type=int, default=5)
    p.add_argument("--pm-k", type=float, default=0.1)
    p.add_argument("--pm-dt", type=float, default=0.2)
    p.add_argument("--limiter", choices=("central", "minmod-upwind"), default="central")
    p.add_argument("--init-diffusion-steps", type=int, default=0)
    p.add_argument("--kappa-unrooted", action="store_true",
                   help="log the un-rooted condition-number variant")
    p.add_argument("--timings", action="store_true",
                   help="record real wall times (breaks byte-reproducibility)")
    p.add_argument("--log-every", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nsinpaint", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="mode", required=True)

    p_in = sub.add_parser("inpaint", help="fill a masked region")
    p_in.add_argument("--input", required=True)
    p_in.add_argument("--mask", required=True)
    p_in.add_argument("--method", choices=METHODS, default="h1")
    p_in.add_argument("--output", required=True)
    p_in.add_argument("--trace", default=None)
    _add_common(p_in)

    p_it = sub.add_parser("interpolate", help="integer upscaling via inpainting")
    p_it.add_argument("--input", required=True)
    p_it.add_argument("--factor", type=int, choices=(2, 3, 4), required=True)
    p_it.add_argument("--method", choices=METHODS, default="h1")
    p_it.add_argument("--output", required=True)
    p_it.add_argument("--trace", default=None)
    _add_common(p_it)

    p_cmp = sub.add_parser("compare", help="run bbs/el/h1/h3 on the same inputs")
    p_cmp.add_argument("--input", required=True)
    p_cmp.add_argument("--mask", required=True)
    p_cmp.add_argument("--out-dir", required=True)
    _add_common(p_cmp)

    return parser


def spec_from_args(args: argparse.Namespace) -> RunSpec:
    return RunSpec(
        mode=args.mode,
        input=args.input,
        output=getattr(args, "output", None),
        mask=getattr(args, "mask", None),
        factor=getattr(args, "factor", None),
        method=getattr(args, "method", "h1"),
        out_dir=getattr(args, "out_dir", None),
        trace=getattr(args, "trace", None),
        tol=args.tol,
        max_iters=args.max_iters,
        sor_omega=args.sor_omega,
        sor_tol=args.sor_tol,
        sor_max_iters=args.sor_max_iters,
        line_search=args.line_search,
        step_min=args.step_min,
        dt=args.dt,
        dt_cap=args.dt_cap,
        diffusion_every=args.diffusion_every,
        diffusion_steps=args.diffusion_steps,
        pm_k=args.pm_k,
        pm_dt=args.pm_dt,
        limiter=args.limiter,
        init_diffusion_steps=args.init_diffusion_steps,
        kappa_unrooted=args.kappa_unrooted,
        reproducible=not args.timings,
        log_every=args.log_every,
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        spec = spec_from_args(args)
        return run(spec)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
