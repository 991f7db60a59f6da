import functools
import sys
import time
from fractions import Fraction
from typing import Optional

import click
from pydantic import ValidationError
from rich.console import Console
from rich.panel import Panel

from ..config.logconfig import configure_logging
from ..config.settings import settings
from ..core import densities, ensemble, moments
from ..core.errors import ConvergenceError, ModeError, PreconditionError
from ..core.specfun import bessel_zeta
from ..core.verification import SUITES, VerificationEngine
from ..models.spectral import (
    Beta4Representation, DensityKind, DensitySpec, EnsembleConfig, EvalMode, MomentMethod,
    MomentQuery, OutputFormat, ZetaMethod
)
from .output import build_record, emit

console = Console()
err_console = Console(stderr=True)


def parse_number(text: Optional[str], rational: bool):
    """Decimal or p/q text as a Fraction in rational mode, a float otherwise"""
    if text is None:
        return None
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise click.BadParameter(f"not a real number: {text}") from exc
    return value if rational else float(value)


def handle_errors(func):
    """Map precondition failures to exit code 2 and numerical failures to 3"""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (PreconditionError, ValidationError) as exc:
            err_console.print(f"❌ [red]Invalid input:[/red] {exc}")
            sys.exit(2)
        except ConvergenceError as exc:
            err_console.print(f"❌ [red]Numerical failure:[/red] {exc}")
            sys.exit(3)

    return wrapper


def format_option(func):
    return click.option(
        "--format", "output_format",
        type=click.Choice([f.value for f in OutputFormat]),
        default=settings.output_format, show_default=True,
        help="Output format",
    )(func)


def density_options(func):
    func = click.option("--c", type=float, help="Marchenko-Pastur ratio in (0, 1]")(func)
    func = click.option("--beta-class", type=click.Choice(["1", "2", "4"]), help="Hard-edge beta")(func)
    func = click.option("--alpha", type=float, help="Laguerre exponent")(func)
    func = click.option("--N", "n_size", type=int, help="Matrix size (finite_beta2)")(func)
    func = click.option(
        "--kind", type=click.Choice([k.value for k in DensityKind]), required=True, help="Density family"
    )(func)
    return func


def _density_spec(kind: str, n_size: Optional[int], alpha: Optional[float],
                  beta_class: Optional[str], c: Optional[float]) -> DensitySpec:
    return DensitySpec(
        kind=kind, n_size=n_size, alpha=alpha, beta_class=None if beta_class is None else int(beta_class), c=c
    )


def _elapsed_ms(start: float) -> float:
    return (time.perf_counter() - start) * 1000


@click.group()
@click.version_option(version="1.0.0")
@click.option("--log-level", default=None, help="Log level for stderr diagnostics (default HARDEDGE_LOG_LEVEL)")
def cli(log_level):
    """
    hardedge - inverse spectral moments of the beta-Laguerre ensemble

    Exact finite-N and hard-edge moment formulas, Bessel zeta values,
    density quadrature oracles and Monte Carlo ground truth.
    """
    configure_logging(log_level or settings.log_level)


@cli.command()
@click.option("--k", type=int, help="Integer order k >= 1")
@click.option("--s", "s_real", type=float, help="Real part of the Mellin variable s")
@click.option("--s-imag", type=float, default=0.0, show_default=True, help="Imaginary part of s")
@click.option("--beta", default="2", show_default=True, help="Dyson index (decimal or p/q)")
@click.option("--alpha", help="Laguerre exponent (decimal or p/q)")
@click.option("--nu", help="Low-temperature parameter, alpha = beta(nu+1)/2 with beta -> infinity")
@click.option("--N", "n_size", type=int, help="Matrix size; omit for the hard-edge limit")
@click.option("--limit", is_flag=True, help="Hard-edge limit (the default without --N)")
@click.option("--mode", type=click.Choice([m.value for m in EvalMode]), default="float", show_default=True)
@click.option("--method", type=click.Choice([m.value for m in MomentMethod]), default="auto", show_default=True)
@click.option(
    "--representation", type=click.Choice([r.value for r in Beta4Representation]),
    default="three_f_two", show_default=True, help="Series form for beta=4 Mellin transforms",
)
@format_option
@handle_errors
def moment(k, s_real, s_imag, beta, alpha, nu, n_size, limit, mode, method, representation, output_format):
    """Compute an inverse moment E sum lambda^-k or its Mellin continuation"""
    if limit and n_size is not None:
        raise click.UsageError("--limit and --N are mutually exclusive")
    rational = mode == EvalMode.RATIONAL.value
    query = MomentQuery(
        k=k,
        s=None if s_real is None else complex(s_real, s_imag),
        beta=parse_number(beta, rational),
        alpha=parse_number(alpha, rational),
        nu=parse_number(nu, rational),
        n_size=n_size,
        mode=mode,
    )

    start = time.perf_counter()
    value, tag = moments.evaluate(query, method, representation)
    record = build_record(
        "moment",
        {"k": k, "s": query.s, "beta": query.beta, "alpha": query.alpha, "nu": query.nu,
         "N": n_size, "mode": mode, "method": method},
        {"value": value},
        tag,
        _elapsed_ms(start),
    )
    emit(console, [record], output_format, "Inverse moment")


@cli.command()
@click.option("--nu", required=True, help="Bessel order nu > -1 (decimal or p/q)")
@click.option("--order", type=int, required=True, help="Even order 2k >= 2")
@click.option("--method", type=click.Choice([m.value for m in ZetaMethod]), default="recursion", show_default=True)
@click.option("--mode", type=click.Choice([m.value for m in EvalMode]), default="float", show_default=True)
@format_option
@handle_errors
def zeta(nu, order, method, mode, output_format):
    """Bessel zeta value zeta_nu(2k) = sum_n j_{nu,n}^-2k"""
    rational = mode == EvalMode.RATIONAL.value
    if rational and method != ZetaMethod.RECURSION.value:
        raise ModeError("only the recursion is exact; use --mode float with zero_sum")
    nu_value = parse_number(nu, rational)

    start = time.perf_counter()
    results = {}
    if method in (ZetaMethod.RECURSION.value, ZetaMethod.BOTH.value):
        results["recursion"] = bessel_zeta(nu_value, order, "recursion")
    if method in (ZetaMethod.ZERO_SUM.value, ZetaMethod.BOTH.value):
        results["zero_sum"] = bessel_zeta(float(nu_value), order, "zero_sum")
    if len(results) == 2:
        results["relative_gap"] = abs(results["zero_sum"] - results["recursion"]) / abs(results["recursion"])

    record = build_record("zeta", {"nu": nu_value, "order": order, "mode": mode}, results, method, _elapsed_ms(start))
    emit(console, [record], output_format, "Bessel zeta")


@cli.command()
@click.option("--N", "n_size", type=int, required=True, help="Matrix size")
@click.option("--beta", type=float, required=True, help="Dyson index beta > 0")
@click.option("--alpha", type=float, required=True, help="Laguerre exponent")
@click.option("--k", type=int, default=1, show_default=True, help="Inverse moment order")
@click.option("--samples", type=int, default=20_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--workers", type=int, default=None, help="Worker processes (default HARDEDGE_THREADS)")
@click.option("--progress/--no-progress", default=False, help="Show a progress bar on stderr")
@click.option("--dump-spectrum", type=int, default=0, help="Also print the first N sampled spectra")
@format_option
@handle_errors
def simulate(n_size, beta, alpha, k, samples, seed, workers, progress, dump_spectrum, output_format):
    """Monte Carlo estimate of E sum lambda^-k from the bidiagonal model"""
    config = EnsembleConfig(n_size=n_size, beta=beta, alpha=alpha, samples=samples, seed=seed)

    start = time.perf_counter()
    estimate = ensemble.mc_inverse_moment(config, k, workers=workers, progress=progress)
    exact = moments.moment_finite_N(k, beta, alpha, n_size)
    z_score = (estimate.mean - exact) / estimate.stderr if estimate.stderr > 0 else 0.0
    query = {"N": n_size, "beta": beta, "alpha": alpha, "k": k, "samples": samples}
    records = [build_record(
        "simulate", query,
        {"mean": estimate.mean, "exact": exact, "z_score": z_score, "clamped": estimate.clamped},
        "bidiagonal-monte-carlo", _elapsed_ms(start), stderr=estimate.stderr, seed=seed,
    )]

    for index in range(min(dump_spectrum, samples)):
        spectrum = ensemble.sample_spectrum(config, ensemble.sample_rng(seed, index))
        records.append(build_record(
            "simulate-spectrum", {**query, "index": index},
            {f"lambda_{j + 1}": value for j, value in enumerate(spectrum)},
            "bidiagonal-sample", 0.0, seed=seed,
        ))
    emit(console, records, output_format, "Monte Carlo")


@cli.command()
@click.option("--suite", type=click.Choice([*SUITES, "all"]), default="all", show_default=True)
@click.option("--mode", type=click.Choice([m.value for m in EvalMode]), default="rational", show_default=True)
@click.option("--samples", type=int, default=20_000, show_default=True, help="Monte Carlo samples per check")
@click.option("--workers", type=int, default=None, help="Worker processes (default HARDEDGE_THREADS)")
@click.option("--progress/--no-progress", default=False)
@format_option
@handle_errors
def verify(suite, mode, samples, workers, progress, output_format):
    """Run verification suites; exit status 1 if any check fails"""
    engine = VerificationEngine(mode=mode, samples=samples, workers=workers, progress=progress)
    summary = engine.run(suite)

    records = []
    for result in summary.results:
        results = {"status": result.status.value, "details": result.details}
        if result.achieved is not None:
            results["achieved"] = result.achieved
            results["required"] = result.required
        records.append(build_record(
            "verify", {"suite": result.suite, "check": result.name, "mode": mode}, results,
            "verify", float(result.execution_time_ms),
        ))
    emit(console, records, output_format, f"Verification: {suite}", suite=suite)

    if output_format == OutputFormat.TEXT.value:
        color = "green" if summary.passed else "red"
        console.print(Panel.fit(
            f"[bold {color}]{summary.passed_checks}/{summary.total_checks} checks passed[/bold {color}]\n"
            f"failed: {summary.failed_checks}  errors: {summary.error_checks}  "
            f"time: {summary.execution_time_ms} ms",
            border_style=color,
        ))
    if not summary.passed:
        sys.exit(1)


@cli.command()
@density_options
@click.option("--x", "points", type=float, multiple=True, required=True, help="Evaluation point (repeatable)")
@format_option
@handle_errors
def density(kind, n_size, alpha, beta_class, c, points, output_format):
    """Point evaluation of a finite-N, hard-edge or Marchenko-Pastur density"""
    spec = _density_spec(kind, n_size, alpha, beta_class, c)
    records = []
    for x in points:
        start = time.perf_counter()
        value = densities.evaluate_density(spec, x)
        records.append(build_record(
            "density", {"kind": kind, "N": n_size, "alpha": alpha, "beta_class": beta_class, "c": c, "x": x},
            {"density": value}, kind, _elapsed_ms(start),
        ))
    emit(console, records, output_format, "Density")


@cli.command()
@density_options
@click.option("--s", "s_real", type=float, required=True, help="Real part of s")
@click.option("--s-imag", type=float, default=0.0, show_default=True, help="Imaginary part of s")
@click.option("--tolerance", type=float, default=None, help="Absolute error target (default HARDEDGE_QUADRATURE_TOLERANCE)")
@format_option
@handle_errors
def mellin(kind, n_size, alpha, beta_class, c, s_real, s_imag, tolerance, output_format):
    """Quadrature of the integral of x^-s against a density"""
    spec = _density_spec(kind, n_size, alpha, beta_class, c)
    s = complex(s_real, s_imag)

    start = time.perf_counter()
    result = densities.mellin_quadrature(spec, s, tolerance)
    value = result.value if s_imag else result.value.real
    results = {"value": value}
    if spec.kind == DensityKind.HARD_EDGE:
        scaled = 4 ** s * result.value
        results["limit_moment"] = scaled if s_imag else scaled.real
    record = build_record(
        "mellin", {"kind": kind, "N": n_size, "alpha": alpha, "beta_class": beta_class, "c": c, "s": s},
        results, "quadrature", _elapsed_ms(start), error_bound=result.abserr,
    )
    emit(console, [record], output_format, "Mellin quadrature")


if __name__ == "__main__":
    cli()
