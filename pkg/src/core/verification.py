"""
hardedge - Verification Engine
Cross-checks every formula family against independent routes: displayed
closed forms, quadrature of the densities, duality, the low-temperature
limit and Monte Carlo sampling.
"""
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Tuple

import numpy as np
import structlog

from ..models.spectral import (
    Beta4Representation, CheckResult, CheckStatus, DensitySpec, EnsembleConfig, EvalMode, is_exact
)
from . import densities, ensemble, moments
from .errors import HardEdgeError
from .specfun import bessel_zeros, bessel_zeta

logger = structlog.get_logger()

SUITES = ("formulas", "quadrature", "duality", "lowtemp", "montecarlo")

FLOAT_TOLERANCE = 1e-11

TABLE_BETAS = (Fraction(1, 2), Fraction(1), Fraction(2), Fraction(4), Fraction(10))
TABLE_ALPHAS = (Fraction(9, 2), Fraction(7), Fraction(103, 10))
TABLE_SIZES = (2, 3, 5, 8)

DUALITY_BETAS = (Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3), Fraction(4), Fraction(8))
DUALITY_ALPHA = Fraction(53, 10)

LOWTEMP_NUS = (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(3))
ZETA_NUS = (-0.4, 0.0, 0.5, 1.0, 3.0)

# (N, beta, alpha, k, seed); 2k < alpha+1 keeps the estimator's variance finite
MONTE_CARLO_GRID = (
    (5, 2.0, 4.0, 1, 11), (3, 1.0, 4.0, 2, 12), (4, 4.0, 6.0, 3, 13), (4, 3.7, 6.0, 2, 14),
    (6, 0.8, 4.0, 1, 15), (8, 2.0, 4.0, 2, 16), (2, 1.0, 6.0, 3, 17), (7, 4.0, 4.0, 2, 18),
    (5, 3.7, 6.0, 3, 19), (3, 0.8, 6.0, 2, 20), (8, 1.0, 4.0, 1, 21), (6, 2.0, 6.0, 3, 22),
)
MONTE_CARLO_SIGMAS = 4.0


def displayed_limit_moment(k: int, beta, alpha):
    """Closed rational forms of the limiting moments for k = 1..4"""
    if k == 1:
        return 1 / alpha
    if k == 2:
        return beta / (alpha * (alpha - 1) * (2 * alpha + beta))
    if k == 3:
        return beta ** 2 / (alpha * (alpha - 1) * (alpha - 2) * (2 * alpha + beta) * (alpha + beta))
    if k == 4:
        return beta ** 3 * (3 * beta + 5 * alpha - 6) / (
            alpha * (alpha - 1) * (alpha - 2) * (alpha - 3)
            * (2 * alpha + beta) * (alpha + beta) * (2 * alpha + 3 * beta) * (2 * alpha - 2 + beta)
        )
    raise ValueError(f"No displayed limiting moment for k={k}")


def displayed_finite_moment(k: int, beta, alpha, n: int):
    """Closed rational forms of the finite-N moments for k = 1..4"""
    if k == 1:
        return n / alpha
    if k == 2:
        return n * (beta * n + 2 * alpha) / (alpha * (alpha - 1) * (beta + 2 * alpha))
    if k == 3:
        return n * (beta * n + alpha) * (beta * n + 2 * alpha) / (
            alpha * (alpha - 1) * (alpha - 2) * (beta + alpha) * (beta + 2 * alpha)
        )
    if k == 4:
        p4 = n * (beta * n + 2 * alpha) * (
            n ** 2 * (5 * alpha * beta ** 2 + 3 * beta ** 3 - 6 * beta ** 2)
            + n * (10 * alpha ** 2 * beta + 6 * alpha * beta ** 2 - 12 * alpha * beta)
            + 4 * alpha ** 3 + 2 * alpha ** 2 * beta - 4 * alpha ** 2 + 2 * alpha * beta
        )
        return p4 / (
            alpha * (alpha - 1) * (alpha - 2) * (alpha - 3)
            * (2 * alpha - 2 + beta) * (beta + alpha) * (beta + 2 * alpha) * (3 * beta + 2 * alpha)
        )
    raise ValueError(f"No displayed finite-N moment for k={k}")


def displayed_bessel_zeta(nu, two_k: int):
    """Rayleigh's closed forms for zeta_nu(2), ..., zeta_nu(8)"""
    if two_k == 2:
        return 1 / (4 * (nu + 1))
    if two_k == 4:
        return 1 / (16 * (nu + 1) ** 2 * (nu + 2))
    if two_k == 6:
        return 1 / (32 * (nu + 1) ** 3 * (nu + 2) * (nu + 3))
    if two_k == 8:
        return (5 * nu + 11) / (256 * (nu + 1) ** 4 * (nu + 2) ** 2 * (nu + 3) * (nu + 4))
    raise ValueError(f"No displayed Bessel zeta value for order {two_k}")


def compare(value, reference, tolerance: float) -> Tuple[float, float]:
    """(achieved, required): exact pairs must match exactly, otherwise relative error"""
    if is_exact(value) and is_exact(reference):
        gap = abs(Fraction(value) - Fraction(reference))
        scale = abs(Fraction(reference)) or Fraction(1)
        return float(gap / scale), 0.0
    gap = abs(complex(value) - complex(reference))
    return gap / max(abs(complex(reference)), 1e-300), tolerance


@dataclass
class SuiteSummary:
    suite: str
    total_checks: int = 0
    passed_checks: int = 0
    failed_checks: int = 0
    error_checks: int = 0
    results: List[CheckResult] = field(default_factory=list)
    execution_time_ms: int = 0

    @property
    def passed(self) -> bool:
        return self.total_checks > 0 and self.passed_checks == self.total_checks

    def add(self, result: CheckResult) -> None:
        self.results.append(result)
        self.total_checks += 1
        if result.status == CheckStatus.PASSED:
            self.passed_checks += 1
        elif result.status == CheckStatus.FAILED:
            self.failed_checks += 1
        else:
            self.error_checks += 1


class VerificationEngine:
    """Runs named verification suites and collects per-check results"""

    def __init__(self, mode: EvalMode = EvalMode.RATIONAL, samples: int = 20_000,
                 workers: Optional[int] = None, progress: bool = False):
        self.mode = EvalMode(mode)
        self.samples = samples
        self.workers = workers
        self.progress = progress

    @property
    def rational(self) -> bool:
        return self.mode == EvalMode.RATIONAL

    def _number(self, value: Fraction):
        return value if self.rational else float(value)

    def run(self, suite: str) -> SuiteSummary:
        """Run one suite, or every suite for `all`"""
        start = time.time()
        if suite == "all":
            summary = SuiteSummary(suite="all")
            for name in SUITES:
                for result in self.run(name).results:
                    summary.add(result)
        elif suite == "formulas":
            summary = self._run_checks(suite, self._formula_checks())
        elif suite == "quadrature":
            summary = self._run_checks(suite, self._quadrature_checks())
        elif suite == "duality":
            summary = self._run_checks(suite, self._duality_checks())
        elif suite == "lowtemp":
            summary = self._run_checks(suite, self._lowtemp_checks())
        elif suite == "montecarlo":
            summary = self._run_checks(suite, self._montecarlo_checks())
        else:
            raise ValueError(f"Unsupported verification suite: {suite}")

        summary.execution_time_ms = int((time.time() - start) * 1000)
        logger.info(
            f"suite {suite}: {summary.passed_checks}/{summary.total_checks} passed",
            failed=summary.failed_checks, errors=summary.error_checks,
        )
        return summary

    def _run_checks(self, suite: str, checks) -> SuiteSummary:
        summary = SuiteSummary(suite=suite)
        for name, check in checks:
            summary.add(self._execute(suite, name, check))
        return summary

    def _execute(self, suite: str, name: str, check: Callable[[], Tuple[float, float, str]]) -> CheckResult:
        start = time.time()
        try:
            achieved, required, details = check()
            status = CheckStatus.PASSED if achieved <= required else CheckStatus.FAILED
        except HardEdgeError as exc:
            logger.error(f"check {name} raised {type(exc).__name__}: {exc}")
            achieved, required, details = None, None, f"{type(exc).__name__}: {exc}"
            status = CheckStatus.ERROR
        return CheckResult(
            suite=suite, name=name, status=status, achieved=achieved, required=required,
            details=details, execution_time_ms=int((time.time() - start) * 1000),
        )

    # formulas

    def _formula_checks(self):
        mode = self.mode
        for beta in TABLE_BETAS:
            for alpha in TABLE_ALPHAS:
                b, a = self._number(beta), self._number(alpha)
                for k in range(1, 5):
                    yield (
                        f"limit k={k} beta={beta} alpha={alpha}",
                        lambda k=k, b=b, a=a: (*compare(
                            moments.moment_limit(k, b, a, mode), displayed_limit_moment(k, b, a), FLOAT_TOLERANCE
                        ), "partition sum vs displayed form"),
                    )
                    for n in TABLE_SIZES:
                        yield (
                            f"finite k={k} beta={beta} alpha={alpha} N={n}",
                            lambda k=k, b=b, a=a, n=n: (*compare(
                                moments.moment_finite_N(k, b, a, n, mode),
                                displayed_finite_moment(k, b, a, n),
                                FLOAT_TOLERANCE,
                            ), "partition sum vs displayed form"),
                        )

        for alpha in (Fraction(7), Fraction(103, 10)):
            a = self._number(alpha)
            for k in range(1, 7):
                yield (
                    f"beta=2 collapse k={k} alpha={alpha}",
                    lambda k=k, a=a: (*compare(
                        moments.moment_limit(k, 2, a, mode), moments.mellin_limit_beta2(k, a, mode), FLOAT_TOLERANCE
                    ), "partition sum vs Gamma-ratio form"),
                )

        for alpha in (2.5, 5.0):
            for s in (0.8, 1.3, 1.7, 2.2, 3.1, 0.8 + 0.5j, 1.3 + 1j, 1.7 - 0.7j, 2.2 + 0.3j, 3.1 + 2j):
                yield (
                    f"beta=4 representations s={s} alpha={alpha}",
                    lambda s=s, alpha=alpha: (*compare(
                        moments.mellin_limit_beta4(s, alpha, Beta4Representation.THREE_F_TWO),
                        moments.mellin_limit_beta4(s, alpha, Beta4Representation.FOUR_F_THREE),
                        1e-10,
                    ), "3F2 form vs 4F3 form"),
                )
            s = 1.1 + 0.6j
            yield (
                f"beta=2 Bessel-pair form s={s} alpha={alpha}",
                lambda s=s, alpha=alpha: (*compare(
                    moments.mellin_limit_beta2_bessel(s, alpha), moments.mellin_limit_beta2(s, alpha), 1e-12
                ), "Bessel-pair integrals vs Gamma-ratio form"),
            )

        for beta_class in (1, 4):
            for alpha in (Fraction(6), Fraction(19, 2)):
                for k in range(1, 6):
                    yield (
                        f"four-way beta={beta_class} k={k} alpha={alpha}",
                        lambda beta_class=beta_class, k=k, alpha=alpha: self._four_way(beta_class, k, alpha),
                    )

    def _four_way(self, beta_class: int, k: int, alpha: Fraction) -> Tuple[float, float, str]:
        mode = self.mode
        a = self._number(alpha)
        reference = moments.moment_limit(k, beta_class, a, mode)
        if beta_class == 1:
            mellin = moments.mellin_limit_beta1(k, a, mode)
        else:
            mellin = moments.mellin_limit_beta4(k, a, Beta4Representation.THREE_F_TWO, mode)
        routes = {
            "mellin": mellin,
            "integer-case": moments.integer_moment(beta_class, k, a, mode),
        }
        if beta_class == 1 or alpha > 2 * k:
            routes["recurrence"] = moments.recurrence_moment(beta_class, k, a, mode)
            routes["iterated"] = moments.iterate_recurrence(beta_class, k, a, mode)

        worst, required = 0.0, 0.0
        for value in routes.values():
            achieved, required = compare(value, reference, 1e-10)
            worst = max(worst, achieved)
        if not reference > 0:
            worst = float("inf")
        return worst, required, f"partition sum vs {', '.join(routes)}"

    # quadrature

    def _quadrature_checks(self):
        closed = {
            2: moments.mellin_limit_beta2,
            4: moments.mellin_limit_beta4,
            1: moments.mellin_limit_beta1,
        }
        for beta_class, tolerance in ((2, 1e-6), (4, 1e-5), (1, 1e-5)):
            for alpha in (1.5, 3.5):
                spec = DensitySpec.hard_edge(beta_class, alpha)
                for s in np.linspace(0.7, alpha + 0.7, 12):
                    s = float(s)
                    yield (
                        f"hard-edge beta={beta_class} alpha={alpha} s={s:.4g}",
                        lambda spec=spec, s=s, tolerance=tolerance, f=closed[beta_class], alpha=alpha: (
                            abs(4 ** s * densities.mellin_quadrature(spec, s, tolerance).value - f(s, alpha)),
                            tolerance,
                            "4^s * quadrature vs closed form (absolute)",
                        ),
                    )

        for n in (1, 4, 10):
            for alpha in (-0.4, 0.0, 1.5, 4.0):
                yield (
                    f"normalization N={n} alpha={alpha}",
                    lambda n=n, alpha=alpha: (
                        *compare(densities.normalization_finite_beta2(n, alpha), n, 1e-8), "integral of rho_N vs N"
                    ),
                )

        yield (
            "density representations N=6 alpha=0.5 x=2.3",
            lambda: (*compare(
                densities.density_finite_beta2(6, 0.5, 2.3, densities.SUM_FORM),
                densities.density_finite_beta2(6, 0.5, 2.3),
                1e-11,
            ), "sum form vs Christoffel-Darboux form"),
        )
        yield (
            "single eigenvalue N=1 alpha=3 s=1",
            lambda: (*compare(
                densities.mellin_quadrature(DensitySpec.finite_beta2(1, 3.0), 1).value, 1 / 3, 1e-10
            ), "Gamma integral"),
        )
        yield (
            "Marchenko-Pastur c=1 moment s=1.5",
            lambda: (*compare(
                densities.mellin_quadrature(DensitySpec.marchenko_pastur(1.0), -0.5).value,
                densities.marchenko_pastur_moment(1.5),
                1e-8,
            ), "quadrature vs Gamma-ratio form"),
        )

        for n in (1, 3, 6):
            for alpha in (1.5, 2.5):
                for s in (0.75, 0.9, 0.5 + 0.4j):
                    yield (
                        f"reflection N={n} alpha={alpha} s={s}",
                        lambda n=n, alpha=alpha, s=s: (
                            *compare(*densities.reflection_check_finite_beta2(n, alpha, s), 1e-8),
                            "x^-s side vs reflected x^(s-1) side",
                        ),
                    )

        for alpha in (0.5, 2.0):
            yield (f"hard-edge convergence alpha={alpha}", lambda alpha=alpha: self._edge_convergence(alpha))

    @staticmethod
    def _edge_convergence(alpha: float) -> Tuple[float, float, str]:
        grid = np.linspace(0.1, 20.0, 400)
        gaps = [densities.hard_edge_gap(n, alpha, grid) for n in (250, 1000, 4000)]
        monotone = gaps[0] > gaps[1] > gaps[2]
        achieved = gaps[-1] if monotone else float("inf")
        return achieved, 5e-3, "sup gaps " + ", ".join(f"{g:.3g}" for g in gaps)

    # duality

    def _duality_checks(self):
        for beta in DUALITY_BETAS:
            for k in range(1, 6):
                yield (
                    f"duality k={k} beta={beta}",
                    lambda beta=beta, k=k: (*compare(
                        *moments.duality_map(k, self._number(beta), self._number(DUALITY_ALPHA), self.mode), 1e-12
                    ), f"alpha={DUALITY_ALPHA}"),
                )

    # low temperature

    def _lowtemp_checks(self):
        big_beta = Fraction(10 ** 8)
        for nu in LOWTEMP_NUS:
            for k in range(1, 5):
                target = 8 ** k * bessel_zeta(nu, 2 * k)
                yield (
                    f"beta->inf limit k={k} nu={nu}",
                    lambda nu=nu, k=k, target=target: (
                        *compare(
                            float(big_beta ** k * moments.moment_limit(
                                k, big_beta, big_beta * (nu + 1) / 2, EvalMode.RATIONAL
                            )),
                            float(target),
                            1e-6,
                        ),
                        "beta^k M(-k, beta(nu+1)/2) at beta=1e8",
                    ),
                )
                yield (
                    f"low-temperature sum k={k} nu={nu}",
                    lambda nu=nu, k=k, target=target: (
                        *compare(moments.moment_lowtemp(k, self._number(nu), self.mode), target, FLOAT_TOLERANCE),
                        "partition sum vs 8^k zeta_nu(2k)",
                    ),
                )
                yield (
                    f"Rayleigh table 2k={2 * k} nu={nu}",
                    lambda nu=nu, k=k: (
                        *compare(bessel_zeta(nu, 2 * k), displayed_bessel_zeta(nu, 2 * k), 0.0),
                        "recursion vs displayed form",
                    ),
                )
                for n in (1, 3, 7):
                    yield (
                        f"frozen spectrum k={k} nu={nu} N={n}",
                        lambda nu=nu, k=k, n=n: (
                            *compare(
                                float(moments.moment_lowtemp_finite_N(k, nu, n, EvalMode.RATIONAL)),
                                ensemble.lowtemp_moment_sum(n, float(nu), k) / n ** k,
                                1e-10,
                            ),
                            "partition sum vs Laguerre zeros",
                        ),
                    )
            for k in (2, 3):
                yield (
                    f"Laguerre zeros N=400 k={k} nu={nu}",
                    lambda nu=nu, k=k: (
                        *compare(
                            float(np.sum((1600 * ensemble.laguerre_zeros(400, float(nu))) ** (-float(k)))),
                            float(bessel_zeta(nu, 2 * k)),
                            0.02,
                        ),
                        "sum (4N l_n)^-k vs zeta_nu(2k)",
                    ),
                )

        for nu in ZETA_NUS:
            for two_k in range(2, 11, 2):
                yield (
                    f"Bessel zeta methods 2k={two_k} nu={nu}",
                    lambda nu=nu, two_k=two_k: (
                        *compare(bessel_zeta(nu, two_k, "zero_sum"), bessel_zeta(nu, two_k), 1e-8),
                        "zero sum vs Rayleigh recursion",
                    ),
                )
        yield (
            "zeta_{1/2}(2) = 1/6",
            lambda: (*compare(bessel_zeta(Fraction(1, 2), 2), Fraction(1, 6), 0.0), "exact"),
        )
        yield (
            "Laguerre zeros above the Bessel bound N=50 nu=1",
            self._zero_bound,
        )

    @staticmethod
    def _zero_bound() -> Tuple[float, float, str]:
        zeros = ensemble.laguerre_zeros(50, 1.0)
        bound = bessel_zeros(1.0, 50) ** 2 / (4 * 50 + 2 + 2)
        violations = int(np.sum(zeros <= bound))
        return float(violations), 0.0, "l_n > j_{nu,n}^2 / (4N + 2nu + 2)"

    # Monte Carlo

    def _montecarlo_checks(self):
        for n, beta, alpha, k, seed in MONTE_CARLO_GRID:
            config = EnsembleConfig(n_size=n, beta=beta, alpha=alpha, samples=self.samples, seed=seed)
            yield (
                f"Monte Carlo N={n} beta={beta} alpha={alpha} k={k}",
                lambda config=config, k=k: self._calibration(config, k),
            )
        yield ("bulk spectrum vs Marchenko-Pastur", self._bulk)

    def _calibration(self, config: EnsembleConfig, k: int) -> Tuple[float, float, str]:
        estimate = ensemble.mc_inverse_moment(config, k, workers=self.workers, progress=self.progress)
        exact = moments.moment_finite_N(k, config.beta, config.alpha, config.n_size)
        z_score = abs(estimate.mean - exact) / estimate.stderr if estimate.stderr > 0 else float("inf")
        return z_score, MONTE_CARLO_SIGMAS, f"mean={estimate.mean:.6g} exact={exact:.6g} stderr={estimate.stderr:.3g}"

    @staticmethod
    def _bulk() -> Tuple[float, float, str]:
        config = EnsembleConfig(n_size=100, beta=2.0, alpha=1.0, samples=1000, seed=5)
        return ensemble.spectrum_statistics(config), 0.05, "total variation, 2 lambda/(beta N) histogram"
