"""
hardedge - Special functions

Gamma and Pochhammer symbols, generalized hypergeometric series, Bessel
functions, their integrals and zeros, and the Bessel zeta function.
Scalars are exact rationals (Fraction), floats or complex numbers; exact
inputs stay exact wherever the result is rational.
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Tuple, Union

import mpmath
import numpy as np
import structlog
from mpmath.libmp import NoConvergence
from scipy import special

from ..config.settings import settings
from ..models.spectral import is_exact
from .errors import (
    DivergenceError, ModeError, NonconvergenceError, PoleError, PreconditionError
)

logger = structlog.get_logger()

Scalar = Union[int, Fraction, float, complex]

# Unit-argument series need Re(sum b - sum a) above this to be summed
CONVERGENCE_MARGIN = 0.05

# Below this argument the Bessel integral uses its 1F2 series
SERIES_SWITCH = 12.0

_ZERO_SCAN_STEP = 0.1

# Unit-argument partial sums at _TAIL_START * 2^j, j < _TAIL_LEVELS, feed the tail extrapolation
_TAIL_START = 1024
_TAIL_LEVELS = 7
_TAIL_TRUST = 1e-9


def as_fraction(x: Scalar) -> Fraction:
    """Exact value of an int/Fraction input; anything else is a mode error"""
    if isinstance(x, Fraction):
        return x
    if is_exact(x):
        return Fraction(x)
    raise ModeError(f"{x!r} is not an exact rational")


def coerce(x: Scalar, rational: bool) -> Scalar:
    if rational:
        return as_fraction(x)
    if isinstance(x, complex):
        return x
    return float(x)


def is_nonpositive_integer(z: Scalar) -> bool:
    if is_exact(z):
        z = Fraction(z)
        return z.denominator == 1 and z <= 0
    z = complex(z)
    return z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real)


def nonpositive_order(z: Scalar) -> Optional[int]:
    """m when z equals -m for an integer m >= 0 (complex z with zero imaginary part included), else None"""
    if not is_nonpositive_integer(z):
        return None
    if is_exact(z):
        return -int(z)
    return -int(complex(z).real)


def _real_or_complex(value: complex, *inputs) -> Scalar:
    if any(isinstance(v, complex) for v in inputs):
        return complex(value)
    return float(complex(value).real)


def log_gamma(z: Scalar) -> complex:
    """Principal branch of log Gamma(z)"""
    if is_nonpositive_integer(z):
        raise PoleError(f"log_gamma has a pole at z={z}")
    return complex(special.loggamma(complex(z)))


def gamma_ratio(numerator: Sequence[Scalar], denominator: Sequence[Scalar]) -> Scalar:
    """prod Gamma(numerator) / prod Gamma(denominator); denominator poles give zero"""
    log_value = sum((log_gamma(z) for z in numerator), 0j)
    value = complex(np.exp(log_value))
    for z in denominator:
        value *= complex(special.rgamma(complex(z)))
    return _real_or_complex(value, *numerator, *denominator)


def pochhammer(x: Scalar, n: int) -> Scalar:
    """Rising factorial (x)_n; for n < 0 the reciprocal falling product 1/((x-1)...(x-|n|))"""
    if is_exact(x):
        x = Fraction(x)
    one = Fraction(1) if isinstance(x, Fraction) else 1.0

    if n >= 0:
        result = one
        for j in range(n):
            result *= x + j
        return result

    denominator = one
    for j in range(1, -n + 1):
        factor = x - j
        if factor == 0:
            raise PoleError(f"pochhammer({x}, {n}): factor x-{j} vanishes")
        denominator *= factor
    return one / denominator


@dataclass(frozen=True)
class HypSeriesSpec:
    """pFq(numerator; denominator; z)"""

    numerator: Tuple[Scalar, ...]
    denominator: Tuple[Scalar, ...]
    z: Union[Scalar, np.ndarray]

    @property
    def p(self) -> int:
        return len(self.numerator)

    @property
    def q(self) -> int:
        return len(self.denominator)

    @property
    def terminating_order(self) -> Optional[int]:
        """Index of the last non-zero term, or None for an infinite series"""
        orders = [m for m in map(nonpositive_order, self.numerator) if m is not None]
        return min(orders) if orders else None

    @property
    def exact(self) -> bool:
        if isinstance(self.z, np.ndarray):
            return False
        return all(is_exact(v) for v in (*self.numerator, *self.denominator, self.z))

    @property
    def margin(self) -> float:
        return complex(sum(map(complex, self.denominator)) - sum(map(complex, self.numerator))).real

    def validate(self) -> None:
        last = self.terminating_order
        for b in self.denominator:
            m = nonpositive_order(b)
            if m is None:
                continue
            if m == 0:
                # (0)_n / (0)_n has no value; callers must take the limit themselves
                raise PoleError(f"denominator parameter {b} is zero")
            if last is None or last > m:
                raise PoleError(f"denominator parameter {b} meets a zero before the series terminates")


def _to_mp(x: Scalar):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, complex):
        return mpmath.mpc(x.real, x.imag)
    return mpmath.mpf(x)


def _sum_terminating(a, b, z, last: int):
    term = Fraction(1) if isinstance(z, Fraction) else 1.0
    total = term
    for n in range(last):
        numerator = math.prod((ai + n for ai in a), start=1)
        denominator = math.prod((bj + n for bj in b), start=1) * (n + 1)
        term = term * numerator / denominator * z
        total += term
    return total


def _sum_ratio(a, b, z):
    scalar = np.ndim(z) == 0
    complex_valued = np.iscomplexobj(z) or any(isinstance(v, complex) for v in (*a, *b))
    dtype = complex if complex_valued else float
    z = np.asarray(z, dtype=dtype)
    term = np.ones(z.shape, dtype=dtype)
    total = term.copy()
    eps = settings.hyp_epsilon
    tiny = np.finfo(float).tiny
    quiet = 0

    for n in range(settings.hyp_max_terms):
        numerator = math.prod((ai + n for ai in a), start=1)
        if numerator == 0:
            break
        term = term * (numerator / (math.prod((bj + n for bj in b), start=1) * (n + 1))) * z
        total = total + term
        if np.all(np.abs(term) <= eps * np.abs(total) + tiny):
            quiet += 1
            if quiet >= 3:
                logger.debug("series summed by term ratio", terms=n + 1)
                break
        else:
            quiet = 0
    else:
        raise NonconvergenceError(
            f"series did not converge within {settings.hyp_max_terms} terms"
        )

    if scalar:
        return total.item()
    return total


def _unit_terms(a, b, count: int) -> np.ndarray:
    """First `count` terms of sum_n prod (a)_n / prod (b)_n / n!"""
    n = np.arange(count - 1, dtype=float)
    ratio = np.ones(count - 1, dtype=complex)
    for ai in a:
        ratio *= ai + n
    for bj in b:
        ratio /= bj + n
    ratio /= n + 1
    terms = np.empty(count, dtype=complex)
    terms[0] = 1.0
    terms[1:] = np.cumprod(ratio)
    return terms


def _richardson_unit_sum(spec: HypSeriesSpec) -> Tuple[complex, float]:
    """
    Unit-argument sum from partial sums S_N at doubling N.

    S - S_N expands in N^-(m+j), j = 0, 1, ..., with m = sum b - sum a, so
    each Richardson level removes one of those powers.
    """
    a = [complex(v) for v in spec.numerator]
    b = [complex(v) for v in spec.denominator]
    margin = sum(b) - sum(a)
    checkpoints = [_TAIL_START * 2 ** j for j in range(_TAIL_LEVELS)]
    terms = _unit_terms(a, b, checkpoints[-1])

    partial = []
    real = imag = 0.0
    start = 0
    for stop in checkpoints:
        segment = terms[start:stop]
        real += math.fsum(segment.real.tolist())
        imag += math.fsum(segment.imag.tolist())
        partial.append(complex(real, imag))
        start = stop

    table = [partial]
    for level in range(1, _TAIL_LEVELS):
        factor = 2 ** (margin + level - 1)
        previous = table[-1]
        table.append([(factor * previous[i + 1] - previous[i]) / (factor - 1) for i in range(len(previous) - 1)])
    value = table[-1][0]
    error = max(abs(value - table[-2][-1]), abs(value - table[-2][0]))
    return value, error


def _sum_mpmath(spec: HypSeriesSpec) -> complex:
    try:
        with mpmath.workdps(20):
            value = mpmath.hyper(
                [_to_mp(a) for a in spec.numerator],
                [_to_mp(b) for b in spec.denominator],
                _to_mp(spec.z),
            )
    except NoConvergence as exc:
        raise NonconvergenceError(f"unit-argument series did not converge: {exc}") from exc
    return complex(value)


def _sum_accelerated(spec: HypSeriesSpec) -> Scalar:
    if complex(spec.z) != 1:
        value = _sum_mpmath(spec)
        return _real_or_complex(value, *spec.numerator, *spec.denominator, spec.z)
    value, error = _richardson_unit_sum(spec)
    if error > _TAIL_TRUST * max(1.0, abs(value)):
        logger.debug("unit-argument tail extrapolation unsettled, using mpmath", error=error)
        value = _sum_mpmath(spec)
    else:
        logger.debug("unit-argument series via tail extrapolation", p=spec.p, q=spec.q, error=error)
    return _real_or_complex(value, *spec.numerator, *spec.denominator, spec.z)


def hyp_pfq(spec: HypSeriesSpec, rational: Optional[bool] = None) -> Scalar:
    """
    Generalized hypergeometric series pFq.

    rational=None returns an exact Fraction when every input is rational and
    the series terminates; rational=True insists on that and raises ModeError
    otherwise.
    """
    spec.validate()
    last = spec.terminating_order
    if rational is None:
        rational = spec.exact and last is not None

    if rational:
        if not spec.exact:
            raise ModeError("rational evaluation needs rational parameters and argument")
        if last is None:
            raise ModeError("a non-terminating series has no exact rational value")
        return _sum_terminating(
            [Fraction(a) for a in spec.numerator],
            [Fraction(b) for b in spec.denominator],
            Fraction(spec.z),
            last,
        )

    numerator = [coerce(a, False) for a in spec.numerator]
    denominator = [coerce(b, False) for b in spec.denominator]

    if last is not None and np.ndim(spec.z) == 0:
        value = _sum_terminating(numerator, denominator, coerce(spec.z, False), last)
        return _real_or_complex(value, *numerator, *denominator, spec.z)

    z_abs = np.abs(np.asarray(spec.z, dtype=complex))
    if spec.p > spec.q + 1 and np.any(z_abs > 0):
        raise DivergenceError(f"{spec.p}F{spec.q} diverges for z != 0")
    if spec.p == spec.q + 1 and last is None:
        if np.any(z_abs > 1):
            raise DivergenceError("|z| > 1 needs analytic continuation")
        if np.any(z_abs == 1):
            if np.ndim(spec.z) != 0:
                raise DivergenceError("unit-argument series are evaluated one argument at a time")
            if spec.margin <= CONVERGENCE_MARGIN:
                raise DivergenceError(
                    f"unit-argument series needs Re(sum b - sum a) > {CONVERGENCE_MARGIN}, "
                    f"got {spec.margin:.6g}; analytic continuation required"
                )
            return _sum_accelerated(spec)

    z = spec.z if isinstance(spec.z, np.ndarray) else coerce(spec.z, False)
    return _sum_ratio(numerator, denominator, z)


def bessel_j(nu: float, x):
    """J_nu(x) for nu > -2, x >= 0; accepts NumPy arrays"""
    if nu <= -2:
        raise PreconditionError(f"bessel_j needs nu > -2, got {nu}")
    if np.any(np.asarray(x) < 0):
        raise PreconditionError("bessel_j needs x >= 0")
    value = special.jv(float(nu), x)
    return float(value) if np.ndim(value) == 0 else value


def bessel_j_series(nu: float, x: float) -> float:
    """J_nu(x) from its 0F1 power series"""
    nu = float(nu)
    if is_nonpositive_integer(nu):
        return (-1) ** int(-nu) * bessel_j_series(-nu, x)
    if x == 0:
        if nu == 0:
            return 1.0
        return 0.0 if nu > 0 else math.inf
    series = hyp_pfq(HypSeriesSpec((), (nu + 1,), -x * x / 4))
    return (x / 2) ** nu * float(special.rgamma(nu + 1)) * series


def bessel_j_integral(alpha: float, u):
    """Integral of J_alpha over [0, u], alpha > -1; accepts NumPy arrays"""
    if alpha <= -1:
        raise PreconditionError(f"bessel_j_integral needs alpha > -1, got {alpha}")
    u_arr = np.asarray(u, dtype=float)
    if np.any(u_arr < 0):
        raise PreconditionError("bessel_j_integral needs u >= 0")

    flat = np.atleast_1d(u_arr).ravel()
    out = np.empty_like(flat)
    small = flat <= SERIES_SWITCH
    if small.any():
        out[small] = _integral_series(alpha, flat[small])
    if (~small).any():
        out[~small] = _integral_neumann(alpha, flat[~small])

    if np.ndim(u_arr) == 0:
        return float(out[0])
    return out.reshape(u_arr.shape)


def _integral_series(alpha: float, u: np.ndarray) -> np.ndarray:
    spec = HypSeriesSpec(((alpha + 1) / 2,), (alpha + 1, (alpha + 3) / 2), -u * u / 4)
    series = np.asarray(hyp_pfq(spec), dtype=float)
    return u ** (alpha + 1) / 2 ** alpha * special.rgamma(alpha + 2) * series


def _integral_neumann(alpha: float, u: np.ndarray) -> np.ndarray:
    # 2 * sum_m J_{alpha+2m+1}(u); terms die off once the order passes u
    u_max = float(u.max())
    count = int(math.ceil((u_max + 10 * u_max ** (1 / 3) + 40 - alpha) / 2)) + 1
    orders = alpha + 2 * np.arange(count) + 1
    return 2 * special.jv(orders[:, None], u[None, :]).sum(axis=0)


def bessel_j_tail_integral(nu: float, x):
    """Integral of J_nu over [x, inf) for nu > -2"""
    if nu <= -2:
        raise PreconditionError(f"bessel_j_tail_integral needs nu > -2, got {nu}")
    if nu > -1:
        return 1 - bessel_j_integral(nu, x)
    return -2 * bessel_j(nu + 1, x) + bessel_j_tail_integral(nu + 2, x)


def _mcmahon(nu: float, n: int) -> float:
    b = (n + nu / 2 - 0.25) * math.pi
    mu = 4 * nu * nu
    return b - (mu - 1) / (8 * b) - 4 * (mu - 1) * (7 * mu - 31) / (3 * (8 * b) ** 3)


@lru_cache(maxsize=32)
def _zeros_cached(nu: float, count: int) -> Tuple[float, ...]:
    upper = max(_mcmahon(nu, count), nu + count * math.pi) + 2 * math.pi
    while True:
        grid = np.arange(1e-6, upper, _ZERO_SCAN_STEP)
        values = special.jv(nu, grid)
        brackets = np.nonzero(values[:-1] * values[1:] < 0)[0]
        if len(brackets) >= count:
            break
        upper *= 1.5

    brackets = brackets[:count]
    lo = grid[brackets]
    hi = grid[brackets + 1]
    f_lo = values[brackets]
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        f_mid = special.jv(nu, mid)
        same = np.sign(f_mid) == np.sign(f_lo)
        lo = np.where(same, mid, lo)
        f_lo = np.where(same, f_mid, f_lo)
        hi = np.where(same, hi, mid)

    # Newton polish, kept inside the bracket
    roots = 0.5 * (lo + hi)
    step = special.jv(nu, roots) / special.jvp(nu, roots)
    polished = roots - step
    roots = np.where(np.abs(step) < (hi - lo) + 1e-15 * roots, polished, roots)

    logger.debug("bessel zeros bracketed", nu=nu, count=count, scan_upper=upper)
    return tuple(float(r) for r in roots)


def bessel_zeros(nu: float, count: int) -> np.ndarray:
    """First `count` positive zeros of J_nu, ascending"""
    if nu <= -1:
        raise PreconditionError(f"bessel zeros need nu > -1, got {nu}")
    if count < 1:
        raise PreconditionError("count must be positive")
    return np.array(_zeros_cached(float(nu), int(count)))


def bessel_zero(nu: float, n: int) -> float:
    """The n-th positive zero j_{nu,n}"""
    return float(bessel_zeros(nu, n)[n - 1])


def mellin_bessel_pair(a: float, gamma: float, s: Scalar) -> complex:
    """Integral of u^(s-1) J_a(u) J_gamma(u) over (0, inf), in closed form"""
    s = complex(s)
    if not ((a + gamma + s).real > 0 and s.real < 1):
        raise PreconditionError(
            f"Bessel pair transform needs Re(a+gamma+s) > 0 and Re(s) < 1, got a={a}, gamma={gamma}, s={s}"
        )
    value = gamma_ratio(
        [1 - s, (a + gamma + s) / 2],
        [(gamma - a - s + 2) / 2, (a + gamma - s + 2) / 2, (a - gamma - s + 2) / 2],
    )
    return complex(value) / 2 ** (1 - s)


def _rayleigh(nu: Scalar, order: int) -> Scalar:
    one = Fraction(1) if isinstance(nu, Fraction) else 1.0
    sigma = [None, one / (4 * (nu + 1))]
    for n in range(2, order + 1):
        sigma.append(sum((sigma[m] * sigma[n - m] for m in range(1, n)), 0 * one) / (n + nu))
    return sigma[order]


def bessel_zeta(nu: Scalar, two_k: int, method: str = "recursion") -> Scalar:
    """
    Bessel zeta value zeta_nu(2k) = sum_n j_{nu,n}^(-2k).

    `recursion` runs the Rayleigh convolution recursion (exact for rational
    nu); `zero_sum` sums computed zeros and adds a McMahon/Hurwitz tail.
    """
    if two_k < 2 or two_k % 2:
        raise PreconditionError(f"order must be an even integer >= 2, got {two_k}")
    if not nu > -1:
        raise PreconditionError(f"bessel zeta needs nu > -1, got {nu}")
    k = two_k // 2

    if method == "recursion":
        return _rayleigh(Fraction(nu) if is_exact(nu) else float(nu), k)
    if method != "zero_sum":
        raise ValueError(f"Unsupported zeta method: {method}")

    nu = float(nu)
    cutoff = settings.zeta_zero_cutoff
    zeros = bessel_zeros(nu, cutoff)
    head = float(np.sum(zeros ** (-two_k)))

    mu = 4 * nu * nu
    q = cutoff + 1 + nu / 2 - 0.25
    tail = math.pi ** (-two_k) * (
        special.zeta(two_k, q) + two_k * (mu - 1) / (8 * math.pi ** 2) * special.zeta(two_k + 2, q)
    )
    return head + float(tail)
