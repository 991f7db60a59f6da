"""
hardedge - Exact inverse moments of the beta-Laguerre ensemble

Partition sums at finite N and in the hard-edge limit, the beta = 1, 2, 4
Mellin closed forms, integer-order sums, recurrence solutions, the
beta <-> 4/beta duality and the low-temperature limit.

Every integer-order routine runs in float or exact-rational mode; in
rational mode all inputs must be rational and the result is a Fraction.
"""
from fractions import Fraction
from math import comb, factorial, pi, sqrt
from typing import Dict, Optional, Tuple, Union

import structlog

from ..models.spectral import Beta4Representation, EvalMode, MomentMethod, MomentQuery, is_exact
from .errors import ModeError, PoleError, PreconditionError, StripError
from .partitions import Partition, partitions_of
from .specfun import (
    HypSeriesSpec, Scalar, coerce, gamma_ratio, hyp_pfq, mellin_bessel_pair, pochhammer
)

logger = structlog.get_logger()

Mode = Union[EvalMode, str]


def _is_rational(mode: Mode) -> bool:
    return EvalMode(mode) == EvalMode.RATIONAL


def _divide(numerator, denominator, what: str):
    if denominator == 0:
        raise PoleError(f"{what} vanishes")
    return numerator / denominator


def _require_order(k: int, alpha) -> None:
    if k < 1:
        raise PreconditionError(f"order k must be a positive integer, got {k}")
    if not alpha > k - 1:
        raise PreconditionError(f"k < alpha+1 violated: k={k}, alpha={alpha}")


def _require_beta(beta) -> None:
    if not beta > 0:
        raise PreconditionError(f"beta must be positive, got {beta}")


def _beta_class(beta_class: int) -> int:
    if beta_class not in (1, 4):
        raise PreconditionError(f"beta_class must be 1 or 4, got {beta_class}")
    return beta_class


def _integer_order(s, rational: bool) -> Optional[int]:
    """s as an int when it is an integer value, else None"""
    if is_exact(s) and Fraction(s).denominator == 1:
        return int(s)
    if rational:
        raise ModeError(f"rational mode needs an integer order, got s={s}")
    return None


# Partition sums

def alpha_minus(eta: Partition, alpha: Scalar, kappa: Scalar) -> Scalar:
    """prod_i (alpha + 1 + kappa(i-1))_{-eta_i}"""
    one = Fraction(1) if isinstance(alpha, Fraction) and isinstance(kappa, Fraction) else 1.0
    result = one
    for i, part in enumerate(eta, start=1):
        base = alpha + 1 + kappa * (i - 1)
        for j in range(1, part + 1):
            if base - j == 0:
                raise PoleError(
                    f"alpha_minus{tuple(eta)}: factor alpha+kappa*{i - 1}-{j} vanishes at alpha={alpha}"
                )
        result *= pochhammer(base, -part)
    return result


def _coefficient(eta: Partition, kappa: Scalar, n_size: Optional[int]) -> Scalar:
    k = eta.weight
    ell = eta.length

    value = _divide(k * factorial(eta[0] - 1), pochhammer(kappa * (ell - 1) + 1, eta[0]), "(kappa(l-1)+1)_eta1")
    for i in range(2, ell + 1):
        value *= _divide(
            pochhammer(kappa * (1 - i), eta[i - 1]),
            pochhammer(kappa * (ell - i) + 1, eta[i - 1]),
            f"(kappa(l-{i})+1)_eta{i}",
        )
    for i in range(1, ell + 1):
        numerator = 1 if n_size is None else pochhammer(kappa * (n_size - i + 1), eta[i - 1])
        value *= _divide(numerator, pochhammer(kappa * (ell - i + 1), eta[i - 1]), f"(kappa(l-{i}+1))_eta{i}")
    for i in range(1, ell + 1):
        for j in range(i + 1, ell + 1):
            gap = eta[i - 1] - eta[j - 1]
            value *= _divide(kappa * (j - i) + gap, kappa * (j - i), "kappa(j-i)")
            value *= _divide(
                pochhammer(kappa * (j - i + 1), gap),
                pochhammer(kappa * (j - i - 1) + 1, gap),
                f"(kappa({j}-{i}-1)+1)_gap",
            )
    if n_size is None:
        value *= kappa ** k
    return value


def coeff_finite_N(eta: Partition, beta: Scalar, n_size: int, mode: Mode = EvalMode.FLOAT) -> Scalar:
    """Finite-N partition coefficient; zero when the partition is longer than N"""
    eta = Partition(eta)
    _require_beta(beta)
    if n_size < 1:
        raise PreconditionError(f"N must be a positive integer, got {n_size}")
    kappa = coerce(beta, _is_rational(mode)) / 2
    return _coefficient(eta, kappa, n_size)


def coeff_limit(eta: Partition, beta: Scalar, mode: Mode = EvalMode.FLOAT) -> Scalar:
    """Hard-edge limit of N^-k times the finite-N coefficient"""
    eta = Partition(eta)
    _require_beta(beta)
    kappa = coerce(beta, _is_rational(mode)) / 2
    return _coefficient(eta, kappa, None)


def coefficient_table(k: int, beta: Scalar, n_size: Optional[int] = None,
                      mode: Mode = EvalMode.FLOAT) -> Dict[Partition, Scalar]:
    """Partition coefficients for every partition of k, finite-N or limiting"""
    _require_beta(beta)
    kappa = coerce(beta, _is_rational(mode)) / 2
    return {eta: _coefficient(eta, kappa, n_size) for eta in partitions_of(k)}


def _partition_sum(k: int, kappa: Scalar, alpha: Scalar, n_size: Optional[int]) -> Scalar:
    return sum(
        (_coefficient(eta, kappa, n_size) * alpha_minus(eta, alpha, kappa) for eta in partitions_of(k)),
        0 * kappa,
    )


def moment_finite_N(k: int, beta: Scalar, alpha: Scalar, n_size: int, mode: Mode = EvalMode.FLOAT) -> Scalar:
    """E sum_j lambda_j^-k for the N x N beta-Laguerre ensemble"""
    rational = _is_rational(mode)
    beta, alpha = coerce(beta, rational), coerce(alpha, rational)
    _require_beta(beta)
    _require_order(k, alpha)
    if n_size < 1:
        raise PreconditionError(f"N must be a positive integer, got {n_size}")
    return _partition_sum(k, beta / 2, alpha, n_size)


def moment_limit(k: int, beta: Scalar, alpha: Scalar, mode: Mode = EvalMode.FLOAT) -> Scalar:
    """lim N^-k E sum_j lambda_j^-k"""
    rational = _is_rational(mode)
    beta, alpha = coerce(beta, rational), coerce(alpha, rational)
    _require_beta(beta)
    _require_order(k, alpha)
    return _partition_sum(k, beta / 2, alpha, None)


# Hard-edge Mellin transforms

def _check_strip(s: Scalar, alpha: Scalar) -> None:
    if not alpha > Fraction(-1, 2):
        raise StripError(f"Mellin forms need alpha > -1/2, got {alpha}")
    real = complex(s).real
    if not 0.5 < real < float(alpha) + 1:
        raise StripError(f"s={s} outside the strip 1/2 < Re(s) < alpha+1 = {float(alpha) + 1}")


def _half(rational: bool):
    return Fraction(1, 2) if rational else 0.5


def _beta2_integer(k: int, alpha: Scalar) -> Scalar:
    """beta=2 limiting moment at integer order, Gamma ratios reduced to Pochhammer products"""
    rational = isinstance(alpha, Fraction)
    numerator = 4 ** (k - 1) * pochhammer(_half(rational), k - 1)
    return _divide(numerator, factorial(k) * pochhammer(alpha + 1 - k, 2 * k - 1), f"(alpha+1-{k})_{2 * k - 1}")


def _beta2_closed_form(s: Scalar, alpha: Scalar) -> Scalar:
    k = _integer_order(s, isinstance(alpha, Fraction))
    if k is not None and k >= 1:
        return _beta2_integer(k, alpha)
    value = 4 ** (complex(s) - 1) * gamma_ratio([alpha + 1 - s, s - 0.5], [s + 1, s + alpha]) / sqrt(pi)
    return value if isinstance(s, complex) else float(value.real)


def mellin_limit_beta2(s: Scalar, alpha: Scalar, mode: Mode = EvalMode.FLOAT) -> Scalar:
    """4^(s-1) Gamma(alpha+1-s) Gamma(s-1/2) / (sqrt(pi) Gamma(s+1) Gamma(s+alpha))"""
    rational = _is_rational(mode)
    if rational:
        _integer_order(s, True)
    alpha = coerce(alpha, rational)
    _check_strip(s, alpha)
    if not rational and not isinstance(s, complex):
        s = float(s)
    return _beta2_closed_form(s, alpha)


def mellin_limit_beta2_bessel(s: Scalar, alpha: float) -> complex:
    """beta=2 transform assembled from two Bessel-pair Mellin integrals"""
    _check_strip(s, alpha)
    s = complex(s)
    alpha = float(alpha)
    shifted = 2 * (1 - s)
    return 4 ** s * 0.5 * (
        mellin_bessel_pair(alpha, alpha, shifted) - mellin_bessel_pair(alpha - 1, alpha + 1, shifted)
    )


def _pow2(exponent: Scalar, rational: bool) -> Scalar:
    if rational:
        return Fraction(2) ** int(exponent)
    return 2 ** exponent


def mellin_limit_beta4(
    s: Scalar,
    alpha: Scalar,
    representation: Union[Beta4Representation, str] = Beta4Representation.THREE_F_TWO,
    mode: Mode = EvalMode.FLOAT,
) -> Scalar:
    """Hard-edge Mellin transform for beta = 4 in either series representation"""
    rational = _is_rational(mode)
    k = _integer_order(s, rational)
    alpha = coerce(alpha, rational)
    _check_strip(s, alpha)
    representation = Beta4Representation(representation)
    if rational:
        s = Fraction(k)
    elif not isinstance(s, complex):
        s = float(s)
    half = _half(rational)

    if k is not None:
        # Gamma(alpha+1-k)/Gamma(alpha+3) = 1/(alpha+1-k)_{k+2}
        gamma_part = _divide(1, pochhammer(alpha + 1 - k, k + 2), f"(alpha+1-{k})_{k + 2}")
    else:
        gamma_part = gamma_ratio([alpha + 1 - s], [alpha + 3])

    if representation == Beta4Representation.THREE_F_TWO:
        leading = _pow2(s - 1, rational) * _beta2_closed_form(s, alpha)
        if k is not None:
            inverse_gamma = 0 if k == 1 else Fraction(1, factorial(k - 2)) if rational else 1 / factorial(k - 2)
        else:
            inverse_gamma = gamma_ratio([], [s - 1])
        if inverse_gamma == 0:
            return leading
        series = hyp_pfq(
            HypSeriesSpec((alpha * half + 1, alpha + 1 - s, 2 - s), (alpha * half + 2, alpha + 2), 1),
            rational=rational or None,
        )
        return leading - _pow2(s - 1, rational) * gamma_part * inverse_gamma * series

    if k is not None:
        inverse_gamma = Fraction(1, factorial(k - 1)) if rational else 1 / factorial(k - 1)
    else:
        inverse_gamma = gamma_ratio([], [s])
    series = hyp_pfq(
        HypSeriesSpec(
            ((alpha + 5 - s) * half, alpha * half + 1, alpha + 1 - s, 2 - s),
            ((alpha + 3 - s) * half, alpha * half + 2, alpha + 2),
            1,
        ),
        rational=rational or None,
    )
    return _pow2(s - 1, rational) * (alpha + 3 - s) * gamma_part * inverse_gamma * series


def _beta1_series_at_zero(s: Scalar) -> Scalar:
    """
    alpha -> 0 limit of 3F2(alpha, 1-s, -s; alpha+1, 2alpha; 1).

    (alpha)_n / (2alpha)_n tends to 1/2 for every n >= 1, leaving
    1/2 + 1/2 2F1(1-s, -s; 1; 1) = 1/2 + Gamma(2s) / (2 Gamma(s) Gamma(s+1)).
    """
    # the strip at alpha = 0 holds no integer s, so this is never exact
    return 0.5 + 0.5 * gamma_ratio([2 * s], [s, s + 1])


def mellin_limit_beta1(s: Scalar, alpha: Scalar, mode: Mode = EvalMode.FLOAT) -> Scalar:
    """Hard-edge Mellin transform for beta = 1"""
    rational = _is_rational(mode)
    k = _integer_order(s, rational)
    alpha = coerce(alpha, rational)
    _check_strip(s, alpha)
    if rational:
        s = Fraction(k)
    elif not isinstance(s, complex):
        s = float(s)

    leading = _pow2(s, rational) * _beta2_closed_form(s, 2 * alpha)
    if k is not None:
        middle = _pow2(k - 1, rational) * _divide(1, pochhammer(alpha + 1 - k, 2 * k), f"(alpha+1-{k})_{2 * k}")
        prefactor = _divide(1, pochhammer(2 * alpha + 1 - k, k) * factorial(k), f"(2alpha+1-{k})_{k}")
    else:
        middle = 2 ** (s - 1) * gamma_ratio([alpha + 1 - s], [alpha + 1 + s])
        prefactor = gamma_ratio([2 * alpha + 1 - s], [2 * alpha + 1, s + 1])
    if alpha == 0:
        series = _beta1_series_at_zero(s)
    else:
        series = hyp_pfq(
            HypSeriesSpec((alpha, 2 * alpha + 1 - s, -s), (alpha + 1, 2 * alpha), 1),
            rational=rational or None,
        )
    return leading + middle - _pow2(s, rational) * prefactor * series


# Integer-order closed forms

def integer_moment(beta_class: int, k: int, alpha: Scalar, mode: Mode = EvalMode.FLOAT) -> Scalar:
    """Leading Gamma ratio minus a finite binomial sum, for beta = 1 or 4"""
    beta_class = _beta_class(beta_class)
    rational = _is_rational(mode)
    alpha = coerce(alpha, rational)
    _require_order(k, alpha)
    half = _half(rational)
    one = 2 * half

    if beta_class == 4:
        leading = 8 ** (k - 1) * pochhammer(half, k - 1) * _divide(
            one, factorial(k) * pochhammer(alpha - k + 1, 2 * k - 1), f"(alpha-{k}+1)_{2 * k - 1}"
        )
        total = 0 * one
        for j in range(k - 1):
            total += comb(k - 2, j) * (-1) ** j * _divide(
                one, (alpha + 2 + 2 * j) * pochhammer(alpha - k + 1 + j, k + 1), "alpha+2+2j"
            )
    else:
        leading = 8 ** (k - 1) * 2 * pochhammer(half, k - 1) * _divide(
            one, factorial(k) * pochhammer(2 * alpha - k + 1, 2 * k - 1), f"(2alpha-{k}+1)_{2 * k - 1}"
        )
        total = 0 * one
        for j in range(k - 1):
            total += comb(k - 2, j) * (-1) ** (k + j) * _divide(
                one, (1 + j - alpha) * pochhammer(2 * alpha - 1 - j, k + 1), "1+j-alpha"
            )

    if k == 1:
        return leading
    return leading - 2 ** (k - 1) * one / factorial(k - 2) * total


def recurrence_moment(beta_class: int, k: int, alpha: Scalar, mode: Mode = EvalMode.FLOAT) -> Scalar:
    """Closed solution of the first-order moment recurrence"""
    beta_class = _beta_class(beta_class)
    rational = _is_rational(mode)
    alpha = coerce(alpha, rational)
    _require_order(k, alpha)
    half = _half(rational)
    one = 2 * half

    total = 0 * one
    if beta_class == 1:
        for m in range(1, k):
            total += 4 ** (m - 1) * pochhammer(half, m - 1) * pochhammer(alpha + 1 - m, 2 * m) * _divide(
                one, factorial(m + 1) * pochhammer(2 * alpha - m + 2, 2 * m - 1), f"(2alpha-{m}+2)_{2 * m - 1}"
            )
        prefactor = 2 ** (k - 1) * _divide(one, pochhammer(alpha + 1 - k, 2 * k), f"(alpha+1-{k})_{2 * k}")
        return prefactor * (alpha + 1 - 3 * total)

    for m in range(1, k):
        total += 4 ** (m - 1) * pochhammer(half, m - 1) * pochhammer(alpha * half - m, 2 * m) * _divide(
            one, factorial(m + 1) * pochhammer(alpha - m, 2 * m - 1), f"(alpha-{m})_{2 * m - 1}"
        )
    prefactor = _pow2(k - 2, rational) * _divide(one, pochhammer(alpha * half - k, 2 * k), f"(alpha/2-{k})_{2 * k}")
    return prefactor * (alpha * half - 1 - 3 * total)


def _beta1_step(k: int, alpha: Scalar, a_k: Scalar) -> Scalar:
    denominator = alpha * alpha + alpha - k * (k + 1)
    f_k = _divide(2, denominator, f"alpha^2+alpha-{k * (k + 1)}")
    g_k = -6 * _pow2(k + 1, isinstance(alpha, Fraction)) * _divide(
        _beta2_integer(k, 2 * alpha + 1), 4 * (k + 1) * denominator, f"alpha^2+alpha-{k * (k + 1)}"
    )
    return a_k * f_k + g_k


def recurrence_step(beta_class: int, k: int, alpha: Scalar, a_k: Scalar, mode: Mode = EvalMode.FLOAT) -> Scalar:
    """One application a_{k+1} = a_k f_k + g_k; beta=4 goes through the duality map"""
    beta_class = _beta_class(beta_class)
    rational = _is_rational(mode)
    alpha, a_k = coerce(alpha, rational), coerce(a_k, rational)
    if beta_class == 1:
        return _beta1_step(k, alpha, a_k)
    # M4(-k, alpha) = -1/2 M1(-k, -alpha/2)
    dual_alpha = -alpha * _half(rational)
    return -_beta1_step(k, dual_alpha, -2 * a_k) * _half(rational)


def iterate_recurrence(beta_class: int, k: int, alpha: Scalar, mode: Mode = EvalMode.FLOAT) -> Scalar:
    """Run the recurrence from a_1 = 1/alpha up to order k"""
    rational = _is_rational(mode)
    alpha = coerce(alpha, rational)
    _require_order(k, alpha)
    a = _divide(2 * _half(rational), alpha, "alpha")
    for j in range(1, k):
        a = recurrence_step(beta_class, j, alpha, a, mode)
    return a


def duality_map(k: int, beta: Scalar, alpha: Scalar, mode: Mode = EvalMode.FLOAT) -> Tuple[Scalar, Scalar]:
    """(M_beta(-k, alpha), (-2/beta) M_{4/beta}(-k, -2alpha/beta)); the two must agree"""
    rational = _is_rational(mode)
    beta, alpha = coerce(beta, rational), coerce(alpha, rational)
    _require_beta(beta)
    if k < 1:
        raise PreconditionError(f"order k must be a positive integer, got {k}")
    left = _partition_sum(k, beta / 2, alpha, None)
    right = (-2 / beta) * _partition_sum(k, 2 / beta, -2 * alpha / beta, None)
    return left, right


# Low-temperature limit

def lowtemp_coefficient(eta: Partition) -> Fraction:
    """Rational coefficient of the beta -> infinity partition sum"""
    eta = Partition(eta)
    k = eta.weight
    ell = eta.length

    value = Fraction(2 ** k * k * factorial(eta[0] - 1), factorial(eta[-1])) * (-1) ** (k - eta[0])
    for i in range(2, ell + 1):
        value *= Fraction(i - 1) ** eta[i - 1]
        value /= factorial(eta[i - 2] - eta[i - 1])
    for i in range(1, ell):
        value *= Fraction(ell - i) ** (-eta[i - 1])
    for i in range(1, ell + 1):
        value *= Fraction(ell - i + 1) ** (-eta[i - 1])
    for p in range(1, ell + 1):
        for q in range(p + 1, ell + 1):
            value *= Fraction(q - p + 1) ** (eta[p - 1] - eta[q - 1])
    for q in range(3, ell + 1):
        for p in range(1, q - 1):
            value *= Fraction(q - p - 1) ** (eta[q - 1] - eta[p - 1])
    return value


def _check_nu(nu) -> None:
    if not nu > -1:
        raise PreconditionError(f"nu must exceed -1, got {nu}")


def moment_lowtemp(k: int, nu: Scalar, mode: Mode = EvalMode.FLOAT) -> Scalar:
    """lim beta^k M_beta(-k, beta(nu+1)/2) as beta -> infinity; equals 8^k zeta_nu(2k)"""
    nu = coerce(nu, _is_rational(mode))
    _check_nu(nu)
    total = 0 * nu
    for eta in partitions_of(k):
        term = lowtemp_coefficient(eta)
        for i, part in enumerate(eta, start=1):
            term = term * (i + nu) ** (-part)
        total += term
    return total


def moment_lowtemp_finite_N(k: int, nu: Scalar, n_size: int, mode: Mode = EvalMode.FLOAT) -> Scalar:
    """lim (beta/N)^k M_N(-k, beta(nu+1)/2) as beta -> infinity at fixed N"""
    nu = coerce(nu, _is_rational(mode))
    _check_nu(nu)
    if n_size < 1:
        raise PreconditionError(f"N must be a positive integer, got {n_size}")
    total = 0 * nu
    for eta in partitions_of(k):
        term = lowtemp_coefficient(eta)
        for i, part in enumerate(eta, start=1):
            term = term * (Fraction(n_size - i + 1, n_size) ** part) * (i + nu) ** (-part)
        total += term
    return total


# Dispatch

def evaluate(query: MomentQuery, method: Union[MomentMethod, str] = MomentMethod.AUTO,
             representation: Union[Beta4Representation, str] = Beta4Representation.THREE_F_TWO) -> Tuple[Scalar, str]:
    """Evaluate a moment query; returns (value, method tag)"""
    method = MomentMethod(method)
    mode = query.mode

    if query.nu is not None:
        if query.k is None:
            raise PreconditionError("low-temperature moments need an integer order")
        if query.n_size is not None:
            return moment_lowtemp_finite_N(query.k, query.nu, query.n_size, mode), "lowtemp-finite-N"
        return moment_lowtemp(query.k, query.nu, mode), "lowtemp"

    if method == MomentMethod.AUTO:
        method = MomentMethod.PARTITION if query.k is not None else MomentMethod.MELLIN

    if method == MomentMethod.PARTITION:
        if query.k is None:
            raise PreconditionError("partition sums are defined at integer order only")
        if query.n_size is not None:
            return moment_finite_N(query.k, query.beta, query.alpha, query.n_size, mode), "partition-finite-N"
        return moment_limit(query.k, query.beta, query.alpha, mode), "partition"

    if query.n_size is not None:
        raise PreconditionError(f"method {method.value} only applies to the hard-edge limit")
    beta_class = _closed_form_beta(query.beta)
    order = query.k
    if query.s is not None:
        order = query.s.real if query.s.imag == 0 else query.s
    logger.debug(f"evaluating {method.value} moment", beta=query.beta, alpha=query.alpha, order=order)

    if method == MomentMethod.MELLIN:
        if beta_class == 2:
            return mellin_limit_beta2(order, query.alpha, mode), "mellin-beta2"
        if beta_class == 4:
            tag = f"mellin-beta4-{Beta4Representation(representation).value}"
            return mellin_limit_beta4(order, query.alpha, representation, mode), tag
        return mellin_limit_beta1(order, query.alpha, mode), "mellin-beta1"

    if query.k is None or beta_class == 2:
        raise PreconditionError(f"method {method.value} needs integer order and beta in {{1, 4}}")
    if method == MomentMethod.INTEGER_CASE:
        return integer_moment(beta_class, query.k, query.alpha, mode), "integer-case"
    if method == MomentMethod.RECURRENCE:
        return recurrence_moment(beta_class, query.k, query.alpha, mode), "recurrence"
    raise ValueError(f"Unsupported moment method: {method}")


def _closed_form_beta(beta) -> int:
    for candidate in (1, 2, 4):
        if beta == candidate:
            return candidate
    raise PreconditionError(f"closed forms exist for beta in {{1, 2, 4}} only, got {beta}")
