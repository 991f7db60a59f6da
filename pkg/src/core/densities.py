"""
hardedge - Eigenvalue densities and Mellin quadrature

Point evaluation of the finite-N beta=2 Laguerre density, the beta = 1, 2, 4
hard-edge Bessel densities and the Marchenko-Pastur law, plus a quadrature
oracle for their Mellin transforms with an explicit error estimate.
"""
import math
from typing import Callable, Tuple, Union

import mpmath
import numpy as np
import structlog
from scipy import integrate, special

from ..config.settings import settings
from ..models.spectral import DensityKind, DensitySpec, QuadratureResult
from .errors import DomainError, NonintegrableError, PreconditionError, ToleranceError
from .specfun import bessel_j, bessel_j_integral, bessel_j_tail_integral, gamma_ratio

logger = structlog.get_logger()

CHRISTOFFEL_DARBOUX = "christoffel_darboux"
SUM_FORM = "sum"

# Hard-edge quadrature layout in t = sqrt(u)
_HEAD_END = 1.0
_TAIL_START = 200.0
_TAIL_CHUNKS = 40
_GAUSS_ORDER = 24
_CHECK_ORDER = 16
_SMALL_T = 1e-8

_SQRT2 = math.sqrt(2.0)


def _scalar_or_array(value: np.ndarray, like) -> Union[float, np.ndarray]:
    return float(value) if np.ndim(like) == 0 else value


def laguerre_poly(n: int, alpha: float, x):
    """L_n^(alpha)(x) by the three-term recurrence; accepts NumPy arrays"""
    if n < 0:
        raise PreconditionError(f"Laguerre degree must be >= 0, got {n}")
    x_arr = np.asarray(x, dtype=float)
    previous = np.ones_like(x_arr)
    if n == 0:
        return _scalar_or_array(previous, x)
    current = alpha + 1 - x_arr
    for j in range(1, n):
        previous, current = current, ((2 * j + 1 + alpha - x_arr) * current - (j + alpha) * previous) / (j + 1)
    return _scalar_or_array(current, x)


def _finite_beta2_kernel(n_size: int, alpha: float, x: np.ndarray, representation: str) -> np.ndarray:
    """Polynomial factor of the density, i.e. rho_N(x) / (x^alpha e^-x)"""
    if representation == CHRISTOFFEL_DARBOUX:
        norm = math.exp(math.lgamma(n_size + 1) - math.lgamma(n_size + alpha))
        lower = laguerre_poly(n_size - 2, alpha + 1, x) if n_size >= 2 else np.zeros_like(x)
        return norm * (
            laguerre_poly(n_size - 1, alpha + 1, x) * laguerre_poly(n_size - 1, alpha, x)
            - lower * laguerre_poly(n_size, alpha, x)
        )

    if representation != SUM_FORM:
        raise ValueError(f"Unsupported density representation: {representation}")
    total = np.zeros_like(x)
    previous = np.zeros_like(x)
    current = np.ones_like(x)
    for j in range(n_size):
        total += current * current * math.exp(math.lgamma(j + 1) - math.lgamma(j + alpha + 1))
        previous, current = current, ((2 * j + 1 + alpha - x) * current - (j + alpha) * previous) / (j + 1)
    return total


def density_finite_beta2(n_size: int, alpha: float, x, representation: str = CHRISTOFFEL_DARBOUX):
    """Eigenvalue density of the N x N beta=2 Laguerre ensemble, normalized to N"""
    if n_size < 1:
        raise PreconditionError(f"N must be a positive integer, got {n_size}")
    if alpha <= -1:
        raise PreconditionError(f"finite-N density needs alpha > -1, got {alpha}")
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr <= 0):
        raise DomainError("finite-N density is evaluated at x > 0 only")
    weight = np.exp(alpha * np.log(x_arr) - x_arr)
    return _scalar_or_array(weight * _finite_beta2_kernel(n_size, alpha, x_arr, representation), x)


def _rho_beta2(alpha: float, u: np.ndarray) -> np.ndarray:
    root = np.sqrt(u)
    return 0.25 * (bessel_j(alpha, root) ** 2 - bessel_j(alpha + 1, root) * bessel_j(alpha - 1, root))


def hard_edge_density(beta_class: int, alpha: float, u):
    """Limiting hard-edge density for beta = 1, 2 or 4; accepts NumPy arrays"""
    if beta_class not in (1, 2, 4):
        raise PreconditionError(f"hard-edge densities exist for beta in {{1, 2, 4}}, got {beta_class}")
    if alpha <= -0.5:
        raise PreconditionError(f"hard-edge densities need alpha > -1/2, got {alpha}")
    u_arr = np.asarray(u, dtype=float)
    if np.any(u_arr <= 0):
        raise DomainError("hard-edge density is evaluated at u > 0 only")

    if beta_class == 2:
        value = _rho_beta2(alpha, u_arr)
    elif beta_class == 4:
        root = np.sqrt(2 * u_arr)
        value = _rho_beta2(alpha, 2 * u_arr) - bessel_j(alpha - 1, root) * bessel_j_integral(alpha + 1, root) / (4 * root)
    else:
        root = np.sqrt(2 * u_arr)
        value = (
            2 * _rho_beta2(2 * alpha, 2 * u_arr)
            + bessel_j(2 * alpha + 1, root) * bessel_j_tail_integral(2 * alpha - 1, root) / (2 * root)
        )
    return _scalar_or_array(np.asarray(value), u)


def _mp_edges(c: float) -> Tuple[float, float]:
    root = math.sqrt(c)
    return (1 - root) ** 2, (1 + root) ** 2


def marchenko_pastur_density(x, c: float):
    """sqrt((x - c_-)(c_+ - x)) / (2 pi c x) on (c_-, c_+)"""
    if not 0 < c <= 1:
        raise PreconditionError(f"Marchenko-Pastur ratio must lie in (0, 1], got {c}")
    lower, upper = _mp_edges(c)
    x_arr = np.asarray(x, dtype=float)
    if np.any((x_arr <= lower) | (x_arr >= upper)):
        raise DomainError(f"x outside the support ({lower:.6g}, {upper:.6g})")
    value = np.sqrt((x_arr - lower) * (upper - x_arr)) / (2 * math.pi * c * x_arr)
    return _scalar_or_array(value, x)


def marchenko_pastur_moment(s: complex) -> complex:
    """Integral of x^(s-1) against the c=1 Marchenko-Pastur density"""
    if not complex(s).real > 0.5:
        raise NonintegrableError(f"c=1 Marchenko-Pastur moment needs Re(s) > 1/2, got {s}")
    value = 4 ** (complex(s) - 1) * gamma_ratio([s - 0.5], [s + 1]) / math.sqrt(math.pi)
    return value if isinstance(s, complex) else float(complex(value).real)


def evaluate_density(spec: DensitySpec, x):
    """Point evaluation of whichever density `spec` names"""
    if spec.kind == DensityKind.FINITE_BETA2:
        return density_finite_beta2(spec.n_size, spec.alpha, x)
    if spec.kind == DensityKind.HARD_EDGE:
        return hard_edge_density(spec.beta_class, spec.alpha, x)
    if spec.kind == DensityKind.MARCHENKO_PASTUR:
        return marchenko_pastur_density(x, spec.c)
    raise ValueError(f"Unsupported density kind: {spec.kind}")


def _quad_parts(func: Callable[[float], complex], a: float, b: float, **kwargs) -> Tuple[complex, float]:
    """QUADPACK on the real and imaginary parts of a complex integrand"""
    real, real_err = integrate.quad(lambda t: func(t).real, a, b, limit=200, **kwargs)
    imag, imag_err = integrate.quad(lambda t: func(t).imag, a, b, limit=200, **kwargs)
    return complex(real, imag), real_err + imag_err


def _gauss_panels(func: Callable[[np.ndarray], np.ndarray], edges: np.ndarray, order: int) -> np.ndarray:
    """Per-panel Gauss-Legendre integrals over consecutive edges"""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    points = mid[:, None] + half[:, None] * nodes[None, :]
    values = np.asarray(func(points.ravel())).reshape(points.shape)
    return (values * weights[None, :]).sum(axis=1) * half


def _wynn_limit(partial_sums) -> Tuple[complex, float]:
    """Epsilon-algorithm limit of a sequence of partial sums and the spread of its last two estimates"""
    with mpmath.workdps(30):
        table = mpmath.shanks([mpmath.mpmathify(complex(v)) for v in partial_sums])
        estimates = [complex(row[-1]) for row in table if len(row) % 2 == 0]
    if len(estimates) < 2:
        last = complex(partial_sums[-1])
        return last, abs(last - complex(partial_sums[-2]))
    return estimates[-1], abs(estimates[-1] - estimates[-2])


def _smooth_tail(beta_class: int, alpha: float) -> Tuple[float, float]:
    """Coefficients (c1, c3) with rho_HE(u) ~ c1 u^-1/2 + c3 u^-3/2 once oscillations are averaged"""
    if beta_class == 2:
        return 1 / (2 * math.pi), -(4 * alpha ** 2 - 1) / (16 * math.pi)
    if beta_class == 4:
        return 1 / (2 * _SQRT2 * math.pi), (-4 * alpha ** 2 + 8 * alpha - 1) / (32 * _SQRT2 * math.pi)
    return 1 / (_SQRT2 * math.pi), -(16 * alpha ** 2 + 16 * alpha + 1) / (16 * _SQRT2 * math.pi)


def _hard_edge_transform(beta_class: int, alpha: float, s: complex) -> Tuple[complex, float]:
    """Integral of u^-s rho_HE(u) over (0, inf), computed in t = sqrt(u)"""
    sigma, tau = s.real, s.imag
    c1, c3 = _smooth_tail(beta_class, alpha)

    def integrand(t):
        return 2 * np.power(t, 1 - 2 * s) * hard_edge_density(beta_class, alpha, t * t)

    # head: rho_HE(u) ~ u^alpha, carried by the algebraic weight
    def head(t):
        t = max(t, _SMALL_T)
        return 2 * hard_edge_density(beta_class, alpha, t * t) * t ** (-2 * alpha) * complex(
            math.cos(2 * tau * math.log(t)), -math.sin(2 * tau * math.log(t))
        )

    head_value, head_err = _quad_parts(head, 0.0, _HEAD_END, weight="alg", wvar=(2 * alpha + 1 - 2 * sigma, 0.0))

    period = math.pi / (2.0 if beta_class == 2 else 2 * _SQRT2)
    panels = int(math.ceil((_TAIL_START - _HEAD_END) / period))
    edges = _HEAD_END + period * np.arange(panels + 1)
    tail_start = float(edges[-1])
    body = _gauss_panels(integrand, edges, _GAUSS_ORDER).sum()
    body_err = abs(body - _gauss_panels(integrand, edges, _CHECK_ORDER).sum())

    def oscillatory(t):
        return integrand(t) - 2 * np.power(t, 1 - 2 * s) * (c1 / t + c3 / t ** 3)

    smooth = 2 * c1 * tail_start ** (1 - 2 * s) / (2 * s - 1) + 2 * c3 * tail_start ** (-1 - 2 * s) / (2 * s + 1)
    chunk_edges = tail_start + period * np.arange(_TAIL_CHUNKS + 1)
    chunks = _gauss_panels(oscillatory, chunk_edges, _GAUSS_ORDER)
    tail, tail_err = _wynn_limit(np.cumsum(chunks))

    logger.debug(
        "hard-edge Mellin quadrature",
        beta=beta_class, alpha=alpha, s=str(s),
        head_err=head_err, body_err=body_err, tail_err=tail_err,
    )
    return head_value + body + smooth + tail, head_err + body_err + tail_err


def _finite_beta2_transform(n_size: int, alpha: float, exponent: complex) -> Tuple[complex, float]:
    """Integral of x^-exponent rho_N(x) over (0, inf) for the beta=2 density"""
    if not exponent.real < alpha + 1:
        raise NonintegrableError(f"x^-s rho_N needs Re(s) < alpha+1, got s={exponent}")

    if exponent.imag == 0:
        # x^(alpha-s) e^-x weight times a degree 2N-2 polynomial: exact with N+2 nodes
        nodes, weights = special.roots_genlaguerre(n_size + 2, alpha - exponent.real)
        kernel = _finite_beta2_kernel(n_size, alpha, nodes, CHRISTOFFEL_DARBOUX)
        return complex(float(np.dot(weights, kernel))), 0.0

    # L_j^alpha = sum_i (s)_(j-i)/(j-i)! L_i^(alpha-s), then orthogonality under x^(alpha-s) e^-x
    orders = np.arange(n_size)
    connection = np.ones(n_size, dtype=complex)
    if n_size > 1:
        connection[1:] = np.cumprod((exponent + orders[:-1]) / (orders[:-1] + 1))
    weights = np.exp(special.gammaln(orders + 1) - special.gammaln(orders + alpha + 1))
    shifted = np.exp(special.loggamma(orders + alpha + 1 - exponent) - special.gammaln(orders + 1))
    squared = connection * connection
    total = sum(shifted[i] * np.dot(squared[: n_size - i], weights[i:]) for i in range(n_size))
    return complex(total), 0.0


def _marchenko_pastur_transform(c: float, s: complex) -> Tuple[complex, float]:
    lower, upper = _mp_edges(c)
    if c < 1:
        def func(x):
            return x ** (-s) / (2 * math.pi * c * x)

        return _quad_parts(func, lower, upper, weight="alg", wvar=(0.5, 0.5))

    if not s.real < 0.5:
        raise NonintegrableError(f"c=1 Marchenko-Pastur transform needs Re(s) < 1/2, got s={s}")

    def func_edge(x):
        x = max(x, _SMALL_T)
        phase = -s.imag * math.log(x)
        return complex(math.cos(phase), math.sin(phase)) / (2 * math.pi)

    return _quad_parts(func_edge, 0.0, upper, weight="alg", wvar=(-0.5 - s.real, 0.5))


def mellin_quadrature(spec: DensitySpec, s: complex, tolerance: float = None) -> QuadratureResult:
    """
    Integral of x^-s against the density named by `spec`, with an absolute
    error estimate.

    Hard-edge transforms need 1/2 < Re(s) < alpha+1, finite-N ones
    0 < Re(s) < alpha+1. Raises ToleranceError when the estimate exceeds
    `tolerance` (default settings.quadrature_tolerance).
    """
    s = complex(s)
    tolerance = settings.quadrature_tolerance if tolerance is None else tolerance

    if spec.kind == DensityKind.HARD_EDGE:
        if not 0.5 < s.real < spec.alpha + 1:
            raise NonintegrableError(
                f"hard-edge Mellin transform needs 1/2 < Re(s) < alpha+1 = {spec.alpha + 1}, got s={s}"
            )
        value, abserr = _hard_edge_transform(spec.beta_class, spec.alpha, s)
    elif spec.kind == DensityKind.FINITE_BETA2:
        if not 0 < s.real < spec.alpha + 1:
            raise NonintegrableError(f"finite-N Mellin transform needs 0 < Re(s) < alpha+1, got s={s}")
        value, abserr = _finite_beta2_transform(spec.n_size, spec.alpha, s)
    elif spec.kind == DensityKind.MARCHENKO_PASTUR:
        value, abserr = _marchenko_pastur_transform(spec.c, s)
    else:
        raise ValueError(f"Unsupported density kind: {spec.kind}")

    if abserr > tolerance:
        raise ToleranceError(
            f"quadrature error estimate {abserr:.3g} exceeds tolerance {tolerance:.3g}", achieved=abserr
        )
    return QuadratureResult(value=value, abserr=abserr)


def reflection_check_finite_beta2(n_size: int, alpha: float, s: complex) -> Tuple[complex, complex]:
    """
    Both sides of the finite-N reflection identity:
    (int x^-s rho_N, Gamma(alpha+1-s)/Gamma(s+alpha) * int x^(s-1) rho_N).
    """
    s = complex(s)
    if not -alpha < s.real < alpha + 1:
        raise NonintegrableError(f"reflection check needs -alpha < Re(s) < alpha+1, got s={s}")
    left, left_err = _finite_beta2_transform(n_size, alpha, s)
    reflected, right_err = _finite_beta2_transform(n_size, alpha, 1 - s)
    right = complex(gamma_ratio([alpha + 1 - s], [s + alpha])) * reflected
    tolerance = settings.quadrature_tolerance
    if left_err + right_err > tolerance:
        raise ToleranceError(
            f"reflection quadrature error {left_err + right_err:.3g} exceeds {tolerance:.3g}",
            achieved=left_err + right_err,
        )
    return left, right


def normalization_finite_beta2(n_size: int, alpha: float) -> float:
    """Total mass of the finite-N beta=2 density; equals N"""
    value, _ = _finite_beta2_transform(n_size, alpha, 0j)
    return value.real


def hard_edge_gap(n_size: int, alpha: float, u) -> float:
    """sup over u of |rho_N(u/4N)/(4N) - rho_HE(u)| for beta = 2"""
    u_arr = np.asarray(u, dtype=float)
    scale = 4 * n_size
    scaled = density_finite_beta2(n_size, alpha, u_arr / scale) / scale
    return float(np.max(np.abs(scaled - hard_edge_density(2, alpha, u_arr))))
