"""
hardedge - Beta-Laguerre ensemble sampling

Bidiagonal chi-matrix model for every beta > 0, Monte Carlo estimates of
inverse spectral moments, and the deterministic beta -> infinity spectrum
(Laguerre polynomial zeros).
"""
import math
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Tuple

import numpy as np
import structlog
from scipy.linalg import LinAlgError, eigh_tridiagonal
from tqdm import tqdm

from ..config.settings import settings
from ..models.spectral import EnsembleConfig, MomentEstimate
from .errors import EigensolverError, PreconditionError

logger = structlog.get_logger()

CLAMP_WINDOW = 1e-12

_SQRT2 = math.sqrt(2.0)


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Independent counter-based stream for sample `index` under `seed`"""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def sample_chi(c, rng: np.random.Generator):
    """chi_c draw(s) as sqrt(2 G), G ~ Gamma(c/2, 1); accepts an array of c"""
    c_arr = np.asarray(c, dtype=float)
    if np.any(c_arr <= 0):
        raise PreconditionError("chi parameter must be positive")
    draw = np.sqrt(2.0 * rng.standard_gamma(c_arr / 2))
    return float(draw) if np.ndim(c) == 0 else draw


def _tridiagonal(diagonal: np.ndarray, subdiagonal: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Diagonal and off-diagonal of B B^T for lower bidiagonal B"""
    d = diagonal ** 2
    d[1:] += subdiagonal ** 2
    return d, diagonal[:-1] * subdiagonal


def _eigenvalues(diagonal: np.ndarray, subdiagonal: np.ndarray) -> np.ndarray:
    d, e = _tridiagonal(diagonal, subdiagonal)
    if d.size == 1:
        return d
    try:
        return eigh_tridiagonal(d, e, eigvals_only=True)
    except LinAlgError as exc:
        raise EigensolverError(f"tridiagonal eigensolver failed: {exc}") from exc


def _clamp(values: np.ndarray) -> Tuple[np.ndarray, int]:
    floor = CLAMP_WINDOW * values[-1]
    if np.any(values <= -floor):
        raise EigensolverError(f"eigenvalue {values[0]:.3g} below the clamp window -{floor:.3g}")
    small = values <= 0
    if small.any():
        values = np.where(small, floor, values)
    return values, int(small.sum())


def _spectrum(config: EnsembleConfig, rng: np.random.Generator) -> Tuple[np.ndarray, int]:
    n, beta = config.n_size, config.beta
    j = np.arange(n)
    diagonal = sample_chi(2 * config.tilde_a - beta * j, rng) / _SQRT2
    subdiagonal = sample_chi(beta * (n - 1 - j[:-1]), rng) / _SQRT2 if n > 1 else np.empty(0)
    return _clamp(_eigenvalues(np.atleast_1d(diagonal), np.atleast_1d(subdiagonal)))


def sample_spectrum(config: EnsembleConfig, rng: np.random.Generator) -> np.ndarray:
    """Ascending eigenvalues of one draw of L = B B^T"""
    values, clamped = _spectrum(config, rng)
    if clamped:
        logger.warning(f"clamped {clamped} non-positive eigenvalue(s) to the floor", n_size=config.n_size)
    return values


def _run_block(config: EnsembleConfig, k: int, start: int, stop: int) -> Tuple[int, float, float, int]:
    """Welford count, mean, M2 and clamp count over samples start..stop-1"""
    mean = 0.0
    m2 = 0.0
    clamped = 0
    for count, index in enumerate(range(start, stop), start=1):
        values, hits = _spectrum(config, sample_rng(config.seed, index))
        clamped += hits
        x = float(np.sum(values ** (-k)))
        delta = x - mean
        mean += delta / count
        m2 += delta * (x - mean)
    return stop - start, mean, m2, clamped


def _merge(left: Tuple[int, float, float, int], right: Tuple[int, float, float, int]) -> Tuple[int, float, float, int]:
    n_a, mean_a, m2_a, c_a = left
    n_b, mean_b, m2_b, c_b = right
    n = n_a + n_b
    delta = mean_b - mean_a
    return n, mean_a + delta * n_b / n, m2_a + m2_b + delta * delta * n_a * n_b / n, c_a + c_b


def _blocks(samples: int) -> List[Tuple[int, int]]:
    size = settings.mc_block_size
    return [(start, min(start + size, samples)) for start in range(0, samples, size)]


def mc_inverse_moment(config: EnsembleConfig, k: int, workers: Optional[int] = None,
                      progress: bool = False) -> MomentEstimate:
    """
    Sample mean and standard error of sum_j lambda_j^-k.

    Samples are split into fixed blocks of settings.mc_block_size; each
    sample draws from its own stream and blocks merge in order, so the
    estimate depends on (seed, samples) only, never on `workers`.
    """
    if k < 1:
        raise PreconditionError(f"order k must be a positive integer, got {k}")
    if not config.alpha > k - 1:
        raise PreconditionError(f"k < alpha+1 violated: k={k}, alpha={config.alpha}")

    blocks = _blocks(config.samples)
    workers = settings.threads if workers is None else workers
    logger.info(
        f"Monte Carlo over {config.samples} samples in {len(blocks)} blocks",
        workers=workers, seed=config.seed, k=k,
    )

    results = []
    with tqdm(total=len(blocks), desc="Sampling", disable=not progress) as bar:
        if workers <= 1 or len(blocks) == 1:
            for start, stop in blocks:
                results.append(_run_block(config, k, start, stop))
                bar.update(1)
                logger.debug("Monte Carlo block finished", block=len(results), blocks=len(blocks))
        else:
            with ProcessPoolExecutor(max_workers=workers) as executor:
                futures = [executor.submit(_run_block, config, k, start, stop) for start, stop in blocks]
                for future in futures:
                    results.append(future.result())
                    bar.update(1)
                    logger.debug("Monte Carlo block finished", block=len(results), blocks=len(blocks))

    total = results[0]
    for block in results[1:]:
        total = _merge(total, block)
    n, mean, m2, clamped = total

    if clamped:
        logger.warning(f"clamped {clamped} non-positive eigenvalue(s) to the floor", samples=n)
    stderr = math.sqrt(m2 / (n - 1) / n) if n > 1 else 0.0
    logger.debug("Monte Carlo finished", mean=mean, stderr=stderr)
    return MomentEstimate(mean=mean, stderr=stderr, samples=n, seed=config.seed, k=k, clamped=clamped)


def laguerre_zeros(n_size: int, nu: float) -> np.ndarray:
    """Zeros of L_N^(nu), ascending, as the spectrum of the frozen bidiagonal matrix"""
    if n_size < 1:
        raise PreconditionError(f"N must be a positive integer, got {n_size}")
    if not nu > -1:
        raise PreconditionError(f"nu must exceed -1, got {nu}")
    j = np.arange(n_size, dtype=float)
    diagonal = np.sqrt(n_size + nu - j)
    subdiagonal = np.sqrt(n_size - 1 - j[:-1])
    return _eigenvalues(diagonal, subdiagonal)


def lowtemp_moment_sum(n_size: int, nu: float, k: int) -> float:
    """2^k sum_n l_n^-k over the zeros of L_N^(nu)"""
    if k < 1:
        raise PreconditionError(f"order k must be a positive integer, got {k}")
    zeros = laguerre_zeros(n_size, nu)
    return float(2 ** k * np.sum(zeros ** (-float(k))))


def _marchenko_pastur_unit_cdf(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 0.0, 4.0)
    return 2 / math.pi * np.arcsin(np.sqrt(x) / 2) + np.sqrt(x * (4 - x)) / (2 * math.pi)


def spectrum_statistics(config: EnsembleConfig, bins: int = 40) -> float:
    """
    Total-variation distance between the histogram of 2 lambda / (beta N)
    over config.samples spectra and the c=1 Marchenko-Pastur law on (0, 4).
    """
    scale = 2.0 / (config.beta * config.n_size)
    scaled = np.concatenate([
        _spectrum(config, sample_rng(config.seed, index))[0] * scale for index in range(config.samples)
    ])
    edges = np.linspace(0.0, 4.0, bins + 1)
    counts, _ = np.histogram(scaled, bins=edges)
    empirical = counts / scaled.size
    expected = np.diff(_marchenko_pastur_unit_cdf(edges))
    outside = 1.0 - empirical.sum()
    distance = 0.5 * (np.abs(empirical - expected).sum() + outside)
    logger.debug("bulk spectrum check", tv_distance=distance, outside=outside)
    return float(distance)
