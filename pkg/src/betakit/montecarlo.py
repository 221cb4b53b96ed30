"""Monte Carlo re-enactment of the moment arguments.

Independent unit-rate gamma variates are combined as a sum or a difference,
the n-th sample moment is estimated with its standard error, and the result
is scored against the closed form.

Streams are split per worker with ``SeedSequence(seed, spawn_key=(w,))`` and
partial moments are merged in worker order, so an estimate is a pure
function of the config (seed and worker count included).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

SUM = "sum"
DIFFERENCE = "difference"
COMBINATIONS = (SUM, DIFFERENCE)


class MonteCarloError(ArithmeticError):
    pass


@dataclass(frozen=True)
class GammaSpec:
    shape: float

    def __post_init__(self):
        if not (float(self.shape) > 0 and math.isfinite(float(self.shape))):
            raise ValueError(f"gamma shape must be positive, got {self.shape!r}")
        object.__setattr__(self, "shape", float(self.shape))


@dataclass(frozen=True)
class ExperimentConfig:
    combination: str
    shapes: tuple
    n: int
    samples: int
    seed: int
    z_threshold: float = 5.0
    workers: int = 1
    reverse: bool = False   # difference only: X2 - X1 instead of X1 - X2

    def __post_init__(self):
        shapes = tuple(s if isinstance(s, GammaSpec) else GammaSpec(s) for s in self.shapes)
        object.__setattr__(self, "shapes", shapes)
        if self.combination not in COMBINATIONS:
            raise ValueError(f"combination must be one of {COMBINATIONS}, got {self.combination!r}")
        if self.combination == SUM and len(shapes) < 2:
            raise ValueError("a sum needs at least two shapes")
        if self.combination == DIFFERENCE:
            if len(shapes) != 2 or shapes[0] != shapes[1]:
                raise ValueError("a difference needs exactly two equal shapes")
        if self.reverse and self.combination != DIFFERENCE:
            raise ValueError("reverse applies to differences only")
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"moment order must be a positive integer, got {self.n!r}")
        if not isinstance(self.samples, int) or self.samples < 2:
            raise ValueError(f"sample count must be an integer >= 2, got {self.samples!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if not self.z_threshold > 0:
            raise ValueError("z_threshold must be positive")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ValueError("workers must be a positive integer")


@dataclass(frozen=True)
class MomentEstimate:
    estimate: float
    std_error: float
    closed_form: float
    z_score: float
    n: int
    N: int

    def passed(self, z_threshold: float = 5.0) -> bool:
        return abs(self.z_score) <= z_threshold


# --------------------------------------------------------------------------
# sampling


def _marsaglia_tsang(shape: float, size: int, rng: np.random.Generator) -> np.ndarray:
    # shape >= 1; squeeze test first, log test only for the survivors
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(size)
    filled = 0
    while filled < size:
        want = size - filled
        batch = int(want * 1.05) + 16
        x = rng.standard_normal(batch)
        u = rng.random(batch)
        v = 1.0 + c * x
        ok = v > 0
        v = np.where(ok, v, 1.0) ** 3
        x2 = x * x
        squeeze = u < 1.0 - 0.0331 * x2 * x2
        with np.errstate(divide="ignore"):
            full = np.log(u) < 0.5 * x2 + d * (1.0 - v + np.log(v))
        accepted = (d * v)[ok & (squeeze | full)]
        take = min(len(accepted), want)
        out[filled:filled + take] = accepted[:take]
        filled += take
    return out


def sample_gamma_array(spec: GammaSpec, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` independent G(shape) variates.

    Shapes below 1 use ``X_p = X_{p+1} * U**(1/p)``.
    """
    p = spec.shape
    if p >= 1.0:
        return _marsaglia_tsang(p, size, rng)
    boosted = _marsaglia_tsang(p + 1.0, size, rng)
    return boosted * rng.random(size) ** (1.0 / p)


def sample_gamma(spec: GammaSpec, rng: np.random.Generator) -> float:
    return float(sample_gamma_array(spec, 1, rng)[0])


def worker_rng(seed: int, worker: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(worker,))))


def _combined(config: ExperimentConfig, size: int, rng: np.random.Generator) -> np.ndarray:
    draws = [sample_gamma_array(s, size, rng) for s in config.shapes]
    if config.combination == SUM:
        total = draws[0]
        for d in draws[1:]:
            total = total + d
        return total
    return draws[1] - draws[0] if config.reverse else draws[0] - draws[1]


def _worker_sizes(total: int, workers: int) -> list[int]:
    base, extra = divmod(total, workers)
    return [base + (w < extra) for w in range(workers)]


def simulate(config: ExperimentConfig) -> list[np.ndarray]:
    """Per-worker arrays of the combined variable, in worker order."""
    sizes = _worker_sizes(config.samples, config.workers)

    def run(w):
        return _combined(config, sizes[w], worker_rng(config.seed, w))

    if config.workers == 1:
        return [run(0)]
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        return list(pool.map(run, range(config.workers)))


# --------------------------------------------------------------------------
# closed forms


def _rising(x: float, k: int) -> float:
    out = 1.0
    for i in range(k):
        out *= x + i
    return out


def closed_form_moment(config: ExperimentConfig, n: int | None = None) -> float:
    """E[Y^n] for the configured combination.

    Sum: ``Gamma(P + n) / Gamma(P)`` with ``P`` the total shape.  Difference:
    ``n! Gamma(n/2 + p) / (Gamma(n/2 + 1) Gamma(p))`` for even ``n``, else 0.
    """
    n = config.n if n is None else n
    if config.combination == SUM:
        return _rising(math.fsum(s.shape for s in config.shapes), n)
    if n % 2:
        return 0.0
    half = n // 2
    return math.factorial(n) / math.factorial(half) * _rising(config.shapes[0].shape, half)


def _int_power(x: np.ndarray, n: int) -> np.ndarray:
    # square-and-multiply; unlike ``x ** n`` this gives (-x)^n == -(x^n) bitwise for odd n
    result = None
    base = x
    while n:
        if n & 1:
            result = base.copy() if result is None else result * base
        n >>= 1
        if n:
            base = base * base
    return result


def _moment_stats(chunks: Sequence[np.ndarray], n: int) -> tuple[int, float, float]:
    # Chan et al. pairwise merge of (count, mean, M2), fixed chunk order
    count, mean, m2 = 0, 0.0, 0.0
    for chunk in chunks:
        v = _int_power(chunk, n)
        c = v.size
        if c == 0:
            continue
        mu = float(v.mean())
        s2 = float(np.sum((v - mu) ** 2))
        delta = mu - mean
        total = count + c
        mean = mean + delta * c / total
        m2 = m2 + s2 + delta * delta * count * c / total
        count = total
    return count, mean, m2


def _score(chunks, config: ExperimentConfig, n: int) -> MomentEstimate:
    count, mean, m2 = _moment_stats(chunks, n)
    se = math.sqrt(m2 / (count - 1)) / math.sqrt(count)
    if not (math.isfinite(mean) and math.isfinite(se)):
        raise MonteCarloError(f"non-finite moment accumulation for n={n}")
    target = closed_form_moment(config, n)
    if se > 0:
        z = (mean - target) / se
    else:
        z = 0.0 if mean == target else math.inf
    return MomentEstimate(mean, se, target, z, n, count)


def estimate_moment(config: ExperimentConfig) -> MomentEstimate:
    return _score(simulate(config), config, config.n)


def estimate_moments(config: ExperimentConfig, orders: Sequence[int]) -> list[MomentEstimate]:
    """Several moment orders from one shared set of draws (``config.n`` is ignored)."""
    chunks = simulate(config)
    return [_score(chunks, config, n) for n in orders]


# --------------------------------------------------------------------------
# moment generating function of X1 - X2


def mgf_closed_form(t: float, p: float) -> float:
    if not abs(t) < 1:
        raise ValueError(f"the MGF of X1 - X2 exists only for |t| < 1, got t={t}")
    if not p > 0:
        raise ValueError(f"shape must be positive, got {p}")
    return (1.0 - t * t) ** (-p)


def mgf_series(t: float, p: float, terms: int) -> list[float]:
    """Partial sums of ``sum_k Gamma(k+p) t^2k / (Gamma(k+1) Gamma(p))``."""
    if not abs(t) < 1:
        raise ValueError(f"series converges only for |t| < 1, got t={t}")
    partial, term, out = 0.0, 1.0, []
    for k in range(terms):
        partial += term
        out.append(partial)
        term *= (k + p) / (k + 1) * t * t
    return out


def mgf_empirical(t: float, p: float, samples: int, seed: int) -> tuple[float, float]:
    """Sample mean and standard error of ``exp(t (X1 - X2))``.

    The standard error is finite only for ``|t| < 1/2``.
    """
    mgf_closed_form(t, p)
    rng = worker_rng(seed, 0)
    spec = GammaSpec(p)
    x = sample_gamma_array(spec, samples, rng) - sample_gamma_array(spec, samples, rng)
    v = np.exp(t * x)
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(samples))
