"""Both sides of each beta/gamma identity, and the driver that compares them.

Every ``*_sides`` function returns ``(lhs, rhs)`` in one of two modes:

``exact``
    values are ``int``, ``Fraction`` or :class:`SqrtPiValue`; equality is
    decided symbolically.
``float``
    values are doubles; alternating sums are accumulated with ``math.fsum``.

Identity ids:

===============  ============================================================
``thm21``        sum_k C(n,k) B(p1+k, p2+n-k) = B(p1, p2)
``thm22``        sum_j (-1)^j C(n,j) B(j+1, s) = 1/(s+n)
``thm23``        sum_j sum_{i<=j} (-1)^j C(n,j) B(j+1, s)/(s+i) = 1/(s+n)^2
``thm24``        sum_k (-1)^k C(n,k) B(p+k, p+n-k) = n! G(p) G(p+n/2) / (G(n/2+1) G(2p+n)), 0 for odd n
``thm24_gamma``  the same with gamma products, undivided by G(2p+n)
``cor21``        sum_k (-1)^k C(2k,k) C(2n-2k,n-k) = 2^n C(n, n/2), 0 for odd n
``thm31``        sum over compositions of multinomial * B(p+k) = B(p)
``cor31``        sum over compositions of prod C(2k_j, k_j) = (4^n/n!) G(n+m/2)/G(m/2)
``mikic``        the gamma-ratio right side of ``cor31`` against the binomial closed form
``conv11``       sum_{k=0}^{n} C(2k,k) C(2n-2k,n-k) = 4^n
``eq29``         sum_j (-1)^j C(n,j) s/(s+j) = prod_{j<=n} j/(s+j) = s B(n+1, s)
``eq226``        G(n+1/2)/G(1/2) = (2n)!/(n! 4^n)
``basic23``      B(x, y) = B(x, y+1) + B(x+1, y)
===============  ============================================================

The central-binomial convolution is summed from ``k = 0``; starting at
``k = 1`` would drop a ``C(2n, n)`` term and already fails at ``n = 1``.
For ``thm24`` the domain is ``n >= 1``; at ``n = 0`` both sides are just
``B(p, p)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

from .exactnum import (
    HalfInteger,
    SqrtPiValue,
    beta_exact,
    beta_int_first,
    binomial,
    compositions,
    factorial,
    gamma_half,
    multinomial,
)
from .special import beta_num, beta_num_multi, log_gamma

EXACT = "exact"
FLOAT = "float"
MODES = (EXACT, FLOAT)

DEFAULT_TOL = 1e-9
DEFAULT_ALTERNATING_TOL = 1e-6

Param = Union[int, Fraction, float]


class IdentityError(ValueError):
    """A case does not fit the identity's signature or the requested mode."""


@dataclass(frozen=True)
class Signature:
    params: tuple[str, ...]      # parameter names; ("p*",) means "m >= 2 of them"
    n_min: int
    modes: tuple[str, ...]
    alternating: bool
    integer_params: bool = False     # params are integer sizes (m), not shapes
    uses_n: bool = True


SIGNATURES: dict[str, Signature] = {
    "thm21": Signature(("p1", "p2"), 0, MODES, False),
    "thm22": Signature(("s",), 0, MODES, True),
    "thm23": Signature(("s",), 0, MODES, True),
    "thm24": Signature(("p",), 1, MODES, True),
    "thm24_gamma": Signature(("p",), 1, (EXACT,), True),
    "cor21": Signature((), 1, (EXACT,), True),
    "thm31": Signature(("p*",), 0, MODES, False),
    "cor31": Signature(("m",), 1, (EXACT,), False, integer_params=True),
    "mikic": Signature(("m",), 1, (EXACT,), False, integer_params=True),
    "conv11": Signature((), 1, (EXACT,), False),
    "eq29": Signature(("s",), 0, MODES, True),
    "eq226": Signature((), 0, (EXACT,), False),
    "basic23": Signature(("x", "y"), 0, MODES, False, uses_n=False),
}

IDENTITY_IDS = tuple(SIGNATURES)


# --------------------------------------------------------------------------
# parameter handling


def _exact_param(value, name: str) -> Fraction:
    if isinstance(value, float):
        raise IdentityError(f"exact mode needs a rational {name}, got float {value!r}")
    q = Fraction(value)
    if q <= 0:
        raise IdentityError(f"{name} must be positive, got {q}")
    return q


def _half(value, name: str) -> HalfInteger:
    q = _exact_param(value, name)
    if q.denominator not in (1, 2):
        raise IdentityError(
            f"exact mode evaluates gamma only at multiples of 1/2; {name}={q} is not one")
    return HalfInteger.of(q)


def _float_param(value, name: str) -> float:
    v = float(value)
    if not (v > 0 and math.isfinite(v)):
        raise IdentityError(f"{name} must be positive, got {value!r}")
    return v


def _check_mode(mode: str):
    if mode not in MODES:
        raise IdentityError(f"unknown mode {mode!r}; expected one of {MODES}")


def _check_n(n: int, n_min: int):
    if not isinstance(n, int) or isinstance(n, bool) or n < n_min:
        raise IdentityError(f"n must be an integer >= {n_min}, got {n!r}")


def _fsum_terms(terms: Sequence[float]) -> float:
    return math.fsum(terms)


# --------------------------------------------------------------------------
# non-alternating sums of betas


def thm21_terms(p1, p2, n: int, mode: str = EXACT) -> list:
    _check_mode(mode)
    _check_n(n, 0)
    if mode == EXACT:
        a, b = _half(p1, "p1"), _half(p2, "p2")
        return [binomial(n, k) * beta_exact([a + k, b + (n - k)]) for k in range(n + 1)]
    a, b = _float_param(p1, "p1"), _float_param(p2, "p2")
    return [binomial(n, k) * beta_num(a + k, b + n - k) for k in range(n + 1)]


def thm21_sides(p1, p2, n: int, mode: str = EXACT):
    terms = thm21_terms(p1, p2, n, mode)
    if mode == EXACT:
        return sum(terms, SqrtPiValue()), beta_exact([_half(p1, "p1"), _half(p2, "p2")])
    return _fsum_terms(terms), beta_num(_float_param(p1, "p1"), _float_param(p2, "p2"))


def thm31_terms(ps: Sequence, n: int, mode: str = EXACT) -> list:
    _check_mode(mode)
    _check_n(n, 0)
    if len(ps) < 2:
        raise IdentityError(f"thm31 needs m >= 2 parameters, got {len(ps)}")
    m = len(ps)
    if mode == EXACT:
        hs = [_half(p, f"p{i + 1}") for i, p in enumerate(ps)]
        return [multinomial(n, ks) * beta_exact([h + k for h, k in zip(hs, ks)])
                for ks in compositions(n, m)]
    fs = [_float_param(p, f"p{i + 1}") for i, p in enumerate(ps)]
    return [multinomial(n, ks) * beta_num_multi([f + k for f, k in zip(fs, ks)])
            for ks in compositions(n, m)]


def thm31_sides(ps: Sequence, n: int, mode: str = EXACT):
    terms = thm31_terms(ps, n, mode)
    if mode == EXACT:
        rhs = beta_exact([_half(p, f"p{i + 1}") for i, p in enumerate(ps)])
        return sum(terms, SqrtPiValue()), rhs
    rhs = beta_num_multi([_float_param(p, f"p{i + 1}") for i, p in enumerate(ps)])
    return _fsum_terms(terms), rhs


def basic23_sides(x, y, mode: str = EXACT):
    _check_mode(mode)
    if mode == EXACT:
        a, b = _half(x, "x"), _half(y, "y")
        return beta_exact([a, b]), beta_exact([a, b + 1]) + beta_exact([a + 1, b])
    a, b = _float_param(x, "x"), _float_param(y, "y")
    return beta_num(a, b), math.fsum([beta_num(a, b + 1), beta_num(a + 1, b)])


# --------------------------------------------------------------------------
# alternating sums over B(j+1, s) and the binomial identity behind them


def _beta_first_int(j: int, s, mode: str):
    # B(j+1, s); the exact path is rational for every rational s
    if mode == EXACT:
        return beta_int_first(j, s)
    denom = 1.0
    for i in range(j + 1):
        denom *= s + i
    return math.factorial(j) / denom


def thm22_terms(s, n: int, mode: str = EXACT) -> list:
    _check_mode(mode)
    _check_n(n, 0)
    s = _exact_param(s, "s") if mode == EXACT else _float_param(s, "s")
    return [(-1) ** j * binomial(n, j) * _beta_first_int(j, s, mode) for j in range(n + 1)]


def thm22_sides(s, n: int, mode: str = EXACT):
    terms = thm22_terms(s, n, mode)
    if mode == EXACT:
        s = _exact_param(s, "s")
        return sum(terms, Fraction(0)), 1 / (s + n)
    s = _float_param(s, "s")
    return _fsum_terms(terms), 1.0 / (s + n)


def thm23_terms(s, n: int, mode: str = EXACT) -> list:
    _check_mode(mode)
    _check_n(n, 0)
    s = _exact_param(s, "s") if mode == EXACT else _float_param(s, "s")
    terms = []
    for j in range(n + 1):
        outer = (-1) ** j * binomial(n, j) * _beta_first_int(j, s, mode)
        for i in range(j + 1):
            terms.append(outer / (s + i))
    return terms


def thm23_sides(s, n: int, mode: str = EXACT):
    terms = thm23_terms(s, n, mode)
    if mode == EXACT:
        s = _exact_param(s, "s")
        return sum(terms, Fraction(0)), 1 / (s + n) ** 2
    s = _float_param(s, "s")
    return _fsum_terms(terms), 1.0 / (s + n) ** 2


def eq29_terms(s, n: int, mode: str = EXACT) -> list:
    _check_mode(mode)
    _check_n(n, 0)
    s = _exact_param(s, "s") if mode == EXACT else _float_param(s, "s")
    return [(-1) ** j * binomial(n, j) * s / (s + j) for j in range(n + 1)]


def eq29_sides(s, n: int, mode: str = EXACT):
    """Returns ``(alternating sum, product, s * B(n+1, s))``."""
    terms = eq29_terms(s, n, mode)
    if mode == EXACT:
        s = _exact_param(s, "s")
        mid = Fraction(1)
        for j in range(1, n + 1):
            mid *= Fraction(j) / (s + j)
        return sum(terms, Fraction(0)), mid, s * beta_int_first(n, s)
    s = _float_param(s, "s")
    mid = 1.0
    for j in range(1, n + 1):
        mid *= j / (s + j)
    return _fsum_terms(terms), mid, s * beta_num(n + 1.0, s)


def binomial_inversion(a: Sequence) -> list:
    """``b_n = sum_j (-1)^j C(n, j) a_j`` for each prefix; the map is its own inverse."""
    if len(a) == 0:
        raise ValueError("binomial inversion needs a non-empty sequence")
    out = []
    for n in range(len(a)):
        terms = [(-1) ** j * binomial(n, j) * a[j] for j in range(n + 1)]
        if all(isinstance(t, float) for t in terms):
            out.append(math.fsum(terms))
        else:
            out.append(sum(terms[1:], terms[0]))
    return out


# --------------------------------------------------------------------------
# symmetric alternating sums with odd-n cancellation


def thm24_terms(p, n: int, mode: str = EXACT) -> list:
    _check_mode(mode)
    _check_n(n, 1)
    if mode == EXACT:
        h = _half(p, "p")
        return [(-1) ** k * binomial(n, k) * beta_exact([h + k, h + (n - k)])
                for k in range(n + 1)]
    f = _float_param(p, "p")
    # beta_num sorts its arguments, so the k and n-k terms are bit-identical
    return [(-1) ** k * binomial(n, k) * beta_num(f + k, f + n - k) for k in range(n + 1)]


def thm24_rhs(p, n: int, mode: str = EXACT):
    _check_mode(mode)
    _check_n(n, 1)
    if mode == EXACT:
        h = _half(p, "p")
        if n % 2:
            return SqrtPiValue()
        num = factorial(n) * gamma_half(h) * gamma_half(h + n // 2)
        return num / (gamma_half(n // 2 + 1) * gamma_half(HalfInteger(2 * h.twice_value + 2 * n)))
    f = _float_param(p, "p")
    if n % 2:
        return 0.0
    half_n = n // 2
    return math.exp(math.lgamma(n + 1) + log_gamma(f) + log_gamma(f + half_n)
                    - log_gamma(half_n + 1.0) - log_gamma(2 * f + n))


def thm24_sides(p, n: int, mode: str = EXACT):
    terms = thm24_terms(p, n, mode)
    lhs = sum(terms, SqrtPiValue()) if mode == EXACT else _fsum_terms(terms)
    return lhs, thm24_rhs(p, n, mode)


def thm24_gamma_terms(p, n: int) -> list[SqrtPiValue]:
    _check_n(n, 1)
    h = _half(p, "p")
    return [(-1) ** k * binomial(n, k) * gamma_half(h + k) * gamma_half(h + (n - k))
            for k in range(n + 1)]


def thm24_gamma_sides(p, n: int, mode: str = EXACT):
    if mode != EXACT:
        raise IdentityError("thm24_gamma is evaluated in exact mode only")
    h = _half(p, "p")
    lhs = sum(thm24_gamma_terms(p, n), SqrtPiValue())
    if n % 2:
        return lhs, SqrtPiValue()
    rhs = factorial(n) * gamma_half(h + n // 2) * gamma_half(h) / gamma_half(n // 2 + 1)
    return lhs, rhs


def cor21_terms(n: int) -> list[int]:
    _check_n(n, 1)
    return [(-1) ** k * binomial(2 * k, k) * binomial(2 * n - 2 * k, n - k) for k in range(n + 1)]


def cor21_sides(n: int, mode: str = EXACT):
    if mode != EXACT:
        raise IdentityError("cor21 is evaluated in exact mode only")
    lhs = sum(cor21_terms(n))
    rhs = 0 if n % 2 else 2 ** n * binomial(n, n // 2)
    return lhs, rhs


def pairwise_cancellation(terms: Sequence) -> list:
    """Sums of the k-th and (n-k)-th summands for k < n/2.

    For the odd-n alternating identities every entry is zero.
    """
    n = len(terms) - 1
    return [terms[k] + terms[n - k] for k in range((n + 1) // 2)]


# --------------------------------------------------------------------------
# central binomial convolutions


def conv11_sides(n: int, mode: str = EXACT):
    if mode != EXACT:
        raise IdentityError("conv11 is evaluated in exact mode only")
    _check_n(n, 1)
    lhs = sum(binomial(2 * k, k) * binomial(2 * n - 2 * k, n - k) for k in range(n + 1))
    return lhs, 4 ** n


def cor31_lhs(m: int, n: int) -> int:
    total = 0
    for ks in compositions(n, m):
        prod = 1
        for k in ks:
            prod *= binomial(2 * k, k)
        total += prod
    return total


def cor31_rhs(m: int, n: int) -> Fraction:
    """``(4^n / n!) * Gamma(n + m/2) / Gamma(m/2)``; the powers of pi cancel."""
    ratio = gamma_half(Fraction(2 * n + m, 2)) / gamma_half(Fraction(m, 2))
    return Fraction(4 ** n, factorial(n)) * ratio.to_fraction()


def _check_m(m):
    if isinstance(m, Fraction) and m.denominator == 1:
        m = int(m)
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise IdentityError(f"m must be a positive integer, got {m!r}")
    return m


def cor31_sides(m: int, n: int, mode: str = EXACT):
    if mode != EXACT:
        raise IdentityError("cor31 is evaluated in exact mode only")
    m = _check_m(m)
    _check_n(n, 1)
    return cor31_lhs(m, n), cor31_rhs(m, n)


def mikic_rhs(m: int, n: int) -> Fraction:
    m = _check_m(m)
    _check_n(n, 1)
    if m % 2 == 0:
        return Fraction(4 ** n * binomial(n + m // 2 - 1, n))
    return Fraction(binomial(2 * n + m - 1, 2 * n) * binomial(2 * n, n),
                    binomial(n + (m - 1) // 2, n))


def mikic_sides(m: int, n: int, mode: str = EXACT):
    if mode != EXACT:
        raise IdentityError("mikic is evaluated in exact mode only")
    m = _check_m(m)
    _check_n(n, 1)
    return cor31_rhs(m, n), mikic_rhs(m, n)


def eq226_sides(n: int, mode: str = EXACT):
    if mode != EXACT:
        raise IdentityError("eq226 is evaluated in exact mode only")
    _check_n(n, 0)
    lhs = gamma_half(Fraction(2 * n + 1, 2)) / gamma_half(Fraction(1, 2))
    return lhs, Fraction(factorial(2 * n), factorial(n) * 4 ** n)


# --------------------------------------------------------------------------
# verification driver


@dataclass(frozen=True)
class IdentityCase:
    identity_id: str
    params: tuple = ()
    n: int = 0
    mode: str = EXACT

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))

    @property
    def key(self) -> tuple:
        return (self.identity_id, tuple(str(p) for p in self.params), self.n, self.mode)


@dataclass
class VerificationResult:
    case: IdentityCase
    lhs: object
    rhs: object
    discrepancy: object
    passed: bool
    mode: str
    condition_hint: float | None = None
    diagnostics: dict = field(default_factory=dict)


def _validate(case: IdentityCase) -> Signature:
    sig = SIGNATURES.get(case.identity_id)
    if sig is None:
        raise IdentityError(f"unknown identity {case.identity_id!r}; known: {', '.join(IDENTITY_IDS)}")
    _check_mode(case.mode)
    if case.mode not in sig.modes:
        raise IdentityError(f"{case.identity_id} does not support {case.mode} mode")
    if sig.params == ("p*",):
        if len(case.params) < 2:
            raise IdentityError(f"{case.identity_id} needs at least 2 parameters")
    elif len(case.params) != len(sig.params):
        raise IdentityError(
            f"{case.identity_id} takes parameters ({', '.join(sig.params)}), "
            f"got {len(case.params)}")
    if sig.uses_n:
        _check_n(case.n, sig.n_min)
    elif case.n != 0:
        raise IdentityError(f"{case.identity_id} has no n; pass n=0")
    return sig


def evaluate(case: IdentityCase):
    """Returns ``(lhs, rhs, terms, extra)`` for a validated case."""
    sig = _validate(case)
    p, n, mode = case.params, case.n, case.mode
    i = case.identity_id
    extra = {}
    terms = None
    if i == "thm21":
        terms = thm21_terms(p[0], p[1], n, mode)
        lhs, rhs = thm21_sides(p[0], p[1], n, mode)
    elif i == "thm22":
        terms = thm22_terms(p[0], n, mode)
        lhs, rhs = thm22_sides(p[0], n, mode)
    elif i == "thm23":
        terms = thm23_terms(p[0], n, mode)
        lhs, rhs = thm23_sides(p[0], n, mode)
    elif i == "thm24":
        terms = thm24_terms(p[0], n, mode)
        lhs, rhs = thm24_sides(p[0], n, mode)
    elif i == "thm24_gamma":
        terms = thm24_gamma_terms(p[0], n)
        lhs, rhs = thm24_gamma_sides(p[0], n, mode)
    elif i == "cor21":
        terms = cor21_terms(n)
        lhs, rhs = cor21_sides(n, mode)
    elif i == "thm31":
        lhs, rhs = thm31_sides(list(p), n, mode)
    elif i == "cor31":
        lhs, rhs = cor31_sides(p[0], n, mode)
    elif i == "mikic":
        lhs, rhs = mikic_sides(p[0], n, mode)
    elif i == "conv11":
        lhs, rhs = conv11_sides(n, mode)
    elif i == "eq29":
        terms = eq29_terms(p[0], n, mode)
        lhs, mid, rhs = eq29_sides(p[0], n, mode)
        extra["mid"] = mid
    elif i == "eq226":
        lhs, rhs = eq226_sides(n, mode)
    elif i == "basic23":
        lhs, rhs = basic23_sides(p[0], p[1], mode)
    else:  # pragma: no cover - SIGNATURES and this dispatch are kept in step
        raise IdentityError(f"no evaluator for {i}")
    if not sig.alternating:
        terms = None
    return lhs, rhs, terms, extra


def _relative(lhs: float, rhs: float, scale: float) -> float:
    # a vanishing right side is measured against the largest summand
    denom = abs(rhs) if rhs != 0 else scale
    if not denom:
        denom = 1.0
    return abs(lhs - rhs) / denom


def verify(case: IdentityCase, tol: float | None = None) -> VerificationResult:
    """Evaluate both sides of ``case`` and compare them.

    Exact mode passes iff ``lhs - rhs`` is identically zero.  Float mode
    passes iff the relative discrepancy is at most ``tol`` (default 1e-9,
    or 1e-6 for alternating sums).
    """
    lhs, rhs, terms, extra = evaluate(case)
    sig = SIGNATURES[case.identity_id]
    if case.mode == EXACT:
        lhs, rhs = SqrtPiValue.coerce(lhs), SqrtPiValue.coerce(rhs)
        diff = lhs - rhs
        passed = diff.is_zero()
        if "mid" in extra:
            extra["mid"] = SqrtPiValue.coerce(extra["mid"])
            passed = passed and extra["mid"] == rhs
        return VerificationResult(case, lhs, rhs, diff, passed, EXACT, None, extra)

    if tol is None:
        tol = DEFAULT_ALTERNATING_TOL if sig.alternating else DEFAULT_TOL
    scale = max((abs(t) for t in terms), default=0.0) if terms else abs(rhs)
    disc = _relative(lhs, rhs, scale)
    if "mid" in extra:
        disc = max(disc, _relative(extra["mid"], rhs, scale))
    hint = None
    if sig.alternating:
        hint = scale / abs(rhs) if rhs != 0 else math.inf
    passed = math.isfinite(lhs) and math.isfinite(rhs) and disc <= tol
    return VerificationResult(case, lhs, rhs, disc, passed, FLOAT, hint, extra)


def _verify_one(args):
    case, tol = args
    return verify(case, tol)


def verify_grid(cases: Iterable[IdentityCase], tol: float | None = None,
                workers: int = 1) -> list[VerificationResult]:
    """Verify many cases, optionally on a process pool; output follows input order."""
    cases = list(cases)
    for case in cases:
        _validate(case)
    if workers <= 1 or len(cases) < 2:
        return [verify(c, tol) for c in cases]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_verify_one, [(c, tol) for c in cases], chunksize=max(1, len(cases) // (4 * workers))))
