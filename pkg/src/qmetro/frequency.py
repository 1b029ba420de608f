"""Frequency estimation with an optimised single-shot duration.

A frequency ``omega`` imprinted for time ``t`` gives a phase ``omega t``
while the noise strength follows ``eta(t)``.  Per unit of total time the
Fisher information is ``t * F(eta(t))``, maximised over ``t``.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import ce_asymptotic, ce_finite, channel_qfi, extended_qfi
from .channels import catalog, eta_of_t
from .errors import BadParameter, DomainError

METHODS = ("channel_qfi", "extended_qfi", "ce_finite", "ce_asymptotic")
GRID = 64
GOLDEN = (math.sqrt(5) - 1) / 2
# Constants of the depolarising finite-N closed form, known to 3 digits
DEPOL_ALPHA = 2.20
DEPOL_BETA = 1.32
DEPOL_EXT_FACTOR = 1.27


@dataclass
class FreqResult:
    value: float
    t_opt: float
    method: str
    kind: str = None
    gamma: float = None
    N: int = 1
    diagnostics: dict = field(default_factory=dict)


def lambert_w0(x, tol=1e-12):
    """Principal branch of the Lambert W function by Halley iteration."""
    x = float(x)
    branch = -1.0 / math.e
    if x < branch - 1e-12:
        raise DomainError(f"W0 is undefined below -1/e (got {x})")
    if x <= branch:
        return -1.0
    if x == 0.0:
        return 0.0
    # series about the branch point, log asymptotics for large x
    if x < -0.25:
        p = math.sqrt(2 * (math.e * x + 1))
        w = -1 + p - p * p / 3 + 11 / 72 * p**3
    elif x < 3:
        w = math.log1p(x) * 0.9 if x > 0 else x
    else:
        lx = math.log(x)
        w = lx - math.log(lx) if lx > 1 else lx
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1
        if wp1 == 0:
            break
        step = f / (ew * wp1 - (w + 2) * f / (2 * wp1))
        w -= step
        if abs(step) <= tol * (1 + abs(w)):
            break
    return w


def _engine(method, N):
    if method == "channel_qfi":
        return lambda ch: channel_qfi(ch).value
    if method == "extended_qfi":
        return lambda ch: extended_qfi(ch).value
    if method == "ce_finite":
        return lambda ch: ce_finite(ch, N).value
    if method == "ce_asymptotic":
        return lambda ch: ce_asymptotic(ch).value
    raise BadParameter(f"unknown frequency method {method!r}; expected one of {METHODS}")


def _richardson_at_zero(ts, vals):
    """Polynomial extrapolation of ``vals(ts)`` to ``t = 0`` (Neville)."""
    p = list(vals)
    n = len(ts)
    for k in range(1, n):
        for i in range(n - k):
            p[i] = (ts[i] * p[i + 1] - ts[i + k] * p[i]) / (ts[i] - ts[i + k])
    return p[0]


def freq_bound(kind, method, gamma, N=1, t_max=None):
    """Best ``t * M(eta(t))`` over ``0 < t <= t_max`` for a catalog family.

    A 64-point log grid brackets the maximum, which golden-section search
    then refines.  When the product keeps growing as ``t -> 0`` (the
    asymptotic bound) the supremum is the ``t -> 0`` limit; it is found by
    Richardson extrapolation and reported with ``t_opt = 0``.
    """
    if gamma <= 0:
        raise BadParameter("gamma must be positive")
    t_max = 1e3 / gamma if t_max is None else float(t_max)
    if t_max <= 0:
        raise BadParameter("t_max must be positive")
    method = method.replace("-", "_")
    bound = _engine(method, N)
    cache = {}

    def g(t):
        if t not in cache:
            eta = eta_of_t(kind, gamma, t)
            cache[t] = t * bound(catalog(kind, "phase", 0.0, eta)) if eta < 1 else 0.0
        return cache[t]

    diag = {}
    lo_exp = math.log10(t_max) - 6
    for _ in range(4):
        ts = np.logspace(lo_exp, math.log10(t_max), GRID)
        vals = np.array([g(t) for t in ts])
        j = int(np.argmax(vals))
        if j > 0 or method == "ce_asymptotic":
            break
        lo_exp -= 3
    peaks = np.flatnonzero((vals[1:-1] > vals[:-2]) & (vals[1:-1] > vals[2:]))
    if len(peaks) > 1:
        diag["local_maxima"] = [float(ts[p + 1]) for p in peaks]
    diag["grid"] = (float(ts[0]), float(ts[-1]))

    if j == 0:
        # increasing towards t -> 0: extrapolate the limit
        t0 = min(0.02 / gamma, ts[0] * 1e3)
        tk = [t0 * 2.0**-k for k in range(6)]
        limit = _richardson_at_zero(tk, [g(t) for t in tk])
        diag["limit"] = True
        return FreqResult(float(limit), 0.0, method, kind, gamma, N, diag)

    if j == GRID - 1:
        diag["at_t_max"] = True
        return FreqResult(float(vals[j]), float(ts[j]), method, kind, gamma, N, diag)

    a, b = ts[j - 1], ts[j + 1]
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    while b - a > 1e-9 * b:
        if g(c) > g(d):
            b, d = d, c
            c = b - GOLDEN * (b - a)
        else:
            a, c = c, d
            d = a + GOLDEN * (b - a)
    t_opt = 0.5 * (a + b)
    best_t = max([t_opt, ts[j]], key=g)
    return FreqResult(float(g(best_t)), float(best_t), method, kind, gamma, N, diag)


def _w(x, N):
    return 1 + lambert_w0((x - N) / (math.e * N))


def freq_closed(kind, method, gamma, N=1):
    """Closed-form time-optimised values.

    The depolarising ``extended_qfi`` and ``ce_finite`` entries rest on
    constants known to three digits and are approximate.
    """
    k = kind.replace("-", "_")
    method = method.replace("-", "_")
    e, g = math.e, float(gamma)
    if method == "ce_finite" and N < 1:
        raise BadParameter("N must be >= 1")
    if k == "dephasing":
        table = {
            "channel_qfi": lambda: 1 / (2 * e * g),
            "extended_qfi": lambda: 1 / (2 * e * g),
            "ce_finite": lambda: N / (2 * g) * _w(1, N) / (1 + (math.exp(_w(1, N)) - 1) * N),
            "ce_asymptotic": lambda: 1 / (2 * g),
        }
    elif k == "loss":
        table = {
            "channel_qfi": lambda: 1 / (e * g),
            "extended_qfi": lambda: 1 / (e * g),
            "ce_finite": lambda: N / g * _w(1, N) / (1 + (math.exp(_w(1, N)) - 1) * N),
            "ce_asymptotic": lambda: 1 / g,
        }
    elif k == "spontaneous_emission":
        wt = 1 + 2 * lambert_w0(1 / (2 * math.sqrt(e)))

        def finite():
            if N < 2:
                raise BadParameter("spontaneous-emission closed form needs N >= 2")
            w4 = _w(4, N)
            return N / g * 4 * w4 / (4 + (math.exp(w4) - 1) * N)

        table = {
            "channel_qfi": lambda: 1 / (e * g),
            "extended_qfi": lambda: 4 * wt / (g * (1 + math.exp(wt / 2)) ** 2),
            "ce_finite": finite,
            "ce_asymptotic": lambda: 4 / g,
        }
    elif k == "depolarization":

        def finite():
            if N < 2:
                raise BadParameter("depolarising closed form needs N >= 2")
            wb = _w(DEPOL_BETA, N)
            x = math.exp(DEPOL_ALPHA / 4 * wb)
            return 3 * N / (4 * g) * DEPOL_ALPHA * wb / (2 + (x - 1) * (x + 2) * N)

        table = {
            "channel_qfi": lambda: 3 / (4 * e * g),
            "extended_qfi": lambda: DEPOL_EXT_FACTOR * 3 / (4 * e * g),
            "ce_finite": finite,
            "ce_asymptotic": lambda: 1 / g,
        }
    else:
        raise BadParameter(f"unknown channel kind {kind!r}")
    if method not in table:
        raise BadParameter(f"unknown frequency method {method!r}")
    return table[method]()


def is_approximate(kind, method):
    """Whether :func:`freq_closed` relies on rounded constants for this entry."""
    return kind.replace("-", "_") == "depolarization" and method.replace("-", "_") in ("extended_qfi", "ce_finite")


def freq_crlb(result, T_total):
    """Frequency uncertainty ``1 / sqrt(T_total N f)`` after total time ``T_total``."""
    if T_total <= 0:
        raise BadParameter("T_total must be positive")
    return 1.0 / math.sqrt(T_total * result.N * result.value)
