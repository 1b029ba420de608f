"""Analytic reference values for the four catalog noise families.

These are the known closed forms the numerical engines are checked
against.  ``None`` marks a quantity that does not exist for the family
(for example the RLD bound of a phi-extremal channel).
"""
import math

import numpy as np

from .errors import BadParameter
from .matkit import PAULI_Y

KINDS = ("dephasing", "depolarization", "loss", "spontaneous_emission")


def _kind(kind):
    k = kind.replace("-", "_")
    if k not in KINDS:
        raise BadParameter(f"unknown channel kind {kind!r}")
    return k


def phase_values(kind, eta):
    """Phase-estimation quantities per channel use.

    Keys: ``qfi``, ``ext_qfi``, ``ce``, ``qs``, ``rld``, ``cs``.
    """
    k, e = _kind(kind), float(eta)
    if k == "dephasing":
        a = e * e / (1 - e * e)
        return {"qfi": e * e, "ext_qfi": e * e, "ce": a, "qs": a, "rld": a, "cs": a}
    if k == "depolarization":
        ce = 2 * e * e / ((1 - e) * (1 + 2 * e))
        return {
            "qfi": e * e,
            "ext_qfi": 2 * e * e / (1 + e),
            "ce": ce,
            "qs": ce,
            "rld": 2 * e * e * (1 + e) / ((1 - e) * (1 + 3 * e)),
            "cs": 4 * e * e / ((1 - e) * (1 + 3 * e)),
        }
    if k == "loss":
        a = e / (1 - e)
        return {"qfi": e, "ext_qfi": e, "ce": a, "qs": a, "rld": None, "cs": None}
    s = math.sqrt(e)
    return {"qfi": e, "ext_qfi": 4 * e / (1 + s) ** 2, "ce": 4 * e / (1 - e), "qs": None, "rld": None, "cs": None}


def enhancement_values(kind, eta):
    """Enhancement factors ``(chi, chi_extended, chi_is_exact)``."""
    k, e = _kind(kind), float(eta)
    if k == "dephasing":
        v = math.sqrt(1 / (1 - e * e))
        return v, v, True
    if k == "depolarization":
        return (
            math.sqrt(2 / ((1 - e) * (1 + 2 * e))),
            math.sqrt((1 + e) / ((1 - e) * (1 + 2 * e))),
            False,
        )
    if k == "loss":
        v = math.sqrt(1 / (1 - e))
        return v, v, True
    s = math.sqrt(e)
    return math.sqrt(4 / (1 - e)), math.sqrt((1 + s) / (1 - s)), False


def strength_values(kind, eta):
    """Noise-strength estimation: keys ``qfi``, ``ext_qfi``, ``asymptotic``."""
    k, e = _kind(kind), float(eta)
    if k == "dephasing":
        v = 1 / (1 - e * e)
        return {"qfi": v, "ext_qfi": v, "asymptotic": v}
    if k == "depolarization":
        v = 3 / ((1 - e) * (1 + 3 * e))
        return {"qfi": 1 / (1 - e * e), "ext_qfi": v, "asymptotic": v}
    v = 1 / (e * (1 - e))
    return {"qfi": v, "ext_qfi": v, "asymptotic": v}


def optimal_rotation(kind, eta):
    """Known Kraus rotation generator attaining the extended-channel QFI.

    Expressed in the Kraus ordering used by :func:`qmetro.channels.catalog`.
    """
    k, e = _kind(kind), float(eta)
    if k == "dephasing":
        return math.sqrt(1 - e * e) / 2 * np.array([[0, 1], [1, 0]], dtype=complex)
    if k == "depolarization":
        xi = math.sqrt((1 + 3 * e) * (1 - e)) / (1 + e)
        h = np.zeros((4, 4), dtype=complex)
        h[0, 3] = h[3, 0] = xi
        h[1:3, 1:3] = PAULI_Y
        return h / 2
    if k == "loss":
        return -0.5 * np.diag([1.0, -1.0, 0.0]).astype(complex)
    xi = (1 - math.sqrt(e)) / (1 + math.sqrt(e))
    return 0.5 * np.diag([xi, -1.0]).astype(complex)


def ce_finite_closed(kind, eta, N):
    """Finite-N channel-extension bound ``N F_as / (N + F_as)``.

    Holds for ``N >= 1`` except for spontaneous emission, where it starts
    at ``N = 2``.
    """
    k = _kind(kind)
    if N < 1 or (k == "spontaneous_emission" and N < 2):
        raise BadParameter(f"closed form for {k} needs N >= {2 if k == 'spontaneous_emission' else 1}")
    f = phase_values(k, eta)["ce"]
    return N * f / (N + f)
