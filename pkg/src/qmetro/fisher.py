"""Fisher information of probability distributions and quantum states."""
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NegativeEigenvalue, SingularDistribution, SolverFailure, SupportViolation
from .matkit import PSD_TOL, check_hermitian, dagger, herm_eig, op_norm, pinv_on_support
from .sdp import OPTIMAL, build_ce_sdp, solve

SLD_CUTOFF = 1e-12


@dataclass(frozen=True, eq=False)
class StatePair:
    """A density matrix and its derivative with respect to the parameter."""

    rho: np.ndarray
    drho: np.ndarray

    def __post_init__(self):
        rho = check_hermitian(self.rho)
        drho = check_hermitian(self.drho)
        if rho.shape != drho.shape:
            raise DimensionMismatch(f"rho {rho.shape} vs drho {drho.shape}")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "drho", drho)

    def validate(self):
        problems = []
        tr = np.trace(self.rho).real
        if abs(tr - 1) > 1e-10:
            problems.append(f"Tr(rho) = {tr}")
        w = np.linalg.eigvalsh(self.rho)
        if w[0] < -PSD_TOL * max(w[-1], 1e-300):
            problems.append(f"rho has negative eigenvalue {w[0]:.3e}")
        dtr = abs(np.trace(self.drho))
        if dtr > 1e-10:
            problems.append(f"Tr(drho) = {dtr:.3e}")
        return problems

    @classmethod
    def from_pure(cls, psi, dpsi):
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        dpsi = np.asarray(dpsi, dtype=complex).reshape(-1)
        rho = np.outer(psi, psi.conj())
        drho = np.outer(dpsi, psi.conj())
        return cls(rho, drho + dagger(drho))


def classical_fi(p, dp):
    """Fisher information ``sum dp_i^2 / p_i`` of a parameterised distribution.

    Outcomes with ``p_i <= 1e-14`` are skipped unless they carry derivative
    mass above ``1e-7``, in which case the information is infinite.
    """
    p = np.asarray(p, dtype=float)
    dp = np.asarray(dp, dtype=float)
    if p.shape != dp.shape:
        raise DimensionMismatch("p and dp differ in shape")
    if np.any(p < -1e-14) or abs(p.sum() - 1) > 1e-10:
        raise ValueError("p is not a probability vector")
    if abs(dp.sum()) > 1e-8:
        raise ValueError(f"derivative does not sum to zero ({dp.sum():.3e})")
    null = p <= 1e-14
    if np.any(null & (np.abs(dp) > 1e-7)):
        raise SingularDistribution("derivative mass on an outcome of zero probability")
    keep = ~null
    return float(np.sum(dp[keep] ** 2 / p[keep]))


def sld(s):
    """Symmetric logarithmic derivative, built in the eigenbasis of ``rho``."""
    w, v = herm_eig(s.rho)
    dr = dagger(v) @ s.drho @ v
    den = w[:, None] + w[None, :]
    mask = den > SLD_CUTOFF
    lm = np.zeros_like(dr)
    lm[mask] = 2 * dr[mask] / den[mask]
    out = v @ lm @ dagger(v)
    return 0.5 * (out + dagger(out))


def qfi(s):
    """Quantum Fisher information ``Tr(rho L^2)``."""
    w, v = herm_eig(s.rho)
    dr = dagger(v) @ s.drho @ v
    den = w[:, None] + w[None, :]
    mask = den > SLD_CUTOFF
    # Tr(rho L^2) = sum_ij 2 |dr_ij|^2 / (l_i + l_j)
    val = np.sum(2 * np.abs(dr[mask]) ** 2 / den[mask])
    return max(float(val), 0.0)


def qfi_pure(psi, dpsi):
    """QFI of a pure-state family, ``4 (<dpsi|dpsi> - |<dpsi|psi>|^2)``."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    dpsi = np.asarray(dpsi, dtype=complex).reshape(-1)
    if abs(np.linalg.norm(psi) - 1) > 1e-10:
        raise ValueError("psi must be normalised")
    if abs(np.vdot(dpsi, psi).real) > 1e-8:
        raise ValueError("Re<dpsi|psi> must vanish")
    val = 4 * (np.vdot(dpsi, dpsi).real - abs(np.vdot(dpsi, psi)) ** 2)
    return max(float(val), 0.0)


def rld_qfi(s, cutoff=1e-10):
    """Right-logarithmic-derivative bound ``Tr(rho^{-1} drho^2)`` on the QFI."""
    w, v = herm_eig(s.rho)
    lmax = max(w[-1], 0.0)
    if w[0] < -PSD_TOL * max(lmax, 1e-300):
        raise NegativeEigenvalue(f"rho has eigenvalue {w[0]:.3e}")
    off = v[:, w <= cutoff * lmax]
    if off.shape[1]:
        leak = op_norm(dagger(off) @ s.drho @ off)
        if leak > 1e-8:
            raise SupportViolation(f"||P_perp drho P_perp|| = {leak:.3e}")
    inv = pinv_on_support(s.rho, cutoff)
    return float(np.trace(inv @ s.drho @ s.drho).real)


def channel_output(ch, psi):
    """Output StatePair of the channel acting on the pure input ``psi``."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.shape[0] != ch.d_in:
        raise DimensionMismatch(f"input has dimension {psi.shape[0]}, channel expects {ch.d_in}")
    rho = np.outer(psi, psi.conj())
    return StatePair(ch.apply(rho), ch.apply_derivative(rho))


def purification_qfi(ch, psi_in):
    """Output QFI of ``ch`` on ``psi_in`` as ``4 min_h <psi|alpha(h)|psi>``.

    The minimum over local Kraus rotations is found with the weighted
    semidefinite program, independently of the SLD route in :func:`qfi`.
    """
    psi = np.asarray(psi_in, dtype=complex).reshape(-1)
    if abs(np.linalg.norm(psi) - 1) > 1e-10:
        raise ValueError("psi_in must be normalised")
    sol = solve(build_ce_sdp(ch, 1, weight=psi))
    if sol.status != OPTIMAL:
        raise SolverFailure(f"weighted program ended with status {sol.status}")
    return max(sol.objective, 0.0)
