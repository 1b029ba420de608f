"""Brute-force QFI of N parallel channel uses, with input-state search.

The N-fold output state is built factor by factor, and its derivative by
the product rule, so nothing here relies on finite differences or on the
rotation programs used by :mod:`qmetro.bounds`.  Inputs are ordered with
all probes first and then, for extended channels, one ancilla per probe.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DimensionGuard, DimensionMismatch
from .fisher import StatePair, qfi, sld
from .matkit import dagger, herm_eig

MAX_DIM = 4096


@dataclass(frozen=True, eq=False)
class NChannelInstance:
    channel: object
    N: int
    extended: bool = False

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if self.out_dim > MAX_DIM:
            raise DimensionGuard(f"output dimension {self.out_dim} exceeds {MAX_DIM}")

    @property
    def anc(self):
        return self.channel.d_in if self.extended else 1

    @property
    def in_dims(self):
        return [self.channel.d_in] * self.N + ([self.channel.d_in] * self.N if self.extended else [])

    @property
    def out_dims(self):
        return [self.channel.d_out] * self.N + ([self.channel.d_in] * self.N if self.extended else [])

    @property
    def in_dim(self):
        return int(np.prod(self.in_dims))

    @property
    def out_dim(self):
        return (self.channel.d_out * self.anc) ** self.N


def _map_factor(x, dims, j, pairs, d_new):
    """Apply ``X -> sum A X B^dag`` on tensor factor ``j`` of the operator ``x``."""
    n = len(dims)
    t = np.moveaxis(x.reshape(dims + dims), [j, n + j], [0, 1])
    rest = t.shape[2:]
    t2 = t.reshape(dims[j], dims[j], -1)
    out = sum(np.einsum("ab,bcz,dc->adz", a, t2, np.conj(b)) for a, b in pairs)
    out = np.moveaxis(out.reshape((d_new, d_new) + rest), [0, 1], [j, n + j])
    new_dims = list(dims)
    new_dims[j] = d_new
    size = int(np.prod(new_dims))
    return out.reshape(size, size), new_dims


def _forward(inst, rho):
    """``(Lambda^N (rho), d/dphi Lambda^N (rho))`` on the probe factors."""
    ch = inst.channel
    fwd = [(k, k) for k in ch.kraus]
    der = [(dk, k) for k, dk in zip(ch.kraus, ch.dkraus)] + [(k, dk) for k, dk in zip(ch.kraus, ch.dkraus)]
    dims = inst.in_dims
    r, dr = rho, np.zeros_like(rho)
    for j in range(inst.N):
        r_new, nd = _map_factor(r, dims, j, fwd, ch.d_out)
        dr_new, _ = _map_factor(dr, dims, j, fwd, ch.d_out)
        dr_new = dr_new + _map_factor(r, dims, j, der, ch.d_out)[0]
        r, dr, dims = r_new, dr_new, nd
    return r, dr


def _adjoint(inst, x, with_derivative=True):
    """Heisenberg-picture maps ``(Lambda^N+ (x), (dLambda^N)+ (x))``."""
    ch = inst.channel
    kd = [dagger(k) for k in ch.kraus]
    dkd = [dagger(k) for k in ch.dkraus]
    adj = list(zip(kd, kd))
    der = list(zip(dkd, kd)) + list(zip(kd, dkd))
    dims = inst.out_dims
    a, da = x, np.zeros_like(x)
    for j in range(inst.N):
        a_new, nd = _map_factor(a, dims, j, adj, ch.d_in)
        if with_derivative:
            da_new, _ = _map_factor(da, dims, j, adj, ch.d_in)
            da = da_new + _map_factor(a, dims, j, der, ch.d_in)[0]
        a, dims = a_new, nd
    return a, da


def output_state(inst, psi_in):
    """N-fold output state and its derivative for the pure input ``psi_in``."""
    psi = np.asarray(psi_in, dtype=complex).reshape(-1)
    if psi.shape[0] != inst.in_dim:
        raise DimensionMismatch(f"input has dimension {psi.shape[0]}, expected {inst.in_dim}")
    rho, drho = _forward(inst, np.outer(psi, psi.conj()))
    return StatePair(0.5 * (rho + dagger(rho)), 0.5 * (drho + dagger(drho)))


def brute_qfi(inst, psi_in):
    return qfi(output_state(inst, psi_in))


def _ascend(inst, psi, step_tol=1e-7, max_iter=5000):
    """Alternate between the SLD of the current output and the best input for it.

    For fixed Hermitian ``L`` the QFI satisfies
    ``F(psi) >= <psi| 2 dLambda+(L) - Lambda+(L^2) |psi>`` with equality at the
    SLD, so no step decreases ``F``.  Stops once the input moves by less
    than ``step_tol`` (up to a global phase).
    """
    val = brute_qfi(inst, psi)
    it = 0
    for it in range(1, max_iter + 1):
        lop = sld(output_state(inst, psi))
        _, d_l = _adjoint(inst, lop)
        l2, _ = _adjoint(inst, lop @ lop, with_derivative=False)
        _, v = herm_eig(0.5 * (2 * d_l - l2 + dagger(2 * d_l - l2)))
        new_psi = v[:, -1]
        ov = np.vdot(psi, new_psi)
        if abs(ov) > 0:
            new_psi = new_psi * (abs(ov) / ov)
        new_val = brute_qfi(inst, new_psi)
        if new_val < val:
            break
        step = np.linalg.norm(new_psi - psi)
        psi, val = new_psi, new_val
        if step <= step_tol:
            break
    return psi, val, it


def optimize_input(inst, restarts=32, seed=0):
    """Best output QFI found from ``restarts`` random starting inputs.

    Returns ``(psi_opt, value)``; the value is a certified lower bound on
    the true maximum.
    """
    rng = np.random.default_rng(seed)
    best_psi, best = None, -np.inf
    for _ in range(restarts):
        z = rng.normal(size=inst.in_dim) + 1j * rng.normal(size=inst.in_dim)
        psi, val, _ = _ascend(inst, z / np.linalg.norm(z))
        if val > best:
            best_psi, best = psi, val
    return best_psi, float(best)


def seesaw_maximise(ch, restarts=16, seed=0):
    """Single-use channel QFI maximised over inputs; see :func:`optimize_input`."""
    return optimize_input(NChannelInstance(ch, 1), restarts=restarts, seed=seed)


def ghz_state(N, d=2):
    """``(|0...0> + |d-1...d-1>) / sqrt(2)`` on N probes of dimension ``d``."""
    psi = np.zeros(d**N, dtype=complex)
    psi[0] = psi[-1] = 1 / np.sqrt(2)
    return psi


# for loss every particle is a qubit (which arm), so a N00N state is a GHZ state
noon_state = ghz_state


def product_state(psi, N):
    out = np.ones(1, dtype=complex)
    for _ in range(N):
        out = np.kron(out, psi)
    return out


def maximally_entangled(d):
    """``sum_i |i>|i> / sqrt(d)`` with the probe first and the ancilla second."""
    return np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)


def extend_input(psi_probes, N, d, anc_state=None):
    """Attach ancillas to a probe input, keeping the probes-then-ancillas order."""
    anc = np.zeros(d, dtype=complex) if anc_state is None else np.asarray(anc_state, dtype=complex)
    if anc_state is None:
        anc[0] = 1
    return np.kron(np.asarray(psi_probes, dtype=complex), product_state(anc, N))


def ghz_qfi(N, eta):
    """QFI of a GHZ input under N dephasing channels, ``eta^(2N) N^2``."""
    if N < 1 or not 0 <= eta <= 1:
        raise ValueError("need N >= 1 and 0 <= eta <= 1")
    return eta ** (2 * N) * N * N


def noon_qfi(N, eta):
    """QFI of a N00N input under loss, ``eta^N N^2``."""
    if N < 1 or not 0 <= eta <= 1:
        raise ValueError("need N >= 1 and 0 <= eta <= 1")
    return eta**N * N * N
