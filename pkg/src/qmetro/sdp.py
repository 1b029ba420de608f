"""Semidefinite programs for minimising over local Kraus rotations.

The decision variables are the ``r**2`` real coordinates of a Hermitian
``r x r`` generator ``h`` followed by two epigraph variables ``lam_a`` and
``lam_b``.  With ``D(h)`` the stacked rotated derivatives
``dK_i - i sum_j h_ij K_j`` and ``beta(h) = i sum dK_i^dag K_i -
sum_ij h_ji K_j^dag K_i`` the program is

    minimise   4 (lam_a + (N - 1) lam_b)
    subject to [[lam_a I, D^dag], [D, I]] >= 0
               [[lam_b I, beta^dag], [beta, I]] >= 0

whose Schur complements are ``alpha = D^dag D <= lam_a I`` and
``beta^dag beta <= lam_b I``.  Problems are solved with cvxopt after the
equality constraints are eliminated and complex blocks are embedded as real
symmetric ones.
"""
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch
from .matkit import dagger

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
MAXITER = "MaxIter"

GAP_TOL = 1e-8
MAX_ITERS = 500


@dataclass(eq=False)
class Block:
    """Affine matrix constraint ``f0 + sum_k x_k f[k] >= 0``.

    ``relax_var`` names a variable that, made large enough, satisfies the
    block for every value of the others; presolve may then drop both.
    """

    f0: np.ndarray
    f: np.ndarray  # shape (n_vars, m, m)
    name: str = ""
    relax_var: int = None

    def value(self, x):
        return self.f0 + np.tensordot(x, self.f, axes=1)


@dataclass
class SdpProblem:
    """``min c.x`` subject to PSD blocks and ``eq_a @ x == eq_b``."""

    c: np.ndarray
    blocks: list
    eq_a: np.ndarray
    eq_b: np.ndarray
    var_names: list = field(default_factory=list)
    offset: float = 0.0

    @property
    def n_vars(self):
        return len(self.c)

    def check(self, tol=1e-12):
        """Raise if a block coefficient is not Hermitian."""
        for blk in self.blocks:
            for m in (blk.f0, *blk.f):
                if np.max(np.abs(m - dagger(m)), initial=0.0) > tol * (1 + np.max(np.abs(m), initial=0.0)):
                    raise ValueError(f"block {blk.name!r} is not Hermitian-affine")
        return self

    def objective(self, x):
        return float(self.c @ x + self.offset)

    def to_json(self):
        """Dense structured-text dump for cross-checking with other solvers."""

        def enc(m):
            return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]

        doc = {
            "format": "qmetro-sdp-1",
            "sense": "minimize c.x + offset s.t. F0 + sum_k x_k F_k >= 0 per block, A x = b",
            "variables": list(self.var_names) or [f"x{k}" for k in range(self.n_vars)],
            "c": [float(v) for v in self.c],
            "offset": float(self.offset),
            "blocks": [
                {"name": b.name, "F0": enc(b.f0), "F": [enc(m) for m in b.f]} for b in self.blocks
            ],
            "A": [[float(v) for v in row] for row in self.eq_a],
            "b": [float(v) for v in self.eq_b],
        }
        return json.dumps(doc)


@dataclass
class SdpSolution:
    x: np.ndarray
    objective: float
    status: str
    gap: float
    diagnostics: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Hermitian parametrisation
# ---------------------------------------------------------------------------


def hermitian_basis(r):
    """Real basis of r x r Hermitian matrices: diagonal units, then Re/Im pairs."""
    basis = []
    for k in range(r):
        e = np.zeros((r, r), dtype=complex)
        e[k, k] = 1
        basis.append(e)
    for k in range(r):
        for l in range(k + 1, r):
            e = np.zeros((r, r), dtype=complex)
            e[k, l] = e[l, k] = 1
            basis.append(e)
            e = np.zeros((r, r), dtype=complex)
            e[k, l], e[l, k] = 1j, -1j
            basis.append(e)
    return np.array(basis)


def h_from_vector(x, r):
    return np.tensordot(np.asarray(x[: r * r], dtype=float), hermitian_basis(r), axes=1)


def h_to_vector(h):
    h = np.asarray(h, dtype=complex)
    r = h.shape[0]
    out = [h[k, k].real for k in range(r)]
    for k in range(r):
        for l in range(k + 1, r):
            out += [h[k, l].real, h[k, l].imag]
    return np.array(out)


# ---------------------------------------------------------------------------
# Affine pieces of alpha and beta
# ---------------------------------------------------------------------------


def rotated_derivative_affine(ch):
    """``D(h) = D0 + sum_m x_m D_m`` for the stacked rotated derivatives."""
    r = ch.r
    k = np.array(ch.kraus)
    basis = hermitian_basis(r)
    d0 = np.vstack(ch.dkraus)
    dm = np.array([np.vstack(-1j * np.einsum("ij,jab->iab", e, k)) for e in basis])
    return d0, dm


def beta_affine(ch):
    """``beta(h) = b0 + sum_m x_m B_m``."""
    k = np.array(ch.kraus)
    dk = np.array(ch.dkraus)
    b0 = 1j * np.einsum("iba,ibc->ac", np.conj(dk), k)
    # kk[j, i] = K_j^dag K_i
    kk = np.einsum("jba,ibc->jiac", np.conj(k), k)
    bm = np.array([-np.einsum("ji,jiac->ac", e, kk) for e in hermitian_basis(ch.r)])
    return b0, bm


def alpha_of(ch, h):
    """``alpha = sum_i dK~_i^dag dK~_i`` for the representation rotated by ``h``."""
    d0, dm = rotated_derivative_affine(ch)
    d = d0 + np.tensordot(h_to_vector(h), dm, axes=1)
    return dagger(d) @ d


def beta_of(ch, h):
    b0, bm = beta_affine(ch)
    return b0 + np.tensordot(h_to_vector(h), bm, axes=1)


def _schur_block(top_coeff, x0, xm, lower_dim, n_vars, lam_index, name, relax=False):
    """Block ``[[lam T, X^dag], [X, I]]`` with ``X = x0 + sum_m y_m xm[m]``."""
    t = top_coeff.shape[0]
    size = t + lower_dim
    f0 = np.zeros((size, size), dtype=complex)
    f0[t:, :t] = x0
    f0[:t, t:] = dagger(x0)
    f0[t:, t:] = np.eye(lower_dim)
    f = np.zeros((n_vars, size, size), dtype=complex)
    for m in range(xm.shape[0]):
        f[m, t:, :t] = xm[m]
        f[m, :t, t:] = dagger(xm[m])
    f[lam_index, :t, :t] = top_coeff
    return Block(f0=f0, f=f, name=name, relax_var=lam_index if relax else None)


def build_ce_sdp(ch, N=1, enforce_beta_zero=False, weight=None):
    """Assemble the rotation-minimisation program for ``ch``.

    Parameters
    ----------
    ch : ParamChannel
    N : int
        Number of channel uses; the ``beta`` term is weighted by ``N - 1``.
    enforce_beta_zero : bool
        Replace the ``beta`` block by the linear constraint ``beta(h) = 0``.
    weight : array_like, optional
        Input vector ``psi``.  The ``alpha`` block then only bounds
        ``<psi|alpha|psi>``; requires ``N == 1`` and no ``beta`` constraint.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    r, d_in = ch.r, ch.d_in
    n_h = r * r
    n = n_h + 2
    ia, ib = n_h, n_h + 1
    names = [f"h{m}" for m in range(n_h)] + ["lam_a", "lam_b"]
    d0, dm = rotated_derivative_affine(ch)
    c = np.zeros(n)
    c[ia] = 4.0

    if weight is not None:
        if N != 1 or enforce_beta_zero:
            raise ValueError("a weighted problem needs N == 1 and no beta constraint")
        psi = np.asarray(weight, dtype=complex).reshape(-1)
        if psi.shape[0] != d_in:
            raise DimensionMismatch(f"weight has length {psi.shape[0]}, expected {d_in}")
        x0 = (d0 @ psi)[:, None]
        xm = (dm @ psi)[:, :, None]
        blk_a = _schur_block(np.ones((1, 1)), x0, xm, r * ch.d_out, n, ia, "alpha_weighted")
    else:
        blk_a = _schur_block(np.eye(d_in), d0, dm, r * ch.d_out, n, ia, "alpha")
    blocks = [blk_a]

    b0, bm = beta_affine(ch)
    if enforce_beta_zero:
        # beta is Hermitian: keep diagonal reals and upper-triangle Re/Im parts
        rows, rhs = [], []
        for p in range(d_in):
            for q in range(p, d_in):
                parts = [np.real] if p == q else [np.real, np.imag]
                for part in parts:
                    rows.append(np.concatenate([part(bm[:, p, q]), [0.0, 0.0]]))
                    rhs.append(-part(b0[p, q]))
        eq_a, eq_b = np.array(rows), np.array(rhs)
    else:
        c[ib] = 4.0 * (N - 1)
        blocks.append(_schur_block(np.eye(d_in), b0, bm, d_in, n, ib, "beta", relax=True))
        eq_a, eq_b = np.zeros((0, n)), np.zeros(0)

    return SdpProblem(c=c, blocks=blocks, eq_a=eq_a, eq_b=eq_b, var_names=names).check()


# ---------------------------------------------------------------------------
# Solving
# ---------------------------------------------------------------------------


def embed_real(p):
    """Replace every complex block ``X`` by ``[[Re X, -Im X], [Im X, Re X]]``."""

    def emb(m):
        re, im = np.real(m), np.imag(m)
        top = np.concatenate([re, -im], axis=-1)
        bot = np.concatenate([im, re], axis=-1)
        return np.concatenate([top, bot], axis=-2)

    blocks = [Block(f0=emb(b.f0), f=emb(b.f), name=b.name, relax_var=b.relax_var) for b in p.blocks]
    return SdpProblem(c=p.c, blocks=blocks, eq_a=p.eq_a, eq_b=p.eq_b, var_names=p.var_names, offset=p.offset)


def _presolve(p):
    """Drop redundant variables and eliminate equalities.

    Returns ``(reduced problem, lift, residual)`` where ``lift(y)`` maps the
    reduced variables back to the original ones.  ``reduced`` is ``None``
    when the equalities are inconsistent.
    """
    n = p.n_vars
    blocks = list(p.blocks)
    used_eq = np.any(p.eq_a != 0, axis=0) if p.eq_a.size else np.zeros(n, bool)

    # a zero-cost relaxation variable can be taken arbitrarily large
    for blk in list(blocks):
        v = blk.relax_var
        if v is None or p.c[v] != 0 or used_eq[v]:
            continue
        if sum(np.any(b.f[v] != 0) for b in blocks) == 1:
            blocks.remove(blk)

    in_blocks = np.zeros(n, bool)
    for b in blocks:
        in_blocks |= np.any(b.f.reshape(n, -1) != 0, axis=1)
    active = in_blocks | used_eq
    dead = ~active & (p.c != 0)
    if np.any(dead):
        raise ValueError(f"unbounded: variables {np.flatnonzero(dead)} have cost but no constraint")
    idx = np.flatnonzero(active)

    a = p.eq_a[:, idx] if p.eq_a.size else np.zeros((0, len(idx)))
    b = p.eq_b
    if a.shape[0]:
        x0, *_ = np.linalg.lstsq(a, b, rcond=None)
        scale = 1.0 + np.max(np.abs(b), initial=0.0)
        residual = float(np.linalg.norm(a @ x0 - b)) / scale
        if residual > 1e-8:
            return None, None, residual
        u, s, vt = np.linalg.svd(a)
        rank = int(np.sum(s > 1e-10 * max(s[0], 1e-300))) if s.size else 0
        z = vt[rank:].T
    else:
        x0 = np.zeros(len(idx))
        z = np.eye(len(idx))
        residual = 0.0

    def lift(y):
        x = np.zeros(n)
        x[idx] = x0 + z @ y
        return x

    c_act = p.c[idx]
    f0s = [blk.f0 + np.tensordot(x0, blk.f[idx], axes=1) for blk in blocks]
    fzs = [np.tensordot(z.T, blk.f[idx], axes=1) for blk in blocks]

    # directions that move no block leave the problem unchanged; keeping
    # them gives an unbounded optimal face, which stalls interior points
    if z.shape[1] and blocks:
        coeff = np.concatenate([f.reshape(z.shape[1], -1) for f in fzs], axis=1)
        coeff = np.concatenate([coeff.real, coeff.imag], axis=1)
        u, s, _ = np.linalg.svd(coeff, full_matrices=True)
        rank = int(np.sum(s > 1e-10 * max(s[0], 1e-300))) if s.size else 0
        w, free = u[:, :rank], u[:, rank:]
        c_z = z.T @ c_act
        if free.shape[1] and np.linalg.norm(free.T @ c_z) > 1e-12 * (1 + np.linalg.norm(c_z)):
            raise ValueError("unbounded: cost along a direction no constraint sees")
        z = z @ w
        fzs = [np.tensordot(w.T, f, axes=1) for f in fzs]

    new_blocks = [Block(f0=f0, f=fz, name=blk.name) for f0, fz, blk in zip(f0s, fzs, blocks)]
    red = SdpProblem(
        c=z.T @ c_act,
        blocks=new_blocks,
        eq_a=np.zeros((0, z.shape[1])),
        eq_b=np.zeros(0),
        offset=p.offset + float(c_act @ x0),
    )
    dropped = [blk for blk in p.blocks if all(blk is not b for b in blocks)]

    def lift_full(y):
        x = lift(y)
        for blk in dropped:
            x[blk.relax_var] = _relax_value(blk, x)
        return x

    return red, lift_full, residual


def _relax_value(blk, x):
    """Smallest relaxation variable making a Schur block ``[[lam I, X^dag], [X, I]]`` PSD."""
    v = blk.relax_var
    x = x.copy()
    x[v] = 0.0
    t = int(np.count_nonzero(np.diag(blk.f[v])))
    lower = blk.value(x)[t:, :t]
    return float(np.linalg.norm(lower, 2) ** 2) if lower.size else 0.0


def _min_block_eig(p, x):
    vals = [np.linalg.eigvalsh(0.5 * (m + dagger(m)))[0] for m in (b.value(x) for b in p.blocks)]
    return float(min(vals)) if vals else 0.0


def solve(p, tol=1e-10, max_iters=MAX_ITERS):
    """Solve ``p``; failures are reported through ``status``, never raised."""
    from cvxopt import matrix, solvers

    red, lift, residual = _presolve(p)
    if red is None:
        return SdpSolution(
            x=np.full(p.n_vars, np.nan),
            objective=float("nan"),
            status=INFEASIBLE,
            gap=float("nan"),
            diagnostics={"equality_residual": residual},
        )
    m = red.n_vars
    if m == 0:
        x = lift(np.zeros(0))
        ok = _min_block_eig(p, x) >= -1e-8
        return SdpSolution(
            x=x,
            objective=p.objective(x),
            status=OPTIMAL if ok else INFEASIBLE,
            gap=0.0,
            diagnostics={"equality_residual": residual, "min_block_eig": _min_block_eig(p, x)},
        )
    real = embed_real(red)
    gs, hs = [], []
    for blk in real.blocks:
        # cvxopt wants h - G x >= 0 with columns in column-major order
        g = np.ascontiguousarray(np.transpose(-blk.f, (0, 2, 1)).reshape(m, -1).T)
        gs.append(matrix(g))
        hs.append(matrix(np.ascontiguousarray(blk.f0)))
    sol, used_tol = None, tol
    # tight tolerances occasionally break cvxopt's scaling update; back off
    for used_tol in (tol, 10 * tol, 100 * tol):
        opts = {
            "show_progress": False,
            "abstol": used_tol,
            "reltol": used_tol,
            "feastol": used_tol,
            "maxiters": max_iters,
        }
        try:
            sol = solvers.sdp(matrix(red.c.astype(float)), Gs=gs, hs=hs, options=opts)
        except (ArithmeticError, ValueError):
            continue
        if sol["status"] == "optimal":
            break
    if sol is None:
        return SdpSolution(
            x=np.full(p.n_vars, np.nan), objective=float("nan"), status=MAXITER,
            gap=float("nan"), diagnostics={"solver_status": "exception"},
        )
    st = sol["status"]
    diag = {
        "solver_status": st,
        "iterations": sol.get("iterations"),
        "equality_residual": residual,
        "tolerance": used_tol,
    }
    if sol["x"] is None:
        return SdpSolution(
            x=np.full(p.n_vars, np.nan), objective=float("nan"), status=INFEASIBLE if "infeasible" in st else MAXITER,
            gap=float("nan"), diagnostics=diag,
        )
    y = np.array(sol["x"]).reshape(-1)
    x = lift(y)
    obj = p.objective(x)
    gap = sol.get("gap")
    gap = float("nan") if gap is None else abs(float(gap)) / (1.0 + abs(obj))
    mineig = _min_block_eig(p, x)
    diag["min_block_eig"] = mineig
    if st == "optimal" or (st == "unknown" and gap <= GAP_TOL and mineig >= -1e-8):
        status = OPTIMAL
    elif "infeasible" in st:
        status = INFEASIBLE
    else:
        status = MAXITER
    return SdpSolution(x=x, objective=obj, status=status, gap=gap, diagnostics=diag)
