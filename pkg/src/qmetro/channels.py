"""Parameterised quantum channels stored at a single parameter point.

A channel is kept as its Kraus operators ``K_i`` together with their
derivatives ``dK_i`` with respect to the estimated parameter.  All the
bounds in this package are local, so nothing else is needed.

Vectorisation follows ``|K> = (K (x) I)|I>`` with ``|I> = sum_i |i>|i>``,
i.e. ``|K>`` is ``K.ravel()`` in row-major order and the output factor comes
first in every Choi matrix.
"""
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import BadParameter, DimensionMismatch, ParameterMismatch, ParseError
from .matkit import (
    IDENTITY_2,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    dagger,
    is_hermitian,
    op_norm,
)

KINDS = ("dephasing", "depolarization", "loss", "spontaneous_emission")
PARAMS = ("phase", "strength", "frequency")

CPTP_TOL = 1e-10
INDEPENDENCE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ParamChannel:
    """Kraus operators and their parameter derivatives at one point.

    ``kind`` names the catalog family the channel came from (``None`` for
    user-supplied channels); only reporting code looks at it.
    """

    d_in: int
    d_out: int
    kraus: tuple
    dkraus: tuple
    param: str = "phase"
    param_value: float = 0.0
    noise_value: float = float("nan")
    kind: str = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        kraus = tuple(np.array(k, dtype=complex) for k in self.kraus)
        dkraus = tuple(np.array(k, dtype=complex) for k in self.dkraus)
        if len(kraus) == 0 or len(kraus) != len(dkraus):
            raise DimensionMismatch("kraus and dkraus must be non-empty and equally long")
        shape = (self.d_out, self.d_in)
        for k in kraus + dkraus:
            if k.shape != shape:
                raise DimensionMismatch(f"Kraus operator of shape {k.shape}, expected {shape}")
            k.setflags(write=False)
        if self.param not in PARAMS:
            raise BadParameter(f"unknown parameter tag {self.param!r}")
        object.__setattr__(self, "kraus", kraus)
        object.__setattr__(self, "dkraus", dkraus)

    @property
    def r(self):
        return len(self.kraus)

    def stacked(self):
        """Kraus operators stacked into a ``(r*d_out, d_in)`` isometry and its derivative."""
        return np.vstack(self.kraus), np.vstack(self.dkraus)

    def apply(self, rho):
        rho = np.asarray(rho, dtype=complex)
        return sum(k @ rho @ dagger(k) for k in self.kraus)

    def apply_derivative(self, rho):
        rho = np.asarray(rho, dtype=complex)
        out = sum(dk @ rho @ dagger(k) for k, dk in zip(self.kraus, self.dkraus))
        return out + dagger(out)


@dataclass(frozen=True, eq=False)
class ChoiPair:
    omega: np.ndarray
    domega: np.ndarray
    d_in: int
    d_out: int


def gram(kraus):
    """Gram matrix ``G_ij = Tr(K_i^dagger K_j)``."""
    v = np.array([k.ravel() for k in kraus])
    return np.conj(v) @ v.T


def validate(ch):
    """List every violated channel invariant (empty when the channel is valid)."""
    problems = []
    eye = np.eye(ch.d_in)
    s = sum(dagger(k) @ k for k in ch.kraus)
    err = op_norm(s - eye)
    if err > CPTP_TOL:
        problems.append(f"CPTP: ||sum K^dag K - I|| = {err:.3e}")
    ds = sum(dagger(dk) @ k + dagger(k) @ dk for k, dk in zip(ch.kraus, ch.dkraus))
    err = op_norm(ds)
    if err > CPTP_TOL:
        problems.append(f"derivative consistency: ||sum(dK^dag K + K^dag dK)|| = {err:.3e}")
    g = np.linalg.eigvalsh(gram(ch.kraus))
    if g[0] <= INDEPENDENCE_TOL * max(g[-1], 1e-300):
        problems.append(f"Kraus operators linearly dependent: Gram eigenvalues {g[0]:.3e} .. {g[-1]:.3e}")
    return problems


def compress(ch, tol=INDEPENDENCE_TOL):
    """Drop null Gram directions so the Kraus operators become linearly independent.

    The retained operators ``L_a = sum_i V_ia K_i`` come from the Gram
    eigenbasis ``V``; the channel map is unchanged.
    """
    g, v = np.linalg.eigh(gram(ch.kraus))
    keep = g > tol * max(g[-1], 1e-300)
    if keep.all():
        return ch
    k = np.array(ch.kraus)
    dk = np.array(ch.dkraus)
    vk = v[:, keep]
    new_k = np.einsum("ia,ijk->ajk", vk, k)
    new_dk = np.einsum("ia,ijk->ajk", vk, dk)
    return replace(ch, kraus=tuple(new_k), dkraus=tuple(new_dk))


def choi(ch):
    """Choi matrix ``sum |K_i><K_i|`` and its derivative."""
    vk = np.array([k.ravel() for k in ch.kraus])
    vdk = np.array([k.ravel() for k in ch.dkraus])
    omega = vk.T @ np.conj(vk)
    cross = vdk.T @ np.conj(vk)
    return ChoiPair(omega=omega, domega=cross + dagger(cross), d_in=ch.d_in, d_out=ch.d_out)


def rotate_local(ch, h):
    """Locally rotate the Kraus representation: ``dK_i -> dK_i - i sum_j h_ij K_j``."""
    h = np.asarray(h, dtype=complex)
    if h.shape != (ch.r, ch.r):
        raise DimensionMismatch(f"generator must be {ch.r}x{ch.r}, got {h.shape}")
    if not is_hermitian(h):
        raise ValueError("rotation generator must be Hermitian")
    k = np.array(ch.kraus)
    dk = np.array(ch.dkraus) - 1j * np.einsum("ij,jab->iab", h, k)
    return replace(ch, dkraus=tuple(dk))


def mix_kraus(ch, u):
    """Apply a parameter-independent unitary mixing ``K_i -> sum_j u_ij K_j``."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (ch.r, ch.r):
        raise DimensionMismatch(f"mixing matrix must be {ch.r}x{ch.r}")
    k = np.einsum("ij,jab->iab", u, np.array(ch.kraus))
    dk = np.einsum("ij,jab->iab", u, np.array(ch.dkraus))
    return replace(ch, kraus=tuple(k), dkraus=tuple(dk))


def tensor(ch1, ch2):
    """Two channels used in parallel, with product-rule derivatives."""
    if ch1.param != ch2.param or not math.isclose(ch1.param_value, ch2.param_value, abs_tol=1e-15):
        raise ParameterMismatch(
            f"cannot tensor {ch1.param}={ch1.param_value} with {ch2.param}={ch2.param_value}"
        )
    kraus, dkraus = [], []
    for k1, dk1 in zip(ch1.kraus, ch1.dkraus):
        for k2, dk2 in zip(ch2.kraus, ch2.dkraus):
            kraus.append(np.kron(k1, k2))
            dkraus.append(np.kron(dk1, k2) + np.kron(k1, dk2))
    kind = ch1.kind if ch1.kind == ch2.kind else None
    return ParamChannel(
        d_in=ch1.d_in * ch2.d_in,
        d_out=ch1.d_out * ch2.d_out,
        kraus=kraus,
        dkraus=dkraus,
        param=ch1.param,
        param_value=ch1.param_value,
        kind=None if kind is None else f"{kind}^2",
    )


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------


def _noise_kraus(kind, eta):
    """Noise Kraus operators D_i(eta) and dD_i/deta."""
    if kind == "dephasing":
        a, b = math.sqrt((1 + eta) / 2), math.sqrt((1 - eta) / 2)
        ks = [a * IDENTITY_2, b * PAULI_Z]
        dks = [IDENTITY_2 / (4 * a), -PAULI_Z / (4 * b)]
    elif kind == "depolarization":
        a, b = math.sqrt((1 + 3 * eta) / 4), math.sqrt((1 - eta) / 4)
        ks = [a * IDENTITY_2] + [b * s for s in (PAULI_X, PAULI_Y, PAULI_Z)]
        dks = [3 * IDENTITY_2 / (8 * a)] + [-s / (8 * b) for s in (PAULI_X, PAULI_Y, PAULI_Z)]
    elif kind == "loss":
        # output basis: |0>, |1>, |vac>
        a, b = math.sqrt(eta), math.sqrt(1 - eta)
        e_vac1 = np.zeros((3, 2), dtype=complex)
        e_vac1[2, 1] = 1
        e_vac0 = np.zeros((3, 2), dtype=complex)
        e_vac0[2, 0] = 1
        emb = np.zeros((3, 2), dtype=complex)
        emb[0, 0] = emb[1, 1] = 1
        ks = [b * e_vac1, b * e_vac0, a * emb]
        dks = [-e_vac1 / (2 * b), -e_vac0 / (2 * b), emb / (2 * a) if a > 0 else np.full((3, 2), np.nan)]
    elif kind == "spontaneous_emission":
        a, b = math.sqrt(eta), math.sqrt(1 - eta)
        ks = [np.diag([1.0, a]).astype(complex), np.array([[0, b], [0, 0]], dtype=complex)]
        da = 1 / (2 * a) if a > 0 else np.nan
        dks = [np.diag([0.0, da]).astype(complex), np.array([[0, -1 / (2 * b)], [0, 0]], dtype=complex)]
    else:
        raise BadParameter(f"unknown channel kind {kind!r}; expected one of {KINDS}")
    return ks, dks


def phase_unitary(phi):
    """``exp(i sigma_z phi / 2)``."""
    return np.diag([np.exp(0.5j * phi), np.exp(-0.5j * phi)])


def catalog(kind, param="phase", phi=0.0, eta=0.9):
    """One of the four built-in noise families at a parameter point.

    The channel is the noise map applied after the phase rotation,
    ``rho -> D_eta[U_phi rho U_phi^dagger]``, so its Kraus operators are
    ``D_i(eta) U_phi``.  With ``param="phase"`` the derivative is taken with
    respect to ``phi``; with ``param="strength"`` with respect to ``eta``.
    """
    kind = kind.replace("-", "_")
    if kind not in KINDS:
        raise BadParameter(f"unknown channel kind {kind!r}; expected one of {KINDS}")
    if param not in ("phase", "strength"):
        raise BadParameter(f"catalog channels support param 'phase' or 'strength', not {param!r}")
    eta = float(eta)
    if not 0.0 <= eta < 1.0:
        raise BadParameter(f"eta must lie in [0, 1), got {eta}")
    if param == "strength" and eta == 0.0 and kind in ("loss", "spontaneous_emission"):
        raise BadParameter(f"{kind} strength derivative diverges at eta = 0")
    ds, dds = _noise_kraus(kind, eta)
    u = phase_unitary(phi)
    gen = 0.5j * PAULI_Z
    kraus = [d @ u for d in ds]
    if param == "phase":
        dkraus = [k @ gen for k in kraus]
        value = float(phi)
    else:
        dkraus = [dd @ u for dd in dds]
        value = eta
    ch = ParamChannel(
        d_in=2,
        d_out=kraus[0].shape[0],
        kraus=kraus,
        dkraus=dkraus,
        param=param,
        param_value=value,
        noise_value=eta,
        kind=kind,
    )
    return compress(ch)


def eta_of_t(kind, gamma, t):
    """Noise parameter after evolving for time ``t`` under the family's Liouvillian."""
    kind = kind.replace("-", "_")
    if gamma <= 0 or t < 0:
        raise BadParameter(f"need gamma > 0 and t >= 0, got gamma={gamma}, t={t}")
    if kind in ("dephasing", "loss", "spontaneous_emission"):
        return math.exp(-gamma * t)
    if kind == "depolarization":
        return math.exp(-2.0 * gamma * t / 3.0)
    raise BadParameter(f"unknown channel kind {kind!r}")


def from_sampled(kraus_fn, x, step=1e-5, param="phase", **kwargs):
    """Build a channel from a function returning Kraus operators at parameter ``x``.

    Derivatives come from a central difference with the given step.  The
    function must return a representation that varies smoothly with ``x``;
    linearly dependent Kraus sets are compressed afterwards.
    """
    k0 = [np.asarray(k, dtype=complex) for k in kraus_fn(x)]
    kp = [np.asarray(k, dtype=complex) for k in kraus_fn(x + step)]
    km = [np.asarray(k, dtype=complex) for k in kraus_fn(x - step)]
    dk = [(a - b) / (2 * step) for a, b in zip(kp, km)]
    d_out, d_in = k0[0].shape
    ch = ParamChannel(d_in=d_in, d_out=d_out, kraus=k0, dkraus=dk, param=param, param_value=float(x), **kwargs)
    return compress(ch)


# ---------------------------------------------------------------------------
# Random channels (test fixtures and property checks)
# ---------------------------------------------------------------------------


def random_channel(d_in, d_out, r, rng, family="isometry"):
    """Random channel with consistent derivatives.

    ``family="isometry"``: a random Stinespring isometry ``V`` moved by a
    random Hermitian generator, ``dV = i H V``.  Full Choi rank when
    ``r == d_in * d_out``, generically phi-extremal otherwise.

    ``family="mixture"``: a random-unitary channel ``sum p_i U_i . U_i^dagger``
    whose weights depend on the parameter; phi-non-extremal for every ``r``.
    """
    if family == "isometry":
        if r * d_out < d_in:
            raise BadParameter("need r * d_out >= d_in for an isometry")
        z = rng.normal(size=(r * d_out, d_in)) + 1j * rng.normal(size=(r * d_out, d_in))
        v, _ = np.linalg.qr(z)
        hz = rng.normal(size=(r * d_out, r * d_out)) + 1j * rng.normal(size=(r * d_out, r * d_out))
        h = 0.5 * (hz + dagger(hz))
        dv = 1j * h @ v
        kraus = [v[i * d_out:(i + 1) * d_out] for i in range(r)]
        dkraus = [dv[i * d_out:(i + 1) * d_out] for i in range(r)]
    elif family == "mixture":
        if d_in != d_out:
            raise BadParameter("mixture family needs d_in == d_out")
        from .matkit import random_unitary

        p = rng.dirichlet(np.ones(r))
        dp = rng.normal(size=r)
        dp -= dp.mean()
        us = [random_unitary(d_in, rng) for _ in range(r)]
        kraus = [math.sqrt(pi) * u for pi, u in zip(p, us)]
        dkraus = [dpi / (2 * math.sqrt(pi)) * u for pi, dpi, u in zip(p, dp, us)]
    else:
        raise BadParameter(f"unknown random family {family!r}")
    return ParamChannel(d_in=d_in, d_out=d_out, kraus=kraus, dkraus=dkraus, param="phase")


# ---------------------------------------------------------------------------
# Custom channel files
# ---------------------------------------------------------------------------


def _encode(m):
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _decode(rows, shape, what):
    try:
        a = np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{what}: entries must be [re, im] pairs") from exc
    if a.shape != shape:
        raise ParseError(f"{what}: shape {a.shape}, expected {shape}")
    return a


def channel_to_dict(ch):
    d = {
        "d_in": ch.d_in,
        "d_out": ch.d_out,
        "param": ch.param,
        "param_value": ch.param_value,
        "kraus": [_encode(k) for k in ch.kraus],
        "dkraus": [_encode(k) for k in ch.dkraus],
    }
    if not math.isnan(ch.noise_value):
        d["noise_value"] = ch.noise_value
    if ch.kind is not None:
        d["kind"] = ch.kind
    return d


def channel_from_dict(d):
    try:
        d_in, d_out = int(d["d_in"]), int(d["d_out"])
        param = d.get("param", "phase")
        kraus = [_decode(k, (d_out, d_in), f"kraus[{i}]") for i, k in enumerate(d["kraus"])]
        dkraus = [_decode(k, (d_out, d_in), f"dkraus[{i}]") for i, k in enumerate(d["dkraus"])]
    except KeyError as exc:
        raise ParseError(f"missing field {exc.args[0]!r}") from exc
    if param not in PARAMS:
        raise ParseError(f"unknown param tag {param!r}")
    if len(kraus) != len(dkraus):
        raise ParseError("kraus and dkraus lists differ in length")
    return ParamChannel(
        d_in=d_in,
        d_out=d_out,
        kraus=kraus,
        dkraus=dkraus,
        param=param,
        param_value=float(d.get("param_value", 0.0)),
        noise_value=float(d.get("noise_value", float("nan"))),
        kind=d.get("kind"),
    )


def dumps_channel(ch):
    return json.dumps(channel_to_dict(ch), indent=1)


def loads_channel(text):
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not a valid channel document: {exc}") from exc
    return channel_from_dict(d)


def save_channel(ch, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_channel(ch))
        fh.write("\n")


def load_channel(path):
    """Read a channel file; linearly dependent Kraus sets are recompressed."""
    with open(path, encoding="utf-8") as fh:
        ch = loads_channel(fh.read())
    return compress(ch)
