"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.  The
bipartite index convention is fixed everywhere: for a space A (x) B the
composite index is ``a * dB + b``, which is what ``numpy.kron`` produces.
"""
import numpy as np

from .errors import DimensionMismatch, NegativeEigenvalue, NonHermitianInput

HERM_TOL = 1e-12
PSD_TOL = 1e-9


def as_cmatrix(m):
    """Return ``m`` as a 2-D complex array (no copy when already suitable)."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {a.shape}")
    return a


def dagger(m):
    return np.conj(np.swapaxes(m, -1, -2))


def op_norm(m):
    """Largest singular value of ``m`` (0 for an empty or zero matrix)."""
    a = np.asarray(m, dtype=complex)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def hermiticity_error(m):
    a = as_cmatrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"matrix is not square: {a.shape}")
    return float(np.max(np.abs(a - dagger(a)), initial=0.0))


def is_hermitian(m, tol=HERM_TOL):
    a = as_cmatrix(m)
    return hermiticity_error(a) <= tol * (1.0 + op_norm(a))


def check_hermitian(m, tol=HERM_TOL):
    a = as_cmatrix(m)
    err = hermiticity_error(a)
    if err > tol * (1.0 + op_norm(a)):
        raise NonHermitianInput(f"max |M - M^dagger| = {err:.3e}")
    return a


def herm_eig(m):
    """Eigen-decomposition of a Hermitian matrix.

    Returns
    -------
    w : ndarray
        Eigenvalues in ascending order.
    v : ndarray
        Unitary matrix whose columns are the matching eigenvectors, so that
        ``m == v @ diag(w) @ v^dagger``.

    Raises
    ------
    NonHermitianInput
        If ``m`` is not Hermitian within ``1e-12 * (1 + ||m||)``.
    """
    a = check_hermitian(m)
    # symmetrise so that round-off asymmetry never leaks into the spectrum
    w, v = np.linalg.eigh(0.5 * (a + dagger(a)))
    return w, v


def pinv_on_support(m, cutoff=1e-10):
    """Inverse of a PSD matrix restricted to its support.

    Eigen-directions with eigenvalue ``<= cutoff * lambda_max`` are treated as
    the null space and mapped to zero.
    """
    if cutoff <= 0:
        raise ValueError("cutoff must be positive")
    w, v = herm_eig(m)
    lmax = max(float(w[-1]), 0.0) if w.size else 0.0
    if w.size and w[0] < -PSD_TOL * max(lmax, 1e-300):
        raise NegativeEigenvalue(f"min eigenvalue {w[0]:.3e} (max {lmax:.3e})")
    keep = w > cutoff * lmax
    inv = np.zeros_like(w)
    inv[keep] = 1.0 / w[keep]
    return (v * inv) @ dagger(v)


def support_projector(m, cutoff=1e-10):
    """Projector onto the span of eigenvectors with eigenvalue > cutoff * lambda_max."""
    w, v = herm_eig(m)
    lmax = max(float(w[-1]), 0.0) if w.size else 0.0
    vs = v[:, w > cutoff * lmax]
    return vs @ dagger(vs)


def partial_trace(m, dims, keep):
    """Trace out one factor of a bipartite operator.

    Parameters
    ----------
    m : (dA*dB, dA*dB) array
    dims : (dA, dB)
    keep : {"A", "B"}
        The factor that survives.
    """
    a = as_cmatrix(m)
    da, db = (int(d) for d in dims)
    if a.shape != (da * db, da * db):
        raise DimensionMismatch(f"shape {a.shape} incompatible with dims {dims}")
    t = a.reshape(da, db, da, db)
    if keep in ("A", "a", 0):
        return np.einsum("ibjb->ij", t)
    if keep in ("B", "b", 1):
        return np.einsum("aiaj->ij", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def kron(a, b):
    return np.kron(as_cmatrix(a), as_cmatrix(b))


def kron_all(mats):
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def min_eig(m):
    """Smallest eigenvalue of a Hermitian matrix (no Hermiticity check)."""
    a = np.asarray(m, dtype=complex)
    return float(np.linalg.eigvalsh(0.5 * (a + dagger(a)))[0])


def random_hermitian(d, rng, scale=1.0):
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * 0.5 * (x + dagger(x))


def random_unitary(d, rng):
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_unit_vector(d, rng):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)
