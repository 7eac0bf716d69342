"""Dense complex linear algebra: Hermitian eigendecompositions with eigenvalue
clustering, matrix functions, resolvents, and Schatten norms.

Everything here is a pure function of immutable inputs; matrices are plain
complex numpy arrays, optionally wrapped in :class:`HermitianMatrix` which
symmetrizes on construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "HermitianMatrix",
    "SpectralDecomposition",
    "EigensolverError",
    "hermitian_part",
    "as_matrix",
    "eigendecompose",
    "matrix_function",
    "resolvent",
    "schatten_norm",
    "operator_norm",
    "random_hermitian",
    "random_complex",
]

DEFAULT_CLUSTER_TOL_FACTOR = 1e-8  # times ||H||_inf, see eigendecompose


class EigensolverError(RuntimeError):
    """Raised when the dense Hermitian eigensolver fails to converge."""


def hermitian_part(a: np.ndarray) -> np.ndarray:
    """Return (A + A*)/2."""
    a = np.asarray(a, dtype=complex)
    return (a + a.conj().T) / 2.0


def as_matrix(h) -> np.ndarray:
    """Coerce a HermitianMatrix / SpectralDecomposition / array to an ndarray."""
    if isinstance(h, HermitianMatrix):
        return h.mat
    if isinstance(h, SpectralDecomposition):
        return h.matrix()
    return np.asarray(h, dtype=complex)


@dataclass(frozen=True)
class HermitianMatrix:
    """A dim x dim complex matrix symmetrized to exact Hermitianity on construction.

    Construction rejects inputs whose anti-Hermitian part exceeds
    1e-12 * max|entry| (tolerance) instead of silently symmetrizing garbage.
    """

    mat: np.ndarray

    def __init__(self, entries, check_tol: float = 1e-12):
        a = np.asarray(entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        scale = max(np.max(np.abs(a)), 1.0) if a.size else 1.0
        skew = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
        if skew > check_tol * scale * 2.0:
            raise ValueError(
                f"matrix is not Hermitian: anti-Hermitian part {skew:.3e} "
                f"exceeds {check_tol:.1e} * scale {scale:.3e}"
            )
        object.__setattr__(self, "mat", hermitian_part(a))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def __add__(self, other):
        return HermitianMatrix(self.mat + as_matrix(other))

    def __sub__(self, other):
        return HermitianMatrix(self.mat - as_matrix(other))

    def __mul__(self, scalar: float):
        return HermitianMatrix(self.mat * float(scalar))

    __rmul__ = __mul__


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigen-structure of a Hermitian matrix with eigenvalue clustering.

    Attributes:
        eigenvalues: ascending real eigenvalues, one per eigenvector.
        vectors: unitary matrix, column j is the eigenvector of eigenvalues[j].
        clusters: list of index arrays; eigenvalues within tau_cluster of each
            other (transitive closure over the sorted sequence) share a cluster.
        rep_values: per-eigenindex cluster representative (cluster mean), so
            indices in one cluster carry *exactly equal* float values.
        tau_cluster: the clustering tolerance that was applied.
        source_norm: operator norm of the decomposed matrix (scale reference).
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    clusters: list = field(repr=False)
    rep_values: np.ndarray = field(repr=False)
    tau_cluster: float = 0.0
    source_norm: float = 0.0

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def matrix(self) -> np.ndarray:
        """Reconstruct the source matrix V diag(w) V*."""
        return (self.vectors * self.eigenvalues) @ self.vectors.conj().T

    def cluster_values(self) -> np.ndarray:
        """Representative value of each cluster, ascending."""
        return np.array([self.rep_values[idx[0]] for idx in self.clusters])

    def projector(self, cluster_index: int) -> np.ndarray:
        """Orthogonal projector onto the given eigenvalue cluster."""
        cols = self.vectors[:, self.clusters[cluster_index]]
        return cols @ cols.conj().T

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Assemble V diag(values) V* for per-eigenindex scalar values."""
        return (self.vectors * np.asarray(values)) @ self.vectors.conj().T


def _cluster_indices(w: np.ndarray, tau: float) -> list:
    """Group ascending eigenvalues: consecutive gaps <= tau chain into one cluster."""
    if w.size == 0:
        return []
    bounds = [0]
    for i in range(1, w.size):
        if w[i] - w[i - 1] > tau:
            bounds.append(i)
    bounds.append(w.size)
    return [np.arange(bounds[k], bounds[k + 1]) for k in range(len(bounds) - 1)]


def eigendecompose(h, tau_cluster: float | None = None) -> SpectralDecomposition:
    """Eigendecompose a Hermitian matrix, clustering near-degenerate eigenvalues.

    tau_cluster defaults to 1e-8 * ||H||_inf; eigenvalues within tau of each
    other (transitively) share a cluster so that downstream divided differences
    route through confluent, derivative-based evaluation.
    """
    a = as_matrix(h)
    a = hermitian_part(a)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        fro = float(np.linalg.norm(a))
        raise EigensolverError(
            f"eigh failed to converge on a {a.shape[0]}x{a.shape[0]} matrix "
            f"(Frobenius norm {fro:.3e}, max|entry| {np.max(np.abs(a)):.3e}): {exc}"
        ) from exc
    norm = float(np.max(np.abs(w))) if w.size else 0.0
    if tau_cluster is None:
        tau_cluster = DEFAULT_CLUSTER_TOL_FACTOR * max(norm, 1.0)
    if tau_cluster < 0:
        raise ValueError("tau_cluster must be nonnegative")
    # canonical phases: largest-modulus component of each eigenvector real positive
    k = np.argmax(np.abs(v), axis=0)
    phases = v[k, np.arange(v.shape[1])]
    phases = np.where(np.abs(phases) > 0, phases / np.abs(phases), 1.0)
    v = v / phases
    clusters = _cluster_indices(w, tau_cluster)
    rep = np.empty_like(w)
    for idx in clusters:
        rep[idx] = float(np.mean(w[idx]))
    return SpectralDecomposition(
        eigenvalues=w,
        vectors=v,
        clusters=clusters,
        rep_values=rep,
        tau_cluster=float(tau_cluster),
        source_norm=norm,
    )


def matrix_function(s: SpectralDecomposition, f) -> np.ndarray:
    """Apply a scalar function through the spectral decomposition.

    f may be a ScalarFunction or any callable accepting an ndarray of reals.
    Evaluation happens once per cluster representative; a failure is reported
    with the offending eigenvalue. Real-valued results are re-Hermitized.
    """
    reps = s.cluster_values()
    try:
        fvals = np.asarray(f(reps), dtype=complex)
    except Exception:
        fvals = np.empty(reps.shape, dtype=complex)
        for i, lam in enumerate(reps):
            try:
                fvals[i] = complex(f(np.array([lam]))[0])
            except Exception as exc:
                raise ValueError(
                    f"scalar function evaluation failed at eigenvalue {lam!r}: {exc}"
                ) from exc
    per_index = np.empty(s.dim, dtype=complex)
    for ci, idx in enumerate(s.clusters):
        per_index[idx] = fvals[ci]
    out = s.apply(per_index)
    if np.max(np.abs(fvals.imag)) <= 1e-14 * max(1.0, np.max(np.abs(fvals))):
        out = hermitian_part(out)
    return out


def resolvent(s: SpectralDecomposition, z: complex, power: int = 1) -> np.ndarray:
    """(H - z)^(-power) for Im z != 0, via eigenvalue mapping."""
    z = complex(z)
    if z.imag == 0.0:
        raise ValueError(f"resolvent requires Im z != 0, got z = {z!r}")
    if power < 1:
        raise ValueError("resolvent power must be a positive integer")
    vals = (s.eigenvalues - z) ** (-int(power))
    return s.apply(vals)


def schatten_norm(a, p: float) -> float:
    """Schatten p-norm (sum sigma_i^p)^(1/p); p = inf gives the operator norm."""
    m = as_matrix(a)
    if not (p >= 1.0):
        raise ValueError(f"Schatten norm requires p >= 1, got p = {p}")
    sigma = np.linalg.svd(m, compute_uv=False)
    if np.isinf(p):
        return float(sigma[0]) if sigma.size else 0.0
    if p == 1.0:
        return float(np.sum(sigma))
    if p == 2.0:
        return float(np.sqrt(np.sum(sigma**2)))
    return float(np.sum(sigma**p) ** (1.0 / p))


def operator_norm(a) -> float:
    """Spectral norm ||A||_inf."""
    return schatten_norm(a, np.inf)


def random_hermitian(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    """GUE-style random Hermitian matrix with entries of size ~ scale."""
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return hermitian_part(a) * scale

def random_complex(rng: np.random.Generator, shape, scale: float = 1.0) -> np.ndarray:
    a = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return a * scale


def with_repeated_eigenvalue(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    """Random Hermitian matrix with one exactly repeated eigenvalue (dim >= 2)."""
    h = random_hermitian(rng, dim, scale)
    s = eigendecompose(h, tau_cluster=0.0)
    w = s.eigenvalues.copy()
    if dim >= 2:
        w[1] = w[0]
    return hermitian_part(s.apply(w))
