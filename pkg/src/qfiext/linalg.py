"""Dense Hermitian matrix calculus for small complex matrices.

All operators are plain numpy arrays wrapped in thin immutable value types.
Internal unit convention: Hamiltonians are angular frequencies (rad/s) with
hbar = 1; SI conversions happen in :mod:`qfiext.models` only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonHermitianInput

# Hermiticity acceptance: max |A - A^dag| <= HERMITICITY_RTOL * max |A|
HERMITICITY_RTOL = 1e-12
# Two eigenvalues count as degenerate when closer than
# max(DEGENERACY_RTOL * spread, DEGENERACY_ATOL).
DEGENERACY_RTOL = 1e-9
DEGENERACY_ATOL = 1e-13
# Unit-norm acceptance for state vectors.
NORM_RTOL = 1e-6

_GS_RANK_TOL = 1e-6


def _square_complex(entries) -> np.ndarray:
    m = np.array(entries, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    return m


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Immutable dense complex Hermitian matrix.

    The constructor symmetrizes rounding-level asymmetry, (A + A^dag)/2, and
    rejects anything beyond ``HERMITICITY_RTOL * max|entry|``.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = _square_complex(self.matrix)
        scale = float(np.max(np.abs(m)))
        asym = np.abs(m - m.conj().T)
        worst = float(asym.max())
        if worst > HERMITICITY_RTOL * scale:
            i, j = np.unravel_index(int(asym.argmax()), asym.shape)
            raise NonHermitianInput(
                f"matrix is not Hermitian: |A[{i}][{j}] - conj(A[{j}][{i}])| = {worst:.3e} "
                f"exceeds {HERMITICITY_RTOL:.0e} * max|entry| = {HERMITICITY_RTOL * scale:.3e}"
            )
        object.__setattr__(self, "matrix", _freeze((m + m.conj().T) / 2))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class UnitaryOperator:
    """Immutable unitary matrix (U^dag U = 1 within 1e-10)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _square_complex(self.matrix)
        defect = float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))
        if defect > 1e-10:
            raise DimensionMismatch(f"matrix is not unitary: max |U^dag U - 1| = {defect:.3e}")
        object.__setattr__(self, "matrix", _freeze(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class PureState:
    """Immutable unit-norm complex state vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.array(self.amplitudes, dtype=np.complex128)
        if v.ndim != 1 or v.size < 1:
            raise DimensionMismatch(f"expected a vector, got shape {v.shape}")
        n = float(np.linalg.norm(v))
        if abs(n - 1.0) > NORM_RTOL:
            raise ValueError(f"state norm {n!r} is not 1 within {NORM_RTOL:.0e}")
        object.__setattr__(self, "amplitudes", _freeze(v / n))

    @classmethod
    def normalized(cls, vector) -> "PureState":
        """Build a state from any nonzero vector by normalizing it."""
        v = np.asarray(vector, dtype=np.complex128)
        n = float(np.linalg.norm(v))
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(v / n)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Ascending real eigenvalues and matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]


def degeneracy_tolerance(eigenvalues: np.ndarray) -> float:
    spread = float(eigenvalues[-1] - eigenvalues[0])
    return max(DEGENERACY_RTOL * spread, DEGENERACY_ATOL)


def degenerate_blocks(eigenvalues: np.ndarray) -> list[range]:
    """Group ascending eigenvalues into blocks chained by the degeneracy tolerance."""
    tol = degeneracy_tolerance(eigenvalues)
    blocks = []
    start = 0
    for k in range(1, len(eigenvalues)):
        if eigenvalues[k] - eigenvalues[k - 1] > tol:
            blocks.append(range(start, k))
            start = k
    blocks.append(range(start, len(eigenvalues)))
    return blocks


def _canonical_block_basis(block_vectors: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of span(block_vectors).

    Gram-Schmidt over the canonical basis vectors projected into the block
    subspace, in index order, so degenerate subspaces get a reproducible basis
    independent of eigensolver arbitrariness.
    """
    dim, size = block_vectors.shape
    projector = block_vectors @ block_vectors.conj().T
    basis: list[np.ndarray] = []
    for idx in range(dim):
        cand = projector[:, idx].copy()
        for b in basis:
            cand -= (b.conj() @ cand) * b
        norm = float(np.linalg.norm(cand))
        if norm > _GS_RANK_TOL:
            basis.append(cand / norm)
            if len(basis) == size:
                break
    if len(basis) < size:  # projected canonical set was rank-deficient; keep solver basis
        return block_vectors
    return np.column_stack(basis)


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real positive."""
    out = vectors.copy()
    idx = np.argmax(np.abs(out), axis=0)
    for k in range(out.shape[1]):
        pivot = out[idx[k], k]
        mag = abs(pivot)
        if mag > 0.0:
            out[:, k] *= pivot.conjugate() / mag
    return out


def eig_hermitian(a: HermitianOperator) -> EigenDecomposition:
    """Eigendecomposition with ascending eigenvalues and a deterministic basis.

    Within degenerate blocks the basis is re-orthonormalized against the
    canonical basis order; every eigenvector phase is fixed so identical
    inputs give identical outputs.
    """
    w, v = np.linalg.eigh(a.matrix)
    for block in degenerate_blocks(w):
        if len(block) > 1:
            sl = slice(block.start, block.stop)
            v[:, sl] = _canonical_block_basis(v[:, sl])
    v = _fix_phases(v)
    return EigenDecomposition(_freeze(w.astype(float)), _freeze(v))


def expm_unitary(a: HermitianOperator, t: float) -> UnitaryOperator:
    """Evolution operator exp(-i t A) via the spectral decomposition of A."""
    dec = eig_hermitian(a)
    phases = np.exp(-1j * t * dec.eigenvalues)
    u = (dec.eigenvectors * phases) @ dec.eigenvectors.conj().T
    return UnitaryOperator(u)


def seminorm(a: HermitianOperator) -> float:
    """Spectral spread max(eig) - min(eig); vanishes on multiples of identity."""
    w = np.linalg.eigvalsh(a.matrix)
    return float(w[-1] - w[0])


def _check_dims(a: HermitianOperator, dim: int):
    if a.dim != dim:
        raise DimensionMismatch(f"operator dimension {a.dim} does not match {dim}")


def expectation(a: HermitianOperator, psi: PureState) -> float:
    """<psi|A|psi> (real for Hermitian A)."""
    _check_dims(a, psi.dim)
    v = psi.amplitudes
    return float((v.conj() @ (a.matrix @ v)).real)


def variance(a: HermitianOperator, psi: PureState) -> float:
    """<A^2> - <A>^2 in the given state; clamped to be non-negative."""
    _check_dims(a, psi.dim)
    v = a.matrix @ psi.amplitudes
    mean = float((psi.amplitudes.conj() @ v).real)
    second = float((v.conj() @ v).real)
    return max(second - mean * mean, 0.0)


def commutator(a: HermitianOperator, b: HermitianOperator) -> np.ndarray:
    """AB - BA as a plain complex matrix (anti-Hermitian for Hermitian inputs)."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimensions differ: {a.dim} vs {b.dim}")
    return a.matrix @ b.matrix - b.matrix @ a.matrix


def random_hermitian(dim: int, seed) -> HermitianOperator:
    """GUE sample: H = (X + X^dag)/2 with X of i.i.d. standard complex normals.

    Diagonal entries are N(0,1), off-diagonal entries have unit total variance.
    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    if dim < 1:
        raise DimensionMismatch(f"dimension must be >= 1, got {dim}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    x = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return HermitianOperator((x + x.conj().T) / 2)
