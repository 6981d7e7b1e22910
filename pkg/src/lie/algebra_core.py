"""
Dense matrix and (1,2)/(2,1)-tensor kernels, pairings, bases and finite differences.

Index convention used everywhere: a (1,2)-tensor T^i_{jk} is stored as T[i, j, k]
(one contravariant slot first, then two covariant slots); a (2,1)-tensor α_i^{jk}
is stored as alpha[i, j, k]. The pairing of α with T is the full contraction
Σ α[i, j, k]·T[i, j, k]; matrices pair by ⟨A, B⟩ = Tr(AᵀB).
"""

import logging
import math
from enum import Enum
from functools import lru_cache
from typing import Any, Callable, Iterator, List, Optional

import numpy as np
from numpy.typing import NDArray

from src.models.schemas import Tolerances
from .errors import DimensionMismatchError, SingularMatrixError

logger = logging.getLogger(__name__)

Matrix = NDArray[np.float64]
Tensor12 = NDArray[np.float64]
Tensor21 = NDArray[np.float64]

DEFAULT_TOLERANCES = Tolerances()

# Scaled norm bound and Taylor degree for mat_exp: 0.5**19 / 19! is far below double precision.
_EXP_NORM_BOUND = 0.5
_EXP_TAYLOR_DEGREE = 18


class Space(str, Enum):
    GL = "gl"
    MAT = "mat"
    T12 = "t12"
    S12 = "s12"


def _square(a: Matrix, name: str = "matrix") -> Matrix:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"{name} must be square, got shape {a.shape}")
    return a


def check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if np.shape(a) != np.shape(b):
        raise DimensionMismatchError(f"shape mismatch: {np.shape(a)} vs {np.shape(b)}")


def check_operand(xi: Matrix, v: np.ndarray) -> None:
    """A matrix acting on a V-value must share its dimension n"""
    n = _square(xi).shape[0]
    if np.ndim(v) not in (2, 3) or any(size != n for size in np.shape(v)):
        raise DimensionMismatchError(f"cannot combine a {n}x{n} matrix with a value of shape {np.shape(v)}")


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    a, b = _square(a), _square(b)
    check_same_shape(a, b)
    return a @ b


def singularity_threshold(a: Matrix, tolerances: Tolerances = DEFAULT_TOLERANCES) -> float:
    """sing_tol scaled by the n-th power of the max-norm, so the guard is scale-aware"""
    a = _square(a)
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    return tolerances.sing_tol * scale ** a.shape[0]


def check_invertible(a: Matrix, tolerances: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Return det(a); raise SingularMatrixError when |det| is at or below the threshold"""
    a = _square(a)
    determinant = float(np.linalg.det(a))
    threshold = singularity_threshold(a, tolerances)
    if not abs(determinant) > threshold:
        raise SingularMatrixError(determinant, threshold)
    return determinant


def mat_inverse(a: Matrix, tolerances: Tolerances = DEFAULT_TOLERANCES) -> Matrix:
    """Inverse by LU with partial pivoting, guarded by the determinant threshold"""
    a = _square(a)
    check_invertible(a, tolerances)
    return np.linalg.solve(a, np.eye(a.shape[0]))


def mat_exp(x: Matrix) -> Matrix:
    """Matrix exponential by scaling and squaring a truncated Taylor series"""
    x = _square(x)
    n = x.shape[0]
    norm = float(np.max(np.sum(np.abs(x), axis=0))) if x.size else 0.0
    squarings = 0
    if norm > _EXP_NORM_BOUND:
        squarings = int(math.ceil(math.log2(norm / _EXP_NORM_BOUND)))
    scaled = x / 2.0 ** squarings

    # Horner evaluation of Σ scaled^k / k!
    identity = np.eye(n)
    result = identity.copy()
    for k in range(_EXP_TAYLOR_DEGREE, 0, -1):
        result = identity + (scaled @ result) / k
    for _ in range(squarings):
        result = result @ result
    return result


def trace_pairing(a: Matrix, b: Matrix) -> float:
    """⟨A, B⟩ = Tr(AᵀB) = Σ a[i, j]·b[i, j]"""
    a, b = _square(a), _square(b)
    check_same_shape(a, b)
    return float(np.einsum("ij,ij->", a, b))


def tensor_pairing(alpha: Tensor21, t: Tensor12) -> float:
    """⟨α, T⟩ = Σ α_i^{jk} T^i_{jk}"""
    alpha, t = np.asarray(alpha, dtype=np.float64), np.asarray(t, dtype=np.float64)
    check_same_shape(alpha, t)
    if alpha.ndim != 3:
        raise DimensionMismatchError(f"expected 3-index tensors, got shape {alpha.shape}")
    return float(np.einsum("ijk,ijk->", alpha, t))


def pairing(alpha: np.ndarray, v: np.ndarray) -> float:
    """Pairing of a V*-value with a V-value, dispatched on rank"""
    if np.ndim(v) == 2:
        return trace_pairing(alpha, v)
    return tensor_pairing(alpha, v)


def symmetrize(t: Tensor12) -> Tensor12:
    """S^i_{jk} = ½(T^i_{jk} + T^i_{kj})"""
    t = np.asarray(t, dtype=np.float64)
    return 0.5 * (t + t.transpose(0, 2, 1))


def asymmetry(t: Tensor12) -> float:
    """Max |T^i_{jk} − T^i_{kj}|"""
    t = np.asarray(t, dtype=np.float64)
    return float(np.max(np.abs(t - t.transpose(0, 2, 1))))


class Basis:
    """
    Ordered basis of a finite-dimensional space of arrays, with its Gram matrix
    under the Euclidean (trace / full-contraction) pairing.

    Coordinates, reconstruction from coordinates, and the dual representative of
    a functional given by its values on the basis all go through the Gram matrix,
    so non-orthonormal bases such as the symmetrized S¹₂ basis are handled exactly.
    """

    def __init__(self, space: Space, n: int, elements: np.ndarray):
        self.space = space
        self.n = n
        self.elements = elements
        self.shape = elements.shape[1:]
        self.flat = elements.reshape(len(elements), -1)
        self.gram = self.flat @ self.flat.T
        self.gram_inverse = np.linalg.inv(self.gram)
        for array in (self.elements, self.flat, self.gram, self.gram_inverse):
            array.setflags(write=False)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.elements)

    def values(self, alpha: np.ndarray) -> np.ndarray:
        """⟨α, b_a⟩ for every basis element b_a"""
        return self.flat @ np.ravel(alpha)

    def coords(self, x: np.ndarray) -> np.ndarray:
        return self.gram_inverse @ self.values(x)

    def from_coords(self, coords: np.ndarray) -> np.ndarray:
        return (np.asarray(coords, dtype=np.float64) @ self.flat).reshape(self.shape)

    def dual_from_values(self, values: np.ndarray) -> np.ndarray:
        """The element γ in the span with ⟨γ, b_a⟩ = values[a]"""
        return self.from_coords(self.gram_inverse @ np.asarray(values, dtype=np.float64))


def _unit(shape: tuple, index: tuple) -> np.ndarray:
    e = np.zeros(shape)
    e[index] = 1.0
    return e


@lru_cache(maxsize=None)
def make_basis(space: Space, n: int) -> Basis:
    if n < 1:
        raise DimensionMismatchError(f"dimension must be positive, got {n}")
    space = Space(space)
    if space in (Space.GL, Space.MAT):
        elements = [_unit((n, n), index) for index in np.ndindex(n, n)]
    elif space is Space.T12:
        elements = [_unit((n, n, n), index) for index in np.ndindex(n, n, n)]
    else:
        elements = [
            symmetrize(_unit((n, n, n), (i, j, k)))
            for i in range(n)
            for j in range(n)
            for k in range(j, n)
        ]
    logger.debug(f"Built {space.value}({n}) basis with {len(elements)} elements")
    return Basis(space, n, np.array(elements))


def basis_enumerate(space: Space, n: int) -> List[np.ndarray]:
    """Ordered basis: matrix units row-major for gl/Mat, unit tensors for T¹₂, symmetrized units for S¹₂"""
    return list(make_basis(space, n).elements)


def fd_derivative(f: Callable[[float], Any], at: float, h: float) -> np.ndarray:
    """Central difference (f(at + h) − f(at − h)) / 2h"""
    if not h > 0:
        raise ValueError("finite-difference step must be positive")
    forward = np.asarray(f(at + h), dtype=np.float64)
    backward = np.asarray(f(at - h), dtype=np.float64)
    return (forward - backward) / (2.0 * h)


def random_matrix(rng: np.random.Generator, n: int, scale: float = 1.0) -> Matrix:
    """Entries i.i.d. uniform on [−scale, scale]"""
    return rng.uniform(-scale, scale, size=(n, n))


def random_group_matrix(rng: np.random.Generator, n: int) -> Matrix:
    """exp of a uniform sample: always invertible with bounded conditioning"""
    return mat_exp(random_matrix(rng, n))


def random_tensor(rng: np.random.Generator, n: int, symmetric: bool = False) -> Tensor12:
    t = rng.uniform(-1.0, 1.0, size=(n, n, n))
    return symmetrize(t) if symmetric else t


def encode_array(array: np.ndarray) -> list:
    """Nested-list JSON encoding"""
    return np.asarray(array, dtype=np.float64).tolist()


def decode_array(data: Any, rank: int, n: Optional[int] = None) -> np.ndarray:
    """Decode a nested-list matrix (rank 2) or 3-index tensor (rank 3)"""
    array = np.asarray(data, dtype=np.float64)
    if array.ndim != rank or len(set(array.shape)) != 1:
        raise DimensionMismatchError(f"expected a rank-{rank} array with equal sides, got shape {array.shape}")
    if n is not None and array.shape[0] != n:
        raise DimensionMismatchError(f"expected dimension {n}, got {array.shape[0]}")
    if not np.all(np.isfinite(array)):
        raise ValueError("entries must be finite")
    return array
