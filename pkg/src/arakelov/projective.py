"""Points and subspaces of complex projective space, Fubini-Study distances."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .rng import RngState


def _to_complex_array(coords) -> np.ndarray:
    arr = []
    for c in coords:
        if isinstance(c, (list, tuple)) and len(c) == 2:
            arr.append(complex(float(c[0]), float(c[1])))
        else:
            arr.append(complex(c))
    return np.asarray(arr, dtype=complex)


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    """A point of ``P^t(C)`` stored through a unit representative.

    ``exact`` optionally keeps a primitive integer representative when the point
    is rational; it is carried along for height computations.
    """

    coords: np.ndarray
    exact: tuple[int, ...] | None = field(default=None)

    def __post_init__(self):
        v = _to_complex_array(self.coords) if not isinstance(self.coords, np.ndarray) else self.coords.astype(complex)
        if v.ndim != 1 or v.size < 2:
            raise ValueError("need at least two homogeneous coordinates")
        nrm = np.linalg.norm(v)
        if not np.isfinite(nrm) or nrm == 0:
            raise ValueError("coordinates must not all vanish")
        v = v / nrm
        v.setflags(write=False)
        object.__setattr__(self, "coords", v)

    @classmethod
    def from_integers(cls, ints: Sequence[int]) -> "ProjectivePoint":
        from .exactlat import integer_primitive

        prim = integer_primitive(ints)
        return cls(np.asarray(prim, dtype=float), exact=prim)

    @property
    def t(self) -> int:
        return self.coords.size - 1

    @property
    def unit(self) -> np.ndarray:
        return self.coords

    def __repr__(self):
        body = ":".join(f"{c.real:.6g}{c.imag:+.6g}j" if c.imag else f"{c.real:.6g}" for c in self.coords)
        return f"ProjectivePoint[{body}]"


@dataclass(frozen=True, eq=False)
class ProjectiveSubspace:
    """``P(F)`` for a complex or rational subspace ``F`` of ``C^{t+1}``."""

    basis: tuple
    t: int

    def __post_init__(self):
        basis = tuple(tuple(v) for v in self.basis)
        if not basis:
            raise ValueError("empty basis")
        for v in basis:
            if len(v) != self.t + 1:
                raise ValueError("basis vector length does not match t+1")
        object.__setattr__(self, "basis", basis)
        if np.linalg.matrix_rank(self.matrix(), tol=1e-12) != len(basis):
            raise ValueError("basis vectors are dependent")

    @classmethod
    def span(cls, *vectors) -> "ProjectiveSubspace":
        vecs = [tuple(v.unit) if isinstance(v, ProjectivePoint) else tuple(v) for v in vectors]
        return cls(tuple(vecs), len(vecs[0]) - 1)

    @property
    def dim_projective(self) -> int:
        return len(self.basis) - 1

    @property
    def is_rational(self) -> bool:
        return all(isinstance(c, (int, Fraction)) for v in self.basis for c in v)

    def matrix(self) -> np.ndarray:
        """Basis as rows of a complex matrix."""
        return np.array([[complex(c) for c in v] for v in self.basis], dtype=complex)

    def orthonormal(self) -> np.ndarray:
        """Orthonormal basis of F as columns."""
        q, _ = np.linalg.qr(self.matrix().T)
        return q

    def contains(self, x: ProjectivePoint, tol: float = 1e-10) -> bool:
        return fs_distance_to_subspace(x, self) <= tol


def _check_same_t(a: int, b: int):
    if a != b:
        raise ValueError(f"dimension mismatch: P^{a} vs P^{b}")


def fs_distance(x: ProjectivePoint, y: ProjectivePoint) -> float:
    """Fubini-Study distance ``sqrt(1 - |<x|y>|^2)`` of unit representatives.

    Evaluated as the norm of the component of x orthogonal to y, which keeps
    full relative accuracy for nearby points.
    """
    _check_same_t(x.t, y.t)
    xu, yu = x.unit, y.unit
    r = xu - yu * np.vdot(yu, xu)
    return float(min(1.0, np.linalg.norm(r)))


def fs_distance_to_subspace(x: ProjectivePoint, sub: ProjectiveSubspace) -> float:
    """Norm of the projection of the unit representative onto ``F^perp``."""
    _check_same_t(x.t, sub.t)
    q = sub.orthonormal()
    xu = x.unit
    r = xu - q @ (q.conj().T @ xu)
    return float(min(1.0, np.linalg.norm(r)))


def sample_points(t: int, n: int, rng: RngState | np.random.Generator) -> np.ndarray:
    """``n`` unit representatives drawn from the unitarily invariant measure on ``P^t``.

    Returned as an ``(n, t+1)`` complex array.
    """
    gen = rng.generator() if isinstance(rng, RngState) else rng
    z = gen.standard_normal((n, t + 1)) + 1j * gen.standard_normal((n, t + 1))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return z


def sample_point(t: int, rng: RngState | np.random.Generator) -> ProjectivePoint:
    return ProjectivePoint(sample_points(t, 1, rng)[0])


def random_unitary(n: int, rng: RngState | np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary matrix (QR of a Ginibre matrix with phase fix)."""
    gen = rng.generator() if isinstance(rng, RngState) else rng
    z = (gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def apply(u: np.ndarray, x: ProjectivePoint) -> ProjectivePoint:
    return ProjectivePoint(u @ x.unit)


def orthonormal_complement(v: np.ndarray) -> np.ndarray:
    """Columns spanning the orthogonal complement of the columns of ``v``."""
    v = np.asarray(v, dtype=complex)
    if v.ndim == 1:
        v = v[:, None]
    n = v.shape[0]
    q, _ = np.linalg.qr(np.hstack([v, np.eye(n, dtype=complex)]))
    return q[:, v.shape[1]:n]
