"""Dense complex linear algebra for small non-normal matrices.

Eigendecomposition, biorthonormal left/right pairing, and smooth eigenpath
tracking over time. Everything here works with plain complex ndarrays:
matrices are square ``(dim, dim)`` arrays, states are ``(dim,)`` vectors.

Conventions
-----------
Right eigenvectors are stored as the *columns* of ``rights`` (column ``n`` is
``|E_n^r>``). Left eigenvectors are stored as the *rows* of ``lefts``, and a
row is the bra ``<E_n^l|`` (already conjugated), so that

    lefts @ rights == identity          (biorthonormality)
    rights @ lefts == identity          (closure)

hold for a binormalized system.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    AmbiguousMatching,
    DegenerateSpectrum,
    DimensionMismatch,
    NonFinite,
    NotBinormalized,
    SelfOrthogonal,
)

__all__ = [
    "EigenSystem",
    "eig",
    "left_eigensystem",
    "binormalize",
    "full_eigensystem",
    "match_to_previous",
    "decompose",
]

#: Default dimension cap; the models in this package are 3x3.
DIM_CAP = 8

#: Exceptional-point guard as a fraction of the spectral diameter.
EP_GUARD_FRACTION = 1e-8

#: Threshold on |<l|r>| below which a pair counts as self-orthogonal.
SELF_ORTHOGONAL_TOL = 1e-8


def as_square_matrix(H) -> np.ndarray:
    """Validate and return ``H`` as a finite square complex matrix."""
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {H.shape}")
    if not np.all(np.isfinite(H)):
        raise NonFinite("matrix contains NaN or Inf")
    return H


def as_state(psi, dim: Optional[int] = None) -> np.ndarray:
    """Validate and return ``psi`` as a finite complex vector."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(psi)):
        raise NonFinite("state contains NaN or Inf")
    if dim is not None and psi.shape[0] != dim:
        raise DimensionMismatch(f"state has dim {psi.shape[0]}, expected {dim}")
    return psi


@dataclass
class EigenSystem:
    """One time-snapshot of a biorthonormal eigensystem.

    Attributes
    ----------
    values : (n,) complex array of eigenvalues E_n.
    rights : (dim, n) array; column n is the right eigenvector |E_n^r>.
    lefts : (n, dim) array; row n is the bra <E_n^l|, normalized so that
        ``lefts @ rights`` is the identity.
    pairing : (n,) int array mapping each state to its conjugation partner
        (identity until a symmetry module fills it in).
    gauge_anchor : the previous snapshot this one was gauge-matched to,
        or None for a freshly decomposed system.
    """

    values: np.ndarray
    rights: np.ndarray
    lefts: np.ndarray
    pairing: np.ndarray = field(default=None)  # type: ignore[assignment]
    gauge_anchor: Optional["EigenSystem"] = field(default=None, repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex).reshape(-1)
        self.rights = np.asarray(self.rights, dtype=complex)
        self.lefts = np.asarray(self.lefts, dtype=complex)
        n = self.values.shape[0]
        if self.rights.shape != (self.dim, n) or self.lefts.shape != (n, self.dim):
            raise DimensionMismatch(
                f"inconsistent eigensystem shapes: values {n}, "
                f"rights {self.rights.shape}, lefts {self.lefts.shape}"
            )
        if self.pairing is None:
            self.pairing = np.arange(n)
        else:
            self.pairing = np.asarray(self.pairing, dtype=int).reshape(-1)

    @property
    def dim(self) -> int:
        return self.rights.shape[0]

    @property
    def n_states(self) -> int:
        return self.values.shape[0]

    def left_kets(self) -> np.ndarray:
        """Left eigenvectors as kets: column n is |E_n^l>."""
        return self.lefts.conj().T

    def biorthonormality_residual(self) -> float:
        """Max deviation of <E_m^l|E_n^r> from delta_mn."""
        G = self.lefts @ self.rights
        return float(np.max(np.abs(G - np.eye(self.n_states))))

    def closure_residual(self) -> float:
        """Max deviation of sum_n |E_n^r><E_n^l| from the identity."""
        P = self.rights @ self.lefts
        return float(np.max(np.abs(P - np.eye(self.dim))))


def _check_separation(values: np.ndarray, ep_guard_fraction: float) -> None:
    """Reject spectra with two eigenvalues within the EP guard."""
    n = values.shape[0]
    if n < 2:
        return
    diff = np.abs(values[:, None] - values[None, :])
    diameter = float(diff.max())
    gap = float(diff[~np.eye(n, dtype=bool)].min())
    if gap <= ep_guard_fraction * max(diameter, np.finfo(float).tiny):
        raise DegenerateSpectrum(
            f"eigenvalue gap {gap:.3e} within guard "
            f"{ep_guard_fraction:.1e} x diameter {diameter:.3e}"
        )


def eig(H, ep_guard_fraction: float = EP_GUARD_FRACTION, dim_cap: int = DIM_CAP):
    """Eigenvalues and unit-norm right eigenvectors of a small dense matrix.

    Parameters
    ----------
    H : (dim, dim) complex array.
    ep_guard_fraction : minimum eigenvalue separation as a fraction of the
        spectral diameter; closer pairs raise :class:`DegenerateSpectrum`.
    dim_cap : largest accepted dimension.

    Returns
    -------
    values : (dim,) complex array, ordered by (Re, Im) lexicographically.
    rights : (dim, dim) array; column n is the unit-norm eigenvector of
        ``values[n]``.
    """
    H = as_square_matrix(H)
    if H.shape[0] > dim_cap:
        raise DimensionMismatch(f"dim {H.shape[0]} exceeds cap {dim_cap}")
    values, vecs = np.linalg.eig(H)
    order = np.lexsort((values.imag, values.real))
    values = values[order]
    vecs = vecs[:, order]
    vecs = vecs / np.linalg.norm(vecs, axis=0, keepdims=True)
    _check_separation(values, ep_guard_fraction)
    return values, vecs


def left_eigensystem(H, ep_guard_fraction: float = EP_GUARD_FRACTION,
                     dim_cap: int = DIM_CAP):
    """Eigenvalues and unit-norm left eigenvectors, via the adjoint problem.

    Solves H† |E_n^l> = E_n* |E_n^l>. The returned values are the adjoint's
    eigenvalues (the conjugates of ``eig(H)``'s), ordered by (Re, Im); the
    vectors are returned as kets (columns).
    """
    H = as_square_matrix(H)
    return eig(H.conj().T, ep_guard_fraction, dim_cap)


def _match_conjugate(values: np.ndarray, adjoint_values: np.ndarray,
                     tol: float) -> np.ndarray:
    """Index map so that adjoint value perm[n] conjugates to values[n]."""
    n = values.shape[0]
    scale = max(float(np.abs(values).max()), 1.0)
    perm = np.full(n, -1)
    used = np.zeros(n, dtype=bool)
    for i in range(n):
        dist = np.abs(adjoint_values.conj() - values[i])
        dist[used] = np.inf
        j = int(np.argmin(dist))
        if dist[j] > tol * scale:
            raise DegenerateSpectrum(
                f"left eigenvalue match failed: best distance {dist[j]:.3e}"
            )
        perm[i] = j
        used[j] = True
    return perm


def binormalize(rights, lefts, values, pairing=None,
                self_orthogonal_tol: float = SELF_ORTHOGONAL_TOL,
                check_tol: float = 1e-9) -> EigenSystem:
    """Scale index-matched right/left eigenvectors to <E_m^l|E_n^r> = delta_mn.

    Parameters
    ----------
    rights : (dim, n) array of right eigenvector columns.
    lefts : (dim, n) array of left eigenvector kets (columns), index-matched
        to ``rights`` (left n belongs to the eigenvalue conjugating to
        ``values[n]``).
    values : (n,) eigenvalues of the right problem.
    pairing : optional conjugation-partner map to store on the result.
    self_orthogonal_tol : overlaps with modulus below this raise
        :class:`SelfOrthogonal` (exceptional-point signature).
    check_tol : tolerance for the final biorthonormality verification.

    Each pair is scaled symmetrically by 1/sqrt(overlap) using the principal
    branch of the square root (cut on the negative real axis), which fixes a
    reproducible gauge.
    """
    rights = np.array(rights, dtype=complex)
    lefts = np.array(lefts, dtype=complex)
    values = np.asarray(values, dtype=complex).reshape(-1)
    if rights.shape != lefts.shape or rights.shape[1] != values.shape[0]:
        raise DimensionMismatch(
            f"rights {rights.shape}, lefts {lefts.shape}, values {values.shape}"
        )
    bras = lefts.conj().T
    overlaps = np.einsum("nd,dn->n", bras, rights)
    unit_scale = np.linalg.norm(rights, axis=0) * np.linalg.norm(lefts, axis=0)
    if np.any(np.abs(overlaps) <= self_orthogonal_tol * unit_scale):
        worst = int(np.argmin(np.abs(overlaps) / unit_scale))
        raise SelfOrthogonal(
            f"state {worst}: |<l|r>| = {abs(overlaps[worst]):.3e} "
            f"(exceptional point proximity)"
        )
    s = np.sqrt(overlaps)  # principal branch
    rights = rights / s[None, :]
    bras = bras / s[:, None]
    es = EigenSystem(values=values, rights=rights, lefts=bras, pairing=pairing)
    resid = es.biorthonormality_residual()
    if resid > check_tol:
        raise NotBinormalized(
            f"biorthonormality residual {resid:.3e} exceeds {check_tol:.1e}"
        )
    return es


def full_eigensystem(H, ep_guard_fraction: float = EP_GUARD_FRACTION,
                     match_tol: float = 1e-8) -> EigenSystem:
    """Complete binormalized eigensystem of ``H`` from the two adjoint solves.

    Runs ``eig`` on H and on H†, matches each left eigenvector to the right
    eigenvector whose eigenvalue is the conjugate of the left's, and
    binormalizes. The pairing map is left as the identity; symmetry-aware
    pairing lives in the symmetry module.
    """
    H = as_square_matrix(H)
    values, rights = eig(H, ep_guard_fraction)
    adj_values, left_kets = left_eigensystem(H, ep_guard_fraction)
    perm = _match_conjugate(values, adj_values, match_tol)
    return binormalize(rights, left_kets[:, perm], values)


def match_to_previous(current: EigenSystem, previous: EigenSystem,
                      dominance: float = 2.0) -> EigenSystem:
    """Reorder and re-gauge ``current`` for continuity with ``previous``.

    States are permuted so index n maximizes |<E_n^l(prev)|E_n^r(curr)>|,
    requiring each row's best overlap to exceed its runner-up by
    ``dominance``; then each right eigenvector is phase-rotated so the
    matching overlap is real and positive (lefts get the inverse phase, so
    binormalization is preserved).
    """
    if current.dim != previous.dim or current.n_states != previous.n_states:
        raise DimensionMismatch("eigensystem shapes differ")
    n = current.n_states
    M = previous.lefts @ current.rights  # M[m, j] = <l_m(prev)|r_j(curr)>
    A = np.abs(M)
    perm = np.full(n, -1)
    used = np.zeros(n, dtype=bool)
    for m in range(n):
        row = A[m].copy()
        j = int(np.argmax(row))
        best = row[j]
        row[j] = -np.inf
        second = float(np.max(row)) if n > 1 else 0.0
        if used[j] or best < dominance * second:
            raise AmbiguousMatching(
                f"state {m}: best overlap {best:.3e} vs runner-up "
                f"{second:.3e} (dominance factor {dominance})"
            )
        perm[m] = j
        used[j] = True

    rights = current.rights[:, perm].copy()
    lefts = current.lefts[perm].copy()
    values = current.values[perm]
    inv = np.empty(n, dtype=int)
    inv[perm] = np.arange(n)
    pairing = inv[current.pairing[perm]]
    for m in range(n):
        ov = M[m, perm[m]]
        phase = ov / abs(ov)
        rights[:, m] /= phase
        lefts[m] *= phase
    return EigenSystem(values=values, rights=rights, lefts=lefts,
                       pairing=pairing, gauge_anchor=previous)


def decompose(state, es: EigenSystem) -> np.ndarray:
    """Expansion coefficients c_n = <E_n^l|psi> in the right eigenbasis.

    The binormalized closure guarantees ``es.rights @ c`` reconstructs the
    state to working precision.
    """
    psi = as_state(state, es.dim)
    return es.lefts @ psi
