"""Pseudo- and antipseudo-Hermitian structure.

A matrix H is *pseudo-Hermitian* with respect to a unitary Hermitian U when
H† = U H U†; its spectrum is then real or comes in complex-conjugate pairs.
It is *antipseudo-Hermitian* when H† = -U H U†; the spectrum is then pure
imaginary or comes in (E, -E*) pairs. This module verifies the structure,
pairs the spectrum under the appropriate conjugation rule, constructs left
eigenvectors from right ones through U (avoiding a second eigensolve), and
tests the self-normalization criterion via the Hermitian/anti-Hermitian
split of H.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    BadSymmetryMatrix,
    NotAnEigenvector,
    NotBinormalized,
    SelfOrthogonal,
    UnpairableSpectrum,
)
from .linalg import as_square_matrix, as_state

__all__ = [
    "SymmetrySpec",
    "check_pseudo",
    "check_antipseudo",
    "pair_spectrum",
    "left_from_right",
    "hermitian_split",
    "check_self_normalized",
]

KINDS = ("pseudo", "antipseudo")

#: Default relative tolerance for the symmetry residual checks.
SYMMETRY_TOL = 1e-9

#: Default absolute tolerance for spectrum pairing (on the unit frequency scale).
PAIRING_TOL = 1e-8


def _validate_symmetry_matrix(U, tol: float = 1e-10) -> np.ndarray:
    U = as_square_matrix(U)
    eye = np.eye(U.shape[0])
    unitary = float(np.linalg.norm(U.conj().T @ U - eye))
    hermitian = float(np.linalg.norm(U - U.conj().T))
    if unitary > tol or hermitian > tol:
        raise BadSymmetryMatrix(
            f"U fails unitarity ({unitary:.3e}) or Hermiticity ({hermitian:.3e})"
        )
    return U


@dataclass
class SymmetrySpec:
    """Symmetry matrix U, its kind, and per-eigenstate scalars.

    ``state_scalars[n]`` is the complex u_n realizing the per-state operator
    U_n = u_n * U that maps the partner right eigenvector to the left one.
    For a spectrum permitting |u_n| = 1 the scalars are phases; otherwise
    their modulus is fixed by the normalization overlap.
    """

    U: np.ndarray
    kind: str
    state_scalars: Optional[np.ndarray] = None

    def __post_init__(self):
        self.U = _validate_symmetry_matrix(self.U)
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.state_scalars is not None:
            self.state_scalars = np.asarray(self.state_scalars, dtype=complex)


def _symmetry_residual(H, U, sign: float):
    H = as_square_matrix(H)
    U = _validate_symmetry_matrix(U)
    target = sign * (U @ H @ U.conj().T)
    num = float(np.linalg.norm(H.conj().T - target))
    den = float(np.linalg.norm(H))
    return num / den if den > 0 else 0.0


def check_pseudo(H, U, tol: float = SYMMETRY_TOL):
    """Test H† = U H U† (U unitary, so U† = U⁻¹).

    Returns ``(ok, residual)`` with the relative Frobenius residual
    ||H† - U H U†|| / ||H||.
    """
    residual = _symmetry_residual(H, U, +1.0)
    return residual <= tol, residual


def check_antipseudo(H, U, tol: float = SYMMETRY_TOL):
    """Test H† = -U H U†. Returns ``(ok, residual)``."""
    residual = _symmetry_residual(H, U, -1.0)
    return residual <= tol, residual


def pair_spectrum(values: Sequence[complex], kind: str,
                  tol: float = PAIRING_TOL) -> np.ndarray:
    """Partner map under the symmetry's conjugation rule.

    pseudo: E_nbar = E_n* (self-paired iff Im E_n is within tol of 0);
    antipseudo: E_nbar = -E_n* (self-paired iff Re E_n is within tol of 0).
    The returned map is an involution.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    values = np.asarray(values, dtype=complex).reshape(-1)
    targets = values.conj() if kind == "pseudo" else -values.conj()
    n = values.shape[0]
    pairing = np.full(n, -1)
    for i in range(n):
        if pairing[i] >= 0:
            continue
        if abs(values[i] - targets[i]) <= tol:
            pairing[i] = i
            continue
        dist = np.abs(values - targets[i])
        dist[pairing >= 0] = np.inf
        dist[i] = np.inf
        j = int(np.argmin(dist))
        if not np.isfinite(dist[j]) or dist[j] > tol:
            raise UnpairableSpectrum(
                f"no partner for eigenvalue {values[i]:.6g} within {tol:.1e}"
            )
        pairing[i] = j
        pairing[j] = i
    return pairing


def left_from_right(rights, values, spec: SymmetrySpec,
                    pairing: Optional[np.ndarray] = None,
                    self_orthogonal_tol: float = 1e-8,
                    check_tol: float = 1e-9):
    """Left eigenvectors from right ones through the symmetry matrix.

    For a non-degenerate spectrum the left eigenvector of E_n is U applied to
    the right eigenvector of the conjugation partner, up to a scalar:
    <E_n^l| = u_n <E_nbar^r| U with u_n = 1 / <E_nbar^r|U|E_n^r>, which
    enforces <E_n^l|E_n^r> = 1. Returns ``(lefts, scalars)`` where ``lefts``
    rows are bras and ``scalars`` the u_n.

    Raises :class:`SelfOrthogonal` when the normalization overlap vanishes
    (exceptional point) and :class:`NotBinormalized` when the construction
    fails to produce delta_mn overlaps, which signals a wrong pairing or a
    Hamiltonian outside the declared symmetry class.
    """
    rights = np.asarray(rights, dtype=complex)
    values = np.asarray(values, dtype=complex).reshape(-1)
    if pairing is None:
        pairing = pair_spectrum(values, spec.kind)
    n = values.shape[0]
    lefts = np.empty((n, rights.shape[0]), dtype=complex)
    scalars = np.empty(n, dtype=complex)
    for k in range(n):
        row = rights[:, pairing[k]].conj() @ spec.U
        overlap = row @ rights[:, k]
        if abs(overlap) <= self_orthogonal_tol:
            raise SelfOrthogonal(
                f"state {k}: <partner|U|state> = {abs(overlap):.3e}"
            )
        scalars[k] = 1.0 / overlap
        lefts[k] = scalars[k] * row
    G = lefts @ rights
    resid = float(np.max(np.abs(G - np.eye(n))))
    if resid > check_tol:
        raise NotBinormalized(
            f"U-constructed lefts give biorthonormality residual {resid:.3e}"
        )
    return lefts, scalars


def hermitian_split(H):
    """Hermitian/anti-Hermitian split H = H_R + i H_I.

    Returns ``(H_R, H_I)`` with H_R = (H + H†)/2 and H_I = (H - H†)/(2i),
    both Hermitian.
    """
    H = as_square_matrix(H)
    HR = (H + H.conj().T) / 2.0
    HI = (H - H.conj().T) / 2.0j
    return HR, HI


def check_self_normalized(H, U, state, eigenvalue: complex, kind: str,
                          tol: float = 1e-9):
    """Test whether an eigenstate is self-normalized.

    A self-normalized eigenstate is a common eigenstate of the split parts:
    for a pseudo-Hermitian H, H_R|E> = E|E> and H_I|E> = 0; for an
    antipseudo-Hermitian H, H_I|E> = -iE|E> and H_R|E> = 0. Such a state has
    <psi|psi> = 1 after binormalization, so its bare populations sum to one.

    Returns ``(ok, diagnostics)`` where diagnostics reports both split
    residuals and the self-overlap. The state must satisfy the eigen-equation
    for ``eigenvalue`` or :class:`NotAnEigenvector` is raised.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    H = as_square_matrix(H)
    psi = as_state(state, H.shape[0])
    scale = max(float(np.linalg.norm(H)), 1.0) * float(np.linalg.norm(psi))
    eig_resid = float(np.linalg.norm(H @ psi - eigenvalue * psi))
    if eig_resid > 1e-8 * scale:
        raise NotAnEigenvector(
            f"eigen-equation residual {eig_resid:.3e} for E = {eigenvalue:.6g}"
        )
    HR, HI = hermitian_split(H)
    if kind == "pseudo":
        primary = float(np.linalg.norm(HR @ psi - eigenvalue * psi))
        secondary = float(np.linalg.norm(HI @ psi))
    else:
        primary = float(np.linalg.norm(HI @ psi - (-1j * eigenvalue) * psi))
        secondary = float(np.linalg.norm(HR @ psi))
    self_overlap = complex(psi.conj() @ psi)
    ok = primary <= tol and secondary <= tol
    diagnostics = {
        "primary_residual": primary,
        "secondary_residual": secondary,
        "self_overlap": self_overlap,
    }
    return ok, diagnostics
