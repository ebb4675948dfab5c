"""Counterdiabatic Hamiltonian synthesis for all symmetry regimes.

Given an instantaneous eigensystem and its time derivative, the reverse
engineering of a Hamiltonian whose exact dynamics follows the adiabatic
states of H0 is

    H0 = sum_n |E_n^r> E_n <E_n^l|
    H1 = i sum_n (|d/dt E_n^r><E_n^l| - <E_n^l|d/dt E_n^r> |E_n^r><E_n^l|)

with Htotal = H0 + H1 transporting exp(-i int E_n - int <l_n|dr_n>)|E_n^r(t)>
exactly. The phase-dropping truncation HcdOnly = i sum_n |d/dt E_n^r><E_n^l|
transports the bare eigenpath |E_n^r(t)> with no accumulated phase; it is the
useful drive when the dynamical phases are complex and would otherwise blow
up the run.

For pseudo- and antipseudo-Hermitian families the left states entering these
sums are realized through the symmetry operator (u_n U acting on the partner
right state), never by solving the adjoint eigenproblem; the two routes agree
for honest symmetric Hamiltonians, and the U route stays meaningful at the
symmetry-protected level of accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .adiabatic import Schedule, _derivative_at
from .dynamics import Trajectory
from .errors import (
    GridMismatch,
    NotBinormalized,
    NotOrthonormal,
    SymmetryViolation,
)
from .symmetry import (
    check_antipseudo,
    check_pseudo,
    left_from_right,
    pair_spectrum,
)

__all__ = [
    "CDBundle",
    "ResidualReport",
    "cd_hermitian",
    "cd_generic",
    "cd_pseudo",
    "cd_only_pseudo",
    "cd_antipseudo",
    "verify_cd",
]

#: Max biorthonormality defect accepted by the assembly routines.
PATH_TOL = 1e-8

#: Max relative symmetry residual of H(t) accepted by the symmetric builders.
SYMMETRY_GATE = 1e-8


@dataclass
class CDBundle:
    """Counterdiabatic Hamiltonians at a single instant.

    ``H0`` is the spectral reconstruction, ``H1`` the gauge-invariant
    counterdiabatic correction, ``Htotal = H0 + H1`` the full drive, and
    ``HcdOnly`` the bare derivative term i sum |dE^r><E^l| alone.
    """

    H0: np.ndarray
    H1: np.ndarray
    Htotal: np.ndarray
    HcdOnly: np.ndarray

    def __post_init__(self):
        for name in ("H0", "H1", "Htotal", "HcdOnly"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} contains non-finite entries")
        if not (self.H0.shape == self.H1.shape == self.Htotal.shape
                == self.HcdOnly.shape):
            raise ValueError("bundle matrices must share one shape")


def _assemble(values, rights, lefts, d_rights) -> CDBundle:
    h0 = (rights * values[None, :]) @ lefts
    hcd = 1j * (d_rights @ lefts)
    abar = np.einsum("nd,dn->n", lefts, d_rights)
    h1 = hcd - 1j * ((rights * abar[None, :]) @ lefts)
    return CDBundle(H0=h0, H1=h1, Htotal=h0 + h1, HcdOnly=hcd)


def cd_hermitian(values, states, d_states) -> CDBundle:
    """CD bundle for an orthonormal (Hermitian) eigenpath.

    Parameters
    ----------
    values : (n,) real eigenvalues.
    states : (dim, n) orthonormal eigenvector columns, gauge-continuous.
    d_states : (dim, n) their time derivatives.

    Returns a bundle whose H1 is Hermitian by construction.

    Raises
    ------
    NotOrthonormal
        When the columns fail unitary overlap at 1e-8.
    """
    states = np.asarray(states, dtype=complex)
    overlap = states.conj().T @ states
    defect = np.linalg.norm(overlap - np.eye(states.shape[1]))
    if defect > 1e-8:
        raise NotOrthonormal(f"eigenpath overlap defect {defect:.3e}")
    return _assemble(np.asarray(values), states, states.conj().T,
                     np.asarray(d_states, dtype=complex))


def cd_generic(values, rights, lefts, d_rights) -> CDBundle:
    """CD bundle for a binormalized biorthogonal eigenpath.

    Parameters
    ----------
    values : (n,) complex eigenvalues.
    rights : (dim, n) right eigenvector columns, gauge-continuous.
    lefts : (n, dim) left bra rows with lefts @ rights = identity.
    d_rights : (dim, n) time derivatives of the right columns.

    Raises
    ------
    NotBinormalized
        When lefts @ rights deviates from identity beyond 1e-8.
    """
    rights = np.asarray(rights, dtype=complex)
    lefts = np.asarray(lefts, dtype=complex)
    defect = np.linalg.norm(lefts @ rights - np.eye(rights.shape[1]))
    if defect > PATH_TOL:
        raise NotBinormalized(f"biorthonormality defect {defect:.3e}")
    return _assemble(np.asarray(values), rights, lefts,
                     np.asarray(d_rights, dtype=complex))


def _cd_symmetric(s: Schedule, t: float, kind: str, delta: Optional[float],
                  eigenpath: Optional[Callable]) -> CDBundle:
    if s.symmetry is None or s.symmetry.kind != kind:
        raise SymmetryViolation(f"schedule carries no {kind} symmetry spec")
    H = np.asarray(s.hamiltonian(t), dtype=complex)
    checker = check_pseudo if kind == "pseudo" else check_antipseudo
    ok, residual = checker(H, s.symmetry.U, tol=SYMMETRY_GATE)
    if not ok:
        raise SymmetryViolation(
            f"H(t={t:.6g}) {kind} residual {residual:.3e} exceeds "
            f"{SYMMETRY_GATE:.1e}"
        )
    if eigenpath is not None:
        values, rights, d_rights = eigenpath(t)
        values = np.asarray(values, dtype=complex)
        rights = np.asarray(rights, dtype=complex)
        d_rights = np.asarray(d_rights, dtype=complex)
    else:
        center, d_rights = _derivative_at(s, t, delta)
        values, rights = center.values, center.rights
    pairing = pair_spectrum(values, kind)
    lefts, _ = left_from_right(rights, values, s.symmetry, pairing)
    return _assemble(values, rights, lefts, d_rights)


def cd_pseudo(s: Schedule, t: float, delta: Optional[float] = None,
              eigenpath: Optional[Callable] = None) -> CDBundle:
    """CD bundle for a pseudo-Hermitian schedule at time t.

    Left states come from the symmetry operator applied to conjugate-partner
    right states. Eigenvector derivatives default to gauge-respecting finite
    differences; an ``eigenpath`` callback t -> (values, rights, d_rights)
    substitutes analytic ones.

    Raises
    ------
    SymmetryViolation
        When H(t) is not pseudo-Hermitian under the schedule's U.
    UnpairableSpectrum
        When the spectrum admits no conjugation involution.
    """
    return _cd_symmetric(s, t, "pseudo", delta, eigenpath)


def cd_only_pseudo(s: Schedule, t: float, delta: Optional[float] = None,
                   eigenpath: Optional[Callable] = None) -> np.ndarray:
    """The phase-dropping CD-only matrix i sum |dE^r> u_n <E_nbar^r| U."""
    return cd_pseudo(s, t, delta, eigenpath).HcdOnly


def cd_antipseudo(s: Schedule, t: float, delta: Optional[float] = None,
                  eigenpath: Optional[Callable] = None) -> CDBundle:
    """CD bundle for an antipseudo-Hermitian schedule at time t.

    Mirrors :func:`cd_pseudo` with the E <-> -E* pairing.
    """
    return _cd_symmetric(s, t, "antipseudo", delta, eigenpath)


@dataclass
class ResidualReport:
    """Grid-wise consistency check of a CD drive against its target.

    ``residuals[i]`` is ||i d/dt psi - Htotal psi|| / (||Htotal|| ||psi||)
    at grid point i with a second-order finite-difference derivative, so a
    correct construction shows max_residual = O(step^2).
    """

    max_residual: float
    residuals: np.ndarray
    step: float

    def __str__(self):
        return (f"ResidualReport(max {self.max_residual:.3e} over "
                f"{self.residuals.size} points, step {self.step:.3e})")


def verify_cd(bundles: Union[Callable[[float], CDBundle], Sequence[CDBundle]],
              reference: Trajectory) -> ResidualReport:
    """Check that Htotal reproduces the reference trajectory's motion.

    Parameters
    ----------
    bundles : callable t -> CDBundle, or a sequence of bundles aligned with
        ``reference.t``.
    reference : trajectory the drive claims to transport (typically from
        ``adiabatic_reference`` on the same schedule).

    Raises
    ------
    GridMismatch
        When a bundle sequence disagrees in length with the grid, or the
        grid is not strictly increasing.
    """
    ts = reference.t
    if ts.size < 3 or np.any(np.diff(ts) <= 0):
        raise GridMismatch("need a strictly increasing grid of >= 3 points")
    if callable(bundles):
        totals = np.stack([bundles(float(t)).Htotal for t in ts])
    else:
        if len(bundles) != ts.size:
            raise GridMismatch(
                f"{len(bundles)} bundles for {ts.size} grid points"
            )
        totals = np.stack([b.Htotal for b in bundles])
    d_states = np.gradient(reference.states, ts, axis=0, edge_order=2)
    drive = np.einsum("tij,tj->ti", totals, reference.states)
    num = np.linalg.norm(1j * d_states - drive, axis=1)
    den = (np.linalg.norm(totals, axis=(1, 2))
           * np.linalg.norm(reference.states, axis=1))
    residuals = num / np.where(den > 0, den, 1.0)
    return ResidualReport(max_residual=float(residuals.max()),
                          residuals=residuals,
                          step=float(np.min(np.diff(ts))))
