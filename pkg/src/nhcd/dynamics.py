"""Non-unitary time evolution and projective phase decomposition.

The Schroedinger equation i d/dt psi = H(t) psi is integrated with a
classical fixed-step RK4 scheme (or an adaptive step-doubling variant).
No renormalization is ever applied: for a non-Hermitian H the norm drift is
the physics, not an error. A trajectory whose norm exceeds the overflow
bound is truncated and flagged rather than rejected, because runaway growth
is the expected behavior in the complex-spectrum regimes.

The projective decomposition splits a trajectory as
psi = exp(alpha + i beta) psi_tilde with psi_tilde unit-norm: alpha tracks
gain/loss (exp(2 alpha) equals the squared norm), beta the dynamical phase
of the projective representative.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy.integrate import cumulative_simpson

from .errors import GridMismatch, NonFinite, StepTooLarge, ZeroNorm
from .linalg import as_state

__all__ = [
    "Trajectory",
    "integrate",
    "observables",
    "project_phase_decomposition",
]

#: Trajectories are truncated once the squared norm passes this bound.
OVERFLOW_NORM = 1e12

#: Stability bound on ||H||_F * h for the fixed-step integrator.
STEP_BOUND = 0.1


@dataclass
class Trajectory:
    """Ordered records of one integration run.

    Attributes
    ----------
    t : (N,) strictly increasing times.
    states : (N, dim) complex amplitudes, row i is psi(t_i).
    populations : (N, dim) bare-basis populations |psi_k|^2 (raw, not
        renormalized; for non-Hermitian evolution they may exceed 1).
    norm : (N,) squared norms <psi|psi>.
    fidelity_sym : optional (N,) |<psi|U|psi_ref>| (symmetry-weighted).
    fidelity_plain : optional (N,) |<psi|psi_ref>| / (|psi| |psi_ref|).
    alpha, beta : optional (N,) projective phase decomposition exponents.
    projected : optional (N, dim) unit-norm representatives psi_tilde.
    truncated : True when the run hit the overflow bound and stopped early.
    hamiltonian : the H(t) callable that produced the run (kept so later
        stages can evaluate expectation values on the same grid).
    h_nodes : optional (N, dim, dim) cache of H evaluated at the grid nodes.
    phase_diagnostics : consistency numbers filled by the decomposition.
    """

    t: np.ndarray
    states: np.ndarray
    populations: np.ndarray
    norm: np.ndarray
    fidelity_sym: Optional[np.ndarray] = None
    fidelity_plain: Optional[np.ndarray] = None
    alpha: Optional[np.ndarray] = None
    beta: Optional[np.ndarray] = None
    projected: Optional[np.ndarray] = None
    truncated: bool = False
    hamiltonian: Optional[Callable[[float], np.ndarray]] = field(
        default=None, repr=False)
    h_nodes: Optional[np.ndarray] = field(default=None, repr=False)
    phase_diagnostics: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def populations_renormalized(self) -> np.ndarray:
        """Populations divided by the squared norm (sum to one per row)."""
        return self.populations / self.norm[:, None]


def _validate_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float).reshape(-1)
    if grid.size < 2:
        raise GridMismatch("grid needs at least two points")
    if not np.all(np.diff(grid) > 0):
        raise GridMismatch("grid must be strictly increasing")
    return grid


def _finish(grid, states, H_of_t, h_nodes, truncated) -> Trajectory:
    populations = np.abs(states) ** 2
    norm = populations.sum(axis=1)
    return Trajectory(t=grid, states=states, populations=populations,
                      norm=norm, truncated=truncated, hamiltonian=H_of_t,
                      h_nodes=h_nodes)


def _rk4_fixed(H_of_t, psi0, grid, H_stack, overflow_norm) -> Trajectory:
    N = grid.shape[0]
    dim = psi0.shape[0]
    if H_stack is None:
        times = np.empty(2 * N - 1)
        times[0::2] = grid
        times[1::2] = 0.5 * (grid[:-1] + grid[1:])
        H_stack = np.stack([np.asarray(H_of_t(t), dtype=complex)
                            for t in times])
    if H_stack.shape != (2 * N - 1, dim, dim):
        raise GridMismatch(
            f"H_stack shape {H_stack.shape} does not match grid/midpoints"
        )
    if not np.all(np.isfinite(H_stack)):
        raise NonFinite("Hamiltonian stack contains NaN or Inf")

    # stability precheck on every step against the local Frobenius norm
    steps = np.diff(grid)
    hnorm = np.sqrt((np.abs(H_stack) ** 2).sum(axis=(1, 2)))
    node_bound = np.maximum.reduce([hnorm[0:-2:2], hnorm[1::2], hnorm[2::2]])
    worst = float(np.max(node_bound * steps))
    if worst > STEP_BOUND:
        raise StepTooLarge(
            f"max ||H||*h = {worst:.3g} exceeds {STEP_BOUND}; shrink the step"
        )

    states = np.empty((N, dim), dtype=complex)
    y = psi0.astype(complex)
    states[0] = y
    cutoff = overflow_norm
    for i in range(N - 1):
        h = steps[i]
        H1 = H_stack[2 * i]
        H2 = H_stack[2 * i + 1]
        H3 = H_stack[2 * i + 2]
        k1 = -1j * (H1 @ y)
        k2 = -1j * (H2 @ (y + (0.5 * h) * k1))
        k3 = -1j * (H2 @ (y + (0.5 * h) * k2))
        k4 = -1j * (H3 @ (y + h * k3))
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        n2 = float(np.real(y.conj() @ y))
        if n2 > cutoff:
            states = states[: i + 1]
            grid_cut = grid[: i + 1]
            return _finish(grid_cut, states, H_of_t, H_stack[: 2 * i + 1 : 2],
                           truncated=True)
        states[i + 1] = y
    return _finish(grid, states, H_of_t, H_stack[0::2], truncated=False)


def _rk4_step(H_of_t, t, y, h):
    k1 = -1j * (np.asarray(H_of_t(t), dtype=complex) @ y)
    Hm = np.asarray(H_of_t(t + 0.5 * h), dtype=complex)
    k2 = -1j * (Hm @ (y + (0.5 * h) * k1))
    k3 = -1j * (Hm @ (y + (0.5 * h) * k2))
    k4 = -1j * (np.asarray(H_of_t(t + h), dtype=complex) @ (y + h * k3))
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _rk4_adaptive(H_of_t, psi0, grid, tol, overflow_norm) -> Trajectory:
    N = grid.shape[0]
    dim = psi0.shape[0]
    states = np.empty((N, dim), dtype=complex)
    y = psi0.astype(complex)
    states[0] = y
    for i in range(N - 1):
        t = grid[i]
        t_end = grid[i + 1]
        h = t_end - t
        h_floor = 1e-12 * (t_end - t)
        while t < t_end - 1e-15 * max(abs(t_end), 1.0):
            if h < h_floor:
                raise StepTooLarge(
                    f"adaptive step collapsed below {h_floor:.3g} at t={t:.6g}"
                )
            h = min(h, t_end - t)
            Hnorm = float(np.linalg.norm(np.asarray(H_of_t(t), dtype=complex)))
            if Hnorm * h > STEP_BOUND:
                h = STEP_BOUND / Hnorm
            full = _rk4_step(H_of_t, t, y, h)
            half = _rk4_step(H_of_t, t, y, 0.5 * h)
            double = _rk4_step(H_of_t, t + 0.5 * h, half, 0.5 * h)
            err = float(np.linalg.norm(full - double)) / 15.0
            scale = tol * max(float(np.linalg.norm(y)), 1.0)
            if err <= scale:
                t = t + h
                y = double
                grow = 2.0 if err == 0.0 else min(
                    2.0, 0.9 * (scale / err) ** 0.2)
                h = h * grow
            else:
                h = h * max(0.1, 0.9 * (scale / err) ** 0.2)
        n2 = float(np.real(y.conj() @ y))
        if n2 > overflow_norm:
            return _finish(grid[: i + 2],
                           np.vstack([states[: i + 1], y[None, :]]),
                           H_of_t, None, truncated=True)
        states[i + 1] = y
    return _finish(grid, states, H_of_t, None, truncated=False)


def integrate(H_of_t, psi0, grid, method: str = "rk4-fixed",
              H_stack: Optional[np.ndarray] = None,
              adaptive_tol: float = 1e-10,
              overflow_norm: float = OVERFLOW_NORM) -> Trajectory:
    """Integrate i d/dt psi = H(t) psi on a time grid.

    Parameters
    ----------
    H_of_t : callable t -> (dim, dim) complex matrix.
    psi0 : (dim,) initial amplitudes.
    grid : strictly increasing times; the state is recorded at every node.
    method : "rk4-fixed" (classical RK4, one step per grid interval) or
        "rk4-adaptive" (step-doubling error control between nodes).
    H_stack : optional precomputed (2N-1, dim, dim) stack of H at the grid
        nodes interleaved with interval midpoints (vectorized fast path for
        the fixed-step method).
    adaptive_tol : local error tolerance for the adaptive method.
    overflow_norm : squared-norm bound; beyond it the trajectory is cut and
        flagged ``truncated`` (complex-spectrum blowup is expected behavior).

    Raises
    ------
    StepTooLarge
        when ||H||_F * h exceeds 0.1 anywhere on a fixed-step run.
    """
    grid = _validate_grid(grid)
    psi0 = as_state(psi0)
    if method == "rk4-fixed":
        return _rk4_fixed(H_of_t, psi0, grid, H_stack, overflow_norm)
    if method == "rk4-adaptive":
        return _rk4_adaptive(H_of_t, psi0, grid, adaptive_tol, overflow_norm)
    raise ValueError(f"unknown method {method!r}")


def _grids_match(a: np.ndarray, b: np.ndarray) -> bool:
    if a.shape != b.shape:
        return False
    scale = max(float(np.max(np.abs(a))), 1.0)
    return bool(np.max(np.abs(a - b)) <= 1e-12 * scale)


def observables(traj: Trajectory, U=None,
                reference: Optional[Trajectory] = None) -> Trajectory:
    """Fill the fidelity records of a trajectory.

    Parameters
    ----------
    U : optional symmetry matrix, either a constant matrix or a callable
        t -> matrix. With U given, the symmetry-weighted fidelity
        F(t) = |<psi(t)|U(t)|psi_ref(t)>| is recorded (this is the natural
        fidelity for pseudo-Hermitian dynamics, and is not normalized);
        the plain normalized overlap is recorded alongside.
    reference : trajectory on the same grid supplying psi_ref.

    Populations and norms are always present (the integrator fills them);
    this stage only adds reference-dependent columns.
    """
    if reference is None:
        return traj
    n = traj.t.shape[0]
    if not _grids_match(traj.t, reference.t[:n] if reference.t.shape[0] >= n
                        else reference.t):
        raise GridMismatch("reference grid differs from trajectory grid")
    ref_states = reference.states[:n]
    plain_num = np.abs(np.einsum("ij,ij->i", traj.states.conj(), ref_states))
    denom = np.sqrt(traj.norm * reference.norm[:n])
    with np.errstate(invalid="ignore", divide="ignore"):
        fidelity_plain = np.where(denom > 0, plain_num / denom, 0.0)
    fidelity_sym = None
    if U is not None:
        if callable(U):
            Umat = np.stack([np.asarray(U(t), dtype=complex) for t in traj.t])
            ur = np.einsum("ikl,il->ik", Umat, ref_states)
        else:
            ur = ref_states @ np.asarray(U, dtype=complex).T
        fidelity_sym = np.abs(np.einsum("ij,ij->i", traj.states.conj(), ur))
    return replace(traj, fidelity_sym=fidelity_sym,
                   fidelity_plain=fidelity_plain)


def _aligned_log_derivative(states: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Real part of i<psi|d psi/dt> on gauge-aligned unit-norm snapshots.

    Neighbors are phase-rotated so their overlap with the center snapshot is
    real and positive before differencing; what survives is the curvature of
    the projective path, which is the geometric piece of the phase rate.
    """
    N = states.shape[0]
    g = np.zeros(N)
    if N < 3:
        return g
    ov_next = np.einsum("ij,ij->i", states[1:-1].conj(), states[2:])
    ov_prev = np.einsum("ij,ij->i", states[1:-1].conj(), states[:-2])
    phase_next = ov_next / np.abs(ov_next)
    phase_prev = ov_prev / np.abs(ov_prev)
    fwd = states[2:] / phase_next[:, None]
    bwd = states[:-2] / phase_prev[:, None]
    dt = (t[2:] - t[:-2])[:, None]
    dpsi = (fwd - bwd) / dt
    g[1:-1] = np.real(1j * np.einsum("ij,ij->i", states[1:-1].conj(), dpsi))
    g[0] = g[1]
    g[-1] = g[-2]
    return g


def project_phase_decomposition(traj: Trajectory, H_of_t=None) -> Trajectory:
    """Fill alpha, beta, and the unit-norm projected states.

    The decomposition is psi = exp(alpha + i beta) psi_tilde with
    alpha = ln(norm)/2, so exp(2 alpha) reproduces the recorded squared norm
    exactly; beta integrates beta_dot = -Hbar_R + i<psi_tilde|d psi_tilde>
    (composite Simpson), where Hbar_R is the expectation of the Hermitian
    part on the normalized state and the geometric term comes from
    gauge-aligned finite differences. beta(t0) = 0.

    The diagnostic ``alpha_dot_mismatch`` reports how well the independent
    identity alpha_dot = Hbar_I holds on the run.
    """
    H_of_t = H_of_t or traj.hamiltonian
    if np.any(traj.norm <= 0.0) or not np.all(np.isfinite(traj.norm)):
        raise ZeroNorm("trajectory norm vanished or is not finite")
    alpha = 0.5 * np.log(traj.norm)
    unit = traj.states / np.exp(alpha)[:, None]

    if traj.h_nodes is not None:
        H_nodes = traj.h_nodes
    elif H_of_t is not None:
        H_nodes = np.stack([np.asarray(H_of_t(t), dtype=complex)
                            for t in traj.t])
    else:
        raise ValueError("no Hamiltonian available for the phase decomposition")
    expect = np.einsum("ij,ijk,ik->i", unit.conj(), H_nodes, unit)
    hbar_r = np.real(expect)
    hbar_i = np.imag(expect)

    g = _aligned_log_derivative(unit, traj.t)
    beta = cumulative_simpson(-hbar_r + g, x=traj.t, initial=0.0)
    projected = unit * np.exp(-1j * beta)[:, None]

    dalpha = np.gradient(alpha, traj.t)
    interior = slice(1, -1) if alpha.shape[0] > 2 else slice(None)
    mismatch = float(np.max(np.abs(dalpha[interior] - hbar_i[interior])))
    diagnostics = dict(traj.phase_diagnostics)
    diagnostics["alpha_dot_mismatch"] = mismatch
    diagnostics["geometric_term_max"] = float(np.max(np.abs(g)))
    return replace(traj, alpha=alpha, beta=beta, projected=projected,
                   phase_diagnostics=diagnostics)
