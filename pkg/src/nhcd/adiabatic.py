"""Adiabaticity diagnostics, Berry connections, and adiabatic references.

For a non-Hermitian H(t) with biorthonormal eigensystem {E_n, |E_n^r>,
<E_n^l|}, the adiabatic approximation holds when the metric

    eta_nm = |<E_n^l| d/dt E_m^r>| / |omega_nm| * exp(-Im W_nm)

stays small for every pair n != m, where omega_nm = E_n - E_m and
W_nm(t) = int_t0^t omega_nm dt'. The exponential factor is the non-Hermitian
novelty: an imaginary level spacing amplifies transitions no matter how slow
the drive. The Berry connection A_n = i <E_n^l| d/dt E_n^r> generalizes the
Hermitian one and is complex in general; its imaginary part feeds gain/loss
into the accumulated geometric phase.

Eigenvector time derivatives are central finite differences. On an analytic
eigenpath (``Schedule.smooth_eigenpath``) snapshots are differenced as-is,
preserving the path's own gauge; on a numeric eigenpath the neighbors are
first gauge-matched to the center snapshot, since independently computed
eigenvectors carry arbitrary phases.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import cumulative_simpson, simpson

from .dynamics import Trajectory
from .errors import DegenerateSpectrum, WindowExceeded
from .linalg import EigenSystem, full_eigensystem, match_to_previous
from .symmetry import SymmetrySpec, left_from_right, pair_spectrum

__all__ = [
    "Schedule",
    "PhaseLedger",
    "schedule_from_hamiltonian",
    "adiabatic_metric",
    "metric_profile",
    "berry_connection",
    "accumulate_phases",
    "adiabatic_reference",
]

#: Finite-difference step as a fraction of the window length.
DELTA_FRACTION = 1e-4


def _simpson_c(y, x) -> complex:
    y = np.asarray(y)
    if np.iscomplexobj(y):
        return complex(simpson(y.real, x=x)) + 1j * complex(simpson(y.imag, x=x))
    return complex(simpson(y, x=x))


def _cumulative_simpson_c(y, x) -> np.ndarray:
    y = np.asarray(y)
    if np.iscomplexobj(y):
        return (cumulative_simpson(y.real, x=x, initial=0.0)
                + 1j * cumulative_simpson(y.imag, x=x, initial=0.0))
    return cumulative_simpson(y, x=x, initial=0.0)


@dataclass
class Schedule:
    """A time-parameterized Hamiltonian family on a declared window.

    Attributes
    ----------
    window : (t0, t1) in units of the inverse frequency scale.
    hamiltonian : callable t -> (dim, dim) complex matrix.
    parameters : callable t -> dict of named real parameter values.
    parameter_rates : callable t -> dict of named real time derivatives.
    eigensystem : callable t -> binormalized :class:`EigenSystem`.
    symmetry : optional :class:`SymmetrySpec` of the family.
    smooth_eigenpath : True when ``eigensystem`` is an analytic section that
        is smooth in t (finite differences may then use it directly; its
        gauge is meaningful). False for numeric eigensystems whose per-call
        gauge is arbitrary.
    hamiltonian_batch : optional vectorized callable ts -> (N, dim, dim).
    eigenpath_batch : optional vectorized callable ts -> (values (N, n),
        rights (N, dim, n), lefts (N, n, dim)) for fast path sampling.
    """

    window: tuple
    hamiltonian: Callable[[float], np.ndarray]
    parameters: Callable[[float], dict]
    parameter_rates: Callable[[float], dict]
    eigensystem: Callable[[float], EigenSystem]
    symmetry: Optional[SymmetrySpec] = None
    smooth_eigenpath: bool = False
    hamiltonian_batch: Optional[Callable] = field(default=None, repr=False)
    eigenpath_batch: Optional[Callable] = field(default=None, repr=False)

    def require_inside(self, *times) -> None:
        t0, t1 = self.window
        tol = 1e-12 * max(abs(t0), abs(t1), 1.0)
        for t in times:
            if t < t0 - tol or t > t1 + tol:
                raise WindowExceeded(
                    f"t = {t:.6g} outside window [{t0:.6g}, {t1:.6g}]"
                )

    def default_delta(self) -> float:
        t0, t1 = self.window
        return DELTA_FRACTION * (t1 - t0)


@dataclass
class PhaseLedger:
    """Accumulated phases of one eigenstate over an interval.

    ``dynamic`` is -int E_n dt (complex when the eigenvalue is complex),
    ``geometric`` is int A_n dt; the adiabatic state carries
    exp(i dynamic + i geometric). ``imw`` holds Im W_nm against every
    partner m (the amplification exponents of the adiabatic metric).
    """

    dynamic: complex
    geometric: complex
    imw: np.ndarray


def schedule_from_hamiltonian(H_of_t, window, symmetry: Optional[SymmetrySpec] = None,
                              parameters=None, parameter_rates=None) -> Schedule:
    """Wrap a bare H(t) callable into a Schedule with a numeric eigenpath.

    The eigensystem is recomputed at every requested time (adjoint solve plus
    binormalization) with a canonical per-snapshot gauge: each right
    eigenvector's largest-modulus component is made real and positive. When a
    symmetry is supplied, its U-construction replaces the adjoint solve for
    the left eigenvectors and the pairing map is filled in.
    """

    def eigensystem(t: float) -> EigenSystem:
        H = np.asarray(H_of_t(t), dtype=complex)
        es = full_eigensystem(H)
        rights = es.rights.copy()
        lefts = es.lefts.copy()
        for k in range(es.n_states):
            idx = int(np.argmax(np.abs(rights[:, k])))
            ph = rights[idx, k] / abs(rights[idx, k])
            rights[:, k] /= ph
            lefts[k] *= ph
        if symmetry is not None:
            pairing = pair_spectrum(es.values, symmetry.kind)
            lefts, _ = left_from_right(rights, es.values, symmetry, pairing)
            return EigenSystem(values=es.values, rights=rights, lefts=lefts,
                               pairing=pairing)
        return EigenSystem(values=es.values, rights=rights, lefts=lefts)

    return Schedule(
        window=tuple(window),
        hamiltonian=H_of_t,
        parameters=parameters or (lambda t: {}),
        parameter_rates=parameter_rates or (lambda t: {}),
        eigensystem=eigensystem,
        symmetry=symmetry,
        smooth_eigenpath=False,
    )


def _aligned_snapshot(s: Schedule, t: float, center: EigenSystem) -> EigenSystem:
    es = s.eigensystem(t)
    if s.smooth_eigenpath:
        return es
    return match_to_previous(es, center)


def _derivative_at(s: Schedule, t: float, delta: Optional[float] = None):
    """Center snapshot and d/dt of the right eigenvectors at time t.

    Uses a central difference in the interior and second-order one-sided
    stencils within ``delta`` of the window edges, so no evaluation leaves
    the window.
    """
    delta = delta or s.default_delta()
    t0, t1 = s.window
    s.require_inside(t)
    center = s.eigensystem(t)
    if t - delta >= t0 and t + delta <= t1:
        plus = _aligned_snapshot(s, t + delta, center)
        minus = _aligned_snapshot(s, t - delta, center)
        d_rights = (plus.rights - minus.rights) / (2.0 * delta)
    elif t + 2 * delta <= t1:
        p1 = _aligned_snapshot(s, t + delta, center)
        p2 = _aligned_snapshot(s, t + 2 * delta, center)
        d_rights = (-3.0 * center.rights + 4.0 * p1.rights - p2.rights) / (2.0 * delta)
    elif t - 2 * delta >= t0:
        m1 = _aligned_snapshot(s, t - delta, center)
        m2 = _aligned_snapshot(s, t - 2 * delta, center)
        d_rights = (3.0 * center.rights - 4.0 * m1.rights + m2.rights) / (2.0 * delta)
    else:
        raise WindowExceeded(
            f"window too short for finite differencing with delta {delta:.3g}"
        )
    return center, d_rights


def _values_along(s: Schedule, ts: np.ndarray) -> np.ndarray:
    """Eigenvalues sampled along the path with consistent state indexing."""
    if s.eigenpath_batch is not None:
        values, _, _ = s.eigenpath_batch(ts)
        return values
    if s.smooth_eigenpath:
        return np.stack([s.eigensystem(t).values for t in ts])
    prev = s.eigensystem(ts[0])
    rows = [prev.values]
    for t in ts[1:]:
        prev = match_to_previous(s.eigensystem(t), prev)
        rows.append(prev.values)
    return np.stack(rows)


def adiabatic_metric(s: Schedule, t: float, n: int, m: int,
                     delta: Optional[float] = None,
                     w_samples: int = 801) -> float:
    """The non-Hermitian adiabaticity ratio eta_nm(t).

    Parameters
    ----------
    s : schedule supplying the eigenpath.
    t : evaluation time (interior of the window).
    n, m : state indices, n != m; the metric gauges how strongly state m's
        motion drives transitions into state n.
    delta : finite-difference step (default 1e-4 of the window).
    w_samples : Simpson nodes for accumulating W_nm from the window start.

    Returns eta_nm >= 0. A real spectrum gives exp(-Im W) = 1 and the metric
    reduces to the familiar Hermitian ratio.
    """
    if n == m:
        raise ValueError("adiabatic_metric needs two distinct states")
    center, d_rights = _derivative_at(s, t, delta)
    omega = center.values[n] - center.values[m]
    scale = float(np.max(np.abs(center.values))) or 1.0
    if abs(omega) <= 1e-12 * scale:
        raise DegenerateSpectrum(
            f"omega_{n}{m} = {omega:.3e} too small at t = {t:.6g}"
        )
    coupling = abs(center.lefts[n] @ d_rights[:, m])
    t0 = s.window[0]
    if t > t0:
        count = w_samples if w_samples % 2 == 1 else w_samples + 1
        ts = np.linspace(t0, t, count)
        values = _values_along(s, ts)
        imw_nm = simpson(np.imag(values[:, n] - values[:, m]), x=ts)
    else:
        imw_nm = 0.0
    return float(coupling / abs(omega) * np.exp(-imw_nm))


def metric_profile(s: Schedule, ts, delta: Optional[float] = None,
                   w_grid: int = 2001) -> np.ndarray:
    """All-pairs adiabatic metric sampled on a grid, shape (N, n, n).

    ``out[i, n, m]`` is eta_nm at ts[i] (diagonal zero). The accumulated
    Im W_nm exponents come from one shared fine grid starting at the window
    edge, interpolated to the sample times; eigenvector derivatives use the
    same finite differences as :func:`adiabatic_metric`. Pairs closer than
    1e-12 of the spectral scale are reported as +inf rather than raising.
    """
    ts = np.asarray(ts, dtype=float).reshape(-1)
    s.require_inside(ts.min(), ts.max())
    delta = delta or s.default_delta()
    t0 = s.window[0]
    count = w_grid if w_grid % 2 == 1 else w_grid + 1
    tf = np.linspace(t0, max(float(ts.max()), t0 + delta), count)
    values_f = _values_along(s, tf)
    nst = values_f.shape[1]
    acc_im = cumulative_simpson(values_f.imag, x=tf, initial=0.0, axis=0)
    imw = np.empty((ts.size, nst, nst))
    for n in range(nst):
        for m in range(nst):
            imw[:, n, m] = np.interp(ts, tf, acc_im[:, n] - acc_im[:, m])

    if s.eigenpath_batch is not None:
        t1 = s.window[1]
        tp = np.minimum(ts + delta, t1)
        tm = np.maximum(ts - delta, t0)
        _, rp, _ = s.eigenpath_batch(tp)
        _, rm, _ = s.eigenpath_batch(tm)
        values, _, lefts = s.eigenpath_batch(ts)
        d_rights = (rp - rm) / (tp - tm)[:, None, None]
    else:
        values = np.empty((ts.size, nst), dtype=complex)
        lefts = np.empty((ts.size, nst, nst), dtype=complex)
        d_rights = np.empty((ts.size, nst, nst), dtype=complex)
        for i, t in enumerate(ts):
            center, dr = _derivative_at(s, float(t), delta)
            values[i], lefts[i], d_rights[i] = center.values, center.lefts, dr

    coupling = np.abs(np.einsum("ind,idm->inm", lefts, d_rights))
    omega = np.abs(values[:, :, None] - values[:, None, :])
    scale = np.maximum(np.abs(values).max(axis=1), 1e-300)
    tiny = omega <= 1e-12 * scale[:, None, None]
    eta = np.where(tiny, np.inf,
                   coupling / np.where(tiny, 1.0, omega) * np.exp(-imw))
    for k in range(nst):
        eta[:, k, k] = 0.0
    return eta


def berry_connection(s: Schedule, t: float, n: int,
                     delta: Optional[float] = None) -> complex:
    """Berry connection A_n(t) = i <E_n^l| d/dt E_n^r>.

    On an analytic eigenpath the result is the connection in that path's
    own gauge (the meaningful one for closed-form comparisons); on a numeric
    eigenpath the finite difference runs over gauge-matched snapshots.
    """
    center, d_rights = _derivative_at(s, t, delta)
    return complex(1j * (center.lefts[n] @ d_rights[:, n]))


def _connection_along(s: Schedule, ts: np.ndarray, n: int,
                      delta: float) -> np.ndarray:
    """A_n sampled on a grid, vectorized through the batch eigenpath."""
    if s.eigenpath_batch is None:
        return np.array([berry_connection(s, t, n, delta) for t in ts])
    t0, t1 = s.window
    tp = np.minimum(ts + delta, t1)
    tm = np.maximum(ts - delta, t0)
    _, rp, _ = s.eigenpath_batch(tp)
    _, rm, _ = s.eigenpath_batch(tm)
    _, _, lefts = s.eigenpath_batch(ts)
    d_path = (rp[:, :, n] - rm[:, :, n]) / (tp - tm)[:, None]
    return 1j * np.einsum("id,id->i", lefts[:, n, :], d_path)


def accumulate_phases(s: Schedule, interval, n: int,
                      samples: int = 2001,
                      delta: Optional[float] = None) -> PhaseLedger:
    """Dynamic and geometric phases of state n over an interval.

    dynamic = -int E_n dt'; geometric = int A_n dt' (the adiabatic state
    carries exp(i dynamic + i geometric)); the Im W_nm accumulations against
    all partners are returned alongside. Quadrature is composite Simpson.
    """
    a, b = interval
    s.require_inside(a, b)
    delta = delta or s.default_delta()
    count = samples if samples % 2 == 1 else samples + 1
    ts = np.linspace(a, b, count)
    values = _values_along(s, ts)
    conn = _connection_along(s, ts, n, delta)
    dynamic = -_simpson_c(values[:, n], x=ts)
    geometric = _simpson_c(conn, x=ts)
    imw = np.array([
        float(simpson(np.imag(values[:, n] - values[:, m]), x=ts))
        for m in range(values.shape[1])
    ])
    return PhaseLedger(dynamic=dynamic, geometric=geometric, imw=imw)


def adiabatic_reference(s: Schedule, grid, n: int,
                        include_phases: bool = True,
                        delta: Optional[float] = None) -> Trajectory:
    """The adiabatic target trajectory |psi_n(t)> on a grid.

    |psi_n(t)> = exp(-i int E_n dt' - int <E_n^l|d/dt' E_n^r> dt') |E_n^r(t)>,
    the state a perfect counterdiabatic drive must reproduce. With
    ``include_phases=False`` the bare eigenpath |E_n^r(t)> is emitted instead
    (the target of the phase-dropping CD-only drives).
    """
    grid = np.asarray(grid, dtype=float).reshape(-1)
    s.require_inside(grid[0], grid[-1])
    delta = delta or s.default_delta()
    if s.eigenpath_batch is not None:
        values, rights, _ = s.eigenpath_batch(grid)
        path = rights[:, :, n]
        evals = values[:, n]
    elif s.smooth_eigenpath:
        snaps = [s.eigensystem(t) for t in grid]
        path = np.stack([es.rights[:, n] for es in snaps])
        evals = np.array([es.values[n] for es in snaps])
    else:
        prev = s.eigensystem(grid[0])
        snaps = [prev]
        for t in grid[1:]:
            prev = match_to_previous(s.eigensystem(t), prev)
            snaps.append(prev)
        path = np.stack([es.rights[:, n] for es in snaps])
        evals = np.array([es.values[n] for es in snaps])

    if include_phases:
        conn = _connection_along(s, grid, n, delta)
        exponent = (-1j * _cumulative_simpson_c(evals, x=grid)
                    + 1j * _cumulative_simpson_c(conn, x=grid))
        states = path * np.exp(exponent)[:, None]
    else:
        states = path
    populations = np.abs(states) ** 2
    return Trajectory(t=grid, states=states, populations=populations,
                      norm=populations.sum(axis=1),
                      hamiltonian=s.hamiltonian)
