"""Three-level driven models with closed-form spectral data.

The family is the lossy stimulated-Raman arrangement

    H = 1/2 [[i*g1, Op,   0 ],
             [Op*,  i*g2, Os],
             [0,    Os*,  i*g3]]

specialized two ways. The pseudo-Hermitian instance takes g1 = -g3 = gamma,
g2 = 0, Op = Os = omega*exp(i*phi)/sqrt(2); it is pseudo-Hermitian under an
anti-diagonal involution U(phi) and its spectrum {0, +/- Ot*sqrt(-cos 2th)}
with tan(th) = omega/gamma, Ot = sqrt(omega^2 + gamma^2)/2 is real for
omega > gamma and a conjugate pair for omega < gamma, with an exceptional
point at omega = gamma. The antipseudo-Hermitian instance takes g1 = g3 = 0,
g2 = 2*gamma with real pulses Op, Os; under U = diag(1, -1, 1) its spectrum
{0, i/2*(gamma +/- sqrt(gamma^2 - Om^2))}, Om = sqrt(Op^2 + Os^2), is purely
imaginary for gamma > Om and conjugate-paired otherwise, with the exceptional
point at gamma = Om.

Eigenstates, their parameter derivatives, Berry connections, and the
counterdiabatic matrices are all closed forms here, giving every numeric
assembly in the package an independent analytic route to check against. The
closed forms use principal square-root branches throughout, which keeps them
valid on both sides of the exceptional point (with the conjugation pairing
swapping the +/- states on the complex side).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .adiabatic import Schedule
from .cd import CDBundle
from .errors import EPCrossing, NonFinite
from .linalg import EigenSystem
from .symmetry import SymmetrySpec

__all__ = [
    "StirapParams",
    "ModelBundle",
    "stirap_hamiltonian",
    "pseudo_symmetry_matrix",
    "antipseudo_symmetry_matrix",
    "pseudo_instance",
    "antipseudo_instance",
    "reference_schedules",
    "build_model",
    "CASES",
]

CASES = ("pseudo-real", "pseudo-complex", "antipseudo")

#: Default minimum of |omega - gamma| / max(omega, gamma) kept clear of the
#: exceptional point by the instance constructors.
EP_GUARD_FRACTION = 1e-3

_SQRT2 = np.sqrt(2.0)


@dataclass
class StirapParams:
    """Instantaneous couplings of the three-level Hamiltonian.

    ``omega_p``/``omega_s`` are the pump and Stokes Rabi frequencies (complex
    in general); ``gamma1..3`` the per-level gain (+) or loss (-) rates. All
    in units of the schedule's frequency unit.
    """

    omega_p: complex
    omega_s: complex
    gamma1: float
    gamma2: float
    gamma3: float

    def __post_init__(self):
        vals = (self.omega_p, self.omega_s, self.gamma1, self.gamma2,
                self.gamma3)
        if not all(np.isfinite(v) for v in vals):
            raise NonFinite("StirapParams entries must be finite")


def stirap_hamiltonian(p: StirapParams) -> np.ndarray:
    """The displayed three-level matrix 1/2 [[ig1, Op, 0], ...]."""
    return 0.5 * np.array([
        [1j * p.gamma1, p.omega_p, 0.0],
        [np.conj(p.omega_p), 1j * p.gamma2, p.omega_s],
        [0.0, np.conj(p.omega_s), 1j * p.gamma3],
    ], dtype=complex)


def pseudo_symmetry_matrix(phi: float = 0.0) -> np.ndarray:
    """Anti-diagonal involution making the pseudo instance symmetric."""
    return np.array([
        [0.0, 0.0, np.exp(2j * phi)],
        [0.0, 1.0, 0.0],
        [np.exp(-2j * phi), 0.0, 0.0],
    ], dtype=complex)


def antipseudo_symmetry_matrix() -> np.ndarray:
    """diag(1, -1, 1), the antipseudo instance's involution."""
    return np.diag([1.0, -1.0, 1.0]).astype(complex)


def _as_times(t) -> np.ndarray:
    return np.atleast_1d(np.asarray(t, dtype=float))


def _vectorize(f: Callable) -> Callable:
    """Accept scalars or callables; make the callable array-capable."""
    if not callable(f):
        const = float(f)
        return lambda ts: np.full_like(np.asarray(ts, dtype=float), const)

    def wrapped(ts):
        ts = np.asarray(ts, dtype=float)
        try:
            out = np.asarray(f(ts), dtype=float)
            if out.shape == ts.shape:
                return out
        except (TypeError, ValueError):
            pass
        return np.array([float(f(t)) for t in np.atleast_1d(ts)])

    return wrapped


def _fd_rate(f: Callable, window) -> Callable:
    h = 1e-6 * (window[1] - window[0])

    def rate(ts):
        ts = np.asarray(ts, dtype=float)
        return (f(ts + h) - f(ts - h)) / (2.0 * h)

    return rate


# ---------------------------------------------------------------- pseudo ---

def _pseudo_path(omega, gamma, phi):
    """theta, scale, eigenvalues (N, 3), right columns (N, 3, 3)."""
    theta = np.arctan2(omega, gamma)
    scale = 0.5 * np.hypot(omega, gamma)
    c = (-np.cos(2.0 * theta)).astype(complex)
    s = np.sqrt(c)
    si, co = np.sin(theta), np.cos(theta)
    em = np.exp(-1j * phi)
    n = theta.size
    rights = np.empty((n, 3, 3), dtype=complex)
    rights[:, 0, 0] = -_SQRT2 * si / (2.0 * s)
    rights[:, 1, 0] = 1j * co * em / s
    rights[:, 2, 0] = _SQRT2 * si * em**2 / (2.0 * s)
    for k, sg in ((1, 1.0), (2, -1.0)):
        r = sg * s - 1j * co
        rights[:, 0, k] = si / (2.0 * s)
        rights[:, 1, k] = _SQRT2 * r * em / (2.0 * s)
        rights[:, 2, k] = r * r * em**2 / (2.0 * si * s)
    values = np.zeros((n, 3), dtype=complex)
    values[:, 1] = scale * s
    values[:, 2] = -scale * s
    return theta, scale, values, rights


def _pseudo_partials(theta, phi):
    """d/dtheta and d/dphi of the pseudo right columns, each (N, 3, 3)."""
    c = (-np.cos(2.0 * theta)).astype(complex)
    s = np.sqrt(c)
    s3 = c * s
    si, co = np.sin(theta), np.cos(theta)
    s2t = np.sin(2.0 * theta)
    em = np.exp(-1j * phi)
    n = theta.size
    dth = np.empty((n, 3, 3), dtype=complex)
    dph = np.zeros((n, 3, 3), dtype=complex)
    dth[:, 0, 0] = _SQRT2 * co / (2.0 * s3)
    dth[:, 1, 0] = -1j * em * si / s3
    dth[:, 2, 0] = -_SQRT2 * em**2 * co / (2.0 * s3)
    dph[:, 1, 0] = co * em / s
    dph[:, 2, 0] = -1j * _SQRT2 * si * em**2 / s
    for k, sg in ((1, 1.0), (2, -1.0)):
        r = sg * s - 1j * co
        dr = sg * s2t / s + 1j * si
        b = _SQRT2 * r * em / (2.0 * s)
        d = r * r * em**2 / (2.0 * si * s)
        dth[:, 0, k] = -co / (2.0 * s3)
        dth[:, 1, k] = _SQRT2 * em * (dr * c - r * s2t) / (2.0 * s3)
        dth[:, 2, k] = (em**2 * (2.0 * r * dr * si * c
                                 - r * r * (co * c + si * s2t))
                        / (2.0 * si**2 * s3))
        dph[:, 1, k] = -1j * b
        dph[:, 2, k] = -2j * d
    return dth, dph


def _u_lefts(rights, u_rows, pairing):
    """Left bra rows u_n <partner_n| U from precomputed <state| U rows.

    ``u_rows[:, k, :]`` is the row (state_k)^dagger U; pairing picks each
    state's conjugation partner.
    """
    rows = u_rows[:, list(pairing), :]
    overlap = np.einsum("nsc,ncs->ns", rows, rights)
    us = 1.0 / overlap
    return rows * us[:, :, None], us


def _pseudo_u_rows(rights, phi):
    """(state_k)^dagger U(phi) for every column, shape (N, 3, 3)."""
    conj = np.conj(rights)
    rows = np.empty_like(conj)
    rows[:, :, 0] = conj[:, 2, :] * np.exp(-2j * phi)[:, None]
    rows[:, :, 1] = conj[:, 1, :]
    rows[:, :, 2] = conj[:, 0, :] * np.exp(2j * phi)[:, None]
    return rows


def _pseudo_h1(theta, phi, thd, phd):
    """The displayed gauge-invariant CD correction of the pseudo model."""
    c2 = np.cos(2.0 * theta)
    e = np.exp(1j * phi)
    up = -e * (2.0 * thd + 1j * phd * np.sin(2.0 * theta)) / (2.0 * _SQRT2 * c2)
    dn = np.conj(e) * (2.0 * thd - 1j * phd * np.sin(2.0 * theta)) / (2.0 * _SQRT2 * c2)
    diag = np.sin(theta) ** 2 / c2 * phd
    n = theta.size
    h1 = np.zeros((n, 3, 3), dtype=complex)
    h1[:, 0, 0] = diag
    h1[:, 2, 2] = -diag
    h1[:, 0, 1] = up
    h1[:, 1, 2] = up
    h1[:, 1, 0] = dn
    h1[:, 2, 1] = dn
    return h1


def _pseudo_hcd(theta, phi, thd, phd):
    """The pseudo CD-only matrix (lower triangular in the bare basis).

    The diagonal is (i*k*thd, phd, 2*phd - i*k*thd) with
    k = cos(th)/(sin(th) cos(2th)); the i*k term multiplies the theta rate,
    matching the sum-over-states assembly in both spectral regimes.
    """
    c2 = np.cos(2.0 * theta)
    kap = np.cos(theta) / (np.sin(theta) * c2)
    g = _SQRT2 * np.exp(-1j * phi) * thd / c2
    n = theta.size
    hcd = np.zeros((n, 3, 3), dtype=complex)
    hcd[:, 0, 0] = 1j * kap * thd
    hcd[:, 1, 1] = phd
    hcd[:, 2, 2] = 2.0 * phd - 1j * kap * thd
    hcd[:, 1, 0] = g
    hcd[:, 2, 1] = g
    return hcd


def _pseudo_connections(theta):
    """Per-state (A_theta, A_phi) coefficients, shape (N, 3, 2)."""
    s = np.sqrt((-np.cos(2.0 * theta)).astype(complex))
    si, co = np.sin(theta), np.cos(theta)
    n = theta.size
    conn = np.empty((n, 3, 2), dtype=complex)
    conn[:, 0, 0] = 0.0
    conn[:, 0, 1] = 1.0
    conn[:, 1, 0] = -1.0 / (si * s)
    conn[:, 2, 0] = 1.0 / (si * s)
    conn[:, 1, 1] = 1.0 - 1j * co / s
    conn[:, 2, 1] = 1.0 + 1j * co / s
    return conn


# ------------------------------------------------------------ antipseudo ---

def _anti_angles(omega1, omega2, gamma):
    total = np.hypot(omega1, omega2)
    return np.arctan2(omega1, omega2), np.arctan2(total, gamma), total


def _anti_path(theta, phi, gamma, total):
    """Eigenvalues (N, 3) and right columns (N, 3, 3) of the antipseudo model."""
    w = np.sqrt(np.cos(2.0 * phi).astype(complex))
    q = np.sqrt(2.0 * w)
    sm = np.sqrt(np.cos(phi) - w)
    sp = np.sqrt(np.cos(phi) + w)
    fm, fp = sm / q, sp / q
    si, co = np.sin(theta), np.cos(theta)
    n = theta.size
    rights = np.empty((n, 3, 3), dtype=complex)
    rights[:, 0, 0] = co
    rights[:, 1, 0] = 0.0
    rights[:, 2, 0] = -si
    rights[:, 0, 1] = si * fm
    rights[:, 1, 1] = 1j * fp
    rights[:, 2, 1] = co * fm
    rights[:, 0, 2] = si * fp
    rights[:, 1, 2] = 1j * fm
    rights[:, 2, 2] = co * fp
    disc = np.sqrt((gamma**2 - total**2).astype(complex))
    values = np.zeros((n, 3), dtype=complex)
    values[:, 1] = 0.5j * (gamma + disc)
    values[:, 2] = 0.5j * (gamma - disc)
    return values, rights


def _anti_partials(theta, phi):
    """d/dtheta and d/dphi of the antipseudo right columns."""
    w = np.sqrt(np.cos(2.0 * phi).astype(complex))
    q = np.sqrt(2.0 * w)
    sm = np.sqrt(np.cos(phi) - w)
    sp = np.sqrt(np.cos(phi) + w)
    s2 = np.sin(2.0 * phi)
    dsm = (-np.sin(phi) + s2 / w) / (2.0 * sm)
    dsp = (-np.sin(phi) - s2 / w) / (2.0 * sp)
    dq = -s2 / (w * q)
    fm, fp = sm / q, sp / q
    dfm = (dsm * q - sm * dq) / q**2
    dfp = (dsp * q - sp * dq) / q**2
    si, co = np.sin(theta), np.cos(theta)
    n = theta.size
    dth = np.zeros((n, 3, 3), dtype=complex)
    dph = np.zeros((n, 3, 3), dtype=complex)
    dth[:, 0, 0] = -si
    dth[:, 2, 0] = -co
    dth[:, 0, 1] = co * fm
    dth[:, 2, 1] = -si * fm
    dth[:, 0, 2] = co * fp
    dth[:, 2, 2] = -si * fp
    dph[:, 0, 1] = si * dfm
    dph[:, 1, 1] = 1j * dfp
    dph[:, 2, 1] = co * dfm
    dph[:, 0, 2] = si * dfp
    dph[:, 1, 2] = 1j * dfm
    dph[:, 2, 2] = co * dfp
    return dth, dph


def _anti_u_rows(rights):
    conj = np.conj(rights)
    rows = conj.transpose(0, 2, 1).copy()
    rows[:, :, 1] *= -1.0
    return rows


def _anti_h1(theta, phi, thd, phd):
    """The displayed antipseudo CD matrix (equal to its CD-only form)."""
    c2 = np.cos(2.0 * phi)
    si, co = np.sin(theta), np.cos(theta)
    n = theta.size
    h1 = np.zeros((n, 3, 3), dtype=complex)
    h1[:, 0, 1] = si * phd / (2.0 * c2)
    h1[:, 1, 0] = -si * phd / (2.0 * c2)
    h1[:, 0, 2] = 1j * thd
    h1[:, 2, 0] = -1j * thd
    h1[:, 1, 2] = -co * phd / (2.0 * c2)
    h1[:, 2, 1] = co * phd / (2.0 * c2)
    return h1


# ----------------------------------------------------------------- bundle ---

@dataclass
class ModelBundle:
    """A model instance: schedule plus every closed-form companion.

    Attributes
    ----------
    kind : "pseudo" or "antipseudo".
    regime : "real" for a real spectrum (purely imaginary in the antipseudo
        case maps here too: the self-paired side of the exceptional point),
        "complex" for the conjugate-pair side.
    case : human-readable label, e.g. "pseudo-real".
    schedule : the time-parameterized family with its analytic eigenpath.
    symmetry : the involution spec, None for a pseudo instance whose phase
        phi(t) varies (the involution is then time dependent; use
        ``symmetry_at``).
    pairing : conjugation-partner permutation of (state0, state+, state-).
    params : t -> StirapParams.
    angles : t -> (theta, phi); angle_rates : t -> (theta_dot, phi_dot).
    analytic_eigensystem : t -> EigenSystem (closed forms, smooth section).
    analytic_connections : t -> (3, 2) per-state (A_theta, A_phi).
    analytic_cd : t -> CDBundle of the displayed closed-form matrices.
    state_derivatives : t -> (values, rights, d_rights) for CD synthesis.
    frequency_unit : the schedule's frequency unit.
    """

    kind: str
    regime: str
    case: str
    schedule: Schedule
    symmetry: Optional[SymmetrySpec]
    pairing: tuple
    params: Callable[[float], StirapParams]
    angles: Callable = field(repr=False, default=None)
    angle_rates: Callable = field(repr=False, default=None)
    analytic_eigensystem: Callable = field(repr=False, default=None)
    analytic_connections: Callable = field(repr=False, default=None)
    analytic_cd: Callable = field(repr=False, default=None)
    state_derivatives: Callable = field(repr=False, default=None)
    drive_batch: Callable = field(repr=False, default=None)
    symmetry_at: Callable = field(repr=False, default=None)
    frequency_unit: float = 1.0

    def drive_hamiltonian(self, drive: str) -> Callable[[float], np.ndarray]:
        """A single-time H(t) callable for one of the drive modes."""
        if drive not in ("bare", "full-cd", "cd-only"):
            raise ValueError(f"unknown drive {drive!r}")
        return lambda t: self.drive_batch(_as_times(t), drive)[0]


def _scan_regime(a, b, label_a, label_b, guard, what):
    """Uniform-sign check of a - b with an exceptional-point guard band."""
    gap = np.abs(a - b) / np.maximum(np.abs(a), np.abs(b))
    if float(gap.min()) <= guard:
        raise EPCrossing(
            f"{what}: min |{label_a}-{label_b}|/max = {float(gap.min()):.3e} "
            f"within the exceptional-point guard {guard:.1e}"
        )
    above = a > b
    if bool(above.all()):
        return "real"
    if not bool(above.any()):
        return "complex"
    raise EPCrossing(f"{what}: schedule crosses {label_a} = {label_b} "
                     "inside the window")


def pseudo_instance(omega, gamma, window, phi=0.0, rates: Optional[dict] = None,
                    ep_guard: float = EP_GUARD_FRACTION,
                    scan_samples: int = 2001,
                    frequency_unit: float = 1.0) -> ModelBundle:
    """Build the pseudo-Hermitian three-level instance.

    Parameters
    ----------
    omega, gamma : positive coupling and rate profiles (scalars or callables
        of t, array-capable callables preferred).
    window : (t0, t1) domain of validity.
    phi : drive phase profile (scalar or callable); the figures use 0.
    rates : optional closed-form time derivatives keyed "omega", "gamma",
        "phi"; finite differences fill in any missing ones.
    ep_guard : minimum relative distance from omega = gamma kept throughout.

    Raises
    ------
    EPCrossing
        When the schedule touches or crosses the exceptional point, or
        enters its guard band.
    """
    window = (float(window[0]), float(window[1]))
    omega_f, gamma_f, phi_f = _vectorize(omega), _vectorize(gamma), _vectorize(phi)
    rates = dict(rates or {})
    omega_d = _vectorize(rates["omega"]) if "omega" in rates else _fd_rate(omega_f, window)
    gamma_d = _vectorize(rates["gamma"]) if "gamma" in rates else _fd_rate(gamma_f, window)
    if "phi" in rates:
        phi_d = _vectorize(rates["phi"])
    elif callable(phi):
        phi_d = _fd_rate(phi_f, window)
    else:
        phi_d = _vectorize(0.0)

    ts = np.linspace(window[0], window[1], scan_samples)
    w, g = omega_f(ts), gamma_f(ts)
    if np.any(w <= 0.0) or np.any(g <= 0.0):
        raise ValueError("pseudo instance needs omega > 0 and gamma > 0 "
                         "throughout the window")
    regime = _scan_regime(w, g, "omega", "gamma", ep_guard, "pseudo instance")
    pairing = (0, 1, 2) if regime == "real" else (0, 2, 1)

    ph = phi_f(ts)
    phi_constant = float(np.ptp(ph)) < 1e-14
    symmetry = (SymmetrySpec(kind="pseudo", U=pseudo_symmetry_matrix(float(ph[0])))
                if phi_constant else None)

    def raw(ts_arr):
        ts_arr = np.asarray(ts_arr, dtype=float)
        return omega_f(ts_arr), gamma_f(ts_arr), phi_f(ts_arr)

    def angle_arrays(ts_arr):
        w_, g_, p_ = raw(ts_arr)
        wd_, gd_, pd_ = omega_d(ts_arr), gamma_d(ts_arr), phi_d(ts_arr)
        theta = np.arctan2(w_, g_)
        theta_d = (wd_ * g_ - gd_ * w_) / (w_**2 + g_**2)
        return theta, p_, theta_d, pd_

    def params(t: float) -> StirapParams:
        w_, g_, p_ = raw(_as_times(t))
        op = float(w_[0]) * np.exp(1j * float(p_[0])) / _SQRT2
        return StirapParams(omega_p=op, omega_s=op, gamma1=float(g_[0]),
                            gamma2=0.0, gamma3=-float(g_[0]))

    def hamiltonian_batch(ts_arr):
        w_, g_, p_ = raw(ts_arr)
        n = w_.size
        h = np.zeros((n, 3, 3), dtype=complex)
        coup = w_ * np.exp(1j * p_) / (2.0 * _SQRT2)
        h[:, 0, 0] = 0.5j * g_
        h[:, 2, 2] = -0.5j * g_
        h[:, 0, 1] = coup
        h[:, 1, 2] = coup
        h[:, 1, 0] = np.conj(coup)
        h[:, 2, 1] = np.conj(coup)
        return h

    def eigenpath_batch(ts_arr):
        w_, g_, p_ = raw(ts_arr)
        _, _, values, rights = _pseudo_path(w_, g_, p_)
        lefts, _ = _u_lefts(rights, _pseudo_u_rows(rights, p_), pairing)
        return values, rights, lefts

    def analytic_eigensystem(t: float) -> EigenSystem:
        values, rights, lefts = eigenpath_batch(_as_times(t))
        return EigenSystem(values=values[0], rights=rights[0], lefts=lefts[0],
                           pairing=np.array(pairing))

    def analytic_connections(t: float) -> np.ndarray:
        w_, g_, _ = raw(_as_times(t))
        return _pseudo_connections(np.arctan2(w_, g_))[0]

    def state_derivatives(t: float):
        ts_arr = _as_times(t)
        w_, g_, p_ = raw(ts_arr)
        theta, _, theta_d, phi_dv = angle_arrays(ts_arr)
        _, _, values, rights = _pseudo_path(w_, g_, p_)
        dth, dph = _pseudo_partials(theta, p_)
        d_rights = dth * theta_d[:, None, None] + dph * phi_dv[:, None, None]
        return values[0], rights[0], d_rights[0]

    def drive_batch(ts_arr, drive: str):
        ts_arr = np.asarray(ts_arr, dtype=float)
        h0 = hamiltonian_batch(ts_arr)
        if drive == "bare":
            return h0
        theta, p_, theta_d, phi_dv = angle_arrays(ts_arr)
        if drive == "full-cd":
            return h0 + _pseudo_h1(theta, p_, theta_d, phi_dv)
        if drive == "cd-only":
            return _pseudo_hcd(theta, p_, theta_d, phi_dv)
        raise ValueError(f"unknown drive {drive!r}")

    def analytic_cd(t: float) -> CDBundle:
        ts_arr = _as_times(t)
        h0 = hamiltonian_batch(ts_arr)[0]
        theta, p_, theta_d, phi_dv = angle_arrays(ts_arr)
        h1 = _pseudo_h1(theta, p_, theta_d, phi_dv)[0]
        hcd = _pseudo_hcd(theta, p_, theta_d, phi_dv)[0]
        return CDBundle(H0=h0, H1=h1, Htotal=h0 + h1, HcdOnly=hcd)

    def parameters(t: float) -> dict:
        w_, g_, p_ = raw(_as_times(t))
        return {"omega": float(w_[0]), "gamma": float(g_[0]),
                "phi": float(p_[0]),
                "theta": float(np.arctan2(w_[0], g_[0]))}

    def parameter_rates(t: float) -> dict:
        ts_arr = _as_times(t)
        _, _, theta_d, phi_dv = angle_arrays(ts_arr)
        return {"omega": float(omega_d(ts_arr)[0]),
                "gamma": float(gamma_d(ts_arr)[0]),
                "phi": float(phi_dv[0]), "theta": float(theta_d[0])}

    schedule = Schedule(
        window=window,
        hamiltonian=lambda t: hamiltonian_batch(_as_times(t))[0],
        parameters=parameters,
        parameter_rates=parameter_rates,
        eigensystem=analytic_eigensystem,
        symmetry=symmetry,
        smooth_eigenpath=True,
        hamiltonian_batch=hamiltonian_batch,
        eigenpath_batch=eigenpath_batch,
    )

    def angles(t: float):
        theta, p_, _, _ = angle_arrays(_as_times(t))
        return float(theta[0]), float(p_[0])

    def angle_rates(t: float):
        _, _, theta_d, phi_dv = angle_arrays(_as_times(t))
        return float(theta_d[0]), float(phi_dv[0])

    return ModelBundle(
        kind="pseudo", regime=regime, case=f"pseudo-{regime}",
        schedule=schedule, symmetry=symmetry, pairing=pairing,
        params=params, angles=angles, angle_rates=angle_rates,
        analytic_eigensystem=analytic_eigensystem,
        analytic_connections=analytic_connections,
        analytic_cd=analytic_cd, state_derivatives=state_derivatives,
        drive_batch=drive_batch,
        symmetry_at=lambda t: SymmetrySpec(
            kind="pseudo",
            U=pseudo_symmetry_matrix(float(phi_f(_as_times(t))[0]))),
        frequency_unit=frequency_unit,
    )


def antipseudo_instance(omega1, omega2, gamma, window,
                        rates: Optional[dict] = None,
                        ep_guard: float = EP_GUARD_FRACTION,
                        scan_samples: int = 2001,
                        frequency_unit: float = 1.0) -> ModelBundle:
    """Build the antipseudo-Hermitian three-level instance.

    Parameters
    ----------
    omega1, omega2 : positive pump/Stokes pulse profiles.
    gamma : positive middle-level gain rate profile (the Hamiltonian carries
        gamma2 = 2*gamma).
    window, rates, ep_guard : as in :func:`pseudo_instance`, with the
        exceptional point at sqrt(omega1^2 + omega2^2) = gamma.
    """
    window = (float(window[0]), float(window[1]))
    o1_f, o2_f, gamma_f = _vectorize(omega1), _vectorize(omega2), _vectorize(gamma)
    rates = dict(rates or {})
    o1_d = _vectorize(rates["omega1"]) if "omega1" in rates else _fd_rate(o1_f, window)
    o2_d = _vectorize(rates["omega2"]) if "omega2" in rates else _fd_rate(o2_f, window)
    gamma_d = _vectorize(rates["gamma"]) if "gamma" in rates else _fd_rate(gamma_f, window)

    ts = np.linspace(window[0], window[1], scan_samples)
    o1, o2, g = o1_f(ts), o2_f(ts), gamma_f(ts)
    if np.any(o1 <= 0.0) or np.any(o2 <= 0.0) or np.any(g <= 0.0):
        raise ValueError("antipseudo instance needs omega1, omega2, gamma > 0 "
                         "throughout the window")
    total = np.hypot(o1, o2)
    branch = _scan_regime(g, total, "gamma", "Omega", ep_guard,
                          "antipseudo instance")
    regime = "real" if branch == "real" else "complex"
    pairing = (0, 1, 2) if regime == "real" else (0, 2, 1)
    symmetry = SymmetrySpec(kind="antipseudo", U=antipseudo_symmetry_matrix())

    def raw(ts_arr):
        ts_arr = np.asarray(ts_arr, dtype=float)
        return o1_f(ts_arr), o2_f(ts_arr), gamma_f(ts_arr)

    def angle_arrays(ts_arr):
        o1_, o2_, g_ = raw(ts_arr)
        o1d_, o2d_, gd_ = o1_d(ts_arr), o2_d(ts_arr), gamma_d(ts_arr)
        theta, phi, total_ = _anti_angles(o1_, o2_, g_)
        theta_d = (o1d_ * o2_ - o2d_ * o1_) / (o1_**2 + o2_**2)
        total_d = (o1_ * o1d_ + o2_ * o2d_) / total_
        phi_d = (total_d * g_ - gd_ * total_) / (total_**2 + g_**2)
        return theta, phi, theta_d, phi_d, total_, g_

    def params(t: float) -> StirapParams:
        o1_, o2_, g_ = raw(_as_times(t))
        return StirapParams(omega_p=float(o1_[0]), omega_s=float(o2_[0]),
                            gamma1=0.0, gamma2=2.0 * float(g_[0]), gamma3=0.0)

    def hamiltonian_batch(ts_arr):
        o1_, o2_, g_ = raw(ts_arr)
        n = o1_.size
        h = np.zeros((n, 3, 3), dtype=complex)
        h[:, 1, 1] = 1j * g_
        h[:, 0, 1] = 0.5 * o1_
        h[:, 1, 0] = 0.5 * o1_
        h[:, 1, 2] = 0.5 * o2_
        h[:, 2, 1] = 0.5 * o2_
        return h

    def eigenpath_batch(ts_arr):
        o1_, o2_, g_ = raw(ts_arr)
        theta, phi, total_ = _anti_angles(o1_, o2_, g_)
        values, rights = _anti_path(theta, phi, g_, total_)
        lefts, _ = _u_lefts(rights, _anti_u_rows(rights), pairing)
        return values, rights, lefts

    def analytic_eigensystem(t: float) -> EigenSystem:
        values, rights, lefts = eigenpath_batch(_as_times(t))
        return EigenSystem(values=values[0], rights=rights[0], lefts=lefts[0],
                           pairing=np.array(pairing))

    def analytic_connections(t: float) -> np.ndarray:
        return np.zeros((3, 2), dtype=complex)

    def state_derivatives(t: float):
        ts_arr = _as_times(t)
        theta, phi, theta_d, phi_d, total_, g_ = angle_arrays(ts_arr)
        values, rights = _anti_path(theta, phi, g_, total_)
        dth, dph = _anti_partials(theta, phi)
        d_rights = dth * theta_d[:, None, None] + dph * phi_d[:, None, None]
        return values[0], rights[0], d_rights[0]

    def drive_batch(ts_arr, drive: str):
        ts_arr = np.asarray(ts_arr, dtype=float)
        if drive == "bare":
            return hamiltonian_batch(ts_arr)
        theta, phi, theta_d, phi_d, _, _ = angle_arrays(ts_arr)
        h1 = _anti_h1(theta, phi, theta_d, phi_d)
        if drive == "cd-only":
            return h1
        if drive == "full-cd":
            return hamiltonian_batch(ts_arr) + h1
        raise ValueError(f"unknown drive {drive!r}")

    def analytic_cd(t: float) -> CDBundle:
        ts_arr = _as_times(t)
        h0 = hamiltonian_batch(ts_arr)[0]
        theta, phi, theta_d, phi_d, _, _ = angle_arrays(ts_arr)
        h1 = _anti_h1(theta, phi, theta_d, phi_d)[0]
        return CDBundle(H0=h0, H1=h1, Htotal=h0 + h1, HcdOnly=h1.copy())

    def parameters(t: float) -> dict:
        ts_arr = _as_times(t)
        o1_, o2_, g_ = raw(ts_arr)
        theta, phi, _, _, total_, _ = angle_arrays(ts_arr)
        return {"omega1": float(o1_[0]), "omega2": float(o2_[0]),
                "gamma": float(g_[0]), "omega": float(total_[0]),
                "theta": float(theta[0]), "phi": float(phi[0])}

    def parameter_rates(t: float) -> dict:
        ts_arr = _as_times(t)
        theta, phi, theta_d, phi_d, _, _ = angle_arrays(ts_arr)
        return {"omega1": float(o1_d(ts_arr)[0]),
                "omega2": float(o2_d(ts_arr)[0]),
                "gamma": float(gamma_d(ts_arr)[0]),
                "theta": float(theta_d[0]), "phi": float(phi_d[0])}

    schedule = Schedule(
        window=window,
        hamiltonian=lambda t: hamiltonian_batch(_as_times(t))[0],
        parameters=parameters,
        parameter_rates=parameter_rates,
        eigensystem=analytic_eigensystem,
        symmetry=symmetry,
        smooth_eigenpath=True,
        hamiltonian_batch=hamiltonian_batch,
        eigenpath_batch=eigenpath_batch,
    )

    def angles(t: float):
        theta, phi, _, _, _, _ = angle_arrays(_as_times(t))
        return float(theta[0]), float(phi[0])

    def angle_rates(t: float):
        _, _, theta_d, phi_d, _, _ = angle_arrays(_as_times(t))
        return float(theta_d[0]), float(phi_d[0])

    return ModelBundle(
        kind="antipseudo", regime=regime, case="antipseudo",
        schedule=schedule, symmetry=symmetry, pairing=pairing,
        params=params, angles=angles, angle_rates=angle_rates,
        analytic_eigensystem=analytic_eigensystem,
        analytic_connections=analytic_connections,
        analytic_cd=analytic_cd, state_derivatives=state_derivatives,
        drive_batch=drive_batch,
        symmetry_at=lambda t: symmetry,
        frequency_unit=frequency_unit,
    )


# -------------------------------------------------------------- schedules ---

def reference_schedules(case: str, frequency_unit: float = 1.0) -> dict:
    """Pulse profiles of the three transfer experiments.

    Each case returns a dict with the window, the passage time T, the
    profile callables, and their closed-form rates:

    - "pseudo-real": omega = 3*sech(t/T), gamma = [tanh(t/T + 3/2)
      - tanh(t/T - 3/2)]/T, phi = 0, T = 1 (all in units of the frequency
      unit); omega > gamma throughout, so the spectrum stays real.
    - "pseudo-complex": the two profiles swap roles and T = 2, putting
      gamma > omega throughout (conjugate-pair spectrum).
    - "antipseudo": omega1 = 5*sech(t/T - 3/2), omega2 = 5*sech(t/T + 3/2),
      the same gamma form, T = 5; gamma < Omega throughout.

    The window is [-6T, 6T], where sech(6) makes every pulse negligible.
    """
    if case not in CASES:
        raise ValueError(f"unknown case {case!r}; expected one of {CASES}")
    u = float(frequency_unit)

    def sech(x):
        return 1.0 / np.cosh(x)

    def make_pulse(amp, t_scale, shift):
        def f(ts):
            return amp * sech(np.asarray(ts, dtype=float) / t_scale - shift)

        def fdot(ts):
            x = np.asarray(ts, dtype=float) / t_scale - shift
            return -amp * sech(x) * np.tanh(x) / t_scale

        return f, fdot

    def make_gate(t_scale):
        def f(ts):
            x = np.asarray(ts, dtype=float) / t_scale
            return (np.tanh(x + 1.5) - np.tanh(x - 1.5)) / t_scale

        def fdot(ts):
            x = np.asarray(ts, dtype=float) / t_scale
            return (sech(x + 1.5) ** 2 - sech(x - 1.5) ** 2) / t_scale**2

        return f, fdot

    if case == "pseudo-real":
        T = 1.0 / u
        pulse, pulse_d = make_pulse(3.0 * u, T, 0.0)
        gate, gate_d = make_gate(T)
        return {"case": case, "T": T, "window": (-6.0 * T, 6.0 * T),
                "omega": pulse, "gamma": gate, "phi": 0.0,
                "rates": {"omega": pulse_d, "gamma": gate_d, "phi": 0.0}}
    if case == "pseudo-complex":
        T = 2.0 / u
        pulse, pulse_d = make_pulse(3.0 * u, T, 0.0)
        gate, gate_d = make_gate(T)
        return {"case": case, "T": T, "window": (-6.0 * T, 6.0 * T),
                "omega": gate, "gamma": pulse, "phi": 0.0,
                "rates": {"omega": gate_d, "gamma": pulse_d, "phi": 0.0}}
    T = 5.0 / u
    p1, p1_d = make_pulse(5.0 * u, T, 1.5)
    p2, p2_d = make_pulse(5.0 * u, T, -1.5)
    gate, gate_d = make_gate(T)
    return {"case": case, "T": T, "window": (-6.0 * T, 6.0 * T),
            "omega1": p1, "omega2": p2, "gamma": gate,
            "rates": {"omega1": p1_d, "omega2": p2_d, "gamma": gate_d}}


def build_model(case: str, frequency_unit: float = 1.0,
                window=None, ep_guard: float = EP_GUARD_FRACTION) -> ModelBundle:
    """Construct the ModelBundle of one reference case."""
    sched = reference_schedules(case, frequency_unit)
    window = tuple(window) if window is not None else sched["window"]
    if case == "antipseudo":
        return antipseudo_instance(
            sched["omega1"], sched["omega2"], sched["gamma"], window,
            rates=sched["rates"], ep_guard=ep_guard,
            frequency_unit=frequency_unit)
    bundle = pseudo_instance(
        sched["omega"], sched["gamma"], window, phi=sched["phi"],
        rates={"omega": sched["rates"]["omega"],
               "gamma": sched["rates"]["gamma"]},
        ep_guard=ep_guard, frequency_unit=frequency_unit)
    expected = "real" if case == "pseudo-real" else "complex"
    if bundle.regime != expected:
        raise EPCrossing(f"{case} schedule produced a {bundle.regime} "
                         "spectrum; check the window")
    return bundle
