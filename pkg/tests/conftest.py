"""Shared builders for randomized symmetry-class matrices.

Construction guarantees the class identity exactly:
- unitary Hermitian U = V diag(+-1) V* for a Haar-ish V from QR,
- pseudo H = (A + U A* U)/2 satisfies H* = U H U,
- antipseudo H = (A - U A* U)/2 satisfies H* = -U H U,
where * is the conjugate transpose and U is its own inverse.
"""
import numpy as np


def random_involution(rng, dim):
    a = rng.randn(dim, dim) + 1j * rng.randn(dim, dim)
    v, _ = np.linalg.qr(a)
    signs = np.where(rng.rand(dim) < 0.5, -1.0, 1.0)
    if np.all(signs == signs[0]):
        signs[0] = -signs[0]  # keep U indefinite so the class is nontrivial
    return (v * signs) @ v.conj().T


def random_symmetry_instance(rng, dim, kind):
    u = random_involution(rng, dim)
    a = rng.randn(dim, dim) + 1j * rng.randn(dim, dim)
    folded = u @ a.conj().T @ u
    h = 0.5 * (a + folded) if kind == "pseudo" else 0.5 * (a - folded)
    return h, u


def multiset_residual(actual, expected):
    # Greedy nearest matching; lexicographic sorting is unstable when the
    # leading component only differs by roundoff.
    pool = list(np.asarray(actual))
    worst = 0.0
    for value in np.asarray(expected):
        j = int(np.argmin(np.abs(np.asarray(pool) - value)))
        worst = max(worst, abs(pool[j] - value))
        pool.pop(j)
    return worst


def well_separated_instance(rng, dim, kind, min_gap=1e-3, tries=50):
    for _ in range(tries):
        h, u = random_symmetry_instance(rng, dim, kind)
        values = np.linalg.eigvals(h)
        gaps = [abs(values[i] - values[j])
                for i in range(dim) for j in range(i + 1, dim)]
        scale = max(np.max(np.abs(values)), 1.0)
        if min(gaps) > min_gap * scale:
            return h, u
    raise RuntimeError("no well-separated draw found")
