"""Density matrices, quantum divergences and the channels used to reduce
state pairs to binary distributions.

All matrix functions go through a full Hermitian eigendecomposition, which is
exact enough and cheap at the small dimensions used here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from pinsker.divergences import LN2, BinaryPair, DivergenceSpec, Family

ATOL = 1e-12
SUPPORT_TOL = 1e-10


def density_matrix(a, atol: float = ATOL) -> np.ndarray:
    """Validate ``a`` as a density matrix and return it as a complex array.

    Raises:
        ValueError: if ``a`` is not square, not Hermitian, has an eigenvalue
            below ``-atol`` or does not have unit trace.
    """
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
        raise ValueError(f"density matrix must be square with dim >= 2, got shape {m.shape}")
    if np.max(np.abs(m - m.conj().T)) > atol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(m) - 1.0) > atol:
        raise ValueError(f"density matrix must have unit trace, got {np.trace(m).real:.3g}")
    w = np.linalg.eigvalsh(_herm(m))
    if w[0] < -atol:
        raise ValueError(f"density matrix has negative eigenvalue {w[0]:.3g}")
    return m


def _herm(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def _eigh(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh(_herm(m))
    w = np.where(w < ATOL, 0.0, w)
    return w, v


def _func(w: np.ndarray, v: np.ndarray, f) -> np.ndarray:
    """``f`` applied to the support eigenvalues; zero on the kernel."""
    out = np.zeros_like(w)
    supp = w > 0
    out[supp] = f(w[supp])
    return (v * out) @ v.conj().T


def _power(m: np.ndarray, p: float) -> np.ndarray:
    w, v = _eigh(m)
    return _func(w, v, lambda x: x ** p)


def _check_pair(rho: np.ndarray, sigma: np.ndarray) -> None:
    if np.shape(rho) != np.shape(sigma):
        raise ValueError(f"dimension mismatch: {np.shape(rho)} vs {np.shape(sigma)}")


def support_contained(rho: np.ndarray, sigma: np.ndarray) -> bool:
    """True when the support of ``rho`` lies inside the support of ``sigma``."""
    w, v = _eigh(sigma)
    kernel = v[:, w <= 0]
    if kernel.shape[1] == 0:
        return True
    block = kernel.conj().T @ rho @ kernel
    return float(np.linalg.norm(block, 2)) <= SUPPORT_TOL


def trace_distance(rho, sigma) -> float:
    """Half the trace norm of ``rho - sigma``."""
    rho, sigma = np.asarray(rho), np.asarray(sigma)
    _check_pair(rho, sigma)
    w = np.linalg.eigvalsh(_herm(rho - sigma))
    return float(min(0.5 * np.sum(np.abs(w)), 1.0))


# ---------------------------------------------------------------------------
# divergences


def _umegaki(rho, sigma) -> float:
    if not support_contained(rho, sigma):
        return math.inf
    wr, _ = _eigh(rho)
    pos = wr[wr > 0]
    ent = float(np.sum(pos * np.log(pos)))
    ws, vs = _eigh(sigma)
    supp = ws > 0
    diag = np.real(np.einsum("ij,jk,ki->i", vs.conj().T, rho, vs))
    cross = float(np.sum(diag[supp] * np.log(ws[supp])))
    return (ent - cross) / LN2


def _petz_q(rho, sigma, alpha: float) -> float:
    return float(np.real(np.trace(_power(rho, alpha) @ _power(sigma, 1.0 - alpha))))


def _sandwiched_q(rho, sigma, alpha: float) -> float:
    half = _power(sigma, (1.0 - alpha) / (2.0 * alpha))
    inner = half @ rho @ half
    w, _ = _eigh(inner)
    return float(np.sum(w ** alpha))


def _renyi(rho, sigma, alpha: float, variant: str) -> float:
    if alpha > 1.0 and not support_contained(rho, sigma):
        return math.inf
    q = _petz_q(rho, sigma, alpha) if variant == "petz" else _sandwiched_q(rho, sigma, alpha)
    if q <= 0.0:
        # orthogonal supports for alpha < 1
        return math.inf
    return math.log2(q) / (alpha - 1.0)


def _max(rho, sigma) -> float:
    if not support_contained(rho, sigma):
        return math.inf
    inv_half = _power(sigma, -0.5)
    w = np.linalg.eigvalsh(_herm(inv_half @ rho @ inv_half))
    return math.log2(w[-1]) if w[-1] > 0 else 0.0


def _chi2(rho, sigma, weight) -> float:
    diff = rho - sigma
    inv = _power(weight, -1.0)
    return float(np.real(np.trace(diff @ inv @ diff)))


def eval_quantum(spec: DivergenceSpec, rho, sigma, variant: str = "petz") -> float:
    """Quantum divergence of ``rho`` from ``sigma`` in bits (Hellinger: raw).

    Args:
        spec: divergence family; smoothed max is not supported on states.
        rho, sigma: density matrices of equal dimension.
        variant: ``"petz"`` or ``"sandwiched"``; only affects the Renyi
            family (including fidelity and collision).

    Returns:
        The divergence, or ``inf`` when the support condition fails.
    """
    if variant not in ("petz", "sandwiched"):
        raise ValueError(f"variant must be 'petz' or 'sandwiched', got {variant!r}")
    rho, sigma = np.asarray(rho, dtype=complex), np.asarray(sigma, dtype=complex)
    _check_pair(rho, sigma)
    spec = spec.canonical()
    fam = spec.family
    if fam is Family.SMOOTHED_MAX:
        raise ValueError("smoothed max divergence is only available on binary pairs")
    if fam is Family.UMEGAKI:
        val = _umegaki(rho, sigma)
    elif fam in (Family.RENYI, Family.FIDELITY, Family.COLLISION):
        val = _renyi(rho, sigma, spec.alpha, variant)
    elif fam is Family.MAX:
        val = _max(rho, sigma)
    elif fam is Family.HELLINGER:
        a = spec.alpha
        if a == 1.0:
            val = _umegaki(rho, sigma) * LN2
        elif not support_contained(rho, sigma):
            val = math.inf
        else:
            val = (_petz_q(rho, sigma, a) - 1.0) / (a - 1.0)
    elif fam is Family.NEYMAN_CHI2:
        val = _chi2(rho, sigma, sigma) if support_contained(rho, sigma) else math.inf
    elif fam is Family.PEARSON_CHI2:
        val = _chi2(rho, sigma, rho) if support_contained(sigma, rho) else math.inf
    else:  # pragma: no cover - enum is exhaustive
        raise ValueError(f"unsupported family {fam}")
    return max(val, 0.0)


# ---------------------------------------------------------------------------
# channels


def classicalize(rho, sigma) -> BinaryPair:
    """Measure both states with the projector onto ``(rho - sigma) >= 0``.

    Zero eigenvalues of the difference go to the positive part. The result
    satisfies ``s <= r`` and ``r - s`` equals the trace distance.
    """
    rho, sigma = np.asarray(rho, dtype=complex), np.asarray(sigma, dtype=complex)
    _check_pair(rho, sigma)
    w, v = np.linalg.eigh(_herm(rho - sigma))
    p = v[:, w >= 0.0]
    r = float(np.real(np.trace(p.conj().T @ rho @ p)))
    s = float(np.real(np.trace(p.conj().T @ sigma @ p)))
    r = min(max(r, 0.0), 1.0)
    s = min(max(s, 0.0), r)
    return BinaryPair(r, s)


def z_pinch(rho) -> np.ndarray:
    """Dephase a qubit in the computational basis."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError(f"z-pinching acts on qubits, got shape {rho.shape}")
    k1 = np.diag([1.0, 0.0]).astype(complex)
    k2 = np.diag([0.0, 1.0]).astype(complex)
    return k1 @ rho @ k1.conj().T + k2 @ rho @ k2.conj().T


# ---------------------------------------------------------------------------
# sampling


def sample_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Random density matrix from the Hilbert-Schmidt (Ginibre) ensemble."""
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = g @ g.conj().T
    return _herm(m / np.trace(m).real)


def sample_diagonal_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Random diagonal density matrix with uniformly distributed spectrum."""
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    p = rng.exponential(size=dim)
    return np.diag(p / p.sum()).astype(complex)


def pair_rng(seed: int, dim: int, index: int) -> np.random.Generator:
    """Generator for one sample, so any sample can be replayed on its own."""
    return np.random.default_rng([seed, dim, index])


def sample_pair(seed: int, dim: int, index: int, diagonal: bool = False
                ) -> tuple[np.ndarray, np.ndarray]:
    rng = pair_rng(seed, dim, index)
    draw = sample_diagonal_state if diagonal else sample_state
    return draw(dim, rng), draw(dim, rng)


@dataclass(frozen=True)
class ScatterSample:
    """One point ``(t, d)`` of the scatter, with what is needed to replay it."""

    t: float
    d: float
    dim: int
    seed: int
    index: int = 0


def sample_scatter(spec: DivergenceSpec, n: int, dims=(2, 3, 4, 5), seed: int = 0,
                   variant: str = "petz", diagonal: bool = False) -> list[ScatterSample]:
    """``n`` random pairs spread round-robin over ``dims``."""
    out = []
    for i in range(n):
        dim = dims[i % len(dims)]
        rho, sigma = sample_pair(seed, dim, i, diagonal)
        out.append(ScatterSample(trace_distance(rho, sigma),
                                 eval_quantum(spec, rho, sigma, variant), dim, seed, i))
    return out
