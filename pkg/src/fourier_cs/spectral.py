"""Extreme-eigenvalue statistics of Gram matrices of random column subsets."""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np

from .matrix import SensingMatrix

HERMITIAN_TOL = 1e-10
OFFDIAG_TOL = 1e-12
MAX_SWEEPS = 100


class NotHermitianError(ValueError):
    pass


def gram(mat: SensingMatrix, T: Sequence[int], profile: np.ndarray | None = None) -> np.ndarray:
    """G = Phi_T^H Phi_T, i.e. G[u, v] = c[(T[v] - T[u]) mod N]."""
    T = np.asarray(T, dtype=np.int64)
    if np.unique(T).size != T.size:
        raise ValueError("column subset contains duplicates")
    if T.min() < 0 or T.max() >= mat.N:
        raise IndexError("column subset out of range")
    if profile is None:
        profile = mat.inner_profile()
    return profile[(T[None, :] - T[:, None]) % mat.N]


def _jacobi_batch(A: np.ndarray) -> np.ndarray:
    """Cyclic complex Jacobi on a stack of Hermitian matrices, in place.

    Each rotation zeroes A[p, q] in every matrix of the stack at once; sweeps
    continue until every off-diagonal Frobenius norm is below 1e-12 ||A||_F.
    Returns the diagonals, unsorted.
    """
    B, k, _ = A.shape
    if k == 1:
        return A[:, :, 0].real.copy()
    ref = np.linalg.norm(A.reshape(B, -1), axis=1)
    iu = np.triu_indices(k, 1)
    for _ in range(MAX_SWEEPS):
        off = np.sqrt(2.0 * (np.abs(A[:, iu[0], iu[1]]) ** 2).sum(axis=1))
        if np.all(off <= OFFDIAG_TOL * ref):
            break
        for p in range(k - 1):
            for q in range(p + 1, k):
                apq = A[:, p, q]
                mag = np.abs(apq)
                active = mag > 1e-30 * ref
                safe = np.where(active, mag, 1.0)
                e = np.where(active, apq / safe, 1.0)
                zeta = (A[:, q, q].real - A[:, p, p].real) / (2.0 * safe)
                t = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.hypot(1.0, zeta))
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                se = (s * e)[:, None]
                c_ = c[:, None]
                # A <- A J with J = [[c, s e], [-s conj(e), c]] on (p, q)
                colp = A[:, :, p].copy()
                colq = A[:, :, q]
                A[:, :, p] = c_ * colp - se.conj() * colq
                A[:, :, q] = se * colp + c_ * colq
                # A <- J^H A
                rowp = A[:, p, :].copy()
                rowq = A[:, q, :]
                A[:, p, :] = c_ * rowp - se * rowq
                A[:, q, :] = se.conj() * rowp + c_ * rowq
                A[:, p, q] = 0.0
                A[:, q, p] = 0.0
    else:
        raise ArithmeticError("Jacobi iteration did not converge")
    return np.diagonal(A, axis1=1, axis2=2).real.copy()


def hermitian_eigs_batch(G: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of each Hermitian matrix in a (B, k, k) stack."""
    G = np.asarray(G, dtype=np.complex128)
    if G.ndim != 3 or G.shape[1] != G.shape[2]:
        raise ValueError("expected a stack of square matrices")
    scale = max(1.0, float(np.abs(G).max(initial=0.0)))
    if np.abs(G - G.conj().transpose(0, 2, 1)).max(initial=0.0) > HERMITIAN_TOL * scale:
        raise NotHermitianError("matrix is not Hermitian")
    A = 0.5 * (G + G.conj().transpose(0, 2, 1))
    return np.sort(_jacobi_batch(A), axis=1)


def hermitian_eigs(G: np.ndarray) -> np.ndarray:
    G = np.asarray(G, dtype=np.complex128)
    if G.ndim != 2:
        raise ValueError("expected a square matrix")
    return hermitian_eigs_batch(G[None])[0]


@dataclass(frozen=True)
class EigStatsRow:
    k: int
    samples: int
    min_eig_mean: float
    min_eig_min: float
    max_eig_mean: float
    max_eig_max: float
    arm: str = "deterministic"


def random_subsets(N: int, k: int, samples: int, rng: np.random.Generator) -> np.ndarray:
    """``samples`` uniform k-subsets of range(N), one per row."""
    keys = rng.random((samples, N))
    return np.argpartition(keys, k - 1, axis=1)[:, :k] if k < N else np.tile(np.arange(N), (samples, 1))


def run_eig_sweep(mat: SensingMatrix, k_range: Iterable[int], samples: int = 5000,
                  seed: int = 0, arm: str = "deterministic",
                  batch: int = 2500) -> list[EigStatsRow]:
    """Extreme-eigenvalue statistics over ``samples`` random subsets per k.

    Each k draws from its own stream spawned off ``seed``, so rows do not
    depend on which other k values are requested.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    profile = mat.inner_profile()
    out = []
    for k in k_range:
        if not 1 <= k <= mat.N:
            raise ValueError(f"subset size {k} outside [1, {mat.N}]")
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(k,)))
        lo, hi = [], []
        for s in range(0, samples, batch):
            T = random_subsets(mat.N, k, min(batch, samples - s), rng)
            G = profile[(T[:, None, :] - T[:, :, None]) % mat.N]
            ev = hermitian_eigs_batch(G)
            lo.append(ev[:, 0])
            hi.append(ev[:, -1])
        lo = np.concatenate(lo)
        hi = np.concatenate(hi)
        out.append(EigStatsRow(k, samples, float(lo.mean()), float(lo.min()),
                               float(hi.mean()), float(hi.max()), arm))
    return out


@dataclass(frozen=True)
class EigConfig:
    matrix: str
    arms: tuple[str, ...] = ("deterministic", "random")
    k_min: int = 1
    k_max: int = 20
    samples: int = 5000
    master_seed: int = 0

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.k_min < 1 or self.k_max < self.k_min:
            raise ValueError(f"empty or invalid k range [{self.k_min}, {self.k_max}]")
        if not self.arms:
            raise ValueError("arms must be non-empty")
        for arm in self.arms:
            if arm not in ("deterministic", "random"):
                raise ValueError(f"unknown arm {arm!r}")

    @property
    def k_range(self) -> range:
        return range(self.k_min, self.k_max + 1)

    def to_record(self) -> dict:
        rec = asdict(self)
        rec["arms"] = list(self.arms)
        return rec


def baseline_matrix(mat: SensingMatrix, seed: int) -> SensingMatrix:
    """The random-row comparison matrix for an eigenvalue sweep.

    Per-k subset streams use spawn keys k >= 1, so key 0 is free for this draw.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0,)))
    return SensingMatrix.random_rows(mat.N, mat.m, rng)


def run_eig_config(mat: SensingMatrix, config: EigConfig) -> list[EigStatsRow]:
    if config.k_max > mat.N:
        raise ValueError(f"k_max={config.k_max} exceeds the column count {mat.N}")
    out = []
    for arm in config.arms:
        m = mat if arm == "deterministic" else baseline_matrix(mat, config.master_seed)
        out += run_eig_sweep(m, config.k_range, config.samples, config.master_seed, arm)
    return out


def eig_csv(rows: Sequence[EigStatsRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "samples", "min_min", "min_mean", "max_mean", "max_max", "arm"])
    for r in rows:
        w.writerow([r.k, r.samples, repr(r.min_eig_min), repr(r.min_eig_mean),
                    repr(r.max_eig_mean), repr(r.max_eig_max), r.arm])
    return buf.getvalue()
