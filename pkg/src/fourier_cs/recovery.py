"""Sparse recovery from noiseless partial Fourier measurements.

Two solvers: orthogonal matching pursuit with an incrementally grown QR
factorisation, and basis pursuit (min ||x||_1 s.t. Phi x = y over C^N) by
ADMM.  The affine projection in ADMM is closed form because the rows of a
partial Fourier matrix are orthogonal: Phi Phi^H = N scale^2 I.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Literal, Sequence

import numpy as np

from .matrix import SensingMatrix

SignalModel = Literal["complex_gaussian", "unit_modulus"]
SUCCESS_TOL = 1e-4
COND_LIMIT = 1e12


class SingularSupportError(ArithmeticError):
    """OMP selected a numerically rank-deficient set of columns."""


@dataclass(frozen=True)
class SparseSignal:
    N: int
    support: np.ndarray
    values: np.ndarray

    def dense(self) -> np.ndarray:
        x = np.zeros(self.N, dtype=np.complex128)
        x[self.support] = self.values
        return x

    @property
    def k(self) -> int:
        return int(self.support.size)


@dataclass(frozen=True)
class RecoveryOutcome:
    estimate: np.ndarray
    residual_norm: float
    iterations: int
    method: Literal["omp", "bp"]
    converged: bool = True
    success: bool | None = None
    relative_error: float | None = None


def gen_signal(N: int, k: int, model: SignalModel = "complex_gaussian",
               seed=None) -> SparseSignal:
    if not 1 <= k <= N:
        raise ValueError(f"sparsity k={k} outside [1, {N}]")
    rng = np.random.default_rng(seed)
    support = np.sort(rng.choice(N, size=k, replace=False))
    if model == "complex_gaussian":
        values = (rng.standard_normal(k) + 1j * rng.standard_normal(k)) / math.sqrt(2)
        while np.any(values == 0):  # measure-zero, but the invariant is hard
            values = np.where(values == 0, 1.0, values)
    elif model == "unit_modulus":
        values = np.exp(2j * np.pi * rng.random(k))
    else:
        raise ValueError(f"unknown signal model {model!r}")
    return SparseSignal(N, support, values)


def measure(mat: SensingMatrix, signal: SparseSignal) -> np.ndarray:
    """y = Phi beta, touching only the support columns."""
    if signal.N != mat.N:
        raise ValueError(f"signal length {signal.N} != matrix width {mat.N}")
    if signal.k == 0:
        return np.zeros(mat.m, dtype=np.complex128)
    return mat.columns(signal.support) @ signal.values


def score(outcome: RecoveryOutcome, signal: SparseSignal,
          success_tol: float = SUCCESS_TOL) -> RecoveryOutcome:
    truth = signal.dense()
    rel = float(np.linalg.norm(outcome.estimate - truth) / np.linalg.norm(truth))
    return replace(outcome, success=bool(rel < success_tol), relative_error=rel)


def omp(mat: SensingMatrix, y: np.ndarray, k_max: int,
        residual_tol: float = 1e-10) -> RecoveryOutcome:
    """Greedy column selection with least squares on the running support.

    Stops after ``k_max`` picks or once ``||r|| < residual_tol * ||y||``.
    Raises :class:`SingularSupportError` when the selected columns become
    numerically dependent (condition estimate above 1e12).
    """
    if not 0 <= k_max <= mat.m:
        raise ValueError(f"k_max={k_max} must lie in [0, {mat.m}]")
    y = np.asarray(y, dtype=np.complex128)
    x = np.zeros(mat.N, dtype=np.complex128)
    ynorm = float(np.linalg.norm(y))
    if ynorm == 0.0:
        return RecoveryOutcome(x, 0.0, 0, "omp")
    Q = np.zeros((mat.m, k_max), dtype=np.complex128)
    R = np.zeros((k_max, k_max), dtype=np.complex128)
    support: list[int] = []
    r = y.copy()
    it = 0
    while it < k_max and np.linalg.norm(r) >= residual_tol * ynorm:
        corr = np.abs(mat.adjoint(r))
        corr[support] = -1.0
        j = int(np.argmax(corr))
        a = mat.column(j)
        # two passes of Gram-Schmidt keep Q orthonormal to working precision
        h = Q[:, :it].conj().T @ a
        v = a - Q[:, :it] @ h
        h2 = Q[:, :it].conj().T @ v
        v -= Q[:, :it] @ h2
        h += h2
        rho = np.linalg.norm(v)
        R[:it, it] = h
        R[it, it] = rho
        diag = np.abs(np.diag(R[:it + 1, :it + 1]))
        if rho == 0.0 or diag.max() / diag.min() > COND_LIMIT:
            raise SingularSupportError(f"column {j} is dependent on the current support")
        Q[:, it] = v / rho
        support.append(j)
        it += 1
        r = r - Q[:, it - 1] * (Q[:, it - 1].conj() @ r)
    if it:
        coef = np.linalg.solve(R[:it, :it], Q[:, :it].conj().T @ y)
        x[support] = coef
    resid = float(np.linalg.norm(y - mat.apply(x)))
    return RecoveryOutcome(x, resid, it, "omp")


@dataclass(frozen=True)
class SolverParams:
    rho: float = 1.0
    gap_tol: float = 1e-7
    max_iter: int = 50_000
    check_every: int = 10


def soft_threshold(v: np.ndarray, tau: float, out: np.ndarray | None = None) -> np.ndarray:
    """Proximal map of tau * sum |v_i| on complex vectors (tau > 0)."""
    # 1 - tau / max(|v|, tau) is exactly zero below the threshold
    f = np.abs(v)
    np.maximum(f, tau, out=f)
    np.divide(tau, f, out=f)
    np.subtract(1.0, f, out=f)
    return np.multiply(v, f, out=out)


class _RowStack:
    """Batch of partial Fourier operators sharing N, m and scale.

    Row b of every array belongs to problem b; rows[b] selects its Fourier rows.
    """

    def __init__(self, N: int, rows: np.ndarray, scale: float):
        self.N = N
        self.rows = np.atleast_2d(np.asarray(rows, dtype=np.int64))
        self.scale = scale
        self.c = N * scale**2
        B, self.m = self.rows.shape
        self._flat = (self.rows + N * np.arange(B)[:, None]).ravel()

    def subset(self, keep: np.ndarray) -> _RowStack:
        return _RowStack(self.N, self.rows[keep], self.scale)

    def pick(self, X: np.ndarray) -> np.ndarray:
        """Unscaled N * ifft(X) restricted to each problem's rows."""
        F = np.fft.ifft(X, axis=1)
        return self.N * F.ravel()[self._flat].reshape(-1, self.m)

    def spread(self, Y: np.ndarray) -> np.ndarray:
        """Unscaled fft of Y scattered onto each problem's rows."""
        Z = np.zeros((Y.shape[0], self.N), dtype=np.complex128)
        Z.ravel()[self._flat] = Y.ravel()
        return np.fft.fft(Z, axis=1)

    def apply(self, X: np.ndarray) -> np.ndarray:
        return self.scale * self.pick(X)

    def adjoint(self, Y: np.ndarray) -> np.ndarray:
        return self.spread(self.scale * Y)


def _gap(op: _RowStack, Y, X, W):
    # dual point: project W onto range(Phi^H), rescale to max modulus <= 1
    lam = op.apply(W) / op.c
    V = op.adjoint(lam)
    s = np.maximum(1.0, np.abs(V).max(axis=1))
    dual = np.einsum("bi,bi->b", lam.conj(), Y).real / s
    primal = np.abs(X).sum(axis=1)
    return primal, dual, primal - dual


def duality_gap(mat: SensingMatrix, y: np.ndarray, x: np.ndarray,
                w: np.ndarray) -> tuple[float, float, float]:
    """(primal, dual, gap) for a feasible ``x`` and dual direction ``w``.

    ``w`` is projected onto range(Phi^H) and rescaled into the dual-feasible
    set {Phi^H lam : max |.| <= 1}; the dual value is Re <lam, y>.
    """
    op = _RowStack(mat.N, mat.rows, mat.scale)
    p, d, g = _gap(op, np.atleast_2d(y), np.atleast_2d(x), np.atleast_2d(w))
    return float(p[0]), float(d[0]), float(g[0])


def bp_batch(N: int, rows: np.ndarray, scale: float, Y: np.ndarray,
             params: SolverParams = SolverParams()):
    """ADMM for a stack of basis-pursuit problems with equally sized matrices.

    Returns (X, iterations, converged).  Problems leave the active set as
    soon as their relative duality gap falls below ``params.gap_tol``.
    """
    op = _RowStack(N, rows, scale)
    Y = np.atleast_2d(np.asarray(Y, dtype=np.complex128))
    B = Y.shape[0]
    if op.rows.shape[0] != B:
        raise ValueError("one row set per right-hand side expected")
    X = np.zeros((B, N), dtype=np.complex128)
    iters = np.zeros(B, dtype=np.int64)
    done = np.zeros(B, dtype=bool)
    zero = np.linalg.norm(Y, axis=1) == 0.0
    done[zero] = True
    act = np.flatnonzero(~zero)
    sub = op.subset(act)
    y = Y[act]
    tau = 1.0 / params.rho

    def residual(V):
        # (Phi V - y) / c, pre-scaled so that spread() completes Phi^H (.)
        s = sub.scale
        return (s * s / sub.c) * sub.pick(V) - (s / sub.c) * y

    def project(V):
        return V - sub.spread(residual(V))

    x = project(np.zeros((act.size, N), dtype=np.complex128))
    z = x.copy()
    u = np.zeros_like(z)
    w = np.empty_like(z)
    it = 0
    while act.size and it < params.max_iter:
        it += 1
        np.subtract(z, u, out=w)
        np.subtract(w, sub.spread(residual(w)), out=x)
        np.add(x, u, out=w)
        soft_threshold(w, tau, out=z)
        np.subtract(w, z, out=u)  # u + x - z
        if it % params.check_every == 0 or it == params.max_iter:
            primal, _, gap = _gap(sub, y, x, params.rho * u)
            fin = gap <= params.gap_tol * np.maximum(1.0, primal)
            if it == params.max_iter:
                X[act] = x
                iters[act] = it
                done[act] = fin
                break
            if fin.any():
                X[act[fin]] = x[fin]
                iters[act[fin]] = it
                done[act[fin]] = True
                keep = ~fin
                act, x, z, u, y = act[keep], x[keep], z[keep], u[keep], y[keep]
                w = np.empty_like(z)
                sub = sub.subset(keep)
    return X, iters, done


def basis_pursuit(mat: SensingMatrix, y: np.ndarray,
                  params: SolverParams = SolverParams()) -> RecoveryOutcome:
    """min ||x||_1 subject to Phi x = y, solved by ADMM.

    x-step: projection onto {Phi x = y}; z-step: complex soft-threshold;
    scaled dual update.  Terminates when the relative duality gap drops
    below ``params.gap_tol``; hitting ``max_iter`` first returns an outcome
    with ``converged=False``.
    """
    X, iters, done = bp_batch(mat.N, mat.rows[None, :], mat.scale, np.atleast_2d(y), params)
    x = X[0]
    resid = float(np.linalg.norm(mat.apply(x) - np.asarray(y)))
    return RecoveryOutcome(x, resid, int(iters[0]), "bp", converged=bool(done[0]))


# -- experiments ---------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    matrix: str
    arms: tuple[str, ...] = ("deterministic", "random")
    methods: tuple[str, ...] = ("omp", "bp")
    k_min: int = 1
    k_max: int = 20
    trials: int = 100
    signal_model: SignalModel = "complex_gaussian"
    success_tol: float = SUCCESS_TOL
    master_seed: int = 0

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.k_min < 1 or self.k_max < self.k_min:
            raise ValueError(f"empty or invalid k range [{self.k_min}, {self.k_max}]")
        for arm in self.arms:
            if arm not in ("deterministic", "random"):
                raise ValueError(f"unknown arm {arm!r}")
        for meth in self.methods:
            if meth not in ("omp", "bp"):
                raise ValueError(f"unknown method {meth!r}")
        if not self.arms or not self.methods:
            raise ValueError("arms and methods must be non-empty")
        if self.signal_model not in ("complex_gaussian", "unit_modulus"):
            raise ValueError(f"unknown signal model {self.signal_model!r}")

    @property
    def k_range(self) -> range:
        return range(self.k_min, self.k_max + 1)

    def to_record(self) -> dict:
        rec = asdict(self)
        rec["arms"] = list(self.arms)
        rec["methods"] = list(self.methods)
        return rec


@dataclass
class SweepRow:
    k: int
    method: str
    arm: str
    trials: int
    successes: int
    nonconverged: int = 0

    @property
    def rate(self) -> float:
        return self.successes / self.trials


def trial_seeds(master_seed: int, k: int, trials: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(master_seed, spawn_key=(k,)).spawn(trials)


def _trial_instance(mat: SensingMatrix, k: int, seed: np.random.SeedSequence,
                    config: ExperimentConfig, arm: str):
    sig_seed, row_seed = seed.spawn(2)
    signal = gen_signal(mat.N, k, config.signal_model, sig_seed)
    if arm == "random":
        mat = SensingMatrix.random_rows(mat.N, mat.m, np.random.default_rng(row_seed))
    return mat, signal, measure(mat, signal)


def _omp_safe(mat: SensingMatrix, y: np.ndarray, k: int) -> RecoveryOutcome:
    try:
        return omp(mat, y, min(k, mat.m))
    except SingularSupportError:
        return RecoveryOutcome(np.zeros(mat.N, dtype=np.complex128),
                               float(np.linalg.norm(y)), 0, "omp", converged=False)


def run_trial(mat: SensingMatrix, k: int, seed: np.random.SeedSequence,
              config: ExperimentConfig, arm: str,
              solver: SolverParams = SolverParams()) -> dict[str, RecoveryOutcome]:
    """One trial, every configured method.  A random arm draws its own rows."""
    mat, signal, y = _trial_instance(mat, k, seed, config, arm)
    out = {}
    for meth in config.methods:
        res = _omp_safe(mat, y, k) if meth == "omp" else basis_pursuit(mat, y, solver)
        out[meth] = score(res, signal, config.success_tol)
    return out


def run_success_sweep(mat: SensingMatrix, config: ExperimentConfig,
                      solver: SolverParams = SolverParams()) -> list[SweepRow]:
    """Success counts per (k, method, arm).

    Trial t at sparsity k uses a seed spawned from (master_seed, k, t); the
    deterministic and random arms see the same signals.  Basis pursuit runs
    all trials of one k, across arms, as a single batch; the outcome per trial
    is identical to :func:`run_trial`.
    """
    if config.k_max > mat.m:
        raise ValueError(f"k_max={config.k_max} exceeds the row count {mat.m}")
    rows = {(k, meth, arm): SweepRow(k, meth, arm, config.trials, 0)
            for k in config.k_range for meth in config.methods for arm in config.arms}
    for k in config.k_range:
        seeds = trial_seeds(config.master_seed, k, config.trials)
        inst = [(arm, *_trial_instance(mat, k, s, config, arm))
                for arm in config.arms for s in seeds]
        if "omp" in config.methods:
            for arm, m_, sig, y in inst:
                res = score(_omp_safe(m_, y, k), sig, config.success_tol)
                row = rows[(k, "omp", arm)]
                row.successes += int(res.success)
                row.nonconverged += int(not res.converged)
        if "bp" in config.methods:
            # every arm of this k in one batch
            R = np.stack([m_.rows for _, m_, _, _ in inst])
            Y = np.stack([y for _, _, _, y in inst])
            X, iters, done = bp_batch(mat.N, R, mat.scale, Y, solver)
            for (arm, m_, sig, y), x, it, ok in zip(inst, X, iters, done):
                resid = float(np.linalg.norm(m_.apply(x) - y))
                res = score(RecoveryOutcome(x, resid, int(it), "bp", bool(ok)), sig,
                            config.success_tol)
                row = rows[(k, "bp", arm)]
                row.successes += int(res.success)
                row.nonconverged += int(not ok)
    return list(rows.values())


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "method", "arm", "trials", "successes", "rate"])
    for r in rows:
        w.writerow([r.k, r.method, r.arm, r.trials, r.successes, repr(r.rate)])
    return buf.getvalue()
