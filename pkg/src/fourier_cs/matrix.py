"""Partial Fourier sensing matrices kept in compact form.

A matrix is ``(N, rows, scale)`` with entry ``(r, j) = scale * exp(2 pi i j m_r / N)``.
Columns, inner products and matrix-vector products are generated on demand.
The column inner product ``<Phi_j, Phi_k> = sum_r Phi[r, j] conj(Phi[r, k])``
depends only on ``d = j - k mod N`` through the profile
``c[d] = scale^2 * sum_m exp(2 pi i d m / N)``.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .charsums import twiddles
from .indexsets import AmubPartition, IndexSet

BRUTEFORCE_CAP = 10**4
TOL = 1e-9


@dataclass(frozen=True)
class SensingMatrix:
    N: int
    rows: np.ndarray = field(repr=False)
    scale: float
    source: IndexSet | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int64)
        if rows.ndim != 1 or rows.size == 0:
            raise ValueError("rows must be a non-empty 1-d index array")
        if np.unique(rows).size != rows.size or rows.min() < 0 or rows.max() >= self.N:
            raise ValueError("rows must be distinct and lie in [0, N)")
        object.__setattr__(self, "rows", rows)

    def __eq__(self, other):
        if not isinstance(other, SensingMatrix):
            return NotImplemented
        return (self.N == other.N and self.scale == other.scale
                and np.array_equal(self.rows, other.rows))

    def __hash__(self):
        return hash((self.N, self.scale, self.rows.tobytes()))

    @classmethod
    def from_indexset(cls, ix: IndexSet) -> SensingMatrix:
        return cls(ix.N, np.array(ix.indices), 1.0 / math.sqrt(len(ix.indices)), ix)

    @classmethod
    def random_rows(cls, N: int, m: int, rng: np.random.Generator) -> SensingMatrix:
        rows = np.sort(rng.choice(N, size=m, replace=False))
        return cls(N, rows, 1.0 / math.sqrt(m))

    @property
    def m(self) -> int:
        return int(self.rows.size)

    @property
    def shape(self) -> tuple[int, int]:
        return self.m, self.N

    def _check(self, j):
        if not 0 <= j < self.N:
            raise IndexError(f"column {j} outside [0, {self.N})")

    def column(self, j: int) -> np.ndarray:
        self._check(j)
        return self.scale * twiddles(self.N)[(j * self.rows) % self.N]

    def columns(self, T) -> np.ndarray:
        T = np.asarray(T, dtype=np.int64)
        return self.scale * twiddles(self.N)[np.outer(self.rows, T) % self.N]

    def column_inner(self, j: int, k: int) -> complex:
        self._check(j)
        self._check(k)
        d = (j - k) % self.N
        return complex(self.scale**2 * twiddles(self.N)[(d * self.rows) % self.N].sum())

    def inner_profile(self) -> np.ndarray:
        """c[d] for every d in [0, N), via one length-N DFT of the row indicator."""
        v = np.zeros(self.N)
        v[self.rows] = 1.0
        return self.scale**2 * self.N * np.fft.ifft(v)

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Phi @ x without materialising Phi."""
        return self.scale * self.N * np.fft.ifft(x)[self.rows]

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        """Phi^H @ y without materialising Phi."""
        z = np.zeros(self.N, dtype=np.complex128)
        z[self.rows] = y
        return self.scale * np.fft.fft(z)

    def dense(self) -> np.ndarray:
        return self.columns(np.arange(self.N))

    @property
    def row_gram_constant(self) -> float:
        """Phi Phi^H equals this multiple of the identity."""
        return self.N * self.scale**2

    # serialisation -----------------------------------------------------------

    def to_record(self) -> dict:
        rec = self.source.to_record() if self.source is not None else {
            "variant": "explicit", "N": self.N, "indices": self.rows.tolist()}
        rec["scale"] = repr(self.scale)
        return rec

    def dumps(self) -> str:
        return json.dumps(self.to_record(), indent=2) + "\n"

    @classmethod
    def from_record(cls, rec: dict) -> SensingMatrix:
        scale = float(rec["scale"])
        if rec.get("variant") == "explicit":
            return cls(int(rec["N"]), np.array(rec["indices"]), scale)
        ix = IndexSet.from_record(rec)
        mat = cls.from_indexset(ix)
        if mat.scale != scale:
            raise ValueError(f"scale {scale!r} disagrees with |M| = {mat.m}")
        return mat

    @classmethod
    def loads(cls, text: str) -> SensingMatrix:
        return cls.from_record(json.loads(text))

    def dense_csv(self) -> str:
        buf = io.StringIO()
        buf.write("row," + ",".join(f"c{j}" for j in range(self.N)) + "\n")
        for m, row in zip(self.rows, self.dense()):
            cells = (f"{z.real:.17g}{z.imag:+.17g}i" for z in row)
            buf.write(f"{m}," + ",".join(cells) + "\n")
        return buf.getvalue()


def parse_complex_cell(cell: str) -> complex:
    return complex(cell.replace("i", "j"))


@dataclass(frozen=True)
class CoherenceReport:
    mu: float
    argmax_pair: tuple[int, int]
    welch: float
    bound: float | None
    k_max: int

    @property
    def within_bound(self) -> bool:
        return self.bound is None or self.mu <= self.bound + TOL


def welch_bound(m: int, N: int) -> float:
    return math.sqrt((N - m) / ((N - 1) * m))


def recoverable_sparsity(mu: float) -> int:
    """Largest k with mu < 1/(2k - 1)."""
    if mu <= 0:
        raise ValueError("coherence must be positive")
    return math.ceil((1.0 / mu + 1.0) / 2.0) - 1


def theoretical_bound(mat: SensingMatrix) -> float | None:
    ix = mat.source
    if ix is None:
        return None
    q = ix.q
    if ix.variant == "amub":
        return (math.sqrt(q) + 1) / (q + 1)
    return (ix.n - 1) / math.sqrt(q)


def _report(mat: SensingMatrix, mags: np.ndarray) -> CoherenceReport:
    # mags[d - 1] = |c[d]| for d = 1..N-1
    d = int(np.argmax(mags)) + 1
    mu = float(mags[d - 1])
    return CoherenceReport(mu, (d, 0), welch_bound(mat.m, mat.N), theoretical_bound(mat),
                           recoverable_sparsity(mu))


def coherence_bruteforce(mat: SensingMatrix) -> CoherenceReport:
    """Direct O(N m) evaluation of every difference d = 1..N-1."""
    if mat.N > BRUTEFORCE_CAP:
        raise ValueError(f"N={mat.N} above the brute-force cap {BRUTEFORCE_CAP}")
    if mat.N < 2:
        raise ValueError("coherence needs at least two columns")
    tw = twiddles(mat.N)
    d = np.arange(1, mat.N, dtype=np.int64)
    sums = tw[np.outer(d, mat.rows) % mat.N].sum(axis=1)
    return _report(mat, mat.scale**2 * np.abs(sums))


def coherence_fft(mat: SensingMatrix) -> CoherenceReport:
    if mat.N < 2:
        raise ValueError("coherence needs at least two columns")
    return _report(mat, np.abs(mat.inner_profile()[1:]))


@dataclass(frozen=True)
class AmubReport:
    passed: bool
    max_unitary_deviation: float
    min_cross: float
    max_cross: float
    lower: float
    upper: float
    violation: tuple[int, int] | None = None


def certify_amub(mat: SensingMatrix, partition: AmubPartition) -> AmubReport:
    """Check every block of columns is orthonormal and every cross-block
    inner-product modulus lies in [(sqrt(q)-1)/(q+1), (sqrt(q)+1)/(q+1)].

    The full N x N Gram matrix is formed, so every pair is examined.
    """
    q = partition.q
    if mat.N != q * q - 1 or mat.m != q + 1:
        raise ValueError("matrix does not have the (q+1) x (q^2-1) AMUB shape")
    dense = mat.dense()
    gram = dense.conj().T @ dense
    block_of = np.empty(mat.N, dtype=np.int64)
    for j, block in enumerate(partition.blocks):
        block_of[list(block)] = j
    same = block_of[:, None] == block_of[None, :]
    eye = np.eye(mat.N)
    unitary_dev = np.where(same, np.abs(gram - eye), 0.0)
    cross = np.abs(gram)[~same]
    lower = (math.sqrt(q) - 1) / (q + 1)
    upper = (math.sqrt(q) + 1) / (q + 1)
    bad_block = unitary_dev > TOL
    bad_cross = (~same) & ((np.abs(gram) < lower - TOL) | (np.abs(gram) > upper + TOL))
    violation = None
    for bad in (bad_block, bad_cross):
        if bad.any():
            j, k = np.argwhere(bad)[0]
            violation = (int(j), int(k))
            break
    return AmubReport(violation is None, float(unitary_dev.max()), float(cross.min()),
                      float(cross.max()), lower, upper, violation)
