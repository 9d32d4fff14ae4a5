"""
exactlinalg.py - Exact field arithmetic and dense elimination.

Every cohomology number in quadricgon is a rank, so this module is the floor
everything else stands on. It provides:
- `Field`, the computation field of a session: a prime field F_p or the rationals.
- `rref()`, `rank()`, `kernel_basis()` and `solve()` on dense matrices.
- Batched modular helpers (`inverse_mod()`, `batched_pencil_basis()`) used by the
  incidence sweeps in `position`.

Small prime fields run on int64 numpy arrays; rationals and large primes fall
back to object arrays holding Fractions / Python ints. Nothing is ever rounded.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .config import DEFAULT_PRIME, INT64_PRIME_BOUND, RATIONAL_HEIGHT

logger = logging.getLogger(__name__)

# Matrices are plain 2-D numpy arrays whose dtype is chosen by the Field
Matrix = np.ndarray


@dataclass(frozen=True)
class Field:
    """The session field. `p=None` selects exact rationals."""

    p: int = DEFAULT_PRIME

    @property
    def is_rational(self):
        return self.p is None

    @property
    def label(self):
        return "QQ" if self.p is None else f"F_{self.p}"

    @property
    def vectorized(self):
        return self.p is not None and self.p < INT64_PRIME_BOUND

    @property
    def dtype(self):
        return np.int64 if self.vectorized else object

    def __call__(self, value):
        """Coerce an int, Fraction or decimal/fraction string into the field."""
        if isinstance(value, str):
            value = Fraction(value.strip())
        elif isinstance(value, np.integer):
            value = int(value)
        if self.p is None:
            return Fraction(value)
        if isinstance(value, Fraction):
            num = value.numerator % self.p
            return num * pow(value.denominator % self.p, -1, self.p) % self.p
        return int(value) % self.p

    # --- scalar arithmetic -------------------------------------------------

    def add(self, x, y):
        return x + y if self.p is None else (x + y) % self.p

    def sub(self, x, y):
        return x - y if self.p is None else (x - y) % self.p

    def mul(self, x, y):
        return x * y if self.p is None else (x * y) % self.p

    def neg(self, x):
        return -x if self.p is None else (-x) % self.p

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("zero has no inverse")
        if self.p is None:
            return 1 / Fraction(x)
        return pow(int(x), -1, self.p)

    def div(self, x, y):
        return self.mul(x, self.inv(y))

    def power(self, x, e):
        if self.p is None:
            return Fraction(x) ** e
        return pow(int(x), e, self.p)

    def random_element(self, rng, nonzero=False):
        """Uniform element of F_p, or an integer of bounded height over QQ."""
        while True:
            if self.p is None:
                x = Fraction(int(rng.integers(-RATIONAL_HEIGHT, RATIONAL_HEIGHT + 1)))
            else:
                x = int(rng.integers(0, self.p))
            if not (nonzero and x == 0):
                return x

    def to_str(self, x):
        if self.p is None:
            return str(Fraction(x))
        return str(int(x))

    # --- array helpers -----------------------------------------------------

    def reduce(self, arr):
        return arr if self.p is None else arr % self.p

    def zeros(self, shape):
        if self.vectorized:
            return np.zeros(shape, dtype=np.int64)
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0) if self.p is None else 0)
        return out

    def matrix(self, rows, cols=None):
        """Return a fresh field matrix built from a nested sequence or array."""
        if isinstance(rows, np.ndarray) and rows.ndim == 2:
            if self.vectorized and rows.dtype == np.int64:
                return rows % self.p
            coerced = np.empty(rows.shape, dtype=object)
            for idx, value in np.ndenumerate(rows):
                coerced[idx] = self(value)
            return coerced.astype(self.dtype) if self.vectorized else coerced
        rows = [list(r) for r in rows]
        if not rows:
            return self.zeros((0, cols or 0))
        out = self.zeros((len(rows), len(rows[0])))
        for i, row in enumerate(rows):
            for j, value in enumerate(row):
                out[i, j] = self(value)
        return out

    def vector(self, values):
        values = list(values)
        out = self.zeros(len(values))
        for i, value in enumerate(values):
            out[i] = self(value)
        return out

    def dot(self, m, v):
        """Exact matrix-vector (or matrix-matrix) product over the field."""
        return self.reduce(m @ v)


def rref(m, field):
    """Gauss-Jordan reduction. Returns (reduced matrix, pivot columns)."""
    A = field.matrix(m)
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        candidates = np.flatnonzero(A[r:, c] != 0)
        if candidates.size == 0:
            continue
        piv = r + int(candidates[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = field.reduce(A[r] * field.inv(A[r, c]))
        # Clear column c everywhere else
        col = A[:, c].copy()
        col[r] = 0
        others = np.flatnonzero(col != 0)
        if others.size:
            A[others] = field.reduce(A[others] - np.outer(col[others], A[r]))
        pivots.append(c)
        r += 1
    return A, pivots


def rank(m, field):
    """Exact rank over the session field (0 for degenerate shapes)."""
    A = field.matrix(m)
    if A.shape[0] == 0 or A.shape[1] == 0:
        return 0
    return len(rref(A, field)[1])


def kernel_basis(m, field):
    """Basis of {v : m v = 0}; exactly cols - rank vectors."""
    A = field.matrix(m)
    cols = A.shape[1]
    if cols == 0:
        return []
    if A.shape[0] == 0:
        R, pivots = A, []
    else:
        R, pivots = rref(A, field)
    pivot_set = set(pivots)
    basis = []
    for free in range(cols):
        if free in pivot_set:
            continue
        v = field.zeros(cols)
        v[free] = field(1)
        for k, pc in enumerate(pivots):
            v[pc] = field.neg(R[k, free])
        basis.append(v)
    return basis


def solve(m, rhs, field):
    """One exact solution x of m x = rhs, or None when the system is inconsistent."""
    A = field.matrix(m)
    b = field.vector(rhs)
    rows, cols = A.shape
    if rows == 0:
        return field.zeros(cols)
    augmented = field.zeros((rows, cols + 1))
    augmented[:, :cols] = A
    augmented[:, cols] = b
    R, pivots = rref(augmented, field)
    if cols in pivots:
        return None
    x = field.zeros(cols)
    for k, pc in enumerate(pivots):
        x[pc] = R[k, cols]
    return x


def is_zero_vector(v):
    return not np.any(np.asarray(v) != 0)


def inverse_mod(arr, p):
    """Elementwise inverse modulo p of a nonzero int64 array (Fermat exponent)."""
    result = np.ones_like(arr)
    base = arr % p
    e = p - 2
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


def batched_pencil_basis(blocks, p):
    """
    Kernel bases for a stack of (r x k) int64 matrices over F_p.

    Returns (ok, basis): ok[n] is True when matrix n has its pivots in the first
    r columns (the generic case), and then basis[n] holds k - r kernel vectors.
    Rows flagged not ok must be handled by the scalar path.
    """
    A = np.array(blocks, dtype=np.int64) % p
    count, r, k = A.shape
    ok = np.ones(count, dtype=bool)
    idx = np.arange(count)
    for c in range(r):
        nonzero = A[:, c:, c] != 0
        has_pivot = nonzero.any(axis=1)
        ok &= has_pivot
        first = c + np.argmax(nonzero, axis=1)
        # Swap the pivot row into place
        top = A[idx, c].copy()
        A[idx, c] = A[idx, first]
        A[idx, first] = top
        pivot = np.where(has_pivot, A[:, c, c], 1)
        A[:, c, :] = A[:, c, :] * inverse_mod(pivot, p)[:, None] % p
        factors = A[:, :, c].copy()
        factors[:, c] = 0
        A = (A - factors[:, :, None] * A[:, c, None, :]) % p
    basis = np.zeros((count, k - r, k), dtype=np.int64)
    for j, free in enumerate(range(r, k)):
        basis[:, j, :r] = (-A[:, :, free]) % p
        basis[:, j, free] = 1
    return ok, basis
