"""GF(2^w) arithmetic and parity coefficient vectors.

Field elements are integers in [0, 2^w). Addition is XOR; multiplication
uses log/antilog tables built from a primitive element eta, so results are
value-exact. Scalar operations take plain ints; the second operand of
``mul`` may also be a numpy array, which is multiplied elementwise by the
scalar (used to stream many stripes through the same linear recipe).
"""

from __future__ import annotations

import functools

import numpy as np

from .errors import ParameterError

# Reduction polynomials, full form including the x^w term.
#   w=8 : x^8 + x^4 + x^3 + x^2 + 1
#   w=16: x^16 + x^12 + x^3 + x + 1
REDUCTION_POLY = {8: 0x11D, 16: 0x1100B}

DEFAULT_ETA = 2


def symbols_equal(a, b) -> bool:
    """Value equality for symbols that may be ints or stripe arrays."""
    return bool(np.all(a == b))


def carryless_mul(a: int, b: int, poly: int, w: int) -> int:
    """Polynomial multiplication in GF(2)[x] reduced mod poly (degree w)."""
    res = 0
    while b:
        if b & 1:
            res ^= a
        a <<= 1
        b >>= 1
    for bit in range(res.bit_length() - 1, w - 1, -1):
        if res >> bit & 1:
            res ^= poly << (bit - w)
    return res


class Field:
    """Arithmetic over GF(2^w) with log/antilog tables.

    Parameters
    ----------
    w : int
        Bit width of a symbol (8 or 16 for the shipped polynomials).
    poly : int or None
        Reduction polynomial including the x^w bit. Defaults to the
        standard choice for w.
    eta : int
        Primitive element used to build the tables and the parity
        coefficient vectors. Construction fails if eta does not generate
        the full multiplicative group.
    """

    def __init__(self, w: int, poly: int | None = None, eta: int = DEFAULT_ETA):
        if poly is None:
            if w not in REDUCTION_POLY:
                raise ParameterError(
                    f"no built-in reduction polynomial for w={w}; supply one"
                )
            poly = REDUCTION_POLY[w]
        if not poly >> w & 1:
            raise ParameterError(f"polynomial {poly:#x} does not have degree {w}")

        self.w = w
        self.poly = poly
        self.eta = eta
        self.q = 1 << w
        self.order = self.q - 1

        exp = [0] * (2 * self.order)
        log = [-1] * self.q
        x = 1
        for i in range(self.order):
            if log[x] != -1:
                raise ParameterError(
                    f"eta={eta:#x} is not primitive for poly {poly:#x} "
                    f"(order {i} < {self.order})"
                )
            exp[i] = x
            log[x] = i
            x = carryless_mul(x, eta, poly, w)
        if x != 1:
            raise ParameterError(f"eta={eta:#x} is not primitive for poly {poly:#x}")
        for i in range(self.order, 2 * self.order):
            exp[i] = exp[i - self.order]

        self._exp = exp
        self._log = log
        self._exp_np = np.array(exp, dtype=np.uint32)
        self._log_np = np.array([0 if v < 0 else v for v in log], dtype=np.int64)

    def __repr__(self) -> str:
        return f"Field(w={self.w}, poly={self.poly:#x}, eta={self.eta:#x})"

    @staticmethod
    def add(a, b):
        """Field addition (XOR); works on ints and numpy arrays alike."""
        return a ^ b

    def mul(self, a: int, b):
        """Multiply scalar a by b, where b is an int or a numpy array."""
        if isinstance(b, np.ndarray):
            if a == 0:
                return np.zeros_like(b, dtype=np.uint32)
            out = self._exp_np[self._log_np[b] + self._log[a]]
            if (zero := b == 0).any():
                out[zero] = 0
            return out
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse in GF(2^w)")
        return self._exp[self.order - self._log[a]]

    def div(self, a, b: int):
        return self.mul(self.inv(b), a)

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e == 0:
                return 1
            if e < 0:
                raise ZeroDivisionError("negative power of zero")
            return 0
        return self._exp[self._log[a] * e % self.order]

    def eta_pow(self, e: int) -> int:
        """eta raised to e (e may be any integer)."""
        return self._exp[e % self.order]

    def dot(self, coeffs, symbols):
        """GF inner product; symbols may be ints or stripe arrays."""
        if isinstance(symbols, (list, tuple)) and symbols and isinstance(symbols[0], int):
            exp, log = self._exp, self._log
            acc = 0
            for c, x in zip(coeffs, symbols):
                if c and x:
                    acc ^= exp[log[c] + log[x]]
            return acc
        acc = None
        for c, x in zip(coeffs, symbols):
            term = self.mul(c, x)
            acc = term if acc is None else acc ^ term
        if acc is None:
            return 0
        return acc

    def matvec(self, rows, symbols) -> list:
        return [self.dot(row, symbols) for row in rows]


@functools.lru_cache(maxsize=None)
def field(w: int, poly: int | None = None, eta: int = DEFAULT_ETA) -> Field:
    """Shared Field instance for (w, poly, eta)."""
    return Field(w, poly, eta)


def parity_vectors(k: int, m: int, fld: Field) -> list[list[int]]:
    """m x k parity coefficient matrix.

    Row j (1-based), column c (1-based) holds eta^(c*(j-1)), so row 1 is
    all ones and row 2 is the consecutive powers eta^1..eta^k.
    """
    if m < 1 or k < 1:
        raise ParameterError(f"parity_vectors needs m >= 1 and k >= 1, got m={m} k={k}")
    if k >= fld.q - 1:
        raise ParameterError(
            f"k={k} too large for GF(2^{fld.w}): need k < {fld.q - 1}"
        )
    return [
        [fld.eta_pow(c * j) for c in range(1, k + 1)]
        for j in range(m)
    ]
