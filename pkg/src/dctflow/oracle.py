"""Dense reference matrices for the cosine transforms and factorization blocks.

Everything downstream (plan construction, folding, the CLI ``verify``
subcommand) is checked against these matrices, so they are built directly
from the defining kernels with no shortcuts beyond shared angle reduction.

Conventions, fixed once here and relied on everywhere else:

* ``dct2_matrix(N)[k, n] = cos(pi * (2n + 1) * k / (2N))`` -- row index is
  frequency, column index is time, row 0 is all ones.
* ``dct3_matrix(N)`` is exactly the transpose of ``dct2_matrix(N)`` (the
  same float values, not a re-evaluation of a second kernel).
* ``dct4_matrix(N)[k, n] = cos(pi * (2n + 1) * (2k + 1) / (4N))``, the
  symmetric form, so the matrix is involutary up to a constant:
  ``C4 @ C4 == (N / 2) * I``.

None of the matrices carry normalization factors; scaling is the job of
the factorizations that consume them.
"""

from __future__ import annotations

import numpy as np


def _check_size(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise TypeError(f"size must be an int, got {type(n).__name__}")
    if n < 1:
        raise ValueError(f"size must be positive, got {n}")


def _cos_grid(num: np.ndarray, den: int) -> np.ndarray:
    # Reduce the integer numerator mod 2*den before multiplying by pi so
    # large N does not lose precision to giant arguments.
    return np.cos(np.pi * (num % (2 * den)) / den)


def dct2_matrix(n: int) -> np.ndarray:
    """Unnormalized DCT-II matrix, shape (n, n)."""
    _check_size(n)
    k = np.arange(n).reshape(-1, 1)
    m = 2 * np.arange(n).reshape(1, -1) + 1
    return _cos_grid(k * m, 2 * n)


def dct3_matrix(n: int) -> np.ndarray:
    """Unnormalized DCT-III matrix: the exact transpose of dct2_matrix(n)."""
    return dct2_matrix(n).T.copy()


def dct4_matrix(n: int) -> np.ndarray:
    """Unnormalized DCT-IV matrix in its symmetric (involutary) form."""
    _check_size(n)
    k = 2 * np.arange(n).reshape(-1, 1) + 1
    m = 2 * np.arange(n).reshape(1, -1) + 1
    return _cos_grid(k * m, 4 * n)


def r_matrix(n: int) -> np.ndarray:
    """Lower-triangular recursive-subtraction matrix R_n.

    (i, 0) entries are (-1)^i / 2; below-diagonal entries (i, j) for
    1 <= j <= i are (-1)^(i-j); everything above the diagonal is zero.
    Realizable as n-1 additions plus one halving.
    """
    _check_size(n)
    r = np.zeros((n, n))
    for i in range(n):
        r[i, 0] = 0.5 * (-1.0) ** i
        for j in range(1, i + 1):
            r[i, j] = (-1.0) ** (i - j)
    return r


def d_matrix(n: int) -> np.ndarray:
    """Diagonal of doubled quarter-wave cosines: diag(2 cos((2k+1)pi/(4n)))."""
    _check_size(n)
    k = 2 * np.arange(n) + 1
    return np.diag(2.0 * _cos_grid(k, 4 * n))


def b_matrix(n: int) -> np.ndarray:
    """Butterfly block [[I, J], [J, -I]] of even size n."""
    _check_size(n)
    if n % 2:
        raise ValueError(f"butterfly size must be even, got {n}")
    h = n // 2
    eye = np.eye(h)
    rev = np.fliplr(eye)
    top = np.hstack([eye, rev])
    bot = np.hstack([rev, -eye])
    return np.vstack([top, bot])


def j_matrix(n: int) -> np.ndarray:
    """Order-reversal permutation."""
    _check_size(n)
    return np.fliplr(np.eye(n))


def p_matrix(n: int) -> np.ndarray:
    """Even/odd interleave permutation of even size n.

    Output wire 2i takes input i (upper half), wire 2i+1 takes input
    n/2 + i (lower half): P[2i, i] = P[2i+1, n/2+i] = 1.
    """
    _check_size(n)
    if n % 2:
        raise ValueError(f"interleave size must be even, got {n}")
    h = n // 2
    p = np.zeros((n, n))
    for i in range(h):
        p[2 * i, i] = 1.0
        p[2 * i + 1, h + i] = 1.0
    return p
