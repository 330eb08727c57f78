"""High-precision symmetric eigendecomposition of the kernel matrix.

The eigenvalues are the Bernoulli parameters of the factorized
generating function, so they must be accurate in the *relative* sense
even when they span dozens of orders of magnitude (the smallest one
controls the extreme-tail probabilities). Cyclic-by-row Jacobi is used
because its rounding behaviour at extended precision is small and
analyzable; rotations are applied until every off-diagonal entry is
below 2^(-p+8) * sqrt(|a_pp a_qq|) at the internal precision p, which
in particular drives every off-diagonal below 2^(-bits+8) times the
Frobenius norm.

Plain fixed-precision Jacobi still only gives tiny eigenvalues absolute
accuracy of order eps * ||A||, so the solver first estimates the
eigenvalue spread with a diagonally pivoted Cholesky factorization (its
smallest pivot tracks the smallest eigenvalue to within a small factor)
and raises the internal precision by the dynamic range. Relative
accuracy of the result is certified downstream against the trace and a
determinant computed independently at elevated precision.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import gmpy2
from mpmath import mp, mpf

from ._backend import mpf_to_mpfr, mpfr_to_mpf
from .errors import ConvergenceError, DomainError, FactorizationViolationError
from .kernel import EnsembleParams, KernelMatrix
from .precision import PrecisionContext
from . import output


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of the kernel matrix, sorted descending.

    residual is the largest off-diagonal magnitude at termination in
    units of the Frobenius norm; internal_bits records the precision the
    rotations actually ran at.
    """

    lambdas: tuple
    source: EnsembleParams
    residual: mpf
    bits: int
    internal_bits: int

    @property
    def dim(self) -> int:
        return len(self.lambdas)


def _matrix_rows(m) -> list:
    if isinstance(m, KernelMatrix):
        return [list(r) for r in m.entries]
    rows = [list(r) for r in m]
    dim = len(rows)
    if any(len(r) != dim for r in rows):
        raise DomainError("matrix must be square")
    for i in range(dim):
        for j in range(i + 1, dim):
            if rows[i][j] != rows[j][i]:
                raise DomainError(f"matrix not symmetric at ({i},{j})")
    return rows


def _cholesky_min_pivot(rows_mpfr, dim):
    """Smallest pivot of the diagonally pivoted outer-product Cholesky.

    For a positive definite matrix this tracks the smallest eigenvalue
    to within a modest factor; a nonpositive pivot means the matrix is
    not resolvably positive definite at the current precision.
    """
    a = [row[:] for row in rows_mpfr]
    smallest = None
    for c in range(dim):
        piv = max(range(c, dim), key=lambda r: a[r][r])
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            for r in range(dim):
                a[r][c], a[r][piv] = a[r][piv], a[r][c]
        p = a[c][c]
        if smallest is None or p < smallest:
            smallest = p
        if p <= 0:
            return smallest
        for r in range(c + 1, dim):
            f = a[r][c] / p
            for cc in range(c + 1, dim):
                a[r][cc] -= f * a[c][cc]
    return smallest


def _jacobi(rows_mpfr, dim, prec, pair_order, max_sweeps):
    """Cyclic Jacobi with relative (scaled) rotation thresholds.

    Returns (diagonal, residual_ratio, sweeps). Entries of rows_mpfr are
    consumed. Pairs whose product of diagonal entries is nonpositive
    (possible for general symmetric input) fall back to a Frobenius-norm
    threshold.
    """
    a = rows_mpfr
    one = gmpy2.mpfr(1)
    tol = gmpy2.exp2(-prec + 8)
    fro2 = gmpy2.mpfr(0)
    for i in range(dim):
        for j in range(dim):
            fro2 += a[i][j] ** 2
    fro = gmpy2.sqrt(fro2)
    abs_thresh = tol * fro

    sweeps = 0
    for _ in range(max_sweeps):
        sweeps += 1
        rotated = False
        for p, q in pair_order:
            apq = a[p][q]
            if apq == 0:
                continue
            dd = a[p][p] * a[q][q]
            thresh = tol * gmpy2.sqrt(dd) if dd > 0 else abs_thresh
            if abs(apq) <= thresh:
                continue
            rotated = True
            zeta = (a[q][q] - a[p][p]) / (2 * apq)
            t = one / (abs(zeta) + gmpy2.sqrt(1 + zeta * zeta))
            if zeta < 0:
                t = -t
            c = one / gmpy2.sqrt(1 + t * t)
            s = t * c
            for i in range(dim):
                ai = a[i]
                aip, aiq = ai[p], ai[q]
                ai[p] = c * aip - s * aiq
                ai[q] = s * aip + c * aiq
            ap, aq = a[p], a[q]
            for i in range(dim):
                api, aqi = ap[i], aq[i]
                ap[i] = c * api - s * aqi
                aq[i] = s * api + c * aqi
        if not rotated:
            break
    else:
        worst = max(abs(a[i][j]) for i in range(dim) for j in range(i + 1, dim))
        raise ConvergenceError(
            f"Jacobi did not converge within {max_sweeps} sweeps",
            residual=mpfr_to_mpf(worst / fro),
            iterations=max_sweeps,
        )

    worst = gmpy2.mpfr(0)
    for i in range(dim):
        for j in range(i + 1, dim):
            if abs(a[i][j]) > worst:
                worst = abs(a[i][j])
    return [a[i][i] for i in range(dim)], (worst / fro if fro > 0 else gmpy2.mpfr(0)), sweeps


def eigen_sym(m, ctx: PrecisionContext, rotation_order_seed: int | None = None) -> Spectrum:
    """Eigenvalues of a symmetric matrix, accurate relatively across scales.

    Accepts a KernelMatrix or any square symmetric nested sequence of
    mpf values. rotation_order_seed permutes the cyclic sweep order; the
    result must be invariant under it (tested), it exists only to
    exercise that invariance.
    """
    rows = _matrix_rows(m)
    dim = len(rows)
    params = m.params if isinstance(m, KernelMatrix) else None
    if dim == 0:
        raise DomainError("empty matrix")
    if dim == 1:
        return Spectrum(
            lambdas=(rows[0][0],),
            source=params,
            residual=mpf(0),
            bits=ctx.bits,
            internal_bits=ctx.bits,
        )

    probe = ctx.bits + 32
    with gmpy2.context(precision=probe):
        g = [[mpf_to_mpfr(v) for v in row] for row in rows]
        fro = gmpy2.sqrt(sum(g[i][j] ** 2 for i in range(dim) for j in range(dim)))
        min_pivot = _cholesky_min_pivot(g, dim)
        if min_pivot is not None and min_pivot > 0 and fro > 0:
            spread = int(gmpy2.ceil(gmpy2.log2(fro / min_pivot)))
            extra = max(0, spread)
        else:
            # not resolvably positive definite; plan for the worst spread
            # the probe precision could have hidden
            extra = probe

    internal = ctx.bits + 48 + extra
    pairs = [(p, q) for p in range(dim - 1) for q in range(p + 1, dim)]
    if rotation_order_seed is not None:
        random.Random(rotation_order_seed).shuffle(pairs)
    max_sweeps = 48 + internal // 4

    with gmpy2.context(precision=internal):
        g = [[mpf_to_mpfr(v) for v in row] for row in rows]
        diag, residual, _ = _jacobi(g, dim, internal, pairs, max_sweeps)

    lams = sorted((mpfr_to_mpf(v) for v in diag), reverse=True)
    return Spectrum(
        lambdas=tuple(lams),
        source=params,
        residual=mpfr_to_mpf(residual),
        bits=ctx.bits,
        internal_bits=internal,
    )


def bernoulli_decomposition(spec: Spectrum, ctx: PrecisionContext | None = None):
    """(lambda, 1 - lambda) success/failure pairs of the Bernoulli factors.

    Every eigenvalue must lie in (0, 1) up to the context tolerance;
    a violation means the factorization premise failed and is raised
    rather than clipped.
    """
    bits = ctx.bits if ctx is not None else spec.bits
    with mp.workprec(bits + 16):
        eps = mpf(2) ** (1 - bits)
        for lam in spec.lambdas:
            if lam <= -eps or lam >= 1 + eps:
                raise FactorizationViolationError(
                    f"eigenvalue {lam} outside (0, 1) beyond tolerance {eps}"
                )
        return tuple((lam, 1 - lam) for lam in spec.lambdas)


def determinant(m, bits: int) -> mpf:
    """Determinant by partially pivoted elimination at the given precision.

    Serves as the independent oracle for the eigenvalue product; run it
    at elevated precision (for ill-conditioned input its relative error
    scales with eps times the condition number).
    """
    rows = _matrix_rows(m)
    dim = len(rows)
    with gmpy2.context(precision=bits):
        a = [[mpf_to_mpfr(v) for v in row] for row in rows]
        det = gmpy2.mpfr(1)
        for c in range(dim):
            piv = max(range(c, dim), key=lambda r: abs(a[r][c]))
            if piv != c:
                a[c], a[piv] = a[piv], a[c]
                det = -det
            if a[c][c] == 0:
                return mpf(0)
            det *= a[c][c]
            for r in range(c + 1, dim):
                f = a[r][c] / a[c][c]
                for cc in range(c + 1, dim):
                    a[r][cc] -= f * a[c][cc]
        return mpfr_to_mpf(det)


def dump_spectrum(spec: Spectrum, ctx: PrecisionContext, stream) -> None:
    """One eigenvalue per line, descending, with a parameter header."""
    digits = output.digits_for_bits(ctx.bits)
    params = spec.source
    tau = output.format_fraction(params.tau, digits) if params is not None else "?"
    n = params.n if params is not None else "?"
    stream.write(
        f"# N={n} tau={tau} bits={spec.bits} residual={output.format_mpf(spec.residual, 8)}\n"
    )
    for lam in spec.lambdas:
        stream.write(output.format_mpf(lam, digits))
        stream.write("\n")
