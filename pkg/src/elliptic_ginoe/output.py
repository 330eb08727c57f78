"""Faithful text output of arbitrary-precision values.

Printed decimal digits are floor(bits * log10(2)) - 8 so the files
carry the internal precision without pretending to more. Derived
columns (log10_p, ratio, z_score, ...) are recomputed from the
*printed* primary columns before being written; re-parsing a dump and
re-deriving them therefore reproduces the file bit-identically, which
the test suite checks.

JSON mirrors the CSV schema. Arbitrary-precision numbers are emitted as
decimal strings: many of them (p values near 1e-700) have no double
representation at all, and the in-range ones would silently lose digits
in any consumer that parses JSON numbers as doubles.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from fractions import Fraction

import mpmath
from mpmath import mp, mpf


def digits_for_bits(bits: int) -> int:
    return int(math.floor(bits * math.log10(2))) - 8


def format_mpf(x, digits: int) -> str:
    """Scientific-notation decimal string with the given significant digits."""
    xv = x if isinstance(x, mpf) else mpmath.mpmathify(x)
    if xv == 0:
        return "0"
    if mpmath.isinf(xv):
        return "inf" if xv > 0 else "-inf"
    # min_fixed > max_fixed forces exponential form for every magnitude
    return mpmath.nstr(xv, digits, min_fixed=1, max_fixed=0)


def parse_decimal(s: str, bits: int) -> mpf:
    with mp.workprec(bits + 16):
        if s == "-inf":
            return mpf("-inf")
        if s == "inf":
            return mpf("+inf")
        return mpf(s)


def format_fraction(fr: Fraction, digits: int) -> str:
    """Exact decimal when the denominator is 2^a 5^b, rounded otherwise."""
    den = fr.denominator
    while den % 2 == 0:
        den //= 2
    while den % 5 == 0:
        den //= 5
    if den == 1:
        scale = 1
        exp10 = 0
        d = fr.denominator
        while d % 2 == 0:
            d //= 2
            scale *= 5
            exp10 += 1
        while d % 5 == 0:
            d //= 5
            scale *= 2
            exp10 += 1
        digits_int = fr.numerator * scale
        text = str(digits_int)
        if exp10 == 0:
            return text
        neg = text.startswith("-")
        if neg:
            text = text[1:]
        text = text.rjust(exp10 + 1, "0")
        return ("-" if neg else "") + f"{text[:-exp10]}.{text[-exp10:]}"
    with mp.workprec(4 * digits):
        return format_mpf(mpf(fr.numerator) / fr.denominator, digits)


def derived_log10(p_str: str, ctx) -> str:
    """log10 of a printed probability, formatted for the same file."""
    p = parse_decimal(p_str, ctx.bits)
    with mp.workprec(ctx.bits + 16):
        if p <= 0:
            return "-inf"
        return format_mpf(mpmath.log10(p), digits_for_bits(ctx.bits))


def derived_ratio(num_str: str, den_str: str, ctx) -> str:
    if not num_str or not den_str:
        return ""
    a = parse_decimal(num_str, ctx.bits)
    b = parse_decimal(den_str, ctx.bits)
    with mp.workprec(ctx.bits + 16):
        if b == 0:
            return "inf"
        return format_mpf(a / b, digits_for_bits(ctx.bits))


def derived_mc_stats(emp_str: str, exact_str: str, trials: int, ctx) -> tuple[str, str]:
    """(std_err, z_score) from the printed empirical and exact columns."""
    emp = parse_decimal(emp_str, ctx.bits)
    exact = parse_decimal(exact_str, ctx.bits)
    with mp.workprec(ctx.bits + 16):
        se = mpmath.sqrt(exact * (1 - exact) / trials)
        if se == 0:
            z = mpf(0) if emp == exact else mpf("+inf")
        else:
            z = (emp - exact) / se
        return format_mpf(se, 17), format_mpf(z, 17)


def atomic_write(path: str, text: str) -> None:
    """Write via a temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_dump(text: str):
    """Parse a dump produced by this package: (metadata, header, rows)."""
    meta = {}
    header = None
    rows = []
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            for chunk in line[1:].strip().split():
                if "=" in chunk:
                    key, _, val = chunk.partition("=")
                    meta[key] = val
            continue
        if header is None:
            header = line.split(",")
            continue
        rows.append(dict(zip(header, line.split(","))))
    return meta, header, rows


def csv_to_json(csv_text: str) -> str:
    """JSON mirror of a CSV dump: metadata object plus column-keyed rows.

    Numeric cells stay strings (see module docstring); integer-valued
    columns (k, counts) become JSON integers.
    """
    meta, header, rows = read_dump(csv_text)
    out_rows = []
    for row in rows:
        converted = {}
        for key, val in row.items():
            try:
                converted[key] = int(val)
            except ValueError:
                converted[key] = val
        out_rows.append(converted)
    return json.dumps({"meta": meta, "columns": header, "rows": out_rows}, indent=1)
