"""Dense univariate polynomials over Q.

A polynomial is a tuple of :class:`fractions.Fraction` coefficients in
ascending degree with no trailing zeros; the zero polynomial is ``()``.
Everything here is a plain function on tuples so the rational-function
type can stay thin.
"""

from __future__ import annotations

from fractions import Fraction

Poly = tuple

ZERO: Poly = ()
ONE: Poly = (Fraction(1),)


def trim(coeffs) -> Poly:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(Fraction(x) for x in c)


def const(q) -> Poly:
    q = Fraction(q)
    return (q,) if q else ZERO


def deg(p: Poly) -> int:
    """Degree; the zero polynomial has degree -1."""
    return len(p) - 1


def lc(p: Poly) -> Fraction:
    return p[-1] if p else Fraction(0)


def add(p: Poly, q: Poly) -> Poly:
    if len(p) < len(q):
        p, q = q, p
    out = list(p)
    for i, c in enumerate(q):
        out[i] += c
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def neg(p: Poly) -> Poly:
    return tuple(-c for c in p)


def sub(p: Poly, q: Poly) -> Poly:
    return add(p, neg(q))


def scale(p: Poly, q) -> Poly:
    if not q:
        return ZERO
    return tuple(c * q for c in p)


def mul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return ZERO
    if len(p) == 1:
        return scale(q, p[0])
    if len(q) == 1:
        return scale(p, q[0])
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return tuple(out)


def divmod_(p: Poly, q: Poly) -> tuple[Poly, Poly]:
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    if len(q) == 1:
        inv = 1 / q[0]
        return scale(p, inv), ZERO
    r = list(p)
    dq = len(q) - 1
    inv = 1 / q[-1]
    quot = [Fraction(0)] * max(len(p) - dq, 0)
    for k in range(len(p) - 1 - dq, -1, -1):
        c = r[k + dq] * inv
        if c:
            quot[k] = c
            for i, b in enumerate(q):
                r[k + i] -= c * b
    while r and r[-1] == 0:
        r.pop()
    return trim(quot), tuple(r)


def exact_div(p: Poly, q: Poly) -> Poly:
    quot, rem = divmod_(p, q)
    if rem:
        raise ArithmeticError("inexact polynomial division")
    return quot


def monic(p: Poly) -> Poly:
    if not p or p[-1] == 1:
        return p
    inv = 1 / p[-1]
    return tuple(c * inv for c in p)


def gcd(p: Poly, q: Poly) -> Poly:
    """Monic gcd (``()`` only when both inputs are zero)."""
    while q:
        p, q = q, divmod_(p, q)[1]
    return monic(p)


def evaluate(p: Poly, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def substitute_affine(p: Poly, a, b) -> Poly:
    """p(a*s + b)."""
    lin = trim((b, a))
    acc: Poly = ZERO
    for c in reversed(p):
        acc = add(mul(acc, lin), const(c))
    return acc


def scale_var(p: Poly, k) -> Poly:
    """p(k*s)."""
    out = []
    power = Fraction(1)
    for c in p:
        out.append(c * power)
        power *= k
    return trim(out)


def to_str(p: Poly, var: str = "s") -> str:
    if not p:
        return "0"
    parts = []
    for i in range(len(p) - 1, -1, -1):
        c = p[i]
        if not c:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if i == 0:
            body = str(mag)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            body = mono if mag == 1 else f"{mag}*{mono}"
        parts.append((sign, body))
    head_sign, head = parts[0]
    text = ("-" if head_sign == "-" else "") + head
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text
