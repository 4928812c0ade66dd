"""Independent reference computations built on sympy, used only by the tests."""

from __future__ import annotations

from sympy import Poly, groebner, reduced, symbols

X, Y, Z = symbols("x y z")


def to_expr(poly) -> object:
    return sum(v * X**a * Y**b * Z**c for (a, b, c), v in poly.terms.items())


def sympy_normal_form(expr, d: int, p: int) -> dict:
    """Remainder of expr modulo z^d - x^d - y^d with z eliminated first."""
    _, rem = reduced(expr, [Z**d - X**d - Y**d], Z, X, Y, modulus=p)
    out = {}
    for (c, a, b), v in Poly(rem, Z, X, Y, modulus=p).terms():
        v = int(v) % p
        if v:
            out[(a, b, c)] = v
    return out


def sympy_member(f, gens, d: int, p: int) -> bool:
    """f in (gens, x^d + y^d - z^d) over GF(p), via a Groebner basis."""
    G = groebner([*gens, X**d + Y**d - Z**d], X, Y, Z, modulus=p, order="grevlex")
    return G.reduce(f)[1] == 0


def sympy_colength(gens, d: int, p: int) -> int:
    """Number of standard monomials of (gens, x^d + y^d - z^d) under grevlex."""
    G = groebner([*gens, X**d + Y**d - Z**d], X, Y, Z, modulus=p, order="grevlex")
    leads = [Poly(g, X, Y, Z).monoms(order="grevlex")[0] for g in G.exprs]
    box = []
    for axis in range(3):
        pure = [m[axis] for m in leads if sum(m) == m[axis]]
        if not pure:
            raise ValueError("quotient is not finite")
        box.append(min(pure))
    return sum(
        1
        for a in range(box[0])
        for b in range(box[1])
        for c in range(box[2])
        if not any(a >= m[0] and b >= m[1] and c >= m[2] for m in leads)
    )
