"""Coordinate Cartan calculus: exterior derivative, Lie derivative, Schouten bracket.

The Schouten bracket is computed by an odd-coordinate contraction formula
rather than by splitting arguments into wedge factors, because sparse
multivectors are rarely decomposable. Writing i_k for the interior product
by dx_k and D_k for the coordinate partial applied to coefficients,

    [P, Q] = (-1)^(p-1) sum_k i_k(P) ^ D_k(Q)
             - (-1)^((p-1)(q-1)) (-1)^(q-1) sum_k i_k(Q) ^ D_k(P)

This choice is pinned down (and the tests enforce it) by three identities:

    [X, Q] = L_X Q                                  for vector fields X
    [P, Q ^ R] = [P,Q] ^ R + (-1)^((p-1) q) Q ^ [P,R]
    [P, Q] = -(-1)^((p-1)(q-1)) [Q, P]

together with the graded Jacobi identity

    [P, [Q, R]] = [[P, Q], R] + (-1)^((p-1)(q-1)) [Q, [P, R]].
"""

from __future__ import annotations

from typing import Union

from .exterior import Form, MultiVec, sort_with_sign, vector_interior
from .ratpoly import Poly


def de_rham_d(omega: Union[Poly, Form]) -> Form:
    """Exterior derivative. Satisfies d(d(omega)) = 0 exactly."""
    if isinstance(omega, Poly):
        chart = omega.chart
        comps = {}
        for i in range(chart.dim):
            c = omega.partial(i)
            if not c.is_zero:
                comps[(i,)] = c
        return Form(chart, 1, comps)
    chart = omega.chart
    acc: dict[tuple[int, ...], Poly] = {}
    for idx, p in omega.comps.items():
        for i in range(chart.dim):
            c = p.partial(i)
            if c.is_zero:
                continue
            sorted_ = sort_with_sign((i,) + idx)
            if sorted_ is None:
                continue
            sign, key = sorted_
            term = c.scale(sign)
            q = acc.get(key)
            acc[key] = term if q is None else q + term
    return Form(chart, omega.grade + 1, acc)


def _contract_index(t: MultiVec, k: int) -> MultiVec:
    """Interior product by the coordinate differential dx_k."""
    if t.grade == 0:
        return MultiVec.zero(t.chart, 0)
    acc: dict[tuple[int, ...], Poly] = {}
    for idx, p in t.comps.items():
        for j, pos in enumerate(idx):
            if pos != k:
                continue
            key = idx[:j] + idx[j + 1 :]
            term = p if j % 2 == 0 else -p
            q = acc.get(key)
            acc[key] = term if q is None else q + term
            break
    return MultiVec(t.chart, t.grade - 1, acc)


def _partial_tensor(t: MultiVec, k: int) -> MultiVec:
    return MultiVec(t.chart, t.grade, {i: p.partial(k) for i, p in t.comps.items()})


def schouten(p: Union[Poly, MultiVec], q: Union[Poly, MultiVec]) -> MultiVec:
    """Schouten bracket of multivector fields (grade 0 means a function)."""
    if isinstance(p, Poly):
        p = MultiVec.from_poly(p)
    if isinstance(q, Poly):
        q = MultiVec.from_poly(q)
    if p.chart != q.chart:
        raise ValueError("chart mismatch")
    gp, gq = p.grade, q.grade
    if gp + gq < 1:
        raise ValueError("bracket of two functions is not defined")
    chart = p.chart
    acc = MultiVec.zero(chart, gp + gq - 1)
    sign_a = 1 if (gp - 1) % 2 == 0 else -1
    sign_b = 1 if ((gp - 1) * (gq - 1) + (gq - 1)) % 2 == 0 else -1
    for k in range(chart.dim):
        if gp >= 1:
            ip = _contract_index(p, k)
            if not ip.is_zero:
                dq = _partial_tensor(q, k)
                if not dq.is_zero:
                    acc = acc + ip.wedge(dq).scale(sign_a)
        if gq >= 1:
            iq = _contract_index(q, k)
            if not iq.is_zero:
                dp = _partial_tensor(p, k)
                if not dp.is_zero:
                    acc = acc - iq.wedge(dp).scale(sign_b)
    return acc


def lie_derivative(
    x: MultiVec, target: Union[Poly, MultiVec, Form]
) -> Union[Poly, MultiVec, Form]:
    """Lie derivative along a vector field.

    Functions go to X(f), multivectors through the Schouten bracket, forms
    through the Cartan formula L_X = d i_X + i_X d. The two routes agree
    where both apply (duality pairing identity, tested).
    """
    if x.grade != 1:
        raise ValueError("Lie derivative needs a grade-1 field")
    if isinstance(target, Poly):
        return x.apply_to(target)
    if isinstance(target, MultiVec):
        return schouten(x, target)
    if isinstance(target, Form):
        if target.grade == 0:
            return Form.from_poly(x.apply_to(target.component(())))
        inner = vector_interior(x, target)
        acc = de_rham_d(inner.component(()) if inner.grade == 0 else inner)
        d_omega = de_rham_d(target)
        if not d_omega.is_zero:
            acc = acc + vector_interior(x, d_omega)
        return acc
    raise TypeError(f"cannot take a Lie derivative of {type(target).__name__}")
