"""2-jets of origin-fixing maps and their identification with GL(n) ⋈ S¹₂"""

import logging
from typing import Dict, List, Tuple

import numpy as np
import sympy as sp

from src.models.jet import Jet2, PolyMap2
from src.models.lie import GroupElement
from src.models.schemas import Tolerances
from .algebra_core import DEFAULT_TOLERANCES, check_same_shape, mat_inverse

logger = logging.getLogger(__name__)


def jet_identity(n: int) -> Jet2:
    return Jet2(A1=np.eye(n), A2=np.zeros((n, n, n)))


def jet_compose(a: Jet2, b: Jet2) -> Jet2:
    """
    Jet of the composite a∘b by the chain rule:
    - A1' = A1·B1
    - A2'^k_{ij} = A1^k_l B2^l_{ij} + A2^k_{lm} B1^l_i B1^m_j
    """
    check_same_shape(a.A1, b.A1)
    return Jet2(
        A1=a.A1 @ b.A1,
        A2=np.einsum("kl,lij->kij", a.A1, b.A2) + np.einsum("klm,li,mj->kij", a.A2, b.A1, b.A1),
    )


def jet_inverse(a: Jet2, tolerances: Tolerances = DEFAULT_TOLERANCES) -> Jet2:
    """B1 = A1⁻¹, B2^l_{ij} = −(A1⁻¹)^l_k A2^k_{pq} (A1⁻¹)^p_i (A1⁻¹)^q_j"""
    a1_inv = mat_inverse(a.A1, tolerances)
    return Jet2(
        A1=a1_inv,
        A2=-np.einsum("lk,kpq,pi,qj->lij", a1_inv, a.A2, a1_inv, a1_inv),
    )


def jet_to_group(a: Jet2) -> GroupElement:
    return GroupElement(g=a.A1, v=a.A2)


def group_to_jet(e: GroupElement) -> Jet2:
    return Jet2(A1=e.g, A2=e.v)


def polymap_identity(n: int) -> PolyMap2:
    return PolyMap2(linear=np.eye(n), quadratic=np.zeros((n, n, n)))


def polymap_eval(p: PolyMap2, x: np.ndarray) -> np.ndarray:
    """φ(x) = linear·x + ½·quadratic(x, x)"""
    x = np.asarray(x, dtype=np.float64)
    return p.linear @ x + 0.5 * np.einsum("kij,i,j->k", p.quadratic, x, x)


def polymap_jet(p: PolyMap2) -> Jet2:
    return Jet2(A1=p.linear, A2=p.quadratic)


def _symbols(n: int) -> Tuple[sp.Symbol, ...]:
    return tuple(sp.symbols(f"x0:{n}"))


def _exponent(n: int, *indices: int) -> Tuple[int, ...]:
    exponent = [0] * n
    for i in indices:
        exponent[i] += 1
    return tuple(exponent)


def _as_polys(p: PolyMap2, gens: Tuple[sp.Symbol, ...]) -> List[sp.Poly]:
    """Components of p as exact rational polynomials"""
    n = p.n
    polys = []
    for k in range(n):
        terms: Dict[Tuple[int, ...], sp.Rational] = {}
        for i in range(n):
            key = _exponent(n, i)
            terms[key] = terms.get(key, sp.Integer(0)) + sp.Rational(float(p.linear[k, i]))
            for j in range(n):
                key = _exponent(n, i, j)
                terms[key] = terms.get(key, sp.Integer(0)) + sp.Rational(float(p.quadratic[k, i, j])) / 2
        polys.append(sp.Poly.from_dict(terms, *gens, domain=sp.QQ))
    return polys


def polymap_compose_truncate(p: PolyMap2, q: PolyMap2) -> PolyMap2:
    """
    p∘q expanded exactly over the rationals and truncated to second order at 0.

    Coefficients are converted from the binary floats exactly, so the only rounding
    happens when reading the truncated coefficients back.
    """
    check_same_shape(p.linear, q.linear)
    n = p.n
    gens = _symbols(n)
    q_polys = _as_polys(q, gens)
    zero = sp.Poly(0, *gens, domain=sp.QQ)
    products = {(l, m): q_polys[l] * q_polys[m] for l in range(n) for m in range(l, n)}

    linear = np.zeros((n, n))
    quadratic = np.zeros((n, n, n))
    for k in range(n):
        composite = zero
        for l in range(n):
            composite += q_polys[l].mul_ground(sp.Rational(float(p.linear[k, l])))
            for m in range(n):
                coefficient = sp.Rational(float(p.quadratic[k, l, m])) / 2
                if coefficient != 0:
                    composite += products[min(l, m), max(l, m)].mul_ground(coefficient)
        for monomial, coefficient in composite.terms():
            degree = sum(monomial)
            indices = [i for i, power in enumerate(monomial) for _ in range(power)]
            if degree == 1:
                linear[k, indices[0]] = float(coefficient)
            elif degree == 2:
                i, j = indices
                if i == j:
                    quadratic[k, i, i] = float(2 * coefficient)
                else:
                    quadratic[k, i, j] = quadratic[k, j, i] = float(coefficient)
    logger.debug(f"Composed quadratic maps symbolically for n={n}")
    return PolyMap2(linear=linear, quadratic=quadratic)
