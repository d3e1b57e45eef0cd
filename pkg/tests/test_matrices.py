"""Extended validation on semiclassical matrix algebras.

The m x n matrix Poisson algebra is an iterated tower in row-major order;
the number of torus-stable Poisson primes is known in closed form (a
poly-Bernoulli number), which gives an independent oracle for the whole
enumeration pipeline well beyond the shipped fixtures.
"""

from math import factorial

import pytest

from pcgl.cauchon import enumerate_hprimes
from pcgl.cgl import PoissonPresentation, verify_cgl
from pcgl.grading import GradingData
from pcgl.ideals import ideal_equal, contract_to_prefix
from pcgl.pbracket import BracketTable
from pcgl.qpoly import VarTable, parse


def matrix_presentation(m: int, n: int) -> PoissonPresentation:
    """Semiclassical m x n matrix algebra: row brackets x_ij x_il (j < l),
    column brackets x_ij x_kj (i < k), diagonal pairs {x_ij, x_kl} =
    2 x_il x_kj (i < k, j < l), anti-diagonal pairs commute.  The torus is
    (K*)^(m+n) scaling rows and columns."""
    names = tuple(f"x{i + 1}{j + 1}" for i in range(m) for j in range(n))
    ctx = VarTable(names)

    def idx(i, j):
        return i * n + j

    entries = {}
    for a in range(m * n):
        for b in range(a):
            i, j = divmod(a, n)
            k, l = divmod(b, n)
            if i == k or j == l:
                entries[(a, b)] = parse(f"-1*{names[a]}*{names[b]}", ctx)
            elif j > l:
                entries[(a, b)] = parse(
                    f"-2*{names[idx(k, j)]}*{names[idx(i, l)]}", ctx
                )
    rows = []
    for r in range(m):
        rows.append([1 if divmod(g, n)[0] == r else 0 for g in range(m * n)])
    for c in range(n):
        rows.append([1 if divmod(g, n)[1] == c else 0 for g in range(m * n)])
    weights = tuple(tuple(row[g] for row in rows) for g in range(m * n))
    return PoissonPresentation(
        ctx=ctx, table=BracketTable(ctx, entries), grading=GradingData(m + n, weights)
    )


def stirling2(n: int, k: int) -> int:
    if k > n or k < 0:
        return 0
    if k in (0, n):
        return 1 if k == n or n == 0 else 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


def poly_bernoulli_neg(n: int, k: int) -> int:
    """B_n^(-k): the closed-form count of the m x n branching diagrams."""
    return sum(
        factorial(j) ** 2 * stirling2(n + 1, j + 1) * stirling2(k + 1, j + 1)
        for j in range(min(n, k) + 1)
    )


def test_count_oracle_sanity():
    assert poly_bernoulli_neg(1, 1) == 2
    assert poly_bernoulli_neg(2, 2) == 14
    assert poly_bernoulli_neg(3, 2) == 46


@pytest.mark.parametrize("m,n", [(1, 1), (1, 3), (2, 2), (2, 3), (3, 2)])
def test_matrix_counts(m, n):
    P = matrix_presentation(m, n)
    assert verify_cgl(P).ok
    tree = enumerate_hprimes(P)
    assert len(tree.leaves()) == poly_bernoulli_neg(n, m)
    assert not tree.inconclusive


def test_two_by_three_minor_lifts():
    P = matrix_presentation(2, 3)
    tree = enumerate_hprimes(P)
    labels = {node.label() for node in tree.leaves()}
    assert "<x12*x21 - x11*x22>" in labels
    assert "<x13*x22 - x12*x23>" in labels


def test_two_by_three_separation():
    # Poisson-normal separation across the 46-element poset, including the
    # pairs whose smaller member contracts to a non-variable ideal (the
    # 2x2 minor), which exercise the quotient-tower route
    from pcgl.cauchon import separating_normal

    P = matrix_presentation(2, 3)
    leaves = enumerate_hprimes(P).leaves()
    pairs = []
    for a in leaves:
        for b in leaves:
            if a is b:
                continue
            nested = all(b.ideal.member(g)[0] for g in a.ideal.generators)
            proper = not all(a.ideal.member(g)[0] for g in b.ideal.generators)
            if nested and proper:
                pairs.append((a, b))
    pairs.sort(key=lambda ab: (ab[0].label(), ab[1].label()))
    minor_pairs = [ab for ab in pairs if "x11*x22" in ab[0].label()]
    sample = pairs[::5] + minor_pairs
    for a, b in sample:
        res = separating_normal(P, a, b)
        assert res is not None, (a.label(), b.label())
        assert b.ideal.member(res.element)[0]
        assert not a.ideal.member(res.element)[0]


def test_three_by_three():
    # the deep case: denominators of the d-elements are themselves 2x2
    # minors found earlier along the lineage
    P = matrix_presentation(3, 3)
    tree = enumerate_hprimes(P)
    assert len(tree.leaves()) == poly_bernoulli_neg(3, 3) == 230
    assert not tree.inconclusive
    deep = [
        node
        for node in tree.levels[9]
        if node.branch == "d-branch" and node.parent.ideal.is_zero()
    ]
    assert len(deep) == 1
    det_ideal = deep[0].ideal
    det = parse(
        "x11*x22*x33 - x11*x23*x32 - x12*x21*x33 + x12*x23*x31 "
        "+ x13*x21*x32 - x13*x22*x31",
        P.ctx,
    )
    assert det_ideal.member(det)[0]
    assert set(det_ideal.groebner()) == {det * -1} or set(det_ideal.groebner()) == {det}
    # contractions stay consistent down the lineage
    for node in tree.leaves():
        assert ideal_equal(contract_to_prefix(node.ideal, 8), node.parent.ideal)
