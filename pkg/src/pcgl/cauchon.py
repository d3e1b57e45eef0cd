"""The Cauchon map, Poisson-normal elements and H-prime enumeration.

For one tower level R = A[X; sigma, delta]_p with locally nilpotent delta
and eigenvalue lambda of X, the Cauchon map

    theta(a) = sum_l (1/l!) (-1/lambda)^l delta^l(a) X^(-l)

is an injective Poisson algebra homomorphism into the Laurent extension.
It produces Poisson-normal elements theta(a) X^s from normal elements of A,
pins down the d-element of the generic fiber, and drives the level-by-level
enumeration of torus-stable Poisson prime ideals.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .cgl import LevelData, PoissonPresentation, level_data, verify_cgl
from .errors import (
    NotWithinBound,
    PcglError,
    PreconditionError,
    SecondLiftError,
)
from .grading import (
    GradingData,
    monomial_weight,
    pair,
    weight_of,
)
from .ideals import (
    Elim,
    Grevlex,
    Ideal,
    contract_to_prefix,
    ideal_equal,
    intersect,
    is_h_stable,
    is_poisson_stable,
    leading_monomial,
    primality,
    saturate,
)
from .pbracket import BracketTable, bracket, is_poisson_normal
from .qpoly import (
    Monomial,
    Polynomial,
    VarTable,
    iterate_derivation,
    random_polynomial,
    re_context,
)


def _to_base(L: LevelData, a: Polynomial) -> Polynomial:
    """Coerce an element into the base ring A of the level."""
    if a.ctx == L.pres_A.ctx:
        return a
    if L.x_index in a.support():
        raise PreconditionError(f"element involves x_{L.k}, not in the base ring")
    return re_context(a, L.pres_A.ctx)


def _delta_iterates(L: LevelData, a: Polynomial):
    powers, idx = iterate_derivation(L.delta, a, L.pres_R.nilpotency_bound)
    if idx is None:
        raise NotWithinBound(
            f"delta_{L.k} iterates did not terminate within bound "
            f"{L.pres_R.nilpotency_bound}"
        )
    return powers, idx


def theta(L: LevelData, a: Polynomial) -> Polynomial:
    """The Cauchon map applied to a in A, as a Laurent polynomial in x_k."""
    a = _to_base(L, a)
    powers, idx = _delta_iterates(L, a)
    result = Polynomial.zero(L.hat_ctx)
    coeff = Fraction(1)
    factorial = 1
    for l, p in enumerate(powers):
        if p.is_zero():
            break
        if l:
            factorial *= l
            coeff *= Fraction(-1) / L.lambda_k
        xpow = Polynomial.monomial(L.hat_ctx, Monomial.make({L.x_index: -l}))
        result = result + re_context(p, L.hat_ctx) * (coeff / factorial) * xpow
    return result


def s_max(L: LevelData, a: Polynomial) -> int:
    """Largest l with delta^l(a) != 0; equivalently theta(a) x_k^s is the
    minimal polynomial clearing of theta(a)."""
    a = _to_base(L, a)
    if a.is_zero():
        raise PreconditionError("s_max is undefined for zero")
    _, idx = _delta_iterates(L, a)
    return idx - 1


def _hat_x(L: LevelData) -> Polynomial:
    return Polynomial.variable(L.hat_ctx, L.x_index)


@dataclass
class ThetaReport:
    samples: int
    failures: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json_dict(self):
        return {"samples": self.samples, "ok": self.ok, "failures": self.failures}


def check_theta(L: LevelData, samples: int = 100, seed: int = 0) -> ThetaReport:
    """Verify the homomorphism identities of theta on random pairs, exactly:
    theta(ab) = theta(a)theta(b); theta({a,b}) = {theta(a),theta(b)};
    {x_k, theta(a)} = theta(sigma(a)) x_k.
    """
    rng = random.Random(seed)
    ctx_A = L.pres_A.ctx
    table_A = L.pres_A.table
    X = _hat_x(L)
    report = ThetaReport(samples=samples)
    for n in range(samples):
        a = random_polynomial(rng, ctx_A)
        b = random_polynomial(rng, ctx_A)
        ta, tb = theta(L, a), theta(L, b)
        if theta(L, a * b) != ta * tb:
            report.failures.append({"identity": "multiplicative", "a": str(a), "b": str(b)})
        if theta(L, bracket(table_A, a, b)) != bracket(L.hat_table, ta, tb):
            report.failures.append({"identity": "poisson", "a": str(a), "b": str(b)})
        if bracket(L.hat_table, X, ta) != theta(L, L.sigma(a)) * X:
            report.failures.append({"identity": "sigma-twist", "a": str(a)})
    return report


@dataclass
class NormalElementResult:
    element: Polynomial
    s: int
    eta: Fraction
    normality: object

    def __str__(self):
        return str(self.element)


def normal_element(L: LevelData, a: Polynomial) -> NormalElementResult:
    """Build the Poisson-normal eigenvector theta(a) x_k^s in R from a
    homogeneous Poisson-normal element a of A, and machine-verify both the
    normality of the result and the identity {x, x_k} = -eta x x_k."""
    a = _to_base(L, a)
    if a.is_zero():
        raise PreconditionError("input must be nonzero")
    G_A = L.pres_R.grading.restrict(L.k - 1)
    wa = weight_of(G_A, a)
    if wa is None:
        raise PreconditionError("input is not homogeneous")
    cert = is_poisson_normal(L.pres_A.table, a)
    if not cert.ok:
        raise PreconditionError("input is not Poisson-normal in the base ring", cert)
    s = s_max(L, a)
    x_hat = theta(L, a) * Polynomial.monomial(
        L.hat_ctx, Monomial.make({L.x_index: s})
    )
    if x_hat.has_negative_exponent():
        raise PcglError("theta(a) x^s left the polynomial ring")
    x = re_context(x_hat, L.pres_R.ctx)
    eta = pair(L.h_k, wa)
    out_cert = is_poisson_normal(L.pres_R.table, x)
    if not out_cert.ok:
        raise PcglError("constructed element failed the normality check")
    X = L.x()
    if bracket(L.pres_R.table, x, X) != -eta * x * X:
        raise PcglError("constructed element failed {x, x_k} = -eta x x_k")
    return NormalElementResult(element=x, s=s, eta=eta, normality=out_cert)


# ---------------------------------------------------------------------------
# d-elements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DElement:
    """A fraction b/c over the base ring A with sigma(d) = lambda d and
    delta(d) = -lambda d^2 (held as cross-multiplied identities)."""

    numerator: Polynomial
    denominator: Polynomial

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def same_fraction(self, other: "DElement") -> bool:
        return (
            self.numerator * other.denominator == other.numerator * self.denominator
        )

    def __str__(self):
        if self.denominator == 1:
            return str(self.numerator)
        num = str(self.numerator)
        den = str(self.denominator)
        if len(self.numerator.terms) > 1:
            num = f"({num})"
        if len(self.denominator.terms) > 1 or not _is_monic_term(self.denominator):
            den = f"({den})"
        return f"{num}/{den}"


def _is_monic_term(p: Polynomial) -> bool:
    return len(p.terms) == 1 and next(iter(p.terms.values())) == 1


def _normalize_fraction(b: Polynomial, c: Polynomial) -> DElement:
    if b.is_zero():
        return DElement(Polynomial.zero(b.ctx), Polynomial.constant(b.ctx, 1))
    def content(p):
        mono = None
        for m in p.terms:
            mono = m if mono is None else mono.gcd(m)
        return mono
    g = content(b).gcd(content(c))
    if g.exps:
        b = Polynomial(b.ctx, {m.divide(g): x for m, x in b.terms.items()})
        c = Polynomial(c.ctx, {m.divide(g): x for m, x in c.terms.items()})
    order = Grevlex(c.ctx)
    lc = c.terms[leading_monomial(c, order)]
    return DElement(b * (1 / lc), c * (1 / lc))


def validate_d_element(L: LevelData, d: DElement, modulo: Ideal | None = None) -> bool:
    """Check the defining invariants of d as exact (cross-multiplied)
    polynomial identities, reduced modulo the given ideal."""
    ctx_A = L.pres_A.ctx
    Q = modulo if modulo is not None else Ideal.zero(ctx_A)
    b, c = d.numerator, d.denominator
    if c.is_zero() or Q.member(c)[0]:
        return False
    G_A = L.pres_R.grading.restrict(L.k - 1)
    if not d.is_zero():
        wb, wc = weight_of(G_A, b), weight_of(G_A, c)
        if wb is None or wc is None:
            return False
        w_x = L.pres_R.grading.weights[L.x_index]
        if tuple(p - q for p, q in zip(wb, wc)) != tuple(w_x):
            return False
    lam = L.lambda_k
    sigma, delta = L.sigma, L.delta
    if not Q.member(sigma(b) * c - b * sigma(c) - lam * b * c)[0]:
        return False
    if not Q.member(delta(b) * c - b * delta(c) + lam * b * b)[0]:
        return False
    return True


def d_element_from_normal(L: LevelData, a: Polynomial) -> DElement:
    """d = delta(a) / (lambda s a) from a Poisson-normal homogeneous a with
    s = s_max(a) > 0."""
    a = _to_base(L, a)
    G_A = L.pres_R.grading.restrict(L.k - 1)
    if weight_of(G_A, a) is None:
        raise PreconditionError("input is not homogeneous")
    cert = is_poisson_normal(L.pres_A.table, a)
    if not cert.ok:
        raise PreconditionError("input is not Poisson-normal in the base ring", cert)
    s = s_max(L, a)
    if s == 0:
        raise PreconditionError("s_max(a) = 0: no d-element from this recipe")
    d = _normalize_fraction(L.delta(a), (L.lambda_k * s) * a)
    if not validate_d_element(L, d):
        raise PcglError("d-element invariants failed")
    return d


def _monomials_up_to_degree(nvars: int, bound: int):
    yield Monomial(())
    for deg in range(1, bound + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), deg):
            exps: dict[int, int] = {}
            for i in combo:
                exps[i] = exps.get(i, 0) + 1
            yield Monomial.make(exps)


def _normal_atoms(L: LevelData, Q: Ideal, extra_normals=()):
    """Poisson-normal homogeneous elements of A/Q usable as denominator
    atoms: the generator variables plus any previously found normal
    elements handed down by the enumeration."""
    ctx_A = L.pres_A.ctx
    G_A = L.pres_R.grading.restrict(L.k - 1)
    modulo = None if Q.is_zero() else Q
    atoms = []
    for j in range(len(ctx_A)):
        atoms.append(Polynomial.variable(ctx_A, j))
    for e in extra_normals:
        atoms.append(Q.normal_form(re_context(e, ctx_A)))
    out = []
    seen = set()
    for a in atoms:
        if a.is_zero() or a in seen or Q.member(a)[0]:
            continue
        seen.add(a)
        if weight_of(G_A, a) is None:
            continue
        try:
            if is_poisson_normal(L.pres_A.table, a, modulo=modulo).ok:
                out.append(a)
        except PreconditionError:
            continue
    return out


def _denominator_candidates(ctx, atoms, degree_bound: int):
    """Bounded-degree products of the atoms; the constant 1 comes first."""
    out = [Polynomial.constant(ctx, 1)]
    seen = set(out)
    for count in range(1, degree_bound + 1):
        batch = []
        for combo in itertools.combinations_with_replacement(range(len(atoms)), count):
            c = Polynomial.constant(ctx, 1)
            for i in combo:
                c = c * atoms[i]
            if c.total_degree() > degree_bound or c in seen:
                continue
            seen.add(c)
            batch.append(c)
        batch.sort(key=lambda p: (p.total_degree(), str(p)))
        out.extend(batch)
    return out


def _try_denominator(L: LevelData, Q: Ideal, c: Polynomial, degree_bound: int):
    """Solve the cross-multiplied defining property for b given the
    denominator c; returns a validated DElement or None."""
    ctx_A = L.pres_A.ctx
    G = L.pres_R.grading
    G_A = G.restrict(L.k - 1)
    w_x = G.weights[L.x_index]
    w_c = weight_of(G_A, c)
    w_b = tuple(a + b for a, b in zip(w_x, w_c))
    n_A = len(ctx_A)
    ansatz = [
        m
        for m in _monomials_up_to_degree(n_A, degree_bound + c.total_degree())
        if monomial_weight(G_A, m) == w_b
    ]
    table_A = L.pres_A.table
    # linear system rows: coefficient of every monomial in the reduced
    # residual, one block per generator of A
    columns = []
    rhs_parts = []
    for j in range(n_A):
        g = Polynomial.variable(ctx_A, j)
        cg = bracket(table_A, c, g)
        sg = L.sigma(g)
        lhs = [
            Q.normal_form(
                bracket(table_A, Polynomial.monomial(ctx_A, m), g) * c
                - Polynomial.monomial(ctx_A, m) * cg
                - sg * Polynomial.monomial(ctx_A, m) * c
            )
            for m in ansatz
        ]
        columns.append(lhs)
        rhs_parts.append(Q.normal_form(L.delta(g) * c * c))
    row_monos = sorted(
        {m for block in columns for p in block for m in p.terms}
        | {m for p in rhs_parts for m in p.terms},
        key=lambda m: m.exps,
    )
    A_rows = []
    b_vec = []
    for block, rhs in zip(columns, rhs_parts):
        for m in row_monos:
            A_rows.append([p.coefficient(m) for p in block])
            b_vec.append(rhs.coefficient(m))
    if ansatz:
        sol = linalg.solve_affine(A_rows, b_vec, ncols=len(ansatz))
    else:
        sol = [] if all(x == 0 for x in b_vec) else None
    if sol is None:
        return None
    b = Polynomial.zero(ctx_A)
    for coeff, m in zip(sol, ansatz):
        if coeff:
            b = b + Polynomial.monomial(ctx_A, m, coeff)
    b = Q.normal_form(b)
    d = _normalize_fraction(b, c)
    if validate_d_element(L, d, Q):
        return d
    return None


def d_element_search(
    L: LevelData,
    modulo: Ideal | None = None,
    degree_bound: int = 4,
    extra_normals=(),
) -> DElement | None:
    """Bounded ansatz search for the d-element over A/modulo.

    For each candidate denominator c (a bounded product of Poisson-normal
    atoms: the generator variables, plus any previously found normal
    elements) the defining property {b/c, g} = sigma(g) b/c + delta(g)
    becomes, after cross-multiplying, a linear system for the coefficients
    of b over the weight-matched monomials.  A returned d always passes
    `validate_d_element` and is the unique d by the eigencondition; None
    means the search was inconclusive within the bound, never that no d
    exists.
    """
    ctx_A = L.pres_A.ctx
    Q = modulo if modulo is not None else Ideal.zero(ctx_A)
    var_atoms = _normal_atoms(L, Q)
    tried = set()
    for c in _denominator_candidates(ctx_A, var_atoms, degree_bound):
        tried.add(c)
        d = _try_denominator(L, Q, c, degree_bound)
        if d is not None:
            return d
    if extra_normals:
        atoms = _normal_atoms(L, Q, extra_normals)
        for c in _denominator_candidates(ctx_A, atoms, degree_bound):
            if c in tried:
                continue
            d = _try_denominator(L, Q, c, degree_bound)
            if d is not None:
                return d
    return None


def second_lift(L: LevelData, P0: Ideal, d: DElement) -> Ideal:
    """The second Poisson H-prime over P0: the contraction of (X - d),
    computed as the saturation ((c x_k - b) + P0 R : c^infinity)."""
    ctx_R = L.pres_R.ctx
    X = L.x()
    c_R = re_context(d.denominator, ctx_R)
    b_R = re_context(d.numerator, ctx_R)
    gens = [c_R * X - b_R] + [re_context(g, ctx_R) for g in P0.generators]
    I = Ideal(ctx_R, gens)
    if not d.denominator.is_constant():
        I = saturate(I, c_R)
    if not I.is_proper():
        raise SecondLiftError("second lift is the unit ideal; invalid d")
    result = Ideal(ctx_R, I.groebner())
    G_k = L.pres_R.grading
    if not is_h_stable(G_k, result):
        raise SecondLiftError("second lift is not torus-stable")
    if not is_poisson_stable(L.pres_R.table, result):
        raise SecondLiftError("second lift is not Poisson-stable")
    if not ideal_equal(contract_to_prefix(result, L.k - 1), P0):
        raise SecondLiftError("second lift does not contract to the base ideal")
    return result


# ---------------------------------------------------------------------------
# H-prime enumeration
# ---------------------------------------------------------------------------


@dataclass
class HPrimeNode:
    level: int
    ideal: Ideal
    parent: "HPrimeNode | None" = None
    branch: str = "root"
    d: DElement | None = None
    children: list = field(default_factory=list)
    flags: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    prime: dict = field(default_factory=dict)
    # normal elements discovered along this lineage, used as denominator
    # atoms for deeper d-searches
    normal_pool: tuple = ()

    def label(self) -> str:
        gens = self.ideal.generator_strings()
        return "<" + ", ".join(gens) + ">" if gens else "0"


@dataclass
class HPrimeTree:
    root: HPrimeNode
    levels: list[list[HPrimeNode]]
    degree_bound: int

    def nodes_at(self, k: int) -> list[HPrimeNode]:
        return self.levels[k]

    def leaves(self) -> list[HPrimeNode]:
        return self.levels[-1]

    @property
    def inconclusive(self) -> bool:
        return any(node.flags for level in self.levels for node in level)

    def to_json_dict(self):
        nodes = []
        index = {}
        for level in self.levels:
            for node in level:
                index[id(node)] = len(nodes)
                nodes.append(node)
        return {
            "degree_bound": self.degree_bound,
            "count": len(self.leaves()),
            "inconclusive": self.inconclusive,
            "nodes": [
                {
                    "id": index[id(n)],
                    "level": n.level,
                    "parent": index[id(n.parent)] if n.parent is not None else None,
                    "branch": n.branch,
                    "generators": n.ideal.generator_strings(),
                    "d": str(n.d) if n.d is not None else None,
                    "flags": n.flags,
                    "notes": n.notes,
                    "prime": n.prime,
                }
                for n in nodes
            ],
        }

    def to_dot(self) -> str:
        """Hasse diagram of the top-level poset, ordered by inclusion."""
        leaves = self.leaves()
        names = [f"n{i}" for i in range(len(leaves))]
        below = [
            [
                i != j
                and all(leaves[j].ideal.member(g)[0] for g in leaves[i].ideal.generators)
                for j in range(len(leaves))
            ]
            for i in range(len(leaves))
        ]
        lines = ["digraph hprimes {", "  rankdir=BT;"]
        for i, leaf in enumerate(leaves):
            lines.append(f'  {names[i]} [label="{leaf.label()}"];')
        for i in range(len(leaves)):
            for j in range(len(leaves)):
                if not below[i][j]:
                    continue
                if any(below[i][k] and below[k][j] for k in range(len(leaves))):
                    continue
                lines.append(f"  {names[i]} -> {names[j]};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def enumerate_hprimes(P: PoissonPresentation, degree_bound: int = 4) -> HPrimeTree:
    """Level-by-level enumeration of the torus-stable Poisson primes.

    Starting from the zero ideal of the base field, every delta-stable node
    always lifts to the induced ideal, and additionally to the second lift
    when the d-element search succeeds; nodes that are not delta-stable have
    no lifts.  Every emitted ideal is machine-checked to be torus-stable and
    Poisson-stable; primality is asserted from the theory and verified where
    cheap.  An inconclusive d-search annotates the node instead of halting,
    so the output can under- but never over-count.
    """
    report = verify_cgl(P)
    if not report.ok:
        raise PreconditionError("presentation fails the tower axioms", report)
    root = HPrimeNode(level=0, ideal=Ideal.zero(P.ctx.restrict(0)))
    root.prime = primality(root.ideal)
    levels = [[root]]
    for k in range(1, P.nvars + 1):
        L = level_data(P, k)
        ctx_k = L.pres_R.ctx
        G_k = L.pres_R.grading
        next_level = []
        for node in levels[k - 1]:
            Q = node.ideal
            stable = all(Q.member(L.delta(g))[0] for g in Q.groebner())
            if not stable:
                node.notes.append(f"not delta-stable at level {k}; no lifts")
                continue
            induced = Ideal(ctx_k, [re_context(g, ctx_k) for g in Q.groebner()])
            induced = Ideal(ctx_k, induced.groebner())
            if not is_h_stable(G_k, induced) or not is_poisson_stable(
                L.pres_R.table, induced
            ):
                raise PcglError("induced lift failed stability checks")
            pool_up = tuple(re_context(p, ctx_k) for p in node.normal_pool)
            child = HPrimeNode(level=k, ideal=induced, parent=node, branch="induced")
            child.prime = primality(induced)
            node.children.append(child)
            next_level.append(child)
            d = d_element_search(
                L, modulo=Q, degree_bound=degree_bound, extra_normals=node.normal_pool
            )
            if d is None:
                node.flags.append(
                    f"d-search inconclusive at level {k}; possibly missing branch"
                )
                child.normal_pool = pool_up
                continue
            lifted = second_lift(L, Q, d)
            x_normal = re_context(d.denominator, ctx_k) * Polynomial.variable(
                ctx_k, k - 1
            ) - re_context(d.numerator, ctx_k)
            pool_up = pool_up + (x_normal,)
            child.normal_pool = pool_up
            child2 = HPrimeNode(
                level=k,
                ideal=lifted,
                parent=node,
                branch="d-branch",
                d=d,
                normal_pool=pool_up,
            )
            child2.prime = primality(lifted)
            node.children.append(child2)
            next_level.append(child2)
        levels.append(next_level)
    return HPrimeTree(root=root, levels=levels, degree_bound=degree_bound)


# ---------------------------------------------------------------------------
# Deletion steps
# ---------------------------------------------------------------------------


@dataclass
class CauchonStep:
    """One deletion step: R_k = A[x_k; sigma, delta]_p rewritten as the
    twist-only extension A[y_k; sigma]_p, together with the embedding of A
    given by the Cauchon map."""

    level: int
    source: PoissonPresentation
    target: PoissonPresentation
    theta_images: dict[int, Polynomial]


def cauchon_step(P: PoissonPresentation, k: int, samples: int = 25) -> CauchonStep:
    """Delete delta at level k of the restricted tower R_k.

    The target bracket satisfies {y_k, a} = sigma(a) y_k by construction and
    is re-checked (Jacobi, graded); the recorded theta images are validated
    through the homomorphism identities on random samples.
    """
    L = level_data(P, k)
    source = L.pres_R
    entries = {key: p for key, p in source.table.pairs()}
    i = k - 1
    for j in range(i):
        img = L.sigma.images[j]
        new = re_context(img, source.ctx) * Polynomial.variable(source.ctx, i)
        if new.is_zero():
            entries.pop((i, j), None)
        else:
            entries[(i, j)] = new
    target = PoissonPresentation(
        ctx=source.ctx,
        table=BracketTable(source.ctx, entries),
        grading=source.grading,
        h=source.h,
        nilpotency_bound=source.nilpotency_bound,
    )
    from .pbracket import check_jacobi
    from .grading import check_graded_bracket

    if not check_jacobi(target.table).ok:
        raise PcglError("deletion target fails the Jacobi identity")
    if not check_graded_bracket(target.grading, target.table):
        raise PcglError("deletion target fails the graded-bracket check")
    report = check_theta(L, samples=samples, seed=k)
    if not report.ok:
        raise PcglError("Cauchon map identities failed on the sampled pairs")
    images = {
        j: theta(L, Polynomial.variable(L.pres_A.ctx, j)) for j in range(i)
    }
    return CauchonStep(level=k, source=source, target=target, theta_images=images)


def delete_all(P: PoissonPresentation) -> PoissonPresentation:
    """The fully deleted presentation: same generators, grading and Lie
    data, with every bracket reduced to its quadratic part
    {x_i, x_j} = <h_i, deg x_j> x_i x_j (all deltas vanish)."""
    report = verify_cgl(P)
    if not report.ok:
        raise PreconditionError("presentation fails the tower axioms", report)
    hs = tuple(report.level(k).h for k in range(1, P.nvars + 1))
    entries = {}
    for i in range(P.nvars):
        for j in range(i):
            lam = pair(hs[i], P.grading.weights[j])
            if lam:
                entries[(i, j)] = Polynomial.monomial(
                    P.ctx, Monomial.make({i: 1, j: 1}), lam
                )
    return PoissonPresentation(
        ctx=P.ctx,
        table=BracketTable(P.ctx, entries),
        grading=P.grading,
        h=hs,
        nilpotency_bound=P.nilpotency_bound,
    )


# ---------------------------------------------------------------------------
# Separating normal elements
# ---------------------------------------------------------------------------


@dataclass
class SeparationResult:
    element: Polynomial
    case: str
    normality: object

    def __str__(self):
        return str(self.element)


def _coefficient_ideal(T: Ideal, x_index: int, ctx_A: VarTable) -> Ideal:
    """J = {a in A : a x + e in T for some e in A}, from an elimination-order
    basis: degree <= 1 elements contribute their leading x-coefficients."""
    gb = T.groebner(Elim(T.ctx, {x_index}))
    gens = []
    for g in gb:
        dx = g.degree_in(x_index)
        if dx == 0:
            gens.append(re_context(g, ctx_A))
        elif dx == 1:
            gens.append(re_context(g.split_by_degree_in(x_index)[1], ctx_A))
    return Ideal(ctx_A, gens)


def _normal_candidates(L: LevelData, W: Ideal, degree_bound: int, modulo: Ideal | None = None):
    """Homogeneous elements of the ideal W of A that are Poisson-normal
    (modulo the given ideal, when working over a quotient); heuristic:
    basis elements and their bounded pairwise products."""
    G_A = L.pres_R.grading.restrict(L.k - 1)
    gb = [g for g in W.groebner() if not g.is_zero()]
    singles = [g for g in gb if weight_of(G_A, g) is not None]
    candidates = list(singles)
    for a, b in itertools.combinations_with_replacement(singles, 2):
        prod = a * b
        if prod.total_degree() <= degree_bound:
            candidates.append(prod)
    candidates.sort(key=lambda p: (p.total_degree(), str(p)))
    out = []
    for cand in candidates:
        if modulo is not None and modulo.member(cand)[0]:
            continue
        try:
            if is_poisson_normal(L.pres_A.table, cand, modulo=modulo).ok:
                out.append(cand)
        except PreconditionError:
            continue
    return out


def _delta_stable(P0: Ideal, delta) -> bool:
    return all(P0.member(delta(g))[0] for g in P0.groebner())


def _theta_clear_mod(L: LevelData, P0: Ideal, a: Polynomial) -> Polynomial | None:
    """theta(a) x_k^s computed over the quotient by P0: the delta-iterates
    are reduced modulo P0 at every step, and s is the last index with a
    nonzero reduced iterate.  Returns a polynomial of R representing the
    quotient-tower normal element, or None if the iterates do not vanish
    within the bound."""
    iterates = [P0.normal_form(a)]
    if iterates[0].is_zero():
        return None
    for _ in range(L.pres_R.nilpotency_bound):
        nxt = P0.normal_form(L.delta(iterates[-1]))
        iterates.append(nxt)
        if nxt.is_zero():
            break
    else:
        return None
    s = len(iterates) - 2
    ctx_R = L.pres_R.ctx
    result = Polynomial.zero(ctx_R)
    coeff = Fraction(1)
    factorial = 1
    for l in range(s + 1):
        if l:
            factorial *= l
            coeff *= Fraction(-1) / L.lambda_k
        xpow = Polynomial.monomial(ctx_R, Monomial.make({L.x_index: s - l}))
        result = result + re_context(iterates[l], ctx_R) * (coeff / factorial) * xpow
    return result


def _drop_variables(P: PoissonPresentation, gone: set[int]):
    """Quotient presentation by the Poisson-stable variable ideal <gone>."""
    keep = [i for i in range(P.nvars) if i not in gone]
    sub = VarTable(tuple(P.ctx.names[i] for i in keep))

    def down(f: Polynomial) -> Polynomial:
        kept_terms = {
            m: c for m, c in f.terms.items() if not (set(m.support()) & gone)
        }
        return re_context(Polynomial(f.ctx, kept_terms), sub)

    entries = {}
    for (i, j), p in P.table.pairs():
        if i in gone or j in gone:
            continue
        q = down(p)
        if not q.is_zero():
            entries[(keep.index(i), keep.index(j))] = q
    quotient = PoissonPresentation(
        ctx=sub,
        table=BracketTable(sub, entries),
        grading=GradingData(P.grading.rank, tuple(P.grading.weights[i] for i in keep)),
        h=tuple(P.h[i] for i in keep) if P.h is not None else None,
        nilpotency_bound=P.nilpotency_bound,
    )
    return quotient, down


def separating_normal(
    P: PoissonPresentation,
    P_ideal,
    Q_ideal,
    degree_bound: int = 4,
) -> SeparationResult | None:
    """A Poisson-normal eigenvector of R/P lying in Q/P, or None when the
    heuristic search is inconclusive (nonexistence is never claimed).

    Follows the top-level case analysis: when P contracts trivially to the
    base ring the element is either theta(a) x_N^s for a normal element a of
    the relevant coefficient ideal, or x_N itself in the delta = 0 case;
    variable-generated contractions are removed by passing to the quotient
    presentation first.
    """
    P_I = P_ideal.ideal if isinstance(P_ideal, HPrimeNode) else P_ideal
    Q_I = Q_ideal.ideal if isinstance(Q_ideal, HPrimeNode) else Q_ideal
    if not all(Q_I.member(g)[0] for g in P_I.generators):
        raise PreconditionError("ideals are not nested")
    if all(P_I.member(g)[0] for g in Q_I.generators):
        raise PreconditionError("ideals are equal")
    result = _separating_normal_inner(P, P_I, Q_I, degree_bound)
    if result is None:
        return None
    u, case = result
    cert = is_poisson_normal(
        P.table, u, modulo=P_I if not P_I.is_zero() else None
    )
    if not cert.ok:
        raise PcglError("separating element failed the normality check")
    if not Q_I.member(u)[0] or P_I.member(u)[0]:
        raise PcglError("separating element is not in Q \\ P")
    return SeparationResult(element=u, case=case, normality=cert)


def _separating_normal_inner(P, P_I, Q_I, degree_bound):
    N = P.nvars
    if N == 0:
        return None
    P0 = contract_to_prefix(P_I, N - 1)
    if not P0.is_zero():
        gb = P0.groebner()
        if all(len(g.terms) == 1 and next(iter(g.terms)).degree() == 1 for g in gb):
            gone = {next(iter(g.terms)).support()[0] for g in gb}
            quotient, down = _drop_variables(P, gone)
            P_down = Ideal(quotient.ctx, [down(g) for g in P_I.generators])
            Q_down = Ideal(quotient.ctx, [down(g) for g in Q_I.generators])
            result = _separating_normal_inner(quotient, P_down, Q_down, degree_bound)
            if result is None:
                return None
            u_down, case = result
            return re_context(u_down, P.ctx), case + " (in quotient)"
        return _separating_normal_mod(P, P_I, Q_I, P0, degree_bound)
    L = level_data(P, N)
    if not P_I.is_zero():
        # the separating element is a coefficient-ideal element a itself,
        # Poisson-normal modulo P and lying in Q
        J = _coefficient_ideal(P_I, N - 1, L.pres_A.ctx)
        W = intersect(J, contract_to_prefix(Q_I, N - 1))
        for cand in _normal_candidates(L, W, degree_bound):
            u = re_context(cand, P.ctx)
            if Q_I.member(u)[0] and not P_I.member(u)[0]:
                cert = is_poisson_normal(P.table, u, modulo=P_I)
                if cert.ok:
                    return u, "normal element of J cap Q"
        return None
    Q0 = contract_to_prefix(Q_I, N - 1)
    if not Q0.is_zero():
        for cand in _normal_candidates(L, Q0, degree_bound):
            try:
                res = normal_element(L, cand)
            except (PreconditionError, NotWithinBound):
                continue
            u = res.element
            if Q_I.member(u)[0]:
                return u, "theta(a) x^s from Q cap A"
        return None
    # P = 0 and Q contracts to zero: J from Q feeds the theta construction
    J = _coefficient_ideal(Q_I, N - 1, L.pres_A.ctx)
    for cand in _normal_candidates(L, J, degree_bound):
        try:
            s = s_max(L, cand)
        except (PreconditionError, NotWithinBound):
            continue
        if s > 0:
            try:
                res = normal_element(L, cand)
            except (PreconditionError, NotWithinBound):
                continue
            u = res.element
        else:
            if not L.delta.is_zero():
                continue
            u = L.x()
        if Q_I.member(u)[0]:
            return u, "theta(a) x^s from J" if s > 0 else "x_N (delta = 0)"
    return None


def _separating_normal_mod(P, P_I, Q_I, P0, degree_bound):
    """The P cap A != 0 cases with a non-variable contraction: run the same
    case analysis over the quotient by P0, realized as computations in A
    with every reduction taken modulo the (delta-stable, Poisson-stable)
    contraction rather than as a literal quotient presentation."""
    N = P.nvars
    L = level_data(P, N)
    if not _delta_stable(P0, L.delta):
        return None
    ctx_R = P.ctx
    P0_R = Ideal(ctx_R, [re_context(g, ctx_R) for g in P0.generators])
    p_bar_zero = ideal_equal(P_I, Ideal(ctx_R, P0_R.groebner()))
    if not p_bar_zero:
        # quotient analog of the J cap Q search: candidates normal mod P0
        J = _coefficient_ideal(P_I, N - 1, L.pres_A.ctx)
        W = intersect(J, contract_to_prefix(Q_I, N - 1))
        for cand in _normal_candidates(L, W, degree_bound, modulo=P0):
            u = re_context(cand, ctx_R)
            if Q_I.member(u)[0] and not P_I.member(u)[0]:
                cert = is_poisson_normal(P.table, u, modulo=P_I)
                if cert.ok:
                    return u, "normal element of J cap Q (mod contraction)"
        return None
    Q0 = contract_to_prefix(Q_I, N - 1)
    q_bar_nonzero = not ideal_equal(Q0, P0)
    if q_bar_nonzero:
        source = Q0
    else:
        source = _coefficient_ideal(Q_I, N - 1, L.pres_A.ctx)
    for cand in _normal_candidates(L, source, degree_bound, modulo=P0):
        u = _theta_clear_mod(L, P0, cand)
        if u is None or u.is_zero():
            continue
        if not q_bar_nonzero and u == re_context(P0.normal_form(cand), ctx_R):
            # s = 0 in the J-route: x_N itself separates when delta vanishes
            if all(P0.member(img)[0] for img in L.delta.images.values()):
                u = L.x()
            else:
                continue
        if Q_I.member(u)[0] and not P_I.member(u)[0]:
            cert = is_poisson_normal(P.table, u, modulo=P_I)
            if cert.ok:
                return u, "theta(a) x^s (mod contraction)"
    return None
