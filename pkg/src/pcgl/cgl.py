"""Iterated Poisson-Ore tower presentations and their axioms.

A presentation lists generators x_1..x_N, a pairwise bracket table, a
torus grading and an optional Lie vector per level.  Triangularity
({x_k, x_j} lies in R_{k-1} + R_{k-1} x_k for j < k) is validated at
construction; the nilpotency, grading and realizability axioms are checked
by `verify_cgl` and reported rather than raised.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NonDiagonalSigma, PcglError, TriangularityError
from .grading import (
    GradingData,
    LieVector,
    graded_bracket_failures,
    lie_act,
    pair,
    solve_h,
)
from .pbracket import BracketTable, bracket, check_delta_condition, check_jacobi
from .qpoly import (
    Derivation,
    Polynomial,
    VarTable,
    iterate_derivation,
    re_context,
)

DEFAULT_NILPOTENCY_BOUND = 25


@dataclass(frozen=True)
class PoissonPresentation:
    """Generators, bracket table, grading and optional per-level Lie vectors."""

    ctx: VarTable
    table: BracketTable
    grading: GradingData
    h: tuple[LieVector, ...] | None = None
    nilpotency_bound: int = DEFAULT_NILPOTENCY_BOUND

    def __post_init__(self):
        n = len(self.ctx)
        if self.table.ctx != self.ctx:
            raise PcglError("bracket table over wrong variable table")
        if len(self.grading.weights) != n:
            raise PcglError("grading column count does not match generator count")
        if self.h is not None:
            h = tuple(tuple(Fraction(x) for x in v) for v in self.h)
            if len(h) != n:
                raise PcglError("expected one Lie vector per generator")
            for v in h:
                if len(v) != self.grading.rank:
                    raise PcglError("Lie vector length does not match grading rank")
            object.__setattr__(self, "h", h)
        for (i, j), p in self.table.pairs():
            if any(v > i for v in p.support()):
                raise TriangularityError(
                    f"bracket {{x_{i+1}, x_{j+1}}} involves a generator beyond x_{i+1}"
                )
            if p.degree_in(i) > 1:
                raise TriangularityError(
                    f"bracket {{x_{i+1}, x_{j+1}}} has degree >= 2 in x_{i+1}"
                )

    @property
    def nvars(self) -> int:
        return len(self.ctx)

    def variable(self, i: int) -> Polynomial:
        return Polynomial.variable(self.ctx, i)

    def bracket(self, f: Polynomial, g: Polynomial) -> Polynomial:
        return bracket(self.table, f, g)

    def restrict(self, k: int) -> "PoissonPresentation":
        """The truncated presentation on x_1..x_k."""
        if not 0 <= k <= self.nvars:
            raise PcglError(f"level {k} out of range")
        if k == self.nvars:
            return self
        return PoissonPresentation(
            ctx=self.ctx.restrict(k),
            table=self.table.restrict(k),
            grading=self.grading.restrict(k),
            h=self.h[:k] if self.h is not None else None,
            nilpotency_bound=self.nilpotency_bound,
        )


def split_bracket(P: PoissonPresentation, k: int):
    """Write {x_k, x_j} = sigma(x_j) x_k + delta(x_j) for all j < k.

    Levels are 1-based.  Returns (sigma_images, delta_images) keyed by the
    0-based generator index; the decomposition is unique by triangularity.
    """
    if not 1 <= k <= P.nvars:
        raise PcglError(f"level {k} out of range")
    i = k - 1
    sub = P.ctx.restrict(i)
    sigma_images: dict[int, Polynomial] = {}
    delta_images: dict[int, Polynomial] = {}
    for j in range(i):
        p = P.table.entry(i, j)
        parts = p.split_by_degree_in(i)
        if any(e not in (0, 1) for e in parts):
            raise TriangularityError(
                f"bracket {{x_{k}, x_{j+1}}} has degree >= 2 in x_{k}"
            )
        sigma_images[j] = re_context(parts.get(1, Polynomial.zero(P.ctx)), sub)
        delta_images[j] = re_context(parts.get(0, Polynomial.zero(P.ctx)), sub)
    return sigma_images, delta_images


def sigma_eigenvalues(sigma_images: dict[int, Polynomial], sub: VarTable):
    """Diagonal eigenvalues mu_j with sigma(x_j) = mu_j x_j; raises otherwise."""
    mus = []
    for j in range(len(sub)):
        img = sigma_images[j]
        if img.is_zero():
            mus.append(Fraction(0))
            continue
        xj = Polynomial.variable(sub, j)
        if len(img.terms) == 1:
            m, c = next(iter(img.terms.items()))
            if Polynomial.monomial(sub, m) == xj:
                mus.append(c)
                continue
        raise NonDiagonalSigma(
            f"sigma(x_{j+1}) = {img} is not a scalar multiple of x_{j+1}"
        )
    return mus


@dataclass
class LevelData:
    """The Ore data of one tower level: R_k = A[x_k; sigma, delta]_p."""

    k: int
    pres_R: PoissonPresentation
    pres_A: PoissonPresentation
    sigma: Derivation
    delta: Derivation
    sigma_eigs: tuple[Fraction, ...]
    h_k: LieVector
    lambda_k: Fraction
    hat_ctx: VarTable
    hat_table: BracketTable

    @property
    def x_index(self) -> int:
        return self.k - 1

    def x(self) -> Polynomial:
        return Polynomial.variable(self.pres_R.ctx, self.x_index)


def level_data(P: PoissonPresentation, k: int) -> LevelData:
    """Assemble the level-k Ore data, solving for h_k when not supplied."""
    pres_R = P.restrict(k)
    pres_A = P.restrict(k - 1)
    sigma_images, delta_images = split_bracket(P, k)
    mus = sigma_eigenvalues(sigma_images, pres_A.ctx)
    if P.h is not None:
        h_k = P.h[k - 1]
        for j in range(k - 1):
            if pair(h_k, P.grading.weights[j]) != mus[j]:
                raise PcglError(
                    f"supplied h_{k} does not realize sigma_{k} on x_{j+1}"
                )
    else:
        h_k = solve_h(P.grading, k, mus)
        if h_k is None:
            raise PcglError(f"no valid Lie vector h_{k} exists")
    lam = pair(h_k, P.grading.weights[k - 1])
    if lam == 0:
        raise PcglError(f"h_{k}-eigenvalue of x_{k} is zero")
    hat_ctx = pres_R.ctx.with_laurent(k - 1)
    return LevelData(
        k=k,
        pres_R=pres_R,
        pres_A=pres_A,
        sigma=Derivation(pres_A.ctx, sigma_images),
        delta=Derivation(pres_A.ctx, delta_images),
        sigma_eigs=tuple(mus),
        h_k=h_k,
        lambda_k=lam,
        hat_ctx=hat_ctx,
        hat_table=pres_R.table.re_context(hat_ctx),
    )


@dataclass
class LevelReport:
    level: int
    eigenvector_ok: bool = True
    sigma_diagonal_ok: bool = True
    nilpotency: dict[int, int | None] = field(default_factory=dict)
    nilpotency_ok: bool = True
    likely_not_nilpotent: list[int] = field(default_factory=list)
    h: LieVector | None = None
    lambda_k: Fraction | None = None
    h_ok: bool = True
    jacobi_ok: bool = True
    graded_ok: bool = True
    delta_condition_ok: bool = True
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (
            self.eigenvector_ok
            and self.sigma_diagonal_ok
            and self.nilpotency_ok
            and self.h_ok
            and self.jacobi_ok
            and self.graded_ok
            and self.delta_condition_ok
        )

    def to_json_dict(self):
        return {
            "level": self.level,
            "ok": self.ok,
            "eigenvector": self.eigenvector_ok,
            "sigma_diagonal": self.sigma_diagonal_ok,
            "delta_nilpotent": self.nilpotency_ok,
            "nilpotency_indices": {
                str(j + 1): idx for j, idx in sorted(self.nilpotency.items())
            },
            "likely_not_nilpotent": [j + 1 for j in self.likely_not_nilpotent],
            "h_exists": self.h_ok,
            "h": [str(x) for x in self.h] if self.h is not None else None,
            "lambda": str(self.lambda_k) if self.lambda_k is not None else None,
            "jacobi": self.jacobi_ok,
            "graded_bracket": self.graded_ok,
            "delta_condition": self.delta_condition_ok,
            "notes": self.notes,
        }


@dataclass
class CGLReport:
    levels: list[LevelReport]

    @property
    def ok(self) -> bool:
        return all(l.ok for l in self.levels)

    def level(self, k: int) -> LevelReport:
        return self.levels[k - 1]

    def to_json_dict(self):
        return {"ok": self.ok, "levels": [l.to_json_dict() for l in self.levels]}


def _degree_growth(powers) -> bool:
    """Three consecutive strict total-degree increases across the iterates."""
    degs = [p.total_degree() for p in powers]
    run = 0
    for a, b in zip(degs, degs[1:]):
        run = run + 1 if b > a else 0
        if run >= 3:
            return True
    return False


def verify_cgl(P: PoissonPresentation) -> CGLReport:
    """Check the tower axioms level by level and report witnesses.

    Per level k: generators are homogeneous by encoding (reported); delta_k
    is locally nilpotent on each earlier generator within the presentation
    bound; some h_k realizes sigma_k with a nonzero eigenvalue on x_k.  The
    Jacobi identity, the graded-bracket condition and the twisted Leibniz
    compatibility of (sigma_k, delta_k) are re-validated per level.
    """
    reports = []
    graded_bad = set(graded_bracket_failures(P.grading, P.table))
    for k in range(1, P.nvars + 1):
        rep = LevelReport(level=k)
        i = k - 1
        rep.jacobi_ok = check_jacobi(P.table, max_index=i).ok
        rep.graded_ok = not any(p[0] == i for p in graded_bad)
        sub = P.ctx.restrict(i)
        try:
            sigma_images, delta_images = split_bracket(P, k)
        except TriangularityError as exc:
            rep.notes.append(str(exc))
            rep.sigma_diagonal_ok = False
            reports.append(rep)
            continue
        try:
            mus = sigma_eigenvalues(sigma_images, sub)
        except NonDiagonalSigma as exc:
            rep.notes.append(str(exc))
            rep.sigma_diagonal_ok = False
            rep.h_ok = False
            reports.append(rep)
            continue
        delta = Derivation(sub, delta_images)
        sigma = Derivation(sub, sigma_images)
        for j in range(i):
            xj = Polynomial.variable(sub, j)
            powers, idx = iterate_derivation(delta, xj, P.nilpotency_bound)
            rep.nilpotency[j] = idx
            if idx is None:
                rep.nilpotency_ok = False
                if _degree_growth(powers):
                    rep.likely_not_nilpotent.append(j)
                    rep.notes.append(
                        f"delta_{k} iterates on x_{j+1} grow in degree; "
                        "likely not nilpotent"
                    )
        if P.h is not None:
            h_k = P.h[i]
            if any(pair(h_k, P.grading.weights[j]) != mus[j] for j in range(i)):
                rep.h_ok = False
                rep.notes.append(f"supplied h_{k} does not realize sigma_{k}")
            lam = pair(h_k, P.grading.weights[i])
            rep.h = h_k
            rep.lambda_k = lam
            if lam == 0:
                rep.h_ok = False
                rep.notes.append(f"supplied h_{k} has zero eigenvalue on x_{k}")
        else:
            h_k = solve_h(P.grading, k, mus)
            if h_k is None:
                rep.h_ok = False
                rep.notes.append(
                    f"no h_{k} with the required eigenvalues exists"
                )
            else:
                rep.h = h_k
                rep.lambda_k = pair(h_k, P.grading.weights[i])
                # consistency: the solved h really acts as sigma on generators
                for j in range(i):
                    xj = Polynomial.variable(sub, j)
                    if lie_act(P.grading.restrict(i), h_k, xj) != sigma(xj):
                        rep.h_ok = False
                        rep.notes.append(f"h_{k} action mismatch on x_{j+1}")
        if i > 0:
            rep.delta_condition_ok = check_delta_condition(
                P.table.restrict(i), sigma, delta
            )
        reports.append(rep)
    return CGLReport(levels=reports)
