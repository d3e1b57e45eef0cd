"""Exact sparse multivariate Laurent polynomials over the rationals.

Coefficients are `fractions.Fraction` throughout; there is no floating
point anywhere in the package.  Polynomials are immutable after
construction and hashable, so two equal polynomials always have identical
term maps (canonical form).
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    ContextMismatch,
    MissingImage,
    NegativeExponent,
    ParseError,
    PcglError,
    UnknownVariable,
)

Rat = Fraction

_NAME_RE = re.compile(r"[A-Za-z_]\w*\Z")


@dataclass(frozen=True)
class VarTable:
    """Ordered variable names with per-variable Laurent flags."""

    names: tuple[str, ...]
    laurent: tuple[bool, ...] = ()

    def __post_init__(self):
        names = tuple(self.names)
        laurent = tuple(self.laurent) if self.laurent else (False,) * len(names)
        if len(laurent) != len(names):
            raise PcglError("laurent flag list does not match variable count")
        for name in names:
            if not _NAME_RE.match(name):
                raise PcglError(f"invalid variable name {name!r}")
        if len(set(names)) != len(names):
            raise PcglError("duplicate variable names")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "laurent", laurent)
        object.__setattr__(self, "_pos", {n: i for i, n in enumerate(names)})

    def __len__(self):
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._pos[name]
        except KeyError:
            raise PcglError(f"unknown variable {name!r}") from None

    def is_laurent(self, i: int) -> bool:
        return self.laurent[i]

    def with_laurent(self, i: int) -> "VarTable":
        flags = list(self.laurent)
        flags[i] = True
        return VarTable(self.names, tuple(flags))

    def restrict(self, k: int) -> "VarTable":
        return VarTable(self.names[:k], self.laurent[:k])

    def extend(self, extra: tuple[str, ...], laurent=None) -> "VarTable":
        flags = laurent if laurent is not None else (False,) * len(extra)
        return VarTable(self.names + tuple(extra), self.laurent + tuple(flags))


@dataclass(frozen=True)
class Monomial:
    """Sparse exponent vector; zero exponents are never stored."""

    exps: tuple[tuple[int, int], ...]

    @classmethod
    def make(cls, data) -> "Monomial":
        if isinstance(data, dict):
            pairs = data.items()
        else:
            pairs = data
        return cls(tuple(sorted((i, e) for i, e in pairs if e != 0)))

    def degree(self) -> int:
        return sum(e for _, e in self.exps)

    def exponent(self, i: int) -> int:
        for j, e in self.exps:
            if j == i:
                return e
        return 0

    def support(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.exps)

    def __mul__(self, other: "Monomial") -> "Monomial":
        d = dict(self.exps)
        for i, e in other.exps:
            d[i] = d.get(i, 0) + e
        return Monomial.make(d)

    def __pow__(self, k: int) -> "Monomial":
        return Monomial.make({i: e * k for i, e in self.exps})

    def divides(self, other: "Monomial") -> bool:
        od = dict(other.exps)
        return all(e <= od.get(i, 0) for i, e in self.exps)

    def divide(self, other: "Monomial") -> "Monomial":
        d = dict(self.exps)
        for i, e in other.exps:
            d[i] = d.get(i, 0) - e
        return Monomial.make(d)

    def lcm(self, other: "Monomial") -> "Monomial":
        d = dict(self.exps)
        for i, e in other.exps:
            d[i] = max(d.get(i, 0), e)
        return Monomial.make(d)

    def gcd(self, other: "Monomial") -> "Monomial":
        od = dict(other.exps)
        return Monomial.make({i: min(e, od.get(i, 0)) for i, e in self.exps})

    def is_coprime(self, other: "Monomial") -> bool:
        other_support = set(other.support())
        return not any(i in other_support for i, _ in self.exps)


MONO_ONE = Monomial(())


def grevlex_key(m: Monomial, nvars: int):
    """Sort key for graded reverse lexicographic order (larger key = larger)."""
    e = [0] * nvars
    for i, x in m.exps:
        e[i] = x
    return (sum(e), tuple(-e[i] for i in range(nvars - 1, -1, -1)))


class Polynomial:
    """Sparse polynomial with Fraction coefficients over a fixed VarTable."""

    __slots__ = ("ctx", "terms", "_hash")

    def __init__(self, ctx: VarTable, terms=None):
        object.__setattr__(self, "ctx", ctx)
        clean = {}
        if terms:
            for m, c in terms.items():
                c = Fraction(c)
                if c != 0:
                    clean[m] = c
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, ctx: VarTable) -> "Polynomial":
        return cls(ctx)

    @classmethod
    def constant(cls, ctx: VarTable, c) -> "Polynomial":
        return cls(ctx, {MONO_ONE: Fraction(c)})

    @classmethod
    def variable(cls, ctx: VarTable, i: int) -> "Polynomial":
        return cls(ctx, {Monomial.make({i: 1}): Fraction(1)})

    @classmethod
    def monomial(cls, ctx: VarTable, m: Monomial, c=1) -> "Polynomial":
        for i, e in m.exps:
            if e < 0 and not ctx.is_laurent(i):
                raise PcglError(
                    f"negative exponent on non-Laurent variable {ctx.names[i]!r}"
                )
        return cls(ctx, {m: Fraction(c)})

    # -- ring operations -------------------------------------------------

    def _check(self, other: "Polynomial"):
        if self.ctx != other.ctx:
            raise ContextMismatch("polynomials live over different variable tables")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.ctx, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m, 0) + c
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
        return Polynomial(self.ctx, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ctx, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.ctx, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return Polynomial(self.ctx)
            q = Fraction(other)
            return Polynomial(self.ctx, {m: c * q for m, c in self.terms.items()})
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        terms = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1 * m2
                s = terms.get(m, 0) + c1 * c2
                if s:
                    terms[m] = s
                else:
                    terms.pop(m, None)
        return Polynomial(self.ctx, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise PcglError("negative polynomial powers are not defined")
        result = Polynomial.constant(self.ctx, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.ctx, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.ctx, tuple(sorted(self.terms.items(), key=lambda t: t[0].exps))))
            object.__setattr__(self, "_hash", h)
        return h

    def __bool__(self):
        return bool(self.terms)

    # -- queries ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(m == MONO_ONE for m in self.terms)

    def constant_coefficient(self) -> Fraction:
        return self.terms.get(MONO_ONE, Fraction(0))

    def total_degree(self) -> int:
        """Max total degree over terms; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(m.degree() for m in self.terms)

    def degree_in(self, i: int) -> int:
        if not self.terms:
            return -1
        return max(m.exponent(i) for m in self.terms)

    def support(self) -> set[int]:
        s = set()
        for m in self.terms:
            s.update(m.support())
        return s

    def has_negative_exponent(self) -> bool:
        return any(e < 0 for m in self.terms for _, e in m.exps)

    def coefficient(self, m: Monomial) -> Fraction:
        return self.terms.get(m, Fraction(0))

    def partial(self, i: int) -> "Polynomial":
        """Partial derivative; valid on Laurent exponents as well."""
        terms = {}
        for m, c in self.terms.items():
            e = m.exponent(i)
            if e:
                d = dict(m.exps)
                d[i] = e - 1
                terms[Monomial.make(d)] = c * e
        return Polynomial(self.ctx, terms)

    def split_by_degree_in(self, i: int) -> dict[int, "Polynomial"]:
        """Group terms by their exponent in variable i (as polynomials with
        that variable divided out)."""
        parts: dict[int, dict] = {}
        for m, c in self.terms.items():
            e = m.exponent(i)
            d = dict(m.exps)
            d.pop(i, None)
            parts.setdefault(e, {})[Monomial.make(d)] = c
        return {e: Polynomial(self.ctx, t) for e, t in parts.items()}

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        n = len(self.ctx)
        return sorted(
            self.terms.items(), key=lambda t: grevlex_key(t[0], n), reverse=True
        )

    # -- printing ----------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for m, c in self.sorted_terms():
            body = _term_string(self.ctx, m, abs(c))
            if not pieces:
                pieces.append(("-" if c < 0 else "") + body)
            else:
                pieces.append((" - " if c < 0 else " + ") + body)
        return "".join(pieces)

    def __repr__(self):
        return f"Polynomial({self})"


def _term_string(ctx: VarTable, m: Monomial, c: Fraction) -> str:
    if m == MONO_ONE:
        return str(c)
    vars_part = "*".join(
        ctx.names[i] if e == 1 else f"{ctx.names[i]}^{e}" for i, e in m.exps
    )
    if c == 1:
        return vars_part
    return f"{c}*{vars_part}"


def re_context(f: Polynomial, ctx: VarTable) -> Polynomial:
    """Move a polynomial to another variable table, matching variables by name."""
    if f.ctx == ctx:
        return f
    mapping = {}
    for i in f.support():
        mapping[i] = ctx.index(f.ctx.names[i])
    terms = {}
    for m, c in f.terms.items():
        for i, e in m.exps:
            if e < 0 and not ctx.is_laurent(mapping[i]):
                raise PcglError(
                    f"negative exponent on non-Laurent variable "
                    f"{ctx.names[mapping[i]]!r}"
                )
        terms[Monomial.make({mapping[i]: e for i, e in m.exps})] = c
    return Polynomial(ctx, terms)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"(?P<ws>\s+)|(?P<int>\d+)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*^()/])")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, ctx: VarTable):
        self.tokens = _tokenize(text)
        self.ctx = ctx
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val, pos = self.peek()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", pos)
        return self.advance()

    def parse_sum(self) -> Polynomial:
        result = self.parse_product()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                rhs = self.parse_product()
                result = result + rhs if val == "+" else result - rhs
            else:
                return result

    def parse_product(self) -> Polynomial:
        result = self.parse_factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.advance()
                result = result * self.parse_factor()
            else:
                return result

    def parse_factor(self) -> Polynomial:
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.advance()
            f = self.parse_factor()
            return f if val == "+" else -f
        return self.parse_power()

    def parse_power(self) -> Polynomial:
        base, var_index = self.parse_atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.advance()
            exp, pos = self.parse_signed_int()
            if exp < 0:
                if var_index is None or not self.ctx.is_laurent(var_index):
                    raise NegativeExponent(
                        "negative exponent allowed only on Laurent variables", pos
                    )
                m = Monomial.make({var_index: exp})
                return Polynomial(self.ctx, {m: Fraction(1)})
            return base ** exp
        return base

    def parse_signed_int(self) -> tuple[int, int]:
        kind, val, pos = self.peek()
        sign = 1
        if kind == "op" and val in "+-":
            self.advance()
            sign = -1 if val == "-" else 1
            kind, val, pos = self.peek()
        if kind != "int":
            raise ParseError("expected integer exponent", pos)
        self.advance()
        return sign * int(val), pos

    def parse_atom(self) -> tuple[Polynomial, int | None]:
        kind, val, pos = self.advance()
        if kind == "int":
            num = int(val)
            k, v, _ = self.peek()
            if k == "op" and v == "/":
                self.advance()
                k2, v2, pos2 = self.peek()
                if k2 != "int":
                    raise ParseError("expected denominator digits", pos2)
                self.advance()
                if int(v2) == 0:
                    raise ParseError("zero denominator in rational literal", pos2)
                return Polynomial.constant(self.ctx, Fraction(num, int(v2))), None
            return Polynomial.constant(self.ctx, num), None
        if kind == "name":
            try:
                idx = self.ctx.index(val)
            except PcglError:
                raise UnknownVariable(f"unknown variable {val!r}", pos) from None
            return Polynomial.variable(self.ctx, idx), idx
        if kind == "op" and val == "(":
            inner = self.parse_sum()
            self.expect_op(")")
            return inner, None
        raise ParseError(f"unexpected token {val!r}" if val else "unexpected end of input", pos)


def parse(text: str, ctx: VarTable) -> Polynomial:
    """Parse an expression with rational literals, + - * ^ and parentheses.

    Division appears only inside rational literals `p/q`; negative exponents
    are accepted only on Laurent-flagged variables.
    """
    p = _Parser(text, ctx)
    result = p.parse_sum()
    kind, val, pos = p.peek()
    if kind != "end":
        raise ParseError(f"unexpected trailing token {val!r}", pos)
    return result


# ---------------------------------------------------------------------------
# Derivations
# ---------------------------------------------------------------------------


class Derivation:
    """A derivation given by generator images, extended by the Leibniz rule."""

    def __init__(self, ctx: VarTable, images: dict[int, Polynomial]):
        self.ctx = ctx
        self.images = dict(images)
        for i, img in self.images.items():
            if img.ctx != ctx:
                raise ContextMismatch("derivation image over wrong variable table")

    def domain(self) -> set[int]:
        return set(self.images)

    def __call__(self, f: Polynomial) -> Polynomial:
        return apply_derivation(self, f)

    def is_zero(self) -> bool:
        return all(img.is_zero() for img in self.images.values())


def apply_derivation(D: Derivation, f: Polynomial) -> Polynomial:
    """D(f) = sum_i D(x_i) * df/dx_i, computed exactly."""
    if f.ctx != D.ctx:
        raise ContextMismatch("polynomial over a different variable table")
    missing = f.support() - D.domain()
    if missing:
        names = ", ".join(D.ctx.names[i] for i in sorted(missing))
        raise MissingImage(f"no image for variable(s) {names}")
    result = Polynomial.zero(f.ctx)
    for i in sorted(f.support()):
        img = D.images[i]
        if img.is_zero():
            continue
        result = result + img * f.partial(i)
    return result


def iterate_derivation(D: Derivation, f: Polynomial, bound: int):
    """Iterate D on f and look for nilpotency.

    Returns (powers, index) where powers = [D^0(f), ..., D^m(f)] and index m
    is minimal with D^m(f) = 0, provided m <= bound.  When the iterates do
    not vanish within the bound, the full sequence up to the bound is
    returned with index None.  A zero input reports index 1 with the
    single-entry sequence (0,) by convention.
    """
    if bound < 1:
        raise PcglError("iteration bound must be >= 1")
    if f.is_zero():
        return [f], 1
    powers = [f]
    for _ in range(bound):
        nxt = apply_derivation(D, powers[-1])
        powers.append(nxt)
        if nxt.is_zero():
            return powers, len(powers) - 1
    return powers, None


# ---------------------------------------------------------------------------
# Random sampling (for the identity-check style tests)
# ---------------------------------------------------------------------------


def random_polynomial(
    rng: random.Random,
    ctx: VarTable,
    max_degree: int = 3,
    max_terms: int = 4,
    coeff_bound: int = 5,
) -> Polynomial:
    terms = {}
    n = len(ctx)
    for _ in range(rng.randint(1, max_terms)):
        exps = {}
        if n:
            remaining = rng.randint(0, max_degree)
            while remaining > 0:
                i = rng.randrange(n)
                e = rng.randint(1, remaining)
                exps[i] = exps.get(i, 0) + e
                remaining -= e
        num = rng.randint(-coeff_bound, coeff_bound)
        den = rng.randint(1, 3)
        if num == 0:
            num = 1
        m = Monomial.make(exps)
        terms[m] = terms.get(m, Fraction(0)) + Fraction(num, den)
    return Polynomial(ctx, terms)
