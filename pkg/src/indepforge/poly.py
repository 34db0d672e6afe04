"""Sparse multivariate polynomials, monomial orders and a Buchberger engine.

Only what zero-dimensional quotient construction needs: division with
remainder, reduced Groebner bases, and staircase enumeration.  Monomials are
exponent tuples; a :class:`Poly` maps monomials to nonzero field scalars.
"""

from __future__ import annotations

import heapq
import itertools
import re
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import NotZeroDimensional, ParseError, ValidationError
from .field import Field

Monomial = tuple  # exponent vector


def degree(m: Monomial) -> int:
    return sum(m)


def divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_div(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


# -- monomial orders ------------------------------------------------------

def _degrevlex(m):
    return (sum(m), tuple(-e for e in reversed(m)))


def _deglex(m):
    return (sum(m), m)


def _lex(m):
    return m


ORDERS: dict[str, Callable] = {"degrevlex": _degrevlex, "deglex": _deglex, "lex": _lex}


class MonomialOrder:
    """Named monomial order; ``key(m)`` grows with the monomial."""

    def __init__(self, name: str = "degrevlex"):
        if name not in ORDERS:
            raise ValueError(f"unknown monomial order {name!r}")
        self.name = name
        self.key = ORDERS[name]

    def __repr__(self):
        return f"MonomialOrder({self.name!r})"

    def __eq__(self, other):
        return isinstance(other, MonomialOrder) and other.name == self.name

    def __hash__(self):
        return hash(self.name)

    def sort_basis(self, monos):
        """Degree ascending; within a degree, larger monomials first (x before y)."""
        return sorted(sorted(monos, key=self.key, reverse=True), key=sum)


# -- polynomials ----------------------------------------------------------

class Poly:
    __slots__ = ("F", "nvars", "terms")

    def __init__(self, F: Field, nvars: int, terms: dict | None = None):
        self.F = F
        self.nvars = nvars
        self.terms = {}
        if terms:
            for m, c in terms.items():
                if len(m) != nvars:
                    raise ValueError("monomial length does not match variable count")
                c = F(c)
                if c:
                    self.terms[tuple(m)] = c

    @classmethod
    def constant(cls, F, nvars, c):
        return cls(F, nvars, {(0,) * nvars: c})

    @classmethod
    def monomial(cls, F, nvars, m, c=1):
        return cls(F, nvars, {tuple(m): c})

    @classmethod
    def variable(cls, F, nvars, i):
        m = [0] * nvars
        m[i] = 1
        return cls(F, nvars, {tuple(m): 1})

    def _check(self, other: "Poly"):
        if self.nvars != other.nvars:
            raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")

    def is_zero(self) -> bool:
        return not self.terms

    def copy(self) -> "Poly":
        p = Poly(self.F, self.nvars)
        p.terms = dict(self.terms)
        return p

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        out = dict(self.terms)
        F = self.F
        for m, c in other.terms.items():
            v = F.add(out.get(m, 0), c)
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        p = Poly(F, self.nvars)
        p.terms = out
        return p

    def __neg__(self) -> "Poly":
        p = Poly(self.F, self.nvars)
        p.terms = {m: self.F.neg(c) for m, c in self.terms.items()}
        return p

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def scale(self, c) -> "Poly":
        c = self.F(c)
        p = Poly(self.F, self.nvars)
        if c:
            p.terms = {m: self.F.mul(v, c) for m, v in self.terms.items()}
        return p

    def mul_term(self, mono: Monomial, c) -> "Poly":
        p = Poly(self.F, self.nvars)
        if c:
            p.terms = {mono_mul(m, mono): self.F.mul(v, c) for m, v in self.terms.items()}
        return p

    def __mul__(self, other: "Poly") -> "Poly":
        self._check(other)
        acc = Poly(self.F, self.nvars)
        for m, c in other.terms.items():
            acc = acc + self.mul_term(m, c)
        return acc

    def __pow__(self, e: int) -> "Poly":
        out = Poly.constant(self.F, self.nvars, 1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def leading_monomial(self, order: MonomialOrder) -> Monomial:
        return max(self.terms, key=order.key)

    def leading_term(self, order: MonomialOrder):
        m = self.leading_monomial(order)
        return m, self.terms[m]

    def monic(self, order: MonomialOrder) -> "Poly":
        _, c = self.leading_term(order)
        return self.scale(self.F.inv(c))

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, 0)

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def sorted_terms(self, order: MonomialOrder):
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def format(self, names: Sequence[str], order: MonomialOrder | None = None) -> str:
        order = order or MonomialOrder()
        return format_terms(self.F, self.sorted_terms(order), names)

    def __repr__(self):
        names = [f"x{i}" for i in range(self.nvars)]
        return f"Poly({self.format(names)!r})"


def format_monomial(m: Monomial, names: Sequence[str]) -> str:
    parts = []
    for e, name in zip(m, names):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def format_terms(F: Field, terms, names: Sequence[str]) -> str:
    if not terms:
        return "0"
    out = []
    for m, c in terms:
        s = F.to_str(c)
        neg = s.startswith("-")
        if neg:
            s = s[1:]
        body = format_monomial(m, names)
        if body:
            text = body if s == "1" else f"{s}*{body}"
        else:
            text = s
        if not out:
            out.append(("-" if neg else "") + text)
        else:
            out.append(("- " if neg else "+ ") + text)
    return " ".join(out)


# -- parsing ----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*^()]))")


def _tokenize(text: str):
    pos = 0
    toks = []
    text_len = len(text)
    while pos < text_len:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[bad]!r}", text, bad)
        start = m.start(m.lastindex)
        kind = ("num", "name", "op")[m.lastindex - 1]
        val = m.group(m.lastindex)
        if val == "**":
            val = "^"
        toks.append((kind, val, start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, F: Field, names: Sequence[str], text: str):
        self.F = F
        self.names = list(names)
        self.index = {n: i for i, n in enumerate(names)}
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok):
        raise ParseError(msg, self.text, tok[2])

    def parse(self) -> Poly:
        if self.peek()[0] == "end":
            self.error("empty polynomial", self.peek())
        p = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected token {self.peek()[1]!r}", self.peek())
        return p

    def expr(self) -> Poly:
        sign = 1
        if self.peek()[1] in "+-" and self.peek()[0] == "op":
            sign = -1 if self.take()[1] == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while self.peek()[0] == "op" and self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self) -> Poly:
        acc = self.power()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            acc = acc * self.power()
        return acc

    def power(self) -> Poly:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "num" or "/" in tok[1]:
                self.error("exponent must be a non-negative integer", tok)
            base = base ** int(tok[1])
        return base

    def atom(self) -> Poly:
        tok = self.take()
        n = len(self.names)
        if tok[0] == "num":
            try:
                return Poly.constant(self.F, n, self.F(Fraction(tok[1])))
            except ZeroDivisionError:
                self.error(f"coefficient {tok[1]} is undefined in {self.F}", tok)
        if tok[0] == "name":
            if tok[1] not in self.index:
                self.error(f"unknown variable {tok[1]!r} (ring variables: {', '.join(self.names) or 'none'})", tok)
            return Poly.variable(self.F, n, self.index[tok[1]])
        if tok[1] == "(":
            p = self.expr()
            close = self.take()
            if close[1] != ")":
                self.error("expected ')'", close)
            return p
        if tok[1] == "-":
            return -self.power()
        self.error(f"unexpected token {tok[1]!r}" if tok[1] else "unexpected end of input", tok)


def parse_poly(text: str, F: Field, names: Sequence[str]) -> Poly:
    """Parse ``3*x^2*y - y^3 + 1`` style text over the variables ``names``."""
    if not isinstance(text, str):
        if isinstance(text, (int, Fraction)):
            return Poly.constant(F, len(names), F(text))
        raise ParseError(f"polynomial must be a string, got {type(text).__name__}")
    return _Parser(F, names, text).parse()


# -- division and Groebner bases -------------------------------------------

def normal_form(f: Poly, G: Sequence[Poly], order: MonomialOrder) -> Poly:
    """Remainder of ``f`` on division by ``G``; unique when ``G`` is a Groebner basis."""
    for g in G:
        f._check(g)
    F = f.F
    leads = [(g.leading_term(order), g) for g in G if not g.is_zero()]
    p = f.copy()
    rem = Poly(F, f.nvars)
    while p.terms:
        m, c = p.leading_term(order)
        for (lm, lc), g in leads:
            if divides(lm, m):
                p = p - g.mul_term(mono_div(m, lm), F.mul(c, F.inv(lc)))
                break
        else:
            rem.terms[m] = c
            del p.terms[m]
    return rem


def s_polynomial(f: Poly, g: Poly, order: MonomialOrder) -> Poly:
    F = f.F
    (mf, cf), (mg, cg) = f.leading_term(order), g.leading_term(order)
    l = mono_lcm(mf, mg)
    return f.mul_term(mono_div(l, mf), F.inv(cf)) - g.mul_term(mono_div(l, mg), F.inv(cg))


def _is_monomial(p: Poly) -> bool:
    return len(p.terms) == 1


def buchberger(gens: Sequence[Poly], order: MonomialOrder | None = None) -> list[Poly]:
    """Reduced Groebner basis of the ideal generated by ``gens``.

    Uses the product (coprime leading monomials) and chain criteria.  The
    result is sorted by leading monomial, smallest first.
    """
    order = order or MonomialOrder()
    G: list[Poly] = []
    for g in gens:
        if not g.is_zero():
            G.append(g.monic(order))
    if not G:
        return []
    nv = G[0].nvars
    for g in G:
        if g.nvars != nv:
            raise ValueError("variable count mismatch among generators")
    G = _autoreduce(G, order)
    lms = [g.leading_monomial(order) for g in G]
    pairs: set = set()
    heap: list = []

    def push(i, j):
        pairs.add((i, j))
        heapq.heappush(heap, (order.key(mono_lcm(lms[i], lms[j])), i, j))

    for i in range(len(G)):
        for j in range(i):
            push(i, j)
    while heap:
        _, i, j = heapq.heappop(heap)
        pairs.discard((i, j))
        fi, fj = G[i], G[j]
        li, lj = lms[i], lms[j]
        l = mono_lcm(li, lj)
        if mono_mul(li, lj) == l:
            continue
        if _is_monomial(fi) and _is_monomial(fj):
            continue
        if _chain_skip(lms, pairs, i, j, l):
            continue
        r = normal_form(s_polynomial(fi, fj, order), G, order)
        if r.is_zero():
            continue
        G.append(r.monic(order))
        lms.append(G[-1].leading_monomial(order))
        k = len(G) - 1
        for a in range(k):
            push(k, a)
    return _interreduce(G, order)


def _chain_skip(lms, pairs, i, j, l) -> bool:
    for k in range(len(lms)):
        if k in (i, j):
            continue
        if divides(lms[k], l):
            if (max(i, k), min(i, k)) not in pairs and (max(j, k), min(j, k)) not in pairs:
                return True
    return False


def _autoreduce(G: list[Poly], order: MonomialOrder) -> list[Poly]:
    """Reduce each generator by the others until no leading monomial divides another.

    Unlike :func:`_interreduce` this keeps the ideal unchanged for arbitrary input.
    """
    G = list(G)
    changed = True
    while changed:
        changed = False
        G.sort(key=lambda g: order.key(g.leading_monomial(order)))
        for idx in range(len(G)):
            g = G[idx]
            others = G[:idx] + G[idx + 1:]
            lm = g.leading_monomial(order)
            if any(divides(h.leading_monomial(order), lm) for h in others):
                r = normal_form(g, others, order)
                G = others if r.is_zero() else others + [r.monic(order)]
                changed = True
                break
    return G


def _interreduce(G: list[Poly], order: MonomialOrder) -> list[Poly]:
    # only valid on a Groebner basis: drop elements whose leading monomial is divisible by another's
    G = sorted(G, key=lambda g: order.key(g.leading_monomial(order)))
    minimal: list[Poly] = []
    for g in G:
        lm = g.leading_monomial(order)
        if not any(divides(h.leading_monomial(order), lm) for h in minimal):
            minimal.append(g)
    out = []
    for idx, g in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1 :]
        lm, lc = g.leading_term(order)
        tail = g.copy()
        del tail.terms[lm]
        r = normal_form(tail, others, order)
        r.terms[lm] = lc
        out.append(r.monic(order))
    return sorted(out, key=lambda g: order.key(g.leading_monomial(order)))


def is_groebner(G: Sequence[Poly], order: MonomialOrder) -> bool:
    """Every S-polynomial reduces to zero."""
    for a, b in itertools.combinations(G, 2):
        if not normal_form(s_polynomial(a, b, order), G, order).is_zero():
            return False
    return True


def quotient_monomial_basis(G: Sequence[Poly], order: MonomialOrder | None = None,
                            nvars: int | None = None) -> list[Monomial]:
    """Standard monomials of a zero-dimensional ideal, ordered by :meth:`MonomialOrder.sort_basis`."""
    order = order or MonomialOrder()
    if nvars is None:
        if not G:
            raise NotZeroDimensional("empty Groebner basis with unknown variable count")
        nvars = G[0].nvars
    leads = [g.leading_monomial(order) for g in G]
    if any(sum(l) == 0 for l in leads):
        return []
    bounds = []
    for v in range(nvars):
        pure = [l[v] for l in leads if all(e == 0 for k, e in enumerate(l) if k != v)]
        if not pure:
            raise NotZeroDimensional(f"variable {v} has no pure power among leading terms")
        bounds.append(min(pure))
    out = []
    for m in itertools.product(*[range(b) for b in bounds]):
        if not any(divides(l, m) for l in leads):
            out.append(tuple(m))
    return order.sort_basis(out)


def monomials_of_degree(nvars: int, d: int) -> list[Monomial]:
    """All exponent vectors of total degree ``d`` (stars and bars)."""
    if nvars == 0:
        return [()] if d == 0 else []
    out = []
    for cut in itertools.combinations(range(d + nvars - 1), nvars - 1):
        prev = -1
        m = []
        for c in cut:
            m.append(c - prev - 1)
            prev = c
        m.append(d + nvars - 1 - prev - 1)
        out.append(tuple(m))
    return out


def monomials_up_to(nvars: int, d: int) -> list[Monomial]:
    return [m for k in range(d + 1) for m in monomials_of_degree(nvars, k)]


def ensure_same_vars(polys: Iterable[Poly], nvars: int):
    for p in polys:
        if p.nvars != nvars:
            raise ValidationError("polynomial over a different variable set")
