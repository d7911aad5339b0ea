"""Text syntax for distributional expressions.

Grammar (whitespace insignificant, no implicit multiplication)::

    expr    := ['-'] term (('+' | '-') term)*
    term    := atom ('*' atom)*
    atom    := INT ['/' INT] | 'pi^' EVEN | factor
    factor  := 'VP[1/(' affine ')' ['^' INT] ']'
             | 'log' ['^(' INT ')'] '|' affine '|'
             | 'delta' ['^(' INT ')'] '(' affine ')'
             | 'theta(' affine ')'
             | NAME ['^(' INT (',' INT)* ')'] '(' affine (',' affine)* ')'   test function
             | NAME ['^' INT]                                               monomial
    affine  := ['-'] aterm (('+' | '-') aterm)*
    aterm   := INT ['/' INT] ['*' NAME] | NAME

Error columns are 0-based character offsets; lines are 1-based.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Mapping

from .algebra import Affine, format_affine, format_mono
from .coeff import ONE, PiCoeff, format_rational
from .errors import ParseError
from .expr import (Delta, DistExpr, DistTerm, Factor, Log, Mono, NumericFactor, Pole, Smooth, Theta,
                   normalize, smooth)
from .testfn import TestFn

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\^\(|[-+*/^()\[\]|,]))")
_KEYWORDS = {"VP", "log", "delta", "theta", "pi"}


class _Tok:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind, text, pos):
        self.kind, self.text, self.pos = kind, text, pos

    def __repr__(self):
        return f"{self.kind}:{self.text}@{self.pos}"


def _tokenize(src: str) -> list[_Tok]:
    toks = []
    i = 0
    while i < len(src):
        if src[i].isspace():
            i += 1
            continue
        m = _TOKEN.match(src, i)
        if not m or m.end() == i:
            raise ParseError(f"unexpected character {src[i]!r}", *_linecol(src, i))
        kind = m.lastgroup
        text = m.group(kind)
        toks.append(_Tok(kind, text, m.start(kind)))
        i = m.end()
    toks.append(_Tok("eof", "", len(src)))
    return toks


def _linecol(src: str, pos: int) -> tuple[int, int]:
    line = src.count("\n", 0, pos) + 1
    col = pos - (src.rfind("\n", 0, pos) + 1)
    return line, col


class _Parser:
    def __init__(self, src: str, functions: Mapping[str, TestFn]):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0
        self.functions = functions

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k=1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg, expected=()):
        raise ParseError(msg, *_linecol(self.src, self.tok.pos), expected)

    def accept(self, text) -> bool:
        if self.tok.kind in ("op", "name") and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.accept(text):
            got = "end of input" if self.tok.kind == "eof" else repr(self.tok.text)
            self.error(f"expected {text!r}, got {got}", [text])

    def integer(self) -> int:
        if self.tok.kind != "num":
            got = "end of input" if self.tok.kind == "eof" else repr(self.tok.text)
            self.error(f"expected integer, got {got}", ["INT"])
        v = int(self.tok.text)
        self.i += 1
        return v

    def name(self) -> str:
        if self.tok.kind != "name":
            got = "end of input" if self.tok.kind == "eof" else repr(self.tok.text)
            self.error(f"expected name, got {got}", ["NAME"])
        v = self.tok.text
        self.i += 1
        return v

    def rational(self) -> Fraction:
        n = self.integer()
        if self.accept("/"):
            d = self.integer()
            if d == 0:
                self.error("zero denominator")
            return Fraction(n, d)
        return Fraction(n)

    # expr
    def expr(self) -> DistExpr:
        terms = []
        sign = -1 if self.accept("-") else 1
        terms.append(self.term(sign))
        while True:
            if self.accept("+"):
                terms.append(self.term(1))
            elif self.accept("-"):
                terms.append(self.term(-1))
            else:
                break
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r}", ["+", "-", "*", "end of input"])
        return DistExpr(terms)

    def term(self, sign) -> DistTerm:
        coeff = PiCoeff.rational(sign)
        factors: list[Factor] = []
        extra: list[DistExpr] = []
        while True:
            c, f = self.atom()
            if c is not None:
                coeff = coeff * c
            if f is not None:
                if isinstance(f, DistExpr):
                    extra.append(f)
                else:
                    factors.append(f)
            if not self.accept("*"):
                break
        for e in extra:
            # polynomial test functions expand into monomials; keep single-term products only
            if len(e.terms) != 1:
                self.error("polynomial test function must be expanded in a term")
            coeff = coeff * e.terms[0].coeff
            factors.extend(e.terms[0].factors)
        return DistTerm(coeff, tuple(factors))

    def atom(self):
        t = self.tok
        if t.kind == "num":
            return PiCoeff.rational(self.rational()), None
        if t.kind == "name" and t.text == "pi":
            self.i += 1
            self.expect("^")
            p = self.integer()
            if p % 2 or p == 0:
                self.error("only positive even powers of pi are allowed")
            return PiCoeff.pi2(p // 2), None
        if t.kind == "name" and t.text == "VP":
            self.i += 1
            self.expect("[")
            if self.integer() != 1:
                self.error("VP numerator must be 1", ["1"])
            self.expect("/")
            self.expect("(")
            a = self.affine()
            self.expect(")")
            deg = 1
            if self.accept("^"):
                deg = self.integer()
                if deg < 1:
                    self.error("pole degree must be >= 1")
            self.expect("]")
            return None, Pole(a, deg)
        if t.kind == "name" and t.text == "log":
            self.i += 1
            k = 0
            if self.accept("^("):
                k = self.integer()
                self.expect(")")
            self.expect("|")
            a = self.affine()
            self.expect("|")
            return None, Log(a, k)
        if t.kind == "name" and t.text == "delta":
            self.i += 1
            k = 0
            if self.accept("^("):
                k = self.integer()
                self.expect(")")
            self.expect("(")
            a = self.affine()
            self.expect(")")
            return None, Delta(a, k)
        if t.kind == "name" and t.text == "theta":
            self.i += 1
            self.expect("(")
            a = self.affine()
            self.expect(")")
            return None, Theta(a)
        if t.kind == "name":
            name = self.name()
            nxt = self.tok
            if name in self.functions and (nxt.text in ("(", "^(")):
                deriv = None
                if self.accept("^("):
                    deriv = [self.integer()]
                    while self.accept(","):
                        deriv.append(self.integer())
                    self.expect(")")
                self.expect("(")
                args = [self.affine()]
                while self.accept(","):
                    args.append(self.affine())
                self.expect(")")
                fn = self.functions[name]
                if len(args) != fn.arity:
                    self.error(f"{name} takes {fn.arity} arguments")
                if deriv is not None:
                    if len(deriv) != fn.arity:
                        self.error("derivative index length must match arity")
                    return None, Smooth(fn, tuple(args), tuple(deriv))
                e = smooth(fn, *args)
                return None, (e.terms[0].factors[0] if len(e.terms) == 1 and len(e.terms[0].factors) == 1
                              and e.terms[0].coeff == ONE else e)
            if nxt.text in ("(", "^("):
                self.error(f"unknown function {name!r}")
            if name in _KEYWORDS:
                self.error(f"reserved word {name!r}")
            e = 1
            if self.accept("^"):
                e = self.integer()
            return None, Mono(((name, e),)) if e else None
        got = "end of input" if t.kind == "eof" else repr(t.text)
        self.error(f"expected a factor, got {got}", ["INT", "pi^", "VP[", "log|", "delta(", "theta(", "NAME"])

    def affine(self) -> Affine:
        total = Affine()
        sign = -1 if self.accept("-") else 1
        total = total + self.aterm().scale(sign)
        while True:
            if self.tok.kind == "op" and self.tok.text in ("+", "-"):
                s = 1 if self.tok.text == "+" else -1
                self.i += 1
                total = total + self.aterm().scale(s)
            else:
                break
        return total

    def aterm(self) -> Affine:
        if self.tok.kind == "num":
            r = self.rational()
            if self.accept("*"):
                return Affine.var(self.name(), r)
            return Affine(r)
        if self.tok.kind == "name" and self.tok.text not in _KEYWORDS:
            return Affine.var(self.name())
        got = "end of input" if self.tok.kind == "eof" else repr(self.tok.text)
        self.error(f"expected affine term, got {got}", ["INT", "NAME"])


def parse_expr(src: str, functions: Mapping[str, TestFn] | None = None, normalized: bool = True) -> DistExpr:
    """Parse DSL text into a (normalized) expression."""
    if not src or not src.strip():
        raise ParseError("empty expression", 1, 0, ["expression"])
    e = _Parser(src, functions or {}).expr()
    return normalize(e) if normalized else e


def parse_affine(src: str) -> Affine:
    p = _Parser(src, {})
    a = p.affine()
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.tok.text!r}", ["end of input"])
    return a


# --------------------------------------------------------------------------
# printer

def format_factor(f: Factor) -> str:
    if isinstance(f, Pole):
        a = format_affine(f.arg)
        return f"VP[1/({a})]" if f.degree == 1 else f"VP[1/({a})^{f.degree}]"
    if isinstance(f, Delta):
        a = format_affine(f.arg)
        return f"delta({a})" if f.order == 0 else f"delta^({f.order})({a})"
    if isinstance(f, Log):
        a = format_affine(f.arg)
        return f"log|{a}|" if f.deriv == 0 else f"log^({f.deriv})|{a}|"
    if isinstance(f, Theta):
        return f"theta({format_affine(f.arg)})"
    if isinstance(f, Mono):
        return format_mono(f.mono)
    if isinstance(f, Smooth):
        args = ",".join(format_affine(a) for a in f.args)
        if any(f.deriv):
            return f"{f.fn.name}^({','.join(map(str, f.deriv))})({args})"
        return f"{f.fn.name}({args})"
    if isinstance(f, NumericFactor):
        return repr(f)
    raise TypeError(f)


def _format_monomial_term(k: int, r: Fraction, factors) -> tuple[str, str]:
    parts = []
    mag = abs(r)
    if mag != 1 or (k == 0 and not factors):
        parts.append(format_rational(mag))
    if k:
        parts.append(f"pi^{2 * k}")
    parts.extend(format_factor(f) for f in factors)
    return ("-" if r < 0 else "+"), "*".join(parts)


def format_expr(e: DistExpr) -> str:
    pieces = []
    for t in e.terms:
        for k, r in t.coeff.terms.items():
            pieces.append(_format_monomial_term(k, r, t.factors))
    if not pieces:
        return "0"
    out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out
