"""Text forms of darts and payoffs: a small recursive-descent parser and the
matching renderer, so that ``parse(render(x)) == x``.

Darts::

    normal(m,s) | uniform(lo,hi) | cauchy(l,s) | bern(p) | atomic((x,m);(x,m);...)
    | semicircle | arcsine | tentcf | cantor | grid(k) | disc
    | mix(w:DART, ...) | sum(c:DART, ...) | affine(a,b,DART)

Atom locations and affine shifts may be 2-vectors ``(x1,x2)``.

Payoffs::

    cos | cos(w1[,w2]) | squarewave | comb(k,mmax) | dartboard | boardslice(angle)
    | kdelta(d,p) | zeroconstruct(DART) | zeroconstruct(w,c,a0,B,sup)
    | singularatom(x,p) | atomstep(c,peak,r,outer) | pointstep
    | truncate(B,PAYOFF) | gaussbump(c,w) | pwlinear((x,y);(x,y);...)

Whitespace is ignored and numbers are plain decimal literals.
"""

from __future__ import annotations

import re

import numpy as np

from . import darts as D
from . import payoffs as P


class ExpressionError(ValueError):
    """Syntax or parameter-domain error, with the offending position."""

    def __init__(self, message, text=None, pos=None):
        self.pos = pos
        where = f" at position {pos}" if pos is not None else ""
        if text is not None and pos is not None:
            message = f"{message}{where}\n  {text}\n  {' ' * pos}^"
        super().__init__(message)


_TOKEN = re.compile(r"\s*(?:(?P<num>[+-]?(?:\d+\.?\d*|\.\d+))|(?P<name>[a-z_][a-z0-9_]*)|(?P<sym>[(),;:]))")


def _tokenize(text):
    tokens, pos = [], 0
    text = text.lower()
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ExpressionError("unexpected character", text, start)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    # -- token helpers -------------------------------------------------------------
    def peek(self):
        return self.tokens[self.i]

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return ExpressionError(message, self.text, tok[2])

    def take(self, kind, value=None):
        tok = self.peek()
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of input"
            raise self.error(f"expected {want!r}, got {got!r}")
        self.i += 1
        return tok

    def at(self, value):
        return self.peek()[1] == value and self.peek()[0] == "sym"

    def number(self):
        return float(self.take("num")[1])

    def integer(self):
        tok = self.peek()
        x = self.number()
        if x != int(x):
            raise self.error("expected an integer", tok)
        return int(x)

    def vector(self):
        """A number or a parenthesised pair."""
        if self.at("("):
            self.take("sym", "(")
            a = self.number()
            self.take("sym", ",")
            b = self.number()
            self.take("sym", ")")
            return (a, b)
        return self.number()

    def numbers(self, n):
        self.take("sym", "(")
        out = []
        for k in range(n):
            if k:
                self.take("sym", ",")
            out.append(self.number())
        self.take("sym", ")")
        return out

    def pairs(self, first):
        """'(' '(' first ',' num ')' (';' ...)* ')'."""
        self.take("sym", "(")
        out = []
        while True:
            self.take("sym", "(")
            x = first()
            self.take("sym", ",")
            y = self.number()
            self.take("sym", ")")
            out.append((x, y))
            if self.at(";"):
                self.take("sym", ";")
                continue
            break
        self.take("sym", ")")
        return out

    def weighted(self, item):
        self.take("sym", "(")
        out = []
        while True:
            w = self.number()
            self.take("sym", ":")
            out.append((w, item()))
            if self.at(","):
                self.take("sym", ",")
                continue
            break
        self.take("sym", ")")
        return out

    def optional_empty_parens(self):
        if self.at("("):
            self.take("sym", "(")
            self.take("sym", ")")

    def build(self, tok, ctor, *args):
        try:
            return ctor(*args)
        except (ValueError, TypeError) as exc:
            raise self.error(f"{tok[1]}: {exc}", tok) from None

    def finish(self):
        if self.peek()[0] != "end":
            raise self.error("trailing input")

    # -- darts -------------------------------------------------------------------
    def dart(self):
        tok = self.take("name")
        name = tok[1]
        if name == "normal":
            return self.build(tok, D.Normal1D, *self.numbers(2))
        if name == "uniform":
            return self.build(tok, D.Uniform1D, *self.numbers(2))
        if name == "cauchy":
            return self.build(tok, D.Cauchy1D, *self.numbers(2))
        if name == "bern":
            return self.build(tok, D.bern, *self.numbers(1))
        if name == "grid":
            self.take("sym", "(")
            k = self.integer()
            self.take("sym", ")")
            return self.build(tok, D.GridUniform1D, k)
        if name == "atomic":
            atoms = self.pairs(self.vector)
            locs = tuple(x if isinstance(x, tuple) else (x,) for x, _ in atoms)
            return self.build(tok, D.Atomic, locs, tuple(m for _, m in atoms))
        simple = {"semicircle": D.SemiCircle1D, "arcsine": D.Arcsine1D, "tentcf": D.TentCF1D,
                  "cantor": D.Cantor1D, "disc": D.UniformDisc2D}
        if name in simple:
            self.optional_empty_parens()
            return simple[name]()
        if name == "mix":
            return self.build(tok, D.Mixture, tuple(self.weighted(self.dart)))
        if name == "sum":
            return self.build(tok, D.IndepSum, tuple(self.weighted(self.dart)))
        if name == "affine":
            self.take("sym", "(")
            a = self.number()
            self.take("sym", ",")
            b = self.vector()
            self.take("sym", ",")
            inner = self.dart()
            self.take("sym", ")")
            return self.build(tok, D.Affine, a, b, inner)
        raise self.error(f"unknown dart {name!r}", tok)

    # -- payoffs -------------------------------------------------------------------
    def payoff(self):
        tok = self.take("name")
        name = tok[1]
        if name == "cos":
            if not self.at("("):
                return P.Cosine()
            self.take("sym", "(")
            w = [self.number()]
            while self.at(","):
                self.take("sym", ",")
                w.append(self.number())
            self.take("sym", ")")
            if len(w) > 2:
                raise self.error("cos takes one or two weights", tok)
            return P.Cosine(tuple(w))
        if name in ("squarewave", "dartboard", "pointstep"):
            self.optional_empty_parens()
            return {"squarewave": P.SquareWave, "dartboard": P.Dartboard,
                    "pointstep": P.point_step}[name]()
        if name == "boardslice":
            if not self.at("("):
                return P.BoardSlice()
            return self.build(tok, P.BoardSlice, *self.numbers(1))
        if name == "comb":
            self.take("sym", "(")
            k = self.integer()
            self.take("sym", ",")
            m = self.integer()
            self.take("sym", ")")
            return self.build(tok, P.make_comb, k, m)
        if name == "kdelta":
            return self.build(tok, P.KDelta, *self.numbers(2))
        if name == "singularatom":
            return self.build(tok, P.SingularAtom, *self.numbers(2))
        if name == "atomstep":
            return self.build(tok, P.AtomStep, *self.numbers(4))
        if name == "zeroconstruct":
            if self.tokens[self.i + 1][0] == "num":
                return self.build(tok, P.ZeroConstruct, *self.numbers(5))
            self.take("sym", "(")
            dart = self.dart()
            self.take("sym", ")")
            return self.build(tok, P.make_zero_construct, dart)
        if name == "truncate":
            self.take("sym", "(")
            b = self.number()
            self.take("sym", ",")
            inner = self.payoff()
            self.take("sym", ")")
            return self.build(tok, P.truncate, inner, b)
        if name == "gaussbump":
            self.take("sym", "(")
            c = self.vector()
            self.take("sym", ",")
            w = self.number()
            self.take("sym", ")")
            return self.build(tok, P.GaussBump, c, w)
        if name == "pwlinear":
            return self.build(tok, P.PiecewiseLinear1D, tuple(self.pairs(self.number)))
        raise self.error(f"unknown payoff {name!r}", tok)


def parse_dart(text: str) -> D.Dart:
    p = _Parser(text)
    out = p.dart()
    p.finish()
    return out


def parse_payoff(text: str) -> P.Payoff:
    p = _Parser(text)
    out = p.payoff()
    p.finish()
    return out


# -- rendering ---------------------------------------------------------------------

def fmt(x) -> str:
    """Shortest decimal string that reads back as the same float."""
    s = np.format_float_positional(float(x), trim="-")
    return "0" if s == "-0" else s


def _vec(v):
    v = tuple(v) if isinstance(v, (tuple, list)) else (v,)
    return fmt(v[0]) if len(v) == 1 else f"({fmt(v[0])},{fmt(v[1])})"


def render_dart(dart: D.Dart) -> str:
    if isinstance(dart, D.Normal1D):
        return f"normal({fmt(dart.mean)},{fmt(dart.sd)})"
    if isinstance(dart, D.Uniform1D):
        return f"uniform({fmt(dart.lo)},{fmt(dart.hi)})"
    if isinstance(dart, D.Cauchy1D):
        return f"cauchy({fmt(dart.loc)},{fmt(dart.scale)})"
    if isinstance(dart, D.Atomic):
        body = ";".join(f"({_vec(x)},{fmt(m)})" for x, m in zip(dart.locations, dart.masses))
        return f"atomic({body})"
    if isinstance(dart, D.GridUniform1D):
        return f"grid({dart.k})"
    simple = {D.SemiCircle1D: "semicircle", D.Arcsine1D: "arcsine", D.TentCF1D: "tentcf",
              D.Cantor1D: "cantor", D.UniformDisc2D: "disc"}
    if type(dart) in simple:
        return simple[type(dart)]
    if isinstance(dart, D.Mixture):
        return "mix(" + ",".join(f"{fmt(w)}:{render_dart(d)}" for w, d in dart.components) + ")"
    if isinstance(dart, D.IndepSum):
        return "sum(" + ",".join(f"{fmt(c)}:{render_dart(d)}" for c, d in dart.terms) + ")"
    if isinstance(dart, D.Affine):
        return f"affine({fmt(dart.scale)},{_vec(dart.shift)},{render_dart(dart.inner)})"
    raise ValueError(f"{type(dart).__name__} has no text form")


def render_payoff(payoff: P.Payoff) -> str:
    if isinstance(payoff, P.Cosine):
        if payoff.direction is None:
            return "cos"
        return "cos(" + ",".join(fmt(w) for w in payoff.direction) + ")"
    if isinstance(payoff, P.SquareWave):
        return "squarewave"
    if isinstance(payoff, P.Dartboard):
        if payoff.geometry != P.STANDARD_BOARD:
            raise ValueError("only the standard board has a text form")
        return "dartboard"
    if isinstance(payoff, P.BoardSlice):
        if payoff.geometry != P.STANDARD_BOARD:
            raise ValueError("only the standard board has a text form")
        return f"boardslice({fmt(payoff.angle_deg)})"
    if isinstance(payoff, P.Comb):
        return f"comb({payoff.k},{payoff.m_max})"
    if isinstance(payoff, P.KDelta):
        return f"kdelta({fmt(payoff.delta)},{fmt(payoff.p0)})"
    if isinstance(payoff, P.SingularAtom):
        return f"singularatom({fmt(payoff.atom)},{fmt(payoff.p)})"
    if isinstance(payoff, P.AtomStep):
        return (f"atomstep({fmt(payoff.center)},{fmt(payoff.peak)},"
                f"{fmt(payoff.radius)},{fmt(payoff.outer)})")
    if isinstance(payoff, P.ZeroConstruct):
        vals = (payoff.omega, payoff.c, payoff.a0, payoff.B, payoff.sup)
        return "zeroconstruct(" + ",".join(fmt(v) for v in vals) + ")"
    if isinstance(payoff, P.Truncated):
        return f"truncate({fmt(payoff.B)},{render_payoff(payoff.inner)})"
    if isinstance(payoff, P.GaussBump):
        return f"gaussbump({_vec(payoff.center)},{fmt(payoff.width)})"
    if isinstance(payoff, P.PiecewiseLinear1D):
        return "pwlinear(" + ";".join(f"({fmt(x)},{fmt(y)})" for x, y in payoff.points) + ")"
    raise ValueError(f"{type(payoff).__name__} has no text form")
