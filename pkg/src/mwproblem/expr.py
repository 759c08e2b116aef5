"""Text form of solution expressions and probability vectors.

    derham:p=1/3
    avg:m=2:P=0,0,1/3,2/3
    int:atoms=(1/4:1/2),(3/4:1/2)
    int:density=uniform:nodes=32
    convex:a=1/2:<derham:p=1/2>:<avg:m=2:P=0,0,1/3,2/3>
    series:a=1/2,1/4:tail=1/4:<s1>:<s2>

Fields are separated by ``:`` outside parentheses and angle brackets.
Sub-expressions may be wrapped in ``<...>``; without brackets they are
read greedily by arity.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .ifs import ProbabilityVector
from .numerics import MWError, parse_rational
from .solutions import Averaged, Convex, DeRham, Density, Integral, MeasureSpec, Series, SolutionExpr

KINDS = ("derham", "avg", "int", "convex", "series")


class ParseError(MWError, ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} (at position {position})")


@dataclass
class _Token:
    text: str
    pos: int


def _split(text: str, offset: int, sep: str = ":") -> list[_Token]:
    out, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch in "(<":
            depth += 1
        elif ch in ")>":
            depth -= 1
            if depth < 0:
                raise ParseError(f"unbalanced {ch!r}", offset + i, text)
        elif ch == sep and depth == 0:
            out.append(_Token(text[start:i], offset + start))
            start = i + 1
    if depth:
        raise ParseError("unclosed bracket", offset + len(text), text)
    out.append(_Token(text[start:], offset + start))
    return out


def _number(tok: _Token, text: str, pos: int | None = None) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad number {text!r}", tok.pos if pos is None else pos) from None


def _numbers(tok: _Token, text: str, start: int) -> list[Fraction]:
    out, pos = [], start
    for part in text.split(","):
        out.append(_number(tok, part, pos))
        pos += len(part) + 1
    return out


def _field(tok: _Token, key: str) -> tuple[str, int]:
    prefix = key + "="
    if not tok.text.startswith(prefix):
        raise ParseError(f"expected '{prefix}...', got {tok.text!r}", tok.pos)
    return tok.text[len(prefix):], tok.pos + len(prefix)


def _key(tok: _Token) -> str:
    return tok.text.split("=", 1)[0] if "=" in tok.text else ""


class _Parser:
    def __init__(self, tokens: list[_Token], end: int):
        self.tokens = tokens
        self.i = 0
        self.end = end

    def peek(self) -> _Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, what: str) -> _Token:
        tok = self.peek()
        if tok is None:
            raise ParseError(f"expected {what}, got end of input", self.end)
        self.i += 1
        return tok

    def expr(self) -> SolutionExpr:
        tok = self.take("an expression")
        if tok.text.startswith("<"):
            if not tok.text.endswith(">"):
                raise ParseError("expected '>'", tok.pos + len(tok.text))
            return _parse_at(tok.text[1:-1], tok.pos + 1)
        kind = tok.text
        if kind == "derham":
            value, pos = _field(self.take("p=..."), "p")
            return DeRham(_number(tok, value, pos))
        if kind == "avg":
            m_tok = self.take("m=...")
            m_text, m_pos = _field(m_tok, "m")
            if not m_text.isdigit():
                raise ParseError(f"bad m {m_text!r}", m_pos)
            p_tok = self.take("P=...")
            p_text, p_pos = _field(p_tok, "P")
            return Averaged(ProbabilityVector(int(m_text), tuple(_numbers(p_tok, p_text, p_pos))))
        if kind == "int":
            return Integral(self.measure(tok))
        if kind == "convex":
            a_tok = self.take("a=...")
            value, pos = _field(a_tok, "a")
            alpha = _number(a_tok, value, pos)
            left = self.expr()
            right = self.expr()
            return Convex(alpha, left, right)
        if kind == "series":
            a_tok = self.take("a=...")
            value, pos = _field(a_tok, "a")
            weights = _numbers(a_tok, value, pos)
            tail = Fraction(0)
            nxt = self.peek()
            if nxt is not None and _key(nxt) == "tail":
                value, pos = _field(self.take("tail=..."), "tail")
                tail = _number(nxt, value, pos)
            terms = tuple((w, self.expr()) for w in weights)
            return Series(terms, tail)
        raise ParseError(f"unknown expression kind {kind!r}; expected one of {', '.join(KINDS)}", tok.pos)

    def measure(self, head: _Token) -> MeasureSpec:
        fields: dict[str, tuple[str, int]] = {}
        while (tok := self.peek()) is not None and _key(tok) in ("atoms", "density", "dmass", "nodes", "rule"):
            self.i += 1
            key = _key(tok)
            if key in fields:
                raise ParseError(f"duplicate field {key!r}", tok.pos)
            fields[key] = _field(tok, key)
        if not fields:
            raise ParseError("int needs atoms=... or density=...", head.pos)
        atoms = []
        if "atoms" in fields:
            text, pos = fields["atoms"]
            for part in _split(text, pos, ","):
                body = part.text.strip()
                if not (body.startswith("(") and body.endswith(")")):
                    raise ParseError("atom must look like (location:mass)", part.pos)
                inner = _split(body[1:-1], part.pos + 1)
                if len(inner) != 2:
                    raise ParseError("atom must look like (location:mass)", part.pos)
                atoms.append((_number(inner[0], inner[0].text), _number(inner[1], inner[1].text)))
        density = None
        if "density" in fields:
            name, _ = fields["density"]
            kwargs = {}
            if "dmass" in fields:
                kwargs["mass"] = _number(head, *fields["dmass"])
            if "nodes" in fields:
                text, pos = fields["nodes"]
                if not text.isdigit():
                    raise ParseError(f"bad node count {text!r}", pos)
                kwargs["nodes"] = int(text)
            if "rule" in fields:
                kwargs["rule"] = fields["rule"][0]
            density = Density(name, **kwargs)
        elif set(fields) - {"atoms"}:
            raise ParseError("dmass/nodes/rule need density=...", head.pos)
        return MeasureSpec(tuple(atoms), density)


def _parse_at(text: str, offset: int) -> SolutionExpr:
    tokens = _split(text, offset)
    parser = _Parser(tokens, offset + len(text))
    expr = parser.expr()
    extra = parser.peek()
    if extra is not None:
        raise ParseError(f"unexpected trailing field {extra.text!r}", extra.pos)
    return expr


def parse_expr(text: str) -> SolutionExpr:
    """Parse the text form of a solution expression."""
    try:
        return _parse_at(text.strip(), 0)
    except ParseError as exc:
        exc.text = text
        raise


def _fmt(x: Fraction) -> str:
    return str(Fraction(x))


def format_expr(s: SolutionExpr) -> str:
    if isinstance(s, DeRham):
        return f"derham:p={_fmt(s.p)}"
    if isinstance(s, Averaged):
        return f"avg:m={s.P.m}:P=" + ",".join(_fmt(w) for w in s.P.weights)
    if isinstance(s, Integral):
        parts = ["int"]
        if s.mu.atoms:
            parts.append("atoms=" + ",".join(f"({_fmt(p)}:{_fmt(w)})" for p, w in s.mu.atoms))
        d = s.mu.density
        if d is not None:
            parts.append(f"density={d.name}")
            if d.mass != 1:
                parts.append(f"dmass={_fmt(d.mass)}")
            parts.append(f"nodes={d.nodes}")
            if d.rule != "gauss-legendre":
                parts.append(f"rule={d.rule}")
        return ":".join(parts)
    if isinstance(s, Convex):
        return f"convex:a={_fmt(s.alpha)}:<{format_expr(s.left)}>:<{format_expr(s.right)}>"
    if isinstance(s, Series):
        head = "series:a=" + ",".join(_fmt(a) for a, _ in s.terms)
        if s.tail:
            head += f":tail={_fmt(s.tail)}"
        return head + "".join(f":<{format_expr(t)}>" for _, t in s.terms)
    raise TypeError(f"not a solution expression: {s!r}")


def parse_pvector(text: str) -> ProbabilityVector:
    """``m=2:P=0,0,1/3,2/3`` or ``m=2:K=2,3`` (uniform weights on K)."""
    tokens = _split(text.strip(), 0)
    if len(tokens) != 2:
        raise ParseError("expected 'm=...:P=...' or 'm=...:K=...'", 0, text)
    m_text, m_pos = _field(tokens[0], "m")
    if not m_text.isdigit():
        raise ParseError(f"bad m {m_text!r}", m_pos, text)
    m = int(m_text)
    key = _key(tokens[1])
    if key == "P":
        body, pos = _field(tokens[1], "P")
        return ProbabilityVector(m, tuple(_numbers(tokens[1], body, pos)))
    if key == "K":
        body, pos = _field(tokens[1], "K")
        digits = []
        for part in body.split(","):
            if not part.strip().isdigit():
                raise ParseError(f"bad digit {part!r}", pos, text)
            digits.append(int(part))
            pos += len(part) + 1
        return ProbabilityVector.uniform_on(m, digits)
    raise ParseError(f"expected 'P=' or 'K=', got {tokens[1].text!r}", tokens[1].pos, text)
