"""Parser for the arithmetic expressions used in scenario files.

Grammar (standard precedence, left associative, unary minus allowed):

    expr   := term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' INT)?
    atom   := INT | NAME | '(' expr ')'

NAME matches [a-z][a-z0-9_]*.  Exponents must be nonnegative integer
literals.  The result is a RationalExpr over a caller-supplied ring
context; unknown variables are reported with their position.
"""

from __future__ import annotations

import re

from .ring import RationalExpr, RingError

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[a-z][a-z0-9_]*)|(?P<op>[-+*/^()]))")


class ExprError(ValueError):
    def __init__(self, message, pos):
        super().__init__("%s (at position %d)" % (message, pos))
        self.pos = pos


def tokenize(s):
    out = []
    pos = 0
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m:
            if s[pos:].strip():
                raise ExprError("unexpected character %r" % s[pos:].strip()[0], pos)
            break
        if m.group("int") is not None:
            out.append(("int", int(m.group("int")), m.start("int")))
        elif m.group("name") is not None:
            out.append(("name", m.group("name"), m.start("name")))
        else:
            out.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    out.append(("end", None, len(s)))
    return out


class _Parser:
    def __init__(self, tokens, ctx):
        self.toks = tokens
        self.i = 0
        self.ctx = ctx

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect_op(self, op):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise ExprError("expected %r" % op, pos)

    def parse(self):
        e = self.expr()
        kind, _, pos = self.peek()
        if kind != "end":
            raise ExprError("trailing input", pos)
        return e

    def expr(self):
        e = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                e = e + rhs if val == "+" else e - rhs
            else:
                return e

    def term(self):
        e = self.unary()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                rhs = self.unary()
                if val == "*":
                    e = e * rhs
                else:
                    if rhs.is_zero():
                        raise ExprError("division by zero", self.toks[self.i - 1][2])
                    e = e / rhs
            else:
                return e

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return -self.unary()
        return self.power()

    def power(self):
        e = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind2, n, pos2 = self.take()
            if kind2 != "int":
                raise ExprError("exponent must be a nonnegative integer literal", pos2)
            e = e ** n
        return e

    def atom(self):
        kind, val, pos = self.take()
        if kind == "int":
            return RationalExpr(self.ctx.const(val))
        if kind == "name":
            try:
                return RationalExpr(self.ctx.var(val))
            except RingError:
                raise ExprError("unknown variable %r" % val, pos) from None
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        raise ExprError("expected a value", pos)


def parse_expression(s, ctx):
    """Parse s into a RationalExpr over ctx."""
    return _Parser(tokenize(s), ctx).parse()


def print_expression(e):
    """Render a RationalExpr in the same grammar (for round-trip checks)."""
    from .ring import format_poly

    if e.den.terms == {(0,) * len(e.ctx.variables): 1}:
        return format_poly(e.num)
    return "(%s)/(%s)" % (format_poly(e.num), format_poly(e.den))
