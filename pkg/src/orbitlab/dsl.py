"""A small expression language for holomorphic self-maps.

Grammar (version 1)::

    mapdef := KIND INT ":" tuple ["inverse" tuple]
    tuple  := "(" expr ("," expr)* ")"
    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" ["-"] INT)*
    atom   := NUMBER | NUMBER "i" | "i" | zK | NAME | FUNC "(" expr ")" | "(" expr ")"

KIND is one of disc, ball, polydisc, siegel, slitplane; FUNC is sqrt, exp
or log (principal branches, cut on the nonpositive reals). Names other than
the variables z1..zq must be bound through ``params``.

Evaluation runs on Python complex numbers or on mpmath numbers, whichever
the input point carries. ``eval_jet`` differentiates in forward mode.
"""

from __future__ import annotations

import cmath
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import mpmath
import numpy as np

from . import _numeric as nm
from .errors import EvaluationError, MapSyntaxError
from .geometry import KINDS, Domain, as_point

GRAMMAR_VERSION = 1
FUNCTIONS = ("sqrt", "exp", "log")
RESERVED = frozenset(FUNCTIONS + ("i", "inverse") + KINDS)

# --- AST ----------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    text: str
    imag: bool = False


@dataclass(frozen=True)
class Var:
    index: int  # 1-based


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expr"


Expr = Union[Num, Var, Param, Neg, BinOp, Pow, Call]


# --- Lexer --------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),:])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # num, imag, name, op, end
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise MapSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind == "num":
            end = m.end()
            # an "i" glued to a number is the imaginary unit suffix
            if end < len(text) and text[end] == "i" and not (
                end + 1 < len(text) and (text[end + 1].isalnum() or text[end + 1] == "_")
            ):
                toks.append(_Tok("imag", m.group(), pos))
                pos = end + 1
                continue
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), pos))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


# --- Parser -------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, q: int | None, params: Mapping[str, object]):
        self.toks = _tokenize(text)
        self.i = 0
        self.q = q
        self.params = params

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        raise MapSyntaxError(f"{msg}, found {found}", tok.pos)

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            self.error(f"expected {text!r}")

    def mapdef(self):
        tok = self.tok
        if tok.kind != "name" or tok.text not in KINDS:
            self.error(f"expected a domain kind ({', '.join(KINDS)})")
        kind = tok.text
        self.i += 1
        if self.tok.kind != "num" or not self.tok.text.isdigit():
            self.error("expected the dimension")
        qtok = self.tok
        q = int(qtok.text)
        self.i += 1
        try:
            domain = Domain(kind, q)
        except ValueError as exc:
            raise MapSyntaxError(str(exc), qtok.pos) from None
        self.q = q
        self.expect(":")
        comps = self.tuple_()
        inverse = None
        if self.tok.kind == "name" and self.tok.text == "inverse":
            self.i += 1
            inv_tok = self.tok
            inverse = self.tuple_()
            if len(inverse) != q:
                raise MapSyntaxError(f"inverse needs {q} components, got {len(inverse)}", inv_tok.pos)
        if self.tok.kind != "end":
            self.error("expected end of input")
        return domain, comps, inverse

    def tuple_(self) -> tuple:
        self.expect("(")
        items = [self.expr()]
        while self.accept(","):
            items.append(self.expr())
        self.expect(")")
        return tuple(items)

    def expr(self) -> Expr:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        node = self.atom()
        while self.accept("^"):
            sign = -1 if self.accept("-") else 1
            tok = self.tok
            if tok.kind != "num" or not tok.text.isdigit():
                self.error("exponent must be an integer literal")
            self.i += 1
            node = Pow(node, sign * int(tok.text))
        return node

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Num(tok.text)
        if tok.kind == "imag":
            self.i += 1
            return Num(tok.text, imag=True)
        if tok.kind == "name":
            self.i += 1
            name = tok.text
            if name == "i":
                return Num("1", imag=True)
            if name in FUNCTIONS:
                if not self.accept("("):
                    self.error(f"{name} takes one parenthesised argument")
                arg = self.expr()
                if self.tok.kind == "op" and self.tok.text == ",":
                    raise MapSyntaxError(f"{name} takes exactly one argument", self.tok.pos)
                self.expect(")")
                return Call(name, arg)
            m = re.fullmatch(r"z([1-9]\d*)", name)
            if m:
                k = int(m.group(1))
                if self.q is not None and k > self.q:
                    raise MapSyntaxError(f"unknown identifier {name!r} (dimension is {self.q})", tok.pos)
                return Var(k)
            if name in RESERVED:
                raise MapSyntaxError(f"reserved word {name!r} cannot be used here", tok.pos)
            if name not in self.params:
                raise MapSyntaxError(f"unknown identifier {name!r}", tok.pos)
            return Param(name)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        self.error("expected an expression")


# --- Pretty printer -----------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(node: Expr) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return 3
    if isinstance(node, Pow):
        return 4
    return 5


def format_expr(node: Expr, min_prec: int = 0) -> str:
    if isinstance(node, Num):
        if node.imag:
            s = "i" if node.text == "1" else node.text + "i"
        else:
            s = node.text
    elif isinstance(node, Var):
        s = f"z{node.index}"
    elif isinstance(node, Param):
        s = node.name
    elif isinstance(node, Neg):
        s = "-" + format_expr(node.arg, 3)
    elif isinstance(node, BinOp):
        p = _PREC[node.op]
        s = f"{format_expr(node.left, p)} {node.op} {format_expr(node.right, p + 1)}"
    elif isinstance(node, Pow):
        s = f"{format_expr(node.base, 4)}^{node.exponent}"
    elif isinstance(node, Call):
        s = f"{node.fn}({format_expr(node.arg)})"
    else:
        raise TypeError(node)
    if _prec(node) < min_prec:
        return f"({s})"
    return s


# --- Evaluation ---------------------------------------------------------------


def _on_cut(v) -> bool:
    return v.imag == 0 and v.real <= 0


class _Arith:
    """Scalar operations for one number system (double or mpmath)."""

    def __init__(self, mp: bool):
        self.mp = mp
        if mp:
            self.sqrt, self.exp, self.log = mpmath.sqrt, mpmath.exp, mpmath.log
        else:
            self.sqrt, self.exp, self.log = cmath.sqrt, cmath.exp, cmath.log

    def const(self, node: Num):
        if self.mp:
            x = mpmath.mpf(node.text)
            return mpmath.mpc(0, x) if node.imag else mpmath.mpc(x)
        x = float(node.text)
        return complex(0, x) if node.imag else complex(x)

    def param(self, value):
        return mpmath.mpc(value) if self.mp else complex(value)


_FLOAT = _Arith(False)
_MP = _Arith(True)


def _arith_for(point: Sequence) -> _Arith:
    return _MP if nm.uses_mp(point) else _FLOAT


def _div(a, b):
    if b == 0:
        raise EvaluationError("division by zero")
    return a / b


def _pow(a, n: int):
    if n < 0 and a == 0:
        raise EvaluationError("zero raised to a negative power")
    return a**n


def _call(ar: _Arith, fn: str, v):
    if fn in ("sqrt", "log") and _on_cut(v):
        raise EvaluationError(f"{fn} evaluated on its branch cut at {complex(v)!r}")
    return getattr(ar, fn)(v)


def _value(node: Expr, z: Sequence, params: Mapping, ar: _Arith):
    if isinstance(node, Num):
        return ar.const(node)
    if isinstance(node, Var):
        return z[node.index - 1]
    if isinstance(node, Param):
        return ar.param(params[node.name])
    if isinstance(node, Neg):
        return -_value(node.arg, z, params, ar)
    if isinstance(node, BinOp):
        a = _value(node.left, z, params, ar)
        b = _value(node.right, z, params, ar)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        return _div(a, b)
    if isinstance(node, Pow):
        return _pow(_value(node.base, z, params, ar), node.exponent)
    if isinstance(node, Call):
        return _call(ar, node.fn, _value(node.arg, z, params, ar))
    raise TypeError(node)


def _jet(node: Expr, z: Sequence, params: Mapping, ar: _Arith):
    """Return (value, gradient) with the gradient as a list over z1..zq."""
    q = len(z)
    if isinstance(node, Num):
        return ar.const(node), [0] * q
    if isinstance(node, Param):
        return ar.param(params[node.name]), [0] * q
    if isinstance(node, Var):
        g = [0] * q
        g[node.index - 1] = 1
        return z[node.index - 1], g
    if isinstance(node, Neg):
        v, g = _jet(node.arg, z, params, ar)
        return -v, [-x for x in g]
    if isinstance(node, BinOp):
        a, ga = _jet(node.left, z, params, ar)
        b, gb = _jet(node.right, z, params, ar)
        if node.op == "+":
            return a + b, [x + y for x, y in zip(ga, gb)]
        if node.op == "-":
            return a - b, [x - y for x, y in zip(ga, gb)]
        if node.op == "*":
            return a * b, [x * b + a * y for x, y in zip(ga, gb)]
        v = _div(a, b)
        return v, [(x - v * y) / b for x, y in zip(ga, gb)]
    if isinstance(node, Pow):
        a, ga = _jet(node.base, z, params, ar)
        n = node.exponent
        if n == 0:
            return _pow(a, 0), [0] * q
        d = n * _pow(a, n - 1)
        return _pow(a, n), [d * x for x in ga]
    if isinstance(node, Call):
        a, ga = _jet(node.arg, z, params, ar)
        v = _call(ar, node.fn, a)
        if node.fn == "sqrt":
            d = 1 / (2 * v)
        elif node.fn == "exp":
            d = v
        else:
            d = 1 / a
        return v, [d * x for x in ga]
    raise TypeError(node)


# --- Maps ---------------------------------------------------------------------


@dataclass(frozen=True)
class JetValue:
    value: tuple
    jacobian: np.ndarray  # jacobian[i, j] = d f_i / d z_j


@dataclass(frozen=True)
class MapDef:
    """A holomorphic map given by expressions in z1..zq.

    For self-maps the number of components equals ``domain.q``; intertwining
    maps of pre-models may have a different target dimension.
    """

    domain: Domain
    components: tuple
    inverse: tuple | None = None
    name: str = ""
    params: tuple = field(default=())  # sorted (name, value) pairs

    @property
    def q(self) -> int:
        return self.domain.q

    @property
    def is_self_map(self) -> bool:
        return len(self.components) == self.domain.q

    @property
    def param_dict(self) -> dict:
        return dict(self.params)

    def __call__(self, p) -> tuple:
        return eval_value(self, p)

    def text(self) -> str:
        return format_map(self)

    def apply_inverse(self, p) -> tuple:
        if self.inverse is None:
            raise ValueError(f"map {self.name or self.text()!r} carries no exact inverse")
        p = as_point(p)
        ar = _arith_for(p)
        with nm.guard(p):
            params = self.param_dict
            return tuple(_value(e, p, params, ar) for e in self.inverse)

    def with_name(self, name: str) -> MapDef:
        return MapDef(self.domain, self.components, self.inverse, name, self.params)


def parse_map(text: str, params: Mapping[str, object] | None = None, name: str = "",
              self_map: bool = True) -> MapDef:
    """Parse ``<kind> <q> : (<expr>, ...) [inverse (<expr>, ...)]``.

    Raises MapSyntaxError carrying the byte offset of the offending token.
    """
    params = dict(params or {})
    for key in params:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", key) or key in RESERVED or re.fullmatch(r"z\d+", key):
            raise ValueError(f"invalid parameter name {key!r}")
    parser = _Parser(text, None, params)
    domain, comps, inverse = parser.mapdef()
    if self_map and len(comps) != domain.q:
        raise MapSyntaxError(f"{domain} needs {domain.q} components, got {len(comps)}", 0)
    used = _params_used(comps + (inverse or ()))
    bound = tuple(sorted((k, params[k]) for k in used))
    return MapDef(domain, comps, inverse, name, bound)


def parse_expr(text: str, q: int | None = None, params: Mapping[str, object] | None = None) -> Expr:
    parser = _Parser(text, q, dict(params or {}))
    node = parser.expr()
    if parser.tok.kind != "end":
        parser.error("expected end of input")
    return node


def parse_point(text: str, params: Mapping[str, object] | None = None, digits: int | None = None) -> tuple:
    """Parse a constant point such as ``(i, 0)``, ``2i`` or ``(1/3, -0.5i)``."""
    parser = _Parser(text, 0, dict(params or {}))
    if parser.tok.kind == "op" and parser.tok.text == "(":
        items = list(parser.tuple_())
    else:
        items = [parser.expr()]
    if parser.tok.kind != "end":
        parser.error("expected end of input")
    ar = _MP if digits is not None else _FLOAT
    with nm.working(digits):
        return tuple(_value(e, (), dict(params or {}), ar) for e in items)


def _params_used(exprs) -> set:
    out = set()

    def walk(n):
        if isinstance(n, Param):
            out.add(n.name)
        elif isinstance(n, Neg):
            walk(n.arg)
        elif isinstance(n, BinOp):
            walk(n.left)
            walk(n.right)
        elif isinstance(n, (Pow,)):
            walk(n.base)
        elif isinstance(n, Call):
            walk(n.arg)

    for e in exprs:
        walk(e)
    return out


def format_map(m: MapDef) -> str:
    s = f"{m.domain.kind} {m.domain.q} : ({', '.join(format_expr(e) for e in m.components)})"
    if m.inverse is not None:
        s += f" inverse ({', '.join(format_expr(e) for e in m.inverse)})"
    return s


def eval_value(m: MapDef, p) -> tuple:
    p = as_point(p)
    if len(p) != m.q:
        raise ValueError(f"point has {len(p)} coordinates, map expects {m.q}")
    ar = _arith_for(p)
    with nm.guard(p):
        params = m.param_dict
        return tuple(_value(e, p, params, ar) for e in m.components)


def eval_jet(m: MapDef, p) -> JetValue:
    """Value and Jacobian of ``m`` at ``p`` by forward-mode differentiation."""
    p = as_point(p)
    if len(p) != m.q:
        raise ValueError(f"point has {len(p)} coordinates, map expects {m.q}")
    ar = _arith_for(p)
    with nm.guard(p):
        params = m.param_dict
        rows = [_jet(e, p, params, ar) for e in m.components]
    value = tuple(v for v, _ in rows)
    dtype = object if ar.mp else complex
    jac = np.array([[g for g in grad] for _, grad in rows], dtype=dtype)
    if ar.mp:
        jac = np.vectorize(mpmath.mpc, otypes=[object])(jac)
    return JetValue(value, jac)
