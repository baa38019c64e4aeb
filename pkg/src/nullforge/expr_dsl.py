"""Scalar expressions in one real variable ``x``.

Expressions are immutable, hash-consed trees: building the same node twice
returns the same object, so derivatives of derivatives share structure and
evaluation cost tracks the size of the underlying DAG rather than the
(exponentially larger) tree.  Each node caches its first derivative and its
compiled evaluators.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := '-' factor | atom ('^' intlit)?
    atom   := number | 'x' | func '(' expr ')' | '(' expr ')'
    func   := 'exp' | 'sin' | 'cos'
"""
from __future__ import annotations

import math
import re
import threading
import weakref
from numbers import Real

import numpy as np

from .errors import EvaluationDomainError, ParseError, UnknownIdentifierError

__all__ = [
    "ScalarFn", "Const", "Var", "Neg", "Add", "Sub", "Mul", "Div", "Pow",
    "Exp", "Sin", "Cos", "X", "parse", "differentiate", "derivative",
    "evaluate", "simplify", "as_fn", "const", "exp", "sin", "cos",
    "dag_size",
]

_INTERN: "weakref.WeakValueDictionary" = weakref.WeakValueDictionary()
_INTERN_LOCK = threading.Lock()


class ScalarFn:
    """Base class of expression nodes.

    Subclass constructors are *raw*: they build exactly the node asked for.
    The arithmetic operators and the lower-case helpers (``exp``, ``const``,
    ...) fold constants and drop multiplications by 0 and 1.
    """

    __slots__ = ("args", "_deriv", "_math_fn", "_np_fn", "__weakref__")
    precedence = 5

    def __new__(cls, *args):
        args = cls._normalize(args)
        key = (cls, tuple(id(a) if isinstance(a, ScalarFn) else a for a in args))
        with _INTERN_LOCK:
            node = _INTERN.get(key)
            if node is None:
                node = object.__new__(cls)
                node.args = args
                node._deriv = None
                node._math_fn = None
                node._np_fn = None
                _INTERN[key] = node
        return node

    @classmethod
    def _normalize(cls, args):
        return tuple(_wrap(a) for a in args)

    @property
    def children(self):
        return tuple(a for a in self.args if isinstance(a, ScalarFn))

    # -- calculus -----------------------------------------------------------
    def diff(self) -> ScalarFn:
        d = self._deriv
        if d is None:
            # children first, so _derive only ever meets cached derivatives
            for node in _toposort(self, skip=lambda n: n._deriv is not None):
                node._deriv = node._derive()
            d = self._deriv
        return d

    def _derive(self) -> ScalarFn:
        raise NotImplementedError

    # -- evaluation ---------------------------------------------------------
    def __call__(self, xi):
        return evaluate(self, xi)

    # -- operators ----------------------------------------------------------
    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, n):
        return power(self, n)

    # -- printing -----------------------------------------------------------
    def __repr__(self):
        out = {}
        for node in _toposort(self):
            out[id(node)] = node._repr_with(out)
        return out[id(self)]

    def _repr_with(self, done):
        inner = ", ".join(done[id(a)] if isinstance(a, ScalarFn) else repr(a) for a in self.args)
        return "%s(%s)" % (type(self).__name__, inner)

    def __str__(self):
        return _to_source(self)


class Const(ScalarFn):
    __slots__ = ()

    @classmethod
    def _normalize(cls, args):
        (value,) = args
        value = float(value)
        if not math.isfinite(value):
            raise ValueError("constant must be finite, got %r" % value)
        return (value,)

    @property
    def value(self) -> float:
        return self.args[0]

    def _derive(self):
        return ZERO

    def _repr_with(self, done):
        return repr(self.value)


class Var(ScalarFn):
    __slots__ = ()

    @classmethod
    def _normalize(cls, args):
        if args:
            raise TypeError("Var takes no arguments")
        return ()

    def _derive(self):
        return ONE

    def _repr_with(self, done):
        return "x"


class Neg(ScalarFn):
    __slots__ = ()
    precedence = 3

    def _derive(self):
        return neg(self.args[0].diff())


class Add(ScalarFn):
    __slots__ = ()
    precedence = 1

    def _derive(self):
        a, b = self.args
        return add(a.diff(), b.diff())


class Sub(ScalarFn):
    __slots__ = ()
    precedence = 1

    def _derive(self):
        a, b = self.args
        return sub(a.diff(), b.diff())


class Mul(ScalarFn):
    __slots__ = ()
    precedence = 2

    def _derive(self):
        a, b = self.args
        return add(mul(a.diff(), b), mul(a, b.diff()))


class Div(ScalarFn):
    __slots__ = ()
    precedence = 2

    def _derive(self):
        a, b = self.args
        return div(sub(mul(a.diff(), b), mul(a, b.diff())), power(b, 2))


class Pow(ScalarFn):
    """``base ** n`` for an integer ``n``."""

    __slots__ = ()
    precedence = 4

    @classmethod
    def _normalize(cls, args):
        base, n = args
        if isinstance(n, float) and n.is_integer():
            n = int(n)
        if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
            raise TypeError("exponent must be an integer, got %r" % (n,))
        return (_wrap(base), int(n))

    def _derive(self):
        base, n = self.args
        return mul(mul(const(n), power(base, n - 1)), base.diff())


class Exp(ScalarFn):
    __slots__ = ()

    def _derive(self):
        return mul(self, self.args[0].diff())


class Sin(ScalarFn):
    __slots__ = ()

    def _derive(self):
        a = self.args[0]
        return mul(cos(a), a.diff())


class Cos(ScalarFn):
    __slots__ = ()

    def _derive(self):
        a = self.args[0]
        return neg(mul(sin(a), a.diff()))


def _wrap(value) -> ScalarFn:
    if isinstance(value, ScalarFn):
        return value
    if isinstance(value, Real) and not isinstance(value, bool):
        return Const(value)
    raise TypeError("cannot use %r as an expression" % (value,))


X = Var()
ZERO = Const(0.0)
ONE = Const(1.0)

_FUNCS = {"exp": Exp, "sin": Sin, "cos": Cos}


# -- folding constructors ----------------------------------------------------

def _cval(f):
    return f.value if isinstance(f, Const) else None


def const(value) -> Const:
    return Const(value)


def add(a, b) -> ScalarFn:
    a, b = _wrap(a), _wrap(b)
    ca, cb = _cval(a), _cval(b)
    if ca is not None and cb is not None:
        return Const(ca + cb)
    if ca == 0.0:
        return b
    if cb == 0.0:
        return a
    return Add(a, b)


def sub(a, b) -> ScalarFn:
    a, b = _wrap(a), _wrap(b)
    ca, cb = _cval(a), _cval(b)
    if ca is not None and cb is not None:
        return Const(ca - cb)
    if cb == 0.0:
        return a
    if ca == 0.0:
        return neg(b)
    return Sub(a, b)


def mul(a, b) -> ScalarFn:
    a, b = _wrap(a), _wrap(b)
    ca, cb = _cval(a), _cval(b)
    if ca is not None and cb is not None:
        return Const(ca * cb)
    if ca == 0.0 or cb == 0.0:
        return ZERO
    if ca == 1.0:
        return b
    if cb == 1.0:
        return a
    if ca == -1.0:
        return neg(b)
    if cb == -1.0:
        return neg(a)
    return Mul(a, b)


def div(a, b) -> ScalarFn:
    a, b = _wrap(a), _wrap(b)
    ca, cb = _cval(a), _cval(b)
    if ca is not None and cb is not None and cb != 0.0:
        return Const(ca / cb)
    if ca == 0.0:
        return ZERO
    if cb == 1.0:
        return a
    return Div(a, b)


def neg(a) -> ScalarFn:
    a = _wrap(a)
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.args[0]
    return Neg(a)


def power(a, n: int) -> ScalarFn:
    a = _wrap(a)
    if n == 0:
        return ONE
    if n == 1:
        return a
    if isinstance(a, Const):
        try:
            v = a.value ** n
        except (OverflowError, ZeroDivisionError):
            return Pow(a, n)
        if math.isfinite(v):
            return Const(v)
    return Pow(a, n)


def _fold_unary(cls, fn, a):
    a = _wrap(a)
    if isinstance(a, Const):
        try:
            v = fn(a.value)
        except OverflowError:
            return cls(a)
        return Const(v)
    return cls(a)


def exp(a) -> ScalarFn:
    return _fold_unary(Exp, math.exp, a)


def sin(a) -> ScalarFn:
    return _fold_unary(Sin, math.sin, a)


def cos(a) -> ScalarFn:
    return _fold_unary(Cos, math.cos, a)


def as_fn(value) -> ScalarFn:
    """Coerce DSL source, a real number or an expression to a ScalarFn."""
    if isinstance(value, str):
        return parse(value)
    return _wrap(value)


# -- graph utilities -----------------------------------------------------------

def _toposort(root: ScalarFn, skip=None) -> list:
    """Nodes reachable from ``root``, children before parents.

    Nodes for which ``skip(node)`` is true are left out along with
    everything only reachable through them.
    """
    order, seen = [], set()
    stack = [(root, False)]
    while stack:
        node, done = stack.pop()
        if done:
            order.append(node)
            continue
        if id(node) in seen or (skip is not None and skip(node)):
            continue
        seen.add(id(node))
        stack.append((node, True))
        for child in node.children:
            if id(child) not in seen:
                stack.append((child, False))
    return order


def dag_size(f: ScalarFn) -> int:
    """Number of distinct nodes reachable from ``f``."""
    return len(_toposort(f))


_SIMPLIFIERS = {
    Neg: neg, Add: add, Sub: sub, Mul: mul, Div: div, Exp: exp, Sin: sin, Cos: cos,
}


def simplify(f: ScalarFn) -> ScalarFn:
    """Rebuild ``f`` bottom-up through the folding constructors."""
    new = {}
    for node in _toposort(f):
        if isinstance(node, (Const, Var)):
            new[id(node)] = node
        elif isinstance(node, Pow):
            new[id(node)] = power(new[id(node.args[0])], node.args[1])
        else:
            new[id(node)] = _SIMPLIFIERS[type(node)](*(new[id(c)] for c in node.args))
    return new[id(f)]


def differentiate(f: ScalarFn) -> ScalarFn:
    return f.diff()


def derivative(f: ScalarFn, order: int = 1) -> ScalarFn:
    for _ in range(order):
        f = f.diff()
    return f


# -- evaluation ------------------------------------------------------------------

_BINOPS = {Add: "+", Sub: "-", Mul: "*", Div: "/"}


def _compile(f: ScalarFn, lib) -> callable:
    names = {}
    lines = ["def _f(x):"]
    for i, node in enumerate(_toposort(f)):
        if isinstance(node, Const):
            names[id(node)] = repr(node.value)
            continue
        if isinstance(node, Var):
            names[id(node)] = "x"
            continue
        name = "t%d" % i
        args = [names[id(c)] for c in node.children]
        if isinstance(node, Neg):
            rhs = "-%s" % args[0]
        elif isinstance(node, Pow):
            rhs = "%s ** %d" % (args[0], node.args[1])
        elif type(node) in _BINOPS:
            rhs = "%s %s %s" % (args[0], _BINOPS[type(node)], args[1])
        else:
            rhs = "%s(%s)" % (type(node).__name__.lower(), args[0])
        lines.append("    %s = %s" % (name, rhs))
        names[id(node)] = name
    lines.append("    return %s" % names[id(f)])
    namespace = {"exp": lib.exp, "sin": lib.sin, "cos": lib.cos}
    exec(compile("\n".join(lines), "<scalarfn>", "exec"), namespace)
    return namespace["_f"]


def evaluate(f: ScalarFn, xi):
    """Evaluate ``f`` at a real number or elementwise over an array.

    Raises EvaluationDomainError on division by zero, overflow or any other
    non-finite result.
    """
    if isinstance(xi, (float, int, np.integer)) and not isinstance(xi, bool):
        fn = f._math_fn
        if fn is None:
            fn = f._math_fn = _compile(f, math)
        try:
            value = float(fn(float(xi)))
        except (ZeroDivisionError, OverflowError, ValueError) as exc:
            raise EvaluationDomainError("%s at x=%r: %s" % (f, xi, exc)) from None
        if not math.isfinite(value):
            raise EvaluationDomainError("%s is not finite at x=%r" % (f, xi))
        return value
    arr = np.asarray(xi, dtype=float)
    fn = f._np_fn
    if fn is None:
        fn = f._np_fn = _compile(f, np)
    with np.errstate(all="ignore"):
        out = np.broadcast_to(np.asarray(fn(arr), dtype=float), arr.shape).copy()
    if not np.all(np.isfinite(out)):
        bad = arr[~np.isfinite(out)] if arr.ndim else arr
        raise EvaluationDomainError("%s is not finite at x=%r" % (f, np.ravel(bad)[0]))
    return out


# -- printing ----------------------------------------------------------------

def _to_source(f: ScalarFn) -> str:
    out = {}
    for node in _toposort(f):
        out[id(node)] = _format(node, out)
    return out[id(f)][0]


def _format(node, done):
    """Return (text, precedence) for ``node`` given its formatted children."""
    def child(c, min_prec, strict=False):
        text, prec = done[id(c)]
        if prec < min_prec or (strict and prec == min_prec):
            return "(%s)" % text
        return text

    if isinstance(node, Const):
        if node.value < 0 or math.copysign(1.0, node.value) < 0:
            return "(%r)" % node.value, 5
        return repr(node.value), 5
    if isinstance(node, Var):
        return "x", 5
    if isinstance(node, Neg):
        return "-" + child(node.args[0], 3), 3
    if isinstance(node, Pow):
        base, n = node.args
        if n < 0:
            return "(1 / %s^%d)" % (child(base, 5), -n), 5
        return "%s^%d" % (child(base, 5), n), 4
    if type(node) in _BINOPS:
        a, b = node.args
        prec = node.precedence
        return "%s %s %s" % (child(a, prec), _BINOPS[type(node)], child(b, prec, strict=True)), prec
    return "%s(%s)" % (type(node).__name__.lower(), done[id(node.args[0])][0]), 5


# -- parsing -------------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<id>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
)
_ATOM_START = frozenset({"number", "'x'", "'exp'", "'sin'", "'cos'", "'('"})
_FACTOR_START = _ATOM_START | {"'-'"}
_AFTER_ATOM = frozenset({"'^'", "'*'", "'/'", "'+'", "'-'"})


MAX_NESTING = 150


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = []
        pos = 0
        while True:
            while pos < len(source) and source[pos].isspace():
                pos += 1
            if pos >= len(source):
                break
            m = _TOKEN.match(source, pos)
            if m is None:
                raise ParseError("unexpected character %r" % source[pos], self._byte(pos))
            self.tokens.append((m.lastgroup, m.group(), self._byte(pos)))
            pos = m.end()
        self.tokens.append(("end", "", self._byte(len(source))))
        self.i = 0
        self.depth = 0

    def _byte(self, char_index):
        return len(self.source[:char_index].encode("utf-8"))

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected):
        kind, text, offset = self.peek()
        found = "end of input" if kind == "end" else repr(text)
        raise ParseError("unexpected %s" % found, offset, expected)

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            self.fail(_AFTER_ATOM | {"end of input"})
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.advance()[1]
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self):
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.advance()[1]
            rhs = self.factor()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def factor(self):
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            self.nest()
            node = Neg(self.factor())
            self.depth -= 1
            return node
        node = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.advance()
            kind, text, _ = self.peek()
            if kind != "num" or not text.isdigit():
                self.fail({"integer literal"})
            self.advance()
            node = Pow(node, int(text))
        return node

    def atom(self):
        kind, text, offset = self.peek()
        if kind == "num":
            self.advance()
            return Const(float(text))
        if kind == "id":
            if text == "x":
                self.advance()
                return X
            if text in _FUNCS:
                self.advance()
                self.expect("(")
                self.nest()
                arg = self.expr()
                self.expect(")")
                self.depth -= 1
                return _FUNCS[text](arg)
            raise UnknownIdentifierError("unknown identifier %r" % text, offset)
        if kind == "op" and text == "(":
            self.advance()
            self.nest()
            node = self.expr()
            self.expect(")")
            self.depth -= 1
            return node
        self.fail(_FACTOR_START)

    def nest(self):
        self.depth += 1
        if self.depth > MAX_NESTING:
            raise ParseError("expression nested deeper than %d levels" % MAX_NESTING, self.peek()[2])

    def expect(self, op):
        if self.peek()[:2] != ("op", op):
            self.fail({"'%s'" % op})
        self.advance()


def parse(source: str) -> ScalarFn:
    """Parse DSL source into an expression tree (no folding applied)."""
    return _Parser(source).parse()
