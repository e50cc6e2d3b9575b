"""Small arithmetic expression language for symbols.

Grammar (lowest to highest precedence)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' unary)?          # right-associative, binds tighter than unary minus
    atom   := NUMBER | NAME | NAME '(' expr (',' expr)* ')' | '(' expr ')'

Variables are ``x1..xn`` (torus point), ``xi1..xin`` (frequency) and ``r``
(Euclidean norm of the frequency).  ``pi`` is the only named constant.
Evaluation is vectorised over numpy arrays and always real-valued; complex
symbols are given as a pair of expressions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import EvalError, ParseError

FUNCTIONS = {
    "sin": 1,
    "cos": 1,
    "exp": 1,
    "log": 1,
    "abs": 1,
    "sqrt": 1,
    "pow": 2,
}
CONSTANTS = {"pi": np.pi}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))"
)


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str
    operand: object


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            start = len(text) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[start]!r}", start)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, variables):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.variables = variables

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, op):
        kind, value, pos = self.take()
        if kind != "op" or value != op:
            what = "end of input" if kind == "end" else repr(value)
            raise ParseError(f"expected {op!r}, found {what}", pos)

    def parse(self):
        node = self.expr()
        kind, value, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {value!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            node = Binary(op, node, self.unary())
        return node

    def unary(self):
        kind, value, _ = self.peek()
        if kind == "op" and value in "+-":
            self.take()
            operand = self.unary()
            return operand if value == "+" else Unary("-", operand)
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return Binary("^", base, self.unary())
        return base

    def atom(self):
        kind, value, pos = self.take()
        if kind == "num":
            return Num(float(value))
        if kind == "name":
            if self.peek()[0] == "op" and self.peek()[1] == "(":
                if value not in FUNCTIONS:
                    raise ParseError(f"unknown function {value!r}", pos)
                self.take()
                args = [self.expr()]
                while self.peek()[0] == "op" and self.peek()[1] == ",":
                    self.take()
                    args.append(self.expr())
                self.expect(")")
                if len(args) != FUNCTIONS[value]:
                    raise ParseError(
                        f"{value} takes {FUNCTIONS[value]} argument(s), got {len(args)}", pos
                    )
                return Call(value, tuple(args))
            if value in CONSTANTS:
                return Var(value)
            if value not in self.variables:
                m = re.fullmatch(r"(x|xi)(\d+)", value)
                if m:
                    raise ParseError(f"variable {value!r} exceeds dimension", pos)
                raise ParseError(f"unknown identifier {value!r}", pos)
            return Var(value)
        if kind == "op" and value == "(":
            node = self.expr()
            self.expect(")")
            return node
        what = "end of input" if kind == "end" else repr(value)
        raise ParseError(f"expected an operand, found {what}", pos)


def to_text(node):
    """Fully parenthesised rendering; re-parsing it reproduces the evaluation order."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Unary):
        return f"(-{to_text(node.operand)})"
    if isinstance(node, Binary):
        return f"({to_text(node.left)} {node.op} {to_text(node.right)})"
    return f"{node.func}({', '.join(to_text(a) for a in node.args)})"


def _free_vars(node, acc):
    if isinstance(node, Var) and node.name not in CONSTANTS:
        acc.add(node.name)
    elif isinstance(node, Unary):
        _free_vars(node.operand, acc)
    elif isinstance(node, Binary):
        _free_vars(node.left, acc)
        _free_vars(node.right, acc)
    elif isinstance(node, Call):
        for a in node.args:
            _free_vars(a, acc)
    return acc


def _bad(values):
    return not np.all(np.isfinite(values))


class SymbolExpr:
    """Parsed expression bound to a dimension.

    Call with ``x`` and ``xi`` arrays of shape ``(..., dim)``; extra named
    variables (if declared at parse time) are passed as keyword arrays.
    """

    def __init__(self, text, dim, ast, extra=()):
        self.text = text
        self.dim = dim
        self.ast = ast
        self.extra = tuple(extra)
        self.free_vars = frozenset(_free_vars(ast, set()))

    def __repr__(self):
        return f"SymbolExpr({self.text!r}, dim={self.dim})"

    def __str__(self):
        return to_text(self.ast)

    @property
    def depends_on_x(self):
        return any(re.fullmatch(r"x\d+", v) for v in self.free_vars)

    @property
    def depends_on_xi(self):
        return any(re.fullmatch(r"xi\d+|r", v) for v in self.free_vars)

    def __call__(self, x=None, xi=None, **extra):
        env = {}
        shape = ()
        if x is not None:
            x = np.asarray(x, dtype=float)
            if x.shape[-1] != self.dim:
                raise ValueError(f"x has dimension {x.shape[-1]}, expected {self.dim}")
            for k in range(self.dim):
                env[f"x{k + 1}"] = x[..., k]
            shape = x.shape[:-1]
        if xi is not None:
            xi = np.asarray(xi, dtype=float)
            if xi.shape[-1] != self.dim:
                raise ValueError(f"xi has dimension {xi.shape[-1]}, expected {self.dim}")
            for k in range(self.dim):
                env[f"xi{k + 1}"] = xi[..., k]
            env["r"] = np.sqrt(np.sum(xi * xi, axis=-1))
            shape = np.broadcast_shapes(shape, xi.shape[:-1])
        for name, value in extra.items():
            env[name] = np.asarray(value, dtype=float)
            shape = np.broadcast_shapes(shape, env[name].shape)
        missing = self.free_vars - env.keys()
        if missing:
            raise ValueError(f"no value supplied for {sorted(missing)}")
        with np.errstate(all="ignore"):
            out = self._eval(self.ast, env)
        return np.broadcast_to(np.asarray(out, dtype=float), shape).copy() if shape else float(out)

    def _eval(self, node, env):
        if isinstance(node, Num):
            return node.value
        if isinstance(node, Var):
            return CONSTANTS[node.name] if node.name in CONSTANTS else env[node.name]
        if isinstance(node, Unary):
            return -self._eval(node.operand, env)
        if isinstance(node, Binary):
            a = self._eval(node.left, env)
            b = self._eval(node.right, env)
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            if node.op == "/":
                if np.any(np.asarray(b) == 0):
                    raise EvalError("division by zero", to_text(node))
                return a / b
            out = np.power(a, b)
            if _bad(out):
                raise EvalError("invalid power", to_text(node))
            return out
        args = [self._eval(a, env) for a in node.args]
        f = node.func
        if f == "log":
            if np.any(np.asarray(args[0]) <= 0):
                raise EvalError("log of non-positive value", to_text(node))
            return np.log(args[0])
        if f == "sqrt":
            if np.any(np.asarray(args[0]) < 0):
                raise EvalError("sqrt of negative value", to_text(node))
            return np.sqrt(args[0])
        if f == "pow":
            out = np.power(args[0], args[1])
            if _bad(out):
                raise EvalError("invalid power", to_text(node))
            return out
        return {"sin": np.sin, "cos": np.cos, "exp": np.exp, "abs": np.abs}[f](args[0])


def parse(text: str, dim: int, extra=()) -> SymbolExpr:
    """Parse ``text`` into an expression over ``dim`` torus/frequency variables."""
    if not text or not text.strip():
        raise ParseError("empty expression", 0)
    if dim < 1:
        raise ValueError("dim must be positive")
    variables = {f"x{k}" for k in range(1, dim + 1)}
    variables |= {f"xi{k}" for k in range(1, dim + 1)}
    variables |= {"r", *extra}
    ast = _Parser(text, variables).parse()
    return SymbolExpr(text, dim, ast, extra)


def evaluate(expr: SymbolExpr, x, xi, **extra) -> complex:
    """Evaluate at a single point ``(x, xi)``."""
    return complex(expr(x, xi, **extra))
