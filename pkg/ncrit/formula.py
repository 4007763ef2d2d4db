"""Noncommutative rational formulas: AST, parser, printer, measures and evaluation."""

import logging
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from ncrit import linalg
from ncrit.exceptions import FormulaSyntaxError, SingularMatrixError
from ncrit.fields import QQ, field_of

logger = logging.getLogger(__name__)


class Formula:
    """Base class of formula nodes. Nodes are frozen dataclasses compared structurally."""

    @cached_property
    def size(self) -> int:
        return 1 + sum(child.size for child in self.children())

    @cached_property
    def height(self) -> int:
        inner = max((child.height for child in self.children()), default=0)
        return inner + 1 if isinstance(self, Inv) else inner

    @cached_property
    def variable_count(self) -> int:
        if isinstance(self, Var):
            return self.index
        return max((child.variable_count for child in self.children()), default=0)

    def children(self) -> Tuple["Formula", ...]:
        return ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, eq=True)
class Var(Formula):
    index: int


@dataclass(frozen=True, eq=True)
class Const(Formula):
    value: Fraction


@dataclass(frozen=True, eq=True)
class Add(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=True)
class Mul(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=True)
class Inv(Formula):
    child: Formula

    def children(self):
        return (self.child,)


def sub(left: Formula, right: Formula) -> Formula:
    return Add(left, Mul(Const(Fraction(-1)), right))


# -- parsing ---------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<inv>inv\b)|(?P<var>x\w*)|(?P<num>\d+(?:/\d+)?)|(?P<op>[-+*()])|(?P<bad>\S))")


class _Token(NamedTuple):
    kind: str
    text: str
    position: int


def _tokenize(text: str) -> List[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            break
        kind = match.lastgroup
        value = match.group(kind)
        start = match.start(kind)
        if kind == "bad":
            raise FormulaSyntaxError(f"unexpected character {value!r}", start)
        if kind == "var":
            digits = value[1:]
            if not digits.isdigit():
                raise FormulaSyntaxError(f"variable {value!r} must be x followed by digits", start)
            if int(digits) == 0:
                raise FormulaSyntaxError("variable indices start at 1", start)
        tokens.append(_Token(kind, value, start))
        pos = match.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def expect(self, text: str) -> None:
        token = self.current
        if token.text != text:
            found = repr(token.text) if token.kind != "end" else "end of input"
            raise FormulaSyntaxError(f"expected {text!r}, found {found}", token.position)
        self.advance()

    def formula(self) -> Formula:
        node = self.term()
        while self.current.text in ("+", "-"):
            op = self.advance().text
            right = self.term()
            node = Add(node, right) if op == "+" else sub(node, right)
        return node

    def term(self) -> Formula:
        node = self.factor()
        while self.current.text == "*":
            self.advance()
            node = Mul(node, self.factor())
        return node

    def factor(self) -> Formula:
        token = self.current
        if token.kind == "inv":
            self.advance()
            self.expect("(")
            inner = self.formula()
            self.expect(")")
            return Inv(inner)
        if token.text == "(":
            self.advance()
            inner = self.formula()
            self.expect(")")
            return inner
        if token.kind == "var":
            self.advance()
            return Var(int(token.text[1:]))
        if token.kind == "num":
            self.advance()
            return Const(_rational(token))
        if token.text == "-" and self.tokens[self.pos + 1].kind == "num":
            self.advance()
            return Const(-_rational(self.advance()))
        found = repr(token.text) if token.kind != "end" else "end of input"
        raise FormulaSyntaxError(f"expected a variable, constant, inv( or (, found {found}", token.position)


def _rational(token: _Token) -> Fraction:
    if "/" in token.text and int(token.text.split("/")[1]) == 0:
        raise FormulaSyntaxError("zero denominator", token.position)
    return Fraction(token.text)


def parse(text: str) -> Formula:
    parser = _Parser(text)
    node = parser.formula()
    if parser.current.kind != "end":
        token = parser.current
        raise FormulaSyntaxError(f"unexpected {token.text!r}", token.position)
    return node


def parse_lines(text: str) -> List[Formula]:
    return [parse(line) for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]


# -- printing --------------------------------------------------------------


def _const_text(value: Fraction) -> str:
    return str(value)


def _is_negation(node: Formula) -> bool:
    return isinstance(node, Mul) and isinstance(node.left, Const) and node.left.value == -1


def to_text(f: Formula) -> str:
    return _formula_text(f)


def _formula_text(f: Formula) -> str:
    if isinstance(f, Add):
        left = _formula_text(f.left)
        if _is_negation(f.right):
            return f"{left} - {_term_text(f.right.right)}"
        return f"{left} + {_term_text(f.right)}"
    return _term_text(f)


def _term_text(f: Formula) -> str:
    if isinstance(f, Add):
        return f"({_formula_text(f)})"
    if isinstance(f, Mul):
        return f"{_term_text(f.left)}*{_factor_text(f.right)}"
    return _factor_text(f)


def _factor_text(f: Formula) -> str:
    if isinstance(f, Var):
        return f"x{f.index}"
    if isinstance(f, Const):
        return _const_text(f.value)
    if isinstance(f, Inv):
        return f"inv({_formula_text(f.child)})"
    return f"({_formula_text(f)})"


# -- measures and evaluation -----------------------------------------------


def measures(f: Formula) -> Tuple[int, int, int]:
    return f.size, f.height, f.variable_count


@dataclass(frozen=True)
class NotDefined:
    """Evaluation hit a singular inverse-gate argument; ``path`` locates that gate."""

    path: str

    def __bool__(self) -> bool:
        return False


EvalResult = Union[np.ndarray, NotDefined]


class _Undefined(Exception):
    def __init__(self, path: Tuple[str, ...]):
        super().__init__("/".join(path))
        self.path = path


def evaluate(f: Formula, point: Sequence[np.ndarray], dim: Optional[int] = None, field=None) -> EvalResult:
    """Evaluate f bottom-up at a tuple of square matrices; constants embed as c*I."""
    if point:
        dim = point[0].shape[0] if dim is None else dim
        field = field_of(point[0].flat[0]) if field is None else field
        for p in point:
            if p.shape != (dim, dim):
                raise ValueError(f"all point matrices must be {dim}x{dim}, got {p.shape}")
    if dim is None:
        raise ValueError("dim is required when the point is empty")
    field = QQ if field is None else field
    if f.variable_count > len(point):
        raise ValueError(f"formula uses x{f.variable_count} but the point has {len(point)} matrices")
    identity = linalg.identity(dim, field)
    try:
        return _eval(f, point, identity, ())
    except _Undefined as exc:
        return NotDefined("/".join(exc.path))


def _eval(f: Formula, point, identity: np.ndarray, path: Tuple[str, ...]) -> np.ndarray:
    if isinstance(f, Var):
        return point[f.index - 1]
    if isinstance(f, Const):
        return identity * f.value
    if isinstance(f, Add):
        return _eval(f.left, point, identity, path + ("add[0]",)) + _eval(f.right, point, identity, path + ("add[1]",))
    if isinstance(f, Mul):
        left = _eval(f.left, point, identity, path + ("mul[0]",))
        return left @ _eval(f.right, point, identity, path + ("mul[1]",))
    if isinstance(f, Inv):
        here = path + ("inv",)
        inner = _eval(f.child, point, identity, here)
        try:
            return linalg.inverse(inner)
        except SingularMatrixError:
            raise _Undefined(here) from None
    raise TypeError(f"unknown formula node {f!r}")


def is_nonzero_value(result: EvalResult) -> bool:
    return not isinstance(result, NotDefined) and not linalg.is_zero_matrix(result)


# -- truncated power series in one parameter -------------------------------


def _series_mul(a: List[np.ndarray], b: List[np.ndarray], order: int) -> List[np.ndarray]:
    out = []
    for k in range(order + 1):
        term = a[0] @ b[k]
        for i in range(1, k + 1):
            term = term + a[i] @ b[k - i]
        out.append(term)
    return out


def _series_inverse(a: List[np.ndarray], order: int) -> List[np.ndarray]:
    head = linalg.inverse(a[0])
    out = [head]
    for k in range(1, order + 1):
        acc = a[1] @ out[k - 1]
        for i in range(2, k + 1):
            acc = acc + a[i] @ out[k - i]
        out.append(-(head @ acc))
    return out


def taylor_coefficients(
    f: Formula, base: Sequence[np.ndarray], direction: Sequence[np.ndarray], order: int
) -> Union[List[np.ndarray], NotDefined]:
    """Coefficients of eps^0..eps^order of f(base + eps*direction), computed exactly.

    Arithmetic runs over matrices with entries in the truncated series ring; an inverse
    gate needs its eps^0 coefficient invertible, otherwise the result is NotDefined.
    """
    dim = base[0].shape[0]
    field = field_of(base[0].flat[0])
    zero = linalg.zeros(dim, dim, field)
    identity = linalg.identity(dim, field)

    def walk(node: Formula, path: Tuple[str, ...]) -> List[np.ndarray]:
        if isinstance(node, Var):
            series = [base[node.index - 1], direction[node.index - 1]] + [zero] * order
            return series[: order + 1]
        if isinstance(node, Const):
            return [identity * node.value] + [zero] * order
        if isinstance(node, Add):
            left = walk(node.left, path + ("add[0]",))
            right = walk(node.right, path + ("add[1]",))
            return [x + y for x, y in zip(left, right)]
        if isinstance(node, Mul):
            return _series_mul(walk(node.left, path + ("mul[0]",)), walk(node.right, path + ("mul[1]",)), order)
        if isinstance(node, Inv):
            here = path + ("inv",)
            inner = walk(node.child, here)
            try:
                return _series_inverse(inner, order)
            except SingularMatrixError:
                raise _Undefined(here) from None
        raise TypeError(f"unknown formula node {node!r}")

    try:
        return walk(f, ())
    except _Undefined as exc:
        return NotDefined("/".join(exc.path))


# -- corpus and random formulas --------------------------------------------


class CorpusEntry(NamedTuple):
    name: str
    formula: Formula
    expected: str


_CORPUS = (
    ("x1", "x1", "nonzero"),
    ("inv-cancel", "inv(x1)*x1 - 1", "identity"),
    ("comm", "x1*x2 - x2*x1", "nonzero"),
    ("comm-inv", "inv(x1*x2 - x2*x1)", "nonzero"),
    ("hua", "inv(x1 + x1*inv(x2)*x1) + inv(x1+x2) - inv(x1)", "identity"),
    ("nested-inv", "inv(x3 + x1*inv(x2)*x1) - inv(x3)", "nonzero"),
    ("inv-inv", "inv(inv(x1)) - x1", "identity"),
)


def corpus() -> List[CorpusEntry]:
    return [CorpusEntry(name, parse(text), expected) for name, text, expected in _CORPUS]


def corpus_entry(name: str) -> CorpusEntry:
    for entry in corpus():
        if entry.name == name:
            return entry
    raise KeyError(name)


def random_formula(rng: random.Random, n: int, size: int, max_height: int = 2) -> Formula:
    """A random formula over x1..xn with height <= max_height and at most ``size`` nodes.

    The size is exact except where a two-node budget meets height 0; no inverse fits there, so
    it becomes a single leaf.
    """
    if size < 1:
        raise ValueError("size must be positive")

    def build(budget: int, height_left: int) -> Formula:
        if budget == 1:
            if rng.random() < 0.8:
                return Var(rng.randint(1, n))
            return Const(Fraction(rng.choice([-2, -1, 1, 2, 3])))
        choices = []
        if budget >= 3:
            choices += ["add", "mul"]
        if height_left > 0:
            choices.append("inv")
        if not choices:
            return build(1, height_left)
        kind = rng.choice(choices)
        if kind == "inv":
            return Inv(build(budget - 1, height_left - 1))
        left_budget = rng.randint(1, budget - 2)
        left = build(left_budget, height_left)
        right = build(budget - 1 - left_budget, height_left)
        return Add(left, right) if kind == "add" else Mul(left, right)

    return build(size, max_height)


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    for child in f.children():
        yield from subformulas(child)
