"""Model description files: expression language, parsing, validation.

A model file is an INI document declaring a spacetime kind (galilei or
einstein), metric components, an optional electromagnetic potential, the
physical constants with dimension tags, free parameters, a chart box, and
optionally a closed gravitational 2-form.  Component entries are written in
a small expression language over the chart coordinates x0..x3::

    A2 = B/2 * x1
    g11 = 1 / (1 + k*x1^2)

Expressions compile to `ExprField`s, which differentiate symbolically and
therefore never run out of derivative order.  Loading validates the model
at low-discrepancy sample points inside the declared box; failures raise
`ValidationError` carrying a witness point.
"""

import configparser
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import qmc

from .dims import CANONICAL_CONSTANT_DIMS, DimScalar, parse_dimension
from .smooth import BoxedField, ConstField, Field, Jet, PForm, _jet_of

SAMPLE_COUNT = 49  # validation points per model

FUNCTIONS = ("sin", "cos", "exp", "sqrt", "abs")


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__("%s (offset %d)" % (message, offset))
        self.offset = offset


class ValidationError(Exception):
    """Model failed a validation check; `witness` is the offending point."""

    def __init__(self, message: str, witness=None):
        if witness is not None:
            message = "%s at witness point %s" % (message, list(witness))
        super().__init__(message)
        self.witness = witness


# ---------------------------------------------------------------------------
# Expression AST


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 0..3, the chart coordinate


@dataclass(frozen=True)
class Name:
    ident: str  # a model parameter or constant reference


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: Fraction


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = object


# ---------------------------------------------------------------------------
# Tokenizer and parser

_TOKEN_RE = re.compile(
    r"(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
    r"|(?P<ws>\s+)")


def tokenize(text: str) -> List[Tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError("unexpected character %r" % text[pos], pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.k = 0

    def peek(self):
        return self.toks[self.k] if self.k < len(self.toks) else (None, "", len(self.text))

    def take(self):
        tok = self.peek()
        self.k += 1
        return tok

    def expect_op(self, op):
        kind, text, off = self.take()
        if kind != "op" or text != op:
            raise ParseError("expected %r, found %r" % (op, text or "end of input"), off)

    def parse(self):
        node = self.expr()
        kind, text, off = self.peek()
        if kind is not None:
            raise ParseError("trailing input %r" % text, off)
        return node

    def expr(self):
        node = self.term()
        while True:
            kind, text, off = self.peek()
            if kind == "op" and text in "+-":
                self.take()
                node = BinOp(text, node, self.term())
            else:
                return node

    def term(self):
        node = self.unary()
        while True:
            kind, text, off = self.peek()
            if kind == "op" and text in "*/":
                self.take()
                node = BinOp(text, node, self.unary())
            else:
                return node

    def unary(self):
        kind, text, off = self.peek()
        if kind == "op" and text == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        node = self.atom()
        kind, text, off = self.peek()
        if kind == "op" and text == "^":
            self.take()
            node = Pow(node, self.exponent())
        return node

    def exponent(self) -> Fraction:
        kind, text, off = self.peek()
        if kind == "op" and text == "(":
            self.take()
            val = self.signed_rational()
            self.expect_op(")")
            return val
        return self.signed_rational()

    def signed_rational(self) -> Fraction:
        sign = 1
        kind, text, off = self.peek()
        if kind == "op" and text == "-":
            self.take()
            sign = -1
        kind, text, off = self.take()
        if kind != "num" or "." in text or "e" in text or "E" in text:
            raise ParseError("exponent must be an integer or integer ratio", off)
        num = int(text)
        kind, text, _ = self.peek()
        if kind == "op" and text == "/":
            self.take()
            kind, text, off = self.take()
            if kind != "num" or "." in text:
                raise ParseError("exponent denominator must be an integer", off)
            return Fraction(sign * num, int(text))
        return Fraction(sign * num)

    def atom(self):
        kind, text, off = self.take()
        if kind == "num":
            return Num(float(text))
        if kind == "name":
            if re.fullmatch(r"x[0-9]", text):
                return Var(int(text[1]))
            if text in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(text, arg)
            return Name(text)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ParseError("expected a value, found %r" % (text or "end of input"), off)


def parse_expr(text: str):
    return _Parser(text).parse()


def variables(node) -> set:
    """The set of coordinate indices an expression depends on."""
    match node:
        case Num() | Name():
            return set()
        case Var(index=i):
            return {i}
        case Neg(arg=a) | Call(arg=a) | Pow(base=a):
            return variables(a)
        case BinOp(left=a, right=b):
            return variables(a) | variables(b)
    raise TypeError("not an expression node: %r" % (node,))


# ---------------------------------------------------------------------------
# Printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def to_text(node, prec: int = 0) -> str:
    match node:
        case Num(value=v):
            return repr(v) if v >= 0 else "(%s)" % repr(v)
        case Var(index=i):
            return "x%d" % i
        case Name(ident=s):
            return s
        case Neg(arg=a):
            s = "-" + to_text(a, 3)
            return "(%s)" % s if prec > 2 else s
        case BinOp(op=o, left=a, right=b):
            p = _PREC[o]
            s = "%s %s %s" % (to_text(a, p), o, to_text(b, p + 1))
            return "(%s)" % s if prec > p else s
        case Pow(base=b, exponent=e):
            if e.denominator == 1 and e >= 0:
                etxt = str(e.numerator)
            else:
                etxt = "(%d/%d)" % (e.numerator, e.denominator) \
                    if e.denominator != 1 else "(%d)" % e.numerator
            return "%s^%s" % (to_text(b, 4), etxt)
        case Call(func=f, arg=a):
            return "%s(%s)" % (f, to_text(a, 0))
    raise TypeError("not an expression node: %r" % (node,))


# ---------------------------------------------------------------------------
# Symbolic differentiation (with light constant folding)


def _is_num(node, v=None):
    return isinstance(node, Num) and (v is None or node.value == v)


def _add(a, b):
    if _is_num(a, 0.0):
        return b
    if _is_num(b, 0.0):
        return a
    return BinOp("+", a, b)


def _sub(a, b):
    if _is_num(b, 0.0):
        return a
    if _is_num(a, 0.0):
        return Neg(b)
    return BinOp("-", a, b)


def _mul(a, b):
    if _is_num(a, 0.0) or _is_num(b, 0.0):
        return Num(0.0)
    if _is_num(a, 1.0):
        return b
    if _is_num(b, 1.0):
        return a
    return BinOp("*", a, b)


def _div(a, b):
    if _is_num(a, 0.0):
        return Num(0.0)
    if _is_num(b, 1.0):
        return a
    return BinOp("/", a, b)


def _pow(base, e: Fraction):
    if e == 0:
        return Num(1.0)
    if e == 1:
        return base
    return Pow(base, e)


def derivative(node, i: int):
    """Exact partial derivative of an expression with respect to x_i."""
    match node:
        case Num() | Name():
            return Num(0.0)
        case Var(index=k):
            return Num(1.0 if k == i else 0.0)
        case Neg(arg=a):
            d = derivative(a, i)
            return Num(0.0) if _is_num(d, 0.0) else Neg(d)
        case BinOp(op="+", left=a, right=b):
            return _add(derivative(a, i), derivative(b, i))
        case BinOp(op="-", left=a, right=b):
            return _sub(derivative(a, i), derivative(b, i))
        case BinOp(op="*", left=a, right=b):
            return _add(_mul(derivative(a, i), b), _mul(a, derivative(b, i)))
        case BinOp(op="/", left=a, right=b):
            top = _sub(_mul(derivative(a, i), b), _mul(a, derivative(b, i)))
            return _div(top, _pow(b, Fraction(2)))
        case Pow(base=b, exponent=e):
            inner = derivative(b, i)
            scale = _mul(Num(float(e)), _pow(b, e - 1))
            return _mul(scale, inner)
        case Call(func="sin", arg=a):
            return _mul(Call("cos", a), derivative(a, i))
        case Call(func="cos", arg=a):
            d = _mul(Call("sin", a), derivative(a, i))
            return Num(0.0) if _is_num(d, 0.0) else Neg(d)
        case Call(func="exp", arg=a):
            return _mul(Call("exp", a), derivative(a, i))
        case Call(func="sqrt", arg=a):
            return _div(derivative(a, i), _mul(Num(2.0), Call("sqrt", a)))
        case Call(func="abs", arg=a):
            return _mul(_div(a, Call("abs", a)), derivative(a, i))
    raise TypeError("not an expression node: %r" % (node,))


def substitute(node, repl: Dict[int, object]):
    """Replace coordinate references by expression nodes (for compositions)."""
    match node:
        case Num() | Name():
            return node
        case Var(index=i):
            return repl.get(i, node)
        case Neg(arg=a):
            return Neg(substitute(a, repl))
        case BinOp(op=o, left=a, right=b):
            return BinOp(o, substitute(a, repl), substitute(b, repl))
        case Pow(base=b, exponent=e):
            return Pow(substitute(b, repl), e)
        case Call(func=f, arg=a):
            return Call(f, substitute(a, repl))
    raise TypeError("not an expression node: %r" % (node,))


def det_node(m: List[List[object]]):
    """Determinant of a matrix of expression nodes, by cofactor expansion."""
    n = len(m)
    if n == 1:
        return m[0][0]
    acc = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = _mul(m[0][j], det_node(minor))
        if acc is None:
            acc = term
        elif j % 2 == 1:
            acc = _sub(acc, term)
        else:
            acc = _add(acc, term)
    return acc


def inverse_nodes(m: List[List[object]]) -> List[List[object]]:
    """Entrywise expression nodes of the matrix inverse, via the adjugate."""
    n = len(m)
    det = det_node(m)
    out: List[List[object]] = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[m[r][c] for c in range(n) if c != i]
                     for r in range(n) if r != j]
            cof = det_node(minor) if n > 1 else Num(1.0)
            if (i + j) % 2 == 1:
                cof = Neg(cof) if not _is_num(cof, 0.0) else cof
            out[i][j] = _div(cof, det)
    return out


# ---------------------------------------------------------------------------
# Evaluation and the expression-backed field


def eval_expr(node, coords: Sequence[Jet], params: Dict[str, float],
              memo: Optional[dict] = None):
    # Expression trees built by field arithmetic reuse subtree objects, so
    # compound nodes are memoized by identity for the duration of one call.
    if memo is None:
        memo = {}
    match node:
        case Num(value=v):
            return v
        case Var(index=k):
            return coords[k]
        case Name(ident=s):
            try:
                return params[s]
            except KeyError:
                raise ValueError("unknown name %r in expression" % s) from None
        case Neg(arg=a):
            key = id(node)
            if key in memo:
                return memo[key]
            res = -eval_expr(a, coords, params, memo)
            memo[key] = res
            return res
        case BinOp(op=o, left=a, right=b):
            key = id(node)
            if key in memo:
                return memo[key]
            x = eval_expr(a, coords, params, memo)
            y = eval_expr(b, coords, params, memo)
            if o == "+":
                res = x + y
            elif o == "-":
                res = x - y
            elif o == "*":
                res = x * y
            elif isinstance(y, Jet):
                res = x * y.reciprocal()
            elif y == 0:
                raise ZeroDivisionError("division by zero in expression")
            else:
                res = x / y
            memo[key] = res
            return res
        case Pow(base=b, exponent=e):
            key = id(node)
            if key in memo:
                return memo[key]
            x = eval_expr(b, coords, params, memo)
            p = int(e) if e.denominator == 1 else float(e)
            if isinstance(x, Jet):
                res = x ** p
            elif e.denominator != 1 and x <= 0:
                raise ValueError("fractional power of non-positive base")
            else:
                res = float(x) ** float(p)
            memo[key] = res
            return res
        case Call(func=f, arg=a):
            key = id(node)
            if key in memo:
                return memo[key]
            x = eval_expr(a, coords, params, memo)
            if not isinstance(x, Jet):
                x = Jet(x)
            if f == "sin":
                res = x.sin()
            elif f == "cos":
                res = x.cos()
            elif f == "exp":
                res = x.exp()
            elif f == "sqrt":
                res = x.sqrt()
            else:
                res = abs(x)
            memo[key] = res
            return res
    raise TypeError("not an expression node: %r" % (node,))


class ExprField(Field):
    """Field backed by an expression; differentiates exactly to any order.

    Sums, products and quotients of expression fields combine at the
    expression level, so derived structures built from model components
    (connection coefficients, curvature forms and so on) inherit exact
    differentiation instead of degrading to finite jet order.
    """

    def __init__(self, node, params: Optional[Dict[str, float]] = None):
        if isinstance(node, str):
            node = parse_expr(node)
        self.node = node
        self.params = dict(params or {})

    def jet(self, coords):
        return _jet_of(eval_expr(self.node, coords, self.params), coords)

    def partial(self, i):
        return ExprField(derivative(self.node, i), self.params)

    def _operand(self, other):
        """(node, merged params) for a compatible operand, else None."""
        if isinstance(other, ExprField):
            merged = dict(self.params)
            for key, val in other.params.items():
                if merged.setdefault(key, val) != val:
                    return None
            return other.node, merged
        if isinstance(other, (int, float)):
            return Num(float(other)), self.params
        if isinstance(other, ConstField):
            return Num(other.c), self.params
        return None

    def __add__(self, other):
        op = self._operand(other)
        if op is None:
            return super().__add__(other)
        return ExprField(_add(self.node, op[0]), op[1])

    __radd__ = __add__

    def __sub__(self, other):
        op = self._operand(other)
        if op is None:
            return super().__sub__(other)
        return ExprField(_sub(self.node, op[0]), op[1])

    def __rsub__(self, other):
        op = self._operand(other)
        if op is None:
            return super().__rsub__(other)
        return ExprField(_sub(op[0], self.node), op[1])

    def __mul__(self, other):
        op = self._operand(other)
        if op is None:
            return super().__mul__(other)
        return ExprField(_mul(self.node, op[0]), op[1])

    __rmul__ = __mul__

    def __truediv__(self, other):
        op = self._operand(other)
        if op is None:
            return super().__truediv__(other)
        return ExprField(_div(self.node, op[0]), op[1])

    def __neg__(self):
        return ExprField(Neg(self.node) if not _is_num(self.node, 0.0)
                         else Num(0.0), self.params)

    def __repr__(self):
        return "ExprField(%s)" % to_text(self.node)


# ---------------------------------------------------------------------------
# Model files


GALILEI_CONSTANTS = ("m", "q", "hbar")
EINSTEIN_CONSTANTS = ("m", "q", "hbar", "c")


@dataclass
class Model:
    kind: str  # "galilei" or "einstein"
    name: str
    constants: Dict[str, DimScalar]
    params: Dict[str, float]
    box_lo: np.ndarray
    box_hi: np.ndarray
    metric: List[List[Field]]  # 3x3 spacelike (galilei) or 4x4 (einstein)
    potential: List[Field]  # covariant components of the EM potential
    gravity2: Optional[PForm]  # closed observed gravitational 2-form

    @property
    def mass(self) -> float:
        return self.constants["m"].value

    @property
    def charge(self) -> float:
        return self.constants["q"].value

    @property
    def hbar(self) -> float:
        return self.constants["hbar"].value

    @property
    def lightspeed(self) -> float:
        return self.constants["c"].value

    @property
    def coupling(self) -> float:
        """The charge-to-action ratio q/hbar scaling the electromagnetic terms."""
        return self.charge / self.hbar

    def metric_at(self, p) -> np.ndarray:
        n = len(self.metric)
        return np.array([[self.metric[i][j].value(p) for j in range(n)]
                         for i in range(n)])

    def center(self) -> np.ndarray:
        return 0.5 * (self.box_lo + self.box_hi)


def _spacetime_expr(text: str, params) -> ExprField:
    node = parse_expr(text)
    bad = sorted(i for i in variables(node) if i > 3)
    if bad:
        raise ValueError("x%d is not a spacetime coordinate" % bad[0])
    return ExprField(node, params)


def _symmetric_entries(section, prefix, lo_idx, hi_idx, params):
    dim = hi_idx - lo_idx + 1
    grid: List[List[Optional[Field]]] = [[None] * dim for _ in range(dim)]
    for i in range(lo_idx, hi_idx + 1):
        for j in range(i, hi_idx + 1):
            key = "%s%d%d" % (prefix, i, j)
            alt = "%s%d%d" % (prefix, j, i)
            text = section.get(key, section.get(alt))
            if text is None:
                if i == j:
                    raise ValueError("missing metric entry %s" % key)
                text = "0"
            fld = _spacetime_expr(text, params)
            grid[i - lo_idx][j - lo_idx] = fld
            grid[j - lo_idx][i - lo_idx] = fld
    return grid


def _parse_box(section) -> Tuple[np.ndarray, np.ndarray]:
    lo = np.array([float(v) for v in section["lo"].split(",")])
    hi = np.array([float(v) for v in section["hi"].split(",")])
    if lo.shape != (4,) or hi.shape != (4,):
        raise ValueError("box bounds must have four components")
    if not np.all(lo < hi):
        raise ValueError("box must have positive extent in every coordinate")
    return lo, hi


def _parse_constants(section, kind) -> Dict[str, DimScalar]:
    required = EINSTEIN_CONSTANTS if kind == "einstein" else GALILEI_CONSTANTS
    out = {}
    for name in required:
        if name not in section:
            raise ValueError("missing constant %r" % name)
        parts = section[name].split(None, 1)
        value = float(parts[0])
        dim = parse_dimension(parts[1] if len(parts) > 1 else "1")
        want = CANONICAL_CONSTANT_DIMS[name]
        if dim != want:
            raise ValidationError(
                "constant %r has dimension %s, expected %s" % (name, dim, want))
        if name != "q" and value <= 0:
            raise ValidationError("constant %r must be positive" % name)
        out[name] = DimScalar(value, dim)
    for name in section:
        if name not in required:
            if name == "c" and kind == "galilei":
                raise ValueError("a light-speed constant has no place in a "
                                 "galilei model")
            raise ValueError("unknown constant %r" % name)
    return out


def parse_model_text(text: str, name: str = "<string>") -> Model:
    cp = configparser.ConfigParser(interpolation=None,
                                   inline_comment_prefixes=("#",))
    cp.optionxform = str
    cp.read_string(text)

    head = cp["model"]
    kind = head.get("kind", "").strip()
    if kind not in ("galilei", "einstein"):
        raise ValueError("model kind must be 'galilei' or 'einstein'")
    model_name = head.get("name", name).strip()

    params = {}
    if cp.has_section("params"):
        for key, val in cp["params"].items():
            params[key] = float(val)

    constants = _parse_constants(cp["constants"], kind)
    box_lo, box_hi = _parse_box(cp["box"])

    if kind == "galilei":
        metric = _symmetric_entries(cp["metric"], "g", 1, 3, params)
    else:
        metric = _symmetric_entries(cp["metric"], "g", 0, 3, params)

    potential: List[Field] = []
    pot = cp["potential"] if cp.has_section("potential") else {}
    for lam in range(4):
        text_l = pot.get("A%d" % lam, "0")
        potential.append(_spacetime_expr(text_l, params))

    gravity2 = None
    if cp.has_section("gravity"):
        comps = {}
        for a in range(4):
            for b in range(a + 1, 4):
                key = "Phi%d%d" % (a, b)
                if key in cp["gravity"]:
                    comps[(a, b)] = _spacetime_expr(cp["gravity"][key], params)
        gravity2 = PForm(4, 2, comps)

    def box(f: Field) -> Field:
        return BoxedField(f, box_lo, box_hi)

    metric = [[box(f) for f in row] for row in metric]
    potential = [box(f) for f in potential]
    if gravity2 is not None:
        gravity2 = PForm(4, 2, {k: box(f) for k, f in gravity2.comps.items()})

    return Model(kind=kind, name=model_name, constants=constants,
                 params=params, box_lo=box_lo, box_hi=box_hi, metric=metric,
                 potential=potential, gravity2=gravity2)


def sample_points(model: Model, count: int = SAMPLE_COUNT) -> np.ndarray:
    """Deterministic low-discrepancy points inside the declared box."""
    pow2 = 1
    while pow2 < count:
        pow2 *= 2
    unit = qmc.Sobol(d=4, scramble=False).random(pow2)[:count]
    span = model.box_hi - model.box_lo
    # keep a small margin so finite differencing in tests stays inside
    return model.box_lo + span * (0.05 + 0.9 * unit)


def validate_model(model: Model) -> None:
    from .smooth import exterior_derivative  # local to avoid cycle at import

    pts = sample_points(model)
    for p in pts:
        try:
            g = model.metric_at(p)
            pot = [f.value(p) for f in model.potential]
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise ValidationError("field evaluation failed: %s" % exc,
                                  witness=p) from exc
        if not (np.all(np.isfinite(g)) and np.all(np.isfinite(pot))):
            raise ValidationError("non-finite field value", witness=p)
        eig = np.linalg.eigvalsh(g)
        if model.kind == "galilei":
            if eig[0] <= 0:
                raise ValidationError(
                    "spacelike metric is not positive definite "
                    "(eigenvalues %s)" % eig, witness=p)
        else:
            if not (eig[0] < 0 and eig[1] > 0):
                raise ValidationError(
                    "metric does not have Lorentzian signature -+++ "
                    "(eigenvalues %s)" % eig, witness=p)
            if g[0, 0] >= 0:
                raise ValidationError(
                    "the chart time direction is not timelike (g00 >= 0)",
                    witness=p)
    if model.gravity2 is not None:
        dphi = exterior_derivative(model.gravity2)
        for p in pts:
            for key, fld in dphi.comps.items():
                v = fld.value(p)
                if abs(v) > 1e-9:
                    raise ValidationError(
                        "gravitational 2-form is not closed "
                        "(d-component %s = %g)" % (key, v), witness=p)


def load_model(path, validate: bool = True) -> Model:
    path = Path(path)
    model = parse_model_text(path.read_text(), name=path.stem)
    if validate:
        validate_model(model)
    return model


def builtin_model_dir() -> Path:
    return Path(__file__).resolve().parent / "models"


def available_models() -> List[str]:
    return sorted(p.stem for p in builtin_model_dir().glob("*.ini"))


def load_builtin(name: str, validate: bool = True) -> Model:
    path = builtin_model_dir() / (name + ".ini")
    if not path.exists():
        raise FileNotFoundError(
            "no builtin model %r; available: %s"
            % (name, ", ".join(available_models())))
    return load_model(path, validate=validate)
