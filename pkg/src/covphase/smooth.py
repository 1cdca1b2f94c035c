"""Charts, second-order jets, scalar/vector fields and exterior calculus.

Everything geometric in this package reduces to evaluating smooth chart
functions together with their first and second derivatives.  Derivatives are
propagated by forward-mode Taylor arithmetic truncated at order two: a `Jet`
carries a value, optionally a gradient, optionally a symmetric Hessian.

Fields are thin objects with a single obligation: given a list of coordinate
jets, return the jet of the field there.  That makes composition trivial (a
spacetime field evaluated on the first four jets of a phase chart acquires
phase-space derivatives for free) and keeps the chart dimension out of the
type.  `Field.partial` closes the algebra under differentiation; numerically
derived fields lose one order per partial, expression-backed fields (see
`modelspec`) differentiate exactly to any order.

Convention for forms: components are stored on strictly increasing index
tuples and extended by antisymmetry, the wedge is the determinant convention
(a ∧ b)(X, Y) = a(X)b(Y) − a(Y)b(X) with no 1/p!, and the exterior
derivative is (dω)_J = Σ_k (−1)^k ∂_{J_k} ω_{J∖J_k}.
"""

import itertools
import math
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

Point = np.ndarray  # a chart point; length 4 (spacetime) or 7 (phase space)


class DerivativeOrderError(Exception):
    """Requested a derivative order a numerically-derived field cannot supply."""


class OutsideBoxError(Exception):
    """A model field was evaluated outside the declared chart box."""


# ---------------------------------------------------------------------------
# Jets


class Jet:
    """Truncated Taylor expansion: value, optional gradient, optional Hessian.

    The order of a jet is 0, 1 or 2 according to which slots are present.
    Binary operations produce the minimum of the operand orders; scalars
    count as exact (infinite-order) constants.
    """

    __slots__ = ("f", "g", "h")

    def __init__(self, f, g=None, h=None):
        self.f = float(f)
        self.g = g
        self.h = h

    @property
    def order(self) -> int:
        if self.h is not None:
            return 2
        if self.g is not None:
            return 1
        return 0

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet):
            g = self.g + other.g if self.g is not None and other.g is not None else None
            h = self.h + other.h if self.h is not None and other.h is not None else None
            return Jet(self.f + other.f, g, h)
        return Jet(self.f + other, self.g, self.h)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.f,
                   None if self.g is None else -self.g,
                   None if self.h is None else -self.h)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            g = h = None
            if self.g is not None and other.g is not None:
                g = self.f * other.g + other.f * self.g
                if self.h is not None and other.h is not None:
                    h = (self.f * other.h + other.f * self.h
                         + np.outer(self.g, other.g) + np.outer(other.g, self.g))
            return Jet(self.f * other.f, g, h)
        g = None if self.g is None else other * self.g
        h = None if self.h is None else other * self.h
        return Jet(self.f * other, g, h)

    __rmul__ = __mul__

    def reciprocal(self):
        if self.f == 0.0:
            raise ZeroDivisionError("jet with zero value")
        inv = 1.0 / self.f
        g = h = None
        if self.g is not None:
            g = -(inv * inv) * self.g
            if self.h is not None:
                h = -(inv * inv) * self.h + (2.0 * inv ** 3) * np.outer(self.g, self.g)
        return Jet(inv, g, h)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def _chain(self, u0, u1, u2):
        g = h = None
        if self.g is not None:
            g = u1 * self.g
            if self.h is not None:
                h = u1 * self.h + u2 * np.outer(self.g, self.g)
        return Jet(u0, g, h)

    def __pow__(self, p):
        if p == 0:
            return Jet(1.0,
                       None if self.g is None else np.zeros_like(self.g),
                       None if self.h is None else np.zeros_like(self.h))
        pf = float(p)
        if pf != int(pf) and self.f <= 0.0:
            raise ValueError("fractional power of non-positive base %g" % self.f)
        u0 = self.f ** pf
        u1 = pf * self.f ** (pf - 1.0)
        u2 = pf * (pf - 1.0) * self.f ** (pf - 2.0) if self.f != 0.0 or pf >= 2 else 0.0
        return self._chain(u0, u1, u2)

    def sqrt(self):
        if self.f <= 0.0:
            raise ValueError("sqrt of non-positive jet value %g" % self.f)
        r = math.sqrt(self.f)
        return self._chain(r, 0.5 / r, -0.25 / (r * self.f))

    def sin(self):
        return self._chain(math.sin(self.f), math.cos(self.f), -math.sin(self.f))

    def cos(self):
        return self._chain(math.cos(self.f), -math.sin(self.f), -math.cos(self.f))

    def exp(self):
        e = math.exp(self.f)
        return self._chain(e, e, e)

    def __abs__(self):
        s = math.copysign(1.0, self.f) if self.f != 0.0 else 0.0
        return self._chain(abs(self.f), s, 0.0)

    def __repr__(self):
        return "Jet(%r, order=%d)" % (self.f, self.order)


def seed_jets(x: Sequence[float], order: int = 2) -> List[Jet]:
    """Coordinate jets of the chart at point x, at the given order."""
    n = len(x)
    out = []
    for i in range(n):
        g = h = None
        if order >= 1:
            g = np.zeros(n)
            g[i] = 1.0
            if order >= 2:
                h = np.zeros((n, n))
        out.append(Jet(float(x[i]), g, h))
    return out


def constant_jet(value: float, like: Jet) -> Jet:
    """An exact-constant jet shaped after an existing jet."""
    g = None if like.g is None else np.zeros_like(like.g)
    h = None if like.h is None else np.zeros_like(like.h)
    return Jet(value, g, h)


# ---------------------------------------------------------------------------
# Fields


class Field:
    """A chart function knowing how to produce its jet at given coordinates."""

    def jet(self, coords: Sequence[Jet]) -> Jet:
        raise NotImplementedError

    def partial(self, i: int) -> "Field":
        return PartialField(self, i)

    # point evaluation helpers
    def value(self, p: Point) -> float:
        return self.jet(seed_jets(p, 0)).f

    def gradient(self, p: Point) -> np.ndarray:
        return self.jet(seed_jets(p, 1)).g

    def hessian(self, p: Point) -> np.ndarray:
        return self.jet(seed_jets(p, 2)).h

    # algebra (results are numerically-backed closures)
    def __add__(self, other):
        return FuncField(lambda c, a=self, b=other: a.jet(c) + _jet_of(b, c))

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        return FuncField(lambda c, a=self, b=other: a.jet(c) - _jet_of(b, c))

    def __rsub__(self, other):
        return FuncField(lambda c, a=self, b=other: _jet_of(b, c) - a.jet(c))

    def __mul__(self, other):
        return FuncField(lambda c, a=self, b=other: a.jet(c) * _jet_of(b, c))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        return FuncField(lambda c, a=self, b=other: a.jet(c) / _jet_of(b, c))

    def __neg__(self):
        return FuncField(lambda c, a=self: -a.jet(c))


def _jet_of(x, coords) -> Jet:
    if isinstance(x, Field):
        return x.jet(coords)
    if isinstance(x, Jet):
        return x
    return constant_jet(float(x), coords[0])


class ConstField(Field):
    def __init__(self, value: float):
        self.c = float(value)

    def jet(self, coords):
        return constant_jet(self.c, coords[0])

    def partial(self, i):
        return ConstField(0.0)


ZERO = ConstField(0.0)


class CoordField(Field):
    """The i-th chart coordinate as a field."""

    def __init__(self, i: int):
        self.i = i

    def jet(self, coords):
        return coords[self.i]

    def partial(self, i):
        return ConstField(1.0 if i == self.i else 0.0)


class FuncField(Field):
    """Field backed by a closure on coordinate jets."""

    def __init__(self, fn: Callable[[Sequence[Jet]], Jet]):
        self.fn = fn

    def jet(self, coords):
        return _jet_of(self.fn(coords), coords)


class PartialField(Field):
    """Numerical partial derivative of another field.

    Loses one derivative order per application: the value and gradient of
    ∂ᵢf are read off the gradient and Hessian of f, but the Hessian of ∂ᵢf
    would need third derivatives and raises `DerivativeOrderError`.
    Expression-backed fields override `partial` and never hit this limit.
    """

    def __init__(self, base: Field, i: int):
        self.base = base
        self.i = i

    def jet(self, coords):
        want = min(c.order for c in coords)
        if want >= 2:
            raise DerivativeOrderError(
                "second derivatives of a numerically-derived field are not "
                "stored; build it from expressions if you need them")
        x = [c.f for c in coords]
        bj = self.base.jet(seed_jets(x, want + 1))
        val = bj.g[self.i]
        if want == 0:
            return Jet(val)
        # chain rule through the (possibly transformed) argument jets
        row = bj.h[self.i]
        g = np.zeros_like(coords[0].g)
        for j, c in enumerate(coords):
            g = g + row[j] * c.g
        return Jet(val, g, None)


class RestrictedField(Field):
    """A field of m arguments read through a slot map into a larger chart.

    ``index_map[j]`` names the ambient coordinate feeding the base field's
    j-th argument.  Used to lift spacetime fields to the phase chart.
    """

    def __init__(self, base: Field, index_map: Sequence[int]):
        self.base = base
        self.index_map = list(index_map)

    def jet(self, coords):
        return self.base.jet([coords[k] for k in self.index_map])

    def partial(self, i):
        for j, k in enumerate(self.index_map):
            if k == i:
                return RestrictedField(self.base.partial(j), self.index_map)
        return ConstField(0.0)


def lift_spacetime(f: Field) -> Field:
    """View a four-argument spacetime field as a phase-chart field."""
    return RestrictedField(f, [0, 1, 2, 3])


class BoxedField(Field):
    """Wraps a spacetime field with the declared chart-box guard."""

    def __init__(self, base: Field, lo: Sequence[float], hi: Sequence[float],
                 slack: float = 1e-9):
        self.base = base
        self.lo = list(lo)
        self.hi = list(hi)
        self.slack = slack

    def jet(self, coords):
        for k, (lo, hi) in enumerate(zip(self.lo, self.hi)):
            v = coords[k].f
            if v < lo - self.slack or v > hi + self.slack:
                raise OutsideBoxError(
                    "coordinate x%d = %g outside declared box [%g, %g]"
                    % (k, v, lo, hi))
        return self.base.jet(coords)

    def partial(self, i):
        return BoxedField(self.base.partial(i), self.lo, self.hi, self.slack)


# ---------------------------------------------------------------------------
# Vector fields and forms


class VectorField:
    """Contravariant field: one component field per chart coordinate."""

    def __init__(self, comps: Sequence[Field]):
        self.comps = [c if isinstance(c, Field) else ConstField(c) for c in comps]

    @property
    def dim(self) -> int:
        return len(self.comps)

    def at(self, p: Point) -> np.ndarray:
        return np.array([c.value(p) for c in self.comps])

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField([a + b for a, b in zip(self.comps, other.comps)])

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField([a - b for a, b in zip(self.comps, other.comps)])

    def scaled(self, s) -> "VectorField":
        return VectorField([c * s for c in self.comps])


def directional(X: VectorField, f: Field) -> Field:
    """The derivative of f along X, as a field."""
    parts = [f.partial(nu) for nu in range(len(X.comps))]

    def fn(coords, X=X, parts=parts):
        acc = None
        for nu, comp in enumerate(X.comps):
            term = comp.jet(coords) * parts[nu].jet(coords)
            acc = term if acc is None else acc + term
        return acc
    return FuncField(fn)


lie_derivative_scalar = directional


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    """Commutator of two vector fields, [X, Y]^μ = X^ν∂_νY^μ − Y^ν∂_νX^μ."""
    if X.dim != Y.dim:
        raise ValueError("bracket of fields on different charts")
    return VectorField([directional(X, Y.comps[m]) - directional(Y, X.comps[m])
                        for m in range(X.dim)])


def _perm_sign_and_sorted(idx: Tuple[int, ...]):
    """Sign of the sort permutation, or (0, None) on a repeated index."""
    if len(set(idx)) != len(idx):
        return 0, None
    order = sorted(range(len(idx)), key=lambda k: idx[k])
    sign = 1
    seen = [False] * len(idx)
    for start in range(len(idx)):
        if seen[start]:
            continue
        length = 0
        k = start
        while not seen[k]:
            seen[k] = True
            k = order[k]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign, tuple(sorted(idx))


class PForm:
    """Antisymmetric covariant tensor stored on strictly increasing tuples."""

    def __init__(self, dim: int, degree: int, comps: Dict[Tuple[int, ...], Field]):
        self.dim = dim
        self.degree = degree
        self.comps = {}
        for key, fld in comps.items():
            if tuple(sorted(key)) != tuple(key):
                raise ValueError("component key %r is not sorted" % (key,))
            if isinstance(fld, Field):
                self.comps[tuple(key)] = fld
            else:
                self.comps[tuple(key)] = ConstField(fld)

    def component(self, idx: Tuple[int, ...]) -> Field:
        """Component on an arbitrary tuple, resolved through antisymmetry."""
        sign, key = _perm_sign_and_sorted(tuple(idx))
        if sign == 0 or key not in self.comps:
            return ZERO
        fld = self.comps[key]
        return fld if sign == 1 else -fld

    def matrix_at(self, p: Point) -> np.ndarray:
        """Dense antisymmetric component matrix of a 2-form at a point."""
        if self.degree != 2:
            raise ValueError("matrix_at is for 2-forms")
        m = np.zeros((self.dim, self.dim))
        for (a, b), fld in self.comps.items():
            v = fld.value(p)
            m[a, b] = v
            m[b, a] = -v
        return m

    def evaluate(self, p: Point, *vectors: np.ndarray) -> float:
        """Value on concrete tangent vectors (determinant convention)."""
        if len(vectors) != self.degree:
            raise ValueError("need %d vectors" % self.degree)
        total = 0.0
        for key, fld in self.comps.items():
            sub = np.array([[v[k] for k in key] for v in vectors])
            total += fld.value(p) * np.linalg.det(sub)
        return total

    def __add__(self, other: "PForm") -> "PForm":
        if (self.dim, self.degree) != (other.dim, other.degree):
            raise ValueError("form mismatch")
        comps = dict(self.comps)
        for key, fld in other.comps.items():
            comps[key] = comps[key] + fld if key in comps else fld
        return PForm(self.dim, self.degree, comps)

    def scaled(self, s) -> "PForm":
        return PForm(self.dim, self.degree,
                     {k: f * s for k, f in self.comps.items()})


def exterior_derivative(w: PForm) -> PForm:
    comps: Dict[Tuple[int, ...], Field] = {}
    for bigkey in itertools.combinations(range(w.dim), w.degree + 1):
        acc = None
        for k, lam in enumerate(bigkey):
            rest = bigkey[:k] + bigkey[k + 1:]
            if rest not in w.comps:
                continue
            term = w.comps[rest].partial(lam)
            if k % 2 == 1:
                term = -term
            acc = term if acc is None else acc + term
        if acc is not None:
            comps[bigkey] = acc
    return PForm(w.dim, w.degree + 1, comps)


def wedge(a: PForm, b: PForm) -> PForm:
    if a.dim != b.dim:
        raise ValueError("wedge on different charts")
    comps: Dict[Tuple[int, ...], Field] = {}
    for akey, afld in a.comps.items():
        for bkey, bfld in b.comps.items():
            sign, key = _perm_sign_and_sorted(akey + bkey)
            if sign == 0:
                continue
            term = (afld * bfld) if sign == 1 else -(afld * bfld)
            comps[key] = comps[key] + term if key in comps else term
    return PForm(a.dim, a.degree + b.degree, comps)


def contract(X: VectorField, w: PForm) -> PForm:
    """Interior product i(X)ω, first slot fed by X."""
    if w.degree == 0:
        raise ValueError("cannot contract a scalar")
    comps: Dict[Tuple[int, ...], Field] = {}
    for key, fld in w.comps.items():
        for k, lam in enumerate(key):
            rest = key[:k] + key[k + 1:]
            term = X.comps[lam] * fld
            if k % 2 == 1:
                term = -term
            comps[rest] = comps[rest] + term if rest in comps else term
    return PForm(w.dim, w.degree - 1, comps)


def lie_derivative_form(X: VectorField, w: PForm) -> PForm:
    """L_X ω by the direct component formula (not via Cartan)."""
    comps: Dict[Tuple[int, ...], Field] = {}
    for key in itertools.combinations(range(w.dim), w.degree):
        acc = directional(X, w.component(key)) if key in w.comps else None
        for slot in range(w.degree):
            for nu in range(w.dim):
                replaced = key[:slot] + (nu,) + key[slot + 1:]
                sign, skey = _perm_sign_and_sorted(replaced)
                if sign == 0 or skey not in w.comps:
                    continue
                term = w.comps[skey] * X.comps[nu].partial(key[slot])
                if sign == -1:
                    term = -term
                acc = term if acc is None else acc + term
        if acc is not None:
            comps[key] = acc
    return PForm(w.dim, w.degree, comps)


def pullback_form(w: PForm, section: Sequence[Field], base_dim: int = 4) -> PForm:
    """Pullback of a 1- or 2-form along the map x ↦ (section_A(x))_A.

    The section is given componentwise as fields on the base chart, one
    field per ambient coordinate.
    """
    if w.degree not in (1, 2):
        raise ValueError("pullback implemented for degrees 1 and 2")
    sec = list(section)

    def composed(fld: Field) -> Field:
        return FuncField(lambda c, f=fld: f.jet([s.jet(c) for s in sec]))

    comps: Dict[Tuple[int, ...], Field] = {}
    if w.degree == 1:
        for lam in range(base_dim):
            acc = None
            for (a,), fld in w.comps.items():
                term = composed(fld) * sec[a].partial(lam)
                acc = term if acc is None else acc + term
            comps[(lam,)] = acc if acc is not None else ZERO
        return PForm(base_dim, 1, comps)
    for lam in range(base_dim):
        for mu in range(lam + 1, base_dim):
            acc = None
            for (a, b), fld in w.comps.items():
                jac = (sec[a].partial(lam) * sec[b].partial(mu)
                       - sec[a].partial(mu) * sec[b].partial(lam))
                term = composed(fld) * jac
                acc = term if acc is None else acc + term
            comps[(lam, mu)] = acc if acc is not None else ZERO
    return PForm(base_dim, 2, comps)


def bivector_bracket(L: PForm, f: Field, g: Field) -> Field:
    """Action of an antisymmetric 2-vector on two scalars, Λ(df, dg).

    `L` reuses the `PForm` container with contravariant meaning.
    """
    acc = None
    for (a, b), comp in L.comps.items():
        term = comp * (f.partial(a) * g.partial(b) - f.partial(b) * g.partial(a))
        acc = term if acc is None else acc + term
    return acc if acc is not None else ZERO


# ---------------------------------------------------------------------------
# Matrix-of-jets helpers (used for inverse metrics inside field closures)


def det_jets(m):
    """Determinant of a small matrix of jets by cofactor expansion."""
    n = len(m)
    if n == 1:
        return m[0][0]
    acc = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * det_jets(minor)
        if j % 2 == 1:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def inverse_jets(m):
    """Inverse of a small matrix of jets via the adjugate."""
    n = len(m)
    d = det_jets(m)
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[m[r][c] for c in range(n) if c != i]
                     for r in range(n) if r != j]
            cof = det_jets(minor) if n > 1 else _jet_like(1.0, m[0][0])
            if (i + j) % 2 == 1:
                cof = -cof
            out[i][j] = cof / d
    return out


def _jet_like(v, like):
    if isinstance(like, Jet):
        return constant_jet(v, like)
    return v
