"""Phase-space structures over a galilei spacetime model.

The spacetime chart is x0..x3 with x0 the absolute time; the phase chart
appends the observed velocities x4..x6 (the components x^i_0 of a motion's
velocity, normalized so the time component is one).  All constructions
below are written against that seven-coordinate chart.

Conventions baked in here:

- Model metric entries are the action-rescaled spacelike metric; with the
  shipped constants m = hbar = 1 they coincide with the classical metric.
- The electromagnetic 2-form is F = dA of the declared potential, and the
  total curvature folding gravity and electromagnetism together is
  Phi = Phi_grav + (q/hbar) F.
- The joined connection coefficients K carry a sign opposite to classical
  Christoffel symbols (so the time row vanishes identically and geodesics
  read d(x^i_0)/dt = gamma^i with no extra minus signs).

Special phase functions are stored by components (f0, fi, fbar) relative
to an observer, with value

    f = 1/2 f0 G_ij d^i d^j + f^i G_ij d^j + fbar,   d^i = x^i_0 - o^i.

Their bracket is computed in closed form from the components and the
observed total curvature, and independently (for cross-checking) from the
Poisson bracket plus dynamical-connection terms.
"""

from dataclasses import dataclass
from typing import List, Optional

from .modelspec import (
    ExprField, Model, Num, Var, inverse_nodes, substitute,
)
from .smooth import (
    BoxedField, Field, FuncField, PForm, VectorField, directional,
    exterior_derivative, wedge,
)

from numpy.polynomial.legendre import leggauss


def _unboxed(f: Field) -> Field:
    while isinstance(f, BoxedField):
        f = f.base
    return f


def _const(v: float) -> ExprField:
    return ExprField(Num(float(v)))


def _vel(i: int) -> ExprField:
    """The fibre coordinate x^i_0 (i = 1..3) as a phase field."""
    return ExprField(Var(3 + i))


@dataclass
class Observer:
    """A motion observer, given by its three observed-velocity fields."""

    vel: List[Field]

    @staticmethod
    def chart() -> "Observer":
        return Observer([_const(0.0), _const(0.0), _const(0.0)])

    def section(self) -> List[Field]:
        """The section fields x ↦ (x, o(x)) into the phase chart."""
        return [ExprField(Var(k)) for k in range(4)] + list(self.vel)

    def is_chart(self) -> bool:
        return all(isinstance(v, ExprField) and v.node == Num(0.0)
                   for v in self.vel)


@dataclass
class SpecialFunction:
    """A special phase function by observer-relative components."""

    f0: Field
    fi: List[Field]
    fbar: Field
    observer: Observer


class GalileiPhase:
    """All derived structures of a galilei model, built lazily and cached."""

    def __init__(self, model: Model):
        if model.kind != "galilei":
            raise ValueError("expected a galilei model, got %r" % model.kind)
        self.model = model
        self.coupling = model.coupling
        self.G = [[_unboxed(f) for f in row] for row in model.metric]
        self.A = [_unboxed(f) for f in model.potential]
        nodes = [[g.node for g in row] for row in self.G]
        inv = inverse_nodes(nodes)
        params = model.params
        self.Ginv = [[ExprField(n, params) for n in row] for row in inv]
        self._memo = {}

    # -- spacetime level ----------------------------------------------------

    def metric(self, i: int, j: int) -> Field:
        return self.G[i - 1][j - 1]

    def inv_metric(self, i: int, j: int) -> Field:
        return self.Ginv[i - 1][j - 1]

    def faraday(self) -> PForm:
        """F = dA of the declared electromagnetic potential."""
        if "F" not in self._memo:
            pot = PForm(4, 1, {(lam,): self.A[lam] for lam in range(4)})
            self._memo["F"] = exterior_derivative(pot)
        return self._memo["F"]

    def curvature(self) -> PForm:
        """Total curvature 2-form: gravity plus (q/hbar) times Faraday."""
        if "Phi" not in self._memo:
            phi = self.faraday().scaled(_const(self.coupling))
            if self.model.gravity2 is not None:
                grav = PForm(4, 2, {k: _unboxed(f) for k, f
                                    in self.model.gravity2.comps.items()})
                phi = phi + grav
            self._memo["Phi"] = phi
        return self._memo["Phi"]

    def K(self, lam: int, i: int, mu: int) -> Field:
        """Joined connection coefficient K_lam^i_mu (time row is zero)."""
        if i == 0:
            return _const(0.0)
        if lam > mu:
            return self.K(mu, i, lam)
        key = ("K", lam, i, mu)
        if key in self._memo:
            return self._memo[key]
        phi = self.curvature()
        acc = _const(0.0)
        if lam == 0 and mu == 0:
            for j in range(1, 4):
                acc = acc - self.inv_metric(i, j) * phi.component((0, j))
        elif lam == 0:
            h = mu
            for j in range(1, 4):
                inner = self.metric(h, j).partial(0) + phi.component((h, j))
                acc = acc - 0.5 * (self.inv_metric(i, j) * inner)
        else:
            h, k = lam, mu
            for j in range(1, 4):
                inner = (self.metric(j, k).partial(h)
                         + self.metric(j, h).partial(k)
                         - self.metric(h, k).partial(j))
                acc = acc - 0.5 * (self.inv_metric(i, j) * inner)
        self._memo[key] = acc
        return acc

    # -- phase level --------------------------------------------------------

    def Gamma(self, lam: int, i: int) -> Field:
        """Phase connection component Gamma_lam^i (a phase field)."""
        key = ("Gamma", lam, i)
        if key in self._memo:
            return self._memo[key]
        acc = self.K(lam, i, 0)
        for j in range(1, 4):
            acc = acc + self.K(lam, i, j) * _vel(j)
        self._memo[key] = acc
        return acc

    def gamma(self, i: int) -> Field:
        """Dynamical connection component: the observed acceleration field."""
        key = ("gamma", i)
        if key in self._memo:
            return self._memo[key]
        acc = self.Gamma(0, i)
        for h in range(1, 4):
            acc = acc + self.Gamma(h, i) * _vel(h)
        self._memo[key] = acc
        return acc

    def dynamical_vector(self) -> VectorField:
        """The second-order vector field d/dt of motions on the phase chart."""
        comps = [_const(1.0)] + [_vel(i) for i in range(1, 4)] \
            + [self.gamma(i) for i in range(1, 4)]
        return VectorField(comps)

    def cosymplectic(self) -> PForm:
        """The closed 2-form Omega of the phase structure."""
        if "Omega" not in self._memo:
            one = _const(1.0)
            total = None
            for i in range(1, 4):
                a_comps = {(3 + i,): one}
                for lam in range(4):
                    a_comps[(lam,)] = -self.Gamma(lam, i)
                a_i = PForm(7, 1, a_comps)
                for j in range(1, 4):
                    b_j = PForm(7, 1, {(j,): one, (0,): -_vel(j)})
                    term = wedge(a_i, b_j).scaled(self.metric(i, j))
                    total = term if total is None else total + term
            self._memo["Omega"] = total
        return self._memo["Omega"]

    def poisson_bivector(self) -> PForm:
        """The 2-vector Lambda inverse to Omega on the fibres."""
        if "Lambda" not in self._memo:
            one = _const(1.0)
            total = None
            for i in range(1, 4):
                u_comps = {(i,): one}
                for h in range(1, 4):
                    u_comps[(3 + h,)] = self.Gamma(i, h)
                u_i = PForm(7, 1, u_comps)
                for j in range(1, 4):
                    v_j = PForm(7, 1, {(3 + j,): one})
                    term = wedge(u_i, v_j).scaled(self.inv_metric(i, j))
                    total = term if total is None else total + term
            self._memo["Lambda"] = total
        return self._memo["Lambda"]

    def _gamma_upper(self, i: int, j: int) -> Field:
        """Gamma^{ij} = G^{ih} Gamma_h^j with both indices spatial."""
        key = ("gamma_upper", i, j)
        if key not in self._memo:
            acc = None
            for h in range(1, 4):
                term = self.inv_metric(i, h) * self.Gamma(h, j)
                acc = term if acc is None else acc + term
            self._memo[key] = acc
        return self._memo[key]

    def poisson(self, f: Field, g: Field) -> Field:
        """Poisson bracket of two phase functions."""
        fp = [f.partial(a) for a in range(7)]
        gp = [g.partial(a) for a in range(7)]
        acc = None
        for i in range(1, 4):
            for j in range(1, 4):
                term = self.inv_metric(i, j) * (
                    fp[i] * gp[3 + j] - gp[i] * fp[3 + j])
                acc = term if acc is None else acc + term
        for i in range(1, 4):
            for j in range(1, 4):
                skew = self._gamma_upper(i, j) - self._gamma_upper(j, i)
                acc = acc - skew * (fp[3 + i] * gp[3 + j])
        return acc

    # -- observers ----------------------------------------------------------

    def observed_curvature(self, observer: Optional[Observer] = None) -> PForm:
        """Pullback of Omega along an observer: a spacetime 2-form."""
        obs = observer or Observer.chart()
        sec = obs.section()
        nodes = []
        params = dict(self.model.params)
        for s in sec:
            if not isinstance(s, ExprField):
                raise ValueError("observer components must be expression "
                                 "fields for the pullback")
            nodes.append(s.node)
            for key, val in s.params.items():
                params.setdefault(key, val)
        omega = self.cosymplectic()

        def compose(fld: Field) -> ExprField:
            return ExprField(substitute(fld.node, dict(enumerate(nodes))),
                             params)

        comps = {}
        for lam in range(4):
            for mu in range(lam + 1, 4):
                acc = None
                for (a, b), fld in omega.comps.items():
                    jac = (sec[a].partial(lam) * sec[b].partial(mu)
                           - sec[a].partial(mu) * sec[b].partial(lam))
                    term = compose(fld) * jac
                    acc = term if acc is None else acc + term
                comps[(lam, mu)] = acc if acc is not None else _const(0.0)
        return PForm(4, 2, comps)

    def observed_potential(self, observer: Optional[Observer] = None,
                           order: int = 12) -> List[Field]:
        """A spacetime potential with d(potential) = observed curvature.

        Constructed by the homotopy integral A_mu(x) = sum_nu (x-b)^nu
        int_0^1 t Phi_nu_mu(b + t(x-b)) dt over the box center b, which
        inverts d on the (contractible) chart box.  The integral uses
        fixed Gauss-Legendre nodes, exact for the polynomial and analytic
        components in practice.
        """
        phi = self.observed_curvature(observer)
        base = self.model.center()
        s_nodes, s_weights = leggauss(order)
        t_nodes = 0.5 * (s_nodes + 1.0)
        t_weights = 0.5 * s_weights

        def cache_key(coords):
            # the result is a pure function of the first-order jet data
            # of the four spacetime coordinates, so those serve as key;
            # second-order calls are rare and stay uncached
            parts = []
            for c in coords[:4]:
                if c.order > 1:
                    return None
                if c.order == 0:
                    parts.append((float(c.f),))
                else:
                    parts.append((float(c.f), tuple(map(float, c.g))))
            return tuple(parts)

        def component(mu: int) -> Field:
            cache = {}

            def fn(coords):
                key = cache_key(coords)
                if key is not None and key in cache:
                    return cache[key]
                rel = [coords[nu] - base[nu] for nu in range(4)]
                acc = None
                for t, w in zip(t_nodes, t_weights):
                    pts = [base[nu] + t * rel[nu] for nu in range(4)]
                    for nu in range(4):
                        fld = phi.component((nu, mu))
                        term = (w * t) * fld.jet(pts) * rel[nu]
                        acc = term if acc is None else acc + term
                if key is not None:
                    if len(cache) > 8192:
                        cache.clear()
                    cache[key] = acc
                return acc
            return FuncField(fn)

        return [component(mu) for mu in range(4)]

    # -- special phase functions --------------------------------------------

    def special_value(self, sf: SpecialFunction) -> Field:
        """The phase function a special function's components describe."""
        delta = [_vel(i) - sf.observer.vel[i - 1] for i in range(1, 4)]
        acc = sf.fbar
        for i in range(1, 4):
            for j in range(1, 4):
                acc = acc + 0.5 * (sf.f0 * self.metric(i, j)
                                   * delta[i - 1] * delta[j - 1])
                acc = acc + sf.fi[i - 1] * self.metric(i, j) * delta[j - 1]
        return acc

    def change_observer(self, sf: SpecialFunction,
                        new: Observer) -> SpecialFunction:
        """Re-express the components relative to another observer."""
        v = [new.vel[k] - sf.observer.vel[k] for k in range(3)]
        fi = [sf.fi[k] + sf.f0 * v[k] for k in range(3)]
        fbar = sf.fbar
        for i in range(1, 4):
            for j in range(1, 4):
                fbar = fbar + sf.fi[i - 1] * self.metric(i, j) * v[j - 1]
                fbar = fbar + 0.5 * (sf.f0 * self.metric(i, j)
                                     * v[i - 1] * v[j - 1])
        return SpecialFunction(sf.f0, fi, fbar, new)

    def tangent_projection(self, sf: SpecialFunction) -> VectorField:
        """The spacetime vector field X[f] = f0 d_0 - f^i d_i."""
        chart = sf if sf.observer.is_chart() \
            else self.change_observer(sf, Observer.chart())
        return VectorField([chart.f0] + [-chart.fi[k] for k in range(3)])

    def special_bracket(self, f: SpecialFunction,
                        g: SpecialFunction) -> SpecialFunction:
        """Closed-form special bracket.

        The component formula holds in chart components, so both arguments
        are re-expressed there first and the result is transitioned back to
        the observer of the first argument.
        """
        out_obs = f.observer
        chart = Observer.chart()
        if not f.observer.is_chart():
            f = self.change_observer(f, chart)
        if not g.observer.is_chart():
            g = self.change_observer(g, chart)
        phi = self.observed_curvature()

        def comp_bracket(ft, gt):
            acc = f.f0 * gt.partial(0) - g.f0 * ft.partial(0)
            for h in range(1, 4):
                acc = acc - f.fi[h - 1] * gt.partial(h) \
                    + g.fi[h - 1] * ft.partial(h)
            return acc

        h0 = comp_bracket(f.f0, g.f0)
        hi = [comp_bracket(f.fi[k], g.fi[k]) for k in range(3)]
        hbar = comp_bracket(f.fbar, g.fbar)
        for h in range(1, 4):
            mixed = f.f0 * g.fi[h - 1] - g.f0 * f.fi[h - 1]
            hbar = hbar - mixed * phi.component((0, h))
        for h in range(1, 4):
            for k in range(1, 4):
                hbar = hbar + f.fi[h - 1] * g.fi[k - 1] \
                    * phi.component((h, k))
        out = SpecialFunction(h0, hi, hbar, chart)
        if not out_obs.is_chart():
            out = self.change_observer(out, out_obs)
        return out

    def definitional_bracket_value(self, f: SpecialFunction,
                                   g: SpecialFunction) -> Field:
        """Oracle route: bracket value from Poisson plus dynamical terms."""
        fv = self.special_value(f)
        gv = self.special_value(g)
        gamma = self.dynamical_vector()
        f0 = f.f0 if f.observer.is_chart() \
            else self.change_observer(f, Observer.chart()).f0
        g0 = g.f0 if g.observer.is_chart() \
            else self.change_observer(g, Observer.chart()).f0
        return self.poisson(fv, gv) + f0 * directional(gamma, gv) \
            - g0 * directional(gamma, fv)

    def hamiltonian_lift(self, sf: SpecialFunction) -> VectorField:
        """The phase vector field generated by a special function."""
        chart = sf if sf.observer.is_chart() \
            else self.change_observer(sf, Observer.chart())
        val = self.special_value(chart)
        # d(value)/d(x^j_0), in closed form
        P = []
        for j in range(1, 4):
            acc = None
            for k in range(1, 4):
                term = chart.f0 * self.metric(j, k) * _vel(k) \
                    + self.metric(k, j) * chart.fi[k - 1]
                acc = term if acc is None else acc + term
            P.append(acc)
        comps: List[Field] = [chart.f0]
        for i in range(1, 4):
            acc = chart.f0 * _vel(i)
            for j in range(1, 4):
                acc = acc - self.inv_metric(i, j) * P[j - 1]
            comps.append(acc)
        for i in range(1, 4):
            acc = chart.f0 * self.gamma(i)
            for j in range(1, 4):
                acc = acc + self.inv_metric(i, j) * val.partial(j)
                skew = self._gamma_upper(i, j) - self._gamma_upper(j, i)
                acc = acc + skew * P[j - 1]
            comps.append(acc)
        return VectorField(comps)

    # -- distinguished special functions ------------------------------------

    def coordinate_function(self, lam: int) -> SpecialFunction:
        return SpecialFunction(_const(0.0), [_const(0.0)] * 3,
                               ExprField(Var(lam)), Observer.chart())

    def hamiltonian_function(self) -> SpecialFunction:
        """Observed energy (kinetic plus electromagnetic scalar term)."""
        fbar = -(_const(self.coupling) * self.A[0])
        return SpecialFunction(_const(1.0), [_const(0.0)] * 3, fbar,
                               Observer.chart())

    def momentum_function(self, i: int) -> SpecialFunction:
        """Observed momentum component along d_i."""
        fi = [_const(1.0) if k == i else _const(0.0) for k in range(1, 4)]
        fbar = _const(self.coupling) * self.A[i]
        return SpecialFunction(_const(0.0), fi, fbar, Observer.chart())

    def momentum_square_function(self) -> SpecialFunction:
        """Squared momentum contracted with the inverse spacelike metric.

        Quadratic in the velocities, so the time component is 2 rather
        than 1; the upper-index potential A^i := G^ij A_j (with the
        coupling folded in) enters both the linear part and the scalar.
        """
        a = [_const(self.coupling) * self.A[j] for j in range(1, 4)]
        a_up = []
        for i in range(1, 4):
            acc = None
            for j in range(1, 4):
                term = self.inv_metric(i, j) * a[j - 1]
                acc = term if acc is None else acc + term
            a_up.append(acc)
        fbar = None
        for i in range(3):
            term = a_up[i] * a[i]
            fbar = term if fbar is None else fbar + term
        fi = [_const(2.0) * a_up[i] for i in range(3)]
        return SpecialFunction(_const(2.0), fi, fbar, Observer.chart())


