"""Lorentzian spacetime structures on the velocity phase chart.

The chart is (x0..x3, x1_0..x3_0): four spacetime coordinates plus the
three observed velocities, written here as Var(4..6).  A phase point is
admissible when the quadratic form

    g_00 + 2 g_0j x^j_0 + g_ij x^i_0 x^j_0

is negative (the chart velocity is timelike); alpha0 is the reciprocal
square root of its absolute value.  All derived objects are kept as
expression-backed fields so they can be differentiated exactly to any
order.

Conventions in force throughout:
  * the declared metric block is the action-rescaled metric G; the
    geometric (Lorentzian) metric is g = (hbar/m) G, so they coincide
    numerically for the shipped unit-mass models;
  * the electromagnetic 2-form is stored with strict-component values
    F_ab = d_a A_b - d_b A_a for a < b;
  * K carries the sign-reversed Christoffel symbols of g, and the phase
    connection coefficients fold K with the velocity substitutions
    delta-bar;
  * wedge products and exterior derivatives follow the determinant
    convention of the smooth-calculus layer (no 1/p! weights).
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .modelspec import (
    BinOp, Call, ExprField, Model, Num, Var, inverse_nodes,
)
from .smooth import Field, PForm, VectorField, wedge


class LightconeViolation(ValueError):
    """A phase point whose chart velocity is not timelike."""


def _unboxed(f: Field) -> Field:
    return getattr(f, "base", f)


def _const(v: float) -> ExprField:
    return ExprField(Num(float(v)))


def _vel(i: int) -> ExprField:
    """Observed velocity x^i_0 as a chart coordinate field, i in 1..3."""
    return ExprField(Var(3 + i))


@dataclass
class ESpecialFunction:
    """Special phase function in normal form: spacetime vector plus scalar.

    comps holds the four components of the tangent lift X (functions of
    the spacetime coordinates only), fbar the spacetime component.  The
    function itself is -G(contact, X) + fbar.
    """

    comps: List[Field]
    fbar: Field


@dataclass
class ObservedFields:
    """Electric/magnetic splitting of F relative to an observer."""

    electric: List[Field]
    magnetic: List[Field]
    tau: List[Field]
    eta: PForm


class EinsteinPhase:
    """All derived structures of an einstein model, built lazily and cached."""

    def __init__(self, model: Model):
        if model.kind != "einstein":
            raise ValueError("expected an einstein model, got %r" % model.kind)
        self.model = model
        self.coupling = model.coupling          # q / hbar
        self.c = model.lightspeed
        self.scale = model.hbar / model.mass    # g = scale * G
        self.G = [[_unboxed(f) for f in row] for row in model.metric]
        self.A = [_unboxed(f) for f in model.potential]
        params = model.params
        inv = inverse_nodes([[g.node for g in row] for row in self.G])
        self.Ginv = [[ExprField(n, params) for n in row] for row in inv]
        self._memo: Dict = {}

    # -- metric accessors (indices 0..3) ------------------------------------

    def metric(self, lam: int, mu: int) -> Field:
        """Rescaled metric G as declared by the model."""
        return self.G[lam][mu]

    def inv_metric(self, lam: int, mu: int) -> Field:
        return self.Ginv[lam][mu]

    def g_low(self, lam: int, mu: int) -> Field:
        """Geometric metric g = (hbar/m) G."""
        key = ("g", lam, mu)
        if key not in self._memo:
            self._memo[key] = self.G[lam][mu] * self.scale
        return self._memo[key]

    def g_up(self, lam: int, mu: int) -> Field:
        key = ("gup", lam, mu)
        if key not in self._memo:
            self._memo[key] = self.Ginv[lam][mu] * (1.0 / self.scale)
        return self._memo[key]

    # -- velocity contractions ----------------------------------------------

    def Gbar0(self, lam: int) -> Field:
        """G_{0 lam} + G_{i lam} x^i_0 (rescaled metric)."""
        key = ("Gbar0", lam)
        if key not in self._memo:
            acc = self.G[0][lam]
            for i in range(1, 4):
                acc = acc + self.G[i][lam] * _vel(i)
            self._memo[key] = acc
        return self._memo[key]

    def gbar0(self, lam: int) -> Field:
        key = ("gbar0", lam)
        if key not in self._memo:
            self._memo[key] = self.Gbar0(lam) * self.scale
        return self._memo[key]

    def Gbar_up(self, i: int, lam: int) -> Field:
        """G^{i lam} - G^{0 lam} x^i_0 (inverse rescaled metric)."""
        key = ("Gbarup", i, lam)
        if key not in self._memo:
            self._memo[key] = self.Ginv[i][lam] - self.Ginv[0][lam] * _vel(i)
        return self._memo[key]

    def gbar_up(self, i: int, lam: int) -> Field:
        key = ("gbarup", i, lam)
        if key not in self._memo:
            self._memo[key] = self.Gbar_up(i, lam) * (1.0 / self.scale)
        return self._memo[key]

    # -- timelike normalization ---------------------------------------------

    def radicand(self) -> Field:
        """g_00 + 2 g_0j x^j_0 + g_ij x^i_0 x^j_0; negative on admissible points."""
        if "rad" not in self._memo:
            acc = self.g_low(0, 0)
            for j in range(1, 4):
                acc = acc + self.g_low(0, j) * 2.0 * _vel(j)
            for i in range(1, 4):
                for j in range(1, 4):
                    acc = acc + self.g_low(i, j) * _vel(i) * _vel(j)
            self._memo["rad"] = acc
        return self._memo["rad"]

    def require_timelike(self, p) -> None:
        if self.radicand().value(p) >= 0.0:
            raise LightconeViolation(
                "phase point has a non-timelike chart velocity")

    def alpha0(self) -> Field:
        if "alpha0" not in self._memo:
            root = ExprField(Call("sqrt", Call("abs", self.radicand().node)),
                             self.model.params)
            self._memo["alpha0"] = _const(1.0) / root
            self._memo["inv_alpha0"] = root
        return self._memo["alpha0"]

    def inv_alpha0(self) -> Field:
        self.alpha0()
        return self._memo["inv_alpha0"]

    def tau(self, lam: int) -> Field:
        """Time 1-form component tau_lam = -(alpha0/c) gbar_{0 lam}."""
        key = ("tau", lam)
        if key not in self._memo:
            self._memo[key] = self.alpha0() * self.gbar0(lam) * (-1.0 / self.c)
        return self._memo[key]

    def tau_up(self, mu: int) -> Field:
        key = ("tauup", mu)
        if key not in self._memo:
            acc = None
            for nu in range(4):
                term = self.g_up(mu, nu) * self.tau(nu)
                acc = term if acc is None else acc + term
            self._memo[key] = acc
        return self._memo[key]

    def contact(self, lam: int) -> Field:
        """Contact vector component: c alpha0 for lam=0, c alpha0 x^i_0 else."""
        key = ("dee", lam)
        if key not in self._memo:
            base = self.alpha0() * self.c
            self._memo[key] = base if lam == 0 else base * _vel(lam)
        return self._memo[key]

    def ghat(self, i: int, mu: int) -> Field:
        """Vertical-restricted metric g_{i mu} + c^2 tau_i tau_mu."""
        key = ("ghat", i, mu)
        if key not in self._memo:
            self._memo[key] = self.g_low(i, mu) \
                + self.tau(i) * self.tau(mu) * self.c ** 2
        return self._memo[key]

    def Ghat(self, i: int, mu: int) -> Field:
        key = ("Ghat", i, mu)
        if key not in self._memo:
            self._memo[key] = self.ghat(i, mu) * (1.0 / self.scale)
        return self._memo[key]

    # -- adapted bases -------------------------------------------------------

    def base_b0(self) -> List[Field]:
        return [_const(1.0), _vel(1), _vel(2), _vel(3)]

    def base_bi(self, i: int) -> List[Field]:
        """b_i = d_i - c alpha0 tau_i (d_0 + x^j_0 d_j)."""
        coef = self.alpha0() * self.tau(i) * (-self.c)
        comps = []
        for lam in range(4):
            term = coef if lam == 0 else coef * _vel(lam)
            if lam == i:
                term = term + 1.0
            comps.append(term)
        return comps

    def base_beta0(self) -> List[Field]:
        """beta^0 = d^0 + c alpha0 tau_i beta^i (covector components)."""
        comps = []
        head = _const(1.0)
        for i in range(1, 4):
            head = head - self.alpha0() * self.tau(i) * self.c * _vel(i)
        comps.append(head)
        for j in range(1, 4):
            comps.append(self.alpha0() * self.tau(j) * self.c)
        return comps

    def base_betai(self, i: int) -> List[Field]:
        comps = [_vel(i) * (-1.0)]
        for lam in range(1, 4):
            comps.append(_const(1.0 if lam == i else 0.0))
        return comps

    # -- Levi-Civita connection (sign-reversed symbols) ----------------------

    def K(self, lam: int, nu: int, mu: int) -> Field:
        """K_lam^nu_mu = -(1/2) G^{nu rho} (d_lam G_{rho mu} + d_mu G_{rho lam}
        - d_rho G_{lam mu}); certified by the metric-compatibility tests."""
        if lam > mu:
            return self.K(mu, nu, lam)
        key = ("K", lam, nu, mu)
        if key not in self._memo:
            acc = None
            for rho in range(4):
                inner = self.G[rho][mu].partial(lam) \
                    + self.G[rho][lam].partial(mu) \
                    - self.G[lam][mu].partial(rho)
                term = self.Ginv[nu][rho] * inner
                acc = term if acc is None else acc + term
            self._memo[key] = acc * (-0.5)
        return self._memo[key]

    # -- electromagnetic field ----------------------------------------------

    def _f_strict(self) -> Dict[Tuple[int, int], Field]:
        if "Fdict" not in self._memo:
            comps = {}
            for a in range(4):
                for b in range(a + 1, 4):
                    comps[(a, b)] = self.A[b].partial(a) - self.A[a].partial(b)
            self._memo["Fdict"] = comps
        return self._memo["Fdict"]

    def faraday(self) -> PForm:
        """F = dA of the declared potential, strict lower components."""
        if "F" not in self._memo:
            self._memo["F"] = PForm(4, 2, dict(self._f_strict()))
        return self._memo["F"]

    def F_comp(self, a: int, b: int) -> Field:
        """Antisymmetric access to F_{ab} as an expression field."""
        if a == b:
            return _const(0.0)
        strict = self._f_strict()
        return strict[(a, b)] if a < b else -strict[(b, a)]

    def Fbar0(self, mu: int) -> Field:
        """F_{0 mu} + F_{i mu} x^i_0."""
        key = ("Fbar0", mu)
        if key not in self._memo:
            acc = self.F_comp(0, mu)
            for i in range(1, 4):
                acc = acc + self.F_comp(i, mu) * _vel(i)
            self._memo[key] = acc
        return self._memo[key]

    # -- phase connection ----------------------------------------------------

    def Gamma_nat(self, lam: int, i: int) -> Field:
        """Gravitational phase connection: K folded with the velocity chart."""
        key = ("Gnat", lam, i)
        if key not in self._memo:
            upper = self.K(lam, i, 0)
            lower = self.K(lam, 0, 0)
            for j in range(1, 4):
                upper = upper + self.K(lam, i, j) * _vel(j)
                lower = lower + self.K(lam, 0, j) * _vel(j)
            self._memo[key] = upper - _vel(i) * lower
        return self._memo[key]

    def Gamma_em(self, lam: int, i: int) -> Field:
        """Electromagnetic phase connection term (Lorentz coupling)."""
        key = ("Gem", lam, i)
        if key not in self._memo:
            alpha2 = self.alpha0() * self.alpha0()
            acc = None
            for mu in range(4):
                inner = self.F_comp(lam, mu) \
                    - alpha2 * self.gbar0(lam) * self.Fbar0(mu)
                term = self.gbar_up(i, mu) * inner
                acc = term if acc is None else acc + term
            q_over_m = self.model.charge / self.model.mass
            factor = self.inv_alpha0() * (-q_over_m / (2.0 * self.c))
            self._memo[key] = factor * acc
        return self._memo[key]

    def Gamma(self, lam: int, i: int) -> Field:
        key = ("Gamma", lam, i)
        if key not in self._memo:
            self._memo[key] = self.Gamma_nat(lam, i) + self.Gamma_em(lam, i)
        return self._memo[key]

    def gamma_bar(self, i: int) -> Field:
        """Vertical coefficient of the dynamical vector before the c alpha0
        normalization: Gamma_0^i + Gamma_j^i x^j_0."""
        key = ("gbar", i)
        if key not in self._memo:
            acc = self.Gamma(0, i)
            for j in range(1, 4):
                acc = acc + self.Gamma(j, i) * _vel(j)
            self._memo[key] = acc
        return self._memo[key]

    def dynamical_vector(self) -> VectorField:
        """gamma = c alpha0 (d_0 + x^i_0 d_i + gamma-bar^i d^0_i)."""
        if "gamma_vec" not in self._memo:
            head = self.alpha0() * self.c
            comps = [head]
            for i in range(1, 4):
                comps.append(head * _vel(i))
            for i in range(1, 4):
                comps.append(head * self.gamma_bar(i))
            self._memo["gamma_vec"] = VectorField(comps)
        return self._memo["gamma_vec"]

    # -- cosymplectic structure ---------------------------------------------

    def theta(self, lam: int) -> Field:
        """Potential 1-form component c alpha0 (G_{0 lam} + G_{i lam} x^i_0)."""
        key = ("theta", lam)
        if key not in self._memo:
            self._memo[key] = self.alpha0() * self.Gbar0(lam) * self.c
        return self._memo[key]

    def horizontal_potential(self) -> List[Field]:
        """A-up: theta plus the coupled electromagnetic potential."""
        return [self.theta(lam) + self.A[lam] * self.coupling
                for lam in range(4)]

    def cosymplectic(self) -> PForm:
        """Omega = c alpha0 Ghat_{i mu} (d^i_0 - Gamma_lam^i d^lam) ^ d^mu."""
        if "Omega" not in self._memo:
            total = None
            for i in range(1, 4):
                a_comps = {(3 + i,): _const(1.0)}
                for lam in range(4):
                    a_comps[(lam,)] = -self.Gamma(lam, i)
                a = PForm(7, 1, a_comps)
                for mu in range(4):
                    b = PForm(7, 1, {(mu,): _const(1.0)})
                    coef = self.alpha0() * self.Ghat(i, mu) * self.c
                    term = wedge(a, b).scaled(coef)
                    total = term if total is None else total + term
            self._memo["Omega"] = total
        return self._memo["Omega"]

    def poisson_bivector(self) -> PForm:
        """Lambda = (1/(c alpha0)) Gbar^{j lam} (d_lam + Gamma_lam^i d^0_i) ^ d^0_j."""
        if "Lambda" not in self._memo:
            total = None
            s = self.inv_alpha0() * (1.0 / self.c)
            for j in range(1, 4):
                u_comps: Dict[Tuple[int, ...], Field] = {}
                for lam in range(4):
                    u_comps[(lam,)] = s * self.Gbar_up(j, lam)
                for i in range(1, 4):
                    acc = None
                    for lam in range(4):
                        term = self.Gbar_up(j, lam) * self.Gamma(lam, i)
                        acc = term if acc is None else acc + term
                    u_comps[(3 + i,)] = s * acc
                u = PForm(7, 1, u_comps)
                v = PForm(7, 1, {(3 + j,): _const(1.0)})
                term = wedge(u, v)
                total = term if total is None else total + term
            self._memo["Lambda"] = total
        return self._memo["Lambda"]

    def xi(self, i: int, j: int) -> Field:
        """Xi^{ij} = Gbar^{i lam} Gamma_lam^j - Gbar^{j lam} Gamma_lam^i.

        The sum runs over all four values of lam; restricting it to the
        spacelike ones would break the agreement with the bivector route.
        """
        acc = None
        for lam in range(4):
            term = self.Gbar_up(i, lam) * self.Gamma(lam, j) \
                - self.Gbar_up(j, lam) * self.Gamma(lam, i)
            acc = term if acc is None else acc + term
        return acc

    def poisson(self, f: Field, g: Field) -> Field:
        """Coordinate Poisson bracket of two phase functions."""
        acc = None
        for i in range(1, 4):
            for lam in range(4):
                term = self.Gbar_up(i, lam) * (
                    f.partial(lam) * g.partial(3 + i)
                    - g.partial(lam) * f.partial(3 + i))
                acc = term if acc is None else acc + term
        for i in range(1, 4):
            for j in range(1, 4):
                if i == j:
                    continue
                acc = acc - self.xi(i, j) * f.partial(3 + i) * g.partial(3 + j)
        return self.inv_alpha0() * (1.0 / self.c) * acc

    # -- special phase functions ---------------------------------------------

    def special_value(self, sf: ESpecialFunction) -> Field:
        """-G(contact, X) + fbar as a phase function."""
        acc = None
        for mu in range(4):
            term = self.theta(mu) * sf.comps[mu]
            acc = term if acc is None else acc + term
        return sf.fbar - acc

    def sigma0(self, sf: ESpecialFunction) -> Field:
        """Time-scale coefficient tau(X) of a special function."""
        acc = None
        for lam in range(4):
            term = self.tau(lam) * sf.comps[lam]
            acc = term if acc is None else acc + term
        return acc

    def special_bracket(self, f: ESpecialFunction,
                        g: ESpecialFunction) -> ESpecialFunction:
        """Closed-form special bracket: Lie bracket of the lifts plus the
        twisted scalar part with the coupled electromagnetic 2-form."""
        comps: List[Field] = []
        for mu in range(4):
            acc = None
            for nu in range(4):
                term = f.comps[nu] * g.comps[mu].partial(nu) \
                    - g.comps[nu] * f.comps[mu].partial(nu)
                acc = term if acc is None else acc + term
            comps.append(acc)
        bar = None
        for lam in range(4):
            term = f.comps[lam] * g.fbar.partial(lam) \
                - g.comps[lam] * f.fbar.partial(lam)
            bar = term if bar is None else bar + term
        for a in range(4):
            for b in range(a + 1, 4):
                pair = f.comps[a] * g.comps[b] - f.comps[b] * g.comps[a]
                bar = bar + self.F_comp(a, b) * pair * self.coupling
        return ESpecialFunction(comps, bar)

    def definitional_bracket_value(self, f: ESpecialFunction,
                                   g: ESpecialFunction) -> Field:
        """Poisson route: {f,g} + sigma[f] (gamma.g) - sigma[g] (gamma.f)."""
        from .smooth import directional
        vf = self.special_value(f)
        vg = self.special_value(g)
        gam = self.dynamical_vector()
        out = self.poisson(vf, vg)
        out = out + self.sigma0(f) * directional(gam, vg)
        out = out - self.sigma0(g) * directional(gam, vf)
        return out

    def hamiltonian_lift(self, sigma: Field, f: Field) -> VectorField:
        """sigma-Hamiltonian lift of an arbitrary phase function."""
        head = sigma * self.alpha0() * self.c
        s = self.inv_alpha0() * (1.0 / self.c)
        comps: List[Field] = []
        for lam in range(4):
            acc = head if lam == 0 else head * _vel(lam)
            for j in range(1, 4):
                acc = acc - s * self.Gbar_up(j, lam) * f.partial(3 + j)
            comps.append(acc)
        for i in range(1, 4):
            acc = head * self.gamma_bar(i)
            for lam in range(4):
                acc = acc + s * self.Gbar_up(i, lam) * f.partial(lam)
            for j in range(1, 4):
                if j != i:
                    acc = acc + s * self.xi(i, j) * f.partial(3 + j)
            comps.append(acc)
        return VectorField(comps)

    # -- distinguished special functions -------------------------------------

    def coordinate_function(self, lam: int) -> ESpecialFunction:
        return ESpecialFunction([_const(0.0)] * 4, ExprField(Var(lam)))

    def hamiltonian_function(self) -> ESpecialFunction:
        """Observed energy: lift d_0, scalar part -coupled A_0."""
        comps = [_const(1.0)] + [_const(0.0)] * 3
        return ESpecialFunction(comps, -(self.A[0] * self.coupling))

    def momentum_function(self, i: int) -> ESpecialFunction:
        """Observed momentum along d^i: lift -d_i, scalar part +coupled A_i."""
        comps = [_const(0.0)] * 4
        comps[i] = _const(-1.0)
        return ESpecialFunction(comps, self.A[i] * self.coupling)

    def observed_theta(self, obs: Optional[List[Field]] = None) -> List[Field]:
        """Pullback of the kinetic potential along an observer section.

        obs gives the three observed velocities of the observer as
        spacetime fields; omitted, it is the chart (rest) observer.
        """
        if obs is None:
            obs = [_const(0.0)] * 3
        rad = self.g_low(0, 0)
        for j in range(1, 4):
            rad = rad + self.g_low(0, j) * 2.0 * obs[j - 1]
        for i in range(1, 4):
            for j in range(1, 4):
                rad = rad + self.g_low(i, j) * obs[i - 1] * obs[j - 1]
        alpha = _const(1.0) / ExprField(Call("sqrt", Call("abs", rad.node)),
                                        self.model.params)
        out = []
        for lam in range(4):
            gb = self.G[0][lam]
            for i in range(1, 4):
                gb = gb + self.G[i][lam] * obs[i - 1]
            out.append(alpha * gb * self.c)
        return out

    def observed_component(self, sf: ESpecialFunction,
                           obs: Optional[List[Field]] = None) -> Field:
        """fbar minus theta[o](X): the scalar part seen by an observer."""
        theta = self.observed_theta(obs)
        out = sf.fbar
        for lam in range(4):
            out = out - theta[lam] * sf.comps[lam]
        return out

    # -- Lorentz force and the law of motion ---------------------------------

    def lorentz_force(self) -> VectorField:
        """Spacelike force field -c alpha0 g^{lam mu} (F_{0 mu} + F_{i mu} x^i_0)."""
        comps = []
        for lam in range(4):
            acc = None
            for mu in range(4):
                term = self.g_up(lam, mu) * self.Fbar0(mu)
                acc = term if acc is None else acc + term
            comps.append(self.alpha0() * acc * (-self.c))
        return VectorField(comps)

    def law_residual(self, x, xdot, xddot) -> np.ndarray:
        """Residual of the law of motion on a proper-time trajectory sample.

        The first entry checks the parametrization (xdot^0 = c alpha0),
        the rest compare the chart acceleration of the observed velocity
        with the dynamical coefficients.  All four vanish on solutions.
        """
        x = np.asarray(x, dtype=float)
        xdot = np.asarray(xdot, dtype=float)
        xddot = np.asarray(xddot, dtype=float)
        vel = xdot[1:] / xdot[0]
        p = np.concatenate([x, vel])
        self.require_timelike(p)
        pace = self.alpha0().value(p) * self.c
        out = np.empty(4)
        out[0] = xdot[0] - pace
        for i in range(1, 4):
            accel = (xddot[i] * xdot[0] - xdot[i] * xddot[0]) / xdot[0] ** 2
            out[i] = accel - pace * self.gamma_bar(i).value(p)
        return out

    def orbit_rhs(self, state: np.ndarray) -> np.ndarray:
        """Proper-time derivative of (x^lam, x^i_0) under the dynamics."""
        self.require_timelike(state)
        pace = self.alpha0().value(state) * self.c
        out = np.empty(7)
        out[0] = pace
        for i in range(1, 4):
            out[i] = pace * state[3 + i]
            out[3 + i] = pace * self.gamma_bar(i).value(state)
        return out

    # -- observed electric/magnetic splitting --------------------------------

    def observed_splitting(self,
                           obs: Optional[List[Field]] = None) -> ObservedFields:
        """Split F into observed electric and magnetic parts.

        Everything is built from spacetime fields once the observer's
        velocities are substituted, so the results live on spacetime.
        """
        if obs is None:
            obs = [_const(0.0)] * 3
        rad = self.g_low(0, 0)
        for j in range(1, 4):
            rad = rad + self.g_low(0, j) * 2.0 * obs[j - 1]
        for i in range(1, 4):
            for j in range(1, 4):
                rad = rad + self.g_low(i, j) * obs[i - 1] * obs[j - 1]
        alpha = _const(1.0) / ExprField(Call("sqrt", Call("abs", rad.node)),
                                        self.model.params)
        delta0 = [_const(1.0)] + list(obs)

        gbar0 = []
        for lam in range(4):
            acc = self.g_low(0, lam)
            for i in range(1, 4):
                acc = acc + self.g_low(i, lam) * obs[i - 1]
            gbar0.append(acc)
        tau = [alpha * gbar0[lam] * (-1.0 / self.c) for lam in range(4)]

        # electric part: minus the raised contraction of F with the
        # observer's contact vector
        fbar = []
        for mu in range(4):
            acc = None
            for rho in range(4):
                term = self.F_comp(rho, mu) * delta0[rho]
                acc = term if acc is None else acc + term
            fbar.append(acc)
        electric = []
        for lam in range(4):
            acc = None
            for mu in range(4):
                term = self.g_up(lam, mu) * fbar[mu]
                acc = term if acc is None else acc + term
            electric.append(alpha * acc * (-self.c))

        # vertical frame b_i and its dual beta^i
        frame = []
        for i in range(1, 4):
            coef = alpha * tau[i] * (-self.c)
            comps = []
            for lam in range(4):
                term = coef * delta0[lam]
                if lam == i:
                    term = term + 1.0
                comps.append(term)
            frame.append(comps)
        beta = []
        for i in range(1, 4):
            comps = [-obs[i - 1]]
            for lam in range(1, 4):
                comps.append(_const(1.0 if lam == i else 0.0))
            beta.append(comps)

        perp = [[None] * 3 for _ in range(3)]
        for a in range(3):
            for b in range(3):
                acc = None
                for lam in range(4):
                    for mu in range(4):
                        term = self.g_low(lam, mu) \
                            * frame[a][lam] * frame[b][mu]
                        acc = term if acc is None else acc + term
                perp[a][b] = acc
        from .modelspec import det_node
        vol = ExprField(Call("sqrt",
                             det_node([[e.node for e in row] for row in perp])),
                        self.model.params)

        def f_on(a: int, b: int) -> Field:
            acc = None
            for lam in range(4):
                for mu in range(4):
                    if lam == mu:
                        continue
                    term = self.F_comp(lam, mu) * frame[a][lam] * frame[b][mu]
                    acc = term if acc is None else acc + term
            return acc

        cyc = [(1, 2, 0), (2, 0, 1), (0, 1, 2)]
        magnetic = [_const(0.0)] * 4
        for a, b, h in cyc:
            coef = (_const(self.c) / vol) * f_on(a, b)
            for lam in range(4):
                term = coef * frame[h][lam]
                magnetic[lam] = magnetic[lam] + term

        eta_forms = [PForm(4, 1, {(lam,): beta[i][lam] for lam in range(4)})
                     for i in range(3)]
        eta = wedge(wedge(eta_forms[0], eta_forms[1]), eta_forms[2]).scaled(vol)
        return ObservedFields(electric, magnetic, tau, eta)

    # -- technical identity suite --------------------------------------------

    def identity_residuals(self, p: np.ndarray) -> Dict[str, float]:
        """Evaluate the displayed contraction and derivative identities at a
        timelike phase point and return the absolute residual of each."""
        self.require_timelike(p)
        out: Dict[str, float] = {}
        c = self.c
        al = self.alpha0().value(p)
        gl = np.array([[self.g_low(a, b).value(p) for b in range(4)]
                       for a in range(4)])
        gu = np.array([[self.g_up(a, b).value(p) for b in range(4)]
                       for a in range(4)])
        v = p[4:7]
        dbar = np.array([1.0, v[0], v[1], v[2]])
        tau = np.array([self.tau(lam).value(p) for lam in range(4)])
        tau_up = np.array([self.tau_up(mu).value(p) for mu in range(4)])
        gbar0 = np.array([self.gbar0(lam).value(p) for lam in range(4)])
        gbar_low = np.vstack([gbar0] + [
            [self.ghat(i, mu).value(p) for mu in range(4)]
            for i in range(1, 4)])
        gbar_up = np.vstack([
            -(al ** 2) * dbar,
            [[self.gbar_up(i, lam).value(p) for lam in range(4)]
             for i in range(1, 4)]])

        dee = np.array([self.contact(lam).value(p) for lam in range(4)])
        out["contact-norm"] = abs(dee @ gl @ dee + c ** 2)
        out["time-normalization"] = abs(tau @ dee - 1.0)

        b = [self.base_b0()] + [self.base_bi(i) for i in range(1, 4)]
        bt = [self.base_beta0()] + [self.base_betai(i) for i in range(1, 4)]
        bv = np.array([[f.value(p) for f in row] for row in b])
        btv = np.array([[f.value(p) for f in row] for row in bt])
        out["basis-duality"] = np.max(np.abs(btv @ bv.T - np.eye(4)))
        out["splitting-orthogonality"] = max(
            abs(bv[0] @ gl @ bv[i]) for i in range(1, 4))
        out["parallel-norm"] = abs(bv[0] @ gl @ bv[0] + 1.0 / al ** 2)
        perp = np.array([[self.ghat(i, j).value(p) for j in range(1, 4)]
                         for i in range(1, 4)])
        direct = np.array([[bv[i] @ gl @ bv[j] for j in range(1, 4)]
                           for i in range(1, 4)])
        out["perp-metric"] = np.max(np.abs(perp - direct))
        gperp_up = np.array([[btv[i] @ gu @ btv[j] for j in range(1, 4)]
                             for i in range(1, 4)])
        out["perp-inverse"] = np.max(np.abs(
            perp @ gperp_up - np.eye(3)))
        out["mixed-raise"] = np.max(np.abs(
            gperp_up @ gbar_low[0, 1:] - gbar_up[1:, 0] / al ** 2))
        out["bar-0-covector"] = np.max(np.abs(
            gbar_low[0] + btv[0] / al ** 2))
        out["bar-i-raise"] = np.max(np.abs(
            gperp_up @ bv[1:] - gbar_up[1:]))

        out["bar-inverse"] = np.max(np.abs(
            gbar_low @ gbar_up.T - np.eye(4)))
        out["bar-inverse-transposed"] = np.max(np.abs(
            gbar_low.T @ gbar_up - np.eye(4)))
        out["bar-00-projector"] = np.max(np.abs(
            np.outer(gbar_low[0], gbar_up[0])
            - (-c ** 2) * np.outer(tau, tau_up)))
        out["bar-ii-projector"] = np.max(np.abs(
            gbar_low[1:].T @ gbar_up[1:]
            - (np.eye(4) + c ** 2 * np.outer(tau, tau_up))))
        out["bar-0i-mix"] = np.max(np.abs(
            gbar_low[0, 1:] @ gbar_up[1:]
            - (gu[0] / al ** 2 + dbar)))
        out["vertical-annihilation"] = np.max(np.abs(
            gbar_low[1:, 0] + gbar_low[1:, 1:] @ v))

        alpha_f = self.alpha0()
        inv_f = self.inv_alpha0()
        for j in range(1, 4):
            r = alpha_f.partial(3 + j).value(p) - al ** 3 * gbar0[j]
            out["alpha-vertical-%d" % j] = abs(r)
            r = inv_f.partial(3 + j).value(p) + al * gbar0[j]
            out["inv-alpha-vertical-%d" % j] = abs(r)
        for i in range(1, 4):
            for j in range(i, 4):
                r = inv_f.partial(3 + i).partial(3 + j).value(p) \
                    + al * self.ghat(i, j).value(p)
                out["inv-alpha-hessian-%d%d" % (i, j)] = abs(r)
        for i in range(1, 4):
            for mu in range(4):
                r = self.tau(mu).partial(3 + i).value(p) \
                    + (al / c) * self.ghat(i, mu).value(p)
                out["tau-vertical-%d%d" % (i, mu)] = abs(r)
        for lam in range(4):
            spatial = 0.0
            for a in range(4):
                for bb in range(4):
                    spatial += self.g_low(a, bb).partial(lam).value(p) \
                        * dbar[a] * dbar[bb]
            r = alpha_f.partial(lam).value(p) - 0.5 * al ** 3 * spatial
            out["alpha-horizontal-%d" % lam] = abs(r)
        return out
