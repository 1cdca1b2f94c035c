"""Named verification suites over the phase-structure modules.

Every structural law the package claims is registered here as a named
check: a law string, a default tolerance, and a runner that returns the
worst residual observed at the sampled phase points.  Checks are grouped
into fixed suites (galilei-core, galilei-brackets, galilei-quantum,
einstein-identities, einstein-brackets, einstein-quantum,
section1-general, orbits) and the registry doubles as the coverage
ledger: MODULE_INVARIANTS lists the invariant ids each theory module
promises, and a meta-test asserts each id is certified by at least one
registered check.

Residual conventions.  For ordinary checks the runner returns a maximum
absolute residual and the check passes when it is at or below the
tolerance.  A few checks are witnesses, where some quantity must be
visibly NONZERO (a volume scalar, a deliberately broken identity).  For
those the runner returns required/observed, the tolerance is 1.0, and
the same pass rule applies; the law string says so.

Determinism.  All sampling comes from counter-based Philox generators
keyed on the user seed plus a per-check tag, so reports are reproducible
bit-for-bit regardless of check execution order.
"""

import zlib
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .modelspec import BinOp, ExprField, Model, Num, Var, load_builtin, \
    load_model
from .smooth import PForm, VectorField, contract, directional, \
    exterior_derivative, lie_bracket, wedge
from .galilei import GalileiPhase, Observer, SpecialFunction
from .einstein import EinsteinPhase, ESpecialFunction
from . import quantum as qt
from . import orbit as orb
from .report import CheckRecord, SuiteReport


class UnknownSuiteError(ValueError):
    pass


class FrameworkMismatchError(ValueError):
    pass


def resolve_model(spec) -> Model:
    """Load a model from a file path, falling back to the builtin name."""
    if isinstance(spec, Model):
        return spec
    path = str(spec)
    if path.endswith(".ini"):
        return load_model(path)
    try:
        return load_builtin(path)
    except FileNotFoundError:
        return load_model(path)


# ---------------------------------------------------------------------------
# sampling and shared context

def _cf(v) -> ExprField:
    return ExprField(Num(float(v)))


def _poly(rng, nvars=4) -> ExprField:
    node = Num(float(rng.uniform(-1.0, 1.0)))
    for _ in range(int(rng.integers(1, 4))):
        term = Num(float(rng.uniform(-1.0, 1.0)))
        for _ in range(int(rng.integers(1, 3))):
            term = BinOp("*", term, Var(int(rng.integers(0, nvars))))
        node = BinOp("+", node, term)
    return ExprField(node)


def _random_gspecial(rng) -> SpecialFunction:
    return SpecialFunction(_poly(rng), [_poly(rng) for _ in range(3)],
                           _poly(rng), Observer.chart())


def _random_especial(rng) -> ESpecialFunction:
    return ESpecialFunction([_poly(rng) for _ in range(4)], _poly(rng))


class _Ctx:
    """Per-run context: the model, lazy phase object, lazy sample points."""

    def __init__(self, model: Model, npoints: int, seed: int):
        self.model = model
        self.npoints = npoints
        self.seed = seed
        self.cache: Dict[str, object] = {}
        self._phase = None
        self._points = None

    def rng(self, tag: str) -> np.random.Generator:
        key = zlib.crc32(tag.encode("ascii"))
        seq = np.random.SeedSequence([self.seed, key])
        return np.random.Generator(np.random.Philox(seq))

    @property
    def phase(self):
        if self._phase is None:
            if self.model.kind == "galilei":
                self._phase = GalileiPhase(self.model)
            else:
                self._phase = EinsteinPhase(self.model)
        return self._phase

    def _base_points(self, rng, n) -> np.ndarray:
        lo, hi = self.model.box_lo, self.model.box_hi
        span = hi - lo
        return rng.uniform(lo + 0.05 * span, hi - 0.05 * span, size=(n, 4))

    @property
    def points(self) -> np.ndarray:
        """N phase points (x^lam, x^i_0) admissible for the framework."""
        if self._points is None:
            rng = self.rng("phase-points")
            n = self.npoints
            if self.model.kind == "galilei":
                base = self._base_points(rng, n)
                vel = rng.uniform(-2.0, 2.0, size=(n, 3))
                self._points = np.hstack([base, vel])
            else:
                rad = self.phase.radicand()
                out = []
                while len(out) < n:
                    p = np.concatenate([self._base_points(rng, 1)[0],
                                        rng.uniform(-0.25, 0.25, 3)])
                    if rad.value(p) < -0.1:
                        out.append(p)
                self._points = np.array(out)
        return self._points

    def cube_points(self, tag: str, n: Optional[int] = None) -> np.ndarray:
        """Model-independent sample points in [-1, 1]^4."""
        n = self.npoints if n is None else n
        return self.rng(tag).uniform(-1.0, 1.0, size=(n, 4))


@dataclass(frozen=True)
class Check:
    name: str
    law: str
    module: str                    # theory module this check exercises
    invariant: Optional[str]       # id in MODULE_INVARIANTS, if any
    tolerance: float
    runner: Callable[[_Ctx], float]


@dataclass(frozen=True)
class Suite:
    name: str
    framework: str                 # "galilei", "einstein" or "any"
    checks: Tuple[Check, ...]


# ---------------------------------------------------------------------------
# galilei-core runners

def _g_time_normalization(ctx: _Ctx) -> float:
    gam = ctx.phase.dynamical_vector()
    return max(abs(gam.at(p)[0] - 1.0) for p in ctx.points)


def _g_contact_kernel(ctx: _Ctx) -> float:
    ig = contract(ctx.phase.dynamical_vector(), ctx.phase.cosymplectic())
    comps = [ig.component((k,)) for k in range(7)]
    worst = 0.0
    for p in ctx.points:
        worst = max(worst, max(abs(c.value(p)) for c in comps))
    return worst


def _g_time_parallel(ctx: _Ctx) -> float:
    ph = ctx.phase
    worst = 0.0
    for p in ctx.points:
        for lam in range(4):
            for mu in range(4):
                worst = max(worst, abs(ph.K(lam, 0, mu).value(p)))
    return worst


def _g_metric_parallel(ctx: _Ctx) -> float:
    # symmetrized compatibility d_lam G_ij + K_lam^h_i G_hj + K_lam^h_j G_hi
    ph = ctx.phase
    worst = 0.0
    for p in ctx.points:
        for lam in range(4):
            for i in range(1, 4):
                for j in range(i, 4):
                    r = ph.metric(i, j).partial(lam).value(p)
                    for h in range(1, 4):
                        r += ph.K(lam, h, i).value(p) \
                            * ph.metric(h, j).value(p)
                        r += ph.K(lam, h, j).value(p) \
                            * ph.metric(h, i).value(p)
                    worst = max(worst, abs(r))
    return worst


def _torsion_free(ctx: _Ctx, upper: range) -> float:
    ph = ctx.phase
    worst = 0.0
    for p in ctx.points:
        for nu in upper:
            for lam in range(4):
                for mu in range(lam + 1, 4):
                    worst = max(worst, abs(ph.K(lam, nu, mu).value(p)
                                           - ph.K(mu, nu, lam).value(p)))
    return worst


def _closed_two_form(ctx: _Ctx) -> float:
    dom = exterior_derivative(ctx.phase.cosymplectic())
    worst = 0.0
    for p in ctx.points:
        for fld in dom.comps.values():
            worst = max(worst, abs(fld.value(p)))
    return worst


def _volume_witness(ctx: _Ctx, one_form: PForm, required: float) -> float:
    top = wedge(wedge(wedge(one_form, ctx.phase.cosymplectic()),
                      ctx.phase.cosymplectic()), ctx.phase.cosymplectic())
    basis = list(np.eye(7))
    observed = min(abs(top.evaluate(p, *basis)) for p in ctx.points)
    return np.inf if observed == 0.0 else required / observed


def _g_volume(ctx: _Ctx) -> float:
    dt = PForm(7, 1, {(0,): _cf(1.0)})
    return _volume_witness(ctx, dt, 1e-6)


def _fibre_variants(p: np.ndarray, rng, bound: float) -> List[np.ndarray]:
    outs = []
    for _ in range(4):
        q = p.copy()
        q[4:7] = rng.uniform(-bound, bound, 3)
        outs.append(q)
    return outs


def _g_lift_projectable(ctx: _Ctx) -> float:
    ph = ctx.phase
    rng = ctx.rng("lift-projectable")
    worst = 0.0
    for _ in range(3):
        lift = ph.hamiltonian_lift(_random_gspecial(rng))
        for p in ctx.points[:8]:
            vals = np.array([[lift.comps[lam].value(q) for lam in range(4)]
                             for q in _fibre_variants(p, rng, 2.0)])
            worst = max(worst, np.max(vals.max(0) - vals.min(0)))
    return worst


def _g_lift_witness(ctx: _Ctx) -> float:
    # sigma = 0 lift of the non-special cube of a velocity coordinate:
    # X^a = Lambda^{ab} d_b f with f = (x^1_0)^3
    ph = ctx.phase
    lam_form = ph.poisson_bivector()
    f = ExprField(BinOp("*", BinOp("*", Var(4), Var(4)), Var(4)))
    comps = []
    for a in range(4):
        acc = None
        for b in range(7):
            term = lam_form.component((a, b)) * f.partial(b)
            acc = term if acc is None else acc + term
        comps.append(acc)
    rng = ctx.rng("lift-witness")
    observed = 0.0
    for p in ctx.points[:8]:
        vals = np.array([[c.value(q) for c in comps]
                         for q in _fibre_variants(p, rng, 2.0)])
        observed = max(observed, np.max(vals.max(0) - vals.min(0)))
    return np.inf if observed == 0.0 else 1e-3 / observed


# ---------------------------------------------------------------------------
# galilei-brackets runners

def _g_bracket_routes(ctx: _Ctx) -> float:
    ph = ctx.phase
    rng = ctx.rng("bracket-routes")
    worst = 0.0
    for _ in range(3):
        f, g = _random_gspecial(rng), _random_gspecial(rng)
        closed = ph.special_value(ph.special_bracket(f, g))
        defin = ph.definitional_bracket_value(f, g)
        for p in ctx.points:
            worst = max(worst, abs(closed.value(p) - defin.value(p)))
    return worst


def _g_tangent_morphism(ctx: _Ctx) -> float:
    ph = ctx.phase
    rng = ctx.rng("tangent-morphism")
    worst = 0.0
    for _ in range(3):
        f, g = _random_gspecial(rng), _random_gspecial(rng)
        lhs = ph.tangent_projection(ph.special_bracket(f, g))
        rhs = lie_bracket(ph.tangent_projection(f), ph.tangent_projection(g))
        for p in ctx.points:
            worst = max(worst,
                        np.max(np.abs(lhs.at(p[:4]) - rhs.at(p[:4]))))
    return worst


def _g_bracket_jacobi(ctx: _Ctx) -> float:
    ph = ctx.phase
    rng = ctx.rng("bracket-jacobi")
    f, g, h = (_random_gspecial(rng) for _ in range(3))
    total = None
    for a, b, c in ((f, g, h), (g, h, f), (h, f, g)):
        val = ph.special_value(ph.special_bracket(a, ph.special_bracket(b, c)))
        total = val if total is None else total + val
    return max(abs(total.value(p)) for p in ctx.points)


def _g_bracket_observer(ctx: _Ctx) -> float:
    ph = ctx.phase
    rng = ctx.rng("bracket-observer")
    boost = Observer([_poly(rng) for _ in range(3)])
    worst = 0.0
    for _ in range(3):
        f, g = _random_gspecial(rng), _random_gspecial(rng)
        plain = ph.special_value(ph.special_bracket(f, g))
        moved = ph.special_value(
            ph.special_bracket(ph.change_observer(f, boost),
                               ph.change_observer(g, boost)))
        for p in ctx.points:
            worst = max(worst, abs(plain.value(p) - moved.value(p)))
    return worst


# ---------------------------------------------------------------------------
# galilei-quantum runners

def _g_potential(ctx: _Ctx) -> List:
    if "gpot" not in ctx.cache:
        ctx.cache["gpot"] = ctx.phase.observed_potential()
    return ctx.cache["gpot"]


def _gq_isomorphism(ctx: _Ctx) -> float:
    ph, pot = ctx.phase, _g_potential(ctx)
    rng = ctx.rng("map-isomorphism")
    worst = 0.0
    for _ in range(3):
        f, g = _random_gspecial(rng), _random_gspecial(rng)
        lhs = qt.hermitian_bracket(qt.galilei_map(ph, f, potential=pot),
                                   qt.galilei_map(ph, g, potential=pot))
        rhs = qt.galilei_map(ph, ph.special_bracket(f, g), potential=pot)
        for p in ctx.points:
            x = p[:4]
            worst = max(worst, abs(lhs.b.value(x) - rhs.b.value(x)))
            worst = max(worst, np.max(np.abs(lhs.X.at(x) - rhs.X.at(x))))
    return worst


def _gq_observer(ctx: _Ctx) -> float:
    ph, pot = ctx.phase, _g_potential(ctx)
    rng = ctx.rng("map-observer")
    boost = Observer([_poly(rng) for _ in range(3)])
    potb = qt.boosted_potential(ph, pot, Observer.chart(), boost)
    worst = 0.0
    for _ in range(3):
        sf = _random_gspecial(rng)
        fa = qt.galilei_map(ph, sf, potential=pot)
        fb = qt.galilei_map(ph, sf, observer=boost, potential=potb)
        for p in ctx.points:
            x = p[:4]
            worst = max(worst, abs(fa.b.value(x) - fb.b.value(x)))
            worst = max(worst, np.max(np.abs(fa.X.at(x) - fb.X.at(x))))
    return worst


# ---------------------------------------------------------------------------
# einstein-identities runners

def _e_identity_dicts(ctx: _Ctx) -> List[Dict[str, float]]:
    if "idres" not in ctx.cache:
        ctx.cache["idres"] = [ctx.phase.identity_residuals(p)
                              for p in ctx.points]
    return ctx.cache["idres"]


def _e_identity_suite(ctx: _Ctx) -> float:
    return max(max(d.values()) for d in _e_identity_dicts(ctx))


def _e_velocity_normalization(ctx: _Ctx) -> float:
    worst = 0.0
    for d in _e_identity_dicts(ctx):
        worst = max(worst, d["contact-norm"], d["time-normalization"])
    return worst


def _e_time_scale(ctx: _Ctx) -> float:
    ph = ctx.phase
    gam = ph.dynamical_vector()
    worst = 0.0
    for p in ctx.points:
        tg = sum(ph.tau(lam).value(p) * gam.comps[lam].value(p)
                 for lam in range(4))
        worst = max(worst, abs(tg - 1.0))
    return worst


def _e_contact_kernel(ctx: _Ctx) -> float:
    ig = contract(ctx.phase.dynamical_vector(), ctx.phase.cosymplectic())
    comps = [ig.component((k,)) for k in range(7)]
    worst = 0.0
    for p in ctx.points:
        worst = max(worst, max(abs(c.value(p)) for c in comps))
    return worst


def _e_metric_parallel(ctx: _Ctx) -> float:
    ph = ctx.phase
    worst = 0.0
    for p in ctx.points[:24]:
        for lam in range(4):
            for nu in range(4):
                for mu in range(nu, 4):
                    r = ph.metric(nu, mu).partial(lam).value(p)
                    for rho in range(4):
                        r += ph.K(lam, rho, nu).value(p) \
                            * ph.metric(rho, mu).value(p)
                        r += ph.K(lam, rho, mu).value(p) \
                            * ph.metric(rho, nu).value(p)
                    worst = max(worst, abs(r))
    return worst


def _e_volume(ctx: _Ctx) -> float:
    theta = PForm(7, 1, {(lam,): ctx.phase.theta(lam) for lam in range(4)})
    return _volume_witness(ctx, theta, 1e-6)


def _e_potential_derivative(ctx: _Ctx) -> float:
    ph = ctx.phase
    aup = ph.horizontal_potential()
    da = exterior_derivative(PForm(7, 1, {(lam,): aup[lam]
                                          for lam in range(4)}))
    om = ph.cosymplectic()
    worst = 0.0
    for p in ctx.points:
        for a in range(7):
            for b in range(a + 1, 7):
                worst = max(worst, abs(da.component((a, b)).value(p)
                                       - om.component((a, b)).value(p)))
    return worst


# ---------------------------------------------------------------------------
# einstein-brackets runners

def _e_bracket_routes(ctx: _Ctx) -> float:
    ph = ctx.phase
    rng = ctx.rng("bracket-routes")
    worst = 0.0
    for _ in range(3):
        f, g = _random_especial(rng), _random_especial(rng)
        closed = ph.special_value(ph.special_bracket(f, g))
        defin = ph.definitional_bracket_value(f, g)
        for p in ctx.points:
            worst = max(worst, abs(closed.value(p) - defin.value(p)))
    return worst


def _e_tangent_morphism(ctx: _Ctx) -> float:
    ph = ctx.phase
    rng = ctx.rng("tangent-morphism")
    worst = 0.0
    for _ in range(3):
        f, g = _random_especial(rng), _random_especial(rng)
        br = ph.special_bracket(f, g)
        lb = lie_bracket(VectorField(list(f.comps)),
                         VectorField(list(g.comps)))
        for p in ctx.points:
            x = p[:4]
            got = np.array([br.comps[lam].value(x) for lam in range(4)])
            worst = max(worst, np.max(np.abs(got - lb.at(x))))
    return worst


def _e_pair_form(ctx: _Ctx) -> float:
    # fbar part of the bracket is X1.g2 - X2.g1 + (q/hbar) F(X1, X2)
    ph = ctx.phase
    rng = ctx.rng("pair-form")
    worst = 0.0
    for _ in range(3):
        f, g = _random_especial(rng), _random_especial(rng)
        br = ph.special_bracket(f, g)
        xf = VectorField(list(f.comps))
        xg = VectorField(list(g.comps))
        want = directional(xf, g.fbar) - directional(xg, f.fbar) \
            + qt.two_form_on(ph.faraday(), xf, xg) * ph.coupling
        for p in ctx.points:
            x = p[:4]
            worst = max(worst, abs(br.fbar.value(x) - want.value(x)))
    return worst


def _e_bracket_jacobi(ctx: _Ctx) -> float:
    ph = ctx.phase
    rng = ctx.rng("bracket-jacobi")
    f, g, h = (_random_especial(rng) for _ in range(3))
    total = None
    for a, b, c in ((f, g, h), (g, h, f), (h, f, g)):
        val = ph.special_value(ph.special_bracket(a, ph.special_bracket(b, c)))
        total = val if total is None else total + val
    return max(abs(total.value(p)) for p in ctx.points)


def _e_poisson_antisymmetry(ctx: _Ctx) -> float:
    ph = ctx.phase
    rng = ctx.rng("poisson-antisym")
    f, g = _poly(rng, 7), _poly(rng, 7)
    total = ph.poisson(f, g) + ph.poisson(g, f)
    return max(abs(total.value(p)) for p in ctx.points)


def _e_poisson_bivector(ctx: _Ctx) -> float:
    ph = ctx.phase
    lam_form = ph.poisson_bivector()
    rng = ctx.rng("poisson-bivector")
    worst = 0.0
    for _ in range(3):
        f, g = _poly(rng, 7), _poly(rng, 7)
        pois = ph.poisson(f, g)
        for p in ctx.points:
            df = np.array([f.partial(k).value(p) for k in range(7)])
            dg = np.array([g.partial(k).value(p) for k in range(7)])
            worst = max(worst, abs(lam_form.evaluate(p, df, dg)
                                   - pois.value(p)))
    return worst


# ---------------------------------------------------------------------------
# einstein-quantum runners

def _eq_isomorphism(ctx: _Ctx) -> float:
    ph = ctx.phase
    rng = ctx.rng("map-isomorphism")
    worst = 0.0
    for _ in range(3):
        f, g = _random_especial(rng), _random_especial(rng)
        lhs = qt.hermitian_bracket(qt.einstein_map(ph, f),
                                   qt.einstein_map(ph, g))
        rhs = qt.einstein_map(ph, ph.special_bracket(f, g))
        for p in ctx.points:
            x = p[:4]
            worst = max(worst, abs(lhs.b.value(x) - rhs.b.value(x)))
            worst = max(worst, np.max(np.abs(lhs.X.at(x) - rhs.X.at(x))))
    return worst


def _eq_observed_route(ctx: _Ctx) -> float:
    ph = ctx.phase
    rng = ctx.rng("observed-route")
    obs = [_cf(0.1), ExprField(BinOp("*", Num(0.05), Var(1))), _cf(-0.08)]
    worst = 0.0
    for _ in range(3):
        sf = _random_especial(rng)
        fa = qt.einstein_map(ph, sf)
        fo = qt.einstein_observed_map(ph, sf, obs)
        for p in ctx.points:
            x = p[:4]
            worst = max(worst, abs(fa.b.value(x) - fo.b.value(x)))
    return worst


# ---------------------------------------------------------------------------
# section1-general runners (model-independent gauge algebra)

def _s1_intertwining(ctx: _Ctx) -> float:
    rng = ctx.rng("intertwining")
    pts = ctx.cube_points("intertwining-points", min(ctx.npoints, 50))
    worst = 0.0
    for _ in range(3):
        A = [_poly(rng) for _ in range(4)]
        phi = qt.curvature_phi(A)
        for _ in range(3):
            p1 = qt.GaugePair(VectorField([_poly(rng) for _ in range(4)]),
                              _poly(rng))
            p2 = qt.GaugePair(VectorField([_poly(rng) for _ in range(4)]),
                              _poly(rng))
            lhs = qt.hermitian_bracket(qt.classify_j(A, p1),
                                       qt.classify_j(A, p2))
            rhs = qt.classify_j(A, qt.pair_bracket(phi, p1, p2))
            for x in pts:
                worst = max(worst, abs(lhs.b.value(x) - rhs.b.value(x)))
                worst = max(worst, np.max(np.abs(lhs.X.at(x) - rhs.X.at(x))))
    return worst


def _s1_jacobi(ctx: _Ctx) -> float:
    rng = ctx.rng("pair-jacobi")
    pts = ctx.cube_points("pair-jacobi-points", min(ctx.npoints, 50))
    A = [_poly(rng) for _ in range(4)]
    phi = qt.curvature_phi(A)
    trips = [qt.GaugePair(VectorField([_poly(rng) for _ in range(4)]),
                          _poly(rng)) for _ in range(3)]
    cyc = qt.jacobi_cycle(phi, *trips)
    worst = 0.0
    for x in pts:
        worst = max(worst, abs(cyc.bbar.value(x)))
        worst = max(worst, np.max(np.abs(cyc.X.at(x))))
    return worst


def _s1_jacobi_witness(ctx: _Ctx) -> float:
    # twist x^0 d1^d2 is not closed; translations see the defect d(twist)
    phi = PForm(4, 2, {(1, 2): ExprField(Var(0))})
    trips = [qt.GaugePair(VectorField([_cf(1.0 if k == m else 0.0)
                                       for k in range(4)]), _cf(0.0))
             for m in range(3)]
    cyc = qt.jacobi_cycle(phi, *trips)
    pts = ctx.cube_points("jacobi-witness", 8)
    observed = max(abs(cyc.bbar.value(x)) for x in pts)
    return np.inf if observed == 0.0 else 1e-3 / observed


def _s1_central_extension(ctx: _Ctx) -> float:
    rng = ctx.rng("central-extension")
    pts = ctx.cube_points("central-extension-points", min(ctx.npoints, 50))
    A = [_poly(rng) for _ in range(4)]
    y = qt.HermitianVF(VectorField([_poly(rng) for _ in range(4)]),
                       _poly(rng))
    pair = qt.classify_h(A, y)
    zero = VectorField([_cf(0.0)] * 4)
    m1 = qt.HermitianVF(zero, _poly(rng))
    m2 = qt.HermitianVF(zero, _poly(rng))
    kernel_br = qt.hermitian_bracket(m1, m2)
    ideal_br = qt.hermitian_bracket(y, m1)
    drift = directional(y.X, m1.b)
    worst = 0.0
    for x in pts:
        worst = max(worst, np.max(np.abs(pair.X.at(x) - y.X.at(x))))
        worst = max(worst, abs(kernel_br.b.value(x)))
        worst = max(worst, np.max(np.abs(kernel_br.X.at(x))))
        worst = max(worst, np.max(np.abs(ideal_br.X.at(x))))
        worst = max(worst, abs(ideal_br.b.value(x) - drift.value(x)))
    return worst


def _s1_complex_linearity(ctx: _Ctx) -> float:
    rng = ctx.rng("complex-linearity")
    pts = ctx.cube_points("complex-linearity-points", min(ctx.npoints, 100))
    worst = 0.0
    for _ in range(3):
        y = qt.HermitianVF(VectorField([_poly(rng) for _ in range(4)]),
                           _poly(rng))
        enc = qt.to_linear_field(y)
        _, resid = qt.is_hermitian(enc, pts)
        worst = max(worst, resid)
        back = qt.to_hermitian_field(enc)
        for x in pts[:10]:
            worst = max(worst, abs(back.b.value(x) - y.b.value(x)))
    return worst


# ---------------------------------------------------------------------------
# orbits runners (fixed scenarios on the shipped oracle models)

def _orbit_straight_line(ctx: _Ctx) -> float:
    model = load_builtin("flat-free")
    x0 = [0.0, -0.5, 0.0, 0.0]
    v0 = [0.6, 0.0, 0.0]
    res = orb.integrate_orbit(model, "galilei", x0, v0, 1.5, 1e-3)
    line = np.array(x0) + np.outer(res.times, [1.0, 0.6, 0.0, 0.0])
    dev = np.max(np.abs(res.states[:, :4] - line))
    vdev = np.max(np.abs(res.states[:, 4:7] - np.array(v0)))
    return max(dev, vdev, res.max_law_residual)


def _orbit_cyclotron(ctx: _Ctx) -> float:
    model = load_builtin("uniform-b")
    b_strength = model.params["B"]
    speed = 0.5
    radius = model.mass * speed / (model.charge * b_strength)
    period = 2.0 * np.pi * model.mass / (model.charge * b_strength)
    res = orb.integrate_orbit(model, "galilei", [0.0, 0.0, 0.0, 0.0],
                              [speed, 0.0, 0.0], period, 1e-3)
    worst = 0.0
    for i in (1, 2):
        spread = res.states[:, i].max() - res.states[:, i].min()
        worst = max(worst, abs(spread / 2.0 - radius) / radius)
    return worst


def _orbit_hyperbolic(ctx: _Ctx) -> float:
    model = load_builtin("uniform-e")
    e_strength = model.params["E"]
    res = orb.integrate_orbit(model, "einstein", [0.0, 0.0, 0.0, 0.0],
                              [0.0, 0.0, 0.0], 2.0, 1e-3)
    s = res.times
    want0 = np.sinh(e_strength * s) / e_strength
    want1 = (np.cosh(e_strength * s) - 1.0) / e_strength
    dev0 = np.max(np.abs(res.states[:, 0] - want0))
    dev1 = np.max(np.abs(res.states[:, 1] - want1))
    rest = np.max(np.abs(res.states[:, (2, 3)]))
    return max(dev0, dev1, rest)


# ---------------------------------------------------------------------------
# registry

MODULE_INVARIANTS: Dict[str, List[str]] = {
    "galilei": [
        "contact-normalization",
        "connection-compatibility",
        "bracket-route-agreement",
        "bracket-tangent-morphism",
        "bracket-jacobi",
        "lift-projectability",
        "bracket-observer-independence",
    ],
    "einstein": [
        "phase-identity-suite",
        "cosymplectic-pair",
        "horizontal-potential-derivative",
        "bracket-tangent-morphism",
        "bracket-jacobi",
        "poisson-bivector-agreement",
    ],
    "quantum": [
        "classification-intertwining",
        "central-extension-exactness",
        "hermitian-complex-linearity",
        "galilei-map-isomorphism",
        "galilei-map-observer-independence",
        "einstein-map-isomorphism",
    ],
}


def _mk(name, law, module, invariant, tol, runner) -> Check:
    return Check(name, law, module, invariant, tol, runner)


SUITES: Dict[str, Suite] = {}


def _suite(name, framework, checks):
    SUITES[name] = Suite(name, framework, tuple(checks))


_suite("galilei-core", "galilei", [
    _mk("contact-time-normalization", "i(gamma) dt = 1",
        "galilei", "contact-normalization", 1e-9, _g_time_normalization),
    _mk("contact-kernel", "i(gamma) Omega = 0",
        "galilei", "contact-normalization", 1e-9, _g_contact_kernel),
    _mk("connection-time-parallel", "nabla dt = 0 for the joined connection",
        "galilei", "connection-compatibility", 1e-8, _g_time_parallel),
    _mk("connection-metric-parallel", "nabla g = 0 (symmetrized in i, j)",
        "galilei", "connection-compatibility", 1e-8, _g_metric_parallel),
    _mk("connection-torsion-free", "K_lam^i_mu = K_mu^i_lam",
        "galilei", "connection-compatibility", 1e-8,
        lambda ctx: _torsion_free(ctx, range(1, 4))),
    _mk("cosymplectic-closed", "d Omega = 0",
        "galilei", None, 1e-7, _closed_two_form),
    _mk("cosymplectic-volume",
        "dt ^ Omega^3 nondegenerate (reported as required/observed)",
        "galilei", None, 1.0, _g_volume),
    _mk("lift-projectable",
        "hamiltonian lift of a special function pushes down to spacetime",
        "galilei", "lift-projectability", 1e-9, _g_lift_projectable),
    _mk("lift-witness-not-projectable",
        "lift of (x^1_0)^3 stays fibre-dependent (required/observed)",
        "galilei", "lift-projectability", 1.0, _g_lift_witness),
])

_suite("galilei-brackets", "galilei", [
    _mk("bracket-closed-vs-definitional",
        "closed-form [[f,g]] = {f,g} + sigma-corrected drift terms",
        "galilei", "bracket-route-agreement", 1e-8, _g_bracket_routes),
    _mk("bracket-tangent-morphism", "X[[f,g]] = [X f, X g]",
        "galilei", "bracket-tangent-morphism", 1e-8, _g_tangent_morphism),
    _mk("bracket-jacobi", "cyclic sum [[f,[g,h]]] = 0",
        "galilei", "bracket-jacobi", 1e-7, _g_bracket_jacobi),
    _mk("bracket-observer-independence",
        "bracket value is unchanged under observer re-representation",
        "galilei", "bracket-observer-independence", 1e-8,
        _g_bracket_observer),
])

_suite("galilei-quantum", "galilei", [
    _mk("quantum-map-isomorphism",
        "[F f, F g] = F [[f,g]] for the represented Hermitian fields",
        "quantum", "galilei-map-isomorphism", 1e-8, _gq_isomorphism),
    _mk("quantum-observer-independence",
        "F computed against a boosted observer and gauge is unchanged",
        "quantum", "galilei-map-observer-independence", 1e-8, _gq_observer),
])

_suite("einstein-identities", "einstein", [
    _mk("phase-identity-suite",
        "alpha0 / tau / d contraction and derivative identity suite",
        "einstein", "phase-identity-suite", 1e-8, _e_identity_suite),
    _mk("velocity-normalization", "g(d, d) = -c^2 and tau(d) = 1",
        "einstein", None, 1e-9, _e_velocity_normalization),
    _mk("contact-time-normalization", "tau(gamma) = 1",
        "einstein", None, 1e-9, _e_time_scale),
    _mk("contact-kernel", "i(gamma) Omega = 0",
        "einstein", None, 1e-8, _e_contact_kernel),
    _mk("connection-metric-parallel", "nabla g = 0",
        "einstein", None, 1e-8, _e_metric_parallel),
    _mk("connection-torsion-free", "K_lam^nu_mu = K_mu^nu_lam",
        "einstein", None, 1e-8,
        lambda ctx: _torsion_free(ctx, range(4))),
    _mk("cosymplectic-closed", "d Omega = 0",
        "einstein", "cosymplectic-pair", 1e-7, _closed_two_form),
    _mk("cosymplectic-volume",
        "theta ^ Omega^3 nondegenerate (reported as required/observed)",
        "einstein", "cosymplectic-pair", 1.0, _e_volume),
    _mk("horizontal-potential-derivative", "d(theta + (q/hbar) A) = Omega",
        "einstein", "horizontal-potential-derivative", 1e-7,
        _e_potential_derivative),
])

_suite("einstein-brackets", "einstein", [
    _mk("bracket-closed-vs-definitional",
        "closed-form [[f,g]] = {f,g} + sigma-corrected drift terms",
        "einstein", None, 1e-7, _e_bracket_routes),
    _mk("bracket-tangent-morphism", "X[[f,g]] = [X f, X g]",
        "einstein", "bracket-tangent-morphism", 1e-8, _e_tangent_morphism),
    _mk("bracket-pair-form",
        "fbar[[f,g]] = X1.g2 - X2.g1 + (q/hbar) F(X1, X2)",
        "einstein", "bracket-tangent-morphism", 1e-8, _e_pair_form),
    _mk("bracket-jacobi", "cyclic sum [[f,[g,h]]] = 0",
        "einstein", "bracket-jacobi", 1e-7, _e_bracket_jacobi),
    _mk("poisson-antisymmetry", "{f,g} = -{g,f}",
        "einstein", "poisson-bivector-agreement", 1e-8,
        _e_poisson_antisymmetry),
    _mk("poisson-bivector-route", "{f,g} = Lambda(df, dg)",
        "einstein", "poisson-bivector-agreement", 1e-8, _e_poisson_bivector),
])

_suite("einstein-quantum", "einstein", [
    _mk("quantum-map-isomorphism",
        "[F f, F g] = F [[f,g]] for the represented Hermitian fields",
        "quantum", "einstein-map-isomorphism", 1e-8, _eq_isomorphism),
    _mk("quantum-observed-route",
        "F built through an observer's potential equals the direct F",
        "quantum", None, 1e-8, _eq_observed_route),
])

_suite("section1-general", "any", [
    _mk("classification-intertwining",
        "classify_j carries the twisted pair bracket to the Hermitian one",
        "quantum", "classification-intertwining", 1e-8, _s1_intertwining),
    _mk("pair-bracket-jacobi", "Jacobi cycle vanishes for a closed twist",
        "quantum", None, 1e-8, _s1_jacobi),
    _mk("jacobi-witness-nonclosed",
        "a non-closed twist breaks Jacobi (reported as required/observed)",
        "quantum", None, 1.0, _s1_jacobi_witness),
    _mk("central-extension-exactness",
        "base projection is a morphism; multipliers form an abelian ideal",
        "quantum", "central-extension-exactness", 1e-10,
        _s1_central_extension),
    _mk("hermitian-complex-linearity",
        "b-encoding passes is_hermitian and decodes losslessly",
        "quantum", "hermitian-complex-linearity", 1e-9,
        _s1_complex_linearity),
])

_suite("orbits", "any", [
    _mk("orbit-free-straight-line", "force-free motion is a straight line",
        "harness", None, 1e-12, _orbit_straight_line),
    _mk("orbit-cyclotron-radius",
        "uniform-B circular orbit has radius m v / (q B), relative error",
        "harness", None, 1e-5, _orbit_cyclotron),
    _mk("orbit-hyperbolic-worldline",
        "uniform-E worldline matches the analytic hyperbola",
        "harness", None, 1e-5, _orbit_hyperbolic),
])


def suite_names() -> List[str]:
    return list(SUITES)


def check_names(suite: Optional[str] = None) -> List[str]:
    if suite is not None:
        return [c.name for c in SUITES[suite].checks]
    out = []
    for s in SUITES.values():
        out.extend(c.name for c in s.checks)
    return out


# ---------------------------------------------------------------------------
# driver

def run_suite(model, suite_name: str, points: int = 100, seed: int = 0,
              tol_overrides: Optional[Dict[str, float]] = None) -> SuiteReport:
    """Run one named suite against a model and return its report.

    model may be a Model instance, a path to a model file, or the name
    of a shipped builtin.  Raises UnknownSuiteError for a bad suite
    name, FrameworkMismatchError when the model kind does not fit, and
    ValueError for tolerance overrides naming no check in the suite.
    """
    import time

    if suite_name not in SUITES:
        raise UnknownSuiteError(
            "unknown suite %r; available: %s"
            % (suite_name, ", ".join(suite_names())))
    suite = SUITES[suite_name]
    model = resolve_model(model)
    if suite.framework != "any" and suite.framework != model.kind:
        raise FrameworkMismatchError(
            "suite %r needs a %s model but %r is %s"
            % (suite_name, suite.framework, model.name, model.kind))
    overrides = dict(tol_overrides or {})
    known = {c.name for c in suite.checks}
    for name in overrides:
        if name not in known:
            raise ValueError("tolerance override %r matches no check in %r"
                             % (name, suite_name))

    ctx = _Ctx(model, points, seed)
    start = time.perf_counter()
    records = []
    for check in suite.checks:
        tol = overrides.get(check.name, check.tolerance)
        residual = float(check.runner(ctx))
        records.append(CheckRecord(check.name, check.law, residual, tol))
    return SuiteReport(suite_name, model.name, seed, points, records,
                       wall_time=time.perf_counter() - start)
