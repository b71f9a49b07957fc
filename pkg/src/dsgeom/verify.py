"""Verification commands.  Each builds a :class:`Report` from a :class:`RunConfig`.

Randomness: one ``numpy.random.default_rng(cfg.seed)`` per command, drawn in
the order the checks appear below.  Printed formulas that disagree with
their oracle are recorded with status ``reported``; everything else is
pass/fail.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from . import closed_forms as cf
from .charts import (
    CHART_NAMES,
    beltrami_lift,
    beltrami_metric,
    beltrami_project,
    chart_metric,
    embedding_residual,
    jacobian,
    make_chart,
    pullback_metric,
    quoted_beltrami_jacobian,
    reduced_static_metric,
    reduced_static_transform,
    sample_points,
    static_printed_lhs,
    zeta_substitution_residual,
)
from .config import RunConfig
from .errors import ConfigError, EquatorialSingularityError, NonTangentFieldError, ProjectiveConeError
from .geodesic import BOUNDARY_HIT, GeodesicState, frame_acceleration, integrate, screened_static_states, write_csv
from .isometry import (
    VectorField,
    ambient_generator,
    ambient_generators,
    audit_killing_equations,
    check_generators,
    coordinate_field,
    generator_sample_matrix,
    killing_residual,
    match_row,
    pullback_field,
    pulled_back,
)
from .report import Report
from .tensor import (
    bianchi_residual,
    christoffel,
    covariant_derivative,
    flat_metric,
    metric_compatibility,
    plane_gram,
    riemann,
    sectional_from_report,
)
from .warped import (
    WarpedMetric,
    bochner_residual,
    comparison_ode_witness,
    hessian_identity_residual,
    laplacian_r_closed,
    lct_check,
    quoted_laplacian_r,
    radial_hessian,
    radial_laplacian,
)

STATIC = "static-47-corrected"


def _static(R: float):
    ch = make_chart(STATIC, R)
    return ch, chart_metric(ch)


def _tag(R: float) -> str:
    return f"R={R:g}"


def _maxabs(a) -> float:
    return float(np.max(np.abs(a)))


# ------------------------------------------------------------ connection


def cmd_verify_christoffel(cfg: RunConfig) -> Report:
    rep = Report("verify-christoffel", cfg.as_dict())
    rng = np.random.default_rng(cfg.seed)
    listed = np.zeros((4, 4, 4), dtype=bool)
    for idx in cf.LISTED:
        listed[idx] = True
    for R in cfg.radii:
        ch, g = _static(R)
        tag = _tag(R)
        p = sample_points(ch, rng, cfg.samples)
        gam = christoffel(g, p, cfg.step, cfg.richardson)

        rep.add(f"christoffel.derived.{tag}", "Eq(48) Christoffel symbols (derived)",
                _maxabs(gam - cf.derived_christoffel(R, p)), cfg.tol_first)
        printed = cf.printed_christoffel(R, p)
        per_symbol = {
            label: _maxabs(gam[..., a, b, c] - printed[..., a, b, c])
            for (a, b, c), label in cf.CHRISTOFFEL_LABELS.items()
        }
        dev = _maxabs(gam - printed)
        rep.add(f"christoffel.printed.{tag}", "Eq(48) Christoffel list as printed", dev, cfg.tol_first,
                reported=dev > cfg.tol_first, symbols=per_symbol)
        rep.add(f"christoffel.unlisted.{tag}", "Eq(48) Christoffel list, unlisted symbols",
                _maxabs(gam[..., ~listed]), cfg.tol_first)

        table = cf.printed_connection_table(R, p)
        worst = 0.0
        for mu in range(4):
            for nu in range(4):
                e_mu, e_nu = coordinate_field(4, mu), coordinate_field(4, nu)
                dd = covariant_derivative(g, e_mu.fn, e_nu.fn, p, cfg.step, dY=e_nu.dfn, richardson=cfg.richardson)
                worst = max(worst, _maxabs(dd - table[..., mu, nu, :]))
        rep.add(f"connection.table.{tag}", "Eq(48) covariant derivatives D(d_mu)", worst, cfg.tol_first)

        acc = cf.printed_accelerations(R, p)
        for name, mu in cf.ACCELERATION_INDEX.items():
            got = frame_acceleration(g, mu, p, cfg.step, cfg.richardson)
            rep.add(f"acceleration.{name}.{tag}", f"Eq(48) acceleration a_{name}",
                    _maxabs(got - acc[name]), cfg.tol_first)
        rep.add(f"compatibility.{tag}", "Eq(48) metric compatibility",
                metric_compatibility(g, p, cfg.step), 1e-7)
    return rep


# ------------------------------------------------------------ isometries


def _conservation(rep: Report, cfg: RunConfig, rng: np.random.Generator) -> None:
    R = cfg.radius
    ch, g = _static(R)
    margin = cfg.boundary_margin * R
    s0, rejected = screened_static_states(g, rng, R, cfg.geodesics, cfg.tau_end, cfg.speed, margin)
    tr = integrate(g, s0, cfg.tau_end, cfg.dt, cfg.step, cfg.sample_every, margin=margin)
    completed = int(np.sum(tr.status != BOUNDARY_HIT))
    all_done = completed == cfg.geodesics
    nd = float(np.max(tr.norm_drift()))
    rep.add("conservation.norm", "geodesic norm g(v,v)", nd, cfg.tol_integrator,
            passed=all_done and nd <= cfg.tol_integrator, completed=completed, geodesics=cfg.geodesics, screened_out=rejected,
            tau_end=cfg.tau_end, dt=cfg.dt)
    for U in ambient_generators(ch.target):
        drift = float(np.max(tr.charge_drift(g, pulled_back(ch, U))))
        rep.add(f"conservation.charge.{U.label}", "Eq(50) conserved charge", drift, cfg.tol_integrator,
                passed=all_done and drift <= cfg.tol_integrator)


def cmd_verify_killing(cfg: RunConfig) -> Report:
    rep = Report("verify-killing", cfg.as_dict())
    rng = np.random.default_rng(cfg.seed)
    rows: dict = {}
    for R in cfg.radii:
        ch, g = _static(R)
        tag = _tag(R)
        p = sample_points(ch, rng, cfg.killing_points)
        for gc in check_generators(g, ch, p, cfg.step):
            rep.add(f"killing.generator.{gc.label}.{tag}", "Eq(50) u_AB pulled back", gc.killing_residual,
                    cfg.tol_first)
            rep.add(f"killing.tangency.{gc.label}.{tag}", "Eq(50) u_AB tangent to quadric", gc.tangency,
                    1e-12 * R**2, passed=gc.tangency <= 1e-12 * R**2 and gc.preserves_metric == 0.0)

        pr = sample_points(ch, rng, cfg.rank_points)
        mat = generator_sample_matrix(ch, pr)
        sv = np.linalg.svd(mat, compute_uv=False)
        rank = int(np.sum(sv > 1e-8 * sv[0]))
        rep.add(f"killing.rank.{tag}", "ten Killing vectors", float(10 - rank), 0.0,
                rank=rank, singular_ratio=float(sv[-1] / sv[0]))

        # controls
        rep.add(f"killing.control.d_t.{tag}", "Eq(48) static", _maxabs(killing_residual(g, coordinate_field(4, 0), p)), 1e-8)
        rep.add(f"killing.control.d_phi.{tag}", "Eq(48) axial", _maxabs(killing_residual(g, coordinate_field(4, 3), p)), 1e-8)
        dilation = VectorField(lambda q: q * np.array([0.0, 1.0, 0.0, 0.0]), "rho d_rho")
        neg = _maxabs(killing_residual(g, dilation, p))
        rep.add(f"killing.control.rho_d_rho.{tag}", "negative control", neg, 0.1, passed=neg > 0.1)
        boost = pullback_field(ch, ambient_generator(0, 4, ch.target), p)
        rep.add(f"killing.u04_is_time.{tag}", "Eq(47) corrected, u_04 = -R d_t",
                _maxabs(boost - np.array([-R, 0.0, 0.0, 0.0])), 1e-10)

        pt = sample_points(ch, rng, cfg.table_points)
        for row in range(1, 11):
            m = match_row(g, ch, row, pt, cfg.tol_first, cfg.step)
            rep.add(f"table1.row{row}.{tag}", f"Table 1 row {row}", m.span_residual, cfg.tol_first,
                    reported=not m.matched, nearest=m.nearest, nearest_scale=m.nearest_scale,
                    nearest_residual=m.nearest_residual, row_killing_residual=m.killing_residual)
            rows.setdefault(f"row{row}", {})[tag] = {
                "matched": m.matched,
                "nearest": m.nearest,
                "coefficients": m.coefficients,
            }

        for eq in audit_killing_equations(ch, p, cfg.step):
            rep.add(f"killing.equation.generated.{eq.label}.{tag}", "Killing equations (generated)",
                    eq.max_generated, cfg.tol_first)
            if eq.present:
                rep.add(f"killing.equation.printed.{eq.label}.{tag}", "Killing equation list as printed",
                        eq.coeff_deviation, cfg.tol_first, reported=eq.coeff_deviation > cfg.tol_first,
                        on_generators=eq.max_on_generators)
            else:
                rep.add(f"killing.equation.printed.{eq.label}.{tag}", "Killing equation list as printed",
                        eq.coeff_deviation, cfg.tol_first, reported=True, note="absent from the printed list")
    _conservation(rep, cfg, rng)
    rep.sections["table1"] = rows
    return rep


# ------------------------------------------------------------ curvature


def _random_planes(g, p, rng, plane_tol: float = 1e-8):
    u = rng.normal(size=p.shape)
    v = rng.normal(size=p.shape)
    gm = g(p)
    for _ in range(100):
        size = np.sum(u * u, -1) * np.sum(v * v, -1)
        bad = np.abs(plane_gram(gm, u, v)) <= plane_tol * size
        if not np.any(bad):
            break
        u[bad] = rng.normal(size=u[bad].shape)
        v[bad] = rng.normal(size=v[bad].shape)
    return u, v


def cmd_curvature(cfg: RunConfig) -> Report:
    rep = Report("curvature", cfg.as_dict())
    rng = np.random.default_rng(cfg.seed)
    R = cfg.radius
    ch, g = _static(R)
    p = sample_points(ch, rng, cfg.planes)
    u, v = _random_planes(g, p, rng)
    cr = riemann(g, p, cfg.step, cfg.curvature_step, cfg.richardson)
    K = sectional_from_report(g, cr, u, v)
    rep.add("static.sectional_spread", "Eq(48) constant curvature", float(np.ptp(K)), cfg.tol_second,
            mean_K_R2=float(np.mean(K)) * R**2, min_K=float(np.min(K)), max_K=float(np.max(K)))
    gm = g(p)
    diag = np.einsum("...ii->...i", cr.ricci) / np.einsum("...ii->...i", gm)
    lam = float(np.mean(diag))
    rep.add("static.ricci_proportional", "R_mu_nu = Lambda g_mu_nu", _maxabs(cr.ricci - lam * gm), cfg.tol_second,
            measured_lambda=lam)
    lam_r2 = lam * R**2
    rep.add("static.lambda_magnitude", "Lambda = +-3/R^2", abs(abs(lam_r2) - 3.0), 1e-3,
            measured_lambda_R2=lam_r2, measured_sign=int(np.sign(lam_r2)))
    rep.add("static.ricci_symmetry", "Ricci symmetric", _maxabs(cr.ricci - np.swapaxes(cr.ricci, -1, -2)), cfg.tol_second)
    rep.add("static.riemann_antisymmetry", "Riemann antisymmetric in last pair",
            _maxabs(cr.riemann + np.swapaxes(cr.riemann, -1, -2)), cfg.tol_second)
    rep.add("static.bianchi", "first Bianchi identity", bianchi_residual(cr), cfg.tol_first)
    rep.add("static.compatibility", "metric compatibility", metric_compatibility(g, p, cfg.step), 1e-7)

    for k, lo, hi in ((-1.0, 0.5, 3.0), (1.0, 0.3, 2.5)):
        wm = WarpedMetric(4, k)
        pts = wm.point(rng.uniform(lo, hi, cfg.planes))
        pts[:, 1:3] = rng.uniform(0.3, np.pi - 0.3, (cfg.planes, 2))
        pts[:, 3] = rng.uniform(0.0, 2 * np.pi, cfg.planes)
        wu, wv = _random_planes(wm.field, pts, rng)
        wr = riemann(wm.field, pts, cfg.step, cfg.curvature_step, cfg.richardson)
        wk = sectional_from_report(wm.field, wr, wu, wv)
        rep.add(f"warped.sectional.k={k:g}", "Eq(31) K = k", _maxabs(wk - k), cfg.tol_second)
        rep.add(f"warped.ricci_rr.k={k:g}", "Ric(d_r, d_r) = (n-1)k", _maxabs(wr.ricci[:, 0, 0] - 3 * k), cfg.tol_second)

    flat = flat_metric([-1.0, 1.0, 1.0, 1.0])
    fp = rng.normal(size=(10, 4))
    fr = riemann(flat, fp, cfg.step, cfg.curvature_step)
    rep.add("flat.riemann", "flat metric", _maxabs(fr.riemann), 1e-8)
    return rep


# ------------------------------------------------------------ comparison theorem


def cmd_lct(cfg: RunConfig) -> Report:
    rep = Report("lct", cfg.as_dict())
    n = cfg.lct_dim
    h, h2 = cfg.step, cfg.curvature_step
    r = np.linspace(cfg.r_min, cfg.r_max, cfg.r_count)
    wm = WarpedMetric(n, -1.0)

    lap = radial_laplacian(wm, r, h, h2)
    rep.add("lct.laplacian.k=-1", "Eq(16) Laplacian of r", _maxabs(lap - laplacian_r_closed(-1.0, r, n)), cfg.tol_second)
    for k in (-4.0, 4.0):
        rk = r[r < np.pi / np.sqrt(abs(k)) - 0.1] if k > 0 else r
        dev = _maxabs(quoted_laplacian_r(k, rk, n) - laplacian_r_closed(k, rk, n))
        rep.add(f"lct.laplacian.printed_prefactor.k={k:g}", "Eq(16) prefactor as printed", dev, cfg.tol_second,
                reported=dev > cfg.tol_second)
    rep.add("lct.hessian_identity", "Eq(10) Hr = psi'/psi (g - dr dr)", hessian_identity_residual(wm, r, h=h, h2=h2),
            cfg.tol_second)
    hess = radial_hessian(wm, r, h, h2)
    rep.add("lct.hessian_radial", "Eq(3) Hr(d_r, d_r) = 0", _maxabs(hess[:, 0, 0]), cfg.tol_first)
    rep.add("lct.hessian_mixed", "Eq(6) Hr(d_r, X) = 0", _maxabs(hess[:, 0, 1:]), cfg.tol_first)

    eq = lct_check(-1.0, wm, r, h, h2, tol=cfg.tol_second)
    rep.add("lct.equality", "Theorem 1 equality case", eq.max_equality_deviation, cfg.tol_second,
            passed=eq.hypothesis_holds and eq.max_equality_deviation <= cfg.tol_second,
            hypothesis_margin=eq.hypothesis_margin)
    rs = np.linspace(cfg.r_min, cfg.sphere_r_max, cfg.r_count)
    sph = lct_check(-1.0, WarpedMetric(n, 1.0), rs, h, h2, tol=cfg.tol_second)
    low = float(np.min(sph.margin))
    rep.add("lct.sphere_inequality", "Theorem 1 Laplacian bound", low, 0.0,
            passed=sph.hypothesis_holds and low > 0, hypothesis_margin=sph.hypothesis_margin)
    # the k = +1 bound is only defined below r = pi
    neg = lct_check(1.0, wm, rs, h, h2, tol=cfg.tol_second)
    rep.add("lct.hypothesis_control", "Ricci lower bound violated", neg.hypothesis_margin, 0.0,
            passed=not neg.hypothesis_holds, notes=neg.notes)

    for k in (-1.0, 0.0, 1.0):
        hi = 4.0 if k <= 0 else 0.9 * np.pi / np.sqrt(k)
        radii = np.linspace(0.2, hi, cfg.bochner_radii)
        worst = max(bochner_residual(WarpedMetric(n, k), float(x), h, h2) for x in radii)
        rep.add(f"lct.bochner.k={k:g}", "Eq(22) Bochner identity", worst, 1e-3)
    rep.add("lct.ode_witness", "Eq(26) comparison ODE", comparison_ode_witness(-1.0, n, r), 1e-10)
    return rep


# ------------------------------------------------------------ Beltrami


def cmd_beltrami(cfg: RunConfig) -> Report:
    rep = Report("beltrami", cfg.as_dict())
    rng = np.random.default_rng(cfg.seed)
    R = cfg.radius
    ch = make_chart("beltrami", R)
    x = sample_points(ch, rng, cfg.roundtrip_points)
    xi = beltrami_lift(x, R)
    back = beltrami_project(xi, R)
    rep.add("beltrami.roundtrip", "Eq(51)-(52) lift and projection", _maxabs(back - x) / max(1.0, _maxabs(x)), 1e-12)
    rep.add("beltrami.constraint", "Eq(46) on lifted points", _maxabs(embedding_residual(ch, x)), 1e-12 * R**2)

    q = x[: cfg.pullback_points]
    analytic = pullback_metric(ch, q, analytic=True)
    numeric = pullback_metric(ch, q, cfg.step, richardson=True)
    rep.add("beltrami.jacobian", "Eq(53) Jacobian vs finite differences",
            _maxabs(jacobian(ch, q, analytic=True) - jacobian(ch, q, cfg.step, richardson=True)), 1e-8)
    rep.add("beltrami.pullback", "Eq(53) pullback vs finite-difference pullback", _maxabs(analytic - numeric), 1e-8)
    rep.add("beltrami.closed_form", "Eq(54) induced metric (derived)", _maxabs(beltrami_metric(R)(q) - analytic), 1e-10)
    origin = pullback_metric(ch, np.zeros(4), analytic=True)
    rep.add("beltrami.origin", "Eq(54) at x = 0", _maxabs(origin - np.diag([-1.0, 1.0, 1.0, 1.0])), 1e-12)

    jq = quoted_beltrami_jacobian(R)(q)
    gq = np.einsum("...Aa,AB,...Bb->...ab", jq, ch.target.signature.eta, jq)
    dev = _maxabs(gq - numeric)
    rep.add("beltrami.printed_jacobian", "Eq(53) cross-term sign as printed", dev, 1e-8, reported=dev > 1e-8)
    dev = _maxabs(ch.quoted_metrics["Eq(54)"](q) - analytic)
    rep.add("beltrami.printed_metric", "Eq(54) bracket as printed", dev, 1e-8, reported=dev > 1e-8)

    try:
        beltrami_lift(np.array([2.0 * R, 0.0, 0.0, 0.0]), R)
        cone = False
    except ProjectiveConeError:
        cone = True
    rep.add("beltrami.cone_guard", "1 + sigma^2/R^2 > 0", 0.0, 0.0, passed=cone)
    try:
        beltrami_project(np.array([0.0, R, 0.0, 0.0, 0.0]), R)
        equator = False
    except EquatorialSingularityError:
        equator = True
    rep.add("beltrami.equator_guard", "projection undefined at xi_4 = 0", 0.0, 0.0, passed=equator)
    return rep


# ------------------------------------------------------------ charts


def cmd_charts(cfg: RunConfig) -> Report:
    rep = Report("charts", cfg.as_dict())
    rng = np.random.default_rng(cfg.seed)
    R = cfg.radius
    for name in CHART_NAMES:
        ch = make_chart(name, R)
        p = sample_points(ch, rng, cfg.samples)
        res = embedding_residual(ch, p)
        if name == "static-47-printed":
            expect = static_printed_lhs(R, p[..., 1]) - R**2
            rep.add(f"{name}.residual_reproduced", "Eq(47) as printed: 2 rho^2 - 2 R^2",
                    _maxabs(res - expect), 1e-12 * R**2)
            rep.add(f"{name}.constraint", "Eq(46) on Eq(47) as printed", _maxabs(res), 1e-12 * R**2, reported=True)
            continue
        rep.add(f"{name}.constraint", "embedding constraint", _maxabs(res), 1e-12 * R**2)
        analytic = pullback_metric(ch, p, analytic=True)
        rep.add(f"{name}.jacobian", "analytic vs finite-difference Jacobian",
                _maxabs(jacobian(ch, p, analytic=True) - jacobian(ch, p, cfg.step, richardson=True)), 1e-8)
        rep.add(f"{name}.pullback", "analytic vs finite-difference pullback",
                _maxabs(analytic - pullback_metric(ch, p, cfg.step, richardson=True)), 1e-8)
        if ch.closed_form_metric is not None:
            rep.add(f"{name}.closed_form", "closed-form metric vs pullback",
                    _maxabs(ch.closed_form_metric(p) - analytic) / max(1.0, _maxabs(analytic)), 1e-12)
        for label, fn in ch.quoted_metrics.items():
            dev = _maxabs(fn(p) - analytic) / max(1.0, _maxabs(analytic))
            rep.add(f"{name}.printed.{label}", f"{label} as printed", dev, 1e-10, reported=dev > 1e-10)

    ch = make_chart("schrodinger-43", R)
    chi = rng.uniform(-1.4, 1.4, cfg.samples)
    p = np.column_stack([rng.uniform(-R, R, cfg.samples), chi])
    moved = reduced_static_transform(ch.quoted_metrics["g_r"](p), R, chi)
    rep.add("schrodinger-43.substitution", "Eq(44) substitution into Eq(45)",
            _maxabs(moved - reduced_static_metric(R, R * np.sin(chi))), 1e-12)
    k = 1.0 / R**2
    grid = np.linspace(0.1, 0.9, 50) * R
    rep.add("sphere.zeta_substitution", "Eq(36) substitution", zeta_substitution_residual(k, grid), 1e-8)
    return rep


# ------------------------------------------------------------ geodesic


def cmd_geodesic(cfg: RunConfig) -> Report:
    """Integrate one geodesic from (x0, v0) and write the CSV trajectory to ``cfg.csv``."""
    rep = Report("geodesic", cfg.as_dict())
    R = cfg.radius
    ch = make_chart(cfg.chart, R)
    g = chart_metric(ch)
    if len(cfg.x0) != ch.dim:
        raise ConfigError(f"{ch.name} needs {ch.dim} coordinates, got x0 of length {len(cfg.x0)}")
    s0 = GeodesicState(np.array(cfg.x0), np.array(cfg.v0))
    tr = integrate(g, s0, cfg.tau_end, cfg.dt, cfg.step, cfg.sample_every, margin=cfg.boundary_margin * R)
    charges = [pulled_back(ch, U) for U in ambient_generators(ch.target)]
    try:
        q = [tr.charge_drift(g, u) for u in charges]
    except NonTangentFieldError:
        charges, q = [], []
        rep.sections["charges"] = "chart image is off the quadric; charges omitted"
    status = str(tr.status)
    end_tau = float(tr.tau[int(tr.last)])
    nd = float(tr.norm_drift())
    rep.add("geodesic.norm", "norm conservation", nd, cfg.tol_integrator, status=status, end_tau=end_tau,
            samples=int(tr.last) + 1)
    for u, drift in zip(charges, q):
        rep.add(f"geodesic.charge.{u.name}", "Eq(50) conserved charge", float(drift), cfg.tol_integrator)
    if cfg.csv:
        path = Path(cfg.csv)
        with open(path, "w", newline="") as fh:
            write_csv(fh, g, tr.select(()), charges)
        rep.sections["trajectory"] = {"csv": cfg.csv, "rows": int(tr.last) + 1}
    return rep


COMMANDS = {
    "verify-christoffel": cmd_verify_christoffel,
    "verify-killing": cmd_verify_killing,
    "curvature": cmd_curvature,
    "lct": cmd_lct,
    "beltrami": cmd_beltrami,
    "charts": cmd_charts,
    "geodesic": cmd_geodesic,
}
