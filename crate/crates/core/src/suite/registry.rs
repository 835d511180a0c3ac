//! Catalog of every check a suite can emit, with its formula anchor.

use super::config::Suite;
use crate::cylinder::{CylinderIdentity, FIRST_ORDER_TOL, SECOND_ORDER_TOL};
use crate::error::{Error, Result};

/// How a residual is formed. Only `Residual` checks follow a global `--tol`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// A numerical defect; passes when small.
    Residual,
    /// |observed − expected| of an integer count; tolerance 0.5.
    Count,
    /// bound / observed for a lower-bound witness; tolerance 1.
    Ratio,
}

impl CheckKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckKind::Residual => "residual",
            CheckKind::Count => "count",
            CheckKind::Ratio => "ratio",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckInfo {
    pub id: &'static str,
    pub suite: Suite,
    /// Formula being verified, or "plumbing".
    pub anchor: &'static str,
    pub summary: &'static str,
    pub kind: CheckKind,
    pub tolerance: f64,
}

const fn info(id: &'static str, suite: Suite, anchor: &'static str, summary: &'static str, kind: CheckKind, tolerance: f64) -> CheckInfo {
    CheckInfo { id, suite, anchor, summary, kind, tolerance }
}

use CheckKind::*;
use Suite::*;

const STATIC_CHECKS: &[CheckInfo] = &[
    info(
        "connection-table",
        Connection,
        "nabla_{e_i} e_j table of Eguchi-Hanson with gamma = 2 r^{-1} f^{-1} - r^{-1} f",
        "closed-form frame connection of Eguchi-Hanson against the Koszul formula on the frame commutators",
        Residual,
        1e-8,
    ),
    info(
        "connection-chart",
        Connection,
        "g(nabla_{e_i} e_j, e_k) = 1/2 (c_ijk - c_jki + c_kij)",
        "frame connection from commutators against the chart Christoffel symbols (finite differences)",
        Residual,
        1e-5,
    ),
    info("metric-compat", Connection, "nabla g = 0", "metric compatibility of the chart Christoffel symbols", Residual, 1e-8),
    info(
        "curvature-symmetries",
        Curvature,
        "R(X,Y) = -R(Y,X), g(R(X,Y)Z,V) = -g(R(X,Y)V,Z), R(X,Y)Z + R(Y,Z)X + R(Z,X)Y = 0",
        "algebraic symmetries of the sampled Riemann tensor",
        Residual,
        1e-5,
    ),
    info("flat", Curvature, "R = 0", "largest Riemann component of a flat fixture", Residual, 1e-6),
    info("ricci-flat", Curvature, "Ric = 0", "largest Ricci component of a Ricci-flat fixture", Residual, 1e-5),
    info(
        "constant-curvature",
        Curvature,
        "R(X,Y)Z = -4 (g(Y,Z) X - g(X,Z) Y) on R x_{e^{-2s}} F with F flat",
        "ds^2 + e^{-4s} g_F over a flat fiber is hyperbolic of curvature -4",
        Residual,
        1e-5,
    ),
    info(
        "cylinder-flat",
        Curvature,
        "R^C = 0 iff R^F = 0",
        "largest sampled curvature of a cylinder over a flat fiber",
        Residual,
        1e-6,
    ),
    info(
        "cylinder-curved",
        Curvature,
        "R^C = 0 iff R^F = 0",
        "1e-2 over the largest sampled curvature of a cylinder over a curved fiber",
        Ratio,
        1.0,
    ),
    info(
        "codazzi-residual",
        Codazzi,
        "(nabla_X A)(Y) = (nabla_Y A)(X)",
        "Codazzi defect of the fixture tensor over sampled points and directions",
        Residual,
        1e-6,
    ),
    info(
        "codazzi5",
        Codazzi,
        "nabla^F_V D(d_s) = E'(V) + (f'/f) E(V) - b (f'/f) V",
        "first block condition of H(b, D, E) on R x_f F",
        Residual,
        1e-6,
    ),
    info(
        "codazzi6",
        Codazzi,
        "grad^F b = 3 f f' D(d_s) + f^2 D'(d_s)",
        "second block condition of H(b, D, E)",
        Residual,
        1e-6,
    ),
    info(
        "codazzi7",
        Codazzi,
        "(d^{nabla^F} E)(V,W) = f f' (g_F(V, D(d_s)) W - g_F(W, D(d_s)) V)",
        "third block condition of H(b, D, E)",
        Residual,
        1e-6,
    ),
    info(
        "codazzi8",
        Codazzi,
        "R^F(V,W) D(d_s) = (f f'' - f'^2)(g_F(V, D(d_s)) W - g_F(W, D(d_s)) V)",
        "integrability condition on D(d_s)",
        Residual,
        1e-6,
    ),
    info(
        "codazzi9",
        Codazzi,
        "E(s) = (1/f) (T + int_0^s b(sigma) f'(sigma) dsigma Id_F)",
        "Codazzi defect of H(b, 0, E) built from a Codazzi tensor T on the fiber, over sampled (p, X, Y)",
        Residual,
        1e-6,
    ),
    info(
        "codazzi-blocks",
        Codazzi,
        "d^nabla H rebuilt from the four block conditions",
        "agreement of d^nabla H(X,Y) with its reconstruction from the block residuals",
        Residual,
        1e-6,
    ),
    info("holonomy-dim", Holonomy, "dim hol(M) = expected", "estimated holonomy dimension against the known value", Count, 0.5),
    info(
        "holonomy-agree",
        Holonomy,
        "span{log tau_loop} = span{tau^{-1} R tau}",
        "subspace distance between the loop-sampling and curvature-span estimates",
        Residual,
        1e-6,
    ),
    info("holonomy-gap", Holonomy, "plumbing", "10 over the singular-value gap ratio at the chosen rank", Ratio, 1.0),
    info("holonomy-skew", Holonomy, "g B + B^T g = 0", "generators are skew for the metric", Residual, 1e-6),
    info("holonomy-p-fixed", Holonomy, "B P = 0 for all B in hol(C)", "the lightlike field P is annihilated by every generator", Residual, 1e-6),
    info(
        "holonomy-pattern",
        Holonomy,
        "hol(C) in [[0, m^T, 0], [0, h, m], [0, 0, 0]] in the basis (P, H_t^{-1} TF, Q)",
        "largest generator entry outside the strict upper block pattern",
        Residual,
        1e-6,
    ),
    info(
        "holonomy-decomposable",
        Holonomy,
        "hol(C) preserves a non-degenerate proper subspace",
        "0 when a non-degenerate invariant subspace is detected, 1 otherwise",
        Count,
        0.5,
    ),
    info("killing", Spinor, "nabla_X psi = i X . psi", "imaginary Killing equation of the constructed spinor", Residual, 1e-6),
    info(
        "killing-recovery",
        Spinor,
        "A(X,Y) = -1/2 Im <psi, X . nabla_Y psi + Y . nabla_X psi> / |psi|^2",
        "tensor recovered from the spinor derivative against Id",
        Residual,
        1e-6,
    ),
    info("killing-norm", Spinor, "|psi|^2 = e^{-2s}", "norm profile of the Killing spinor, relative", Residual, 1e-5),
    info("killing-current", Spinor, "W_psi = -e^{-2s} d_s", "Dirac current of the Killing spinor, relative", Residual, 1e-5),
    info("killing-q", Spinor, "q_psi = |psi|^4 - g(W_psi, W_psi) = 0", "the Killing spinor has vanishing q", Residual, 1e-8),
    info("ricci-constraint", Spinor, "Ric = 4 A^2 - 4 tr(A) A", "curvature condition forced by a Codazzi spinor for A", Residual, 1e-4),
    info("transfer-q", Spinor, "q_{Phi_A phi} = q_phi", "the transfer to the metric A^* g preserves q", Residual, 1e-8),
    info("lift-parallel", Spinor, "nabla^C psi~ = 0", "the lifted cylinder spinor is parallel", Residual, 1e-5),
    info("lift-norm", Spinor, "g(V, V) = -q_psi", "causal character of the cylinder current", Residual, 1e-6),
    info("lift-current", Spinor, "nabla^C V = 0", "the cylinder Dirac current is parallel", Residual, 1e-5),
    info(
        "lift-slice",
        Spinor,
        "nabla^C_X psi = nabla^M_X psi - i A(X) . psi at t = 0",
        "spinor connection of the cylinder restricted to the initial slice",
        Residual,
        1e-6,
    ),
    info(
        "causality-gh-closed",
        Causality,
        "sup eig(A_t^{-1}) = (1 - 2t)^{-1}",
        "global hyperbolicity bound against its closed form for H = Id",
        Residual,
        1e-10,
    ),
    info(
        "causality-bbc-closed",
        Causality,
        "sup |eig(g_t' g_t^{-1})| = 4 (1 - 2t)^{-1}",
        "bbc bound against its closed form for H = Id",
        Residual,
        1e-10,
    ),
    info("causality-gh-finite", Causality, "sup eig(A_t^{-1}) < inf", "largest slice bound over the ceiling 1e12", Ratio, 1.0),
    info("causality-bbc-finite", Causality, "sup |eig(g_t' g_t^{-1})| < inf", "largest bbc bound over the ceiling 1e12", Ratio, 1.0),
    info(
        "obstruction-dim",
        EhObstruction,
        "Codazzi tensors on Eguchi-Hanson = R Id",
        "numerical nullity of the reduced Codazzi system, minus one",
        Count,
        0.5,
    ),
    info("obstruction-stable", EhObstruction, "plumbing", "nullity change under grid doubling", Count, 0.5),
    info("obstruction-identity", EhObstruction, "Codazzi tensors on Eguchi-Hanson = R Id", "distance of the null vector from Id", Residual, 1e-6),
    info(
        "obstruction-homothetic",
        EhObstruction,
        "nabla V = c Id has only the solution V = 0",
        "1e-3 over the smallest singular value of the homothetic system",
        Ratio,
        1.0,
    ),
    info("obstruction-steps", EhObstruction, "B = C = D = 0, c = (f/r) A = gamma A", "pointwise elimination steps", Residual, 1e-8),
    info(
        "obstruction-averaging",
        EhObstruction,
        "avg(d^nabla W) = d^nabla(avg W)",
        "sphere averaging commutes with the Codazzi operator on a random candidate",
        Residual,
        1e-7,
    ),
];

fn identity_anchor(id: CylinderIdentity) -> &'static str {
    use CylinderIdentity::*;
    match id {
        P1 => "W_t(X) = 2 H_t^{-1}(X)",
        P2 => "nabla^C_X Y = H_t^{-1} nabla^b_X (H_t Y) - 2 g_b(H_t X, Y) d_t",
        P3 => "nabla^C_X d_t = -2 H_t^{-1} X",
        P4 => "nabla^C_{d_t} X = -2 H_t^{-1} X",
        P5 => "nabla^C_{d_t} d_t = 0",
        P6 => "nabla^C_{d_t} (H_t^{-1} Z) = 0",
        P7 => "nabla^C_{d_s} (H_t^{-1} d_s) = -2 d_t",
        P8 => "nabla^C_{d_s} (H_t^{-1} V) = -2 H_t^{-1} V",
        P9 => "nabla^C_V (H_t^{-1} d_s) = -2 H_t^{-1} V",
        P10 => "nabla^C_V (H_t^{-1} W) = -2 f^2 g_F(V,W) (d_t - H_t^{-1} d_s) + H_t^{-1} nabla^F_V W",
        P12 => "R^b(X,Y)U = R^F(X,Y)U + 4 g(X,U) Y - 4 g(Y,U) X",
        P13 => "R^b(d_s,Y)U = -4 f^2 g_F(Y,U) d_s",
        P14 => "R^b(d_s,Y) d_s = 4 Y",
        P15 => "R^b(X,Y) d_s = 0",
        TimeAnnihilation => "R^C(X,Y) d_t = R^C(X,d_t) Y = R^C(X,d_t) d_t = 0",
        Curv1 => "R^C(X,Y)V = H_t^{-1} R^b(X,Y) H_t V - 4 g_b(X, H_t V) H_t^{-1} Y + 4 g_b(Y, H_t V) H_t^{-1} X",
        Curv2 => "R^C(X,Y) H_t^{-1} V = H_t^{-1} R^F(X,Y) V",
        Curv3 => "R^C(X,Y) H_t^{-1} d_s = R^C(d_s,Y) H_t^{-1} d_s = R^C(d_s,Y) H_t^{-1} X = 0",
        InverseDerivative => "d/dt H_t^{-1} = 2 H_t^{-2}",
        Decomposition => "g(P,P) = g(Q,Q) = 0, g(P,Q) = 1, P, Q orthogonal to H_t^{-1} TF",
    }
}

fn identity_info(id: CylinderIdentity) -> CheckInfo {
    let summary = if id.is_curvature() {
        "cylinder curvature identity against the chart Riemann tensor (second derivatives)"
    } else {
        "cylinder connection identity against the chart Christoffel symbols (first derivatives)"
    };
    let tolerance = if id.is_curvature() { SECOND_ORDER_TOL } else { FIRST_ORDER_TOL };
    info(id.id(), Cylinder, identity_anchor(id), summary, Residual, tolerance)
}

/// Every registered check in catalog order.
pub fn all_checks() -> Vec<CheckInfo> {
    let mut out = STATIC_CHECKS.to_vec();
    let pos = out.iter().position(|c| c.suite == Holonomy).unwrap_or(out.len());
    let ids: Vec<CheckInfo> = CylinderIdentity::ALL.iter().map(|&i| identity_info(i)).collect();
    out.splice(pos..pos, ids);
    out
}

pub fn lookup(id: &str) -> Result<CheckInfo> {
    all_checks().into_iter().find(|c| c.id.eq_ignore_ascii_case(id)).ok_or_else(|| Error::UnknownId(id.to_string()))
}

/// Multi-line text for the `describe` verb.
pub fn describe(id: &str) -> Result<String> {
    if let Ok(c) = lookup(id) {
        return Ok(format!(
            "{}\n  anchor: {}\n  suite: {}\n  kind: {}\n  default tolerance: {:.1e}\n  {}\n",
            c.id,
            c.anchor,
            c.suite.as_str(),
            c.kind.as_str(),
            c.tolerance,
            c.summary
        ));
    }
    if let Some(f) = super::fixture::FIXTURES.iter().find(|f| f.name == id) {
        let suites: Vec<&str> = f.suites.iter().map(|s| s.as_str()).collect();
        let params: Vec<&str> = f.params.to_vec();
        return Ok(format!(
            "{}\n  {}\n  suites: {}\n  parameters: {}\n",
            f.name,
            f.summary,
            suites.join(", "),
            if params.is_empty() { "none".to_string() } else { params.join(", ") }
        ));
    }
    Err(Error::UnknownId(id.to_string()))
}
