//! Audits of a trained model against its training data.
//!
//! Everything here is read-only. Residuals that are expected to vanish at the
//! exact optimum are compared against bounds; quantities with no exact
//! counterpart (Rayleigh quotient, component equations) are reported only.

use std::fmt::Write as _;

use serde::Serialize;

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::geometry::{dot, gram_matrix, norm, norm_sq, Label, Matrix};
use crate::linalg::symmetric_eigenvalues;
use crate::model::{extreme_indices, fit, EigenlocusModel};
use crate::scalar::Scalar;
use crate::solver::{hard_margin_c, SolverOptions};

pub const REPORT_VERSION: u32 = 1;
pub const DEFAULT_KKT_TOL: f64 = 1e-6;
pub const DEFAULT_IDENTITY_REL_TOL: f64 = 1e-5;
pub const DEFAULT_SPECTRUM_CAP: usize = 5000;
/// Relative eigenvalue cutoff for the numerical rank.
pub const RANK_REL_THRESHOLD: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KktAudit<T> {
    /// KKTE1: `max |τ − Σψᵢyᵢxᵢ|`.
    pub max_stationarity_residual: T,
    /// KKTE2: `|Σψᵢyᵢ|`.
    pub equality_residual: T,
    /// KKTE3: `|CΣξᵢ − Σψᵢ|`.
    pub slack_residual: T,
    /// KKTE4: `max max(0, 1 − ξᵢ − yᵢD(xᵢ))`.
    pub max_feasibility_violation: T,
    /// KKTE5: `min ψᵢ`.
    pub min_psi: T,
    /// KKTE6: `max |ψᵢ(yᵢD(xᵢ) − 1 + ξᵢ)|`.
    pub max_complementarity_residual: T,
    pub tol: T,
    pub failing: Vec<String>,
    pub pass: bool,
}

pub fn kkt_audit<T: Scalar>(
    model: &EigenlocusModel<T>,
    data: &LabeledDataset<T>,
    tol: T,
) -> Result<KktAudit<T>> {
    check_pairing(model, data)?;
    let psi = model.psi();
    let xi = model.xi();
    let mut recon = vec![T::zero(); model.dim()];
    let mut eq = T::zero();
    let mut feas = T::zero();
    let mut comp = T::zero();
    for i in 0..data.len() {
        let y = data.labels()[i].sign::<T>();
        crate::geometry::axpy(&mut recon, y * psi[i], data.point(i));
        eq = eq + y * psi[i];
        let margin = y * model.score(data.point(i));
        feas = feas.max(T::one() - xi[i] - margin);
        comp = comp.max((psi[i] * (margin - T::one() + xi[i])).abs());
    }
    let stat = crate::geometry::max_abs_diff(model.tau(), &recon);
    let sum_psi: T = psi.iter().copied().sum();
    let sum_xi: T = xi.iter().copied().sum();
    let slack = (model.c() * sum_xi - sum_psi).abs();
    let min_psi = psi.iter().fold(T::infinity(), |m, &p| m.min(p));
    let mut failing = Vec::new();
    let checks = [
        ("KKTE1 stationarity", stat),
        ("KKTE2 equality", eq.abs()),
        ("KKTE3 slack", slack),
        ("KKTE4 feasibility", feas.max(T::zero())),
        ("KKTE5 nonnegativity", (-min_psi).max(T::zero())),
        ("KKTE6 complementarity", comp),
    ];
    for (name, r) in checks {
        if !(r <= tol) {
            failing.push(name.to_string());
        }
    }
    Ok(KktAudit {
        max_stationarity_residual: stat,
        equality_residual: eq.abs(),
        slack_residual: slack,
        max_feasibility_violation: feas.max(T::zero()),
        min_psi,
        max_complementarity_residual: comp,
        tol,
        pass: failing.is_empty(),
        failing,
    })
}

fn check_pairing<T: Scalar>(model: &EigenlocusModel<T>, data: &LabeledDataset<T>) -> Result<()> {
    if data.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            context: "model vs data dimension",
            expected: model.dim(),
            got: data.dim(),
        });
    }
    if data.len() != model.n_train() {
        return Err(Error::DimensionMismatch {
            context: "model vs data point count",
            expected: model.n_train(),
            got: data.len(),
        });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Equilibrium<T> {
    pub sum_psi_class1: T,
    pub sum_psi_class2: T,
    pub residual: T,
}

pub fn equilibrium_check<T: Scalar>(model: &EigenlocusModel<T>) -> Equilibrium<T> {
    let (s1, s2) = class_sums(model, |e| e.psi);
    Equilibrium {
        sum_psi_class1: s1,
        sum_psi_class2: s2,
        residual: (s1 - s2).abs(),
    }
}

fn class_sums<T: Scalar>(
    model: &EigenlocusModel<T>,
    f: impl Fn(&crate::model::ExtremePoint<T>) -> T,
) -> (T, T) {
    let mut s1 = T::zero();
    let mut s2 = T::zero();
    for e in model.extremes() {
        match e.label {
            Label::Plus => s1 = s1 + f(e),
            Label::Minus => s2 = s2 + f(e),
        }
    }
    (s1, s2)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityEntry<T> {
    pub name: String,
    pub lhs: T,
    pub rhs: T,
    pub residual: T,
    pub bound: T,
    /// Report-only entries never fail.
    pub asserted: bool,
    pub pass: bool,
}

impl<T: Scalar> IdentityEntry<T> {
    fn new(name: &str, lhs: T, rhs: T, bound: T, asserted: bool) -> Self {
        let residual = (lhs - rhs).abs();
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            residual,
            bound,
            asserted,
            pass: !asserted || residual <= bound,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenenergyLedger<T> {
    pub tau_norm_sq: T,
    /// `Σψᵢ(1 − ξᵢ)`.
    pub sum_psi_weighted: T,
    pub residual: T,
    /// `‖τ₁‖² − τ₁ᵀτ₂`.
    pub e_tau1: T,
    /// `‖τ₂‖² − τ₂ᵀτ₁`.
    pub e_tau2: T,
    /// `(τ₀/2)Σψᵢ`.
    pub nabla_eq: T,
    /// `½Σψᵢ(1 − ξᵢ)`.
    pub fulcrum: T,
    /// `max(|E_τ1 + ∇_eq − f_s|, |E_τ2 − ∇_eq − f_s|)`.
    pub balance_residual: T,
    pub bound: T,
    pub entries: Vec<IdentityEntry<T>>,
    pub pass: bool,
}

/// Identities (a) to (e), each bounded by `rel_tol · max(1, ‖τ‖²)`, plus the
/// report-only comparison `‖τ‖² ≈ Σψᵢ`.
pub fn eigenenergy_ledger<T: Scalar>(model: &EigenlocusModel<T>, rel_tol: T) -> EigenenergyLedger<T> {
    let one = T::one();
    let half = T::lit(0.5);
    let tau = model.tau();
    let (t1, t2) = (model.tau1(), model.tau2());
    let tau0 = model.tau0();
    let tn2 = norm_sq(tau);
    let bound = rel_tol * tn2.max(one);
    let c = model.c();
    let weighted = |e: &crate::model::ExtremePoint<T>| e.psi * (one - e.psi / c);
    let (w1, w2) = class_sums(model, weighted);
    let sum_weighted = w1 + w2;
    let (s1, s2) = class_sums(model, |e| e.psi);
    let sum_psi = s1 + s2;
    let e1 = norm_sq(t1) - dot(t1, t2);
    let e2 = norm_sq(t2) - dot(t2, t1);
    let rhs1 = w1 - tau0 * s1;
    let rhs2 = w2 + tau0 * s2;
    let nabla = tau0 * half * sum_psi;
    let fulcrum = half * sum_weighted;
    let entries = vec![
        IdentityEntry::new("(a) |tau|^2 = sum psi(1-xi)", tn2, sum_weighted, bound, true),
        IdentityEntry::new("(b) E_tau1 = sum_1 psi(1-xi-tau0)", e1, rhs1, bound, true),
        IdentityEntry::new("(c) E_tau2 = sum_2 psi(1-xi+tau0)", e2, rhs2, bound, true),
        IdentityEntry::new("(d) E_tau1 + E_tau2 = |tau|^2", e1 + e2, tn2, bound, true),
        IdentityEntry::new("(e1) E_tau1 + nabla_eq = f_s", e1 + nabla, fulcrum, bound, true),
        IdentityEntry::new("(e2) E_tau2 - nabla_eq = f_s", e2 - nabla, fulcrum, bound, true),
        IdentityEntry::new("|tau|^2 ~ sum psi (report)", tn2, sum_psi, bound, false),
    ];
    let balance = entries[4].residual.max(entries[5].residual);
    EigenenergyLedger {
        tau_norm_sq: tn2,
        sum_psi_weighted: sum_weighted,
        residual: entries[0].residual,
        e_tau1: e1,
        e_tau2: e2,
        nabla_eq: nabla,
        fulcrum,
        balance_residual: balance,
        bound,
        pass: entries.iter().all(|e| e.pass),
        entries,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointwiseCov<T> {
    pub index: usize,
    pub class: Label,
    /// `xᵢᵀ Σⱼ xⱼ`.
    pub cov_up: T,
    /// `yᵢ xᵢᵀ(Σ_{class one} xⱼ − Σ_{class two} xⱼ)`.
    pub cov_up_labeled: T,
    /// `yᵢ xᵢᵀ Σ_{extremes} ψⱼyⱼxⱼ`; present when `ψ` is supplied.
    pub cov_up_eigenbalanced: Option<T>,
    pub is_extreme: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointwiseCovReport<T> {
    pub points: Vec<PointwiseCov<T>>,
}

pub fn pointwise_covariance<T: Scalar>(
    data: &LabeledDataset<T>,
    psi: Option<&[T]>,
) -> Result<PointwiseCovReport<T>> {
    if data.is_empty() {
        return Err(Error::invalid("empty dataset"));
    }
    if let Some(p) = psi {
        crate::geometry::check_len("psi vs data", data.len(), p.len())?;
    }
    let d = data.dim();
    let mut total = vec![T::zero(); d];
    let mut signed = vec![T::zero(); d];
    for (x, y) in data.features().row_iter().zip(data.labels()) {
        crate::geometry::axpy(&mut total, T::one(), x);
        crate::geometry::axpy(&mut signed, y.sign(), x);
    }
    let extremes = psi.map(extreme_indices).unwrap_or_default();
    let mut is_ext = vec![false; data.len()];
    for &i in &extremes {
        is_ext[i] = true;
    }
    let balanced = psi.map(|p| {
        let mut acc = vec![T::zero(); d];
        for &i in &extremes {
            crate::geometry::axpy(&mut acc, data.labels()[i].sign::<T>() * p[i], data.point(i));
        }
        acc
    });
    let points = (0..data.len())
        .map(|i| {
            let x = data.point(i);
            let y = data.labels()[i];
            PointwiseCov {
                index: i,
                class: y,
                cov_up: dot(x, &total),
                cov_up_labeled: y.sign::<T>() * dot(x, &signed),
                cov_up_eigenbalanced: balanced.as_ref().map(|b| y.sign::<T>() * dot(x, b)),
                is_extreme: is_ext[i],
            }
        })
        .collect();
    Ok(PointwiseCovReport { points })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankAgreement {
    /// Number of points in the top `ψ` decile.
    pub top_count: usize,
    /// Fraction of those whose labeled `cov_up` exceeds their class median.
    pub above_median: f64,
    /// Fraction strictly below their class median.
    pub below_median: f64,
}

/// Compares the top decile of `ψ` with the class-median labeled covariance.
pub fn extreme_rank_agreement<T: Scalar>(
    report: &PointwiseCovReport<T>,
    psi: &[T],
) -> Result<RankAgreement> {
    crate::geometry::check_len("psi vs report", report.points.len(), psi.len())?;
    let median = |label: Label| {
        let mut v: Vec<f64> = report
            .points
            .iter()
            .filter(|p| p.class == label)
            .map(|p| p.cov_up_labeled.to_f64_lossy())
            .collect();
        v.sort_by(f64::total_cmp);
        match v.len() {
            0 => f64::NAN,
            n if n % 2 == 1 => v[n / 2],
            n => 0.5 * (v[n / 2 - 1] + v[n / 2]),
        }
    };
    let med = [median(Label::Plus), median(Label::Minus)];
    let mut order: Vec<usize> = (0..psi.len()).collect();
    order.sort_by(|&a, &b| psi[b].to_f64_lossy().total_cmp(&psi[a].to_f64_lossy()));
    let top = (psi.len() / 10).max(1);
    let (mut above, mut below) = (0usize, 0usize);
    for &i in &order[..top] {
        let p = &report.points[i];
        let m = med[usize::from(p.class == Label::Minus)];
        let v = p.cov_up_labeled.to_f64_lossy();
        if v > m {
            above += 1;
        } else if v < m {
            below += 1;
        }
    }
    Ok(RankAgreement {
        top_count: top,
        above_median: above as f64 / top as f64,
        below_median: below as f64 / top as f64,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumReport<T> {
    /// Descending.
    pub eigenvalues: Vec<T>,
    pub lambda_max: T,
    pub rank_estimate: usize,
    pub trace: T,
}

pub fn spectrum_report<T: Scalar>(q: &Matrix<T>) -> Result<SpectrumReport<T>> {
    spectrum_report_capped(q, DEFAULT_SPECTRUM_CAP)
}

pub fn spectrum_report_capped<T: Scalar>(q: &Matrix<T>, cap: usize) -> Result<SpectrumReport<T>> {
    if q.rows() > cap {
        return Err(Error::invalid(format!(
            "spectrum of a {}x{} matrix exceeds the cap of {cap}",
            q.rows(),
            q.rows()
        )));
    }
    let eigenvalues = symmetric_eigenvalues(q)?;
    let lambda_max = eigenvalues.first().copied().unwrap_or_else(T::zero);
    let cut = T::lit(RANK_REL_THRESHOLD) * lambda_max;
    let rank_estimate = eigenvalues.iter().filter(|&&l| l > cut).count();
    Ok(SpectrumReport {
        eigenvalues,
        lambda_max,
        rank_estimate,
        trace: q.trace(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RayleighReport<T> {
    /// `ψᵀQψ / ψᵀψ`.
    pub quotient: T,
    /// `‖Qψ − quotient·ψ‖ / ‖ψ‖`.
    pub eigen_residual_norm: T,
}

pub fn rayleigh_report<T: Scalar>(q: &Matrix<T>, psi: &[T]) -> Result<RayleighReport<T>> {
    let pp = norm_sq(psi);
    if !(pp > T::zero()) {
        return Err(Error::invalid("Rayleigh quotient of a zero vector"));
    }
    let qp = q.mat_vec(psi)?;
    let quotient = dot(psi, &qp) / pp;
    let r: Vec<T> = qp.iter().zip(psi).map(|(&a, &b)| a - quotient * b).collect();
    Ok(RayleighReport {
        quotient,
        eigen_residual_norm: norm(&r) / pp.sqrt(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentEntry<T> {
    pub index: usize,
    pub psi: T,
    /// `(Qψ)ᵢ / λ_max`, the value the principal-eigenvector reading predicts for `ψᵢ`.
    pub eigen_prediction: T,
    pub q_psi: T,
    /// `1 − τ₀yᵢ`, what `(Qψ)ᵢ` equals at the exact optimum.
    pub optimum_value: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentReport<T> {
    pub entries: Vec<ComponentEntry<T>>,
    /// `max |ψᵢ − (Qψ)ᵢ/λ_max|` over extremes.
    pub max_eigen_discrepancy: T,
    /// `max |(Qψ)ᵢ − (1 − τ₀yᵢ)|` over extremes.
    pub max_optimum_discrepancy: T,
    /// `Σ‖ψᵢxᵢ‖²` for class one and class two.
    pub class_energy: [T; 2],
    /// Smallest `cos∠(ψᵢxᵢ, xᵢ)` over extremes with `xᵢ ≠ 0`.
    pub min_directional_cos: Option<T>,
}

pub fn component_report<T: Scalar>(
    model: &EigenlocusModel<T>,
    q: &Matrix<T>,
    lambda_max: T,
) -> Result<ComponentReport<T>> {
    let psi = model.psi();
    let qp = q.mat_vec(psi)?;
    let mut entries = Vec::with_capacity(model.extremes().len());
    let mut eig = T::zero();
    let mut opt = T::zero();
    let mut energy = [T::zero(); 2];
    let mut min_cos: Option<T> = None;
    for e in model.extremes() {
        let i = e.index;
        let y = e.label.sign::<T>();
        let pred = qp[i] / lambda_max;
        let target = T::one() - model.tau0() * y;
        eig = eig.max((psi[i] - pred).abs());
        opt = opt.max((qp[i] - target).abs());
        let comp: Vec<T> = e.x.iter().map(|&v| e.psi * v).collect();
        energy[usize::from(e.label == Label::Minus)] =
            energy[usize::from(e.label == Label::Minus)] + norm_sq(&comp);
        if let Ok(s) = crate::geometry::inner_product_stats(&comp, &e.x) {
            if let Some(c) = s.cos_angle {
                min_cos = Some(min_cos.map_or(c, |m: T| m.min(c)));
            }
        }
        entries.push(ComponentEntry {
            index: i,
            psi: psi[i],
            eigen_prediction: pred,
            q_psi: qp[i],
            optimum_value: target,
        });
    }
    Ok(ComponentReport {
        entries,
        max_eigen_discrepancy: eig,
        max_optimum_discrepancy: opt,
        class_energy: energy,
        min_directional_cos: min_cos,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Widths<T> {
    pub full_width: T,
    pub half_width: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnoseOptions<T> {
    pub kkt_tol: T,
    pub identity_rel_tol: T,
    pub spectrum_cap: usize,
}

impl<T: Scalar> Default for DiagnoseOptions<T> {
    fn default() -> Self {
        Self {
            kkt_tol: T::lit(DEFAULT_KKT_TOL),
            identity_rel_tol: T::lit(DEFAULT_IDENTITY_REL_TOL),
            spectrum_cap: DEFAULT_SPECTRUM_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticsReport<T> {
    pub version: u32,
    pub n: usize,
    pub d: usize,
    pub c: T,
    pub eps: T,
    pub converged: bool,
    pub kkt: KktAudit<T>,
    pub equilibrium: Equilibrium<T>,
    pub eigenenergy: EigenenergyLedger<T>,
    pub widths: Option<Widths<T>>,
    pub spectrum: Option<SpectrumReport<T>>,
    pub rayleigh: Option<RayleighReport<T>>,
    pub components: Option<ComponentReport<T>>,
    pub sv_fraction: T,
    /// Names of failed assertions; empty when `pass`.
    pub failures: Vec<String>,
    pub pass: bool,
}

pub fn diagnose<T: Scalar>(
    model: &EigenlocusModel<T>,
    data: &LabeledDataset<T>,
    opts: &DiagnoseOptions<T>,
) -> Result<DiagnosticsReport<T>> {
    let kkt = kkt_audit(model, data, opts.kkt_tol)?;
    let equilibrium = equilibrium_check(model);
    let eigenenergy = eigenenergy_ledger(model, opts.identity_rel_tol);
    let widths = model.margin_geometry().ok().map(|g| Widths {
        full_width: g.full_width,
        half_width: g.half_width,
    });
    let (spectrum, rayleigh, components) = if data.len() <= opts.spectrum_cap {
        let q = gram_matrix(data.features(), data.labels(), model.eps())?;
        let s = spectrum_report_capped(&q, opts.spectrum_cap)?;
        let r = rayleigh_report(&q, model.psi()).ok();
        let c = component_report(model, &q, s.lambda_max)?;
        (Some(s), r, Some(c))
    } else {
        (None, None, None)
    };
    let mut failures: Vec<String> = kkt.failing.clone();
    if !(equilibrium.residual <= opts.kkt_tol) {
        failures.push("equilibrium".to_string());
    }
    failures.extend(
        eigenenergy
            .entries
            .iter()
            .filter(|e| !e.pass)
            .map(|e| e.name.clone()),
    );
    Ok(DiagnosticsReport {
        version: REPORT_VERSION,
        n: model.n_train(),
        d: model.dim(),
        c: model.c(),
        eps: model.eps(),
        converged: model.converged(),
        kkt,
        equilibrium,
        eigenenergy,
        widths,
        spectrum,
        rayleigh,
        components,
        sv_fraction: model.sv_fraction(),
        pass: failures.is_empty(),
        failures,
    })
}

impl<T: Scalar> DiagnosticsReport<T> {
    pub fn to_json(&self) -> Result<String> {
        crate::json::to_string(self)
    }

    pub fn to_table(&self) -> String {
        let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
        let mut out = String::new();
        let _ = writeln!(
            out,
            "N = {}, d = {}, C = {:e}, eps = {:e}, sv_fraction = {:.4}",
            self.n, self.d, self.c, self.eps, self.sv_fraction
        );
        let _ = writeln!(out, "{:<40} {:>14} {:>14} {:>12} {:>12}  result", "check", "lhs", "rhs", "residual", "bound");
        let k = &self.kkt;
        let kkt_rows = [
            ("KKTE1 stationarity", k.max_stationarity_residual),
            ("KKTE2 equality", k.equality_residual),
            ("KKTE3 slack", k.slack_residual),
            ("KKTE4 feasibility", k.max_feasibility_violation),
            ("KKTE5 nonnegativity", (-k.min_psi).max(T::zero())),
            ("KKTE6 complementarity", k.max_complementarity_residual),
        ];
        for (name, r) in kkt_rows {
            let _ = writeln!(
                out,
                "{:<40} {:>14} {:>14} {:>12.3e} {:>12.3e}  {}",
                name,
                "",
                "",
                r,
                k.tol,
                verdict(!k.failing.iter().any(|f| f == name))
            );
        }
        let e = &self.equilibrium;
        let _ = writeln!(
            out,
            "{:<40} {:>14.6e} {:>14.6e} {:>12.3e} {:>12.3e}  {}",
            "equilibrium sum_1 psi = sum_2 psi",
            e.sum_psi_class1,
            e.sum_psi_class2,
            e.residual,
            k.tol,
            verdict(!self.failures.iter().any(|f| f == "equilibrium"))
        );
        for row in &self.eigenenergy.entries {
            let _ = writeln!(
                out,
                "{:<40} {:>14.6e} {:>14.6e} {:>12.3e} {:>12.3e}  {}",
                row.name,
                row.lhs,
                row.rhs,
                row.residual,
                row.bound,
                if row.asserted { verdict(row.pass) } else { "report" }
            );
        }
        if let Some(w) = &self.widths {
            let _ = writeln!(out, "width: full {:.6e}, half {:.6e}", w.full_width, w.half_width);
        }
        if let Some(s) = &self.spectrum {
            let _ = writeln!(
                out,
                "spectrum: lambda_max {:.6e}, rank {} of {}",
                s.lambda_max,
                s.rank_estimate,
                s.eigenvalues.len()
            );
        }
        if let Some(r) = &self.rayleigh {
            let _ = writeln!(
                out,
                "rayleigh: quotient {:.6e}, eigen residual {:.6e} (report)",
                r.quotient, r.eigen_residual_norm
            );
        }
        if let Some(c) = &self.components {
            let _ = writeln!(
                out,
                "components: max |psi - (Q psi)/lambda_max| {:.3e}, max |(Q psi) - (1 - tau0 y)| {:.3e} (report)",
                c.max_eigen_discrepancy, c.max_optimum_discrepancy
            );
        }
        let _ = writeln!(out, "overall: {}", verdict(self.pass));
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakDualSide<T> {
    pub eps: T,
    pub sv_fraction: T,
    pub test_error: Option<f64>,
    pub rank_estimate: usize,
    pub kkt_pass: bool,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakDualReport<T> {
    pub regularized: WeakDualSide<T>,
    pub under_regularized: WeakDualSide<T>,
    /// `N ≤ d`: the unregularized Gram matrix can already have full rank.
    pub well_posed: bool,
    pub note: String,
}

/// Fits at `ε = 1/C` and at the hard-margin floor and compares the two.
/// Iteration budget for the unregularized side. On overlapping classes that
/// dual is unbounded, so the run never converges and only the budget ends it.
pub const WEAK_DUAL_MAX_ITER: usize = 200_000;

pub fn weak_dual_experiment<T: Scalar>(
    train: &LabeledDataset<T>,
    test: Option<&LabeledDataset<T>>,
    c: T,
    opts: &SolverOptions<T>,
    kkt_tol: T,
) -> Result<WeakDualReport<T>> {
    let side = |c: T, opts: &SolverOptions<T>| -> Result<WeakDualSide<T>> {
        let m = fit(train, c, opts)?;
        let q = gram_matrix(train.features(), train.labels(), m.eps())?;
        let rank = spectrum_report(&q)?.rank_estimate;
        let test_error = test.map(|t| {
            let wrong = (0..t.len())
                .filter(|&i| Label::from_score(m.score(t.point(i))) != t.labels()[i])
                .count();
            wrong as f64 / t.len().max(1) as f64
        });
        Ok(WeakDualSide {
            eps: m.eps(),
            sv_fraction: m.sv_fraction(),
            test_error,
            rank_estimate: rank,
            kkt_pass: kkt_audit(&m, train, kkt_tol)?.pass,
            converged: m.converged(),
        })
    };
    let regularized = side(c, opts)?;
    let capped = SolverOptions {
        max_iter: opts.max_iter.min(WEAK_DUAL_MAX_ITER),
        ..opts.clone()
    };
    let under_regularized = side(hard_margin_c(), &capped)?;
    let well_posed = train.len() <= train.dim();
    let note = if well_posed {
        "well-posed: N <= d, the Gram matrix has full rank without regularization".to_string()
    } else {
        format!(
            "N = {} > d = {}: unregularized Gram rank {} of {}",
            train.len(),
            train.dim(),
            under_regularized.rank_estimate,
            train.len()
        )
    };
    Ok(WeakDualReport {
        regularized,
        under_regularized,
        well_posed,
        note,
    })
}
