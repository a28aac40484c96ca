//! Registry of verifiable identities and the engine that checks them.
//!
//! Every case evaluates both sides to a requested order (a real
//! q-exponent), compares them exactly and reports the first difference.

use std::fmt::Write as _;
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactnum::Eisenstein;
use crate::laurent::{Subst, Tail, XYPoly};
use crate::qseries::QSeries;
use crate::special::residue::{chi3, d, delta, p, rho};
use crate::special::{
    self, appell_constant_term, jacobi_product, jacobi_theta, jacobi_theta_arg, lemma31_sides, poch, quad_sum, theta0,
    theta1, theta_slice, theta_sum, trisum, AppellLaw, KlKind, LatticeSum, Lemma31, QuadSumSpec, RsForm, Side,
    ThetaArg, CHI_FORM, PHI_FORM, PSI_FORM, X_FORM,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Univariate,
    Bivariate,
    ResidueExhaustive,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Univariate => "univariate",
            Kind::Bivariate => "bivariate",
            Kind::ResidueExhaustive => "residue-exhaustive",
        }
    }
}

/// Evaluated sides of a case.
pub enum Sides {
    Series(QSeries, QSeries),
    Laurent {
        lhs: XYPoly,
        rhs: XYPoly,
        window: i64,
    },
    /// Number of instances checked and the first failing one as
    /// `(label, lhs, rhs)`.
    Residue {
        checked: usize,
        failure: Option<(String, i64, i64)>,
    },
}

type Evaluator = Arc<dyn Fn(i64) -> Result<Sides> + Send + Sync>;

#[derive(Clone)]
pub struct IdentityCase {
    pub id: String,
    pub description: String,
    pub anchor: String,
    pub default_order: i64,
    pub exponent_den: i64,
    pub kind: Kind,
    /// DSL sources for the two sides, when the identity is expressible.
    pub dsl: Option<(String, String)>,
    eval: Evaluator,
}

impl std::fmt::Debug for IdentityCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IdentityCase")
            .field("id", &self.id)
            .field("kind", &self.kind)
            .field("default_order", &self.default_order)
            .finish()
    }
}

impl IdentityCase {
    pub fn new<F>(id: &str, description: &str, kind: Kind, default_order: i64, exponent_den: i64, eval: F) -> Self
    where
        F: Fn(i64) -> Result<Sides> + Send + Sync + 'static,
    {
        IdentityCase {
            id: id.to_string(),
            description: description.to_string(),
            anchor: String::new(),
            default_order,
            exponent_den,
            kind,
            dsl: None,
            eval: Arc::new(eval),
        }
    }

    /// A univariate case from two side builders.
    pub fn univariate<L, R>(id: &str, description: &str, default_order: i64, exponent_den: i64, lhs: L, rhs: R) -> Self
    where
        L: Fn(i64) -> Result<QSeries> + Send + Sync + 'static,
        R: Fn(i64) -> Result<QSeries> + Send + Sync + 'static,
    {
        IdentityCase::new(
            id,
            description,
            Kind::Univariate,
            default_order,
            exponent_den,
            move |o| Ok(Sides::Series(lhs(o)?, rhs(o)?)),
        )
    }

    fn anchor(mut self, a: &str) -> Self {
        self.anchor = a.to_string();
        self
    }

    fn dsl(mut self, lhs: &str, rhs: &str) -> Self {
        self.dsl = Some((lhs.to_string(), rhs.to_string()));
        self
    }

    pub fn evaluate(&self, order: i64) -> Result<Sides> {
        (self.eval)(order)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MismatchReport {
    pub exponent_num: i64,
    pub exponent_den: i64,
    pub lhs: Eisenstein,
    pub rhs: Eisenstein,
    /// Monomial for bivariate cases, residue tuple for exhaustive ones.
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub id: String,
    pub status: Status,
    pub checked_order: i64,
    pub first_mismatch: Option<MismatchReport>,
    pub error: Option<String>,
    pub wall_time_ms: u128,
}

impl VerificationReport {
    /// Same report with the timing field cleared, for determinism checks.
    pub fn without_timing(&self) -> VerificationReport {
        VerificationReport {
            wall_time_ms: 0,
            ..self.clone()
        }
    }
}

fn rescale(num: i64, den: i64, target: i64) -> (i64, i64) {
    if target % den == 0 {
        (num * (target / den), target)
    } else {
        (num, den)
    }
}

fn compare(sides: Sides, order: i64, exponent_den: i64) -> Result<Option<MismatchReport>> {
    Ok(match sides {
        Sides::Series(l, r) => l.equal_through(&r, order, 1)?.map(|m| {
            let (n, d) = rescale(m.exponent_num, m.exponent_den, exponent_den);
            MismatchReport {
                exponent_num: n,
                exponent_den: d,
                lhs: m.lhs,
                rhs: m.rhs,
                detail: None,
            }
        }),
        Sides::Laurent { lhs, rhs, window } => lhs.equal_through(&rhs, window, order, 1)?.map(|m| {
            let (n, d) = rescale(m.exponent_num, m.exponent_den, exponent_den);
            let detail = if lhs.vars() == 1 && rhs.vars() == 1 {
                format!("x^{}", m.monomial.0)
            } else {
                format!("x^{} y^{}", m.monomial.0, m.monomial.1)
            };
            MismatchReport {
                exponent_num: n,
                exponent_den: d,
                lhs: m.lhs,
                rhs: m.rhs,
                detail: Some(detail),
            }
        }),
        Sides::Residue { failure, .. } => failure.map(|(label, l, r)| MismatchReport {
            exponent_num: 0,
            exponent_den: 1,
            lhs: Eisenstein::from(l),
            rhs: Eisenstein::from(r),
            detail: Some(label),
        }),
    })
}

/// Runs one case at the given order.
pub fn verify_case(case: &IdentityCase, order: i64) -> VerificationReport {
    let start = Instant::now();
    let outcome = if order < 0 {
        Err(Error::InvalidArgument(format!(
            "order must be nonnegative, got {}",
            order
        )))
    } else {
        case.evaluate(order).and_then(|s| compare(s, order, case.exponent_den))
    };
    let wall_time_ms = start.elapsed().as_millis();
    let (status, first_mismatch, error) = match outcome {
        Ok(None) => (Status::Pass, None, None),
        Ok(Some(m)) => (Status::Fail, Some(m), None),
        Err(e) => (Status::Error, None, Some(e.to_string())),
    };
    VerificationReport {
        id: case.id.clone(),
        status,
        checked_order: order,
        first_mismatch,
        error,
        wall_time_ms,
    }
}

/// All registered cases, sorted by id.
pub fn list() -> &'static [IdentityCase] {
    static CASES: OnceLock<Vec<IdentityCase>> = OnceLock::new();
    CASES.get_or_init(|| {
        let mut v = build();
        v.sort_by(|a, b| a.id.cmp(&b.id));
        v
    })
}

pub fn find(id: &str) -> Result<&'static IdentityCase> {
    list()
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::UnknownIdentity(id.to_string()))
}

pub fn verify(id: &str, order: Option<i64>) -> Result<VerificationReport> {
    let case = find(id)?;
    let order = order.unwrap_or(case.default_order);
    if order < 0 {
        return Err(Error::InvalidArgument(format!(
            "order must be nonnegative, got {}",
            order
        )));
    }
    Ok(verify_case(case, order))
}

/// Runs every case. `order_scale` multiplies the default orders; `jobs`
/// bounds the worker count (default: all cores). Reports come back in id
/// order regardless of scheduling.
pub fn verify_all(order_scale: Option<f64>, jobs: Option<usize>) -> Result<Vec<VerificationReport>> {
    let scale = order_scale.unwrap_or(1.0);
    if !(scale >= 0.0 && scale.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "order scale must be finite and nonnegative, got {}",
            scale
        )));
    }
    let run = |c: &IdentityCase| verify_case(c, (c.default_order as f64 * scale).round() as i64);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err(Error::InvalidArgument("jobs must be at least 1".into()));
        }
        builder = builder.num_threads(j);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {}", e)))?;
    Ok(pool.install(|| list().par_iter().map(run).collect()))
}

/// One tab-separated record per case: id, description, default order,
/// kind, anchor.
pub fn export() -> String {
    let mut out = String::from("id\tdescription\tdefault_order\tkind\tanchor\n");
    for c in list() {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            c.id,
            c.description,
            c.default_order,
            c.kind.as_str(),
            c.anchor
        );
    }
    out
}

// ---------------------------------------------------------------------------
// Building blocks shared by several cases.

fn w_minus_w2() -> Eisenstein {
    Eisenstein::sqrt_minus_three()
}

/// `f(ω^j q^(1/3))` through `q^order` for an integer-exponent builder.
fn twisted<F>(f: F, j: i64, order: i64) -> Result<QSeries>
where
    F: Fn(i64) -> Result<QSeries>,
{
    f(3 * order + 3)?.twist(j)
}

/// `f(q³)` through `q^order`.
fn cubed<F>(f: F, order: i64) -> Result<QSeries>
where
    F: Fn(i64) -> Result<QSeries>,
{
    Ok(f(order / 3 + 1)?.subst_power(3))
}

/// `(a - b) / (ω - ω²)`, which must have rational integer coefficients.
fn wdiv(a: &QSeries, b: &QSeries) -> Result<QSeries> {
    let q = (a - b).div_exact_coeffs(&w_minus_w2())?;
    if !q.has_rational_integer_coeffs() {
        return Err(Error::InvalidArgument("ω-combination is not ω-free".into()));
    }
    Ok(q)
}

/// `(f(ωq^(1/3)) - f(ω²q^(1/3))) / (ω - ω²)`
fn wdiff_plain<F: Fn(i64) -> Result<QSeries> + Copy>(f: F, order: i64) -> Result<QSeries> {
    wdiv(&twisted(f, 1, order)?, &twisted(f, 2, order)?)
}

/// `(ω f(ωq^(1/3)) - ω² f(ω²q^(1/3))) / (ω - ω²)`
fn wdiff_weighted<F: Fn(i64) -> Result<QSeries> + Copy>(f: F, order: i64) -> Result<QSeries> {
    let a = twisted(f, 1, order)?.scale(&Eisenstein::omega());
    let b = twisted(f, 2, order)?.scale(&Eisenstein::omega_pow(2));
    wdiv(&a, &b)
}

fn th0(o: i64) -> Result<QSeries> {
    Ok(theta0(o))
}

fn th1(o: i64) -> Result<QSeries> {
    Ok(theta1(o))
}

fn euler(o: i64) -> Result<QSeries> {
    poch(1, 1, o)
}

fn ensure_integral(s: QSeries) -> Result<QSeries> {
    if s.has_rational_integer_coeffs() {
        Ok(s)
    } else {
        Err(Error::InvalidArgument("side has coefficients outside Z".into()))
    }
}

/// Left side of the n-th quadruple-sum identity.
pub fn thm12_lhs(n: u8, order: i64) -> Result<QSeries> {
    quad_sum(&QuadSumSpec::theorem(n)?, order)
}

/// Right side of the n-th quadruple-sum identity.
pub fn thm12_rhs(n: u8, order: i64) -> Result<QSeries> {
    let o = order;
    Ok(match n {
        1 => (&(&euler(o)? * &theta0(o).pow(2)) * &theta_sum(5, 3, true, o)?).scale_int(-1),
        2 => &(&euler(o)? * &theta0(o).pow(2)) * &theta_sum(5, 1, true, o)?,
        3 => &(&poch(2, 2, o)? * &trisum(o).pow(2)) * &theta_sum(10, 2, true, o)?,
        4 => &(&poch(2, 2, o)? * &trisum(o).pow(2)) * &theta_sum(10, 6, true, o)?,
        _ => return Err(Error::InvalidArgument(format!("no identity {}", n))),
    })
}

/// Left side of the n-th mock theta identity, built from the indefinite
/// theta representations by twists and exact division by `ω - ω²`.
pub fn ram_lhs(n: u8, order: i64) -> Result<QSeries> {
    let o = order + 1;
    let s = match n {
        1 => &cubed(special::mock_phi, o)?.shift(2, 3) - &wdiff_plain(special::mock_psi, o)?,
        2 => &cubed(special::mock_psi, o + 1)?.shift(-2, 3) + &wdiff_weighted(special::mock_phi, o)?,
        3 => &cubed(special::mock_x, o)? - &wdiff_weighted(special::mock_chi, o)?,
        4 => &cubed(special::mock_chi, o)? + &wdiff_plain(special::mock_x, o)?.shift(2, 3),
        _ => return Err(Error::InvalidArgument(format!("no identity {}", n))),
    };
    ensure_integral(s)
}

/// Right side of the n-th mock theta identity.
pub fn ram_rhs(n: u8, order: i64) -> Result<QSeries> {
    let o = order + 1;
    let s = match n {
        1 | 2 => {
            let ratio = twisted(th0, 0, o)?.div_series(&theta0(o))?;
            let sum = theta_sum(5, if n == 1 { 3 } else { 1 }, true, o)?;
            let base = (&ratio * &sum).div_series(&poch(1, 2, o)?)?;
            if n == 1 {
                base.shift(1, 3).scale_int(-1)
            } else {
                base
            }
        }
        3 | 4 => {
            let ratio = twisted(th1, 0, o)?.div_series(&theta1(o))?;
            let sum = theta_sum(10, if n == 3 { 2 } else { 6 }, true, o)?;
            // 1/(-q;q)_∞ = (q;q²)_∞
            let base = &(&ratio * &sum) * &poch(1, 2, o)?;
            if n == 3 {
                base
            } else {
                base.shift(1, 1).scale_int(-1)
            }
        }
        _ => return Err(Error::InvalidArgument(format!("no identity {}", n))),
    };
    ensure_integral(s)
}

// ---------------------------------------------------------------------------
// The rewriting of the mock theta identities into quadruple sums.

/// `θ_j(ωq^(1/3)) θ_j(ω²q^(1/3))` with θ1 taken without the ½.
fn pair_product(j: u8, o: i64) -> Result<QSeries> {
    let f = if j == 0 { th0 } else { th1 };
    Ok(&twisted(f, 1, o)? * &twisted(f, 2, o)?)
}

/// The factor that turns the n-th mock theta identity into the n-th
/// quadruple-sum identity.
fn multiplier(n: u8, o: i64) -> Result<QSeries> {
    let j = if n <= 2 { 0 } else { 1 };
    let f = if j == 0 { th0 } else { th1 };
    let base = &pair_product(j, o)? * &cubed(f, o)?;
    Ok(match n {
        1 => base.shift(-1, 3),
        2 => base,
        3 => base.scale_int(4),
        _ => base.shift(-1, 1).scale_int(-4),
    })
}

fn lattice(kl: KlKind, use_k: bool, rs: RsForm, constant: i64) -> LatticeSum {
    LatticeSum {
        kl,
        use_k,
        rs: Some(rs),
        constant,
        den: 3,
        alternating: kl == KlKind::Square,
    }
}

fn numerator(n: u8) -> fn(i64) -> Result<QSeries> {
    match n {
        1 => special::phi_numerator,
        2 => special::psi_numerator,
        3 => special::x_numerator,
        _ => special::chi_numerator,
    }
}

/// First term after multiplying through, as a product.
fn first_product(n: u8, o: i64) -> Result<QSeries> {
    let j = if n <= 2 { 0 } else { 1 };
    let pp = pair_product(j, o + 1)?;
    let num = cubed(numerator(n), o + 2)?;
    let t = &pp * &num;
    Ok(match n {
        1 => t.shift(1, 3),
        2 => t.shift(-2, 3),
        3 => t.scale_int(4),
        _ => t.shift(-1, 1).scale_int(-4),
    })
}

/// First term as a quadruple sum, before any reflection of `(r, s)`.
fn first_quad_raw(n: u8, o: i64) -> Result<QSeries> {
    match n {
        1 => lattice(KlKind::Square, true, PSI_FORM, 1).sum(o, |k, l, r, s| delta(r) * delta(s) * p(k, l)),
        2 => lattice(KlKind::Square, true, RsForm::new(1, 3, 1, 9, 9), 16)
            .sum(o, |k, l, r, s| -delta(r) * delta(s) * p(k, l)),
        3 => lattice(KlKind::Triangular, true, CHI_FORM, 0).sum(o, |k, l, r, s| delta(r) * delta(s) * p(k - 1, l - 1)),
        _ => lattice(KlKind::Triangular, true, RsForm::new(2, 6, 2, 9, 9), 6)
            .sum(o, |k, l, r, s| -delta(r) * delta(s) * p(k - 1, l - 1)),
    }
}

/// First term after reflecting `(r, s)`, for the second and fourth
/// identities.
fn first_quad(n: u8, o: i64) -> Result<QSeries> {
    match n {
        2 => lattice(KlKind::Square, true, PHI_FORM, 0).sum(o, |k, l, r, s| delta(r + 2) * delta(s + 2) * p(k, l)),
        4 => lattice(KlKind::Triangular, true, X_FORM, -2)
            .sum(o, |k, l, r, s| delta(r + 1) * delta(s + 1) * p(k - 1, l - 1)),
        _ => first_quad_raw(n, o),
    }
}

/// Second term after multiplying through, as a twisted product.
fn second_product(n: u8, o: i64) -> Result<QSeries> {
    let oo = o + 2;
    let (f, num) = if n <= 2 {
        (th0 as fn(i64) -> Result<QSeries>, numerator(3 - n))
    } else {
        (th1 as fn(i64) -> Result<QSeries>, numerator(7 - n))
    };
    let a = &twisted(f, 2, oo)? * &twisted(num, 1, oo)?;
    let b = &twisted(f, 1, oo)? * &twisted(num, 2, oo)?;
    let weighted = n == 2 || n == 3;
    let bracket = if weighted {
        wdiv(&a.scale(&Eisenstein::omega()), &b.scale(&Eisenstein::omega_pow(2)))?
    } else {
        wdiv(&a, &b)?
    };
    let outer = cubed(f, oo)?;
    let t = &outer * &bracket;
    Ok(match n {
        1 => t.shift(-1, 3).scale_int(-1),
        2 => t,
        3 => t.scale_int(-4),
        _ => t.shift(-1, 3).scale_int(-4),
    })
}

/// Second term as a theta function times a triple sum.
fn second_triple(n: u8, o: i64) -> Result<QSeries> {
    let oo = o + 1;
    let sum = match n {
        1 => lattice(KlKind::Square, false, PSI_FORM, 1)
            .sum(oo, |_, l, r, s| chi3(2 * l * l + PSI_FORM.value(r, s) + 2))?,
        2 => lattice(KlKind::Square, false, PHI_FORM, 0)
            .sum(oo, |_, l, r, s| chi3(2 * l * l + PHI_FORM.value(r, s) + 1))?,
        3 => lattice(KlKind::Triangular, false, CHI_FORM, 1)
            .sum(oo, |_, l, r, s| chi3(l * l + l + CHI_FORM.value(r, s) + 2))?,
        _ => {
            lattice(KlKind::Triangular, false, X_FORM, 0).sum(oo, |_, l, r, s| chi3(l * l + l + X_FORM.value(r, s)))?
        }
    };
    let outer = if n <= 2 {
        cubed(th0, oo)?
    } else {
        cubed(th1, oo)?.scale_int(-2)
    };
    let t = &outer * &sum;
    Ok(if n == 4 { t.shift(-1, 3) } else { t })
}

/// Second term as a quadruple sum.
fn second_quad(n: u8, o: i64) -> Result<QSeries> {
    match n {
        1 => lattice(KlKind::Square, true, PSI_FORM, 1).sum(o, |k, l, r, s| delta(k) * chi3(r * r + s * s - l * l - 1)),
        2 => lattice(KlKind::Square, true, PHI_FORM, 0)
            .sum(o, |k, l, r, s| delta(k) * chi3(r * r + s * s - l * l + r + s + 1)),
        3 => lattice(KlKind::Triangular, true, CHI_FORM, 0)
            .sum(o, |k, l, r, s| -delta(k - 1) * chi3(-r * r - s * s + l * l + l - 1)),
        _ => lattice(KlKind::Triangular, true, X_FORM, -2)
            .sum(o, |k, l, r, s| -delta(k - 1) * chi3(-r * r - s * s + l * l + l + r + s)),
    }
}

/// The term that is antisymmetric in `k` and `l` and drops out.
fn antisymmetric(n: u8, o: i64) -> Result<QSeries> {
    match n {
        1 => lattice(KlKind::Square, true, PSI_FORM, 1)
            .sum(o, |k, l, r, s| delta(r) * (delta(s) - 1) * (delta(k) - delta(l))),
        2 => lattice(KlKind::Square, true, PHI_FORM, 0).sum(o, |k, l, r, s| {
            delta(r + 2) * (delta(s + 2) - 1) * (delta(k) - delta(l))
        }),
        3 => lattice(KlKind::Triangular, true, CHI_FORM, 0).sum(o, |k, l, r, s| {
            delta(r) * (delta(s) - 1) * (delta(k - 1) - delta(l - 1))
        }),
        _ => lattice(KlKind::Triangular, true, X_FORM, -2).sum(o, |k, l, r, s| {
            delta(r + 1) * (delta(s + 1) - 1) * (delta(k - 1) - delta(l - 1))
        }),
    }
}

// ---------------------------------------------------------------------------
// The constant-term evaluation of the quadruple sums.

fn appell_law(n: u8) -> AppellLaw {
    match n {
        1 => AppellLaw::new(3, 3, 3, 1, 3),
        2 => AppellLaw::new(3, 3, 3, -2, 3).indices(1, -1, -1),
        3 => AppellLaw::new(6, 3, 3, 0, 3),
        _ => AppellLaw::new(6, -3, -3, -6, 3).indices(1, 1, 1),
    }
}

/// Smallest window outside which the left Laurent side is below `q^order`.
fn lemma31_window(which: Lemma31, order: i64) -> i64 {
    let scale = if which == Lemma31::First { 1 } else { 2 };
    let mut w = 0;
    while scale * (w + 1) * (w + 1) <= 3 * order {
        w += 1;
    }
    w
}

/// The quadruple sum as a fused constant term against the Laurent series
/// of the two-variable theta identities.
pub fn fused_sum(n: u8, order: i64) -> Result<QSeries> {
    let which = if n <= 2 { Lemma31::First } else { Lemma31::Second };
    let law = appell_law(n);
    let mut inner = order + 2;
    loop {
        let f = lemma31_sides(which, Side::L, inner, lemma31_window(which, inner))?;
        let s = appell_constant_term(&f, &f, &law)?;
        if s.order() >= 3 * order {
            return Ok(s);
        }
        inner += 1 + (3 * order - s.order()) / 3;
    }
}

fn triple_args(n: u8) -> [ThetaArg; 3] {
    if n <= 2 {
        [
            ThetaArg::x(0, 2, 1),
            ThetaArg::y(0, 2, 1),
            ThetaArg::x(1, 1, 1).with_dir((-1, -1)),
        ]
    } else {
        let a = if n == 3 { 2 } else { -2 };
        [
            ThetaArg::x(2, 4, 1).negated(),
            ThetaArg::y(2, 4, 1).negated(),
            ThetaArg::x(a, 2, 1).with_dir((-1, -1)),
        ]
    }
}

/// The coefficient extracted from the product of three thetas left after
/// all cancellations.
pub fn triple_coefficient(n: u8, order: i64) -> Result<QSeries> {
    let inner = order + 4;
    let [a, b, c] = triple_args(n).map(|t| jacobi_theta_arg(&t, inner, None));
    let prod = a?.mul_xy(&b?)?.mul_xy(&c?)?;
    let m = if n == 2 { (-1, -1) } else { (0, 0) };
    prod.coefficient(m)
}

fn prefactor(n: u8, o: i64) -> Result<QSeries> {
    let o = o + 2;
    Ok(match n {
        1 | 2 => {
            let t = euler(o)?.pow(5).div_series(&poch(2, 2, o)?.pow(2))?.scale_int(-1);
            if n == 1 {
                t
            } else {
                t.shift(-1, 1)
            }
        }
        _ => poch(2, 2, o)?.pow(5).div_series(&euler(o)?.pow(2))?.scale_int(4),
    })
}

fn single_sum(n: u8, o: i64) -> Result<QSeries> {
    let o = o + 5;
    Ok(match n {
        1 => theta_sum(5, -3, true, o)?,
        2 => theta_sum(5, -11, true, o)?.shift(4, 1),
        3 => theta_sum(10, 2, true, o)?,
        _ => theta_sum(10, -6, true, o)?,
    })
}

// ---------------------------------------------------------------------------
// Laurent-side cases.

fn theta_fe(order: i64) -> Result<Sides> {
    // Θ(x;q) = -x Θ(qx;q)
    let mut inner = order + 2;
    loop {
        let t = jacobi_theta(1, 0, 1, 1, inner, None)?;
        let rhs = t.subst(Subst::XTimesQ(1, 1))?.shift(1, 0)?.neg();
        if rhs.q_order() >= order && rhs.window() >= 5 {
            return Ok(Sides::Laurent { lhs: t, rhs, window: 5 });
        }
        inner += 2;
    }
}

fn lemma31_fe(which: Lemma31, order: i64) -> Result<Sides> {
    let (step, factor) = match which {
        // f(x) = -q³ x³ f(q² x)
        Lemma31::First => (2, -1),
        // g(x) = q⁶ x³ g(q⁴ x)
        Lemma31::Second => (4, 1),
    };
    let w = 5 + 3;
    let inner = order + step * w + 1;
    let f = lemma31_sides(which, Side::L, inner, w)?;
    let c = QSeries::from_int_terms(3, 3 * inner, [(3 * 3 * step / 2, factor)]);
    let rhs = f.subst(Subst::XTimesQ(step, 1))?.shift(3, 0)?.scale(&c);
    Ok(Sides::Laurent { lhs: f, rhs, window: 5 })
}

fn lemma32_mult(order: i64) -> Result<Sides> {
    let window = 4;
    let inner = order + 1;
    let mut w = window + 1;
    while w * (w - 1) <= 2 * inner {
        w += 1;
    }
    // the index shift reaches `window`, so the tail must start beyond it
    let t = jacobi_theta(1, 0, 1, 1, inner, Some(w + window))?;
    let mut parts = Vec::new();
    for a in -window..=window {
        for b in -window..=window {
            let law = AppellLaw::new(1, 0, 0, 0, 1).indices(-1, a, b);
            parts.push(((a, b), appell_constant_term(&t, &t, &law)?));
        }
    }
    let n = parts.iter().map(|(_, s)| s.order()).min().unwrap_or(inner);
    let mut lhs = XYPoly::new(2, 1, n, window, Tail::Unknown);
    for (m, s) in parts {
        lhs.insert(m, s);
    }
    let diag = jacobi_theta_arg(&ThetaArg::x(0, 1, 1).with_dir((1, 1)), inner, None)?;
    let rhs = diag.scale(&euler(inner)?.pow(3));
    Ok(Sides::Laurent { lhs, rhs, window })
}

fn theta_reflection(which: u8, order: i64) -> Result<Sides> {
    let o = order + 2;
    let (lhs, rhs) = match which {
        // Θ(x⁻¹q;q) = Θ(x;q)
        1 => (
            jacobi_theta_arg(&ThetaArg::x(1, 1, 1).with_dir((-1, 0)), o, Some(8))?,
            jacobi_theta(1, 0, 1, 1, o, Some(8))?,
        ),
        // Θ(x⁻¹q;q²) = Θ(xq;q²)
        2 => (
            jacobi_theta_arg(&ThetaArg::x(1, 2, 1).with_dir((-1, 0)), o, Some(8))?,
            jacobi_theta(1, 1, 2, 1, o, Some(8))?,
        ),
        // Θ(x⁻¹q⁻¹;q²) = -x⁻¹q⁻¹ Θ(xq;q²)
        _ => (
            jacobi_theta_arg(&ThetaArg::x(-1, 2, 1).with_dir((-1, 0)), o, Some(8))?,
            jacobi_theta(1, 1, 2, 1, o + 1, Some(8))?
                .shift(-1, 0)?
                .scale(&QSeries::from_int_terms(1, o, [(-1, -1)])),
        ),
    };
    Ok(Sides::Laurent { lhs, rhs, window: 5 })
}

// ---------------------------------------------------------------------------
// Exhaustive residue checks.

fn residue_cases() -> Sides {
    type Check = fn(i64, i64, i64, i64) -> (i64, i64);
    let checks: [(&str, Check); 4] = [
        ("base", |k, l, r, s| {
            (
                delta(r) * delta(s) * p(k, l) + delta(k) * chi3(r * r + s * s - l * l - 1),
                (delta(k) - delta(r)) * (delta(l) - delta(s)) + delta(r) * (delta(s) - 1) * (delta(k) - delta(l)),
            )
        }),
        ("shift-rs", |k, l, r, s| {
            (
                delta(r + 2) * delta(s + 2) * p(k, l) + delta(k) * chi3(r * r + s * s - l * l + r + s + 1),
                (delta(k) - delta(r - 1)) * (delta(l) - delta(s - 1))
                    + delta(r + 2) * (delta(s + 2) - 1) * (delta(k) - delta(l)),
            )
        }),
        ("shift-kl", |k, l, r, s| {
            (
                delta(r) * delta(s) * p(k - 1, l - 1) - delta(k - 1) * chi3(-r * r - s * s + l * l + l - 1),
                (delta(k - 1) - delta(r)) * (delta(l - 1) - delta(s))
                    + delta(r) * (delta(s) - 1) * (delta(k - 1) - delta(l - 1)),
            )
        }),
        ("shift-all", |k, l, r, s| {
            (
                delta(r + 1) * delta(s + 1) * p(k - 1, l - 1) - delta(k - 1) * chi3(-r * r - s * s + l * l + l + r + s),
                (delta(k - 1) - delta(r + 1)) * (delta(l - 1) - delta(s + 1))
                    + delta(r + 1) * (delta(s + 1) - 1) * (delta(k - 1) - delta(l - 1)),
            )
        }),
    ];
    let mut checked = 0;
    for (name, f) in checks {
        for t in 0..81 {
            let (k, l, r, s) = (t % 3, t / 3 % 3, t / 9 % 3, t / 27);
            let (a, b) = f(k, l, r, s);
            checked += 1;
            if a != b {
                return Sides::Residue {
                    checked,
                    failure: Some((format!("{} (k,l,r,s)=({},{},{},{})", name, k, l, r, s), a, b)),
                };
            }
        }
    }
    Sides::Residue { checked, failure: None }
}

fn reflection_cases() -> Sides {
    let mut checked = 0;
    for r in -12i64..=12 {
        for s in -12i64..=12 {
            let rows = [
                ("negate", rho(-r, -s), -rho(r, s) + d(r) + d(s)),
                ("negate-1", rho(-r - 1, -s - 1), -rho(r, s)),
                ("negate-2", rho(-r - 2, -s - 2), -rho(r, s) - d(r + 1) - d(s + 1)),
            ];
            for (name, a, b) in rows {
                checked += 1;
                if a != b {
                    return Sides::Residue {
                        checked,
                        failure: Some((format!("{} (r,s)=({},{})", name, r, s), a, b)),
                    };
                }
            }
        }
        checked += 1;
        if d(r + 1) * delta(r + 2) != 0 {
            return Sides::Residue {
                checked,
                failure: Some((format!("d(n+1)δ(n+2) n={}", r), d(r + 1) * delta(r + 2), 0)),
            };
        }
    }
    Sides::Residue { checked, failure: None }
}

fn chi3_cases() -> Sides {
    let w = w_minus_w2();
    let mut checked = 0;
    for k in -30i64..=30 {
        checked += 1;
        let lhs = Eisenstein::omega_pow(k) - Eisenstein::omega_pow(2 * k);
        let q = match lhs.div_exact(&w) {
            Ok(q) => q,
            Err(_) => {
                return Sides::Residue {
                    checked,
                    failure: Some((format!("k={} not divisible", k), 0, chi3(k))),
                }
            }
        };
        let value = q.to_i64_pair().map(|(a, b)| if b == 0 { a } else { i64::MIN });
        if value != Some(chi3(k)) {
            return Sides::Residue {
                checked,
                failure: Some((format!("k={}", k), value.unwrap_or(i64::MIN), chi3(k))),
            };
        }
    }
    Sides::Residue { checked, failure: None }
}

// ---------------------------------------------------------------------------

fn build() -> Vec<IdentityCase> {
    let mut v = Vec::new();

    for n in 1..=4u8 {
        v.push(
            IdentityCase::univariate(
                &format!("thm12.{}", n),
                &format!("quadruple sum {} equals its theta product", n),
                50,
                3,
                move |o| thm12_lhs(n, o),
                move |o| thm12_rhs(n, o),
            )
            .anchor("quadruple sums over rho-weighted lattice"),
        );
        v.push(
            IdentityCase::univariate(
                &format!("ram.{}", n),
                &format!("mock theta identity {} via twists and division by w - w^2", n),
                20,
                6,
                move |o| ram_lhs(n, o),
                move |o| ram_rhs(n, o),
            )
            .anchor("tenth order mock theta identities"),
        );
        v.push(
            IdentityCase::univariate(
                &format!("sec2.{}.rhs", n),
                &format!(
                    "multiplied right side of mock identity {} is the product side of sum {}",
                    n, n
                ),
                50,
                3,
                move |o| Ok(&multiplier(n, o + 2)? * &ram_rhs(n, o + 2)?),
                move |o| thm12_rhs(n, o),
            )
            .anchor("rewriting the mock theta identities"),
        );
        v.push(
            IdentityCase::univariate(
                &format!("sec2.{}.lhs", n),
                &format!("multiplied left side of mock identity {} splits into two terms", n),
                50,
                6,
                move |o| Ok(&multiplier(n, o + 2)? * &ram_lhs(n, o + 2)?),
                move |o| Ok(&first_product(n, o)? + &second_product(n, o)?),
            )
            .anchor("rewriting the mock theta identities"),
        );
        v.push(
            IdentityCase::univariate(
                &format!("sec2.{}.first", n),
                &format!("first term of identity {} as a quadruple sum", n),
                50,
                3,
                move |o| first_product(n, o),
                move |o| first_quad_raw(n, o),
            )
            .anchor("first term via the p(k,l) table"),
        );
        if n == 2 || n == 4 {
            v.push(
                IdentityCase::univariate(
                    &format!("sec2.{}.reflect", n),
                    &format!("first term of identity {} after reflecting (r,s)", n),
                    50,
                    3,
                    move |o| first_quad_raw(n, o),
                    move |o| first_quad(n, o),
                )
                .anchor("reflection of rho"),
            );
        }
        v.push(
            IdentityCase::univariate(
                &format!("sec2.{}.second", n),
                &format!("second term of identity {} as theta times a triple sum", n),
                50,
                3,
                move |o| second_product(n, o),
                move |o| second_triple(n, o),
            )
            .anchor("second term via chi3"),
        );
        v.push(
            IdentityCase::univariate(
                &format!("sec2.{}.expand", n),
                &format!("second term of identity {} as a quadruple sum", n),
                50,
                3,
                move |o| second_triple(n, o),
                move |o| second_quad(n, o),
            )
            .anchor("second term via chi3"),
        );
        v.push(
            IdentityCase::univariate(
                &format!("sec2.{}.combine", n),
                &format!("both terms of identity {} add up to quadruple sum {}", n, n),
                50,
                3,
                move |o| Ok(&first_quad(n, o)? + &second_quad(n, o)?),
                move |o| thm12_lhs(n, o),
            )
            .anchor("81-case residue identity"),
        );
        v.push(
            IdentityCase::univariate(
                &format!("sec2.{}.antisym", n),
                &format!("antisymmetric term of identity {} vanishes", n),
                50,
                3,
                move |o| antisymmetric(n, o),
                move |o| Ok(QSeries::zero(3, 3 * o)),
            )
            .anchor("antisymmetry in k and l"),
        );
        v.push(
            IdentityCase::univariate(
                &format!("sec3.{}.fused", n),
                &format!("quadruple sum {} as a fused Appell constant term", n),
                50,
                3,
                move |o| thm12_lhs(n, o),
                move |o| fused_sum(n, o),
            )
            .anchor("constant term method"),
        );
        v.push(
            IdentityCase::univariate(
                &format!("sec3.{}.cancel", n),
                &format!("fused constant term {} reduces to a triple theta coefficient", n),
                50,
                3,
                move |o| fused_sum(n, o),
                move |o| Ok(&prefactor(n, o)? * &triple_coefficient(n, o + 2)?),
            )
            .anchor("constant term method"),
        );
        v.push(
            IdentityCase::univariate(
                &format!("sec3.{}.diag", n),
                &format!("triple theta coefficient {} by diagonal pairing", n),
                50,
                1,
                move |o| triple_coefficient(n, o),
                move |o| single_sum(n, o),
            )
            .anchor("constant term method"),
        );
        let (l, r) = match n {
            1 => (
                "-poch(1,1)^5 / poch(2,2)^2 * thetasum(5,-3)",
                "-poch(1,1) * theta0^2 * thetasum(5,3)",
            ),
            2 => (
                "-q^(-1) * poch(1,1)^5 / poch(2,2)^2 * q^4 * thetasum(5,-11)",
                "poch(1,1) * theta0^2 * thetasum(5,1)",
            ),
            3 => (
                "4 * poch(2,2)^5 / poch(1,1)^2 * thetasum(10,2)",
                "poch(2,2) * trisum^2 * thetasum(10,2)",
            ),
            _ => (
                "4 * poch(2,2)^5 / poch(1,1)^2 * thetasum(10,-6)",
                "poch(2,2) * trisum^2 * thetasum(10,6)",
            ),
        };
        v.push(
            IdentityCase::univariate(
                &format!("sec3.{}.rhs", n),
                &format!("reduced constant term {} equals product side {}", n, n),
                50,
                1,
                move |o| Ok(&prefactor(n, o)? * &single_sum(n, o)?),
                move |o| thm12_rhs(n, o),
            )
            .anchor("constant term method")
            .dsl(l, r),
        );
    }

    for j in 0..=1u8 {
        let f = if j == 0 { th0 } else { th1 };
        let name = if j == 0 { "theta0" } else { "theta1" };
        v.push(
            IdentityCase::univariate(
                &format!("lem21.j{}", j),
                &format!("{name}(q^(1/3)) {name}(w q^(1/3)) {name}(w^2 q^(1/3)) {name}(q^3) = {name}(q)^4"),
                50,
                3,
                move |o| Ok(&(&(&twisted(f, 0, o)? * &twisted(f, 1, o)?) * &twisted(f, 2, o)?) * &cubed(f, o)?),
                move |o| Ok(f(o)?.pow(4)),
            )
            .anchor("four-factor theta product")
            .dsl(
                &format!("{name}.twist(0) * {name}.twist(1) * {name}.twist(2) * {name}.subq(3)"),
                &format!("{name}^4"),
            ),
        );
        v.push(
            IdentityCase::univariate(
                &format!("prodexp.j{}", j),
                &format!("{name}(w q^(1/3)) {name}(w^2 q^(1/3)) as a p(k,l)-weighted double sum"),
                50,
                3,
                move |o| pair_product(j, o),
                move |o| {
                    let kl = LatticeSum {
                        kl: if j == 0 { KlKind::Square } else { KlKind::Triangular },
                        use_k: true,
                        rs: None,
                        constant: 0,
                        den: 3,
                        alternating: j == 0,
                    };
                    if j == 0 {
                        kl.sum(o, |k, l, _, _| p(k, l))
                    } else {
                        kl.sum(o, |k, l, _, _| p(k - 1, l - 1))?
                            .div_exact_coeffs(&Eisenstein::from(4))
                    }
                },
            )
            .anchor("residue slices of theta"),
        );
        v.push(
            IdentityCase::univariate(
                &format!("slices.j{}", j),
                &format!("the three residue slices of {name}(q^(1/3)) add up to it"),
                50,
                3,
                move |o| {
                    let mut s = QSeries::zero(3, 3 * o);
                    for i in 0..3 {
                        s = &s + &theta_slice(j, i, o)?;
                    }
                    Ok(s)
                },
                move |o| {
                    if j == 0 {
                        twisted(th0, 0, o)
                    } else {
                        Ok(trisum(3 * o + 3).twist(0)?)
                    }
                },
            )
            .anchor("residue slices of theta"),
        );
    }

    v.push(
        IdentityCase::univariate(
            "lem21.poch",
            "(q^(1/3);q^(1/3))(wq^(1/3);wq^(1/3))(w^2q^(1/3);w^2q^(1/3))(q^3;q^3) = (q;q)^4",
            50,
            3,
            |o| {
                let t = |j| twisted(euler, j, o);
                Ok(&(&(&t(0)? * &t(1)?) * &t(2)?) * &poch(3, 3, o)?)
            },
            |o| Ok(euler(o)?.pow(4)),
        )
        .anchor("four-factor Pochhammer product")
        .dsl(
            "poch(1,1).twist(0) * poch(1,1).twist(1) * poch(1,1).twist(2) * poch(3,3)",
            "poch(1,1)^4",
        ),
    );
    v.push(
        IdentityCase::univariate(
            "classical.theta0",
            "theta0 = (q;q)^2 / (q^2;q^2)",
            50,
            1,
            |o| Ok(theta0(o)),
            |o| euler(o)?.pow(2).div_series(&poch(2, 2, o)?),
        )
        .anchor("classical product formulas")
        .dsl("theta0", "poch(1,1)^2 / poch(2,2)"),
    );
    v.push(
        IdentityCase::univariate(
            "classical.theta1",
            "theta1 = (q^2;q^2)^2 / (q;q)",
            50,
            1,
            |o| Ok(theta1(o)),
            |o| poch(2, 2, o)?.pow(2).div_series(&euler(o)?),
        )
        .anchor("classical product formulas")
        .dsl("theta1", "poch(2,2)^2 / poch(1,1)"),
    );
    v.push(
        IdentityCase::univariate(
            "classical.trisum",
            "sum of q^(n(n+1)/2) = 2 (q^2;q^2)^2 / (q;q)",
            50,
            1,
            |o| Ok(trisum(o)),
            |o| Ok(poch(2, 2, o)?.pow(2).div_series(&euler(o)?)?.scale_int(2)),
        )
        .anchor("classical product formulas")
        .dsl("trisum", "2 * poch(2,2)^2 / poch(1,1)"),
    );
    v.push(
        IdentityCase::univariate(
            "phi.crosscheck",
            "indefinite theta quotient for phi equals its hypergeometric series",
            50,
            1,
            special::mock_phi,
            special::mock_phi_hyper,
        )
        .anchor("two definitions of phi")
        .dsl("phi", "phihyper"),
    );
    v.push(
        IdentityCase::univariate(
            "chi.rewrite",
            "reflecting (r,s) in the chi numerator",
            50,
            1,
            |o| special::indefinite_theta(&special::IndefThetaSpec::new(2, 6, 2, -3, -3, 0, false), o),
            |o| {
                let plus = special::indefinite_theta(&special::IndefThetaSpec::new(2, 6, 2, 3, 3, 0, false), o)?;
                Ok(&theta_sum(4, 6, false, o)?.scale_int(2) - &plus)
            },
        )
        .anchor("rewriting chi")
        .dsl("indef(2,6,2,-3,-3,0)", "-indef(2,6,2,3,3,0) + 2 * thetasum(4,6; noalt)"),
    );
    v.push(
        IdentityCase::univariate(
            "chi.rewrite.odd",
            "2q sum q^(2n^2+3n) = sum q^(m(m+1)/2)",
            50,
            1,
            |o| Ok(theta_sum(4, 6, false, o)?.shift(1, 1).scale_int(2)),
            |o| Ok(trisum(o)),
        )
        .anchor("rewriting chi")
        .dsl("2 * q * thetasum(4,6; noalt)", "trisum"),
    );
    v.push(
        IdentityCase::univariate(
            "chi.raw",
            "the original chi representation equals the rewritten one",
            50,
            1,
            |o| {
                let raw = special::indefinite_theta(&special::IndefThetaSpec::new(2, 6, 2, -3, -3, 0, false), o)?;
                let t = raw.div_series(&theta1(o))?.shift(1, 1);
                Ok(&QSeries::from_int_terms(1, o, [(0, 2)]) - &t)
            },
            special::mock_chi,
        )
        .anchor("rewriting chi")
        .dsl("2 - q * indef(2,6,2,-3,-3,0) / theta1", "chi"),
    );

    v.push(
        IdentityCase::new(
            "jtp",
            "Jacobi triple product: sum side equals windowed product side",
            Kind::Bivariate,
            25,
            1,
            |o| {
                let lhs = jacobi_theta(1, 0, 1, 1, o, None)?;
                let rhs = jacobi_product(o)?;
                Ok(Sides::Laurent { lhs, rhs, window: 6 })
            },
        )
        .anchor("Jacobi triple product"),
    );
    for (i, which) in [(1, Lemma31::First), (2, Lemma31::Second)] {
        v.push(
            IdentityCase::new(
                &format!("lem31.{}", i),
                &format!("two-variable theta identity {}: double sum equals theta product", i),
                Kind::Bivariate,
                10,
                3,
                move |o| {
                    let lhs = lemma31_sides(which, Side::L, o, 5)?;
                    let rhs = lemma31_sides(which, Side::R, o, 5)?;
                    Ok(Sides::Laurent { lhs, rhs, window: 5 })
                },
            )
            .anchor("Laurent theta identities"),
        );
        v.push(
            IdentityCase::new(
                &format!("lem31.fe.{}", i),
                &format!("functional equation of the double sum {}", i),
                Kind::Bivariate,
                10,
                3,
                move |o| lemma31_fe(which, o),
            )
            .anchor("functional equations"),
        );
    }
    v.push(
        IdentityCase::new(
            "lem31.fe.theta",
            "Theta(x;q) = -x Theta(qx;q)",
            Kind::Bivariate,
            25,
            1,
            theta_fe,
        )
        .anchor("functional equations"),
    );
    v.push(
        IdentityCase::new(
            "lem32.mult",
            "Appell sum times Theta(x;q) Theta(y;q) equals (q;q)^3 Theta(xy;q)",
            Kind::Bivariate,
            20,
            1,
            lemma32_mult,
        )
        .anchor("Appell-Lerch sum in multiplied form"),
    );
    for i in 1..=3u8 {
        v.push(
            IdentityCase::new(
                &format!("theta.reflect.{}", i),
                "theta reflection used to cancel denominators",
                Kind::Bivariate,
                25,
                1,
                move |o| theta_reflection(i, o),
            )
            .anchor("theta quotient cancellations"),
        );
    }

    v.push(
        IdentityCase::new(
            "del81",
            "residue identity and its three shifts on all 81 residue tuples",
            Kind::ResidueExhaustive,
            0,
            1,
            |_| Ok(residue_cases()),
        )
        .anchor("81-case residue identity"),
    );
    v.push(
        IdentityCase::new(
            "rho.reflect",
            "reflection laws of rho for |r|,|s| <= 12",
            Kind::ResidueExhaustive,
            0,
            1,
            |_| Ok(reflection_cases()),
        )
        .anchor("reflection of rho"),
    );
    v.push(
        IdentityCase::new(
            "chi3.omega",
            "w^k - w^(2k) = chi3(k) (w - w^2) for |k| <= 30",
            Kind::ResidueExhaustive,
            0,
            1,
            |_| Ok(chi3_cases()),
        )
        .anchor("chi3 as an omega quotient"),
    );
    v
}
