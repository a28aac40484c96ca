//! Laurent polynomials in `x` (and optionally `y`) with [`QSeries`]
//! coefficients.
//!
//! An [`XYPoly`] is a certified truncation of a formal object whose
//! coefficients are q-series. Three pieces of bookkeeping travel with it:
//!
//! * `window`: every monomial `x^a y^b` with `max(|a|, |b|) <= window` is
//!   stored exactly (absent means zero) through
//! * `q_order`: the q-order shared by all in-window coefficients, and
//! * `tail`: what is known about the monomials outside the window, either
//!   nothing, exact vanishing, or a quadratic lower bound on their
//!   q-valuation in terms of the max-norm of the exponent.
//!
//! Every operation derives the window and order it can prove from those of
//! its inputs; nothing is truncated silently.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::exactnum::Eisenstein;
use crate::qseries::QSeries;

/// Stand-in for an unbounded valuation.
const INF: i64 = i64::MAX / 8;

pub type Monomial = (i64, i64);

fn norm(m: Monomial) -> i64 {
    m.0.abs().max(m.1.abs())
}

/// Lower bound `(c2 u^2 + c1 u + c0) / d` on the q-valuation (in units of
/// the owning polynomial's denominator) of a coefficient whose monomial has
/// max-norm `u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadBound {
    pub c2: i64,
    pub c1: i64,
    pub c0: i64,
    pub d: i64,
}

impl QuadBound {
    pub fn new(c2: i64, c1: i64, c0: i64, d: i64) -> Self {
        assert!(d > 0);
        QuadBound { c2, c1, c0, d }
    }

    pub fn flat(t: i64) -> Self {
        QuadBound::new(0, 0, t, 1)
    }

    /// Smallest integer valuation compatible with the bound at `u`.
    pub fn at(&self, u: i64) -> i64 {
        Integer::div_ceil(&(self.c2 * u * u + self.c1 * u + self.c0), &self.d)
    }

    /// Minimum of [`QuadBound::at`] over integers `u >= from`, or `None`
    /// when the bound is unbounded below.
    pub fn min_from(&self, from: i64) -> Option<i64> {
        if self.c2 < 0 || (self.c2 == 0 && self.c1 < 0) {
            return None;
        }
        if self.c2 == 0 {
            return Some(self.at(from));
        }
        let v = Integer::div_floor(&(-self.c1), &(2 * self.c2));
        let best = [from, v, v + 1]
            .into_iter()
            .filter(|u| *u >= from)
            .map(|u| self.at(u))
            .min()
            .expect("from is always a candidate");
        Some(best)
    }

    /// True when the bound never decreases for `u >= from`.
    fn increasing_from(&self, from: i64) -> bool {
        // the difference at(u+1)-at(u) has sign of c2(2u+1)+c1
        self.c2 >= 0 && self.c2 * (2 * from + 1) + self.c1 >= 0
    }

    fn scaled(&self, k: i64) -> Self {
        QuadBound::new(self.c2 * k, self.c1 * k, self.c0 * k, self.d)
    }

    fn plus_const(&self, t: i64) -> Self {
        QuadBound::new(self.c2, self.c1, self.c0 + t * self.d, self.d)
    }

    fn plus_linear(&self, k: i64) -> Self {
        QuadBound::new(self.c2, self.c1 + k * self.d, self.c0, self.d)
    }

    /// `u -> bound(u - s)`.
    fn shifted(&self, s: i64) -> Self {
        QuadBound::new(
            self.c2,
            self.c1 - 2 * self.c2 * s,
            self.c2 * s * s - self.c1 * s + self.c0,
            self.d,
        )
    }
}

/// What is known about the monomials outside the window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tail {
    /// They are exactly zero.
    Vanishing,
    /// Their q-valuation is at least the bound at their max-norm.
    Bounded(QuadBound),
    /// Nothing.
    Unknown,
}

/// Substitutions on the auxiliary variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subst {
    /// `x -> x^-1`
    XInv,
    /// `y -> y^-1`
    YInv,
    /// `x -> -x`
    XNeg,
    /// `x -> x q^(num/den)`
    XTimesQ(i64, i64),
    /// `y -> y q^(num/den)`
    YTimesQ(i64, i64),
    /// `x -> x y`
    XToXY,
}

/// First monomial (in lexicographic order) and exponent where two
/// polynomials differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XYMismatch {
    pub monomial: Monomial,
    pub exponent_num: i64,
    pub exponent_den: i64,
    pub lhs: Eisenstein,
    pub rhs: Eisenstein,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XYPoly {
    vars: u8,
    den: i64,
    q_order: i64,
    window: i64,
    tail: Tail,
    terms: BTreeMap<Monomial, QSeries>,
}

impl XYPoly {
    /// An empty polynomial: zero in the window through `q_order/den`.
    pub fn new(vars: u8, den: i64, q_order: i64, window: i64, tail: Tail) -> Self {
        assert!(vars == 1 || vars == 2, "one or two auxiliary variables");
        assert!(den > 0 && window >= 0);
        XYPoly {
            vars,
            den,
            q_order,
            window,
            tail,
            terms: BTreeMap::new(),
        }
    }

    /// `c x^a y^b`, exactly zero elsewhere.
    pub fn monomial(vars: u8, c: &QSeries, m: Monomial) -> Self {
        let mut p = XYPoly::new(vars, c.den(), c.order(), norm(m), Tail::Vanishing);
        p.insert(m, c.clone());
        p
    }

    /// The constant polynomial `c`.
    pub fn constant(vars: u8, c: &QSeries) -> Self {
        XYPoly::monomial(vars, c, (0, 0))
    }

    /// Adds `c` to the coefficient of `m`. The coefficient is brought onto
    /// the polynomial's denominator and truncated to its order.
    pub fn insert(&mut self, m: Monomial, c: QSeries) {
        assert!(
            norm(m) <= self.window,
            "monomial {:?} outside window {}",
            m,
            self.window
        );
        assert!(self.vars == 2 || m.1 == 0, "y exponent in a univariate polynomial");
        let d = self.den.lcm(&c.den());
        if d != self.den {
            self.relift(d);
        }
        let c = c.lift(d).truncate(self.q_order);
        let sum = match self.terms.remove(&m) {
            Some(old) => &old + &c,
            None => c,
        };
        let sum = sum.truncate(self.q_order);
        if !sum.is_zero() {
            self.terms.insert(m, sum);
        }
    }

    fn relift(&mut self, d: i64) {
        let k = d / self.den;
        self.den = d;
        self.q_order *= k;
        if let Tail::Bounded(b) = self.tail {
            self.tail = Tail::Bounded(b.scaled(k));
        }
        for v in self.terms.values_mut() {
            *v = v.lift(d);
        }
    }

    /// Copy over denominator `d` (a multiple of the current one).
    pub fn lift(&self, d: i64) -> XYPoly {
        let mut p = self.clone();
        if d != self.den {
            assert!(d % self.den == 0);
            p.relift(d);
        }
        p
    }

    pub fn vars(&self) -> u8 {
        self.vars
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn q_order(&self) -> i64 {
        self.q_order
    }

    pub fn window(&self) -> i64 {
        self.window
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, &QSeries)> + '_ {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest max-norm among the stored monomials.
    pub fn support_radius(&self) -> i64 {
        self.terms.keys().map(|m| norm(*m)).max().unwrap_or(0)
    }

    /// Replaces the tail description; used by constructors that know the
    /// growth of the object they enumerate.
    pub fn with_tail(mut self, tail: Tail) -> Self {
        self.tail = tail;
        self
    }

    /// Lower bound on the valuation of any in-window coefficient.
    fn min_val_inside(&self) -> i64 {
        self.terms
            .values()
            .filter_map(QSeries::valuation)
            .min()
            .unwrap_or(INF)
            .min(self.q_order + 1)
    }

    /// Lower bound on the valuation of any coefficient outside the window;
    /// `INF` for a vanishing tail, `None` if there is no bound.
    pub fn tail_min(&self) -> Option<i64> {
        match self.tail {
            Tail::Vanishing => Some(INF),
            Tail::Bounded(b) => b.min_from(self.window + 1),
            Tail::Unknown => None,
        }
    }

    /// Lower bound on the valuation of every coefficient, inside the window
    /// or not.
    pub fn min_val(&self) -> Option<i64> {
        Some(self.min_val_inside().min(self.tail_min()?))
    }

    /// Coefficient of `x^a y^b`, exact through the polynomial's order.
    pub fn coefficient(&self, m: Monomial) -> Result<QSeries> {
        let u = norm(m);
        if u > self.window || (self.vars == 1 && m.1 != 0 && self.tail == Tail::Unknown) {
            return Err(Error::WindowExceeded {
                exponent: u,
                window: self.window,
            });
        }
        Ok(self
            .terms
            .get(&m)
            .cloned()
            .unwrap_or_else(|| QSeries::zero(self.den, self.q_order)))
    }

    /// Coefficient of `x^l` of a univariate polynomial.
    pub fn coefficient_x(&self, l: i64) -> Result<QSeries> {
        self.coefficient((l, 0))
    }

    pub fn constant_term(&self) -> Result<QSeries> {
        self.coefficient((0, 0))
    }

    /// Largest valuation bound that holds for every monomial outside a
    /// window `w <= self.window`.
    fn tail_floor_outside(&self, w: i64) -> Option<i64> {
        let mut t = self.tail_min()?.min(self.q_order + 1);
        for (m, c) in &self.terms {
            if norm(*m) > w {
                t = t.min(c.effective_valuation());
            }
        }
        Some(t)
    }

    /// Keeps only the monomials with max-norm at most `w`.
    pub fn restrict_window(&self, w: i64) -> Result<XYPoly> {
        if w > self.window {
            return Err(Error::WindowExceeded {
                exponent: w,
                window: self.window,
            });
        }
        if w == self.window {
            return Ok(self.clone());
        }
        let tail = match self.tail_floor_outside(w) {
            Some(t) => Tail::Bounded(QuadBound::flat(t)),
            None => Tail::Unknown,
        };
        let mut p = XYPoly::new(self.vars, self.den, self.q_order, w, tail);
        p.terms = self
            .terms
            .iter()
            .filter(|(m, _)| norm(**m) <= w)
            .map(|(m, c)| (*m, c.clone()))
            .collect();
        Ok(p)
    }

    /// Lowers the q-order (same denominator units).
    pub fn truncate_q(&self, q_order: i64) -> XYPoly {
        let q_order = q_order.min(self.q_order);
        let mut p = XYPoly::new(self.vars, self.den, q_order, self.window, self.tail);
        for (m, c) in &self.terms {
            let c = c.truncate(q_order);
            if !c.is_zero() {
                p.terms.insert(*m, c);
            }
        }
        p
    }

    fn common(a: &XYPoly, b: &XYPoly) -> (XYPoly, XYPoly) {
        let d = a.den.lcm(&b.den);
        (a.lift(d), b.lift(d))
    }

    /// Sum of two polynomials; the window is the smaller one unless both
    /// vanish outside their windows.
    pub fn add(&self, other: &XYPoly) -> XYPoly {
        let (f, g) = XYPoly::common(self, other);
        let vars = f.vars.max(g.vars);
        let q_order = f.q_order.min(g.q_order);
        let (window, tail) = if f.tail == Tail::Vanishing && g.tail == Tail::Vanishing {
            (f.window.max(g.window), Tail::Vanishing)
        } else if f.tail == g.tail && f.window == g.window {
            (f.window, f.tail)
        } else {
            let w = f.window.min(g.window);
            let tail = match (f.tail_floor_outside(w), g.tail_floor_outside(w)) {
                (Some(a), Some(b)) => Tail::Bounded(QuadBound::flat(a.min(b))),
                _ => Tail::Unknown,
            };
            (w, tail)
        };
        let mut p = XYPoly::new(vars, f.den, q_order, window, tail);
        for (m, c) in f.terms.iter().chain(g.terms.iter()) {
            if norm(*m) <= window {
                p.insert(*m, c.clone());
            }
        }
        p
    }

    pub fn neg(&self) -> XYPoly {
        let mut p = self.clone();
        for v in p.terms.values_mut() {
            *v = -&*v;
        }
        p
    }

    pub fn sub(&self, other: &XYPoly) -> XYPoly {
        self.add(&other.neg())
    }

    /// Multiplies every coefficient by the series `c`.
    pub fn scale(&self, c: &QSeries) -> XYPoly {
        let d = self.den.lcm(&c.den());
        let f = self.lift(d);
        let c = c.lift(d);
        let vc = c.valuation().unwrap_or(c.order() + 1).min(c.order() + 1);
        let q_order = (f.q_order + c.effective_valuation()).min(c.order() + f.min_val_inside());
        let tail = match f.tail {
            Tail::Bounded(b) => Tail::Bounded(b.plus_const(vc)),
            t => t,
        };
        let mut p = XYPoly::new(f.vars, d, q_order, f.window, tail);
        for (m, v) in &f.terms {
            let prod = v.mul_series(&c).truncate(q_order);
            if !prod.is_zero() {
                p.terms.insert(*m, prod);
            }
        }
        p
    }

    /// Multiplies by the monomial `x^dx y^dy`.
    pub fn shift(&self, dx: i64, dy: i64) -> Result<XYPoly> {
        let vars = if dy != 0 { 2 } else { self.vars };
        let delta = dx.abs().max(dy.abs());
        let grow = |tail: Tail| XYPoly::new(vars, self.den, self.q_order, self.window + delta, tail);
        let mut p = match self.tail {
            Tail::Vanishing => grow(Tail::Vanishing),
            Tail::Bounded(b) if b.min_from(self.window + 1).is_some_and(|t| t > self.q_order) => {
                // Outside the grown window the source monomial is outside the
                // old one, with norm at least u - delta.
                if b.increasing_from(self.window + 1) {
                    grow(Tail::Bounded(b.shifted(delta)))
                } else {
                    grow(Tail::Bounded(QuadBound::flat(
                        b.min_from(self.window + 1).expect("checked above"),
                    )))
                }
            }
            _ => {
                let w = self.window - delta;
                if w < 0 {
                    return Err(Error::WindowUnderflow(format!(
                        "shift by x^{} y^{} leaves no certified window",
                        dx, dy
                    )));
                }
                let tail = match self.tail_floor_outside(-1) {
                    Some(t) => Tail::Bounded(QuadBound::flat(t)),
                    None => Tail::Unknown,
                };
                XYPoly::new(vars, self.den, self.q_order, w, tail)
            }
        };
        for (m, c) in &self.terms {
            let t = (m.0 + dx, m.1 + dy);
            if norm(t) <= p.window {
                p.terms.insert(t, c.clone());
            }
        }
        Ok(p)
    }

    /// Product with an automatically chosen output window: the one that
    /// certifies the higher q-order, the wider one on ties.
    pub fn mul_xy(&self, other: &XYPoly) -> Result<XYPoly> {
        self.mul_xy_impl(other, None)
    }

    /// Product certified on the requested window `w`.
    pub fn mul_xy_window(&self, other: &XYPoly, w: i64) -> Result<XYPoly> {
        self.mul_xy_impl(other, Some(w))
    }

    fn mul_xy_impl(&self, other: &XYPoly, want: Option<i64>) -> Result<XYPoly> {
        let (f, g) = XYPoly::common(self, other);
        let (Some(tf), Some(tg)) = (f.tail_min(), g.tail_min()) else {
            return Err(Error::WindowUnderflow(
                "a factor has no bound outside its window".into(),
            ));
        };
        let vars = f.vars.max(g.vars);
        let (inf, ing) = (f.min_val_inside(), g.min_val_inside());
        let (mvf, mvg) = (inf.min(tf), ing.min(tg));
        let add = |a: i64, b: i64| if a >= INF || b >= INF { INF } else { a + b };
        let base = add(f.q_order, mvg).min(add(g.q_order, mvf));

        let w_full = f.window + g.window;
        let n_full = base
            .min(add(tf, mvg).saturating_sub(1))
            .min(add(tg, mvf).saturating_sub(1));

        // Inside this window, an out-of-window factor can only meet monomials
        // of the other factor that are beyond its support radius.
        let w_inner = (f.window - g.support_radius()).min(g.window - f.support_radius());
        let n_inner = base
            .min(add(tf, (g.q_order + 1).min(tg)).saturating_sub(1))
            .min(add(tg, (f.q_order + 1).min(tf)).saturating_sub(1));

        let (window, q_order) = match want {
            Some(w) if w < 0 || w > w_full => {
                return Err(Error::WindowUnderflow(format!(
                    "requested window {} exceeds the computable window {}",
                    w, w_full
                )))
            }
            Some(w) if w <= w_inner => (w, n_inner),
            Some(w) => (w, n_full),
            None if w_inner >= 0 && n_inner > n_full => (w_inner, n_inner),
            None => (w_full, n_full),
        };
        if q_order >= INF {
            return Err(Error::WindowUnderflow("product order is unbounded".into()));
        }

        let mut acc: BTreeMap<Monomial, QSeries> = BTreeMap::new();
        for (mf, cf) in &f.terms {
            for (mg, cg) in &g.terms {
                let m = (mf.0 + mg.0, mf.1 + mg.1);
                let prod = cf.mul_series(cg).truncate(n_full.max(q_order));
                if prod.is_zero() {
                    continue;
                }
                match acc.get_mut(&m) {
                    Some(v) => *v = &*v + &prod,
                    None => {
                        acc.insert(m, prod);
                    }
                }
            }
        }

        let tail = if f.tail == Tail::Vanishing && g.tail == Tail::Vanishing && window >= w_full {
            Tail::Vanishing
        } else {
            let mut t = n_full.saturating_add(1);
            for (m, c) in &acc {
                if norm(*m) > window {
                    t = t.min(c.truncate(n_full).valuation().unwrap_or(n_full + 1));
                }
            }
            Tail::Bounded(QuadBound::flat(t))
        };
        let mut p = XYPoly::new(vars, f.den, q_order, window, tail);
        for (m, c) in acc {
            if norm(m) <= window {
                let c = c.truncate(q_order);
                if !c.is_zero() {
                    p.terms.insert(m, c);
                }
            }
        }
        Ok(p)
    }

    /// Applies a substitution to the auxiliary variables.
    pub fn subst(&self, rule: Subst) -> Result<XYPoly> {
        match rule {
            Subst::XInv | Subst::YInv | Subst::XNeg => {
                let mut p = self.clone();
                p.terms = self
                    .terms
                    .iter()
                    .map(|(m, c)| match rule {
                        Subst::XInv => ((-m.0, m.1), c.clone()),
                        Subst::YInv => ((m.0, -m.1), c.clone()),
                        _ if m.0 % 2 != 0 => (*m, -c),
                        _ => (*m, c.clone()),
                    })
                    .collect();
                Ok(p)
            }
            Subst::XTimesQ(num, den) | Subst::YTimesQ(num, den) => {
                let on_x = matches!(rule, Subst::XTimesQ(..));
                if !on_x && self.vars == 1 {
                    return Ok(self.clone());
                }
                let d = self.den.lcm(&den);
                let f = self.lift(d);
                let k = num * (d / den);
                let q_order = f.q_order - f.window * k.abs();
                let tail = match f.tail {
                    Tail::Bounded(b) => Tail::Bounded(b.plus_linear(-k.abs())),
                    t => t,
                };
                let mut p = XYPoly::new(f.vars, d, q_order, f.window, tail);
                for (m, c) in &f.terms {
                    let e = if on_x { m.0 } else { m.1 };
                    let c = c.shift(e * k, d).truncate(q_order);
                    if !c.is_zero() {
                        p.terms.insert(*m, c);
                    }
                }
                Ok(p)
            }
            Subst::XToXY => {
                let (window, tail) = match self.tail {
                    Tail::Vanishing => (2 * self.window, Tail::Vanishing),
                    _ => {
                        let w = self.window / 2;
                        // out-of-window monomials map outside w; in-window ones
                        // that land outside are covered by the stored values.
                        let t = match self.tail_min() {
                            Some(t) => {
                                let mut t = t.min(self.q_order + 1);
                                for (m, c) in &self.terms {
                                    if norm((m.0, m.0 + m.1)) > w {
                                        t = t.min(c.effective_valuation());
                                    }
                                }
                                Tail::Bounded(QuadBound::flat(t))
                            }
                            None => Tail::Unknown,
                        };
                        (w, t)
                    }
                };
                let mut p = XYPoly::new(2, self.den, self.q_order, window, tail);
                for (m, c) in &self.terms {
                    let t = (m.0, m.0 + m.1);
                    if norm(t) <= window {
                        p.terms.insert(t, c.clone());
                    }
                }
                Ok(p)
            }
        }
    }

    /// Specializes `x -> q^(num/den)` in a univariate polynomial and sums.
    /// Needs a tail bound that outgrows the linear shift.
    pub fn eval_x_at_q(&self, num: i64, den: i64) -> Result<QSeries> {
        if self.vars != 1 {
            return Err(Error::InvalidArgument(
                "x-specialization needs a univariate polynomial".into(),
            ));
        }
        let p = self.subst(Subst::XTimesQ(num, den))?;
        let mut order = p.q_order;
        match p.tail {
            Tail::Vanishing => {}
            Tail::Bounded(b) => match b.min_from(p.window + 1) {
                Some(t) => order = order.min(t - 1),
                None => {
                    return Err(Error::WindowUnderflow(
                        "tail does not outgrow the specialization".into(),
                    ))
                }
            },
            Tail::Unknown => return Err(Error::WindowUnderflow("unknown tail cannot be summed".into())),
        }
        let mut s = QSeries::zero(p.den, order);
        for c in p.terms.values() {
            s = &s + &c.truncate(order);
        }
        Ok(s.truncate(order))
    }

    /// Compares all monomials with max-norm `<= window` through
    /// `num/den`. Returns the first difference, scanning monomials in
    /// lexicographic order.
    pub fn equal_through(&self, other: &XYPoly, window: i64, num: i64, den: i64) -> Result<Option<XYMismatch>> {
        for p in [self, other] {
            if window > p.window {
                return Err(Error::WindowExceeded {
                    exponent: window,
                    window: p.window,
                });
            }
        }
        let mut keys: Vec<Monomial> = self
            .terms
            .keys()
            .chain(other.terms.keys())
            .copied()
            .filter(|m| norm(*m) <= window)
            .collect();
        keys.sort_unstable();
        keys.dedup();
        for m in keys {
            let a = self.coefficient(m)?;
            let b = other.coefficient(m)?;
            if let Some(mm) = a.equal_through(&b, num, den)? {
                return Ok(Some(XYMismatch {
                    monomial: m,
                    exponent_num: mm.exponent_num,
                    exponent_den: mm.exponent_den,
                    lhs: mm.lhs,
                    rhs: mm.rhs,
                }));
            }
        }
        // Orders are still checked when no monomial is stored.
        QSeries::zero(self.den, self.q_order).equal_through(&QSeries::zero(other.den, other.q_order), num, den)?;
        Ok(None)
    }

    /// Blocks of `x-exp [y-exp] :` followed by the coefficient dump, in
    /// lexicographic monomial order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (m, c) in &self.terms {
            if self.vars == 1 {
                let _ = writeln!(out, "{} :", m.0);
            } else {
                let _ = writeln!(out, "{} {} :", m.0, m.1);
            }
            out.push_str(&c.dump(None).expect("own denominator"));
        }
        out
    }
}
