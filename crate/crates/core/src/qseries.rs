//! Truncated Puiseux series in `q` with Eisenstein-integer coefficients.
//!
//! A [`QSeries`] stores the coefficient of `q^(e/den)` under key `e` and a
//! guarantee order `order`: every coefficient with exponent `<= order/den`
//! is exact, everything above it is unknown and never stored. Binary
//! operations lift both operands to the lcm of their denominators first.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::exactnum::Eisenstein;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    den: i64,
    coeffs: BTreeMap<i64, Eisenstein>,
    order: i64,
}

/// First exponent at which two series disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    /// Exponent as a reduced fraction `num/den`.
    pub exponent_num: i64,
    pub exponent_den: i64,
    pub lhs: Eisenstein,
    pub rhs: Eisenstein,
}

/// Rational exponent `num/den` reduced to lowest terms with `den > 0`.
pub fn reduce_fraction(num: i64, den: i64) -> (i64, i64) {
    let g = num.gcd(&den).max(1);
    let (n, d) = (num / g, den / g);
    if d < 0 {
        (-n, -d)
    } else {
        (n, d)
    }
}

/// Largest integer `k` with `k/to_den <= num/den`.
pub fn floor_to_den(num: i64, den: i64, to_den: i64) -> i64 {
    Integer::div_floor(&(num * to_den), &den)
}

/// Smallest integer `k` with `k/to_den >= num/den`.
pub fn ceil_to_den(num: i64, den: i64, to_den: i64) -> i64 {
    Integer::div_ceil(&(num * to_den), &den)
}

impl QSeries {
    /// The zero series, exact through `order/den`.
    pub fn zero(den: i64, order: i64) -> Self {
        assert!(den > 0, "exponent denominator must be positive");
        QSeries {
            den,
            coeffs: BTreeMap::new(),
            order,
        }
    }

    /// `c q^(e/den)`, exact through `order/den`.
    pub fn monomial(c: Eisenstein, e: i64, den: i64, order: i64) -> Self {
        let mut s = QSeries::zero(den, order);
        s.add_term(e, c);
        s
    }

    pub fn one(order: i64) -> Self {
        QSeries::monomial(Eisenstein::one(), 0, 1, order)
    }

    /// Builds a series from `(key, coefficient)` pairs; terms above the
    /// order and zero coefficients are dropped, repeated keys are summed.
    pub fn from_terms<I>(den: i64, order: i64, terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, Eisenstein)>,
    {
        let mut s = QSeries::zero(den, order);
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    pub fn from_int_terms<I>(den: i64, order: i64, terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, i64)>,
    {
        QSeries::from_terms(den, order, terms.into_iter().map(|(e, c)| (e, Eisenstein::from(c))))
    }

    /// Accumulates `c` into the coefficient of `q^(e/den)`, ignoring
    /// exponents beyond the guarantee order.
    pub fn add_term(&mut self, e: i64, c: Eisenstein) {
        if e > self.order || c.is_zero() {
            return;
        }
        match self.coeffs.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    /// Guarantee order in units of `1/den`.
    pub fn order(&self) -> i64 {
        self.order
    }

    /// Guarantee order as a reduced fraction.
    pub fn order_fraction(&self) -> (i64, i64) {
        reduce_fraction(self.order, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Least key with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Valuation used for order bookkeeping: the zero series counts as
    /// vanishing through its own guarantee order.
    pub fn effective_valuation(&self) -> i64 {
        self.valuation().unwrap_or(self.order)
    }

    pub fn leading(&self) -> Option<(i64, &Eisenstein)> {
        self.coeffs.iter().next().map(|(e, c)| (*e, c))
    }

    /// Stored `(key, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Eisenstein)> + '_ {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    /// Re-expresses the series over denominator `new_den`, which must be a
    /// multiple of the current one.
    pub fn lift(&self, new_den: i64) -> QSeries {
        assert!(
            new_den > 0 && new_den % self.den == 0,
            "cannot lift denominator {} to {}",
            self.den,
            new_den
        );
        let k = new_den / self.den;
        if k == 1 {
            return self.clone();
        }
        QSeries {
            den: new_den,
            coeffs: self.coeffs.iter().map(|(e, c)| (e * k, c.clone())).collect(),
            order: self.order * k,
        }
    }

    /// Smallest denominator that represents the stored terms; the order is
    /// rounded down onto the new grid.
    pub fn normalized(&self) -> QSeries {
        let mut g = self.den;
        for e in self.coeffs.keys() {
            g = g.gcd(e);
            if g == 1 {
                break;
            }
        }
        if g <= 1 {
            return self.clone();
        }
        QSeries {
            den: self.den / g,
            coeffs: self.coeffs.iter().map(|(e, c)| (e / g, c.clone())).collect(),
            order: Integer::div_floor(&self.order, &g),
        }
    }

    fn lifted_pair(&self, other: &QSeries) -> (QSeries, QSeries) {
        let d = self.den.lcm(&other.den);
        (self.lift(d), other.lift(d))
    }

    /// Drops everything above `order/den` (same denominator); a larger
    /// order than the current one is clamped.
    pub fn truncate(&self, order: i64) -> QSeries {
        let order = order.min(self.order);
        QSeries {
            den: self.den,
            coeffs: self.coeffs.range(..=order).map(|(e, c)| (*e, c.clone())).collect(),
            order,
        }
    }

    /// Truncates to the rational order `num/den`.
    pub fn truncate_to(&self, num: i64, den: i64) -> QSeries {
        self.truncate(floor_to_den(num, den, self.den))
    }

    /// Exact coefficient of `q^(e/d)`.
    pub fn coeff(&self, e: i64, d: i64) -> Result<Eisenstein> {
        // e/d <= order/den  <=>  e*den <= order*d
        if (e as i128) * (self.den as i128) > (self.order as i128) * (d as i128) {
            return Err(Error::OrderExceeded {
                num: e,
                den: d,
                order_num: self.order,
                order_den: self.den,
            });
        }
        if (e * self.den) % d != 0 {
            return Ok(Eisenstein::zero());
        }
        let key = e * self.den / d;
        Ok(self.coeffs.get(&key).cloned().unwrap_or_default())
    }

    /// Compares `self` and `other` at every exponent `<= num/den`.
    /// Returns the first disagreement, if any.
    pub fn equal_through(&self, other: &QSeries, num: i64, den: i64) -> Result<Option<Mismatch>> {
        let (f, g) = self.lifted_pair(other);
        let d = f.den.lcm(&den);
        let (f, g) = (f.lift(d), g.lift(d));
        let bound = num * (d / den);
        for s in [&f, &g] {
            if bound > s.order {
                return Err(Error::OrderExceeded {
                    num,
                    den,
                    order_num: s.order,
                    order_den: s.den,
                });
            }
        }
        let zero = Eisenstein::zero();
        let mut keys: Vec<i64> = f
            .coeffs
            .range(..=bound)
            .map(|(e, _)| *e)
            .chain(g.coeffs.range(..=bound).map(|(e, _)| *e))
            .collect();
        keys.sort_unstable();
        keys.dedup();
        for e in keys {
            let a = f.coeffs.get(&e).unwrap_or(&zero);
            let b = g.coeffs.get(&e).unwrap_or(&zero);
            if a != b {
                let (n, dd) = reduce_fraction(e, d);
                return Ok(Some(Mismatch {
                    exponent_num: n,
                    exponent_den: dd,
                    lhs: a.clone(),
                    rhs: b.clone(),
                }));
            }
        }
        Ok(None)
    }

    /// Exact product. The result is certified through
    /// `min(O_f + val(g), O_g + val(f))`.
    pub fn mul_series(&self, other: &QSeries) -> QSeries {
        let (f, g) = self.lifted_pair(other);
        let order = (f.order + g.effective_valuation()).min(g.order + f.effective_valuation());
        let mut out = QSeries::zero(f.den, order);
        let (Some(vf), Some(vg)) = (f.valuation(), g.valuation()) else {
            return out;
        };
        if vf + vg > order {
            return out;
        }
        // Sparse walk over the stored terms, dense accumulation buffer.
        let span = (order - vf - vg + 1) as usize;
        let mut acc = vec![Eisenstein::zero(); span];
        let g_terms: Vec<(i64, &Eisenstein)> = g.terms().collect();
        for (ef, cf) in f.coeffs.range(..=order - vg) {
            let limit = order - ef;
            for (eg, cg) in g_terms.iter() {
                if *eg > limit {
                    break;
                }
                acc[(ef + eg - vf - vg) as usize] += &(cf * *cg);
            }
        }
        for (i, c) in acc.into_iter().enumerate() {
            if !c.is_zero() {
                out.coeffs.insert(vf + vg + i as i64, c);
            }
        }
        out
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &Eisenstein) -> QSeries {
        let mut out = QSeries::zero(self.den, self.order);
        if c.is_zero() {
            return out;
        }
        for (e, v) in &self.coeffs {
            out.coeffs.insert(*e, v * c);
        }
        out
    }

    pub fn scale_int(&self, k: i64) -> QSeries {
        self.scale(&Eisenstein::from(k))
    }

    /// Multiplies by the monomial `q^(e/d)`; the order shifts with it.
    pub fn shift(&self, e: i64, d: i64) -> QSeries {
        let den = self.den.lcm(&d);
        let s = self.lift(den);
        let k = e * (den / d);
        QSeries {
            den,
            coeffs: s.coeffs.into_iter().map(|(x, c)| (x + k, c)).collect(),
            order: s.order + k,
        }
    }

    /// `1/f` by q-adic long division. The leading coefficient must be a unit
    /// of Z[w]. With `v = val(f)` the result is exact through `O_f - 2v`.
    pub fn invert(&self) -> Result<QSeries> {
        let (v, lead) = self.leading().ok_or(Error::ZeroSeries)?;
        let lead_inv = lead.unit_inverse().ok_or_else(|| Error::NotInvertible {
            leading: lead.to_string(),
        })?;
        let n = self.order - v;
        let order = self.order - 2 * v;
        let tail: Vec<(i64, &Eisenstein)> = self.coeffs.range(v + 1..=self.order).map(|(e, c)| (e - v, c)).collect();
        let mut g: Vec<Eisenstein> = Vec::with_capacity((n + 1).max(0) as usize);
        for j in 0..=n {
            if j == 0 {
                g.push(lead_inv.clone());
                continue;
            }
            let mut s = Eisenstein::zero();
            for (i, fi) in &tail {
                if *i > j {
                    break;
                }
                let gj = &g[(j - i) as usize];
                if !gj.is_zero() {
                    s += &(*fi * gj);
                }
            }
            g.push(-(&s * &lead_inv));
        }
        Ok(QSeries::from_terms(
            self.den,
            order,
            g.into_iter().enumerate().map(|(j, c)| (j as i64 - v, c)),
        ))
    }

    /// `f / g` as `f * invert(g)`.
    pub fn div_series(&self, other: &QSeries) -> Result<QSeries> {
        Ok(self.mul_series(&other.invert()?))
    }

    /// `f^k` by repeated squaring; `f^0` is `1` at the order of `f`.
    pub fn pow(&self, k: u32) -> QSeries {
        if k == 0 {
            return QSeries::monomial(Eisenstein::one(), 0, self.den, self.order.max(0));
        }
        let mut result: Option<QSeries> = None;
        let mut base = self.clone();
        let mut k = k;
        loop {
            if k & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.mul_series(&base),
                });
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            base = base.mul_series(&base);
        }
        result.expect("k > 0")
    }

    /// Substitution `q -> q^k` for a positive integer `k`.
    pub fn subst_power(&self, k: i64) -> QSeries {
        assert!(k > 0, "subst_power needs a positive integer");
        QSeries {
            den: self.den,
            coeffs: self.coeffs.iter().map(|(e, c)| (e * k, c.clone())).collect(),
            order: self.order * k,
        }
    }

    /// Substitution `q -> w^j q^(1/3)`: the term `c q^n` becomes
    /// `c w^(jn) q^(n/3)`. Only defined for integer exponents.
    pub fn twist(&self, j: i64) -> Result<QSeries> {
        let mut coeffs = BTreeMap::new();
        for (e, c) in &self.coeffs {
            if e % self.den != 0 {
                return Err(Error::NonIntegerExponents { num: *e, den: self.den });
            }
            let n = e / self.den;
            coeffs.insert(n, c.mul_omega_pow(j * n));
        }
        Ok(QSeries {
            den: 3,
            coeffs,
            order: Integer::div_floor(&self.order, &self.den),
        })
    }

    /// Applies the automorphism `w -> w^2` to every coefficient.
    pub fn conj(&self) -> QSeries {
        QSeries {
            den: self.den,
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, c.conj())).collect(),
            order: self.order,
        }
    }

    /// Divides every coefficient exactly by `v` in Z[w].
    pub fn div_exact_coeffs(&self, v: &Eisenstein) -> Result<QSeries> {
        let mut coeffs = BTreeMap::new();
        for (e, c) in &self.coeffs {
            coeffs.insert(*e, c.div_exact(v)?);
        }
        Ok(QSeries {
            den: self.den,
            coeffs,
            order: self.order,
        })
    }

    /// True iff every stored coefficient lies in Z.
    pub fn has_rational_integer_coeffs(&self) -> bool {
        self.coeffs.values().all(Eisenstein::is_rational_integer)
    }

    /// One line per term, `num/den<TAB>a<TAB>b`, sorted by exponent. With a
    /// display denominator the exponents are written over it (it must be a
    /// multiple of the series denominator).
    pub fn dump(&self, display_den: Option<i64>) -> Result<String> {
        let s = match display_den {
            Some(d) if d <= 0 || d % self.den != 0 => {
                return Err(Error::InvalidArgument(format!(
                    "display denominator {} is not a multiple of {}",
                    d, self.den
                )))
            }
            Some(d) => self.lift(d),
            None => self.clone(),
        };
        let mut out = String::new();
        for (e, c) in &s.coeffs {
            let _ = writeln!(out, "{}/{}\t{}\t{}", e, s.den, c.a, c.b);
        }
        Ok(out)
    }

    /// Parses the output of [`QSeries::dump`]; every line must share one
    /// denominator. The order is supplied by the caller.
    pub fn parse_dump(text: &str, order: i64) -> Result<QSeries> {
        let mut den: Option<i64> = None;
        let mut terms = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = || Error::InvalidArgument(format!("malformed dump line {}: {:?}", lineno + 1, line));
            let mut parts = line.split('\t');
            let exp = parts.next().ok_or_else(bad)?;
            let a = parts.next().ok_or_else(bad)?;
            let b = parts.next().ok_or_else(bad)?;
            let (n, d) = exp.split_once('/').ok_or_else(bad)?;
            let n: i64 = n.parse().map_err(|_| bad())?;
            let d: i64 = d.parse().map_err(|_| bad())?;
            if *den.get_or_insert(d) != d {
                return Err(bad());
            }
            let a = a.parse().map_err(|_| bad())?;
            let b = b.parse().map_err(|_| bad())?;
            terms.push((n, Eisenstein { a, b }));
        }
        Ok(QSeries::from_terms(den.unwrap_or(1), order, terms))
    }
}

impl<'a> Add<&'a QSeries> for &'a QSeries {
    type Output = QSeries;
    fn add(self, rhs: &'a QSeries) -> QSeries {
        let (f, g) = self.lifted_pair(rhs);
        let order = f.order.min(g.order);
        let mut out = f.truncate(order);
        for (e, c) in g.coeffs.range(..=order) {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a QSeries> for &'a QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &'a QSeries) -> QSeries {
        self + &(-rhs)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries {
            den: self.den,
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(),
            order: self.order,
        }
    }
}

impl<'a> Mul<&'a QSeries> for &'a QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &'a QSeries) -> QSeries {
        self.mul_series(rhs)
    }
}

impl Add for QSeries {
    type Output = QSeries;
    fn add(self, rhs: QSeries) -> QSeries {
        &self + &rhs
    }
}

impl Sub for QSeries {
    type Output = QSeries;
    fn sub(self, rhs: QSeries) -> QSeries {
        &self - &rhs
    }
}

impl Mul for QSeries {
    type Output = QSeries;
    fn mul(self, rhs: QSeries) -> QSeries {
        &self * &rhs
    }
}

impl Neg for QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        -&self
    }
}
