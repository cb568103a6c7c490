//! Closed-form proportion bounds `h_δ(r)`, `k_δ(r)` and the per-class
//! bounds, evaluated in the log2 domain over any `Real` scalar.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::real::Real;

/// `δ ∈ (0, 1/2)`, held exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Delta {
    ratio: Ratio<u64>,
    text: String,
}

impl Delta {
    pub fn new(numer: u64, denom: u64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::Domain("delta denominator is zero".into()));
        }
        let ratio = Ratio::new(numer, denom);
        if numer == 0 || ratio >= Ratio::new(1, 2) {
            return Err(Error::Domain(format!("delta {numer}/{denom} is outside (0, 1/2)")));
        }
        Ok(Delta {
            ratio,
            text: format!("{}/{}", ratio.numer(), ratio.denom()),
        })
    }

    pub fn ratio(&self) -> Ratio<u64> {
        self.ratio
    }

    pub fn to_real<R: Real>(&self, ctx: &R::Ctx) -> R {
        R::from_ratio(*self.ratio.numer(), *self.ratio.denom(), ctx)
    }
}

impl FromStr for Delta {
    type Err = Error;

    /// Accepts `0.05`, `.05` or `1/20`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("invalid delta {s:?}"));
        let mut d = if let Some((n, m)) = s.split_once('/') {
            Delta::new(n.trim().parse().map_err(|_| bad())?, m.trim().parse().map_err(|_| bad())?)?
        } else {
            let (int, frac) = s.split_once('.').unwrap_or((s, ""));
            if (int.is_empty() && frac.is_empty())
                || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
                || frac.len() > 18
            {
                return Err(bad());
            }
            let denom = 10u64.pow(frac.len() as u32);
            let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
            let frac_v: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
            let numer = int.checked_mul(denom).and_then(|x| x.checked_add(frac_v)).ok_or_else(bad)?;
            Delta::new(numer, denom)?
        };
        d.text = s.to_string();
        Ok(d)
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.text)
    }
}

impl Serialize for Delta {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

/// The group order, either an integer or `2^t` for `t` beyond `u64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    Int(u64),
    PowerOfTwo(u64),
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Int(r) => write!(f, "{r}"),
            Order::PowerOfTwo(t) => write!(f, "2^{t}"),
        }
    }
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

struct Base<R> {
    r: R,
    l: R,
    delta: R,
    r_delta: R,
    r_2delta: R,
}

fn base<R: Real>(r: Order, delta: &Delta, ctx: &R::Ctx) -> Result<Base<R>> {
    let (rv, l) = match r {
        Order::Int(r) if r < 2 => return Err(Error::Domain(format!("r = {r} is below 2"))),
        Order::Int(r) => {
            let rv = R::from_u64(r, ctx);
            let l = rv.log2(ctx);
            (rv, l)
        }
        Order::PowerOfTwo(0) => return Err(Error::Domain("r = 2^0 is below 2".into())),
        Order::PowerOfTwo(t) => {
            let l = R::from_u64(t, ctx);
            (l.exp2(ctx), l)
        }
    };
    let d = delta.to_real::<R>(ctx);
    let two = R::from_u64(2, ctx);
    let r_delta = (d.clone() * l.clone()).exp2(ctx);
    let r_2delta = (two * d.clone() * l.clone()).exp2(ctx);
    Ok(Base {
        r: rv,
        l,
        delta: d,
        r_delta,
        r_2delta,
    })
}

fn k<R: Real>(v: u64, ctx: &R::Ctx) -> R {
    R::from_u64(v, ctx)
}

impl<R: Real> Base<R> {
    fn l2(&self) -> R {
        self.l.clone() * self.l.clone()
    }

    fn r_over(&self, d: u64, ctx: &R::Ctx) -> R {
        self.r.clone() / k(d, ctx)
    }

    /// `(r^{2δ} + r^δ + 6)(log2 r)^2`.
    fn wide_square(&self, ctx: &R::Ctx) -> R {
        (self.r_2delta.clone() + self.r_delta.clone() + k(6, ctx)) * self.l2()
    }

    fn first(&self, ctx: &R::Ctx) -> R {
        -self.r_over(24, ctx) + self.wide_square(ctx) + k::<R>(5, ctx) * self.l.clone() + k(4, ctx)
    }

    fn second(&self, ctx: &R::Ctx) -> R {
        -(k::<R>(2, ctx) * self.r_delta.clone() / k(25, ctx)) + k::<R>(3, ctx) * self.l.clone() + k(1, ctx)
    }
}

/// `log2(Σ 2^{e_i})`, dropping terms more than `precision + 64` below the largest.
pub fn log2_sum<R: Real>(terms: &[R], ctx: &R::Ctx) -> Option<R> {
    let m = terms.iter().fold(None::<&R>, |acc, t| match acc {
        Some(a) if a >= t => Some(a),
        _ => Some(t),
    })?;
    let cut = -k::<R>(R::precision(ctx) as u64 + 64, ctx);
    let mut s = k::<R>(0, ctx);
    for t in terms {
        let d = t.clone() - m.clone();
        if d >= cut {
            s = s + d.exp2(ctx);
        }
    }
    Some(s.log2(ctx) + m.clone())
}

/// `Σ 2^{lhs_i} <= Σ 2^{rhs_j}`. Exponents present on both sides cancel exactly first.
pub fn sum_at_most<R: Real>(lhs: &[R], rhs: &[R], ctx: &R::Ctx) -> bool {
    let mut rhs: Vec<Option<&R>> = rhs.iter().map(Some).collect();
    let mut rest = Vec::new();
    for a in lhs {
        match rhs.iter_mut().find(|b| b.is_some_and(|b| b == a)) {
            Some(slot) => *slot = None,
            None => rest.push(a.clone()),
        }
    }
    let rhs: Vec<R> = rhs.into_iter().flatten().cloned().collect();
    match (log2_sum(&rest, ctx), log2_sum(&rhs, ctx)) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(a), Some(b)) => a <= b,
    }
}

/// `log2` of the two terms of `h_δ(r)`.
pub fn h_terms_log2<R: Real>(r: Order, delta: &Delta, ctx: &R::Ctx) -> Result<(R, R)> {
    let b = base::<R>(r, delta, ctx)?;
    Ok((b.first(ctx), b.second(ctx)))
}

pub fn h_delta_log2<R: Real>(r: Order, delta: &Delta, ctx: &R::Ctx) -> Result<R> {
    let (a, b) = h_terms_log2::<R>(r, delta, ctx)?;
    Ok(log2_sum(&[a, b], ctx).expect("two terms"))
}

/// `h_δ(r)`; underflows to zero once the exponent leaves the scalar's range.
pub fn h_delta<R: Real>(r: Order, delta: &Delta, ctx: &R::Ctx) -> Result<R> {
    Ok(h_delta_log2::<R>(r, delta, ctx)?.exp2(ctx))
}

fn k_from_h<R: Real>(h_log2: &R, l: &R, ctx: &R::Ctx) -> Option<R> {
    if *h_log2 >= R::zero() {
        return None;
    }
    let cut = -k::<R>(R::precision(ctx) as u64 + 64, ctx);
    let one_minus_h = if *h_log2 < cut {
        k::<R>(0, ctx)
    } else {
        (k::<R>(1, ctx) - h_log2.exp2(ctx)).log2(ctx)
    };
    Some(h_log2.clone() - one_minus_h + l.clone() * l.clone() + l.clone())
}

/// `log2 k_δ(r)`, `None` when `h_δ(r) >= 1`.
pub fn k_delta_log2<R: Real>(r: Order, delta: &Delta, ctx: &R::Ctx) -> Result<Option<R>> {
    let b = base::<R>(r, delta, ctx)?;
    let h = log2_sum(&[b.first(ctx), b.second(ctx)], ctx).expect("two terms");
    Ok(k_from_h(&h, &b.l, ctx))
}

pub fn k_delta<R: Real>(r: Order, delta: &Delta, ctx: &R::Ctx) -> Result<Option<R>> {
    Ok(k_delta_log2::<R>(r, delta, ctx)?.map(|e| e.exp2(ctx)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "R: Real"))]
pub struct NamedBound<R: Real> {
    pub name: &'static str,
    #[serde(serialize_with = "ser_real")]
    pub log2: R,
}

fn ser_real<R: Real, S: Serializer>(v: &R, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(v.to_f64())
}

fn ser_opt_real<R: Real, S: Serializer>(v: &Option<R>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_some(&v.to_f64()),
        None => s.serialize_none(),
    }
}

pub const BOUND_NAMES: [&str; 8] = [
    "trivial-disconnected",
    "trivial-bipartite",
    "trivial-twins",
    "outside-s1",
    "s3",
    "s4-first",
    "s4-second",
    "s5",
];

/// Every bound at one `(r, δ)`, as base-2 exponents.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "R: Real"))]
pub struct BoundProfile<R: Real> {
    pub r: Order,
    pub delta: Delta,
    pub precision: usize,
    #[serde(serialize_with = "ser_real")]
    pub h_first_log2: R,
    #[serde(serialize_with = "ser_real")]
    pub h_second_log2: R,
    #[serde(serialize_with = "ser_real")]
    pub h_log2: R,
    /// `None` when `h >= 1`.
    #[serde(serialize_with = "ser_opt_real")]
    pub k_log2: Option<R>,
    pub bounds: Vec<NamedBound<R>>,
    #[serde(serialize_with = "ser_real")]
    pub component_sum_log2: R,
    /// `outside-s1 + s3 + s4-first + s4-second + s5 <= h`.
    pub component_sum_within_h: bool,
}

impl<R: Real> BoundProfile<R> {
    pub fn bound(&self, name: &str) -> Option<&R> {
        self.bounds.iter().find(|b| b.name == name).map(|b| &b.log2)
    }

    pub fn h_vacuous(&self) -> bool {
        self.h_log2 >= R::zero()
    }

    pub fn k_defined(&self) -> bool {
        self.k_log2.is_some()
    }

    pub fn first_term_below_second(&self) -> bool {
        self.h_first_log2 < self.h_second_log2
    }

    /// Every lemma bound is at least 1.
    pub fn all_vacuous(&self) -> bool {
        self.bounds.iter().all(|b| b.log2 >= R::zero())
    }

    pub fn csv_header() -> Vec<String> {
        let mut h: Vec<String> = ["r", "delta", "h_first_log2", "h_second_log2", "first_below_second", "h_log2", "h_vacuous", "k_log2"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        for n in BOUND_NAMES {
            h.push(format!("{n}_log2"));
            h.push(format!("{n}_vacuous"));
        }
        h.push("component_sum_log2".into());
        h.push("component_sum_within_h".into());
        h
    }

    pub fn csv_row(&self) -> Vec<String> {
        let f = |v: &R| format!("{:.6}", v.to_f64());
        let mut row = vec![
            self.r.to_string(),
            self.delta.to_string(),
            f(&self.h_first_log2),
            f(&self.h_second_log2),
            self.first_term_below_second().to_string(),
            f(&self.h_log2),
            self.h_vacuous().to_string(),
            self.k_log2.as_ref().map_or("undefined".to_string(), f),
        ];
        for b in &self.bounds {
            row.push(f(&b.log2));
            row.push((b.log2 >= R::zero()).to_string());
        }
        row.push(f(&self.component_sum_log2));
        row.push(self.component_sum_within_h.to_string());
        row
    }
}

pub fn lemma_bound_table<R: Real>(r: Order, delta: &Delta, ctx: &R::Ctx) -> Result<BoundProfile<R>> {
    let b = base::<R>(r, delta, ctx)?;
    let l2 = b.l2();
    let first = b.first(ctx);
    let second = b.second(ctx);
    let trivial_ab = -b.r_over(4, ctx) + l2.clone();
    let values: [R; 8] = [
        trivial_ab.clone(),
        trivial_ab,
        -b.r_over(6, ctx) + b.l.clone() + k(1, ctx),
        -b.r_over(6, ctx) + l2.clone() + k(2, ctx),
        -b.r_over(24, ctx) + l2.clone() + b.l.clone() + k(2, ctx),
        -b.r_over(24, ctx) + b.wide_square(ctx) + (k::<R>(2, ctx) + b.delta.clone()) * b.l.clone(),
        second.clone(),
        -b.r_over(5, ctx) + k::<R>(2, ctx) * l2 + k::<R>(5, ctx) * b.l.clone(),
    ];
    let bounds: Vec<NamedBound<R>> = BOUND_NAMES
        .iter()
        .zip(values)
        .map(|(&name, log2)| NamedBound { name, log2 })
        .collect();
    let components: Vec<R> = bounds[3..].iter().map(|b| b.log2.clone()).collect();
    let h_terms = [first.clone(), second.clone()];
    let h_log2 = log2_sum(&h_terms, ctx).expect("two terms");
    Ok(BoundProfile {
        r,
        delta: delta.clone(),
        precision: R::precision(ctx),
        k_log2: k_from_h(&h_log2, &b.l, ctx),
        component_sum_log2: log2_sum(&components, ctx).expect("five terms"),
        component_sum_within_h: sum_at_most(&components, &h_terms, ctx),
        h_first_log2: first,
        h_second_log2: second,
        h_log2,
        bounds,
    })
}

/// `r = 2^10, ..., 2^30` against `δ ∈ {0.01, 0.05, 0.1, 0.2}`.
pub fn default_grid() -> Vec<(Order, Delta)> {
    let deltas = ["0.01", "0.05", "0.1", "0.2"];
    let mut out = Vec::new();
    for t in 10..=30 {
        for d in deltas {
            out.push((Order::Int(1 << t), d.parse().expect("grid delta")));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::HpReal;

    const P: usize = 256;

    fn d(s: &str) -> Delta {
        s.parse().unwrap()
    }

    #[test]
    fn parses_delta() {
        assert_eq!(d("0.05").ratio(), Ratio::new(1, 20));
        assert_eq!(d("1/10").ratio(), Ratio::new(1, 10));
        assert_eq!(d(".25").ratio(), Ratio::new(1, 4));
        assert!(matches!("0.7".parse::<Delta>(), Err(Error::Domain(_))));
        assert!(matches!("0.5".parse::<Delta>(), Err(Error::Domain(_))));
        assert!(matches!("0".parse::<Delta>(), Err(Error::Domain(_))));
        assert!(matches!("abc".parse::<Delta>(), Err(Error::Parse(_))));
        assert!(matches!("-0.1".parse::<Delta>(), Err(Error::Parse(_))));
    }

    #[test]
    fn small_r_is_vacuous() {
        let h = h_delta::<HpReal>(Order::Int(100), &d("0.1"), &P).unwrap();
        assert!(h > HpReal::from_u64(1, &P));
        assert!(k_delta::<HpReal>(Order::Int(100), &d("0.1"), &P).unwrap().is_none());
        let t = lemma_bound_table::<HpReal>(Order::Int(2), &d("0.3"), &P).unwrap();
        assert!(t.bounds.iter().all(|b| b.log2.is_finite()));
        assert!(t.h_log2.is_finite());
        assert!(matches!(h_delta::<f64>(Order::Int(1), &d("0.1"), &()), Err(Error::Domain(_))));
    }

    #[test]
    fn r64_profile() {
        let t = lemma_bound_table::<HpReal>(Order::Int(64), &d("0.1"), &P).unwrap();
        assert!(t.h_vacuous());
        // the twins bound is below 1 here
        let twins = t.bound("trivial-twins").unwrap().to_f64();
        assert!((twins - (-64.0 / 6.0 + 7.0)).abs() < 1e-9);
        assert!(!t.all_vacuous());
    }

    #[test]
    fn terms_match_f64() {
        for (r, dl) in [(Order::Int(1 << 12), "0.05"), (Order::Int(50_000), "0.001")] {
            let (a, b) = h_terms_log2::<HpReal>(r, &d(dl), &P).unwrap();
            let (fa, fb) = h_terms_log2::<f64>(r, &d(dl), &()).unwrap();
            assert!((a.to_f64() - fa).abs() < 1e-6 * fa.abs().max(1.0));
            assert!((b.to_f64() - fb).abs() < 1e-6 * fb.abs().max(1.0));
        }
    }

    #[test]
    fn power_of_two_orders() {
        let a = lemma_bound_table::<HpReal>(Order::Int(1 << 20), &d("0.05"), &P).unwrap();
        let b = lemma_bound_table::<HpReal>(Order::PowerOfTwo(20), &d("0.05"), &P).unwrap();
        assert_eq!(a.h_log2, b.h_log2);
        assert!(a.component_sum_within_h);
        let far = lemma_bound_table::<HpReal>(Order::PowerOfTwo(200), &d("0.1"), &P).unwrap();
        assert!(far.k_defined() && !far.h_vacuous());
    }

    #[test]
    fn cancellation() {
        let one = 1.0f64;
        assert!(sum_at_most(&[one, -1e9], &[one, -1e8], &()));
        assert!(!sum_at_most(&[one, -1e8], &[one, -1e9], &()));
        assert!(sum_at_most::<f64>(&[], &[], &()));
        assert!(!sum_at_most(&[0.0], &[], &()));
        assert!((log2_sum(&[3.0f64, 3.0], &()).unwrap() - 4.0).abs() < 1e-12);
    }
}
