//! Exact arithmetic in Q(c), c = 2cos(π/N).
//!
//! Elements are dense coefficient vectors in the power basis 1, c, …, c^{D-1}
//! reduced modulo the minimal polynomial ψ_N of c (D = deg ψ_N). Signs are
//! decided exactly: zero symbolically, nonzero values on a certified dyadic
//! enclosure of c whose precision doubles until the result excludes zero.

use crate::error::{QmutError, Result};
use crate::rational::{scaled_ceil, scaled_floor, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Mutex, OnceLock, RwLock};

pub type Coeffs = SmallVec<[Rational; 4]>;

const START_BITS: u32 = 64;
const MAX_BITS: u32 = 1 << 14;

/// Reduced fraction m/d standing for the value 2cos(πm/d), with 0 ≤ m/d ≤ 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawLabel", into = "RawLabel")]
pub struct AngleLabel {
    num: u32,
    den: u32,
}

#[derive(Serialize, Deserialize)]
struct RawLabel {
    num: i64,
    den: i64,
}

impl TryFrom<RawLabel> for AngleLabel {
    type Error = QmutError;
    fn try_from(r: RawLabel) -> Result<Self> {
        AngleLabel::new(r.num, r.den)
    }
}

impl From<AngleLabel> for RawLabel {
    fn from(l: AngleLabel) -> Self {
        RawLabel { num: l.num as i64, den: l.den as i64 }
    }
}

impl AngleLabel {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den <= 0 || num < 0 || num > den || den > u32::MAX as i64 {
            return Err(QmutError::InvalidLabel { num, den });
        }
        let g = num.gcd(&den);
        Ok(AngleLabel { num: (num / g) as u32, den: (den / g) as u32 })
    }

    pub fn num(self) -> u32 {
        self.num
    }

    pub fn den(self) -> u32 {
        self.den
    }

    /// Exact value when it is rational (denominators 1, 2, 3).
    pub fn rational_value(self) -> Option<i64> {
        match (self.num, self.den) {
            (0, 1) => Some(2),
            (1, 3) => Some(1),
            (1, 2) => Some(0),
            (2, 3) => Some(-1),
            (1, 1) => Some(-2),
            _ => None,
        }
    }

    /// Floating approximation, for display and test oracles only.
    pub fn approx(self) -> f64 {
        2.0 * (PI * self.num as f64 / self.den as f64).cos()
    }

    /// Whether the value is at least zero, i.e. usable as an arrow weight.
    pub fn is_weight(self) -> bool {
        2 * self.num <= self.den
    }
}

impl fmt::Display for AngleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for AngleLabel {
    type Err = QmutError;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || QmutError::Parse(format!("invalid angle label {s:?}"));
        let (n, d) = s.trim().split_once('/').ok_or_else(bad)?;
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        AngleLabel::new(n, d)
    }
}

fn poly_mul_xd_minus_1(p: &[BigInt], d: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); p.len() + d];
    for (i, a) in p.iter().enumerate() {
        out[i + d] += a;
        out[i] -= a;
    }
    out
}

fn poly_div_xd_minus_1(p: &[BigInt], d: usize) -> Vec<BigInt> {
    // p = q (x^d - 1)  =>  q_i = q_{i-d} - p_i
    let len = p.len() - d;
    let mut q: Vec<BigInt> = Vec::with_capacity(len);
    for i in 0..len {
        let prev = if i >= d { q[i - d].clone() } else { BigInt::zero() };
        q.push(prev - &p[i]);
    }
    debug_assert!((len..p.len()).all(|i| {
        let lhs = if i >= d { q.get(i - d).cloned().unwrap_or_default() } else { BigInt::zero() };
        lhs == p[i]
    }));
    q
}

fn mobius(mut n: u64) -> i32 {
    let mut mu = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// Cyclotomic polynomial Φ_m, low degree first.
pub fn cyclotomic(m: u64) -> Vec<BigInt> {
    assert!(m >= 1);
    let divisors: Vec<u64> = (1..=m).filter(|d| m % d == 0).collect();
    let mut p = vec![BigInt::one()];
    for &d in &divisors {
        if mobius(m / d) == 1 {
            p = poly_mul_xd_minus_1(&p, d as usize);
        }
    }
    for &d in &divisors {
        if mobius(m / d) == -1 {
            p = poly_div_xd_minus_1(&p, d as usize);
        }
    }
    // Φ_m = Π (x^d - 1)^{μ(m/d)}; keep the result monic
    if p.last().is_some_and(|l| l.is_negative()) {
        for a in p.iter_mut() {
            *a = -a.clone();
        }
    }
    while p.last().is_some_and(|l| l.is_zero()) {
        p.pop();
    }
    p
}

/// Dickson polynomials D_0 = 2, D_1 = x, D_{j+1} = x D_j - D_{j-1}, up to D_k.
fn dickson_polys(k: usize) -> Vec<Vec<BigInt>> {
    let mut out: Vec<Vec<BigInt>> = vec![vec![BigInt::from(2)], vec![BigInt::zero(), BigInt::one()]];
    while out.len() <= k {
        let j = out.len();
        let mut next = vec![BigInt::zero(); j + 1];
        for (i, a) in out[j - 1].iter().enumerate() {
            next[i + 1] += a;
        }
        for (i, a) in out[j - 2].iter().enumerate() {
            next[i] -= a;
        }
        out.push(next);
    }
    out.truncate(k + 1);
    out
}

/// Monic minimal polynomial of 2cos(π/N) over Q, low degree first.
pub fn minimal_poly(n: u32) -> Vec<BigInt> {
    assert!(n >= 1, "ambient order must be positive");
    if n == 1 {
        return vec![BigInt::from(2), BigInt::one()];
    }
    let phi = cyclotomic(2 * n as u64);
    let deg = (phi.len() - 1) / 2;
    let dk = dickson_polys(deg);
    let mut psi = vec![BigInt::zero(); deg + 1];
    psi[0] += &phi[deg];
    for j in 1..=deg {
        let a = &phi[deg + j];
        if a.is_zero() {
            continue;
        }
        for (i, t) in dk[j].iter().enumerate() {
            psi[i] += a * t;
        }
    }
    psi
}

fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

struct Enclosure {
    bits: u32,
    lo: BigInt,
    hi: BigInt,
}

struct LabelTable {
    /// D_k(c) for k = 0..=N.
    values: Vec<Coeffs>,
    index: HashMap<Coeffs, u32>,
}

/// Per-ambient data: ψ_N, reduction table, label table and enclosures of c.
pub struct CycloField {
    ambient: u32,
    degree: usize,
    psi: Vec<BigInt>,
    /// x^{D+j} mod ψ for j = 0..D-1.
    reduce: Vec<Vec<Rational>>,
    labels: OnceLock<LabelTable>,
    enclosures: Mutex<Vec<Enclosure>>,
}

impl fmt::Debug for CycloField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CycloField").field("ambient", &self.ambient).field("degree", &self.degree).finish()
    }
}

static FIELDS: OnceLock<RwLock<HashMap<u32, &'static CycloField>>> = OnceLock::new();

impl CycloField {
    /// The cached field for ambient order `n`, built on first use.
    pub fn get(n: u32) -> &'static CycloField {
        assert!(n >= 1, "ambient order must be positive");
        let map = FIELDS.get_or_init(|| RwLock::new(HashMap::new()));
        if let Some(f) = map.read().unwrap().get(&n) {
            return f;
        }
        let mut w = map.write().unwrap();
        w.entry(n).or_insert_with(|| Box::leak(Box::new(CycloField::build(n))))
    }

    fn build(n: u32) -> CycloField {
        let psi = minimal_poly(n);
        let degree = psi.len() - 1;
        if n >= 2 {
            debug_assert_eq!(degree as u64, euler_phi(2 * n as u64) / 2);
        }
        let c = 2.0 * (PI / n as f64).cos();
        let val: f64 = psi.iter().rev().fold(0.0, |acc, a| acc * c + num_traits::ToPrimitive::to_f64(a).unwrap());
        let scale: f64 = psi.iter().map(|a| num_traits::ToPrimitive::to_f64(a).unwrap().abs()).sum::<f64>() * 4f64.powi(degree as i32);
        assert!(val.abs() <= 1e-9 * scale.max(1.0), "ψ_{n} does not vanish at 2cos(π/{n})");

        let mut reduce: Vec<Vec<Rational>> = Vec::with_capacity(degree);
        let mut cur: Vec<Rational> = psi[..degree].iter().map(|a| -Rational::from_bigint(a.clone())).collect();
        for _ in 0..degree {
            reduce.push(cur.clone());
            // multiply by x and reduce
            let top = cur[degree - 1].clone();
            let mut next = vec![Rational::zero(); degree];
            for i in (1..degree).rev() {
                next[i] = cur[i - 1].clone();
            }
            if !top.is_zero() {
                for i in 0..degree {
                    next[i] = &next[i] + &(&top * &reduce[0][i]);
                }
            }
            cur = next;
        }
        CycloField { ambient: n, degree, psi, reduce, labels: OnceLock::new(), enclosures: Mutex::new(Vec::new()) }
    }

    pub fn ambient(&self) -> u32 {
        self.ambient
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn min_poly(&self) -> &[BigInt] {
        &self.psi
    }

    fn label_table(&'static self) -> &'static LabelTable {
        self.labels.get_or_init(|| {
            let n = self.ambient as usize;
            let mut values: Vec<Coeffs> = Vec::with_capacity(n + 1);
            values.push(self.constant(&Rational::from_int(2)));
            if n >= 1 {
                values.push(self.generator());
            }
            while values.len() <= n {
                let j = values.len();
                let prod = self.mul_by_c(&values[j - 1]);
                let next: Coeffs = prod.iter().zip(values[j - 2].iter()).map(|(a, b)| a - b).collect();
                values.push(next);
            }
            let index = values.iter().enumerate().map(|(k, v)| (v.clone(), k as u32)).collect();
            LabelTable { values, index }
        })
    }

    fn constant(&self, r: &Rational) -> Coeffs {
        let mut v: Coeffs = SmallVec::from_elem(Rational::zero(), self.degree);
        v[0] = r.clone();
        v
    }

    fn generator(&self) -> Coeffs {
        if self.degree == 1 {
            // c is rational: -ψ_0
            return self.constant(&-Rational::from_bigint(self.psi[0].clone()));
        }
        let mut v: Coeffs = SmallVec::from_elem(Rational::zero(), self.degree);
        v[1] = Rational::one();
        v
    }

    fn mul_by_c(&self, a: &Coeffs) -> Coeffs {
        let d = self.degree;
        if d == 1 {
            let c = -Rational::from_bigint(self.psi[0].clone());
            return SmallVec::from_elem(&a[0] * &c, 1);
        }
        let mut out: Coeffs = SmallVec::from_elem(Rational::zero(), d);
        for i in 1..d {
            out[i] = a[i - 1].clone();
        }
        let top = &a[d - 1];
        if !top.is_zero() {
            for i in 0..d {
                out[i] = &out[i] + &(top * &self.reduce[0][i]);
            }
        }
        out
    }

    fn mul(&self, a: &Coeffs, b: &Coeffs) -> Coeffs {
        let d = self.degree;
        let mut prod: SmallVec<[Rational; 8]> = SmallVec::from_elem(Rational::zero(), 2 * d - 1);
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] = &prod[i + j] + &(x * y);
                }
            }
        }
        let mut out: Coeffs = prod[..d].iter().cloned().collect();
        for t in d..(2 * d - 1) {
            let p = &prod[t];
            if p.is_zero() {
                continue;
            }
            for (o, r) in out.iter_mut().zip(self.reduce[t - d].iter()) {
                if !r.is_zero() {
                    *o = &*o + &(p * r);
                }
            }
        }
        out
    }

    fn psi_sign_at(&self, x: &BigInt, bits: u32) -> i32 {
        // sign of Σ ψ_i x^i 2^{bits (D - i)}, by Horner over the integers
        let mut p = BigInt::zero();
        for (k, a) in self.psi.iter().rev().enumerate() {
            p = p * x + (a << (bits as usize * k));
        }
        sign_of(&p)
    }

    fn enclosure(&self, bits: u32) -> (BigInt, BigInt) {
        let mut encl = self.enclosures.lock().unwrap();
        if let Some(e) = encl.iter().find(|e| e.bits == bits) {
            return (e.lo.clone(), e.hi.clone());
        }
        if let Some(e) = encl.iter().find(|e| e.bits > bits) {
            let shift = (e.bits - bits) as usize;
            return (e.lo.clone() >> shift, -((-e.hi.clone()) >> shift));
        }
        let (mut lo, mut hi) = match encl.last() {
            Some(e) => {
                let shift = (bits - e.bits) as usize;
                (e.lo.clone() << shift, e.hi.clone() << shift)
            }
            None => self.initial_bracket(bits),
        };
        debug_assert!(self.psi_sign_at(&lo, bits) < 0 && self.psi_sign_at(&hi, bits) > 0);
        let one = BigInt::one();
        while &hi - &lo > one {
            let mid: BigInt = (&lo + &hi) >> 1usize;
            if self.psi_sign_at(&mid, bits) > 0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        encl.push(Enclosure { bits, lo: lo.clone(), hi: hi.clone() });
        (lo, hi)
    }

    /// Integers lo < hi with ψ(lo/2^b) < 0 < ψ(hi/2^b) and c the only root between.
    fn initial_bracket(&self, bits: u32) -> (BigInt, BigInt) {
        let n = self.ambient as u64;
        let c = 2.0 * (PI / n as f64).cos();
        // next root below c is 2cos(jπ/N) with j > 1 the least integer coprime to 2N
        let j = (2..).find(|j: &u64| j.gcd(&(2 * n)) == 1).unwrap();
        let r2 = 2.0 * (PI * j as f64 / n as f64).cos();
        let mid = (c + r2) / 2.0;
        let lo = BigInt::from((mid * 1e15).floor() as i64) * (BigInt::one() << bits as usize) / BigInt::from(1_000_000_000_000_000i64);
        let hi = BigInt::from(3) << bits as usize;
        assert!(self.psi_sign_at(&lo, bits) < 0, "failed to isolate 2cos(π/{n})");
        assert!(self.psi_sign_at(&hi, bits) > 0);
        (lo, hi)
    }

    /// Exact sign of Σ a_i c^i.
    fn sign_of_coeffs(&self, a: &[Rational]) -> i32 {
        if a.iter().all(|x| x.is_zero()) {
            return 0;
        }
        if a[1..].iter().all(|x| x.is_zero()) {
            return a[0].signum();
        }
        let mut bits = START_BITS;
        loop {
            let (clo, chi) = self.enclosure(bits);
            let (lo, hi) = eval_interval(a, &clo, &chi, bits);
            if lo.is_positive() {
                return 1;
            }
            if hi.is_negative() {
                return -1;
            }
            bits *= 2;
            assert!(bits <= MAX_BITS, "sign determination exceeded {MAX_BITS} bits");
        }
    }
}

fn sign_of(x: &BigInt) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

fn floor_shift(x: BigInt, bits: u32) -> BigInt {
    x >> bits as usize
}

fn ceil_shift(x: BigInt, bits: u32) -> BigInt {
    -((-x) >> bits as usize)
}

/// Interval Horner evaluation at scale 2^bits, rounding outward.
fn eval_interval(a: &[Rational], clo: &BigInt, chi: &BigInt, bits: u32) -> (BigInt, BigInt) {
    let d = a.len();
    let mut lo = scaled_floor(&a[d - 1], bits);
    let mut hi = scaled_ceil(&a[d - 1], bits);
    for coef in a[..d - 1].iter().rev() {
        let p = [&lo * clo, &lo * chi, &hi * clo, &hi * chi];
        let mn = p.iter().min().unwrap().clone();
        let mx = p.iter().max().unwrap().clone();
        lo = floor_shift(mn, bits) + scaled_floor(coef, bits);
        hi = ceil_shift(mx, bits) + scaled_ceil(coef, bits);
    }
    (lo, hi)
}

/// An exact element of Q(2cos(π/N)).
#[derive(Clone)]
pub struct CycloReal {
    field: &'static CycloField,
    coeffs: Coeffs,
}

fn lcm(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

impl CycloReal {
    pub fn zero(ambient: u32) -> Self {
        let field = CycloField::get(ambient);
        CycloReal { field, coeffs: SmallVec::from_elem(Rational::zero(), field.degree) }
    }

    pub fn from_rational(r: Rational, ambient: u32) -> Self {
        let field = CycloField::get(ambient);
        CycloReal { field, coeffs: field.constant(&r) }
    }

    pub fn from_int(n: i64, ambient: u32) -> Self {
        Self::from_rational(Rational::from_int(n), ambient)
    }

    /// The generator c = 2cos(π/N).
    pub fn generator(ambient: u32) -> Self {
        let field = CycloField::get(ambient);
        CycloReal { field, coeffs: field.generator() }
    }

    /// Builds Σ coeffs[i] c^i, reducing if more than D coefficients are given.
    pub fn from_coeffs(coeffs: &[Rational], ambient: u32) -> Self {
        let field = CycloField::get(ambient);
        let mut acc = CycloReal::zero(ambient);
        let c = CycloReal::generator(ambient);
        for a in coeffs.iter().rev() {
            acc = &(&acc * &c) + &CycloReal::from_rational(a.clone(), ambient);
        }
        debug_assert_eq!(acc.coeffs.len(), field.degree);
        acc
    }

    /// 2cos(π·num/den) in ambient `n`. Rational values need no divisibility.
    pub fn from_label(lbl: AngleLabel, n: u32) -> Result<Self> {
        if let Some(v) = lbl.rational_value() {
            return Ok(Self::from_int(v, n));
        }
        if n % lbl.den != 0 {
            return Err(QmutError::IncompatibleAmbient { ambient: n, required: lbl.den });
        }
        let field = CycloField::get(n);
        let k = (lbl.num as u64 * n as u64 / lbl.den as u64) as usize;
        Ok(CycloReal { field, coeffs: field.label_table().values[k].clone() })
    }

    pub fn ambient(&self) -> u32 {
        self.field.ambient
    }

    pub fn field(&self) -> &'static CycloField {
        self.field
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|x| x.is_zero())
    }

    /// The value as a rational number, when it is one.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coeffs[1..].iter().all(|x| x.is_zero()) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    pub fn sign(&self) -> i32 {
        self.field.sign_of_coeffs(&self.coeffs)
    }

    pub fn abs(&self) -> CycloReal {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn cmp_value(&self, other: &CycloReal) -> Ordering {
        (self - other).sign().cmp(&0)
    }

    /// Floating approximation, for display and cross-checks only.
    pub fn approx(&self) -> f64 {
        if let Some(r) = self.as_rational() {
            return r.to_f64();
        }
        // the power basis cancels badly in f64 at large degree; use the enclosure
        let bits = 256;
        let (clo, chi) = self.field.enclosure(bits);
        let (lo, hi) = eval_interval(&self.coeffs, &clo, &chi, bits);
        let mid = Rational::from_big(num_rational::BigRational::new(lo + hi, BigInt::one() << (bits as usize + 1)));
        mid.to_f64()
    }

    /// The label k/N with x = 2cos(πk/N), if there is one.
    pub fn to_label(&self) -> Option<AngleLabel> {
        if let Some(r) = self.as_rational() {
            let (n, d) = r.as_small()?;
            if d != 1 {
                return None;
            }
            return match n {
                2 => AngleLabel::new(0, 1).ok(),
                1 => AngleLabel::new(1, 3).ok(),
                0 => AngleLabel::new(1, 2).ok(),
                -1 => AngleLabel::new(2, 3).ok(),
                -2 => AngleLabel::new(1, 1).ok(),
                _ => None,
            };
        }
        let table = self.field.label_table();
        let k = *table.index.get(&self.coeffs)?;
        AngleLabel::new(k as i64, self.field.ambient as i64).ok()
    }

    /// Re-expresses the value over ambient `n`, which must be a multiple.
    pub fn lift(&self, n: u32) -> Result<CycloReal> {
        let from = self.field.ambient;
        if n % from != 0 {
            return Err(QmutError::IncompatibleAmbient { ambient: n, required: from });
        }
        if n == from {
            return Ok(self.clone());
        }
        if let Some(r) = self.as_rational() {
            return Ok(CycloReal::from_rational(r.clone(), n));
        }
        let target = CycloField::get(n);
        let t = (n / from) as usize;
        // c_from = 2cos(π/from) = 2cos(tπ/n) = D_t(c_n)
        let image = CycloReal { field: target, coeffs: target.label_table().values[t].clone() };
        let mut acc = CycloReal::zero(n);
        for a in self.coeffs.iter().rev() {
            acc = &(&acc * &image) + &CycloReal::from_rational(a.clone(), n);
        }
        Ok(acc)
    }

    fn lifted_pair(a: &CycloReal, b: &CycloReal) -> (CycloReal, CycloReal) {
        let n = lcm(a.ambient(), b.ambient());
        (a.lift(n).expect("lcm lift"), b.lift(n).expect("lcm lift"))
    }

    /// Multiplicative inverse, by the extended Euclidean algorithm against ψ.
    pub fn inverse(&self) -> Option<CycloReal> {
        if self.is_zero() {
            return None;
        }
        if let Some(r) = self.as_rational() {
            return Some(CycloReal::from_rational(r.recip(), self.ambient()));
        }
        let psi: Vec<Rational> = self.field.psi.iter().map(|a| Rational::from_bigint(a.clone())).collect();
        let a: Vec<Rational> = self.coeffs.to_vec();
        // invariant: r_i ≡ s_i · a (mod ψ)
        let (mut r0, mut r1) = (trim(psi), trim(a));
        let (mut s0, mut s1) = (vec![], vec![Rational::one()]);
        while !(r1.len() == 1) {
            let (q, r) = poly_divmod(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            assert!(!r1.is_empty(), "ψ is not irreducible");
        }
        let inv_lead = r1[0].recip();
        let s: Vec<Rational> = s1.iter().map(|x| x * &inv_lead).collect();
        let out = CycloReal::from_coeffs(&s, self.ambient());
        debug_assert!((&out * self).as_rational() == Some(&Rational::one()));
        Some(out)
    }

    /// Appends an encoding injective on values of one ambient.
    pub fn write_key(&self, out: &mut Vec<u8>) {
        for a in self.coeffs.iter() {
            a.write_bytes(out);
        }
    }

    /// Total order on coefficient vectors (not on values), used for interning.
    pub fn cmp_coeffs(&self, other: &CycloReal) -> Ordering {
        self.ambient().cmp(&other.ambient()).then_with(|| self.coeffs.iter().cmp(other.coeffs.iter()))
    }
}

fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(|x| x.is_zero()) {
        p.pop();
    }
    p
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_default();
            let y = b.get(i).cloned().unwrap_or_default();
            x - y
        })
        .collect();
    trim(out)
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    trim(out)
}

fn poly_divmod(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut q = vec![Rational::zero(); r.len() - db];
    let lead = b[db].recip();
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let f = &r[r.len() - 1] * &lead;
        for (i, y) in b.iter().enumerate() {
            r[shift + i] = &r[shift + i] - &(&f * y);
        }
        q[shift] = f;
        r.pop();
        r = trim(r);
    }
    (trim(q), r)
}

impl PartialEq for CycloReal {
    fn eq(&self, other: &CycloReal) -> bool {
        if self.ambient() == other.ambient() {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = CycloReal::lifted_pair(self, other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycloReal {}

impl PartialOrd for CycloReal {
    fn partial_cmp(&self, other: &CycloReal) -> Option<Ordering> {
        Some(self.cmp_value(other))
    }
}

impl<'a> Add<&'a CycloReal> for &'a CycloReal {
    type Output = CycloReal;
    fn add(self, rhs: &CycloReal) -> CycloReal {
        if self.ambient() != rhs.ambient() {
            let (a, b) = CycloReal::lifted_pair(self, rhs);
            return &a + &b;
        }
        let coeffs = self.coeffs.iter().zip(rhs.coeffs.iter()).map(|(a, b)| a + b).collect();
        CycloReal { field: self.field, coeffs }
    }
}

impl<'a> Sub<&'a CycloReal> for &'a CycloReal {
    type Output = CycloReal;
    fn sub(self, rhs: &CycloReal) -> CycloReal {
        if self.ambient() != rhs.ambient() {
            let (a, b) = CycloReal::lifted_pair(self, rhs);
            return &a - &b;
        }
        let coeffs = self.coeffs.iter().zip(rhs.coeffs.iter()).map(|(a, b)| a - b).collect();
        CycloReal { field: self.field, coeffs }
    }
}

impl<'a> Mul<&'a CycloReal> for &'a CycloReal {
    type Output = CycloReal;
    fn mul(self, rhs: &CycloReal) -> CycloReal {
        if self.ambient() != rhs.ambient() {
            let (a, b) = CycloReal::lifted_pair(self, rhs);
            return &a * &b;
        }
        if let Some(r) = self.as_rational() {
            let coeffs = rhs.coeffs.iter().map(|b| r * b).collect();
            return CycloReal { field: self.field, coeffs };
        }
        if let Some(r) = rhs.as_rational() {
            let coeffs = self.coeffs.iter().map(|a| a * r).collect();
            return CycloReal { field: self.field, coeffs };
        }
        CycloReal { field: self.field, coeffs: self.field.mul(&self.coeffs, &rhs.coeffs) }
    }
}

impl Neg for &CycloReal {
    type Output = CycloReal;
    fn neg(self) -> CycloReal {
        CycloReal { field: self.field, coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<CycloReal> for CycloReal {
            type Output = CycloReal;
            fn $m(self, rhs: CycloReal) -> CycloReal {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a CycloReal> for CycloReal {
            type Output = CycloReal;
            fn $m(self, rhs: &CycloReal) -> CycloReal {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CycloReal {
    type Output = CycloReal;
    fn neg(self) -> CycloReal {
        -&self
    }
}

impl fmt::Debug for CycloReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for CycloReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = self.to_label() {
            return write!(f, "[{l}]");
        }
        let neg = -self;
        if let Some(l) = neg.to_label() {
            return write!(f, "-[{l}]");
        }
        let mut terms = Vec::new();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            terms.push(match i {
                0 => format!("{a}"),
                1 => format!("{a}*c"),
                _ => format!("{a}*c^{i}"),
            });
        }
        if terms.is_empty() {
            terms.push("0".into());
        }
        write!(f, "{} (c=2cos(pi/{}))", terms.join(" + "), self.ambient())
    }
}
