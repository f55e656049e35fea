//! The oscillator Lie algebra `L_N` (generators `E_i`, `F_i`, `H_i`, `C`)
//! represented by differential operators in `t_1..t_N`.
//!
//! Operators live in the Weyl algebra and are kept normal ordered: every
//! monomial is `t^a d^b` with all multiplications left of all derivatives.
//! Coefficients are exact, either rationals or polynomials in formal
//! symbols `gamma_1..gamma_N`.

mod pairing;
mod poly;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{GkzError, Result};

pub use pairing::{
    dual_pairing_defect, matrix_element, phi_l_pairing, phi_l_relation_residual,
    GaussianMonomialSum, TestFunction,
};
pub use poly::Poly;

/// Exact coefficient ring.
pub trait Coefficient:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    fn from_integer(v: BigInt) -> Self;

    fn from_i64(v: i64) -> Self {
        Self::from_integer(BigInt::from(v))
    }
}

impl Coefficient for BigRational {
    fn from_integer(v: BigInt) -> Self {
        BigRational::from_integer(v)
    }
}

/// Normal-ordered element of the Weyl algebra in `n` variables.
///
/// A key holds the `t` exponents followed by the `d` exponents.
#[derive(Clone, PartialEq)]
pub struct WeylElement<C> {
    n: usize,
    terms: BTreeMap<Vec<u32>, C>,
}

impl<C: Coefficient> fmt::Debug for WeylElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c:?})")?;
            for (i, e) in k[..self.n].iter().enumerate() {
                if *e > 0 {
                    write!(f, " t{}^{e}", i + 1)?;
                }
            }
            for (i, e) in k[self.n..].iter().enumerate() {
                if *e > 0 {
                    write!(f, " d{}^{e}", i + 1)?;
                }
            }
        }
        Ok(())
    }
}

fn falling(c: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, j| acc * BigInt::from(c - j))
}

fn binomial(b: u32, k: u32) -> BigInt {
    falling(b, k) / falling(k, k)
}

impl<C: Coefficient> WeylElement<C> {
    pub fn zero(n: usize) -> Self {
        WeylElement {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(n: usize, c: C) -> Self {
        let mut e = Self::zero(n);
        e.add_term(vec![0; 2 * n], c);
        e
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, C::one())
    }

    /// Single monomial `c t^a d^b`.
    pub fn monomial(c: C, t_exp: &[u32], d_exp: &[u32]) -> Result<Self> {
        if t_exp.len() != d_exp.len() {
            return Err(GkzError::Shape(
                "t and d exponent vectors differ in length".into(),
            ));
        }
        let n = t_exp.len();
        let mut e = Self::zero(n);
        e.add_term(t_exp.iter().chain(d_exp).copied().collect(), c);
        Ok(e)
    }

    /// Multiplication by `t_i` (0-based).
    pub fn t(n: usize, i: usize) -> Self {
        let mut k = vec![0; 2 * n];
        k[i] = 1;
        let mut e = Self::zero(n);
        e.add_term(k, C::one());
        e
    }

    /// Derivative `d/dt_i` (0-based).
    pub fn d(n: usize, i: usize) -> Self {
        let mut k = vec![0; 2 * n];
        k[n + i] = 1;
        let mut e = Self::zero(n);
        e.add_term(k, C::one());
        e
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms as `(t exponents, d exponents, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &[u32], &C)> {
        self.terms
            .iter()
            .map(move |(k, c)| (&k[..self.n], &k[self.n..], c))
    }

    pub fn coefficient(&self, t_exp: &[u32], d_exp: &[u32]) -> C {
        let k: Vec<u32> = t_exp.iter().chain(d_exp).copied().collect();
        self.terms.get(&k).cloned().unwrap_or_else(C::zero)
    }

    fn add_term(&mut self, k: Vec<u32>, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(k) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = std::mem::replace(o.get_mut(), C::zero()) + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(GkzError::Shape(format!(
                "Weyl elements in {} and {} variables",
                self.n, other.n
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        WeylElement {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, s: &C) -> Self {
        let mut out = Self::zero(self.n);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c.clone() * s);
        }
        out
    }

    /// Normal-ordered product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let n = self.n;
        let mut out = Self::zero(n);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let coef = ca.clone() * cb;
                // t^a d^b t^c d^d: move each d_i^b past t_i^c.
                let mut partial: Vec<(BigInt, Vec<u32>)> = vec![(BigInt::one(), vec![0; 2 * n])];
                for i in 0..n {
                    let (a, b, c, d) = (ka[i], ka[n + i], kb[i], kb[n + i]);
                    let mut next = Vec::with_capacity(partial.len() * (b.min(c) as usize + 1));
                    for (w, key) in &partial {
                        for k in 0..=b.min(c) {
                            let mut key = key.clone();
                            key[i] = a + c - k;
                            key[n + i] = b + d - k;
                            next.push((w * binomial(b, k) * falling(c, k), key));
                        }
                    }
                    partial = next;
                }
                for (w, key) in partial {
                    out.add_term(key, coef.clone() * &C::from_integer(w));
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one(self.n);
        for _ in 0..e {
            out = out.mul(self).expect("same dimension");
        }
        out
    }

    /// `[self, other] = self other - other self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }
}

/// See [`WeylElement::mul`].
pub fn weyl_product<C: Coefficient>(
    x: &WeylElement<C>,
    y: &WeylElement<C>,
) -> Result<WeylElement<C>> {
    x.mul(y)
}

/// Generator of `L_N`; indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    E(usize),
    F(usize),
    H(usize),
    C,
}

impl Generator {
    fn index(self) -> Option<usize> {
        match self {
            Generator::E(i) | Generator::F(i) | Generator::H(i) => Some(i),
            Generator::C => None,
        }
    }

    fn check(self, n: usize) -> Result<()> {
        match self.index() {
            Some(i) if i >= n => Err(GkzError::IndexOutOfRange { index: i, bound: n }),
            _ => Ok(()),
        }
    }
}

/// `pi(C) = 1`, `pi(E_i) = -d_i`, `pi(F_i) = -t_i`, `pi(H_i) = gamma_i + t_i d_i`.
pub fn represent<C: Coefficient>(g: Generator, gamma: &[C]) -> Result<WeylElement<C>> {
    let n = gamma.len();
    g.check(n)?;
    Ok(match g {
        Generator::C => WeylElement::one(n),
        Generator::E(i) => WeylElement::d(n, i).neg(),
        Generator::F(i) => WeylElement::t(n, i).neg(),
        Generator::H(i) => euler(n, i).add(&WeylElement::scalar(n, gamma[i].clone()))?,
    })
}

/// `pi'(C) = -1`, `pi'(E_i) = -d_i`, `pi'(F_i) = t_i`, `pi'(H_i) = 1 - gamma_i + t_i d_i`.
pub fn represent_dual<C: Coefficient>(g: Generator, gamma: &[C]) -> Result<WeylElement<C>> {
    let n = gamma.len();
    g.check(n)?;
    Ok(match g {
        Generator::C => WeylElement::one(n).neg(),
        Generator::E(i) => WeylElement::d(n, i).neg(),
        Generator::F(i) => WeylElement::t(n, i),
        Generator::H(i) => {
            let c = C::one() + &(-gamma[i].clone());
            euler(n, i).add(&WeylElement::scalar(n, c))?
        }
    })
}

fn euler<C: Coefficient>(n: usize, i: usize) -> WeylElement<C> {
    let mut k = vec![0; 2 * n];
    k[i] = 1;
    k[n + i] = 1;
    let mut e = WeylElement::zero(n);
    e.add_term(k, C::one());
    e
}

/// `prod_i F_i^{n_i} E_i^{n_i} * prod_i prod_{k<m_i} (H_i - gamma_i - k)`
/// under `pi_gamma`.
fn casimir_half<C: Coefficient>(fe: &[u32], h: &[u32], gamma: &[C]) -> Result<WeylElement<C>> {
    let n = gamma.len();
    let mut out = WeylElement::one(n);
    for (i, &p) in fe.iter().enumerate() {
        let f = represent(Generator::F(i), gamma)?;
        let e = represent(Generator::E(i), gamma)?;
        out = out.mul(&f.pow(p))?.mul(&e.pow(p))?;
    }
    for (i, &p) in h.iter().enumerate() {
        let hi = represent(Generator::H(i), gamma)?;
        for k in 0..p {
            let shift = -(gamma[i].clone() + &C::from_i64(i64::from(k)));
            out = out.mul(&hi.add(&WeylElement::scalar(n, shift))?)?;
        }
    }
    Ok(out)
}

/// Image of the annihilation element `C(l)` under `pi_gamma`.
pub fn casimir_image<C: Coefficient>(l: &[i64], gamma: &[C]) -> Result<WeylElement<C>> {
    if l.len() != gamma.len() {
        return Err(GkzError::Shape(format!(
            "l has length {}, expected {}",
            l.len(),
            gamma.len()
        )));
    }
    let minus: Vec<u32> = l
        .iter()
        .map(|&x| if x < 0 { x.unsigned_abs() as u32 } else { 0 })
        .collect();
    let plus: Vec<u32> = l
        .iter()
        .map(|&x| if x > 0 { x as u32 } else { 0 })
        .collect();
    casimir_half(&minus, &plus, gamma)?.sub(&casimir_half(&plus, &minus, gamma)?)
}

/// True iff `C(l)` maps to exactly zero.
pub fn verify_annihilation<C: Coefficient>(l: &[i64], gamma: &[C]) -> Result<bool> {
    Ok(casimir_image(l, gamma)?.is_zero())
}

/// `prod_{k<n} (t d - k) = t^n d^n` in one variable.
pub fn euler_identity_check(n: u32) -> bool {
    let td: WeylElement<BigRational> = euler(1, 0);
    let mut lhs = WeylElement::one(1);
    for k in 0..n {
        let factor = td
            .add(&WeylElement::scalar(
                1,
                BigRational::from_i64(-i64::from(k)),
            ))
            .expect("one variable");
        lhs = lhs.mul(&factor).expect("one variable");
    }
    let rhs = WeylElement::monomial(BigRational::one(), &[n], &[n]).expect("one variable");
    lhs == rhs
}

/// Defining relations of `L_N` for the images of `rep`:
/// `[E_i, F_j] = delta_ij C`, `[H_i, E_j] = -delta_ij E_j`,
/// `[H_i, F_j] = delta_ij F_j`, every other pair commuting and `C` central.
pub fn lie_relations_hold<C: Coefficient>(
    gamma: &[C],
    rep: impl Fn(Generator, &[C]) -> Result<WeylElement<C>>,
) -> Result<bool> {
    let n = gamma.len();
    let mut gens = vec![Generator::C];
    for i in 0..n {
        gens.extend([Generator::E(i), Generator::F(i), Generator::H(i)]);
    }
    let zero = WeylElement::zero(n);
    for &x in &gens {
        for &y in &gens {
            let lhs = rep(x, gamma)?.commutator(&rep(y, gamma)?)?;
            let rhs = match (x, y) {
                (Generator::E(i), Generator::F(j)) if i == j => rep(Generator::C, gamma)?,
                (Generator::F(i), Generator::E(j)) if i == j => rep(Generator::C, gamma)?.neg(),
                (Generator::H(i), Generator::E(j)) if i == j => rep(y, gamma)?.neg(),
                (Generator::E(i), Generator::H(j)) if i == j => rep(x, gamma)?,
                (Generator::H(i), Generator::F(j)) if i == j => rep(y, gamma)?,
                (Generator::F(i), Generator::H(j)) if i == j => rep(x, gamma)?.neg(),
                _ => zero.clone(),
            };
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Random rationals `p / q` with `|p| <= 20`, `1 <= q <= 9`.
pub fn random_rational_vector(n: usize, rng: &mut impl Rng) -> Vec<BigRational> {
    (0..n)
        .map(|_| {
            let p: i64 = rng.gen_range(-20..=20);
            let q: i64 = rng.gen_range(1..=9);
            BigRational::new(BigInt::from(p), BigInt::from(q))
        })
        .collect()
}

/// Formal spectral vector `(gamma_1, ..., gamma_n)`.
pub fn symbolic_gamma(n: usize) -> Vec<Poly> {
    (0..n).map(Poly::var).collect()
}

/// One line of an annihilation certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnnihilationRecord {
    pub l: Vec<i64>,
    #[serde(rename = "N")]
    pub n: usize,
    pub annihilated: bool,
}

/// Every `l` in `[-lmax, lmax]^n`, in lexicographic order.
pub fn lattice_box(n: usize, lmax: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (-lmax..=lmax).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}
