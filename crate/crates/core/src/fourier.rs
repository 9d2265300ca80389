//! Walsh–Hadamard spectra of boolean functions.
//!
//! Logical 0 is read as +1 and logical 1 as -1, so xor of bits becomes the
//! product of signs and `chi_S(x) = (-1)^{|x ∧ S|}` is the parity
//! [`BoolFn::linear`] of `S`. Coefficients are `W(S) / 2^n` with integer `W`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::bitfn::{BoolFn, Coalition};
use crate::error::{Error, Result};
use crate::montecarlo::{self, Estimate};
use crate::rational::Rational;

/// Cap on `(m-1)·n` for the exact left side of the product identity.
pub const EXACT_PRODUCT_BITS: u32 = 26;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourierSpectrum {
    arity: u32,
    walsh: Vec<i32>,
}

/// In-place unnormalised Walsh–Hadamard butterfly.
fn fwht(values: &mut [i32]) {
    let mut h = 1;
    while h < values.len() {
        for block in values.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

fn sign(bit: bool) -> i32 {
    if bit {
        -1
    } else {
        1
    }
}

impl FourierSpectrum {
    pub fn transform(f: &BoolFn) -> Self {
        let mut walsh: Vec<i32> = (0..f.size() as u32).map(|x| sign(f.get(x))).collect();
        fwht(&mut walsh);
        FourierSpectrum { arity: f.arity(), walsh }
    }

    pub fn arity(&self) -> u32 {
        self.arity
    }

    /// Unnormalised coefficients `2^n · f̂(S)`, indexed by coalition mask.
    pub fn walsh(&self) -> &[i32] {
        &self.walsh
    }

    pub fn coefficient(&self, s: Coalition) -> Rational {
        Rational::dyadic(self.walsh[s.mask() as usize], self.arity)
    }

    /// Inverse transform back to a boolean function.
    pub fn inverse(&self) -> Result<BoolFn> {
        let mut values = self.walsh.clone();
        fwht(&mut values);
        let scale = 1i32 << self.arity;
        if let Some(bad) = values.iter().find(|v| v.abs() != scale) {
            return Err(Error::InvalidParameter(format!(
                "spectrum is not boolean (value {bad}/{scale})"
            )));
        }
        BoolFn::from_fn(self.arity, |x| values[x as usize] < 0)
    }

    /// `Σ_S f̂(S)^2`; exactly 1 for boolean functions.
    pub fn parseval_sum(&self) -> Rational {
        let total: i128 = self.walsh.iter().map(|&w| (w as i128) * (w as i128)).sum();
        Rational::new(total, BigInt::one() << (2 * self.arity))
    }

    /// Mask with the largest `|f̂(S)|`, smallest mask on ties.
    pub fn dominant(&self) -> Coalition {
        let (mask, _) = self
            .walsh
            .iter()
            .enumerate()
            .fold((0usize, -1i32), |best, (s, &w)| if w.abs() > best.1 { (s, w.abs()) } else { best });
        Coalition::new(mask as u32, self.arity).expect("mask within arity")
    }

    /// Rows `mask,numerator,log2_denominator` with each coefficient reduced.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("mask,numerator,log2_denominator\n");
        for (s, &w) in self.walsh.iter().enumerate() {
            let (num, log) = reduce_dyadic(w as i64, self.arity);
            out.push_str(&format!("{s},{num},{log}\n"));
        }
        out
    }
}

fn reduce_dyadic(mut num: i64, mut log: u32) -> (i64, u32) {
    while log > 0 && num % 2 == 0 {
        num /= 2;
        log -= 1;
    }
    if num == 0 {
        log = 0;
    }
    (num, log)
}

/// `(f̂(S), d(f, chi_S), d(f, -chi_S))`, after checking
/// `f̂(S) = 1 - 2 d(f, chi_S) = 2 d(f, -chi_S) - 1`.
pub fn coefficient_distance_relation(
    f: &BoolFn,
    s: Coalition,
) -> Result<(Rational, Rational, Rational)> {
    let chi = BoolFn::linear(s, f.arity())?;
    let coef = FourierSpectrum::transform(f).coefficient(s);
    let d_pos = f.distance(&chi)?;
    let d_neg = f.distance(&chi.negate())?;
    let two = Rational::from_integer(2);
    assert_eq!(coef, &Rational::one() - &(&two * &d_pos));
    assert_eq!(coef, &(&two * &d_neg) - &Rational::one());
    Ok((coef, d_pos, d_neg))
}

/// Left side of the generalized Parseval identity.
#[derive(Clone, Debug, PartialEq)]
pub enum ProductSide {
    Exact(Rational),
    Estimated(Estimate),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TripleProduct {
    pub lhs: ProductSide,
    pub rhs: Rational,
}

impl TripleProduct {
    /// Exact sides agree, or the estimate's interval covers the right side.
    pub fn agrees(&self) -> bool {
        match &self.lhs {
            ProductSide::Exact(l) => *l == self.rhs,
            ProductSide::Estimated(e) => e.contains(self.rhs.to_f64()),
        }
    }
}

/// `Σ_S ∏_j f̂^j(S)`.
pub fn spectral_product_sum(spectra: &[FourierSpectrum]) -> Result<Rational> {
    let n = check_tuple(spectra.iter().map(|s| s.arity))?;
    let mut total = BigInt::zero();
    for s in 0..(1usize << n) {
        let mut term = BigInt::one();
        for sp in spectra {
            term *= sp.walsh[s];
            if term.is_zero() {
                break;
            }
        }
        total += term;
    }
    Ok(Rational::new(total, BigInt::one() << (n * spectra.len() as u32)))
}

fn check_tuple(arities: impl Iterator<Item = u32>) -> Result<u32> {
    let arities: Vec<u32> = arities.collect();
    if arities.len() < 2 {
        return Err(Error::InvalidParameter("need at least two functions".into()));
    }
    let n = arities[0];
    if let Some(&bad) = arities.iter().find(|&&a| a != n) {
        return Err(Error::ArityMismatch { left: n, right: bad });
    }
    Ok(n)
}

/// `E[∏_{j<m} f^j(x^j) · f^m(x^1 ⊕ … ⊕ x^{m-1})]` by direct enumeration.
pub fn product_expectation_exact(fs: &[BoolFn]) -> Result<Rational> {
    let n = check_tuple(fs.iter().map(BoolFn::arity))?;
    let free = fs.len() as u32 - 1;
    let bits = free * n;
    if bits > EXACT_PRODUCT_BITS {
        return Err(Error::Budget {
            what: "product identity enumeration",
            log2_size: bits,
            cap: EXACT_PRODUCT_BITS,
            hint: "; use the Monte-Carlo mode",
        });
    }
    let mask = (1u64 << n) - 1;
    let (last, inputs) = fs.split_last().unwrap();
    let mut total: i64 = 0;
    for code in 0..(1u64 << bits) {
        let mut acc = 0u32;
        let mut s = 1i32;
        for (j, f) in inputs.iter().enumerate() {
            let x = ((code >> (j as u32 * n)) & mask) as u32;
            acc ^= x;
            s *= sign(f.get(x));
        }
        total += (s * sign(last.get(acc))) as i64;
    }
    Ok(Rational::new(total, BigInt::one() << bits))
}

/// Monte-Carlo estimate of the left side of the generalized Parseval identity.
pub fn product_expectation_mc(fs: &[BoolFn], samples: u64, seed: u64) -> Result<Estimate> {
    let n = check_tuple(fs.iter().map(BoolFn::arity))?;
    let (last, inputs) = fs.split_last().unwrap();
    Ok(montecarlo::estimate_mean(seed, samples, -1, 1, |rng| {
        let mut acc = 0u32;
        let mut s = 1i64;
        for f in inputs {
            let x: u32 = rng.gen_range(0..1u32 << n);
            acc ^= x;
            s *= sign(f.get(x)) as i64;
        }
        s * sign(last.get(acc)) as i64
    }))
}

/// Both sides of the generalized Parseval identity. The left side is exact
/// when `(m-1)·n` fits the enumeration cap, otherwise estimated with
/// `samples` draws from `seed`.
pub fn triple_product_identity(fs: &[BoolFn], samples: u64, seed: u64) -> Result<TripleProduct> {
    let n = check_tuple(fs.iter().map(BoolFn::arity))?;
    let spectra: Vec<FourierSpectrum> = fs.iter().map(FourierSpectrum::transform).collect();
    let rhs = spectral_product_sum(&spectra)?;
    let lhs = if (fs.len() as u32 - 1) * n <= EXACT_PRODUCT_BITS {
        ProductSide::Exact(product_expectation_exact(fs)?)
    } else {
        ProductSide::Estimated(product_expectation_mc(fs, samples, seed)?)
    };
    Ok(TripleProduct { lhs, rhs })
}

/// Integer check of `(Σ_S ∏_j |a_{S,j}|)^k <= ∏_j Σ_S |a_{S,j}|^k` with
/// `k` the tuple size, on the unnormalised coefficients (the common `2^n`
/// scale cancels). Returns `(lhs, rhs)`.
pub fn generalized_holder(spectra: &[FourierSpectrum]) -> Result<(BigInt, BigInt)> {
    let n = check_tuple(spectra.iter().map(|s| s.arity))?;
    let k = spectra.len() as u32;
    let mut inner = BigInt::zero();
    for s in 0..(1usize << n) {
        let mut term = BigInt::one();
        for sp in spectra {
            term *= sp.walsh[s].abs();
        }
        inner += term;
    }
    let lhs = num_traits::pow(inner, k as usize);
    let mut rhs = BigInt::one();
    for sp in spectra {
        let sum: BigInt = sp
            .walsh
            .iter()
            .map(|&w| num_traits::pow(BigInt::from(w).abs(), k as usize))
            .sum();
        rhs *= sum;
    }
    Ok((lhs, rhs))
}
