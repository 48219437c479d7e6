//! Finite-precision p-adic numbers, Kozyrev wavelets, exact application of
//! the Vladimirov derivative via shell decomposition, character-twisted
//! eigenvalues and the sl2 index action.
//!
//! A number is stored as p^v * sum d_i p^i with digits known up to an
//! absolute precision position: predicates that the stored digits cannot
//! decide (is this cancellation-zero inside a given ball or not?) raise
//! rather than guess.
//!
//! The wavelet convention used throughout is
//!
//!   psi_{gamma,m,j}(xi) = p^{-gamma/2}
//!       * exp(2 pi i { p^{gamma-1} j (xi - p^{-gamma} m) }_p)
//!       * [ |xi - p^{-gamma} m|_p <= p^gamma ]
//!
//! which is locally constant at scale p^{gamma-1}, takes the p-th roots of
//! unity (times p^{-gamma/2}) on the p equal-measure sub-balls of its
//! support, and satisfies D^alpha psi = p^{alpha(1-gamma)} psi. The number
//! state |n> corresponds to scale gamma = 1 - n, giving eigenvalue p^{n alpha}.

use crate::chars::{DirichletCharacter, RootOfUnity};
use crate::error::{Error, Result};
use crate::primes::is_prime;
use num_complex::Complex64;

/// Default number of stored digits per value.
pub const DEFAULT_PRECISION: usize = 24;

/// Sentinel absolute precision of the exact zero.
const EXACT: i64 = i64::MAX;

/// A p-adic number x = p^valuation * sum_i digits[i] p^i, known modulo
/// p^abs_prec. The exact zero carries empty digits and infinite precision;
/// empty digits with finite precision mean "zero modulo p^abs_prec", which
/// is all that survives a full cancellation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicNumber {
    prime: u64,
    valuation: i64,
    digits: Vec<u64>,
    abs_prec: i64,
}

fn p_adic_valuation_i64(mut n: i64, p: u64) -> (i64, i64) {
    // (valuation, unit part); n != 0
    let mut v = 0;
    while n % p as i64 == 0 {
        n /= p as i64;
        v += 1;
    }
    (v, n)
}

impl PadicNumber {
    pub fn zero(prime: u64) -> Self {
        Self {
            prime,
            valuation: 0,
            digits: Vec::new(),
            abs_prec: EXACT,
        }
    }

    /// Canonical form over the digit window [lo, hi): strips leading zeros,
    /// collapses an all-zero window to a precision-limited zero.
    fn from_window(prime: u64, lo: i64, mut digits: Vec<u64>, hi: i64) -> Self {
        debug_assert_eq!(digits.len() as i64, hi - lo);
        let lead = digits.iter().position(|&d| d != 0);
        match lead {
            None => Self {
                prime,
                valuation: 0,
                digits: Vec::new(),
                abs_prec: hi,
            },
            Some(k) => {
                digits.drain(..k);
                Self {
                    prime,
                    valuation: lo + k as i64,
                    digits,
                    abs_prec: hi,
                }
            }
        }
    }

    /// Integer embedded with the default precision. Negative integers get
    /// the usual non-terminating complement expansion, truncated.
    pub fn from_integer(prime: u64, n: i64) -> Self {
        assert!(is_prime(prime), "modulus must be prime");
        if n == 0 {
            return Self::zero(prime);
        }
        let mut digits = Vec::with_capacity(DEFAULT_PRECISION);
        let mut r = n as i128;
        let p = prime as i128;
        for _ in 0..DEFAULT_PRECISION {
            let d = r.rem_euclid(p);
            digits.push(d as u64);
            r = (r - d) / p;
        }
        Self::from_window(prime, 0, digits, DEFAULT_PRECISION as i64)
    }

    /// num/den with den != 0, expanded to the default precision.
    pub fn from_rational(prime: u64, num: i64, den: i64) -> Result<Self> {
        assert!(is_prime(prime), "modulus must be prime");
        if den == 0 {
            return Err(Error::Domain("zero denominator".into()));
        }
        if num == 0 {
            return Ok(Self::zero(prime));
        }
        let (v_num, num_unit) = p_adic_valuation_i64(num, prime);
        let (v_den, den_unit) = p_adic_valuation_i64(den, prime);
        let v = v_num - v_den;
        let p = prime as i128;
        let inv_den = mod_inverse(den_unit.rem_euclid(p as i64) as i128, p);
        let mut digits = Vec::with_capacity(DEFAULT_PRECISION);
        let mut r = num_unit as i128;
        for _ in 0..DEFAULT_PRECISION {
            let d = (r.rem_euclid(p) * inv_den).rem_euclid(p);
            digits.push(d as u64);
            r = (r - d * den_unit as i128) / p;
        }
        Ok(Self::from_window(
            prime,
            v,
            digits,
            v + DEFAULT_PRECISION as i64,
        ))
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn is_exact_zero(&self) -> bool {
        self.digits.is_empty() && self.abs_prec == EXACT
    }

    /// Position of the first digit that could be nonzero.
    fn low_position(&self) -> i64 {
        if self.digits.is_empty() {
            self.abs_prec.min(i64::MAX - 1)
        } else {
            self.valuation
        }
    }

    fn digit_at(&self, pos: i64) -> u64 {
        if self.digits.is_empty() {
            return 0;
        }
        let idx = pos - self.valuation;
        if idx < 0 || idx as usize >= self.digits.len() {
            0
        } else {
            self.digits[idx as usize]
        }
    }

    /// |x|_p = p^{-v}. Errors when the stored digits cannot distinguish the
    /// value from zero.
    pub fn norm(&self) -> Result<f64> {
        if self.digits.is_empty() {
            if self.abs_prec == EXACT {
                return Ok(0.0);
            }
            return Err(Error::InsufficientPrecision(format!(
                "value is 0 mod {}^{} but may be nonzero below",
                self.prime, self.abs_prec
            )));
        }
        Ok((self.prime as f64).powi(-self.valuation as i32))
    }

    /// Exact valuation; `None` for the exact zero.
    pub fn valuation(&self) -> Result<Option<i64>> {
        if self.digits.is_empty() {
            if self.abs_prec == EXACT {
                return Ok(None);
            }
            return Err(Error::InsufficientPrecision(
                "valuation hidden below stored precision".into(),
            ));
        }
        Ok(Some(self.valuation))
    }

    /// Decide |x|_p <= p^radius_pow, erring when the stored precision
    /// cannot tell.
    pub fn in_ball(&self, radius_pow: i64) -> Result<bool> {
        if self.digits.is_empty() {
            if self.abs_prec == EXACT {
                return Ok(true);
            }
            // |x| <= p^{-abs_prec}; inside iff that bound fits the ball.
            if -self.abs_prec <= radius_pow {
                return Ok(true);
            }
            return Err(Error::InsufficientPrecision(format!(
                "membership in the p^{radius_pow} ball undecidable at precision {}",
                self.abs_prec
            )));
        }
        Ok(-self.valuation <= radius_pow)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.prime, rhs.prime, "mixed primes");
        if self.is_exact_zero() {
            return rhs.clone();
        }
        if rhs.is_exact_zero() {
            return self.clone();
        }
        let lo = self.low_position().min(rhs.low_position());
        let hi = self.abs_prec.min(rhs.abs_prec);
        if lo >= hi {
            return Self::from_window(self.prime, 0, Vec::new(), hi);
        }
        let p = self.prime;
        let mut digits = Vec::with_capacity((hi - lo) as usize);
        let mut carry = 0u64;
        for pos in lo..hi {
            let s = self.digit_at(pos) + rhs.digit_at(pos) + carry;
            digits.push(s % p);
            carry = s / p;
        }
        Self::from_window(self.prime, lo, digits, hi)
    }

    pub fn neg(&self) -> Self {
        if self.is_exact_zero() {
            return self.clone();
        }
        Self::zero(self.prime).sub(self)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.prime, rhs.prime, "mixed primes");
        if rhs.is_exact_zero() {
            return self.clone();
        }
        let lo = self.low_position().min(rhs.low_position());
        let hi = if self.is_exact_zero() {
            rhs.abs_prec
        } else {
            self.abs_prec.min(rhs.abs_prec)
        };
        if lo >= hi {
            return Self::from_window(self.prime, 0, Vec::new(), hi);
        }
        let p = self.prime as i64;
        let mut digits = Vec::with_capacity((hi - lo) as usize);
        let mut borrow = 0i64;
        for pos in lo..hi {
            let mut d = self.digit_at(pos) as i64 - rhs.digit_at(pos) as i64 - borrow;
            if d < 0 {
                d += p;
                borrow = 1;
            } else {
                borrow = 0;
            }
            digits.push(d as u64);
        }
        Self::from_window(self.prime, lo, digits, hi)
    }

    /// Multiply by p^k: a pure valuation shift.
    pub fn mul_p_power(&self, k: i64) -> Self {
        let mut out = self.clone();
        if out.abs_prec != EXACT {
            out.abs_prec += k;
        }
        if !out.digits.is_empty() {
            out.valuation += k;
        }
        out
    }

    /// Multiply by a unit integer 1 <= c < p.
    pub fn mul_unit(&self, c: u64) -> Self {
        assert!(c >= 1 && c < self.prime, "multiplier must be a unit digit");
        if self.digits.is_empty() {
            return self.clone();
        }
        let p = self.prime;
        let mut digits = Vec::with_capacity(self.digits.len());
        let mut carry = 0u64;
        for &d in &self.digits {
            let s = d * c + carry;
            digits.push(s % p);
            carry = s / p;
        }
        // Carry past the precision window is unknown territory; drop it.
        Self::from_window(
            self.prime,
            self.valuation,
            digits,
            self.valuation + self.digits.len() as i64,
        )
    }

    /// Fractional part {x}_p as the exact rational a / p^l built from the
    /// digits at negative positions. Errors if those digits are not all
    /// stored.
    pub fn fractional_part(&self) -> Result<(u64, u64)> {
        if self.digits.is_empty() {
            if self.abs_prec == EXACT || self.abs_prec >= 0 {
                return Ok((0, 1));
            }
            return Err(Error::InsufficientPrecision(
                "fractional digits hidden below stored precision".into(),
            ));
        }
        if self.valuation >= 0 {
            return Ok((0, 1));
        }
        if self.abs_prec < 0 {
            return Err(Error::InsufficientPrecision(
                "fractional digits extend past stored precision".into(),
            ));
        }
        let l = (-self.valuation) as u32;
        let den = self
            .prime
            .checked_pow(l)
            .ok_or_else(|| Error::Overflow("fractional denominator exceeds u64".into()))?;
        let mut num: u64 = 0;
        let mut power: u64 = 1;
        for i in 0..l as usize {
            num += self.digit_at(self.valuation + i as i64) * power;
            power = power.saturating_mul(self.prime);
        }
        Ok((num, den))
    }
}

fn mod_inverse(a: i128, p: i128) -> i128 {
    // Fermat: a^{p-2} mod p for prime p.
    let mut base = a.rem_euclid(p);
    let mut exp = p - 2;
    let mut acc: i128 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// e^{2 pi i {x}_p}: the standard additive character, exact on the rational
/// angle.
pub fn additive_character(x: &PadicNumber) -> Result<Complex64> {
    let (num, den) = x.fractional_part()?;
    Ok(RootOfUnity::new(num, den).value())
}

/// Translation parameter m = numerator / p^denom_pow, a representative of a
/// class in Q_p / Z_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PadicFraction {
    pub numerator: i64,
    pub denom_pow: u32,
}

impl PadicFraction {
    pub const ZERO: PadicFraction = PadicFraction {
        numerator: 0,
        denom_pow: 0,
    };
}

/// Kozyrev wavelet label: prime, scale gamma (support = ball of radius
/// p^gamma), translation m and phase j in 1..p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WaveletIndex {
    prime: u64,
    scale: i64,
    translation: PadicFraction,
    phase: u64,
}

impl WaveletIndex {
    pub fn new(prime: u64, scale: i64) -> Result<Self> {
        if !is_prime(prime) {
            return Err(Error::InvalidConfig(format!("{prime} is not prime")));
        }
        Ok(Self {
            prime,
            scale,
            translation: PadicFraction::ZERO,
            phase: 1,
        })
    }

    pub fn with_translation(mut self, translation: PadicFraction) -> Self {
        self.translation = translation;
        self
    }

    pub fn with_phase(mut self, phase: u64) -> Result<Self> {
        if phase == 0 || phase >= self.prime {
            return Err(Error::InvalidConfig(format!(
                "phase index must lie in 1..{}",
                self.prime
            )));
        }
        self.phase = phase;
        Ok(self)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn phase(&self) -> u64 {
        self.phase
    }

    /// Center of the support ball: p^{-gamma} m.
    pub fn center(&self) -> PadicNumber {
        PadicNumber::from_integer(self.prime, self.translation.numerator)
            .mul_p_power(-self.scale - self.translation.denom_pow as i64)
    }

    /// Eigenvalue of D^alpha on this wavelet: p^{alpha (1 - gamma)}.
    pub fn vladimirov_eigenvalue(&self, alpha: Complex64) -> Complex64 {
        (alpha * (1.0 - self.scale as f64) * (self.prime as f64).ln()).exp()
    }
}

/// Evaluate the wavelet at xi. Zero off the support ball; errs only when the
/// stored precision cannot decide support membership or the character angle.
pub fn kozyrev_eval(idx: &WaveletIndex, xi: &PadicNumber) -> Result<Complex64> {
    assert_eq!(idx.prime, xi.prime(), "mixed primes");
    let w = xi.sub(&idx.center());
    if !w.in_ball(idx.scale)? {
        return Ok(Complex64::new(0.0, 0.0));
    }
    // Character argument p^{gamma-1} j (xi - center).
    let arg = w.mul_unit(idx.phase).mul_p_power(idx.scale - 1);
    let character = additive_character(&arg)?;
    let amplitude = (idx.prime as f64).powf(-(idx.scale as f64) / 2.0);
    Ok(amplitude * character)
}

/// Vladimirov normalization (1 - p^alpha) / (1 - p^{-alpha-1}).
pub fn vladimirov_constant(p: u64, alpha: Complex64) -> Complex64 {
    let lp = (p as f64).ln();
    let num = Complex64::new(1.0, 0.0) - (alpha * lp).exp();
    let den = Complex64::new(1.0, 0.0) - ((-alpha - 1.0) * lp).exp();
    num / den
}

/// Apply D^alpha to the wavelet at the point xi by exact shell
/// decomposition: every sphere integral is a closed-form character sum and
/// the constant tail is a geometric series. No numerical quadrature.
///
/// Requires Re(alpha) > 0 for the tail to converge.
pub fn vladimirov_apply(
    alpha: Complex64,
    idx: &WaveletIndex,
    xi: &PadicNumber,
) -> Result<Complex64> {
    assert_eq!(idx.prime, xi.prime(), "mixed primes");
    if alpha.re <= 0.0 {
        return Err(Error::Domain(format!(
            "shell tail diverges for Re(alpha) = {} <= 0",
            alpha.re
        )));
    }
    let p = idx.prime;
    let pf = p as f64;
    let lp = pf.ln();
    let gamma = idx.scale;
    let constant = vladimirov_constant(p, alpha);

    // Ball-character identity: integral of exp(2 pi i {a u}_p) over
    // |u| <= p^t is p^t when |a| p^t <= 1 and 0 otherwise. Here
    // a = p^{gamma-1} j with |a| = p^{1-gamma}.
    let ball_integral = |t: i64| -> f64 {
        if 1 - gamma + t <= 0 {
            pf.powi(t as i32)
        } else {
            0.0
        }
    };
    let p_pow_c = |z: Complex64| (z * lp).exp();

    let w = xi.sub(&idx.center());
    if w.in_ball(gamma)? {
        let psi = kozyrev_eval(idx, xi)?;
        // Shells |u| = p^k, k <= gamma: the integrand factorizes as
        // psi(xi) (chi(a u) - 1); shells below the constancy scale cancel
        // exactly, the boundary shell k = gamma contributes -psi p^gamma.
        let mut integral = Complex64::new(0.0, 0.0);
        for k in (gamma - 3)..=gamma {
            let sphere_character = ball_integral(k) - ball_integral(k - 1);
            let sphere_measure = pf.powi(k as i32) - pf.powi(k as i32 - 1);
            integral += psi * (sphere_character - sphere_measure) * p_pow_c(-(alpha + 1.0) * k as f64);
        }
        // Shells k > gamma leave the support: integrand is -psi(xi) on each,
        // summing to a geometric tail.
        let tail = p_pow_c(-alpha * (gamma + 1) as f64)
            / (Complex64::new(1.0, 0.0) - p_pow_c(-alpha));
        integral -= psi * (1.0 - 1.0 / pf) * tail;
        Ok(constant * integral)
    } else {
        // xi outside the support: f(xi) = 0 and only the shell through the
        // support ball contributes; its value is the full wavelet integral,
        // which the ball identity sends to zero (mean-zero wavelet).
        let distance_pow = -w
            .valuation()?
            .expect("outside the ball implies nonzero distance");
        let support_character_integral = ball_integral(gamma); // = 0
        let amplitude = pf.powf(-(gamma as f64) / 2.0);
        Ok(constant
            * p_pow_c(-(alpha + 1.0) * distance_pow as f64)
            * amplitude
            * support_character_integral)
    }
}

/// L2 inner product <a, b> of two same-scale wavelets via the exact
/// piecewise-constant decomposition: both are constant on the p sub-balls
/// of radius p^{gamma-1}, so the integral is a finite sum of cell values
/// times the cell measure.
pub fn wavelet_inner_product(a: &WaveletIndex, b: &WaveletIndex) -> Result<Complex64> {
    if a.prime != b.prime {
        return Err(Error::InvalidConfig("mixed primes".into()));
    }
    if a.scale != b.scale {
        return Err(Error::InvalidConfig(
            "inner products implemented at fixed scale only".into(),
        ));
    }
    let p = a.prime;
    let gamma = a.scale;
    let ca = a.center();
    let distance = cb_distance(&ca, &b.center());
    // Same radius: supports are either identical or disjoint.
    if !distance.in_ball(gamma)? {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let cell_measure = (p as f64).powi(gamma as i32 - 1);
    let mut acc = Complex64::new(0.0, 0.0);
    for t in 0..p {
        let point = ca.add(&PadicNumber::from_integer(p, t as i64).mul_p_power(-gamma));
        acc += kozyrev_eval(a, &point)?.conj() * kozyrev_eval(b, &point)? * cell_measure;
    }
    Ok(acc)
}

fn cb_distance(a: &PadicNumber, b: &PadicNumber) -> PadicNumber {
    a.sub(b)
}

/// Paired eigenvalue check of the composition law at occupation n:
/// returns (p^{n a1} * p^{n a2}, p^{n (a1 + a2)}).
pub fn composition_eigencheck(
    p: u64,
    alpha1: Complex64,
    alpha2: Complex64,
    n: i64,
) -> (Complex64, Complex64) {
    let lp = (p as f64).ln();
    let lhs = (alpha1 * (n as f64) * lp).exp() * (alpha2 * (n as f64) * lp).exp();
    let rhs = ((alpha1 + alpha2) * (n as f64) * lp).exp();
    (lhs, rhs)
}

/// Eigenvalue of the character-twisted derivative on the occupation-n
/// wavelet: chi(p^n) p^n = chi(p)^n p^n; zero when chi(p) = 0 and n > 0.
pub fn twisted_eigenvalue(p: u64, n: u32, chi: &DirichletCharacter) -> Complex64 {
    match chi.eval_exact(p as i64) {
        None => {
            if n == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }
        Some(root) => root.pow(n as u64).value() * (p as f64).powi(n as i32),
    }
}

/// Eigenvalue of the unitary ratio operator: chi(p^n), of unit modulus; the
/// operator is the identity (eigenvalue 1) when p divides the character
/// modulus.
pub fn unitary_ratio_eigenvalue(p: u64, n: u32, chi: &DirichletCharacter) -> Complex64 {
    match chi.eval_exact(p as i64) {
        None => Complex64::new(1.0, 0.0),
        Some(root) => root.pow(n as u64).value(),
    }
}

/// Generators of the scaling algebra on occupation states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sl2Generator {
    J3,
    JPlus,
    JMinus,
}

/// Apply a generator to a coefficient vector over occupations 0..=n_max:
/// J3 |n> = n |n>, Jpm |n> = n |n +- 1>, with states outside the truncation
/// silently dropped.
pub fn sl2_apply(generator: Sl2Generator, state: &[Complex64]) -> Vec<Complex64> {
    let d = state.len();
    let mut out = vec![Complex64::new(0.0, 0.0); d];
    match generator {
        Sl2Generator::J3 => {
            for (n, &v) in state.iter().enumerate() {
                out[n] = v * n as f64;
            }
        }
        Sl2Generator::JPlus => {
            for n in 1..d {
                out[n] = state[n - 1] * (n as f64 - 1.0);
            }
        }
        Sl2Generator::JMinus => {
            for n in 0..d.saturating_sub(1) {
                out[n] = state[n + 1] * (n as f64 + 1.0);
            }
        }
    }
    out
}
