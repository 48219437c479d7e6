//! Dirichlet characters mod k with exact root-of-unity values.
//!
//! Characters are built from a decomposition of the unit group (Z/kZ)* into
//! cyclic factors: CRT over the prime-power factors of k, with the usual
//! special case at 2^a (a >= 3), where the units split as {+-1} x <5>.
//! Values are stored as exact angle fractions of a full turn, so products,
//! powers and orthogonality sums stay exact until the final complex render.

use crate::error::{Error, Result};
use crate::primes::factorize;
use num_complex::Complex64;
use std::collections::HashMap;

/// A root of unity stored as the reduced fraction of a full turn it spans:
/// the complex value is exp(2*pi*i*num/den), with 0 <= num < den.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RootOfUnity {
    num: u64,
    den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

impl RootOfUnity {
    pub const ONE: RootOfUnity = RootOfUnity { num: 0, den: 1 };

    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let num = num % den;
        let g = gcd(num, den).max(1);
        RootOfUnity {
            num: num / g,
            den: den / g,
        }
    }

    pub fn pow(self, m: u64) -> Self {
        let num = (self.num as u128 * m as u128 % self.den as u128) as u64;
        RootOfUnity::new(num, self.den)
    }

    pub fn conj(self) -> Self {
        RootOfUnity::new((self.den - self.num) % self.den, self.den)
    }

    /// Angle as the reduced fraction (numerator, denominator) of a full turn.
    pub fn angle_fraction(self) -> (u64, u64) {
        (self.num, self.den)
    }

    /// Complex render. Quarter turns are returned exactly.
    pub fn value(self) -> Complex64 {
        match (self.num, self.den) {
            (0, _) => Complex64::new(1.0, 0.0),
            (1, 2) => Complex64::new(-1.0, 0.0),
            (1, 4) => Complex64::new(0.0, 1.0),
            (3, 4) => Complex64::new(0.0, -1.0),
            (n, d) => Complex64::from_polar(1.0, std::f64::consts::TAU * n as f64 / d as f64),
        }
    }
}

/// Product of roots of unity: angle fractions add mod 1.
impl std::ops::Mul for RootOfUnity {
    type Output = RootOfUnity;

    fn mul(self, rhs: Self) -> Self {
        let g = gcd(self.den, rhs.den);
        let l = self.den / g * rhs.den; // lcm, no overflow at character scale
        let num = (self.num as u128 * (l / self.den) as u128
            + rhs.num as u128 * (l / rhs.den) as u128)
            % l as u128;
        RootOfUnity::new(num as u64, l)
    }
}

/// One cyclic component of (Z/kZ)*: its order, and the discrete logarithm of
/// every unit of the prime-power factor it belongs to.
#[derive(Debug, Clone)]
struct CyclicComponent {
    /// Prime-power modulus this component lives in.
    factor_modulus: u64,
    order: u64,
    /// residue mod factor_modulus -> exponent on this component's generator.
    dlog: HashMap<u64, u64>,
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = (acc as u128 * base as u128 % m as u128) as u64;
        }
        base = (base as u128 * base as u128 % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

fn totient_of_prime_power(q: u64, a: u32) -> u64 {
    q.pow(a - 1) * (q - 1)
}

/// Cyclic components of the unit group of Z/(q^a)Z.
fn components_of_factor(q: u64, a: u32) -> Vec<CyclicComponent> {
    let m = q.pow(a);
    if q == 2 {
        match a {
            1 => return Vec::new(), // trivial unit group
            2 => {
                // (Z/4)* = <3>, order 2
                let mut dlog = HashMap::new();
                dlog.insert(1, 0);
                dlog.insert(3, 1);
                return vec![CyclicComponent {
                    factor_modulus: 4,
                    order: 2,
                    dlog,
                }];
            }
            _ => {
                // (Z/2^a)* = <-1> x <5>, orders 2 and 2^(a-2)
                let half_order = m / 4;
                let mut dlog_sign: HashMap<u64, u64> = HashMap::new();
                let mut dlog_five: HashMap<u64, u64> = HashMap::new();
                for s in 0..2u64 {
                    for t in 0..half_order {
                        let r = pow_mod(m - 1, s, m) as u128 * pow_mod(5, t, m) as u128
                            % m as u128;
                        dlog_sign.insert(r as u64, s);
                        dlog_five.insert(r as u64, t);
                    }
                }
                return vec![
                    CyclicComponent {
                        factor_modulus: m,
                        order: 2,
                        dlog: dlog_sign,
                    },
                    CyclicComponent {
                        factor_modulus: m,
                        order: half_order,
                        dlog: dlog_five,
                    },
                ];
            }
        }
    }
    // Odd prime power: cyclic. Smallest generator found by checking that its
    // powers exhaust the unit group while building the dlog table.
    let order = totient_of_prime_power(q, a);
    for g in 2..m {
        if g % q == 0 {
            continue;
        }
        let mut dlog = HashMap::with_capacity(order as usize);
        let mut x = 1u64;
        let mut full_cycle = true;
        for e in 0..order {
            if dlog.insert(x, e).is_some() {
                full_cycle = false;
                break;
            }
            x = (x as u128 * g as u128 % m as u128) as u64;
        }
        if full_cycle && x == 1 {
            return vec![CyclicComponent {
                factor_modulus: m,
                order,
                dlog,
            }];
        }
    }
    unreachable!("odd prime power unit group is cyclic");
}

fn unit_group_components(k: u64) -> Vec<CyclicComponent> {
    factorize(k)
        .into_iter()
        .flat_map(|(q, a)| components_of_factor(q, a))
        .collect()
}

/// Euler totient of k. Rejects k = 0.
pub fn totient(k: u64) -> Result<u64> {
    if k == 0 {
        return Err(Error::InvalidModulus(0));
    }
    Ok(factorize(k)
        .into_iter()
        .map(|(q, a)| totient_of_prime_power(q, a))
        .product())
}

/// A Dirichlet character mod k: multiplicative on units, zero elsewhere,
/// extended to all integers by periodicity.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletCharacter {
    modulus: u64,
    label: usize,
    /// Value per residue class 0..k-1; `None` encodes 0 (non-unit residue).
    values: Vec<Option<RootOfUnity>>,
    /// Exponent tuple on the table's generators; tracks the label under powers.
    exponents: Vec<u64>,
    radices: Vec<u64>,
}

impl DirichletCharacter {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Index of this character in the canonical table ordering
    /// (lexicographic in the exponent tuple on the chosen generators).
    pub fn label(&self) -> usize {
        self.label
    }

    pub fn is_principal(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// Exact value at residue r (0..k-1), `None` when gcd(r, k) > 1.
    pub fn value_at_residue(&self, r: u64) -> Option<RootOfUnity> {
        self.values[r as usize]
    }

    /// Value table rendered as angle fractions, index = residue class.
    pub fn angle_table(&self) -> Vec<Option<(u64, u64)>> {
        self.values
            .iter()
            .map(|v| v.map(RootOfUnity::angle_fraction))
            .collect()
    }

    /// chi(n) for any integer, by periodicity.
    pub fn eval(&self, n: i64) -> Complex64 {
        self.eval_exact(n)
            .map_or(Complex64::new(0.0, 0.0), RootOfUnity::value)
    }

    /// Exact root-of-unity value of chi(n), `None` when chi(n) = 0.
    pub fn eval_exact(&self, n: i64) -> Option<RootOfUnity> {
        let r = n.rem_euclid(self.modulus as i64) as u64;
        self.values[r as usize]
    }

    /// Pointwise m-th power; chi^0 is the principal character mod k.
    pub fn pow(&self, m: u64) -> DirichletCharacter {
        let exponents: Vec<u64> = self
            .exponents
            .iter()
            .zip(self.radices.iter())
            .map(|(&e, &d)| (e as u128 * m as u128 % d as u128) as u64)
            .collect();
        let mut label = 0usize;
        for (&e, &d) in exponents.iter().zip(self.radices.iter()) {
            label = label * d as usize + e as usize;
        }
        DirichletCharacter {
            modulus: self.modulus,
            label,
            values: self
                .values
                .iter()
                .map(|v| v.map(|w| w.pow(m)))
                .collect(),
            exponents,
            radices: self.radices.clone(),
        }
    }
}

/// The principal character mod k: 1 on units, 0 elsewhere.
pub fn principal(k: u64) -> Result<DirichletCharacter> {
    if k == 0 {
        return Err(Error::InvalidModulus(0));
    }
    let components = unit_group_components(k);
    let values = (0..k)
        .map(|r| {
            if gcd(r, k) == 1 {
                Some(RootOfUnity::ONE)
            } else {
                None
            }
        })
        .collect();
    Ok(DirichletCharacter {
        modulus: k,
        label: 0,
        values,
        exponents: vec![0; components.len()],
        radices: components.iter().map(|c| c.order).collect(),
    })
}

/// All phi(k) characters mod k in a deterministic order.
#[derive(Debug, Clone)]
pub struct CharacterTable {
    modulus: u64,
    characters: Vec<DirichletCharacter>,
}

impl CharacterTable {
    /// Build the full table: every homomorphism (Z/kZ)* -> C*, extended by
    /// zero off the units, ordered lexicographically in the exponent tuple.
    pub fn build(k: u64) -> Result<CharacterTable> {
        if k == 0 {
            return Err(Error::InvalidModulus(0));
        }
        let components = unit_group_components(k);
        let radices: Vec<u64> = components.iter().map(|c| c.order).collect();
        let phi: u64 = radices.iter().product::<u64>().max(1);

        // Per-residue exponent vectors with respect to the generators.
        let mut residue_exponents: Vec<Option<Vec<u64>>> = vec![None; k as usize];
        for r in 0..k {
            if gcd(r, k) != 1 {
                continue;
            }
            let exps: Vec<u64> = components
                .iter()
                .map(|c| c.dlog[&(r % c.factor_modulus)])
                .collect();
            residue_exponents[r as usize] = Some(exps);
        }
        // k = 1: the single residue 0 is the unit.
        if k == 1 {
            residue_exponents[0] = Some(Vec::new());
        }

        let mut characters = Vec::with_capacity(phi as usize);
        for label in 0..phi as usize {
            // Decode label into the exponent tuple, first component slowest.
            let mut rem = label as u64;
            let mut exponents = vec![0u64; radices.len()];
            for j in (0..radices.len()).rev() {
                exponents[j] = rem % radices[j];
                rem /= radices[j];
            }
            let values: Vec<Option<RootOfUnity>> = residue_exponents
                .iter()
                .map(|per_residue| {
                    per_residue.as_ref().map(|exps| {
                        exps.iter()
                            .zip(exponents.iter())
                            .zip(radices.iter())
                            .fold(RootOfUnity::ONE, |acc, ((&e, &c), &d)| {
                                acc * RootOfUnity::new(
                                    (c as u128 * e as u128 % d as u128) as u64,
                                    d,
                                )
                            })
                    })
                })
                .collect();
            characters.push(DirichletCharacter {
                modulus: k,
                label,
                values,
                exponents,
                radices: radices.clone(),
            });
        }
        Ok(CharacterTable {
            modulus: k,
            characters,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn characters(&self) -> &[DirichletCharacter] {
        &self.characters
    }

    pub fn get(&self, label: usize) -> Option<&DirichletCharacter> {
        self.characters.get(label)
    }

    pub fn len(&self) -> usize {
        self.characters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.characters.is_empty()
    }
}
