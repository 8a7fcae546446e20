//! Modular-arithmetic kernels and special constants: inverse tables,
//! Bernoulli and Euler numbers mod p, Fermat quotients and the finite
//! Catalan constant.
//!
//! All residues are stored as least nonnegative representatives; signs are
//! materialized at use sites. Everything here is a pure function of its
//! inputs; the per-prime caches in [`PrimeContext`] are filled once and then
//! read-only, so contexts may be shared freely across threads.

use num_bigint::BigUint;
use num_traits::One;
use std::sync::OnceLock;

use crate::{Error, Result};

/// Bernoulli/Euler recurrences are only run for primes up to this bound.
/// The classical O(p^2) recurrences are the certifiably-correct path and the
/// audit suites never need the constants beyond it.
pub const CONSTANT_PRIME_CAP: u64 = 2_000;

/// A residue `value` modulo an odd prime `prime`, with `0 <= value < prime`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Residue {
    pub value: u64,
    pub prime: u64,
}

impl Residue {
    pub fn new(value: u64, prime: u64) -> Self {
        Residue { value: value % prime, prime }
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Modular inverse by extended gcd; `a` must be coprime to `m`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// All primes `<= limit` by a plain sieve of Eratosthenes.
pub fn sieve_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Odd primes in `[lo, hi]`, ascending.
pub fn odd_primes_in(lo: u64, hi: u64) -> Vec<u64> {
    sieve_primes(hi)
        .into_iter()
        .filter(|&p| p >= lo.max(3))
        .collect()
}

pub fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Inverse table for an odd prime: `result[n] * n == 1 (mod p)` for
/// `1 <= n < p`. Built in O(p) via `inv[n] = -(p / n) * inv[p % n]`.
/// Index 0 is unused and set to 0.
pub fn inv_table(p: u64) -> Result<Vec<u64>> {
    if !is_odd_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let n = p as usize;
    let mut inv = vec![0u64; n];
    inv[1] = 1;
    for i in 2..n {
        let q = p / i as u64;
        inv[i] = mul_mod(p - q, inv[(p % i as u64) as usize], p);
    }
    Ok(inv)
}

/// Per-prime context: the inverse table plus lazily-built caches of
/// Bernoulli and Euler numbers mod p.
pub struct PrimeContext {
    p: u64,
    inv: Vec<u64>,
    bernoulli: OnceLock<Vec<u64>>,
    euler: OnceLock<Vec<u64>>,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self> {
        Ok(PrimeContext {
            p,
            inv: inv_table(p)?,
            bernoulli: OnceLock::new(),
            euler: OnceLock::new(),
        })
    }

    #[inline]
    pub fn prime(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn inv(&self, n: u64) -> u64 {
        self.inv[(n % self.p) as usize]
    }

    #[inline]
    pub fn inv_table(&self) -> &[u64] {
        &self.inv
    }

    /// Reduce a signed rational `num/den` mod p. Fails if p divides `den`.
    pub fn reduce_fraction(&self, num: i64, den: u64) -> Result<u64> {
        if den % self.p == 0 {
            return Err(Error::DenominatorDivisible(self.p));
        }
        let p = self.p;
        let n = (num.rem_euclid(p as i64)) as u64;
        Ok(mul_mod(n, self.inv(den), p))
    }

    fn bernoulli_table(&self) -> Result<&[u64]> {
        if self.p > CONSTANT_PRIME_CAP {
            return Err(Error::Invalid(format!(
                "Bernoulli recurrence capped at primes <= {CONSTANT_PRIME_CAP}, got {}",
                self.p
            )));
        }
        Ok(self.bernoulli.get_or_init(|| {
            // B_n = -inv(n+1) * sum_{k<n} C(n+1, k) B_k, all mod p, n <= p-3.
            let p = self.p;
            let top = (p - 3) as usize;
            let (fact, inv_fact) = self.factorials(top + 2);
            let binom = |n: usize, k: usize| {
                mul_mod(fact[n], mul_mod(inv_fact[k], inv_fact[n - k], p), p)
            };
            let mut b = vec![0u64; top + 1];
            b[0] = 1;
            for n in 1..=top {
                let mut acc = 0u64;
                for k in 0..n {
                    if b[k] != 0 {
                        acc = add_mod(acc, mul_mod(binom(n + 1, k), b[k], p), p);
                    }
                }
                b[n] = mul_mod(sub_mod(0, acc, p), self.inv((n + 1) as u64), p);
            }
            b
        }))
    }

    fn euler_table(&self) -> Result<&[u64]> {
        if self.p > CONSTANT_PRIME_CAP {
            return Err(Error::Invalid(format!(
                "Euler recurrence capped at primes <= {CONSTANT_PRIME_CAP}, got {}",
                self.p
            )));
        }
        Ok(self.euler.get_or_init(|| {
            // Secant numbers: E_0 = 1, sum_{k=0}^{m} C(2m, 2k) E_{2k} = 0.
            let p = self.p;
            let top = ((p - 3) / 2) as usize;
            let (fact, inv_fact) = self.factorials(2 * top + 1);
            let binom = |n: usize, k: usize| {
                mul_mod(fact[n], mul_mod(inv_fact[k], inv_fact[n - k], p), p)
            };
            let mut e = vec![0u64; top + 1];
            e[0] = 1;
            for m in 1..=top {
                let mut acc = 0u64;
                for k in 0..m {
                    acc = add_mod(acc, mul_mod(binom(2 * m, 2 * k), e[k], p), p);
                }
                e[m] = sub_mod(0, acc, p);
            }
            e
        }))
    }

    fn factorials(&self, upto: usize) -> (Vec<u64>, Vec<u64>) {
        let p = self.p;
        debug_assert!((upto as u64) < p);
        let mut fact = vec![1u64; upto + 1];
        for i in 1..=upto {
            fact[i] = mul_mod(fact[i - 1], i as u64, p);
        }
        let mut inv_fact = vec![1u64; upto + 1];
        inv_fact[upto] = inv_mod(fact[upto], p).expect("factorial coprime to p");
        for i in (1..=upto).rev() {
            inv_fact[i - 1] = mul_mod(inv_fact[i], i as u64, p);
        }
        (fact, inv_fact)
    }

    /// Bernoulli number `B_n` mod p for `0 <= n <= p-3`.
    pub fn bernoulli(&self, n: u64) -> Result<Residue> {
        if n + 3 > self.p {
            return Err(Error::IndexOutOfRange {
                p: self.p,
                n,
                reason: "n > p-3: denominator of B_n may be divisible by p",
            });
        }
        let t = self.bernoulli_table()?;
        Ok(Residue { value: t[n as usize], prime: self.p })
    }

    /// Euler (secant) number `E_n` mod p for even `0 <= n <= p-3`.
    pub fn euler_number(&self, n: u64) -> Result<Residue> {
        if n % 2 != 0 {
            return Err(Error::IndexOutOfRange {
                p: self.p,
                n,
                reason: "odd-index Euler numbers are not defined here",
            });
        }
        if n + 3 > self.p {
            return Err(Error::IndexOutOfRange { p: self.p, n, reason: "n > p-3" });
        }
        let t = self.euler_table()?;
        Ok(Residue { value: t[(n / 2) as usize], prime: self.p })
    }

    /// `beta_w = B_{p-w} / w` mod p, the finite analog of zeta(w).
    /// Requires `p > w + 2`; zero for even `w` (odd-index Bernoulli).
    pub fn beta(&self, w: u64) -> Result<Residue> {
        if w < 2 {
            return Err(Error::Invalid(format!("beta needs w >= 2, got {w}")));
        }
        // Odd w needs p - w <= p - 3 to be an even computable index, i.e.
        // p >= w + 2; even w needs p - w odd >= 3, i.e. p >= w + 3.
        let min_p = if w % 2 == 1 { w + 2 } else { w + 3 };
        if self.p < min_p {
            return Err(Error::IndexOutOfRange {
                p: self.p,
                n: w,
                reason: "prime too small for beta_w",
            });
        }
        if w % 2 == 0 {
            // p - w is odd and >= 3, so B_{p-w} = 0.
            return Ok(Residue { value: 0, prime: self.p });
        }
        let b = self.bernoulli(self.p - w)?;
        Ok(Residue {
            value: mul_mod(b.value, self.inv(w), self.p),
            prime: self.p,
        })
    }

    /// Fermat quotient `q_2 = (2^{p-1} - 1) / p` mod p, by exact integer
    /// arithmetic (the mod-p^2 exponentiation is the verification path,
    /// see [`fermat_quotient_modsq`]).
    pub fn fermat_quotient(&self) -> Residue {
        let p = self.p;
        let pow = BigUint::from(2u32).pow((p - 1) as u32) - BigUint::one();
        let q = pow / BigUint::from(p);
        let r = q % BigUint::from(p);
        Residue {
            value: r.iter_u64_digits().next().unwrap_or(0),
            prime: p,
        }
    }

    /// Finite Catalan constant `G = E_{p-3} / 2` mod p, for p >= 5.
    pub fn finite_catalan(&self) -> Result<Residue> {
        if self.p < 5 {
            return Err(Error::Invalid("finite Catalan constant needs p >= 5".into()));
        }
        let e = self.euler_number(self.p - 3)?;
        Ok(Residue {
            value: mul_mod(e.value, self.inv(2), self.p),
            prime: self.p,
        })
    }

    /// The twist `t = (-1)^{(p-1)/2}` as a residue.
    pub fn twist(&self) -> u64 {
        if (self.p - 1) / 2 % 2 == 0 {
            1
        } else {
            self.p - 1
        }
    }
}

/// Fermat quotient computed via exponentiation mod p^2: the independent
/// verification route for [`PrimeContext::fermat_quotient`].
pub fn fermat_quotient_modsq(p: u64) -> Result<u64> {
    if !is_odd_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let psq = p * p;
    let r = pow_mod(2, p - 1, psq);
    // r == 1 + q*p (mod p^2) by Fermat's little theorem.
    Ok(((r - 1) / p) % p)
}

/// All Wieferich-type exceptions in a residue class: primes `p <= limit`
/// with `p == a (mod m)` and vanishing Fermat quotient.
pub fn wieferich_scan(limit: u64, m: u64, a: u64) -> Result<Vec<u64>> {
    if num_integer::gcd(m, a) != 1 {
        return Err(Error::Invalid(format!(
            "residue class {a} mod {m} is not coprime"
        )));
    }
    let mut hits = Vec::new();
    for p in odd_primes_in(3, limit) {
        if p % m != a % m {
            continue;
        }
        if fermat_quotient_modsq(p)? == 0 {
            hits.push(p);
        }
    }
    Ok(hits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_rational::BigRational;
    use num_traits::{FromPrimitive, One, Zero};

    #[test]
    fn inv_table_examples() {
        let t7 = inv_table(7).unwrap();
        assert_eq!(t7[3], 5);
        assert_eq!(t7[1], 1);
        let t5 = inv_table(5).unwrap();
        assert_eq!(t5[2], 3);
    }

    #[test]
    fn inv_table_rejects_bad_input() {
        assert!(inv_table(2).is_err());
        assert!(inv_table(9).is_err());
    }

    #[test]
    fn inv_table_property() {
        for p in [3u64, 5, 7, 11, 101, 997] {
            let t = inv_table(p).unwrap();
            for n in 1..p {
                assert_eq!(mul_mod(t[n as usize], n, p), 1, "p={p} n={n}");
            }
        }
    }

    /// Exact rational Bernoulli numbers by the same recurrence over Q:
    /// the independent oracle for the mod-p table.
    fn bernoulli_exact(upto: usize) -> Vec<BigRational> {
        let mut b = vec![BigRational::zero(); upto + 1];
        b[0] = BigRational::one();
        for n in 1..=upto {
            let mut acc = BigRational::zero();
            let mut c = BigInt::one(); // C(n+1, k)
            for (k, bk) in b.iter().enumerate().take(n) {
                acc += BigRational::from(c.clone()) * bk;
                c = c * BigInt::from(n + 1 - k) / BigInt::from(k + 1);
            }
            b[n] = -acc / BigRational::from_i64(n as i64 + 1).unwrap();
        }
        b
    }

    fn reduce_rational(q: &BigRational, p: u64) -> u64 {
        let num = q.numer().mod_floor(&BigInt::from(p));
        let den = q.denom().mod_floor(&BigInt::from(p));
        let num: u64 = num.try_into().unwrap();
        let den: u64 = den.try_into().unwrap();
        mul_mod(num, inv_mod(den, p).unwrap(), p)
    }

    #[test]
    fn bernoulli_examples() {
        let c5 = PrimeContext::new(5).unwrap();
        assert_eq!(c5.bernoulli(0).unwrap().value, 1);
        // B_2 = 1/6, 6 == 1 mod 5
        assert_eq!(c5.bernoulli(2).unwrap().value, 1);
        let c7 = PrimeContext::new(7).unwrap();
        // B_4 = -1/30: 30 == 2, -inv(2) = -4 == 3 mod 7
        assert_eq!(c7.bernoulli(4).unwrap().value, 3);
        assert_eq!(c7.bernoulli(3).unwrap().value, 0);
        assert!(c5.bernoulli(3).is_err()); // 3 > 5-3
        assert!(c7.bernoulli(5).is_err()); // 5 > 7-3
    }

    #[test]
    fn bernoulli_matches_exact_recurrence() {
        let exact = bernoulli_exact(20);
        for p in [23u64, 29, 97] {
            let ctx = PrimeContext::new(p).unwrap();
            for n in 0..=20u64 {
                assert_eq!(
                    ctx.bernoulli(n).unwrap().value,
                    reduce_rational(&exact[n as usize], p),
                    "B_{n} mod {p}"
                );
            }
        }
    }

    #[test]
    fn bernoulli_odd_indices_vanish() {
        for p in [11u64, 53, 199] {
            let ctx = PrimeContext::new(p).unwrap();
            let mut n = 3;
            while n <= p - 3 {
                assert_eq!(ctx.bernoulli(n).unwrap().value, 0, "B_{n} mod {p}");
                n += 2;
            }
        }
    }

    #[test]
    fn beta_examples() {
        let c7 = PrimeContext::new(7).unwrap();
        assert_eq!(c7.beta(3).unwrap().value, 1);
        let c5 = PrimeContext::new(5).unwrap();
        assert_eq!(c5.beta(3).unwrap().value, 2);
        for p in [7u64, 11, 13, 31] {
            let ctx = PrimeContext::new(p).unwrap();
            assert_eq!(ctx.beta(4).unwrap().value, 0, "beta_4 mod {p}");
        }
        assert!(c5.beta(3).is_ok());
        assert!(c5.beta(4).is_err()); // p <= w + 2
    }

    #[test]
    fn fermat_quotient_examples() {
        for (p, q) in [(3u64, 1u64), (5, 3), (7, 2)] {
            let ctx = PrimeContext::new(p).unwrap();
            assert_eq!(ctx.fermat_quotient().value, q, "q2({p})");
        }
    }

    #[test]
    fn fermat_quotient_agrees_with_modsq() {
        for p in odd_primes_in(3, 10_000) {
            let ctx = PrimeContext::new(p).unwrap();
            assert_eq!(
                ctx.fermat_quotient().value,
                fermat_quotient_modsq(p).unwrap(),
                "p={p}"
            );
        }
    }

    /// First secant Euler numbers as exact integers (E_0, E_2, ..., E_20),
    /// computed independently below and used to pin the mod-p recurrence.
    fn euler_exact(upto_m: usize) -> Vec<BigInt> {
        let mut e = vec![BigInt::zero(); upto_m + 1];
        e[0] = BigInt::one();
        for m in 1..=upto_m {
            let mut acc = BigInt::zero();
            for k in 0..m {
                // C(2m, 2k)
                let mut c = BigInt::one();
                for i in 0..2 * k {
                    c = c * BigInt::from(2 * m - i) / BigInt::from(i + 1);
                }
                acc += c * &e[k];
            }
            e[m] = -acc;
        }
        e
    }

    #[test]
    fn euler_number_examples() {
        let c7 = PrimeContext::new(7).unwrap();
        assert_eq!(c7.euler_number(0).unwrap().value, 1);
        assert_eq!(c7.euler_number(2).unwrap().value, 6); // E_2 = -1
        assert_eq!(c7.euler_number(4).unwrap().value, 5); // E_4 = 5
        assert!(c7.euler_number(3).is_err());
    }

    #[test]
    fn euler_numbers_match_exact_integers() {
        let exact = euler_exact(10);
        assert_eq!(exact[1], BigInt::from(-1));
        assert_eq!(exact[2], BigInt::from(5));
        assert_eq!(exact[3], BigInt::from(-61));
        assert_eq!(exact[4], BigInt::from(1385));
        for p in [29u64, 101] {
            let ctx = PrimeContext::new(p).unwrap();
            for m in 0..=10u64 {
                let want = exact[m as usize].mod_floor(&BigInt::from(p));
                let want: u64 = want.try_into().unwrap();
                assert_eq!(ctx.euler_number(2 * m).unwrap().value, want, "E_{} mod {p}", 2 * m);
            }
        }
    }

    #[test]
    fn finite_catalan_examples() {
        // E_4/2 = 5 * inv(2) = 5*4 = 20 == 6 mod 7
        let c7 = PrimeContext::new(7).unwrap();
        assert_eq!(c7.finite_catalan().unwrap().value, 6);
        // E_2/2 = -1 * inv(2) = -3 == 2 mod 5 (confirmed by the exact
        // integer recurrence above: E_2 = -1).
        let c5 = PrimeContext::new(5).unwrap();
        assert_eq!(c5.finite_catalan().unwrap().value, 2);
        assert!(PrimeContext::new(3).unwrap().finite_catalan().is_err());
    }

    #[test]
    fn wieferich_scan_examples() {
        assert_eq!(wieferich_scan(10_000, 1, 1).unwrap(), vec![1093, 3511]);
        assert_eq!(wieferich_scan(1_000, 4, 1).unwrap(), Vec::<u64>::new());
        assert_eq!(wieferich_scan(10_000, 4, 3).unwrap(), vec![3511]);
        assert!(wieferich_scan(100, 4, 2).is_err());
    }

    #[test]
    fn depth1_alternating_harmonic_cross_check() {
        // (1/2) * sum_{n=1}^{p-1} (-1)^n n^{-s} == (2^{1-s} - 1) * beta_s
        // for odd s >= 3: direct harmonic sum vs the Bernoulli route.
        for p in odd_primes_in(5, 300) {
            let ctx = PrimeContext::new(p).unwrap();
            for s in [3u64, 5, 7, 9] {
                if p <= s + 2 {
                    continue;
                }
                let mut acc = 0u64;
                for n in 1..p {
                    let term = pow_mod(ctx.inv(n), s, p);
                    if n % 2 == 1 {
                        acc = sub_mod(acc, term, p);
                    } else {
                        acc = add_mod(acc, term, p);
                    }
                }
                let lhs = mul_mod(acc, ctx.inv(2), p);
                // 2^{1-s} - 1 = inv(2^{s-1}) - 1
                let coeff = sub_mod(pow_mod(ctx.inv(2), s - 1, p), 1, p);
                let rhs = mul_mod(coeff, ctx.beta(s).unwrap().value, p);
                assert_eq!(lhs, rhs, "p={p} s={s}");
            }
        }
    }

    #[test]
    fn twist_sign() {
        assert_eq!(PrimeContext::new(5).unwrap().twist(), 1);
        assert_eq!(PrimeContext::new(7).unwrap().twist(), 6);
        assert_eq!(PrimeContext::new(13).unwrap().twist(), 1);
    }

    #[test]
    fn residue_is_reduced() {
        let r = Residue::new(12, 7);
        assert_eq!(r.value, 5);
    }

}
