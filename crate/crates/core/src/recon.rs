//! Exact reconstruction machinery: CRT lifting, rational reconstruction,
//! and a small integer lattice reduction powering the rational-coefficient
//! fitter.
//!
//! The fitter answers: is there a rational vector `c` with
//! `sum_i c_i * basis_i(p) == target(p) (mod p)` for every prime in a range?
//! All the per-prime congruences are folded by CRT into one congruence mod
//! `M = prod p`, a candidate is pulled out of the resulting lattice, and the
//! candidate is then verified at every prime again — so a returned fit is
//! exact over the whole range, never a heuristic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::modint::{add_mod, mul_mod};
use crate::{Error, Result};

/// CRT-combine residues `(prime, value)` with pairwise-coprime primes into
/// `(value mod M, M)`.
pub fn crt(entries: &[(u64, u64)]) -> (BigInt, BigInt) {
    let mut value = BigInt::zero();
    let mut modulus = BigInt::one();
    for &(p, r) in entries {
        let p = BigInt::from(p);
        let r = BigInt::from(r);
        // value + modulus * k == r (mod p)
        let inv = mod_inverse(&modulus, &p).expect("primes pairwise coprime");
        let k = ((&r - &value) * inv).mod_floor(&p);
        value += &modulus * k;
        modulus *= p;
    }
    (value, modulus)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Wang's rational reconstruction: the unique `n/d` with
/// `n == r*d (mod m)`, `|n| <= sqrt(m/2)`, `0 < d <= sqrt(m/2)`,
/// `gcd(d, m) = 1`, if it exists.
pub fn rational_reconstruct(r: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), r.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    if t1.is_negative() {
        r1 = -r1;
        t1 = -t1;
    }
    if !t1.gcd(m).is_one() || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn round_nearest(r: &BigRational) -> BigInt {
    (r + BigRational::new(BigInt::one(), BigInt::from(2))).floor().to_integer()
}


/// All-integer LLL (delta = 3/4) maintaining the scaled Gram–Schmidt data
/// `d[i] = det Gram(b_1..b_i)` and `lambda[i][j] = d[j+1] * mu[i][j]`, so no
/// rational arithmetic appears in the hot loop. Requires independent rows.
pub fn lll(basis: &mut Vec<Vec<BigInt>>) {
    let n = basis.len();
    if n < 2 {
        return;
    }
    // d[0] = 1, d[i+1] = det Gram(b_0..b_i); lambda[i][j] for j < i
    let mut d: Vec<BigInt> = vec![BigInt::one(); n + 1];
    let mut lambda = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut u = dot(&basis[i], &basis[j]);
            for l in 0..j {
                u = (&d[l + 1] * &u - &lambda[i][l] * &lambda[j][l]) / &d[l];
            }
            if j < i {
                lambda[i][j] = u;
            } else {
                assert!(!u.is_zero(), "lattice basis must be independent");
                d[i + 1] = u;
            }
        }
    }

    // b_k -= round(lambda[k][l]/d[l+1]) * b_l
    let redi = |basis: &mut Vec<Vec<BigInt>>,
                lambda: &mut Vec<Vec<BigInt>>,
                d: &Vec<BigInt>,
                k: usize,
                l: usize| {
        let two_l: BigInt = &lambda[k][l] * 2;
        if two_l.abs() > d[l + 1] {
            let q = round_nearest(&BigRational::new(lambda[k][l].clone(), d[l + 1].clone()));
            let bl = basis[l].clone();
            for (x, y) in basis[k].iter_mut().zip(&bl) {
                *x -= &q * y;
            }
            let shift = &q * &d[l + 1];
            lambda[k][l] -= shift;
            for i in 0..l {
                let shift = &q * &lambda[l][i];
                lambda[k][i] -= shift;
            }
        }
    };

    let mut k = 1usize;
    while k < n {
        redi(basis, &mut lambda, &d, k, k - 1);
        let lam = lambda[k][k - 1].clone();
        if &BigInt::from(4) * (&d[k - 1] * &d[k + 1] + &lam * &lam) < &BigInt::from(3) * &d[k] * &d[k] {
            // swap b_k and b_{k-1}, updating the integer GSO data
            basis.swap(k, k - 1);
            for j in 0..k.saturating_sub(1) {
                let tmp = lambda[k][j].clone();
                lambda[k][j] = lambda[k - 1][j].clone();
                lambda[k - 1][j] = tmp;
            }
            let b = (&d[k - 1] * &d[k + 1] + &lam * &lam) / &d[k];
            for i in k + 1..n {
                let t = lambda[i][k].clone();
                lambda[i][k] = (&lambda[i][k - 1] * &d[k + 1] - &lam * &t) / &d[k];
                lambda[i][k - 1] = (&b * &t + &lam * &lambda[i][k]) / &d[k + 1];
            }
            d[k] = b;
            k = k.max(2) - 1;
        } else {
            for l in (0..k.saturating_sub(1)).rev() {
                redi(basis, &mut lambda, &d, k, l);
            }
            k += 1;
        }
    }
}

/// Outcome of a residue fit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FitOutcome {
    Fit(Vec<BigRational>),
    NoFit { first_violation: u64 },
}

/// First prime where `sum c_i basis_i != target`, if any. Primes dividing a
/// coefficient denominator are skipped (the combination is not testable
/// there), mirroring the evaluator's divisible-denominator marker.
pub fn verify_fit(
    coeffs: &[BigRational],
    primes: &[u64],
    target: &[u64],
    basis: &[Vec<u64>],
) -> Option<u64> {
    'outer: for (col, &p) in primes.iter().enumerate() {
        let pb = BigInt::from(p);
        let mut acc = 0u64;
        for (c, row) in coeffs.iter().zip(basis) {
            let den = c.denom().mod_floor(&pb).to_u64().unwrap();
            if den == 0 {
                continue 'outer;
            }
            let num = c.numer().mod_floor(&pb).to_u64().unwrap();
            let inv = crate::modint::inv_mod(den, p).unwrap();
            acc = add_mod(acc, mul_mod(mul_mod(num, inv, p), row[col], p), p);
        }
        if acc != target[col] % p {
            return Some(p);
        }
    }
    None
}

/// Pull a candidate coefficient vector out of the CRT lattice built over a
/// prime subset. `None` when no plausibly short solution exists.
fn candidate(primes: &[u64], target: &[u64], basis: &[Vec<u64>]) -> Option<Vec<BigRational>> {
    let k = basis.len();
    if k == 0 {
        return Some(Vec::new());
    }
    let lifted: Vec<BigInt> = basis
        .iter()
        .map(|row| {
            let entries: Vec<(u64, u64)> = primes.iter().copied().zip(row.iter().copied()).collect();
            crt(&entries).0
        })
        .collect();
    let entries: Vec<(u64, u64)> = primes.iter().copied().zip(target.iter().copied()).collect();
    let (t_lift, m) = crt(&entries);

    // rows: (e_i | W*B_i), (e_k | -W*T), (0 | W*M); a short vector with last
    // coordinate 0 solves sum n_i B_i == d*T (mod M)
    let dim = k + 2;
    let w = m.clone();
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(dim);
    for (i, b) in lifted.iter().enumerate() {
        let mut row = vec![BigInt::zero(); dim];
        row[i] = BigInt::one();
        row[dim - 1] = &w * b;
        rows.push(row);
    }
    let mut trow = vec![BigInt::zero(); dim];
    trow[k] = BigInt::one();
    trow[dim - 1] = -&w * &t_lift;
    rows.push(trow);
    let mut mrow = vec![BigInt::zero(); dim];
    mrow[dim - 1] = &w * &m;
    rows.push(mrow);

    lll(&mut rows);

    // plausibility: a genuine fit is much shorter than a generic lattice
    // vector (~ M^{2/(k+2)}); require sup-norm^{k+2} <= M
    let mut best: Option<(BigInt, Vec<BigRational>)> = None;
    for v in &rows {
        if !v[dim - 1].is_zero() || v[k].is_zero() {
            continue;
        }
        let sup = v[..=k].iter().map(|x| x.abs()).max().unwrap();
        if sup.pow(dim as u32) > m {
            continue;
        }
        let norm = dot(v, v);
        if best.as_ref().map_or(true, |(n, _)| norm < *n) {
            let d = v[k].clone();
            let coeffs = v[..k]
                .iter()
                .map(|n| BigRational::new(n.clone(), d.clone()))
                .collect();
            best = Some((norm, coeffs));
        }
    }
    best.map(|(_, c)| c)
}

/// Fit `target` as an exact rational combination of `basis` across all
/// `primes` (each `basis[i]` and `target` aligned column-wise with `primes`).
/// Requires at least `basis.len() + 8` primes.
pub fn fit_residues(primes: &[u64], target: &[u64], basis: &[Vec<u64>]) -> Result<FitOutcome> {
    let k = basis.len();
    let required = k + 8;
    if primes.len() < required {
        return Err(Error::TooFewPrimes {
            required,
            got: primes.len(),
        });
    }
    debug_assert!(target.len() == primes.len());
    debug_assert!(basis.iter().all(|r| r.len() == primes.len()));

    if k == 0 {
        return Ok(match verify_fit(&[], primes, target, basis) {
            None => FitOutcome::Fit(Vec::new()),
            Some(p) => FitOutcome::NoFit { first_violation: p },
        });
    }

    // cheap candidate from a prefix first, then progressively wider
    // lattices (the widest stage recovers tall-coefficient relations but
    // is only affordable while the lattice dimension stays small);
    // verification always runs over the full range
    let mut widths = vec![k + 12, k + 40];
    if k <= 24 {
        widths.push(k + 160);
    }
    let stages = widths
        .into_iter()
        .map(|n| primes.len().min(n))
        .collect::<Vec<_>>();
    let mut first_violation = None;
    let mut last_n = 0;
    for n in stages {
        if n == last_n {
            continue;
        }
        last_n = n;
        let cand = candidate(&primes[..n], &target[..n], &slice_cols(basis, n));
        if let Some(c) = cand {
            match verify_fit(&c, primes, target, basis) {
                None => return Ok(FitOutcome::Fit(c)),
                Some(p) => first_violation = Some(first_violation.map_or(p, |q: u64| q.min(p))),
            }
        }
    }
    Ok(FitOutcome::NoFit {
        first_violation: first_violation.unwrap_or(primes[0]),
    })
}

fn slice_cols(basis: &[Vec<u64>], n: usize) -> Vec<Vec<u64>> {
    basis.iter().map(|r| r[..n].to_vec()).collect()
}
