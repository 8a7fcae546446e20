//! Exact linear algebra: rational rank/kernel of sparse relation matrices
//! (multi-modular with exact fallback) and the "A-rank" of sampled value
//! matrices, where dependence means an exact rational combination holding
//! at every sampled prime.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::modint::{inv_mod, is_odd_prime, mul_mod};
use crate::recon::{fit_residues, FitOutcome};
use crate::relgen::{Node, RelationSystem};
use crate::{Error, Result};

/// Sparse matrix of exact rationals. No stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), BigRational>,
}

impl QMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        assert!(i < self.rows && j < self.cols, "entry out of bounds");
        if v.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), v);
        }
    }

    pub fn get(&self, i: usize, j: usize) -> BigRational {
        self.entries.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Self {
        let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
        let mut m = QMatrix::new(rows.len(), cols);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    /// Class-split relation matrix: rows = relations with coefficients
    /// specialized at `t`, columns = `nodes` (which must cover the system).
    pub fn from_relations(system: &RelationSystem, nodes: &[Node], t: i8) -> Result<Self> {
        let index: BTreeMap<&Node, usize> = nodes.iter().zip(0..).collect();
        let mut m = QMatrix::new(system.relations.len(), nodes.len());
        for (i, rel) in system.relations.iter().enumerate() {
            for (node, coeff) in &rel.terms {
                let j = *index.get(node).ok_or_else(|| {
                    Error::Invalid(format!("node {node} missing from column universe"))
                })?;
                m.set(i, j, coeff.specialize(t));
            }
        }
        Ok(m)
    }

    fn sparse_rows(&self) -> Vec<Vec<(usize, &BigRational)>> {
        let mut rows = vec![Vec::new(); self.rows];
        for (&(i, j), v) in &self.entries {
            rows[i].push((j, v));
        }
        rows
    }

    /// Rows reduced mod `p`; `None` when a denominator vanishes mod `p`.
    fn rows_mod(&self, p: u64) -> Option<Vec<Vec<(usize, u64)>>> {
        let pb = BigInt::from(p);
        let mut rows = vec![Vec::new(); self.rows];
        for (&(i, j), v) in &self.entries {
            let den = v.denom().mod_floor(&pb).to_u64().unwrap();
            let inv = inv_mod(den, p)?;
            let num = v.numer().mod_floor(&pb).to_u64().unwrap();
            let e = mul_mod(num, inv, p);
            if e != 0 {
                rows[i].push((j, e));
            }
        }
        Some(rows)
    }

    /// TSV of `num/den` entries, dense, one row per line.
    pub fn export_tsv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            let line: Vec<String> = (0..self.cols)
                .map(|j| {
                    let v = self.get(i, j);
                    format!("{}/{}", v.numer(), v.denom())
                })
                .collect();
            let _ = writeln!(out, "{}", line.join("\t"));
        }
        out
    }

    pub fn import_tsv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for line in text.lines() {
            if line.trim().is_empty() {
                continue;
            }
            let mut row = Vec::new();
            for field in line.split('\t') {
                let (num, den) = field
                    .split_once('/')
                    .ok_or_else(|| Error::Invalid(format!("bad rational {field:?}")))?;
                let num: BigInt = num
                    .trim()
                    .parse()
                    .map_err(|_| Error::Invalid(format!("bad numerator {num:?}")))?;
                let den: BigInt = den
                    .trim()
                    .parse()
                    .map_err(|_| Error::Invalid(format!("bad denominator {den:?}")))?;
                if den.is_zero() {
                    return Err(Error::Invalid("zero denominator".into()));
                }
                row.push(BigRational::new(num, den));
            }
            rows.push(row);
        }
        let cols = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Invalid("ragged matrix".into()));
        }
        let mut m = QMatrix::from_rows(rows);
        m.cols = cols.max(m.cols);
        Ok(m)
    }
}

/// Rank primes are taken just under 2^21 so that a full elimination pass
/// can accumulate products in u64 without intermediate reduction
/// (values stay below cols * p^2 < 2^55).
fn rank_primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut p = (1u64 << 21) - 1;
    while out.len() < count {
        if is_odd_prime(p) {
            out.push(p);
        }
        p -= 2;
    }
    out
}

/// Incremental row-echelon state mod `p`: pivot rows are kept dense and
/// normalized with leading entry 1, indexed by pivot column. Feeding rows
/// one at a time lets callers extend a finished elimination cheaply.
pub struct ModEchelon {
    p: u64,
    cols: usize,
    pivots: Vec<Option<Vec<u64>>>,
    rank: usize,
}

impl ModEchelon {
    pub fn new(p: u64, cols: usize) -> Self {
        assert!(p < 1 << 21, "rank primes must fit the overflow budget");
        ModEchelon {
            p,
            cols,
            pivots: vec![None; cols],
            rank: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Reduce one sparse row; returns true when it added a new pivot.
    pub fn absorb(&mut self, row: &[(usize, u64)]) -> bool {
        let p = self.p;
        let mut dense = vec![0u64; self.cols];
        for &(j, v) in row {
            dense[j] = v % p;
        }
        for j in 0..self.cols {
            let c = dense[j] % p;
            if c == 0 {
                continue;
            }
            match &self.pivots[j] {
                Some(pr) => {
                    for (slot, &pv) in dense[j..].iter_mut().zip(&pr[j..]) {
                        *slot += c * (p - pv);
                    }
                }
                None => {
                    let inv = inv_mod(c, p).expect("prime modulus");
                    let mut pr = vec![0u64; self.cols];
                    for (slot, &v) in pr[j..].iter_mut().zip(&dense[j..]) {
                        *slot = mul_mod(v % p, inv, p);
                    }
                    self.pivots[j] = Some(pr);
                    self.rank += 1;
                    return true;
                }
            }
        }
        false
    }
}

fn rank_mod(rows: &[Vec<(usize, u64)>], cols: usize, p: u64) -> usize {
    let mut ech = ModEchelon::new(p, cols);
    for row in rows {
        ech.absorb(row);
    }
    ech.rank()
}

/// Exact rank by fraction-free (Bareiss) elimination on the
/// denominator-cleared integer matrix.
pub fn exact_rank(m: &QMatrix) -> usize {
    let mut a: Vec<Vec<BigInt>> = m
        .sparse_rows()
        .iter()
        .map(|row| {
            let mut lcm = BigInt::one();
            for (_, v) in row {
                lcm = lcm.lcm(v.denom());
            }
            let mut dense = vec![BigInt::zero(); m.cols];
            for (j, v) in row {
                dense[*j] = v.numer() * (&lcm / v.denom());
            }
            dense
        })
        .collect();
    let (rows, cols) = (a.len(), m.cols);
    let mut rank = 0;
    let mut prev = BigInt::one();
    let mut col = 0;
    while rank < rows && col < cols {
        let Some(pivot) = (rank..rows).find(|&i| !a[i][col].is_zero()) else {
            col += 1;
            continue;
        };
        a.swap(rank, pivot);
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let v = (&a[rank][col] * &a[i][j] - &a[i][col] * &a[rank][j]) / &prev;
                a[i][j] = v;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
        col += 1;
    }
    rank
}

/// Rank over Q: reductions modulo two 21-bit primes must agree, with
/// exact fraction-free elimination as the tie-breaker; primes dividing a
/// stored denominator are skipped.
pub fn rank_q(m: &QMatrix) -> usize {
    let mut found = Vec::new();
    for p in rank_primes(8) {
        let Some(rows) = m.rows_mod(p) else { continue };
        found.push((p, rows));
        if found.len() == 2 {
            break;
        }
    }
    if found.len() < 2 {
        return exact_rank(m);
    }
    let ranks: Vec<usize> = found
        .par_iter()
        .map(|(p, rows)| rank_mod(rows, m.cols, *p))
        .collect();
    if ranks[0] == ranks[1] {
        ranks[0]
    } else {
        exact_rank(m)
    }
}

/// Rank of the relation matrix together with the increments contributed by
/// unit rows on `unit_cols`, computed in one elimination per prime:
/// returns `(rank(M), rank(M with unit rows appended))`.
pub fn rank_with_units(m: &QMatrix, unit_cols: &[usize]) -> (usize, usize) {
    let compute = |p: u64, rows: &[Vec<(usize, u64)>]| {
        let mut ech = ModEchelon::new(p, m.cols);
        for row in rows {
            ech.absorb(row);
        }
        let base = ech.rank();
        for &j in unit_cols {
            ech.absorb(&[(j, 1)]);
        }
        (base, ech.rank())
    };
    let mut found = Vec::new();
    for p in rank_primes(8) {
        let Some(rows) = m.rows_mod(p) else { continue };
        found.push((p, rows));
        if found.len() == 2 {
            break;
        }
    }
    assert!(found.len() == 2, "no usable rank primes");
    let results: Vec<(usize, usize)> = found
        .par_iter()
        .map(|(p, rows)| compute(*p, rows))
        .collect();
    if results[0] == results[1] {
        return results[0];
    }
    // exact tie-breaker
    let base = exact_rank(m);
    let mut ext = m.clone();
    let start = ext.rows;
    ext.rows += unit_cols.len();
    for (k, &j) in unit_cols.iter().enumerate() {
        ext.set(start + k, j, BigRational::one());
    }
    (base, exact_rank(&ext))
}

/// Exact rational kernel basis; each vector is re-checked against the
/// matrix before being returned.
pub fn kernel_q(m: &QMatrix) -> Vec<Vec<BigRational>> {
    // reduced row echelon over Q
    let mut a: Vec<Vec<BigRational>> = m
        .sparse_rows()
        .iter()
        .map(|row| {
            let mut dense = vec![BigRational::zero(); m.cols];
            for (j, v) in row {
                dense[*j] = (*v).clone();
            }
            dense
        })
        .collect();
    let rows = a.len();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for col in 0..m.cols {
        let Some(pivot) = (r..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, pivot);
        let lead = a[r][col].clone();
        for v in &mut a[r] {
            *v /= &lead;
        }
        for i in 0..rows {
            if i != r && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in 0..m.cols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        pivot_cols.push(col);
        r += 1;
        if r == rows {
            break;
        }
    }
    let mut basis = Vec::new();
    let pivot_set: Vec<Option<usize>> = {
        let mut v = vec![None; m.cols];
        for (row, &col) in pivot_cols.iter().enumerate() {
            v[col] = Some(row);
        }
        v
    };
    for free in 0..m.cols {
        if pivot_set[free].is_some() {
            continue;
        }
        let mut vec_ = vec![BigRational::zero(); m.cols];
        vec_[free] = BigRational::one();
        for (col, slot) in pivot_set.iter().enumerate() {
            if let Some(row) = slot {
                vec_[col] = -a[*row][free].clone();
            }
        }
        // exact re-check
        for row in m.sparse_rows() {
            let mut acc = BigRational::zero();
            for (j, v) in row {
                acc += v * &vec_[j];
            }
            assert!(acc.is_zero(), "kernel vector failed verification");
        }
        basis.push(vec_);
    }
    basis
}

/// Sampled residues: rows = symbols, columns = primes, least-nonnegative
/// entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueMatrix {
    pub labels: Vec<String>,
    pub primes: Vec<u64>,
    pub values: Vec<Vec<u64>>,
}

impl ValueMatrix {
    pub fn new(labels: Vec<String>, primes: Vec<u64>, values: Vec<Vec<u64>>) -> Result<Self> {
        if values.len() != labels.len() {
            return Err(Error::Invalid("row/label count mismatch".into()));
        }
        for row in &values {
            if row.len() != primes.len() {
                return Err(Error::Invalid("row/prime count mismatch".into()));
            }
            for (&v, &p) in row.iter().zip(&primes) {
                if v >= p {
                    return Err(Error::Invalid(format!("entry {v} not reduced mod {p}")));
                }
            }
        }
        Ok(ValueMatrix {
            labels,
            primes,
            values,
        })
    }

    /// Restrict to the first `n` prime columns.
    pub fn prefix(&self, n: usize) -> ValueMatrix {
        ValueMatrix {
            labels: self.labels.clone(),
            primes: self.primes[..n].to_vec(),
            values: self.values.iter().map(|r| r[..n].to_vec()).collect(),
        }
    }

    /// TSV with a header row of primes; data rows are label + residues.
    pub fn export_tsv(&self) -> String {
        let mut out = String::from("symbol");
        for p in &self.primes {
            let _ = write!(out, "\t{p}");
        }
        out.push('\n');
        for (label, row) in self.labels.iter().zip(&self.values) {
            out.push_str(label);
            for v in row {
                let _ = write!(out, "\t{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn import_tsv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Invalid("empty matrix".into()))?;
        let primes: Vec<u64> = header
            .split('\t')
            .skip(1)
            .map(|f| f.trim().parse().map_err(|_| Error::Invalid(format!("bad prime {f:?}"))))
            .collect::<Result<_>>()?;
        let mut labels = Vec::new();
        let mut values = Vec::new();
        for line in lines {
            let mut fields = line.split('\t');
            labels.push(
                fields
                    .next()
                    .ok_or_else(|| Error::Invalid("missing label".into()))?
                    .to_string(),
            );
            values.push(
                fields
                    .map(|f| f.trim().parse().map_err(|_| Error::Invalid(format!("bad entry {f:?}"))))
                    .collect::<Result<Vec<u64>>>()?,
            );
        }
        ValueMatrix::new(labels, primes, values)
    }
}

/// Rank of the sampled value matrix "over A": a row is dependent iff an
/// exact rational combination of the previously independent rows matches
/// it at every sampled prime (found by CRT + lattice reduction, then
/// verified at all primes). Interpreted as a lower bound for the dimension
/// of the span.
pub fn rank_value_matrix(v: &ValueMatrix) -> Result<usize> {
    let required = 2 * v.labels.len() + 16;
    if v.primes.len() < required {
        return Err(Error::TooFewColumns {
            required,
            got: v.primes.len(),
        });
    }
    let mut basis: Vec<Vec<u64>> = Vec::new();
    for row in &v.values {
        if row.iter().all(|&x| x == 0) {
            continue;
        }
        match fit_residues(&v.primes, row, &basis)? {
            FitOutcome::Fit(_) => {}
            FitOutcome::NoFit { .. } => basis.push(row.clone()),
        }
    }
    Ok(basis.len())
}

/// One discovered rational relation among value-matrix rows:
/// `values[row] == sum coeffs[j] * values[basis_row_j]` at every sampled
/// prime. An all-zero row yields an empty coefficient list.
#[derive(Clone, Debug)]
pub struct KernelRelation {
    pub row: usize,
    pub coeffs: Vec<(usize, BigRational)>,
}

/// Rank of a value matrix together with the explicit dependent-row
/// relations discovered along the way.
#[derive(Clone, Debug)]
pub struct ValueKernel {
    pub rank: usize,
    pub independent: Vec<usize>,
    pub relations: Vec<KernelRelation>,
}

/// Like [`rank_value_matrix`] but also returns the fitted relation for
/// every dependent row, so each can be re-verified on held-out primes.
pub fn value_kernel(v: &ValueMatrix) -> Result<ValueKernel> {
    let required = 2 * v.labels.len() + 16;
    if v.primes.len() < required {
        return Err(Error::TooFewColumns {
            required,
            got: v.primes.len(),
        });
    }
    let mut independent: Vec<usize> = Vec::new();
    let mut basis: Vec<Vec<u64>> = Vec::new();
    let mut relations = Vec::new();
    for (i, row) in v.values.iter().enumerate() {
        if row.iter().all(|&x| x == 0) {
            relations.push(KernelRelation {
                row: i,
                coeffs: Vec::new(),
            });
            continue;
        }
        match fit_residues(&v.primes, row, &basis)? {
            FitOutcome::Fit(coeffs) => relations.push(KernelRelation {
                row: i,
                coeffs: independent.iter().copied().zip(coeffs).collect(),
            }),
            FitOutcome::NoFit { .. } => {
                independent.push(i);
                basis.push(row.clone());
            }
        }
    }
    Ok(ValueKernel {
        rank: independent.len(),
        independent,
        relations,
    })
}

/// Rank plus the stability-plateau verdict: the rank must be unchanged
/// when the last 25% of prime columns are withheld. `None` when the
/// 75% prefix is too small to satisfy the column precondition.
pub fn rank_value_matrix_plateau(v: &ValueMatrix) -> Result<(usize, Option<bool>)> {
    let rank = rank_value_matrix(v)?;
    let prefix_len = v.primes.len() * 3 / 4;
    if prefix_len < 2 * v.labels.len() + 16 {
        return Ok((rank, None));
    }
    let prefix_rank = rank_value_matrix(&v.prefix(prefix_len))?;
    Ok((rank, Some(prefix_rank == rank)))
}

/// Class-split ranks of a (possibly twisted) relation system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TwistedRank {
    /// rank of the t = +1 specialization
    pub plus: usize,
    /// rank of the t = -1 specialization
    pub minus: usize,
    /// dimension of the certified rational relation space, i.e. of the
    /// intersection of the two specialized row spans
    /// (= plus + minus - rank of the stacked system)
    pub certified: usize,
}

pub fn rank_twisted(system: &RelationSystem) -> Result<TwistedRank> {
    let nodes = system.nodes();
    let plus_m = QMatrix::from_relations(system, &nodes, 1)?;
    let minus_m = QMatrix::from_relations(system, &nodes, -1)?;
    let plus = rank_q(&plus_m);
    let minus = rank_q(&minus_m);
    let stacked = if system.relations.iter().any(|r| r.uses_twist()) {
        let mut m = QMatrix::new(plus_m.rows + minus_m.rows, nodes.len());
        for (&(i, j), v) in &plus_m.entries {
            m.set(i, j, v.clone());
        }
        for (&(i, j), v) in &minus_m.entries {
            m.set(plus_m.rows + i, j, v.clone());
        }
        rank_q(&m)
    } else {
        plus
    };
    Ok(TwistedRank {
        plus,
        minus,
        certified: plus + minus - stacked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::eval_comp_ctx;
    use crate::modint::{odd_primes_in, PrimeContext};
    use crate::relgen::{
        gen_alt_reversal, gen_linear_shuffle_es, gen_reversal, shuffle_inventory_es,
    };
    use crate::wordalg::{enumerate_compositions, parse_symbol, rat, ratio, Family, Word};
    use proptest::prelude::*;

    fn qm(rows: &[&[i64]]) -> QMatrix {
        QMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| rat(v)).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_q_basics() {
        assert_eq!(rank_q(&qm(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])), 3);
        assert_eq!(rank_q(&qm(&[&[1, 2, 3], &[2, 4, 6]])), 1);
        assert_eq!(rank_q(&QMatrix::new(0, 5)), 0);
        // scaling and permutation invariance
        let m = qm(&[&[2, 3], &[5, 7], &[7, 10]]);
        let mut scaled = m.clone();
        for j in 0..2 {
            let v = scaled.get(1, j) * ratio(3, 7);
            scaled.set(1, j, v);
        }
        assert_eq!(rank_q(&m), rank_q(&scaled));
    }

    #[test]
    fn weight3_es_shuffle_leaves_two_generators() {
        // depth-3 instances only: the system over the 8 signed weight-3
        // symbols of depth 3 (shuffle plus reversal rows)
        let mut sys = RelationSystem::default();
        for rel in shuffle_inventory_es(3, true) {
            if rel
                .terms
                .keys()
                .all(|n| matches!(n, Node::Sym(c) if c.depth() == 3))
            {
                sys.push(rel);
            }
        }
        let depth3: Vec<_> = enumerate_compositions(3, Family::Es, true)
            .into_iter()
            .filter(|c| c.depth() == 3)
            .collect();
        for c in &depth3 {
            sys.push(crate::relgen::gen_reversal_es(c).unwrap());
        }
        sys.dedup();
        let symbols: Vec<Node> = depth3.into_iter().map(Node::Sym).collect();
        assert_eq!(symbols.len(), 8);
        let m = QMatrix::from_relations(&sys, &symbols, 1).unwrap();
        assert_eq!(symbols.len() - rank_q(&m), 2);
    }

    #[test]
    fn kernel_basics() {
        assert!(kernel_q(&qm(&[&[1, 0], &[0, 1]])).is_empty());
        let k = kernel_q(&qm(&[&[1, 1]]));
        assert_eq!(k, vec![vec![rat(-1), rat(1)]]);
        let k = kernel_q(&qm(&[&[1, 2, 3]]));
        assert_eq!(k.len(), 2);
    }

    #[test]
    fn value_matrix_rank_examples() {
        // symbols {q2, t*q2}: rank 2
        let primes = odd_primes_in(5, 300);
        let mut rows = vec![Vec::new(), Vec::new()];
        for &p in &primes {
            let ctx = PrimeContext::new(p).unwrap();
            let q = ctx.fermat_quotient().value;
            rows[0].push(q);
            rows[1].push(mul_mod(q, ctx.twist(), p));
        }
        let vm = ValueMatrix::new(
            vec!["q2".into(), "t*q2".into()],
            primes.clone(),
            rows.clone(),
        )
        .unwrap();
        assert_eq!(rank_value_matrix(&vm).unwrap(), 2);

        // all-zero rows contribute nothing; duplicates fit with coefficient 1
        let vm = ValueMatrix::new(
            vec!["zero".into(), "q2".into(), "q2-again".into()],
            primes.clone(),
            vec![vec![0; primes.len()], rows[0].clone(), rows[0].clone()],
        )
        .unwrap();
        assert_eq!(rank_value_matrix(&vm).unwrap(), 1);

        // refuses with too few columns
        let short = odd_primes_in(5, 7);
        let err = rank_value_matrix(
            &ValueMatrix::new(vec!["q2".into()], short.clone(), vec![vec![0; short.len()]])
                .unwrap(),
        );
        assert!(matches!(err, Err(Error::TooFewColumns { required: 18, .. })));
    }

    #[test]
    fn weight3_t_value_rank_is_one() {
        let primes = odd_primes_in(7, 500);
        let comps = enumerate_compositions(3, Family::T, false);
        let mut values = Vec::new();
        let mut labels = Vec::new();
        for c in &comps {
            labels.push(c.symbol());
            values.push(
                primes
                    .iter()
                    .map(|&p| eval_comp_ctx(&PrimeContext::new(p).unwrap(), c).value)
                    .collect(),
            );
        }
        let vm = ValueMatrix::new(labels, primes, values).unwrap();
        let (rank, plateau) = rank_value_matrix_plateau(&vm).unwrap();
        assert_eq!(rank, 1);
        assert_eq!(plateau, Some(true));
    }

    #[test]
    fn weight4_value_kernel_holds_out() {
        // kernel of the lifted weight-4 T value matrix over a first batch
        // of primes re-verifies at 10 held-out primes
        let train = odd_primes_in(7, 100);
        let holdout = odd_primes_in(101, 160);
        assert!(holdout.len() >= 10);
        let comps = enumerate_compositions(4, Family::T, false);
        let lift = |primes: &[u64]| -> Vec<Vec<BigRational>> {
            comps
                .iter()
                .map(|c| {
                    primes
                        .iter()
                        .map(|&p| {
                            rat(eval_comp_ctx(&PrimeContext::new(p).unwrap(), c).value as i64)
                        })
                        .collect()
                })
                .collect()
        };
        // kernel vectors of the transpose: combinations of symbol rows
        let rows = lift(&train);
        let mut mt = QMatrix::new(train.len(), comps.len());
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                mt.set(j, i, v.clone());
            }
        }
        let kernel = kernel_q(&mt);
        assert!(!kernel.is_empty(), "weight-4 T has identically-zero symbols");
        for vec_ in &kernel {
            for &p in &holdout {
                let ctx = PrimeContext::new(p).unwrap();
                let mut acc = BigRational::zero();
                for (c, coeff) in comps.iter().zip(vec_) {
                    acc += coeff * rat(eval_comp_ctx(&ctx, c).value as i64);
                }
                let pb = num_bigint::BigInt::from(p);
                assert!(
                    acc.is_integer() && acc.numer().mod_floor(&pb).is_zero(),
                    "kernel vector fails at held-out p={p}"
                );
            }
        }
    }

    #[test]
    fn twisted_ranks() {
        // untwisted system: both specializations agree with rank_q
        let mut sys = RelationSystem::default();
        sys.push(gen_reversal(&parse_symbol("T:2,1").unwrap()).unwrap());
        let tr = rank_twisted(&sys).unwrap();
        assert_eq!((tr.plus, tr.minus, tr.certified), (1, 1, 1));

        // x - t*y: per-class rank 1, no certified rational relation
        let mut sys = RelationSystem::default();
        sys.push(gen_alt_reversal(&parse_symbol("AT:1,-1").unwrap()).unwrap());
        let tr = rank_twisted(&sys).unwrap();
        assert_eq!((tr.plus, tr.minus, tr.certified), (1, 1, 0));
    }

    #[test]
    fn rank_with_units_matches_separate_ranks() {
        let rel = gen_linear_shuffle_es(1, &Word::empty(), &Word::new(vec![
            crate::wordalg::Letter::EMinus,
            crate::wordalg::Letter::EMinus,
        ]))
        .unwrap();
        let sys = RelationSystem::new(vec![rel]);
        let nodes = sys.nodes();
        let m = QMatrix::from_relations(&sys, &nodes, 1).unwrap();
        let units: Vec<usize> = (0..nodes.len()).collect();
        let (base, ext) = rank_with_units(&m, &units);
        assert_eq!(base, rank_q(&m));
        assert_eq!(ext, nodes.len());
    }

    #[test]
    fn tsv_roundtrips() {
        let m = qm(&[&[1, -2], &[0, 5]]);
        let back = QMatrix::import_tsv(&m.export_tsv()).unwrap();
        assert_eq!(m, back);

        let vm = ValueMatrix::new(
            vec!["a".into(), "b".into()],
            vec![5, 7],
            vec![vec![3, 2], vec![0, 6]],
        )
        .unwrap();
        assert_eq!(ValueMatrix::import_tsv(&vm.export_tsv()).unwrap(), vm);
    }

    proptest! {
        #[test]
        fn modular_rank_matches_exact(
            rows in proptest::collection::vec(
                proptest::collection::vec(-100i64..=100, 1..=8), 1..=8)
        ) {
            let cols = rows.iter().map(Vec::len).max().unwrap();
            let padded: Vec<Vec<BigRational>> = rows
                .iter()
                .map(|r| {
                    let mut r: Vec<BigRational> = r.iter().map(|&v| rat(v)).collect();
                    r.resize(cols, BigRational::zero());
                    r
                })
                .collect();
            let m = QMatrix::from_rows(padded);
            prop_assert_eq!(rank_q(&m), exact_rank(&m));
        }
    }
}
