//! Exact ranks of free graded Lie algebras.
//!
//! [`babenko_rank`] evaluates the divisor-sum formula over exact Newton power
//! sums. [`pbw_ranks`] recovers the same numbers from the tensor algebra's
//! Hilbert series via the graded PBW product, sharing no code with the first
//! route beyond the input generator set.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::charpoly::{char_poly, newton_sums, GeneratorSet};
use crate::combinat::{binomial_big, divisors, mobius};
use crate::error::{invalid, Error, Result};

/// Hilbert series `T_0..T_N` of the tensor algebra on the generators.
pub fn tensor_dims(gen: &GeneratorSet, n: usize) -> Vec<BigInt> {
    let mut t = vec![BigInt::zero(); n + 1];
    t[0] = BigInt::one();
    for deg in 1..=n {
        let mut acc = BigInt::zero();
        for &(q, m) in gen.pairs() {
            let q = q as usize;
            if q <= deg {
                acc += &t[deg - q] * m;
            }
        }
        t[deg] = acc;
    }
    t
}

/// Rank of the degree-`n` piece, given power sums `S_1..S_n` (or more).
fn babenko_from_sums(sums: &[BigInt], n: u64) -> Result<BigInt> {
    let mut acc = BigInt::zero();
    for d in divisors(n)? {
        let mu = mobius(d)?;
        if mu == 0 {
            continue;
        }
        let e = n / d;
        let term = &sums[(e - 1) as usize] * mu;
        if e.is_multiple_of(2) {
            acc += term;
        } else {
            acc -= term;
        }
    }
    if n % 2 == 1 {
        acc = -acc;
    }
    let (q, r) = acc.div_rem(&BigInt::from(n));
    if !r.is_zero() {
        return Err(Error::Internal(format!("divisor sum in degree {n} is not divisible by {n}")));
    }
    if q.is_negative() {
        return Err(Error::Internal(format!("negative rank {q} in degree {n}")));
    }
    Ok(q)
}

/// `rank(L_N)` of the free graded Lie algebra on `gen`.
pub fn babenko_rank(gen: &GeneratorSet, n: u64) -> Result<BigInt> {
    if n == 0 {
        return Err(invalid("degree must be at least 1"));
    }
    let sums = newton_sums(&char_poly(gen), n as usize);
    let r = babenko_from_sums(&sums, n)?;
    if !n.is_multiple_of(gen.g() as u64) && !r.is_zero() {
        return Err(Error::Internal(format!("nonzero rank {r} in degree {n} not divisible by g")));
    }
    Ok(r)
}

/// `rank(L_1)..rank(L_N)` sharing one power-sum table.
pub fn babenko_ranks(gen: &GeneratorSet, n: u64) -> Result<Vec<BigInt>> {
    let sums = newton_sums(&char_poly(gen), n as usize);
    (1..=n).map(|k| babenko_from_sums(&sums, k)).collect()
}

/// Ranks `r_1..r_N` solving `Π_even (1−t^n)^{−r_n} · Π_odd (1+t^n)^{r_n} = Σ T_n t^n`.
pub fn pbw_ranks(gen: &GeneratorSet, n: usize) -> Result<Vec<BigInt>> {
    if n == 0 {
        return Err(invalid("degree must be at least 1"));
    }
    let target = tensor_dims(gen, n);
    // running product of the factors for degrees < current, truncated at t^n
    let mut prod = vec![BigInt::zero(); n + 1];
    prod[0] = BigInt::one();
    let mut ranks = Vec::with_capacity(n);
    for deg in 1..=n {
        let r = &target[deg] - &prod[deg];
        if r.is_negative() {
            return Err(Error::OracleInconsistency(format!("solved rank {r} < 0 in degree {deg}")));
        }
        if !r.is_zero() {
            let factor = pbw_factor(&r, deg, n);
            prod = mul_truncated(&prod, &factor, n);
        }
        ranks.push(r);
    }
    if prod != target {
        return Err(Error::OracleInconsistency("PBW product does not reproduce the tensor series".into()));
    }
    Ok(ranks)
}

/// `(1−t^d)^{−r}` for even `d`, `(1+t^d)^r` for odd `d`, truncated at `t^n`.
fn pbw_factor(r: &BigInt, d: usize, n: usize) -> Vec<BigInt> {
    let mut f = vec![BigInt::zero(); n + 1];
    for j in 0..=n / d {
        f[j * d] = if d.is_multiple_of(2) {
            binomial_big(&(r + BigInt::from(j) - 1), j as u64)
        } else {
            binomial_big(r, j as u64)
        };
    }
    f[0] = BigInt::one();
    f
}

fn mul_truncated(a: &[BigInt], b: &[BigInt], n: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n + 1];
    for (i, ai) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (j, bj) in b.iter().enumerate().take(n + 1 - i).filter(|(_, x)| !x.is_zero()) {
            out[i + j] += ai * bj;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(p: &[(u32, u32)]) -> GeneratorSet {
        GeneratorSet::new(p.to_vec()).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn tensor_dim_examples() {
        assert_eq!(tensor_dims(&gen(&[(2, 1), (3, 1)]), 10), ints(&[1, 0, 1, 1, 1, 2, 2, 3, 4, 5, 7]));
        assert_eq!(tensor_dims(&gen(&[(1, 1)]), 4), ints(&[1, 1, 1, 1, 1]));
        assert_eq!(tensor_dims(&gen(&[(1, 2)]), 3), ints(&[1, 2, 4, 8]));
    }

    #[test]
    fn babenko_examples() {
        let one_odd = gen(&[(1, 1)]);
        let r: Vec<BigInt> = (1..=3).map(|n| babenko_rank(&one_odd, n).unwrap()).collect();
        assert_eq!(r, ints(&[1, 1, 0]));
        let one_even = gen(&[(2, 1)]);
        assert_eq!(babenko_rank(&one_even, 2).unwrap(), BigInt::from(1));
        assert_eq!(babenko_rank(&one_even, 4).unwrap(), BigInt::from(0));
        assert_eq!(babenko_rank(&gen(&[(2, 1), (3, 1)]), 5).unwrap(), BigInt::from(1));
        assert_eq!(babenko_rank(&gen(&[(1, 2)]), 3).unwrap(), BigInt::from(2));
        assert!(babenko_rank(&one_odd, 0).is_err());
    }

    #[test]
    fn pbw_examples() {
        assert_eq!(pbw_ranks(&gen(&[(1, 1)]), 4).unwrap(), ints(&[1, 1, 0, 0]));
        assert_eq!(pbw_ranks(&gen(&[(2, 1), (3, 1)]), 5).unwrap(), ints(&[0, 1, 1, 0, 1]));
        assert_eq!(pbw_ranks(&gen(&[(1, 2)]), 2).unwrap(), ints(&[2, 3]));
    }

    #[test]
    fn ranks_vanish_off_multiples_of_g() {
        let g2 = gen(&[(2, 1), (4, 1)]);
        for n in (1..=40).filter(|n| n % 2 == 1) {
            assert!(babenko_rank(&g2, n).unwrap().is_zero());
        }
        let g3 = gen(&[(3, 2), (6, 1)]);
        for n in (1..=40).filter(|n| n % 3 != 0) {
            assert!(babenko_rank(&g3, n).unwrap().is_zero());
        }
    }

    #[test]
    fn batch_matches_single() {
        let g = gen(&[(1, 1), (2, 2), (5, 1)]);
        let batch = babenko_ranks(&g, 30).unwrap();
        for n in 1..=30u64 {
            assert_eq!(batch[n as usize - 1], babenko_rank(&g, n).unwrap());
        }
    }

    #[test]
    fn even_generators_give_necklace_counts() {
        // two even generators in degree 2: halving degrees gives the ungraded
        // necklace count (1/n) Σ μ(d) 2^{n/d}
        let g = gen(&[(2, 2)]);
        let witt = [2, 1, 2, 3, 6, 9, 18, 30, 56, 99];
        for (i, &w) in witt.iter().enumerate() {
            let n = 2 * (i as u64 + 1);
            assert_eq!(babenko_rank(&g, n).unwrap(), BigInt::from(w), "degree {n}");
        }
    }
}
