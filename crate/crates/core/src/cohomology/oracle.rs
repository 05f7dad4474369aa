//! Brute-force right-equivalence test for potentials whose coefficients are
//! signed powers of two.
//!
//! A diagonal rescaling `a ↦ ±2^{e_a} a` multiplies the coefficient of cell
//! `c` by `Π_a (±2^{e_a})^{D[c][a]}`. Matching `W₂ = φ(W₁)` cell by cell is an
//! integer system `D e = v` on the 2-adic valuations together with a system
//! over `F₂` on the signs. Both are solved here by column reduction, without
//! touching the kernel machinery used for the invariants.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::CWComplex;
use crate::error::{Error, Result};
use crate::potential::{coefficients_of, is_signed_pow2, signed_pow2, Potential, Scalar};

/// Per-arrow scaling `(-1)^{sign} 2^{exponent}`, indexed like `cw.arrows`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub exponents: Vec<BigInt>,
    pub signs: Vec<bool>,
}

fn column_combine(a: &mut [Vec<BigInt>], i: usize, j: usize, m: [&BigInt; 4]) {
    for row in a.iter_mut() {
        let (x, y) = (row[i].clone(), row[j].clone());
        row[i] = m[0] * &x + m[1] * &y;
        row[j] = m[2] * &x + m[3] * &y;
    }
}

/// An integer solution of `d · e = v`, if one exists.
pub fn solve_integer(d: &[Vec<i64>], v: &[BigInt]) -> Option<Vec<BigInt>> {
    let m = d.len();
    let n = d.first().map_or(0, Vec::len);
    let mut h: Vec<Vec<BigInt>> = d.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut col = 0;
    for i in 0..m {
        if col == n {
            break;
        }
        for j in col + 1..n {
            if h[i][j].is_zero() {
                continue;
            }
            let (a, b) = (h[i][col].clone(), h[i][j].clone());
            let e = a.extended_gcd(&b);
            let (p, q) = (&a / &e.gcd, &b / &e.gcd);
            let neg_q = -q;
            column_combine(&mut h, col, j, [&e.x, &e.y, &neg_q, &p]);
            column_combine(&mut u, col, j, [&e.x, &e.y, &neg_q, &p]);
        }
        if !h[i][col].is_zero() {
            pivots.push((i, col));
            col += 1;
        }
    }
    let mut y = vec![BigInt::zero(); n];
    for i in 0..m {
        let acc: BigInt = (0..col).map(|c| &h[i][c] * &y[c]).sum();
        let rest = &v[i] - acc;
        match pivots.iter().find(|(r, _)| *r == i) {
            Some(&(_, c)) => {
                let (q, rem) = rest.div_rem(&h[i][c]);
                if !rem.is_zero() {
                    return None;
                }
                y[c] = q;
            }
            None if !rest.is_zero() => return None,
            None => {}
        }
    }
    Some((0..n).map(|i| (0..n).map(|j| &u[i][j] * &y[j]).sum()).collect())
}

/// A solution of `d · s = b` over `F₂`, if one exists.
pub fn solve_mod2(d: &[Vec<i64>], b: &[bool]) -> Option<Vec<bool>> {
    let n = d.first().map_or(0, Vec::len);
    let mut rows: Vec<(Vec<bool>, bool)> = d
        .iter()
        .zip(b)
        .map(|(r, &x)| (r.iter().map(|v| v.rem_euclid(2) == 1).collect(), x))
        .collect();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| rows[i].0[c]) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row.0[c] {
                for (x, y) in row.0.iter_mut().zip(&pivot.0) {
                    *x ^= *y;
                }
                row.1 ^= pivot.1;
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| row.1) {
        return None;
    }
    let mut s = vec![false; n];
    for (i, &c) in pivot_cols.iter().enumerate() {
        s[c] = rows[i].1;
    }
    Some(s)
}

fn split(c: &Scalar, bound: u32) -> Result<(bool, i64)> {
    let (neg, e) = is_signed_pow2(c)
        .ok_or_else(|| Error::Precondition(format!("coefficient {c} is not a signed power of two")))?;
    if e.unsigned_abs() > bound as u64 {
        return Err(Error::Precondition(format!("exponent {e} exceeds the bound {bound}")));
    }
    Ok((neg, e))
}

/// Finds a diagonal rescaling taking `w1` to `w2`, or `None` if there is none.
pub fn find_witness(w1: &Potential, w2: &Potential, cw: &CWComplex, exponent_bound: u32) -> Result<Option<Witness>> {
    let c1 = coefficients_of(w1, &cw.cells);
    let c2 = coefficients_of(w2, &cw.cells);
    if w1.len() != cw.cells.len() || w2.len() != cw.cells.len() {
        return Err(Error::Potential("potentials must be supported on exactly the 2-cells".into()));
    }
    let mut v = Vec::with_capacity(c1.len());
    let mut b = Vec::with_capacity(c1.len());
    for (x, y) in c1.iter().zip(&c2) {
        let (nx, ex) = split(x, exponent_bound)?;
        let (ny, ey) = split(y, exponent_bound)?;
        v.push(BigInt::from(ey - ex));
        b.push(nx != ny);
    }
    let Some(exponents) = solve_integer(&cw.boundary, &v) else {
        return Ok(None);
    };
    let Some(signs) = solve_mod2(&cw.boundary, &b) else {
        return Ok(None);
    };
    let witness = Witness { exponents, signs };
    if !verify_witness(&witness, &c1, &c2, cw)? {
        return Err(Error::Invariant("oracle produced a witness that does not verify".into()));
    }
    Ok(Some(witness))
}

fn verify_witness(w: &Witness, c1: &[Scalar], c2: &[Scalar], cw: &CWComplex) -> Result<bool> {
    let scales: Vec<Scalar> = w
        .exponents
        .iter()
        .zip(&w.signs)
        .map(|(e, &s)| {
            let e = e
                .to_i32()
                .ok_or_else(|| Error::Unsupported(format!("witness exponent {e} is too large")))?;
            Ok(signed_pow2(s, e))
        })
        .collect::<Result<_>>()?;
    for ((row, x), y) in cw.boundary.iter().zip(c1).zip(c2) {
        let mut z = x.clone();
        for (d, s) in row.iter().zip(&scales) {
            if *d != 0 {
                z *= s.pow(*d as i32);
            }
        }
        if &z != y {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn brute_force_equivalence_oracle(w1: &Potential, w2: &Potential, cw: &CWComplex, exponent_bound: u32) -> Result<bool> {
    Ok(find_witness(w1, w2, cw, exponent_bound)?.is_some())
}

/// Largest absolute exponent in a witness, for reporting.
pub fn witness_size(w: &Witness) -> BigInt {
    w.exponents.iter().map(|e| e.abs()).max().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::GammaGraph;
    use crate::cohomology::build_complex;
    use crate::potential::{apply_right_equivalence, primitive_potential, scalar, seeded_potential, RightEquivalence, Seeding};
    use crate::{build_qxtilde, Word};

    #[test]
    fn integer_solver_small_systems() {
        let d = vec![vec![2, 0], vec![0, 3]];
        assert_eq!(solve_integer(&d, &[4.into(), 9.into()]), Some(vec![2.into(), 3.into()]));
        assert_eq!(solve_integer(&d, &[1.into(), 0.into()]), None);
        let d = vec![vec![1, 1], vec![1, 1]];
        assert_eq!(solve_integer(&d, &[1.into(), 2.into()]), None);
    }

    #[test]
    fn mod2_solver_small_systems() {
        let d = vec![vec![1, 1], vec![0, 1]];
        assert_eq!(solve_mod2(&d, &[true, true]), Some(vec![false, true]));
        let d = vec![vec![1, 1], vec![1, 1]];
        assert_eq!(solve_mod2(&d, &[true, false]), None);
    }

    #[test]
    fn rescaled_arrow_is_found() {
        let g = GammaGraph::a_n(2);
        let bq = build_qxtilde(&Word::parse("1 2 1 2 1 2 1 2", &g).unwrap(), &g).unwrap();
        let cw = build_complex(&bq).unwrap();
        let w = seeded_potential(&cw.cells, &Seeding::PowersOfTwo { seed: 2, max_exp: 2 }).unwrap();
        let mut phi = RightEquivalence::identity(16);
        phi.set_linear(cw.arrows[3].clone(), scalar(2)).unwrap();
        let w2 = apply_right_equivalence(&phi, &w).unwrap();
        let wit = find_witness(&w, &w2, &cw, 8).unwrap().unwrap();
        assert!(witness_size(&wit) <= 2.into());
    }

    #[test]
    fn triangle_graph_inequivalent_pair() {
        let g = GammaGraph::cycle(3);
        let bq = build_qxtilde(&Word::parse("1 2 3 1 2 3 1 2 3 3~ 2~ 1~ 3~ 2~ 1~", &g).unwrap(), &g).unwrap();
        let cw = build_complex(&bq).unwrap();
        let ones = seeded_potential(&cw.cells, &Seeding::Ones).unwrap();
        let mut coeffs = vec![scalar(1); cw.cells.len()];
        coeffs[0] = scalar(2);
        let w = primitive_potential(&cw.cells, &coeffs).unwrap();
        assert!(!brute_force_equivalence_oracle(&ones, &w, &cw, 4).unwrap());
        assert!(brute_force_equivalence_oracle(&w, &w, &cw, 4).unwrap());
    }

    #[test]
    fn non_pow2_coefficients_are_rejected() {
        let g = GammaGraph::a_n(2);
        let bq = build_qxtilde(&Word::parse("1 2 1 2 1 2 1 2", &g).unwrap(), &g).unwrap();
        let cw = build_complex(&bq).unwrap();
        let mut coeffs = vec![scalar(1); cw.cells.len()];
        coeffs[0] = scalar(3);
        let w = primitive_potential(&cw.cells, &coeffs).unwrap();
        assert!(matches!(
            brute_force_equivalence_oracle(&w, &w, &cw, 4),
            Err(Error::Precondition(_))
        ));
    }
}
