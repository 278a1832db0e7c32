//! Matrix exponential by scaling and squaring with diagonal Padé approximants
//! (Higham, "The scaling and squaring method for the matrix exponential
//! revisited", 2005).

use num_complex::Complex64;

use super::linalg::LuFactor;
use super::matrix::CMatrix;
use crate::error::{Error, Result};

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539_398_330_063_23e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068;
const THETA_13: f64 = 5.371920351148152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn lincomb(terms: &[(f64, &CMatrix)]) -> CMatrix {
    let mut out = CMatrix::zeros(terms[0].1.dim());
    for (c, m) in terms {
        if *c != 0.0 {
            out.axpy(Complex64::new(*c, 0.0), m);
        }
    }
    out
}

/// Odd/even Padé parts `(U, V)` of degree `m <= 9` using the supplied even
/// powers `pows = [I, A², A⁴, ...]`.
fn pade_low(a: &CMatrix, b: &[f64], pows: &[CMatrix]) -> (CMatrix, CMatrix) {
    let half = b.len() / 2;
    let odd: Vec<(f64, &CMatrix)> = (0..half).map(|j| (b[2 * j + 1], &pows[j])).collect();
    let even: Vec<(f64, &CMatrix)> = (0..half).map(|j| (b[2 * j], &pows[j])).collect();
    let u = a * &lincomb(&odd);
    let v = lincomb(&even);
    (u, v)
}

pub fn expm(m: &CMatrix) -> Result<CMatrix> {
    if !m.is_finite() {
        return Err(Error::NonFinite("expm input"));
    }
    let n = m.dim();
    let ident = CMatrix::identity(n);
    let norm = m.norm_one();
    if norm == 0.0 {
        return Ok(ident);
    }

    let a2 = m * m;
    let (u, v, squarings) = if norm <= THETA_9 {
        let a4 = &a2 * &a2;
        let (b, pows): (&[f64], Vec<CMatrix>) = if norm <= THETA_3 {
            (&B3, vec![ident.clone(), a2])
        } else if norm <= THETA_5 {
            (&B5, vec![ident.clone(), a2, a4])
        } else if norm <= THETA_7 {
            let a6 = &a4 * &a2;
            (&B7, vec![ident.clone(), a2, a4, a6])
        } else {
            let a6 = &a4 * &a2;
            let a8 = &a6 * &a2;
            (&B9, vec![ident.clone(), a2, a4, a6, a8])
        };
        let (u, v) = pade_low(m, b, &pows);
        (u, v, 0u32)
    } else {
        let s = (norm / THETA_13).log2().ceil().max(0.0) as u32;
        let scale = 0.5f64.powi(s as i32);
        let a = m.scale_real(scale);
        let a2 = a2.scale_real(scale * scale);
        let a4 = &a2 * &a2;
        let a6 = &a4 * &a2;
        let b = &B13;
        let inner_u = lincomb(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)]);
        let u = &a
            * &(&(&a6 * &inner_u)
                + &lincomb(&[(b[7], &a6), (b[5], &a4), (b[3], &a2), (b[1], &ident)]));
        let inner_v = lincomb(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)]);
        let v =
            &(&a6 * &inner_v) + &lincomb(&[(b[6], &a6), (b[4], &a4), (b[2], &a2), (b[0], &ident)]);
        (u, v, s)
    };

    let p = &v + &u;
    let q = &v - &u;
    let lu = LuFactor::new(&q)?;
    let mut r = lu.solve_matrix(&p)?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    if !r.is_finite() {
        return Err(Error::NonFinite("expm result"));
    }
    Ok(r)
}
