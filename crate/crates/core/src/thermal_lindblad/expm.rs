use faer::prelude::*;
use faer::Mat;
use num_complex::Complex64;

const B: [f64; 14] = [
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
const THETA_13: f64 = 5.371920351148152;

fn norm_1(a: &Mat<Complex64>) -> f64 {
    (0..a.ncols()).map(|j| a.col(j).iter().map(|x| x.norm()).sum::<f64>()).fold(0.0, f64::max)
}

fn scaled_identity(n: usize, s: f64) -> Mat<Complex64> {
    Mat::from_fn(n, n, |i, j| if i == j { Complex64::new(s, 0.0) } else { Complex64::new(0.0, 0.0) })
}

fn scale(a: &Mat<Complex64>, s: f64) -> Mat<Complex64> {
    a * Scale(Complex64::new(s, 0.0))
}

/// Matrix exponential by degree-13 Pade approximation with scaling and squaring.
pub fn expm(a: &Mat<Complex64>) -> Mat<Complex64> {
    let n = a.nrows();
    let norm = norm_1(a);
    let s = if norm > THETA_13 { (norm / THETA_13).log2().ceil() as i32 } else { 0 };
    let a = scale(a, 0.5f64.powi(s));
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = scale(&a6, B[13]) + scale(&a4, B[11]) + scale(&a2, B[9]);
    let u_poly = &a6 * &u_inner + scale(&a6, B[7]) + scale(&a4, B[5]) + scale(&a2, B[3]) + scaled_identity(n, B[1]);
    let u = &a * &u_poly;
    let v_inner = scale(&a6, B[12]) + scale(&a4, B[10]) + scale(&a2, B[8]);
    let v = &a6 * &v_inner + scale(&a6, B[6]) + scale(&a4, B[4]) + scale(&a2, B[2]) + scaled_identity(n, B[0]);
    let lu = (&v - &u).partial_piv_lu();
    let mut r = lu.solve(&(&v + &u));
    for _ in 0..s {
        r = &r * &r;
    }
    r
}
