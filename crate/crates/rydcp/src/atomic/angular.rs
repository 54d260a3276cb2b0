//! Angular-momentum algebra for dipole matrix elements: Wigner 3j/6j symbols
//! and the spin-spectator reduction of the spherical dipole operator.
//!
//! Arguments are doubled half-integers throughout so the factorial arguments
//! below are plain integers whenever the symbol is nonzero.

use super::HalfInt;

const FACT_LEN: usize = 64;

fn factorials() -> &'static [f64; FACT_LEN] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<[f64; FACT_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [1.0; FACT_LEN];
        for i in 1..FACT_LEN {
            t[i] = t[i - 1] * i as f64;
        }
        t
    })
}

/// factorial of a doubled-integer argument / 2 (must be even and >= 0)
fn fact2(twice: i32) -> f64 {
    debug_assert!(twice >= 0 && twice % 2 == 0);
    factorials()[(twice / 2) as usize]
}

fn triangle_ok(a: i32, b: i32, c: i32) -> bool {
    // arguments doubled; parity must make all factorial arguments integers
    (a + b - c) >= 0 && (a - b + c) >= 0 && (-a + b + c) >= 0 && (a + b + c) % 2 == 0
}

fn delta_factor(a: i32, b: i32, c: i32) -> f64 {
    fact2(a + b - c) * fact2(a - b + c) * fact2(-a + b + c) / fact2(a + b + c + 2)
}

/// Wigner 3j symbol; all arguments are twice their physical value.
pub fn wigner_3j(tj1: i32, tj2: i32, tj3: i32, tm1: i32, tm2: i32, tm3: i32) -> f64 {
    if tm1 + tm2 + tm3 != 0
        || !triangle_ok(tj1, tj2, tj3)
        || tm1.abs() > tj1
        || tm2.abs() > tj2
        || tm3.abs() > tj3
        || (tj1 + tm1) % 2 != 0
        || (tj2 + tm2) % 2 != 0
        || (tj3 + tm3) % 2 != 0
    {
        return 0.0;
    }
    let prefactor = (delta_factor(tj1, tj2, tj3)
        * fact2(tj1 + tm1)
        * fact2(tj1 - tm1)
        * fact2(tj2 + tm2)
        * fact2(tj2 - tm2)
        * fact2(tj3 + tm3)
        * fact2(tj3 - tm3))
    .sqrt();

    // summation bounds from non-negativity of every factorial argument
    let k_min = 0
        .max(tj2 - tj3 - tm1)
        .max(tj1 - tj3 + tm2);
    let k_max = (tj1 + tj2 - tj3).min(tj1 - tm1).min(tj2 + tm2);
    let mut sum = 0.0;
    let mut tk = k_min;
    while tk <= k_max {
        let sign = if (tk / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let denom = fact2(tk)
            * fact2(tj1 + tj2 - tj3 - tk)
            * fact2(tj1 - tm1 - tk)
            * fact2(tj2 + tm2 - tk)
            * fact2(tj3 - tj2 + tm1 + tk)
            * fact2(tj3 - tj1 - tm2 + tk);
        sum += sign / denom;
        tk += 2;
    }
    let phase = if ((tj1 - tj2 - tm3) / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    };
    phase * prefactor * sum
}

/// Wigner 6j symbol; all arguments are twice their physical value.
pub fn wigner_6j(tj1: i32, tj2: i32, tj3: i32, tj4: i32, tj5: i32, tj6: i32) -> f64 {
    if !triangle_ok(tj1, tj2, tj3)
        || !triangle_ok(tj1, tj5, tj6)
        || !triangle_ok(tj4, tj2, tj6)
        || !triangle_ok(tj4, tj5, tj3)
    {
        return 0.0;
    }
    let pref = (delta_factor(tj1, tj2, tj3)
        * delta_factor(tj1, tj5, tj6)
        * delta_factor(tj4, tj2, tj6)
        * delta_factor(tj4, tj5, tj3))
    .sqrt();

    let s123 = tj1 + tj2 + tj3;
    let s156 = tj1 + tj5 + tj6;
    let s426 = tj4 + tj2 + tj6;
    let s453 = tj4 + tj5 + tj3;
    let p1245 = tj1 + tj2 + tj4 + tj5;
    let p2356 = tj2 + tj3 + tj5 + tj6;
    let p3164 = tj3 + tj1 + tj6 + tj4;

    let t_min = s123.max(s156).max(s426).max(s453);
    let t_max = p1245.min(p2356).min(p3164);
    let mut sum = 0.0;
    let mut t = t_min;
    while t <= t_max {
        let sign = if (t / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let num = fact2(t + 2);
        let den = fact2(t - s123)
            * fact2(t - s156)
            * fact2(t - s426)
            * fact2(t - s453)
            * fact2(p1245 - t)
            * fact2(p2356 - t)
            * fact2(p3164 - t);
        sum += sign * num / den;
        t += 2;
    }
    pref * sum
}

/// Angular part of the reduced dipole element:
/// <l_u 1/2 j_u || r C^(1) || l_k 1/2 j_k> / <n l_u | r | n' l_k>.
pub fn reduced_dipole_factor(l_u: u32, j_u: HalfInt, l_k: u32, j_k: HalfInt) -> f64 {
    let tlu = 2 * l_u as i32;
    let tlk = 2 * l_k as i32;
    let tju = j_u.doubled();
    let tjk = j_k.doubled();
    // spin-spectator reduction (Edmonds 7.1.7 with s = 1/2, k = 1)
    let six = wigner_6j(tlu, tju, 1, tjk, tlk, 2);
    let phase_exp = (tlu + 1 + tjk + 2) / 2; // l_u + 1/2 + j_k + 1
    let phase = if phase_exp % 2 == 0 { 1.0 } else { -1.0 };
    let jj = (((tju + 1) * (tjk + 1)) as f64).sqrt();
    // <l_u || C^(1) || l_k>
    let three = wigner_3j(tlu, 2, tlk, 0, 0, 0);
    let ll = (((tlu + 1) * (tlk + 1)) as f64).sqrt();
    let c_red = if l_u % 2 == 0 { 1.0 } else { -1.0 } * ll * three;
    phase * jj * six * c_red
}

/// Wigner-Eckart projection: <j_u m_u | T^1_q | j_k m_k> / <j_u || T^1 || j_k>.
pub fn projection_factor(j_u: HalfInt, m_u: HalfInt, j_k: HalfInt, m_k: HalfInt, q: i32) -> f64 {
    let tju = j_u.doubled();
    let tmu = m_u.doubled();
    let phase = if ((tju - tmu) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    phase * wigner_3j(tju, 2, j_k.doubled(), -tmu, 2 * q, m_k.doubled())
}
