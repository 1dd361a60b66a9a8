//! Multivariate GCD by primitive-part recursion on a main variable.
//!
//! Coefficients are rational, so the GCD is only defined up to a nonzero
//! rational factor; results are returned integer-primitive with a positive
//! leading coefficient.

use num_rational::BigRational;
use num_traits::Zero;

use super::{rat, MultiPoly};

pub fn gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    assert!(a.universe().same(b.universe()), "polynomial universe mismatch");
    if a.is_zero() {
        return b.primitive();
    }
    if b.is_zero() {
        return a.primitive();
    }
    gcd_rec(a, b).primitive()
}

/// Least common multiple, primitive.
pub fn lcm(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if a.is_zero() || b.is_zero() {
        return MultiPoly::zero(a.universe());
    }
    let g = gcd(a, b);
    (a * &b.exact_div(&g).expect("gcd divides")).primitive()
}

fn gcd_rec(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one(a.universe());
    }
    if a == b {
        return a.primitive();
    }
    let n = a.universe().len();
    let var = (0..n)
        .filter(|&v| a.depends_on(v) && b.depends_on(v))
        .min_by_key(|&v| a.degree_in(v).max(b.degree_in(v)))
        .or_else(|| (0..n).find(|&v| a.depends_on(v) || b.depends_on(v)))
        .expect("non-constant polynomial has a variable");
    let da = a.degree_in(var);
    let db = b.degree_in(var);
    if da == 0 {
        return gcd_rec(a, &content_in(b, var));
    }
    if db == 0 {
        return gcd_rec(&content_in(a, var), b);
    }
    let ca = content_in(a, var);
    let cb = content_in(b, var);
    let c = gcd_rec(&ca, &cb);
    let pa = a.exact_div(&ca).expect("content divides");
    let pb = b.exact_div(&cb).expect("content divides");
    if image_degree(&pa, &pb, var) == Some(0) {
        return c;
    }
    let g = if pb.exact_div(&pa).is_ok() {
        pa.primitive()
    } else if pa.exact_div(&pb).is_ok() {
        pb.primitive()
    } else {
        interpolated_gcd(&pa, &pb, var).unwrap_or_else(|| primitive_prs(pa, pb, var))
    };
    (&c * &g).primitive()
}

/// GCD of the coefficients of `a` viewed as a polynomial in `var`.
pub(crate) fn content_in(a: &MultiPoly, var: usize) -> MultiPoly {
    let coeffs = a.univariate_coeffs(var);
    let mut nonzero: Vec<&MultiPoly> = coeffs.iter().filter(|c| !c.is_zero()).collect();
    nonzero.sort_by_key(|c| (c.total_degree(), c.num_terms()));
    let mut g = match nonzero.first() {
        Some(c) => c.primitive(),
        None => return MultiPoly::zero(a.universe()),
    };
    for c in &nonzero[1..] {
        if g.is_constant() {
            break;
        }
        g = gcd_rec(&g, c).primitive();
    }
    g
}

fn primitive_in(a: &MultiPoly, var: usize) -> MultiPoly {
    let c = content_in(a, var);
    a.exact_div(&c).expect("content divides").primitive()
}

fn primitive_prs(a: MultiPoly, b: MultiPoly, var: usize) -> MultiPoly {
    let (mut p, mut q) = if a.degree_in(var) >= b.degree_in(var) {
        (a, b)
    } else {
        (b, a)
    };
    loop {
        let r = pseudo_rem(&p, &q, var);
        if r.is_zero() {
            return primitive_in(&q, var);
        }
        if r.degree_in(var) == 0 {
            return MultiPoly::one(p.universe());
        }
        p = q;
        q = primitive_in(&r, var);
    }
}

/// Sparse pseudo-remainder of `p` by `q` in `var`.
fn pseudo_rem(p: &MultiPoly, q: &MultiPoly, var: usize) -> MultiPoly {
    let u = p.universe();
    let dq = q.degree_in(var);
    let qc = q.univariate_coeffs(var);
    let lq = qc[dq as usize].clone();
    let mut r = p.clone();
    while !r.is_zero() && r.degree_in(var) >= dq {
        let dr = r.degree_in(var);
        let lr = r.univariate_coeffs(var)[dr as usize].clone();
        let shift = super::Monomial::var(u.len(), var, dr - dq);
        let t = q.mul_monomial(&shift, &num_traits::One::one());
        r = &(&r * &lq) - &(&t * &lr);
        r = r.primitive();
    }
    r
}

/// GCD of polynomials primitive in `x`, by evaluating one other variable
/// at integer points, recursing, and interpolating (Brown's scheme over the
/// rationals). The leading coefficient in `x` of the images is fixed to the
/// image of `gamma = gcd(lc(a), lc(b))` so the images fit together; the result
/// is accepted only after trial division.
fn interpolated_gcd(a: &MultiPoly, b: &MultiPoly, x: usize) -> Option<MultiPoly> {
    let u = a.universe();
    let y = (0..u.len()).find(|&v| v != x && (a.depends_on(v) || b.depends_on(v)))?;
    let lead = |p: &MultiPoly| p.univariate_coeffs(x).pop().expect("nonzero");
    let gamma = gcd(&lead(a), &lead(b));
    let bound = gamma.degree_in(y) + a.degree_in(y).min(b.degree_in(y));
    let mut best_deg = a.degree_in(x).min(b.degree_in(x)) + 1;
    let mut points: Vec<(BigRational, MultiPoly)> = Vec::new();
    let mut interp: Option<MultiPoly> = None;
    let mut y0 = 0i64;
    while y0 < 4 * (bound as i64 + 2) + 16 {
        y0 += 1;
        let v = rat(y0);
        let g_y0 = gamma.partial_eval(&[(y, v.clone())]);
        if g_y0.is_zero() {
            continue;
        }
        let (ia, ib) = (a.partial_eval(&[(y, v.clone())]), b.partial_eval(&[(y, v.clone())]));
        if ia.degree_in(x) != a.degree_in(x) || ib.degree_in(x) != b.degree_in(x) {
            continue;
        }
        let g = gcd(&ia, &ib);
        let d = g.degree_in(x);
        if d > best_deg {
            continue;
        }
        if d == 0 {
            return Some(MultiPoly::one(u));
        }
        if d < best_deg {
            best_deg = d;
            points.clear();
            interp = None;
        }
        let Ok(scale) = g_y0.exact_div(&lead(&g)) else {
            continue;
        };
        let g = &g * &scale;
        let next = newton_step(interp.as_ref(), &points, &v, &g, y);
        points.push((v, g));
        let stable = interp.as_ref() == Some(&next);
        interp = Some(next);
        if stable || points.len() > bound as usize {
            let h = interp.as_ref().expect("set above");
            let cand = primitive_in(h, x);
            if a.exact_div(&cand).is_ok() && b.exact_div(&cand).is_ok() {
                return Some(cand);
            }
            if points.len() > bound as usize + 2 {
                points.clear();
                interp = None;
            }
        }
    }
    None
}

/// Newton update: the interpolant through `points` and `(v, g)` in `y`.
fn newton_step(
    prev: Option<&MultiPoly>,
    points: &[(BigRational, MultiPoly)],
    v: &BigRational,
    g: &MultiPoly,
    y: usize,
) -> MultiPoly {
    let u = g.universe();
    let Some(prev) = prev else { return g.clone() };
    let at_v = prev.partial_eval(&[(y, v.clone())]);
    let mut basis = MultiPoly::one(u);
    let mut denom = rat(1);
    for (p, _) in points {
        basis = &basis * &(&MultiPoly::var(u, y) - &MultiPoly::constant(u, p.clone()));
        denom *= v - p;
    }
    let corr = (g - &at_v).scale(&(rat(1) / denom));
    prev + &(&corr * &basis)
}

/// Degree in `var` of the GCD of images of `a` and `b` with every other
/// variable set to a fixed integer. When both leading coefficients survive
/// the substitution the images of the true GCD divide the image GCD, so this
/// bounds the degree of the true GCD from above.
fn image_degree(a: &MultiPoly, b: &MultiPoly, var: usize) -> Option<u32> {
    let n = a.universe().len();
    for attempt in 0..3i64 {
        let point: Vec<BigRational> = (0..n)
            .map(|v| rat(3 + 2 * v as i64 + 11 * attempt + (v as i64 * v as i64) % 7))
            .collect();
        let image = |p: &MultiPoly| -> Vec<BigRational> {
            p.univariate_coeffs(var).iter().map(|c| c.eval(&point)).collect()
        };
        let (ia, ib) = (image(a), image(b));
        if ia.last().is_some_and(Zero::is_zero) || ib.last().is_some_and(Zero::is_zero) {
            continue;
        }
        return Some(univariate_gcd_degree(ia, ib));
    }
    None
}

fn trim(p: &mut Vec<BigRational>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn univariate_gcd_degree(mut a: Vec<BigRational>, mut b: Vec<BigRational>) -> u32 {
    trim(&mut a);
    trim(&mut b);
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let lb = b.last().expect("nonempty").clone();
        while a.len() >= b.len() {
            let f = a.last().expect("nonempty") / &lb;
            let off = a.len() - b.len();
            for (i, c) in b.iter().enumerate() {
                a[off + i] -= &f * c;
            }
            a.pop();
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    (a.len() - 1) as u32
}
