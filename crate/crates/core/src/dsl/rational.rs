use num_traits::{ToPrimitive, Zero};

use super::ast::{Expr, ExprKind};
use super::{parse_expr, DslError};
use crate::arith::{rat, Monomial, MultiPoly, RatFun, Universe};

/// Evaluates an expression as a rational function over `u`. In a q-universe
/// `q^(a*n + b*k + c)` stands for the monomial in the variables `q^n`,
/// `q^k` and `q`.
pub fn eval_rational(e: &Expr, u: &Universe) -> Result<RatFun, DslError> {
    let rec = |x: &Expr| eval_rational(x, u);
    Ok(match &e.kind {
        ExprKind::Num(c) => RatFun::constant(u, c.clone()),
        ExprKind::Var(v) => match u.index_of(v) {
            Some(i) => RatFun::var(u, i),
            None => return Err(DslError::semantic(format!("undeclared symbol `{v}`"), e.span)),
        },
        ExprKind::Neg(a) => -&rec(a)?,
        ExprKind::Add(a, b) => &rec(a)? + &rec(b)?,
        ExprKind::Sub(a, b) => &rec(a)? - &rec(b)?,
        ExprKind::Mul(a, b) => &rec(a)? * &rec(b)?,
        ExprKind::Div(a, b) => {
            let d = rec(b)?;
            if d.is_zero() {
                return Err(DslError::semantic("division by zero", b.span));
            }
            &rec(a)? / &d
        }
        ExprKind::Pow(a, b) => {
            if matches!(&a.kind, ExprKind::Var(q) if q == "q") && u.index_of("q").is_some() {
                if let Some(m) = q_monomial(b, u)? {
                    return Ok(m);
                }
            }
            let k = rec(b)?
                .constant_value()
                .filter(|c| c.is_integer())
                .and_then(|c| c.to_integer().to_i64())
                .ok_or_else(|| DslError::semantic("expected an integer exponent", b.span))?;
            rec(a)?
                .pow(k)
                .map_err(|_| DslError::semantic("division by zero", e.span))?
        }
        ExprKind::Call(f, _) => {
            return Err(DslError::semantic(
                format!("`{f}` in a rational function"),
                e.span,
            ))
        }
    })
}

/// `q^e` for `e` integer-affine in the names `x` with `q^x` in `u`.
fn q_monomial(e: &Expr, u: &Universe) -> Result<Option<RatFun>, DslError> {
    let names: Vec<String> = u
        .names()
        .iter()
        .filter_map(|s| s.strip_prefix("q^").map(str::to_string))
        .collect();
    let eu = Universe::new(names.clone());
    let Ok(r) = eval_rational(e, &eu) else {
        return Ok(None);
    };
    let Some(p) = r.to_poly().filter(|p| p.total_degree() <= 1) else {
        return Ok(None);
    };
    let mut num = vec![0u32; u.len()];
    let mut den = vec![0u32; u.len()];
    for (m, c) in p.terms() {
        if !c.is_integer() {
            return Ok(None);
        }
        let c = c.to_integer().to_i64().expect("small exponent");
        let idx = match m.exponents().iter().position(|&x| x > 0) {
            Some(v) => u.index_of(&format!("q^{}", names[v])).expect("q-power name"),
            None => u.index_of("q").expect("q"),
        };
        if c > 0 {
            num[idx] += c as u32;
        } else if !c.is_zero() {
            den[idx] += (-c) as u32;
        }
    }
    let mono = |x: Vec<u32>| MultiPoly::monomial(u, Monomial::from_exponents(x), rat(1));
    Ok(Some(RatFun::new(mono(num), mono(den)).expect("monomial")))
}

pub fn parse_rational(text: &str, u: &Universe) -> Result<RatFun, DslError> {
    eval_rational(&parse_expr(text)?, u)
}
