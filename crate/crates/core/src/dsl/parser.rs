use num_rational::BigRational;

use super::ast::*;
use super::lexer::{lex, Tok};
use super::DslError;

const BINDERS: [&str; 3] = ["sum", "qsum", "int"];

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn prev_span(&self) -> SourceSpan {
        self.toks[self.pos.saturating_sub(1)].1
    }

    fn bump(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> DslError {
        DslError::syntax(
            format!("expected {wanted}, found {}", self.peek().describe()),
            self.span(),
        )
    }

    fn expect(&mut self, t: Tok) -> Result<SourceSpan, DslError> {
        if *self.peek() == t {
            Ok(self.bump().1)
        } else {
            Err(self.unexpected(&t.describe()))
        }
    }

    fn ident(&mut self) -> Result<Ident, DslError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.bump().1;
                Ok(Ident { name, span })
            }
            _ => Err(self.unexpected("a name")),
        }
    }

    fn ident_list(&mut self) -> Result<Vec<Ident>, DslError> {
        let mut out = vec![self.ident()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            out.push(self.ident()?);
        }
        Ok(out)
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn at_binder(&self) -> bool {
        matches!(self.peek(), Tok::Ident(s) if BINDERS.contains(&s.as_str()))
            && *self.peek_at(1) == Tok::LParen
    }

    fn document(&mut self) -> Result<Document, DslError> {
        let mut doc = Document::default();
        loop {
            if *self.peek() == Tok::Eof {
                return Ok(doc);
            }
            if self.at_binder() {
                let binder = self.binder()?;
                let lhs = self.expr()?;
                let rhs = if *self.peek() == Tok::Eq {
                    self.bump();
                    Some(if self.at_binder() {
                        let b = self.binder()?;
                        RhsAst::Sum(b, self.expr()?)
                    } else {
                        RhsAst::Expr(self.expr()?)
                    })
                } else {
                    None
                };
                if *self.peek() == Tok::Semi {
                    self.bump();
                }
                if *self.peek() != Tok::Eof {
                    return Err(self.unexpected("end of input after the identity"));
                }
                doc.identity = Some(IdentityAst { binder, lhs, rhs });
                return Ok(doc);
            }
            let Tok::Ident(kw) = self.peek().clone() else {
                return Err(self.unexpected("a declaration or an identity"));
            };
            let kw_span = self.bump().1;
            match kw.as_str() {
                "param" => {
                    if doc.params.is_some() {
                        return Err(DslError::syntax("second `param` line", kw_span));
                    }
                    if self.at_keyword("none") {
                        self.bump();
                        doc.params = Some(Vec::new());
                    } else {
                        doc.params = Some(self.ident_list()?);
                    }
                }
                "cont" => doc.cont.extend(self.ident_list()?),
                "outer" => {
                    if doc.outer.is_some() {
                        return Err(DslError::syntax("second `outer` line", kw_span));
                    }
                    doc.outer = Some(self.ident()?);
                }
                "let" => {
                    let name = self.ident()?;
                    self.expect(Tok::Eq)?;
                    let e = self.expr()?;
                    doc.lets.push((name, e));
                }
                _ => {
                    return Err(DslError::syntax(
                        format!("expected a declaration or an identity, found `{kw}`"),
                        kw_span,
                    ))
                }
            }
            self.expect(Tok::Semi)?;
        }
    }

    fn binder(&mut self) -> Result<Binder, DslError> {
        let mut b = Binder {
            q: false,
            sum: Vec::new(),
            int: Vec::new(),
        };
        let mut seen_sum = false;
        while self.at_binder() {
            let (Tok::Ident(kw), span) = self.bump() else {
                unreachable!()
            };
            self.expect(Tok::LParen)?;
            let ids = self.ident_list()?;
            self.expect(Tok::RParen)?;
            match kw.as_str() {
                "int" => {
                    if !b.int.is_empty() {
                        return Err(DslError::syntax("second `int(...)`", span));
                    }
                    b.int = ids;
                }
                _ => {
                    if seen_sum || !b.int.is_empty() {
                        return Err(DslError::syntax("`sum(...)` must come first, once", span));
                    }
                    seen_sum = true;
                    b.q = kw == "qsum";
                    b.sum = ids;
                }
            }
        }
        Ok(b)
    }

    fn expr(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.product()?;
        loop {
            let add = match self.peek() {
                Tok::Plus => true,
                Tok::Minus => false,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.product()?;
            let span = lhs.span.to(rhs.span);
            let kind = if add {
                ExprKind::Add(Box::new(lhs), Box::new(rhs))
            } else {
                ExprKind::Sub(Box::new(lhs), Box::new(rhs))
            };
            lhs = Expr { kind, span };
        }
    }

    fn product(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.unary()?;
        loop {
            let mul = match self.peek() {
                Tok::Star => true,
                Tok::Slash => false,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            let span = lhs.span.to(rhs.span);
            let kind = if mul {
                ExprKind::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                ExprKind::Div(Box::new(lhs), Box::new(rhs))
            };
            lhs = Expr { kind, span };
        }
    }

    fn unary(&mut self) -> Result<Expr, DslError> {
        if *self.peek() == Tok::Minus {
            let start = self.bump().1;
            let inner = self.unary()?;
            let span = start.to(inner.span);
            return Ok(Expr {
                kind: ExprKind::Neg(Box::new(inner)),
                span,
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, DslError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let exp = self.unary()?;
        let span = base.span.to(exp.span);
        Ok(Expr {
            kind: ExprKind::Pow(Box::new(base), Box::new(exp)),
            span,
        })
    }

    fn atom(&mut self) -> Result<Expr, DslError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr {
                    kind: ExprKind::Num(BigRational::from_integer(n)),
                    span,
                })
            }
            Tok::Ident(name) => {
                if BINDERS.contains(&name.as_str()) && *self.peek_at(1) == Tok::LParen {
                    return Err(DslError::syntax(
                        format!("`{name}(...)` is only allowed at the start of a side"),
                        span,
                    ));
                }
                self.bump();
                if *self.peek() != Tok::LParen {
                    return Ok(Expr {
                        kind: ExprKind::Var(name),
                        span,
                    });
                }
                self.bump();
                let mut args = vec![self.expr()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    args.push(self.expr()?);
                }
                self.expect(Tok::RParen)?;
                Ok(Expr {
                    kind: ExprKind::Call(name, args),
                    span: span.to(self.prev_span()),
                })
            }
            Tok::LParen => {
                self.bump();
                let mut e = self.expr()?;
                self.expect(Tok::RParen)?;
                e.span = span.to(self.prev_span());
                Ok(e)
            }
            _ => Err(self.unexpected("an expression")),
        }
    }
}

pub fn parse_document(text: &str) -> Result<Document, DslError> {
    let toks = lex(text)?;
    Parser { toks, pos: 0 }.document()
}

/// A single expression, e.g. a certificate entry.
pub fn parse_expr(text: &str) -> Result<Expr, DslError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("end of expression"));
    }
    Ok(e)
}
