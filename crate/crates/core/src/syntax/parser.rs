use crate::ast::*;
use crate::span::Span;
use crate::word::Word;

use super::lexer::{lex, Tok, Token};
use super::ParseError;

type PResult<T> = Result<T, ParseError>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> PResult<Parser> {
        Ok(Parser { toks: lex(src)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn since(&self, start: Span) -> Span {
        start.join(self.prev_span())
    }

    fn advance(&mut self) -> &Token {
        let t = &self.toks[self.pos];
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        Err(ParseError {
            span: self.span(),
            expected: expected.to_string(),
            found: self.peek().describe(),
        })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> PResult<Span> {
        if self.peek() == &t {
            Ok(self.advance().span)
        } else {
            self.error(&format!("`{}`", t.text()))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.advance().span;
                Ok(Ident { name, span })
            }
            _ => self.error(what),
        }
    }

    fn ident_list(&mut self, close: Tok, what: &str) -> PResult<Vec<Ident>> {
        let mut out = Vec::new();
        if self.peek() == &close {
            return Ok(out);
        }
        loop {
            out.push(self.ident(what)?);
            if !self.eat(&Tok::Comma) {
                return Ok(out);
            }
        }
    }

    fn end(&mut self) -> PResult<()> {
        if self.peek() == &Tok::Eof {
            Ok(())
        } else {
            self.error("end of input")
        }
    }

    fn program(&mut self) -> PResult<Program> {
        let start = self.span();
        let mut layers = Vec::new();
        loop {
            match self.peek() {
                Tok::Box => {
                    self.advance();
                    self.expect(Tok::LBracket)?;
                    let vars = self.ident_list(Tok::RBracket, "a boxed variable")?;
                    self.expect(Tok::RBracket)?;
                    self.expect(Tok::In)?;
                    layers.push(Layer::Box(vars));
                }
                Tok::Declare => {
                    self.advance();
                    let mut procs = vec![self.procedure()?];
                    while let Tok::Ident(_) = self.peek() {
                        procs.push(self.procedure()?);
                    }
                    self.expect(Tok::In)?;
                    layers.push(Layer::Declare(procs));
                }
                _ => break,
            }
        }
        let main = self.term()?;
        Ok(Program { layers, main, span: self.since(start) })
    }

    fn procedure(&mut self) -> PResult<Procedure> {
        let start = self.span();
        let name = self.ident("a procedure name")?;
        self.expect(Tok::LParen)?;
        let params = self.ident_list(Tok::RParen, "a parameter")?;
        self.expect(Tok::RParen)?;
        let (oracle_params, word_params) = params.into_iter().partition(|p| p.kind() == VarKind::Oracle);
        self.expect(Tok::LBrace)?;
        let mut locals = Vec::new();
        if self.eat(&Tok::Var) {
            locals = self.ident_list(Tok::Semi, "a local variable")?;
            self.expect(Tok::Semi)?;
        }
        let body = self.stmts()?;
        self.expect(Tok::Return)?;
        let ret = self.ident("the returned variable")?;
        self.expect(Tok::RBrace)?;
        Ok(Procedure { name, oracle_params, word_params, locals, body, ret, span: self.since(start) })
    }

    /// A possibly empty `;`-separated statement list, ended by `}` or
    /// `return`. The separator may be dropped after a braced statement.
    fn stmts(&mut self) -> PResult<Stmt> {
        let mut out = Vec::new();
        loop {
            if matches!(self.peek(), Tok::RBrace | Tok::Return | Tok::Eof) {
                break;
            }
            let s = self.stmt()?;
            let braced = matches!(s.kind, StmtKind::If { .. } | StmtKind::While { .. });
            out.push(s);
            if !self.eat(&Tok::Semi) && !braced && !matches!(self.peek(), Tok::RBrace | Tok::Return | Tok::Eof) {
                return self.error("`;`");
            }
        }
        Ok(Stmt::seq(out))
    }

    fn block(&mut self) -> PResult<Stmt> {
        self.expect(Tok::LBrace)?;
        let s = self.stmts()?;
        self.expect(Tok::RBrace)?;
        Ok(s)
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let start = self.span();
        let kind = match self.peek() {
            Tok::Skip => {
                self.advance();
                StmtKind::Skip
            }
            Tok::If => {
                self.advance();
                self.expect(Tok::LParen)?;
                let cond = self.expr()?;
                self.expect(Tok::RParen)?;
                let then_branch = Box::new(self.block()?);
                let else_branch = if self.eat(&Tok::Else) {
                    self.block()?
                } else {
                    Stmt { kind: StmtKind::Skip, span: self.prev_span() }
                };
                StmtKind::If { cond, then_branch, else_branch: Box::new(else_branch) }
            }
            Tok::While => {
                self.advance();
                self.expect(Tok::LParen)?;
                let cond = self.expr()?;
                self.expect(Tok::RParen)?;
                StmtKind::While { cond, body: Box::new(self.block()?) }
            }
            Tok::Ident(_) => {
                let target = self.ident("a variable")?;
                self.expect(Tok::Assign)?;
                StmtKind::Assign { target, value: self.expr()? }
            }
            _ => return self.error("a statement"),
        };
        Ok(Stmt { kind, span: self.since(start) })
    }

    fn expr(&mut self) -> PResult<Expr> {
        let start = self.span();
        let lhs = self.simple_expr()?;
        let op = match self.peek() {
            Tok::Neq => "neq",
            Tok::EqEq => "eqw",
            _ => return Ok(lhs),
        };
        let op_span = self.advance().span;
        let rhs = self.simple_expr()?;
        Ok(Expr {
            kind: ExprKind::Op { op: Ident { name: op.to_string(), span: op_span }, args: vec![lhs, rhs] },
            span: self.since(start),
        })
    }

    fn simple_expr(&mut self) -> PResult<Expr> {
        let start = self.span();
        let kind = match self.peek().clone() {
            Tok::Eps => {
                self.advance();
                ExprKind::Op { op: Ident { name: "eps".into(), span: start }, args: vec![] }
            }
            Tok::Word(w) => {
                self.advance();
                ExprKind::Const(Word::from(w.as_str()))
            }
            Tok::LParen => {
                self.advance();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                return Ok(e);
            }
            Tok::Ident(_) => {
                let id = self.ident("an expression")?;
                if self.peek() != &Tok::LParen {
                    if id.kind() == VarKind::Oracle {
                        return Err(ParseError {
                            span: id.span,
                            expected: "a word variable or an oracle call".to_string(),
                            found: format!("oracle variable `{}`", id.name),
                        });
                    }
                    ExprKind::Var(id)
                } else {
                    self.advance();
                    if id.kind() == VarKind::Oracle {
                        let data = self.expr()?;
                        self.expect(Tok::Restrict)?;
                        let bound = self.expr()?;
                        self.expect(Tok::RParen)?;
                        ExprKind::Oracle { oracle: id, data: Box::new(data), bound: Box::new(bound) }
                    } else {
                        let mut args = Vec::new();
                        if self.peek() != &Tok::RParen {
                            loop {
                                args.push(self.expr()?);
                                if !self.eat(&Tok::Comma) {
                                    break;
                                }
                            }
                        }
                        self.expect(Tok::RParen)?;
                        ExprKind::Op { op: id, args }
                    }
                }
            }
            _ => return self.error("an expression"),
        };
        Ok(Expr { kind, span: self.since(start) })
    }

    fn term(&mut self) -> PResult<Term> {
        if self.peek() == &Tok::Lambda {
            let start = self.advance().span;
            let x = self.ident("a lambda binder")?;
            self.expect(Tok::Dot)?;
            let body = self.term()?;
            return Ok(Term { kind: TermKind::Lambda(x, Box::new(body)), span: self.since(start) });
        }
        let start = self.span();
        let mut t = self.atom()?;
        while self.eat(&Tok::At) {
            let arg = if self.peek() == &Tok::Lambda { self.term()? } else { self.atom()? };
            t = Term { kind: TermKind::App(Box::new(t), Box::new(arg)), span: self.since(start) };
        }
        Ok(t)
    }

    fn atom(&mut self) -> PResult<Term> {
        let start = self.span();
        match self.peek() {
            Tok::Ident(_) => {
                let x = self.ident("a variable")?;
                Ok(Term { kind: TermKind::Var(x), span: start })
            }
            Tok::LParen => {
                self.advance();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Call => {
                self.advance();
                let proc = self.ident("a procedure name")?;
                self.expect(Tok::LParen)?;
                let mut closures = Vec::new();
                let mut args = Vec::new();
                if self.peek() != &Tok::RParen {
                    loop {
                        if self.peek() == &Tok::LBrace {
                            if !args.is_empty() {
                                return self.error("a term (closures come first)");
                            }
                            closures.push(self.closure()?);
                        } else {
                            args.push(self.term()?);
                        }
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(Tok::RParen)?;
                Ok(Term { kind: TermKind::Call { proc, closures, args }, span: self.since(start) })
            }
            _ => self.error("a term"),
        }
    }

    fn closure(&mut self) -> PResult<Closure> {
        let start = self.expect(Tok::LBrace)?;
        let param = self.ident("a closure parameter")?;
        if param.kind() != VarKind::Word {
            return Err(ParseError {
                span: param.span,
                expected: "a word variable".to_string(),
                found: format!("oracle variable `{}`", param.name),
            });
        }
        self.expect(Tok::Arrow)?;
        let body = self.term()?;
        self.expect(Tok::RBrace)?;
        Ok(Closure { param, body, span: self.since(start) })
    }
}

fn whole<T>(src: &str, f: impl FnOnce(&mut Parser) -> PResult<T>) -> Result<T, Vec<ParseError>> {
    let run = || {
        let mut p = Parser::new(src)?;
        let out = f(&mut p)?;
        p.end()?;
        Ok(out)
    };
    run().map_err(|e| vec![e])
}

/// Parses a whole program. Errors stop at the first one.
pub fn parse_program(src: &str) -> Result<Program, Vec<ParseError>> {
    whole(src, Parser::program)
}

pub fn parse_procedure(src: &str) -> Result<Procedure, Vec<ParseError>> {
    whole(src, Parser::procedure)
}

/// Parses a statement list, e.g. `x := pred(x); y := x`.
pub fn parse_stmt(src: &str) -> Result<Stmt, Vec<ParseError>> {
    whole(src, Parser::stmts)
}

pub fn parse_expr(src: &str) -> Result<Expr, Vec<ParseError>> {
    whole(src, Parser::expr)
}

pub fn parse_term(src: &str) -> Result<Term, Vec<ParseError>> {
    whole(src, Parser::term)
}
