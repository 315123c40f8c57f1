use std::cell::RefCell;
use std::collections::HashMap;

use super::lexer::{lex, Tok, Token};
use super::{ParseError, Pos, SourceSpan};
use crate::syntax::{
    Arms, ChannelRef, Expression, GroundType, GroundValue, Label, Orchestrator, Polarity, Process,
    SessionType,
};

const KEYWORDS: [&str; 12] = [
    "end", "spec", "request", "accept", "if", "then", "else", "let", "new", "orch", "true", "false",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Sort {
    Type,
    Orch,
    Proc,
}

#[derive(Clone, Debug)]
enum Value {
    Type(SessionType),
    Orch(Orchestrator),
    Proc(Process),
}

struct LetDef {
    name: String,
    body: (usize, usize),
}

struct Doc<'a> {
    toks: &'a [Token],
    file: &'a str,
    lets: Vec<LetDef>,
    cache: RefCell<HashMap<(usize, Sort), Result<Value, ParseError>>>,
}

struct Parser<'d, 'a> {
    doc: &'d Doc<'a>,
    pos: usize,
    end: usize,
    /// Number of `let` bindings in scope.
    visible: usize,
}

pub fn parse_type_in(text: &str, file: &str) -> Result<SessionType, ParseError> {
    with_doc(text, file, |p| p.session_type())
}

pub fn parse_orch_in(text: &str, file: &str) -> Result<Orchestrator, ParseError> {
    with_doc(text, file, |p| p.orch())
}

pub fn parse_process_in(text: &str, file: &str) -> Result<Process, ParseError> {
    with_doc(text, file, |p| p.process())
}

fn with_doc<T>(
    text: &str,
    file: &str,
    f: impl FnOnce(&mut Parser<'_, '_>) -> Result<T, ParseError>,
) -> Result<T, ParseError> {
    let toks = lex(text, file)?;
    let mut doc = Doc { toks: &toks, file, lets: Vec::new(), cache: RefCell::new(HashMap::new()) };
    let mut i = 0;
    while matches!(toks.get(i), Some(Token { tok: Tok::Ident(k), .. }) if k == "let") {
        let name = match toks.get(i + 1) {
            Some(Token { tok: Tok::Ident(n), .. }) if !KEYWORDS.contains(&n.as_str()) => n.clone(),
            _ => return Err(doc.error_at(i + 1, "expected a name after `let`")),
        };
        if !matches!(toks.get(i + 2), Some(Token { tok: Tok::Eq, .. })) {
            return Err(doc.error_at(i + 2, "expected `=`"));
        }
        let start = i + 3;
        let mut j = start;
        let mut depth = 0i32;
        loop {
            match toks.get(j).map(|t| &t.tok) {
                None => return Err(doc.error_at(j, "expected `;` to end the binding")),
                Some(Tok::Semi) if depth == 0 => break,
                Some(Tok::LParen | Tok::LBrace) => depth += 1,
                Some(Tok::RParen | Tok::RBrace) => depth -= 1,
                _ => {}
            }
            j += 1;
        }
        if j == start {
            return Err(doc.error_at(j, "empty binding"));
        }
        doc.lets.push(LetDef { name, body: (start, j) });
        i = j + 1;
    }
    let visible = doc.lets.len();
    let mut p = Parser { doc: &doc, pos: i, end: toks.len(), visible };
    let v = f(&mut p)?;
    if p.pos < p.end {
        return Err(p.error(format!("unexpected {} after the end of input", p.toks()[p.pos].tok.describe())));
    }
    Ok(v)
}

impl Doc<'_> {
    fn span_at(&self, i: usize) -> SourceSpan {
        let (start, end) = match self.toks.get(i) {
            Some(t) => (t.start, t.end),
            None => match self.toks.last() {
                Some(t) => (t.end, t.end),
                None => (Pos { line: 1, col: 1 }, Pos { line: 1, col: 1 }),
            },
        };
        SourceSpan { file: self.file.to_string(), start, end }
    }

    fn error_at(&self, i: usize, msg: &str) -> ParseError {
        ParseError { message: msg.to_string(), span: self.span_at(i) }
    }

    fn resolve(&self, name: &str, visible: usize, sort: Sort) -> Option<Result<Value, ParseError>> {
        let idx = self.lets[..visible].iter().rposition(|d| d.name == name)?;
        if let Some(v) = self.cache.borrow().get(&(idx, sort)) {
            return Some(v.clone());
        }
        let (start, end) = self.lets[idx].body;
        let mut p = Parser { doc: self, pos: start, end, visible: idx };
        let r = (|| {
            let v = match sort {
                Sort::Type => Value::Type(p.session_type()?),
                Sort::Orch => Value::Orch(p.orch()?),
                Sort::Proc => Value::Proc(p.process()?),
            };
            if p.pos < p.end {
                return Err(p.error(format!("unexpected {} in binding `{name}`", p.toks()[p.pos].tok.describe())));
            }
            Ok(v)
        })();
        self.cache.borrow_mut().insert((idx, sort), r.clone());
        Some(r)
    }
}

impl<'d, 'a> Parser<'d, 'a> {
    fn toks(&self) -> &'a [Token] {
        self.doc.toks
    }

    fn peek(&self) -> Option<&'a Tok> {
        self.peek_at(0)
    }

    fn peek_at(&self, n: usize) -> Option<&'a Tok> {
        let i = self.pos + n;
        if i < self.end {
            Some(&self.doc.toks[i].tok)
        } else {
            None
        }
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError { message: msg.into(), span: self.doc.span_at(self.pos.min(self.end)) }
    }

    fn error_at_token(&self, i: usize, msg: impl Into<String>) -> ParseError {
        ParseError { message: msg.into(), span: self.doc.span_at(i) }
    }

    fn found(&self) -> String {
        match self.peek() {
            Some(t) => t.describe(),
            None => "end of input".into(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {}, found {}", tok.describe(), self.found())))
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.is_kw(kw) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected `{kw}`, found {}", self.found())))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                self.pos += 1;
                Ok(s.clone())
            }
            _ => Err(self.error(format!("expected {what}, found {}", self.found()))),
        }
    }

    fn label(&mut self) -> Result<Label, ParseError> {
        let s = self.ident("a label")?;
        Ok(Label::new(s).expect("identifiers are nonempty"))
    }

    fn lookup(&self, name: &str, sort: Sort) -> Option<Result<Value, ParseError>> {
        self.doc.resolve(name, self.visible, sort)
    }

    /// Parses `l: X` arms separated by commas until `close` (one or two
    /// tokens), rejecting duplicate labels.
    fn arms<T>(
        &mut self,
        close: &[Tok],
        mut item: impl FnMut(&mut Self) -> Result<T, ParseError>,
    ) -> Result<Arms<T>, ParseError> {
        let mut arms: Vec<(Label, T)> = Vec::new();
        loop {
            let at = self.pos;
            let l = self.label()?;
            if arms.iter().any(|(m, _)| *m == l) {
                return Err(self.error_at_token(at, format!("duplicate label `{l}`")));
            }
            self.expect(Tok::Colon)?;
            arms.push((l, item(self)?));
            if self.eat(&Tok::Comma) {
                if close.iter().enumerate().all(|(i, t)| self.peek_at(i) == Some(t)) {
                    break;
                }
                continue;
            }
            break;
        }
        for t in close {
            self.expect(t.clone())?;
        }
        Ok(Arms::new(arms).expect("checked nonempty and distinct"))
    }

    // ---- session types ----

    pub fn session_type(&mut self) -> Result<SessionType, ParseError> {
        let at = self.pos;
        match self.peek() {
            Some(Tok::Ident(s)) if s == "end" => {
                self.pos += 1;
                Ok(SessionType::End)
            }
            Some(Tok::Query) | Some(Tok::Bang) => {
                let input = self.peek() == Some(&Tok::Query);
                self.pos += 1;
                if self.eat(&Tok::LParen) {
                    let carried = self.session_type()?;
                    let pol = match self.peek() {
                        Some(Tok::Plus) => Polarity::Plus,
                        Some(Tok::Minus) => Polarity::Minus,
                        _ => return Err(self.error(format!("expected polarity `+` or `-`, found {}", self.found()))),
                    };
                    self.pos += 1;
                    self.expect(Tok::RParen)?;
                    let cont = self.type_cont()?;
                    Ok(if input {
                        SessionType::in_session(carried, pol, cont)
                    } else {
                        SessionType::out_session(carried, pol, cont)
                    })
                } else {
                    let g = GroundType::new(self.ident("a ground type")?);
                    let cont = self.type_cont()?;
                    Ok(if input { SessionType::input(g, cont) } else { SessionType::output(g, cont) })
                }
            }
            Some(Tok::Amp) => {
                self.pos += 1;
                self.expect(Tok::LBrace)?;
                Ok(SessionType::Branch(self.arms(&[Tok::RBrace], |p| p.session_type())?))
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.expect(Tok::LBrace)?;
                Ok(SessionType::Select(self.arms(&[Tok::RBrace], |p| p.session_type())?))
            }
            Some(Tok::Ident(s)) if s == "spec" => {
                self.pos += 1;
                if self.eat(&Tok::LBrace) {
                    let arms = self.arms(&[Tok::RBrace], |p| p.session_type())?;
                    Ok(SessionType::Spec { arms, prioritized: false })
                } else if self.peek() == Some(&Tok::Lt) && self.peek_at(1) == Some(&Tok::Lt) {
                    self.pos += 2;
                    let arms = self.arms(&[Tok::Gt, Tok::Gt], |p| p.session_type())?;
                    Ok(SessionType::Spec { arms, prioritized: true })
                } else {
                    Err(self.error(format!("expected `{{` or `<<` after `spec`, found {}", self.found())))
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.session_type()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Some(Tok::Ident(name)) if !KEYWORDS.contains(&name.as_str()) => {
                match self.lookup(name, Sort::Type) {
                    Some(Ok(Value::Type(t))) => {
                        self.pos += 1;
                        Ok(t)
                    }
                    Some(Err(e)) => Err(e),
                    _ => Err(self.error_at_token(at, format!("unknown session type `{name}`"))),
                }
            }
            _ => Err(self.error(format!("expected a session type, found {}", self.found()))),
        }
    }

    fn type_cont(&mut self) -> Result<SessionType, ParseError> {
        if self.eat(&Tok::Dot) {
            self.session_type()
        } else {
            Ok(SessionType::End)
        }
    }

    // ---- orchestrators ----

    pub fn orch(&mut self) -> Result<Orchestrator, ParseError> {
        let first_at = self.pos;
        let first = self.orch_prim()?;
        let op = match self.peek() {
            Some(Tok::Plus) => Tok::Plus,
            Some(Tok::OPlus) => Tok::OPlus,
            _ => return Ok(first),
        };
        let mut arms: Vec<(Label, Orchestrator)> = Vec::new();
        self.push_summand(&mut arms, first, first_at, &op)?;
        while let Some(t) = self.peek() {
            if *t == op {
                self.pos += 1;
            } else if matches!(t, Tok::Plus | Tok::OPlus) {
                return Err(self.error("mixing `+` and `(+)` needs parentheses"));
            } else {
                break;
            }
            let at = self.pos;
            let f = self.orch_prim()?;
            self.push_summand(&mut arms, f, at, &op)?;
        }
        let arms = Arms::new(arms).expect("checked nonempty and distinct");
        Ok(if op == Tok::Plus { Orchestrator::external_arms(arms) } else { Orchestrator::internal_arms(arms) })
    }

    fn push_summand(
        &self,
        arms: &mut Vec<(Label, Orchestrator)>,
        f: Orchestrator,
        at: usize,
        op: &Tok,
    ) -> Result<(), ParseError> {
        let items: Vec<(Label, Orchestrator)> = match f {
            Orchestrator::Prefix(l, g) => vec![(l, *g)],
            Orchestrator::External(a) if *op == Tok::Plus => a.into_vec(),
            Orchestrator::Internal(a) if *op == Tok::OPlus => a.into_vec(),
            _ => return Err(self.error_at_token(at, "choice arms must start with a label")),
        };
        for (l, g) in items {
            if arms.iter().any(|(m, _)| *m == l) {
                return Err(self.error_at_token(at, format!("duplicate label `{l}` in choice")));
            }
            arms.push((l, g));
        }
        Ok(())
    }

    fn orch_prim(&mut self) -> Result<Orchestrator, ParseError> {
        let at = self.pos;
        match self.peek() {
            Some(Tok::Nat(1)) => {
                self.pos += 1;
                Ok(Orchestrator::Idle)
            }
            Some(Tok::Star) => {
                self.pos += 1;
                if self.eat(&Tok::Dot) {
                    Ok(Orchestrator::io(self.orch_prim()?))
                } else {
                    Ok(Orchestrator::io(Orchestrator::Idle))
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.orch()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Some(Tok::Ident(name)) if !KEYWORDS.contains(&name.as_str()) => {
                self.pos += 1;
                if self.eat(&Tok::Dot) {
                    let l = Label::new(name.clone()).expect("nonempty");
                    return Ok(Orchestrator::prefix(l, self.orch_prim()?));
                }
                match self.lookup(name, Sort::Orch) {
                    Some(Ok(Value::Orch(f))) => Ok(f),
                    Some(Err(e)) => Err(e),
                    Some(Ok(_)) => Err(self.error_at_token(at, "binding is not an orchestrator")),
                    None => Ok(Orchestrator::prefix(Label::new(name.clone()).expect("nonempty"), Orchestrator::Idle)),
                }
            }
            _ => Err(self.error(format!("expected an orchestrator, found {}", self.found()))),
        }
    }

    // ---- expressions ----

    fn expr(&mut self) -> Result<Expression, ParseError> {
        match self.peek() {
            Some(Tok::Nat(n)) => {
                self.pos += 1;
                Ok(Expression::nat(*n))
            }
            Some(Tok::Str(s)) => {
                self.pos += 1;
                Ok(Expression::string(s.clone()))
            }
            Some(Tok::Ident(s)) if s == "true" || s == "false" => {
                self.pos += 1;
                Ok(Expression::bool(s == "true"))
            }
            Some(Tok::LBrace) => Ok(Expression::Literal(self.sym_literal()?)),
            Some(Tok::Ident(_)) => {
                let name = self.ident("an expression")?;
                if self.eat(&Tok::LParen) {
                    let mut args = Vec::new();
                    if !self.eat(&Tok::RParen) {
                        loop {
                            args.push(self.expr()?);
                            if self.eat(&Tok::Comma) {
                                continue;
                            }
                            self.expect(Tok::RParen)?;
                            break;
                        }
                    }
                    Ok(Expression::apply(name, args))
                } else {
                    Ok(Expression::var(name))
                }
            }
            _ => Err(self.error(format!("expected an expression, found {}", self.found()))),
        }
    }

    /// `{tag(v1, ..) : G}`
    fn sym_literal(&mut self) -> Result<GroundValue, ParseError> {
        self.expect(Tok::LBrace)?;
        let tag = self.ident("a symbol tag")?;
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) && !self.eat(&Tok::RParen) {
            loop {
                let at = self.pos;
                match self.expr()? {
                    Expression::Literal(v) => args.push(v),
                    _ => return Err(self.error_at_token(at, "symbol arguments must be values")),
                }
                if self.eat(&Tok::Comma) {
                    continue;
                }
                self.expect(Tok::RParen)?;
                break;
            }
        }
        self.expect(Tok::Colon)?;
        let ty = GroundType::new(self.ident("a ground type")?);
        self.expect(Tok::RBrace)?;
        Ok(GroundValue::Sym { tag, args, ty })
    }

    // ---- processes ----

    pub fn process(&mut self) -> Result<Process, ParseError> {
        let mut p = self.proc_prefixed()?;
        while self.eat(&Tok::Bar) {
            let q = self.proc_prefixed()?;
            p = Process::par(p, q);
        }
        Ok(p)
    }

    fn proc_cont(&mut self) -> Result<Process, ParseError> {
        if self.eat(&Tok::Dot) {
            self.proc_prefixed()
        } else {
            Ok(Process::Inact)
        }
    }

    fn channel(&mut self) -> Result<ChannelRef, ParseError> {
        let name = self.ident("a channel")?;
        if self.eat(&Tok::Caret) {
            let pol = match self.peek() {
                Some(Tok::Plus) => Polarity::Plus,
                Some(Tok::Minus) => Polarity::Minus,
                _ => return Err(self.error(format!("expected polarity `+` or `-`, found {}", self.found()))),
            };
            self.pos += 1;
            Ok(ChannelRef::polarized(name, pol))
        } else {
            Ok(ChannelRef::plain(name))
        }
    }

    fn proc_prefixed(&mut self) -> Result<Process, ParseError> {
        let at = self.pos;
        match self.peek() {
            Some(Tok::Nat(0)) => {
                self.pos += 1;
                Ok(Process::Inact)
            }
            Some(Tok::LParen) => {
                if matches!(self.peek_at(1), Some(Tok::Ident(s)) if s == "new") {
                    self.pos += 2;
                    let k = self.ident("a channel name")?;
                    self.expect(Tok::RParen)?;
                    let body = self.proc_prefixed()?;
                    return Ok(Process::restrict(&k, body));
                }
                self.pos += 1;
                let p = self.process()?;
                self.expect(Tok::RParen)?;
                Ok(p)
            }
            Some(Tok::Ident(s)) if s == "orch" => {
                self.pos += 1;
                let k = self.ident("a channel name")?;
                self.expect(Tok::LBrace)?;
                let f = self.orch()?;
                self.expect(Tok::RBrace)?;
                Ok(Process::orch(&k, f))
            }
            Some(Tok::Ident(s)) if s == "request" || s == "accept" => {
                let is_req = s == "request";
                self.pos += 1;
                let port = self.ident("a port name")?;
                self.expect(Tok::Colon)?;
                self.expect(Tok::LParen)?;
                let ty = self.session_type()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::LParen)?;
                let k = self.ident("a channel name")?;
                self.expect(Tok::RParen)?;
                let body = self.proc_cont()?;
                Ok(if is_req {
                    Process::request(&port, ty, &k, body)
                } else {
                    Process::accept(&port, ty, &k, body)
                })
            }
            Some(Tok::Ident(s)) if s == "if" => {
                self.pos += 1;
                let cond = self.expr()?;
                self.keyword("then")?;
                let then = self.proc_prefixed()?;
                self.keyword("else")?;
                let els = self.proc_prefixed()?;
                Ok(Process::if_then_else(cond, then, els))
            }
            Some(Tok::Ident(name)) if !KEYWORDS.contains(&name.as_str()) => {
                let action = matches!(
                    self.peek_at(1),
                    Some(Tok::Bang | Tok::Query | Tok::LtBar | Tok::BarGt | Tok::Caret)
                ) || matches!(self.peek_at(1), Some(Tok::Ident(s)) if s == "spec");
                if !action {
                    return match self.lookup(name, Sort::Proc) {
                        Some(Ok(Value::Proc(p))) => {
                            self.pos += 1;
                            Ok(p)
                        }
                        Some(Err(e)) => Err(e),
                        _ => Err(self.error_at_token(at, format!("unknown process `{name}`"))),
                    };
                }
                let chan = self.channel()?;
                self.action(chan)
            }
            _ => Err(self.error(format!("expected a process, found {}", self.found()))),
        }
    }

    fn action(&mut self, chan: ChannelRef) -> Result<Process, ParseError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.pos += 1;
                self.expect(Tok::Lt)?;
                if self.eat(&Tok::Lt) {
                    let sent = self.channel()?;
                    self.expect(Tok::Gt)?;
                    self.expect(Tok::Gt)?;
                    let cont = self.proc_cont()?;
                    return Ok(Process::throw(chan, sent, cont));
                }
                let e = self.expr()?;
                self.expect(Tok::Gt)?;
                let cont = self.proc_cont()?;
                Ok(Process::send(chan, e, cont))
            }
            Some(Tok::Query) => {
                self.pos += 1;
                self.expect(Tok::LParen)?;
                if self.eat(&Tok::LParen) {
                    let b = self.ident("a channel name")?;
                    self.expect(Tok::RParen)?;
                    self.expect(Tok::RParen)?;
                    let cont = self.proc_cont()?;
                    return Ok(Process::catch(chan, &b, cont));
                }
                let x = self.ident("a variable")?;
                self.expect(Tok::RParen)?;
                let cont = self.proc_cont()?;
                Ok(Process::recv(chan, &x, cont))
            }
            Some(Tok::LtBar) => {
                self.pos += 1;
                let l = self.label()?;
                let cont = self.proc_cont()?;
                Ok(Process::select(chan, l, cont))
            }
            Some(Tok::BarGt) => {
                self.pos += 1;
                self.expect(Tok::LBrace)?;
                let arms = self.arms(&[Tok::RBrace], |p| p.process())?;
                Ok(Process::Branch { chan, arms })
            }
            Some(Tok::Ident(s)) if s == "spec" => {
                self.pos += 1;
                if self.eat(&Tok::LBrace) {
                    let arms = self.arms(&[Tok::RBrace], |p| p.process())?;
                    Ok(Process::Spec { chan, arms, prioritized: false })
                } else if self.peek() == Some(&Tok::Lt) && self.peek_at(1) == Some(&Tok::Lt) {
                    self.pos += 2;
                    let arms = self.arms(&[Tok::Gt, Tok::Gt], |p| p.process())?;
                    Ok(Process::Spec { chan, arms, prioritized: true })
                } else {
                    Err(self.error(format!("expected `{{` or `<<` after `spec`, found {}", self.found())))
                }
            }
            _ => Err(self.error(format!("expected an action on `{chan}`, found {}", self.found()))),
        }
    }
}
