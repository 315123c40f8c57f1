//! Text syntax for types, orchestrators and processes.
//!
//! A document is a sequence of `let NAME = BODY;` bindings followed by the
//! main term. A binding is parsed at its use site, in the sort required
//! there, and may refer only to earlier bindings.

mod lexer;
mod parser;
mod pretty;

use std::fmt;

use thiserror::Error;

use crate::syntax::{Expression, GroundValue, Orchestrator, Process, SessionType};

pub use pretty::{pretty_expr, pretty_orch, pretty_process, pretty_type, pretty_value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub file: String,
    pub start: Pos,
    pub end: Pos,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.start.line, self.start.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub message: String,
    pub span: SourceSpan,
}

const DEFAULT_FILE: &str = "<input>";

pub fn parse_type(text: &str) -> Result<SessionType, ParseError> {
    parser::parse_type_in(text, DEFAULT_FILE)
}

pub fn parse_orch(text: &str) -> Result<Orchestrator, ParseError> {
    parser::parse_orch_in(text, DEFAULT_FILE)
}

pub fn parse_process(text: &str) -> Result<Process, ParseError> {
    parser::parse_process_in(text, DEFAULT_FILE)
}

/// Like [`parse_type`], recording `file` in error spans.
pub fn parse_type_file(text: &str, file: &str) -> Result<SessionType, ParseError> {
    parser::parse_type_in(text, file)
}

pub fn parse_orch_file(text: &str, file: &str) -> Result<Orchestrator, ParseError> {
    parser::parse_orch_in(text, file)
}

pub fn parse_process_file(text: &str, file: &str) -> Result<Process, ParseError> {
    parser::parse_process_in(text, file)
}

impl fmt::Display for SessionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_type(self))
    }
}

impl fmt::Display for Orchestrator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_orch(self))
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_process(self))
    }
}

impl fmt::Display for GroundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_value(self))
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_expr(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{GroundType, Label, Polarity};

    fn l(s: &str) -> Label {
        Label::from_static(s)
    }

    #[test]
    fn end_and_defaults() {
        assert_eq!(parse_type("end"), Ok(SessionType::End));
        assert_eq!(parse_type("!Nat"), Ok(SessionType::output(GroundType::nat(), SessionType::End)));
        assert_eq!(parse_orch("1"), Ok(Orchestrator::Idle));
        assert_eq!(parse_process("0"), Ok(Process::Inact));
    }

    #[test]
    fn duplicate_labels_are_parse_errors() {
        let e = parse_type("&{a:end, a:end}").unwrap_err();
        assert!(e.message.contains("duplicate"));
        assert_eq!((e.span.start.line, e.span.start.col), (1, 10));
        assert!(parse_orch("a.f + a.g").is_err());
    }

    #[test]
    fn let_bindings_expand_by_sort() {
        let src = "let S = !String.&{ok: ?Url, no: end};\n\
                   !String.+{buy: +{uhd: S, hd: S}, rent: spec{uhd: S, hd: S, sd: S, ld: S}}";
        let t = parse_type(src).unwrap();
        let s = parse_type("!String.&{ok: ?Url, no: end}").unwrap();
        let expected = SessionType::output(
            GroundType::string(),
            SessionType::select(vec![
                (l("buy"), SessionType::select(vec![(l("uhd"), s.clone()), (l("hd"), s.clone())]).unwrap()),
                (
                    l("rent"),
                    SessionType::spec(
                        vec![(l("uhd"), s.clone()), (l("hd"), s.clone()), (l("sd"), s.clone()), (l("ld"), s)],
                        false,
                    )
                    .unwrap(),
                ),
            ])
            .unwrap(),
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn later_bindings_are_not_visible_earlier() {
        let e = parse_type("let A = B; let B = end; A").unwrap_err();
        assert!(e.message.contains("unknown session type `B`"));
    }

    #[test]
    fn orchestrator_syntax() {
        let f = parse_orch("let f' = *.((ok.*.*) + no); *.((buy.(uhd.f' + hd.f')) + (rent.(sd.f' (+) ld.f')))").unwrap();
        let g1 = parse_orch("*.(ok.*.* + no.1)").unwrap();
        let expected = Orchestrator::io(
            Orchestrator::external(vec![
                (
                    l("buy"),
                    Orchestrator::external(vec![(l("uhd"), g1.clone()), (l("hd"), g1.clone())]).unwrap(),
                ),
                (
                    l("rent"),
                    Orchestrator::internal(vec![(l("sd"), g1.clone()), (l("ld"), g1)]).unwrap(),
                ),
            ])
            .unwrap(),
        );
        assert_eq!(f, expected);
        assert!(parse_orch("a + b (+) c").is_err());
    }

    #[test]
    fn delegation_types() {
        let t = parse_type("?(spec{a: !Nat}-).?Url").unwrap();
        match t {
            SessionType::InSession { pol, .. } => assert_eq!(pol, Polarity::Minus),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn process_syntax_round_trips() {
        let src = "request a:(!Nat)(k).k!<4>.request b:(!Bool)(k').k'!<true> \
                   | accept c:(?Nat.!Nat)(k).k?(x).k!<x>.accept d:(?Bool)(k').k'?(y)";
        let p = parse_process(src).unwrap();
        let printed = pretty_process(&p);
        assert_eq!(parse_process(&printed), Ok(p));
    }

    #[test]
    fn runtime_syntax_round_trips() {
        let src = "(new k)(orch k {*.(a (+) b)} | k^- spec<<a: k^-!<{s(1, \"x\") : Url}>, b: 0>> \
                   | k^+|>{a: k^+?(z), b: 0, c: k^+?((j)).j^-<|l})";
        let p = parse_process(src).unwrap();
        assert_eq!(parse_process(&pretty_process(&p)), Ok(p));
    }

    #[test]
    fn errors_point_into_the_input() {
        let e = parse_process("k!<1>.\n  k?(").unwrap_err();
        assert_eq!(e.span.start.line, 2);
        assert!(parse_process("foo").is_err());
    }
}
