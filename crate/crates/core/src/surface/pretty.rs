use std::fmt::Write;

use crate::syntax::{Arms, Expression, GroundValue, Orchestrator, Process, SessionType};

pub fn pretty_type(t: &SessionType) -> String {
    let mut s = String::new();
    write_type(&mut s, t);
    s
}

fn write_cont(out: &mut String, t: &SessionType) {
    if !t.is_end() {
        out.push('.');
        write_type(out, t);
    }
}

fn write_type_arms(out: &mut String, arms: &Arms<SessionType>) {
    for (i, (l, t)) in arms.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{l}: ");
        write_type(out, t);
    }
}

fn write_type(out: &mut String, t: &SessionType) {
    match t {
        SessionType::End => out.push_str("end"),
        SessionType::InValue(g, c) | SessionType::OutValue(g, c) => {
            out.push(if matches!(t, SessionType::InValue(..)) { '?' } else { '!' });
            out.push_str(g.name());
            write_cont(out, c);
        }
        SessionType::InSession { carried, pol, cont } | SessionType::OutSession { carried, pol, cont } => {
            out.push_str(if matches!(t, SessionType::InSession { .. }) { "?(" } else { "!(" });
            write_type(out, carried);
            out.push(pol.sign());
            out.push(')');
            write_cont(out, cont);
        }
        SessionType::Branch(arms) => {
            out.push_str("&{");
            write_type_arms(out, arms);
            out.push('}');
        }
        SessionType::Select(arms) => {
            out.push_str("+{");
            write_type_arms(out, arms);
            out.push('}');
        }
        SessionType::Spec { arms, prioritized: false } => {
            out.push_str("spec{");
            write_type_arms(out, arms);
            out.push('}');
        }
        SessionType::Spec { arms, prioritized: true } => {
            out.push_str("spec<<");
            write_type_arms(out, arms);
            out.push_str(">>");
        }
    }
}

pub fn pretty_orch(f: &Orchestrator) -> String {
    let mut s = String::new();
    write_orch(&mut s, f);
    s
}

fn write_orch(out: &mut String, f: &Orchestrator) {
    match f {
        Orchestrator::External(arms) | Orchestrator::Internal(arms) => {
            let sep = if matches!(f, Orchestrator::External(_)) { " + " } else { " (+) " };
            for (i, (l, g)) in arms.iter().enumerate() {
                if i > 0 {
                    out.push_str(sep);
                }
                write_orch_prim(out, &Orchestrator::prefix(l.clone(), g.clone()));
            }
        }
        _ => write_orch_prim(out, f),
    }
}

fn write_orch_prim(out: &mut String, f: &Orchestrator) {
    match f {
        Orchestrator::Idle => out.push('1'),
        Orchestrator::Io(g) if g.is_idle() => out.push('*'),
        Orchestrator::Io(g) => {
            out.push_str("*.");
            write_orch_prim(out, g);
        }
        Orchestrator::Prefix(l, g) if g.is_idle() => out.push_str(l.as_str()),
        Orchestrator::Prefix(l, g) => {
            let _ = write!(out, "{l}.");
            write_orch_prim(out, g);
        }
        Orchestrator::External(_) | Orchestrator::Internal(_) => {
            out.push('(');
            write_orch(out, f);
            out.push(')');
        }
    }
}

pub fn pretty_value(v: &GroundValue) -> String {
    let mut s = String::new();
    write_value(&mut s, v);
    s
}

fn write_value(out: &mut String, v: &GroundValue) {
    match v {
        GroundValue::Nat(n) => {
            let _ = write!(out, "{n}");
        }
        GroundValue::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        GroundValue::Str(s) => write_string(out, s),
        GroundValue::Sym { tag, args, ty } => {
            let _ = write!(out, "{{{tag}");
            if !args.is_empty() {
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, a);
                }
                out.push(')');
            }
            let _ = write!(out, " : {ty}}}");
        }
    }
}

fn write_string(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            _ => out.push(c),
        }
    }
    out.push('"');
}

pub fn pretty_expr(e: &Expression) -> String {
    let mut s = String::new();
    write_expr(&mut s, e);
    s
}

fn write_expr(out: &mut String, e: &Expression) {
    match e {
        Expression::Literal(v) => write_value(out, v),
        Expression::Var(x) => out.push_str(x),
        Expression::Apply(f, args) => {
            let _ = write!(out, "{f}(");
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, a);
            }
            out.push(')');
        }
    }
}

pub fn pretty_process(p: &Process) -> String {
    let mut s = String::new();
    write_proc(&mut s, p);
    s
}

fn write_proc(out: &mut String, p: &Process) {
    match p {
        Process::Par(a, b) => {
            write_proc(out, a);
            out.push_str(" | ");
            write_prefixed(out, b);
        }
        _ => write_prefixed(out, p),
    }
}

fn write_proc_cont(out: &mut String, p: &Process) {
    if *p != Process::Inact {
        out.push('.');
        write_prefixed(out, p);
    }
}

fn write_proc_arms(out: &mut String, arms: &Arms<Process>) {
    for (i, (l, q)) in arms.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{l}: ");
        write_proc(out, q);
    }
}

fn write_prefixed(out: &mut String, p: &Process) {
    match p {
        Process::Inact => out.push('0'),
        Process::Par(..) => {
            out.push('(');
            write_proc(out, p);
            out.push(')');
        }
        Process::Request { port, ty, chan, body } | Process::Accept { port, ty, chan, body } => {
            let kw = if matches!(p, Process::Request { .. }) { "request" } else { "accept" };
            let _ = write!(out, "{kw} {port}:(");
            write_type(out, ty);
            let _ = write!(out, ")({chan})");
            write_proc_cont(out, body);
        }
        Process::Send { chan, expr, cont } => {
            let _ = write!(out, "{chan}!<");
            write_expr(out, expr);
            out.push('>');
            write_proc_cont(out, cont);
        }
        Process::Recv { chan, var, cont } => {
            let _ = write!(out, "{chan}?({var})");
            write_proc_cont(out, cont);
        }
        Process::Throw { chan, sent, cont } => {
            let _ = write!(out, "{chan}!<<{sent}>>");
            write_proc_cont(out, cont);
        }
        Process::Catch { chan, bound, cont } => {
            let _ = write!(out, "{chan}?(({bound}))");
            write_proc_cont(out, cont);
        }
        Process::Select { chan, label, cont } => {
            let _ = write!(out, "{chan}<|{label}");
            write_proc_cont(out, cont);
        }
        Process::Branch { chan, arms } => {
            let _ = write!(out, "{chan}|>{{");
            write_proc_arms(out, arms);
            out.push('}');
        }
        Process::Spec { chan, arms, prioritized } => {
            let _ = write!(out, "{chan} spec{}", if *prioritized { "<<" } else { "{" });
            write_proc_arms(out, arms);
            out.push_str(if *prioritized { ">>" } else { "}" });
        }
        Process::If { cond, then, els } => {
            out.push_str("if ");
            write_expr(out, cond);
            out.push_str(" then ");
            write_prefixed(out, then);
            out.push_str(" else ");
            write_prefixed(out, els);
        }
        Process::Orch { chan, orch } => {
            let _ = write!(out, "orch {chan} {{");
            write_orch(out, orch);
            out.push('}');
        }
        Process::Restrict { chan, body } => {
            let _ = write!(out, "(new {chan})");
            write_prefixed(out, body);
        }
    }
}
