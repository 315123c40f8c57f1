use std::collections::BTreeMap;

use thiserror::Error;

use super::types::GroundType;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroundValue {
    Nat(u64),
    Bool(bool),
    Str(String),
    /// Opaque value produced by symbolic evaluation.
    Sym {
        tag: String,
        args: Vec<GroundValue>,
        ty: GroundType,
    },
}

impl GroundValue {
    pub fn ground_type(&self) -> GroundType {
        match self {
            GroundValue::Nat(_) => GroundType::nat(),
            GroundValue::Bool(_) => GroundType::bool(),
            GroundValue::Str(_) => GroundType::string(),
            GroundValue::Sym { ty, .. } => ty.clone(),
        }
    }

    /// Placeholder value used when a receive is discharged without a sender.
    pub fn default_for(g: &GroundType) -> GroundValue {
        match g.name() {
            "Nat" => GroundValue::Nat(0),
            "Bool" => GroundValue::Bool(false),
            "String" => GroundValue::Str(String::new()),
            _ => GroundValue::Sym {
                tag: "default".into(),
                args: vec![],
                ty: g.clone(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expression {
    Literal(GroundValue),
    Var(String),
    Apply(String, Vec<Expression>),
}

impl Expression {
    pub fn nat(n: u64) -> Self {
        Expression::Literal(GroundValue::Nat(n))
    }

    pub fn bool(b: bool) -> Self {
        Expression::Literal(GroundValue::Bool(b))
    }

    pub fn string(s: impl Into<String>) -> Self {
        Expression::Literal(GroundValue::Str(s.into()))
    }

    pub fn var(x: impl Into<String>) -> Self {
        Expression::Var(x.into())
    }

    pub fn apply(f: impl Into<String>, args: Vec<Expression>) -> Self {
        Expression::Apply(f.into(), args)
    }

    pub fn free_vars(&self, out: &mut Vec<String>) {
        match self {
            Expression::Literal(_) => {}
            Expression::Var(x) => {
                if !out.contains(x) {
                    out.push(x.clone())
                }
            }
            Expression::Apply(_, args) => args.iter().for_each(|a| a.free_vars(out)),
        }
    }

    pub fn has_var(&self, x: &str) -> bool {
        match self {
            Expression::Literal(_) => false,
            Expression::Var(y) => y == x,
            Expression::Apply(_, args) => args.iter().any(|a| a.has_var(x)),
        }
    }

    pub fn subst(&self, x: &str, v: &GroundValue) -> Expression {
        match self {
            Expression::Var(y) if y == x => Expression::Literal(v.clone()),
            Expression::Literal(_) | Expression::Var(_) => self.clone(),
            Expression::Apply(f, args) => {
                Expression::Apply(f.clone(), args.iter().map(|a| a.subst(x, v)).collect())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("`{name}` expects {expected} argument(s), got {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("argument {index} of `{name}` has type {found}, expected {expected}")]
    ArgumentType {
        name: String,
        index: usize,
        expected: GroundType,
        found: GroundType,
    },
}

/// Signature of a pure function, with optional concrete results.
///
/// Argument tuples missing from `cases` evaluate symbolically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FnSig {
    pub params: Vec<GroundType>,
    pub result: GroundType,
    pub cases: BTreeMap<Vec<GroundValue>, GroundValue>,
}

impl FnSig {
    pub fn new(params: Vec<GroundType>, result: GroundType) -> Self {
        FnSig {
            params,
            result,
            cases: BTreeMap::new(),
        }
    }
}

/// Expression variables in scope with their ground types.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Context(BTreeMap<String, GroundType>);

impl Context {
    pub fn new() -> Self {
        Context::default()
    }

    pub fn get(&self, x: &str) -> Option<&GroundType> {
        self.0.get(x)
    }

    /// Extends the context; an existing binding of `x` is shadowed.
    pub fn with(&self, x: &str, g: GroundType) -> Context {
        let mut c = self.clone();
        c.0.insert(x.to_string(), g);
        c
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &GroundType)> {
        self.0.iter()
    }
}

/// Named pure functions available to expressions.
///
/// Besides the registered functions, applying the name of a ground type other
/// than `Nat`, `Bool` or `String` to a single argument wraps that argument as
/// a value of the named type, e.g. `CcNumber(1234)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionTable {
    fns: BTreeMap<String, FnSig>,
    ground_types: Vec<GroundType>,
}

impl Default for FunctionTable {
    fn default() -> Self {
        let g = GroundType::new;
        let mut t = FunctionTable::empty();
        t.register("available", FnSig::new(vec![g("String")], g("Bool")));
        t.register("amount", FnSig::new(vec![g("String")], g("Amount")));
        t.register("url", FnSig::new(vec![g("String")], g("Url")));
        t.register("IDtrans", FnSig::new(vec![g("Amount"), g("CcNumber")], g("TransIDnum")));
        t
    }
}

impl FunctionTable {
    pub fn empty() -> Self {
        FunctionTable {
            fns: BTreeMap::new(),
            ground_types: GroundType::builtins(),
        }
    }

    pub fn register(&mut self, name: &str, sig: FnSig) {
        for g in sig.params.iter().chain(std::iter::once(&sig.result)) {
            self.register_ground_type(g.clone());
        }
        self.fns.insert(name.to_string(), sig);
    }

    pub fn register_ground_type(&mut self, g: GroundType) {
        if !self.ground_types.contains(&g) {
            self.ground_types.push(g);
        }
    }

    pub fn ground_types(&self) -> &[GroundType] {
        &self.ground_types
    }

    pub fn signature(&self, name: &str) -> Option<&FnSig> {
        self.fns.get(name)
    }

    pub fn sig_mut(&mut self, name: &str) -> Option<&mut FnSig> {
        self.fns.get_mut(name)
    }

    pub fn coercion(&self, name: &str) -> Option<GroundType> {
        let g = GroundType::new(name);
        let primitive = matches!(name, "Nat" | "Bool" | "String");
        (!primitive && self.ground_types.contains(&g)).then_some(g)
    }

    /// Ground type of `e` under `gamma`.
    pub fn type_of(&self, gamma: &Context, e: &Expression) -> Result<GroundType, EvalError> {
        match e {
            Expression::Literal(v) => Ok(v.ground_type()),
            Expression::Var(x) => gamma
                .get(x)
                .cloned()
                .ok_or_else(|| EvalError::UnboundVariable(x.clone())),
            Expression::Apply(f, args) => {
                let arg_types = args
                    .iter()
                    .map(|a| self.type_of(gamma, a))
                    .collect::<Result<Vec<_>, _>>()?;
                if let Some(sig) = self.fns.get(f) {
                    check_args(f, &sig.params, &arg_types)?;
                    Ok(sig.result.clone())
                } else if let Some(g) = self.coercion(f) {
                    if args.len() != 1 {
                        return Err(EvalError::ArityMismatch {
                            name: f.clone(),
                            expected: 1,
                            found: args.len(),
                        });
                    }
                    Ok(g)
                } else {
                    Err(EvalError::UnknownFunction(f.clone()))
                }
            }
        }
    }

    pub fn eval(&self, e: &Expression) -> Result<GroundValue, EvalError> {
        match e {
            Expression::Literal(v) => Ok(v.clone()),
            Expression::Var(x) => Err(EvalError::UnboundVariable(x.clone())),
            Expression::Apply(f, args) => {
                let vals = args
                    .iter()
                    .map(|a| self.eval(a))
                    .collect::<Result<Vec<_>, _>>()?;
                if let Some(sig) = self.fns.get(f) {
                    let tys: Vec<GroundType> = vals.iter().map(|v| v.ground_type()).collect();
                    check_args(f, &sig.params, &tys)?;
                    if let Some(v) = sig.cases.get(&vals) {
                        return Ok(v.clone());
                    }
                    Ok(GroundValue::Sym {
                        tag: f.clone(),
                        args: vals,
                        ty: sig.result.clone(),
                    })
                } else if let Some(g) = self.coercion(f) {
                    if vals.len() != 1 {
                        return Err(EvalError::ArityMismatch {
                            name: f.clone(),
                            expected: 1,
                            found: vals.len(),
                        });
                    }
                    Ok(GroundValue::Sym {
                        tag: f.clone(),
                        args: vals,
                        ty: g,
                    })
                } else {
                    Err(EvalError::UnknownFunction(f.clone()))
                }
            }
        }
    }
}

fn check_args(name: &str, params: &[GroundType], found: &[GroundType]) -> Result<(), EvalError> {
    if params.len() != found.len() {
        return Err(EvalError::ArityMismatch {
            name: name.to_string(),
            expected: params.len(),
            found: found.len(),
        });
    }
    for (i, (p, a)) in params.iter().zip(found).enumerate() {
        if p != a {
            return Err(EvalError::ArgumentType {
                name: name.to_string(),
                index: i,
                expected: p.clone(),
                found: a.clone(),
            });
        }
    }
    Ok(())
}

/// Evaluates a closed expression.
pub fn eval_expr(env: &FunctionTable, e: &Expression) -> Result<GroundValue, EvalError> {
    env.eval(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_evaluates_to_itself() {
        let t = FunctionTable::default();
        assert_eq!(eval_expr(&t, &Expression::nat(4)), Ok(GroundValue::Nat(4)));
    }

    #[test]
    fn registered_function_without_case_is_symbolic() {
        let t = FunctionTable::default();
        let e = Expression::apply("available", vec![Expression::string("zootropolis")]);
        // The expected value is written out from the table's signature.
        let expected = GroundValue::Sym {
            tag: "available".into(),
            args: vec![GroundValue::Str("zootropolis".into())],
            ty: GroundType::bool(),
        };
        assert_eq!(eval_expr(&t, &e), Ok(expected));
    }

    #[test]
    fn concrete_cases_take_precedence() {
        let mut t = FunctionTable::default();
        t.sig_mut("available")
            .unwrap()
            .cases
            .insert(vec![GroundValue::Str("x".into())], GroundValue::Bool(true));
        let e = Expression::apply("available", vec![Expression::string("x")]);
        assert_eq!(eval_expr(&t, &e), Ok(GroundValue::Bool(true)));
    }

    #[test]
    fn evaluation_errors() {
        let t = FunctionTable::default();
        assert_eq!(
            eval_expr(&t, &Expression::var("x")),
            Err(EvalError::UnboundVariable("x".into()))
        );
        assert!(matches!(
            eval_expr(&t, &Expression::apply("url", vec![])),
            Err(EvalError::ArityMismatch { expected: 1, found: 0, .. })
        ));
        assert!(matches!(
            eval_expr(&t, &Expression::apply("nope", vec![])),
            Err(EvalError::UnknownFunction(_))
        ));
    }

    #[test]
    fn ground_type_names_coerce() {
        let t = FunctionTable::default();
        let e = Expression::apply("CcNumber", vec![Expression::nat(1234)]);
        assert_eq!(t.type_of(&Context::new(), &e), Ok(GroundType::new("CcNumber")));
        let v = eval_expr(&t, &e).unwrap();
        assert_eq!(v.ground_type(), GroundType::new("CcNumber"));
    }

    #[test]
    fn typing_follows_signatures() {
        let t = FunctionTable::default();
        let gamma = Context::new()
            .with("x", GroundType::new("Amount"))
            .with("cc", GroundType::new("CcNumber"));
        let e = Expression::apply("IDtrans", vec![Expression::var("x"), Expression::var("cc")]);
        assert_eq!(t.type_of(&gamma, &e), Ok(GroundType::new("TransIDnum")));
        let bad = Expression::apply("IDtrans", vec![Expression::var("cc"), Expression::var("x")]);
        assert!(matches!(t.type_of(&gamma, &bad), Err(EvalError::ArgumentType { .. })));
    }
}
