//! Arithmetic expressions in scenario files.
//!
//! Expressions are compiled once with `fasteval` and evaluated against a
//! fixed list of argument names (`x, y, z` for fields, `s` for curves,
//! `s1, s2` for surfaces). Besides the `fasteval` builtins they may use
//! `pi`, `tau`, `sqrt`, `exp`, `atan2`, `hypot` and the scenario's `[vars]`.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use fasteval::{Compiler, Evaler, Instruction, Slab};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("cannot use expression `{src}`: {message}")]
pub struct ExprError {
    pub src: String,
    pub message: String,
}

struct Compiled {
    slab: Slab,
    instr: Instruction,
}

/// A compiled expression of named arguments.
#[derive(Clone)]
pub struct Expr {
    src: String,
    args: Vec<String>,
    vars: Arc<BTreeMap<String, f64>>,
    compiled: Arc<Compiled>,
    positional: bool,
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Expr").field("src", &self.src).field("args", &self.args).finish()
    }
}

fn builtin(name: &str, args: &[f64]) -> Option<f64> {
    Some(match (name, args) {
        ("pi", []) => PI,
        ("tau", []) => TAU,
        ("sqrt", [a]) => a.sqrt(),
        ("exp", [a]) => a.exp(),
        ("ln", [a]) => a.ln(),
        ("atan2", [a, b]) => a.atan2(*b),
        ("hypot", [a, b]) => a.hypot(*b),
        _ => return None,
    })
}

impl Expr {
    /// Compiles `src` and checks that it evaluates at the origin of its arguments.
    pub fn new(src: &str, args: &[&str], vars: Arc<BTreeMap<String, f64>>) -> Result<Self, ExprError> {
        let err = |message: String| ExprError { src: src.to_string(), message };
        let parser = fasteval::Parser::new();
        let mut slab = Slab::new();
        let instr = parser
            .parse(src, &mut slab.ps)
            .map_err(|e| err(e.to_string()))?
            .from(&slab.ps)
            .compile(&slab.ps, &mut slab.cs);
        let mut e = Expr {
            src: src.to_string(),
            args: args.iter().map(|s| s.to_string()).collect(),
            vars,
            compiled: Arc::new(Compiled { slab, instr }),
            positional: false,
        };
        let mut used = false;
        let zeros = vec![0.0; args.len()];
        e.eval_with(&zeros, &mut used).map_err(err)?;
        e.positional = used;
        Ok(e)
    }

    fn eval_with(&self, values: &[f64], used: &mut bool) -> Result<f64, String> {
        let mut ns = |name: &str, a: Vec<f64>| -> Option<f64> {
            if a.is_empty() {
                if let Some(i) = self.args.iter().position(|n| n == name) {
                    *used = true;
                    return Some(values[i]);
                }
                if let Some(v) = self.vars.get(name) {
                    return Some(*v);
                }
            }
            builtin(name, &a)
        };
        let c = &self.compiled;
        c.instr.eval(&c.slab, &mut ns).map_err(|e| e.to_string())
    }

    /// Value at `values` (matching the argument list); `NaN` if evaluation fails.
    pub fn eval(&self, values: &[f64]) -> f64 {
        let mut used = false;
        self.eval_with(values, &mut used).unwrap_or(f64::NAN)
    }

    /// Whether the expression reads any of its arguments.
    pub fn depends_on_args(&self) -> bool {
        self.positional
    }

    pub fn source(&self) -> &str {
        &self.src
    }
}

/// Evaluates a constant expression (no arguments).
pub fn constant(src: &str, vars: &Arc<BTreeMap<String, f64>>) -> Result<f64, ExprError> {
    let e = Expr::new(src, &[], vars.clone())?;
    let v = e.eval(&[]);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ExprError { src: src.to_string(), message: "value is not finite".into() })
    }
}
