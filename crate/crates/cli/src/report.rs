use serde::Serialize;
use serde_json::Value;

use endoalg::EndoContext;

pub const SCHEMA: &str = "endoalg-report/1";

#[derive(Serialize)]
pub struct Fingerprint {
    pub rank: usize,
    pub matrix: String,
    pub moduli: String,
    pub index: String,
    pub max_depth: u32,
    pub enum_cap: usize,
}

impl Fingerprint {
    pub fn of(ctx: &EndoContext) -> Self {
        let rows: Vec<String> = ctx
            .matrix()
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        let moduli = ctx.moduli().iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",");
        Fingerprint {
            rank: ctx.rank(),
            matrix: format!("[{}]", rows.join(",")),
            moduli: format!("[{moduli}]"),
            index: ctx.index().to_string(),
            max_depth: ctx.max_depth(),
            enum_cap: ctx.enum_cap(),
        }
    }
}

#[derive(Serialize)]
pub struct Report<'a> {
    pub schema: &'static str,
    pub command: &'a [String],
    pub context: Fingerprint,
    pub result: &'a Value,
    pub verdict: Option<bool>,
}

/// What a command produced: the JSON payload, the plain-text rendering and an
/// optional verdict that drives the exit code.
pub struct Outcome {
    pub result: Value,
    pub text: Vec<String>,
    pub verdict: Option<bool>,
}

impl Outcome {
    pub fn new(result: Value, text: Vec<String>) -> Self {
        Outcome { result, text, verdict: None }
    }

    pub fn verdict(mut self, v: bool) -> Self {
        self.verdict = Some(v);
        self
    }
}
