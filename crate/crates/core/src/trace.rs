//! Per-call records of a cover run, serialized as JSON lines.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::cover_basic::next_function;
use crate::sets::{Bound, DegreeVector, GroundSet, SetFunction, Subset};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Basic,
    Uniform,
    UniformPair,
}

/// One recursive call. Sets are universe bitmasks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    /// 1-based.
    pub depth: usize,
    pub ground: Subset,
    pub k: i64,
    /// `m_i`, universe-indexed, zero outside `ground`.
    pub degrees: Vec<i64>,
    pub m_total: i64,
    /// `J_i` (uniform only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<Subset>,
    /// `{u : m_i(u) = K_{p_i}}`.
    pub tight_degree: Subset,
    /// Minimal maximizers and their transversal (basic only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub maximizers: Vec<Subset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transversal: Option<Subset>,
    pub hyperedge: Subset,
    /// `α⁽¹⁾..α⁽³⁾` (basic) or `α⁽¹⁾..α⁽⁵⁾` (uniform).
    pub alphas: Vec<Bound>,
    pub alpha: i64,
    /// 1-based indices `j` with `α⁽ʲ⁾ = α`.
    pub attained: Vec<u8>,
    pub contracted: Subset,
    #[serde(default)]
    pub oracle_calls: usize,
    #[serde(default)]
    pub lp_solves: usize,
}

impl Step {
    pub fn attains(&self, j: u8) -> bool {
        self.attained.contains(&j)
    }

    /// `α = α⁽ʲ⁾` and strictly below every other candidate.
    pub fn attains_only(&self, j: u8) -> bool {
        self.attained == [j]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverTrace {
    pub algorithm: Algorithm,
    /// Ground set of the input.
    pub ground: Subset,
    /// Vertices with `m(u) = 0`, contracted before the first call.
    pub preprocessed: Subset,
    /// `K_p` of the input.
    pub k: i64,
    pub steps: Vec<Step>,
    /// Number of calls including the final one on the empty ground set.
    pub depth: usize,
    pub oracle_calls: usize,
    pub lp_solves: usize,
}

pub type UniformTrace = CoverTrace;

#[derive(Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum Line {
    Header {
        algorithm: Algorithm,
        ground: Subset,
        preprocessed: Subset,
        k: i64,
        depth: usize,
        oracle_calls: usize,
        lp_solves: usize,
    },
    Step(Step),
}

impl CoverTrace {
    pub fn write_json_lines<W: Write>(&self, mut w: W) -> Result<()> {
        let header = Line::Header {
            algorithm: self.algorithm,
            ground: self.ground,
            preprocessed: self.preprocessed,
            k: self.k,
            depth: self.depth,
            oracle_calls: self.oracle_calls,
            lp_solves: self.lp_solves,
        };
        serde_json::to_writer(&mut w, &header)?;
        writeln!(w)?;
        for s in &self.steps {
            serde_json::to_writer(&mut w, &Line::Step(s.clone()))?;
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_json_lines(&self) -> String {
        let mut buf = Vec::new();
        self.write_json_lines(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("json is utf-8")
    }

    pub fn read_json_lines<R: BufRead>(r: R) -> Result<Self> {
        let mut trace: Option<CoverTrace> = None;
        for line in r.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<Line>(&line)? {
                Line::Header { algorithm, ground, preprocessed, k, depth, oracle_calls, lp_solves } => {
                    if trace.is_some() {
                        return Err(Error::Json("trace has two headers".into()));
                    }
                    trace = Some(CoverTrace {
                        algorithm,
                        ground,
                        preprocessed,
                        k,
                        steps: Vec::new(),
                        depth,
                        oracle_calls,
                        lp_solves,
                    });
                }
                Line::Step(s) => trace
                    .as_mut()
                    .ok_or_else(|| Error::Json("step before trace header".into()))?
                    .steps
                    .push(s),
            }
        }
        trace.ok_or_else(|| Error::Json("empty trace".into()))
    }
}

/// Indices `j` (1-based) where `alphas[j-1] = α`.
pub(crate) fn attained(alphas: &[Bound], alpha: i64) -> Vec<u8> {
    alphas
        .iter()
        .enumerate()
        .filter(|(_, &a)| a == Bound::Finite(alpha))
        .map(|(j, _)| j as u8 + 1)
        .collect()
}

/// Input of one recorded call, rebuilt from the hyperedges in a trace.
#[derive(Clone, Debug)]
pub struct CallInput {
    /// One function, or the two whose maximum is covered.
    pub functions: Vec<SetFunction>,
    pub m: DegreeVector,
}

impl CallInput {
    /// Pointwise maximum of `functions`, tabulated.
    pub fn p(&self) -> Result<SetFunction> {
        let mut it = self.functions.iter();
        let mut p = it.next().ok_or_else(|| Error::Invalid("no functions".into()))?.tabulate()?;
        for f in it {
            p = p.max(f)?.tabulate()?;
        }
        Ok(p)
    }

    pub fn ground(&self) -> &GroundSet {
        self.m.ground()
    }
}

/// Inputs of every call of `trace` (one more than the number of steps; the
/// last is the terminal call). Fails when the trace is inconsistent with
/// `(functions, m)`, e.g. a degree would go negative.
pub fn replay(functions: &[SetFunction], m: &DegreeVector, trace: &CoverTrace) -> Result<Vec<CallInput>> {
    let z0 = trace.preprocessed;
    let mut cur = CallInput {
        functions: functions.iter().map(|f| f.contract_tabulated(z0)).collect::<Result<_>>()?,
        m: m.remove(z0),
    };
    let mut out = Vec::with_capacity(trace.steps.len() + 1);
    for s in &trace.steps {
        let next = CallInput {
            functions: cur
                .functions
                .iter()
                .map(|f| next_function(f, s.hyperedge, s.alpha, s.contracted))
                .collect::<Result<_>>()?,
            m: cur.m.decrease(s.hyperedge, s.alpha)?.remove(s.contracted),
        };
        out.push(std::mem::replace(&mut cur, next));
    }
    out.push(cur);
    Ok(out)
}
