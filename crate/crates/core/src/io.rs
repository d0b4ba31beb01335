//! JSON formats for boxes and density matrices.
//!
//! Box files hold `p[x][y][a][b]`; in rational mode each entry is a
//! `"num/den"` string, in float mode a number.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::boxes::{idx, CorrBox};
use crate::error::{Error, Result};
use crate::quantum::{CMatrix, DensityMatrix};
use crate::scalar::{format_q, parse_q, Scalar, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub inputs_a: usize,
    pub inputs_b: usize,
    pub outputs_a: usize,
    pub outputs_b: usize,
}

impl Scenario {
    pub const BINARY: Scenario = Scenario { inputs_a: 2, inputs_b: 2, outputs_a: 2, outputs_b: 2 };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithmeticMode {
    Rational,
    Float,
}

#[derive(Debug, Serialize, Deserialize)]
struct BoxFile {
    scenario: Scenario,
    mode: ArithmeticMode,
    p: Vec<Vec<Vec<Vec<Value>>>>,
}

/// Serializes a box; rational mode requires exact entries.
pub fn box_to_json(b: &CorrBox, mode: ArithmeticMode) -> Result<String> {
    if mode == ArithmeticMode::Rational && !b.is_rational() {
        return Err(Error::NotRational);
    }
    let entry = |x, y, a, b_: usize| -> Value {
        match mode {
            ArithmeticMode::Rational => Value::String(format_q(b.exact_entry(x, y, a, b_).unwrap())),
            ArithmeticMode::Float => serde_json::json!(b.p(x, y, a, b_)),
        }
    };
    let p = (0..2)
        .map(|x| (0..2).map(|y| (0..2).map(|a| (0..2).map(|bb| entry(x, y, a, bb)).collect()).collect()).collect())
        .collect();
    Ok(serde_json::to_string_pretty(&BoxFile { scenario: Scenario::BINARY, mode, p })?)
}

fn shape_err(what: &str) -> Error {
    Error::Parse(format!("box table must be indexed p[x][y][a][b] with 2 values per index ({what})"))
}

pub fn box_from_json(s: &str) -> Result<CorrBox> {
    let f: BoxFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    if f.scenario != Scenario::BINARY {
        return Err(Error::InvalidBox(format!(
            "unsupported scenario {:?}; only two inputs and two outputs per party are supported",
            f.scenario
        )));
    }
    let mut vals: Vec<&Value> = Vec::with_capacity(16);
    if f.p.len() != 2 {
        return Err(shape_err("x"));
    }
    for px in &f.p {
        if px.len() != 2 {
            return Err(shape_err("y"));
        }
        for py in px {
            if py.len() != 2 {
                return Err(shape_err("a"));
            }
            for pa in py {
                if pa.len() != 2 {
                    return Err(shape_err("b"));
                }
                vals.extend(pa.iter());
            }
        }
    }
    // vals are already in (x, y, a, b) order, which is the storage order.
    debug_assert_eq!(idx(1, 0, 0, 0), 8);
    match f.mode {
        ArithmeticMode::Rational => {
            let e = vals
                .iter()
                .map(|v| match v {
                    Value::String(s) => parse_q(s),
                    Value::Number(n) if n.is_i64() => Ok(Q::from_i64(n.as_i64().unwrap())),
                    other => Err(Error::Parse(format!("rational entry must be a \"num/den\" string, got {other}"))),
                })
                .collect::<Result<Vec<Q>>>()?;
            CorrBox::from_exact(e)
        }
        ArithmeticMode::Float => {
            let mut p = [0.0; 16];
            for (slot, v) in p.iter_mut().zip(&vals) {
                *slot = match v {
                    Value::Number(n) => n.as_f64().ok_or_else(|| Error::Parse(format!("bad number {n}")))?,
                    Value::String(s) => parse_q(s)?.approx(),
                    other => return Err(Error::Parse(format!("float entry must be a number, got {other}"))),
                };
            }
            CorrBox::from_f64(p)
        }
    }
}

pub fn read_box(path: &Path) -> Result<CorrBox> {
    box_from_json(&fs::read_to_string(path)?)
}

pub fn write_box(path: &Path, b: &CorrBox, mode: ArithmeticMode) -> Result<()> {
    fs::write(path, box_to_json(b, mode)? + "\n")?;
    Ok(())
}

/// Rational mode when every entry is exact, float otherwise.
pub fn natural_mode(b: &CorrBox) -> ArithmeticMode {
    if b.is_rational() {
        ArithmeticMode::Rational
    } else {
        ArithmeticMode::Float
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct StateFile {
    /// Row-major matrix of `[re, im]` pairs.
    rho: Vec<Vec<[f64; 2]>>,
}

pub fn state_to_json(s: &DensityMatrix) -> Result<String> {
    let m = s.matrix();
    let rho = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
    Ok(serde_json::to_string_pretty(&StateFile { rho })?)
}

pub fn state_from_json(s: &str) -> Result<DensityMatrix> {
    let f: StateFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    let n = f.rho.len();
    if n == 0 || f.rho.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidState("density matrix must be square and nonempty".into()));
    }
    let m = CMatrix::from_fn(n, n, |i, j| Complex64::new(f.rho[i][j][0], f.rho[i][j][1]));
    DensityMatrix::new(m)
}

pub fn read_state(path: &Path) -> Result<DensityMatrix> {
    state_from_json(&fs::read_to_string(path)?)
}

pub fn write_state(path: &Path, s: &DensityMatrix) -> Result<()> {
    fs::write(path, state_to_json(s)? + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::pr_box;
    use crate::quantum::{noisy_chsh_box, paper_state};

    #[test]
    fn rational_round_trip() {
        let b = pr_box();
        let s = box_to_json(&b, ArithmeticMode::Rational).unwrap();
        assert!(s.contains("\"1/2\""));
        let back = box_from_json(&s).unwrap();
        assert_eq!(back.exact(), b.exact());
    }

    #[test]
    fn float_round_trip_is_bit_exact() {
        let b = noisy_chsh_box(0.37).unwrap();
        assert!(box_to_json(&b, ArithmeticMode::Rational).is_err());
        let back = box_from_json(&box_to_json(&b, ArithmeticMode::Float).unwrap()).unwrap();
        assert_eq!(back.entries(), b.entries());
    }

    #[test]
    fn rejects_bad_files() {
        assert!(box_from_json("{}").is_err());
        let s = box_to_json(&pr_box(), ArithmeticMode::Rational).unwrap().replace("\"inputs_a\": 2", "\"inputs_a\": 3");
        assert!(matches!(box_from_json(&s), Err(Error::InvalidBox(_))));
    }

    #[test]
    fn state_round_trip() {
        let s = paper_state();
        let back = state_from_json(&state_to_json(&s).unwrap()).unwrap();
        assert!((back.matrix() - s.matrix()).norm() < 1e-15);
    }
}
