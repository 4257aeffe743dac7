//! Flat text serialization of trained models.
//!
//! Line-oriented, whitespace separated, one header line with a format
//! version. Floats are printed with Rust's shortest round-trip formatting
//! so loading a saved model reproduces it bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::svm::kernel::KernelSpec;
use crate::svm::scale::MinMaxScaler;
use crate::svm::SvmModel;

const HEADER: &str = "phonewatch-model v1";

impl SvmModel {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(HEADER);
        out.push('\n');
        match self.kernel {
            KernelSpec::Linear => out.push_str("kernel linear\n"),
            KernelSpec::Polynomial {
                gamma,
                coef0,
                degree,
            } => {
                let _ = writeln!(out, "kernel polynomial {gamma} {coef0} {degree}");
            }
            KernelSpec::Rbf { gamma } => {
                let _ = writeln!(out, "kernel rbf {gamma}");
            }
            KernelSpec::Sigmoid { gamma, coef0 } => {
                let _ = writeln!(out, "kernel sigmoid {gamma} {coef0}");
            }
        }
        let _ = writeln!(out, "nu {}", self.nu);
        out.push_str("scale_min");
        for v in self.scaler.mins() {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
        out.push_str("scale_range");
        for v in self.scaler.ranges() {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
        let _ = writeln!(out, "bias {}", self.bias);
        for (sv, lambda) in self.support_vectors.iter().zip(&self.lambdas) {
            let _ = write!(out, "sv {lambda}");
            for v in sv {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<SvmModel> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty model file".into()))?;
        if header.trim() != HEADER {
            return Err(Error::Parse(format!(
                "unsupported model header {header:?}, expected {HEADER:?}"
            )));
        }

        let mut kernel = None;
        let mut nu = None;
        let mut mins = None;
        let mut ranges = None;
        let mut bias = None;
        let mut lambdas = Vec::new();
        let mut svs: Vec<Vec<f64>> = Vec::new();

        for (idx, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let tag = parts.next().unwrap();
            let rest: Vec<&str> = parts.collect();
            let ctx = |what: &str| Error::Parse(format!("model line {}: {what}", idx + 2));
            match tag {
                "kernel" => {
                    let kind = *rest.first().ok_or_else(|| ctx("missing kernel kind"))?;
                    let nums: Vec<f64> = rest[1..]
                        .iter()
                        .map(|s| s.parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| ctx("bad kernel parameter"))?;
                    kernel = Some(match (kind, nums.as_slice()) {
                        ("linear", []) => KernelSpec::Linear,
                        ("polynomial", &[gamma, coef0, degree]) => KernelSpec::Polynomial {
                            gamma,
                            coef0,
                            degree,
                        },
                        ("rbf", &[gamma]) => KernelSpec::Rbf { gamma },
                        ("sigmoid", &[gamma, coef0]) => KernelSpec::Sigmoid { gamma, coef0 },
                        _ => return Err(ctx("malformed kernel line")),
                    });
                }
                "nu" => {
                    nu = Some(parse_floats(&rest, 1, || ctx("bad nu"))?[0]);
                }
                "scale_min" => mins = Some(parse_floats(&rest, rest.len(), || ctx("bad scale_min"))?),
                "scale_range" => {
                    ranges = Some(parse_floats(&rest, rest.len(), || ctx("bad scale_range"))?)
                }
                "bias" => bias = Some(parse_floats(&rest, 1, || ctx("bad bias"))?[0]),
                "sv" => {
                    let nums = parse_floats(&rest, rest.len(), || ctx("bad support vector"))?;
                    if nums.len() < 2 {
                        return Err(ctx("support vector needs lambda and coordinates"));
                    }
                    lambdas.push(nums[0]);
                    svs.push(nums[1..].to_vec());
                }
                other => return Err(ctx(&format!("unknown tag {other:?}"))),
            }
        }

        let kernel = kernel.ok_or_else(|| Error::Parse("model missing kernel line".into()))?;
        let nu = nu.ok_or_else(|| Error::Parse("model missing nu line".into()))?;
        let mins = mins.ok_or_else(|| Error::Parse("model missing scale_min line".into()))?;
        let ranges = ranges.ok_or_else(|| Error::Parse("model missing scale_range line".into()))?;
        let bias = bias.ok_or_else(|| Error::Parse("model missing bias line".into()))?;
        if svs.is_empty() {
            return Err(Error::Parse("model has no support vectors".into()));
        }
        let dims = mins.len();
        if ranges.len() != dims || svs.iter().any(|sv| sv.len() != dims) {
            return Err(Error::Parse("inconsistent dimensions in model file".into()));
        }
        Ok(SvmModel {
            kernel,
            nu,
            scaler: MinMaxScaler::from_parts(mins, ranges),
            support_vectors: svs,
            lambdas,
            bias,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<SvmModel> {
        let text = std::fs::read_to_string(path)?;
        SvmModel::from_text(&text)
    }
}

fn parse_floats(
    parts: &[&str],
    expect: usize,
    ctx: impl Fn() -> Error,
) -> Result<Vec<f64>> {
    if parts.len() != expect {
        return Err(ctx());
    }
    parts
        .iter()
        .map(|s| s.parse::<f64>().map_err(|_| ctx()))
        .collect()
}
