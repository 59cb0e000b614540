//! Resolving `--rule` / `--complex` arguments into a checked rule and complex.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

use subrule::corpus::corpus;
use subrule::rulefile::{parse_complex, parse_rule, RuleFileError};
use subrule::{validate_complex, CheckedRule, TypedComplex, ValidationReport};

pub struct Input {
    pub rule: CheckedRule,
    pub complex: TypedComplex,
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn invalid(what: &str, path: &str, report: &ValidationReport) -> anyhow::Error {
    let codes: Vec<String> = report.violations.iter().map(|v| format!("{:?}: {}", v.code, v.message)).collect();
    anyhow!("{what} {path} is invalid:\n  {}", codes.join("\n  "))
}

/// Rule from a corpus name or a file; `Err(report)` when it parses but fails validation.
fn load_rule(arg: &str) -> Result<(CheckedRule, Option<TypedComplex>), ValidationOr> {
    if let Some(entry) = corpus(arg) {
        let rule = CheckedRule::new(entry.rule).expect("corpus rules validate");
        return Ok((rule, Some(entry.complex)));
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(ValidationOr::Other(anyhow!("`{arg}` is neither a corpus entry nor a readable file")));
    }
    let bytes = read(path).map_err(ValidationOr::Other)?;
    let rule = match parse_rule(&bytes) {
        Ok(r) => r,
        Err(RuleFileError::Validation(report)) => return Err(ValidationOr::Report(report)),
        Err(e) => return Err(ValidationOr::Other(anyhow!(e).context(format!("parsing {arg}")))),
    };
    Ok((CheckedRule::new(rule).map_err(ValidationOr::Report)?, None))
}

enum ValidationOr {
    Report(ValidationReport),
    Other(anyhow::Error),
}

fn load_complex(path: &Path, rule: &CheckedRule) -> Result<TypedComplex, ValidationOr> {
    let bytes = read(path).map_err(ValidationOr::Other)?;
    match parse_complex(&bytes, rule) {
        Ok(x) => Ok(x),
        Err(RuleFileError::Validation(report)) => Err(ValidationOr::Report(report)),
        Err(e) => Err(ValidationOr::Other(anyhow!(e).context(format!("parsing {}", path.display())))),
    }
}

impl Input {
    pub fn load(rule_arg: &str, complex: Option<&Path>) -> Result<Self> {
        let (rule, builtin) = match load_rule(rule_arg) {
            Ok(r) => r,
            Err(ValidationOr::Report(r)) => return Err(invalid("rule", rule_arg, &r)),
            Err(ValidationOr::Other(e)) => return Err(e),
        };
        let complex = match (complex, builtin) {
            (Some(path), _) => match load_complex(path, &rule) {
                Ok(x) => x,
                Err(ValidationOr::Report(r)) => return Err(invalid("complex", &path.display().to_string(), &r)),
                Err(ValidationOr::Other(e)) => return Err(e),
            },
            (None, Some(x)) => x,
            (None, None) => bail!("--complex is required when --rule is a file"),
        };
        Ok(Self { rule, complex })
    }
}

/// Validation outcome for the `validate` command. Malformed files are errors;
/// well-formed but invalid ones produce a failing report.
pub fn validation_report(rule_arg: &str, complex: Option<&Path>) -> Result<ValidationReport> {
    let (rule, builtin) = match load_rule(rule_arg) {
        Ok(r) => r,
        Err(ValidationOr::Report(r)) => return Ok(r),
        Err(ValidationOr::Other(e)) => return Err(e),
    };
    let complex = match (complex, builtin) {
        (Some(path), _) => match load_complex(path, &rule) {
            Ok(x) => x,
            Err(ValidationOr::Report(r)) => return Ok(r),
            Err(ValidationOr::Other(e)) => return Err(e),
        },
        (None, Some(x)) => x,
        (None, None) => return Ok(subrule::validate_rule(rule.rule())),
    };
    Ok(validate_complex(&rule, &complex))
}
