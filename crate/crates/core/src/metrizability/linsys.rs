//! Rational linear inequality systems in the canonical form `Σ c_i x_i ≥ d`,
//! feasibility verdicts, and their exact verification.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// One canonical row `Σ coeffs ≥ bound`. Coefficients are sorted by
/// variable index and nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Row {
    pub coeffs: Vec<(usize, Rational)>,
    pub bound: Rational,
}

impl Row {
    fn normalized(terms: impl IntoIterator<Item = (usize, Rational)>, bound: Rational) -> Self {
        let mut merged: BTreeMap<usize, Rational> = BTreeMap::new();
        for (var, c) in terms {
            *merged.entry(var).or_insert_with(Rational::zero) += c;
        }
        let coeffs = merged.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Row { coeffs, bound }
    }

    /// Left-hand side evaluated at `x`.
    pub fn evaluate(&self, x: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .fold(Rational::zero(), |acc, (j, c)| acc + c * &x[*j])
    }
}

/// A system of rational inequalities over named variables, each row tagged
/// with the rule that generated it.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearSystem {
    variables: Vec<String>,
    index: HashMap<String, usize>,
    rows: Vec<Row>,
    tags: Vec<String>,
}

impl LinearSystem {
    pub fn new<S: Into<String>>(variables: impl IntoIterator<Item = S>) -> Result<Self> {
        let mut sys = LinearSystem::default();
        for v in variables {
            sys.add_variable(v)?;
        }
        Ok(sys)
    }

    pub fn add_variable(&mut self, name: impl Into<String>) -> Result<usize> {
        let name = name.into();
        if name.is_empty() || name.contains(|c: char| c.is_whitespace() || c == '*' || c == '#') {
            return Err(Error::MalformedSystem(format!("invalid variable name `{name}`")));
        }
        if self.index.contains_key(&name) {
            return Err(Error::MalformedSystem(format!("duplicate variable `{name}`")));
        }
        let id = self.variables.len();
        self.index.insert(name.clone(), id);
        self.variables.push(name);
        Ok(id)
    }

    /// Adds `Σ terms ≥ bound`. Repeated variables are merged.
    pub fn add_ge(
        &mut self,
        terms: impl IntoIterator<Item = (usize, Rational)>,
        bound: Rational,
        tag: impl Into<String>,
    ) -> Result<usize> {
        let row = Row::normalized(terms, bound);
        if let Some(&(j, _)) = row.coeffs.iter().find(|(j, _)| *j >= self.variables.len()) {
            return Err(Error::MalformedSystem(format!("undeclared variable index {j}")));
        }
        self.rows.push(row);
        self.tags.push(tag.into());
        Ok(self.rows.len() - 1)
    }

    /// Adds `Σ terms ≤ bound`, stored negated.
    pub fn add_le(
        &mut self,
        terms: impl IntoIterator<Item = (usize, Rational)>,
        bound: Rational,
        tag: impl Into<String>,
    ) -> Result<usize> {
        self.add_ge(terms.into_iter().map(|(j, c)| (j, -c)), -bound, tag)
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    pub fn tag(&self, row: usize) -> &str {
        &self.tags[row]
    }

    pub fn set_tag(&mut self, row: usize, tag: impl Into<String>) {
        self.tags[row] = tag.into();
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Whether a row with exactly these coefficients and bound is present.
    pub fn contains_row(&self, terms: &[(usize, Rational)], bound: &Rational) -> bool {
        let probe = Row::normalized(terms.iter().cloned(), bound.clone());
        self.rows.contains(&probe)
    }

    /// Serializes to the `linsys v1` text format.
    pub fn to_text(&self) -> String {
        let mut out = String::from("linsys v1\n");
        for v in &self.variables {
            let _ = writeln!(out, "var {v}");
        }
        for row in &self.rows {
            let _ = write!(out, "row {} :", row.bound);
            for (j, c) in &row.coeffs {
                let _ = write!(out, " {c}*{}", self.variables[*j]);
            }
            out.push('\n');
        }
        for (i, tag) in self.tags.iter().enumerate() {
            if !tag.is_empty() {
                let _ = writeln!(out, "tag {i} {tag}");
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut sys = LinearSystem::default();
        let mut header = false;
        let mut pending_tags = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line_no = no + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !header {
                if line != "linsys v1" {
                    return Err(Error::parse(line_no, "expected header `linsys v1`"));
                }
                header = true;
                continue;
            }
            let (keyword, rest) = line.split_once(' ').unwrap_or((line, ""));
            match keyword {
                "var" => {
                    for name in rest.split_whitespace() {
                        sys.add_variable(name)
                            .map_err(|e| Error::parse(line_no, e.to_string()))?;
                    }
                }
                "row" => {
                    let (bound, terms) = rest
                        .split_once(':')
                        .ok_or_else(|| Error::parse(line_no, "expected `:` in row"))?;
                    let bound = parse_rational(bound.trim(), line_no)?;
                    let mut parsed = Vec::new();
                    for term in terms.split_whitespace() {
                        let (c, name) = term.split_once('*').ok_or_else(|| {
                            Error::parse(line_no, format!("expected coeff*name, got `{term}`"))
                        })?;
                        let j = sys.variable_index(name).ok_or_else(|| {
                            Error::parse(line_no, format!("undeclared variable `{name}`"))
                        })?;
                        parsed.push((j, parse_rational(c, line_no)?));
                    }
                    sys.add_ge(parsed, bound, "")
                        .map_err(|e| Error::parse(line_no, e.to_string()))?;
                }
                "tag" => {
                    let (idx, text) = rest.split_once(' ').unwrap_or((rest, ""));
                    let idx: usize = idx
                        .parse()
                        .map_err(|_| Error::parse(line_no, format!("invalid row index `{idx}`")))?;
                    pending_tags.push((line_no, idx, text.to_string()));
                }
                other => {
                    return Err(Error::parse(line_no, format!("unknown directive `{other}`")));
                }
            }
        }
        if !header {
            return Err(Error::parse(1, "missing header `linsys v1`"));
        }
        for (line_no, idx, text) in pending_tags {
            if idx >= sys.num_rows() {
                return Err(Error::parse(line_no, format!("tag for missing row {idx}")));
            }
            sys.tags[idx] = text;
        }
        Ok(sys)
    }
}

fn parse_rational(s: &str, line: usize) -> Result<Rational> {
    Rational::from_str(s).map_err(|_| Error::parse(line, format!("invalid rational `{s}`")))
}

/// Outcome of a feasibility decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// A point satisfying every row, indexed like the system's variables.
    Feasible { witness: Vec<Rational> },
    /// Nonnegative row multipliers whose combination reads `0 ≥ positive`.
    Infeasible { certificate: BTreeMap<usize, Rational> },
}

impl Verdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Verdict::Feasible { .. })
    }

    pub fn is_infeasible(&self) -> bool {
        !self.is_feasible()
    }

    /// `witness` lines for a feasible verdict, `cert` lines otherwise.
    pub fn to_text(&self, sys: &LinearSystem) -> String {
        let mut out = String::new();
        match self {
            Verdict::Feasible { witness } => {
                for (name, value) in sys.variables().iter().zip(witness) {
                    let _ = writeln!(out, "witness {name} {value}");
                }
            }
            Verdict::Infeasible { certificate } => {
                for (row, y) in certificate {
                    let _ = writeln!(out, "cert {row} {y}");
                }
            }
        }
        out
    }

    pub fn from_text(text: &str, sys: &LinearSystem) -> Result<Self> {
        let mut witness: Vec<Option<Rational>> = vec![None; sys.num_vars()];
        let mut certificate = BTreeMap::new();
        let (mut saw_witness, mut saw_cert) = (false, false);
        for (no, raw) in text.lines().enumerate() {
            let line_no = no + 1;
            let words: Vec<&str> = raw.split_whitespace().collect();
            match words.as_slice() {
                [] => {}
                [w, ..] if w.starts_with('#') => {}
                ["witness", name, value] => {
                    saw_witness = true;
                    let j = sys.variable_index(name).ok_or_else(|| {
                        Error::parse(line_no, format!("undeclared variable `{name}`"))
                    })?;
                    witness[j] = Some(parse_rational(value, line_no)?);
                }
                ["cert", row, value] => {
                    saw_cert = true;
                    let row: usize = row
                        .parse()
                        .map_err(|_| Error::parse(line_no, format!("invalid row index `{row}`")))?;
                    if certificate.insert(row, parse_rational(value, line_no)?).is_some() {
                        return Err(Error::parse(line_no, format!("duplicate multiplier for row {row}")));
                    }
                }
                _ => return Err(Error::parse(line_no, format!("unrecognized line `{raw}`"))),
            }
        }
        match (saw_witness, saw_cert) {
            (true, false) => {
                let witness = witness
                    .into_iter()
                    .enumerate()
                    .map(|(j, w)| {
                        w.ok_or_else(|| {
                            Error::DimensionMismatch(format!("no value for `{}`", sys.variables()[j]))
                        })
                    })
                    .collect::<Result<_>>()?;
                Ok(Verdict::Feasible { witness })
            }
            (false, true) => Ok(Verdict::Infeasible { certificate }),
            (true, true) => Err(Error::parse(1, "mixed witness and certificate lines")),
            (false, false) => Err(Error::parse(1, "empty verdict")),
        }
    }
}

/// Exact re-check of a verdict against a system, independent of how the
/// verdict was produced.
///
/// A witness must satisfy every row. A certificate must be nonnegative,
/// cancel every variable, and combine the bounds to a positive number.
pub fn verify_certificate(sys: &LinearSystem, verdict: &Verdict) -> Result<bool> {
    match verdict {
        Verdict::Feasible { witness } => {
            if witness.len() != sys.num_vars() {
                return Err(Error::DimensionMismatch(format!(
                    "witness has {} values for {} variables",
                    witness.len(),
                    sys.num_vars()
                )));
            }
            Ok(sys.rows().iter().all(|r| r.evaluate(witness) >= r.bound))
        }
        Verdict::Infeasible { certificate } => {
            if let Some((&row, _)) = certificate.iter().find(|(&r, _)| r >= sys.num_rows()) {
                return Err(Error::DimensionMismatch(format!(
                    "certificate references row {row} of {}",
                    sys.num_rows()
                )));
            }
            if certificate.values().any(Signed::is_negative) {
                return Ok(false);
            }
            let mut combined = vec![Rational::zero(); sys.num_vars()];
            let mut bound = Rational::zero();
            for (&k, y) in certificate {
                let row = &sys.rows()[k];
                for (j, c) in &row.coeffs {
                    combined[*j] += y * c;
                }
                bound += y * &row.bound;
            }
            Ok(combined.iter().all(Zero::is_zero) && bound.is_positive())
        }
    }
}
