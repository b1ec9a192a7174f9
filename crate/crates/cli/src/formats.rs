//! JSON input and output documents.
//!
//! A system document describes a square (Laurent) polynomial system or an
//! explicit homotopy as a list of terms per polynomial; the solution
//! document carries one record per tracked path plus the run configuration.
//! Numbers are IEEE-754 doubles serialized with round-trip-safe formatting.

use std::fmt;

use padtrack_core::polysys::{HMonomial, Homotopy, HomotopyPoly};
use padtrack_core::tracker::{PathResult, TrackerConfig};
use padtrack_core::Complex64;
use serde::{Deserialize, Serialize};

/// One term `(coeff_re + i·coeff_im) · x^exponents · t^t_degree`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermDocument {
    pub coeff_re: f64,
    #[serde(default)]
    pub coeff_im: f64,
    pub exponents: Vec<i32>,
    #[serde(default)]
    pub t_degree: u32,
}

/// Input schema: a square system (or homotopy, when terms carry positive
/// `t_degree`) over the declared variables. Explicit homotopies must also
/// supply their start solutions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemDocument {
    pub variables: Vec<String>,
    pub polynomials: Vec<Vec<TermDocument>>,
    #[serde(default)]
    pub toric: bool,
    /// Start solutions as `[re, im]` pairs per coordinate; required only
    /// when the document is an explicit homotopy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub starts: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug)]
pub enum ParseError {
    Json {
        message: String,
        line: usize,
        column: usize,
    },
    Validation(String),
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Json {
                message,
                line,
                column,
            } => {
                write!(f, "JSON error at line {line}, column {column}: {message}")
            }
            ParseError::Validation(msg) => write!(f, "invalid system document: {msg}"),
        }
    }
}

impl std::error::Error for ParseError {}

/// Parses and validates a system document from JSON text. Duplicate term
/// keys (same exponents and t-degree) are merged by coefficient addition.
pub fn parse_system(text: &str) -> Result<SystemDocument, ParseError> {
    let mut doc: SystemDocument = serde_json::from_str(text).map_err(|e| ParseError::Json {
        message: e.to_string(),
        line: e.line(),
        column: e.column(),
    })?;
    validate_document(&doc)?;
    for poly in doc.polynomials.iter_mut() {
        merge_terms(poly);
    }
    Ok(doc)
}

/// Merges duplicate `(exponents, t_degree)` keys in first-seen order and
/// drops terms whose merged coefficient is exactly zero.
fn merge_terms(terms: &mut Vec<TermDocument>) {
    let mut merged: Vec<TermDocument> = Vec::with_capacity(terms.len());
    for term in terms.drain(..) {
        match merged
            .iter_mut()
            .find(|t| t.exponents == term.exponents && t.t_degree == term.t_degree)
        {
            Some(existing) => {
                existing.coeff_re += term.coeff_re;
                existing.coeff_im += term.coeff_im;
            }
            None => merged.push(term),
        }
    }
    merged.retain(|t| t.coeff_re != 0.0 || t.coeff_im != 0.0);
    *terms = merged;
}

fn validate_document(doc: &SystemDocument) -> Result<(), ParseError> {
    let n = doc.variables.len();
    if n == 0 {
        return Err(ParseError::Validation("no variables declared".into()));
    }
    if doc.polynomials.len() != n {
        return Err(ParseError::Validation(format!(
            "system is not square: {n} variables but {} polynomials",
            doc.polynomials.len()
        )));
    }
    for (i, poly) in doc.polynomials.iter().enumerate() {
        for term in poly {
            if term.exponents.len() != n {
                return Err(ParseError::Validation(format!(
                    "polynomial {i}: exponent vector of length {} under {n} declared variables",
                    term.exponents.len()
                )));
            }
            if !term.coeff_re.is_finite() || !term.coeff_im.is_finite() {
                return Err(ParseError::Validation(format!(
                    "polynomial {i}: non-finite coefficient"
                )));
            }
            if !doc.toric && term.exponents.iter().any(|&e| e < 0) {
                return Err(ParseError::Validation(format!(
                    "polynomial {i}: negative exponent in a system not flagged toric"
                )));
            }
        }
    }
    if let Some(starts) = &doc.starts {
        for (i, s) in starts.iter().enumerate() {
            if s.len() != n {
                return Err(ParseError::Validation(format!(
                    "start {i}: {} coordinates under {n} variables",
                    s.len()
                )));
            }
        }
    }
    Ok(())
}

impl SystemDocument {
    /// Whether any term depends on the continuation parameter.
    pub fn is_homotopy(&self) -> bool {
        self.polynomials
            .iter()
            .any(|p| p.iter().any(|t| t.t_degree > 0))
    }

    pub fn to_homotopy(&self) -> Result<Homotopy, ParseError> {
        let n = self.variables.len();
        let polys = self
            .polynomials
            .iter()
            .map(|terms| {
                HomotopyPoly::new(
                    terms
                        .iter()
                        .map(|t| {
                            HMonomial::new(
                                Complex64::new(t.coeff_re, t.coeff_im),
                                t.exponents.clone(),
                                t.t_degree,
                            )
                        })
                        .collect(),
                )
            })
            .collect();
        Homotopy::new(n, polys, self.toric).map_err(|e| ParseError::Validation(e.to_string()))
    }

    pub fn start_points(&self) -> Option<Vec<Vec<Complex64>>> {
        self.starts.as_ref().map(|starts| {
            starts
                .iter()
                .map(|s| s.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
                .collect()
        })
    }

    /// Builds a plain system document (no t-dependence) from a homotopy.
    pub fn from_system(variables: Vec<String>, h: &Homotopy) -> Self {
        let polynomials = h
            .polys()
            .iter()
            .map(|p| {
                p.monomials()
                    .iter()
                    .map(|m| TermDocument {
                        coeff_re: m.coeff.re,
                        coeff_im: m.coeff.im,
                        exponents: m.x_exponents.clone(),
                        t_degree: m.t_degree,
                    })
                    .collect()
            })
            .collect();
        SystemDocument {
            variables,
            polynomials,
            toric: h.is_toric(),
            starts: None,
        }
    }
}

/// Echo of the tracker configuration in the output document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigDocument {
    pub l: usize,
    pub m: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub t_end_game: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub corrector_tol: f64,
    pub corrector_max_iters: usize,
    pub max_steps_per_path: usize,
    pub match_tol: f64,
    pub workers: usize,
}

impl ConfigDocument {
    pub fn new(cfg: &TrackerConfig, match_tol: f64, workers: usize) -> Self {
        ConfigDocument {
            l: cfg.l_degree,
            m: cfg.m_degree,
            beta1: cfg.beta1,
            beta2: cfg.beta2,
            t_end_game: cfg.t_end_game,
            max_step: cfg.max_step,
            min_step: cfg.min_step,
            corrector_tol: cfg.corrector_tol,
            corrector_max_iters: cfg.corrector_max_iters,
            max_steps_per_path: cfg.max_steps_per_path,
            match_tol,
            workers,
        }
    }
}

/// One tracked path in the output document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathDocument {
    pub status: String,
    /// Endpoint coordinates as `[re, im]` pairs.
    pub endpoint: Vec<[f64; 2]>,
    pub residual: f64,
    pub steps: usize,
    pub min_dt: f64,
    pub max_dt: f64,
    pub dt1_fraction: f64,
}

impl PathDocument {
    pub fn new(r: &PathResult) -> Self {
        PathDocument {
            status: r.status.as_str().to_string(),
            endpoint: r.endpoint.iter().map(|z| [z.re, z.im]).collect(),
            residual: r.residual,
            steps: r.steps,
            min_dt: r.min_dt,
            max_dt: r.max_dt,
            dt1_fraction: r.dt1_fraction(),
        }
    }
}

/// Output schema of `padtrack solve`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionDocument {
    /// The random constant applied to the target system, `[re, im]`.
    pub gamma: [f64; 2],
    pub seed: u64,
    pub config: ConfigDocument,
    pub wall_time_seconds: f64,
    pub path_count: usize,
    pub success_count: usize,
    /// Distinct endpoints with residual below 1e-9, deduplicated at
    /// `match_tol`.
    pub distinct_solutions: usize,
    pub paths: Vec<PathDocument>,
}

pub fn emit_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("document serialization cannot fail")
}
