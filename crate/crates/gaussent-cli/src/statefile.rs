//! Plain-text state files.
//!
//! The format is line-oriented with an explicit quadrature-ordering
//! field, since qqpp/qpqp confusion is the main interop hazard for
//! covariance-matrix data:
//!
//! ```text
//! gaussent-state v1
//! modes 3
//! ordering qqpp
//! label optional free text
//! provenance optional free text
//! covariance
//! <2N rows of 2N floats>
//! displacement
//! <2N floats on one line>
//! ```
//!
//! Floats are written with 17 significant digits, which round-trips f64
//! exactly: parse -> serialize is the identity on the numeric payload
//! after one normalizing pass.

use std::fmt;
use std::path::Path;

use gaussent::nalgebra::{DMatrix, DVector};
use gaussent::{CovarianceMatrix, GaussianState};

const MAGIC_PREFIX: &str = "gaussent-state v";

#[derive(Debug)]
pub struct ParseError(pub String);

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "state file parse error: {}", self.0)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError(msg.into()))
}

/// In-memory form of a state file. The covariance matrix is kept raw
/// (not validated) so diagnostic commands can inspect broken files.
#[derive(Debug, Clone)]
pub struct StateFile {
    pub version: u32,
    pub n_modes: usize,
    pub covariance: DMatrix<f64>,
    pub displacement: DVector<f64>,
    pub label: Option<String>,
    pub provenance: Option<String>,
}

impl StateFile {
    pub fn from_state(state: &GaussianState, label: Option<String>) -> Self {
        Self {
            version: 1,
            n_modes: state.n_modes(),
            covariance: state.cov().matrix().clone(),
            displacement: state.displacement().clone(),
            label,
            provenance: None,
        }
    }

    /// Validates the payload into a Gaussian state (symmetry check).
    pub fn to_state(&self) -> gaussent::Result<GaussianState> {
        let cov = CovarianceMatrix::new(self.covariance.clone())?;
        GaussianState::new(cov, self.displacement.clone())
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut lines = text.lines().map(str::trim_end);
        let version: u32 = match lines.next() {
            Some(l) if l.starts_with(MAGIC_PREFIX) => l[MAGIC_PREFIX.len()..]
                .parse()
                .map_err(|_| ParseError(format!("bad version in magic line {l:?}")))?,
            Some(l) => {
                return err(format!(
                    "bad magic line {l:?}, expected {MAGIC_PREFIX}<version>"
                ))
            }
            None => return err("empty file"),
        };
        if version != 1 {
            return err(format!("unsupported state file version {version}"));
        }

        let mut n_modes: Option<usize> = None;
        let mut ordering: Option<String> = None;
        let mut label = None;
        let mut provenance = None;

        let mut line = lines.next();
        loop {
            let Some(l) = line else {
                return err("missing covariance section");
            };
            let l = l.trim();
            if l.is_empty() {
                line = lines.next();
                continue;
            }
            if l == "covariance" {
                break;
            }
            let (key, value) = l.split_once(' ').unwrap_or((l, ""));
            match key {
                "modes" => {
                    let n: usize = value
                        .trim()
                        .parse()
                        .map_err(|_| ParseError(format!("bad modes value {value:?}")))?;
                    if n == 0 {
                        return err("modes must be positive");
                    }
                    n_modes = Some(n);
                }
                "ordering" => ordering = Some(value.trim().to_string()),
                "label" => label = Some(value.to_string()),
                "provenance" => provenance = Some(value.to_string()),
                other => return err(format!("unknown key {other:?}")),
            }
            line = lines.next();
        }

        let Some(n) = n_modes else {
            return err("missing modes field");
        };
        match ordering.as_deref() {
            Some("qqpp") => {}
            Some(other) => {
                return err(format!(
                    "unsupported ordering {other:?}: this tool only reads qqpp"
                ))
            }
            None => return err("missing ordering field"),
        }

        let dim = 2 * n;
        let mut covariance = DMatrix::zeros(dim, dim);
        for row in 0..dim {
            let Some(l) = lines.next() else {
                return err(format!("covariance row {row} missing"));
            };
            let entries: Vec<&str> = l.split_whitespace().collect();
            if entries.len() != dim {
                return err(format!(
                    "covariance row {row} has {} entries, expected {dim}",
                    entries.len()
                ));
            }
            for (col, tok) in entries.iter().enumerate() {
                covariance[(row, col)] = tok
                    .parse()
                    .map_err(|_| ParseError(format!("bad number {tok:?} in covariance")))?;
            }
        }

        match lines.next() {
            Some(l) if l.trim() == "displacement" => {}
            other => return err(format!("expected displacement section, got {other:?}")),
        }
        let Some(l) = lines.next() else {
            return err("displacement values missing");
        };
        let entries: Vec<&str> = l.split_whitespace().collect();
        if entries.len() != dim {
            return err(format!(
                "displacement has {} entries, expected {dim}",
                entries.len()
            ));
        }
        let mut displacement = DVector::zeros(dim);
        for (i, tok) in entries.iter().enumerate() {
            displacement[i] = tok
                .parse()
                .map_err(|_| ParseError(format!("bad number {tok:?} in displacement")))?;
        }

        for extra in lines {
            if !extra.trim().is_empty() {
                return err(format!("unexpected trailing content {extra:?}"));
            }
        }

        Ok(Self {
            version,
            n_modes: n,
            covariance,
            displacement,
            label,
            provenance,
        })
    }

    pub fn serialize(&self) -> String {
        let dim = 2 * self.n_modes;
        let mut out = String::new();
        out.push_str(&format!("{MAGIC_PREFIX}{}", self.version));
        out.push('\n');
        out.push_str(&format!("modes {}\n", self.n_modes));
        out.push_str("ordering qqpp\n");
        if let Some(label) = &self.label {
            out.push_str(&format!("label {label}\n"));
        }
        if let Some(p) = &self.provenance {
            out.push_str(&format!("provenance {p}\n"));
        }
        out.push_str("covariance\n");
        for row in 0..dim {
            for col in 0..dim {
                if col > 0 {
                    out.push(' ');
                }
                out.push_str(&format!("{:.16e}", self.covariance[(row, col)]));
            }
            out.push('\n');
        }
        out.push_str("displacement\n");
        for i in 0..dim {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&format!("{:.16e}", self.displacement[i]));
        }
        out.push('\n');
        out
    }

    pub fn read(path: &Path) -> Result<Self, ParseError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ParseError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.serialize())
    }
}
