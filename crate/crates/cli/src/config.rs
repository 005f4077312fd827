//! Run configuration: a JSON description of the base field, the digit
//! bijections, and one Laurent series per coordinate, from which every
//! subcommand builds its sequence generator and generating matrices.
//!
//! The series are the only part with real structure. Each coordinate is
//! one of: the quadratic fixture over F_2 (the series whose coefficient
//! at z^{-k} is 1 exactly when k+1 is a power of two), an exact rational
//! function num(z)/den(z) expanded by long division, or an explicit
//! coefficient window. All coefficients are element indices in 0..b-1.

use std::path::Path;

use serde::Deserialize;

use kronseq::field::{BijectionFamily, FieldSpec};
use kronseq::generate::{hankel_matrix, GeneratingMatrix, KroneckerSystem};
use kronseq::laurent::{LaurentSeries, Poly};
use kronseq::{Error, Result};

fn default_precision() -> usize {
    64
}

fn default_point_precision() -> usize {
    32
}

fn default_a_max() -> u64 {
    256
}

/// Enumeration bounds a run is willing to pay for.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Caps {
    /// Block-search bound for the variance identity's coverage scan.
    #[serde(default = "default_a_max")]
    pub a_max: u64,
}

impl Default for Caps {
    fn default() -> Caps {
        Caps { a_max: default_a_max() }
    }
}

/// Digit bijections: the literal string "identity", or explicit
/// permutation tables. `psi[r][digit]` is the field-element index the
/// digit in position r maps to (must send 0 to 0); `eta[i][j-1][e]` is
/// the output digit coordinate i assigns to element index e at digit
/// position j. Positions beyond the tables fall back to the identity.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum BijectionSpec {
    Named(String),
    Tables {
        #[serde(default)]
        psi: Vec<Vec<u64>>,
        #[serde(default)]
        eta: Vec<Vec<Vec<u64>>>,
    },
}

impl Default for BijectionSpec {
    fn default() -> BijectionSpec {
        BijectionSpec::Named("identity".to_string())
    }
}

/// One coordinate's Laurent series.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SeriesSpec {
    /// The quadratic fixture over F_2.
    QuadraticFixture,
    /// num(z)/den(z), coefficients ascending in powers of z.
    Rational { num: Vec<u64>, den: Vec<u64> },
    /// Explicit window: coefficient of z^{-w}, z^{-(w+1)}, ... and zero
    /// beyond it.
    Coeffs { w: i64, coeffs: Vec<u64> },
}

impl SeriesSpec {
    fn build(&self, field: &FieldSpec, prec: usize) -> Result<LaurentSeries> {
        match self {
            SeriesSpec::QuadraticFixture => LaurentSeries::quadratic_fixture(field, prec),
            SeriesSpec::Rational { num, den } => {
                let num = poly_from_indices(num, field)?;
                let den = poly_from_indices(den, field)?;
                LaurentSeries::from_rational(&num, &den, prec, field)
            }
            SeriesSpec::Coeffs { w, coeffs } => {
                let coeffs = coeffs
                    .iter()
                    .map(|&c| field.element(c))
                    .collect::<Result<Vec<_>>>()?;
                Ok(LaurentSeries::from_terms(*w, coeffs))
            }
        }
    }
}

fn poly_from_indices(indices: &[u64], field: &FieldSpec) -> Result<Poly> {
    let coeffs = indices
        .iter()
        .map(|&c| field.element(c))
        .collect::<Result<Vec<_>>>()?;
    Ok(Poly::from_coeffs(coeffs))
}

/// Everything a subcommand needs to rebuild the sequence under study.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Field order b = p^kappa, at most 16.
    pub base: u64,
    /// Number of coordinates.
    pub s: usize,
    /// Digit bijections (default identity).
    #[serde(default)]
    pub bijections: BijectionSpec,
    /// One series per coordinate.
    pub series: Vec<SeriesSpec>,
    /// Laurent window length (coefficients kept per series).
    #[serde(default = "default_precision")]
    pub precision: usize,
    /// Default digits per coordinate for generated points. Must leave
    /// room in the series window for the polynomial lift of the largest
    /// index generated (roughly log_b of it).
    #[serde(default = "default_point_precision")]
    pub point_precision: usize,
    /// Enumeration bounds.
    #[serde(default)]
    pub caps: Caps,
    /// Default output path when no --out flag is given.
    #[serde(default)]
    pub out: Option<String>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::validation(format!("cannot read config {}: {e}", path.display()))
        })?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::validation(format!("config parse error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        FieldSpec::for_base(self.base)?;
        if self.s == 0 {
            return Err(Error::validation("s must be at least 1".to_string()));
        }
        if self.series.len() != self.s {
            return Err(Error::validation(format!(
                "s = {} but {} series given",
                self.s,
                self.series.len()
            )));
        }
        if self.precision == 0 || self.point_precision == 0 {
            return Err(Error::validation("precisions must be at least 1".to_string()));
        }
        if self.point_precision > self.precision {
            return Err(Error::validation(format!(
                "point_precision {} exceeds the series window {}",
                self.point_precision, self.precision
            )));
        }
        if let BijectionSpec::Named(name) = &self.bijections {
            if name != "identity" {
                return Err(Error::validation(format!(
                    "unknown bijection family \"{name}\" (use \"identity\" or tables)"
                )));
            }
        }
        Ok(())
    }

    pub fn field(&self) -> Result<FieldSpec> {
        FieldSpec::for_base(self.base)
    }

    pub fn bijection_family(&self, field: &FieldSpec) -> Result<BijectionFamily> {
        match &self.bijections {
            BijectionSpec::Named(_) => Ok(BijectionFamily::identity()),
            BijectionSpec::Tables { psi, eta } => BijectionFamily::from_tables(field, psi, eta),
        }
    }

    pub fn series_list(&self, field: &FieldSpec) -> Result<Vec<LaurentSeries>> {
        self.series
            .iter()
            .map(|spec| spec.build(field, self.precision))
            .collect()
    }

    pub fn system(&self) -> Result<KroneckerSystem> {
        let field = self.field()?;
        let bij = self.bijection_family(&field)?;
        let series = self.series_list(&field)?;
        KroneckerSystem::new(field, bij, series)
    }

    /// Generating matrices: the Hankel slice `c_{j,r} = u_{j+r}` of each
    /// series, `rows x cols`. Fails when the series windows are shorter
    /// than `rows + cols - 1` coefficients.
    pub fn hankel_matrices(&self, rows: usize, cols: usize) -> Result<Vec<GeneratingMatrix>> {
        let field = self.field()?;
        self.series_list(&field)?
            .iter()
            .map(|l| hankel_matrix(l, rows, cols))
            .collect()
    }
}

// ======================================================================
// Tests
// ======================================================================
