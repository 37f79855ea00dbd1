//! Shared job configuration: expansion order, tolerances, sample sets, and
//! the optional expansion cache directory (flag or `SYMFORMS_CACHE`).

use num_complex::Complex64;
use symforms::error::{Error, Result};
use symforms::group::GroupElt;

#[derive(Debug, Clone)]
pub struct JobConfig {
    pub q_order: i64,
    pub x_order_slack: usize,
    pub tol: f64,
    pub sample_points: Vec<Complex64>,
    pub sample_gammas: Vec<GroupElt>,
    pub cache_dir: Option<std::path::PathBuf>,
}

impl Default for JobConfig {
    fn default() -> Self {
        JobConfig {
            q_order: 30,
            x_order_slack: 5,
            tol: 1e-8,
            sample_points: symforms::group::sample_points(),
            sample_gammas: symforms::group::sample_gammas(),
            cache_dir: std::env::var_os("SYMFORMS_CACHE").map(Into::into),
        }
    }
}

impl JobConfig {
    /// Default X-truncation for symmetric power n.
    pub fn x_order(&self, n: usize) -> usize {
        n + self.x_order_slack
    }

    /// Numeric verification needs enough terms for the tail bounds to mean
    /// anything.
    pub fn require_verification_order(&self) -> Result<()> {
        if self.q_order < 8 {
            return Err(Error::InvalidArgument(format!(
                "numeric verification needs --order >= 8, got {}",
                self.q_order
            )));
        }
        Ok(())
    }
}

pub fn parse_point(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(Error::InvalidArgument(format!(
            "expected \"re,im\", got {s:?}"
        )));
    }
    let re: f64 = parts[0]
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad real part {:?}", parts[0])))?;
    let im: f64 = parts[1]
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad imaginary part {:?}", parts[1])))?;
    if im <= 0.0 {
        return Err(Error::InvalidArgument(
            "sample points must lie in the upper half plane".into(),
        ));
    }
    Ok(Complex64::new(re, im))
}
