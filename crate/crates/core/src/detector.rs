//! Photon-number-resolving detector response models.
//!
//! All detectors here are phase insensitive, so they are described by a
//! column-stochastic response matrix `R[n][k] = P(report n | k incident)`
//! acting on photon-number distributions. The imperfect model chains three
//! stages in a fixed order: binomial loss, additive Poisson dark counts, and
//! per-click Bernoulli cross-talk (at most one extra click per click). Any
//! count at or above `n_max` is reported as `n_max`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorParams {
    /// Probability that an incident photon is registered.
    pub efficiency: f64,
    /// Mean number of dark counts per measurement gate.
    pub dark_counts: f64,
    /// Probability that a click triggers one extra click.
    pub crosstalk: f64,
}

impl DetectorParams {
    pub const IDEAL: DetectorParams = DetectorParams { efficiency: 1.0, dark_counts: 0.0, crosstalk: 0.0 };

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(Error::Parameter(format!("efficiency {} not in [0, 1]", self.efficiency)));
        }
        if !(self.dark_counts >= 0.0 && self.dark_counts.is_finite()) {
            return Err(Error::Parameter(format!(
                "dark count mean {} must be finite and nonnegative",
                self.dark_counts
            )));
        }
        if !(0.0..=1.0).contains(&self.crosstalk) {
            return Err(Error::Parameter(format!("cross-talk {} not in [0, 1]", self.crosstalk)));
        }
        Ok(())
    }

    pub fn is_ideal(&self) -> bool {
        *self == Self::IDEAL
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetectorModel {
    params: DetectorParams,
    cutoff: usize,
    n_max: usize,
    /// `response[n][k]`
    response: Vec<Vec<f64>>,
}

/// Projective number-resolving detector, `R[n][k] = delta_{nk}`.
pub fn ideal_detector(cutoff: usize) -> DetectorModel {
    let response = (0..=cutoff).map(|n| (0..=cutoff).map(|k| if n == k { 1.0 } else { 0.0 }).collect()).collect();
    DetectorModel { params: DetectorParams::IDEAL, cutoff, n_max: cutoff, response }
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    let lf = |x: usize| (2..=x).map(|i| (i as f64).ln()).sum::<f64>();
    lf(n) - lf(k) - lf(n - k)
}

fn binomial_pmf(n: usize, k: usize, p: f64) -> f64 {
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    (ln_binomial(n, k) + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp()
}

/// Poisson pmf for `0..len`.
fn poisson_pmf(mean: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut term = (-mean).exp();
    for d in 0..len {
        if d > 0 {
            term *= mean / d as f64;
        }
        out.push(term);
    }
    out
}

fn loss_stage(k: usize, eta: f64, n_max: usize) -> Vec<f64> {
    let mut v = vec![0.0; n_max + 1];
    for l in 0..=k {
        v[l.min(n_max)] += binomial_pmf(k, l, eta);
    }
    v
}

fn dark_stage(v: &[f64], nu: f64) -> Vec<f64> {
    let n_max = v.len() - 1;
    if nu == 0.0 {
        return v.to_vec();
    }
    let pmf = poisson_pmf(nu, n_max + 1);
    let mut w = vec![0.0; n_max + 1];
    w[n_max] += v[n_max];
    for (l, &mass) in v.iter().enumerate().take(n_max) {
        let mut below = 0.0;
        for d in 0..(n_max - l) {
            w[l + d] += mass * pmf[d];
            below += pmf[d];
        }
        w[n_max] += mass * (1.0 - below).max(0.0);
    }
    w
}

fn crosstalk_stage(w: &[f64], eps: f64) -> Vec<f64> {
    let n_max = w.len() - 1;
    if eps == 0.0 {
        return w.to_vec();
    }
    let mut x = vec![0.0; n_max + 1];
    x[n_max] += w[n_max];
    for (c, &mass) in w.iter().enumerate().take(n_max) {
        for e in 0..=c {
            x[(c + e).min(n_max)] += mass * binomial_pmf(c, e, eps);
        }
    }
    x
}

/// Lossy, noisy detector with response built as cross-talk after dark
/// counts after loss. Columns cover `0..=cutoff` incident photons and rows
/// `0..=n_max` reported clicks.
pub fn imperfect_detector(
    efficiency: f64,
    dark_counts: f64,
    crosstalk: f64,
    cutoff: usize,
    n_max: usize,
) -> Result<DetectorModel> {
    let params = DetectorParams { efficiency, dark_counts, crosstalk };
    DetectorModel::from_params(params, cutoff, n_max)
}

impl DetectorModel {
    pub fn from_params(params: DetectorParams, cutoff: usize, n_max: usize) -> Result<Self> {
        params.validate()?;
        let columns: Vec<Vec<f64>> = (0..=cutoff)
            .map(|k| {
                let v = loss_stage(k, params.efficiency, n_max);
                let w = dark_stage(&v, params.dark_counts);
                crosstalk_stage(&w, params.crosstalk)
            })
            .collect();
        let response = (0..=n_max).map(|n| columns.iter().map(|col| col[n]).collect()).collect();
        Ok(Self { params, cutoff, n_max, response })
    }

    pub fn params(&self) -> DetectorParams {
        self.params
    }

    /// Largest incident photon number covered by the response matrix.
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn response(&self, reported: usize, incident: usize) -> f64 {
        self.response[reported][incident]
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.response
    }

    pub fn is_ideal(&self) -> bool {
        self.params.is_ideal()
    }

    /// Same detector with its response matrix covering at least `cutoff`
    /// incident photons. Ideal detectors keep `n_max == cutoff`.
    pub fn for_cutoff(&self, cutoff: usize) -> DetectorModel {
        if cutoff <= self.cutoff {
            return self.clone();
        }
        if self.is_ideal() && self.n_max == self.cutoff {
            return ideal_detector(cutoff);
        }
        Self::from_params(self.params, cutoff, self.n_max).expect("parameters already validated")
    }
}

/// Joint photon-number distribution `p[j][k]` of `j` photons at the first
/// detector and `k` at the second, plus the mass lost to truncation.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution {
    probs: Vec<Vec<f64>>,
    tail: f64,
}

impl OutcomeDistribution {
    pub fn new(probs: Vec<Vec<f64>>, tail: f64) -> Result<Self> {
        let mut total = tail;
        for row in &probs {
            for &p in row {
                if !(p >= -1e-15) {
                    return Err(Error::Input(format!("negative outcome probability {p}")));
                }
                total += p;
            }
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Input(format!("outcome distribution sums to {total}, expected 1")));
        }
        Ok(Self { probs, tail })
    }

    pub fn probs(&self) -> &[Vec<f64>] {
        &self.probs
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.probs.get(j).and_then(|r| r.get(k)).copied().unwrap_or(0.0)
    }

    fn max_index(&self) -> (usize, usize) {
        let rows = self.probs.len().saturating_sub(1);
        let cols = self.probs.iter().map(|r| r.len()).max().unwrap_or(1).saturating_sub(1);
        (rows, cols)
    }
}

/// `P(report m at D1, n at D2) = sum_{j,k} p(j,k) R1[m][j] R2[n][k]`.
pub fn joint_response(
    d1: &DetectorModel,
    d2: &DetectorModel,
    m: usize,
    n: usize,
    p_ideal: &OutcomeDistribution,
) -> Result<f64> {
    check_cover(d1, d2, p_ideal)?;
    if m > d1.n_max() || n > d2.n_max() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for (j, row) in p_ideal.probs.iter().enumerate() {
        let r1 = d1.response(m, j);
        if r1 == 0.0 {
            continue;
        }
        for (k, &p) in row.iter().enumerate() {
            total += p * r1 * d2.response(n, k);
        }
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Full reported-click distribution `[m][n]` for `m <= n_max1, n <= n_max2`.
/// Its entries sum to `1 - p_ideal.tail()`.
pub fn reported_distribution(
    d1: &DetectorModel,
    d2: &DetectorModel,
    p_ideal: &OutcomeDistribution,
) -> Result<Vec<Vec<f64>>> {
    check_cover(d1, d2, p_ideal)?;
    // R1 * P * R2^T, contracted in two passes.
    let (_, kmax) = p_ideal.max_index();
    let mut half = vec![vec![0.0; kmax + 1]; d1.n_max() + 1];
    for (m, out) in half.iter_mut().enumerate() {
        for (j, row) in p_ideal.probs.iter().enumerate() {
            let r = d1.response(m, j);
            if r == 0.0 {
                continue;
            }
            for (k, &p) in row.iter().enumerate() {
                out[k] += r * p;
            }
        }
    }
    let out = half
        .iter()
        .map(|row| {
            (0..=d2.n_max()).map(|n| row.iter().enumerate().map(|(k, &x)| x * d2.response(n, k)).sum()).collect()
        })
        .collect();
    Ok(out)
}

fn check_cover(d1: &DetectorModel, d2: &DetectorModel, p: &OutcomeDistribution) -> Result<()> {
    let (jmax, kmax) = p.max_index();
    if jmax > d1.cutoff() || kmax > d2.cutoff() {
        return Err(Error::Dimension(format!(
            "detectors cover {} and {} incident photons, distribution needs {jmax} and {kmax}",
            d1.cutoff(),
            d2.cutoff()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn column_sums(d: &DetectorModel) -> Vec<f64> {
        (0..=d.cutoff()).map(|k| (0..=d.n_max()).map(|n| d.response(n, k)).sum()).collect()
    }

    #[test]
    fn ideal_examples() {
        let d = ideal_detector(4);
        assert_eq!(d.response(2, 2), 1.0);
        assert_eq!(d.response(1, 2), 0.0);
        assert!(column_sums(&d).iter().all(|&s| s == 1.0));
        assert!(d.is_ideal());
    }

    #[test]
    fn perfect_parameters_reduce_to_ideal() {
        let d = imperfect_detector(1.0, 0.0, 0.0, 6, 4).unwrap();
        for k in 0..=6 {
            for n in 0..=4 {
                let expected = if n == k.min(4) { 1.0 } else { 0.0 };
                assert_eq!(d.response(n, k), expected);
            }
        }
    }

    #[test]
    fn half_efficiency_thinning() {
        let d = imperfect_detector(0.5, 0.0, 0.0, 3, 3).unwrap();
        assert!((d.response(1, 2) - 0.5).abs() < 1e-15);
        assert!((d.response(0, 2) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn single_crosstalk_event() {
        let d = imperfect_detector(1.0, 0.0, 0.1, 3, 4).unwrap();
        assert!((d.response(2, 1) - 0.1).abs() < 1e-15);
        assert!((d.response(1, 1) - 0.9).abs() < 1e-15);
        // two clicks: 0, 1 or 2 extra clicks
        assert!((d.response(4, 2) - 0.01).abs() < 1e-15);
        assert!((d.response(3, 2) - 0.18).abs() < 1e-15);
    }

    #[test]
    fn dark_counts_on_vacuum_are_poisson() {
        let nu: f64 = 0.3;
        let d = imperfect_detector(1.0, nu, 0.0, 2, 3).unwrap();
        assert!((d.response(0, 0) - (-nu).exp()).abs() < 1e-15);
        assert!((d.response(1, 0) - nu * (-nu).exp()).abs() < 1e-15);
        let sat = 1.0 - (-nu).exp() * (1.0 + nu + nu * nu / 2.0);
        assert!((d.response(3, 0) - sat).abs() < 1e-15);
    }

    #[test]
    fn saturation_keeps_columns_stochastic() {
        let d = imperfect_detector(0.8, 2.5, 0.3, 12, 5).unwrap();
        for s in column_sums(&d) {
            assert!((s - 1.0).abs() < 1e-12);
        }
        for row in d.matrix() {
            assert!(row.iter().all(|&x| (0.0..=1.0).contains(&x)));
        }
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        assert!(matches!(imperfect_detector(1.2, 0.0, 0.0, 2, 2), Err(Error::Parameter(_))));
        assert!(matches!(imperfect_detector(0.5, -0.1, 0.0, 2, 2), Err(Error::Parameter(_))));
        assert!(matches!(imperfect_detector(0.5, 0.0, f64::NAN, 2, 2), Err(Error::Parameter(_))));
    }

    #[test]
    fn extending_the_cutoff_keeps_existing_columns() {
        let d = imperfect_detector(0.7, 0.05, 0.02, 4, 6).unwrap();
        let e = d.for_cutoff(9);
        assert_eq!(e.cutoff(), 9);
        for k in 0..=4 {
            for n in 0..=6 {
                assert_eq!(d.response(n, k), e.response(n, k));
            }
        }
        assert_eq!(ideal_detector(3).for_cutoff(5), ideal_detector(5));
    }

    fn point_mass(j: usize, k: usize, size: usize) -> OutcomeDistribution {
        let mut p = vec![vec![0.0; size]; size];
        p[j][k] = 1.0;
        OutcomeDistribution::new(p, 0.0).unwrap()
    }

    #[test]
    fn joint_response_examples() {
        let p = point_mass(2, 0, 3);
        let ideal = ideal_detector(2);
        assert_eq!(joint_response(&ideal, &ideal, 2, 0, &p).unwrap(), 1.0);
        assert_eq!(joint_response(&ideal, &ideal, 1, 1, &p).unwrap(), 0.0);

        let lossy = imperfect_detector(0.5, 0.0, 0.0, 2, 2).unwrap();
        assert!((joint_response(&lossy, &lossy, 1, 0, &p).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn joint_response_rejects_unnormalized_input() {
        assert!(OutcomeDistribution::new(vec![vec![0.5, 0.0], vec![0.0, 0.0]], 0.0).is_err());
        assert!(OutcomeDistribution::new(vec![vec![0.5, 0.0], vec![0.0, 0.0]], 0.5).is_ok());
    }

    #[test]
    fn reported_distribution_matches_pointwise_response() {
        let mut probs = vec![vec![0.0; 4]; 4];
        probs[1][2] = 0.3;
        probs[3][0] = 0.6;
        probs[0][0] = 0.1;
        let p = OutcomeDistribution::new(probs, 0.0).unwrap();
        let d1 = imperfect_detector(0.7, 0.1, 0.05, 3, 5).unwrap();
        let d2 = imperfect_detector(0.9, 0.02, 0.1, 3, 4).unwrap();
        let full = reported_distribution(&d1, &d2, &p).unwrap();
        let mut total = 0.0;
        for m in 0..=5 {
            for n in 0..=4 {
                let single = joint_response(&d1, &d2, m, n, &p).unwrap();
                assert!((full[m][n] - single).abs() < 1e-15);
                total += full[m][n];
            }
        }
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn detector_too_small_for_distribution() {
        let p = point_mass(3, 0, 4);
        let d = ideal_detector(2);
        assert!(matches!(joint_response(&d, &d, 0, 0, &p), Err(Error::Dimension(_))));
    }
}
