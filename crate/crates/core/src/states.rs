//! Input states: coherent products, NOON states, Fock pairs and discrete
//! mixtures of coherent products (classical light with a positive P
//! function).

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const NORM_TOLERANCE: f64 = 1e-10;

/// Pure two-mode state truncated at total photon number `cutoff`. Block `s`
/// holds the amplitudes of `|j, s - j>` for `j = 0..=s`. The probability
/// mass dropped by the truncation is kept in `truncation_tail`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoModeState {
    blocks: Vec<DVector<Complex64>>,
    truncation_tail: f64,
}

impl TwoModeState {
    pub fn from_blocks(blocks: Vec<DVector<Complex64>>, truncation_tail: f64) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Dimension("a state needs at least the vacuum block".into()));
        }
        for (s, b) in blocks.iter().enumerate() {
            if b.len() != s + 1 {
                return Err(Error::Dimension(format!("block {s} has {} amplitudes, expected {}", b.len(), s + 1)));
            }
        }
        if !(truncation_tail >= 0.0) {
            return Err(Error::Input(format!("truncation tail {truncation_tail} is negative")));
        }
        let state = Self { blocks, truncation_tail };
        let total = state.norm_sqr() + truncation_tail;
        if (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Input(format!("state mass plus truncation tail is {total}, expected 1")));
        }
        Ok(state)
    }

    pub fn cutoff(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn blocks(&self) -> &[DVector<Complex64>] {
        &self.blocks
    }

    pub fn truncation_tail(&self) -> f64 {
        self.truncation_tail
    }

    /// `<j, k | psi>`, zero beyond the cutoff.
    pub fn amplitude(&self, j: usize, k: usize) -> Complex64 {
        self.blocks.get(j + k).map(|b| b[j]).unwrap_or_else(|| Complex64::new(0.0, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm_squared()).sum()
    }

    /// Mode-exchanged copy, `|j, k> -> |k, j>`.
    pub fn swap_modes(&self) -> Self {
        let blocks = self.blocks.iter().map(|b| DVector::from_iterator(b.len(), b.iter().rev().copied())).collect();
        Self { blocks, truncation_tail: self.truncation_tail }
    }

    /// Probability of `j` photons in the first mode and `k` in the second.
    pub fn number_distribution(&self) -> Vec<Vec<f64>> {
        let s_max = self.cutoff();
        let mut p = vec![vec![0.0; s_max + 1]; s_max + 1];
        for (s, b) in self.blocks.iter().enumerate() {
            for (j, amp) in b.iter().enumerate() {
                p[j][s - j] = amp.norm_sqr();
            }
        }
        p
    }
}

/// Complex coherent-state amplitude; `|alpha|^2` is the mean photon number.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct CoherentAmplitude(pub Complex64);

impl CoherentAmplitude {
    pub fn new(re: f64, im: f64) -> Self {
        Self(Complex64::new(re, im))
    }

    pub fn real(re: f64) -> Self {
        Self::new(re, 0.0)
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }

    pub fn mean_photons(&self) -> f64 {
        self.0.norm_sqr()
    }

    pub fn is_finite(&self) -> bool {
        self.0.re.is_finite() && self.0.im.is_finite()
    }
}

impl From<[f64; 2]> for CoherentAmplitude {
    fn from(v: [f64; 2]) -> Self {
        Self::new(v[0], v[1])
    }
}

impl From<CoherentAmplitude> for [f64; 2] {
    fn from(a: CoherentAmplitude) -> Self {
        [a.0.re, a.0.im]
    }
}

/// `P(X > cutoff)` for `X ~ Poisson(mean)`, summed directly rather than as
/// `1 - cdf` so that tiny tails keep their relative precision.
pub fn poisson_tail(mean: f64, cutoff: usize) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let log_pmf = |s: usize| -mean + s as f64 * mean.ln() - ln_factorial(s);
    if (cutoff as f64) < mean {
        let cdf: f64 = (0..=cutoff).map(|s| log_pmf(s).exp()).sum();
        return (1.0 - cdf).max(0.0);
    }
    let mut term = log_pmf(cutoff + 1).exp();
    let mut tail = 0.0;
    let mut s = cutoff + 1;
    while term > tail * 1e-17 && term > 0.0 {
        tail += term;
        s += 1;
        term *= mean / s as f64;
    }
    tail
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|x| (x as f64).ln()).sum()
}

/// Smallest cutoff from `mean + 10 sqrt(mean) + 20` upward whose Poisson
/// tail is below `1e-12`.
pub fn default_cutoff(mean_photons: f64) -> usize {
    let mut s = (mean_photons + 10.0 * mean_photons.sqrt() + 20.0).ceil() as usize;
    while poisson_tail(mean_photons, s) >= 1e-12 {
        s += 1;
    }
    s
}

/// `alpha^j / sqrt(j!)` for `j = 0..=cutoff`.
fn coherent_coefficients(alpha: Complex64, cutoff: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(cutoff + 1);
    let mut cur = Complex64::new(1.0, 0.0);
    out.push(cur);
    for j in 1..=cutoff {
        cur = cur * alpha / (j as f64).sqrt();
        out.push(cur);
    }
    out
}

/// `|alpha> |beta>` truncated at total photon number `cutoff`.
pub fn coherent_product(alpha: CoherentAmplitude, beta: CoherentAmplitude, cutoff: usize) -> TwoModeState {
    let mean = alpha.mean_photons() + beta.mean_photons();
    let envelope = (-0.5 * mean).exp();
    let a = coherent_coefficients(alpha.0, cutoff);
    let b = coherent_coefficients(beta.0, cutoff);
    let blocks =
        (0..=cutoff).map(|s| DVector::from_iterator(s + 1, (0..=s).map(|j| a[j] * b[s - j] * envelope))).collect();
    TwoModeState { blocks, truncation_tail: poisson_tail(mean, cutoff) }
}

/// [`coherent_product`] with the cutoff chosen by [`default_cutoff`].
pub fn coherent_product_auto(alpha: CoherentAmplitude, beta: CoherentAmplitude) -> TwoModeState {
    let cutoff = default_cutoff(alpha.mean_photons() + beta.mean_photons());
    coherent_product(alpha, beta, cutoff)
}

/// `(|N, 0> + |0, N>) / sqrt 2`.
pub fn noon_state(n: usize) -> Result<TwoModeState> {
    if n == 0 {
        return Err(Error::DegenerateInput("a NOON state needs at least one photon".into()));
    }
    let mut blocks: Vec<DVector<Complex64>> = (0..=n).map(|s| DVector::zeros(s + 1)).collect();
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    blocks[n][n] = h;
    blocks[n][0] = h;
    Ok(TwoModeState { blocks, truncation_tail: 0.0 })
}

/// The basis state `|m, n>`, truncated at `m + n`.
pub fn fock_pair(m: usize, n: usize) -> TwoModeState {
    let s = m + n;
    let mut blocks: Vec<DVector<Complex64>> = (0..=s).map(|s| DVector::zeros(s + 1)).collect();
    blocks[s][m] = Complex64::new(1.0, 0.0);
    TwoModeState { blocks, truncation_tail: 0.0 }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub alpha: CoherentAmplitude,
    pub beta: CoherentAmplitude,
}

/// Finite convex combination of coherent products, a discrete stand-in for
/// a positive P function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<MixtureComponent>", into = "Vec<MixtureComponent>")]
pub struct ClassicalMixture {
    components: Vec<MixtureComponent>,
}

impl ClassicalMixture {
    pub fn new(components: Vec<MixtureComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Input("a mixture needs at least one component".into()));
        }
        for c in &components {
            if !(c.weight >= 0.0) || !c.weight.is_finite() {
                return Err(Error::Input(format!("mixture weight {} is not a probability", c.weight)));
            }
            if !c.alpha.is_finite() || !c.beta.is_finite() {
                return Err(Error::Input("coherent amplitudes must be finite".into()));
            }
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Input(format!("mixture weights sum to {total}, expected 1")));
        }
        Ok(Self { components })
    }

    pub fn single(alpha: CoherentAmplitude, beta: CoherentAmplitude) -> Self {
        Self { components: vec![MixtureComponent { weight: 1.0, alpha, beta }] }
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    pub fn max_mean_photons(&self) -> f64 {
        self.components.iter().map(|c| c.alpha.mean_photons() + c.beta.mean_photons()).fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<MixtureComponent>> for ClassicalMixture {
    type Error = Error;

    fn try_from(v: Vec<MixtureComponent>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ClassicalMixture> for Vec<MixtureComponent> {
    fn from(m: ClassicalMixture) -> Self {
        m.components
    }
}

fn random_in_disk<R: Rng>(rng: &mut R, radius: f64) -> CoherentAmplitude {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = std::f64::consts::TAU * rng.random::<f64>();
    CoherentAmplitude(Complex64::from_polar(r, theta))
}

/// `k` components with Dirichlet(1, ..., 1) weights and both amplitudes
/// uniform in the disk of radius `max_amplitude`.
pub fn random_classical_mixture(k: usize, max_amplitude: f64, seed: u64) -> Result<ClassicalMixture> {
    if k == 0 {
        return Err(Error::Parameter("a mixture needs at least one component".into()));
    }
    if !(max_amplitude > 0.0) || !max_amplitude.is_finite() {
        return Err(Error::Parameter(format!("max amplitude {max_amplitude} must be positive")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..k).map(|_| Exp1.sample(&mut rng)).collect();
    let total: f64 = raw.iter().sum();
    let components = raw
        .into_iter()
        .map(|w| MixtureComponent {
            weight: w / total,
            alpha: random_in_disk(&mut rng, max_amplitude),
            beta: random_in_disk(&mut rng, max_amplitude),
        })
        .collect();
    ClassicalMixture::new(components)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_has_no_tail() {
        let s = coherent_product(CoherentAmplitude::real(0.0), CoherentAmplitude::real(0.0), 4);
        assert_eq!(s.truncation_tail(), 0.0);
        assert!((s.amplitude(0, 0).re - 1.0).abs() < 1e-15);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn coherent_first_term() {
        let s = coherent_product(CoherentAmplitude::real(1.0), CoherentAmplitude::real(0.0), 0);
        assert!((s.amplitude(0, 0).re - (-0.5f64).exp()).abs() < 1e-15);
        assert!((s.truncation_tail() - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn coherent_tail_is_negligible_at_twenty() {
        let s = coherent_product(CoherentAmplitude::real(1.0), CoherentAmplitude::real(0.0), 20);
        assert!(s.truncation_tail() < 1e-12);
        assert!((s.norm_sqr() + s.truncation_tail() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn block_mass_is_poissonian() {
        let alpha = CoherentAmplitude::new(0.7, -1.1);
        let beta = CoherentAmplitude::new(-0.4, 0.9);
        let mean = alpha.mean_photons() + beta.mean_photons();
        let s = coherent_product(alpha, beta, 12);
        let mut pmf = (-mean).exp();
        for (n, block) in s.blocks().iter().enumerate() {
            if n > 0 {
                pmf *= mean / n as f64;
            }
            assert!((block.norm_squared() - pmf).abs() < 1e-14, "block {n}");
        }
        assert!((s.norm_sqr() + s.truncation_tail() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn default_cutoff_meets_tail_target() {
        for mean in [0.0, 0.5, 3.0, 25.0, 100.0] {
            let s = default_cutoff(mean);
            assert!(poisson_tail(mean, s) < 1e-12);
        }
    }

    #[test]
    fn noon_examples() {
        let s = noon_state(1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitude(1, 0).re - h).abs() < 1e-15);
        assert!((s.amplitude(0, 1).re - h).abs() < 1e-15);

        let s5 = noon_state(5).unwrap();
        assert!((s5.norm_sqr() - 1.0).abs() < 1e-15);
        for (n, b) in s5.blocks().iter().enumerate() {
            if n != 5 {
                assert_eq!(b.norm_squared(), 0.0);
            }
        }
        assert_eq!(s5.amplitude(5, 0), s5.amplitude(0, 5));
        assert_eq!(s5.swap_modes(), s5);
        assert!(matches!(noon_state(0), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn fock_pair_examples() {
        let v = fock_pair(0, 0);
        assert_eq!(v.cutoff(), 0);
        assert_eq!(v.amplitude(0, 0).re, 1.0);
        let s = fock_pair(2, 1);
        assert_eq!(s.blocks()[3][2].re, 1.0);
        assert_eq!(s.norm_sqr(), 1.0);
    }

    #[test]
    fn random_mixtures_are_deterministic_and_normalized() {
        let a = random_classical_mixture(6, 1.5, 42).unwrap();
        let b = random_classical_mixture(6, 1.5, 42).unwrap();
        assert_eq!(a, b);
        let total: f64 = a.components().iter().map(|c| c.weight).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for c in a.components() {
            assert!(c.weight >= 0.0);
            assert!(c.alpha.0.norm() <= 1.5 && c.beta.0.norm() <= 1.5);
        }
        let one = random_classical_mixture(1, 1.0, 3).unwrap();
        assert_eq!(one.components().len(), 1);
        assert_eq!(one.components()[0].weight, 1.0);
        assert_ne!(random_classical_mixture(6, 1.5, 43).unwrap(), a);
    }

    #[test]
    fn mixture_validation() {
        let bad = vec![MixtureComponent {
            weight: 0.5,
            alpha: CoherentAmplitude::real(1.0),
            beta: CoherentAmplitude::real(0.0),
        }];
        assert!(ClassicalMixture::new(bad).is_err());
        assert!(random_classical_mixture(0, 1.0, 0).is_err());
        assert!(random_classical_mixture(2, 0.0, 0).is_err());
    }

    #[test]
    fn mixture_json_shape() {
        let m = ClassicalMixture::single(CoherentAmplitude::new(1.0, 0.5), CoherentAmplitude::real(0.0));
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(text, r#"[{"weight":1.0,"alpha":[1.0,0.5],"beta":[0.0,0.0]}]"#);
        let back: ClassicalMixture = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }
}
