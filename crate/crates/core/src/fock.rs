//! Two-mode Fock space and photon-number-conserving linear optics.
//!
//! Every passive two-mode element conserves the total photon number, so its
//! action splits into independent blocks: block `s` acts on the `s + 1`
//! states `|j, s - j>` with `0 <= j <= s`. Within a block the basis is
//! ordered by `j` ascending, and blocks are ordered by `s` ascending.
//!
//! The balanced beam splitter acts on single-photon amplitudes as
//! `(1/sqrt 2) [[1, i], [i, 1]]` and the phase `phi` is applied to the first
//! internal mode. With these choices a photon entering the first input of
//! the full interferometer leaves through the first output with probability
//! `sin^2(phi / 2)`.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::states::TwoModeState;

/// Index bookkeeping for the block-diagonal two-mode basis truncated at a
/// total photon number `cutoff`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockBasis {
    cutoff: usize,
}

impl BlockBasis {
    pub fn new(cutoff: usize) -> Self {
        Self { cutoff }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn block_dim(&self, s: usize) -> usize {
        s + 1
    }

    /// Total number of basis states over all blocks.
    pub fn len(&self) -> usize {
        (self.cutoff + 1) * (self.cutoff + 2) / 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Maps `|j, k>` to `(block, position within block)`.
    pub fn locate(&self, j: usize, k: usize) -> Option<(usize, usize)> {
        let s = j + k;
        (s <= self.cutoff).then_some((s, j))
    }

    /// Inverse of [`locate`](Self::locate).
    pub fn element(&self, s: usize, pos: usize) -> Option<(usize, usize)> {
        (s <= self.cutoff && pos <= s).then(|| (pos, s - pos))
    }

    /// Position of `|j, k>` in the flattened (s ascending, j ascending) order.
    pub fn flat_index(&self, j: usize, k: usize) -> Option<usize> {
        self.locate(j, k).map(|(s, pos)| s * (s + 1) / 2 + pos)
    }
}

/// A passive two-mode unitary stored as one dense matrix per photon-number
/// block. `block(s)[(out, in)]` is the amplitude for `|in, s - in>` to go to
/// `|out, s - out>`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockUnitary {
    blocks: Vec<DMatrix<Complex64>>,
}

impl BlockUnitary {
    pub fn identity(cutoff: usize) -> Self {
        let blocks = (0..=cutoff).map(|s| DMatrix::identity(s + 1, s + 1)).collect();
        Self { blocks }
    }

    /// Builds the multiphoton action induced by a 2x2 single-photon transfer
    /// matrix `m`, where `m[(out, in)]` is the amplitude for a photon entering
    /// mode `in` to leave in mode `out`.
    ///
    /// Columns are generated one creation operator at a time, with each
    /// input creation operator replaced by its image
    /// `sum_out m[(out, in)] a_out^dag`. Each column of block `s` averages
    /// the two ways of reaching it from block `s - 1`; a single path
    /// amplifies rounding error with the photon number.
    pub fn from_single_photon(m: &Matrix2<Complex64>, cutoff: usize) -> Self {
        let mut blocks: Vec<DMatrix<Complex64>> = Vec::with_capacity(cutoff + 1);
        blocks.push(DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)));
        for s in 1..=cutoff {
            let prev = &blocks[s - 1];
            let mut block = DMatrix::zeros(s + 1, s + 1);
            for j in 0..=s {
                let k = s - j;
                // |j,k> = (sqrt(j) a^dag |j-1,k> + sqrt(k) b^dag |j,k-1>) / s
                if j > 0 {
                    let w = (j as f64).sqrt() / s as f64;
                    raise(&mut block, prev, j - 1, j, m[(0, 0)] * w, m[(1, 0)] * w);
                }
                if k > 0 {
                    let w = (k as f64).sqrt() / s as f64;
                    raise(&mut block, prev, j, j, m[(0, 1)] * w, m[(1, 1)] * w);
                }
            }
            blocks.push(block);
        }
        Self { blocks }
    }

    pub fn cutoff(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn block(&self, s: usize) -> &DMatrix<Complex64> {
        &self.blocks[s]
    }

    pub fn blocks(&self) -> &[DMatrix<Complex64>] {
        &self.blocks
    }

    /// `self` applied after `first`.
    pub fn compose(&self, first: &BlockUnitary) -> Result<BlockUnitary> {
        if self.cutoff() != first.cutoff() {
            return Err(Error::Dimension(format!(
                "cannot compose unitaries with cutoffs {} and {}",
                self.cutoff(),
                first.cutoff()
            )));
        }
        let blocks = self.blocks.iter().zip(&first.blocks).map(|(a, b)| a * b).collect();
        Ok(BlockUnitary { blocks })
    }

    /// Largest entry of `|U^dag U - I|` over all blocks.
    pub fn unitarity_defect(&self) -> f64 {
        self.blocks
            .iter()
            .map(|u| {
                let n = u.nrows();
                let g = u.adjoint() * u - DMatrix::<Complex64>::identity(n, n);
                g.iter().map(|z| z.norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

/// Adds `(c0 a^dag + c1 b^dag)` applied to column `from` of `prev` (block
/// `s - 1`) into column `to` of `block` (block `s`).
fn raise(
    block: &mut DMatrix<Complex64>,
    prev: &DMatrix<Complex64>,
    from: usize,
    to: usize,
    c0: Complex64,
    c1: Complex64,
) {
    let s = prev.nrows();
    for p in 0..s {
        let amp = prev[(p, from)];
        // a^dag |p, s-1-p> = sqrt(p+1) |p+1, s-1-p>
        block[(p + 1, to)] += c0 * amp * ((p + 1) as f64).sqrt();
        // b^dag |p, s-1-p> = sqrt(s-p) |p, s-p>
        block[(p, to)] += c1 * amp * ((s - p) as f64).sqrt();
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn beam_splitter_matrix() -> Matrix2<Complex64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Matrix2::new(c(h, 0.0), c(0.0, h), c(0.0, h), c(h, 0.0))
}

pub fn phase_shifter_matrix(phi: f64) -> Matrix2<Complex64> {
    Matrix2::new(Complex64::from_polar(1.0, phi), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0))
}

/// Single-photon transfer matrix of the full interferometer.
pub fn mzi_matrix(phi: f64) -> Matrix2<Complex64> {
    let bs = beam_splitter_matrix();
    bs * phase_shifter_matrix(phi) * bs
}

/// Single-photon transfer matrix seen by light injected between the two
/// beam splitters.
pub fn half_mzi_matrix(phi: f64) -> Matrix2<Complex64> {
    beam_splitter_matrix() * phase_shifter_matrix(phi)
}

pub fn beam_splitter(cutoff: usize) -> BlockUnitary {
    BlockUnitary::from_single_photon(&beam_splitter_matrix(), cutoff)
}

/// Diagonal blocks with `e^{i j phi}` on `|j, s - j>`.
pub fn phase_shifter(phi: f64, cutoff: usize) -> BlockUnitary {
    let blocks = (0..=cutoff)
        .map(|s| {
            DMatrix::from_diagonal(&DVector::from_iterator(
                s + 1,
                (0..=s).map(|j| Complex64::from_polar(1.0, j as f64 * phi)),
            ))
        })
        .collect();
    BlockUnitary { blocks }
}

pub fn full_mzi(phi: f64, cutoff: usize) -> BlockUnitary {
    let bs = beam_splitter(cutoff);
    let inner = bs.compose(&phase_shifter(phi, cutoff)).expect("equal cutoffs");
    inner.compose(&bs).expect("equal cutoffs")
}

pub fn half_mzi(phi: f64, cutoff: usize) -> BlockUnitary {
    beam_splitter(cutoff).compose(&phase_shifter(phi, cutoff)).expect("equal cutoffs")
}

/// Applies `u` block by block. The state's cutoff may not exceed the
/// unitary's; blocks above the state's cutoff are ignored.
pub fn apply(u: &BlockUnitary, state: &TwoModeState) -> Result<TwoModeState> {
    if state.cutoff() > u.cutoff() {
        return Err(Error::Dimension(format!("state cutoff {} exceeds unitary cutoff {}", state.cutoff(), u.cutoff())));
    }
    let blocks = state.blocks().iter().enumerate().map(|(s, v)| u.block(s) * v).collect();
    TwoModeState::from_blocks(blocks, state.truncation_tail())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{fock_pair, CoherentAmplitude};
    use std::f64::consts::PI;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|x| x as f64).product()
    }

    fn binom(n: usize, k: usize) -> f64 {
        factorial(n) / (factorial(k) * factorial(n - k))
    }

    /// Independent route: expand (m00 a + m10 b)^j (m01 a + m11 b)^(s-j)
    /// term by term and normalize.
    fn brute_force_block(m: &Matrix2<Complex64>, s: usize) -> DMatrix<Complex64> {
        let mut out = DMatrix::zeros(s + 1, s + 1);
        for j in 0..=s {
            let k = s - j;
            for p in 0..=j {
                for q in 0..=k {
                    let coeff = m[(0, 0)].powu(p as u32)
                        * m[(1, 0)].powu((j - p) as u32)
                        * m[(0, 1)].powu(q as u32)
                        * m[(1, 1)].powu((k - q) as u32)
                        * binom(j, p)
                        * binom(k, q);
                    let a = p + q;
                    let norm = (factorial(a) * factorial(s - a)).sqrt() / (factorial(j) * factorial(k)).sqrt();
                    out[(a, j)] += coeff * norm;
                }
            }
        }
        out
    }

    fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn basis_indexing_is_a_bijection() {
        let basis = BlockBasis::new(6);
        assert_eq!(basis.len(), 28);
        let mut seen = vec![false; basis.len()];
        for s in 0..=6 {
            assert_eq!(basis.block_dim(s), s + 1);
            for pos in 0..=s {
                let (j, k) = basis.element(s, pos).unwrap();
                assert_eq!(basis.locate(j, k), Some((s, pos)));
                let idx = basis.flat_index(j, k).unwrap();
                assert!(!seen[idx]);
                seen[idx] = true;
            }
        }
        assert!(seen.iter().all(|&x| x));
        assert_eq!(basis.locate(4, 3), None);
    }

    #[test]
    fn beam_splitter_single_photon_convention() {
        let out = apply(&beam_splitter(1), &fock_pair(1, 0)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.amplitude(1, 0) - c(h, 0.0)).norm() < 1e-15);
        assert!((out.amplitude(0, 1) - c(0.0, h)).norm() < 1e-15);
    }

    #[test]
    fn beam_splitter_two_photon_amplitude() {
        let out = apply(&beam_splitter(2), &fock_pair(2, 0)).unwrap();
        assert!((out.amplitude(1, 1).norm_sqr() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn recursive_blocks_match_monomial_expansion() {
        for m in [beam_splitter_matrix(), mzi_matrix(0.83), half_mzi_matrix(-2.1)] {
            let u = BlockUnitary::from_single_photon(&m, 12);
            for s in 0..=12 {
                assert!(max_diff(u.block(s), &brute_force_block(&m, s)) < 1e-12, "block {s}");
            }
        }
    }

    #[test]
    fn blocks_stay_unitary_at_high_photon_number() {
        assert!(beam_splitter(60).unitarity_defect() < 1e-12);
        assert!(full_mzi(1.234, 60).unitarity_defect() < 1e-12);
        assert!(half_mzi(0.4, 40).unitarity_defect() < 1e-12);
    }

    #[test]
    fn composed_mzi_equals_induced_single_photon_mzi() {
        let phi = 2.345;
        let composed = full_mzi(phi, 15);
        let direct = BlockUnitary::from_single_photon(&mzi_matrix(phi), 15);
        for s in 0..=15 {
            assert!(max_diff(composed.block(s), direct.block(s)) < 1e-12);
        }
    }

    #[test]
    fn phase_shifter_examples() {
        assert_eq!(phase_shifter(0.0, 4), BlockUnitary::identity(4));
        let out = apply(&phase_shifter(PI, 1), &fock_pair(1, 0)).unwrap();
        assert!((out.amplitude(1, 0) + c(1.0, 0.0)).norm() < 1e-15);
        let out = apply(&phase_shifter(PI / 2.0, 2), &fock_pair(2, 0)).unwrap();
        assert!((out.amplitude(2, 0) + c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn full_mzi_single_photon_ports() {
        for i in 0..20 {
            let phi = -3.0 + 0.37 * i as f64;
            let out = apply(&full_mzi(phi, 1), &fock_pair(1, 0)).unwrap();
            assert!((out.amplitude(1, 0).norm_sqr() - (phi / 2.0).sin().powi(2)).abs() < 1e-12);
            assert!((out.amplitude(0, 1).norm_sqr() - (phi / 2.0).cos().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn half_mzi_at_zero_phase_is_the_beam_splitter() {
        let a = half_mzi(0.0, 5);
        let b = beam_splitter(5);
        for s in 0..=5 {
            assert!(max_diff(a.block(s), b.block(s)) < 1e-15);
        }
    }

    #[test]
    fn half_mzi_single_photon_noon_fringe() {
        let noon1 = crate::states::noon_state(1).unwrap();
        for i in 0..16 {
            let phi = i as f64 * PI / 8.0;
            let p = apply(&half_mzi(phi, 1), &noon1).unwrap().amplitude(1, 0).norm_sqr();
            // |e^{i phi} + i|^2 / 4 = (1 + sin phi) / 2
            assert!((p - 0.5 * (1.0 + phi.sin())).abs() < 1e-14);
        }
    }

    #[test]
    fn double_beam_splitter_swaps_modes() {
        let bs = beam_splitter(1);
        let out = apply(&bs, &apply(&bs, &fock_pair(1, 0)).unwrap()).unwrap();
        assert!((out.amplitude(0, 1) - c(0.0, 1.0)).norm() < 1e-15);
        assert!(out.amplitude(1, 0).norm() < 1e-15);
    }

    #[test]
    fn apply_rejects_oversized_states() {
        let err = apply(&beam_splitter(2), &fock_pair(2, 1)).unwrap_err();
        assert!(matches!(err, Error::Dimension(_)));
    }

    #[test]
    fn identity_leaves_state_unchanged() {
        let state = crate::states::coherent_product(CoherentAmplitude(c(0.4, 0.1)), CoherentAmplitude(c(-0.2, 0.3)), 8);
        let out = apply(&BlockUnitary::identity(8), &state).unwrap();
        assert_eq!(out, state);
    }
}
