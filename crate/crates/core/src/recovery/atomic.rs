use super::FEASIBILITY_TOL;
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, eigh, lstsq, lstsq_mat, zeros, CMat, CVec};
use crate::measures::{block_toeplitz, make_atomic, MomentSequence, MomentSource, SemiSpectralMeasure};
use crate::scalar::{cabs, cis, creal, lit, to_f64, Real};

/// Minimal circular distance between reconstructed atoms.
pub const ATOM_SEPARATION: f64 = 1e-6;
/// Largest moment mismatch, relative to `max(1, m(0))`, of a reconstruction.
pub const RECONSTRUCTION_RESIDUAL: f64 = 1e-6;
/// Toeplitz eigenvalues below this fraction of the largest span the noise subspace.
const RANK_TOL: f64 = 1e-10;

/// Smallest circular distance between sorted angles in `[0, 2π)`.
fn min_separation<T: Real>(angles: &[T]) -> Option<T> {
    if angles.len() < 2 {
        return None;
    }
    let two_pi = T::two_pi();
    let mut best = angles[0] + two_pi - angles[angles.len() - 1];
    for w in angles.windows(2) {
        best = best.min(w[1] - w[0]);
    }
    Some(best)
}

/// Rank-deficient extension `m(S+1)` of a positive definite Toeplitz sequence,
/// taking the point of the admissible circle on the positive real side of its centre.
fn singular_extension<T: Real>(tm: &CMat<T>, seq: &MomentSequence<T>, s: usize) -> Result<CMat<T>> {
    let n = s + 1;
    let inv = crate::linalg::inverse(tm).ok_or_else(|| Error::IllConditioned("Toeplitz matrix is singular".into()))?;
    let mut bt = CVec::<T>::zeros(n);
    for k in 1..n {
        bt[k] = seq.moment((s + 1 - k) as i64)[(0, 0)];
    }
    let y = &inv * &bt;
    let q = inv[(0, 0)].re;
    let p = y[0];
    let beta = bt.dotc(&y).re;
    let m0 = seq.moment(0)[(0, 0)].re;
    let rho2 = (m0 - beta) / q + p.norm_sqr() / (q * q);
    let c = -p / q + creal(rho2.max(T::zero()).sqrt());
    let mut ext = zeros::<T>(n + 1, n + 1);
    ext.view_mut((0, 0), (n, n)).copy_from(tm);
    for k in 0..n {
        let v = if k == 0 { c } else { bt[k] };
        ext[(k, n)] = v;
        ext[(n, k)] = v.conj();
    }
    ext[(n, n)] = creal(m0);
    Ok(ext)
}

/// Atomic scalar measure whose moments match `m(s)` for `|s| <= S`.
///
/// The atoms come from the shift invariance of the signal subspace of the
/// Toeplitz matrix (rank-deficient case) or of its singular one-step extension
/// (full rank case). Masses solve the Vandermonde system in least squares.
pub fn atomic_from_moments<T: Real>(seq: &MomentSequence<T>, s: usize) -> Result<SemiSpectralMeasure<T>> {
    if seq.dim() != 1 {
        return Err(Error::Precondition(format!("atomic reconstruction needs dimE = 1, got {}", seq.dim())));
    }
    if s > seq.max_order() {
        return Err(Error::BadRange(format!("order {s} exceeds stored order {}", seq.max_order())));
    }
    let tm = block_toeplitz(seq, s);
    let (vals, _) = eigh(&tm);
    let top = vals[vals.len() - 1];
    let m0 = seq.moment(0)[(0, 0)].re;
    let scale = m0.abs().max(T::one());
    if vals[0] < -lit::<T>(FEASIBILITY_TOL) * scale {
        return Err(Error::InfeasibleSequence { eigenvalue: to_f64(vals[0]) });
    }
    if top <= lit::<T>(FEASIBILITY_TOL) * scale {
        return make_atomic(1, Vec::new());
    }
    let rank = vals.iter().filter(|&&v| v > lit::<T>(RANK_TOL) * top).count();
    let work = if rank <= s { tm } else { singular_extension(&tm, seq, s)? };
    let (_, vecs) = eigh(&work);
    let n = work.nrows();
    let signal = vecs.columns(n - rank, rank).into_owned();
    let u1 = signal.rows(0, n - 1).into_owned();
    let u2 = signal.rows(1, n - 1).into_owned();
    let phi = lstsq_mat(&u1, &u2).ok_or_else(|| Error::IllConditioned("shift equation is rank deficient".into()))?;
    let mut angles: Vec<T> = eigenvalues(&phi)
        .into_iter()
        .map(|z| {
            let a = z.im.atan2(z.re);
            if a < T::zero() { a + T::two_pi() } else { a }
        })
        .collect();
    angles.sort_by(|a, b| a.partial_cmp(b).expect("finite angle"));
    if let Some(sep) = min_separation(&angles) {
        if sep < lit(ATOM_SEPARATION) {
            return Err(Error::IllConditioned(format!("atoms closer than {ATOM_SEPARATION:e}: {:e}", to_f64(sep))));
        }
    }
    let rows = 2 * s + 1;
    let mut a = zeros::<T>(rows, rank);
    let mut b = CVec::<T>::zeros(rows);
    for (row, sj) in (-(s as i64)..=s as i64).enumerate() {
        b[row] = seq.moment(sj)[(0, 0)];
        for (i, &th) in angles.iter().enumerate() {
            a[(row, i)] = cis(-th * lit::<T>(sj as f64));
        }
    }
    let w = lstsq(&a, &b).ok_or_else(|| Error::IllConditioned("Vandermonde system".into()))?;
    let masses: Vec<T> = w.iter().map(|z| z.re).collect();
    if let Some(neg) = masses.iter().find(|&&x| x < -lit::<T>(RECONSTRUCTION_RESIDUAL) * scale) {
        return Err(Error::IllConditioned(format!("negative mass {:e}", to_f64(*neg))));
    }
    let wr = CVec::from_iterator(rank, masses.iter().map(|&x| creal(x)));
    let residual = (&a * wr - &b).iter().fold(T::zero(), |acc, z| acc.max(cabs(*z))) / scale;
    if residual >= lit(RECONSTRUCTION_RESIDUAL) {
        return Err(Error::IllConditioned(format!("moment residual {:e}", to_f64(residual))));
    }
    make_atomic(
        1,
        angles
            .into_iter()
            .zip(masses)
            .map(|(th, w)| (th, CMat::from_element(1, 1, creal(w.max(T::zero())))))
            .collect(),
    )
}
