//! Sharp dyadic annuli `2^{k−1} < |ξ| ≤ 2^k` and the sector split of each annulus
//! used for finite-type symbols.

use std::collections::BTreeMap;

use crate::error::{invalid, Result};
use crate::spectral::SpectralFunction;

/// Piece of `f` on `|ξ| ≤ 1` (`k = 0`) or `2^{k−1} < |ξ| ≤ 2^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicPiece {
    pub k: u32,
    pub piece: SpectralFunction,
}

/// Dyadic index of `|ξ|² = r2`: smallest `k ≥ 0` with `r2 ≤ 4^k`.
pub fn dyadic_index(r2: f64) -> u32 {
    let mut k = 0;
    let mut bound = 1.0;
    while r2 > bound {
        k += 1;
        bound *= 4.0;
    }
    k
}

/// Nonempty dyadic pieces in increasing `k`; they sum to `f` exactly.
pub fn dyadic_split(f: &SpectralFunction) -> Vec<DyadicPiece> {
    let mut groups: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for i in 0..f.len() {
        let r2 = f.frequency(i).iter().map(|v| v * v).sum();
        groups.entry(dyadic_index(r2)).or_default().push(i);
    }
    groups
        .into_iter()
        .map(|(k, members)| DyadicPiece {
            k,
            piece: subset(f, &members),
        })
        .collect()
}

fn subset(f: &SpectralFunction, members: &[usize]) -> SpectralFunction {
    SpectralFunction::from_sorted(
        *f.lattice(),
        members.iter().map(|&i| (f.padded_indices()[i], f.coefficients()[i])),
    )
}

/// Region of an annulus relative to the curve `|ξ₂| = |ξ₁|^{m−1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sector {
    /// `|ξ₂| > 4|ξ₁|^{m−1}`
    Vertical,
    /// neither of the others
    Diagonal,
    /// `|ξ₂| < |ξ₁|^{m−1}/4`, bucketed by `2^{l−1} ≤ |ξ₁| < 2^l`
    Horizontal { l: u32 },
}

impl Sector {
    /// The index `j ∈ {1, 2, 3}`.
    pub fn j(&self) -> u8 {
        match self {
            Sector::Vertical => 1,
            Sector::Diagonal => 2,
            Sector::Horizontal { .. } => 3,
        }
    }

    pub fn l(&self) -> Option<u32> {
        match self {
            Sector::Horizontal { l } => Some(*l),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectorPiece {
    pub k: u32,
    pub sector: Sector,
    pub piece: SpectralFunction,
}

fn check_order(m: f64) -> Result<()> {
    if !m.is_finite() || m <= 1.0 {
        return Err(invalid(format!("sector split needs m > 1, got {m}")));
    }
    Ok(())
}

/// Sector of `ξ` inside annulus `k` for order `m`. `l` is clamped to `[1, k+1]`.
pub fn sector_of(xi: &[f64], k: u32, m: f64) -> Result<Sector> {
    check_order(m)?;
    if xi.len() != 2 {
        return Err(invalid("sectors are defined in two dimensions"));
    }
    let (a1, a2) = (xi[0].abs(), xi[1].abs());
    let curve = a1.powf(m - 1.0);
    Ok(if a2 > 4.0 * curve {
        Sector::Vertical
    } else if 4.0 * a2 < curve {
        let l = a1.log2().floor() as i64 + 1;
        Sector::Horizontal {
            l: l.clamp(1, k as i64 + 1) as u32,
        }
    } else {
        Sector::Diagonal
    })
}

/// Nonempty sector pieces of an annulus, ordered `j = 1, 2`, then `j = 3` by `l`.
pub fn sector_split(piece: &DyadicPiece, m: f64) -> Result<Vec<SectorPiece>> {
    check_order(m)?;
    if piece.k < 1 {
        return Err(invalid("sector split needs an annulus with k >= 1"));
    }
    let f = &piece.piece;
    let mut groups: BTreeMap<Sector, Vec<usize>> = BTreeMap::new();
    for i in 0..f.len() {
        groups.entry(sector_of(f.frequency(i), piece.k, m)?).or_default().push(i);
    }
    Ok(groups
        .into_iter()
        .map(|(sector, members)| SectorPiece {
            k: piece.k,
            sector,
            piece: subset(f, &members),
        })
        .collect())
}
