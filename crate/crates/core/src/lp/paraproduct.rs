use super::partition::DyadicPartition;
use crate::error::Result;
use crate::spectral::{analyze_many, dealias_scalar_in_place, synthesize_many, SpectralField, SpectralScalar};

/// The three frequency interactions of a product `a b`.
#[derive(Clone, Debug)]
pub struct Paraproduct {
    /// `sum_q a_{<=q-2} b_q`
    pub low_high: SpectralScalar,
    /// `sum_q a_q b_{<=q-2}`
    pub high_low: SpectralScalar,
    /// `sum_q (a_{q-1} + a_q + a_{q+1}) b_q`
    pub resonant: SpectralScalar,
}

impl Paraproduct {
    pub fn sum(&self) -> SpectralScalar {
        self.low_high.axpy(1.0, &self.high_low).axpy(1.0, &self.resonant)
    }
}

/// Bony decomposition of the scalar product of component `ca` of `a` and
/// component `cb` of `b`; every part is dealiased.
pub fn bony_decompose(
    partition: &DyadicPartition,
    a: &SpectralField,
    ca: usize,
    b: &SpectralField,
    cb: usize,
) -> Result<Paraproduct> {
    a.grid().ensure_same(b.grid())?;
    partition.grid().ensure_same(a.grid())?;
    let sa = SpectralScalar::from_coeffs(a.grid(), a.component(ca).to_vec());
    let sb = SpectralScalar::from_coeffs(b.grid(), b.component(cb).to_vec());
    bony_decompose_scalar(partition, &sa, &sb)
}

pub fn bony_decompose_scalar(
    partition: &DyadicPartition,
    a: &SpectralScalar,
    b: &SpectralScalar,
) -> Result<Paraproduct> {
    a.grid().ensure_same(b.grid())?;
    let grid = a.grid();
    let len = grid.len();
    let shells: Vec<i32> = (-1..=partition.q_max()).collect();

    let a_shells: Vec<SpectralScalar> = shells
        .iter()
        .map(|&q| partition.project_scalar(a, q))
        .collect::<Result<_>>()?;
    let b_shells: Vec<SpectralScalar> = shells
        .iter()
        .map(|&q| partition.project_scalar(b, q))
        .collect::<Result<_>>()?;
    let mut refs: Vec<&[_]> = a_shells.iter().map(|s| s.coeffs()).collect();
    refs.extend(b_shells.iter().map(|s| s.coeffs()));
    let phys = synthesize_many(grid, &refs);
    let (pa, pb) = phys.split_at(shells.len());

    // Cumulative lowpass sums on the grid: low[i] = sum of shells 0..=i.
    let cumulative = |fields: &[Vec<f64>]| {
        let mut out: Vec<Vec<f64>> = Vec::with_capacity(fields.len());
        let mut acc = vec![0.0; len];
        for f in fields {
            for (a, v) in acc.iter_mut().zip(f) {
                *a += v;
            }
            out.push(acc.clone());
        }
        out
    };
    let a_low = cumulative(pa);
    let b_low = cumulative(pb);

    let mut low_high = vec![0.0; len];
    let mut high_low = vec![0.0; len];
    let mut resonant = vec![0.0; len];
    let count = shells.len();
    for i in 0..count {
        // shell q = i - 1; q - 2 corresponds to index i - 2.
        if i >= 2 {
            let (al, bl) = (&a_low[i - 2], &b_low[i - 2]);
            for p in 0..len {
                low_high[p] += al[p] * pb[i][p];
                high_low[p] += pa[i][p] * bl[p];
            }
        }
        let lo = i.saturating_sub(1);
        let hi = (i + 1).min(count - 1);
        for p in 0..len {
            let tilde: f64 = (lo..=hi).map(|j| pa[j][p]).sum();
            resonant[p] += tilde * pb[i][p];
        }
    }
    let spectra = analyze_many(grid, &[&low_high, &high_low, &resonant]);
    let mut parts = spectra.into_iter().map(|c| {
        let mut s = SpectralScalar::from_coeffs(grid, c);
        dealias_scalar_in_place(&mut s);
        s
    });
    Ok(Paraproduct {
        low_high: parts.next().unwrap(),
        high_low: parts.next().unwrap(),
        resonant: parts.next().unwrap(),
    })
}

/// Dealiased scalar product, the reference for the three-part identity.
pub fn dealiased_scalar_product(a: &SpectralScalar, b: &SpectralScalar) -> Result<SpectralScalar> {
    a.grid().ensure_same(b.grid())?;
    let phys = synthesize_many(a.grid(), &[a.coeffs(), b.coeffs()]);
    let prod: Vec<f64> = phys[0].iter().zip(&phys[1]).map(|(x, y)| x * y).collect();
    let mut s = SpectralScalar::from_coeffs(a.grid(), analyze_many(a.grid(), &[&prod]).pop().unwrap());
    dealias_scalar_in_place(&mut s);
    Ok(s)
}
