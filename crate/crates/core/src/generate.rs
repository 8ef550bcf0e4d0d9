//! Seeded synthetic instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::SymbolMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InstanceKind {
    /// Independent uniform symbols.
    Uniform,
    /// `centers` uniform centers; every point copies one and replaces each
    /// coordinate with probability `flip` by a different symbol.
    Clustered { centers: usize, flip: f64 },
    /// A walk that changes one coordinate per step, cycling through the
    /// coordinates in a random order. Needs `n <= d * sigma`; the points
    /// are then distinct and the minimum spanning tree costs `n - 1`.
    LowMstPath,
    /// Uniform rows, then `copies` rows overwritten by copies of others.
    PlantedDuplicates { copies: usize },
}

impl InstanceKind {
    pub fn name(&self) -> &'static str {
        match self {
            InstanceKind::Uniform => "uniform",
            InstanceKind::Clustered { .. } => "clustered",
            InstanceKind::LowMstPath => "low-mst-path",
            InstanceKind::PlantedDuplicates { .. } => "planted-duplicates",
        }
    }
}

fn other_symbol(rng: &mut ChaCha8Rng, s: u32, sigma: u32) -> u32 {
    let o = rng.gen_range(0..sigma - 1);
    if o >= s {
        o + 1
    } else {
        o
    }
}

/// An `n x d` matrix over `{0..sigma}`.
pub fn generate(kind: InstanceKind, n: usize, d: usize, sigma: u32, seed: u64) -> Result<SymbolMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = SymbolMatrix::zeros(n, d, sigma)?;
    let fill_uniform = |m: &mut SymbolMatrix, rng: &mut ChaCha8Rng| -> Result<()> {
        for i in 0..n {
            for j in 0..d {
                m.set(i, j, rng.gen_range(0..sigma))?;
            }
        }
        Ok(())
    };
    match kind {
        InstanceKind::Uniform => fill_uniform(&mut m, &mut rng)?,
        InstanceKind::Clustered { centers, flip } => {
            if centers == 0 {
                return Err(Error::param("clustered instances need at least one center"));
            }
            if !(0.0..=1.0).contains(&flip) {
                return Err(Error::param(format!("flip probability {flip} outside [0, 1]")));
            }
            let c: Vec<Vec<u32>> = (0..centers)
                .map(|_| (0..d).map(|_| rng.gen_range(0..sigma)).collect())
                .collect();
            for i in 0..n {
                let home = &c[rng.gen_range(0..centers)];
                for (j, &s) in home.iter().enumerate() {
                    let v = if rng.gen_bool(flip) { other_symbol(&mut rng, s, sigma) } else { s };
                    m.set(i, j, v)?;
                }
            }
        }
        InstanceKind::LowMstPath => {
            if n > 1 && (d == 0 || n > d * sigma as usize) {
                return Err(Error::param(format!(
                    "a path of {n} distinct points needs n <= d * sigma = {}",
                    d * sigma as usize
                )));
            }
            let mut perm: Vec<usize> = (0..d).collect();
            perm.shuffle(&mut rng);
            let mut cur: Vec<u32> = (0..d).map(|_| rng.gen_range(0..sigma)).collect();
            for i in 0..n {
                if i > 0 {
                    let l = perm[(i - 1) % d];
                    cur[l] = (cur[l] + 1) % sigma;
                }
                for (j, &s) in cur.iter().enumerate() {
                    m.set(i, j, s)?;
                }
            }
        }
        InstanceKind::PlantedDuplicates { copies } => {
            if n < 2 {
                return Err(Error::param("planted duplicates need at least 2 rows"));
            }
            fill_uniform(&mut m, &mut rng)?;
            for _ in 0..copies.max(1) {
                let dst = rng.gen_range(0..n);
                let mut src = rng.gen_range(0..n - 1);
                if src >= dst {
                    src += 1;
                }
                for j in 0..d {
                    let s = m.get(src, j) as u32;
                    m.set(dst, j, s)?;
                }
            }
        }
    }
    Ok(m)
}
