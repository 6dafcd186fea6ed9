//! Random-instance benchmarks. Every sample draws from its own generator
//! seeded by `(seed, n, sample)`, so output does not depend on the worker
//! count. Rows come out ordered by `(n, sample)`.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use gzz_forge::circuit::{equal_up_to_global_phase, simulate_dense};
use gzz_forge::cliffordpass::{compile_cx_layer, cx_layer_to_tables};
use gzz_forge::qftpass::{qft_census, qft_compile, qft_compile_gzz, qft_reference};
use gzz_forge::solver::{hadamard_quotient, solve_lp, solve_mip, truncate};
use gzz_forge::trapmodel::coupling_matrix;
use gzz_forge::{BitMatrix, HollowSymmetric, Result, SolveOptions, TrapParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Lp,
    Mip,
    /// One ZZ gate per nonzero coupling, run back to back.
    Naive,
}

pub fn sample_rng(seed: u64, n: usize, sample: usize) -> ChaCha8Rng {
    let mix = seed ^ ((n as u64) << 40) ^ ((sample as u64) << 8) ^ 0x5eed;
    ChaCha8Rng::seed_from_u64(mix.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Upper-triangular entries drawn uniformly from {0, 1}.
pub fn random_binary(n: usize, rng: &mut impl Rng) -> HollowSymmetric {
    HollowSymmetric::from_fn(n, |_, _| rng.gen_range(0..2) as f64)
}

/// Random lower unitriangular matrix.
pub fn random_lower(n: usize, rng: &mut impl Rng) -> BitMatrix {
    let mut b = BitMatrix::identity(n);
    for i in 0..n {
        for j in 0..i {
            b.set(i, j, rng.gen_bool(0.5));
        }
    }
    b
}

/// Couplings of the yb171 trap preset for every `n` in the range.
pub fn preset_couplings(ns: RangeInclusive<usize>) -> Result<BTreeMap<usize, HollowSymmetric>> {
    ns.map(|n| Ok((n, coupling_matrix(&TrapParams::yb171_paper(n))?.j))).collect()
}

fn grid(ns: &RangeInclusive<usize>, samples: usize) -> Vec<(usize, usize)> {
    ns.clone().flat_map(|n| (0..samples).map(move |k| (n, k))).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GzzRow {
    pub n: usize,
    pub sample: usize,
    pub mode: Mode,
    /// Seconds.
    pub total_time: f64,
    pub encoding_cost: usize,
}

/// Time and encoding cost for a random binary target on the trap preset.
pub fn bench_gzz(
    ns: RangeInclusive<usize>,
    samples: usize,
    mode: Mode,
    seed: u64,
    opts: &SolveOptions,
) -> Result<Vec<GzzRow>> {
    let js = preset_couplings(ns.clone())?;
    grid(&ns, samples)
        .into_par_iter()
        .map(|(n, sample)| {
            let a = random_binary(n, &mut sample_rng(seed, n, sample));
            let m = hadamard_quotient(&a, &js[&n])?;
            let (total_time, encoding_cost) = match mode {
                Mode::Naive => (m.upper().iter().map(|v| v.abs()).sum(), a.upper_sum() as usize),
                Mode::Lp => {
                    let d = solve_lp(&m, opts)?;
                    (d.total_time, d.encoding_cost)
                }
                Mode::Mip => {
                    let d = solve_mip(&m, opts)?.decomposition;
                    (d.total_time, d.encoding_cost)
                }
            };
            Ok(GzzRow { n, sample, mode, total_time, encoding_cost })
        })
        .collect()
}

/// Mean with min and max over samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Spread {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Spread {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let v: Vec<f64> = values.into_iter().collect();
        let mean = if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
        Self {
            mean,
            min: v.iter().copied().fold(f64::INFINITY, f64::min),
            max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GzzSummary {
    pub n: usize,
    pub mode: Mode,
    pub samples: usize,
    pub mean_time: f64,
    pub min_time: f64,
    pub max_time: f64,
    pub mean_cost: f64,
    pub min_cost: f64,
    pub max_cost: f64,
}

pub fn summarize_gzz(rows: &[GzzRow]) -> Vec<GzzSummary> {
    let mut by_n: BTreeMap<(usize, u8), Vec<&GzzRow>> = BTreeMap::new();
    for r in rows {
        by_n.entry((r.n, r.mode as u8)).or_default().push(r);
    }
    by_n.into_values()
        .map(|rs| {
            let t = Spread::of(rs.iter().map(|r| r.total_time));
            let c = Spread::of(rs.iter().map(|r| r.encoding_cost as f64));
            GzzSummary {
                n: rs[0].n,
                mode: rs[0].mode,
                samples: rs.len(),
                mean_time: t.mean,
                min_time: t.min,
                max_time: t.max,
                mean_cost: c.mean,
                min_cost: c.min,
                max_cost: c.max,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncationRow {
    pub n: usize,
    pub samples: usize,
    pub eps_l: f64,
    pub mean_bound: f64,
    pub min_bound: f64,
    pub max_bound: f64,
    pub mean_exact: f64,
    pub min_exact: f64,
    pub max_exact: f64,
    /// Samples where the exact error exceeded the bound.
    pub violations: usize,
}

/// Error from dropping all LP times at or below `eps_l`.
pub fn bench_truncation(
    ns: RangeInclusive<usize>,
    samples: usize,
    eps_l: f64,
    seed: u64,
    opts: &SolveOptions,
) -> Result<Vec<TruncationRow>> {
    let js = preset_couplings(ns.clone())?;
    let per: Vec<(usize, f64, f64)> = grid(&ns, samples)
        .into_par_iter()
        .map(|(n, sample)| {
            let a = random_binary(n, &mut sample_rng(seed, n, sample));
            let d = solve_lp(&hadamard_quotient(&a, &js[&n])?, opts)?;
            let t = truncate(&d, &js[&n], eps_l)?;
            Ok((n, t.bound, t.exact.unwrap_or(f64::NAN)))
        })
        .collect::<Result<_>>()?;
    Ok(ns
        .map(|n| {
            let rs: Vec<&(usize, f64, f64)> = per.iter().filter(|r| r.0 == n).collect();
            let b = Spread::of(rs.iter().map(|r| r.1));
            let e = Spread::of(rs.iter().map(|r| r.2));
            TruncationRow {
                n,
                samples: rs.len(),
                eps_l,
                mean_bound: b.mean,
                min_bound: b.min,
                max_bound: b.max,
                mean_exact: e.mean,
                min_exact: e.min,
                max_exact: e.max,
                violations: rs.iter().filter(|r| r.2 > r.1 * (1.0 + 1e-12) + 1e-15).count(),
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DirCxRow {
    pub n: usize,
    pub sample: usize,
    /// One GZZ per fan-out.
    pub fanout_cost: usize,
    pub compiled_cost: usize,
    pub cz: usize,
    pub gzz: usize,
}

/// Directed CX layers: cost before and after moving Hadamards and CZs.
pub fn bench_dircx(ns: RangeInclusive<usize>, samples: usize, seed: u64) -> Result<Vec<DirCxRow>> {
    grid(&ns, samples)
        .into_par_iter()
        .map(|(n, sample)| {
            let b = random_lower(n, &mut sample_rng(seed, n, sample));
            let g = compile_cx_layer(&b)?;
            Ok(DirCxRow {
                n,
                sample,
                fanout_cost: cx_layer_to_tables(&b)?.fanout_cost(),
                compiled_cost: g.encoding_cost(),
                cz: g.cz_count(),
                gzz: g.pool_count(),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QftRow {
    pub n: usize,
    pub cs: usize,
    pub gcrz: usize,
    pub h: usize,
    pub encoding_cost: usize,
    /// Dense check against the reference; empty above the dense cap.
    pub verified: Option<bool>,
}

pub fn bench_qft(ns: RangeInclusive<usize>) -> Result<Vec<QftRow>> {
    ns.into_par_iter()
        .map(|n| {
            let c = qft_compile(n, false)?;
            let census = qft_census(n);
            let verified = if n <= 8 {
                let u = simulate_dense(&c)?;
                Some(equal_up_to_global_phase(&u, &qft_reference(n)?, 1e-9))
            } else {
                None
            };
            Ok(QftRow {
                n,
                cs: census.cs,
                gcrz: census.gcrz,
                h: census.h,
                encoding_cost: qft_compile_gzz(n, false)?.cost_report().encoding_cost,
                verified,
            })
        })
        .collect()
}

/// Write rows as CSV with a header.
pub fn write_csv<T: Serialize>(rows: &[T], out: impl std::io::Write) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
