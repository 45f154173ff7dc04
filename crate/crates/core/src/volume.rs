//! Monte Carlo volumes of channel classes inside the completely positive
//! region of the parameter cube `t, λ ∈ [−1, 1]³`.
//!
//! Draws are split into fixed batches of [`BATCH`] samples. Batch `b` uses
//! its own ChaCha8 stream (`seed`, stream `b`), so a report depends only on
//! the seed and sample count, never on how batches are scheduled.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{QubitChannel, CP_TOL};
use crate::error::{Error, Result};
use crate::nlbreak::{breaks_mes_nonlocality, is_strongly_nlb};

/// Samples per independent generator stream.
pub const BATCH: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Six parameters `t, λ`.
    Full,
    /// `t = 0`; three parameters `λ`.
    Unital,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Full => "full",
            Mode::Unital => "unital",
        })
    }
}

/// One uniform point of the cube: `(t, λ)`. Unital mode draws `λ` only.
pub fn sample_candidate<R: Rng + ?Sized>(rng: &mut R, mode: Mode) -> ([f64; 3], [f64; 3]) {
    let mut draw = || rng.random_range(-1.0..=1.0);
    let t = match mode {
        Mode::Full => [draw(), draw(), draw()],
        Mode::Unital => [0.0; 3],
    };
    let lambda = [draw(), draw(), draw()];
    (t, lambda)
}

/// Generator for batch `batch` of a run seeded with `seed`.
pub fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Counts {
    cp: u64,
    eb: u64,
    nlb_mes: u64,
    snlb: u64,
}

impl std::ops::Add for Counts {
    type Output = Counts;

    fn add(self, o: Counts) -> Counts {
        Counts { cp: self.cp + o.cp, eb: self.eb + o.eb, nlb_mes: self.nlb_mes + o.nlb_mes, snlb: self.snlb + o.snlb }
    }
}

fn classify(ch: &QubitChannel) -> Result<Counts> {
    if !ch.is_completely_positive(CP_TOL) {
        return Ok(Counts::default());
    }
    Ok(Counts {
        cp: 1,
        eb: ch.is_entanglement_breaking(CP_TOL)? as u64,
        nlb_mes: breaks_mes_nonlocality(ch)? as u64,
        snlb: is_strongly_nlb(ch)? as u64,
    })
}

fn run_batch(seed: u64, batch: u64, len: u64, mode: Mode) -> Result<Counts> {
    let mut rng = batch_rng(seed, batch);
    let mut acc = Counts::default();
    for _ in 0..len {
        let (t, lambda) = sample_candidate(&mut rng, mode);
        acc = acc + classify(&QubitChannel::canonical(t, lambda))?;
    }
    Ok(acc)
}

/// Class fractions relative to the CP-accepted count; `None` when nothing
/// was accepted.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fractions {
    pub eb: Option<f64>,
    pub nlb_mes: Option<f64>,
    pub snlb: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeReport {
    pub mode: Mode,
    pub seed: u64,
    pub samples_drawn: u64,
    pub cp_accepted: u64,
    pub eb_count: u64,
    pub nlb_mes_count: u64,
    pub snlb_count: u64,
    pub fractions: Fractions,
}

impl VolumeReport {
    /// Binomial standard error `√(f(1−f)/cp_accepted)` of a fraction.
    pub fn standard_error(&self, f: f64) -> f64 {
        (f * (1.0 - f) / self.cp_accepted as f64).sqrt()
    }

    /// Fixed-format human-readable table.
    pub fn table(&self) -> String {
        let fmt = |f: Option<f64>| f.map_or_else(|| "undefined".to_string(), |x| format!("{x:.4}"));
        let mut s = String::new();
        s += &format!("mode           {}\n", self.mode);
        s += &format!("seed           {}\n", self.seed);
        s += &format!("samples        {}\n", self.samples_drawn);
        s += &format!("cp accepted    {}\n", self.cp_accepted);
        s += &format!("{:<14} {:>10} {:>10}\n", "class", "count", "fraction");
        for (name, count, f) in [
            ("EB", self.eb_count, self.fractions.eb),
            ("NLB-MES", self.nlb_mes_count, self.fractions.nlb_mes),
            ("SNLB", self.snlb_count, self.fractions.snlb),
        ] {
            s += &format!("{:<14} {:>10} {:>10}\n", name, count, fmt(f));
        }
        s
    }
}

/// Classifies `n` uniform draws on the global thread pool.
pub fn estimate_volumes(n: u64, seed: u64, mode: Mode) -> Result<VolumeReport> {
    if n == 0 {
        return Err(Error::Precondition("sample count must be at least 1".into()));
    }
    let batches = n.div_ceil(BATCH);
    let counts = (0..batches)
        .into_par_iter()
        .map(|b| run_batch(seed, b, BATCH.min(n - b * BATCH), mode))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(Counts::default(), |a, b| a + b);

    let frac = |k: u64| (counts.cp > 0).then(|| k as f64 / counts.cp as f64);
    Ok(VolumeReport {
        mode,
        seed,
        samples_drawn: n,
        cp_accepted: counts.cp,
        eb_count: counts.eb,
        nlb_mes_count: counts.nlb_mes,
        snlb_count: counts.snlb,
        fractions: Fractions { eb: frac(counts.eb), nlb_mes: frac(counts.nlb_mes), snlb: frac(counts.snlb) },
    })
}

/// [`estimate_volumes`] on a dedicated pool of `workers` threads.
pub fn estimate_volumes_with_workers(n: u64, seed: u64, mode: Mode, workers: usize) -> Result<VolumeReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Precondition(format!("cannot start {workers} workers: {e}")))?;
    pool.install(|| estimate_volumes(n, seed, mode))
}
