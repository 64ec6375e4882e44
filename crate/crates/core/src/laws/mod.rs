//! Randomized verification of the inequalities and identities of S-divergence geometry.
//!
//! Every law samples inputs, evaluates one or more checks of the form `lhs ≤ rhs`, and
//! reports the normalized margin `(lhs − rhs) / max(1, |rhs|)`. A trial violates the
//! law when its largest margin exceeds the slack. Identities are checked as
//! `|a − b| / max(1, |b|) ≤ tol`.
//!
//! Trial `i` of a run draws from a ChaCha stream seeded with `seed ^ i` on a stream
//! number fixed per law, so results do not depend on scheduling; the worst trial is
//! regenerated after the run and returned as a [`Witness`].

mod checks;
pub mod majorization;
mod witness;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pd::{random, seeded_rng, SpdMatrix};

pub use witness::Witness;

/// Default slack applied to normalized margins.
pub const DEFAULT_SLACK: f64 = 1e-10;

/// Condition-number targets used when none are given.
pub const DEFAULT_CONDS: [f64; 2] = [10.0, 1e4];

/// Grid of interpolation parameters visited by half of the trials.
const T_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

macro_rules! registry {
    ($($variant:ident => $name:literal),+ $(,)?) => {
        /// Identifier of a registered law.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(rename_all = "snake_case")]
        pub enum LawId {
            $($variant),+
        }

        impl LawId {
            pub const ALL: &'static [LawId] = &[$(LawId::$variant),+];

            pub fn name(self) -> &'static str {
                match self {
                    $(LawId::$variant => $name),+
                }
            }
        }

        impl FromStr for LawId {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok(LawId::$variant),)+
                    other => Err(Error::UnknownLaw(other.to_string())),
                }
            }
        }
    };
}

registry! {
    TriangleSdelta => "triangle_sdelta",
    TriangleScalarP => "triangle_scalar_p",
    DetBounds => "det_bounds",
    EigSandwichSdelta => "eig_sandwich_sdelta",
    PowerContraction => "power_contraction",
    GeodesicContraction => "geodesic_contraction",
    Cancellation => "cancellation",
    TranslationMonotoneConvex => "translation_monotone_convex",
    TranslationCorollary => "translation_corollary",
    PowerMonotoneRiem => "power_monotone_riem",
    PowerMonotoneSdiv => "power_monotone_sdiv",
    DetPowerMeans => "det_power_means",
    LogMajorization => "log_majorization",
    Sandwich => "sandwich",
    RiemGeodesicExact => "riem_geodesic_exact",
    RiemCancellation => "riem_cancellation",
    BasicInvariances => "basic_invariances",
    ConvexityRegion => "convexity_region",
    KronOrder => "kron_order",
    GmVariational => "gm_variational",
    SmeanGlobal => "smean_global",
}

impl LawId {
    fn stream(self) -> u64 {
        LawId::ALL.iter().position(|l| *l == self).expect("registered") as u64
    }
}

impl fmt::Display for LawId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One evaluated inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Check {
    pub label: &'static str,
    pub lhs: f64,
    pub rhs: f64,
}

impl Check {
    pub fn leq(label: &'static str, lhs: f64, rhs: f64) -> Self {
        Check { label, lhs, rhs }
    }

    /// `a = b` up to relative tolerance `tol`.
    pub fn equal(label: &'static str, a: f64, b: f64, tol: f64) -> Self {
        Check {
            label,
            lhs: (a - b).abs() / b.abs().max(1.0),
            rhs: tol,
        }
    }

    pub fn margin(&self) -> f64 {
        let m = (self.lhs - self.rhs) / self.rhs.abs().max(1.0);
        if m.is_nan() {
            f64::INFINITY
        } else {
            m
        }
    }
}

/// Largest margin among the checks of one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub margin: f64,
    pub label: &'static str,
}

fn worst(checks: &[Check]) -> Evaluation {
    checks
        .iter()
        .map(|c| Evaluation {
            margin: c.margin(),
            label: c.label,
        })
        .fold(None, |acc: Option<Evaluation>, e| match acc {
            Some(a) if a.margin >= e.margin => Some(a),
            _ => Some(e),
        })
        .expect("every law evaluates at least one check")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawSpec {
    pub law: LawId,
    pub trials: usize,
    pub seed: u64,
    pub dims: Vec<usize>,
    pub cond_targets: Vec<f64>,
    pub slack: f64,
}

impl LawSpec {
    pub fn new(law: LawId, trials: usize, seed: u64, dims: Vec<usize>) -> Self {
        LawSpec {
            law,
            trials,
            seed,
            dims,
            cond_targets: DEFAULT_CONDS.to_vec(),
            slack: DEFAULT_SLACK,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::InvalidParameter("dims must be a nonempty list of positive sizes".into()));
        }
        if self.cond_targets.is_empty() || self.cond_targets.iter().any(|c| !(*c >= 1.0) || !c.is_finite()) {
            return Err(Error::InvalidParameter("condition targets must be finite and >= 1".into()));
        }
        if !(self.slack >= 0.0) {
            return Err(Error::InvalidParameter("slack must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawReport {
    pub law: LawId,
    pub trials_run: usize,
    pub violations: usize,
    /// Trials abandoned because of a numerical failure; not counted as violations.
    pub errored: usize,
    /// Largest margin over evaluated trials; `None` if every trial errored.
    pub worst_margin: Option<f64>,
    pub worst_check: Option<String>,
    pub worst_trial: Option<usize>,
    pub witness: Option<Witness>,
    pub passed: bool,
}

/// Sampling state of one trial.
pub(crate) struct Trial {
    pub index: usize,
    pub n: usize,
    pub cond: f64,
    pub rng: random::SpdRng,
}

impl Trial {
    fn new(spec: &LawSpec, index: usize) -> Self {
        let dims = spec.dims.len();
        let mut rng = seeded_rng(spec.seed ^ index as u64);
        rng.set_stream(spec.law.stream());
        Trial {
            index,
            n: spec.dims[index % dims],
            cond: spec.cond_targets[(index / dims) % spec.cond_targets.len()],
            rng,
        }
    }

    pub fn spd(&mut self) -> Result<SpdMatrix> {
        random::sample_spd(&mut self.rng, self.n, self.cond)
    }

    /// Positive scalar log-uniform on `[1/√cond, √cond]`.
    pub fn positive(&mut self) -> f64 {
        let h = self.cond.sqrt();
        random::sample_log_uniform(&mut self.rng, 1.0 / h, h)
    }

    /// Parameter in `[0, 1]`: a grid point for half of the trials, uniform otherwise.
    pub fn unit(&mut self) -> f64 {
        let k = self.index % 10;
        if k < T_GRID.len() {
            T_GRID[k]
        } else {
            self.rng.random::<f64>()
        }
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn sub_seed(&mut self) -> u64 {
        self.rng.random::<u64>()
    }
}

/// Re-evaluates a stored witness.
pub fn evaluate_witness(w: &Witness) -> Result<Evaluation> {
    let law: LawId = w.law.parse()?;
    Ok(worst(&checks::evaluate(law, w)?))
}

/// All checks of a witness, for inspection.
pub fn witness_checks(w: &Witness) -> Result<Vec<Check>> {
    let law: LawId = w.law.parse()?;
    checks::evaluate(law, w)
}

fn sample_trial(spec: &LawSpec, index: usize) -> Result<Witness> {
    let mut trial = Trial::new(spec, index);
    checks::sample(spec.law, &mut trial)
}

fn run_trial(spec: &LawSpec, index: usize) -> Option<Evaluation> {
    let w = sample_trial(spec, index).ok()?;
    checks::evaluate(spec.law, &w).ok().map(|c| worst(&c))
}

/// Runs `spec.trials` randomized trials of one law.
///
/// Trials run on the ambient rayon pool; the report is independent of the pool size.
pub fn run_law(spec: &LawSpec) -> Result<LawReport> {
    spec.validate()?;
    let outcomes: Vec<Option<Evaluation>> = (0..spec.trials)
        .into_par_iter()
        .map(|i| run_trial(spec, i))
        .collect();
    let mut violations = 0;
    let mut errored = 0;
    let mut worst: Option<(usize, Evaluation)> = None;
    for (i, outcome) in outcomes.iter().enumerate() {
        match outcome {
            None => errored += 1,
            Some(e) => {
                if e.margin > spec.slack {
                    violations += 1;
                }
                if worst.is_none_or(|(_, w)| e.margin > w.margin) {
                    worst = Some((i, *e));
                }
            }
        }
    }
    let witness = match worst {
        Some((i, _)) => Some(sample_trial(spec, i)?),
        None => None,
    };
    Ok(LawReport {
        law: spec.law,
        trials_run: spec.trials,
        violations,
        errored,
        worst_margin: worst.map(|(_, e)| e.margin),
        worst_check: worst.map(|(_, e)| e.label.to_string()),
        worst_trial: worst.map(|(i, _)| i),
        witness,
        passed: violations == 0,
    })
}

/// Runs every registered law with the default condition targets.
pub fn run_all(trials_per_law: usize, seed: u64, dims: &[usize]) -> Result<Vec<LawReport>> {
    LawId::ALL
        .iter()
        .map(|&law| run_law(&LawSpec::new(law, trials_per_law, seed, dims.to_vec())))
        .collect()
}
