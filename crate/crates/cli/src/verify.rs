use std::process::ExitCode;

use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;

use wtw::centering::SpectrumModel;
use wtw::kernel::{
    airy_ai, cdf_n1_closed, density_cdf_small_n, edge_setup, fredholm_det, kernel_value, kernel_value_residue,
    largest_eig_cdf, q_invariance_check, rescaled_cdf, tw2_cdf_default, ContourSpec, KernelConfig, NystromConfig,
};
use wtw::sampling::{sample_wishart_eigs, SeedSpec};
use wtw::Result;

use crate::output::emit;
use crate::{FormatArg, VerifyArgs};

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// Double-contour kernel equals its residue form.
    ContourResidue,
    /// Determinant does not depend on q.
    QInvariance,
    /// n = 1 determinant equals the hypoexponential law.
    N1Oracle,
    /// Doubling the Nystrom order or truncation leaves the determinant unchanged.
    Refinement,
    /// Determinant equals the integrated exact density for n = 2, p = 3.
    Density,
    /// Airy function zeros and F_2 reference values.
    Airy,
    /// Determinant agrees with the Wishart Monte Carlo CDF (n = 2, p = 3).
    McAgreement,
    /// Rescaled determinant at n = p = 200 is close to F_2.
    EdgeLimit,
}

const ALL: [Suite; 8] = [
    Suite::ContourResidue,
    Suite::QInvariance,
    Suite::N1Oracle,
    Suite::Refinement,
    Suite::Density,
    Suite::Airy,
    Suite::McAgreement,
    Suite::EdgeLimit,
];

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::ContourResidue => "contour-residue",
            Suite::QInvariance => "q-invariance",
            Suite::N1Oracle => "n1-oracle",
            Suite::Refinement => "refinement",
            Suite::Density => "density",
            Suite::Airy => "airy",
            Suite::McAgreement => "mc-agreement",
            Suite::EdgeLimit => "edge-limit",
        }
    }
}

#[derive(Debug, Serialize)]
struct Outcome {
    suite: Suite,
    passed: bool,
    deviation: f64,
    tolerance: f64,
    error: Option<String>,
}

/// Largest deviation found by a suite and the tolerance it is held to;
/// `perturb` is added to the deviation by the failure-injection hook.
type Check = (f64, f64);

fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn contour_residue() -> Result<Check> {
    let mut dev: f64 = 0.0;
    for (pi, n) in [
        (vec![1.0, 1.7, 3.0], 2),
        (vec![0.8, 1.1, 1.9, 2.4], 2),
        (vec![1.0, 2.0], 5),
    ] {
        let cfg = KernelConfig::new(pi.clone(), n, 0.5 * pi[0])?;
        let spec = ContourSpec::default_for(&cfg);
        for (eta, zeta) in [(0.5, 0.5), (1.2, 2.0), (3.0, 0.9)] {
            let a = kernel_value(eta, zeta, &cfg, &spec)?;
            let b = kernel_value_residue(eta, zeta, &cfg, &spec)?;
            dev = dev.max((a - b).abs() / b.abs().max(1.0));
        }
    }
    Ok((dev, 1e-8))
}

fn q_invariance() -> Result<Check> {
    let cfg = KernelConfig::new(vec![1.0, 1.8], 2, 0.5)?;
    let s = 1.2;
    let nys = NystromConfig::raw_default(&cfg, s);
    let dev = q_invariance_check(&cfg, s, &nys, &[0.25, 0.5, 0.75], None)?;
    Ok((dev, 1e-6))
}

fn n1_oracle() -> Result<Check> {
    let mut dev: f64 = 0.0;
    for pi in [vec![1.0], vec![1.0, 2.0], vec![1.0, 1.6, 2.5]] {
        let cfg = KernelConfig::new(pi.clone(), 1, 0.5 * pi[0])?;
        let spec = ContourSpec::default_for(&cfg);
        for k in 1..=10 {
            let s = 0.4 * k as f64;
            let det = largest_eig_cdf(s, &cfg, &NystromConfig::raw_default(&cfg, s), &spec)?;
            dev = dev.max((det - cdf_n1_closed(s, &pi)?).abs());
        }
    }
    Ok((dev, 1e-6))
}

fn refinement() -> Result<Check> {
    let cfg = KernelConfig::new(vec![1.0, 1.3, 2.0, 2.6], 2, 0.5)?;
    let spec = ContourSpec::default_for(&cfg);
    let mut dev: f64 = 0.0;
    for s in [0.6, 1.1, 2.0] {
        let nys = NystromConfig::raw_default(&cfg, s);
        let base = fredholm_det(s, &cfg, &nys, &spec)?;
        let more = NystromConfig::new(nys.truncation(), 2 * nys.order())?;
        let longer = NystromConfig::new(2.0 * nys.truncation(), nys.order())?;
        dev = dev.max((fredholm_det(s, &cfg, &more, &spec)? - base).abs());
        dev = dev.max((fredholm_det(s, &cfg, &longer, &spec)? - base).abs());
    }
    Ok((dev, 1e-6))
}

fn three_point_setup() -> Result<(SpectrumModel, KernelConfig, ContourSpec)> {
    let spectrum = SpectrumModel::new(vec![1.0, 0.7, 0.4])?;
    let cfg = KernelConfig::from_spectrum(&spectrum, 2)?;
    let spec = ContourSpec::default_for(&cfg);
    Ok((spectrum, cfg, spec))
}

fn density() -> Result<Check> {
    let (_, cfg, spec) = three_point_setup()?;
    let mut dev: f64 = 0.0;
    for s in [0.8, 1.5, 2.5] {
        let det = largest_eig_cdf(s, &cfg, &NystromConfig::raw_default(&cfg, s), &spec)?;
        dev = dev.max((det - density_cdf_small_n(s, &cfg, 40.0)?).abs());
    }
    Ok((dev, 1e-4))
}

fn airy() -> Result<Check> {
    const ZEROS: [f64; 3] = [-2.338107410459767, -4.087949444130971, -5.520559828095551];
    const TW2: [(f64, f64); 3] = [
        (-2.0, 0.41322414250511447),
        (0.0, 0.9693728283552613),
        (2.0, 0.9998875536983092),
    ];
    let mut dev = max_abs(ZEROS.iter().map(|&z| airy_ai(z).0.abs()));
    for (x, f) in TW2 {
        dev = dev.max((tw2_cdf_default(x)? - f).abs());
    }
    Ok((dev, 1e-8))
}

/// Largest |det - empirical| in units of the binomial standard error.
fn mc_agreement(reps: usize, seed: u64) -> Result<Check> {
    let (spectrum, cfg, spec) = three_point_setup()?;
    let largest = (0..reps as u64)
        .into_par_iter()
        .map(|r| sample_wishart_eigs(&spectrum, 2, SeedSpec::new(seed, r)).map(|d| d.largest()))
        .collect::<Result<Vec<_>>>()?;
    let mut dev: f64 = 0.0;
    for s in [0.6, 1.0, 1.5, 2.2, 3.2] {
        let det = largest_eig_cdf(s, &cfg, &NystromConfig::raw_default(&cfg, s), &spec)?;
        let emp = largest.iter().filter(|&&l| l <= s).count() as f64 / reps as f64;
        let se = (det * (1.0 - det) / reps as f64).sqrt().max(1e-12);
        dev = dev.max((emp - det).abs() / se);
    }
    Ok((dev, 3.0))
}

fn edge_limit() -> Result<Check> {
    let spectrum = SpectrumModel::identity(200)?;
    let (cfg, contour, params) = edge_setup(&spectrum, 200, -2.0, 2.0)?;
    let mut dev: f64 = 0.0;
    for x in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let s = rescaled_cdf(x, &cfg, &params, &NystromConfig::rescaled_default(x), &contour)?;
        dev = dev.max((s - tw2_cdf_default(x)?).abs());
    }
    Ok((dev, 0.02))
}

fn run_suite(suite: Suite, args: &VerifyArgs) -> Result<Check> {
    match suite {
        Suite::ContourResidue => contour_residue(),
        Suite::QInvariance => q_invariance(),
        Suite::N1Oracle => n1_oracle(),
        Suite::Refinement => refinement(),
        Suite::Density => density(),
        Suite::Airy => airy(),
        Suite::McAgreement => mc_agreement(args.mc_reps, args.seed),
        Suite::EdgeLimit => edge_limit(),
    }
}

pub fn run(args: VerifyArgs) -> Result<ExitCode> {
    let suites: Vec<Suite> = if args.suite.is_empty() {
        ALL.to_vec()
    } else {
        ALL.iter().copied().filter(|s| args.suite.contains(s)).collect()
    };
    let mut outcomes = Vec::with_capacity(suites.len());
    for suite in suites {
        log::info!("running {}", suite.name());
        let outcome = match run_suite(suite, &args) {
            Ok((mut deviation, tolerance)) => {
                if args.inject_failure == Some(suite) {
                    deviation += 10.0 * tolerance;
                }
                Outcome {
                    suite,
                    passed: deviation <= tolerance,
                    deviation,
                    tolerance,
                    error: None,
                }
            }
            Err(e) => Outcome {
                suite,
                passed: false,
                deviation: f64::NAN,
                tolerance: f64::NAN,
                error: Some(e.to_string()),
            },
        };
        outcomes.push(outcome);
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    let text = match args.format {
        FormatArg::Json => {
            let mut s = serde_json::to_string_pretty(&outcomes).expect("serializable outcomes");
            s.push('\n');
            s
        }
        FormatArg::Text => {
            let mut s = String::new();
            for o in &outcomes {
                let status = if o.passed { "PASS" } else { "FAIL" };
                match &o.error {
                    Some(e) => s.push_str(&format!("{status} {} error: {e}\n", o.suite.name())),
                    None => s.push_str(&format!(
                        "{status} {} deviation={:.3e} tolerance={:.1e}\n",
                        o.suite.name(),
                        o.deviation,
                        o.tolerance
                    )),
                }
            }
            s.push_str(&format!(
                "summary: {} passed, {failed} failed\n",
                outcomes.len() - failed
            ));
            s
        }
    };
    emit(None, text.as_bytes())?;
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
