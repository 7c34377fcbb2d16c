//! Verification pipelines, one per supported claim id.

use crate::report::{verdict_from_rows, ClaimReport, Fit, Row};
use nodal_lab_core::bounds::{
    boundary_extrema_exponent, check_chiti_inequality, check_extrema_sums, check_neumann,
    fit_power_law, lemma12_bound, sogge_delta, SumCheckMode, SLOPE_TOLERANCE,
};
use nodal_lab_core::error::{Error, Result};
use nodal_lab_core::nodal::{
    count_high_extrema, decompose, default_zero_tolerance, extrema_power_sum, faber_krahn_check,
    superlevel_volumes, NodalDecomposition,
};
use nodal_lab_core::plap::{check_lindqvist, radial_plap_eigenpair, sinp_eigenpair, PLapGeometry};
use nodal_lab_core::rearrange::{
    bathtub_supremum, hardy_littlewood_check, newtonian_potential_mc, newtonian_potential_sup,
    PotentialRegion, RadialProfile, WeightedSamples, POTENTIAL_MC_SAMPLES,
};
use nodal_lab_core::spectra::{
    analytic_spectrum, fd_spectrum, load_spectrum, lp_norm, normalize, rectangle_neumann_modes,
    save_spectrum, sphere_zonal_mode, torus_sine_mode, DomainSpec, EigenPair,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::path::PathBuf;

pub const SUPPORTED_CLAIMS: &[&str] = &[
    "Lem1.2", "Thm1.3", "Thm1.5", "Cor1.6", "Cor1.7", "Thm1.8", "Thm1.9", "Thm1.12", "Thm1.14",
    "FK", "Courant", "Bathtub", "Prop2.1", "HL", "Chiti-eq",
];

/// Resolved verify configuration.
pub struct VerifyConfig {
    pub claim: String,
    pub domain: Option<DomainSpec>,
    pub count: Option<usize>,
    pub deltas: Vec<f64>,
    pub p_list: Vec<f64>,
    pub seed: u64,
    pub cache: Option<PathBuf>,
}

fn spectrum_cached(cfg: &VerifyConfig, domain: &DomainSpec, count: usize) -> Result<Vec<EigenPair>> {
    if let Some(dir) = &cfg.cache {
        match load_spectrum(dir, domain, count) {
            Ok(Some(pairs)) => return Ok(pairs),
            Ok(None) => {}
            Err(Error::Cache(msg)) => eprintln!("cache invalid, recomputing: {msg}"),
            Err(e) => return Err(e),
        }
    }
    let pairs = match domain {
        DomainSpec::MaskedGrid { .. } => fd_spectrum(domain, count)?,
        _ => analytic_spectrum(domain, count)?,
    };
    if let Some(dir) = &cfg.cache {
        save_spectrum(dir, domain, &pairs)?;
    }
    Ok(pairs)
}

fn decompose_all(pairs: &[EigenPair]) -> Result<Vec<NodalDecomposition>> {
    pairs
        .iter()
        .map(|p| decompose(p, default_zero_tolerance(p)?))
        .collect()
}

fn p_list_or<'a>(cfg: &'a VerifyConfig, default: &'a [f64]) -> &'a [f64] {
    if cfg.p_list.is_empty() {
        default
    } else {
        &cfg.p_list
    }
}

/// Family of normalized product modes on the square torus.
fn torus_family(m_max: u32) -> Result<Vec<NodalDecomposition>> {
    (1..=m_max)
        .map(|m| {
            let pair = normalize(&torus_sine_mode([2.0 * PI, 2.0 * PI], m, 48)?)?;
            decompose(&pair, default_zero_tolerance(&pair)?)
        })
        .collect()
}

fn zonal_family(l_lo: u32, l_hi: u32) -> Result<Vec<NodalDecomposition>> {
    (l_lo..=l_hi)
        .map(|l| {
            let pair = normalize(&sphere_zonal_mode(l, 96)?)?;
            decompose(&pair, default_zero_tolerance(&pair)?)
        })
        .collect()
}

pub fn run_claim(cfg: &VerifyConfig) -> Result<ClaimReport> {
    match cfg.claim.as_str() {
        "Lem1.2" => lem12(cfg),
        "Thm1.3" => thm13(cfg),
        "Thm1.5" => thm15(cfg),
        "Cor1.6" => cor16(cfg),
        "Cor1.7" => cor17(cfg),
        "Thm1.8" => thm18(cfg),
        "Thm1.9" => thm19(cfg),
        "Thm1.12" => thm112(cfg),
        "Thm1.14" => thm114(cfg),
        "FK" => faber_krahn(cfg),
        "Courant" => courant(cfg),
        "Bathtub" => bathtub(cfg),
        "Prop2.1" => prop21(cfg),
        "HL" => hardy_littlewood(cfg),
        "Chiti-eq" => chiti_equality(cfg),
        other => Err(Error::Domain {
            op: "verify",
            msg: format!(
                "unknown claim id {other:?}; supported: {}",
                SUPPORTED_CLAIMS.join(", ")
            ),
        }),
    }
}

/// Superlevel volumes of 3-d box modes against the explicit constant.
fn lem12(cfg: &VerifyConfig) -> Result<ClaimReport> {
    let domain = cfg
        .domain
        .clone()
        .unwrap_or_else(|| DomainSpec::box3(1.0, 1.0, 1.0).with_resolution(48));
    if domain.dimension() != 3 {
        return Err(Error::domain("Lem1.2", "needs a 3-d box domain"));
    }
    let count = cfg.count.unwrap_or(30);
    let pairs = spectrum_cached(cfg, &domain, count)?;
    let mut rows = Vec::new();
    for pair in &pairs {
        let nd = decompose(pair, default_zero_tolerance(pair)?)?;
        let stats = superlevel_volumes(&nd, &cfg.deltas)?;
        for (di, &delta) in cfg.deltas.iter().enumerate() {
            let min_vol = stats
                .per_domain
                .iter()
                .map(|v| v[di].1)
                .fold(f64::INFINITY, f64::min);
            let bound = lemma12_bound(3, delta, pair.lambda)? * 0.95;
            rows.push(Row::new(pair.lambda, bound, min_vol, min_vol >= bound));
        }
    }
    Ok(ClaimReport {
        id: cfg.claim.clone(),
        verdict: verdict_from_rows(&rows),
        rows,
        fit: None,
    })
}

/// Superlevel volumes stay bounded below by c(delta) lambda^{-n/2} on
/// closed surfaces; c(delta) is reported, positivity is asserted.
fn thm13(cfg: &VerifyConfig) -> Result<ClaimReport> {
    let torus = torus_family(8)?;
    let sphere = zonal_family(2, 10)?;
    let mut rows = Vec::new();
    for family in [torus, sphere] {
        for nd in &family {
            let stats = superlevel_volumes(nd, &cfg.deltas)?;
            for (di, _) in cfg.deltas.iter().enumerate() {
                let min_scaled = stats
                    .per_domain
                    .iter()
                    .map(|v| v[di].1 * nd.lambda)
                    .fold(f64::INFINITY, f64::min);
                rows.push(Row::new(nd.lambda, 0.0, min_scaled, min_scaled > 0.0));
            }
        }
    }
    // smallest scaled volume per delta is the empirical c(delta)
    for (di, &delta) in cfg.deltas.iter().enumerate() {
        let c: f64 = rows
            .iter()
            .skip(di)
            .step_by(cfg.deltas.len())
            .map(|r| r.rhs)
            .fold(f64::INFINITY, f64::min);
        println!("Thm1.3: c({delta}) = {c:.6}");
    }
    Ok(ClaimReport {
        id: cfg.claim.clone(),
        verdict: verdict_from_rows(&rows),
        rows,
        fit: None,
    })
}

fn fitted_family_claim(
    cfg: &VerifyConfig,
    decomps: &[NodalDecomposition],
    p: f64,
    claimed: f64,
) -> Result<ClaimReport> {
    let check = check_extrema_sums(decomps, p, SumCheckMode::Fitted { claimed_exponent: claimed })?;
    let fit = check.fit.expect("fitted mode always fits");
    let rows: Vec<Row> = check
        .reports
        .iter()
        .map(|r| Row::new(r.lambda, r.lhs, r.rhs, r.pass))
        .collect();
    let verdict = if check.slope_within == Some(false) {
        "fail".to_string()
    } else {
        "reported".to_string()
    };
    println!(
        "{}: fitted slope {:.4} vs claimed exponent {:.4} (+{SLOPE_TOLERANCE}); empirical constant {:.6}",
        cfg.claim,
        fit.slope,
        claimed,
        check.empirical_constant.unwrap_or(f64::NAN),
    );
    Ok(ClaimReport {
        id: cfg.claim.clone(),
        verdict,
        rows,
        fit: Some(Fit {
            slope: fit.slope,
            stderr: fit.stderr,
        }),
    })
}

/// Extrema power sums on a closed surface against lambda^{n/2 + p delta(p)}.
fn thm15(cfg: &VerifyConfig) -> Result<ClaimReport> {
    let p = p_list_or(cfg, &[2.0]).iter().copied().find(|&p| p >= 2.0).unwrap_or(2.0);
    let decomps = torus_family(cfg.count.unwrap_or(10) as u32)?;
    let n = 2u32;
    let claimed = n as f64 / 2.0 + p * sogge_delta(n, p)?;
    fitted_family_claim(cfg, &decomps, p, claimed)
}

/// First-power extrema sums: Cauchy-Schwarz consistency row by row plus the
/// lambda^{n/2} growth fit.
fn cor16(cfg: &VerifyConfig) -> Result<ClaimReport> {
    let decomps = torus_family(cfg.count.unwrap_or(10) as u32)?;
    let mut rows = Vec::new();
    let mut fit_pairs = Vec::new();
    for nd in &decomps {
        let sum = extrema_power_sum(nd, 1.0)?;
        let sq = extrema_power_sum(nd, 2.0)?;
        let bound = (sq * nd.domain_count() as f64).sqrt();
        rows.push(Row::new(nd.lambda, sum, bound, sum <= bound * (1.0 + 1e-12)));
        fit_pairs.push((nd.lambda, sum));
    }
    let fit = fit_power_law(&fit_pairs)?;
    println!("Cor1.6: sum slope {:.4} vs n/2 = 1", fit.slope);
    Ok(ClaimReport {
        id: cfg.claim.clone(),
        verdict: verdict_from_rows(&rows),
        rows,
        fit: Some(Fit {
            slope: fit.slope,
            stderr: fit.stderr,
        }),
    })
}

/// High-extrema counts stay bounded as lambda grows; the empirical constant
/// is reported, never asserted.
fn cor17(cfg: &VerifyConfig) -> Result<ClaimReport> {
    let a = 0.5;
    let n = 2u32;
    let decomps = zonal_family(2, 12)?;
    let exponent = 2.0 * (n as f64 + 1.0) / (n as f64 - 1.0);
    let mut k_emp = 0.0f64;
    let mut counts = Vec::new();
    for nd in &decomps {
        let count = count_high_extrema(nd, a, n)?;
        k_emp = k_emp.max(count as f64 * a.powf(exponent));
        counts.push((nd.lambda, count));
    }
    let bound = k_emp * a.powf(-exponent);
    let rows: Vec<Row> = counts
        .iter()
        .map(|&(lam, c)| Row::new(lam, c as f64, bound, true))
        .collect();
    println!("Cor1.7: empirical constant {k_emp:.6} at a = {a} (reported, not asserted)");
    Ok(ClaimReport {
        id: cfg.claim.clone(),
        verdict: "reported".to_string(),
        rows,
        fit: None,
    })
}

/// Explicit extrema-sum bounds on Euclidean Dirichlet domains.
fn thm18(cfg: &VerifyConfig) -> Result<ClaimReport> {
    let domain = cfg
        .domain
        .clone()
        .unwrap_or_else(|| DomainSpec::rectangle(PI, PI).with_resolution(96));
    let count = cfg.count.unwrap_or(50);
    let pairs = spectrum_cached(cfg, &domain, count)?;
    let decomps = decompose_all(&pairs)?;
    let mut rows = Vec::new();
    let mut fit = None;
    for p in [1.0, 2.0] {
        let check = check_extrema_sums(&decomps, p, SumCheckMode::Explicit { grid_slack: 0.05 })?;
        rows.extend(
            check
                .reports
                .iter()
                .map(|r| Row::new(r.lambda, r.lhs, r.rhs, r.pass)),
        );
        if p == 1.0 {
            fit = check.fit.map(|f| Fit {
                slope: f.slope,
                stderr: f.stderr,
            });
        }
    }
    Ok(ClaimReport {
        id: cfg.claim.clone(),
        verdict: verdict_from_rows(&rows),
        rows,
        fit,
    })
}

/// Planar Neumann growth: both extrema sums at most linear in mu, boundary
/// count like sqrt(mu).
fn thm19(cfg: &VerifyConfig) -> Result<ClaimReport> {
    let count = cfg.count.unwrap_or(60);
    let pairs = rectangle_neumann_modes(PI, PI, count, 64)?;
    let decomps = decompose_all(&pairs)?;
    let check = check_neumann(&decomps)?;
    println!(
        "Thm1.9: slopes sum {:.4}, sum-of-squares {:.4}, boundary-touching {:.4}",
        check.sum_fit.slope, check.sq_fit.slope, check.boundary_fit.slope
    );
    let rows: Vec<Row> = check
        .rows
        .iter()
        .filter(|r| r.0 > 1e-9)
        .map(|&(mu, sum, _sq, boundary)| {
            // lhs: measured sum; rhs: boundary-touching count recorded in
            // the margin-free slot for the table
            Row::new(mu, sum, boundary as f64, true)
        })
        .collect();
    let verdict = if check.sum_within && check.sq_within {
        "pass".to_string()
    } else {
        "fail".to_string()
    };
    Ok(ClaimReport {
        id: cfg.claim.clone(),
        verdict,
        rows,
        fit: Some(Fit {
            slope: check.sum_fit.slope,
            stderr: check.sum_fit.stderr,
        }),
    })
}

/// Boundary-manifold extrema sums at the proven exponent (p >= 5 in 3-d).
fn thm112(cfg: &VerifyConfig) -> Result<ClaimReport> {
    let p = p_list_or(cfg, &[5.0]).iter().copied().find(|&p| p >= 5.0).unwrap_or(5.0);
    let n = 3u32;
    let claimed = boundary_extrema_exponent(n, p)?;
    let domain = cfg
        .domain
        .clone()
        .unwrap_or_else(|| DomainSpec::box3(1.0, 1.0, 1.0).with_resolution(32));
    let count = cfg.count.unwrap_or(40);
    let pairs = spectrum_cached(cfg, &domain, count)?;
    let decomps = decompose_all(&pairs)?;
    fitted_family_claim(cfg, &decomps, p, claimed)
}

/// The 4^n sup-norm bound for first p-Laplacian eigenfunctions.
fn thm114(cfg: &VerifyConfig) -> Result<ClaimReport> {
    let mut rows = Vec::new();
    for &p in p_list_or(cfg, &[1.5, 2.0, 3.0, 5.0]) {
        if !(p > 1.0 && p <= 10.0) {
            return Err(Error::domain("Thm1.14", format!("p must lie in (1, 10], got {p}")));
        }
        let pair = sinp_eigenpair(p, 1.0)?;
        let report = check_lindqvist(&pair, 1, PLapGeometry::Interval { length: 1.0 }.volume())?;
        rows.push(Row::new(report.lambda, report.lhs, report.rhs, report.pass));
    }
    let radial = radial_plap_eigenpair(2.0, 1.0)?;
    let report = check_lindqvist(&radial, 2, PLapGeometry::Disk { radius: 1.0 }.volume())?;
    rows.push(Row::new(report.lambda, report.lhs, report.rhs, report.pass));
    Ok(ClaimReport {
        id: cfg.claim.clone(),
        verdict: verdict_from_rows(&rows),
        rows,
        fit: None,
    })
}

/// Faber-Krahn volume lower bound per nodal domain.
fn faber_krahn(cfg: &VerifyConfig) -> Result<ClaimReport> {
    let domain = cfg
        .domain
        .clone()
        .unwrap_or_else(|| DomainSpec::rectangle(PI, PI).with_resolution(96));
    let count = cfg.count.unwrap_or(50);
    let pairs = spectrum_cached(cfg, &domain, count)?;
    let decomps = decompose_all(&pairs)?;
    let n = domain.dimension();
    let mut rows = Vec::new();
    for nd in &decomps {
        let checks = faber_krahn_check(nd, n)?;
        let min_vol = checks.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
        let bound = checks[0].1 * 0.95;
        rows.push(Row::new(nd.lambda, bound, min_vol, min_vol >= bound));
    }
    Ok(ClaimReport {
        id: cfg.claim.clone(),
        verdict: verdict_from_rows(&rows),
        rows,
        fit: None,
    })
}

/// Nodal-domain count of the k-th eigenfunction is at most k.
fn courant(cfg: &VerifyConfig) -> Result<ClaimReport> {
    let domain = cfg
        .domain
        .clone()
        .unwrap_or_else(|| DomainSpec::disk(1.0).with_resolution(96));
    let count = cfg.count.unwrap_or(30);
    let pairs = spectrum_cached(cfg, &domain, count)?;
    let rows: Vec<Row> = pairs
        .iter()
        .map(|p| {
            let nd = decompose(p, default_zero_tolerance(p)?)?;
            let c = nd.domain_count();
            Ok(Row::new(p.lambda, c as f64, p.index as f64, c <= p.index))
        })
        .collect::<Result<_>>()?;
    Ok(ClaimReport {
        id: cfg.claim.clone(),
        verdict: verdict_from_rows(&rows),
        rows,
        fit: None,
    })
}

/// Greedy bathtub maximizer dominates random equal-measure subsets.
fn bathtub(cfg: &VerifyConfig) -> Result<ClaimReport> {
    let n = 80usize;
    let h = 1.0 / n as f64;
    let center = (0.3141, 0.2718);
    let samples: Vec<(f64, f64)> = (0..n * n)
        .map(|i| {
            let x = (i % n) as f64 * h + 0.5 * h;
            let y = (i / n) as f64 * h + 0.5 * h;
            let r = ((x - center.0).powi(2) + (y - center.1).powi(2)).sqrt();
            (r, h * h)
        })
        .collect();
    let profile = RadialProfile::new(|r: f64| 1.0 / (r + 0.01));
    let capacity = PI * 0.15 * 0.15;
    let (greedy, _) = bathtub_supremum(&profile, &samples, capacity)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut rows = Vec::new();
    for trial in 0..200usize {
        order.shuffle(&mut rng);
        let mut remaining = capacity;
        let mut value = 0.0;
        for &i in &order {
            if remaining <= 0.0 {
                break;
            }
            let (r, w) = samples[i];
            let take = w.min(remaining);
            value += profile.eval(r) * take;
            remaining -= take;
        }
        rows.push(Row::new(trial as f64, value, greedy, value <= greedy));
    }
    Ok(ClaimReport {
        id: cfg.claim.clone(),
        verdict: verdict_from_rows(&rows),
        rows,
        fit: None,
    })
}

/// Monte-Carlo Newtonian potentials of unit-ball-volume regions against the
/// closed-form sup bound.
fn prop21(cfg: &VerifyConfig) -> Result<ClaimReport> {
    let volume = 4.0 * PI / 3.0;
    let bound = newtonian_potential_sup(3, volume)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::new();
    for k in 0..50usize {
        let region = match k % 3 {
            0 => PotentialRegion::Ball {
                center: [
                    rng.gen_range(-1.5..1.5),
                    rng.gen_range(-1.5..1.5),
                    rng.gen_range(-1.5..1.5),
                ],
                radius: 1.0,
            },
            1 => {
                let s1 = rng.gen_range(0.8..2.0);
                let s2 = rng.gen_range(0.8..2.0);
                PotentialRegion::Cuboid {
                    corner: [
                        rng.gen_range(-1.0..0.0),
                        rng.gen_range(-1.0..0.0),
                        rng.gen_range(-1.0..0.0),
                    ],
                    sides: [s1, s2, volume / (s1 * s2)],
                }
            }
            _ => {
                let a = rng.gen_range(0.6..1.5);
                let b = rng.gen_range(0.6..1.5);
                PotentialRegion::Ellipsoid {
                    center: [
                        rng.gen_range(-0.5..0.5),
                        rng.gen_range(-0.5..0.5),
                        rng.gen_range(-0.5..0.5),
                    ],
                    semi_axes: [a, b, volume / (4.0 / 3.0 * PI * a * b)],
                }
            }
        };
        let est = newtonian_potential_mc(
            &region,
            [0.0; 3],
            POTENTIAL_MC_SAMPLES,
            cfg.seed.wrapping_add(1000 + k as u64),
        );
        rows.push(Row::new(k as f64, est, bound * 1.01, est <= bound * 1.01));
    }
    // the centered ball attains the bound within estimator error
    let ball = PotentialRegion::Ball {
        center: [0.0; 3],
        radius: 1.0,
    };
    let est = newtonian_potential_mc(&ball, [0.0; 3], POTENTIAL_MC_SAMPLES, cfg.seed.wrapping_add(99));
    rows.push(Row::new(50.0, (est - bound).abs(), 0.005, (est - bound).abs() <= 0.005));
    Ok(ClaimReport {
        id: cfg.claim.clone(),
        verdict: verdict_from_rows(&rows),
        rows,
        fit: None,
    })
}

/// Hardy-Littlewood rearrangement inequality on random sample pairs.
fn hardy_littlewood(cfg: &VerifyConfig) -> Result<ClaimReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let weights = vec![0.37; 512];
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let u: Vec<f64> = (0..512).map(|_| rng.gen_range(0.0..5.0)).collect();
        let v: Vec<f64> = (0..512).map(|_| rng.gen_range(0.0..5.0)).collect();
        let us = WeightedSamples::new(u, weights.clone())?;
        let vs = WeightedSamples::new(v, weights.clone())?;
        let (lhs, rhs) = hardy_littlewood_check(&us, &vs)?;
        worst = worst.max(lhs - rhs);
    }
    let rows = vec![Row::new(1000.0, worst, 1e-12, worst <= 1e-12)];
    Ok(ClaimReport {
        id: cfg.claim.clone(),
        verdict: verdict_from_rows(&rows),
        rows,
        fit: None,
    })
}

/// Reverse Hölder equality on the disk, strictness on the square.
fn chiti_equality(cfg: &VerifyConfig) -> Result<ClaimReport> {
    let disk = analytic_spectrum(&DomainSpec::disk(1.0), 1)?;
    let square = analytic_spectrum(&DomainSpec::rectangle(1.0, 1.0), 1)?;
    let ratio = |pair: &EigenPair, p: f64| -> Result<f64> {
        let r = check_chiti_inequality(pair, p)?;
        Ok(r.lhs / r.rhs)
    };
    let mut rows = Vec::new();
    for p in [1.0, 2.0] {
        let r = ratio(&disk[0], p)?;
        rows.push(Row::new(disk[0].lambda, r, 1.0, (0.995..=1.0).contains(&r)));
    }
    // the square separates cleanly from the ball at p = 1; at p = 2 the
    // true gap is 0.394%, thinner than the 1% the round threshold implies,
    // so strict inequality is what gets asserted
    let r1 = ratio(&square[0], 1.0)?;
    rows.push(Row::new(square[0].lambda, r1, 0.99, r1 <= 0.99));
    let r2 = ratio(&square[0], 2.0)?;
    rows.push(Row::new(square[0].lambda, r2, 0.998, r2 <= 0.998));
    let _ = lp_norm(&square[0].field, f64::INFINITY)?;
    Ok(ClaimReport {
        id: cfg.claim.clone(),
        verdict: verdict_from_rows(&rows),
        rows,
        fit: None,
    })
}
