//! One PASS/FAIL line per acceptance criterion. Runs as a plain binary so
//! the lines show up in `cargo test` output; exits non-zero on any failure.

mod common;

use std::fs;
use std::time::Instant;

use critbound::asymptotics::{
    fit_expansion, threshold_gap, verify_lemma_with, GapRegime, ItemCheck, Lemma, LemmaOptions,
    ModelForm,
};
use critbound::bubbles::{
    bubble_energy_halfspace, ground_state_level, pde_residual, sobolev_constants, BubbleKind,
    BubbleSpec,
};
use critbound::campaign::{
    campaign_model, emit_report, evaluate, gap_subcritical, sample_points, CampaignConfig, Command,
    ConfigLayer, ExponentSpec,
};
use critbound::quadrature::{
    corner_moment_identity, power_shift_identity, sign_condition, sign_condition_closed_form,
    BoundaryModel, SignCondition,
};
use critbound::solver::{
    assemble_energy, energy_gradient, find_excited_state, DiscreteField, SolverConfig,
};
use proptest::prelude::Rng;
use proptest::test_runner::{RngAlgorithm, TestRng};

const KINDS: [BubbleKind; 3] = [BubbleKind::Interior, BubbleKind::Trace, BubbleKind::Corner];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn judge(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn bubble_exactness() -> Outcome {
    let mut worst: f64 = 0.0;
    for kind in KINDS {
        for dim in 3..=6 {
            for eps in [0.25, 1.0, 4.0] {
                let spec = BubbleSpec::new(kind, dim, eps).map_err(|e| e.to_string())?;
                let res = pde_residual(&spec, &sample_points(dim, eps, 200))
                    .map_err(|e| e.to_string())?;
                worst = worst.max(res.interior_max).max(res.boundary_max);
            }
        }
    }
    judge(
        worst < 1e-9,
        format!("max residual {worst:.2e} (< 1e-9), 36 cases x 200 points"),
    )
}

fn constant_identities() -> Outcome {
    let (mut energy, mut constants): (f64, f64) = (0.0, 0.0);
    for dim in 3..=6 {
        let n = dim as f64;
        let c = sobolev_constants(dim).map_err(|e| e.to_string())?;
        let s = common::sobolev_oracle(dim);
        let st = common::trace_sobolev_oracle(dim);
        constants = constants.max(rel(c.s, s)).max(rel(c.s_trace, st));
        for eps in [0.25, 1.0, 4.0] {
            let interior = BubbleSpec::new(BubbleKind::Interior, dim, eps).unwrap();
            let trace = BubbleSpec::new(BubbleKind::Trace, dim, eps).unwrap();
            let di = bubble_energy_halfspace(&interior)
                .map_err(|e| e.to_string())?
                .dirichlet;
            let dt = bubble_energy_halfspace(&trace)
                .map_err(|e| e.to_string())?
                .dirichlet;
            energy = energy
                .max(rel(di, 0.5 * s.powf(n / 2.0)))
                .max(rel(dt, st.powf(n - 1.0)));
        }
    }
    judge(
        energy < 1e-6 && constants < 1e-8,
        format!(
            "Dirichlet energies {energy:.2e} (< 1e-6), S and S_T vs Beta {constants:.2e} (< 1e-8)"
        ),
    )
}

fn integral_identities() -> Outcome {
    let mut worst: f64 = 0.0;
    for dim in 4..=10 {
        let p = power_shift_identity(dim).map_err(|e| e.to_string())?;
        let c = corner_moment_identity(dim).map_err(|e| e.to_string())?;
        // independent Beta evaluation of the power-shift left side
        let n = dim as f64;
        let beta = rel(p.lhs, common::moment(n, n - 1.0, 1.0));
        worst = worst.max(p.rel_err).max(c.rel_err).max(beta);
    }
    judge(
        worst < 1e-9,
        format!("N=4..10 max rel err {worst:.2e} (< 1e-9)"),
    )
}

fn sign_conditions() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut largest = f64::NEG_INFINITY;
    for dim in 4..=7 {
        let model = BoundaryModel::uniform(dim, 0.5, 0.8).map_err(|e| e.to_string())?;
        for which in [SignCondition::TraceCritical, SignCondition::DoubleCritical] {
            let v = sign_condition(which, dim, &model).map_err(|e| e.to_string())?;
            let closed = sign_condition_closed_form(which, dim, model.mean_curvature())
                .map_err(|e| e.to_string())?;
            largest = largest.max(v);
            worst = worst.max(rel(v, closed));
        }
    }
    judge(
        largest < 0.0 && worst < 1e-8,
        format!("largest value {largest:.4e} (< 0), closed form rel err {worst:.2e} (< 1e-8)"),
    )
}

fn expansion_coefficients() -> Outcome {
    let opts = LemmaOptions::default();
    let cfg = CampaignConfig::for_command(Command::Lemmas).unwrap();
    let mut coeff: f64 = 0.0;
    let mut count = 0;
    for dim in [4, 5] {
        let model = campaign_model(&cfg, dim).map_err(|e| e.to_string())?;
        for lemma in [Lemma::Interior, Lemma::Trace, Lemma::Corner] {
            let report = verify_lemma_with(lemma, dim, &model, &opts).map_err(|e| e.to_string())?;
            for item in &report.items {
                if let ItemCheck::Coefficient { .. } = item.check {
                    coeff = coeff.max(item.rel_dev.unwrap_or(f64::INFINITY));
                    count += 1;
                }
            }
        }
    }
    let power_opts = LemmaOptions {
        boundary_q: Some(vec![2.2, 2.5, 2.8]),
        ..opts
    };
    let model = campaign_model(&cfg, 4).map_err(|e| e.to_string())?;
    let report =
        verify_lemma_with(Lemma::Interior, 4, &model, &power_opts).map_err(|e| e.to_string())?;
    let mut power: f64 = 0.0;
    let mut powers = 0;
    for item in &report.items {
        if let ItemCheck::Power { expected } = item.check {
            power = power.max((item.fitted - expected).abs());
            powers += 1;
        }
    }
    judge(
        count == 14 && coeff <= 0.05 && powers == 3 && power <= 0.02,
        format!("{count} c1 items max dev {coeff:.4} (<= 0.05), {powers} powers max dev {power:.4} (<= 0.02)"),
    )
}

fn log_rates() -> Outcome {
    let opts = LemmaOptions::default();
    let cfg = CampaignConfig::for_command(Command::Lemmas).unwrap();
    let model = campaign_model(&cfg, 3).map_err(|e| e.to_string())?;
    let mut details = Vec::new();
    let mut ok = true;
    for lemma in [Lemma::Interior3d, Lemma::Trace3d, Lemma::Corner3d] {
        let report = verify_lemma_with(lemma, 3, &model, &opts).map_err(|e| e.to_string())?;
        let item = report
            .items
            .iter()
            .find(|i| i.check == ItemCheck::LogRate)
            .ok_or("missing log-rate item")?;
        let fit =
            fit_expansion(&item.samples, ModelForm::LinearPlusLog).map_err(|e| e.to_string())?;
        let margin = fit.log_coeff.abs() / fit.fit_residual;
        ok &= fit.log_coeff < 0.0 && margin > 5.0;
        details.push(format!(
            "{} log_coeff {:.4e} ({margin:.1e}x residual)",
            lemma.name(),
            fit.log_coeff
        ));
    }
    judge(ok, details.join(", "))
}

fn threshold_gaps() -> Outcome {
    let cfg = CampaignConfig::for_command(Command::Thresholds).unwrap();
    let mut min_gap = f64::INFINITY;
    let (mut t_lo, mut t_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for dim in 3..=5 {
        let eps = if dim == 3 { 1e-3 } else { 1e-2 };
        let model = campaign_model(&cfg, dim).map_err(|e| e.to_string())?;
        for regime in [
            GapRegime::VolCrit,
            GapRegime::TraceCrit,
            GapRegime::DoubleCrit,
        ] {
            let sub = gap_subcritical(&cfg, regime, dim);
            let g = threshold_gap(regime, dim, &model, eps, sub).map_err(|e| e.to_string())?;
            min_gap = min_gap.min(g.gap);
            t_lo = t_lo.min(g.t_eps);
            t_hi = t_hi.max(g.t_eps);
        }
    }
    let mut ordered = true;
    for dim in 3..=7 {
        let n = dim as f64;
        let c = ground_state_level(dim).map_err(|e| e.to_string())?;
        ordered &= c < common::sobolev_oracle(dim).powf(n / 2.0) / (2.0 * n);
    }
    judge(
        min_gap > 0.0 && t_lo > 0.9 && t_hi < 1.1 && ordered,
        format!("min gap {min_gap:.4e} (> 0), t_eps in [{t_lo:.4}, {t_hi:.4}], c_inf ordering N=3..7 {ordered}"),
    )
}

fn solver_vs_oracle() -> Outcome {
    let mut level: f64 = 0.0;
    let mut grad: f64 = 0.0;
    let mut ladders = true;
    for (r, q) in [(3.0, 3.0), (4.0, 3.0), (3.0, 3.5)] {
        let shooter = common::Shooter::new(3, 1.0, r, q);
        let oracle = shooter
            .least_energy(0)
            .ok_or("shooting found no ground state")?;
        let cfg = SolverConfig::new(3, 1.0, r, q, 2000, 1e-9).map_err(|e| e.to_string())?;
        let mut levels = Vec::new();
        for k in 0..=2 {
            let res = find_excited_state(&cfg, k).map_err(|e| e.to_string())?;
            grad = grad.max(res.grad_norm);
            ladders &= res.sign_changes == k;
            levels.push(res.level);
        }
        level = level.max(rel(levels[0], oracle.level));
        ladders &= levels.windows(2).all(|w| w[0] < w[1]);
    }
    judge(
        level < 1e-5 && grad < 1e-8 && ladders,
        format!("level vs shooting {level:.2e} (< 1e-5), grad norm {grad:.2e} (< 1e-8), ladder increasing {ladders}"),
    )
}

fn solver_consistency() -> Outcome {
    let base = 250;
    let levels: Vec<f64> = [base, 2 * base, 4 * base]
        .iter()
        .map(|&m| {
            let cfg = SolverConfig::new(3, 1.0, 3.0, 3.0, m, 1e-11).unwrap();
            find_excited_state(&cfg, 0).map(|r| r.level)
        })
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let order = ((levels[0] - levels[1]) / (levels[1] - levels[2])).log2();

    let mut rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    let configs = [
        (3, 3.0, 3.0),
        (3, 6.0, 4.0),
        (4, 3.0, 2.5),
        (5, 10.0 / 3.0, 8.0 / 3.0),
    ];
    let mut worst: f64 = 0.0;
    for case in 0..20 {
        let (dim, r, q) = configs[case % configs.len()];
        let cfg = SolverConfig::new(dim, 1.0, r, q, 100, 1e-8).unwrap();
        let u = DiscreteField::new(
            (0..101)
                .map(|_| 3.0 * (rng.next_u64() as f64 / u64::MAX as f64) - 1.5)
                .collect(),
        );
        let g = energy_gradient(&u, &cfg).map_err(|e| e.to_string())?;
        let scale = g.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for i in 0..u.len() {
            let h = 1e-6;
            let (mut a, mut b) = (u.clone(), u.clone());
            a.values[i] += h;
            b.values[i] -= h;
            let fd = (assemble_energy(&a, &cfg).unwrap().total
                - assemble_energy(&b, &cfg).unwrap().total)
                / (2.0 * h);
            worst = worst.max((fd - g.values[i]).abs() / scale);
        }
    }
    judge(
        order >= 1.8 && worst < 1e-6,
        format!("refinement order {order:.3} (>= 1.8), gradient vs differences {worst:.2e} (< 1e-6) on 20 fields"),
    )
}

fn determinism() -> Outcome {
    let mut configs = Vec::new();
    let mut lemmas = CampaignConfig::for_command(Command::Lemmas).unwrap();
    lemmas.dims = vec![3, 4];
    configs.push(lemmas);
    let solve = ConfigLayer {
        command: Some(Command::Solve),
        r_values: Some(vec![ExponentSpec::Value(3.0)]),
        q_values: Some(vec![ExponentSpec::Value(3.0), ExponentSpec::Value(3.5)]),
        nodes: Some(vec![0, 1]),
        mesh: Some(400),
        ..ConfigLayer::default()
    };
    configs.push(solve.resolve().map_err(|e| e.to_string())?);
    configs.push(CampaignConfig::for_command(Command::Thresholds).unwrap());

    let mut files = 0;
    for cfg in &configs {
        let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
        for dir in &dirs {
            let result = evaluate(cfg).map_err(|e| e.to_string())?;
            emit_report(&result, dir.path(), cfg.format).map_err(|e| e.to_string())?;
        }
        for entry in fs::read_dir(dirs[0].path()).unwrap() {
            let path = entry.unwrap().path();
            if path.extension().and_then(|e| e.to_str()) != Some("csv") {
                continue;
            }
            let other = dirs[1].path().join(path.file_name().unwrap());
            if fs::read(&path).unwrap() != fs::read(&other).map_err(|e| e.to_string())? {
                return Err(format!("{} differs between runs", path.display()));
            }
            files += 1;
        }
    }
    judge(
        files > 0,
        format!("{files} CSV files byte-identical across two runs"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("bubble exactness", bubble_exactness),
        ("constant identities", constant_identities),
        ("integral identities", integral_identities),
        ("sign conditions", sign_conditions),
        ("expansion coefficients", expansion_coefficients),
        ("three-dimensional log rates", log_rates),
        ("threshold gaps", threshold_gaps),
        ("solver vs shooting oracle", solver_vs_oracle),
        ("solver consistency", solver_consistency),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2}: PASS {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2}: FAIL {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
