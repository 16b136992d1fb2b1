use anyhow::{bail, Result};
use nhskin::alpha::triple_spread;
use nhskin::matrix::{
    dense_eigensystem, dense_spectrum, edge_width, expectation_profiles, matched_distance, weight_report,
    Normalization, Provenance, Spectrum,
};
use nhskin::models_1d::{hn_balanced, mixed_lambda, mixed_roots, ssh_balanced, unidirectional_stencil};
use nhskin::models_2d::{
    envelope_curves, marginal_dir1, marginal_dir2, representative_index, segment_family_distance,
    stacked_hn_balance, stacked_ssh_balance, uniform_t_grid,
};
use nhskin::sensitivity::{classify_sensitivity, hausdorff, sensitivity_exponent, Metric};
use nhskin::topology::{gap_classify, tridiag_det_winding, winding_number, BlochSampler, GapVerdict};
use nhskin::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::{Delta, ModelId, RunConfig, Task};
use crate::models::{self, cell_size, evaluate, general_chain, hn_params, matrix, oracle_only, ssh_params};
use crate::output::num;

/// One eigenvalue row of the main CSV.
#[derive(Clone, Debug)]
pub struct Row {
    pub delta: Delta,
    pub j: Option<usize>,
    pub value: C64,
    pub provenance: Provenance,
}

/// An additional table written next to the main CSV.
#[derive(Clone, Debug)]
pub struct Table {
    pub suffix: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub rows: Vec<Row>,
    pub sidecar: Map<String, Value>,
    pub tables: Vec<Table>,
}

fn cx(z: C64) -> Value {
    json!([z.re, z.im])
}

fn opt(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

/// Chain length or lattice sizes used for eigenvalue output.
fn output_sizes(cfg: &RunConfig) -> Vec<usize> {
    if cfg.task == Task::Sensitivity {
        vec![cfg.sizes[0]]
    } else {
        cfg.sizes.clone()
    }
}

fn spectra(cfg: &RunConfig, sizes: &[usize], deltas: &[Delta]) -> Result<Vec<models::Evaluation>> {
    deltas.par_iter().map(|&d| evaluate(cfg, sizes, d)).collect()
}

pub fn run_task(cfg: &RunConfig, task: Task) -> Result<Outcome> {
    let sizes = output_sizes(cfg);
    let deltas = cfg.deltas();
    let evals = spectra(cfg, &sizes, &deltas)?;

    let mut rows = vec![];
    let mut fallback = false;
    let mut notes = vec![];
    let mut provenances = vec![];
    for (d, e) in deltas.iter().zip(&evals) {
        fallback |= e.oracle_fallback;
        for n in &e.notes {
            if !notes.contains(n) {
                notes.push(n.clone());
            }
        }
        let p = e.provenance.to_string();
        if !provenances.contains(&p) {
            provenances.push(p);
        }
        rows.extend(e.values.iter().map(|&(j, value)| Row {
            delta: *d,
            j,
            value,
            provenance: e.provenance,
        }));
    }
    provenances.sort();

    let mut side = Map::new();
    side.insert("config".into(), serde_json::to_value(cfg)?);
    side.insert("task".into(), serde_json::to_value(task)?);
    side.insert("rows".into(), json!(rows.len()));
    side.insert("provenance".into(), json!(provenances));
    side.insert("oracle_fallback".into(), json!(fallback));
    side.insert("notes".into(), json!(notes));
    let mut tables = vec![];

    match task {
        Task::Spectrum => {}
        Task::Sweep => sweep(cfg, &sizes, &evals, &mut side)?,
        Task::States => states(cfg, &sizes, deltas[0], &mut side, &mut tables)?,
        Task::Winding => winding(cfg, &sizes, &mut side)?,
        Task::Gap => gap(cfg, &sizes, &mut side)?,
        Task::Envelope => envelope(cfg, &sizes, &rows, &mut side, &mut tables)?,
        Task::Sensitivity => sensitivity(cfg, &mut side)?,
        Task::Balance => balance(cfg, &sizes, &mut side)?,
    }
    Ok(Outcome {
        rows,
        sidecar: side,
        tables,
    })
}

fn family<'a>(cfg: &'a RunConfig, sizes: &[usize]) -> impl Fn(f64) -> nhskin::Result<Spectrum> + Sync + 'a {
    let sizes = sizes.to_vec();
    move |d| {
        evaluate(cfg, &sizes, Delta::Single(d))
            .map(|e| e.spectrum())
            .map_err(|e| nhskin::Error::InvalidParams(e.to_string()))
    }
}

fn metric(cfg: &RunConfig) -> Metric {
    match cfg.exclude_smallest {
        Some(k) if k > 0 => Metric::HausdorffExcludingSmallest(k),
        _ => Metric::Hausdorff,
    }
}

fn screen_json(cfg: &RunConfig, sizes: &[usize]) -> Result<Value> {
    let eps = cfg.epsilon.unwrap_or(0.01);
    let s = classify_sensitivity(&family(cfg, sizes), eps, cfg.screen_policy())?;
    Ok(json!({
        "epsilon": eps,
        "verdict": s.verdict.to_string(),
        "statistic": opt(s.statistic),
        "first_distance": s.d_first,
    }))
}

fn sweep(cfg: &RunConfig, sizes: &[usize], evals: &[models::Evaluation], side: &mut Map<String, Value>) -> Result<()> {
    let base = evals[0].spectrum();
    let m = metric(cfg);
    let dist = evals
        .iter()
        .map(|e| m.distance(&base.values, &e.spectrum().values))
        .collect::<nhskin::Result<Vec<f64>>>()?;
    let steps = evals
        .windows(2)
        .map(|w| hausdorff(&w[0].spectrum().values, &w[1].spectrum().values))
        .collect::<nhskin::Result<Vec<f64>>>()?;
    side.insert("distance_to_first".into(), json!(dist));
    side.insert("step_distance".into(), json!(steps));
    side.insert("screen".into(), screen_json(cfg, sizes)?);
    Ok(())
}

fn edge_fraction(profile: &[f64]) -> f64 {
    let n = profile.len();
    let k = edge_width(n);
    let total: f64 = profile.iter().sum();
    profile[..k].iter().sum::<f64>().max(profile[n - k..].iter().sum::<f64>()) / total
}

fn states(
    cfg: &RunConfig,
    sizes: &[usize],
    d: Delta,
    side: &mut Map<String, Value>,
    tables: &mut Vec<Table>,
) -> Result<()> {
    let m = matrix(cfg, sizes, d)?;
    if cfg.model.is_2d() {
        let (n1, n2, cell) = (sizes[0], sizes[1], cell_size(cfg));
        let (values, vectors) = nhskin::matrix::dense_right_eigenpairs(&m)?;
        let i = representative_index(&values);
        let w: Vec<f64> = vectors[i].iter().map(|z| z.norm_sqr()).collect();
        // Separable lattices order sites with direction 1 slowest.
        let (p1, p2) = if cfg.model == ModelId::SeparableSquare {
            (marginal_dir2(&w, n2, n1, 1), marginal_dir1(&w, n2, n1, 1))
        } else {
            (marginal_dir1(&w, n1, n2, cell), marginal_dir2(&w, n1, n2, cell))
        };
        let mut rows = vec![];
        for (dir, p) in [(1, &p1), (2, &p2)] {
            let total: f64 = p.iter().sum();
            rows.extend(
                p.iter()
                    .enumerate()
                    .map(|(s, x)| vec![dir.to_string(), s.to_string(), num(x / total)]),
            );
        }
        side.insert(
            "representative".into(),
            json!({
                "value": cx(values[i]),
                "edge_fraction_dir1": edge_fraction(&p1),
                "edge_fraction_dir2": edge_fraction(&p2),
            }),
        );
        tables.push(Table {
            suffix: "states".into(),
            header: ["direction", "site", "weight"].map(String::from).to_vec(),
            rows,
        });
        return Ok(());
    }

    let es = dense_eigensystem(&m)?;
    let mut order: Vec<usize> = (0..es.right.len()).collect();
    let vals = &es.spectrum.values;
    order.sort_by(|&a, &b| vals[a].re.total_cmp(&vals[b].re).then(vals[a].im.total_cmp(&vals[b].im)));
    let mut rows = vec![];
    let mut summary = vec![];
    for (state, &i) in order.iter().enumerate() {
        let prof = expectation_profiles(&es.right[i], &es.left[i], Normalization::Biorthogonal)?;
        for s in 0..prof.rr.len() {
            let lr = prof.lr.as_ref().map(|v| v[s]);
            rows.push(vec![
                state.to_string(),
                s.to_string(),
                num(prof.rr[s]),
                num(prof.ll[s]),
                lr.map(|z| num(z.re)).unwrap_or_default(),
                lr.map(|z| num(z.im)).unwrap_or_default(),
            ]);
        }
        let mut entry = json!({
            "state": state,
            "value": cx(vals[i]),
            "condition": opt(es.condition[i]),
        });
        if let Ok(rep) = weight_report(&prof.rr) {
            entry["heavier_edge"] = json!(format!("{:?}", rep.heavier).to_lowercase());
            entry["edge_fraction"] = json!(rep.heavier_edge_fraction());
            entry["decay_rate"] = opt(rep.decay_rate);
        }
        summary.push(entry);
    }
    side.insert("states".into(), json!(summary));
    tables.push(Table {
        suffix: "states".into(),
        header: ["state", "site", "rr", "ll", "lr_re", "lr_im"].map(String::from).to_vec(),
        rows,
    });
    Ok(())
}

fn sampler(cfg: &RunConfig, sizes: &[usize]) -> Result<BlochSampler> {
    let n = sizes[0].max(3);
    Ok(match cfg.model {
        ModelId::Hn | ModelId::HnGeneral => {
            let p = hn_params(cfg, Delta::Single(1.0));
            BlochSampler::from_stencil(&nhskin::matrix::ChainStencil::new(n).onsite(vec![p.t_d]).hopping(1, p.t_l).hopping(-1, p.t_r))?
        }
        ModelId::Unidirectional => {
            BlochSampler::from_stencil(&unidirectional_stencil(cfg.param("t_l"), cfg.param("u_l"), C64::new(1.0, 0.0), n))?
        }
        ModelId::MixedLongrange => {
            let (t_r, u_l) = (cfg.param("t_r"), cfg.param("u_l"));
            BlochSampler::scalar(move |k| t_r * C64::from_polar(1.0, -k) + u_l * C64::from_polar(1.0, 2.0 * k))
        }
        ModelId::GeneralChain => {
            let g = general_chain(cfg);
            BlochSampler::scalar(move |k| nhskin::models_1d::bloch_1d(&g, k))
        }
        ModelId::Ssh | ModelId::SshOdd => {
            let p = ssh_params(cfg, 2, Delta::Single(1.0));
            BlochSampler::block(2, move |k| {
                let e = C64::from_polar(1.0, k);
                let mut h = nhskin::matrix::DenseOperator::zeros(2);
                h.set(0, 0, p.v1);
                h.set(1, 1, p.v2);
                h.set(0, 1, p.t_l1 + p.t_r2 / e);
                h.set(1, 0, p.t_r1 + p.t_l2 * e);
                h
            })
        }
        m => bail!("no single-band Bloch function for model {m:?}"),
    })
}

fn winding(cfg: &RunConfig, sizes: &[usize], side: &mut Map<String, Value>) -> Result<()> {
    let samples = cfg.samples.unwrap_or(1024).max(64);
    if cfg.model == ModelId::Triangular {
        let r = tridiag_det_winding(cfg.param("t_l"), cfg.param("t_r"), sizes[1], samples)?;
        side.insert("w".into(), json!(r.result.w));
        side.insert("base_energy".into(), cx(r.result.e_b));
        side.insert("degenerate".into(), json!(r.degenerate));
        side.insert("phase_condition".into(), json!(r.phase_condition));
        return Ok(());
    }
    let r = winding_number(&sampler(cfg, sizes)?, cfg.base_energy(), samples)?;
    side.insert("w".into(), json!(r.w));
    side.insert("base_energy".into(), cx(r.e_b));
    side.insert("samples".into(), json!(r.samples));
    Ok(())
}

fn gap(cfg: &RunConfig, sizes: &[usize], side: &mut Map<String, Value>) -> Result<()> {
    let g = gap_classify(&sampler(cfg, sizes)?, 20)?;
    side.insert(
        "gap".into(),
        match g {
            GapVerdict::PointGap { witness, w } => json!({"kind": "point-gap", "witness": cx(witness), "w": w}),
            GapVerdict::LineGapConsistent { probes } => json!({"kind": "line-gap-consistent", "probes": probes}),
        },
    );
    Ok(())
}

fn envelope(
    cfg: &RunConfig,
    sizes: &[usize],
    rows: &[Row],
    side: &mut Map<String, Value>,
    tables: &mut Vec<Table>,
) -> Result<()> {
    if !matches!(cfg.model, ModelId::StackedHn | ModelId::Triangular) {
        bail!("envelopes exist for stacked Hatano-Nelson lattices only");
    }
    let p = models::stacked_hn(cfg);
    let n2 = sizes[1];
    let m = cfg.samples.unwrap_or(40) * n2;
    let env = envelope_curves(&p, &uniform_t_grid(m));
    let worst = rows
        .iter()
        .map(|r| segment_family_distance(&env, r.value))
        .fold(0.0, f64::max);
    side.insert("max_segment_distance".into(), json!(worst));
    side.insert("has_loop".into(), json!(env.loop_s.is_some()));
    let mut header: Vec<String> = ["t", "z1_re", "z1_im", "z2_re", "z2_im", "zp_re", "zp_im", "zm_re", "zm_im"]
        .map(String::from)
        .to_vec();
    if env.loop_s.is_some() {
        header.extend(["s_re", "s_im"].map(String::from));
    }
    let table = (0..env.t.len())
        .map(|i| {
            let mut r = vec![num(env.t[i])];
            for z in [env.z1[i], env.z2[i], env.z_plus[i], env.z_minus[i]] {
                r.extend([num(z.re), num(z.im)]);
            }
            if let Some(s) = &env.loop_s {
                r.extend([num(s[i].re), num(s[i].im)]);
            }
            r
        })
        .collect();
    tables.push(Table {
        suffix: "envelope".into(),
        header,
        rows: table,
    });
    Ok(())
}

fn sensitivity(cfg: &RunConfig, side: &mut Map<String, Value>) -> Result<()> {
    let target = cfg.target.unwrap_or(0.5);
    let fam = |n: usize, d: f64| {
        evaluate(cfg, &[n], Delta::Single(d))
            .map(|e| e.spectrum())
            .map_err(|e| nhskin::Error::InvalidParams(e.to_string()))
    };
    let fit = sensitivity_exponent(&fam, target, &cfg.sizes, metric(cfg))?;
    let critical: Vec<Value> = fit.critical.iter().map(|&(n, d)| json!([n, d])).collect();
    let screens = cfg
        .sizes
        .iter()
        .map(|&n| screen_json(cfg, &[n]))
        .collect::<Result<Vec<_>>>()?;
    side.insert(
        "fit".into(),
        json!({
            "target": target,
            "xi": fit.xi,
            "r2": fit.r2,
            "verdict": fit.verdict.to_string(),
            "critical_delta": critical,
        }),
    );
    side.insert("screens".into(), json!(screens));
    Ok(())
}

fn balance(cfg: &RunConfig, sizes: &[usize], side: &mut Map<String, Value>) -> Result<()> {
    let tag = match cfg.model {
        ModelId::Hn | ModelId::HnGeneral => {
            let b = hn_balanced(&hn_params(cfg, Delta::Single(0.0)));
            side.insert("theta".into(), json!(b.theta));
            if b.balanced { "balanced" } else { "unbalanced" }.to_string()
        }
        ModelId::Ssh | ModelId::SshOdd => {
            let b = ssh_balanced(&ssh_params(cfg, sizes[0], Delta::Single(0.0)));
            side.insert("theta".into(), json!(b.theta));
            if b.balanced { "balanced" } else { "unbalanced" }.to_string()
        }
        ModelId::StackedHn | ModelId::Triangular => stacked_hn_balance(&models::stacked_hn(cfg), sizes[1]).to_string(),
        ModelId::StackedSsh => stacked_ssh_balance(&models::stacked_ssh(cfg), sizes[1]).to_string(),
        m => bail!("no balance classification for model {m:?}"),
    };
    side.insert("balance".into(), json!(tag));
    Ok(())
}

// ---------------------------------------------------------------------------
// Validation

fn reduced_sizes(cfg: &RunConfig) -> Vec<usize> {
    let cap = |n: usize, keep_parity: bool| {
        if n <= 12 {
            n
        } else if keep_parity && n % 2 == 1 {
            11
        } else {
            12
        }
    };
    let n = cfg.sizes[0];
    match cfg.model {
        ModelId::Ssh | ModelId::SshOdd => vec![cap(n, true)],
        ModelId::StackedSsh => vec![cap(n, true), cap(cfg.sizes[1], false)],
        m if m.is_2d() => vec![cap(n, false), cap(cfg.sizes[1], false)],
        _ => vec![cap(n, false)],
    }
}

/// Closed form against the dense matrix at a reduced size.
pub fn validate(cfg: &RunConfig, tolerance: f64, seed: u64) -> Result<Value> {
    let sizes = reduced_sizes(cfg);
    let all = cfg.deltas();
    let mut deltas: Vec<Delta> = vec![all[0], all[all.len() / 2], all[all.len() - 1]];
    deltas.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..2 {
        deltas.push(match all[0] {
            Delta::Split(..) => Delta::Split(rng.gen(), rng.gen()),
            Delta::Single(_) => Delta::Single(rng.gen()),
        });
    }

    let only = oracle_only(cfg);
    let mut checks = vec![];
    let mut worst = 0.0f64;
    let mut fallback = false;
    let mut spread = None::<f64>;
    for d in &deltas {
        let e = evaluate(cfg, &sizes, *d)?;
        fallback |= e.oracle_fallback;
        let oracle = dense_spectrum(&matrix(cfg, &sizes, *d)?)?;
        let a = e.spectrum();
        let scale = 1.0 + oracle.max_abs();
        let dist = matched_distance(&a.values, &oracle.values) / scale;
        worst = worst.max(dist);
        checks.push(json!({
            "delta": match d { Delta::Single(x) => json!(x), Delta::Split(l, r) => json!([l, r]) },
            "distance": dist,
            "provenance": a.provenance.to_string(),
        }));
        if cfg.model == ModelId::MixedLongrange {
            let (t_r, u_l) = (cfg.param("t_r"), cfg.param("u_l"));
            let (_, ys) = mixed_roots(t_r, u_l, C64::new(d.left(), 0.0), sizes[0])?;
            let s = triple_spread(&ys, &mixed_lambda(t_r, u_l))?;
            spread = Some(spread.map_or(s, |x: f64| x.max(s)));
        }
    }
    let mut report = json!({
        "model": cfg.model,
        "sizes": sizes,
        "tolerance": tolerance,
        "max_distance": worst,
        "pass": worst <= tolerance,
        "oracle_only": only || fallback,
        "checks": checks,
    });
    if let Some(s) = spread {
        report["triple_spread"] = json!(s);
    }
    Ok(report)
}
