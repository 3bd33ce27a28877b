//! One function per subcommand. Each validates its flags, calls the library
//! and returns the rows unchanged, so printed values equal direct calls.

use std::io::Write;

use ewens_pitman::asymptotics::{
    global_ldp, global_mdp, local_ldp, local_mdp, tail_start, DeviationEstimate,
};
use ewens_pitman::exact::{pmf_formula, pmf_markov, tail_exact, PmfTable};
use ewens_pitman::fluctuation::{
    diversity_density, diversity_tail_asymptotic, diversity_tail_numeric, diversity_total_mass,
};
use ewens_pitman::montecarlo::{simulate_kn, tvd, SimConfig};
use ewens_pitman::params::validate_params;
use ewens_pitman::validation::{run_validation, ValidationOptions};
use ewens_pitman::ModelParams;
use rayon::prelude::*;

use crate::grid::Grid;
use crate::output::{Cell, Table};
use crate::{CliError, FluctuationWhat, ModelArgs, PmfMethod, RegimeArg};

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn params(model: ModelArgs) -> Result<ModelParams, CliError> {
    validate_params(model.alpha, model.theta).map_err(|e| usage(e.to_string()))
}

fn check_n(n: usize) -> Result<(), CliError> {
    if n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    Ok(())
}

pub fn pmf(model: ModelArgs, n: usize, method: PmfMethod) -> Result<Table, CliError> {
    let p = params(model)?;
    check_n(n)?;
    let markov = match method {
        PmfMethod::Markov | PmfMethod::Both => Some(pmf_markov(&p, n)?),
        PmfMethod::Formula => None,
    };
    let formula = match method {
        PmfMethod::Formula | PmfMethod::Both => Some(pmf_formula(&p, n)?),
        PmfMethod::Markov => None,
    };
    let mut t = Table::new(vec!["k", "log_pmf_markov", "log_pmf_formula", "abs_diff"]);
    for k in 1..=n {
        let a = markov.as_ref().map(|t| t.log_pmf(k));
        let b = formula.as_ref().map(|t| t.log_pmf(k));
        let diff = a.zip(b).map(|(a, b)| (a - b).abs());
        t.push(vec![k.into(), a.into(), b.into(), diff.into()]);
    }
    Ok(t)
}

struct DeviationRow {
    point: f64,
    k: usize,
    estimate: DeviationEstimate,
    exact_log: f64,
}

fn deviation_row(
    p: &ModelParams,
    table: &PmfTable,
    regime: RegimeArg,
    point: f64,
    bn: f64,
) -> Result<DeviationRow, CliError> {
    let n = table.n();
    let alpha = p.alpha();
    let (k, estimate, exact_log) = match regime {
        RegimeArg::LocalLdp => {
            let k = tail_start(n, point);
            (k, local_ldp(p, n, k)?, table.log_pmf(k))
        }
        RegimeArg::GlobalLdp => {
            let k = tail_start(n, point);
            (k, global_ldp(p, n, point)?, tail_exact(table, k)?.ln())
        }
        RegimeArg::LocalMdp => {
            let k = tail_start(n, point * (bn / n as f64).powf(1.0 - alpha));
            (k, local_mdp(p, n, k, bn)?, table.log_pmf(k))
        }
        RegimeArg::GlobalMdp => {
            let est = global_mdp(p, n, point, bn)?;
            let k = tail_start(n, est.inputs.x);
            (k, est, tail_exact(table, k)?.ln())
        }
    };
    Ok(DeviationRow {
        point,
        k,
        estimate,
        exact_log,
    })
}

pub fn deviations(
    model: ModelArgs,
    n: usize,
    regime: RegimeArg,
    x: Option<Grid>,
    y: Option<Grid>,
    bn: Option<f64>,
) -> Result<Table, CliError> {
    let p = params(model)?;
    if n < 2 {
        return Err(usage("--n must be at least 2"));
    }
    let large = matches!(regime, RegimeArg::LocalLdp | RegimeArg::GlobalLdp);
    let (points, bn) = if large {
        if y.is_some() || bn.is_some() {
            return Err(usage("--y/--bn belong to the moderate-deviation regimes"));
        }
        let x = x.ok_or_else(|| usage("this regime needs --x"))?;
        if x.0.iter().any(|&v| !(v > 0.0 && v < 1.0)) {
            return Err(usage("--x values must lie in (0, 1)"));
        }
        (x.0, f64::NAN)
    } else {
        if x.is_some() {
            return Err(usage("--x belongs to the large-deviation regimes"));
        }
        let y = y.ok_or_else(|| usage("this regime needs --y"))?;
        let bn = bn.ok_or_else(|| usage("this regime needs --bn"))?;
        if !(bn > 1.0 && bn < n as f64) {
            return Err(usage("--bn must satisfy 1 < bn < n"));
        }
        if y.0.iter().any(|&v| !(v > 0.0)) {
            return Err(usage("--y values must be positive"));
        }
        (y.0, bn)
    };
    let table = pmf_markov(&p, n)?;
    let rows: Vec<DeviationRow> = points
        .par_iter()
        .map(|&pt| deviation_row(&p, &table, regime, pt, bn))
        .collect::<Result<_, _>>()?;
    let mut t = Table::new(vec![
        "regime",
        "point",
        "k",
        "estimate_log",
        "exact_log",
        "ratio",
        "log_coeff",
        "log_exp",
        "frac_factor",
    ]);
    for r in rows {
        let e = r.estimate;
        t.push(vec![
            e.regime.as_str().into(),
            r.point.into(),
            r.k.into(),
            e.log_total.into(),
            r.exact_log.into(),
            (e.log_total - r.exact_log).exp().into(),
            e.log_coeff.into(),
            e.log_exp.into(),
            e.frac_factor.into(),
        ]);
    }
    Ok(t)
}

pub fn fluctuation(
    model: ModelArgs,
    what: FluctuationWhat,
    s_grid: Option<Grid>,
    x_grid: Option<Grid>,
) -> Result<Table, CliError> {
    let p = params(model)?;
    let points = match what {
        FluctuationWhat::Density => {
            if x_grid.is_some() {
                return Err(usage("density takes --s-grid, not --x-grid"));
            }
            s_grid.ok_or_else(|| usage("density needs --s-grid"))?.0
        }
        _ => {
            if s_grid.is_some() {
                return Err(usage("tails take --x-grid, not --s-grid"));
            }
            x_grid.ok_or_else(|| usage("tails need --x-grid"))?.0
        }
    };
    if points.iter().any(|&v| !(v > 0.0)) {
        return Err(usage("grid points must be positive"));
    }
    let kinds: &[&str] = match what {
        FluctuationWhat::Density => &["density"],
        FluctuationWhat::Tail => &["tail", "tail-asymptotic"],
        FluctuationWhat::TailAsymptotic => &["tail-asymptotic"],
    };
    let values: Vec<Vec<f64>> = points
        .par_iter()
        .map(|&pt| {
            kinds
                .iter()
                .map(|&kind| match kind {
                    "density" => diversity_density(&p, pt),
                    "tail" => diversity_tail_numeric(&p, pt),
                    _ => diversity_tail_asymptotic(&p, pt),
                })
                .collect::<Result<Vec<f64>, _>>()
        })
        .collect::<Result<_, _>>()?;
    let mut t = Table::new(vec!["kind", "point", "value"]);
    for (pt, vals) in points.iter().zip(values) {
        for (&kind, v) in kinds.iter().zip(vals) {
            t.push(vec![kind.into(), (*pt).into(), v.into()]);
        }
    }
    if what == FluctuationWhat::Density {
        t.push(vec![
            "total-mass".into(),
            Cell::Null,
            diversity_total_mass(&p)?.into(),
        ]);
    }
    Ok(t)
}

pub fn simulate(
    model: ModelArgs,
    n: usize,
    reps: u64,
    seed: u64,
    compare_exact: bool,
) -> Result<Table, CliError> {
    let p = params(model)?;
    check_n(n)?;
    let cfg = SimConfig::new(p, n, reps, seed).map_err(|e| usage(e.to_string()))?;
    let emp = simulate_kn(&cfg);
    let exact = compare_exact.then(|| pmf_markov(&p, n)).transpose()?;
    let mut t = Table::new(vec!["kind", "k", "count", "frequency", "exact", "value"]);
    for k in 1..=n {
        t.push(vec![
            "histogram".into(),
            k.into(),
            emp.counts()[k - 1].into(),
            emp.frequency(k).into(),
            exact.as_ref().map(|e| e.log_pmf(k).exp()).into(),
            Cell::Null,
        ]);
    }
    if let Some(exact) = &exact {
        t.push(vec![
            "tvd".into(),
            Cell::Null,
            Cell::Null,
            Cell::Null,
            Cell::Null,
            tvd(&emp, exact)?.into(),
        ]);
    }
    Ok(t)
}

pub fn validate<W: Write>(quick: bool, inject_fault: Option<f64>, out: &mut W) -> Result<(), CliError> {
    if let Some(d) = inject_fault {
        if !(d > -1.0 && d.is_finite()) {
            return Err(usage("--inject-fault must be a finite number above -1"));
        }
    }
    let results = run_validation(&ValidationOptions {
        quick,
        perturbation: inject_fault,
    });
    for r in &results {
        writeln!(out, "{}", r.line())?;
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    writeln!(out, "{} of {} checks passed", results.len() - failed, results.len())?;
    if failed > 0 {
        out.flush()?;
        return Err(CliError::ChecksFailed(failed));
    }
    Ok(())
}
