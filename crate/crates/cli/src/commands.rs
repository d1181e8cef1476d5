use std::fmt::Write as _;
use std::process::ExitCode;

use rayon::prelude::*;
use serde_json::json;

use wtw::centering::{centering_params, check_assumptions, SpectrumModel};
use wtw::factor::{
    complexify, confidence_set, confidence_set_from_ratios, cov_eigs, run_test, run_test_from_ratios, scree_data,
    KmaxConvention, Panel,
};
use wtw::sampling::{gue_top_scaled_with, sample_wishart_eigs, synth_factor_panel, FactorPanelSpec, SeedSpec};
use wtw::table::{load_table, tabulate as build_table, CriticalTable, TabulateConfig, REFERENCE_PERCENTILES};
use wtw::{Error, Result};

use crate::output::emit;
use crate::{CenteringArgs, FormatArg, SimulateCommand, TabulateArgs, TestArgs};

fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn tabulate(a: TabulateArgs) -> Result<ExitCode> {
    let cfg = TabulateConfig {
        m_max: a.m_max,
        gue_n: a.gue_n,
        reps: a.reps,
        percentiles: a.percentiles.unwrap_or_else(|| REFERENCE_PERCENTILES.to_vec()),
        base_seed: a.seed,
        method: a.method.into(),
    };
    log::info!(
        "tabulating m = 1..={} from {} GUE({}) replicates, seed {}",
        cfg.m_max,
        cfg.reps,
        cfg.gue_n,
        cfg.base_seed
    );
    let table = build_table(&cfg)?;
    if table.meta.replaced_replicates > 0 {
        log::warn!(
            "{} replicates redrawn after tied spectra",
            table.meta.replaced_replicates
        );
    }
    if let Err(e) = table.validate() {
        log::warn!("table fails monotonicity checks: {e}");
    }
    let mut json = table.to_json()?;
    json.push('\n');
    emit(a.out.as_deref(), json.as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

pub fn test(a: TestArgs) -> Result<ExitCode> {
    let table = match &a.table {
        Some(path) => load_table(path)?,
        None => {
            log::info!("using the built-in reference table");
            CriticalTable::reference()
        }
    };
    let convention = if a.exclude_kmax {
        KmaxConvention::Exclude
    } else {
        KmaxConvention::Include
    };

    let eigs = if let Some(path) = &a.panel {
        let delimiter = u8::try_from(a.delimiter)
            .map_err(|_| Error::InvalidInput(format!("delimiter {:?} is not a single byte", a.delimiter)))?;
        let panel = Panel::read_csv_path(path, delimiter)?;
        log::info!("panel with {} series and {} periods", panel.p(), panel.t());
        Some(cov_eigs(&complexify(&panel)?)?)
    } else {
        a.eigenvalues.clone()
    };

    if let (Some(path), Some(e)) = (&a.scree_out, &eigs) {
        let mut csv = String::from("index,eigenvalue\n");
        for (i, g) in scree_data(e) {
            writeln!(csv, "{i},{g:?}").expect("writing to a String");
        }
        emit(Some(path), csv.as_bytes())?;
    }

    let text = match (a.k0, &eigs) {
        (Some(k0), Some(e)) => render(&run_test(e, k0, a.kmax, &table, a.level)?, a.format)?,
        (Some(k0), None) => render(
            &run_test_from_ratios(a.ratios.as_deref().unwrap_or_default(), k0, a.kmax, &table, a.level)?,
            a.format,
        )?,
        (None, e) => {
            if convention == KmaxConvention::Include {
                log::warn!(
                    "kmax = {} is included in the set by convention (it is never tested); pass --exclude-kmax to drop it",
                    a.kmax
                );
            }
            let set = match e {
                Some(e) => confidence_set(e, a.kmax, &table, a.level, convention)?,
                None => confidence_set_from_ratios(
                    a.ratios.as_deref().unwrap_or_default(),
                    a.kmax,
                    &table,
                    a.level,
                    convention,
                )?,
            };
            render(&set, a.format)?
        }
    };
    emit(a.out.as_deref(), text.as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

fn render<T: serde::Serialize + std::fmt::Display>(value: &T, format: FormatArg) -> Result<String> {
    match format {
        FormatArg::Text => Ok(value.to_string()),
        FormatArg::Json => to_json(value),
    }
}

fn spectrum_from(ell: Option<Vec<f64>>, p: Option<usize>) -> Result<SpectrumModel> {
    match (ell, p) {
        (Some(ell), _) => SpectrumModel::new(ell),
        (None, Some(p)) => SpectrumModel::identity(p),
        (None, None) => Err(Error::InvalidInput("one of --ell or --p is required".into())),
    }
}

fn rows_csv(header: &str, width: usize, rows: &[Vec<f64>]) -> String {
    let mut s = String::from("rep");
    for i in 1..=width {
        write!(s, ",{header}{i}").expect("writing to a String");
    }
    s.push('\n');
    for (r, row) in rows.iter().enumerate() {
        write!(s, "{r}").expect("writing to a String");
        for v in row {
            write!(s, ",{v:?}").expect("writing to a String");
        }
        s.push('\n');
    }
    s
}

pub fn simulate(cmd: SimulateCommand) -> Result<ExitCode> {
    match cmd {
        SimulateCommand::Gue(a) => {
            let method = a.method.into();
            let rows = (0..a.reps as u64)
                .into_par_iter()
                .map(|r| gue_top_scaled_with(a.n, a.m, SeedSpec::new(a.seed, r), method))
                .collect::<Result<Vec<_>>>()?;
            emit(a.out.as_deref(), rows_csv("d", a.m, &rows).as_bytes())?;
        }
        SimulateCommand::Wishart(a) => {
            let spectrum = spectrum_from(a.ell, a.p)?;
            let rows = (0..a.reps as u64)
                .into_par_iter()
                .map(|r| sample_wishart_eigs(&spectrum, a.n, SeedSpec::new(a.seed, r)).map(|d| d.eigenvalues))
                .collect::<Result<Vec<_>>>()?;
            emit(a.out.as_deref(), rows_csv("lambda", spectrum.p(), &rows).as_bytes())?;
        }
        SimulateCommand::Panel(a) => {
            let spec = FactorPanelSpec::white(a.p, a.n_half, a.k, a.loading_scale, a.factor_variance)?;
            let panel = synth_factor_panel(&spec, SeedSpec::new(a.seed, 0))?;
            let mut buf = Vec::new();
            panel.write_csv(&mut buf, b',')?;
            emit(a.out.as_deref(), &buf)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn centering(a: CenteringArgs) -> Result<ExitCode> {
    let spectrum = spectrum_from(a.ell, a.p)?;
    let params = centering_params(&spectrum, a.n)?;
    let report = check_assumptions(&spectrum, a.n, &params);
    for w in &report.warnings {
        log::warn!("{w}");
    }
    let doc = json!({
        "n": a.n,
        "p": spectrum.p(),
        "params": params,
        "assumptions": report,
    });
    emit(a.out.as_deref(), to_json(&doc)?.as_bytes())?;
    Ok(ExitCode::SUCCESS)
}
