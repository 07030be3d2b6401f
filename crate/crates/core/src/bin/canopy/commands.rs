use std::collections::BTreeMap;
use std::fs::File;
use std::path::Path;

use canopy::antenna::{effective_link_terms, polarization_loss, AngularSampleSet, PolarizationVector};
use canopy::campaign::{
    compare_models, experimental_pl, fit_model, read_geo_log, read_range_log, separate_small_scale, GeoSidecar,
    PLSample, RseBinning,
};
use canopy::channel::{find_model, load_registry, LinkGeometry, PathLossModel, RadioConfig};
use canopy::defaults;
use canopy::fading::{best_fit, fade_depth, nearest_rank_quantile, EmpiricalCdf, FadingFamily};
use canopy::sim::{
    pdr_by_distance, summarize_heights, synthesize_trace_with_workers, write_small_scale_csv, write_trace_csv,
    MissionSpec, RangeDefinition, SubSeeding,
};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::args::{
    Cli, Command, CompareArgs, FadingArgs, FitArgs, Format, Global, LogInput, ModelsCommand, PlfArgs, RangeKind,
    Schema, Seeding, SimulateArgs,
};
use crate::output::{fmt4, print_json, print_table, CliError, ExitKind, OutDir, Provenance};

const DEMO_MISSION_JSON: &str = include_str!("../../../data/demo_mission.json");
const DEFAULT_MODEL: &str = "mediterranean-forest";

pub fn run(cli: Cli) -> Result<(), CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Fit(a) => fit(g, a),
        Command::Compare(a) => compare(g, a),
        Command::Fading(a) => fading(g, a),
        Command::Simulate(a) => simulate(g, a),
        Command::Plf(a) => plf(g, a),
        Command::Models { command: ModelsCommand::List } => models_list(g),
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(e.to_string()).in_file(path))
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str, path: &Path) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::input(e.to_string()).in_file(path))
}

fn load_radio(g: &Global) -> Result<RadioConfig, CliError> {
    let radio = match &g.radio_config {
        Some(p) => parse_json::<RadioConfig>(&read_text(p)?, p)?,
        None => RadioConfig::default(),
    };
    radio.validate()?;
    Ok(radio)
}

fn registry() -> Result<Vec<PathLossModel>, CliError> {
    Ok(load_registry(None)?)
}

/// `--model`: an existing JSON file (a bare model or an object with a
/// `model` field), otherwise a registry name.
fn resolve_model(g: &Global) -> Result<PathLossModel, CliError> {
    let models = registry()?;
    let model = match &g.model {
        Some(spec) if Path::new(spec).is_file() => {
            let path = Path::new(spec);
            let v: Value = parse_json(&read_text(path)?, path)?;
            let inner = match v.get("model") {
                Some(m) => m.clone(),
                None => v,
            };
            serde_json::from_value::<PathLossModel>(inner).map_err(|e| CliError::input(e.to_string()).in_file(path))?
        }
        Some(name) => find_model(&models, name)?.clone(),
        None => match find_model(&models, DEFAULT_MODEL) {
            Ok(m) => m.clone(),
            Err(_) => models.first().cloned().ok_or_else(|| CliError::input("empty model registry"))?,
        },
    };
    model.validate()?;
    Ok(model)
}

fn schema_name(s: Schema) -> &'static str {
    match s {
        Schema::Range => "range",
        Schema::Geo => "geo",
    }
}

/// Geometry and experimental path loss of every record in the logs.
fn ingest(input: &LogInput, radio: &RadioConfig) -> Result<Vec<(LinkGeometry, f64)>, CliError> {
    let mut out = Vec::new();
    for path in &input.logs {
        let file = File::open(path).map_err(|e| CliError::input(e.to_string()).in_file(path))?;
        let (records, sidecar) = match input.schema {
            Schema::Range => (read_range_log(file), None),
            Schema::Geo => {
                let side_path = input.sidecar.clone().unwrap_or_else(|| path.with_extension("json"));
                let sidecar: GeoSidecar = parse_json(&read_text(&side_path)?, &side_path)?;
                (read_geo_log(file, &sidecar), Some(sidecar))
            }
        };
        let records = records.map_err(|e| CliError::from(e).in_file(path))?;
        for rec in &records {
            let geom = rec.geometry(sidecar.as_ref()).map_err(|e| CliError::from(e).in_file(path))?;
            let pl = experimental_pl(rec, radio).map_err(|e| CliError::from(e).in_file(path))?;
            out.push((geom, pl));
        }
    }
    Ok(out)
}

fn input_config(input: &LogInput) -> Value {
    json!({
        "logs": input.logs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "schema": schema_name(input.schema),
        "sidecar": input.sidecar.as_ref().map(|p| p.display().to_string()),
    })
}

fn distinct_heights(samples: &[PLSample]) -> Vec<f64> {
    let mut hs: Vec<f64> = samples.iter().map(|s| s.geom.h).collect();
    hs.sort_by(f64::total_cmp);
    hs.dedup();
    hs
}

fn fit(g: &Global, a: &FitArgs) -> Result<(), CliError> {
    let radio = load_radio(g)?;
    let pairs = ingest(&a.input, &radio)?;
    let wavelength = a.wavelength.unwrap_or(defaults::WAVELENGTH_M);
    let samples: Vec<PLSample> = if a.no_separation {
        pairs.iter().map(|&(geom, pl)| PLSample::without_small_scale(geom, pl)).collect()
    } else {
        separate_small_scale(&pairs, wavelength)?
    };
    let mut result = fit_model(&samples, &a.name)?;
    let binning = RseBinning {
        bin_width_m: a.bin_width.unwrap_or(defaults::RSE_BIN_WIDTH_M),
        heights_m: a.rse_heights.clone().unwrap_or_else(|| distinct_heights(&samples)),
    };
    if !(binning.bin_width_m.is_finite() && binning.bin_width_m > 0.0) {
        return Err(CliError::input(format!("bin width {} must be positive", binning.bin_width_m)));
    }
    result.rebin(&binning);

    let prov = Provenance::new(
        "fit",
        g.seed,
        json!({
            "input": input_config(&a.input),
            "radio": radio,
            "separation": !a.no_separation,
            "wavelength_m": wavelength,
            "rse_binning": binning,
            "name": a.name,
        }),
    );
    let out = OutDir::create(&g.out_dir)?;
    out.write_json("model.json", &prov.wrap(&json!({ "model": result.model })))?;
    let report = prov.wrap(&result.export());
    out.write_json("fit.json", &report)?;
    out.write_csv(
        "residuals.csv",
        &prov,
        &["d3d_m", "h_m", "pl_instantaneous_db", "pl_large_scale_db", "small_scale_db", "residual_db"],
        samples.iter().zip(&result.residuals).map(|(s, r)| {
            vec![
                s.geom.d3d.to_string(),
                s.geom.h.to_string(),
                s.pl_instantaneous.to_string(),
                s.pl_large_scale.to_string(),
                s.small_scale.to_string(),
                r.to_string(),
            ]
        }),
    )?;
    out.write_csv(
        "rse.csv",
        &prov,
        &["h_m", "d_lo_m", "d_hi_m", "count", "pl_m_db", "rse"],
        result.rse_by_bin.rows.iter().map(|r| {
            vec![
                r.h_m.to_string(),
                r.d_lo_m.to_string(),
                r.d_hi_m.to_string(),
                r.count.to_string(),
                r.pl_m_db.to_string(),
                r.rse.to_string(),
            ]
        }),
    )?;
    if g.format == Format::PlotData {
        let d_max = samples.iter().map(|s| s.geom.d3d).fold(1.0, f64::max);
        let mut rows = Vec::new();
        for h in distinct_heights(&samples) {
            for k in 0..=200 {
                let d = 10f64.powf(d_max.log10() * k as f64 / 200.0);
                let pl = result.model.mean_path_loss(LinkGeometry { d3d: d, h })?;
                rows.push(vec![d.to_string(), h.to_string(), pl.to_string()]);
            }
        }
        out.write_csv("fit_curve.csv", &prov, &["d3d_m", "h_m", "pl_m_db"], rows)?;
    }
    let m = &result.model;
    match g.format {
        Format::Json => print_json(&report),
        _ => print_table(
            &["name", "pl_intercept_db", "gamma", "eta_db_per_m", "sigma_sf_db", "samples", "rse_average"],
            &[vec![
                m.name.clone(),
                fmt4(m.pl_intercept),
                fmt4(m.gamma),
                fmt4(m.eta),
                fmt4(m.sigma_sf),
                result.sample_count.to_string(),
                fmt4(result.rse_by_bin.average),
            ]],
        ),
    }
    Ok(())
}

fn compare(g: &Global, a: &CompareArgs) -> Result<(), CliError> {
    let radio = load_radio(g)?;
    let all = registry()?;
    let models: Vec<PathLossModel> = match &a.models {
        Some(names) => names.iter().map(|n| find_model(&all, n).cloned()).collect::<Result<_, _>>()?,
        None => all,
    };
    let samples: Vec<PLSample> = ingest(&a.input, &radio)?
        .into_iter()
        .map(|(geom, pl)| PLSample::without_small_scale(geom, pl))
        .collect();
    let results = compare_models(&samples, &models)?;

    let prov = Provenance::new(
        "compare",
        g.seed,
        json!({
            "input": input_config(&a.input),
            "radio": radio,
            "models": models,
        }),
    );
    let out = OutDir::create(&g.out_dir)?;
    let header = ["model", "samples", "median_abs_diff_db", "mean_diff_db"];
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            vec![
                r.model.clone(),
                r.differences_db.len().to_string(),
                r.median_abs_diff_db.to_string(),
                r.mean_diff_db.to_string(),
            ]
        })
        .collect();
    out.write_csv("comparison.csv", &prov, &header, rows.clone())?;
    let summary: Vec<Value> = results
        .iter()
        .map(|r| {
            json!({
                "model": r.model,
                "samples": r.differences_db.len(),
                "median_abs_diff_db": r.median_abs_diff_db,
                "mean_diff_db": r.mean_diff_db,
            })
        })
        .collect();
    let report = prov.wrap(&json!({ "comparisons": summary }));
    out.write_json("comparison.json", &report)?;
    let mut cdf_rows = Vec::new();
    for r in &results {
        for (x, f) in r.cdf().steps() {
            cdf_rows.push(vec![r.model.clone(), x.to_string(), f.to_string()]);
        }
    }
    out.write_csv("comparison_cdf.csv", &prov, &["model", "diff_db", "cdf"], cdf_rows)?;
    match g.format {
        Format::Json => print_json(&report),
        _ => print_table(&header, &rows),
    }
    Ok(())
}

/// Numeric columns of a CSV by header name, comment lines skipped.
fn read_columns(path: &Path) -> Result<BTreeMap<String, Vec<Option<f64>>>, CliError> {
    let file = File::open(path).map_err(|e| CliError::input(e.to_string()).in_file(path))?;
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(file);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| CliError::input(e.to_string()).in_file(path))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut cols: BTreeMap<String, Vec<Option<f64>>> = headers.iter().map(|h| (h.clone(), Vec::new())).collect();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::input(e.to_string()).in_file(path))?;
        let line = rec.position().map_or(0, |p| p.line());
        for (h, field) in headers.iter().zip(rec.iter()) {
            let v = if field.is_empty() {
                None
            } else {
                match field.parse::<f64>() {
                    Ok(v) => Some(v),
                    // Non-numeric columns are kept as missing values.
                    Err(_) if !matches!(h.as_str(), "envelope" | "small_scale_db") => None,
                    Err(_) => {
                        return Err(CliError::input(format!("line {line}: `{h}`: cannot parse `{field}` as a number"))
                            .in_file(path))
                    }
                }
            };
            cols.get_mut(h).expect("header column").push(v);
        }
    }
    Ok(cols)
}

fn complete(col: &[Option<f64>]) -> Option<Vec<f64>> {
    col.iter().copied().collect()
}

fn fading(g: &Global, a: &FadingArgs) -> Result<(), CliError> {
    let cols = read_columns(&a.input)?;
    let envelope_col = cols.get("envelope").and_then(|c| complete(c)).filter(|c| !c.is_empty());
    let db_col = cols.get("small_scale_db").and_then(|c| complete(c));
    // Fades in dB (positive = attenuation) and the linear envelope.
    let (column, envelope, fades): (String, Vec<f64>, Vec<f64>) = match a.column.as_deref() {
        Some(name) => {
            let col = cols
                .get(name)
                .ok_or_else(|| CliError::input(format!("no column `{name}`")).in_file(&a.input))?;
            let v = complete(col)
                .ok_or_else(|| CliError::input(format!("column `{name}` has missing values")).in_file(&a.input))?;
            if name == "envelope" {
                let fades = envelope_fades(&v);
                (name.into(), v, fades)
            } else {
                (name.into(), v.iter().map(|d| 10f64.powf(-d / 20.0)).collect(), v)
            }
        }
        None => match (envelope_col, db_col) {
            (Some(env), Some(db)) => ("envelope".into(), env, db),
            (Some(env), None) => {
                let fades = envelope_fades(&env);
                ("envelope".into(), env, fades)
            }
            (None, Some(db)) => ("small_scale_db".into(), db.iter().map(|d| 10f64.powf(-d / 20.0)).collect(), db),
            (None, None) => {
                return Err(CliError::input("needs an `envelope` or `small_scale_db` column").in_file(&a.input))
            }
        },
    };
    if envelope.is_empty() {
        return Err(CliError { kind: ExitKind::DegenerateStats, message: "no samples".into() }.in_file(&a.input));
    }
    let best = best_fit(&envelope)?;
    let depth = fade_depth(&fades)?;
    if !depth.reliable {
        eprintln!(
            "warning: {} samples is below {}; the 99% fade level is unreliable",
            depth.sample_count,
            defaults::FADE_DEPTH_MIN_SAMPLES
        );
    }
    let prov = Provenance::new(
        "fading",
        g.seed,
        json!({ "input": a.input.display().to_string(), "column": column }),
    );
    let out = OutDir::create(&g.out_dir)?;
    let report = prov.wrap(&json!({
        "best": best.best,
        "fits": best.fits,
        "excluded": best.excluded,
        "worse_than_rayleigh": best.worse_than_rayleigh,
        "fade_depth": depth,
    }));
    out.write_json("fading.json", &report)?;
    out.write_json("fading_fit.json", &prov.wrap(&best.best))?;
    out.write_json("fade_depth.json", &prov.wrap(&depth))?;
    let cdf = EmpiricalCdf::new(&fades)?;
    out.write_csv(
        "fade_cdf.csv",
        &prov,
        &["fade_db", "cdf"],
        cdf.steps().into_iter().map(|(x, f)| vec![x.to_string(), f.to_string()]),
    )?;
    if g.format == Format::PlotData {
        let mut sorted = envelope.clone();
        sorted.sort_by(f64::total_cmp);
        let hi = nearest_rank_quantile(&sorted, 0.999) * 1.5;
        let mut rows = Vec::new();
        for k in 1..=400 {
            let x = hi * k as f64 / 400.0;
            let mut row = vec![x.to_string()];
            row.extend(best.fits.iter().map(|f| f.family.pdf(x).to_string()));
            rows.push(row);
        }
        let mut header = vec!["envelope"];
        header.extend(best.fits.iter().map(|f| f.family.kind().name()));
        out.write_csv("envelope_pdf.csv", &prov, &header, rows)?;
    }
    match g.format {
        Format::Json => print_json(&report),
        _ => {
            let rows: Vec<Vec<String>> = best
                .fits
                .iter()
                .map(|f| {
                    let params = f.family.params().iter().map(|p| fmt4(*p)).collect::<Vec<_>>().join(" ");
                    let chosen = if f.family.kind() == best.best.family.kind() { "*" } else { "" };
                    vec![f.family.kind().name().to_string(), params, fmt4(f.log_likelihood), chosen.into()]
                })
                .collect();
            print_table(&["family", "params", "log_likelihood", "best"], &rows);
            println!(
                "fade_50_db,fade_99_db,fade_depth_db,max_fade_db\n{},{},{},{}",
                fmt4(depth.level_50_db),
                fmt4(depth.level_99_db),
                fmt4(depth.fade_depth_db),
                fmt4(depth.max_fade_db)
            );
        }
    }
    Ok(())
}

/// Fades of raw envelope draws relative to their sample median, dB.
fn envelope_fades(env: &[f64]) -> Vec<f64> {
    let mut sorted = env.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.is_empty() {
        return Vec::new();
    }
    let median = nearest_rank_quantile(&sorted, 0.5);
    env.iter().map(|e| -20.0 * (e / median).log10()).collect()
}

/// A fading family from a `fading`/`fading_fit` report or a bare
/// `{"family", "params"}` object.
fn load_fading(path: &Path) -> Result<FadingFamily, CliError> {
    let v: Value = parse_json(&read_text(path)?, path)?;
    let inner = match v.get("best") {
        Some(b) => b.clone(),
        None => v,
    };
    let family = json!({ "family": inner.get("family"), "params": inner.get("params") });
    let fam: FadingFamily = serde_json::from_value(family).map_err(|e| CliError::input(e.to_string()).in_file(path))?;
    fam.validate()?;
    Ok(fam)
}

fn simulate(g: &Global, a: &SimulateArgs) -> Result<(), CliError> {
    let radio = load_radio(g)?;
    let mut model = resolve_model(g)?;
    if let Some(s) = a.sigma_sf {
        model.sigma_sf = s;
        model.validate()?;
    }
    let (mission, mission_src): (MissionSpec, String) = match &a.mission {
        Some(p) => (parse_json(&read_text(p)?, p)?, p.display().to_string()),
        None => (
            serde_json::from_str(DEMO_MISSION_JSON).expect("bundled mission is valid"),
            "bundled demo mission".into(),
        ),
    };
    mission.validate()?;
    let fading = match (&a.fading, &a.nakagami) {
        (Some(p), _) => Some(load_fading(p)?),
        (None, Some(v)) => {
            if v.len() != 2 {
                return Err(CliError::input(format!("--nakagami expects `mu,omega`, got {} values", v.len())));
            }
            let fam = FadingFamily::Nakagami { mu: v[0], omega: v[1] };
            fam.validate()?;
            Some(fam)
        }
        (None, None) => None,
    };
    let mode = match a.sub_seeding {
        Seeding::PerHeight => SubSeeding::PerHeight,
        Seeding::Shared => SubSeeding::Shared,
    };
    let definition = match a.range {
        RangeKind::LinkBudget => RangeDefinition::LinkBudget,
        RangeKind::MeanThreshold => RangeDefinition::MeanThreshold,
    };
    let workers = a
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let trace = synthesize_trace_with_workers(&mission, &model, &radio, fading.as_ref(), g.seed, mode, workers)?;
    let summary = summarize_heights(&trace, &mission, &model, &radio, &definition)?;
    let profile = pdr_by_distance(&trace, a.bin_width)?;

    // Worker count is left out: it does not change any output.
    let prov = Provenance::new(
        "simulate",
        g.seed,
        json!({
            "mission_source": mission_src,
            "mission": mission,
            "model": model,
            "radio": radio,
            "fading": fading,
            "sub_seeding": mode,
            "range_definition": definition,
            "pdr_bin_width_m": a.bin_width,
        }),
    );
    let out = OutDir::create(&g.out_dir)?;
    let mut buf = Vec::new();
    write_trace_csv(&trace, &mut buf, &prov.csv_comments())?;
    out.write_bytes("trace.csv", &buf)?;
    let mut buf = Vec::new();
    write_small_scale_csv(&trace, &mut buf, &prov.csv_comments())?;
    out.write_bytes("small_scale.csv", &buf)?;
    let header = [
        "h_m",
        "radio_range_m",
        "messages",
        "delivered",
        "pdr",
        "pdr_within_range",
        "max_delivered_d3d_m",
    ];
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let rows: Vec<Vec<String>> = summary
        .iter()
        .map(|s| {
            vec![
                s.h_m.to_string(),
                s.radio_range_m.to_string(),
                s.messages.to_string(),
                s.delivered.to_string(),
                s.pdr.to_string(),
                opt(s.pdr_within_range),
                opt(s.max_delivered_d3d_m),
            ]
        })
        .collect();
    out.write_csv("summary.csv", &prov, &header, rows.clone())?;
    let report = prov.wrap(&json!({ "heights": summary, "pdr_by_distance": profile }));
    out.write_json("summary.json", &report)?;
    out.write_csv(
        "pdr_profile.csv",
        &prov,
        &["d_lo_m", "d_hi_m", "sent", "delivered", "pdr"],
        profile.iter().map(|b| {
            vec![
                b.d_lo_m.to_string(),
                b.d_hi_m.to_string(),
                b.sent.to_string(),
                b.delivered.to_string(),
                b.pdr.to_string(),
            ]
        }),
    )?;
    match g.format {
        Format::Json => print_json(&report),
        _ => print_table(&header, &rows),
    }
    Ok(())
}

/// `x,y,z` or `xr,xi,yr,yi,zr,zi`.
fn parse_polarization(text: &str) -> Result<PolarizationVector, CliError> {
    let bad = |why: String| CliError::input(format!("polarization `{text}`: {why}"));
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad(format!("cannot parse `{}`", s.trim()))))
        .collect::<Result<_, _>>()?;
    let c = match v.len() {
        3 => [Complex64::new(v[0], 0.0), Complex64::new(v[1], 0.0), Complex64::new(v[2], 0.0)],
        6 => [Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3]), Complex64::new(v[4], v[5])],
        n => return Err(bad(format!("expected 3 or 6 numbers, got {n}"))),
    };
    PolarizationVector::new(c).map_err(|e| bad(e.to_string()))
}

fn plf(g: &Global, a: &PlfArgs) -> Result<(), CliError> {
    let tx = match &a.tx {
        Some(t) => parse_polarization(t)?,
        None => PolarizationVector::uav_dipole(),
    };
    let level = a.level.unwrap_or(defaults::CCDF_LEVEL);
    let out = OutDir::create(&g.out_dir)?;
    let components = |p: &PolarizationVector| -> Vec<[f64; 2]> { p.components().iter().map(|c| [c.re, c.im]).collect() };
    let (name, report) = match (&a.rx, &a.angular) {
        (Some(rx), _) => {
            let rx = parse_polarization(rx)?;
            let plf = polarization_loss(&tx, &rx);
            let prov = Provenance::new(
                "plf",
                g.seed,
                json!({ "tx": components(&tx), "rx": components(&rx) }),
            );
            ("plf.json", prov.wrap(&json!({ "plf": plf, "plf_db": 10.0 * plf.log10() })))
        }
        (None, Some(path)) => {
            let file = File::open(path).map_err(|e| CliError::input(e.to_string()).in_file(path))?;
            let set = AngularSampleSet::from_csv(file).map_err(|e| CliError::from(e).in_file(path))?;
            let terms = effective_link_terms(&set, &tx, level)?;
            let prov = Provenance::new(
                "plf",
                g.seed,
                json!({ "tx": components(&tx), "angular": path.display().to_string(), "level": level }),
            );
            ("terms.json", prov.wrap(&terms))
        }
        (None, None) => return Err(CliError::input("plf needs --rx or --angular")),
    };
    out.write_json(name, &report)?;
    match g.format {
        Format::Json => print_json(&report),
        _ => {
            let obj = report.as_object().expect("object report");
            let keys: Vec<&str> = ["plf", "plf_db", "g_rx_dbi", "chi_db"]
                .into_iter()
                .filter(|k| obj.contains_key(*k))
                .collect();
            let row: Vec<String> = keys.iter().map(|k| obj[*k].to_string()).collect();
            print_table(&keys, &[row]);
        }
    }
    Ok(())
}

fn models_list(g: &Global) -> Result<(), CliError> {
    let models = registry()?;
    match g.format {
        Format::Json => print_json(&serde_json::to_value(&models).expect("serializable models")),
        _ => {
            let rows: Vec<Vec<String>> = models
                .iter()
                .map(|m| {
                    vec![
                        m.name.clone(),
                        m.pl_intercept.to_string(),
                        m.gamma.to_string(),
                        m.eta.to_string(),
                        m.sigma_sf.to_string(),
                    ]
                })
                .collect();
            print_table(&["name", "pl_intercept_db", "gamma", "eta_db_per_m", "sigma_sf_db"], &rows);
        }
    }
    Ok(())
}

