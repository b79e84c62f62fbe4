//! CSV, JSON and gnuplot emitters. Floats are written with 17 significant
//! digits so identical runs produce byte-identical files.

use std::fs;
use std::path::Path;

use entbase::imaging::ImagingReport;
use serde::Serialize;

use crate::error::CliError;

pub const VISIBILITY_CSV: &str = "visibility.csv";
pub const INTENSITY_CSV: &str = "intensity.csv";
pub const SUMMARY_JSON: &str = "summary.json";
pub const SWEEP_CSV: &str = "sweep.csv";
pub const GNUPLOT_SCRIPT: &str = "plot.gp";

/// `{:.16e}`, with `nan`, `inf` and `-inf` spelled out.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>, CliError> {
    let file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

pub fn write_visibility_csv(path: &Path, report: &ImagingReport) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record([
        "B", "V_re", "V_im", "V_a", "V_p", "V_a_hat", "V_p_hat", "dV_a", "dV_p", "N", "xi", "C",
        "R_M_norm", "low_confidence",
    ])?;
    for r in &report.baselines {
        let e = &r.estimate;
        w.write_record([
            fmt_f64(r.b),
            fmt_f64(r.v_true.re),
            fmt_f64(r.v_true.im),
            fmt_f64(r.v_true.norm()),
            fmt_f64(r.v_true.arg()),
            fmt_f64(e.v_a_hat),
            fmt_f64(e.v_p_hat),
            fmt_f64(e.dv_a),
            fmt_f64(e.dv_p),
            e.n_used.to_string(),
            fmt_f64(r.xi),
            fmt_f64(r.c),
            fmt_f64(r.r_m_norm),
            u8::from(e.low_confidence).to_string(),
        ])?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_intensity_csv(path: &Path, report: &ImagingReport) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(["theta", "I_exact", "I_estimated", "I_sky"])?;
    for r in &report.intensity {
        w.write_record([fmt_f64(r.theta), fmt_f64(r.exact), fmt_f64(r.estimated), fmt_f64(r.sky)])?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// One row of `sweep.csv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub xi: f64,
    pub c: f64,
    pub r_m_norm: f64,
    pub ln_rate: f64,
    pub log10_rate: f64,
    pub rmse: Option<(f64, f64)>,
}

pub fn write_sweep_csv(path: &Path, param: &str, rows: &[SweepRow]) -> Result<(), CliError> {
    let mut w = writer(path)?;
    let monte_carlo = rows.iter().any(|r| r.rmse.is_some());
    let mut header = vec![param, "xi", "C", "R_M_norm", "ln_R_M", "log10_R_M"];
    if monte_carlo {
        header.extend(["rmse_Va", "rmse_Vp"]);
    }
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            fmt_f64(r.value),
            fmt_f64(r.xi),
            fmt_f64(r.c),
            fmt_f64(r.r_m_norm),
            fmt_f64(r.ln_rate),
            fmt_f64(r.log10_rate),
        ];
        if monte_carlo {
            let (a, p) = r.rmse.unwrap_or((f64::NAN, f64::NAN));
            rec.extend([fmt_f64(a), fmt_f64(p)]);
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn run_gnuplot_script() -> String {
    format!(
        r#"# gnuplot -p {GNUPLOT_SCRIPT}
set datafile separator ","
set key autotitle columnhead
set multiplot layout 2,1

set title "Visibility amplitude"
set xlabel "B"
set ylabel "|V|"
plot "{VISIBILITY_CSV}" using 1:4 with lines title "true", \
     "" using 1:6:8 with yerrorbars title "estimated"

set title "Reconstructed intensity"
set xlabel "theta (rad)"
set ylabel "I (unit sum)"
plot "{INTENSITY_CSV}" using 1:2 with lines title "exact samples", \
     "" using 1:3 with lines title "estimated samples", \
     "" using 1:4 with impulses title "sky"

unset multiplot
"#
    )
}

pub fn sweep_gnuplot_script(param: &str, monte_carlo: bool) -> String {
    let mut s = format!(
        r#"# gnuplot -p {GNUPLOT_SCRIPT}
set datafile separator ","
set key autotitle columnhead
set xlabel "{param}"
set ylabel "R_M / (R_E R_T)"
set logscale y
plot "{SWEEP_CSV}" using 1:4 with linespoints title "normalized rate"
"#
    );
    if monte_carlo {
        s.push_str(&format!(
            r#"
pause -1
unset logscale y
set ylabel "RMSE"
plot "{SWEEP_CSV}" using 1:7 with linespoints title "V_a", \
     "" using 1:8 with linespoints title "V_p"
"#
        ));
    }
    s
}
