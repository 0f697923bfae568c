//! CSV tables and atomic file output. Data rows carry floats at 17
//! significant digits; each table ends with one `summary,...` row.

use polecert_core::sim::Trajectory;
use polecert_core::spectrum::SpectrumReport;
use std::io::Write;
use std::path::Path;

/// 17 significant digits: enough for bit-exact f64 round-trips.
pub fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

fn f17_or_nan(x: Option<f64>) -> String {
    x.map(f17).unwrap_or_else(|| "nan".to_string())
}

pub fn spectrum_csv(report: &SpectrumReport, chain_abscissa: Option<f64>) -> String {
    let mut out = String::from("re,im,residual\n");
    for (z, r) in report.roots.iter().zip(&report.residuals) {
        out.push_str(&format!("{},{},{}\n", f17(z.re), f17(z.im), f17(*r)));
    }
    out.push_str(&format!("summary,chain_abscissa,{}\n", f17_or_nan(chain_abscissa)));
    out
}

pub fn trajectory_csv(traj: &Trajectory, decay_rate: Option<f64>) -> String {
    let mut out = String::from("t,y,dy\n");
    for i in 0..traj.times.len() {
        out.push_str(&format!(
            "{},{},{}\n",
            f17(traj.times[i]),
            f17(traj.values[i]),
            f17(traj.derivs[i])
        ));
    }
    out.push_str(&format!("summary,decay_rate,{}\n", f17_or_nan(decay_rate)));
    out
}

/// Write through a sibling temp file and rename, so a failed run leaves no
/// partial output behind.
pub fn atomic_write(path: &Path, contents: &str) -> std::io::Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| std::io::Error::other(format!("{} has no file name", path.display())))?;
    let mut tmp = path.to_path_buf();
    tmp.set_file_name(format!(".{}.tmp-{}", file_name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result
}
