//! CSV export of a chain trace.

use std::io::Write;
use std::path::Path;

use gridplan_core::mcmc::ChainTrace;

use crate::Error;

/// Header row; the last column is named after the rolling window.
pub fn header(window: usize) -> [String; 5] {
    [
        "iteration".into(),
        "kernel".into(),
        "log_posterior".into(),
        "accepted".into(),
        format!("acceptance_rate_window{window}"),
    ]
}

/// Writes one row per iteration. `accepted` is 1 or 0.
pub fn write_trace_to<W: Write>(trace: &ChainTrace, out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(trace.window()))?;
    for r in trace.records() {
        w.write_record([
            r.iteration.to_string(),
            r.kernel.name().to_string(),
            r.log_posterior.to_string(),
            u8::from(r.accepted).to_string(),
            r.acceptance_rate.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn trace_csv(trace: &ChainTrace) -> String {
    let mut buf = Vec::new();
    write_trace_to(trace, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv output is utf-8")
}

pub fn write_trace(trace: &ChainTrace, path: &Path) -> Result<(), Error> {
    std::fs::write(path, trace_csv(trace)).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}
