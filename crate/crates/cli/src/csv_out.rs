use std::path::Path;

use anyhow::Context;
use twistkit::flows::Trajectory;

/// One row per sample: `t` followed by the chart coordinates.
pub fn write_trajectory(path: &Path, traj: &Trajectory) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create `{}`", path.display()))?;
    let mut header = vec!["t".to_string()];
    header.extend(traj.names().iter().cloned());
    w.write_record(&header)?;
    for (t, state) in traj.times.iter().zip(&traj.states) {
        let mut row = vec![t.to_string()];
        row.extend(state.iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
