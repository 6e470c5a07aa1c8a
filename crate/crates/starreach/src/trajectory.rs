//! CSV export of simulated closed-loop trajectories.

use std::io::Write;

use starreach_core::nncs::Trajectory;

use crate::error::Result;

/// One row per step: `k, t, x0.., u0..`. The final state has no control, so
/// its control cells are empty.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, out: W) -> Result<()> {
    let nx = traj.states.first().map_or(0, Vec::len);
    let nu = traj.controls.first().map_or(0, Vec::len);
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["k".to_string(), "t".to_string()];
    header.extend((0..nx).map(|i| format!("x{i}")));
    header.extend((0..nu).map(|i| format!("u{i}")));
    w.write_record(&header)?;
    for (k, x) in traj.states.iter().enumerate() {
        let mut rec = vec![k.to_string(), format!("{:?}", traj.times[k])];
        rec.extend(x.iter().map(|v| format!("{v:?}")));
        match traj.controls.get(k) {
            Some(u) => rec.extend(u.iter().map(|v| format!("{v:?}"))),
            None => rec.extend(std::iter::repeat_n(String::new(), nu)),
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
