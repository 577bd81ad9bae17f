//! CSV and SVG exports of a rollout log.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::gait::{clock_signal, contact_probability};
use crate::plot::{line_plot, Series};
use crate::reward::{
    apply_intervention_mask, compute_rewards, RewardBreakdown, RewardContext, RewardTerm,
};
use crate::rollout::log::RolloutLog;
use crate::swing::{target_height, SwingProfile};

pub const CURVE_COLUMNS: [&str; 13] = [
    "t", "phi1", "phi2", "phibar1", "phibar2", "clockL", "clockR", "C1", "C2", "target1",
    "target2", "foot1", "foot2",
];

/// Per-step breakdowns with the intervention mask applied.
pub fn reward_breakdowns(log: &RolloutLog, ctx: &RewardContext) -> Result<Vec<RewardBreakdown>> {
    log.records
        .iter()
        .map(|r| {
            let b = compute_rewards(&r.step, &r.command, ctx)?;
            Ok(apply_intervention_mask(b, r.step.intervention))
        })
        .collect()
}

/// Curve columns (see [`CURVE_COLUMNS`]), one row per step.
pub fn curve_rows(log: &RolloutLog, ctx: &RewardContext) -> Result<Vec<[f64; 13]>> {
    log.records
        .iter()
        .map(|r| {
            let s = &r.step;
            let profile = SwingProfile {
                duty_cycle: r.command.behavior.duty_cycle,
                ..SwingProfile::flat(r.command.behavior.swing_height)
            };
            Ok([
                s.t,
                s.phase[0],
                s.phase[1],
                s.phase_bar[0],
                s.phase_bar[1],
                clock_signal(s.phase_bar[0]),
                clock_signal(s.phase_bar[1]),
                contact_probability(s.phase_bar[0], &ctx.contact)?,
                contact_probability(s.phase_bar[1], &ctx.contact)?,
                target_height(s.phase_bar[0], &profile)?,
                target_height(s.phase_bar[1], &profile)?,
                s.feet[0].swing_height,
                s.feet[1].swing_height,
            ])
        })
        .collect()
}

fn write_csv<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = f64>,
{
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.into_iter().map(|v| v.to_string()))
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("csv: {other:?}")),
    }
}

/// Writes `curves.csv` and `rewards.csv` into `dir`, plus one SVG per
/// curve group when `svg` is set. Returns the written paths.
pub fn export_curves(log: &RolloutLog, dir: &Path, svg: bool) -> Result<Vec<PathBuf>> {
    if log.is_empty() {
        return Err(Error::Empty("rollout log"));
    }
    let ctx = RewardContext::new(&crate::layout::JointLayout::h1());
    let curves = curve_rows(log, &ctx)?;
    let rewards = reward_breakdowns(log, &ctx)?;
    fs::create_dir_all(dir)?;

    let mut written = Vec::new();
    let path = dir.join("curves.csv");
    write_csv(
        &path,
        &CURVE_COLUMNS,
        curves.iter().map(|r| r.iter().copied()),
    )?;
    written.push(path);

    let mut header = vec!["t"];
    header.extend(RewardTerm::ALL.iter().map(|t| t.name()));
    header.push("total");
    let path = dir.join("rewards.csv");
    write_csv(
        &path,
        &header,
        log.records.iter().zip(&rewards).map(|(r, b)| {
            std::iter::once(r.step.t)
                .chain(b.terms.iter().map(|t| t.contribution()))
                .chain(std::iter::once(b.total()))
        }),
    )?;
    written.push(path);

    if svg {
        let t: Vec<f64> = curves.iter().map(|r| r[0]).collect();
        let col = |i: usize| -> Vec<f64> { curves.iter().map(|r| r[i]).collect() };
        let groups: [(&str, &str, &[usize]); 4] = [
            ("phases", "Homogenized phases", &[3, 4]),
            ("clocks", "Clock signals", &[5, 6]),
            ("contact", "Expected contact probability", &[7, 8]),
            ("swing", "Swing height target vs foot", &[9, 10, 11, 12]),
        ];
        for (name, title, cols) in groups {
            let data: Vec<Vec<f64>> = cols.iter().map(|&c| col(c)).collect();
            let series: Vec<Series> = cols
                .iter()
                .zip(&data)
                .map(|(&c, d)| Series {
                    label: CURVE_COLUMNS[c],
                    values: d,
                })
                .collect();
            let path = dir.join(format!("{name}.svg"));
            fs::write(&path, line_plot(title, "t (s)", &t, &series))?;
            written.push(path);
        }
        let groups: Vec<(String, Vec<f64>)> = [
            crate::reward::RewardGroup::Task,
            crate::reward::RewardGroup::Behavior,
            crate::reward::RewardGroup::Regularization,
        ]
        .iter()
        .map(|g| {
            (
                format!("{g:?}").to_lowercase(),
                rewards.iter().map(|b| b.group_total(*g)).collect(),
            )
        })
        .collect();
        let series: Vec<Series> = groups
            .iter()
            .map(|(l, v)| Series {
                label: l,
                values: v,
            })
            .collect();
        let path = dir.join("rewards.svg");
        fs::write(&path, line_plot("Reward by group", "t (s)", &t, &series))?;
        written.push(path);
    }
    Ok(written)
}
