use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use crate::geometry::{Pose2, PosedPolygon};
use crate::physics::{write_trace, SystemState, World};

use super::experiment::{BatchSummary, TrialRecord};

/// Output directory: `$REARRANGE_OUT_DIR` when set, else `fallback`.
pub fn out_dir(fallback: &Path) -> PathBuf {
    std::env::var_os("REARRANGE_OUT_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| fallback.to_path_buf())
}

#[derive(serde::Serialize)]
struct Row<'a> {
    trial: usize,
    planner: &'a str,
    seed: u64,
    success: bool,
    planning_time_s: f64,
    nodes_added: usize,
    nodes_per_s: f64,
    replans: usize,
    segments_executed: usize,
}

pub fn write_trials_csv<W: io::Write>(out: W, records: &[TrialRecord]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(Row {
            trial: r.trial,
            planner: &r.planner,
            seed: r.seed,
            success: r.success,
            planning_time_s: r.planning_time_s,
            nodes_added: r.nodes_added,
            nodes_per_s: r.nodes_per_s,
            replans: r.replans,
            segments_executed: r.segments_executed,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// One row per condition in a sweep.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SummaryRow {
    pub scenario: String,
    pub planner: String,
    pub perturb_interval: Option<f64>,
    pub reduce_rate: Option<f64>,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub time_mean: Option<f64>,
    pub time_std: Option<f64>,
    pub nodes_per_s: f64,
}

impl SummaryRow {
    pub fn new(
        scenario: &str,
        planner: &str,
        perturb_interval: Option<f64>,
        reduce_rate: Option<f64>,
        s: &BatchSummary,
    ) -> Self {
        Self {
            scenario: scenario.into(),
            planner: planner.into(),
            perturb_interval,
            reduce_rate,
            trials: s.trials,
            successes: s.successes,
            success_rate: s.success_rate,
            time_mean: s.time_mean,
            time_std: s.time_std,
            nodes_per_s: s.nodes_per_s,
        }
    }
}

pub fn write_summary_csv<W: io::Write>(out: W, rows: &[SummaryRow]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes each recorded trace as `trial_<k>.trace` under `dir`.
pub fn write_traces(dir: &Path, records: &[TrialRecord]) -> io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for r in records {
        if let Some(t) = &r.trace {
            let p = dir.join(format!("{}_trial_{}.trace", r.planner, r.trial));
            std::fs::write(&p, write_trace(&t.events))?;
            paths.push(p);
        }
    }
    Ok(paths)
}

fn poly_points(p: &PosedPolygon) -> String {
    let mut s = String::new();
    for (i, v) in p.vertices.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{:.5},{:.5}", v.x, -v.y);
    }
    s
}

const PALETTE: [&str; 6] = ["#4e79a7", "#f28e2b", "#59a14f", "#b07aa1", "#76b7b2", "#edc948"];

/// Renders a scene as SVG: workspace, obstacles, objects (coloured by
/// class, target outlined), arm, gripper and an optional gripper path.
/// `y` is flipped so that up is up.
pub fn render_svg(
    world: &World,
    state: &SystemState,
    classes: &[u32],
    target: Option<usize>,
    path: &[Pose2],
) -> String {
    let ws = &world.workspace;
    let links = world.arm.link_polygons(&state.joints);
    // Fit the workspace and the whole arm.
    let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) = (ws.x_min, ws.y_min, ws.x_max, ws.y_max);
    for v in links.iter().flat_map(|l| &l.vertices) {
        lo_x = lo_x.min(v.x);
        lo_y = lo_y.min(v.y);
        hi_x = hi_x.max(v.x);
        hi_y = hi_y.max(v.y);
    }
    let margin = 0.05;
    let (x0, y0) = (lo_x - margin, -(hi_y + margin));
    let (w, h) = (hi_x - lo_x + 2.0 * margin, hi_y - lo_y + 2.0 * margin);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x0:.4} {y0:.4} {w:.4} {h:.4}" width="600" height="{:.0}">"#,
        600.0 * h / w
    );
    let _ = writeln!(
        s,
        r##"<rect x="{:.4}" y="{:.4}" width="{:.4}" height="{:.4}" fill="none" stroke="#999" stroke-width="0.002"/>"##,
        ws.x_min,
        -ws.y_max,
        ws.width(),
        ws.height()
    );
    for o in &world.obstacles {
        let _ = writeln!(s, r##"<polygon points="{}" fill="#555"/>"##, poly_points(o));
    }
    for i in 0..state.objects.len() {
        let p = world.object_polygon(state, i);
        let c = PALETTE[classes.get(i).copied().unwrap_or(0) as usize % PALETTE.len()];
        let stroke = if Some(i) == target { "#d62728" } else { "#222" };
        let sw = if Some(i) == target { 0.004 } else { 0.001 };
        let _ = writeln!(
            s,
            r#"<polygon points="{}" fill="{c}" fill-opacity="0.8" stroke="{stroke}" stroke-width="{sw}"/>"#,
            poly_points(&p)
        );
    }
    for l in &links {
        let _ = writeln!(
            s,
            r##"<polygon points="{}" fill="#ccc" stroke="#777" stroke-width="0.001"/>"##,
            poly_points(l)
        );
    }
    for g in world.gripper_polygons(&state.gripper) {
        let _ = writeln!(s, r##"<polygon points="{}" fill="#333"/>"##, poly_points(&g));
    }
    if path.len() > 1 {
        let mut d = String::new();
        for (i, p) in path.iter().enumerate() {
            let _ = write!(d, "{}{:.5},{:.5} ", if i == 0 { "M" } else { "L" }, p.x, -p.y);
        }
        let _ = writeln!(
            s,
            r##"<path d="{}" fill="none" stroke="#d62728" stroke-width="0.002"/>"##,
            d.trim_end()
        );
    }
    s.push_str("</svg>\n");
    s
}
