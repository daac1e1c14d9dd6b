//! Static SVG figures. Every figure `<stem>.svg` is written together with
//! `<stem>.csv`, the exact data it draws.

use std::path::{Path, PathBuf};

use armpa_core::env::{CellClass, Environment, TraversabilityGrid};
use armpa_core::synchron::{LegRecord, MissionReport};
use armpa_core::Vec3;
use plotters::coord::Shift;
use plotters::prelude::*;
use serde::Serialize;

use crate::error::{io_err, Error, Result};
use crate::stats::{LinearFit, Quantiles};

const SIZE: (u32, u32) = (900, 600);
const PALETTE: [RGBColor; 4] = [RGBColor(31, 119, 180), RGBColor(214, 39, 40), RGBColor(44, 160, 44), RGBColor(148, 103, 189)];

fn pe<E: std::fmt::Debug>(e: E) -> Error {
    Error::Plot(format!("{e:?}"))
}

fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

fn targets(out: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(out).map_err(io_err(out))?;
    Ok((out.join(format!("{stem}.svg")), out.join(format!("{stem}.csv"))))
}

/// Range padded by 5% on each side; a point range becomes a unit interval.
fn padded(lo: f64, hi: f64) -> std::ops::Range<f64> {
    if !(hi > lo) {
        return lo - 0.5..lo + 0.5;
    }
    let pad = (hi - lo) * 0.05;
    lo - pad..hi + pad
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)))
}

#[derive(Serialize)]
struct TraceRow<'a> {
    series: &'a str,
    iteration: usize,
    best_cost: f64,
}

/// Best cost against iteration, one line per series.
pub fn trace_plot(series: &[(String, Vec<(usize, f64)>)], out: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    if series.iter().all(|s| s.1.is_empty()) {
        return Err(Error::Plot("no trace rows".into()));
    }
    let (svg, csv) = targets(out, stem)?;
    let file = svg.clone();
    let rows: Vec<TraceRow> = series
        .iter()
        .flat_map(|(name, pts)| pts.iter().map(move |&(iteration, best_cost)| TraceRow { series: name, iteration, best_cost }))
        .collect();
    write_csv(&csv, &rows)?;
    let x_max = rows.iter().map(|r| r.iteration).max().unwrap_or(1).max(1) as f64;
    let (lo, hi) = bounds(rows.iter().map(|r| r.best_cost));
    let root = SVGBackend::new(&file, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(pe)?;
    let mut chart = ChartBuilder::on(&root)
        .caption("Best cost per iteration", ("sans-serif", 22))
        .margin(15)
        .x_label_area_size(40)
        .y_label_area_size(70)
        .build_cartesian_2d(0.0..x_max, padded(lo, hi))
        .map_err(pe)?;
    chart.configure_mesh().x_desc("iteration").y_desc("best cost").draw().map_err(pe)?;
    for (k, (name, pts)) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        chart
            .draw_series(LineSeries::new(pts.iter().map(|&(i, c)| (i as f64, c)), color.stroke_width(2)))
            .map_err(pe)?
            .label(name.as_str())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color));
    }
    chart.configure_series_labels().background_style(WHITE.mix(0.8)).border_style(BLACK).draw().map_err(pe)?;
    root.present().map_err(pe)?;
    Ok(vec![svg, csv])
}

#[derive(Serialize)]
struct BoxRow<'a> {
    metric: &'a str,
    count: usize,
    min: f64,
    q25: f64,
    median: f64,
    q75: f64,
    max: f64,
    mean: f64,
}

fn draw_box(area: &DrawingArea<SVGBackend, Shift>, name: &str, q: &Quantiles) -> Result<()> {
    let mut chart = ChartBuilder::on(area)
        .caption(name, ("sans-serif", 16))
        .margin(10)
        .y_label_area_size(60)
        .build_cartesian_2d(0.0..1.0, padded(q.min, q.max))
        .map_err(pe)?;
    chart.configure_mesh().disable_x_mesh().disable_x_axis().draw().map_err(pe)?;
    let c = PALETTE[0];
    chart.draw_series(std::iter::once(Rectangle::new([(0.3, q.q25), (0.7, q.q75)], c.mix(0.3).filled()))).map_err(pe)?;
    chart.draw_series(std::iter::once(Rectangle::new([(0.3, q.q25), (0.7, q.q75)], c.stroke_width(1)))).map_err(pe)?;
    let lines = [
        vec![(0.3, q.median), (0.7, q.median)],
        vec![(0.5, q.q75), (0.5, q.max)],
        vec![(0.5, q.q25), (0.5, q.min)],
        vec![(0.4, q.max), (0.6, q.max)],
        vec![(0.4, q.min), (0.6, q.min)],
    ];
    chart.draw_series(lines.into_iter().map(|l| PathElement::new(l, BLACK.stroke_width(2)))).map_err(pe)?;
    chart.draw_series(std::iter::once(Cross::new((0.5, q.mean), 5, RED))).map_err(pe)?;
    Ok(())
}

/// One box per metric, each on its own scale: whiskers at min and max, box
/// at the quartiles, a bar at the median and a cross at the mean.
pub fn box_plot(panels: &[(String, Quantiles)], out: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    let panels: Vec<&(String, Quantiles)> = panels.iter().filter(|(_, q)| q.count > 0).collect();
    if panels.is_empty() {
        return Err(Error::Plot("no finite values to summarize".into()));
    }
    let (svg, csv) = targets(out, stem)?;
    let file = svg.clone();
    let rows: Vec<BoxRow> = panels
        .iter()
        .map(|(m, q)| BoxRow { metric: m, count: q.count, min: q.min, q25: q.q25, median: q.median, q75: q.q75, max: q.max, mean: q.mean })
        .collect();
    write_csv(&csv, &rows)?;
    let root = SVGBackend::new(&file, (260 * panels.len() as u32, 480)).into_drawing_area();
    root.fill(&WHITE).map_err(pe)?;
    for (area, (name, q)) in root.split_evenly((1, panels.len())).iter().zip(&panels) {
        draw_box(area, name, q)?;
    }
    root.present().map_err(pe)?;
    Ok(vec![svg, csv])
}

#[derive(Serialize)]
struct OverlayRow<'a> {
    layer: &'a str,
    label: &'a str,
    x: f64,
    y: f64,
    z: f64,
    radius: f64,
    strength: f64,
}

fn circle(cx: f64, cy: f64, r: f64) -> Vec<(f64, f64)> {
    (0..=48)
        .map(|k| {
            let a = k as f64 / 48.0 * std::f64::consts::TAU;
            (cx + r * a.cos(), cy + r * a.sin())
        })
        .collect()
}

/// Coast cells as horizontal runs over a block-downsampled grid; a block is
/// coast when any of its cells is.
fn coast_runs(grid: &TraversabilityGrid<f64>, max_blocks: usize) -> Vec<[(f64, f64); 2]> {
    let (w, h) = (grid.width(), grid.height());
    let b = w.max(h).div_ceil(max_blocks).max(1);
    let cs = grid.cell_size();
    let coast = |c: usize, r: usize| grid.classes[r * w + c] == CellClass::Coast;
    let mut runs = Vec::new();
    for br in 0..h.div_ceil(b) {
        let mut start = None;
        for bc in 0..=w.div_ceil(b) {
            let land = bc < w.div_ceil(b)
                && (br * b..((br + 1) * b).min(h)).any(|r| (bc * b..((bc + 1) * b).min(w)).any(|c| coast(c, r)));
            match (land, start) {
                (true, None) => start = Some(bc),
                (false, Some(s)) => {
                    let y0 = (br * b) as f64 * cs;
                    let y1 = (((br + 1) * b).min(h)) as f64 * cs;
                    runs.push([(s as f64 * b as f64 * cs, y0), (((bc * b).min(w)) as f64 * cs, y1)]);
                    start = None;
                }
                _ => {}
            }
        }
    }
    runs
}

/// Plan view of the map with coast, obstacle collision boundaries, vortex
/// cores with a tick showing the spin direction, and the given paths.
pub fn path_overlay(env: &Environment<f64>, paths: &[(String, Vec<Vec3<f64>>)], out: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    if paths.iter().all(|p| p.1.is_empty()) {
        return Err(Error::Plot("no path samples".into()));
    }
    let (svg, csv) = targets(out, stem)?;
    let file = svg.clone();
    let mut rows = Vec::new();
    for (label, pts) in paths {
        rows.extend(pts.iter().map(|p| OverlayRow { layer: "path", label, x: p.x, y: p.y, z: p.z, radius: 0.0, strength: 0.0 }));
    }
    let boundaries: Vec<(Vec3<f64>, f64)> = env.obstacles().iter().map(|o| (o.center, env.boundary_of(o))).collect();
    rows.extend(boundaries.iter().map(|(c, r)| OverlayRow { layer: "obstacle", label: "", x: c.x, y: c.y, z: c.z, radius: *r, strength: 0.0 }));
    let vortices = env.current().layers.first().cloned().unwrap_or_default();
    rows.extend(vortices.iter().map(|v| OverlayRow { layer: "vortex", label: "", x: v.x, y: v.y, z: 0.0, radius: v.radius, strength: v.strength }));
    write_csv(&csv, &rows)?;

    let (ex, ey) = env.grid.extent();
    let side = 800u32;
    let root = SVGBackend::new(&file, (side + 80, side + 60)).into_drawing_area();
    root.fill(&WHITE).map_err(pe)?;
    let mut chart = ChartBuilder::on(&root)
        .caption("Path over map", ("sans-serif", 22))
        .margin(15)
        .x_label_area_size(35)
        .y_label_area_size(60)
        .build_cartesian_2d(0.0..ex, 0.0..ey)
        .map_err(pe)?;
    chart.configure_mesh().disable_mesh().x_desc("x (m)").y_desc("y (m)").draw().map_err(pe)?;
    let land = RGBColor(160, 140, 110);
    chart.draw_series(coast_runs(&env.grid, 200).into_iter().map(|r| Rectangle::new(r, land.filled()))).map_err(pe)?;
    let blue = RGBColor(90, 140, 220);
    for v in &vortices {
        chart.draw_series(std::iter::once(PathElement::new(circle(v.x, v.y, v.radius), blue.mix(0.6)))).map_err(pe)?;
        // positive strength spins counter-clockwise: the top of the core moves towards -x
        let dir = if v.strength >= 0.0 { -1.0 } else { 1.0 };
        let tick = vec![(v.x, v.y + v.radius), (v.x + dir * v.radius * 0.5, v.y + v.radius)];
        chart.draw_series(std::iter::once(PathElement::new(tick, blue.stroke_width(2)))).map_err(pe)?;
    }
    for (c, r) in &boundaries {
        chart.draw_series(std::iter::once(Polygon::new(circle(c.x, c.y, *r), RED.mix(0.25)))).map_err(pe)?;
        chart.draw_series(std::iter::once(PathElement::new(circle(c.x, c.y, *r), RED))).map_err(pe)?;
    }
    for (k, (label, pts)) in paths.iter().enumerate() {
        let color = PALETTE[(k + 2) % PALETTE.len()];
        chart
            .draw_series(LineSeries::new(pts.iter().map(|p| (p.x, p.y)), color.stroke_width(3)))
            .map_err(pe)?
            .label(label.as_str())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color));
        if let (Some(a), Some(b)) = (pts.first(), pts.last()) {
            chart.draw_series([Circle::new((a.x, a.y), 6, color.filled()), Circle::new((b.x, b.y), 6, BLACK.filled())]).map_err(pe)?;
        }
    }
    chart.configure_series_labels().background_style(WHITE.mix(0.8)).border_style(BLACK).draw().map_err(pe)?;
    root.present().map_err(pe)?;
    Ok(vec![svg, csv])
}

#[derive(Serialize)]
struct LegRow {
    leg: usize,
    from: usize,
    to: usize,
    expected: f64,
    path_time: f64,
}

/// Path time of each traversed leg against its expected time.
pub fn leg_times(legs: &[LegRecord<f64>], out: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    if legs.is_empty() {
        return Err(Error::Plot("no traversed legs".into()));
    }
    let (svg, csv) = targets(out, stem)?;
    let file = svg.clone();
    let rows: Vec<LegRow> = legs
        .iter()
        .enumerate()
        .map(|(k, l)| LegRow { leg: k + 1, from: l.from, to: l.to, expected: l.expected, path_time: l.path_time })
        .collect();
    write_csv(&csv, &rows)?;
    let (lo, hi) = bounds(rows.iter().flat_map(|r| [r.expected, r.path_time]));
    let root = SVGBackend::new(&file, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(pe)?;
    let mut chart = ChartBuilder::on(&root)
        .caption("Leg time: path against expected", ("sans-serif", 22))
        .margin(15)
        .x_label_area_size(40)
        .y_label_area_size(70)
        .build_cartesian_2d(0.5..rows.len() as f64 + 0.5, padded(lo.min(0.0), hi))
        .map_err(pe)?;
    chart.configure_mesh().x_desc("leg").y_desc("seconds").draw().map_err(pe)?;
    let series: [(&str, RGBColor, fn(&LegRow) -> f64); 2] =
        [("expected", PALETTE[0], |r| r.expected), ("path", PALETTE[1], |r| r.path_time)];
    for (name, color, f) in series {
        chart
            .draw_series(LineSeries::new(rows.iter().map(|r| (r.leg as f64, f(r))), color.stroke_width(2)))
            .map_err(pe)?
            .label(name)
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color));
        chart.draw_series(rows.iter().map(|r| Circle::new((r.leg as f64, f(r)), 4, color.filled()))).map_err(pe)?;
    }
    chart.configure_series_labels().background_style(WHITE.mix(0.8)).border_style(BLACK).draw().map_err(pe)?;
    root.present().map_err(pe)?;
    Ok(vec![svg, csv])
}

#[derive(Serialize)]
struct TimelineRow {
    kind: &'static str,
    index: usize,
    start: f64,
    end: f64,
    from: usize,
    to: usize,
}

/// Legs as bars along mission time with a marker at every mission plan.
pub fn timeline(report: &MissionReport<f64>, out: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    if report.plans.is_empty() {
        return Err(Error::Plot("report holds no plans".into()));
    }
    let (svg, csv) = targets(out, stem)?;
    let file = svg.clone();
    let mut rows: Vec<TimelineRow> = report
        .plans
        .iter()
        .enumerate()
        .map(|(k, p)| TimelineRow { kind: "plan", index: k + 1, start: p.issued_at, end: p.issued_at, from: p.from, to: p.from })
        .collect();
    rows.extend(report.legs.iter().enumerate().map(|(k, l)| TimelineRow {
        kind: "leg",
        index: k + 1,
        start: l.departed_at,
        end: l.departed_at + l.path_time,
        from: l.from,
        to: l.to,
    }));
    write_csv(&csv, &rows)?;
    let t_max = rows.iter().map(|r| r.end).fold(report.budget, f64::max);
    let root = SVGBackend::new(&file, (SIZE.0, 300)).into_drawing_area();
    root.fill(&WHITE).map_err(pe)?;
    let mut chart = ChartBuilder::on(&root)
        .caption("Mission timeline", ("sans-serif", 22))
        .margin(15)
        .x_label_area_size(40)
        .build_cartesian_2d(0.0..t_max * 1.02, 0.0..3.0)
        .map_err(pe)?;
    chart.configure_mesh().disable_y_axis().disable_y_mesh().x_desc("mission time (s)").draw().map_err(pe)?;
    for (k, r) in rows.iter().filter(|r| r.kind == "leg").enumerate() {
        let c = PALETTE[k % 2];
        chart.draw_series(std::iter::once(Rectangle::new([(r.start, 0.8), (r.end, 1.4)], c.mix(0.6).filled()))).map_err(pe)?;
    }
    for r in rows.iter().filter(|r| r.kind == "plan") {
        chart.draw_series(std::iter::once(PathElement::new(vec![(r.start, 0.6), (r.start, 2.2)], RED.stroke_width(2)))).map_err(pe)?;
        chart.draw_series(std::iter::once(TriangleMarker::new((r.start, 2.3), 7, RED.filled()))).map_err(pe)?;
        chart
            .draw_series(std::iter::once(Text::new(format!("plan {}", r.index), (r.start, 2.7), ("sans-serif", 13))))
            .map_err(pe)?;
    }
    let budget = vec![(report.budget, 0.2), (report.budget, 2.8)];
    chart.draw_series(std::iter::once(PathElement::new(budget, BLACK.stroke_width(1)))).map_err(pe)?;
    root.present().map_err(pe)?;
    Ok(vec![svg, csv])
}

#[derive(Serialize)]
struct ScalingRow {
    nodes: usize,
    median_ms: f64,
    fit_ms: f64,
}

/// Median planning time per waypoint count with the fitted line.
pub fn scaling_plot(points: &[(usize, f64)], fit: &LinearFit, out: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    if points.is_empty() {
        return Err(Error::Plot("no scaling points".into()));
    }
    let (svg, csv) = targets(out, stem)?;
    let file = svg.clone();
    let rows: Vec<ScalingRow> = points
        .iter()
        .map(|&(n, ms)| ScalingRow { nodes: n, median_ms: ms, fit_ms: fit.intercept + fit.slope * n as f64 })
        .collect();
    write_csv(&csv, &rows)?;
    let (x0, x1) = bounds(rows.iter().map(|r| r.nodes as f64));
    let (y0, y1) = bounds(rows.iter().flat_map(|r| [r.median_ms, r.fit_ms]));
    let root = SVGBackend::new(&file, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(pe)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(format!("Planning time against waypoints (R^2 = {:.3})", fit.r_squared), ("sans-serif", 22))
        .margin(15)
        .x_label_area_size(40)
        .y_label_area_size(70)
        .build_cartesian_2d(padded(x0, x1), padded(y0.min(0.0), y1))
        .map_err(pe)?;
    chart.configure_mesh().x_desc("waypoints").y_desc("median planning time (ms)").draw().map_err(pe)?;
    chart.draw_series(LineSeries::new(rows.iter().map(|r| (r.nodes as f64, r.fit_ms)), BLACK)).map_err(pe)?;
    chart.draw_series(rows.iter().map(|r| Circle::new((r.nodes as f64, r.median_ms), 5, PALETTE[0].filled()))).map_err(pe)?;
    root.present().map_err(pe)?;
    Ok(vec![svg, csv])
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let f = std::fs::File::open(path).map_err(io_err(path))?;
    Ok(serde_json::from_reader(std::io::BufReader::new(f))?)
}

/// Metrics boxed for each batch mode.
fn box_metrics(mode: &str) -> &'static [&'static str] {
    match mode {
        "mission" => &["mission_ms", "time", "weight", "task_count", "cost"],
        "motion" => &["motion_ms", "time", "length", "cost"],
        "armpa" => &["mission_time", "remaining_time", "total_cost", "rep", "motion_ms"],
        _ => &[],
    }
}

/// Renders every figure whose inputs are present in `input`: `trace.csv`,
/// `batch.json`, `path.json` with `grid.csv` and `env_state.json`, and
/// `report.json`.
pub fn render_dir(input: &Path, out: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let trace = input.join("trace.csv");
    if trace.exists() {
        let mut r = csv::Reader::from_path(&trace)?;
        let mut pts = Vec::new();
        for row in r.deserialize::<(usize, f64, usize, f64)>() {
            let (iteration, best, _, _) = row?;
            pts.push((iteration, best));
        }
        written.extend(trace_plot(&[("best".to_string(), pts)], out, "cost_trace")?);
    }
    let batch = input.join("batch.json");
    if batch.exists() {
        let v: serde_json::Value = read_json(&batch)?;
        let mode = v["mode"].as_str().unwrap_or_default().to_string();
        let mut panels = Vec::new();
        for &m in box_metrics(&mode) {
            if let Ok(q) = serde_json::from_value::<Quantiles>(v["summary"][m].clone()) {
                panels.push((m.to_string(), q));
            }
        }
        if !panels.is_empty() {
            written.extend(box_plot(&panels, out, "boxplots")?);
        }
        if let Some(s) = v.get("scaling_ms") {
            let points: Vec<(usize, f64)> = s[0]
                .as_array()
                .into_iter()
                .flatten()
                .map(|p| (p["nodes"].as_u64().unwrap_or(0) as usize, p["median_ms"].as_f64().unwrap_or(f64::NAN)))
                .collect();
            let fit: LinearFit = serde_json::from_value(s[1].clone())?;
            written.extend(scaling_plot(&points, &fit, out, "scaling")?);
        }
    }
    let path = input.join("path.json");
    if path.exists() {
        let sol: armpa_core::motion::PathSolution<f64> = read_json(&path)?;
        let grid_file = input.join("grid.csv");
        let f = std::fs::File::open(&grid_file).map_err(io_err(&grid_file))?;
        let raster = armpa_core::env::Raster::read_csv(std::io::BufReader::new(f))?;
        let grid = TraversabilityGrid::from_values(raster)?;
        let state: armpa_core::env::DynamicState<f64> = read_json(&input.join("env_state.json"))?;
        let env = Environment { grid: std::sync::Arc::new(grid), state };
        written.extend(path_overlay(&env, &[("path".to_string(), sol.positions())], out, "path_overlay")?);
    }
    let report = input.join("report.json");
    if report.exists() {
        let r: MissionReport<f64> = read_json(&report)?;
        written.extend(timeline(&r, out, "timeline")?);
        if !r.legs.is_empty() {
            written.extend(leg_times(&r.legs, out, "leg_times")?);
        }
    }
    if written.is_empty() {
        return Err(Error::Config(format!("nothing to plot in {}", input.display())));
    }
    Ok(written)
}
