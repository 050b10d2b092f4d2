//! Static SVG charts of per-game series.

use std::fmt::Write as _;

use super::metrics::centred_moving_average;
use super::records::GameRecord;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;
const CMA_WINDOW: usize = 11;

struct Chart {
    title: String,
    y_label: String,
    n: usize,
    y_max: f64,
    body: String,
}

impl Chart {
    fn new(title: &str, y_label: &str, values: &[f64]) -> Self {
        let y_max = values.iter().copied().fold(1.0, f64::max) * 1.1;
        Chart {
            title: title.to_string(),
            y_label: y_label.to_string(),
            n: values.len(),
            y_max,
            body: String::new(),
        }
    }

    fn x(&self, i: f64) -> f64 {
        let span = (self.n.max(2) - 1) as f64;
        MARGIN + i / span * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN - v / self.y_max * (HEIGHT - 2.0 * MARGIN)
    }

    fn polyline(&mut self, points: &[(f64, f64)], colour: &str, width: f64) {
        let pts: Vec<String> = points
            .iter()
            .map(|&(i, v)| format!("{:.1},{:.1}", self.x(i), self.y(v)))
            .collect();
        writeln!(
            self.body,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="{width}" points="{}"/>"#,
            pts.join(" ")
        )
        .unwrap();
    }

    fn dots(&mut self, values: &[f64], colour: &str) {
        for (i, &v) in values.iter().enumerate() {
            writeln!(
                self.body,
                r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{colour}"/>"#,
                self.x(i as f64),
                self.y(v)
            )
            .unwrap();
        }
    }

    fn finish(self) -> String {
        let mut s = String::new();
        writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        )
        .unwrap();
        writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
        writeln!(
            s,
            r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            self.title
        )
        .unwrap();
        let (x0, x1, y0, y1) = (MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN, MARGIN);
        writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#).unwrap();
        writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#).unwrap();
        for k in 0..=4 {
            let v = self.y_max * k as f64 / 4.0;
            writeln!(
                s,
                r#"<text x="{}" y="{:.1}" font-family="sans-serif" font-size="10" text-anchor="end">{v:.0}</text>"#,
                x0 - 4.0,
                self.y(v) + 3.0
            )
            .unwrap();
        }
        writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">game</text>"#,
            WIDTH / 2.0,
            HEIGHT - 12.0
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="14" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            self.y_label
        )
        .unwrap();
        s.push_str(&self.body);
        s.push_str("</svg>\n");
        s
    }
}

fn series_with_cma(title: &str, y_label: &str, values: &[f64]) -> String {
    let mut chart = Chart::new(title, y_label, values);
    let raw: Vec<(f64, f64)> = values.iter().enumerate().map(|(i, &v)| (i as f64, v)).collect();
    chart.polyline(&raw, "#7f9fbf", 1.0);
    let cma = centred_moving_average(values, CMA_WINDOW).expect("odd window");
    let offset = (CMA_WINDOW / 2) as f64;
    let smooth: Vec<(f64, f64)> = cma.iter().enumerate().map(|(i, &v)| (i as f64 + offset, v)).collect();
    if !smooth.is_empty() {
        chart.polyline(&smooth, "#c03020", 2.0);
    }
    chart.finish()
}

/// Kills per game with an 11-game centred moving average.
pub fn kills_plot(level: u8, games: &[GameRecord]) -> String {
    let values: Vec<f64> = games.iter().map(|g| g.kills as f64).collect();
    series_with_cma(&format!("Kills per game, level {level}"), "kills", &values)
}

/// Deaths (by others and suicides) per game with an 11-game centred moving average.
pub fn deaths_plot(level: u8, games: &[GameRecord]) -> String {
    let values: Vec<f64> = games.iter().map(|g| g.deaths() as f64).collect();
    series_with_cma(&format!("Deaths per game, level {level}"), "deaths", &values)
}

/// Longest kill streak of each game.
pub fn streak_plot(level: u8, games: &[GameRecord]) -> String {
    let values: Vec<f64> = games.iter().map(|g| g.max_kill_streak as f64).collect();
    let mut chart = Chart::new(&format!("Longest kill streak per game, level {level}"), "kills", &values);
    chart.dots(&values, "#305080");
    chart.finish()
}
