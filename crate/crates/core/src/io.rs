//! Result records, file output and SVG plots of frequency curves.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::curve::{Classification, FrequencyCurve, NormalizedSolution};
use crate::error::Result;
use crate::shooting::GroundState;

/// Flat JSON record for one solution. Every field is always emitted;
/// fields that do not apply are `null`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionRecord {
    pub mu: f64,
    pub mass: f64,
    pub mass_target: Option<f64>,
    pub mass_error: Option<f64>,
    pub action: f64,
    pub j_m: Option<f64>,
    pub grad_sq: f64,
    pub pohozaev_rel: f64,
    pub classification: Option<Classification>,
    pub shoot_height: f64,
}

impl SolutionRecord {
    /// Record for a plain ground state; `mass` fills the `J_m` fields.
    pub fn from_state(state: &GroundState, mass: Option<f64>) -> Self {
        SolutionRecord {
            mu: state.mu,
            mass: state.mass(),
            mass_target: mass,
            mass_error: mass.map(|m| (state.mass() - m).abs() / m),
            action: state.action(),
            j_m: mass.map(|m| state.action() - m * state.mu),
            grad_sq: state.report.grad_sq,
            pohozaev_rel: state.residuals.pohozaev_rel,
            classification: None,
            shoot_height: state.shoot_height,
        }
    }

    pub fn from_normalized(sol: &NormalizedSolution) -> Self {
        SolutionRecord {
            mass_target: Some(sol.mass_target),
            mass_error: Some(sol.mass_error),
            j_m: Some(sol.j_m),
            classification: Some(sol.classification),
            ..Self::from_state(&sol.state, None)
        }
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| crate::Error::Io(e.to_string()))
}

/// Writes `contents` to `dir/name`, creating `dir` if needed.
pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)?;
    Ok(())
}

const WIDTH: f64 = 720.0;
const PANEL: f64 = 300.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const GAP: f64 = 60.0;
const COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];

struct Series<'a> {
    label: &'a str,
    points: Vec<(f64, f64)>,
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Axis {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        let pad = 0.05 * (hi - lo);
        Axis {
            lo: lo - pad,
            hi: hi + pad,
            log,
        }
    }

    fn unit(&self, v: f64) -> Option<f64> {
        let v = if self.log {
            if v <= 0.0 {
                return None;
            }
            v.log10()
        } else {
            v
        };
        v.is_finite().then(|| (v - self.lo) / (self.hi - self.lo))
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            (self.lo.ceil() as i32..=self.hi.floor() as i32)
                .map(|k| (10f64.powi(k), format!("1e{k}")))
                .collect()
        } else {
            let raw = (self.hi - self.lo) / 5.0;
            let mag = 10f64.powf(raw.log10().floor());
            let step = [1.0, 2.0, 5.0, 10.0]
                .iter()
                .map(|f| f * mag)
                .find(|s| *s >= raw)
                .unwrap_or(10.0 * mag);
            let mut t = (self.lo / step).ceil() * step;
            let mut out = Vec::new();
            while t <= self.hi {
                out.push((t, format!("{}", (t / step).round() * step)));
                t += step;
            }
            out
        }
    }
}

fn panel(
    svg: &mut String,
    top: f64,
    title: &str,
    y_label: &str,
    x: &Axis,
    y_log: bool,
    series: &[Series],
) {
    let y = Axis::fit(
        series.iter().flat_map(|s| s.points.iter().map(|p| p.1)),
        y_log,
    );
    let w = WIDTH - MARGIN_L - MARGIN_R;
    let px = |v: f64| x.unit(v).map(|u| MARGIN_L + u * w);
    let py = |v: f64| y.unit(v).map(|u| top + PANEL - u * PANEL);

    let _ = writeln!(
        svg,
        r##"<rect x="{MARGIN_L}" y="{top}" width="{w}" height="{PANEL}" fill="none" stroke="#444"/>"##
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{title}</text>"#,
        MARGIN_L + 0.5 * w,
        top - 8.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{0}" text-anchor="middle" font-size="12" transform="rotate(-90 16 {0})">{y_label}</text>"#,
        top + 0.5 * PANEL
    );
    for (v, label) in x.ticks() {
        if let Some(xp) = px(v) {
            let _ = writeln!(
                svg,
                r##"<line x1="{xp:.2}" y1="{0}" x2="{xp:.2}" y2="{1}" stroke="#ddd"/><text x="{xp:.2}" y="{2}" text-anchor="middle" font-size="10">{label}</text>"##,
                top,
                top + PANEL,
                top + PANEL + 14.0
            );
        }
    }
    for (v, label) in y.ticks() {
        if let Some(yp) = py(v) {
            let _ = writeln!(
                svg,
                r##"<line x1="{MARGIN_L}" y1="{yp:.2}" x2="{0}" y2="{yp:.2}" stroke="#ddd"/><text x="{1}" y="{2:.2}" text-anchor="end" font-size="10">{label}</text>"##,
                MARGIN_L + w,
                MARGIN_L - 4.0,
                yp + 3.0
            );
        }
    }
    for (k, s) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter_map(|&(a, b)| Some(format!("{:.2},{:.2}", px(a)?, py(b)?)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="11" fill="{color}">{}</text>"#,
            MARGIN_L + 8.0,
            top + 16.0 + 14.0 * k as f64,
            s.label
        );
    }
}

/// Self-contained SVG with `c±(μ)` on log axes and, when `mass` is given,
/// `b_m(μ)` below it together with the level line `m` on the mass panel.
pub fn curve_svg(curve: &FrequencyCurve, mass: Option<f64>) -> String {
    let x = Axis::fit(curve.samples.iter().map(|s| s.mu), true);
    let panels = if mass.is_some() { 2.0 } else { 1.0 };
    let height = MARGIN_T + panels * PANEL + (panels - 1.0) * GAP + 40.0;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let mut mass_series = vec![
        Series {
            label: "c-(mu)",
            points: curve.samples.iter().map(|s| (s.mu, s.c_minus)).collect(),
        },
        Series {
            label: "c+(mu)",
            points: curve.samples.iter().map(|s| (s.mu, s.c_plus)).collect(),
        },
    ];
    if let Some(m) = mass {
        mass_series.push(Series {
            label: "m",
            points: curve.samples.iter().map(|s| (s.mu, m)).collect(),
        });
    }
    panel(
        &mut svg,
        MARGIN_T,
        &format!("mass curve, {}, N = {}", curve.spec, curve.dim),
        "c(mu)",
        &x,
        true,
        &mass_series,
    );

    if let Some(m) = mass {
        let top = MARGIN_T + PANEL + GAP;
        panel(
            &mut svg,
            top,
            &format!("b_m(mu) = a(mu) - m mu, m = {m}"),
            "b_m(mu)",
            &x,
            false,
            &[Series {
                label: "b_m(mu)",
                points: curve.b_m(m),
            }],
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">mu</text>"#,
        MARGIN_L + 0.5 * (WIDTH - MARGIN_L - MARGIN_R),
        height - 8.0
    );
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveSample;
    use crate::NonlinearitySpec;

    fn curve() -> FrequencyCurve {
        FrequencyCurve {
            spec: NonlinearitySpec::cubic_quintic(1.0, 1.0),
            dim: 3,
            n_starts: 8,
            samples: (1..=5)
                .map(|i| {
                    let mu = 0.02 * i as f64;
                    CurveSample {
                        mu,
                        a: mu,
                        c_minus: 100.0 / i as f64 + 10.0 * i as f64,
                        c_plus: 100.0 / i as f64 + 10.0 * i as f64,
                        n_states: 1,
                    }
                })
                .collect(),
            gaps: Vec::new(),
        }
    }

    #[test]
    fn svg_has_one_polyline_per_series() {
        let plain = curve_svg(&curve(), None);
        assert!(plain.starts_with("<svg"));
        assert_eq!(plain.matches("<polyline").count(), 2);
        let with_mass = curve_svg(&curve(), Some(60.0));
        assert_eq!(with_mass.matches("<polyline").count(), 4);
        assert!(with_mass.contains("b_m(mu)"));
        assert!(with_mass.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn svg_is_deterministic() {
        assert_eq!(
            curve_svg(&curve(), Some(60.0)),
            curve_svg(&curve(), Some(60.0))
        );
    }

    #[test]
    fn record_fields_are_always_present() {
        let spec = NonlinearitySpec::pure_power(3.0);
        let state = crate::ground_state(&spec, 3, 1.0, &Default::default()).unwrap();
        let json: serde_json::Value =
            serde_json::from_str(&to_json(&SolutionRecord::from_state(&state, None)).unwrap())
                .unwrap();
        for key in [
            "mu",
            "mass",
            "mass_target",
            "mass_error",
            "action",
            "j_m",
            "grad_sq",
            "pohozaev_rel",
            "classification",
            "shoot_height",
        ] {
            assert!(json.get(key).is_some(), "{key}");
        }
        assert!(json["j_m"].is_null());
        let with_mass = SolutionRecord::from_state(&state, Some(2.0));
        assert_eq!(with_mass.j_m, Some(state.action() - 2.0));
    }
}
