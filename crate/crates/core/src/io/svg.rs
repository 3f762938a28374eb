use std::fmt::Write;

use num_complex::Complex64;

use crate::diagram::PhaseDiagram;
use crate::error::{Error, Result};
use crate::model::Rect;
use crate::zeros::{AsymptoteLine, ZeroSet};

const WIDTH: f64 = 800.0;
const ZERO_COLORS: [&str; 4] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd"];

/// Asymptotic half-lines near one multiple point `z_m`, given in the
/// rescaled variable `N (z - z_m)`.
#[derive(Clone, Debug)]
pub struct AsymptoteOverlay {
    pub z_m: Complex64,
    pub n: f64,
    pub lines: Vec<AsymptoteLine>,
}

/// A static plot of a phase diagram with zeros and asymptotes over a
/// viewport of the complex plane.
#[derive(Clone, Debug)]
pub struct SvgPlot {
    viewport: Rect,
    height: f64,
    body: String,
}

impl SvgPlot {
    pub fn new(viewport: Rect) -> Result<Self> {
        viewport.validate()?;
        let height = (WIDTH * viewport.height() / viewport.width()).clamp(100.0, 4.0 * WIDTH);
        let mut plot = SvgPlot {
            viewport,
            height,
            body: String::new(),
        };
        plot.axes();
        Ok(plot)
    }

    fn map(&self, z: Complex64) -> (f64, f64) {
        let v = self.viewport;
        ((z.re - v.re.0) / v.width() * WIDTH, (v.im.1 - z.im) / v.height() * self.height)
    }

    fn axes(&mut self) {
        let v = self.viewport;
        let re0 = 0f64.clamp(v.re.0, v.re.1);
        let im0 = 0f64.clamp(v.im.0, v.im.1);
        let (x0, y0) = self.map(Complex64::new(v.re.0, im0));
        let (x1, _) = self.map(Complex64::new(v.re.1, im0));
        let (xa, ya) = self.map(Complex64::new(re0, v.im.1));
        let (_, yb) = self.map(Complex64::new(re0, v.im.0));
        let _ = writeln!(
            self.body,
            r##"<line class="axis" x1="{x0:.3}" y1="{y0:.3}" x2="{x1:.3}" y2="{y0:.3}" stroke="#888" stroke-width="1"/>"##
        );
        let _ = writeln!(
            self.body,
            r##"<line class="axis" x1="{xa:.3}" y1="{ya:.3}" x2="{xa:.3}" y2="{yb:.3}" stroke="#888" stroke-width="1"/>"##
        );
    }

    pub fn diagram(&mut self, diagram: &PhaseDiagram) -> &mut Self {
        for c in &diagram.curves {
            let mut d = String::new();
            for (i, z) in c.points().enumerate() {
                let (x, y) = self.map(z);
                let _ = write!(d, "{}{x:.3} {y:.3}", if i == 0 { "M" } else { " L" });
            }
            if d.is_empty() {
                continue;
            }
            let _ = writeln!(
                self.body,
                r##"<path class="curve" d="{d}" fill="none" stroke="#000" stroke-width="1.5"/>"##
            );
        }
        for mp in &diagram.multiple_points {
            let (x, y) = self.map(mp.z);
            let _ = writeln!(
                self.body,
                r##"<rect class="multiple-point" x="{:.3}" y="{:.3}" width="8" height="8" fill="#ff7f0e"/>"##,
                x - 4.0,
                y - 4.0
            );
        }
        self
    }

    pub fn zeros(&mut self, set: &ZeroSet, index: usize) -> &mut Self {
        let color = ZERO_COLORS[index % ZERO_COLORS.len()];
        for z in set.zeros.iter().filter(|z| self.viewport.contains(z.z)) {
            let (x, y) = self.map(z.z);
            let _ = writeln!(
                self.body,
                r#"<circle class="zero" cx="{x:.3}" cy="{y:.3}" r="{}" fill="none" stroke="{color}"/>"#,
                2 + z.multiplicity
            );
        }
        self
    }

    pub fn asymptotes(&mut self, overlay: &AsymptoteOverlay) -> &mut Self {
        let reach = self.viewport.diameter();
        for a in &overlay.lines {
            let start = overlay.z_m + a.origin_offset / overlay.n;
            let end = start + a.direction * reach;
            let (x0, y0) = self.map(start);
            let (x1, y1) = self.map(end);
            let _ = writeln!(
                self.body,
                r##"<line class="asymptote" x1="{x0:.3}" y1="{y0:.3}" x2="{x1:.3}" y2="{y1:.3}" stroke="#555" stroke-dasharray="6 4"/>"##
            );
        }
        self
    }

    pub fn render(&self) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{h:.0}\" viewBox=\"0 0 {WIDTH} {h:.3}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            h = self.height
        )
    }
}

/// Renders a diagram and zero sets; the viewport must overlap `domain`.
pub fn emit_svg(diagram: &PhaseDiagram, zeros: &[ZeroSet], viewport: Rect, domain: Rect) -> Result<String> {
    viewport.validate()?;
    let overlaps = viewport.re.0 < domain.re.1
        && domain.re.0 < viewport.re.1
        && viewport.im.0 < domain.im.1
        && domain.im.0 < viewport.im.1;
    if !overlaps {
        return Err(Error::Argument(format!("viewport {viewport} does not meet the domain {domain}")));
    }
    let mut plot = SvgPlot::new(viewport)?;
    plot.diagram(diagram);
    for (i, z) in zeros.iter().enumerate() {
        plot.zeros(z, i);
    }
    Ok(plot.render())
}
