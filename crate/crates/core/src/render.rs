//! Rasterizes a layout to a square RGB image: anti-aliased white edges
//! under sky-blue discs with white rims, on black.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::layout::Layout;

pub const DEFAULT_RESOLUTION: u32 = 224;
pub const MIN_RESOLUTION: u32 = 32;
pub const MAX_RESOLUTION: u32 = 1024;

pub type Rgb = [u8; 3];

pub const SKYBLUE: Rgb = [135, 206, 235];
pub const WHITE: Rgb = [255, 255, 255];
pub const BLACK: Rgb = [0, 0, 0];

/// Drawing parameters. Pixel sizes are given at the 224-pixel reference
/// resolution and scale linearly with `resolution`.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderSpec {
    pub resolution: u32,
    pub node_fill: Rgb,
    pub node_border: Rgb,
    pub node_radius: f64,
    pub border_width: f64,
    pub edge_color: Rgb,
    pub edge_width: f64,
    pub edge_opacity: f64,
    pub background: Rgb,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            resolution: DEFAULT_RESOLUTION,
            node_fill: SKYBLUE,
            node_border: WHITE,
            node_radius: 4.0,
            border_width: 1.0,
            edge_color: WHITE,
            edge_width: 1.5,
            edge_opacity: 0.8,
            background: BLACK,
        }
    }
}

impl RenderSpec {
    pub fn with_resolution(resolution: u32) -> Result<Self> {
        let spec = RenderSpec {
            resolution,
            ..RenderSpec::default()
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(MIN_RESOLUTION..=MAX_RESOLUTION).contains(&self.resolution) {
            return Err(Error::InvalidParameter(format!(
                "resolution {} outside [{MIN_RESOLUTION}, {MAX_RESOLUTION}]",
                self.resolution
            )));
        }
        if !(0.0..=1.0).contains(&self.edge_opacity) {
            return Err(Error::InvalidParameter(format!(
                "edge opacity {} outside [0, 1]",
                self.edge_opacity
            )));
        }
        Ok(())
    }

    fn scale(&self) -> f64 {
        f64::from(self.resolution) / f64::from(DEFAULT_RESOLUTION)
    }

    /// Node radius in output pixels.
    pub fn radius_px(&self) -> f64 {
        self.node_radius * self.scale()
    }
}

/// Row-major 8-bit RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<u8>,
}

impl RgbImage {
    pub fn pixel(&self, x: u32, y: u32) -> Rgb {
        let i = 3 * (y as usize * self.width as usize + x as usize);
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn encode_png(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        {
            let mut encoder = png::Encoder::new(&mut out, self.width, self.height);
            encoder.set_color(png::ColorType::Rgb);
            encoder.set_depth(png::BitDepth::Eight);
            let mut writer = encoder.write_header()?;
            writer.write_image_data(&self.pixels)?;
            writer.finish()?;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub struct Rendered {
    pub image: RgbImage,
    /// Set when more than half of the nodes share a position.
    pub degenerate: bool,
}

/// Floating-point canvas; quantized once at the end so compositing order
/// is the only thing that matters.
struct Canvas {
    size: usize,
    data: Vec<[f64; 3]>,
}

impl Canvas {
    fn new(size: usize, background: Rgb) -> Self {
        let bg = background.map(f64::from);
        Canvas {
            size,
            data: vec![bg; size * size],
        }
    }

    fn blend(&mut self, x: usize, y: usize, color: [f64; 3], alpha: f64) {
        if alpha <= 0.0 {
            return;
        }
        let px = &mut self.data[y * self.size + x];
        for k in 0..3 {
            px[k] = color[k] * alpha + px[k] * (1.0 - alpha);
        }
    }

    /// Pixel index range whose centers may lie within `reach` of `[lo, hi]`.
    fn span(&self, lo: f64, hi: f64, reach: f64) -> std::ops::Range<usize> {
        let a = (lo - reach - 0.5).floor().max(0.0) as usize;
        let b = ((hi + reach + 0.5).ceil().max(0.0) as usize).min(self.size);
        a.min(b)..b
    }

    fn into_image(self) -> RgbImage {
        let pixels = self
            .data
            .iter()
            .flat_map(|p| p.map(|c| c.round().clamp(0.0, 255.0) as u8))
            .collect();
        RgbImage {
            width: self.size as u32,
            height: self.size as u32,
            pixels,
        }
    }
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p[0] - a[0] - t * dx).hypot(p[1] - a[1] - t * dy)
}

/// Fraction of a pixel covered by a shape edge `signed` pixels away.
#[inline]
fn coverage(signed: f64) -> f64 {
    (signed + 0.5).clamp(0.0, 1.0)
}

pub fn is_degenerate(layout: &Layout) -> bool {
    let n = layout.positions.len();
    if n < 2 {
        return false;
    }
    let mut groups: HashMap<(i64, i64), usize> = HashMap::new();
    for p in &layout.positions {
        let key = ((p[0] * 1e9).round() as i64, (p[1] * 1e9).round() as i64);
        *groups.entry(key).or_default() += 1;
    }
    let coincident: usize = groups.values().filter(|&&c| c > 1).sum();
    2 * coincident > n
}

pub fn render_image(g: &Graph, layout: &Layout, spec: &RenderSpec) -> Result<Rendered> {
    spec.validate()?;
    if layout.positions.len() != g.num_nodes() {
        return Err(Error::MissingPosition {
            expected: g.num_nodes(),
            got: layout.positions.len(),
        });
    }
    let size = spec.resolution as usize;
    let res = f64::from(spec.resolution);
    let scale = spec.scale();
    let to_px = |p: [f64; 2]| [p[0] * res, (1.0 - p[1]) * res];
    let points: Vec<[f64; 2]> = layout.positions.iter().map(|&p| to_px(p)).collect();
    let mut canvas = Canvas::new(size, spec.background);

    let half_width = spec.edge_width * scale / 2.0;
    let edge_color = spec.edge_color.map(f64::from);
    for (u, v) in g.edges() {
        let (a, b) = (points[u], points[v]);
        for y in canvas.span(a[1].min(b[1]), a[1].max(b[1]), half_width + 1.0) {
            for x in canvas.span(a[0].min(b[0]), a[0].max(b[0]), half_width + 1.0) {
                let c = [x as f64 + 0.5, y as f64 + 0.5];
                let cov = coverage(half_width - segment_distance(c, a, b));
                canvas.blend(x, y, edge_color, spec.edge_opacity * cov);
            }
        }
    }

    let radius = spec.radius_px();
    let inner = radius - spec.border_width * scale;
    let fill = spec.node_fill.map(f64::from);
    let border = spec.node_border.map(f64::from);
    for p in &points {
        for y in canvas.span(p[1], p[1], radius + 1.0) {
            for x in canvas.span(p[0], p[0], radius + 1.0) {
                let d = (x as f64 + 0.5 - p[0]).hypot(y as f64 + 0.5 - p[1]);
                let t = coverage(inner - d);
                let color = [0, 1, 2].map(|k| fill[k] * t + border[k] * (1.0 - t));
                canvas.blend(x, y, color, coverage(radius - d));
            }
        }
    }

    Ok(Rendered {
        image: canvas.into_image(),
        degenerate: is_degenerate(layout),
    })
}
