//! Deterministic rasterization of layouts and the layout-to-pixel transform.
//!
//! Pixel `(i, j)` sits at integer coordinate `(i, j)`; continuous positions are rounded to the
//! nearest pixel. Edges are 8-connected integer lines drawn from the lexicographically smaller
//! endpoint so `a -> b` and `b -> a` produce the same pixels, which keeps 4-connected fills from
//! leaking across them.

mod draw;

use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{Hole, Layout, NodeId, PixelRect, Point, Topology};

pub use draw::{disc_offsets, line_pixels};

pub const MIN_DIM: u32 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rgb(pub [u8; 3]);

impl Rgb {
    pub const WHITE: Rgb = Rgb([255, 255, 255]);
    pub const BLACK: Rgb = Rgb([0, 0, 0]);
    pub const GREEN: Rgb = Rgb([0, 255, 0]);
}

/// Row-major RGB8 pixel grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Raster {
    width: u32,
    height: u32,
    pixels: Vec<Rgb>,
}

impl Raster {
    pub fn new(width: u32, height: u32, fill: Rgb) -> Result<Self> {
        if width < MIN_DIM || height < MIN_DIM {
            return Err(Error::InvalidInput(format!(
                "raster {width}x{height} smaller than {MIN_DIM}x{MIN_DIM}"
            )));
        }
        Ok(Raster {
            width,
            height,
            pixels: vec![fill; width as usize * height as usize],
        })
    }

    pub fn from_pixels(width: u32, height: u32, pixels: Vec<Rgb>) -> Result<Self> {
        if pixels.len() != width as usize * height as usize {
            return Err(Error::InvalidInput(format!(
                "{} pixels for a {width}x{height} raster",
                pixels.len()
            )));
        }
        let mut r = Raster::new(width, height, Rgb::WHITE)?;
        r.pixels = pixels;
        Ok(r)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.pixels
    }

    #[inline]
    pub fn in_bounds(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && x < self.width as i64 && y < self.height as i64
    }

    #[inline]
    pub fn index(&self, x: u32, y: u32) -> usize {
        y as usize * self.width as usize + x as usize
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> Rgb {
        self.pixels[self.index(x, y)]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, c: Rgb) {
        let i = self.index(x, y);
        self.pixels[i] = c;
    }

    /// Writes only when `(x, y)` is on the canvas.
    #[inline]
    pub fn put(&mut self, x: i64, y: i64, c: Rgb) {
        if self.in_bounds(x, y) {
            self.set(x as u32, y as u32, c);
        }
    }

    pub fn count(&self, c: Rgb) -> usize {
        self.pixels.iter().filter(|&&p| p == c).count()
    }

    /// Copies the window `rect` (clamped to the canvas) into a new raster.
    pub fn crop(&self, rect: PixelRect) -> Result<Raster> {
        let x1 = rect.x1.min(self.width);
        let y1 = rect.y1.min(self.height);
        let w = x1.saturating_sub(rect.x0);
        let h = y1.saturating_sub(rect.y0);
        let mut out = Raster::new(w, h, Rgb::WHITE)?;
        for y in 0..h {
            for x in 0..w {
                out.set(x, y, self.get(rect.x0 + x, rect.y0 + y));
            }
        }
        Ok(out)
    }

    pub fn encode_png(&self) -> Result<Vec<u8>> {
        let mut buf = std::io::Cursor::new(Vec::new());
        self.to_image().write_to(&mut buf, image::ImageFormat::Png)?;
        Ok(buf.into_inner())
    }

    pub fn save_png(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.encode_png()?)?;
        Ok(())
    }

    pub fn load_png(path: impl AsRef<Path>) -> Result<Raster> {
        let img = image::open(path)?.to_rgb8();
        let (w, h) = img.dimensions();
        let pixels = img.pixels().map(|p| Rgb(p.0)).collect();
        Raster::from_pixels(w, h, pixels)
    }

    fn to_image(&self) -> image::RgbImage {
        let raw: Vec<u8> = self.pixels.iter().flat_map(|p| p.0).collect();
        image::RgbImage::from_raw(self.width, self.height, raw).expect("dimensions match")
    }
}

/// Canvas geometry and colors.
#[derive(Clone, Debug, PartialEq)]
pub struct RenderStyle {
    pub width: u32,
    pub height: u32,
    /// Fraction of each canvas side left empty on both ends.
    pub margin: f64,
    pub node_radius: u32,
    pub node_color: Rgb,
    pub edge_color: Rgb,
    pub background: Rgb,
    pub fill_color: Rgb,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            width: 1024,
            height: 1024,
            margin: 0.05,
            node_radius: 2,
            node_color: Rgb::BLACK,
            edge_color: Rgb::BLACK,
            background: Rgb::WHITE,
            fill_color: Rgb::GREEN,
        }
    }
}

impl RenderStyle {
    pub fn validate(&self) -> Result<()> {
        if self.width < MIN_DIM || self.height < MIN_DIM {
            return Err(Error::InvalidInput("canvas too small".into()));
        }
        if !(0.0..0.5).contains(&self.margin) {
            return Err(Error::InvalidInput(format!("margin {} not in [0, 0.5)", self.margin)));
        }
        let (b, e, f) = (self.background, self.edge_color, self.fill_color);
        if b == e || b == f || e == f || self.node_color == b || self.node_color == f {
            return Err(Error::InvalidInput(
                "background, ink and fill colors must differ".into(),
            ));
        }
        Ok(())
    }

    /// Default distance band for boundary-node membership: `node_radius + 1`.
    pub fn boundary_tolerance(&self) -> f64 {
        self.node_radius as f64 + 1.0
    }

    /// Same style on a canvas of a different size.
    pub fn with_canvas(&self, width: u32, height: u32) -> RenderStyle {
        RenderStyle {
            width,
            height,
            ..self.clone()
        }
    }
}

/// Uniform scale plus translation from layout space to pixel space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ViewTransform {
    pub scale: f64,
    pub tx: f64,
    pub ty: f64,
}

impl ViewTransform {
    pub fn forward(&self, p: Point) -> Point {
        Point::new(p.x * self.scale + self.tx, p.y * self.scale + self.ty)
    }

    pub fn inverse(&self, q: Point) -> Point {
        Point::new((q.x - self.tx) / self.scale, (q.y - self.ty) / self.scale)
    }

    /// Nearest pixel to the transformed position.
    pub fn to_pixel(&self, p: Point) -> (i64, i64) {
        let q = self.forward(p);
        (q.x.round() as i64, q.y.round() as i64)
    }

    pub fn node_pixels(&self, layout: &Layout) -> Vec<(i64, i64)> {
        layout.positions().iter().map(|&p| self.to_pixel(p)).collect()
    }
}

/// Fits the layout's bounding box into the canvas minus margins, preserving aspect ratio.
/// A zero-extent box maps to the canvas center.
pub fn make_transform(layout: &Layout, style: &RenderStyle) -> ViewTransform {
    let (w, h) = (style.width as f64, style.height as f64);
    let center = Point::new(w / 2.0, h / 2.0);
    let Some((lo, hi)) = layout.bounding_box() else {
        return ViewTransform {
            scale: 1.0,
            tx: center.x,
            ty: center.y,
        };
    };
    let (ex, ey) = (hi.x - lo.x, hi.y - lo.y);
    let avail_x = (1.0 - 2.0 * style.margin) * w;
    let avail_y = (1.0 - 2.0 * style.margin) * h;
    let scale = match (ex > 0.0, ey > 0.0) {
        (true, true) => (avail_x / ex).min(avail_y / ey),
        (true, false) => avail_x / ex,
        (false, true) => avail_y / ey,
        (false, false) => 1.0,
    };
    let mid = Point::new((lo.x + hi.x) / 2.0, (lo.y + hi.y) / 2.0);
    ViewTransform {
        scale,
        tx: center.x - mid.x * scale,
        ty: center.y - mid.y * scale,
    }
}

/// Renders with the transform fitted to `layout`.
pub fn render(layout: &Layout, topology: &Topology, style: &RenderStyle) -> Result<Raster> {
    let t = make_transform(layout, style);
    render_with(layout, topology, style, &t)
}

/// Background, then every edge as a 1-px line, then every node as a filled disc.
pub fn render_with(
    layout: &Layout,
    topology: &Topology,
    style: &RenderStyle,
    transform: &ViewTransform,
) -> Result<Raster> {
    check_cover(layout, topology)?;
    let mut r = Raster::new(style.width, style.height, style.background)?;
    let px = transform.node_pixels(layout);
    for &(u, v) in topology.edges() {
        draw::line(&mut r, px[u.index()], px[v.index()], style.edge_color, (0, 0));
    }
    for &p in &px {
        draw::disc(&mut r, p, style.node_radius, style.node_color, (0, 0));
    }
    Ok(r)
}

fn check_cover(layout: &Layout, topology: &Topology) -> Result<()> {
    if layout.len() != topology.node_count() {
        return Err(Error::InvalidInput(format!(
            "layout has {} positions for {} nodes",
            layout.len(),
            topology.node_count()
        )));
    }
    Ok(())
}

/// A hole redrawn from coordinates alone: only its boundary nodes and the edges among them.
#[derive(Clone, Debug)]
pub struct ReducedRender {
    pub raster: Raster,
    /// Window in full-canvas pixel coordinates; may extend past the canvas.
    pub origin: (i64, i64),
}

/// Redraws `hole` without unrelated edges, cropped to its bounding box plus 10% padding.
///
/// Uses the full-layout transform so pixels line up with [`render`] after shifting by `origin`.
pub fn render_reduced(
    layout: &Layout,
    topology: &Topology,
    hole: &Hole,
    style: &RenderStyle,
) -> Result<ReducedRender> {
    let transform = make_transform(layout, style);
    let ids: Vec<NodeId> = hole.sorted_ids();
    if let Some(bad) = ids.iter().find(|v| v.index() >= layout.len()) {
        return Err(Error::InvalidInput(format!(
            "boundary node {bad} missing from layout"
        )));
    }
    let pts: Vec<(i64, i64)> = ids
        .iter()
        .map(|&v| transform.to_pixel(layout.position(v)))
        .collect();
    let rad = style.node_radius as i64;
    let mut x0 = pts.iter().map(|p| p.0).min().unwrap_or(0) - rad;
    let mut y0 = pts.iter().map(|p| p.1).min().unwrap_or(0) - rad;
    let mut x1 = pts.iter().map(|p| p.0).max().unwrap_or(0) + rad + 1;
    let mut y1 = pts.iter().map(|p| p.1).max().unwrap_or(0) + rad + 1;
    if let Some(b) = hole.bbox() {
        x0 = x0.min(b.x0 as i64);
        y0 = y0.min(b.y0 as i64);
        x1 = x1.max(b.x1 as i64);
        y1 = y1.max(b.y1 as i64);
    }
    let pad_x = ((x1 - x0) as f64 * 0.1).ceil().max(2.0) as i64;
    let pad_y = ((y1 - y0) as f64 * 0.1).ceil().max(2.0) as i64;
    x0 -= pad_x;
    y0 -= pad_y;
    x1 += pad_x;
    y1 += pad_y;
    grow_to_min(&mut x0, &mut x1);
    grow_to_min(&mut y0, &mut y1);

    let mut raster = Raster::new((x1 - x0) as u32, (y1 - y0) as u32, style.background)?;
    let offset = (-x0, -y0);
    for (i, &u) in ids.iter().enumerate() {
        for (j, &v) in ids.iter().enumerate().skip(i + 1) {
            if topology.has_edge(u, v) {
                draw::line(&mut raster, pts[i], pts[j], style.edge_color, offset);
            }
        }
    }
    for &p in &pts {
        draw::disc(&mut raster, p, style.node_radius, style.node_color, offset);
    }
    Ok(ReducedRender {
        raster,
        origin: (x0, y0),
    })
}

fn grow_to_min(lo: &mut i64, hi: &mut i64) {
    let short = MIN_DIM as i64 - (*hi - *lo);
    if short > 0 {
        *lo -= short / 2;
        *hi += short - short / 2;
    }
}
