//! Rasterizes a task's demonstrations into one annotated PNG.
//!
//! Layout, with `m` the margin, `gap = 2m`, `L` the label strip and `A` the
//! annotation strip (`A = L` when shapes are annotated, otherwise 0):
//!
//! ```text
//! grid_px(n) = n * cell + (n + 1) * gridline
//! width      = 2m + w_in + gap + w_out
//! height     = m + sum over rows of (L + max(h_in, h_out) + A + m)
//! ```
//!
//! `w_in` and `w_out` are the widest input and output grids over all rows,
//! `h_in` and `h_out` the heights of the grids in that row. Grids sit at the
//! top-left of their slot. When the test input is included it adds a final
//! row whose output slot shows a question mark.

mod font;

use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{Color, Grid};
use crate::task::Task;

pub const MAX_SIDE_PX: usize = 16384;
pub const MIN_CELL_PX: usize = 8;

const BACKGROUND: [u8; 3] = [0xFF, 0xFF, 0xFF];
const INK: [u8; 3] = [0x33, 0x33, 0x33];
const GRIDLINE: [u8; 3] = [0x55, 0x55, 0x55];

pub const ARC_PALETTE: [[u8; 3]; 10] = [
    [0x00, 0x00, 0x00],
    [0x00, 0x74, 0xD9],
    [0xFF, 0x41, 0x36],
    [0x2E, 0xCC, 0x40],
    [0xFF, 0xDC, 0x00],
    [0xAA, 0xAA, 0xAA],
    [0xF0, 0x12, 0xBE],
    [0xFF, 0x85, 0x1B],
    [0x7F, 0xDB, 0xFF],
    [0x87, 0x0C, 0x25],
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderStyle {
    pub cell_px: usize,
    pub gridline_px: usize,
    pub margin_px: usize,
    pub label_strip_px: usize,
    /// RGB per color, indexed by color index.
    pub palette: [[u8; 3]; 10],
    pub include_test_input: bool,
    pub annotate_shapes: bool,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            cell_px: 24,
            gridline_px: 1,
            margin_px: 16,
            label_strip_px: 20,
            palette: ARC_PALETTE,
            include_test_input: false,
            annotate_shapes: true,
        }
    }
}

impl RenderStyle {
    pub fn validate(&self) -> Result<(), RenderError> {
        if self.cell_px < MIN_CELL_PX {
            return Err(RenderError::InvalidStyle(format!(
                "cell_px must be at least {MIN_CELL_PX}, got {}",
                self.cell_px
            )));
        }
        Ok(())
    }

    pub fn rgb(&self, color: Color) -> [u8; 3] {
        self.palette[color.index() as usize]
    }

    fn grid_px(&self, cells: usize) -> usize {
        cells * self.cell_px + (cells + 1) * self.gridline_px
    }

    fn annotation_px(&self) -> usize {
        if self.annotate_shapes {
            self.label_strip_px
        } else {
            0
        }
    }
}

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("invalid render style: {0}")]
    InvalidStyle(String),
    #[error("nothing to render: the task has no demonstration pairs")]
    NoPairs,
    #[error("image would be {width}x{height} px, above the {MAX_SIDE_PX} px limit")]
    RenderOverflow { width: usize, height: usize },
    #[error("png encoding failed: {0}")]
    Encode(#[from] png::EncodingError),
}

/// Where one grid lands in the image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Panel {
    pub x: usize,
    pub y: usize,
    pub rows: usize,
    pub cols: usize,
    pub cell_px: usize,
    pub gridline_px: usize,
}

impl Panel {
    pub fn width(&self) -> usize {
        self.cols * self.cell_px + (self.cols + 1) * self.gridline_px
    }

    pub fn height(&self) -> usize {
        self.rows * self.cell_px + (self.rows + 1) * self.gridline_px
    }

    fn cell_origin(&self, r: usize, c: usize) -> (usize, usize) {
        let step = self.cell_px + self.gridline_px;
        (
            self.x + self.gridline_px + c * step,
            self.y + self.gridline_px + r * step,
        )
    }

    pub fn cell_center(&self, r: usize, c: usize) -> (usize, usize) {
        let (x, y) = self.cell_origin(r, c);
        (x + self.cell_px / 2, y + self.cell_px / 2)
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x && x < self.x + self.width() && y >= self.y && y < self.y + self.height()
    }
}

/// One stacked row: an input panel and, for demonstrations, an output panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowLayout {
    pub top: usize,
    pub input: Panel,
    pub output: Option<Panel>,
    /// Height of the taller grid in the row.
    pub grid_height: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub width: usize,
    pub height: usize,
    pub input_x: usize,
    pub output_x: usize,
    pub input_width: usize,
    pub output_width: usize,
    pub rows: Vec<RowLayout>,
}

impl Layout {
    pub fn panels(&self) -> impl Iterator<Item = &Panel> {
        self.rows.iter().flat_map(|r| std::iter::once(&r.input).chain(r.output.as_ref()))
    }
}

fn rows_of<'a>(task: &'a Task, style: &RenderStyle) -> Vec<(&'a Grid, Option<&'a Grid>)> {
    let mut rows: Vec<(&Grid, Option<&Grid>)> = task
        .train_pairs
        .iter()
        .map(|p| (&p.input, Some(&p.output)))
        .collect();
    if style.include_test_input && !rows.is_empty() {
        rows.push((&task.test_input, None));
    }
    rows
}

pub fn layout(task: &Task, style: &RenderStyle) -> Result<Layout, RenderError> {
    style.validate()?;
    let rows = rows_of(task, style);
    if rows.is_empty() {
        return Err(RenderError::NoPairs);
    }
    let m = style.margin_px;
    let gap = 2 * m;
    let input_width = rows.iter().map(|(i, _)| style.grid_px(i.cols())).max().unwrap_or(0);
    let output_width = rows
        .iter()
        .filter_map(|(_, o)| o.map(|o| style.grid_px(o.cols())))
        .max()
        .unwrap_or(0);
    let input_x = m;
    let output_x = m + input_width + gap;
    let panel = |x, y, g: &Grid| Panel {
        x,
        y,
        rows: g.rows(),
        cols: g.cols(),
        cell_px: style.cell_px,
        gridline_px: style.gridline_px,
    };

    let mut top = m;
    let mut out = Vec::with_capacity(rows.len());
    for (input, output) in rows {
        let y = top + style.label_strip_px;
        let grid_height = style
            .grid_px(input.rows())
            .max(output.map_or(0, |o| style.grid_px(o.rows())));
        out.push(RowLayout {
            top,
            input: panel(input_x, y, input),
            output: output.map(|o| panel(output_x, y, o)),
            grid_height,
        });
        top = y + grid_height + style.annotation_px() + m;
    }
    Ok(Layout {
        width: 2 * m + input_width + gap + output_width,
        height: top,
        input_x,
        output_x,
        input_width,
        output_width,
        rows: out,
    })
}

pub fn image_dims(task: &Task, style: &RenderStyle) -> Result<(usize, usize), RenderError> {
    let l = layout(task, style)?;
    Ok((l.width, l.height))
}

struct Canvas {
    width: usize,
    height: usize,
    rgb: Vec<u8>,
}

impl Canvas {
    fn new(width: usize, height: usize) -> Canvas {
        Canvas {
            width,
            height,
            rgb: BACKGROUND.repeat(width * height),
        }
    }

    fn put(&mut self, x: usize, y: usize, color: [u8; 3]) {
        if x < self.width && y < self.height {
            let i = 3 * (y * self.width + x);
            self.rgb[i..i + 3].copy_from_slice(&color);
        }
    }

    /// Clipped to the canvas.
    fn fill(&mut self, x: usize, y: usize, w: usize, h: usize, color: [u8; 3]) {
        let x_end = (x + w).min(self.width);
        if x >= x_end {
            return;
        }
        for yy in y..(y + h).min(self.height) {
            let start = 3 * (yy * self.width + x);
            let end = 3 * (yy * self.width + x_end);
            for px in self.rgb[start..end].chunks_exact_mut(3) {
                px.copy_from_slice(&color);
            }
        }
    }

    /// Draws `text` inside a `w x h` box, shrinking to scale 1 when scale 2
    /// would not fit; vertically centered.
    fn text(&mut self, text: &str, x: usize, y: usize, w: usize, h: usize) {
        let scale = [2, 1]
            .into_iter()
            .find(|&s| font::text_width(text, s) <= w && font::HEIGHT * s <= h);
        let scale = match scale {
            Some(s) => s,
            None if font::HEIGHT <= h => 1,
            None => return,
        };
        let dy = (h - font::HEIGHT * scale) / 2;
        let (x_max, y_max) = (x + w, y + h);
        font::draw(text, scale, |px, py| {
            let (px, py) = (x + px, y + dy + py);
            if px < x_max && py < y_max {
                self.put(px, py, INK);
            }
        });
    }

    fn grid(&mut self, panel: &Panel, grid: &Grid, style: &RenderStyle) {
        self.fill(panel.x, panel.y, panel.width(), panel.height(), GRIDLINE);
        for (r, c) in grid.positions() {
            let (x, y) = panel.cell_origin(r, c);
            self.fill(x, y, style.cell_px, style.cell_px, style.rgb(grid.get(r, c)));
        }
    }

    fn arrow(&mut self, x0: usize, x1: usize, cy: usize) {
        if x1 <= x0 + 4 {
            return;
        }
        self.fill(x0, cy.saturating_sub(1), x1 - x0, 2, INK);
        let head = ((x1 - x0) / 3).min(6);
        for k in 0..=head {
            self.fill(x1 - k, cy.saturating_sub(k + 1), 1, 2 * k + 2, INK);
        }
    }
}

fn encode(canvas: &Canvas) -> Result<Vec<u8>, RenderError> {
    let mut bytes = Vec::new();
    let mut encoder = png::Encoder::new(&mut bytes, canvas.width as u32, canvas.height as u32);
    encoder.set_color(png::ColorType::Rgb);
    encoder.set_depth(png::BitDepth::Eight);
    encoder.set_compression(png::Compression::Fast);
    let mut writer = encoder.write_header()?;
    writer.write_image_data(&canvas.rgb)?;
    writer.finish()?;
    Ok(bytes)
}

/// Raw RGB pixels of the rendered image, row-major.
pub fn render_rgb(task: &Task, style: &RenderStyle) -> Result<(Layout, Vec<u8>), RenderError> {
    let layout = layout(task, style)?;
    if layout.width > MAX_SIDE_PX || layout.height > MAX_SIDE_PX {
        return Err(RenderError::RenderOverflow {
            width: layout.width,
            height: layout.height,
        });
    }
    let mut canvas = Canvas::new(layout.width, layout.height);
    let m = style.margin_px;
    let strip = style.label_strip_px;
    let annotation = style.annotation_px();
    for (row, (input, output)) in layout.rows.iter().zip(rows_of(task, style)) {
        let label_y = row.top;
        let annot_y = row.input.y + row.grid_height;
        canvas.text("Input", layout.input_x, label_y, layout.input_width + m, strip);
        canvas.text("Output", layout.output_x, label_y, layout.output_width.max(1) + m, strip);
        canvas.grid(&row.input, input, style);
        if annotation > 0 {
            let shape = format!("{} x {}", input.rows(), input.cols());
            canvas.text(&shape, layout.input_x, annot_y, layout.input_width + m, annotation);
        }
        match (row.output, output) {
            (Some(panel), Some(grid)) => {
                canvas.grid(&panel, grid, style);
                if annotation > 0 {
                    let shape = format!("{} x {}", grid.rows(), grid.cols());
                    canvas.text(&shape, layout.output_x, annot_y, layout.output_width + m, annotation);
                }
            }
            _ => {
                let w = layout.output_width.max(font::text_width("?", 2));
                canvas.text("?", layout.output_x, row.input.y, w, row.grid_height);
            }
        }
        let cy = row.input.y + row.grid_height / 2;
        canvas.arrow(layout.input_x + layout.input_width + m / 2, layout.output_x - m / 2, cy);
    }
    Ok((layout, canvas.rgb))
}

pub fn render_task(task: &Task, style: &RenderStyle) -> Result<Vec<u8>, RenderError> {
    let (layout, rgb) = render_rgb(task, style)?;
    encode(&Canvas {
        width: layout.width,
        height: layout.height,
        rgb,
    })
}

/// Renders straight to a file.
pub fn write_png(task: &Task, style: &RenderStyle, path: &std::path::Path) -> io::Result<()> {
    let bytes = render_task(task, style).map_err(io::Error::other)?;
    std::fs::write(path, bytes)
}
