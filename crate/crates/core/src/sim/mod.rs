//! Two executors: a whole-image reference interpreter and a cycle-level
//! dataflow simulator over bounded FIFOs. Both share the pixel semantics
//! below, so their outputs must agree bit for bit.

mod dataflow;
mod reference;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::frontend::{expr, Stencil};
use crate::graph::GraphError;

pub use dataflow::{run_dataflow, run_ir, ExecMode, SimResult};
pub use reference::run_reference;

/// A row-major image of 32-bit samples.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ImageBuf {
    pub width: u32,
    pub height: u32,
    pub data: Vec<i32>,
}

impl ImageBuf {
    /// Panics unless `data.len() == width * height`.
    pub fn new(width: u32, height: u32, data: Vec<i32>) -> Self {
        assert_eq!(data.len(), width as usize * height as usize, "image data does not match its dimensions");
        ImageBuf { width, height, data }
    }

    pub fn filled(width: u32, height: u32, value: i32) -> Self {
        ImageBuf::new(width, height, alloc::vec![value; width as usize * height as usize])
    }

    pub fn get(&self, x: u32, y: u32) -> i32 {
        self.data[y as usize * self.width as usize + x as usize]
    }
}

/// Images keyed by their declared name.
pub type Images = BTreeMap<String, ImageBuf>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("no data for input image `{image}`")]
    MissingInput { image: String },
    #[error("image `{image}` is {found_w}x{found_h}, the program expects {width}x{height}")]
    DimMismatch { image: String, width: u32, height: u32, found_w: u32, found_h: u32 },
    #[error("invalid dataflow graph: {}", .0.iter().map(alloc::string::ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<GraphError>),
    #[error("deadlock at cycle {cycle}; blocked tasks: {}", blocked.join(", "))]
    Deadlock { cycle: u64, blocked: Vec<String> },
}

/// Convolution at `(x, y)` with clamp-to-edge borders. `pixel(i)` returns
/// the sample at row-major index `i`.
pub(crate) fn stencil_at(s: &Stencil, width: u32, height: u32, x: u32, y: u32, pixel: impl Fn(usize) -> i32) -> i32 {
    let r = s.radius() as i64;
    let mut acc: i32 = 0;
    for dy in -r..=r {
        let sy = (i64::from(y) + dy).clamp(0, i64::from(height) - 1) as usize;
        for dx in -r..=r {
            let c = s.coeff(dy as i32, dx as i32);
            if c == 0 {
                continue;
            }
            let sx = (i64::from(x) + dx).clamp(0, i64::from(width) - 1) as usize;
            acc = acc.wrapping_add(c.wrapping_mul(pixel(sy * width as usize + sx)));
        }
    }
    expr::div(acc, s.divisor)
}

/// Checks `inputs` against the declared input images.
pub(crate) fn check_inputs<'a>(
    declared: impl Iterator<Item = &'a str>,
    width: u32,
    height: u32,
    inputs: &Images,
) -> Result<(), SimError> {
    for name in declared {
        let img = inputs.get(name).ok_or_else(|| SimError::MissingInput { image: name.into() })?;
        if (img.width, img.height) != (width, height) {
            return Err(SimError::DimMismatch {
                image: name.into(),
                width,
                height,
                found_w: img.width,
                found_h: img.height,
            });
        }
    }
    Ok(())
}
