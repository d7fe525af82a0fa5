//! Binary PPM (P6) snapshots: one pixel per patch, green ramp for plantoid
//! energy, agent display colors painted on top.

use std::fs;
use std::io;
use std::path::Path;

use crate::world::World;

/// Render the world as a P6 image. The green channel scales with the
/// plantoid's fill level (energy over patch capacity); patches holding
/// agents show the display color of the last agent in roster order, the
/// newest arrival on top.
pub fn render_ppm(world: &World) -> Vec<u8> {
    let w = world.width;
    let mut out = Vec::with_capacity(32 + 3 * w * w);
    out.extend_from_slice(format!("P6\n{w} {w}\n255\n").as_bytes());

    let mut pixels = vec![[0u8; 3]; w * w];
    for (i, patch) in world.patches.iter().enumerate() {
        let fill = (patch.plantoid.energy / patch.capacity).clamp(0.0, 1.0);
        pixels[i] = [0, (fill * 255.0).round() as u8, 0];
    }
    for agent in &world.agents {
        if agent.alive {
            pixels[agent.patch] = agent.display.color();
        }
    }
    for pixel in pixels {
        out.extend_from_slice(&pixel);
    }
    out
}

pub fn write_ppm(world: &World, path: &Path) -> io::Result<()> {
    fs::write(path, render_ppm(world))
}
