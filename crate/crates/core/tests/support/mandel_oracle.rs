//! Direct escape-time rendering used as the reference image.
#![allow(dead_code)]

pub struct View {
    pub width: u32,
    pub height: u32,
    pub cx: f64,
    pub cy: f64,
    pub view_w: f64,
    pub max_iter: u32,
}

pub const DEFAULT_VIEW: View = View { width: 100, height: 100, cx: -0.5, cy: 0.0, view_w: 3.0, max_iter: 100 };

fn escape_time(cr: f64, ci: f64, max_iter: u32) -> u32 {
    let (mut zr, mut zi) = (0.0f64, 0.0f64);
    for n in 0..max_iter {
        if zr * zr + zi * zi > 4.0 {
            return n;
        }
        let next_r = (zr * zr - zi * zi) + cr;
        zi = (2.0 * zr) * zi + ci;
        zr = next_r;
    }
    max_iter
}

/// Row-major escape counts. Pixel centers sit at `+0.5`; both axes use
/// the same scale `view_w / width`.
pub fn counts(v: &View) -> Vec<u32> {
    let w = f64::from(v.width);
    let h = f64::from(v.height);
    let mut out = Vec::with_capacity((v.width * v.height) as usize);
    for py in 0..v.height {
        let ci = v.cy - ((f64::from(py) + 0.5 - h / 2.0) * v.view_w) / w;
        for px in 0..v.width {
            let cr = v.cx + ((f64::from(px) + 0.5 - w / 2.0) * v.view_w) / w;
            out.push(escape_time(cr, ci, v.max_iter));
        }
    }
    out
}

pub fn ppm(v: &View, counts: &[u32]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(b"P6\n");
    out.extend_from_slice(format!("{} {}\n255\n", v.width, v.height).as_bytes());
    for c in counts {
        let g = (c * 255 / v.max_iter) as u8;
        out.extend([g, g, g]);
    }
    out
}
