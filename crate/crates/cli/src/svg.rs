//! Lozenge tiling of a particle configuration.
//!
//! Lattice coordinates (y, m): horizontal lines m = 0..M, unit triangles of
//! horizontal side 2. In the strip between lines m and m+1 the triangle at y
//! points up when y + m is odd. A particle y on line m is the vertical
//! lozenge made of the down triangle at y below line m and the up triangle at
//! y above it; every other triangle pairs with a horizontal neighbour.

use std::fmt::Write as _;

use wallgrowth::ParticleConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TileKind {
    Particle,
    /// Up triangle followed by the down triangle to its right.
    LeanRight,
    /// Down triangle followed by the up triangle to its right.
    LeanLeft,
    /// Unpaired triangle on the wall or the right cut.
    Edge,
}

impl TileKind {
    pub fn name(self) -> &'static str {
        match self {
            TileKind::Particle => "particle",
            TileKind::LeanRight => "lean-right",
            TileKind::LeanLeft => "lean-left",
            TileKind::Edge => "edge",
        }
    }

    fn fill(self) -> &'static str {
        match self {
            TileKind::Particle => "#d1495b",
            TileKind::LeanRight => "#edae49",
            TileKind::LeanLeft => "#00798c",
            TileKind::Edge => "#d9d9d9",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tile {
    pub kind: TileKind,
    pub vertices: Vec<(i64, i64)>,
}

fn is_up(y: i64, m: i64) -> bool {
    (y + m).rem_euclid(2) == 1
}

fn single(y: i64, m: i64) -> Tile {
    let vertices = if is_up(y, m) {
        vec![(y - 1, m), (y + 1, m), (y, m + 1)]
    } else {
        vec![(y - 1, m + 1), (y, m), (y + 1, m + 1)]
    };
    Tile { kind: TileKind::Edge, vertices }
}

fn pair(y: i64, m: i64) -> Tile {
    if is_up(y, m) {
        Tile { kind: TileKind::LeanRight, vertices: vec![(y - 1, m), (y + 1, m), (y + 2, m + 1), (y, m + 1)] }
    } else {
        Tile { kind: TileKind::LeanLeft, vertices: vec![(y, m), (y + 2, m), (y + 1, m + 1), (y - 1, m + 1)] }
    }
}

/// Rightmost triangle position drawn in every strip.
pub fn width(cfg: &ParticleConfig) -> i64 {
    let top = cfg.rows().iter().flatten().copied().max().unwrap_or(0);
    (top + 2).max(cfg.levels() as i64)
}

pub fn tiles(cfg: &ParticleConfig) -> Vec<Tile> {
    let levels = cfg.levels() as i64;
    let w = width(cfg);
    let mut out = Vec::new();
    for (i, row) in cfg.rows().iter().enumerate() {
        let m = i as i64 + 1;
        for &y in row {
            let vertices = if m == levels {
                vec![(y - 1, m), (y, m - 1), (y + 1, m)]
            } else {
                vec![(y, m - 1), (y + 1, m), (y, m + 1), (y - 1, m)]
            };
            out.push(Tile { kind: TileKind::Particle, vertices });
        }
    }
    for m in 0..levels {
        let mut used: Vec<i64> = cfg.row(m as usize + 1).to_vec();
        if m >= 1 {
            used.extend_from_slice(cfg.row(m as usize));
        }
        used.sort_unstable();
        let first = used[0];
        let mut y = first - 2;
        while y >= 0 {
            out.push(pair(y, m));
            y -= 2;
        }
        if y == -1 {
            out.push(single(0, m));
        }
        let mut bounds = used.clone();
        bounds.push(w + 1);
        for win in bounds.windows(2) {
            let mut y = win[0] + 1;
            while y + 1 < win[1] {
                out.push(pair(y, m));
                y += 2;
            }
            if y < win[1] {
                debug_assert_eq!(win[1], w + 1, "odd gap inside strip {m}");
                out.push(single(y, m));
            }
        }
    }
    out
}

const HALF: f64 = 8.0;
const HEIGHT: f64 = 13.856406460551018;
const PAD: f64 = 4.0;

/// SVG document; a pure function of the configuration.
pub fn render(cfg: &ParticleConfig) -> String {
    let levels = cfg.levels() as f64;
    let w = width(cfg) as f64;
    let (sw, sh) = (2.0 * PAD + (w + 2.0) * HALF, 2.0 * PAD + levels * HEIGHT);
    let mut tiles = tiles(cfg);
    tiles.sort_by(|a, b| a.kind.cmp(&b.kind).then_with(|| a.vertices.cmp(&b.vertices)));
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{sw:.3}\" height=\"{sh:.3}\" viewBox=\"0 0 {sw:.3} {sh:.3}\">"
    );
    let _ = writeln!(s, "<g stroke=\"#333333\" stroke-width=\"0.5\" stroke-linejoin=\"round\">");
    for t in &tiles {
        let pts: Vec<String> = t
            .vertices
            .iter()
            .map(|&(y, m)| format!("{:.3},{:.3}", PAD + (y + 1) as f64 * HALF, PAD + (levels - m as f64) * HEIGHT))
            .collect();
        let _ = writeln!(
            s,
            "<polygon class=\"{}\" fill=\"{}\" points=\"{}\"/>",
            t.kind.name(),
            t.kind.fill(),
            pts.join(" ")
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}
