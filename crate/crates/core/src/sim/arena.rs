use crate::geometry::{Point, Rect};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;
use sha2::{Digest, Sha256};

use super::BODY_RADIUS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PatchColor {
    Black,
    White,
}

impl PatchColor {
    pub fn as_str(self) -> &'static str {
        match self {
            PatchColor::Black => "black",
            PatchColor::White => "white",
        }
    }
}

/// Color seen by the ground sensor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroundColor {
    Black,
    White,
    Gray,
}

impl GroundColor {
    /// One-hot encoding in (black, white, gray) order.
    pub fn one_hot(self) -> [f64; 3] {
        match self {
            GroundColor::Black => [1.0, 0.0, 0.0],
            GroundColor::White => [0.0, 1.0, 0.0],
            GroundColor::Gray => [0.0, 0.0, 1.0],
        }
    }
}

impl From<PatchColor> for GroundColor {
    fn from(c: PatchColor) -> Self {
        match c {
            PatchColor::Black => GroundColor::Black,
            PatchColor::White => GroundColor::White,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Patch {
    pub rect: Rect,
    pub color: PatchColor,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ArenaError {
    #[error("arena dimensions must be positive and finite")]
    BadSize,
    #[error("{what} #{index} lies outside the arena")]
    OutOfBounds { what: &'static str, index: usize },
    #[error("patches #{0} and #{1} overlap")]
    PatchOverlap(usize, usize),
    #[error("arena has no spawn zone")]
    NoSpawnZone,
    #[error("spawn zone #{0} cannot hold a robot body")]
    SpawnZoneTooNarrow(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Static layout of the rectangular arena.
#[derive(Clone, Debug, PartialEq)]
pub struct ArenaSpec {
    pub width: f64,
    pub height: f64,
    pub walls: Vec<Rect>,
    pub patches: Vec<Patch>,
    pub spawn_zones: Vec<Rect>,
}

impl ArenaSpec {
    /// Empty arena whose only spawn zone is the whole floor.
    pub fn empty(width: f64, height: f64) -> Self {
        Self {
            width,
            height,
            walls: Vec::new(),
            patches: Vec::new(),
            spawn_zones: alloc::vec![Rect::new(0.0, 0.0, width, height)],
        }
    }

    pub fn bounds(&self) -> Rect {
        Rect::new(0.0, 0.0, self.width, self.height)
    }

    pub fn center(&self) -> Point {
        Point::new(0.5 * self.width, 0.5 * self.height)
    }

    pub fn validate(&self) -> Result<(), ArenaError> {
        if !(self.width.is_finite() && self.height.is_finite() && self.width > 0.0 && self.height > 0.0) {
            return Err(ArenaError::BadSize);
        }
        let bounds = self.bounds();
        let check = |what, rects: &mut dyn Iterator<Item = Rect>| {
            for (index, r) in rects.enumerate() {
                if !bounds.contains_rect(&r) {
                    return Err(ArenaError::OutOfBounds { what, index });
                }
            }
            Ok(())
        };
        check("wall", &mut self.walls.iter().copied())?;
        check("patch", &mut self.patches.iter().map(|p| p.rect))?;
        check("spawn zone", &mut self.spawn_zones.iter().copied())?;
        for i in 0..self.patches.len() {
            for j in i + 1..self.patches.len() {
                if self.patches[i].rect.overlaps(&self.patches[j].rect) {
                    return Err(ArenaError::PatchOverlap(i, j));
                }
            }
        }
        if self.spawn_zones.is_empty() {
            return Err(ArenaError::NoSpawnZone);
        }
        for (i, z) in self.spawn_zones.iter().enumerate() {
            if z.width() < 2.0 * BODY_RADIUS || z.height() < 2.0 * BODY_RADIUS {
                return Err(ArenaError::SpawnZoneTooNarrow(i));
            }
        }
        Ok(())
    }

    /// Index of the patch under `p`, first match in list order.
    pub fn patch_at(&self, p: Point) -> Option<usize> {
        self.patches.iter().position(|patch| patch.rect.contains(p))
    }

    pub fn ground_color(&self, p: Point) -> GroundColor {
        self.patch_at(p)
            .map(|i| self.patches[i].color.into())
            .unwrap_or(GroundColor::Gray)
    }

    /// Canonical line-oriented text form. `parse` inverts it exactly.
    ///
    /// ```text
    /// arena 1
    /// size <width> <height>
    /// wall <x0> <y0> <x1> <y1>
    /// patch <black|white> <x0> <y0> <x1> <y1>
    /// spawn <x0> <y0> <x1> <y1>
    /// ```
    pub fn to_text(&self) -> String {
        let mut out = String::from("arena 1\n");
        let _ = writeln!(out, "size {} {}", self.width, self.height);
        for w in &self.walls {
            let _ = writeln!(out, "wall {}", rect_fields(w));
        }
        for p in &self.patches {
            let _ = writeln!(out, "patch {} {}", p.color.as_str(), rect_fields(&p.rect));
        }
        for z in &self.spawn_zones {
            let _ = writeln!(out, "spawn {}", rect_fields(z));
        }
        out
    }

    /// Parses the text form. Blank lines and `#` comments are ignored.
    /// The result is validated.
    pub fn parse(text: &str) -> Result<Self, ArenaError> {
        let mut size = None;
        let mut header = false;
        let mut arena = ArenaSpec {
            width: 0.0,
            height: 0.0,
            walls: Vec::new(),
            patches: Vec::new(),
            spawn_zones: Vec::new(),
        };
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let err = |message: String| ArenaError::Parse { line, message };
            let mut parts = body.split_whitespace();
            let key = parts.next().unwrap_or("");
            let rest: Vec<&str> = parts.collect();
            if !header {
                if key != "arena" || rest != ["1"] {
                    return Err(err("expected header `arena 1`".into()));
                }
                header = true;
                continue;
            }
            match key {
                "size" => {
                    let v = numbers(&rest, 2).map_err(err)?;
                    size = Some((v[0], v[1]));
                }
                "wall" => arena.walls.push(rect_from(&rest).map_err(err)?),
                "spawn" => arena.spawn_zones.push(rect_from(&rest).map_err(err)?),
                "patch" => {
                    let color = match rest.first().copied() {
                        Some("black") => PatchColor::Black,
                        Some("white") => PatchColor::White,
                        other => return Err(err(format!("unknown patch color {other:?}"))),
                    };
                    arena.patches.push(Patch {
                        rect: rect_from(&rest[1..]).map_err(err)?,
                        color,
                    });
                }
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        if !header {
            return Err(ArenaError::Parse {
                line: 0,
                message: "empty arena document".into(),
            });
        }
        let (w, h) = size.ok_or(ArenaError::Parse {
            line: 0,
            message: "missing `size` line".into(),
        })?;
        arena.width = w;
        arena.height = h;
        arena.validate()?;
        Ok(arena)
    }

    /// Hex SHA-256 of the canonical text.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.to_text().as_bytes());
        let mut out = String::with_capacity(64);
        for b in hash.iter() {
            let _ = write!(out, "{b:02x}");
        }
        out
    }
}

fn rect_fields(r: &Rect) -> String {
    format!("{} {} {} {}", r.min.x, r.min.y, r.max.x, r.max.y)
}

fn numbers(fields: &[&str], n: usize) -> Result<Vec<f64>, String> {
    if fields.len() != n {
        return Err(format!("expected {n} numbers, found {}", fields.len()));
    }
    fields
        .iter()
        .map(|f| match f.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(format!("invalid number `{f}`")),
        })
        .collect()
}

fn rect_from(fields: &[&str]) -> Result<Rect, String> {
    let v = numbers(fields, 4)?;
    Ok(Rect::new(v[0], v[1], v[2], v[3]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ArenaSpec {
        let mut a = ArenaSpec::empty(4.0, 4.0);
        a.walls.push(Rect::new(1.0, 3.0, 3.0, 3.1));
        a.patches.push(Patch {
            rect: Rect::new(0.2, 1.5, 1.2, 2.5),
            color: PatchColor::White,
        });
        a.patches.push(Patch {
            rect: Rect::new(2.8, 1.5, 3.8, 2.5),
            color: PatchColor::Black,
        });
        a.spawn_zones = alloc::vec![Rect::new(1.4, 1.4, 2.6, 2.6)];
        a
    }

    #[test]
    fn text_round_trip() {
        let a = sample();
        let text = a.to_text();
        let b = ArenaSpec::parse(&text).unwrap();
        assert_eq!(a, b);
        assert_eq!(text, b.to_text());
        assert_eq!(a.digest(), b.digest());
        assert_eq!(a.digest().len(), 64);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# my arena\narena 1\n\nsize 4 4  # meters\nspawn 0 0 4 4\n";
        let a = ArenaSpec::parse(text).unwrap();
        assert_eq!(a, ArenaSpec::empty(4.0, 4.0));
    }

    #[test]
    fn rejects_out_of_bounds_and_overlap() {
        let mut a = sample();
        a.walls.push(Rect::new(3.5, 3.5, 4.5, 4.0));
        assert!(matches!(a.validate(), Err(ArenaError::OutOfBounds { what: "wall", .. })));

        let mut a = sample();
        a.patches.push(Patch {
            rect: Rect::new(1.0, 2.0, 2.0, 3.0),
            color: PatchColor::Black,
        });
        assert_eq!(a.validate(), Err(ArenaError::PatchOverlap(0, 2)));

        let mut a = sample();
        a.spawn_zones.clear();
        assert_eq!(a.validate(), Err(ArenaError::NoSpawnZone));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = ArenaSpec::parse("arena 1\nsize 4 4\nwall 0 0 1\n").unwrap_err();
        assert!(matches!(e, ArenaError::Parse { line: 3, .. }));
        assert!(ArenaSpec::parse("size 4 4\n").is_err());
        assert!(ArenaSpec::parse("arena 1\nsize 4 NaN\nspawn 0 0 1 1\n").is_err());
    }

    #[test]
    fn ground_color_lookup() {
        let a = sample();
        assert_eq!(a.ground_color(Point::new(0.7, 2.0)), GroundColor::White);
        assert_eq!(a.ground_color(Point::new(3.3, 2.0)), GroundColor::Black);
        assert_eq!(a.ground_color(Point::new(2.0, 2.0)), GroundColor::Gray);
    }
}
