//! Font discovery. `ORTHOPRIME_FONT_DIR` is searched first, then system font
//! directories; DejaVu Sans is bundled as the fallback and prime face.

use std::fmt;
use std::path::{Path, PathBuf};

use ab_glyph::{Font, FontArc};

use super::RenderError;

pub const FONT_DIR_ENV: &str = "ORTHOPRIME_FONT_DIR";
pub const MAX_FACES: usize = 10;
pub const PRIME_FACE: &str = "Arial";
const SYSTEM_DIRS: &[&str] = &["/usr/share/fonts", "/usr/local/share/fonts"];
static BUNDLED: &[u8] = include_bytes!("../../assets/DejaVuSans.ttf");

#[derive(Clone)]
pub struct FontFace {
    pub name: String,
    pub(crate) font: FontArc,
}

impl fmt::Debug for FontFace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FontFace").field("name", &self.name).finish()
    }
}

impl FontFace {
    pub fn bundled() -> Self {
        Self { name: "DejaVuSans".into(), font: FontArc::try_from_slice(BUNDLED).expect("bundled font parses") }
    }

    pub fn load(path: &Path) -> Result<Self, RenderError> {
        let err = |m: String| RenderError::FontLoad { path: path.display().to_string(), message: m };
        let data = std::fs::read(path).map_err(|e| err(e.to_string()))?;
        let font = FontArc::try_from_vec(data).map_err(|e| err(e.to_string()))?;
        let name = path.file_stem().map_or_else(|| "font".into(), |s| s.to_string_lossy().into_owned());
        let face = Self { name, font };
        face.check_alphabet()?;
        Ok(face)
    }

    /// Every upper-case Latin letter must have a glyph.
    pub fn check_alphabet(&self) -> Result<(), RenderError> {
        for ch in 'A'..='Z' {
            if self.font.glyph_id(ch).0 == 0 {
                return Err(RenderError::MissingGlyph { ch, font: self.name.clone() });
            }
        }
        Ok(())
    }
}

fn font_files(dir: &Path, out: &mut Vec<PathBuf>) {
    let Ok(entries) = std::fs::read_dir(dir) else { return };
    let mut entries: Vec<PathBuf> = entries.filter_map(|e| e.ok().map(|e| e.path())).collect();
    entries.sort();
    for p in entries {
        if p.is_dir() {
            font_files(&p, out);
        } else if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("ttf") || e.eq_ignore_ascii_case("otf")) {
            out.push(p);
        }
    }
}

fn search_dirs() -> Vec<PathBuf> {
    let mut dirs: Vec<PathBuf> = std::env::var_os(FONT_DIR_ENV).map(PathBuf::from).into_iter().collect();
    dirs.extend(SYSTEM_DIRS.iter().map(PathBuf::from));
    dirs
}

/// Up to `MAX_FACES` usable faces from the given directories, in path order.
pub fn discover_in(dirs: &[PathBuf]) -> Vec<FontFace> {
    let mut files = Vec::new();
    for d in dirs {
        font_files(d, &mut files);
    }
    let mut faces: Vec<FontFace> = Vec::new();
    for f in files {
        if faces.len() == MAX_FACES {
            break;
        }
        if let Ok(face) = FontFace::load(&f) {
            if !faces.iter().any(|g| g.name == face.name) {
                faces.push(face);
            }
        }
    }
    faces
}

/// Training faces: discovered fonts, or the bundled face if none are found.
pub fn discover_fonts() -> Vec<FontFace> {
    let faces = discover_in(&search_dirs());
    if faces.is_empty() {
        vec![FontFace::bundled()]
    } else {
        faces
    }
}

/// Arial from `ORTHOPRIME_FONT_DIR` when present, otherwise the bundled face.
pub fn prime_font() -> FontFace {
    if let Some(dir) = std::env::var_os(FONT_DIR_ENV) {
        let mut files = Vec::new();
        font_files(Path::new(&dir), &mut files);
        for f in files {
            let stem = f.file_stem().map(|s| s.to_string_lossy().to_ascii_lowercase());
            if stem.as_deref() == Some("arial") {
                if let Ok(face) = FontFace::load(&f) {
                    return face;
                }
            }
        }
    }
    FontFace::bundled()
}
