use std::collections::BTreeMap;
use std::path::Path;
use std::sync::OnceLock;

use crate::centers::expr::TrilinearExpr;
use crate::centers::trilinear_to_cartesian;
use crate::conic::Point2;
use crate::error::{GeometryError, Result};
use crate::triangle::Triangle;

/// Centers that must be present in the built-in table.
pub const REQUIRED_CENTERS: [u32; 48] = [
    1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 20, 35, 36, 39, 40, 55, 56, 57, 63,
    65, 72, 78, 79, 80, 84, 88, 90, 99, 100, 104, 110, 119, 140, 142, 144, 145, 149, 153, 165,
    190, 191, 200,
];

const BUILTIN: &str = include_str!("registry.txt");

#[derive(Debug, Clone, PartialEq)]
pub struct CenterSpec {
    pub k: u32,
    pub name: String,
    pub trilinear: TrilinearExpr,
}

impl CenterSpec {
    pub fn trilinears(&self, t: &Triangle) -> Result<[f64; 3]> {
        self.trilinear.trilinears(t.sides())
    }

    pub fn eval(&self, t: &Triangle) -> Result<Point2> {
        let [u, v, w] = self.trilinears(t)?;
        trilinear_to_cartesian(t, u, v, w)
    }
}

/// Immutable table of centers keyed by Kimberling index.
#[derive(Debug, Clone, Default)]
pub struct CenterRegistry {
    specs: BTreeMap<u32, CenterSpec>,
}

impl CenterRegistry {
    /// The built-in table.
    pub fn builtin() -> Self {
        let mut reg = Self::default();
        reg.extend_from_str(BUILTIN)
            .expect("built-in center table parses");
        reg
    }

    /// Built-in table plus (or overridden by) the entries of `path`.
    pub fn with_extension_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GeometryError::Parse(format!("{}: {e}", path.display())))?;
        let mut reg = Self::builtin();
        reg.extend_from_str(&text)?;
        Ok(reg)
    }

    /// Parses lines `k, name, expression`; blank lines and `#` comments are skipped.
    pub fn extend_from_str(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.splitn(3, ',');
            let (Some(k), Some(name), Some(expr)) = (parts.next(), parts.next(), parts.next())
            else {
                return Err(GeometryError::Parse(format!(
                    "line {}: expected `k, name, expression`",
                    lineno + 1
                )));
            };
            let k: u32 = k.trim().trim_start_matches(['X', 'x']).parse().map_err(|_| {
                GeometryError::Parse(format!("line {}: bad index `{}`", lineno + 1, k.trim()))
            })?;
            let trilinear = TrilinearExpr::parse(expr.trim())
                .map_err(|e| GeometryError::Parse(format!("line {}: {e}", lineno + 1)))?;
            self.specs.insert(
                k,
                CenterSpec {
                    k,
                    name: name.trim().to_string(),
                    trilinear,
                },
            );
        }
        Ok(())
    }

    pub fn get(&self, k: u32) -> Result<&CenterSpec> {
        self.specs.get(&k).ok_or(GeometryError::UnknownCenter(k))
    }

    pub fn contains(&self, k: u32) -> bool {
        self.specs.contains_key(&k)
    }

    pub fn indices(&self) -> impl Iterator<Item = u32> + '_ {
        self.specs.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn center(&self, t: &Triangle, k: u32) -> Result<Point2> {
        self.get(k)?.eval(t)
    }
}

/// Shared instance of [`CenterRegistry::builtin`].
pub fn default_registry() -> &'static CenterRegistry {
    static REGISTRY: OnceLock<CenterRegistry> = OnceLock::new();
    REGISTRY.get_or_init(CenterRegistry::builtin)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn required_set_present() {
        let reg = CenterRegistry::builtin();
        for k in REQUIRED_CENTERS {
            assert!(reg.contains(k), "X{k} missing");
        }
    }

    #[test]
    fn extension_overrides_and_adds() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("extra.txt");
        std::fs::write(&path, "# extra\n6, symmedian again, s1\nX513, test center, b-c\n").unwrap();
        let reg = CenterRegistry::with_extension_file(&path).unwrap();
        assert_eq!(reg.get(6).unwrap().name, "symmedian again");
        assert_eq!(reg.get(513).unwrap().trilinear.source(), "b-c");
        assert_eq!(reg.len(), CenterRegistry::builtin().len() + 1);
    }

    #[test]
    fn malformed_lines_rejected() {
        let mut reg = CenterRegistry::default();
        assert!(reg.extend_from_str("1, only two").is_err());
        assert!(reg.extend_from_str("k, name, 1").is_err());
        assert!(reg.extend_from_str("1, name, 1 +").is_err());
    }
}
