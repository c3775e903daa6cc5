//! TOML build configuration.
//!
//! Sections: `[cauchy]` (exactly one of `jet`, `abc`, `geometric`), `[grid]`,
//! and the optional `[numerics]`, `[output]`, `[family]`. Jet coefficients
//! are kept exact: integers or strings (`"1/2"`, `"0.25"`); abc data are
//! polynomial coefficient lists in t, constant term first.

use loopfront::builder::{BuildOptions, Grid};
use loopfront::builder::mesh::MeshFormat;
use loopfront::jets::JetCoeffs;
use loopfront::poly::{rat, Rat};
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub cauchy: CauchySection,
    pub grid: GridSection,
    #[serde(default)]
    pub numerics: NumericsSection,
    #[serde(default)]
    pub output: OutputSection,
    pub family: Option<FamilySection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CauchySection {
    pub jet: Option<JetSource>,
    pub abc: Option<AbcSource>,
    /// CSV of samples t, N₀ (3 columns), V = N_x (3 columns) along the
    /// diagonal; cubic interpolation in between.
    pub geometric: Option<PathBuf>,
    /// Base diagonal parameter; jets are germs at the origin and fix t0 = 0.
    #[serde(default)]
    pub t0: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JetSource {
    pub ax: Vec<RatSpec>,
    pub ay: Vec<RatSpec>,
    pub bx: Vec<RatSpec>,
    pub by: Vec<RatSpec>,
}

/// Exact rational entry: a TOML integer, a float (read back through its
/// shortest decimal form, so `0.5` means 1/2), or a string `"n/d"`,
/// `"0.25"`, `"3"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RatSpec {
    Int(i64),
    Float(f64),
    Text(String),
}

impl RatSpec {
    pub fn to_rat(&self) -> Result<Rat, String> {
        match self {
            RatSpec::Int(n) => Ok(rat(*n, 1)),
            RatSpec::Float(v) => parse_rational(&format!("{v}")),
            RatSpec::Text(s) => parse_rational(s),
        }
    }
}

/// Parse `n`, `n/d`, or a plain decimal into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rat, String> {
    let t = s.trim();
    let (sign, mag) = match t.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1, t.strip_prefix('+').unwrap_or(t)),
    };
    let err = || format!("cannot parse `{s}` as a rational (use n, n/d, or a decimal)");
    if let Some((n, d)) = mag.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| err())?;
        let d: i64 = d.trim().parse().map_err(|_| err())?;
        if d == 0 {
            return Err(format!("zero denominator in `{s}`"));
        }
        Ok(rat(sign * n, d))
    } else if let Some((ip, fp)) = mag.split_once('.') {
        if fp.is_empty() || fp.len() > 15 || !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let int_part: i64 = if ip.is_empty() { 0 } else { ip.parse().map_err(|_| err())? };
        let frac_part: i64 = fp.parse().map_err(|_| err())?;
        let den = 10i64.pow(fp.len() as u32);
        Ok(rat(sign * (int_part * den + frac_part), den))
    } else {
        let n: i64 = mag.parse().map_err(|_| err())?;
        Ok(rat(sign * n, 1))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbcSource {
    /// Coefficients of a(t), constant term first.
    pub a: Vec<f64>,
    #[serde(default)]
    pub b: Vec<f64>,
    #[serde(default)]
    pub c: Vec<f64>,
}

impl AbcSource {
    pub fn curve(coeffs: &[f64]) -> loopfront::cauchy::ScalarCurve {
        if coeffs.is_empty() {
            loopfront::cauchy::ScalarCurve::constant(0.0)
        } else {
            loopfront::cauchy::ScalarCurve::poly(coeffs.to_vec())
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub x_range: [f64; 2],
    /// Defaults to `x_range`.
    pub y_range: Option<[f64; 2]>,
    /// Nodes per axis.
    pub resolution: usize,
}

impl GridSection {
    pub fn to_grid(&self) -> Grid {
        let y = self.y_range.unwrap_or(self.x_range);
        Grid::uniform(
            (self.x_range[0], self.x_range[1]),
            self.resolution,
            (y[0], y[1]),
            self.resolution,
        )
    }

    /// Diagonal parameter interval covering both axes.
    pub fn interval(&self) -> (f64, f64) {
        let y = self.y_range.unwrap_or(self.x_range);
        (self.x_range[0].min(y[0]), self.x_range[1].max(y[1]))
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsSection {
    pub truncation: Option<usize>,
    pub circle_samples: Option<usize>,
    pub rk4_steps_per_unit: Option<usize>,
}

impl NumericsSection {
    pub fn options(&self) -> BuildOptions {
        let mut o = BuildOptions::default();
        if let Some(m) = self.truncation {
            o.truncation = m;
        }
        if let Some(n) = self.circle_samples {
            o.circle_samples = n;
        }
        if let Some(n) = self.rk4_steps_per_unit {
            o.rk4_steps_per_unit = n;
        }
        o
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub stem: String,
    pub format: MeshFormatName,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("out"),
            stem: "surface".to_string(),
            format: MeshFormatName::Obj,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeshFormatName {
    Obj,
    Ply,
    PlyBinary,
}

impl MeshFormatName {
    pub fn to_format(self) -> MeshFormat {
        match self {
            MeshFormatName::Obj => MeshFormat::Obj,
            MeshFormatName::Ply => MeshFormat::PlyAscii,
            MeshFormatName::PlyBinary => MeshFormat::PlyBinary,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            MeshFormatName::Obj => "obj",
            MeshFormatName::Ply | MeshFormatName::PlyBinary => "ply",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySection {
    /// Label for the swept parameter in file names and the events CSV.
    pub parameter: String,
    /// Which frame coefficient receives the offset.
    pub component: FamilyComponent,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyComponent {
    A,
    B,
    C,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<ConfigFile, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let cfg: ConfigFile =
            toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), String> {
        let sources = [
            self.cauchy.jet.is_some(),
            self.cauchy.abc.is_some(),
            self.cauchy.geometric.is_some(),
        ];
        if sources.iter().filter(|&&s| s).count() != 1 {
            return Err("cauchy: exactly one of `jet`, `abc`, `geometric` is required".into());
        }
        if let Some(jet) = &self.cauchy.jet {
            let n = jet.ax.len();
            if n == 0 {
                return Err("cauchy.jet.ax: at least one coefficient is required".into());
            }
            for (name, arr) in [("ay", &jet.ay), ("bx", &jet.bx), ("by", &jet.by)] {
                if arr.len() != n {
                    return Err(format!(
                        "cauchy.jet.{name}: expected {n} coefficients to match `ax`"
                    ));
                }
            }
            if self.cauchy.t0 != 0.0 {
                return Err("cauchy.t0: jet germs are based at the origin; t0 must be 0".into());
            }
        }
        if self.grid.resolution < 2 {
            return Err("grid.resolution: at least 2 nodes per axis are required".into());
        }
        for (name, r) in [
            ("x_range", Some(self.grid.x_range)),
            ("y_range", self.grid.y_range),
        ] {
            if let Some(r) = r {
                if !(r[1] > r[0]) {
                    return Err(format!("grid.{name}: range must be ascending"));
                }
            }
        }
        let (lo, hi) = self.grid.interval();
        if self.cauchy.t0 < lo || self.cauchy.t0 > hi {
            return Err(format!(
                "cauchy.t0: base parameter {} lies outside the grid interval [{lo}, {hi}]",
                self.cauchy.t0
            ));
        }
        if let Some(fam) = &self.family {
            if fam.values.is_empty() {
                return Err("family.values: at least one parameter value is required".into());
            }
            if self.cauchy.abc.is_none() {
                return Err("family: sweeps offset a frame coefficient and need an `abc` source".into());
            }
        }
        Ok(())
    }

    pub fn jet_coeffs(&self) -> Result<Option<JetCoeffs<Rat>>, String> {
        let Some(jet) = &self.cauchy.jet else {
            return Ok(None);
        };
        let conv = |name: &str, arr: &[RatSpec]| -> Result<Vec<Rat>, String> {
            arr.iter()
                .map(|r| r.to_rat().map_err(|e| format!("cauchy.jet.{name}: {e}")))
                .collect()
        };
        Ok(Some(JetCoeffs::new(
            conv("ax", &jet.ax)?,
            conv("ay", &jet.ay)?,
            conv("bx", &jet.bx)?,
            conv("by", &jet.by)?,
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_parse_exactly() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-0.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("3").unwrap(), rat(3, 1));
        assert_eq!(parse_rational("-7/3").unwrap(), rat(-7, 3));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(RatSpec::Float(0.5).to_rat().unwrap(), rat(1, 2));
        assert_eq!(RatSpec::Float(0.1).to_rat().unwrap(), rat(1, 10));
    }

    #[test]
    fn config_requires_exactly_one_source() {
        let base = r#"
            [grid]
            x_range = [-0.5, 0.5]
            resolution = 11
        "#;
        let none: Result<ConfigFile, _> =
            toml::from_str(&format!("[cauchy]\n{base}")).map_err(|e| e.to_string());
        assert!(none.unwrap().validate().is_err());

        let both = format!(
            "[cauchy.jet]\nax=[1]\nay=[1]\nbx=[1]\nby=[1]\n[cauchy.abc]\na=[0.0]\n{base}"
        );
        let cfg: ConfigFile = toml::from_str(&both).unwrap();
        assert!(cfg.validate().unwrap_err().contains("exactly one"));
    }

    #[test]
    fn unknown_keys_are_rejected_by_name() {
        let text = r#"
            [cauchy.abc]
            a = [0.0]
            [grid]
            x_range = [-0.5, 0.5]
            resolution = 11
            typo_key = 3
        "#;
        let err = toml::from_str::<ConfigFile>(text).unwrap_err().to_string();
        assert!(err.contains("typo_key"), "{err}");
    }
}
