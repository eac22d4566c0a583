//! Parsing of `--generate` recipe strings and complex-number literals.
//!
//! A recipe is a comma-separated list of `key=value` entries, e.g.
//!
//! ```text
//! n=200,m=2,p=2,poles=-0.05+2i;-0.1+30i,decay=0.8,bg-re=3:30,bg-coupling=0.02
//! ```
//!
//! Keys: `n`, `m`, `p` (dimensions), `poles` (semicolon-separated complex
//! placements), `coupling`, `decay`, `bg-re`, `bg-im` (ranges `lo:hi`),
//! `bg-coupling`, `e-diag` (range, switches E to a block diagonal), and the
//! bare flag `ones` (all-ones B and C).

use dompole::system::SpectrumRecipe;
use num_complex::Complex64;

/// Parse `-1+5i`, `2.5-0.3i`, `3`, `-i`, `0.7i`.
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty complex literal".into());
    }
    if !s.ends_with('i') {
        return s
            .parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| format!("bad real literal '{text}'"));
    }
    let body = &s[..s.len() - 1];
    // split at the sign that separates the real and imaginary parts, if any
    let mut split = None;
    for (k, ch) in body.char_indices().skip(1) {
        if (ch == '+' || ch == '-') && !matches!(&body[k - 1..k], "e" | "E") {
            split = Some(k);
        }
    }
    match split {
        Some(k) => {
            let re: f64 = body[..k]
                .parse()
                .map_err(|_| format!("bad real part in '{text}'"))?;
            let im_text = &body[k..];
            let im: f64 = match im_text {
                "+" => 1.0,
                "-" => -1.0,
                _ => im_text
                    .parse()
                    .map_err(|_| format!("bad imaginary part in '{text}'"))?,
            };
            Ok(Complex64::new(re, im))
        }
        None => {
            let im: f64 = match body {
                "" | "+" => 1.0,
                "-" => -1.0,
                _ => body
                    .parse()
                    .map_err(|_| format!("bad imaginary part in '{text}'"))?,
            };
            Ok(Complex64::new(0.0, im))
        }
    }
}

fn parse_range(value: &str, key: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = value.split(':').collect();
    if parts.len() != 2 {
        return Err(format!("{key} expects lo:hi, got '{value}'"));
    }
    let lo = parts[0]
        .parse::<f64>()
        .map_err(|_| format!("bad number in {key}"))?;
    let hi = parts[1]
        .parse::<f64>()
        .map_err(|_| format!("bad number in {key}"))?;
    Ok((lo, hi))
}

/// Dimensions plus spectrum recipe parsed from a `--generate` string.
#[derive(Debug, Clone)]
pub struct GeneratorSpec {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub recipe: SpectrumRecipe,
}

pub fn parse_generator_spec(text: &str) -> Result<GeneratorSpec, String> {
    let mut n = None;
    let mut m = 1usize;
    let mut p = 1usize;
    let mut recipe = SpectrumRecipe::default();
    for raw in text.split(',') {
        let entry = raw.trim();
        if entry.is_empty() {
            continue;
        }
        let (key, value) = match entry.split_once('=') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => (entry, ""),
        };
        match key {
            "n" => n = Some(value.parse().map_err(|_| format!("bad n '{value}'"))?),
            "m" => m = value.parse().map_err(|_| format!("bad m '{value}'"))?,
            "p" => p = value.parse().map_err(|_| format!("bad p '{value}'"))?,
            "poles" => {
                recipe.placed = value
                    .split(';')
                    .filter(|s| !s.trim().is_empty())
                    .map(parse_complex)
                    .collect::<Result<Vec<_>, _>>()?;
            }
            "coupling" => {
                recipe.placed_coupling =
                    value.parse().map_err(|_| format!("bad coupling '{value}'"))?
            }
            "decay" => {
                recipe.placed_decay = value.parse().map_err(|_| format!("bad decay '{value}'"))?
            }
            "bg-re" => recipe.background_real = parse_range(value, key)?,
            "bg-im" => recipe.background_imag = parse_range(value, key)?,
            "bg-coupling" => {
                recipe.background_coupling = value
                    .parse()
                    .map_err(|_| format!("bad bg-coupling '{value}'"))?
            }
            "e-diag" => recipe.diagonal_e = Some(parse_range(value, key)?),
            "ones" => recipe.ones_coupling = true,
            other => return Err(format!("unknown recipe key '{other}'")),
        }
    }
    let n = n.ok_or("recipe must set n")?;
    Ok(GeneratorSpec { n, m, p, recipe })
}

/// `lo:hi:count:log|lin` grid specification.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub logarithmic: bool,
}

impl GridSpec {
    pub fn parse(text: &str) -> Result<GridSpec, String> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 4 {
            return Err(format!("grid expects lo:hi:count:log|lin, got '{text}'"));
        }
        let lo = parts[0].parse::<f64>().map_err(|_| "bad grid lo")?;
        let hi = parts[1].parse::<f64>().map_err(|_| "bad grid hi")?;
        let count = parts[2].parse::<usize>().map_err(|_| "bad grid count")?;
        let logarithmic = match parts[3] {
            "log" => true,
            "lin" => false,
            other => return Err(format!("grid kind must be log or lin, got '{other}'")),
        };
        if count < 2 {
            return Err("grid count must be at least 2".into());
        }
        Ok(GridSpec {
            lo,
            hi,
            count,
            logarithmic,
        })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.logarithmic {
            dompole::transfer::log_grid(self.lo.max(f64::MIN_POSITIVE), self.hi, self.count)
        } else {
            dompole::transfer::linear_grid(self.lo, self.hi, self.count)
        }
    }
}
