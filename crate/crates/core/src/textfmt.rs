//! Line-oriented text form of kernels and densities.
//!
//! ```text
//! file      := header line*
//! header    := "foxh-kernel 1" | "foxh-density 1"
//! line      := "variates" INT
//!            | "prefactor" REAL | "power_offset" REAL          (density only)
//!            | "scale" INT REAL REAL | "exponent" INT REAL      (density only)
//!            | "outer_n" INT
//!            | "outer_upper" REAL ":" REAL*
//!            | "outer_lower" REAL ":" REAL*
//!            | "variate" INT "m" INT "n" INT
//!            | "variate_upper" INT REAL REAL
//!            | "variate_lower" INT REAL REAL
//!            | "end"
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Reals are written
//! with 17 significant digits so every `f64` survives a round trip and a
//! re-serialization is byte-identical. Group entries keep their stored order,
//! so the first `n` (or `m`) entries of each group are the numerator ones.

use std::fmt::Write as _;
use std::str::SplitWhitespace;

use num_complex::Complex;

use crate::density::WeightedDensity;
use crate::error::{Error, Result};
use crate::kernel::{Coupled, FoxHKernel, Pair};
use crate::scalar::Real;

fn real<T: Real>(v: T) -> String {
    format!("{:.16e}", v.as_f64())
}

fn write_kernel<T: Real>(out: &mut String, k: &FoxHKernel<T>) {
    let coupled = |out: &mut String, tag: &str, c: &Coupled<T>| {
        let _ = write!(out, "{tag} {} :", real(c.offset));
        for w in &c.weights {
            let _ = write!(out, " {}", real(*w));
        }
        out.push('\n');
    };
    let _ = writeln!(out, "variates {}", k.variates);
    let _ = writeln!(out, "outer_n {}", k.outer.n);
    for c in &k.outer.upper {
        coupled(out, "outer_upper", c);
    }
    for c in &k.outer.lower {
        coupled(out, "outer_lower", c);
    }
    for (i, g) in k.per_variate.iter().enumerate() {
        let _ = writeln!(out, "variate {i} m {} n {}", g.m, g.n);
        for p in &g.upper {
            let _ = writeln!(
                out,
                "variate_upper {i} {} {}",
                real(p.offset),
                real(p.weight)
            );
        }
        for p in &g.lower {
            let _ = writeln!(
                out,
                "variate_lower {i} {} {}",
                real(p.offset),
                real(p.weight)
            );
        }
    }
}

pub fn kernel_to_text<T: Real>(k: &FoxHKernel<T>) -> String {
    let mut out = String::from("foxh-kernel 1\n");
    write_kernel(&mut out, k);
    out.push_str("end\n");
    out
}

pub fn density_to_text<T: Real>(d: &WeightedDensity<T>) -> String {
    let mut out = String::from("foxh-density 1\n");
    let _ = writeln!(out, "prefactor {}", real(d.prefactor));
    let _ = writeln!(out, "power_offset {}", real(d.power_offset));
    write_kernel(&mut out, &d.kernel);
    for (i, z) in d.scales.iter().enumerate() {
        let _ = writeln!(out, "scale {i} {} {}", real(z.re), real(z.im));
    }
    for (i, a) in d.exponents.iter().enumerate() {
        let _ = writeln!(out, "exponent {i} {}", real(*a));
    }
    out.push_str("end\n");
    out
}

struct Parsed<T> {
    density: bool,
    kernel: FoxHKernel<T>,
    prefactor: Option<T>,
    power_offset: Option<T>,
    scales: Vec<Option<Complex<T>>>,
    exponents: Vec<Option<T>>,
}

struct Fields<'a> {
    it: SplitWhitespace<'a>,
    line: usize,
}

impl<'a> Fields<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            msg: msg.into(),
        }
    }

    fn word(&mut self) -> Result<&'a str> {
        let line = self.line;
        self.it.next().ok_or(Error::Parse {
            line,
            msg: "missing field".into(),
        })
    }

    fn int(&mut self) -> Result<usize> {
        let w = self.word()?;
        w.parse()
            .map_err(|_| self.err(format!("expected integer, got `{w}`")))
    }

    fn real<T: Real>(&mut self) -> Result<T> {
        let w = self.word()?;
        let v: f64 = w
            .parse()
            .map_err(|_| self.err(format!("expected number, got `{w}`")))?;
        Ok(T::lit(v))
    }

    fn keyword(&mut self, k: &str) -> Result<()> {
        let w = self.word()?;
        if w == k {
            Ok(())
        } else {
            Err(self.err(format!("expected `{k}`, got `{w}`")))
        }
    }

    fn finish(&mut self) -> Result<()> {
        match self.it.next() {
            None => Ok(()),
            Some(w) => Err(self.err(format!("trailing field `{w}`"))),
        }
    }

    fn index(&mut self, m: usize) -> Result<usize> {
        let i = self.int()?;
        if i >= m {
            return Err(self.err(format!("variate index {i} out of range for {m} variates")));
        }
        Ok(i)
    }
}

fn parse<T: Real>(text: &str) -> Result<Parsed<T>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 0,
        msg: "empty descriptor".into(),
    })?;
    let density = match header {
        "foxh-kernel 1" => false,
        "foxh-density 1" => true,
        other => {
            return Err(Error::Parse {
                line: hline,
                msg: format!("unknown header `{other}`"),
            })
        }
    };
    let mut p = Parsed {
        density,
        kernel: FoxHKernel::new(0),
        prefactor: None,
        power_offset: None,
        scales: Vec::new(),
        exponents: Vec::new(),
    };
    let mut seen_variates = false;
    let mut ended = false;
    for (line, text) in lines {
        if ended {
            return Err(Error::Parse {
                line,
                msg: "content after `end`".into(),
            });
        }
        let mut f = Fields {
            it: text.split_whitespace(),
            line,
        };
        let key = f.word()?.to_string();
        if key != "variates"
            && key != "prefactor"
            && key != "power_offset"
            && key != "end"
            && !seen_variates
        {
            return Err(f.err("`variates` must precede group entries"));
        }
        let m = p.kernel.variates;
        match key.as_str() {
            "variates" => {
                if seen_variates {
                    return Err(f.err("duplicate `variates`"));
                }
                let m = f.int()?;
                p.kernel = FoxHKernel::new(m);
                p.scales = vec![None; m];
                p.exponents = vec![None; m];
                seen_variates = true;
            }
            "prefactor" | "power_offset" if density => {
                let v = f.real()?;
                let slot = if key == "prefactor" {
                    &mut p.prefactor
                } else {
                    &mut p.power_offset
                };
                if slot.replace(v).is_some() {
                    return Err(f.err(format!("duplicate `{key}`")));
                }
            }
            "outer_n" => p.kernel.outer.n = f.int()?,
            "outer_upper" | "outer_lower" => {
                let offset = f.real()?;
                f.keyword(":")?;
                let mut weights = Vec::with_capacity(m);
                for _ in 0..m {
                    weights.push(f.real()?);
                }
                let c = Coupled { offset, weights };
                if key == "outer_upper" {
                    p.kernel.outer.upper.push(c);
                } else {
                    p.kernel.outer.lower.push(c);
                }
            }
            "variate" => {
                let i = f.index(m)?;
                f.keyword("m")?;
                p.kernel.per_variate[i].m = f.int()?;
                f.keyword("n")?;
                p.kernel.per_variate[i].n = f.int()?;
            }
            "variate_upper" | "variate_lower" => {
                let i = f.index(m)?;
                let pair = Pair::new(f.real()?, f.real()?);
                if key == "variate_upper" {
                    p.kernel.per_variate[i].upper.push(pair);
                } else {
                    p.kernel.per_variate[i].lower.push(pair);
                }
            }
            "scale" if density => {
                let i = f.index(m)?;
                p.scales[i] = Some(Complex::new(f.real()?, f.real()?));
            }
            "exponent" if density => {
                let i = f.index(m)?;
                p.exponents[i] = Some(f.real()?);
            }
            "end" => ended = true,
            other => return Err(f.err(format!("unknown key `{other}`"))),
        }
        f.finish()?;
    }
    if !ended {
        return Err(Error::Parse {
            line: text.lines().count(),
            msg: "missing `end`".into(),
        });
    }
    if !seen_variates {
        return Err(Error::Parse {
            line: hline,
            msg: "missing `variates`".into(),
        });
    }
    Ok(p)
}

pub fn parse_kernel<T: Real>(text: &str) -> Result<FoxHKernel<T>> {
    let p = parse::<T>(text)?;
    if p.density {
        return Err(Error::Parse {
            line: 1,
            msg: "expected a kernel, found a density".into(),
        });
    }
    let v = p.kernel.count_violations();
    if !v.is_empty() {
        return Err(Error::InvalidDescriptor(v.join("; ")));
    }
    Ok(p.kernel)
}

pub fn parse_density<T: Real>(text: &str) -> Result<WeightedDensity<T>> {
    let p = parse::<T>(text)?;
    let missing = |what: &str| Error::Parse {
        line: 0,
        msg: format!("missing {what}"),
    };
    if !p.density {
        return Err(Error::Parse {
            line: 1,
            msg: "expected a density, found a kernel".into(),
        });
    }
    let scales = p
        .scales
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| missing(&format!("scale {i}"))))
        .collect::<Result<Vec<_>>>()?;
    let exponents = p
        .exponents
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| missing(&format!("exponent {i}"))))
        .collect::<Result<Vec<_>>>()?;
    WeightedDensity::new(
        p.prefactor.ok_or_else(|| missing("prefactor"))?,
        p.power_offset.ok_or_else(|| missing("power_offset"))?,
        scales,
        exponents,
        p.kernel,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::VariateGroup;

    fn sample() -> WeightedDensity<f64> {
        let k = FoxHKernel::new(2)
            .outer_numerator(0.1, vec![0.5, 0.5])
            .outer_lower(1.0 / 3.0, vec![-1.0, 0.0])
            .with_variate(
                0,
                VariateGroup::new()
                    .lower_numerator(0.0, 0.5)
                    .lower_denominator(0.0, 0.5),
            )
            .with_variate(
                1,
                VariateGroup::new()
                    .upper_numerator(1.0, 0.25)
                    .upper_denominator(0.0, 0.25),
            );
        WeightedDensity::new(
            0.1,
            0.0,
            vec![Complex::new(2.0f64.sqrt(), 0.0), Complex::new(0.0, 1.0)],
            vec![-1.0, 0.0],
            k,
        )
        .unwrap()
    }

    #[test]
    fn density_round_trip_is_exact() {
        let d = sample();
        let text = density_to_text(&d);
        let back: WeightedDensity<f64> = parse_density(&text).unwrap();
        assert_eq!(back, d);
        assert_eq!(density_to_text(&back), text);
    }

    #[test]
    fn kernel_round_trip_is_exact() {
        let k = sample().kernel;
        let text = kernel_to_text(&k);
        assert_eq!(parse_kernel::<f64>(&text).unwrap(), k);
    }

    #[test]
    fn reports_line_of_bad_number() {
        let text = "foxh-kernel 1\nvariates 1\nvariate_lower 0 zero 1\nend\n";
        match parse_kernel::<f64>(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_key_and_missing_end() {
        assert!(parse_kernel::<f64>("foxh-kernel 1\nvariates 1\nbogus 1\nend\n").is_err());
        assert!(parse_kernel::<f64>("foxh-kernel 1\nvariates 1\n").is_err());
    }
}
