// SPDX-License-Identifier: Apache-2.0

//! Plain-text system files. See `docs/system_format.md` for the grammar.

use super::{DipoleBlock, Level, NoiseChannel, Particle, SystemSpec};
use crate::error::{Error, Result};
use crate::units::Constants;
use ndarray::Array2;
use num_complex::Complex64;
use std::fmt::Write as _;
use std::path::Path;

struct Section {
    line: usize,
    name: String,
    args: Vec<String>,
    rows: Vec<(usize, Vec<String>)>,
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn num(line: usize, tok: &str) -> Result<f64> {
    tok.parse::<f64>().map_err(|_| perr(line, format!("`{tok}` is not a number")))
}

fn axis(line: usize, tok: &str) -> Result<usize> {
    match tok {
        "0" | "x" => Ok(0),
        "1" | "y" => Ok(1),
        "2" | "z" => Ok(2),
        _ => Err(perr(line, format!("`{tok}` is not an axis (x, y, z or 0, 1, 2)"))),
    }
}

fn matrix(sec: &Section, n: usize) -> Result<Array2<Complex64>> {
    if sec.rows.len() != n {
        return Err(perr(sec.line, format!("[{}] needs {n} rows, found {}", sec.name, sec.rows.len())));
    }
    let mut m = Array2::zeros((n, n));
    for (r, (line, toks)) in sec.rows.iter().enumerate() {
        if toks.len() != 2 * n {
            return Err(perr(*line, format!("expected {} numbers (re im pairs), found {}", 2 * n, toks.len())));
        }
        for c in 0..n {
            m[[r, c]] = Complex64::new(num(*line, &toks[2 * c])?, num(*line, &toks[2 * c + 1])?);
        }
    }
    Ok(m)
}

fn split_sections(text: &str) -> Result<Vec<Section>> {
    let mut out: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let inner = rest.strip_suffix(']').ok_or_else(|| perr(line, "unterminated section header"))?;
            let mut toks = inner.split_whitespace().map(str::to_string);
            let name = toks.next().ok_or_else(|| perr(line, "empty section header"))?;
            out.push(Section { line, name, args: toks.collect(), rows: Vec::new() });
        } else {
            let sec = out.last_mut().ok_or_else(|| perr(line, "data before the first section"))?;
            let toks = if content.contains('=') {
                content.splitn(2, '=').map(|t| t.trim().to_string()).collect()
            } else {
                content.split_whitespace().map(str::to_string).collect()
            };
            sec.rows.push((line, toks));
        }
    }
    Ok(out)
}

/// Parses and validates a system description.
pub fn parse_system(text: &str) -> Result<SystemSpec> {
    let sections = split_sections(text)?;
    let levels_sec = sections
        .iter()
        .find(|s| s.name == "levels")
        .ok_or_else(|| perr(1, "missing [levels] section"))?;
    let mut levels = Vec::new();
    for (line, toks) in &levels_sec.rows {
        match toks.as_slice() {
            [label, e] => levels.push(Level { label: label.clone(), energy: num(*line, e)?, edge: false }),
            [label, e, flag] if flag == "edge" => {
                levels.push(Level { label: label.clone(), energy: num(*line, e)?, edge: true })
            }
            _ => return Err(perr(*line, "expected `label energy [edge]`")),
        }
    }
    let n = levels.len();
    if n == 0 {
        return Err(perr(levels_sec.line, "[levels] is empty"));
    }

    let mut spec = SystemSpec {
        levels,
        widths: vec![0.0; n],
        noise_couplings: Vec::new(),
        dipole: Vec::new(),
        radiation: None,
        particles: Vec::new(),
        constants: Constants::reduced(),
        initial_state: 0,
    };
    let mut channels: Vec<(usize, NoiseChannel)> = Vec::new();
    let mut radiation: [Option<Array2<Complex64>>; 3] = [None, None, None];
    let mut seen = std::collections::HashSet::new();

    for sec in &sections {
        let key = format!("{} {}", sec.name, sec.args.join(" "));
        if !seen.insert(key.clone()) {
            return Err(perr(sec.line, format!("duplicate section [{}]", key.trim())));
        }
        match sec.name.as_str() {
            "levels" => {}
            "widths" => {
                let vals: Vec<f64> = sec
                    .rows
                    .iter()
                    .flat_map(|(l, t)| t.iter().map(move |x| (*l, x)))
                    .map(|(l, x)| num(l, x))
                    .collect::<Result<_>>()?;
                if vals.len() != n {
                    return Err(perr(sec.line, format!("[widths] has {} values for {n} levels", vals.len())));
                }
                spec.widths = vals;
            }
            "noise_coupling" => {
                let idx: usize = sec
                    .args
                    .first()
                    .ok_or_else(|| perr(sec.line, "noise_coupling needs a channel index"))?
                    .parse()
                    .map_err(|_| perr(sec.line, "channel index must be a non-negative integer"))?;
                let unit = sec.args.get(1).cloned().unwrap_or_else(|| "unspecified".into());
                channels.push((idx, NoiseChannel { unit, matrix: matrix(sec, n)? }));
            }
            "dipole" => {
                let j = axis(sec.line, sec.args.first().map(String::as_str).unwrap_or(""))?;
                let particle = match sec.args.get(1) {
                    Some(p) => p.parse().map_err(|_| perr(sec.line, "particle index must be an integer"))?,
                    None => 0,
                };
                spec.dipole.push(DipoleBlock { direction: j, particle, matrix: matrix(sec, n)? });
            }
            "radiation" => {
                let j = axis(sec.line, sec.args.first().map(String::as_str).unwrap_or(""))?;
                radiation[j] = Some(matrix(sec, n)?);
            }
            "particles" => {
                for (line, toks) in &sec.rows {
                    match toks.as_slice() {
                        [q, m] => spec.particles.push(Particle { charge: num(*line, q)?, mass: num(*line, m)? }),
                        _ => return Err(perr(*line, "expected `charge mass`")),
                    }
                }
            }
            "constants" => {
                for (line, toks) in &sec.rows {
                    let [k, v] = toks.as_slice() else {
                        return Err(perr(*line, "expected `name = value`"));
                    };
                    let v = num(*line, v)?;
                    match k.as_str() {
                        "hbar" => spec.constants.hbar = v,
                        "c" => spec.constants.c = v,
                        "eps0" => spec.constants.eps0 = v,
                        other => return Err(perr(*line, format!("unknown constant `{other}`"))),
                    }
                }
            }
            "initial" => {
                let [(line, toks)] = sec.rows.as_slice() else {
                    return Err(perr(sec.line, "[initial] takes exactly one entry"));
                };
                let [tok] = toks.as_slice() else {
                    return Err(perr(*line, "expected a level index or label"));
                };
                spec.initial_state = match tok.parse::<usize>() {
                    Ok(i) => i,
                    Err(_) => spec
                        .levels
                        .iter()
                        .position(|l| &l.label == tok)
                        .ok_or_else(|| perr(*line, format!("unknown level `{tok}`")))?,
                };
            }
            other => return Err(perr(sec.line, format!("unknown section [{other}]"))),
        }
    }
    channels.sort_by_key(|c| c.0);
    for (expect, (idx, _)) in channels.iter().enumerate() {
        if *idx != expect {
            return Err(Error::InvariantViolation(format!("noise channels must be numbered 0.. without gaps (missing {expect})")));
        }
    }
    spec.noise_couplings = channels.into_iter().map(|c| c.1).collect();
    match radiation {
        [None, None, None] => {}
        [Some(a), Some(b), Some(c)] => spec.radiation = Some([a, b, c]),
        _ => return Err(Error::InvariantViolation("radiation override must give all three axes".into())),
    }
    spec.validate()?;
    Ok(spec)
}

pub fn load_system(path: impl AsRef<Path>) -> Result<SystemSpec> {
    parse_system(&std::fs::read_to_string(path)?)
}

fn write_matrix(out: &mut String, m: &Array2<Complex64>) {
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|z| format!("{:e} {:e}", z.re, z.im)).collect();
        let _ = writeln!(out, "{}", cells.join("  "));
    }
}

/// Serializes a system; numbers are written in shortest round-trip form.
pub fn write_system(spec: &SystemSpec) -> String {
    let mut out = String::new();
    out.push_str("[levels]\n");
    for l in &spec.levels {
        let _ = writeln!(out, "{} {:e}{}", l.label, l.energy, if l.edge { " edge" } else { "" });
    }
    out.push_str("\n[widths]\n");
    for w in &spec.widths {
        let _ = writeln!(out, "{w:e}");
    }
    for (l, ch) in spec.noise_couplings.iter().enumerate() {
        let _ = writeln!(out, "\n[noise_coupling {l} {}]", ch.unit);
        write_matrix(&mut out, &ch.matrix);
    }
    for b in &spec.dipole {
        let _ = writeln!(out, "\n[dipole {} {}]", b.direction, b.particle);
        write_matrix(&mut out, &b.matrix);
    }
    if let Some(r) = &spec.radiation {
        for (j, m) in r.iter().enumerate() {
            let _ = writeln!(out, "\n[radiation {j}]");
            write_matrix(&mut out, m);
        }
    }
    if !spec.particles.is_empty() {
        out.push_str("\n[particles]\n");
        for p in &spec.particles {
            let _ = writeln!(out, "{:e} {:e}", p.charge, p.mass);
        }
    }
    let c = &spec.constants;
    let _ = write!(out, "\n[constants]\nhbar = {:e}\nc = {:e}\neps0 = {:e}\n", c.hbar, c.c, c.eps0);
    let _ = write!(out, "\n[initial]\n{}\n", spec.initial_state);
    out
}

pub fn save_system(spec: &SystemSpec, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, write_system(spec))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::builtin_harmonic_oscillator;

    const THREE: &str = "\
# three-level ladder
[levels]
g 0
a 1.0
b 2.5 edge

[widths]
0 0.2 0.4

[noise_coupling 0 position]
0 0  1 0  0 0
1 0  0 0  0 0.5
0 0  0 -0.5  0 0

[dipole x]
0 0  0 -1  0 0
0 1  0 0  0 0
0 0  0 0  0 0

[particles]
-1 1

[initial]
g
";

    #[test]
    fn parses_three_levels() {
        let s = parse_system(THREE).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.levels[2].edge);
        assert_eq!(s.widths, vec![0.0, 0.2, 0.4]);
        assert_eq!(s.noise_couplings[0].matrix[[1, 2]], Complex64::new(0.0, 0.5));
        assert_eq!(s.initial_state, 0);
    }

    #[test]
    fn non_hermitian_rejected() {
        let bad = THREE.replace("0 0  0 -0.5  0 0", "0 0  0 0.5  0 0");
        assert!(matches!(parse_system(&bad), Err(Error::InvariantViolation(_))));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = THREE.replace("a 1.0", "a one");
        assert_eq!(parse_system(&bad), Err(Error::Parse { line: 4, message: "`one` is not a number".into() }));
    }

    #[test]
    fn roundtrip_is_bitwise() {
        let mut s = builtin_harmonic_oscillator(1.0 / 3.0, 0.7, -1.1, 5, Constants::reduced()).unwrap();
        s.widths = vec![0.0, 0.1 / 3.0, 2.0 / 7.0, 1e-300, 5.5e7];
        let back = parse_system(&write_system(&s)).unwrap();
        assert_eq!(back, s);
    }
}
