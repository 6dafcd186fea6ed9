//! Line-oriented circuit text format.
//!
//! ```text
//! QUBITS 3
//! H 3
//! CZ 1 2
//! RZ 0.25pi 1
//! GZZ {"n":3,"upper":[0.1,0.0,0.2]}
//! GZZ @a.json
//! GCX 100 110 101
//! EVOLVE @j.json 1.5e-4
//! PHASE 0.125pi
//! ```
//!
//! Qubits are 1-based. Matrix payloads are inline JSON or `@path`
//! references; GCX rows are bit strings or a `@path` to a file holding either
//! a JSON array of rows or whitespace-separated bit strings. Blank lines and
//! lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{Angle, BitMatrix, Circuit, Gate};
use crate::{Error, HollowSymmetric, Result};

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_angle(tok: &str, line: usize) -> Result<Angle> {
    if let Some(c) = tok.strip_suffix("pi") {
        let c = if c.is_empty() { "1" } else { c };
        let c = if c == "-" { "-1" } else { c };
        c.parse().map(Angle::Pi).map_err(|_| perr(line, format!("bad angle `{tok}`")))
    } else {
        tok.parse().map(Angle::Rad).map_err(|_| perr(line, format!("bad angle `{tok}`")))
    }
}

fn parse_qubit(tok: &str, n: usize, line: usize) -> Result<usize> {
    let q: usize = tok.parse().map_err(|_| perr(line, format!("bad qubit `{tok}`")))?;
    if q == 0 || q > n {
        return Err(perr(line, format!("qubit {q} outside 1..={n}")));
    }
    Ok(q - 1)
}

fn resolve(base: Option<&Path>, reference: &str) -> PathBuf {
    let p = Path::new(reference);
    match base {
        Some(b) if p.is_relative() => b.join(p),
        _ => p.to_path_buf(),
    }
}

fn parse_hollow(payload: &str, base: Option<&Path>, line: usize) -> Result<HollowSymmetric> {
    let text = match payload.strip_prefix('@') {
        Some(r) => {
            std::fs::read_to_string(resolve(base, r)).map_err(|e| perr(line, format!("cannot read `{r}`: {e}")))?
        }
        None => payload.to_string(),
    };
    serde_json::from_str(&text).map_err(|e| perr(line, format!("bad matrix: {e}")))
}

fn parse_bitrows(text: &str, line: usize) -> Result<BitMatrix> {
    let trimmed = text.trim();
    let rows: Vec<Vec<u8>> = if trimmed.starts_with('[') {
        serde_json::from_str(trimmed).map_err(|e| perr(line, format!("bad GCX matrix: {e}")))?
    } else {
        trimmed
            .split_whitespace()
            .map(|r| {
                r.chars()
                    .map(|c| match c {
                        '0' => Ok(0),
                        '1' => Ok(1),
                        _ => Err(perr(line, format!("bad GCX row `{r}`"))),
                    })
                    .collect()
            })
            .collect::<Result<_>>()?
    };
    BitMatrix::from_rows(&rows).map_err(|e| perr(line, e.to_string()))
}

impl Circuit {
    /// Parse text; `@path` references resolve against the working directory.
    pub fn parse(text: &str) -> Result<Circuit> {
        Self::parse_with_base(text, None)
    }

    /// Parse text with `@path` references resolved against `base`.
    pub fn parse_with_base(text: &str, base: Option<&Path>) -> Result<Circuit> {
        let mut circuit: Option<Circuit> = None;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let (name, rest) = t.split_once(char::is_whitespace).unwrap_or((t, ""));
            let rest = rest.trim();
            let name = name.to_ascii_uppercase();
            let Some(c) = circuit.as_mut() else {
                if name != "QUBITS" {
                    return Err(perr(line, "expected `QUBITS n` header"));
                }
                let n = rest.parse().map_err(|_| perr(line, format!("bad qubit count `{rest}`")))?;
                circuit = Some(Circuit::new(n));
                continue;
            };
            let n = c.n();
            let toks: Vec<&str> = rest.split_whitespace().collect();
            let want = |k: usize| -> Result<()> {
                if toks.len() == k {
                    Ok(())
                } else {
                    Err(perr(line, format!("{name} takes {k} arguments, got {}", toks.len())))
                }
            };
            let q = |i: usize| parse_qubit(toks[i], n, line);
            let gate = match name.as_str() {
                "H" | "X" | "S" | "SDG" | "SX" | "SXDG" => {
                    want(1)?;
                    let a = q(0)?;
                    match name.as_str() {
                        "H" => Gate::H(a),
                        "X" => Gate::X(a),
                        "S" => Gate::S(a),
                        "SDG" => Gate::Sdg(a),
                        "SX" => Gate::SX(a),
                        _ => Gate::SXdg(a),
                    }
                }
                "RZ" | "RX" | "RY" => {
                    want(2)?;
                    let ang = parse_angle(toks[0], line)?;
                    let a = q(1)?;
                    match name.as_str() {
                        "RZ" => Gate::RZ(ang, a),
                        "RX" => Gate::RX(ang, a),
                        _ => Gate::RY(ang, a),
                    }
                }
                "CX" | "CZ" | "CS" => {
                    want(2)?;
                    let (a, b) = (q(0)?, q(1)?);
                    match name.as_str() {
                        "CX" => Gate::CX(a, b),
                        "CZ" => Gate::CZ(a, b),
                        _ => Gate::CS(a, b),
                    }
                }
                "CRZ" | "ZZ" => {
                    want(3)?;
                    let ang = parse_angle(toks[0], line)?;
                    let (a, b) = (q(1)?, q(2)?);
                    if name == "CRZ" {
                        Gate::CRZ(ang, a, b)
                    } else {
                        Gate::ZZ(ang, a, b)
                    }
                }
                "GZZ" => Gate::GZZ(parse_hollow(rest, base, line)?),
                "GCRZ" => Gate::GCRZ(parse_hollow(rest, base, line)?),
                "GCX" => {
                    let m = match rest.strip_prefix('@') {
                        Some(r) => {
                            let body = std::fs::read_to_string(resolve(base, r))
                                .map_err(|e| perr(line, format!("cannot read `{r}`: {e}")))?;
                            parse_bitrows(&body, line)?
                        }
                        None => parse_bitrows(rest, line)?,
                    };
                    Gate::GCX(m)
                }
                "EVOLVE" => {
                    let (payload, t) = rest
                        .rsplit_once(char::is_whitespace)
                        .ok_or_else(|| perr(line, "EVOLVE needs a coupling and a time"))?;
                    let time = t.parse().map_err(|_| perr(line, format!("bad evolution time `{t}`")))?;
                    Gate::Evolve { coupling: parse_hollow(payload.trim(), base, line)?, time }
                }
                "PHASE" => {
                    want(1)?;
                    Gate::Phase(parse_angle(toks[0], line)?)
                }
                other => return Err(perr(line, format!("unknown gate `{other}`"))),
            };
            c.push(gate).map_err(|e| perr(line, e.to_string()))?;
        }
        circuit.ok_or_else(|| perr(0, "empty circuit text"))
    }

    /// Self-contained text with inline matrix payloads.
    pub fn to_text(&self) -> String {
        self.render(&mut |g, _| inline_payload(g))
    }

    /// Text whose matrix payloads are written to sidecar JSON files in `dir`
    /// named `{stem}_{k}.json` and referenced by file name.
    pub fn write_with_sidecars(&self, dir: &Path, stem: &str) -> Result<String> {
        let mut failure = None;
        let text = self.render(&mut |g, k| {
            let name = format!("{stem}_{k}.json");
            let body = match g {
                Gate::GZZ(a) | Gate::GCRZ(a) => serde_json::to_string(a),
                Gate::Evolve { coupling, .. } => serde_json::to_string(coupling),
                Gate::GCX(b) => serde_json::to_string(b),
                _ => unreachable!(),
            }
            .expect("matrices serialize");
            if let Err(e) = std::fs::write(dir.join(&name), body) {
                failure = Some(e);
            }
            format!("@{name}")
        });
        match failure {
            Some(e) => Err(e.into()),
            None => Ok(text),
        }
    }

    fn render(&self, payload: &mut dyn FnMut(&Gate, usize) -> String) -> String {
        let mut s = format!("QUBITS {}\n", self.n());
        for (k, g) in self.gates().iter().enumerate() {
            let name = g.name();
            let _ = match g {
                Gate::H(a) | Gate::X(a) | Gate::S(a) | Gate::Sdg(a) | Gate::SX(a) | Gate::SXdg(a) => {
                    writeln!(s, "{name} {}", a + 1)
                }
                Gate::RZ(t, a) | Gate::RX(t, a) | Gate::RY(t, a) => writeln!(s, "{name} {t} {}", a + 1),
                Gate::CX(a, b) | Gate::CZ(a, b) | Gate::CS(a, b) => {
                    writeln!(s, "{name} {} {}", a + 1, b + 1)
                }
                Gate::CRZ(t, a, b) | Gate::ZZ(t, a, b) => {
                    writeln!(s, "{name} {t} {} {}", a + 1, b + 1)
                }
                Gate::GZZ(_) | Gate::GCRZ(_) | Gate::GCX(_) => {
                    writeln!(s, "{name} {}", payload(g, k))
                }
                Gate::Evolve { time, .. } => writeln!(s, "{name} {} {time:e}", payload(g, k)),
                Gate::Phase(t) => writeln!(s, "{name} {t}"),
            };
        }
        s
    }
}

fn inline_payload(g: &Gate) -> String {
    match g {
        Gate::GZZ(a) | Gate::GCRZ(a) => serde_json::to_string(a).expect("matrices serialize"),
        Gate::Evolve { coupling, .. } => serde_json::to_string(coupling).expect("matrices serialize"),
        Gate::GCX(b) => (0..b.n())
            .map(|i| (0..b.n()).map(|j| if b.get(i, j) { '1' } else { '0' }).collect::<String>())
            .collect::<Vec<_>>()
            .join(" "),
        _ => unreachable!(),
    }
}
