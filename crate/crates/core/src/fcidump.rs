//! FCIDUMP reader/writer.
//!
//! The format is a Fortran namelist header (`&FCI NORB=..., NELEC=..., MS2=...`
//! terminated by `&END` or `/`) followed by `value i j k l` records with
//! 1-based indices: `(0,0,0,0)` is the core energy, `(i,j,0,0)` one-body,
//! everything else two-body in the chemist `(ij|kl)` convention. Fortran
//! `D` exponents are accepted.

use ndarray::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct IntegralTable {
    pub n_spatial: usize,
    pub n_electrons: usize,
    pub ms2: i32,
    pub core_energy: f64,
    /// h[p][q], symmetric, Hartree.
    pub one_body: Array2<f64>,
    /// Chemist-convention (pq|rs) with all 8 symmetry images populated.
    pub two_body: Array4<f64>,
    /// Parsed but unused (no symmetry adaptation).
    pub orbsym: Vec<i32>,
    pub isym: i32,
}

impl IntegralTable {
    pub fn new(n_spatial: usize, n_electrons: usize, ms2: i32) -> Self {
        IntegralTable {
            n_spatial,
            n_electrons,
            ms2,
            core_energy: 0.0,
            one_body: Array2::zeros((n_spatial, n_spatial)),
            two_body: Array4::zeros((n_spatial, n_spatial, n_spatial, n_spatial)),
            orbsym: vec![1; n_spatial],
            isym: 1,
        }
    }

    pub fn set_one_body(&mut self, p: usize, q: usize, v: f64) {
        self.one_body[[p, q]] = v;
        self.one_body[[q, p]] = v;
    }

    pub fn set_two_body(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        for &(a, b) in &[(p, q), (q, p)] {
            for &(c, d) in &[(r, s), (s, r)] {
                self.two_body[[a, b, c, d]] = v;
                self.two_body[[c, d, a, b]] = v;
            }
        }
    }
}

fn parse_f64(tok: &str, line_no: usize) -> Result<f64> {
    let norm = tok.replace(['D', 'd'], "E");
    norm.parse::<f64>().map_err(|_| Error::Parse {
        line: line_no,
        msg: format!("non-numeric value '{tok}'"),
    })
}

pub fn parse_fcidump(text: &str) -> Result<IntegralTable> {
    let mut lines = text.lines().enumerate();

    // collect the namelist header (may span multiple lines)
    let mut header = String::new();
    let mut body_start = 0usize;
    let mut found_start = false;
    for (no, line) in lines.by_ref() {
        let t = line.trim();
        if !found_start {
            if t.starts_with("&FCI") || t.starts_with("$FCI") {
                found_start = true;
                header.push_str(&t[4..]);
                header.push(' ');
            } else if !t.is_empty() {
                return Err(Error::Parse {
                    line: no + 1,
                    msg: "expected &FCI namelist header".into(),
                });
            }
            continue;
        }
        if t.contains("&END") || t.contains("$END") || t == "/" {
            let before = t.split(['&', '$', '/']).next().unwrap_or("");
            header.push_str(before);
            body_start = no + 1;
            break;
        }
        header.push_str(t);
        header.push(' ');
    }
    if !found_start || body_start == 0 {
        return Err(Error::Parse {
            line: 1,
            msg: "missing &FCI ... &END header".into(),
        });
    }

    let mut norb: Option<usize> = None;
    let mut nelec: Option<usize> = None;
    let mut ms2: i32 = 0;
    let mut isym: i32 = 1;
    let mut orbsym: Vec<i32> = Vec::new();
    // tokenize "KEY=v1,v2,..." pairs
    let cleaned = header.replace(',', " , ");
    let mut key: Option<String> = None;
    for raw in cleaned.split_whitespace() {
        if raw == "," {
            continue;
        }
        let parts: Vec<&str> = raw.splitn(2, '=').collect();
        let (k, v) = if parts.len() == 2 {
            key = Some(parts[0].to_uppercase());
            (key.clone().unwrap(), parts[1].to_string())
        } else if let Some(k) = &key {
            (k.clone(), raw.to_string())
        } else {
            continue;
        };
        if v.is_empty() {
            continue;
        }
        let ival = v.trim_end_matches(',').parse::<i64>().map_err(|_| Error::Parse {
            line: 1,
            msg: format!("bad header value '{v}' for {k}"),
        })?;
        match k.as_str() {
            "NORB" => norb = Some(ival as usize),
            "NELEC" => nelec = Some(ival as usize),
            "MS2" => ms2 = ival as i32,
            "ISYM" => isym = ival as i32,
            "ORBSYM" => orbsym.push(ival as i32),
            _ => {}
        }
    }
    let norb = norb.ok_or(Error::Parse {
        line: 1,
        msg: "header missing NORB".into(),
    })?;
    let nelec = nelec.ok_or(Error::Parse {
        line: 1,
        msg: "header missing NELEC".into(),
    })?;

    let mut table = IntegralTable::new(norb, nelec, ms2);
    table.isym = isym;
    if orbsym.len() == norb {
        table.orbsym = orbsym;
    }

    for (no, line) in text.lines().enumerate().skip(body_start) {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let toks: Vec<&str> = t.split_whitespace().collect();
        if toks.len() != 5 {
            return Err(Error::Parse {
                line: no + 1,
                msg: format!("expected 'value i j k l', got {} fields", toks.len()),
            });
        }
        let v = parse_f64(toks[0], no + 1)?;
        let idx: Vec<i64> = toks[1..]
            .iter()
            .map(|s| {
                s.parse::<i64>().map_err(|_| Error::Parse {
                    line: no + 1,
                    msg: format!("non-integer index '{s}'"),
                })
            })
            .collect::<Result<_>>()?;
        let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
        for &x in &idx {
            if x < 0 || x as usize > norb {
                return Err(Error::Parse {
                    line: no + 1,
                    msg: format!("orbital index {x} out of range 0..={norb}"),
                });
            }
        }
        match (i, j, k, l) {
            (0, 0, 0, 0) => table.core_energy = v,
            (_, _, 0, 0) if i > 0 && j > 0 => {
                table.set_one_body(i as usize - 1, j as usize - 1, v)
            }
            _ if i > 0 && j > 0 && k > 0 && l > 0 => table.set_two_body(
                i as usize - 1,
                j as usize - 1,
                k as usize - 1,
                l as usize - 1,
                v,
            ),
            _ => {
                return Err(Error::Parse {
                    line: no + 1,
                    msg: format!("invalid index pattern ({i},{j},{k},{l})"),
                })
            }
        }
    }
    Ok(table)
}

/// Emit in the same record layout `parse_fcidump` accepts (unique
/// permutational representatives only).
pub fn emit_fcidump(t: &IntegralTable) -> String {
    let n = t.n_spatial;
    let mut out = String::new();
    out.push_str(&format!("&FCI NORB={},NELEC={},MS2={},\n", n, t.n_electrons, t.ms2));
    out.push_str("  ORBSYM=");
    for s in &t.orbsym {
        out.push_str(&format!("{s},"));
    }
    out.push_str(&format!("\n  ISYM={},\n&END\n", t.isym));
    for i in 0..n {
        for j in 0..=i {
            for k in 0..=i {
                let lmax = if k == i { j } else { k };
                for l in 0..=lmax {
                    let v = t.two_body[[i, j, k, l]];
                    if v.abs() > 1e-14 {
                        out.push_str(&format!(
                            "{:23.16E} {:3} {:3} {:3} {:3}\n",
                            v,
                            i + 1,
                            j + 1,
                            k + 1,
                            l + 1
                        ));
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..=i {
            let v = t.one_body[[i, j]];
            if v.abs() > 1e-14 {
                out.push_str(&format!("{:23.16E} {:3} {:3}   0   0\n", v, i + 1, j + 1));
            }
        }
    }
    out.push_str(&format!("{:23.16E}   0   0   0   0\n", t.core_energy));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn minimal_core_only_file() {
        let text = "&FCI NORB=2, NELEC=2, MS2=0,\n&END\n0.5 0 0 0 0\n";
        let t = parse_fcidump(text).unwrap();
        assert_eq!(t.n_spatial, 2);
        assert_eq!(t.n_electrons, 2);
        assert_eq!(t.core_energy, 0.5);
        assert_eq!(t.one_body.sum(), 0.0);
        assert_eq!(t.two_body.sum(), 0.0);
    }

    #[test]
    fn symmetry_closure_on_two_body() {
        let text = "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n1.25 1 1 1 1\n1.0D-03 1 2 1 1\n";
        let t = parse_fcidump(text).unwrap();
        assert_eq!(t.two_body[[0, 0, 0, 0]], 1.25);
        // (12|11) populates all 8 images
        for &(a, b, c, d) in &[
            (0, 1, 0, 0),
            (1, 0, 0, 0),
            (0, 0, 0, 1),
            (0, 0, 1, 0),
        ] {
            assert_eq!(t.two_body[[a, b, c, d]], 1.0e-3, "({a}{b}|{c}{d})");
        }
    }

    #[test]
    fn round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 3;
        let mut t = IntegralTable::new(n, 4, 0);
        t.core_energy = rng.gen();
        for p in 0..n {
            for q in 0..=p {
                t.set_one_body(p, q, rng.gen::<f64>() - 0.5);
            }
        }
        for p in 0..n {
            for q in 0..=p {
                for r in 0..=p {
                    let smax = if r == p { q } else { r };
                    for s in 0..=smax {
                        t.set_two_body(p, q, r, s, rng.gen::<f64>() - 0.5);
                    }
                }
            }
        }
        let t2 = parse_fcidump(&emit_fcidump(&t)).unwrap();
        assert_eq!(t2.core_energy, t.core_energy);
        let d1 = (&t.one_body - &t2.one_body).iter().map(|x| x.abs()).fold(0.0, f64::max);
        let d2 = (&t.two_body - &t2.two_body).iter().map(|x| x.abs()).fold(0.0, f64::max);
        assert!(d1 < 1e-14 && d2 < 1e-14);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n1.0 1 1 1 1\nbogus 1 1 0 0\n";
        match parse_fcidump(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
        let text = "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n1.0 3 1 0 0\n";
        assert!(matches!(parse_fcidump(text), Err(Error::Parse { line: 3, .. })));
    }
}
