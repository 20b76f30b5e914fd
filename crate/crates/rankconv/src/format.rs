//! Plain-text file formats.
//!
//! Every file starts with a header line carrying the field,
//! `q=<int> m=<int> modulus=<hex>`, followed by format-specific `key=value`
//! tokens. Extension-field elements are written as hex integers of their
//! packed coordinates. Rows of base-field matrices are hex integers with
//! entry `j` in bits `j*w..(j+1)*w`, `w` the bit width of one base element.
//! Blank lines and lines starting with `#` are ignored.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rankconv_core::gabidulin::ErasureSideInfo;
use rankconv_core::network::{Lifting, ReceiverShot};
use rankconv_core::pum::PumCode;
use rankconv_core::{BaseField, BaseMatrix, ExtElem, ExtField, FieldParams};

use crate::error::{CliError, Result};

/// Hex integer whose `w`-bit digits, least significant first, are `vals`.
pub fn pack_hex(vals: &[u16], width: u32) -> String {
    let bits = vals.len() * width as usize;
    let nibbles = bits.div_ceil(4).max(1);
    let mut buf = vec![0u8; nibbles];
    for (j, &v) in vals.iter().enumerate() {
        for b in 0..width as usize {
            if (v >> b) & 1 == 1 {
                let pos = j * width as usize + b;
                buf[pos / 4] |= 1 << (pos % 4);
            }
        }
    }
    let mut s = String::with_capacity(nibbles);
    let top = buf.iter().rposition(|&x| x != 0).unwrap_or(0);
    for &x in buf[..=top].iter().rev() {
        write!(s, "{x:x}").unwrap();
    }
    s
}

/// Inverse of [`pack_hex`] for `count` digits.
pub fn unpack_hex(s: &str, count: usize, width: u32) -> std::result::Result<Vec<u16>, String> {
    let mut bits = Vec::with_capacity(s.len() * 4);
    for ch in s.chars().rev() {
        let d = ch.to_digit(16).ok_or_else(|| format!("bad hex digit {ch:?} in {s:?}"))?;
        bits.extend((0..4).map(|b| (d >> b) & 1 == 1));
    }
    let w = width as usize;
    if bits.iter().skip(count * w).any(|&b| b) {
        return Err(format!("{s:?} has more than {count} digits"));
    }
    Ok((0..count)
        .map(|j| {
            (0..w).fold(0u16, |acc, b| {
                acc | (u16::from(*bits.get(j * w + b).unwrap_or(&false)) << b)
            })
        })
        .collect())
}

pub fn field_header(p: &FieldParams) -> String {
    let base = BaseField::new(p.q).expect("valid field parameters");
    format!(
        "q={} m={} modulus={}",
        p.q,
        p.m,
        pack_hex(&p.modulus, base.bit_width())
    )
}

/// Non-comment lines with their 1-based line numbers.
pub struct Lines<'a> {
    name: &'a str,
    inner: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    pub fn new(name: &'a str, text: &'a str) -> Self {
        let inner = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        Lines { name, inner, pos: 0 }
    }

    pub fn next_line(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let last = self.inner.last().map_or(0, |x| x.0);
        let item = self
            .inner
            .get(self.pos)
            .copied()
            .ok_or_else(|| CliError::format(self.name, last + 1, format!("missing {what}")))?;
        self.pos += 1;
        Ok(item)
    }

    pub fn peek(&self) -> Option<(usize, &'a str)> {
        self.inner.get(self.pos).copied()
    }

    pub fn finish(&self) -> Result<()> {
        match self.peek() {
            Some((line, _)) => Err(CliError::format(self.name, line, "unexpected trailing content")),
            None => Ok(()),
        }
    }

    pub fn err(&self, line: usize, msg: impl Into<String>) -> CliError {
        CliError::format(self.name, line, msg)
    }
}

/// `key=value` tokens of one line; bare words map to an empty value.
pub fn tokens(line: &str) -> BTreeMap<&str, &str> {
    line.split_whitespace()
        .map(|t| t.split_once('=').unwrap_or((t, "")))
        .collect()
}

fn get<'a>(lines: &Lines, line: usize, kv: &BTreeMap<&str, &'a str>, key: &str) -> Result<&'a str> {
    kv.get(key)
        .copied()
        .ok_or_else(|| lines.err(line, format!("missing `{key}=`")))
}

fn get_usize(lines: &Lines, line: usize, kv: &BTreeMap<&str, &str>, key: &str) -> Result<usize> {
    let v = get(lines, line, kv, key)?;
    v.parse()
        .map_err(|_| lines.err(line, format!("`{key}={v}` is not a non-negative integer")))
}

/// Parses the field part of a header line.
pub fn parse_field(lines: &Lines, line: usize, kv: &BTreeMap<&str, &str>) -> Result<ExtField> {
    let q: u32 = get_usize(lines, line, kv, "q")? as u32;
    let m = get_usize(lines, line, kv, "m")?;
    let base = BaseField::new(q).map_err(|e| lines.err(line, e.to_string()))?;
    let hex = get(lines, line, kv, "modulus")?;
    let modulus = unpack_hex(hex, m + 1, base.bit_width()).map_err(|e| lines.err(line, e))?;
    ExtField::new(FieldParams::with_modulus(q, m, modulus)).map_err(|e| lines.err(line, e.to_string()))
}

pub fn elem_token(e: ExtElem) -> String {
    format!("{:x}", e.packed())
}

fn parse_elems(f: &ExtField, lines: &Lines, line: usize, text: &str, len: usize) -> Result<Vec<ExtElem>> {
    let v: Vec<ExtElem> = text
        .split_whitespace()
        .map(|t| {
            u128::from_str_radix(t, 16)
                .map_err(|_| lines.err(line, format!("bad element token {t:?}")))
                .and_then(|p| f.element(p).map_err(|e| lines.err(line, e.to_string())))
        })
        .collect::<Result<_>>()?;
    if v.len() != len {
        return Err(lines.err(line, format!("expected {len} elements, found {}", v.len())));
    }
    Ok(v)
}

fn base_row(f: &BaseField, lines: &Lines, line: usize, text: &str, len: usize) -> Result<Vec<u16>> {
    let row = unpack_hex(text, len, f.bit_width()).map_err(|e| lines.err(line, e))?;
    if let Some(v) = row.iter().find(|&&v| u32::from(v) >= f.order()) {
        return Err(lines.err(line, format!("entry {v} outside GF({})", f.order())));
    }
    Ok(row)
}

fn write_base_rows(out: &mut String, f: &BaseField, m: &BaseMatrix) {
    for i in 0..m.rows() {
        writeln!(out, "{}", pack_hex(m.row(i), f.bit_width())).unwrap();
    }
}

/// Parameters of a (P)UM code and the number of info blocks `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeDescriptor {
    pub n: usize,
    pub k: usize,
    pub k1: usize,
    pub phi: usize,
    pub blocks: usize,
    pub locators: Vec<ExtElem>,
}

impl CodeDescriptor {
    pub fn of(code: &PumCode, blocks: usize) -> Self {
        CodeDescriptor {
            n: code.n(),
            k: code.k(),
            k1: code.k1(),
            phi: code.phi(),
            blocks,
            locators: code.locators().to_vec(),
        }
    }

    pub fn build(&self, f: &ExtField) -> Result<PumCode> {
        Ok(PumCode::with_locators(
            f,
            self.locators.clone(),
            self.k,
            self.k1,
            self.phi,
        )?)
    }

    pub fn render(&self, f: &ExtField) -> String {
        let mut s = field_header(f.params());
        writeln!(s).unwrap();
        writeln!(s, "{} {} {} {} {}", self.n, self.k, self.k1, self.phi, self.blocks).unwrap();
        let locs: Vec<String> = self.locators.iter().map(|&g| elem_token(g)).collect();
        writeln!(s, "{}", locs.join(" ")).unwrap();
        s
    }

    pub fn parse(name: &str, text: &str) -> Result<(ExtField, CodeDescriptor)> {
        let mut lines = Lines::new(name, text);
        let (l0, head) = lines.next_line("field header")?;
        let f = parse_field(&lines, l0, &tokens(head))?;
        let (l1, dims) = lines.next_line("`n k k1 phi N` line")?;
        let nums: Vec<usize> = dims
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| lines.err(l1, format!("bad integer {t:?}"))))
            .collect::<Result<_>>()?;
        let [n, k, k1, phi, blocks] = nums[..] else {
            return Err(lines.err(l1, format!("expected 5 integers, found {}", nums.len())));
        };
        let (l2, locs) = lines.next_line("locator list")?;
        let locators = parse_elems(&f, &lines, l2, locs, n)?;
        lines.finish()?;
        Ok((
            f,
            CodeDescriptor {
                n,
                k,
                k1,
                phi,
                blocks,
                locators,
            },
        ))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VectorKind {
    Info,
    Code,
    Received,
}

impl VectorKind {
    fn name(self) -> &'static str {
        match self {
            VectorKind::Info => "info",
            VectorKind::Code => "code",
            VectorKind::Received => "received",
        }
    }
}

/// A sequence of extension-field vectors: info blocks (length `k`) or code
/// and received blocks (length `n`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorFile {
    pub kind: VectorKind,
    pub n: usize,
    pub k: usize,
    pub rows: Vec<Vec<ExtElem>>,
}

impl VectorFile {
    pub fn row_len(&self) -> usize {
        match self.kind {
            VectorKind::Info => self.k,
            _ => self.n,
        }
    }

    pub fn render(&self, f: &ExtField) -> String {
        let mut s = field_header(f.params());
        writeln!(s, " n={} k={} kind={}", self.n, self.k, self.kind.name()).unwrap();
        for row in &self.rows {
            let t: Vec<String> = row.iter().map(|&e| elem_token(e)).collect();
            writeln!(s, "{}", t.join(" ")).unwrap();
        }
        s
    }

    pub fn parse(name: &str, text: &str) -> Result<(ExtField, VectorFile)> {
        let mut lines = Lines::new(name, text);
        let (l0, head) = lines.next_line("header")?;
        let kv = tokens(head);
        let f = parse_field(&lines, l0, &kv)?;
        let n = get_usize(&lines, l0, &kv, "n")?;
        let k = get_usize(&lines, l0, &kv, "k")?;
        let kind = match get(&lines, l0, &kv, "kind")? {
            "info" => VectorKind::Info,
            "code" => VectorKind::Code,
            "received" => VectorKind::Received,
            other => return Err(lines.err(l0, format!("unknown kind {other:?}"))),
        };
        let mut file = VectorFile {
            kind,
            n,
            k,
            rows: Vec::new(),
        };
        let len = file.row_len();
        while let Some((l, text)) = lines.peek() {
            lines.next_line("row")?;
            file.rows.push(parse_elems(&f, &lines, l, text, len)?);
        }
        Ok((f, file))
    }
}

/// Erasure side information of a received sequence, one entry per block.
pub fn render_side(f: &ExtField, n: usize, side: &[ErasureSideInfo]) -> String {
    let mut s = field_header(f.params());
    writeln!(s, " n={n} kind=side").unwrap();
    for (i, x) in side.iter().enumerate() {
        writeln!(s, "block={i} rho={} gamma={}", x.rho(), x.gamma()).unwrap();
        write_base_rows(&mut s, f.base(), &x.a_r().transpose());
        write_base_rows(&mut s, f.base(), x.b_c());
    }
    s
}

pub fn parse_side(name: &str, text: &str) -> Result<(ExtField, Vec<ErasureSideInfo>)> {
    let mut lines = Lines::new(name, text);
    let (l0, head) = lines.next_line("header")?;
    let kv = tokens(head);
    let f = parse_field(&lines, l0, &kv)?;
    let n = get_usize(&lines, l0, &kv, "n")?;
    if kv.get("kind") != Some(&"side") {
        return Err(lines.err(l0, "expected `kind=side`"));
    }
    let m = f.m();
    let mut out = Vec::new();
    while lines.peek().is_some() {
        let (lb, block) = lines.next_line("block header")?;
        let kv = tokens(block);
        let idx = get_usize(&lines, lb, &kv, "block")?;
        if idx != out.len() {
            return Err(lines.err(lb, format!("expected block {}, found {idx}", out.len())));
        }
        let rho = get_usize(&lines, lb, &kv, "rho")?;
        let gamma = get_usize(&lines, lb, &kv, "gamma")?;
        let mut a_rt = Vec::with_capacity(rho);
        for _ in 0..rho {
            let (l, t) = lines.next_line("A_R column")?;
            a_rt.push(base_row(f.base(), &lines, l, t, m)?);
        }
        let mut b_c = Vec::with_capacity(gamma);
        for _ in 0..gamma {
            let (l, t) = lines.next_line("B_C row")?;
            b_c.push(base_row(f.base(), &lines, l, t, n)?);
        }
        let a_r = BaseMatrix::from_rows(m, &a_rt).transpose();
        let b_c = BaseMatrix::from_rows(n, &b_c);
        let side = ErasureSideInfo::new(&f, n, a_r, b_c).map_err(|e| lines.err(lb, e.to_string()))?;
        out.push(side);
    }
    Ok((f, out))
}

/// Captured channel outputs of a multi-shot transmission.
pub fn render_shots(f: &ExtField, shots: &[ReceiverShot]) -> String {
    let (n, lifting) = shots
        .first()
        .map_or((0, Lifting::Linear), |s| (s.n(), s.lifting()));
    let mut s = field_header(f.params());
    let lift = match lifting {
        Lifting::Linear => "linear",
        Lifting::Affine => "affine",
    };
    writeln!(s, " n={n} lifting={lift} shots={}", shots.len()).unwrap();
    for (i, shot) in shots.iter().enumerate() {
        writeln!(s, "shot={i} n_i={}", shot.received()).unwrap();
        write_base_rows(&mut s, f.base(), shot.y());
    }
    s
}

pub fn parse_shots(name: &str, text: &str) -> Result<(ExtField, Vec<ReceiverShot>)> {
    let mut lines = Lines::new(name, text);
    let (l0, head) = lines.next_line("header")?;
    let kv = tokens(head);
    let f = parse_field(&lines, l0, &kv)?;
    let n = get_usize(&lines, l0, &kv, "n")?;
    let count = get_usize(&lines, l0, &kv, "shots")?;
    let lifting = match get(&lines, l0, &kv, "lifting")? {
        "linear" => Lifting::Linear,
        "affine" => Lifting::Affine,
        other => return Err(lines.err(l0, format!("unknown lifting {other:?}"))),
    };
    let width = lifting.overhead(n) + f.m();
    let mut shots = Vec::with_capacity(count);
    for i in 0..count {
        let (ls, head) = lines.next_line("shot header")?;
        let kv = tokens(head);
        if get_usize(&lines, ls, &kv, "shot")? != i {
            return Err(lines.err(ls, format!("expected shot {i}")));
        }
        let n_i = get_usize(&lines, ls, &kv, "n_i")?;
        let mut rows = Vec::with_capacity(n_i);
        for _ in 0..n_i {
            let (l, t) = lines.next_line("row of Y")?;
            rows.push(base_row(f.base(), &lines, l, t, width)?);
        }
        let y = BaseMatrix::from_rows(width, &rows);
        let shot = ReceiverShot::new(f.base(), y, n, lifting).map_err(|e| lines.err(ls, e.to_string()))?;
        shots.push(shot);
    }
    lines.finish()?;
    Ok((f, shots))
}

/// Whether `text` is a shot capture (by its header tokens).
pub fn is_shot_file(text: &str) -> bool {
    Lines::new("", text)
        .peek()
        .is_some_and(|(_, l)| tokens(l).contains_key("lifting"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rankconv_core::network::{lift_sequence, operator_channel, ChannelConfig};

    #[test]
    fn hex_packing_round_trips() {
        assert_eq!(pack_hex(&[1, 0, 1, 1], 1), "d");
        assert_eq!(pack_hex(&[0, 0], 1), "0");
        assert_eq!(pack_hex(&[2, 1, 0, 2], 2), "86");
        assert_eq!(unpack_hex("86", 4, 2).unwrap(), vec![2, 1, 0, 2]);
        assert!(unpack_hex("1ff", 4, 2).is_err());
        assert!(unpack_hex("xz", 4, 2).is_err());
    }

    #[test]
    fn gf256_header_uses_the_default_modulus() {
        let f = ExtField::binary(8).unwrap();
        let h = field_header(f.params());
        assert!(h.starts_with("q=2 m=8 modulus="));
        let lines = Lines::new("t", &h);
        let g = parse_field(&lines, 1, &tokens(&h)).unwrap();
        assert_eq!(g.params(), f.params());
    }

    #[test]
    fn descriptor_round_trips() {
        let f = ExtField::new(FieldParams::new(3, 4).unwrap()).unwrap();
        let code = PumCode::new(&f, 4, 2, 1, 0).unwrap();
        let d = CodeDescriptor::of(&code, 5);
        let text = d.render(&f);
        let (g, e) = CodeDescriptor::parse("code", &text).unwrap();
        assert_eq!(g.params(), f.params());
        assert_eq!(e, d);
    }

    #[test]
    fn vector_file_round_trips_and_reports_lines() {
        let f = ExtField::binary(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let file = VectorFile {
            kind: VectorKind::Info,
            n: 8,
            k: 4,
            rows: (0..3).map(|_| f.random_vec(4, &mut rng)).collect(),
        };
        let text = file.render(&f);
        assert_eq!(VectorFile::parse("x", &text).unwrap().1, file);
        let broken = text.replacen("kind=info", "kind=info\n# comment\n1 2 3", 1);
        let err = VectorFile::parse("x", &broken).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn malformed_header_is_a_format_error() {
        let err = VectorFile::parse("x", "q=2 m=8\n").unwrap_err();
        assert!(matches!(err, CliError::Format { line: 1, .. }));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn side_and_shot_files_round_trip() {
        let f = ExtField::binary(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let code = PumCode::new(&f, 6, 2, 1, 0).unwrap();
        let info: Vec<_> = (0..2).map(|_| f.random_vec(2, &mut rng)).collect();
        let c = code.encode(&f, &info).unwrap();
        let cfg = ChannelConfig {
            erased_packets: 1,
            error_packets: 1,
            affine: false,
        };
        let shots: Vec<ReceiverShot> = lift_sequence(&f, &c, Lifting::Linear)
            .iter()
            .map(|x| operator_channel(f.base(), x, cfg, &mut rng).unwrap().0)
            .collect();
        let text = render_shots(&f, &shots);
        assert!(is_shot_file(&text));
        assert_eq!(parse_shots("s", &text).unwrap().1, shots);

        let side: Vec<ErasureSideInfo> = shots
            .iter()
            .map(|s| rankconv_core::network::rre_decompose(&f, s).unwrap().side)
            .collect();
        let text = render_side(&f, 6, &side);
        assert!(!is_shot_file(&text));
        assert_eq!(parse_side("side", &text).unwrap().1, side);
    }
}
