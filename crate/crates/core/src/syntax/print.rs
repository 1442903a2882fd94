use std::fmt::{self, Write};

use super::Formula;

#[derive(Clone, Copy, Debug)]
pub struct PrintOptions {
    /// Print `¬(¬a ∧ ¬b)` as `(a | b)`, `¬□¬φ` as `<a>φ`, and so on.
    pub resugar: bool,
}

impl Default for PrintOptions {
    fn default() -> Self {
        PrintOptions { resugar: true }
    }
}

/// Renders a formula in the ASCII grammar accepted by [`super::parse`].
pub fn print(f: &Formula) -> String {
    print_with(f, PrintOptions::default())
}

pub fn print_with(f: &Formula, opts: PrintOptions) -> String {
    let mut out = String::new();
    write_formula(&mut out, f, opts, false).expect("writing to a String cannot fail");
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, PrintOptions::default(), false)
    }
}

fn is_diamond(f: &Formula) -> bool {
    f.as_dia().is_some() || f.as_dia_u().is_some() || f.as_dia_b().is_some()
}

/// `bare` drops the parentheses around a top-level binary connective; used
/// for arguments that are already delimited.
fn write_formula(out: &mut impl Write, f: &Formula, opts: PrintOptions, bare: bool) -> fmt::Result {
    if opts.resugar {
        if f.is_bot() {
            return out.write_str("F");
        }
        if let Some((a, b)) = f.as_iff() {
            return binary(out, a, "<->", b, opts, bare);
        }
        // `¬(¬a ∧ ¬b)` reads as both `a | b` and `¬a -> b`; a diamond or an
        // implication on the left reads better as an antecedent
        if let Some((a, b)) = f.as_implies() {
            let nested = a.as_implies().is_some() && a.as_or().is_none();
            if is_diamond(a) || nested || f.as_or().is_none() {
                return binary(out, a, "->", b, opts, bare);
            }
        }
        if let Some((a, b)) = f.as_or() {
            return binary(out, a, "|", b, opts, bare);
        }
        if let Some((i, body)) = f.as_dia() {
            write!(out, "<{i}>")?;
            return write_formula(out, body, opts, false);
        }
        if let Some((i, c, body)) = f.as_dia_u() {
            write!(out, "<{i}>^{c} ")?;
            return write_formula(out, body, opts, false);
        }
        if let Some((i, c, a, b)) = f.as_dia_b() {
            write!(out, "<{i}>^{c}(")?;
            write_formula(out, a, opts, true)?;
            out.write_str(", ")?;
            write_formula(out, b, opts, true)?;
            return out.write_str(")");
        }
    }
    match f {
        Formula::Top => out.write_str("T"),
        Formula::Prop(p) => out.write_str(p),
        Formula::Neg(a) => {
            out.write_char('~')?;
            write_formula(out, a, opts, false)
        }
        Formula::And(a, b) => binary(out, a, "&", b, opts, bare),
        Formula::Box(i, a) => {
            write!(out, "[{i}]")?;
            write_formula(out, a, opts, false)
        }
        Formula::KvCond(i, a, c) => {
            write!(out, "Kv[{i}](")?;
            write_formula(out, a, opts, true)?;
            write!(out, ", {c})")
        }
        Formula::BBoxU(i, c, a) => {
            write!(out, "[{i}]^{c} ")?;
            write_formula(out, a, opts, false)
        }
        Formula::BBoxB(i, c, a, b) => {
            write!(out, "[{i}]^{c}(")?;
            write_formula(out, a, opts, true)?;
            out.write_str(", ")?;
            write_formula(out, b, opts, true)?;
            out.write_str(")")
        }
    }
}

fn binary(out: &mut impl Write, a: &Formula, op: &str, b: &Formula, opts: PrintOptions, bare: bool) -> fmt::Result {
    if !bare {
        out.write_char('(')?;
    }
    write_formula(out, a, opts, false)?;
    write!(out, " {op} ")?;
    write_formula(out, b, opts, false)?;
    if !bare {
        out.write_char(')')?;
    }
    Ok(())
}

/// Formulas serialize as their printed form and deserialize through the parser.
impl serde::Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&print(self))
    }
}

impl<'de> serde::Deserialize<'de> for Formula {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Formula, D::Error> {
        let text = String::deserialize(de)?;
        super::parse_open(&text).map_err(serde::de::Error::custom)
    }
}
