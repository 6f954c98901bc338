//! Parser for the supported OPENQASM 2.0 subset.
//!
//! Accepted input: an optional `OPENQASM 2.0;` header, an optional
//! `include "qelib1.inc";`, exactly one `qreg`, and semicolon-terminated
//! gate statements over {h, x, rz(t), rx(t), cx, cp(t), cz, swap}. `//`
//! comments run to end of line. Angle expressions support decimal literals
//! and `pi` fractions such as `pi/2`, `-3*pi/4`.

use crate::circuit::{check_gates, Circuit, Gate, GateLabel};
use crate::error::{Error, Result};
use crate::topology::QubitId;

struct Statement {
    line: usize,
    text: String,
}

fn split_statements(source: &str) -> Vec<Statement> {
    let mut out = Vec::new();
    let mut buf = String::new();
    let mut start_line = 1;
    let mut line = 1;
    let mut in_statement = false;
    let mut chars = source.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '\n' => {
                line += 1;
                buf.push(' ');
            }
            '/' if chars.peek() == Some(&'/') => {
                for c in chars.by_ref() {
                    if c == '\n' {
                        line += 1;
                        break;
                    }
                }
                buf.push(' ');
            }
            ';' => {
                let text = buf.trim().to_string();
                if !text.is_empty() {
                    out.push(Statement { line: start_line, text });
                }
                buf.clear();
                in_statement = false;
            }
            _ => {
                if !in_statement && !c.is_whitespace() {
                    in_statement = true;
                    start_line = line;
                }
                buf.push(c);
            }
        }
    }
    if !buf.trim().is_empty() {
        out.push(Statement { line: start_line, text: buf.trim().to_string() });
    }
    out
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_angle(line: usize, text: &str) -> Result<f64> {
    let t = text.replace(' ', "");
    if t.is_empty() {
        return Err(parse_err(line, "empty angle expression"));
    }
    let (sign, rest) = match t.strip_prefix('-') {
        Some(r) => (-1.0, r),
        None => (1.0, t.as_str()),
    };
    // Forms: "pi", "pi/D", "N*pi", "N*pi/D", plain float.
    if let Some(idx) = rest.find("pi") {
        let (num_part, tail) = rest.split_at(idx);
        let tail = &tail[2..];
        let numerator = if num_part.is_empty() {
            1.0
        } else {
            let stripped = num_part.strip_suffix('*').ok_or_else(|| {
                parse_err(line, format!("malformed angle expression `{text}`"))
            })?;
            stripped
                .parse::<f64>()
                .map_err(|_| parse_err(line, format!("bad numerator in angle `{text}`")))?
        };
        let denominator = if tail.is_empty() {
            1.0
        } else {
            let stripped = tail.strip_prefix('/').ok_or_else(|| {
                parse_err(line, format!("malformed angle expression `{text}`"))
            })?;
            let d: f64 = stripped
                .parse()
                .map_err(|_| parse_err(line, format!("bad denominator in angle `{text}`")))?;
            if d == 0.0 {
                return Err(parse_err(line, "zero denominator in angle"));
            }
            d
        };
        Ok(sign * numerator * std::f64::consts::PI / denominator)
    } else {
        rest.parse::<f64>()
            .map(|v| sign * v)
            .map_err(|_| parse_err(line, format!("bad angle literal `{text}`")))
    }
}

fn parse_operand(line: usize, text: &str, reg: &str, size: usize) -> Result<QubitId> {
    let t = text.trim();
    let open = t
        .find('[')
        .ok_or_else(|| parse_err(line, format!("operand `{t}` must use the form {reg}[i]")))?;
    if !t.ends_with(']') {
        return Err(parse_err(line, format!("operand `{t}` missing closing bracket")));
    }
    let (name, idx) = (&t[..open], &t[open + 1..t.len() - 1]);
    if name.trim() != reg {
        return Err(parse_err(line, format!("unknown register `{}`", name.trim())));
    }
    let idx: usize = idx
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("bad qubit index `{}`", idx.trim())))?;
    if idx >= size {
        return Err(parse_err(
            line,
            format!("qubit index {idx} out of range for {reg}[{size}]"),
        ));
    }
    Ok(QubitId(idx as u32))
}

/// Parse circuit source text into an ordered gate list.
pub fn parse_circuit(source: &str) -> Result<Circuit> {
    let statements = split_statements(source);
    let mut reg: Option<(String, usize)> = None;
    let mut gates: Vec<Gate> = Vec::new();

    for st in &statements {
        let text = st.text.as_str();
        let line = st.line;
        let lower = text.to_ascii_lowercase();
        if lower.starts_with("openqasm") {
            let version = text[8..].trim();
            if version != "2.0" {
                return Err(parse_err(line, format!("unsupported OPENQASM version `{version}`")));
            }
            continue;
        }
        if lower.starts_with("include") {
            continue;
        }
        if let Some(rest) = text.strip_prefix("qreg") {
            if reg.is_some() {
                return Err(parse_err(line, "only one qreg declaration is supported"));
            }
            let rest = rest.trim();
            let open = rest
                .find('[')
                .ok_or_else(|| parse_err(line, "malformed qreg declaration"))?;
            if !rest.ends_with(']') {
                return Err(parse_err(line, "malformed qreg declaration"));
            }
            let name = rest[..open].trim().to_string();
            let size: usize = rest[open + 1..rest.len() - 1]
                .trim()
                .parse()
                .map_err(|_| parse_err(line, "bad qreg size"))?;
            if name.is_empty() || size == 0 {
                return Err(parse_err(line, "malformed qreg declaration"));
            }
            reg = Some((name, size));
            continue;
        }

        // Gate statement: name[(angle)] operand[, operand].
        let (reg_name, reg_size) = reg
            .as_ref()
            .map(|(n, s)| (n.clone(), *s))
            .ok_or_else(|| parse_err(line, "gate statement before qreg declaration"))?;

        let (head, args) = match text.find(|c: char| c.is_whitespace()) {
            Some(i) => text.split_at(i),
            None => return Err(parse_err(line, format!("malformed statement `{text}`"))),
        };
        let head = head.trim();
        let args = args.trim();

        let (name, angle) = if let Some(open) = head.find('(') {
            if !head.ends_with(')') {
                return Err(parse_err(line, format!("malformed gate call `{head}`")));
            }
            let angle = parse_angle(line, &head[open + 1..head.len() - 1])?;
            (&head[..open], Some(angle))
        } else {
            (head, None)
        };

        let operands: Vec<&str> = args.split(',').collect();
        let operand = |i: usize| parse_operand(line, operands[i], &reg_name, reg_size);
        let expect_arity = |want: usize| {
            if operands.len() != want {
                Err(parse_err(
                    line,
                    format!("gate `{name}` expects {want} operand(s), got {}", operands.len()),
                ))
            } else {
                Ok(())
            }
        };

        let two_operands = || -> Result<(QubitId, QubitId)> {
            let (a, b) = (operand(0)?, operand(1)?);
            if a == b {
                return Err(parse_err(line, format!("gate `{name}` operands must differ")));
            }
            Ok((a, b))
        };

        let id = gates.len();
        let gate = match name {
            "h" => {
                expect_arity(1)?;
                Gate::one(id, GateLabel::H, operand(0)?)
            }
            "x" => {
                expect_arity(1)?;
                Gate::one(id, GateLabel::X, operand(0)?)
            }
            "rz" => {
                expect_arity(1)?;
                let theta = angle.ok_or_else(|| parse_err(line, "rz requires an angle"))?;
                Gate::one(id, GateLabel::Rz(theta), operand(0)?)
            }
            "rx" => {
                expect_arity(1)?;
                let theta = angle.ok_or_else(|| parse_err(line, "rx requires an angle"))?;
                Gate::one(id, GateLabel::Rx(theta), operand(0)?)
            }
            "cx" => {
                expect_arity(2)?;
                let (a, b) = two_operands()?;
                Gate::two(id, GateLabel::Cx, a, b)
            }
            "cp" => {
                expect_arity(2)?;
                let theta = angle.ok_or_else(|| parse_err(line, "cp requires an angle"))?;
                let (a, b) = two_operands()?;
                Gate::two(id, GateLabel::Cp(theta), a, b)
            }
            "cz" => {
                expect_arity(2)?;
                let (a, b) = two_operands()?;
                Gate::two(id, GateLabel::Cz, a, b)
            }
            "swap" => {
                expect_arity(2)?;
                let (a, b) = two_operands()?;
                Gate::two(id, GateLabel::Swap, a, b)
            }
            other => {
                return Err(parse_err(line, format!("unsupported gate `{other}`")));
            }
        };
        gates.push(gate);
    }

    let (_, size) = reg.ok_or_else(|| parse_err(1, "missing qreg declaration"))?;
    check_gates(size, &gates)?;
    Ok(Circuit::new(size, gates))
}

/// Render a circuit in the supported subset, for round-tripping generated
/// benchmarks to disk.
pub fn write_circuit(circuit: &Circuit) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    writeln!(out, "OPENQASM 2.0;").unwrap();
    writeln!(out, "qreg q[{}];", circuit.num_qubits).unwrap();
    for g in &circuit.gates {
        let ops = g.operands.qubits();
        let ops = ops.iter().map(|q| format!("q[{}]", q.0)).collect::<Vec<_>>().join(",");
        match g.label {
            GateLabel::Rz(t) => writeln!(out, "rz({t}) {ops};").unwrap(),
            GateLabel::Rx(t) => writeln!(out, "rx({t}) {ops};").unwrap(),
            GateLabel::Cp(t) => writeln!(out, "cp({t}) {ops};").unwrap(),
            _ => writeln!(out, "{} {ops};", g.label.name()).unwrap(),
        }
    }
    out
}
