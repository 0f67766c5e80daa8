//! ISCAS bench reader.
//!
//! ```text
//! # comment
//! INPUT(a)
//! OUTPUT(y)
//! y = NAND(a, b)
//! ```

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{is_valid_net_name, Driver, Gate, GateKind, NetId, Netlist, NetlistError};

#[derive(Default)]
struct Builder {
    names: Vec<String>,
    index: BTreeMap<String, NetId>,
    drivers: Vec<Option<Driver>>,
}

impl Builder {
    fn net(&mut self, name: &str) -> NetId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = NetId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        self.drivers.push(None);
        id
    }

    fn drive(&mut self, line: usize, net: NetId, driver: Driver) -> Result<(), NetlistError> {
        let slot = &mut self.drivers[net.index()];
        if slot.is_some() {
            return Err(NetlistError::MultiplyDrivenNet { line, net: self.names[net.index()].clone() });
        }
        *slot = Some(driver);
        Ok(())
    }
}

fn syntax(line: usize, message: impl Into<String>) -> NetlistError {
    NetlistError::SyntaxError { line, message: message.into() }
}

fn name(line: usize, s: &str) -> Result<&str, NetlistError> {
    let s = s.trim();
    if is_valid_net_name(s) {
        Ok(s)
    } else {
        Err(syntax(line, format!("invalid net name `{s}`")))
    }
}

/// Splits `KEYWORD(args)` into its keyword and argument text.
fn call(line: usize, s: &str) -> Result<(&str, &str), NetlistError> {
    let open = s.find('(').ok_or_else(|| syntax(line, "expected `(`"))?;
    let rest = s[open + 1..].trim_end();
    let args = rest.strip_suffix(')').ok_or_else(|| syntax(line, "expected `)` at end of line"))?;
    if args.contains(['(', ')']) {
        return Err(syntax(line, "unbalanced parentheses"));
    }
    Ok((s[..open].trim(), args))
}

pub(super) fn parse(text: &str) -> Result<Netlist, NetlistError> {
    let mut b = Builder::default();
    let mut gates = Vec::new();
    let mut primary_inputs = Vec::new();
    let mut primary_outputs = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let stmt = raw.split('#').next().unwrap_or("").trim();
        if stmt.is_empty() {
            continue;
        }
        if let Some((lhs, rhs)) = stmt.split_once('=') {
            let out = name(line, lhs)?;
            let (kind_text, args) = call(line, rhs.trim())?;
            let kind = GateKind::parse(kind_text)
                .ok_or_else(|| NetlistError::UnknownGateKind { line, kind: kind_text.to_string() })?;
            let arg_names = args.split(',').map(|a| name(line, a)).collect::<Result<Vec<_>, _>>()?;
            if kind.is_unary() && arg_names.len() != 1 {
                return Err(syntax(line, format!("{kind} takes exactly one input")));
            }
            if !kind.is_unary() && arg_names.len() < 2 {
                return Err(syntax(line, format!("{kind} needs at least two inputs")));
            }
            let inputs = arg_names.into_iter().map(|a| b.net(a)).collect();
            let output = b.net(out);
            let gate_index = gates.len();
            let driver = if kind == GateKind::Dff { Driver::DffOutput(gate_index) } else { Driver::Gate(gate_index) };
            b.drive(line, output, driver)?;
            gates.push(Gate { kind, inputs, output });
        } else {
            let (keyword, arg) = call(line, stmt)?;
            let net_name = name(line, arg)?;
            match keyword.to_ascii_uppercase().as_str() {
                "INPUT" => {
                    let id = b.net(net_name);
                    b.drive(line, id, Driver::PrimaryInput)?;
                    primary_inputs.push(id);
                }
                "OUTPUT" => {
                    let id = b.net(net_name);
                    if primary_outputs.contains(&id) {
                        return Err(syntax(line, format!("duplicate OUTPUT `{net_name}`")));
                    }
                    primary_outputs.push(id);
                }
                other => return Err(syntax(line, format!("unknown statement `{other}`"))),
            }
        }
    }

    Netlist::build(b.names, gates, b.drivers, primary_inputs, primary_outputs)
}
