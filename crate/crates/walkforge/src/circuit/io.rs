//! Circuit serialization: JSON and a QASM-like text dialect.
//!
//! Both formats print angles with 17 significant decimal digits so a
//! round-trip reproduces every f64 bit-exactly.
//!
//! JSON: `{"wires": w, "gates": [{"kind": .., "wire": .., "params": [..],
//! "controls": [[wire, "+"|"-"], ..]}, ..]}` with that field order.
//!
//! Text dialect: `qubits <w>` header, then one gate per line —
//! `h q[i]`, `x q[i]`, `rz-pair(t0,t1) q[i]`, `gphase(phi)` — with controls
//! as `ctrl+ q[j] @ ` / `ctrl- q[j] @ ` prefixes. `#` starts a comment.

use super::{Circuit, Control, Gate, GateKind, Polarity};
use crate::error::{Result, WalkError};

fn fmt_angle(x: f64) -> String {
    format!("{x:.16e}")
}

fn kind_name(kind: &GateKind) -> &'static str {
    match kind {
        GateKind::Hadamard { .. } => "h",
        GateKind::Not { .. } => "x",
        GateKind::Phase2 { .. } => "rz-pair",
        GateKind::GlobalPhase { .. } => "gphase",
    }
}

fn polarity_sign(p: Polarity) -> char {
    match p {
        Polarity::OnOne => '+',
        Polarity::OnZero => '-',
    }
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

pub fn to_json(c: &Circuit) -> String {
    let mut gates = Vec::with_capacity(c.gates().len());
    for g in c.gates() {
        let wire = match g.target() {
            Some(w) => w.to_string(),
            None => "null".to_string(),
        };
        let params: Vec<String> = g.angles().iter().map(|&a| fmt_angle(a)).collect();
        let controls: Vec<String> = g
            .controls
            .iter()
            .map(|ctl| format!("[{},\"{}\"]", ctl.wire, polarity_sign(ctl.polarity)))
            .collect();
        gates.push(format!(
            "{{\"kind\":\"{}\",\"wire\":{},\"params\":[{}],\"controls\":[{}]}}",
            kind_name(&g.kind),
            wire,
            params.join(","),
            controls.join(",")
        ));
    }
    format!(
        "{{\"wires\":{},\"gates\":[{}]}}",
        c.wires(),
        gates.join(",")
    )
}

pub fn from_json(text: &str) -> Result<Circuit> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| WalkError::Json(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| WalkError::Json("top level must be an object".into()))?;
    let wires = obj
        .get("wires")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| WalkError::Json("missing integer field `wires`".into()))?
        as usize;
    let gates = obj
        .get("gates")
        .and_then(|v| v.as_array())
        .ok_or_else(|| WalkError::Json("missing array field `gates`".into()))?;

    let mut circuit = Circuit::new(wires);
    for (idx, gv) in gates.iter().enumerate() {
        let gobj = gv
            .as_object()
            .ok_or_else(|| WalkError::Json(format!("gate {idx} must be an object")))?;
        let kind = gobj
            .get("kind")
            .and_then(|v| v.as_str())
            .ok_or_else(|| WalkError::Json(format!("gate {idx}: missing `kind`")))?;
        let wire = gobj
            .get("wire")
            .and_then(|v| v.as_u64())
            .map(|w| w as usize);
        let params: Vec<f64> = match gobj.get("params") {
            Some(serde_json::Value::Array(items)) => items
                .iter()
                .map(|p| {
                    p.as_f64()
                        .ok_or_else(|| WalkError::Json(format!("gate {idx}: non-numeric param")))
                })
                .collect::<Result<_>>()?,
            _ => return Err(WalkError::Json(format!("gate {idx}: missing `params`"))),
        };
        let mut controls = Vec::new();
        match gobj.get("controls") {
            Some(serde_json::Value::Array(items)) => {
                for cv in items {
                    let pair = cv
                        .as_array()
                        .filter(|a| a.len() == 2)
                        .ok_or_else(|| WalkError::Json(format!("gate {idx}: bad control")))?;
                    let cw = pair[0]
                        .as_u64()
                        .ok_or_else(|| WalkError::Json(format!("gate {idx}: bad control wire")))?
                        as usize;
                    let polarity = match pair[1].as_str() {
                        Some("+") => Polarity::OnOne,
                        Some("-") => Polarity::OnZero,
                        _ => {
                            return Err(WalkError::Json(format!(
                                "gate {idx}: control polarity must be \"+\" or \"-\""
                            )))
                        }
                    };
                    controls.push(Control { wire: cw, polarity });
                }
            }
            _ => return Err(WalkError::Json(format!("gate {idx}: missing `controls`"))),
        }
        let gate = build_gate(kind, wire, &params, controls)
            .map_err(|e| WalkError::Json(format!("gate {idx}: {e}")))?;
        circuit.push(gate)?;
    }
    Ok(circuit)
}

fn build_gate(
    kind: &str,
    wire: Option<usize>,
    params: &[f64],
    controls: Vec<Control>,
) -> std::result::Result<Gate, String> {
    let need_wire = || wire.ok_or_else(|| format!("`{kind}` needs a target wire"));
    let gate = match kind {
        "h" => {
            if !params.is_empty() {
                return Err("`h` takes no params".into());
            }
            Gate::hadamard(need_wire()?)
        }
        "x" => {
            if !params.is_empty() {
                return Err("`x` takes no params".into());
            }
            Gate::not(need_wire()?)
        }
        "rz-pair" => {
            if params.len() != 2 {
                return Err("`rz-pair` takes exactly two params".into());
            }
            Gate::phase2(need_wire()?, params[0], params[1])
        }
        "gphase" => {
            if params.len() != 1 {
                return Err("`gphase` takes exactly one param".into());
            }
            if wire.is_some() {
                return Err("`gphase` has no target wire".into());
            }
            Gate::global_phase(params[0])
        }
        other => return Err(format!("unknown gate kind `{other}`")),
    };
    Ok(gate.with_controls(controls))
}

// ---------------------------------------------------------------------------
// QASM-like text
// ---------------------------------------------------------------------------

pub fn to_qasm(c: &Circuit) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    writeln!(out, "qubits {}", c.wires()).unwrap();
    for g in c.gates() {
        let mut line = String::new();
        for ctl in &g.controls {
            write!(
                line,
                "ctrl{} q[{}] @ ",
                polarity_sign(ctl.polarity),
                ctl.wire
            )
            .unwrap();
        }
        match &g.kind {
            GateKind::Hadamard { wire } => write!(line, "h q[{wire}]").unwrap(),
            GateKind::Not { wire } => write!(line, "x q[{wire}]").unwrap(),
            GateKind::Phase2 {
                wire,
                theta0,
                theta1,
            } => write!(
                line,
                "rz-pair({},{}) q[{wire}]",
                fmt_angle(*theta0),
                fmt_angle(*theta1)
            )
            .unwrap(),
            GateKind::GlobalPhase { phi } => write!(line, "gphase({})", fmt_angle(*phi)).unwrap(),
        }
        writeln!(out, "{line}").unwrap();
    }
    out
}

pub fn from_qasm(text: &str) -> Result<Circuit> {
    let mut wires: Option<usize> = None;
    let mut circuit = Circuit::new(0);
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: &str| WalkError::Json(format!("text line {}: {msg}", lineno + 1));
        if let Some(rest) = line.strip_prefix("qubits") {
            let w: usize = rest
                .trim()
                .parse()
                .map_err(|_| bad("expected `qubits <count>`"))?;
            wires = Some(w);
            circuit = Circuit::new(w);
            continue;
        }
        if wires.is_none() {
            return Err(bad("`qubits <count>` must come first"));
        }
        let segments: Vec<&str> = line.split('@').map(str::trim).collect();
        let mut controls = Vec::new();
        for seg in &segments[..segments.len() - 1] {
            let (polarity, rest) = if let Some(r) = seg.strip_prefix("ctrl+") {
                (Polarity::OnOne, r)
            } else if let Some(r) = seg.strip_prefix("ctrl-") {
                (Polarity::OnZero, r)
            } else {
                return Err(bad("control prefix must be `ctrl+` or `ctrl-`"));
            };
            let wire = parse_wire_ref(rest).ok_or_else(|| bad("expected `ctrl[+|-] q[<wire>]`"))?;
            controls.push(Control { wire, polarity });
        }
        let atom = segments[segments.len() - 1];
        let (head, tail) = match atom.find(' ') {
            Some(pos) => (&atom[..pos], atom[pos + 1..].trim()),
            None => (atom, ""),
        };
        let (kind, params) = match head.find('(') {
            Some(open) => {
                let close = head
                    .rfind(')')
                    .ok_or_else(|| bad("unbalanced parentheses"))?;
                let body = &head[open + 1..close];
                let params: Vec<f64> = body
                    .split(',')
                    .map(|p| p.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad("bad angle literal"))?;
                (&head[..open], params)
            }
            None => (head, Vec::new()),
        };
        let wire = if tail.is_empty() {
            None
        } else {
            Some(parse_wire_ref(tail).ok_or_else(|| bad("expected `q[<wire>]` target"))?)
        };
        let gate = build_gate(kind, wire, &params, controls).map_err(|e| bad(&e))?;
        circuit.push(gate)?;
    }
    if wires.is_none() {
        return Err(WalkError::Json("missing `qubits <count>` header".into()));
    }
    Ok(circuit)
}

fn parse_wire_ref(s: &str) -> Option<usize> {
    let s = s.trim();
    s.strip_prefix("q[")?.strip_suffix(']')?.trim().parse().ok()
}
