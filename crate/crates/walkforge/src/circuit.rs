//! Gate-level circuit intermediate representation.
//!
//! Primitive gates (Hadamard, NOT, 2-phase rotation, global phase) with
//! polarity-tagged control wires, the composition algebra (sequence,
//! parallel, adjoint, controlled), unitary extraction, statevector
//! application, and gate-cost accounting.
//!
//! Wire 0 is the most significant index bit: the top wire in a block diagram
//! selects the leading half of the index space. Circuit equality means exact
//! equality including global phase, so block compositions cannot silently
//! accumulate relative phases.

use ndarray::Array2;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Result, WalkError};

mod io;
pub use io::{from_json, from_qasm, to_json, to_qasm};

/// Default ceiling on wires for dense unitary extraction.
pub const UNITARY_WIRE_CAP: usize = 12;

/// Control polarity: fire the gate when the wire reads 1 (`OnOne`) or 0
/// (`OnZero`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Polarity {
    OnZero,
    OnOne,
}

/// A single polarity-tagged control wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Control {
    pub wire: usize,
    pub polarity: Polarity,
}

impl Control {
    pub fn on_one(wire: usize) -> Self {
        Self {
            wire,
            polarity: Polarity::OnOne,
        }
    }

    pub fn on_zero(wire: usize) -> Self {
        Self {
            wire,
            polarity: Polarity::OnZero,
        }
    }
}

/// Primitive gate kinds.
#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    Hadamard {
        wire: usize,
    },
    Not {
        wire: usize,
    },
    /// `diag(e^{i theta0}, e^{i theta1})` on the target wire.
    Phase2 {
        wire: usize,
        theta0: f64,
        theta1: f64,
    },
    /// Scalar factor `e^{i phi}` (on the states selected by the controls).
    GlobalPhase {
        phi: f64,
    },
}

/// A primitive gate plus its control wires.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub controls: Vec<Control>,
}

impl Gate {
    pub fn hadamard(wire: usize) -> Self {
        Self {
            kind: GateKind::Hadamard { wire },
            controls: Vec::new(),
        }
    }

    pub fn not(wire: usize) -> Self {
        Self {
            kind: GateKind::Not { wire },
            controls: Vec::new(),
        }
    }

    pub fn phase2(wire: usize, theta0: f64, theta1: f64) -> Self {
        Self {
            kind: GateKind::Phase2 {
                wire,
                theta0,
                theta1,
            },
            controls: Vec::new(),
        }
    }

    pub fn global_phase(phi: f64) -> Self {
        Self {
            kind: GateKind::GlobalPhase { phi },
            controls: Vec::new(),
        }
    }

    pub fn with_controls(mut self, controls: Vec<Control>) -> Self {
        self.controls = controls;
        self
    }

    /// The target wire, if the kind has one.
    pub fn target(&self) -> Option<usize> {
        match self.kind {
            GateKind::Hadamard { wire }
            | GateKind::Not { wire }
            | GateKind::Phase2 { wire, .. } => Some(wire),
            GateKind::GlobalPhase { .. } => None,
        }
    }

    /// All phase angles of the gate, in a fixed order.
    pub fn angles(&self) -> Vec<f64> {
        match self.kind {
            GateKind::Phase2 { theta0, theta1, .. } => vec![theta0, theta1],
            GateKind::GlobalPhase { phi } => vec![phi],
            _ => Vec::new(),
        }
    }

    fn adjoint(&self) -> Self {
        let kind = match self.kind {
            GateKind::Phase2 {
                wire,
                theta0,
                theta1,
            } => GateKind::Phase2 {
                wire,
                theta0: -theta0,
                theta1: -theta1,
            },
            GateKind::GlobalPhase { phi } => GateKind::GlobalPhase { phi: -phi },
            ref k => k.clone(),
        };
        Self {
            kind,
            controls: self.controls.clone(),
        }
    }

    fn shifted(&self, offset: usize) -> Self {
        let kind = match self.kind {
            GateKind::Hadamard { wire } => GateKind::Hadamard {
                wire: wire + offset,
            },
            GateKind::Not { wire } => GateKind::Not {
                wire: wire + offset,
            },
            GateKind::Phase2 {
                wire,
                theta0,
                theta1,
            } => GateKind::Phase2 {
                wire: wire + offset,
                theta0,
                theta1,
            },
            GateKind::GlobalPhase { phi } => GateKind::GlobalPhase { phi },
        };
        Self {
            kind,
            controls: self
                .controls
                .iter()
                .map(|c| Control {
                    wire: c.wire + offset,
                    polarity: c.polarity,
                })
                .collect(),
        }
    }

    fn validate(&self, wires: usize) -> Result<()> {
        if let Some(t) = self.target() {
            if t >= wires {
                return Err(WalkError::WireConflict(format!(
                    "target wire {t} out of range for {wires} wires"
                )));
            }
        }
        let mut seen = Vec::with_capacity(self.controls.len());
        for c in &self.controls {
            if c.wire >= wires {
                return Err(WalkError::WireConflict(format!(
                    "control wire {} out of range for {wires} wires",
                    c.wire
                )));
            }
            if Some(c.wire) == self.target() {
                return Err(WalkError::WireConflict(format!(
                    "control wire {} collides with the gate target",
                    c.wire
                )));
            }
            if seen.contains(&c.wire) {
                return Err(WalkError::WireConflict(format!(
                    "duplicate control wire {}",
                    c.wire
                )));
            }
            seen.push(c.wire);
        }
        for angle in self.angles() {
            if !angle.is_finite() {
                return Err(WalkError::InvalidArgument(format!(
                    "gate angle {angle} is not finite"
                )));
            }
        }
        Ok(())
    }
}

/// An ordered list of gates on a fixed number of wires.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    wires: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(wires: usize) -> Self {
        Self {
            wires,
            gates: Vec::new(),
        }
    }

    pub fn wires(&self) -> usize {
        self.wires
    }

    pub fn dim(&self) -> usize {
        1 << self.wires
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.wires)?;
        self.gates.push(gate);
        Ok(())
    }

    /// `self` then `other` in time order.
    pub fn seq(&self, other: &Circuit) -> Result<Circuit> {
        if self.wires != other.wires {
            return Err(WalkError::DimensionMismatch {
                left: self.wires,
                right: other.wires,
            });
        }
        let mut gates = self.gates.clone();
        gates.extend(other.gates.iter().cloned());
        Ok(Circuit {
            wires: self.wires,
            gates,
        })
    }

    /// `self` on the top wires in parallel with `other` below.
    pub fn par(&self, other: &Circuit) -> Circuit {
        let mut gates = self.gates.clone();
        gates.extend(other.gates.iter().map(|g| g.shifted(self.wires)));
        Circuit {
            wires: self.wires + other.wires,
            gates,
        }
    }

    /// Reverse gate order, negate every phase angle.
    pub fn adjoint(&self) -> Circuit {
        Circuit {
            wires: self.wires,
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
        }
    }

    /// Add `control` to every gate. The control wire must exist and be
    /// untouched by the circuit. A global phase turns into a phase on the
    /// control wire so it applies only in the selected block.
    pub fn controlled(&self, control: Control) -> Result<Circuit> {
        if control.wire >= self.wires {
            return Err(WalkError::WireConflict(format!(
                "control wire {} out of range for {} wires",
                control.wire, self.wires
            )));
        }
        for g in &self.gates {
            if g.target() == Some(control.wire) || g.controls.iter().any(|c| c.wire == control.wire)
            {
                return Err(WalkError::WireConflict(format!(
                    "control wire {} is already used by the circuit",
                    control.wire
                )));
            }
        }
        let gates = self
            .gates
            .iter()
            .map(|g| match g.kind {
                GateKind::GlobalPhase { phi } => {
                    let (theta0, theta1) = match control.polarity {
                        Polarity::OnZero => (phi, 0.0),
                        Polarity::OnOne => (0.0, phi),
                    };
                    Gate {
                        kind: GateKind::Phase2 {
                            wire: control.wire,
                            theta0,
                            theta1,
                        },
                        controls: g.controls.clone(),
                    }
                }
                _ => {
                    let mut controls = g.controls.clone();
                    controls.push(control);
                    Gate {
                        kind: g.kind.clone(),
                        controls,
                    }
                }
            })
            .collect();
        Ok(Circuit {
            wires: self.wires,
            gates,
        })
    }

    /// Re-home the circuit into a wider wire space, shifted down by `offset`.
    pub fn embed(&self, total_wires: usize, offset: usize) -> Result<Circuit> {
        if offset + self.wires > total_wires {
            return Err(WalkError::WireConflict(format!(
                "cannot embed {} wires at offset {offset} into {total_wires} wires",
                self.wires
            )));
        }
        Ok(Circuit {
            wires: total_wires,
            gates: self.gates.iter().map(|g| g.shifted(offset)).collect(),
        })
    }

    /// Dense unitary of the circuit under the default wire cap.
    pub fn unitary(&self) -> Result<Array2<Complex64>> {
        self.unitary_with_cap(UNITARY_WIRE_CAP)
    }

    /// Dense unitary, big-endian wire-to-index map (wire 0 = most
    /// significant bit). Matrix order is reversed relative to time order.
    pub fn unitary_with_cap(&self, cap: usize) -> Result<Array2<Complex64>> {
        if self.wires > cap {
            return Err(WalkError::ResourceLimit {
                what: "unitary extraction wires",
                value: self.wires,
                cap,
            });
        }
        let dim = self.dim();
        // Columns of the accumulating unitary live as rows of `cols` so gate
        // kernels always act on contiguous slices.
        let mut cols = vec![Complex64::ZERO; dim * dim];
        for j in 0..dim {
            cols[j * dim + j] = Complex64::ONE;
        }
        for gate in &self.gates {
            for col in cols.chunks_mut(dim) {
                apply_gate(gate, self.wires, col);
            }
        }
        let mut out = Array2::from_elem((dim, dim), Complex64::ZERO);
        for j in 0..dim {
            for i in 0..dim {
                out[[i, j]] = cols[j * dim + i];
            }
        }
        Ok(out)
    }

    /// Apply the circuit gate by gate to a state.
    pub fn apply_to_state(
        &self,
        psi: &crate::oracle::StateVector,
    ) -> Result<crate::oracle::StateVector> {
        if psi.dim() != self.dim() {
            return Err(WalkError::DimensionMismatch {
                left: self.dim(),
                right: psi.dim(),
            });
        }
        let mut out = psi.clone();
        for gate in &self.gates {
            apply_gate(gate, self.wires, out.amplitudes_mut());
        }
        Ok(out)
    }

    /// Gate totals by kind and by control arity.
    pub fn gate_count(&self) -> GateCounts {
        let mut counts = GateCounts::default();
        for g in &self.gates {
            match g.kind {
                GateKind::Hadamard { .. } => counts.hadamard += 1,
                GateKind::Not { .. } => counts.not += 1,
                GateKind::Phase2 { .. } => counts.phase2 += 1,
                GateKind::GlobalPhase { .. } => counts.global_phase += 1,
            }
            *counts.by_control_arity.entry(g.controls.len()).or_insert(0) += 1;
        }
        counts
    }

    /// Two-qubit cost model: 1 for gates with at most one control, `2k - 1`
    /// for `k >= 2` controls (the standard linear multi-control bound).
    /// A documented cost model, not an executed decomposition.
    pub fn two_qubit_cost(&self) -> usize {
        self.gates
            .iter()
            .map(|g| {
                let k = g.controls.len();
                if k <= 1 {
                    1
                } else {
                    2 * k - 1
                }
            })
            .sum()
    }

    /// Structure signature ignoring angle values: kinds, wires, controls,
    /// order. Two circuits with equal signatures differ at most in phases.
    pub fn structure(&self) -> Vec<(String, Option<usize>, Vec<Control>)> {
        self.gates
            .iter()
            .map(|g| {
                let tag = match g.kind {
                    GateKind::Hadamard { .. } => "h",
                    GateKind::Not { .. } => "x",
                    GateKind::Phase2 { .. } => "rz-pair",
                    GateKind::GlobalPhase { .. } => "gphase",
                };
                (tag.to_string(), g.target(), g.controls.clone())
            })
            .collect()
    }

    /// Every phase angle in gate order.
    pub fn angles(&self) -> Vec<f64> {
        self.gates.iter().flat_map(|g| g.angles()).collect()
    }
}

/// Gate totals by kind and control arity.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GateCounts {
    pub hadamard: usize,
    pub not: usize,
    pub phase2: usize,
    pub global_phase: usize,
    pub by_control_arity: BTreeMap<usize, usize>,
}

impl GateCounts {
    pub fn total(&self) -> usize {
        self.hadamard + self.not + self.phase2 + self.global_phase
    }
}

/// Apply one gate to a contiguous amplitude slice (big-endian index map).
fn apply_gate(gate: &Gate, wires: usize, amps: &mut [Complex64]) {
    let dim = amps.len();
    let mut ctrl_mask = 0usize;
    let mut ctrl_value = 0usize;
    for c in &gate.controls {
        let bit = 1usize << (wires - 1 - c.wire);
        ctrl_mask |= bit;
        if c.polarity == Polarity::OnOne {
            ctrl_value |= bit;
        }
    }
    if let GateKind::GlobalPhase { phi } = gate.kind {
        let factor = Complex64::cis(phi);
        for (i, a) in amps.iter_mut().enumerate() {
            if i & ctrl_mask == ctrl_value {
                *a *= factor;
            }
        }
        return;
    }
    let target = gate.target().expect("targeted gate");
    let tbit = 1usize << (wires - 1 - target);
    match gate.kind {
        GateKind::Hadamard { .. } => {
            for i in 0..dim {
                if i & tbit != 0 || i & ctrl_mask != ctrl_value {
                    continue;
                }
                let a = amps[i];
                let b = amps[i | tbit];
                amps[i] = (a + b) * FRAC_1_SQRT_2;
                amps[i | tbit] = (a - b) * FRAC_1_SQRT_2;
            }
        }
        GateKind::Not { .. } => {
            for i in 0..dim {
                if i & tbit != 0 || i & ctrl_mask != ctrl_value {
                    continue;
                }
                amps.swap(i, i | tbit);
            }
        }
        GateKind::Phase2 { theta0, theta1, .. } => {
            let p0 = Complex64::cis(theta0);
            let p1 = Complex64::cis(theta1);
            for i in 0..dim {
                if i & tbit != 0 || i & ctrl_mask != ctrl_value {
                    continue;
                }
                amps[i] *= p0;
                amps[i | tbit] *= p1;
            }
        }
        GateKind::GlobalPhase { .. } => unreachable!(),
    }
}
