//! Walk-expression compiler: maps a graph expression plus walk parameters to
//! a circuit implementing `exp(-i t γ A)` exactly.
//!
//! Every family circuit is a conjugated diagonal, `seq(Q, D, adjoint(Q))`,
//! where the basis-change circuit `Q` maps the vertex basis to the eigenbasis
//! (`Q A Q† = Λ`) and `D` carries the whole time dependence as phase angles
//! linear in `t`. Composites use the two exact composition rules: commuting
//! sums become gate-sequence products, Cartesian products become parallel
//! stacks.

use std::fmt;

use crate::circuit::{Circuit, Control, Gate};
use crate::error::{Result, WalkError};
use crate::graph::{self, Graph, InterdependentPair, WalkParams};

/// Abstract syntax of the walk-expression grammar, plus the programmatic
/// commuting-sum node.
#[derive(Debug, Clone, PartialEq)]
pub enum WalkExpr {
    Path2,
    Complete(u32),
    Bipartite(u32, u32),
    Star(u32),
    Hypercube(u32),
    Book(u32),
    Cartesian(Box<WalkExpr>, Box<WalkExpr>),
    InterdepIdentity(Box<WalkExpr>),
    InterdepComplete(Box<WalkExpr>, Box<WalkExpr>),
    /// Raw graph/circuit operands; built programmatically, not by the parser.
    CommutingSum(Box<CommutingOperand>, Box<CommutingOperand>),
}

/// A graph together with a circuit already verified (by the caller) to
/// implement that graph's walk.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutingOperand {
    pub graph: Graph,
    pub circuit: Circuit,
}

impl WalkExpr {
    pub fn cartesian(e1: WalkExpr, e2: WalkExpr) -> Self {
        WalkExpr::Cartesian(Box::new(e1), Box::new(e2))
    }

    pub fn interdep_identity(e: WalkExpr) -> Self {
        WalkExpr::InterdepIdentity(Box::new(e))
    }

    pub fn interdep_complete(e1: WalkExpr, e2: WalkExpr) -> Self {
        WalkExpr::InterdepComplete(Box::new(e1), Box::new(e2))
    }

    /// Check the structural preconditions of this node only.
    pub fn validate_node(&self) -> Result<()> {
        match *self {
            WalkExpr::Complete(m) if m < 1 => Err(WalkError::InvalidArgument(
                "complete(m) requires m >= 1".into(),
            )),
            WalkExpr::Bipartite(m1, _) if m1 < 1 => Err(WalkError::InvalidArgument(
                "bipartite(m1, m2) requires m1 >= 1".into(),
            )),
            WalkExpr::Bipartite(m1, m2) if m1 < m2 => Err(WalkError::InvalidArgument(format!(
                "bipartite(m1, m2) requires m1 >= m2, got m1 = {m1}, m2 = {m2}"
            ))),
            WalkExpr::Star(m) if m < 1 => {
                Err(WalkError::InvalidArgument("star(m) requires m >= 1".into()))
            }
            WalkExpr::Hypercube(n) if n < 1 => Err(WalkError::InvalidArgument(
                "hypercube(n) requires n >= 1".into(),
            )),
            WalkExpr::Book(m) if m < 1 => {
                Err(WalkError::InvalidArgument("book(m) requires m >= 1".into()))
            }
            _ => Ok(()),
        }
    }

    /// Check preconditions of the whole tree.
    pub fn validate(&self) -> Result<()> {
        self.validate_node()?;
        match self {
            WalkExpr::Cartesian(a, b) | WalkExpr::InterdepComplete(a, b) => {
                a.validate()?;
                b.validate()
            }
            WalkExpr::InterdepIdentity(e) => e.validate(),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for WalkExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WalkExpr::Path2 => write!(f, "path2"),
            WalkExpr::Complete(m) => write!(f, "complete({m})"),
            WalkExpr::Bipartite(m1, m2) => write!(f, "bipartite({m1},{m2})"),
            WalkExpr::Star(m) => write!(f, "star({m})"),
            WalkExpr::Hypercube(n) => write!(f, "hypercube({n})"),
            WalkExpr::Book(m) => write!(f, "book({m})"),
            WalkExpr::Cartesian(a, b) => write!(f, "cartesian({a},{b})"),
            WalkExpr::InterdepIdentity(e) => write!(f, "interdep_id({e})"),
            WalkExpr::InterdepComplete(a, b) => write!(f, "interdep_complete({a},{b})"),
            WalkExpr::CommutingSum(a, b) => {
                write!(f, "commuting_sum({},{})", a.graph.label(), b.graph.label())
            }
        }
    }
}

/// The graph an expression evolves on. Total over well-formed expressions.
pub fn graph_of(expr: &WalkExpr) -> Result<Graph> {
    expr.validate_node()?;
    match expr {
        WalkExpr::Path2 => Ok(graph::path2()),
        WalkExpr::Complete(m) => graph::complete_graph(*m),
        WalkExpr::Bipartite(m1, m2) => graph::complete_bipartite(*m1, *m2),
        WalkExpr::Star(m) => graph::star(*m),
        WalkExpr::Hypercube(n) => graph::hypercube(*n),
        WalkExpr::Book(m) => graph::book(*m),
        WalkExpr::Cartesian(a, b) => graph::cartesian(&graph_of(a)?, &graph_of(b)?),
        WalkExpr::InterdepIdentity(e) => Ok(graph::identity_interlink(&graph_of(e)?)?.combined()),
        WalkExpr::InterdepComplete(a, b) => {
            Ok(graph::complete_interlink(&graph_of(a)?, &graph_of(b)?)?.combined())
        }
        WalkExpr::CommutingSum(a, b) => {
            if a.graph.dim() != b.graph.dim() {
                return Err(WalkError::DimensionMismatch {
                    left: a.graph.dim(),
                    right: b.graph.dim(),
                });
            }
            let adjacency = a.graph.adjacency() + b.graph.adjacency();
            let active: Vec<bool> = a
                .graph
                .active()
                .iter()
                .zip(b.graph.active())
                .map(|(&x, &y)| x || y)
                .collect();
            Graph::from_parts(
                adjacency,
                active,
                &format!("sum({},{})", a.graph.label(), b.graph.label()),
            )
        }
    }
}

/// The interlink structure of an interdependent expression, when it has one.
pub fn pair_of(expr: &WalkExpr) -> Result<Option<InterdependentPair>> {
    match expr {
        WalkExpr::InterdepIdentity(e) => Ok(Some(graph::identity_interlink(&graph_of(e)?)?)),
        WalkExpr::InterdepComplete(a, b) => Ok(Some(graph::complete_interlink(
            &graph_of(a)?,
            &graph_of(b)?,
        )?)),
        _ => Ok(None),
    }
}

// ---------------------------------------------------------------------------
// Diagonal phase circuits
// ---------------------------------------------------------------------------

/// Per-wire constraint of a diagonal phase pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WireConstraint {
    Zero,
    One,
    Free,
}

/// Sparse structured diagonal: disjoint bit patterns with eigenvalues.
/// Unlisted basis states carry eigenvalue 0 (phase 1).
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalPhaseSpec {
    wires: usize,
    entries: Vec<(Vec<WireConstraint>, f64)>,
}

impl DiagonalPhaseSpec {
    pub fn new(wires: usize, entries: Vec<(Vec<WireConstraint>, f64)>) -> Result<Self> {
        for (pattern, _) in &entries {
            if pattern.len() != wires {
                return Err(WalkError::DimensionMismatch {
                    left: wires,
                    right: pattern.len(),
                });
            }
        }
        for i in 0..entries.len() {
            for j in (i + 1)..entries.len() {
                let disjoint = entries[i].0.iter().zip(&entries[j].0).any(|(a, b)| {
                    matches!(
                        (a, b),
                        (WireConstraint::Zero, WireConstraint::One)
                            | (WireConstraint::One, WireConstraint::Zero)
                    )
                });
                if !disjoint {
                    return Err(WalkError::OverlappingPatterns(i, j));
                }
            }
        }
        Ok(Self { wires, entries })
    }

    pub fn wires(&self) -> usize {
        self.wires
    }

    pub fn entries(&self) -> &[(Vec<WireConstraint>, f64)] {
        &self.entries
    }
}

/// Emit phase gates applying `e^{-i t γ λ}` exactly on each pattern's basis
/// states and the identity elsewhere.
///
/// Two patterns that differ on exactly one wire share a single 2-phase gate
/// on that wire; a lone pattern puts its phase on one side of a 2-phase gate;
/// an all-free pattern is a global phase.
pub fn diagonal_phase_circuit(spec: &DiagonalPhaseSpec, params: WalkParams) -> Result<Circuit> {
    let mut circuit = Circuit::new(spec.wires);
    let n = spec.entries.len();
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] {
            continue;
        }
        used[i] = true;
        let (pattern_i, lambda_i) = &spec.entries[i];

        // Look for a partner differing in exactly one constrained wire.
        let mut partner: Option<(usize, usize)> = None;
        for (j, ((pattern_j, _), taken)) in spec.entries.iter().zip(&used).enumerate().skip(i + 1) {
            if *taken {
                continue;
            }
            let mut flip = None;
            let mut compatible = true;
            for w in 0..spec.wires {
                match (pattern_i[w], pattern_j[w]) {
                    (a, b) if a == b => {}
                    (WireConstraint::Zero, WireConstraint::One)
                    | (WireConstraint::One, WireConstraint::Zero) => {
                        if flip.is_some() {
                            compatible = false;
                            break;
                        }
                        flip = Some(w);
                    }
                    _ => {
                        compatible = false;
                        break;
                    }
                }
            }
            if compatible {
                if let Some(w) = flip {
                    partner = Some((j, w));
                    break;
                }
            }
        }

        match partner {
            Some((j, wire)) => {
                used[j] = true;
                let lambda_j = spec.entries[j].1;
                let (zero_side, one_side) = if pattern_i[wire] == WireConstraint::Zero {
                    (*lambda_i, lambda_j)
                } else {
                    (lambda_j, *lambda_i)
                };
                let controls = cube_controls(pattern_i, Some(wire));
                circuit.push(
                    Gate::phase2(wire, params.phase(zero_side), params.phase(one_side))
                        .with_controls(controls),
                )?;
            }
            None => {
                let anchor = pattern_i.iter().position(|c| *c != WireConstraint::Free);
                match anchor {
                    Some(wire) => {
                        let controls = cube_controls(pattern_i, Some(wire));
                        let (theta0, theta1) = if pattern_i[wire] == WireConstraint::Zero {
                            (params.phase(*lambda_i), 0.0)
                        } else {
                            (0.0, params.phase(*lambda_i))
                        };
                        circuit.push(Gate::phase2(wire, theta0, theta1).with_controls(controls))?;
                    }
                    None => {
                        circuit.push(Gate::global_phase(params.phase(*lambda_i)))?;
                    }
                }
            }
        }
    }
    Ok(circuit)
}

fn cube_controls(pattern: &[WireConstraint], skip: Option<usize>) -> Vec<Control> {
    pattern
        .iter()
        .enumerate()
        .filter(|(w, c)| Some(*w) != skip && **c != WireConstraint::Free)
        .map(|(w, c)| match c {
            WireConstraint::Zero => Control::on_zero(w),
            WireConstraint::One => Control::on_one(w),
            WireConstraint::Free => unreachable!(),
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Family synthesizers
// ---------------------------------------------------------------------------

/// `seq(Q, D, adjoint(Q))`: the conjugated-diagonal walk skeleton.
fn conjugated_walk(q: &Circuit, d: &Circuit) -> Circuit {
    q.seq(d)
        .expect("equal wires")
        .seq(&q.adjoint())
        .expect("equal wires")
}

/// One-wire walk: H, the two eigenphases, H.
pub fn synth_path2(params: WalkParams) -> Circuit {
    let mut q = Circuit::new(1);
    q.push(Gate::hadamard(0)).expect("static circuit");
    let mut d = Circuit::new(1);
    d.push(Gate::phase2(0, params.phase(1.0), params.phase(-1.0)))
        .expect("static circuit");
    conjugated_walk(&q, &d)
}

/// Complete-graph walk on m wires.
///
/// In the Hadamard basis the adjacency becomes `n P0..0 - I`, so the diagonal
/// splits into one global phase plus a single phase on the all-zero pattern
/// (2 gates instead of n).
pub fn synth_complete(m: u32, params: WalkParams) -> Result<Circuit> {
    if m < 1 {
        return Err(WalkError::InvalidArgument(
            "complete(m) requires m >= 1".into(),
        ));
    }
    let wires = m as usize;
    let n = 1usize << m;
    let mut q = Circuit::new(wires);
    for w in 0..wires {
        q.push(Gate::hadamard(w))?;
    }
    let mut d = Circuit::new(wires);
    d.push(Gate::global_phase(params.phase(-1.0)))?;
    let controls: Vec<Control> = (1..wires).map(Control::on_zero).collect();
    d.push(Gate::phase2(0, params.phase(n as f64), 0.0).with_controls(controls))?;
    Ok(conjugated_walk(&q, &d))
}

/// Complete-bipartite walk K_{2^m1, 2^m2} on m1 + 1 wires.
///
/// The basis change is a two-factor product: (i) Hadamards on wires 1..=m1
/// anti-controlled on wire 0, plus Hadamards on the last m2 wires controlled
/// on wire 0 = 1 and the gap wires 0; then (ii) one Hadamard on wire 0
/// anti-controlled on all other wires. The diagonal holds the two nonzero
/// eigenvalues ±sqrt(n1 n2) on the patterns 00..0 and 10..0.
pub fn synth_complete_bipartite(m1: u32, m2: u32, params: WalkParams) -> Result<Circuit> {
    if m1 < 1 {
        return Err(WalkError::InvalidArgument(
            "bipartite(m1, m2) requires m1 >= 1".into(),
        ));
    }
    if m1 < m2 {
        return Err(WalkError::InvalidArgument(format!(
            "bipartite(m1, m2) requires m1 >= m2, got m1 = {m1}, m2 = {m2}"
        )));
    }
    let wires = m1 as usize + 1;
    let gap = (m1 - m2) as usize;

    let mut q = Circuit::new(wires);
    // Factor (i), first block: wire 0 = 0 selects part 1.
    for w in 1..wires {
        q.push(Gate::hadamard(w).with_controls(vec![Control::on_zero(0)]))?;
    }
    // Factor (i), second block: wire 0 = 1 and the gap wires 0 select part 2.
    for w in (1 + gap)..wires {
        let mut controls = vec![Control::on_one(0)];
        controls.extend((1..=gap).map(Control::on_zero));
        q.push(Gate::hadamard(w).with_controls(controls))?;
    }
    // Factor (ii).
    let controls: Vec<Control> = (1..wires).map(Control::on_zero).collect();
    q.push(Gate::hadamard(0).with_controls(controls))?;

    let s = ((1u64 << m1) as f64 * (1u64 << m2) as f64).sqrt();
    let mut part2_pattern = vec![WireConstraint::Zero; wires];
    part2_pattern[0] = WireConstraint::One;
    let spec = DiagonalPhaseSpec::new(
        wires,
        vec![(vec![WireConstraint::Zero; wires], s), (part2_pattern, -s)],
    )?;
    let d = diagonal_phase_circuit(&spec, params)?;
    Ok(conjugated_walk(&q, &d))
}

/// Star walk S_{2^m + 1} = K_{2^m, 1}.
pub fn synth_star(m: u32, params: WalkParams) -> Result<Circuit> {
    if m < 1 {
        return Err(WalkError::InvalidArgument("star(m) requires m >= 1".into()));
    }
    synth_complete_bipartite(m, 0, params)
}

/// Hypercube walk: n parallel copies of the one-wire walk.
pub fn synth_hypercube(n: u32, params: WalkParams) -> Result<Circuit> {
    if n < 1 {
        return Err(WalkError::InvalidArgument(
            "hypercube(n) requires n >= 1".into(),
        ));
    }
    let single = synth_path2(params);
    let mut out = Circuit::new(0);
    for _ in 0..n {
        out = out.par(&single);
    }
    Ok(out)
}

/// Book walk B_{2^m} on m + 2 wires.
///
/// The star factor runs unconditionally; the page-pairing walk on the last
/// wire runs once per active cube of the star's vertex mask, so the padding
/// indices of the embedded star stay exactly fixed.
pub fn synth_book(m: u32, params: WalkParams) -> Result<Circuit> {
    if m == 0 {
        return Err(WalkError::InvalidArgument("book(m) requires m >= 1".into()));
    }
    let star_graph = graph::star(m)?;
    let star_wires = star_graph.wires();
    let wires = star_wires + 1;

    let star_walk = synth_star(m, params)?.embed(wires, 0)?;
    let mut out = star_walk;
    let spine = synth_path2(params).embed(wires, star_wires)?;
    for cube in active_cubes(star_graph.active()) {
        out = out.seq(&controlled_on_cube(&spine, &cube, 0)?)?;
    }
    Ok(out)
}

/// Cartesian-product walk: the parallel stack of the factor walks.
pub fn synth_cartesian(e1: &WalkExpr, e2: &WalkExpr, params: WalkParams) -> Result<Circuit> {
    Ok(synth(e1, params)?.par(&synth(e2, params)?))
}

/// Walk on two copies of a graph joined by identity interconnections.
///
/// The composite adjacency is a one-wire walk on the new top wire (acting on
/// the active rungs) commuting with the copy walks below, so the circuit is
/// the parallel stack of the one-wire walk and the subgraph walk; when the
/// subgraph has padding, the top-wire walk is replicated per active cube so
/// padded rungs stay fixed.
pub fn synth_interdep_identity(e1: &WalkExpr, params: WalkParams) -> Result<Circuit> {
    let g1 = graph_of(e1)?;
    let inner = synth(e1, params)?;
    let wires = g1.wires() + 1;

    let mut out = Circuit::new(wires);
    let rung = synth_path2(params).embed(wires, 0)?;
    for cube in active_cubes(g1.active()) {
        out = out.seq(&controlled_on_cube(&rung, &cube, 1)?)?;
    }
    out.seq(&inner.embed(wires, 1)?)
}

/// Walk on two equal-degree regular graphs joined by the all-ones interlink.
///
/// Factor (i): the first graph's walk controlled on the top wire being 0,
/// then the second graph's walk on the last wires controlled on the top wire
/// being 1 and the gap wires 0. Factor (ii): the complete-bipartite interlink
/// walk on the whole space. The two factors commute; the emitted order is
/// intra first.
pub fn synth_interdep_complete(
    e1: &WalkExpr,
    e2: &WalkExpr,
    params: WalkParams,
) -> Result<Circuit> {
    let g1 = graph_of(e1)?;
    let g2 = graph_of(e2)?;
    // Validates degree regularity, sizes, and proves the commutator vanishes.
    let pair = graph::complete_interlink(&g1, &g2)?;
    if !graph::commutes(pair.intra(), pair.inter())? {
        return Err(WalkError::NonCommuting);
    }

    let m1 = g1.wires();
    let m2 = g2.wires();
    let gap = m1 - m2;
    let wires = m1 + 1;

    let c1 = synth(e1, params)?
        .embed(wires, 1)?
        .controlled(Control::on_zero(0))?;
    let mut c2 = synth(e2, params)?.embed(wires, 1 + gap)?;
    for w in 1..=gap {
        c2 = c2.controlled(Control::on_zero(w))?;
    }
    c2 = c2.controlled(Control::on_one(0))?;

    let intra = c1.seq(&c2)?;
    let inter = synth_complete_bipartite(m1 as u32, m2 as u32, params)?;
    intra.seq(&inter)
}

/// Walk on the sum of two commuting graphs: the gate-sequence product of the
/// operand circuits. Refuses non-commuting operands, since the factorization
/// of `exp(-it(A+B))` into the two walks holds only when `[A, B] = 0`.
///
/// Each operand circuit must implement its own graph's walk (at the same
/// parameters); that is the caller's contract and is not re-derived here.
pub fn synth_commuting_sum(a: &CommutingOperand, b: &CommutingOperand) -> Result<Circuit> {
    if !graph::commutes(&a.graph, &b.graph)? {
        return Err(WalkError::NonCommuting);
    }
    for op in [a, b] {
        if op.circuit.dim() != op.graph.dim() {
            return Err(WalkError::DimensionMismatch {
                left: op.circuit.dim(),
                right: op.graph.dim(),
            });
        }
    }
    a.circuit.seq(&b.circuit)
}

/// Interlink walk for a symmetric interconnection `B0 = B0^T` between two
/// blocks: with `q0` diagonalizing `B0` (eigenvalues `zeta0`), the composite
/// diagonalizer is a Hadamard on the new top wire stacked over `q0`, and
/// every eigenphase appears twice with opposite signs selected by the top
/// wire.
pub fn synth_symmetric_interlink(
    q0_circuit: &Circuit,
    zeta0: &DiagonalPhaseSpec,
    params: WalkParams,
) -> Result<Circuit> {
    if zeta0.wires() != q0_circuit.wires() {
        return Err(WalkError::DimensionMismatch {
            left: zeta0.wires(),
            right: q0_circuit.wires(),
        });
    }
    let mut top = Circuit::new(1);
    top.push(Gate::hadamard(0))?;
    let q = top.par(q0_circuit);

    let mut entries = Vec::with_capacity(zeta0.entries().len() * 2);
    for (pattern, lambda) in zeta0.entries() {
        let mut on_zero = vec![WireConstraint::Zero];
        on_zero.extend_from_slice(pattern);
        entries.push((on_zero, *lambda));
        let mut on_one = vec![WireConstraint::One];
        on_one.extend_from_slice(pattern);
        entries.push((on_one, -*lambda));
    }
    let spec = DiagonalPhaseSpec::new(q.wires(), entries)?;
    let d = diagonal_phase_circuit(&spec, params)?;
    Ok(conjugated_walk(&q, &d))
}

/// Dispatch over every walk-expression node.
pub fn synth(expr: &WalkExpr, params: WalkParams) -> Result<Circuit> {
    match expr {
        WalkExpr::Path2 => Ok(synth_path2(params)),
        WalkExpr::Complete(m) => synth_complete(*m, params),
        WalkExpr::Bipartite(m1, m2) => synth_complete_bipartite(*m1, *m2, params),
        WalkExpr::Star(m) => synth_star(*m, params),
        WalkExpr::Hypercube(n) => synth_hypercube(*n, params),
        WalkExpr::Book(m) => synth_book(*m, params),
        WalkExpr::Cartesian(a, b) => synth_cartesian(a, b, params),
        WalkExpr::InterdepIdentity(e) => synth_interdep_identity(e, params),
        WalkExpr::InterdepComplete(a, b) => synth_interdep_complete(a, b, params),
        WalkExpr::CommutingSum(a, b) => synth_commuting_sum(a, b),
    }
}

// ---------------------------------------------------------------------------
// Active-mask cubes
// ---------------------------------------------------------------------------

/// Decompose an active mask into disjoint cubes (per-wire 0/1/free patterns)
/// by splitting on the leading wire until a region is uniform. Family masks
/// decompose into a handful of cubes.
fn active_cubes(mask: &[bool]) -> Vec<Vec<Option<bool>>> {
    let wires = mask.len().trailing_zeros() as usize;
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    cube_split(mask, 0, mask.len(), wires, &mut prefix, &mut out);
    out
}

fn cube_split(
    mask: &[bool],
    start: usize,
    len: usize,
    wires: usize,
    prefix: &mut Vec<Option<bool>>,
    out: &mut Vec<Vec<Option<bool>>>,
) {
    let region = &mask[start..start + len];
    if region.iter().all(|&b| b) {
        let mut cube = prefix.clone();
        cube.resize(wires, None);
        out.push(cube);
        return;
    }
    if region.iter().all(|&b| !b) {
        return;
    }
    let half = len / 2;
    prefix.push(Some(false));
    cube_split(mask, start, half, wires, prefix, out);
    prefix.pop();
    prefix.push(Some(true));
    cube_split(mask, start + half, half, wires, prefix, out);
    prefix.pop();
}

/// Add one control per constrained cube wire (cube wire w lives at circuit
/// wire `w + offset`).
fn controlled_on_cube(c: &Circuit, cube: &[Option<bool>], offset: usize) -> Result<Circuit> {
    let mut out = c.clone();
    for (w, constraint) in cube.iter().enumerate() {
        if let Some(bit) = constraint {
            let control = if *bit {
                Control::on_one(w + offset)
            } else {
                Control::on_zero(w + offset)
            };
            out = out.controlled(control)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{expm_hermitian, matmul, unitary_distance};
    use ndarray::Array2;
    use num_complex::Complex64;

    fn dist(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
        unitary_distance(a, b).unwrap().max_entrywise
    }

    /// Circuit unitary vs oracle exponential of the expression's graph.
    fn oracle_distance(expr: &WalkExpr, params: WalkParams) -> f64 {
        let g = graph_of(expr).unwrap();
        let circuit = synth(expr, params).unwrap();
        assert_eq!(circuit.dim(), g.dim(), "{expr}");
        let u = circuit.unitary().unwrap();
        let v = expm_hermitian(&g.adjacency_f64(), params).unwrap();
        dist(&u, &v)
    }

    fn eye(n: usize) -> Array2<Complex64> {
        let mut m = Array2::from_elem((n, n), Complex64::ZERO);
        for i in 0..n {
            m[[i, i]] = Complex64::ONE;
        }
        m
    }

    #[test]
    fn path2_walk() {
        let id = synth_path2(WalkParams { gamma: 1.0, t: 0.0 });
        assert!(dist(&id.unitary().unwrap(), &eye(2)) <= 1e-15);
        assert_eq!(id.gate_count().total(), 3);

        // t = pi/(2 gamma) gives -i sigma_x.
        let c = synth_path2(WalkParams {
            gamma: 2.0,
            t: std::f64::consts::FRAC_PI_4,
        });
        let u = c.unitary().unwrap();
        let mi = Complex64::new(0.0, -1.0);
        assert!((u[[0, 1]] - mi).norm() <= 1e-14);
        assert!((u[[1, 0]] - mi).norm() <= 1e-14);
        assert!(u[[0, 0]].norm() <= 1e-14);

        for t in [0.3, 7.3] {
            assert!(oracle_distance(&WalkExpr::Path2, WalkParams { gamma: 1.0, t }) <= 1e-12);
        }
    }

    #[test]
    fn complete_walk() {
        let params = WalkParams { gamma: 1.0, t: 1.3 };
        assert!(oracle_distance(&WalkExpr::Complete(2), params) <= 1e-11);

        // K2 equals the 2-path walk as a unitary (different gate list).
        let u1 = synth_complete(1, params).unwrap().unitary().unwrap();
        let u2 = synth_path2(params).unitary().unwrap();
        assert!(dist(&u1, &u2) <= 1e-14);

        for m in 1..=5 {
            let c = synth_complete(m, params).unwrap();
            assert_eq!(c.gate_count().total(), 2 * m as usize + 2);
        }
        assert!(synth_complete(0, params).is_err());
    }

    #[test]
    fn bipartite_walk_matches_oracle() {
        let params = WalkParams { gamma: 1.0, t: 1.1 };
        assert!(oracle_distance(&WalkExpr::Bipartite(3, 2), params) <= 1e-10);
        assert!(oracle_distance(&WalkExpr::Bipartite(2, 2), params) <= 1e-10);
        assert!(oracle_distance(&WalkExpr::Bipartite(1, 0), params) <= 1e-10);
        assert!(synth_complete_bipartite(1, 3, params).is_err());
        assert!(synth_complete_bipartite(0, 0, params).is_err());
    }

    #[test]
    fn star_is_bipartite_m_0() {
        let params = WalkParams {
            gamma: 0.37,
            t: 2.0,
        };
        let a = synth_star(3, params).unwrap();
        let b = synth_complete_bipartite(3, 0, params).unwrap();
        assert_eq!(a, b);
        assert!(oracle_distance(&WalkExpr::Star(3), params) <= 1e-10);
    }

    #[test]
    fn k22_is_the_4_cycle_up_to_relabeling() {
        // K_{2,2} and P2 x P2 are the same 4-cycle under the vertex map
        // 0->0, 1->3, 2->1, 3->2.
        let params = WalkParams { gamma: 1.0, t: 0.9 };
        let uk = synth_complete_bipartite(1, 1, params)
            .unwrap()
            .unitary()
            .unwrap();
        let uc = synth_cartesian(&WalkExpr::Path2, &WalkExpr::Path2, params)
            .unwrap()
            .unitary()
            .unwrap();
        let perm = [0usize, 3, 1, 2];
        let mut p = Array2::from_elem((4, 4), Complex64::ZERO);
        for (i, &pi) in perm.iter().enumerate() {
            p[[pi, i]] = Complex64::ONE;
        }
        // P U_K P^T should equal U_C4.
        let conj = matmul(
            &matmul(&p, &uk).unwrap(),
            &p.t().to_owned().as_standard_layout().to_owned(),
        )
        .unwrap();
        assert!(dist(&conj, &uc) <= 1e-12);
    }

    #[test]
    fn hypercube_walk() {
        let params = WalkParams { gamma: 1.0, t: 2.1 };
        for n in 1..=4 {
            assert!(oracle_distance(&WalkExpr::Hypercube(n), params) <= 1e-10);
            let c = synth_hypercube(n, params).unwrap();
            assert_eq!(c.gate_count().total(), 3 * n as usize);
        }
        assert_eq!(synth_hypercube(1, params).unwrap(), synth_path2(params));
    }

    #[test]
    fn book_walk_matches_oracle_and_fixes_padding() {
        let params = WalkParams { gamma: 1.0, t: 0.8 };
        assert!(oracle_distance(&WalkExpr::Book(3), params) <= 1e-10);
        assert!(oracle_distance(&WalkExpr::Book(1), params) <= 1e-10);

        // Padding states of the embedded star stay exactly fixed.
        let g = graph::book(2).unwrap();
        let u = synth_book(2, params).unwrap().unitary().unwrap();
        for v in 0..g.dim() {
            if g.is_active(v) {
                continue;
            }
            for w in 0..g.dim() {
                let expect = if v == w {
                    Complex64::ONE
                } else {
                    Complex64::ZERO
                };
                assert!((u[[w, v]] - expect).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn book_agrees_with_cartesian_on_active_states() {
        // As graphs on their real vertices the two are identical; the raw
        // product additionally walks the padded page fibers.
        let params = WalkParams { gamma: 1.0, t: 1.4 };
        let book_u = synth(&WalkExpr::Book(3), params)
            .unwrap()
            .unitary()
            .unwrap();
        let cart = WalkExpr::cartesian(WalkExpr::Star(3), WalkExpr::Path2);
        let cart_u = synth(&cart, params).unwrap().unitary().unwrap();
        assert!(oracle_distance(&cart, params) <= 1e-10);
        let g = graph_of(&WalkExpr::Book(3)).unwrap();
        for i in 0..g.dim() {
            for j in 0..g.dim() {
                if g.is_active(i) && g.is_active(j) {
                    assert!((book_u[[i, j]] - cart_u[[i, j]]).norm() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn four_nested_path_factors_equal_the_hypercube() {
        let params = WalkParams { gamma: 1.0, t: 0.9 };
        let nested = WalkExpr::cartesian(
            WalkExpr::Path2,
            WalkExpr::cartesian(
                WalkExpr::Path2,
                WalkExpr::cartesian(WalkExpr::Path2, WalkExpr::Path2),
            ),
        );
        let a = synth(&nested, params).unwrap().unitary().unwrap();
        let b = synth(&WalkExpr::Hypercube(4), params)
            .unwrap()
            .unitary()
            .unwrap();
        assert!(dist(&a, &b) <= 1e-13);
    }

    #[test]
    fn two_particle_walk_is_a_tensor_square() {
        let params = WalkParams { gamma: 1.0, t: 1.0 };
        let e = WalkExpr::Star(2);
        let u = synth(&e, params).unwrap().unitary().unwrap();
        let uu = synth_cartesian(&e, &e, params).unwrap().unitary().unwrap();
        let expect = ndarray::linalg::kron(&u, &u);
        assert!(dist(&uu, &expect) <= 1e-12);
    }

    #[test]
    fn interdep_identity_walk() {
        let params = WalkParams { gamma: 1.0, t: 1.3 };
        let expr = WalkExpr::interdep_identity(WalkExpr::Complete(2));
        assert!(oracle_distance(&expr, params) <= 1e-10);

        // Fully-active inner graph: exactly the parallel stack.
        let direct = synth_path2(params).par(&synth_complete(2, params).unwrap());
        assert_eq!(synth(&expr, params).unwrap(), direct);
        let counts = synth(&expr, params).unwrap().gate_count();
        assert_eq!(counts.total(), 3 + 2 * 2 + 2);

        // Padded inner graph: rungs only on active vertices.
        let padded = WalkExpr::interdep_identity(WalkExpr::Star(2));
        assert!(oracle_distance(&padded, params) <= 1e-10);
    }

    #[test]
    fn interdep_complete_walk() {
        let params = WalkParams { gamma: 1.0, t: 1.7 };
        let expr = WalkExpr::interdep_complete(WalkExpr::Hypercube(4), WalkExpr::Bipartite(2, 2));
        assert!(oracle_distance(&expr, params) <= 1e-10);

        // Unequal degrees refused.
        let bad = WalkExpr::interdep_complete(WalkExpr::Complete(2), WalkExpr::Hypercube(2));
        assert!(matches!(
            synth(&bad, params),
            Err(WalkError::DegreeMismatch { .. })
        ));

        // Swapping the intra and interlink factors leaves the unitary fixed.
        let g1 = graph_of(&WalkExpr::Hypercube(4)).unwrap();
        let g2 = graph_of(&WalkExpr::Bipartite(2, 2)).unwrap();
        let pair = graph::complete_interlink(&g1, &g2).unwrap();
        let whole = synth(&expr, params).unwrap().unitary().unwrap();
        let intra_u = expm_hermitian(&pair.intra().adjacency_f64(), params).unwrap();
        let inter_u = expm_hermitian(&pair.inter().adjacency_f64(), params).unwrap();
        let swapped = matmul(&intra_u, &inter_u).unwrap();
        assert!(dist(&whole, &swapped) <= 1e-10);

        // The interlink graph is exactly the embedded complete bipartite graph.
        assert_eq!(
            pair.inter().adjacency(),
            graph::complete_bipartite(4, 3).unwrap().adjacency()
        );
    }

    #[test]
    fn interdep_complete_handles_global_phases_in_factors() {
        // Complete-graph factors carry a global-phase gate that must turn
        // into a block-selected phase once the copy is controlled.
        let params = WalkParams {
            gamma: 0.37,
            t: 1.9,
        };
        for (e1, e2) in [
            (WalkExpr::Complete(2), WalkExpr::Complete(2)),
            (WalkExpr::Hypercube(3), WalkExpr::Complete(2)),
        ] {
            let expr = WalkExpr::interdep_complete(e1, e2);
            assert!(oracle_distance(&expr, params) <= 1e-10, "{expr}");
        }
    }

    #[test]
    fn commuting_sum_walk() {
        let params = WalkParams { gamma: 1.0, t: 0.9 };
        let pair = graph::identity_interlink(&graph::complete_graph(2).unwrap()).unwrap();

        // Intra circuit: each copy of K4 controlled by the top wire.
        let k4 = synth_complete(2, params).unwrap().embed(3, 1).unwrap();
        let intra_circuit = k4
            .controlled(Control::on_zero(0))
            .unwrap()
            .seq(&k4.controlled(Control::on_one(0)).unwrap())
            .unwrap();
        // Interlink circuit: the rung walk on the top wire.
        let inter_circuit = synth_path2(params).embed(3, 0).unwrap();

        let a = CommutingOperand {
            graph: pair.intra().clone(),
            circuit: intra_circuit,
        };
        let b = CommutingOperand {
            graph: pair.inter().clone(),
            circuit: inter_circuit,
        };
        let joint = synth_commuting_sum(&a, &b).unwrap();
        let direct = synth(&WalkExpr::interdep_identity(WalkExpr::Complete(2)), params).unwrap();
        assert!(dist(&joint.unitary().unwrap(), &direct.unitary().unwrap()) <= 1e-11);

        // Same graph twice: exp(-it 2A).
        let g = graph::complete_graph(2).unwrap();
        let op = CommutingOperand {
            graph: g.clone(),
            circuit: synth_complete(2, params).unwrap(),
        };
        let twice = synth_commuting_sum(&op, &op).unwrap();
        let doubled = expm_hermitian(
            &g.adjacency_f64(),
            WalkParams {
                gamma: params.gamma,
                t: 2.0 * params.t,
            },
        )
        .unwrap();
        assert!(dist(&twice.unitary().unwrap(), &doubled) <= 1e-11);

        // Non-commuting operands refused.
        let x = Graph::from_edges(4, &[(0, 1)], "edge01").unwrap();
        let y = Graph::from_edges(4, &[(1, 2)], "edge12").unwrap();
        let bad = synth_commuting_sum(
            &CommutingOperand {
                graph: x,
                circuit: Circuit::new(2),
            },
            &CommutingOperand {
                graph: y,
                circuit: Circuit::new(2),
            },
        );
        assert!(matches!(bad, Err(WalkError::NonCommuting)));
    }

    #[test]
    fn symmetric_interlink_walk() {
        let params = WalkParams {
            gamma: 1.0,
            t: 1.21,
        };

        // B0 = I: reduces to the one-wire rung walk.
        let all_ones = DiagonalPhaseSpec::new(
            2,
            vec![(vec![WireConstraint::Free, WireConstraint::Free], 1.0)],
        )
        .unwrap();
        let c = synth_symmetric_interlink(&Circuit::new(2), &all_ones, params).unwrap();
        let expect = synth_path2(params).par(&Circuit::new(2));
        assert!(dist(&c.unitary().unwrap(), &expect.unitary().unwrap()) <= 1e-13);
        assert_eq!(c.gate_count().total(), 3);

        // B0 = sigma_x on one wire: composite interlink on 2 wires.
        let mut q0 = Circuit::new(1);
        q0.push(Gate::hadamard(0)).unwrap();
        let zeta0 = DiagonalPhaseSpec::new(
            1,
            vec![
                (vec![WireConstraint::Zero], 1.0),
                (vec![WireConstraint::One], -1.0),
            ],
        )
        .unwrap();
        let c = synth_symmetric_interlink(&q0, &zeta0, params).unwrap();
        // The interlink graph: rungs (0,2) and (1,3) from the two blocks,
        // with B0 edges crossing: B = sigma_x (x) sigma_x.
        let b = Graph::from_edges(4, &[(0, 3), (1, 2)], "sx-sx").unwrap();
        let expect = expm_hermitian(&b.adjacency_f64(), params).unwrap();
        assert!(dist(&c.unitary().unwrap(), &expect) <= 1e-12);

        // t = 0 is the identity.
        let id = synth_symmetric_interlink(&q0, &zeta0, WalkParams { gamma: 1.0, t: 0.0 }).unwrap();
        assert!(dist(&id.unitary().unwrap(), &eye(4)) <= 1e-14);
    }

    #[test]
    fn diagonal_phase_merging() {
        let params = WalkParams { gamma: 1.0, t: 2.0 };

        // The two 1-wire eigenphases merge into a single 2-phase gate.
        let p2 = DiagonalPhaseSpec::new(
            1,
            vec![
                (vec![WireConstraint::Zero], 1.0),
                (vec![WireConstraint::One], -1.0),
            ],
        )
        .unwrap();
        let c = diagonal_phase_circuit(&p2, params).unwrap();
        assert_eq!(c.gate_count().total(), 1);
        assert_eq!(c.gates()[0], Gate::phase2(0, -2.0, 2.0),);

        // Empty spec: identity circuit.
        let empty = DiagonalPhaseSpec::new(3, vec![]).unwrap();
        assert!(diagonal_phase_circuit(&empty, params).unwrap().is_empty());

        // The two K_{8,4} eigenphases share one gate on wire 0 with three
        // on-zero controls.
        let s = 32f64.sqrt();
        let k84 = DiagonalPhaseSpec::new(
            4,
            vec![
                (vec![WireConstraint::Zero; 4], s),
                (
                    vec![
                        WireConstraint::One,
                        WireConstraint::Zero,
                        WireConstraint::Zero,
                        WireConstraint::Zero,
                    ],
                    -s,
                ),
            ],
        )
        .unwrap();
        let c = diagonal_phase_circuit(&k84, params).unwrap();
        assert_eq!(c.gate_count().total(), 1);
        let g = &c.gates()[0];
        assert_eq!(g.target(), Some(0));
        assert_eq!(g.controls.len(), 3);
        assert_eq!(g.angles(), vec![-2.0 * s, 2.0 * s]);

        // Overlapping patterns rejected.
        assert!(matches!(
            DiagonalPhaseSpec::new(
                2,
                vec![
                    (vec![WireConstraint::Free, WireConstraint::Zero], 1.0),
                    (vec![WireConstraint::One, WireConstraint::Free], 2.0),
                ]
            ),
            Err(WalkError::OverlappingPatterns(0, 1))
        ));
    }

    #[test]
    fn dispatch_and_nesting() {
        let params = WalkParams { gamma: 1.0, t: 1.0 };
        assert_eq!(
            synth(&WalkExpr::Book(3), params).unwrap(),
            synth_book(3, params).unwrap()
        );

        let nested = WalkExpr::cartesian(
            WalkExpr::interdep_identity(WalkExpr::Complete(2)),
            WalkExpr::Path2,
        );
        assert!(oracle_distance(&nested, params) <= 1e-10);

        // Every family at its smallest size, t in {0, 1}.
        for t in [0.0, 1.0] {
            let params = WalkParams { gamma: 1.0, t };
            for expr in [
                WalkExpr::Path2,
                WalkExpr::Complete(1),
                WalkExpr::Bipartite(1, 0),
                WalkExpr::Star(1),
                WalkExpr::Hypercube(1),
                WalkExpr::Book(1),
                WalkExpr::cartesian(WalkExpr::Path2, WalkExpr::Path2),
                WalkExpr::interdep_identity(WalkExpr::Path2),
                WalkExpr::interdep_complete(WalkExpr::Path2, WalkExpr::Path2),
            ] {
                assert!(oracle_distance(&expr, params) <= 1e-10, "{expr} at t = {t}");
            }
        }
    }

    #[test]
    fn padded_graphs_act_as_identity_on_padding() {
        let params = WalkParams {
            gamma: 0.37,
            t: 7.3,
        };
        for expr in [
            WalkExpr::Bipartite(3, 2),
            WalkExpr::Star(4),
            WalkExpr::Book(2),
            WalkExpr::interdep_complete(WalkExpr::Hypercube(4), WalkExpr::Bipartite(2, 2)),
        ] {
            let g = graph_of(&expr).unwrap();
            let u = synth(&expr, params).unwrap().unitary().unwrap();
            for v in 0..g.dim() {
                if g.is_active(v) {
                    continue;
                }
                for w in 0..g.dim() {
                    let expect = if v == w {
                        Complex64::ONE
                    } else {
                        Complex64::ZERO
                    };
                    assert!(
                        (u[[w, v]] - expect).norm() <= 1e-12,
                        "{expr}: column {v} row {w}"
                    );
                    assert!(
                        (u[[v, w]] - expect).norm() <= 1e-12,
                        "{expr}: row {v} column {w}"
                    );
                }
            }
        }
    }

    #[test]
    fn angles_are_linear_in_t() {
        let gamma = 0.37;
        for expr in [
            WalkExpr::Complete(3),
            WalkExpr::Bipartite(2, 1),
            WalkExpr::Book(2),
            WalkExpr::interdep_complete(WalkExpr::Hypercube(2), WalkExpr::Bipartite(1, 1)),
        ] {
            for t in [0.5, 7.3] {
                let c1 = synth(&expr, WalkParams { gamma, t }).unwrap();
                let c2 = synth(&expr, WalkParams { gamma, t: 2.0 * t }).unwrap();
                assert_eq!(c1.structure(), c2.structure(), "{expr}");
                for (a1, a2) in c1.angles().iter().zip(c2.angles()) {
                    assert!((2.0 * a1 - a2).abs() <= 1e-12, "{expr}");
                }
            }
        }
    }

    use crate::graph::Graph;
}
