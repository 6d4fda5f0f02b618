//! Conformance and scaling campaigns.
//!
//! Sweeps circuit-vs-oracle distances over a (t, γ) grid, audits the
//! t-independence of gate structure and the linearity of phase angles,
//! contrasts commuting and non-commuting pairs, and emits CSV reports.
//! Grid rows are independent and evaluated in parallel; report assembly is
//! an ordered reduce, so reports are reproducible bit-identically.

use rayon::prelude::*;
use std::fmt::Write as _;

use crate::circuit::Circuit;
use crate::error::{Result, WalkError};
use crate::graph::{Graph, WalkParams};
use crate::oracle::{self, SpectralDecomposition};
use crate::synth::{self, graph_of, WalkExpr};

/// One grid point of a verification sweep.
#[derive(Debug, Clone)]
pub struct VerificationRow {
    pub t: f64,
    pub gamma: f64,
    pub max_dist: f64,
    pub spectral_dist: f64,
    pub gates: usize,
    pub cost2q: usize,
    pub pass: bool,
    /// Synthesis or extraction failure, when one occurred.
    pub error: Option<String>,
}

/// Full sweep result for one expression.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub expr: String,
    pub dim: usize,
    pub tolerance: f64,
    pub rows: Vec<VerificationRow>,
    pub structural_t_independent: bool,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    /// CSV with the fixed header
    /// `expr,dim,t,gamma,max_dist,spec_dist,gates,cost2q,pass`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("expr,dim,t,gamma,max_dist,spec_dist,gates,cost2q,pass\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{:e},{:e},{},{},{}",
                csv_quote(&self.expr),
                self.dim,
                r.t,
                r.gamma,
                r.max_dist,
                r.spectral_dist,
                r.gates,
                r.cost2q,
                r.pass
            )
            .expect("string write");
        }
        out
    }
}

fn csv_quote(field: &str) -> String {
    if field.contains(',') || field.contains('"') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Verify an expression's circuits against the oracle over the full
/// (t, γ) grid. The eigendecomposition is computed once and reused.
pub fn verify(
    expr: &WalkExpr,
    t_list: &[f64],
    gamma_list: &[f64],
    tol: f64,
    cap_wires: usize,
) -> Result<VerificationReport> {
    let graph = graph_of(expr)?;
    if graph.wires() > cap_wires {
        return Err(WalkError::ResourceLimit {
            what: "verification wires",
            value: graph.wires(),
            cap: cap_wires,
        });
    }
    let dec = oracle::eig_hermitian(&graph.adjacency_f64())?;

    let grid: Vec<(f64, f64)> = t_list
        .iter()
        .flat_map(|&t| gamma_list.iter().map(move |&gamma| (t, gamma)))
        .collect();

    let rows: Vec<VerificationRow> = grid
        .par_iter()
        .map(|&(t, gamma)| grid_row(expr, &dec, t, gamma, tol, cap_wires))
        .collect();

    // Non-finite time values already show up as failed rows; audit the
    // structure over the finite ones.
    let finite_ts: Vec<f64> = t_list.iter().copied().filter(|t| t.is_finite()).collect();
    let structural_t_independent = if finite_ts.len() >= 2 {
        t_independence(expr, &finite_ts)?
    } else {
        true
    };

    Ok(VerificationReport {
        expr: expr.to_string(),
        dim: graph.dim(),
        tolerance: tol,
        rows,
        structural_t_independent,
    })
}

fn grid_row(
    expr: &WalkExpr,
    dec: &SpectralDecomposition,
    t: f64,
    gamma: f64,
    tol: f64,
    cap_wires: usize,
) -> VerificationRow {
    let failed = |error: String| VerificationRow {
        t,
        gamma,
        max_dist: f64::NAN,
        spectral_dist: f64::NAN,
        gates: 0,
        cost2q: 0,
        pass: false,
        error: Some(error),
    };
    let params = match WalkParams::new(gamma, t) {
        Ok(p) => p,
        Err(e) => return failed(e.to_string()),
    };
    let circuit = match synth::synth(expr, params) {
        Ok(c) => c,
        Err(e) => return failed(e.to_string()),
    };
    let unitary = match circuit.unitary_with_cap(cap_wires) {
        Ok(u) => u,
        Err(e) => return failed(e.to_string()),
    };
    let reference = dec.evolution(params);
    let distance = oracle::unitary_distance(&unitary, &reference).expect("equal dims");
    let counts = circuit.gate_count();
    VerificationRow {
        t,
        gamma,
        max_dist: distance.max_entrywise,
        spectral_dist: distance.spectral,
        gates: counts.total(),
        cost2q: circuit.two_qubit_cost(),
        pass: distance.max_entrywise <= tol,
        error: None,
    }
}

/// True iff the gate structure is identical across every `t` and every angle
/// is a linear function of `t`.
pub fn t_independence(expr: &WalkExpr, t_list: &[f64]) -> Result<bool> {
    if t_list.len() < 2 {
        return Err(WalkError::InvalidArgument(
            "t-independence needs at least two time values".into(),
        ));
    }
    let gamma = 1.0;
    t_independence_of(|t| synth::synth(expr, WalkParams { gamma, t }), t_list)
}

/// Structure/linearity audit over any synthesizer function (used with a
/// deliberately broken one as the harness's negative control).
pub fn t_independence_of(
    synth_at: impl Fn(f64) -> Result<Circuit>,
    t_list: &[f64],
) -> Result<bool> {
    let circuits: Vec<Circuit> = t_list.iter().map(|&t| synth_at(t)).collect::<Result<_>>()?;
    let reference = &circuits[0];
    for c in &circuits[1..] {
        if c.structure() != reference.structure() {
            return Ok(false);
        }
    }

    // Angles must satisfy angle(t_i) * t_j = angle(t_j) * t_i exactly up to
    // rounding: every angle is slope * t for a t-independent slope.
    let anchor = match t_list.iter().position(|&t| t != 0.0) {
        Some(i) => i,
        None => return Ok(true),
    };
    let anchor_angles = circuits[anchor].angles();
    let t_anchor = t_list[anchor];
    for (i, c) in circuits.iter().enumerate() {
        let t = t_list[i];
        for (a, a0) in c.angles().iter().zip(&anchor_angles) {
            let lhs = a * t_anchor;
            let rhs = a0 * t;
            let scale = lhs.abs().max(rhs.abs()).max(1.0);
            if (lhs - rhs).abs() > 1e-12 * scale {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Scaling
// ---------------------------------------------------------------------------

/// Graph family selectable by name in scaling campaigns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Path2,
    Complete,
    Bipartite,
    Star,
    Hypercube,
    Book,
}

impl std::str::FromStr for Family {
    type Err = WalkError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "path2" => Ok(Family::Path2),
            "complete" => Ok(Family::Complete),
            "bipartite" => Ok(Family::Bipartite),
            "star" => Ok(Family::Star),
            "hypercube" => Ok(Family::Hypercube),
            "book" => Ok(Family::Book),
            other => Err(WalkError::InvalidArgument(format!(
                "unknown family `{other}`; expected one of path2, complete, bipartite, \
                 star, hypercube, book"
            ))),
        }
    }
}

impl Family {
    /// The family member of the given size; `bipartite` pairs each size m
    /// with m - 1 to exercise the padded embedding.
    pub fn expr(self, size: u32) -> Result<WalkExpr> {
        let expr = match self {
            Family::Path2 => WalkExpr::Path2,
            Family::Complete => WalkExpr::Complete(size),
            Family::Bipartite => WalkExpr::Bipartite(size, size.saturating_sub(1)),
            Family::Star => WalkExpr::Star(size),
            Family::Hypercube => WalkExpr::Hypercube(size),
            Family::Book => WalkExpr::Book(size),
        };
        expr.validate()?;
        Ok(expr)
    }
}

/// One size point of a scaling campaign.
#[derive(Debug, Clone)]
pub struct ScalingRow {
    pub size: u32,
    pub dim: usize,
    pub wires: usize,
    pub gates: usize,
    pub cost2q: usize,
    /// Oracle distance, filled when the dimension is under the cap.
    pub max_dist: Option<f64>,
    pub pass: Option<bool>,
}

/// Scaling table with the fitted log-log cost exponent.
#[derive(Debug, Clone)]
pub struct ScalingTable {
    pub family: String,
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of ln(cost2q) against ln(wires).
    pub fitted_exponent: f64,
}

impl ScalingTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("family,size,dim,wires,gates,cost2q,max_dist,pass\n");
        for r in &self.rows {
            let dist = r.max_dist.map_or(String::new(), |d| format!("{d:e}"));
            let pass = r.pass.map_or(String::new(), |p| p.to_string());
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                self.family, r.size, r.dim, r.wires, r.gates, r.cost2q, dist, pass
            )
            .expect("string write");
        }
        writeln!(out, "# fitted_exponent,{:e}", self.fitted_exponent).expect("string write");
        out
    }
}

/// Gate-count and cost rows across family sizes; circuit-vs-oracle
/// verification fills in wherever the dimension fits under the cap,
/// larger sizes count gates only.
pub fn scaling(
    family: Family,
    sizes: &[u32],
    params: WalkParams,
    tol: f64,
    cap_wires: usize,
) -> Result<ScalingTable> {
    let mut rows = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let expr = family.expr(size)?;
        let graph = graph_of(&expr)?;
        let circuit = synth::synth(&expr, params)?;
        let (max_dist, pass) = if graph.wires() <= cap_wires {
            let u = circuit.unitary_with_cap(cap_wires)?;
            let reference = oracle::expm_hermitian(&graph.adjacency_f64(), params)?;
            let d = oracle::unitary_distance(&u, &reference)?.max_entrywise;
            (Some(d), Some(d <= tol))
        } else {
            (None, None)
        };
        rows.push(ScalingRow {
            size,
            dim: graph.dim(),
            wires: graph.wires(),
            gates: circuit.gate_count().total(),
            cost2q: circuit.two_qubit_cost(),
            max_dist,
            pass,
        });
    }

    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.wires >= 1 && r.cost2q >= 1)
        .map(|r| ((r.wires as f64).ln(), (r.cost2q as f64).ln()))
        .collect();
    let fitted_exponent = least_squares_slope(&points);

    Ok(ScalingTable {
        family: format!("{family:?}").to_lowercase(),
        rows,
        fitted_exponent,
    })
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return 0.0;
    }
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-30 {
        return 0.0;
    }
    (n * sxy - sx * sy) / denom
}

// ---------------------------------------------------------------------------
// Commuting-pair demonstration
// ---------------------------------------------------------------------------

/// One time point of a product-formula comparison.
#[derive(Debug, Clone)]
pub struct CommutingRow {
    pub t: f64,
    pub commutes: bool,
    pub gap: f64,
}

/// Per-t product-formula gap for a pair of graphs, next to the exact
/// commutator verdict: the gap sits at numerical noise exactly when the
/// adjacency matrices commute.
pub fn commuting_demo(a: &Graph, b: &Graph, t_list: &[f64]) -> Result<Vec<CommutingRow>> {
    let commutes = crate::graph::commutes(a, b)?;
    t_list
        .iter()
        .map(|&t| {
            let gap = oracle::product_formula_gap(a, b, WalkParams { gamma: 1.0, t })?;
            Ok(CommutingRow { t, commutes, gap })
        })
        .collect()
}

pub fn commuting_demo_csv(rows: &[CommutingRow]) -> String {
    let mut out = String::from("t,commutes,gap\n");
    for r in rows {
        writeln!(out, "{},{},{:e}", r.t, r.commutes, r.gap).expect("string write");
    }
    out
}

/// The documented non-commuting negative control: two single-edge graphs in
/// dimension 4 sharing vertex 1, so `[A, B] != 0` and the product formula
/// has an order-one gap at t = 1.
pub fn noncommuting_pair_dim4() -> (Graph, Graph) {
    let a = Graph::from_edges(4, &[(0, 1)], "edge(0,1)").expect("static graph");
    let b = Graph::from_edges(4, &[(1, 2)], "edge(1,2)").expect("static graph");
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;
    use crate::graph;

    #[test]
    fn verify_hypercube_grid() {
        let expr = WalkExpr::Hypercube(4);
        let report = verify(&expr, &[0.0, 1.0, std::f64::consts::PI], &[1.0], 1e-9, 12).unwrap();
        assert_eq!(report.dim, 16);
        assert_eq!(report.rows.len(), 3);
        assert!(report.all_pass());
        assert!(report.structural_t_independent);
        // t = 0 rows sit at numerical zero.
        assert!(report.rows[0].max_dist <= 1e-12);

        let csv = report.to_csv();
        assert!(csv.starts_with("expr,dim,t,gamma,max_dist,spec_dist,gates,cost2q,pass\n"));
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.contains("hypercube(4),16,0,1,"));
    }

    #[test]
    fn verify_interdep_composite() {
        let expr = WalkExpr::interdep_complete(WalkExpr::Hypercube(4), WalkExpr::Bipartite(2, 2));
        let report = verify(&expr, &[0.5, 2.5], &[1.0, 0.37], 1e-9, 12).unwrap();
        assert_eq!(report.dim, 32);
        assert_eq!(report.rows.len(), 4);
        assert!(report.all_pass());
    }

    #[test]
    fn verify_respects_cap() {
        let err = verify(&WalkExpr::Hypercube(8), &[1.0], &[1.0], 1e-9, 5).unwrap_err();
        assert!(matches!(err, WalkError::ResourceLimit { .. }));
    }

    #[test]
    fn verify_records_failed_rows() {
        // An expression that cannot even build its graph is a hard error.
        let expr = WalkExpr::interdep_complete(WalkExpr::Complete(2), WalkExpr::Hypercube(2));
        assert!(verify(&expr, &[1.0], &[1.0], 1e-9, 12).is_err());

        // A bad grid point becomes a failed row with the reason attached,
        // without poisoning the rest of the report.
        let report = verify(&WalkExpr::Path2, &[f64::NAN, 1.0], &[1.0], 1e-9, 12).unwrap();
        assert_eq!(report.rows.len(), 2);
        assert!(!report.rows[0].pass);
        assert!(report.rows[0].error.as_ref().unwrap().contains("finite"));
        assert!(report.rows[1].pass);
        assert!(!report.all_pass());
    }

    #[test]
    fn t_independence_of_families() {
        let ts = [0.1, 1.0, 7.3, 31.4];
        for expr in [
            WalkExpr::Path2,
            WalkExpr::Complete(3),
            WalkExpr::Bipartite(3, 2),
            WalkExpr::Book(2),
            WalkExpr::interdep_identity(WalkExpr::Complete(2)),
        ] {
            assert!(t_independence(&expr, &ts).unwrap(), "{expr}");
        }
        assert!(t_independence(&WalkExpr::Path2, &[1.0]).is_err());
    }

    #[test]
    fn broken_synthesizer_is_caught() {
        // Gate count depending on t: structure differs.
        let structurally_broken = |t: f64| -> Result<Circuit> {
            let mut c = Circuit::new(1);
            c.push(Gate::hadamard(0))?;
            if t > 1.0 {
                c.push(Gate::not(0))?;
            }
            Ok(c)
        };
        assert!(!t_independence_of(structurally_broken, &[0.5, 2.0]).unwrap());

        // Angles non-linear in t: same structure, broken scaling.
        let nonlinear = |t: f64| -> Result<Circuit> {
            let mut c = Circuit::new(1);
            c.push(Gate::phase2(0, t * t, -t))?;
            Ok(c)
        };
        assert!(!t_independence_of(nonlinear, &[0.5, 2.0]).unwrap());

        // The real synthesizer under the same audit passes.
        let honest =
            |t: f64| -> Result<Circuit> { Ok(synth::synth_path2(WalkParams { gamma: 1.0, t })) };
        assert!(t_independence_of(honest, &[0.5, 2.0]).unwrap());
    }

    #[test]
    fn scaling_counts_are_exact() {
        let params = WalkParams::default();
        let sizes: Vec<u32> = (1..=10).collect();
        let table = scaling(Family::Hypercube, &sizes, params, 1e-9, 10).unwrap();
        for (row, n) in table.rows.iter().zip(1usize..) {
            assert_eq!(row.gates, 3 * n);
            assert_eq!(row.cost2q, 3 * n);
        }
        // Verified wherever the dimension fits under the cap.
        assert!(table.rows[5].pass.unwrap());
        assert!((table.fitted_exponent - 1.0).abs() < 0.2);

        let table = scaling(Family::Complete, &sizes, params, 1e-9, 8).unwrap();
        for (row, m) in table.rows.iter().zip(1usize..) {
            assert_eq!(row.gates, 2 * m + 2);
        }
        // Count-only rows beyond the cap.
        assert!(table.rows[9].max_dist.is_none());
        assert!(table.rows[5].pass.unwrap());

        // Cap 9 wires so every padded bipartite row, including the
        // subnormal-noise regression case (7, 6), is verified, not count-only.
        let sizes: Vec<u32> = (2..=8).collect();
        let table = scaling(Family::Bipartite, &sizes, params, 1e-9, 9).unwrap();
        assert!(table.rows.iter().all(|r| r.pass == Some(true)));
        assert!(
            table.fitted_exponent <= 2.0,
            "fitted exponent {}",
            table.fitted_exponent
        );
        let csv = table.to_csv();
        assert!(csv.starts_with("family,size,dim,wires,gates,cost2q,max_dist,pass\n"));
        assert!(csv.contains("# fitted_exponent,"));
    }

    #[test]
    fn cost_grows_at_most_quadratically_in_wires_for_every_family() {
        let params = WalkParams::default();
        for family in [
            Family::Complete,
            Family::Bipartite,
            Family::Star,
            Family::Hypercube,
            Family::Book,
        ] {
            let sizes: Vec<u32> = (1..=8).collect();
            let sizes = if family == Family::Bipartite {
                (2..=8).collect()
            } else {
                sizes
            };
            let table = scaling(family, &sizes, params, 1e-9, 4).unwrap();
            assert!(
                table.fitted_exponent <= 2.0,
                "{family:?}: exponent {}",
                table.fitted_exponent
            );
        }
    }

    #[test]
    fn scaling_rejects_unknown_family() {
        assert!("pentagon".parse::<Family>().is_err());
        assert_eq!("book".parse::<Family>().unwrap(), Family::Book);
    }

    #[test]
    fn reports_are_reproducible_bit_identically() {
        let expr = WalkExpr::interdep_identity(WalkExpr::Complete(2));
        let ts = [0.0, 0.5, 7.3];
        let gammas = [1.0, 0.37];
        let first = verify(&expr, &ts, &gammas, 1e-9, 12).unwrap().to_csv();
        let second = verify(&expr, &ts, &gammas, 1e-9, 12).unwrap().to_csv();
        assert_eq!(first, second);
    }

    #[test]
    fn oracle_walks_stay_unitary_across_the_time_grid() {
        let ts = [
            0.0,
            0.5,
            1.0,
            std::f64::consts::PI,
            10.0 * std::f64::consts::PI,
        ];
        for expr in [
            WalkExpr::Complete(3),
            WalkExpr::Bipartite(3, 2),
            WalkExpr::Hypercube(7),
            WalkExpr::Book(3),
        ] {
            let dec =
                crate::oracle::eig_hermitian(&graph_of(&expr).unwrap().adjacency_f64()).unwrap();
            for &t in &ts {
                let u = dec.evolution(WalkParams { gamma: 1.0, t });
                assert!(
                    crate::oracle::unitarity_deviation(&u) <= 1e-11,
                    "{expr} at t = {t}"
                );
            }
        }
    }

    #[test]
    fn commuting_demo_contrast() {
        let pair = graph::identity_interlink(&graph::complete_graph(2).unwrap()).unwrap();
        let rows = commuting_demo(pair.intra(), pair.inter(), &[0.5, 2.5]).unwrap();
        for r in &rows {
            assert!(r.commutes);
            assert!(r.gap <= 1e-10);
        }

        let (a, b) = noncommuting_pair_dim4();
        let rows = commuting_demo(&a, &b, &[1.0]).unwrap();
        assert!(!rows[0].commutes);
        assert!(rows[0].gap > 1e-3);
        let csv = commuting_demo_csv(&rows);
        assert!(csv.starts_with("t,commutes,gap\n"));
    }
}
