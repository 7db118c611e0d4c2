//! Gluing hyperbolic plugs along boundary tori.
//!
//! A gluing identifies exit tori with entrance tori through affine torus
//! maps.  The combinatorics follow the flow.  On each seam the exit
//! lamination is pushed through the gluing map and compared with the
//! entrance lamination: every piece of either lamination is cut by its
//! crossings with the other.  Compact leaves with no crossings survive and
//! are carried whole, as new compact leaves, to the next boundary torus
//! along the gap routes; everything that is cut dies on the seam, and its
//! cut segments travel the same routes as band content (crossing arcs,
//! winding leaves, or foliated material).  Content arriving on a torus that
//! carries a boundary foliation is absorbed — dynamically it accumulates on
//! the attracting set behind the foliation — and content whose destination
//! disappears in a fully closed gluing is sealed inside the manifold.
//!
//! Each seam is certified before any bookkeeping: strong transversality
//! when both sides fill, with a fallback to plain slope separation when a
//! side has annulus gaps.  Geometrically degenerate seams (coincident or
//! magnitude-clashing slopes) are refused outright.
//!
//! The result is wrapped as a [`ClosedModel`]: the glued plug, the
//! transitivity graph over its basic pieces, the per-seam certificates, an
//! Anosov status verdict, and a manifold descriptor.  Open results (partial
//! gluings) use the same wrapper with an explanatory note; their cyclically
//! connected pieces are merged, since a cycle of connections makes one
//! chain-transitive piece of the glued plug.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{One, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::arrangement::{
    point_at, pushed_offset, slope_separation, strong_transverse, transit_geometry,
    FailureWitness, GluingCrossings, Piece, PieceKind as RenderKind, StrongCert, TransitGeometry,
    Transversality,
};
use crate::error::{Error, Result};
use crate::foliation::{
    BandFill, ContentDeposit, DepositKind, Leaf, LeafInsertion, TorusLamination, TorusMap,
};
use crate::plug::{BasicPiece, BoundaryTorus, GapRoute, Multipliers, PieceKind, Plug};
use crate::{frac, rat, Rat};

// ---------------------------------------------------------------------------
// Specification and outcome types
// ---------------------------------------------------------------------------

/// One seam of a gluing: an exit torus identified with an entrance torus
/// through an affine map of the torus.
#[derive(Debug, Clone, PartialEq)]
pub struct GluingPair {
    /// Id of the exit torus whose lamination is pushed through the map.
    pub exit: String,
    /// Id of the entrance torus receiving it.
    pub entrance: String,
    /// The gluing map, in the exit chart, landing in the entrance chart.
    pub map: TorusMap,
    /// Extra reversal of contracting orientations applied to leaves carried
    /// across this seam (a gluing composed with the fiberwise involution).
    pub flip: bool,
}

impl GluingPair {
    /// A plain seam with no extra orientation flip.
    pub fn new(exit: &str, entrance: &str, map: TorusMap) -> GluingPair {
        GluingPair { exit: exit.into(), entrance: entrance.into(), map, flip: false }
    }
}

/// A full gluing request: a set of disjoint seams.
#[derive(Debug, Clone, PartialEq)]
pub struct GluingSpec {
    pub pairs: Vec<GluingPair>,
}

/// Transversality evidence recorded for one seam.
#[derive(Debug, Clone, PartialEq)]
pub enum PairCertificate {
    /// Both sides fill and the strong-transversality check passed.
    Strong(StrongCert),
    /// Only the slope-separation condition holds (some side has annulus
    /// gaps, or the joint arrangement has non-quadrilateral faces).
    Transverse {
        /// Smallest slope difference over all overlapping segment pairs.
        min_slope_gap: f64,
        /// Total crossings between the rendered families.
        crossings: usize,
    },
}

impl PairCertificate {
    pub fn is_strong(&self) -> bool {
        matches!(self, PairCertificate::Strong(_))
    }
}

/// Everything recorded about one processed seam.
#[derive(Debug, Clone, PartialEq)]
pub struct PairOutcome {
    pub exit: String,
    pub entrance: String,
    pub certificate: PairCertificate,
    /// Per-leaf and total crossing counts of the seam.
    pub crossings: GluingCrossings,
}

/// How far the engine can vouch for the glued flow being Anosov.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnosovStatus {
    /// Closed, every summand purely attracting or repelling, every seam
    /// receiving a boundary foliation: the glued field is Anosov as it
    /// stands.
    Direct,
    /// Closed gluing of a saddle plug with filling laminations and strong
    /// certificates on every seam: an Anosov representative exists after a
    /// strong isotopy of the gluing maps.
    Realizable,
    /// Neither hypothesis set was verified (open results included).
    NotCertified,
}

impl fmt::Display for AnosovStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AnosovStatus::Direct => "direct",
            AnosovStatus::Realizable => "realizable",
            AnosovStatus::NotCertified => "not_certified",
        })
    }
}

/// The directed graph whose vertices are basic pieces and whose edges say
/// "the unstable set of `i` meets the stable set of `j`".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitivityGraph {
    /// Piece ids, indexed as in the plug.
    pub nodes: Vec<String>,
    /// Directed edges, including the reflexive ones.
    pub edges: BTreeSet<(usize, usize)>,
}

/// Topological summary of the glued manifold: the (sorted) list of
/// geometric labels of its torus-decomposition pieces and the isotopy
/// classes of the gluing matrices, each normalized up to sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifoldDescriptor {
    pub jsj: Vec<String>,
    pub gluings: Vec<[[i64; 2]; 2]>,
}

impl ManifoldDescriptor {
    fn new<I: IntoIterator<Item = [[i64; 2]; 2]>>(jsj_label: &str, matrices: I) -> ManifoldDescriptor {
        let mut jsj: Vec<String> = jsj_label.split('+').map(str::to_string).collect();
        jsj.sort();
        let mut gluings: Vec<[[i64; 2]; 2]> = matrices.into_iter().map(canonical_matrix).collect();
        gluings.sort_unstable();
        ManifoldDescriptor { jsj, gluings }
    }
}

/// A gluing matrix up to isotopy of the glued manifold: the translation
/// part is forgotten and the matrix is normalized so its first nonzero
/// entry is positive (`M` and `-M` induce the same identification).
fn canonical_matrix(m: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    let flat = [m[0][0], m[0][1], m[1][0], m[1][1]];
    match flat.iter().find(|&&v| v != 0) {
        Some(&v) if v < 0 => [[-m[0][0], -m[0][1]], [-m[1][0], -m[1][1]]],
        _ => m,
    }
}

/// Result of a (possibly partial) self-gluing.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedModel {
    /// The glued plug; closed when every boundary torus was consumed.
    pub plug: Plug,
    /// Transitivity graph of the glued plug.
    pub graph: TransitivityGraph,
    /// Outcomes per seam, in exit-torus order.
    pub pairs: Vec<PairOutcome>,
    /// The certification verdict.
    pub status: AnosovStatus,
    /// Strong connectivity of the transitivity graph.
    pub transitive: bool,
    /// Topological summary of the result.
    pub descriptor: ManifoldDescriptor,
    /// Deterministic remarks: absorbed or sealed content, merged pieces,
    /// remaining boundary.
    pub notes: Vec<String>,
}

// ---------------------------------------------------------------------------
// Transitivity certification
// ---------------------------------------------------------------------------

/// The transitivity graph of a plug: its pieces and connection relation.
pub fn transitivity_graph(plug: &Plug) -> TransitivityGraph {
    TransitivityGraph {
        nodes: plug.pieces.iter().map(|p| p.id.clone()).collect(),
        edges: plug.connections.clone(),
    }
}

/// Strong connectivity of the transitivity graph: every basic piece reaches
/// every other through the connection relation.  This is the combinatorial
/// transitivity criterion for a glued flow; the empty graph is an error
/// rather than vacuously transitive.
pub fn is_combinatorially_transitive(graph: &TransitivityGraph) -> Result<bool> {
    let n = graph.nodes.len();
    if n == 0 {
        return Err(Error::Degenerate("transitivity graph has no nodes".into()));
    }
    for &(i, j) in &graph.edges {
        if i >= n || j >= n {
            return Err(Error::BoundaryMismatch(format!(
                "transitivity edge ({i}, {j}) out of range for {n} nodes"
            )));
        }
    }
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, graph.edges.len());
    let idx: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for &(i, j) in &graph.edges {
        if i != j {
            g.add_edge(idx[i], idx[j], ());
        }
    }
    Ok(tarjan_scc(&g).len() == 1)
}

/// DOT export of a transitivity graph (self-loops omitted for legibility).
pub fn transitivity_dot(graph: &TransitivityGraph) -> String {
    let mut out = String::from("digraph transitivity {\n");
    for (i, name) in graph.nodes.iter().enumerate() {
        out.push_str(&format!("  n{i} [label=\"{name}\"];\n"));
    }
    for &(i, j) in &graph.edges {
        if i != j {
            out.push_str(&format!("  n{i} -> n{j};\n"));
        }
    }
    out.push_str("}\n");
    out
}

// ---------------------------------------------------------------------------
// Gluing
// ---------------------------------------------------------------------------

/// Glue two plugs along the seams of `spec`.  The disjoint union is formed
/// first, so torus ids must be distinct across the two plugs; the returned
/// plug keeps every unglued torus (with its lamination extended by the
/// carried material) and stays open unless every torus was consumed.
pub fn glue(a: &Plug, b: &Plug, spec: &GluingSpec) -> Result<Plug> {
    let union = Plug::disjoint_union(a, b)?;
    Ok(self_glue(&union, spec)?.plug)
}

/// Glue a plug to itself along the seams of `spec` and certify the result.
///
/// Every seam is certified (strong transversality, with a slope-separation
/// fallback), the laminations are cut and transported, the remaining
/// boundary tori are rebuilt, and the verdicts — Anosov status, transitivity
/// — are attached.  A partial gluing returns the open plug wrapped in the
/// same [`ClosedModel`] with a note; seams that fail even the slope
/// condition are refused with [`Error::NotTransverse`].
pub fn self_glue(p: &Plug, spec: &GluingSpec) -> Result<ClosedModel> {
    p.validate()?;

    let mut resolved: Vec<(usize, usize, &GluingPair)> = Vec::with_capacity(spec.pairs.len());
    for pair in &spec.pairs {
        let exit_idx = p.exit_index(&pair.exit).ok_or_else(|| {
            Error::BoundaryMismatch(format!("no exit torus `{}` in plug `{}`", pair.exit, p.id))
        })?;
        let ent_idx = p.entrance_index(&pair.entrance).ok_or_else(|| {
            Error::BoundaryMismatch(format!(
                "no entrance torus `{}` in plug `{}`",
                pair.entrance, p.id
            ))
        })?;
        resolved.push((exit_idx, ent_idx, pair));
    }
    resolved.sort_by_key(|r| r.0);
    let mut consumed_exit = BTreeSet::new();
    let mut consumed_ent = BTreeSet::new();
    for &(xi, ri, pair) in &resolved {
        if !consumed_exit.insert(xi) {
            return Err(Error::BoundaryMismatch(format!(
                "exit torus `{}` glued twice",
                pair.exit
            )));
        }
        if !consumed_ent.insert(ri) {
            return Err(Error::BoundaryMismatch(format!(
                "entrance torus `{}` glued twice",
                pair.entrance
            )));
        }
    }
    let closed = consumed_exit.len() == p.exit.len() && consumed_ent.len() == p.entrance.len();

    let mut outcomes = Vec::new();
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut ent_changes: BTreeMap<usize, TorusChanges> = BTreeMap::new();
    let mut exit_changes: BTreeMap<usize, TorusChanges> = BTreeMap::new();
    let mut notes = Vec::new();
    let mut all_strong = true;

    for &(exit_idx, ent_idx, pair) in &resolved {
        let etor = &p.exit[exit_idx];
        let rtor = &p.entrance[ent_idx];
        let seed = certify(&etor.lamination, &pair.map, &rtor.lamination, &pair.exit, &pair.entrance)?;
        let geo = transit_geometry(&etor.lamination, &pair.map, &rtor.lamination)?;
        let certificate = match seed {
            CertSeed::Strong(cert) => PairCertificate::Strong(cert),
            CertSeed::Weak(gap) => {
                all_strong = false;
                PairCertificate::Transverse { min_slope_gap: gap, crossings: geo.crossings.len() }
            }
        };

        // A crossing on the seam is a point of W^u meeting W^s: an edge of
        // the transitivity graph for every piece owning material there.
        for c in &geo.crossings {
            for &i in &render_owners(geo.pushed.pieces[c.pushed_piece].kind, etor) {
                for &j in &render_owners(geo.receiving.pieces[c.receiving_piece].kind, rtor) {
                    edges.insert((i, j));
                }
            }
        }

        transport(
            p,
            exit_idx,
            ent_idx,
            pair,
            &geo,
            closed,
            &consumed_ent,
            &consumed_exit,
            &mut ent_changes,
            &mut exit_changes,
            &mut notes,
        )?;

        outcomes.push(PairOutcome {
            exit: pair.exit.clone(),
            entrance: pair.entrance.clone(),
            certificate,
            crossings: tally_crossings(&geo, etor.lamination.n_leaves(), rtor.lamination.n_leaves()),
        });
    }

    let status = decide_status(p, &resolved, closed, all_strong);

    let mut entrance = Vec::new();
    for (i, torus) in p.entrance.iter().enumerate() {
        if !consumed_ent.contains(&i) {
            entrance.push(apply_changes(torus, ent_changes.get(&i))?);
        }
    }
    let mut exit = Vec::new();
    for (i, torus) in p.exit.iter().enumerate() {
        if !consumed_exit.contains(&i) {
            exit.push(apply_changes(torus, exit_changes.get(&i))?);
        }
    }

    let mut connections = p.connections.clone();
    connections.extend(edges.iter().copied());
    let pieces = if closed {
        p.pieces.clone()
    } else {
        let (merged, conn) =
            merge_cyclic_pieces(&p.pieces, &connections, &mut entrance, &mut exit, &mut notes);
        connections = conn;
        merged
    };

    let routes = if closed { Vec::new() } else { greedy_routes(&entrance, &exit)? };
    if !closed {
        notes.push(format!(
            "open result: {} entrance and {} exit tori remain",
            entrance.len(),
            exit.len()
        ));
    }

    let plug = Plug {
        id: p.id.clone(),
        pieces,
        entrance,
        exit,
        connections,
        routes,
        metadata: p.metadata.clone(),
    };
    plug.validate()?;

    let graph = transitivity_graph(&plug);
    let transitive = is_combinatorially_transitive(&graph)?;
    let descriptor =
        ManifoldDescriptor::new(&plug.metadata.jsj_label, resolved.iter().map(|r| r.2.map.matrix));

    Ok(ClosedModel { plug, graph, pairs: outcomes, status, transitive, descriptor, notes })
}

// ---------------------------------------------------------------------------
// Seam certification
// ---------------------------------------------------------------------------

enum CertSeed {
    Strong(StrongCert),
    Weak(f64),
}

/// The certification ladder for one seam: strong transversality when both
/// sides fill; otherwise (annulus gaps, or a face-condition failure on an
/// otherwise separated arrangement) plain slope separation.  Coincident
/// curves and magnitude clashes are refused — their crossing combinatorics
/// would be meaningless.
fn certify(
    pushed: &TorusLamination,
    map: &TorusMap,
    receiving: &TorusLamination,
    exit_id: &str,
    ent_id: &str,
) -> Result<CertSeed> {
    match strong_transverse(pushed, map, receiving) {
        Ok(Transversality::Strong(cert)) => return Ok(CertSeed::Strong(cert)),
        Ok(Transversality::Failed(w)) => match w {
            FailureWitness::Coincident { .. } | FailureWitness::SlopeClash { .. } => {
                return Err(Error::NotTransverse(format!("pair `{exit_id}` -> `{ent_id}`: {w}")));
            }
            FailureWitness::BadFace { .. } | FailureWitness::AnnulusWitness { .. } => {}
        },
        Err(Error::NotFilling(_)) => {}
        Err(e) => return Err(e),
    }
    match slope_separation(pushed, map, receiving)? {
        Ok(gap) => Ok(CertSeed::Weak(gap)),
        Err(w) => Err(Error::NotTransverse(format!("pair `{exit_id}` -> `{ent_id}`: {w}"))),
    }
}

/// Per-compact-leaf crossing totals of a seam, derived from the located
/// crossings so the gluing decisions and the counts agree by construction.
fn tally_crossings(geo: &TransitGeometry, n_pushed: usize, n_receiving: usize) -> GluingCrossings {
    let mut pushed_leaf = vec![0usize; n_pushed];
    let mut receiving_leaf = vec![0usize; n_receiving];
    for c in &geo.crossings {
        if let RenderKind::CompactLeaf(i) = geo.pushed.pieces[c.pushed_piece].kind {
            pushed_leaf[i] += 1;
        }
        if let RenderKind::CompactLeaf(i) = geo.receiving.pieces[c.receiving_piece].kind {
            receiving_leaf[i] += 1;
        }
    }
    GluingCrossings { pushed_leaf, receiving_leaf, total: geo.crossings.len() }
}

/// Pieces whose invariant manifolds own material of a rendered curve: the
/// leaf's owner for a compact leaf, plus every piece whose trace is dense
/// in the torus lamination (dense traces accumulate on all of it).
fn render_owners(kind: RenderKind, torus: &BoundaryTorus) -> BTreeSet<usize> {
    let mut owners: BTreeSet<usize> = torus.dense_pieces.iter().copied().collect();
    if let RenderKind::CompactLeaf(i) = kind {
        owners.insert(torus.lamination.leaves[i].owner);
    }
    owners
}

// ---------------------------------------------------------------------------
// Transport
// ---------------------------------------------------------------------------

/// Accumulated edits to one surviving boundary torus.
#[derive(Default)]
struct TorusChanges {
    insertions: Vec<LeafInsertion>,
    deposits: Vec<ContentDeposit>,
    /// Dense-piece declarations inherited from the tori whose winding or
    /// foliated content was carried here.
    dense: BTreeSet<usize>,
}

/// Cut both laminations of one seam at their mutual crossings and carry the
/// pieces along the gap routes; survivors are carried whole.
#[allow(clippy::too_many_arguments)]
fn transport(
    p: &Plug,
    exit_idx: usize,
    ent_idx: usize,
    pair: &GluingPair,
    geo: &TransitGeometry,
    closed: bool,
    consumed_ent: &BTreeSet<usize>,
    consumed_exit: &BTreeSet<usize>,
    ent_changes: &mut BTreeMap<usize, TorusChanges>,
    exit_changes: &mut BTreeMap<usize, TorusChanges>,
    notes: &mut Vec<String>,
) -> Result<()> {
    let etor = &p.exit[exit_idx];
    let rtor = &p.entrance[ent_idx];
    // The renderer pushes the exit family through the map composed with a
    // vertical stagger; receiving-side material must come back through the
    // same lifted map to land in the exit chart exactly.
    let lifted_inv =
        TorusMap::translation((Rat::zero(), pushed_offset())).compose(&pair.map).inverse();
    let vertical = pair.map.matrix[0][1] == 0;
    let class_flip = pair.map.matrix[1][1] < 0;
    let mut absorbed = 0usize;
    let mut sealed = 0usize;

    // Pushed side: content of the exit lamination continues into the
    // receiving plug and rides its crossing map forward onto exit tori.
    let pushed_params = crossing_params(geo, true);
    for (pi, piece) in geo.pushed.pieces.iter().enumerate() {
        let ts = pushed_params.get(&pi).cloned().unwrap_or_default();
        if piece.closed && ts.is_empty() {
            let RenderKind::CompactLeaf(li) = piece.kind else {
                return Err(Error::Degenerate(format!(
                    "closed rendered piece `{}` is not a compact leaf",
                    piece.kind
                )));
            };
            if closed {
                sealed += 1;
                continue;
            }
            let leaf = &etor.lamination.leaves[li];
            if !vertical {
                return Err(Error::Degenerate(format!(
                    "gluing map tilts surviving leaf `{}` off the vertical class",
                    leaf.id
                )));
            }
            let pos = frac(&pair.map.apply(&(leaf.position.clone(), Rat::zero())).0);
            let (ft, insertion) = carry_leaf(
                &rtor.lamination,
                &rtor.id,
                ent_idx,
                &pos,
                leaf,
                class_flip,
                pair.flip,
                &p.routes,
                true,
                &p.exit,
                consumed_exit,
            )?;
            exit_changes.entry(ft).or_default().insertions.push(insertion);
            continue;
        }
        for seg in cut_segments(piece, &ts) {
            let kind = deposit_kind(piece.kind, etor.lamination.foliation, seg.interior);
            if rtor.lamination.foliation {
                absorbed += 1;
                continue;
            }
            if closed {
                sealed += 1;
                continue;
            }
            let pos = frac(&point_at(piece, &seg.mid)?.0);
            let (ft, position) = carry_content(
                &rtor.lamination,
                &rtor.id,
                ent_idx,
                &pos,
                &p.routes,
                true,
                &p.exit,
                consumed_exit,
            )?;
            let slot = exit_changes.entry(ft).or_default();
            slot.deposits.push(ContentDeposit { position, kind });
            if kind != DepositKind::Arc {
                slot.dense.extend(etor.dense_pieces.iter().copied());
            }
        }
    }

    // Receiving side: content of the entrance lamination, pulled back to
    // the exit chart, rides the pushed plug's crossing map backward onto
    // entrance tori.
    let recv_params = crossing_params(geo, false);
    for (pi, piece) in geo.receiving.pieces.iter().enumerate() {
        let ts = recv_params.get(&pi).cloned().unwrap_or_default();
        if piece.closed && ts.is_empty() {
            let RenderKind::CompactLeaf(li) = piece.kind else {
                return Err(Error::Degenerate(format!(
                    "closed rendered piece `{}` is not a compact leaf",
                    piece.kind
                )));
            };
            if closed {
                sealed += 1;
                continue;
            }
            let leaf = &rtor.lamination.leaves[li];
            if !vertical {
                return Err(Error::Degenerate(format!(
                    "gluing map tilts surviving leaf `{}` off the vertical class",
                    leaf.id
                )));
            }
            let pos = frac(&pair.map.inverse().apply(&(leaf.position.clone(), Rat::zero())).0);
            let (ft, insertion) = carry_leaf(
                &etor.lamination,
                &etor.id,
                exit_idx,
                &pos,
                leaf,
                class_flip,
                pair.flip,
                &p.routes,
                false,
                &p.entrance,
                consumed_ent,
            )?;
            ent_changes.entry(ft).or_default().insertions.push(insertion);
            continue;
        }
        for seg in cut_segments(piece, &ts) {
            let kind = deposit_kind(piece.kind, rtor.lamination.foliation, seg.interior);
            if etor.lamination.foliation {
                absorbed += 1;
                continue;
            }
            if closed {
                sealed += 1;
                continue;
            }
            let pt = point_at(piece, &seg.mid)?;
            let pos = frac(&lifted_inv.apply(&pt).0);
            let (ft, position) = carry_content(
                &etor.lamination,
                &etor.id,
                exit_idx,
                &pos,
                &p.routes,
                false,
                &p.entrance,
                consumed_ent,
            )?;
            let slot = ent_changes.entry(ft).or_default();
            slot.deposits.push(ContentDeposit { position, kind });
            if kind != DepositKind::Arc {
                slot.dense.extend(rtor.dense_pieces.iter().copied());
            }
        }
    }

    if absorbed > 0 {
        notes.push(format!(
            "pair `{}` -> `{}`: {absorbed} transported pieces absorbed by boundary foliations",
            pair.exit, pair.entrance
        ));
    }
    if sealed > 0 {
        notes.push(format!(
            "pair `{}` -> `{}`: {sealed} lamination pieces sealed inside the closed manifold",
            pair.exit, pair.entrance
        ));
    }
    Ok(())
}

/// Sorted crossing parameters per piece on one side of the seam, with the
/// parameters of closed pieces reduced modulo their segment count.
fn crossing_params(geo: &TransitGeometry, pushed_side: bool) -> BTreeMap<usize, BTreeSet<Rat>> {
    let fam = if pushed_side { &geo.pushed } else { &geo.receiving };
    let mut out: BTreeMap<usize, BTreeSet<Rat>> = BTreeMap::new();
    for c in &geo.crossings {
        let (pi, t) = if pushed_side {
            (c.pushed_piece, &c.along_pushed)
        } else {
            (c.receiving_piece, &c.along_receiving)
        };
        let piece = &fam.pieces[pi];
        let nseg = rat((piece.points.len() - 1) as i64, 1);
        let mut t = t.clone();
        if piece.closed && t >= nseg {
            t -= &nseg;
        }
        out.entry(pi).or_default().insert(t);
    }
    out
}

/// One cut segment of a rendered piece, located by its midpoint parameter.
struct CutSegment {
    mid: Rat,
    /// Whether both endpoints are crossings (as opposed to the truncated
    /// ends of an open representative).
    interior: bool,
}

/// Cut a piece at the sorted parameters `ts`: closed pieces into cyclic
/// segments between consecutive crossings, open pieces between consecutive
/// boundaries with zero-length ends skipped.  An uncut closed piece yields
/// nothing — it survives and is handled separately.
fn cut_segments(piece: &Piece, ts: &BTreeSet<Rat>) -> Vec<CutSegment> {
    let nseg = rat((piece.points.len() - 1) as i64, 1);
    let sorted: Vec<Rat> = ts.iter().cloned().collect();
    let mut out = Vec::new();
    if piece.closed {
        for (i, lo) in sorted.iter().enumerate() {
            let hi = if i + 1 < sorted.len() {
                sorted[i + 1].clone()
            } else {
                &sorted[0] + &nseg
            };
            let mut mid = (lo + &hi) / rat(2, 1);
            if mid >= nseg {
                mid -= &nseg;
            }
            out.push(CutSegment { mid, interior: true });
        }
    } else {
        let mut bounds: Vec<(Rat, bool)> = vec![(Rat::zero(), false)];
        bounds.extend(sorted.into_iter().map(|t| (t, true)));
        bounds.push((nseg, false));
        for w in bounds.windows(2) {
            if w[0].0 < w[1].0 {
                out.push(CutSegment {
                    mid: (&w[0].0 + &w[1].0) / rat(2, 1),
                    interior: w[0].1 && w[1].1,
                });
            }
        }
    }
    out
}

/// What a cut segment deposits in the band it lands in.  Crossing-arc
/// material stays arcs; a piece of a band representative stays a winding
/// leaf while it keeps a truncated end (it still accumulates on a boundary
/// leaf) and becomes a crossing arc when cut on both sides.  When the source
/// lamination is a foliation, every transported piece — band content and
/// compact-leaf segments alike — carries foliated material: leaves of a
/// foliation arrive in continua, never alone.
fn deposit_kind(kind: RenderKind, source_foliation: bool, interior: bool) -> DepositKind {
    match kind {
        RenderKind::CompactLeaf(_) if source_foliation => DepositKind::Foliated,
        RenderKind::CompactLeaf(_) | RenderKind::BandArc(..) => DepositKind::Arc,
        RenderKind::BandRep(_) => {
            if source_foliation {
                DepositKind::Foliated
            } else if interior {
                DepositKind::Arc
            } else {
                DepositKind::Winding
            }
        }
    }
}

/// Follow the unique gap route out of `band` on the near side; returns the
/// far torus and band, the landing position (the relative position in the
/// source band carried over, reversed on twisted routes), and the twist.
#[allow(clippy::too_many_arguments)]
fn landing_of(
    near_lam: &TorusLamination,
    near_id: &str,
    near_idx: usize,
    band: usize,
    pos: &Rat,
    routes: &[GapRoute],
    forward: bool,
    far_tori: &[BoundaryTorus],
    consumed_far: &BTreeSet<usize>,
) -> Result<(usize, usize, Rat, bool)> {
    let key = (near_idx, band);
    let mut fars: BTreeSet<(usize, usize, bool)> = BTreeSet::new();
    for route in routes {
        let (near, far) = if forward {
            (route.entrance, route.exit)
        } else {
            (route.exit, route.entrance)
        };
        if near == key {
            fars.insert((far.0, far.1, route.twist));
        }
    }
    if fars.is_empty() {
        return Err(Error::GapMismatch(format!("no gap route covers band {band} of `{near_id}`")));
    }
    if fars.len() > 1 {
        return Err(Error::Degenerate(format!(
            "band {band} of `{near_id}` feeds several gap routes; glue sequentially"
        )));
    }
    let (ft, fb, twist) = fars.into_iter().next().expect("checked nonempty");
    if consumed_far.contains(&ft) {
        return Err(Error::Degenerate(format!(
            "content from `{near_id}` lands on torus `{}`, consumed by another pair; glue sequentially",
            far_tori[ft].id
        )));
    }
    let (a, b) = near_lam.band_bounds(band);
    let mut x = pos.clone();
    if x < a {
        x += Rat::one();
    }
    let mut rel = (&x - &a) / (&b - &a);
    if twist {
        rel = Rat::one() - rel;
    }
    let (fa, fb_hi) = far_tori[ft].lamination.band_bounds(fb);
    let position = frac(&(&fa + rel * (&fb_hi - &fa)));
    Ok((ft, fb, position, twist))
}

/// Carry a band deposit along its gap route.
#[allow(clippy::too_many_arguments)]
fn carry_content(
    near_lam: &TorusLamination,
    near_id: &str,
    near_idx: usize,
    pos: &Rat,
    routes: &[GapRoute],
    forward: bool,
    far_tori: &[BoundaryTorus],
    consumed_far: &BTreeSet<usize>,
) -> Result<(usize, Rat)> {
    let band = near_lam.band_containing(pos)?;
    let (ft, _, position, _) =
        landing_of(near_lam, near_id, near_idx, band, pos, routes, forward, far_tori, consumed_far)?;
    Ok((ft, position))
}

/// Carry a surviving compact leaf along its gap route, as a new compact
/// leaf of the far torus.  The leaf must land in an annulus gap on both
/// ends: a leaf that "survives" inside a filled band only cleared the
/// truncation margin of its representative, which is a rendering artifact,
/// not a disjoint leaf.
#[allow(clippy::too_many_arguments)]
fn carry_leaf(
    near_lam: &TorusLamination,
    near_id: &str,
    near_idx: usize,
    pos: &Rat,
    leaf: &Leaf,
    class_flip: bool,
    pair_flip: bool,
    routes: &[GapRoute],
    forward: bool,
    far_tori: &[BoundaryTorus],
    consumed_far: &BTreeSet<usize>,
) -> Result<(usize, LeafInsertion)> {
    let band = near_lam.band_containing(pos)?;
    if near_lam.bands[band].fill != BandFill::Empty {
        return Err(Error::Degenerate(format!(
            "leaf `{}` survives only inside the truncation margin of a filled band of `{near_id}`",
            leaf.id
        )));
    }
    let (ft, fb, position, twist) =
        landing_of(near_lam, near_id, near_idx, band, pos, routes, forward, far_tori, consumed_far)?;
    if far_tori[ft].lamination.bands[fb].fill != BandFill::Empty {
        return Err(Error::GapMismatch(format!(
            "annulus gap of `{near_id}` routes to a filled band of `{}`",
            far_tori[ft].id
        )));
    }
    let orientation = leaf.orientation.flip_if(class_flip).flip_if(pair_flip).flip_if(twist);
    Ok((
        ft,
        LeafInsertion {
            position,
            orientation,
            id: format!("{}'", leaf.id),
            owner: leaf.owner,
        },
    ))
}

// ---------------------------------------------------------------------------
// Result assembly
// ---------------------------------------------------------------------------

/// Rebuild one surviving torus with its accumulated insertions and
/// deposits.  The foliation flag is re-derived: a torus becomes a boundary
/// foliation exactly when it received only foliated material and no band
/// was left empty.  Dense declarations are replaced by the inherited ones —
/// the old traces are no longer dense once new material lands between them.
fn apply_changes(torus: &BoundaryTorus, changes: Option<&TorusChanges>) -> Result<BoundaryTorus> {
    let Some(ch) = changes else {
        return Ok(torus.clone());
    };
    let mut lamination = torus.lamination.rebuild(&ch.insertions, &ch.deposits)?;
    lamination.foliation = !ch.deposits.is_empty()
        && ch.deposits.iter().all(|d| d.kind == DepositKind::Foliated)
        && lamination.bands.iter().all(|b| b.fill != BandFill::Empty);
    Ok(BoundaryTorus {
        id: torus.id.clone(),
        side: torus.side,
        lamination,
        dense_pieces: ch.dense.iter().copied().collect(),
    })
}

/// Merge every cycle of the connection relation into one basic piece (a
/// cycle of connections is a single chain-transitive piece of the glued
/// plug); used for open results, where the merged plug feeds further
/// constructions.  Closed results keep their pieces so the transitivity
/// graph stays readable.
fn merge_cyclic_pieces(
    pieces: &[BasicPiece],
    connections: &BTreeSet<(usize, usize)>,
    entrance: &mut [BoundaryTorus],
    exit: &mut [BoundaryTorus],
    notes: &mut Vec<String>,
) -> (Vec<BasicPiece>, BTreeSet<(usize, usize)>) {
    let n = pieces.len();
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, connections.len());
    let idx: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for &(i, j) in connections {
        if i != j {
            g.add_edge(idx[i], idx[j], ());
        }
    }
    let mut classes: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|class| {
            let mut v: Vec<usize> = class.into_iter().map(|ni| ni.index()).collect();
            v.sort_unstable();
            v
        })
        .collect();
    classes.sort_by_key(|c| c[0]);
    if classes.iter().all(|c| c.len() == 1) {
        return (pieces.to_vec(), connections.clone());
    }
    let mut q = vec![0usize; n];
    for (k, class) in classes.iter().enumerate() {
        for &i in class {
            q[i] = k;
        }
    }
    let on_side = |tori: &[BoundaryTorus], class: &[usize]| -> bool {
        tori.iter().any(|t| class.iter().any(|i| t.pieces().contains(i)))
    };
    let merged: Vec<BasicPiece> = classes
        .iter()
        .map(|class| {
            if class.len() == 1 {
                return pieces[class[0]].clone();
            }
            let id =
                class.iter().map(|&i| pieces[i].id.as_str()).collect::<Vec<_>>().join("+");
            let kind = match (on_side(entrance, class), on_side(exit, class)) {
                (true, false) => PieceKind::Attractor,
                (false, true) => PieceKind::Repeller,
                _ => PieceKind::SaddleNontrivial,
            };
            let multipliers = if class.iter().any(|&i| pieces[i].multipliers == Multipliers::Negative)
            {
                Multipliers::Negative
            } else {
                Multipliers::NotApplicable
            };
            notes.push(format!("merged basic pieces into `{id}`"));
            BasicPiece { id, kind, transitive: true, multipliers }
        })
        .collect();
    for torus in entrance.iter_mut().chain(exit.iter_mut()) {
        for leaf in &mut torus.lamination.leaves {
            leaf.owner = q[leaf.owner];
        }
        let dense: BTreeSet<usize> = torus.dense_pieces.iter().map(|&i| q[i]).collect();
        torus.dense_pieces = dense.into_iter().collect();
    }
    let conn = connections.iter().map(|&(i, j)| (q[i], q[j])).collect();
    (merged, conn)
}

/// Routes of the rebuilt plug: annulus gaps pair off in boundary order, and
/// the strip units of the filled bands are matched in order and aggregated
/// into bundles.  The zip doubles as the gap-bijection assertion — unequal
/// totals are a bookkeeping error.
fn greedy_routes(entrance: &[BoundaryTorus], exit: &[BoundaryTorus]) -> Result<Vec<GapRoute>> {
    let collect = |tori: &[BoundaryTorus]| {
        let mut empties = Vec::new();
        let mut units = Vec::new();
        for (ti, torus) in tori.iter().enumerate() {
            if torus.lamination.foliation {
                continue;
            }
            for (bi, band) in torus.lamination.bands.iter().enumerate() {
                if band.fill == BandFill::Empty {
                    empties.push((ti, bi));
                } else {
                    for _ in 0..band.strips() {
                        units.push((ti, bi));
                    }
                }
            }
        }
        (empties, units)
    };
    let (e_empty, e_units) = collect(entrance);
    let (x_empty, x_units) = collect(exit);
    if e_empty.len() != x_empty.len() {
        return Err(Error::GapMismatch(format!(
            "{} entrance annulus gaps vs {} exit annulus gaps",
            e_empty.len(),
            x_empty.len()
        )));
    }
    if e_units.len() != x_units.len() {
        return Err(Error::GapMismatch(format!(
            "{} entrance strips vs {} exit strips",
            e_units.len(),
            x_units.len()
        )));
    }
    let mut routes: Vec<GapRoute> = e_empty
        .into_iter()
        .zip(x_empty)
        .map(|(e, x)| GapRoute { entrance: e, exit: x, strips: 1, twist: false })
        .collect();
    let mut run: Option<GapRoute> = None;
    for (e, x) in e_units.into_iter().zip(x_units) {
        match &mut run {
            Some(route) if route.entrance == e && route.exit == x => route.strips += 1,
            _ => {
                if let Some(route) = run.take() {
                    routes.push(route);
                }
                run = Some(GapRoute { entrance: e, exit: x, strips: 1, twist: false });
            }
        }
    }
    if let Some(route) = run {
        routes.push(route);
    }
    Ok(routes)
}

/// Status verdict, decided on the pre-gluing plug: `Direct` when a closed
/// union of purely attracting and purely repelling summands is glued along
/// boundary foliations, `Realizable` when a closed saddle plug with filling
/// laminations carries strong certificates on every seam.
fn decide_status(
    p: &Plug,
    resolved: &[(usize, usize, &GluingPair)],
    closed: bool,
    all_strong: bool,
) -> AnosovStatus {
    if !closed {
        return AnosovStatus::NotCertified;
    }
    let one_sided = p.piece_groups().iter().all(|group| {
        let on = |tori: &[BoundaryTorus]| {
            tori.iter().any(|t| group.iter().any(|i| t.pieces().contains(i)))
        };
        on(&p.entrance) != on(&p.exit)
    });
    let receiving_foliated =
        resolved.iter().all(|&(_, ri, _)| p.entrance[ri].lamination.foliation);
    if one_sided && receiving_foliated {
        return AnosovStatus::Direct;
    }
    let filling = p.entrance.iter().chain(&p.exit).all(|t| t.lamination.is_filling());
    if p.is_saddle_plug() && filling && all_strong {
        return AnosovStatus::Realizable;
    }
    AnosovStatus::NotCertified
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{gluing_crossings, rotation_gluing};
    use crate::foliation::{m1_entrance_lamination, BoundarySide, SignWord};
    use crate::plug::{u_gradient, u_pseudo_anosov, v_twisted, PlugMetadata};

    fn translation(num: i64, den: i64) -> TorusMap {
        TorusMap::translation((rat(num, den), Rat::zero()))
    }

    #[test]
    fn m1_prefoliation_glue_bookkeeping() {
        let v = v_twisted();
        let u = u_pseudo_anosov(1, Some(&[4])).unwrap();
        let spec =
            GluingSpec { pairs: vec![GluingPair::new("v_out", "pa_in", translation(1, 8))] };
        let union = Plug::disjoint_union(&v, &u).unwrap();
        let model = self_glue(&union, &spec).unwrap();

        // The rebuilt entrance shows the 2n+3 pattern: the twisted orbit's
        // incoherent leaf plus the four pulled-back coherent ones, all of
        // whose bands turned spiral from the pulled-back winding material.
        let ent = &model.plug.entrance[0].lamination;
        assert_eq!(ent.n_leaves(), 5);
        assert_eq!(ent.sign_word(), SignWord::parse("+----").unwrap());
        assert_eq!(ent.incoherent_leaves(), vec![0]);
        assert_eq!(ent.canonical_type(), m1_entrance_lamination(1).canonical_type());
        let positions: Vec<Rat> = ent.leaves.iter().map(|l| l.position.clone()).collect();
        assert_eq!(positions, vec![rat(0, 1), rat(1, 8), rat(3, 8), rat(5, 8), rat(7, 8)]);
        assert_eq!(ent.leaves[0].id, "vs0");
        assert_eq!(ent.leaves[1].id, "s0'");
        assert_eq!(ent.leaves[1].owner, 1);
        assert!(ent.bands.iter().all(|b| b.fill == BandFill::Spiral));
        assert!(ent.is_filling());
        assert!(!ent.foliation);
        assert_eq!(model.plug.entrance[0].dense_pieces, vec![1]);

        // The dead pushed leaf crossed once, so it lands in the first exit
        // band as a second crossing strand next to the spiral's.
        let exit = &model.plug.exit[0].lamination;
        assert_eq!(exit.n_leaves(), 4);
        assert_eq!(exit.bands[0].fill, BandFill::Arcs(2));
        assert!(exit.bands[1..].iter().all(|b| b.fill == BandFill::Spiral));
        assert!(model.plug.exit[0].dense_pieces.is_empty());
        assert_eq!(model.plug.entrance_gaps(), 5);
        assert_eq!(model.plug.exit_gaps(), 5);

        // Crossing bookkeeping agrees with the stand-alone counter.
        let outcome = &model.pairs[0];
        assert_eq!(outcome.crossings.pushed_leaf, vec![1]);
        assert_eq!(outcome.crossings.receiving_leaf, vec![0, 0, 0, 0]);
        let direct = gluing_crossings(
            &v.exit[0].lamination,
            &translation(1, 8),
            &u.entrance[0].lamination,
        )
        .unwrap();
        assert_eq!(outcome.crossings, direct);
        match &outcome.certificate {
            PairCertificate::Transverse { min_slope_gap, crossings } => {
                assert!(min_slope_gap.is_infinite());
                assert_eq!(*crossings, 1);
            }
            PairCertificate::Strong(_) => panic!("a one-leaf side cannot certify strongly"),
        }

        assert_eq!(model.status, AnosovStatus::NotCertified);
        assert!(!model.transitive);
        assert_eq!(model.plug.pieces.len(), 2);
        assert!(model.plug.connections.contains(&(0, 1)));
        assert!(!model.plug.connections.contains(&(1, 0)));

        // glue() is the disjoint-union front end of the same engine.
        assert_eq!(glue(&v, &u, &spec).unwrap(), model.plug);
    }

    #[test]
    fn rotation_glue_keeps_far_boundary_and_fills_bands() {
        let a = u_gradient().with_id_prefix("a_");
        let b = u_gradient().with_id_prefix("b_");
        let map = TorusMap::new([[0, -1], [1, 0]], (rat(1, 8), rat(1, 16))).unwrap();
        let spec = GluingSpec { pairs: vec![GluingPair::new("a_ug_out", "b_ug_in", map)] };
        let model = self_glue(&Plug::disjoint_union(&a, &b).unwrap(), &spec).unwrap();

        let outcome = &model.pairs[0];
        assert_eq!(outcome.crossings.total, 16);
        assert_eq!(outcome.crossings.pushed_leaf, vec![4, 4, 4, 4]);
        assert_eq!(outcome.crossings.receiving_leaf, vec![4, 4, 4, 4]);

        // Every compact leaf dies on the seam, so the remaining tori keep
        // their own four leaves while every band collects four crossing
        // arcs from the dead leaves of the other plug.
        let ent = &model.plug.entrance[0];
        let exit = &model.plug.exit[0];
        assert_eq!(ent.id, "a_ug_in");
        assert_eq!(exit.id, "b_ug_out");
        assert_eq!(ent.lamination.n_leaves(), 4);
        assert_eq!(exit.lamination.n_leaves(), 4);
        assert!(ent.lamination.bands.iter().all(|b| b.fill == BandFill::Arcs(4)));
        assert!(exit.lamination.bands.iter().all(|b| b.fill == BandFill::Arcs(4)));
        assert_eq!(model.plug.entrance_gaps(), 16);
        assert_eq!(model.plug.exit_gaps(), 16);

        // Seam edges run from the pushed plug's orbits to the receiving's.
        for edge in [(0, 2), (0, 3), (1, 2), (1, 3)] {
            assert!(model.plug.connections.contains(&edge), "missing {edge:?}");
        }
        assert!(!model.transitive);
        assert_eq!(model.status, AnosovStatus::NotCertified);

        // The rebuilt routes bundle each band's four strips.
        assert_eq!(model.plug.routes.len(), 4);
        assert!(model.plug.routes.iter().all(|r| r.strips == 4 && !r.twist));
    }

    #[test]
    fn closed_double_twist_glue_is_order_independent() {
        let union = Plug::disjoint_union(
            &v_twisted().with_id_prefix("p_"),
            &v_twisted().with_id_prefix("q_"),
        )
        .unwrap();
        let first = GluingPair::new("p_v_out", "q_v_in", translation(1, 8));
        let second = GluingPair::new("q_v_out", "p_v_in", translation(1, 8));
        let forward =
            self_glue(&union, &GluingSpec { pairs: vec![first.clone(), second.clone()] }).unwrap();
        let backward = self_glue(&union, &GluingSpec { pairs: vec![second, first] }).unwrap();
        assert_eq!(forward, backward);

        assert!(forward.plug.is_closed());
        assert_eq!(forward.status, AnosovStatus::NotCertified);
        assert!(!forward.transitive);
        assert_eq!(forward.plug.pieces.len(), 2);
        assert!(forward.plug.routes.is_empty());
        assert!(forward.notes.iter().any(|n| n.contains("sealed")));
        assert_eq!(forward.descriptor.jsj, vec!["Seifert".to_string()]);
    }

    fn one_piece_plug(
        id: &str,
        piece_id: &str,
        kind: PieceKind,
        torus: BoundaryTorus,
    ) -> Plug {
        let (entrance, exit) = match torus.side {
            BoundarySide::Entrance => (vec![torus], vec![]),
            BoundarySide::Exit => (vec![], vec![torus]),
        };
        Plug {
            id: id.into(),
            pieces: vec![BasicPiece {
                id: piece_id.into(),
                kind,
                transitive: true,
                multipliers: Multipliers::NotApplicable,
            }],
            entrance,
            exit,
            connections: BTreeSet::from([(0, 0)]),
            routes: vec![],
            metadata: PlugMetadata { interior_hyperbolic: false, jsj_label: "Seifert".into(), notes: vec![] },
        }
    }

    #[test]
    fn franks_williams_shape_certifies_direct() {
        let zip = TorusLamination::zipped_reeb(true);
        let (map, pushed, receiving) = rotation_gluing(&zip, &zip);
        let repeller = one_piece_plug(
            "source",
            "src",
            PieceKind::Repeller,
            BoundaryTorus {
                id: "rep_out".into(),
                side: BoundarySide::Exit,
                lamination: pushed,
                dense_pieces: vec![0],
            },
        );
        let attractor = one_piece_plug(
            "sink",
            "snk",
            PieceKind::Attractor,
            BoundaryTorus {
                id: "att_in".into(),
                side: BoundarySide::Entrance,
                lamination: receiving,
                dense_pieces: vec![0],
            },
        );
        let spec = GluingSpec { pairs: vec![GluingPair::new("rep_out", "att_in", map)] };
        let model =
            self_glue(&Plug::disjoint_union(&repeller, &attractor).unwrap(), &spec).unwrap();

        assert!(model.pairs[0].certificate.is_strong());
        assert_eq!(model.status, AnosovStatus::Direct);
        assert!(model.plug.is_closed());
        assert!(!model.transitive);
        assert!(model.plug.connections.contains(&(0, 1)));
        assert!(model.notes.iter().any(|n| n.contains("absorbed")));
    }

    #[test]
    fn filled_rotation_self_glue_is_realizable_and_transitive() {
        let mut u = u_gradient();
        for torus in u.entrance.iter_mut().chain(u.exit.iter_mut()) {
            for band in &mut torus.lamination.bands {
                band.fill = BandFill::Spiral;
            }
        }
        let (map, pushed, receiving) =
            rotation_gluing(&u.exit[0].lamination, &u.entrance[0].lamination);
        u.exit[0].lamination = pushed;
        u.entrance[0].lamination = receiving;
        let spec = GluingSpec { pairs: vec![GluingPair::new("ug_out", "ug_in", map)] };
        let model = self_glue(&u, &spec).unwrap();

        assert!(model.pairs[0].certificate.is_strong());
        assert_eq!(model.status, AnosovStatus::Realizable);
        assert!(model.plug.is_closed());
        assert!(model.transitive);
        // Both saddle orbits connect through the seam in both directions:
        // every pushed leaf meets every receiving leaf.
        for edge in [(0, 1), (1, 0)] {
            assert!(model.plug.connections.contains(&edge), "missing {edge:?}");
        }
    }

    #[test]
    fn transitivity_verdicts() {
        let graph = |n: usize, edges: &[(usize, usize)]| TransitivityGraph {
            nodes: (0..n).map(|i| format!("p{i}")).collect(),
            edges: edges.iter().copied().collect(),
        };
        assert!(is_combinatorially_transitive(&graph(0, &[])).is_err());
        assert!(!is_combinatorially_transitive(&graph(2, &[(0, 1)])).unwrap());
        assert!(is_combinatorially_transitive(&graph(2, &[(0, 1), (1, 0)])).unwrap());
        assert!(
            is_combinatorially_transitive(&graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)])).unwrap()
        );
    }

    #[test]
    fn transitivity_is_invariant_under_relabeling() {
        let perm = [2usize, 3, 1, 0];
        for (edges, expect) in [
            (vec![(0usize, 1usize), (1, 2), (2, 3), (3, 0)], true),
            (vec![(0, 1), (1, 2), (2, 3)], false),
        ] {
            let plain = TransitivityGraph {
                nodes: (0..4).map(|i| format!("p{i}")).collect(),
                edges: edges.iter().copied().collect(),
            };
            let permuted = TransitivityGraph {
                nodes: (0..4).map(|i| format!("q{i}")).collect(),
                edges: edges.iter().map(|&(i, j)| (perm[i], perm[j])).collect(),
            };
            assert_eq!(is_combinatorially_transitive(&plain).unwrap(), expect);
            assert_eq!(is_combinatorially_transitive(&permuted).unwrap(), expect);
        }
    }

    #[test]
    fn dot_export_lists_nodes_and_edges() {
        let graph = TransitivityGraph {
            nodes: vec!["a".into(), "b".into()],
            edges: BTreeSet::from([(0, 0), (0, 1), (1, 1)]),
        };
        let dot = transitivity_dot(&graph);
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("n0 -> n1"));
        assert!(!dot.contains("n0 -> n0"));
    }

    #[test]
    fn bad_specs_are_rejected() {
        let union = Plug::disjoint_union(
            &v_twisted().with_id_prefix("p_"),
            &v_twisted().with_id_prefix("q_"),
        )
        .unwrap();
        let unknown =
            GluingSpec { pairs: vec![GluingPair::new("nope", "q_v_in", translation(1, 8))] };
        assert!(matches!(self_glue(&union, &unknown), Err(Error::BoundaryMismatch(_))));

        let twice = GluingSpec {
            pairs: vec![
                GluingPair::new("p_v_out", "q_v_in", translation(1, 8)),
                GluingPair::new("q_v_out", "q_v_in", translation(1, 8)),
            ],
        };
        assert!(matches!(self_glue(&union, &twice), Err(Error::BoundaryMismatch(_))));

        // Coincident compact leaves can never be made transverse.
        let coincident =
            GluingSpec { pairs: vec![GluingPair::new("p_v_out", "q_v_in", TorusMap::identity())] };
        assert!(matches!(self_glue(&union, &coincident), Err(Error::NotTransverse(_))));
    }
}
