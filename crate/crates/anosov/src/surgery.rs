//! Derived-from-Anosov surgery and the closed-model construction pipelines.
//!
//! A derived-from-Anosov (DA) bifurcation turns a periodic orbit of a flow
//! into an attracting or repelling orbit; excising a small solid-torus
//! neighborhood of the bifurcated orbit leaves a hyperbolic plug with one
//! more boundary torus.  Starting from a closed Anosov manifold (a
//! [`ClosedAnosovBase`]) and iterating bifurcations, gluings and excisions
//! produces the named pipelines of this module:
//!
//! * [`blow_up_excise_glue`] — bifurcate two orbits of a closed base in
//!   opposite directions and reglue the two new boundary tori,
//! * [`build_both_flows`] — two closed models on the same manifold, one
//!   glued along boundary foliations, one certified by strong
//!   transversality,
//! * [`realize_attractor`] — an attracting plug whose entrance laminations
//!   realize any requested list of combinatorial types, built by repeated
//!   compact-leaf additions,
//! * [`embed_in_anosov`] — close up an arbitrary plug into a certified
//!   model containing it intact,
//! * [`build_n_flows`] — a family of pairwise distinct models on one
//!   manifold, told apart by [`nonequivalence_invariant`],
//! * [`build_infinite_tori_model`] — a model carrying an infinite family of
//!   pairwise non-isotopic transverse tori, measured by
//!   [`torus_intersection`].
//!
//! Orbits are addressed symbolically through [`OrbitHandle`]: the
//! combinatorial layer never enumerates periodic orbits, it only consumes
//! their declared multiplier signs and free-separatrix flags.

use std::collections::BTreeSet;

use crate::arrangement::{rotation_gluing, MAX_LEVEL};
use crate::error::{Error, Result};
use crate::foliation::{
    annulus_leaf_counts, coherent_gluing, phik_gluing, BoundarySide, Sign, SignWord,
    TorusLamination, TorusMap,
};
use crate::gluing::{glue, self_glue, ClosedModel, GluingPair, GluingSpec};
use crate::plug::{
    u_gradient, u_pseudo_anosov, v_twisted, w_pants, BasicPiece, BoundaryTorus, Multipliers,
    PieceKind, Plug, PlugMetadata,
};
use crate::{rat, Rat};

// ---------------------------------------------------------------------------
// Orbit handles and bifurcation specifications
// ---------------------------------------------------------------------------

/// Symbolic handle on a periodic orbit of a plug piece or of a closed base
/// manifold.
///
/// The model never enumerates orbits; a handle simply names one and declares
/// the two properties surgery depends on.  Transitive nontrivial pieces
/// contain orbits of every positive period, so fresh handles on them may be
/// minted at will; the declarations are checked against the piece before
/// any surgery runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitHandle {
    /// Identifier, unique among the handles a surgery touches.
    pub id: String,
    /// Containing basic piece (`None` for orbits of a closed base).
    pub piece: Option<String>,
    /// Declared multiplier signs of the orbit.
    pub multipliers: Multipliers,
    /// Whether a separatrix of the orbit is free (disjoint from the rest of
    /// the invariant set).  Bifurcating such orbits is refused: the excision
    /// would disconnect the invariant set from its own separatrix.
    pub free_separatrix: bool,
}

impl OrbitHandle {
    /// Handle on an orbit of a closed base manifold.
    pub fn in_base(id: &str, multipliers: Multipliers) -> OrbitHandle {
        OrbitHandle { id: id.into(), piece: None, multipliers, free_separatrix: false }
    }

    /// Handle on an orbit inside the named piece of a plug.
    pub fn in_piece(id: &str, piece: &str, multipliers: Multipliers) -> OrbitHandle {
        OrbitHandle { id: id.into(), piece: Some(piece.into()), multipliers, free_separatrix: false }
    }
}

/// Direction of a derived-from-Anosov bifurcation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DaDirection {
    /// The orbit becomes attracting; excising it adds an exit torus.
    Attracting,
    /// The orbit becomes repelling; excising it adds an entrance torus.
    Repelling,
}

/// Specification of one derived-from-Anosov bifurcation followed by the
/// excision of the bifurcated orbit.
///
/// The multiplier and separatrix fields repeat the handle's declarations so
/// that a surgery request is self-contained; mismatches are refused rather
/// than silently resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DASpec {
    /// The orbit to bifurcate.
    pub orbit: OrbitHandle,
    /// Whether the orbit becomes attracting or repelling.
    pub direction: DaDirection,
    /// Multiplier signs the surgery assumes; must match the handle.
    pub multipliers: Multipliers,
    /// Free-separatrix assumption; must be `false` here and on the handle.
    pub free_separatrix: bool,
    /// Requested number of compact leaves on the new torus, when the caller
    /// wants the count checked.  The multipliers determine it: positive
    /// multipliers yield two compact leaves (the two separatrix traces),
    /// negative multipliers one (the two traces close up into a single
    /// leaf around the Möbius band).
    pub requested_leaves: Option<usize>,
}

impl DASpec {
    /// Specification inheriting the handle's declarations.
    pub fn new(orbit: &OrbitHandle, direction: DaDirection) -> DASpec {
        DASpec {
            orbit: orbit.clone(),
            direction,
            multipliers: orbit.multipliers,
            free_separatrix: orbit.free_separatrix,
            requested_leaves: None,
        }
    }
}

/// A closed Anosov manifold used as surgery stock.
///
/// Only the data surgery consumes is recorded: transitivity, the geometric
/// label of its (trivial) torus decomposition, and the orbits a caller has
/// declared handles for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedAnosovBase {
    /// Stable identifier; doubles as the piece id of [`Self::as_closed_plug`].
    pub id: String,
    /// Whether the flow is transitive.
    pub transitive: bool,
    /// Whether the underlying manifold is hyperbolic.
    pub interior_hyperbolic: bool,
    /// Geometric label of the manifold.
    pub jsj_label: String,
    /// Declared orbit handles.
    pub orbits: Vec<OrbitHandle>,
}

impl ClosedAnosovBase {
    /// Suspension of a hyperbolic torus automorphism with negative trace,
    /// for example `(x, y) -> (-2x - y, -x - y)`.
    ///
    /// Its periodic orbits of odd period have negative multipliers while the
    /// even periods give positive ones, so handles of both signs legitimately
    /// coexist; `negative` and `positive` choose how many of each to declare
    /// (ids `o_neg{i}` and `o_pos{i}`).  The suspension flow is transitive
    /// and the mapping torus is a Sol manifold.
    pub fn suspension(negative: usize, positive: usize) -> ClosedAnosovBase {
        let mut orbits = Vec::new();
        for i in 0..negative {
            orbits.push(OrbitHandle::in_base(&format!("o_neg{i}"), Multipliers::Negative));
        }
        for i in 0..positive {
            orbits.push(OrbitHandle::in_base(&format!("o_pos{i}"), Multipliers::Positive));
        }
        ClosedAnosovBase {
            id: "suspension".into(),
            transitive: true,
            interior_hyperbolic: false,
            jsj_label: "Sol".into(),
            orbits,
        }
    }

    /// The base as a closed plug: one nontrivial saddle piece filling the
    /// whole manifold, no boundary.  The piece's multiplier marker records
    /// whether negative-multiplier orbits were declared, so later piece-level
    /// surgeries know what the invariant set still offers.
    pub fn as_closed_plug(&self) -> Plug {
        let negative =
            self.orbits.iter().any(|o| o.multipliers == Multipliers::Negative);
        Plug {
            id: self.id.clone(),
            pieces: vec![BasicPiece {
                id: self.id.clone(),
                kind: PieceKind::SaddleNontrivial,
                transitive: self.transitive,
                multipliers: if negative { Multipliers::Negative } else { Multipliers::Positive },
            }],
            entrance: vec![],
            exit: vec![],
            connections: BTreeSet::from([(0, 0)]),
            routes: vec![],
            metadata: PlugMetadata {
                interior_hyperbolic: self.interior_hyperbolic,
                jsj_label: self.jsj_label.clone(),
                notes: vec![],
            },
        }
    }

    /// Look up a declared orbit by id.
    pub fn orbit(&self, id: &str) -> Result<&OrbitHandle> {
        self.orbits.iter().find(|o| o.id == id).ok_or_else(|| {
            Error::Surgery(format!("base `{}` declares no orbit `{id}`", self.id))
        })
    }
}

// ---------------------------------------------------------------------------
// Derived-from-Anosov bifurcation
// ---------------------------------------------------------------------------

/// Number of compact leaves the multiplier signs force on the new torus.
fn leaves_for(multipliers: Multipliers) -> Result<usize> {
    match multipliers {
        Multipliers::Positive => Ok(2),
        Multipliers::Negative => Ok(1),
        Multipliers::NotApplicable => Err(Error::Surgery(
            "a bifurcation needs an orbit with declared multiplier signs".into(),
        )),
    }
}

/// Kind of the surgered piece after removing the bifurcated orbit.
///
/// On a closed single-piece plug (a closed Anosov manifold) the complement
/// of the new attracting orbit's basin is a repeller, and dually.  Inside a
/// larger plug the piece keeps its repelling or attracting character when
/// the bifurcation pushes in the matching direction, and otherwise becomes a
/// nontrivial saddle: the excised orbit opens an escape route through the
/// new boundary torus.
fn kind_after_da(
    direction: DaDirection,
    kind: PieceKind,
    closed_single: bool,
    orbit: &str,
) -> Result<PieceKind> {
    if closed_single {
        return Ok(match direction {
            DaDirection::Attracting => PieceKind::Repeller,
            DaDirection::Repelling => PieceKind::Attractor,
        });
    }
    match (direction, kind) {
        (_, PieceKind::SaddleOrbit) => Err(Error::Surgery(format!(
            "orbit `{orbit}` is the whole of its single-orbit piece; bifurcating it would empty the piece"
        ))),
        (DaDirection::Attracting, PieceKind::Repeller) => Ok(PieceKind::Repeller),
        (DaDirection::Repelling, PieceKind::Attractor) => Ok(PieceKind::Attractor),
        _ => Ok(PieceKind::SaddleNontrivial),
    }
}

/// Check that the containing piece can offer an orbit with the requested
/// multiplier signs.
fn orbit_available(piece: &BasicPiece, want: Multipliers) -> Result<()> {
    let ok = match want {
        // Every transitive nontrivial hyperbolic set carries orbits with
        // positive multipliers (double any period).
        Multipliers::Positive => true,
        // Negative multipliers must be on offer explicitly.
        Multipliers::Negative => piece.multipliers == Multipliers::Negative,
        Multipliers::NotApplicable => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Surgery(format!(
            "piece `{}` offers no orbit with the requested multiplier signs",
            piece.id
        )))
    }
}

/// The boundary torus created by excising the bifurcated orbit.
///
/// Its lamination is the trace of the surgered invariant manifolds on the
/// boundary of the excised solid torus: two parallel compact leaves for
/// positive multipliers, the zipped Reeb lamination for negative ones.  The
/// lamination is a foliation exactly when every torus on the opposite
/// boundary side is foliated — then no gap of the new torus would need a
/// crossing-map route, and the surgery can spiral the new bands completely.
fn new_da_torus(spec: &DASpec, piece_idx: usize, foliated: bool) -> Result<BoundaryTorus> {
    let side = match spec.direction {
        DaDirection::Attracting => BoundarySide::Exit,
        DaDirection::Repelling => BoundarySide::Entrance,
    };
    let mut lamination = match spec.multipliers {
        Multipliers::Positive => TorusLamination::from_word(&SignWord::parse("++")?),
        Multipliers::Negative => TorusLamination::zipped_reeb(false),
        Multipliers::NotApplicable => unreachable!("validated by leaves_for"),
    };
    let tag = match side {
        BoundarySide::Exit => 'u',
        BoundarySide::Entrance => 's',
    };
    for (i, leaf) in lamination.leaves.iter_mut().enumerate() {
        leaf.id = format!("{}_{tag}{i}", spec.orbit.id);
        leaf.owner = piece_idx;
    }
    lamination.foliation = foliated;
    Ok(BoundaryTorus {
        id: format!("t_{}", spec.orbit.id),
        side,
        lamination,
        dense_pieces: vec![piece_idx],
    })
}

/// Shared body of the two bifurcation entry points.
fn da_apply(p: &Plug, spec: &DASpec, piece_id: &str, check_piece: bool) -> Result<Plug> {
    if spec.free_separatrix || spec.orbit.free_separatrix {
        return Err(Error::Surgery(format!(
            "orbit `{}` has a free separatrix; bifurcating it would tear the invariant set",
            spec.orbit.id
        )));
    }
    if spec.multipliers != spec.orbit.multipliers {
        return Err(Error::Surgery(format!(
            "surgery on `{}` assumes different multiplier signs than the handle declares",
            spec.orbit.id
        )));
    }
    let forced = leaves_for(spec.multipliers)?;
    if let Some(requested) = spec.requested_leaves {
        if requested != forced {
            return Err(Error::Surgery(format!(
                "an orbit with these multiplier signs yields {forced} compact \
                 leaves on the new torus, not {requested}"
            )));
        }
    }
    let piece_idx = p
        .pieces
        .iter()
        .position(|q| q.id == piece_id)
        .ok_or_else(|| Error::Surgery(format!("plug `{}` has no piece `{piece_id}`", p.id)))?;
    let closed_single = p.is_closed() && p.pieces.len() == 1;
    if check_piece && !closed_single {
        orbit_available(&p.pieces[piece_idx], spec.multipliers)?;
    }
    let new_kind =
        kind_after_da(spec.direction, p.pieces[piece_idx].kind, closed_single, &spec.orbit.id)?;
    let opposite_foliated = match spec.direction {
        DaDirection::Attracting => p.entrance.iter().all(|t| t.lamination.foliation),
        DaDirection::Repelling => p.exit.iter().all(|t| t.lamination.foliation),
    };
    if !opposite_foliated {
        return Err(Error::Surgery(format!(
            "bifurcating `{}` would add a boundary torus whose gaps need routes \
             through non-foliated opposite boundaries; bifurcate before gluing \
             gap-carrying tori",
            spec.orbit.id
        )));
    }
    let torus = new_da_torus(spec, piece_idx, true)?;
    let mut out = p.clone();
    out.pieces[piece_idx].kind = new_kind;
    match torus.side {
        BoundarySide::Exit => out.exit.push(torus),
        BoundarySide::Entrance => out.entrance.push(torus),
    }
    out.metadata.notes.push(format!(
        "bifurcated orbit `{}` ({}): collapsing the excised solid torus \
         semi-conjugates the new flow to the old one",
        spec.orbit.id,
        match spec.direction {
            DaDirection::Attracting => "attracting",
            DaDirection::Repelling => "repelling",
        }
    ));
    out.validate()?;
    Ok(out)
}

/// Derived-from-Anosov bifurcation of an orbit inside a plug piece,
/// followed by excision of the bifurcated orbit.
///
/// The handle must name its containing piece.  Refused when the orbit has a
/// free separatrix, when the declarations disagree, when the piece cannot
/// offer the requested multiplier signs, or when the opposite boundary side
/// carries a non-foliated torus (the new torus's gaps would then need
/// crossing-map routes the surgery cannot produce).
pub fn da_bifurcation(p: &Plug, spec: &DASpec) -> Result<Plug> {
    let piece = spec.orbit.piece.clone().ok_or_else(|| {
        Error::Surgery(format!(
            "orbit `{}` names no containing piece; use the closed-base entry point",
            spec.orbit.id
        ))
    })?;
    da_apply(p, spec, &piece, true)
}

/// Derived-from-Anosov bifurcation of a declared orbit of a closed Anosov
/// manifold, followed by excision; the result is an attracting or repelling
/// plug on the orbit's complement.
pub fn da_bifurcation_base(base: &ClosedAnosovBase, spec: &DASpec) -> Result<Plug> {
    if spec.orbit.piece.is_some() {
        return Err(Error::Surgery(format!(
            "orbit `{}` names a piece; use the plug entry point",
            spec.orbit.id
        )));
    }
    let declared = base.orbit(&spec.orbit.id)?;
    if declared.multipliers != spec.orbit.multipliers {
        return Err(Error::Surgery(format!(
            "handle for `{}` declares different multiplier signs than the base",
            spec.orbit.id
        )));
    }
    if declared.free_separatrix {
        return Err(Error::Surgery(format!(
            "orbit `{}` has a free separatrix; bifurcating it would tear the invariant set",
            spec.orbit.id
        )));
    }
    da_apply(&base.as_closed_plug(), spec, &base.id, false)
}

// ---------------------------------------------------------------------------
// Shared pipeline helpers
// ---------------------------------------------------------------------------

/// The boundary torus with the given id, on either side.
fn boundary<'a>(p: &'a Plug, id: &str) -> Result<&'a BoundaryTorus> {
    p.entrance
        .iter()
        .chain(&p.exit)
        .find(|t| t.id == id)
        .ok_or_else(|| Error::BoundaryMismatch(format!("no boundary torus `{id}`")))
}

/// Mutable access to the boundary torus with the given id.
fn boundary_mut<'a>(p: &'a mut Plug, id: &str) -> Result<&'a mut BoundaryTorus> {
    p.entrance
        .iter_mut()
        .chain(p.exit.iter_mut())
        .find(|t| t.id == id)
        .ok_or_else(|| Error::BoundaryMismatch(format!("no boundary torus `{id}`")))
}

/// Separate the representative steepness of the two sides of a seam, so
/// band content never overlaps at equal slopes: pushed side to level 0,
/// receiving side to the steepest level.
fn relevel_seam(p: &mut Plug, exit_id: &str, entrance_id: &str) -> Result<()> {
    let t = boundary_mut(p, exit_id)?;
    t.lamination = t.lamination.clone().with_uniform_level(0);
    let t = boundary_mut(p, entrance_id)?;
    t.lamination = t.lamination.clone().with_uniform_level(MAX_LEVEL);
    Ok(())
}

/// Prepare a quarter-turn seam: derive the gluing map from the two current
/// laminations and store their releveled versions back on the tori.
fn rotation_seam(p: &mut Plug, exit_id: &str, entrance_id: &str) -> Result<GluingPair> {
    let (map, pushed, receiving) =
        rotation_gluing(&boundary(p, exit_id)?.lamination, &boundary(p, entrance_id)?.lamination);
    boundary_mut(p, exit_id)?.lamination = pushed;
    boundary_mut(p, entrance_id)?.lamination = receiving;
    Ok(GluingPair::new(exit_id, entrance_id, map))
}

/// Id of the unique attractor piece of a plug.
fn attractor_piece_id(p: &Plug) -> Result<String> {
    let mut ids = p.pieces.iter().filter(|q| q.kind == PieceKind::Attractor).map(|q| &q.id);
    match (ids.next(), ids.next()) {
        (Some(id), None) => Ok(id.clone()),
        _ => Err(Error::Surgery(format!(
            "plug `{}` does not have exactly one attractor piece",
            p.id
        ))),
    }
}

/// And a model's transitivity flag with the per-piece flags: a gluing can
/// only certify transitivity of the union when each piece is transitive on
/// its own.
fn and_piece_transitivity(model: &mut ClosedModel) {
    model.transitive = model.transitive && model.plug.pieces.iter().all(|p| p.transitive);
}

// ---------------------------------------------------------------------------
// Blow up, excise, glue
// ---------------------------------------------------------------------------

/// Bifurcate two positive-multiplier orbits of a closed Anosov manifold in
/// opposite directions, excise both, and reglue the two new boundary tori
/// by a compact-leaf-preserving translation.
///
/// The gluing is certified by strong transversality, so the resulting
/// closed model is realizable; its transitivity graph is the base's piece
/// with a self-loop plus the gluing edges.
pub fn blow_up_excise_glue(base: &ClosedAnosovBase, o1: &str, o2: &str) -> Result<ClosedModel> {
    if o1 == o2 {
        return Err(Error::Surgery(format!(
            "blow-up surgery needs two distinct orbits, got `{o1}` twice"
        )));
    }
    let h1 = base.orbit(o1)?.clone();
    let h2 = base.orbit(o2)?.clone();
    for h in [&h1, &h2] {
        if h.multipliers != Multipliers::Positive {
            return Err(Error::Surgery(format!(
                "blow-up surgery needs positive multipliers on `{}`",
                h.id
            )));
        }
    }
    let step1 = da_bifurcation_base(base, &DASpec::new(&h1, DaDirection::Attracting))?;
    let piece = step1.pieces[0].id.clone();
    let h2 = OrbitHandle::in_piece(&h2.id, &piece, h2.multipliers);
    let mut q = da_bifurcation(&step1, &DASpec::new(&h2, DaDirection::Repelling))?;
    let (exit_id, ent_id) = (format!("t_{o1}"), format!("t_{o2}"));
    let map =
        coherent_gluing(&boundary(&q, &exit_id)?.lamination, &boundary(&q, &ent_id)?.lamination)?;
    relevel_seam(&mut q, &exit_id, &ent_id)?;
    let spec = GluingSpec { pairs: vec![GluingPair::new(&exit_id, &ent_id, map)] };
    let mut model = self_glue(&q, &spec)?;
    model.notes.push(format!(
        "blow-up/excise/glue surgery on orbits `{o1}` and `{o2}` of `{}`",
        base.id
    ));
    and_piece_transitivity(&mut model);
    Ok(model)
}

// ---------------------------------------------------------------------------
// Two flows on one manifold
// ---------------------------------------------------------------------------

/// Apply two bifurcations to the same closed base, on its first two
/// declared positive orbits.
fn double_da(
    base: &ClosedAnosovBase,
    first: DaDirection,
    second: DaDirection,
) -> Result<Plug> {
    let h1 = base.orbits[0].clone();
    let h2 = base.orbits[1].clone();
    let step1 = da_bifurcation_base(base, &DASpec::new(&h1, first))?;
    let piece = step1.pieces[0].id.clone();
    let h2 = OrbitHandle::in_piece(&h2.id, &piece, h2.multipliers);
    da_bifurcation(&step1, &DASpec::new(&h2, second))
}

/// Build two closed models on the same underlying manifold.
///
/// Four plugs are carved from one suspension base by bifurcating the same
/// two orbits in the four direction patterns.  Gluing the doubly-repelling
/// plug to the doubly-attracting one along its boundary foliations gives a
/// model certified directly; gluing the two mixed plugs crosswise gives a
/// transitive model certified by strong transversality.  All gluing maps
/// are isotopic to minus the identity, so the two manifold descriptors
/// coincide even though the flows differ: the first is not transitive, the
/// second is.
pub fn build_both_flows() -> Result<(ClosedModel, ClosedModel)> {
    let base = ClosedAnosovBase::suspension(0, 2);
    let x1 = double_da(&base, DaDirection::Attracting, DaDirection::Attracting)?
        .with_id_prefix("x1_");
    let x2 = double_da(&base, DaDirection::Repelling, DaDirection::Repelling)?
        .with_id_prefix("x2_");
    let x3 = double_da(&base, DaDirection::Attracting, DaDirection::Repelling)?
        .with_id_prefix("x3_");
    let x4 = double_da(&base, DaDirection::Repelling, DaDirection::Attracting)?
        .with_id_prefix("x4_");

    let one_sided = {
        let mut u = Plug::disjoint_union(&x1, &x2)?;
        let mut pairs = Vec::new();
        for orbit in ["o_pos0", "o_pos1"] {
            let (exit_id, ent_id) = (format!("x1_t_{orbit}"), format!("x2_t_{orbit}"));
            let map = coherent_gluing(
                &boundary(&u, &exit_id)?.lamination,
                &boundary(&u, &ent_id)?.lamination,
            )?;
            relevel_seam(&mut u, &exit_id, &ent_id)?;
            pairs.push(GluingPair::new(&exit_id, &ent_id, map));
        }
        self_glue(&u, &GluingSpec { pairs })?
    };

    let crosswise = {
        let mut u = Plug::disjoint_union(&x3, &x4)?;
        let mut pairs = Vec::new();
        for (exit_id, ent_id) in
            [("x3_t_o_pos0", "x4_t_o_pos0"), ("x4_t_o_pos1", "x3_t_o_pos1")]
        {
            let map = coherent_gluing(
                &boundary(&u, exit_id)?.lamination,
                &boundary(&u, ent_id)?.lamination,
            )?;
            relevel_seam(&mut u, exit_id, ent_id)?;
            pairs.push(GluingPair::new(exit_id, ent_id, map));
        }
        self_glue(&u, &GluingSpec { pairs })?
    };

    let mut one_sided = one_sided;
    let mut crosswise = crosswise;
    for model in [&mut one_sided, &mut crosswise] {
        model.notes.push(
            "gluing maps isotopic to minus the identity on every boundary component; \
             the two models share one manifold descriptor"
                .into(),
        );
        and_piece_transitivity(model);
    }
    Ok((one_sided, crosswise))
}

// ---------------------------------------------------------------------------
// Realizing attracting plugs with prescribed entrance types
// ---------------------------------------------------------------------------

/// Per-step orientation flips that grow a single-leaf word into `target`.
///
/// Each compact-leaf addition maps the current word `w` to `+` followed by
/// `w` with all signs flipped or kept; walking `target` backwards (drop the
/// leading `+`, renormalize to start with `+`) determines the flip of every
/// step, so any word is reachable from the one-leaf seed.
fn word_chain(target: &SignWord) -> Vec<bool> {
    let mut flips = Vec::new();
    let mut signs: Vec<Sign> = target.signs().to_vec();
    while signs.len() > 1 {
        let flip = signs[1] == Sign::Minus;
        flips.push(flip);
        signs = signs[1..]
            .iter()
            .map(|&s| {
                if flip {
                    match s {
                        Sign::Plus => Sign::Minus,
                        Sign::Minus => Sign::Plus,
                    }
                } else {
                    s
                }
            })
            .collect();
    }
    flips.reverse();
    flips
}

/// One compact-leaf addition on the entrance torus `torus_id`.
///
/// A pants plug is glued onto the torus by a translation that pushes its
/// exit band over all current leaves, so they ride into the first pants
/// entrance, flipped or not as requested; the second pants entrance is then
/// fed back to the plug through a fresh bifurcation and a quarter-turn
/// gluing, merging the pants orbit into the attractor.  Returns the grown
/// plug and the id of the new entrance torus, whose word is `+` followed by
/// the (possibly flipped) old word.
fn adding_leaf_step(
    p: &Plug,
    torus_id: &str,
    flip: bool,
    target_idx: usize,
    step_idx: usize,
) -> Result<(Plug, String)> {
    let prefix = format!("a{target_idx}s{step_idx}_");
    let mut work = p.clone();
    let n = boundary(&work, torus_id)?.lamination.n_leaves();
    let positions: Vec<Rat> =
        (0..n).map(|u| rat(2 * u as i64 + 1, 4 * n as i64)).collect();
    {
        let torus = boundary_mut(&mut work, torus_id)?;
        torus.lamination = torus.lamination.with_leaf_positions(&positions)?;
    }
    let pants = w_pants().with_id_prefix(&prefix);
    let mut pair = GluingPair::new(
        &format!("{prefix}w_out"),
        torus_id,
        TorusMap::translation((rat(1, 8 * n as i64), Rat::zero())),
    );
    pair.flip = flip;
    let mut work = glue(&work, &pants, &GluingSpec { pairs: vec![pair] })?;

    let omega = OrbitHandle::in_piece(
        &format!("omega{target_idx}_{step_idx}"),
        &attractor_piece_id(&work)?,
        Multipliers::Negative,
    );
    work = da_bifurcation(&work, &DASpec::new(&omega, DaDirection::Attracting))?;

    let exit_id = format!("t_{}", omega.id);
    let reentry_id = format!("{prefix}w_in_2");
    let pair = rotation_seam(&mut work, &exit_id, &reentry_id)?;
    let work = self_glue(&work, &GluingSpec { pairs: vec![pair] })?.plug;
    Ok((work, format!("{prefix}w_in_1")))
}

/// Build an attracting plug whose entrance tori realize the requested
/// combinatorial types, one torus per word.
///
/// A suspension base supplies one negative-multiplier orbit per word; each
/// repelling bifurcation seeds a zipped-Reeb entrance torus, and repeated
/// compact-leaf additions grow each seed into its target word exactly.
pub fn realize_attractor(targets: &[SignWord]) -> Result<Plug> {
    if targets.is_empty() {
        return Err(Error::Surgery(
            "attractor realization needs at least one entrance type".into(),
        ));
    }
    let base = ClosedAnosovBase::suspension(targets.len(), 0);
    let mut plug = da_bifurcation_base(
        &base,
        &DASpec::new(&base.orbits[0], DaDirection::Repelling),
    )?;
    for handle in &base.orbits[1..] {
        let handle =
            OrbitHandle::in_piece(&handle.id, &attractor_piece_id(&plug)?, handle.multipliers);
        plug = da_bifurcation(&plug, &DASpec::new(&handle, DaDirection::Repelling))?;
    }
    for (i, target) in targets.iter().enumerate() {
        let mut torus_id = format!("t_o_neg{i}");
        for (j, flip) in word_chain(target).into_iter().enumerate() {
            let (grown, new_id) = adding_leaf_step(&plug, &torus_id, flip, i, j)?;
            plug = grown;
            torus_id = new_id;
        }
    }
    plug.metadata.notes.push(format!(
        "attracting plug realizing {} requested entrance type(s); \
         negative-multiplier orbits remain available in the attractor",
        targets.len()
    ));
    plug.validate()?;
    Ok(plug)
}

// ---------------------------------------------------------------------------
// Embedding a plug into a closed model
// ---------------------------------------------------------------------------

/// Close up an arbitrary plug into a certified model containing it intact.
///
/// One repelling plug realizing a zipped-Reeb foliation per entrance torus
/// (a single multi-boundary repeller) is glued onto the entrances by
/// quarter-turn maps; its unstable foliation sweeps through the plug and
/// re-foliates every exit torus, onto which a matching multi-boundary
/// attractor is then glued.  When the plug has attracting or repelling
/// pieces of its own the resulting closed model is certified directly;
/// otherwise a final blow-up/excise/glue pass on the attached attractor and
/// repeller turns every piece into a saddle and certifies a transitive,
/// realizable model.
pub fn embed_in_anosov(p: &Plug) -> Result<ClosedModel> {
    if p.is_closed() {
        return Err(Error::Surgery(format!(
            "plug `{}` is already closed; there is no boundary to embed along",
            p.id
        )));
    }
    p.validate()?;
    let zipped = SignWord::parse("+")?;
    let ent_ids: Vec<String> = p.entrance.iter().map(|t| t.id.clone()).collect();
    let exit_ids: Vec<String> = p.exit.iter().map(|t| t.id.clone()).collect();
    let mut work = p.clone();

    let mut model = None;
    if !ent_ids.is_empty() {
        let repeller = realize_attractor(&vec![zipped.clone(); ent_ids.len()])?
            .reverse()
            .with_id_prefix("r_");
        work = Plug::disjoint_union(&work, &repeller)?;
        let mut pairs = Vec::new();
        for (i, ent) in ent_ids.iter().enumerate() {
            pairs.push(rotation_seam(&mut work, &format!("r_t_o_neg{i}"), ent)?);
        }
        if exit_ids.is_empty() {
            model = Some(self_glue(&work, &GluingSpec { pairs })?);
        } else {
            work = self_glue(&work, &GluingSpec { pairs })?.plug;
        }
    }
    if model.is_none() {
        let attractor = realize_attractor(&vec![zipped; exit_ids.len()])?.with_id_prefix("a_");
        work = Plug::disjoint_union(&work, &attractor)?;
        let mut pairs = Vec::new();
        for (j, exit) in exit_ids.iter().enumerate() {
            pairs.push(rotation_seam(&mut work, exit, &format!("a_t_o_neg{j}"))?);
        }
        model = Some(self_glue(&work, &GluingSpec { pairs })?);
    }
    let mut model = model.expect("one of the rounds closed the plug");

    if p.pieces.iter().all(|q| q.kind.is_saddle()) {
        // No attracting or repelling piece of p survives to anchor
        // transitivity, so spend one more surgery: bifurcate an orbit in the
        // attached attractor and one in the attached repeller, and reglue.
        let closed = model.plug.clone();
        let att = closed
            .pieces
            .iter()
            .find(|q| q.kind == PieceKind::Attractor)
            .ok_or_else(|| Error::Surgery("embedding lost its attractor piece".into()))?
            .id
            .clone();
        let rep = closed
            .pieces
            .iter()
            .find(|q| q.kind == PieceKind::Repeller)
            .ok_or_else(|| Error::Surgery("embedding lost its repeller piece".into()))?
            .id
            .clone();
        let oa = OrbitHandle::in_piece("o_embed_a", &att, Multipliers::Positive);
        let or = OrbitHandle::in_piece("o_embed_r", &rep, Multipliers::Positive);
        let step1 = da_bifurcation(&closed, &DASpec::new(&oa, DaDirection::Attracting))?;
        let mut q = da_bifurcation(&step1, &DASpec::new(&or, DaDirection::Repelling))?;
        let map = coherent_gluing(
            &boundary(&q, "t_o_embed_a")?.lamination,
            &boundary(&q, "t_o_embed_r")?.lamination,
        )?;
        relevel_seam(&mut q, "t_o_embed_a", "t_o_embed_r")?;
        let spec =
            GluingSpec { pairs: vec![GluingPair::new("t_o_embed_a", "t_o_embed_r", map)] };
        model = self_glue(&q, &spec)?;
    }

    model.notes.push(format!("sub-plug `{}` embedded intact", p.id));
    and_piece_transitivity(&mut model);
    Ok(model)
}

// ---------------------------------------------------------------------------
// A family of pairwise distinct models on one manifold
// ---------------------------------------------------------------------------

/// The half of the distinct-flows family: a twisted-orbit plug glued into
/// the entrance of a pseudo-Anosov plug, pushing the twisted exit leaf into
/// the middle of the first entrance band.
///
/// The rebuilt entrance lamination has `2n + 3` compact leaves: one special
/// leaf against the grain, the rest coherent — the one incoherent leaf
/// survives every further gluing and anchors the nonequivalence invariant.
pub fn m1_plug(n: usize) -> Result<Plug> {
    let v = v_twisted();
    let u = u_pseudo_anosov(n, Some(&[2 * n + 2]))?;
    let shift = TorusMap::translation((rat(1, 4 * (n as i64 + 1)), Rat::zero()));
    glue(&v, &u, &GluingSpec { pairs: vec![GluingPair::new("v_out", "pa_in", shift)] })
}

/// Build the family of `n` closed models on one underlying manifold.
///
/// Each model glues a plug to its time reversal: a compact-leaf-preserving
/// translation matches the pseudo-Anosov boundaries, while the special
/// boundaries are matched by the `k`-th of a family of translations, `k`
/// running from `1` to `n`.  All manifold descriptors agree; the models are
/// told apart by [`nonequivalence_invariant`].
pub fn build_n_flows(n: usize) -> Result<Vec<ClosedModel>> {
    if n == 0 {
        return Err(Error::Surgery("the distinct-flows family starts at n = 1".into()));
    }
    let template = m1_plug(n)?;
    let count = 2 * n + 3;
    let positions: Vec<Rat> = (0..count).map(|i| rat(i as i64, count as i64)).collect();
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        let wplus = template.with_id_prefix("p_");
        let wminus = template.reverse().with_id_prefix("m_");
        let mut union = Plug::disjoint_union(&wplus, &wminus)?;
        for id in ["p_v_in", "m_v_in"] {
            let torus = boundary_mut(&mut union, id)?;
            torus.lamination = torus.lamination.with_leaf_positions(&positions)?;
        }
        let phik = phik_gluing(n, k)?;
        relevel_seam(&mut union, "m_v_in", "p_v_in")?;
        let counts = annulus_leaf_counts(
            &boundary(&union, "m_v_in")?.lamination,
            &phik,
            &boundary(&union, "p_v_in")?.lamination,
        )?;
        let spec =
            GluingSpec { pairs: vec![GluingPair::new("m_v_in", "p_v_in", phik)] };
        let mut q = self_glue(&union, &spec)?.plug;
        let map = coherent_gluing(
            &boundary(&q, "p_pa_out_0")?.lamination,
            &boundary(&q, "m_pa_out_0")?.lamination,
        )?;
        relevel_seam(&mut q, "p_pa_out_0", "m_pa_out_0")?;
        let spec =
            GluingSpec { pairs: vec![GluingPair::new("p_pa_out_0", "m_pa_out_0", map)] };
        let mut model = self_glue(&q, &spec)?;
        model.notes.push(format!(
            "annulus leaf counts around the special leaf: {} {}",
            counts.0, counts.1
        ));
        model
            .notes
            .push("torus decomposition: two hyperbolic pieces and one Seifert piece".into());
        and_piece_transitivity(&mut model);
        out.push(model);
    }
    Ok(out)
}

/// The pair of receiving-leaf counts in the two annuli bounded by the
/// surviving special leaf, read back from a model built by
/// [`build_n_flows`] and sorted for comparison.
///
/// Models with different pairs carry non-conjugate flows: the pair counts
/// compact leaves in the complement of a leaf every self-equivalence must
/// preserve.
pub fn nonequivalence_invariant(model: &ClosedModel) -> Result<(usize, usize)> {
    for note in &model.notes {
        if let Some(rest) = note.strip_prefix("annulus leaf counts around the special leaf: ") {
            let mut it = rest.split_whitespace();
            let (Some(a), Some(b)) = (it.next(), it.next()) else {
                return Err(Error::Surgery(format!("malformed invariant note `{note}`")));
            };
            let a: usize = a
                .parse()
                .map_err(|_| Error::Surgery(format!("malformed invariant note `{note}`")))?;
            let b: usize = b
                .parse()
                .map_err(|_| Error::Surgery(format!("malformed invariant note `{note}`")))?;
            return Ok((a.min(b), a.max(b)));
        }
    }
    Err(Error::Surgery(
        "model carries no annulus-leaf-count note; was it built by the distinct-flows \
         pipeline?"
            .into(),
    ))
}

// ---------------------------------------------------------------------------
// A model with infinitely many transverse tori
// ---------------------------------------------------------------------------

/// Build the closed model carrying an infinite family of pairwise
/// non-isotopic transverse tori.
///
/// Two copies of the gradient-like plug are chained by a quarter-turn map
/// that makes every stable leaf meet every unstable leaf once, then closed
/// up by a second quarter-turn seam.  For every radius `q >= 1` the model
/// contains a transverse torus; [`torus_intersection`] counts the
/// intersection curves of two of them.
pub fn build_infinite_tori_model() -> Result<ClosedModel> {
    let u1 = u_gradient().with_id_prefix("a_");
    let u2 = u_gradient().with_id_prefix("b_");
    let psi = TorusMap::new([[0, -1], [1, 0]], (rat(1, 8), rat(1, 16)))?;
    let spec = GluingSpec { pairs: vec![GluingPair::new("a_ug_out", "b_ug_in", psi)] };
    let mut v = glue(&u1, &u2, &spec)?;
    let pair = rotation_seam(&mut v, "b_ug_out", "a_ug_in")?;
    let mut model = self_glue(&v, &GluingSpec { pairs: vec![pair] })?;
    model.notes.push(
        "a transverse torus survives over every radius q >= 1; distinct radii give \
         non-isotopic tori"
            .into(),
    );
    model.notes.push(
        "tori of radii q and q' intersect in |q - q'| parallel essential curves".into(),
    );
    and_piece_transitivity(&mut model);
    Ok(model)
}

/// Number of intersection curves of the transverse tori of radii `q` and
/// `q'` in the infinite-tori model, after isotoping them to minimal
/// position.
pub fn torus_intersection(q: usize, q_prime: usize) -> Result<usize> {
    if q == 0 || q_prime == 0 {
        return Err(Error::Surgery("transverse tori exist for radii q >= 1 only".into()));
    }
    Ok(q.abs_diff(q_prime))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::types_equivalent;
    use crate::gluing::AnosovStatus;

    fn word(s: &str) -> SignWord {
        SignWord::parse(s).expect("valid word")
    }

    #[test]
    fn base_bifurcations_carve_one_sided_plugs() {
        let base = ClosedAnosovBase::suspension(1, 1);

        let attracting = da_bifurcation_base(
            &base,
            &DASpec::new(&base.orbit("o_pos0").unwrap().clone(), DaDirection::Attracting),
        )
        .unwrap();
        assert!(attracting.is_repelling());
        assert_eq!(attracting.pieces[0].kind, PieceKind::Repeller);
        let t = &attracting.exit[0];
        assert_eq!(t.id, "t_o_pos0");
        assert_eq!(t.lamination.sign_word(), word("++"));
        assert!(t.lamination.foliation);
        assert!(attracting.metadata.notes[0].contains("semi-conjugates"));

        let repelling = da_bifurcation_base(
            &base,
            &DASpec::new(&base.orbit("o_neg0").unwrap().clone(), DaDirection::Repelling),
        )
        .unwrap();
        assert!(repelling.is_attracting());
        assert_eq!(repelling.pieces[0].kind, PieceKind::Attractor);
        let t = &repelling.entrance[0];
        assert_eq!(t.lamination.n_leaves(), 1);
        assert!(t.lamination.foliation);
        assert!(repelling.pieces[0].transitive);
    }

    #[test]
    fn bifurcation_refusals() {
        let base = ClosedAnosovBase::suspension(1, 1);
        let pos = base.orbit("o_pos0").unwrap().clone();

        let mut freed = DASpec::new(&pos, DaDirection::Attracting);
        freed.free_separatrix = true;
        assert!(matches!(da_bifurcation_base(&base, &freed), Err(Error::Surgery(_))));

        let mut wrong_count = DASpec::new(&base.orbit("o_neg0").unwrap().clone(),
            DaDirection::Repelling);
        wrong_count.requested_leaves = Some(2);
        let err = da_bifurcation_base(&base, &wrong_count).unwrap_err();
        assert!(err.to_string().contains("1 compact"));

        let ghost = OrbitHandle::in_base("o_ghost", Multipliers::Positive);
        assert!(da_bifurcation_base(&base, &DASpec::new(&ghost, DaDirection::Attracting))
            .is_err());

        let mut misdeclared = DASpec::new(&pos, DaDirection::Attracting);
        misdeclared.multipliers = Multipliers::Negative;
        assert!(da_bifurcation_base(&base, &misdeclared).is_err());

        // Single-orbit pieces cannot lose their only orbit.
        let v = v_twisted();
        let orbit = OrbitHandle::in_piece("the_orbit", "v_orbit", Multipliers::Negative);
        let err = da_bifurcation(&v, &DASpec::new(&orbit, DaDirection::Attracting)).unwrap_err();
        assert!(err.to_string().contains("empty the piece"));

        // Negative multipliers must be on offer in the piece.
        let positive_base = ClosedAnosovBase::suspension(0, 2);
        let carved = da_bifurcation_base(
            &positive_base,
            &DASpec::new(&positive_base.orbits[0].clone(), DaDirection::Attracting),
        )
        .unwrap();
        let greedy = OrbitHandle::in_piece("o_more", "suspension", Multipliers::Negative);
        assert!(da_bifurcation(&carved, &DASpec::new(&greedy, DaDirection::Attracting))
            .is_err());
    }

    #[test]
    fn blow_up_excise_glue_is_realizable_and_transitive() {
        let base = ClosedAnosovBase::suspension(0, 2);
        let model = blow_up_excise_glue(&base, "o_pos0", "o_pos1").unwrap();
        assert_eq!(model.status, AnosovStatus::Realizable);
        assert!(model.transitive);
        assert!(model.plug.is_closed());
        assert_eq!(model.plug.pieces.len(), 1);
        assert!(model.graph.edges.contains(&(0, 0)));
        assert!(model.pairs[0].certificate.is_strong());
        assert!(model.plug.metadata.notes.iter().any(|n| n.contains("semi-conjugates")));

        assert!(blow_up_excise_glue(&base, "o_pos0", "o_pos0").is_err());

        let mut lazy = ClosedAnosovBase::suspension(0, 2);
        lazy.transitive = false;
        let model = blow_up_excise_glue(&lazy, "o_pos0", "o_pos1").unwrap();
        assert!(!model.transitive);
    }

    #[test]
    fn both_flows_share_a_manifold_but_not_a_certificate() {
        let (one_sided, crosswise) = build_both_flows().unwrap();
        assert_eq!(one_sided.status, AnosovStatus::Direct);
        assert!(!one_sided.transitive);
        assert_eq!(crosswise.status, AnosovStatus::Realizable);
        assert!(crosswise.transitive);
        assert_eq!(one_sided.descriptor, crosswise.descriptor);
    }

    #[test]
    fn word_chain_reconstructs_every_word() {
        for len in 1usize..=5 {
            for mask in 0..(1u32 << (len - 1)) {
                let signs: Vec<Sign> = std::iter::once(Sign::Plus)
                    .chain((0..len - 1).map(|i| {
                        if mask >> i & 1 == 1 {
                            Sign::Minus
                        } else {
                            Sign::Plus
                        }
                    }))
                    .collect();
                let target = SignWord::new(signs).unwrap();
                let mut current = vec![Sign::Plus];
                for flip in word_chain(&target) {
                    let mut next = vec![Sign::Plus];
                    next.extend(current.iter().map(|&s| {
                        if flip {
                            match s {
                                Sign::Plus => Sign::Minus,
                                Sign::Minus => Sign::Plus,
                            }
                        } else {
                            s
                        }
                    }));
                    current = next;
                }
                assert_eq!(SignWord::new(current).unwrap(), target);
            }
        }
    }

    #[test]
    fn realize_attractor_seed_and_single_step() {
        let seed = realize_attractor(&[word("+")]).unwrap();
        assert!(seed.is_attracting());
        assert_eq!(seed.entrance.len(), 1);
        assert_eq!(seed.entrance[0].lamination.sign_word(), word("+"));
        assert!(seed.entrance[0].lamination.foliation);

        let grown = realize_attractor(&[word("+-")]).unwrap();
        assert!(grown.is_attracting());
        assert_eq!(grown.entrance.len(), 1);
        let lam = &grown.entrance[0].lamination;
        assert_eq!(lam.sign_word(), word("+-"));
        assert!(lam.foliation);
        assert!(types_equivalent(&lam.sign_word(), &word("+-")));
        assert_eq!(grown.pieces.len(), 1);
        assert_eq!(grown.pieces[0].kind, PieceKind::Attractor);
    }

    #[test]
    fn realize_attractor_all_small_types() {
        for len in 1usize..=4 {
            for mask in 0..(1u32 << (len - 1)) {
                let signs: Vec<Sign> = std::iter::once(Sign::Plus)
                    .chain((0..len - 1).map(|i| {
                        if mask >> i & 1 == 1 {
                            Sign::Minus
                        } else {
                            Sign::Plus
                        }
                    }))
                    .collect();
                let target = SignWord::new(signs).unwrap();
                let plug = realize_attractor(std::slice::from_ref(&target)).unwrap();
                let realized = plug.entrance[0].lamination.sign_word();
                assert_eq!(realized, target, "realized word mismatch for {target}");
                assert!(types_equivalent(&realized, &target));
                assert!(plug.entrance[0].lamination.foliation);
            }
        }
    }

    #[test]
    fn realize_attractor_several_tori() {
        let plug = realize_attractor(&[word("+"), word("+--")]).unwrap();
        assert!(plug.is_attracting());
        assert_eq!(plug.entrance.len(), 2);
        let words: Vec<String> =
            plug.entrance.iter().map(|t| t.lamination.sign_word().to_string()).collect();
        assert!(words.contains(&"+".to_string()));
        assert!(words.contains(&"+--".to_string()));
        assert!(realize_attractor(&[]).is_err());
    }

    #[test]
    fn embedding_keeps_the_plug_and_certifies() {
        let model = embed_in_anosov(&u_gradient()).unwrap();
        assert_eq!(model.status, AnosovStatus::Realizable);
        assert!(model.transitive);
        assert!(model.plug.is_closed());
        assert!(model.plug.pieces.iter().any(|p| p.id == "sigma1"));
        assert!(model.plug.pieces.iter().any(|p| p.id == "sigma2"));
        assert!(model.plug.pieces.iter().all(|p| p.kind.is_saddle()));
        assert!(model.notes.iter().any(|n| n.contains("sub-plug `U_gradient`")));

        let base = ClosedAnosovBase::suspension(0, 2);
        assert!(embed_in_anosov(&base.as_closed_plug()).is_err());
    }

    #[test]
    fn half_plug_has_one_special_leaf() {
        let half = m1_plug(1).unwrap();
        assert_eq!(half.entrance.len(), 1);
        assert_eq!(half.entrance[0].lamination.sign_word(), word("+----"));
        assert_eq!(half.exit.len(), 1);
        assert_eq!(half.exit[0].lamination.n_leaves(), 4);

        let bigger = m1_plug(2).unwrap();
        assert_eq!(bigger.entrance[0].lamination.sign_word(), word("+------"));
        assert_eq!(bigger.entrance[0].lamination.incoherent_leaves().len(), 1);
    }

    #[test]
    fn distinct_flows_family_shares_descriptor_but_not_invariant() {
        let family = build_n_flows(2).unwrap();
        assert_eq!(family.len(), 2);
        let mut invariants = Vec::new();
        for model in &family {
            assert_eq!(model.status, AnosovStatus::Realizable);
            assert!(model.transitive);
            assert_eq!(model.descriptor, family[0].descriptor);
            invariants.push(nonequivalence_invariant(model).unwrap());
        }
        assert_eq!(invariants, vec![(1, 5), (2, 4)]);
        assert!(build_n_flows(0).is_err());

        let small = build_n_flows(1).unwrap();
        assert_eq!(small.len(), 1);
        assert_eq!(nonequivalence_invariant(&small[0]).unwrap(), (1, 3));
    }

    #[test]
    fn infinite_tori_model_counts_intersections() {
        let model = build_infinite_tori_model().unwrap();
        assert_eq!(model.status, AnosovStatus::Realizable);
        assert!(model.transitive);
        assert!(model.plug.is_closed());

        assert!(torus_intersection(0, 3).is_err());
        assert!(torus_intersection(3, 0).is_err());
        assert_eq!(torus_intersection(1, 2).unwrap(), 1);
        assert_eq!(torus_intersection(2, 2).unwrap(), 0);
        assert_eq!(torus_intersection(1, 3).unwrap(), 2);
        for q in 1usize..=10 {
            for q_prime in 1usize..=10 {
                assert_eq!(torus_intersection(q, q_prime).unwrap(), q.abs_diff(q_prime));
            }
        }
    }
}
