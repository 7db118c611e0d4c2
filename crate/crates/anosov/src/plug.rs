//! Hyperbolic plugs: basic pieces, boundary tori, gap routing, and the
//! catalog of primitive plugs that gluings and surgeries start from.
//!
//! A plug is a compact 3-manifold carrying a vector field transverse to the
//! boundary whose maximal invariant set is hyperbolic.  The model keeps no
//! smooth data: a plug is described by its basic pieces, its boundary tori
//! with their laminations, the connection relation between pieces, and the
//! band-level routing of the crossing map from entrance gaps to exit gaps.
//!
//! Routing is the load-bearing part.  The complement of the entrance
//! laminations and the complement of the exit laminations are in bijection
//! under the crossing map (an orbit entering a gap must leave through one),
//! so every plug carries a list of [`GapRoute`] bundles whose strip counts
//! exactly cover the gaps on both sides.  Gluings consume routes torus by
//! torus and compose them into routes of the glued plug.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::foliation::{BandFill, BoundarySide, SignWord, TorusLamination};

/// Dynamical type of one basic piece of the maximal invariant set.
///
/// `Attractor` and `Repeller` cover both periodic orbits and non-trivial
/// (expanding or contracting) pieces; what matters downstream is the role
/// the piece plays inside its plug, not whether it is a single orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PieceKind {
    /// Saddle piece that is not a single closed orbit.
    SaddleNontrivial,
    /// Saddle piece consisting of one periodic orbit.
    SaddleOrbit,
    /// Attracting piece: a neighborhood flows onto it forward in time.
    Attractor,
    /// Repelling piece: a neighborhood flows onto it backward in time.
    Repeller,
}

impl PieceKind {
    /// True for the two saddle variants.
    pub fn is_saddle(self) -> bool {
        matches!(self, PieceKind::SaddleNontrivial | PieceKind::SaddleOrbit)
    }

    /// Kind of the same piece for the time-reversed flow.
    pub fn reversed(self) -> PieceKind {
        match self {
            PieceKind::Attractor => PieceKind::Repeller,
            PieceKind::Repeller => PieceKind::Attractor,
            saddle => saddle,
        }
    }
}

/// Sign of the multipliers of a periodic-orbit piece.
///
/// Negative multipliers mean the invariant manifolds of the orbit are
/// Möbius bands, which is what makes a plug twist contracting orientations
/// in transport; see [`GapRoute::twist`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Multipliers {
    /// Both multipliers positive: annular invariant manifolds.
    Positive,
    /// Both multipliers negative: Möbius-band invariant manifolds.
    Negative,
    /// Not a periodic-orbit piece.
    NotApplicable,
}

/// One basic piece of the spectral decomposition of a plug's maximal
/// invariant set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicPiece {
    /// Stable identifier, unique within the plug.
    pub id: String,
    /// Dynamical type.
    pub kind: PieceKind,
    /// Whether the restricted flow is transitive on the piece.
    pub transitive: bool,
    /// Multiplier signs for orbit pieces, `NotApplicable` otherwise.
    pub multipliers: Multipliers,
}

/// One boundary torus of a plug, with its lamination.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTorus {
    /// Stable identifier, unique within the plug.
    pub id: String,
    /// Which side of the plug the torus lies on.
    pub side: BoundarySide,
    /// Trace of the stable (entrance) or unstable (exit) manifolds.
    pub lamination: TorusLamination,
    /// Pieces whose invariant-manifold trace is dense in the whole
    /// lamination of this torus.  Declared, not computed: density is a
    /// property of the non-compact leaves, which the model only counts.
    pub dense_pieces: Vec<usize>,
}

impl BoundaryTorus {
    /// Indices of all pieces whose trace appears on this torus: the owners
    /// of the compact leaves together with the declared dense pieces.
    pub fn pieces(&self) -> BTreeSet<usize> {
        let mut set: BTreeSet<usize> = self.dense_pieces.iter().copied().collect();
        set.extend(self.lamination.leaves.iter().map(|l| l.owner));
        set
    }
}

/// A bundle of parallel gap strips carried by the crossing map from one
/// entrance band to one exit band.
///
/// `strips` of them run together; several bundles may end on the same band
/// as long as the totals match the band's strip counts on both sides.  An
/// annulus gap (empty band) always routes alone to an annulus gap, since
/// the crossing map is a homeomorphism between the complements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapRoute {
    /// `(torus, band)` indices into the entrance list.
    pub entrance: (usize, usize),
    /// `(torus, band)` indices into the exit list.
    pub exit: (usize, usize),
    /// Number of parallel strips in the bundle (at least 1).
    pub strips: usize,
    /// Whether transport along this route reverses contracting
    /// orientations (the gap runs along a Möbius-band invariant manifold).
    pub twist: bool,
}

/// Annotations about the plug's interior that the combinatorial model
/// cannot derive but downstream reporting wants to carry along.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlugMetadata {
    /// Whether the plug's interior admits a complete hyperbolic metric.
    pub interior_hyperbolic: bool,
    /// Geometric label for the torus decomposition ("Seifert",
    /// "hyperbolic", ...).
    pub jsj_label: String,
    /// Provenance annotations (semi-conjugacies, surgery trails) carried
    /// verbatim through unions and gluings.
    pub notes: Vec<String>,
}

/// A hyperbolic plug.
#[derive(Debug, Clone, PartialEq)]
pub struct Plug {
    /// Stable identifier.
    pub id: String,
    /// Basic pieces of the maximal invariant set.
    pub pieces: Vec<BasicPiece>,
    /// Entrance tori, each carrying the trace of the stable manifolds.
    pub entrance: Vec<BoundaryTorus>,
    /// Exit tori, each carrying the trace of the unstable manifolds.
    pub exit: Vec<BoundaryTorus>,
    /// Pairs `(i, j)` such that the unstable set of piece `i` meets the
    /// stable set of piece `j` inside the plug.  Always reflexive.
    pub connections: BTreeSet<(usize, usize)>,
    /// Strip bundles of the crossing map; they exactly cover the gaps of
    /// every non-foliated boundary torus on both sides.
    pub routes: Vec<GapRoute>,
    /// Interior annotations.
    pub metadata: PlugMetadata,
}

impl Plug {
    /// Total number of complement gaps on the entrance side.
    pub fn entrance_gaps(&self) -> usize {
        self.entrance.iter().map(|t| t.lamination.strips()).sum()
    }

    /// Total number of complement gaps on the exit side.
    pub fn exit_gaps(&self) -> usize {
        self.exit.iter().map(|t| t.lamination.strips()).sum()
    }

    /// True when the plug has entrance tori but no exit tori, so every
    /// forward orbit stays inside.
    pub fn is_attracting(&self) -> bool {
        self.exit.is_empty() && !self.entrance.is_empty()
    }

    /// True when the plug has exit tori but no entrance tori.
    pub fn is_repelling(&self) -> bool {
        self.entrance.is_empty() && !self.exit.is_empty()
    }

    /// True when the plug has no boundary at all (a closed manifold).
    pub fn is_closed(&self) -> bool {
        self.entrance.is_empty() && self.exit.is_empty()
    }

    /// True when the plug has boundary on both sides and every basic piece
    /// is a saddle — the shape required of gluing candidates that should
    /// yield transitive flows.
    pub fn is_saddle_plug(&self) -> bool {
        !self.entrance.is_empty()
            && !self.exit.is_empty()
            && self.pieces.iter().all(|p| p.kind.is_saddle())
    }

    /// Index of the entrance torus with the given id.
    pub fn entrance_index(&self, id: &str) -> Option<usize> {
        self.entrance.iter().position(|t| t.id == id)
    }

    /// Index of the exit torus with the given id.
    pub fn exit_index(&self, id: &str) -> Option<usize> {
        self.exit.iter().position(|t| t.id == id)
    }

    /// Partition of the pieces into groups that share a boundary torus or
    /// an internal connection — the connected summands of a disjoint
    /// union.  Each boundary torus belongs to exactly one group.
    pub fn piece_groups(&self) -> Vec<Vec<usize>> {
        let n = self.pieces.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, i: usize) -> usize {
            if parent[i] != i {
                let root = find(parent, parent[i]);
                parent[i] = root;
            }
            parent[i]
        }
        let union = |parent: &mut Vec<usize>, a: usize, b: usize| {
            let (ra, rb) = (find(parent, a), find(parent, b));
            if ra != rb {
                parent[ra] = rb;
            }
        };
        for &(i, j) in &self.connections {
            union(&mut parent, i, j);
        }
        for torus in self.entrance.iter().chain(&self.exit) {
            let members: Vec<usize> = torus.pieces().into_iter().collect();
            for w in members.windows(2) {
                union(&mut parent, w[0], w[1]);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..n {
            let root = find(&mut parent, i);
            groups.entry(root).or_default().push(i);
        }
        groups.into_values().collect()
    }

    /// Check every structural invariant of the plug.
    ///
    /// Verified: id uniqueness, index bounds, side tags, reflexivity of the
    /// connection relation, route coverage (bundle strip totals equal the
    /// gap counts of every non-foliated band on both sides, annulus gaps
    /// route to annulus gaps), the global gap balance, and the boundary
    /// closure rules (an attracting plug has foliated entrances and an
    /// attractor piece; mirrored for repelling plugs).
    pub fn validate(&self) -> Result<()> {
        let np = self.pieces.len();
        if np == 0 {
            return Err(Error::BoundaryMismatch(format!(
                "plug `{}` has no basic pieces",
                self.id
            )));
        }
        let piece_ids: BTreeSet<&str> = self.pieces.iter().map(|p| p.id.as_str()).collect();
        if piece_ids.len() != np {
            return Err(Error::BoundaryMismatch(format!(
                "plug `{}` has duplicate piece ids",
                self.id
            )));
        }
        let mut torus_ids: BTreeSet<&str> = BTreeSet::new();
        for (side, list) in [
            (BoundarySide::Entrance, &self.entrance),
            (BoundarySide::Exit, &self.exit),
        ] {
            for torus in list.iter() {
                if torus.side != side {
                    return Err(Error::BoundaryMismatch(format!(
                        "torus `{}` is listed on the wrong side",
                        torus.id
                    )));
                }
                if !torus_ids.insert(&torus.id) {
                    return Err(Error::BoundaryMismatch(format!(
                        "duplicate torus id `{}`",
                        torus.id
                    )));
                }
                let mut leaf_ids: BTreeSet<&str> = BTreeSet::new();
                for leaf in &torus.lamination.leaves {
                    if leaf.owner >= np {
                        return Err(Error::BoundaryMismatch(format!(
                            "leaf `{}` on `{}` names piece {} of {}",
                            leaf.id, torus.id, leaf.owner, np
                        )));
                    }
                    if !leaf_ids.insert(&leaf.id) {
                        return Err(Error::BoundaryMismatch(format!(
                            "duplicate leaf id `{}` on torus `{}`",
                            leaf.id, torus.id
                        )));
                    }
                }
                if torus.dense_pieces.iter().any(|&d| d >= np) {
                    return Err(Error::BoundaryMismatch(format!(
                        "torus `{}` declares an out-of-range dense piece",
                        torus.id
                    )));
                }
                if torus.lamination.foliation
                    && torus.lamination.bands.iter().any(|b| b.fill == BandFill::Empty)
                {
                    return Err(Error::NotFilling(format!(
                        "torus `{}` is marked as a foliation but has an empty band",
                        torus.id
                    )));
                }
            }
        }
        for &(i, j) in &self.connections {
            if i >= np || j >= np {
                return Err(Error::BoundaryMismatch(format!(
                    "connection ({i}, {j}) out of range in plug `{}`",
                    self.id
                )));
            }
        }
        for i in 0..np {
            if !self.connections.contains(&(i, i)) {
                return Err(Error::BoundaryMismatch(format!(
                    "piece `{}` lacks its reflexive connection",
                    self.pieces[i].id
                )));
            }
        }

        if self.is_attracting() {
            if let Some(t) = self.entrance.iter().find(|t| !t.lamination.foliation) {
                return Err(Error::NotFilling(format!(
                    "attracting plug `{}` has non-foliated entrance `{}`",
                    self.id, t.id
                )));
            }
            if !self.pieces.iter().any(|p| p.kind == PieceKind::Attractor) {
                return Err(Error::BoundaryMismatch(format!(
                    "attracting plug `{}` has no attractor piece",
                    self.id
                )));
            }
        }
        if self.is_repelling() {
            if let Some(t) = self.exit.iter().find(|t| !t.lamination.foliation) {
                return Err(Error::NotFilling(format!(
                    "repelling plug `{}` has non-foliated exit `{}`",
                    self.id, t.id
                )));
            }
            if !self.pieces.iter().any(|p| p.kind == PieceKind::Repeller) {
                return Err(Error::BoundaryMismatch(format!(
                    "repelling plug `{}` has no repeller piece",
                    self.id
                )));
            }
        }

        let mut from: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut to: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for route in &self.routes {
            if route.strips == 0 {
                return Err(Error::GapMismatch("route bundle with zero strips".into()));
            }
            let (ti, bi) = route.entrance;
            let (to_t, to_b) = route.exit;
            let ent = self.entrance.get(ti).ok_or_else(|| {
                Error::GapMismatch(format!("route names missing entrance torus {ti}"))
            })?;
            let ext = self.exit.get(to_t).ok_or_else(|| {
                Error::GapMismatch(format!("route names missing exit torus {to_t}"))
            })?;
            if ent.lamination.foliation || ext.lamination.foliation {
                return Err(Error::GapMismatch(format!(
                    "route references foliated torus `{}`",
                    if ent.lamination.foliation { &ent.id } else { &ext.id }
                )));
            }
            let eband = ent.lamination.bands.get(bi).ok_or_else(|| {
                Error::GapMismatch(format!("route names missing band {bi} on `{}`", ent.id))
            })?;
            let xband = ext.lamination.bands.get(to_b).ok_or_else(|| {
                Error::GapMismatch(format!("route names missing band {to_b} on `{}`", ext.id))
            })?;
            let e_empty = eband.fill == BandFill::Empty;
            let x_empty = xband.fill == BandFill::Empty;
            if e_empty != x_empty {
                return Err(Error::GapMismatch(format!(
                    "route `{}`[{bi}] -> `{}`[{to_b}] pairs an annulus gap with strips",
                    ent.id, ext.id
                )));
            }
            if e_empty && route.strips != 1 {
                return Err(Error::GapMismatch(
                    "annulus gaps route as single bundles".into(),
                ));
            }
            *from.entry(route.entrance).or_default() += route.strips;
            *to.entry(route.exit).or_default() += route.strips;
        }
        for (side, list, cover) in [("entrance", &self.entrance, &from), ("exit", &self.exit, &to)]
        {
            for (ti, torus) in list.iter().enumerate() {
                if torus.lamination.foliation {
                    continue;
                }
                for (bi, band) in torus.lamination.bands.iter().enumerate() {
                    let want = band.strips();
                    let got = cover.get(&(ti, bi)).copied().unwrap_or(0);
                    if got != want {
                        return Err(Error::GapMismatch(format!(
                            "{side} band {bi} of `{}` has {want} gaps but routes carry {got}",
                            torus.id
                        )));
                    }
                }
            }
        }
        if self.entrance_gaps() != self.exit_gaps() {
            return Err(Error::GapMismatch(format!(
                "plug `{}` has {} entrance gaps vs {} exit gaps",
                self.id,
                self.entrance_gaps(),
                self.exit_gaps()
            )));
        }
        Ok(())
    }

    /// The same plug for the time-reversed flow: entrance and exit swap
    /// (laminations travel verbatim — the unstable lamination of the
    /// reversed flow is the stable lamination of the original), the
    /// connection relation transposes, routes reverse, and attracting
    /// pieces trade places with repelling ones.  An involution.
    pub fn reverse(&self) -> Plug {
        let flip = |tori: &[BoundaryTorus], side: BoundarySide| -> Vec<BoundaryTorus> {
            tori.iter()
                .map(|t| BoundaryTorus { side, ..t.clone() })
                .collect()
        };
        Plug {
            id: self.id.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|p| BasicPiece { kind: p.kind.reversed(), ..p.clone() })
                .collect(),
            entrance: flip(&self.exit, BoundarySide::Entrance),
            exit: flip(&self.entrance, BoundarySide::Exit),
            connections: self.connections.iter().map(|&(i, j)| (j, i)).collect(),
            routes: self
                .routes
                .iter()
                .map(|r| GapRoute { entrance: r.exit, exit: r.entrance, ..*r })
                .collect(),
            metadata: self.metadata.clone(),
        }
    }

    /// Copy of the plug with every id (plug, pieces, tori, leaves)
    /// prefixed, so that two copies of the same plug can live in one
    /// disjoint union.
    pub fn with_id_prefix(&self, prefix: &str) -> Plug {
        let mut out = self.clone();
        out.id = format!("{prefix}{}", self.id);
        for p in &mut out.pieces {
            p.id = format!("{prefix}{}", p.id);
        }
        for torus in out.entrance.iter_mut().chain(&mut out.exit) {
            torus.id = format!("{prefix}{}", torus.id);
            for leaf in &mut torus.lamination.leaves {
                leaf.id = format!("{prefix}{}", leaf.id);
            }
        }
        out
    }

    /// Disjoint union of two plugs: pieces, tori, connections, and routes
    /// concatenate, with `b`'s indices shifted past `a`'s.  All ids must be
    /// distinct; prefix one side with [`Plug::with_id_prefix`] when gluing
    /// a plug to a copy of itself.
    pub fn disjoint_union(a: &Plug, b: &Plug) -> Result<Plug> {
        let shift = a.pieces.len();
        let mut ids: BTreeSet<&str> = BTreeSet::new();
        for id in a
            .pieces
            .iter()
            .map(|p| p.id.as_str())
            .chain(b.pieces.iter().map(|p| p.id.as_str()))
            .chain(a.entrance.iter().chain(&a.exit).map(|t| t.id.as_str()))
            .chain(b.entrance.iter().chain(&b.exit).map(|t| t.id.as_str()))
        {
            if !ids.insert(id) {
                return Err(Error::BoundaryMismatch(format!(
                    "disjoint union of `{}` and `{}` repeats the id `{id}`",
                    a.id, b.id
                )));
            }
        }
        let shift_torus = |t: &BoundaryTorus| -> BoundaryTorus {
            let mut out = t.clone();
            for leaf in &mut out.lamination.leaves {
                leaf.owner += shift;
            }
            for d in &mut out.dense_pieces {
                *d += shift;
            }
            out
        };
        let mut entrance = a.entrance.clone();
        entrance.extend(b.entrance.iter().map(shift_torus));
        let mut exit = a.exit.clone();
        exit.extend(b.exit.iter().map(shift_torus));
        let mut connections = a.connections.clone();
        connections.extend(b.connections.iter().map(|&(i, j)| (i + shift, j + shift)));
        let mut routes = a.routes.clone();
        routes.extend(b.routes.iter().map(|r| GapRoute {
            entrance: (r.entrance.0 + a.entrance.len(), r.entrance.1),
            exit: (r.exit.0 + a.exit.len(), r.exit.1),
            ..*r
        }));
        let mut pieces = a.pieces.clone();
        pieces.extend(b.pieces.iter().cloned());
        Ok(Plug {
            id: format!("{}+{}", a.id, b.id),
            pieces,
            entrance,
            exit,
            connections,
            routes,
            metadata: PlugMetadata {
                interior_hyperbolic: a.metadata.interior_hyperbolic
                    && b.metadata.interior_hyperbolic,
                jsj_label: if a.metadata.jsj_label == b.metadata.jsj_label {
                    a.metadata.jsj_label.clone()
                } else {
                    format!("{}+{}", a.metadata.jsj_label, b.metadata.jsj_label)
                },
                notes: a
                    .metadata
                    .notes
                    .iter()
                    .chain(&b.metadata.notes)
                    .cloned()
                    .collect(),
            },
        })
    }
}

fn single_leaf_torus(id: &str, side: BoundarySide, leaf_id: &str) -> BoundaryTorus {
    let mut lam = TorusLamination::from_word(&SignWord::parse("+").expect("valid word"));
    lam.bands[0].fill = BandFill::Empty;
    lam.leaves[0].id = leaf_id.to_string();
    BoundaryTorus { id: id.to_string(), side, lamination: lam, dense_pieces: vec![0] }
}

/// The orientation-twisting plug: a circle bundle over the twice-punctured
/// sphere whose maximal invariant set is a single saddle orbit with
/// negative multipliers.  Both boundary laminations consist of exactly one
/// compact leaf (the trace of the orbit's Möbius-band invariant manifold),
/// so neither is filling, and the single gap route twists.
pub fn v_twisted() -> Plug {
    Plug {
        id: "V_twisted".into(),
        pieces: vec![BasicPiece {
            id: "v_orbit".into(),
            kind: PieceKind::SaddleOrbit,
            transitive: true,
            multipliers: Multipliers::Negative,
        }],
        entrance: vec![single_leaf_torus("v_in", BoundarySide::Entrance, "vs0")],
        exit: vec![single_leaf_torus("v_out", BoundarySide::Exit, "vu0")],
        connections: BTreeSet::from([(0, 0)]),
        routes: vec![GapRoute { entrance: (0, 0), exit: (0, 0), strips: 1, twist: true }],
        metadata: PlugMetadata { interior_hyperbolic: false, jsj_label: "Seifert".into(), notes: vec![] },
    }
}

/// The pair-of-pants plug: pants × S¹ with a single positive saddle orbit,
/// two entrance tori with one leaf each, and one exit torus whose two
/// leaves are coherently oriented.  Its role is to merge two boundary
/// tori into one without disturbing orientations.
pub fn w_pants() -> Plug {
    let mut exit_lam = TorusLamination::from_word(&SignWord::parse("++").expect("valid word"));
    for (i, leaf) in exit_lam.leaves.iter_mut().enumerate() {
        leaf.id = format!("wu{i}");
    }
    for band in &mut exit_lam.bands {
        band.fill = BandFill::Empty;
    }
    Plug {
        id: "W_pants".into(),
        pieces: vec![BasicPiece {
            id: "w_orbit".into(),
            kind: PieceKind::SaddleOrbit,
            transitive: true,
            multipliers: Multipliers::Positive,
        }],
        entrance: vec![
            single_leaf_torus("w_in_1", BoundarySide::Entrance, "ws1"),
            single_leaf_torus("w_in_2", BoundarySide::Entrance, "ws2"),
        ],
        exit: vec![BoundaryTorus {
            id: "w_out".into(),
            side: BoundarySide::Exit,
            lamination: exit_lam,
            dense_pieces: vec![0],
        }],
        connections: BTreeSet::from([(0, 0)]),
        routes: vec![
            GapRoute { entrance: (0, 0), exit: (0, 0), strips: 1, twist: false },
            GapRoute { entrance: (1, 0), exit: (0, 1), strips: 1, twist: false },
        ],
        metadata: PlugMetadata { interior_hyperbolic: false, jsj_label: "Seifert".into(), notes: vec![] },
    }
}

/// The gradient plug on (T² minus two discs) × S¹: the planar field has a
/// source and a sink (both excised) and two saddles, suspended with a
/// drift that turns the saddles into periodic orbits.  Each boundary torus
/// carries four alternating compact leaves, owned alternately by the two
/// saddle orbits, with empty bands; the invariant manifolds of one orbit
/// are disjoint from those of the other, so the plug has no cross
/// connections and neither piece is dense in a whole lamination.
pub fn u_gradient() -> Plug {
    let make = |id: &str, side: BoundarySide, prefix: &str| -> BoundaryTorus {
        let mut lam = TorusLamination::from_word(&SignWord::parse("+-+-").expect("valid word"));
        for (i, leaf) in lam.leaves.iter_mut().enumerate() {
            leaf.id = format!("{prefix}{i}");
            leaf.owner = i % 2;
        }
        for band in &mut lam.bands {
            band.fill = BandFill::Empty;
        }
        BoundaryTorus { id: id.to_string(), side, lamination: lam, dense_pieces: vec![] }
    };
    let piece = |id: &str| BasicPiece {
        id: id.to_string(),
        kind: PieceKind::SaddleOrbit,
        transitive: true,
        multipliers: Multipliers::Positive,
    };
    Plug {
        id: "U_gradient".into(),
        pieces: vec![piece("sigma1"), piece("sigma2")],
        entrance: vec![make("ug_in", BoundarySide::Entrance, "g")],
        exit: vec![make("ug_out", BoundarySide::Exit, "h")],
        connections: BTreeSet::from([(0, 0), (1, 1)]),
        routes: (0..4)
            .map(|i| GapRoute { entrance: (0, i), exit: (0, i), strips: 1, twist: false })
            .collect(),
        metadata: PlugMetadata { interior_hyperbolic: false, jsj_label: "Seifert".into(), notes: vec![] },
    }
}

/// The pseudo-Anosov suspension plug: the suspension of a pseudo-Anosov
/// homeomorphism with a (2n+2)-pronged singularity, blown up along the
/// singular orbit and truncated.  The single entrance torus carries 2n+2
/// coherent compact leaves with spiralling bands; the exit tori (one per
/// remaining singular orbit) carry `exit_prongs` leaves each, summing to
/// 2n+2.  The single piece is a non-trivial transitive saddle and its
/// interior admits a hyperbolic metric.
pub fn u_pseudo_anosov(n: usize, exit_prongs: Option<&[usize]>) -> Result<Plug> {
    if n == 0 {
        return Err(Error::UnknownPlug(
            "the pseudo-Anosov plug needs n >= 1 (at least 4 prongs)".into(),
        ));
    }
    let m = 2 * n + 2;
    let prongs: Vec<usize> = exit_prongs.map_or_else(|| vec![m], <[usize]>::to_vec);
    if prongs.is_empty() || prongs.contains(&0) {
        return Err(Error::UnknownPlug(
            "every exit torus of the pseudo-Anosov plug needs at least one prong".into(),
        ));
    }
    let total: usize = prongs.iter().sum();
    if total != m {
        return Err(Error::GapMismatch(format!(
            "exit prongs must sum to {m}, got {total}"
        )));
    }
    let coherent = |count: usize, prefix: &str| -> TorusLamination {
        let word = SignWord::parse(&"+".repeat(count)).expect("valid word");
        let mut lam = TorusLamination::from_word(&word);
        for (i, leaf) in lam.leaves.iter_mut().enumerate() {
            leaf.id = format!("{prefix}{i}");
        }
        lam
    };
    let exit: Vec<BoundaryTorus> = prongs
        .iter()
        .enumerate()
        .map(|(k, &s)| BoundaryTorus {
            id: format!("pa_out_{k}"),
            side: BoundarySide::Exit,
            lamination: coherent(s, &format!("u{k}_")),
            dense_pieces: vec![0],
        })
        .collect();
    let mut routes = Vec::with_capacity(m);
    let mut flat = prongs
        .iter()
        .enumerate()
        .flat_map(|(k, &s)| (0..s).map(move |j| (k, j)));
    for i in 0..m {
        let (k, j) = flat.next().expect("prongs sum to m");
        routes.push(GapRoute { entrance: (0, i), exit: (k, j), strips: 1, twist: false });
    }
    Ok(Plug {
        id: format!("U_pseudo_anosov_{n}"),
        pieces: vec![BasicPiece {
            id: "pa_piece".into(),
            kind: PieceKind::SaddleNontrivial,
            transitive: true,
            multipliers: Multipliers::NotApplicable,
        }],
        entrance: vec![BoundaryTorus {
            id: "pa_in".into(),
            side: BoundarySide::Entrance,
            lamination: coherent(m, "s"),
            dense_pieces: vec![0],
        }],
        exit,
        connections: BTreeSet::from([(0, 0)]),
        routes,
        metadata: PlugMetadata { interior_hyperbolic: true, jsj_label: "hyperbolic".into(), notes: vec![] },
    })
}

/// Look up a catalog plug by name.  `n` parameterizes the pseudo-Anosov
/// plug and is ignored by the fixed plugs.
pub fn catalog(kind: &str, n: Option<usize>) -> Result<Plug> {
    match kind {
        "V_twisted" => Ok(v_twisted()),
        "W_pants" => Ok(w_pants()),
        "U_gradient" => Ok(u_gradient()),
        "U_pseudo_anosov" => {
            let n = n.ok_or_else(|| {
                Error::UnknownPlug("U_pseudo_anosov needs the parameter n".into())
            })?;
            u_pseudo_anosov(n, None)
        }
        "attractor_realizing" => Err(Error::UnknownPlug(
            "attractor plugs are built by the attractors pipeline, not the static catalog".into(),
        )),
        other => Err(Error::UnknownPlug(format!("no catalog plug named `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::Sign;

    fn all_catalog() -> Vec<Plug> {
        vec![
            v_twisted(),
            w_pants(),
            u_gradient(),
            u_pseudo_anosov(1, None).expect("n=1 valid"),
        ]
    }

    #[test]
    fn catalog_plugs_validate() {
        for plug in all_catalog() {
            plug.validate().unwrap_or_else(|e| panic!("{} invalid: {e}", plug.id));
        }
    }

    #[test]
    fn catalog_lamination_words() {
        let w = w_pants();
        assert_eq!(w.exit[0].lamination.sign_word(), SignWord::parse("++").unwrap());
        assert!(w.exit[0].lamination.is_coherent());
        assert!(!w.exit[0].lamination.is_filling());

        let u = u_gradient();
        assert_eq!(u.entrance[0].lamination.sign_word(), SignWord::parse("+-+-").unwrap());
        let owners: Vec<usize> =
            u.entrance[0].lamination.leaves.iter().map(|l| l.owner).collect();
        assert_eq!(owners, vec![0, 1, 0, 1]);
        assert!(u.entrance[0].dense_pieces.is_empty());

        let m = u_pseudo_anosov(1, None).unwrap();
        assert_eq!(m.entrance[0].lamination.n_leaves(), 4);
        assert!(m.entrance[0].lamination.is_coherent());
        assert!(m.entrance[0].lamination.is_filling());
        assert!(m.entrance[0]
            .lamination
            .bands
            .iter()
            .all(|b| b.fill == BandFill::Spiral));
    }

    #[test]
    fn gap_counts_balance() {
        let expect = [("V_twisted", 1), ("W_pants", 2), ("U_gradient", 4)];
        for (kind, gaps) in expect {
            let plug = catalog(kind, None).unwrap();
            assert_eq!(plug.entrance_gaps(), gaps, "{kind} entrance");
            assert_eq!(plug.exit_gaps(), gaps, "{kind} exit");
        }
        for n in 1..=3 {
            let plug = u_pseudo_anosov(n, None).unwrap();
            assert_eq!(plug.entrance_gaps(), 2 * n + 2);
            assert_eq!(plug.exit_gaps(), 2 * n + 2);
        }
    }

    #[test]
    fn reverse_is_an_involution() {
        for plug in all_catalog() {
            assert_eq!(plug.reverse().reverse(), plug, "{}", plug.id);
        }
    }

    #[test]
    fn reverse_swaps_sides_and_roles() {
        let r = w_pants().reverse();
        r.validate().unwrap();
        assert_eq!(r.entrance.len(), 1);
        assert_eq!(r.exit.len(), 2);
        assert_eq!(r.exit[0].id, "w_in_1");
        assert_eq!(r.exit[0].side, BoundarySide::Exit);
        assert_eq!(r.entrance[0].lamination.n_leaves(), 2);

        // An attracting plug reverses to a repelling one whose exit
        // lamination is the former entrance foliation, verbatim.
        let attracting = Plug {
            id: "A".into(),
            pieces: vec![BasicPiece {
                id: "a0".into(),
                kind: PieceKind::Attractor,
                transitive: true,
                multipliers: Multipliers::NotApplicable,
            }],
            entrance: vec![BoundaryTorus {
                id: "a_in".into(),
                side: BoundarySide::Entrance,
                lamination: TorusLamination::zipped_reeb(true),
                dense_pieces: vec![0],
            }],
            exit: vec![],
            connections: BTreeSet::from([(0, 0)]),
            routes: vec![],
            metadata: PlugMetadata { interior_hyperbolic: false, jsj_label: "graph".into(), notes: vec![] },
        };
        attracting.validate().unwrap();
        assert!(attracting.is_attracting());
        let repelling = attracting.reverse();
        repelling.validate().unwrap();
        assert!(repelling.is_repelling());
        assert_eq!(repelling.pieces[0].kind, PieceKind::Repeller);
        assert_eq!(repelling.exit[0].lamination, attracting.entrance[0].lamination);
    }

    #[test]
    fn pseudo_anosov_exit_prongs() {
        let split = u_pseudo_anosov(1, Some(&[2, 2])).unwrap();
        split.validate().unwrap();
        assert_eq!(split.exit.len(), 2);
        assert_eq!(split.exit[1].lamination.n_leaves(), 2);
        assert!(matches!(
            u_pseudo_anosov(1, Some(&[3])),
            Err(Error::GapMismatch(_))
        ));
        assert!(matches!(u_pseudo_anosov(0, None), Err(Error::UnknownPlug(_))));
        assert!(matches!(
            u_pseudo_anosov(1, Some(&[4, 0])),
            Err(Error::UnknownPlug(_))
        ));
    }

    #[test]
    fn catalog_dispatch() {
        assert_eq!(catalog("V_twisted", None).unwrap().id, "V_twisted");
        assert_eq!(
            catalog("U_pseudo_anosov", Some(2)).unwrap().entrance[0]
                .lamination
                .n_leaves(),
            6
        );
        assert!(matches!(catalog("U_pseudo_anosov", None), Err(Error::UnknownPlug(_))));
        assert!(matches!(catalog("nope", None), Err(Error::UnknownPlug(_))));
        assert!(matches!(
            catalog("attractor_realizing", None),
            Err(Error::UnknownPlug(_))
        ));
    }

    #[test]
    fn disjoint_union_shifts_indices_and_tracks_groups() {
        let union = Plug::disjoint_union(&v_twisted(), &w_pants()).unwrap();
        union.validate().unwrap();
        assert_eq!(union.pieces.len(), 2);
        assert_eq!(union.entrance.len(), 3);
        assert_eq!(union.exit.len(), 2);
        assert_eq!(union.piece_groups(), vec![vec![0], vec![1]]);
        // The pants leaves now name the shifted piece.
        assert!(union.entrance[1].lamination.leaves.iter().all(|l| l.owner == 1));
        // The pants routes moved past V's single torus on each side.
        assert!(union.routes.contains(&GapRoute {
            entrance: (1, 0),
            exit: (1, 0),
            strips: 1,
            twist: false
        }));
        assert!(!union.is_saddle_plug() || union.pieces.iter().all(|p| p.kind.is_saddle()));

        assert!(Plug::disjoint_union(&v_twisted(), &v_twisted()).is_err());
        let prefixed = Plug::disjoint_union(&v_twisted(), &v_twisted().with_id_prefix("b:"));
        let prefixed = prefixed.unwrap();
        prefixed.validate().unwrap();
        assert_eq!(prefixed.exit[1].id, "b:v_out");
        assert_eq!(prefixed.exit[1].lamination.leaves[0].id, "b:vu0");
    }

    #[test]
    fn validate_rejects_broken_invariants() {
        let mut bad = v_twisted();
        bad.routes[0].strips = 2;
        assert!(matches!(bad.validate(), Err(Error::GapMismatch(_))));

        let mut bad = v_twisted();
        bad.connections.clear();
        assert!(matches!(bad.validate(), Err(Error::BoundaryMismatch(_))));

        let mut bad = v_twisted();
        bad.entrance[0].lamination.leaves[0].owner = 5;
        assert!(matches!(bad.validate(), Err(Error::BoundaryMismatch(_))));

        let mut bad = w_pants();
        bad.exit[0].lamination.bands[0].fill = BandFill::Arcs(2);
        assert!(matches!(bad.validate(), Err(Error::GapMismatch(_))));

        let mut bad = u_gradient();
        bad.entrance[0].side = BoundarySide::Exit;
        assert!(matches!(bad.validate(), Err(Error::BoundaryMismatch(_))));

        // An "attracting" plug whose entrance is not a foliation.
        let mut bad = v_twisted();
        bad.exit.clear();
        bad.routes.clear();
        assert!(matches!(bad.validate(), Err(Error::NotFilling(_))));
    }

    #[test]
    fn piece_orientation_conventions() {
        // Negative multipliers are what twist transport; the catalog keeps
        // the two in sync for its orbit plugs.
        let v = v_twisted();
        assert_eq!(v.pieces[0].multipliers, Multipliers::Negative);
        assert!(v.routes.iter().all(|r| r.twist));
        let w = w_pants();
        assert_eq!(w.pieces[0].multipliers, Multipliers::Positive);
        assert!(w.routes.iter().all(|r| !r.twist));
        // Entrance contracting orientations flip relative to dynamical
        // ones; coherence is side-independent.
        let dyn_word = [Sign::Plus, Sign::Plus];
        let contracting =
            crate::foliation::dynamical_to_contracting(&dyn_word, BoundarySide::Entrance);
        assert_eq!(contracting, vec![Sign::Minus, Sign::Minus]);
    }
}
