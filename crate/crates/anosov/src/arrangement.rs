//! Exact piecewise-linear normal forms on the torus and the
//! strong-transversality certificate for gluing maps.
//!
//! A lamination whose compact leaves have class `(0, 1)` is rendered as a
//! finite family of PL curves with rational vertices: one vertical circle
//! per compact leaf, plus a truncated representative (or a fan of arcs) per
//! non-empty band.  Representatives are shaped so that every segment's slope
//! falls into one of a few widely separated magnitude classes — near-vertical
//! *columns* hugging the compact leaves and a shallow mid-band *transit* —
//! with each steepness level scaling the transit slope by a fixed factor.
//!
//! [`strong_transverse`] certifies a gluing map between two filling
//! laminations by checking, entirely in exact rational arithmetic:
//!
//! (a) wherever two segments from opposite families overlap in a horizontal
//!     window of positive width (modulo integer translation), their slopes
//!     either have opposite signs or differ in magnitude by a factor of at
//!     least [`MAG_SEP`] — so no near-tangency can hide between breakpoints;
//!
//! (b) every complementary face of the joint arrangement that stays away
//!     from the truncation structure — no loose ends and no representative
//!     corners on its boundary — is a quadrilateral whose sides alternate
//!     between the two families.  Faces hugging the truncation structure
//!     would be subdivided by deeper spiral wraps in the untruncated
//!     picture, so they are exempt; a non-quadrilateral face bounded by
//!     straight arcs alone is a genuine double-crossing and fails.
//!
//! Condition (b) is validated on the arrangement graph itself: vertices are
//! interned by their torus coordinates, darts are sorted by exact angle
//! around each vertex, faces are traced through the rotation system, and the
//! Euler characteristic is required to vanish.
//!
//! The same rendered representatives drive the crossing counts used by
//! gluing bookkeeping ([`gluing_crossings`]), so combinatorial decisions and
//! certificates always see one geometry.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::foliation::{BandFill, BandProfile, TorusLamination, TorusMap};
use crate::{frac, rat, Rat};

/// Required magnitude ratio between overlapping same-sign slopes.
pub const MAG_SEP: i64 = 4;

/// Highest supported band steepness level.
pub const MAX_LEVEL: u8 = 2;

/// Each steepness level multiplies the shallow transit slope by this base.
const LEVEL_BASE: i64 = 5;

/// Vertical offset applied to the pushed family before certification.  It
/// staggers the two families' shallow transits (both rendered around height
/// 1/2 in their own charts) so that they cross in columns instead of
/// shadowing each other; composing a gluing map with a translation does not
/// change the isotopy class being certified.  Public so that gluing
/// bookkeeping can pull crossing data back through the same lifted map the
/// renderer used.
pub fn pushed_offset() -> Rat {
    rat(1, 3)
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

/// What a rendered curve represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PieceKind {
    /// Compact leaf `i`, drawn as a closed circle.
    CompactLeaf(usize),
    /// Truncated representative of band `i`'s spiralling leaves.
    BandRep(usize),
    /// Arc `r` of band `i` (bands crossed by finitely many arcs).
    BandArc(usize, u32),
}

impl PieceKind {
    /// Index of the compact leaf, if this is one.
    pub fn leaf_index(self) -> Option<usize> {
        match self {
            PieceKind::CompactLeaf(i) => Some(i),
            _ => None,
        }
    }
}

impl fmt::Display for PieceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PieceKind::CompactLeaf(i) => write!(f, "leaf {i}"),
            PieceKind::BandRep(b) => write!(f, "band {b} rep"),
            PieceKind::BandArc(b, r) => write!(f, "band {b} arc {r}"),
        }
    }
}

/// One PL curve: an open polyline, or a closed circle whose endpoints
/// differ by an integer vector of the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    /// Polyline vertices in universal-cover coordinates.
    pub points: Vec<(Rat, Rat)>,
    /// Closed circles have their endpoints identified on the torus.
    pub closed: bool,
    pub kind: PieceKind,
}

/// A rendered lamination: its PL normal form.
#[derive(Debug, Clone, PartialEq)]
pub struct PLFamily {
    pub label: String,
    pub pieces: Vec<Piece>,
}

struct BandGeometry {
    /// Truncation margin from each bounding leaf.
    t: Rat,
    /// Width of the near-leaf steep column.
    colw: Rat,
    /// Half of the shallow transit's total rise.
    rise: Rat,
    /// Half-height of the representative.
    h: Rat,
}

impl BandGeometry {
    fn for_band(w: &Rat, level: u8) -> BandGeometry {
        // The shallow transit always spans the middle 3/5 of the band, so
        // its slope scales exactly with the level; the steep column narrows
        // with the level instead.  Half-height 1 keeps every segment inside
        // one vertical period, which rules out sliver faces.
        let scale = rat(LEVEL_BASE.pow(u32::from(level)), 1);
        let colw = w / (rat(10, 1) * &scale);
        BandGeometry {
            t: w / rat(5, 1) - &colw,
            colw,
            rise: scale / rat(160, 1),
            h: Rat::one(),
        }
    }
}

fn monotone_points(a: &Rat, b: &Rat, yc: &Rat, ascending: bool, g: &BandGeometry) -> Vec<(Rat, Rat)> {
    let (s0, s1) = if ascending { (-1, 1) } else { (1, -1) };
    vec![
        (a + &g.t, yc + rat(s0, 1) * &g.h),
        (a + &g.t + &g.colw, yc + rat(s0, 1) * &g.rise),
        (b - &g.t - &g.colw, yc + rat(s1, 1) * &g.rise),
        (b - &g.t, yc + rat(s1, 1) * &g.h),
    ]
}

fn split_points(a: &Rat, b: &Rat, yc: &Rat, apex_down: bool, g: &BandGeometry) -> Vec<(Rat, Rat)> {
    // apex_down: both halves descend to the midpoint (profile NegPos);
    // otherwise both rise to it (profile PosNeg).
    let s = if apex_down { 1 } else { -1 };
    let m = (a + b) / rat(2, 1);
    vec![
        (a + &g.t, yc + rat(s, 1) * &g.h),
        (a + &g.t + &g.colw, yc + rat(s, 1) * &g.rise),
        (m, yc.clone()),
        (b - &g.t - &g.colw, yc + rat(s, 1) * &g.rise),
        (b - &g.t, yc + rat(s, 1) * &g.h),
    ]
}

/// Render the PL normal form of a lamination whose compact leaves have
/// class `(0, 1)`.
///
/// Each compact leaf becomes a vertical circle at its position.  Each
/// non-empty band becomes a truncated representative: monotone bands get a
/// 4-point S-shape, split bands a 5-point V-shape through the band midpoint,
/// and arc-filled bands one monotone shape per arc, stacked at heights
/// `(2r + 1) / 2k`.  Empty bands render nothing.
pub fn normal_form(lam: &TorusLamination) -> Result<PLFamily> {
    if lam.leaf_class != (0, 1) {
        return Err(Error::Degenerate(format!(
            "normal form needs leaf class (0, 1), got ({}, {})",
            lam.leaf_class.0, lam.leaf_class.1
        )));
    }
    let mut pieces = Vec::new();
    for (i, leaf) in lam.leaves.iter().enumerate() {
        pieces.push(Piece {
            points: vec![
                (leaf.position.clone(), Rat::zero()),
                (leaf.position.clone(), Rat::one()),
            ],
            closed: true,
            kind: PieceKind::CompactLeaf(i),
        });
    }
    let y0 = rat(1, 2);
    for (bi, band) in lam.bands.iter().enumerate() {
        if band.fill == BandFill::Empty {
            continue;
        }
        if band.level > MAX_LEVEL {
            return Err(Error::Degenerate(format!(
                "band {bi} has steepness level {}; at most {MAX_LEVEL} is supported",
                band.level
            )));
        }
        let (a, b) = lam.band_bounds(bi);
        let g = BandGeometry::for_band(&lam.band_width(bi), band.level);
        let profile = lam.band_profile(bi);
        match band.fill {
            BandFill::Empty => unreachable!(),
            BandFill::Spiral => {
                let points = match profile {
                    BandProfile::Pos => monotone_points(&a, &b, &y0, true, &g),
                    BandProfile::Neg => monotone_points(&a, &b, &y0, false, &g),
                    BandProfile::NegPos => split_points(&a, &b, &y0, true, &g),
                    BandProfile::PosNeg => split_points(&a, &b, &y0, false, &g),
                };
                pieces.push(Piece { points, closed: false, kind: PieceKind::BandRep(bi) });
            }
            BandFill::Arcs(k) => {
                let ascending = matches!(profile, BandProfile::Pos | BandProfile::NegPos);
                for r in 0..k {
                    let yc = rat(2 * i64::from(r) + 1, 2 * i64::from(k));
                    pieces.push(Piece {
                        points: monotone_points(&a, &b, &yc, ascending, &g),
                        closed: false,
                        kind: PieceKind::BandArc(bi, r),
                    });
                }
            }
        }
    }
    Ok(PLFamily { label: lam.sign_word().to_string(), pieces })
}

/// Apply a torus map to every vertex of a rendered family.
pub fn transform_family(fam: &PLFamily, map: &TorusMap) -> PLFamily {
    PLFamily {
        label: fam.label.clone(),
        pieces: fam
            .pieces
            .iter()
            .map(|p| Piece {
                points: p.points.iter().map(|pt| map.apply(pt)).collect(),
                closed: p.closed,
                kind: p.kind,
            })
            .collect(),
    }
}

/// A straight closed circle of homology class `class` through `base`.
pub fn circle_piece(class: (i64, i64), base: (Rat, Rat)) -> Piece {
    let end = (&base.0 + rat(class.0, 1), &base.1 + rat(class.1, 1));
    Piece { points: vec![base, end], closed: true, kind: PieceKind::CompactLeaf(0) }
}

// ---------------------------------------------------------------------------
// Exact segment intersection
// ---------------------------------------------------------------------------

fn cross(a: &(Rat, Rat), b: &(Rat, Rat)) -> Rat {
    &a.0 * &b.1 - &a.1 * &b.0
}

fn sub(a: &(Rat, Rat), b: &(Rat, Rat)) -> (Rat, Rat) {
    (&a.0 - &b.0, &a.1 - &b.1)
}

fn rat_to_i64(x: &Rat) -> i64 {
    x.to_integer().to_i64().expect("translate range fits in i64")
}

/// Integers `i` with `lo <= i <= hi`.
fn closed_int_range(lo: &Rat, hi: &Rat) -> std::ops::RangeInclusive<i64> {
    rat_to_i64(&lo.ceil())..=rat_to_i64(&hi.floor())
}

fn minmax(a: &Rat, b: &Rat) -> (Rat, Rat) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

/// One intersection of two segments, with the parameter on each.
struct Hit {
    u: Rat,
    v: Rat,
    point: (Rat, Rat),
}

/// All torus intersections of segment `pa->qa` with integer translates of
/// segment `pb->qb`.  A positive-length collinear overlap is degenerate.
fn segment_hits(
    pa: &(Rat, Rat),
    qa: &(Rat, Rat),
    pb: &(Rat, Rat),
    qb: &(Rat, Rat),
) -> Result<Vec<Hit>> {
    let d1 = sub(qa, pa);
    let d2 = sub(qb, pb);
    let (axlo, axhi) = minmax(&pa.0, &qa.0);
    let (aylo, ayhi) = minmax(&pa.1, &qa.1);
    let (bxlo, bxhi) = minmax(&pb.0, &qb.0);
    let (bylo, byhi) = minmax(&pb.1, &qb.1);
    let denom = cross(&d1, &d2);
    let mut hits = Vec::new();
    for i in closed_int_range(&(&axlo - &bxhi), &(&axhi - &bxlo)) {
        for j in closed_int_range(&(&aylo - &byhi), &(&ayhi - &bylo)) {
            let offset = (&pb.0 + rat(i, 1) - &pa.0, &pb.1 + rat(j, 1) - &pa.1);
            if denom.is_zero() {
                if !cross(&offset, &d1).is_zero() {
                    continue;
                }
                // Collinear: compare parameter intervals along d1.
                let t0 = param_along(&d1, &offset);
                let t1 = param_along(&d1, &(&offset.0 + &d2.0, &offset.1 + &d2.1));
                let (lo, hi) = minmax(&t0, &t1);
                if lo < Rat::one() && hi > Rat::zero() {
                    return Err(Error::Degenerate(
                        "collinear overlapping segments".into(),
                    ));
                }
                // Endpoint touch.
                let u = if hi.is_zero() { Rat::zero() } else { Rat::one() };
                if (hi.is_zero() || lo.is_one()) && (Rat::zero()..=Rat::one()).contains(&u) {
                    let v = if hi.is_zero() {
                        if t0.is_zero() {
                            Rat::zero()
                        } else {
                            Rat::one()
                        }
                    } else if t0.is_one() {
                        Rat::zero()
                    } else {
                        Rat::one()
                    };
                    let point = (&pa.0 + &u * &d1.0, &pa.1 + &u * &d1.1);
                    hits.push(Hit { u, v, point });
                }
                continue;
            }
            let u = cross(&offset, &d2) / &denom;
            let v = cross(&offset, &d1) / &denom;
            if u >= Rat::zero() && u <= Rat::one() && v >= Rat::zero() && v <= Rat::one() {
                let point = (&pa.0 + &u * &d1.0, &pa.1 + &u * &d1.1);
                hits.push(Hit { u, v, point });
            }
        }
    }
    Ok(hits)
}

/// Parameter of a collinear point (given as offset from the segment start)
/// along direction `d`.
fn param_along(d: &(Rat, Rat), offset: &(Rat, Rat)) -> Rat {
    if !d.0.is_zero() {
        &offset.0 / &d.0
    } else {
        &offset.1 / &d.1
    }
}

fn reduce(p: &(Rat, Rat)) -> (Rat, Rat) {
    (frac(&p.0), frac(&p.1))
}

/// Deduplicated crossing counts between two families, keyed by
/// `(piece index in a, piece index in b)`.
fn crossing_counts(a: &PLFamily, b: &PLFamily) -> Result<BTreeMap<(usize, usize), usize>> {
    let mut seen: BTreeSet<(usize, usize, (Rat, Rat))> = BTreeSet::new();
    for (ia, pa) in a.pieces.iter().enumerate() {
        for (ib, pb) in b.pieces.iter().enumerate() {
            for sa in pa.points.windows(2) {
                for sb in pb.points.windows(2) {
                    for hit in segment_hits(&sa[0], &sa[1], &sb[0], &sb[1])? {
                        seen.insert((ia, ib, reduce(&hit.point)));
                    }
                }
            }
        }
    }
    let mut counts = BTreeMap::new();
    for (ia, ib, _) in seen {
        *counts.entry((ia, ib)).or_insert(0) += 1;
    }
    Ok(counts)
}

// ---------------------------------------------------------------------------
// Arrangement graph
// ---------------------------------------------------------------------------

/// One complementary face of a two-family arrangement.
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    /// Number of sides: maximal runs of boundary darts lying on one piece.
    pub sides: usize,
    /// Whether consecutive sides alternate between the two families.
    pub alternating: bool,
    /// Whether the boundary touches a truncated representative's loose end.
    pub window: bool,
    /// Whether the boundary passes through a representative's corner.  Such
    /// faces hug the truncation structure: in the untruncated picture they
    /// would be subdivided by deeper spiral wraps, so they carry no
    /// transversality information (like windows).
    pub chamber: bool,
    /// Coordinates of one boundary vertex, for diagnostics.
    pub sample: (f64, f64),
}

/// Exact arrangement of two rendered families on the torus.
#[derive(Debug, Clone, PartialEq)]
pub struct Arrangement {
    pub vertices: usize,
    pub edges: usize,
    pub faces: Vec<Face>,
    /// Total deduplicated intersection points between the families.
    pub crossings: usize,
    /// Crossing counts keyed by `(piece in first family, piece in second)`.
    pub crossings_by_piece: BTreeMap<(usize, usize), usize>,
}

impl Arrangement {
    /// Faces away from the truncation structure (no loose ends, no
    /// representative corners on the boundary) — the ones that must be
    /// alternating quadrilaterals.
    pub fn interior_faces(&self) -> impl Iterator<Item = &Face> {
        self.faces.iter().filter(|f| !f.window && !f.chamber)
    }

    /// Number of window faces.
    pub fn windows(&self) -> usize {
        self.faces.iter().filter(|f| f.window).count()
    }
}

struct DartRec {
    from: usize,
    to: usize,
    dir: (Rat, Rat),
    gpiece: usize,
    fam: usize,
    twin: usize,
}

/// Angle ordering of direction vectors, counterclockwise from the positive
/// x-axis.  Exact: vectors are compared by half-plane, then cross product.
fn angle_cmp(a: &(Rat, Rat), b: &(Rat, Rat)) -> std::cmp::Ordering {
    fn half(v: &(Rat, Rat)) -> u8 {
        u8::from(!(v.1.is_positive() || (v.1.is_zero() && v.0.is_positive())))
    }
    half(a).cmp(&half(b)).then_with(|| {
        let c = cross(a, b);
        if c.is_positive() {
            std::cmp::Ordering::Less
        } else if c.is_negative() {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    })
}

/// Build the exact arrangement of two rendered families.
///
/// Vertices are crossings, polyline joints, and loose ends, interned by
/// their torus coordinates; faces are traced through the rotation system
/// (next dart = one step counterclockwise past the reversed dart).  The
/// Euler characteristic must vanish, which fails loudly if the input is not
/// an embedded pair of curve families in general position.
pub fn analyze(fam_a: &PLFamily, fam_b: &PLFamily) -> Result<Arrangement> {
    let na = fam_a.pieces.len();
    let all: Vec<(usize, &Piece)> = fam_a
        .pieces
        .iter()
        .map(|p| (0, p))
        .chain(fam_b.pieces.iter().map(|p| (1, p)))
        .collect();

    // Per-piece, per-segment intersection events (parameter, torus point).
    type SegmentEvents = Vec<Vec<(Rat, (Rat, Rat))>>;
    let mut events: Vec<SegmentEvents> =
        all.iter().map(|(_, p)| vec![Vec::new(); p.points.len() - 1]).collect();
    let mut crossing_set: BTreeSet<(usize, usize, (Rat, Rat))> = BTreeSet::new();

    for (ia, pa) in fam_a.pieces.iter().enumerate() {
        for (ib, pb) in fam_b.pieces.iter().enumerate() {
            for (sa, wa) in pa.points.windows(2).enumerate() {
                for (sb, wb) in pb.points.windows(2).enumerate() {
                    for hit in segment_hits(&wa[0], &wa[1], &wb[0], &wb[1])? {
                        let pt = reduce(&hit.point);
                        events[ia][sa].push((hit.u, pt.clone()));
                        events[na + ib][sb].push((hit.v, pt.clone()));
                        crossing_set.insert((ia, ib, pt));
                    }
                }
            }
        }
    }

    let mut crossings_by_piece: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (ia, ib, _) in &crossing_set {
        *crossings_by_piece.entry((*ia, *ib)).or_insert(0) += 1;
    }
    let crossings = crossing_set.len();

    // Intern vertices; split pieces into edges at events.
    let mut vid: BTreeMap<(Rat, Rat), usize> = BTreeMap::new();
    let mut vpos: Vec<(Rat, Rat)> = Vec::new();
    let mut intern = |pt: (Rat, Rat), vpos: &mut Vec<(Rat, Rat)>| -> usize {
        *vid.entry(pt.clone()).or_insert_with(|| {
            vpos.push(pt);
            vpos.len() - 1
        })
    };
    let mut darts: Vec<DartRec> = Vec::new();
    let mut tips: BTreeSet<usize> = BTreeSet::new();
    let mut bends: BTreeSet<usize> = BTreeSet::new();

    for (g, (fam, piece)) in all.iter().enumerate() {
        let pts = &piece.points;
        let nseg = pts.len() - 1;
        for k in 1..nseg {
            let d_in = sub(&pts[k], &pts[k - 1]);
            let d_out = sub(&pts[k + 1], &pts[k]);
            if !cross(&d_in, &d_out).is_zero() {
                bends.insert(intern(reduce(&pts[k]), &mut vpos));
            }
        }
        let mut evs: Vec<(Rat, (Rat, Rat))> = Vec::new();
        for (k, pt) in pts.iter().enumerate() {
            evs.push((rat(k as i64, 1), reduce(pt)));
        }
        for (s, list) in events[g].iter().enumerate() {
            for (u, pt) in list {
                evs.push((rat(s as i64, 1) + u, pt.clone()));
            }
        }
        evs.sort_by(|a, b| a.0.cmp(&b.0));
        evs.dedup_by(|a, b| a.0 == b.0);
        for w in evs.windows(2) {
            let (t0, p0) = &w[0];
            let (t1, p1) = &w[1];
            let seg = rat_to_i64(&t0.floor()) as usize;
            debug_assert!(t1 <= &rat(seg as i64 + 1, 1));
            let dir = sub(&pts[seg + 1], &pts[seg]);
            if dir.0.is_zero() && dir.1.is_zero() {
                return Err(Error::Degenerate(format!("zero-length segment in {}", piece.kind)));
            }
            let vu = intern(p0.clone(), &mut vpos);
            let vv = intern(p1.clone(), &mut vpos);
            let d1 = darts.len();
            darts.push(DartRec { from: vu, to: vv, dir: dir.clone(), gpiece: g, fam: *fam, twin: d1 + 1 });
            darts.push(DartRec {
                from: vv,
                to: vu,
                dir: (-&dir.0, -&dir.1),
                gpiece: g,
                fam: *fam,
                twin: d1,
            });
        }
        if !piece.closed {
            let first = intern(reduce(&pts[0]), &mut vpos);
            let last = intern(reduce(&pts[nseg]), &mut vpos);
            tips.insert(first);
            tips.insert(last);
        }
    }

    // Rotation system: outgoing darts sorted by angle around each vertex.
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); vpos.len()];
    for (di, d) in darts.iter().enumerate() {
        out[d.from].push(di);
    }
    for (v, list) in out.iter_mut().enumerate() {
        list.sort_by(|&x, &y| angle_cmp(&darts[x].dir, &darts[y].dir));
        for w in list.windows(2) {
            if angle_cmp(&darts[w[0]].dir, &darts[w[1]].dir) == std::cmp::Ordering::Equal {
                return Err(Error::Degenerate(format!(
                    "tangential contact at ({}, {})",
                    vpos[v].0, vpos[v].1
                )));
            }
        }
    }
    let mut slot: BTreeMap<usize, usize> = BTreeMap::new();
    for list in &out {
        for (i, &d) in list.iter().enumerate() {
            slot.insert(d, i);
        }
    }

    // Trace faces: next dart is one rotation step past the reversed dart.
    let mut visited = vec![false; darts.len()];
    let mut faces = Vec::new();
    for d0 in 0..darts.len() {
        if visited[d0] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut d = d0;
        loop {
            visited[d] = true;
            cycle.push(d);
            let v = darts[d].to;
            let back = darts[d].twin;
            let i = slot[&back];
            d = out[v][(i + 1) % out[v].len()];
            if d == d0 {
                break;
            }
        }
        let window = cycle.iter().any(|&d| tips.contains(&darts[d].from));
        let chamber = cycle.iter().any(|&d| bends.contains(&darts[d].from));
        let mut runs: Vec<(usize, usize)> = Vec::new(); // (gpiece, fam)
        for &d in &cycle {
            let key = (darts[d].gpiece, darts[d].fam);
            if runs.last() != Some(&key) {
                runs.push(key);
            }
        }
        if runs.len() > 1 && runs.first() == runs.last() {
            runs.pop();
        }
        let sides = runs.len();
        let alternating = sides.is_multiple_of(2)
            && (0..sides).all(|i| runs[i].1 != runs[(i + 1) % sides].1);
        let sv = darts[cycle[0]].from;
        let sample = (
            vpos[sv].0.to_f64().unwrap_or(f64::NAN),
            vpos[sv].1.to_f64().unwrap_or(f64::NAN),
        );
        faces.push(Face { sides, alternating, window, chamber, sample });
    }

    let vertices = vpos.len();
    let edges = darts.len() / 2;
    if vertices as i64 - edges as i64 + faces.len() as i64 != 0 {
        return Err(Error::Degenerate(format!(
            "arrangement is not cellular: V={} E={} F={}",
            vertices,
            edges,
            faces.len()
        )));
    }

    Ok(Arrangement { vertices, edges, faces, crossings, crossings_by_piece })
}

// ---------------------------------------------------------------------------
// Strong transversality
// ---------------------------------------------------------------------------

/// Outcome of a strong-transversality check.
#[derive(Debug, Clone, PartialEq)]
pub enum Transversality {
    Strong(StrongCert),
    Failed(FailureWitness),
}

impl Transversality {
    pub fn is_strong(&self) -> bool {
        matches!(self, Transversality::Strong(_))
    }
}

/// Evidence recorded by a successful certification.
#[derive(Debug, Clone, PartialEq)]
pub struct StrongCert {
    /// Smallest slope difference over all overlapping segment pairs.
    pub min_slope_gap: f64,
    /// Complementary faces of the joint arrangement.
    pub faces: usize,
    /// How many of those are truncation windows.
    pub windows: usize,
    /// Total crossings between the rendered families.
    pub crossings: usize,
    /// Whether every compact leaf of one side crosses every compact leaf of
    /// the other.
    pub every_leaf_pair_meets: bool,
}

/// Why a certification failed.
#[derive(Debug, Clone, PartialEq)]
pub enum FailureWitness {
    /// Two curves share a line on the torus.
    Coincident { pushed: String, receiving: String },
    /// Same-sign slopes too close over a common horizontal window.
    SlopeClash { pushed: String, receiving: String, ratio: f64 },
    /// A complementary face that is not an alternating quadrilateral.
    BadFace { sides: usize, alternating: bool, at: (f64, f64) },
    /// A compact leaf missing the other lamination entirely.
    AnnulusWitness { family: String, piece: String },
}

impl fmt::Display for FailureWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureWitness::Coincident { pushed, receiving } => {
                write!(f, "coincident curves: pushed {pushed} and receiving {receiving}")
            }
            FailureWitness::SlopeClash { pushed, receiving, ratio } => write!(
                f,
                "slope clash (ratio {ratio:.3} < {MAG_SEP}): pushed {pushed} vs receiving {receiving}"
            ),
            FailureWitness::BadFace { sides, alternating, at } => write!(
                f,
                "face with {sides} side(s){} near ({:.4}, {:.4})",
                if *alternating { "" } else { ", not alternating" },
                at.0,
                at.1
            ),
            FailureWitness::AnnulusWitness { family, piece } => {
                write!(f, "closed leaf missing the other family: {family} {piece}")
            }
        }
    }
}

impl fmt::Display for StrongCert {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "strongly transverse: {} crossings, {} faces ({} windows), min slope gap {:.3}{}",
            self.crossings,
            self.faces,
            self.windows,
            self.min_slope_gap,
            if self.every_leaf_pair_meets { ", every leaf pair meets" } else { "" }
        )
    }
}

struct SegInfo {
    desc: String,
    xlo: Rat,
    xhi: Rat,
    /// `None` for a vertical segment (then `x_at` is its abscissa).
    slope: Option<Rat>,
    x_at: Rat,
    start: (Rat, Rat),
}

fn seg_infos(fam: &PLFamily) -> Vec<SegInfo> {
    let mut infos = Vec::new();
    for piece in &fam.pieces {
        for (s, w) in piece.points.windows(2).enumerate() {
            let d = sub(&w[1], &w[0]);
            let (xlo, xhi) = minmax(&w[0].0, &w[1].0);
            let slope = if d.0.is_zero() { None } else { Some(&d.1 / &d.0) };
            infos.push(SegInfo {
                desc: format!("{} seg {s}", piece.kind),
                xlo,
                xhi,
                slope,
                x_at: w[0].0.clone(),
                start: w[0].clone(),
            });
        }
    }
    infos
}

/// Condition (a): slope separation over every overlapping pair.  Returns
/// the minimal slope gap on success.
fn slope_condition(a: &[SegInfo], b: &[SegInfo]) -> std::result::Result<f64, FailureWitness> {
    let mut min_gap = f64::INFINITY;
    for sa in a {
        for sb in b {
            match (&sa.slope, &sb.slope) {
                (None, None) => {
                    if frac(&(&sa.x_at - &sb.x_at)).is_zero() {
                        return Err(FailureWitness::Coincident {
                            pushed: sa.desc.clone(),
                            receiving: sb.desc.clone(),
                        });
                    }
                }
                (None, Some(_)) | (Some(_), None) => {}
                (Some(s1), Some(s2)) => {
                    if !overlap_open(sa, sb) {
                        continue;
                    }
                    let gap = (s1 - s2).abs().to_f64().unwrap_or(f64::NAN);
                    if gap < min_gap {
                        min_gap = gap;
                    }
                    if s1 == s2 {
                        return Err(if collinear_mod_translate(sa, sb) {
                            FailureWitness::Coincident {
                                pushed: sa.desc.clone(),
                                receiving: sb.desc.clone(),
                            }
                        } else {
                            FailureWitness::SlopeClash {
                                pushed: sa.desc.clone(),
                                receiving: sb.desc.clone(),
                                ratio: 1.0,
                            }
                        });
                    }
                    let opposite = (s1.is_positive() && s2.is_negative())
                        || (s1.is_negative() && s2.is_positive());
                    if opposite {
                        continue;
                    }
                    let (mn, mx) = minmax(&s1.abs(), &s2.abs());
                    if &mn * rat(MAG_SEP, 1) > mx {
                        return Err(FailureWitness::SlopeClash {
                            pushed: sa.desc.clone(),
                            receiving: sb.desc.clone(),
                            ratio: (&mx / &mn).to_f64().unwrap_or(f64::NAN),
                        });
                    }
                }
            }
        }
    }
    Ok(min_gap)
}

/// Positive-length x-overlap: an integer strictly inside the open interval
/// `(a.xlo - b.xhi, a.xhi - b.xlo)`.
fn overlap_open(a: &SegInfo, b: &SegInfo) -> bool {
    let lo = &a.xlo - &b.xhi;
    let hi = &a.xhi - &b.xlo;
    rat(rat_to_i64(&lo.floor()) + 1, 1) < hi
}

/// Whether two equal-slope segments lie on one line for some integer
/// translate with horizontal overlap.
fn collinear_mod_translate(a: &SegInfo, b: &SegInfo) -> bool {
    let s = a.slope.as_ref().expect("non-vertical");
    let lo = &a.xlo - &b.xhi;
    let hi = &a.xhi - &b.xlo;
    for i in closed_int_range(&lo, &hi) {
        // Line through a.start with slope s contains b.start + (i, j)?
        let y_here = &a.start.1 + s * (&b.start.0 + rat(i, 1) - &a.start.0);
        let j = &b.start.1 - &y_here;
        if j.is_integer() {
            return true;
        }
    }
    false
}

fn rendered_pushed(lam: &TorusLamination, map: &TorusMap) -> Result<PLFamily> {
    let lifted = TorusMap::translation((Rat::zero(), pushed_offset())).compose(map);
    Ok(transform_family(&normal_form(lam)?, &lifted))
}

/// Certify that gluing `pushed` onto `receiving` by `map` puts the two
/// filling laminations in strong transversal position.
///
/// The pushed side is rendered in normal form, transported by `map` (plus a
/// vertical stagger that does not change the isotopy class), and compared
/// against the receiving side's normal form.  Both the slope-separation
/// condition and the quadrilateral-face condition must hold; a closed leaf
/// that misses the other family entirely is rejected as an annulus witness.
/// Non-filling sides are an error, not a failure.
pub fn strong_transverse(
    pushed: &TorusLamination,
    map: &TorusMap,
    receiving: &TorusLamination,
) -> Result<Transversality> {
    if !pushed.is_filling() {
        return Err(Error::NotFilling("pushed lamination has an empty band".into()));
    }
    if !receiving.is_filling() {
        return Err(Error::NotFilling("receiving lamination has an empty band".into()));
    }
    let fam_a = rendered_pushed(pushed, map)?;
    let fam_b = normal_form(receiving)?;

    let min_gap = match slope_condition(&seg_infos(&fam_a), &seg_infos(&fam_b)) {
        Ok(g) => g,
        Err(w) => return Ok(Transversality::Failed(w)),
    };

    // A closed piece meeting nothing of the other family bounds an
    // essential annulus; it also disconnects the arrangement, so check
    // before the face walk.
    let counts = crossing_counts(&fam_a, &fam_b)?;
    for (fam, other_first) in [(&fam_a, false), (&fam_b, true)] {
        for (i, piece) in fam.pieces.iter().enumerate() {
            if !piece.closed {
                continue;
            }
            let total: usize = counts
                .iter()
                .filter(|((a, b), _)| if other_first { *b == i } else { *a == i })
                .map(|(_, c)| c)
                .sum();
            if total == 0 {
                return Ok(Transversality::Failed(FailureWitness::AnnulusWitness {
                    family: if other_first { "receiving".into() } else { "pushed".into() },
                    piece: piece.kind.to_string(),
                }));
            }
        }
    }

    let arr = analyze(&fam_a, &fam_b)?;

    for face in arr.interior_faces() {
        if face.sides != 4 || !face.alternating {
            return Ok(Transversality::Failed(FailureWitness::BadFace {
                sides: face.sides,
                alternating: face.alternating,
                at: face.sample,
            }));
        }
    }

    let leaves_a: Vec<usize> = fam_a
        .pieces
        .iter()
        .enumerate()
        .filter(|(_, p)| p.kind.leaf_index().is_some())
        .map(|(i, _)| i)
        .collect();
    let leaves_b: Vec<usize> = fam_b
        .pieces
        .iter()
        .enumerate()
        .filter(|(_, p)| p.kind.leaf_index().is_some())
        .map(|(i, _)| i)
        .collect();
    let every_leaf_pair_meets = leaves_a.iter().all(|&la| {
        leaves_b.iter().all(|&lb| arr.crossings_by_piece.contains_key(&(la, lb)))
    });

    Ok(Transversality::Strong(StrongCert {
        min_slope_gap: min_gap,
        faces: arr.faces.len(),
        windows: arr.windows(),
        crossings: arr.crossings,
        every_leaf_pair_meets,
    }))
}

/// A rotation-type gluing for two laminations: the quarter turn composed
/// with a shift placing the pushed family's shallow transit mid-band, plus
/// re-flagged copies of the laminations (pushed side plain, receiving side
/// uniformly steep) whose rendered slopes separate under the quarter turn.
pub fn rotation_gluing(
    pushed: &TorusLamination,
    receiving: &TorusLamination,
) -> (TorusMap, TorusLamination, TorusLamination) {
    let w0 = receiving.band_width(0);
    let shift_x = frac(&(rat(1, 2) + w0 / rat(2, 1)));
    let map = TorusMap::new([[0, -1], [1, 0]], (shift_x, rat(1, 8)))
        .expect("quarter turn is unimodular");
    (
        map,
        pushed.clone().with_uniform_level(0),
        receiving.clone().with_uniform_level(MAX_LEVEL),
    )
}

// ---------------------------------------------------------------------------
// Crossing bookkeeping for gluings
// ---------------------------------------------------------------------------

/// Crossing counts between a transported lamination and a receiving one,
/// restricted to compact leaves.
#[derive(Debug, Clone, PartialEq)]
pub struct GluingCrossings {
    /// Per pushed compact leaf: crossings with the entire receiving family.
    pub pushed_leaf: Vec<usize>,
    /// Per receiving compact leaf: crossings with the entire pushed family.
    pub receiving_leaf: Vec<usize>,
    /// All crossings between the two families.
    pub total: usize,
}

/// Count rendered crossings of `pushed` (transported by `map`) against
/// `receiving`, using the same representatives as certification so that
/// gluing decisions and certificates see one geometry.  Works for
/// non-filling laminations: empty bands simply render nothing.
pub fn gluing_crossings(
    pushed: &TorusLamination,
    map: &TorusMap,
    receiving: &TorusLamination,
) -> Result<GluingCrossings> {
    let fam_a = rendered_pushed(pushed, map)?;
    let fam_b = normal_form(receiving)?;
    let counts = crossing_counts(&fam_a, &fam_b)?;
    let mut pushed_leaf = vec![0usize; pushed.n_leaves()];
    let mut receiving_leaf = vec![0usize; receiving.n_leaves()];
    let mut total = 0;
    for ((ia, ib), c) in &counts {
        total += c;
        if let Some(i) = fam_a.pieces[*ia].kind.leaf_index() {
            pushed_leaf[i] += c;
        }
        if let Some(i) = fam_b.pieces[*ib].kind.leaf_index() {
            receiving_leaf[i] += c;
        }
    }
    Ok(GluingCrossings { pushed_leaf, receiving_leaf, total })
}

/// One deduplicated crossing between the transported pushed family and the
/// receiving family, located exactly on both curves.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitCrossing {
    /// Piece index in the rendered pushed family.
    pub pushed_piece: usize,
    /// Piece index in the rendered receiving family.
    pub receiving_piece: usize,
    /// Arc parameter along the pushed piece: segment index plus fraction.
    pub along_pushed: Rat,
    /// Arc parameter along the receiving piece.
    pub along_receiving: Rat,
    /// Crossing point reduced to the unit square of the receiving chart.
    pub point: (Rat, Rat),
}

/// The rendered families of a gluing together with every crossing located
/// exactly: the geometry behind leaf survival and deposit bookkeeping.
#[derive(Debug, Clone)]
pub struct TransitGeometry {
    /// Pushed family, transported into the receiving chart.
    pub pushed: PLFamily,
    /// Receiving family, in normal form.
    pub receiving: PLFamily,
    /// Crossings deduplicated per reduced point exactly like certification,
    /// sorted by pushed piece and parameter.
    pub crossings: Vec<TransitCrossing>,
}

/// Render both sides of a gluing and locate every crossing with its arc
/// parameters.  Uses the same representatives and the same deduplication as
/// [`strong_transverse`] and [`gluing_crossings`], so all three views agree.
pub fn transit_geometry(
    pushed: &TorusLamination,
    map: &TorusMap,
    receiving: &TorusLamination,
) -> Result<TransitGeometry> {
    let fam_a = rendered_pushed(pushed, map)?;
    let fam_b = normal_form(receiving)?;
    // Deduplication key: piece pair plus the reduced crossing point.
    type CrossingKey = (usize, usize, (Rat, Rat));
    let mut by_key: BTreeMap<CrossingKey, (Rat, Rat)> = BTreeMap::new();
    for (ia, pa) in fam_a.pieces.iter().enumerate() {
        for (ib, pb) in fam_b.pieces.iter().enumerate() {
            for (sa, wa) in pa.points.windows(2).enumerate() {
                for (sb, wb) in pb.points.windows(2).enumerate() {
                    for hit in segment_hits(&wa[0], &wa[1], &wb[0], &wb[1])? {
                        let key = (ia, ib, reduce(&hit.point));
                        let val = (rat(sa as i64, 1) + &hit.u, rat(sb as i64, 1) + &hit.v);
                        let slot = by_key.entry(key).or_insert_with(|| val.clone());
                        if val < *slot {
                            *slot = val;
                        }
                    }
                }
            }
        }
    }
    let mut crossings: Vec<TransitCrossing> = by_key
        .into_iter()
        .map(|((ia, ib, point), (ta, tb))| TransitCrossing {
            pushed_piece: ia,
            receiving_piece: ib,
            along_pushed: ta,
            along_receiving: tb,
            point,
        })
        .collect();
    crossings.sort_by(|x, y| {
        (x.pushed_piece, &x.along_pushed, x.receiving_piece, &x.along_receiving)
            .cmp(&(y.pushed_piece, &y.along_pushed, y.receiving_piece, &y.along_receiving))
    });
    Ok(TransitGeometry { pushed: fam_a, receiving: fam_b, crossings })
}

/// The slope-separation condition alone, with no filling requirement:
/// wherever the transported pushed family and the receiving family run over
/// a common horizontal window, their slopes must separate.  `Ok` carries the
/// minimal slope gap seen; a coincidence or magnitude clash comes back as
/// the offending witness.
pub fn slope_separation(
    pushed: &TorusLamination,
    map: &TorusMap,
    receiving: &TorusLamination,
) -> Result<std::result::Result<f64, FailureWitness>> {
    let fam_a = rendered_pushed(pushed, map)?;
    let fam_b = normal_form(receiving)?;
    Ok(slope_condition(&seg_infos(&fam_a), &seg_infos(&fam_b)))
}

/// Evaluate the point at arc parameter `t` along a piece, where `t` counts
/// whole segments plus a fraction of the current one.  `t` must lie within
/// `[0, segments]`; closed pieces accept a parameter reduced modulo the
/// segment count by the caller.
pub fn point_at(piece: &Piece, t: &Rat) -> Result<(Rat, Rat)> {
    let nseg = piece.points.len() - 1;
    if t < &Rat::zero() || t > &rat(nseg as i64, 1) {
        return Err(Error::Degenerate(format!(
            "arc parameter {t} outside [0, {nseg}]"
        )));
    }
    let mut idx = t.floor().to_integer().to_usize().unwrap_or(0);
    if idx >= nseg {
        idx = nseg - 1;
    }
    let u = t - rat(idx as i64, 1);
    let p = &piece.points[idx];
    let q = &piece.points[idx + 1];
    Ok((&p.0 + &u * (&q.0 - &p.0), &p.1 + &u * (&q.1 - &p.1)))
}

/// Minimal crossing count of two straight circles of the given homology
/// classes: the absolute determinant, realized by offset straight lines.
pub fn circle_class_crossings(c1: (i64, i64), c2: (i64, i64)) -> usize {
    if c1.0 * c2.1 - c1.1 * c2.0 == 0 {
        return 0;
    }
    let p1 = circle_piece(c1, (Rat::zero(), Rat::zero()));
    let p2 = circle_piece(c2, (rat(1, 7), rat(1, 11)));
    let mut pts = BTreeSet::new();
    for hit in segment_hits(&p1.points[0], &p1.points[1], &p2.points[0], &p2.points[1])
        .expect("straight circles cannot overlap after offset")
    {
        pts.insert(reduce(&hit.point));
    }
    pts.len()
}

// ---------------------------------------------------------------------------
// SVG export
// ---------------------------------------------------------------------------

/// Render families as a self-contained SVG of the unit torus chart.
pub fn families_svg(families: &[&PLFamily]) -> String {
    const COLORS: [&str; 6] = ["#1f6feb", "#d62728", "#2ca02c", "#9467bd", "#e8900c", "#17becf"];
    let mut svg = String::from(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1 1\" width=\"640\" height=\"640\">\n\
         <rect width=\"1\" height=\"1\" fill=\"#fffdf7\"/>\n",
    );
    for (fi, fam) in families.iter().enumerate() {
        let color = COLORS[fi % COLORS.len()];
        for piece in &fam.pieces {
            let xs: Vec<f64> =
                piece.points.iter().map(|p| p.0.to_f64().unwrap_or(0.0)).collect();
            let ys: Vec<f64> =
                piece.points.iter().map(|p| p.1.to_f64().unwrap_or(0.0)).collect();
            let (xmin, xmax) = bounds(&xs);
            let (ymin, ymax) = bounds(&ys);
            let width = if piece.kind.leaf_index().is_some() { 0.006 } else { 0.0035 };
            for i in (-1 - xmax.floor() as i64)..=(1 - xmin.ceil() as i64).max(0) {
                for j in (-1 - ymax.floor() as i64)..=(1 - ymin.ceil() as i64).max(0) {
                    let pts: Vec<String> = xs
                        .iter()
                        .zip(&ys)
                        .map(|(x, y)| format!("{:.5},{:.5}", x + i as f64, 1.0 - (y + j as f64)))
                        .collect();
                    svg.push_str(&format!(
                        "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{width}\"/>\n",
                        pts.join(" ")
                    ));
                }
            }
        }
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in v {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::{coherent_gluing, m1_entrance_lamination, phik_gluing, SignWord};

    fn spiral_lamination(word: &str) -> TorusLamination {
        TorusLamination::from_word(&SignWord::parse(word).unwrap())
    }

    #[test]
    fn normal_form_shapes() {
        let lam = spiral_lamination("+");
        let fam = normal_form(&lam).unwrap();
        assert_eq!(fam.pieces.len(), 2);
        assert!(fam.pieces[0].closed);
        assert_eq!(fam.pieces[0].points.len(), 2);
        // Single coherent band has a split (V-shaped) representative.
        assert_eq!(fam.pieces[1].points.len(), 5);
        assert!(!fam.pieces[1].closed);
        // Apex at the band midpoint, height 1/2.
        assert_eq!(fam.pieces[1].points[2], (rat(1, 2), rat(1, 2)));
        // Arms start one margin in and end one half-height up.
        assert_eq!(fam.pieces[1].points[0], (rat(1, 10), rat(3, 2)));
        // The transit always spans the middle 3/5 of the band.
        assert_eq!(fam.pieces[1].points[1].0, rat(1, 5));
    }

    #[test]
    fn normal_form_respects_fills() {
        let mut lam = spiral_lamination("++");
        lam.bands[0].fill = BandFill::Empty;
        lam.bands[1].fill = BandFill::Arcs(3);
        let fam = normal_form(&lam).unwrap();
        // 2 leaves + 0 (empty band) + 3 arcs.
        assert_eq!(fam.pieces.len(), 5);
        assert_eq!(
            fam.pieces.iter().filter(|p| matches!(p.kind, PieceKind::BandArc(1, _))).count(),
            3
        );
    }

    #[test]
    fn two_transverse_circles_make_one_quad() {
        let vert = PLFamily {
            label: "v".into(),
            pieces: vec![circle_piece((0, 1), (Rat::zero(), Rat::zero()))],
        };
        let horiz = PLFamily {
            label: "h".into(),
            pieces: vec![circle_piece((1, 0), (Rat::zero(), Rat::zero()))],
        };
        let arr = analyze(&vert, &horiz).unwrap();
        assert_eq!((arr.vertices, arr.edges, arr.faces.len()), (1, 2, 1));
        let face = &arr.faces[0];
        assert_eq!(face.sides, 4);
        assert!(face.alternating && !face.window);
        assert_eq!(arr.crossings, 1);
    }

    #[test]
    fn double_crossing_circles_make_two_quads() {
        // A (1,0)-circle against a (1,2)-circle: two crossings split each
        // circle into two arcs, and the two complementary parallelograms
        // each use one arc of either circle twice, as non-adjacent sides.
        let a = PLFamily {
            label: "a".into(),
            pieces: vec![circle_piece((1, 0), (Rat::zero(), Rat::zero()))],
        };
        let b = PLFamily {
            label: "b".into(),
            pieces: vec![circle_piece((1, 2), (rat(1, 7), rat(1, 11)))],
        };
        let arr = analyze(&a, &b).unwrap();
        assert_eq!(arr.crossings, 2);
        // 2 crossings + 2 circle base points; each circle carries 3 edges.
        assert_eq!((arr.vertices, arr.edges, arr.faces.len()), (4, 6, 2));
        let interior: Vec<_> = arr.interior_faces().collect();
        assert_eq!(interior.len(), 2);
        assert!(interior.iter().all(|f| f.sides == 4 && f.alternating));
    }

    #[test]
    fn leaf_in_margin_gap_is_an_annulus_witness() {
        // Steep pushed material clears every slope comparison against the
        // plain receiving side, but the pushed compact leaf lands inside
        // the receiving representative's truncation margin and crosses
        // nothing: an essential annulus witness.
        let pushed = spiral_lamination("+").with_uniform_level(2);
        let recv = spiral_lamination("+");
        let map = TorusMap::translation((rat(19, 20), Rat::zero()));
        match strong_transverse(&pushed, &map, &recv).unwrap() {
            Transversality::Failed(FailureWitness::AnnulusWitness { family, piece }) => {
                assert_eq!(family, "pushed");
                assert_eq!(piece, "leaf 0");
            }
            other => panic!("expected annulus witness, got {other:?}"),
        }
    }

    #[test]
    fn circle_class_crossings_match_determinants() {
        assert_eq!(circle_class_crossings((0, 1), (1, 0)), 1);
        assert_eq!(circle_class_crossings((1, 2), (1, 5)), 3);
        assert_eq!(circle_class_crossings((1, 3), (1, 3)), 0);
        assert_eq!(circle_class_crossings((2, 1), (1, 2)), 3);
        assert_eq!(circle_class_crossings((1, -2), (1, 4)), 6);
    }

    #[test]
    fn coherent_half_shift_certifies() {
        let lam = spiral_lamination("+");
        let map = coherent_gluing(&lam, &lam).unwrap();
        match strong_transverse(&lam, &map, &lam).unwrap() {
            Transversality::Strong(cert) => {
                // One apex touch per compact leaf plus two arm-transit
                // crossings per side.
                assert_eq!(cert.crossings, 6);
                // All four complementary regions absorb a loose end.
                assert_eq!((cert.faces, cert.windows), (4, 4));
                assert!(!cert.every_leaf_pair_meets);
            }
            Transversality::Failed(w) => panic!("expected strong, got {w}"),
        }
        // The arrangement graph itself: 6 crossings, 4 polyline joints and
        // 2 circle base points per side make 16 vertices and 20 edges.
        let pushed = rendered_pushed(&lam, &map).unwrap();
        let recv = normal_form(&lam).unwrap();
        let arr = analyze(&pushed, &recv).unwrap();
        assert_eq!((arr.vertices, arr.edges, arr.faces.len()), (16, 20, 4));
    }

    #[test]
    fn coherent_quarter_shift_certifies_both_ways() {
        let lam = spiral_lamination("++");
        let map = coherent_gluing(&lam, &lam).unwrap();
        assert!(strong_transverse(&lam, &map, &lam).unwrap().is_strong());
        assert!(strong_transverse(&lam, &map.inverse(), &lam).unwrap().is_strong());
    }

    #[test]
    fn identity_gluing_is_coincident() {
        let lam = spiral_lamination("+");
        match strong_transverse(&lam, &TorusMap::identity(), &lam).unwrap() {
            Transversality::Failed(FailureWitness::Coincident { .. }) => {}
            other => panic!("expected coincident failure, got {other:?}"),
        }
    }

    #[test]
    fn empty_band_is_not_certifiable() {
        let mut lam = spiral_lamination("++");
        lam.bands[0].fill = BandFill::Empty;
        let map = TorusMap::translation((rat(1, 4), Rat::zero()));
        assert!(matches!(
            strong_transverse(&lam, &map, &lam),
            Err(Error::NotFilling(_))
        ));
    }

    #[test]
    fn shifted_multi_leaf_family_certifies() {
        for (n, k) in [(1usize, 1usize), (1, 2), (2, 1), (2, 3)] {
            let recv = m1_entrance_lamination(n);
            let pushed = recv.clone().bump_flagged_levels(1);
            let map = phik_gluing(n, k).unwrap();
            match strong_transverse(&pushed, &map, &recv).unwrap() {
                Transversality::Strong(cert) => {
                    assert!(cert.crossings > 0, "n={n} k={k}");
                    assert!(cert.faces > cert.windows, "n={n} k={k}");
                }
                Transversality::Failed(w) => panic!("n={n} k={k}: {w}"),
            }
        }
    }

    #[test]
    fn unseparated_steep_levels_clash() {
        // Without raising the pushed side's flagged bands, the zero-shift
        // member of the family overlaps equal-slope steep material.
        let recv = m1_entrance_lamination(1);
        let map = phik_gluing(1, 0).unwrap();
        match strong_transverse(&recv, &map, &recv).unwrap() {
            Transversality::Failed(FailureWitness::SlopeClash { .. }) => {}
            other => panic!("expected slope clash, got {other:?}"),
        }
    }

    #[test]
    fn rotation_gluing_certifies_with_full_leaf_meeting() {
        let lam = spiral_lamination("+-+-");
        let (map, pushed, recv) = rotation_gluing(&lam, &lam);
        match strong_transverse(&pushed, &map, &recv).unwrap() {
            Transversality::Strong(cert) => {
                assert!(cert.every_leaf_pair_meets);
                // Four horizontal circles against four vertical ones.
                assert!(cert.crossings >= 16);
            }
            Transversality::Failed(w) => panic!("expected strong, got {w}"),
        }
    }

    #[test]
    fn rotation_gluing_certifies_single_leaf_foliations() {
        let zip = TorusLamination::zipped_reeb(false);
        let (map, pushed, recv) = rotation_gluing(&zip, &zip);
        match strong_transverse(&pushed, &map, &recv).unwrap() {
            Transversality::Strong(cert) => assert!(cert.every_leaf_pair_meets),
            Transversality::Failed(w) => panic!("expected strong, got {w}"),
        }
    }

    #[test]
    fn gluing_crossings_detect_survivors() {
        // Pushed compact leaves landing inside spiralling material die...
        let lam = spiral_lamination("+");
        let map = coherent_gluing(&lam, &lam).unwrap();
        let gc = gluing_crossings(&lam, &map, &lam).unwrap();
        assert_eq!(gc.pushed_leaf, vec![1]);
        assert_eq!(gc.receiving_leaf, vec![1]);

        // ...while leaves pushed into empty bands survive untouched.
        let mut open = spiral_lamination("++");
        open.bands[0].fill = BandFill::Empty;
        open.bands[1].fill = BandFill::Empty;
        let closed = spiral_lamination("++");
        let quarter = TorusMap::translation((rat(1, 4), Rat::zero()));
        let gc = gluing_crossings(&closed, &quarter, &open).unwrap();
        assert_eq!(gc.pushed_leaf, vec![0, 0]);
        assert!(gc.receiving_leaf.iter().all(|&c| c > 0));
    }

    #[test]
    fn svg_export_is_self_contained() {
        let lam = spiral_lamination("+-");
        let fam = normal_form(&lam).unwrap();
        let svg = families_svg(&[&fam]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("polyline"));
        assert!(svg.ends_with("</svg>\n"));
    }
}
