//! Sign words, torus laminations and torus gluing maps.
//!
//! A boundary torus of a hyperbolic plug carries a lamination whose finitely
//! many compact leaves are parallel essential circles.  Orienting each
//! compact leaf by the direction in which the lamination's holonomy
//! contracts onto it yields the *sign word* of the torus: fixing a frame and
//! an orientation for leaf 0, leaf `i` contributes `+` when its contracting
//! orientation agrees with leaf 0's and `-` otherwise.  Two laminations have
//! the same *type* when their sign words agree after re-choosing which leaf
//! plays the role of leaf 0 (which may also reverse the reading direction),
//! so types are canonical representatives of that re-enumeration action.
//!
//! The module also provides the affine torus maps used to glue boundary
//! tori, together with the two distinguished gluing families: the
//! *coherent gluing* (identity matrix plus a half-band shift) and the
//! `phi_k` family of shifted self-gluings whose two special-leaf annuli
//! carve the remaining compact leaves into prescribed counts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Mul;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::{frac, rat, Rat};

/// Orientation sign of a compact leaf relative to the torus frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    /// Agrees with the reference orientation.
    Plus,
    /// Opposes the reference orientation.
    Minus,
}

impl Sign {
    /// The opposite sign.
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// Conditionally flip: used when transporting orientations through a
    /// gluing that reverses the reference direction.
    pub fn flip_if(self, cond: bool) -> Sign {
        if cond {
            self.flip()
        } else {
            self
        }
    }

    fn from_char(c: char) -> Option<Sign> {
        match c {
            '+' => Some(Sign::Plus),
            '-' => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// A cyclic word of leaf signs, anchored at leaf 0.
///
/// Invariant: nonempty, and the first sign is `+` (leaf 0 is compared with
/// itself, so its relative sign is always `+`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignWord(Vec<Sign>);

// Sign words are never empty, so no `is_empty` accompanies `len`.
#[allow(clippy::len_without_is_empty)]
impl SignWord {
    /// Build a word from signs, enforcing the anchor invariant.
    pub fn new(signs: Vec<Sign>) -> Result<SignWord> {
        if signs.is_empty() {
            return Err(Error::MalformedSignWord("empty word".into()));
        }
        if signs[0] != Sign::Plus {
            return Err(Error::MalformedSignWord(format!(
                "word must start with '+', got {}",
                signs.iter().map(Sign::to_string).collect::<String>()
            )));
        }
        Ok(SignWord(signs))
    }

    /// Parse a word from a string of `+`/`-` characters.
    pub fn parse(s: &str) -> Result<SignWord> {
        let signs = s
            .chars()
            .map(|c| {
                Sign::from_char(c)
                    .ok_or_else(|| Error::MalformedSignWord(format!("bad character {c:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        SignWord::new(signs)
    }

    /// Number of leaves.  Never zero: the invariant forbids empty words.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// The signs, anchored at leaf 0.
    pub fn signs(&self) -> &[Sign] {
        &self.0
    }

    /// True when every leaf carries `+`, i.e. all orientations agree.
    pub fn is_coherent(&self) -> bool {
        self.0.iter().all(|&s| s == Sign::Plus)
    }

    /// All words obtained by re-choosing leaf 0.
    ///
    /// Choosing leaf `k` as the new anchor re-reads the word starting at `k`;
    /// when leaf `k`'s sign is `-` the reading direction reverses (its own
    /// orientation becomes the reference, which flips the sense in which
    /// neighbours are enumerated).  Every re-enumeration again starts with
    /// `+`, and there are exactly `len()` of them.
    pub fn reenumerations(&self) -> Vec<SignWord> {
        let n = self.0.len();
        let w = &self.0;
        (0..n)
            .map(|k| {
                let signs: Vec<Sign> = (0..n)
                    .map(|i| {
                        let j = if w[k] == Sign::Plus {
                            (k + i) % n
                        } else {
                            (k + n - (i % n)) % n
                        };
                        w[j] * w[k]
                    })
                    .collect();
                SignWord(signs)
            })
            .collect()
    }

    /// Canonical representative of the word's type: the lexicographically
    /// least re-enumeration (`+` sorts before `-`).
    pub fn canonical(&self) -> SignWord {
        self.reenumerations().into_iter().min().expect("nonempty")
    }
}

impl fmt::Display for SignWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Decide whether two words name the same lamination type.
pub fn types_equivalent(a: &SignWord, b: &SignWord) -> bool {
    a.len() == b.len() && a.canonical() == b.canonical()
}

/// Which side of a plug a boundary torus lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundarySide {
    /// The vector field points into the plug.
    Entrance,
    /// The vector field points out of the plug.
    Exit,
}

/// Convert dynamical leaf orientations to contracting ones.
///
/// On an exit torus the unstable lamination's holonomy contracts in the
/// direction of the dynamical orientation, so the two notions coincide; on
/// an entrance torus they are opposite, so every sign flips.
pub fn dynamical_to_contracting(orientations: &[Sign], side: BoundarySide) -> Vec<Sign> {
    orientations
        .iter()
        .map(|&s| s.flip_if(side == BoundarySide::Entrance))
        .collect()
}

/// Monotonicity profile of a lamination band in its normal form.
///
/// A band is the open annulus between two consecutive compact leaves.  The
/// non-compact leaves inside it spiral from one boundary leaf to the other,
/// and in the normal form their slope pattern is determined by the
/// contracting orientations of the two boundary leaves:
///
/// * `(-, +)` — the whole band ascends (`Pos`),
/// * `(+, -)` — the whole band descends (`Neg`),
/// * `(-, -)` — ascends on the first half, descends after the band midpoint
///   (`PosNeg`),
/// * `(+, +)` — descends first, ascends after the midpoint (`NegPos`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandProfile {
    /// Monotone ascending across the band.
    Pos,
    /// Monotone descending across the band.
    Neg,
    /// Ascends, then descends after the midpoint.
    PosNeg,
    /// Descends, then ascends after the midpoint.
    NegPos,
}

impl BandProfile {
    /// Profile of the band bounded by leaves with contracting orientations
    /// `left` and `right` (in increasing-position order).
    pub fn from_pair(left: Sign, right: Sign) -> BandProfile {
        match (left, right) {
            (Sign::Minus, Sign::Plus) => BandProfile::Pos,
            (Sign::Plus, Sign::Minus) => BandProfile::Neg,
            (Sign::Minus, Sign::Minus) => BandProfile::PosNeg,
            (Sign::Plus, Sign::Plus) => BandProfile::NegPos,
        }
    }

    /// Slope signs of the two band halves, `+1` ascending / `-1` descending.
    pub fn half_signs(self) -> (i8, i8) {
        match self {
            BandProfile::Pos => (1, 1),
            BandProfile::Neg => (-1, -1),
            BandProfile::PosNeg => (1, -1),
            BandProfile::NegPos => (-1, 1),
        }
    }
}

/// How a band is filled by non-compact leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandFill {
    /// No leaves at all: the complement component is an annulus, which is an
    /// exceptional (non-strip) gap.
    Empty,
    /// One leaf spiralling between the two boundary leaves: one strip.
    Spiral,
    /// `n` non-compact leaves crossing the band end to end (spiral leaves
    /// and/or arcs deposited by gluings).  A band is an open annulus, so `n`
    /// disjoint crossing leaves cut it into `n` strips, cyclically.
    Arcs(u32),
}

/// One band of a lamination, with its fill and the representative-steepness
/// level used when rendering piecewise-linear normal forms.
///
/// The steepness level picks which C1 representative of the lamination the
/// normal form draws: each level multiplies the representative's shallow
/// mid-band slope by a fixed factor (and narrows its near-leaf windows), the
/// combinatorial shadow of re-choosing the lamination after a
/// window-shrinking isotopy.  Levels 0..=2 are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Band {
    /// Non-compact content of the band.
    pub fill: BandFill,
    /// Representative steepness level (0 = plain).
    pub level: u8,
}

impl Band {
    fn spiral() -> Band {
        Band { fill: BandFill::Spiral, level: 0 }
    }

    /// Number of complement components this band contributes: one strip per
    /// crossing leaf, or the single exceptional annulus gap when empty.
    pub fn strips(&self) -> usize {
        match self.fill {
            BandFill::Empty | BandFill::Spiral => 1,
            BandFill::Arcs(n) => (n as usize).max(1),
        }
    }

    /// Record `n` additional end-to-end crossing leaves deposited by a
    /// gluing, merging them with whatever the band already contained.
    pub fn add_arcs(&mut self, n: u32) {
        if n == 0 {
            return;
        }
        self.fill = match self.fill {
            BandFill::Empty => BandFill::Arcs(n),
            BandFill::Spiral => BandFill::Arcs(1 + n),
            BandFill::Arcs(k) => BandFill::Arcs(k + n),
        };
    }
}

/// One compact leaf of a torus lamination.
#[derive(Debug, Clone, PartialEq)]
pub struct Leaf {
    /// Position of the leaf circle in `[0, 1)`, measured transversally.
    pub position: Rat,
    /// Contracting orientation relative to the torus frame.
    pub orientation: Sign,
    /// Provenance label, stable across gluings.
    pub id: String,
    /// Index of the basic piece whose invariant manifold traces this leaf.
    pub owner: usize,
}

/// A measured-sign lamination on a boundary torus.
///
/// Compact leaves are parallel circles of a common primitive homology class
/// (the frame is chosen so this class is `(0, 1)`, i.e. vertical).  Bands sit
/// between consecutive leaves; `bands[i]` lies between `leaves[i]` and
/// `leaves[(i+1) % n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusLamination {
    /// Compact leaves in strictly increasing position order.
    pub leaves: Vec<Leaf>,
    /// Bands between consecutive leaves.
    pub bands: Vec<Band>,
    /// Primitive homology class of the compact leaves.
    pub leaf_class: (i64, i64),
    /// True when the lamination is a foliation (bands entirely filled; the
    /// complement is empty, so the torus contributes no gaps).
    pub foliation: bool,
}

impl TorusLamination {
    /// Build a lamination from frame orientations at the given positions.
    pub fn new(orientations: &[Sign], positions: &[Rat]) -> Result<TorusLamination> {
        if orientations.is_empty() {
            return Err(Error::MalformedSignWord("lamination needs at least one leaf".into()));
        }
        if orientations.len() != positions.len() {
            return Err(Error::LeafCountMismatch(format!(
                "{} orientations vs {} positions",
                orientations.len(),
                positions.len()
            )));
        }
        for w in positions.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::BadLeafPositions(format!(
                    "positions must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if positions[0] < Rat::zero() || *positions.last().unwrap() >= Rat::one() {
            return Err(Error::BadLeafPositions("positions must lie in [0, 1)".into()));
        }
        let leaves = orientations
            .iter()
            .zip(positions)
            .enumerate()
            .map(|(i, (&orientation, position))| Leaf {
                position: position.clone(),
                orientation,
                id: format!("L{i}"),
                owner: 0,
            })
            .collect::<Vec<_>>();
        let bands = vec![Band::spiral(); leaves.len()];
        Ok(TorusLamination { leaves, bands, leaf_class: (0, 1), foliation: false })
    }

    /// Lamination with `n` leaves at the normalized positions `i/n`.
    pub fn from_word(word: &SignWord) -> TorusLamination {
        let n = word.len();
        let positions: Vec<Rat> = (0..n).map(|i| rat(i as i64, n as i64)).collect();
        TorusLamination::new(word.signs(), &positions).expect("valid by construction")
    }

    /// The zipped Reeb lamination: a single compact leaf whose band descends
    /// then ascends.  With `foliation` set it is the zipped Reeb foliation
    /// (the entrance lamination of an attracting plug built from one
    /// derived-from-Anosov orbit).
    pub fn zipped_reeb(foliation: bool) -> TorusLamination {
        let mut l = TorusLamination::from_word(&SignWord::parse("+").unwrap());
        l.foliation = foliation;
        l
    }

    /// Number of compact leaves.
    pub fn n_leaves(&self) -> usize {
        self.leaves.len()
    }

    /// Sign word relative to leaf 0.
    pub fn sign_word(&self) -> SignWord {
        let anchor = self.leaves[0].orientation;
        SignWord::new(self.leaves.iter().map(|l| l.orientation * anchor).collect())
            .expect("anchor sign is + by construction")
    }

    /// Canonical type of the lamination.
    pub fn canonical_type(&self) -> SignWord {
        self.sign_word().canonical()
    }

    /// True when all contracting orientations agree.
    pub fn is_coherent(&self) -> bool {
        self.sign_word().is_coherent()
    }

    /// Indices of leaves whose orientation disagrees with the majority.
    pub fn incoherent_leaves(&self) -> Vec<usize> {
        let plus = self.leaves.iter().filter(|l| l.orientation == Sign::Plus).count();
        let minority = if plus * 2 > self.n_leaves() { Sign::Minus } else { Sign::Plus };
        self.leaves
            .iter()
            .enumerate()
            .filter(|(_, l)| l.orientation == minority)
            .map(|(i, _)| i)
            .collect()
    }

    /// Profile of band `i` from its boundary leaf orientations.
    pub fn band_profile(&self, i: usize) -> BandProfile {
        let n = self.n_leaves();
        BandProfile::from_pair(self.leaves[i].orientation, self.leaves[(i + 1) % n].orientation)
    }

    /// All band profiles in order.
    pub fn band_profiles(&self) -> Vec<BandProfile> {
        (0..self.n_leaves()).map(|i| self.band_profile(i)).collect()
    }

    /// Width of band `i` (wrapping for the last band).
    pub fn band_width(&self, i: usize) -> Rat {
        let n = self.n_leaves();
        if i + 1 < n {
            &self.leaves[i + 1].position - &self.leaves[i].position
        } else {
            Rat::one() - &self.leaves[i].position + &self.leaves[0].position
        }
    }

    /// Endpoints `(a, b)` of band `i` with `a < b`; the last band wraps, so
    /// `b` may exceed 1.
    pub fn band_bounds(&self, i: usize) -> (Rat, Rat) {
        let a = self.leaves[i].position.clone();
        let b = &a + self.band_width(i);
        (a, b)
    }

    /// True when every band carries leaves (no annulus gaps), or the
    /// lamination is a foliation.
    pub fn is_filling(&self) -> bool {
        self.foliation || self.bands.iter().all(|b| b.fill != BandFill::Empty)
    }

    /// Number of complement strips the torus contributes.  A foliation's
    /// complement is empty; otherwise each band contributes one strip per
    /// crossing leaf, or one annulus gap when empty.
    pub fn strips(&self) -> usize {
        if self.foliation {
            0
        } else {
            self.bands.iter().map(Band::strips).sum()
        }
    }

    /// Indices of bands whose gap is an annulus (exceptional, non-strip).
    pub fn exceptional_gaps(&self) -> Vec<usize> {
        if self.foliation {
            return Vec::new();
        }
        self.bands
            .iter()
            .enumerate()
            .filter(|(_, b)| b.fill == BandFill::Empty)
            .map(|(i, _)| i)
            .collect()
    }

    /// Mark the given bands as steep at level 1, all others plain (choice of
    /// normal-form representative).
    pub fn with_steep_bands(mut self, steep: &[usize]) -> TorusLamination {
        let set: BTreeSet<usize> = steep.iter().copied().collect();
        for (i, band) in self.bands.iter_mut().enumerate() {
            band.level = u8::from(set.contains(&i));
        }
        self
    }

    /// Set every band's steepness level to `level`.
    pub fn with_uniform_level(mut self, level: u8) -> TorusLamination {
        for band in &mut self.bands {
            band.level = level;
        }
        self
    }

    /// Raise the steepness level of every already-flagged band by `d`.
    pub fn bump_flagged_levels(mut self, d: u8) -> TorusLamination {
        for band in &mut self.bands {
            if band.level > 0 {
                band.level += d;
            }
        }
        self
    }

    /// Append a new compact leaf inside the last band and renormalize all
    /// positions to `i/(n+1)`.  The new leaf carries the given frame
    /// orientation, a fresh id, and leaf 0's owner; the split band inherits
    /// the old band's fill and steepness.
    pub fn add_compact_leaf(&self, orientation: Sign, id: &str) -> TorusLamination {
        let n = self.n_leaves();
        let mut leaves = self.leaves.clone();
        leaves.push(Leaf {
            position: Rat::zero(), // fixed below by renormalization
            orientation,
            id: id.to_string(),
            owner: self.leaves[0].owner,
        });
        for (i, leaf) in leaves.iter_mut().enumerate() {
            leaf.position = rat(i as i64, (n + 1) as i64);
        }
        let mut bands = self.bands.clone();
        bands.push(bands[n - 1]);
        TorusLamination { leaves, bands, leaf_class: self.leaf_class, foliation: self.foliation }
    }

    /// Complete the lamination to a foliation: every empty band is filled
    /// with spiralling leaves.  Compact-leaf data is unchanged.
    pub fn complete_to_foliation(&self) -> TorusLamination {
        let mut out = self.clone();
        for band in &mut out.bands {
            if band.fill == BandFill::Empty {
                band.fill = BandFill::Spiral;
            }
        }
        out.foliation = true;
        out
    }

    /// Re-chart the lamination onto new leaf positions: the same leaves and
    /// bands, with leaf `i` moved to `positions[i]`.  This is the
    /// combinatorial form of an isotopy along the torus; every statement
    /// about the lamination depends only on the cyclic order, which is
    /// preserved because the new positions must again be strictly
    /// increasing.
    pub fn with_leaf_positions(&self, positions: &[Rat]) -> Result<TorusLamination> {
        if positions.len() != self.n_leaves() {
            return Err(Error::LeafCountMismatch(format!(
                "{} positions for {} leaves",
                positions.len(),
                self.n_leaves()
            )));
        }
        if positions[0] < Rat::zero() || positions[positions.len() - 1] >= Rat::one() {
            return Err(Error::BadLeafPositions("positions must lie in [0, 1)".into()));
        }
        for w in positions.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::BadLeafPositions(format!(
                    "positions must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        let mut out = self.clone();
        for (leaf, p) in out.leaves.iter_mut().zip(positions) {
            leaf.position = p.clone();
        }
        Ok(out)
    }

    /// Rebuild the lamination with compact leaves and band content carried
    /// over by a gluing.
    ///
    /// Insertions split the band containing them; an interval between two
    /// consecutive leaves that were already adjacent keeps its band, while a
    /// freshly cut sub-band starts empty at the steepness level of the band
    /// it came from.  Deposits then fill the band containing their position:
    /// crossing arcs accumulate through [`Band::add_arcs`], a single winding
    /// leaf alone marks its band spiral, and foliated content fills the band
    /// completely.  All positions are reduced mod 1 and must avoid the leaf
    /// circles.  The foliation flag is cleared; callers re-derive it from
    /// the deposited content.
    pub fn rebuild(
        &self,
        insertions: &[LeafInsertion],
        deposits: &[ContentDeposit],
    ) -> Result<TorusLamination> {
        let n_old = self.n_leaves();
        // Merged, sorted leaf slots; `old` remembers a leaf's former index so
        // uncut bands can be recognized.
        let mut slots: Vec<(Rat, Leaf, Option<usize>)> = self
            .leaves
            .iter()
            .enumerate()
            .map(|(i, l)| (l.position.clone(), l.clone(), Some(i)))
            .collect();
        for ins in insertions {
            let leaf = Leaf {
                position: frac(&ins.position),
                orientation: ins.orientation,
                id: ins.id.clone(),
                owner: ins.owner,
            };
            slots.push((leaf.position.clone(), leaf, None));
        }
        slots.sort_by(|a, b| a.0.cmp(&b.0));
        for w in slots.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Degenerate(format!(
                    "leaf collision at position {} ({} vs {})",
                    w[0].0, w[0].1.id, w[1].1.id
                )));
            }
        }
        let m = slots.len();
        let mut bands = Vec::with_capacity(m);
        for i in 0..m {
            let j = (i + 1) % m;
            let adjacent = match (slots[i].2, slots[j].2) {
                (Some(a), Some(b)) => (a + 1) % n_old == b,
                _ => false,
            };
            if adjacent {
                bands.push(self.bands[slots[i].2.expect("adjacent slots are old")]);
            } else {
                let hi = if j == 0 { &slots[j].0 + Rat::one() } else { slots[j].0.clone() };
                let mid = frac(&((&slots[i].0 + hi) / rat(2, 1)));
                let level = self.bands[self.band_containing(&mid)?].level;
                bands.push(Band { fill: BandFill::Empty, level });
            }
        }
        let leaves: Vec<Leaf> = slots.into_iter().map(|(_, l, _)| l).collect();
        let mut out = TorusLamination {
            leaves,
            bands,
            leaf_class: self.leaf_class,
            foliation: false,
        };
        // Per-band accumulation: (crossing arcs + winding leaves, any winding,
        // any foliated content).
        let mut acc: BTreeMap<usize, (u32, u32, bool)> = BTreeMap::new();
        for dep in deposits {
            let j = out.band_containing(&frac(&dep.position))?;
            let slot = acc.entry(j).or_insert((0, 0, false));
            match dep.kind {
                DepositKind::Arc => slot.0 += 1,
                DepositKind::Winding => slot.1 += 1,
                DepositKind::Foliated => slot.2 = true,
            }
        }
        for (j, (arcs, windings, foliated)) in acc {
            let band = &mut out.bands[j];
            let lone_winding = arcs == 0 && windings == 1 && band.fill == BandFill::Empty;
            if foliated || lone_winding {
                band.fill = BandFill::Spiral;
            } else {
                band.add_arcs(arcs + windings);
            }
        }
        Ok(out)
    }

    /// Index of the band whose open interval contains `x` (given in
    /// `[0, 1)`); a position on a leaf circle is an error.
    pub fn band_containing(&self, x: &Rat) -> Result<usize> {
        let n = self.n_leaves();
        if self.leaves.iter().any(|l| &l.position == x) {
            return Err(Error::Degenerate(format!("position {x} lies on a compact leaf")));
        }
        for k in 0..n.saturating_sub(1) {
            if *x > self.leaves[k].position && *x < self.leaves[k + 1].position {
                return Ok(k);
            }
        }
        Ok(n - 1)
    }
}

/// One compact leaf to splice into a lamination during a gluing.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafInsertion {
    /// Target position (reduced mod 1).
    pub position: Rat,
    /// Contracting orientation after transport.
    pub orientation: Sign,
    /// Provenance id for the new leaf.
    pub id: String,
    /// Owning basic piece in the receiving plug.
    pub owner: usize,
}

/// What a transported piece of lamination contributes to a band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepositKind {
    /// A cut segment of a compact leaf: one end-to-end crossing arc.
    Arc,
    /// A non-compact leaf winding between the band's boundary leaves.
    Winding,
    /// A piece of a foliation: a continuum filling the whole band.
    Foliated,
}

/// One piece of band content deposited by a gluing, located by the position
/// where it lands.
#[derive(Debug, Clone, PartialEq)]
pub struct ContentDeposit {
    /// Landing position (reduced mod 1); must avoid compact leaves.
    pub position: Rat,
    pub kind: DepositKind,
}

impl fmt::Display for TorusLamination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} leaves", self.sign_word(), self.n_leaves())?;
        if self.foliation {
            write!(f, ", foliation")?;
        }
        write!(f, ")")
    }
}

/// An affine self-map of the torus: `p -> matrix * p + shift`, with the
/// linear part unimodular.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusMap {
    /// Unimodular linear part, row-major.
    pub matrix: [[i64; 2]; 2],
    /// Translation part.
    pub shift: (Rat, Rat),
}

impl TorusMap {
    /// Build a map, validating unimodularity.
    pub fn new(matrix: [[i64; 2]; 2], shift: (Rat, Rat)) -> Result<TorusMap> {
        let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
        if det.abs() != 1 {
            return Err(Error::NotUnimodular(det));
        }
        Ok(TorusMap { matrix, shift })
    }

    /// The identity map.
    pub fn identity() -> TorusMap {
        TorusMap { matrix: [[1, 0], [0, 1]], shift: (Rat::zero(), Rat::zero()) }
    }

    /// Pure translation.
    pub fn translation(shift: (Rat, Rat)) -> TorusMap {
        TorusMap { matrix: [[1, 0], [0, 1]], shift }
    }

    /// The quarter rotation `chi_0 = [[0, -1], [1, 0]]`, sending vertical
    /// circles to horizontal ones.
    pub fn rotation() -> TorusMap {
        TorusMap { matrix: [[0, -1], [1, 0]], shift: (Rat::zero(), Rat::zero()) }
    }

    /// Determinant of the linear part (`+1` or `-1`).
    pub fn det(&self) -> i64 {
        self.matrix[0][0] * self.matrix[1][1] - self.matrix[0][1] * self.matrix[1][0]
    }

    /// Apply the map to a point of the plane (universal cover).
    pub fn apply(&self, p: &(Rat, Rat)) -> (Rat, Rat) {
        let x = rat(self.matrix[0][0], 1) * &p.0 + rat(self.matrix[0][1], 1) * &p.1 + &self.shift.0;
        let y = rat(self.matrix[1][0], 1) * &p.0 + rat(self.matrix[1][1], 1) * &p.1 + &self.shift.1;
        (x, y)
    }

    /// Image of a homology class under the linear part.
    pub fn apply_class(&self, c: (i64, i64)) -> (i64, i64) {
        (
            self.matrix[0][0] * c.0 + self.matrix[0][1] * c.1,
            self.matrix[1][0] * c.0 + self.matrix[1][1] * c.1,
        )
    }

    /// Inverse map.
    pub fn inverse(&self) -> TorusMap {
        let det = self.det();
        let [[a, b], [c, d]] = self.matrix;
        let inv = [[d * det, -b * det], [-c * det, a * det]];
        let sx = -(rat(inv[0][0], 1) * &self.shift.0 + rat(inv[0][1], 1) * &self.shift.1);
        let sy = -(rat(inv[1][0], 1) * &self.shift.0 + rat(inv[1][1], 1) * &self.shift.1);
        TorusMap { matrix: inv, shift: (sx, sy) }
    }

    /// Composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &TorusMap) -> TorusMap {
        let a = self.matrix;
        let b = other.matrix;
        let matrix = [
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ];
        let s = self.apply(&other.shift);
        TorusMap { matrix, shift: s }
    }
}

impl fmt::Display for TorusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{},{}],[{},{}]] + ({}, {})",
            self.matrix[0][0], self.matrix[0][1], self.matrix[1][0], self.matrix[1][1],
            self.shift.0, self.shift.1
        )
    }
}

/// The coherent gluing of two coherent laminations with equal leaf counts:
/// the identity matrix composed with a half-band shift, so every pushed leaf
/// lands at the midpoint of a receiving band.
///
/// Requires both laminations coherent, with the same number `n` of leaves at
/// the normalized positions `i/n`; the shift is then `1/(2n)`.
pub fn coherent_gluing(pushed: &TorusLamination, receiving: &TorusLamination) -> Result<TorusMap> {
    if !pushed.is_coherent() || !receiving.is_coherent() {
        return Err(Error::NotCoherent(format!(
            "coherent_gluing needs coherent words, got {} and {}",
            pushed.sign_word(),
            receiving.sign_word()
        )));
    }
    let n = pushed.n_leaves();
    if n != receiving.n_leaves() {
        return Err(Error::LeafCountMismatch(format!(
            "coherent_gluing needs equal counts, got {} and {}",
            n,
            receiving.n_leaves()
        )));
    }
    for (lam, name) in [(pushed, "pushed"), (receiving, "receiving")] {
        for (i, leaf) in lam.leaves.iter().enumerate() {
            if leaf.position != rat(i as i64, n as i64) {
                return Err(Error::BadLeafPositions(format!(
                    "coherent_gluing needs normalized positions i/{n} on the {name} side"
                )));
            }
        }
    }
    Ok(TorusMap::translation((rat(1, 2 * n as i64), Rat::zero())))
}

/// The entrance lamination of the plug `W` built by gluing the twisted-orbit
/// plug onto the `2n+2`-leaf attractor: `2n+3` compact leaves, of which
/// exactly one (the twisted orbit's trace, at index 0) is incoherently
/// oriented.  The two bands adjacent to the special leaf are rendered steep.
pub fn m1_entrance_lamination(n: usize) -> TorusLamination {
    let count = 2 * n + 3;
    let mut orientations = vec![Sign::Minus; count];
    orientations[0] = Sign::Plus;
    let positions: Vec<Rat> = (0..count).map(|i| rat(i as i64, count as i64)).collect();
    TorusLamination::new(&orientations, &positions)
        .expect("valid by construction")
        .with_steep_bands(&[0, count - 1])
}

/// The `phi_k` gluing for the `2n+3`-leaf laminations with one special leaf
/// at index 0: identity matrix plus the shift `(2k+1) / (2(2n+3))`, which
/// parks the pushed special leaf mid-band between receiving leaves `k` and
/// `k+1`.
pub fn phik_gluing(n: usize, k: usize) -> Result<TorusMap> {
    if k > 2 * n + 2 {
        return Err(Error::UnknownPlug(format!(
            "phi_k index k={k} out of range for n={n} (expected k <= {})",
            2 * n + 2
        )));
    }
    let den = 2 * (2 * n + 3) as i64;
    Ok(TorusMap::translation((rat((2 * k + 1) as i64, den), Rat::zero())))
}

/// Count the receiving lamination's coherent leaves strictly inside each of
/// the two annuli bounded by the receiving special leaf and the pushed
/// special leaf.  Both laminations must have exactly one incoherent leaf.
pub fn annulus_leaf_counts(
    pushed: &TorusLamination,
    map: &TorusMap,
    receiving: &TorusLamination,
) -> Result<(usize, usize)> {
    let special = |lam: &TorusLamination, side: &str| -> Result<usize> {
        let inc = lam.incoherent_leaves();
        if inc.len() != 1 {
            return Err(Error::Surgery(format!(
                "annulus counts need exactly one special leaf on the {side} side, found {}",
                inc.len()
            )));
        }
        Ok(inc[0])
    };
    let ps = special(pushed, "pushed")?;
    let rs = special(receiving, "receiving")?;
    let pushed_special = frac(&map.apply(&(pushed.leaves[ps].position.clone(), Rat::zero())).0);
    let recv_special = receiving.leaves[rs].position.clone();
    if pushed_special == recv_special {
        return Err(Error::NotTransverse(
            "pushed special leaf coincides with the receiving special leaf".into(),
        ));
    }
    // Open arc (a, b) counterclockwise on the circle.
    let in_arc = |x: &Rat, a: &Rat, b: &Rat| -> bool {
        if a < b {
            x > a && x < b
        } else {
            x > a || x < b
        }
    };
    let mut first = 0usize;
    let mut second = 0usize;
    for (i, leaf) in receiving.leaves.iter().enumerate() {
        if i == rs {
            continue;
        }
        if in_arc(&leaf.position, &recv_special, &pushed_special) {
            first += 1;
        } else if in_arc(&leaf.position, &pushed_special, &recv_special) {
            second += 1;
        } else {
            return Err(Error::NotTransverse(format!(
                "receiving leaf {} collides with a special leaf",
                leaf.id
            )));
        }
    }
    Ok((first, second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn w(s: &str) -> SignWord {
        SignWord::parse(s).unwrap()
    }

    #[test]
    fn parse_and_display_roundtrip() {
        for s in ["+", "++", "+-", "++--", "+-+-"] {
            assert_eq!(w(s).to_string(), s);
        }
    }

    #[test]
    fn malformed_words_rejected() {
        assert!(SignWord::parse("").is_err());
        assert!(SignWord::parse("-").is_err());
        assert!(SignWord::parse("-++").is_err());
        assert!(SignWord::parse("+x-").is_err());
    }

    #[test]
    fn canonical_fixed_points() {
        for s in ["+", "++", "+-", "+++", "++++", "+-+-"] {
            assert_eq!(w(s).canonical(), w(s), "word {s} should be canonical");
        }
    }

    #[test]
    fn canonical_three_leaf_class() {
        // All three-leaf words with a single minus share one type.
        assert_eq!(w("++-").canonical(), w("++-"));
        assert_eq!(w("+-+").canonical(), w("++-"));
        assert_eq!(w("+--").canonical(), w("++-"));
    }

    #[test]
    fn canonical_four_leaf_classes() {
        assert_eq!(w("+++-").canonical(), w("+++-"));
        assert_eq!(w("++-+").canonical(), w("+++-"));
        assert_eq!(w("+-++").canonical(), w("+++-"));
        assert_eq!(w("+---").canonical(), w("+++-"));
        assert_eq!(w("++--").canonical(), w("++--"));
        assert_eq!(w("+--+").canonical(), w("++--"));
        assert_eq!(w("+-+-").canonical(), w("+-+-"));
    }

    /// Independent oracle: close the word under single-step re-anchorings
    /// (rotate to the next leaf, or reflect through an incoherent leaf) and
    /// take the lexicographic minimum of the orbit.
    fn oracle_canonical(word: &SignWord) -> SignWord {
        let mut orbit: BTreeSet<Vec<Sign>> = BTreeSet::new();
        let mut stack = vec![word.signs().to_vec()];
        while let Some(v) = stack.pop() {
            if !orbit.insert(v.clone()) {
                continue;
            }
            let n = v.len();
            for k in 0..n {
                let next: Vec<Sign> = if v[k] == Sign::Plus {
                    (0..n).map(|i| v[(k + i) % n] * v[k]).collect()
                } else {
                    (0..n).map(|i| v[(k + n - (i % n)) % n] * v[k]).collect()
                };
                if !orbit.contains(&next) {
                    stack.push(next);
                }
            }
        }
        SignWord::new(orbit.into_iter().next().unwrap()).unwrap()
    }

    fn all_words(n: usize) -> Vec<SignWord> {
        (0..(1usize << (n - 1)))
            .map(|mask| {
                let mut signs = vec![Sign::Plus];
                for i in 0..n - 1 {
                    signs.push(if mask >> i & 1 == 1 { Sign::Minus } else { Sign::Plus });
                }
                SignWord::new(signs).unwrap()
            })
            .collect()
    }

    #[test]
    fn canonical_matches_orbit_closure_oracle() {
        for n in 1..=6 {
            for word in all_words(n) {
                assert_eq!(word.canonical(), oracle_canonical(&word), "word {word}");
            }
        }
    }

    #[test]
    fn canonical_is_idempotent_and_orbit_invariant() {
        for n in 1..=6 {
            for word in all_words(n) {
                let c = word.canonical();
                assert_eq!(c.canonical(), c);
                for r in word.reenumerations() {
                    assert_eq!(r.canonical(), c, "re-enumeration {r} of {word}");
                }
            }
        }
    }

    #[test]
    fn type_counts_per_leaf_number() {
        // Number of distinct types with n leaves, n = 1..6.
        let expected = [1usize, 2, 2, 4, 4, 9];
        for (n, want) in (1..=6).zip(expected) {
            let classes: BTreeSet<SignWord> =
                all_words(n).into_iter().map(|w| w.canonical()).collect();
            assert_eq!(classes.len(), want, "n = {n}");
        }
    }

    #[test]
    fn five_leaf_canonical_representatives() {
        let classes: BTreeSet<String> =
            all_words(5).into_iter().map(|w| w.canonical().to_string()).collect();
        let want: BTreeSet<String> =
            ["+++++", "++++-", "+++--", "++-+-"].iter().map(|s| s.to_string()).collect();
        assert_eq!(classes, want);
    }

    #[test]
    fn equivalence_respects_types() {
        assert!(types_equivalent(&w("+-+"), &w("++-")));
        assert!(types_equivalent(&w("+--+"), &w("++--")));
        assert!(!types_equivalent(&w("++--"), &w("+-+-")));
        assert!(!types_equivalent(&w("++"), &w("+-")));
        assert!(!types_equivalent(&w("++"), &w("+++")));
    }

    #[test]
    fn zipped_reeb_shape() {
        let l = TorusLamination::zipped_reeb(false);
        assert_eq!(l.n_leaves(), 1);
        assert_eq!(l.sign_word(), w("+"));
        assert_eq!(l.band_profiles(), vec![BandProfile::NegPos]);
        assert!(l.is_filling());
        assert_eq!(l.strips(), 1);
        let f = TorusLamination::zipped_reeb(true);
        assert!(f.foliation);
        assert_eq!(f.strips(), 0);
    }

    #[test]
    fn band_profiles_from_orientations() {
        // Alternating word: bands alternate Neg / Pos.
        let l = TorusLamination::from_word(&w("+-+-"));
        assert_eq!(
            l.band_profiles(),
            vec![BandProfile::Neg, BandProfile::Pos, BandProfile::Neg, BandProfile::Pos]
        );
        // Coherent word: every band descends then ascends.
        let c = TorusLamination::from_word(&w("++"));
        assert_eq!(c.band_profiles(), vec![BandProfile::NegPos, BandProfile::NegPos]);
    }

    #[test]
    fn m1_lamination_shape() {
        for n in 1..=3 {
            let l = m1_entrance_lamination(n);
            assert_eq!(l.n_leaves(), 2 * n + 3);
            assert_eq!(l.incoherent_leaves(), vec![0]);
            // One descending band, a run of split bands, one ascending band.
            let profiles = l.band_profiles();
            assert_eq!(profiles[0], BandProfile::Neg);
            assert_eq!(profiles[2 * n + 2], BandProfile::Pos);
            for p in &profiles[1..2 * n + 2] {
                assert_eq!(*p, BandProfile::PosNeg);
            }
            // Canonical type: all-plus block then a single minus.
            let mut want = "+".repeat(2 * n + 2);
            want.push('-');
            assert_eq!(l.canonical_type(), w(&want));
            assert!(l.bands[0].level == 1 && l.bands[2 * n + 2].level == 1);
        }
    }

    #[test]
    fn add_compact_leaf_appends_and_renormalizes() {
        let base = TorusLamination::from_word(&w("++"));
        let l = base.add_compact_leaf(Sign::Minus, "new");
        assert_eq!(l.n_leaves(), 3);
        assert_eq!(l.sign_word(), w("++-"));
        for (i, leaf) in l.leaves.iter().enumerate() {
            assert_eq!(leaf.position, rat(i as i64, 3));
        }
        assert_eq!(l.leaves[2].id, "new");
        assert_eq!(l.bands.len(), 3);
    }

    #[test]
    fn contracting_orientation_conversion() {
        let dyn_or = [Sign::Plus, Sign::Minus, Sign::Plus];
        let exit = dynamical_to_contracting(&dyn_or, BoundarySide::Exit);
        assert_eq!(exit, dyn_or.to_vec());
        let entrance = dynamical_to_contracting(&dyn_or, BoundarySide::Entrance);
        assert_eq!(entrance, vec![Sign::Minus, Sign::Plus, Sign::Minus]);
        // Entrance conversion is an involution.
        assert_eq!(dynamical_to_contracting(&entrance, BoundarySide::Entrance), dyn_or.to_vec());
    }

    #[test]
    fn torus_map_algebra() {
        assert!(TorusMap::new([[2, 0], [0, 1]], (Rat::zero(), Rat::zero())).is_err());
        let chi = TorusMap::rotation();
        assert_eq!(chi.apply_class((0, 1)), (-1, 0));
        assert_eq!(chi.apply_class((1, 0)), (0, 1));
        let p = (rat(1, 3), rat(1, 7));
        let q = chi.apply(&p);
        assert_eq!(q, (rat(-1, 7), rat(1, 3)));
        let back = chi.inverse().apply(&q);
        assert_eq!(back, p);
        let m = TorusMap::translation((rat(1, 4), Rat::zero()));
        let c = m.compose(&m.inverse());
        assert_eq!(c, TorusMap::identity());
    }

    #[test]
    fn coherent_gluing_half_band_shift() {
        let two = TorusLamination::from_word(&w("++"));
        let m = coherent_gluing(&two, &two).unwrap();
        assert_eq!(m.matrix, [[1, 0], [0, 1]]);
        assert_eq!(m.shift.0, rat(1, 4));
        let one = TorusLamination::zipped_reeb(false);
        let m1 = coherent_gluing(&one, &one).unwrap();
        assert_eq!(m1.shift.0, rat(1, 2));
    }

    #[test]
    fn coherent_gluing_rejects_bad_inputs() {
        let two = TorusLamination::from_word(&w("++"));
        let mixed = TorusLamination::from_word(&w("+-"));
        let three = TorusLamination::from_word(&w("+++"));
        assert!(matches!(coherent_gluing(&two, &mixed), Err(Error::NotCoherent(_))));
        assert!(matches!(coherent_gluing(&two, &three), Err(Error::LeafCountMismatch(_))));
    }

    #[test]
    fn phik_annulus_counts() {
        // For each n and k the two annuli bounded by the special leaves
        // contain k and 2n+2-k coherent receiving leaves.
        for n in 1..=3usize {
            let lam = m1_entrance_lamination(n);
            for k in 0..=n {
                let map = phik_gluing(n, k).unwrap();
                let (a, b) = annulus_leaf_counts(&lam, &map, &lam).unwrap();
                let mut got = [a, b];
                got.sort();
                let mut want = [k, 2 * n + 2 - k];
                want.sort();
                assert_eq!(got, want, "n={n} k={k}");
                assert_eq!(a + b, 2 * n + 2);
            }
        }
        assert!(phik_gluing(1, 5).is_err());
    }

    #[test]
    fn phik_positions_never_collide() {
        for n in 1..=3usize {
            let lam = m1_entrance_lamination(n);
            for k in 0..=(2 * n + 2) {
                let map = phik_gluing(n, k).unwrap();
                let mut positions: BTreeSet<Rat> =
                    lam.leaves.iter().map(|l| l.position.clone()).collect();
                for leaf in &lam.leaves {
                    let img = frac(&map.apply(&(leaf.position.clone(), Rat::zero())).0);
                    assert!(positions.insert(img), "collision at n={n} k={k}");
                }
                assert_eq!(positions.len(), 2 * (2 * n + 3));
            }
        }
    }

    #[test]
    fn strip_counts() {
        let mut l = TorusLamination::from_word(&w("+-+-"));
        assert_eq!(l.strips(), 4);
        // A band is an annulus: four disjoint crossing leaves cut it into
        // four strips (cyclically), not five.
        l.bands[0].fill = BandFill::Arcs(4);
        assert_eq!(l.strips(), 7);
        let mut b = l.bands[0];
        b.add_arcs(2);
        assert_eq!(b.fill, BandFill::Arcs(6));
        let mut s = Band::spiral();
        s.add_arcs(1);
        assert_eq!(s.strips(), 2);
        l.bands[1].fill = BandFill::Empty;
        assert!(!l.is_filling());
        assert_eq!(l.exceptional_gaps(), vec![1]);
        let completed = l.complete_to_foliation();
        assert!(completed.is_filling());
        assert_eq!(completed.strips(), 0);
        assert_eq!(completed.sign_word(), l.sign_word());
    }

    #[test]
    fn leaf_repositioning_validates_and_preserves_signs() {
        let lam = TorusLamination::from_word(&w("+-"));
        let moved = lam.with_leaf_positions(&[rat(1, 8), rat(5, 8)]).unwrap();
        assert_eq!(moved.leaves[0].position, rat(1, 8));
        assert_eq!(moved.leaves[1].position, rat(5, 8));
        assert_eq!(moved.sign_word(), lam.sign_word());
        assert!(lam.with_leaf_positions(&[rat(1, 2)]).is_err());
        assert!(lam.with_leaf_positions(&[rat(1, 2), rat(1, 2)]).is_err());
        assert!(lam.with_leaf_positions(&[rat(0, 1), rat(3, 2)]).is_err());
    }

    #[test]
    fn rebuild_splits_bands_and_accumulates_content() {
        let lam = TorusLamination::from_word(&w("+"));
        // Inserting a leaf splits the lone band into two fresh empty halves;
        // a single winding deposit turns one spiral while two crossing arcs
        // pile up in the other.
        let rebuilt = lam
            .rebuild(
                &[LeafInsertion {
                    position: rat(1, 2),
                    orientation: Sign::Minus,
                    id: "w".into(),
                    owner: 0,
                }],
                &[
                    ContentDeposit { position: rat(1, 4), kind: DepositKind::Winding },
                    ContentDeposit { position: rat(3, 4), kind: DepositKind::Arc },
                    ContentDeposit { position: rat(7, 8), kind: DepositKind::Arc },
                ],
            )
            .unwrap();
        assert_eq!(rebuilt.n_leaves(), 2);
        assert_eq!(rebuilt.sign_word(), w("+-"));
        assert_eq!(rebuilt.bands[0].fill, BandFill::Spiral);
        assert_eq!(rebuilt.bands[1].fill, BandFill::Arcs(2));
        // An uncut band keeps its fill, and foliated material spirals it.
        let kept = lam
            .rebuild(&[], &[ContentDeposit { position: rat(1, 3), kind: DepositKind::Foliated }])
            .unwrap();
        assert_eq!(kept.bands[0].fill, BandFill::Spiral);
        // An insertion on an existing leaf collides.
        assert!(lam
            .rebuild(
                &[LeafInsertion {
                    position: rat(0, 1),
                    orientation: Sign::Plus,
                    id: "x".into(),
                    owner: 0,
                }],
                &[],
            )
            .is_err());
        // Deposits must land strictly inside a band.
        assert!(lam
            .rebuild(&[], &[ContentDeposit { position: rat(0, 1), kind: DepositKind::Arc }])
            .is_err());
    }
}
