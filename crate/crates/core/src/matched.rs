//! Matched pairs: a Boolean algebra and a monoid acting on one another,
//! the carriers they act on jointly, and the constructions making those
//! carriers a cartesian closed variety: products, free objects and
//! function spaces, plus extraction from endofunction monoids and the
//! round-trip that rebuilds a pair from its own variety.

use std::collections::HashMap;

use crate::balg::{
    enumerate_boolean_homs, powerset_form, BoolHom, BooleanAlgebra, Elem, Partition,
};
use crate::bset::{
    action_from_eqs, bset_certificate, bset_product, conditioned_bset, dirac, dist_substitute,
    enumerate_bsets, enumerate_distributions, eqs_from_action, free_bset, glue, hom_defect,
    terminal_bset, validate_bset, BSet, Distribution, EqFamily,
};
use crate::error::{Error, Result, Witness};
use crate::exec;
use crate::mon::{
    encode_endo, endo_monoid, enumerate_monoid_homs, validate_maction, MAction, Monoid,
};
use crate::report::{Certificate, Check};
use crate::Limits;

// ---------------------------------------------------------------------
// Matched pairs

/// A Boolean algebra and a monoid acting on each other: the algebra
/// acts on the monoid carrier by case-split (`b(m, n)`), the monoid
/// acts on algebra elements by Boolean endomorphisms (`m * b`), and the
/// two actions satisfy the translation and compatibility laws checked
/// by [`matched_pair_certificate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchedPair {
    pub algebra: BooleanAlgebra,
    pub monoid: Monoid,
    /// Case-split action of the algebra on the monoid carrier.
    pub bset_on_m: BSet,
    /// Action on algebra elements, `table[m * |B| + b] = m * b`.
    pub m_on_b: MAction,
}

impl MatchedPair {
    pub fn check_shape(&self) -> Result<()> {
        if self.bset_on_m.algebra != self.algebra {
            return Err(Error::input("case-split action lives over a different algebra"));
        }
        if self.bset_on_m.carrier != self.monoid.size {
            return Err(Error::input("case-split action is not on the monoid carrier"));
        }
        if self.m_on_b.monoid != self.monoid {
            return Err(Error::input("algebra action is by a different monoid"));
        }
        if self.m_on_b.carrier != self.algebra.size() {
            return Err(Error::input("algebra action is not on the algebra carrier"));
        }
        Ok(())
    }

    /// `b(m, n)`.
    pub fn cond(&self, b: Elem, m: usize, n: usize) -> usize {
        self.bset_on_m.act(b, m, n)
    }

    /// `m * b`.
    pub fn star(&self, m: usize, b: Elem) -> Elem {
        self.m_on_b.act(m, b as usize) as Elem
    }

    /// `m =_b n`.
    pub fn meq(&self, b: Elem, m: usize, n: usize) -> bool {
        self.bset_on_m.eq(b, m, n)
    }
}

/// The pair laws: both component certificates plus the coupling
/// families, one tagged sweep per law.
pub fn matched_pair_certificate(p: &MatchedPair, limits: &Limits) -> Result<Certificate> {
    p.check_shape()?;
    let bn = p.algebra.size() as u64;
    let mn = p.monoid.size as u64;
    limits.check_naive((bn * mn * mn * mn).max(bn * bn * mn * mn))?;
    let mut cert = bset_certificate(&p.bset_on_m, limits)?.scoped("pair");
    cert.merge(validate_maction(&p.m_on_b)?.scoped("pair"));

    // m * (b /\ c) = m*b /\ m*c
    cert.sweep("pair.star-meet", mn * bn * bn, |i| {
        let m = (i / (bn * bn)) as usize;
        let b = ((i / bn) % bn) as Elem;
        let c = (i % bn) as Elem;
        (p.star(m, p.algebra.meet(b, c)) != p.algebra.meet(p.star(m, b), p.star(m, c))).then(|| {
            Witness::new("pair.star-meet", &[("m", m as u64), ("b", b as u64), ("c", c as u64)])
        })
    });
    // m * b' = (m * b)'
    cert.sweep("pair.star-neg", mn * bn, |i| {
        let m = (i / bn) as usize;
        let b = (i % bn) as Elem;
        (p.star(m, p.algebra.neg(b)) != p.algebra.neg(p.star(m, b)))
            .then(|| Witness::new("pair.star-neg", &[("m", m as u64), ("b", b as u64)]))
    });
    // m * 1 = 1
    cert.sweep("pair.star-top", mn, |i| {
        let m = i as usize;
        (p.star(m, p.algebra.one()) != p.algebra.one())
            .then(|| Witness::new("pair.star-top", &[("m", m as u64)]))
    });
    // b(m, n) q = b(mq, nq)
    cert.sweep("pair.right-translation", bn * mn * mn * mn, |i| {
        let b = (i / (mn * mn * mn)) as Elem;
        let m = ((i / (mn * mn)) % mn) as usize;
        let n = ((i / mn) % mn) as usize;
        let q = (i % mn) as usize;
        let lhs = p.monoid.mul(p.cond(b, m, n), q);
        let rhs = p.cond(b, p.monoid.mul(m, q), p.monoid.mul(n, q));
        (lhs != rhs).then(|| {
            Witness::new(
                "pair.right-translation",
                &[("b", b as u64), ("m", m as u64), ("n", n as u64), ("q", q as u64)],
            )
        })
    });
    // m b(n, q) = (m*b)(mn, mq)
    cert.sweep("pair.left-translation", bn * mn * mn * mn, |i| {
        let b = (i / (mn * mn * mn)) as Elem;
        let m = ((i / (mn * mn)) % mn) as usize;
        let n = ((i / mn) % mn) as usize;
        let q = (i % mn) as usize;
        let lhs = p.monoid.mul(m, p.cond(b, n, q));
        let rhs = p.cond(p.star(m, b), p.monoid.mul(m, n), p.monoid.mul(m, q));
        (lhs != rhs).then(|| {
            Witness::new(
                "pair.left-translation",
                &[("b", b as u64), ("m", m as u64), ("n", n as u64), ("q", q as u64)],
            )
        })
    });
    // b(m, n) * c = (b /\ m*c) \/ (b' /\ n*c)
    cert.sweep("pair.star-case", bn * bn * mn * mn, |i| {
        let b = (i / (bn * mn * mn)) as Elem;
        let c = ((i / (mn * mn)) % bn) as Elem;
        let m = ((i / mn) % mn) as usize;
        let n = (i % mn) as usize;
        let lhs = p.star(p.cond(b, m, n), c);
        let rhs = p.algebra.cond(b, p.star(m, c), p.star(n, c));
        (lhs != rhs).then(|| {
            Witness::new(
                "pair.star-case",
                &[("b", b as u64), ("c", c as u64), ("m", m as u64), ("n", n as u64)],
            )
        })
    });
    Ok(cert)
}

pub fn validate_matched_pair(
    algebra: BooleanAlgebra,
    monoid: Monoid,
    bset_on_m: BSet,
    m_on_b: MAction,
    limits: &Limits,
) -> Result<MatchedPair> {
    let p = MatchedPair { algebra, monoid, bset_on_m, m_on_b };
    matched_pair_certificate(&p, limits)?.require()?;
    Ok(p)
}

/// The pair over the one-atom algebra: star is forced to the identity
/// and case-split picks the first or second argument outright.
pub fn trivial_pair(monoid: &Monoid, limits: &Limits) -> Result<MatchedPair> {
    let alg = BooleanAlgebra::new(1)?;
    let sz = monoid.size;
    let mut action = Vec::with_capacity(2 * sz * sz);
    for b in alg.elements() {
        for m in 0..sz {
            for n in 0..sz {
                action.push(if b == alg.one() { m } else { n });
            }
        }
    }
    let bset_on_m = validate_bset(alg, sz, action, limits)?;
    let star: Vec<usize> = (0..sz).flat_map(|_| [0usize, 1]).collect();
    let m_on_b = MAction::new(monoid.clone(), 2, star)?;
    validate_matched_pair(alg, monoid.clone(), bset_on_m, m_on_b, limits)
}

/// Every matched pair over the given algebra size and monoid, by
/// filtering all case-split structures against all candidate star
/// tables (star tables are atom maps per monoid element, since Boolean
/// endomorphisms are exactly atom preimages).
pub fn enumerate_matched_pairs(
    atoms: u32,
    monoid: &Monoid,
    limits: &Limits,
) -> Result<Vec<MatchedPair>> {
    let alg = BooleanAlgebra::new(atoms)?;
    limits.check_atoms(atoms)?;
    limits.check_monoid(monoid.size)?;
    let bsets = enumerate_bsets(&alg, monoid.size, limits)?;
    let a = atoms as usize;
    let maps_per = (a as u64).pow(a as u32);
    let space = maps_per
        .checked_pow(monoid.size as u32)
        .ok_or_else(|| Error::input("star table space overflows"))?;
    limits.check_naive(space.saturating_mul(bsets.len() as u64))?;
    let mut out = Vec::new();
    for bset in &bsets {
        for code in 0..space {
            let sigmas = exec::digits(code, maps_per as usize, monoid.size);
            let mut table = Vec::with_capacity(monoid.size * alg.size());
            for &sig in &sigmas {
                let sigma = exec::digits(sig as u64, a, a);
                for b in alg.elements() {
                    let mut image: Elem = 0;
                    for (j, &target) in sigma.iter().enumerate() {
                        if b & alg.atom(target as u32) != 0 {
                            image |= alg.atom(j as u32);
                        }
                    }
                    table.push(image as usize);
                }
            }
            let Ok(m_on_b) = MAction::new(monoid.clone(), alg.size(), table) else {
                continue;
            };
            let p = MatchedPair {
                algebra: alg,
                monoid: monoid.clone(),
                bset_on_m: bset.clone(),
                m_on_b,
            };
            if matched_pair_certificate(&p, limits)?.ok() {
                out.push(p);
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// Carriers with both actions

/// A carrier with compatible case-split and monoid actions over one
/// matched pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BMSet {
    pub pair: MatchedPair,
    pub bset: BSet,
    pub maction: MAction,
}

impl BMSet {
    pub fn carrier(&self) -> usize {
        self.bset.carrier
    }

    /// `m . x`.
    pub fn mact(&self, m: usize, x: usize) -> usize {
        self.maction.act(m, x)
    }

    /// `b(x, y)`.
    pub fn bact(&self, b: Elem, x: usize, y: usize) -> usize {
        self.bset.act(b, x, y)
    }

    pub fn check_shape(&self) -> Result<()> {
        self.pair.check_shape()?;
        if self.bset.algebra != self.pair.algebra {
            return Err(Error::input("case-split action lives over a different algebra"));
        }
        if self.maction.monoid != self.pair.monoid {
            return Err(Error::input("monoid action is by a different monoid"));
        }
        if self.maction.carrier != self.bset.carrier {
            return Err(Error::input("the two actions disagree on the carrier"));
        }
        Ok(())
    }
}

/// The coupling laws on one carrier: case-split of a glued monoid
/// element, pushing a monoid element through a case-split, and the two
/// relation-level consequences.
pub fn bmset_certificate(x: &BMSet, limits: &Limits) -> Result<Certificate> {
    x.check_shape()?;
    let bn = x.pair.algebra.size() as u64;
    let mn = x.pair.monoid.size as u64;
    let n = x.carrier() as u64;
    limits.check_naive((bn * mn * mn * n).max(mn * bn * n * n))?;
    let mut cert = bset_certificate(&x.bset, limits)?.scoped("bmset");
    cert.merge(validate_maction(&x.maction)?.scoped("bmset"));

    // b(m, n) . v = b(m.v, n.v)
    cert.sweep("bmset.case-split", bn * mn * mn * n, |i| {
        let b = (i / (mn * mn * n)) as Elem;
        let m = ((i / (mn * n)) % mn) as usize;
        let q = ((i / n) % mn) as usize;
        let v = (i % n) as usize;
        let lhs = x.mact(x.pair.cond(b, m, q), v);
        let rhs = x.bact(b, x.mact(m, v), x.mact(q, v));
        (lhs != rhs).then(|| {
            Witness::new(
                "bmset.case-split",
                &[("b", b as u64), ("m", m as u64), ("n", q as u64), ("x", v as u64)],
            )
        })
    });
    // m . b(u, v) = (m*b)(m.u, m.v)
    cert.sweep("bmset.push", mn * bn * n * n, |i| {
        let m = (i / (bn * n * n)) as usize;
        let b = ((i / (n * n)) % bn) as Elem;
        let u = ((i / n) % n) as usize;
        let v = (i % n) as usize;
        let lhs = x.mact(m, x.bact(b, u, v));
        let rhs = x.bact(x.pair.star(m, b), x.mact(m, u), x.mact(m, v));
        (lhs != rhs).then(|| {
            Witness::new(
                "bmset.push",
                &[("m", m as u64), ("b", b as u64), ("x", u as u64), ("y", v as u64)],
            )
        })
    });
    // m =_b n  =>  m.v =_b n.v
    cert.sweep("bmset.translate", bn * mn * mn * n, |i| {
        let b = (i / (mn * mn * n)) as Elem;
        let m = ((i / (mn * n)) % mn) as usize;
        let q = ((i / n) % mn) as usize;
        let v = (i % n) as usize;
        (x.pair.meq(b, m, q) && !x.bset.eq(b, x.mact(m, v), x.mact(q, v))).then(|| {
            Witness::new(
                "bmset.translate",
                &[("b", b as u64), ("m", m as u64), ("n", q as u64), ("x", v as u64)],
            )
        })
    });
    // u =_b v  =>  m.u =_{m*b} m.v
    cert.sweep("bmset.transport", mn * bn * n * n, |i| {
        let m = (i / (bn * n * n)) as usize;
        let b = ((i / (n * n)) % bn) as Elem;
        let u = ((i / n) % n) as usize;
        let v = (i % n) as usize;
        (x.bset.eq(b, u, v) && !x.bset.eq(x.pair.star(m, b), x.mact(m, u), x.mact(m, v))).then(
            || {
                Witness::new(
                    "bmset.transport",
                    &[("m", m as u64), ("b", b as u64), ("x", u as u64), ("y", v as u64)],
                )
            },
        )
    });
    Ok(cert)
}

pub fn validate_bmset(
    pair: &MatchedPair,
    bset: BSet,
    maction: MAction,
    limits: &Limits,
) -> Result<BMSet> {
    let x = BMSet { pair: pair.clone(), bset, maction };
    bmset_certificate(&x, limits)?.require()?;
    Ok(x)
}

/// The one-point carrier.
pub fn terminal_bmset(pair: &MatchedPair, limits: &Limits) -> Result<BMSet> {
    let bset = terminal_bset(&pair.algebra);
    let maction = MAction::new(pair.monoid.clone(), 1, vec![0; pair.monoid.size])?;
    validate_bmset(pair, bset, maction, limits)
}

/// The monoid on its own carrier: case-split from the pair, monoid
/// action by left multiplication.
pub fn m_bmset(pair: &MatchedPair, limits: &Limits) -> Result<BMSet> {
    let sz = pair.monoid.size;
    let mut table = Vec::with_capacity(sz * sz);
    for m in 0..sz {
        for x in 0..sz {
            table.push(pair.monoid.mul(m, x));
        }
    }
    let maction = MAction::new(pair.monoid.clone(), sz, table)?;
    validate_bmset(pair, pair.bset_on_m.clone(), maction, limits)
}

/// The algebra on its own carrier: case-split by conditioned
/// disjunction, monoid action by star.
pub fn b_bmset(pair: &MatchedPair, limits: &Limits) -> Result<BMSet> {
    let bset = conditioned_bset(&pair.algebra, limits)?;
    validate_bmset(pair, bset, pair.m_on_b.clone(), limits)
}

// ---------------------------------------------------------------------
// Homomorphisms

/// First failure of `f` as a map preserving both actions.
pub fn bm_hom_defect(x: &BMSet, y: &BMSet, f: &[usize]) -> Option<Witness> {
    if let Some(w) = hom_defect(&x.bset, &y.bset, f) {
        return Some(w);
    }
    for m in 0..x.pair.monoid.size {
        for u in 0..x.carrier() {
            if f[x.mact(m, u)] != y.mact(m, f[u]) {
                return Some(Witness::new("hom.equivariance", &[("m", m as u64), ("x", u as u64)]));
            }
        }
    }
    None
}

const UNSET: usize = usize::MAX;

struct BmHomSearch<'a> {
    x: &'a BMSet,
    y: &'a BMSet,
    xe: &'a EqFamily,
    ye: &'a EqFamily,
    atoms: &'a [Elem],
    assign: Vec<usize>,
    out: Vec<Vec<usize>>,
}

impl BmHomSearch<'_> {
    // Assign `f(i) = w` plus everything equivariance forces, recording
    // touched positions for rollback.  False on conflict.
    fn propagate(&mut self, i: usize, w: usize, trail: &mut Vec<usize>) -> bool {
        let mut queue = vec![(i, w)];
        while let Some((i, w)) = queue.pop() {
            if self.assign[i] == w {
                continue;
            }
            if self.assign[i] != UNSET {
                return false;
            }
            for (j, &fj) in self.assign.iter().enumerate() {
                if fj == UNSET {
                    continue;
                }
                if self.atoms.iter().any(|&a| self.xe.eq(a, i, j) && !self.ye.eq(a, w, fj)) {
                    return false;
                }
            }
            self.assign[i] = w;
            trail.push(i);
            for m in 0..self.x.pair.monoid.size {
                queue.push((self.x.mact(m, i), self.y.mact(m, w)));
            }
        }
        true
    }

    // Branching on the smallest unassigned position keeps the output
    // lexicographic: everything below it is already fixed.
    fn search(&mut self) {
        let Some(i) = self.assign.iter().position(|&v| v == UNSET) else {
            self.out.push(self.assign.clone());
            return;
        };
        let yc = self.y.carrier();
        for w in 0..yc {
            let mut trail = Vec::new();
            if self.propagate(i, w, &mut trail) {
                self.search();
            }
            for &t in &trail {
                self.assign[t] = UNSET;
            }
        }
    }
}

/// All maps preserving both structures, in lexicographic order.  The
/// search branches on atom relations and propagates equivariance
/// immediately; every leaf is re-checked against the full hom laws.
pub fn enumerate_bm_homs(x: &BMSet, y: &BMSet, limits: &Limits) -> Result<Vec<Vec<usize>>> {
    if x.pair != y.pair {
        return Err(Error::input("hom search needs a shared matched pair"));
    }
    let xe = eqs_from_action(&x.bset);
    let ye = eqs_from_action(&y.bset);
    // Capacity gate only.  The hom count of the underlying case-split
    // structures bounds the output, and so does branching: the search
    // branches at the least unassigned position and each branch forces
    // the full forward orbit of its position, so which positions branch
    // is value-independent and leaves number at most |Y|^branches.
    let mut predicted = 1u64;
    for a in 0..x.pair.algebra.atoms() {
        let atom = x.pair.algebra.atom(a);
        let (qx, qy) = (xe.classes(atom) as u64, ye.classes(atom) as u64);
        predicted = predicted.saturating_mul(qy.saturating_pow(qx as u32));
    }
    let mut covered = vec![false; x.carrier()];
    let mut branches = 0u32;
    for i in 0..x.carrier() {
        if covered[i] {
            continue;
        }
        branches += 1;
        let mut stack = vec![i];
        while let Some(u) = stack.pop() {
            if covered[u] {
                continue;
            }
            covered[u] = true;
            for m in 0..x.pair.monoid.size {
                stack.push(x.mact(m, u));
            }
        }
    }
    let orbit_bound = (y.carrier() as u64).saturating_pow(branches);
    limits.check_naive(predicted.min(orbit_bound))?;
    let atoms: Vec<Elem> = (0..x.pair.algebra.atoms()).map(|a| x.pair.algebra.atom(a)).collect();
    let mut s = BmHomSearch {
        x,
        y,
        xe: &xe,
        ye: &ye,
        atoms: &atoms,
        assign: vec![UNSET; x.carrier()],
        out: Vec::new(),
    };
    s.search();
    let out = s.out;
    if !out.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Invariant("hom search emitted out of order".into()));
    }
    for f in &out {
        if let Some(w) = bm_hom_defect(x, y, f) {
            return Err(Error::Invariant(format!(
                "relation-compatible equivariant map fails the hom laws: {w}"
            )));
        }
    }
    Ok(out)
}

/// Oracle: filter every carrier map by the hom laws directly.
pub fn naive_bm_homs(x: &BMSet, y: &BMSet, limits: &Limits) -> Result<Vec<Vec<usize>>> {
    if x.pair != y.pair {
        return Err(Error::input("hom search needs a shared matched pair"));
    }
    let space = (y.carrier() as u64)
        .checked_pow(x.carrier() as u32)
        .ok_or_else(|| Error::input("hom table space overflows"))?;
    limits.check_naive(space)?;
    Ok(exec::collect_vec(space, |i| {
        let f = exec::digits(i, y.carrier(), x.carrier());
        if bm_hom_defect(x, y, &f).is_none() {
            vec![f]
        } else {
            vec![]
        }
    }))
}

// ---------------------------------------------------------------------
// Products

/// Componentwise actions on pairs, indexed `xi * |Y| + yi`.
pub fn bm_product(x: &BMSet, y: &BMSet, limits: &Limits) -> Result<BMSet> {
    if x.pair != y.pair {
        return Err(Error::input("product needs a shared matched pair"));
    }
    let bset = bset_product(&x.bset, &y.bset, limits)?;
    let n = bset.carrier;
    let sz = x.pair.monoid.size;
    let mut table = Vec::with_capacity(sz * n);
    for m in 0..sz {
        for u in 0..n {
            let (ux, uy) = (u / y.carrier(), u % y.carrier());
            table.push(x.mact(m, ux) * y.carrier() + y.mact(m, uy));
        }
    }
    let maction = MAction::new(x.pair.monoid.clone(), n, table)?;
    validate_bmset(&x.pair, bset, maction, limits)
}

/// The product property against one test object, plus componentwise
/// relations.
pub fn bm_product_certificate(
    w: &BMSet,
    x: &BMSet,
    y: &BMSet,
    limits: &Limits,
) -> Result<Certificate> {
    let p = bm_product(x, y, limits)?;
    let yc = y.carrier();
    let proj1: Vec<usize> = (0..p.carrier()).map(|u| u / yc).collect();
    let proj2: Vec<usize> = (0..p.carrier()).map(|u| u % yc).collect();
    let mut cert = Certificate::new();
    cert.push(Check::of(
        "product.projections",
        2,
        bm_hom_defect(&p, x, &proj1)
            .or_else(|| bm_hom_defect(&p, y, &proj2))
            .map(|wd| Witness { law: "product.projections".into(), ..wd }),
    ));

    let fs = enumerate_bm_homs(w, x, limits)?;
    let gs = enumerate_bm_homs(w, y, limits)?;
    let hs = enumerate_bm_homs(w, &p, limits)?;
    let mut tupling = None;
    if hs.len() != fs.len() * gs.len() {
        tupling = Some(Witness::new(
            "product.tupling",
            &[("homs", hs.len() as u64), ("pairs", (fs.len() * gs.len()) as u64)],
        ));
    }
    for (fi, f) in fs.iter().enumerate() {
        for (gi, g) in gs.iter().enumerate() {
            if tupling.is_some() {
                break;
            }
            let paired: Vec<usize> = f.iter().zip(g).map(|(&a, &b)| a * yc + b).collect();
            if hs.binary_search(&paired).is_err() {
                tupling =
                    Some(Witness::new("product.tupling", &[("f", fi as u64), ("g", gi as u64)]));
            }
        }
    }
    cert.push(Check::of("product.tupling", (fs.len() * gs.len()) as u64, tupling));

    // u =_b v iff both components are
    let pe = eqs_from_action(&p.bset);
    let xe = eqs_from_action(&x.bset);
    let ye = eqs_from_action(&y.bset);
    let bn = p.pair.algebra.size() as u64;
    let n = p.carrier() as u64;
    cert.sweep("product.relations", bn * n * n, |i| {
        let b = (i / (n * n)) as Elem;
        let u = ((i / n) % n) as usize;
        let v = (i % n) as usize;
        let lhs = pe.eq(b, u, v);
        let rhs = xe.eq(b, u / yc, v / yc) && ye.eq(b, u % yc, v % yc);
        (lhs != rhs).then(|| {
            Witness::new("product.relations", &[("b", b as u64), ("x", u as u64), ("y", v as u64)])
        })
    });
    Ok(cert)
}

// ---------------------------------------------------------------------
// Free objects

/// The free carrier on a finite set of generators: monoid elements
/// paired with distributions over the generators, indexed
/// `(m, w) = m * dists + w`.
#[derive(Debug, Clone)]
pub struct FreeBMSet {
    pub bmset: BMSet,
    pub dists: Vec<Distribution>,
    /// Carrier index of each generator: the identity paired with the
    /// point mass at that generator.
    pub unit: Vec<usize>,
}

/// Free object: `n . (m, w) = (nm, n* o w)`, case-split componentwise.
pub fn free_bmset(pair: &MatchedPair, generators: usize, limits: &Limits) -> Result<FreeBMSet> {
    let free = free_bset(&pair.algebra, generators, limits)?;
    let dn = free.dists.len();
    let sz = pair.monoid.size;
    let bset = bset_product(&pair.bset_on_m, &free.bset, limits)?;
    let mut table = Vec::with_capacity(sz * bset.carrier);
    for n in 0..sz {
        for u in 0..bset.carrier {
            let (m, w) = (u / dn, u % dn);
            let pushed = Distribution {
                omega: free.dists[w].omega.iter().map(|&b| pair.star(n, b)).collect(),
            };
            let wi = free.dists.binary_search(&pushed).map_err(|_| {
                Error::Invariant("star push of a distribution is not a distribution".into())
            })?;
            table.push(pair.monoid.mul(n, m) * dn + wi);
        }
    }
    let maction = MAction::new(pair.monoid.clone(), bset.carrier, table)?;
    let bmset = validate_bmset(pair, bset, maction, limits)?;
    let unit = (0..generators)
        .map(|g| {
            free.dists
                .binary_search(&dirac(&pair.algebra, generators, g))
                .map(|wi| pair.monoid.identity * dn + wi)
                .map_err(|_| {
                    Error::Invariant("point mass missing from the distribution list".into())
                })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FreeBMSet { bmset, dists: free.dists, unit })
}

/// Freeness against one target: every generator assignment extends to
/// exactly one hom, and the extension glues the translated generator
/// images along each distribution.
pub fn free_bmset_certificate(
    free: &FreeBMSet,
    target: &BMSet,
    limits: &Limits,
) -> Result<Certificate> {
    let homs = enumerate_bm_homs(&free.bmset, target, limits)?;
    let g = free.unit.len();
    let dn = free.dists.len();
    let sz = free.bmset.pair.monoid.size;
    let space = (target.carrier() as u64)
        .checked_pow(g as u32)
        .ok_or_else(|| Error::input("assignment space overflows"))?;
    limits.check_naive(space.saturating_mul(free.bmset.carrier() as u64))?;
    let te = eqs_from_action(&target.bset);
    let mut unique = None;
    let mut formula = None;
    for i in 0..space {
        let u = exec::digits(i, target.carrier(), g);
        let matching: Vec<&Vec<usize>> =
            homs.iter().filter(|h| free.unit.iter().zip(&u).all(|(&ux, &v)| h[ux] == v)).collect();
        if matching.len() != 1 && unique.is_none() {
            unique = Some(Witness::new(
                "free.unique",
                &[("assignment", i), ("count", matching.len() as u64)],
            ));
        }
        if formula.is_none() {
            // f(m, w) glues m.u_x along w: the value =_{w_x} m.u_x at
            // every generator in the support.
            let mut table = Vec::with_capacity(free.bmset.carrier());
            'outer: for m in 0..sz {
                for w in 0..dn {
                    let d = &free.dists[w];
                    let mut found = None;
                    for z in 0..target.carrier() {
                        if d.omega
                            .iter()
                            .zip(&u)
                            .all(|(&b, &v)| b == 0 || te.eq(b, z, target.mact(m, v)))
                        {
                            found = Some(z);
                            break;
                        }
                    }
                    match found {
                        Some(z) => table.push(z),
                        None => {
                            formula = Some(Witness::new("free.formula", &[("assignment", i)]));
                            break 'outer;
                        }
                    }
                }
            }
            if formula.is_none()
                && !(table.len() == free.bmset.carrier()
                    && matching.len() == 1
                    && *matching[0] == table)
            {
                formula = Some(Witness::new("free.formula", &[("assignment", i)]));
            }
        }
    }
    let mut cert = Certificate::new();
    cert.push(Check::of("free.unique", space, unique));
    cert.push(Check::of("free.formula", space, formula));
    Ok(cert)
}

// ---------------------------------------------------------------------
// Function spaces

/// The function space: homs out of `M x Y`, with the monoid acting by
/// translation of the monoid slot and the case-split rebuilt from
/// star-translated pointwise relations.
#[derive(Debug, Clone)]
pub struct BmExponential {
    pub bmset: BMSet,
    pub homs: Vec<Vec<usize>>,
}

impl BmExponential {
    /// Carrier size of the argument object (hom tables are indexed
    /// `m * |Y| + y`).
    pub fn y_carrier(&self) -> usize {
        self.homs[0].len() / self.bmset.pair.monoid.size
    }
}

/// Function space of two carriers over one pair: carrier the homs
/// `M x Y -> Z`, monoid action `(m . f)(n, y) = f(nm, y)`, relations
/// `f =_b g` iff `f(m, y) =_{m*b} g(m, y)` everywhere, case-split by
/// gluing those relations.
pub fn bm_exponential(y: &BMSet, z: &BMSet, limits: &Limits) -> Result<BmExponential> {
    if y.pair != z.pair {
        return Err(Error::input("function space needs a shared matched pair"));
    }
    let pair = &y.pair;
    let my = bm_product(&m_bmset(pair, limits)?, y, limits)?;
    let homs = enumerate_bm_homs(&my, z, limits)?;
    let yc = y.carrier();
    let ze = eqs_from_action(&z.bset);
    let rows: Vec<Vec<usize>> = pair
        .algebra
        .elements()
        .map(|b| {
            let keys: Vec<Vec<usize>> = homs
                .iter()
                .map(|f| {
                    f.iter().enumerate().map(|(u, &v)| ze.row(pair.star(u / yc, b))[v]).collect()
                })
                .collect();
            let mut ids: HashMap<&[usize], usize> = HashMap::new();
            keys.iter()
                .map(|k| {
                    let next = ids.len();
                    *ids.entry(k.as_slice()).or_insert(next)
                })
                .collect()
        })
        .collect();
    let fam = EqFamily::from_rows(pair.algebra, homs.len(), rows)?;
    let bset = match action_from_eqs(&fam, limits) {
        Ok(bset) => bset,
        Err(e @ Error::Capacity { .. }) => return Err(e),
        Err(e) => {
            return Err(Error::Invariant(format!(
                "function-space relations do not glue to an action: {e}"
            )))
        }
    };
    let sz = pair.monoid.size;
    let mut table = Vec::with_capacity(sz * homs.len());
    for m in 0..sz {
        for f in &homs {
            let translated: Vec<usize> =
                (0..f.len()).map(|u| f[pair.monoid.mul(u / yc, m) * yc + u % yc]).collect();
            let fi = homs
                .binary_search(&translated)
                .map_err(|_| Error::Invariant("monoid translate of a hom is not a hom".into()))?;
            table.push(fi);
        }
    }
    let maction = MAction::new(pair.monoid.clone(), homs.len(), table)?;
    let bmset = validate_bmset(pair, bset, maction, limits)?;
    Ok(BmExponential { bmset, homs })
}

/// `ev(f, y) = f(1, y)`.
pub fn bm_ev(exp: &BmExponential, f: usize, y: usize) -> usize {
    let yc = exp.y_carrier();
    exp.homs[f][exp.bmset.pair.monoid.identity * yc + y]
}

/// Currying: a hom out of `X x Y` (indexed `xi * |Y| + yi`) becomes the
/// map sending `x` to the hom `(m, y) -> f(m.x, y)`.
pub fn bm_transpose(exp: &BmExponential, x: &BMSet, f: &[usize]) -> Result<Vec<usize>> {
    let yc = exp.y_carrier();
    if f.len() != x.carrier() * yc {
        return Err(Error::input("table shape does not match the product carrier"));
    }
    let sz = exp.bmset.pair.monoid.size;
    (0..x.carrier())
        .map(|u| {
            let bar: Vec<usize> =
                (0..sz * yc).map(|p| f[x.mact(p / yc, u) * yc + p % yc]).collect();
            exp.homs
                .binary_search(&bar)
                .map_err(|_| Error::input(format!("slice at x={u} is not a hom into the target")))
        })
        .collect()
}

/// The function-space property against one test object: evaluation is a
/// hom, every hom out of the product transposes to a hom, the triangle
/// commutes, the transpose is unique, and the rebuilt relations match
/// the pointwise star-translated characterization.
pub fn bm_exponential_certificate(
    x: &BMSet,
    y: &BMSet,
    z: &BMSet,
    exp: &BmExponential,
    limits: &Limits,
) -> Result<Certificate> {
    let ey = bm_product(&exp.bmset, y, limits)?;
    let yc = y.carrier();
    let ev_table: Vec<usize> = (0..ey.carrier()).map(|p| bm_ev(exp, p / yc, p % yc)).collect();
    let mut cert = Certificate::new();
    let ev_instances = (ey.pair.algebra.size() * ey.carrier() * ey.carrier()
        + ey.pair.monoid.size * ey.carrier()) as u64;
    cert.push(Check::of(
        "exp.ev-hom",
        ev_instances,
        bm_hom_defect(&ey, z, &ev_table).map(|w| Witness { law: "exp.ev-hom".into(), ..w }),
    ));

    let xy = bm_product(x, y, limits)?;
    let fs = enumerate_bm_homs(&xy, z, limits)?;
    let xhoms = enumerate_bm_homs(x, &exp.bmset, limits)?;
    let mut transpose_hom = None;
    let mut triangle = None;
    let mut unique = None;
    for (fi, f) in fs.iter().enumerate() {
        let bar = match bm_transpose(exp, x, f) {
            Ok(bar) => bar,
            Err(_) => {
                if transpose_hom.is_none() {
                    transpose_hom = Some(Witness::new("exp.transpose-hom", &[("f", fi as u64)]));
                }
                continue;
            }
        };
        if transpose_hom.is_none() {
            if let Some(w) = bm_hom_defect(x, &exp.bmset, &bar) {
                transpose_hom = Some(Witness::new(
                    "exp.transpose-hom",
                    &[("f", fi as u64), ("b", w.get("b").unwrap_or(0))],
                ));
            }
        }
        if triangle.is_none() {
            let composite: Vec<usize> =
                (0..xy.carrier()).map(|p| bm_ev(exp, bar[p / yc], p % yc)).collect();
            if composite != *f {
                triangle = Some(Witness::new("exp.factors", &[("f", fi as u64)]));
            }
        }
        if unique.is_none() {
            let count = xhoms
                .iter()
                .filter(|h| (0..xy.carrier()).all(|p| bm_ev(exp, h[p / yc], p % yc) == f[p]))
                .count();
            if count != 1 {
                unique =
                    Some(Witness::new("exp.unique", &[("f", fi as u64), ("count", count as u64)]));
            }
        }
    }
    let total = fs.len() as u64;
    cert.push(Check::of("exp.transpose-hom", total, transpose_hom));
    cert.push(Check::of("exp.factors", total, triangle));
    cert.push(Check::of("exp.unique", total, unique));

    // f =_b g iff f(m, y) =_{m*b} g(m, y) at every argument
    let ze = eqs_from_action(&z.bset);
    let ee = eqs_from_action(&exp.bmset.bset);
    let hn = exp.homs.len() as u64;
    let bn = exp.bmset.pair.algebra.size() as u64;
    let myc = exp.homs[0].len();
    limits.check_naive(bn * hn * hn * myc as u64)?;
    cert.sweep("exp.relations", bn * hn * hn, |i| {
        let b = (i / (hn * hn)) as Elem;
        let fi = ((i / hn) % hn) as usize;
        let gi = (i % hn) as usize;
        let pointwise = (0..myc)
            .all(|u| ze.eq(exp.bmset.pair.star(u / yc, b), exp.homs[fi][u], exp.homs[gi][u]));
        (ee.eq(b, fi, gi) != pointwise).then(|| {
            Witness::new("exp.relations", &[("b", b as u64), ("f", fi as u64), ("g", gi as u64)])
        })
    });
    Ok(cert)
}

// ---------------------------------------------------------------------
// Extraction from endofunctions

/// The matched pair of an `points`-element set: all endofunctions under
/// diagrammatic composition, all subsets with the points as atoms, star
/// by preimage, case-split by pointwise selection.
pub fn extract_from_endos(points: usize, limits: &Limits) -> Result<MatchedPair> {
    if points < 2 {
        return Err(Error::input(
            "extraction needs at least two points; fewer make the subset algebra degenerate",
        ));
    }
    if points > 4 {
        return Err(Error::input("extraction is tabulated for at most four points"));
    }
    limits.check_atoms(points as u32)?;
    let (monoid, funcs) = endo_monoid(points);
    limits.check_monoid(monoid.size)?;
    let alg = BooleanAlgebra::new(points as u32)?;
    let sz = monoid.size;
    let mut action = Vec::with_capacity(alg.size() * sz * sz);
    for b in alg.elements() {
        for m in &funcs {
            for n in &funcs {
                let mixed: Vec<usize> = (0..points)
                    .map(|x| if b & alg.atom(x as u32) != 0 { m[x] } else { n[x] })
                    .collect();
                action.push(encode_endo(&mixed, points));
            }
        }
    }
    let bset_on_m = validate_bset(alg, sz, action, limits)?;
    let mut star = Vec::with_capacity(sz * alg.size());
    for m in &funcs {
        for b in alg.elements() {
            let mut pre: Elem = 0;
            for (x, &mx) in m.iter().enumerate() {
                if b & alg.atom(mx as u32) != 0 {
                    pre |= alg.atom(x as u32);
                }
            }
            star.push(pre as usize);
        }
    }
    let m_on_b = MAction::new(monoid.clone(), alg.size(), star)?;
    let pair = validate_matched_pair(alg, monoid, bset_on_m, m_on_b, limits)?;
    match endo_coverage_certificate(points, limits) {
        Ok(cert) => {
            cert.require()?;
        }
        Err(Error::Capacity { .. }) => {}
        Err(e) => return Err(e),
    }
    Ok(pair)
}

/// Covered subset families of the subset algebra: a family is covered
/// when some assignment of points to members makes every member exactly
/// its own preimage.  Certifies that the covered families are exactly
/// those whose nonzero members partition the whole set.
pub fn endo_coverage_certificate(points: usize, limits: &Limits) -> Result<Certificate> {
    let alg = BooleanAlgebra::new(points as u32)?;
    let families = 1u64 << alg.size();
    let worst = (alg.size() as u64).saturating_pow(points as u32);
    limits.check_naive(families.saturating_mul(worst))?;
    let mut cert = Certificate::new();
    cert.sweep("endos.coverage", families, |code| {
        let members: Vec<Elem> =
            alg.elements().filter(|&b| code & (1u64 << b as u64) != 0).collect();
        let covered = !members.is_empty() && {
            let total = (members.len() as u64).pow(points as u32);
            (0..total).any(|i| {
                let assign = exec::digits(i, members.len(), points);
                members.iter().all(|&c| {
                    let pre = (0..points)
                        .filter(|&x| members[assign[x]] == c)
                        .fold(0 as Elem, |acc, x| acc | alg.atom(x as u32));
                    pre == c
                })
            })
        };
        let nonzero: Vec<Elem> = members.iter().copied().filter(|&b| b != 0).collect();
        let disjoint = nonzero
            .iter()
            .enumerate()
            .all(|(i, &b)| nonzero.iter().skip(i + 1).all(|&c| alg.meet(b, c) == alg.zero()));
        let joined = nonzero.iter().fold(alg.zero(), |acc, &b| alg.join(acc, b));
        let partitions = !nonzero.is_empty() && disjoint && joined == alg.one();
        (covered != partitions).then(|| Witness::new("endos.coverage", &[("family", code)]))
    });
    Ok(cert)
}

// ---------------------------------------------------------------------
// Operation-level view

/// A matched pair presented at operation level: the distributions over
/// the algebra stand in for the operations fixed by star, acted on
/// slotwise by the monoid and collapsed against monoid tuples by gluing
/// along their partitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchedTheoryData {
    pub pair: MatchedPair,
}

impl MatchedTheoryData {
    /// `m * w`, slotwise star.
    pub fn mstar(&self, m: usize, w: &Distribution) -> Distribution {
        Distribution { omega: w.omega.iter().map(|&b| self.pair.star(m, b)).collect() }
    }

    /// `w |> ns`: the unique monoid element agreeing with `ns[i]` on
    /// `w[i]`, glued along the partition of the support.
    pub fn rtri(&self, w: &Distribution, ns: &[usize]) -> Result<usize> {
        if ns.len() != w.len() {
            return Err(Error::input(format!("{} arguments for {} slots", ns.len(), w.len())));
        }
        let mut pairs: Vec<(Elem, usize)> =
            w.omega.iter().zip(ns).filter(|(&b, _)| b != 0).map(|(&b, &n)| (b, n)).collect();
        // Partitions normalize sorted, so sort values along with parts.
        pairs.sort();
        let parts: Vec<Elem> = pairs.iter().map(|&(b, _)| b).collect();
        let assign: Vec<usize> = pairs.iter().map(|&(_, n)| n).collect();
        let p = Partition::new(&self.pair.algebra, self.pair.algebra.one(), &parts)?;
        glue(&self.pair.bset_on_m, &p, &assign)
    }

    /// All distributions at one arity.
    pub fn dists(&self, arity: usize, limits: &Limits) -> Result<Vec<Distribution>> {
        enumerate_distributions(&self.pair.algebra, arity, limits)
    }
}

/// The operation-level laws of a pair, swept over all distributions up
/// to `bound` slots and all monoid tuples.  Oversized arity
/// combinations are skipped; each check records what actually ran.
pub fn matched_theory_certificate(
    data: &MatchedTheoryData,
    bound: usize,
    limits: &Limits,
) -> Result<Certificate> {
    if bound == 0 {
        return Err(Error::input("arity bound must be positive"));
    }
    limits.check_arity(bound)?;
    let alg = data.pair.algebra;
    let sz = data.pair.monoid.size as u64;
    let identity = data.pair.monoid.identity;
    let mut lists = Vec::with_capacity(bound);
    for k in 1..=bound {
        lists.push(data.dists(k, limits)?);
    }
    let size = |k: usize| lists[k - 1].len() as u64;
    let budget = |space: Option<u64>| space.filter(|&s| s <= limits.max_naive);
    let mut cert = Certificate::new();

    // m * point mass = point mass
    for k in 1..=bound {
        let Some(space) = budget((k as u64).checked_mul(sz)) else { continue };
        cert.sweep("theory.star.proj", space, |i| {
            let slot = (i / sz) as usize;
            let m = (i % sz) as usize;
            let d = dirac(&alg, k, slot);
            (data.mstar(m, &d) != d).then(|| {
                Witness::new(
                    "theory.star.proj",
                    &[("k", k as u64), ("slot", slot as u64), ("m", m as u64)],
                )
            })
        });
    }
    // 1 * w = w
    for k in 1..=bound {
        let dk = &lists[k - 1];
        cert.sweep("theory.star.unit", size(k), |i| {
            let w = &dk[i as usize];
            (data.mstar(identity, w) != *w)
                .then(|| Witness::new("theory.star.unit", &[("k", k as u64), ("w", i)]))
        });
    }
    // m * (n * w) = (mn) * w
    for k in 1..=bound {
        let dk = &lists[k - 1];
        let Some(space) = budget(size(k).checked_mul(sz * sz)) else { continue };
        cert.sweep("theory.star.assoc", space, |i| {
            let w = &dk[(i / (sz * sz)) as usize];
            let m = ((i / sz) % sz) as usize;
            let n = (i % sz) as usize;
            (data.mstar(data.pair.monoid.mul(m, n), w) != data.mstar(m, &data.mstar(n, w))).then(
                || {
                    Witness::new(
                        "theory.star.assoc",
                        &[("k", k as u64), ("m", m as u64), ("n", n as u64)],
                    )
                },
            )
        });
    }
    // m * w(g) = (m * w)(m * g_i)
    for j in 1..=bound {
        for k in 1..=bound {
            let Some(inner) = size(k).checked_pow(j as u32) else { continue };
            let Some(space) = budget(size(j).checked_mul(inner).and_then(|s| s.checked_mul(sz)))
            else {
                continue;
            };
            let (dj, dk) = (&lists[j - 1], &lists[k - 1]);
            cert.sweep("theory.star.subst", space, |i| {
                let wi = (i / (inner * sz)) as usize;
                let code = (i / sz) % inner;
                let m = (i % sz) as usize;
                let gammas: Vec<Distribution> =
                    exec::digits(code, dk.len(), j).into_iter().map(|d| dk[d].clone()).collect();
                let pushed: Vec<Distribution> = gammas.iter().map(|gm| data.mstar(m, gm)).collect();
                let lhs = dist_substitute(&alg, &dj[wi], &gammas).map(|w| data.mstar(m, &w));
                let rhs = dist_substitute(&alg, &data.mstar(m, &dj[wi]), &pushed);
                match (lhs, rhs) {
                    (Ok(a), Ok(b)) if a == b => None,
                    _ => Some(Witness::new(
                        "theory.star.subst",
                        &[("j", j as u64), ("k", k as u64), ("w", wi as u64), ("m", m as u64)],
                    )),
                }
            });
        }
    }
    // point mass |> ns = ns[slot]
    for k in 1..=bound {
        let Some(tuples) = sz.checked_pow(k as u32) else { continue };
        let Some(space) = budget((k as u64).checked_mul(tuples)) else { continue };
        cert.sweep("theory.tri.proj", space, |i| {
            let slot = (i / tuples) as usize;
            let ns = exec::digits(i % tuples, sz as usize, k);
            match data.rtri(&dirac(&alg, k, slot), &ns) {
                Ok(v) if v == ns[slot] => None,
                _ => Some(Witness::new(
                    "theory.tri.proj",
                    &[("k", k as u64), ("slot", slot as u64), ("ns", i % tuples)],
                )),
            }
        });
    }
    // w(g) |> ns = w |> (g_i |> ns)
    for j in 1..=bound {
        for k in 1..=bound {
            let Some(inner) = size(k).checked_pow(j as u32) else { continue };
            let Some(tuples) = sz.checked_pow(k as u32) else { continue };
            let Some(space) =
                budget(size(j).checked_mul(inner).and_then(|s| s.checked_mul(tuples)))
            else {
                continue;
            };
            let (dj, dk) = (&lists[j - 1], &lists[k - 1]);
            cert.sweep("theory.tri.subst", space, |i| {
                let wi = (i / (inner * tuples)) as usize;
                let code = (i / tuples) % inner;
                let ns = exec::digits(i % tuples, sz as usize, k);
                let gammas: Vec<Distribution> =
                    exec::digits(code, dk.len(), j).into_iter().map(|d| dk[d].clone()).collect();
                let lhs = dist_substitute(&alg, &dj[wi], &gammas).and_then(|w| data.rtri(&w, &ns));
                let rhs = gammas
                    .iter()
                    .map(|gm| data.rtri(gm, &ns))
                    .collect::<Result<Vec<_>>>()
                    .and_then(|collapsed| data.rtri(&dj[wi], &collapsed));
                match (lhs, rhs) {
                    (Ok(a), Ok(b)) if a == b => None,
                    _ => Some(Witness::new(
                        "theory.tri.subst",
                        &[("j", j as u64), ("k", k as u64), ("w", wi as u64), ("ns", i % tuples)],
                    )),
                }
            });
        }
    }
    // (w |> ns) q = w |> (ns_i q)
    for k in 1..=bound {
        let Some(tuples) = sz.checked_pow(k as u32) else { continue };
        let Some(space) = budget(size(k).checked_mul(tuples).and_then(|s| s.checked_mul(sz)))
        else {
            continue;
        };
        let dk = &lists[k - 1];
        cert.sweep("theory.tri.right", space, |i| {
            let wi = (i / (tuples * sz)) as usize;
            let ns = exec::digits((i / sz) % tuples, sz as usize, k);
            let q = (i % sz) as usize;
            let lhs = data.rtri(&dk[wi], &ns).map(|v| data.pair.monoid.mul(v, q));
            let shifted: Vec<usize> = ns.iter().map(|&n| data.pair.monoid.mul(n, q)).collect();
            let rhs = data.rtri(&dk[wi], &shifted);
            match (lhs, rhs) {
                (Ok(a), Ok(b)) if a == b => None,
                _ => Some(Witness::new(
                    "theory.tri.right",
                    &[("k", k as u64), ("w", wi as u64), ("q", q as u64)],
                )),
            }
        });
    }
    // n (w |> ms) = (n * w) |> (n ms_i)
    for k in 1..=bound {
        let Some(tuples) = sz.checked_pow(k as u32) else { continue };
        let Some(space) = budget(size(k).checked_mul(tuples).and_then(|s| s.checked_mul(sz)))
        else {
            continue;
        };
        let dk = &lists[k - 1];
        cert.sweep("theory.tri.left", space, |i| {
            let wi = (i / (tuples * sz)) as usize;
            let ms = exec::digits((i / sz) % tuples, sz as usize, k);
            let n = (i % sz) as usize;
            let lhs = data.rtri(&dk[wi], &ms).map(|v| data.pair.monoid.mul(n, v));
            let shifted: Vec<usize> = ms.iter().map(|&m| data.pair.monoid.mul(n, m)).collect();
            let rhs = data.rtri(&data.mstar(n, &dk[wi]), &shifted);
            match (lhs, rhs) {
                (Ok(a), Ok(b)) if a == b => None,
                _ => Some(Witness::new(
                    "theory.tri.left",
                    &[("k", k as u64), ("w", wi as u64), ("n", n as u64)],
                )),
            }
        });
    }
    // (w |> ms) * g = w(ms_j * g)
    for j in 1..=bound {
        for k in 1..=bound {
            let Some(tuples) = sz.checked_pow(j as u32) else { continue };
            let Some(space) =
                budget(size(j).checked_mul(tuples).and_then(|s| s.checked_mul(size(k))))
            else {
                continue;
            };
            let (dj, dk) = (&lists[j - 1], &lists[k - 1]);
            let gk = size(k);
            cert.sweep("theory.tri.star", space, |i| {
                let wi = (i / (tuples * gk)) as usize;
                let code = (i / gk) % tuples;
                let gi = (i % gk) as usize;
                let ms = exec::digits(code, sz as usize, j);
                let lhs = data.rtri(&dj[wi], &ms).map(|u| data.mstar(u, &dk[gi]));
                let pushed: Vec<Distribution> =
                    ms.iter().map(|&m| data.mstar(m, &dk[gi])).collect();
                let rhs = dist_substitute(&alg, &dj[wi], &pushed);
                match (lhs, rhs) {
                    (Ok(a), Ok(b)) if a == b => None,
                    _ => Some(Witness::new(
                        "theory.tri.star",
                        &[("j", j as u64), ("k", k as u64), ("w", wi as u64), ("g", gi as u64)],
                    )),
                }
            });
        }
    }
    Ok(cert)
}

/// Extract the matched pair carried by an operation theory: arity-1
/// operations form the monoid under substitution, the binary
/// hyperaffine fragment is the algebra, case-split is substitution
/// into the naming operation, and star is the hyperaffine factor left
/// over when a unary is pushed past a case-split.
pub fn theta_from_clone<T: crate::clone::Theory>(th: &T, limits: &Limits) -> Result<MatchedPair> {
    if th.arity_bound() < 2 {
        return Err(Error::input("pair extraction needs binary operations"));
    }
    let ms = th.ops(1)?;
    limits.check_monoid(ms.len())?;
    let identity = ms
        .binary_search(&th.projection(1, 0)?)
        .map_err(|_| Error::Invariant("identity projection is not an arity-1 operation".into()))?;
    let mut table = Vec::with_capacity(ms.len() * ms.len());
    for m in &ms {
        for n in &ms {
            let mn = th.substitute(m, std::slice::from_ref(n))?;
            let i = ms.binary_search(&mn).map_err(|_| {
                Error::Invariant("arity-1 operations are not closed under substitution".into())
            })?;
            table.push(i);
        }
    }
    let monoid = Monoid::new(ms.len(), identity, table)?;
    let cb = crate::clone::boolean_from_clone(th, limits)?;
    let algebra = *cb.algebra();
    let bset_on_m = crate::clone::ops_bset(th, &cb, 1, limits)?;
    let mut star = Vec::with_capacity(ms.len() * algebra.size());
    for (mi, m) in ms.iter().enumerate() {
        for b in algebra.elements() {
            let composite = th.substitute(m, &[cb.op_of(b).clone()])?;
            let dec = crate::clone::decompose(th, &composite)?;
            if dec.unary != *m {
                return Err(Error::law("extract.star-unary", &[("m", mi as u64), ("b", b as u64)]));
            }
            star.push(cb.elem_of(&dec.hyperaffine)? as usize);
        }
    }
    let m_on_b = MAction::new(monoid.clone(), algebra.size(), star)?;
    validate_matched_pair(algebra, monoid, bset_on_m, m_on_b, limits)
}

/// A pair is recovered exactly from its own operation theory: check the
/// operation-level laws, build the bicrossed clone, and extract it
/// back.
pub fn theta_to_clone(
    pair: &MatchedPair,
    arity_bound: usize,
    limits: &Limits,
) -> Result<MatchedTheoryData> {
    let data = MatchedTheoryData { pair: pair.clone() };
    matched_theory_certificate(&data, arity_bound, limits)?.require()?;
    let bc = crate::clone::bicross::bicross_build(&data, arity_bound.max(2), limits)?;
    let back = theta_from_clone(&bc, limits)?;
    if back != data.pair {
        return Err(Error::Invariant(
            "extracting the bicrossed clone did not recover the pair".into(),
        ));
    }
    Ok(data)
}

// ---------------------------------------------------------------------
// Pair maps and the round-trip

/// First failure of `(phi, f)` as a pair map: `phi` must intertwine the
/// case-splits and `f` the stars.
pub fn pair_hom_defect(
    p1: &MatchedPair,
    p2: &MatchedPair,
    phi: &BoolHom,
    f: &[usize],
) -> Option<Witness> {
    for b in p1.algebra.elements() {
        for m in 0..p1.monoid.size {
            for n in 0..p1.monoid.size {
                if f[p1.cond(b, m, n)] != p2.cond(phi.apply(b), f[m], f[n]) {
                    return Some(Witness::new(
                        "pairhom.case",
                        &[("b", b as u64), ("m", m as u64), ("n", n as u64)],
                    ));
                }
            }
            if phi.apply(p1.star(m, b)) != p2.star(f[m], phi.apply(b)) {
                return Some(Witness::new("pairhom.star", &[("b", b as u64), ("m", m as u64)]));
            }
        }
    }
    None
}

/// All pair maps: Boolean homs paired with monoid homs intertwining
/// both actions.
pub fn enumerate_pair_homs(
    p1: &MatchedPair,
    p2: &MatchedPair,
    limits: &Limits,
) -> Result<Vec<(BoolHom, Vec<usize>)>> {
    let bhoms = enumerate_boolean_homs(&p1.algebra, &p2.algebra);
    let mhoms = enumerate_monoid_homs(&p1.monoid, &p2.monoid, limits)?;
    let mut out = Vec::new();
    for phi in &bhoms {
        for f in &mhoms {
            if pair_hom_defect(p1, p2, phi, f).is_none() {
                out.push((phi.clone(), f.clone()));
            }
        }
    }
    Ok(out)
}

/// The two phrasings of the pair-map laws agree: the equational version
/// and the relation-implication version accept the same candidates.
pub fn pair_hom_phrasings_certificate(
    p1: &MatchedPair,
    p2: &MatchedPair,
    limits: &Limits,
) -> Result<Certificate> {
    let bhoms = enumerate_boolean_homs(&p1.algebra, &p2.algebra);
    let mhoms = enumerate_monoid_homs(&p1.monoid, &p2.monoid, limits)?;
    let total = (bhoms.len() * mhoms.len()) as u64;
    limits.check_naive(
        total.saturating_mul((p1.algebra.size() * p1.monoid.size * p1.monoid.size) as u64),
    )?;
    let mut cert = Certificate::new();
    cert.sweep("pairhom.phrasings", total, |i| {
        let phi = &bhoms[(i as usize) / mhoms.len()];
        let f = &mhoms[(i as usize) % mhoms.len()];
        let by_equality = pair_hom_defect(p1, p2, phi, f).is_none();
        let by_relations = p1.algebra.elements().all(|b| {
            (0..p1.monoid.size).all(|m| {
                (0..p1.monoid.size).all(|n| !p1.meq(b, m, n) || p2.meq(phi.apply(b), f[m], f[n]))
                    && phi.apply(p1.star(m, b)) == p2.star(f[m], phi.apply(b))
            })
        });
        (by_equality != by_relations)
            .then(|| Witness::new("pairhom.phrasings", &[("candidate", i)]))
    });
    Ok(cert)
}

/// All pair isomorphisms, searched atom-map-first: only bijective
/// Boolean homs are paired with bijective monoid homs.
pub fn enumerate_pair_isos(
    p1: &MatchedPair,
    p2: &MatchedPair,
    limits: &Limits,
) -> Result<Vec<(Vec<Elem>, Vec<usize>)>> {
    if p1.algebra.atoms() != p2.algebra.atoms() || p1.monoid.size != p2.monoid.size {
        return Ok(Vec::new());
    }
    let bijective = |v: &[usize]| {
        let mut seen = v.to_vec();
        seen.sort_unstable();
        seen.dedup();
        seen.len() == v.len()
    };
    let bhoms: Vec<BoolHom> = enumerate_boolean_homs(&p1.algebra, &p2.algebra)
        .into_iter()
        .filter(|h| {
            h.atom_map()
                .map(|m| bijective(&m.iter().map(|&a| a as usize).collect::<Vec<_>>()))
                .unwrap_or(false)
        })
        .collect();
    let mhoms = enumerate_monoid_homs(&p1.monoid, &p2.monoid, limits)?;
    let mut out = Vec::new();
    for phi in &bhoms {
        for f in mhoms.iter().filter(|f| bijective(f)) {
            if pair_hom_defect(p1, p2, phi, f).is_none() {
                out.push((phi.table.clone(), f.clone()));
            }
        }
    }
    Ok(out)
}

/// A rebuilt pair with the isomorphisms found back to the original.
#[derive(Debug, Clone)]
pub struct RoundTrip {
    pub pair2: MatchedPair,
    /// Isomorphisms `(algebra element map, monoid element map)` from
    /// the original pair to the rebuilt one.
    pub isos: Vec<(Vec<Elem>, Vec<usize>)>,
    pub certificate: Certificate,
}

/// Rebuild a pair from the carriers it acts on: the monoid of
/// endomorphisms of the free one-generator carrier and the algebra of
/// its maps into the algebra carrier, with the case-split factored
/// through the two-generator free carrier as a copower.  Reports every
/// isomorphism back to the input.
pub fn roundtrip_matched_pair(pair: &MatchedPair, limits: &Limits) -> Result<RoundTrip> {
    let f1 = free_bmset(pair, 1, limits)?;
    let bas = b_bmset(pair, limits)?;
    let f1c = f1.bmset.carrier();
    let mut cert = Certificate::new();

    // Rebuilt monoid: endomorphisms under diagrammatic composition.
    let m_homs = enumerate_bm_homs(&f1.bmset, &f1.bmset, limits)?;
    limits.check_monoid(m_homs.len())?;
    let msz = m_homs.len();
    let identity = m_homs
        .binary_search(&(0..f1c).collect::<Vec<_>>())
        .map_err(|_| Error::Invariant("identity is not among the endomorphisms".into()))?;
    let mut table = Vec::with_capacity(msz * msz);
    for f in &m_homs {
        for g in &m_homs {
            let composite: Vec<usize> = (0..f1c).map(|v| g[f[v]]).collect();
            let idx = m_homs.binary_search(&composite).map_err(|_| {
                Error::Invariant("endomorphisms are not closed under composition".into())
            })?;
            table.push(idx);
        }
    }
    let monoid2 = Monoid::new(msz, identity, table)?;

    // Rebuilt algebra: maps into the algebra carrier under pointwise
    // operations, renormalized to its powerset form.
    let b_homs = enumerate_bm_homs(&f1.bmset, &bas, limits)?;
    let bsz = b_homs.len();
    let find_b = |t: &[usize]| -> Result<usize> {
        b_homs.binary_search(&t.to_vec()).map_err(|_| {
            Error::Invariant("pointwise image of algebra maps is not an algebra map".into())
        })
    };
    let mut meet_t = vec![0usize; bsz * bsz];
    let mut join_t = vec![0usize; bsz * bsz];
    let mut neg_t = vec![0usize; bsz];
    for (i, u) in b_homs.iter().enumerate() {
        let negated: Vec<usize> = u.iter().map(|&e| pair.algebra.neg(e as Elem) as usize).collect();
        neg_t[i] = find_b(&negated)?;
        for (j, v) in b_homs.iter().enumerate() {
            let met: Vec<usize> = u
                .iter()
                .zip(v)
                .map(|(&a, &b)| pair.algebra.meet(a as Elem, b as Elem) as usize)
                .collect();
            let joined: Vec<usize> = u
                .iter()
                .zip(v)
                .map(|(&a, &b)| pair.algebra.join(a as Elem, b as Elem) as usize)
                .collect();
            meet_t[i * bsz + j] = find_b(&met)?;
            join_t[i * bsz + j] = find_b(&joined)?;
        }
    }
    let zero2 = find_b(&vec![pair.algebra.zero() as usize; f1c])?;
    let one2 = find_b(&vec![pair.algebra.one() as usize; f1c])?;
    let form = powerset_form(
        bsz,
        zero2,
        one2,
        &|a, b| meet_t[a * bsz + b],
        &|a, b| join_t[a * bsz + b],
        &|a| neg_t[a],
    )?;
    let algebra2 = form.algebra;

    // Copower: the two-generator free carrier with coprojections
    // pairing each endomorphism with a point mass.
    let c2 = free_bmset(pair, 2, limits)?;
    let dn2 = c2.dists.len();
    let dirac_idx: Vec<usize> = (0..2)
        .map(|g| {
            c2.dists.binary_search(&dirac(&pair.algebra, 2, g)).map_err(|_| {
                Error::Invariant("point mass missing from the distribution list".into())
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let iotas: Vec<Vec<usize>> =
        (0..2).map(|g| (0..f1c).map(|m| m * dn2 + dirac_idx[g]).collect()).collect();
    for iota in &iotas {
        cert.push(Check::of(
            "roundtrip.coproj",
            (f1.bmset.pair.algebra.size() * f1c * f1c) as u64,
            bm_hom_defect(&f1.bmset, &c2.bmset, iota)
                .map(|w| Witness { law: "roundtrip.coproj".into(), ..w }),
        ));
    }

    // Copower property: restriction along the coprojections is a
    // bijection onto pairs of maps out of the one-generator carrier.
    let homs_c2_f1 = enumerate_bm_homs(&c2.bmset, &f1.bmset, limits)?;
    let homs_c2_b = enumerate_bm_homs(&c2.bmset, &bas, limits)?;
    let mut copair_f1: HashMap<(Vec<usize>, Vec<usize>), Vec<usize>> = HashMap::new();
    let mut copower = None;
    for h in &homs_c2_f1 {
        let r0: Vec<usize> = iotas[0].iter().map(|&u| h[u]).collect();
        let r1: Vec<usize> = iotas[1].iter().map(|&u| h[u]).collect();
        if copair_f1.insert((r0, r1), h.clone()).is_some() && copower.is_none() {
            copower = Some(Witness::new("roundtrip.copower", &[("duplicate", 0)]));
        }
    }
    if homs_c2_f1.len() != m_homs.len() * m_homs.len() && copower.is_none() {
        copower = Some(Witness::new(
            "roundtrip.copower",
            &[("homs", homs_c2_f1.len() as u64), ("pairs", (m_homs.len() * m_homs.len()) as u64)],
        ));
    }
    let mut seen_b: HashMap<(Vec<usize>, Vec<usize>), ()> = HashMap::new();
    for h in &homs_c2_b {
        let r0: Vec<usize> = iotas[0].iter().map(|&u| h[u]).collect();
        let r1: Vec<usize> = iotas[1].iter().map(|&u| h[u]).collect();
        if seen_b.insert((r0, r1), ()).is_some() && copower.is_none() {
            copower = Some(Witness::new("roundtrip.copower", &[("duplicate", 1)]));
        }
    }
    if homs_c2_b.len() != bsz * bsz && copower.is_none() {
        copower = Some(Witness::new(
            "roundtrip.copower",
            &[("homs", homs_c2_b.len() as u64), ("pairs", (bsz * bsz) as u64)],
        ));
    }
    cert.push(Check::of("roundtrip.copower", (homs_c2_f1.len() + homs_c2_b.len()) as u64, copower));

    // Distributivity: the product of the algebra carrier with the free
    // carrier is the copower, via (beta, x) -> (x, (beta, beta')).
    let prod = bm_product(&bas, &f1.bmset, limits)?;
    let mut delta = Vec::with_capacity(prod.carrier());
    for u in 0..prod.carrier() {
        let (beta, x) = (u / f1c, u % f1c);
        let d = Distribution { omega: vec![beta as Elem, pair.algebra.neg(beta as Elem)] };
        let wi = c2
            .dists
            .binary_search(&d)
            .map_err(|_| Error::Invariant("two-block distribution missing".into()))?;
        delta.push(x * dn2 + wi);
    }
    let mut distribute = bm_hom_defect(&prod, &c2.bmset, &delta)
        .map(|w| Witness { law: "roundtrip.distribute".into(), ..w });
    if distribute.is_none() {
        let mut seen = vec![false; c2.bmset.carrier()];
        for &v in &delta {
            seen[v] = true;
        }
        if prod.carrier() != c2.bmset.carrier() || !seen.iter().all(|&s| s) {
            distribute = Some(Witness::new("roundtrip.distribute", &[("bijective", 0)]));
        }
    }
    cert.push(Check::of("roundtrip.distribute", (prod.carrier() + 1) as u64, distribute));

    // Star on the rebuilt algebra: precomposition.
    let mut star2 = Vec::with_capacity(msz * algebra2.size());
    for mi in 0..msz {
        for e in algebra2.elements() {
            let bh = &b_homs[form.from_bits[e as usize]];
            let composite: Vec<usize> = (0..f1c).map(|v| bh[m_homs[mi][v]]).collect();
            star2.push(form.to_bits[find_b(&composite)?] as usize);
        }
    }
    let m_on_b2 = MAction::new(monoid2.clone(), algebra2.size(), star2)?;

    // Case-split on the rebuilt monoid: pair the two endomorphisms
    // through the copower and precompose with the distributivity map,
    // cross-checked against the pointwise mix.
    let mut action2 = Vec::with_capacity(algebra2.size() * msz * msz);
    let mut direct = None;
    for e in algebra2.elements() {
        let bh = &b_homs[form.from_bits[e as usize]];
        for mi in 0..msz {
            for ni in 0..msz {
                let key = (m_homs[mi].clone(), m_homs[ni].clone());
                let copair = copair_f1.get(&key).ok_or_else(|| {
                    Error::Invariant("copower property failed to provide a copairing".into())
                })?;
                let composite: Vec<usize> =
                    (0..f1c).map(|x| copair[delta[bh[x] * f1c + x]]).collect();
                if direct.is_none() {
                    let pointwise: Vec<usize> = (0..f1c)
                        .map(|x| f1.bmset.bact(bh[x] as Elem, m_homs[mi][x], m_homs[ni][x]))
                        .collect();
                    if pointwise != composite {
                        direct = Some(Witness::new(
                            "roundtrip.case-direct",
                            &[("b", e as u64), ("m", mi as u64), ("n", ni as u64)],
                        ));
                    }
                }
                let idx = m_homs.binary_search(&composite).map_err(|_| {
                    Error::Invariant(
                        "case-split of endomorphisms left the endomorphism monoid".into(),
                    )
                })?;
                action2.push(idx);
            }
        }
    }
    cert.push(Check::of("roundtrip.case-direct", (algebra2.size() * msz * msz) as u64, direct));
    let bset2 = validate_bset(algebra2, msz, action2, limits)?;
    let pair2 =
        MatchedPair { algebra: algebra2, monoid: monoid2, bset_on_m: bset2, m_on_b: m_on_b2 };
    cert.merge(matched_pair_certificate(&pair2, limits)?.scoped("roundtrip"));

    let isos = enumerate_pair_isos(pair, &pair2, limits)?;
    let cert = cert.require()?;
    if isos.is_empty() {
        return Err(Error::Invariant(format!(
            "no isomorphism found: rebuilt algebra has {} atoms and rebuilt monoid size {}",
            pair2.algebra.atoms(),
            pair2.monoid.size
        )));
    }
    let mut cert = cert;
    cert.push(Check::pass("roundtrip.iso", isos.len() as u64));
    Ok(RoundTrip { pair2, isos, certificate: cert })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mon::enumerate_mactions;

    fn limits() -> Limits {
        Limits::default()
    }

    fn extract2() -> MatchedPair {
        extract_from_endos(2, &limits()).unwrap()
    }

    #[test]
    fn trivial_pair_is_valid_for_any_monoid() {
        for m in [Monoid::trivial(), endo_monoid(2).0] {
            let p = trivial_pair(&m, &limits()).unwrap();
            assert!(matched_pair_certificate(&p, &limits()).unwrap().ok());
            assert_eq!(p.algebra.atoms(), 1);
        }
    }

    #[test]
    fn clone_round_trip_recovers_the_pair() {
        for pair in [extract2(), trivial_pair(&endo_monoid(2).0, &limits()).unwrap()] {
            let data = theta_to_clone(&pair, 2, &limits()).unwrap();
            assert_eq!(data.pair, pair);
        }
    }

    #[test]
    fn extraction_on_two_points_has_expected_tables() {
        let p = extract2();
        assert_eq!(p.monoid.size, 4);
        assert_eq!(p.algebra.size(), 4);
        for m in 0..4 {
            // preimage of the whole set is the whole set
            assert_eq!(p.star(m, p.algebra.one()), p.algebra.one());
            for b in p.algebra.elements() {
                assert_eq!(p.cond(b, m, m), m);
            }
        }
        for b in p.algebra.elements() {
            assert_eq!(p.star(p.monoid.identity, b), b);
        }
        // the constant-at-first-point map pulls a set back to all or nothing
        let funcs = endo_monoid(2).1;
        let const0 = funcs.iter().position(|f| f == &[0, 0]).unwrap();
        assert_eq!(p.star(const0, 0b01), p.algebra.one());
        assert_eq!(p.star(const0, 0b10), p.algebra.zero());
    }

    #[test]
    fn extraction_rejects_degenerate_and_oversized_point_counts() {
        assert!(extract_from_endos(0, &limits()).is_err());
        assert!(extract_from_endos(1, &limits()).is_err());
        assert!(extract_from_endos(5, &limits()).is_err());
    }

    #[test]
    fn coverage_matches_partitions_exactly() {
        for points in [2, 3] {
            let cert = endo_coverage_certificate(points, &limits()).unwrap();
            assert!(cert.ok());
            assert_eq!(cert.instances(), 1 << (1usize << points));
        }
    }

    #[test]
    fn right_translation_failure_is_named() {
        // Cyclic group of order four with the identity star: the only
        // compatible two-block split pairing is not translation-closed.
        let mut table = Vec::new();
        for i in 0..4usize {
            for j in 0..4usize {
                table.push((i + j) % 4);
            }
        }
        let monoid = Monoid::new(4, 0, table).unwrap();
        let alg = BooleanAlgebra::new(2).unwrap();
        let rows = vec![vec![0, 0, 0, 0], vec![0, 0, 1, 1], vec![0, 1, 0, 1], vec![0, 1, 2, 3]];
        let fam = EqFamily::from_rows(alg, 4, rows).unwrap();
        let bset = action_from_eqs(&fam, &limits()).unwrap();
        let star: Vec<usize> = (0..4).flat_map(|_| 0..alg.size()).collect();
        let m_on_b = MAction::new(monoid.clone(), alg.size(), star).unwrap();
        let p = MatchedPair { algebra: alg, monoid, bset_on_m: bset, m_on_b };
        let cert = matched_pair_certificate(&p, &limits()).unwrap();
        assert!(!cert.ok());
        let tags: Vec<&str> = cert.failures().iter().map(|c| c.tag.as_str()).collect();
        assert!(tags.contains(&"pair.right-translation"), "failing tags: {tags:?}");
        assert!(tags.iter().all(|t| !t.starts_with("pair.bset.")));
    }

    #[test]
    fn canonical_carriers_validate() {
        let p = extract2();
        terminal_bmset(&p, &limits()).unwrap();
        m_bmset(&p, &limits()).unwrap();
        b_bmset(&p, &limits()).unwrap();
    }

    #[test]
    fn hom_search_matches_naive_filter() {
        let p = extract2();
        let objs = [
            terminal_bmset(&p, &limits()).unwrap(),
            m_bmset(&p, &limits()).unwrap(),
            b_bmset(&p, &limits()).unwrap(),
        ];
        for x in &objs {
            for y in &objs {
                let fast = enumerate_bm_homs(x, y, &limits()).unwrap();
                let naive = naive_bm_homs(x, y, &limits()).unwrap();
                assert_eq!(fast, naive);
            }
        }
    }

    #[test]
    fn terminal_homs_are_fixed_points() {
        let p = extract2();
        let t = terminal_bmset(&p, &limits()).unwrap();
        let m = m_bmset(&p, &limits()).unwrap();
        let homs = enumerate_bm_homs(&t, &m, &limits()).unwrap();
        let fixed: Vec<usize> =
            (0..m.carrier()).filter(|&x| (0..p.monoid.size).all(|q| m.mact(q, x) == x)).collect();
        assert_eq!(homs.iter().map(|h| h[0]).collect::<Vec<_>>(), fixed);
        // on two points the fixed elements are the two constants
        assert_eq!(fixed.len(), 2);
    }

    #[test]
    fn monoid_carrier_homs_are_evaluation_at_identity() {
        let p = extract2();
        let m = m_bmset(&p, &limits()).unwrap();
        for y in [&m, &b_bmset(&p, &limits()).unwrap()] {
            let homs = enumerate_bm_homs(&m, y, &limits()).unwrap();
            assert_eq!(homs.len(), y.carrier());
            let mut images: Vec<usize> = homs.iter().map(|h| h[p.monoid.identity]).collect();
            images.sort_unstable();
            assert_eq!(images, (0..y.carrier()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn product_certificate_and_terminal_unit() {
        let p = extract2();
        let m = m_bmset(&p, &limits()).unwrap();
        let b = b_bmset(&p, &limits()).unwrap();
        let cert = bm_product_certificate(&m, &m, &b, &limits()).unwrap();
        assert!(cert.ok(), "failures: {:?}", cert.failures());
        let t = terminal_bmset(&p, &limits()).unwrap();
        let mt = bm_product(&m, &t, &limits()).unwrap();
        assert_eq!(mt.bset.action_table(), m.bset.action_table());
        assert_eq!(mt.maction.table, m.maction.table);
    }

    #[test]
    fn free_on_one_generator_is_the_monoid_carrier() {
        for p in [extract2(), trivial_pair(&endo_monoid(2).0, &limits()).unwrap()] {
            let f1 = free_bmset(&p, 1, &limits()).unwrap();
            let m = m_bmset(&p, &limits()).unwrap();
            assert_eq!(f1.bmset.carrier(), p.monoid.size);
            assert_eq!(f1.bmset.bset.action_table(), m.bset.action_table());
            assert_eq!(f1.bmset.maction.table, m.maction.table);
            assert_eq!(f1.unit, vec![p.monoid.identity]);
        }
    }

    #[test]
    fn free_carrier_size_and_freeness() {
        let p = extract2();
        let f2 = free_bmset(&p, 2, &limits()).unwrap();
        // |M| * generators^atoms
        assert_eq!(f2.bmset.carrier(), 4 * 4);
        for target in [m_bmset(&p, &limits()).unwrap(), b_bmset(&p, &limits()).unwrap()] {
            let cert = free_bmset_certificate(&f2, &target, &limits()).unwrap();
            assert!(cert.ok(), "failures: {:?}", cert.failures());
        }
    }

    #[test]
    fn exponential_certificates_on_two_points() {
        let p = extract2();
        let m = m_bmset(&p, &limits()).unwrap();
        let b = b_bmset(&p, &limits()).unwrap();
        let t = terminal_bmset(&p, &limits()).unwrap();
        let exp = bm_exponential(&m, &m, &limits()).unwrap();
        for x in [&t, &m, &b] {
            let cert = bm_exponential_certificate(x, &m, &m, &exp, &limits()).unwrap();
            assert!(cert.ok(), "failures: {:?}", cert.failures());
        }
        // terminal target: exactly one map
        let to_t = bm_exponential(&m, &t, &limits()).unwrap();
        assert_eq!(to_t.homs.len(), 1);
    }

    #[test]
    fn trivial_algebra_reduces_the_function_space_to_equivariant_maps() {
        let c2 = {
            let mut t = Vec::new();
            for i in 0..2usize {
                for j in 0..2usize {
                    t.push((i + j) % 2);
                }
            }
            Monoid::new(2, 0, t).unwrap()
        };
        let p = trivial_pair(&c2, &limits()).unwrap();
        let m = m_bmset(&p, &limits()).unwrap();
        let exp = bm_exponential(&m, &m, &limits()).unwrap();
        let my = bm_product(&m_bmset(&p, &limits()).unwrap(), &m, &limits()).unwrap();
        // oracle: plain equivariant maps, no case-split constraint
        let space = (m.carrier() as u64).pow(my.carrier() as u32);
        let mut plain = Vec::new();
        for i in 0..space {
            let f = exec::digits(i, m.carrier(), my.carrier());
            let ok = (0..p.monoid.size)
                .all(|q| (0..my.carrier()).all(|u| f[my.mact(q, u)] == m.mact(q, f[u])));
            if ok {
                plain.push(f);
            }
        }
        assert_eq!(exp.homs, plain);
    }

    #[test]
    fn theory_laws_hold_for_extraction() {
        let data = MatchedTheoryData { pair: extract2() };
        let cert = matched_theory_certificate(&data, 3, &limits()).unwrap();
        assert!(cert.ok(), "failures: {:?}", cert.failures());
        // spot checks: collapsing a point mass picks the slot, and the
        // identity fixes every distribution
        let d = dirac(&data.pair.algebra, 3, 1);
        assert_eq!(data.rtri(&d, &[2, 3, 1]).unwrap(), 3);
        for w in data.dists(2, &limits()).unwrap() {
            assert_eq!(data.mstar(data.pair.monoid.identity, &w), w);
        }
    }

    #[test]
    fn matched_pair_enumeration_is_exhaustive() {
        let c2 = {
            let mut t = Vec::new();
            for i in 0..2usize {
                for j in 0..2usize {
                    t.push((i + j) % 2);
                }
            }
            Monoid::new(2, 0, t).unwrap()
        };
        for (atoms, monoid) in [(1, Monoid::trivial()), (1, c2.clone()), (2, c2)] {
            let found = enumerate_matched_pairs(atoms, &monoid, &limits()).unwrap();
            assert!(!found.is_empty());
            // oracle: run over every monoid action table on the algebra
            // carrier instead of atom maps
            let alg = BooleanAlgebra::new(atoms).unwrap();
            let bsets = enumerate_bsets(&alg, monoid.size, &limits()).unwrap();
            let mut naive = Vec::new();
            for bset in &bsets {
                for a in enumerate_mactions(&monoid, alg.size(), &limits()).unwrap() {
                    let p = MatchedPair {
                        algebra: alg,
                        monoid: monoid.clone(),
                        bset_on_m: bset.clone(),
                        m_on_b: a,
                    };
                    if matched_pair_certificate(&p, &limits()).unwrap().ok() {
                        naive.push(p);
                    }
                }
            }
            assert_eq!(found.len(), naive.len());
            for p in &found {
                assert!(naive.contains(p));
            }
        }
    }

    #[test]
    fn pair_map_phrasings_agree_and_identity_is_an_iso() {
        let p = extract2();
        let cert = pair_hom_phrasings_certificate(&p, &p, &limits()).unwrap();
        assert!(cert.ok());
        let isos = enumerate_pair_isos(&p, &p, &limits()).unwrap();
        let id_alg: Vec<Elem> = p.algebra.elements().collect();
        let id_mon: Vec<usize> = (0..p.monoid.size).collect();
        assert!(isos.contains(&(id_alg, id_mon)));
    }

    #[test]
    fn roundtrip_recovers_the_trivial_pair() {
        let p = trivial_pair(&Monoid::trivial(), &limits()).unwrap();
        let rt = roundtrip_matched_pair(&p, &limits()).unwrap();
        assert!(rt.certificate.ok());
        assert_eq!(rt.pair2.algebra.atoms(), 1);
        assert_eq!(rt.pair2.monoid.size, 1);
        assert!(!rt.isos.is_empty());
    }

    #[test]
    fn roundtrip_recovers_the_two_point_extraction() {
        let p = extract2();
        let rt = roundtrip_matched_pair(&p, &limits()).unwrap();
        assert!(rt.certificate.ok(), "failures: {:?}", rt.certificate.failures());
        assert_eq!(rt.pair2.monoid.size, 4);
        assert_eq!(rt.pair2.algebra.atoms(), 2);
        assert!(!rt.isos.is_empty());
    }
}
