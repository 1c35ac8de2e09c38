//! Sets with a conditioned-disjunction action of a finite Boolean algebra.
//!
//! A structure here is a carrier with one binary operation `b(x, y)` per
//! algebra element, picking `x` "on b" and `y` "off b".  The module keeps
//! two interchangeable presentations: the action table itself and the
//! family of equivalence relations `x =_b y  iff  b(x, y) = y`, with
//! validated converters both ways.  On top of those sit partition gluing,
//! hom enumeration (with naive oracles), products, distributions and free
//! objects, and the exponential of two actions.

use std::collections::HashMap;

use crate::balg::{enumerate_partitions, BooleanAlgebra, Elem, Partition};
use crate::error::{Error, Result, Witness};
use crate::exec;
use crate::report::{Certificate, Check};
use crate::Limits;

// ---------------------------------------------------------------------
// Action tables

/// A finite carrier with a validated conditioned-disjunction action.
///
/// Only validating constructors hand these out, so holding a `BSet` is
/// proof the six axioms hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BSet {
    pub algebra: BooleanAlgebra,
    pub carrier: usize,
    action: Vec<usize>,
}

impl BSet {
    fn assemble(algebra: BooleanAlgebra, carrier: usize, action: Vec<usize>) -> Result<BSet> {
        if carrier == 0 {
            return Err(Error::input("carrier must be nonempty"));
        }
        let want = algebra.size() * carrier * carrier;
        if action.len() != want {
            return Err(Error::input(format!(
                "action table has {} entries, expected {want}",
                action.len()
            )));
        }
        if let Some(bad) = action.iter().position(|&v| v >= carrier) {
            return Err(Error::input(format!(
                "action entry {} at position {bad} outside carrier 0..{carrier}",
                action[bad]
            )));
        }
        Ok(BSet { algebra, carrier, action })
    }

    /// `b(x, y)`.
    pub fn act(&self, b: Elem, x: usize, y: usize) -> usize {
        self.action[(b as usize * self.carrier + x) * self.carrier + y]
    }

    /// `x =_b y`, the defining relation `b(x, y) = y`.
    pub fn eq(&self, b: Elem, x: usize, y: usize) -> bool {
        self.act(b, x, y) == y
    }

    pub fn action_table(&self) -> &[usize] {
        &self.action
    }
}

/// Check the six action axioms, one tagged sweep per axiom.
pub fn bset_certificate(x: &BSet, limits: &Limits) -> Result<Certificate> {
    let bn = x.algebra.size() as u64;
    let n = x.carrier as u64;
    limits.check_naive((bn * n * n * n).max(bn * bn * n * n))?;
    let mut cert = Certificate::new();
    cert.sweep("bset.idempotent", bn * n, |i| {
        let (b, u) = ((i / n) as Elem, (i % n) as usize);
        (x.act(b, u, u) != u)
            .then(|| Witness::new("bset.idempotent", &[("b", b as u64), ("x", u as u64)]))
    });
    cert.sweep("bset.unit", n * n, |i| {
        let (u, v) = ((i / n) as usize, (i % n) as usize);
        (x.act(x.algebra.one(), u, v) != u)
            .then(|| Witness::new("bset.unit", &[("x", u as u64), ("y", v as u64)]))
    });
    cert.sweep("bset.negation", bn * n * n, |i| {
        let b = (i / (n * n)) as Elem;
        let (u, v) = (((i / n) % n) as usize, (i % n) as usize);
        (x.act(x.algebra.neg(b), u, v) != x.act(b, v, u)).then(|| {
            Witness::new("bset.negation", &[("b", b as u64), ("x", u as u64), ("y", v as u64)])
        })
    });
    cert.sweep("bset.meet", bn * bn * n * n, |i| {
        let b = (i / (bn * n * n)) as Elem;
        let c = ((i / (n * n)) % bn) as Elem;
        let (u, v) = (((i / n) % n) as usize, (i % n) as usize);
        (x.act(x.algebra.meet(b, c), u, v) != x.act(b, x.act(c, u, v), v)).then(|| {
            Witness::new(
                "bset.meet",
                &[("b", b as u64), ("c", c as u64), ("x", u as u64), ("y", v as u64)],
            )
        })
    });
    cert.sweep("bset.absorb-left", bn * n * n * n, |i| {
        let b = (i / (n * n * n)) as Elem;
        let (u, v, w) = (((i / (n * n)) % n) as usize, ((i / n) % n) as usize, (i % n) as usize);
        (x.act(b, x.act(b, u, v), w) != x.act(b, u, w)).then(|| {
            Witness::new(
                "bset.absorb-left",
                &[("b", b as u64), ("x", u as u64), ("y", v as u64), ("z", w as u64)],
            )
        })
    });
    cert.sweep("bset.absorb-right", bn * n * n * n, |i| {
        let b = (i / (n * n * n)) as Elem;
        let (u, v, w) = (((i / (n * n)) % n) as usize, ((i / n) % n) as usize, (i % n) as usize);
        (x.act(b, u, x.act(b, v, w)) != x.act(b, u, w)).then(|| {
            Witness::new(
                "bset.absorb-right",
                &[("b", b as u64), ("x", u as u64), ("y", v as u64), ("z", w as u64)],
            )
        })
    });
    Ok(cert)
}

/// Validate an action table and wrap it; the error names the failed
/// axiom with its witness.
pub fn validate_bset(
    algebra: BooleanAlgebra,
    carrier: usize,
    action: Vec<usize>,
    limits: &Limits,
) -> Result<BSet> {
    let x = BSet::assemble(algebra, carrier, action)?;
    bset_certificate(&x, limits)?.require()?;
    Ok(x)
}

/// Re-evaluate a `bset.*` witness against a table; true means the
/// violation reproduces.
pub fn replay_bset(x: &BSet, w: &Witness) -> bool {
    let b = w.get("b").unwrap_or(0) as Elem;
    let c = w.get("c").unwrap_or(0) as Elem;
    let u = w.get("x").unwrap_or(0) as usize;
    let v = w.get("y").unwrap_or(0) as usize;
    let z = w.get("z").unwrap_or(0) as usize;
    if [b, c].iter().any(|&e| !x.algebra.contains(e)) || [u, v, z].iter().any(|&e| e >= x.carrier) {
        return false;
    }
    match w.law.as_str() {
        "bset.idempotent" => x.act(b, u, u) != u,
        "bset.unit" => x.act(x.algebra.one(), u, v) != u,
        "bset.negation" => x.act(x.algebra.neg(b), u, v) != x.act(b, v, u),
        "bset.meet" => x.act(x.algebra.meet(b, c), u, v) != x.act(b, x.act(c, u, v), v),
        "bset.absorb-left" => x.act(b, x.act(b, u, v), z) != x.act(b, u, z),
        "bset.absorb-right" => x.act(b, u, x.act(b, v, z)) != x.act(b, u, z),
        _ => false,
    }
}

/// The algebra acting on its own carrier by conditioned disjunction.
pub fn conditioned_bset(alg: &BooleanAlgebra, limits: &Limits) -> Result<BSet> {
    // Reject oversized algebras before materialising the cubic table.
    let bn = alg.size() as u64;
    limits.check_naive(bn.saturating_pow(4))?;
    validate_bset(*alg, alg.size(), crate::balg::conditioned_disjunction_table(alg), limits)
}

/// The one-element action, terminal among actions of `alg`.  Trivially
/// valid, so built directly (validation sweeps would be wasteful for
/// large algebras).
pub fn terminal_bset(alg: &BooleanAlgebra) -> BSet {
    BSet { algebra: *alg, carrier: 1, action: vec![0; alg.size()] }
}

// ---------------------------------------------------------------------
// Equivalence-relation presentation

/// One equivalence relation per algebra element, stored as class-id rows
/// in first-occurrence order (so equal families compare equal).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqFamily {
    pub algebra: BooleanAlgebra,
    pub carrier: usize,
    rel: Vec<Vec<usize>>,
}

fn normalize_row(row: &[usize]) -> Vec<usize> {
    let mut ids: HashMap<usize, usize> = HashMap::new();
    row.iter()
        .map(|&v| {
            let next = ids.len();
            *ids.entry(v).or_insert(next)
        })
        .collect()
}

impl EqFamily {
    /// Wrap class-id rows, one per algebra element in element order.
    /// Rows are normalized; any id vector describes an equivalence, so
    /// the only structural demands are the shape ones.
    pub fn from_rows(
        algebra: BooleanAlgebra,
        carrier: usize,
        rows: Vec<Vec<usize>>,
    ) -> Result<EqFamily> {
        if carrier == 0 {
            return Err(Error::input("carrier must be nonempty"));
        }
        if rows.len() != algebra.size() {
            return Err(Error::input(format!(
                "expected one relation per algebra element ({}), got {}",
                algebra.size(),
                rows.len()
            )));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != carrier) {
            return Err(Error::input(format!(
                "relation {bad} covers {} elements, carrier is {carrier}",
                rows[bad].len()
            )));
        }
        let rel = rows.iter().map(|r| normalize_row(r)).collect();
        Ok(EqFamily { algebra, carrier, rel })
    }

    /// `x =_b y`.
    pub fn eq(&self, b: Elem, x: usize, y: usize) -> bool {
        self.rel[b as usize][x] == self.rel[b as usize][y]
    }

    pub fn row(&self, b: Elem) -> &[usize] {
        &self.rel[b as usize]
    }

    /// Number of classes of `=_b`.
    pub fn classes(&self, b: Elem) -> usize {
        self.rel[b as usize].iter().max().map_or(0, |m| m + 1)
    }
}

/// Read the relations off an action table.  Valid for any `BSet` by
/// construction, hence no failure mode.
pub fn eqs_from_action(x: &BSet) -> EqFamily {
    let rel = x
        .algebra
        .elements()
        .map(|b| {
            let mut row = vec![usize::MAX; x.carrier];
            let mut next = 0;
            for u in 0..x.carrier {
                if row[u] != usize::MAX {
                    continue;
                }
                row[u] = next;
                for (v, rv) in row.iter_mut().enumerate().skip(u + 1) {
                    if *rv == usize::MAX && x.eq(b, u, v) {
                        *rv = next;
                    }
                }
                next += 1;
            }
            row
        })
        .collect();
    EqFamily { algebra: x.algebra, carrier: x.carrier, rel }
}

/// Check the four conditions presenting an action as relations:
/// downward closure, discreteness at 1 / totality at 0, the join rule,
/// and existence-uniqueness of the two-part glue.
pub fn eqfamily_certificate(e: &EqFamily, limits: &Limits) -> Result<Certificate> {
    let bn = e.algebra.size() as u64;
    let n = e.carrier as u64;
    limits.check_naive((bn * bn * n * n).max(bn * n * n * n))?;
    let mut cert = Certificate::new();
    cert.sweep("eqs.one-discrete", n * n, |i| {
        let (x, y) = ((i / n) as usize, (i % n) as usize);
        (x != y && e.eq(e.algebra.one(), x, y))
            .then(|| Witness::new("eqs.one-discrete", &[("x", x as u64), ("y", y as u64)]))
    });
    cert.sweep("eqs.zero-total", n * n, |i| {
        let (x, y) = ((i / n) as usize, (i % n) as usize);
        (!e.eq(e.algebra.zero(), x, y))
            .then(|| Witness::new("eqs.zero-total", &[("x", x as u64), ("y", y as u64)]))
    });
    cert.sweep("eqs.downward", bn * bn * n * n, |i| {
        let b = (i / (bn * n * n)) as Elem;
        let c = ((i / (n * n)) % bn) as Elem;
        let (x, y) = (((i / n) % n) as usize, (i % n) as usize);
        (e.algebra.leq(c, b) && e.eq(b, x, y) && !e.eq(c, x, y)).then(|| {
            Witness::new(
                "eqs.downward",
                &[("b", b as u64), ("c", c as u64), ("x", x as u64), ("y", y as u64)],
            )
        })
    });
    cert.sweep("eqs.join", bn * bn * n * n, |i| {
        let b = (i / (bn * n * n)) as Elem;
        let c = ((i / (n * n)) % bn) as Elem;
        let (x, y) = (((i / n) % n) as usize, (i % n) as usize);
        (e.eq(b, x, y) && e.eq(c, x, y) && !e.eq(e.algebra.join(b, c), x, y)).then(|| {
            Witness::new(
                "eqs.join",
                &[("b", b as u64), ("c", c as u64), ("x", x as u64), ("y", y as u64)],
            )
        })
    });
    cert.sweep("eqs.glue", bn * n * n, |i| {
        let b = (i / (n * n)) as Elem;
        let (x, y) = (((i / n) % n) as usize, (i % n) as usize);
        let b1 = e.algebra.neg(b);
        let count = (0..e.carrier).filter(|&z| e.eq(b, z, x) && e.eq(b1, z, y)).count();
        (count != 1).then(|| {
            Witness::new(
                "eqs.glue",
                &[("b", b as u64), ("x", x as u64), ("y", y as u64), ("count", count as u64)],
            )
        })
    });
    Ok(cert)
}

/// The alternative characterisation: downward closure plus a unique
/// glue along every partition of the top element.  Kept separate from
/// `eqfamily_certificate` so the two routes can be compared.
pub fn eqfamily_glue_certificate(e: &EqFamily, limits: &Limits) -> Result<Certificate> {
    let bn = e.algebra.size() as u64;
    let n = e.carrier as u64;
    if e.algebra.atoms() > 8 {
        return Err(Error::Capacity {
            what: "atoms for partition-glue validation".into(),
            requested: e.algebra.atoms() as u64,
            limit: 8,
        });
    }
    let partitions = enumerate_partitions(&e.algebra, e.algebra.one());
    let mut space = 0u64;
    for p in &partitions {
        space = space.saturating_add(n.saturating_pow(p.parts.len() as u32));
    }
    limits.check_naive((bn * bn * n * n).max(space.saturating_mul(n)))?;

    let mut cert = Certificate::new();
    cert.sweep("eqs.downward", bn * bn * n * n, |i| {
        let b = (i / (bn * n * n)) as Elem;
        let c = ((i / (n * n)) % bn) as Elem;
        let (x, y) = (((i / n) % n) as usize, (i % n) as usize);
        (e.algebra.leq(c, b) && e.eq(b, x, y) && !e.eq(c, x, y)).then(|| {
            Witness::new(
                "eqs.downward",
                &[("b", b as u64), ("c", c as u64), ("x", x as u64), ("y", y as u64)],
            )
        })
    });
    let mut witness = None;
    let mut instances = 0u64;
    for (pi, p) in partitions.iter().enumerate() {
        let cells = n.pow(p.parts.len() as u32);
        instances += cells;
        if witness.is_some() {
            continue;
        }
        witness = exec::find_first(cells, |i| {
            let assign = exec::digits(i, e.carrier, p.parts.len());
            let count = (0..e.carrier)
                .filter(|&z| p.parts.iter().zip(&assign).all(|(&b, &x)| e.eq(b, z, x)))
                .count();
            (count != 1).then(|| {
                Witness::new(
                    "eqs.partition-glue",
                    &[("partition", pi as u64), ("assignment", i), ("count", count as u64)],
                )
            })
        });
    }
    cert.push(Check::of("eqs.partition-glue", instances, witness));
    Ok(cert)
}

/// Verdicts of the two relation-family characterisations side by side.
/// They are claimed to be equivalent; `agree` records whether the
/// workbench could confirm that on this instance.
#[derive(Debug, Clone)]
pub struct EqRoutes {
    pub axioms: Certificate,
    pub glue: Certificate,
    pub agree: bool,
}

pub fn eq_routes_agree(e: &EqFamily, limits: &Limits) -> Result<EqRoutes> {
    let axioms = eqfamily_certificate(e, limits)?;
    let glue = eqfamily_glue_certificate(e, limits)?;
    let agree = axioms.ok() == glue.ok();
    Ok(EqRoutes { axioms, glue, agree })
}

/// Rebuild the action: `b(x, y)` is the unique element agreeing with
/// `x` on `b` and with `y` on `b'`.
pub fn action_from_eqs(e: &EqFamily, limits: &Limits) -> Result<BSet> {
    eqfamily_certificate(e, limits)?.require()?;
    let n = e.carrier;
    let mut action = Vec::with_capacity(e.algebra.size() * n * n);
    for b in e.algebra.elements() {
        let b1 = e.algebra.neg(b);
        for x in 0..n {
            for y in 0..n {
                let mut found = None;
                for z in 0..n {
                    if e.eq(b, z, x) && e.eq(b1, z, y) {
                        if found.is_some() {
                            return Err(Error::Invariant(format!(
                                "glue not unique at b={b}, x={x}, y={y} after validation"
                            )));
                        }
                        found = Some(z);
                    }
                }
                match found {
                    Some(z) => action.push(z),
                    None => {
                        return Err(Error::Invariant(format!(
                            "glue missing at b={b}, x={x}, y={y} after validation"
                        )))
                    }
                }
            }
        }
    }
    let x = BSet::assemble(e.algebra, n, action)?;
    match bset_certificate(&x, limits)?.require() {
        Ok(_) => Ok(x),
        Err(err) => Err(Error::Invariant(format!(
            "rebuilt action fails its axioms though the relations validated: {err}"
        ))),
    }
}

// ---------------------------------------------------------------------
// Partition gluing

/// The unique element agreeing with `assign[i]` below the i-th part of
/// `p`.  Existence and uniqueness are theorems for validated actions, so
/// failures surface as `Invariant`.
pub fn glue(x: &BSet, p: &Partition, assign: &[usize]) -> Result<usize> {
    if p.base != x.algebra.one() {
        return Err(Error::input("glue needs a partition of the top element"));
    }
    if assign.len() != p.parts.len() {
        return Err(Error::input(format!(
            "assignment covers {} parts, partition has {}",
            assign.len(),
            p.parts.len()
        )));
    }
    if let Some(&bad) = assign.iter().find(|&&v| v >= x.carrier) {
        return Err(Error::input(format!("assignment value {bad} outside carrier")));
    }
    let mut found = None;
    for z in 0..x.carrier {
        if p.parts.iter().zip(assign).all(|(&b, &v)| x.eq(b, z, v)) {
            if found.is_some() {
                return Err(Error::Invariant(format!("glue not unique along {:?}", p.parts)));
            }
            found = Some(z);
        }
    }
    let z =
        found.ok_or_else(|| Error::Invariant(format!("no element glues along {:?}", p.parts)))?;
    // The constant law is cheap enough to assert on every call.
    if assign.windows(2).all(|w| w[0] == w[1]) && z != assign[0] {
        return Err(Error::Invariant(format!(
            "glue of a constant assignment returned {z}, not {}",
            assign[0]
        )));
    }
    Ok(z)
}

/// Sweep the gluing laws over every partition of the top element:
/// unique existence, the constant law, the idempotence law, and the
/// restriction law.
pub fn glue_laws_certificate(x: &BSet, limits: &Limits) -> Result<Certificate> {
    if x.algebra.atoms() > 8 {
        return Err(Error::Capacity {
            what: "atoms for glue-law sweep".into(),
            requested: x.algebra.atoms() as u64,
            limit: 8,
        });
    }
    let n = x.carrier as u64;
    let partitions = enumerate_partitions(&x.algebra, x.algebra.one());
    let mut budget = 0u64;
    for p in &partitions {
        budget = budget.saturating_add(n.saturating_pow(2 * p.parts.len() as u32));
    }
    limits.check_naive(budget.saturating_mul(n))?;

    // One accumulated check per law, scanning partitions in order and
    // keeping the first witness.
    let mut unique = None;
    let mut constant = None;
    let mut idempotent = None;
    let mut restrict = None;
    let (mut n_unique, mut n_constant, mut n_idempotent, mut n_restrict) = (0u64, 0u64, 0u64, 0u64);
    for (pi, p) in partitions.iter().enumerate() {
        let len = p.parts.len();
        let cells = n.pow(len as u32);
        let glue_at = |assign: &[usize]| -> Option<usize> {
            let mut found = None;
            for z in 0..x.carrier {
                if p.parts.iter().zip(assign).all(|(&b, &v)| x.eq(b, z, v)) {
                    if found.is_some() {
                        return None;
                    }
                    found = Some(z);
                }
            }
            found
        };

        n_unique += cells;
        if unique.is_none() {
            unique = exec::find_first(cells, |i| {
                let assign = exec::digits(i, x.carrier, len);
                let count = (0..x.carrier)
                    .filter(|&z| p.parts.iter().zip(&assign).all(|(&b, &v)| x.eq(b, z, v)))
                    .count();
                (count != 1).then(|| {
                    Witness::new(
                        "glue.unique",
                        &[("partition", pi as u64), ("assignment", i), ("count", count as u64)],
                    )
                })
            });
        }
        n_constant += n;
        if constant.is_none() {
            constant = exec::find_first(n, |v| {
                let assign = vec![v as usize; len];
                (glue_at(&assign) != Some(v as usize))
                    .then(|| Witness::new("glue.constant", &[("partition", pi as u64), ("x", v)]))
            });
        }
        n_idempotent += cells * cells;
        if idempotent.is_none() {
            idempotent = exec::find_first(cells * cells, |i| {
                let xs = exec::digits(i / cells, x.carrier, len);
                let ys = exec::digits(i % cells, x.carrier, len);
                let mixed: Vec<usize> =
                    p.parts.iter().enumerate().map(|(j, &b)| x.act(b, xs[j], ys[j])).collect();
                (glue_at(&mixed) != glue_at(&xs)).then(|| {
                    Witness::new(
                        "glue.idempotent",
                        &[("partition", pi as u64), ("left", i / cells), ("right", i % cells)],
                    )
                })
            });
        }
        n_restrict += cells * len as u64;
        if restrict.is_none() {
            restrict = exec::find_first(cells, |i| {
                let assign = exec::digits(i, x.carrier, len);
                let z = glue_at(&assign)?;
                p.parts.iter().zip(&assign).enumerate().find_map(|(j, (&b, &v))| {
                    (x.act(b, z, v) != v).then(|| {
                        Witness::new(
                            "glue.restrict",
                            &[("partition", pi as u64), ("assignment", i), ("part", j as u64)],
                        )
                    })
                })
            });
        }
    }
    let mut cert = Certificate::new();
    cert.push(Check::of("glue.unique", n_unique, unique));
    cert.push(Check::of("glue.constant", n_constant, constant));
    cert.push(Check::of("glue.idempotent", n_idempotent, idempotent));
    cert.push(Check::of("glue.restrict", n_restrict, restrict));
    Ok(cert)
}

// ---------------------------------------------------------------------
// Homomorphisms

/// First action-preservation failure of a carrier map, if any.
pub fn hom_defect(x: &BSet, y: &BSet, f: &[usize]) -> Option<Witness> {
    for b in x.algebra.elements() {
        for u in 0..x.carrier {
            for v in 0..x.carrier {
                if f[x.act(b, u, v)] != y.act(b, f[u], f[v]) {
                    return Some(Witness::new(
                        "hom.action",
                        &[("b", b as u64), ("x", u as u64), ("y", v as u64)],
                    ));
                }
            }
        }
    }
    None
}

/// First relation-preservation failure of a carrier map, if any.
pub fn relation_defect(xe: &EqFamily, ye: &EqFamily, f: &[usize]) -> Option<Witness> {
    for b in xe.algebra.elements() {
        for u in 0..xe.carrier {
            for v in 0..xe.carrier {
                if xe.eq(b, u, v) && !ye.eq(b, f[u], f[v]) {
                    return Some(Witness::new(
                        "hom.relations",
                        &[("b", b as u64), ("x", u as u64), ("y", v as u64)],
                    ));
                }
            }
        }
    }
    None
}

fn search_bset_homs(
    y_carrier: usize,
    xe: &EqFamily,
    ye: &EqFamily,
    atoms: &[Elem],
    f: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let u = f.len();
    if u == xe.carrier {
        out.push(f.clone());
        return;
    }
    'cand: for v in 0..y_carrier {
        for &a in atoms {
            for (up, &vp) in f.iter().enumerate() {
                if xe.eq(a, u, up) && !ye.eq(a, v, vp) {
                    continue 'cand;
                }
            }
        }
        f.push(v);
        search_bset_homs(y_carrier, xe, ye, atoms, f, out);
        f.pop();
    }
}

/// All maps preserving every relation `=_b`, in lexicographic order.
/// The search branches on atom relations only; every leaf is re-checked
/// against full action preservation.
pub fn enumerate_bset_homs(x: &BSet, y: &BSet, limits: &Limits) -> Result<Vec<Vec<usize>>> {
    if x.algebra != y.algebra {
        return Err(Error::input("hom search needs a shared algebra"));
    }
    let xe = eqs_from_action(x);
    let ye = eqs_from_action(y);
    // Exact hom count via the per-atom product decomposition, used only
    // as a capacity bound for the output.
    let mut predicted = 1u64;
    for a in 0..x.algebra.atoms() {
        let atom = x.algebra.atom(a);
        let (qx, qy) = (xe.classes(atom) as u64, ye.classes(atom) as u64);
        predicted = predicted.saturating_mul(qy.saturating_pow(qx as u32));
    }
    limits.check_naive(predicted)?;
    let atoms: Vec<Elem> = (0..x.algebra.atoms()).map(|a| x.algebra.atom(a)).collect();
    let mut out = Vec::new();
    search_bset_homs(y.carrier, &xe, &ye, &atoms, &mut Vec::new(), &mut out);
    for f in &out {
        if let Some(w) = hom_defect(x, y, f) {
            return Err(Error::Invariant(format!(
                "relation-preserving map is not action-preserving: {w}"
            )));
        }
    }
    Ok(out)
}

/// Oracle: filter every carrier map by relation preservation.
pub fn naive_bset_homs_by_relations(
    x: &BSet,
    y: &BSet,
    limits: &Limits,
) -> Result<Vec<Vec<usize>>> {
    if x.algebra != y.algebra {
        return Err(Error::input("hom search needs a shared algebra"));
    }
    let space = (y.carrier as u64)
        .checked_pow(x.carrier as u32)
        .ok_or_else(|| Error::input("hom table space overflows"))?;
    limits.check_naive(space)?;
    let (xe, ye) = (eqs_from_action(x), eqs_from_action(y));
    Ok(exec::collect_vec(space, |i| {
        let f = exec::digits(i, y.carrier, x.carrier);
        if relation_defect(&xe, &ye, &f).is_none() {
            vec![f]
        } else {
            vec![]
        }
    }))
}

/// Oracle: filter every carrier map by action preservation.
pub fn naive_bset_homs_by_action(x: &BSet, y: &BSet, limits: &Limits) -> Result<Vec<Vec<usize>>> {
    if x.algebra != y.algebra {
        return Err(Error::input("hom search needs a shared algebra"));
    }
    let space = (y.carrier as u64)
        .checked_pow(x.carrier as u32)
        .ok_or_else(|| Error::input("hom table space overflows"))?;
    limits.check_naive(space)?;
    Ok(exec::collect_vec(space, |i| {
        let f = exec::digits(i, y.carrier, x.carrier);
        if hom_defect(x, y, &f).is_none() {
            vec![f]
        } else {
            vec![]
        }
    }))
}

// ---------------------------------------------------------------------
// Products and enumeration

/// Componentwise action on pairs, indexed `xi * |Y| + yi`.
pub fn bset_product(x: &BSet, y: &BSet, limits: &Limits) -> Result<BSet> {
    if x.algebra != y.algebra {
        return Err(Error::input("product needs a shared algebra"));
    }
    let n = x.carrier * y.carrier;
    let mut action = Vec::with_capacity(x.algebra.size() * n * n);
    for b in x.algebra.elements() {
        for u in 0..n {
            for v in 0..n {
                let (ux, uy) = (u / y.carrier, u % y.carrier);
                let (vx, vy) = (v / y.carrier, v % y.carrier);
                action.push(x.act(b, ux, vx) * y.carrier + y.act(b, uy, vy));
            }
        }
    }
    validate_bset(x.algebra, n, action, limits)
}

/// All set partitions of `0..n` as normalized class-id rows, in
/// lexicographic (restricted-growth) order.
pub fn enumerate_set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn grow(s: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if s.len() == n {
            out.push(s.clone());
            return;
        }
        let max = s.iter().copied().max().map_or(0, |m| m + 1);
        for v in 0..=max.min(s.len()) {
            s.push(v);
            grow(s, n, out);
            s.pop();
        }
    }
    let mut out = Vec::new();
    grow(&mut Vec::new(), n, &mut out);
    out
}

/// Every action structure on the given carrier: one per tuple of atom
/// relations with trivial intersection whose quotient sizes multiply to
/// the carrier size.
pub fn enumerate_bsets(alg: &BooleanAlgebra, carrier: usize, limits: &Limits) -> Result<Vec<BSet>> {
    if carrier == 0 {
        return Err(Error::input("carrier must be nonempty"));
    }
    let k = alg.atoms() as usize;
    let rels = enumerate_set_partitions(carrier);
    let tuples = (rels.len() as u64).saturating_pow(k as u32);
    limits.check_naive(tuples)?;
    let mut out = Vec::new();
    'tuple: for i in 0..tuples {
        let pick = exec::digits(i, rels.len(), k);
        let mut product = 1usize;
        for &r in &pick {
            product = product.saturating_mul(rels[r].iter().max().unwrap() + 1);
        }
        if product != carrier {
            continue;
        }
        for x in 0..carrier {
            for y in x + 1..carrier {
                if pick.iter().all(|&r| rels[r][x] == rels[r][y]) {
                    continue 'tuple;
                }
            }
        }
        // Relations at arbitrary b: intersect the atom relations below b.
        let rows: Vec<Vec<usize>> = alg
            .elements()
            .map(|b| {
                let mut row = vec![0usize; carrier];
                for a in alg.atoms_of(b) {
                    let r = &rels[pick[a as usize]];
                    let paired: Vec<usize> =
                        row.iter().zip(r).map(|(&c, &d)| c * carrier + d).collect();
                    row = normalize_row(&paired);
                }
                row
            })
            .collect();
        let fam = EqFamily::from_rows(*alg, carrier, rows)?;
        out.push(action_from_eqs(&fam, limits)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// Distributions and free objects

/// A slot assignment of algebra elements whose nonzero values are
/// pairwise disjoint and jointly cover the top element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Distribution {
    pub omega: Vec<Elem>,
}

impl Distribution {
    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.omega.iter().enumerate().filter(|(_, &b)| b != 0).map(|(i, _)| i)
    }
}

/// Check disjointness and covering.
pub fn distribution_certificate(alg: &BooleanAlgebra, d: &Distribution) -> Result<Certificate> {
    if let Some(bad) = d.omega.iter().position(|&b| !alg.contains(b)) {
        return Err(Error::input(format!("distribution value at slot {bad} outside algebra")));
    }
    let n = d.omega.len() as u64;
    let mut cert = Certificate::new();
    cert.sweep("dist.disjoint", n * n, |i| {
        let (a, b) = ((i / n) as usize, (i % n) as usize);
        (a < b && alg.meet(d.omega[a], d.omega[b]) != alg.zero())
            .then(|| Witness::new("dist.disjoint", &[("i", a as u64), ("j", b as u64)]))
    });
    let join = d.omega.iter().fold(alg.zero(), |acc, &b| alg.join(acc, b));
    cert.push(Check::of(
        "dist.cover",
        1,
        (join != alg.one()).then(|| Witness::new("dist.cover", &[("join", join as u64)])),
    ));
    Ok(cert)
}

/// The point mass at slot `i`.
pub fn dirac(alg: &BooleanAlgebra, len: usize, i: usize) -> Distribution {
    debug_assert!(i < len);
    let mut omega = vec![alg.zero(); len];
    omega[i] = alg.one();
    Distribution { omega }
}

/// The distribution sending slot `i` to the join of the atoms `f` maps
/// to `i`; inverse of `dist_to_function`.
pub fn dist_from_function(alg: &BooleanAlgebra, f: &[usize], len: usize) -> Distribution {
    debug_assert_eq!(f.len(), alg.atoms() as usize);
    let mut omega = vec![alg.zero(); len];
    for (a, &slot) in f.iter().enumerate() {
        debug_assert!(slot < len);
        omega[slot] |= alg.atom(a as u32);
    }
    Distribution { omega }
}

/// For each atom, the unique slot whose value lies above it.
pub fn dist_to_function(alg: &BooleanAlgebra, d: &Distribution) -> Result<Vec<usize>> {
    (0..alg.atoms())
        .map(|a| {
            let atom = alg.atom(a);
            let mut found = None;
            for (i, &b) in d.omega.iter().enumerate() {
                if alg.leq(atom, b) {
                    if found.is_some() {
                        return Err(Error::law("dist.disjoint", &[("atom", a as u64)]));
                    }
                    found = Some(i);
                }
            }
            found.ok_or_else(|| Error::law("dist.cover", &[("atom", a as u64)]))
        })
        .collect()
}

/// All distributions on `len` slots, sorted by value vector.  Their
/// count is `len^atoms`: one per function from atoms to slots.
pub fn enumerate_distributions(
    alg: &BooleanAlgebra,
    len: usize,
    limits: &Limits,
) -> Result<Vec<Distribution>> {
    if len == 0 {
        return Err(Error::input("distributions need at least one slot"));
    }
    let space = (len as u64)
        .checked_pow(alg.atoms())
        .ok_or_else(|| Error::input("distribution space overflows"))?;
    limits.check_naive(space)?;
    let mut out: Vec<Distribution> = (0..space)
        .map(|i| dist_from_function(alg, &exec::digits(i, len, alg.atoms() as usize), len))
        .collect();
    out.sort();
    out.dedup();
    if out.len() as u64 != space {
        return Err(Error::Invariant(format!(
            "distribution count {} differs from function count {space}",
            out.len()
        )));
    }
    Ok(out)
}

/// Composite distribution: slot `j` receives the join over `i` of
/// `omega(i) and gamma_i(j)`.
pub fn dist_substitute(
    alg: &BooleanAlgebra,
    omega: &Distribution,
    gammas: &[Distribution],
) -> Result<Distribution> {
    if gammas.len() != omega.len() {
        return Err(Error::input(format!(
            "{} inner distributions for {} slots",
            gammas.len(),
            omega.len()
        )));
    }
    let target = gammas.first().map(|g| g.len()).unwrap_or(0);
    if gammas.iter().any(|g| g.len() != target) {
        return Err(Error::input("inner distributions have mixed lengths"));
    }
    distribution_certificate(alg, omega)?.require()?;
    for g in gammas {
        distribution_certificate(alg, g)?.require()?;
    }
    let omega_out = (0..target)
        .map(|j| {
            omega
                .omega
                .iter()
                .zip(gammas)
                .fold(alg.zero(), |acc, (&wi, g)| alg.join(acc, alg.meet(wi, g.omega[j])))
        })
        .collect();
    let result = Distribution { omega: omega_out };
    match distribution_certificate(alg, &result)?.require() {
        Ok(_) => Ok(result),
        Err(err) => {
            Err(Error::Invariant(format!("substitution of valid distributions is invalid: {err}")))
        }
    }
}

/// The free action on a finite set of generators: carrier all
/// distributions over the generators, relations `w =_b g` iff the
/// values agree under meet with `b`, unit the point masses.
#[derive(Debug, Clone)]
pub struct FreeBSet {
    pub bset: BSet,
    pub dists: Vec<Distribution>,
    pub unit: Vec<usize>,
}

pub fn free_bset(alg: &BooleanAlgebra, generators: usize, limits: &Limits) -> Result<FreeBSet> {
    if generators == 0 {
        return Err(Error::input("free action needs at least one generator"));
    }
    let dists = enumerate_distributions(alg, generators, limits)?;
    let index: HashMap<&[Elem], usize> =
        dists.iter().enumerate().map(|(i, d)| (d.omega.as_slice(), i)).collect();
    let n = dists.len();
    let mut action = Vec::with_capacity(alg.size() * n * n);
    for b in alg.elements() {
        for i in 0..n {
            for j in 0..n {
                let mixed: Vec<Elem> = dists[i]
                    .omega
                    .iter()
                    .zip(&dists[j].omega)
                    .map(|(&wi, &gj)| alg.cond(b, wi, gj))
                    .collect();
                let z = *index.get(mixed.as_slice()).ok_or_else(|| {
                    Error::Invariant(
                        "conditioned mix of distributions is not a distribution".into(),
                    )
                })?;
                action.push(z);
            }
        }
    }
    let bset = validate_bset(*alg, n, action, limits)?;
    let unit = (0..generators).map(|g| index[dirac(alg, generators, g).omega.as_slice()]).collect();
    Ok(FreeBSet { bset, dists, unit })
}

/// Freeness against one target: every generator assignment extends to
/// exactly one hom, and that hom is the glue-form evaluation.
pub fn free_bset_certificate(
    free: &FreeBSet,
    target: &BSet,
    limits: &Limits,
) -> Result<Certificate> {
    let homs = enumerate_bset_homs(&free.bset, target, limits)?;
    let te = eqs_from_action(target);
    let g = free.unit.len();
    let space = (target.carrier as u64)
        .checked_pow(g as u32)
        .ok_or_else(|| Error::input("assignment space overflows"))?;
    limits.check_naive(space)?;
    let mut unique = None;
    let mut factors = None;
    for i in 0..space {
        let u = exec::digits(i, target.carrier, g);
        let matching: Vec<&Vec<usize>> =
            homs.iter().filter(|h| free.unit.iter().zip(&u).all(|(&ux, &v)| h[ux] == v)).collect();
        if matching.len() != 1 && unique.is_none() {
            unique = Some(Witness::new(
                "free.unique",
                &[("assignment", i), ("count", matching.len() as u64)],
            ));
        }
        if factors.is_none() {
            // Glue-form evaluation of each distribution at the assigned
            // generator images.
            let mut table = Vec::with_capacity(free.bset.carrier);
            for d in &free.dists {
                let mut found = None;
                for z in 0..target.carrier {
                    if d.omega.iter().zip(&u).all(|(&b, &v)| b == 0 || te.eq(b, z, v)) {
                        found = Some(z);
                        break;
                    }
                }
                match found {
                    Some(z) => table.push(z),
                    None => {
                        factors = Some(Witness::new("free.factors", &[("assignment", i)]));
                        break;
                    }
                }
            }
            if factors.is_none()
                && !(table.len() == free.bset.carrier
                    && matching.len() == 1
                    && *matching[0] == table)
            {
                factors = Some(Witness::new("free.factors", &[("assignment", i)]));
            }
        }
    }
    let mut cert = Certificate::new();
    cert.push(Check::of("free.unique", space, unique));
    cert.push(Check::of("free.factors", space, factors));
    Ok(cert)
}

// ---------------------------------------------------------------------
// Exponentials

/// The hom-set of two actions carrying the pointwise relations, with
/// its carrier order fixed by `enumerate_bset_homs`.
#[derive(Debug, Clone)]
pub struct BsetExponential {
    pub bset: BSet,
    pub homs: Vec<Vec<usize>>,
}

pub fn bset_exponential(y: &BSet, z: &BSet, limits: &Limits) -> Result<BsetExponential> {
    let homs = enumerate_bset_homs(y, z, limits)?;
    let ze = eqs_from_action(z);
    let rows: Vec<Vec<usize>> = y
        .algebra
        .elements()
        .map(|b| {
            let keys: Vec<Vec<usize>> =
                homs.iter().map(|f| f.iter().map(|&v| ze.row(b)[v]).collect()).collect();
            let mut ids: HashMap<&[usize], usize> = HashMap::new();
            keys.iter()
                .map(|k| {
                    let next = ids.len();
                    *ids.entry(k.as_slice()).or_insert(next)
                })
                .collect()
        })
        .collect();
    let fam = EqFamily::from_rows(y.algebra, homs.len(), rows)?;
    let bset = action_from_eqs(&fam, limits)?;
    Ok(BsetExponential { bset, homs })
}

/// `ev(f, y) = f(y)`.
pub fn exp_ev(exp: &BsetExponential, f: usize, y: usize) -> usize {
    exp.homs[f][y]
}

/// Currying: given a hom out of the product (indexed `xi * |Y| + yi`),
/// the map sending each `x` to the hom-set index of `f(x, -)`.
pub fn exp_transpose(
    exp: &BsetExponential,
    x_carrier: usize,
    y_carrier: usize,
    f: &[usize],
) -> Result<Vec<usize>> {
    if f.len() != x_carrier * y_carrier {
        return Err(Error::input("table shape does not match the product carrier"));
    }
    (0..x_carrier)
        .map(|u| {
            let slice: Vec<usize> = (0..y_carrier).map(|v| f[u * y_carrier + v]).collect();
            exp.homs
                .binary_search(&slice)
                .map_err(|_| Error::input(format!("slice at x={u} is not a hom into the target")))
        })
        .collect()
}

/// The function-space property of the hom-set action against one test
/// object: evaluation is a hom, every hom out of the product transposes
/// to a hom, the triangle commutes, and the transpose is unique.
pub fn exponential_certificate(
    x: &BSet,
    y: &BSet,
    z: &BSet,
    exp: &BsetExponential,
    limits: &Limits,
) -> Result<Certificate> {
    let ey = bset_product(&exp.bset, y, limits)?;
    let ev_table: Vec<usize> =
        (0..ey.carrier).map(|p| exp_ev(exp, p / y.carrier, p % y.carrier)).collect();
    let mut cert = Certificate::new();
    cert.push(Check::of(
        "exp.ev-hom",
        (ey.algebra.size() * ey.carrier * ey.carrier) as u64,
        hom_defect(&ey, z, &ev_table).map(|w| Witness { law: "exp.ev-hom".into(), ..w }),
    ));

    let xy = bset_product(x, y, limits)?;
    let fs = enumerate_bset_homs(&xy, z, limits)?;
    let xhoms = enumerate_bset_homs(x, &exp.bset, limits)?;
    let mut transpose_hom = None;
    let mut triangle = None;
    let mut unique = None;
    for (fi, f) in fs.iter().enumerate() {
        let bar = match exp_transpose(exp, x.carrier, y.carrier, f) {
            Ok(bar) => bar,
            Err(_) => {
                if transpose_hom.is_none() {
                    transpose_hom = Some(Witness::new("exp.transpose-hom", &[("f", fi as u64)]));
                }
                continue;
            }
        };
        if transpose_hom.is_none() {
            if let Some(w) = hom_defect(x, &exp.bset, &bar) {
                transpose_hom = Some(Witness::new(
                    "exp.transpose-hom",
                    &[("f", fi as u64), ("b", w.get("b").unwrap_or(0))],
                ));
            }
        }
        if triangle.is_none() {
            let composite: Vec<usize> =
                (0..xy.carrier).map(|p| exp_ev(exp, bar[p / y.carrier], p % y.carrier)).collect();
            if composite != *f {
                triangle = Some(Witness::new("exp.factors", &[("f", fi as u64)]));
            }
        }
        if unique.is_none() {
            let count = xhoms
                .iter()
                .filter(|h| {
                    (0..xy.carrier).all(|p| exp_ev(exp, h[p / y.carrier], p % y.carrier) == f[p])
                })
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
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(k: u32) -> BooleanAlgebra {
        BooleanAlgebra::new(k).unwrap()
    }

    fn limits() -> Limits {
        Limits::default()
    }

    #[test]
    fn conditioned_action_is_valid_and_relations_match_meets() {
        for k in 1..=3u32 {
            let b = alg(k);
            let x = conditioned_bset(&b, &limits()).unwrap();
            let e = eqs_from_action(&x);
            // c =_b d iff b & c = b & d; top is discrete, bottom total.
            for bb in b.elements() {
                for c in b.elements() {
                    for d in b.elements() {
                        assert_eq!(
                            e.eq(bb, c as usize, d as usize),
                            b.meet(bb, c) == b.meet(bb, d)
                        );
                    }
                }
            }
            assert_eq!(e.classes(b.one()), b.size());
            assert_eq!(e.classes(b.zero()), 1);
        }
    }

    #[test]
    fn single_mutation_breaks_a_named_axiom() {
        let b = alg(2);
        let x = conditioned_bset(&b, &limits()).unwrap();
        let mut table = x.action_table().to_vec();
        // 1(x, y) = x is the easiest axiom to dent deliberately.
        let one = b.one() as usize;
        let pos = (one * x.carrier) * x.carrier + 1;
        table[pos] = (table[pos] + 1) % x.carrier;
        let err = validate_bset(b, x.carrier, table.clone(), &limits()).unwrap_err();
        let w = err.witness().expect("law error").clone();
        let broken = BSet { algebra: b, carrier: x.carrier, action: table };
        assert!(replay_bset(&broken, &w), "witness must reproduce on the mutated table");
        assert!(!replay_bset(&x, &w), "witness must vanish on the valid table");
    }

    #[test]
    fn one_atom_structures_are_forced() {
        // Over the 2-element algebra the action can only be projection:
        // exactly one structure per carrier.
        let b = alg(1);
        for n in 1..=4usize {
            let all = enumerate_bsets(&b, n, &limits()).unwrap();
            assert_eq!(all.len(), 1);
            let x = &all[0];
            for u in 0..n {
                for v in 0..n {
                    assert_eq!(x.act(b.one(), u, v), u);
                    assert_eq!(x.act(b.zero(), u, v), v);
                }
            }
        }
    }

    #[test]
    fn structure_counts_match_independent_oracle() {
        // Counts below were computed first with a separate brute-force
        // script over raw set-partition tuples.
        let expect: [(u32, [usize; 5]); 3] =
            [(1, [1, 1, 1, 1, 1]), (2, [1, 2, 2, 8, 2]), (3, [1, 3, 3, 21, 3])];
        for (k, counts) in expect {
            let b = alg(k);
            for (n, &want) in counts.iter().enumerate() {
                let got = enumerate_bsets(&b, n + 1, &limits()).unwrap().len();
                assert_eq!(got, want, "k={k}, carrier={}", n + 1);
            }
        }
    }

    #[test]
    fn presentations_are_mutually_inverse() {
        // Both directions, for every structure with |B| <= 8, carrier <= 5.
        for k in 1..=3u32 {
            let b = alg(k);
            for n in 1..=5usize {
                for x in enumerate_bsets(&b, n, &limits()).unwrap() {
                    let e = eqs_from_action(&x);
                    assert_eq!(action_from_eqs(&e, &limits()).unwrap(), x);
                    let back = eqs_from_action(&action_from_eqs(&e, &limits()).unwrap());
                    assert_eq!(back, e);
                }
            }
        }
    }

    #[test]
    fn both_validation_routes_agree() {
        let b = alg(2);
        // On valid families both routes pass...
        for n in 1..=4usize {
            for x in enumerate_bsets(&b, n, &limits()).unwrap() {
                let routes = eq_routes_agree(&eqs_from_action(&x), &limits()).unwrap();
                assert!(routes.agree && routes.axioms.ok());
            }
        }
        // ...and on damaged ones both fail together.  Merge classes,
        // split classes, and permute rows of a valid family.
        let base = eqs_from_action(&conditioned_bset(&b, &limits()).unwrap());
        let mut damaged: Vec<EqFamily> = Vec::new();
        for target in b.elements() {
            let mut rows: Vec<Vec<usize>> = b.elements().map(|e| base.row(e).to_vec()).collect();
            rows[target as usize] = vec![0; base.carrier];
            damaged.push(EqFamily::from_rows(b, base.carrier, rows.clone()).unwrap());
            rows[target as usize] = (0..base.carrier).collect();
            damaged.push(EqFamily::from_rows(b, base.carrier, rows).unwrap());
        }
        let mut saw_failure = false;
        for fam in damaged {
            let routes = eq_routes_agree(&fam, &limits()).unwrap();
            assert!(routes.agree, "routes disagree on {fam:?}");
            saw_failure |= !routes.axioms.ok();
        }
        assert!(saw_failure, "damage must actually break some family");
    }

    #[test]
    fn join_rule_violation_is_named() {
        // Relations discrete at both atoms but also at the top stay legal;
        // making the top discrete while atoms are total breaks the join
        // rule with a (b, c, x, y) witness.
        let b = alg(2);
        let total = vec![0usize, 0];
        let delta = vec![0usize, 1];
        let rows = vec![total.clone(), total.clone(), total, delta];
        let fam = EqFamily::from_rows(b, 2, rows).unwrap();
        let err = action_from_eqs(&fam, &limits()).unwrap_err();
        let w = err.witness().expect("law error");
        assert_eq!(w.law, "eqs.join");
        for name in ["b", "c", "x", "y"] {
            assert!(w.get(name).is_some());
        }
    }

    #[test]
    fn glue_laws_and_two_part_form() {
        let b = alg(2);
        for n in 1..=4usize {
            for x in enumerate_bsets(&b, n, &limits()).unwrap() {
                assert!(glue_laws_certificate(&x, &limits()).unwrap().ok());
                // Two-part partitions reproduce the binary action.
                for e in b.elements() {
                    if e == b.zero() || e == b.one() {
                        continue;
                    }
                    let p = Partition::new(&b, b.one(), &[e, b.neg(e)]).unwrap();
                    for u in 0..n {
                        for v in 0..n {
                            // Normalization may reorder the two parts.
                            let assign: Vec<usize> =
                                p.parts.iter().map(|&part| if part == e { u } else { v }).collect();
                            assert_eq!(glue(&x, &p, &assign).unwrap(), x.act(e, u, v));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn homs_preserve_glue() {
        let b = alg(2);
        let objects = enumerate_bsets(&b, 4, &limits()).unwrap();
        let partitions = enumerate_partitions(&b, b.one());
        for x in &objects {
            for y in &objects {
                for f in enumerate_bset_homs(x, y, &limits()).unwrap() {
                    for p in &partitions {
                        let cells = (x.carrier as u64).pow(p.parts.len() as u32);
                        for i in 0..cells {
                            let assign = exec::digits(i, x.carrier, p.parts.len());
                            let gx = glue(x, p, &assign).unwrap();
                            let mapped: Vec<usize> = assign.iter().map(|&v| f[v]).collect();
                            assert_eq!(f[gx], glue(y, p, &mapped).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn hom_search_matches_both_naive_filters() {
        let b = alg(2);
        let cond = conditioned_bset(&b, &limits()).unwrap();
        let fast = enumerate_bset_homs(&cond, &cond, &limits()).unwrap();
        assert_eq!(fast, naive_bset_homs_by_relations(&cond, &cond, &limits()).unwrap());
        assert_eq!(fast, naive_bset_homs_by_action(&cond, &cond, &limits()).unwrap());
        // Endomorphisms factor through the two atom quotients: 4 * 4.
        assert_eq!(fast.len(), 16);

        for nx in 1..=3usize {
            for ny in 1..=3usize {
                for x in enumerate_bsets(&b, nx, &limits()).unwrap() {
                    for y in enumerate_bsets(&b, ny, &limits()).unwrap() {
                        let fast = enumerate_bset_homs(&x, &y, &limits()).unwrap();
                        assert_eq!(fast, naive_bset_homs_by_relations(&x, &y, &limits()).unwrap());
                        assert_eq!(fast, naive_bset_homs_by_action(&x, &y, &limits()).unwrap());
                        if x == y {
                            let id: Vec<usize> = (0..nx).collect();
                            assert!(fast.contains(&id));
                        }
                        for v in 0..ny {
                            assert!(fast.contains(&vec![v; nx]));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn agreement_sets_are_ideals_and_locally_joined() {
        let b = alg(2);
        let partitions = enumerate_partitions(&b, b.one());
        for n in 1..=4usize {
            for x in enumerate_bsets(&b, n, &limits()).unwrap() {
                let e = eqs_from_action(&x);
                for u in 0..n {
                    for v in 0..n {
                        let agree: Vec<Elem> = b.elements().filter(|&bb| e.eq(bb, u, v)).collect();
                        for &bb in &agree {
                            for c in b.elements() {
                                if b.leq(c, bb) {
                                    assert!(agree.contains(&c));
                                }
                            }
                        }
                        for &b1 in &agree {
                            for &b2 in &agree {
                                assert!(agree.contains(&b.join(b1, b2)));
                            }
                        }
                        // Local joins along any partition: agreement on
                        // every b-meet-c forces agreement on b.
                        for p in &partitions {
                            for bb in b.elements() {
                                if p.parts.iter().all(|&c| e.eq(b.meet(bb, c), u, v)) {
                                    assert!(e.eq(bb, u, v));
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn product_has_hom_projections_and_unique_pairing() {
        let b = alg(2);
        let objects = enumerate_bsets(&b, 2, &limits()).unwrap();
        for x in &objects {
            for y in &objects {
                let p = bset_product(x, y, &limits()).unwrap();
                let fst: Vec<usize> = (0..p.carrier).map(|i| i / y.carrier).collect();
                let snd: Vec<usize> = (0..p.carrier).map(|i| i % y.carrier).collect();
                assert!(hom_defect(&p, x, &fst).is_none());
                assert!(hom_defect(&p, y, &snd).is_none());
                for w in enumerate_bsets(&b, 2, &limits()).unwrap() {
                    let fs = enumerate_bset_homs(&w, x, &limits()).unwrap();
                    let gs = enumerate_bset_homs(&w, y, &limits()).unwrap();
                    let hs = enumerate_bset_homs(&w, &p, &limits()).unwrap();
                    for f in &fs {
                        for g in &gs {
                            let count = hs
                                .iter()
                                .filter(|h| {
                                    (0..w.carrier).all(|i| fst[h[i]] == f[i] && snd[h[i]] == g[i])
                                })
                                .count();
                            assert_eq!(count, 1);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn distribution_count_and_function_bijection() {
        for k in 1..=3u32 {
            let b = alg(k);
            for len in 1..=3usize {
                let all = enumerate_distributions(&b, len, &limits()).unwrap();
                assert_eq!(all.len(), len.pow(k));
                for d in &all {
                    assert!(distribution_certificate(&b, d).unwrap().ok());
                    let f = dist_to_function(&b, d).unwrap();
                    assert_eq!(dist_from_function(&b, &f, len), *d);
                }
            }
        }
    }

    #[test]
    fn free_on_one_generator_is_terminal() {
        let b = alg(2);
        let f = free_bset(&b, 1, &limits()).unwrap();
        assert_eq!(f.bset.carrier, 1);
        assert_eq!(f.unit, vec![0]);
    }

    #[test]
    fn free_on_two_generators_is_the_algebra() {
        for k in 1..=3u32 {
            let b = alg(k);
            let f = free_bset(&b, 2, &limits()).unwrap();
            assert_eq!(f.bset, conditioned_bset(&b, &limits()).unwrap());
            // Point masses sit at the top and bottom of the carrier.
            assert_eq!(f.unit, vec![b.one() as usize, b.zero() as usize]);
        }
    }

    #[test]
    fn freeness_against_all_small_targets() {
        let b = alg(2);
        for gens in 1..=2usize {
            let f = free_bset(&b, gens, &limits()).unwrap();
            for n in 1..=3usize {
                for target in enumerate_bsets(&b, n, &limits()).unwrap() {
                    assert!(free_bset_certificate(&f, &target, &limits()).unwrap().ok());
                }
            }
        }
    }

    #[test]
    fn substitution_matches_join_formula_and_glue() {
        let b = alg(2);
        let a = b.atom(1); // bit pattern 10
        let a1 = b.atom(0); // bit pattern 01
        let omega = Distribution { omega: vec![a, a1] };
        let g1 = Distribution { omega: vec![a1, a] };
        let g2 = Distribution { omega: vec![a, a1] };
        let result = dist_substitute(&b, &omega, &[g1, g2]).unwrap();
        assert_eq!(result, Distribution { omega: vec![b.zero(), b.one()] });

        // Substitution agrees with glue-form evaluation in the free
        // action on the target slots.
        let free = free_bset(&b, 2, &limits()).unwrap();
        let fe = eqs_from_action(&free.bset);
        let dists = enumerate_distributions(&b, 2, &limits()).unwrap();
        for w in &dists {
            for i1 in 0..dists.len() {
                for i2 in 0..dists.len() {
                    let subst =
                        dist_substitute(&b, w, &[dists[i1].clone(), dists[i2].clone()]).unwrap();
                    let picks = [i1, i2];
                    let mut glued = None;
                    for z in 0..free.bset.carrier {
                        if w.omega.iter().zip(picks).all(|(&bb, i)| bb == 0 || fe.eq(bb, z, i)) {
                            glued = Some(z);
                            break;
                        }
                    }
                    assert_eq!(free.dists[glued.unwrap()], subst);
                }
            }
        }
    }

    #[test]
    fn substitution_is_unital_and_associative() {
        let b = alg(2);
        let dists = enumerate_distributions(&b, 2, &limits()).unwrap();
        let diracs = [dirac(&b, 2, 0), dirac(&b, 2, 1)];
        for d in &dists {
            assert_eq!(
                dist_substitute(&b, &diracs[0], &[d.clone(), dists[0].clone()]).unwrap(),
                *d
            );
            assert_eq!(dist_substitute(&b, d, &diracs).unwrap(), *d);
        }
        for w in &dists {
            for g1 in &dists {
                for g2 in &dists {
                    for d1 in &dists {
                        for d2 in &dists {
                            let gs = [g1.clone(), g2.clone()];
                            let ds = [d1.clone(), d2.clone()];
                            let left =
                                dist_substitute(&b, &dist_substitute(&b, w, &gs).unwrap(), &ds)
                                    .unwrap();
                            let inner: Vec<Distribution> =
                                gs.iter().map(|g| dist_substitute(&b, g, &ds).unwrap()).collect();
                            let right = dist_substitute(&b, w, &inner).unwrap();
                            assert_eq!(left, right);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn glue_on_free_action_is_the_join_formula() {
        let b = alg(2);
        let free = free_bset(&b, 2, &limits()).unwrap();
        for p in enumerate_partitions(&b, b.one()) {
            let cells = (free.bset.carrier as u64).pow(p.parts.len() as u32);
            for i in 0..cells {
                let assign = exec::digits(i, free.bset.carrier, p.parts.len());
                let z = glue(&free.bset, &p, &assign).unwrap();
                let expect: Vec<Elem> = (0..2)
                    .map(|slot| {
                        p.parts.iter().zip(&assign).fold(b.zero(), |acc, (&bb, &w)| {
                            b.join(acc, b.meet(bb, free.dists[w].omega[slot]))
                        })
                    })
                    .collect();
                assert_eq!(free.dists[z].omega, expect);
            }
        }
    }

    #[test]
    fn exponential_degenerate_shapes() {
        let b = alg(2);
        let cond = conditioned_bset(&b, &limits()).unwrap();
        let one = terminal_bset(&b);
        // Into the terminal object: a point.
        let e1 = bset_exponential(&cond, &one, &limits()).unwrap();
        assert_eq!(e1.bset.carrier, 1);
        // Out of the terminal object: the target itself, with hom i -> [i].
        let e2 = bset_exponential(&one, &cond, &limits()).unwrap();
        assert_eq!(e2.bset, cond);
    }

    #[test]
    fn exponential_universal_property() {
        let b = alg(2);
        let cond = conditioned_bset(&b, &limits()).unwrap();
        let exp = bset_exponential(&cond, &cond, &limits()).unwrap();
        assert_eq!(exp.bset.carrier, 16);
        for n in 1..=3usize {
            for x in enumerate_bsets(&b, n, &limits()).unwrap() {
                assert!(exponential_certificate(&x, &cond, &cond, &exp, &limits()).unwrap().ok());
            }
        }
    }

    #[test]
    fn oversized_sweeps_are_rejected() {
        let b = alg(16);
        let err = conditioned_bset(&b, &limits()).unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
        let err = enumerate_distributions(&b, 3, &limits()).unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
    }
}
