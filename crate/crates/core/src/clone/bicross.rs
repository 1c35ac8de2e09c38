//! The bicrossed clone of a matched pair: an arity-k operation pairs a
//! distribution over the algebra with a monoid element, substitution
//! pushes the inner distributions through star and collapses the inner
//! monoid parts along the outer distribution.  Extracting this clone
//! recovers the pair on the nose.

use super::{
    boolean_from_clone, classify_op, decompose, decompose_certificate, theory_certificate,
    unary_composite, Theory,
};
use crate::balg::{BooleanAlgebra, Elem};
use crate::bset::{
    dirac, distribution_certificate, enumerate_distributions, eqs_from_action, Distribution,
};
use crate::error::{Error, Witness};
use crate::matched::{matched_pair_certificate, BMSet, MatchedTheoryData};
use crate::report::{Certificate, Check};
use crate::{exec, Limits, Result};

/// A distribution over the algebra paired with a monoid element; on a
/// carrier it glues the star-translated arguments along the
/// distribution.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BicrossOp {
    pub dist: Distribution,
    pub unary: usize,
}

/// Bicrossed clone over a matched pair with materialization capped at
/// `arity_bound`.
#[derive(Debug, Clone)]
pub struct BicrossClone {
    pub data: MatchedTheoryData,
    pub arity_bound: usize,
    limits: Limits,
}

/// The pair itself is validated up front; substitution then stays
/// total on the operations the clone enumerates.
pub fn bicross_build(
    data: &MatchedTheoryData,
    arity_bound: usize,
    limits: &Limits,
) -> Result<BicrossClone> {
    if arity_bound == 0 {
        return Err(Error::input("operations need at least one slot"));
    }
    limits.check_arity(arity_bound)?;
    matched_pair_certificate(&data.pair, limits)?.require()?;
    Ok(BicrossClone { data: data.clone(), arity_bound, limits: *limits })
}

impl BicrossClone {
    fn alg(&self) -> BooleanAlgebra {
        self.data.pair.algebra
    }

    /// Validated construction from raw parts.
    pub fn op(&self, omega: Vec<Elem>, unary: usize) -> Result<BicrossOp> {
        let d = Distribution { omega };
        distribution_certificate(&self.alg(), &d)?.require()?;
        if unary >= self.data.pair.monoid.size {
            return Err(Error::input(format!("monoid element {unary} out of range")));
        }
        Ok(BicrossOp { dist: d, unary })
    }

    /// Analytic hyperaffine-unary split, the closed form the exhaustive
    /// [`super::decompose`] search must agree with.
    pub fn split(&self, t: &BicrossOp) -> (BicrossOp, BicrossOp) {
        (
            BicrossOp { dist: t.dist.clone(), unary: self.data.pair.monoid.identity },
            BicrossOp { dist: Distribution { omega: vec![self.alg().one()] }, unary: t.unary },
        )
    }

    /// Complete validity check, kept to plain bit operations because
    /// substitution runs inside exhaustive sweeps.
    fn check(&self, t: &BicrossOp) -> Result<()> {
        let alg = self.alg();
        if t.dist.is_empty() || t.unary >= self.data.pair.monoid.size {
            return Err(Error::input(format!("malformed operation {t:?}")));
        }
        let mut seen = alg.zero();
        for &b in &t.dist.omega {
            if !alg.contains(b) || alg.meet(seen, b) != alg.zero() {
                return Err(Error::input(format!("malformed operation {t:?}")));
            }
            seen = alg.join(seen, b);
        }
        if seen != alg.one() {
            return Err(Error::input(format!("malformed operation {t:?}")));
        }
        Ok(())
    }
}

impl Theory for BicrossClone {
    type Op = BicrossOp;

    fn arity_bound(&self) -> usize {
        self.arity_bound
    }

    fn ops(&self, arity: usize) -> Result<Vec<BicrossOp>> {
        if arity == 0 {
            return Err(Error::input("operations need at least one slot"));
        }
        if arity > self.arity_bound {
            return Err(Error::Capacity {
                what: "bicrossed clone arity".into(),
                requested: arity as u64,
                limit: self.arity_bound as u64,
            });
        }
        let dists = enumerate_distributions(&self.alg(), arity, &self.limits)?;
        let sz = self.data.pair.monoid.size;
        self.limits.check_naive((dists.len() as u64).saturating_mul(sz as u64))?;
        let mut out = Vec::with_capacity(dists.len() * sz);
        for d in dists {
            for m in 0..sz {
                out.push(BicrossOp { dist: d.clone(), unary: m });
            }
        }
        Ok(out)
    }

    fn arity_of(&self, t: &BicrossOp) -> usize {
        t.dist.len()
    }

    fn projection(&self, arity: usize, slot: usize) -> Result<BicrossOp> {
        if arity == 0 || slot >= arity {
            return Err(Error::input(format!("slot {slot} outside arity {arity}")));
        }
        Ok(BicrossOp {
            dist: dirac(&self.alg(), arity, slot),
            unary: self.data.pair.monoid.identity,
        })
    }

    fn substitute(&self, t: &BicrossOp, u: &[BicrossOp]) -> Result<BicrossOp> {
        self.check(t)?;
        if u.len() != t.dist.len() {
            return Err(Error::input(format!(
                "{} inner operations for arity {}",
                u.len(),
                t.dist.len()
            )));
        }
        let arity = u[0].dist.len();
        for v in u {
            self.check(v)?;
            if v.dist.len() != arity {
                return Err(Error::input("inner operations have mixed arities"));
            }
        }
        // Substitution sits inside exhaustive sweeps, so the
        // distribution push and the unary collapse are inlined instead
        // of routed through the certificate-producing helpers; the
        // helpers cross-check this closed form in the certificates.
        let alg = self.alg();
        let pair = &self.data.pair;
        let mut omega = vec![alg.zero(); arity];
        for (&wi, v) in t.dist.omega.iter().zip(u) {
            if wi == 0 {
                continue;
            }
            for (o, &g) in omega.iter_mut().zip(&v.dist.omega) {
                *o = alg.join(*o, alg.meet(wi, pair.star(t.unary, g)));
            }
        }
        let mut seen = alg.zero();
        for &o in &omega {
            if alg.meet(seen, o) != alg.zero() {
                return Err(Error::Invariant("substitution produced overlapping slots".into()));
            }
            seen = alg.join(seen, o);
        }
        if seen != alg.one() {
            return Err(Error::Invariant("substitution dropped part of the cover".into()));
        }
        let mut unary = None;
        'z: for z in 0..pair.monoid.size {
            for (&wi, v) in t.dist.omega.iter().zip(u) {
                if wi != 0 && !pair.meq(wi, z, pair.monoid.mul(t.unary, v.unary)) {
                    continue 'z;
                }
            }
            if unary.replace(z).is_some() {
                return Err(Error::Invariant("collapse of the unary parts is not unique".into()));
            }
        }
        let Some(unary) = unary else {
            return Err(Error::Invariant("the unary parts glue to no monoid element".into()));
        };
        Ok(BicrossOp { dist: Distribution { omega }, unary })
    }
}

/// Laws specific to the bicrossed construction on top of the generic
/// substitution laws: classification tracks the unary part, arity-1
/// operations compose like the monoid, every operation splits as its
/// distribution part around its unary part, and the binary hyperaffine
/// fragment names the algebra elements in carrier order.
pub fn bicross_certificate(bc: &BicrossClone, limits: &Limits) -> Result<Certificate> {
    let mut cert = theory_certificate(bc, limits)?;
    cert.merge(decompose_certificate(bc, limits)?);
    let identity = bc.data.pair.monoid.identity;
    let sz = bc.data.pair.monoid.size as u64;
    let one = bc.alg().one();

    for k in 1..=bc.arity_bound() {
        let ops = bc.ops(k)?;
        cert.sweep("bicross.hyperaffine", ops.len() as u64, |i| {
            let t = &ops[i as usize];
            let expected = t.unary == identity;
            match classify_op(bc, t) {
                Ok(c)
                    if c.affine == expected
                        && c.hyperaffine == expected
                        && c.unary == t.dist.omega.contains(&one) =>
                {
                    None
                }
                _ => Some(Witness::new("bicross.hyperaffine", &[("k", k as u64), ("t", i)])),
            }
        });

        cert.sweep("bicross.split", ops.len() as u64, |i| {
            let t = &ops[i as usize];
            let (h, m) = bc.split(t);
            let bindings = [("k", k as u64), ("t", i)];
            match unary_composite(bc, &h, &m) {
                Ok(c) if c == *t => {}
                _ => return Some(Witness::new("bicross.split", &bindings)),
            }
            match decompose(bc, t) {
                Ok(d) if d.hyperaffine == h && d.unary == m => None,
                _ => Some(Witness::new("bicross.split", &bindings)),
            }
        });
    }

    let unaries = bc.ops(1)?;
    cert.sweep("bicross.unary-compose", sz * sz, |i| {
        let m = (i / sz) as usize;
        let n = (i % sz) as usize;
        let expected = BicrossOp {
            dist: Distribution { omega: vec![one] },
            unary: bc.data.pair.monoid.mul(m, n),
        };
        match bc.substitute(&unaries[m], &[unaries[n].clone()]) {
            Ok(s) if s == expected => None,
            _ => Some(Witness::new("bicross.unary-compose", &[("m", m as u64), ("n", n as u64)])),
        }
    });

    let cb = boolean_from_clone(bc, limits)?;
    let mut boolean = None;
    if *cb.algebra() != bc.alg() {
        boolean = Some(Witness::new("bicross.boolean", &[("atoms", cb.algebra().atoms() as u64)]));
    }
    for b in bc.alg().elements() {
        if boolean.is_some() {
            break;
        }
        let named =
            BicrossOp { dist: Distribution { omega: vec![b, bc.alg().neg(b)] }, unary: identity };
        let round = cb.elem_of(&named);
        if *cb.op_of(b) != named || !matches!(round, Ok(e) if e == b) {
            boolean = Some(Witness::new("bicross.boolean", &[("b", b as u64)]));
        }
    }
    cert.push(Check::of("bicross.boolean", bc.alg().size() as u64 + 1, boolean));
    Ok(cert)
}

/// Model laws on a carrier over the same pair: projections select their
/// argument, substitution evaluates stepwise, a collapsed monoid part
/// acts like the glue of the translates, star pushes through
/// evaluation, and the binary and arity-1 operations reproduce the
/// carrier's own action tables.  Oversized sweeps are omitted.
pub fn bicross_model_certificate(
    bc: &BicrossClone,
    x: &BMSet,
    limits: &Limits,
) -> Result<Certificate> {
    if x.pair != bc.data.pair {
        return Err(Error::input("model carrier lives over a different pair"));
    }
    let xe = eqs_from_action(&x.bset);
    let n = x.carrier() as u64;
    let sz = bc.data.pair.monoid.size as u64;
    let alg = bc.alg();
    let interp = |t: &BicrossOp, xs: &[usize]| -> Option<usize> {
        let vals: Vec<usize> = xs.iter().map(|&v| x.mact(t.unary, v)).collect();
        (0..x.carrier())
            .find(|&z| t.dist.omega.iter().zip(&vals).all(|(&b, &v)| b == 0 || xe.eq(b, z, v)))
    };
    let mut cert = Certificate::new();
    let mut lists = Vec::with_capacity(bc.arity_bound());
    for k in 1..=bc.arity_bound() {
        lists.push(bc.ops(k)?);
    }
    let size = |k: usize| lists[k - 1].len() as u64;
    let budget = |space: Option<u64>| space.filter(|&s| s <= limits.max_naive);

    for k in 1..=bc.arity_bound() {
        let Some(args) = n.checked_pow(k as u32) else { continue };
        let Some(space) = budget((k as u64).checked_mul(args)) else { continue };
        cert.sweep("model.projection", space, |i| {
            let slot = (i / args) as usize;
            let xs = exec::digits(i % args, x.carrier(), k);
            let bindings = [("k", k as u64), ("slot", slot as u64), ("xs", i % args)];
            match bc.projection(k, slot) {
                Ok(p) if interp(&p, &xs) == Some(xs[slot]) => None,
                _ => Some(Witness::new("model.projection", &bindings)),
            }
        });
    }

    for k in 1..=bc.arity_bound() {
        for j in 1..=bc.arity_bound() {
            let Some(tuples) = size(j).checked_pow(k as u32) else { continue };
            let Some(args) = n.checked_pow(j as u32) else { continue };
            let Some(space) = budget(size(k).checked_mul(tuples).and_then(|s| s.checked_mul(args)))
            else {
                continue;
            };
            let (tk, tj) = (&lists[k - 1], &lists[j - 1]);
            cert.sweep("model.substitution", space, |i| {
                let ti = (i / (tuples * args)) as usize;
                let code = (i / args) % tuples;
                let xs = exec::digits(i % args, x.carrier(), j);
                let us: Vec<BicrossOp> =
                    exec::digits(code, tj.len(), k).into_iter().map(|d| tj[d].clone()).collect();
                let bindings = [("k", k as u64), ("j", j as u64), ("t", ti as u64), ("u", code)];
                let stepwise = us
                    .iter()
                    .map(|v| interp(v, &xs))
                    .collect::<Option<Vec<_>>>()
                    .and_then(|inner| interp(&tk[ti], &inner));
                let composite = bc.substitute(&tk[ti], &us).ok().and_then(|c| interp(&c, &xs));
                match (composite, stepwise) {
                    (Some(a), Some(b)) if a == b => None,
                    _ => Some(Witness::new("model.substitution", &bindings)),
                }
            });
        }
    }

    for k in 1..=bc.arity_bound() {
        let dists = bc.data.dists(k, limits)?;
        let dn = dists.len() as u64;
        {
            let Some(tuples) = sz.checked_pow(k as u32) else { continue };
            let Some(space) = budget(dn.checked_mul(tuples).and_then(|s| s.checked_mul(n))) else {
                continue;
            };
            cert.sweep("model.mix", space, |i| {
                let di = (i / (tuples * n)) as usize;
                let code = (i / n) % tuples;
                let v = (i % n) as usize;
                let ms = exec::digits(code, sz as usize, k);
                let bindings = [("k", k as u64), ("w", di as u64), ("ms", code), ("x", v as u64)];
                let lhs = bc.data.rtri(&dists[di], &ms).map(|u| x.mact(u, v));
                let vals: Vec<usize> = ms.iter().map(|&m| x.mact(m, v)).collect();
                let rhs = (0..x.carrier()).find(|&z| {
                    dists[di].omega.iter().zip(&vals).all(|(&b, &w)| b == 0 || xe.eq(b, z, w))
                });
                match (lhs, rhs) {
                    (Ok(a), Some(b)) if a == b => None,
                    _ => Some(Witness::new("model.mix", &bindings)),
                }
            });
        }
        {
            let Some(args) = n.checked_pow(k as u32) else { continue };
            let Some(space) = budget(dn.checked_mul(sz).and_then(|s| s.checked_mul(args))) else {
                continue;
            };
            cert.sweep("model.push", space, |i| {
                let di = (i / (sz * args)) as usize;
                let m = ((i / args) % sz) as usize;
                let xs = exec::digits(i % args, x.carrier(), k);
                let bindings =
                    [("k", k as u64), ("w", di as u64), ("m", m as u64), ("xs", i % args)];
                let still =
                    BicrossOp { dist: dists[di].clone(), unary: bc.data.pair.monoid.identity };
                let pushed = BicrossOp {
                    dist: bc.data.mstar(m, &dists[di]),
                    unary: bc.data.pair.monoid.identity,
                };
                let lhs = interp(&still, &xs).map(|z| x.mact(m, z));
                let translated: Vec<usize> = xs.iter().map(|&v| x.mact(m, v)).collect();
                let rhs = interp(&pushed, &translated);
                (lhs.is_none() || lhs != rhs).then(|| Witness::new("model.push", &bindings))
            });
        }
    }

    let bn = alg.size() as u64;
    cert.sweep("model.restrict", bn * n * n, |i| {
        let b = (i / (n * n)) as Elem;
        let u = ((i / n) % n) as usize;
        let v = (i % n) as usize;
        let t = BicrossOp {
            dist: Distribution { omega: vec![b, alg.neg(b)] },
            unary: bc.data.pair.monoid.identity,
        };
        (interp(&t, &[u, v]) != Some(x.bact(b, u, v))).then(|| {
            Witness::new("model.restrict", &[("b", b as u64), ("x", u as u64), ("y", v as u64)])
        })
    });
    cert.sweep("model.restrict", sz * n, |i| {
        let m = (i / n) as usize;
        let v = (i % n) as usize;
        let t = BicrossOp { dist: Distribution { omega: vec![alg.one()] }, unary: m };
        (interp(&t, &[v]) != Some(x.mact(m, v)))
            .then(|| Witness::new("model.restrict", &[("m", m as u64), ("x", v as u64)]))
    });
    Ok(cert)
}
