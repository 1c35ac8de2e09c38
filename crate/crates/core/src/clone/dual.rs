//! The complete theory of dual operations of a finite carrier: an
//! arity-k operation is a map from the carrier into k disjoint copies
//! of itself, substitution chases the copy tag, and every operation
//! splits into a tag part and an endofunction part.

use super::Theory;
use crate::error::Error;
use crate::report::Certificate;
use crate::{exec, Limits, Result};

/// `map[x] = (tag, elem)`: send a carrier point into copy `tag` at
/// point `elem`.  The pair form splits the same data into a slot map
/// and an endofunction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DualOp {
    pub arity: usize,
    pub map: Vec<(usize, usize)>,
}

impl DualOp {
    /// Split into the slot map and the endofunction.
    pub fn pair_form(&self) -> (Vec<usize>, Vec<usize>) {
        (self.map.iter().map(|&(h, _)| h).collect(), self.map.iter().map(|&(_, m)| m).collect())
    }

    pub fn from_pair(arity: usize, tags: &[usize], ends: &[usize]) -> Result<DualOp> {
        if tags.len() != ends.len() {
            return Err(Error::input("tag and endofunction parts differ in length"));
        }
        Ok(DualOp { arity, map: tags.iter().copied().zip(ends.iter().copied()).collect() })
    }
}

/// Analytic split of a dual operation: the tag part over the identity,
/// and the endofunction as an arity-1 operation.  This is the closed
/// form the exhaustive [`super::decompose`] search must agree with.
pub fn dual_decompose(t: &DualOp) -> (DualOp, DualOp) {
    let h = DualOp {
        arity: t.arity,
        map: t.map.iter().enumerate().map(|(x, &(tag, _))| (tag, x)).collect(),
    };
    let m = DualOp { arity: 1, map: t.map.iter().map(|&(_, elem)| (0, elem)).collect() };
    (h, m)
}

/// Dual clone over a carrier of `base` points with materialization
/// capped at `arity_bound`.
#[derive(Debug, Clone)]
pub struct DualClone {
    pub base: usize,
    pub arity_bound: usize,
    limits: Limits,
}

/// Carriers above four points explode every downstream sweep, so the
/// constructor refuses them outright rather than deferring to budgets.
pub fn dual_clone_of(base: usize, arity_bound: usize, limits: &Limits) -> Result<DualClone> {
    if base == 0 || base > 4 {
        return Err(Error::input(format!("dual clone carrier {base} outside 1..=4")));
    }
    limits.check_arity(arity_bound)?;
    limits.check_naive(((arity_bound * base) as u64).pow(base as u32))?;
    Ok(DualClone { base, arity_bound, limits: *limits })
}

impl DualClone {
    /// Validated construction from raw map data.
    pub fn op(&self, arity: usize, map: Vec<(usize, usize)>) -> Result<DualOp> {
        if arity == 0 {
            return Err(Error::input("operations need at least one slot"));
        }
        if map.len() != self.base {
            return Err(Error::input(format!(
                "map covers {} points of a {}-point carrier",
                map.len(),
                self.base
            )));
        }
        for &(tag, elem) in &map {
            if tag >= arity || elem >= self.base {
                return Err(Error::input(format!(
                    "entry ({tag}, {elem}) outside arity {arity} and carrier {}",
                    self.base
                )));
            }
        }
        Ok(DualOp { arity, map })
    }

    fn check(&self, t: &DualOp) -> Result<()> {
        if t.arity == 0
            || t.map.len() != self.base
            || t.map.iter().any(|&(tag, elem)| tag >= t.arity || elem >= self.base)
        {
            return Err(Error::input(format!("malformed dual operation {t:?}")));
        }
        Ok(())
    }

    /// Model action on functions out of the carrier: feed one function
    /// per slot and follow the map.
    pub fn eval(&self, t: &DualOp, fs: &[Vec<usize>]) -> Result<Vec<usize>> {
        self.check(t)?;
        if fs.len() != t.arity {
            return Err(Error::input(format!("{} functions for arity {}", fs.len(), t.arity)));
        }
        if fs.iter().any(|f| f.len() != self.base) {
            return Err(Error::input("function domain differs from the carrier"));
        }
        Ok(t.map.iter().map(|&(tag, elem)| fs[tag][elem]).collect())
    }
}

impl Theory for DualClone {
    type Op = DualOp;

    fn arity_bound(&self) -> usize {
        self.arity_bound
    }

    fn ops(&self, arity: usize) -> Result<Vec<DualOp>> {
        if arity == 0 {
            return Err(Error::input("operations need at least one slot"));
        }
        if arity > self.arity_bound {
            return Err(Error::Capacity {
                what: "dual clone arity".into(),
                requested: arity as u64,
                limit: self.arity_bound as u64,
            });
        }
        let vals = arity * self.base;
        let count = (vals as u64).pow(self.base as u32);
        self.limits.check_naive(count)?;
        Ok((0..count)
            .map(|i| DualOp {
                arity,
                map: exec::digits(i, vals, self.base)
                    .into_iter()
                    .map(|v| (v / self.base, v % self.base))
                    .collect(),
            })
            .collect())
    }

    fn arity_of(&self, t: &DualOp) -> usize {
        t.arity
    }

    fn projection(&self, arity: usize, slot: usize) -> Result<DualOp> {
        if arity == 0 || slot >= arity {
            return Err(Error::input(format!("slot {slot} outside arity {arity}")));
        }
        Ok(DualOp { arity, map: (0..self.base).map(|x| (slot, x)).collect() })
    }

    fn substitute(&self, t: &DualOp, u: &[DualOp]) -> Result<DualOp> {
        self.check(t)?;
        if u.len() != t.arity {
            return Err(Error::input(format!(
                "{} inner operations for arity {}",
                u.len(),
                t.arity
            )));
        }
        let arity = u[0].arity;
        for v in u {
            self.check(v)?;
            if v.arity != arity {
                return Err(Error::input("inner operations have mixed arities"));
            }
        }
        Ok(DualOp { arity, map: t.map.iter().map(|&(tag, elem)| u[tag].map[elem]).collect() })
    }
}

/// Model laws on functions out of the carrier into a `target`-point
/// set: projections select their function, and evaluating a composite
/// equals evaluating stepwise.  Oversized sweeps are omitted.
pub fn dual_model_certificate(
    dc: &DualClone,
    target: usize,
    limits: &Limits,
) -> Result<Certificate> {
    if target == 0 {
        return Err(Error::input("model carrier must not be empty"));
    }
    let fs_count = (target as u64)
        .checked_pow(dc.base as u32)
        .ok_or_else(|| Error::input("function space overflows"))?;
    let decode = |code: u64, len: usize| -> Vec<Vec<usize>> {
        exec::digits(code, fs_count as usize, len)
            .into_iter()
            .map(|c| exec::digits(c as u64, target, dc.base))
            .collect()
    };
    let mut cert = Certificate::new();

    for k in 1..=dc.arity_bound {
        let Some(tuples) = fs_count.checked_pow(k as u32) else { continue };
        let Some(space) = (k as u64).checked_mul(tuples) else { continue };
        if space > limits.max_naive {
            continue;
        }
        cert.sweep("model.projection", space, |idx| {
            let slot = (idx / tuples) as usize;
            let fs = decode(idx % tuples, k);
            let bindings = [("k", k as u64), ("slot", slot as u64), ("f", idx % tuples)];
            let p = match dc.projection(k, slot) {
                Ok(p) => p,
                Err(_) => return Some(crate::error::Witness::new("model.projection", &bindings)),
            };
            match dc.eval(&p, &fs) {
                Ok(v) if v == fs[slot] => None,
                _ => Some(crate::error::Witness::new("model.projection", &bindings)),
            }
        });
    }

    for k in 1..=dc.arity_bound {
        let tk = dc.ops(k)?;
        for j in 1..=dc.arity_bound {
            let tj = dc.ops(j)?;
            let Some(un) = (tj.len() as u64).checked_pow(k as u32) else { continue };
            let Some(fn_) = fs_count.checked_pow(j as u32) else { continue };
            let Some(space) = (tk.len() as u64).checked_mul(un).and_then(|s| s.checked_mul(fn_))
            else {
                continue;
            };
            if space > limits.max_naive {
                continue;
            }
            cert.sweep("model.substitution", space, |idx| {
                let ti = (idx / (un * fn_)) as usize;
                let ucode = idx / fn_ % un;
                let fs = decode(idx % fn_, j);
                let t = &tk[ti];
                let u: Vec<DualOp> =
                    exec::digits(ucode, tj.len(), k).into_iter().map(|d| tj[d].clone()).collect();
                let bindings = [
                    ("k", k as u64),
                    ("j", j as u64),
                    ("t", ti as u64),
                    ("u", ucode),
                    ("f", idx % fn_),
                ];
                let direct = dc.substitute(t, &u).and_then(|s| dc.eval(&s, &fs));
                let stepwise = u
                    .iter()
                    .map(|ui| dc.eval(ui, &fs))
                    .collect::<Result<Vec<_>>>()
                    .and_then(|mid| dc.eval(t, &mid));
                match (direct, stepwise) {
                    (Ok(a), Ok(b)) if a == b => None,
                    _ => Some(crate::error::Witness::new("model.substitution", &bindings)),
                }
            });
        }
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn op_counts_match_the_map_space() {
        let limits = Limits::default();
        for base in 1..=4 {
            let dc = dual_clone_of(base, 3, &limits).unwrap();
            for k in 1..=3usize {
                let ops = dc.ops(k).unwrap();
                assert_eq!(ops.len() as u64, ((k * base) as u64).pow(base as u32));
                assert!(ops.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn pair_form_round_trips() {
        let limits = Limits::default();
        let dc = dual_clone_of(3, 2, &limits).unwrap();
        for t in dc.ops(2).unwrap() {
            let (tags, ends) = t.pair_form();
            assert_eq!(DualOp::from_pair(2, &tags, &ends).unwrap(), t);
            let (h, m) = dual_decompose(&t);
            assert_eq!(h.pair_form().0, tags);
            assert_eq!(m.pair_form().1, ends);
        }
    }

    #[test]
    fn model_laws_hold_for_small_targets() {
        let limits = Limits { max_naive: 1 << 20, ..Limits::default() };
        for (base, target) in [(2, 1), (2, 2), (2, 3), (3, 2)] {
            let dc = dual_clone_of(base, 2, &limits).unwrap();
            let cert = dual_model_certificate(&dc, target, &limits).unwrap();
            assert!(cert.ok(), "base {base} target {target}: {:?}", cert.failures());
        }
    }

    #[test]
    fn eval_follows_the_map() {
        let limits = Limits::default();
        let dc = dual_clone_of(2, 2, &limits).unwrap();
        let t = dc.op(2, vec![(1, 0), (0, 1)]).unwrap();
        let f = vec![5, 6];
        let g = vec![7, 8];
        assert_eq!(dc.eval(&t, &[f, g]).unwrap(), vec![7, 6]);
        assert!(dc.eval(&t, &[vec![0, 0]]).is_err());
    }
}
