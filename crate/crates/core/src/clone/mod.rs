//! Finite-arity clone fragments.  A [`Theory`] exposes the operations of
//! each arity up to a bound together with substitution; on top of that
//! interface this module classifies operations (affine, hyperaffine,
//! unary), splits them into hyperaffine and unary parts, extracts the
//! Boolean algebra carried by the binary hyperaffine operations, and
//! matches the hyperaffine fragment with slot distributions.

pub mod bicross;
pub mod dual;

use std::fmt::Debug;

use crate::balg::{boolean_from_ifthenelse, BooleanAlgebra, Elem, IteBoolean, Partition};
use crate::bset::{
    dirac, dist_substitute, distribution_certificate, enumerate_distributions, validate_bset, BSet,
    Distribution,
};
use crate::error::{Error, Witness};
use crate::report::{Certificate, Check};
use crate::{exec, Limits, Result};

/// A finite fragment of an algebraic theory: operations of bounded
/// arity under substitution.  `ops` lists an arity in ascending `Ord`
/// order, so a position in that list is a stable witness key.
/// Substitution and projections must accept arities above the bound
/// (the square law below needs them); only enumeration is bounded.
pub trait Theory: Sync {
    type Op: Clone + Ord + Debug + Send + Sync;

    fn arity_bound(&self) -> usize;

    /// Every operation of the given arity, ascending.
    fn ops(&self, arity: usize) -> Result<Vec<Self::Op>>;

    fn arity_of(&self, t: &Self::Op) -> usize;

    /// The operation returning its `slot`-th argument unchanged.
    fn projection(&self, arity: usize, slot: usize) -> Result<Self::Op>;

    /// `t(u)`: feed the arity-j operations `u` into the slots of `t`.
    fn substitute(&self, t: &Self::Op, u: &[Self::Op]) -> Result<Self::Op>;
}

fn law_witness(law: &str, bindings: &[(&str, u64)]) -> Option<Witness> {
    Some(Witness::new(law, bindings))
}

/// Position of `t` among the operations of its arity.
fn op_index<T: Theory>(th: &T, t: &T::Op) -> Option<u64> {
    let all = th.ops(th.arity_of(t)).ok()?;
    all.binary_search(t).ok().map(|i| i as u64)
}

/// Clone `len` operations out of `list` from a radix-`list.len()` code.
fn tuple<O: Clone>(list: &[O], code: u64, len: usize) -> Vec<O> {
    exec::digits(code, list.len(), len).into_iter().map(|d| list[d].clone()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpClass {
    /// `t(x, .., x) = x`.
    pub affine: bool,
    /// Affine and the square law `t(λi. t(λj. x_ij)) = t(λi. x_ii)`.
    pub hyperaffine: bool,
    /// Some arity-1 operation applied to a single slot.
    pub unary: bool,
}

/// Classify by exact operation equality after substitution.  The square
/// law compares two operations of arity k², which is why the input
/// arity must stay within the context's bound.
pub fn classify_op<T: Theory>(th: &T, t: &T::Op) -> Result<OpClass> {
    let k = th.arity_of(t);
    if k == 0 || k > th.arity_bound() {
        return Err(Error::Capacity {
            what: "classification arity (the square law squares it)".into(),
            requested: k as u64,
            limit: th.arity_bound() as u64,
        });
    }
    let id = th.projection(1, 0)?;
    let affine = th.substitute(t, &vec![id.clone(); k])? == id;
    let hyperaffine = affine && {
        let sq = k * k;
        let inner = (0..k)
            .map(|i| {
                let row =
                    (0..k).map(|j| th.projection(sq, i * k + j)).collect::<Result<Vec<_>>>()?;
                th.substitute(t, &row)
            })
            .collect::<Result<Vec<_>>>()?;
        let diag = (0..k).map(|i| th.projection(sq, i * k + i)).collect::<Result<Vec<_>>>()?;
        th.substitute(t, &inner)? == th.substitute(t, &diag)?
    };
    let mut unary = false;
    'scan: for i in 0..k {
        let slot = th.projection(k, i)?;
        for m in th.ops(1)? {
            if th.substitute(&m, std::slice::from_ref(&slot))? == *t {
                unary = true;
                break 'scan;
            }
        }
    }
    Ok(OpClass { affine, hyperaffine, unary })
}

/// The arity-k hyperaffine operations, in `ops` order.
pub fn hyperaffine_ops<T: Theory>(th: &T, arity: usize) -> Result<Vec<T::Op>> {
    let mut out = Vec::new();
    for t in th.ops(arity)? {
        if classify_op(th, &t)?.hyperaffine {
            out.push(t);
        }
    }
    Ok(out)
}

/// `t^(U)`: the binary operation placing the first argument in the
/// slots of the bitmask `u` and the second everywhere else.
pub fn binary_reduct<T: Theory>(th: &T, t: &T::Op, u: u64) -> Result<T::Op> {
    let k = th.arity_of(t);
    if k < 64 && u >= 1 << k {
        return Err(Error::input(format!("slot set {u:#b} exceeds arity {k}")));
    }
    let x = th.projection(2, 0)?;
    let y = th.projection(2, 1)?;
    let us: Vec<_> = (0..k).map(|i| if u >> i & 1 == 1 { x.clone() } else { y.clone() }).collect();
    th.substitute(t, &us)
}

/// `h(λi. m(x_i))`: apply the arity-1 operation `m` inside every slot
/// of `h`, keeping the arity of `h`.
pub fn unary_composite<T: Theory>(th: &T, h: &T::Op, m: &T::Op) -> Result<T::Op> {
    if th.arity_of(m) != 1 {
        return Err(Error::input("inner operation must have arity 1"));
    }
    let k = th.arity_of(h);
    let us =
        (0..k).map(|i| th.substitute(m, &[th.projection(k, i)?])).collect::<Result<Vec<_>>>()?;
    th.substitute(h, &us)
}

#[derive(Debug, Clone)]
pub struct Decomposition<O> {
    pub hyperaffine: O,
    pub unary: O,
    /// Records the exhaustive search that found exactly one pair.
    pub certificate: Certificate,
}

/// Split `t` as `h(λi. m)` with `h` hyperaffine and `m` of arity 1, by
/// exhaustive search over both factors.  Zero or several matches are
/// law failures carrying every matching pair as (h, m) positions.
pub fn decompose<T: Theory>(th: &T, t: &T::Op) -> Result<Decomposition<T::Op>> {
    let k = th.arity_of(t);
    let hs = hyperaffine_ops(th, k)?;
    let ms = th.ops(1)?;
    let mut matches = Vec::new();
    for (hi, h) in hs.iter().enumerate() {
        for (mi, m) in ms.iter().enumerate() {
            if unary_composite(th, h, m)? == *t {
                matches.push((hi, mi));
            }
        }
    }
    match matches[..] {
        [(hi, mi)] => {
            let mut certificate = Certificate::new();
            certificate.push(Check::pass("decompose.unique", (hs.len() * ms.len()) as u64));
            Ok(Decomposition { hyperaffine: hs[hi].clone(), unary: ms[mi].clone(), certificate })
        }
        [] => {
            let mut bindings = vec![("arity".to_string(), k as u64)];
            if let Some(i) = op_index(th, t) {
                bindings.push(("op".to_string(), i));
            }
            Err(Error::Law(Witness { law: "decompose.none".into(), bindings }))
        }
        _ => {
            let mut bindings = vec![("arity".to_string(), k as u64)];
            for (n, (hi, mi)) in matches.iter().enumerate() {
                bindings.push((format!("h{n}"), *hi as u64));
                bindings.push((format!("m{n}"), *mi as u64));
            }
            Err(Error::Law(Witness { law: "decompose.non-unique".into(), bindings }))
        }
    }
}

/// Sweep every operation of every arity up to the bound and check it
/// has exactly one hyperaffine-unary split.  The factor composites are
/// materialized once per arity, so the sweep is a counting pass.
pub fn decompose_certificate<T: Theory>(th: &T, limits: &Limits) -> Result<Certificate> {
    let mut cert = Certificate::new();
    for k in 1..=th.arity_bound() {
        let all = th.ops(k)?;
        let hs = hyperaffine_ops(th, k)?;
        let ms = th.ops(1)?;
        limits.check_naive((all.len() as u64).saturating_mul((hs.len() * ms.len()) as u64))?;
        let mut composites = Vec::with_capacity(hs.len() * ms.len());
        for h in &hs {
            for m in &ms {
                composites.push(unary_composite(th, h, m)?);
            }
        }
        composites.sort();
        cert.sweep("decompose.unique", all.len() as u64, |i| {
            let t = &all[i as usize];
            let lo = composites.partition_point(|c| c < t);
            let hi = composites.partition_point(|c| c <= t);
            (hi - lo != 1).then(|| {
                Witness::new(
                    "decompose.unique",
                    &[("k", k as u64), ("t", i), ("matches", (hi - lo) as u64)],
                )
            })
        });
    }
    Ok(cert)
}

/// The Boolean algebra carried by the binary hyperaffine fragment:
/// `1 = π₁`, `0 = π₂`, if-then-else is substitution `a(b, c)`.
#[derive(Debug, Clone)]
pub struct CloneBoolean<O> {
    /// Binary hyperaffine operations, ascending; position i is carrier
    /// index i of the algebra inside `ite`.
    pub ops: Vec<O>,
    pub ite: IteBoolean,
}

impl<O: Clone + Ord + Debug> CloneBoolean<O> {
    pub fn algebra(&self) -> &BooleanAlgebra {
        &self.ite.form.algebra
    }

    /// Algebra element named by a binary hyperaffine operation.
    pub fn elem_of(&self, op: &O) -> Result<Elem> {
        let i = self.ops.binary_search(op).map_err(|_| {
            Error::Invariant("operation left the binary hyperaffine fragment".into())
        })?;
        Ok(self.ite.form.to_bits[i])
    }

    /// Binary hyperaffine operation naming an algebra element.
    pub fn op_of(&self, b: Elem) -> &O {
        &self.ops[self.ite.form.from_bits[b as usize]]
    }
}

/// Extract the Boolean algebra of the binary hyperaffine fragment.  The
/// fragment must be closed under substitution and must keep the two
/// binary projections distinct; the five if-then-else laws are swept
/// and the carrier is identified with the powerset of its atoms.
pub fn boolean_from_clone<T: Theory>(th: &T, limits: &Limits) -> Result<CloneBoolean<T::Op>> {
    let ops = hyperaffine_ops(th, 2)?;
    let n = ops.len();
    limits.check_naive((n as u64).saturating_pow(3))?;
    let pos = |t: &T::Op, role: &str| {
        ops.binary_search(t)
            .map_err(|_| Error::Invariant(format!("{role} is not binary hyperaffine")))
    };
    let one = pos(&th.projection(2, 0)?, "first projection")?;
    let zero = pos(&th.projection(2, 1)?, "second projection")?;
    if one == zero {
        return Err(Error::input("degenerate fragment: the two binary projections coincide"));
    }
    let mut table = Vec::with_capacity(n * n * n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let s = th.substitute(&ops[a], &[ops[b].clone(), ops[c].clone()])?;
                match ops.binary_search(&s) {
                    Ok(i) => table.push(i),
                    Err(_) => {
                        return Err(Error::law(
                            "hyperaffine.closed",
                            &[("a", a as u64), ("b", b as u64), ("c", c as u64)],
                        ))
                    }
                }
            }
        }
    }
    let ite = boolean_from_ifthenelse(n, one, zero, &table, limits)?;
    Ok(CloneBoolean { ops, ite })
}

/// The distribution of binary reducts `λi. t^(i)` of a hyperaffine `t`.
pub fn omega_map<T: Theory>(th: &T, cb: &CloneBoolean<T::Op>, t: &T::Op) -> Result<Distribution> {
    if !classify_op(th, t)?.hyperaffine {
        return Err(Error::input("reduct distributions exist only for hyperaffine operations"));
    }
    let k = th.arity_of(t);
    let omega =
        (0..k).map(|i| cb.elem_of(&binary_reduct(th, t, 1 << i)?)).collect::<Result<Vec<_>>>()?;
    let d = Distribution { omega };
    if let Err(e) = distribution_certificate(cb.algebra(), &d)?.require() {
        return Err(Error::Invariant(format!(
            "reducts of a hyperaffine operation must form a distribution: {e}"
        )));
    }
    Ok(d)
}

/// The unique hyperaffine operation whose slot reducts are exactly the
/// parts of `p`, in order.
pub fn canonical_realiser<T: Theory>(
    th: &T,
    cb: &CloneBoolean<T::Op>,
    p: &Partition,
) -> Result<T::Op> {
    if p.base != cb.algebra().one() {
        return Err(Error::input("canonical realisers exist for partitions of the top element"));
    }
    let mut found = Vec::new();
    'ops: for h in hyperaffine_ops(th, p.parts.len())? {
        for (i, &part) in p.parts.iter().enumerate() {
            if cb.elem_of(&binary_reduct(th, &h, 1 << i)?)? != part {
                continue 'ops;
            }
        }
        found.push(h);
    }
    if found.len() == 1 {
        Ok(found.pop().unwrap())
    } else {
        Err(Error::Invariant(format!(
            "partition has {} canonical realisers instead of one",
            found.len()
        )))
    }
}

/// All arity-j operations as a carrier acted on by the extracted
/// algebra: `b(t, u)` substitutes `t, u` into the binary operation
/// named by `b`.
pub fn ops_bset<T: Theory>(
    th: &T,
    cb: &CloneBoolean<T::Op>,
    arity: usize,
    limits: &Limits,
) -> Result<BSet> {
    let carrier = th.ops(arity)?;
    let n = carrier.len();
    let alg = *cb.algebra();
    let bn = alg.size() as u64;
    let nn = n as u64;
    // This is the validation sweep budget; checking it before building
    // the table keeps capacity failures allocation-free.
    limits.check_naive((bn * nn.saturating_pow(3)).max(bn * bn * nn * nn))?;
    let mut action = Vec::with_capacity(alg.size() * n * n);
    for b in alg.elements() {
        let op = cb.op_of(b);
        for x in &carrier {
            for y in &carrier {
                let z = th.substitute(op, &[x.clone(), y.clone()])?;
                let zi = carrier
                    .binary_search(&z)
                    .map_err(|_| Error::Invariant("substitution left the arity class".into()))?;
                action.push(zi);
            }
        }
    }
    validate_bset(alg, n, action, limits)
}

/// Substitution laws of the fragment: projections select their
/// argument, substituting the projections changes nothing, and the two
/// bracketings of a double substitution agree.  Sweeps whose tuple
/// space exceeds the search budget are omitted, never sampled; each
/// check records the space it actually covered.
pub fn theory_certificate<T: Theory>(th: &T, limits: &Limits) -> Result<Certificate> {
    let bound = th.arity_bound();
    let mut lists = Vec::with_capacity(bound);
    for k in 1..=bound {
        lists.push(th.ops(k)?);
    }
    let size = |k: usize| lists[k - 1].len() as u64;
    let mut cert = Certificate::new();

    for k in 1..=bound {
        let tk = &lists[k - 1];
        let projs = (0..k).map(|i| th.projection(k, i)).collect::<Result<Vec<_>>>()?;
        cert.sweep("theory.unit", size(k), |i| {
            let t = &tk[i as usize];
            match th.substitute(t, &projs) {
                Ok(s) if s == *t => None,
                _ => law_witness("theory.unit", &[("k", k as u64), ("t", i)]),
            }
        });
    }

    for k in 1..=bound {
        for j in 1..=bound {
            let Some(tuples) = size(j).checked_pow(k as u32) else { continue };
            let Some(space) = (k as u64).checked_mul(tuples) else { continue };
            if space > limits.max_naive {
                continue;
            }
            let tj = &lists[j - 1];
            cert.sweep("theory.projection", space, |idx| {
                let slot = (idx / tuples) as usize;
                let code = idx % tuples;
                let u = tuple(tj, code, k);
                let bindings =
                    [("k", k as u64), ("j", j as u64), ("slot", slot as u64), ("u", code)];
                let Ok(p) = th.projection(k, slot) else {
                    return law_witness("theory.projection", &bindings);
                };
                match th.substitute(&p, &u) {
                    Ok(s) if s == u[slot] => None,
                    _ => law_witness("theory.projection", &bindings),
                }
            });
        }
    }

    for k in 1..=bound {
        for j in 1..=bound {
            for l in 1..=bound {
                let Some(un) = size(j).checked_pow(k as u32) else { continue };
                let Some(vn) = size(l).checked_pow(j as u32) else { continue };
                let Some(space) = size(k).checked_mul(un).and_then(|s| s.checked_mul(vn)) else {
                    continue;
                };
                if space > limits.max_naive {
                    continue;
                }
                let (tk, tj, tl) = (&lists[k - 1], &lists[j - 1], &lists[l - 1]);
                cert.sweep("theory.assoc", space, |idx| {
                    let ti = idx / (un * vn);
                    let ucode = idx / vn % un;
                    let vcode = idx % vn;
                    let t = &tk[ti as usize];
                    let u = tuple(tj, ucode, k);
                    let v = tuple(tl, vcode, j);
                    let bindings = [
                        ("k", k as u64),
                        ("j", j as u64),
                        ("l", l as u64),
                        ("t", ti),
                        ("u", ucode),
                        ("v", vcode),
                    ];
                    let lhs = th.substitute(t, &u).and_then(|tu| th.substitute(&tu, &v));
                    let rhs = u
                        .iter()
                        .map(|ui| th.substitute(ui, &v))
                        .collect::<Result<Vec<_>>>()
                        .and_then(|inner| th.substitute(t, &inner));
                    match (lhs, rhs) {
                        (Ok(a), Ok(b)) if a == b => None,
                        _ => law_witness("theory.assoc", &bindings),
                    }
                });
            }
        }
    }
    Ok(cert)
}

/// Laws of the hyperaffine fragment against the extracted algebra:
/// affine operations pass the square law, the fragment is closed under
/// substitution, any two hyperaffine operations commute, slot reducts
/// determine the operation, sit pairwise disjoint, join over slot
/// sets, and substitution output is the glue of its arguments along
/// the reduct distribution.
pub fn hyperaffine_certificate<T: Theory>(
    th: &T,
    cb: &CloneBoolean<T::Op>,
    limits: &Limits,
) -> Result<Certificate> {
    let bound = th.arity_bound();
    let alg = cb.algebra();
    let mut cert = Certificate::new();
    let mut hs = Vec::with_capacity(bound);
    for k in 1..=bound {
        hs.push(hyperaffine_ops(th, k)?);
    }
    let hsize = |k: usize| hs[k - 1].len() as u64;

    for k in 1..=bound {
        let all = th.ops(k)?;
        cert.sweep("hyperaffine.affine", all.len() as u64, |i| {
            match classify_op(th, &all[i as usize]) {
                Ok(c) if !c.affine || c.hyperaffine => None,
                _ => law_witness("hyperaffine.affine", &[("k", k as u64), ("t", i)]),
            }
        });
    }

    for k in 1..=bound {
        for j in 1..=bound {
            let Some(tuples) = hsize(j).checked_pow(k as u32) else { continue };
            let Some(space) = hsize(k).checked_mul(tuples) else { continue };
            if space > limits.max_naive {
                continue;
            }
            let (hk, hj) = (&hs[k - 1], &hs[j - 1]);
            cert.sweep("hyperaffine.closed", space, |idx| {
                let t = &hk[(idx / tuples) as usize];
                let u = tuple(hj, idx % tuples, k);
                let bindings =
                    [("k", k as u64), ("j", j as u64), ("t", idx / tuples), ("u", idx % tuples)];
                match th.substitute(t, &u).and_then(|s| classify_op(th, &s)) {
                    Ok(c) if c.hyperaffine => None,
                    _ => law_witness("hyperaffine.closed", &bindings),
                }
            });
        }
    }

    for k in 1..=bound {
        for j in 1..=bound {
            let (hk, hj) = (&hs[k - 1], &hs[j - 1]);
            let kj = k * j;
            cert.sweep("hyperaffine.commute", hsize(k) * hsize(j), |idx| {
                let t = &hk[(idx / hsize(j)) as usize];
                let u = &hj[(idx % hsize(j)) as usize];
                let bindings = [
                    ("k", k as u64),
                    ("j", j as u64),
                    ("t", idx / hsize(j)),
                    ("u", idx % hsize(j)),
                ];
                let build = |outer: &T::Op, inner: &T::Op, transposed: bool| {
                    let rows = (0..th.arity_of(outer))
                        .map(|a| {
                            let cols = (0..th.arity_of(inner))
                                .map(|b| {
                                    let (i, jj) = if transposed { (b, a) } else { (a, b) };
                                    th.projection(kj, i * j + jj)
                                })
                                .collect::<Result<Vec<_>>>()?;
                            th.substitute(inner, &cols)
                        })
                        .collect::<Result<Vec<_>>>()?;
                    th.substitute(outer, &rows)
                };
                match (build(t, u, false), build(u, t, true)) {
                    (Ok(a), Ok(b)) if a == b => None,
                    _ => law_witness("hyperaffine.commute", &bindings),
                }
            });
        }
    }

    for k in 1..=bound {
        let hk = &hs[k - 1];
        cert.sweep("hyperaffine.reducts-determine", hsize(k) * hsize(k), |idx| {
            let t = &hk[(idx / hsize(k)) as usize];
            let u = &hk[(idx % hsize(k)) as usize];
            if t == u {
                return None;
            }
            let equal = (0..k).all(|i| {
                matches!(
                    (binary_reduct(th, t, 1 << i), binary_reduct(th, u, 1 << i)),
                    (Ok(a), Ok(b)) if a == b
                )
            });
            equal.then(|| {
                Witness::new(
                    "hyperaffine.reducts-determine",
                    &[("k", k as u64), ("t", idx / hsize(k)), ("u", idx % hsize(k))],
                )
            })
        });

        let kk = (k * k) as u64;
        cert.sweep("hyperaffine.reducts-disjoint", hsize(k) * kk, |idx| {
            let t = &hk[(idx / kk) as usize];
            let i = (idx % kk / k as u64) as usize;
            let j = (idx % kk % k as u64) as usize;
            if i == j {
                return None;
            }
            let bindings = [("k", k as u64), ("t", idx / kk), ("i", i as u64), ("j", j as u64)];
            let meet = binary_reduct(th, t, 1 << i)
                .and_then(|a| Ok((cb.elem_of(&a)?, cb.elem_of(&binary_reduct(th, t, 1 << j)?)?)))
                .map(|(a, b)| alg.meet(a, b));
            match meet {
                Ok(m) if m == alg.zero() => None,
                _ => law_witness("hyperaffine.reducts-disjoint", &bindings),
            }
        });

        let masks = 1u64 << k;
        cert.sweep("hyperaffine.reduct-join", hsize(k) * masks, |idx| {
            let t = &hk[(idx / masks) as usize];
            let mask = idx % masks;
            let bindings = [("k", k as u64), ("t", idx / masks), ("mask", mask)];
            let whole = match binary_reduct(th, t, mask).and_then(|r| cb.elem_of(&r)) {
                Ok(e) => e,
                Err(_) => return law_witness("hyperaffine.reduct-join", &bindings),
            };
            let mut join = alg.zero();
            for i in 0..k {
                if mask >> i & 1 == 1 {
                    match binary_reduct(th, t, 1 << i).and_then(|r| cb.elem_of(&r)) {
                        Ok(e) => join = alg.join(join, e),
                        Err(_) => return law_witness("hyperaffine.reduct-join", &bindings),
                    }
                }
            }
            (whole != join).then(|| Witness::new("hyperaffine.reduct-join", &bindings))
        });
    }

    for j in 1..=bound {
        let bs = match ops_bset(th, cb, j, limits) {
            Ok(bs) => bs,
            Err(Error::Capacity { .. }) => continue,
            Err(e) => return Err(e),
        };
        let tj = th.ops(j)?;
        let nj = tj.len() as u64;
        for k in 1..=bound {
            let omegas =
                hs[k - 1].iter().map(|h| omega_map(th, cb, h)).collect::<Result<Vec<_>>>()?;
            let Some(tuples) = nj.checked_pow(k as u32) else { continue };
            let Some(space) = hsize(k).checked_mul(tuples).and_then(|s| s.checked_mul(nj)) else {
                continue;
            };
            if space > limits.max_naive {
                continue;
            }
            let hk = &hs[k - 1];
            // h(x) must satisfy every slot congruence and be alone in
            // doing so; each candidate z is one instance.
            cert.sweep("hyperaffine.glue-form", space, |idx| {
                let hi = (idx / (tuples * nj)) as usize;
                let code = idx / nj % tuples;
                let z = (idx % nj) as usize;
                let bindings = [
                    ("k", k as u64),
                    ("j", j as u64),
                    ("h", hi as u64),
                    ("x", code),
                    ("z", z as u64),
                ];
                let xs = exec::digits(code, tj.len(), k);
                let glued = match th.substitute(&hk[hi], &tuple(&tj, code, k)) {
                    Ok(g) => g,
                    Err(_) => return law_witness("hyperaffine.glue-form", &bindings),
                };
                let Ok(gi) = tj.binary_search(&glued) else {
                    return law_witness("hyperaffine.glue-form", &bindings);
                };
                let congruent = (0..k).all(|i| bs.eq(omegas[hi].omega[i], z, xs[i]));
                (congruent != (z == gi)).then(|| Witness::new("hyperaffine.glue-form", &bindings))
            });
        }
    }
    Ok(cert)
}

/// The reduct-distribution view of the hyperaffine fragment: the slot
/// projections map to point distributions, the map onto distributions
/// is a bijection at every arity, and it turns substitution into
/// distribution substitution.
pub fn omega_certificate<T: Theory>(
    th: &T,
    cb: &CloneBoolean<T::Op>,
    limits: &Limits,
) -> Result<Certificate> {
    let bound = th.arity_bound();
    let alg = cb.algebra();
    let mut cert = Certificate::new();
    let mut hs = Vec::with_capacity(bound);
    let mut omegas = Vec::with_capacity(bound);
    for k in 1..=bound {
        let ops = hyperaffine_ops(th, k)?;
        let os = ops.iter().map(|h| omega_map(th, cb, h)).collect::<Result<Vec<_>>>()?;
        hs.push(ops);
        omegas.push(os);
    }

    for k in 1..=bound {
        let (hk, ok) = (&hs[k - 1], &omegas[k - 1]);
        cert.sweep("omega.dirac", k as u64, |i| {
            let bindings = [("k", k as u64), ("slot", i)];
            let Ok(p) = th.projection(k, i as usize) else {
                return law_witness("omega.dirac", &bindings);
            };
            match hk.binary_search(&p) {
                Ok(pos) if ok[pos] == dirac(alg, k, i as usize) => None,
                _ => law_witness("omega.dirac", &bindings),
            }
        });

        let mut sorted = ok.clone();
        sorted.sort();
        let enumerated = enumerate_distributions(alg, k, limits)?;
        let distinct = sorted.windows(2).all(|w| w[0] != w[1]);
        let witness = (!(distinct && sorted == enumerated))
            .then(|| Witness::new("omega.bijective", &[("k", k as u64)]));
        cert.push(Check::of("omega.bijective", (hk.len()).max(enumerated.len()) as u64, witness));
    }

    for k in 1..=bound {
        for j in 1..=bound {
            let (hk, ok) = (&hs[k - 1], &omegas[k - 1]);
            let (hj, oj) = (&hs[j - 1], &omegas[j - 1]);
            let Some(tuples) = (hj.len() as u64).checked_pow(k as u32) else { continue };
            let Some(space) = (hk.len() as u64).checked_mul(tuples) else { continue };
            if space > limits.max_naive {
                continue;
            }
            cert.sweep("omega.substitution", space, |idx| {
                let ti = (idx / tuples) as usize;
                let code = idx % tuples;
                let bindings = [("k", k as u64), ("j", j as u64), ("t", ti as u64), ("u", code)];
                let us = exec::digits(code, hj.len(), k);
                let composite =
                    th.substitute(&hk[ti], &tuple(hj, code, k)).and_then(|s| omega_map(th, cb, &s));
                let gammas: Vec<_> = us.iter().map(|&d| oj[d].clone()).collect();
                let direct = dist_substitute(alg, &ok[ti], &gammas);
                match (composite, direct) {
                    (Ok(a), Ok(b)) if a == b => None,
                    _ => law_witness("omega.substitution", &bindings),
                }
            });
        }
    }
    Ok(cert)
}

/// Extract the matched pair presented by a theory and certify the
/// operation-level laws along the way: the arity-1 operations form the
/// monoid, the binary hyperaffine fragment the algebra, and the unary
/// factor of decomposition the star action.  The returned certificate
/// also checks that star and the collapse of unary tuples, viewed
/// through reduct distributions, obey the pair's own operation laws.
pub fn extract_matched_theory<T: Theory>(
    th: &T,
    limits: &Limits,
) -> Result<(crate::matched::MatchedTheoryData, Certificate)> {
    let pair = crate::matched::theta_from_clone(th, limits)?;
    let data = crate::matched::MatchedTheoryData { pair };
    let cb = boolean_from_clone(th, limits)?;
    let mut cert = theory_certificate(th, limits)?;
    cert.merge(decompose_certificate(th, limits)?);
    cert.merge(hyperaffine_certificate(th, &cb, limits)?);
    cert.merge(omega_certificate(th, &cb, limits)?);

    let ms = th.ops(1)?;
    let sz = ms.len() as u64;
    for k in 1..=th.arity_bound() {
        let hs = hyperaffine_ops(th, k)?;
        let omegas = hs.iter().map(|h| omega_map(th, &cb, h)).collect::<Result<Vec<_>>>()?;
        let hn = hs.len() as u64;

        // the unary factor survives composition and star moves the
        // reduct distribution pointwise
        if let Some(space) = hn.checked_mul(sz).filter(|&s| s <= limits.max_naive) {
            cert.sweep("extract.star-pointwise", space, |i| {
                let hi = (i / sz) as usize;
                let m = (i % sz) as usize;
                let bindings = [("k", k as u64), ("h", hi as u64), ("m", m as u64)];
                let Ok(composite) = th.substitute(&ms[m], &[hs[hi].clone()]) else {
                    return law_witness("extract.star-pointwise", &bindings);
                };
                let Ok(dec) = decompose(th, &composite) else {
                    return law_witness("extract.star-pointwise", &bindings);
                };
                if dec.unary != ms[m] {
                    return law_witness("extract.star-pointwise", &bindings);
                }
                match omega_map(th, &cb, &dec.hyperaffine) {
                    Ok(o) if o == data.mstar(m, &omegas[hi]) => None,
                    _ => law_witness("extract.star-pointwise", &bindings),
                }
            });
        }

        // substituting a unary tuple collapses to the glued element
        let Some(tuples) = sz.checked_pow(k as u32) else { continue };
        if let Some(space) = hn.checked_mul(tuples).filter(|&s| s <= limits.max_naive) {
            cert.sweep("extract.tri-glue", space, |i| {
                let hi = (i / tuples) as usize;
                let code = i % tuples;
                let ns = exec::digits(code, ms.len(), k);
                let bindings = [("k", k as u64), ("h", hi as u64), ("ns", code)];
                let us: Vec<T::Op> = ns.iter().map(|&d| ms[d].clone()).collect();
                let Ok(glued) = th.substitute(&hs[hi], &us) else {
                    return law_witness("extract.tri-glue", &bindings);
                };
                match (ms.binary_search(&glued), data.rtri(&omegas[hi], &ns)) {
                    (Ok(gi), Ok(v)) if gi == v => None,
                    _ => law_witness("extract.tri-glue", &bindings),
                }
            });
        }
    }
    cert.merge(crate::matched::matched_theory_certificate(&data, th.arity_bound(), limits)?);
    Ok((data, cert))
}

#[cfg(test)]
mod tests {
    use super::dual::{dual_clone_of, dual_decompose, DualOp};
    use super::*;
    use crate::balg::enumerate_partitions;

    fn tight() -> Limits {
        Limits { max_naive: 1 << 20, ..Limits::default() }
    }

    #[test]
    fn projections_classify_as_hyperaffine() {
        let dc = dual_clone_of(2, 3, &Limits::default()).unwrap();
        for k in 1..=3 {
            for i in 0..k {
                let p = dc.projection(k, i).unwrap();
                let c = classify_op(&dc, &p).unwrap();
                assert!(c.affine && c.hyperaffine && c.unary);
            }
        }
    }

    #[test]
    fn substitution_matches_pointwise_evaluation() {
        let limits = Limits::default();
        let dc = dual_clone_of(2, 3, &limits).unwrap();
        // Constant tag with a swap: feeding the identity back in leaves
        // the operation unchanged, computed by hand from the map form.
        let t = dc.op(1, vec![(0, 1), (0, 0)]).unwrap();
        let id = dc.projection(1, 0).unwrap();
        assert_eq!(dc.substitute(&t, std::slice::from_ref(&id)).unwrap(), t);

        let pick = dc.op(2, vec![(0, 0), (1, 1)]).unwrap();
        let swap = dc.op(1, vec![(0, 1), (0, 0)]).unwrap();
        let zero = dc.op(1, vec![(0, 0), (0, 0)]).unwrap();
        let composite = dc.substitute(&pick, &[swap.clone(), zero.clone()]).unwrap();
        assert_eq!(composite, dc.op(1, vec![(0, 1), (0, 0)]).unwrap());

        // One associativity instance against the other bracketing.
        let lhs = dc.substitute(&composite, std::slice::from_ref(&swap)).unwrap();
        let inner: Vec<DualOp> = [&swap, &zero]
            .iter()
            .map(|u| dc.substitute(u, std::slice::from_ref(&swap)).unwrap())
            .collect();
        assert_eq!(lhs, dc.substitute(&pick, &inner).unwrap());
    }

    #[test]
    fn theory_laws_hold_on_small_dual_clones() {
        let limits = tight();
        for base in 1..=2 {
            let dc = dual_clone_of(base, 2, &limits).unwrap();
            let cert = theory_certificate(&dc, &limits).unwrap();
            assert!(cert.ok(), "{:?}", cert.failures());
            assert!(cert.instances() > 0);
        }
    }

    #[test]
    fn classification_tracks_the_endofunction_part() {
        let limits = Limits::default();
        for (base, bound) in [(2, 3), (3, 2)] {
            let dc = dual_clone_of(base, bound, &limits).unwrap();
            for k in 1..=bound {
                for t in dc.ops(k).unwrap() {
                    let c = classify_op(&dc, &t).unwrap();
                    let identity_part = t.map.iter().enumerate().all(|(x, &(_, m))| m == x);
                    assert_eq!(c.affine, identity_part, "{t:?}");
                    assert_eq!(c.hyperaffine, identity_part, "{t:?}");
                }
            }
        }
    }

    #[test]
    fn reducts_of_affine_ops_select_projections() {
        let limits = Limits::default();
        let dc = dual_clone_of(2, 3, &limits).unwrap();
        let x = dc.projection(2, 0).unwrap();
        let y = dc.projection(2, 1).unwrap();
        for t in hyperaffine_ops(&dc, 3).unwrap() {
            assert_eq!(binary_reduct(&dc, &t, 0b111).unwrap(), x);
            assert_eq!(binary_reduct(&dc, &t, 0).unwrap(), y);
        }
        assert!(binary_reduct(&dc, &x, 0b100).is_err());
    }

    #[test]
    fn every_op_decomposes_uniquely() {
        let limits = Limits::default();
        for base in [2, 3] {
            let dc = dual_clone_of(base, 3, &limits).unwrap();
            let cert = decompose_certificate(&dc, &limits).unwrap();
            assert!(cert.ok(), "{:?}", cert.failures());
            // The searched split agrees with the tag/endofunction split.
            for k in 1..=3 {
                for t in dc.ops(k).unwrap() {
                    let d = decompose(&dc, &t).unwrap();
                    let (h, m) = dual_decompose(&t);
                    assert_eq!(d.hyperaffine, h);
                    assert_eq!(d.unary, m);
                    assert!(d.certificate.ok());
                }
            }
        }
    }

    #[test]
    fn decompose_trivial_cases() {
        let limits = Limits::default();
        let dc = dual_clone_of(2, 3, &limits).unwrap();
        // Arity-1 operations split as (identity projection, themselves).
        for m in dc.ops(1).unwrap() {
            let d = decompose(&dc, &m).unwrap();
            assert_eq!(d.hyperaffine, dc.projection(1, 0).unwrap());
            assert_eq!(d.unary, m);
        }
        // Hyperaffine operations split as (themselves, identity).
        for h in hyperaffine_ops(&dc, 2).unwrap() {
            let d = decompose(&dc, &h).unwrap();
            assert_eq!(d.hyperaffine, h);
            assert_eq!(d.unary, dc.projection(1, 0).unwrap());
        }
    }

    #[test]
    fn boolean_extraction_names_subsets() {
        let limits = Limits::default();
        for base in 1..=3 {
            let dc = dual_clone_of(base, 2, &limits).unwrap();
            let cb = boolean_from_clone(&dc, &limits).unwrap();
            assert_eq!(cb.ops.len(), 1 << base);
            assert_eq!(cb.algebra().atoms(), base as u32);
            assert!(cb.ite.certificate.ok());
            // Carrier points are the atoms: an operation names the set
            // of points its tag part sends to the first slot.
            for op in &cb.ops {
                let bits = op
                    .map
                    .iter()
                    .enumerate()
                    .filter(|(_, &(h, _))| h == 0)
                    .fold(0 as Elem, |acc, (x, _)| acc | 1 << x);
                assert_eq!(cb.elem_of(op).unwrap(), bits);
            }
            let one = dc.projection(2, 0).unwrap();
            let zero = dc.projection(2, 1).unwrap();
            assert_eq!(cb.elem_of(&one).unwrap(), cb.algebra().one());
            assert_eq!(cb.elem_of(&zero).unwrap(), cb.algebra().zero());
        }
    }

    #[test]
    fn omega_laws_hold() {
        let limits = tight();
        let dc = dual_clone_of(2, 2, &limits).unwrap();
        let cb = boolean_from_clone(&dc, &limits).unwrap();
        let cert = omega_certificate(&dc, &cb, &limits).unwrap();
        assert!(cert.ok(), "{:?}", cert.failures());
        let non_affine = dc.op(1, vec![(0, 0), (0, 0)]).unwrap();
        assert!(omega_map(&dc, &cb, &non_affine).is_err());
    }

    #[test]
    fn canonical_realisers_match_the_tag_formula() {
        let limits = Limits::default();
        for base in [2, 3] {
            let dc = dual_clone_of(base, 3, &limits).unwrap();
            let cb = boolean_from_clone(&dc, &limits).unwrap();
            let alg = *cb.algebra();
            for p in enumerate_partitions(&alg, alg.one()) {
                if p.parts.len() > 3 {
                    continue;
                }
                let r = canonical_realiser(&dc, &cb, &p).unwrap();
                let tags: Vec<usize> = (0..base)
                    .map(|x| p.parts.iter().position(|&b| b >> x & 1 == 1).unwrap())
                    .collect();
                let ends: Vec<usize> = (0..base).collect();
                assert_eq!(r, DualOp::from_pair(p.parts.len(), &tags, &ends).unwrap());
                // The reduct distribution is the inclusion of the parts.
                let omega = omega_map(&dc, &cb, &r).unwrap();
                assert_eq!(omega.omega, p.parts);
            }
            let trivial = Partition::new(&alg, alg.one(), &[alg.one()]).unwrap();
            assert_eq!(
                canonical_realiser(&dc, &cb, &trivial).unwrap(),
                dc.projection(1, 0).unwrap()
            );
        }
    }

    #[test]
    fn hyperaffine_fragment_laws_hold() {
        let limits = tight();
        for (base, bound) in [(2, 3), (3, 2)] {
            let dc = dual_clone_of(base, bound, &limits).unwrap();
            let cb = boolean_from_clone(&dc, &limits).unwrap();
            let cert = hyperaffine_certificate(&dc, &cb, &limits).unwrap();
            assert!(cert.ok(), "{:?}", cert.failures());
            let tags: Vec<&str> = cert.checked.iter().map(|c| c.tag.as_str()).collect();
            for expected in [
                "hyperaffine.affine",
                "hyperaffine.closed",
                "hyperaffine.commute",
                "hyperaffine.reducts-determine",
                "hyperaffine.reducts-disjoint",
                "hyperaffine.reduct-join",
                "hyperaffine.glue-form",
            ] {
                assert!(tags.contains(&expected), "missing {expected}");
            }
        }
    }

    #[test]
    fn capacity_and_shape_guards() {
        let limits = Limits::default();
        assert!(dual_clone_of(0, 2, &limits).is_err());
        assert!(dual_clone_of(5, 2, &limits).is_err());
        assert!(dual_clone_of(2, 0, &limits).is_err());
        let dc = dual_clone_of(2, 3, &limits).unwrap();
        assert!(matches!(dc.ops(4), Err(Error::Capacity { .. })));
        let wide = dc.op(4, vec![(3, 0), (0, 1)]).unwrap();
        assert!(matches!(classify_op(&dc, &wide), Err(Error::Capacity { .. })));
        let id = dc.projection(1, 0).unwrap();
        assert!(dc.substitute(&id, &[]).is_err());
        assert!(dc.op(2, vec![(2, 0), (0, 0)]).is_err());
        assert!(dc.op(2, vec![(0, 2), (0, 0)]).is_err());
        assert!(dc.op(2, vec![(0, 0)]).is_err());
    }
}
