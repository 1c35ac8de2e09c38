//! Finite Boolean algebras, their partitions, and their homomorphisms.
//!
//! A finite Boolean algebra is the powerset of its atoms, so elements are
//! bit vectors ([`Elem`], at most 16 atoms) and the lattice operations are
//! bitwise.  Elements order themselves by numeric value; that ordering is
//! used everywhere enumeration order matters.
//!
//! Partitions of an element are sets of pairwise disjoint nonzero parts
//! joining to it, i.e. set partitions of its atom set.  In the finite
//! case the collection of all partitions of 1 is the unique
//! zero-dimensional topology on the algebra; that collapse is *verified*
//! by the partition tests and the acceptance suite, not assumed.
//!
//! [`boolean_from_ifthenelse`] recovers a Boolean algebra from a bare
//! ternary operation via Dicker's five-axiom characterization, which is
//! how Boolean structure is later extracted from clone fragments.

use crate::error::{Error, Result, Witness};
use crate::exec;
use crate::report::{Certificate, Check};
use crate::Limits;

/// Element of a finite Boolean algebra: a bit vector over the atoms.
pub type Elem = u16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BooleanAlgebra {
    atoms: u32,
}

impl BooleanAlgebra {
    /// Powerset algebra on `atoms` generators, `1 <= atoms <= 16`.
    pub fn new(atoms: u32) -> Result<Self> {
        if atoms == 0 || atoms > 16 {
            return Err(Error::input(format!("atom count {atoms} outside 1..=16")));
        }
        Ok(BooleanAlgebra { atoms })
    }

    pub fn atoms(&self) -> u32 {
        self.atoms
    }

    pub fn size(&self) -> usize {
        1usize << self.atoms
    }

    pub fn zero(&self) -> Elem {
        0
    }

    pub fn one(&self) -> Elem {
        if self.atoms == 16 {
            u16::MAX
        } else {
            (1u16 << self.atoms) - 1
        }
    }

    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        a & b
    }

    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        a | b
    }

    pub fn neg(&self, a: Elem) -> Elem {
        !a & self.one()
    }

    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        a & b == a
    }

    pub fn atom(&self, i: u32) -> Elem {
        debug_assert!(i < self.atoms);
        1 << i
    }

    pub fn contains(&self, e: Elem) -> bool {
        self.leq(e, self.one())
    }

    pub fn check_elem(&self, e: Elem) -> Result<()> {
        if self.contains(e) {
            Ok(())
        } else {
            Err(Error::input(format!("element {e} outside algebra with {} atoms", self.atoms)))
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..=self.one()
    }

    /// Indices of the atoms below `e`.
    pub fn atoms_of(&self, e: Elem) -> impl Iterator<Item = u32> + '_ {
        (0..self.atoms).filter(move |i| e & (1 << i) != 0)
    }

    /// Conditioned disjunction `a(b, c) = (a and b) or (a' and c)`, the
    /// canonical action of the algebra on itself.
    pub fn cond(&self, a: Elem, b: Elem, c: Elem) -> Elem {
        (a & b) | (self.neg(a) & c)
    }
}

// ---------------------------------------------------------------------
// Partitions

/// Partition of `base`: pairwise disjoint nonzero parts joining to `base`.
/// Parts are sorted ascending, so the least part comes first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition {
    pub base: Elem,
    pub parts: Vec<Elem>,
}

impl Partition {
    /// Validate and normalize.  Zero parts are dropped first (the set may
    /// be an extended partition), then the partition laws must hold.
    pub fn new(alg: &BooleanAlgebra, base: Elem, parts: &[Elem]) -> Result<Partition> {
        let parts = normalize_parts(parts);
        validate_partition(alg, base, &parts)?.require()?;
        Ok(Partition { base, parts })
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Index of the part containing atom-set `e`, when one does.
    pub fn part_over(&self, alg: &BooleanAlgebra, e: Elem) -> Option<usize> {
        self.parts.iter().position(|&p| alg.leq(e, p))
    }
}

/// Drop zeros, sort ascending.  Duplicate nonzero parts are kept so the
/// validator can point at them.
pub fn normalize_parts(parts: &[Elem]) -> Vec<Elem> {
    let mut out: Vec<Elem> = parts.iter().copied().filter(|&p| p != 0).collect();
    out.sort_unstable();
    out
}

/// Check the partition laws for `parts` against `base`.
///
/// The final check records that a valid partition of `base` is a local
/// partition of `base`: in a finite algebra restriction to `base` is
/// itself a partition, so the local and global notions coincide.
pub fn validate_partition(alg: &BooleanAlgebra, base: Elem, parts: &[Elem]) -> Result<Certificate> {
    alg.check_elem(base)?;
    for &p in parts {
        alg.check_elem(p)?;
    }
    let mut cert = Certificate::new();

    let nonzero = parts.iter().position(|&p| p == 0);
    cert.push(Check::of(
        "partition.nonzero",
        parts.len() as u64,
        nonzero.map(|i| Witness::new("partition.nonzero", &[("part", i as u64)])),
    ));

    let n = parts.len();
    cert.sweep("partition.disjoint", (n * n) as u64, |idx| {
        let (i, j) = ((idx / n as u64) as usize, (idx % n as u64) as usize);
        if i < j && alg.meet(parts[i], parts[j]) != 0 {
            Some(Witness::new(
                "partition.disjoint",
                &[("left", parts[i] as u64), ("right", parts[j] as u64)],
            ))
        } else {
            None
        }
    });

    let joined = parts.iter().fold(0, |acc, &p| alg.join(acc, p));
    cert.push(Check::of(
        "partition.join",
        1,
        (joined != base).then(|| {
            Witness::new("partition.join", &[("got", joined as u64), ("base", base as u64)])
        }),
    ));

    let valid = cert.ok();
    cert.push(Check::of(
        "partition.local-of-base",
        1,
        (!valid).then(|| Witness::new("partition.local-of-base", &[("base", base as u64)])),
    ));
    Ok(cert)
}

/// All partitions of `base`, i.e. all set partitions of its atoms.
/// Ordered by part count, then lexicographically on the sorted parts.
pub fn enumerate_partitions(alg: &BooleanAlgebra, base: Elem) -> Vec<Partition> {
    let atoms: Vec<Elem> = alg.atoms_of(base).map(|i| alg.atom(i)).collect();
    let mut out: Vec<Partition> = Vec::new();
    if atoms.is_empty() {
        return out;
    }
    // Restricted-growth enumeration: each atom joins an existing part or
    // opens a new one.
    fn grow(atoms: &[Elem], idx: usize, parts: &mut Vec<Elem>, out: &mut Vec<Vec<Elem>>) {
        if idx == atoms.len() {
            out.push(parts.clone());
            return;
        }
        for i in 0..parts.len() {
            parts[i] |= atoms[idx];
            grow(atoms, idx + 1, parts, out);
            parts[i] &= !atoms[idx];
        }
        parts.push(atoms[idx]);
        grow(atoms, idx + 1, parts, out);
        parts.pop();
    }
    let mut raw = Vec::new();
    grow(&atoms, 0, &mut Vec::new(), &mut raw);
    for mut parts in raw {
        parts.sort_unstable();
        out.push(Partition { base, parts });
    }
    out.sort_by(|a, b| (a.parts.len(), &a.parts).cmp(&(b.parts.len(), &b.parts)));
    out
}

/// Common refinement `{b meet c : b in p, c in qs[b]}` with zeros dropped.
/// `p` and every `qs[i]` must be partitions of 1; the refinement is again
/// a partition of 1.
pub fn refine_partitions(
    alg: &BooleanAlgebra,
    p: &Partition,
    qs: &[Partition],
) -> Result<Partition> {
    if p.base != alg.one() {
        return Err(Error::input("refinement expects a partition of 1"));
    }
    if qs.len() != p.parts.len() {
        return Err(Error::input(format!(
            "refinement family has {} members for {} parts",
            qs.len(),
            p.parts.len()
        )));
    }
    let mut parts = Vec::new();
    for (i, &b) in p.parts.iter().enumerate() {
        if qs[i].base != alg.one() {
            return Err(Error::input("refinement family member is not a partition of 1"));
        }
        for &c in &qs[i].parts {
            let m = alg.meet(b, c);
            if m != 0 {
                parts.push(m);
            }
        }
    }
    parts.sort_unstable();
    let refined = Partition { base: alg.one(), parts };
    match validate_partition(alg, refined.base, &refined.parts)?.require() {
        Ok(_) => Ok(refined),
        Err(e) => Err(Error::Invariant(format!("refinement produced a non-partition: {e}"))),
    }
}

/// Pushforward along an index surjection: part `i` of `p` lands in group
/// `alpha[i]`, and each group joins into one part of the result.
pub fn pushforward_partition(
    alg: &BooleanAlgebra,
    p: &Partition,
    alpha: &[usize],
) -> Result<Partition> {
    if alpha.len() != p.parts.len() {
        return Err(Error::input(format!(
            "pushforward map has {} entries for {} parts",
            alpha.len(),
            p.parts.len()
        )));
    }
    let groups = match alpha.iter().max() {
        None => return Err(Error::input("pushforward of the empty partition")),
        Some(&m) => m + 1,
    };
    let mut joined = vec![alg.zero(); groups];
    for (i, &g) in alpha.iter().enumerate() {
        joined[g] = alg.join(joined[g], p.parts[i]);
    }
    if let Some(g) = joined.iter().position(|&e| e == 0) {
        return Err(Error::input(format!("pushforward map misses group {g}")));
    }
    joined.sort_unstable();
    let pushed = Partition { base: p.base, parts: joined };
    match validate_partition(alg, pushed.base, &pushed.parts)?.require() {
        Ok(_) => Ok(pushed),
        Err(e) => Err(Error::Invariant(format!("pushforward produced a non-partition: {e}"))),
    }
}

// ---------------------------------------------------------------------
// Homomorphisms

/// Boolean homomorphism, tabulated on every source element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoolHom {
    pub src: BooleanAlgebra,
    pub dst: BooleanAlgebra,
    pub table: Vec<Elem>,
}

impl BoolHom {
    pub fn apply(&self, e: Elem) -> Elem {
        self.table[e as usize]
    }

    /// The function atoms(dst) -> atoms(src) inducing this hom: each
    /// target atom sits under the image of exactly one source atom.
    pub fn atom_map(&self) -> Result<Vec<u32>> {
        let mut map = Vec::with_capacity(self.dst.atoms() as usize);
        for j in 0..self.dst.atoms() {
            let ja = self.dst.atom(j);
            let mut found = None;
            for i in 0..self.src.atoms() {
                if self.dst.leq(ja, self.apply(self.src.atom(i))) {
                    if found.is_some() {
                        return Err(Error::Invariant(format!(
                            "target atom {ja} under two source atom images"
                        )));
                    }
                    found = Some(i);
                }
            }
            map.push(found.ok_or_else(|| {
                Error::Invariant(format!("target atom {ja} under no source atom image"))
            })?);
        }
        Ok(map)
    }
}

/// Build the hom induced by a function atoms(dst) -> atoms(src).
pub fn hom_from_atom_map(src: &BooleanAlgebra, dst: &BooleanAlgebra, map: &[u32]) -> BoolHom {
    debug_assert_eq!(map.len(), dst.atoms() as usize);
    let table = src
        .elements()
        .map(|b| {
            let mut out = dst.zero();
            for (j, &i) in map.iter().enumerate() {
                if b & src.atom(i) != 0 {
                    out |= dst.atom(j as u32);
                }
            }
            out
        })
        .collect();
    BoolHom { src: *src, dst: *dst, table }
}

/// Check the homomorphism laws plus agreement with the atom-map normal
/// form (every hom between finite algebras is induced by a function on
/// atoms in the opposite direction).
pub fn validate_boolhom(h: &BoolHom) -> Result<Certificate> {
    if h.table.len() != h.src.size() {
        return Err(Error::input(format!(
            "hom table has {} entries for a source of size {}",
            h.table.len(),
            h.src.size()
        )));
    }
    for &v in &h.table {
        h.dst.check_elem(v)?;
    }
    let mut cert = Certificate::new();
    cert.push(Check::of(
        "hom.zero",
        1,
        (h.apply(h.src.zero()) != h.dst.zero())
            .then(|| Witness::new("hom.zero", &[("got", h.apply(h.src.zero()) as u64)])),
    ));
    cert.push(Check::of(
        "hom.one",
        1,
        (h.apply(h.src.one()) != h.dst.one())
            .then(|| Witness::new("hom.one", &[("got", h.apply(h.src.one()) as u64)])),
    ));
    let n = h.src.size() as u64;
    cert.sweep("hom.meet", n * n, |idx| {
        let (a, b) = ((idx / n) as Elem, (idx % n) as Elem);
        (h.apply(h.src.meet(a, b)) != h.dst.meet(h.apply(a), h.apply(b)))
            .then(|| Witness::new("hom.meet", &[("a", a as u64), ("b", b as u64)]))
    });
    cert.sweep("hom.join", n * n, |idx| {
        let (a, b) = ((idx / n) as Elem, (idx % n) as Elem);
        (h.apply(h.src.join(a, b)) != h.dst.join(h.apply(a), h.apply(b)))
            .then(|| Witness::new("hom.join", &[("a", a as u64), ("b", b as u64)]))
    });
    cert.sweep("hom.neg", n, |idx| {
        let a = idx as Elem;
        (h.apply(h.src.neg(a)) != h.dst.neg(h.apply(a)))
            .then(|| Witness::new("hom.neg", &[("a", a as u64)]))
    });

    let atom_form = if cert.ok() {
        match h.atom_map() {
            Ok(map) => {
                let induced = hom_from_atom_map(&h.src, &h.dst, &map);
                (induced.table != h.table).then(|| Witness::new("hom.atom-form", &[]))
            }
            Err(_) => Some(Witness::new("hom.atom-form", &[])),
        }
    } else {
        Some(Witness::new("hom.atom-form", &[]))
    };
    cert.push(Check::of("hom.atom-form", 1, atom_form));
    Ok(cert)
}

/// All homomorphisms `src -> dst`, via atom maps, sorted by table.
pub fn enumerate_boolean_homs(src: &BooleanAlgebra, dst: &BooleanAlgebra) -> Vec<BoolHom> {
    let k = dst.atoms() as usize;
    let base = src.atoms() as usize;
    let total = (base as u64).pow(k as u32);
    let mut homs: Vec<BoolHom> = (0..total)
        .map(|idx| {
            let map: Vec<u32> = exec::digits(idx, base, k).iter().map(|&d| d as u32).collect();
            hom_from_atom_map(src, dst, &map)
        })
        .collect();
    homs.sort_by(|a, b| a.table.cmp(&b.table));
    homs.dedup_by(|a, b| a.table == b.table);
    homs
}

/// Oracle for hom enumeration: filter every function `src -> dst` by the
/// homomorphism laws directly.  Capacity-bounded by `|dst|^|src|`.
pub fn naive_boolean_homs(
    src: &BooleanAlgebra,
    dst: &BooleanAlgebra,
    limits: &Limits,
) -> Result<Vec<BoolHom>> {
    let space = (dst.size() as u64).checked_pow(src.size() as u32).ok_or(Error::Capacity {
        what: "search space".into(),
        requested: u64::MAX,
        limit: limits.max_naive,
    })?;
    limits.check_naive(space)?;
    let sn = src.size();
    // Digits are most-significant-first, so f(0) sits in the top digit and
    // f(1) in the bottom one; rejecting on those before decoding the whole
    // table keeps the full filter affordable at 8 elements a side.
    let top = space / dst.size() as u64;
    let tables = exec::collect_vec(space, |idx| {
        if idx / top != dst.zero() as u64 || idx % dst.size() as u64 != dst.one() as u64 {
            return vec![];
        }
        let table: Vec<Elem> =
            exec::digits(idx, dst.size(), sn).iter().map(|&d| d as Elem).collect();
        if table[src.zero() as usize] != dst.zero() || table[src.one() as usize] != dst.one() {
            return vec![];
        }
        for a in src.elements() {
            if table[src.neg(a) as usize] != dst.neg(table[a as usize]) {
                return vec![];
            }
            for b in src.elements() {
                if table[src.meet(a, b) as usize] != dst.meet(table[a as usize], table[b as usize])
                    || table[src.join(a, b) as usize]
                        != dst.join(table[a as usize], table[b as usize])
                {
                    return vec![];
                }
            }
        }
        vec![table]
    });
    let mut homs: Vec<BoolHom> =
        tables.into_iter().map(|table| BoolHom { src: *src, dst: *dst, table }).collect();
    homs.sort_by(|a, b| a.table.cmp(&b.table));
    Ok(homs)
}

// ---------------------------------------------------------------------
// Boolean structure from a bare if-then-else operation

/// A carrier identified with the powerset of its atoms: `to_bits` maps
/// carrier indices to bit vectors, `from_bits` inverts it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowersetForm {
    pub algebra: BooleanAlgebra,
    pub to_bits: Vec<Elem>,
    pub from_bits: Vec<usize>,
}

/// Identify an abstract finite Boolean algebra, given by operation
/// closures on carrier indices, with the powerset of its atoms.  Atoms
/// are numbered in ascending carrier order.
pub fn powerset_form(
    n: usize,
    zero: usize,
    one: usize,
    meet: &dyn Fn(usize, usize) -> usize,
    join: &dyn Fn(usize, usize) -> usize,
    neg: &dyn Fn(usize) -> usize,
) -> Result<PowersetForm> {
    let leq = |a: usize, b: usize| meet(a, b) == a;
    let atoms: Vec<usize> = (0..n)
        .filter(|&a| a != zero && (0..n).all(|b| meet(b, a) == zero || meet(b, a) == a))
        .collect();
    let k = atoms.len();
    if k == 0 || k > 16 || n != 1usize << k {
        return Err(Error::law("powerset.size", &[("carrier", n as u64), ("atoms", k as u64)]));
    }
    let algebra = BooleanAlgebra::new(k as u32)?;
    let mut to_bits = vec![0 as Elem; n];
    let mut from_bits = vec![usize::MAX; n];
    for (x, slot) in to_bits.iter_mut().enumerate() {
        let mut bits = 0 as Elem;
        for (i, &a) in atoms.iter().enumerate() {
            if leq(a, x) {
                bits |= 1 << i;
            }
        }
        *slot = bits;
        if from_bits[bits as usize] != usize::MAX {
            return Err(Error::law(
                "powerset.bijective",
                &[("x", x as u64), ("clash", from_bits[bits as usize] as u64)],
            ));
        }
        from_bits[bits as usize] = x;
    }
    for x in 0..n {
        if to_bits[neg(x)] != algebra.neg(to_bits[x]) {
            return Err(Error::law("powerset.neg", &[("x", x as u64)]));
        }
        for y in 0..n {
            if to_bits[meet(x, y)] != algebra.meet(to_bits[x], to_bits[y]) {
                return Err(Error::law("powerset.meet", &[("x", x as u64), ("y", y as u64)]));
            }
            if to_bits[join(x, y)] != algebra.join(to_bits[x], to_bits[y]) {
                return Err(Error::law("powerset.join", &[("x", x as u64), ("y", y as u64)]));
            }
        }
    }
    if to_bits[zero] != algebra.zero() || to_bits[one] != algebra.one() {
        return Err(Error::law("powerset.bounds", &[]));
    }
    Ok(PowersetForm { algebra, to_bits, from_bits })
}

/// Boolean algebra recovered from an if-then-else operation.
///
/// The derived operations are `a and b = a(b, 0)`, `a or b = a(a, b)`,
/// `a' = a(0, 1)`, and the recovered ternary is conditioned disjunction.
#[derive(Debug, Clone)]
pub struct IteBoolean {
    pub form: PowersetForm,
    pub certificate: Certificate,
}

/// Check Dicker's five if-then-else axioms on `(carrier, one, zero, t)`.
/// `ternary` is indexed `(a * n + b) * n + c`.
pub fn ifthenelse_certificate(
    n: usize,
    one: usize,
    zero: usize,
    ternary: &[usize],
    limits: &Limits,
) -> Result<Certificate> {
    if n < 2 {
        return Err(Error::input("if-then-else carrier needs at least 0 and 1"));
    }
    if one >= n || zero >= n || one == zero {
        return Err(Error::input("if-then-else constants out of range or equal"));
    }
    if ternary.len() != n * n * n {
        return Err(Error::input(format!(
            "ternary table has {} entries, expected {}",
            ternary.len(),
            n * n * n
        )));
    }
    if let Some(&v) = ternary.iter().find(|&&v| v >= n) {
        return Err(Error::input(format!("ternary table entry {v} outside carrier")));
    }
    let nn = n as u64;
    limits.check_naive(nn.pow(5))?;
    let t = |a: usize, b: usize, c: usize| ternary[(a * n + b) * n + c];
    let mut cert = Certificate::new();

    cert.sweep("ite.subst", nn.pow(5), |idx| {
        let d = exec::digits(idx, n, 5);
        let (a, b, c, x, y) = (d[0], d[1], d[2], d[3], d[4]);
        (t(t(a, b, c), x, y) != t(a, t(b, x, y), t(c, x, y))).then(|| {
            Witness::new(
                "ite.subst",
                &[
                    ("a", a as u64),
                    ("b", b as u64),
                    ("c", c as u64),
                    ("d", x as u64),
                    ("e", y as u64),
                ],
            )
        })
    });
    cert.sweep("ite.if-zero", nn * nn, |idx| {
        let (b, c) = ((idx / nn) as usize, (idx % nn) as usize);
        (t(zero, b, c) != c)
            .then(|| Witness::new("ite.if-zero", &[("b", b as u64), ("c", c as u64)]))
    });
    cert.sweep("ite.if-one", nn * nn, |idx| {
        let (b, c) = ((idx / nn) as usize, (idx % nn) as usize);
        (t(one, b, c) != b).then(|| Witness::new("ite.if-one", &[("b", b as u64), ("c", c as u64)]))
    });
    cert.sweep("ite.self-zero", nn, |idx| {
        let a = idx as usize;
        (t(a, zero, a) != zero).then(|| Witness::new("ite.self-zero", &[("a", a as u64)]))
    });
    cert.sweep("ite.meet-comm", nn * nn, |idx| {
        let (a, b) = ((idx / nn) as usize, (idx % nn) as usize);
        (t(a, b, zero) != t(b, a, zero))
            .then(|| Witness::new("ite.meet-comm", &[("a", a as u64), ("b", b as u64)]))
    });
    Ok(cert)
}

/// Recover a Boolean algebra from an if-then-else operation: check the
/// five axioms, derive meet/join/negation, and identify the carrier with
/// the powerset of its atoms.
pub fn boolean_from_ifthenelse(
    n: usize,
    one: usize,
    zero: usize,
    ternary: &[usize],
    limits: &Limits,
) -> Result<IteBoolean> {
    let mut certificate = ifthenelse_certificate(n, one, zero, ternary, limits)?.require()?;
    let t = |a: usize, b: usize, c: usize| ternary[(a * n + b) * n + c];
    let meet = |a: usize, b: usize| t(a, b, zero);
    let join = |a: usize, b: usize| t(a, a, b);
    let neg = |a: usize| t(a, zero, one);
    let form = powerset_form(n, zero, one, &meet, &join, &neg)?;

    // The ternary itself must be conditioned disjunction of the algebra
    // just recovered.
    let alg = form.algebra;
    certificate.sweep("ite.conditioned-disjunction", (n as u64).pow(3), |idx| {
        let d = exec::digits(idx, n, 3);
        let (a, b, c) = (d[0], d[1], d[2]);
        let expect = alg.cond(form.to_bits[a], form.to_bits[b], form.to_bits[c]);
        (form.to_bits[t(a, b, c)] != expect).then(|| {
            Witness::new(
                "ite.conditioned-disjunction",
                &[("a", a as u64), ("b", b as u64), ("c", c as u64)],
            )
        })
    });
    let certificate = certificate.require()?;
    Ok(IteBoolean { form, certificate })
}

/// Conditioned-disjunction ternary table of `alg`, on carrier indices
/// equal to element values.  The canonical if-then-else example.
pub fn conditioned_disjunction_table(alg: &BooleanAlgebra) -> Vec<usize> {
    let n = alg.size();
    let mut out = vec![0usize; n * n * n];
    for a in alg.elements() {
        for b in alg.elements() {
            for c in alg.elements() {
                out[(a as usize * n + b as usize) * n + c as usize] = alg.cond(a, b, c) as usize;
            }
        }
    }
    out
}

/// Re-evaluate a single partition/hom/if-then-else law at a witness.
/// Returns true when the witness still falsifies the law.
pub fn replay_ifthenelse(
    n: usize,
    one: usize,
    zero: usize,
    ternary: &[usize],
    w: &Witness,
) -> bool {
    let t = |a: usize, b: usize, c: usize| ternary[(a * n + b) * n + c];
    let g = |name: &str| w.get(name).map(|v| v as usize);
    match w.law.as_str() {
        "ite.subst" => {
            let (a, b, c) = (g("a").unwrap(), g("b").unwrap(), g("c").unwrap());
            let (d, e) = (g("d").unwrap(), g("e").unwrap());
            t(t(a, b, c), d, e) != t(a, t(b, d, e), t(c, d, e))
        }
        "ite.if-zero" => t(zero, g("b").unwrap(), g("c").unwrap()) != g("c").unwrap(),
        "ite.if-one" => t(one, g("b").unwrap(), g("c").unwrap()) != g("b").unwrap(),
        "ite.self-zero" => t(g("a").unwrap(), zero, g("a").unwrap()) != zero,
        "ite.meet-comm" => {
            let (a, b) = (g("a").unwrap(), g("b").unwrap());
            t(a, b, zero) != t(b, a, zero)
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(k: u32) -> BooleanAlgebra {
        BooleanAlgebra::new(k).unwrap()
    }

    #[test]
    fn lattice_laws_small() {
        let b = alg(3);
        for x in b.elements() {
            assert_eq!(b.meet(x, b.one()), x);
            assert_eq!(b.join(x, b.zero()), x);
            assert_eq!(b.meet(x, b.neg(x)), b.zero());
            assert_eq!(b.join(x, b.neg(x)), b.one());
            for y in b.elements() {
                assert_eq!(b.meet(x, y), b.meet(y, x));
                assert_eq!(b.neg(b.meet(x, y)), b.join(b.neg(x), b.neg(y)));
            }
        }
    }

    #[test]
    fn sixteen_atom_bounds() {
        let b = alg(16);
        assert_eq!(b.one(), u16::MAX);
        assert_eq!(b.neg(b.one()), 0);
        assert!(BooleanAlgebra::new(17).is_err());
        assert!(BooleanAlgebra::new(0).is_err());
    }

    #[test]
    fn partition_validates_and_normalizes() {
        let b = alg(3);
        // {110, 001} partitions 1; a zero part is dropped.
        let p = Partition::new(&b, b.one(), &[0b110, 0b001, 0]).unwrap();
        assert_eq!(p.parts, vec![0b001, 0b110]);
        // Local partition of a smaller base.
        let q = Partition::new(&b, 0b110, &[0b100, 0b010]).unwrap();
        assert_eq!(q.len(), 2);
        let cert = validate_partition(&b, 0b110, &q.parts).unwrap();
        assert!(cert.ok());
    }

    #[test]
    fn partition_rejects_overlap_and_bad_join() {
        let b = alg(2);
        let overlap = Partition::new(&b, b.one(), &[0b11, 0b01]);
        match overlap {
            Err(Error::Law(w)) => assert_eq!(w.law, "partition.disjoint"),
            other => panic!("expected disjointness failure, got {other:?}"),
        }
        let short = Partition::new(&b, b.one(), &[0b01]);
        match short {
            Err(Error::Law(w)) => assert_eq!(w.law, "partition.join"),
            other => panic!("expected join failure, got {other:?}"),
        }
    }

    #[test]
    fn partition_counts_are_bell_numbers() {
        // Partitions of the top element correspond to set partitions of
        // the atoms: Bell(1..4) = 1, 2, 5, 15.
        for (k, bell) in [(1u32, 1usize), (2, 2), (3, 5), (4, 15)] {
            let b = alg(k);
            assert_eq!(enumerate_partitions(&b, b.one()).len(), bell);
        }
    }

    #[test]
    fn refine_then_pushforward_recovers() {
        // For every partition P of 1 and refinement family Q, pushing
        // P(Q) forward along "which part of P did you come from"
        // recovers P.
        let b = alg(3);
        let all = enumerate_partitions(&b, b.one());
        for p in &all {
            let family: Vec<Vec<Partition>> = p.parts.iter().map(|_| all.clone()).collect();
            // Take a deterministic sample of refinement families to keep
            // the product small: pair each part with every partition.
            for qi in 0..all.len() {
                let qs: Vec<Partition> =
                    (0..p.parts.len()).map(|j| family[j][(qi + j) % all.len()].clone()).collect();
                let refined = refine_partitions(&b, p, &qs).unwrap();
                let alpha: Vec<usize> =
                    refined.parts.iter().map(|&part| p.part_over(&b, part).unwrap()).collect();
                let back = pushforward_partition(&b, &refined, &alpha).unwrap();
                assert_eq!(&back, p);
            }
        }
    }

    #[test]
    fn hom_enumeration_matches_naive_filter() {
        let limits = Limits::default();
        for ks in 1..=2u32 {
            for kd in 1..=2u32 {
                let s = alg(ks);
                let d = alg(kd);
                let fast = enumerate_boolean_homs(&s, &d);
                let slow = naive_boolean_homs(&s, &d, &limits).unwrap();
                assert_eq!(fast, slow, "hom sets differ for {ks}->{kd}");
                for h in &fast {
                    assert!(validate_boolhom(h).unwrap().ok());
                }
            }
        }
    }

    #[test]
    fn hom_counts() {
        // atoms(src)^atoms(dst) atom maps, all distinct as tables when
        // src has >= 2 atoms; a one-atom source admits exactly one hom.
        let two = alg(2);
        assert_eq!(enumerate_boolean_homs(&two, &two).len(), 4);
        let one = alg(1);
        assert_eq!(enumerate_boolean_homs(&one, &two).len(), 1);
        assert_eq!(enumerate_boolean_homs(&two, &one).len(), 2);
    }

    #[test]
    fn homs_preserve_partitions_up_to_zeros() {
        let s = alg(3);
        let d = alg(2);
        for h in enumerate_boolean_homs(&s, &d) {
            for p in enumerate_partitions(&s, s.one()) {
                let image: Vec<Elem> = p.parts.iter().map(|&b| h.apply(b)).collect();
                let normalized = normalize_parts(&image);
                assert!(validate_partition(&d, d.one(), &normalized).unwrap().ok());
            }
        }
    }

    #[test]
    fn ifthenelse_recovers_conditioned_disjunction() {
        let limits = Limits::default();
        for k in 1..=3u32 {
            let b = alg(k);
            let table = conditioned_disjunction_table(&b);
            let ite =
                boolean_from_ifthenelse(b.size(), b.one() as usize, 0, &table, &limits).unwrap();
            assert_eq!(ite.form.algebra, b);
            // Carrier indices equal element values, so the identification
            // is the identity.
            for x in b.elements() {
                assert_eq!(ite.form.to_bits[x as usize], x);
            }
        }
    }

    #[test]
    fn ifthenelse_mutation_names_broken_axiom() {
        let limits = Limits::default();
        let b = alg(2);
        let mut table = conditioned_disjunction_table(&b);
        // Corrupt 1(b, c) = b at one spot.
        let n = b.size();
        let one = b.one() as usize;
        let idx = (one * n + 1) * n + 2;
        table[idx] = if table[idx] == 0 { 3 } else { 0 };
        let err = boolean_from_ifthenelse(n, one, 0, &table, &limits).unwrap_err();
        let w = err.witness().expect("law error").clone();
        assert!(w.law == "ite.subst" || w.law == "ite.if-one", "got {}", w.law);
        assert!(replay_ifthenelse(n, one, 0, &table, &w), "witness must replay");
    }

    #[test]
    fn ifthenelse_rejects_oversized_carrier() {
        let limits = Limits::default();
        let err = boolean_from_ifthenelse(64, 63, 0, &vec![0; 64 * 64 * 64], &limits).unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
    }

    #[test]
    fn atom_map_roundtrip() {
        let s = alg(3);
        let d = alg(2);
        for h in enumerate_boolean_homs(&s, &d) {
            let map = h.atom_map().unwrap();
            assert_eq!(hom_from_atom_map(&s, &d, &map), h);
        }
    }
}
