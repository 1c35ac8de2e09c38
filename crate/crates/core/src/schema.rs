//! JSON documents for every structure the workbench exchanges.
//!
//! Each document carries a `"kind"` field that selects its schema, so
//! a file can be checked without saying what it claims to be.  Tables
//! are nested arrays in JSON and are flattened into the row-major
//! forms the constructors take.  Unknown fields are tolerated; all
//! indices are 0-based.  Structural violations report a JSON-pointer
//! path to the offending field; law violations surface as the usual
//! named-law witnesses from the validating constructors.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::balg::{
    boolean_from_ifthenelse, conditioned_disjunction_table, BooleanAlgebra, Elem, IteBoolean,
};
use crate::bset::{
    bset_certificate, eqfamily_certificate, eqfamily_glue_certificate, validate_bset, BSet,
    EqFamily,
};
use crate::clone::dual::{dual_clone_of, dual_decompose, DualClone, DualOp};
use crate::clone::{decompose, unary_composite};
use crate::matched::{
    matched_pair_certificate, validate_bmset, validate_matched_pair, BMSet, MatchedPair,
};
use crate::mon::{validate_maction, validate_monoid, MAction, Monoid};
use crate::{Certificate, Check, Error, Limits, Result, Witness};

fn violation(path: impl std::fmt::Display, msg: impl std::fmt::Display) -> Error {
    Error::input(format!("schema violation at {path}: {msg}"))
}

/// Flatten a two-level table after checking both dimensions.
fn flat_table(path: &str, rows: &[Vec<usize>], nrows: usize, ncols: usize) -> Result<Vec<usize>> {
    if rows.len() != nrows {
        return Err(violation(path, format!("expected {nrows} rows, got {}", rows.len())));
    }
    let mut out = Vec::with_capacity(nrows * ncols);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(violation(
                format!("{path}/{i}"),
                format!("expected {ncols} entries, got {}", row.len()),
            ));
        }
        out.extend_from_slice(row);
    }
    Ok(out)
}

/// Flatten a three-level table with dimensions `n0 x n1 x n1`.
fn flat_cube(path: &str, cube: &[Vec<Vec<usize>>], n0: usize, n1: usize) -> Result<Vec<usize>> {
    if cube.len() != n0 {
        return Err(violation(path, format!("expected {n0} tables, got {}", cube.len())));
    }
    let mut out = Vec::with_capacity(n0 * n1 * n1);
    for (i, table) in cube.iter().enumerate() {
        out.extend(flat_table(&format!("{path}/{i}"), table, n1, n1)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BooleanDoc {
    pub atoms: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoidDoc {
    pub size: usize,
    pub identity: usize,
    pub table: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MactionDoc {
    pub monoid: MonoidDoc,
    pub carrier: usize,
    pub table: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BsetDoc {
    pub boolean: BooleanDoc,
    pub carrier: usize,
    /// `action[b][x][y]`, one full binary table per algebra element.
    pub action: Vec<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EqFamilyDoc {
    pub boolean: BooleanDoc,
    pub carrier: usize,
    /// Partition of the carrier, as blocks, keyed by algebra element.
    pub rel: BTreeMap<String, Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IfThenElseDoc {
    pub carrier: usize,
    pub one: usize,
    pub zero: usize,
    /// `table[a][b][c]`, the ternary operation.
    pub table: Vec<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualOpDoc {
    pub base: usize,
    pub arity: usize,
    /// `map[x] = [slot, point]` for each point of the base set.
    pub map: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchedPairDoc {
    pub boolean: BooleanDoc,
    pub monoid: MonoidDoc,
    pub bset_on_m: BsetDoc,
    /// `m_on_b[m][b]`, the monoid action on algebra elements.
    pub m_on_b: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BmsetDoc {
    pub boolean: BooleanDoc,
    pub monoid: MonoidDoc,
    pub bset_on_m: BsetDoc,
    pub m_on_b: Vec<Vec<usize>>,
    pub carrier: usize,
    pub bset: BsetDoc,
    /// `maction[m][x]`, the monoid action on the carrier.
    pub maction: Vec<Vec<usize>>,
}

/// Any structure the workbench reads or writes, tagged by kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Doc {
    Boolean(BooleanDoc),
    Monoid(MonoidDoc),
    Maction(MactionDoc),
    Bset(BsetDoc),
    Eqfamily(EqFamilyDoc),
    Ifthenelse(IfThenElseDoc),
    DualOp(DualOpDoc),
    MatchedPair(MatchedPairDoc),
    Bmset(BmsetDoc),
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for segment in path.iter() {
        out.push('/');
        match segment {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(key),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

fn payload<T: serde::de::DeserializeOwned>(value: &serde_json::Value) -> Result<T> {
    serde_path_to_error::deserialize(value)
        .map_err(|e| violation(pointer(e.path()), e.into_inner()))
}

/// Select a schema by the `kind` field and deserialize against it.
pub fn doc_from_value(value: &serde_json::Value) -> Result<Doc> {
    let Some(kind) = value.get("kind").and_then(|k| k.as_str()) else {
        return Err(violation("/kind", "expected one of the document kind names"));
    };
    Ok(match kind {
        "boolean" => Doc::Boolean(payload(value)?),
        "monoid" => Doc::Monoid(payload(value)?),
        "maction" => Doc::Maction(payload(value)?),
        "bset" => Doc::Bset(payload(value)?),
        "eqfamily" => Doc::Eqfamily(payload(value)?),
        "ifthenelse" => Doc::Ifthenelse(payload(value)?),
        "dual_op" => Doc::DualOp(payload(value)?),
        "matched_pair" => Doc::MatchedPair(payload(value)?),
        "bmset" => Doc::Bmset(payload(value)?),
        other => return Err(violation("/kind", format!("unknown document kind {other:?}"))),
    })
}

/// Parse a JSON document.  Syntax errors are reported as such;
/// schema violations carry a JSON-pointer path.
pub fn parse_doc(text: &str) -> Result<Doc> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::input(format!("malformed JSON: {e}")))?;
    doc_from_value(&value)
}

/// Stable pretty-printed form: field order is fixed by the schema and
/// map keys are sorted, so equal documents print byte-identically.
pub fn doc_to_json(doc: &Doc) -> String {
    serde_json::to_string_pretty(doc).expect("document serialization cannot fail")
}

impl BooleanDoc {
    pub fn of(alg: &BooleanAlgebra) -> Self {
        BooleanDoc { atoms: alg.atoms() }
    }

    pub fn to_core(&self, limits: &Limits) -> Result<BooleanAlgebra> {
        limits.check_atoms(self.atoms)?;
        BooleanAlgebra::new(self.atoms)
    }
}

impl MonoidDoc {
    pub fn of(m: &Monoid) -> Self {
        MonoidDoc {
            size: m.size,
            identity: m.identity,
            table: (0..m.size).map(|a| m.table[a * m.size..(a + 1) * m.size].to_vec()).collect(),
        }
    }

    pub fn to_core(&self, limits: &Limits) -> Result<Monoid> {
        self.to_core_at("", limits)
    }

    fn to_core_at(&self, at: &str, limits: &Limits) -> Result<Monoid> {
        limits.check_monoid(self.size)?;
        let table = flat_table(&format!("{at}/table"), &self.table, self.size, self.size)?;
        Monoid::new(self.size, self.identity, table)
    }
}

impl MactionDoc {
    pub fn of(a: &MAction) -> Self {
        MactionDoc {
            monoid: MonoidDoc::of(&a.monoid),
            carrier: a.carrier,
            table: (0..a.monoid.size).map(|m| a.row(m).to_vec()).collect(),
        }
    }

    pub fn to_core(&self, limits: &Limits) -> Result<MAction> {
        let monoid = self.monoid.to_core_at("/monoid", limits)?;
        let table = flat_table("/table", &self.table, monoid.size, self.carrier)?;
        MAction::new(monoid, self.carrier, table)
    }
}

impl BsetDoc {
    pub fn of(x: &BSet) -> Self {
        let n = x.algebra.size();
        BsetDoc {
            boolean: BooleanDoc::of(&x.algebra),
            carrier: x.carrier,
            action: (0..n)
                .map(|b| {
                    (0..x.carrier)
                        .map(|u| (0..x.carrier).map(|v| x.act(b as Elem, u, v)).collect())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_core(&self, limits: &Limits) -> Result<BSet> {
        self.to_core_at("", limits)
    }

    fn to_core_at(&self, at: &str, limits: &Limits) -> Result<BSet> {
        let algebra = self.boolean.to_core(limits)?;
        let action =
            flat_cube(&format!("{at}/action"), &self.action, algebra.size(), self.carrier)?;
        validate_bset(algebra, self.carrier, action, limits)
    }
}

impl EqFamilyDoc {
    pub fn of(e: &EqFamily) -> Self {
        let mut rel = BTreeMap::new();
        for b in 0..e.algebra.size() {
            let row = e.row(b as Elem);
            let mut blocks = vec![Vec::new(); e.classes(b as Elem)];
            for (x, &id) in row.iter().enumerate() {
                blocks[id].push(x);
            }
            rel.insert(b.to_string(), blocks);
        }
        EqFamilyDoc { boolean: BooleanDoc::of(&e.algebra), carrier: e.carrier, rel }
    }

    pub fn to_core(&self, limits: &Limits) -> Result<EqFamily> {
        let algebra = self.boolean.to_core(limits)?;
        let mut rows = Vec::with_capacity(algebra.size());
        for b in 0..algebra.size() {
            let key = b.to_string();
            let Some(blocks) = self.rel.get(&key) else {
                return Err(violation(format!("/rel/{key}"), "missing partition for this element"));
            };
            let mut row = vec![usize::MAX; self.carrier];
            for (bi, block) in blocks.iter().enumerate() {
                for &x in block {
                    if x >= self.carrier {
                        return Err(violation(
                            format!("/rel/{key}/{bi}"),
                            format!("point {x} outside carrier {}", self.carrier),
                        ));
                    }
                    if row[x] != usize::MAX {
                        return Err(violation(
                            format!("/rel/{key}/{bi}"),
                            format!("point {x} appears in two blocks"),
                        ));
                    }
                    row[x] = bi;
                }
            }
            if let Some(x) = row.iter().position(|&v| v == usize::MAX) {
                return Err(violation(
                    format!("/rel/{key}"),
                    format!("point {x} missing from the partition"),
                ));
            }
            rows.push(row);
        }
        EqFamily::from_rows(algebra, self.carrier, rows)
    }
}

impl IfThenElseDoc {
    pub fn to_core(&self, limits: &Limits) -> Result<IteBoolean> {
        let table = flat_cube("/table", &self.table, self.carrier, self.carrier)?;
        boolean_from_ifthenelse(self.carrier, self.one, self.zero, &table, limits)
    }
}

impl DualOpDoc {
    pub fn of(base: usize, t: &DualOp) -> Self {
        DualOpDoc { base, arity: t.arity, map: t.map.clone() }
    }

    pub fn to_core(&self, limits: &Limits) -> Result<(DualClone, DualOp)> {
        // Bound 2 keeps the decomposition machinery available even
        // for a unary document; higher arities raise it to match.
        let clone = dual_clone_of(self.base, self.arity.max(2), limits)?;
        let op = clone.op(self.arity, self.map.clone())?;
        Ok((clone, op))
    }
}

fn pair_parts_to_core(
    boolean: &BooleanDoc,
    monoid: &MonoidDoc,
    bset_on_m: &BsetDoc,
    m_on_b: &[Vec<usize>],
    limits: &Limits,
) -> Result<MatchedPair> {
    let algebra = boolean.to_core(limits)?;
    let monoid = monoid.to_core_at("/monoid", limits)?;
    if bset_on_m.boolean.atoms != boolean.atoms {
        return Err(violation(
            "/bset_on_m/boolean/atoms",
            format!(
                "expected {}, matching the pair's algebra, got {}",
                boolean.atoms, bset_on_m.boolean.atoms
            ),
        ));
    }
    if bset_on_m.carrier != monoid.size {
        return Err(violation(
            "/bset_on_m/carrier",
            format!("expected {}, the monoid size, got {}", monoid.size, bset_on_m.carrier),
        ));
    }
    let bset = bset_on_m.to_core_at("/bset_on_m", limits)?;
    let star = flat_table("/m_on_b", m_on_b, monoid.size, algebra.size())?;
    let m_on_b = MAction::new(monoid.clone(), algebra.size(), star)?;
    validate_matched_pair(algebra, monoid, bset, m_on_b, limits)
}

impl MatchedPairDoc {
    pub fn of(p: &MatchedPair) -> Self {
        let n = p.algebra.size();
        MatchedPairDoc {
            boolean: BooleanDoc::of(&p.algebra),
            monoid: MonoidDoc::of(&p.monoid),
            bset_on_m: BsetDoc::of(&p.bset_on_m),
            m_on_b: (0..p.monoid.size)
                .map(|m| p.m_on_b.table[m * n..(m + 1) * n].to_vec())
                .collect(),
        }
    }

    pub fn to_core(&self, limits: &Limits) -> Result<MatchedPair> {
        pair_parts_to_core(&self.boolean, &self.monoid, &self.bset_on_m, &self.m_on_b, limits)
    }
}

impl BmsetDoc {
    pub fn of(x: &BMSet) -> Self {
        let pair = MatchedPairDoc::of(&x.pair);
        BmsetDoc {
            boolean: pair.boolean,
            monoid: pair.monoid,
            bset_on_m: pair.bset_on_m,
            m_on_b: pair.m_on_b,
            carrier: x.carrier(),
            bset: BsetDoc::of(&x.bset),
            maction: (0..x.pair.monoid.size).map(|m| x.maction.row(m).to_vec()).collect(),
        }
    }

    pub fn to_core(&self, limits: &Limits) -> Result<BMSet> {
        let pair =
            pair_parts_to_core(&self.boolean, &self.monoid, &self.bset_on_m, &self.m_on_b, limits)?;
        if self.bset.boolean.atoms != self.boolean.atoms {
            return Err(violation(
                "/bset/boolean/atoms",
                format!(
                    "expected {}, matching the pair's algebra, got {}",
                    self.boolean.atoms, self.bset.boolean.atoms
                ),
            ));
        }
        if self.bset.carrier != self.carrier {
            return Err(violation(
                "/bset/carrier",
                format!(
                    "expected {}, the document's carrier, got {}",
                    self.carrier, self.bset.carrier
                ),
            ));
        }
        let bset = self.bset.to_core_at("/bset", limits)?;
        let table = flat_table("/maction", &self.maction, pair.monoid.size, self.carrier)?;
        let maction = MAction::new(pair.monoid.clone(), self.carrier, table)?;
        validate_bmset(&pair, bset, maction, limits)
    }
}

/// Validate a document and return the full certificate of the laws it
/// satisfies.  A law violation comes back as `Error::Law` with its
/// witness; shape and capacity problems as the other error kinds.
pub fn check_doc(doc: &Doc, limits: &Limits) -> Result<Certificate> {
    match doc {
        Doc::Boolean(d) => {
            let alg = d.to_core(limits)?;
            let n = alg.size() as u64;
            let mut cert = Certificate::new();
            cert.push(Check::pass("boolean.shape", 1));
            // The laws hold bitwise by construction; the substantive
            // check is that the algebra's conditioned disjunction
            // reconstructs the same algebra.
            if n.saturating_pow(3) <= limits.max_naive {
                let table = conditioned_disjunction_table(&alg);
                let ib = boolean_from_ifthenelse(
                    alg.size(),
                    alg.one() as usize,
                    alg.zero() as usize,
                    &table,
                    limits,
                )?;
                cert.merge(ib.certificate);
                let bad = ib.form.algebra.atoms() != alg.atoms();
                cert.push(Check::of(
                    "boolean.reconstruction",
                    1,
                    bad.then(|| {
                        Witness::new("boolean.reconstruction", &[("atoms", alg.atoms() as u64)])
                    }),
                ));
            }
            Ok(cert)
        }
        Doc::Monoid(d) => validate_monoid(&d.to_core(limits)?),
        Doc::Maction(d) => validate_maction(&d.to_core(limits)?),
        Doc::Bset(d) => bset_certificate(&d.to_core(limits)?, limits),
        Doc::Eqfamily(d) => {
            let e = d.to_core(limits)?;
            let mut cert = eqfamily_certificate(&e, limits)?;
            cert.merge(eqfamily_glue_certificate(&e, limits)?);
            Ok(cert)
        }
        Doc::Ifthenelse(d) => Ok(d.to_core(limits)?.certificate),
        Doc::DualOp(d) => {
            let (clone, op) = d.to_core(limits)?;
            let mut cert = Certificate::new();
            let (h, m) = dual_decompose(&op);
            let glued = unary_composite(&clone, &h, &m)?;
            cert.push(Check::of(
                "dualop.split",
                1,
                (glued != op).then(|| Witness::new("dualop.split", &[("arity", op.arity as u64)])),
            ));
            let dec = decompose(&clone, &op)?;
            cert.merge(dec.certificate);
            let bad = dec.hyperaffine != h || dec.unary != m;
            cert.push(Check::of(
                "dualop.split-unique",
                1,
                bad.then(|| Witness::new("dualop.split-unique", &[("arity", op.arity as u64)])),
            ));
            Ok(cert)
        }
        Doc::MatchedPair(d) => matched_pair_certificate(&d.to_core(limits)?, limits),
        Doc::Bmset(d) => {
            let x = d.to_core(limits)?;
            crate::matched::bmset_certificate(&x, limits)
        }
    }
}
