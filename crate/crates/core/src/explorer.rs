//! Breadth-first exploration of switching classes with a persistent,
//! append-only class store.
//!
//! Store layout (one directory):
//! - `classes.ndjson`: one JSON record per class
//! - `expanded.log`: keys of classes whose neighbours are all recorded
//! - `edges.log`: `parent child descriptor`, with `self` for degenerate switches

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bmatrix::BHMatrix;
use crate::construct::weak_bush_blocks;
use crate::equiv::{certificate, Certificate};
use crate::error::{Error, Result};
use crate::sites::{find_fourier_sites, find_genhall_layouts, find_rank1_sites, fourier_set_switch, genhall_switch, rank1_switch};
use crate::switchcore::{apply_switch, Partition, RootMul, SwitchPlan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Fourier,
    Genhall,
    Rank1,
    BushDiagonal,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Fourier, Family::Genhall, Family::Rank1, Family::BushDiagonal];
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Fourier => "fourier",
            Family::Genhall => "genhall",
            Family::Rank1 => "rank1",
            Family::BushDiagonal => "bush-diagonal",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fourier" => Ok(Family::Fourier),
            "genhall" => Ok(Family::Genhall),
            "rank1" | "rank1-kron" => Ok(Family::Rank1),
            "bush" | "bush-diagonal" => Ok(Family::BushDiagonal),
            _ => Err(Error::Invalid(format!("unknown switch family {s:?}"))),
        }
    }
}

/// Parses a comma-separated family list; `all` enables every family.
pub fn parse_families(list: &str) -> Result<Vec<Family>> {
    if list == "all" {
        return Ok(Family::ALL.to_vec());
    }
    let mut out: Vec<Family> = list.split(',').map(|s| s.trim().parse()).collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct OrbitConfig {
    pub families: Vec<Family>,
    pub max_classes: usize,
    pub max_depth: usize,
    pub node_budget: u64,
    pub workers: usize,
    /// Largest row subset tried by the rank-1 site search.
    pub rank1_rows: usize,
    /// Layouts tried per representative by the generalized Hall family.
    pub genhall_layouts: usize,
}

impl Default for OrbitConfig {
    fn default() -> Self {
        OrbitConfig {
            families: Family::ALL.to_vec(),
            max_classes: 1000,
            max_depth: 8,
            node_budget: 1_000_000,
            workers: 1,
            rank1_rows: 4,
            genhall_layouts: 4,
        }
    }
}

impl OrbitConfig {
    fn validate(&self) -> Result<()> {
        if self.families.is_empty() || self.max_classes == 0 || self.node_budget == 0 || self.workers == 0 {
            return Err(Error::Invalid("orbit limits must be positive and at least one family enabled".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Seed,
    Switch { parent: String, descriptor: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassRecord {
    /// Digest in hex, suffixed `-1`, `-2`, … on a certificate collision
    /// between inequivalent matrices.
    pub key: String,
    pub digest: [u8; 32],
    pub representative: BHMatrix,
    pub provenance: Provenance,
    pub depth: usize,
}

#[derive(Serialize, Deserialize)]
struct RecordLine {
    key: String,
    digest: String,
    depth: usize,
    provenance: Provenance,
    matrix: String,
}

impl ClassRecord {
    fn to_line(&self) -> String {
        let line = RecordLine {
            key: self.key.clone(),
            digest: hex::encode(self.digest),
            depth: self.depth,
            provenance: self.provenance.clone(),
            matrix: self.representative.emit(),
        };
        serde_json::to_string(&line).expect("records serialize")
    }

    fn from_line(line: &str) -> Result<Self> {
        let bad = |e: String| Error::Store(format!("corrupt class record: {e}"));
        let r: RecordLine = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
        let digest: [u8; 32] = hex::decode(&r.digest)
            .map_err(|e| bad(e.to_string()))?
            .try_into()
            .map_err(|_| bad("digest is not 32 bytes".into()))?;
        let representative: BHMatrix = r.matrix.parse().map_err(|e: Error| bad(e.to_string()))?;
        Ok(ClassRecord { key: r.key, digest, representative, provenance: r.provenance, depth: r.depth })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Insert {
    Inserted(String),
    Duplicate(String),
}

struct StoreState {
    records: Vec<ClassRecord>,
    by_digest: HashMap<[u8; 32], Vec<usize>>,
    /// Canonical graphs of records, filled on first digest match.
    canonical: HashMap<usize, Vec<u64>>,
    classes: File,
}

/// Directory-backed class store. `insert_if_new` holds a lock across the
/// check and the append, so concurrent inserts of one class leave one
/// record.
pub struct ClassStore {
    dir: PathBuf,
    state: Mutex<StoreState>,
    logs: Mutex<(File, File)>,
}

const CLASSES: &str = "classes.ndjson";
const EXPANDED: &str = "expanded.log";
const EDGES: &str = "edges.log";

fn append(path: &Path) -> Result<File> {
    Ok(OpenOptions::new().create(true).append(true).open(path)?)
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for line in BufReader::new(File::open(path)?).lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(line);
        }
    }
    Ok(out)
}

impl ClassStore {
    /// Opens or creates the store in `dir`, loading existing records.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir)?;
        let mut records = Vec::new();
        let mut by_digest: HashMap<[u8; 32], Vec<usize>> = HashMap::new();
        for line in read_lines(&dir.join(CLASSES))? {
            let rec = ClassRecord::from_line(&line)?;
            if records.iter().any(|r: &ClassRecord| r.key == rec.key) {
                return Err(Error::Store(format!("duplicate key {}", rec.key)));
            }
            by_digest.entry(rec.digest).or_default().push(records.len());
            records.push(rec);
        }
        let classes = append(&dir.join(CLASSES))?;
        let logs = (append(&dir.join(EXPANDED))?, append(&dir.join(EDGES))?);
        Ok(ClassStore { dir, state: Mutex::new(StoreState { records, by_digest, canonical: HashMap::new(), classes }), logs: Mutex::new(logs) })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn len(&self) -> usize {
        self.state.lock().expect("store lock").records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn records(&self) -> Vec<ClassRecord> {
        self.state.lock().expect("store lock").records.clone()
    }

    /// Inserts `rep` unless an equivalent matrix is stored. Returns the key
    /// of the new or existing class.
    pub fn insert_if_new(&self, rep: &BHMatrix, cert: &Certificate, provenance: Provenance, depth: usize) -> Result<Insert> {
        let mut st = self.state.lock().expect("store lock");
        let same: Vec<usize> = st.by_digest.get(&cert.digest).cloned().unwrap_or_default();
        for &i in &same {
            if !st.canonical.contains_key(&i) {
                let g = certificate(&st.records[i].representative)?.canonical_graph;
                st.canonical.insert(i, g);
            }
            if st.canonical[&i] == cert.canonical_graph {
                return Ok(Insert::Duplicate(st.records[i].key.clone()));
            }
        }
        let mut key = hex::encode(cert.digest);
        if !same.is_empty() {
            key = format!("{key}-{}", same.len());
        }
        let rec = ClassRecord { key: key.clone(), digest: cert.digest, representative: rep.clone(), provenance, depth };
        writeln!(st.classes, "{}", rec.to_line())?;
        st.classes.flush()?;
        let idx = st.records.len();
        st.by_digest.entry(cert.digest).or_default().push(idx);
        st.canonical.insert(idx, cert.canonical_graph.clone());
        st.records.push(rec);
        Ok(Insert::Inserted(key))
    }

    fn mark_expanded(&self, key: &str) -> Result<()> {
        let mut logs = self.logs.lock().expect("log lock");
        writeln!(logs.0, "{key}")?;
        logs.0.flush()?;
        Ok(())
    }

    fn record_edge(&self, parent: &str, child: &str, descriptor: &str) -> Result<()> {
        let mut logs = self.logs.lock().expect("log lock");
        writeln!(logs.1, "{parent} {child} {descriptor}")?;
        Ok(())
    }

    fn flush_edges(&self) -> Result<()> {
        self.logs.lock().expect("log lock").1.flush()?;
        Ok(())
    }

    pub fn expanded_keys(&self) -> Result<Vec<String>> {
        read_lines(&self.dir.join(EXPANDED))
    }

    /// `(parent, child, descriptor)`; `child` is `self` for degenerate
    /// switches.
    pub fn edges(&self) -> Result<Vec<(String, String, String)>> {
        read_lines(&self.dir.join(EDGES))?
            .into_iter()
            .map(|l| {
                let mut parts = l.splitn(3, ' ');
                match (parts.next(), parts.next(), parts.next()) {
                    (Some(a), Some(b), Some(c)) => Ok((a.to_string(), b.to_string(), c.to_string())),
                    _ => Err(Error::Store(format!("corrupt edge line {l:?}"))),
                }
            })
            .collect()
    }
}

/// A switched neighbour with a text descriptor of the switch.
#[derive(Clone, Debug)]
pub struct Neighbor {
    pub descriptor: String,
    pub matrix: BHMatrix,
}

/// Every switch the enabled families offer on `h`, in family, site and
/// ascending-coefficient order. Families whose site search exceeds its
/// size cap contribute nothing.
pub fn neighbors(h: &BHMatrix, cfg: &OrbitConfig) -> Result<Vec<Neighbor>> {
    let k = h.k();
    let mut out = Vec::new();
    for family in &cfg.families {
        match family {
            Family::Fourier => {
                let sites = match find_fourier_sites(h) {
                    Err(Error::CapExceeded(_)) => continue,
                    other => other?,
                };
                for (s, site) in sites.iter().enumerate() {
                    for block in 0..k {
                        for c in 1..k as u32 {
                            let matrix = fourier_set_switch(h, site, block, c)?;
                            out.push(Neighbor { descriptor: format!("fourier:{s}:{block}:{c}"), matrix });
                        }
                    }
                }
            }
            Family::Genhall => {
                let layouts = match find_genhall_layouts(h, cfg.genhall_layouts) {
                    Err(Error::CapExceeded(_)) => continue,
                    other => other?,
                };
                for (s, lay) in layouts.iter().enumerate() {
                    for m in 0..k {
                        for c in 1..k as u32 {
                            let matrix = genhall_switch(&lay.matrix, &lay.form, m, c)?;
                            out.push(Neighbor { descriptor: format!("genhall:{s}:{m}:{c}"), matrix });
                        }
                    }
                }
            }
            Family::Rank1 => {
                let sites = match find_rank1_sites(h, cfg.rank1_rows) {
                    Err(Error::CapExceeded(_)) => continue,
                    other => other?,
                };
                for (s, site) in sites.iter().enumerate() {
                    for cell in 0..site.cells.len() {
                        for c in 1..k as u32 {
                            let matrix = rank1_switch(h, site, cell, c)?;
                            out.push(Neighbor { descriptor: format!("rank1:{s}:{cell}:{c}"), matrix });
                        }
                    }
                }
            }
            Family::BushDiagonal => {
                for (b, plan) in bush_diagonal_plans(h)?.into_iter().enumerate() {
                    for c in 1..k as u32 {
                        let plan = plan(c);
                        if let Ok(matrix) = apply_switch(h, &plan) {
                            out.push(Neighbor { descriptor: format!("bush:{b}:{c}"), matrix });
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

type PlanFor = Box<dyn Fn(u32) -> SwitchPlan<RootMul>>;

/// Diagonal-block plans for a Bush-type matrix of square order: every
/// diagonal block all-ones and every other block with zero line sums.
fn bush_diagonal_plans(h: &BHMatrix) -> Result<Vec<PlanFor>> {
    let (n, k) = (h.n(), h.k());
    let m = (1..=n).find(|m| m * m >= n).unwrap_or(0);
    if m < 2 || m * m != n || !weak_bush_blocks(h, m)?.weak_bush {
        return Ok(Vec::new());
    }
    let all_ones = (0..m).all(|b| (0..m).all(|x| (0..m).all(|y| h.get(b * m + x, b * m + y) == 0)));
    if !all_ones {
        return Ok(Vec::new());
    }
    Ok((0..m)
        .map(|b| -> PlanFor {
            let cell: Vec<usize> = (b * m..(b + 1) * m).collect();
            Box::new(move |c| {
                let p = || Partition::new(n, vec![cell.clone()]).expect("block lies in range");
                SwitchPlan::new(p(), p(), vec![vec![RootMul::new(c as i64, k)]]).expect("single-cell plan")
            })
        })
        .collect())
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OrbitSummary {
    pub classes: usize,
    pub inserted: usize,
    pub expanded: usize,
    pub self_loops: usize,
    pub nodes: u64,
    /// Why the search stopped early, if it did.
    pub halted: Option<String>,
}

/// BFS from `seeds`, storing one record per equivalence class in `store`.
///
/// A store that already holds classes is resumed: classes not listed in
/// the expanded log form the frontier. Neighbour generation and
/// certificates run on `cfg.workers` threads; insertion happens in
/// frontier order, so the store contents do not depend on scheduling.
pub fn orbit_bfs(seeds: &[BHMatrix], cfg: &OrbitConfig, store: &ClassStore) -> Result<OrbitSummary> {
    cfg.validate()?;
    for s in seeds {
        s.ensure_hadamard()?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Invalid(format!("worker pool: {e}")))?;
    pool.install(|| bfs(seeds, cfg, store))
}

fn bfs(seeds: &[BHMatrix], cfg: &OrbitConfig, store: &ClassStore) -> Result<OrbitSummary> {
    let mut summary = OrbitSummary::default();
    let full = |store: &ClassStore| store.len() >= cfg.max_classes;
    for seed in seeds {
        if full(store) {
            break;
        }
        let cert = certificate(seed)?;
        if let Insert::Inserted(_) = store.insert_if_new(seed, &cert, Provenance::Seed, 0)? {
            summary.inserted += 1;
        }
    }
    let expanded: std::collections::HashSet<String> = store.expanded_keys()?.into_iter().collect();
    let mut frontier: Vec<ClassRecord> = store.records().into_iter().filter(|r| !expanded.contains(&r.key)).collect();
    frontier.sort_by_key(|r| r.depth);
    let mut halted = None;
    while !frontier.is_empty() && halted.is_none() {
        if full(store) {
            halted = Some("max_classes reached".to_string());
            break;
        }
        let depth = frontier[0].depth;
        let (level, rest): (Vec<_>, Vec<_>) = frontier.into_iter().partition(|r| r.depth == depth);
        frontier = rest;
        if depth >= cfg.max_depth {
            halted = Some("max_depth reached".to_string());
            break;
        }
        // Equal certificates (canonical graph included) already imply
        // equivalence, so self-loops need no witness search.
        let generated: Vec<Result<Vec<(Neighbor, Certificate, bool)>>> = level
            .par_iter()
            .map(|rec| {
                let own = certificate(&rec.representative)?;
                neighbors(&rec.representative, cfg)?
                    .into_par_iter()
                    .map(|nb| {
                        let cert = certificate(&nb.matrix)?;
                        let is_self = cert == own;
                        Ok((nb, cert, is_self))
                    })
                    .collect()
            })
            .collect();
        for (rec, batch) in level.iter().zip(generated) {
            let batch = batch?;
            let mut complete = true;
            for (nb, cert, is_self) in batch {
                if summary.nodes >= cfg.node_budget {
                    halted = Some("node budget exhausted".to_string());
                    complete = false;
                    break;
                }
                summary.nodes += 1;
                if is_self {
                    store.record_edge(&rec.key, "self", &nb.descriptor)?;
                    summary.self_loops += 1;
                    continue;
                }
                if full(store) {
                    halted = Some("max_classes reached".to_string());
                    complete = false;
                    break;
                }
                let prov = Provenance::Switch { parent: rec.key.clone(), descriptor: nb.descriptor.clone() };
                let key = match store.insert_if_new(&nb.matrix, &cert, prov, depth + 1)? {
                    Insert::Inserted(key) => {
                        summary.inserted += 1;
                        let new = store.records().into_iter().find(|r| r.key == key).expect("just inserted");
                        frontier.push(new);
                        key
                    }
                    Insert::Duplicate(key) => key,
                };
                store.record_edge(&rec.key, &key, &nb.descriptor)?;
            }
            store.flush_edges()?;
            if !complete {
                break;
            }
            store.mark_expanded(&rec.key)?;
            summary.expanded += 1;
        }
    }
    summary.classes = store.len();
    summary.halted = halted;
    Ok(summary)
}

/// Counts per depth and edge totals of a store.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StoreReport {
    pub classes: usize,
    pub depths: BTreeMap<usize, usize>,
    pub orders: BTreeMap<(usize, usize), usize>,
    pub edges: usize,
    pub self_loops: usize,
    pub expanded: usize,
}

pub fn classify_store(store: &ClassStore) -> Result<StoreReport> {
    let records = store.records();
    let mut depths = BTreeMap::new();
    let mut orders = BTreeMap::new();
    for r in &records {
        *depths.entry(r.depth).or_insert(0) += 1;
        *orders.entry((r.representative.n(), r.representative.k())).or_insert(0) += 1;
    }
    let edges = store.edges()?;
    let self_loops = edges.iter().filter(|e| e.1 == "self").count();
    Ok(StoreReport {
        classes: records.len(),
        depths,
        orders,
        edges: edges.len(),
        self_loops,
        expanded: store.expanded_keys()?.len(),
    })
}

impl fmt::Display for StoreReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "classes {}", self.classes)?;
        for ((n, k), c) in &self.orders {
            writeln!(f, "order {n} k {k}: {c}")?;
        }
        for (d, c) in &self.depths {
            writeln!(f, "depth {d}: {c}")?;
        }
        writeln!(f, "expanded {}", self.expanded)?;
        write!(f, "edges {} (self-loops {})", self.edges, self.self_loops)
    }
}
