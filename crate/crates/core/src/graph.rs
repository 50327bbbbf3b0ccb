//! Immutable unweighted simple digraphs and edge-list ingestion.
//!
//! Graphs are stored in compressed sparse row form: the successors of node
//! `i` occupy `targets[offsets[i]..offsets[i + 1]]`, sorted by id. Nodes are
//! the dense ids `0..n`.
//!
//! The edge-list text format is one arc per line, `src dst`, separated by
//! whitespace (or a configured character). Lines starting with `#` or `%` are
//! comments, except the optional header `# n=<N>` which fixes the node count
//! so that trailing isolated nodes survive a round trip. Extra columns after
//! the first two (KONECT weight/timestamp columns) are ignored.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};

/// Largest node count representable by the `u32` successor storage.
pub const MAX_NODES: usize = u32::MAX as usize;
/// Largest arc count; arc offsets must fit in `u32` for the forest sampler.
pub const MAX_ARCS: usize = u32::MAX as usize;

/// An immutable unweighted simple directed graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    in_degree: Vec<u32>,
}

/// What to do with a repeated `src dst` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DuplicatePolicy {
    #[default]
    Merge,
    Reject,
}

/// What to do with an arc `i -> i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelfArcPolicy {
    #[default]
    Drop,
    Reject,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Separator {
    #[default]
    Whitespace,
    Char(char),
}

/// Parsing options for edge-list sources.
#[derive(Debug, Clone)]
pub struct EdgeListOptions {
    pub comment_prefixes: Vec<String>,
    pub separator: Separator,
    pub duplicates: DuplicatePolicy,
    pub self_arcs: SelfArcPolicy,
    /// Map arbitrary (sparse, 1-based, ...) ids onto `0..n` in order of first
    /// appearance. The header node count is ignored in this mode.
    pub relabel: bool,
}

impl Default for EdgeListOptions {
    fn default() -> Self {
        Self {
            comment_prefixes: vec!["#".to_string(), "%".to_string()],
            separator: Separator::Whitespace,
            duplicates: DuplicatePolicy::Merge,
            self_arcs: SelfArcPolicy::Drop,
            relabel: false,
        }
    }
}

/// A parsed graph together with what the loader had to clean up.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Digraph,
    pub duplicates_merged: usize,
    pub self_arcs_dropped: usize,
    /// `original_ids[v]` is the file id of dense node `v` (relabel mode only).
    pub original_ids: Option<Vec<u64>>,
}

impl Digraph {
    /// Builds a graph from arcs, validating the simple-digraph invariants.
    ///
    /// Self-arcs and duplicates are rejected; use [`Digraph::from_arcs_with`]
    /// for lenient construction.
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<Self> {
        Self::from_arcs_with(
            n,
            arcs.iter().copied(),
            DuplicatePolicy::Reject,
            SelfArcPolicy::Reject,
        )
        .map(|(g, _, _)| g)
    }

    /// Builds a graph from arcs under the given cleanup policies and returns
    /// `(graph, duplicates_merged, self_arcs_dropped)`.
    pub fn from_arcs_with(
        n: usize,
        arcs: impl IntoIterator<Item = (usize, usize)>,
        duplicates: DuplicatePolicy,
        self_arcs: SelfArcPolicy,
    ) -> Result<(Self, usize, usize)> {
        if n > MAX_NODES {
            return Err(Error::InvalidGraph(format!(
                "{n} nodes exceed the supported maximum of {MAX_NODES}"
            )));
        }
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        let mut dropped = 0;
        for (u, v) in arcs {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "arc ({u}, {v}) has an endpoint outside [0, {n})"
                )));
            }
            if u == v {
                match self_arcs {
                    SelfArcPolicy::Drop => {
                        dropped += 1;
                        continue;
                    }
                    SelfArcPolicy::Reject => {
                        return Err(Error::InvalidGraph(format!("self-arc at node {u}")))
                    }
                }
            }
            pairs.push((u as u32, v as u32));
        }
        if pairs.len() > MAX_ARCS {
            return Err(Error::InvalidGraph(format!(
                "{} arcs exceed the supported maximum of {MAX_ARCS}",
                pairs.len()
            )));
        }
        pairs.sort_unstable();
        let before = pairs.len();
        pairs.dedup();
        let merged = before - pairs.len();
        if merged > 0 && duplicates == DuplicatePolicy::Reject {
            return Err(Error::InvalidGraph(format!("{merged} duplicate arc(s)")));
        }

        let mut offsets = vec![0usize; n + 1];
        let mut in_degree = vec![0u32; n];
        for &(u, v) in &pairs {
            offsets[u as usize + 1] += 1;
            in_degree[v as usize] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut targets = Vec::with_capacity(pairs.len());
        crate::mem::advise_huge_pages(&targets);
        targets.extend(pairs.into_iter().map(|(_, v)| v));
        Ok((
            Self {
                offsets,
                targets,
                in_degree,
            },
            merged,
            dropped,
        ))
    }

    /// A graph with `n` isolated nodes.
    pub fn empty(n: usize) -> Self {
        Self::from_arcs(n, &[]).expect("an arc-free graph is always valid")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.in_degree.len()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.targets.len()
    }

    /// Start of each node's successor run in [`Digraph::targets`]; length `n + 1`.
    #[inline]
    pub(crate) fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// All successor lists concatenated in node order.
    #[inline]
    pub(crate) fn targets(&self) -> &[u32] {
        &self.targets
    }

    /// The successors `N(i)` of node `i`, sorted ascending.
    #[inline]
    pub fn out_neighbors(&self, i: usize) -> &[u32] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn out_degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    #[inline]
    pub fn in_degree(&self, i: usize) -> usize {
        self.in_degree[i] as usize
    }

    /// `(out_degree, in_degree)` for every node.
    pub fn degrees(&self) -> (Vec<usize>, Vec<usize>) {
        let out = (0..self.n()).map(|i| self.out_degree(i)).collect();
        let inn = self.in_degree.iter().map(|&d| d as usize).collect();
        (out, inn)
    }

    pub fn max_out_degree(&self) -> usize {
        (0..self.n()).map(|i| self.out_degree(i)).max().unwrap_or(0)
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.out_neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// All arcs in `(src, dst)` lexicographic order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| self.out_neighbors(u).iter().map(move |&v| (u, v as usize)))
    }

    /// Serializes to the edge-list format, with an `# n=<N>` header.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(16 + self.m() * 12);
        writeln!(out, "# n={}", self.n()).unwrap();
        for (u, v) in self.arcs() {
            writeln!(out, "{u} {v}").unwrap();
        }
        out
    }

    /// Nodes reachable from `start` along directed paths, `start` included.
    pub fn reachable_from(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(u) = stack.pop() {
            for &v in self.out_neighbors(u) {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    stack.push(v as usize);
                }
            }
        }
        seen
    }
}

/// Loads an edge-list file.
pub fn load_edge_list(path: impl AsRef<Path>, opts: &EdgeListOptions) -> Result<LoadedGraph> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_edge_list(BufReader::new(file), opts).map_err(|e| match e {
        Error::Io { source, .. } => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    })
}

pub fn parse_edge_list_str(text: &str, opts: &EdgeListOptions) -> Result<LoadedGraph> {
    parse_edge_list(text.as_bytes(), opts)
}

/// Parses edge-list text from any buffered reader.
pub fn parse_edge_list<R: BufRead>(reader: R, opts: &EdgeListOptions) -> Result<LoadedGraph> {
    let mut raw: Vec<(u64, u64)> = Vec::new();
    let mut header_n: Option<usize> = None;

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|source| Error::Io {
            path: "<stream>".into(),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if opts
            .comment_prefixes
            .iter()
            .any(|p| trimmed.starts_with(p.as_str()))
        {
            if let Some(n) = parse_header(trimmed, lineno)? {
                header_n = Some(n);
            }
            continue;
        }
        let mut fields: Box<dyn Iterator<Item = &str>> = match opts.separator {
            Separator::Whitespace => Box::new(trimmed.split_whitespace()),
            Separator::Char(c) => Box::new(trimmed.split(c).map(str::trim)),
        };
        let mut next_id = |what: &str| -> Result<u64> {
            let tok = fields.next().ok_or_else(|| Error::Parse {
                line: lineno,
                message: format!("missing {what} id"),
            })?;
            tok.parse::<u64>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("{what} id {tok:?} is not a non-negative integer"),
            })
        };
        let src = next_id("source")?;
        let dst = next_id("target")?;
        raw.push((src, dst));
    }

    let (n, arcs, original_ids) = if opts.relabel {
        let mut map: HashMap<u64, usize> = HashMap::new();
        let mut original = Vec::new();
        let mut dense = |id: u64| -> usize {
            *map.entry(id).or_insert_with(|| {
                original.push(id);
                original.len() - 1
            })
        };
        let arcs: Vec<(usize, usize)> = raw.iter().map(|&(u, v)| (dense(u), dense(v))).collect();
        (original.len(), arcs, Some(original))
    } else {
        let max_id = raw.iter().map(|&(u, v)| u.max(v)).max();
        let implied = max_id.map_or(0, |m| m as usize + 1);
        let n = match header_n {
            Some(h) if h < implied => {
                return Err(Error::InvalidGraph(format!(
                    "header declares n={h} but id {} appears",
                    implied - 1
                )))
            }
            Some(h) => h,
            None => implied,
        };
        let arcs = raw.iter().map(|&(u, v)| (u as usize, v as usize)).collect();
        (n, arcs, None)
    };

    let (graph, duplicates_merged, self_arcs_dropped) =
        Digraph::from_arcs_with(n, arcs, opts.duplicates, opts.self_arcs)?;
    Ok(LoadedGraph {
        graph,
        duplicates_merged,
        self_arcs_dropped,
        original_ids,
    })
}

fn parse_header(comment: &str, lineno: usize) -> Result<Option<usize>> {
    let body = comment.trim_start_matches(['#', '%']).trim();
    let Some(value) = body.strip_prefix("n=") else {
        return Ok(None);
    };
    value
        .trim()
        .parse::<usize>()
        .map(Some)
        .map_err(|_| Error::Parse {
            line: lineno,
            message: format!("bad node-count header {comment:?}"),
        })
}
