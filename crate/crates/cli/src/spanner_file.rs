//! Spanner files: a `# algo=.. k=.. eps=.. n=.. source_hash=..` line
//! followed by a plain edge list.

use std::io::{BufRead, Write};

use sha2::{Digest, Sha256};
use spanner_core::graph::{parse_graph, write_edge_list, GraphFormat};
use spanner_core::WeightedGraph;

use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct Header {
    pub algo: String,
    pub k: usize,
    pub eps: f64,
    pub n: usize,
    pub source_hash: String,
}

impl Header {
    pub fn line(&self) -> String {
        format!(
            "# algo={} k={} eps={} n={} source_hash={}",
            self.algo, self.k, self.eps, self.n, self.source_hash
        )
    }

    pub fn parse(line: &str) -> Result<Self, CliError> {
        let body = line
            .trim()
            .strip_prefix('#')
            .ok_or_else(|| CliError::Config("spanner file lacks its header line".into()))?;
        let get = |key: &str| -> Result<String, CliError> {
            body.split_whitespace()
                .find_map(|kv| kv.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
                .map(str::to_string)
                .ok_or_else(|| CliError::Config(format!("spanner header is missing {key}")))
        };
        let num = |key: &str, v: String| -> Result<f64, CliError> {
            v.parse().map_err(|_| CliError::Config(format!("bad {key} in spanner header: {v:?}")))
        };
        let algo = get("algo")?;
        let k = num("k", get("k")?)? as usize;
        let eps = num("eps", get("eps")?)?;
        let n = num("n", get("n")?)? as usize;
        let source_hash = get("source_hash")?;
        Ok(Header { algo, k, eps, n, source_hash })
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn write_spanner<W: Write>(out: &mut W, header: &Header, h: &WeightedGraph) -> std::io::Result<()> {
    writeln!(out, "{}", header.line())?;
    write_edge_list(out, h)
}

pub fn read_spanner<R: BufRead>(mut reader: R) -> Result<(Header, WeightedGraph), CliError> {
    let mut first = String::new();
    reader.read_line(&mut first).map_err(|e| CliError::Config(e.to_string()))?;
    let header = Header::parse(&first)?;
    let (h, _) = parse_graph(reader, GraphFormat::EdgeList).map_err(|e| CliError::Config(format!("spanner file: {e}")))?;
    Ok((header, h))
}
