//! Dataset ingestion and metadata. Two text formats are supported: the
//! UCI docword bag-of-words layout and a diff-friendly native sparse
//! format ("n c" header, then one "idx:val ..." line per point).

use std::io::{BufRead, BufReader, Read, Write};

use crate::error::{Error, Result};
use crate::vector::{CategoricalVector, Sparsity};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub name: String,
    points: Vec<CategoricalVector>,
    n: usize,
    c: u32,
    sigma: Sparsity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetStats {
    pub n: usize,
    pub c: u32,
    pub sigma: usize,
    pub count: usize,
}

impl Dataset {
    pub fn new(name: impl Into<String>, points: Vec<CategoricalVector>) -> Result<Self> {
        let n = match points.first() {
            Some(p) => p.dim(),
            None => return Err(Error::EmptyDataset),
        };
        if let Some(bad) = points.iter().find(|p| p.dim() != n) {
            return Err(Error::DimensionMismatch {
                vector: bad.dim(),
                params: n,
            });
        }
        let c = points.iter().map(|p| p.max_value()).max().unwrap_or(0);
        let sigma = points.iter().map(|p| p.nnz()).max().unwrap_or(0);
        Ok(Self {
            name: name.into(),
            points,
            n,
            c,
            sigma: Sparsity(sigma),
        })
    }

    pub fn points(&self) -> &[CategoricalVector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Maximum observed category value.
    pub fn c(&self) -> u32 {
        self.c
    }

    pub fn sigma(&self) -> Sparsity {
        self.sigma
    }

    pub fn stats(&self) -> DatasetStats {
        DatasetStats {
            n: self.n,
            c: self.c,
            sigma: self.sigma.0,
            count: self.points.len(),
        }
    }
}

/// Parse the UCI docword layout: three header lines (D, W, NNZ) then
/// NNZ lines of "docID wordID count". Counts above `cap` (when given)
/// are clipped to it; the clip count is returned alongside.
pub fn load_docword(source: impl Read, cap: Option<u32>) -> Result<(Dataset, usize)> {
    let reader = BufReader::new(source);
    let mut lines = reader.lines().enumerate();

    let mut header = |what: &str| -> Result<usize> {
        match lines.next() {
            Some((idx, line)) => {
                let line = line?;
                line.trim().parse().map_err(|_| Error::Parse {
                    line: idx + 1,
                    message: format!("bad {what} header: {line:?}"),
                })
            }
            None => Err(Error::Parse {
                line: 0,
                message: format!("missing {what} header"),
            }),
        }
    };
    let docs = header("D")?;
    let words = header("W")?;
    let nnz = header("NNZ")?;
    if docs == 0 || words == 0 {
        return Err(Error::Parse {
            line: 2,
            message: "docword requires D >= 1 and W >= 1".into(),
        });
    }

    let mut entries: Vec<Vec<(u32, u32)>> = vec![Vec::new(); docs];
    let mut clipped = 0usize;
    let mut seen = 0usize;
    for (idx, line) in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let mut parts = line.split_whitespace();
        let mut field = |what: &str| -> Result<u64> {
            parts
                .next()
                .ok_or_else(|| Error::Parse {
                    line: lineno,
                    message: format!("missing {what}"),
                })?
                .parse()
                .map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("bad {what}"),
                })
        };
        let doc = field("docID")?;
        let word = field("wordID")?;
        let count = field("count")?;
        if parts.next().is_some() {
            return Err(Error::Parse {
                line: lineno,
                message: "trailing fields".into(),
            });
        }
        if doc == 0 || doc > docs as u64 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("docID {doc} out of range [1, {docs}]"),
            });
        }
        if word == 0 || word > words as u64 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("wordID {word} out of range [1, {words}]"),
            });
        }
        if count == 0 || count > u32::MAX as u64 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("count {count} out of range"),
            });
        }
        let mut count = count as u32;
        if let Some(cap) = cap {
            if count > cap {
                count = cap;
                clipped += 1;
            }
        }
        let doc_entries = &mut entries[doc as usize - 1];
        if doc_entries.iter().any(|&(w, _)| w == word as u32) {
            return Err(Error::Parse {
                line: lineno,
                message: format!("duplicate (docID, wordID) = ({doc}, {word})"),
            });
        }
        doc_entries.push((word as u32, count));
        seen += 1;
    }
    if seen != nnz {
        return Err(Error::Parse {
            line: 3,
            message: format!("header promises {nnz} entries, found {seen}"),
        });
    }

    let points = entries
        .into_iter()
        .map(|e| CategoricalVector::new(words, e))
        .collect::<Result<Vec<_>>>()?;
    Ok((Dataset::new("docword", points)?, clipped))
}

/// Native sparse text format writer.
pub fn save_native(ds: &Dataset, mut sink: impl Write) -> Result<()> {
    writeln!(sink, "{} {}", ds.n(), ds.c())?;
    for point in ds.points() {
        let fields: Vec<String> = point
            .entries()
            .iter()
            .map(|(i, v)| format!("{i}:{v}"))
            .collect();
        writeln!(sink, "{}", fields.join(" "))?;
    }
    Ok(())
}

/// Native sparse text format reader.
pub fn load_native(source: impl Read) -> Result<Dataset> {
    let reader = BufReader::new(source);
    let mut lines = reader.lines().enumerate();
    let (n, _c) = match lines.next() {
        Some((_, line)) => {
            let line = line?;
            let mut parts = line.split_whitespace();
            let n: usize = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Parse {
                    line: 1,
                    message: "bad header, expected \"n c\"".into(),
                })?;
            let c: u32 = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Parse {
                    line: 1,
                    message: "bad header, expected \"n c\"".into(),
                })?;
            (n, c)
        }
        None => {
            return Err(Error::Parse {
                line: 0,
                message: "empty file".into(),
            })
        }
    };
    let mut points = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        let mut entries = Vec::new();
        for field in line.split_whitespace() {
            let (i, v) = field.split_once(':').ok_or_else(|| Error::Parse {
                line: lineno,
                message: format!("bad field {field:?}, expected idx:val"),
            })?;
            let i: u32 = i.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("bad index in {field:?}"),
            })?;
            let v: u32 = v.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("bad value in {field:?}"),
            })?;
            entries.push((i, v));
        }
        points.push(CategoricalVector::new(n, entries).map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?);
    }
    Dataset::new("native", points)
}
