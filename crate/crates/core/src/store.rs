//! Chunked on-disk storage for [`ForestList`]s.
//!
//! A list is written as one or more chunk files `<stem>.part<k>.bfl`
//! (`k = 1..=t`). Each chunk is ASCII with LF line endings:
//!
//! ```text
//! #burnlab-list v1
//! n=3 m=6 kind=deficient l1min=8 count=2 chunk=1/1
//! 8,13,15
//! 10,13,13
//! ```
//!
//! Rows are canonical comma-separated tuples in strictly increasing
//! lexicographic order across the whole list. A fixed-width binary variant
//! (`.bfb`, little-endian `u32` per order after the same two header lines
//! with `v1-bin` in the first) exists for very large levels.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::enumerate::{EnumError, ForestList, ListFilter, ListKind};
use crate::forest::{write_orders, Order};

const MAGIC: &str = "#burnlab-list v1";
const MAGIC_BIN: &str = "#burnlab-list v1-bin";
/// Default rows per chunk file.
pub const DEFAULT_CHUNK_ROWS: usize = 10_000_000;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: bad header: {reason}")]
    Header { path: PathBuf, reason: String },
    #[error("{path}: header field {field} disagrees with other chunks")]
    HeaderMismatch { path: PathBuf, field: &'static str },
    #[error("{path}: row {row} is out of order")]
    Unsorted { path: PathBuf, row: usize },
    #[error("{path}: row {row} duplicates the previous row")]
    Duplicate { path: PathBuf, row: usize },
    #[error("{path}: header says {header} rows, file has {actual}")]
    CountMismatch { path: PathBuf, header: usize, actual: usize },
    #[error("{path}: row {row}: {reason}")]
    BadRow { path: PathBuf, row: usize, reason: String },
    #[error("no chunk files found for {0}")]
    Missing(PathBuf),
    #[error("only lists filtered by l_1 alone can be stored (got {0:?})")]
    UnsupportedFilter(ListFilter),
    #[error("input {input} is unsorted at row {row}")]
    MergeUnsorted { input: usize, row: usize },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.to_path_buf(), source }
}

/// Parsed second header line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ListFileHeader {
    pub format_version: u32,
    pub n: usize,
    pub m: u32,
    pub kind: ListKind,
    pub l1_min: Order,
    pub count: usize,
    /// 1-based.
    pub chunk_index: usize,
    pub chunk_total: usize,
}

impl ListFileHeader {
    fn fields_line(&self) -> String {
        format!(
            "n={} m={} kind={} l1min={} count={} chunk={}/{}",
            self.n, self.m, self.kind, self.l1_min, self.count, self.chunk_index, self.chunk_total
        )
    }

    fn parse(path: &Path, magic_line: &str, fields: &str, binary: bool) -> Result<Self, StoreError> {
        let bad = |reason: String| StoreError::Header { path: path.to_path_buf(), reason };
        let want = if binary { MAGIC_BIN } else { MAGIC };
        if magic_line != want {
            return Err(bad(format!("expected {want:?}, found {magic_line:?}")));
        }
        let mut parts = fields.split(' ');
        let mut field = |name: &str| -> Result<String, StoreError> {
            let p = parts.next().ok_or_else(|| bad(format!("missing field {name}")))?;
            p.strip_prefix(name)
                .and_then(|r| r.strip_prefix('='))
                .map(str::to_string)
                .ok_or_else(|| bad(format!("expected {name}=..., found {p:?}")))
        };
        let num = |s: String, name: &str| -> Result<u64, StoreError> {
            s.parse().map_err(|_| bad(format!("field {name} is not a number: {s:?}")))
        };
        let n = num(field("n")?, "n")? as usize;
        let m = num(field("m")?, "m")? as u32;
        let kind_s = field("kind")?;
        let kind = ListKind::parse(&kind_s).ok_or_else(|| bad(format!("unknown kind {kind_s:?}")))?;
        let l1_min = num(field("l1min")?, "l1min")? as Order;
        let count = num(field("count")?, "count")? as usize;
        let chunk = field("chunk")?;
        let (k, t) = chunk.split_once('/').ok_or_else(|| bad(format!("bad chunk {chunk:?}")))?;
        let chunk_index = num(k.to_string(), "chunk")? as usize;
        let chunk_total = num(t.to_string(), "chunk")? as usize;
        if parts.next().is_some() {
            return Err(bad("trailing header fields".into()));
        }
        if n == 0 || chunk_index == 0 || chunk_index > chunk_total {
            return Err(bad(format!("n={n} chunk={chunk_index}/{chunk_total}")));
        }
        Ok(Self { format_version: 1, n, m, kind, l1_min, count, chunk_index, chunk_total })
    }
}

fn chunk_path(stem: &Path, k: usize, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(format!(".part{k}.{ext}"));
    PathBuf::from(s)
}

/// Existing chunk files of `stem` with extension `ext`, by chunk number.
fn chunk_files(stem: &Path, ext: &str) -> Result<Vec<(usize, PathBuf)>, StoreError> {
    let dir = match stem.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let base = stem.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let prefix = format!("{base}.part");
    let suffix = format!(".{ext}");
    let entries = match fs::read_dir(&dir) {
        Ok(e) => e,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(io_err(&dir)(e)),
    };
    let mut out = Vec::new();
    for entry in entries {
        let entry = entry.map_err(io_err(&dir))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(k) = name
            .strip_prefix(&prefix)
            .and_then(|r| r.strip_suffix(&suffix))
            .and_then(|k| k.parse::<usize>().ok())
        {
            out.push((k, entry.path()));
        }
    }
    out.sort();
    Ok(out)
}

fn check_storable(list: &ForestList) -> Result<(), StoreError> {
    if !list.filter().is_plain(list.n()) {
        return Err(StoreError::UnsupportedFilter(list.filter()));
    }
    Ok(())
}

/// Writes `list` as text chunks of at most `chunk_rows` rows, replacing any
/// previous chunks of the same stem. Returns the files written.
pub fn write_list(list: &ForestList, stem: &Path, chunk_rows: usize) -> Result<Vec<PathBuf>, StoreError> {
    write_chunks(list, stem, chunk_rows, false)
}

/// Binary variant of [`write_list`].
pub fn write_list_binary(
    list: &ForestList,
    stem: &Path,
    chunk_rows: usize,
) -> Result<Vec<PathBuf>, StoreError> {
    write_chunks(list, stem, chunk_rows, true)
}

fn write_chunks(
    list: &ForestList,
    stem: &Path,
    chunk_rows: usize,
    binary: bool,
) -> Result<Vec<PathBuf>, StoreError> {
    check_storable(list)?;
    let ext = if binary { "bfb" } else { "bfl" };
    if let Some(dir) = stem.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    for (_, old) in chunk_files(stem, ext)? {
        fs::remove_file(&old).map_err(io_err(&old))?;
    }
    let chunk_rows = chunk_rows.max(1);
    let total = list.len().div_ceil(chunk_rows).max(1);
    let mut written = Vec::with_capacity(total);
    let mut rows = list.rows();
    let mut line = String::new();
    for k in 1..=total {
        let path = chunk_path(stem, k, ext);
        let count = chunk_rows.min(list.len() - (k - 1) * chunk_rows.min(list.len()));
        let count = if list.is_empty() { 0 } else { count };
        let header = ListFileHeader {
            format_version: 1,
            n: list.n(),
            m: list.m(),
            kind: list.kind(),
            l1_min: list.l1_min(),
            count,
            chunk_index: k,
            chunk_total: total,
        };
        let file = File::create(&path).map_err(io_err(&path))?;
        let mut w = BufWriter::new(file);
        let magic = if binary { MAGIC_BIN } else { MAGIC };
        writeln!(w, "{magic}\n{}", header.fields_line()).map_err(io_err(&path))?;
        for row in rows.by_ref().take(count) {
            if binary {
                for x in &row {
                    w.write_all(&x.to_le_bytes()).map_err(io_err(&path))?;
                }
            } else {
                line.clear();
                write_orders(&mut line, &row).expect("writing to a String");
                line.push('\n');
                w.write_all(line.as_bytes()).map_err(io_err(&path))?;
            }
        }
        w.flush().map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}

/// Streams the rows of one chunk file after validating its header.
pub struct ChunkReader {
    path: PathBuf,
    header: ListFileHeader,
    reader: BufReader<File>,
    binary: bool,
    row: usize,
    line: String,
}

impl ChunkReader {
    pub fn open(path: &Path) -> Result<Self, StoreError> {
        let binary = path.extension().is_some_and(|e| e == "bfb");
        let file = File::open(path).map_err(io_err(path))?;
        let mut reader = BufReader::new(file);
        let mut magic = String::new();
        let mut fields = String::new();
        reader.read_line(&mut magic).map_err(io_err(path))?;
        reader.read_line(&mut fields).map_err(io_err(path))?;
        let header = ListFileHeader::parse(
            path,
            magic.strip_suffix('\n').unwrap_or(&magic),
            fields.strip_suffix('\n').unwrap_or(&fields),
            binary,
        )?;
        Ok(Self { path: path.to_path_buf(), header, reader, binary, row: 0, line: String::new() })
    }

    pub fn header(&self) -> &ListFileHeader {
        &self.header
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn bad_row(&self, reason: impl Into<String>) -> StoreError {
        StoreError::BadRow { path: self.path.clone(), row: self.row, reason: reason.into() }
    }

    /// Next row, parsed but not yet checked for order.
    pub fn next_row(&mut self) -> Result<Option<Vec<Order>>, StoreError> {
        let n = self.header.n;
        if self.binary {
            let mut buf = vec![0u8; 4 * n];
            match self.reader.read_exact(&mut buf) {
                Ok(()) => {}
                Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => {
                    // distinguish a clean end from a torn row
                    return if self.reader.fill_buf().map_err(io_err(&self.path))?.is_empty()
                        && buf.iter().all(|&b| b == 0)
                    {
                        Ok(None)
                    } else {
                        Err(self.bad_row("truncated binary row"))
                    };
                }
                Err(e) => return Err(io_err(&self.path)(e)),
            }
            self.row += 1;
            let row = buf
                .chunks_exact(4)
                .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect();
            return Ok(Some(row));
        }
        self.line.clear();
        let read = self.reader.read_line(&mut self.line).map_err(io_err(&self.path))?;
        if read == 0 {
            return Ok(None);
        }
        self.row += 1;
        let Some(text) = self.line.strip_suffix('\n') else {
            return Err(self.bad_row("missing LF line ending"));
        };
        let mut row = Vec::with_capacity(n);
        for part in text.split(',') {
            if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) || part.starts_with('0') {
                return Err(self.bad_row(format!("not a canonical decimal order: {part:?}")));
            }
            row.push(part.parse().map_err(|_| self.bad_row(format!("order too large: {part}")))?);
        }
        Ok(Some(row))
    }
}

/// Reads and fully validates every chunk of `stem` (text chunks, or binary
/// chunks when no text chunk exists).
pub fn read_list(stem: &Path) -> Result<ForestList, StoreError> {
    let mut files = chunk_files(stem, "bfl")?;
    if files.is_empty() {
        files = chunk_files(stem, "bfb")?;
    }
    if files.is_empty() {
        return Err(StoreError::Missing(stem.to_path_buf()));
    }
    let mut first: Option<ListFileHeader> = None;
    let mut list: Option<ForestList> = None;
    let mut rows: Vec<Vec<Order>> = Vec::new();
    let mut prev: Option<Vec<Order>> = None;
    for (i, (k, path)) in files.iter().enumerate() {
        let mut reader = ChunkReader::open(path)?;
        let h = reader.header().clone();
        let mismatch = |field| StoreError::HeaderMismatch { path: path.clone(), field };
        if *k != h.chunk_index || h.chunk_index != i + 1 {
            return Err(mismatch("chunk"));
        }
        match &first {
            None => {
                if h.chunk_total != files.len() {
                    return Err(mismatch("chunk"));
                }
                let shape = ForestList::empty(h.n, h.m, h.kind, ListFilter::l1_at_least(h.l1_min))
                    .map_err(|e| StoreError::Header { path: path.clone(), reason: e.to_string() })?;
                list = Some(shape);
                first = Some(h.clone());
            }
            Some(f) => {
                if f.n != h.n {
                    return Err(mismatch("n"));
                }
                if f.m != h.m {
                    return Err(mismatch("m"));
                }
                if f.kind != h.kind {
                    return Err(mismatch("kind"));
                }
                if f.l1_min != h.l1_min {
                    return Err(mismatch("l1min"));
                }
                if f.chunk_total != h.chunk_total {
                    return Err(mismatch("chunk"));
                }
            }
        }
        let shape = list.as_ref().expect("set from the first chunk");
        let mut actual = 0;
        while let Some(row) = reader.next_row()? {
            actual += 1;
            if let Err(e) = shape.check_row(&row) {
                return Err(reader.bad_row(e.to_string()));
            }
            if let Some(p) = &prev {
                if *p == row {
                    return Err(StoreError::Duplicate { path: path.clone(), row: reader.row });
                }
                if *p > row {
                    return Err(StoreError::Unsorted { path: path.clone(), row: reader.row });
                }
            }
            prev = Some(row.clone());
            rows.push(row);
        }
        if actual != h.count {
            return Err(StoreError::CountMismatch { path: path.clone(), header: h.count, actual });
        }
    }
    let h = first.expect("at least one chunk");
    ForestList::from_rows(h.n, h.m, h.kind, ListFilter::l1_at_least(h.l1_min), rows).map_err(
        |e: EnumError| StoreError::Header { path: stem.to_path_buf(), reason: e.to_string() },
    )
}

/// K-way merge of individually sorted streams into one sorted stream without
/// duplicates. Holds one pending item per input. Yields an error and stops
/// when some input goes backwards.
pub fn merge_chunks<T: Ord, I: Iterator<Item = T>>(inputs: Vec<I>) -> MergeChunks<T, I> {
    let mut heap = BinaryHeap::with_capacity(inputs.len());
    let mut inputs: Vec<(I, usize)> = inputs.into_iter().map(|it| (it, 0)).collect();
    for (idx, (it, row)) in inputs.iter_mut().enumerate() {
        if let Some(x) = it.next() {
            *row += 1;
            heap.push(Reverse((x, idx)));
        }
    }
    MergeChunks { inputs, heap, failed: false }
}

pub(crate) use merge_chunks as merge_sorted;

pub struct MergeChunks<T: Ord, I> {
    inputs: Vec<(I, usize)>,
    heap: BinaryHeap<Reverse<(T, usize)>>,
    failed: bool,
}

impl<T: Ord, I: Iterator<Item = T>> Iterator for MergeChunks<T, I> {
    type Item = Result<T, StoreError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        let Reverse((item, idx)) = self.heap.pop()?;
        if let Err(e) = self.refill(idx, &item) {
            self.failed = true;
            return Some(Err(e));
        }
        while let Some(Reverse((top, _))) = self.heap.peek() {
            if *top != item {
                break;
            }
            let Reverse((dup, j)) = self.heap.pop().expect("peeked");
            if let Err(e) = self.refill(j, &dup) {
                self.failed = true;
                return Some(Err(e));
            }
        }
        Some(Ok(item))
    }
}

impl<T: Ord, I: Iterator<Item = T>> MergeChunks<T, I> {
    fn refill(&mut self, idx: usize, last: &T) -> Result<(), StoreError> {
        let (it, row) = &mut self.inputs[idx];
        if let Some(x) = it.next() {
            *row += 1;
            if x < *last {
                return Err(StoreError::MergeUnsorted { input: idx, row: *row });
            }
            self.heap.push(Reverse((x, idx)));
        }
        Ok(())
    }
}

/// Merges stored lists of one shape into a single list at `out`, e.g. the
/// separately written shards of one level.
pub fn merge_list_files(stems: &[PathBuf], out: &Path, chunk_rows: usize) -> Result<ForestList, StoreError> {
    let lists = stems.iter().map(|s| read_list(s)).collect::<Result<Vec<_>, _>>()?;
    let Some(first) = lists.first() else {
        return Err(StoreError::Missing(out.to_path_buf()));
    };
    for (l, stem) in lists.iter().zip(stems) {
        if l.n() != first.n() || l.m() != first.m() || l.kind() != first.kind() {
            return Err(StoreError::HeaderMismatch { path: stem.clone(), field: "n/m/kind" });
        }
    }
    let l1_min = lists.iter().map(ForestList::l1_min).min().unwrap_or(0);
    let streams: Vec<_> = lists.iter().map(|l| l.rows()).collect();
    let mut rows = Vec::new();
    for (i, r) in merge_chunks(streams).enumerate() {
        rows.push(r.map_err(|e| match e {
            StoreError::MergeUnsorted { input, .. } => {
                StoreError::Unsorted { path: stems[input].clone(), row: i + 1 }
            }
            other => other,
        })?);
    }
    let merged = ForestList::from_rows(
        first.n(),
        first.m(),
        first.kind(),
        ListFilter::l1_at_least(l1_min),
        rows,
    )
    .map_err(|e| StoreError::Header { path: out.to_path_buf(), reason: e.to_string() })?;
    write_list(&merged, out, chunk_rows)?;
    Ok(merged)
}

/// Naming convention for lists kept in one directory:
/// `<dir>/n<n>-m<m>-<kind>-l<l1min>.part<k>.bfl`.
#[derive(Debug, Clone)]
pub struct ListDir {
    root: PathBuf,
}

impl ListDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn stem(&self, n: usize, m: u32, kind: ListKind, l1_min: Order) -> PathBuf {
        let mut name = String::new();
        write!(name, "n{n}-m{m}-{kind}-l{l1_min}").expect("writing to a String");
        self.root.join(name)
    }

    pub fn exists(&self, n: usize, m: u32, kind: ListKind, l1_min: Order) -> bool {
        let stem = self.stem(n, m, kind, l1_min);
        chunk_files(&stem, "bfl").is_ok_and(|f| !f.is_empty())
            || chunk_files(&stem, "bfb").is_ok_and(|f| !f.is_empty())
    }

    pub fn load(&self, n: usize, m: u32, kind: ListKind, l1_min: Order) -> Result<ForestList, StoreError> {
        read_list(&self.stem(n, m, kind, l1_min))
    }

    pub fn save(&self, list: &ForestList, chunk_rows: usize) -> Result<Vec<PathBuf>, StoreError> {
        write_list(list, &self.stem(list.n(), list.m(), list.kind(), list.l1_min()), chunk_rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn list(n: usize, m: u32, kind: ListKind, l1: Order, rows: &[&[Order]]) -> ForestList {
        ForestList::from_rows(n, m, kind, ListFilter::l1_at_least(l1), rows.iter().map(|r| r.to_vec()))
            .unwrap()
    }

    #[test]
    fn single_row_file_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("seed");
        let l = list(3, 3, ListKind::Well, 0, &[&[1, 3, 5]]);
        let files = write_list(&l, &stem, DEFAULT_CHUNK_ROWS).unwrap();
        assert_eq!(files.len(), 1);
        assert!(files[0].ends_with("seed.part1.bfl"));
        let text = fs::read_to_string(&files[0]).unwrap();
        assert_eq!(text, "#burnlab-list v1\nn=3 m=3 kind=well l1min=0 count=1 chunk=1/1\n1,3,5\n");
        assert_eq!(read_list(&stem).unwrap(), l);
    }

    #[test]
    fn empty_list_writes_one_chunk() {
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("empty");
        let l = list(3, 9, ListKind::Deficient, 8, &[]);
        let files = write_list(&l, &stem, 10).unwrap();
        let text = fs::read_to_string(&files[0]).unwrap();
        assert_eq!(text, "#burnlab-list v1\nn=3 m=9 kind=deficient l1min=8 count=0 chunk=1/1\n");
        assert_eq!(read_list(&stem).unwrap(), l);
    }

    #[test]
    fn chunked_round_trip_and_stale_chunks() {
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("x");
        let rows: Vec<Vec<Order>> = crate::enumerate::Partitions::new(36, 3).collect();
        let l = ForestList::from_rows(3, 6, ListKind::Candidates, ListFilter::default(), rows).unwrap();
        let files = write_list(&l, &stem, 7).unwrap();
        assert_eq!(files.len(), l.len().div_ceil(7));
        assert_eq!(read_list(&stem).unwrap(), l);
        // rewriting with fewer chunks removes the old ones
        write_list(&l, &stem, 1000).unwrap();
        assert_eq!(chunk_files(&stem, "bfl").unwrap().len(), 1);
        assert_eq!(read_list(&stem).unwrap(), l);
    }

    #[test]
    fn binary_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("b");
        let l = list(3, 6, ListKind::Deficient, 8, &[&[8, 13, 15], &[10, 13, 13]]);
        write_list_binary(&l, &stem, 1).unwrap();
        assert_eq!(read_list(&stem).unwrap(), l);
    }

    fn write_raw(dir: &Path, name: &str, body: &str) -> PathBuf {
        let stem = dir.join(name);
        fs::write(chunk_path(&stem, 1, "bfl"), body).unwrap();
        stem
    }

    #[test]
    fn rejects_tampering() {
        let dir = tempfile::tempdir().unwrap();
        let h = "#burnlab-list v1\nn=3 m=6 kind=deficient l1min=8 count=2 chunk=1/1\n";
        let s = write_raw(dir.path(), "unsorted", &format!("{h}10,13,13\n8,13,15\n"));
        assert!(matches!(read_list(&s), Err(StoreError::Unsorted { row: 2, .. })));
        let s = write_raw(dir.path(), "dup", &format!("{h}8,13,15\n8,13,15\n"));
        assert!(matches!(read_list(&s), Err(StoreError::Duplicate { row: 2, .. })));
        let h3 = h.replace("count=2", "count=3");
        let s = write_raw(dir.path(), "count", &format!("{h3}8,13,15\n10,13,13\n"));
        assert!(matches!(
            read_list(&s),
            Err(StoreError::CountMismatch { header: 3, actual: 2, .. })
        ));
        let s = write_raw(dir.path(), "noncanon", &format!("{h}13,8,15\n10,13,13\n"));
        assert!(matches!(read_list(&s), Err(StoreError::BadRow { row: 1, .. })));
        let s = write_raw(dir.path(), "total", &format!("{h}8,13,16\n10,13,13\n"));
        assert!(matches!(read_list(&s), Err(StoreError::BadRow { row: 1, .. })));
        let s = write_raw(dir.path(), "magic", "#other v1\nn=3\n");
        assert!(matches!(read_list(&s), Err(StoreError::Header { .. })));
        let s = write_raw(dir.path(), "crlf", &format!("{h}8,13,15\r\n10,13,13\n"));
        assert!(matches!(read_list(&s), Err(StoreError::BadRow { .. })));
        assert!(matches!(read_list(&dir.path().join("nothing")), Err(StoreError::Missing(_))));
    }

    #[test]
    fn rejects_inconsistent_chunks() {
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("mix");
        fs::write(
            chunk_path(&stem, 1, "bfl"),
            "#burnlab-list v1\nn=3 m=6 kind=deficient l1min=8 count=1 chunk=1/2\n8,13,15\n",
        )
        .unwrap();
        fs::write(
            chunk_path(&stem, 2, "bfl"),
            "#burnlab-list v1\nn=3 m=6 kind=deficient l1min=7 count=1 chunk=2/2\n10,13,13\n",
        )
        .unwrap();
        assert!(matches!(
            read_list(&stem),
            Err(StoreError::HeaderMismatch { field: "l1min", .. })
        ));
    }

    #[test]
    fn refuses_floor_filtered_lists() {
        let dir = tempfile::tempdir().unwrap();
        let l = ForestList::empty(3, 6, ListKind::Well, ListFilter::band(1, 10)).unwrap();
        assert!(matches!(
            write_list(&l, &dir.path().join("f"), 10),
            Err(StoreError::UnsupportedFilter(_))
        ));
    }

    #[test]
    fn merge_examples() {
        let a = vec![vec![1, 8]];
        let b = vec![vec![3, 6], vec![4, 5]];
        let got: Vec<_> = merge_chunks(vec![a.into_iter(), b.into_iter()])
            .collect::<Result<_, _>>()
            .unwrap();
        assert_eq!(got, vec![vec![1, 8], vec![3, 6], vec![4, 5]]);

        let same = vec![1, 2, 3];
        let got: Vec<_> = merge_chunks(vec![same.clone().into_iter(), same.clone().into_iter()])
            .collect::<Result<_, _>>()
            .unwrap();
        assert_eq!(got, same);

        let got: Vec<_> = merge_chunks(vec![Vec::new().into_iter(), same.clone().into_iter()])
            .collect::<Result<_, _>>()
            .unwrap();
        assert_eq!(got, same);

        let bad: Vec<Result<i32, _>> =
            merge_chunks(vec![vec![1, 5, 2].into_iter(), vec![3].into_iter()]).collect();
        assert!(matches!(bad.last(), Some(Err(StoreError::MergeUnsorted { input: 0, row: 3 }))));
    }

    #[test]
    fn merge_list_files_dedups() {
        let dir = tempfile::tempdir().unwrap();
        let a = list(2, 3, ListKind::Well, 0, &[&[1, 8]]);
        let b = list(2, 3, ListKind::Well, 0, &[&[1, 8], &[3, 6], &[4, 5]]);
        let (sa, sb) = (dir.path().join("a"), dir.path().join("b"));
        write_list(&a, &sa, 10).unwrap();
        write_list(&b, &sb, 10).unwrap();
        let merged = merge_list_files(&[sa, sb], &dir.path().join("ab"), 10).unwrap();
        assert_eq!(merged, b);
        assert_eq!(read_list(&dir.path().join("ab")).unwrap(), b);
    }

    #[test]
    fn list_dir_naming() {
        let d = ListDir::new("/tmp/lists");
        assert_eq!(
            d.stem(7, 19, ListKind::Deficient, 46),
            PathBuf::from("/tmp/lists/n7-m19-deficient-l46")
        );
    }
}
