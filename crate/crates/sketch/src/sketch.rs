//! Membership sketch over fixed-width character grams.
//!
//! Two stores share one interface: a k-hash bit-array filter (one-sided error)
//! and an exact set of 128-bit gram hashes for desk-scale corpora. Grams are
//! hashed with XXH3-128 over their UTF-8 bytes; the filter derives its k probe
//! positions by double hashing from the two 64-bit halves.
//!
//! File layout (all integers little-endian):
//!
//! ```text
//! "NGSK" | version u16 | gram_width u16 | hash_count u8 | bit_count u64
//!        | params_digest [16] | inserted_grams u64 | payload | crc32 u32
//! ```
//!
//! The payload is the raw bit array (bit `i` is bit `i % 8` of byte `i / 8`)
//! in filter mode. Exact mode is marked by `hash_count == 0`; its payload is
//! the sorted gram hashes as u128 values and `bit_count` is 128 × their
//! number. The CRC covers every preceding byte.

use std::collections::HashSet;
use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use memmap2::Mmap;
use thiserror::Error;
use xxhash_rust::xxh3::xxh3_128;

use crate::normalize::normalize;

pub const MAGIC: &[u8; 4] = b"NGSK";
pub const FORMAT_VERSION: u16 = 1;
pub const DEFAULT_GRAM_WIDTH: usize = 50;
pub const MAX_HASH_COUNT: u8 = 32;
const HEADER_LEN: usize = 4 + 2 + 2 + 1 + 8 + 16 + 8;
const MIN_BITS: u64 = 64;

#[derive(Debug, Error)]
pub enum SketchError {
    #[error("gram has {got} characters but the sketch uses width {expected}")]
    Length { expected: usize, got: usize },
    #[error("sketch parameters differ (gram width, hash family or size)")]
    ParamMismatch,
    #[error("unsupported sketch format version {found} (expected {FORMAT_VERSION})")]
    VersionMismatch { found: u16 },
    #[error("not a valid sketch file: {0}")]
    Format(String),
    #[error("sketch checksum mismatch: stored {stored:08x}, computed {computed:08x}")]
    Checksum { stored: u32, computed: u32 },
    #[error("invalid sketch parameters: {0}")]
    Params(String),
    #[error("manifest error: {0}")]
    Manifest(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = SketchError> = std::result::Result<T, E>;

/// How `build` chooses the store.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Exact when the target false-positive rate is below
    /// [`EXACT_FP_THRESHOLD`] and the corpus is at most [`EXACT_MAX_CHARS`].
    #[default]
    Auto,
    Filter,
    Exact,
}

pub const EXACT_FP_THRESHOLD: f64 = 1e-9;
pub const EXACT_MAX_CHARS: u64 = 64 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SketchParams {
    pub gram_width: usize,
    /// 0 in exact mode.
    pub hash_count: u8,
    /// Size of the bit array in filter mode.
    pub bit_count: u64,
}

impl SketchParams {
    /// Sizes a filter for `expected` grams at false-positive rate `target_fp`.
    pub fn for_capacity(gram_width: usize, expected: u64, target_fp: f64) -> Result<Self> {
        if !(target_fp > 0.0 && target_fp < 0.5) {
            return Err(SketchError::Params(format!("target fp {target_fp} not in (0, 0.5)")));
        }
        check_width(gram_width)?;
        let n = expected.max(1) as f64;
        let ln2 = std::f64::consts::LN_2;
        let needed = (-n * target_fp.ln() / (ln2 * ln2)).ceil();
        if needed > (1u64 << 62) as f64 {
            return Err(SketchError::Params("corpus too large for the target rate".into()));
        }
        let bit_count = (needed as u64).max(MIN_BITS).next_power_of_two();
        let ideal = bit_count as f64 / n * ln2;
        let hash_count = [ideal.floor(), ideal.ceil()]
            .into_iter()
            .map(|k| k.clamp(1.0, f64::from(MAX_HASH_COUNT)) as u8)
            .min_by(|a, b| {
                estimated_fp(*a, bit_count, expected)
                    .total_cmp(&estimated_fp(*b, bit_count, expected))
            })
            .unwrap_or(1);
        Ok(SketchParams {
            gram_width,
            hash_count,
            bit_count,
        })
    }

    pub fn exact(gram_width: usize) -> Self {
        SketchParams {
            gram_width,
            hash_count: 0,
            bit_count: 0,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.hash_count == 0
    }

    /// Checksum binding the gram width, hash family and filter geometry.
    pub fn digest(&self) -> [u8; 16] {
        let label = if self.is_exact() {
            format!("ngsk/xxh3-128/exact/w={}", self.gram_width)
        } else {
            format!(
                "ngsk/xxh3-128/double-hash/w={}/k={}/m={}",
                self.gram_width, self.hash_count, self.bit_count
            )
        };
        xxh3_128(label.as_bytes()).to_le_bytes()
    }
}

fn check_width(gram_width: usize) -> Result<()> {
    if gram_width == 0 || gram_width > usize::from(u16::MAX) {
        return Err(SketchError::Params(format!("gram width {gram_width} out of range")));
    }
    Ok(())
}

/// `(1 − e^(−k·n/m))^k`.
pub fn estimated_fp(hash_count: u8, bit_count: u64, inserted: u64) -> f64 {
    if inserted == 0 {
        return 0.0;
    }
    let k = f64::from(hash_count);
    (1.0 - (-k * inserted as f64 / bit_count as f64).exp()).powf(k)
}

enum Bits {
    Owned(Vec<u8>),
    Mapped { map: Mmap, offset: usize, len: usize },
}

impl Bits {
    fn bytes(&self) -> &[u8] {
        match self {
            Bits::Owned(v) => v,
            Bits::Mapped { map, offset, len } => &map[*offset..*offset + *len],
        }
    }

    fn make_mut(&mut self) -> &mut Vec<u8> {
        if let Bits::Mapped { .. } = self {
            *self = Bits::Owned(self.bytes().to_vec());
        }
        match self {
            Bits::Owned(v) => v,
            Bits::Mapped { .. } => unreachable!(),
        }
    }
}

enum Store {
    Filter(Bits),
    Exact(HashSet<u128>),
}

pub struct NgramSketch {
    params: SketchParams,
    inserted: u64,
    store: Store,
}

impl std::fmt::Debug for NgramSketch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NgramSketch")
            .field("params", &self.params)
            .field("inserted", &self.inserted)
            .field("mapped", &matches!(self.store, Store::Filter(Bits::Mapped { .. })))
            .finish()
    }
}

impl PartialEq for NgramSketch {
    /// Bit identity: same parameters, counts and stored bits or hashes.
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
            && self.inserted == other.inserted
            && match (&self.store, &other.store) {
                (Store::Filter(a), Store::Filter(b)) => a.bytes() == b.bytes(),
                (Store::Exact(a), Store::Exact(b)) => a == b,
                _ => false,
            }
    }
}

#[inline]
fn gram_hash(gram: &str) -> u128 {
    xxh3_128(gram.as_bytes())
}

impl NgramSketch {
    pub fn new(params: SketchParams) -> Result<Self> {
        check_width(params.gram_width)?;
        let store = if params.is_exact() {
            Store::Exact(HashSet::new())
        } else {
            if !params.bit_count.is_power_of_two() || params.bit_count < MIN_BITS {
                return Err(SketchError::Params(format!(
                    "bit count {} must be a power of two ≥ {MIN_BITS}",
                    params.bit_count
                )));
            }
            if params.hash_count > MAX_HASH_COUNT {
                return Err(SketchError::Params(format!("hash count {} too large", params.hash_count)));
            }
            let bytes = usize::try_from(params.bit_count / 8)
                .map_err(|_| SketchError::Params("bit array too large".into()))?;
            Store::Filter(Bits::Owned(vec![0; bytes]))
        };
        Ok(NgramSketch {
            params,
            inserted: 0,
            store,
        })
    }

    pub fn exact(gram_width: usize) -> Result<Self> {
        Self::new(SketchParams::exact(gram_width))
    }

    /// An empty sketch with the same parameters.
    pub fn empty_like(&self) -> Self {
        Self::new(self.params).expect("parameters were already validated")
    }

    pub fn params(&self) -> SketchParams {
        self.params
    }

    pub fn gram_width(&self) -> usize {
        self.params.gram_width
    }

    pub fn hash_count(&self) -> u8 {
        self.params.hash_count
    }

    pub fn bit_count(&self) -> u64 {
        match &self.store {
            Store::Filter(_) => self.params.bit_count,
            Store::Exact(set) => set.len() as u64 * 128,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.params.is_exact()
    }

    pub fn is_mapped(&self) -> bool {
        matches!(self.store, Store::Filter(Bits::Mapped { .. }))
    }

    /// Number of gram insertions (duplicates included).
    pub fn inserted_grams(&self) -> u64 {
        self.inserted
    }

    pub fn params_digest(&self) -> [u8; 16] {
        self.params.digest()
    }

    pub fn digest_hex(&self) -> String {
        self.params_digest().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Estimated false-positive rate at the current fill (0 in exact mode).
    pub fn estimated_fp(&self) -> f64 {
        match self.store {
            Store::Exact(_) => 0.0,
            Store::Filter(_) => estimated_fp(self.params.hash_count, self.params.bit_count, self.inserted),
        }
    }

    fn probes(&self, hash: u128) -> impl Iterator<Item = u64> {
        let h1 = hash as u64;
        let h2 = (hash >> 64) as u64 | 1;
        let mask = self.params.bit_count - 1;
        (0..u64::from(self.params.hash_count)).map(move |i| h1.wrapping_add(i.wrapping_mul(h2)) & mask)
    }

    fn insert_hash(&mut self, hash: u128) {
        self.inserted += 1;
        let probes: Vec<u64> = match &self.store {
            Store::Filter(_) => self.probes(hash).collect(),
            Store::Exact(_) => Vec::new(),
        };
        match &mut self.store {
            Store::Exact(set) => {
                set.insert(hash);
            }
            Store::Filter(bits) => {
                let bytes = bits.make_mut();
                for p in probes {
                    bytes[(p / 8) as usize] |= 1 << (p % 8);
                }
            }
        }
    }

    fn contains_hash(&self, hash: u128) -> bool {
        match &self.store {
            Store::Exact(set) => set.contains(&hash),
            Store::Filter(bits) => {
                let bytes = bits.bytes();
                self.probes(hash)
                    .all(|p| bytes[(p / 8) as usize] & (1 << (p % 8)) != 0)
            }
        }
    }

    /// Inserts one gram, which must have exactly `gram_width` characters.
    pub fn insert(&mut self, gram: &str) -> Result<()> {
        self.check_gram(gram)?;
        self.insert_hash(gram_hash(gram));
        Ok(())
    }

    /// Normalizes `text` and inserts every width-W window (stride 1).
    /// Returns the number of grams inserted.
    pub fn insert_text(&mut self, text: &str) -> u64 {
        let normalized = normalize(text);
        let width = self.params.gram_width;
        let mut count = 0;
        for gram in normalized.windows(width) {
            self.insert_hash(gram_hash(gram));
            count += 1;
        }
        count
    }

    pub fn contains(&self, gram: &str) -> Result<bool> {
        self.check_gram(gram)?;
        Ok(self.contains_hash(gram_hash(gram)))
    }

    /// Membership of a gram already known to have the right width.
    pub(crate) fn contains_window(&self, gram: &str) -> bool {
        self.contains_hash(gram_hash(gram))
    }

    fn check_gram(&self, gram: &str) -> Result<()> {
        let got = gram.chars().count();
        if got != self.params.gram_width {
            return Err(SketchError::Length {
                expected: self.params.gram_width,
                got,
            });
        }
        Ok(())
    }

    /// Union of two sketches built with identical parameters.
    pub fn merge(&self, other: &NgramSketch) -> Result<NgramSketch> {
        let mut out = self.empty_like();
        out.merge_from(self)?;
        out.merge_from(other)?;
        Ok(out)
    }

    /// In-place union.
    pub fn merge_from(&mut self, other: &NgramSketch) -> Result<()> {
        if self.params != other.params {
            return Err(SketchError::ParamMismatch);
        }
        self.inserted += other.inserted;
        match (&mut self.store, &other.store) {
            (Store::Exact(a), Store::Exact(b)) => a.extend(b.iter().copied()),
            (Store::Filter(a), Store::Filter(b)) => {
                for (x, y) in a.make_mut().iter_mut().zip(b.bytes()) {
                    *x |= y;
                }
            }
            _ => return Err(SketchError::ParamMismatch),
        }
        Ok(())
    }

    /// Serializes to the `NGSK` format.
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        let mut crc = crc32fast::Hasher::new();
        let mut emit = |bytes: &[u8], w: &mut dyn Write| -> io::Result<()> {
            crc.update(bytes);
            w.write_all(bytes)
        };
        emit(MAGIC, &mut w)?;
        emit(&FORMAT_VERSION.to_le_bytes(), &mut w)?;
        emit(&(self.params.gram_width as u16).to_le_bytes(), &mut w)?;
        emit(&[self.params.hash_count], &mut w)?;
        emit(&self.bit_count().to_le_bytes(), &mut w)?;
        emit(&self.params_digest(), &mut w)?;
        emit(&self.inserted.to_le_bytes(), &mut w)?;
        match &self.store {
            Store::Filter(bits) => {
                for chunk in bits.bytes().chunks(1 << 20) {
                    emit(chunk, &mut w)?;
                }
            }
            Store::Exact(set) => {
                let mut hashes: Vec<u128> = set.iter().copied().collect();
                hashes.sort_unstable();
                for h in hashes {
                    emit(&h.to_le_bytes(), &mut w)?;
                }
            }
        }
        let sum = crc.finalize();
        w.write_all(&sum.to_le_bytes())?;
        Ok(())
    }

    /// Parameters digest plus the CRC32 of the serialized file, identifying
    /// a sketch's contents without reading it back from disk.
    pub fn content_digest(&self) -> String {
        struct Crc(crc32fast::Hasher);
        impl Write for Crc {
            fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
                self.0.update(buf);
                Ok(buf.len())
            }
            fn flush(&mut self) -> io::Result<()> {
                Ok(())
            }
        }
        let mut crc = Crc(crc32fast::Hasher::new());
        self.write_to(&mut crc).expect("hashing cannot fail");
        format!("{}-{:08x}", self.digest_hex(), crc.0.finalize())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out).expect("writing to memory cannot fail");
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = File::create(path)?;
        let mut w = io::BufWriter::new(file);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let header = Header::parse(bytes)?;
        let payload = &bytes[HEADER_LEN..HEADER_LEN + header.payload_len];
        let store = if header.params.is_exact() {
            Store::Exact(exact_hashes(payload))
        } else {
            Store::Filter(Bits::Owned(payload.to_vec()))
        };
        Ok(NgramSketch {
            params: header.params,
            inserted: header.inserted,
            store,
        })
    }

    /// Reads a whole sketch file into memory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }

    /// Opens a sketch file read-only through a memory map. Filter-mode bits
    /// are queried in place; nothing proportional to the file is copied.
    /// Exact-mode hashes are decoded into memory.
    pub fn load_mmap(path: impl AsRef<Path>) -> Result<Self> {
        let file = File::open(path)?;
        // SAFETY: the map is read-only and sketch files are not modified while
        // they are being queried (see the crate's concurrency notes).
        let map = unsafe { Mmap::map(&file)? };
        let header = Header::parse(&map)?;
        let store = if header.params.is_exact() {
            Store::Exact(exact_hashes(&map[HEADER_LEN..HEADER_LEN + header.payload_len]))
        } else {
            Store::Filter(Bits::Mapped {
                map,
                offset: HEADER_LEN,
                len: header.payload_len,
            })
        };
        Ok(NgramSketch {
            params: header.params,
            inserted: header.inserted,
            store,
        })
    }
}

fn exact_hashes(payload: &[u8]) -> HashSet<u128> {
    payload
        .chunks_exact(16)
        .map(|c| u128::from_le_bytes(c.try_into().unwrap()))
        .collect()
}

struct Header {
    params: SketchParams,
    inserted: u64,
    payload_len: usize,
}

fn truncated() -> SketchError {
    SketchError::Io(io::Error::new(io::ErrorKind::UnexpectedEof, "truncated sketch file"))
}

impl Header {
    /// Validates magic, version, size, digest and checksum.
    fn parse(bytes: &[u8]) -> Result<Header> {
        if bytes.len() < 6 {
            return Err(truncated());
        }
        if &bytes[..4] != MAGIC {
            return Err(SketchError::Format("bad magic".into()));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != FORMAT_VERSION {
            return Err(SketchError::VersionMismatch { found: version });
        }
        if bytes.len() < HEADER_LEN + 4 {
            return Err(truncated());
        }
        let gram_width = usize::from(u16::from_le_bytes([bytes[6], bytes[7]]));
        let hash_count = bytes[8];
        let bit_count = u64::from_le_bytes(bytes[9..17].try_into().unwrap());
        let digest: [u8; 16] = bytes[17..33].try_into().unwrap();
        let inserted = u64::from_le_bytes(bytes[33..41].try_into().unwrap());
        if bit_count % 8 != 0 {
            return Err(SketchError::Format(format!("bit count {bit_count} not a whole number of bytes")));
        }
        let payload_len = usize::try_from(bit_count / 8).map_err(|_| truncated())?;
        let expected_len = HEADER_LEN
            .checked_add(payload_len)
            .and_then(|n| n.checked_add(4))
            .ok_or_else(truncated)?;
        if bytes.len() < expected_len {
            return Err(truncated());
        }
        if bytes.len() > expected_len {
            return Err(SketchError::Format("trailing bytes after checksum".into()));
        }
        let stored = u32::from_le_bytes(bytes[expected_len - 4..].try_into().unwrap());
        let computed = crc32fast::hash(&bytes[..expected_len - 4]);
        if stored != computed {
            return Err(SketchError::Checksum { stored, computed });
        }
        let params = SketchParams {
            gram_width,
            hash_count,
            bit_count: if hash_count == 0 { 0 } else { bit_count },
        };
        if hash_count == 0 && bit_count % 128 != 0 {
            return Err(SketchError::Format("exact payload is not a list of 128-bit hashes".into()));
        }
        if params.digest() != digest {
            return Err(SketchError::Format("parameter digest does not match header".into()));
        }
        check_width(gram_width)?;
        if hash_count != 0 && (!bit_count.is_power_of_two() || bit_count < MIN_BITS) {
            return Err(SketchError::Format(format!("bit count {bit_count} is not a valid filter size")));
        }
        Ok(Header {
            params,
            inserted,
            payload_len,
        })
    }
}
