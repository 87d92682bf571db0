//! On-disk formats: the plain-text manifest and the binary chunk files.
//!
//! One byte of input is one field symbol, which requires p >= 257; the
//! default file-mode field is GF(257). Symbols are serialized as w-byte
//! little-endian values with w = ceil(bits(p) / 8).

use std::fs;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use msr_core::{field::smallest_prime_at_least, CodeParams, Field};

pub const MANIFEST_VERSION: u64 = 1;
pub const CHUNK_MAGIC: &[u8; 4] = b"MSRC";
pub const CHUNK_VERSION: u8 = 1;
pub const MANIFEST_NAME: &str = "manifest.txt";

/// The smallest prime usable for file encoding at a given n.
pub fn default_file_prime(n: usize) -> u64 {
    smallest_prime_at_least((2 * n as u64 + 1).max(257))
}

/// Bytes per serialized symbol.
pub fn symbol_width(p: u64) -> usize {
    (64 - p.leading_zeros() as usize).div_ceil(8)
}

/// Plain-text description of an encoded file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub version: u64,
    pub n: usize,
    pub k: usize,
    pub p: u64,
    pub lambdas: Vec<u64>,
    /// Original input length in bytes, before zero padding.
    pub length: u64,
    pub stripes: u64,
    pub chunks: Vec<String>,
}

impl Manifest {
    pub fn params(&self) -> Result<CodeParams> {
        let field = Field::new(self.p)?;
        Ok(CodeParams::with_lambdas(
            self.n,
            self.k,
            field,
            self.lambdas.clone(),
        )?)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("version {}\n", self.version));
        out.push_str(&format!("n {}\n", self.n));
        out.push_str(&format!("k {}\n", self.k));
        out.push_str(&format!("p {}\n", self.p));
        let lambdas: Vec<String> = self.lambdas.iter().map(|l| l.to_string()).collect();
        out.push_str(&format!("lambdas {}\n", lambdas.join(",")));
        out.push_str(&format!("length {}\n", self.length));
        out.push_str(&format!("stripes {}\n", self.stripes));
        for name in &self.chunks {
            out.push_str(&format!("chunk {name}\n"));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Manifest> {
        let mut version = None;
        let mut n = None;
        let mut k = None;
        let mut p = None;
        let mut lambdas = None;
        let mut length = None;
        let mut stripes = None;
        let mut chunks = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once(' ')
                .with_context(|| format!("manifest line {}: missing value", lineno + 1))?;
            match key {
                "version" => version = Some(value.parse()?),
                "n" => n = Some(value.parse()?),
                "k" => k = Some(value.parse()?),
                "p" => p = Some(value.parse()?),
                "lambdas" => {
                    lambdas = Some(
                        value
                            .split(',')
                            .map(|v| v.parse::<u64>().map_err(Into::into))
                            .collect::<Result<Vec<u64>>>()?,
                    )
                }
                "length" => length = Some(value.parse()?),
                "stripes" => stripes = Some(value.parse()?),
                "chunk" => chunks.push(value.to_string()),
                other => bail!("manifest line {}: unknown key {other:?}", lineno + 1),
            }
        }
        let manifest = Manifest {
            version: version.context("manifest: missing version")?,
            n: n.context("manifest: missing n")?,
            k: k.context("manifest: missing k")?,
            p: p.context("manifest: missing p")?,
            lambdas: lambdas.context("manifest: missing lambdas")?,
            length: length.context("manifest: missing length")?,
            stripes: stripes.context("manifest: missing stripes")?,
            chunks,
        };
        ensure!(
            manifest.version == MANIFEST_VERSION,
            "unsupported manifest version {}",
            manifest.version
        );
        ensure!(
            manifest.chunks.len() == manifest.n,
            "manifest lists {} chunks for n = {}",
            manifest.chunks.len(),
            manifest.n
        );
        let ell = 1u64 << (manifest.n as u64 / 3);
        ensure!(
            manifest.length <= manifest.stripes * manifest.k as u64 * ell,
            "recorded length exceeds stripe capacity"
        );
        Ok(manifest)
    }

    pub fn load(path: &Path) -> Result<Manifest> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading manifest {}", path.display()))?;
        Manifest::parse(&text)
    }
}

/// One node's share of an encoded file: a fixed header followed by
/// `stripes * ell` symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkFile {
    pub p: u64,
    pub n: u16,
    pub k: u16,
    pub node: u16,
    pub ell: u32,
    pub stripes: u32,
    pub symbols: Vec<u64>,
}

impl ChunkFile {
    pub fn to_bytes(&self) -> Vec<u8> {
        let w = symbol_width(self.p);
        let mut out = Vec::with_capacity(27 + self.symbols.len() * w);
        out.extend_from_slice(CHUNK_MAGIC);
        out.push(CHUNK_VERSION);
        out.extend_from_slice(&self.p.to_le_bytes());
        out.extend_from_slice(&self.n.to_le_bytes());
        out.extend_from_slice(&self.k.to_le_bytes());
        out.extend_from_slice(&self.node.to_le_bytes());
        out.extend_from_slice(&self.ell.to_le_bytes());
        out.extend_from_slice(&self.stripes.to_le_bytes());
        for &s in &self.symbols {
            out.extend_from_slice(&s.to_le_bytes()[..w]);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<ChunkFile> {
        ensure!(bytes.len() >= 27, "chunk file too short for its header");
        ensure!(&bytes[0..4] == CHUNK_MAGIC, "bad chunk magic");
        ensure!(bytes[4] == CHUNK_VERSION, "unsupported chunk version {}", bytes[4]);
        let p = u64::from_le_bytes(bytes[5..13].try_into().unwrap());
        let n = u16::from_le_bytes(bytes[13..15].try_into().unwrap());
        let k = u16::from_le_bytes(bytes[15..17].try_into().unwrap());
        let node = u16::from_le_bytes(bytes[17..19].try_into().unwrap());
        let ell = u32::from_le_bytes(bytes[19..23].try_into().unwrap());
        let stripes = u32::from_le_bytes(bytes[23..27].try_into().unwrap());
        let w = symbol_width(p);
        let body = &bytes[27..];
        let expected = ell as usize * stripes as usize * w;
        ensure!(
            body.len() == expected,
            "chunk body is {} bytes, expected {expected}",
            body.len()
        );
        let symbols: Vec<u64> = body
            .chunks_exact(w)
            .map(|chunk| {
                let mut buf = [0u8; 8];
                buf[..w].copy_from_slice(chunk);
                u64::from_le_bytes(buf)
            })
            .collect();
        ensure!(symbols.iter().all(|&s| s < p), "chunk symbol out of range");
        Ok(ChunkFile {
            p,
            n,
            k,
            node,
            ell,
            stripes,
            symbols,
        })
    }

    pub fn load(path: &Path) -> Result<ChunkFile> {
        let bytes =
            fs::read(path).with_context(|| format!("reading chunk {}", path.display()))?;
        ChunkFile::from_bytes(&bytes)
            .with_context(|| format!("parsing chunk {}", path.display()))
    }

    /// Rejects a chunk whose header disagrees with the manifest.
    pub fn check_against(&self, manifest: &Manifest, node: usize) -> Result<()> {
        ensure!(
            self.p == manifest.p
                && self.n as usize == manifest.n
                && self.k as usize == manifest.k,
            "chunk header (n={}, k={}, p={}) does not match manifest (n={}, k={}, p={})",
            self.n,
            self.k,
            self.p,
            manifest.n,
            manifest.k,
            manifest.p
        );
        ensure!(
            self.node as usize == node,
            "chunk claims node {}, manifest position is {node}",
            self.node
        );
        ensure!(
            self.stripes as u64 == manifest.stripes,
            "chunk has {} stripes, manifest records {}",
            self.stripes,
            manifest.stripes
        );
        Ok(())
    }
}

pub fn chunk_name(node: usize) -> String {
    format!("chunk_{node:03}.msrc")
}
