//! `msr` — encode, decode, repair, and verify files with an MDS array
//! code that repairs a single lost chunk from k+1 helpers at half the
//! naive download.

mod storage;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{ensure, Context, Result};
use clap::{Args, Parser, Subcommand};

use msr_core::codec::{decode_erasures, encode, Codeword, ErasureSolver};
use msr_core::construct::build_parity_blocks;
use msr_core::repair::{plan_repair, prepare_repair, repair_node};
use msr_core::verify::{sweep_mds, sweep_repair};
use msr_core::{CodeParams, Field};

use storage::{
    chunk_name, default_file_prime, ChunkFile, Manifest, MANIFEST_NAME, MANIFEST_VERSION,
};

#[derive(Parser)]
#[command(name = "msr", version, about = "MDS array code with bandwidth-optimal repair")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InstanceArgs {
    /// Total number of nodes (multiple of 3).
    #[arg(long)]
    n: usize,
    /// Number of data nodes (1 <= k <= n-2).
    #[arg(long)]
    k: usize,
    /// Field modulus; defaults to the smallest prime >= max(2n+1, 257).
    #[arg(long)]
    p: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the deterministic parameters of an instance.
    Params(InstanceArgs),
    /// Encode a file into n chunk files plus a manifest.
    Encode {
        /// Input file.
        input: PathBuf,
        #[command(flatten)]
        instance: InstanceArgs,
        /// Output directory for the manifest and chunks.
        #[arg(long)]
        out: PathBuf,
    },
    /// Rebuild the original file from any k or more chunks.
    Decode {
        /// Path to the manifest file.
        #[arg(long)]
        manifest: PathBuf,
        /// Output file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Regenerate one lost chunk from k+1 helper chunks.
    Repair {
        /// Path to the manifest file.
        #[arg(long)]
        manifest: PathBuf,
        /// Index of the failed node.
        #[arg(long)]
        failed: usize,
        /// Comma-separated helper node indices (exactly k+1).
        #[arg(long, value_delimiter = ',')]
        helpers: Vec<usize>,
    },
    /// Exhaustively check erasure decoding and repair.
    Verify(InstanceArgs),
    /// Time encode/decode/repair and report the bandwidth ratio.
    Bench {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Number of timed rounds.
        #[arg(long, default_value_t = 10)]
        trials: usize,
    },
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Params(args) => cmd_params(&args),
        Command::Encode { input, instance, out } => cmd_encode(&input, &instance, &out),
        Command::Decode { manifest, out } => cmd_decode(&manifest, &out),
        Command::Repair {
            manifest,
            failed,
            helpers,
        } => cmd_repair(&manifest, failed, &helpers),
        Command::Verify(args) => cmd_verify(&args),
        Command::Bench { instance, trials } => cmd_bench(&instance, trials),
    }
}

fn build_instance(args: &InstanceArgs) -> Result<CodeParams> {
    let p = args.p.unwrap_or_else(|| default_file_prime(args.n));
    let field = Field::new(p)?;
    Ok(CodeParams::new(args.n, args.k, field)?)
}

fn cmd_params(args: &InstanceArgs) -> Result<()> {
    let params = build_instance(args)?;
    println!(
        "n={} k={} p={} ell={} r={} d={}",
        params.n,
        params.k,
        params.field.modulus(),
        params.ell,
        params.r,
        params.d
    );
    let lambdas: Vec<String> = params.lambdas.iter().map(|l| l.to_string()).collect();
    println!("lambdas {}", lambdas.join(","));
    Ok(())
}

fn cmd_encode(input: &Path, args: &InstanceArgs, out: &Path) -> Result<()> {
    let params = build_instance(args)?;
    ensure!(
        params.field.modulus() >= 257,
        "file mode needs p >= 257 so every byte is a distinct symbol (got p = {})",
        params.field.modulus()
    );
    let blocks = build_parity_blocks(&params);
    let bytes = fs::read(input).with_context(|| format!("reading {}", input.display()))?;
    let stripe_len = params.k * params.ell;
    let stripes = bytes.len().div_ceil(stripe_len);

    // the parity system is identical across stripes: invert it once
    let parity: BTreeSet<usize> = (params.k..params.n).collect();
    let solver = ErasureSolver::new(&params, &blocks, &parity)?;
    let mut node_symbols: Vec<Vec<u64>> = vec![Vec::with_capacity(stripes * params.ell); params.n];
    for stripe in 0..stripes {
        let base = stripe * stripe_len;
        let nodes: Vec<Vec<u64>> = (0..params.n)
            .map(|i| {
                (0..params.ell)
                    .map(|a| {
                        if i < params.k {
                            bytes
                                .get(base + i * params.ell + a)
                                .map_or(0u64, |&b| b as u64)
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        let cw = solver.solve(&params, &blocks, &Codeword { nodes })?;
        for (node, symbols) in cw.nodes.into_iter().enumerate() {
            node_symbols[node].extend(symbols);
        }
    }

    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let manifest = Manifest {
        version: MANIFEST_VERSION,
        n: params.n,
        k: params.k,
        p: params.field.modulus(),
        lambdas: params.lambdas.clone(),
        length: bytes.len() as u64,
        stripes: stripes as u64,
        chunks: (0..params.n).map(chunk_name).collect(),
    };
    for (node, symbols) in node_symbols.into_iter().enumerate() {
        let chunk = ChunkFile {
            p: params.field.modulus(),
            n: params.n as u16,
            k: params.k as u16,
            node: node as u16,
            ell: params.ell as u32,
            stripes: stripes as u32,
            symbols,
        };
        fs::write(out.join(&manifest.chunks[node]), chunk.to_bytes())?;
    }
    fs::write(out.join(MANIFEST_NAME), manifest.render())?;
    println!(
        "encoded {} bytes into {} chunks of {} stripes",
        bytes.len(),
        params.n,
        stripes
    );
    Ok(())
}

fn load_manifest_instance(manifest_path: &Path) -> Result<(Manifest, CodeParams, PathBuf)> {
    let manifest = Manifest::load(manifest_path)?;
    let params = manifest.params()?;
    let dir = manifest_path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    Ok((manifest, params, dir))
}

fn cmd_decode(manifest_path: &Path, out: &Path) -> Result<()> {
    let (manifest, params, dir) = load_manifest_instance(manifest_path)?;
    let blocks = build_parity_blocks(&params);

    let mut chunks: Vec<Option<ChunkFile>> = Vec::with_capacity(params.n);
    for (node, name) in manifest.chunks.iter().enumerate() {
        let path = dir.join(name);
        if path.exists() {
            let chunk = ChunkFile::load(&path)?;
            chunk.check_against(&manifest, node)?;
            chunks.push(Some(chunk));
        } else {
            chunks.push(None);
        }
    }
    let erased: BTreeSet<usize> = (0..params.n).filter(|&i| chunks[i].is_none()).collect();
    ensure!(
        erased.len() <= params.r,
        "only {} of {} chunks present; need at least k = {}",
        params.n - erased.len(),
        params.n,
        params.k
    );

    let stripes = manifest.stripes as usize;
    let solver = ErasureSolver::new(&params, &blocks, &erased)?;
    let mut bytes = Vec::with_capacity(stripes * params.k * params.ell);
    for stripe in 0..stripes {
        let nodes: Vec<Vec<u64>> = chunks
            .iter()
            .map(|c| match c {
                Some(chunk) => {
                    chunk.symbols[stripe * params.ell..(stripe + 1) * params.ell].to_vec()
                }
                None => vec![0; params.ell],
            })
            .collect();
        let cw = solver.solve(&params, &blocks, &Codeword { nodes })?;
        for node in 0..params.k {
            for a in 0..params.ell {
                bytes.push(cw.nodes[node][a] as u8);
            }
        }
    }
    bytes.truncate(manifest.length as usize);
    fs::write(out, &bytes).with_context(|| format!("writing {}", out.display()))?;
    println!(
        "decoded {} bytes from {} chunks ({} missing)",
        bytes.len(),
        params.n - erased.len(),
        erased.len()
    );
    Ok(())
}

fn cmd_repair(manifest_path: &Path, failed: usize, helpers: &[usize]) -> Result<()> {
    let (manifest, params, dir) = load_manifest_instance(manifest_path)?;
    let blocks = build_parity_blocks(&params);
    let helper_set: BTreeSet<usize> = helpers.iter().copied().collect();
    ensure!(
        helper_set.len() == helpers.len(),
        "duplicate helper indices"
    );
    let plan = plan_repair(&params, failed)?;

    let mut helper_chunks = Vec::new();
    for &h in &helper_set {
        ensure!(h < params.n, "helper {h} out of range");
        let path = dir.join(&manifest.chunks[h]);
        let chunk = ChunkFile::load(&path)?;
        chunk.check_against(&manifest, h)?;
        helper_chunks.push(chunk);
    }

    let stripes = manifest.stripes as usize;
    let context = prepare_repair(&params, &blocks, failed, &helper_set)?;
    let mut recovered = Vec::with_capacity(stripes * params.ell);
    let mut downloaded = 0usize;
    for stripe in 0..stripes {
        let helper_data: Vec<Vec<u64>> = helper_chunks
            .iter()
            .map(|chunk| {
                plan.extract(
                    &params,
                    &chunk.symbols[stripe * params.ell..(stripe + 1) * params.ell],
                )
            })
            .collect();
        let transcript = context.run(&params, &helper_data)?;
        downloaded += transcript.symbols_downloaded;
        recovered.extend(transcript.recovered);
    }

    let chunk = ChunkFile {
        p: params.field.modulus(),
        n: params.n as u16,
        k: params.k as u16,
        node: failed as u16,
        ell: params.ell as u32,
        stripes: stripes as u32,
        symbols: recovered,
    };
    fs::write(dir.join(&manifest.chunks[failed]), chunk.to_bytes())?;

    let per_stripe = params.d * params.ell / 2;
    let cut_set = params.d * params.ell / (params.d - params.k + 1);
    println!(
        "repaired node {failed}: {downloaded} symbols downloaded ({per_stripe}/stripe), cut-set bound {cut_set}/stripe, optimal: {}",
        if per_stripe == cut_set { "yes" } else { "no" }
    );
    Ok(())
}

fn cmd_verify(args: &InstanceArgs) -> Result<()> {
    let params = build_instance(args)?;
    let mds = sweep_mds(&params)?;
    let rep = sweep_repair(&params)?;
    print!("{mds}{rep}");
    println!(
        "mds {}/{} pass, repair {}/{} pass",
        mds.passed(),
        mds.total(),
        rep.passed(),
        rep.total()
    );
    ensure!(mds.all_pass() && rep.all_pass(), "verification failed");
    Ok(())
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn cmd_bench(args: &InstanceArgs, trials: usize) -> Result<()> {
    ensure!(trials >= 1, "need at least one trial");
    let params = build_instance(args)?;
    let blocks = build_parity_blocks(&params);
    let data: Vec<Vec<u64>> = (0..params.k)
        .map(|i| {
            (0..params.ell)
                .map(|a| params.field.elem((i as u64 * 97 + a as u64 * 23 + 1) * 11))
                .collect()
        })
        .collect();

    let start = Instant::now();
    let mut cw = None;
    for _ in 0..trials {
        cw = Some(encode(&params, &blocks, &data)?);
    }
    let encode_time = start.elapsed() / trials as u32;
    let cw = cw.unwrap();

    let erased: BTreeSet<usize> = (0..params.r).collect();
    let mut damaged = cw.clone();
    for &e in &erased {
        damaged.nodes[e] = vec![0; params.ell];
    }
    let start = Instant::now();
    for _ in 0..trials {
        let out = decode_erasures(&params, &blocks, &damaged, &erased)?;
        ensure!(out == cw, "decode mismatch");
    }
    let decode_time = start.elapsed() / trials as u32;

    let failed = 0usize;
    let helpers: BTreeSet<usize> = (1..=params.d).collect();
    let plan = plan_repair(&params, failed)?;
    let start = Instant::now();
    let mut bandwidth = 0usize;
    for _ in 0..trials {
        let helper_data: Vec<Vec<u64>> = helpers
            .iter()
            .map(|&h| plan.extract(&params, &cw.nodes[h]))
            .collect();
        let t = repair_node(&params, &blocks, failed, &helpers, &helper_data)?;
        ensure!(t.recovered == cw.nodes[failed], "repair mismatch");
        bandwidth = t.symbols_downloaded;
    }
    let repair_time = start.elapsed() / trials as u32;

    let naive = params.k * params.ell;
    let g = gcd(params.k + 1, 2 * params.k);
    println!("encode {encode_time:?}/codeword, decode {decode_time:?}, repair {repair_time:?}");
    println!(
        "repair bandwidth {bandwidth} symbols vs naive {naive}: ratio {}/{} = (k+1)/(2k) = {:.3}",
        (params.k + 1) / g,
        2 * params.k / g,
        (params.k + 1) as f64 / (2 * params.k) as f64
    );
    Ok(())
}
