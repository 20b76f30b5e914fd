//! Command-line surface.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rankconv_core::brd::{brd_decode_arbitrary_rate, corrupt, BrdOutput, ReceivedBlock};
use rankconv_core::gabidulin::ErasureSideInfo;
use rankconv_core::network::{lift_sequence, operator_channel, receive, ChannelConfig, Lifting};
use rankconv_core::pum::PumCode;
use rankconv_core::{ExtElem, ExtField};

use crate::config::SimulationConfig;
use crate::error::{CliError, Result};
use crate::format::{
    is_shot_file, parse_shots, parse_side, render_shots, render_side, CodeDescriptor, VectorFile, VectorKind,
};
use crate::simulate::{check_implication, draw_trial, render_csv, simulate, Received};
use crate::table3;

#[derive(Debug, Parser)]
#[command(name = "rankconv", version, about = "Rank-metric (partial) unit memory codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a code descriptor with its distance profile.
    Construct(ConstructArgs),
    /// Encode an info file (or random info) into a terminated code sequence.
    Encode(EncodeArgs),
    /// Pass a code sequence through the direct or the packet-level channel.
    Channel(ChannelArgs),
    /// Decode received blocks or a shot capture back to the info sequence.
    Decode(DecodeArgs),
    /// Run a Monte Carlo campaign and print CSV.
    Simulate(SimulateArgs),
    /// Reproduce the worked seven-shot example.
    Table3(Table3Args),
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    /// Take field and code parameters from a config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub k1: Option<usize>,
    #[arg(long)]
    pub phi: Option<usize>,
    /// Number of information blocks `N`.
    #[arg(long)]
    pub blocks: Option<usize>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long)]
    pub code: PathBuf,
    /// Info file; without it `N` random blocks are drawn from `--seed`.
    #[arg(long)]
    pub info: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Where to write the random info blocks.
    #[arg(long)]
    pub info_out: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Direct,
    Packet,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    #[arg(long)]
    pub code: PathBuf,
    /// Code sequence file.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = LevelArg::Direct)]
    pub level: LevelArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Direct level: `t/rho/gamma` per block, separated by `;`.
    #[arg(long)]
    pub shape: Option<String>,
    /// Packet level: dropped packets per shot.
    #[arg(long, default_value_t = 0)]
    pub erased: usize,
    /// Packet level: injected error packets per shot.
    #[arg(long, default_value_t = 0)]
    pub errors: usize,
    /// Packet level: affine lifting and affine network combinations.
    #[arg(long)]
    pub affine: bool,
    /// Direct level: where to write the erasure side information.
    #[arg(long)]
    pub side_out: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[arg(long)]
    pub code: PathBuf,
    /// Received vector file or shot capture.
    #[arg(long)]
    pub input: PathBuf,
    /// Side information for a received vector file.
    #[arg(long)]
    pub side: Option<PathBuf>,
    /// Print one line per block decoder call to stderr.
    #[arg(long)]
    pub trace: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Also decode every shot with the block-code baseline.
    #[arg(long)]
    pub baseline: bool,
    /// Use affine lifting (packet level only).
    #[arg(long)]
    pub affine: bool,
    /// Write the channel output of this trial instead of running the campaign.
    #[arg(long, requires = "capture")]
    pub replay: Option<usize>,
    /// Path prefix for `--replay`: `<p>` gets the channel output, `<p>.side`
    /// the side information (direct level) and `<p>.info` the sent info.
    #[arg(long)]
    pub capture: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Table3Args {
    /// Print the decoder calls after the table.
    #[arg(long)]
    pub trace: bool,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn load_code(path: &Path) -> Result<(ExtField, PumCode, CodeDescriptor)> {
    let name = path.display().to_string();
    let (f, d) = CodeDescriptor::parse(&name, &read(path)?)?;
    let code = d.build(&f).map_err(|e| CliError::Config(format!("{name}: {e}")))?;
    Ok((f, code, d))
}

fn same_field(a: &ExtField, b: &ExtField, what: &Path) -> Result<()> {
    if a.params() != b.params() {
        return Err(CliError::Config(format!(
            "{} uses a different field than the code",
            what.display()
        )));
    }
    Ok(())
}

fn parse_shape(text: &str, blocks: usize) -> Result<Vec<(usize, usize, usize)>> {
    let shape: Vec<(usize, usize, usize)> = text
        .split(';')
        .map(|s| {
            let v: Vec<usize> = s
                .trim()
                .split('/')
                .map(|x| x.parse().map_err(|_| CliError::Config(format!("bad shape entry {s:?}"))))
                .collect::<Result<_>>()?;
            match v[..] {
                [t, r, g] => Ok((t, r, g)),
                _ => Err(CliError::Config(format!("shape entry {s:?} is not t/rho/gamma"))),
            }
        })
        .collect::<Result<_>>()?;
    if shape.len() != blocks {
        return Err(CliError::Config(format!(
            "shape has {} entries for {blocks} blocks",
            shape.len()
        )));
    }
    Ok(shape)
}

fn info_file(code: &PumCode, rows: Vec<Vec<ExtElem>>) -> VectorFile {
    VectorFile {
        kind: VectorKind::Info,
        n: code.n(),
        k: code.k(),
        rows,
    }
}

fn construct(a: ConstructArgs) -> Result<()> {
    let mut cfg = match &a.config {
        Some(p) => SimulationConfig::parse(&p.display().to_string(), &read(p)?)?,
        None => SimulationConfig::default(),
    };
    cfg.q = a.q.unwrap_or(cfg.q);
    cfg.m = a.m.unwrap_or(cfg.m);
    cfg.n = a.n.unwrap_or(cfg.n);
    cfg.k = a.k.unwrap_or(cfg.k);
    cfg.k1 = a.k1.unwrap_or(cfg.k1);
    cfg.phi = a.phi.unwrap_or(cfg.phi);
    cfg.blocks = a.blocks.unwrap_or(cfg.blocks);
    let f = cfg.field()?;
    let code = cfg.code(&f)?;
    let p = code.profile();
    let mut text = CodeDescriptor::of(&code, cfg.blocks).render(&f);
    let d01 = p.d01.map_or("inf".to_string(), |d| d.to_string());
    text.push_str(&format!(
        "# d0={} d1={} d01={d01} d_sigma={} d10={} ell={} slope={} d_free={}\n",
        p.d0, p.d1, p.d_sigma, p.d10, p.ell, p.slope, p.d_free
    ));
    emit(a.output.as_deref(), &text)
}

fn encode(a: EncodeArgs) -> Result<()> {
    let (f, code, d) = load_code(&a.code)?;
    let info = match &a.info {
        Some(p) => {
            let (g, file) = VectorFile::parse(&p.display().to_string(), &read(p)?)?;
            same_field(&f, &g, p)?;
            if file.kind != VectorKind::Info || file.k != code.k() {
                return Err(CliError::Config(format!(
                    "{} is not an info file for k = {}",
                    p.display(),
                    code.k()
                )));
            }
            file.rows
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            let rows: Vec<_> = (0..d.blocks).map(|_| f.random_vec(code.k(), &mut rng)).collect();
            if let Some(p) = &a.info_out {
                fs::write(p, info_file(&code, rows.clone()).render(&f))?;
            }
            rows
        }
    };
    let sent = code.encode(&f, &info)?;
    let file = VectorFile {
        kind: VectorKind::Code,
        n: code.n(),
        k: code.k(),
        rows: sent,
    };
    emit(a.output.as_deref(), &file.render(&f))
}

fn load_blocks(f: &ExtField, code: &PumCode, path: &Path) -> Result<Vec<Vec<ExtElem>>> {
    let (g, file) = VectorFile::parse(&path.display().to_string(), &read(path)?)?;
    same_field(f, &g, path)?;
    if file.kind == VectorKind::Info || file.n != code.n() {
        return Err(CliError::Config(format!(
            "{} does not hold length-{} blocks",
            path.display(),
            code.n()
        )));
    }
    Ok(file.rows)
}

fn channel(a: ChannelArgs) -> Result<()> {
    let (f, code, _) = load_code(&a.code)?;
    let sent = load_blocks(&f, &code, &a.input)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    match a.level {
        LevelArg::Direct => {
            if a.affine {
                return Err(CliError::Config("--affine needs --level packet".into()));
            }
            let shape = match &a.shape {
                Some(s) => parse_shape(s, sent.len())?,
                None => vec![(0, 0, 0); sent.len()],
            };
            let rx = corrupt(&f, &sent, &shape, &mut rng).map_err(|e| CliError::Config(e.to_string()))?;
            let erasures = rx.iter().any(|b| b.erasures() > 0);
            match &a.side_out {
                Some(p) => {
                    let side: Vec<ErasureSideInfo> = rx.iter().map(|b| b.side.clone()).collect();
                    fs::write(p, render_side(&f, code.n(), &side))?;
                }
                None if erasures => {
                    return Err(CliError::Config("erasures need --side-out".into()));
                }
                None => {}
            }
            let file = VectorFile {
                kind: VectorKind::Received,
                n: code.n(),
                k: code.k(),
                rows: rx.into_iter().map(|b| b.r).collect(),
            };
            emit(a.output.as_deref(), &file.render(&f))
        }
        LevelArg::Packet => {
            let lifting = if a.affine {
                Lifting::Affine
            } else {
                Lifting::Linear
            };
            let cfg = ChannelConfig {
                erased_packets: a.erased,
                error_packets: a.errors,
                affine: a.affine,
            };
            let shots = lift_sequence(&f, &sent, lifting)
                .iter()
                .map(|x| operator_channel(f.base(), x, cfg, &mut rng).map(|s| s.0))
                .collect::<rankconv_core::error::Result<Vec<_>>>()
                .map_err(|e| CliError::Config(e.to_string()))?;
            emit(a.output.as_deref(), &render_shots(&f, &shots))
        }
    }
}

fn decode(a: DecodeArgs) -> Result<()> {
    let (f, code, _) = load_code(&a.code)?;
    let text = read(&a.input)?;
    let name = a.input.display().to_string();
    let blocks: Vec<ReceivedBlock> = if is_shot_file(&text) {
        let (g, shots) = parse_shots(&name, &text)?;
        same_field(&f, &g, &a.input)?;
        if shots.first().is_some_and(|s| s.n() != code.n()) {
            return Err(CliError::Config(format!("{name}: shots are not of length {}", code.n())));
        }
        receive(&f, &shots).map_err(|e| CliError::Config(e.to_string()))?.0
    } else {
        let rows = load_blocks(&f, &code, &a.input)?;
        let side = match &a.side {
            Some(p) => {
                let (g, side) = parse_side(&p.display().to_string(), &read(p)?)?;
                same_field(&f, &g, p)?;
                if side.len() != rows.len() {
                    return Err(CliError::Config(format!(
                        "{} has side information for {} blocks, {name} has {}",
                        p.display(),
                        side.len(),
                        rows.len()
                    )));
                }
                side
            }
            None => vec![ErasureSideInfo::none(f.m(), code.n()); rows.len()],
        };
        rows.into_iter()
            .zip(side)
            .map(|(r, s)| ReceivedBlock::new(r, s))
            .collect::<rankconv_core::error::Result<_>>()
            .map_err(|e| CliError::Config(e.to_string()))?
    };
    if blocks.is_empty() {
        return Err(CliError::Config(format!("{name} holds no blocks")));
    }
    let out: BrdOutput = brd_decode_arbitrary_rate(&f, &code, &blocks).map_err(|e| CliError::Decode(e.to_string()))?;
    if a.trace {
        let mut err = io::stderr();
        for e in &out.report.trace {
            writeln!(err, "{e}")?;
        }
    }
    let info = out.info().ok_or_else(|| {
        let failed: Vec<usize> = (0..out.code_sequence.len())
            .filter(|&i| out.code_sequence[i].is_none())
            .collect();
        CliError::Decode(format!("blocks {failed:?} could not be recovered"))
    })?;
    emit(a.output.as_deref(), &info_file(&code, info).render(&f))
}

fn run_simulate(a: SimulateArgs) -> Result<()> {
    let mut cfg = SimulationConfig::parse(&a.config.display().to_string(), &read(&a.config)?)?;
    cfg.seed = a.seed.unwrap_or(cfg.seed);
    cfg.trials = a.trials.unwrap_or(cfg.trials);
    cfg.baseline |= a.baseline;
    cfg.affine |= a.affine;
    let (f, code) = cfg.validate()?;
    if let (Some(trial), Some(prefix)) = (a.replay, &a.capture) {
        let (draw, _) = draw_trial(&cfg, &f, &code, trial)?;
        let with_ext = |ext: &str| {
            let mut p = prefix.clone().into_os_string();
            p.push(ext);
            PathBuf::from(p)
        };
        fs::write(with_ext(".info"), info_file(&code, draw.info).render(&f))?;
        match draw.received {
            Received::Packet(shots) => fs::write(prefix, render_shots(&f, &shots))?,
            Received::Direct(blocks) => {
                let side: Vec<_> = blocks.iter().map(|b| b.side.clone()).collect();
                fs::write(with_ext(".side"), render_side(&f, code.n(), &side))?;
                let file = VectorFile {
                    kind: VectorKind::Received,
                    n: code.n(),
                    k: code.k(),
                    rows: blocks.into_iter().map(|b| b.r).collect(),
                };
                fs::write(prefix, file.render(&f))?;
            }
        }
        return Ok(());
    }
    let records = simulate(&cfg)?;
    emit(a.output.as_deref(), &render_csv(&cfg, &records))?;
    check_implication(&records)
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Construct(a) => construct(a),
        Command::Encode(a) => encode(a),
        Command::Channel(a) => channel(a),
        Command::Decode(a) => decode(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Table3(a) => {
            let t = table3::run()?;
            emit(None, &t.render(a.trace))
        }
    }
}
