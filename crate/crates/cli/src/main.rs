use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use chaovid::analysis::{
    add_salt_pepper, analyze, crop_blocks, differential, AnalysisOptions, Block, Fill,
};
use chaovid::bench::{
    bench_bytegen, bench_phases, bench_video, bench_video_frames, sweep_rounds, write_bench_csv,
    write_sweep_csv, BenchConfig,
};
use chaovid::keying::{derive_worker_params, parse_key};
use chaovid::video_io::{
    read_ppm, store_plain_frame, write_ppm, ContainerHeader, ContainerReader, ContainerWriter,
    FrameSource, PlainFormat, DEFAULT_FPS,
};
use chaovid::{Frame, FrameCipher, Key, MapKind, RgbImage, Schedule};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(
    name = "chaovid",
    version,
    about = "Chaotic confusion-diffusion video frame encryption"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a new random key as hex.
    Keygen {
        #[arg(long, value_enum, default_value_t = MapArg::Plcm)]
        map: MapArg,
        /// Derive the key from this seed instead of the OS generator.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encrypt a PPM image, a directory of PPM frames or a raw RGB24 stream into a CVE1 container.
    Encrypt {
        #[command(flatten)]
        key: KeyArgs,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long, default_value_t = 5)]
        rounds: usize,
        #[arg(long)]
        fps: Option<u16>,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        out: PathBuf,
        /// Simulate the workers on one thread (same output).
        #[arg(long)]
        sequential: bool,
    },
    /// Decrypt a CVE1 container. Writes one PPM per frame into `--out` when it
    /// is a directory, otherwise a single stream.
    Decrypt {
        #[command(flatten)]
        key: KeyArgs,
        /// Must match the container header when given.
        #[arg(long)]
        threads: Option<usize>,
        /// Must match the container header when given.
        #[arg(long)]
        rounds: Option<usize>,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Ppm)]
        format: FormatArg,
        #[arg(long)]
        sequential: bool,
    },
    /// Statistical report of a PPM image.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        /// Second cipher image for NPCR/UACI.
        #[arg(long)]
        compare: Option<PathBuf>,
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the report as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Timing benchmarks; CSV on stdout or `--out`.
    Bench(BenchArgs),
    /// NPCR/UACI and scrambling correlation per round count; CSV output.
    Sweep {
        #[command(flatten)]
        key: OptionalKeyArgs,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 8)]
        threads: usize,
        #[arg(long, default_value_t = 10)]
        max_rounds: usize,
        /// Chooses the changed pixel.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Add salt-and-pepper noise to a PPM image.
    Noise {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        rate: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Blank square blocks of a PPM image.
    Crop {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// `x,y,side[,black|white]`; repeatable.
        #[arg(long = "block", required = true)]
        blocks: Vec<String>,
    },
    /// Dump raw worker keystream bytes for an external randomness test suite.
    NistExport {
        #[command(flatten)]
        key: KeyArgs,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long, default_value_t = 0)]
        worker: usize,
        #[arg(long)]
        bytes: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MapArg {
    Plcm,
    Lasm,
}

impl From<MapArg> for MapKind {
    fn from(m: MapArg) -> Self {
        match m {
            MapArg::Plcm => MapKind::Plcm,
            MapArg::Lasm => MapKind::Lasm,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Ppm,
    Raw,
}

impl From<FormatArg> for PlainFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Ppm => PlainFormat::Ppm,
            FormatArg::Raw => PlainFormat::Raw,
        }
    }
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct KeyArgs {
    /// Hex key as printed by `keygen`.
    #[arg(long)]
    key: Option<String>,
    #[arg(long)]
    key_file: Option<PathBuf>,
}

impl KeyArgs {
    fn load(&self) -> Result<Key> {
        match (&self.key, &self.key_file) {
            (Some(text), _) => Ok(parse_key(text)?),
            (None, Some(path)) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading key file {}", path.display()))?;
                Ok(parse_key(&text)?)
            }
            (None, None) => bail!("a key is required"),
        }
    }
}

#[derive(Args)]
struct OptionalKeyArgs {
    #[arg(long, conflicts_with = "key_file")]
    key: Option<String>,
    #[arg(long)]
    key_file: Option<PathBuf>,
    /// Map for the fixed benchmark key when no key is given.
    #[arg(long, value_enum, default_value_t = MapArg::Plcm)]
    map: MapArg,
}

impl OptionalKeyArgs {
    fn load(&self) -> Result<Key> {
        match (&self.key, &self.key_file) {
            (None, None) => Ok(chaovid::bench::bench_key(self.map.into())),
            (key, key_file) => KeyArgs {
                key: key.clone(),
                key_file: key_file.clone(),
            }
            .load(),
        }
    }
}

#[derive(Args)]
struct InputArgs {
    /// PPM file, directory of PPM files, or raw RGB24 file with `--format raw`.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Ppm)]
    format: FormatArg,
    /// Frame width of raw input.
    #[arg(long)]
    width: Option<usize>,
    /// Frame height of raw input.
    #[arg(long)]
    height: Option<usize>,
}

impl InputArgs {
    fn open(&self, fps: Option<u16>) -> Result<FrameSource> {
        let fps = fps.unwrap_or(DEFAULT_FPS);
        if self.format == FormatArg::Raw {
            let (Some(w), Some(h)) = (self.width, self.height) else {
                bail!("raw input needs --width and --height");
            };
            return Ok(FrameSource::open_raw(&self.input, w, h, fps)?);
        }
        if self.input.is_dir() {
            Ok(FrameSource::ppm_sequence(&self.input, fps)?)
        } else {
            Ok(FrameSource::ppm_image(&self.input))
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchMode {
    Bytegen,
    Phases,
    Video,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Table2,
    Prose,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    mode: BenchMode,
    #[arg(long, value_enum, default_value_t = MapArg::Plcm)]
    map: MapArg,
    /// Worker counts, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    threads: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "5")]
    rounds: Vec<usize>,
    /// Frame sides, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "512")]
    sides: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    frames: usize,
    #[arg(long, default_value_t = 24)]
    fps: u16,
    #[arg(long, default_value_t = 1)]
    repetitions: usize,
    /// Map iterations per byte-generation run.
    #[arg(long, default_value_t = 50_000_000)]
    iterations: u64,
    /// Video settings preset; overrides sides, frames and fps.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Benchmark these PPM frames (directory) instead of synthetic ones.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn load_ppm(path: &Path) -> Result<RgbImage> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(read_ppm(&mut BufReader::new(file))?)
}

fn save_ppm(path: &Path, image: &RgbImage) -> Result<()> {
    let mut w = create(path)?;
    write_ppm(&mut w, image)?;
    w.flush()?;
    Ok(())
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(create(path)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn schedule(sequential: bool) -> Schedule {
    if sequential {
        Schedule::Sequential
    } else {
        Schedule::Parallel
    }
}

fn parse_block(text: &str) -> Result<Block> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    ensure!(
        parts.len() == 3 || parts.len() == 4,
        "block `{text}` must be x,y,side[,black|white]"
    );
    let num = |s: &str| {
        s.parse::<usize>()
            .with_context(|| format!("bad number `{s}` in block `{text}`"))
    };
    let fill = match parts.get(3).copied().unwrap_or("black") {
        "black" => Fill::Black,
        "white" => Fill::White,
        other => bail!("unknown fill `{other}`"),
    };
    Ok(Block {
        x: num(parts[0])?,
        y: num(parts[1])?,
        side: num(parts[2])?,
        fill,
    })
}

fn encrypt(
    key: &Key,
    threads: usize,
    rounds: usize,
    fps: Option<u16>,
    input: &InputArgs,
    out: &Path,
    sequential: bool,
) -> Result<()> {
    let mut source = input.open(fps)?;
    let mut cipher = FrameCipher::with_schedule(key, threads, rounds, schedule(sequential))?;
    let first = source.next_image()?.context("input contains no frames")?;
    let header = ContainerHeader::for_frame(
        &Frame::from_image(&first, threads)?,
        key.kind(),
        threads,
        rounds,
        source.fps(),
    )?;
    let mut writer = ContainerWriter::new(create(out)?, header)?;
    let mut next = Some(first);
    while let Some(image) = next {
        let frame = Frame::from_image(&image, threads)?;
        writer.write_frame(&cipher.encrypt_next(&frame)?)?;
        next = source.next_image()?;
    }
    writer.finish()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn decrypt(
    key: &Key,
    threads: Option<usize>,
    rounds: Option<usize>,
    input: &Path,
    out: &Path,
    format: FormatArg,
    sequential: bool,
) -> Result<()> {
    let file = File::open(input).with_context(|| format!("opening {}", input.display()))?;
    let mut reader = ContainerReader::new(BufReader::new(file))?;
    let header = *reader.header();
    let threads = threads.unwrap_or(header.workers as usize);
    let rounds = rounds.unwrap_or(header.rounds as usize);
    header.check_context(key.kind(), threads, rounds)?;
    let mut cipher = FrameCipher::with_schedule(key, threads, rounds, schedule(sequential))?;

    let per_frame_files = out.is_dir();
    let mut stream = if per_frame_files {
        None
    } else {
        Some(create(out)?)
    };
    let mut index = 0;
    while let Some(frame) = reader.next_frame()? {
        let plain = cipher.decrypt_next(&frame)?;
        match &mut stream {
            Some(w) => store_plain_frame(&plain, w, format.into())?,
            None => {
                let ext = if format == FormatArg::Ppm {
                    "ppm"
                } else {
                    "rgb"
                };
                let mut w = create(&out.join(format!("frame_{index:05}.{ext}")))?;
                store_plain_frame(&plain, &mut w, format.into())?;
                w.flush()?;
            }
        }
        index += 1;
    }
    if let Some(mut w) = stream {
        w.flush()?;
    }
    Ok(())
}

fn bench(args: &BenchArgs) -> Result<()> {
    let map: MapKind = args.map.into();
    let records = match args.mode {
        BenchMode::Bytegen => bench_bytegen(map, &args.threads, args.iterations, args.repetitions)?,
        BenchMode::Phases => {
            let mut records = Vec::new();
            for &side in &args.sides {
                for &r in &args.rounds {
                    records.extend(bench_phases(map, side, &args.threads, r, args.frames)?);
                }
            }
            records
        }
        BenchMode::Video => {
            let mut config = match args.preset {
                Some(Preset::Table2) => BenchConfig::table2(map, 1),
                Some(Preset::Prose) => BenchConfig::prose(map, 1),
                None => BenchConfig {
                    sides: args.sides.clone(),
                    frames: args.frames,
                    fps: args.fps,
                    ..BenchConfig::table2(map, 1)
                },
            };
            config.workers = args.threads.clone();
            config.rounds = args.rounds.clone();
            config.repetitions = args.repetitions;
            match &args.input {
                None => bench_video(&config)?,
                Some(dir) => {
                    let key = chaovid::bench::bench_key(map);
                    let images: Vec<RgbImage> = FrameSource::ppm_sequence(dir, config.fps)?
                        .collect::<chaovid::Result<_>>()?;
                    ensure!(!images.is_empty(), "no PPM frames in {}", dir.display());
                    let mut records = Vec::new();
                    for &n in &config.workers {
                        let frames: Vec<Frame> = images
                            .iter()
                            .map(|img| Frame::from_image(img, n))
                            .collect::<chaovid::Result<_>>()?;
                        for &r in &config.rounds {
                            records.push(bench_video_frames(
                                &key,
                                &frames,
                                config.frames,
                                n,
                                r,
                                config.fps,
                            )?);
                        }
                    }
                    records
                }
            }
        }
    };
    write_bench_csv(sink(&args.out)?, &records)?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Keygen { map, seed, out } => {
            let key = match seed {
                Some(s) => Key::random(map.into(), &mut ChaCha8Rng::seed_from_u64(s)),
                None => Key::random(map.into(), &mut rand::thread_rng()),
            };
            let mut w = sink(&out)?;
            writeln!(w, "{}", key.to_hex())?;
            w.flush()?;
        }
        Command::Encrypt {
            key,
            threads,
            rounds,
            fps,
            input,
            out,
            sequential,
        } => encrypt(&key.load()?, threads, rounds, fps, &input, &out, sequential)?,
        Command::Decrypt {
            key,
            threads,
            rounds,
            input,
            out,
            format,
            sequential,
        } => decrypt(
            &key.load()?,
            threads,
            rounds,
            &input,
            &out,
            format,
            sequential,
        )?,
        Command::Analyze {
            input,
            compare,
            samples,
            seed,
            csv,
        } => {
            let image = load_ppm(&input)?;
            let opts = AnalysisOptions {
                samples,
                seed,
                ..AnalysisOptions::default()
            };
            let mut report = analyze(&image, &opts)?;
            if let Some(other) = compare {
                report = report.with_differential(&differential(&image, &load_ppm(&other)?)?);
            }
            print!("{report}");
            if let Some(path) = csv {
                report.write_csv(create(&path)?)?;
            }
        }
        Command::Bench(args) => bench(&args)?,
        Command::Sweep {
            key,
            input,
            threads,
            max_rounds,
            seed,
            out,
        } => {
            let points = sweep_rounds(&load_ppm(&input)?, &key.load()?, threads, max_rounds, seed)?;
            write_sweep_csv(sink(&out)?, &points)?;
        }
        Command::Noise {
            input,
            out,
            rate,
            seed,
        } => save_ppm(&out, &add_salt_pepper(&load_ppm(&input)?, rate, seed)?)?,
        Command::Crop { input, out, blocks } => {
            let blocks = blocks
                .iter()
                .map(|b| parse_block(b))
                .collect::<Result<Vec<_>>>()?;
            save_ppm(&out, &crop_blocks(&load_ppm(&input)?, &blocks)?)?;
        }
        Command::NistExport {
            key,
            threads,
            worker,
            bytes,
            out,
        } => {
            ensure!(
                worker < threads,
                "worker {worker} does not exist among {threads}"
            );
            let mut prbg = derive_worker_params(&key.load()?, threads)?
                .prbgs()?
                .swap_remove(worker);
            let mut w = create(&out)?;
            let mut buf = vec![0u8; 1 << 16];
            let mut left = bytes;
            while left > 0 {
                let take = left.min(buf.len() as u64) as usize;
                prbg.fill_bytes(&mut buf[..take]);
                w.write_all(&buf[..take])?;
                left -= take as u64;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
