mod args;
mod bench;

use std::fs;
use std::io::Write as _;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use cantorfin::certificate::Certificate;
use cantorfin::construct::{bj, indep, noncover, shelah};
use cantorfin::cube::{HARD_CEILING};
use cantorfin::meagerrep::MeagerRep;
use cantorfin::slalom::{CoverKind, CoverOutcome, GrowthFn, Path, SearchOptions};
use cantorfin::trees::CutSequence;
use cantorfin::{replay, solve, twoscale, Error, Word};
use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use args::{Build, CapacityArg, Cli, Command, CoverArg, Export, PackingArg, Solve, TreeArgs};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_GUARD: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Debug)]
enum CliError {
    Core(Error),
    Io(PathBuf, std::io::Error),
    Usage(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_guard() => EXIT_GUARD,
            CliError::Core(_) | CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(..) => EXIT_IO,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Usage(m) => f.write_str(m),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: &Cli) -> CliResult<u8> {
    if cli.guard_bits > HARD_CEILING {
        return Err(CliError::Usage(format!(
            "--guard-bits {} exceeds the hard ceiling {HARD_CEILING}",
            cli.guard_bits
        )));
    }
    let workers = cli.workers.unwrap_or_else(|| {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    });
    if workers == 0 {
        return Err(CliError::Usage("--workers must be positive".into()));
    }
    // the global pool can only be configured once; ignore a second attempt
    let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();

    match &cli.command {
        Command::Build(b) => {
            let cert = build(cli, b)?;
            emit(cli, &cert)?;
            Ok(if cert.passed() { 0 } else { EXIT_FAIL })
        }
        Command::Solve(s) => solve_cmd(cli, s, workers),
        Command::Verify { path } => verify(cli, path),
        Command::Bench(b) => bench::run(cli, b, workers),
        Command::Export(e) => export(cli, e),
    }
}

fn read(path: &FsPath) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn write(path: &FsPath, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn emit(cli: &Cli, cert: &Certificate) -> CliResult<()> {
    if let Some(p) = &cli.out {
        write(p, &cert.to_json())?;
    }
    if cli.json {
        print!("{}", cert.to_json());
    } else {
        print_summary(cert);
    }
    Ok(())
}

fn print_summary(cert: &Certificate) {
    println!("construction\t{}", cert.construction);
    println!("seed\t{}", cert.seed);
    for c in &cert.checks {
        println!(
            "check\t{}\t{} {} {}\t{}",
            c.name,
            c.lhs,
            c.relation,
            c.rhs,
            if c.verdict { "pass" } else { "fail" }
        );
    }
    for n in &cert.notes {
        println!("note\t{n}");
    }
    println!("verdict\t{}", if cert.passed() { "pass" } else { "fail" });
    println!("checksum\t{}", cert.checksum);
}

fn packing(p: PackingArg) -> shelah::Packing {
    match p {
        PackingArg::Disjoint => shelah::Packing::Disjoint,
        PackingArg::Cyclic => shelah::Packing::Cyclic,
    }
}

fn tree_cuts(t: &TreeArgs) -> CliResult<CutSequence> {
    if t.cuts.is_empty() {
        shelah::minimal_cuts(t.m, t.stages, packing(t.packing))
            .ok_or_else(|| CliError::Usage("no feasible cut sequence fits in 64-bit blocks".into()))
    } else {
        Ok(CutSequence::new(t.cuts.clone())?)
    }
}

fn level_options(l: &args::LevelArgs) -> bj::BjOptions {
    bj::BjOptions {
        k_override: l.k,
        capacity: l.capacity,
        reserve: !l.no_reserve,
        lo: l.lo,
    }
}

fn parse_words(lo: usize, words: &[String]) -> CliResult<Vec<Word>> {
    Ok(words
        .iter()
        .map(|w| Word::parse(lo, w))
        .collect::<Result<Vec<_>, _>>()?)
}

fn build(cli: &Cli, b: &Build) -> CliResult<Certificate> {
    let seed = cli.seed;
    let cert = match b {
        Build::Indep { n, count, block, lo, trials } => {
            indep::certify_indep(*n, (*lo, lo + block), *count, *trials, seed)?
        }
        Build::ShelahTree(t) => {
            shelah::certify_shelah_tree(&tree_cuts(t)?, t.m, t.stages, packing(t.packing), cli.guard_bits)?
                .with_seed(seed)
        }
        Build::CountingBound { n } => shelah::certify_counting_bound(*n)?.with_seed(seed),
        Build::LocalizationH { cuts, words, capacity, packing: p } => {
            let cap = match capacity {
                CapacityArg::Lemma => shelah::Capacity::Lemma,
                CapacityArg::Doubled => shelah::Capacity::Doubled,
            };
            let words = parse_words(0, words)?;
            shelah::localization_h_check(&CutSequence::new(cuts.clone())?, &words, &cap, packing(*p))?
                .with_seed(seed)
        }
        Build::BjLevel(l) => bj::certify_bj_level(l.n, l.fn_, &level_options(l))?.with_seed(seed),
        Build::Evade { level, words } => {
            let opts = level_options(level);
            let lvl = bj::build_bj_level(level.n, level.fn_, &opts)?;
            let xs = if words.is_empty() {
                if lvl.len() > 64 {
                    return Err(CliError::Core(Error::GuardExceeded {
                        what: "random words on the level",
                        needed: lvl.len() as u64,
                        limit: 64,
                    }));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..lvl.capacity)
                    .map(|_| {
                        let mut w = Word::zeros(lvl.lo, lvl.hi());
                        for j in lvl.lo..lvl.hi() {
                            w.set(j, rng.gen());
                        }
                        w
                    })
                    .collect()
            } else {
                parse_words(lvl.lo, words)?
            };
            bj::certify_evade(level.n, level.fn_, &opts, &xs)?.with_seed(seed)
        }
        Build::TwoScale { frame, windows, max_width, k0 } => {
            let frame = match frame {
                Some(p) => twoscale::TwoScaleFrame::from_text(&read(p)?)?,
                None => twoscale::random_frame(*windows, *max_width, seed)?,
            };
            twoscale::certify_two_scale(&frame, *k0)?.with_seed(seed)
        }
        Build::Noncover { levels, n, k, cover, samples } => {
            if *levels == 0 {
                return Err(CliError::Usage("--levels must be positive".into()));
            }
            let cap = bj::default_capacity(*n) as usize;
            let specs: Vec<noncover::LevelSpec> = (0..*levels)
                .map(|i| noncover::LevelSpec {
                    n: *n,
                    fn_: 1,
                    options: bj::BjOptions::toy(*k, i * cap * k),
                })
                .collect();
            let built = specs.iter().map(|s| s.build()).collect::<Result<Vec<_>, _>>()?;
            let f = noncover::pattern_counts(&built)?;
            let widths: Vec<u64> = built.iter().map(|l| l.capacity).collect();
            let family = match cover {
                CoverArg::Partition => noncover::partition_cover(&f, &widths)?,
                CoverArg::Cof => match cantorfin::slalom::cof_fin(&f, &widths, &SearchOptions::default())? {
                    CoverOutcome::Optimal { witness, .. } => witness,
                    other => return Err(CliError::Usage(format!("no cover found: {other:?}"))),
                },
            };
            let opts = noncover::NoncoverOptions {
                guard: cli.guard_bits,
                samples: *samples,
                seed,
            };
            noncover::assemble_noncover_witness(&specs, &family, &opts)?
        }
    };
    Ok(cert)
}

fn parse_family(s: &str) -> CliResult<Vec<Path>> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.split(',')
                .map(|v| {
                    v.trim()
                        .parse::<u64>()
                        .map_err(|_| CliError::Usage(format!("bad path value `{v}`")))
                })
                .collect::<CliResult<Vec<_>>>()
                .map(Path)
        })
        .collect()
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn solve_cmd(cli: &Cli, s: &Solve, workers: usize) -> CliResult<u8> {
    let opts = |max_family: &Option<usize>| SearchOptions {
        workers,
        max_family: *max_family,
        ..SearchOptions::default()
    };
    let (cert, row, table) = match s {
        Solve::Cov { f, w, t, from, max_family, table } => {
            let g = GrowthFn::new(f.clone())?;
            let kind = CoverKind::Cov { t: *t, from: *from };
            let (cert, out) = solve::certify_cover(&g, w, kind, &opts(max_family))?;
            let row = format!(
                "cov\tf={}\tw={}\tt={t}\tfrom={from}\tvalue={}",
                join(f),
                join(w),
                outcome_value(&out)
            );
            (cert, row, table.clone())
        }
        Solve::Cof { f, w, max_family, table } => {
            let g = GrowthFn::new(f.clone())?;
            let (cert, out) = solve::certify_cover(&g, w, CoverKind::Cof, &opts(max_family))?;
            let row = format!("cof\tf={}\tw={}\tvalue={}", join(f), join(w), outcome_value(&out));
            (cert, row, table.clone())
        }
        Solve::Match { family, block, cuts } => {
            let fam = parse_family(family)?;
            let cuts = if cuts.is_empty() {
                None
            } else {
                Some(CutSequence::new(cuts.clone())?)
            };
            let cert = solve::certify_match(&fam, *block, cuts.as_ref())?;
            let h = cert.witness.as_ref().map(|w| w["h"].to_string()).unwrap_or_default();
            (cert, format!("match\tfamily={family}\th={h}"), None)
        }
        Solve::Localize { family, f, from } => {
            let fam = parse_family(family)?;
            let cert = solve::certify_localize(&fam, &GrowthFn::new(f.clone())?, *from)?;
            let s = cert.witness.as_ref().map(|w| w.to_string()).unwrap_or_default();
            (cert, format!("localize\tfamily={family}\tfrom={from}\tS={s}"), None)
        }
        Solve::Includes { r1, r2, oracle_guard } => {
            let a = MeagerRep::from_text(&read(r1)?)?;
            let b = MeagerRep::from_text(&read(r2)?)?;
            let cert = solve::certify_includes(&a, &b, *oracle_guard)?;
            let crit = cert.check("criterion").map(|c| c.lhs.clone()).unwrap_or_default();
            (cert, format!("includes\tcriterion={crit}"), None)
        }
    };
    let cert = cert.with_seed(cli.seed);
    let row = format!("{row}\tverdict={}\tchecksum={}", verdict(&cert), &cert.checksum[..16]);
    if let Some(p) = &cli.out {
        write(p, &cert.to_json())?;
    }
    if let Some(t) = &table {
        let mut f = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(t)
            .map_err(|e| CliError::Io(t.clone(), e))?;
        writeln!(f, "{row}").map_err(|e| CliError::Io(t.clone(), e))?;
    }
    if cli.json {
        print!("{}", cert.to_json());
    } else {
        println!("{row}");
    }
    Ok(if cert.passed() { 0 } else { EXIT_FAIL })
}

fn outcome_value(o: &CoverOutcome) -> String {
    match o {
        CoverOutcome::Optimal { value, .. } => value.to_string(),
        CoverOutcome::Infeasible { .. } => "infeasible".into(),
        CoverOutcome::AboveCap { cap } => format!(">{cap}"),
    }
}

fn verdict(c: &Certificate) -> &'static str {
    if c.passed() {
        "pass"
    } else {
        "fail"
    }
}

fn verify(cli: &Cli, path: &FsPath) -> CliResult<u8> {
    let cert = Certificate::from_json(&read(path)?)?;
    let v = replay::verify(&cert)?;
    let ok = v.ok();
    if cli.json {
        let report = serde_json::json!({
            "path": path.display().to_string(),
            "construction": cert.construction,
            "checksum_ok": v.recheck.checksum_ok,
            "unreproduced": v.recheck.unreproduced,
            "verdict_consistent": v.recheck.verdict_consistent,
            "reproduced": v.reproduced,
            "stored_verdict": verdict(&cert),
            "ok": ok,
        });
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        println!("construction\t{}", cert.construction);
        println!("checksum\t{}", if v.recheck.checksum_ok { "ok" } else { "mismatch" });
        for name in &v.recheck.unreproduced {
            println!("unreproduced\t{name}");
        }
        println!("verdict\t{}", if v.recheck.verdict_consistent { "consistent" } else { "inconsistent" });
        println!("rebuild\t{}", if v.reproduced { "identical" } else { "differs" });
        println!("result\t{}", if ok { "ok" } else { "mismatch" });
    }
    Ok(if ok { 0 } else { EXIT_FAIL })
}

fn export(cli: &Cli, e: &Export) -> CliResult<u8> {
    let text = match e {
        Export::Checks { path } => {
            let cert = Certificate::from_json(&read(path)?)?;
            let mut out = String::from("name\tlhs\trelation\trhs\tverdict\n");
            for c in &cert.checks {
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\n",
                    c.name,
                    c.lhs,
                    c.relation,
                    c.rhs,
                    if c.verdict { "pass" } else { "fail" }
                ));
            }
            out
        }
        Export::Tree(t) => {
            let st = shelah::build_shelah_tree_guarded(
                &tree_cuts(t)?,
                t.m,
                t.stages,
                packing(t.packing),
                cli.guard_bits,
            )?;
            st.tree.to_text()
        }
        Export::Frame { windows, max_width } => {
            twoscale::random_frame(*windows, *max_width, cli.seed)?.to_text()
        }
    };
    match &cli.out {
        Some(p) => write(p, &text)?,
        None => print!("{text}"),
    }
    Ok(0)
}
